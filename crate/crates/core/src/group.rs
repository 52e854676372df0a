//! Permutation groups given by generators: orbits, a Schreier–Sims
//! stabilizer chain with exact order, the centralizer in `S_n` of a
//! transitive group (the automorphism group of a dessin), and block systems.

use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use crate::dessin::Dessin;
use crate::perm::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("no generators given")]
    NoGenerators,
    #[error("generators have mixed degrees")]
    MixedDegrees,
    #[error("residue-block test needs x = (1 2 ... n)")]
    NotStandardCycle,
    #[error("m = {m} must divide n = {n} with 2 <= m < n")]
    BadModulus { m: usize, n: usize },
}

type Raw = Vec<u32>;

fn mul(a: &[u32], b: &[u32]) -> Raw {
    b.iter().map(|&e| a[e as usize]).collect()
}

fn inv(a: &[u32]) -> Raw {
    let mut out = vec![0u32; a.len()];
    for (i, &v) in a.iter().enumerate() {
        out[v as usize] = i as u32;
    }
    out
}

fn is_id(a: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &v)| i as u32 == v)
}

/// One level of the stabilizer chain.
#[derive(Clone, Debug)]
struct Level {
    base_point: usize,
    /// Strong generators fixing all earlier base points.
    gens: Vec<Raw>,
    orbit: Vec<usize>,
    /// `transversal[β]` maps `base_point` to `β`.
    transversal: Vec<Option<Raw>>,
}

impl Level {
    fn new(base_point: usize, degree: usize) -> Self {
        let mut lvl = Level { base_point, gens: Vec::new(), orbit: Vec::new(), transversal: Vec::new() };
        lvl.rebuild(degree);
        lvl
    }

    fn rebuild(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.transversal[self.base_point] = Some((0..degree as u32).collect());
        self.orbit = vec![self.base_point];
        let mut i = 0;
        while i < self.orbit.len() {
            let gamma = self.orbit[i];
            for s in &self.gens {
                let delta = s[gamma] as usize;
                if self.transversal[delta].is_none() {
                    let u = mul(s, self.transversal[gamma].as_ref().unwrap());
                    self.transversal[delta] = Some(u);
                    self.orbit.push(delta);
                }
            }
            i += 1;
        }
    }
}

/// A permutation group with a base and strong generating set.
#[derive(Clone, Debug)]
pub struct GroupHandle {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    order: BigUint,
}

impl GroupHandle {
    /// Runs deterministic Schreier–Sims. The base starts at point 1 and is
    /// extended with the smallest moved point whenever a level is added.
    pub fn new(generators: &[Permutation]) -> Result<Self, GroupError> {
        let first = generators.first().ok_or(GroupError::NoGenerators)?;
        let degree = first.degree();
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(GroupError::MixedDegrees);
        }
        let mut levels: Vec<Level> = Vec::new();
        if degree > 0 {
            levels.push(Level::new(0, degree));
        }
        for g in generators {
            let raw = g.raw();
            if is_id(raw) {
                continue;
            }
            if levels.iter().all(|l| raw[l.base_point] as usize == l.base_point) {
                let moved = (0..degree).find(|&i| raw[i] as usize != i).unwrap();
                levels.push(Level::new(moved, degree));
            }
            for l in levels.iter_mut() {
                l.gens.push(raw.to_vec());
                if raw[l.base_point] as usize != l.base_point {
                    break;
                }
            }
        }
        for l in levels.iter_mut() {
            l.rebuild(degree);
        }

        let mut i = levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut restart_at = None;
            'schreier: for oi in 0..levels[lvl].orbit.len() {
                let beta = levels[lvl].orbit[oi];
                for si in 0..levels[lvl].gens.len() {
                    let s = &levels[lvl].gens[si];
                    let u_beta = levels[lvl].transversal[beta].as_ref().unwrap();
                    let image = s[beta] as usize;
                    let su = mul(s, u_beta);
                    let u_image = levels[lvl].transversal[image].as_ref().unwrap();
                    if su == *u_image {
                        continue;
                    }
                    let h = mul(&inv(u_image), &su);
                    if let Some((residue, drop)) = sift(&levels, &h, lvl + 1) {
                        if drop == levels.len() {
                            let moved = (0..degree).find(|&p| residue[p] as usize != p).unwrap();
                            levels.push(Level::new(moved, degree));
                        }
                        for l in levels.iter_mut().take(drop + 1).skip(lvl + 1) {
                            l.gens.push(residue.clone());
                            l.rebuild(degree);
                        }
                        restart_at = Some(drop);
                        break 'schreier;
                    }
                }
            }
            match restart_at {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }

        let order = levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()));
        Ok(GroupHandle { degree, generators: generators.to_vec(), levels, order })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Base points, 1-based.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point + 1).collect()
    }

    /// Fundamental orbit sizes, one per base point.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.levels
            .first()
            .map(|l| l.gens.iter().map(|g| Permutation::from_raw(g.clone())).collect())
            .unwrap_or_default()
    }

    /// Generators of the stabilizer of point 1.
    pub fn point_stabilizer_generators(&self) -> Vec<Permutation> {
        self.levels
            .get(1)
            .map(|l| l.gens.iter().map(|g| Permutation::from_raw(g.clone())).collect())
            .unwrap_or_default()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && sift(&self.levels, g.raw(), 0).is_none()
    }
}

/// Sifts `h` through the chain starting at level `from`. Returns `None` if it
/// reduces to the identity, else the residue and the level where it dropped
/// out (`levels.len()` when it survived every level).
fn sift(levels: &[Level], h: &[u32], from: usize) -> Option<(Raw, usize)> {
    let mut h = h.to_vec();
    for (j, l) in levels.iter().enumerate().skip(from) {
        let beta = h[l.base_point] as usize;
        match &l.transversal[beta] {
            None => return Some((h, j)),
            Some(u) => h = mul(&inv(u), &h),
        }
    }
    if is_id(&h) {
        None
    } else {
        Some((h, levels.len()))
    }
}

/// Orbit of the 1-based `point` under the generators, 1-based, in BFS order.
pub fn orbit(gens: &[Permutation], degree: usize, point: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    let mut out = vec![point - 1];
    seen[point - 1] = true;
    let mut i = 0;
    while i < out.len() {
        let e = out[i];
        for g in gens {
            let f = g.raw()[e] as usize;
            if !seen[f] {
                seen[f] = true;
                out.push(f);
            }
        }
        i += 1;
    }
    out.into_iter().map(|e| e + 1).collect()
}

pub fn is_transitive(gens: &[Permutation], degree: usize) -> bool {
    degree == 0 || orbit(gens, degree, 1).len() == degree
}

pub fn group_order(gens: &[Permutation]) -> Result<BigUint, GroupError> {
    Ok(GroupHandle::new(gens)?.order().clone())
}

/// Monodromy group `⟨x, y⟩` of a dessin.
pub fn monodromy_group(d: &Dessin) -> GroupHandle {
    GroupHandle::new(&[d.x().clone(), d.y().clone()]).expect("dessin permutations share a degree")
}

/// Regular iff the monodromy group has order exactly `n`; equivalently the
/// centralizer is transitive, so every image of point 1 must extend.
pub fn is_regular(d: &Dessin) -> bool {
    let gens = [d.x().clone(), d.y().clone()];
    let tree = SpanningTree::new(&gens, d.degree());
    (0..d.degree()).all(|t| tree.commuting_extension(&gens, t).is_some())
}

/// For each point, the `(parent, generator)` reaching it from point 1.
struct SpanningTree {
    parent: Vec<Option<(usize, usize)>>,
    order: Vec<usize>,
}

impl SpanningTree {
    fn new(gens: &[Permutation], n: usize) -> Self {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut order = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let e = order[i];
            for (gi, g) in gens.iter().enumerate() {
                let f = g.raw()[e] as usize;
                if !seen[f] {
                    seen[f] = true;
                    parent[f] = Some((e, gi));
                    order.push(f);
                }
            }
            i += 1;
        }
        SpanningTree { parent, order }
    }

    /// The permutation sending point 1 to `target` and commuting with `gens`, if any.
    fn commuting_extension(&self, gens: &[Permutation], target: usize) -> Option<Permutation> {
        let n = self.parent.len();
        let mut c = vec![u32::MAX; n];
        c[0] = target as u32;
        for &p in self.order.iter().skip(1) {
            let (par, gi) = self.parent[p].unwrap();
            c[p] = gens[gi].raw()[c[par] as usize];
        }
        if !crate::perm::is_bijection(&c) {
            return None;
        }
        let c = Permutation::from_raw(c);
        gens.iter().all(|g| g.commutes_with(&c)).then_some(c)
    }
}

/// Centralizer in `S_n` of a transitive group, sorted, identity first.
///
/// The centralizer acts semiregularly, so an element is pinned down by where
/// it sends point 1. Candidate images are the fixed points of the stabilizer
/// of 1; each candidate is extended along a spanning tree of the orbit graph
/// and kept if it commutes with every generator.
pub fn transitive_centralizer(handle: &GroupHandle) -> Vec<Permutation> {
    let n = handle.degree();
    let gens = handle.generators();
    assert!(is_transitive(gens, n), "centralizer routine requires a transitive group");
    if n == 0 {
        return vec![Permutation::identity(0)];
    }
    let stab = handle.point_stabilizer_generators();
    let tree = SpanningTree::new(gens, n);
    let mut out: Vec<Permutation> = (0..n)
        .filter(|&e| stab.iter().all(|s| s.raw()[e] as usize == e))
        .filter_map(|e| tree.commuting_extension(gens, e))
        .collect();
    out.sort();
    out
}

/// `Aut(D)`: the centralizer of `⟨x, y⟩` in the symmetric group on edges.
pub fn automorphism_group(d: &Dessin) -> Vec<Permutation> {
    transitive_centralizer(&monodromy_group(d))
}

/// Whether `y` maps each residue class mod `m` (on points `1..n`) onto a residue class.
pub fn preserves_residue_classes(y: &Permutation, m: usize) -> bool {
    let raw = y.raw();
    let n = raw.len();
    let mut class_image = vec![usize::MAX; m];
    for (i, &v) in raw.iter().enumerate() {
        let slot = &mut class_image[i % m];
        let r = v as usize % m;
        if *slot == usize::MAX {
            *slot = r;
        } else if *slot != r {
            return false;
        }
    }
    debug_assert!(n % m == 0);
    true
}

/// For `x = (1 2 ... n)`: whether the residue classes mod `m` form a block
/// system of `⟨x, y⟩`. `x` always preserves them, so only `y` is checked.
pub fn residue_blocks_preserved(d: &Dessin, m: usize) -> Result<bool, GroupError> {
    let n = d.degree();
    if *d.x() != Permutation::standard_cycle(n) {
        return Err(GroupError::NotStandardCycle);
    }
    if m < 2 || m >= n || n % m != 0 {
        return Err(GroupError::BadModulus { m, n });
    }
    Ok(preserves_residue_classes(d.y(), m))
}

/// Divisors `m` of `n` with `2 <= m < n`.
pub fn proper_divisors(n: usize) -> Vec<usize> {
    (2..n).filter(|m| n % m == 0).collect()
}

/// A partition of the points into blocks of equal size, 1-based, each block
/// sorted and blocks ordered by smallest element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSystem {
    pub block_size: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.block_size == 1 || self.blocks.len() == 1
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Finest block system in which the 1-based points `a` and `b` share a block
/// (union-find closure). The group must be transitive.
pub fn minimal_block_system(gens: &[Permutation], degree: usize, a: usize, b: usize) -> BlockSystem {
    let mut parent: Vec<usize> = (0..degree).collect();
    let mut queue = VecDeque::new();
    let (a, b) = (a - 1, b - 1);
    if a != b {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[rb] = ra;
        queue.push_back((a, b));
    }
    while let Some((u, v)) = queue.pop_front() {
        for g in gens {
            let (gu, gv) = (g.raw()[u] as usize, g.raw()[v] as usize);
            let (ru, rv) = (find(&mut parent, gu), find(&mut parent, gv));
            if ru != rv {
                parent[rv] = ru;
                queue.push_back((gu, gv));
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut index_of_root = vec![usize::MAX; degree];
    for e in 0..degree {
        let r = find(&mut parent, e);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[index_of_root[r]].push(e + 1);
    }
    let block_size = blocks.first().map_or(0, Vec::len);
    BlockSystem { block_size, blocks }
}

/// Primitivity of a transitive group via minimal block systems for each pair `(1, e)`.
pub fn is_primitive_general(gens: &[Permutation], degree: usize) -> bool {
    (2..=degree).all(|e| minimal_block_system(gens, degree, 1, e).block_count() == 1)
}

pub fn is_primitive(d: &Dessin) -> bool {
    let n = d.degree();
    if *d.x() == Permutation::standard_cycle(n) {
        proper_divisors(n).into_iter().all(|m| !preserves_residue_classes(d.y(), m))
    } else {
        is_primitive_general(&[d.x().clone(), d.y().clone()], n)
    }
}

/// Numbers of blocks of the non-trivial block systems found: for `x = σ_n`
/// every preserved residue modulus, otherwise the minimal systems through `(1, e)`.
pub fn block_divisors(d: &Dessin) -> Vec<usize> {
    let n = d.degree();
    if *d.x() == Permutation::standard_cycle(n) {
        return proper_divisors(n).into_iter().filter(|&m| preserves_residue_classes(d.y(), m)).collect();
    }
    let gens = [d.x().clone(), d.y().clone()];
    let mut out: Vec<usize> = (2..=n)
        .map(|e| minimal_block_system(&gens, n, 1, e))
        .filter(|s| !s.is_trivial())
        .map(|s| s.block_count())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `n` composite and `⟨x, y⟩` primitive must force a trivial automorphism group.
pub fn primitive_implies_trivial_check(d: &Dessin) -> bool {
    let n = d.degree();
    let composite = n > 1 && !is_prime(n as u64);
    !(composite && is_primitive(d)) || automorphism_group(d).len() == 1
}
