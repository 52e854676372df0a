//! Dessins as permutation pairs: passports, genus, canonical forms up to
//! simultaneous conjugation, and exhaustive enumeration by passport.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::is_transitive;
use crate::perm::{CycleType, PermError, Permutation};

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DessinError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("<x, y> is not transitive")]
    NotTransitive,
    #[error("invalid passport: {0}")]
    InvalidPassport(String),
    #[error("degree {n} exceeds the enumeration guard {guard}")]
    Infeasible { n: usize, guard: usize },
}

/// Cycle types of `x`, `y` and `z = (xy)⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Passport {
    lambda0: CycleType,
    lambda1: CycleType,
    lambda_inf: CycleType,
}

impl Passport {
    pub fn new(lambda0: CycleType, lambda1: CycleType, lambda_inf: CycleType) -> Result<Self, DessinError> {
        let n = lambda0.degree();
        if lambda1.degree() != n || lambda_inf.degree() != n {
            return Err(DessinError::InvalidPassport(format!(
                "partitions of different sizes: {}, {}, {}",
                n,
                lambda1.degree(),
                lambda_inf.degree()
            )));
        }
        Ok(Passport { lambda0, lambda1, lambda_inf })
    }

    /// `[a^p, b^q, c^r]`.
    pub fn uniform(a: usize, b: usize, c: usize, n: usize) -> Result<Self, DessinError> {
        for d in [a, b, c] {
            if d == 0 || n % d != 0 {
                return Err(DessinError::InvalidPassport(format!("{d} does not divide {n}")));
            }
        }
        Passport::new(CycleType::uniform(a, n / a), CycleType::uniform(b, n / b), CycleType::uniform(c, n / c))
    }

    pub fn degree(&self) -> usize {
        self.lambda0.degree()
    }

    pub fn lambda0(&self) -> &CycleType {
        &self.lambda0
    }

    pub fn lambda1(&self) -> &CycleType {
        &self.lambda1
    }

    pub fn lambda_inf(&self) -> &CycleType {
        &self.lambda_inf
    }

    /// `(n - (l(λ0) + l(λ1) + l(λ∞))) / 2 + 1`.
    pub fn genus(&self) -> Result<usize, DessinError> {
        let n = self.degree() as i64;
        let l = (self.lambda0.len() + self.lambda1.len() + self.lambda_inf.len()) as i64;
        let twice = n - l + 2;
        if twice < 0 || twice % 2 != 0 {
            return Err(DessinError::InvalidPassport(format!("{self} has no integral genus >= 0")));
        }
        Ok((twice / 2) as usize)
    }

    pub fn is_uniform(&self) -> bool {
        self.lambda0.is_uniform() && self.lambda1.is_uniform() && self.lambda_inf.is_uniform()
    }
}

impl fmt::Display for Passport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.lambda0, self.lambda1, self.lambda_inf)
    }
}

impl FromStr for Passport {
    type Err = DessinError;

    /// `"[6,3^2,6]"` or `"[4 1, 3 1 1, 4 1]"`.
    fn from_str(s: &str) -> Result<Self, DessinError> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| DessinError::InvalidPassport(format!("expected [..,..,..], got {s:?}")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(DessinError::InvalidPassport(format!("expected three partitions in {s:?}")));
        }
        let ct = |t: &str| t.trim().parse::<CycleType>().map_err(DessinError::from);
        Passport::new(ct(parts[0])?, ct(parts[1])?, ct(parts[2])?)
    }
}

impl Serialize for Passport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Passport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// All uniform passports `[a^p, b^q, c^r]` of degree `n` with integral genus,
/// one per multiset `{a, b, c}` written with `c >= a >= b`. Sorted by genus,
/// then by `(p, q, r)`.
pub fn uniform_passports(n: usize) -> Vec<(Passport, usize)> {
    let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
    let mut out = Vec::new();
    for (i, &b) in divisors.iter().enumerate() {
        for (j, &a) in divisors.iter().enumerate().skip(i) {
            for &c in divisors.iter().skip(j) {
                let passport = Passport::uniform(a, b, c, n).expect("divisors of n");
                if let Ok(g) = passport.genus() {
                    out.push((passport, g));
                }
            }
        }
    }
    out.sort_by_key(|(p, g)| (*g, n / p.lambda0.parts()[0], n / p.lambda1.parts()[0], n / p.lambda_inf.parts()[0]));
    out
}

/// Every passport of degree `n` with integral genus, taken up to reordering
/// of the three roles: one representative `λ0 >= λ1 >= λ∞` per multiset.
pub fn passports_of_degree(n: usize) -> Vec<Passport> {
    let parts = CycleType::all_of_degree(n);
    let mut out = Vec::new();
    for (i, l0) in parts.iter().enumerate() {
        for (j, l1) in parts.iter().enumerate().skip(i) {
            for linf in parts.iter().skip(j) {
                let p = Passport::new(l0.clone(), l1.clone(), linf.clone()).expect("same degree");
                if p.genus().is_ok() {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// A dessin: permutations `x`, `y` of `{1..n}` generating a transitive group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dessin {
    x: Permutation,
    y: Permutation,
}

impl Dessin {
    pub fn new(x: Permutation, y: Permutation) -> Result<Self, DessinError> {
        if x.degree() != y.degree() {
            return Err(PermError::DegreeMismatch(x.degree(), y.degree()).into());
        }
        if !is_transitive(&[x.clone(), y.clone()], x.degree()) {
            return Err(DessinError::NotTransitive);
        }
        Ok(Dessin { x, y })
    }

    pub fn from_cycles(n: usize, x: &str, y: &str) -> Result<Self, DessinError> {
        Dessin::new(Permutation::parse_cycles(x, n)?, Permutation::parse_cycles(y, n)?)
    }

    pub(crate) fn from_trusted(x: Permutation, y: Permutation) -> Self {
        debug_assert!(is_transitive(&[x.clone(), y.clone()], x.degree()));
        Dessin { x, y }
    }

    pub fn degree(&self) -> usize {
        self.x.degree()
    }

    pub fn x(&self) -> &Permutation {
        &self.x
    }

    pub fn y(&self) -> &Permutation {
        &self.y
    }

    /// `z = (xy)⁻¹`, so that `xyz = 1`.
    pub fn z(&self) -> Permutation {
        (&self.x * &self.y).inverse()
    }

    pub fn passport(&self) -> Passport {
        Passport { lambda0: self.x.cycle_type(), lambda1: self.y.cycle_type(), lambda_inf: self.z().cycle_type() }
    }

    pub fn genus(&self) -> usize {
        self.passport().genus().expect("a dessin always has a valid genus")
    }

    /// `(gxg⁻¹, gyg⁻¹)`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Dessin, DessinError> {
        Ok(Dessin { x: self.x.conjugate(g)?, y: self.y.conjugate(g)? })
    }

    /// The six dessins obtained by permuting the roles of `x`, `y`, `z`:
    /// the three rotations of `(x, y, z)` and their reversed inverses.
    pub fn role_permutations(&self) -> [Dessin; 6] {
        let (x, y, z) = (self.x.clone(), self.y.clone(), self.z());
        let mk = |a: &Permutation, b: &Permutation| Dessin { x: a.clone(), y: b.clone() };
        [
            mk(&x, &y),
            mk(&y, &z),
            mk(&z, &x),
            mk(&y.inverse(), &x.inverse()),
            mk(&z.inverse(), &y.inverse()),
            mk(&x.inverse(), &z.inverse()),
        ]
    }

    pub fn canonical_form(&self) -> Dessin {
        canonical_form(self)
    }

    pub fn to_json(&self) -> DessinJson {
        DessinJson { n: self.degree(), x: self.x.to_cycle_string(), y: self.y.to_cycle_string() }
    }
}

impl fmt::Display for Dessin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x = {}, y = {}", self.x, self.y)
    }
}

/// Wire format: `{"n": 8, "x": "(1 2 3 4)(5 6 7 8)", "y": "..."}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DessinJson {
    pub n: usize,
    pub x: String,
    pub y: String,
}

impl TryFrom<DessinJson> for Dessin {
    type Error = DessinError;

    fn try_from(j: DessinJson) -> Result<Self, DessinError> {
        Dessin::from_cycles(j.n, &j.x, &j.y)
    }
}

impl Serialize for Dessin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dessin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Dessin::try_from(DessinJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// The lexicographically smallest permutation of the given type: cycles in
/// ascending length on consecutive labels, e.g. `(1)(2 3)(4 5 6)`.
pub fn canonical_layout(ct: &CycleType) -> Permutation {
    let mut images = Vec::with_capacity(ct.degree());
    let mut start = 0u32;
    for &len in ct.parts().iter().rev() {
        let len = len as u32;
        for i in 0..len {
            images.push(start + (i + 1) % len);
        }
        start += len;
    }
    Permutation::from_raw(images)
}

struct Canonizer<'a> {
    y: &'a [u32],
    xcycles: Vec<Vec<u32>>,
    cycle_of: Vec<usize>,
    pos_in_cycle: Vec<usize>,
    cycle_used: Vec<bool>,
    /// Start label and length of each cycle of the layout, in label order.
    layout: Vec<(u32, usize)>,
    layout_at_label: Vec<usize>,
    /// Layout cycles of each length, in label order, and how many are taken.
    layout_by_len: Vec<Vec<usize>>,
    taken: Vec<usize>,
    label: Vec<u32>,
    point: Vec<u32>,
    cur: Vec<u32>,
    best: Option<Vec<u32>>,
}

impl Canonizer<'_> {
    fn assign(&mut self, c: usize, s: u32) {
        let k = self.xcycles[c].len();
        let li = self.layout_by_len[k][self.taken[k]];
        let start = self.layout[li].0;
        let offset = self.pos_in_cycle[s as usize];
        for i in 0..k {
            let pt = self.xcycles[c][(offset + i) % k];
            self.label[pt as usize] = start + i as u32;
            self.point[(start + i as u32) as usize] = pt;
        }
        self.cycle_used[c] = true;
        self.taken[k] += 1;
    }

    fn unassign(&mut self, c: usize) {
        let k = self.xcycles[c].len();
        self.taken[k] -= 1;
        self.cycle_used[c] = false;
        for i in 0..k {
            let pt = self.xcycles[c][i];
            self.point[self.label[pt as usize] as usize] = NONE;
            self.label[pt as usize] = NONE;
        }
    }

    fn worse_than_best(&self, j: usize) -> bool {
        match &self.best {
            Some(b) => self.cur[..=j] > b[..=j],
            None => false,
        }
    }

    fn run(&mut self, j: usize) {
        let n = self.label.len();
        if j == n {
            if self.best.as_ref().is_none_or(|b| self.cur < *b) {
                self.best = Some(self.cur.clone());
            }
            return;
        }
        let pt = self.point[j];
        if pt != NONE {
            let img = self.y[pt as usize];
            let mut newly = None;
            if self.label[img as usize] == NONE {
                let c = self.cycle_of[img as usize];
                self.assign(c, img);
                newly = Some(c);
            }
            self.cur[j] = self.label[img as usize];
            if !self.worse_than_best(j) {
                self.run(j + 1);
            }
            if let Some(c) = newly {
                self.unassign(c);
            }
        } else {
            let k = self.layout[self.layout_at_label[j]].1;
            for c in 0..self.xcycles.len() {
                if self.cycle_used[c] || self.xcycles[c].len() != k {
                    continue;
                }
                for i in 0..k {
                    let s = self.xcycles[c][i];
                    self.assign(c, s);
                    self.run(j);
                    self.unassign(c);
                }
            }
        }
    }
}

/// The lexicographically least `(gxg⁻¹, gyg⁻¹)` over `g ∈ S_n`, keyed on the
/// image list of `x'` followed by that of `y'`.
///
/// `x'` is forced to be [`canonical_layout`]; the search then runs over the
/// relabelings that achieve it, fixing labels greedily along `y` and
/// branching only when a fresh `x`-cycle has to be picked.
pub fn canonical_form(d: &Dessin) -> Dessin {
    let n = d.degree();
    let ct = d.x.cycle_type();
    let layout_perm = canonical_layout(&ct);
    let xcycles: Vec<Vec<u32>> =
        d.x.cycles_with_fixed().into_iter().map(|c| c.into_iter().map(|e| (e - 1) as u32).collect()).collect();
    let mut cycle_of = vec![0; n];
    let mut pos_in_cycle = vec![0; n];
    for (ci, c) in xcycles.iter().enumerate() {
        for (i, &e) in c.iter().enumerate() {
            cycle_of[e as usize] = ci;
            pos_in_cycle[e as usize] = i;
        }
    }
    let mut layout = Vec::new();
    let mut layout_at_label = vec![0; n];
    let mut layout_by_len = vec![Vec::new(); n + 1];
    let mut start = 0u32;
    for &len in ct.parts().iter().rev() {
        let li = layout.len();
        layout.push((start, len));
        layout_by_len[len].push(li);
        for l in start..start + len as u32 {
            layout_at_label[l as usize] = li;
        }
        start += len as u32;
    }
    let mut c = Canonizer {
        y: d.y.raw(),
        cycle_used: vec![false; xcycles.len()],
        xcycles,
        cycle_of,
        pos_in_cycle,
        layout,
        layout_at_label,
        layout_by_len,
        taken: vec![0; n + 1],
        label: vec![NONE; n],
        point: vec![NONE; n],
        cur: vec![0; n],
        best: None,
    };
    c.run(0);
    let y = c.best.unwrap_or_default();
    Dessin::from_trusted(layout_perm, Permutation::from_raw(y))
}

#[derive(Clone, Debug)]
pub struct EnumConfig {
    /// Largest degree accepted.
    pub guard: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { guard: 14 }
    }
}

/// Backtracking state for building `y` cycle by cycle against a fixed `x`,
/// tracking the partial product `w = xy` as a set of paths so that `w`'s
/// cycle type (that of `z`) can be pruned early.
#[derive(Clone)]
struct Enumerator<'a> {
    x: &'a [u32],
    used: Vec<bool>,
    y: Vec<u32>,
    ylens: Vec<(usize, usize)>,
    zmult: Vec<usize>,
    path_end: Vec<u32>,
    path_start: Vec<u32>,
    path_len: Vec<u32>,
    trail: Vec<(u8, u32, u32)>,
    assigned: usize,
    split_at: Option<usize>,
    tasks: Vec<Task<'a>>,
    found: HashSet<Vec<u32>>,
}

#[derive(Clone)]
struct Task<'a> {
    state: Enumerator<'a>,
    start: usize,
    last: usize,
    remaining: usize,
}

const T_END: u8 = 0;
const T_START: u8 = 1;
const T_LEN: u8 = 2;
const T_Z: u8 = 3;

impl<'a> Enumerator<'a> {
    fn new(x: &'a [u32], lambda1: &CycleType, lambda_inf: &CycleType) -> Self {
        let n = x.len();
        let mut zmult = vec![0; n + 1];
        for &p in lambda_inf.parts() {
            zmult[p] += 1;
        }
        Enumerator {
            x,
            used: vec![false; n],
            y: vec![NONE; n],
            ylens: lambda1.multiplicities(),
            zmult,
            path_end: (0..n as u32).collect(),
            path_start: (0..n as u32).collect(),
            path_len: vec![1; n],
            trail: Vec::new(),
            assigned: 0,
            split_at: None,
            tasks: Vec::new(),
            found: HashSet::new(),
        }
    }

    fn set(&mut self, kind: u8, idx: u32, val: u32) {
        let slot = match kind {
            T_END => &mut self.path_end[idx as usize],
            T_START => &mut self.path_start[idx as usize],
            T_LEN => &mut self.path_len[idx as usize],
            _ => unreachable!(),
        };
        self.trail.push((kind, idx, *slot));
        *slot = val;
    }

    fn rollback(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (kind, idx, old) = self.trail.pop().unwrap();
            match kind {
                T_END => self.path_end[idx as usize] = old,
                T_START => self.path_start[idx as usize] = old,
                T_LEN => self.path_len[idx as usize] = old,
                _ => self.zmult[idx as usize] += 1,
            }
        }
    }

    fn max_open(&self) -> usize {
        (1..self.zmult.len()).rev().find(|&k| self.zmult[k] > 0).unwrap_or(0)
    }

    /// Records `w(e) = f`; false if the partial `w` can no longer have the target type.
    fn add_w(&mut self, e: u32, f: u32) -> bool {
        let s = self.path_start[e as usize];
        if f == s {
            let len = self.path_len[s as usize] as usize;
            if self.zmult[len] == 0 {
                return false;
            }
            self.zmult[len] -= 1;
            self.trail.push((T_Z, len as u32, 0));
            true
        } else {
            let t = self.path_end[f as usize];
            let len = self.path_len[s as usize] + self.path_len[f as usize];
            if len as usize > self.max_open() {
                return false;
            }
            self.set(T_END, s, t);
            self.set(T_START, t, s);
            self.set(T_LEN, s, len);
            true
        }
    }

    /// Sets `y(e) = f` and the implied `w(e) = x(f)`.
    fn assign(&mut self, e: usize, f: usize) -> bool {
        self.y[e] = f as u32;
        self.assigned += 1;
        self.add_w(e as u32, self.x[f])
    }

    fn unassign(&mut self, e: usize, mark: usize) {
        self.rollback(mark);
        self.y[e] = NONE;
        self.assigned -= 1;
    }

    fn next_cycle(&mut self) {
        let Some(start) = self.used.iter().position(|u| !u) else {
            self.leaf();
            return;
        };
        for li in 0..self.ylens.len() {
            if self.ylens[li].1 == 0 {
                continue;
            }
            let len = self.ylens[li].0;
            self.ylens[li].1 -= 1;
            self.used[start] = true;
            self.extend(start, start, len - 1);
            self.used[start] = false;
            self.ylens[li].1 += 1;
        }
    }

    fn extend(&mut self, start: usize, last: usize, remaining: usize) {
        if self.split_at == Some(self.assigned) {
            let mut state = self.clone();
            state.trail.clear();
            state.split_at = None;
            state.tasks.clear();
            self.tasks.push(Task { state, start, last, remaining });
            return;
        }
        let mark = self.trail.len();
        if remaining == 0 {
            if self.assign(last, start) {
                self.next_cycle();
            }
            self.unassign(last, mark);
            return;
        }
        for next in start + 1..self.used.len() {
            if self.used[next] {
                continue;
            }
            self.used[next] = true;
            if self.assign(last, next) {
                self.extend(start, next, remaining - 1);
            }
            self.unassign(last, mark);
            self.used[next] = false;
        }
    }

    fn leaf(&mut self) {
        let n = self.x.len();
        let x = Permutation::from_raw(self.x.to_vec());
        let y = Permutation::from_raw(self.y.clone());
        if !is_transitive(&[x.clone(), y.clone()], n) {
            return;
        }
        let canon = canonical_form(&Dessin::from_trusted(x, y));
        self.found.insert(canon.y.raw().to_vec());
    }
}

/// The passport seen after [`Dessin::role_permutations`] entry `k`.
fn permuted_passport(p: &Passport, k: usize) -> Passport {
    let (a, b, c) = (p.lambda0.clone(), p.lambda1.clone(), p.lambda_inf.clone());
    let (l0, l1, li) = match k {
        0 => (a, b, c),
        1 => (b, c, a),
        2 => (c, a, b),
        3 => (b, a, c),
        4 => (c, b, a),
        _ => (a, c, b),
    };
    Passport { lambda0: l0, lambda1: l1, lambda_inf: li }
}

/// Index of the role permutation undoing entry `k`.
const ROLE_INVERSE: [usize; 6] = [0, 2, 1, 3, 4, 5];

/// Every dessin with the given passport, one canonical representative per
/// isomorphism class, sorted.
///
/// Role permutations are bijections on isomorphism classes, so the search
/// runs on whichever arrangement of the passport has the smallest class for
/// `y` (ties: smallest centralizer for `x`) and maps the results back.
pub fn enumerate_dessins(passport: &Passport, config: &EnumConfig) -> Result<Vec<Dessin>, DessinError> {
    passport.genus()?;
    let n = passport.degree();
    if n > config.guard {
        return Err(DessinError::Infeasible { n, guard: config.guard });
    }
    let k = (0..6)
        .min_by_key(|&k| {
            let p = permuted_passport(passport, k);
            (p.lambda1.class_size(), p.lambda0.centralizer_order())
        })
        .unwrap();
    let found = enumerate_fixed_roles(&permuted_passport(passport, k));
    if k == 0 {
        return Ok(found);
    }
    let mut out: Vec<Dessin> = found
        .into_par_iter()
        .map(|d| canonical_form(&d.role_permutations()[ROLE_INVERSE[k]]))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn enumerate_fixed_roles(passport: &Passport) -> Vec<Dessin> {
    let n = passport.degree();
    let x = canonical_layout(passport.lambda0());
    let mut root = Enumerator::new(x.raw(), passport.lambda1(), passport.lambda_inf());
    root.split_at = Some(3.min(n));
    root.next_cycle();
    let tasks = std::mem::take(&mut root.tasks);
    let mut found: HashSet<Vec<u32>> = tasks
        .into_par_iter()
        .map(|mut t| {
            t.state.extend(t.start, t.last, t.remaining);
            t.state.found
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    found.extend(root.found);
    let mut ys: Vec<Vec<u32>> = found.into_iter().collect();
    ys.sort();
    ys.into_iter().map(|y| Dessin::from_trusted(x.clone(), Permutation::from_raw(y))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pp(s: &str) -> Passport {
        s.parse().unwrap()
    }

    fn enumerate(s: &str) -> Vec<Dessin> {
        enumerate_dessins(&pp(s), &EnumConfig::default()).unwrap()
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        fn rec(v: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
            if k == v.len() {
                out.push(Permutation::from_images(v).unwrap());
                return;
            }
            for i in k..v.len() {
                v.swap(k, i);
                rec(v, k + 1, out);
                v.swap(k, i);
            }
        }
        rec(&mut (1..=n).collect(), 0, &mut out);
        out
    }

    fn brute_canonical(d: &Dessin, perms: &[Permutation]) -> Dessin {
        perms
            .iter()
            .map(|g| d.conjugate(g).unwrap())
            .min_by(|a, b| (a.x.to_images(), a.y.to_images()).cmp(&(b.x.to_images(), b.y.to_images())))
            .unwrap()
    }

    #[test]
    fn genus_examples() {
        assert_eq!(pp("[4 1,3 1 1,4 1]").genus().unwrap(), 0);
        assert_eq!(pp("[3^3,3^3,3^3]").genus().unwrap(), 1);
        assert_eq!(pp("[6,3^2,6]").genus().unwrap(), 2);
        assert_eq!(pp("[1,1,1]").genus().unwrap(), 0);
        assert!(pp("[2^2,2^2,4]").genus().is_err());
        assert!(pp("[1^4,1^4,1^4]").genus().is_err());
    }

    #[test]
    fn passport_text() {
        let p = pp("[4 1, 3 1 1, 4 1]");
        assert_eq!(p.to_string(), "[4 1,3 1^2,4 1]");
        assert_eq!(pp(&p.to_string()), p);
        assert_eq!(pp("[6,3^{2},6]").to_string(), "[6,3^2,6]");
        assert!("[6,3^2]".parse::<Passport>().is_err());
        assert!("6,3^2,6".parse::<Passport>().is_err());
        assert!("[6,3^2,5]".parse::<Passport>().is_err());
    }

    #[test]
    fn uniformity() {
        assert!(pp("[2^3,2^3,3^2]").is_uniform());
        assert!(!pp("[4 1,3 1 1,4 1]").is_uniform());
        assert!(pp("[7,1^7,7]").is_uniform());
    }

    #[test]
    fn uniform_passports_of_six() {
        let all = uniform_passports(6);
        let by_genus = |g: usize| -> std::collections::BTreeSet<String> {
            all.iter().filter(|(_, h)| *h == g).map(|(p, _)| p.to_string()).collect()
        };
        let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<std::collections::BTreeSet<_>>();
        assert_eq!(by_genus(0), set(&["[6,1^6,6]", "[2^3,2^3,3^2]"]));
        assert_eq!(by_genus(1), set(&["[3^2,2^3,6]", "[3^2,3^2,3^2]"]));
        assert!(all.windows(2).all(|w| w[0].1 <= w[1].1));
        let higher: Vec<String> = all.iter().filter(|(_, h)| *h >= 2).map(|(p, _)| p.to_string()).collect();
        assert_eq!(higher, vec!["[6,3^2,6]"]);
        assert_eq!(uniform_passports(1).len(), 1);
    }

    #[test]
    fn construction_and_validation() {
        assert_eq!(Dessin::from_cycles(4, "(1 2)", "(3 4)").unwrap_err(), DessinError::NotTransitive);
        let d = Dessin::from_cycles(4, "(1 2 3 4)", "(1 3)(2 4)").unwrap();
        assert_eq!(d.z(), Permutation::parse_cycles("(1 2 3 4)", 4).unwrap());
        assert_eq!(d.passport().to_string(), "[4,2^2,4]");
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"n":4,"x":"(1 2 3 4)","y":"(1 3)(2 4)"}"#);
        let back: Dessin = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Dessin>(r#"{"n":4,"x":"(1 2)","y":"(3 4)"}"#).is_err());
    }

    #[test]
    fn role_permutations_keep_the_triple_relation() {
        let d = Dessin::from_cycles(6, "(1 2 3 4 5 6)", "(1 3 5)").unwrap();
        let types = [d.x.cycle_type(), d.y.cycle_type(), d.z().cycle_type()];
        for r in d.role_permutations() {
            let (a, b, c) = (r.x.clone(), r.y.clone(), r.z());
            assert!((&(&a * &b) * &c).is_identity());
            for t in [a.cycle_type(), b.cycle_type(), c.cycle_type()] {
                assert!(types.contains(&t));
            }
        }
    }

    #[test]
    fn role_inverses_and_passports() {
        let d = Dessin::from_cycles(6, "(1 2 3 4 5 6)", "(1 3 5)").unwrap();
        let p = d.passport();
        for (k, r) in d.role_permutations().iter().enumerate() {
            assert_eq!(r.passport(), permuted_passport(&p, k));
            assert_eq!(r.role_permutations()[ROLE_INVERSE[k]], d);
        }
    }

    #[test]
    fn enumeration_agrees_across_role_arrangements() {
        for s in ["[4 2,3 1^3,3^2]", "[3 1^3,2^3,6]", "[4 1^2,2^3,4 2]", "[5 1,2 1^4,6]"] {
            let p = pp(s);
            let direct: Vec<Dessin> = enumerate_fixed_roles(&p);
            assert_eq!(direct, enumerate_dessins(&p, &EnumConfig::default()).unwrap(), "{s}");
        }
    }

    #[test]
    fn layout_is_lexicographically_least() {
        let ct: CycleType = "3 2 1".parse().unwrap();
        assert_eq!(canonical_layout(&ct).to_cycle_string(), "(2 3)(4 5 6)");
        let perms = all_perms(6);
        let least = perms.iter().filter(|p| p.cycle_type() == ct).min_by_key(|p| p.to_images()).unwrap();
        assert_eq!(*least, canonical_layout(&ct));
    }

    #[test]
    fn canonical_form_matches_brute_force() {
        let perms5 = all_perms(5);
        let perms6 = all_perms(6);
        let cases = [
            (5, "(1 2 3 4 5)", "(1 3)"),
            (5, "(1 2)(3 4)", "(2 3 5)"),
            (5, "(1 5 2)", "(2 3)(4 5)"),
            (6, "(1 2 3)(4 5 6)", "(1 4)(2 5)(3 6)"),
            (6, "(1 2)(3 4)(5 6)", "(2 3)(4 5)(6 1)"),
            (6, "(1 4 2 6)", "(1 3 5)(2 4)"),
            (6, "(1 2 3 4 5 6)", "()"),
            (6, "(1 6)(2 5)", "(1 2 3)(4 6)"),
        ];
        for (n, x, y) in cases {
            let d = Dessin::from_cycles(n, x, y).unwrap();
            let perms = if n == 5 { &perms5 } else { &perms6 };
            assert_eq!(canonical_form(&d), brute_canonical(&d, perms), "{x} {y}");
        }
    }

    #[test]
    fn enumeration_counts() {
        assert!(enumerate("[2^2,2^2,3 1]").is_empty());
        assert!(enumerate("[3^2,3^2,4 2]").is_empty());
        assert_eq!(enumerate("[6,3^2,6]").len(), 4);
        assert_eq!(enumerate("[4^2,2^4,4^2]").len(), 2);
        assert_eq!(enumerate("[1,1,1]").len(), 1);
        assert_eq!(enumerate("[2,2,1^2]").len(), 1);
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let p = pp("[3 2 1,2^3,4 2]");
        let ds = enumerate_dessins(&p, &EnumConfig::default()).unwrap();
        assert!(!ds.is_empty());
        for w in ds.windows(2) {
            assert!(w[0] < w[1]);
        }
        for d in &ds {
            assert_eq!(d.passport(), p);
            assert_eq!(canonical_form(d), *d);
        }
    }

    #[test]
    fn enumeration_matches_brute_force_census() {
        // Every transitive pair of the given types, grouped by brute-force canonical form.
        let perms = all_perms(5);
        for s in ["[5,5,5]", "[3 1^2,2^2 1,5]", "[2^2 1,2^2 1,5]", "[4 1,3 1^2,4 1]"] {
            let p = pp(s);
            let mut classes = std::collections::BTreeSet::new();
            for x in perms.iter().filter(|g| g.cycle_type() == *p.lambda0()) {
                for y in perms.iter().filter(|g| g.cycle_type() == *p.lambda1()) {
                    if let Ok(d) = Dessin::new(x.clone(), y.clone()) {
                        if d.z().cycle_type() == *p.lambda_inf() {
                            classes.insert(brute_canonical(&d, &perms));
                        }
                    }
                }
            }
            let fast: std::collections::BTreeSet<Dessin> =
                enumerate_dessins(&p, &EnumConfig::default()).unwrap().into_iter().collect();
            assert_eq!(fast, classes, "{s}");
        }
    }

    #[test]
    fn guard_and_invalid_passport() {
        let p = pp("[15,15,15]");
        assert_eq!(
            enumerate_dessins(&p, &EnumConfig::default()).unwrap_err(),
            DessinError::Infeasible { n: 15, guard: 14 }
        );
        assert!(matches!(
            enumerate_dessins(&pp("[2^2,2^2,4]"), &EnumConfig::default()),
            Err(DessinError::InvalidPassport(_))
        ));
    }

    fn arb_dessin() -> impl Strategy<Value = (Dessin, Permutation)> {
        (3usize..9, any::<u64>()).prop_filter_map("transitive", |(n, seed)| {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ct = |parts: Vec<usize>| CycleType::from_parts(parts).unwrap();
            let x = Permutation::random_of_cycle_type(&ct(vec![n - 1, 1]), &mut rng);
            let y = Permutation::random_of_cycle_type(&ct(vec![2, 1].into_iter().chain(vec![1; n - 3]).collect()), &mut rng);
            let g = Permutation::random_of_cycle_type(&ct(vec![1; n]), &mut rng);
            let g = &g * &Permutation::random_of_cycle_type(&ct(vec![n]), &mut rng);
            Dessin::new(x, y).ok().map(|d| (d, g))
        })
    }

    proptest! {
        #[test]
        fn canonical_form_is_a_class_invariant((d, g) in arb_dessin()) {
            let c = canonical_form(&d);
            prop_assert_eq!(canonical_form(&c), c.clone());
            prop_assert_eq!(canonical_form(&d.conjugate(&g).unwrap()), c.clone());
            prop_assert_eq!(c.passport(), d.passport());
        }
    }
}
