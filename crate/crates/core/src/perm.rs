//! Permutations of `{1..n}` acting on the left.
//!
//! Products compose right to left: `(p * q)(e) == p(q(e))`. Every module in
//! this crate goes through [`Permutation::compose`] (or the `Mul` impl, which
//! is the same operation), so there is exactly one convention in play.
//!
//! Points are 1-based in every public signature and in the textual cycle
//! notation. Storage is 0-based and stays private to the crate.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("point {point} is out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {0} appears more than once")]
    RepeatedPoint(usize),
    #[error("malformed cycle notation: {0}")]
    Malformed(String),
    #[error("not a bijection")]
    NotBijective,
    #[error("invalid cycle type: {0}")]
    InvalidCycleType(String),
}

/// A bijection of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// The standard n-cycle `(1 2 ... n)`.
    pub fn standard_cycle(degree: usize) -> Self {
        let n = degree as u32;
        Permutation { images: (0..n).map(|i| (i + 1) % n.max(1)).collect() }
    }

    /// Builds a permutation from its 1-based image list: `images[i - 1]` is the image of `i`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut raw = Vec::with_capacity(n);
        for &v in images {
            if v == 0 || v > n {
                return Err(PermError::PointOutOfRange { point: v, degree: n });
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(PermError::RepeatedPoint(v));
            }
            raw.push((v - 1) as u32);
        }
        Ok(Permutation { images: raw })
    }

    /// Builds a permutation of the given degree from disjoint cycles of 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        for cycle in cycles {
            for &pt in cycle {
                if pt == 0 || pt > degree {
                    return Err(PermError::PointOutOfRange { point: pt, degree });
                }
                if std::mem::replace(&mut seen[pt - 1], true) {
                    return Err(PermError::RepeatedPoint(pt));
                }
            }
            for (i, &pt) in cycle.iter().enumerate() {
                images[pt - 1] = (cycle[(i + 1) % cycle.len()] - 1) as u32;
            }
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_raw(images: Vec<u32>) -> Self {
        debug_assert!(is_bijection(&images));
        Permutation { images }
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.images
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `e`.
    ///
    /// Panics if `e` is not in `1..=degree`.
    pub fn apply(&self, e: usize) -> usize {
        assert!(e >= 1 && e <= self.degree(), "point {e} out of range");
        self.images[e - 1] as usize + 1
    }

    /// 1-based image list.
    pub fn to_images(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation { images: other.images.iter().map(|&e| self.images[e as usize]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `self^k` for any integer `k`; the exponent is reduced modulo each cycle length.
    pub fn power(&self, k: i64) -> Permutation {
        let n = self.degree();
        let mut out = vec![0u32; n];
        let mut done = vec![false; n];
        let mut cycle = Vec::new();
        for start in 0..n {
            if done[start] {
                continue;
            }
            cycle.clear();
            let mut e = start;
            while !done[e] {
                done[e] = true;
                cycle.push(e);
                e = self.images[e] as usize;
            }
            let len = cycle.len() as i64;
            let shift = k.rem_euclid(len) as usize;
            for (i, &pt) in cycle.iter().enumerate() {
                out[pt] = cycle[(i + shift) % cycle.len()] as u32;
            }
        }
        Permutation { images: out }
    }

    /// `g * self * g^-1`.
    pub fn conjugate(&self, g: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != g.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), g.degree()));
        }
        let mut out = vec![0u32; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            out[g.images[i] as usize] = g.images[v as usize];
        }
        Ok(Permutation { images: out })
    }

    /// Whether `self * other == other * self`.
    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree()
            && (0..self.degree()).all(|i| {
                self.images[other.images[i] as usize] == other.images[self.images[i] as usize]
            })
    }

    /// Disjoint cycles including fixed points, each starting at its smallest
    /// point, ordered by that smallest point.
    pub fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut done = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if done[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut e = start;
            while !done[e] {
                done[e] = true;
                cycle.push(e + 1);
                e = self.images[e] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Non-trivial cycles in canonical order.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed().into_iter().filter(|c| c.len() > 1).collect()
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_parts(self.cycles_with_fixed().iter().map(Vec::len).collect())
            .expect("cycle lengths are positive")
    }

    /// Order as an element: lcm of the cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycle_type()
            .parts()
            .iter()
            .fold(BigUint::from(1u32), |acc, &l| acc.lcm(&BigUint::from(l)))
    }

    /// Fixed points, 1-based.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.images[i] as usize == i).map(|i| i + 1).collect()
    }

    /// Parses disjoint-cycle notation such as `"(1 4)(2 5)(3 7)(6 8)"`.
    /// Fixed points may be omitted; `"()"` is the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, PermError> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(PermError::Malformed("empty input".into()));
        }
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(PermError::Malformed(format!("expected '(' at {rest:?}")));
            };
            let close = body
                .find(')')
                .ok_or_else(|| PermError::Malformed("unclosed parenthesis".into()))?;
            let inner = &body[..close];
            if inner.contains('(') {
                return Err(PermError::Malformed("nested parenthesis".into()));
            }
            let mut cycle = Vec::new();
            for tok in inner.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                let pt: usize =
                    tok.parse().map_err(|_| PermError::Malformed(format!("bad point {tok:?}")))?;
                cycle.push(pt);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }

    /// Canonical cycle notation; the identity prints as `"()"`.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for c in cycles {
            s.push('(');
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                s.push_str(&p.to_string());
            }
            s.push(')');
        }
        s
    }

    /// A uniformly random permutation with the given cycle type.
    pub fn random_of_cycle_type<R: Rng + ?Sized>(ct: &CycleType, rng: &mut R) -> Permutation {
        let n = ct.degree();
        let mut arrangement: Vec<u32> = (0..n as u32).collect();
        arrangement.shuffle(rng);
        let mut images = vec![0u32; n];
        let mut offset = 0;
        for &len in ct.parts() {
            let cycle = &arrangement[offset..offset + len];
            for i in 0..len {
                images[cycle[i] as usize] = cycle[(i + 1) % len];
            }
            offset += len;
        }
        Permutation { images }
    }

    /// Same as [`Permutation::random_of_cycle_type`] with a ChaCha8 stream seeded from `seed`.
    pub fn random_of_cycle_type_seeded(ct: &CycleType, seed: u64) -> Permutation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_of_cycle_type(ct, &mut rng)
    }
}

pub(crate) fn is_bijection(images: &[u32]) -> bool {
    let mut seen = vec![false; images.len()];
    images.iter().all(|&v| (v as usize) < seen.len() && !std::mem::replace(&mut seen[v as usize], true))
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// Panics on degree mismatch; use [`Permutation::compose`] for a fallible product.
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs).expect("degree mismatch in permutation product")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self.to_cycle_string())
    }
}

/// A partition of `n`, kept sorted in descending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn from_parts(mut parts: Vec<usize>) -> Result<Self, PermError> {
        if parts.is_empty() {
            return Err(PermError::InvalidCycleType("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(PermError::InvalidCycleType("zero part".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    /// `(b^q)`: `q` parts each equal to `b`.
    pub fn uniform(b: usize, q: usize) -> Self {
        assert!(b > 0 && q > 0, "uniform cycle type needs positive b and q");
        CycleType { parts: vec![b; q] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, `l(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] == w[1])
    }

    /// `(part, multiplicity)` pairs, parts descending.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// `z_λ = ∏ m_i! i^{m_i}`, the order of the centralizer of an element of this type.
    pub fn centralizer_order(&self) -> BigUint {
        let mut z = BigUint::from(1u32);
        for (part, mult) in self.multiplicities() {
            z *= factorial(mult) * BigUint::from(part).pow(mult as u32);
        }
        z
    }

    /// Number of permutations of this cycle type, `n! / z_λ`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.degree()) / self.centralizer_order()
    }

    /// Every partition of `n >= 1`, in reverse lexicographic order (`(n)` first).
    pub fn all_of_degree(n: usize) -> Vec<CycleType> {
        fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
            if left == 0 {
                out.push(CycleType { parts: cur.clone() });
                return;
            }
            for p in (1..=max.min(left)).rev() {
                cur.push(p);
                rec(left - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, n, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for CycleType {
    /// Exponent notation, parts separated by spaces: `3^2`, `4 1`, `3 1^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (part, mult)) in self.multiplicities().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if mult == 1 {
                write!(f, "{part}")?;
            } else {
                write!(f, "{part}^{mult}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for CycleType {
    type Err = PermError;

    /// Accepts whitespace-separated tokens, each `k` or `k^e` (braces allowed: `k^{e}`).
    fn from_str(s: &str) -> Result<Self, PermError> {
        let mut parts = Vec::new();
        for tok in s.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.trim_start_matches('{').trim_end_matches('}')),
                None => (tok, "1"),
            };
            let base: usize =
                base.parse().map_err(|_| PermError::InvalidCycleType(format!("bad part {tok:?}")))?;
            let exp: usize =
                exp.parse().map_err(|_| PermError::InvalidCycleType(format!("bad exponent {tok:?}")))?;
            if exp == 0 {
                return Err(PermError::InvalidCycleType(format!("zero exponent in {tok:?}")));
            }
            parts.extend(std::iter::repeat_n(base, exp));
        }
        CycleType::from_parts(parts)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// Calls `f` on every permutation of the given cycle type, exactly once each.
///
/// The cycle through the smallest unused point is built first, so each
/// permutation has a unique construction path.
pub fn for_each_of_cycle_type<F: FnMut(&Permutation)>(ct: &CycleType, mut f: F) {
    let n = ct.degree();
    let mut lengths: Vec<(usize, usize)> = ct.multiplicities();
    let mut images = vec![u32::MAX; n];
    let mut used = vec![false; n];
    let mut scratch = Permutation { images: vec![0; n] };
    rec_cycle_type(&mut lengths, &mut images, &mut used, &mut scratch, &mut f);
}

fn rec_cycle_type<F: FnMut(&Permutation)>(
    lengths: &mut [(usize, usize)],
    images: &mut [u32],
    used: &mut [bool],
    scratch: &mut Permutation,
    f: &mut F,
) {
    let Some(start) = used.iter().position(|u| !u) else {
        scratch.images.copy_from_slice(images);
        f(scratch);
        return;
    };
    for li in 0..lengths.len() {
        if lengths[li].1 == 0 {
            continue;
        }
        let len = lengths[li].0;
        lengths[li].1 -= 1;
        used[start] = true;
        extend_cycle(start, start, len - 1, lengths, images, used, scratch, f);
        used[start] = false;
        lengths[li].1 += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_cycle<F: FnMut(&Permutation)>(
    start: usize,
    last: usize,
    remaining: usize,
    lengths: &mut [(usize, usize)],
    images: &mut [u32],
    used: &mut [bool],
    scratch: &mut Permutation,
    f: &mut F,
) {
    if remaining == 0 {
        images[last] = start as u32;
        rec_cycle_type(lengths, images, used, scratch, f);
        images[last] = u32::MAX;
        return;
    }
    for next in start + 1..used.len() {
        if used[next] {
            continue;
        }
        used[next] = true;
        images[last] = next as u32;
        extend_cycle(start, next, remaining - 1, lengths, images, used, scratch, f);
        images[last] = u32::MAX;
        used[next] = false;
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_cycle_string())
    }
}

/// Cycle text carries no degree; deserialize through a wrapper that knows `n`
/// (see [`crate::dessin::DessinJson`]). This impl infers the degree from the
/// largest point mentioned.
impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let degree = text
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Permutation::parse_cycles(&text, degree).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn compose_uses_left_action() {
        assert_eq!(&p("(1 2 3)", 3) * &p("(1 2)", 3), p("(1 3)", 3));
        assert_eq!(&p("(1 2 3 4)", 4) * &p("(1 3)(2 4)", 4), p("(1 4 3 2)", 4));
        let q = p("(1 5 2)(3 4)", 5);
        assert_eq!(&Permutation::identity(5) * &q, q);
    }

    #[test]
    fn compose_rejects_degree_mismatch() {
        let err = Permutation::identity(3).compose(&Permutation::identity(4)).unwrap_err();
        assert_eq!(err, PermError::DegreeMismatch(3, 4));
    }

    #[test]
    fn inverse_power_conjugate() {
        assert_eq!(p("(1 2 3)", 3).inverse(), p("(1 3 2)", 3));
        let s6 = Permutation::standard_cycle(6);
        assert_eq!(s6.power(7), s6);
        assert_eq!(s6.power(-1), s6.inverse());
        assert_eq!(s6.power(0), Permutation::identity(6));
        assert_eq!(p("(1 2)(3 4)", 4).conjugate(&p("(2 3)", 4)).unwrap(), p("(1 3)(2 4)", 4));
    }

    #[test]
    fn cycle_types() {
        assert_eq!(p("(1 2 3 4)(5 6)", 6).cycle_type().parts(), &[4, 2]);
        assert_eq!(Permutation::identity(5).cycle_type().parts(), &[1, 1, 1, 1, 1]);
        assert_eq!(Permutation::standard_cycle(6).power(2).cycle_type().parts(), &[3, 3]);
        assert_eq!(Permutation::standard_cycle(6).power(2), p("(1 3 5)(2 4 6)", 6));
    }

    #[test]
    fn parse_and_print() {
        let y = p("(1 4)(2 5)(3 7)(6 8)", 8);
        assert_eq!(y.to_images(), vec![4, 5, 7, 1, 2, 8, 3, 6]);
        assert_eq!(y.to_string(), "(1 4)(2 5)(3 7)(6 8)");
        assert!(p("()", 4).is_identity());
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert_eq!(p("(2 1)(4 3)", 4).to_string(), "(1 2)(3 4)");
        assert_eq!(p("(3 1 2)", 3).to_string(), "(1 2 3)");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Permutation::parse_cycles("(1 2)(2 3)", 3), Err(PermError::RepeatedPoint(2)));
        assert!(matches!(
            Permutation::parse_cycles("(1 5)", 4),
            Err(PermError::PointOutOfRange { point: 5, degree: 4 })
        ));
        assert!(matches!(Permutation::parse_cycles("(1 2", 4), Err(PermError::Malformed(_))));
        assert!(matches!(Permutation::parse_cycles("1 2)", 4), Err(PermError::Malformed(_))));
        assert!(matches!(Permutation::parse_cycles("((1 2))", 4), Err(PermError::Malformed(_))));
        assert!(matches!(Permutation::parse_cycles("(1 a)", 4), Err(PermError::Malformed(_))));
    }

    #[test]
    fn cycle_type_notation() {
        let ct: CycleType = "3^2".parse().unwrap();
        assert_eq!(ct.parts(), &[3, 3]);
        let ct: CycleType = "1 3 1".parse().unwrap();
        assert_eq!(ct.parts(), &[3, 1, 1]);
        assert_eq!(ct.to_string(), "3 1^2");
        assert_eq!("2^{4}".parse::<CycleType>().unwrap(), CycleType::uniform(2, 4));
        assert!("0".parse::<CycleType>().is_err());
        assert!("".parse::<CycleType>().is_err());
    }

    #[test]
    fn class_sizes() {
        assert_eq!(CycleType::uniform(2, 2).class_size(), BigUint::from(3u32));
        assert_eq!(CycleType::uniform(2, 4).class_size(), BigUint::from(105u32));
        assert_eq!(CycleType::uniform(1, 7).class_size(), BigUint::from(1u32));
        assert_eq!(CycleType::uniform(4, 1).class_size(), BigUint::from(6u32));
    }

    #[test]
    fn cycle_type_enumeration_matches_class_size() {
        for parts in [vec![2, 2], vec![4], vec![3, 3], vec![3, 2, 1], vec![2, 2, 1, 1], vec![1, 1, 1]] {
            let ct = CycleType::from_parts(parts).unwrap();
            let mut seen = std::collections::HashSet::new();
            for_each_of_cycle_type(&ct, |q| {
                assert_eq!(q.cycle_type(), ct);
                assert!(seen.insert(q.clone()));
            });
            assert_eq!(BigUint::from(seen.len()), ct.class_size());
        }
    }

    #[test]
    fn random_sampling_support_and_determinism() {
        let id = Permutation::random_of_cycle_type_seeded(&CycleType::uniform(1, 3), 9);
        assert!(id.is_identity());

        let ct = CycleType::uniform(2, 2);
        let mut support = std::collections::BTreeSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            support.insert(Permutation::random_of_cycle_type(&ct, &mut rng));
        }
        let mut census = std::collections::BTreeSet::new();
        for_each_of_cycle_type(&ct, |q| {
            census.insert(q.clone());
        });
        assert_eq!(support, census);
        assert_eq!(support.len(), 3);

        assert_eq!(
            Permutation::random_of_cycle_type_seeded(&CycleType::uniform(3, 4), 42),
            Permutation::random_of_cycle_type_seeded(&CycleType::uniform(3, 4), 42)
        );
    }

    #[test]
    fn random_four_cycles_are_uniform() {
        // Chi-square against the exact count (n-1)! = 6, 5 degrees of freedom.
        let ct = CycleType::uniform(4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = std::collections::BTreeMap::new();
        let draws = 10_000;
        for _ in 0..draws {
            *counts.entry(Permutation::random_of_cycle_type(&ct, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let sigma = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        let mut chi2 = 0.0;
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() < 3.0 * sigma, "count {c} too far from {expected}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 99.9% quantile of chi-square with 5 dof.
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    fn arb_perm(max_n: usize) -> impl Strategy<Value = Permutation> {
        (1..=max_n).prop_flat_map(|n| {
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| {
                Permutation::from_images(&v.iter().map(|i| i + 1).collect::<Vec<_>>()).unwrap()
            })
        })
    }

    fn arb_pair(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
        (1..=max_n).prop_flat_map(|n| {
            let one = || {
                Just((1..=n).collect::<Vec<usize>>())
                    .prop_shuffle()
                    .prop_map(|v| Permutation::from_images(&v).unwrap())
            };
            (one(), one(), one())
        })
    }

    proptest! {
        #[test]
        fn group_axioms((a, b, c) in arb_pair(12)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!((&a * &b).inverse(), &b.inverse() * &a.inverse());
            prop_assert!((&a * &a.inverse()).is_identity());
        }

        #[test]
        fn conjugation_preserves_cycle_type((a, g, _) in arb_pair(12)) {
            prop_assert_eq!(a.conjugate(&g).unwrap().cycle_type(), a.cycle_type());
            prop_assert_eq!(a.conjugate(&g).unwrap(), &(&g * &a) * &g.inverse());
        }

        #[test]
        fn print_parse_round_trip(a in arb_perm(20)) {
            let text = a.to_string();
            prop_assert_eq!(Permutation::parse_cycles(&text, a.degree()).unwrap(), a);
        }

        #[test]
        fn power_by_order_is_identity(a in arb_perm(20)) {
            let order = a.cycle_type().parts().iter().fold(1usize, |acc, &l| acc.lcm(&l));
            prop_assert!(a.power(order as i64).is_identity());
            prop_assert_eq!(BigUint::from(order), a.order());
        }
    }
}
