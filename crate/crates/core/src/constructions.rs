//! Explicit dessin families: stars and polygons in genus 0, regular trees
//! `[a^p, b^q, n]` built from powers of `σ_n`, and the `[n, n, n]` witness
//! with alternating monodromy.

use num_integer::Integer;
use thiserror::Error;

use crate::dessin::{enumerate_dessins, Dessin, DessinError, EnumConfig, Passport};
use crate::group::is_regular;
use crate::perm::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("invalid degree {n}: {reason}")]
    InvalidDegree { n: usize, reason: &'static str },
    #[error("invalid tree parameters: p*a = {pa} but q*b = {qb}")]
    InvalidTree { pa: usize, qb: usize },
}

/// Parameters of the tree passport `[a^p, b^q, n]`, `n = pa = qb`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeSpec {
    pub a: usize,
    pub p: usize,
    pub b: usize,
    pub q: usize,
}

impl TreeSpec {
    pub fn new(a: usize, p: usize, b: usize, q: usize) -> Result<Self, ConstructionError> {
        if a * p != b * q || a * p == 0 {
            return Err(ConstructionError::InvalidTree { pa: a * p, qb: b * q });
        }
        Ok(TreeSpec { a, p, b, q })
    }

    pub fn degree(&self) -> usize {
        self.a * self.p
    }

    pub fn passport(&self) -> Passport {
        Passport::uniform(self.a, self.b, self.degree(), self.degree()).expect("a, b divide n")
    }
}

/// Exponents `(l, m)` with `gcd(a, l) = gcd(b, m) = 1` and `lp + mq ≡ 1 (mod n)`,
/// smallest `l` first. Exists exactly when `gcd(p, q) = 1`.
pub fn tree_exponents(spec: &TreeSpec) -> Option<(usize, usize)> {
    let TreeSpec { a, p, b, q } = *spec;
    let n = spec.degree();
    if p.gcd(&q) != 1 {
        return None;
    }
    (0..a)
        .filter(|l| a.gcd(l) == 1)
        .flat_map(|l| (0..b).filter(|m| b.gcd(m) == 1).map(move |m| (l, m)))
        .find(|&(l, m)| (l * p + m * q) % n == 1 % n)
}

/// The regular dessin `x = σ_n^{lp}`, `y = σ_n^{mq}` with `xy = σ_n`, or
/// `None` when `gcd(p, q) > 1` (or the passport has no integral genus).
pub fn regular_tree_dessin(spec: &TreeSpec) -> Option<Dessin> {
    let (l, m) = tree_exponents(spec)?;
    let sigma = Permutation::standard_cycle(spec.degree());
    let x = sigma.power((l * spec.p) as i64);
    let y = sigma.power((m * spec.q) as i64);
    Some(Dessin::new(x, y).expect("xy is the n-cycle, so the group is transitive"))
}

/// For odd `n >= 5`: `x = σ_n`, `y = (2 4 … n-1 n n-2 … 3 1)`, passport `[n, n, n]`.
pub fn alternating_witness(n: usize) -> Result<Dessin, ConstructionError> {
    if n < 5 || n % 2 == 0 {
        return Err(ConstructionError::InvalidDegree { n, reason: "needs odd n >= 5" });
    }
    let mut cycle: Vec<usize> = (2..n).step_by(2).collect();
    cycle.push(n);
    cycle.extend((1..n - 1).rev().step_by(2));
    let y = Permutation::from_cycles(n, &[cycle]).expect("a single n-cycle");
    Ok(Dessin::new(Permutation::standard_cycle(n), y).expect("x is an n-cycle"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Genus0Kind {
    /// `[n, 1^n, n]`.
    Star,
    /// `[2^m, 2^m, m^2]`, `n = 2m`.
    Polygon,
}

pub fn genus0_dessin(kind: Genus0Kind, n: usize) -> Result<Dessin, ConstructionError> {
    match kind {
        Genus0Kind::Star => {
            if n == 0 {
                return Err(ConstructionError::InvalidDegree { n, reason: "needs n >= 1" });
            }
            Ok(Dessin::new(Permutation::standard_cycle(n), Permutation::identity(n)).expect("transitive"))
        }
        Genus0Kind::Polygon => {
            if n < 2 || n % 2 == 1 {
                return Err(ConstructionError::InvalidDegree { n, reason: "needs even n >= 2" });
            }
            let x: Vec<Vec<usize>> = (1..=n).step_by(2).map(|i| vec![i, i + 1]).collect();
            let y: Vec<Vec<usize>> = (2..=n).step_by(2).map(|i| vec![i, i % n + 1]).collect();
            let x = Permutation::from_cycles(n, &x).expect("disjoint pairs");
            let y = Permutation::from_cycles(n, &y).expect("disjoint pairs");
            Ok(Dessin::new(x, y).expect("the polygon is connected"))
        }
    }
}

/// Whether the passport admits a regular dessin, by exhaustive enumeration.
pub fn regular_exists(passport: &Passport, config: &EnumConfig) -> Result<bool, DessinError> {
    Ok(enumerate_dessins(passport, config)?.iter().any(is_regular))
}
