//! Exact census counts for permutations of type `(b^q)` in `S_n`, `n = bq`:
//! `T` (all of them), `N` (those with `σ_n·y` an `n`-cycle) and `I_m` (those
//! preserving the residue classes mod `m`), plus the connection coefficients
//! behind `N` and brute-force oracles for each.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::group::preserves_residue_classes;
use crate::perm::{factorial, for_each_of_cycle_type, CycleType, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("partitions of different sizes: {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("b and q must be positive")]
    BadParameters,
    #[error("m = {m} must divide n = {n} with 2 <= m < n")]
    BadModulus { m: usize, n: usize },
    #[error("n = {n} exceeds the brute-force guard {guard}")]
    Infeasible { n: usize, guard: usize },
    #[error("q(b-1) = {0} is odd, so N(b, q) = 0 and the bound does not apply")]
    OffParity(usize),
    #[error("formula produced the non-integer {0}")]
    NonIntegral(String),
}

/// Default largest `n` for the brute-force oracles.
pub const ORACLE_GUARD: usize = 12;

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

fn check_bq(b: usize, q: usize) -> Result<usize, CountError> {
    if b == 0 || q == 0 {
        return Err(CountError::BadParameters);
    }
    Ok(b * q)
}

/// `T(b, q) = n! / (b^q q!)`.
pub fn t_count(b: usize, q: usize) -> BigUint {
    CycleType::uniform(b, q).class_size()
}

/// `P_b(t) = Σ_j C(b, 2j+1) t^j`, coefficients by ascending degree.
fn odd_binomial_poly(b: usize) -> Vec<BigUint> {
    (0..b.div_ceil(2)).map(|j| binomial(big(b), big(2 * j + 1))).collect()
}

fn poly_mul(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `∏_k P_{λ_k}(t)`: entry `g` is the sum over compositions
/// `(i_1, …, i_l)` of `g` of `∏_k C(λ_k, 2i_k + 1)`.
fn composition_sums(lambda: &CycleType) -> Vec<BigUint> {
    lambda.parts().iter().fold(vec![BigUint::one()], |acc, &p| poly_mul(&acc, &odd_binomial_poly(p)))
}

fn coeff(v: &[BigUint], i: usize) -> BigUint {
    v.get(i).cloned().unwrap_or_default()
}

/// The genus attached to a pair of types: `(n + 1 - l(λ) - l(μ)) / 2`, if a
/// non-negative integer.
fn connection_genus(lambda: &CycleType, mu: &CycleType) -> Option<usize> {
    let twice = (lambda.degree() + 1) as i64 - lambda.len() as i64 - mu.len() as i64;
    (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as usize)
}

fn connection_from_sums(
    lambda: &CycleType,
    mu: &CycleType,
    g: usize,
    a_lambda: impl Fn(usize) -> BigUint,
    a_mu: impl Fn(usize) -> BigUint,
) -> Result<BigUint, CountError> {
    let (l, m, n) = (lambda.len(), mu.len(), lambda.degree());
    let mut sum = BigUint::zero();
    for g1 in 0..=g {
        let g2 = g - g1;
        let (al, am) = (a_lambda(g1), a_mu(g2));
        if al.is_zero() || am.is_zero() {
            continue;
        }
        sum += factorial(l + 2 * g1 - 1) * factorial(m + 2 * g2 - 1) * al * am;
    }
    let num = big(n) * sum;
    let den = lambda.centralizer_order() * mu.centralizer_order() * (BigUint::one() << (2 * g));
    let (quo, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(CountError::NonIntegral(format!("{num}/{den}")));
    }
    Ok(quo)
}

/// Number of pairs `(σ, ρ)` with `σ` of type `λ`, `ρ` of type `μ` and
/// `σρ` equal to a fixed `n`-cycle:
///
/// `c = n / (z_λ z_μ 2^{2g}) Σ_{g1+g2=g} (l+2g1-1)! (m+2g2-1)! A_λ(g1) A_μ(g2)`
///
/// with `A_λ(g1) = Σ_{i_1+…+i_l = g1} ∏ C(λ_k, 2i_k+1)`. Zero when `g` is not
/// a non-negative integer.
pub fn goupil_connection(lambda: &CycleType, mu: &CycleType) -> Result<BigUint, CountError> {
    if lambda.degree() != mu.degree() {
        return Err(CountError::SizeMismatch(lambda.degree(), mu.degree()));
    }
    let Some(g) = connection_genus(lambda, mu) else {
        return Ok(BigUint::zero());
    };
    let (sl, sm) = (composition_sums(lambda), composition_sums(mu));
    connection_from_sums(lambda, mu, g, |i| coeff(&sl, i), |i| coeff(&sm, i))
}

/// Calls `f` on each composition of `total` into `parts.len()` non-negative
/// pieces with `2 i_k + 1 <= parts[k]`.
fn for_each_composition(parts: &[usize], total: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(parts: &[usize], k: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == parts.len() {
            if left == 0 {
                f(cur);
            }
            return;
        }
        let cap = ((parts[k] - 1) / 2).min(left);
        for i in 0..=cap {
            cur.push(i);
            rec(parts, k + 1, left - i, cur, f);
            cur.pop();
        }
    }
    rec(parts, 0, total, &mut Vec::new(), f);
}

fn composition_sum_direct(lambda: &CycleType, g: usize) -> BigUint {
    let mut s = BigUint::zero();
    for_each_composition(lambda.parts(), g, &mut |c| {
        s += lambda
            .parts()
            .iter()
            .zip(c)
            .fold(BigUint::one(), |acc, (&p, &i)| acc * binomial(big(p), big(2 * i + 1)));
    });
    s
}

/// [`goupil_connection`] with the composition sums enumerated one composition
/// at a time instead of read off a polynomial product.
pub fn goupil_connection_by_compositions(lambda: &CycleType, mu: &CycleType) -> Result<BigUint, CountError> {
    if lambda.degree() != mu.degree() {
        return Err(CountError::SizeMismatch(lambda.degree(), mu.degree()));
    }
    let Some(g) = connection_genus(lambda, mu) else {
        return Ok(BigUint::zero());
    };
    connection_from_sums(lambda, mu, g, |i| composition_sum_direct(lambda, i), |i| composition_sum_direct(mu, i))
}

/// Counts `σ` of type `λ` with `σ⁻¹ σ_n` of type `μ` by listing the class of `λ`.
pub fn connection_bruteforce(lambda: &CycleType, mu: &CycleType, guard: usize) -> Result<BigUint, CountError> {
    let n = lambda.degree();
    if mu.degree() != n {
        return Err(CountError::SizeMismatch(n, mu.degree()));
    }
    if n > guard {
        return Err(CountError::Infeasible { n, guard });
    }
    let pi = Permutation::standard_cycle(n);
    let mut count = 0u64;
    for_each_of_cycle_type(lambda, |s| {
        if (&s.inverse() * &pi).cycle_type() == *mu {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// `N(b, q)`: type-`(b^q)` permutations `y` with `σ_n·y` an `n`-cycle.
pub fn n_count(b: usize, q: usize) -> Result<BigUint, CountError> {
    let n = check_bq(b, q)?;
    goupil_connection(&CycleType::uniform(n, 1), &CycleType::uniform(b, q))
}

pub fn n_count_bruteforce(b: usize, q: usize, guard: usize) -> Result<BigUint, CountError> {
    let n = check_bq(b, q)?;
    if n > guard {
        return Err(CountError::Infeasible { n, guard });
    }
    let x = Permutation::standard_cycle(n);
    let mut count = 0u64;
    for_each_of_cycle_type(&CycleType::uniform(b, q), |y| {
        let xy = &x * y;
        if xy.cycles_with_fixed().len() == 1 {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// A way for a type-`(b^q)` permutation to move `m` residue blocks: `t_i`
/// cycles each passing through `d_i` blocks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BlockPartition {
    /// `(d_i, t_i)` with `d_i` ascending and distinct, `t_i >= 1`.
    pub parts: Vec<(usize, usize)>,
}

fn check_modulus(b: usize, q: usize, m: usize) -> Result<usize, CountError> {
    let n = check_bq(b, q)?;
    if m < 2 || m >= n || n % m != 0 {
        return Err(CountError::BadModulus { m, n });
    }
    Ok(n)
}

/// All `{(d_i, t_i)}` with `Σ d_i t_i = m`, `d_i | b` and `m | d_i q`, ordered
/// by number of distinct `d_i`, then lexicographically.
pub fn block_partitions(b: usize, q: usize, m: usize) -> Vec<BlockPartition> {
    let allowed: Vec<usize> = (1..=m.min(b)).filter(|&d| b % d == 0 && (d * q) % m == 0).collect();
    let mut out = Vec::new();
    fn rec(allowed: &[usize], k: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<BlockPartition>) {
        if left == 0 {
            out.push(BlockPartition { parts: cur.clone() });
            return;
        }
        if k == allowed.len() {
            return;
        }
        let d = allowed[k];
        rec(allowed, k + 1, left, cur, out);
        for t in 1..=left / d {
            cur.push((d, t));
            rec(allowed, k + 1, left - d * t, cur, out);
            cur.pop();
        }
    }
    rec(&allowed, 0, m, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (a.parts.len(), &a.parts).cmp(&(b.parts.len(), &b.parts)));
    out
}

fn rat(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `I_m(b, q) = m!/b^q · ((n/m)!)^m · Σ ∏_i 1/(d_i^{t_i} t_i!) · (d_i^{d_i q/m} / (d_i q/m)!)^{t_i}`,
/// summed over [`block_partitions`].
pub fn i_m_count(b: usize, q: usize, m: usize) -> Result<BigUint, CountError> {
    let n = check_modulus(b, q, m)?;
    let mut sum = BigRational::zero();
    for bp in block_partitions(b, q, m) {
        let mut term = BigRational::one();
        for &(d, t) in &bp.parts {
            let e = d * q / m;
            let inner = BigRational::new(BigInt::from(big(d).pow(e as u32)), BigInt::from(factorial(e)));
            term *= num_traits::pow(inner, t);
            term /= rat(big(d).pow(t as u32) * factorial(t));
        }
        sum += term;
    }
    let prefactor = BigRational::new(
        BigInt::from(factorial(m) * factorial(n / m).pow(m as u32)),
        BigInt::from(big(b).pow(q as u32)),
    );
    let value = prefactor * sum;
    if !value.is_integer() {
        return Err(CountError::NonIntegral(value.to_string()));
    }
    Ok(value.to_integer().to_biguint().expect("non-negative"))
}

pub fn i_m_bruteforce(b: usize, q: usize, m: usize, guard: usize) -> Result<BigUint, CountError> {
    let n = check_modulus(b, q, m)?;
    if n > guard {
        return Err(CountError::Infeasible { n, guard });
    }
    let mut count = 0u64;
    for_each_of_cycle_type(&CycleType::uniform(b, q), |y| {
        if preserves_residue_classes(y, m) {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// Comparison of `N/T` against `2/(n+2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub ratio: BigRational,
    pub bound: BigRational,
    pub holds: bool,
    pub tight: bool,
}

/// `N/T >= 2/(n+2)`, meaningful when `q(b-1)` is even; otherwise `N = 0`.
pub fn bound_check(b: usize, q: usize) -> Result<BoundCheck, CountError> {
    let n = check_bq(b, q)?;
    if (q * (b - 1)) % 2 != 0 {
        return Err(CountError::OffParity(q * (b - 1)));
    }
    let ratio = BigRational::new(BigInt::from(n_count(b, q)?), BigInt::from(t_count(b, q)));
    let bound = BigRational::new(BigInt::from(2), BigInt::from(n + 2));
    Ok(BoundCheck { holds: ratio >= bound, tight: ratio == bound, ratio, bound })
}

/// `P_b(1)^q = 2^{q(b-1)}`, checked on the expanded product `∏ P_b`.
pub fn odd_binomial_sum_check(b: usize, q: usize) -> bool {
    let total: BigUint = composition_sums(&CycleType::uniform(b, q)).iter().sum();
    total == BigUint::one() << (q * (b - 1))
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_ratio<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_map<S: Serializer>(v: &BTreeMap<usize, BigUint>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(v.len()))?;
    for (k, x) in v {
        map.serialize_entry(&k.to_string(), &x.to_string())?;
    }
    map.end()
}

/// All counts for one `(b, q)`. Integers and ratios serialize as decimal
/// strings (`"105"`, `"1/5"`).
#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub n: usize,
    pub b: usize,
    pub q: usize,
    #[serde(rename = "T", serialize_with = "ser_big")]
    pub t: BigUint,
    #[serde(rename = "N", serialize_with = "ser_big")]
    pub n_count: BigUint,
    #[serde(rename = "I_m", serialize_with = "ser_map")]
    pub i_m: BTreeMap<usize, BigUint>,
    #[serde(rename = "N_over_T", serialize_with = "ser_ratio")]
    pub ratio_n: BigRational,
    #[serde(rename = "I_over_T", serialize_with = "ser_ratio")]
    pub ratio_i: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: BigRational,
    pub bound_holds: bool,
    pub bound_tight: bool,
}

impl CountReport {
    pub fn compute(b: usize, q: usize) -> Result<Self, CountError> {
        let n = check_bq(b, q)?;
        let t = t_count(b, q);
        let n_count = n_count(b, q)?;
        let mut i_m = BTreeMap::new();
        for m in (2..n).filter(|m| n % m == 0) {
            i_m.insert(m, i_m_count(b, q, m)?);
        }
        let tr = rat(t.clone());
        let ratio_n = rat(n_count.clone()) / &tr;
        let ratio_i = rat(i_m.values().sum()) / &tr;
        let bound = BigRational::new(BigInt::from(2), BigInt::from(n + 2));
        Ok(CountReport {
            n,
            b,
            q,
            bound_holds: ratio_n >= bound,
            bound_tight: ratio_n == bound,
            t,
            n_count,
            i_m,
            ratio_n,
            ratio_i,
            bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn t_values() {
        assert_eq!(t_count(2, 2), u(3));
        assert_eq!(t_count(2, 4), u(105));
        assert_eq!(t_count(1, 9), u(1));
        for (b, q) in [(3, 4), (5, 2), (7, 3), (1, 1)] {
            assert_eq!(t_count(b, q) * big(b).pow(q as u32) * factorial(q), factorial(b * q));
        }
    }

    #[test]
    fn connection_anchors() {
        assert_eq!(goupil_connection(&ct("4"), &ct("2^2")).unwrap(), u(1));
        for n in 1..9 {
            let ones = CycleType::uniform(1, n);
            let full = CycleType::uniform(n, 1);
            assert_eq!(goupil_connection(&ones, &full).unwrap(), u(1));
        }
        assert_eq!(goupil_connection(&ct("6"), &ct("3^2")).unwrap(), n_count_bruteforce(3, 2, 12).unwrap());
        assert_eq!(goupil_connection(&ct("4"), &ct("2 1^2")).unwrap(), u(0));
        assert_eq!(
            goupil_connection(&ct("4"), &ct("2 1")).unwrap_err(),
            CountError::SizeMismatch(4, 3)
        );
    }

    #[test]
    fn connection_matches_oracles_on_all_small_pairs() {
        for n in 1..=7 {
            let parts = partitions(n);
            for l in &parts {
                for m in &parts {
                    let fast = goupil_connection(l, m).unwrap();
                    assert_eq!(fast, goupil_connection_by_compositions(l, m).unwrap(), "{l} {m}");
                    assert_eq!(fast, connection_bruteforce(l, m, 12).unwrap(), "{l} {m}");
                    assert_eq!(fast, goupil_connection(m, l).unwrap());
                }
            }
        }
    }

    fn partitions(n: usize) -> Vec<CycleType> {
        CycleType::all_of_degree(n)
    }

    #[test]
    fn n_values() {
        assert_eq!(n_count(2, 2).unwrap(), u(1));
        assert_eq!(n_count_bruteforce(2, 2, 12).unwrap(), u(1));
        for n in 2..=8 {
            assert_eq!(n_count(n, 1).unwrap(), n_count_bruteforce(n, 1, 12).unwrap());
        }
        assert_eq!(n_count_bruteforce(3, 5, 12).unwrap_err(), CountError::Infeasible { n: 15, guard: 12 });
    }

    #[test]
    fn block_partition_lists() {
        let parts = |b, q, m| -> Vec<Vec<(usize, usize)>> {
            block_partitions(b, q, m).into_iter().map(|p| p.parts).collect()
        };
        assert_eq!(parts(3, 6, 6), vec![vec![(1, 6)], vec![(3, 2)], vec![(1, 3), (3, 1)]]);
        assert_eq!(parts(2, 2, 2), vec![vec![(1, 2)], vec![(2, 1)]]);
        assert!(parts(3, 3, 2).is_empty());
        for (b, q, m) in [(4, 6, 8), (6, 4, 12), (2, 10, 5)] {
            for p in block_partitions(b, q, m) {
                assert_eq!(p.parts.iter().map(|(d, t)| d * t).sum::<usize>(), m);
                for &(d, _) in &p.parts {
                    assert_eq!(b % d, 0);
                    assert_eq!(d * q % m, 0);
                }
            }
        }
    }

    #[test]
    fn i_m_values() {
        assert_eq!(i_m_count(2, 2, 2).unwrap(), u(3));
        assert_eq!(i_m_bruteforce(2, 2, 2, 12).unwrap(), u(3));
        assert_eq!(i_m_count(3, 2, 3).unwrap(), i_m_bruteforce(3, 2, 3, 12).unwrap());
        assert_eq!(i_m_count(2, 4, 2).unwrap(), i_m_bruteforce(2, 4, 2, 12).unwrap());
        assert_eq!(i_m_count(3, 3, 2).unwrap_err(), CountError::BadModulus { m: 2, n: 9 });
        assert_eq!(i_m_count(2, 2, 4).unwrap_err(), CountError::BadModulus { m: 4, n: 4 });
    }

    #[test]
    fn i_m_below_t_on_a_larger_grid() {
        for b in 1..=8 {
            for q in 1..=8 {
                let n = b * q;
                for m in (2..n).filter(|m| n % m == 0) {
                    assert!(i_m_count(b, q, m).unwrap() <= t_count(b, q), "({b},{q},{m})");
                }
            }
        }
    }

    #[test]
    fn bound_examples() {
        let c = bound_check(2, 4).unwrap();
        assert_eq!(c.ratio, BigRational::new(2.into(), 10.into()));
        assert!(c.tight && c.holds);
        let c = bound_check(3, 2).unwrap();
        assert!(c.holds && !c.tight);
        assert!(c.ratio > BigRational::new(1.into(), 4.into()));
        for n in (1..=13).step_by(2) {
            let c = bound_check(n, 1).unwrap();
            assert!(c.holds && !c.tight, "{n}");
        }
        assert!(n_count(6, 1).unwrap().is_zero());
        assert_eq!(bound_check(2, 3).unwrap_err(), CountError::OffParity(3));
    }

    #[test]
    fn odd_binomial_sums() {
        for b in 1..=9 {
            for q in 1..=6 {
                assert!(odd_binomial_sum_check(b, q));
            }
        }
    }

    #[test]
    fn report_serializes_big_values_as_strings() {
        let r = CountReport::compute(2, 4).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["T"], "105");
        assert_eq!(v["N"], "21");
        assert_eq!(v["N_over_T"], "1/5");
        assert_eq!(v["bound"], "1/5");
        assert_eq!(v["bound_tight"], true);
        assert_eq!(v["I_m"]["2"], i_m_count(2, 4, 2).unwrap().to_string());
    }
}
