//! Certificates that a dessin `(σ_n, y)` with passport `[n, b^q, n]` has
//! trivial automorphism group, and a seeded random search producing them.
//!
//! A certificate is checked in order: `y` has type `(b^q)`; `σ_n·y` is an
//! `n`-cycle; no residue system mod a proper divisor of `n` is preserved, so
//! the group is primitive; then either a word in `x, y` evaluates to a single
//! `p`-cycle with `p` prime and `p <= n - 3` (forcing `A_n <= G`, whose
//! centralizer is trivial), or the exact order and centralizer are computed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{is_prime, preserves_residue_classes, proper_divisors, transitive_centralizer, GroupHandle};
use crate::perm::{CycleType, PermError, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    X,
    Y,
}

/// A positive word over `{x, y}` such as `xyxyx^4yx^3yx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupWord {
    pub letters: Vec<(Letter, u32)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse word {text:?}: {reason}")]
pub struct WordParseError {
    pub text: String,
    pub reason: &'static str,
}

impl FromStr for GroupWord {
    type Err = WordParseError;

    /// Letters `x`/`y`, each optionally followed by `^k` or `^{k}`, `k >= 1`.
    fn from_str(s: &str) -> Result<Self, WordParseError> {
        let err = |reason| WordParseError { text: s.to_string(), reason };
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let letter = match chars[i] {
                'x' => Letter::X,
                'y' => Letter::Y,
                _ => return Err(err("expected x or y")),
            };
            i += 1;
            let mut exp = 1u32;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let braced = i < chars.len() && chars[i] == '{';
                if braced {
                    i += 1;
                }
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                exp = digits.parse().map_err(|_| err("missing exponent"))?;
                if braced {
                    if i >= chars.len() || chars[i] != '}' {
                        return Err(err("unclosed brace"));
                    }
                    i += 1;
                }
                if exp == 0 {
                    return Err(err("zero exponent"));
                }
            }
            letters.push((letter, exp));
        }
        if letters.is_empty() {
            return Err(err("empty word"));
        }
        Ok(GroupWord { letters })
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(l, e) in &self.letters {
            f.write_str(if l == Letter::X { "x" } else { "y" })?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl GroupWord {
    /// The product `l_1 l_2 … l_k` under the crate's composition, so the
    /// rightmost letter acts first.
    pub fn evaluate(&self, x: &Permutation, y: &Permutation) -> Result<Permutation, PermError> {
        if x.degree() != y.degree() {
            return Err(PermError::DegreeMismatch(x.degree(), y.degree()));
        }
        let mut acc = Permutation::identity(x.degree());
        for &(l, e) in &self.letters {
            let g = if l == Letter::X { x } else { y };
            acc = &acc * &g.power(e as i64);
        }
        Ok(acc)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// What the evidence shows about `G = ⟨σ_n, y⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conclusion {
    /// `G = S_n`, from a prime-cycle word (`n` even).
    FullSymmetric,
    /// `G = A_n`, from a prime-cycle word (`n` odd).
    Alternating,
    /// Exact order and centralizer computed directly.
    OrderBased,
}

/// One witness: `y` of type `(b^q)` with `Aut(σ_n, y)` trivial, plus evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateJson", into = "CertificateJson")]
pub struct WitnessCertificate {
    pub b: usize,
    pub q: usize,
    pub y: Permutation,
    pub conclusion: Conclusion,
    pub word: Option<GroupWord>,
    pub prime: Option<u64>,
    /// The value of `word`, when recorded alongside it.
    pub cycle: Option<Permutation>,
    pub order: Option<BigUint>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CertificateJson {
    b: usize,
    q: usize,
    y: String,
    conclusion: Conclusion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<String>,
}

impl TryFrom<CertificateJson> for WitnessCertificate {
    type Error = String;

    fn try_from(j: CertificateJson) -> Result<Self, String> {
        let n = j.b * j.q;
        let perm = |t: &str| Permutation::parse_cycles(t, n).map_err(|e| e.to_string());
        Ok(WitnessCertificate {
            b: j.b,
            q: j.q,
            y: perm(&j.y)?,
            conclusion: j.conclusion,
            word: j.word.map(|w| w.parse().map_err(|e: WordParseError| e.to_string())).transpose()?,
            prime: j.prime,
            cycle: j.cycle.map(|c| perm(&c)).transpose()?,
            order: j.order.map(|o| o.parse().map_err(|_| format!("bad order {o:?}"))).transpose()?,
        })
    }
}

impl From<WitnessCertificate> for CertificateJson {
    fn from(c: WitnessCertificate) -> Self {
        CertificateJson {
            b: c.b,
            q: c.q,
            y: c.y.to_cycle_string(),
            conclusion: c.conclusion,
            word: c.word.map(|w| w.to_string()),
            prime: c.prime,
            cycle: c.cycle.map(|p| p.to_cycle_string()),
            order: c.order.map(|o| o.to_string()),
        }
    }
}

/// Evidence offered to [`certify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// `word` should evaluate to a single `prime`-cycle (equal to `cycle`, if given).
    Word { word: GroupWord, prime: u64, cycle: Option<Permutation> },
    /// Compute the group directly; `order`, if given, must match.
    Order { order: Option<BigUint> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("y has cycle type {found}, expected {expected}")]
    WrongYType { expected: String, found: String },
    #[error("σ_n·y has cycle type {0}, not a single n-cycle")]
    ZNotFullCycle(String),
    #[error("residue classes mod {0} form a block system")]
    Imprimitive(usize),
    #[error("word evaluates to a permutation of type {0}, not a single prime cycle")]
    WordNotPrimeCycle(String),
    #[error("word gives a {found}-cycle, certificate claims {claimed}")]
    PrimeMismatch { claimed: u64, found: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} exceeds n - 3 = {limit}")]
    PrimeTooLarge { p: u64, limit: usize },
    #[error("word evaluates to {found}, certificate records {claimed}")]
    CycleMismatch { claimed: String, found: String },
    #[error("group order is {found}, certificate claims {claimed}")]
    OrderMismatch { claimed: String, found: String },
    #[error("centralizer has order {0}")]
    NontrivialCentralizer(usize),
    #[error("conclusion {claimed:?} does not match the evidence ({derived:?})")]
    ConclusionMismatch { claimed: Conclusion, derived: Conclusion },
    #[error("certificate carries no usable evidence")]
    MissingEvidence,
    #[error("b and q must be positive")]
    BadParameters,
}

/// A certificate that passed every check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedCertificate {
    pub certificate: WitnessCertificate,
    /// Computed order, for order-based evidence.
    pub group_order: Option<BigUint>,
}

/// Which of `S_n`, `A_n` contains `⟨σ_n, y⟩` once `A_n` is known to be inside.
fn word_conclusion(b: usize, q: usize) -> Conclusion {
    let n = b * q;
    let odd = (n - 1) % 2 == 1 || (q * (b - 1)) % 2 == 1;
    if odd {
        Conclusion::FullSymmetric
    } else {
        Conclusion::Alternating
    }
}

/// If `w` is a single cycle of prime length, that length.
fn single_cycle_length(w: &Permutation) -> Option<u64> {
    let cycles = w.cycles();
    (cycles.len() == 1).then(|| cycles[0].len() as u64)
}

/// Runs the checks in order, reporting the first that fails.
pub fn certify(b: usize, q: usize, y: &Permutation, evidence: &Evidence) -> Result<VerifiedCertificate, CertifyError> {
    if b == 0 || q == 0 {
        return Err(CertifyError::BadParameters);
    }
    let n = b * q;
    let expected = CycleType::uniform(b, q);
    if y.degree() != n || y.cycle_type() != expected {
        return Err(CertifyError::WrongYType { expected: expected.to_string(), found: y.cycle_type().to_string() });
    }
    let x = Permutation::standard_cycle(n);
    let xy = &x * y;
    if xy.cycles_with_fixed().len() != 1 {
        return Err(CertifyError::ZNotFullCycle(xy.cycle_type().to_string()));
    }
    if let Some(m) = proper_divisors(n).into_iter().find(|&m| preserves_residue_classes(y, m)) {
        return Err(CertifyError::Imprimitive(m));
    }
    let base = WitnessCertificate {
        b,
        q,
        y: y.clone(),
        conclusion: Conclusion::OrderBased,
        word: None,
        prime: None,
        cycle: None,
        order: None,
    };
    match evidence {
        Evidence::Word { word, prime, cycle } => {
            let w = word.evaluate(&x, y).expect("same degree");
            let Some(len) = single_cycle_length(&w) else {
                return Err(CertifyError::WordNotPrimeCycle(w.cycle_type().to_string()));
            };
            if len != *prime {
                return Err(CertifyError::PrimeMismatch { claimed: *prime, found: len });
            }
            if !is_prime(len) {
                return Err(CertifyError::NotPrime(len));
            }
            if n < 3 || len as usize > n - 3 {
                return Err(CertifyError::PrimeTooLarge { p: len, limit: n.saturating_sub(3) });
            }
            if let Some(c) = cycle {
                if *c != w {
                    return Err(CertifyError::CycleMismatch { claimed: c.to_string(), found: w.to_string() });
                }
            }
            Ok(VerifiedCertificate {
                certificate: WitnessCertificate {
                    conclusion: word_conclusion(b, q),
                    word: Some(word.clone()),
                    prime: Some(len),
                    cycle: Some(w),
                    ..base
                },
                group_order: None,
            })
        }
        Evidence::Order { order } => {
            let g = GroupHandle::new(&[x, y.clone()]).expect("same degree");
            if let Some(o) = order {
                if o != g.order() {
                    return Err(CertifyError::OrderMismatch { claimed: o.to_string(), found: g.order().to_string() });
                }
            }
            let c = transitive_centralizer(&g);
            if c.len() != 1 {
                return Err(CertifyError::NontrivialCentralizer(c.len()));
            }
            Ok(VerifiedCertificate {
                certificate: WitnessCertificate { order: Some(g.order().clone()), ..base },
                group_order: Some(g.order().clone()),
            })
        }
    }
}

impl WitnessCertificate {
    pub fn degree(&self) -> usize {
        self.b * self.q
    }

    pub fn evidence(&self) -> Result<Evidence, CertifyError> {
        match (&self.word, self.prime) {
            (Some(word), Some(prime)) => Ok(Evidence::Word { word: word.clone(), prime, cycle: self.cycle.clone() }),
            (None, None) if self.conclusion == Conclusion::OrderBased => {
                Ok(Evidence::Order { order: self.order.clone() })
            }
            _ => Err(CertifyError::MissingEvidence),
        }
    }

    /// [`certify`] with this certificate's own evidence, also requiring the
    /// stated conclusion to be the one the evidence supports.
    pub fn verify(&self) -> Result<VerifiedCertificate, CertifyError> {
        let v = certify(self.b, self.q, &self.y, &self.evidence()?)?;
        if v.certificate.conclusion != self.conclusion {
            return Err(CertifyError::ConclusionMismatch {
                claimed: self.conclusion,
                derived: v.certificate.conclusion,
            });
        }
        Ok(v)
    }
}

const TABLE_FIXTURE: &str = include_str!("../fixtures/witness_tables.json");

/// The shipped table of witnesses, one record per row.
pub fn table_fixtures() -> Vec<WitnessCertificate> {
    serde_json::from_str(TABLE_FIXTURE).expect("fixture file is valid")
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Number of candidate `y` to draw.
    pub budget: usize,
    /// Longest random word tried, in letters.
    pub max_word_len: usize,
    /// Random words tried per candidate.
    pub word_trials: usize,
    /// Up to this `n`, fall back to computing the order and centralizer.
    pub direct_max_n: usize,
    /// Candidates examined in parallel per round.
    pub batch: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: 1000, max_word_len: 12, word_trials: 50_000, direct_max_n: 12, batch: 32 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("no certificate within a budget of {0} candidates")]
    Exhausted(usize),
    #[error("invalid parameters b = {b}, q = {q}: {reason}")]
    InvalidParameters { b: usize, q: usize, reason: &'static str },
}

/// Draws random words in alternating letters, `x^i` with `1 <= i < n` and
/// `y^j` with `1 <= j < b`, looking for a single prime cycle of length `<= n - 3`.
fn find_prime_word(x: &Permutation, y: &Permutation, b: usize, rng: &mut ChaCha8Rng, cfg: &SearchConfig) -> Option<(GroupWord, u64)> {
    let n = x.degree();
    let xpow: Vec<Permutation> = (0..n).map(|i| x.power(i as i64)).collect();
    let ypow: Vec<Permutation> = (0..b).map(|j| y.power(j as i64)).collect();
    for _ in 0..cfg.word_trials {
        let len = rng.random_range(1..=cfg.max_word_len);
        let mut letter = if rng.random_bool(0.5) { Letter::X } else { Letter::Y };
        let mut letters = Vec::with_capacity(len);
        let mut acc = Permutation::identity(n);
        for _ in 0..len {
            let e = match letter {
                Letter::X => rng.random_range(1..n),
                Letter::Y => rng.random_range(1..b),
            };
            let g = if letter == Letter::X { &xpow[e] } else { &ypow[e] };
            acc = &acc * g;
            letters.push((letter, e as u32));
            letter = if letter == Letter::X { Letter::Y } else { Letter::X };
        }
        if let Some(p) = single_cycle_length(&acc) {
            if is_prime(p) && p as usize + 3 <= n {
                return Some((GroupWord { letters }, p));
            }
        }
    }
    None
}

fn try_candidate(b: usize, q: usize, seed: u64, index: u64, cfg: &SearchConfig) -> Option<WitnessCertificate> {
    let n = b * q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let y = Permutation::random_of_cycle_type(&CycleType::uniform(b, q), &mut rng);
    let x = Permutation::standard_cycle(n);
    if (&x * &y).cycles_with_fixed().len() != 1 {
        return None;
    }
    if proper_divisors(n).into_iter().any(|m| preserves_residue_classes(&y, m)) {
        return None;
    }
    let evidence = match find_prime_word(&x, &y, b, &mut rng, cfg) {
        Some((word, prime)) => Evidence::Word { word, prime, cycle: None },
        None if n <= cfg.direct_max_n => Evidence::Order { order: None },
        None => return None,
    };
    certify(b, q, &y, &evidence).ok().map(|v| v.certificate)
}

/// Seeded search for a certificate for `[n, b^q, n]`. Candidate `i` draws
/// from ChaCha8 seeded with `seed` on stream `i`; the smallest successful
/// index wins, so the result does not depend on the thread count.
pub fn search_trivial_aut(b: usize, q: usize, seed: u64, cfg: &SearchConfig) -> Result<WitnessCertificate, SearchError> {
    let invalid = |reason| SearchError::InvalidParameters { b, q, reason };
    if b < 2 || q == 0 {
        return Err(invalid("need b >= 2 and q >= 1"));
    }
    let n = b * q;
    if is_prime(n as u64) {
        return Err(invalid("n must be composite"));
    }
    if (n - q) % 2 != 0 || (n - q) / 2 < 2 {
        return Err(invalid("genus (n - q)/2 must be an integer >= 2"));
    }
    let batch = cfg.batch.max(1);
    let mut start = 0;
    while start < cfg.budget {
        let end = (start + batch).min(cfg.budget);
        let hit = (start..end)
            .into_par_iter()
            .filter_map(|i| try_candidate(b, q, seed, i as u64, cfg).map(|c| (i, c)))
            .min_by_key(|(i, _)| *i);
        if let Some((_, c)) = hit {
            return Ok(c);
        }
        start = end;
    }
    Err(SearchError::Exhausted(cfg.budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(t, n).unwrap()
    }

    #[test]
    fn word_syntax() {
        let w: GroupWord = "xyxyx^4yx^3yx".parse().unwrap();
        assert_eq!(w.letters.len(), 9);
        assert_eq!(w.to_string(), "xyxyx^4yx^3yx");
        assert_eq!("x^{4}y".parse::<GroupWord>().unwrap().to_string(), "x^4y");
        for bad in ["", "xz", "x^", "x^0", "x^{3"] {
            assert!(bad.parse::<GroupWord>().is_err(), "{bad}");
        }
    }

    #[test]
    fn word_evaluation() {
        let s5 = Permutation::standard_cycle(5);
        assert_eq!("x".parse::<GroupWord>().unwrap().evaluate(&s5, &Permutation::identity(5)).unwrap(), s5);
        let x = Permutation::standard_cycle(12);
        let y = p("(1 4)(2 9)(3 6)(5 8)(7 11)(10 12)", 12);
        let w: GroupWord = "xyxyx^4yx^3yx".parse().unwrap();
        assert_eq!(w.evaluate(&x, &y).unwrap().to_cycle_string(), "(4 6 9 5 11)");
        // The rightmost letter acts first.
        let xy: GroupWord = "xy".parse().unwrap();
        assert_eq!(xy.evaluate(&x, &y).unwrap(), &x * &y);
    }

    #[test]
    fn fixture_rows_verify() {
        let rows = table_fixtures();
        assert_eq!(rows.len(), 40);
        for row in rows.iter().filter(|r| r.degree() <= 24) {
            row.verify().unwrap_or_else(|e| panic!("({}, {}): {e}", row.b, row.q));
        }
    }

    #[test]
    fn fixture_conclusions_follow_parity() {
        for row in table_fixtures() {
            match row.conclusion {
                Conclusion::FullSymmetric => assert_eq!(row.degree() % 2, 0),
                Conclusion::Alternating => assert_eq!(row.degree() % 2, 1),
                Conclusion::OrderBased => assert!(row.word.is_none()),
            }
        }
    }

    #[test]
    fn exceptional_rows() {
        let rows = table_fixtures();
        let find = |b, q| rows.iter().find(|r| r.b == b && r.q == q).unwrap();
        let v = find(2, 4).verify().unwrap();
        assert_eq!(v.group_order, Some(BigUint::from(336u32)));
        let v = find(3, 2).verify().unwrap();
        assert_eq!(v.group_order, Some(BigUint::from(120u32)));
    }

    #[test]
    fn tampered_rows_are_rejected() {
        let row = table_fixtures().into_iter().find(|r| r.b == 2 && r.q == 6).unwrap();
        // Merge two transpositions: wrong type.
        let mut bad = row.clone();
        bad.y = &bad.y * &p("(1 2)", 12);
        assert!(matches!(bad.verify(), Err(CertifyError::WrongYType { .. })));
        // Swap the partners of two transpositions: right type, wrong product.
        let mut bad = row.clone();
        bad.y = p("(1 2)(4 9)(3 6)(5 8)(7 11)(10 12)", 12);
        let err = bad.verify().unwrap_err();
        assert!(
            matches!(err, CertifyError::ZNotFullCycle(_) | CertifyError::CycleMismatch { .. } | CertifyError::WordNotPrimeCycle(_)),
            "{err}"
        );
        let mut bad = row.clone();
        bad.prime = Some(7);
        assert_eq!(bad.verify().unwrap_err(), CertifyError::PrimeMismatch { claimed: 7, found: 5 });
        let mut bad = row.clone();
        bad.conclusion = Conclusion::Alternating;
        assert!(matches!(bad.verify(), Err(CertifyError::ConclusionMismatch { .. })));
        let mut bad = row;
        bad.word = None;
        assert_eq!(bad.verify().unwrap_err(), CertifyError::MissingEvidence);
    }

    #[test]
    fn imprimitive_and_wrong_order_are_rejected() {
        // y = (1 3)(2 4) preserves parity classes.
        let e = certify(2, 2, &p("(1 3)(2 4)", 4), &Evidence::Order { order: None }).unwrap_err();
        assert_eq!(e, CertifyError::Imprimitive(2));
        let y = p("(1 4)(2 5)(3 7)(6 8)", 8);
        let e = certify(2, 4, &y, &Evidence::Order { order: Some(BigUint::from(335u32)) }).unwrap_err();
        assert!(matches!(e, CertifyError::OrderMismatch { .. }));
    }

    #[test]
    fn certificate_json_round_trip() {
        let row = table_fixtures().into_iter().nth(1).unwrap();
        let text = serde_json::to_string(&row).unwrap();
        assert!(text.contains(r#""word":"xyxyx^4yx^3yx""#));
        let back: WitnessCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, row);
    }

    #[test]
    fn search_small_cases() {
        let cfg = SearchConfig { budget: 200, word_trials: 2000, ..SearchConfig::default() };
        for seed in 0..3 {
            let c = search_trivial_aut(3, 2, seed, &cfg).unwrap();
            assert_eq!(c.conclusion, Conclusion::OrderBased);
            assert_eq!(c.order, Some(BigUint::from(120u32)));
            c.verify().unwrap();
        }
        let c = search_trivial_aut(2, 6, 7, &cfg).unwrap();
        c.verify().unwrap();
        assert_eq!(c, search_trivial_aut(2, 6, 7, &cfg).unwrap());
        assert!(search_trivial_aut(2, 3, 0, &cfg).is_err());
        assert!(search_trivial_aut(7, 1, 0, &cfg).is_err());
    }
}
