//! Counting bound on progression length in an n-fold sumset of
//! `C`-log-sparse sets.
//!
//! For an element `x = x_1 + … + x_n` of a progression `T` with step `δ` and
//! spread `Δ`, each summand is *large* (`x_i > Δ`), *small*
//! (`x_i < δ/(2n)`) or *medium*. The small terms add up to less than `δ/2`,
//! so `x` is recovered from its large and medium terms alone. Counting the
//! possible large/medium choices gives
//!
//! ```text
//! |T| ≤ 3^n · max(n·W_L, W_M(|T|))^n
//! W_L    = C·(⌈log₂(n+1)⌉ + 1)
//! W_M(t) = C·(⌈log₂(2n(t−1))⌉ + 1)
//! ```
//!
//! where `W_L` counts the options for one large term (it lies in a window of
//! ratio `n+1`, covered by that many dyadic windows) with a factor `n` for the
//! ordering of large terms, and `W_M` counts options for one medium term
//! (window of ratio `2n(t−1)`). Since the right side grows only
//! polylogarithmically in `|T|`, the inequality pins `|T|` below a finite
//! fixpoint, computed by [`solve_max_length`].

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::sets::ArithmeticProgression;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("a progression of length {0} has no step; classification needs length ≥ 2")]
    DegenerateProgression(usize),
    #[error("representation has {actual} terms, expected {expected}")]
    RepresentationLength { expected: usize, actual: usize },
    #[error("representation sums to {0}, which is not a term of the progression")]
    NotAnElement(BigUint),
    #[error("small terms sum to {small_sum}, not below half the step {step}")]
    SmallMassTooLarge { small_sum: BigUint, step: BigUint },
    #[error("no progression term lies in [{heavy}, {heavy} + step/2)")]
    DecodeFailure { heavy: BigUint },
    #[error("n and C must both be at least 1")]
    BadParams,
    #[error("length hypothesis must be at least 2, got {0}")]
    HypothesisTooSmall(BigUint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Large,
    Medium,
    Small,
}

/// Large/medium/small labels for one representation of a progression term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermClassification {
    terms: Vec<(BigUint, TermKind)>,
    spread: BigUint,
    step: BigUint,
}

impl TermClassification {
    pub fn labels(&self) -> impl Iterator<Item = TermKind> + '_ {
        self.terms.iter().map(|(_, k)| *k)
    }

    pub fn spread(&self) -> &BigUint {
        &self.spread
    }

    pub fn step(&self) -> &BigUint {
        &self.step
    }

    /// `(large, medium, small)` tallies.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.labels().fold((0, 0, 0), |(a, b, c), k| match k {
            TermKind::Large => (a + 1, b, c),
            TermKind::Medium => (a, b + 1, c),
            TermKind::Small => (a, b, c + 1),
        })
    }

    /// Sum of the large and medium terms.
    pub fn heavy_sum(&self) -> BigUint {
        self.terms
            .iter()
            .filter(|(_, k)| *k != TermKind::Small)
            .map(|(x, _)| x)
            .sum()
    }

    pub fn small_sum(&self) -> BigUint {
        self.terms
            .iter()
            .filter(|(_, k)| *k == TermKind::Small)
            .map(|(x, _)| x)
            .sum()
    }
}

/// Labels each summand of `representation` against the exact thresholds
/// `Δ` and `δ/(2n)` of `ap`.
pub fn classify_terms(
    ap: &ArithmeticProgression,
    n: usize,
    representation: &[BigUint],
) -> Result<TermClassification, BoundError> {
    if ap.length() < 2 {
        return Err(BoundError::DegenerateProgression(ap.length()));
    }
    if representation.len() != n {
        return Err(BoundError::RepresentationLength {
            expected: n,
            actual: representation.len(),
        });
    }
    let total: BigUint = representation.iter().sum();
    if ap.index_of(&total).is_none() {
        return Err(BoundError::NotAnElement(total));
    }
    let spread = ap.spread();
    let step = ap.step().clone();
    let two_n = BigUint::from(2 * n);
    let terms: Vec<(BigUint, TermKind)> = representation
        .iter()
        .map(|x| {
            let kind = if *x > spread {
                TermKind::Large
            } else if x * &two_n < step {
                TermKind::Small
            } else {
                TermKind::Medium
            };
            (x.clone(), kind)
        })
        .collect();
    let classification = TermClassification {
        terms,
        spread,
        step,
    };
    let small_sum = classification.small_sum();
    if &small_sum * 2u32 >= classification.step {
        return Err(BoundError::SmallMassTooLarge {
            small_sum,
            step: classification.step,
        });
    }
    Ok(classification)
}

/// The unique term `t` of `ap` with `heavy ≤ t < heavy + δ/2`.
pub fn decode_from_heavy(
    ap: &ArithmeticProgression,
    heavy: &BigUint,
) -> Result<BigUint, BoundError> {
    let fail = || BoundError::DecodeFailure {
        heavy: heavy.clone(),
    };
    let candidate = if heavy <= ap.first() {
        ap.first().clone()
    } else {
        let gap = heavy - ap.first();
        let k = (&gap + ap.step() - 1u32) / ap.step();
        if k >= BigUint::from(ap.length()) {
            return Err(fail());
        }
        ap.first() + k * ap.step()
    };
    if (&candidate - heavy) * 2u32 < *ap.step() {
        Ok(candidate)
    } else {
        Err(fail())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundParams {
    n: usize,
    c: usize,
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
fn ceil_log2(x: &BigUint) -> u64 {
    (x - 1u32).bits()
}

impl BoundParams {
    pub fn new(n: usize, c: usize) -> Result<Self, BoundError> {
        if n == 0 || c == 0 {
            return Err(BoundError::BadParams);
        }
        Ok(Self { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    /// `W_L`: options for one large term.
    pub fn large_term_options(&self) -> u64 {
        self.c as u64 * (ceil_log2(&BigUint::from(self.n + 1)) + 1)
    }

    /// `W_M(t)`: options for one medium term when `|T| = t`.
    pub fn medium_term_options(&self, t: &BigUint) -> u64 {
        self.c as u64 * (self.medium_log(t) + 1)
    }

    fn medium_log(&self, t: &BigUint) -> u64 {
        ceil_log2(&(BigUint::from(2 * self.n) * (t - 1u32)))
    }

    fn bound_with_base(&self, medium: u64) -> BigUint {
        let per_term = (self.n as u64 * self.large_term_options()).max(medium);
        num_traits::pow(BigUint::from(per_term) * 3u32, self.n)
    }
}

/// `3^n · max(n·W_L, W_M(t))^n`, exactly.
pub fn explicit_bound(params: &BoundParams, t: &BigUint) -> Result<BigUint, BoundError> {
    if *t < BigUint::from(2u32) {
        return Err(BoundError::HypothesisTooSmall(t.clone()));
    }
    Ok(params.bound_with_base(params.medium_term_options(t)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointSolution {
    pub max_length: BigUint,
    /// Number of constant pieces of the bound that were examined.
    pub iterations: usize,
}

impl FixpointSolution {
    /// `log(max_length) / (n log n)`; undefined for `n = 1`.
    pub fn log_ratio(&self, n: usize) -> Option<f64> {
        if n < 2 {
            return None;
        }
        let log2 = big_log2(&self.max_length);
        Some(log2 / (n as f64 * (n as f64).log2()))
    }
}

pub(crate) fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits f64").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head fits f64");
    top.log2() + shift as f64
}

/// Largest `t` with `t ≤ explicit_bound(params, t)`.
///
/// The bound is constant on each piece of `t` where `ℓ = ⌈log₂(2n(t−1))⌉`
/// is fixed, i.e. `t − 1 ∈ [⌊2^(ℓ−1)/2n⌋ + 1, ⌊2^ℓ/2n⌋]`. Within a piece the
/// admissible `t` form a prefix, so scanning pieces in increasing `ℓ` finds
/// the global maximum. The scan stops once a piece starts above its bound
/// and the per-term base `X` satisfies `(X + C)^n < 2·X^n`: from there the
/// piece start at least doubles while the bound grows by less than a factor
/// two, so no later piece can admit anything.
pub fn solve_max_length(params: &BoundParams) -> FixpointSolution {
    let two_n = BigUint::from(2 * params.n);
    let mut best = BigUint::from(2u32);
    let mut iterations = 0;
    for l in 1u64.. {
        let lo = (BigUint::one() << (l - 1)) / &two_n + 2u32;
        let hi = (BigUint::one() << l) / &two_n + 1u32;
        let medium = params.c as u64 * (l + 1);
        let bound = params.bound_with_base(medium);
        if lo <= hi {
            iterations += 1;
            debug_assert_eq!(params.medium_log(&lo), l);
            if lo <= bound {
                let cand = hi.clone().min(bound.clone());
                if cand > best {
                    best = cand;
                }
            }
        }
        let base = (params.n as u64 * params.large_term_options()).max(medium);
        let grows_slowly = num_traits::pow(BigUint::from(base + params.c as u64), params.n)
            < num_traits::pow(BigUint::from(base), params.n) * 2u32;
        if lo > bound && grows_slowly {
            break;
        }
    }
    FixpointSolution {
        max_length: best,
        iterations,
    }
}

/// Tabulates `solve_max_length(n, C)` for each `n` in `ns`.
pub fn bound_table(
    ns: impl IntoIterator<Item = usize>,
    c: usize,
) -> Vec<(usize, FixpointSolution)> {
    ns.into_iter()
        .map(|n| {
            let params = BoundParams::new(n, c).expect("n, C ≥ 1");
            (n, solve_max_length(&params))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn ap(first: u64, step: u64, len: usize) -> ArithmeticProgression {
        ArithmeticProgression::new(b(first), b(step), len).unwrap()
    }

    #[test]
    fn classification_thresholds() {
        let c = classify_terms(&ap(100, 10, 5), 2, &[b(90), b(30)]).unwrap();
        assert_eq!(
            c.labels().collect::<Vec<_>>(),
            vec![TermKind::Large, TermKind::Medium]
        );
        // δ/(2n) = 10/8: only 1 is small.
        let c = classify_terms(&ap(100, 10, 5), 4, &[b(100), b(1), b(2), b(17)]).unwrap();
        assert_eq!(
            c.labels().collect::<Vec<_>>(),
            vec![
                TermKind::Large,
                TermKind::Small,
                TermKind::Medium,
                TermKind::Medium
            ]
        );
        assert_eq!(c.counts(), (1, 2, 1));
        assert_eq!(c.small_sum(), b(1));
        assert_eq!(c.heavy_sum(), b(119));
        // Δ itself is not large
        let c = classify_terms(&ap(40, 10, 5), 1, &[b(40)]).unwrap();
        assert_eq!(c.labels().next(), Some(TermKind::Medium));
    }

    #[test]
    fn classification_errors() {
        assert_eq!(
            classify_terms(&ap(5, 1, 1), 1, &[b(5)]),
            Err(BoundError::DegenerateProgression(1))
        );
        assert_eq!(
            classify_terms(&ap(100, 10, 5), 2, &[b(90), b(31)]),
            Err(BoundError::NotAnElement(b(121)))
        );
        assert!(matches!(
            classify_terms(&ap(100, 10, 5), 3, &[b(90), b(30)]),
            Err(BoundError::RepresentationLength { .. })
        ));
    }

    #[test]
    fn decoding() {
        let t = ap(0, 10, 100);
        assert_eq!(decode_from_heavy(&t, &b(57)).unwrap(), b(60));
        assert_eq!(decode_from_heavy(&t, &b(60)).unwrap(), b(60));
        // 60 − 55 = 5 is not below δ/2
        assert!(decode_from_heavy(&t, &b(55)).is_err());
        assert!(decode_from_heavy(&t, &b(995)).is_err());
        assert_eq!(decode_from_heavy(&ap(10, 10, 3), &b(8)).unwrap(), b(10));
    }

    #[test]
    fn bound_formula_at_smallest_parameters() {
        let p = BoundParams::new(1, 1).unwrap();
        assert_eq!(explicit_bound(&p, &b(2)).unwrap(), b(6));
        assert!(explicit_bound(&p, &b(1)).is_err());
        assert!(BoundParams::new(0, 1).is_err());
    }

    #[test]
    fn window_counts() {
        let p = BoundParams::new(5, 2).unwrap();
        // ⌈log₂ 6⌉ = 3
        assert_eq!(p.large_term_options(), 8);
        // ⌈log₂(10·99)⌉ = 10
        assert_eq!(p.medium_term_options(&b(100)), 22);
    }
}
