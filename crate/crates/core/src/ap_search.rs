//! Longest arithmetic progressions inside finite integer sets.
//!
//! Both searches return the canonical maximum: longest first, then smallest
//! step, then smallest first term. A nonempty set always holds the length-1
//! progression `(x, 1, 1)` at its minimum.

use std::ops::{Add, Sub};

use num_bigint::BigUint;
use thiserror::Error;

use crate::sets::ArithmeticProgression;

/// Largest input the O(m²)-memory dynamic program accepts by default.
pub const DEFAULT_DP_LIMIT: usize = 6_000;
/// Largest input the brute-force oracle accepts by default.
pub const DEFAULT_BRUTEFORCE_LIMIT: usize = 3_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApSearchError {
    #[error("input is empty")]
    Empty,
    #[error("input must be strictly increasing (position {0})")]
    NotIncreasing(usize),
    #[error("{size} elements exceed the search limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("invalid generator {0:?}; expected \"u^a+v^b\" with integer bases ≥ 2")]
    BadGenerator(String),
}

fn validate(elements: &[BigUint], limit: usize) -> Result<(), ApSearchError> {
    if elements.is_empty() {
        return Err(ApSearchError::Empty);
    }
    if let Some(p) = (1..elements.len()).find(|&i| elements[i - 1] >= elements[i]) {
        return Err(ApSearchError::NotIncreasing(p));
    }
    if elements.len() > limit {
        return Err(ApSearchError::TooLarge {
            size: elements.len(),
            limit,
        });
    }
    Ok(())
}

/// Narrow values to `u128` when sums of two elements cannot overflow.
fn narrow(elements: &[BigUint]) -> Option<Vec<u128>> {
    if elements.last()?.bits() > 126 {
        return None;
    }
    elements.iter().map(|e| u128::try_from(e).ok()).collect()
}

/// Canonical winner among candidate starting pairs `(i, j)` of a maximal
/// length: smallest step, then smallest first.
fn better<T: Ord + Clone>(a: &[T], cand: (usize, usize), best: Option<(usize, usize)>) -> bool
where
    for<'x> &'x T: Add<&'x T, Output = T> + Sub<&'x T, Output = T>,
{
    let Some((bi, bj)) = best else {
        return true;
    };
    let step = &a[cand.1] - &a[cand.0];
    let best_step = &a[bj] - &a[bi];
    (step, cand.0) < (best_step, bi)
}

/// Pair-indexed DP: `table[i·m + j]` is the length of the longest
/// progression in `a` that starts with `a[i], a[j]`.
fn dp<T: Ord + Clone>(a: &[T]) -> (usize, usize, usize)
where
    for<'x> &'x T: Add<&'x T, Output = T> + Sub<&'x T, Output = T>,
{
    let m = a.len();
    if m == 1 {
        return (1, 0, 0);
    }
    let mut table = vec![2u32; m * m];
    for j in (1..m - 1).rev() {
        let twice = &a[j] + &a[j];
        let mut i = j as isize - 1;
        let mut k = j + 1;
        while i >= 0 && k < m {
            let ii = i as usize;
            let s = &a[ii] + &a[k];
            match s.cmp(&twice) {
                std::cmp::Ordering::Less => k += 1,
                std::cmp::Ordering::Greater => {
                    table[ii * m + j] = 2;
                    i -= 1;
                }
                std::cmp::Ordering::Equal => {
                    table[ii * m + j] = table[j * m + k] + 1;
                    i -= 1;
                    k += 1;
                }
            }
        }
    }
    let mut best_len = 2u32;
    let mut best = None;
    for i in 0..m {
        for j in i + 1..m {
            let len = table[i * m + j];
            if len > best_len {
                best_len = len;
                best = Some((i, j));
            } else if len == best_len && better(a, (i, j), best) {
                best = Some((i, j));
            }
        }
    }
    let (i, j) = best.expect("m ≥ 2 gives at least one pair");
    (best_len as usize, i, j)
}

fn brute<T: Ord + Clone>(a: &[T]) -> (usize, usize, usize)
where
    for<'x> &'x T: Add<&'x T, Output = T> + Sub<&'x T, Output = T>,
{
    let m = a.len();
    let mut best_len = 1;
    let mut best: Option<(usize, usize)> = None;
    for i in 0..m {
        for j in i + 1..m {
            let step = &a[j] - &a[i];
            let mut len = 2;
            let mut next = &a[j] + &step;
            while a[j..].binary_search(&next).is_ok() {
                len += 1;
                next = &next + &step;
            }
            if len > best_len || (len == best_len && better(a, (i, j), best)) {
                best_len = len;
                best = Some((i, j));
            }
        }
    }
    match best {
        Some((i, j)) => (best_len, i, j),
        None => (1, 0, 0),
    }
}

fn assemble(elements: &[BigUint], (len, i, j): (usize, usize, usize)) -> ArithmeticProgression {
    let step = if len == 1 {
        BigUint::from(1u32)
    } else {
        &elements[j] - &elements[i]
    };
    ArithmeticProgression::new(elements[i].clone(), step, len)
        .expect("search yields a positive step and length")
}

fn checked(elements: &[BigUint], ap: ArithmeticProgression) -> ArithmeticProgression {
    assert!(
        ap.elements().all(|x| elements.binary_search(&x).is_ok()),
        "progression {ap} must lie inside the searched set"
    );
    ap
}

/// Longest progression via the O(m²) pair DP.
pub fn longest_ap_dp(elements: &[BigUint]) -> Result<ArithmeticProgression, ApSearchError> {
    longest_ap_dp_with_limit(elements, DEFAULT_DP_LIMIT)
}

pub fn longest_ap_dp_with_limit(
    elements: &[BigUint],
    limit: usize,
) -> Result<ArithmeticProgression, ApSearchError> {
    validate(elements, limit)?;
    let found = match narrow(elements) {
        Some(small) => dp(&small),
        None => dp(elements),
    };
    Ok(checked(elements, assemble(elements, found)))
}

/// Longest progression by extending every `(first, second)` pair greedily.
pub fn longest_ap_bruteforce(elements: &[BigUint]) -> Result<ArithmeticProgression, ApSearchError> {
    longest_ap_bruteforce_with_limit(elements, DEFAULT_BRUTEFORCE_LIMIT)
}

pub fn longest_ap_bruteforce_with_limit(
    elements: &[BigUint],
    limit: usize,
) -> Result<ArithmeticProgression, ApSearchError> {
    validate(elements, limit)?;
    let found = match narrow(elements) {
        Some(small) => brute(&small),
        None => brute(elements),
    };
    Ok(checked(elements, assemble(elements, found)))
}

/// Parsed `"u^a+v^b"` generator: all `u^a + v^b` with `a, b ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoPowerSums {
    pub u: u64,
    pub v: u64,
}

impl std::str::FromStr for TwoPowerSums {
    type Err = ApSearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ApSearchError::BadGenerator(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (lhs, rhs) = compact.split_once('+').ok_or_else(bad)?;
        let base = |term: &str| -> Result<u64, ApSearchError> {
            let (b, exp) = term.split_once('^').ok_or_else(bad)?;
            if exp.is_empty() || !exp.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(bad());
            }
            let b: u64 = b.parse().map_err(|_| bad())?;
            if b < 2 {
                return Err(bad());
            }
            Ok(b)
        };
        Ok(TwoPowerSums {
            u: base(lhs)?,
            v: base(rhs)?,
        })
    }
}

impl TwoPowerSums {
    /// Sorted, deduplicated values strictly below `bound`.
    pub fn below(&self, bound: &BigUint) -> Vec<BigUint> {
        let powers = |base: u64| {
            let mut out = Vec::new();
            let mut p = BigUint::from(1u32);
            while p < *bound {
                out.push(p.clone());
                p *= base;
            }
            out
        };
        let (pu, pv) = (powers(self.u), powers(self.v));
        let mut values: Vec<BigUint> = pu
            .iter()
            .flat_map(|x| pv.iter().map(move |y| x + y))
            .filter(|s| s < bound)
            .collect();
        values.sort_unstable();
        values.dedup();
        values
    }
}
