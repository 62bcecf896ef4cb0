//! Seeded random construction: every set takes one random digit per block,
//! and a target is covered when its nonzero block digits can be matched to
//! distinct sets.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::certificate::{Assignment, CertificateError, MatchingCertificate};
use crate::matching::{saturating_matching, BipartiteGraph, HallViolation};
use crate::sets::{DigitLayout, LogSparseSet, Provenance, SetFamily};

/// Sparsity constant of sampled families, before and after a unit shift.
pub const RANDOM_FAMILY_C: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RandomError {
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsOutOfRange(Ratio<u64>),
    #[error("n must be at least 4, got {0}")]
    TooFewSets(usize),
    #[error("n = {n}, epsilon = {eps} leaves no blocks")]
    NoBlocks { n: usize, eps: Ratio<u64> },
    #[error("block width {0} exceeds 63 bits")]
    TooWide(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverageError {
    #[error("family has no block layout (manual families cannot be checked for coverage)")]
    NoLayout,
    #[error("target {target} is outside [{start}, {end})")]
    OutOfRange {
        target: BigUint,
        start: BigUint,
        end: BigUint,
    },
    #[error("internal error: certificate for {target} failed verification: {source}")]
    BadCertificate {
        target: BigUint,
        source: CertificateError,
    },
    #[error("internal error: Hall witness for {0} failed its recount")]
    BadWitness(BigUint),
}

/// Block layout for `n` sets: `blocks` blocks of `width` bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockScheme {
    n: usize,
    eps: Ratio<u64>,
    width: u32,
    blocks: usize,
}

/// `(w, m)` with `w = max(1, ⌊f·log₂ n⌋)` and `m = min(n, ⌊f·n⌋)` for
/// `f ∈ (0, 1]`, computed exactly: `⌊f·log₂ n⌋` is the largest `w` with
/// `2^(w·den) ≤ n^num`.
fn block_dimensions(n: usize, fraction: Ratio<u64>) -> (u64, usize) {
    let (num, den) = (*fraction.numer(), *fraction.denom());
    let power = num_traits::pow(BigUint::from(n), num as usize);
    let raw_width = (power.bits() - 1) / den;
    let blocks = ((num as u128 * n as u128) / den as u128) as usize;
    (raw_width.max(1), blocks.min(n))
}

pub fn make_block_scheme(n: usize, eps: Ratio<u64>) -> Result<BlockScheme, RandomError> {
    if eps <= Ratio::zero() || eps >= Ratio::one() {
        return Err(RandomError::EpsOutOfRange(eps));
    }
    if n < 4 {
        return Err(RandomError::TooFewSets(n));
    }
    let (width, blocks) = block_dimensions(n, Ratio::one() - eps);
    if blocks == 0 {
        return Err(RandomError::NoBlocks { n, eps });
    }
    if width > 63 {
        return Err(RandomError::TooWide(width));
    }
    Ok(BlockScheme {
        n,
        eps,
        width: width as u32,
        blocks,
    })
}

impl BlockScheme {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> Ratio<u64> {
        self.eps
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn layout(&self) -> DigitLayout {
        DigitLayout {
            radix: 1u64 << self.width,
            blocks: self.blocks,
        }
    }

    /// `2^(w·m)`: every integer below it splits uniquely into block digits.
    pub fn covered_range(&self) -> BigUint {
        BigUint::one() << (self.width as u64 * self.blocks as u64)
    }

    pub fn digit_set(&self, block: usize) -> DigitSet {
        assert!(block < self.blocks, "block {block} out of range");
        DigitSet {
            block,
            width: self.width,
        }
    }
}

/// All `d · 2^(w·block)` with `1 ≤ d < 2^w`: the sums of distinct powers of
/// two whose exponents fall in the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitSet {
    block: usize,
    width: u32,
}

impl DigitSet {
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn len(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, digit: u64) -> BigUint {
        BigUint::from(digit) << (self.width as u64 * self.block as u64)
    }

    pub fn values(&self) -> impl Iterator<Item = BigUint> + '_ {
        (1..=self.len()).map(|d| self.value(d))
    }
}

/// Digit drawn for set `j`, block `i`. Each pair reads its own ChaCha stream,
/// so the family does not depend on iteration order.
fn draw_digit(seed: u64, set_index: usize, block: usize, width: u32) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((set_index as u64) << 32) | block as u64);
    rng.gen_range(1..1u64 << width)
}

/// `S_j = {0} ∪ {one uniform element of each digit set}`; pre-shift.
pub fn sample_family(scheme: &BlockScheme, seed: u64) -> SetFamily {
    let sets = (0..scheme.n)
        .into_par_iter()
        .map(|j| {
            let mut elements = vec![BigUint::zero()];
            elements.extend((0..scheme.blocks).map(|i| {
                scheme
                    .digit_set(i)
                    .value(draw_digit(seed, j, i, scheme.width))
            }));
            LogSparseSet::new_pre_shift(elements, RANDOM_FAMILY_C)
                .expect("one value per disjoint block is 2-log-sparse")
        })
        .collect();
    SetFamily::new(
        sets,
        Provenance::Random {
            n: scheme.n,
            eps: scheme.eps,
            seed,
        },
    )
    .expect("n ≥ 4 sets")
}

/// A union-bound series `Σ_k exp(ln_terms[k−1])`, evaluated in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    pub ln_terms: Vec<f64>,
    pub ln_sum: f64,
}

impl LogSeries {
    fn from_terms(ln_terms: Vec<f64>) -> Self {
        let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ln_sum = if peak == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            peak + ln_terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
        };
        Self { ln_terms, ln_sum }
    }

    pub fn sum(&self) -> f64 {
        self.ln_sum.exp()
    }

    pub fn below_one(&self) -> bool {
        self.ln_sum < 0.0
    }
}

/// Failure-probability bounds for a block scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionBoundReport {
    /// Uses `n^(1−ε)` as the digit-set size.
    pub paper_literal: LogSeries,
    /// Uses the exact digit-set size `2^w − 1`.
    pub substituted: LogSeries,
    /// `Σ_{k=1}^{m} (n³ · e^(−ε·n^ε))^k`.
    pub majorant: LogSeries,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    table.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        table.push(acc);
    }
    table
}

/// `ln` of term `k` of
/// `Σ_k C(m,k) · D^k · C(n, n−k+1) · (1 − 1/D)^(k(n−k+1))`.
pub fn union_bound_ln_term(n: usize, m: usize, k: usize, digits: f64, ln_fact: &[f64]) -> f64 {
    let ln_choose = |a: usize, b: usize| ln_fact[a] - ln_fact[b] - ln_fact[a - b];
    let miss = k as f64 * (n - k + 1) as f64 * (-1.0 / digits).ln_1p();
    let miss = if digits <= 1.0 {
        f64::NEG_INFINITY
    } else {
        miss
    };
    ln_choose(m, k) + k as f64 * digits.ln() + ln_choose(n, n - k + 1) + miss
}

pub fn union_bound_probability(scheme: &BlockScheme) -> UnionBoundReport {
    let (n, m) = (scheme.n, scheme.blocks);
    let eps = scheme.eps.to_f64().expect("ratio converts");
    let ln_fact = ln_factorials(n);
    let ln_n = (n as f64).ln();
    let literal_digits = ((1.0 - eps) * ln_n).exp();
    let exact_digits = ((1u64 << scheme.width) - 1) as f64;
    let series = |d: f64| {
        LogSeries::from_terms(
            (1..=m)
                .map(|k| union_bound_ln_term(n, m, k, d, &ln_fact))
                .collect(),
        )
    };
    let ratio_ln = 3.0 * ln_n - eps * (eps * ln_n).exp();
    UnionBoundReport {
        paper_literal: series(literal_digits),
        substituted: series(exact_digits),
        majorant: LogSeries::from_terms((1..=m).map(|k| k as f64 * ratio_ln).collect()),
    }
}

/// Smallest `n = 2^j` (`j ≤ max_log2`) whose exact-digit union bound is below
/// one.
pub fn smallest_n_with_bound_below_one(eps: Ratio<u64>, max_log2: u32) -> Option<usize> {
    (2..=max_log2).map(|j| 1usize << j).find(|&n| {
        make_block_scheme(n, eps)
            .map(|s| union_bound_probability(&s).substituted.below_one())
            .unwrap_or(false)
    })
}

/// Which targets a coverage sweep visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverageTargets {
    Exhaustive,
    /// Offsets into the covered interval, `[start, end)`.
    Range {
        start: BigUint,
        end: BigUint,
    },
    Sampled {
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetOutcome {
    Covered(MatchingCertificate),
    /// Blocks whose digits cannot all be matched, with their joint
    /// neighbourhood of sets.
    Uncovered(HallViolation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageFailure {
    pub target: BigUint,
    pub hall_witness: HallViolation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub targets_checked: usize,
    pub covered: usize,
    /// Sorted by target.
    pub failures: Vec<CoverageFailure>,
}

impl CoverageReport {
    pub fn fraction(&self) -> f64 {
        if self.targets_checked == 0 {
            return 1.0;
        }
        self.covered as f64 / self.targets_checked as f64
    }
}

/// Which sets hold which block digits, derived from the family's elements.
pub struct CoverageIndex<'f> {
    family: &'f SetFamily,
    layout: DigitLayout,
    holders: HashMap<(usize, u64), Vec<usize>>,
    zero_holders: Vec<usize>,
}

impl<'f> CoverageIndex<'f> {
    pub fn new(family: &'f SetFamily) -> Result<Self, CoverageError> {
        let layout = family.digit_layout().ok_or(CoverageError::NoLayout)?;
        let shift = family.per_set_shift();
        let mut holders: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
        let mut zero_holders = Vec::new();
        for (j, set) in family.sets().iter().enumerate() {
            for e in set.elements() {
                if *e < shift {
                    continue;
                }
                let v = e - &shift;
                if v.is_zero() {
                    zero_holders.push(j);
                } else if let Some(key) = layout.block_value_of(&v) {
                    holders.entry(key).or_default().push(j);
                }
            }
        }
        Ok(Self {
            family,
            layout,
            holders,
            zero_holders,
        })
    }

    pub fn layout(&self) -> DigitLayout {
        self.layout
    }

    pub fn start(&self) -> &BigUint {
        self.family.offset()
    }

    pub fn end(&self) -> BigUint {
        self.family.offset() + self.layout.range()
    }

    /// Matches the block digits of `target − offset` to sets. Zero digits
    /// are adjacent to every set holding zero.
    pub fn certify(&self, target: &BigUint) -> Result<TargetOutcome, CoverageError> {
        let out_of_range = || CoverageError::OutOfRange {
            target: target.clone(),
            start: self.start().clone(),
            end: self.end(),
        };
        if target < self.start() {
            return Err(out_of_range());
        }
        let digits = self
            .layout
            .digits(&(target - self.start()))
            .ok_or_else(out_of_range)?;
        let empty = Vec::new();
        let adjacency = digits
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if d == 0 {
                    self.zero_holders.clone()
                } else {
                    self.holders.get(&(i, d)).unwrap_or(&empty).clone()
                }
            })
            .collect();
        let graph = BipartiteGraph::new(digits.len(), self.family.n(), adjacency)
            .expect("holder indices are set indices");
        match saturating_matching(&graph) {
            Ok(matching) => {
                let certificate = MatchingCertificate {
                    target: target.clone(),
                    offset: self.start().clone(),
                    radix: self.layout.radix,
                    assignments: matching
                        .pairs()
                        .filter(|&(block, _)| digits[block] != 0)
                        .map(|(block, set_index)| Assignment {
                            block,
                            digit: digits[block],
                            set_index,
                        })
                        .collect(),
                };
                certificate.verify(self.family).map_err(|source| {
                    CoverageError::BadCertificate {
                        target: target.clone(),
                        source,
                    }
                })?;
                Ok(TargetOutcome::Covered(certificate))
            }
            Err(violation) => {
                if !violation.verify(&graph) {
                    return Err(CoverageError::BadWitness(target.clone()));
                }
                Ok(TargetOutcome::Uncovered(violation))
            }
        }
    }
}

/// Offsets (relative to the family offset) visited by `targets`.
pub(crate) fn target_offsets(
    targets: &CoverageTargets,
    layout: DigitLayout,
) -> Result<Vec<BigUint>, CoverageError> {
    let range = layout.range();
    let check = |start: &BigUint, end: &BigUint| {
        if start > end || *end > range {
            Err(CoverageError::OutOfRange {
                target: end.clone(),
                start: BigUint::zero(),
                end: range.clone(),
            })
        } else {
            Ok(())
        }
    };
    match targets {
        CoverageTargets::Exhaustive => {
            let end: u64 = range.to_u64().ok_or(CoverageError::OutOfRange {
                target: range.clone(),
                start: BigUint::zero(),
                end: BigUint::from(u64::MAX),
            })?;
            Ok((0..end).map(BigUint::from).collect())
        }
        CoverageTargets::Range { start, end } => {
            check(start, end)?;
            let mut out = Vec::new();
            let mut t = start.clone();
            while t < *end {
                out.push(t.clone());
                t += 1u32;
            }
            Ok(out)
        }
        CoverageTargets::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut out: Vec<BigUint> = (0..*count)
                .map(|_| {
                    let digits: Vec<u64> = (0..layout.blocks)
                        .map(|_| rng.gen_range(0..layout.radix))
                        .collect();
                    layout.compose(&digits)
                })
                .collect();
            out.sort_unstable();
            Ok(out)
        }
    }
}

/// Sweeps `targets`, checking every certificate and every Hall witness.
pub fn verify_coverage(
    family: &SetFamily,
    targets: &CoverageTargets,
) -> Result<CoverageReport, CoverageError> {
    let index = CoverageIndex::new(family)?;
    let offsets = target_offsets(targets, index.layout())?;
    let outcomes: Vec<(BigUint, TargetOutcome)> = offsets
        .into_par_iter()
        .map(|o| {
            let target = index.start() + o;
            index.certify(&target).map(|out| (target, out))
        })
        .collect::<Result<_, _>>()?;
    Ok(summarize(outcomes))
}

pub(crate) fn summarize(outcomes: Vec<(BigUint, TargetOutcome)>) -> CoverageReport {
    let targets_checked = outcomes.len();
    let mut failures: Vec<CoverageFailure> = outcomes
        .into_iter()
        .filter_map(|(target, outcome)| match outcome {
            TargetOutcome::Covered(_) => None,
            TargetOutcome::Uncovered(hall_witness) => Some(CoverageFailure {
                target,
                hall_witness,
            }),
        })
        .collect();
    failures.sort_by(|a, b| a.target.cmp(&b.target));
    CoverageReport {
        targets_checked,
        covered: targets_checked - failures.len(),
        failures,
    }
}
