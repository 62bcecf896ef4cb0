//! Shared domain types: log-sparse sets, set families and arithmetic
//! progressions, plus the dyadic-window sparsity verifier.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::explicit::DigitMode;
use crate::field::FieldDescriptor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparsityError {
    #[error("elements are not strictly increasing at position {position}")]
    NotIncreasing { position: usize },
    #[error(
        "element at position {position} is zero; log-sparse sets contain positive integers only"
    )]
    ZeroElement { position: usize },
    #[error("sparsity constant C must be at least 1")]
    ZeroConstant,
    #[error("window [{}, {}) holds {} elements, more than C = {c}", .window.start, .window.end(), .window.count)]
    Violated { window: DyadicWindow, c: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("a family needs at least one set")]
    Empty,
    #[error("explicit family over a field of order {q} needs {expected} sets, got {actual}")]
    WrongSize {
        q: u32,
        expected: usize,
        actual: usize,
    },
    #[error("offset {offset} is not a multiple of the family size {n}")]
    UnevenOffset { offset: BigUint, n: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgressionError {
    #[error("progression step must be at least 1")]
    ZeroStep,
    #[error("progression length must be at least 1")]
    ZeroLength,
}

/// A dyadic window `[start, 2·start)` together with the number of set
/// elements it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicWindow {
    pub start: BigUint,
    pub count: usize,
}

impl DyadicWindow {
    pub fn end(&self) -> BigUint {
        &self.start << 1u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityReport {
    pub c: usize,
    /// The window anchored at the smallest element whose load exceeds `c`.
    pub witness: Option<DyadicWindow>,
}

impl SparsityReport {
    pub fn is_sparse(&self) -> bool {
        self.witness.is_none()
    }
}

fn check_positive_increasing(elements: &[BigUint]) -> Result<(), SparsityError> {
    for (position, e) in elements.iter().enumerate() {
        if e.is_zero() {
            return Err(SparsityError::ZeroElement { position });
        }
        if position > 0 && elements[position - 1] >= *e {
            return Err(SparsityError::NotIncreasing { position });
        }
    }
    Ok(())
}

/// Element-anchored window loads: entry `i` is `|elements ∩ [e_i, 2e_i)|`.
///
/// Every window `[x, 2x)` can be slid right until its left endpoint is an
/// element without losing any element, so these loads dominate all windows.
fn anchored_loads(elements: &[BigUint]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let mut hi = 0;
    (0..elements.len()).map(move |i| {
        let limit = &elements[i] << 1u32;
        hi = hi.max(i);
        while hi < elements.len() && elements[hi] < limit {
            hi += 1;
        }
        (i, hi - i)
    })
}

/// Checks that every dyadic window `[x, 2x)` with `x ≥ 1` holds at most `c`
/// elements of the strictly increasing, positive sequence `elements`.
pub fn verify_log_sparse(elements: &[BigUint], c: usize) -> Result<SparsityReport, SparsityError> {
    if c == 0 {
        return Err(SparsityError::ZeroConstant);
    }
    check_positive_increasing(elements)?;
    let witness = anchored_loads(elements)
        .find(|&(_, load)| load > c)
        .map(|(i, count)| DyadicWindow {
            start: elements[i].clone(),
            count,
        });
    Ok(SparsityReport { c, witness })
}

/// The smallest `C` for which `elements` is `C`-log-sparse (0 for the empty
/// sequence).
pub fn max_window_load(elements: &[BigUint]) -> Result<usize, SparsityError> {
    check_positive_increasing(elements)?;
    Ok(anchored_loads(elements).map(|(_, l)| l).max().unwrap_or(0))
}

/// A finite set of non-negative integers with at most `sparsity_c` positive
/// elements in every dyadic window.
///
/// Zero is only admitted for pre-shift members of a constructed family; the
/// public form produced by [`SetFamily::shifted`] with a positive amount is
/// zero-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogSparseSet {
    elements: Vec<BigUint>,
    sparsity_c: usize,
    pre_shift: bool,
}

impl LogSparseSet {
    pub fn new(elements: Vec<BigUint>, sparsity_c: usize) -> Result<Self, SparsityError> {
        Self::validate(&elements, sparsity_c)?;
        Ok(Self {
            elements,
            sparsity_c,
            pre_shift: false,
        })
    }

    /// Like [`LogSparseSet::new`] but allows a leading 0, which the sparsity
    /// check ignores.
    pub fn new_pre_shift(elements: Vec<BigUint>, sparsity_c: usize) -> Result<Self, SparsityError> {
        let positive = match elements.first() {
            Some(first) if first.is_zero() => &elements[1..],
            _ => &elements[..],
        };
        Self::validate(positive, sparsity_c)?;
        let pre_shift = positive.len() != elements.len();
        Ok(Self {
            elements,
            sparsity_c,
            pre_shift,
        })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(
        mut elements: Vec<BigUint>,
        sparsity_c: usize,
    ) -> Result<Self, SparsityError> {
        elements.sort_unstable();
        elements.dedup();
        Self::new_pre_shift(elements, sparsity_c)
    }

    fn validate(positive: &[BigUint], c: usize) -> Result<(), SparsityError> {
        let report = verify_log_sparse(positive, c)?;
        match report.witness {
            None => Ok(()),
            Some(window) => Err(SparsityError::Violated { window, c }),
        }
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn sparsity_c(&self) -> usize {
        self.sparsity_c
    }

    /// True when the set still contains 0.
    pub fn is_pre_shift(&self) -> bool {
        self.pre_shift
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        self.elements.binary_search(value).is_ok()
    }

    pub fn min(&self) -> Option<&BigUint> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&BigUint> {
        self.elements.last()
    }

    /// Adds `amount` to every element and re-verifies sparsity with the same
    /// constant.
    pub fn shifted(&self, amount: &BigUint) -> Result<Self, SparsityError> {
        if amount.is_zero() {
            return Ok(self.clone());
        }
        let elements = self.elements.iter().map(|e| e + amount).collect();
        Self::new(elements, self.sparsity_c)
    }
}

/// How the block digits of a constructed family are laid out: block `i`
/// holds values `d·radix^i` with `0 < d < radix`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitLayout {
    pub radix: u64,
    pub blocks: usize,
}

impl DigitLayout {
    pub fn block_base(&self, block: usize) -> BigUint {
        num_traits::pow(BigUint::from(self.radix), block)
    }

    /// `radix^blocks`, the size of the interval every target digit vector
    /// addresses.
    pub fn range(&self) -> BigUint {
        self.block_base(self.blocks)
    }

    /// Base-`radix` digits of `value`, least significant block first, or
    /// `None` when `value ≥ range()`.
    pub fn digits(&self, value: &BigUint) -> Option<Vec<u64>> {
        let radix = BigUint::from(self.radix);
        let mut rest = value.clone();
        let mut out = Vec::with_capacity(self.blocks);
        for _ in 0..self.blocks {
            let (q, r) = rest.div_rem(&radix);
            out.push(r.try_into().expect("digit below radix fits u64"));
            rest = q;
        }
        rest.is_zero().then_some(out)
    }

    pub fn compose(&self, digits: &[u64]) -> BigUint {
        let radix = BigUint::from(self.radix);
        digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &radix + BigUint::from(d))
    }

    /// Inverse of `d·radix^block` for a single nonzero block value.
    pub fn block_value_of(&self, value: &BigUint) -> Option<(usize, u64)> {
        let digits = self.digits(value)?;
        let mut nonzero = digits.iter().enumerate().filter(|(_, &d)| d != 0);
        let (block, &digit) = nonzero.next()?;
        nonzero.next().is_none().then_some((block, digit))
    }
}

/// Where a family came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Explicit {
        field: FieldDescriptor,
        mode: DigitMode,
    },
    Random {
        n: usize,
        eps: Ratio<u64>,
        seed: u64,
    },
    Manual,
}

impl Provenance {
    /// Block layout implied by the construction, if any.
    pub fn digit_layout(&self) -> Option<DigitLayout> {
        match self {
            Provenance::Explicit { field, .. } => {
                let q = field.order();
                Some(DigitLayout {
                    radix: q as u64,
                    blocks: crate::explicit::block_count(q),
                })
            }
            Provenance::Random { n, eps, .. } => crate::random::make_block_scheme(*n, *eps)
                .ok()
                .map(|s| s.layout()),
            Provenance::Manual => None,
        }
    }
}

/// An ordered list of `n` log-sparse sets. `offset` records the total
/// translation of the sumset caused by shifting every set by `offset / n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    sets: Vec<LogSparseSet>,
    provenance: Provenance,
    offset: BigUint,
}

impl SetFamily {
    pub fn new(sets: Vec<LogSparseSet>, provenance: Provenance) -> Result<Self, FamilyError> {
        Self::with_offset(sets, provenance, BigUint::zero())
    }

    pub fn with_offset(
        sets: Vec<LogSparseSet>,
        provenance: Provenance,
        offset: BigUint,
    ) -> Result<Self, FamilyError> {
        if sets.is_empty() {
            return Err(FamilyError::Empty);
        }
        if let Provenance::Explicit { field, .. } = &provenance {
            let q = field.order();
            let expected = (q as usize) * (q as usize);
            if sets.len() != expected {
                return Err(FamilyError::WrongSize {
                    q,
                    expected,
                    actual: sets.len(),
                });
            }
        }
        if !offset.is_multiple_of(&BigUint::from(sets.len())) {
            return Err(FamilyError::UnevenOffset {
                offset,
                n: sets.len(),
            });
        }
        Ok(Self {
            sets,
            provenance,
            offset,
        })
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[LogSparseSet] {
        &self.sets
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    /// The amount each individual set has been shifted by.
    pub fn per_set_shift(&self) -> BigUint {
        &self.offset / BigUint::from(self.n())
    }

    pub fn is_pre_shift(&self) -> bool {
        self.sets.iter().any(LogSparseSet::is_pre_shift)
    }

    pub fn digit_layout(&self) -> Option<DigitLayout> {
        self.provenance.digit_layout()
    }

    /// Translates every set by `amount`; the sumset moves by `n·amount`.
    pub fn shifted(&self, amount: &BigUint) -> Result<SetFamily, SparsityError> {
        let sets = self
            .sets
            .iter()
            .map(|s| s.shifted(amount))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SetFamily {
            sets,
            provenance: self.provenance.clone(),
            offset: &self.offset + amount * BigUint::from(self.n()),
        })
    }
}

pub fn shift_family(family: &SetFamily, amount: &BigUint) -> Result<SetFamily, SparsityError> {
    family.shifted(amount)
}

/// `first, first + step, …` with `length` terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArithmeticProgression {
    first: BigUint,
    step: BigUint,
    length: usize,
}

impl ArithmeticProgression {
    pub fn new(first: BigUint, step: BigUint, length: usize) -> Result<Self, ProgressionError> {
        if step.is_zero() {
            return Err(ProgressionError::ZeroStep);
        }
        if length == 0 {
            return Err(ProgressionError::ZeroLength);
        }
        Ok(Self {
            first,
            step,
            length,
        })
    }

    pub fn first(&self) -> &BigUint {
        &self.first
    }

    pub fn step(&self) -> &BigUint {
        &self.step
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// `step · (length − 1)`.
    pub fn spread(&self) -> BigUint {
        &self.step * BigUint::from(self.length - 1)
    }

    pub fn last(&self) -> BigUint {
        &self.first + self.spread()
    }

    pub fn elements(&self) -> impl Iterator<Item = BigUint> + '_ {
        let mut next = self.first.clone();
        (0..self.length).map(move |_| {
            let current = next.clone();
            next += &self.step;
            current
        })
    }

    /// Position of `value` in the progression, if it is a term.
    pub fn index_of(&self, value: &BigUint) -> Option<usize> {
        if *value < self.first {
            return None;
        }
        let (k, r) = (value - &self.first).div_rem(&self.step);
        if !r.is_zero() {
            return None;
        }
        let k: usize = k.try_into().ok()?;
        (k < self.length).then_some(k)
    }

    pub fn translated(&self, by: &BigUint) -> Self {
        Self {
            first: &self.first + by,
            ..self.clone()
        }
    }
}

impl fmt::Display for ArithmeticProgression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(first={}, step={}, length={})",
            self.first, self.step, self.length
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn one() -> BigUint {
        BigUint::one()
    }

    fn v(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().copied().map(big).collect()
    }

    #[test]
    fn powers_of_two_are_one_sparse() {
        let r = verify_log_sparse(&v(&[1, 2, 4, 8, 16]), 1).unwrap();
        assert!(r.is_sparse());
    }

    #[test]
    fn three_in_one_window_is_caught() {
        let r = verify_log_sparse(&v(&[3, 4, 5]), 2).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.start, big(3));
        assert_eq!(w.end(), big(6));
        assert_eq!(w.count, 3);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert_eq!(
            verify_log_sparse(&v(&[2, 2]), 3),
            Err(SparsityError::NotIncreasing { position: 1 })
        );
        assert_eq!(
            verify_log_sparse(&v(&[0, 2]), 3),
            Err(SparsityError::ZeroElement { position: 0 })
        );
        assert_eq!(
            verify_log_sparse(&v(&[1]), 0),
            Err(SparsityError::ZeroConstant)
        );
    }

    #[test]
    fn pre_shift_sets_ignore_zero() {
        let s = LogSparseSet::new_pre_shift(v(&[0, 2, 4]), 1).unwrap();
        assert!(s.is_pre_shift());
        assert!(LogSparseSet::new(v(&[0, 2, 4]), 1).is_err());
    }

    #[test]
    fn shift_adds_elementwise_and_tracks_offset() {
        let sets = vec![
            LogSparseSet::new_pre_shift(v(&[0, 2]), 2).unwrap(),
            LogSparseSet::new_pre_shift(v(&[0, 4]), 2).unwrap(),
        ];
        let fam = SetFamily::new(sets, Provenance::Manual).unwrap();
        let shifted = fam.shifted(&big(1)).unwrap();
        assert_eq!(shifted.sets()[0].elements(), &v(&[1, 3])[..]);
        assert_eq!(shifted.sets()[1].elements(), &v(&[1, 5])[..]);
        assert_eq!(shifted.offset(), &big(2));
        assert!(!shifted.is_pre_shift());
        assert_eq!(fam.shifted(&BigUint::zero()).unwrap(), fam);
    }

    #[test]
    fn shift_that_breaks_sparsity_is_an_error() {
        // {0,1,2} shifted by one is {1,2,3}; [2,4) then holds two elements.
        let s = LogSparseSet::new_pre_shift(v(&[0, 1, 2]), 1).unwrap();
        assert!(matches!(
            s.shifted(&big(1)),
            Err(SparsityError::Violated { .. })
        ));
    }

    #[test]
    fn progression_elements() {
        let ap = ArithmeticProgression::new(big(5), big(3), 4).unwrap();
        assert_eq!(ap.elements().collect::<Vec<_>>(), v(&[5, 8, 11, 14]));
        let single = ArithmeticProgression::new(big(0), big(1), 1).unwrap();
        assert_eq!(single.elements().collect::<Vec<_>>(), v(&[0]));
        assert_eq!(ap.index_of(&big(11)), Some(2));
        assert_eq!(ap.index_of(&big(17)), None);
        assert_eq!(ap.index_of(&big(12)), None);
        assert!(ArithmeticProgression::new(big(0), big(0), 3).is_err());
        assert!(ArithmeticProgression::new(big(0), big(1), 0).is_err());
    }

    #[test]
    fn power_plus_offset_progression() {
        // S = {2^a + b : 1 ≤ b ≤ a} holds 2^k+1, …, 2^k+k.
        for k in 1..12u32 {
            let ap = ArithmeticProgression::new((BigUint::one() << k) + 1u32, one(), k as usize)
                .unwrap();
            let members: Vec<BigUint> = ap.elements().collect();
            assert_eq!(members.len(), k as usize);
            for (b, m) in (1..=k).zip(&members) {
                assert_eq!(*m, (BigUint::one() << k) + b);
            }
        }
    }

    #[test]
    fn digit_layout_roundtrip() {
        let layout = DigitLayout {
            radix: 4,
            blocks: 4,
        };
        assert_eq!(layout.range(), big(256));
        let d = layout.digits(&big(173)).unwrap();
        assert_eq!(d, vec![1, 3, 2, 2]);
        assert_eq!(layout.compose(&d), big(173));
        assert!(layout.digits(&big(256)).is_none());
        assert_eq!(layout.block_value_of(&big(48)), Some((2, 3)));
        assert_eq!(layout.block_value_of(&big(49)), None);
        assert_eq!(layout.block_value_of(&big(0)), None);
    }
}
