//! Explicit construction from quadratic polynomials over a finite field.
//!
//! The condenser graph `G_q` joins each polynomial `P(z) = a·z² + b·z + c`
//! (one of `q³` "polynomial" vertices) to the `q` points `(z, P(z))` of the
//! plane `F × F`. Two distinct quadratics agree on at most two points, which
//! forces every set of at most `⌊q²/4⌋` polynomial vertices to have at least
//! as many point neighbours, so any choice of one polynomial per `(a, b)`
//! block can be matched injectively to points.
//!
//! The family has one set per point `(x, y)`. For block `t` with coefficient
//! pair `(a, b)`, set `(x, y)` holds `idx(y − a·x² − b·x) · q^t`; together
//! with 0 these are all its elements. A target's base-`q` digit in block `t`
//! names the polynomial `P_{a,b,d}`, and a matching of those polynomials to
//! points picks a distinct set for every digit.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::certificate::{Assignment, CertificateError, MatchingCertificate};
use crate::field::{FieldDescriptor, FieldKind};
use crate::matching::{
    hall_check_exhaustive, saturating_matching, BipartiteGraph, Bits, MatchingError,
};
use crate::random::{
    summarize, target_offsets, CoverageError, CoverageReport, CoverageTargets, TargetOutcome,
};
use crate::sets::{DigitLayout, LogSparseSet, Provenance, SetFamily, SparsityError};

/// Largest field order for which the condenser graph is built.
pub const MAX_CONDENSER_ORDER: u32 = 1024;
/// Largest field order for which a family is materialised.
pub const MAX_FAMILY_ORDER: u32 = 32;
/// Field orders up to this use precomputed multiplication tables.
const TABLE_ORDER: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplicitError {
    #[error("field of order {q} is not supported here (limit {limit})")]
    UnsupportedField { q: u32, limit: u32 },
    #[error("binary mode needs a field whose order is a power of two, got {0}")]
    NotBinary(u32),
    #[error("x = {x} is outside the range 1 ≤ x ≤ (q+1)/2 for q = {q}")]
    OutOfProofRange { q: u32, x: u64 },
    #[error("x_max = {x_max} exceeds ⌊q²/4⌋ = {limit}")]
    SubsetTooLarge { x_max: usize, limit: usize },
    #[error(transparent)]
    Budget(#[from] MatchingError),
    #[error("target {target} is outside [{start}, {end})")]
    TargetOutOfRange {
        target: BigUint,
        start: BigUint,
        end: BigUint,
    },
    #[error("family provenance is not an explicit construction")]
    NotExplicit,
    #[error("family set {0} differs from the rebuilt construction")]
    FamilyMismatch(usize),
    #[error(transparent)]
    Sparsity(#[from] SparsityError),
    #[error("internal invariant violated: no saturating matching for target {target} (Hall witness {witness:?})")]
    MatchingFailed {
        target: BigUint,
        witness: Vec<usize>,
    },
    #[error("internal invariant violated: certificate for {target} rejected: {source}")]
    BadCertificate {
        target: BigUint,
        source: CertificateError,
    },
}

impl ExplicitError {
    /// Errors that can only come from a bug, never from user input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            ExplicitError::MatchingFailed { .. } | ExplicitError::BadCertificate { .. }
        )
    }
}

/// How block digits are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DigitMode {
    /// `q = 2^k`, blocks of `k` bits.
    Binary,
    /// Any `q`, base-`q` digits.
    BaseQ,
}

impl DigitMode {
    /// Sparsity constant the family is checked against after shifting.
    pub fn sparsity_c(&self) -> usize {
        match self {
            DigitMode::Binary => 2,
            DigitMode::BaseQ => 3,
        }
    }
}

impl fmt::Display for DigitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DigitMode::Binary => "binary",
            DigitMode::BaseQ => "base_q",
        })
    }
}

impl FromStr for DigitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(DigitMode::Binary),
            "base_q" | "base-q" => Ok(DigitMode::BaseQ),
            other => Err(format!(
                "unknown digit mode {other:?}; expected binary or base_q"
            )),
        }
    }
}

/// `⌊q²/4⌋`.
pub fn block_count(q: u32) -> usize {
    (q as usize * q as usize) / 4
}

/// Bipartite graph between `q³` quadratic polynomials and the `q²` points
/// of `F × F`. Edges are evaluated on demand.
#[derive(Debug, Clone)]
pub struct CondenserGraph {
    field: FieldDescriptor,
    q: u32,
    mul: Option<Vec<u32>>,
}

pub fn build_condenser(field: &FieldDescriptor) -> Result<CondenserGraph, ExplicitError> {
    let q = field.order();
    if q > MAX_CONDENSER_ORDER {
        return Err(ExplicitError::UnsupportedField {
            q,
            limit: MAX_CONDENSER_ORDER,
        });
    }
    let mul = (q <= TABLE_ORDER).then(|| {
        (0..q)
            .flat_map(|u| (0..q).map(move |v| (u, v)))
            .map(|(u, v)| field.mul_index(u, v))
            .collect()
    });
    Ok(CondenserGraph {
        field: *field,
        q,
        mul,
    })
}

impl CondenserGraph {
    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn point_count(&self) -> usize {
        (self.q as usize).pow(2)
    }

    pub fn poly_count(&self) -> usize {
        (self.q as usize).pow(3)
    }

    pub fn point_index(&self, x: u32, y: u32) -> usize {
        x as usize * self.q as usize + y as usize
    }

    pub fn point(&self, index: usize) -> (u32, u32) {
        let q = self.q as usize;
        ((index / q) as u32, (index % q) as u32)
    }

    pub fn poly_index(&self, a: u32, b: u32, c: u32) -> usize {
        let q = self.q as usize;
        (a as usize * q + b as usize) * q + c as usize
    }

    pub fn poly(&self, index: usize) -> (u32, u32, u32) {
        let q = self.q as usize;
        (
            (index / (q * q)) as u32,
            ((index / q) % q) as u32,
            (index % q) as u32,
        )
    }

    fn mul(&self, u: u32, v: u32) -> u32 {
        match &self.mul {
            Some(table) => table[u as usize * self.q as usize + v as usize],
            None => self.field.mul_index(u, v),
        }
    }

    /// `a·x² + b·x + c` on field indices.
    pub fn eval(&self, a: u32, b: u32, c: u32, x: u32) -> u32 {
        let f = &self.field;
        f.add_index(self.mul(f.add_index(self.mul(a, x), b), x), c)
    }

    /// Points `(x, P(x))` for every `x`, as point indices.
    pub fn neighbors(&self, poly: usize) -> impl Iterator<Item = usize> + '_ {
        let (a, b, c) = self.poly(poly);
        (0..self.q).map(move |x| self.point_index(x, self.eval(a, b, c, x)))
    }

    pub fn is_edge(&self, poly: usize, point: usize) -> bool {
        let (a, b, c) = self.poly(poly);
        let (x, y) = self.point(point);
        self.eval(a, b, c, x) == y
    }

    /// Number of points on both polynomials.
    pub fn common_neighbors(&self, p: usize, r: usize) -> usize {
        let (a1, b1, c1) = self.poly(p);
        let (a2, b2, c2) = self.poly(r);
        (0..self.q)
            .filter(|&x| self.eval(a1, b1, c1, x) == self.eval(a2, b2, c2, x))
            .count()
    }

    /// The whole graph, polynomials on the left.
    pub fn to_bipartite(&self) -> BipartiteGraph {
        self.induced(&(0..self.poly_count()).collect::<Vec<_>>())
    }

    /// The given polynomials on the left, all points on the right.
    pub fn induced(&self, polys: &[usize]) -> BipartiteGraph {
        let adjacency = polys.iter().map(|&p| self.neighbors(p).collect()).collect();
        BipartiteGraph::new(polys.len(), self.point_count(), adjacency)
            .expect("point indices are in range")
    }

    fn neighbor_bits(&self, poly: usize) -> Bits {
        let mut bits = Bits::new(self.point_count());
        self.neighbors(poly).for_each(|p| bits.set(p));
        bits
    }
}

/// `x·(q − x + 1)`: the neighbour count any `x` polynomial vertices are
/// guaranteed, since the `i`-th one adds at least `q − 2(i−1)` new points.
pub fn expansion_lower_bound(q: u32, x: u64) -> Result<u64, ExplicitError> {
    if x == 0 || 2 * x > q as u64 + 1 {
        return Err(ExplicitError::OutOfProofRange { q, x });
    }
    Ok(x * (q as u64 - x + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    Exhaustive { budget: u64 },
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    pub q: u32,
    pub x_max: usize,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    /// Minimum of `|N(X)| − |X|` observed.
    pub min_margin: Option<i64>,
    /// Polynomial indices of a subset with fewer neighbours than members.
    pub violation: Option<Vec<usize>>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks that polynomial subsets of size `≤ x_max` have at least as many
/// point neighbours as members.
pub fn certify_expansion(
    graph: &CondenserGraph,
    x_max: usize,
    mode: ExpansionMode,
) -> Result<ExpansionReport, ExplicitError> {
    let limit = block_count(graph.q);
    if x_max > limit {
        return Err(ExplicitError::SubsetTooLarge { x_max, limit });
    }
    match mode {
        ExpansionMode::Exhaustive { budget } => {
            let audit = hall_check_exhaustive(&graph.to_bipartite(), x_max, budget)?;
            Ok(ExpansionReport {
                q: graph.q,
                x_max,
                exhaustive: true,
                subsets_checked: audit.subsets_checked,
                min_margin: audit.min_surplus,
                violation: audit.witness,
            })
        }
        ExpansionMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let subsets: Vec<Vec<usize>> = (0..count)
                .map(|_| {
                    let size = rng.gen_range(1..=x_max.max(1));
                    let mut s = sample(&mut rng, graph.poly_count(), size).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            let margins: Vec<i64> = subsets
                .par_iter()
                .map(|subset| {
                    let mut acc = Bits::new(graph.point_count());
                    for &p in subset {
                        let bits = graph.neighbor_bits(p);
                        let prev = acc.clone();
                        acc.union_from(&prev, &bits);
                    }
                    acc.count() as i64 - subset.len() as i64
                })
                .collect();
            let violation = margins
                .iter()
                .position(|&m| m < 0)
                .map(|i| subsets[i].clone());
            Ok(ExpansionReport {
                q: graph.q,
                x_max,
                exhaustive: false,
                subsets_checked: count as u64,
                min_margin: margins.iter().copied().min(),
                violation,
            })
        }
    }
}

/// A built family together with the condenser it was derived from.
#[derive(Debug, Clone)]
pub struct ExplicitConstruction {
    condenser: CondenserGraph,
    mode: DigitMode,
    family: SetFamily,
}

pub fn build_family(
    field: &FieldDescriptor,
    mode: DigitMode,
) -> Result<ExplicitConstruction, ExplicitError> {
    let q = field.order();
    if q > MAX_FAMILY_ORDER {
        return Err(ExplicitError::UnsupportedField {
            q,
            limit: MAX_FAMILY_ORDER,
        });
    }
    if mode == DigitMode::Binary && !q.is_power_of_two() {
        return Err(ExplicitError::NotBinary(q));
    }
    let condenser = build_condenser(field)?;
    let layout = DigitLayout {
        radix: q as u64,
        blocks: block_count(q),
    };
    let bases: Vec<BigUint> = (0..layout.blocks).map(|t| layout.block_base(t)).collect();
    let sets = (0..condenser.point_count())
        .into_par_iter()
        .map(|point| {
            let (x, y) = condenser.point(point);
            let mut elements = vec![BigUint::zero()];
            for (t, base) in bases.iter().enumerate() {
                let (a, b) = block_pair(q, t);
                // y − (a·x² + b·x), i.e. the c with P_{a,b,c}(x) = y
                let digit = field.sub_index(y, condenser.eval(a, b, 0, x));
                if digit != 0 {
                    elements.push(base * digit);
                }
            }
            LogSparseSet::new_pre_shift(elements, mode.sparsity_c())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let family = SetFamily::new(
        sets,
        Provenance::Explicit {
            field: *field,
            mode,
        },
    )
    .expect("q² sets for an explicit provenance");
    Ok(ExplicitConstruction {
        condenser,
        mode,
        family,
    })
}

/// Coefficient pair `(a, b)` of block `t`: the `t`-th pair in lexicographic
/// order.
pub fn block_pair(q: u32, t: usize) -> (u32, u32) {
    ((t / q as usize) as u32, (t % q as usize) as u32)
}

impl ExplicitConstruction {
    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn into_family(self) -> SetFamily {
        self.family
    }

    pub fn condenser(&self) -> &CondenserGraph {
        &self.condenser
    }

    pub fn mode(&self) -> DigitMode {
        self.mode
    }

    pub fn layout(&self) -> DigitLayout {
        DigitLayout {
            radix: self.condenser.q as u64,
            blocks: block_count(self.condenser.q),
        }
    }

    /// Targets covered: `[offset, offset + q^⌊q²/4⌋)`.
    pub fn covered_interval(&self) -> (BigUint, BigUint) {
        let start = self.family.offset().clone();
        let end = &start + self.layout().range();
        (start, end)
    }

    pub fn shifted(&self, amount: &BigUint) -> Result<Self, ExplicitError> {
        Ok(Self {
            condenser: self.condenser.clone(),
            mode: self.mode,
            family: self.family.shifted(amount)?,
        })
    }

    /// Rebuilds the construction named by `family`'s provenance and checks
    /// the sets agree.
    pub fn from_family(family: &SetFamily) -> Result<Self, ExplicitError> {
        let Provenance::Explicit { field, mode } = family.provenance() else {
            return Err(ExplicitError::NotExplicit);
        };
        let rebuilt = build_family(field, *mode)?.shifted(&family.per_set_shift())?;
        if let Some(j) = (0..family.n())
            .find(|&j| rebuilt.family.sets()[j].elements() != family.sets()[j].elements())
        {
            return Err(ExplicitError::FamilyMismatch(j));
        }
        Ok(rebuilt)
    }

    /// Certificate that `target` lies in the sumset: one matched point (set)
    /// per nonzero block digit.
    pub fn decompose(&self, target: &BigUint) -> Result<MatchingCertificate, ExplicitError> {
        let (start, end) = self.covered_interval();
        let out_of_range = || ExplicitError::TargetOutOfRange {
            target: target.clone(),
            start: start.clone(),
            end: end.clone(),
        };
        if *target < start {
            return Err(out_of_range());
        }
        let layout = self.layout();
        let digits = layout.digits(&(target - &start)).ok_or_else(out_of_range)?;
        let q = self.condenser.q;
        let polys: Vec<usize> = digits
            .iter()
            .enumerate()
            .map(|(t, &d)| {
                let (a, b) = block_pair(q, t);
                self.condenser.poly_index(a, b, d as u32)
            })
            .collect();
        let graph = self.condenser.induced(&polys);
        let matching = saturating_matching(&graph).map_err(|v| ExplicitError::MatchingFailed {
            target: target.clone(),
            witness: v.left,
        })?;
        let certificate = MatchingCertificate {
            target: target.clone(),
            offset: start,
            radix: layout.radix,
            assignments: matching
                .pairs()
                .filter(|&(t, _)| digits[t] != 0)
                .map(|(t, point)| Assignment {
                    block: t,
                    digit: digits[t],
                    set_index: point,
                })
                .collect(),
        };
        certificate
            .verify(&self.family)
            .map_err(|source| ExplicitError::BadCertificate {
                target: target.clone(),
                source,
            })?;
        Ok(certificate)
    }

    /// Runs [`ExplicitConstruction::decompose`] over `targets`.
    pub fn verify_coverage(
        &self,
        targets: &CoverageTargets,
    ) -> Result<CoverageReport, ExplicitError> {
        let offsets = target_offsets(targets, self.layout()).map_err(|e| match e {
            CoverageError::OutOfRange { target, start, end } => {
                ExplicitError::TargetOutOfRange { target, start, end }
            }
            other => unreachable!("target generation only fails on range: {other}"),
        })?;
        let start = self.family.offset();
        let outcomes = offsets
            .into_par_iter()
            .map(|o| {
                let target = start + o;
                self.decompose(&target)
                    .map(|c| (target, TargetOutcome::Covered(c)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(summarize(outcomes))
    }
}

/// Field kind label used in reports.
pub fn field_kind_name(field: &FieldDescriptor) -> &'static str {
    match field.kind() {
        FieldKind::Prime { .. } => "prime",
        FieldKind::Binary { .. } => "binary",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> FieldDescriptor {
        FieldDescriptor::for_order(q).unwrap()
    }

    #[test]
    fn smallest_condenser() {
        let g = build_condenser(&gf(2)).unwrap();
        assert_eq!(g.point_count(), 4);
        assert_eq!(g.poly_count(), 8);
        for p in 0..g.poly_count() {
            let mut n: Vec<usize> = g.neighbors(p).collect();
            n.sort_unstable();
            n.dedup();
            assert_eq!(n.len(), 2);
        }
    }

    #[test]
    fn lower_bound_formula() {
        assert_eq!(expansion_lower_bound(5, 2).unwrap(), 8);
        assert_eq!(expansion_lower_bound(3, 1).unwrap(), 3);
        assert!(expansion_lower_bound(5, 4).is_err());
        assert!(expansion_lower_bound(5, 0).is_err());
    }

    #[test]
    fn q2_family_covers_zero_and_one() {
        let c = build_family(&gf(2), DigitMode::Binary).unwrap();
        assert_eq!(c.family().n(), 4);
        assert_eq!(c.layout().blocks, 1);
        assert_eq!(c.covered_interval().1, BigUint::from(2u32));
        for t in 0..2u32 {
            c.decompose(&BigUint::from(t)).unwrap();
        }
    }

    #[test]
    fn binary_mode_needs_power_of_two() {
        assert_eq!(
            build_family(&gf(3), DigitMode::Binary).unwrap_err(),
            ExplicitError::NotBinary(3)
        );
        assert!(build_family(&gf(3), DigitMode::BaseQ).is_ok());
    }

    #[test]
    fn offset_target_has_empty_certificate() {
        let c = build_family(&gf(4), DigitMode::Binary)
            .unwrap()
            .shifted(&BigUint::from(1u32))
            .unwrap();
        let cert = c.decompose(&BigUint::from(16u32)).unwrap();
        assert!(cert.assignments.is_empty());
        assert!(c.decompose(&BigUint::from(15u32)).is_err());
        assert!(c.decompose(&BigUint::from(16u32 + 256)).is_err());
    }

    #[test]
    fn rebuild_from_family() {
        let c = build_family(&gf(4), DigitMode::Binary)
            .unwrap()
            .shifted(&BigUint::from(1u32))
            .unwrap();
        let again = ExplicitConstruction::from_family(c.family()).unwrap();
        assert_eq!(again.family(), c.family());
    }

    #[test]
    fn subset_limit() {
        let g = build_condenser(&gf(3)).unwrap();
        assert!(matches!(
            certify_expansion(&g, 3, ExpansionMode::Sampled { count: 1, seed: 0 }),
            Err(ExplicitError::SubsetTooLarge { .. })
        ));
    }
}
