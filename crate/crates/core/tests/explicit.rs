mod common;

use common::*;
use logsparse::explicit::{build_condenser, build_family, DigitMode};
use logsparse::field::FieldDescriptor;
use logsparse::random::CoverageTargets;
use logsparse::verify_log_sparse;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(q: u32) -> FieldDescriptor {
    FieldDescriptor::for_order(q).unwrap()
}

#[test]
fn edge_predicate_agrees_with_neighbour_lists() {
    for q in [2, 3, 4, 5] {
        let g = build_condenser(&gf(q)).unwrap();
        for p in 0..g.poly_count() {
            let listed: Vec<usize> = g.neighbors(p).collect();
            let scanned: Vec<usize> = (0..g.point_count()).filter(|&a| g.is_edge(p, a)).collect();
            let mut sorted = listed.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, scanned);
        }
    }
}

#[test]
fn base_q_coverage_exhaustive_small() {
    for q in [3, 5] {
        let c = build_family(&gf(q), DigitMode::BaseQ)
            .unwrap()
            .shifted(&big(1))
            .unwrap();
        let report = c.verify_coverage(&CoverageTargets::Exhaustive).unwrap();
        assert_eq!(report.targets_checked as u64, (q as u64).pow(q * q / 4));
        assert_eq!(report.covered, report.targets_checked);
        for s in c.family().sets() {
            assert!(verify_log_sparse(s.elements(), 3).unwrap().is_sparse());
        }
    }
}

#[test]
fn sampled_decompositions_q8() {
    let c = build_family(&gf(8), DigitMode::Binary)
        .unwrap()
        .shifted(&big(7))
        .unwrap();
    let (start, end) = c.covered_interval();
    assert_eq!(&end - &start, BigUint::from(1u32) << 48u32);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let offset: u64 = rng.gen_range(0..1u64 << 48);
        let cert = c.decompose(&(&start + offset)).unwrap();
        cert.verify(c.family()).unwrap();
    }
    assert!(c.decompose(&end).is_err());
}

#[test]
fn binary_and_base_q_agree_numerically() {
    let a = build_family(&gf(4), DigitMode::Binary).unwrap();
    let b = build_family(&gf(4), DigitMode::BaseQ).unwrap();
    for (x, y) in a.family().sets().iter().zip(b.family().sets()) {
        assert_eq!(x.elements(), y.elements());
    }
}

#[test]
fn q4_sumset_holds_its_whole_interval() {
    use logsparse::sumset::{contains_ap, enumerate_sumset_below, DEFAULT_FRONTIER_BUDGET};
    use logsparse::ArithmeticProgression;
    let fam = build_family(&gf(4), DigitMode::Binary)
        .unwrap()
        .shifted(&big(1))
        .unwrap();
    let (start, end) = fam.covered_interval();
    assert_eq!(&end - &start, big(256));
    let sumset = enumerate_sumset_below(fam.family(), &end, DEFAULT_FRONTIER_BUDGET).unwrap();
    let ap = ArithmeticProgression::new(start, big(1), 256).unwrap();
    assert!(contains_ap(&sumset, &ap).unwrap());
}
