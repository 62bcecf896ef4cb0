mod common;

use common::*;
use logsparse::random::{
    make_block_scheme, sample_family, union_bound_probability, verify_coverage, CoverageTargets,
};
use logsparse::verify_log_sparse;
use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rational(r: &BigRational) -> f64 {
    ln_big(&r.numer().to_biguint().unwrap()) - ln_big(&r.denom().to_biguint().unwrap())
}

fn choose(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Term `k` of the union bound computed in exact rational arithmetic with an
/// integer digit count `d`.
fn exact_term(n: u64, m: u64, k: u64, d: u64) -> BigRational {
    let int = |x: BigUint| BigRational::from_integer(x.into());
    let miss = BigRational::new((d - 1).into(), d.into());
    let e = (k * (n - k + 1)) as i32;
    int(choose(m, k))
        * int(BigUint::from(d).pow(k as u32))
        * int(choose(n, n - k + 1))
        * miss.pow(e)
}

#[test]
fn union_bound_terms_match_exact_arithmetic() {
    for n in [16u64, 64] {
        let scheme = make_block_scheme(n as usize, Ratio::new(1, 2)).unwrap();
        let report = union_bound_probability(&scheme);
        let m = scheme.blocks() as u64;
        let literal = (n as f64).sqrt() as u64;
        let exact = (1u64 << scheme.width()) - 1;
        for (series, d) in [
            (&report.paper_literal, literal),
            (&report.substituted, exact),
        ] {
            for k in 1..=m {
                let want = ln_rational(&exact_term(n, m, k, d));
                let got = series.ln_terms[k as usize - 1];
                let rel = ((got - want) / want.abs().max(1.0)).abs();
                assert!(rel < 1e-9, "n={n} d={d} k={k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn random_families_are_deterministic_and_sparse() {
    let scheme = make_block_scheme(32, Ratio::new(1, 4)).unwrap();
    let a = sample_family(&scheme, 9);
    assert_eq!(a, sample_family(&scheme, 9));
    assert_ne!(a, sample_family(&scheme, 10));
    let shifted = a.shifted(&big(1)).unwrap();
    for s in shifted.sets() {
        assert!(verify_log_sparse(s.elements(), 2).unwrap().is_sparse());
    }
}

proptest! {
    #[test]
    fn digit_layout_roundtrip(n in 4usize..2000, num in 1u64..10, seed: u64) {
        let eps = Ratio::new(num, 10);
        let scheme = make_block_scheme(n, eps).unwrap();
        let layout = scheme.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let digits: Vec<u64> = (0..layout.blocks).map(|_| rng.gen_range(0..layout.radix)).collect();
            let value = layout.compose(&digits);
            prop_assert!(value < layout.range());
            prop_assert_eq!(layout.digits(&value).unwrap(), digits);
        }
    }

    #[test]
    fn block_budget_fits_the_range(n in 4usize..5000, num in 1u64..10) {
        let eps = Ratio::new(num, 10);
        let scheme = make_block_scheme(n, eps).unwrap();
        // only meaningful where the floor already gives w ≥ 1
        let f = 1.0 - num as f64 / 10.0;
        if (f * (n as f64).log2()).floor() >= 1.0 {
            let lhs = scheme.width() as f64 * scheme.blocks() as f64;
            let rhs = f * f * n as f64 * (n as f64).log2();
            prop_assert!(lhs <= rhs + 1e-9);
        }
    }
}

#[test]
fn digit_roundtrip_ten_thousand_targets() {
    let scheme = make_block_scheme(16, Ratio::new(1, 2)).unwrap();
    let layout = scheme.layout();
    for t in 0..10_000u64 {
        let d = layout.digits(&big(t)).unwrap();
        assert_eq!(layout.compose(&d), big(t));
    }
}

#[test]
fn coverage_is_monotone_under_deletion() {
    let scheme = make_block_scheme(16, Ratio::new(1, 2)).unwrap();
    let family = sample_family(&scheme, 42).shifted(&big(1)).unwrap();
    let targets = CoverageTargets::Sampled {
        count: 2000,
        seed: 3,
    };
    let before = verify_coverage(&family, &targets).unwrap();
    let mut sets = family.sets().to_vec();
    let mut elements = sets[5].elements().to_vec();
    elements.remove(3);
    sets[5] = logsparse::LogSparseSet::new(elements, 2).unwrap();
    let thinner = logsparse::SetFamily::with_offset(
        sets,
        family.provenance().clone(),
        family.offset().clone(),
    )
    .unwrap();
    let after = verify_coverage(&thinner, &targets).unwrap();
    assert!(after.covered <= before.covered);
    for f in &before.failures {
        assert!(
            after.failures.iter().any(|g| g.target == f.target),
            "{} recovered",
            f.target
        );
    }
}
