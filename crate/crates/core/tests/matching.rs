mod common;

use common::*;
use logsparse::matching::{
    hall_check_exhaustive, max_matching, saturating_matching, BipartiteGraph,
};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = (usize, usize, Vec<Vec<usize>>)> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(l, r)| {
        (
            Just(l),
            Just(r),
            prop::collection::vec(prop::collection::vec(0..r, 0..=r), l),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matching_is_maximum((l, r, adj) in graph()) {
        let g = BipartiteGraph::new(l, r, adj.clone()).unwrap();
        let m = max_matching(&g);
        prop_assert!(m.is_valid_for(&g));
        prop_assert_eq!(m.len(), brute_matching_size(&adj, r));
    }

    #[test]
    fn konig_deficiency_formula((l, r, adj) in graph()) {
        let g = BipartiteGraph::new(l, r, adj.clone()).unwrap();
        prop_assert_eq!(l - max_matching(&g).len(), brute_deficiency(&adj));
    }

    #[test]
    fn saturating_or_verified_witness((l, r, adj) in graph()) {
        let g = BipartiteGraph::new(l, r, adj.clone()).unwrap();
        match saturating_matching(&g) {
            Ok(m) => {
                prop_assert!(m.saturates_left());
                prop_assert!(m.is_valid_for(&g));
            }
            Err(v) => {
                prop_assert!(v.verify(&g));
                // the witness is a maximum-deficiency set
                prop_assert_eq!(v.deficiency(), brute_deficiency(&adj));
            }
        }
    }

    #[test]
    fn exhaustive_audit_agrees_with_matching((l, r, adj) in graph()) {
        let g = BipartiteGraph::new(l, r, adj).unwrap();
        let audit = hall_check_exhaustive(&g, l, 1 << 20).unwrap();
        prop_assert_eq!(audit.holds(), saturating_matching(&g).is_ok());
        if let Some(w) = audit.witness {
            prop_assert!(g.neighborhood(&w).len() < w.len());
        }
    }
}

#[test]
fn budget_is_enforced() {
    let g = BipartiteGraph::new(40, 40, vec![(0..40).collect(); 40]).unwrap();
    assert!(hall_check_exhaustive(&g, 20, 1000).is_err());
}
