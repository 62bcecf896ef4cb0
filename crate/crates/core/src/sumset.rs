//! Bounded sumset enumeration and exact membership.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::sets::{ArithmeticProgression, SetFamily};

/// Default cap on the number of partial sums held at once.
pub const DEFAULT_FRONTIER_BUDGET: usize = 1 << 24;

/// Failed `(level, remainder)` states remembered by [`membership`].
const MEMO_LIMIT: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumsetError {
    #[error("frontier reached {reached} partial sums while folding set {set_index}, over the budget of {budget}")]
    BudgetExceeded {
        reached: usize,
        set_index: usize,
        budget: usize,
    },
    #[error("progression ends at {last}, beyond the enumeration bound {bound}")]
    OutOfRange { last: BigUint, bound: BigUint },
}

/// All sums `x₁ + … + x_n ≤ bound` with `x_i ∈ S_i`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedSumset {
    bound: BigUint,
    members: Vec<BigUint>,
}

impl BoundedSumset {
    pub fn bound(&self) -> &BigUint {
        &self.bound
    }

    pub fn members(&self) -> &[BigUint] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        self.members.binary_search(x).is_ok()
    }

    /// The members not exceeding `bound`.
    pub fn restrict(&self, bound: &BigUint) -> BoundedSumset {
        let end = self.members.partition_point(|m| m <= bound);
        BoundedSumset {
            bound: bound.clone().min(self.bound.clone()),
            members: self.members[..end].to_vec(),
        }
    }
}

/// Folds the sets one at a time, keeping only partial sums whose cheapest
/// completion still fits under `bound`.
pub fn enumerate_sumset_below(
    family: &SetFamily,
    bound: &BigUint,
    budget: usize,
) -> Result<BoundedSumset, SumsetError> {
    let sets = family.sets();
    // Minimal completion cost for everything after set i.
    let mut tail_min = vec![BigUint::zero(); sets.len() + 1];
    for i in (0..sets.len()).rev() {
        let m = sets[i].min().cloned().unwrap_or_default();
        tail_min[i] = &tail_min[i + 1] + m;
    }
    if sets.iter().any(|s| s.is_empty()) || tail_min[0] > *bound {
        return Ok(BoundedSumset {
            bound: bound.clone(),
            members: Vec::new(),
        });
    }

    let mut frontier = vec![BigUint::zero()];
    for (i, set) in sets.iter().enumerate() {
        let mut next = Vec::with_capacity(frontier.len() * set.len());
        for partial in &frontier {
            for x in set.elements() {
                let s = partial + x;
                if &s + &tail_min[i + 1] > *bound {
                    // elements are increasing
                    break;
                }
                next.push(s);
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.len() > budget {
            return Err(SumsetError::BudgetExceeded {
                reached: next.len(),
                set_index: i,
                budget,
            });
        }
        frontier = next;
    }
    Ok(BoundedSumset {
        bound: bound.clone(),
        members: frontier,
    })
}

struct Search<'a> {
    family: &'a SetFamily,
    tail_min: Vec<BigUint>,
    tail_max: Vec<BigUint>,
    failed: HashSet<(usize, BigUint)>,
    picks: Vec<BigUint>,
}

impl Search<'_> {
    fn go(&mut self, level: usize, remaining: &BigUint) -> bool {
        if level == self.family.n() {
            return remaining.is_zero();
        }
        if *remaining < self.tail_min[level] || *remaining > self.tail_max[level] {
            return false;
        }
        if self.failed.contains(&(level, remaining.clone())) {
            return false;
        }
        let sets = self.family.sets();
        for x in sets[level].elements() {
            if x > remaining {
                break;
            }
            let rest = remaining - x;
            if rest < self.tail_min[level + 1] {
                break;
            }
            self.picks.push(x.clone());
            if self.go(level + 1, &rest) {
                return true;
            }
            self.picks.pop();
        }
        if self.failed.len() < MEMO_LIMIT {
            self.failed.insert((level, remaining.clone()));
        }
        false
    }
}

/// One element per set summing to `target`, or `None` when no such choice
/// exists.
///
/// Sets are searched in family order and each set in increasing order, so the
/// representation returned is the lexicographically smallest one.
pub fn membership(family: &SetFamily, target: &BigUint) -> Option<Vec<BigUint>> {
    let sets = family.sets();
    let n = sets.len();
    let mut tail_min = vec![BigUint::zero(); n + 1];
    let mut tail_max = vec![BigUint::zero(); n + 1];
    for i in (0..n).rev() {
        tail_min[i] = &tail_min[i + 1] + sets[i].min()?;
        tail_max[i] = &tail_max[i + 1] + sets[i].max()?;
    }
    let mut search = Search {
        family,
        tail_min,
        tail_max,
        failed: HashSet::new(),
        picks: Vec::with_capacity(n),
    };
    if !search.go(0, target) {
        return None;
    }
    let rep = search.picks;
    let total: BigUint = rep.iter().sum();
    assert_eq!(&total, target, "representation must sum to its target");
    assert!(
        rep.iter().zip(sets).all(|(x, s)| s.contains(x)),
        "representation must draw each term from its own set"
    );
    Some(rep)
}

/// True iff every term of `ap` lies in `sumset`.
pub fn contains_ap(
    sumset: &BoundedSumset,
    ap: &ArithmeticProgression,
) -> Result<bool, SumsetError> {
    let last = ap.last();
    if last > sumset.bound {
        return Err(SumsetError::OutOfRange {
            last,
            bound: sumset.bound.clone(),
        });
    }
    Ok(ap.elements().all(|x| sumset.contains(&x)))
}
