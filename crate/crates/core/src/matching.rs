//! Maximum bipartite matching, Hall-violation extraction and exhaustive
//! Hall audits.

use thiserror::Error;

/// Default cap on the number of subsets [`hall_check_exhaustive`] may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("left vertex {left} is adjacent to right vertex {right}, but only {right_count} right vertices exist")]
    EdgeOutOfRange {
        left: usize,
        right: usize,
        right_count: usize,
    },
    #[error("adjacency lists for {lists} left vertices given, expected {left_count}")]
    AdjacencyLength { lists: usize, left_count: usize },
    #[error("exhaustive Hall check needs {required} subsets, over the budget of {budget}; use a matching instead")]
    BudgetExceeded { required: u128, budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Adjacency lists are sorted and deduplicated.
    pub fn new(
        left_count: usize,
        right_count: usize,
        mut adjacency: Vec<Vec<usize>>,
    ) -> Result<Self, MatchingError> {
        if adjacency.len() != left_count {
            return Err(MatchingError::AdjacencyLength {
                lists: adjacency.len(),
                left_count,
            });
        }
        for (left, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if let Some(&right) = list.last().filter(|&&r| r >= right_count) {
                return Err(MatchingError::EdgeOutOfRange {
                    left,
                    right,
                    right_count,
                });
            }
        }
        Ok(Self {
            left_count,
            right_count,
            adjacency,
        })
    }

    pub fn from_edges(
        left_count: usize,
        right_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, MatchingError> {
        let mut adjacency = vec![Vec::new(); left_count];
        for (l, r) in edges {
            if l >= left_count {
                return Err(MatchingError::AdjacencyLength {
                    lists: l + 1,
                    left_count,
                });
            }
            adjacency[l].push(r);
        }
        Self::new(left_count, right_count, adjacency)
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adjacency[left].binary_search(&right).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Sorted union of the neighbourhoods of `subset`.
    pub fn neighborhood(&self, subset: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.right_count];
        for &l in subset {
            for &r in &self.adjacency[l] {
                seen[r] = true;
            }
        }
        (0..self.right_count).filter(|&r| seen[r]).collect()
    }
}

/// A partial injective map from left to right vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    mate_of_left: Vec<Option<usize>>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.mate_of_left.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mate(&self, left: usize) -> Option<usize> {
        self.mate_of_left[left]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mate_of_left
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
    }

    pub fn saturates_left(&self) -> bool {
        self.mate_of_left.iter().all(Option::is_some)
    }

    /// Injective and every pair is an edge of `g`.
    pub fn is_valid_for(&self, g: &BipartiteGraph) -> bool {
        if self.mate_of_left.len() != g.left_count {
            return false;
        }
        let mut used = vec![false; g.right_count];
        for (l, r) in self.pairs() {
            if r >= g.right_count || used[r] || !g.has_edge(l, r) {
                return false;
            }
            used[r] = true;
        }
        true
    }
}

/// A left subset whose neighbourhood is smaller than itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallViolation {
    pub left: Vec<usize>,
    pub neighbors: Vec<usize>,
}

impl HallViolation {
    pub fn deficiency(&self) -> usize {
        self.left.len().saturating_sub(self.neighbors.len())
    }

    /// Recounts the neighbourhood in `g` and confirms `|N(W)| < |W|`.
    pub fn verify(&self, g: &BipartiteGraph) -> bool {
        let recount = g.neighborhood(&self.left);
        recount == self.neighbors && recount.len() < self.left.len()
    }
}

struct Augmenter<'g> {
    g: &'g BipartiteGraph,
    mate_of_left: Vec<Option<usize>>,
    mate_of_right: Vec<Option<usize>>,
    visited: Vec<bool>,
}

impl Augmenter<'_> {
    fn try_augment(&mut self, left: usize) -> bool {
        // a free neighbour is taken before any existing pair is disturbed
        if let Some(&right) = self.g.adjacency[left]
            .iter()
            .find(|&&r| !self.visited[r] && self.mate_of_right[r].is_none())
        {
            self.visited[right] = true;
            self.mate_of_left[left] = Some(right);
            self.mate_of_right[right] = Some(left);
            return true;
        }
        for &right in &self.g.adjacency[left] {
            if self.visited[right] {
                continue;
            }
            self.visited[right] = true;
            let free = match self.mate_of_right[right] {
                None => true,
                Some(other) => self.try_augment(other),
            };
            if free {
                self.mate_of_left[left] = Some(right);
                self.mate_of_right[right] = Some(left);
                return true;
            }
        }
        false
    }
}

fn run_augmentation(g: &BipartiteGraph) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut aug = Augmenter {
        g,
        mate_of_left: vec![None; g.left_count],
        mate_of_right: vec![None; g.right_count],
        visited: vec![false; g.right_count],
    };
    for left in 0..g.left_count {
        aug.visited.iter_mut().for_each(|v| *v = false);
        aug.try_augment(left);
    }
    (aug.mate_of_left, aug.mate_of_right)
}

/// Maximum-cardinality matching by augmenting paths, O(V·E).
///
/// Left vertices are processed in increasing order and neighbours scanned in
/// increasing order, so the pairing is canonical for a given graph.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    Matching {
        mate_of_left: run_augmentation(g).0,
    }
}

/// A matching saturating every left vertex, or a Hall violation read off the
/// alternating-reachability structure of a maximum matching.
pub fn saturating_matching(g: &BipartiteGraph) -> Result<Matching, HallViolation> {
    let (mate_of_left, mate_of_right) = run_augmentation(g);
    let unmatched: Vec<usize> = (0..g.left_count)
        .filter(|&l| mate_of_left[l].is_none())
        .collect();
    if unmatched.is_empty() {
        return Ok(Matching { mate_of_left });
    }
    // Left vertices reachable from unmatched ones along alternating paths.
    // Every right vertex reached is matched (the matching is maximum), and
    // its mate is reached too, so |N(W)| = |W| − |unmatched|.
    let mut left_seen = vec![false; g.left_count];
    let mut right_seen = vec![false; g.right_count];
    let mut stack = unmatched;
    for &l in &stack {
        left_seen[l] = true;
    }
    while let Some(l) = stack.pop() {
        for &r in &g.adjacency[l] {
            if right_seen[r] {
                continue;
            }
            right_seen[r] = true;
            let mate = mate_of_right[r].expect("maximum matching leaves no augmenting path");
            if !left_seen[mate] {
                left_seen[mate] = true;
                stack.push(mate);
            }
        }
    }
    Err(HallViolation {
        left: (0..g.left_count).filter(|&l| left_seen[l]).collect(),
        neighbors: (0..g.right_count).filter(|&r| right_seen[r]).collect(),
    })
}

/// Outcome of an exhaustive Hall audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallAudit {
    pub subsets_checked: u64,
    /// Minimum of `|N(W)| − |W|` over the subsets visited.
    pub min_surplus: Option<i64>,
    /// First violating subset in enumeration order.
    pub witness: Option<Vec<usize>>,
}

impl HallAudit {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

pub(crate) fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of nonempty subsets of an `n`-set with at most `max_size` elements.
pub fn subsets_up_to(n: usize, max_size: usize) -> u128 {
    (1..=max_size.min(n))
        .map(|k| binomial_u128(n as u64, k as u64))
        .fold(0u128, u128::saturating_add)
}

/// Bitset over right vertices, used to accumulate neighbourhood unions.
#[derive(Clone)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn union_from(&mut self, a: &Bits, b: &Bits) {
        for ((o, x), y) in self.0.iter_mut().zip(&a.0).zip(&b.0) {
            *o = x | y;
        }
    }

    pub(crate) fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Checks Hall's condition on every left subset of size `1..=max_subset`.
///
/// Stops at the first violating subset. Fails up front if the number of
/// subsets exceeds `budget`.
pub fn hall_check_exhaustive(
    g: &BipartiteGraph,
    max_subset: usize,
    budget: u64,
) -> Result<HallAudit, MatchingError> {
    let required = subsets_up_to(g.left_count, max_subset);
    if required > budget as u128 {
        return Err(MatchingError::BudgetExceeded { required, budget });
    }
    let masks: Vec<Bits> = g
        .adjacency
        .iter()
        .map(|list| {
            let mut b = Bits::new(g.right_count);
            list.iter().for_each(|&r| b.set(r));
            b
        })
        .collect();
    let depth = max_subset.min(g.left_count);
    let mut audit = HallAudit {
        subsets_checked: 0,
        min_surplus: None,
        witness: None,
    };
    if depth == 0 {
        return Ok(audit);
    }
    let mut unions = vec![Bits::new(g.right_count); depth + 1];
    let mut chosen = Vec::with_capacity(depth);
    enumerate(&masks, 0, depth, &mut chosen, &mut unions, &mut audit);
    Ok(audit)
}

fn enumerate(
    masks: &[Bits],
    start: usize,
    depth: usize,
    chosen: &mut Vec<usize>,
    unions: &mut [Bits],
    audit: &mut HallAudit,
) -> bool {
    let level = chosen.len();
    for v in start..masks.len() {
        let (lower, upper) = unions.split_at_mut(level + 1);
        upper[0].union_from(&lower[level], &masks[v]);
        chosen.push(v);
        audit.subsets_checked += 1;
        let surplus = upper[0].count() as i64 - chosen.len() as i64;
        audit.min_surplus = Some(audit.min_surplus.map_or(surplus, |m| m.min(surplus)));
        if surplus < 0 {
            audit.witness = Some(chosen.clone());
            return true;
        }
        if chosen.len() < depth && enumerate(masks, v + 1, depth, chosen, unions, audit) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_bipartite_has_perfect_matching() {
        let g = BipartiteGraph::new(3, 3, vec![vec![0, 1, 2]; 3]).unwrap();
        let m = max_matching(&g);
        assert_eq!(m.len(), 3);
        assert!(m.is_valid_for(&g));
        // canonical scan order
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn two_vertices_sharing_one_neighbor() {
        let g = BipartiteGraph::new(2, 1, vec![vec![0], vec![0]]).unwrap();
        assert_eq!(max_matching(&g).len(), 1);
    }

    #[test]
    fn single_edge_saturates() {
        let g = BipartiteGraph::new(1, 1, vec![vec![0]]).unwrap();
        let m = saturating_matching(&g).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn pigeonhole_violation() {
        let g = BipartiteGraph::new(3, 2, vec![vec![0, 1]; 3]).unwrap();
        let v = saturating_matching(&g).unwrap_err();
        assert_eq!(v.left, vec![0, 1, 2]);
        assert_eq!(v.neighbors, vec![0, 1]);
        assert!(v.verify(&g));
        assert_eq!(v.deficiency(), 1);
    }

    #[test]
    fn augmenting_path_reroutes_earlier_choice() {
        // 0 grabs 0 first; 1 can only use 0, forcing 0 over to 1.
        let g = BipartiteGraph::new(2, 2, vec![vec![0, 1], vec![0]]).unwrap();
        let m = saturating_matching(&g).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(
            BipartiteGraph::new(1, 2, vec![vec![2]]),
            Err(MatchingError::EdgeOutOfRange { .. })
        ));
        assert!(matches!(
            BipartiteGraph::new(2, 2, vec![vec![0]]),
            Err(MatchingError::AdjacencyLength { .. })
        ));
        let g = BipartiteGraph::new(1, 3, vec![vec![2, 0, 2]]).unwrap();
        assert_eq!(g.neighbors(0), &[0, 2]);
    }

    #[test]
    fn singleton_audit_detects_isolated_vertices() {
        let ok = BipartiteGraph::new(2, 2, vec![vec![0], vec![0]]).unwrap();
        assert!(hall_check_exhaustive(&ok, 1, 100).unwrap().holds());
        let isolated = BipartiteGraph::new(2, 2, vec![vec![0], vec![]]).unwrap();
        let audit = hall_check_exhaustive(&isolated, 1, 100).unwrap();
        assert_eq!(audit.witness, Some(vec![1]));
        let pair = hall_check_exhaustive(&ok, 2, 100).unwrap();
        assert_eq!(pair.witness, Some(vec![0, 1]));
    }

    #[test]
    fn audit_budget_is_enforced() {
        let g = BipartiteGraph::new(40, 1, vec![vec![0]; 40]).unwrap();
        assert_eq!(
            hall_check_exhaustive(&g, 3, 1000),
            Err(MatchingError::BudgetExceeded {
                required: 40 + 780 + 9880,
                budget: 1000
            })
        );
    }
}
