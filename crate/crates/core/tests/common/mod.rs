#![allow(dead_code)]

use logsparse::{LogSparseSet, Provenance, SetFamily};
use num_bigint::BigUint;
use rand::Rng;

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

pub fn bigs(xs: &[u64]) -> Vec<BigUint> {
    xs.iter().map(|&x| big(x)).collect()
}

/// At most one element per `[2^j, 2^(j+1))` below `2^bits`, so every
/// `[x, 2x)` meets at most two of them.
pub fn random_sparse_set<R: Rng>(rng: &mut R, bits: u32, density: f64) -> Vec<u64> {
    let mut out = Vec::new();
    for j in 0..bits {
        if rng.gen_bool(density) {
            out.push(rng.gen_range(1u64 << j..1u64 << (j + 1)));
        }
    }
    if out.is_empty() {
        out.push(rng.gen_range(1..1u64 << bits));
    }
    out
}

pub fn manual_family(sets: &[Vec<u64>], c: usize) -> SetFamily {
    let sets = sets
        .iter()
        .map(|s| LogSparseSet::new(bigs(s), c).unwrap())
        .collect();
    SetFamily::new(sets, Provenance::Manual).unwrap()
}

/// Max count of elements in any `[x, 2x)`, by checking all pairs.
pub fn quadratic_window_load(xs: &[u64]) -> usize {
    let mut best = 0;
    for i in 0..xs.len() {
        let mut count = 0;
        for &y in xs {
            if y >= xs[i] && y < 2 * xs[i] {
                count += 1;
            }
        }
        best = best.max(count);
    }
    best
}

/// Every sum of one element per set, by full product enumeration.
pub fn naive_sumset(sets: &[Vec<u64>]) -> Vec<u64> {
    let mut acc = vec![0u64];
    for s in sets {
        acc = acc
            .iter()
            .flat_map(|a| s.iter().map(move |x| a + x))
            .collect();
    }
    acc.sort_unstable();
    acc.dedup();
    acc
}

/// Longest AP by checking every (first, step) pair against a hash set.
pub fn naive_longest_ap(xs: &[u64]) -> (u64, u64, usize) {
    let set: std::collections::HashSet<u64> = xs.iter().copied().collect();
    let mut best = (xs[0], 1, 1);
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            let d = b - a;
            let mut len = 2;
            while set.contains(&(a + d * len as u64)) {
                len += 1;
            }
            let better = len > best.2 || (len == best.2 && (d, a) < (best.1, best.0));
            if better {
                best = (a, d, len);
            }
        }
    }
    best
}

/// Maximum matching size by trying every injective assignment.
pub fn brute_matching_size(adj: &[Vec<usize>], right: usize) -> usize {
    fn go(adj: &[Vec<usize>], i: usize, used: &mut Vec<bool>) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = go(adj, i + 1, used);
        for &r in &adj[i] {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + go(adj, i + 1, used));
                used[r] = false;
            }
        }
        best
    }
    go(adj, 0, &mut vec![false; right])
}

/// `max_W (|W| − |N(W)|)` over all left subsets, including the empty one.
pub fn brute_deficiency(adj: &[Vec<usize>]) -> usize {
    let l = adj.len();
    (0u32..1 << l)
        .map(|mask| {
            let mut nb = std::collections::HashSet::new();
            let mut size = 0;
            for (i, list) in adj.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    size += 1;
                    nb.extend(list.iter().copied());
                }
            }
            size - size.min(nb.len())
        })
        .max()
        .unwrap()
}
