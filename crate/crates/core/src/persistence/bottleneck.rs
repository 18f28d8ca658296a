//! Bottleneck distance between persistence diagrams.

use serde::{Deserialize, Serialize};

use crate::persistence::diagram::PersistenceDiagram;

/// Bottleneck distance in one homological dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimDistance {
    pub dim: usize,
    #[serde(with = "crate::serde_inf")]
    pub distance: f64,
}

/// Bottleneck distances for each dimension in `dims`.
pub fn bottleneck_dims(d1: &PersistenceDiagram, d2: &PersistenceDiagram, dims: &[usize]) -> Vec<DimDistance> {
    dims.iter().map(|&dim| DimDistance { dim, distance: bottleneck(d1, d2, dim) }).collect()
}

fn cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn diag_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Whether a perfect matching exists in the bipartite graph on
/// `A ∪ diag(B)` vs `B ∪ diag(A)` with edges of cost at most `t`.
fn matchable(a: &[(f64, f64)], b: &[(f64, f64)], t: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    let size = n + m;
    let adj: Vec<Vec<usize>> = (0..size)
        .map(|l| {
            if l < n {
                let mut out: Vec<usize> = (0..m).filter(|&j| cost(a[l], b[j]) <= t).collect();
                if diag_cost(a[l]) <= t {
                    out.push(m + l);
                }
                out
            } else {
                let j = l - n;
                let mut out = Vec::new();
                if diag_cost(b[j]) <= t {
                    out.push(j);
                }
                out.extend(m..m + n);
                out
            }
        })
        .collect();
    let mut owner = vec![usize::MAX; size];
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r] == usize::MAX || augment(owner[r], adj, seen, owner) {
                owner[r] = l;
                return true;
            }
        }
        false
    }
    (0..size).all(|l| {
        let mut seen = vec![false; size];
        augment(l, &adj, &mut seen, &mut owner)
    })
}

/// Bottleneck distance between finite point sets (no diagonal points).
fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(a.iter().chain(b).map(|&p| diag_cost(p)));
    for &p in a {
        candidates.extend(b.iter().map(|&q| cost(p, q)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matchable(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bottleneck distance between the dimension-`k` parts. Essential points
/// must be matched among themselves; a count mismatch gives `+∞`.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram, k: usize) -> f64 {
    let split = |d: &PersistenceDiagram| {
        let (ess, fin): (Vec<(f64, f64)>, Vec<(f64, f64)>) = d.pairs(k).into_iter().partition(|p| p.1.is_infinite());
        (ess.into_iter().map(|p| p.0).collect::<Vec<f64>>(), fin)
    };
    let (mut e1, f1) = split(d1);
    let (mut e2, f2) = split(d2);
    if e1.len() != e2.len() {
        return f64::INFINITY;
    }
    e1.sort_by(f64::total_cmp);
    e2.sort_by(f64::total_cmp);
    let essential = e1.iter().zip(&e2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    essential.max(finite_bottleneck(&f1, &f2))
}
