//! Exact preimages of intervals under the piecewise-linear extension of a
//! vertex function.
//!
//! The preimage of an interval `U` inside a simplex σ is convex and nonempty
//! iff the value range `[min f(σ), max f(σ)]` meets `U`. Pieces in a simplex
//! and in one of its faces touch iff the face is active, and activity is
//! inherited by cofaces, so components are the classes of active simplices
//! linked through active facets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, VertexFunction, VertexId};
use crate::cover::Interval;
use crate::error::Result;
use crate::union_find::UnionFind;

/// The cells of the domain with their value ranges under `f`.
#[derive(Debug)]
pub(crate) struct PlDomain {
    /// Simplices ordered by dimension, then lexicographically.
    pub cells: Vec<Simplex>,
    pub index: HashMap<Simplex, usize>,
    /// Indices of the codimension-one faces of each cell.
    pub facets: Vec<Vec<usize>>,
    pub range: Vec<(f64, f64)>,
}

impl PlDomain {
    pub fn new(k: &SimplicialComplex, f: &VertexFunction<f64>) -> Result<Self> {
        f.check_total(k)?;
        let cells: Vec<Simplex> = k.all_simplices().cloned().collect();
        let index: HashMap<Simplex, usize> = cells.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let facets = cells
            .iter()
            .map(|s| {
                if s.len() == 1 {
                    return Vec::new();
                }
                (0..s.len())
                    .map(|i| {
                        let mut face = s.clone();
                        face.remove(i);
                        index[&face]
                    })
                    .collect()
            })
            .collect();
        let range = cells
            .iter()
            .map(|s| {
                s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let x = *f.get(*v).unwrap();
                    (lo.min(x), hi.max(x))
                })
            })
            .collect();
        Ok(Self { cells, index, facets, range })
    }

    pub fn range_interval(&self, cell: usize) -> Interval {
        let (lo, hi) = self.range[cell];
        Interval::closed(lo, hi)
    }

    /// Values taken on the relative interior of a cell.
    pub fn interior_values(&self, cell: usize) -> Interval {
        let (lo, hi) = self.range[cell];
        if self.cells[cell].len() == 1 || lo == hi {
            Interval::closed(lo, hi)
        } else {
            Interval::open(lo, hi)
        }
    }

    /// Components of the preimage of `u`, each a sorted list of cell
    /// indices; components are ordered by their smallest cell.
    pub fn components(&self, u: &Interval) -> Vec<Vec<usize>> {
        let active: Vec<usize> = (0..self.cells.len()).filter(|&c| self.range_interval(c).meets(u)).collect();
        let mut local = vec![usize::MAX; self.cells.len()];
        for (i, &c) in active.iter().enumerate() {
            local[c] = i;
        }
        let mut uf = UnionFind::new(active.len());
        for (i, &c) in active.iter().enumerate() {
            for &f in &self.facets[c] {
                if local[f] != usize::MAX {
                    uf.union(i, local[f]);
                }
            }
        }
        uf.blocks().into_iter().map(|b| b.into_iter().map(|i| active[i]).collect()).collect()
    }
}

/// Portion of an edge `(a, b)`, `a < b`, parametrized by `t ∈ [0, 1]` from
/// `a` to `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialEdge {
    pub edge: [VertexId; 2],
    pub params: Interval,
}

/// Realized support of an exact pullback element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSupport {
    pub vertices: Vec<VertexId>,
    pub full_edges: Vec<[VertexId; 2]>,
    pub partial_edges: Vec<PartialEdge>,
    /// Active simplices of dimension two or more.
    pub higher: Vec<Simplex>,
    #[serde(skip)]
    pub(crate) cells: Vec<usize>,
}

impl ExactSupport {
    pub(crate) fn from_cells(dom: &PlDomain, u: &Interval, f: &VertexFunction<f64>, cells: Vec<usize>) -> Self {
        let mut s = ExactSupport {
            vertices: Vec::new(),
            full_edges: Vec::new(),
            partial_edges: Vec::new(),
            higher: Vec::new(),
            cells,
        };
        for &c in &s.cells {
            let cell = &dom.cells[c];
            match cell.len() {
                1 => s.vertices.push(cell[0]),
                2 => {
                    let range = dom.range_interval(c);
                    let e = [cell[0], cell[1]];
                    if u.contains_interval(&range) {
                        s.full_edges.push(e);
                    } else {
                        let j = u.intersect(&range);
                        let (fa, fb) = (*f.get(e[0]).unwrap(), *f.get(e[1]).unwrap());
                        let t = |x: f64| (x - fa) / (fb - fa);
                        let params = if fb > fa {
                            Interval::new(t(j.lo), t(j.hi), j.lo_open, j.hi_open)
                        } else {
                            Interval::new(t(j.hi), t(j.lo), j.hi_open, j.lo_open)
                        };
                        s.partial_edges.push(PartialEdge { edge: e, params });
                    }
                }
                _ => s.higher.push(cell.clone()),
            }
        }
        s
    }

    /// Vertices and edges (full or partial) of the support.
    pub fn low_simplices(&self) -> Vec<Simplex> {
        let mut out: Vec<Simplex> = self.vertices.iter().map(|&v| vec![v]).collect();
        out.extend(self.full_edges.iter().map(|e| e.to_vec()));
        out.extend(self.partial_edges.iter().map(|p| p.edge.to_vec()));
        out.sort();
        out
    }
}

/// Maximal subfamilies of the intervals sharing a common point (intervals
/// on a line have a common point iff some left end, or a point just right
/// of it, lies in all of them).
pub(crate) fn maximal_stabbed(intervals: &[(usize, Interval)]) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for (_, probe) in intervals {
        let x = probe.lo;
        let hit: Vec<usize> = intervals
            .iter()
            .filter(|(_, j)| if probe.lo_open { j.lo <= x && j.hi > x } else { j.contains(x) })
            .map(|(id, _)| *id)
            .collect();
        if !hit.is_empty() && !sets.contains(&hit) {
            sets.push(hit);
        }
    }
    let maximal: Vec<Vec<usize>> = sets
        .iter()
        .filter(|a| !sets.iter().any(|b| b.len() > a.len() && a.iter().all(|x| b.contains(x))))
        .cloned()
        .collect();
    maximal
}
