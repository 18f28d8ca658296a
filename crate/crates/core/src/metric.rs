//! The pullback pseudometric of a function through a cover tower, its balls,
//! the Čech (and Rips) filtrations it induces, and the comparison between
//! multiscale mapper and the Čech filtration.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{for_each_face, Simplex, SimplicialComplex, SimplicialMap, VertexId};
use crate::cover::{Certificate, CoverTower};
use crate::error::{Error, Result};
use crate::mapper::{tower_pullbacks, ComplexTower, Lens, Mode, PullbackCover};
use crate::par;
use crate::persistence::{bottleneck_dims, tower_diagrams, DimDistance, PersistenceDiagram};

/// `d(x, x')` is the first grid scale at which some pullback element
/// contains both vertices, `+∞` if there is none, and `0` on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackPseudometric {
    vertices: Vec<VertexId>,
    pos: HashMap<VertexId, usize>,
    scales: Vec<f64>,
    /// Row-major, `n x n`.
    values: Vec<f64>,
    certificate: Option<Certificate>,
}

pub fn pullback_pseudometric(
    tower: &CoverTower,
    lens: &Lens,
    k: &SimplicialComplex,
    mode: Mode,
) -> Result<PullbackPseudometric> {
    let pbs = tower_pullbacks(tower, lens, k, mode)?;
    Ok(PullbackPseudometric::from_pullbacks(tower, &pbs, k))
}

impl PullbackPseudometric {
    /// Builds `d` from pullbacks already computed at every grid scale.
    pub fn from_pullbacks(tower: &CoverTower, pbs: &[PullbackCover], k: &SimplicialComplex) -> Self {
        let vertices: Vec<VertexId> = k.vertices().iter().copied().collect();
        let pos: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vertices.len();
        // Per scale, which pairs share an element.
        let together: Vec<Vec<bool>> = par::map(pbs, |pc| {
            let mut m = vec![false; n * n];
            for e in pc.elements() {
                let idx: Vec<usize> = e.vertices().iter().map(|v| pos[v]).collect();
                for &a in &idx {
                    for &b in &idx {
                        m[a * n + b] = true;
                    }
                }
            }
            m
        });
        let scales = tower.scales().to_vec();
        let values = (0..n * n)
            .map(|ij| {
                if ij / n == ij % n {
                    0.0
                } else {
                    together.iter().position(|m| m[ij]).map_or(f64::INFINITY, |i| scales[i])
                }
            })
            .collect();
        Self { vertices, pos, scales, values, certificate: tower.certificate() }
    }

    /// Builds `d` from an explicit matrix, mainly for checks and tests.
    pub fn from_matrix(vertices: Vec<VertexId>, scales: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = vertices.len();
        if values.len() != n * n {
            return Err(Error::InvalidMetric(format!("expected {} entries, got {}", n * n, values.len())));
        }
        let pos: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if pos.len() != n {
            return Err(Error::InvalidMetric("duplicate vertex".into()));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {}", vertices[i])));
            }
            for j in 0..n {
                if values[i * n + j] != values[j * n + i] || values[i * n + j].is_nan() || values[i * n + j] < 0.0 {
                    return Err(Error::InvalidMetric(format!("bad entry ({}, {})", vertices[i], vertices[j])));
                }
            }
        }
        Ok(Self { vertices, pos, scales, values, certificate: None })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn certificate(&self) -> Option<Certificate> {
        self.certificate
    }

    pub fn get(&self, x: VertexId, y: VertexId) -> Result<f64> {
        let i = *self.pos.get(&x).ok_or(Error::UnknownVertex(x))?;
        let j = *self.pos.get(&y).ok_or(Error::UnknownVertex(y))?;
        Ok(self.at(i, j))
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.vertices.len() + j]
    }

    /// `{x' : d(x, x') <= eps}`, sorted.
    pub fn ball(&self, x: VertexId, eps: f64) -> Result<Vec<VertexId>> {
        let i = *self.pos.get(&x).ok_or(Error::UnknownVertex(x))?;
        Ok((0..self.vertices.len()).filter(|&j| self.at(i, j) <= eps).map(|j| self.vertices[j]).collect())
    }

    /// CSV dump: a header row of vertex ids, then one row per vertex with
    /// its id first; `inf` marks `+∞`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex");
        for v in &self.vertices {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
        for (i, v) in self.vertices.iter().enumerate() {
            write!(out, "{v}").unwrap();
            for j in 0..self.vertices.len() {
                let x = self.at(i, j);
                if x.is_infinite() {
                    out.push_str(",inf");
                } else {
                    write!(out, ",{x}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Union of the vertex sets of the elements of `pc` containing `x`.
pub fn element_union(pc: &PullbackCover, x: VertexId) -> Vec<VertexId> {
    let mut out: Vec<VertexId> =
        pc.elements_containing_vertex(x).into_iter().flat_map(|e| pc.elements()[e].vertices().to_vec()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Checks, at grid scale `i` and every vertex, that the ball of radius
/// `ε_i` equals the union of the pullback elements containing its center.
pub fn ball_identity_holds(d: &PullbackPseudometric, pbs: &[PullbackCover], i: usize) -> Result<bool> {
    let eps = d.scales[i];
    for &x in &d.vertices {
        if d.ball(x, eps)? != element_union(&pbs[i], x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A violated instance of `d(x,y) <= c (d(x,z) + d(z,y) + 2s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleFailure {
    pub x: VertexId,
    pub y: VertexId,
    pub via: VertexId,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub c: f64,
    pub s: f64,
    pub triples_checked: usize,
    pub passed: bool,
    /// At most the first 32 failures.
    pub failures: Vec<TriangleFailure>,
}

/// Exhaustive check of the relaxed triangle inequality over all triples.
pub fn relaxed_triangle_check(d: &PullbackPseudometric, c: f64, s: f64) -> TriangleReport {
    let n = d.vertices.len();
    let rows = par::map_range(n, |i| {
        let mut fails = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let lhs = d.at(i, j);
                let rhs = c * (d.at(i, k) + d.at(k, j) + 2.0 * s);
                if lhs > rhs * (1.0 + 1e-12) {
                    fails.push(TriangleFailure { x: d.vertices[i], y: d.vertices[j], via: d.vertices[k], lhs, rhs });
                }
            }
        }
        fails
    });
    let total: usize = rows.iter().map(|r| r.len()).sum();
    TriangleReport {
        c,
        s,
        triples_checked: n * n * n,
        passed: total == 0,
        failures: rows.into_iter().flatten().take(32).collect(),
    }
}

/// Which filtration to build from the pseudometric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationKind {
    /// A simplex enters once the balls around its vertices share a vertex.
    #[default]
    Cech,
    /// A simplex enters once all its pairwise distances are within scale.
    Rips,
}

/// Simplices with the grid index at which they enter.
#[derive(Clone, Debug)]
pub struct CechFiltration {
    scales: Vec<f64>,
    vertices: Vec<VertexId>,
    /// Sorted by (entry, dimension, lexicographic).
    simplices: Vec<(usize, Simplex)>,
}

/// Filtration value of every simplex up to `max_dim` with a finite value:
/// `F_C(σ) = min_w max_{x ∈ σ} d(w, x)` over vertex witnesses `w` (Čech),
/// or the largest pairwise distance (Rips).
pub fn filtration_values(d: &PullbackPseudometric, max_dim: usize, kind: FiltrationKind) -> BTreeMap<Simplex, f64> {
    let n = d.vertices.len();
    let mut best: BTreeMap<Simplex, f64> = BTreeMap::new();
    match kind {
        FiltrationKind::Cech => {
            let per_witness = par::map_range(n, |w| {
                let ball: Vec<usize> = (0..n).filter(|&x| d.at(w, x).is_finite()).collect();
                let mut out: Vec<(Simplex, f64)> = Vec::new();
                for_each_face(&ball, max_dim + 1, |s| {
                    let val = s.iter().map(|&x| d.at(w, x)).fold(0.0, f64::max);
                    out.push((s.iter().map(|&x| d.vertices[x]).collect(), val));
                });
                out
            });
            for (s, v) in per_witness.into_iter().flatten() {
                best.entry(s).and_modify(|b| *b = b.min(v)).or_insert(v);
            }
        }
        FiltrationKind::Rips => {
            fn extend(
                d: &PullbackPseudometric,
                s: &mut Vec<usize>,
                val: f64,
                max_len: usize,
                out: &mut BTreeMap<Simplex, f64>,
            ) {
                out.insert(s.iter().map(|&x| d.vertices[x]).collect(), val);
                if s.len() == max_len {
                    return;
                }
                let start = s.last().map_or(0, |&x| x + 1);
                for y in start..d.vertices.len() {
                    let v = s.iter().map(|&x| d.at(x, y)).fold(val, f64::max);
                    if v.is_finite() {
                        s.push(y);
                        extend(d, s, v, max_len, out);
                        s.pop();
                    }
                }
            }
            let mut buf = Vec::new();
            for x in 0..n {
                buf.push(x);
                extend(d, &mut buf, 0.0, max_dim + 1, &mut best);
                buf.pop();
            }
        }
    }
    best
}

pub fn cech_filtration(d: &PullbackPseudometric, max_dim: usize, kind: FiltrationKind) -> CechFiltration {
    let scales = d.scales.clone();
    let mut simplices: Vec<(usize, Simplex)> = filtration_values(d, max_dim, kind)
        .into_iter()
        .filter_map(|(s, v)| {
            // Values are grid values (or 0), so the first scale at or
            // above the value is exact.
            let i = scales.iter().position(|&e| e >= v)?;
            Some((i, s))
        })
        .collect();
    simplices.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
    CechFiltration { scales, vertices: d.vertices.clone(), simplices }
}

impl CechFiltration {
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[(usize, Simplex)] {
        &self.simplices
    }

    /// The complex at grid index `i`.
    pub fn complex_at(&self, i: usize) -> SimplicialComplex {
        let mut k = SimplicialComplex::default();
        for (e, s) in &self.simplices {
            if *e <= i {
                k.insert_closed(s);
            }
        }
        k
    }

    /// The filtration as a tower with inclusion maps.
    pub fn to_tower(&self) -> Result<ComplexTower> {
        let complexes: Vec<Arc<SimplicialComplex>> =
            (0..self.scales.len()).map(|i| Arc::new(self.complex_at(i))).collect();
        let maps = (1..complexes.len())
            .map(|i| {
                let vm = complexes[i - 1].vertices().iter().map(|&v| (v, v)).collect();
                SimplicialMap::new(complexes[i - 1].clone(), complexes[i].clone(), vm)
            })
            .collect::<Result<Vec<_>>>()?;
        ComplexTower::new(self.scales.clone(), complexes, maps)
    }

    /// Text dump: `ε k v0 ... vk` per simplex, sorted by `(ε, k)`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (e, s) in &self.simplices {
            write!(out, "{} {}", self.scales[*e], s.len() - 1).unwrap();
            for v in s {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Result of comparing log-reindexed multiscale mapper and Čech diagrams.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MmVsCech {
    pub c: f64,
    pub s: f64,
    pub bound: f64,
    pub distances: Vec<DimDistance>,
    pub within_bound: bool,
    pub mapper_diagram: PersistenceDiagram,
    pub cech_diagram: PersistenceDiagram,
}

/// Bottleneck distances between the log-reindexed diagrams of multiscale
/// mapper and of the Čech filtration of the pullback pseudometric, against
/// the bound `ln(c (s + 2))`. Needs a certified tower with `s >= 1`.
pub fn mm_vs_cech(
    tower: &CoverTower,
    lens: &Lens,
    k: &SimplicialComplex,
    mode: Mode,
    dims: &[usize],
    p: u32,
) -> Result<MmVsCech> {
    let cert = tower.certificate().ok_or(Error::MissingCertificate)?;
    if cert.s < 1.0 {
        return Err(Error::Precondition(format!("certificate resolution {} is below 1", cert.s)));
    }
    let top = dims.iter().copied().max().unwrap_or(0);
    let pbs = tower_pullbacks(tower, lens, k, mode)?;
    let d = PullbackPseudometric::from_pullbacks(tower, &pbs, k);
    let mm = crate::mapper::multiscale_from_pullbacks(tower, &pbs, top + 1)?;
    let cech = cech_filtration(&d, top + 1, FiltrationKind::Cech).to_tower()?;
    let mapper_diagram = tower_diagrams(&mm.reindex_log()?, dims, p)?;
    let cech_diagram = tower_diagrams(&cech.reindex_log()?, dims, p)?;
    let bound = (cert.c * (cert.s + 2.0)).ln();
    let distances = bottleneck_dims(&mapper_diagram, &cech_diagram, dims);
    let within_bound = distances.iter().all(|d| d.distance <= bound + 1e-9);
    Ok(MmVsCech { c: cert.c, s: cert.s, bound, distances, within_bound, mapper_diagram, cech_diagram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::VertexFunction;
    use crate::cover::{build_ball_tower, Sample};

    fn path_instance() -> (SimplicialComplex, Lens, CoverTower) {
        let k = SimplicialComplex::from_maximal([[0, 1], [1, 2]]).unwrap();
        let lens = Lens::Real(VertexFunction::from_pairs([(0, 0.0), (1, 1.0), (2, 2.0)]));
        let sample = Sample::Line { points: vec![0.0, 1.0, 2.0], lo: 0.0, hi: 2.0 };
        let t = build_ball_tower(&sample, 0.5, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        (k, lens, t)
    }

    #[test]
    fn path_distances_by_scan() {
        let (k, lens, t) = path_instance();
        let d = pullback_pseudometric(&t, &lens, &k, Mode::Combinatorial).unwrap();
        // Brute force: first scale with a ball of radius ε/2 around a sample
        // point holding both values (the preimage of an interval is
        // connected on a monotone path).
        let first = |a: f64, b: f64| {
            t.scales()
                .iter()
                .copied()
                .find(|&e| [0.0, 1.0, 2.0].iter().any(|c: &f64| (a - c).abs() <= e / 2.0 && (b - c).abs() <= e / 2.0))
                .unwrap()
        };
        assert_eq!(d.get(0, 0).unwrap(), 0.0);
        assert_eq!(d.get(0, 1).unwrap(), first(0.0, 1.0));
        assert_eq!(d.get(0, 2).unwrap(), first(0.0, 2.0));
        assert_eq!(d.get(0, 2).unwrap(), 2.0);
    }

    #[test]
    fn balls_match_element_unions() {
        let (k, lens, t) = path_instance();
        let pbs = tower_pullbacks(&t, &lens, &k, Mode::Combinatorial).unwrap();
        let d = PullbackPseudometric::from_pullbacks(&t, &pbs, &k);
        for i in 0..t.len() {
            assert!(ball_identity_holds(&d, &pbs, i).unwrap());
        }
        assert_eq!(d.ball(1, 0.5).unwrap(), vec![1]);
        assert_eq!(d.ball(1, 8.0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn triangle_violation_reported() {
        let d = PullbackPseudometric::from_matrix(
            vec![0, 1, 2],
            vec![1.0, 10.0],
            vec![0.0, 1.0, 10.0, 1.0, 0.0, 1.0, 10.0, 1.0, 0.0],
        )
        .unwrap();
        let r = relaxed_triangle_check(&d, 1.0, 0.0);
        assert!(!r.passed);
        assert!(r.failures.iter().any(|f| f.x == 0 && f.y == 2 && f.via == 1));
        assert!(relaxed_triangle_check(&d, 5.0, 0.0).passed);
    }

    #[test]
    fn cech_entries_and_dump() {
        let (k, lens, t) = path_instance();
        let d = pullback_pseudometric(&t, &lens, &k, Mode::Combinatorial).unwrap();
        let f = cech_filtration(&d, 2, FiltrationKind::Cech);
        let entry: HashMap<&Simplex, usize> = f.simplices().iter().map(|(e, s)| (s, *e)).collect();
        assert_eq!(entry[&vec![0]], 0);
        assert_eq!(f.scales()[entry[&vec![0, 2]]], d.get(0, 2).unwrap());
        // Witness 1 reaches both ends only once they share an element.
        assert_eq!(f.scales()[entry[&vec![0, 1, 2]]], 2.0);
        assert!(f.to_text().starts_with("1 0 0\n"));
        let r = cech_filtration(&d, 2, FiltrationKind::Rips);
        let re: HashMap<&Simplex, usize> = r.simplices().iter().map(|(e, s)| (s, *e)).collect();
        assert_eq!(r.scales()[re[&vec![0, 1, 2]]], 2.0);
        assert!(f.to_tower().is_ok());
    }

    #[test]
    fn mm_vs_cech_needs_certificate() {
        let (k, lens, t) = path_instance();
        let r = mm_vs_cech(&t.clone().with_certificate(None), &lens, &k, Mode::Combinatorial, &[0], 2);
        assert!(matches!(r, Err(Error::MissingCertificate)));
        let ok = mm_vs_cech(&t, &lens, &k, Mode::Combinatorial, &[0, 1], 2).unwrap();
        assert!(ok.within_bound, "{ok:?}");
    }
}
