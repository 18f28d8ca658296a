//! A loop on which multiscale mapper through the dyadic tower is unstable:
//! two height functions at sup-distance δ whose 1-dimensional diagrams are
//! at infinite bottleneck distance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{SimplicialComplex, VertexFunction, VertexId};
use crate::cover::{build_dyadic_tower, DyadicOptions};
use crate::error::{Error, Result};
use crate::mapper::{multiscale_mapper, Lens, Mode};
use crate::persistence::{bottleneck, tower_diagram, PersistenceDiagram, DEFAULT_PRIME};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DemoReport {
    pub s: f64,
    pub delta: f64,
    pub m: f64,
    pub loop_vertices: usize,
    pub sup_distance: f64,
    pub diagram_f: PersistenceDiagram,
    pub diagram_g: PersistenceDiagram,
    #[serde(with = "crate::serde_inf")]
    pub bottleneck: f64,
    /// `D_1` of `f` is `{(s, 2δ)}`, `D_1` of `g` is `{(s, +∞)}` and the
    /// sup-distance is `δ`.
    pub pass: bool,
}

/// The loop graph and the two functions `(f, g)` with `f = g + δ`.
///
/// With `w = 2^⌊log2 s⌋` and `a = δ - w`, `g` walks around the loop in steps
/// of `w` through `0 → a → 0 → -a → 0 → a → 0 → -a → 0`. Dyadic intervals
/// always have `0` as an endpoint, so the two positive and two negative
/// bumps of `g` never merge and its loop lives forever, while `f` takes
/// values in `[w, 2δ - w]`, which first fits in one dyadic interval at
/// width `2δ`.
pub fn demo_instance(
    s: f64,
    delta: f64,
    m: f64,
) -> Result<(SimplicialComplex, VertexFunction<f64>, VertexFunction<f64>)> {
    if !(0.0 < s && s < delta && delta < m / 2.0) {
        return Err(Error::Precondition(format!("need 0 < s < delta < M/2, got s = {s}, delta = {delta}, M = {m}")));
    }
    let exp = delta.log2();
    if exp.fract() != 0.0 {
        return Err(Error::Precondition(format!("delta = {delta} must be a power of two")));
    }
    let w = 2f64.powi(s.log2().floor() as i32);
    let steps = ((delta - w) / w).round() as usize;
    let mut g_values: Vec<f64> = Vec::new();
    for sign in [1.0, -1.0, 1.0, -1.0] {
        for j in 0..steps {
            g_values.push(sign * (j as f64) * w);
        }
        for j in (1..=steps).rev() {
            g_values.push(sign * (j as f64) * w);
        }
    }
    let n = g_values.len() as VertexId;
    let edges: Vec<Vec<VertexId>> = (0..n).map(|v| vec![v, (v + 1) % n]).collect();
    let k = SimplicialComplex::from_maximal(edges)?;
    let g: BTreeMap<VertexId, f64> = g_values.iter().enumerate().map(|(i, &x)| (i as VertexId, x)).collect();
    let f: BTreeMap<VertexId, f64> = g.iter().map(|(&v, &x)| (v, x + delta)).collect();
    Ok((k, VertexFunction::new(f), VertexFunction::new(g)))
}

/// Runs combinatorial multiscale mapper of both functions through the
/// dyadic tower on `[-M, M]` and checks the expected diagrams exactly.
pub fn demo_instability(s: f64, delta: f64, m: f64) -> Result<DemoReport> {
    let (k, f, g) = demo_instance(s, delta, m)?;
    let tower = build_dyadic_tower(m, s, &DyadicOptions::default())?;
    let diagram = |h: &VertexFunction<f64>| -> Result<PersistenceDiagram> {
        let mm = multiscale_mapper(&tower, &Lens::Real(h.clone()), &k, Mode::Combinatorial, 2)?;
        tower_diagram(&mm, 1, DEFAULT_PRIME)
    };
    let diagram_f = diagram(&f)?;
    let diagram_g = diagram(&g)?;
    let sup_distance = f.sup_distance(&g);
    let pass = diagram_f.pairs(1) == vec![(s, 2.0 * delta)]
        && diagram_g.pairs(1) == vec![(s, f64::INFINITY)]
        && sup_distance == delta;
    Ok(DemoReport {
        s,
        delta,
        m,
        loop_vertices: k.vertices().len(),
        sup_distance,
        bottleneck: bottleneck(&diagram_f, &diagram_g, 1),
        diagram_f,
        diagram_g,
        pass,
    })
}
