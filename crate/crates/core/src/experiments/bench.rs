//! Timing of full-complex against 1-skeleton exact multiscale mapper on
//! complexes with far more higher simplices than edges.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::cover::{build_ball_tower, Sample};
use crate::error::Result;
use crate::mapper::{multiscale_mapper, Lens, Mode};
use crate::persistence::{tower_diagrams, PersistenceDiagram};
use crate::random::{self, random_dense_complex, random_pl_function, rescale_for_min_diameter};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub seed: u64,
    /// Number of chained full 3-skeleton blocks.
    pub blocks: usize,
    pub block_size: usize,
    /// Timed repetitions; the median is reported.
    pub repeats: usize,
    pub dims: Vec<usize>,
    pub prime: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { seed: 0, blocks: 6, block_size: 9, repeats: 3, dims: vec![0, 1], prime: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub backend: String,
    /// Simplex counts per dimension.
    pub counts: Vec<usize>,
    pub full_seconds: f64,
    pub skeleton_seconds: f64,
    pub speedup: f64,
    pub identical_diagrams: bool,
}

/// A dense 3-complex with a function satisfying the minimum diameter
/// condition for a ball tower over its range.
pub fn bench_instance(config: &BenchConfig) -> Result<(SimplicialComplex, Lens, crate::cover::CoverTower)> {
    let mut rng = random::rng(config.seed);
    let k = random_dense_complex(&mut rng, config.blocks, config.block_size);
    let f = random_pl_function(&mut rng, &k, 1.0);
    let hi = f.values().values().copied().fold(0.0, f64::max);
    let nu = 0.25;
    let count = (hi / (2.0 * nu)).ceil() as usize + 1;
    let points: Vec<f64> = (0..count).map(|j| 2.0 * nu * j as f64).collect();
    let top = points[count - 1] + nu;
    let mut scales = vec![2.0 * nu];
    while *scales.last().unwrap() < 2.0 * (top + nu) {
        scales.push(2.0 * scales.last().unwrap());
    }
    let tower = build_ball_tower(&Sample::Line { points, lo: -nu, hi: top }, nu, &scales)?;
    let f = rescale_for_min_diameter(&k, &f, tower.min_element_diameter());
    Ok((k, Lens::Real(f), tower))
}

/// Times both pipelines (multiscale mapper plus diagrams) and checks that
/// they produce the same diagrams.
pub fn bench_skeleton(config: &BenchConfig) -> Result<BenchReport> {
    let (k, lens, tower) = bench_instance(config)?;
    let top = config.dims.iter().copied().max().unwrap_or(0) + 1;
    let run = |mode: Mode| -> Result<(f64, PersistenceDiagram)> {
        let mut times = Vec::new();
        let mut diagram = PersistenceDiagram::default();
        for _ in 0..config.repeats.max(1) {
            let start = Instant::now();
            let mm = multiscale_mapper(&tower, &lens, &k, mode, top)?;
            diagram = tower_diagrams(&mm, &config.dims, config.prime)?;
            times.push(start.elapsed().as_secs_f64());
        }
        times.sort_by(f64::total_cmp);
        Ok((times[times.len() / 2], diagram))
    };
    let (full_seconds, full) = run(Mode::ExactFull)?;
    let (skeleton_seconds, skel) = run(Mode::Exact)?;
    let counts = (0..=k.dim().unwrap_or(0)).map(|d| k.count(d)).collect();
    Ok(BenchReport {
        backend: crate::par::backend().to_string(),
        counts,
        full_seconds,
        skeleton_seconds,
        speedup: full_seconds / skeleton_seconds.max(1e-12),
        identical_diagrams: full == skel,
    })
}
