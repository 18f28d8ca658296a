//! Concrete tower constructions: ball towers over a sample, net-based
//! towers in a finite metric space, and the dyadic interval tower.

use std::sync::Arc;

use crate::complex::{FiniteMetricSpace, PointId};
use crate::cover::{Certificate, Codomain, Cover, CoverTower, Extent, Interval};
use crate::error::{Error, Result};

/// A sample `P` of a codomain `Z`.
#[derive(Clone, Debug)]
pub enum Sample {
    /// Points of the segment `[lo, hi]`.
    Line { points: Vec<f64>, lo: f64, hi: f64 },
    /// Point ids of a finite metric space; the whole space is the codomain.
    Metric { space: Arc<FiniteMetricSpace>, points: Vec<PointId> },
}

impl Sample {
    fn codomain(&self) -> Codomain {
        match self {
            Sample::Line { lo, hi, .. } => Codomain::Segment { lo: *lo, hi: *hi },
            Sample::Metric { space, .. } => Codomain::Metric(space.clone()),
        }
    }
}

/// Checks that every codomain point is within `nu` of the sample. On
/// failure the error names the worst-served codomain point.
pub fn is_nu_sample(sample: &Sample, nu: f64) -> Result<()> {
    match sample {
        Sample::Line { points, lo, hi } => {
            if points.is_empty() {
                return Err(Error::NotASample { nu, witness: format!("{lo}") });
            }
            if let Some(p) = points.iter().find(|p| **p < *lo || **p > *hi) {
                return Err(Error::Precondition(format!("sample point {p} outside [{lo}, {hi}]")));
            }
            let mut pts = points.clone();
            pts.sort_by(f64::total_cmp);
            // Farthest codomain point from the sample: an end of the segment
            // or a midpoint between consecutive sample points.
            let mut worst = (pts[0] - lo, *lo);
            if hi - pts[pts.len() - 1] > worst.0 {
                worst = (hi - pts[pts.len() - 1], *hi);
            }
            for w in pts.windows(2) {
                let gap = 0.5 * (w[1] - w[0]);
                if gap > worst.0 {
                    worst = (gap, 0.5 * (w[0] + w[1]));
                }
            }
            if worst.0 > nu {
                return Err(Error::NotASample { nu, witness: format!("{}", worst.1) });
            }
            Ok(())
        }
        Sample::Metric { space, points } => {
            if let Some(p) = points.iter().find(|p| !space.contains(**p)) {
                return Err(Error::UnknownPoint(*p));
            }
            for &z in space.ids() {
                let d = points.iter().map(|&p| space.dist(z, p).unwrap()).fold(f64::INFINITY, f64::min);
                if d > nu {
                    return Err(Error::NotASample { nu, witness: format!("point {z}") });
                }
            }
            Ok(())
        }
    }
}

fn check_grid(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::InvalidTower("no scales".into()));
    }
    if scales.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidTower("scales must be strictly increasing".into()));
    }
    Ok(())
}

/// Tower whose cover at scale ε is the family of balls of radius ε/2 around
/// the sample points; the map between scales keeps the center. Requires the
/// first scale to be at least 2ν and attaches the certificate `(3, ε_1)`.
pub fn build_ball_tower(sample: &Sample, nu: f64, scales: &[f64]) -> Result<CoverTower> {
    is_nu_sample(sample, nu)?;
    check_grid(scales)?;
    if scales[0] < 2.0 * nu || scales[0] <= 0.0 {
        return Err(Error::Precondition(format!(
            "first scale {} must be positive and at least 2 * nu = {}",
            scales[0],
            2.0 * nu
        )));
    }
    let codomain = sample.codomain();
    let covers = scales
        .iter()
        .map(|&eps| {
            let r = eps / 2.0;
            let elements = match sample {
                Sample::Line { points, lo, hi } => points
                    .iter()
                    .map(|&p| Extent::Interval(Interval::closed((p - r).max(*lo), (p + r).min(*hi))))
                    .collect(),
                Sample::Metric { points, .. } => {
                    points.iter().map(|&p| Extent::Ball { center: p, radius: r }).collect()
                }
            };
            Cover::new(codomain.clone(), elements)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = covers[0].len();
    let maps = vec![(0..n).collect(); scales.len() - 1];
    CoverTower::new(scales.to_vec(), covers, maps, Some(Certificate { c: 3.0, s: scales[0] }))
}

/// Nested nets of `points` at the given integer levels: `N(l)` is within
/// `rho^l` of every point, its points are more than `rho^l` apart, and
/// coarser nets are subsets of finer ones. Returned in the order of
/// `levels`.
pub fn build_nets(
    space: &FiniteMetricSpace,
    points: &[PointId],
    rho: f64,
    levels: &[i32],
) -> Result<Vec<Vec<PointId>>> {
    if !(rho >= 11.0) {
        return Err(Error::RhoTooSmall(rho));
    }
    if let Some(p) = points.iter().find(|p| !space.contains(**p)) {
        return Err(Error::UnknownPoint(*p));
    }
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut order: Vec<i32> = levels.to_vec();
    order.sort_unstable_by(|a, b| b.cmp(a));
    order.dedup();

    let mut net: Vec<PointId> = Vec::new();
    // Distance from each point to the current net.
    let mut gap: Vec<f64> = vec![f64::INFINITY; pts.len()];
    let mut by_level = std::collections::HashMap::new();
    for &l in &order {
        let radius = rho.powi(l);
        loop {
            // Farthest point from the net, ties to the smallest id.
            let mut best: Option<usize> = None;
            for (i, &g) in gap.iter().enumerate() {
                if g > radius && best.is_none_or(|b| g > gap[b]) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            let p = pts[b];
            net.push(p);
            for (i, &q) in pts.iter().enumerate() {
                gap[i] = gap[i].min(space.dist(p, q)?);
            }
        }
        let mut sorted = net.clone();
        sorted.sort_unstable();
        by_level.insert(l, sorted);
    }
    Ok(levels.iter().map(|l| by_level[l].clone()).collect())
}

/// Net-based tower: scales `ε_i = 4(ρ+1)^i` for `i = 1..=levels`, cover at
/// `ε_i` the balls of radius `ε_i/2` around `N(i)`, and each ball mapped to
/// the ball around the nearest point of `N(i+1)` (ties to the smallest id).
/// `points` must be a ν-sample of the space with ν ≤ 1. When `levels` is
/// `None` the tower stops at the first level whose cover is a single ball
/// containing the whole space. Certificate: `c = s = 4(ρ+1)`.
pub fn build_net_tower(
    space: Arc<FiniteMetricSpace>,
    points: &[PointId],
    rho: f64,
    nu: f64,
    levels: Option<usize>,
) -> Result<CoverTower> {
    if !(rho >= 11.0) {
        return Err(Error::RhoTooSmall(rho));
    }
    if nu > 1.0 {
        return Err(Error::Precondition(format!("sampling radius {nu} exceeds 1; rescale the metric")));
    }
    let sample = Sample::Metric { space: space.clone(), points: points.to_vec() };
    is_nu_sample(&sample, nu)?;
    let eps = |i: usize| 4.0 * (rho + 1.0).powi(i as i32);
    let n = match levels {
        Some(0) => return Err(Error::Precondition("at least one level is required".into())),
        Some(n) => n,
        None => {
            let mut i = 1;
            loop {
                let net = &build_nets(&space, points, rho, &[i as i32])?[0];
                let reach = space.ids().iter().map(|&z| space.dist(net[0], z).unwrap()).fold(0.0, f64::max);
                if net.len() == 1 && reach <= eps(i) / 2.0 {
                    break i;
                }
                i += 1;
            }
        }
    };
    let level_ids: Vec<i32> = (1..=n as i32).collect();
    let nets = build_nets(&space, points, rho, &level_ids)?;
    let scales: Vec<f64> = (1..=n).map(eps).collect();
    let codomain = Codomain::Metric(space.clone());
    let covers = nets
        .iter()
        .zip(&scales)
        .map(|(net, &e)| {
            Cover::new(codomain.clone(), net.iter().map(|&u| Extent::Ball { center: u, radius: e / 2.0 }).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let maps = nets
        .windows(2)
        .map(|w| {
            w[0].iter()
                .map(|&u| {
                    let mut best = 0;
                    for (j, &v) in w[1].iter().enumerate() {
                        if space.dist(u, v).unwrap() < space.dist(u, w[1][best]).unwrap() {
                            best = j;
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();
    let c = 4.0 * (rho + 1.0);
    CoverTower::new(scales, covers, maps, Some(Certificate { c, s: c }))
}

/// Options for [`build_dyadic_tower`].
#[derive(Clone, Debug, Default)]
pub struct DyadicOptions {
    /// Explicit scale grid; defaults to `{s} ∪ {2^j : s < 2^j ≤ 2M}`.
    pub scales: Option<Vec<f64>>,
    /// Replace each closed interval by the open interval thickened by ν.
    pub thicken: Option<f64>,
}

/// Dyadic tower on `[-M, M]`: the cover at scale ε consists of the intervals
/// `[k w, (k+1) w]` with `w = 2^⌊log2 ε⌋` meeting the segment, and each
/// interval maps to the unique dyadic interval containing it at the coarser
/// width. No goodness certificate is attached.
pub fn build_dyadic_tower(m: f64, s: f64, opts: &DyadicOptions) -> Result<CoverTower> {
    if !(m > 0.0) || !(s > 0.0) {
        return Err(Error::Precondition(format!("dyadic tower needs M > 0 and s > 0, got M = {m}, s = {s}")));
    }
    let scales = match &opts.scales {
        Some(sc) => sc.clone(),
        None => {
            let mut sc = vec![s];
            let mut j = s.log2().floor() as i32 + 1;
            while 2f64.powi(j) <= 2.0 * m {
                if 2f64.powi(j) > s {
                    sc.push(2f64.powi(j));
                }
                j += 1;
            }
            sc
        }
    };
    check_grid(&scales)?;
    if scales[0] <= 0.0 {
        return Err(Error::NonPositiveScale(scales[0]));
    }
    if let Some(nu) = opts.thicken {
        if !(nu > 0.0 && nu < scales[0]) {
            return Err(Error::Precondition(format!("thickening {nu} must lie in (0, s)")));
        }
    }
    let exps: Vec<i32> = scales.iter().map(|e| e.log2().floor() as i32).collect();
    let ranges: Vec<(i64, i64)> = exps
        .iter()
        .map(|&e| {
            let w = 2f64.powi(e);
            ((-m / w).ceil() as i64 - 1, (m / w).floor() as i64)
        })
        .collect();
    let codomain = Codomain::Segment { lo: -m, hi: m };
    let covers = exps
        .iter()
        .zip(&ranges)
        .map(|(&e, &(k0, k1))| {
            let w = 2f64.powi(e);
            let elements = (k0..=k1)
                .map(|k| {
                    let (a, b) = (k as f64 * w, (k + 1) as f64 * w);
                    Extent::Interval(match opts.thicken {
                        Some(nu) => Interval::open(a - nu, b + nu),
                        None => Interval::closed(a, b),
                    })
                })
                .collect();
            Cover::new(codomain.clone(), elements)
        })
        .collect::<Result<Vec<_>>>()?;
    let maps = (0..scales.len() - 1)
        .map(|i| {
            let ratio = 1i64 << (exps[i + 1] - exps[i]);
            let (k0, _) = ranges[i];
            let (k0n, _) = ranges[i + 1];
            (0..covers[i].len()).map(|e| ((k0 + e as i64).div_euclid(ratio) - k0n) as usize).collect()
        })
        .collect();
    CoverTower::new(scales, covers, maps, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_tower_on_segment() {
        let sample = Sample::Line { points: vec![0.0, 1.0, 2.0], lo: 0.0, hi: 2.0 };
        let t = build_ball_tower(&sample, 0.5, &[1.0, 2.0, 4.0]).unwrap();
        let got: Vec<Interval> = (0..3).map(|i| t.cover(1).clipped_interval(i).unwrap()).collect();
        assert_eq!(got, vec![Interval::closed(0.0, 1.0), Interval::closed(0.0, 2.0), Interval::closed(1.0, 2.0)]);
        assert_eq!(t.certificate(), Some(Certificate { c: 3.0, s: 1.0 }));
        assert_eq!(t.map_between(0, 2), vec![0, 1, 2]);
    }

    #[test]
    fn ball_tower_rejects_sparse_sample() {
        let sample = Sample::Line { points: vec![0.0, 2.0], lo: 0.0, hi: 2.0 };
        assert_eq!(
            build_ball_tower(&sample, 0.5, &[1.0]).unwrap_err(),
            Error::NotASample { nu: 0.5, witness: "1".into() }
        );
        let sample = Sample::Line { points: vec![0.0, 1.0, 2.0], lo: 0.0, hi: 2.0 };
        assert!(build_ball_tower(&sample, 0.5, &[0.5]).is_err());
    }

    #[test]
    fn singleton_codomain() {
        let sample = Sample::Line { points: vec![0.0], lo: 0.0, hi: 0.0 };
        let t = build_ball_tower(&sample, 0.0, &[1.0, 2.0]).unwrap();
        assert!(t.covers().iter().all(|c| c.len() == 1));
        assert_eq!(t.map_between(0, 1), vec![0]);
    }

    #[test]
    fn nets_single_and_pair() {
        let one = FiniteMetricSpace::euclidean(&[[0.3, 0.3]]);
        assert_eq!(build_nets(&one, &[0], 11.0, &[-2, 0, 3]).unwrap(), vec![vec![0]; 3]);
        let two = FiniteMetricSpace::euclidean(&[[0.0, 0.0], [5.0, 0.0]]);
        let nets = build_nets(&two, &[0, 1], 11.0, &[1, 0]).unwrap();
        assert_eq!(nets[0], vec![0]);
        assert_eq!(nets[1], vec![0, 1]);
        assert_eq!(build_nets(&two, &[0, 1], 10.0, &[0]).unwrap_err(), Error::RhoTooSmall(10.0));
    }

    #[test]
    fn net_tower_certificate() {
        let space = Arc::new(FiniteMetricSpace::euclidean(&[[0.0, 0.0], [0.5, 0.5], [1.0, 0.0]]));
        let t = build_net_tower(space, &[0, 1, 2], 11.0, 0.0, None).unwrap();
        assert_eq!(t.certificate(), Some(Certificate { c: 48.0, s: 48.0 }));
        assert_eq!(t.scales(), &[48.0]);
    }

    #[test]
    fn dyadic_map_example() {
        let t = build_dyadic_tower(8.0, 1.0, &DyadicOptions::default()).unwrap();
        assert_eq!(t.scales(), &[1.0, 2.0, 4.0, 8.0, 16.0]);
        // [3, 4] at width 1 sits inside [2, 4] at width 2.
        let c0 = t.cover(0);
        let e = (0..c0.len()).find(|&i| c0.elements()[i] == Extent::Interval(Interval::closed(3.0, 4.0))).unwrap();
        let img = t.map_between(0, 1)[e];
        assert_eq!(t.cover(1).elements()[img], Extent::Interval(Interval::closed(2.0, 4.0)));
    }

    #[test]
    fn dyadic_thickened_is_a_tower() {
        let opts = DyadicOptions { scales: None, thicken: Some(0.25) };
        let t = build_dyadic_tower(4.0, 1.0, &opts).unwrap();
        assert!(t.certificate().is_none());
        assert_eq!(t.len(), 4);
    }
}
