//! Reindexing, truncation and interleaving distance of cover towers.

use crate::cover::{scale_le, Certificate, CoverTower};
use crate::error::{Error, Result};

/// Replaces every scale by its natural logarithm. Covers and maps are kept;
/// the goodness certificate refers to the original scale axis and is
/// dropped.
pub fn reindex_log(tower: &CoverTower) -> Result<CoverTower> {
    if let Some(&s) = tower.scales().iter().find(|s| **s <= 0.0) {
        return Err(Error::NonPositiveScale(s));
    }
    let scales = tower.scales().iter().map(|s| s.ln()).collect();
    Ok(CoverTower::from_parts_unchecked(
        scales,
        tower.covers().to_vec(),
        (0..tower.len() - 1).map(|i| tower.step_map(i).to_vec()).collect(),
        None,
    ))
}

/// Keeps the scales at or above `eps0`. A certificate `(c, s)` becomes
/// `(c, new resolution)`.
pub fn truncate(tower: &CoverTower, eps0: f64) -> Result<CoverTower> {
    let (res, top) = (tower.resolution(), tower.top());
    if eps0 < res || eps0 > top {
        return Err(Error::TruncationOutOfRange { eps0, res, top });
    }
    let start = tower.index_at_or_above(eps0).unwrap();
    let scales = tower.scales()[start..].to_vec();
    let certificate = tower.certificate().map(|c| Certificate { c: c.c, s: scales[0] });
    Ok(CoverTower::from_parts_unchecked(
        scales,
        tower.covers()[start..].to_vec(),
        (start..tower.len() - 1).map(|i| tower.step_map(i).to_vec()).collect(),
        certificate,
    ))
}

/// Whether every element of `a` at every grid scale ε is contained in some
/// element of `b` at scale ε + η (using the cover at the largest grid scale
/// of `b` not exceeding ε + η).
fn shifts_into(a: &CoverTower, b: &CoverTower, eta: f64) -> bool {
    a.scales().iter().enumerate().all(|(i, &eps)| {
        let Some(j) = b.index_at_or_below(eps + eta) else {
            return false;
        };
        let (ca, cb) = (a.cover(i), b.cover(j));
        (0..ca.len()).all(|e| (0..cb.len()).any(|f| ca.element_within(e, cb, f)))
    })
}

/// Smallest η, among 0 and the positive differences of grid scales, such
/// that the two towers are η-interleaved on their grids; `+∞` if none is.
pub fn min_interleaving(u: &CoverTower, v: &CoverTower) -> Result<f64> {
    if u.codomain() != v.codomain() {
        return Err(Error::CodomainMismatch);
    }
    if !(scale_le(u.resolution(), v.resolution()) && scale_le(v.resolution(), u.resolution())) {
        return Err(Error::ResolutionMismatch(u.resolution(), v.resolution()));
    }
    let mut candidates = vec![0.0];
    for &a in u.scales() {
        for &b in v.scales() {
            if b > a {
                candidates.push(b - a);
            }
            if a > b {
                candidates.push(a - b);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    Ok(candidates.into_iter().find(|&eta| shifts_into(u, v, eta) && shifts_into(v, u, eta)).unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{build_ball_tower, Sample};

    fn tower() -> CoverTower {
        let sample = Sample::Line { points: vec![0.0, 1.0, 2.0], lo: 0.0, hi: 2.0 };
        build_ball_tower(&sample, 0.5, &[1.0, 2.0, 4.0, 8.0]).unwrap()
    }

    #[test]
    fn reindex_logs_scales() {
        let sample = Sample::Line { points: vec![0.0], lo: 0.0, hi: 0.0 };
        let e = std::f64::consts::E;
        let t = build_ball_tower(&sample, 0.0, &[1.0, e, e * e]).unwrap();
        let r = reindex_log(&t).unwrap();
        for (got, want) in r.scales().iter().zip([0.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(r.covers(), t.covers());
        assert!(r.certificate().is_none());
    }

    #[test]
    fn truncate_filters() {
        let t = tower();
        let tr = truncate(&t, 3.0).unwrap();
        assert_eq!(tr.scales(), &[4.0, 8.0]);
        assert_eq!(tr.certificate().unwrap().s, 4.0);
        assert_eq!(truncate(&t, 1.0).unwrap().scales(), t.scales());
        assert!(truncate(&t, 9.0).is_err());
        assert!(truncate(&t, 0.5).is_err());
    }

    #[test]
    fn self_interleaving_is_zero() {
        let t = tower();
        assert_eq!(min_interleaving(&t, &t).unwrap(), 0.0);
    }
}
