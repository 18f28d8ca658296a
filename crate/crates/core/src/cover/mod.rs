//! Covers of a codomain (a real segment or a finite metric space) and
//! towers of covers connected by maps of covers.

mod builders;
mod goodness;
mod ops;

pub use builders::{
    build_ball_tower, build_dyadic_tower, build_net_tower, build_nets, is_nu_sample, DyadicOptions, Sample,
};
pub use goodness::{default_probes, verify_goodness, ContainmentFailure, DiameterFailure, GoodnessReport, Probe};
pub use ops::{min_interleaving, reindex_log, truncate};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{FiniteMetricSpace, PointId};
use crate::error::{Error, Result};

/// Relative tolerance used when matching a real scale against a grid value.
pub(crate) const SCALE_TOL: f64 = 1e-9;

pub(crate) fn scale_le(a: f64, b: f64) -> bool {
    a <= b + SCALE_TOL * b.abs().max(1.0)
}

pub(crate) fn scale_eq(a: f64, b: f64) -> bool {
    scale_le(a, b) && scale_le(b, a)
}

/// An interval of the real line with independently open or closed ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_open: bool,
    #[serde(default)]
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Self {
        Self { lo, hi, lo_open, hi_open }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (x == self.lo && !self.lo_open)) && (x < self.hi || (x == self.hi && !self.hi_open))
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = match self.lo.partial_cmp(&other.lo) {
            Some(std::cmp::Ordering::Greater) => (self.lo, self.lo_open),
            Some(std::cmp::Ordering::Less) => (other.lo, other.lo_open),
            _ => (self.lo, self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Less) => (self.hi, self.hi_open),
            Some(std::cmp::Ordering::Greater) => (other.hi, other.hi_open),
            _ => (self.hi, self.hi_open || other.hi_open),
        };
        Interval { lo, hi, lo_open, hi_open }
    }

    pub fn meets(&self, other: &Interval) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Exact subset test honoring end flags. The empty interval is
    /// contained in everything.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        if other.is_empty() {
            return true;
        }
        let lo_ok = other.lo > self.lo || (other.lo == self.lo && (!self.lo_open || other.lo_open));
        let hi_ok = other.hi < self.hi || (other.hi == self.hi && (!self.hi_open || other.hi_open));
        lo_ok && hi_ok
    }

    pub fn diameter(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// Shape of a cover element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extent {
    Interval(Interval),
    /// Closed ball `{z : d(center, z) <= radius}`.
    Ball {
        center: PointId,
        radius: f64,
    },
    Set {
        points: Vec<PointId>,
    },
}

/// The space a cover covers.
#[derive(Clone, Debug)]
pub enum Codomain {
    /// The closed segment `[lo, hi]`.
    Segment {
        lo: f64,
        hi: f64,
    },
    Metric(Arc<FiniteMetricSpace>),
}

impl PartialEq for Codomain {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Codomain::Segment { lo, hi }, Codomain::Segment { lo: l2, hi: h2 }) => lo == l2 && hi == h2,
            (Codomain::Metric(a), Codomain::Metric(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Codomain {
    pub fn diameter(&self) -> f64 {
        match self {
            Codomain::Segment { lo, hi } => hi - lo,
            Codomain::Metric(m) => m.diameter(),
        }
    }

    pub fn segment(&self) -> Option<Interval> {
        match self {
            Codomain::Segment { lo, hi } => Some(Interval::closed(*lo, *hi)),
            Codomain::Metric(_) => None,
        }
    }

    pub fn metric(&self) -> Option<&Arc<FiniteMetricSpace>> {
        match self {
            Codomain::Metric(m) => Some(m),
            Codomain::Segment { .. } => None,
        }
    }
}

/// A finite cover; element ids are positions in `elements`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    codomain: Codomain,
    elements: Vec<Extent>,
}

impl Cover {
    /// Validates element shapes against the codomain and checks that the
    /// union of the elements covers it.
    pub fn new(codomain: Codomain, elements: Vec<Extent>) -> Result<Self> {
        for (i, e) in elements.iter().enumerate() {
            match (&codomain, e) {
                (Codomain::Segment { lo, hi }, Extent::Interval(iv)) => {
                    let degenerate_ok = lo == hi && iv.lo == iv.hi && !iv.lo_open && !iv.hi_open;
                    if !(iv.lo < iv.hi || degenerate_ok) || iv.lo.is_nan() || iv.hi.is_nan() {
                        return Err(Error::InvalidElement(format!("element {i}: interval {iv} is empty")));
                    }
                }
                (Codomain::Metric(m), Extent::Ball { center, radius }) => {
                    if !m.contains(*center) {
                        return Err(Error::UnknownPoint(*center));
                    }
                    if radius.is_nan() || *radius < 0.0 {
                        return Err(Error::InvalidElement(format!("element {i}: negative radius {radius}")));
                    }
                }
                (Codomain::Metric(m), Extent::Set { points }) => {
                    if let Some(p) = points.iter().find(|p| !m.contains(**p)) {
                        return Err(Error::UnknownPoint(*p));
                    }
                }
                _ => return Err(Error::InvalidElement(format!("element {i} does not match the codomain type"))),
            }
        }
        let cover = Self { codomain, elements };
        cover.check_covering()?;
        Ok(cover)
    }

    fn check_covering(&self) -> Result<()> {
        match &self.codomain {
            Codomain::Segment { lo, hi } => {
                let seg = Interval::closed(*lo, *hi);
                let mut ivs: Vec<Interval> = self
                    .elements
                    .iter()
                    .filter_map(|e| match e {
                        Extent::Interval(iv) => Some(iv.intersect(&seg)),
                        _ => None,
                    })
                    .filter(|iv| !iv.is_empty())
                    .collect();
                ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.lo_open.cmp(&b.lo_open)));
                match first_gap(&ivs, *lo, *hi) {
                    Some(x) => Err(Error::NotACover(x.to_string())),
                    None => Ok(()),
                }
            }
            Codomain::Metric(m) => {
                for &p in m.ids() {
                    if !(0..self.elements.len()).any(|i| self.contains_point(i, p)) {
                        return Err(Error::NotACover(format!("point {p}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn codomain(&self) -> &Codomain {
        &self.codomain
    }

    pub fn elements(&self) -> &[Extent] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Interval element `i` restricted to the codomain segment.
    pub fn clipped_interval(&self, i: usize) -> Option<Interval> {
        match (&self.elements[i], self.codomain.segment()) {
            (Extent::Interval(iv), Some(seg)) => Some(iv.intersect(&seg)),
            _ => None,
        }
    }

    pub fn contains_value(&self, i: usize, x: f64) -> bool {
        match &self.elements[i] {
            Extent::Interval(iv) => iv.contains(x),
            _ => false,
        }
    }

    pub fn contains_point(&self, i: usize, p: PointId) -> bool {
        let Some(m) = self.codomain.metric() else {
            return false;
        };
        match &self.elements[i] {
            Extent::Ball { center, radius } => m.dist(*center, p).is_ok_and(|d| d <= *radius),
            Extent::Set { points } => points.contains(&p),
            Extent::Interval(_) => false,
        }
    }

    /// Codomain points of a metric-cover element, in id order.
    pub fn members(&self, i: usize) -> Vec<PointId> {
        match self.codomain.metric() {
            Some(m) => m.ids().iter().copied().filter(|&p| self.contains_point(i, p)).collect(),
            None => Vec::new(),
        }
    }

    /// Diameter of element `i` as a subset of the codomain.
    pub fn element_diameter(&self, i: usize) -> f64 {
        match &self.codomain {
            Codomain::Segment { .. } => self.clipped_interval(i).map_or(0.0, |iv| iv.diameter()),
            Codomain::Metric(m) => m.diameter_of(&self.members(i)).unwrap_or(0.0),
        }
    }

    /// Whether element `i` of `self` lies inside element `j` of `other`
    /// (both as subsets of the shared codomain).
    pub fn element_within(&self, i: usize, other: &Cover, j: usize) -> bool {
        match (self.clipped_interval(i), other.clipped_interval(j)) {
            (Some(a), Some(b)) => b.contains_interval(&a),
            _ => {
                let inner = self.members(i);
                inner.iter().all(|&p| other.contains_point(j, p))
            }
        }
    }
}

/// Returns a codomain point not covered by the sorted intervals, if any.
fn first_gap(sorted: &[Interval], lo: f64, hi: f64) -> Option<f64> {
    // Every point < pos is covered; pos itself is covered iff pos_covered.
    let mut pos = lo;
    let mut pos_covered = false;
    for iv in sorted {
        if pos_covered {
            if iv.lo > pos {
                return Some(0.5 * (pos + iv.lo));
            }
        } else if !iv.contains(pos) {
            if iv.lo < pos {
                continue;
            }
            return Some(pos);
        }
        if iv.hi > pos {
            pos = iv.hi;
            pos_covered = !iv.hi_open;
        } else if iv.hi == pos && !iv.hi_open {
            pos_covered = true;
        }
    }
    if !pos_covered && pos <= hi {
        Some(pos)
    } else if pos < hi {
        Some(0.5 * (pos + hi))
    } else {
        None
    }
}

/// A `(c, s)` goodness certificate attached by a builder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub c: f64,
    pub s: f64,
}

/// Covers on a strictly increasing finite scale grid, with maps of covers
/// between consecutive scales. Scales between grid values use the cover at
/// the largest grid value not exceeding them.
#[derive(Clone, Debug)]
pub struct CoverTower {
    scales: Vec<f64>,
    covers: Vec<Cover>,
    maps: Vec<Vec<usize>>,
    certificate: Option<Certificate>,
}

impl CoverTower {
    /// `maps[i]` sends element ids of `covers[i]` to element ids of
    /// `covers[i + 1]`. Containment of every element in its image is checked.
    pub fn new(
        scales: Vec<f64>,
        covers: Vec<Cover>,
        maps: Vec<Vec<usize>>,
        certificate: Option<Certificate>,
    ) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::InvalidTower("no scales".into()));
        }
        if scales.len() != covers.len() || maps.len() + 1 != scales.len() {
            return Err(Error::InvalidTower(format!(
                "{} scales, {} covers and {} maps",
                scales.len(),
                covers.len(),
                maps.len()
            )));
        }
        if let Some(w) = scales.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidTower(format!("scales not increasing at {} -> {}", w[0], w[1])));
        }
        if scales.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidTower("non-finite scale".into()));
        }
        if covers.iter().any(|c| c.codomain() != covers[0].codomain()) {
            return Err(Error::CodomainMismatch);
        }
        for (i, m) in maps.iter().enumerate() {
            if m.len() != covers[i].len() {
                return Err(Error::InvalidTower(format!("map {i} is not total")));
            }
            for (e, &t) in m.iter().enumerate() {
                if t >= covers[i + 1].len() {
                    return Err(Error::InvalidTower(format!("map {i} sends element {e} to missing element {t}")));
                }
                if !covers[i].element_within(e, &covers[i + 1], t) {
                    return Err(Error::InvalidTower(format!(
                        "element {e} at scale {} is not contained in its image {t} at scale {}",
                        scales[i],
                        scales[i + 1]
                    )));
                }
            }
        }
        Ok(Self { scales, covers, maps, certificate })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn cover(&self, i: usize) -> &Cover {
        &self.covers[i]
    }

    /// Map of covers from scale index `i` to `i + 1`.
    pub fn step_map(&self, i: usize) -> &[usize] {
        &self.maps[i]
    }

    pub fn certificate(&self) -> Option<Certificate> {
        self.certificate
    }

    pub fn with_certificate(mut self, certificate: Option<Certificate>) -> Self {
        self.certificate = certificate;
        self
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.scales[0]
    }

    pub fn top(&self) -> f64 {
        *self.scales.last().unwrap()
    }

    pub fn codomain(&self) -> &Codomain {
        self.covers[0].codomain()
    }

    /// Composite map of covers from index `i` to index `j >= i`.
    pub fn map_between(&self, i: usize, j: usize) -> Vec<usize> {
        assert!(i <= j && j < self.len());
        let mut m: Vec<usize> = (0..self.covers[i].len()).collect();
        for step in i..j {
            for x in m.iter_mut() {
                *x = self.maps[step][*x];
            }
        }
        m
    }

    /// Largest grid index whose scale does not exceed `eps`.
    pub fn index_at_or_below(&self, eps: f64) -> Option<usize> {
        self.scales.iter().rposition(|&s| scale_le(s, eps))
    }

    /// Smallest grid index whose scale is at least `eps`.
    pub fn index_at_or_above(&self, eps: f64) -> Option<usize> {
        self.scales.iter().position(|&s| scale_le(eps, s))
    }

    /// Smallest element diameter over the whole tower.
    pub fn min_element_diameter(&self) -> f64 {
        self.covers.iter().flat_map(|c| (0..c.len()).map(move |i| c.element_diameter(i))).fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn from_parts_unchecked(
        scales: Vec<f64>,
        covers: Vec<Cover>,
        maps: Vec<Vec<usize>>,
        certificate: Option<Certificate>,
    ) -> Self {
        Self { scales, covers, maps, certificate }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(lo: f64, hi: f64) -> Codomain {
        Codomain::Segment { lo, hi }
    }

    #[test]
    fn interval_containment_honors_flags() {
        let closed = Interval::closed(0.0, 1.0);
        let open = Interval::open(0.0, 1.0);
        assert!(closed.contains_interval(&open));
        assert!(!open.contains_interval(&closed));
        assert!(open.contains_interval(&open));
        assert!(!Interval::closed(0.0, 0.5).contains_interval(&Interval::new(0.0, 0.6, false, true)));
        assert!(open.intersect(&Interval::closed(1.0, 2.0)).is_empty());
        assert!(closed.meets(&Interval::closed(1.0, 2.0)));
    }

    #[test]
    fn coverage_gap_detection() {
        let ok = Cover::new(
            seg(0.0, 2.0),
            vec![Extent::Interval(Interval::closed(0.0, 1.0)), Extent::Interval(Interval::new(1.0, 2.0, true, false))],
        );
        assert!(ok.is_ok());
        let gap = Cover::new(
            seg(0.0, 2.0),
            vec![
                Extent::Interval(Interval::new(0.0, 1.0, false, true)),
                Extent::Interval(Interval::new(1.0, 2.0, true, false)),
            ],
        );
        assert_eq!(gap.unwrap_err(), Error::NotACover("1".into()));
        let short = Cover::new(seg(0.0, 2.0), vec![Extent::Interval(Interval::closed(0.0, 1.5))]);
        assert!(short.is_err());
        let open_left = Cover::new(seg(0.0, 2.0), vec![Extent::Interval(Interval::new(0.0, 3.0, true, false))]);
        assert_eq!(open_left.unwrap_err(), Error::NotACover("0".into()));
        let middle = Cover::new(
            seg(0.0, 3.0),
            vec![Extent::Interval(Interval::closed(0.0, 1.0)), Extent::Interval(Interval::closed(2.0, 3.0))],
        );
        assert_eq!(middle.unwrap_err(), Error::NotACover("1.5".into()));
    }

    #[test]
    fn wrong_element_kind_rejected() {
        let r = Cover::new(seg(0.0, 1.0), vec![Extent::Ball { center: 0, radius: 1.0 }]);
        assert!(matches!(r, Err(Error::InvalidElement(_))));
        let r = Cover::new(seg(0.0, 1.0), vec![Extent::Interval(Interval::closed(1.0, 0.0))]);
        assert!(matches!(r, Err(Error::InvalidElement(_))));
    }

    #[test]
    fn metric_cover_membership() {
        let m = Arc::new(FiniteMetricSpace::euclidean(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]));
        let c = Cover::new(
            Codomain::Metric(m.clone()),
            vec![Extent::Ball { center: 0, radius: 1.0 }, Extent::Set { points: vec![2] }],
        )
        .unwrap();
        assert_eq!(c.members(0), vec![0, 1]);
        assert_eq!(c.element_diameter(0), 1.0);
        let missing = Cover::new(Codomain::Metric(m), vec![Extent::Ball { center: 0, radius: 1.0 }]);
        assert_eq!(missing.unwrap_err(), Error::NotACover("point 2".into()));
    }

    #[test]
    fn tower_rejects_non_containment() {
        let a = Cover::new(seg(0.0, 2.0), vec![Extent::Interval(Interval::closed(0.0, 2.0))]).unwrap();
        let b = Cover::new(
            seg(0.0, 2.0),
            vec![Extent::Interval(Interval::closed(0.0, 1.0)), Extent::Interval(Interval::closed(1.0, 2.0))],
        )
        .unwrap();
        let r = CoverTower::new(vec![1.0, 2.0], vec![a.clone(), b.clone()], vec![vec![0]], None);
        assert!(matches!(r, Err(Error::InvalidTower(_))));
        let t = CoverTower::new(vec![1.0, 2.0], vec![b, a], vec![vec![0, 0]], None).unwrap();
        assert_eq!(t.map_between(0, 1), vec![0, 0]);
        assert_eq!(t.map_between(1, 1), vec![0]);
        assert!(CoverTower::new(vec![2.0, 1.0], t.covers().to_vec(), vec![vec![0, 0]], None).is_err());
    }
}
