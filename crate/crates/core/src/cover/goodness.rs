//! Certification of the `(c, s)` goodness conditions over a finite probe
//! family.

use serde::{Deserialize, Serialize};

use crate::complex::PointId;
use crate::cover::{scale_eq, Codomain, CoverTower, Extent, Interval};
use crate::error::{Error, Result};
use crate::par;

/// A subset `O` of the codomain whose containment is tested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Probe {
    Interval(Interval),
    Points { points: Vec<PointId> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterFailure {
    pub scale: f64,
    pub element: usize,
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentFailure {
    pub probe: Probe,
    pub diameter: f64,
    /// Grid scale at which no element contains the probe.
    pub scale: f64,
}

/// Outcome of [`verify_goodness`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub c: f64,
    pub s: f64,
    /// Condition 1: the resolution equals `s`.
    pub resolution_ok: bool,
    /// `s` exceeds the codomain diameter, so no probe can reach it and
    /// condition 3 holds vacuously.
    pub vacuous: bool,
    /// Condition 2: every element at scale ε has diameter at most ε.
    pub diameter_ok: bool,
    /// Condition 3 over the probe family.
    pub containment_ok: bool,
    pub passed: bool,
    pub probes_checked: usize,
    /// Probes with diameter at least `s`.
    pub probes_applicable: usize,
    pub diameter_failures: Vec<DiameterFailure>,
    pub containment_failures: Vec<ContainmentFailure>,
}

impl Probe {
    fn diameter(&self, codomain: &Codomain) -> f64 {
        match (self, codomain) {
            (Probe::Interval(iv), Codomain::Segment { .. }) => iv.intersect(&codomain.segment().unwrap()).diameter(),
            (Probe::Points { points }, Codomain::Metric(m)) => m.diameter_of(points).unwrap_or(f64::INFINITY),
            _ => f64::NAN,
        }
    }
}

/// Every element of every cover in `towers`, as probes.
pub fn default_probes(towers: &[&CoverTower]) -> Vec<Probe> {
    let mut out = Vec::new();
    for t in towers {
        for cover in t.covers() {
            for i in 0..cover.len() {
                let p = match &cover.elements()[i] {
                    Extent::Interval(_) => Probe::Interval(cover.clipped_interval(i).unwrap()),
                    _ => Probe::Points { points: cover.members(i) },
                };
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Checks the three goodness conditions for `(c, s)`. Condition 3 is only
/// certified over `probes`: each probe `O` with `diam(O) >= s` must lie in
/// some element at the smallest grid scale at least `c * diam(O)` (the top
/// scale when the grid ends earlier).
pub fn verify_goodness(tower: &CoverTower, c: f64, s: f64, probes: &[Probe]) -> Result<GoodnessReport> {
    if probes.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let codomain = tower.codomain();
    for p in probes {
        match (p, codomain) {
            (Probe::Interval(_), Codomain::Segment { .. }) => {}
            (Probe::Points { points }, Codomain::Metric(m)) => {
                if let Some(q) = points.iter().find(|q| !m.contains(**q)) {
                    return Err(Error::UnknownPoint(*q));
                }
            }
            _ => return Err(Error::Precondition("probe kind does not match the codomain".into())),
        }
    }

    let resolution_ok = scale_eq(tower.resolution(), s);
    let vacuous = s > codomain.diameter();

    let mut diameter_failures = Vec::new();
    for (cover, &eps) in tower.covers().iter().zip(tower.scales()) {
        for i in 0..cover.len() {
            let d = cover.element_diameter(i);
            if d > eps {
                diameter_failures.push(DiameterFailure { scale: eps, element: i, diameter: d });
            }
        }
    }

    let results: Vec<Option<Option<ContainmentFailure>>> = par::map(probes, |probe| {
        let d = probe.diameter(codomain);
        if d < s {
            return None;
        }
        let idx = tower.index_at_or_above(c * d).unwrap_or(tower.len() - 1);
        let cover = tower.cover(idx);
        let inside = (0..cover.len()).any(|j| match probe {
            Probe::Interval(iv) => cover
                .clipped_interval(j)
                .is_some_and(|e| e.contains_interval(&iv.intersect(&codomain.segment().unwrap()))),
            Probe::Points { points } => points.iter().all(|&q| cover.contains_point(j, q)),
        });
        Some((!inside).then(|| ContainmentFailure { probe: probe.clone(), diameter: d, scale: tower.scales()[idx] }))
    });
    let probes_applicable = results.iter().filter(|r| r.is_some()).count();
    let containment_failures: Vec<ContainmentFailure> = results.into_iter().flatten().flatten().collect();

    let diameter_ok = diameter_failures.is_empty();
    let containment_ok = containment_failures.is_empty();
    Ok(GoodnessReport {
        c,
        s,
        resolution_ok,
        vacuous,
        diameter_ok,
        containment_ok,
        passed: resolution_ok && diameter_ok && containment_ok,
        probes_checked: probes.len(),
        probes_applicable,
        diameter_failures,
        containment_failures,
    })
}
