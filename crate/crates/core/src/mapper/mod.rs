//! Pullback covers, nerves, mapper and multiscale mapper.

mod exact;
mod tower;

pub use exact::{ExactSupport, PartialEdge};
pub use tower::{is_tower_isomorphism, ComplexTower};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{
    connected_components, one_skeleton, PointId, Simplex, SimplicialComplex, SimplicialMap, VertexFunction, VertexId,
};
use crate::cover::{Codomain, Cover, CoverTower, Extent, Interval};
use crate::error::{Error, Result};
use crate::par;
use exact::{maximal_stabbed, PlDomain};

/// A function on the vertices of a complex: real-valued (extended
/// piecewise linearly) or valued in a finite metric space.
#[derive(Clone, Debug)]
pub enum Lens {
    Real(VertexFunction<f64>),
    Point(VertexFunction<PointId>),
}

impl Lens {
    pub fn real(&self) -> Option<&VertexFunction<f64>> {
        match self {
            Lens::Real(f) => Some(f),
            Lens::Point(_) => None,
        }
    }

    fn check(&self, k: &SimplicialComplex, codomain: &Codomain) -> Result<()> {
        match (self, codomain) {
            (Lens::Real(f), Codomain::Segment { lo, hi }) => {
                f.check_total(k)?;
                for &v in k.vertices() {
                    let x = *f.get(v)?;
                    if !(x >= *lo && x <= *hi) {
                        return Err(Error::Precondition(format!(
                            "value {x} at vertex {v} lies outside the codomain [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(())
            }
            (Lens::Point(f), Codomain::Metric(m)) => {
                f.check_total(k)?;
                for &v in k.vertices() {
                    let p = *f.get(v)?;
                    if !m.contains(p) {
                        return Err(Error::UnknownPoint(p));
                    }
                }
                Ok(())
            }
            _ => Err(Error::Precondition("function values do not match the cover codomain".into())),
        }
    }

    /// Distance in the codomain between the values at two vertices.
    pub fn value_distance(&self, codomain: &Codomain, a: VertexId, b: VertexId) -> Result<f64> {
        match (self, codomain) {
            (Lens::Real(f), _) => Ok((f.get(a)? - f.get(b)?).abs()),
            (Lens::Point(f), Codomain::Metric(m)) => m.dist(*f.get(a)?, *f.get(b)?),
            (Lens::Point(_), Codomain::Segment { .. }) => Err(Error::NeedsRealFunction("segment codomain")),
        }
    }
}

/// How preimages are decomposed into connected pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exact components of the PL preimage restricted to the 1-skeleton.
    Exact,
    /// Exact components of the PL preimage in the full complex.
    ExactFull,
    /// Graph components of the vertex preimage in the 1-skeleton.
    Combinatorial,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-pl" => Ok(Mode::Exact),
            "exact-full" => Ok(Mode::ExactFull),
            "combinatorial" => Ok(Mode::Combinatorial),
            other => Err(Error::Precondition(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    Vertices { vertices: Vec<VertexId> },
    Exact(ExactSupport),
}

/// One connected piece of the preimage of a cover element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackElement {
    /// Id of the cover element this piece comes from.
    pub parent: usize,
    /// Position among the pieces of the same parent.
    pub component: usize,
    /// Smallest simplex of the piece (by dimension, then lexicographically);
    /// a stable label across recomputation.
    pub key: Simplex,
    pub support: Support,
}

impl PullbackElement {
    /// Vertices of the domain lying in the piece.
    pub fn vertices(&self) -> &[VertexId] {
        match &self.support {
            Support::Vertices { vertices } => vertices,
            Support::Exact(s) => &s.vertices,
        }
    }
}

/// The pullback of a cover, with elements sorted by `(parent, key)`.
#[derive(Clone, Debug)]
pub struct PullbackCover {
    mode: Mode,
    elements: Vec<PullbackElement>,
    domain: Option<Arc<PlDomain>>,
    /// Interval of the parent element, exact modes only.
    parent_interval: Vec<Interval>,
    /// For every domain cell (exact) or vertex (combinatorial), the elements
    /// containing it.
    incidence: BTreeMap<Unit, Vec<usize>>,
}

/// A cell index (exact modes) or vertex id (combinatorial mode).
type Unit = u64;

impl PullbackCover {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn elements(&self) -> &[PullbackElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn units(&self, e: usize) -> Vec<Unit> {
        match &self.elements[e].support {
            Support::Vertices { vertices } => vertices.iter().map(|&v| v as Unit).collect(),
            Support::Exact(s) => s.cells.iter().map(|&c| c as Unit).collect(),
        }
    }

    /// Elements whose support contains vertex `v`.
    pub fn elements_containing_vertex(&self, v: VertexId) -> Vec<usize> {
        let unit = match &self.domain {
            Some(d) => match d.index.get(&vec![v]) {
                Some(&c) => c as Unit,
                None => return Vec::new(),
            },
            None => v as Unit,
        };
        self.incidence.get(&unit).cloned().unwrap_or_default()
    }
}

/// Shared per-domain state reused across the scales of a tower.
struct Prepared {
    mode: Mode,
    domain: Option<Arc<PlDomain>>,
    graph: Option<crate::complex::Graph>,
}

fn prepare(k: &SimplicialComplex, lens: &Lens, codomain: &Codomain, mode: Mode) -> Result<Prepared> {
    lens.check(k, codomain)?;
    match mode {
        Mode::Exact | Mode::ExactFull => {
            let f = match (lens, codomain) {
                (Lens::Real(f), Codomain::Segment { .. }) => f,
                _ => return Err(Error::NeedsRealFunction("exact mode")),
            };
            let dom = if mode == Mode::Exact { PlDomain::new(&k.skeleton(1), f)? } else { PlDomain::new(k, f)? };
            Ok(Prepared { mode, domain: Some(Arc::new(dom)), graph: None })
        }
        Mode::Combinatorial => Ok(Prepared { mode, domain: None, graph: Some(one_skeleton(k)) }),
    }
}

fn pullback_prepared(prep: &Prepared, lens: &Lens, cover: &Cover) -> Result<PullbackCover> {
    let pieces: Vec<Vec<PullbackElement>> = match (&prep.domain, lens) {
        (Some(dom), Lens::Real(f)) => {
            let intervals: Vec<Interval> = cover
                .elements()
                .iter()
                .map(|e| match e {
                    Extent::Interval(iv) => Ok(*iv),
                    _ => Err(Error::NeedsRealFunction("exact mode")),
                })
                .collect::<Result<_>>()?;
            par::map(&intervals, |u| {
                dom.components(u)
                    .into_iter()
                    .map(|cells| {
                        let key = dom.cells[cells[0]].clone();
                        (key, Support::Exact(ExactSupport::from_cells(dom, u, f, cells)))
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .enumerate()
            .map(|(parent, comps)| {
                comps
                    .into_iter()
                    .enumerate()
                    .map(|(component, (key, support))| PullbackElement { parent, component, key, support })
                    .collect()
            })
            .collect()
        }
        _ => {
            let g = prep.graph.as_ref().expect("combinatorial mode has a graph");
            let vertices: Vec<VertexId> = g.vertices().collect();
            let blocks = par::map_range(cover.len(), |i| {
                let o: BTreeSet<VertexId> = vertices
                    .iter()
                    .copied()
                    .filter(|&v| match lens {
                        Lens::Real(f) => cover.contains_value(i, *f.get(v).unwrap()),
                        Lens::Point(f) => cover.contains_point(i, *f.get(v).unwrap()),
                    })
                    .collect();
                connected_components(&o, g)
            });
            blocks
                .into_iter()
                .enumerate()
                .map(|(parent, b)| {
                    Ok(b?
                        .into_iter()
                        .enumerate()
                        .map(|(component, vs)| PullbackElement {
                            parent,
                            component,
                            key: vec![vs[0]],
                            support: Support::Vertices { vertices: vs },
                        })
                        .collect())
                })
                .collect::<Result<_>>()?
        }
    };
    let mut elements: Vec<PullbackElement> = pieces.into_iter().flatten().collect();
    // Cells are ordered by (dimension, lex), so sorting by (parent, key
    // length, key) matches the component order within a parent.
    elements.sort_by(|a, b| (a.parent, a.key.len(), &a.key).cmp(&(b.parent, b.key.len(), &b.key)));
    let parent_interval = match prep.domain {
        Some(_) => elements
            .iter()
            .map(|e| match &cover.elements()[e.parent] {
                Extent::Interval(iv) => *iv,
                _ => unreachable!("exact pullbacks only accept interval covers"),
            })
            .collect(),
        None => Vec::new(),
    };
    let mut pc = PullbackCover {
        mode: prep.mode,
        elements,
        domain: prep.domain.clone(),
        parent_interval,
        incidence: BTreeMap::new(),
    };
    let mut incidence: BTreeMap<Unit, Vec<usize>> = BTreeMap::new();
    for e in 0..pc.len() {
        for u in pc.units(e) {
            incidence.entry(u).or_default().push(e);
        }
    }
    pc.incidence = incidence;
    Ok(pc)
}

/// Pullback of `cover` along `lens` on the complex `k`.
pub fn pullback(k: &SimplicialComplex, lens: &Lens, cover: &Cover, mode: Mode) -> Result<PullbackCover> {
    let prep = prepare(k, lens, cover.codomain(), mode)?;
    pullback_prepared(&prep, lens, cover)
}

/// Nerve of a pullback cover with simplices up to dimension `max_dim`.
/// Vertex `i` of the nerve is element `i` of the cover.
pub fn nerve(pc: &PullbackCover, max_dim: usize) -> SimplicialComplex {
    let mut maximal: Vec<Vec<VertexId>> = (0..pc.len() as VertexId).map(|i| vec![i]).collect();
    match &pc.domain {
        None => {
            for members in pc.incidence.values() {
                maximal.push(members.iter().map(|&e| e as VertexId).collect());
            }
        }
        Some(dom) => {
            for (&cell, members) in &pc.incidence {
                if members.len() < 2 {
                    continue;
                }
                let inside = dom.interior_values(cell as usize);
                let js: Vec<(usize, Interval)> =
                    members.iter().map(|&e| (e, pc.parent_interval[e].intersect(&inside))).collect();
                for set in maximal_stabbed(&js) {
                    maximal.push(set.into_iter().map(|e| e as VertexId).collect());
                }
            }
        }
    }
    SimplicialComplex::from_maximal_capped(maximal, Some(max_dim)).expect("nerve simplices are nonempty")
}

/// Mapper: the nerve of the pullback cover.
pub fn mapper(
    k: &SimplicialComplex,
    lens: &Lens,
    cover: &Cover,
    mode: Mode,
    max_dim: usize,
) -> Result<SimplicialComplex> {
    Ok(nerve(&pullback(k, lens, cover, mode)?, max_dim))
}

/// Map of pullback covers induced by a map of covers `xi` between the
/// parent covers: each element goes to the unique element over `xi(parent)`
/// containing it.
pub fn pullback_cover_map(pc: &PullbackCover, next: &PullbackCover, xi: &[usize]) -> Result<Vec<usize>> {
    if pc.mode != next.mode {
        return Err(Error::Precondition("pullback covers were built in different modes".into()));
    }
    let mut lookup: HashMap<(usize, Unit), usize> = HashMap::new();
    for (u, members) in &next.incidence {
        for &e in members {
            lookup.insert((next.elements[e].parent, *u), e);
        }
    }
    (0..pc.len())
        .map(|e| {
            let parent = xi[pc.elements[e].parent];
            let mut image = None;
            for u in pc.units(e) {
                let witness = || match &pc.domain {
                    Some(d) => format!("simplex {:?}", d.cells[u as usize]),
                    None => format!("vertex {u}"),
                };
                match lookup.get(&(parent, u)) {
                    None => return Err(Error::NoContainingElement { element: e, witness: witness() }),
                    Some(&t) if image.is_some_and(|i| i != t) => {
                        return Err(Error::NoContainingElement {
                            element: e,
                            witness: format!("{} splits across two pieces", witness()),
                        })
                    }
                    Some(&t) => image = Some(t),
                }
            }
            Ok(image.expect("pullback elements are nonempty"))
        })
        .collect()
}

/// Pullbacks of every cover of a tower, computed in parallel over scales.
pub fn tower_pullbacks(
    tower: &CoverTower,
    lens: &Lens,
    k: &SimplicialComplex,
    mode: Mode,
) -> Result<Vec<PullbackCover>> {
    let prep = prepare(k, lens, tower.codomain(), mode)?;
    par::map(tower.covers(), |c| pullback_prepared(&prep, lens, c)).into_iter().collect()
}

/// Multiscale mapper: nerves of the pullbacks at every scale of the tower,
/// joined by the nerves of the pullback cover maps.
pub fn multiscale_mapper(
    tower: &CoverTower,
    lens: &Lens,
    k: &SimplicialComplex,
    mode: Mode,
    max_dim: usize,
) -> Result<ComplexTower> {
    let pbs = tower_pullbacks(tower, lens, k, mode)?;
    multiscale_from_pullbacks(tower, &pbs, max_dim)
}

/// Assembles the nerve tower from precomputed pullbacks.
pub fn multiscale_from_pullbacks(tower: &CoverTower, pbs: &[PullbackCover], max_dim: usize) -> Result<ComplexTower> {
    let complexes: Vec<Arc<SimplicialComplex>> = par::map(pbs, |pc| Arc::new(nerve(pc, max_dim)));
    let maps = (0..pbs.len() - 1)
        .map(|i| {
            let m = pullback_cover_map(&pbs[i], &pbs[i + 1], tower.step_map(i))?;
            let vm = m.iter().enumerate().map(|(a, &b)| (a as VertexId, b as VertexId)).collect();
            SimplicialMap::new(complexes[i].clone(), complexes[i + 1].clone(), vm)
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexTower::new(tower.scales().to_vec(), complexes, maps)
}

/// Outcome of [`check_min_diameter`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinDiameterReport {
    pub holds: bool,
    /// Smallest element diameter over the tower.
    pub kappa: f64,
    /// Edge with the largest value spread, and that spread.
    pub worst: Option<(Simplex, f64)>,
}

/// Checks that every simplex has image diameter at most the smallest cover
/// element diameter of the tower. The diameter of a simplex image is the
/// largest distance between values at two of its vertices, so checking edges
/// suffices.
pub fn check_min_diameter(k: &SimplicialComplex, lens: &Lens, tower: &CoverTower) -> Result<MinDiameterReport> {
    let kappa = tower.min_element_diameter();
    let mut worst: Option<(Simplex, f64)> = None;
    for e in k.simplices(1) {
        let d = lens.value_distance(tower.codomain(), e[0], e[1])?;
        if worst.as_ref().is_none_or(|(_, w)| d > *w) {
            worst = Some((e.clone(), d));
        }
    }
    let holds = worst.as_ref().is_none_or(|(_, w)| *w <= kappa);
    Ok(MinDiameterReport { holds, kappa, worst })
}

/// Matches the elements of a full-complex exact pullback with those of the
/// 1-skeleton exact pullback over the same cover, by restricting each full
/// element to its vertices and edges. Returns the bijection (full element
/// index to skeleton element index) if every restriction is exactly one
/// skeleton element.
pub fn skeleton_correspondence(full: &PullbackCover, skel: &PullbackCover) -> Option<Vec<usize>> {
    if full.len() != skel.len() {
        return None;
    }
    let mut index: HashMap<(usize, Vec<Simplex>), usize> = HashMap::new();
    for (i, e) in skel.elements.iter().enumerate() {
        let Support::Exact(s) = &e.support else {
            return None;
        };
        index.insert((e.parent, s.low_simplices()), i);
    }
    let mut seen = vec![false; skel.len()];
    full.elements
        .iter()
        .map(|e| {
            let Support::Exact(s) = &e.support else {
                return None;
            };
            let j = *index.get(&(e.parent, s.low_simplices()))?;
            (!std::mem::replace(&mut seen[j], true)).then_some(j)
        })
        .collect()
}
