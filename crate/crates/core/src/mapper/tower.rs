use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{same_complex, SimplicialComplex, SimplicialMap, VertexId};
use crate::error::{Error, Result};

/// A finite sequence of complexes on an increasing scale grid, joined by
/// simplicial maps between consecutive complexes.
#[derive(Clone, Debug)]
pub struct ComplexTower {
    scales: Vec<f64>,
    complexes: Vec<Arc<SimplicialComplex>>,
    maps: Vec<SimplicialMap>,
}

impl ComplexTower {
    pub fn new(scales: Vec<f64>, complexes: Vec<Arc<SimplicialComplex>>, maps: Vec<SimplicialMap>) -> Result<Self> {
        if scales.is_empty() || scales.len() != complexes.len() || maps.len() + 1 != scales.len() {
            return Err(Error::InvalidTower(format!(
                "{} scales, {} complexes and {} maps",
                scales.len(),
                complexes.len(),
                maps.len()
            )));
        }
        if scales.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidTower("scales must be strictly increasing".into()));
        }
        for (i, m) in maps.iter().enumerate() {
            if !same_complex(m.source(), &complexes[i]) || !same_complex(m.target(), &complexes[i + 1]) {
                return Err(Error::InvalidTower(format!("map {i} does not join complexes {i} and {}", i + 1)));
            }
            m.check_simplicial()?;
        }
        Ok(Self { scales, complexes, maps })
    }

    /// Builds the maps from vertex maps between consecutive complexes.
    pub fn from_vertex_maps(
        scales: Vec<f64>,
        complexes: Vec<SimplicialComplex>,
        vertex_maps: Vec<BTreeMap<VertexId, VertexId>>,
    ) -> Result<Self> {
        let complexes: Vec<Arc<SimplicialComplex>> = complexes.into_iter().map(Arc::new).collect();
        if vertex_maps.len() + 1 != complexes.len() {
            return Err(Error::InvalidTower("expected one vertex map per consecutive pair".into()));
        }
        let maps = vertex_maps
            .into_iter()
            .enumerate()
            .map(|(i, vm)| SimplicialMap::new(complexes[i].clone(), complexes[i + 1].clone(), vm))
            .collect::<Result<Vec<_>>>()?;
        Self::new(scales, complexes, maps)
    }

    /// The same complex at every scale with identity maps.
    pub fn constant(scales: Vec<f64>, k: SimplicialComplex) -> Result<Self> {
        let k = Arc::new(k);
        let maps = (1..scales.len()).map(|_| SimplicialMap::identity(k.clone())).collect();
        Self::new(scales.clone(), vec![k; scales.len()], maps)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn complexes(&self) -> &[Arc<SimplicialComplex>] {
        &self.complexes
    }

    pub fn maps(&self) -> &[SimplicialMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// The same tower on a new grid of the same length.
    pub fn with_scales(&self, scales: Vec<f64>) -> Result<Self> {
        Self::new(scales, self.complexes.clone(), self.maps.clone())
    }

    /// Natural-log reindexing of the scale axis.
    pub fn reindex_log(&self) -> Result<Self> {
        if let Some(&s) = self.scales.iter().find(|s| **s <= 0.0) {
            return Err(Error::NonPositiveScale(s));
        }
        self.with_scales(self.scales.iter().map(|s| s.ln()).collect())
    }

    /// Replaces map `i` by another map with the same source and target.
    pub fn with_map(&self, i: usize, map: SimplicialMap) -> Result<Self> {
        let mut maps = self.maps.clone();
        maps[i] = map;
        Self::new(self.scales.clone(), self.complexes.clone(), maps)
    }
}

/// Checks that per-scale vertex bijections `phi[i]` from `a` to `b` are
/// simplicial isomorphisms commuting with the tower maps.
pub fn is_tower_isomorphism(a: &ComplexTower, b: &ComplexTower, phi: &[BTreeMap<VertexId, VertexId>]) -> bool {
    if a.len() != b.len() || phi.len() != a.len() {
        return false;
    }
    for i in 0..a.len() {
        let (ka, kb) = (&a.complexes[i], &b.complexes[i]);
        let p = &phi[i];
        if ka.num_simplices() != kb.num_simplices() || p.len() != ka.vertices().len() {
            return false;
        }
        let image: std::collections::BTreeSet<VertexId> = p.values().copied().collect();
        if image != *kb.vertices() {
            return false;
        }
        for s in ka.all_simplices() {
            let Some(img) = s.iter().map(|v| p.get(v).copied()).collect::<Option<Vec<_>>>() else {
                return false;
            };
            if !kb.contains(&crate::complex::normalize(&img)) {
                return false;
            }
        }
        if i + 1 < a.len() {
            let next = &phi[i + 1];
            for (&v, &w) in p {
                if next.get(&a.maps[i].apply(v)) != Some(&b.maps[i].apply(w)) {
                    return false;
                }
            }
        }
    }
    true
}
