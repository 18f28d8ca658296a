//! Finite abstract simplicial complexes, graphs, simplicial maps and
//! vertex-valued functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

pub type VertexId = u32;

/// A simplex is a strictly increasing list of vertex ids.
pub type Simplex = Vec<VertexId>;

/// Returns the sorted, deduplicated form of `vertices`.
pub fn normalize(vertices: &[VertexId]) -> Simplex {
    let mut s = vertices.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Calls `visit` on every nonempty subset of `simplex` with at most
/// `max_len` vertices. Subsets inherit the sorted order.
pub fn for_each_face<T: Copy, F: FnMut(&[T])>(simplex: &[T], max_len: usize, mut visit: F) {
    let n = simplex.len();
    let mut buf = Vec::with_capacity(n);
    fn rec<T: Copy, F: FnMut(&[T])>(s: &[T], start: usize, max_len: usize, buf: &mut Vec<T>, visit: &mut F) {
        for i in start..s.len() {
            buf.push(s[i]);
            visit(buf);
            if buf.len() < max_len {
                rec(s, i + 1, max_len, buf, visit);
            }
            buf.pop();
        }
    }
    if max_len > 0 {
        rec(simplex, 0, max_len, &mut buf, &mut visit);
    }
}

/// A finite abstract simplicial complex, closed under taking faces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    vertices: BTreeSet<VertexId>,
    /// `by_dim[k]` holds the k-simplices.
    by_dim: Vec<BTreeSet<Simplex>>,
}

impl SimplicialComplex {
    /// Downward closure of the given maximal simplices.
    pub fn from_maximal<I, S>(maximal: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[VertexId]>,
    {
        Self::from_maximal_capped(maximal, None)
    }

    /// Downward closure truncated to simplices of dimension at most
    /// `max_dim` (when given).
    pub fn from_maximal_capped<I, S>(maximal: I, max_dim: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[VertexId]>,
    {
        let mut k = Self::default();
        for (index, s) in maximal.into_iter().enumerate() {
            let s = normalize(s.as_ref());
            if s.is_empty() {
                return Err(Error::EmptySimplex { index });
            }
            let cap = max_dim.map_or(s.len(), |d| (d + 1).min(s.len()));
            if k.contains(&s) {
                continue;
            }
            for_each_face(&s, cap, |f| {
                k.insert_raw(f);
            });
        }
        Ok(k)
    }

    fn insert_raw(&mut self, s: &[VertexId]) {
        let d = s.len() - 1;
        if self.by_dim.len() <= d {
            self.by_dim.resize_with(d + 1, BTreeSet::new);
        }
        if d == 0 {
            self.vertices.insert(s[0]);
        }
        self.by_dim[d].insert(s.to_vec());
    }

    /// Adds `s` with all of its faces.
    pub fn insert_closed(&mut self, s: &[VertexId]) {
        let s = normalize(s);
        if s.is_empty() || self.contains(&s) {
            return;
        }
        for_each_face(&s, s.len(), |f| self.insert_raw(f));
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn contains(&self, s: &[VertexId]) -> bool {
        match s.len() {
            0 => false,
            n => self.by_dim.get(n - 1).is_some_and(|set| set.contains(s)),
        }
    }

    /// Dimension of the complex; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.iter().rposition(|s| !s.is_empty())
    }

    /// The k-simplices in lexicographic order.
    pub fn simplices(&self, k: usize) -> impl Iterator<Item = &Simplex> {
        self.by_dim.get(k).into_iter().flat_map(|s| s.iter())
    }

    pub fn count(&self, k: usize) -> usize {
        self.by_dim.get(k).map_or(0, |s| s.len())
    }

    pub fn num_simplices(&self) -> usize {
        self.by_dim.iter().map(|s| s.len()).sum()
    }

    /// All simplices ordered by dimension, then lexicographically.
    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flat_map(|s| s.iter())
    }

    /// Maximal simplices (those that are not a proper face of another).
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        let mut out = Vec::new();
        for d in (0..self.by_dim.len()).rev() {
            for s in &self.by_dim[d] {
                if !covered.contains(s) {
                    out.push(s.clone());
                }
                if s.len() > 1 {
                    for i in 0..s.len() {
                        let mut f = s.clone();
                        f.remove(i);
                        if let Some(face) = self.by_dim[d - 1].get(&f) {
                            covered.insert(face);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Subcomplex of simplices of dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        SimplicialComplex { vertices: self.vertices.clone(), by_dim: self.by_dim.iter().take(k + 1).cloned().collect() }
    }

    /// Position of each k-simplex in the lexicographic order.
    pub fn index_map(&self, k: usize) -> HashMap<Simplex, usize> {
        self.simplices(k).enumerate().map(|(i, s)| (s.clone(), i)).collect()
    }
}

/// Computes the 1-skeleton of `k` as a graph.
pub fn one_skeleton(k: &SimplicialComplex) -> Graph {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = k.vertices().iter().map(|&v| (v, BTreeSet::new())).collect();
    for e in k.simplices(1) {
        adj.get_mut(&e[0]).unwrap().insert(e[1]);
        adj.get_mut(&e[1]).unwrap().insert(e[0]);
    }
    Graph { adj }
}

/// An undirected simple graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> =
            vertices.into_iter().map(|v| (v, BTreeSet::new())).collect();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            for v in [a, b] {
                if !adj.contains_key(&v) {
                    return Err(Error::InvalidGraph(format!(
                        "edge ({a}, {b}) has endpoint {v} outside the vertex set"
                    )));
                }
            }
            adj.get_mut(&a).unwrap().insert(b);
            adj.get_mut(&b).unwrap().insert(a);
        }
        Ok(Self { adj })
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|n| n.iter().copied())
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().flat_map(|(&a, n)| n.range(a + 1..).map(move |&b| (a, b)))
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// The graph as a complex of dimension at most one.
    pub fn to_complex(&self) -> SimplicialComplex {
        let mut k = SimplicialComplex::default();
        for v in self.vertices() {
            k.insert_raw(&[v]);
        }
        for (a, b) in self.edges() {
            k.insert_raw(&[a, b]);
        }
        k
    }
}

/// Partitions `subset` into the connected components of the subgraph of `g`
/// it spans. Blocks are sorted, and ordered by their minimum vertex.
pub fn connected_components(subset: &BTreeSet<VertexId>, g: &Graph) -> Result<Vec<Vec<VertexId>>> {
    let ids: Vec<VertexId> = subset.iter().copied().collect();
    let pos: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for (i, &v) in ids.iter().enumerate() {
        if !g.contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        for w in g.neighbors(v) {
            if let Some(&j) = pos.get(&w) {
                uf.union(i, j);
            }
        }
    }
    Ok(uf.blocks().into_iter().map(|b| b.into_iter().map(|i| ids[i]).collect()).collect())
}

/// A vertex map between two complexes. Construction only checks that the
/// map is total and lands in the target vertex set; [`SimplicialMap::check_simplicial`]
/// verifies the simplicial condition.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    vertex_map: BTreeMap<VertexId, VertexId>,
}

impl SimplicialMap {
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        vertex_map: BTreeMap<VertexId, VertexId>,
    ) -> Result<Self> {
        for &v in source.vertices() {
            let w = *vertex_map.get(&v).ok_or(Error::PartialVertexMap(v))?;
            if !target.vertices().contains(&w) {
                return Err(Error::ImageOutsideTarget { from: v, to: w });
            }
        }
        let vertex_map = vertex_map.into_iter().filter(|(v, _)| source.vertices().contains(v)).collect();
        Ok(Self { source, target, vertex_map })
    }

    /// Like [`SimplicialMap::new`] but also rejects non-simplicial maps.
    pub fn new_simplicial(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        vertex_map: BTreeMap<VertexId, VertexId>,
    ) -> Result<Self> {
        let m = Self::new(source, target, vertex_map)?;
        m.check_simplicial()?;
        Ok(m)
    }

    pub fn identity(k: Arc<SimplicialComplex>) -> Self {
        let vertex_map = k.vertices().iter().map(|&v| (v, v)).collect();
        Self { source: k.clone(), target: k, vertex_map }
    }

    pub fn source(&self) -> &Arc<SimplicialComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SimplicialComplex> {
        &self.target
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.vertex_map
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.vertex_map[&v]
    }

    /// Image of a simplex as a sorted vertex set.
    pub fn image(&self, simplex: &[VertexId]) -> Simplex {
        normalize(&simplex.iter().map(|v| self.vertex_map[v]).collect::<Vec<_>>())
    }

    pub fn check_simplicial(&self) -> Result<()> {
        for s in self.source.all_simplices() {
            let image = self.image(s);
            if !self.target.contains(&image) {
                return Err(Error::NotSimplicial { simplex: s.clone(), image });
            }
        }
        Ok(())
    }

    pub fn is_simplicial(&self) -> bool {
        self.check_simplicial().is_ok()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SimplicialMap) -> Result<SimplicialMap> {
        if !same_complex(&self.target, &other.source) {
            return Err(Error::MismatchedMaps);
        }
        let vertex_map = self.vertex_map.iter().map(|(&v, &w)| (v, other.apply(w))).collect();
        Ok(SimplicialMap { source: self.source.clone(), target: other.target.clone(), vertex_map })
    }
}

pub(crate) fn same_complex(a: &Arc<SimplicialComplex>, b: &Arc<SimplicialComplex>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// True iff `h1(σ) ∪ h2(σ)` is a simplex of the target for every source simplex σ.
pub fn are_contiguous(h1: &SimplicialMap, h2: &SimplicialMap) -> Result<bool> {
    if !same_complex(&h1.source, &h2.source) || !same_complex(&h1.target, &h2.target) {
        return Err(Error::MismatchedMaps);
    }
    Ok(h1.source.all_simplices().all(|s| {
        let mut u = h1.image(s);
        u.extend(h2.image(s));
        h1.target.contains(&normalize(&u))
    }))
}

/// A function given by its values on a finite set of vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexFunction<T> {
    values: BTreeMap<VertexId, T>,
}

impl<T: Clone> VertexFunction<T> {
    pub fn new(values: BTreeMap<VertexId, T>) -> Self {
        Self { values }
    }

    pub fn from_pairs<I: IntoIterator<Item = (VertexId, T)>>(pairs: I) -> Self {
        Self { values: pairs.into_iter().collect() }
    }

    pub fn get(&self, v: VertexId) -> Result<&T> {
        self.values.get(&v).ok_or(Error::MissingValue(v))
    }

    pub fn values(&self) -> &BTreeMap<VertexId, T> {
        &self.values
    }

    /// Errors unless every vertex of `k` has a value.
    pub fn check_total(&self, k: &SimplicialComplex) -> Result<()> {
        match k.vertices().iter().find(|v| !self.values.contains_key(v)) {
            Some(&v) => Err(Error::MissingValue(v)),
            None => Ok(()),
        }
    }
}

impl VertexFunction<f64> {
    /// Sup-norm distance over the shared domain.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values.iter().filter_map(|(v, a)| other.values.get(v).map(|b| (a - b).abs())).fold(0.0, f64::max)
    }
}

pub type PointId = u32;

/// A finite (pseudo)metric space on integer point ids.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    ids: Vec<PointId>,
    pos: HashMap<PointId, usize>,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// `matrix` is row-major, `ids.len()` squared entries. Asymmetry,
    /// nonzero diagonal, negative or NaN entries are rejected. Triangle
    /// violations are allowed; see [`FiniteMetricSpace::triangle_violations`].
    pub fn new(ids: Vec<PointId>, matrix: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if matrix.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "expected {} entries for {n} points, got {}",
                n * n,
                matrix.len()
            )));
        }
        let pos: HashMap<PointId, usize> = ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        if pos.len() != n {
            return Err(Error::InvalidMetric("duplicate point id".into()));
        }
        for i in 0..n {
            if matrix[i * n + i] != 0.0 {
                return Err(Error::InvalidMetric(format!("d({0},{0}) is not zero", ids[i])));
            }
            for j in 0..n {
                let d = matrix[i * n + j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "d({},{}) = {d} is not a nonnegative number",
                        ids[i], ids[j]
                    )));
                }
                if d != matrix[j * n + i] {
                    return Err(Error::InvalidMetric(format!("d({},{}) != d({},{})", ids[i], ids[j], ids[j], ids[i])));
                }
            }
        }
        Ok(Self { ids, pos, dist: matrix })
    }

    /// Euclidean distances between planar points, with ids `0..n`.
    pub fn euclidean(points: &[[f64; 2]]) -> Self {
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let dx = points[i][0] - points[j][0];
                let dy = points[i][1] - points[j][1];
                dist[i * n + j] = dx.hypot(dy);
            }
        }
        Self::new((0..n as PointId).collect(), dist).expect("euclidean distances are valid")
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.pos.contains_key(&p)
    }

    pub fn dist(&self, a: PointId, b: PointId) -> Result<f64> {
        let i = *self.pos.get(&a).ok_or(Error::UnknownPoint(a))?;
        let j = *self.pos.get(&b).ok_or(Error::UnknownPoint(b))?;
        Ok(self.dist[i * self.ids.len() + j])
    }

    /// Distance by positions rather than ids.
    pub fn dist_at(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.ids.len() + j]
    }

    pub fn diameter_of(&self, points: &[PointId]) -> Result<f64> {
        let mut d = 0.0f64;
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i + 1..] {
                d = d.max(self.dist(a, b)?);
            }
        }
        Ok(d)
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Triples `(x, y, z)` with `d(x, z) > d(x, y) + d(y, z)`.
    pub fn triangle_violations(&self) -> Vec<(PointId, PointId, PointId)> {
        let n = self.ids.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.dist_at(x, z) > self.dist_at(x, y) + self.dist_at(y, z) {
                        out.push((self.ids[x], self.ids[y], self.ids[z]));
                    }
                }
            }
        }
        out
    }
}
