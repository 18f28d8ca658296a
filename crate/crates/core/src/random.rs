//! Seeded generators for random instances: complexes, piecewise-linear
//! functions, perturbations, towers and point sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{Simplex, SimplicialComplex, VertexFunction, VertexId};
use crate::error::Result;
use crate::mapper::ComplexTower;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for trial `i` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    seed ^ (i.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Parameters of [`random_complex`].
#[derive(Clone, Copy, Debug)]
pub struct ComplexParams {
    pub vertices: usize,
    /// Probability of each non-tree edge.
    pub edge_prob: f64,
    /// Probability that a 3-clique of the graph is filled.
    pub triangle_prob: f64,
    /// Cap on the total number of simplices; extra edges and triangles are
    /// dropped to respect it.
    pub max_simplices: usize,
}

/// A connected random complex of dimension at most 2: a random spanning
/// tree plus independent extra edges, with random 3-cliques filled.
pub fn random_complex(rng: &mut SeededRng, p: ComplexParams) -> SimplicialComplex {
    let n = p.vertices.max(1);
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for v in 1..n as VertexId {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    let budget = p.max_simplices.saturating_sub(n);
    for a in 0..n as VertexId {
        for b in a + 1..n as VertexId {
            if edges.len() < budget && rng.gen_bool(p.edge_prob) {
                edges.insert((a, b));
            }
        }
    }
    let mut triangles = Vec::new();
    for &(a, b) in &edges {
        for c in b + 1..n as VertexId {
            if edges.contains(&(a, c)) && edges.contains(&(b, c)) && rng.gen_bool(p.triangle_prob) {
                triangles.push(vec![a, b, c]);
            }
        }
    }
    triangles.truncate(p.max_simplices.saturating_sub(n + edges.len()));
    let mut maximal: Vec<Simplex> = (0..n as VertexId).map(|v| vec![v]).collect();
    maximal.extend(edges.iter().map(|&(a, b)| vec![a, b]));
    maximal.extend(triangles);
    SimplicialComplex::from_maximal(maximal).expect("generated simplices are valid")
}

/// A 3-complex with many more triangles and tetrahedra than edges: a chain
/// of `blocks` full 3-skeleta of `block_size` vertices, consecutive blocks
/// sharing one vertex.
pub fn random_dense_complex(rng: &mut SeededRng, blocks: usize, block_size: usize) -> SimplicialComplex {
    let mut maximal = Vec::new();
    let mut next: VertexId = 0;
    for _ in 0..blocks.max(1) {
        let start = if next == 0 { 0 } else { next - 1 };
        let size = block_size.max(2) + rng.gen_range(0..2);
        let block: Simplex = (start..start + size as VertexId).collect();
        next = start + size as VertexId;
        maximal.push(block);
    }
    SimplicialComplex::from_maximal_capped(maximal, Some(3)).expect("blocks are valid")
}

/// Vertex values from a walk along a BFS tree with steps uniform in
/// `[-step, step]`, shifted so the minimum is 0.
pub fn random_pl_function(rng: &mut SeededRng, k: &SimplicialComplex, step: f64) -> VertexFunction<f64> {
    let g = crate::complex::one_skeleton(k);
    let mut values: BTreeMap<VertexId, f64> = BTreeMap::new();
    for &root in k.vertices() {
        if values.contains_key(&root) {
            continue;
        }
        values.insert(root, 0.0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u) {
                if !values.contains_key(&w) {
                    let x = values[&u] + rng.gen_range(-step..=step);
                    values.insert(w, x);
                    queue.push_back(w);
                }
            }
        }
    }
    let min = values.values().copied().fold(f64::INFINITY, f64::min);
    VertexFunction::new(values.into_iter().map(|(v, x)| (v, x - min)).collect())
}

/// Largest value spread over an edge.
pub fn max_edge_spread(k: &SimplicialComplex, f: &VertexFunction<f64>) -> f64 {
    k.simplices(1).map(|e| (f.get(e[0]).unwrap() - f.get(e[1]).unwrap()).abs()).fold(0.0, f64::max)
}

/// Scales `f` towards its minimum until every edge spread is at most
/// `kappa`; unchanged if it already is.
pub fn rescale_for_min_diameter(k: &SimplicialComplex, f: &VertexFunction<f64>, kappa: f64) -> VertexFunction<f64> {
    let spread = max_edge_spread(k, f);
    if spread <= kappa {
        return f.clone();
    }
    let factor = kappa / spread * (1.0 - 1e-9);
    let min = f.values().values().copied().fold(f64::INFINITY, f64::min);
    VertexFunction::new(f.values().iter().map(|(&v, &x)| (v, min + (x - min) * factor)).collect())
}

/// `f + o` with random offsets `o` rescaled so that the largest offset has
/// absolute value exactly `delta`.
pub fn perturb(rng: &mut SeededRng, f: &VertexFunction<f64>, delta: f64) -> VertexFunction<f64> {
    let offsets: Vec<f64> = f.values().keys().map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let (arg, m) =
        offsets.iter().enumerate().fold((0, 0.0f64), |(a, m), (i, o)| if o.abs() > m { (i, o.abs()) } else { (a, m) });
    let values = f
        .values()
        .iter()
        .zip(&offsets)
        .enumerate()
        .map(|(i, ((&v, &x), &o))| {
            let off = if i == arg {
                delta.copysign(o)
            } else if m > 0.0 {
                (o / m * delta).clamp(-delta, delta)
            } else {
                0.0
            };
            (v, x + off)
        })
        .collect();
    VertexFunction::new(values)
}

/// A random complex on vertices `0..n` with at most `max_simplices`
/// simplices and dimension at most 2.
fn small_complex(rng: &mut SeededRng, n: usize, max_simplices: usize) -> SimplicialComplex {
    loop {
        let mut maximal: Vec<Simplex> = (0..n as VertexId).map(|v| vec![v]).collect();
        let extra = rng.gen_range(0..=n + 2);
        for _ in 0..extra {
            let d = rng.gen_range(1..=2usize.min(n - 1).max(1));
            let mut verts: Vec<VertexId> = (0..n as VertexId).collect();
            verts.shuffle(rng);
            let mut s: Simplex = verts[..(d + 1).min(n)].to_vec();
            s.sort_unstable();
            maximal.push(s);
        }
        let k = SimplicialComplex::from_maximal(maximal).unwrap();
        if k.num_simplices() <= max_simplices {
            return k;
        }
    }
}

/// A tower of `levels` random complexes with random simplicial maps, each
/// complex having at most `max_simplices` simplices. Each target contains
/// the image of its source plus random extra simplices.
pub fn random_tower(rng: &mut SeededRng, levels: usize, max_simplices: usize) -> Result<ComplexTower> {
    let levels = levels.max(1);
    let n0 = rng.gen_range(2..=6);
    let mut complexes = vec![small_complex(rng, n0, max_simplices)];
    let mut maps = Vec::new();
    for _ in 1..levels {
        let src = complexes.last().unwrap();
        let m = rng.gen_range(1..=6u32);
        let vm: BTreeMap<VertexId, VertexId> = src.vertices().iter().map(|&v| (v, rng.gen_range(0..m))).collect();
        let image: Vec<Simplex> = src
            .maximal_simplices()
            .iter()
            .map(|s| crate::complex::normalize(&s.iter().map(|v| vm[v]).collect::<Vec<_>>()))
            .collect();
        let mut target = SimplicialComplex::from_maximal(image).unwrap();
        let mut grown = target.clone();
        for s in small_complex(rng, m as usize, max_simplices).maximal_simplices() {
            grown.insert_closed(&s);
        }
        if grown.num_simplices() <= max_simplices {
            target = grown;
        }
        complexes.push(target);
        maps.push(vm);
    }
    let scales = (0..levels).map(|i| (i + 1) as f64).collect();
    ComplexTower::from_vertex_maps(scales, complexes, maps)
}

/// `n` points uniform in `[lo, hi]^2`.
pub fn random_points(rng: &mut SeededRng, n: usize, lo: f64, hi: f64) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.gen_range(lo..=hi), rng.gen_range(lo..=hi)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{connected_components, one_skeleton};

    #[test]
    fn complexes_are_connected_and_capped() {
        let mut r = rng(7);
        for _ in 0..20 {
            let k = random_complex(
                &mut r,
                ComplexParams { vertices: 15, edge_prob: 0.3, triangle_prob: 0.5, max_simplices: 60 },
            );
            assert!(k.num_simplices() <= 60);
            let comps = connected_components(k.vertices(), &one_skeleton(&k)).unwrap();
            assert_eq!(comps.len(), 1);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let p = ComplexParams { vertices: 10, edge_prob: 0.4, triangle_prob: 0.5, max_simplices: 100 };
        assert_eq!(random_complex(&mut rng(3), p), random_complex(&mut rng(3), p));
    }

    #[test]
    fn perturbation_has_exact_norm() {
        let mut r = rng(1);
        let k = random_complex(
            &mut r,
            ComplexParams { vertices: 12, edge_prob: 0.2, triangle_prob: 0.3, max_simplices: 80 },
        );
        let f = random_pl_function(&mut r, &k, 1.0);
        for delta in [0.25, 0.5, 2.0] {
            let g = perturb(&mut r, &f, delta);
            assert!((f.sup_distance(&g) - delta).abs() < 1e-12);
        }
    }

    #[test]
    fn rescaling_meets_kappa() {
        let mut r = rng(2);
        let k = random_complex(
            &mut r,
            ComplexParams { vertices: 20, edge_prob: 0.3, triangle_prob: 0.5, max_simplices: 150 },
        );
        let f = random_pl_function(&mut r, &k, 5.0);
        let g = rescale_for_min_diameter(&k, &f, 1.0);
        assert!(max_edge_spread(&k, &g) <= 1.0);
    }

    #[test]
    fn towers_are_small_and_simplicial() {
        let mut r = rng(5);
        for _ in 0..30 {
            let t = random_tower(&mut r, 4, 30).unwrap();
            assert!(t.complexes().iter().all(|c| c.num_simplices() <= 30));
        }
    }

    #[test]
    fn dense_complex_has_few_edges() {
        let k = random_dense_complex(&mut rng(0), 4, 9);
        assert!(k.count(2) + k.count(3) > 4 * k.count(1));
    }
}
