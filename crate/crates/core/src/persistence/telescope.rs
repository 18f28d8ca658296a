//! Persistence of a simplicial-map tower via its mapping telescope.
//!
//! Each map `f: K_i -> K_{i+1}` is replaced by its simplicial mapping
//! cylinder: with source vertices ordered by id, every simplex
//! `v_0 < ... < v_d` of `K_i` contributes the joins
//! `{v_0, ..., v_j} ∪ {f(v_j), ..., f(v_d)}` and their faces. Gluing the
//! cylinders end to end gives a filtration whose stage `i` retracts onto
//! `K_i`, so its barcode is the barcode of the tower.

use std::collections::HashMap;

use crate::complex::for_each_face;
use crate::error::Result;
use crate::mapper::ComplexTower;
use crate::par;
use crate::persistence::diagram::{Bar, PersistenceDiagram};
use crate::persistence::field::Field;

type TVertex = u64;

fn tag(level: usize, v: u32) -> TVertex {
    ((level as u64) << 32) | v as u64
}

/// The telescope as a filtered complex: simplices with entry indices,
/// ordered by (entry, dimension, lexicographic).
pub struct Telescope {
    pub simplices: Vec<Vec<TVertex>>,
    pub entry: Vec<usize>,
}

/// Builds the telescope of `tower` with simplices up to dimension `max_dim`.
pub fn telescope(tower: &ComplexTower, max_dim: usize) -> Telescope {
    let max_len = max_dim + 1;
    let mut first: HashMap<Vec<TVertex>, usize> = HashMap::new();
    let mut add = |s: &[TVertex], t: usize| {
        first.entry(s.to_vec()).and_modify(|e| *e = (*e).min(t)).or_insert(t);
    };
    for (i, k) in tower.complexes().iter().enumerate() {
        for d in 0..max_len.min(k.dim().map_or(0, |d| d + 1)) {
            for s in k.simplices(d) {
                let tagged: Vec<TVertex> = s.iter().map(|&v| tag(i, v)).collect();
                add(&tagged, i);
            }
        }
    }
    for (i, f) in tower.maps().iter().enumerate() {
        let k = f.source();
        // A face of dimension <= max_dim of some join already lies in the
        // join of a face of dimension <= max_dim + 1.
        for d in 0..(max_len + 1).min(k.dim().map_or(0, |d| d + 1)) {
            for s in k.simplices(d) {
                for j in 0..s.len() {
                    let mut join: Vec<TVertex> = s[..=j].iter().map(|&v| tag(i, v)).collect();
                    let mut upper: Vec<TVertex> = s[j..].iter().map(|&v| tag(i + 1, f.apply(v))).collect();
                    upper.sort_unstable();
                    upper.dedup();
                    join.extend(upper);
                    for_each_face(&join, max_len, |face| add(face, i + 1));
                }
            }
        }
    }
    let mut all: Vec<(usize, Vec<TVertex>)> = first.into_iter().map(|(s, t)| (t, s)).collect();
    all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
    let (entry, simplices) = all.into_iter().unzip();
    Telescope { simplices, entry }
}

/// Pairs `(birth column, death column)` and unpaired columns of dimension
/// `k` obtained by reducing the boundary columns of dimensions `k`, `k+1`.
fn reduce_dim(
    tel: &Telescope,
    index: &HashMap<&[TVertex], usize>,
    k: usize,
    field: &Field,
) -> Vec<(usize, Option<usize>)> {
    let mut pivots: HashMap<usize, Vec<(usize, u32)>> = HashMap::new();
    let mut negative_k = vec![false; tel.simplices.len()];
    let mut paired: HashMap<usize, usize> = HashMap::new();
    for (c, s) in tel.simplices.iter().enumerate() {
        let d = s.len() - 1;
        if d != k && d != k + 1 || d == 0 {
            continue;
        }
        let mut col: Vec<(usize, u32)> = (0..s.len())
            .map(|i| {
                let mut f = s.clone();
                f.remove(i);
                (index[f.as_slice()], field.sign(i % 2 == 1))
            })
            .collect();
        col.sort_unstable();
        while let Some(&(low, val)) = col.last() {
            let Some(p) = pivots.get(&low) else { break };
            let a = field.neg(field.div(val, p.last().unwrap().1));
            field.axpy(&mut col, a, p);
        }
        if let Some(&(low, _)) = col.last() {
            if d == k {
                negative_k[c] = true;
            } else {
                paired.insert(low, c);
            }
            pivots.insert(low, col);
        }
    }
    tel.simplices
        .iter()
        .enumerate()
        .filter(|(c, s)| s.len() == k + 1 && !negative_k[*c])
        .map(|(c, _)| (c, paired.get(&c).copied()))
        .collect()
}

fn check_prime_and_maps(tower: &ComplexTower, p: u32) -> Result<Field> {
    for m in tower.maps() {
        m.check_simplicial()?;
    }
    Field::new(p)
}

/// Barcodes of `H_k` for every `k` in `dims`, reductions running in parallel.
pub fn tower_diagrams(tower: &ComplexTower, dims: &[usize], p: u32) -> Result<PersistenceDiagram> {
    let field = check_prime_and_maps(tower, p)?;
    let Some(&top) = dims.iter().max() else {
        return Ok(PersistenceDiagram::default());
    };
    let tel = telescope(tower, top + 1);
    let index: HashMap<&[TVertex], usize> = tel.simplices.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let scales = tower.scales();
    let per_dim = par::map(dims, |&k| {
        reduce_dim(&tel, &index, k, &field)
            .into_iter()
            .map(|(b, d)| Bar {
                dim: k,
                birth: scales[tel.entry[b]],
                death: d.map_or(f64::INFINITY, |d| scales[tel.entry[d]]),
            })
            .collect::<Vec<_>>()
    });
    Ok(PersistenceDiagram::new(per_dim.into_iter().flatten()))
}

/// Barcode of `H_k(·; Z/p)` of a tower.
pub fn tower_diagram(tower: &ComplexTower, k: usize, p: u32) -> Result<PersistenceDiagram> {
    tower_diagrams(tower, &[k], p)
}
