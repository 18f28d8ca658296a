//! Homology bases over Z/p and matrices of induced maps.

use std::collections::HashMap;

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::Result;
use crate::persistence::field::Field;

type Chain = Vec<(usize, u32)>;

/// Signed boundary of `s` as a chain over `faces` (indexed by `index`).
fn boundary(field: &Field, s: &[u32], index: &HashMap<Simplex, usize>) -> Chain {
    let mut out: Chain = (0..s.len())
        .map(|i| {
            let mut f = s.to_vec();
            f.remove(i);
            (index[&f], field.sign(i % 2 == 1))
        })
        .collect();
    out.sort_unstable();
    out
}

/// Pivot table for reducing chains modulo boundaries, remembering how each
/// stored column decomposes over the chosen homology basis.
struct Reducer {
    field: Field,
    /// pivot row -> (reduced column, tag over basis indices)
    pivots: HashMap<usize, (Chain, Chain)>,
}

impl Reducer {
    /// Reduces `x` in place; returns the accumulated tag `Q` with
    /// `x_original ≡ Q + x_reduced` modulo boundaries.
    fn reduce(&self, x: &mut Chain) -> Chain {
        let mut q: Chain = Vec::new();
        while let Some(&(low, val)) = x.last() {
            let Some((col, tag)) = self.pivots.get(&low) else {
                break;
            };
            let a = self.field.div(val, col.last().unwrap().1);
            self.field.axpy(x, self.field.neg(a), col);
            self.field.axpy(&mut q, a, tag);
        }
        q
    }
}

/// A basis of `H_k(K; Z/p)` given by cycle representatives.
pub struct HomologyBasis {
    k: usize,
    field: Field,
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    cycles: Vec<Chain>,
    reducer: Reducer,
}

/// Computes cycle representatives of a basis of `H_k(K; Z/p)`. `K` must
/// contain its simplices up to dimension `k + 1`.
pub fn homology_basis(complex: &SimplicialComplex, k: usize, p: u32) -> Result<HomologyBasis> {
    let field = Field::new(p)?;
    let simplices: Vec<Simplex> = complex.simplices(k).cloned().collect();
    let index = complex.index_map(k);

    // Cycle space: kernel of the boundary on k-chains.
    let cycle_space: Vec<Chain> = if k == 0 {
        (0..simplices.len()).map(|i| vec![(i, 1)]).collect()
    } else {
        let lower = complex.index_map(k - 1);
        let mut pivots: HashMap<usize, (Chain, Chain)> = HashMap::new();
        let mut out = Vec::new();
        for (j, s) in simplices.iter().enumerate() {
            let mut col = boundary(&field, s, &lower);
            let mut track: Chain = vec![(j, 1)];
            while let Some(&(low, val)) = col.last() {
                let Some((pc, pt)) = pivots.get(&low) else {
                    break;
                };
                let a = field.neg(field.div(val, pc.last().unwrap().1));
                field.axpy(&mut col, a, pc);
                field.axpy(&mut track, a, pt);
            }
            match col.last() {
                Some(&(low, _)) => {
                    pivots.insert(low, (col, track));
                }
                None => out.push(track),
            }
        }
        out
    };

    let mut reducer = Reducer { field, pivots: HashMap::new() };
    for s in complex.simplices(k + 1) {
        let mut col = boundary(&field, s, &index);
        reducer.reduce(&mut col);
        if let Some(&(low, _)) = col.last() {
            reducer.pivots.insert(low, (col, Vec::new()));
        }
    }
    let mut cycles = Vec::new();
    for z in cycle_space {
        let mut r = z.clone();
        let q = reducer.reduce(&mut r);
        if let Some(&(low, _)) = r.last() {
            let b = cycles.len();
            let mut tag: Chain = vec![(b, 1)];
            field.axpy(&mut tag, field.neg(1), &q);
            reducer.pivots.insert(low, (r, tag));
            cycles.push(z);
        }
    }
    Ok(HomologyBasis { k, field, simplices, index, cycles, reducer })
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn betti(&self) -> usize {
        self.cycles.len()
    }

    /// Representative cycles as `(simplex, coefficient)` lists.
    pub fn cycles(&self) -> Vec<Vec<(Simplex, u32)>> {
        self.cycles.iter().map(|c| c.iter().map(|&(i, a)| (self.simplices[i].clone(), a)).collect()).collect()
    }

    /// Coordinates of the class of a cycle (given over k-simplex indices).
    fn coordinates(&self, chain: &Chain) -> Vec<u32> {
        let mut r = chain.clone();
        let q = self.reducer.reduce(&mut r);
        assert!(r.is_empty(), "chain is not a cycle");
        let mut out = vec![0; self.betti()];
        for (b, a) in q {
            out[b] = a;
        }
        out
    }
}

/// Matrix (rows: target basis, columns: source basis) of the map induced
/// on `H_k` by a simplicial map. Degenerate images vanish; nondegenerate
/// images carry the sign of the sorting permutation.
pub fn induced_map(phi: &SimplicialMap, source: &HomologyBasis, target: &HomologyBasis) -> Result<Vec<Vec<u32>>> {
    phi.check_simplicial()?;
    let field = source.field;
    let mut m = vec![vec![0u32; source.betti()]; target.betti()];
    for (col, z) in source.cycles.iter().enumerate() {
        let mut image: Chain = Vec::new();
        for &(i, a) in z {
            let mut img: Vec<u32> = source.simplices[i].iter().map(|&v| phi.apply(v)).collect();
            // Insertion sort counting transpositions; equal neighbours mean
            // a degenerate image.
            let mut odd = false;
            let mut degenerate = false;
            for x in 1..img.len() {
                let mut y = x;
                while y > 0 && img[y - 1] >= img[y] {
                    if img[y - 1] == img[y] {
                        degenerate = true;
                        break;
                    }
                    img.swap(y - 1, y);
                    odd = !odd;
                    y -= 1;
                }
                if degenerate {
                    break;
                }
            }
            if degenerate {
                continue;
            }
            let t = target.index[&img];
            field.axpy(&mut image, field.mul(a, field.sign(odd)), &[(t, 1)]);
        }
        for (row, v) in target.coordinates(&image).into_iter().enumerate() {
            m[row][col] = v;
        }
    }
    Ok(m)
}
