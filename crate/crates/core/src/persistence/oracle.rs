//! Barcodes read directly off the sequence of induced matrices.
//!
//! With `r(i, j)` the rank of `H_k(K_i) -> H_k(K_j)`, the number of bars
//! alive exactly on the indices `i..=j` is
//! `r(i,j) - r(i-1,j) - r(i,j+1) + r(i-1,j+1)` (out-of-range ranks are 0).

use crate::error::Result;
use crate::mapper::ComplexTower;
use crate::par;
use crate::persistence::diagram::{Bar, PersistenceDiagram};
use crate::persistence::field::Field;
use crate::persistence::homology::{homology_basis, induced_map, HomologyBasis};

/// Homology bases per scale and the matrices of the maps between
/// consecutive scales.
pub struct PersistenceModule {
    pub field: Field,
    pub bases: Vec<HomologyBasis>,
    pub matrices: Vec<Vec<Vec<u32>>>,
}

pub fn persistence_module(tower: &ComplexTower, k: usize, p: u32) -> Result<PersistenceModule> {
    let field = Field::new(p)?;
    let bases = par::map(tower.complexes(), |c| homology_basis(c, k, p)).into_iter().collect::<Result<Vec<_>>>()?;
    let matrices = tower
        .maps()
        .iter()
        .enumerate()
        .map(|(i, m)| induced_map(m, &bases[i], &bases[i + 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PersistenceModule { field, bases, matrices })
}

impl PersistenceModule {
    pub fn betti(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.betti()).collect()
    }

    /// `rank[i][j]` for `i <= j`: rank of the composite map from `i` to `j`.
    pub fn rank_invariant(&self) -> Vec<Vec<usize>> {
        let n = self.bases.len();
        let betti = self.betti();
        let mut rank = vec![vec![0; n]; n];
        for i in 0..n {
            rank[i][i] = betti[i];
            // Composite as a betti[j] x betti[i] matrix.
            let mut comp: Vec<Vec<u32>> =
                (0..betti[i]).map(|r| (0..betti[i]).map(|c| u32::from(r == c)).collect()).collect();
            for j in i + 1..n {
                comp = self.field.matmul(&self.matrices[j - 1], &comp, betti[j - 1], betti[i]);
                rank[i][j] = if betti[i] == 0 { 0 } else { self.field.rank(&comp) };
            }
        }
        rank
    }

    /// Interval decomposition on the index axis, mapped to `scales`.
    pub fn diagram(&self, k: usize, scales: &[f64]) -> PersistenceDiagram {
        let n = self.bases.len();
        let rank = self.rank_invariant();
        let r = |i: isize, j: usize| -> isize {
            if i < 0 || j >= n {
                0
            } else {
                rank[i as usize][j] as isize
            }
        };
        let mut bars = Vec::new();
        for i in 0..n {
            for j in i..n {
                let ii = i as isize;
                let m = r(ii, j) - r(ii - 1, j) - r(ii, j + 1) + r(ii - 1, j + 1);
                debug_assert!(m >= 0);
                let death = if j + 1 < n { scales[j + 1] } else { f64::INFINITY };
                for _ in 0..m {
                    bars.push(Bar { dim: k, birth: scales[i], death });
                }
            }
        }
        PersistenceDiagram::new(bars)
    }
}

/// Barcode of `H_k` computed from the matrices of the tower maps.
pub fn oracle_diagram(tower: &ComplexTower, k: usize, p: u32) -> Result<PersistenceDiagram> {
    Ok(persistence_module(tower, k, p)?.diagram(k, tower.scales()))
}
