//! Arithmetic in Z/p and sparse column operations.

use crate::error::{Error, Result};

/// The prime field Z/p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    p: u32,
}

impl Field {
    /// Primes up to 46337 are accepted so products fit in `u32` after reduction.
    pub fn new(p: u32) -> Result<Self> {
        let is_prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
        if !is_prime || p > 46337 {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a) % self.p
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "zero has no inverse");
        let (mut base, mut exp, mut acc) = (a as u64 % self.p as u64, self.p as u64 - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            exp >>= 1;
        }
        acc as u32
    }

    /// `a / b`.
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// `(-1)^k` in the field.
    pub fn sign(&self, odd: bool) -> u32 {
        if odd {
            self.p - 1
        } else {
            1 % self.p
        }
    }

    /// `x += c * y` for sparse vectors sorted by index.
    pub fn axpy(&self, x: &mut Vec<(usize, u32)>, c: u32, y: &[(usize, u32)]) {
        if c == 0 || y.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
                out.push(x[i]);
                i += 1;
            } else if i == x.len() || y[j].0 < x[i].0 {
                out.push((y[j].0, self.mul(c, y[j].1)));
                j += 1;
            } else {
                let v = self.add(x[i].1, self.mul(c, y[j].1));
                if v != 0 {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        *x = out;
    }

    /// Rank of a dense matrix (rows of entries in `0..p`).
    pub fn rank(&self, m: &[Vec<u32>]) -> usize {
        let mut a: Vec<Vec<u32>> = m.to_vec();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = self.inv(a[rank][c]);
            for r in 0..a.len() {
                if r != rank && a[r][c] != 0 {
                    let factor = self.mul(a[r][c], inv);
                    for cc in c..cols {
                        let sub = self.mul(factor, a[rank][cc]);
                        a[r][cc] = self.add(a[r][cc], self.neg(sub));
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Product `a * b` of dense matrices; `a` is `r x n`, `b` is `n x c`.
    pub fn matmul(&self, a: &[Vec<u32>], b: &[Vec<u32>], n: usize, c: usize) -> Vec<Vec<u32>> {
        a.iter()
            .map(|row| (0..c).map(|j| (0..n).fold(0, |acc, t| self.add(acc, self.mul(row[t], b[t][j])))).collect())
            .collect()
    }
}
