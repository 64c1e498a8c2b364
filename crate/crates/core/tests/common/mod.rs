//! Reference values computed without the library's oracle.
//!
//! Resistances come from the spanning-tree ratio
//! `Ω_ij = det L[¬i,¬j] / det L[¬i]`, where `L[¬S]` deletes the rows and
//! columns in `S`. Determinants use plain fraction elimination.

#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use simplicial_resistance::SimplicialNetwork;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn laplacian_rows(network: &SimplicialNetwork) -> Vec<Vec<Q>> {
    let n = network.node_len();
    let mut l = vec![vec![Q::zero(); n]; n];
    for &(a, b) in network.edges() {
        l[a][b] -= Q::one();
        l[b][a] -= Q::one();
        l[a][a] += Q::one();
        l[b][b] += Q::one();
    }
    l
}

fn determinant(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Q::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let pivot = m[k][k].clone();
        det *= &pivot;
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = &m[r][k] / &pivot;
            for c in k..n {
                let v = &f * &m[k][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

fn minor(l: &[Vec<Q>], drop: &[usize]) -> Vec<Vec<Q>> {
    l.iter()
        .enumerate()
        .filter(|(r, _)| !drop.contains(r))
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(c, _)| !drop.contains(c))
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// All-pairs resistance table by spanning-tree ratios.
pub struct TreeRatio {
    table: Vec<Vec<Q>>,
}

impl TreeRatio {
    pub fn new(network: &SimplicialNetwork) -> Self {
        let l = laplacian_rows(network);
        let n = l.len();
        let mut table = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            let base = determinant(minor(&l, &[i]));
            for j in i + 1..n {
                let v = determinant(minor(&l, &[i, j])) / &base;
                table[i][j] = v.clone();
                table[j][i] = v;
            }
        }
        Self { table }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.table[i][j]
    }

    /// Ordered-pair sums `(Σ Ω, Σ (d_i+d_j) Ω, Σ d_i d_j Ω)`.
    pub fn index_sums(&self, network: &SimplicialNetwork) -> (Q, Q, Q) {
        let n = network.node_len();
        let d: Vec<Q> = (0..n)
            .map(|v| Q::from_integer(BigInt::from(network.degree(v))))
            .collect();
        let (mut r, mut plus, mut star) = (Q::zero(), Q::zero(), Q::zero());
        for i in 0..n {
            for j in 0..n {
                let w = &self.table[i][j];
                r += w;
                plus += (&d[i] + &d[j]) * w;
                star += &d[i] * &d[j] * w;
            }
        }
        (r, plus, star)
    }
}
