//! Ground-truth effective resistances from Laplacian {1}-inverses.
//!
//! A {1}-inverse of `L` is any `G` with `L G L = L`. Resistances read out as
//! `G_ii + G_jj - G_ij - G_ji` are the same for every such `G`, which the
//! tests exploit by comparing grounded inverses for different ground nodes
//! and the block assembly.

mod exact;
mod float;
mod identities;
mod matrix;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub use exact::{abs_det, invert_integer, invert_rational, ScaledInverse};
pub use float::invert_spd;
pub use identities::{verify_clique_block_inverse, verify_cross_block_product, IdentityCheck};
pub use matrix::DenseMatrix;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SimplicialNetwork};
use crate::parallel::{self, Execution};
use crate::scalar::Exact;

/// Largest network the exact oracle accepts.
pub const EXACT_MAX_NODES: usize = 3_000;

/// Relative tolerance for float-mode comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericMode {
    Exact,
    Float,
}

/// How a {1}-inverse was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Grounded(NodeId),
    BlockAssembly,
}

#[derive(Debug, Clone)]
pub struct OneInverse {
    pub matrix: DenseMatrix<Exact>,
    pub construction: Construction,
}

impl OneInverse {
    /// `G_ii + G_jj - G_ij - G_ji`.
    pub fn resistance(&self, i: usize, j: usize) -> Exact {
        let g = &self.matrix;
        g.get(i, i) + g.get(j, j) - g.get(i, j) - g.get(j, i)
    }
}

/// `L = D - A` with degrees taken from the adjacency lists.
pub fn laplacian(network: &SimplicialNetwork) -> DenseMatrix<i64> {
    laplacian_of(network.node_len(), network.edges())
}

/// Laplacian of the network as it was at `level`.
pub fn laplacian_at(network: &SimplicialNetwork, level: u32) -> DenseMatrix<i64> {
    laplacian_of(network.nodes_at(level), network.edges_at(level))
}

fn laplacian_of(n: usize, edges: &[(NodeId, NodeId)]) -> DenseMatrix<i64> {
    let mut l = DenseMatrix::from_fn(n, n, |_, _| 0i64);
    for &(a, b) in edges {
        l.set(a, a, l.get(a, a) + 1);
        l.set(b, b, l.get(b, b) + 1);
        l.set(a, b, -1);
        l.set(b, a, -1);
    }
    l
}

pub fn to_exact(m: &DenseMatrix<i64>) -> DenseMatrix<Exact> {
    m.map(|&v| BigRational::from_integer(BigInt::from(v)))
}

fn to_bigint(m: &DenseMatrix<i64>) -> DenseMatrix<BigInt> {
    m.map(|&v| BigInt::from(v))
}

fn without(n: usize, ground: usize) -> Vec<usize> {
    (0..n).filter(|&v| v != ground).collect()
}

/// Grounded inverse in scaled integer form: the `ground` row and column are
/// zero, the rest is the inverse of the reduced Laplacian.
pub fn grounded_scaled(
    l: &DenseMatrix<i64>,
    ground: usize,
    exec: Execution,
) -> Result<ScaledInverse> {
    let n = l.rows();
    if ground >= n {
        return Err(Error::UnknownNode(ground));
    }
    let keep = without(n, ground);
    let reduced = to_bigint(&l.select(&keep, &keep));
    let inv = invert_integer(&reduced, exec)?;
    let mut numer = DenseMatrix::from_fn(n, n, |_, _| BigInt::zero());
    for (r, &rr) in keep.iter().enumerate() {
        for (c, &cc) in keep.iter().enumerate() {
            numer.set(rr, cc, inv.numer.get(r, c).clone());
        }
    }
    Ok(ScaledInverse {
        numer,
        denom: inv.denom,
    })
}

/// Grounded {1}-inverse of a connected graph's Laplacian.
pub fn grounded_one_inverse(l: &DenseMatrix<i64>, ground: usize) -> Result<OneInverse> {
    let scaled = grounded_scaled(l, ground, Execution::default())?;
    Ok(OneInverse {
        matrix: scaled.to_rational(),
        construction: Construction::Grounded(ground),
    })
}

/// True when `x g x == x` exactly.
pub fn is_one_inverse(x: &DenseMatrix<Exact>, g: &DenseMatrix<Exact>) -> bool {
    &x.matmul(g).matmul(x) == x
}

/// Assembles a {1}-inverse of `[[a, b], [bᵀ, c]]` from a {1}-inverse of the
/// Schur complement `a - b c⁻¹ bᵀ`; `c` must be nonsingular.
pub fn block_one_inverse(
    a: &DenseMatrix<Exact>,
    b: &DenseMatrix<Exact>,
    c: &DenseMatrix<Exact>,
    schur_inverse: &DenseMatrix<Exact>,
) -> Result<OneInverse> {
    let c_inv = invert_rational(c, Execution::default())?;
    let bt = b.transpose();
    let s_b_cinv = schur_inverse.matmul(b).matmul(&c_inv);
    let cinv_bt_s = c_inv.matmul(&bt).matmul(schur_inverse);
    let corner = c_inv.matmul(&bt).matmul(&s_b_cinv).add(&c_inv);
    let g = DenseMatrix::from_blocks(schur_inverse, &-&s_b_cinv, &-&cinv_bt_s, &corner);

    let x = DenseMatrix::from_blocks(a, b, &bt, c);
    if !is_one_inverse(&x, &g) {
        return Err(Error::Parameter(
            "supplied Schur complement inverse is not a {1}-inverse".into(),
        ));
    }
    Ok(OneInverse {
        matrix: g,
        construction: Construction::BlockAssembly,
    })
}

/// Block {1}-inverse of the level-`level` Laplacian partitioned into nodes
/// that already existed at `level - 1` and those created at `level`, using
/// the grounded inverse of the Schur complement.
pub fn partitioned_one_inverse(
    network: &SimplicialNetwork,
    level: u32,
    ground: usize,
) -> Result<OneInverse> {
    if level == 0 || level > network.t() {
        return Err(Error::Parameter(format!(
            "level {level} has no predecessor"
        )));
    }
    let l = to_exact(&laplacian_at(network, level));
    let old: Vec<usize> = (0..network.nodes_at(level - 1)).collect();
    let new: Vec<usize> = network.created_at(level).collect();
    let a = l.select(&old, &old);
    let b = l.select(&old, &new);
    let c = l.select(&new, &new);
    let c_inv = invert_rational(&c, Execution::default())?;
    let schur = a.sub(&b.matmul(&c_inv).matmul(&b.transpose()));
    let schur_inv = grounded_rational(&schur, ground)?;
    block_one_inverse(&a, &b, &c, &schur_inv)
}

/// Grounded inverse of a rational symmetric matrix with zero row sums.
fn grounded_rational(m: &DenseMatrix<Exact>, ground: usize) -> Result<DenseMatrix<Exact>> {
    let n = m.rows();
    let keep = without(n, ground);
    let inv = invert_rational(&m.select(&keep, &keep), Execution::default())?;
    let mut out = DenseMatrix::from_fn(n, n, |_, _| Exact::zero());
    for (r, &rr) in keep.iter().enumerate() {
        for (c, &cc) in keep.iter().enumerate() {
            out.set(rr, cc, inv.get(r, c).clone());
        }
    }
    Ok(out)
}

/// Exact all-pairs resistance oracle backed by one grounded inverse.
///
/// Resistances are kept over the common denominator `det` of the reduced
/// Laplacian, so pair sums and comparisons need no per-entry gcd.
#[derive(Debug, Clone)]
pub struct ExactOracle {
    inverse: ScaledInverse,
    ground: usize,
}

impl ExactOracle {
    pub fn new(network: &SimplicialNetwork) -> Result<Self> {
        Self::with_ground(network, 0, Execution::default())
    }

    pub fn with_ground(
        network: &SimplicialNetwork,
        ground: usize,
        exec: Execution,
    ) -> Result<Self> {
        if network.node_len() > EXACT_MAX_NODES {
            return Err(Error::SizeLimit {
                nodes: network.node_len().into(),
                limit: EXACT_MAX_NODES as u64,
            });
        }
        Self::from_laplacian(&laplacian(network), ground, exec)
    }

    pub fn from_laplacian(l: &DenseMatrix<i64>, ground: usize, exec: Execution) -> Result<Self> {
        let mut inverse = grounded_scaled(l, ground, exec)?;
        if inverse.denom.is_negative() {
            inverse.denom = -inverse.denom;
            inverse.numer = inverse.numer.map(|v| -v);
        }
        Ok(Self { inverse, ground })
    }

    pub fn len(&self) -> usize {
        self.inverse.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// Positive common denominator of every resistance.
    pub fn denominator(&self) -> &BigInt {
        &self.inverse.denom
    }

    /// Resistance times [`Self::denominator`].
    pub fn scaled(&self, i: usize, j: usize) -> BigInt {
        let g = &self.inverse.numer;
        if i == j {
            return BigInt::zero();
        }
        g.get(i, i) + g.get(j, j) - g.get(i, j) - g.get(j, i)
    }

    pub fn resistance(&self, i: usize, j: usize) -> Result<Exact> {
        let n = self.len();
        if i >= n {
            return Err(Error::UnknownNode(i));
        }
        if j >= n {
            return Err(Error::UnknownNode(j));
        }
        Ok(BigRational::new(
            self.scaled(i, j),
            self.inverse.denom.clone(),
        ))
    }

    /// True when `value` equals the resistance of `(i, j)`.
    pub fn matches(&self, i: usize, j: usize, value: &Exact) -> bool {
        &self.scaled(i, j) * value.denom() == value.numer() * &self.inverse.denom
    }

    pub fn one_inverse(&self) -> OneInverse {
        OneInverse {
            matrix: self.inverse.to_rational(),
            construction: Construction::Grounded(self.ground),
        }
    }

    /// `sum_{i,j} w(i, j) * Omega_ij` over ordered pairs, with integer weights.
    pub fn weighted_pair_sum<W>(&self, exec: Execution, weight: W) -> Exact
    where
        W: Fn(usize, usize) -> i64 + Sync + Send,
    {
        let n = self.len();
        let rows = parallel::map_range(exec, n, |i| {
            let mut acc = BigInt::zero();
            for j in 0..n {
                let w = weight(i, j);
                if w != 0 && i != j {
                    acc += self.scaled(i, j) * w;
                }
            }
            acc
        });
        let total: BigInt = rows.into_iter().sum();
        BigRational::new(total, self.inverse.denom.clone())
    }
}

/// Float all-pairs resistances from a Cholesky-based grounded inverse.
#[derive(Debug, Clone)]
pub struct FloatOracle {
    g: DenseMatrix<f64>,
}

impl FloatOracle {
    pub fn new(network: &SimplicialNetwork) -> Result<Self> {
        Self::from_laplacian(&laplacian(network), 0)
    }

    pub fn from_laplacian(l: &DenseMatrix<i64>, ground: usize) -> Result<Self> {
        let n = l.rows();
        if ground >= n {
            return Err(Error::UnknownNode(ground));
        }
        let keep = without(n, ground);
        let reduced = l.select(&keep, &keep).map(|&v| v as f64);
        let inv = invert_spd(&reduced)?;
        let mut g = DenseMatrix::from_fn(n, n, |_, _| 0.0);
        for (r, &rr) in keep.iter().enumerate() {
            for (c, &cc) in keep.iter().enumerate() {
                g.set(rr, cc, *inv.get(r, c));
            }
        }
        Ok(Self { g })
    }

    pub fn len(&self) -> usize {
        self.g.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn resistance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let g = &self.g;
        g.get(i, i) + g.get(j, j) - g.get(i, j) - g.get(j, i)
    }

    /// Full resistance matrix, rows computed independently.
    pub fn all_pairs(&self, exec: Execution) -> DenseMatrix<f64> {
        let n = self.len();
        let rows = parallel::map_range(exec, n, |i| {
            (0..n).map(|j| self.resistance(i, j)).collect::<Vec<_>>()
        });
        DenseMatrix::from_vec(n, n, rows.into_iter().flatten().collect())
    }

    pub fn weighted_pair_sum<W>(&self, exec: Execution, weight: W) -> f64
    where
        W: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let n = self.len();
        parallel::map_range(exec, n, |i| {
            (0..n)
                .map(|j| weight(i, j) * self.resistance(i, j))
                .sum::<f64>()
        })
        .into_iter()
        .sum()
    }
}

/// Single-pair exact resistance; builds a fresh oracle.
pub fn resistance_oracle(network: &SimplicialNetwork, i: NodeId, j: NodeId) -> Result<Exact> {
    network.node(i)?;
    network.node(j)?;
    if i == j {
        return Ok(Exact::zero());
    }
    ExactOracle::new(network)?.resistance(i, j)
}

/// Largest relative deviation between float and exact resistances.
pub fn max_relative_error(exact: &ExactOracle, float: &FloatOracle, exec: Execution) -> f64 {
    let n = exact.len();
    let rows = parallel::map_range(exec, n, |i| {
        let mut worst = 0.0f64;
        for j in i + 1..n {
            let e = BigRational::new(exact.scaled(i, j), exact.denominator().clone());
            let e = e.to_f64().unwrap_or(f64::NAN);
            let f = float.resistance(i, j);
            worst = worst.max(((f - e) / e).abs());
        }
        worst
    });
    rows.into_iter().fold(0.0, f64::max)
}
