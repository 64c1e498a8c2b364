//! Exact checks of the block identities behind the resistance recursion.
//!
//! Partition the level-`l` adjacency matrix into old nodes (present at
//! `l - 1`) and new nodes (created at `l`). Then the cross block satisfies
//! `A_on A_no = q (D + A)` of the previous level, and
//! `A_on ((q+1) I - A_nn)^{-1} = A_on / 2`, where the inverse is
//! block-diagonal per clique with `3/(2q+4)` on the diagonal and `1/(2q+4)`
//! elsewhere.

use num_bigint::BigInt;
use num_traits::Zero;

use super::exact::invert_rational;
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::SimplicialNetwork;
use crate::parallel::Execution;
use crate::scalar::{int, ratio, Exact};

/// Outcome of an entrywise identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// `(row, col, expected, actual)` of the first failing entry.
    pub first_mismatch: Option<(usize, usize, String, String)>,
}

impl IdentityCheck {
    fn pass() -> Self {
        Self {
            holds: true,
            first_mismatch: None,
        }
    }

    fn fail(r: usize, c: usize, expected: String, actual: String) -> Self {
        Self {
            holds: false,
            first_mismatch: Some((r, c, expected, actual)),
        }
    }
}

fn check_level(network: &SimplicialNetwork, level: u32) -> Result<()> {
    if level == 0 || level > network.t() {
        return Err(Error::Parameter(format!(
            "level must be in 1..={}, got {level}",
            network.t()
        )));
    }
    Ok(())
}

fn adjacency_at(network: &SimplicialNetwork, level: u32) -> DenseMatrix<i64> {
    let n = network.nodes_at(level);
    let mut a = DenseMatrix::from_fn(n, n, |_, _| 0i64);
    for &(x, y) in network.edges_at(level) {
        a.set(x, y, 1);
        a.set(y, x, 1);
    }
    a
}

/// Old-by-new adjacency block at `level`.
fn cross_block(network: &SimplicialNetwork, level: u32) -> DenseMatrix<i64> {
    let a = adjacency_at(network, level);
    let old: Vec<usize> = (0..network.nodes_at(level - 1)).collect();
    let new: Vec<usize> = network.created_at(level).collect();
    a.select(&old, &new)
}

/// Checks `A_on A_no == q (D + A)` of the previous level.
pub fn verify_cross_block_product(
    network: &SimplicialNetwork,
    level: u32,
) -> Result<IdentityCheck> {
    check_level(network, level)?;
    let q = network.q() as i64;
    let cross = cross_block(network, level);
    let product = cross.matmul(&cross.transpose());

    let prev = adjacency_at(network, level - 1);
    let n = prev.rows();
    let expected = DenseMatrix::from_fn(n, n, |r, c| {
        if r == c {
            q * network.degree_at(r, level - 1) as i64
        } else {
            q * prev.get(r, c)
        }
    });
    Ok(match expected.first_mismatch(&product) {
        None => IdentityCheck::pass(),
        Some((r, c)) => IdentityCheck::fail(
            r,
            c,
            expected.get(r, c).to_string(),
            product.get(r, c).to_string(),
        ),
    })
}

/// Checks the clique-block inverse values and `A_on Q == A_on / 2`.
pub fn verify_clique_block_inverse(
    network: &SimplicialNetwork,
    level: u32,
) -> Result<IdentityCheck> {
    check_level(network, level)?;
    let q = network.q() as i64;
    let new: Vec<usize> = network.created_at(level).collect();
    let first = new[0];
    let w = new.len();

    // (q+1) I - A_nn must vanish outside the clique blocks.
    let a = adjacency_at(network, level);
    let nn = a.select(&new, &new);
    let clique = |v: usize| network.nodes()[v].clique;
    for r in 0..w {
        for c in 0..w {
            if clique(first + r) != clique(first + c) && *nn.get(r, c) != 0 {
                return Ok(IdentityCheck::fail(
                    r,
                    c,
                    "0".into(),
                    nn.get(r, c).to_string(),
                ));
            }
        }
    }

    let diag = ratio(3, 2 * q + 4);
    let off = ratio(1, 2 * q + 4);
    let mut inverse = DenseMatrix::from_fn(w, w, |_, _| Exact::zero());
    for start in (0..w).step_by(q as usize) {
        let block: Vec<usize> = (start..start + q as usize).collect();
        let m = nn
            .select(&block, &block)
            .map(|&v| int(-v))
            .add(&DenseMatrix::identity(q as usize).scale(&int(q + 1)));
        let inv = invert_rational(&m, Execution::Sequential)?;
        for r in 0..q as usize {
            for c in 0..q as usize {
                let want = if r == c { &diag } else { &off };
                if inv.get(r, c) != want {
                    return Ok(IdentityCheck::fail(
                        start + r,
                        start + c,
                        want.to_string(),
                        inv.get(r, c).to_string(),
                    ));
                }
                inverse.set(start + r, start + c, inv.get(r, c).clone());
            }
        }
    }

    let cross = cross_block(network, level).map(|&v| Exact::from_integer(BigInt::from(v)));
    let lhs = cross.matmul(&inverse);
    let rhs = cross.scale(&ratio(1, 2));
    Ok(match rhs.first_mismatch(&lhs) {
        None => IdentityCheck::pass(),
        Some((r, c)) => {
            IdentityCheck::fail(r, c, rhs.get(r, c).to_string(), lhs.get(r, c).to_string())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_network, DEFAULT_MAX_NODES};

    #[test]
    fn identities_hold_on_small_levels() {
        for (q, level) in [(1, 1), (2, 1), (1, 2), (3, 1)] {
            let g = build_network(q, level, DEFAULT_MAX_NODES).unwrap();
            assert!(
                verify_cross_block_product(&g, level).unwrap().holds,
                "q={q} l={level}"
            );
            assert!(
                verify_clique_block_inverse(&g, level).unwrap().holds,
                "q={q} l={level}"
            );
        }
    }

    #[test]
    fn level_zero_is_rejected() {
        let g = build_network(2, 1, DEFAULT_MAX_NODES).unwrap();
        assert!(verify_cross_block_product(&g, 0).is_err());
        assert!(verify_clique_block_inverse(&g, 2).is_err());
    }
}
