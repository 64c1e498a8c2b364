//! Fraction-free (Bareiss) Gauss-Jordan inversion over the integers.
//!
//! Elimination keeps every intermediate entry an integer minor, so the
//! result is `adj(A)` up to sign together with `det(A)` and no rational
//! arithmetic happens until the caller divides.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::parallel::{self, Execution};

/// `A^{-1} = numer / denom` with `denom = ±det(A)`.
#[derive(Debug, Clone)]
pub struct ScaledInverse {
    pub numer: DenseMatrix<BigInt>,
    pub denom: BigInt,
}

impl ScaledInverse {
    pub fn dim(&self) -> usize {
        self.numer.rows()
    }

    pub fn entry(&self, r: usize, c: usize) -> BigRational {
        BigRational::new(self.numer.get(r, c).clone(), self.denom.clone())
    }

    pub fn to_rational(&self) -> DenseMatrix<BigRational> {
        self.numer
            .map(|v| BigRational::new(v.clone(), self.denom.clone()))
    }
}

/// Inverts a square integer matrix exactly.
pub fn invert_integer(a: &DenseMatrix<BigInt>, exec: Execution) -> Result<ScaledInverse> {
    assert!(a.is_square(), "only square matrices are invertible");
    let n = a.rows();
    if n == 0 {
        return Ok(ScaledInverse {
            numer: DenseMatrix::from_vec(0, 0, Vec::new()),
            denom: BigInt::one(),
        });
    }
    // Column c of `work` holds the left half while c is not yet pivoted and
    // the right half afterwards. The untouched right-half columns are
    // multiples of unit vectors and stay implicit.
    let mut work = a.clone().into_data();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();

    for k in 0..n {
        if work[k * n + k].is_zero() {
            let swap = (k + 1..n)
                .find(|&r| !work[r * n + k].is_zero())
                .ok_or(Error::Singular)?;
            for c in k..n {
                work.swap(k * n + c, swap * n + c);
            }
            for c in 0..k {
                work.swap(k * n + c, swap * n + c);
            }
            perm.swap(k, swap);
        }
        let pivot_row: Vec<BigInt> = work[k * n..(k + 1) * n].to_vec();
        let pivot = pivot_row[k].clone();
        let divisor = prev.clone();

        parallel::for_each_row(exec, &mut work, n, |i, row| {
            if i == k {
                return;
            }
            let factor = std::mem::take(&mut row[k]);
            for c in 0..n {
                if c == k {
                    continue;
                }
                let mut v = &row[c] * &pivot;
                if !factor.is_zero() && !pivot_row[c].is_zero() {
                    v -= &factor * &pivot_row[c];
                }
                if !v.is_zero() {
                    v = exact_div(v, &divisor);
                }
                row[c] = v;
            }
            row[k] = -factor;
        });
        work[k * n + k] = prev;
        prev = pivot;
    }

    // `work` now inverts the row-permuted matrix P·A; undo the permutation
    // on the columns.
    let mut numer = vec![BigInt::zero(); n * n];
    for r in 0..n {
        for (k, &orig) in perm.iter().enumerate() {
            numer[r * n + orig] = std::mem::take(&mut work[r * n + k]);
        }
    }
    Ok(ScaledInverse {
        numer: DenseMatrix::from_vec(n, n, numer),
        denom: prev,
    })
}

fn exact_div(v: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return v;
    }
    debug_assert!((&v % d).is_zero(), "Bareiss division must be exact");
    v / d
}

/// Exact inverse of a rational matrix.
pub fn invert_rational(
    a: &DenseMatrix<BigRational>,
    exec: Execution,
) -> Result<DenseMatrix<BigRational>> {
    let common = a
        .data()
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled = a.map(|v| (v * BigRational::from_integer(common.clone())).to_integer());
    let inv = invert_integer(&scaled, exec)?;
    let factor = BigRational::from_integer(common);
    Ok(inv.to_rational().map(|v| v * &factor))
}

/// Absolute value of the determinant as a by-product of inversion.
pub fn abs_det(a: &DenseMatrix<BigInt>) -> Result<BigInt> {
    Ok(invert_integer(a, Execution::Sequential)?.denom.abs())
}
