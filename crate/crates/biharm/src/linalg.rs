//! Linear algebra over jet-valued matrices.
//!
//! Matrices here are dense `Vec<Vec<Jet>>` of size at most 7×7. Inversion
//! uses Gauss–Jordan elimination with partial pivoting on the constant terms;
//! determinants use a division-free subset expansion so that minors with a
//! vanishing constant term (which occur for perfectly regular immersions)
//! still come out right.

use crate::jets::{Jet, JetError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular at the base point")]
    Singular,
    #[error(transparent)]
    Jet(#[from] JetError),
}

pub type JetMatrix = Vec<Vec<Jet>>;

/// Gauss–Jordan inverse. Pivots are selected by constant-term magnitude; a
/// pivot below `1e-150` reports the matrix as singular.
pub fn jet_mat_inverse(a: &JetMatrix) -> Result<JetMatrix, LinalgError> {
    let n = a.len();
    let mut work: Vec<Vec<Jet>> = a.iter().map(|row| row.to_vec()).collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a[0][0].constant_like(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                work[r][col]
                    .value()
                    .abs()
                    .total_cmp(&work[s][col].value().abs())
            })
            .unwrap();
        if work[pivot_row][col].value().abs() < 1e-150 {
            return Err(LinalgError::Singular);
        }
        work.swap(col, pivot_row);
        inv.swap(col, pivot_row);

        let pivot_inv = work[col][col].recip()?;
        for j in 0..n {
            work[col][j] = &work[col][j] * &pivot_inv;
            inv[col][j] = &inv[col][j] * &pivot_inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[row][col].clone();
            if factor.coefficients().iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..n {
                let w = &work[col][j] * &factor;
                work[row][j] = &work[row][j] - &w;
                let v = &inv[col][j] * &factor;
                inv[row][j] = &inv[row][j] - &v;
            }
        }
    }
    Ok(inv)
}

/// Division-free determinant of a square jet matrix, by dynamic programming
/// over column subsets (Laplace expansion with memoization).
pub fn jet_mat_det(rows: &[&[Jet]]) -> Jet {
    let n = rows.len();
    assert!(n >= 1 && rows.iter().all(|r| r.len() == n));
    assert!(n <= 16, "determinant size out of range");
    let zero = rows[0][0].constant_like(0.0);

    // dp[mask] = determinant of the submatrix with rows 0..popcount(mask)
    // and columns in `mask`.
    let full = 1usize << n;
    let mut dp: Vec<Option<Jet>> = vec![None; full];
    dp[0] = Some(rows[0][0].constant_like(1.0));
    for mask in 1..full {
        let r = (mask as u32).count_ones() as usize - 1;
        let mut acc = zero.clone();
        // expanding along row r: cofactor sign is (−1)^(r + column position)
        let mut sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let sub = dp[mask & !(1 << col)].as_ref().expect("filled in order");
            acc.add_prod(&rows[r][col].scale(sign), sub);
            sign = -sign;
        }
        dp[mask] = Some(acc);
    }
    dp[full - 1].take().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet;

    fn var(i: usize, v: f64) -> Jet {
        Jet::variable(i, v, 2, 3).unwrap()
    }

    fn c(v: f64) -> Jet {
        Jet::constant(v, 2, 3)
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let x = var(0, 0.3);
        let y = var(1, -0.1);
        let a = vec![
            vec![&c(2.0) + &(&x * &y), x.clone(), y.clone()],
            vec![y.clone(), &c(3.0) + &x, c(0.5)],
            vec![x.clone(), c(0.0), &c(1.0) + &(&y * &y)],
        ];
        let inv = jet_mat_inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = c(0.0);
                for k in 0..3 {
                    acc.add_prod(&a[i][k], &inv[k][j]);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                for (rank, coeff) in acc.coefficients().iter().enumerate() {
                    let target = if rank == 0 { expect } else { 0.0 };
                    assert!(
                        (coeff - target).abs() < 1e-12,
                        "entry ({i},{j}) rank {rank}: {coeff}"
                    );
                }
            }
        }
    }

    #[test]
    fn determinant_handles_zero_constant_minor() {
        // [[x, 1], [1, x]] has determinant x² − 1 even though the (0,0)
        // entry vanishes at the base point.
        let x = var(0, 0.0);
        let rows_storage = vec![vec![x.clone(), c(1.0)], vec![c(1.0), x.clone()]];
        let rows: Vec<&[Jet]> = rows_storage.iter().map(|r| r.as_slice()).collect();
        let det = jet_mat_det(&rows);
        assert!((det.value() - -1.0).abs() < 1e-15);
        assert!((det.extract_derivative(&[2, 0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn determinant_matches_pivoted_product() {
        let x = var(0, 0.2);
        let y = var(1, 0.4);
        let rows_storage = vec![
            vec![&c(1.0) + &x, y.clone(), c(0.3)],
            vec![c(-0.2), &c(2.0) + &y, x.clone()],
            vec![y.clone(), x.clone(), &c(1.5) + &(&x * &y)],
        ];
        let rows: Vec<&[Jet]> = rows_storage.iter().map(|r| r.as_slice()).collect();
        let det = jet_mat_det(&rows);
        // value cross-checked against the scalar 3×3 determinant
        let (xv, yv) = (0.2, 0.4);
        let m = [
            [1.0 + xv, yv, 0.3],
            [-0.2, 2.0 + yv, xv],
            [yv, xv, 1.5 + xv * yv],
        ];
        let scalar = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        assert!((det.value() - scalar).abs() < 1e-14);
    }
}
