//! Small dense linear-algebra helpers shared by the analysis modules.
//!
//! Everything is built on one primitive: Householder QR with column
//! pivoting. Balance and reaction matrices have highly degenerate spectra
//! (clusters of repeated singular values), which defeats the library SVD's
//! subspace extraction; the pivoted QR handles them exactly and gives rank,
//! column space, null space, complements, and least-squares solutions from
//! a single factorization.

use nalgebra::{DMatrix, DVector};

use crate::tol::RANK_REL_TOL;

/// Householder QR with column pivoting, `a * P = Q * R`, with the numerical
/// rank decided on the diagonal of R at `RANK_REL_TOL` relative.
struct PivotedQr {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    permutation: Vec<usize>,
    rank: usize,
}

fn pivoted_qr(a: &DMatrix<f64>) -> PivotedQr {
    let (rows, cols) = a.shape();
    let mut r = a.clone();
    let mut q = DMatrix::identity(rows, rows);
    let mut permutation: Vec<usize> = (0..cols).collect();
    let steps = rows.min(cols);
    let mut factored = 0;
    for k in 0..steps {
        // Pivot the widest remaining column to the front.
        let mut best = k;
        let mut best_norm = 0.0;
        for j in k..cols {
            let norm_sq: f64 = (k..rows).map(|i| r[(i, j)] * r[(i, j)]).sum();
            if norm_sq > best_norm {
                best_norm = norm_sq;
                best = j;
            }
        }
        if best_norm == 0.0 {
            break;
        }
        if best != k {
            r.swap_columns(k, best);
            permutation.swap(k, best);
        }

        // Householder reflector sending column k to +-|column| e_1.
        let mut v: Vec<f64> = (k..rows).map(|i| r[(i, k)]).collect();
        let norm = best_norm.sqrt();
        let alpha = -v[0].signum() * norm;
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq == 0.0 {
            factored = k + 1;
            continue;
        }
        let tau = 2.0 / v_norm_sq;
        r[(k, k)] = alpha;
        for i in k + 1..rows {
            r[(i, k)] = 0.0;
        }
        for j in k + 1..cols {
            let w: f64 = (k..rows).map(|i| r[(i, j)] * v[i - k]).sum::<f64>() * tau;
            for i in k..rows {
                r[(i, j)] -= w * v[i - k];
            }
        }
        for i in 0..rows {
            let w: f64 = (k..rows).map(|j| q[(i, j)] * v[j - k]).sum::<f64>() * tau;
            for j in k..rows {
                q[(i, j)] -= w * v[j - k];
            }
        }
        factored = k + 1;
    }
    let scale = (0..factored)
        .map(|i| r[(i, i)].abs())
        .fold(0.0_f64, f64::max);
    let rank = if scale == 0.0 {
        0
    } else {
        (0..factored)
            .take_while(|&i| r[(i, i)].abs() > RANK_REL_TOL * scale)
            .count()
    };
    PivotedQr {
        q,
        r,
        permutation,
        rank,
    }
}

/// Orthonormal basis of the column space of `mat`, together with the
/// numerical rank (relative threshold `RANK_REL_TOL`).
pub fn column_space_basis(mat: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let rows = mat.nrows();
    if rows == 0 || mat.ncols() == 0 {
        return (DMatrix::zeros(rows, 0), 0);
    }
    let qr = pivoted_qr(mat);
    (qr.q.columns(0, qr.rank).clone_owned(), qr.rank)
}

/// Numerical rank of `mat` with the crate-wide relative threshold.
pub fn numeric_rank(mat: &DMatrix<f64>) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0;
    }
    pivoted_qr(mat).rank
}

/// Orthonormal basis of the orthogonal complement of the span of `basis`
/// (an n x (n - r) matrix): the trailing Q columns of the factorization.
pub fn orthonormal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    let qr = pivoted_qr(basis);
    qr.q.columns(qr.rank, n - qr.rank).clone_owned()
}

/// Orthonormal basis of the null space of `mat` (an n_cols x nullity
/// matrix): the orthogonal complement of the row space.
pub fn nullspace(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = mat.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if mat.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let qr = pivoted_qr(&mat.transpose());
    qr.q.columns(qr.rank, cols - qr.rank).clone_owned()
}

/// Least-squares solution of `a x = b` (basic solution: free pivoted
/// columns get zero). All minimizers share the same residual, and for the
/// consistent systems produced by the toric machinery they agree on every
/// quantity downstream consumers read off.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let cols = a.ncols();
    if a.nrows() == 0 || cols == 0 {
        return DVector::zeros(cols);
    }
    let qr = pivoted_qr(a);
    let projected = qr.q.transpose() * b;
    let mut z = DVector::zeros(qr.rank);
    for i in (0..qr.rank).rev() {
        let mut acc = projected[i];
        for j in i + 1..qr.rank {
            acc -= qr.r[(i, j)] * z[j];
        }
        z[i] = acc / qr.r[(i, i)];
    }
    let mut solution = DVector::zeros(cols);
    for i in 0..qr.rank {
        solution[qr.permutation[i]] = z[i];
    }
    solution
}

/// Component of `v` orthogonal to the span of the orthonormal `basis`.
pub fn project_out(basis: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    if basis.ncols() == 0 {
        return v.clone();
    }
    v - basis * (basis.transpose() * v)
}
