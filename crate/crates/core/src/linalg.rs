//! Small dense linear-algebra helpers over `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Singular values below `RANK_TOL * max(1, largest)` count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Minimum-norm least-squares solution of `a x = b` with its residual norm.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = RANK_TOL * smax.max(1.0);
    let x = svd.solve(b, eps).expect("u and v were computed");
    let r = (a * &x - b).norm();
    (x, r)
}

pub fn rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > RANK_TOL * smax.max(1.0)).count()
}

/// Orthonormal basis of the null space of `a`, one column per direction.
pub fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.ncols();
    let gram = a.transpose() * a;
    let eig = SymmetricEigen::new(gram);
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= RANK_TOL * lmax.max(1.0))
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
