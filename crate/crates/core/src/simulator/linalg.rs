//! Dense kernels used by the simulator, all single-threaded so that results
//! do not depend on the worker count.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{cholesky_in_place, cholesky_in_place_scratch};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::diag::Diag;
use faer::{Accum, Mat, MatRef, Par};

use crate::error::{Error, Result};

pub(crate) fn product(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, 1.0, Par::Seq);
    out
}

/// ZᵀZ.
pub(crate) fn gram_cols(z: MatRef<'_, f64>) -> Mat<f64> {
    product(z.transpose(), z)
}

/// ZZᵀ.
pub(crate) fn gram_rows(z: MatRef<'_, f64>) -> Mat<f64> {
    product(z, z.transpose())
}

/// Solves A x = b in place for symmetric positive-definite A (lower triangle
/// read).
pub(crate) fn spd_solve(mut a: Mat<f64>, b: &mut [f64]) -> Result<()> {
    let n = a.nrows();
    let mut buf = MemBuffer::new(cholesky_in_place_scratch::<f64>(n, Par::Seq, Default::default()));
    cholesky_in_place(a.as_mut(), Default::default(), Par::Seq, MemStack::new(&mut buf), Default::default())
        .map_err(|e| Error::SolveFailure(format!("{e:?}")))?;
    let mut rhs = faer::MatMut::from_column_major_slice_mut(b, n, 1);
    solve_lower_triangular_in_place(a.as_ref(), rhs.as_mut(), Par::Seq);
    solve_upper_triangular_in_place(a.as_ref().transpose(), rhs.as_mut(), Par::Seq);
    if b.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::SolveFailure("non-finite solution".into()))
    }
}

/// Eigenvalues of a symmetric matrix in nondecreasing order.
pub(crate) fn sym_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    let mut s = Diag::<f64>::zeros(n);
    let mut buf =
        MemBuffer::new(self_adjoint_evd_scratch::<f64>(n, ComputeEigenvectors::No, Par::Seq, Default::default()));
    self_adjoint_evd(a, s.as_mut(), None, Par::Seq, MemStack::new(&mut buf), Default::default())
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    Ok(s.column_vector().iter().copied().collect())
}

/// Z·w.
pub(crate) fn mat_vec(z: MatRef<'_, f64>, w: &[f64]) -> Vec<f64> {
    let w = MatRef::from_column_major_slice(w, w.len(), 1);
    let out = product(z, w);
    out.col(0).iter().copied().collect()
}

/// Zᵀ·v.
pub(crate) fn mat_t_vec(z: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    mat_vec(z.transpose(), v)
}
