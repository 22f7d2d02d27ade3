use faer::MatRef;

use super::linalg;
use crate::error::Result;

/// Ridge weights ŵ = (λI + ZᵀZ)⁻¹Zᵀy, through the smaller of the two
/// equivalent systems: primal when Z has fewer columns than rows, dual
/// otherwise.
pub fn ridge_solve(z: MatRef<'_, f64>, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if z.ncols() < z.nrows() {
        ridge_solve_primal(z, y, lambda)
    } else {
        ridge_solve_dual(z, y, lambda)
    }
}

/// Solves (λI_N + ZᵀZ)ŵ = Zᵀy.
pub fn ridge_solve_primal(z: MatRef<'_, f64>, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let mut a = linalg::gram_cols(z);
    for i in 0..a.nrows() {
        a[(i, i)] += lambda;
    }
    let mut w = linalg::mat_t_vec(z, y);
    linalg::spd_solve(a, &mut w)?;
    Ok(w)
}

/// Solves (λI_M + ZZᵀ)â = y and returns ŵ = Zᵀâ.
pub fn ridge_solve_dual(z: MatRef<'_, f64>, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let mut k = linalg::gram_rows(z);
    for i in 0..k.nrows() {
        k[(i, i)] += lambda;
    }
    let mut a = y.to_vec();
    linalg::spd_solve(k, &mut a)?;
    Ok(linalg::mat_t_vec(z, &a))
}
