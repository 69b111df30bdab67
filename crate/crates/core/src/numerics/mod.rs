//! Dense small-matrix numerics: symmetric eigendecomposition, PSD square
//! roots, a branch-safe complex `√det`, LU solves and bisection.

mod eigen;
mod lu;
mod matrix;
mod roots;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use num_complex::Complex64;
use thiserror::Error;

pub use eigen::{hermitian_eig, sym_eig, sym_eigenvalues, HermitianEigen, SymEigen};
pub use lu::{det, inverse, Lu, Scalar};
pub use matrix::{
    ComplexMatrix, ComplexSymMatrix, Matrix, RealMatrix, RealSymMatrix, SYMMETRY_TOL,
};
pub use roots::{bracket_root, sign_change_brackets, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix asymmetry {asymmetry:e} exceeds tolerance (norm {scale:e})")]
    Asymmetric { asymmetry: f64, scale: f64 },
    #[error("matrix is indefinite (min eigenvalue {min_eigenvalue:e})")]
    Indefinite { min_eigenvalue: f64 },
    #[error("real part is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotRightHalfPlane { min_eigenvalue: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("no sign change on bracket: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoSignChange { f_lo: f64, f_hi: f64 },
}

/// Relative tolerance below which small negative eigenvalues are clamped by
/// [`psd_sqrt`].
pub const PSD_TOL: f64 = 1e-12;

/// Symmetric positive-semidefinite square root `R` with `R·R = m`.
pub fn psd_sqrt(m: &RealSymMatrix) -> Result<RealSymMatrix, NumericsError> {
    let eig = sym_eig(m)?;
    let norm = m.norm();
    if eig.min() < -PSD_TOL * norm {
        return Err(NumericsError::Indefinite {
            min_eigenvalue: eig.min(),
        });
    }
    let r = eig.reconstruct_with(|l| l.max(0.0).sqrt());
    RealSymMatrix::new(r)
}

/// Minimum eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(m: &RealSymMatrix) -> Result<f64, NumericsError> {
    Ok(sym_eig(m)?.min())
}

/// Returns `true` when all eigenvalues are strictly positive.
pub fn is_positive_definite(m: &RealSymMatrix) -> bool {
    matches!(min_eigenvalue(m), Ok(l) if l > 0.0)
}

/// `∏ √λᵢ` over the eigenvalues of a complex symmetric matrix whose real part
/// is positive definite, each root taken with positive real part.
///
/// With `R = Re m`, `S = Im m` we have `m = R^{1/2}(I + iK)R^{1/2}` where
/// `K = R^{-1/2} S R^{-1/2}` is real symmetric, so
/// `√det m = √det R · ∏ⱼ √(1 + iκⱼ)`. Both sides are the continuous branch of
/// `√det(R + tiS)` starting at the positive root for `t = 0`, and every
/// factor lies in the right half-plane.
pub fn complex_sqrt_det(m: &ComplexSymMatrix) -> Result<Complex64, NumericsError> {
    let re = m.re();
    let eig_r = sym_eig(&re)?;
    if eig_r.min() <= 0.0 {
        return Err(NumericsError::NotRightHalfPlane {
            min_eigenvalue: eig_r.min(),
        });
    }
    let inv_sqrt = eig_r.reconstruct_with(|l| 1.0 / l.sqrt());
    let k = m.im().congruence(&inv_sqrt);
    let kappas = sym_eigenvalues(&k)?;
    let mut out = Complex64::new(eig_r.values.iter().map(|l| l.sqrt()).product::<f64>(), 0.0);
    for kap in kappas {
        out *= Complex64::new(1.0, kap).sqrt();
    }
    Ok(out)
}

/// Determinant of a complex square matrix (LU, partial pivoting).
pub fn complex_det(m: &ComplexMatrix) -> Complex64 {
    det(m)
}

/// `Σ aᵢ bᵢ`
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Complex vector `Σ |zᵢ|²`.
pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
