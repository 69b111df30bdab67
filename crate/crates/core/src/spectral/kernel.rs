use num_complex::Complex64;
use thiserror::Error;

use crate::gaussian::{eval_gaussian, GaussianError, GaussianTriple};
use crate::poly::{MultiPoly, PolyError};

/// Relative tolerance, against the largest coefficient, for accepting a
/// polynomial as self-adjoint. Accepted polynomials are replaced by their
/// Hermitian part so that downstream quantities are exactly real.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error("polynomial has n = {poly} but the triple has n = {triple}")]
    DimensionMismatch { poly: usize, triple: usize },
    #[error("polynomial is not self-adjoint (deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("normalization must be finite and positive, got {0}")]
    InvalidNorm(f64),
}

/// `κ(x, y) = norm · P(x, y) · κ_G(x, y)`
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGaussianKernel {
    poly: MultiPoly,
    triple: GaussianTriple,
    norm: f64,
}

impl PolyGaussianKernel {
    pub fn new(poly: MultiPoly, triple: GaussianTriple, norm: f64) -> Result<Self, KernelError> {
        if poly.n() != triple.n() {
            return Err(KernelError::DimensionMismatch {
                poly: poly.n(),
                triple: triple.n(),
            });
        }
        if !(norm.is_finite() && norm > 0.0) {
            return Err(KernelError::InvalidNorm(norm));
        }
        triple.require_kernel_valid()?;
        let deviation = poly.self_adjoint_deviation();
        let scale = poly.poly().max_abs_coeff();
        if deviation > SELF_ADJOINT_TOL * scale {
            return Err(KernelError::NotSelfAdjoint { deviation });
        }
        let poly = if deviation > 0.0 {
            poly.hermitian_part()
        } else {
            poly
        };
        Ok(PolyGaussianKernel { poly, triple, norm })
    }

    /// Pure Gaussian kernel, `P = 1`, `norm = 1`.
    pub fn gaussian(triple: GaussianTriple) -> Result<Self, KernelError> {
        let n = triple.n();
        Self::new(MultiPoly::one(n), triple, 1.0)
    }

    pub fn n(&self) -> usize {
        self.triple.n()
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn triple(&self) -> &GaussianTriple {
        &self.triple
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn with_triple(&self, triple: GaussianTriple) -> Result<Self, KernelError> {
        Self::new(self.poly.clone(), triple, self.norm)
    }

    pub fn with_norm(&self, norm: f64) -> Result<Self, KernelError> {
        Self::new(self.poly.clone(), self.triple.clone(), norm)
    }

    /// `κ(x, y)`
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<Complex64, KernelError> {
        let g = eval_gaussian(&self.triple, x, y)?;
        Ok(self.poly.evaluate(x, y)? * g * self.norm)
    }
}
