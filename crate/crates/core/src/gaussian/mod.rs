//! Gaussian triples `(A, B, C)`, their phase-space matrix and symplectic
//! spectrum, the exact Gaussian positivity test and the Gaussian preorder.

mod preorder;

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{
    inverse, is_positive_definite, psd_sqrt, sym_eig, sym_eigenvalues, NumericsError, RealMatrix,
    RealSymMatrix,
};

pub use preorder::{
    equiv, preorder_leq, preorder_leq_with_r, sufficient_leq, PreorderResult, PreorderWitness,
};

/// Absolute slack on `μ ≤ 1` in [`gaussian_positive`].
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Relative tolerance for matching the two copies of each symplectic
/// eigenvalue.
pub const PAIR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix {which} is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotKernelValid { which: char, min_eigenvalue: f64 },
    #[error("phase-space matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("symplectic eigenvalues failed to pair: {a:e} vs {b:e}")]
    PairMismatch { a: f64, b: f64 },
    #[error("internal consistency check failed: {0}")]
    Consistency(&'static str),
}

/// The matrices of a Gaussian exponent
/// `−(x−y)ᵀA(x−y) − i(x−y)ᵀB(x+y) − (x+y)ᵀC(x+y)`.
///
/// `A` and `C` are symmetric, `B` is arbitrary. Triples used as kernels
/// additionally need `A` and `C` positive definite; see
/// [`GaussianTriple::is_kernel_valid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTriple {
    a: RealSymMatrix,
    b: RealMatrix,
    c: RealSymMatrix,
    kernel_valid: bool,
}

impl GaussianTriple {
    pub fn new(a: RealSymMatrix, b: RealMatrix, c: RealSymMatrix) -> Result<Self, GaussianError> {
        let n = a.dim();
        if c.dim() != n {
            return Err(GaussianError::DimensionMismatch {
                expected: n,
                found: c.dim(),
            });
        }
        if b.rows() != n || b.cols() != n {
            return Err(GaussianError::DimensionMismatch {
                expected: n,
                found: b.rows().max(b.cols()),
            });
        }
        if !b.is_finite() {
            return Err(NumericsError::NonFinite.into());
        }
        let kernel_valid = is_positive_definite(&a) && is_positive_definite(&c);
        Ok(GaussianTriple {
            a,
            b,
            c,
            kernel_valid,
        })
    }

    /// Builds from row-major data.
    pub fn from_row_major(
        n: usize,
        a: &[f64],
        b: &[f64],
        c: &[f64],
    ) -> Result<Self, GaussianError> {
        if b.len() != n * n {
            return Err(GaussianError::DimensionMismatch {
                expected: n * n,
                found: b.len(),
            });
        }
        Self::new(
            RealSymMatrix::from_row_major(n, a.to_vec())?,
            RealMatrix::from_row_major(n, n, b.to_vec()),
            RealSymMatrix::from_row_major(n, c.to_vec())?,
        )
    }

    pub fn scalar(a: f64, b: f64, c: f64) -> Result<Self, GaussianError> {
        Self::from_row_major(1, &[a], &[b], &[c])
    }

    /// `(I, 0, I)`
    pub fn identity(n: usize) -> Self {
        GaussianTriple {
            a: RealSymMatrix::identity(n),
            b: RealMatrix::zeros(n, n),
            c: RealSymMatrix::identity(n),
            kernel_valid: true,
        }
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &RealSymMatrix {
        &self.a
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    pub fn c(&self) -> &RealSymMatrix {
        &self.c
    }

    /// `A` and `C` positive definite, so the kernel is square integrable.
    pub fn is_kernel_valid(&self) -> bool {
        self.kernel_valid
    }

    pub fn require_kernel_valid(&self) -> Result<(), GaussianError> {
        if self.kernel_valid {
            return Ok(());
        }
        for (which, m) in [('A', &self.a), ('C', &self.c)] {
            let l = crate::numerics::min_eigenvalue(m)?;
            if l <= 0.0 {
                return Err(GaussianError::NotKernelValid {
                    which,
                    min_eigenvalue: l,
                });
            }
        }
        Err(GaussianError::Consistency("kernel validity flag"))
    }

    /// `(A + δI, B, C + δI)`, which keeps `A − C` and hence the equivalence
    /// class.
    pub fn shifted(&self, delta: f64) -> Result<Self, GaussianError> {
        Self::new(self.a.shifted(delta), self.b.clone(), self.c.shifted(delta))
    }

    /// Exponent `−rᵀAr − i rᵀB s − sᵀC s` with `r = x − y`, `s = x + y`.
    pub fn exponent(&self, x: &[f64], y: &[f64]) -> Result<Complex64, GaussianError> {
        let n = self.n();
        for v in [x, y] {
            if v.len() != n {
                return Err(GaussianError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let r: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let ar = self.a.matrix().bilinear(&r, &r);
        let br = self.b.bilinear(&r, &s);
        let cs = self.c.matrix().bilinear(&s, &s);
        Ok(Complex64::new(-ar - cs, -br))
    }

    /// `(ΛAΛ, ΛB, C)` with `Λ = diag(signs)`.
    pub fn sign_conjugated(&self, signs: &[f64]) -> Result<Self, GaussianError> {
        let n = self.n();
        if signs.len() != n {
            return Err(GaussianError::DimensionMismatch {
                expected: n,
                found: signs.len(),
            });
        }
        let a = RealMatrix::from_fn(n, n, |i, j| signs[i] * self.a.matrix()[(i, j)] * signs[j]);
        let b = RealMatrix::from_fn(n, n, |i, j| signs[i] * self.b[(i, j)]);
        Self::new(RealSymMatrix::new(a)?, b, self.c.clone())
    }
}

/// `exp` of [`GaussianTriple::exponent`].
pub fn eval_gaussian(g: &GaussianTriple, x: &[f64], y: &[f64]) -> Result<Complex64, GaussianError> {
    Ok(g.exponent(x, y)?.exp())
}

/// Phase-space representation `W(x, p) = c_G · exp{−vᵀGv}`, `v = (x, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceForm {
    pub g: RealSymMatrix,
    pub c_g: f64,
}

/// `G = [[4C + BᵀA⁻¹B, ½BᵀA⁻¹], [½A⁻¹B, ¼A⁻¹]]` and the prefactor of the
/// Wigner transform `W(x,p) = (2π)⁻ⁿ ∫ e^{−ipᵀy} κ(x + y/2, x − y/2) dy`
/// of the unnormalized kernel, `c_G = (2π)⁻ⁿ π^{n/2} (det A)^{−1/2}`.
pub fn phase_space_form(g: &GaussianTriple) -> Result<PhaseSpaceForm, GaussianError> {
    g.require_kernel_valid()?;
    let n = g.n();
    let a_inv = inverse(g.a.matrix())?;
    let bt = g.b.transpose();
    let top_left = &g.c.matrix().scale(4.0) + &bt.matmul(&a_inv).matmul(&g.b);
    let top_right = bt.matmul(&a_inv).scale(0.5);
    let bottom_left = a_inv.matmul(&g.b).scale(0.5);
    let bottom_right = a_inv.scale(0.25);
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    m.set_block(0, 0, &top_left);
    m.set_block(0, n, &top_right);
    m.set_block(n, 0, &bottom_left);
    m.set_block(n, n, &bottom_right);
    let gm = RealSymMatrix::new(m)?;
    let det_a: f64 = sym_eigenvalues(&g.a)?.iter().product();
    let pi = core::f64::consts::PI;
    let c_g = (2.0 * pi).powi(-(n as i32)) * pi.powf(n as f64 / 2.0) / det_a.sqrt();
    Ok(PhaseSpaceForm { g: gm, c_g })
}

/// `Ω = [[0, I], [−I, 0]]`
pub fn omega(n: usize) -> RealMatrix {
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// Williamson eigenvalues `μ₁ ≥ … ≥ μₙ > 0` of a positive definite `G`,
/// i.e. `±μₖ` are the eigenvalues of `iGΩ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpectrum {
    mus: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn max(&self) -> f64 {
        self.mus.first().copied().unwrap_or(0.0)
    }

    pub fn verdict(&self) -> PositivityVerdict {
        let max_mu = self.max();
        if max_mu <= 1.0 + POSITIVITY_TOL {
            PositivityVerdict::Positive {
                max_mu,
                margin: 1.0 - max_mu,
            }
        } else {
            PositivityVerdict::NotPositive { max_mu }
        }
    }
}

/// Symplectic spectrum from the singular values of the skew matrix
/// `K = G^{1/2} Ω G^{1/2}`, which is similar to `GΩ` up to the factor `i`.
///
/// The singular values are read off the symmetric embedding
/// `[[0, Kᵀ], [K, 0]]`, whose positive eigenvalues are the `μₖ`, each twice.
pub fn symplectic_spectrum(g: &RealSymMatrix) -> Result<SymplecticSpectrum, GaussianError> {
    let dim = g.dim();
    if !dim.is_multiple_of(2) {
        return Err(GaussianError::DimensionMismatch {
            expected: dim + 1,
            found: dim,
        });
    }
    let n = dim / 2;
    let eig = sym_eig(g)?;
    if eig.min() <= 0.0 {
        return Err(GaussianError::NotPositiveDefinite);
    }
    let r = psd_sqrt(g)?;
    let k = r.matrix().matmul(&omega(n)).matmul(r.matrix());
    let mut emb = RealMatrix::zeros(2 * dim, 2 * dim);
    emb.set_block(0, dim, &k.transpose());
    emb.set_block(dim, 0, &k);
    let vals = sym_eigenvalues(&RealSymMatrix::new(emb)?)?;
    // top `dim` eigenvalues, descending
    let pos: Vec<f64> = vals.iter().rev().take(dim).copied().collect();
    let scale = pos[0];
    let mut mus = Vec::with_capacity(n);
    for pair in pos.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if (a - b).abs() > PAIR_TOL * scale || b <= 0.0 {
            return Err(GaussianError::PairMismatch { a, b });
        }
        mus.push(0.5 * (a + b));
    }
    Ok(SymplecticSpectrum { mus })
}

/// Result of the Gaussian positivity test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PositivityVerdict {
    /// All `μₖ ≤ 1` within [`POSITIVITY_TOL`]; `margin = 1 − max μ` may be
    /// slightly negative inside the tolerance band.
    Positive {
        max_mu: f64,
        margin: f64,
    },
    NotPositive {
        max_mu: f64,
    },
}

impl PositivityVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, PositivityVerdict::Positive { .. })
    }

    pub fn max_mu(&self) -> f64 {
        match *self {
            PositivityVerdict::Positive { max_mu, .. }
            | PositivityVerdict::NotPositive { max_mu } => max_mu,
        }
    }
}

/// Exact positivity test for the Gaussian kernel of `g`: positive
/// semidefinite iff every symplectic eigenvalue of `G` is at most 1.
pub fn gaussian_positive(g: &GaussianTriple) -> Result<PositivityVerdict, GaussianError> {
    Ok(gaussian_spectrum(g)?.verdict())
}

/// Symplectic spectrum of the phase-space matrix of `g`.
pub fn gaussian_spectrum(g: &GaussianTriple) -> Result<SymplecticSpectrum, GaussianError> {
    symplectic_spectrum(&phase_space_form(g)?.g)
}

pub(crate) fn matrix_scale(ms: &[&RealMatrix]) -> f64 {
    ms.iter().map(|m| m.max_abs()).fold(1.0, f64::max)
}
