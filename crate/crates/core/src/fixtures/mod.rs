//! Kernel families used by the examples, tests and the `fixture` command.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::gaussian::{GaussianError, GaussianTriple};
use crate::poly::{MultiPoly, PolyError, Polynomial};
use crate::spectral::{KernelError, LinearFamily, PolyGaussianKernel, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("unsupported excitation level {0}; expected 0, 1 or 2")]
    UnsupportedLevel(u32),
    #[error("parameter {name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `1 − (x−y)²`
fn gamma_base() -> MultiPoly {
    MultiPoly::from_terms(
        1,
        [
            (vec![0, 0], c(1.0)),
            (vec![2, 0], c(-1.0)),
            (vec![1, 1], c(2.0)),
            (vec![0, 2], c(-1.0)),
        ],
    )
    .expect("valid exponents")
}

/// `(x+y)²`
fn gamma_slope() -> MultiPoly {
    MultiPoly::from_terms(
        1,
        [
            (vec![2, 0], c(1.0)),
            (vec![1, 1], c(2.0)),
            (vec![0, 2], c(1.0)),
        ],
    )
    .expect("valid exponents")
}

/// `(3/2 + δ, 0, 1 + δ)`
pub fn kappa_triple(delta: f64) -> Result<GaussianTriple, FixtureError> {
    if !(delta > -1.0 && delta.is_finite()) {
        return Err(FixtureError::OutOfRange {
            name: "delta",
            value: delta,
        });
    }
    Ok(GaussianTriple::scalar(1.5 + delta, 0.0, 1.0 + delta)?)
}

/// `(γ(x+y)² + 1 − (x−y)²) · exp(−(3/2+δ)(x−y)² − (1+δ)(x+y)²)` as a
/// family in `γ`, unnormalized.
pub fn kappa_family(delta: f64) -> Result<LinearFamily, FixtureError> {
    Ok(LinearFamily::new(
        gamma_base(),
        gamma_slope(),
        kappa_triple(delta)?,
    )?)
}

/// Unit-trace normalization of the family member at `(γ, δ)`:
/// `4(1+δ)^{3/2} / (√π (2 + 2δ + γ))`.
pub fn kappa_norm(gamma: f64, delta: f64) -> f64 {
    4.0 * (1.0 + delta).powf(1.5) / (PI.sqrt() * (2.0 + 2.0 * delta + gamma))
}

/// The normalized member at `(γ, δ)`; needs `γ > −2(1+δ)` for a positive
/// trace.
pub fn kappa_gamma_delta(gamma: f64, delta: f64) -> Result<PolyGaussianKernel, FixtureError> {
    if !(gamma.is_finite() && 2.0 + 2.0 * delta + gamma > 0.0) {
        return Err(FixtureError::OutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    Ok(kappa_family(delta)?.kernel(gamma, kappa_norm(gamma, delta))?)
}

/// Cubics whose positive roots are the `δ → ∞` limits of the roots of
/// `e_3, e_4` (shared) and of `e_5`, highest degree first. These are not
/// derived by the engine; they are reference values for it.
pub const LIMIT_CUBIC_K3_K4: [f64; 4] = [1.0, -2.5, -7.5, -2.25];
pub const LIMIT_CUBIC_K5: [f64; 4] = [16.0, -34.0, -120.0, -15.0];

/// Physicists' Hermite polynomial `H_level(t)` for `level ≤ 2`, lowest
/// degree first.
fn hermite(level: u32) -> Result<Vec<f64>, FixtureError> {
    match level {
        0 => Ok(vec![1.0]),
        1 => Ok(vec![0.0, 2.0]),
        2 => Ok(vec![-2.0, 0.0, 4.0]),
        l => Err(FixtureError::UnsupportedLevel(l)),
    }
}

/// `H_ℓ(βx)` as a polynomial in variable `var` of `nvars`.
fn hermite_in(level: u32, beta: f64, nvars: usize, var: usize) -> Result<Polynomial, FixtureError> {
    let mut p = Polynomial::zero(nvars);
    for (d, &h) in hermite(level)?.iter().enumerate() {
        if h != 0.0 {
            let mut e = vec![0u16; nvars];
            e[var] = d as u16;
            p.add_term(crate::poly::Monomial::new(e), c(h * beta.powi(d as i32)));
        }
    }
    Ok(p)
}

/// Oscillator eigenstate `|ψ_ℓ⟩⟨ψ_ℓ|` at inverse length `β`, in
/// polynomial-Gaussian form:
///
/// ```text
/// ρ(x, y) = β/(2^ℓ ℓ! √π) · H_ℓ(βx) H_ℓ(βy) · exp(−½β²(2R² + ½r²))
/// ```
///
/// with `R = (x+y)/2`, `r = x−y`, i.e. `A = C = β²/4`, `B = 0`. Note
/// `H_ℓ(βR + βr/2) = H_ℓ(βx)`.
pub fn caldeira(level: u32, beta: f64) -> Result<PolyGaussianKernel, FixtureError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(FixtureError::OutOfRange {
            name: "beta",
            value: beta,
        });
    }
    let poly = hermite_in(level, beta, 2, 0)?.mul(&hermite_in(level, beta, 2, 1)?);
    let q = beta * beta / 4.0;
    let triple = GaussianTriple::scalar(q, 0.0, q)?;
    let fact: f64 = (1..=level).map(|v| v as f64).product();
    let norm = beta / (2f64.powi(level as i32) * fact * PI.sqrt());
    Ok(PolyGaussianKernel::new(
        MultiPoly::new(1, poly)?,
        triple,
        norm,
    )?)
}

/// Coupled two-mode Gaussian state `A = [[2, t], [t, 2]]`,
/// `C = [[1, t], [t, 1]]`, `B = 0`, whose partial transpose is not positive
/// for `t > 1/2`. Frozen at [`NPT_COUPLING`].
pub fn npt_two_mode(t: f64) -> Result<GaussianTriple, FixtureError> {
    if !(t.abs() < 1.0) {
        return Err(FixtureError::OutOfRange {
            name: "t",
            value: t,
        });
    }
    Ok(GaussianTriple::from_row_major(
        2,
        &[2.0, t, t, 2.0],
        &[0.0; 4],
        &[1.0, t, t, 1.0],
    )?)
}

pub const NPT_COUPLING: f64 = 0.75;
/// Largest symplectic eigenvalue of the partial transpose at
/// [`NPT_COUPLING`]: `√((1+t)/(2−t)) = √1.4`.
pub const NPT_PT_MAX_MU: f64 = 1.183_215_956_619_923_2;
