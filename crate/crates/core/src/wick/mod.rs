//! Closed-form integration of polynomial × Gaussian integrands.
//!
//! The integrand over `z ∈ ℝᵐ` is `p(z, e) · exp(−zᵀQz + b(e)ᵀz + c(e))`
//! where `Q` is complex symmetric with positive definite real part and `e`
//! are external variables that stay symbolic. Completing the square,
//! `z = μ(e) + w` with `μ = ½Q⁻¹b`, gives
//!
//! ```text
//! ∫ … dz = π^{m/2}/√det Q · exp(¼ bᵀQ⁻¹b + c) · E[p(μ + w, e)],   w ~ N(0, ½Q⁻¹)
//! ```
//!
//! and the centered moments are expanded by Isserlis pairing.
//!
//! Kernels enter through their joint quadratic form in `(x, y)`; the
//! `(x−y, x+y)` parametrization of the triple is converted here and nowhere
//! else.

pub mod extended;
mod kernel_ops;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::gaussian::GaussianError;
use crate::numerics::{complex_sqrt_det, ComplexMatrix, ComplexSymMatrix, Lu, NumericsError};
use crate::poly::{Monomial, PolyError, Polynomial, PRUNE_TOL};

pub use kernel_ops::{
    integrate_out, inverse_wigner_transform, kernel_quadratic_form, triple_from_quadratic_form,
    wigner_transform, WignerForm,
};

/// Default cap on the total degree of a prefactor in the integration
/// variables.
pub const DEFAULT_DEGREE_CAP: u32 = 16;

/// Relative tolerance on parts of a quadratic form that must vanish when it
/// is read back as a kernel triple.
pub const FORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WickError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("prefactor degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent has degree above 2")]
    NotQuadratic,
    #[error("quadratic form is not a kernel form: {0}")]
    NotKernelForm(&'static str),
    #[error("coordinate selection must be a nonempty proper subset of 0..{n}")]
    InvalidCoords { n: usize },
}

/// `−zᵀQz + b(e)ᵀz + c(e)` over `m` integration variables and `p` external
/// ones.
#[derive(Clone, Debug)]
pub struct QuadraticExponent {
    q: ComplexSymMatrix,
    linear: Vec<Polynomial>,
    constant: Polynomial,
}

impl QuadraticExponent {
    /// `linear` has one entry per integration variable; all polynomials share
    /// the external variable count of `constant`.
    pub fn new(
        q: ComplexSymMatrix,
        linear: Vec<Polynomial>,
        constant: Polynomial,
    ) -> Result<Self, WickError> {
        if linear.len() != q.dim() {
            return Err(WickError::DimensionMismatch {
                expected: q.dim(),
                found: linear.len(),
            });
        }
        let p = constant.nvars();
        if let Some(bad) = linear.iter().find(|b| b.nvars() != p) {
            return Err(WickError::DimensionMismatch {
                expected: p,
                found: bad.nvars(),
            });
        }
        Ok(QuadraticExponent {
            q,
            linear,
            constant,
        })
    }

    /// `−zᵀQz` with no linear term and no external variables.
    pub fn centered(q: ComplexSymMatrix) -> Self {
        let m = q.dim();
        QuadraticExponent {
            q,
            linear: vec![Polynomial::zero(0); m],
            constant: Polynomial::zero(0),
        }
    }

    /// `−zᵀQz + bᵀz` with a constant vector `b`.
    pub fn with_linear(q: ComplexSymMatrix, b: &[Complex64]) -> Result<Self, WickError> {
        let linear = b.iter().map(|&c| Polynomial::constant(0, c)).collect();
        Self::new(q, linear, Polynomial::zero(0))
    }

    /// Splits a joint form `−uᵀHu`, `u = (z, e)` with `z` the first `m`
    /// coordinates, into `−zᵀH_zz z − 2zᵀH_ze e − eᵀH_ee e`.
    pub fn from_joint_form(h: &ComplexMatrix, m: usize) -> Result<Self, WickError> {
        let total = h.rows();
        if m > total {
            return Err(WickError::DimensionMismatch {
                expected: total,
                found: m,
            });
        }
        let p = total - m;
        let q = ComplexSymMatrix::new(h.block(0, 0, m, m))?;
        let linear = (0..m)
            .map(|i| {
                let coeffs: Vec<Complex64> = (0..p).map(|k| -2.0 * h[(i, m + k)]).collect();
                Polynomial::affine(Complex64::zero(), &coeffs)
            })
            .collect();
        let constant = quadratic_polynomial(&h.block(m, m, p, p).map(|v| -v));
        Self::new(q, linear, constant)
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn n_ext(&self) -> usize {
        self.constant.nvars()
    }

    pub fn q(&self) -> &ComplexSymMatrix {
        &self.q
    }

    pub fn linear(&self) -> &[Polynomial] {
        &self.linear
    }

    pub fn constant(&self) -> &Polynomial {
        &self.constant
    }

    /// Adds `Σ cᵢₖ eₖ` to the linear coefficient of `zᵢ`.
    pub fn add_linear(&mut self, i: usize, term: &Polynomial) {
        self.linear[i] = self.linear[i].add(term);
    }
}

/// `scalar · prefactor(e) · exp(exponent(e))` over the external variables.
#[derive(Clone, Debug)]
pub struct GaussianMomentResult {
    pub scalar: Complex64,
    pub prefactor: Polynomial,
    pub exponent: Polynomial,
}

impl GaussianMomentResult {
    pub fn n_ext(&self) -> usize {
        self.prefactor.nvars()
    }

    pub fn value(&self, e: &[Complex64]) -> Complex64 {
        self.scalar * self.prefactor.evaluate(e) * self.exponent.evaluate(e).exp()
    }

    /// The number itself when there are no external variables.
    pub fn scalar_value(&self) -> Option<Complex64> {
        (self.n_ext() == 0).then(|| self.value(&[]))
    }
}

/// `∫ exp(−zᵀQz + bᵀz + c) dz`
pub fn gaussian_integral(q: &QuadraticExponent) -> Result<GaussianMomentResult, WickError> {
    poly_gaussian_integral(&Polynomial::one(q.dim() + q.n_ext()), q)
}

/// `∫ p(z, e) exp(−zᵀQz + b(e)ᵀz + c(e)) dz` with the default degree cap.
/// The prefactor's variables are the `m` integration variables followed by
/// the external ones.
pub fn poly_gaussian_integral(
    prefactor: &Polynomial,
    q: &QuadraticExponent,
) -> Result<GaussianMomentResult, WickError> {
    poly_gaussian_integral_with_cap(prefactor, q, DEFAULT_DEGREE_CAP)
}

pub fn poly_gaussian_integral_with_cap(
    prefactor: &Polynomial,
    q: &QuadraticExponent,
    cap: u32,
) -> Result<GaussianMomentResult, WickError> {
    let m = q.dim();
    let p = q.n_ext();
    if prefactor.nvars() != m + p {
        return Err(WickError::DimensionMismatch {
            expected: m + p,
            found: prefactor.nvars(),
        });
    }
    let zdeg = prefactor
        .terms()
        .map(|(mono, _)| mono.exponents()[..m].iter().map(|&e| e as u32).sum::<u32>())
        .max();
    if let Some(d) = zdeg {
        if d > cap {
            return Err(WickError::DegreeCap { degree: d, cap });
        }
    }

    let sqrt_det = complex_sqrt_det(&q.q)?;
    let qinv = Lu::new(q.q.matrix())?.inverse();
    let scalar = Complex64::new(core::f64::consts::PI.powf(m as f64 / 2.0), 0.0) / sqrt_det;

    // μ(e) = ½ Q⁻¹ b(e)
    let mu: Vec<Polynomial> = (0..m)
        .map(|i| {
            (0..m).fold(Polynomial::zero(p), |acc, j| {
                acc.add(&q.linear[j].scale(0.5 * qinv[(i, j)]))
            })
        })
        .collect();
    // ¼ bᵀQ⁻¹b + c = ½ bᵀμ + c
    let exponent = (0..m).fold(q.constant.clone(), |acc, i| {
        acc.add(&q.linear[i].mul(&mu[i]).scale(Complex64::new(0.5, 0.0)))
    });

    let shifted = if mu.iter().all(Polynomial::is_zero) {
        prefactor.clone()
    } else {
        let targets: Vec<usize> = (m..m + p).collect();
        let mut images: Vec<Polynomial> = (0..m)
            .map(|i| Polynomial::var(m + p, i).add(&mu[i].embed(m + p, &targets)))
            .collect();
        images.extend((0..p).map(|k| Polynomial::var(m + p, m + k)));
        prefactor.substitute(&images)
    };

    let sigma = qinv.scale(Complex64::new(0.5, 0.0));
    let mut memo = BTreeMap::new();
    let mut out = Polynomial::zero(p);
    for (mono, &c) in shifted.terms() {
        let (alpha, beta) = mono.exponents().split_at(m);
        let ew = isserlis(alpha, &sigma, &mut memo);
        if !ew.is_zero() {
            out.add_term(Monomial::new(beta.to_vec()), c * ew);
        }
    }
    out.prune(PRUNE_TOL);
    Ok(GaussianMomentResult {
        scalar,
        prefactor: out,
        exponent,
    })
}

/// `E[w^α]` for `w ~ N(0, Σ)`, by recursion on the first nonzero exponent:
/// `E[wᵢ w^{α'}] = Σⱼ Σᵢⱼ α'ⱼ E[w^{α'−eⱼ}]`.
pub fn isserlis(
    alpha: &[u16],
    sigma: &ComplexMatrix,
    memo: &mut BTreeMap<Vec<u16>, Complex64>,
) -> Complex64 {
    let total: u32 = alpha.iter().map(|&a| a as u32).sum();
    if total == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if total % 2 == 1 {
        return Complex64::zero();
    }
    if let Some(&v) = memo.get(alpha) {
        return v;
    }
    let i = alpha.iter().position(|&a| a > 0).unwrap_or(0);
    let mut rest = alpha.to_vec();
    rest[i] -= 1;
    let mut s = Complex64::zero();
    for j in 0..rest.len() {
        if rest[j] == 0 || sigma[(i, j)].is_zero() {
            continue;
        }
        let f = rest[j] as f64;
        rest[j] -= 1;
        s += sigma[(i, j)] * f * isserlis(&rest, sigma, memo);
        rest[j] += 1;
    }
    memo.insert(alpha.to_vec(), s);
    s
}

/// `eᵀMe` as a polynomial in `e` (`M` assumed symmetric).
pub fn quadratic_polynomial(m: &ComplexMatrix) -> Polynomial {
    let p = m.rows();
    let mut out = Polynomial::zero(p);
    for i in 0..p {
        for j in 0..p {
            let mut e = vec![0u16; p];
            e[i] += 1;
            e[j] += 1;
            out.add_term(Monomial::new(e), m[(i, j)]);
        }
    }
    out.prune(PRUNE_TOL);
    out
}

/// Splits a polynomial of degree at most 2 into `c + lᵀe + eᵀMe` with `M`
/// symmetric.
pub fn quadratic_parts(
    poly: &Polynomial,
) -> Result<(Complex64, Vec<Complex64>, ComplexMatrix), WickError> {
    let p = poly.nvars();
    let mut c = Complex64::zero();
    let mut l = vec![Complex64::zero(); p];
    let mut m = ComplexMatrix::zeros(p, p);
    for (mono, &coef) in poly.terms() {
        let e = mono.exponents();
        match mono.degree() {
            0 => c += coef,
            1 => l[e.iter().position(|&k| k == 1).unwrap_or(0)] += coef,
            2 => {
                let idx: Vec<usize> = (0..p).filter(|&i| e[i] > 0).collect();
                if idx.len() == 1 {
                    m[(idx[0], idx[0])] += coef;
                } else {
                    m[(idx[0], idx[1])] += coef * 0.5;
                    m[(idx[1], idx[0])] += coef * 0.5;
                }
            }
            _ => return Err(WickError::NotQuadratic),
        }
    }
    Ok((c, l, m))
}
