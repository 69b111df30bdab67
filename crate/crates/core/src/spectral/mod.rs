//! Trace moments `M_j = Tr(κ̂ʲ)`, the elementary symmetric functions `e_k`
//! of the spectrum, and the tests built on them.
//!
//! A self-adjoint trace-class operator is positive semidefinite exactly when
//! every `e_k` is nonnegative, so a negative `e_k` certifies non-positivity.
//! Nonnegative `e_1..e_K` proves nothing about larger `k`; reports say
//! "consistent up to K" and never "positive".

mod kernel;
mod mercer;
mod nystrom;
mod zroot;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::gaussian::{GaussianError, GaussianTriple};
use crate::numerics::{det, ComplexSymMatrix, NumericsError, RealMatrix};
use crate::poly::Polynomial;
use crate::wick::extended::{
    centered_integral, Extended, RealDense, RealPoly, RealScalar, EXTENDED_BITS,
};
use crate::wick::{kernel_quadratic_form, poly_gaussian_integral, QuadraticExponent, WickError};

pub use kernel::{KernelError, PolyGaussianKernel, SELF_ADJOINT_TOL};
pub use mercer::{mercer_search, verify_certificate, MercerCertificate, MercerConfig};
pub use nystrom::{nystrom_oracle, NystromResult, NYSTROM_TRACE_TOL};
pub use zroot::{
    delta_scan, z_root, DeltaScan, DeltaValue, LinearFamily, ZRootResult, ZScanConfig,
    CONFIRM_DELTA, INFINITE_DELTA,
};

/// Largest moment order accepted by [`moment`].
pub const MAX_MOMENT_ORDER: usize = 8;

/// Relative bound on the imaginary residue of a moment.
pub const MOMENT_IMAG_TOL: f64 = 1e-9;

/// `e_k` counts as negative below `−SWEEP_TOL · max(1, |e_1|)^k`.
pub const SWEEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("moment order {j} outside 1..={max}")]
    MomentOrder { j: usize, max: usize },
    #[error("moment has imaginary residue {imag:e} against value {value:e}")]
    ImaginaryResidue { value: f64, imag: f64 },
    #[error("extended-precision moments need B = 0 and real polynomial coefficients")]
    NotReal,
    #[error("no sign change of e_{k} for gamma in [{lo}, {hi}]")]
    NoRootBracket { k: usize, lo: f64, hi: f64 },
    #[error("shifted triple is not equivalent to the original (delta = {delta})")]
    NotEquivalent { delta: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// The `jn × jn` form of the cyclic chain `κ(x₁,x₂)κ(x₂,x₃)⋯κ(x_j,x₁)`.
pub fn chain_form(triple: &GaussianTriple, j: usize) -> Result<ComplexSymMatrix, SpectralError> {
    let n = triple.n();
    let h = kernel_quadratic_form(triple);
    let mut q = crate::numerics::ComplexMatrix::zeros(j * n, j * n);
    for link in 0..j {
        let (a, b) = (link * n, ((link + 1) % j) * n);
        for r in 0..n {
            for c in 0..n {
                q[(a + r, a + c)] += h[(r, c)];
                q[(b + r, b + c)] += h[(n + r, n + c)];
                q[(a + r, b + c)] += h[(r, n + c)];
                q[(b + r, a + c)] += h[(n + r, c)];
            }
        }
    }
    Ok(ComplexSymMatrix::new(q)?)
}

/// Variable map for link `link` of a `j`-chain: `x → x_link`,
/// `y → x_{link+1}`, and `p` trailing external variables kept in place.
fn chain_targets(n: usize, j: usize, link: usize, p: usize) -> Vec<usize> {
    let next = (link + 1) % j;
    (0..n)
        .map(|k| link * n + k)
        .chain((0..n).map(|k| next * n + k))
        .chain((0..p).map(|e| j * n + e))
        .collect()
}

/// `∏ P(x_i, x_{i+1})` over the cycle, as a polynomial in `jn + p`
/// variables; `p` trailing variables of `link` are shared external ones.
pub fn chain_prefactor(link: &Polynomial, n: usize, j: usize) -> Polynomial {
    let p = link.nvars() - 2 * n;
    let total = j * n + p;
    (0..j).fold(Polynomial::one(total), |acc, i| {
        acc.mul(&link.embed(total, &chain_targets(n, j, i, p)))
    })
}

/// Largest moment order whose chain prefactor stays within the integration
/// degree cap for a polynomial of total degree `poly_degree`.
pub fn max_order_for_degree(poly_degree: u32) -> usize {
    match poly_degree {
        0 => MAX_MOMENT_ORDER,
        d => MAX_MOMENT_ORDER.min((crate::wick::DEFAULT_DEGREE_CAP / d) as usize),
    }
}

fn check_order(j: usize) -> Result<(), SpectralError> {
    if j == 0 || j > MAX_MOMENT_ORDER {
        return Err(SpectralError::MomentOrder {
            j,
            max: MAX_MOMENT_ORDER,
        });
    }
    Ok(())
}

/// `M_j = Tr(κ̂ʲ)` by closed-form integration of the chain.
pub fn moment(k: &PolyGaussianKernel, j: usize) -> Result<f64, SpectralError> {
    check_order(j)?;
    let q = QuadraticExponent::centered(chain_form(k.triple(), j)?);
    let prefactor = chain_prefactor(k.poly().poly(), k.n(), j);
    let res = poly_gaussian_integral(&prefactor, &q)?;
    let z = res.scalar_value().unwrap_or_default() * k.norm().powi(j as i32);
    real_part_checked(z)
}

/// The same kernel rescaled to unit trace.
pub fn normalize_trace(k: &PolyGaussianKernel) -> Result<PolyGaussianKernel, SpectralError> {
    let t = moment(k, 1)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(SpectralError::InvalidArgument(
            "trace must be positive to normalize",
        ));
    }
    Ok(k.with_norm(k.norm() / t)?)
}

fn real_part_checked(z: Complex64) -> Result<f64, SpectralError> {
    if z.im.abs() > MOMENT_IMAG_TOL * z.norm() {
        return Err(SpectralError::ImaginaryResidue {
            value: z.re,
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// `M_1..M_kmax`.
pub fn moments(k: &PolyGaussianKernel, kmax: usize) -> Result<Vec<f64>, SpectralError> {
    (1..=kmax).map(|j| moment(k, j)).collect()
}

/// Real chain form over a [`RealScalar`]; needs `B = 0`.
fn real_chain_form<T: RealScalar>(
    triple: &GaussianTriple,
    j: usize,
) -> Result<RealDense<T>, SpectralError> {
    if triple.b().max_abs() != 0.0 {
        return Err(SpectralError::NotReal);
    }
    let q = chain_form(triple, j)?;
    let m = q.matrix();
    Ok(RealDense::from_fn(m.rows(), |r, c| {
        T::from_f64(m[(r, c)].re)
    }))
}

/// Moments in extended precision, `norm` included. Requires `B = 0` and
/// real polynomial coefficients.
pub fn moments_extended(
    k: &PolyGaussianKernel,
    kmax: usize,
) -> Result<Vec<Extended>, SpectralError> {
    let link = RealPoly::<Extended>::from_polynomial(k.poly().poly())
        .map_err(|_| SpectralError::NotReal)?;
    let norm = Extended::from_f64(k.norm());
    (1..=kmax)
        .map(|j| {
            check_order(j)?;
            let q = real_chain_form::<Extended>(k.triple(), j)?;
            let pre = real_chain_prefactor(&link, k.n(), j);
            let v = centered_integral(&pre, &q)?.evaluate(&[]);
            Ok((0..j).fold(v, |acc, _| acc * norm.clone()))
        })
        .collect()
}

pub(crate) fn real_chain_prefactor<T: RealScalar>(
    link: &RealPoly<T>,
    n: usize,
    j: usize,
) -> RealPoly<T> {
    let p = link.nvars() - 2 * n;
    let total = j * n + p;
    (0..j).fold(RealPoly::constant(total, T::one()), |acc, i| {
        acc.mul(&link.embed(total, &chain_targets(n, j, i, p)))
    })
}

/// `e_1..e_K` from `M_1..M_K` by Newton's identities,
/// `k e_k = Σ_{j=1..k} (−1)^{j−1} e_{k−j} M_j`.
pub fn elementary_symmetric(moments: &[f64]) -> Vec<f64> {
    newton_identities(moments)
}

/// Newton's identities over any [`RealScalar`].
pub fn newton_identities<T: RealScalar>(moments: &[T]) -> Vec<T> {
    let mut e = vec![T::one()];
    for k in 1..=moments.len() {
        let mut s = T::zero();
        for j in 1..=k {
            let t = e[k - j].clone() * moments[j - 1].clone();
            s = if j % 2 == 1 { s + t } else { s - t };
        }
        e.push(s / T::from_f64(k as f64));
    }
    e.remove(0);
    e
}

/// Same quantities through the determinant form
/// `e_k = det(T_k)/k!` with `T_k[i][i] = M_1`, `T_k[i][i+1] = i+1` and
/// `T_k[i][l] = M_{i−l+1}` below the diagonal.
pub fn elementary_symmetric_det(moments: &[f64]) -> Vec<f64> {
    (1..=moments.len())
        .map(|k| {
            let t = RealMatrix::from_fn(k, k, |i, l| {
                if l == i + 1 {
                    (i + 1) as f64
                } else if l <= i {
                    moments[i - l]
                } else {
                    0.0
                }
            });
            let fact: f64 = (1..=k).map(|v| v as f64).product();
            det(&t) / fact
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVerdict {
    /// `e_k` is negative beyond tolerance: the operator is not positive
    /// semidefinite.
    CertifiedNotPsd { k: usize },
    /// `e_1..e_kmax` are nonnegative within tolerance. This is not a proof of
    /// positivity.
    ConsistentUpTo { kmax: usize },
}

impl SweepVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, SweepVerdict::CertifiedNotPsd { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    /// [`Extended`]; only for `B = 0` and real coefficients.
    Extended,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub kmax: usize,
    pub precision: Precision,
    pub moments: Vec<f64>,
    pub eks: Vec<f64>,
    /// Threshold below which `e_k` counts as negative, per `k`.
    pub tolerances: Vec<f64>,
    pub first_negative: Option<usize>,
    pub verdict: SweepVerdict,
    /// Largest `|Newton − determinant|` over `k`, relative to
    /// `max(1, |e_1|)^k`; double precision only.
    pub det_deviation: Option<f64>,
}

/// Runs the `e_k` test up to `kmax` in double precision.
pub fn positivity_sweep(
    k: &PolyGaussianKernel,
    kmax: usize,
) -> Result<SpectralReport, SpectralError> {
    if kmax == 0 {
        return Err(SpectralError::InvalidArgument("kmax must be at least 1"));
    }
    let m = moments(k, kmax)?;
    let eks = elementary_symmetric(&m);
    let dets = elementary_symmetric_det(&m);
    let e1 = eks[0].abs().max(1.0);
    let tolerances: Vec<f64> = (1..=kmax).map(|i| SWEEP_TOL * e1.powi(i as i32)).collect();
    let det_deviation = eks
        .iter()
        .zip(&dets)
        .enumerate()
        .map(|(i, (a, b))| (a - b).abs() / e1.powi(i as i32 + 1))
        .fold(0.0, f64::max);
    Ok(report(
        kmax,
        Precision::Double,
        m,
        eks,
        tolerances,
        Some(det_deviation),
    ))
}

/// The `e_k` test evaluated in extended precision. The negativity threshold
/// is a running bound on the rounding error of Newton's identities rather
/// than [`SWEEP_TOL`], since the values resolved here can be far below
/// double-precision roundoff of `e_1^k`.
pub fn positivity_sweep_extended(
    k: &PolyGaussianKernel,
    kmax: usize,
) -> Result<SpectralReport, SpectralError> {
    if kmax == 0 {
        return Err(SpectralError::InvalidArgument("kmax must be at least 1"));
    }
    let m = moments_extended(k, kmax)?;
    let eks = newton_identities(&m);
    // s_k = (1/k) Σ s_{k−j} |M_j| bounds the terms summed for e_k.
    let abs_m: Vec<Extended> = m.iter().map(RealScalar::abs).collect();
    let bounds = newton_identities_abs(&abs_m);
    let slack = (2.0f64).powi(-((EXTENDED_BITS - 64) as i32));
    let tolerances = bounds.iter().map(|b| b.to_f64() * slack).collect();
    Ok(report(
        kmax,
        Precision::Extended,
        m.iter().map(RealScalar::to_f64).collect(),
        eks.iter().map(RealScalar::to_f64).collect(),
        tolerances,
        None,
    ))
}

fn newton_identities_abs<T: RealScalar>(moments: &[T]) -> Vec<T> {
    let mut s = vec![T::one()];
    for k in 1..=moments.len() {
        let mut acc = T::zero();
        for j in 1..=k {
            acc = acc + s[k - j].clone() * moments[j - 1].clone();
        }
        s.push(acc / T::from_f64(k as f64));
    }
    s.remove(0);
    s
}

fn report(
    kmax: usize,
    precision: Precision,
    moments: Vec<f64>,
    eks: Vec<f64>,
    tolerances: Vec<f64>,
    det_deviation: Option<f64>,
) -> SpectralReport {
    let first_negative = eks
        .iter()
        .zip(&tolerances)
        .position(|(e, t)| *e < -t)
        .map(|i| i + 1);
    let verdict = match first_negative {
        Some(k) => SweepVerdict::CertifiedNotPsd { k },
        None => SweepVerdict::ConsistentUpTo { kmax },
    };
    SpectralReport {
        kmax,
        precision,
        moments,
        eks,
        tolerances,
        first_negative,
        verdict,
        det_deviation,
    }
}
