//! Kernel-level operations built on the integration engine: partial traces,
//! marginals and the Wigner–Weyl transform pair.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use num_complex::Complex64;
use num_traits::Zero;

use super::{poly_gaussian_integral, quadratic_parts, QuadraticExponent, WickError, FORM_TOL};
use crate::gaussian::GaussianTriple;
use crate::numerics::{ComplexMatrix, RealMatrix, RealSymMatrix};
use crate::poly::{MultiPoly, Polynomial};
use crate::spectral::PolyGaussianKernel;

/// Joint form `H` with `κ_G(x, y) = exp(−[x; y]ᵀ H [x; y])`:
///
/// ```text
/// H = [[A + C + i(B+Bᵀ)/2,  C − A + i(B−Bᵀ)/2],
///      [C − A + i(Bᵀ−B)/2,  A + C − i(B+Bᵀ)/2]]
/// ```
pub fn kernel_quadratic_form(g: &GaussianTriple) -> ComplexMatrix {
    let n = g.n();
    let a = g.a().matrix();
    let b = g.b();
    let c = g.c().matrix();
    let mut h = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let sym = 0.5 * (b[(i, j)] + b[(j, i)]);
            let skew = 0.5 * (b[(i, j)] - b[(j, i)]);
            h[(i, j)] = Complex64::new(a[(i, j)] + c[(i, j)], sym);
            h[(i, n + j)] = Complex64::new(c[(i, j)] - a[(i, j)], skew);
            h[(n + i, j)] = Complex64::new(c[(i, j)] - a[(i, j)], -skew);
            h[(n + i, n + j)] = Complex64::new(a[(i, j)] + c[(i, j)], -sym);
        }
    }
    h
}

/// Reads a joint `(x, y)` form back as a triple. With `r = x − y`,
/// `s = x + y` the form becomes `rᵀAr + i rᵀBs + sᵀCs`, so the `rr` and `ss`
/// blocks must be real and the `rs` block purely imaginary.
pub fn triple_from_quadratic_form(h: &ComplexMatrix) -> Result<GaussianTriple, WickError> {
    let dim = h.rows();
    if !dim.is_multiple_of(2) || h.cols() != dim {
        return Err(WickError::DimensionMismatch {
            expected: dim + dim % 2,
            found: dim,
        });
    }
    let n = dim / 2;
    // (x, y) = U (r, s), x = (r + s)/2, y = (s − r)/2
    let u = RealMatrix::from_fn(dim, dim, |i, j| {
        let (row_y, ii) = (i >= n, i % n);
        let (col_s, jj) = (j >= n, j % n);
        if ii != jj {
            0.0
        } else if row_y && !col_s {
            -0.5
        } else {
            0.5
        }
    });
    let hp = congruence(h, &u);
    let scale = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .fold(0.0f64, |m, ij| m.max(hp[ij].norm()));
    let tol = FORM_TOL * scale.max(f64::MIN_POSITIVE);
    let mut a = RealMatrix::zeros(n, n);
    let mut b = RealMatrix::zeros(n, n);
    let mut c = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rr = hp[(i, j)];
            let ss = hp[(n + i, n + j)];
            let rs = hp[(i, n + j)];
            if rr.im.abs() > tol || ss.im.abs() > tol {
                return Err(WickError::NotKernelForm(
                    "difference or sum block has an imaginary part",
                ));
            }
            if rs.re.abs() > tol {
                return Err(WickError::NotKernelForm("mixed block has a real part"));
            }
            a[(i, j)] = rr.re;
            c[(i, j)] = ss.re;
            b[(i, j)] = 2.0 * rs.im;
        }
    }
    Ok(GaussianTriple::new(
        RealSymMatrix::new(a)?,
        b,
        RealSymMatrix::new(c)?,
    )?)
}

/// `Lᵀ H L`
fn congruence(h: &ComplexMatrix, l: &RealMatrix) -> ComplexMatrix {
    let lc = l.to_complex();
    lc.transpose().matmul(h).matmul(&lc)
}

/// `P(L u)` as a polynomial in `u`.
fn substitute_linear(p: &Polynomial, l: &RealMatrix) -> Polynomial {
    let nu = l.cols();
    let images: Vec<Polynomial> = (0..l.rows())
        .map(|i| {
            let coeffs: Vec<Complex64> = (0..nu).map(|j| Complex64::new(l[(i, j)], 0.0)).collect();
            Polynomial::affine(Complex64::zero(), &coeffs)
        })
        .collect();
    p.substitute(&images)
}

/// Reads a purely quadratic exponent `−eᵀHe` and checks that no constant or
/// linear part is left over.
fn homogeneous_form(exponent: &Polynomial) -> Result<ComplexMatrix, WickError> {
    let (c, l, m) = quadratic_parts(exponent)?;
    let scale = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .fold(1.0f64, |s, ij| s.max(m[ij].norm()));
    if c.norm() > FORM_TOL * scale || l.iter().any(|v| v.norm() > FORM_TOL * scale) {
        return Err(WickError::NotKernelForm(
            "exponent has constant or linear terms",
        ));
    }
    Ok(m.map(|v| -v))
}

fn validate_coords(n: usize, coords: &[usize]) -> Result<Vec<usize>, WickError> {
    let mut sorted = coords.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty()
        || sorted.len() != coords.len()
        || sorted.len() >= n
        || sorted.iter().any(|&c| c >= n)
    {
        return Err(WickError::InvalidCoords { n });
    }
    Ok(sorted)
}

/// Integrates the coordinates `coords` (0-based) out of a kernel.
///
/// With `diagonal = true` this is the partial trace
/// `η(x', y') = ∫ κ(x', z; y', z) dz`; otherwise both `xᵢ` and `yᵢ` are
/// integrated independently. The result lives on the remaining coordinates
/// in their original order.
pub fn integrate_out(
    k: &PolyGaussianKernel,
    coords: &[usize],
    diagonal: bool,
) -> Result<PolyGaussianKernel, WickError> {
    let n = k.n();
    let coords = validate_coords(n, coords)?;
    let keep: Vec<usize> = (0..n).filter(|i| !coords.contains(i)).collect();
    let nk = keep.len();
    let m = if diagonal {
        coords.len()
    } else {
        2 * coords.len()
    };
    let nu = m + 2 * nk;
    let mut l = RealMatrix::zeros(2 * n, nu);
    for (t, &c) in coords.iter().enumerate() {
        l[(c, t)] = 1.0;
        l[(n + c, if diagonal { t } else { coords.len() + t })] = 1.0;
    }
    for (t, &c) in keep.iter().enumerate() {
        l[(c, m + t)] = 1.0;
        l[(n + c, m + nk + t)] = 1.0;
    }
    let h = congruence(&kernel_quadratic_form(k.triple()), &l);
    let q = QuadraticExponent::from_joint_form(&h, m)?;
    let prefactor = substitute_linear(k.poly().poly(), &l);
    let res = poly_gaussian_integral(&prefactor, &q)?;
    let triple = triple_from_quadratic_form(&homogeneous_form(&res.exponent)?)?;
    let poly = MultiPoly::new(nk, res.prefactor.scale(res.scalar))?;
    PolyGaussianKernel::new(poly, triple, k.norm()).map_err(kernel_err)
}

fn kernel_err(e: crate::spectral::KernelError) -> WickError {
    use crate::spectral::KernelError as K;
    match e {
        K::Poly(p) => WickError::Poly(p),
        K::Gaussian(g) => WickError::Gaussian(g),
        K::NotSelfAdjoint { .. } => WickError::NotKernelForm("result is not self-adjoint"),
        K::DimensionMismatch { poly, triple } => WickError::DimensionMismatch {
            expected: triple,
            found: poly,
        },
        K::InvalidNorm(_) => WickError::NotKernelForm("invalid normalization"),
    }
}

/// Phase-space form `W(x, p) = scale · poly(x, p) · exp(−vᵀGv)`,
/// `v = (x, p)`.
#[derive(Clone, Debug)]
pub struct WignerForm {
    pub n: usize,
    pub g: RealSymMatrix,
    pub poly: Polynomial,
    pub scale: Complex64,
}

impl WignerForm {
    pub fn evaluate(&self, x: &[f64], p: &[f64]) -> Complex64 {
        let v: Vec<f64> = x.iter().chain(p).copied().collect();
        let quad = crate::numerics::dot(&v, &self.g.matrix().matvec(&v));
        self.scale * self.poly.evaluate_real(&v) * (-quad).exp()
    }
}

/// `W(x, p) = (2π)⁻ⁿ ∫ e^{−ipᵀy} κ(x + y/2, x − y/2) dy`
pub fn wigner_transform(k: &PolyGaussianKernel) -> Result<WignerForm, WickError> {
    let n = k.n();
    // u = (y, x, p)
    let nu = 3 * n;
    let mut l = RealMatrix::zeros(2 * n, nu);
    for i in 0..n {
        l[(i, i)] = 0.5;
        l[(i, n + i)] = 1.0;
        l[(n + i, i)] = -0.5;
        l[(n + i, n + i)] = 1.0;
    }
    let h = congruence(&kernel_quadratic_form(k.triple()), &l);
    let mut q = QuadraticExponent::from_joint_form(&h, n)?;
    for i in 0..n {
        let mut coeffs = alloc::vec![Complex64::zero(); 2 * n];
        coeffs[n + i] = Complex64::new(0.0, -1.0);
        q.add_linear(i, &Polynomial::affine(Complex64::zero(), &coeffs));
    }
    let prefactor = substitute_linear(k.poly().poly(), &l);
    let res = poly_gaussian_integral(&prefactor, &q)?;
    let gm = homogeneous_form(&res.exponent)?;
    let scale_g = (0..2 * n)
        .flat_map(|i| (0..2 * n).map(move |j| (i, j)))
        .fold(1.0f64, |s, ij| s.max(gm[ij].norm()));
    if (0..2 * n).any(|i| (0..2 * n).any(|j| gm[(i, j)].im.abs() > FORM_TOL * scale_g)) {
        return Err(WickError::NotKernelForm("phase-space form is not real"));
    }
    let g = RealSymMatrix::new(gm.re())?;
    let pre = k.norm() * (2.0 * core::f64::consts::PI).powi(-(n as i32));
    Ok(WignerForm {
        n,
        g,
        poly: res.prefactor,
        scale: res.scalar * pre,
    })
}

/// `κ(x, y) = ∫ W((x + y)/2, p) e^{ipᵀ(x − y)} dp`
pub fn inverse_wigner_transform(w: &WignerForm) -> Result<PolyGaussianKernel, WickError> {
    let n = w.n;
    // u = (p, x, y); v = (X, p) with X = (x + y)/2
    let nu = 3 * n;
    let mut l = RealMatrix::zeros(2 * n, nu);
    for i in 0..n {
        l[(i, n + i)] = 0.5;
        l[(i, 2 * n + i)] = 0.5;
        l[(n + i, i)] = 1.0;
    }
    let h = congruence(&w.g.matrix().to_complex(), &l);
    let mut q = QuadraticExponent::from_joint_form(&h, n)?;
    for i in 0..n {
        let mut coeffs = alloc::vec![Complex64::zero(); 2 * n];
        coeffs[i] = Complex64::new(0.0, 1.0);
        coeffs[n + i] = Complex64::new(0.0, -1.0);
        q.add_linear(i, &Polynomial::affine(Complex64::zero(), &coeffs));
    }
    let prefactor = substitute_linear(&w.poly, &l);
    let res = poly_gaussian_integral(&prefactor, &q)?;
    let triple = triple_from_quadratic_form(&homogeneous_form(&res.exponent)?)?;
    let poly = MultiPoly::new(n, res.prefactor.scale(res.scalar * w.scale))?;
    PolyGaussianKernel::new(poly, triple, 1.0).map_err(kernel_err)
}
