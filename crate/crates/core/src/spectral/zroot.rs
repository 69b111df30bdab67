//! Root location for `γ ↦ e_k(γ)` on kernels `(P₀ + γP₁)·κ_G` and the
//! δ-scan over the equivalence class `(A + δI, B, C + δI)` of `κ_G`.
//!
//! With `γ` kept as an external variable each moment is a polynomial of
//! degree `j` in `γ`, so `e_k(γ)` is computed once per δ as a polynomial in
//! extended precision and then evaluated during bracketing. Positive
//! normalization constants do not move the root and are left out.

use alloc::vec::Vec;

use super::{
    check_order, real_chain_form, real_chain_prefactor, PolyGaussianKernel, SpectralError,
};
use crate::gaussian::{equiv, GaussianTriple};
use crate::numerics::{bracket_root, sign_change_brackets};
use crate::poly::{MultiPoly, Polynomial};
use crate::wick::extended::{centered_integral, Extended, RealPoly, RealScalar};

/// `δ = ∞` is approximated at this shift …
pub const INFINITE_DELTA: f64 = 1e4;
/// … and confirmed at this one.
pub const CONFIRM_DELTA: f64 = 1e5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaValue {
    Finite(f64),
    Infinite,
}

impl DeltaValue {
    fn shift(self) -> f64 {
        match self {
            DeltaValue::Finite(d) => d,
            DeltaValue::Infinite => INFINITE_DELTA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZScanConfig {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    /// Sub-intervals of the pre-bracketing scan.
    pub samples: usize,
    pub tol: f64,
}

impl Default for ZScanConfig {
    fn default() -> Self {
        ZScanConfig {
            gamma_lo: 0.0,
            gamma_hi: 20.0,
            samples: 64,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZRootResult {
    pub k: usize,
    pub delta: DeltaValue,
    /// Smallest root of `e_k(δ, ·)` in the scan range.
    pub gamma_root: f64,
    pub bracket: (f64, f64),
    /// Every sign-change bracket the scan found.
    pub all_brackets: Vec<(f64, f64)>,
    /// For [`DeltaValue::Infinite`], the root at [`CONFIRM_DELTA`].
    pub confirmation: Option<f64>,
}

/// `(P₀ + γP₁) · κ_G` for real `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFamily {
    base: MultiPoly,
    slope: MultiPoly,
    triple: GaussianTriple,
}

impl LinearFamily {
    pub fn new(
        base: MultiPoly,
        slope: MultiPoly,
        triple: GaussianTriple,
    ) -> Result<Self, SpectralError> {
        // Validates both parts through the kernel constructor.
        PolyGaussianKernel::new(base.clone(), triple.clone(), 1.0)?;
        PolyGaussianKernel::new(slope.clone(), triple.clone(), 1.0)?;
        Ok(LinearFamily {
            base,
            slope,
            triple,
        })
    }

    pub fn n(&self) -> usize {
        self.triple.n()
    }

    pub fn base(&self) -> &MultiPoly {
        &self.base
    }

    pub fn slope(&self) -> &MultiPoly {
        &self.slope
    }

    pub fn triple(&self) -> &GaussianTriple {
        &self.triple
    }

    pub fn with_triple(&self, triple: GaussianTriple) -> Result<Self, SpectralError> {
        Self::new(self.base.clone(), self.slope.clone(), triple)
    }

    pub fn polynomial(&self, gamma: f64) -> MultiPoly {
        self.base.add(&self.slope.scale(gamma.into()))
    }

    pub fn kernel(&self, gamma: f64, norm: f64) -> Result<PolyGaussianKernel, SpectralError> {
        Ok(PolyGaussianKernel::new(
            self.polynomial(gamma),
            self.triple.clone(),
            norm,
        )?)
    }

    /// `P₀ + γP₁` over `2n + 1` variables, `γ` last.
    fn link(&self) -> Result<RealPoly<Extended>, SpectralError> {
        let n2 = 2 * self.n();
        let ident: Vec<usize> = (0..n2).collect();
        let p = self.base.poly().embed(n2 + 1, &ident).add(
            &self
                .slope
                .poly()
                .embed(n2 + 1, &ident)
                .mul(&Polynomial::var(n2 + 1, n2)),
        );
        RealPoly::from_polynomial(&p).map_err(|_| SpectralError::NotReal)
    }

    /// Unnormalized `e_1(γ)..e_kmax(γ)` as polynomials in `γ`, for the
    /// triple shifted by `delta`.
    pub fn ek_polynomials(
        &self,
        kmax: usize,
        delta: f64,
    ) -> Result<Vec<RealPoly<Extended>>, SpectralError> {
        let triple = self.triple.shifted(delta)?;
        triple.require_kernel_valid()?;
        let link = self.link()?;
        let n = self.n();
        let mut m = Vec::with_capacity(kmax);
        for j in 1..=kmax {
            check_order(j)?;
            let q = real_chain_form::<Extended>(&triple, j)?;
            m.push(centered_integral(&real_chain_prefactor(&link, n, j), &q)?);
        }
        Ok(newton_polys(&m))
    }
}

fn newton_polys(m: &[RealPoly<Extended>]) -> Vec<RealPoly<Extended>> {
    let mut e = alloc::vec![RealPoly::constant(1, Extended::one())];
    for k in 1..=m.len() {
        let mut s = RealPoly::zero(1);
        for j in 1..=k {
            let t = e[k - j].mul(&m[j - 1]);
            s = if j % 2 == 1 {
                s.add(&t)
            } else {
                s.add(&t.scale(&-Extended::one()))
            };
        }
        e.push(s.scale(&(Extended::one() / Extended::from_f64(k as f64))));
    }
    e.remove(0);
    e
}

/// Root, its bracket, and every bracket found.
type RootBrackets = (f64, (f64, f64), Vec<(f64, f64)>);

fn root_at(
    family: &LinearFamily,
    k: usize,
    delta: f64,
    cfg: &ZScanConfig,
) -> Result<RootBrackets, SpectralError> {
    if !(cfg.gamma_lo < cfg.gamma_hi) || cfg.samples == 0 || !(cfg.tol > 0.0) {
        return Err(SpectralError::InvalidArgument(
            "gamma range must be increasing with positive samples and tol",
        ));
    }
    let ek = family
        .ek_polynomials(k, delta)?
        .pop()
        .ok_or(SpectralError::InvalidArgument("k must be at least 1"))?;
    let f = |g: f64| ek.evaluate(&[Extended::from_f64(g)]).to_f64();
    let brackets = sign_change_brackets(f, cfg.gamma_lo, cfg.gamma_hi, cfg.samples);
    let &(lo, hi) = brackets.first().ok_or(SpectralError::NoRootBracket {
        k,
        lo: cfg.gamma_lo,
        hi: cfg.gamma_hi,
    })?;
    let root = if lo == hi {
        lo
    } else {
        bracket_root(f, lo, hi, cfg.tol)?
    };
    Ok((root, (lo, hi), brackets))
}

/// `Z_k(δ)`: the smallest `γ` in the scan range where `e_k(δ, γ)` changes
/// sign. Absence of a sign change is an error, never an extrapolation.
pub fn z_root(
    family: &LinearFamily,
    k: usize,
    delta: DeltaValue,
    cfg: &ZScanConfig,
) -> Result<ZRootResult, SpectralError> {
    let (gamma_root, bracket, all_brackets) = root_at(family, k, delta.shift(), cfg)?;
    let confirmation = match delta {
        DeltaValue::Infinite => Some(root_at(family, k, CONFIRM_DELTA, cfg)?.0),
        DeltaValue::Finite(_) => None,
    };
    Ok(ZRootResult {
        k,
        delta,
        gamma_root,
        bracket,
        all_brackets,
        confirmation,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaScan {
    pub rows: Vec<ZRootResult>,
    /// Index into `rows` of the smallest root.
    pub best: Option<usize>,
    /// Roots are non-increasing in δ along the given order.
    pub monotone: bool,
}

impl DeltaScan {
    pub fn best_root(&self) -> Option<&ZRootResult> {
        self.best.map(|i| &self.rows[i])
    }
}

/// `Z_k(δ)` for each δ, after checking that every shifted triple is
/// equivalent to the family's own.
pub fn delta_scan(
    family: &LinearFamily,
    k: usize,
    deltas: &[DeltaValue],
    cfg: &ZScanConfig,
) -> Result<DeltaScan, SpectralError> {
    let mut rows = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let shifted = family.triple.shifted(d.shift())?;
        if !equiv(&family.triple, &shifted)? {
            return Err(SpectralError::NotEquivalent { delta: d.shift() });
        }
        rows.push(z_root(family, k, d, cfg)?);
    }
    let best = (0..rows.len()).min_by(|&a, &b| rows[a].gamma_root.total_cmp(&rows[b].gamma_root));
    let monotone = rows
        .windows(2)
        .all(|w| w[1].gamma_root <= w[0].gamma_root + cfg.tol);
    Ok(DeltaScan {
        rows,
        best,
        monotone,
    })
}
