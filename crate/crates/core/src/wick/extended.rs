//! Real-field integration with a pluggable scalar type.
//!
//! Elementary symmetric functions of a spectrum are obtained from trace
//! moments through alternating sums whose terms can exceed the result by
//! many orders of magnitude (for strongly shifted Gaussians the ratio passes
//! 10⁴⁰). Doubles cannot resolve the sign there, so the same centered
//! Gaussian integration is provided over any [`RealScalar`], with
//! [`Extended`] as a fixed-width binary float of [`EXTENDED_BITS`] bits.
//!
//! Only real quadratic forms without linear terms are handled; that is all
//! the moment chain of a kernel with `B = 0` needs.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use super::{WickError, DEFAULT_DEGREE_CAP};
use crate::numerics::NumericsError;
use crate::poly::{Monomial, Polynomial};

/// Working precision of [`Extended`], in bits (about 115 decimal digits).
pub const EXTENDED_BITS: usize = 384;

/// Ordered real field with the few transcendental pieces the integral needs.
pub trait RealScalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact conversion.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl RealScalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Self {
        num_traits::Float::sqrt(*self)
    }

    fn pi() -> Self {
        core::f64::consts::PI
    }
}

type Big = FBig<HalfEven, 2>;

/// Binary float with [`EXTENDED_BITS`] bits of mantissa.
///
/// Every constructor rounds to the working precision, so results of the
/// arithmetic operators (which take the larger operand precision) stay there.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Extended(Big);

impl Extended {
    fn wrap(v: Big) -> Self {
        Extended(v.with_precision(EXTENDED_BITS).value())
    }

    pub fn from_u64(v: u64) -> Self {
        Self::wrap(Big::from(v))
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! extended_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Extended {
            type Output = Extended;
            fn $m(self, rhs: Extended) -> Extended {
                Extended($tr::$m(self.0, rhs.0))
            }
        }
    };
}

extended_binop!(Add, add);
extended_binop!(Sub, sub);
extended_binop!(Mul, mul);
extended_binop!(Div, div);

impl Neg for Extended {
    type Output = Extended;
    fn neg(self) -> Extended {
        Extended(-self.0)
    }
}

impl RealScalar for Extended {
    /// Panics on non-finite input; callers check finiteness first.
    fn from_f64(v: f64) -> Self {
        Self::wrap(Big::try_from(v).expect("finite f64"))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn sqrt(&self) -> Self {
        Extended(self.0.sqrt())
    }

    fn pi() -> Self {
        Extended(Big::pi(EXTENDED_BITS))
    }

    fn is_zero(&self) -> bool {
        self.0 == Big::ZERO
    }
}

/// Sparse real polynomial over a [`RealScalar`].
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly<T> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: RealScalar> RealPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        RealPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), T::one());
        p
    }

    /// Real part of a complex polynomial; the imaginary parts must vanish
    /// exactly, since they would otherwise be silently dropped.
    pub fn from_polynomial(p: &Polynomial) -> Result<Self, WickError> {
        let mut out = Self::zero(p.nvars());
        for (m, c) in p.terms() {
            if c.im != 0.0 {
                return Err(WickError::NotKernelForm(
                    "polynomial has complex coefficients",
                ));
            }
            if !c.re.is_finite() {
                return Err(NumericsError::NonFinite.into());
            }
            out.add_term(m.clone(), T::from_f64(c.re));
        }
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e: Vec<u16> = ma
                    .exponents()
                    .iter()
                    .zip(mb.exponents())
                    .map(|(a, b)| a + b)
                    .collect();
                out.add_term(Monomial::new(e), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn evaluate(&self, v: &[T]) -> T {
        let mut s = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in v.iter().zip(m.exponents()) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            s = s + t;
        }
        s
    }

    /// Sends variable `i` to variable `target[i]` of an `nvars_out`-variable
    /// ring; variables sharing a target multiply.
    pub fn embed(&self, nvars_out: usize, target: &[usize]) -> Self {
        let mut out = Self::zero(nvars_out);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; nvars_out];
            for (i, &k) in m.exponents().iter().enumerate() {
                e[target[i]] += k;
            }
            out.add_term(Monomial::new(e), c.clone());
        }
        out
    }

    /// Coefficients `c₀, c₁, …` of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Vec<T> {
        let d = self.degree().unwrap_or(0) as usize;
        let mut out = vec![T::zero(); d + 1];
        for (m, c) in &self.terms {
            out[m.degree() as usize] = c.clone();
        }
        out
    }
}

/// Dense row-major square matrix over a [`RealScalar`].
#[derive(Clone, Debug)]
pub struct RealDense<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: RealScalar> RealDense<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        RealDense { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    /// Lower Cholesky factor; fails unless the matrix is positive definite.
    fn cholesky(&self) -> Result<RealDense<T>, WickError> {
        let n = self.n;
        let mut l = RealDense::from_fn(n, |_, _| T::zero());
        for j in 0..n {
            let mut d = self.get(j, j).clone();
            for k in 0..j {
                d = d - l.get(j, k).clone() * l.get(j, k).clone();
            }
            if !(d > T::zero()) {
                return Err(NumericsError::NotRightHalfPlane {
                    min_eigenvalue: d.to_f64(),
                }
                .into());
            }
            let djj = d.sqrt();
            for i in j + 1..n {
                let mut s = self.get(i, j).clone();
                for k in 0..j {
                    s = s - l.get(i, k).clone() * l.get(j, k).clone();
                }
                l.data[i * n + j] = s / djj.clone();
            }
            l.data[j * n + j] = djj;
        }
        Ok(l)
    }
}

/// `∫ p(z, e) exp(−zᵀQz) dz` for real symmetric positive definite `Q`,
/// returned as a polynomial in the external variables `e` (the prefactor's
/// variables after the first `m = dim Q`).
pub fn centered_integral<T: RealScalar>(
    prefactor: &RealPoly<T>,
    q: &RealDense<T>,
) -> Result<RealPoly<T>, WickError> {
    let m = q.dim();
    if prefactor.nvars() < m {
        return Err(WickError::DimensionMismatch {
            expected: m,
            found: prefactor.nvars(),
        });
    }
    let p = prefactor.nvars() - m;
    let zdeg = prefactor
        .terms()
        .map(|(mono, _)| mono.exponents()[..m].iter().map(|&e| e as u32).sum::<u32>())
        .max();
    if let Some(d) = zdeg.filter(|&d| d > DEFAULT_DEGREE_CAP) {
        return Err(WickError::DegreeCap {
            degree: d,
            cap: DEFAULT_DEGREE_CAP,
        });
    }

    let l = q.cholesky()?;
    // Q⁻¹ = L⁻ᵀL⁻¹, column by column
    let mut inv = RealDense::from_fn(m, |_, _| T::zero());
    for col in 0..m {
        let mut y = vec![T::zero(); m];
        for i in 0..m {
            let mut s = if i == col { T::one() } else { T::zero() };
            for k in 0..i {
                s = s - l.get(i, k).clone() * y[k].clone();
            }
            y[i] = s / l.get(i, i).clone();
        }
        for i in (0..m).rev() {
            let mut s = y[i].clone();
            for k in i + 1..m {
                s = s - l.get(k, i).clone() * inv.get(k, col).clone();
            }
            inv.data[i * m + col] = s / l.get(i, i).clone();
        }
    }
    let half = T::from_f64(0.5);
    let sigma = RealDense::from_fn(m, |i, j| inv.get(i, j).clone() * half.clone());

    // π^{m/2} / √det Q = (√π)^m / ∏ Lᵢᵢ
    let sqrt_pi = T::pi().sqrt();
    let mut scalar = T::one();
    for i in 0..m {
        scalar = scalar * sqrt_pi.clone() / l.get(i, i).clone();
    }

    let mut memo = BTreeMap::new();
    let mut out = RealPoly::zero(p);
    for (mono, c) in prefactor.terms() {
        let (alpha, beta) = mono.exponents().split_at(m);
        let ew = isserlis_real(alpha, &sigma, &mut memo);
        if !ew.is_zero() {
            out.add_term(
                Monomial::new(beta.to_vec()),
                c.clone() * ew * scalar.clone(),
            );
        }
    }
    Ok(out)
}

fn isserlis_real<T: RealScalar>(
    alpha: &[u16],
    sigma: &RealDense<T>,
    memo: &mut BTreeMap<Vec<u16>, T>,
) -> T {
    let total: u32 = alpha.iter().map(|&a| a as u32).sum();
    if total == 0 {
        return T::one();
    }
    if total % 2 == 1 {
        return T::zero();
    }
    if let Some(v) = memo.get(alpha) {
        return v.clone();
    }
    let i = alpha.iter().position(|&a| a > 0).unwrap_or(0);
    let mut rest = alpha.to_vec();
    rest[i] -= 1;
    let mut s = T::zero();
    for j in 0..rest.len() {
        if rest[j] == 0 || sigma.get(i, j).is_zero() {
            continue;
        }
        let f = T::from_f64(rest[j] as f64);
        rest[j] -= 1;
        s = s + sigma.get(i, j).clone() * f * isserlis_real(&rest, sigma, memo);
        rest[j] += 1;
    }
    memo.insert(alpha.to_vec(), s.clone());
    s
}

/// Sign of `a` compared with zero, treating the comparison as total.
pub fn sign<T: RealScalar>(a: &T) -> Ordering {
    a.partial_cmp(&T::zero()).unwrap_or(Ordering::Equal)
}
