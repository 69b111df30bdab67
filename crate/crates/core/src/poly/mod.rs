//! Sparse polynomials in the `2n` kernel variables `(x₁..xₙ, y₁..yₙ)` and
//! the structural tests that can certify non-positivity from the polynomial
//! factor alone.

mod sparse;

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

pub use sparse::{Monomial, Polynomial, PRUNE_TOL};

/// Largest `n` for which [`MultiPoly::odd_degree_gate`] enumerates subsets.
pub const GATE_MAX_N: usize = 20;

/// Tolerance on the imaginary residue of a Hermitian quadratic form.
pub const HERMITIAN_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent vector has length {found}, expected {expected}")]
    ExponentLength { expected: usize, found: usize },
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("polynomial is not self-adjoint (max deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("point and coefficient counts differ ({points} vs {coeffs})")]
    CountMismatch { points: usize, coeffs: usize },
    #[error("Hermitian form has imaginary residue {imag:e} (scale {scale:e})")]
    ImaginaryResidue { imag: f64, scale: f64 },
    #[error("non-finite coefficient")]
    NonFinite,
}

/// Outcome of the odd-degree structural gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OddDegreeVerdict {
    /// The polynomial itself has odd degree.
    RejectOdd {
        degree: u32,
    },
    /// Setting `xᵢ = yᵢ = 0` for the listed (1-based) coordinates leaves a
    /// nonzero polynomial of odd degree.
    RejectReducibleOdd {
        subset: Vec<usize>,
        degree: u32,
    },
    Pass,
    /// `n` above [`GATE_MAX_N`]; nothing was decided.
    Skipped {
        n: usize,
    },
}

impl OddDegreeVerdict {
    pub fn is_reject(&self) -> bool {
        matches!(
            self,
            OddDegreeVerdict::RejectOdd { .. } | OddDegreeVerdict::RejectReducibleOdd { .. }
        )
    }
}

/// Polynomial `P(x, y)` in `2n` variables, `x` block first.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly {
    n: usize,
    poly: Polynomial,
}

impl MultiPoly {
    pub fn new(n: usize, poly: Polynomial) -> Result<Self, PolyError> {
        if poly.nvars() != 2 * n {
            return Err(PolyError::ExponentLength {
                expected: 2 * n,
                found: poly.nvars(),
            });
        }
        if poly
            .terms()
            .any(|(_, c)| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(PolyError::NonFinite);
        }
        Ok(MultiPoly { n, poly })
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u16>, Complex64)>,
    {
        let mut collected = Vec::new();
        for (e, c) in terms {
            if e.len() != 2 * n {
                return Err(PolyError::ExponentLength {
                    expected: 2 * n,
                    found: e.len(),
                });
            }
            collected.push((e, c));
        }
        Self::new(n, Polynomial::from_terms(2 * n, collected))
    }

    pub fn one(n: usize) -> Self {
        MultiPoly {
            n,
            poly: Polynomial::one(2 * n),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        MultiPoly {
            n,
            poly: Polynomial::constant(2 * n, c),
        }
    }

    /// `xᵢ` (0-based).
    pub fn x(n: usize, i: usize) -> Self {
        MultiPoly {
            n,
            poly: Polynomial::var(2 * n, i),
        }
    }

    /// `yᵢ` (0-based).
    pub fn y(n: usize, i: usize) -> Self {
        MultiPoly {
            n,
            poly: Polynomial::var(2 * n, n + i),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> Option<u32> {
        self.poly.degree()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.poly.terms()
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        MultiPoly {
            n: self.n,
            poly: self.poly.add(&other.poly),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        MultiPoly {
            n: self.n,
            poly: self.poly.sub(&other.poly),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        MultiPoly {
            n: self.n,
            poly: self.poly.mul(&other.poly),
        }
    }

    pub fn scale(&self, s: Complex64) -> MultiPoly {
        MultiPoly {
            n: self.n,
            poly: self.poly.scale(s),
        }
    }

    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<Complex64, PolyError> {
        for v in [x, y] {
            if v.len() != self.n {
                return Err(PolyError::DimensionMismatch {
                    expected: self.n,
                    found: v.len(),
                });
            }
        }
        let mut pt = Vec::with_capacity(2 * self.n);
        pt.extend_from_slice(x);
        pt.extend_from_slice(y);
        Ok(self.poly.evaluate_real(&pt))
    }

    /// Swaps the `x` and `y` exponent blocks of the coordinates in `coords`
    /// (0-based), leaving coefficients alone.
    pub fn swap_blocks(&self, coords: &[usize]) -> MultiPoly {
        let n = self.n;
        let poly = self.poly.map_monomials(2 * n, |e| {
            let mut out = e.to_vec();
            for &i in coords {
                out.swap(i, n + i);
            }
            out
        });
        MultiPoly { n, poly }
    }

    /// `P†(x, y) = P*(y, x)`.
    pub fn adjoint(&self) -> MultiPoly {
        let all: Vec<usize> = (0..self.n).collect();
        let swapped = self.swap_blocks(&all);
        MultiPoly {
            n: self.n,
            poly: swapped.poly.conj(),
        }
    }

    /// Exact test `P*(y, x) == P(x, y)`.
    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// Largest coefficient deviation between `P` and its adjoint.
    pub fn self_adjoint_deviation(&self) -> f64 {
        self.adjoint().poly.max_coeff_diff(&self.poly)
    }

    /// `(P + P†)/2`, used to clear roundoff from engine-produced polynomials.
    pub fn hermitian_part(&self) -> MultiPoly {
        self.add(&self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// `P` with `xᵢ = yᵢ = 0` for each 0-based `i` in `coords`.
    pub fn restrict_zero(&self, coords: &[usize]) -> MultiPoly {
        let vars: Vec<usize> = coords.iter().flat_map(|&i| [i, self.n + i]).collect();
        MultiPoly {
            n: self.n,
            poly: self.poly.restrict_zero(&vars),
        }
    }

    /// Odd degree, or reducibility to odd degree by zeroing coordinate pairs,
    /// rules out positivity for every Gaussian factor.
    ///
    /// Subsets are visited in lexicographic order of their sorted index lists
    /// and the first hit is returned.
    pub fn odd_degree_gate(&self) -> Result<OddDegreeVerdict, PolyError> {
        let degree = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        if degree % 2 == 1 {
            return Ok(OddDegreeVerdict::RejectOdd { degree });
        }
        if self.n > GATE_MAX_N {
            return Ok(OddDegreeVerdict::Skipped { n: self.n });
        }
        // Per-term "support mask" over coordinates: a term survives zeroing
        // subset I iff its mask does not meet I.
        let terms: Vec<(u32, u32)> = self
            .poly
            .terms()
            .map(|(m, _)| {
                let e = m.exponents();
                let mask = (0..self.n)
                    .filter(|&i| e[i] > 0 || e[self.n + i] > 0)
                    .fold(0u32, |acc, i| acc | (1 << i));
                (mask, m.degree())
            })
            .collect();
        let mut stack = Vec::new();
        if let Some((subset, degree)) = first_odd_subset(self.n, &terms, 0, 0, &mut stack) {
            return Ok(OddDegreeVerdict::RejectReducibleOdd { subset, degree });
        }
        Ok(OddDegreeVerdict::Pass)
    }

    /// `Σᵢⱼ cᵢ c̄ⱼ P(xᵢ, xⱼ)`; a negative value shows `P` is not universal.
    pub fn universal_point_check(
        &self,
        points: &[Vec<f64>],
        coeffs: &[Complex64],
    ) -> Result<f64, PolyError> {
        if points.len() != coeffs.len() {
            return Err(PolyError::CountMismatch {
                points: points.len(),
                coeffs: coeffs.len(),
            });
        }
        let dev = self.self_adjoint_deviation();
        if dev > 0.0 {
            return Err(PolyError::NotSelfAdjoint { deviation: dev });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (pi, ci) in points.iter().zip(coeffs) {
            for (pj, cj) in points.iter().zip(coeffs) {
                let v = self.evaluate(pi, pj)?;
                let t = ci * cj.conj() * v;
                scale += t.norm();
                sum += t;
            }
        }
        if sum.im.abs() > HERMITIAN_IMAG_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(PolyError::ImaginaryResidue {
                imag: sum.im,
                scale,
            });
        }
        Ok(sum.re)
    }
}

fn first_odd_subset(
    n: usize,
    terms: &[(u32, u32)],
    start: usize,
    mask: u32,
    stack: &mut Vec<usize>,
) -> Option<(Vec<usize>, u32)> {
    for i in start..n {
        let m = mask | (1 << i);
        stack.push(i);
        let deg = terms
            .iter()
            .filter(|(t, _)| t & m == 0)
            .map(|&(_, d)| d)
            .max();
        if let Some(d) = deg {
            if d % 2 == 1 {
                return Some((stack.iter().map(|&k| k + 1).collect(), d));
            }
        }
        if let Some(hit) = first_odd_subset(n, terms, i + 1, m, stack) {
            return Some(hit);
        }
        stack.pop();
    }
    None
}
