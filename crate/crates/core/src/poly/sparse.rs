use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;
use num_traits::Zero;

/// Relative threshold below which coefficients are dropped after arithmetic.
pub const PRUNE_TOL: f64 = 1e-14;

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic on the exponents.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `nvars` real variables with complex coefficients.
///
/// No zero coefficients are stored; the zero polynomial has no terms and no
/// degree.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)·{:?}", c.re, c.im, m)?;
        }
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `vᵢ`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), Complex64::new(1.0, 0.0));
        p
    }

    /// `c₀ + Σ cᵢ vᵢ`
    pub fn affine(constant: Complex64, linear: &[Complex64]) -> Self {
        let nvars = linear.len();
        let mut p = Self::constant(nvars, constant);
        for (i, &c) in linear.iter().enumerate() {
            p.add_term(Monomial::var(nvars, i), c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed. Panics on an exponent vector of the wrong length.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u16>, Complex64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Adds `c·m` in place, removing the entry if it becomes exactly zero.
    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Drops coefficients with `|c| ≤ tol · max|c|`.
    pub fn prune(&mut self, tol: f64) {
        let thresh = tol * self.max_abs_coeff();
        self.terms.retain(|_, c| c.norm() > thresh);
    }

    fn pruned(mut self) -> Self {
        self.prune(PRUNE_TOL);
        self
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out.pruned()
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out.pruned()
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let maxdeg = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        // power table: pw[v][e] = point[v]^e
        let pw: Vec<Vec<Complex64>> = point
            .iter()
            .map(|&z| {
                let mut row = Vec::with_capacity(maxdeg + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=maxdeg {
                    row.push(acc);
                    acc *= z;
                }
                row
            })
            .collect();
        let mut sum = Complex64::zero();
        for (m, &c) in &self.terms {
            let mut t = c;
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= pw[v][e as usize];
                }
            }
            sum += t;
        }
        sum
    }

    pub fn evaluate_real(&self, point: &[f64]) -> Complex64 {
        let p: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.evaluate(&p)
    }

    /// Rewrites every monomial's exponent vector through `f`, summing
    /// colliding terms. `f` must return vectors of length `nvars_out`.
    pub fn map_monomials(&self, nvars_out: usize, f: impl Fn(&[u16]) -> Vec<u16>) -> Polynomial {
        let mut out = Polynomial::zero(nvars_out);
        for (m, &c) in &self.terms {
            let e = f(&m.0);
            assert_eq!(e.len(), nvars_out);
            out.add_term(Monomial(e), c);
        }
        out.pruned()
    }

    /// Embeds into a space of `nvars_out` variables, sending variable `i`
    /// to `target[i]`.
    pub fn embed(&self, nvars_out: usize, target: &[usize]) -> Polynomial {
        assert_eq!(target.len(), self.nvars);
        self.map_monomials(nvars_out, |e| {
            let mut out = vec![0u16; nvars_out];
            for (i, &k) in e.iter().enumerate() {
                out[target[i]] += k;
            }
            out
        })
    }

    /// Keeps only the terms where all the listed variables have exponent 0,
    /// i.e. substitutes 0 for them (variable count unchanged).
    pub fn restrict_zero(&self, vars: &[usize]) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.0[v] == 0))
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    /// Substitutes `images[i]` (all over a common variable space) for
    /// variable `i`.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let nout = images.first().map(|p| p.nvars).unwrap_or(0);
        let maxdeg: Vec<u16> = (0..self.nvars)
            .map(|v| self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Polynomial>> = images
            .iter()
            .zip(&maxdeg)
            .map(|(img, &d)| {
                let mut row = Vec::with_capacity(d as usize + 1);
                row.push(Polynomial::one(nout));
                for k in 1..=d as usize {
                    let next = row[k - 1].mul(img);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut out = Polynomial::zero(nout);
        for (m, &c) in &self.terms {
            let mut t = Polynomial::constant(nout, c);
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[v][e as usize]);
                }
            }
            for (mm, cc) in t.terms {
                out.add_term(mm, cc);
            }
        }
        out.pruned()
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        let mut d = 0.0f64;
        for (m, &c) in &self.terms {
            d = d.max((c - other.coeff(m)).norm());
        }
        for (m, &c) in &other.terms {
            if !self.terms.contains_key(m) {
                d = d.max(c.norm());
            }
        }
        d
    }
}
