//! Test-only oracles that share no code with the library: adaptive
//! Gauss–Kronrod quadrature and elementary symmetric functions of a list.

#![allow(dead_code)]

use polygauss_core::gaussian::GaussianTriple;
use polygauss_core::poly::MultiPoly;
use polygauss_core::{PolyGaussianKernel, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// 15-point Kronrod extension of the 7-point Gauss rule, nonnegative half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod(f: &mut dyn FnMut(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for i in 0..7 {
        let (lo, hi) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        k += (lo + hi) * WGK[i];
        abs += (lo.norm() + hi.norm()) * WGK[i];
        if i % 2 == 1 {
            g += (lo + hi) * WG[i / 2];
        }
    }
    // QUADPACK-style sharpening of the raw |K − G| estimate.
    let (raw, scale) = (((k - g) * h).norm(), abs * h.abs());
    let err = if scale > 0.0 {
        scale * (200.0 * raw / scale).powf(1.5).min(1.0)
    } else {
        raw
    };
    (k * h, err)
}

fn adapt(
    f: &mut dyn FnMut(f64) -> C64,
    a: f64,
    b: f64,
    whole: (C64, f64),
    tol: f64,
    depth: u32,
) -> C64 {
    let (val, err) = whole;
    if err <= tol || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    let left = kronrod(f, a, m);
    let right = kronrod(f, m, b);
    adapt(f, a, m, left, 0.5 * tol, depth - 1) + adapt(f, m, b, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate(f: &mut dyn FnMut(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    // Start from a few panels so narrow peaks are not missed.
    let panels = 4;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + h * i as f64, a + h * (i + 1) as f64);
            let first = kronrod(f, lo, hi);
            adapt(f, lo, hi, first, tol / panels as f64, 40)
        })
        .sum()
}

/// Nested adaptive quadrature over a box.
pub fn integrate_box(f: &dyn Fn(&[f64]) -> C64, bounds: &[(f64, f64)], tol: f64) -> C64 {
    let mut point = vec![0.0; bounds.len()];
    nested(f, bounds, 0, &mut point, tol)
}

fn nested(
    f: &dyn Fn(&[f64]) -> C64,
    bounds: &[(f64, f64)],
    dim: usize,
    point: &mut Vec<f64>,
    tol: f64,
) -> C64 {
    let (a, b) = bounds[dim];
    if dim + 1 == bounds.len() {
        let mut g = |t: f64| {
            point[dim] = t;
            f(point)
        };
        return integrate(&mut g, a, b, tol);
    }
    let inner_tol = tol / (b - a);
    let mut g = |t: f64| {
        point[dim] = t;
        nested(f, bounds, dim + 1, point, inner_tol)
    };
    integrate(&mut g, a, b, tol)
}

/// `e_1..e_kmax` of a finite list, from the product `Π(1 + λt)`.
pub fn elementary_of(values: &[f64], kmax: usize) -> Vec<f64> {
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for &l in values {
        for k in (1..=kmax).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e[1..].to_vec()
}

/// Row-major `L Lᵀ + floor·I` with `L` uniform in `[−1, 1]`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<f64> {
    let l: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>()
                + if i == j { floor } else { 0.0 };
        }
    }
    m
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n * n)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect()
}

pub fn random_triple(rng: &mut ChaCha8Rng, n: usize) -> GaussianTriple {
    let a = random_spd(rng, n, 0.3);
    let c = random_spd(rng, n, 0.3);
    let b = random_matrix(rng, n, 1.0);
    GaussianTriple::from_row_major(n, &a, &b, &c).expect("valid triple")
}

/// Exponent vector of length `2n` with total degree `degree`.
pub fn random_exponents(rng: &mut ChaCha8Rng, n: usize, degree: u16) -> Vec<u16> {
    let mut e = vec![0u16; 2 * n];
    for _ in 0..degree {
        e[rng.random_range(0..2 * n)] += 1;
    }
    e
}

/// Hermitian part of a random polynomial of degree at most `max_degree`,
/// with a dominant positive constant so the trace stays away from zero.
pub fn random_self_adjoint(
    rng: &mut ChaCha8Rng,
    n: usize,
    terms: usize,
    max_degree: u16,
) -> MultiPoly {
    let mut list = vec![(vec![0u16; 2 * n], C64::new(rng.random_range(1.0..2.0), 0.0))];
    for _ in 0..terms {
        let d = rng.random_range(1..=max_degree);
        list.push((
            random_exponents(rng, n, d),
            C64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)),
        ));
    }
    MultiPoly::from_terms(n, list)
        .expect("valid exponents")
        .hermitian_part()
}

pub fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> PolyGaussianKernel {
    let triple = random_triple(rng, n);
    let poly = random_self_adjoint(rng, n, 3, 4);
    PolyGaussianKernel::new(poly, triple, 1.0).expect("valid kernel")
}

/// Positive root of a cubic (highest degree first) by plain bisection on
/// `[lo, hi]`.
pub fn cubic_root(p: [f64; 4], mut lo: f64, mut hi: f64) -> f64 {
    let f = |x: f64| ((p[0] * x + p[1]) * x + p[2]) * x + p[3];
    assert!(f(lo) * f(hi) < 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
