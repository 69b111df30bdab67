#![allow(dead_code)]

use polygauss_core::numerics::{RealMatrix, RealSymMatrix};
use polygauss_core::GaussianTriple;
use proptest::prelude::*;

pub fn matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(lo..hi, n * n).prop_map(move |v| RealMatrix::from_row_major(n, n, v))
}

/// `MᵀM + floor·I`
pub fn spd(n: usize, floor: f64) -> impl Strategy<Value = RealSymMatrix> {
    matrix(n, -1.0, 1.0).prop_map(move |m| {
        let g = m.transpose().matmul(&m);
        RealSymMatrix::new(g).unwrap().shifted(floor)
    })
}

pub fn symmetric(n: usize) -> impl Strategy<Value = RealMatrix> {
    matrix(n, -1.0, 1.0).prop_map(|m| (&m + &m.transpose()).scale(0.5))
}

/// Any kernel-valid triple.
pub fn triple(n: usize) -> impl Strategy<Value = GaussianTriple> {
    (spd(n, 0.2), matrix(n, -1.0, 1.0), spd(n, 0.2))
        .prop_map(|(a, b, c)| GaussianTriple::new(a, b, c).unwrap())
}

/// `(C + E, B_sym, C)`: a positive Gaussian up to a unitary phase.
pub fn positive_triple(n: usize) -> impl Strategy<Value = GaussianTriple> {
    (spd(n, 0.2), symmetric(n), spd(n, 0.0))
        .prop_map(|(c, b, e)| GaussianTriple::new(c.add(&e), b, c).unwrap())
}

pub fn det(m: &RealSymMatrix) -> f64 {
    polygauss_core::numerics::det(m.matrix())
}

/// Composite trapezoid on `[-h·steps, h·steps]`.
pub fn trapezoid(f: impl Fn(f64) -> f64, h: f64, steps: i64) -> f64 {
    (-steps..=steps).map(|i| f(i as f64 * h)).sum::<f64>() * h
}
