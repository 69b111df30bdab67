//! Midpoint-rule discretization of the integral operator, used as an
//! independent check on the moment computations.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{moment, PolyGaussianKernel, SpectralError};
use crate::numerics::{hermitian_eig, RealMatrix};

/// Relative trace mismatch above which the grid is flagged as too coarse.
pub const NYSTROM_TRACE_TOL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct NystromResult {
    /// Eigenvalues of the weighted Gram matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Sum of the eigenvalues.
    pub trace_estimate: f64,
    /// `∫κ(x, x)dx` from the closed form.
    pub trace_reference: f64,
    /// The relative trace mismatch exceeds [`NYSTROM_TRACE_TOL`].
    pub too_coarse: bool,
}

impl NystromResult {
    /// `Σ λᵢʲ` over the discrete spectrum.
    pub fn power_sum(&self, j: i32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(j)).sum()
    }
}

/// Eigenvalues of `h^n · [κ(xᵢ, xⱼ)]` on a tensor grid of `grid_points`
/// midpoints per axis covering `[−box_halfwidth, box_halfwidth]^n`, `n ≤ 2`.
pub fn nystrom_oracle(
    k: &PolyGaussianKernel,
    grid_points: usize,
    box_halfwidth: f64,
) -> Result<NystromResult, SpectralError> {
    let n = k.n();
    if n > 2 {
        return Err(SpectralError::InvalidArgument(
            "Nyström oracle supports n <= 2",
        ));
    }
    if grid_points == 0 || !(box_halfwidth > 0.0 && box_halfwidth.is_finite()) {
        return Err(SpectralError::InvalidArgument(
            "grid needs points and a positive half-width",
        ));
    }
    let h = 2.0 * box_halfwidth / grid_points as f64;
    let axis: Vec<f64> = (0..grid_points)
        .map(|i| -box_halfwidth + (i as f64 + 0.5) * h)
        .collect();
    let nodes: Vec<Vec<f64>> = if n == 1 {
        axis.iter().map(|&x| alloc::vec![x]).collect()
    } else {
        axis.iter()
            .flat_map(|&a| axis.iter().map(move |&b| alloc::vec![a, b]))
            .collect()
    };
    let w = h.powi(n as i32);
    let np = nodes.len();
    let mut re = RealMatrix::zeros(np, np);
    let mut im = RealMatrix::zeros(np, np);
    for i in 0..np {
        for j in i..np {
            let v = k.evaluate(&nodes[i], &nodes[j])? * w;
            re[(i, j)] = v.re;
            im[(i, j)] = v.im;
            re[(j, i)] = v.re;
            im[(j, i)] = -v.im;
        }
        im[(i, i)] = 0.0;
    }
    let mut eigenvalues = hermitian_eig(&re, &im)?.values;
    eigenvalues.reverse();
    let trace_estimate: f64 = (0..np).map(|i| re[(i, i)]).sum();
    let trace_reference = moment(k, 1)?;
    let too_coarse =
        (trace_estimate - trace_reference).abs() > NYSTROM_TRACE_TOL * trace_reference.abs();
    Ok(NystromResult {
        eigenvalues,
        trace_estimate,
        trace_reference,
        too_coarse,
    })
}
