//! Positivity analysis for polynomial-Gaussian integral operators on L²(ℝⁿ).
//!
//! A polynomial-Gaussian kernel has the form
//!
//! ```text
//! κ(x, y) = P(x, y) · exp{ −(x−y)ᵀA(x−y) − i(x−y)ᵀB(x+y) − (x+y)ᵀC(x+y) }
//! ```
//!
//! with `A`, `C` symmetric positive definite and `B` arbitrary. This crate
//! provides the pieces needed to certify that such an operator is *not*
//! positive semidefinite, and to screen bipartite density operators of this
//! form for a non-positive partial transpose:
//!
//! - [`numerics`]: small dense linear algebra and bracketing root finding.
//! - [`poly`]: sparse multivariate polynomials with complex coefficients,
//!   the odd-degree gate and the pointwise universality check.
//! - [`gaussian`]: Gaussian triples, the phase-space matrix, symplectic
//!   spectra, the exact Gaussian positivity test and the Gaussian preorder.
//! - [`wick`]: closed-form integration of polynomial × Gaussian integrands.
//! - [`spectral`]: trace moments, elementary symmetric functions of the
//!   spectrum, sweeps, root location, Mercer sampling and a Nyström oracle.
//! - [`entangle`]: bipartitions, partial transpose and NPT screening.
//! - [`fixtures`]: kernel families used in examples and tests.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod entangle;
pub mod fixtures;
pub mod gaussian;
pub mod numerics;
pub mod poly;
pub mod spectral;
pub mod wick;

pub use num_complex::Complex64 as C64;

pub use entangle::{Bipartition, NptVerdict, SeparabilityVerdict};
pub use gaussian::{GaussianTriple, PositivityVerdict, SymplecticSpectrum};
pub use poly::{MultiPoly, Polynomial};
pub use spectral::{PolyGaussianKernel, SpectralReport};
