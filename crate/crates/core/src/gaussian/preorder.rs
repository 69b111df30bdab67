//! The preorder on Gaussian triples and its equivalence classes.
//!
//! `g₀ ⪯ g₁` when the shifted difference `(A₁−A₀+rI, B₁−B₀, C₁−C₀+rI)` is a
//! positive Gaussian kernel for some `r ≥ 0`; any `r` making both diagonal
//! blocks positive definite gives the same answer.

use super::{gaussian_spectrum, matrix_scale, GaussianError, GaussianTriple, SymplecticSpectrum};
use crate::numerics::{min_eigenvalue, RealMatrix};

/// Margin added to the smallest admissible shift.
pub const SHIFT_MARGIN: f64 = 1.0;

/// Tolerance used by [`equiv`] and [`sufficient_leq`], relative to the
/// largest entry involved.
pub const EQUIV_TOL: f64 = 1e-12;

/// Tolerance of the `A₁−C₁ ⪰ A₀−C₀` cross-check applied when the preorder
/// holds.
pub const NECESSARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PreorderWitness {
    pub r: f64,
    pub witness_triple: GaussianTriple,
    pub witness_spectrum: SymplecticSpectrum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreorderResult {
    pub holds: bool,
    /// Present when `holds`.
    pub witness: Option<PreorderWitness>,
    /// Largest symplectic eigenvalue of the shifted difference triple.
    pub max_mu: f64,
}

fn check_dims(g0: &GaussianTriple, g1: &GaussianTriple) -> Result<(), GaussianError> {
    if g0.n() != g1.n() {
        return Err(GaussianError::DimensionMismatch {
            expected: g0.n(),
            found: g1.n(),
        });
    }
    Ok(())
}

/// Decides `g0 ⪯ g1` using the shift
/// `r = max(0, −λmin(A₁−A₀), −λmin(C₁−C₀)) + 1`.
pub fn preorder_leq(
    g0: &GaussianTriple,
    g1: &GaussianTriple,
) -> Result<PreorderResult, GaussianError> {
    check_dims(g0, g1)?;
    let da = g1.a().sub(g0.a());
    let dc = g1.c().sub(g0.c());
    let r = 0f64.max(-min_eigenvalue(&da)?).max(-min_eigenvalue(&dc)?) + SHIFT_MARGIN;
    preorder_leq_with_r(g0, g1, r)
}

/// Decides `g0 ⪯ g1` with a caller-chosen shift `r`, which must make both
/// shifted blocks positive definite.
pub fn preorder_leq_with_r(
    g0: &GaussianTriple,
    g1: &GaussianTriple,
    r: f64,
) -> Result<PreorderResult, GaussianError> {
    check_dims(g0, g1)?;
    let witness_triple = GaussianTriple::new(
        g1.a().sub(g0.a()).shifted(r),
        g1.b() - g0.b(),
        g1.c().sub(g0.c()).shifted(r),
    )?;
    witness_triple.require_kernel_valid()?;
    let spectrum = gaussian_spectrum(&witness_triple)?;
    let verdict = spectrum.verdict();
    let holds = verdict.is_positive();
    if holds {
        // A₁−C₁ ⪰ A₀−C₀ is necessary; a violation means the spectrum is wrong.
        let d = g1.a().sub(g1.c()).sub(&g0.a().sub(g0.c()));
        let scale = matrix_scale(&[
            g0.a().matrix(),
            g0.c().matrix(),
            g1.a().matrix(),
            g1.c().matrix(),
        ]) + r;
        if min_eigenvalue(&d)? < -NECESSARY_TOL * scale {
            return Err(GaussianError::Consistency(
                "preorder holds but A1-C1 >= A0-C0 fails",
            ));
        }
    }
    Ok(PreorderResult {
        holds,
        max_mu: verdict.max_mu(),
        witness: holds.then_some(PreorderWitness {
            r,
            witness_triple,
            witness_spectrum: spectrum,
        }),
    })
}

fn antisymmetric_part_norm(m: &RealMatrix) -> f64 {
    (m - &m.transpose()).max_abs()
}

fn all_scale(g0: &GaussianTriple, g1: &GaussianTriple) -> f64 {
    matrix_scale(&[
        g0.a().matrix(),
        g0.b(),
        g0.c().matrix(),
        g1.a().matrix(),
        g1.b(),
        g1.c().matrix(),
    ])
}

/// `g0 ≈ g1`: `A₁−C₁ = A₀−C₀` and `B₁−B₀` symmetric.
pub fn equiv(g0: &GaussianTriple, g1: &GaussianTriple) -> Result<bool, GaussianError> {
    check_dims(g0, g1)?;
    let scale = all_scale(g0, g1);
    let d = g1.a().sub(g1.c()).sub(&g0.a().sub(g0.c()));
    let db = g1.b() - g0.b();
    Ok(d.matrix().max_abs() <= EQUIV_TOL * scale
        && antisymmetric_part_norm(&db) <= EQUIV_TOL * scale)
}

/// Sufficient condition for `g0 ⪯ g1`: `A₁−C₁ ⪰ A₀−C₀` and `B₁−B₀`
/// symmetric.
pub fn sufficient_leq(g0: &GaussianTriple, g1: &GaussianTriple) -> Result<bool, GaussianError> {
    check_dims(g0, g1)?;
    let scale = all_scale(g0, g1);
    let d = g1.a().sub(g1.c()).sub(&g0.a().sub(g0.c()));
    let db = g1.b() - g0.b();
    Ok(min_eigenvalue(&d)? >= -EQUIV_TOL * scale
        && antisymmetric_part_norm(&db) <= EQUIV_TOL * scale)
}
