//! Bipartitions, the partial transpose, and NPT screening.
//!
//! In position representation the partial transpose on block `P₁` swaps
//! `xᵢ ↔ yᵢ` for `i ∈ P₁`. In the variables `r = x − y`, `s = x + y` that
//! flips the sign of `rᵢ` and leaves `s` alone, so with
//! `Λ = diag(−1 on P₁, +1 elsewhere)` the Gaussian part maps as
//!
//! ```text
//! (A, B, C) ↦ (ΛAΛ, ΛB, C)
//! ```
//!
//! and the polynomial has its `P₁` exponent blocks swapped. Transposing the
//! other block instead gives the complex conjugate operator, which has the
//! same spectrum; `part1` is always the one transposed.

use alloc::vec::Vec;

use thiserror::Error;

use crate::gaussian::{
    gaussian_positive, gaussian_spectrum, preorder_leq, GaussianError, GaussianTriple,
    PreorderResult,
};
use crate::spectral::{
    mercer_search, moment, positivity_sweep, KernelError, MercerCertificate, MercerConfig,
    PolyGaussianKernel, SpectralError, SpectralReport,
};

/// Relative tolerance on the unit trace expected of a density operator.
pub const TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntangleError {
    #[error("partition block must be a nonempty proper subset of 1..={n} without repeats")]
    InvalidPartition { n: usize },
    #[error("partition is for n = {partition}, kernel has n = {kernel}")]
    DimensionMismatch { partition: usize, kernel: usize },
    #[error("kernel trace {trace} is not 1")]
    NotNormalized { trace: f64 },
    #[error("triple is not a positive Gaussian (max symplectic eigenvalue {max_mu})")]
    NotAState { max_mu: f64 },
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `{P₁, P₂}` with `P₁` given by 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    n: usize,
    part1: Vec<usize>,
}

impl Bipartition {
    pub fn new(n: usize, part1: &[usize]) -> Result<Self, EntangleError> {
        let mut p = part1.to_vec();
        p.sort_unstable();
        p.dedup();
        if p.is_empty() || p.len() != part1.len() || p.len() >= n || p[0] == 0 || p[p.len() - 1] > n
        {
            return Err(EntangleError::InvalidPartition { n });
        }
        Ok(Bipartition { n, part1: p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted, 1-based.
    pub fn part1(&self) -> &[usize] {
        &self.part1
    }

    pub fn part2(&self) -> Vec<usize> {
        (1..=self.n).filter(|i| !self.part1.contains(i)).collect()
    }

    pub fn d1(&self) -> usize {
        self.part1.len()
    }

    pub fn d2(&self) -> usize {
        self.n - self.part1.len()
    }

    fn zero_based(&self) -> Vec<usize> {
        self.part1.iter().map(|i| i - 1).collect()
    }

    /// `Λ = diag(−1 on part1, +1 elsewhere)`.
    pub fn signs(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|i| if self.part1.contains(&i) { -1.0 } else { 1.0 })
            .collect()
    }

    fn check(&self, n: usize) -> Result<(), EntangleError> {
        if n != self.n {
            return Err(EntangleError::DimensionMismatch {
                partition: self.n,
                kernel: n,
            });
        }
        Ok(())
    }
}

/// `(ΛAΛ, ΛB, C)`.
pub fn partial_transpose_triple(
    g: &GaussianTriple,
    b: &Bipartition,
) -> Result<GaussianTriple, EntangleError> {
    b.check(g.n())?;
    Ok(g.sign_conjugated(&b.signs())?)
}

/// The partial transpose on `part1`; an involution.
pub fn partial_transpose(
    k: &PolyGaussianKernel,
    b: &Bipartition,
) -> Result<PolyGaussianKernel, EntangleError> {
    b.check(k.n())?;
    let triple = partial_transpose_triple(k.triple(), b)?;
    Ok(PolyGaussianKernel::new(
        k.poly().swap_blocks(&b.zero_based()),
        triple,
        k.norm(),
    )?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum NptEvidence {
    /// The PT image's Gaussian part is not positive; this alone certifies
    /// NPT whatever the polynomial.
    GaussianGate {
        max_mu: f64,
    },
    /// Negative `e_k` of the PT image.
    Sweep(SpectralReport),
    Mercer(MercerCertificate),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NptVerdict {
    NptCertified(NptEvidence),
    /// No certificate. For a polynomial prefactor this says nothing about
    /// separability.
    Inconclusive {
        pt_max_mu: f64,
    },
}

impl NptVerdict {
    pub fn is_npt(&self) -> bool {
        matches!(self, NptVerdict::NptCertified(_))
    }
}

/// Optional second stage run on the PT image when the Gaussian gate passes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NptEscalation {
    pub kmax: usize,
    pub mercer: MercerConfig,
}

fn check_trace(k: &PolyGaussianKernel) -> Result<(), EntangleError> {
    let trace = moment(k, 1)?;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(EntangleError::NotNormalized { trace });
    }
    Ok(())
}

/// NPT screening of a unit-trace kernel.
pub fn npt_gate(
    k: &PolyGaussianKernel,
    b: &Bipartition,
    escalation: Option<&NptEscalation>,
) -> Result<NptVerdict, EntangleError> {
    check_trace(k)?;
    let pt = partial_transpose(k, b)?;
    let verdict = gaussian_positive(pt.triple())?;
    if !verdict.is_positive() {
        return Ok(NptVerdict::NptCertified(NptEvidence::GaussianGate {
            max_mu: verdict.max_mu(),
        }));
    }
    if let Some(esc) = escalation {
        if let Some(cert) = mercer_search(&pt, &esc.mercer)? {
            return Ok(NptVerdict::NptCertified(NptEvidence::Mercer(cert)));
        }
        let report = positivity_sweep(&pt, esc.kmax)?;
        if report.verdict.is_certified() {
            return Ok(NptVerdict::NptCertified(NptEvidence::Sweep(report)));
        }
    }
    Ok(NptVerdict::Inconclusive {
        pt_max_mu: verdict.max_mu(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeparabilityVerdict {
    Separable,
    Entangled {
        pt_max_mu: f64,
    },
    /// Neither block is a single mode; PPT is then only necessary.
    OutOfScope,
}

/// Separability of a Gaussian state across a split with a single-mode
/// block, where PPT is equivalent to separability.
pub fn gaussian_separability(
    g: &GaussianTriple,
    b: &Bipartition,
) -> Result<SeparabilityVerdict, EntangleError> {
    b.check(g.n())?;
    g.require_kernel_valid()?;
    let spectrum = gaussian_spectrum(g)?;
    if !spectrum.verdict().is_positive() {
        return Err(EntangleError::NotAState {
            max_mu: spectrum.max(),
        });
    }
    if b.d1() != 1 && b.d2() != 1 {
        return Ok(SeparabilityVerdict::OutOfScope);
    }
    let pt = gaussian_positive(&partial_transpose_triple(g, b)?)?;
    Ok(if pt.is_positive() {
        SeparabilityVerdict::Separable
    } else {
        SeparabilityVerdict::Entangled {
            pt_max_mu: pt.max_mu(),
        }
    })
}

/// Whether an NPT certificate for `P·κ_{g1}` transfers to `P·κ_{g0}`: it
/// does when the PT images satisfy `PT(g0) ⪯ PT(g1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NptImplication {
    pub established: bool,
    pub preorder: PreorderResult,
}

pub fn preorder_npt_propagate(
    g0: &GaussianTriple,
    g1: &GaussianTriple,
    b: &Bipartition,
) -> Result<NptImplication, EntangleError> {
    let p0 = partial_transpose_triple(g0, b)?;
    let p1 = partial_transpose_triple(g1, b)?;
    let preorder = preorder_leq(&p0, &p1)?;
    Ok(NptImplication {
        established: preorder.holds,
        preorder,
    })
}
