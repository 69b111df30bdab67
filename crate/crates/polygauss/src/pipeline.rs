//! The `check` pipeline: gates run cheapest first and stop at the first
//! certificate of non-positivity.

use std::time::Instant;

use polygauss_core::entangle::{npt_gate, NptEscalation, NptEvidence, NptVerdict};
use polygauss_core::gaussian::{gaussian_spectrum, GaussianTriple};
use polygauss_core::poly::{Monomial, MultiPoly, OddDegreeVerdict};
use polygauss_core::spectral::{
    max_order_for_degree, mercer_search, normalize_trace, positivity_sweep,
    positivity_sweep_extended, verify_certificate, DeltaValue, MercerCertificate, MercerConfig,
    Precision, SpectralError, SpectralReport, SweepVerdict, MAX_MOMENT_ORDER, SELF_ADJOINT_TOL,
};
use polygauss_core::{PolyGaussianKernel, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::numfmt::{g17, nums, Num};
use crate::spec::KernelSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    SelfAdjointness,
    OddDegree,
    GaussianGate,
    Mercer,
    EkSweep,
    DeltaScan,
    Npt,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::SelfAdjointness => "self_adjointness",
            Stage::OddDegree => "odd_degree",
            Stage::GaussianGate => "gaussian_gate",
            Stage::Mercer => "mercer",
            Stage::EkSweep => "ek_sweep",
            Stage::DeltaScan => "delta_scan",
            Stage::Npt => "npt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    /// Ran without producing a certificate.
    NoCertificate,
    Certificate,
    /// Not applicable to this input; the detail says why.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: Stage,
    pub status: StageStatus,
    pub detail: String,
    pub elapsed_ms: Num,
}

/// Evidence that the operator is not positive semidefinite, checkable
/// against the kernel description alone with [`verify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// `P(y, x)* ≠ P(x, y)` at this monomial, so the kernel is not Hermitian.
    NonSelfAdjoint {
        exponents: Vec<u16>,
        coeff: [Num; 2],
        adjoint_coeff: [Num; 2],
    },
    /// Zeroing the listed coordinate pairs (1-based; empty for the whole
    /// polynomial) leaves odd total degree.
    OddDegree { subset: Vec<usize>, degree: u32 },
    /// A symplectic eigenvalue of the Gaussian part exceeds 1.
    GaussianGate { mus: Vec<Num>, max_mu: Num },
    /// `Σ cᵢc̄ⱼκ(xᵢ,xⱼ) < 0`.
    Mercer {
        points: Vec<Vec<Num>>,
        coeffs: Vec<[Num; 2]>,
        value: Num,
        scale: Num,
    },
    /// `e_k < 0` for the kernel with its Gaussian part shifted by `delta`.
    NegativeEk {
        delta: Num,
        k: usize,
        e_k: Num,
        tolerance: Num,
        moments: Vec<Num>,
        extended_precision: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    #[serde(rename = "NotPSD")]
    NotPsd {
        stage: Stage,
        certificate: Certificate,
    },
    /// No certificate found; positivity is not claimed.
    Undecided { kmax: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NptSummary {
    pub npt: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub spec_sha256: String,
    pub n: usize,
    pub kmax_requested: usize,
    pub kmax_effective: usize,
    pub trials: usize,
    pub seed: u64,
    pub stages: Vec<StageResult>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub npt: Option<NptSummary>,
    pub total_ms: Num,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub kmax: usize,
    pub trials: usize,
    pub seed: u64,
    pub deltas: Vec<DeltaValue>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            kmax: 5,
            trials: 200,
            seed: 0,
            deltas: vec![
                DeltaValue::Finite(10.0),
                DeltaValue::Finite(50.0),
                DeltaValue::Finite(250.0),
                DeltaValue::Infinite,
            ],
        }
    }
}

pub fn delta_shift(d: DeltaValue) -> f64 {
    match d {
        DeltaValue::Finite(v) => v,
        DeltaValue::Infinite => polygauss_core::spectral::INFINITE_DELTA,
    }
}

fn c2(z: C64) -> [Num; 2] {
    [Num(z.re), Num(z.im)]
}

fn from_c2(v: &[Num; 2]) -> C64 {
    C64::new(v[0].0, v[1].0)
}

/// Largest `|P − P†|` coefficient, if above tolerance.
fn adjointness_witness(p: &MultiPoly) -> Option<Certificate> {
    let scale = p.poly().max_abs_coeff();
    let adj = p.adjoint();
    let mut worst: Option<(f64, &Monomial)> = None;
    for (m, _) in p.terms().chain(adj.terms()) {
        let d = (p.poly().coeff(m) - adj.poly().coeff(m)).norm();
        if d > SELF_ADJOINT_TOL * scale && worst.is_none_or(|(w, _)| d > w) {
            worst = Some((d, m));
        }
    }
    worst.map(|(_, m)| Certificate::NonSelfAdjoint {
        exponents: m.exponents().to_vec(),
        coeff: c2(p.poly().coeff(m)),
        adjoint_coeff: c2(adj.poly().coeff(m)),
    })
}

fn mercer_certificate(c: &MercerCertificate) -> Certificate {
    Certificate::Mercer {
        points: c.points.iter().map(|p| nums(p)).collect(),
        coeffs: c.coeffs.iter().map(|&z| c2(z)).collect(),
        value: Num(c.value),
        scale: Num(c.scale),
    }
}

/// Extended precision when the kernel allows it, double otherwise.
pub fn sweep(k: &PolyGaussianKernel, kmax: usize) -> Result<SpectralReport, SpectralError> {
    match positivity_sweep_extended(k, kmax) {
        Err(SpectralError::NotReal) => positivity_sweep(k, kmax),
        other => other,
    }
}

fn sweep_certificate(r: &SpectralReport, delta: f64) -> Option<Certificate> {
    match r.verdict {
        SweepVerdict::CertifiedNotPsd { k } => Some(Certificate::NegativeEk {
            delta: Num(delta),
            k,
            e_k: Num(r.eks[k - 1]),
            tolerance: Num(r.tolerances[k - 1]),
            moments: nums(&r.moments[..k]),
            extended_precision: r.precision == Precision::Extended,
        }),
        SweepVerdict::ConsistentUpTo { .. } => None,
    }
}

struct Runner {
    stages: Vec<StageResult>,
}

impl Runner {
    fn run<T>(
        &mut self,
        stage: Stage,
        f: impl FnOnce() -> Result<(StageStatus, String, T), CliError>,
    ) -> Result<T, CliError> {
        let t0 = Instant::now();
        let (status, detail, out) = f()?;
        self.stages.push(StageResult {
            stage,
            status,
            detail,
            elapsed_ms: Num(t0.elapsed().as_secs_f64() * 1e3),
        });
        Ok(out)
    }
}

/// Runs every gate on a kernel description. Input problems are [`CliError::Input`];
/// a certificate that fails its own re-check is [`CliError::Numerical`].
pub fn check(
    spec: &KernelSpec,
    sha256: &str,
    opts: &CheckOptions,
) -> Result<PipelineReport, CliError> {
    let t0 = Instant::now();
    let triple = spec.triple().map_err(CliError::Input)?;
    triple
        .require_kernel_valid()
        .map_err(|e| CliError::Input(format!("triple: {e}")))?;
    let poly = spec.polynomial().map_err(CliError::Input)?;
    let degree = poly
        .degree()
        .ok_or_else(|| CliError::Input("polynomial is identically zero".into()))?;
    let kmax_effective = opts.kmax.min(max_order_for_degree(degree));
    if opts.kmax == 0 {
        return Err(CliError::Input("--kmax must be at least 1".into()));
    }

    let mut runner = Runner { stages: Vec::new() };
    let finish = |runner: Runner, verdict: Verdict, npt: Option<NptSummary>| {
        let report = PipelineReport {
            spec_sha256: sha256.to_string(),
            n: spec.n,
            kmax_requested: opts.kmax,
            kmax_effective,
            trials: opts.trials,
            seed: opts.seed,
            stages: runner.stages,
            verdict,
            npt,
            total_ms: Num(t0.elapsed().as_secs_f64() * 1e3),
        };
        if let Verdict::NotPsd { certificate, .. } = &report.verdict {
            if !verify(spec, certificate)? {
                return Err(CliError::Numerical(
                    "certificate failed its standalone re-check".into(),
                ));
            }
        }
        Ok(report)
    };

    let cert = runner.run(Stage::SelfAdjointness, || {
        Ok(match adjointness_witness(&poly) {
            Some(c) => (
                StageStatus::Certificate,
                "kernel is not Hermitian".into(),
                Some(c),
            ),
            None => (
                StageStatus::NoCertificate,
                format!("deviation {}", g17(poly.self_adjoint_deviation())),
                None,
            ),
        })
    })?;
    if let Some(certificate) = cert {
        return finish(
            runner,
            Verdict::NotPsd {
                stage: Stage::SelfAdjointness,
                certificate,
            },
            None,
        );
    }
    let kernel = PolyGaussianKernel::new(poly.clone(), triple.clone(), spec.norm_value())
        .map_err(|e| CliError::Input(e.to_string()))?;

    let cert = runner.run(Stage::OddDegree, || {
        let v = poly
            .odd_degree_gate()
            .map_err(|e| CliError::Input(e.to_string()))?;
        Ok(match v {
            OddDegreeVerdict::RejectOdd { degree } => (
                StageStatus::Certificate,
                format!("total degree {degree} is odd"),
                Some(Certificate::OddDegree {
                    subset: Vec::new(),
                    degree,
                }),
            ),
            OddDegreeVerdict::RejectReducibleOdd { subset, degree } => (
                StageStatus::Certificate,
                format!("zeroing coordinates {subset:?} leaves degree {degree}"),
                Some(Certificate::OddDegree { subset, degree }),
            ),
            OddDegreeVerdict::Pass => (
                StageStatus::NoCertificate,
                "no odd-degree reduction".into(),
                None,
            ),
            OddDegreeVerdict::Skipped { n } => (
                StageStatus::Skipped,
                format!("n = {n} too large for subset search"),
                None,
            ),
        })
    })?;
    if let Some(certificate) = cert {
        return finish(
            runner,
            Verdict::NotPsd {
                stage: Stage::OddDegree,
                certificate,
            },
            None,
        );
    }

    let cert = runner.run(Stage::GaussianGate, || {
        let s = gaussian_spectrum(&triple).map_err(numerical)?;
        Ok(if s.verdict().is_positive() {
            (
                StageStatus::NoCertificate,
                format!("Positive, max mu {}", g17(s.max())),
                None,
            )
        } else {
            (
                StageStatus::Certificate,
                format!("NotPositive, max mu {}", g17(s.max())),
                Some(Certificate::GaussianGate {
                    mus: nums(s.mus()),
                    max_mu: Num(s.max()),
                }),
            )
        })
    })?;
    if let Some(certificate) = cert {
        return finish(
            runner,
            Verdict::NotPsd {
                stage: Stage::GaussianGate,
                certificate,
            },
            None,
        );
    }

    let cert = runner.run(Stage::Mercer, || {
        let cfg = MercerConfig {
            trials: opts.trials,
            seed: opts.seed,
            ..MercerConfig::default()
        };
        Ok(match mercer_search(&kernel, &cfg).map_err(numerical)? {
            Some(c) => (
                StageStatus::Certificate,
                format!("trial {}: quadratic form {}", c.trial, g17(c.value)),
                Some(mercer_certificate(&c)),
            ),
            None => (
                StageStatus::NoCertificate,
                format!("{} trials, no violation", opts.trials),
                None,
            ),
        })
    })?;
    if let Some(certificate) = cert {
        return finish(
            runner,
            Verdict::NotPsd {
                stage: Stage::Mercer,
                certificate,
            },
            None,
        );
    }

    let cert = runner.run(Stage::EkSweep, || {
        let r = sweep(&kernel, kmax_effective).map_err(numerical)?;
        let detail = match r.verdict {
            SweepVerdict::CertifiedNotPsd { k } => {
                format!("e_{k} = {} is negative", g17(r.eks[k - 1]))
            }
            SweepVerdict::ConsistentUpTo { kmax } => format!("e_1..e_{kmax} nonnegative"),
        };
        let cert = sweep_certificate(&r, 0.0);
        Ok((
            if cert.is_some() {
                StageStatus::Certificate
            } else {
                StageStatus::NoCertificate
            },
            detail,
            cert,
        ))
    })?;
    if let Some(certificate) = cert {
        return finish(
            runner,
            Verdict::NotPsd {
                stage: Stage::EkSweep,
                certificate,
            },
            None,
        );
    }

    let cert = runner.run(Stage::DeltaScan, || {
        if opts.deltas.is_empty() {
            return Ok((StageStatus::Skipped, "no shifts requested".into(), None));
        }
        for &d in &opts.deltas {
            let shift = delta_shift(d);
            let shifted = triple
                .shifted(shift)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let r = sweep(
                &kernel.with_triple(shifted).map_err(numerical)?,
                kmax_effective,
            )
            .map_err(numerical)?;
            if let Some(c) = sweep_certificate(&r, shift) {
                let k = r.first_negative.unwrap_or_default();
                return Ok((
                    StageStatus::Certificate,
                    format!("e_{k} negative at shift {}", g17(shift)),
                    Some(c),
                ));
            }
        }
        Ok((
            StageStatus::NoCertificate,
            format!(
                "{} shifts, e_1..e_{kmax_effective} nonnegative",
                opts.deltas.len()
            ),
            None,
        ))
    })?;
    if let Some(certificate) = cert {
        return finish(
            runner,
            Verdict::NotPsd {
                stage: Stage::DeltaScan,
                certificate,
            },
            None,
        );
    }

    let npt = match spec.bipartition() {
        None => None,
        Some(b) => {
            let b = b.map_err(CliError::Input)?;
            runner.run(Stage::Npt, || {
                let unit = normalize_trace(&kernel).map_err(numerical)?;
                let esc = NptEscalation {
                    kmax: kmax_effective,
                    mercer: MercerConfig {
                        trials: opts.trials,
                        seed: opts.seed,
                        ..MercerConfig::default()
                    },
                };
                let v = npt_gate(&unit, &b, Some(&esc))
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let summary = npt_summary(&v);
                let status = if summary.npt {
                    StageStatus::Certificate
                } else {
                    StageStatus::NoCertificate
                };
                Ok((status, summary.detail.clone(), Some(summary)))
            })?
        }
    };
    finish(
        runner,
        Verdict::Undecided {
            kmax: kmax_effective,
        },
        npt,
    )
}

pub fn npt_summary(v: &NptVerdict) -> NptSummary {
    let detail = match v {
        NptVerdict::NptCertified(NptEvidence::GaussianGate { max_mu }) => {
            format!(
                "NPT_Certified: partial transpose has max mu {}",
                g17(*max_mu)
            )
        }
        NptVerdict::NptCertified(NptEvidence::Sweep(r)) => {
            format!(
                "NPT_Certified: partial transpose has e_{} < 0",
                r.first_negative.unwrap_or_default()
            )
        }
        NptVerdict::NptCertified(NptEvidence::Mercer(c)) => {
            format!(
                "NPT_Certified: partial transpose violates Mercer, value {}",
                g17(c.value)
            )
        }
        NptVerdict::Inconclusive { pt_max_mu } => {
            format!("Inconclusive: partial transpose max mu {}", g17(*pt_max_mu))
        }
    };
    NptSummary {
        npt: v.is_npt(),
        detail,
    }
}

pub(crate) fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Re-checks a certificate against the kernel description it was issued for, without
/// running the pipeline.
pub fn verify(spec: &KernelSpec, cert: &Certificate) -> Result<bool, CliError> {
    match cert {
        Certificate::NonSelfAdjoint { exponents, .. } => {
            let p = spec.polynomial().map_err(CliError::Input)?;
            if exponents.len() != 2 * spec.n {
                return Ok(false);
            }
            let m = Monomial::new(exponents.clone());
            let d = (p.poly().coeff(&m) - p.adjoint().poly().coeff(&m)).norm();
            Ok(d > SELF_ADJOINT_TOL * p.poly().max_abs_coeff())
        }
        Certificate::OddDegree { subset, degree } => {
            let p = spec.polynomial().map_err(CliError::Input)?;
            if subset.iter().any(|&i| i == 0 || i > spec.n) {
                return Ok(false);
            }
            let zero_based: Vec<usize> = subset.iter().map(|i| i - 1).collect();
            let reduced = p.restrict_zero(&zero_based);
            Ok(reduced.degree() == Some(*degree) && degree % 2 == 1)
        }
        Certificate::GaussianGate { .. } => {
            let triple: GaussianTriple = spec.triple().map_err(CliError::Input)?;
            Ok(!gaussian_spectrum(&triple)
                .map_err(numerical)?
                .verdict()
                .is_positive())
        }
        Certificate::Mercer {
            points,
            coeffs,
            value,
            scale,
        } => {
            let k = spec.kernel().map_err(CliError::Input)?;
            let c = MercerCertificate {
                points: points
                    .iter()
                    .map(|p| p.iter().map(|v| v.0).collect())
                    .collect(),
                coeffs: coeffs.iter().map(from_c2).collect(),
                value: value.0,
                scale: scale.0,
                trial: 0,
            };
            Ok(verify_certificate(&k, &c).map_err(numerical)?)
        }
        Certificate::NegativeEk {
            delta,
            k,
            e_k,
            extended_precision,
            ..
        } => {
            if *k == 0 || *k > MAX_MOMENT_ORDER {
                return Ok(false);
            }
            let kernel = spec.kernel().map_err(CliError::Input)?;
            let shifted = kernel.triple().shifted(delta.0).map_err(numerical)?;
            let kernel = kernel.with_triple(shifted).map_err(numerical)?;
            let r = if *extended_precision {
                positivity_sweep_extended(&kernel, *k)
            } else {
                positivity_sweep(&kernel, *k)
            }
            .map_err(numerical)?;
            let recomputed = r.eks[k - 1];
            // The stated value must be the one the sweep produces.
            let agrees =
                (e_k.0 - recomputed).abs() <= 1e-9 * recomputed.abs().max(f64::MIN_POSITIVE);
            Ok(agrees && recomputed < -r.tolerances[k - 1])
        }
    }
}
