//! Argument parsing and the individual commands. Every command renders its
//! result to a string; [`run`] writes it out and maps outcomes to exit codes:
//! 0 no certificate, 1 certified (not PSD / not positive / NPT), 2 input
//! error, 3 numerical-consistency failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use polygauss_core::entangle::{
    gaussian_separability, npt_gate, NptEscalation, NptVerdict, SeparabilityVerdict,
};
use polygauss_core::fixtures::{caldeira, kappa_family, kappa_gamma_delta};
use polygauss_core::gaussian::{equiv, gaussian_spectrum, preorder_leq, PreorderResult};
use polygauss_core::spectral::{
    delta_scan, moment, normalize_trace, DeltaValue, MercerConfig, ZScanConfig,
};
use serde::Serialize;

use crate::error::CliError;
use crate::numfmt::{g17, nums, Num};
use crate::pipeline::{self, npt_summary, numerical, CheckOptions, NptSummary, Verdict};
use crate::spec::{sha256_hex, KernelSpec, LoadedSpec};

/// Largest accepted deviation of a generated fixture's trace from 1.
pub const FIXTURE_TRACE_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "polygauss",
    version,
    about = "Positivity screening for polynomial-Gaussian integral kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; `zscan` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureName {
    CaldeiraN0,
    CaldeiraN1,
    CaldeiraN2,
    KappaGammaDelta,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run all gates on a kernel spec, cheapest first.
    Check {
        spec: PathBuf,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated shifts for the equivalence-class scan; `inf` is
        /// allowed. Defaults to 10,50,250,inf.
        #[arg(long, value_delimiter = ',', value_parser = parse_delta)]
        deltas: Option<Vec<DeltaValue>>,
    },
    /// Symplectic spectrum and positivity of the Gaussian part.
    Gauss { spec: PathBuf },
    /// Preorder relation between the Gaussian parts of two specs.
    Preorder { first: PathBuf, second: PathBuf },
    /// Roots of e_k(γ) over the shifted κ_γ family.
    Zscan {
        #[arg(long, value_delimiter = ',', default_value = "3")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_delta, default_value = "0,10,50,250")]
        deltas: Vec<DeltaValue>,
        /// `lo:hi`
        #[arg(long, value_parser = parse_range, default_value = "0:20")]
        gamma_range: (f64, f64),
    },
    /// Partial-transpose screening across the input's partition.
    Npt {
        spec: PathBuf,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop after the Gaussian gate.
        #[arg(long)]
        no_escalation: bool,
    },
    /// Emit a kernel spec for a built-in family.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
}

fn parse_delta(s: &str) -> Result<DeltaValue, String> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(DeltaValue::Infinite),
        t => match t.parse::<f64>() {
            Ok(v) if v.is_finite() && v > -1.0 => Ok(DeltaValue::Finite(v)),
            Ok(v) => Err(format!("shift {v} must be finite and above -1")),
            Err(e) => Err(format!("{t:?}: {e}")),
        },
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("{s:?}: expected lo:hi"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(format!("{s:?}: need finite lo < hi"));
    }
    Ok((lo, hi))
}

fn delta_label(d: DeltaValue) -> String {
    match d {
        DeltaValue::Finite(v) => g17(v),
        DeltaValue::Infinite => "inf".into(),
    }
}

/// Rendered command output and its exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn cmd_check(
    loaded: &LoadedSpec,
    opts: &CheckOptions,
    format: Format,
) -> Result<Outcome, CliError> {
    let report = pipeline::check(&loaded.spec, &loaded.sha256, opts)?;
    let code = match report.verdict {
        Verdict::NotPsd { .. } => 1,
        Verdict::Undecided { .. } => 0,
    };
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .stages
                .iter()
                .map(|s| {
                    let status = serde_json::to_value(s.status).expect("status serializes");
                    vec![
                        s.stage.name().into(),
                        status.as_str().unwrap_or_default().into(),
                        g17(s.elapsed_ms.0),
                        s.detail.clone(),
                    ]
                })
                .collect();
            let (status, detail) = match &report.verdict {
                Verdict::NotPsd { stage, certificate } => (
                    "NotPSD".to_string(),
                    format!(
                        "{}: {}",
                        stage.name(),
                        serde_json::to_string(certificate).expect("certificate serializes")
                    ),
                ),
                Verdict::Undecided { kmax } => ("Undecided".to_string(), format!("kmax {kmax}")),
            };
            rows.push(vec![
                "verdict".into(),
                status,
                g17(report.total_ms.0),
                detail,
            ]);
            csv_text(&["stage", "status", "elapsed_ms", "detail"], rows)
        }
    };
    Ok(Outcome { text, code })
}

#[derive(Serialize)]
struct GaussReport {
    spec_sha256: String,
    n: usize,
    symplectic_eigenvalues: Vec<Num>,
    max_mu: Num,
    verdict: &'static str,
}

pub fn cmd_gauss(loaded: &LoadedSpec, format: Format) -> Result<Outcome, CliError> {
    let triple = loaded.spec.triple().map_err(CliError::Input)?;
    triple
        .require_kernel_valid()
        .map_err(|e| CliError::Input(format!("triple: {e}")))?;
    let s = gaussian_spectrum(&triple).map_err(numerical)?;
    let positive = s.verdict().is_positive();
    let verdict = if positive { "Positive" } else { "NotPositive" };
    let text = match format {
        Format::Json => json(&GaussReport {
            spec_sha256: loaded.sha256.clone(),
            n: triple.n(),
            symplectic_eigenvalues: nums(s.mus()),
            max_mu: Num(s.max()),
            verdict,
        }),
        Format::Csv => {
            let rows = s
                .mus()
                .iter()
                .enumerate()
                .map(|(i, m)| vec![(i + 1).to_string(), g17(*m), verdict.into()])
                .collect();
            csv_text(&["index", "mu", "verdict"], rows)
        }
    };
    Ok(Outcome {
        text,
        code: if positive { 0 } else { 1 },
    })
}

#[derive(Serialize)]
struct Direction {
    holds: bool,
    /// Shift used for the difference triple.
    r: Option<Num>,
    /// Largest symplectic eigenvalue of the shifted difference triple.
    max_mu: Num,
}

impl From<&PreorderResult> for Direction {
    fn from(p: &PreorderResult) -> Self {
        Direction {
            holds: p.holds,
            r: p.witness.as_ref().map(|w| Num(w.r)),
            max_mu: Num(p.max_mu),
        }
    }
}

#[derive(Serialize)]
struct PreorderReport {
    first_sha256: String,
    second_sha256: String,
    /// `⪯`, `⪰`, `≈` or `incomparable`, reading "first REL second".
    relation: &'static str,
    first_leq_second: Direction,
    second_leq_first: Direction,
    equivalent: bool,
}

pub fn cmd_preorder(
    first: &LoadedSpec,
    second: &LoadedSpec,
    format: Format,
) -> Result<Outcome, CliError> {
    let g0 = first.spec.triple().map_err(CliError::Input)?;
    let g1 = second.spec.triple().map_err(CliError::Input)?;
    if g0.n() != g1.n() {
        return Err(CliError::Input(format!(
            "dimension mismatch: n = {} vs n = {}",
            g0.n(),
            g1.n()
        )));
    }
    let fwd = preorder_leq(&g0, &g1).map_err(numerical)?;
    let bwd = preorder_leq(&g1, &g0).map_err(numerical)?;
    let equivalent = equiv(&g0, &g1).map_err(numerical)?;
    if equivalent != (fwd.holds && bwd.holds) {
        return Err(CliError::Numerical(
            "equivalence disagrees with the two-sided preorder".into(),
        ));
    }
    let relation = match (fwd.holds, bwd.holds) {
        (true, true) => "≈",
        (true, false) => "⪯",
        (false, true) => "⪰",
        (false, false) => "incomparable",
    };
    let text = match format {
        Format::Json => json(&PreorderReport {
            first_sha256: first.sha256.clone(),
            second_sha256: second.sha256.clone(),
            relation,
            first_leq_second: Direction::from(&fwd),
            second_leq_first: Direction::from(&bwd),
            equivalent,
        }),
        Format::Csv => {
            let row = |name: &str, p: &PreorderResult| {
                vec![
                    name.to_string(),
                    p.holds.to_string(),
                    p.witness.as_ref().map(|w| g17(w.r)).unwrap_or_default(),
                    g17(p.max_mu),
                ]
            };
            csv_text(
                &["direction", "holds", "r", "max_mu"],
                vec![row("first<=second", &fwd), row("second<=first", &bwd)],
            )
        }
    };
    Ok(Outcome { text, code: 0 })
}

#[derive(Serialize)]
struct ZRow {
    k: usize,
    delta: String,
    z: Num,
    bracket: [Num; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    confirmation: Option<Num>,
}

pub fn cmd_zscan(
    ks: &[usize],
    deltas: &[DeltaValue],
    gamma_range: (f64, f64),
    format: Format,
) -> Result<Outcome, CliError> {
    if ks.is_empty() || deltas.is_empty() {
        return Err(CliError::Input("need at least one k and one delta".into()));
    }
    let family = kappa_family(0.0).map_err(numerical)?;
    let cfg = ZScanConfig {
        gamma_lo: gamma_range.0,
        gamma_hi: gamma_range.1,
        ..ZScanConfig::default()
    };
    let mut rows = Vec::new();
    for &k in ks {
        let scan = delta_scan(&family, k, deltas, &cfg).map_err(|e| match e {
            polygauss_core::spectral::SpectralError::NoRootBracket { .. }
            | polygauss_core::spectral::SpectralError::MomentOrder { .. } => {
                CliError::Input(e.to_string())
            }
            e => numerical(e),
        })?;
        rows.extend(scan.rows.iter().map(|r| ZRow {
            k,
            delta: delta_label(r.delta),
            z: Num(r.gamma_root),
            bracket: [Num(r.bracket.0), Num(r.bracket.1)],
            confirmation: r.confirmation.map(Num),
        }));
    }
    let text = match format {
        Format::Json => json(&rows),
        Format::Csv => csv_text(
            &["k", "delta", "z"],
            rows.iter()
                .map(|r| vec![r.k.to_string(), r.delta.clone(), g17(r.z.0)])
                .collect(),
        ),
    };
    Ok(Outcome { text, code: 0 })
}

#[derive(Serialize)]
struct NptReport {
    spec_sha256: String,
    part1: Vec<usize>,
    /// Trace before rescaling to 1.
    trace: Num,
    verdict: &'static str,
    #[serde(flatten)]
    summary: NptSummary,
    /// Only for a constant polynomial, where the kernel is Gaussian.
    #[serde(skip_serializing_if = "Option::is_none")]
    gaussian_separability: Option<String>,
}

pub struct NptOptions {
    pub escalate: bool,
    pub kmax: usize,
    pub mercer: MercerConfig,
}

pub fn cmd_npt(
    loaded: &LoadedSpec,
    opts: &NptOptions,
    format: Format,
) -> Result<Outcome, CliError> {
    let spec = &loaded.spec;
    let b = spec
        .bipartition()
        .ok_or_else(|| CliError::Input("spec has no `partition` field".into()))?
        .map_err(CliError::Input)?;
    let kernel = spec.kernel().map_err(CliError::Input)?;
    let trace = moment(&kernel, 1).map_err(numerical)?;
    let unit =
        normalize_trace(&kernel).map_err(|e| CliError::Input(format!("cannot normalize: {e}")))?;
    let escalation = NptEscalation {
        kmax: opts
            .kmax
            .min(polygauss_core::spectral::max_order_for_degree(
                kernel.poly().degree().unwrap_or(0),
            )),
        mercer: opts.mercer,
    };
    let v = npt_gate(&unit, &b, opts.escalate.then_some(&escalation)).map_err(numerical)?;
    let separability = if kernel.poly().degree() == Some(0) {
        Some(match gaussian_separability(kernel.triple(), &b) {
            Ok(SeparabilityVerdict::Separable) => "Separable".to_string(),
            Ok(SeparabilityVerdict::Entangled { pt_max_mu }) => {
                format!("Entangled (partial transpose max mu {})", g17(pt_max_mu))
            }
            Ok(SeparabilityVerdict::OutOfScope) => "OutOfScope".to_string(),
            Err(e) => format!("not applicable: {e}"),
        })
    } else {
        None
    };
    let verdict = match v {
        NptVerdict::NptCertified(_) => "NPT_Certified",
        NptVerdict::Inconclusive { .. } => "Inconclusive",
    };
    let report = NptReport {
        spec_sha256: loaded.sha256.clone(),
        part1: b.part1().to_vec(),
        trace: Num(trace),
        verdict,
        summary: npt_summary(&v),
        gaussian_separability: separability,
    };
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => csv_text(
            &["verdict", "detail", "gaussian_separability"],
            vec![vec![
                verdict.into(),
                report.summary.detail.clone(),
                report.gaussian_separability.clone().unwrap_or_default(),
            ]],
        ),
    };
    Ok(Outcome {
        text,
        code: if v.is_npt() { 1 } else { 0 },
    })
}

/// Builds a fixture spec and checks its trace.
pub fn fixture_spec(
    name: FixtureName,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<KernelSpec, CliError> {
    let kernel = match name {
        FixtureName::CaldeiraN0 => caldeira(0, beta),
        FixtureName::CaldeiraN1 => caldeira(1, beta),
        FixtureName::CaldeiraN2 => caldeira(2, beta),
        FixtureName::KappaGammaDelta => kappa_gamma_delta(gamma, delta),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let trace = moment(&kernel, 1).map_err(numerical)?;
    if (trace - 1.0).abs() > FIXTURE_TRACE_TOL {
        return Err(CliError::Numerical(format!(
            "fixture trace is {}, expected 1",
            g17(trace)
        )));
    }
    Ok(KernelSpec::from_kernel(&kernel))
}

pub fn cmd_fixture(
    name: FixtureName,
    beta: f64,
    gamma: f64,
    delta: f64,
    format: Format,
) -> Result<Outcome, CliError> {
    if format == Format::Csv {
        return Err(CliError::Input(
            "fixtures are JSON specs; csv is not available".into(),
        ));
    }
    Ok(Outcome {
        text: fixture_spec(name, beta, gamma, delta)?.to_json(),
        code: 0,
    })
}

fn load(path: &Path) -> Result<LoadedSpec, CliError> {
    Ok(KernelSpec::load(path)?)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Check {
            spec,
            kmax,
            trials,
            seed,
            deltas,
        } => {
            let mut opts = CheckOptions {
                kmax: *kmax,
                trials: *trials,
                seed: *seed,
                ..CheckOptions::default()
            };
            if let Some(d) = deltas {
                opts.deltas = d.clone();
            }
            cmd_check(&load(spec)?, &opts, fmt(Format::Json))
        }
        Command::Gauss { spec } => cmd_gauss(&load(spec)?, fmt(Format::Json)),
        Command::Preorder { first, second } => {
            cmd_preorder(&load(first)?, &load(second)?, fmt(Format::Json))
        }
        Command::Zscan {
            k,
            deltas,
            gamma_range,
        } => cmd_zscan(k, deltas, *gamma_range, fmt(Format::Csv)),
        Command::Npt {
            spec,
            kmax,
            trials,
            seed,
            no_escalation,
        } => {
            let opts = NptOptions {
                escalate: !no_escalation,
                kmax: *kmax,
                mercer: MercerConfig {
                    trials: *trials,
                    seed: *seed,
                    ..MercerConfig::default()
                },
            };
            cmd_npt(&load(spec)?, &opts, fmt(Format::Json))
        }
        Command::Fixture {
            name,
            beta,
            gamma,
            delta,
        } => cmd_fixture(*name, *beta, *gamma, *delta, fmt(Format::Json)),
    }
}

/// Parses arguments, runs the command, writes output and returns the exit
/// code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = execute(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => std::fs::write(path, &o.text).map_err(|source| CliError::Output {
                path: path.display().to_string(),
                source,
            })?,
            None => print!("{}", o.text),
        }
        Ok(o.code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// SHA-256 of an in-memory spec, matching what [`KernelSpec::load`] records.
pub fn spec_checksum(text: &str) -> String {
    sha256_hex(text.as_bytes())
}
