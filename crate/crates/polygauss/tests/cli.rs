//! End-to-end runs of the `polygauss` binary plus library-level checks of
//! the kernel file format.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polygauss::cli::{cmd_zscan, fixture_spec, FixtureName, Format};
use polygauss::numfmt::Num;
use polygauss::pipeline::{Certificate, PipelineReport, Stage};
use polygauss::spec::{KernelSpec, TermSpec, TripleSpec};
use polygauss::{check, verify, CheckOptions, Verdict};
use polygauss_core::spectral::DeltaValue;
use proptest::prelude::*;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polygauss"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn fixture_file(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["fixture", name];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    write(dir, &format!("{name}.json"), &stdout(&o))
}

fn report(o: &Output) -> PipelineReport {
    serde_json::from_str(&stdout(o)).expect("report parses")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn spec_1d(a: f64, c: f64, terms: &[([u16; 2], f64)]) -> String {
    let terms: Vec<String> = terms
        .iter()
        .map(|(e, v)| format!(r#"{{"exponents":[{},{}],"coeff":[{v},0]}}"#, e[0], e[1]))
        .collect();
    format!(
        r#"{{"n":1,"triple":{{"a":[{a}],"b":[0],"c":[{c}]}},"terms":[{}]}}"#,
        terms.join(",")
    )
}

const NPT_SPEC: &str = r#"{
  "n": 2,
  "triple": { "a": [2, 0.75, 0.75, 2], "b": [0, 0, 0, 0], "c": [1, 0.75, 0.75, 1] },
  "terms": [ { "exponents": [0, 0, 0, 0], "coeff": [1, 0] } ],
  "partition": { "part1": [1] }
}"#;

#[test]
fn kappa_seven_is_not_psd() {
    let dir = TempDir::new().unwrap();
    let spec = fixture_file(&dir, "kappa-gamma-delta", &["--gamma", "7"]);
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let r = report(&o);
    assert!(matches!(r.verdict, Verdict::NotPsd { .. }));
    assert!(r.npt.is_none());
}

#[test]
fn kappa_seven_sweep_finds_negative_e3() {
    let dir = TempDir::new().unwrap();
    let spec = fixture_file(&dir, "kappa-gamma-delta", &["--gamma", "7"]);
    let o = run(&["check", s(&spec), "--trials", "0"]);
    assert_eq!(o.status.code(), Some(1));
    match report(&o).verdict {
        Verdict::NotPsd {
            stage: Stage::EkSweep,
            certificate: Certificate::NegativeEk { k, e_k, delta, .. },
        } => {
            assert_eq!(k, 3);
            assert!(e_k.0 < 0.0);
            assert_eq!(delta.0, 0.0);
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn kappa_one_is_undecided() {
    let dir = TempDir::new().unwrap();
    let spec = fixture_file(&dir, "kappa-gamma-delta", &["--gamma", "1"]);
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(r.verdict, Verdict::Undecided { kmax: 5 });
    let names: Vec<_> = r.stages.iter().map(|st| st.stage).collect();
    assert_eq!(
        names,
        [
            Stage::SelfAdjointness,
            Stage::OddDegree,
            Stage::GaussianGate,
            Stage::Mercer,
            Stage::EkSweep,
            Stage::DeltaScan
        ]
    );
}

#[test]
fn odd_polynomial_is_rejected_by_degree_gate() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "odd.json",
        &spec_1d(1.0, 1.0, &[([1, 0], 1.0), ([0, 1], 1.0)]),
    );
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    match report(&o).verdict {
        Verdict::NotPsd {
            stage: Stage::OddDegree,
            certificate: Certificate::OddDegree { degree, .. },
        } => {
            assert_eq!(degree, 1)
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn positive_gaussian_passes_the_gate() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "g.json", &spec_1d(1.5, 1.0, &[([0, 0], 1.0)]));
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert!(matches!(r.verdict, Verdict::Undecided { .. }));
    let gate = r
        .stages
        .iter()
        .find(|st| st.stage == Stage::GaussianGate)
        .unwrap();
    assert!(gate.detail.starts_with("Positive"), "{}", gate.detail);

    let o = run(&["gauss", s(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "Positive");
    // mu = sqrt(C/A) for a single mode with B = 0.
    assert!((v["max_mu"].as_f64().unwrap() - (1.0f64 / 1.5).sqrt()).abs() < 1e-12);
}

#[test]
fn gaussian_gate_rejects_wide_momentum() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "g.json", &spec_1d(1.0, 2.0, &[([0, 0], 1.0)]));
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    match report(&o).verdict {
        Verdict::NotPsd {
            stage: Stage::GaussianGate,
            certificate: Certificate::GaussianGate { max_mu, .. },
        } => {
            assert!((max_mu.0 - 2f64.sqrt()).abs() < 1e-12)
        }
        v => panic!("{v:?}"),
    }
    assert_eq!(run(&["gauss", s(&spec)]).status.code(), Some(1));
}

#[test]
fn non_hermitian_polynomial_gets_certificate() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "nh.json",
        &spec_1d(1.5, 1.0, &[([0, 0], 1.0), ([2, 0], 0.3)]),
    );
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&o);
    assert!(matches!(
        r.verdict,
        Verdict::NotPsd {
            stage: Stage::SelfAdjointness,
            certificate: Certificate::NonSelfAdjoint { .. }
        }
    ));
}

#[test]
fn malformed_json_reports_line() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "bad.json",
        "{\n  \"n\": 1,\n  \"triple\": { \"a\": [1,, ] }\n}\n",
    );
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn wrong_shape_reports_field() {
    let dir = TempDir::new().unwrap();
    let text = spec_1d(1.0, 1.0, &[([0, 0], 1.0)]).replace(r#""c":[1]"#, r#""c":[1,2]"#);
    let spec = write(&dir, "bad.json", &text);
    let o = run(&["check", s(&spec)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("triple.c"), "{}", stderr(&o));
}

#[test]
fn bad_partition_and_missing_file_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "p.json", &NPT_SPEC.replace("[1]", "[3]"));
    let o = run(&["npt", s(&spec)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("partition"), "{}", stderr(&o));
    assert_eq!(
        run(&["check", "/nonexistent/spec.json"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["check"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn npt_fixture_is_certified() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "npt.json", NPT_SPEC);
    let o = run(&["npt", s(&spec)]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("Entangled"), "{}", stdout(&o));

    // Same state at weak coupling is separable and the gate is silent.
    let weak = write(&dir, "weak.json", &NPT_SPEC.replace("0.75", "0.25"));
    assert_eq!(
        run(&["npt", s(&weak), "--no-escalation"]).status.code(),
        Some(0)
    );

    // `check` reports NPT alongside the verdict without changing it.
    let o = run(&["check", s(&spec)]);
    let r = report(&o);
    assert!(r.npt.as_ref().unwrap().npt);
    assert!(matches!(r.verdict, Verdict::Undecided { .. }));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn preorder_of_equal_gaussians_is_equivalence() {
    let dir = TempDir::new().unwrap();
    let g0 = fixture_file(&dir, "caldeira-n0", &[]);
    let g1 = fixture_file(&dir, "caldeira-n1", &[]);
    let o = run(&["preorder", s(&g0), s(&g1)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equivalent"], true);

    // Scaling A up and C down moves the Gaussian strictly down the order.
    let narrow = write(&dir, "narrow.json", &spec_1d(1.0, 0.5, &[([0, 0], 1.0)]));
    let wide = write(&dir, "wide.json", &spec_1d(0.5, 1.0, &[([0, 0], 1.0)]));
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["preorder", s(&narrow), s(&wide)]))).unwrap();
    assert_eq!(v["equivalent"], false);
    assert_ne!(
        v["first_leq_second"]["holds"],
        v["second_leq_first"]["holds"]
    );
}

#[test]
fn zscan_csv_matches_library() {
    let o = run(&["zscan", "--k", "3", "--deltas", "0,inf"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let z0: f64 = rows[0][2].parse().unwrap();
    assert!((z0 - 6.107814).abs() < 1e-5, "{z0}");
    assert_eq!(&rows[1][1], "inf");
    let lib = cmd_zscan(
        &[3],
        &[DeltaValue::Finite(0.0), DeltaValue::Infinite],
        (0.0, 20.0),
        Format::Csv,
    )
    .unwrap();
    assert_eq!(lib.text, text);
}

/// Higher-order root at δ = 0; the published value is 4.03021.
#[test]
fn z8_at_zero_shift() {
    let o = run(&["zscan", "--k", "8", "--deltas", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let z: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((z - 4.03021).abs() < 5e-5, "{z}");
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");
    let o = run(&["zscan", "--k", "3", "--deltas", "0", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out)
        .unwrap()
        .starts_with("k,delta,z"));
    let o = run(&[
        "zscan",
        "--k",
        "3",
        "--deltas",
        "0",
        "--out",
        "/nonexistent/dir/o.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

/// Trace of a 1-mode spec by trapezoid along the diagonal, using only the
/// JSON fields: on `x = y` the exponent is `−4C x²`.
fn diagonal_trace(spec: &KernelSpec) -> f64 {
    let c = spec.triple.c[0].0;
    let h = 1e-3;
    let mut total = 0.0;
    for i in -20_000..=20_000 {
        let x = i as f64 * h;
        let p: f64 = spec
            .terms
            .iter()
            .map(|t| t.coeff[0].0 * x.powi((t.exponents[0] + t.exponents[1]) as i32))
            .sum();
        total += p * (-4.0 * c * x * x).exp();
    }
    total * h * spec.norm_value()
}

#[test]
fn fixtures_have_unit_trace() {
    for (name, beta, gamma) in [
        (FixtureName::CaldeiraN0, 1.0, 0.0),
        (FixtureName::CaldeiraN1, 1.3, 0.0),
        (FixtureName::CaldeiraN2, 0.8, 0.0),
        (FixtureName::KappaGammaDelta, 1.0, 1.0),
        (FixtureName::KappaGammaDelta, 1.0, 7.0),
    ] {
        let spec = fixture_spec(name, beta, gamma, 0.0).unwrap();
        let t = diagonal_trace(&spec);
        assert!((t - 1.0).abs() < 1e-9, "{name:?}: {t}");
    }
    // kappa at γ = 1, δ = 0 carries norm 4/(3√π).
    let spec = fixture_spec(FixtureName::KappaGammaDelta, 1.0, 1.0, 0.0).unwrap();
    assert!((spec.norm_value() - 4.0 / (3.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
}

#[test]
fn fixed_seed_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = fixture_file(&dir, "caldeira-n2", &[]);
    let strip = |o: Output| -> String {
        stdout(&o)
            .lines()
            .filter(|l| !l.contains("elapsed_ms") && !l.contains("total_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = strip(run(&["check", s(&spec), "--seed", "17"]));
    let b = strip(run(&["check", s(&spec), "--seed", "17"]));
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 17"));
}

#[test]
fn certificates_reverify_and_tampering_fails() {
    let k7 = fixture_spec(FixtureName::KappaGammaDelta, 1.0, 7.0, 0.0).unwrap();
    let opts = CheckOptions {
        trials: 0,
        ..CheckOptions::default()
    };
    let r = check(&k7, "", &opts).unwrap();
    let Verdict::NotPsd { certificate, .. } = r.verdict else {
        panic!("expected certificate")
    };
    assert!(verify(&k7, &certificate).unwrap());
    let Certificate::NegativeEk {
        delta,
        k,
        tolerance,
        moments,
        extended_precision,
        ..
    } = certificate
    else {
        panic!()
    };
    let forged = Certificate::NegativeEk {
        delta,
        k,
        e_k: Num(1e-3),
        tolerance,
        moments,
        extended_precision,
    };
    assert!(!verify(&k7, &forged).unwrap());

    let r = check(&k7, "", &CheckOptions::default()).unwrap();
    let Verdict::NotPsd {
        certificate:
            Certificate::Mercer {
                points,
                coeffs,
                value,
                scale,
            },
        ..
    } = r.verdict
    else {
        panic!("expected Mercer certificate")
    };
    let cert = Certificate::Mercer {
        points: points.clone(),
        coeffs: coeffs.clone(),
        value,
        scale,
    };
    assert!(verify(&k7, &cert).unwrap());
    // Mercer on a positive kernel with the same points cannot be negative.
    let k1 = fixture_spec(FixtureName::KappaGammaDelta, 1.0, 1.0, 0.0).unwrap();
    assert!(!verify(
        &k1,
        &Certificate::Mercer {
            points,
            coeffs,
            value,
            scale
        }
    )
    .unwrap());
}

fn arb_spec() -> impl Strategy<Value = KernelSpec> {
    (1usize..=3).prop_flat_map(|n| {
        let num = || {
            prop_oneof![
                any::<f64>().prop_filter("finite", |v| v.is_finite()),
                -1e3..1e3f64
            ]
            .prop_map(Num)
        };
        let mat = move || prop::collection::vec(num(), n * n);
        let term = move || {
            (prop::collection::vec(0u16..5, 2 * n), num(), num()).prop_map(|(exponents, re, im)| {
                TermSpec {
                    exponents,
                    coeff: [re, im],
                }
            })
        };
        (
            mat(),
            mat(),
            mat(),
            prop::collection::vec(term(), 1..6),
            prop::option::of((1e-300..1e300f64).prop_map(Num)),
        )
            .prop_map(move |(a, b, c, terms, norm)| KernelSpec {
                n,
                triple: TripleSpec { a, b, c },
                terms,
                norm,
                partition: None,
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spec_round_trips(spec in arb_spec()) {
        let text = spec.to_json();
        let back = KernelSpec::parse(&text, "mem").unwrap();
        for (x, y) in spec.triple.a.iter().chain(&spec.triple.b).chain(&spec.triple.c)
            .zip(back.triple.a.iter().chain(&back.triple.b).chain(&back.triple.c)) {
            prop_assert_eq!(x.0.to_bits(), y.0.to_bits());
        }
        prop_assert_eq!(back.to_json(), text);
    }
}
