//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use polygauss::cli::{cmd_zscan, Format};
use polygauss_core::entangle::{
    gaussian_separability, npt_gate, partial_transpose, Bipartition, SeparabilityVerdict,
};
use polygauss_core::fixtures::{
    caldeira, kappa_gamma_delta, npt_two_mode, LIMIT_CUBIC_K3_K4, LIMIT_CUBIC_K5, NPT_COUPLING,
    NPT_PT_MAX_MU,
};
use polygauss_core::gaussian::{
    equiv, gaussian_positive, preorder_leq, preorder_leq_with_r, GaussianTriple,
};
use polygauss_core::numerics::{min_eigenvalue, ComplexMatrix, ComplexSymMatrix, RealSymMatrix};
use polygauss_core::poly::{MultiPoly, Polynomial};
use polygauss_core::spectral::{
    elementary_symmetric, elementary_symmetric_det, max_order_for_degree, mercer_search, moment,
    moments, normalize_trace, nystrom_oracle, positivity_sweep, verify_certificate, DeltaValue,
    MercerConfig,
};
use polygauss_core::wick::{integrate_out, poly_gaussian_integral, QuadraticExponent};
use polygauss_core::{PolyGaussianKernel, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn zscan_rows(ks: &[usize], deltas: &[DeltaValue]) -> Vec<(usize, String, f64)> {
    let out = cmd_zscan(ks, deltas, (0.0, 20.0), Format::Csv).expect("zscan runs");
    let mut rdr = csv::Reader::from_reader(out.text.as_bytes());
    rdr.records()
        .map(|r| {
            let r = r.expect("csv row");
            (
                r[0].parse().unwrap(),
                r[1].to_string(),
                r[2].parse().unwrap(),
            )
        })
        .collect()
}

fn table_reproduction() -> Outcome {
    let table: [(usize, f64, f64); 8] = [
        (3, 0.0, 6.10781),
        (3, 10.0, 4.43150),
        (3, 50.0, 4.36304),
        (3, 250.0, 4.34880),
        (4, 0.0, 5.07931),
        (4, 250.0, 4.34708),
        (5, 0.0, 4.25293),
        (5, 250.0, 4.03973),
    ];
    let mut worst = 0.0f64;
    let mut timing = Vec::new();
    let mut ok = true;
    for (ks, budget) in [(&[3usize, 4][..], 60.0), (&[5usize][..], 600.0)] {
        let t0 = Instant::now();
        for &k in ks {
            let deltas: Vec<DeltaValue> = table
                .iter()
                .filter(|r| r.0 == k)
                .map(|r| DeltaValue::Finite(r.1))
                .collect();
            let rows = zscan_rows(&[k], &deltas);
            for ((_, _, want), (_, _, got)) in table.iter().filter(|r| r.0 == k).zip(&rows) {
                let err = (got - want).abs();
                worst = worst.max(err);
                ok &= err <= 1e-3;
            }
        }
        let secs = t0.elapsed().as_secs_f64();
        ok &= secs < budget;
        timing.push(format!("k={ks:?} {secs:.2}s"));
    }
    outcome(
        ok,
        format!(
            "8 cells, max |dZ| = {worst:.2e} (tol 1e-3); {}",
            timing.join(", ")
        ),
    )
}

fn limit_values() -> Outcome {
    let k34 = support::cubic_root(LIMIT_CUBIC_K3_K4, 3.0, 6.0);
    let k5 = support::cubic_root(LIMIT_CUBIC_K5, 3.0, 6.0);
    let closed = 2.0 + (5.5f64).sqrt();
    let rows = zscan_rows(&[3, 4, 5], &[DeltaValue::Infinite]);
    let mut ok = (k34 - closed).abs() < 1e-12 && (k5 - 4.03924).abs() < 1e-5;
    let mut parts = Vec::new();
    for (k, _, z) in rows {
        let target = if k == 5 { k5 } else { k34 };
        let err = (z - target).abs();
        ok &= err <= 5e-3;
        parts.push(format!("Z_{k}={z:.6} (|d|={err:.1e})"));
    }
    outcome(
        ok,
        format!("{}; targets {k34:.6}, {k5:.6}", parts.join(", ")),
    )
}

fn gaussian_1d() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut disagree, mut banded) = (0, 0);
    for i in 0..1000 {
        let a = 10f64.powf(rng.random_range(-1.5..1.5));
        // every tenth case sits right at the boundary
        let c = if i % 10 == 0 {
            a * (1.0 + rng.random_range(-1e-6..1e-6))
        } else {
            10f64.powf(rng.random_range(-1.5..1.5))
        };
        let b = rng.random_range(-5.0..5.0);
        if (a - c).abs() <= 1e-10 * a.max(c) {
            banded += 1;
            continue;
        }
        let got = gaussian_positive(&GaussianTriple::scalar(a, b, c).unwrap())
            .unwrap()
            .is_positive();
        if got != (a >= c) {
            disagree += 1;
        }
    }
    outcome(
        disagree == 0,
        format!("1000 triples, {disagree} disagreements, {banded} inside the boundary band"),
    )
}

fn mercer_harness() -> Outcome {
    let shapes: [(&str, Vec<(Vec<u16>, C64)>); 5] = [
        ("1", vec![(vec![0, 0], c(1.0))]),
        ("xy", vec![(vec![1, 1], c(1.0))]),
        (
            "1+x^2+y^2",
            vec![
                (vec![0, 0], c(1.0)),
                (vec![2, 0], c(1.0)),
                (vec![0, 2], c(1.0)),
            ],
        ),
        (
            "2+xy+x^2y^2",
            vec![
                (vec![0, 0], c(2.0)),
                (vec![1, 1], c(1.0)),
                (vec![2, 2], c(1.0)),
            ],
        ),
        (
            "0.5+(x+y)^2",
            vec![
                (vec![0, 0], c(0.5)),
                (vec![2, 0], c(1.0)),
                (vec![1, 1], c(2.0)),
                (vec![0, 2], c(1.0)),
            ],
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut misses = Vec::new();
    let mut total = 0;
    for t in 0..50 {
        let a = 10f64.powf(rng.random_range(-0.7..0.7));
        let cc = a * rng.random_range(1.1..3.0);
        let b = rng.random_range(-2.0..2.0);
        let triple = GaussianTriple::scalar(a, b, cc).unwrap();
        for (name, terms) in &shapes {
            total += 1;
            let k = PolyGaussianKernel::new(
                MultiPoly::from_terms(1, terms.clone()).unwrap(),
                triple.clone(),
                1.0,
            )
            .unwrap();
            let cfg = MercerConfig {
                seed: t as u64,
                ..MercerConfig::default()
            };
            let found = mercer_search(&k, &cfg).unwrap();
            if !found.is_some_and(|cert| verify_certificate(&k, &cert).unwrap()) {
                misses.push(format!("triple {t} P={name}"));
            }
        }
    }
    outcome(
        misses.is_empty(),
        format!(
            "{} of {total} kernels certified within 200 trials {:?}",
            total - misses.len(),
            misses
        ),
    )
}

fn odd_degree_gate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut mismatches, mut rejects, mut reducible) = (0, 0, 0);
    let mut generated = 0;
    while generated < 500 {
        let n = rng.random_range(1..=4usize);
        let nterms = rng.random_range(1..=6usize);
        let mut terms: BTreeMap<Vec<u16>, f64> = BTreeMap::new();
        for _ in 0..nterms {
            // even degrees twice as likely, so reducible cases show up
            let d = if rng.random_bool(0.6) {
                2 * rng.random_range(0..=2u16)
            } else {
                rng.random_range(0..=5u16)
            };
            *terms
                .entry(support::random_exponents(&mut rng, n, d))
                .or_default() += rng.random_range(0.5..2.0);
        }
        terms.retain(|_, v| *v != 0.0);
        if terms.is_empty() {
            continue;
        }
        generated += 1;
        // brute force: every coordinate subset, including the empty one
        let brute = (0u32..(1 << n)).any(|mask| {
            terms
                .keys()
                .filter(|e| (0..n).all(|i| mask & (1 << i) == 0 || (e[i] == 0 && e[n + i] == 0)))
                .map(|e| e.iter().map(|&v| v as u32).sum::<u32>())
                .max()
                .is_some_and(|d| d % 2 == 1)
        });
        let poly = MultiPoly::from_terms(n, terms.iter().map(|(e, &v)| (e.clone(), c(v)))).unwrap();
        let gate = poly.odd_degree_gate().unwrap();
        if gate.is_reject() != brute {
            mismatches += 1;
        }
        rejects += brute as usize;
        reducible += matches!(
            gate,
            polygauss_core::poly::OddDegreeVerdict::RejectReducibleOdd { .. }
        ) as usize;
    }
    outcome(mismatches == 0, format!("500 polynomials, {mismatches} mismatches ({rejects} rejected, {reducible} only after reduction)"))
}

fn wick_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut complex_cases = 0;
    for case in 0..100 {
        let m = case % 3 + 1;
        let complex = case % 2 == 0;
        complex_cases += complex as usize;
        let r = support::random_spd(&mut rng, m, 0.5);
        let s = support::random_matrix(&mut rng, m, 0.5);
        let q = ComplexMatrix::from_fn(m, m, |i, j| {
            let im = if complex {
                0.5 * (s[i * m + j] + s[j * m + i])
            } else {
                0.0
            };
            C64::new(r[i * m + j], im)
        });
        let b: Vec<C64> = (0..m)
            .map(|_| {
                C64::new(
                    rng.random_range(-1.0..1.0),
                    if complex {
                        rng.random_range(-1.0..1.0)
                    } else {
                        0.0
                    },
                )
            })
            .collect();
        let mut p = Polynomial::constant(m, c(rng.random_range(0.5..1.5)));
        for _ in 0..rng.random_range(1..=4) {
            let d = rng.random_range(1..=6u16);
            let mut e = vec![0u16; m];
            for _ in 0..d {
                e[rng.random_range(0..m)] += 1;
            }
            p.add_term(
                polygauss_core::poly::Monomial::new(e),
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
        }
        let exponent =
            QuadraticExponent::with_linear(ComplexSymMatrix::new(q.clone()).unwrap(), &b).unwrap();
        let engine = poly_gaussian_integral(&p, &exponent)
            .unwrap()
            .scalar_value()
            .unwrap();

        // Box around the real stationary point, 10 standard deviations wide.
        let rre = RealSymMatrix::from_row_major(m, r.clone()).unwrap();
        let cov = polygauss_core::numerics::inverse(rre.matrix()).unwrap();
        let bre: Vec<f64> = b.iter().map(|z| z.re).collect();
        let centre: Vec<f64> = (0..m)
            .map(|i| 0.5 * (0..m).map(|j| cov[(i, j)] * bre[j]).sum::<f64>())
            .collect();
        let bounds: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let w = 9.0 * (0.5 * cov[(i, i)]).sqrt() + 1.0;
                (centre[i] - w, centre[i] + w)
            })
            .collect();
        let terms: Vec<(Vec<i32>, C64)> = p
            .terms()
            .map(|(mono, &v)| (mono.exponents().iter().map(|&e| e as i32).collect(), v))
            .collect();
        let f = |z: &[f64]| {
            let mut quad = C64::new(0.0, 0.0);
            for i in 0..m {
                for j in 0..m {
                    quad += q[(i, j)] * z[i] * z[j];
                }
            }
            let lin: C64 = (0..m).map(|i| b[i] * z[i]).sum();
            let poly: C64 = terms
                .iter()
                .map(|(e, v)| v * e.iter().zip(z).map(|(&k, x)| x.powi(k)).product::<f64>())
                .sum();
            poly * (-quad + lin).exp()
        };
        let magnitude = engine.norm().max(1e-3);
        let quad = support::integrate_box(&f, &bounds, 1e-9 * magnitude);
        let rel = (engine - quad).norm() / quad.norm();
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-7, format!("100 integrands ({complex_cases} with complex form and linear term), max relative error {worst:.2e} (tol 1e-7)"))
}

fn fixtures_1d() -> Vec<(String, PolyGaussianKernel)> {
    let mut v = Vec::new();
    for level in 0..=2 {
        for beta in [0.7, 1.0, 1.6] {
            v.push((
                format!("caldeira n{level} b{beta}"),
                caldeira(level, beta).unwrap(),
            ));
        }
    }
    for (g, d) in [
        (1.0, 0.0),
        (4.4, 0.0),
        (7.0, 0.0),
        (4.4, 10.0),
        (4.3, 250.0),
    ] {
        v.push((format!("kappa g{g} d{d}"), kappa_gamma_delta(g, d).unwrap()));
    }
    v
}

fn spectral_cross_validation() -> Outcome {
    let mut worst_det = 0.0f64;
    let mut all = fixtures_1d();
    let npt = PolyGaussianKernel::gaussian(npt_two_mode(NPT_COUPLING).unwrap()).unwrap();
    all.push(("npt fixture".into(), normalize_trace(&npt).unwrap()));
    for (_, k) in &all {
        let kmax = max_order_for_degree(k.poly().degree().unwrap()).min(6);
        let m = moments(k, kmax).unwrap();
        let scale = m[0].abs().max(1.0);
        for (i, (a, b)) in elementary_symmetric(&m)
            .iter()
            .zip(elementary_symmetric_det(&m))
            .enumerate()
        {
            worst_det = worst_det.max((a - b).abs() / scale.powi(i as i32 + 1));
        }
    }
    let mut worst_ny = 0.0f64;
    let mut coarse = 0;
    for (_, k) in fixtures_1d()
        .iter()
        .filter(|(name, _)| !name.contains("d250"))
    {
        let sweep = positivity_sweep(k, 4).unwrap();
        let width = 1.0
            / min_eigenvalue(k.triple().a())
                .unwrap()
                .min(min_eigenvalue(k.triple().c()).unwrap())
                .sqrt();
        let ny = nystrom_oracle(k, 200, 7.0 * width).unwrap();
        coarse += ny.too_coarse as usize;
        let eks = support::elementary_of(&ny.eigenvalues, 4);
        for (a, b) in sweep.eks.iter().zip(&eks) {
            worst_ny = worst_ny.max((a - b).abs());
        }
    }
    outcome(
        worst_det <= 1e-10 && worst_ny <= 1e-3 && coarse == 0,
        format!("Newton vs determinant {worst_det:.2e} (tol 1e-10); engine vs Nystrom {worst_ny:.2e} (tol 1e-3), {coarse} coarse grids"),
    )
}

fn trace_identities() -> Outcome {
    let mut worst_diag = 0.0f64;
    let mut all = fixtures_1d();
    for level in 0..=2 {
        all.push((
            format!("caldeira n{level} b2.3"),
            caldeira(level, 2.3).unwrap(),
        ));
    }
    for (_, k) in &all {
        let t = moment(k, 1).unwrap();
        let w = 12.0 / min_eigenvalue(k.triple().c()).unwrap().sqrt();
        let diag =
            support::integrate_box(&|x: &[f64]| k.evaluate(x, x).unwrap(), &[(-w, w)], 1e-13);
        worst_diag = worst_diag.max((t - diag.re).abs() / t.abs());
    }
    let npt = PolyGaussianKernel::gaussian(npt_two_mode(NPT_COUPLING).unwrap()).unwrap();
    let t = moment(&npt, 1).unwrap();
    let diag = support::integrate_box(
        &|x: &[f64]| npt.evaluate(x, x).unwrap(),
        &[(-12.0, 12.0), (-12.0, 12.0)],
        1e-13,
    );
    worst_diag = worst_diag.max((t - diag.re).abs() / t.abs());

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_pt = 0.0f64;
    for i in 0..50 {
        let k = support::random_kernel(&mut rng, 2);
        let t = moment(&k, 1).unwrap();
        let reduced = integrate_out(&k, &[i % 2], true).unwrap();
        worst_pt = worst_pt.max((moment(&reduced, 1).unwrap() - t).abs() / t.abs());
    }

    let mut worst_kappa = 0.0f64;
    for g in [0.0, 1.0, 4.3, 6.1, 7.0, 12.0] {
        for d in [0.0, 10.0, 50.0, 250.0] {
            worst_kappa = worst_kappa
                .max((moment(&kappa_gamma_delta(g, d).unwrap(), 1).unwrap() - 1.0).abs());
        }
    }
    outcome(
        worst_diag <= 1e-9 && worst_pt <= 1e-9 && worst_kappa <= 1e-9,
        format!("moment(1) vs diagonal quadrature {worst_diag:.1e}; partial trace {worst_pt:.1e} on 50 kernels; kappa traces {worst_kappa:.1e} (all tol 1e-9)"),
    )
}

/// `(P_C + E − sI, B_sym, P_C − sI)` with `E ⪰ 0`: a positive Gaussian
/// triple shifted by `−s` on both diagonal blocks.
fn positive_step(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let pc = support::random_spd(rng, n, 0.1);
    let e = support::random_spd(rng, n, 0.0);
    let bs = support::random_matrix(rng, n, 0.5);
    let s = rng.random_range(0.0..0.3);
    let a: Vec<f64> = (0..n * n)
        .map(|i| pc[i] + e[i] - if i % (n + 1) == 0 { s } else { 0.0 })
        .collect();
    let c: Vec<f64> = (0..n * n)
        .map(|i| pc[i] - if i % (n + 1) == 0 { s } else { 0.0 })
        .collect();
    let b: Vec<f64> = (0..n * n)
        .map(|i| 0.5 * (bs[i] + bs[(i % n) * n + i / n]))
        .collect();
    (a, b, c)
}

fn add(g: &GaussianTriple, step: &(Vec<f64>, Vec<f64>, Vec<f64>)) -> GaussianTriple {
    let n = g.n();
    let sum = |m: &[f64], d: &[f64]| m.iter().zip(d).map(|(x, y)| x + y).collect::<Vec<_>>();
    GaussianTriple::from_row_major(
        n,
        &sum(g.a().matrix().as_slice(), &step.0),
        &sum(g.b().as_slice(), &step.1),
        &sum(g.c().matrix().as_slice(), &step.2),
    )
    .unwrap()
}

fn preorder_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fail = |name: &'static str, cond: bool| {
        *bad.entry(name).or_default() += (!cond) as usize;
    };
    let mut holding = 0;
    for i in 0..100 {
        let n = 1 + i % 2;
        let g0 = support::random_triple(&mut rng, n);
        let g1 = add(&g0, &positive_step(&mut rng, n));
        let g2 = add(&g1, &positive_step(&mut rng, n));
        let other = support::random_triple(&mut rng, n);

        fail("reflexivity", preorder_leq(&g0, &g0).unwrap().holds);
        let l01 = preorder_leq(&g0, &g1).unwrap();
        let l12 = preorder_leq(&g1, &g2).unwrap();
        fail("chain links", l01.holds && l12.holds);
        fail(
            "transitivity",
            !(l01.holds && l12.holds) || preorder_leq(&g0, &g2).unwrap().holds,
        );

        for (x, y) in [(&g0, &g1), (&g0, &other), (&other, &g2)] {
            let base = preorder_leq(x, y).unwrap();
            let r0 = base
                .witness
                .as_ref()
                .map_or_else(|| shift_floor(x, y), |w| w.r);
            for extra in [0.5, 3.0, 20.0] {
                fail(
                    "r-invariance",
                    preorder_leq_with_r(x, y, r0 + extra).unwrap().holds == base.holds,
                );
            }
            if base.holds {
                holding += 1;
                // A₁ − C₁ ⪰ A₀ − C₀ is necessary
                let d = y.a().sub(y.c()).sub(&x.a().sub(x.c()));
                fail(
                    "necessary condition",
                    min_eigenvalue(&d).unwrap() >= -1e-10 * (1.0 + d.norm()),
                );
            }
            let two_sided = base.holds && preorder_leq(y, x).unwrap().holds;
            fail("equiv", equiv(x, y).unwrap() == two_sided);
        }
        let shifted = g0.shifted(rng.random_range(0.1..50.0)).unwrap();
        fail(
            "equiv",
            equiv(&g0, &shifted).unwrap()
                && preorder_leq(&g0, &shifted).unwrap().holds
                && preorder_leq(&shifted, &g0).unwrap().holds,
        );
    }
    let total: usize = bad.values().sum();
    outcome(
        total == 0,
        format!("100 chains, {holding} holding pairs checked; counterexamples {bad:?}"),
    )
}

/// Smallest admissible shift plus one, for pairs without a witness.
fn shift_floor(x: &GaussianTriple, y: &GaussianTriple) -> f64 {
    let da = min_eigenvalue(&y.a().sub(x.a())).unwrap();
    let dc = min_eigenvalue(&y.c().sub(x.c())).unwrap();
    0f64.max(-da).max(-dc) + 1.0
}

fn entanglement_fixtures() -> Outcome {
    let g = npt_two_mode(NPT_COUPLING).unwrap();
    let b = Bipartition::new(2, &[1]).unwrap();
    let sep = gaussian_separability(&g, &b).unwrap();
    let entangled = matches!(sep, SeparabilityVerdict::Entangled { pt_max_mu } if (pt_max_mu - NPT_PT_MAX_MU).abs() < 1e-9);

    // P(x, y) = P(y, x) quadratics in (x₁, x₂, y₁, y₂)
    let polys: Vec<Vec<(Vec<u16>, C64)>> = vec![
        vec![(vec![0, 0, 0, 0], c(1.0))],
        vec![
            (vec![0, 0, 0, 0], c(1.0)),
            (vec![1, 0, 1, 0], c(1.0)),
            (vec![0, 1, 0, 1], c(1.0)),
        ],
        vec![
            (vec![2, 0, 0, 0], c(1.0)),
            (vec![0, 0, 2, 0], c(1.0)),
            (vec![0, 2, 0, 0], c(1.0)),
            (vec![0, 0, 0, 2], c(1.0)),
        ],
        vec![
            (vec![0, 0, 0, 0], c(1.0)),
            (vec![1, 1, 0, 0], c(0.5)),
            (vec![0, 0, 1, 1], c(0.5)),
            (vec![1, 0, 0, 1], c(0.5)),
            (vec![0, 1, 1, 0], c(0.5)),
        ],
    ];
    let mut certified = 0;
    for terms in &polys {
        let k = PolyGaussianKernel::new(
            MultiPoly::from_terms(2, terms.clone()).unwrap(),
            g.clone(),
            1.0,
        )
        .unwrap();
        if npt_gate(&normalize_trace(&k).unwrap(), &b, None)
            .unwrap()
            .is_npt()
        {
            certified += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst_inv, mut worst_tr) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let n = 2 + i % 2;
        let k = support::random_kernel(&mut rng, n);
        let part1: Vec<usize> = (1..=n).filter(|_| rng.random_bool(0.5)).collect();
        let part1 = if part1.is_empty() || part1.len() == n {
            vec![1]
        } else {
            part1
        };
        let b = Bipartition::new(n, &part1).unwrap();
        let pt = partial_transpose(&k, &b).unwrap();
        let back = partial_transpose(&pt, &b).unwrap();
        let dev = back.poly().poly().max_coeff_diff(k.poly().poly())
            + (back.triple().a().matrix() - k.triple().a().matrix()).max_abs()
            + (back.triple().b() - k.triple().b()).max_abs()
            + (back.triple().c().matrix() - k.triple().c().matrix()).max_abs();
        worst_inv = worst_inv.max(dev);
        let t = moment(&k, 1).unwrap();
        worst_tr = worst_tr.max((moment(&pt, 1).unwrap() - t).abs() / t.abs().max(1.0));
    }
    outcome(
        entangled && certified == polys.len() && worst_inv <= 1e-10 && worst_tr <= 1e-10,
        format!(
            "fixture {sep:?}; NPT_Certified for {certified}/{} polynomials; PT involution {worst_inv:.1e}, trace {worst_tr:.1e} on 200 kernels (tol 1e-10)",
            polys.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Z_k(delta) table", table_reproduction),
        ("delta -> infinity limits", limit_values),
        ("1-D Gaussian criterion", gaussian_1d),
        ("Mercer search on non-positive Gaussians", mercer_harness),
        ("odd-degree gate vs brute force", odd_degree_gate),
        ("Wick engine vs quadrature", wick_oracle),
        ("spectral cross-validation", spectral_cross_validation),
        ("trace identities", trace_identities),
        ("preorder axioms", preorder_axioms),
        ("entanglement fixtures", entanglement_fixtures),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += (!o.pass) as usize;
        println!(
            "{} {:>2}. {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
