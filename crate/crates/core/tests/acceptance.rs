//! Acceptance criteria. Prints one line per criterion and exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use dpt::approx_lp::{approx_degree, threshold_degree};
use dpt::boolean_core::linalg::kron;
use dpt::boolean_core::{PartialBooleanFunction, PartialSignMatrix};
use dpt::factor_norms::{gamma2_dual, gamma2_eps, gamma2_sign, NormConfig};
use dpt::rational::ratio;
use dpt::theorem_bench::{check_kkl, check_pk, run_suite, Status, SuiteConfig, VerificationReport};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn all_pass(reports: &[VerificationReport]) -> Outcome {
    let bad: Vec<&str> = reports.iter().filter(|r| r.status != Status::Pass).map(|r| r.id.as_str()).collect();
    outcome(bad.is_empty() && !reports.is_empty(), format!("{} reports, failing: {bad:?}", reports.len()))
}

fn closed_form_norms() -> Outcome {
    let cfg = NormConfig::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 1..=4 {
        let h = PartialSignMatrix::hadamard(k);
        let root = ((1usize << k) as f64).sqrt();
        for (num, den) in [(0, 1), (1, 4), (1, 2)] {
            let eps = num as f64 / den as f64;
            for (name, f, expected) in [
                (format!("H{}", 1 << k), &h, (1.0 - eps) * root),
                (format!("J{}", 1 << k), &PartialSignMatrix::all_ones(1 << k, 1 << k), 1.0 - eps),
            ] {
                let cert = if eps == 0.0 { gamma2_sign(f, &cfg) } else { gamma2_eps(f, eps, &cfg) };
                let Ok(cert) = cert else {
                    failures.push(format!("{name}@{num}/{den}: solver error"));
                    continue;
                };
                let rel = (cert.value - expected).abs() / expected;
                worst = worst.max(rel);
                if rel > 1e-6 || cert.relative_gap() > 1e-6 {
                    failures.push(format!("{name}@{num}/{den}: {} vs {expected}", cert.value));
                }
            }
        }
    }
    let j35 = gamma2_sign(&PartialSignMatrix::all_ones(3, 5), &cfg).map(|c| (c.value - 1.0).abs()).unwrap_or(1.0);
    if j35 > 1e-6 {
        failures.push("J3x5".into());
    }
    outcome(failures.is_empty(), format!("max relative error {worst:.2e}, failures {failures:?}"))
}

fn multiplicativity() -> Outcome {
    let cfg = NormConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut m = || {
            let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
        };
        let (a, b) = (m(), m());
        let (Ok(ca), Ok(cb), Ok(cab)) = (gamma2_dual(&a, &cfg), gamma2_dual(&b, &cfg), gamma2_dual(&kron(&a, &b), &cfg))
        else {
            return outcome(false, "solver error");
        };
        let rhs = ca.value * cb.value;
        worst = worst.max((cab.value - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    outcome(worst <= 1e-5, format!("50 pairs, max relative deviation {worst:.2e}"))
}

fn exact_degrees() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=4 {
        for eps in [ratio(0, 1), ratio(1, 3), ratio(1, 2), ratio(3, 4)] {
            match approx_degree(&PartialBooleanFunction::parity(n), &eps) {
                Ok(r) if r.degree == n && r.primal_ok && r.dual_ok => {}
                _ => bad.push(format!("parity{n}@{eps}")),
            }
        }
    }
    match approx_degree(&PartialBooleanFunction::constant(3, 1), &ratio(1, 3)) {
        Ok(r) if r.degree == 0 && r.primal_ok && r.dual_ok => {}
        _ => bad.push("constant".into()),
    }
    match threshold_degree(&PartialBooleanFunction::majority(3)) {
        Ok(r) if r.degree == 1 && r.primal_ok && r.dual_ok => {}
        _ => bad.push("maj3 threshold".into()),
    }
    outcome(bad.is_empty(), format!("18 instances, failures {bad:?}"))
}

fn symmetric_polynomial_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let etas = [ratio(1, 10), ratio(1, 4), ratio(2, 5)];
    let mut reports = Vec::new();
    for n in 1..=8 {
        for k in 0..n {
            match check_pk(n, k, &etas, 10_000, &mut rng) {
                Ok(r) => reports.extend(r),
                Err(e) => return outcome(false, format!("n={n}, k={k}: {e}")),
            }
        }
    }
    all_pass(&reports)
}

fn witness_chain(config: &SuiteConfig) -> Outcome {
    let report = run_suite(&SuiteConfig { only: vec!["witness_chain".into(), "composed_degree".into()], ..config.clone() });
    let relevant: Vec<VerificationReport> = report
        .reports
        .into_iter()
        .filter(|r| r.id.starts_with("witness_chain") || (r.id.contains("witness") && r.status != Status::Skipped))
        .collect();
    let exact = relevant.iter().all(|r| r.tolerance == 0.0);
    let mut o = all_pass(&relevant);
    o.ok &= exact;
    o
}

fn theorem_suite(config: &SuiteConfig) -> Outcome {
    let report = run_suite(config);
    let s = &report.summary;
    outcome(
        s.failed == 0 && s.passed > 0,
        format!("{} pass, {} fail, {} recorded, skipped {:?}, failing {:?}", s.passed, s.failed, s.recorded, s.skipped_ids, s.failed_ids),
    )
}

fn closed_form_parity() -> Outcome {
    let reports: Vec<VerificationReport> = (1..=20).flat_map(|n| (0..=n).map(move |l| check_kkl(n, l))).collect();
    all_pass(&reports)
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_dpt"))
            .args(["verify", "--all", "--seed", "7"])
            .env_remove("DPT_JOBS")
            .output()
            .map(|o| (o.status.code(), o.stdout))
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) => outcome(a == b && a.0 == Some(0), format!("{} bytes, identical: {}", a.1.len(), a.1 == b.1)),
        _ => outcome(false, "binary failed to run"),
    }
}

fn main() {
    let config = SuiteConfig { seed: 7, ..SuiteConfig::default() };
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("closed-form norm values", Duration::from_secs(30), Box::new(closed_form_norms)),
        ("dual-norm multiplicativity", Duration::from_secs(120), Box::new(multiplicativity)),
        ("exact LP degrees", Duration::from_secs(120), Box::new(exact_degrees)),
        ("symmetric polynomial suite", Duration::from_secs(120), Box::new(symmetric_polynomial_suite)),
        ("witness chain", Duration::from_secs(300), Box::new({
            let c = config.clone();
            move || witness_chain(&c)
        })),
        ("theorem-instance suite", Duration::from_secs(900), Box::new({
            let c = config.clone();
            move || theorem_suite(&c)
        })),
        ("parity closed form", Duration::from_secs(30), Box::new(closed_form_parity)),
        ("determinism", Duration::from_secs(1800), Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let ok = o.ok && elapsed <= *budget;
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} {name} ({:.1}s of {}s) {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
