//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use opjensen::fuzz::{
    random_contraction, random_hermitian, random_isometric_column, reverify, run_campaign,
    trial_rng, Flagged, FuzzReport, RandomSpec, Target,
};
use opjensen::linalg::hermitian_eig;
use opjensen::prelude::*;
use opjensen::verifiers::{rank_positive_part_check, trace_bk_check, trace_hp_check};
use rand::Rng;

const TOL: ToleranceConfig = ToleranceConfig::DEFAULT;
const DIMS: std::ops::RangeInclusive<usize> = 2..=8;
const PER_CONFIG: usize = 1000;
const CONVEX: [&str; 6] = ["abs", "square", "relu", "power_p:p=1.5", "huber:delta=1", "exp"];
const ZERO_AT_ORIGIN: [&str; 5] = ["abs", "square", "relu", "power_p:p=1.5", "huber:delta=1"];

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome { passed, summary: summary.into() }
}

fn spec(target: Target, function: &str, dim: usize, sub: usize, m: usize, trials: usize, seed: u64) -> RandomSpec {
    RandomSpec { seed, dim, subspace_dim: sub, m, function: function.into(), trials, target }
}

fn run(s: &RandomSpec) -> FuzzReport {
    run_campaign(s, &TOL, false).unwrap_or_else(|e| panic!("campaign {s:?} failed to start: {e}"))
}

/// Violations and trial errors gathered from theorem campaigns.
#[derive(Default)]
struct Tally {
    trials: usize,
    errors: usize,
    flagged: Vec<Flagged>,
}

impl Tally {
    fn absorb(&mut self, r: FuzzReport) {
        self.trials += r.trials_run;
        self.errors += r.errors.len();
        self.flagged.extend(r.violations);
    }

    fn count(&self, checks: &[&str]) -> usize {
        self.flagged.iter().filter(|f| checks.contains(&f.check.as_str())).count()
    }

    fn unknown(&self, known: &[&str]) -> usize {
        self.flagged.iter().filter(|f| !known.contains(&f.check.as_str())).count()
    }
}

/// Compression campaigns: every subspace dimension of every dim gets an equal
/// share of the trials for each function.
fn compression_tally() -> (Tally, Duration) {
    let start = Instant::now();
    let mut tally = Tally::default();
    for (fi, f) in CONVEX.iter().enumerate() {
        for dim in DIMS {
            let subs = dim - 1;
            let each = PER_CONFIG.div_ceil(subs);
            for sub in 1..dim {
                let seed = 1_000 * fi as u64 + 10 * dim as u64 + sub as u64;
                tally.absorb(run(&spec(Target::Thm1, f, dim, sub, 2, each, seed)));
            }
        }
    }
    (tally, start.elapsed())
}

fn dilation_tally() -> Tally {
    let mut tally = Tally::default();
    for (fi, f) in ZERO_AT_ORIGIN.iter().enumerate() {
        for dim in DIMS {
            tally.absorb(run(&spec(Target::Thm21, f, dim, 1, 2, PER_CONFIG, 50_000 + 100 * fi as u64 + dim as u64)));
        }
    }
    for (fi, f) in CONVEX.iter().enumerate() {
        for dim in DIMS {
            for m in 2..=4 {
                let seed = 60_000 + 100 * fi as u64 + 10 * dim as u64 + m as u64;
                tally.absorb(run(&spec(Target::Thm22, f, dim, 1, m, PER_CONFIG.div_ceil(3), seed)));
            }
            tally.absorb(run(&spec(Target::Cor23, f, dim, 1, 2, PER_CONFIG, 70_000 + 100 * fi as u64 + dim as u64)));
        }
    }
    tally
}

fn criterion_4(t: &Tally) -> Outcome {
    let known = ["certificate", "unitarity", "staircase", "fan_sums", "weyl", "trace_bk", "trace_hp", "dilation"];
    let bad = t.flagged.len() + t.errors;
    outcome(
        bad == 0,
        format!(
            "{} trials; certificate {} unitarity {} spectral {} trace {} dilation {} other {} errors {}",
            t.trials,
            t.count(&["certificate"]),
            t.count(&["unitarity"]),
            t.count(&["staircase", "fan_sums", "weyl"]),
            t.count(&["trace_bk", "trace_hp"]),
            t.count(&["dilation"]),
            t.unknown(&known),
            t.errors
        ),
    )
}

fn criterion_5() -> Outcome {
    const N: u64 = 10_000;
    let (mut bk_worst, mut hp_worst) = (f64::INFINITY, f64::INFINITY);
    let mut failures = 0;
    for i in 0..N {
        let mut rng = trial_rng(5, i);
        let dim = rng.random_range(2..=8);
        let f = ConvexFunction::parse(ZERO_AT_ORIGIN[(i % 5) as usize]).unwrap();
        let a = random_hermitian(&mut rng, dim, 1.0);
        let z = random_contraction(&mut rng, dim);
        let bk = trace_bk_check(&a, &z, &f, TOL.order).unwrap();
        bk_worst = bk_worst.min(bk.worst_margin);

        let f = ConvexFunction::parse(CONVEX[(i % 6) as usize]).unwrap();
        let m = rng.random_range(2..=4);
        let zs = random_isometric_column(&mut rng, dim, m).unwrap();
        let as_: Vec<HermitianMatrix> = (0..m).map(|_| random_hermitian(&mut rng, dim, 1.0)).collect();
        let hp = trace_hp_check(&as_, &zs, &f, TOL.order).unwrap();
        hp_worst = hp_worst.min(hp.worst_margin);
        failures += usize::from(!bk.passed) + usize::from(!hp.passed);
    }
    outcome(
        failures == 0 && bk_worst >= -1e-8 && hp_worst >= -1e-8,
        format!("{N} contraction + {N} column instances; worst slack {bk_worst:.3e} / {hp_worst:.3e}; {failures} failures"),
    )
}

fn criterion_6() -> Outcome {
    const N: u64 = 10_000;
    let mut failures = 0;
    let mut bounded = 0;
    for i in 0..N {
        let mut rng = trial_rng(6, i);
        let dim = rng.random_range(2..=8);
        // Low-rank positive parts make the inequality tight.
        let a = random_hermitian(&mut rng, dim, 1.0).shift(-rng.random_range(0.0..2.0));
        let b = random_hermitian(&mut rng, dim, 1.0).shift(-rng.random_range(0.0..2.0));
        let r = rank_positive_part_check(&a, &b, 1e-8).unwrap();
        failures += usize::from(!r.passed);
        bounded += usize::from(r.worst_margin == 0.0);
    }
    outcome(failures == 0, format!("{N} pairs, {failures} violations, {bounded} tight"))
}

fn criterion_7() -> Outcome {
    let mut worst_root = 0f64;
    for i in 0..10_000u64 {
        let mut rng = trial_rng(7, i);
        let scale = rng.random_range(0.1..10.0);
        let a = random_hermitian(&mut rng, 2, scale);
        let m = a.matrix();
        let (p, q, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].norm());
        let mid = 0.5 * (p + q);
        let rad = (0.25 * (p - q) * (p - q) + b * b).sqrt();
        let ev = hermitian_eig(&a).unwrap().eigenvalues;
        let err = (ev[0] - (mid + rad)).abs().max((ev[1] - (mid - rad)).abs()) / a.frobenius_norm().max(1.0);
        worst_root = worst_root.max(err);
    }
    let mut worst_rec = 0f64;
    for i in 0..1_000u64 {
        let mut rng = trial_rng(77, i);
        let dim = rng.random_range(1..=8);
        let a = random_hermitian(&mut rng, dim, 1.0);
        let dec = hermitian_eig(&a).unwrap();
        let r = dec.reconstruct().sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        worst_rec = worst_rec.max(r);
    }
    outcome(
        worst_root <= 1e-10 && worst_rec <= 1e-9,
        format!("2x2 root error {worst_root:.2e}, reconstruction error {worst_rec:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, f) in ["abs", "square"].iter().enumerate() {
        let r = run(&spec(Target::Ineq5, f, 4, 1, 2, 10_000, 80 + k as u64));
        ok &= r.violations.is_empty() && r.errors.is_empty() && r.trials_run == 10_000;
        lines.push(format!("{f}: {} violations {} errors", r.violations.len(), r.errors.len()));
    }
    outcome(ok, lines.join("; "))
}

fn criterion_9() -> Outcome {
    let specs = [
        spec(Target::Thm1, "abs", 6, 3, 2, 1000, 7),
        spec(Target::Thm22, "power_p:p=1.5", 4, 1, 3, 500, 9),
        spec(Target::Q15, "neg", 4, 2, 2, 2000, 1),
        spec(Target::Ineq5, "exp", 4, 1, 2, 2000, 2),
    ];
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut same = 0;
    for s in &specs {
        let first = run(s).to_json();
        let second = run(s).to_json();
        let threaded = pool.install(|| run(s)).to_json();
        same += usize::from(first == second && first == threaded);
    }
    outcome(same == specs.len(), format!("{same}/{} campaigns byte-identical across repeats and thread counts", specs.len()))
}

fn criterion_10() -> Outcome {
    let probes = [
        spec(Target::Q15, "neg", 4, 2, 2, 10_000, 1),
        spec(Target::Q15, "sqrt_shifted:shift=20", 4, 2, 2, 10_000, 3),
        spec(Target::Ineq5, "exp", 4, 1, 2, 10_000, 2),
        spec(Target::Ineq5, "relu:shift=0.5", 3, 1, 2, 10_000, 4),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for s in &probes {
        let start = Instant::now();
        let r = run(s);
        let secs = start.elapsed().as_secs_f64();
        let mut worst = 0f64;
        let mut checked = 0;
        for flag in r.violations.iter().chain(&r.near_misses) {
            let reloaded: Flagged = serde_json::from_str(&serde_json::to_string(flag).unwrap()).unwrap();
            let m = reverify(&reloaded, &TOL).unwrap();
            worst = worst.max((m - flag.margin).abs());
            checked += 1;
        }
        ok &= r.status == "OPEN" && r.trials_run == 10_000 && secs < 60.0 && worst <= 1e-12 && checked > 0;
        parts.push(format!(
            "{} {}: {} in {secs:.1}s, {} flagged, {checked} replayed (max drift {worst:.1e})",
            s.target,
            s.function,
            r.status,
            r.violations.len()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |n: usize| filter.is_empty() || filter.iter().any(|f| f == &n.to_string());

    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    if wanted(1) || wanted(2) || wanted(3) {
        let (t, elapsed) = compression_tally();
        let secs = elapsed.as_secs_f64();
        let cert = t.count(&["certificate", "unitarity"]);
        results.push((
            1,
            "compression certificates",
            outcome(
                cert == 0 && t.errors == 0 && secs < 120.0,
                format!("{} trials in {secs:.1}s, {cert} certificate/unitarity violations, {} errors", t.trials, t.errors),
            ),
        ));
        let stair = t.count(&["staircase"]);
        results.push((2, "staircase", outcome(stair == 0, format!("{stair} violations"))));
        let (fan, weyl) = (t.count(&["fan_sums"]), t.count(&["weyl"]));
        let trace = t.count(&["trace_compression"]);
        results.push((
            3,
            "fan and weyl consequences",
            outcome(fan + weyl == 0, format!("fan {fan}, weyl {weyl} violations (trace {trace})")),
        ));
    }
    if wanted(4) {
        results.push((4, "contraction, column and midpoint certificates", criterion_4(&dilation_tally())));
    }
    let rest: [(usize, &str, fn() -> Outcome); 6] = [
        (5, "trace inequalities", criterion_5),
        (6, "rank of positive parts", criterion_6),
        (7, "eigensolver oracles", criterion_7),
        (8, "midpoint conditions for even functions", criterion_8),
        (9, "determinism", criterion_9),
        (10, "open-question probes", criterion_10),
    ];
    for (n, name, run) in rest {
        if wanted(n) {
            results.push((n, name, run()));
        }
    }

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {tag}  {name}: {}", o.summary);
        failed += usize::from(!o.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
