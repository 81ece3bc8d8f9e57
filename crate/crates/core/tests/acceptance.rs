//! Acceptance criteria, one `PASS`/`FAIL` line each. Runs without the libtest
//! harness; exits nonzero if any criterion fails.
//!
//! The extended bulk run (n = 2000, 5000 trials, halved thresholds) is skipped
//! unless `--ignored`, `--include-ignored` or `RDM_EXTENDED=1` is given.

mod common;

use std::time::{Duration, Instant};

use common::{bisect_eigenvalue, random_hermitian};
use rdm_core::experiment::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult};
use rdm_core::laws::{entropy_limit, MpLaw};
use rdm_core::linalg::{hermitian_eigenvalues, trace};
use rdm_core::output::{render_csv, render_json};
use rdm_core::sampling::{sample_matrix, EntryDistribution, SeedSpec, Xoshiro256StarStar};
use rdm_core::spectra::stieltjes_rescaling_check;
use rdm_core::tracywidom::{solve_hastings_mcleod, tw2_cdf, tw2_fredholm_oracle, Tw2Params};

const SEED: u64 = 42;

/// KS distance of the largest-edge run at [`SEED`], recorded when the
/// threshold of 0.06 was set.
const EDGE_PILOT_KS: f64 = 0.0429;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        println!("{} criterion {id}: {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed <= Duration::from_secs(budget_secs)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn run(kind: ExperimentKind, n: usize, c: f64, trials: usize, dist: EntryDistribution, workers: usize) -> ExperimentResult {
    let mut config = ExperimentConfig::new(kind, n, c);
    config.trials = trials;
    config.distribution = dist;
    config.master_seed = SEED;
    config.workers = workers;
    run_experiment(&config).unwrap_or_else(|e| panic!("{kind:?} run failed: {e}"))
}

fn bulk(workers: usize) -> ExperimentResult {
    run(ExperimentKind::Bulk, 500, 0.5, 200, EntryDistribution::QuaternaryRademacher, workers)
}

fn largest_edge(workers: usize) -> ExperimentResult {
    run(ExperimentKind::LargestEdge, 400, 0.5, 1000, EntryDistribution::ComplexGaussian, workers)
}

fn entropy_half(workers: usize) -> ExperimentResult {
    run(ExperimentKind::Entropy, 1000, 0.5, 50, EntryDistribution::ComplexGaussian, workers)
}

fn entropy_square(workers: usize) -> ExperimentResult {
    run(ExperimentKind::Entropy, 1000, 1.0, 50, EntryDistribution::ComplexGaussian, workers)
}

fn stieltjes_identity(report: &mut Report) {
    let (worst, elapsed) = timed(|| {
        let mut rng = Xoshiro256StarStar::seed_from_u64(SEED);
        let dists = [
            EntryDistribution::ComplexGaussian,
            EntryDistribution::QuaternaryRademacher,
            EntryDistribution::UnitCircle,
        ];
        let mut worst: f64 = 0.0;
        for case in 0..100u64 {
            let p = 1 + (rng.next_u64() % 50) as usize;
            let n = 1 + (rng.next_u64() % 50) as usize;
            let eps = 0.1 + 9.9 * rng.next_f64();
            let x = sample_matrix(p, n, dists[case as usize % 3], SeedSpec::new(SEED, case)).unwrap();
            let (lhs, rhs) = stieltjes_rescaling_check(&x, eps).unwrap();
            worst = worst.max((lhs - rhs).abs() / lhs.abs());
        }
        worst
    });
    report.line(
        "1",
        "Stieltjes rescaling identity",
        worst < 1e-12 && within(elapsed, 5),
        format!("max relative gap {worst:.3e} (< 1e-12), {:.1} s (< 5 s)", elapsed.as_secs_f64()),
    );
}

fn bulk_law(report: &mut Report, result: &ExperimentResult, elapsed: Duration, thresholds: (f64, f64), budget: u64) {
    let ks = result.aggregates.ks_distance.unwrap();
    let l1 = result.aggregates.l1_distance.unwrap();
    report.line(
        "2",
        "bulk Marchenko-Pastur law",
        ks < thresholds.0 && l1 < thresholds.1 && within(elapsed, budget),
        format!(
            "KS {ks:.5} (< {}), L1 {l1:.5} (< {}), {:.1} s (< {budget} s)",
            thresholds.0,
            thresholds.1,
            elapsed.as_secs_f64()
        ),
    );
}

fn edge_law(report: &mut Report, result: &ExperimentResult, elapsed: Duration) {
    let ks = result.aggregates.ks_distance.unwrap();
    report.line(
        "3",
        "largest-edge Tracy-Widom law",
        ks < 0.06 && within(elapsed, 300),
        format!(
            "KS {ks:.5} (< 0.06, pilot {EDGE_PILOT_KS}), {:.1} s (< 300 s)",
            elapsed.as_secs_f64()
        ),
    );
    let c: f64 = 0.5;
    let (upper, lower) = ((c.sqrt() + 1.0).powi(2), (c.sqrt() - 1.0).powi(2));
    let largest = result.aggregates.mean_largest_scaled;
    let smallest = result.aggregates.mean_smallest_scaled;
    report.line(
        "4",
        "edge locations",
        (largest - upper).abs() < 0.15 && (smallest - lower).abs() < 0.05,
        format!(
            "mean cn*lambda_1 {largest:.4} (target {upper:.4} +- 0.15), mean cn*lambda_p {smallest:.4} (target {lower:.4} +- 0.05)"
        ),
    );
}

fn entropy(report: &mut Report, half: &ExperimentResult, square: &ExperimentResult, elapsed: Duration) {
    let limit = entropy_limit(0.5).unwrap();
    let mean_half = half.aggregates.mean_entropy_minus_log_n;
    let mean_square = square.aggregates.mean_entropy_minus_log_n;
    let ratio = square.aggregates.entropy_ratio;
    let ok = (mean_half - limit).abs() < 0.02
        && (mean_square + 0.5).abs() < 0.02
        && (0.9..=1.02).contains(&ratio)
        && within(elapsed, 180);
    report.line(
        "5",
        "entropy limit",
        ok,
        format!(
            "c=0.5: {mean_half:.5} vs {limit:.5}; c=1: {mean_square:.5} vs -0.5; H/ln n {ratio:.4} in [0.9, 1.02]; {:.1} s (< 180 s)",
            elapsed.as_secs_f64()
        ),
    );
}

fn tracy_widom(report: &mut Report) {
    let ((gap, ratios), elapsed) = timed(|| {
        let gap = (-5..=2)
            .map(|s| (tw2_cdf(s as f64) - tw2_fredholm_oracle(s as f64, 80).unwrap()).abs())
            .fold(0.0, f64::max);
        let at_minus_four = |step: f64| {
            let sol = solve_hastings_mcleod(Tw2Params { s_max: 8.0, s_min: -4.0, step }).unwrap();
            *sol.log_f2.last().unwrap()
        };
        let v: Vec<f64> = [0.02, 0.01, 0.005, 0.0025].iter().map(|&h| at_minus_four(h)).collect();
        let ratios: Vec<f64> = (0..2).map(|i| (v[i] - v[i + 1]).abs() / (v[i + 1] - v[i + 2]).abs()).collect();
        (gap, ratios)
    });
    let ok = gap <= 1e-6 && ratios.iter().all(|r| (12.0..=20.0).contains(r)) && within(elapsed, 30);
    report.line(
        "6",
        "Tracy-Widom evaluator",
        ok,
        format!(
            "max |F2 - Fredholm| {gap:.2e} (<= 1e-6), halving ratios {:.2}, {:.2} (in [12, 20]), {:.1} s (< 30 s)",
            ratios[0],
            ratios[1],
            elapsed.as_secs_f64()
        ),
    );
}

fn mp_consistency(report: &mut Report) {
    let ((norm, mean, ent), elapsed) = timed(|| {
        let mut norm: f64 = 0.0;
        let mut mean: f64 = 0.0;
        for c in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let law = MpLaw::new(c).unwrap();
            norm = norm.max((law.atom_mass + law.integrate(|_| 1.0).unwrap() - 1.0).abs());
            mean = mean.max((law.moment(1).unwrap() - 1.0).abs());
        }
        let ent = [0.1, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&c: &f64| (entropy_limit(c).unwrap() - (c.ln() - c / 2.0)).abs())
            .fold(0.0, f64::max);
        (norm, mean, ent)
    });
    report.line(
        "7",
        "Marchenko-Pastur consistency",
        norm < 1e-8 && mean < 1e-8 && ent < 1e-8 && within(elapsed, 5),
        format!(
            "normalization {norm:.1e}, mean {mean:.1e}, entropy {ent:.1e} (each < 1e-8), {:.2} s (< 5 s)",
            elapsed.as_secs_f64()
        ),
    );
}

fn eigensolver(report: &mut Report) {
    let mut rng = Xoshiro256StarStar::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let a = random_hermitian(2 + case % 11, &mut rng);
        let eig = hermitian_eigenvalues(&a).unwrap();
        for (k, &value) in eig.ascending().iter().enumerate() {
            worst = worst.max((value - bisect_eigenvalue(&a, k)).abs());
        }
    }
    let mut trace_gap: f64 = 0.0;
    for n in [2, 50, 200, 500] {
        let a = random_hermitian(n, &mut rng);
        let sum = hermitian_eigenvalues(&a).unwrap().sum();
        trace_gap = trace_gap.max((sum - trace(&a).unwrap().re).abs());
    }
    report.line(
        "8",
        "eigensolver",
        worst < 1e-8 && trace_gap < 1e-10,
        format!("max root error {worst:.2e} (< 1e-8), max trace gap {trace_gap:.2e} (< 1e-10)"),
    );
}

fn determinism(report: &mut Report, serial: &[&ExperimentResult], parallel: &[ExperimentResult]) {
    let bytes = |r: &ExperimentResult| (render_json(r).unwrap(), render_csv(r).unwrap());
    let identical = serial.iter().zip(parallel).filter(|(a, b)| bytes(a) == bytes(b)).count();
    report.line(
        "9",
        "determinism across workers 1 and 8",
        identical == serial.len(),
        format!("{identical}/{} runs byte-identical in JSON and CSV", serial.len()),
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let extended = args.iter().any(|a| a == "--ignored" || a == "--include-ignored")
        || std::env::var("RDM_EXTENDED").is_ok_and(|v| v == "1");
    let mut report = Report { failures: 0 };

    stieltjes_identity(&mut report);

    let (bulk_run, bulk_time) = timed(|| bulk(1));
    bulk_law(&mut report, &bulk_run, bulk_time, (0.02, 0.05), 120);

    let (edge_run, edge_time) = timed(|| largest_edge(1));
    edge_law(&mut report, &edge_run, edge_time);

    let ((half, square), entropy_time) = timed(|| (entropy_half(1), entropy_square(1)));
    entropy(&mut report, &half, &square, entropy_time);

    tracy_widom(&mut report);
    mp_consistency(&mut report);
    eigensolver(&mut report);

    let parallel = [bulk(8), largest_edge(8), entropy_half(8), entropy_square(8)];
    determinism(&mut report, &[&bulk_run, &edge_run, &half, &square], &parallel);

    if extended {
        let (run, elapsed) =
            timed(|| run(ExperimentKind::Bulk, 2000, 0.5, 5000, EntryDistribution::QuaternaryRademacher, 8));
        bulk_law(&mut report, &run, elapsed, (0.01, 0.025), u64::MAX);
    } else {
        println!("SKIP criterion 2 (extended n = 2000): pass --include-ignored or set RDM_EXTENDED=1");
    }

    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
