//! Monte Carlo experiments: configuration, per-trial records, aggregates and
//! the parallel runner.
//!
//! Every trial draws its matrix from a seed derived from `(master_seed,
//! trial_index)` and records are merged in trial order, so results do not
//! depend on the number of workers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{entropy_limit, MpLaw};
use crate::sampling::{gram_spectrum, sample_matrix, DensitySpectrum, EntryDistribution, SeedSpec};
use crate::spectra::{
    histogram_density, ks_distance, ks_distance_with, largest_statistic, rescaling_sides, scaled_spectrum,
    smallest_statistic, von_neumann_entropy, EdgeSignConvention,
};
use crate::tracywidom::{Tw2Table, TracyWidom};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Histogram range is `[0, HISTOGRAM_HEADROOM * x+]`.
pub const HISTOGRAM_HEADROOM: f64 = 1.1;
pub const DEFAULT_EPS_LIST: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Bulk,
    LargestEdge,
    SmallestEdge,
    Entropy,
    StieltjesIdentity,
}

impl ExperimentKind {
    pub fn is_edge(self) -> bool {
        matches!(self, Self::LargestEdge | Self::SmallestEdge)
    }
}

fn default_workers() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub distribution: EntryDistribution,
    pub master_seed: u64,
    pub bins: usize,
    pub eps_list: Vec<f64>,
    pub output_path: Option<String>,
    /// Not serialized: the worker count never changes results.
    #[serde(skip_serializing, default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub edge_sign_convention: EdgeSignConvention,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: usize, c: f64) -> Self {
        Self {
            kind,
            n,
            c,
            trials: 100,
            distribution: EntryDistribution::ComplexGaussian,
            master_seed: 0,
            bins: 60,
            eps_list: DEFAULT_EPS_LIST.to_vec(),
            output_path: None,
            workers: 1,
            edge_sign_convention: EdgeSignConvention::Verbatim,
        }
    }

    /// `round(c n)`, ties to even.
    pub fn p(&self) -> usize {
        (self.c * self.n as f64).round_ties_even() as usize
    }

    pub fn realized_ratio(&self) -> f64 {
        self.p() as f64 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return fail(format!("c must be positive, got {}", self.c));
        }
        if self.p() < 1 {
            return fail(format!("derived p = round({} * {}) = 0 is invalid", self.c, self.n));
        }
        if self.trials < 1 {
            return fail("trials must be at least 1".into());
        }
        if self.workers < 1 {
            return fail("workers must be at least 1".into());
        }
        if self.kind == ExperimentKind::Bulk && self.bins < 1 {
            return fail("bins must be at least 1".into());
        }
        if self.kind == ExperimentKind::StieltjesIdentity
            && (self.eps_list.is_empty() || self.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())))
        {
            return fail("eps list must be nonempty and positive".into());
        }
        if self.kind == ExperimentKind::SmallestEdge && (self.realized_ratio().sqrt() - 1.0).abs() < 1e-3 {
            return fail(format!(
                "hard-edge regime r = {}: smallest-eigenvalue scaling is degenerate",
                self.realized_ratio()
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub gram_trace: f64,
    /// `c n lambda_1`.
    pub largest_scaled: f64,
    /// `c n lambda_min` over the `min(p, n)` nonzero eigenvalues.
    pub smallest_scaled: f64,
    pub entropy_minus_log_n: f64,
    pub edge_statistic: Option<f64>,
    pub stieltjes_max_gap: Option<f64>,
    /// Bulk runs only.
    pub scaled_eigenvalues: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkHistogram {
    pub edges: Vec<f64>,
    pub empirical_density: Vec<f64>,
    /// Average Marchenko-Pastur density over each bin, atom included.
    pub mp_density: Vec<f64>,
    pub overflow: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub p: usize,
    pub realized_r: f64,
    pub mean_largest_scaled: f64,
    pub mean_smallest_scaled: f64,
    pub mean_entropy_minus_log_n: f64,
    /// `mean(H) / ln n`.
    pub entropy_ratio: f64,
    pub statistic_mean: Option<f64>,
    pub statistic_variance: Option<f64>,
    pub ks_distance: Option<f64>,
    pub l1_distance: Option<f64>,
    pub histogram: Option<BulkHistogram>,
    pub entropy_limit: Option<f64>,
    pub entropy_deviation: Option<f64>,
    pub max_stieltjes_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub tw2_table_sha256: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub per_trial: Vec<TrialRecord>,
    pub aggregates: Aggregates,
    pub provenance: Provenance,
}

fn run_trial(config: &ExperimentConfig, trial_index: usize) -> Result<TrialRecord> {
    let (p, n) = (config.p(), config.n);
    let x = sample_matrix(p, n, config.distribution, SeedSpec::new(config.master_seed, trial_index as u64))?;
    let (values, trace) = gram_spectrum(&x)?;
    let ds = DensitySpectrum::from_lambdas(values.iter().map(|v| v / trace).collect(), n, trace)?;
    let cn = config.c * n as f64;
    let entropy_minus_log_n = von_neumann_entropy(&ds) - (n as f64).ln();
    let edge_statistic = match config.kind {
        ExperimentKind::LargestEdge => Some(largest_statistic(&ds, config.c).value),
        ExperimentKind::SmallestEdge => Some(smallest_statistic(&ds, config.c, config.edge_sign_convention)?.value),
        _ => None,
    };
    let stieltjes_max_gap = if config.kind == ExperimentKind::StieltjesIdentity {
        let mut gap: f64 = 0.0;
        for &eps in &config.eps_list {
            let (lhs, rhs) = rescaling_sides(&values, trace, n, eps)?;
            gap = gap.max((lhs - rhs).abs() / lhs.abs());
        }
        Some(gap)
    } else {
        None
    };
    let scaled_eigenvalues = (config.kind == ExperimentKind::Bulk).then(|| scaled_spectrum(&ds, config.c).values);
    Ok(TrialRecord {
        trial_index,
        gram_trace: trace,
        largest_scaled: cn * ds.largest(),
        smallest_scaled: cn * ds.smallest_nonzero_part(),
        entropy_minus_log_n,
        edge_statistic,
        stieltjes_max_gap,
        scaled_eigenvalues,
    })
}

/// Runs all trials on a pool of `config.workers` threads.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let table = if config.kind.is_edge() {
        Some(TracyWidom::load_or_build()?)
    } else {
        None
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<TrialRecord>> = pool.install(|| {
        use rayon::prelude::*;
        (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect()
    });
    let mut per_trial = Vec::with_capacity(config.trials);
    for (trial_index, outcome) in outcomes.into_iter().enumerate() {
        per_trial.push(outcome.map_err(|e| Error::Trial {
            trial_index,
            source: Box::new(e),
        })?);
    }
    let table = table.as_ref().map(|t| t.table()).transpose()?;
    let aggregates = compute_aggregates(config, &per_trial, table)?;
    Ok(ExperimentResult {
        per_trial,
        aggregates,
        provenance: Provenance {
            config: config.clone(),
            library_version: LIBRARY_VERSION.to_string(),
            tw2_table_sha256: table.map(Tw2Table::checksum),
        },
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, k), v| (s + v, k + 1));
    sum / count as f64
}

/// Unbiased sample variance; `None` for fewer than two values.
fn variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values.iter().copied());
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some(ss / (values.len() - 1) as f64)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Edge statistics in trial order, sorted, for goodness of fit.
pub fn sorted_edge_statistics(per_trial: &[TrialRecord]) -> Result<Vec<f64>> {
    let values: Option<Vec<f64>> = per_trial.iter().map(|r| r.edge_statistic).collect();
    values
        .map(sorted)
        .ok_or_else(|| Error::Config("edge statistic missing from a trial record".into()))
}

/// Recomputes every aggregate from the per-trial records. `table` is required
/// for edge runs.
pub fn compute_aggregates(
    config: &ExperimentConfig,
    per_trial: &[TrialRecord],
    table: Option<&Tw2Table>,
) -> Result<Aggregates> {
    if per_trial.is_empty() {
        return Err(Error::EmptySample);
    }
    let log_n = (config.n as f64).ln();
    let mean_entropy_minus_log_n = mean(per_trial.iter().map(|r| r.entropy_minus_log_n));
    let mut agg = Aggregates {
        p: config.p(),
        realized_r: config.realized_ratio(),
        mean_largest_scaled: mean(per_trial.iter().map(|r| r.largest_scaled)),
        mean_smallest_scaled: mean(per_trial.iter().map(|r| r.smallest_scaled)),
        mean_entropy_minus_log_n,
        entropy_ratio: (mean_entropy_minus_log_n + log_n) / log_n,
        statistic_mean: None,
        statistic_variance: None,
        ks_distance: None,
        l1_distance: None,
        histogram: None,
        entropy_limit: None,
        entropy_deviation: None,
        max_stieltjes_gap: None,
    };
    match config.kind {
        ExperimentKind::Bulk => {
            let pooled: Vec<f64> = per_trial
                .iter()
                .map(|r| r.scaled_eigenvalues.as_deref().ok_or(Error::EmptySample))
                .collect::<Result<Vec<_>>>()?
                .concat();
            let pooled = sorted(pooled);
            let law = MpLaw::new(config.c)?;
            agg.ks_distance = Some(ks_distance_with(&pooled, |x| law.cdf(x))?);
            let (hist, l1) = bulk_histogram(&pooled, &law, config.bins)?;
            agg.l1_distance = Some(l1);
            agg.histogram = Some(hist);
        }
        ExperimentKind::LargestEdge | ExperimentKind::SmallestEdge => {
            let table = table.ok_or(Error::TableNotBuilt)?;
            let stats = sorted_edge_statistics(per_trial)?;
            agg.ks_distance = Some(ks_distance(&stats, |s| table.cdf(s))?);
            let in_order: Vec<f64> = per_trial.iter().filter_map(|r| r.edge_statistic).collect();
            agg.statistic_mean = Some(mean(in_order.iter().copied()));
            agg.statistic_variance = variance(&in_order);
        }
        ExperimentKind::Entropy => {
            let limit = entropy_limit(config.c)?;
            let values: Vec<f64> = per_trial.iter().map(|r| r.entropy_minus_log_n).collect();
            agg.statistic_mean = Some(mean_entropy_minus_log_n);
            agg.statistic_variance = variance(&values);
            agg.entropy_limit = Some(limit);
            agg.entropy_deviation = Some(mean_entropy_minus_log_n - limit);
        }
        ExperimentKind::StieltjesIdentity => {
            let gaps: Vec<f64> = per_trial.iter().filter_map(|r| r.stieltjes_max_gap).collect();
            agg.statistic_mean = Some(mean(gaps.iter().copied()));
            agg.statistic_variance = variance(&gaps);
            agg.max_stieltjes_gap = Some(gaps.iter().copied().fold(0.0, f64::max));
        }
    }
    Ok(agg)
}

/// Histogram of the pooled scaled eigenvalues on `[0, 1.1 x+]` and its L1
/// distance to `nu_c`, `sum_i |count_i / N - nu_c(bin_i)|` plus the mismatch of
/// the mass outside the range.
fn bulk_histogram(pooled: &[f64], law: &MpLaw, bins: usize) -> Result<(BulkHistogram, f64)> {
    let hist = histogram_density(pooled, bins, (0.0, HISTOGRAM_HEADROOM * law.x_plus))?;
    let total = hist.total() as f64;
    let mut l1 = 0.0;
    let mut law_inside = 0.0;
    let mut mp_density = Vec::with_capacity(bins);
    // The first bin is closed on the left, so it holds the atom at zero.
    let mut prev = 0.0;
    for (i, &count) in hist.counts.iter().enumerate() {
        let next = law.cdf(hist.edges[i + 1])?;
        let mass = next - prev;
        mp_density.push(mass / (hist.edges[i + 1] - hist.edges[i]));
        l1 += (count as f64 / total - mass).abs();
        law_inside += mass;
        prev = next;
    }
    l1 += (hist.overflow as f64 / total - (1.0 - law_inside)).abs();
    Ok((
        BulkHistogram {
            edges: hist.edges,
            empirical_density: hist.heights,
            mp_density,
            overflow: hist.overflow,
        },
        l1,
    ))
}
