//! Statistics of a sampled density spectrum: the `cn`-scaled empirical
//! measure, soft-edge statistics, Stieltjes transforms, entropy and
//! goodness-of-fit measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::sampling::{gram_spectrum, DensitySpectrum};

/// Below this `|sqrt(r) - 1|` the smallest-edge scaling is degenerate.
pub const HARD_EDGE_GUARD: f64 = 1e-3;

/// `c n lambda_j`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledSpectrum {
    pub values: Vec<f64>,
    pub c: f64,
    pub n: usize,
    pub p: usize,
}

pub fn scaled_spectrum(ds: &DensitySpectrum, c: f64) -> ScaledSpectrum {
    let factor = c * ds.n as f64;
    ScaledSpectrum {
        values: ds.lambdas.iter().map(|l| factor * l).collect(),
        c,
        n: ds.n,
        p: ds.p,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Largest,
    Smallest,
}

/// How the sign of the smallest-edge denominator is treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EdgeSignConvention {
    /// `(sqrt(r) - 1)(1/sqrt(r) - 1)^(1/3)` exactly as written; negative for every `r != 1`.
    #[default]
    Verbatim,
    /// Absolute value of the above.
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatistic {
    pub value: f64,
    pub which: Edge,
    pub centering: f64,
    pub scale_factor: f64,
}

fn realized_ratio(ds: &DensitySpectrum) -> f64 {
    ds.p as f64 / ds.n as f64
}

/// `n^(2/3) (c n lambda_1 - (1 + sqrt r)^2) / ((1 + sqrt r)(1 + 1/sqrt r)^(1/3))`
/// with `r = p / n`.
pub fn largest_statistic(ds: &DensitySpectrum, c: f64) -> EdgeStatistic {
    let n = ds.n as f64;
    let sr = realized_ratio(ds).sqrt();
    let centering = (1.0 + sr) * (1.0 + sr);
    let scale_factor = (1.0 + sr) * (1.0 + 1.0 / sr).cbrt();
    let x = c * n * ds.largest();
    EdgeStatistic {
        value: n.powf(2.0 / 3.0) * (x - centering) / scale_factor,
        which: Edge::Largest,
        centering,
        scale_factor,
    }
}

/// `n^(2/3) (c n lambda_min - (1 - sqrt r)^2) / ((sqrt r - 1)(1/sqrt r - 1)^(1/3))`,
/// where `lambda_min` is the smallest of the `min(p, n)` nonzero eigenvalues.
pub fn smallest_statistic(ds: &DensitySpectrum, c: f64, convention: EdgeSignConvention) -> Result<EdgeStatistic> {
    let n = ds.n as f64;
    let sr = realized_ratio(ds).sqrt();
    if (sr - 1.0).abs() < HARD_EDGE_GUARD {
        return Err(Error::HardEdge { r: sr * sr });
    }
    let centering = (1.0 - sr) * (1.0 - sr);
    let mut scale_factor = (sr - 1.0) * (1.0 / sr - 1.0).cbrt();
    if convention == EdgeSignConvention::Absolute {
        scale_factor = scale_factor.abs();
    }
    let x = c * n * ds.smallest_nonzero_part();
    Ok(EdgeStatistic {
        value: n.powf(2.0 / 3.0) * (x - centering) / scale_factor,
        which: Edge::Smallest,
        centering,
        scale_factor,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps must be positive and finite, got {eps}")))
    }
}

/// `(1/len) sum 1/(v + eps)`.
pub fn empirical_stieltjes(values: &[f64], eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let s: f64 = values.iter().map(|v| 1.0 / (v + eps)).sum();
    Ok(s / values.len() as f64)
}

/// Both sides of `S(eps, mu_n) = (T/np) S((T/np) eps, mu'_n)`, where `mu_n` is
/// the `cn`-scaled density spectrum with `c = p/n`, `mu'_n` the spectrum of
/// `X X^H / n` and `T = Tr(X X^H)`.
pub fn stieltjes_rescaling_check(x: &ComplexMatrix, eps: f64) -> Result<(f64, f64)> {
    let (values, trace) = gram_spectrum(x)?;
    rescaling_sides(&values, trace, x.cols(), eps)
}

/// The same identity from the Gram eigenvalues `values` (length `p`) and `T`.
pub(crate) fn rescaling_sides(values: &[f64], trace: f64, n: usize, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let (p, n) = (values.len() as f64, n as f64);
    let scaled: Vec<f64> = values.iter().map(|v| p * (v / trace)).collect();
    let lhs = empirical_stieltjes(&scaled, eps)?;
    let primed: Vec<f64> = values.iter().map(|v| v / n).collect();
    let t = trace / (n * p);
    let rhs = t * empirical_stieltjes(&primed, t * eps)?;
    Ok((lhs, rhs))
}

/// `-sum lambda ln lambda`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(ds: &DensitySpectrum) -> f64 {
    -ds.lambdas
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance(samples: &[f64], mut cdf: impl FnMut(f64) -> f64) -> Result<f64> {
    ks_distance_with(samples, |x| Ok(cdf(x)))
}

/// As [`ks_distance`] for a fallible CDF.
pub fn ks_distance_with(samples: &[f64], mut cdf: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("KS samples must be sorted ascending".into()));
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d = d.max(above.abs()).max(below.abs());
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` equally spaced edges.
    pub edges: Vec<f64>,
    /// Density heights; `sum height * width = 1` over the in-range samples.
    pub heights: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples outside `[edges[0], edges[bins]]`.
    pub overflow: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }
}

/// Equal-width histogram on the closed range `[lo, hi]`.
pub fn histogram_density(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let (lo, hi) = range;
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("empty histogram range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
    let mut counts = vec![0u64; bins];
    let mut overflow = 0;
    for &x in samples {
        if !(lo..=hi).contains(&x) {
            overflow += 1;
            continue;
        }
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let inside: u64 = counts.iter().sum();
    let heights = counts
        .iter()
        .map(|&k| if inside == 0 { 0.0 } else { k as f64 / (inside as f64 * width) })
        .collect();
    Ok(Histogram {
        edges,
        heights,
        counts,
        overflow,
    })
}
