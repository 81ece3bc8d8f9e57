//! Seeded generation of generator matrices `X` and density-matrix spectra.
//!
//! Every trial owns its own generator, seeded by [`derive_trial_seed`], so a
//! trial's matrix depends only on `(master_seed, trial_index, p, n, dist)`.
//!
//! Trial seed derivation, bit-exact:
//!
//! ```text
//! z    = master_seed XOR (trial_index * 0x9E3779B97F4A7C15)      (mod 2^64)
//! z    = z + 0x9E3779B97F4A7C15                                  (mod 2^64)
//! z    = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z    = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! seed = z ^ (z >> 31)
//! ```
//!
//! The trial generator is xoshiro256** whose four state words are the first
//! four SplitMix64 outputs starting from `seed`.

pub mod rng;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, PSD_FLOOR};
pub use rng::Xoshiro256StarStar;
use rng::{splitmix64_mix, GOLDEN_GAMMA};

/// Entry laws. All have `E[x] = 0`, `E[x^2] = 0`, `E[|x|^2] = 1` and a
/// finite fourth moment.
///
/// The bounded laws decay subexponentially trivially. The complex Gaussian
/// has `P(|x| >= t) = exp(-t^2)`, which satisfies a bound of the form
/// `tau0^-1 exp(-t^tau0)` for large `t` with e.g. `tau0 = 1`; the decay
/// constants play no numerical role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum EntryDistribution {
    /// `(g1 + i g2) / sqrt(2)` with independent standard normals.
    #[serde(rename = "gaussian")]
    #[value(name = "gaussian")]
    ComplexGaussian,
    /// Uniform on `{(+-1 +- i) / sqrt(2)}`.
    #[serde(rename = "quaternary")]
    #[value(name = "quaternary")]
    QuaternaryRademacher,
    /// `exp(i theta)`, `theta` uniform on `[0, 2 pi)`.
    #[serde(rename = "unitcircle")]
    #[value(name = "unitcircle")]
    UnitCircle,
}

impl EntryDistribution {
    /// `E|x|^4`.
    pub fn fourth_moment(self) -> f64 {
        match self {
            EntryDistribution::ComplexGaussian => 2.0,
            EntryDistribution::QuaternaryRademacher | EntryDistribution::UnitCircle => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryDistribution::ComplexGaussian => "gaussian",
            EntryDistribution::QuaternaryRademacher => "quaternary",
            EntryDistribution::UnitCircle => "unitcircle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }
}

/// See the module docs for the exact mixing function.
pub fn derive_trial_seed(spec: SeedSpec) -> u64 {
    let z = spec.master_seed ^ spec.trial_index.wrapping_mul(GOLDEN_GAMMA);
    splitmix64_mix(z.wrapping_add(GOLDEN_GAMMA))
}

/// Generator for one trial.
pub fn trial_rng(spec: SeedSpec) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(derive_trial_seed(spec))
}

pub fn sample_entry(dist: EntryDistribution, rng: &mut Xoshiro256StarStar) -> Complex64 {
    match dist {
        EntryDistribution::ComplexGaussian => {
            // Box-Muller; 1 - u keeps the logarithm argument in (0, 1].
            let u1 = 1.0 - rng.next_f64();
            let u2 = rng.next_f64();
            let radius = (-2.0 * u1.ln()).sqrt() * FRAC_1_SQRT_2;
            let (s, c) = (2.0 * PI * u2).sin_cos();
            Complex64::new(radius * c, radius * s)
        }
        EntryDistribution::QuaternaryRademacher => {
            let bits = rng.next_u64() >> 62;
            let re = if bits & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            let im = if bits & 2 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            Complex64::new(re, im)
        }
        EntryDistribution::UnitCircle => {
            let (s, c) = (2.0 * PI * rng.next_f64()).sin_cos();
            Complex64::new(c, s)
        }
    }
}

/// `p x n` matrix of IID entries, filled row by row from the trial stream.
pub fn sample_matrix(p: usize, n: usize, dist: EntryDistribution, seed: SeedSpec) -> Result<ComplexMatrix> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("matrix shape {p}x{n}")));
    }
    let mut rng = trial_rng(seed);
    ComplexMatrix::from_fn(p, n, |_, _| sample_entry(dist, &mut rng))
}

/// Eigenvalues of `rho = X X^H / Tr(X X^H)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySpectrum {
    /// Ascending, nonnegative, summing to one.
    pub lambdas: Vec<f64>,
    pub p: usize,
    pub n: usize,
    /// `Tr(X X^H)`.
    pub gram_trace: f64,
}

impl DensitySpectrum {
    /// Build from explicit eigenvalues (sorted here). Checks the density-matrix
    /// invariants: nonnegative entries summing to one within `1e-12 p`.
    pub fn from_lambdas(mut lambdas: Vec<f64>, n: usize, gram_trace: f64) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::EmptySample);
        }
        if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidParameter("density eigenvalues must be finite and >= 0".into()));
        }
        let p = lambdas.len();
        let total: f64 = lambdas.iter().sum();
        if (total - 1.0).abs() > 1e-12 * p as f64 {
            return Err(Error::InvalidParameter(format!("density eigenvalues sum to {total}")));
        }
        lambdas.sort_by(f64::total_cmp);
        Ok(Self {
            lambdas,
            p,
            n,
            gram_trace,
        })
    }

    pub fn largest(&self) -> f64 {
        self.lambdas[self.p - 1]
    }

    /// Smallest eigenvalue among the `min(p, n)` generically nonzero ones.
    pub fn smallest_nonzero_part(&self) -> f64 {
        let rank = self.p.min(self.n);
        self.lambdas[self.p - rank]
    }
}

/// Clamp roundoff-negative Gram eigenvalues to zero; anything below the floor
/// is an error.
pub(crate) fn clamp_psd(values: &mut [f64], gram_max_abs: f64) -> Result<()> {
    let floor = -PSD_FLOOR * gram_max_abs;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < floor {
                return Err(Error::NegativeEigenvalue { value: *v, floor });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Spectrum of `X X^H` (PSD-clamped) together with `Tr(X X^H)`.
pub(crate) fn gram_spectrum(x: &ComplexMatrix) -> Result<(Vec<f64>, f64)> {
    let g = linalg::gram(x);
    let tr = linalg::trace(&g)?.re;
    if tr == 0.0 {
        return Err(Error::DegenerateState);
    }
    let mut values = linalg::hermitian_eigenvalues(&g)?.into_vec();
    clamp_psd(&mut values, g.max_abs())?;
    Ok((values, tr))
}

pub fn density_spectrum(x: &ComplexMatrix) -> Result<DensitySpectrum> {
    let (values, tr) = gram_spectrum(x)?;
    let lambdas: Vec<f64> = values.into_iter().map(|v| v / tr).collect();
    DensitySpectrum::from_lambdas(lambdas, x.cols(), tr)
}
