//! The Marchenko-Pastur law `nu_c`: an atom of mass `max(0, 1 - 1/c)` at zero
//! plus the absolutely continuous part
//!
//! ```text
//! d kappa_c(x) = sqrt((x+ - x)(x - x-)) / (2 pi c x) dx   on [x-, x+],  x+- = (sqrt(c) +- 1)^2.
//! ```
//!
//! Integrals against `kappa_c` use the substitution `x = x- + (x+ - x-) sin^2 u`,
//! `u` in `[0, pi/2]`, which turns the square-root factor and the Jacobian into
//! `(x+ - x-)^2 sin^2 u cos^2 u`, a smooth integrand for Gauss-Legendre.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_integrate, adaptive_integrate_pair, QuadratureEstimate, QuadratureRule};

/// Absolute tolerance for every integral against `kappa_c`.
pub const LAW_QUADRATURE_TOL: f64 = 1e-13;
/// Base Gauss-Legendre order; the error estimate uses twice this order.
pub const DEFAULT_RULE_ORDER: usize = 32;
pub const MAX_MOMENT: u32 = 8;

fn default_rules() -> &'static (QuadratureRule, QuadratureRule) {
    static RULES: OnceLock<(QuadratureRule, QuadratureRule)> = OnceLock::new();
    RULES.get_or_init(|| {
        (
            QuadratureRule::gauss_legendre(DEFAULT_RULE_ORDER),
            QuadratureRule::gauss_legendre(2 * DEFAULT_RULE_ORDER),
        )
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpLaw {
    pub c: f64,
    pub x_minus: f64,
    pub x_plus: f64,
    pub atom_mass: f64,
}

impl MpLaw {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("Marchenko-Pastur ratio c = {c} must be positive")));
        }
        let r = c.sqrt();
        Ok(Self {
            c,
            x_minus: (r - 1.0) * (r - 1.0),
            x_plus: (r + 1.0) * (r + 1.0),
            atom_mass: (1.0 - 1.0 / c).max(0.0),
        })
    }

    /// `min(1, 1/c)`.
    pub fn continuous_mass(&self) -> f64 {
        1.0 - self.atom_mass
    }

    fn width(&self) -> f64 {
        self.x_plus - self.x_minus
    }

    /// Density of the continuous part; the atom is not included.
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.x_minus || x >= self.x_plus {
            return 0.0;
        }
        ((self.x_plus - x) * (x - self.x_minus)).sqrt() / (2.0 * PI * self.c * x)
    }

    /// The substituted integrand of `f dkappa` as a function of `u`.
    fn substituted(&self, mut f: impl FnMut(f64) -> f64) -> impl FnMut(f64) -> f64 {
        let (lo, width) = (self.x_minus, self.width());
        let scale = width * width / (PI * self.c);
        move |u| {
            let (s, co) = u.sin_cos();
            let s2 = s * s;
            let x = lo + width * s2;
            // s2 / x stays bounded as x -> 0 when c = 1 (x- = 0).
            f(x) * scale * co * co * (s2 / x)
        }
    }

    fn integrate_to(&self, upper: f64, f: impl FnMut(f64) -> f64) -> Result<QuadratureEstimate> {
        let (coarse, fine) = default_rules();
        adaptive_integrate_pair(0.0, upper, coarse, fine, LAW_QUADRATURE_TOL, self.substituted(f))
    }

    /// `int f dkappa_c` (continuous part only) with the given base rule.
    pub fn integrate_with(&self, rule: &QuadratureRule, f: impl FnMut(f64) -> f64) -> Result<QuadratureEstimate> {
        adaptive_integrate(0.0, 0.5 * PI, rule, LAW_QUADRATURE_TOL, self.substituted(f))
    }

    pub fn integrate(&self, f: impl FnMut(f64) -> f64) -> Result<f64> {
        Ok(self.integrate_to(0.5 * PI, f)?.value)
    }

    /// `nu_c((-inf, x])`, atom included.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x >= self.x_plus {
            return Ok(1.0);
        }
        let atom = if x >= 0.0 { self.atom_mass } else { 0.0 };
        if x <= self.x_minus {
            return Ok(atom);
        }
        let upper = ((x - self.x_minus) / self.width()).sqrt().min(1.0).asin();
        let cont = self.integrate_to(upper, |_| 1.0)?.value;
        Ok((atom + cont).clamp(0.0, 1.0))
    }

    /// `int x^k dnu_c` for `k <= 8`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k > MAX_MOMENT {
            return Err(Error::InvalidParameter(format!("moment order {k} exceeds {MAX_MOMENT}")));
        }
        let atom = if k == 0 { self.atom_mass } else { 0.0 };
        Ok(atom + self.integrate(|x| x.powi(k as i32))?)
    }

    /// `S(eps, nu_c) = int dnu_c(x) / (x + eps)`.
    pub fn stieltjes(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(self.atom_mass / eps + self.integrate(|x| 1.0 / (x + eps))?)
    }

    /// `d/deps S(eps, nu_c) = -int dnu_c(x) / (x + eps)^2`.
    pub fn stieltjes_derivative(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(-self.atom_mass / (eps * eps) - self.integrate(|x| 1.0 / ((x + eps) * (x + eps)))?)
    }

    /// `log c - int x log x dnu_c(x)`; the atom contributes `0 log 0 = 0`.
    pub fn entropy_limit(&self) -> Result<f64> {
        let xlogx = self.integrate(|x| if x > 0.0 { x * x.ln() } else { 0.0 })?;
        Ok(self.c.ln() - xlogx)
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("Stieltjes argument eps = {eps} must be positive")));
    }
    Ok(())
}

pub fn mp_density(x: f64, c: f64) -> Result<f64> {
    Ok(MpLaw::new(c)?.density(x))
}

pub fn mp_cdf(x: f64, c: f64) -> Result<f64> {
    MpLaw::new(c)?.cdf(x)
}

pub fn mp_moment(k: u32, c: f64) -> Result<f64> {
    MpLaw::new(c)?.moment(k)
}

pub fn mp_stieltjes(eps: f64, c: f64) -> Result<f64> {
    MpLaw::new(c)?.stieltjes(eps)
}

pub fn entropy_limit(c: f64) -> Result<f64> {
    MpLaw::new(c)?.entropy_limit()
}

/// `int f dkappa_c` with an explicit base rule, plus the order-doubling error estimate.
pub fn quadrature_integrate(
    f: impl FnMut(f64) -> f64,
    law: &MpLaw,
    rule: &QuadratureRule,
) -> Result<QuadratureEstimate> {
    law.integrate_with(rule, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const C_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];

    #[test]
    fn parameters() {
        let law = MpLaw::new(4.0).unwrap();
        assert_eq!((law.x_minus, law.x_plus), (1.0, 9.0));
        assert_eq!(law.atom_mass, 0.75);
        assert_eq!(MpLaw::new(0.5).unwrap().atom_mass, 0.0);
        assert_eq!(MpLaw::new(1.0).unwrap().atom_mass, 0.0);
        assert!(MpLaw::new(0.0).is_err());
        assert!(MpLaw::new(-1.0).is_err());
        assert!(mp_density(1.0, 0.0).is_err());
    }

    #[test]
    fn density_examples() {
        let law = MpLaw::new(0.5).unwrap();
        assert_eq!(law.density(law.x_plus), 0.0);
        assert_eq!(law.density(law.x_minus), 0.0);
        assert_eq!(mp_density(5.0, 0.5).unwrap(), 0.0);
        let v = mp_density(1.0, 1.0).unwrap();
        assert!((v - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn normalization_and_mean() {
        for c in C_GRID {
            let law = MpLaw::new(c).unwrap();
            let mass = law.integrate(|_| 1.0).unwrap();
            assert!((law.atom_mass + mass - 1.0).abs() < 1e-10, "c={c}");
            assert!((mass - (1.0f64).min(1.0 / c)).abs() < 1e-10);
            assert!((law.moment(0).unwrap() - 1.0).abs() < 1e-10);
            assert!((law.moment(1).unwrap() - 1.0).abs() < 1e-8, "c={c}");
        }
    }

    #[test]
    fn second_moment_is_one_plus_c() {
        assert!((mp_moment(2, 0.5).unwrap() - 1.5).abs() < 1e-9);
        assert!(mp_moment(9, 0.5).is_err());
    }

    #[test]
    fn cdf_atom_and_total_mass() {
        assert!((mp_cdf(0.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(mp_cdf(-1e-12, 2.0).unwrap(), 0.0);
        assert_eq!(mp_cdf(100.0, 0.5).unwrap(), 1.0);
        let law = MpLaw::new(0.5).unwrap();
        assert_eq!(law.cdf(law.x_plus).unwrap(), 1.0);
        let just_below = law.cdf(law.x_plus - 1e-9).unwrap();
        assert!((just_below - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cdf_is_monotone_with_atom_jump() {
        for c in [0.5, 2.0] {
            let law = MpLaw::new(c).unwrap();
            let (a, b) = (law.x_minus - 1.0, law.x_plus + 1.0);
            let mut prev = law.cdf(a).unwrap();
            for i in 1..=1000 {
                let x = a + (b - a) * i as f64 / 1000.0;
                let v = law.cdf(x).unwrap();
                assert!(v >= prev - 1e-15, "c={c} x={x}");
                prev = v;
            }
        }
        let law = MpLaw::new(2.0).unwrap();
        let jump = law.cdf(0.0).unwrap() - law.cdf(-1e-300).unwrap();
        assert!((jump - law.atom_mass).abs() < 1e-15);
    }

    #[test]
    fn stieltjes_large_eps_and_atom() {
        for c in C_GRID {
            let eps = 1e6;
            assert!((eps * mp_stieltjes(eps, c).unwrap() - 1.0).abs() < 1e-4);
        }
        assert!(mp_stieltjes(0.0, 1.0).is_err());
        assert!(mp_stieltjes(-1.0, 1.0).is_err());
        let law = MpLaw::new(2.0).unwrap();
        let cont = law.integrate(|x| 1.0 / (x + 1.0)).unwrap();
        assert!((law.stieltjes(1.0).unwrap() - (0.5 + cont)).abs() < 1e-15);
    }

    #[test]
    fn stieltjes_derivative_matches_finite_difference() {
        let h = 1e-5;
        for c in C_GRID {
            let law = MpLaw::new(c).unwrap();
            for eps in [0.3, 1.0, 4.0] {
                let fd = (law.stieltjes(eps + h).unwrap() - law.stieltjes(eps - h).unwrap()) / (2.0 * h);
                let exact = law.stieltjes_derivative(eps).unwrap();
                assert!((fd - exact).abs() < 1e-5, "c={c} eps={eps}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn entropy_limit_closed_form_for_c_at_most_one() {
        assert!((entropy_limit(1.0).unwrap() + 0.5).abs() < 1e-8);
        for c in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let v = entropy_limit(c).unwrap();
            assert!((v - (c.ln() - c / 2.0)).abs() < 1e-8, "c={c}: {v}");
        }
        assert!(entropy_limit(0.0).is_err());
        assert!(entropy_limit(3.0).unwrap().is_finite());
    }

    #[test]
    fn quadrature_integrate_examples() {
        let rule = QuadratureRule::gauss_legendre(32);
        for c in C_GRID {
            let law = MpLaw::new(c).unwrap();
            let est = quadrature_integrate(|_| 1.0, &law, &rule).unwrap();
            assert!((est.value - (1.0f64).min(1.0 / c)).abs() < 1e-12);
            assert!(est.error < 1e-12);
        }
        let law = MpLaw::new(0.5).unwrap();
        assert!((quadrature_integrate(|x| x, &law, &rule).unwrap().value - 1.0).abs() < 1e-12);
        let law = MpLaw::new(1.0).unwrap();
        let v = quadrature_integrate(|x| x * x.ln(), &law, &rule).unwrap().value;
        assert!((v - 0.5).abs() < 1e-10);
        let r = quadrature_integrate(|x| 1.0 / (x - 1.0) / 0.0, &law, &rule);
        assert!(matches!(r, Err(Error::NonFiniteIntegrand(_))));
    }
}
