//! Gauss-Legendre rules and an adaptive integrator that estimates the error
//! of each panel by comparing a rule with the rule of twice its order.

use std::cell::Cell;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Nodes are the roots of `P_order`, found by Newton iteration from the
    /// Tricomi initial guesses; weights are `2 / ((1 - x^2) P'(x)^2)`.
    pub fn gauss_legendre(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights, order }
    }

    /// Fixed-rule approximation of `int_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// Sum over accepted panels of `|I_2k - I_k|`.
    pub error: f64,
}

const MAX_DEPTH: usize = 48;

/// Adaptive bisection on `[a, b]`. A panel is accepted once the two rules
/// agree to within its share of `tol`. Non-finite integrand values abort.
pub fn adaptive_integrate(
    a: f64,
    b: f64,
    rule: &QuadratureRule,
    tol: f64,
    f: impl FnMut(f64) -> f64,
) -> Result<QuadratureEstimate> {
    let fine = QuadratureRule::gauss_legendre(2 * rule.order);
    adaptive_integrate_pair(a, b, rule, &fine, tol, f)
}

/// As [`adaptive_integrate`] with a caller-supplied refined rule.
pub fn adaptive_integrate_pair(
    a: f64,
    b: f64,
    rule: &QuadratureRule,
    fine: &QuadratureRule,
    tol: f64,
    mut f: impl FnMut(f64) -> f64,
) -> Result<QuadratureEstimate> {
    let total = b - a;
    let bad = Cell::new(None);
    let mut eval = |x: f64| {
        let y = f(x);
        if !y.is_finite() && bad.get().is_none() {
            bad.set(Some(x));
        }
        y
    };
    let mut value = 0.0;
    let mut error = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let coarse = rule.integrate(lo, hi, &mut eval);
        let refined = fine.integrate(lo, hi, &mut eval);
        if let Some(x) = bad.get() {
            return Err(Error::NonFiniteIntegrand(x));
        }
        let diff = (refined - coarse).abs();
        let share = tol * (hi - lo) / total;
        if diff <= share || depth >= MAX_DEPTH {
            value += refined;
            error += diff;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    if error > tol {
        return Err(Error::QuadratureTolerance { tolerance: tol, estimate: error });
    }
    Ok(QuadratureEstimate { value, error })
}
