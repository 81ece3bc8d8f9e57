//! `det(I - K_Ai)` on `L^2(s, inf)` by Nystrom discretization, used as an
//! independent check of the Painleve II table.

use super::airy::airy_pair_unchecked;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// The half-line is truncated to `(s, s + FREDHOLM_SPAN]`.
pub const FREDHOLM_SPAN: f64 = 40.0;
pub const FREDHOLM_MIN_S: f64 = -8.0;
pub const FREDHOLM_MIN_NODES: usize = 40;
/// Largest change allowed when the node count is doubled.
pub const FREDHOLM_DOUBLING_TOL: f64 = 1e-7;

/// Airy kernel `(Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)`, with the diagonal
/// limit `Ai'(x)^2 - x Ai(x)^2`.
fn airy_kernel(x: f64, ax: (f64, f64), y: f64, ay: (f64, f64)) -> f64 {
    if x == y {
        ax.1 * ax.1 - x * ax.0 * ax.0
    } else {
        (ax.0 * ay.1 - ax.1 * ay.0) / (x - y)
    }
}

/// Nystrom determinant with `nodes` Gauss-Legendre points, no convergence check.
pub fn fredholm_determinant(s: f64, nodes: usize) -> f64 {
    let rule = QuadratureRule::gauss_legendre(nodes);
    let half = 0.5 * FREDHOLM_SPAN;
    let xs: Vec<f64> = rule.nodes.iter().map(|t| s + half * (1.0 + t)).collect();
    let sqrt_w: Vec<f64> = rule.weights.iter().map(|w| (half * w).sqrt()).collect();
    let airy: Vec<(f64, f64)> = xs.iter().map(|&x| airy_pair_unchecked(x)).collect();
    let m = nodes;
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let k = airy_kernel(xs[i], airy[i], xs[j], airy[j]);
            a[i * m + j] = if i == j { 1.0 } else { 0.0 } - sqrt_w[i] * k * sqrt_w[j];
        }
    }
    lu_determinant(&mut a, m)
}

/// `F2(s)` as a Fredholm determinant, verified against a run with twice the nodes.
pub fn tw2_fredholm_oracle(s: f64, nodes: usize) -> Result<f64> {
    if !(s >= FREDHOLM_MIN_S) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("Fredholm oracle needs s >= {FREDHOLM_MIN_S}, got {s}")));
    }
    if nodes < FREDHOLM_MIN_NODES {
        return Err(Error::InvalidParameter(format!(
            "Fredholm oracle needs at least {FREDHOLM_MIN_NODES} nodes, got {nodes}"
        )));
    }
    let coarse = fredholm_determinant(s, nodes);
    let fine = fredholm_determinant(s, 2 * nodes);
    let change = (fine - coarse).abs();
    if change > FREDHOLM_DOUBLING_TOL {
        return Err(Error::FredholmNotConverged { s, change });
    }
    Ok(coarse)
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `a`).
fn lu_determinant(a: &mut [f64], m: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..m {
        let (piv, pmax) = (k..m)
            .map(|i| (i, a[i * m + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..m {
                a.swap(k * m + j, piv * m + j);
            }
            det = -det;
        }
        let pivot = a[k * m + k];
        det *= pivot;
        for i in k + 1..m {
            let factor = a[i * m + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..m {
                a[i * m + j] -= factor * a[k * m + j];
            }
        }
    }
    det
}
