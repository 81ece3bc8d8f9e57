//! Hastings-McLeod solution of Painleve II and the tabulated `F2`.
//!
//! `q'' = s q + 2 q^3` is integrated backward from `s_max` with
//! `q(s_max) = Ai(s_max)`, `q'(s_max) = Ai'(s_max)` by classic RK4. Two
//! quadratures ride along in the state vector:
//!
//! ```text
//! R(s) = int_s^inf q(x)^2 dx,          R' = -q^2
//! L(s) = log F2(s) = -int_s^inf (x - s) q(x)^2 dx,   L' = R
//! ```
//!
//! so `F2 = exp(L)` and `F2' = F2 R`. The contributions of `[s_max, inf)` are
//! seeded from the closed forms for `q = Ai`:
//! `int_s^inf Ai^2 = Ai'^2 - s Ai^2` and
//! `int_s^inf (x - s) Ai^2 = (2 s^2 Ai^2 - 2 s Ai'^2 - Ai Ai') / 3`.
//!
//! Backward integration of the Hastings-McLeod solution is exponentially
//! unstable for negative `s`: a perturbation made at `s0 < 0` grows like
//! `exp(2 sqrt(2) / 3 (|s|^1.5 - |s0|^1.5))`, so in binary64 the integrated `q`
//! is meaningless near `s = -10`. Below [`LEFT_TAIL_FROM`] `q` is therefore
//! taken from its asymptotic expansion
//! `q ~ sqrt(-s/2) (1 + s^-3/8 - 73 s^-6/128 + 10657 s^-9/1024 - 13912277 s^-12/32768)`
//! and only `R` and `L` are integrated. `F2(-6)` is about `1e-8`.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::airy::airy_pair;
use crate::error::{Error, Result};

/// Blow-up threshold for `|q|`.
pub const BLOW_UP: f64 = 1e6;
/// Below this `s`, `q` comes from the left-tail expansion.
pub const LEFT_TAIL_FROM: f64 = -6.0;

const LEFT_TAIL_COEFFS: [f64; 5] = [1.0, 1.0 / 8.0, -73.0 / 128.0, 10657.0 / 1024.0, -13912277.0 / 32768.0];

/// `(q, q')` from the `s -> -inf` expansion of the Hastings-McLeod solution.
pub fn left_tail(s: f64) -> (f64, f64) {
    let t = s.powi(-3);
    let (mut poly, mut dpoly) = (0.0, 0.0);
    for &c in LEFT_TAIL_COEFFS.iter().rev() {
        dpoly = dpoly * t + poly;
        poly = poly * t + c;
    }
    let root = (-s / 2.0).sqrt();
    let q = root * poly;
    let dq = -poly / (4.0 * root) + root * dpoly * (-3.0 * t / s);
    (q, dq)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tw2Params {
    pub s_max: f64,
    pub s_min: f64,
    pub step: f64,
}

impl Default for Tw2Params {
    fn default() -> Self {
        Self {
            s_max: 8.0,
            s_min: -10.0,
            step: 1e-3,
        }
    }
}

impl Tw2Params {
    /// Number of steps; errors unless `step` divides `s_max - s_min`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.s_min < self.s_max) || !(self.step > 0.0) || !self.s_max.is_finite() || !self.s_min.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Painleve grid s_min = {}, s_max = {}, step = {}",
                self.s_min, self.s_max, self.step
            )));
        }
        let span = (self.s_max - self.s_min) / self.step;
        let steps = span.round();
        if (span - steps).abs() > 1e-6 * steps.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "step {} does not divide [{}, {}]",
                self.step, self.s_min, self.s_max
            )));
        }
        Ok(steps as usize)
    }
}

/// Raw solver output on the descending grid `s_i = s_max - i step`.
#[derive(Clone, Debug)]
pub struct HastingsMcLeod {
    pub params: Tw2Params,
    pub s_grid: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    /// `int_s^inf q^2`.
    pub r: Vec<f64>,
    /// `log F2(s)`.
    pub log_f2: Vec<f64>,
}

type State = [f64; 4];

#[inline]
fn rhs(s: f64, y: &State) -> State {
    let q = y[0];
    [y[1], s * q + 2.0 * q * q * q, -q * q, y[2]]
}

#[inline]
fn axpy(y: &State, h: f64, k: &State) -> State {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

pub fn solve_hastings_mcleod(params: Tw2Params) -> Result<HastingsMcLeod> {
    params.steps()?;
    let s0 = params.s_max;
    let (ai, aip) = airy_pair(s0)?;
    let r0 = aip * aip - s0 * ai * ai;
    let tail = (2.0 * s0 * s0 * ai * ai - 2.0 * s0 * aip * aip - ai * aip) / 3.0;
    integrate(params, [ai, aip, r0, -tail])
}

fn integrate(params: Tw2Params, mut y: State) -> Result<HastingsMcLeod> {
    let steps = params.steps()?;
    let s0 = params.s_max;

    let mut out = HastingsMcLeod {
        params,
        s_grid: Vec::with_capacity(steps + 1),
        q: Vec::with_capacity(steps + 1),
        dq: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
        log_f2: Vec::with_capacity(steps + 1),
    };
    let h = -params.step;
    let push = |out: &mut HastingsMcLeod, s: f64, y: &State| {
        out.s_grid.push(s);
        out.q.push(y[0]);
        out.dq.push(y[1]);
        out.r.push(y[2]);
        out.log_f2.push(y[3]);
    };
    push(&mut out, s0, &y);
    for i in 0..steps {
        let s = s0 - i as f64 * params.step;
        let s_next = s0 - (i + 1) as f64 * params.step;
        if s_next < LEFT_TAIL_FROM {
            tail_step(s, h, &mut y);
            push(&mut out, s_next, &y);
            continue;
        }
        let k1 = rhs(s, &y);
        let k2 = rhs(s + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(s + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(s + h, &axpy(&y, h, &k3));
        for j in 0..4 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !(y[0].abs() <= BLOW_UP) {
            return Err(Error::BlowUp { s: s_next, q: y[0] });
        }
        push(&mut out, s_next, &y);
    }
    Ok(out)
}

/// RK4 step of `R' = -q^2`, `L' = R` with `q` from [`left_tail`].
fn tail_step(s: f64, h: f64, y: &mut State) {
    let q2 = |x: f64| left_tail(x).0.powi(2);
    let (a, b, c) = (q2(s), q2(s + 0.5 * h), q2(s + h));
    // Classic RK4 stages for the linear pair, written out.
    y[3] += h * y[2] - h * h / 6.0 * (a + 2.0 * b);
    y[2] -= h / 6.0 * (a + 4.0 * b + c);
    let (q, dq) = left_tail(s + h);
    y[0] = q;
    y[1] = dq;
}

/// Tabulated Hastings-McLeod `q`, `F2` and its density on a uniform grid
/// descending from `s_max` to `s_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tw2Table {
    pub s_grid: Vec<f64>,
    pub q_values: Vec<f64>,
    pub f2_values: Vec<f64>,
    pub pdf_values: Vec<f64>,
    pub step: f64,
}

const CSV_HEADER: &str = "s,q,F2,pdf";

impl Tw2Table {
    pub fn build(params: Tw2Params) -> Result<Self> {
        Ok(Self::from_solution(&solve_hastings_mcleod(params)?))
    }

    pub fn from_solution(hm: &HastingsMcLeod) -> Self {
        let f2_values: Vec<f64> = hm.log_f2.iter().map(|l| l.exp()).collect();
        let pdf_values = f2_values.iter().zip(&hm.r).map(|(f, r)| f * r).collect();
        Self {
            s_grid: hm.s_grid.clone(),
            q_values: hm.q.clone(),
            f2_values,
            pdf_values,
            step: hm.params.step,
        }
    }

    pub fn s_max(&self) -> f64 {
        self.s_grid[0]
    }

    pub fn s_min(&self) -> f64 {
        self.s_grid[self.s_grid.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    /// Four-point Lagrange interpolation of `values` at `s` inside the grid.
    fn interpolate(&self, values: &[f64], s: f64) -> f64 {
        let last = self.len() - 1;
        let t = (self.s_max() - s) / self.step;
        let i0 = ((t.floor() as isize) - 1).clamp(0, last as isize - 3) as usize;
        let tau = t - i0 as f64;
        let w0 = -(tau - 1.0) * (tau - 2.0) * (tau - 3.0) / 6.0;
        let w1 = tau * (tau - 2.0) * (tau - 3.0) / 2.0;
        let w2 = -tau * (tau - 1.0) * (tau - 3.0) / 2.0;
        let w3 = tau * (tau - 1.0) * (tau - 2.0) / 6.0;
        w0 * values[i0] + w1 * values[i0 + 1] + w2 * values[i0 + 2] + w3 * values[i0 + 3]
    }

    /// `F2(s)`. Above `s_max` this is 1. Below `s_min` the last tabulated
    /// value is continued with the leading left-tail decay `exp(-|s|^3 / 12)`;
    /// that continuation is an approximation.
    pub fn cdf(&self, s: f64) -> f64 {
        if s >= self.s_max() {
            return 1.0;
        }
        if s <= self.s_min() {
            return self.left_tail(s);
        }
        self.interpolate(&self.f2_values, s).clamp(0.0, 1.0)
    }

    /// `F2'(s)`; zero above `s_max`, derivative of the tail continuation below `s_min`.
    pub fn pdf(&self, s: f64) -> f64 {
        if s >= self.s_max() {
            return 0.0;
        }
        if s <= self.s_min() {
            return 0.25 * s * s * self.left_tail(s);
        }
        self.interpolate(&self.pdf_values, s).max(0.0)
    }

    pub fn q(&self, s: f64) -> Option<f64> {
        if s > self.s_max() || s < self.s_min() {
            return None;
        }
        Some(self.interpolate(&self.q_values, s))
    }

    fn left_tail(&self, s: f64) -> f64 {
        let f_min = self.f2_values[self.len() - 1];
        let (a, b) = (s.abs(), self.s_min().abs());
        f_min * (-(a * a * a - b * b * b) / 12.0).exp()
    }

    /// Composite Simpson over the grid of `g(s_i) * pdf(s_i)`.
    pub fn integrate_against_pdf(&self, g: impl Fn(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.s_grid.iter().zip(&self.pdf_values).map(|(&s, &p)| g(s) * p).collect();
        simpson(&vals, self.step)
    }

    pub fn mean(&self) -> f64 {
        self.integrate_against_pdf(|s| s)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.len() * 96);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.s_grid[i], self.q_values[i], self.f2_values[i], self.pdf_values[i]
            );
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => return Err(Error::Table(format!("expected header {CSV_HEADER:?}, found {other:?}"))),
        }
        let mut table = Self {
            s_grid: Vec::new(),
            q_values: Vec::new(),
            f2_values: Vec::new(),
            pdf_values: Vec::new(),
            step: 0.0,
        };
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Table(format!("line {}: {e}", lineno + 2)))?;
            if fields.len() != 4 {
                return Err(Error::Table(format!("line {}: expected 4 fields", lineno + 2)));
            }
            table.s_grid.push(fields[0]);
            table.q_values.push(fields[1]);
            table.f2_values.push(fields[2]);
            table.pdf_values.push(fields[3]);
        }
        if table.len() < 4 {
            return Err(Error::Table("fewer than 4 grid points".into()));
        }
        let n = table.len() - 1;
        table.step = (table.s_grid[0] - table.s_grid[n]) / n as f64;
        if !(table.step > 0.0) {
            return Err(Error::Table("grid must be strictly descending".into()));
        }
        for (i, &s) in table.s_grid.iter().enumerate() {
            let expected = table.s_grid[0] - i as f64 * table.step;
            if (s - expected).abs() > 1e-9 * table.step.max(1.0) {
                return Err(Error::Table(format!("grid point {i} = {s} is not uniform")));
            }
        }
        Ok(table)
    }

    /// Hex SHA-256 of the CSV serialization.
    pub fn checksum(&self) -> String {
        format!("{:x}", Sha256::digest(self.to_csv_string().as_bytes()))
    }
}

/// Composite Simpson on uniform samples; a trailing odd panel uses the trapezoid rule.
pub(crate) fn simpson(vals: &[f64], h: f64) -> f64 {
    let n = vals.len();
    if n < 2 {
        return 0.0;
    }
    let panels = n - 1;
    let even = panels - panels % 2;
    let mut acc = 0.0;
    let mut i = 0;
    while i < even {
        acc += vals[i] + 4.0 * vals[i + 1] + vals[i + 2];
        i += 2;
    }
    let mut total = acc * h / 3.0;
    if even < panels {
        total += 0.5 * h * (vals[n - 2] + vals[n - 1]);
    }
    total
}
