//! Dense complex matrices and a Hermitian eigenvalue solver.
//!
//! The solver reduces a Hermitian matrix to real symmetric tridiagonal form
//! with Householder reflections and then runs implicit-shift QL with
//! Wilkinson-type shifts. Only eigenvalues are computed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the Hermiticity check, in units of `maxabs(A)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Target relative accuracy of computed eigenvalues, in units of `maxabs(eigenvalues)`.
pub const EIGENVALUE_REL_TOL: f64 = 1e-10;
/// Eigenvalues of a Gram matrix below `-PSD_FLOOR * maxabs(A)` are a solver error;
/// negative values above it are roundoff and get clamped to zero.
pub const PSD_FLOOR: f64 = 1e-12;
/// QL sweeps allowed per eigenvalue.
pub const MAX_QL_SWEEPS: usize = 50;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix shape");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidMatrix(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Largest entry of `|A - A^H|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Sum of squared moduli of all entries (squared Hilbert-Schmidt norm).
    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Real eigenvalues stored in ascending order.
///
/// Accessors follow the "j-th largest" convention: `lambda(1)` is the largest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the input; rejects empty or non-finite values.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite eigenvalue".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn ascending(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The j-th largest eigenvalue, 1-based.
    pub fn lambda(&self, j: usize) -> Option<f64> {
        if j == 0 || j > self.values.len() {
            return None;
        }
        Some(self.values[self.values.len() - j])
    }

    pub fn largest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn smallest(&self) -> f64 {
        self.values[0]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.smallest().abs().max(self.largest().abs())
    }
}

/// `X X^H`. Only the lower triangle is computed; the upper triangle is its
/// mirror, so the result is Hermitian bit-for-bit.
pub fn gram(x: &ComplexMatrix) -> ComplexMatrix {
    let p = x.rows;
    let mut out = ComplexMatrix::zeros(p, p);
    for i in 0..p {
        let ri = x.row(i);
        for j in 0..=i {
            let rj = x.row(j);
            let mut acc = ZERO;
            for (a, b) in ri.iter().zip(rj) {
                acc += a * b.conj();
            }
            if i == j {
                acc.im = 0.0;
            }
            out.data[i * p + j] = acc;
            out.data[j * p + i] = acc.conj();
        }
    }
    out
}

pub fn trace(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    Ok((0..a.rows).map(|i| a.get(i, i)).sum())
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let tolerance = HERMITIAN_TOL * a.max_abs();
    let max_asymmetry = a.max_asymmetry();
    if max_asymmetry > tolerance {
        return Err(Error::NotHermitian {
            max_asymmetry,
            tolerance,
        });
    }
    Ok(())
}

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal matrix with the same eigenvalues.
///
/// Returns `(diag, offdiag)` with `offdiag.len() == n - 1`. The complex
/// subdiagonal produced by the reflections is made real by a diagonal unitary
/// similarity, which is why only the moduli are returned.
pub fn tridiagonalize(a: &ComplexMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    check_hermitian(a)?;
    let n = a.rows;
    let mut w = a.data.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];

    // Only the lower triangle of `w` is kept current.
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let base = k + 1;
        for i in 0..m {
            v[i] = w[(base + i) * n + k];
        }
        let tail_sqr: f64 = v[1..m].iter().map(|z| z.norm_sqr()).sum();
        let x0 = v[0];
        let xnorm = (x0.norm_sqr() + tail_sqr).sqrt();
        diag[k] = w[k * n + k].re;
        if tail_sqr == 0.0 {
            // Column already reduced.
            off[k] = x0.norm();
            continue;
        }
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        v[0] = x0 - alpha;
        let vnorm_sqr = v[0].norm_sqr() + tail_sqr;
        let tau = 2.0 / vnorm_sqr;
        off[k] = xnorm;

        // p = tau * A_sub v, reading only the lower triangle.
        for pi in p[..m].iter_mut() {
            *pi = ZERO;
        }
        for i in 0..m {
            let row = &w[(base + i) * n + base..(base + i) * n + base + i + 1];
            let vi = v[i];
            let mut acc = ZERO;
            for j in 0..i {
                let aij = row[j];
                acc += aij * v[j];
                p[j] += aij.conj() * vi;
            }
            acc += vi * row[i].re;
            p[i] += acc;
        }
        let mut vhp = ZERO;
        for i in 0..m {
            p[i] *= tau;
            vhp += v[i].conj() * p[i];
        }
        let half_k = 0.5 * tau * vhp.re;
        for i in 0..m {
            p[i] -= v[i] * half_k;
        }
        // A_sub -= v p^H + p v^H on the lower triangle.
        for i in 0..m {
            let vi = v[i];
            let pi = p[i];
            let row = &mut w[(base + i) * n + base..(base + i) * n + base + i + 1];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= vi * p[j].conj() + pi * v[j].conj();
            }
        }
    }
    if n >= 2 {
        diag[n - 2] = w[(n - 2) * n + n - 2].re;
        off[n - 2] = w[(n - 1) * n + n - 2].norm();
    }
    diag[n - 1] = w[(n - 1) * n + n - 1].re;
    Ok((diag, off))
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `diag`
/// and sub/superdiagonal `offdiag`, by implicit QL with Wilkinson-type shifts.
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Spectrum> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if offdiag.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "offdiagonal length {} for a tridiagonal of order {n}",
            offdiag.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: MAX_QL_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Spectrum::new(d)
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Spectrum> {
    let (d, e) = tridiagonalize(a)?;
    tridiagonal_eigenvalues(&d, &e)
}
