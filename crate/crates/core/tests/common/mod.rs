//! Helpers shared by the integration test targets.

use num_complex::Complex64;
use rdm_core::linalg::ComplexMatrix;
use rdm_core::sampling::Xoshiro256StarStar;

/// Entries uniform on [-1, 1] (real and imaginary parts).
pub fn random_hermitian(n: usize, rng: &mut Xoshiro256StarStar) -> ComplexMatrix {
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        data[i * n + i] = Complex64::new(2.0 * rng.next_f64() - 1.0, 0.0);
        for j in 0..i {
            let z = Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
            data[i * n + j] = z;
            data[j * n + i] = z.conj();
        }
    }
    ComplexMatrix::new(n, n, data).unwrap()
}

/// Number of eigenvalues of `a` below `sigma`: the count of negative pivots of
/// `A - sigma I` (Sylvester's law of inertia).
pub fn count_below(a: &ComplexMatrix, sigma: f64) -> usize {
    let n = a.rows();
    let mut m: Vec<Complex64> = a.entries().to_vec();
    for i in 0..n {
        m[i * n + i] -= sigma;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = m[k * n + k].re;
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            for j in k + 1..n {
                let mkj = m[k * n + j];
                m[i * n + j] -= f * mkj;
            }
        }
    }
    negatives
}

/// The `k`-th smallest eigenvalue by bisection on the inertia count.
pub fn bisect_eigenvalue(a: &ComplexMatrix, k: usize) -> f64 {
    let bound = a.frobenius_norm_sqr().sqrt() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(a, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}
