//! Shared helpers for the integration suites: a deterministic RNG and
//! independent numerical oracles (power iteration, Gauss-Jordan inverse)
//! used to cross-check the library's own linear algebra.

#![allow(dead_code)]

use simderiv_core::harness::PolynomialFunction;
use simderiv_core::Matrix;

/// SplitMix64: tiny, deterministic, good enough for test-case generation.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [lo, hi].
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() as usize) % (hi - lo + 1)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.range(lo, hi);
            }
        }
        m
    }

    /// Random symmetric matrix with entries in [lo, hi].
    pub fn symmetric(&mut self, n: usize, lo: f64, hi: f64) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.range(lo, hi);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Random polynomial of total degree at most `degree` with around
    /// `terms` monomials.
    pub fn polynomial(&mut self, n: usize, degree: u32, terms: usize) -> PolynomialFunction {
        let mut p = PolynomialFunction::new(n);
        for _ in 0..terms {
            let mut exps = vec![0u32; n];
            let mut left = degree;
            for e in exps.iter_mut() {
                let take = (self.next_u64() % (left as u64 + 1)) as u32;
                *e = take;
                left -= take;
            }
            p = p.with_term(&exps, self.range(-3.0, 3.0));
        }
        p
    }
}

/// Largest eigenvalue of the symmetric positive semidefinite `AᵀA` by power
/// iteration; an oracle for the spectral norm that shares no code with the
/// SVD path.
pub fn spectral_norm_power_iteration(a: &Matrix) -> f64 {
    let ata = a.transpose().matmul(a);
    let n = ata.nrows();
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = ata.mul_vec(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let new_lambda = {
            let av = ata.mul_vec(&next);
            next.iter().zip(&av).map(|(x, y)| x * y).sum::<f64>()
        };
        let done = (new_lambda - lambda).abs() <= 1e-14 * new_lambda.abs().max(1.0);
        lambda = new_lambda;
        v = next;
        if done {
            break;
        }
    }
    lambda.max(0.0).sqrt()
}

/// Gauss-Jordan inverse with partial pivoting; returns `None` when a pivot
/// falls below `pivot_tol`. An oracle for the full-column-rank identity
/// `pinv(A) = (AᵀA)⁻¹Aᵀ`.
pub fn gauss_jordan_inverse(a: &Matrix, pivot_tol: f64) -> Option<Matrix> {
    let n = a.nrows();
    if a.ncols() != n {
        return None;
    }
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(pivot, col)].abs() {
                pivot = r;
            }
        }
        if m[(pivot, col)].abs() < pivot_tol {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
                let tmp = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = tmp;
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[(r, col)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                m[(r, j)] -= factor * m[(col, j)];
                inv[(r, j)] -= factor * inv[(col, j)];
            }
        }
    }
    Some(inv)
}

/// Residuals of the four defining pseudoinverse equations.
pub fn penrose_residuals(a: &Matrix, p: &Matrix) -> [f64; 4] {
    let apa = a.matmul(p).matmul(a);
    let pap = p.matmul(a).matmul(p);
    let ap = a.matmul(p);
    let pa = p.matmul(a);
    [
        apa.sub(a).max_abs(),
        pap.sub(p).max_abs(),
        ap.transpose().sub(&ap).max_abs(),
        pa.transpose().sub(&pa).max_abs(),
    ]
}
