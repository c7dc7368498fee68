//! Real polynomials stored as coefficient slices in descending degree.
//!
//! `[a_n, ..., a_1, a_0]` represents `a_n s^n + ... + a_1 s + a_0`. The zero
//! polynomial is `[0.0]`; every routine here returns trimmed output.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Drops leading zeros. An all-zero input becomes `[0.0]`.
pub fn trim(p: &[f64]) -> Vec<f64> {
    match p.iter().position(|&c| c != 0.0) {
        Some(i) => p[i..].to_vec(),
        None => vec![0.0],
    }
}

pub fn is_zero(p: &[f64]) -> bool {
    p.iter().all(|&c| c == 0.0)
}

/// Degree of the trimmed polynomial; the zero polynomial has degree 0.
pub fn degree(p: &[f64]) -> usize {
    trim(p).len() - 1
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &c) in a.iter().enumerate() {
        out[n - a.len() + i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[n - b.len() + i] += c;
    }
    trim(&out)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    add(a, &scale(b, -1.0))
}

pub fn scale(p: &[f64], k: f64) -> Vec<f64> {
    trim(&p.iter().map(|c| c * k).collect::<Vec<_>>())
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&out)
}

pub fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_complex(p: &[f64], s: Complex64) -> Complex64 {
    p.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

pub fn derivative(p: &[f64]) -> Vec<f64> {
    let n = p.len() - 1;
    if n == 0 {
        return vec![0.0];
    }
    trim(
        &p[..n]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (n - i) as f64)
            .collect::<Vec<_>>(),
    )
}

/// Euclidean 2-norm of the coefficient vector.
pub fn norm(p: &[f64]) -> f64 {
    p.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Long division `dividend = quotient * divisor + remainder` with
/// `deg(remainder) < deg(divisor)`.
pub fn divide(dividend: &[f64], divisor: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = trim(divisor);
    if is_zero(&d) {
        return Err(Error::ZeroDivisor);
    }
    let mut r = trim(dividend);
    if r.len() < d.len() {
        return Ok((vec![0.0], r));
    }
    let qlen = r.len() - d.len() + 1;
    let mut q = vec![0.0; qlen];
    for i in 0..qlen {
        let coef = r[i] / d[0];
        q[i] = coef;
        for (j, &dj) in d.iter().enumerate() {
            r[i + j] -= coef * dj;
        }
        r[i] = 0.0;
    }
    let rem = trim(&r[qlen..]);
    Ok((trim(&q), rem))
}

/// Roots via eigenvalues of the companion matrix, polished by Newton steps
/// on the original coefficients.
pub fn roots(p: &[f64]) -> Vec<Complex64> {
    let p = trim(p);
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[0];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -p[j + 1] / lead;
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    let dp = derivative(&p);
    let mut rs: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    for r in rs.iter_mut() {
        *r = polish(&p, &dp, *r);
    }
    rs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    rs
}

fn polish(p: &[f64], dp: &[f64], mut z: Complex64) -> Complex64 {
    let mut best = eval_complex(p, z).norm();
    for _ in 0..8 {
        let fz = eval_complex(p, z);
        let dfz = eval_complex(dp, z);
        if dfz.norm() == 0.0 {
            break;
        }
        let candidate = z - fz / dfz;
        let res = eval_complex(p, candidate).norm();
        if !(res < best) {
            break;
        }
        best = res;
        z = candidate;
    }
    z
}

/// Monic real polynomial with the given roots. Roots are expected to come in
/// conjugate pairs; the imaginary residue of the product is discarded.
pub fn from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        acc = next;
    }
    acc.iter().map(|c| c.re).collect()
}
