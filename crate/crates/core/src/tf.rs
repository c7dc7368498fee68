use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;

/// Default tolerance used to merge numerator and denominator roots.
pub const CANCEL_TOL: f64 = 1e-8;

/// SISO rational transfer function `num(s) / den(s)`, coefficients in
/// descending degree. Coefficient lists are kept trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TransferFunction {
    pub fn new(num: impl Into<Vec<f64>>, den: impl Into<Vec<f64>>) -> Result<Self> {
        let num = poly::trim(&num.into());
        let den = poly::trim(&den.into());
        if poly::is_zero(&den) {
            return Err(Error::InvalidArgument("denominator is zero".into()));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { num, den })
    }

    pub fn gain(k: f64) -> Self {
        Self {
            num: vec![k],
            den: vec![1.0],
        }
    }

    /// `k / (tau s + 1)`.
    pub fn first_order(k: f64, tau: f64) -> Self {
        Self {
            num: vec![k],
            den: poly::trim(&[tau, 1.0]),
        }
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    /// Degree of the denominator.
    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        poly::is_zero(&self.num)
    }

    pub fn is_proper(&self) -> bool {
        self.is_zero() || self.num.len() <= self.den.len()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.is_zero() || self.num.len() < self.den.len()
    }

    /// Evaluates at a complex point without any pole check.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        poly::eval_complex(&self.num, s) / poly::eval_complex(&self.den, s)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            num: poly::scale(&self.num, k),
            den: self.den.clone(),
        }
    }

    /// Same function with a monic denominator.
    pub fn normalized(&self) -> Self {
        let lead = self.den[0];
        Self {
            num: poly::scale(&self.num, 1.0 / lead),
            den: poly::scale(&self.den, 1.0 / lead),
        }
    }

    /// `1 / self`.
    pub fn reciprocal(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn poles(&self) -> Vec<Complex64> {
        poly::roots(&self.den)
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        if self.is_zero() {
            return Vec::new();
        }
        poly::roots(&self.num)
    }

    /// True iff every pole has a strictly negative real part.
    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.re < 0.0)
    }

    /// Removes numerator/denominator root pairs with `|z - p| < tol (1 + |p|)`.
    pub fn cancel(&self, tol: f64) -> Self {
        if self.is_zero() {
            return Self::gain(0.0);
        }
        let mut zeros = self.zeros();
        let mut poles = self.poles();
        let mut cancelled = false;
        let mut i = 0;
        while i < poles.len() {
            let p = poles[i];
            let nearest = zeros
                .iter()
                .enumerate()
                .map(|(j, z)| (j, (z - p).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match nearest {
                Some((j, dist)) if dist < tol * (1.0 + p.norm()) => {
                    zeros.remove(j);
                    poles.remove(i);
                    cancelled = true;
                }
                _ => i += 1,
            }
        }
        if !cancelled {
            return self.clone();
        }
        Self {
            num: poly::scale(&poly::from_roots(&zeros), self.num[0]),
            den: poly::scale(&poly::from_roots(&poles), self.den[0]),
        }
    }

    /// Largest coefficient difference after both sides are made monic,
    /// relative to the largest coefficient of `reference`. Infinite when the
    /// degrees differ.
    pub fn coefficient_error(&self, reference: &Self) -> f64 {
        let a = self.normalized();
        let b = reference.normalized();
        if a.den.len() != b.den.len() {
            return f64::INFINITY;
        }
        let width = a.num.len().max(b.num.len());
        let pad = |p: &[f64]| {
            let mut v = vec![0.0; width - p.len()];
            v.extend_from_slice(p);
            v
        };
        let (an, bn) = (pad(&a.num), pad(&b.num));
        let scale = bn.iter().chain(&b.den).fold(0.0_f64, |m, c| m.max(c.abs()));
        let diff = an
            .iter()
            .zip(&bn)
            .chain(a.den.iter().zip(&b.den))
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        diff / scale
    }
}

impl Add for &TransferFunction {
    type Output = TransferFunction;

    fn add(self, rhs: Self) -> TransferFunction {
        if self.den == rhs.den {
            return TransferFunction {
                num: poly::add(&self.num, &rhs.num),
                den: self.den.clone(),
            };
        }
        TransferFunction {
            num: poly::add(&poly::mul(&self.num, &rhs.den), &poly::mul(&rhs.num, &self.den)),
            den: poly::mul(&self.den, &rhs.den),
        }
    }
}

impl Neg for &TransferFunction {
    type Output = TransferFunction;

    fn neg(self) -> TransferFunction {
        self.scaled(-1.0)
    }
}

impl Sub for &TransferFunction {
    type Output = TransferFunction;

    fn sub(self, rhs: Self) -> TransferFunction {
        self + &(-rhs)
    }
}

impl Mul for &TransferFunction {
    type Output = TransferFunction;

    fn mul(self, rhs: Self) -> TransferFunction {
        TransferFunction {
            num: poly::mul(&self.num, &rhs.num),
            den: poly::mul(&self.den, &rhs.den),
        }
    }
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", PolyDisplay(&self.num), PolyDisplay(&self.den))
    }
}

struct PolyDisplay<'a>(&'a [f64]);

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len() - 1;
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match n - i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c} s")?,
                p => write!(f, "{c} s^{p}")?,
            }
        }
        write!(f, ")")
    }
}
