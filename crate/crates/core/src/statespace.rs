use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::tf::TransferFunction;

/// SISO realization `x' = A x + B u`, `y = C x + D u`. Order zero is a pure
/// gain.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: RowDVector<f64>,
    d: f64,
}

/// Eigenvalues of `A` together with the Hurwitz flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Poles {
    pub values: Vec<Complex64>,
    pub stable: bool,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>, d: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(Error::InvalidArgument(format!(
                "inconsistent realization dimensions: A {}x{}, B {}, C {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn gain(d: f64) -> Self {
        Self {
            a: DMatrix::zeros(0, 0),
            b: DVector::zeros(0),
            c: RowDVector::zeros(0),
            d,
        }
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &RowDVector<f64> {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Similarity transform `(T A T^-1, T B, C T^-1, D)`.
    pub fn transformed(&self, t: &DMatrix<f64>, t_inv: &DMatrix<f64>) -> Self {
        Self {
            a: t * &self.a * t_inv,
            b: t * &self.b,
            c: &self.c * t_inv,
            d: self.d,
        }
    }

    /// `C (sI - A)^-1 B + D` by a dense complex solve.
    pub fn eval(&self, s: Complex64) -> Option<Complex64> {
        let n = self.order();
        if n == 0 {
            return Some(Complex64::new(self.d, 0.0));
        }
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - self.a[(i, j)]
        });
        let rhs = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(self.b[i], 0.0));
        let x = m.lu().solve(&rhs)?;
        let y = (0..n).fold(Complex64::new(0.0, 0.0), |acc, i| acc + x[i] * self.c[i]);
        Some(y + self.d)
    }
}

/// Eigenvalues of `A` and whether they all lie in the open left half-plane.
pub fn poles(ss: &StateSpace) -> Poles {
    let values: Vec<Complex64> = if ss.order() == 0 {
        Vec::new()
    } else {
        ss.a.complex_eigenvalues().iter().copied().collect()
    };
    let stable = values.iter().all(|p| p.re < 0.0);
    Poles { values, stable }
}

/// Controllable canonical form of a coprime transfer function. Numerator and
/// denominator roots closer than `tol (1 + |p|)` are cancelled first, so the
/// result is controllable and observable.
pub fn minimal_state_space(tf: &TransferFunction, tol: f64) -> Result<StateSpace> {
    if !tf.is_proper() {
        return Err(Error::ImproperTransfer {
            num: tf.num().len() - 1,
            den: tf.den().len() - 1,
        });
    }
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let tf = tf.cancel(tol).normalized();
    let n = tf.order();
    let den = tf.den();
    let mut num = vec![0.0; n + 1 - tf.num().len()];
    num.extend_from_slice(tf.num());
    let d = num[0];
    if n == 0 || tf.is_zero() {
        return Ok(StateSpace::gain(if n == 0 { d } else { 0.0 }));
    }
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        a[(0, j)] = -den[j + 1];
    }
    for i in 1..n {
        a[(i, i - 1)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[0] = 1.0;
    let c = RowDVector::from_fn(n, |_, j| num[j + 1] - d * den[j + 1]);
    StateSpace::new(a, b, c, d)
}

/// Transfer function of a realization. The denominator is the characteristic
/// polynomial of `A`; the numerator uses
/// `det(sI - A + BC) = det(sI - A) (1 + C (sI - A)^-1 B)`.
/// Near-common roots are cancelled with tolerance `tol`.
pub fn transfer_of(ss: &StateSpace, tol: f64) -> TransferFunction {
    if ss.order() == 0 {
        return TransferFunction::gain(ss.d);
    }
    let char_a = charpoly(&ss.a);
    let closed = &ss.a - &ss.b * &ss.c;
    let char_closed = charpoly(&closed);
    let num = poly::add(&poly::sub(&char_closed, &char_a), &poly::scale(&char_a, ss.d));
    let tf = TransferFunction::new(num, char_a).expect("monic characteristic polynomial");
    tf.cancel(tol)
}

fn charpoly(a: &DMatrix<f64>) -> Vec<f64> {
    let eig: Vec<Complex64> = a.complex_eigenvalues().iter().copied().collect();
    poly::from_roots(&eig)
}
