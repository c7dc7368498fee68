//! Continuous Lyapunov equation `A X + X Aᵀ + Q = 0` for Hurwitz `A`.
//!
//! The primary path is Bartels–Stewart: reduce `A` to real Schur form
//! `A = U T Uᵀ`, solve `T Y + Y Tᵀ = -Uᵀ Q U` block by block from the bottom
//! right corner, and map back with `X = U Y Uᵀ`. Small systems whose Schur
//! iteration fails fall back to the Kronecker form
//! `(I ⊗ A + A ⊗ I) vec X = -vec Q`.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues with real part at or above this threshold are rejected.
pub const HURWITZ_MARGIN: f64 = -1e-12;

const KRONECKER_MAX_ORDER: usize = 20;
const REFINEMENT_STEPS: usize = 2;

pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::InvalidArgument(
            "Lyapunov operands must be square and of equal size".into(),
        ));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if let Some(worst) = a.complex_eigenvalues().iter().map(|e| e.re).max_by(f64::total_cmp) {
        if worst >= HURWITZ_MARGIN {
            return Err(Error::NotHurwitz(worst));
        }
    }

    let solver = Solver::new(a)?;
    let q_sym = symmetrize(q);
    let mut x = solver.solve(&q_sym)?;
    let q_norm = q_sym.norm();
    for _ in 0..REFINEMENT_STEPS {
        let residual = residual(a, &x, &q_sym);
        if residual.norm() <= 1e-12 * q_norm.max(f64::MIN_POSITIVE) {
            break;
        }
        x += solver.solve(&symmetrize(&residual))?;
        x = symmetrize(&x);
    }
    Ok(x)
}

/// `A X + X Aᵀ + Q`.
pub fn residual(a: &DMatrix<f64>, x: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    a * x + x * a.transpose() + q
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

enum Solver {
    Schur {
        u: DMatrix<f64>,
        t: DMatrix<f64>,
        blocks: Vec<(usize, usize)>,
    },
    Kronecker(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Solver {
    fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if let Some(schur) = Schur::try_new(a.clone(), f64::EPSILON, 10_000) {
            let (u, t) = schur.unpack();
            let blocks = diagonal_blocks(&t);
            return Ok(Solver::Schur { u, t, blocks });
        }
        if n <= KRONECKER_MAX_ORDER {
            let eye = DMatrix::<f64>::identity(n, n);
            let k = eye.kronecker(a) + a.kronecker(&eye);
            return Ok(Solver::Kronecker(k.lu()));
        }
        Err(Error::Numerical("real Schur decomposition did not converge".into()))
    }

    fn solve(&self, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Solver::Schur { u, t, blocks } => {
                let f = u.transpose() * q * u;
                let y = quasi_triangular_solve(t, blocks, &f)?;
                Ok(symmetrize(&(u * y * u.transpose())))
            }
            Solver::Kronecker(lu) => {
                let n = q.nrows();
                let rhs = DVector::from_iterator(n * n, q.iter().map(|v| -v));
                let sol = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Numerical("singular Kronecker system".into()))?;
                Ok(symmetrize(&DMatrix::from_vec(n, n, sol.as_slice().to_vec())))
            }
        }
    }
}

/// `(start, size)` of the 1×1 and 2×2 diagonal blocks of a quasi-triangular
/// matrix.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        let coupled = i + 1 < n && {
            let scale = t[(i, i)].abs() + t[(i + 1, i + 1)].abs();
            t[(i + 1, i)].abs() > f64::EPSILON * scale.max(f64::MIN_POSITIVE)
        };
        if coupled {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Solves `T Y + Y Tᵀ = -F` for quasi-upper-triangular `T`.
fn quasi_triangular_solve(t: &DMatrix<f64>, blocks: &[(usize, usize)], f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let mut y = DMatrix::<f64>::zeros(n, n);
    for &(ks, kl) in blocks.iter().rev() {
        for &(is, il) in blocks.iter().rev() {
            // rhs = -F_ik - sum_{l>i} T_il Y_lk - sum_{m>k} Y_im T_kmᵀ
            let mut rhs = -f.view((is, ks), (il, kl)).clone_owned();
            let tail_i = is + il;
            if tail_i < n {
                rhs -= t.view((is, tail_i), (il, n - tail_i)) * y.view((tail_i, ks), (n - tail_i, kl));
            }
            let tail_k = ks + kl;
            if tail_k < n {
                rhs -= y.view((is, tail_k), (il, n - tail_k)) * t.view((ks, tail_k), (kl, n - tail_k)).transpose();
            }
            let tii = t.view((is, is), (il, il)).clone_owned();
            let tkk = t.view((ks, ks), (kl, kl)).clone_owned();
            let block = small_sylvester(&tii, &tkk, &rhs)?;
            y.view_mut((is, ks), (il, kl)).copy_from(&block);
        }
    }
    Ok(y)
}

/// Solves `P Y + Y Sᵀ = R` with `P`, `S` of size at most 2.
fn small_sylvester(p: &DMatrix<f64>, s: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (pl, sl) = (p.nrows(), s.nrows());
    if pl == 1 && sl == 1 {
        let denom = p[(0, 0)] + s[(0, 0)];
        if denom == 0.0 {
            return Err(Error::Numerical("singular Sylvester block".into()));
        }
        return Ok(DMatrix::from_element(1, 1, r[(0, 0)] / denom));
    }
    let k = DMatrix::<f64>::identity(sl, sl).kronecker(p) + s.kronecker(&DMatrix::<f64>::identity(pl, pl));
    let rhs = DVector::from_column_slice(r.as_slice());
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Sylvester block".into()))?;
    Ok(DMatrix::from_column_slice(pl, sl, sol.as_slice()))
}
