//! Frequency-weighted balanced truncation and the two reduction paths for
//! coherent dynamics.
//!
//! The weight sits on the plant output. With a minimal realization
//! `(A_W, B_W, C_W, D_W)` of `W(s)`, the extended system is
//!
//! ```text
//!     [ A       0   | B ]
//!     [ B_W C   A_W | 0 ]
//!     [ D_W C   C_W | 0 ]
//! ```
//!
//! Its gramians are restricted to the plant block, balanced through
//! `X^½ Y X^½ = V Σ² Vᵀ`, and truncated. The transformation used here,
//! `T⁻¹ = X^½ V Σ^-½`, leaves both restricted gramians equal to `Σ`, the
//! diagonal of weighted Hankel singular values.

use nalgebra::{DMatrix, DVector, RowDVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lyapunov::solve_lyapunov;
use crate::network::{aggregate_turbine, close_swing_loop, coherent_aggregate, CoherentGroup};
use crate::partial_fractions::{partial_fractions, LagTerm};
use crate::poly;
use crate::response::dc_gain;
use crate::statespace::{minimal_state_space, poles, transfer_of, StateSpace};
use crate::tf::{TransferFunction, CANCEL_TOL};

/// Hankel values below this fraction of the largest are treated as zero.
pub const HANKEL_FLOOR: f64 = 1e-10;

/// Stable frequency weight with finite, nonzero DC gain.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyWeight {
    tf: TransferFunction,
    realization: StateSpace,
}

impl FrequencyWeight {
    pub fn new(tf: TransferFunction) -> Result<Self> {
        if !tf.is_proper() {
            return Err(Error::ImproperTransfer {
                num: tf.num().len() - 1,
                den: tf.den().len() - 1,
            });
        }
        let realization = minimal_state_space(&tf, CANCEL_TOL)?;
        let p = poles(&realization);
        if !p.stable {
            let worst = p.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::UnstableSystem(worst));
        }
        let w0 = dc_gain(&tf)?;
        if w0 == 0.0 || !w0.is_finite() {
            return Err(Error::InvalidArgument("weight must have finite nonzero DC gain".into()));
        }
        Ok(Self { tf, realization })
    }

    /// `W(s) = 1`.
    pub fn unity() -> Self {
        Self {
            tf: TransferFunction::gain(1.0),
            realization: StateSpace::gain(1.0),
        }
    }

    /// `(s + zero) / (s + pole)`.
    pub fn lag_lead(zero: f64, pole: f64) -> Result<Self> {
        Self::new(TransferFunction::new(vec![1.0, zero], vec![1.0, pole])?)
    }

    pub fn transfer(&self) -> &TransferFunction {
        &self.tf
    }

    pub fn realization(&self) -> &StateSpace {
        &self.realization
    }
}

/// Full-order balanced realization together with its weighted Hankel
/// singular values (descending).
#[derive(Debug, Clone)]
pub struct BalancedRealization {
    pub system: StateSpace,
    pub hankel: Vec<f64>,
    /// Gramians of the plant block before balancing.
    pub controllability: DMatrix<f64>,
    pub observability: DMatrix<f64>,
    /// Balancing transformation and its inverse (only leading `rank` rows /
    /// columns are meaningful when Hankel values vanish).
    pub t: DMatrix<f64>,
    pub t_inv: DMatrix<f64>,
}

/// Plant-block gramians `(X_c, Y_o)` of the output-weighted extended system.
pub fn weighted_gramians(sys: &StateSpace, w: &FrequencyWeight) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = sys.order();
    let wr = w.realization();
    let nw = wr.order();
    let dim = n + nw;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    a.view_mut((0, 0), (n, n)).copy_from(sys.a());
    if nw > 0 {
        a.view_mut((n, n), (nw, nw)).copy_from(wr.a());
        a.view_mut((n, 0), (nw, n)).copy_from(&(wr.b() * sys.c()));
    }
    let mut b = DVector::<f64>::zeros(dim);
    b.rows_mut(0, n).copy_from(sys.b());
    let mut c = RowDVector::<f64>::zeros(dim);
    c.columns_mut(0, n).copy_from(&(sys.c() * wr.d()));
    if nw > 0 {
        c.columns_mut(n, nw).copy_from(wr.c());
    }
    let xbar = solve_lyapunov(&a, &(&b * b.transpose()))?;
    let ybar = solve_lyapunov(&a.transpose(), &(c.transpose() * &c))?;
    Ok((
        xbar.view((0, 0), (n, n)).clone_owned(),
        ybar.view((0, 0), (n, n)).clone_owned(),
    ))
}

fn check_plant(sys: &StateSpace) -> Result<()> {
    if sys.d() != 0.0 {
        return Err(Error::NotStrictlyProper);
    }
    let p = poles(sys);
    if !p.stable {
        let worst = p.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::UnstableInput(worst));
    }
    Ok(())
}

/// Symmetric PSD square root; negative eigenvalues (rounding) are clipped.
fn psd_sqrt(x: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((x + x.transpose()) * 0.5);
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

struct Balancing {
    hankel: Vec<f64>,
    /// `X^½ V`
    left: DMatrix<f64>,
    /// `Wᵀ Y^½`
    right: DMatrix<f64>,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

/// `Y^½ X^½ = W Σ Vᵀ`, so `X^½ Y X^½ = V Σ² Vᵀ` with the Hankel values on
/// the diagonal of `Σ`.
fn balancing(sys: &StateSpace, w: &FrequencyWeight) -> Result<Balancing> {
    check_plant(sys)?;
    let (x, y) = weighted_gramians(sys, w)?;
    let rx = psd_sqrt(&x);
    let ry = psd_sqrt(&y);
    let svd = (&ry * &rx).svd(true, true);
    let (Some(wm), Some(vt)) = (svd.u, svd.v_t) else {
        return Err(Error::Numerical("SVD of the gramian product failed".into()));
    };
    let n = sys.order();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let hankel = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left = &rx * DMatrix::from_fn(n, n, |i, j| vt[(order[j], i)]);
    let right = DMatrix::from_fn(n, n, |i, j| wm[(j, order[i])]) * &ry;
    Ok(Balancing {
        hankel,
        left,
        right,
        x,
        y,
    })
}

/// Weighted Hankel singular values in descending order.
pub fn weighted_hankel_values(sys: &StateSpace, w: &FrequencyWeight) -> Result<Vec<f64>> {
    Ok(balancing(sys, w)?.hankel)
}

fn significant(hankel: &[f64]) -> usize {
    let top = hankel.first().copied().unwrap_or(0.0);
    hankel.iter().filter(|&&s| s > HANKEL_FLOOR * top).count()
}

/// Leading `k` rows of `T = Σ^-½ Wᵀ Y^½` and columns of `T⁻¹ = X^½ V Σ^-½`.
fn projection(bal: &Balancing, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = bal.left.nrows();
    let mut t = DMatrix::<f64>::zeros(k, n);
    let mut t_inv = DMatrix::<f64>::zeros(n, k);
    for j in 0..k {
        let s = bal.hankel[j];
        t.row_mut(j).copy_from(&(bal.right.row(j) * s.powf(-0.5)));
        t_inv.column_mut(j).copy_from(&(bal.left.column(j) * s.powf(-0.5)));
    }
    (t, t_inv)
}

/// Balanced realization of the full plant (all Hankel values must be
/// significant).
pub fn balanced_realization(sys: &StateSpace, w: &FrequencyWeight) -> Result<BalancedRealization> {
    let bal = balancing(sys, w)?;
    let n = sys.order();
    let available = significant(&bal.hankel);
    if available < n {
        return Err(Error::OrderTooHigh {
            requested: n,
            available,
        });
    }
    let (t, t_inv) = projection(&bal, n);
    Ok(BalancedRealization {
        system: sys.transformed(&t, &t_inv),
        hankel: bal.hankel,
        controllability: bal.x,
        observability: bal.y,
        t,
        t_inv,
    })
}

/// Order-`k` frequency-weighted balanced truncation of a minimal, strictly
/// proper, stable plant.
pub fn fw_balanced_truncation(sys: &StateSpace, w: &FrequencyWeight, k: usize) -> Result<StateSpace> {
    let n = sys.order();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "truncation order must lie in 1..={n}, got {k}"
        )));
    }
    let bal = balancing(sys, w)?;
    let available = significant(&bal.hankel);
    if k > available {
        return Err(Error::OrderTooHigh {
            requested: k,
            available,
        });
    }
    let (t, t_inv) = projection(&bal, k);
    Ok(sys.transformed(&t, &t_inv))
}

fn reduce_transfer(tf: &TransferFunction, w: &FrequencyWeight, k: usize) -> Result<TransferFunction> {
    let ss = minimal_state_space(tf, CANCEL_TOL)?;
    if k > ss.order() {
        return Err(Error::OrderTooHigh {
            requested: k,
            available: ss.order(),
        });
    }
    let reduced = fw_balanced_truncation(&ss, w, k)?;
    Ok(transfer_of(&reduced, CANCEL_TOL))
}

fn require_pathway_order(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "reduction pathways need order >= 2, got {k}"
        )));
    }
    Ok(())
}

/// `g̃_{t,order}`: weighted truncation of the aggregate turbine dynamics.
pub fn reduced_turbine(group: &CoherentGroup, order: usize, w: &FrequencyWeight) -> Result<TransferFunction> {
    reduce_transfer(&aggregate_turbine(group), w, order)
}

/// `g̃_k^tb = 1 / (m̂ s + d̂ + g̃_{t,k-1}(s))`.
pub fn reduce_turbine_path(group: &CoherentGroup, k: usize, w: &FrequencyWeight) -> Result<TransferFunction> {
    require_pathway_order(k)?;
    let turbine = reduced_turbine(group, k - 1, w)?;
    Ok(close_swing_loop(
        group.aggregate_inertia(),
        group.aggregate_damping(),
        &turbine,
    ))
}

/// `g̃_k^cl`: weighted truncation of the minimal realization of `ĝ`.
pub fn reduce_closed_loop_path(group: &CoherentGroup, k: usize, w: &FrequencyWeight) -> Result<TransferFunction> {
    require_pathway_order(k)?;
    reduce_transfer(&coherent_aggregate(group), w, k)
}

/// Rescales the numerator so the DC gain equals `target`.
pub fn match_dc(reduced: &TransferFunction, target: f64) -> Result<TransferFunction> {
    if !target.is_finite() || target == 0.0 {
        return Err(Error::InvalidArgument("DC target must be finite and nonzero".into()));
    }
    let current = dc_gain(reduced)?;
    if current == target {
        return Ok(reduced.clone());
    }
    if current == 0.0 {
        return Err(Error::InvalidArgument("reduced model has zero DC gain".into()));
    }
    Ok(reduced.scaled(target / current))
}

/// Equivalent swing machine with up to two parallel turbines.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentGenerator {
    pub inertia: f64,
    pub damping: f64,
    /// `(r̃⁻¹, τ̃)` as `LagTerm { gain, time_constant }`.
    pub turbines: Vec<LagTerm>,
    /// Set when some constant is not positive or the turbine poles are
    /// complex.
    pub residual_flag: bool,
    /// Raw division `D = Q N + R` with the numerator normalized monic.
    pub quotient: Vec<f64>,
    pub remainder: Vec<f64>,
    pub divisor: Vec<f64>,
}

impl EquivalentGenerator {
    /// `1 / (m̃ s + d̃ + sum r̃_i / (τ̃_i s + 1))`.
    pub fn reconstruct(&self) -> TransferFunction {
        let turbine = self
            .turbines
            .iter()
            .fold(TransferFunction::gain(0.0), |acc, t| &acc + &t.transfer());
        close_swing_loop(self.inertia, self.damping, &turbine)
    }
}

/// Reads a 2nd or 3rd order model as `1 / (Q(s) + R(s)/N(s))` with
/// `Q = m̃ s + d̃` and `R/N` split into first-order turbines.
pub fn interpret_reduced(tf: &TransferFunction) -> Result<EquivalentGenerator> {
    let order = tf.order();
    if !(order == 2 || order == 3) || tf.is_zero() || tf.num().len() != order {
        return Err(Error::WrongOrder(order));
    }
    let lead = tf.num()[0];
    let n = poly::scale(tf.num(), 1.0 / lead);
    let d = poly::scale(tf.den(), 1.0 / lead);
    let (q, r) = poly::divide(&d, &n)?;
    let (inertia, damping) = match q.as_slice() {
        [m, d] => (*m, *d),
        [d] => (0.0, *d),
        _ => return Err(Error::WrongOrder(order)),
    };
    let mut flag = !(inertia > 0.0 && damping > 0.0);
    let mut turbines = Vec::new();
    if !poly::is_zero(&r) {
        match partial_fractions(&TransferFunction::new(r.clone(), n.clone())?) {
            Ok(pf) => {
                flag |= pf.terms.iter().any(|t| !(t.gain > 0.0 && t.time_constant > 0.0));
                turbines = pf.terms;
            }
            Err(_) => flag = true,
        }
    }
    Ok(EquivalentGenerator {
        inertia,
        damping,
        turbines,
        residual_flag: flag,
        quotient: q,
        remainder: r,
        divisor: n,
    })
}
