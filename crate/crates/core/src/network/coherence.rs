//! Network transfer matrix `T(s) = (diag{g_i^-1(s)} + L/s)^-1` and the
//! quantities used to measure how close it is to the coherent response
//! `ĝ(s) 1 1ᵀ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::response::{zoh_discretize, Trajectory};

use super::aggregate::CoherentGroup;
use super::generator::GeneratorModel;
use super::graph::NetworkSpec;

/// Condition number above which the network system matrix counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

fn check_sizes(group: &CoherentGroup, net: &NetworkSpec) -> Result<()> {
    if group.len() != net.size() {
        return Err(Error::InvalidArgument(format!(
            "group has {} generators but the network has {} buses",
            group.len(),
            net.size()
        )));
    }
    Ok(())
}

/// `ĝ(s)` evaluated from the member models, `1 / sum g_i^-1(s)`.
fn coherent_at(group: &CoherentGroup, s: Complex64) -> Complex64 {
    let total: Complex64 = group.generators().iter().map(|g| g.inverse_at(s)).sum();
    total.inv()
}

/// `T(j eta)` from one complex linear solve per column.
pub fn network_response(group: &CoherentGroup, net: &NetworkSpec, eta: f64) -> Result<DMatrix<Complex64>> {
    check_sizes(group, net)?;
    if eta == 0.0 || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "network response needs a finite nonzero frequency, got {eta}"
        )));
    }
    let n = group.len();
    let s = Complex64::new(0.0, eta);
    let l = net.laplacian();
    let system = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        let coupling = Complex64::new(l[(i, j)], 0.0) / s;
        if i == j {
            coupling + group.generators()[i].inverse_at(s)
        } else {
            coupling
        }
    });
    let sv = system.clone().singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)));
    let cond = smax / smin;
    if !(cond <= SINGULAR_CONDITION) {
        return Err(Error::SingularAtFrequency { eta, cond });
    }
    system
        .lu()
        .solve(&DMatrix::<Complex64>::identity(n, n))
        .ok_or(Error::SingularAtFrequency { eta, cond })
}

/// `grid_size` logarithmically spaced frequencies on `[1e-3 eta0, eta0]`.
pub fn band_grid(eta0: f64, grid_size: usize) -> Vec<f64> {
    let lo = (1e-3 * eta0).log10();
    let hi = eta0.log10();
    if grid_size < 2 {
        return vec![eta0];
    }
    (0..grid_size)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (grid_size - 1) as f64))
        .collect()
}

fn validate_band(eta0: f64, grid_size: usize) -> Result<()> {
    if !(eta0 > 0.0) || grid_size == 0 {
        return Err(Error::InvalidArgument("need eta0 > 0 and a nonempty grid".into()));
    }
    Ok(())
}

/// `max ‖T(j eta) - ĝ(j eta) 1 1ᵀ‖₂` over the band `±[1e-3 eta0, eta0]`.
///
/// `T(-j eta)` is the entrywise conjugate of `T(j eta)` and has the same
/// singular values, so only the positive half of the symmetric grid is
/// evaluated.
pub fn coherence_gap(group: &CoherentGroup, net: &NetworkSpec, eta0: f64, grid_size: usize) -> Result<f64> {
    check_sizes(group, net)?;
    validate_band(eta0, grid_size)?;
    let n = group.len();
    if n == 1 {
        return Ok(0.0);
    }
    let mut worst = 0.0_f64;
    for eta in band_grid(eta0, grid_size) {
        let t = network_response(group, net, eta)?;
        let ghat = coherent_at(group, Complex64::new(0.0, eta));
        let diff = t.map(|v| v - ghat);
        let norm = diff.singular_values().iter().copied().fold(0.0, f64::max);
        worst = worst.max(norm);
    }
    Ok(worst)
}

/// Band maxima `M1 = max |n ĝ(j eta)|` and `M2 = max_i |g_i^-1(j eta)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandConstants {
    pub m1: f64,
    pub m2: f64,
}

/// Grid maxima over `{0} ∪ [1e-3 eta0, eta0]`; negative frequencies mirror
/// the positive ones in magnitude.
pub fn band_constants(group: &CoherentGroup, eta0: f64, grid_size: usize) -> Result<BandConstants> {
    validate_band(eta0, grid_size)?;
    let n = group.len() as f64;
    let mut m1 = 0.0_f64;
    let mut m2 = 0.0_f64;
    for eta in std::iter::once(0.0).chain(band_grid(eta0, grid_size)) {
        let s = Complex64::new(0.0, eta);
        let ghat = coherent_at(group, s);
        if !ghat.is_finite() {
            return Err(Error::IntegratorPresent);
        }
        m1 = m1.max(n * ghat.norm());
        for g in group.generators() {
            m2 = m2.max(g.inverse_at(s).norm());
        }
    }
    Ok(BandConstants { m1, m2 })
}

/// Worst-case right-hand side of the banded coherence bound with
/// `x = lambda2 / eta0`:
/// `(M1² M2² + 2 M1 M2 + M1 M2² / (x - M2)) / (x - M2 - M1 M2²) + 1 / (x - M2)`.
pub fn lemma2_bound(m1: f64, m2: f64, lambda2: f64, eta0: f64) -> Result<f64> {
    if !(eta0 > 0.0) {
        return Err(Error::InvalidArgument("eta0 > 0".into()));
    }
    let x = lambda2 / eta0;
    let threshold = m2 + m1 * m2 * m2;
    if !(x > threshold) {
        return Err(Error::NotApplicable { ratio: x, threshold });
    }
    let gap = x - m2;
    let head = (m1 * m1 * m2 * m2 + 2.0 * m1 * m2 + m1 * m2 * m2 / gap) / (x - threshold);
    Ok(head + 1.0 / gap)
}

/// Centre-of-inertia frequency `(sum m_i w_i) / (sum m_i)`, pointwise.
pub fn coi_trajectory(inertias: &[f64], trajs: &[Trajectory]) -> Result<Trajectory> {
    if inertias.len() != trajs.len() || trajs.is_empty() {
        return Err(Error::InvalidArgument(
            "need one positive inertia per trajectory".into(),
        ));
    }
    if inertias.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument("inertias must be positive".into()));
    }
    let first = &trajs[0];
    if trajs.iter().any(|t| !t.same_grid(first)) {
        return Err(Error::GridMismatch);
    }
    let total: f64 = inertias.iter().sum();
    let values = (0..first.len())
        .map(|k| inertias.iter().zip(trajs).map(|(m, t)| m * t.values()[k]).sum::<f64>() / total)
        .collect();
    Trajectory::new(first.times().to_vec(), values)
}

/// State-space model of the coupled network: every generator's own states
/// followed by `n - 1` angle coordinates along the nonzero Laplacian modes.
/// Inputs are bus disturbances, outputs bus frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRealization {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl CoupledRealization {
    pub fn new(group: &CoherentGroup, net: &NetworkSpec) -> Result<Self> {
        check_sizes(group, net)?;
        let n = group.len();
        let gens = group.generators();
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0;
        for g in gens {
            offsets.push(total);
            total += g.state_count();
        }
        let (modes, _) = net.nonzero_modes();
        let angle0 = total;
        let dim = total + modes.ncols();
        // power drawn at bus i per unit of angle coordinate j
        let coupling = net.laplacian() * &modes;

        let mut a = DMatrix::<f64>::zeros(dim, dim);
        let mut b = DMatrix::<f64>::zeros(dim, n);
        let mut c = DMatrix::<f64>::zeros(n, dim);
        for (i, g) in gens.iter().enumerate() {
            let w = offsets[i];
            c[(i, w)] = 1.0;
            // w' = -decay w + input_gain (u - p) [- q / m]
            let (decay, input_gain) = match *g {
                GeneratorModel::DroopInverter { k_p, tau_p } => (1.0 / tau_p, k_p / tau_p),
                _ => {
                    let f = g.swing_form();
                    (f.d / f.m, 1.0 / f.m)
                }
            };
            a[(w, w)] = -decay;
            b[(w, i)] = input_gain;
            for j in 0..modes.ncols() {
                a[(w, angle0 + j)] -= input_gain * coupling[(i, j)];
                a[(angle0 + j, w)] = modes[(i, j)];
            }
            if let GeneratorModel::SwingTurbine { m, r_inv, tau, .. } = *g {
                if g.state_count() == 2 {
                    let q = w + 1;
                    a[(w, q)] = -1.0 / m;
                    a[(q, q)] = -1.0 / tau;
                    a[(q, w)] = r_inv / tau;
                }
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_hurwitz(&self) -> bool {
        self.a.complex_eigenvalues().iter().all(|e| e.re < 0.0)
    }

    /// `C (sI - A)^-1 B`.
    pub fn response_at(&self, s: Complex64) -> Option<DMatrix<Complex64>> {
        let dim = self.order();
        let m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - self.a[(i, j)]
        });
        let b = self.b.map(|v| Complex64::new(v, 0.0));
        let x = m.lu().solve(&b)?;
        Some(self.c.map(|v| Complex64::new(v, 0.0)) * x)
    }

    /// Bus frequency trajectories for a constant disturbance vector applied
    /// as a step at `t = 0`.
    pub fn step_response(&self, disturbance: &[f64], horizon: f64, dt: f64) -> Result<Vec<Trajectory>> {
        let n = self.c.nrows();
        if disturbance.len() != n {
            return Err(Error::InvalidArgument("one disturbance per bus".into()));
        }
        if !(dt > 0.0) || !(horizon >= dt) {
            return Err(Error::InvalidArgument("need dt > 0 and horizon >= dt".into()));
        }
        let u = DVector::from_column_slice(disturbance);
        let drive_col = &self.b * u;
        let drive_mat = DMatrix::from_column_slice(self.order(), 1, drive_col.as_slice());
        let (phi, gamma) = zoh_discretize(&self.a, &drive_mat, dt);
        let gamma = gamma.column(0).clone_owned();
        let steps = (horizon / dt).round() as usize;
        let mut series = vec![Vec::with_capacity(steps + 1); n];
        let mut x = DVector::<f64>::zeros(self.order());
        for _ in 0..=steps {
            let y = &self.c * &x;
            for (i, s) in series.iter_mut().enumerate() {
                s.push(y[i]);
            }
            x = &phi * &x + &gamma;
        }
        Ok(series.into_iter().map(|v| Trajectory::uniform(dt, v)).collect())
    }
}
