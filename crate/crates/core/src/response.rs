//! Time and frequency responses of SISO LTI models.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::statespace::{self, minimal_state_space, StateSpace};
use crate::tf::{TransferFunction, CANCEL_TOL};

/// Samples on a uniform time grid starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(
                "trajectory times and values differ in length".into(),
            ));
        }
        if times.len() >= 2 {
            let dt = times[1] - times[0];
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("times must be strictly increasing".into()));
            }
            for w in times.windows(2) {
                if ((w[1] - w[0]) - dt).abs() > 1e-12 * dt.max(w[1].abs()) {
                    return Err(Error::InvalidArgument("time grid is not uniform".into()));
                }
            }
        }
        Ok(Self { times, values })
    }

    /// `len` samples spaced by `dt`, starting at zero.
    pub fn uniform(dt: f64, values: Vec<f64>) -> Self {
        let times = (0..values.len()).map(|k| k as f64 * dt).collect();
        Self { times, values }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// True when both trajectories share the same time samples.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.times.len() == other.times.len()
            && self
                .times
                .iter()
                .zip(&other.times)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}

/// Common surface of transfer functions and realizations.
pub trait Lti {
    /// Value at `s`, failing when `s` sits on a pole.
    fn eval_checked(&self, s: Complex64) -> Result<Complex64>;
    fn realization(&self) -> Result<StateSpace>;
    fn pole_values(&self) -> Vec<Complex64>;
    /// Limit of the response as `s -> infinity`.
    fn high_frequency_gain(&self) -> f64;
}

impl Lti for TransferFunction {
    fn eval_checked(&self, s: Complex64) -> Result<Complex64> {
        let den = poly::eval_complex(self.den(), s);
        if den.norm() < 1e-14 * poly::norm(self.den()) {
            return Err(Error::PoleOnGrid(s.im));
        }
        Ok(poly::eval_complex(self.num(), s) / den)
    }

    fn realization(&self) -> Result<StateSpace> {
        minimal_state_space(self, CANCEL_TOL)
    }

    fn pole_values(&self) -> Vec<Complex64> {
        self.poles()
    }

    fn high_frequency_gain(&self) -> f64 {
        if self.num().len() == self.den().len() {
            self.num()[0] / self.den()[0]
        } else {
            0.0
        }
    }
}

impl Lti for StateSpace {
    fn eval_checked(&self, s: Complex64) -> Result<Complex64> {
        let on_pole = self
            .pole_values()
            .iter()
            .any(|p| (s - p).norm() <= 1e-14 * (1.0 + p.norm()));
        if on_pole {
            return Err(Error::PoleOnGrid(s.im));
        }
        self.eval(s).ok_or(Error::PoleOnGrid(s.im))
    }

    fn realization(&self) -> Result<StateSpace> {
        Ok(self.clone())
    }

    fn pole_values(&self) -> Vec<Complex64> {
        statespace::poles(self).values
    }

    fn high_frequency_gain(&self) -> f64 {
        self.d()
    }
}

/// Values at `j eta` for each grid frequency in rad/s.
pub fn frequency_response<S: Lti + ?Sized>(sys: &S, grid: &[f64]) -> Result<Vec<Complex64>> {
    grid.iter()
        .map(|&eta| {
            if !eta.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite frequency {eta}")));
            }
            sys.eval_checked(Complex64::new(0.0, eta))
        })
        .collect()
}

pub fn dc_gain<S: Lti + ?Sized>(sys: &S) -> Result<f64> {
    match sys.eval_checked(Complex64::new(0.0, 0.0)) {
        Ok(v) => Ok(v.re),
        Err(Error::PoleOnGrid(_)) => Err(Error::IntegratorPresent),
        Err(e) => Err(e),
    }
}

fn require_stable<S: Lti + ?Sized>(sys: &S) -> Result<()> {
    match sys.pole_values().iter().map(|p| p.re).max_by(f64::total_cmp) {
        Some(worst) if worst >= 0.0 => Err(Error::UnstableSystem(worst)),
        _ => Ok(()),
    }
}

/// Zero-order-hold transition pair `(Phi, Gamma)` over one step `dt`, taken
/// from the exponential of the augmented matrix `[[A, B], [0, 0]] dt`.
pub fn zoh_discretize(a: &DMatrix<f64>, b: &DMatrix<f64>, dt: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let m = b.ncols();
    let mut aug = DMatrix::<f64>::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * dt));
    aug.view_mut((0, n), (n, m)).copy_from(&(b * dt));
    let e = aug.exp();
    (
        e.view((0, 0), (n, n)).clone_owned(),
        e.view((0, n), (n, m)).clone_owned(),
    )
}

/// Zero-state response to `amplitude` times a unit step, sampled every `dt`
/// up to `horizon`.
pub fn step_response<S: Lti + ?Sized>(sys: &S, amplitude: f64, horizon: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0) || !(horizon >= dt) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and horizon >= dt, got dt = {dt}, horizon = {horizon}"
        )));
    }
    require_stable(sys)?;
    let ss = sys.realization()?;
    let steps = (horizon / dt).round() as usize;
    let n = ss.order();
    let mut values = Vec::with_capacity(steps + 1);
    if n == 0 {
        values.resize(steps + 1, ss.d() * amplitude);
        return Ok(Trajectory::uniform(dt, values));
    }
    let b = DMatrix::from_column_slice(n, 1, ss.b().as_slice());
    let (phi, gamma) = zoh_discretize(ss.a(), &b, dt);
    let drive = gamma.column(0) * amplitude;
    let mut x = DVector::<f64>::zeros(n);
    let mut next = DVector::<f64>::zeros(n);
    for _ in 0..=steps {
        values.push(ss.c().dot(&x.transpose()) + ss.d() * amplitude);
        phi.mul_to(&x, &mut next);
        next += &drive;
        std::mem::swap(&mut x, &mut next);
    }
    Ok(Trajectory::uniform(dt, values))
}

/// Coarse-grid points used by [`hinf_norm`].
pub const HINF_GRID_POINTS: usize = 2000;
/// Default relative tolerance of [`hinf_norm`].
pub const HINF_TOL: f64 = 1e-6;

/// Peak gain `sup |G(j eta)|`.
///
/// A logarithmic grid covering at least `[1e-4, 1e4]` rad/s (widened to
/// bracket every pole magnitude, and seeded with pole frequencies) is scanned
/// in index order; the three largest local maxima are refined by
/// golden-section search in `log eta` until the bracket is narrower than
/// `tol`. The DC value and the high-frequency limit are also candidates.
pub fn hinf_norm<S: Lti + ?Sized>(sys: &S, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    require_stable(sys)?;
    let poles = sys.pole_values();
    let magnitude = |eta: f64| -> Result<f64> { Ok(sys.eval_checked(Complex64::new(0.0, eta))?.norm()) };

    let mut lo: f64 = 1e-4;
    let mut hi: f64 = 1e4;
    for p in &poles {
        let r = p.norm();
        if r > 0.0 {
            lo = lo.min(0.1 * r);
            hi = hi.max(10.0 * r);
        }
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    let mut grid: Vec<f64> = (0..HINF_GRID_POINTS)
        .map(|i| 10f64.powf(llo + (lhi - llo) * i as f64 / (HINF_GRID_POINTS - 1) as f64))
        .collect();
    for p in &poles {
        for eta in [p.im.abs(), p.norm()] {
            if eta > lo && eta < hi {
                grid.push(eta);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let values = grid.iter().map(|&eta| magnitude(eta)).collect::<Result<Vec<_>>>()?;
    let mut best = values.iter().copied().fold(0.0_f64, f64::max);
    best = best.max(magnitude(0.0)?).max(sys.high_frequency_gain().abs());

    let mut peaks: Vec<usize> = (0..values.len())
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == values.len() || values[i] >= values[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    for &i in peaks.iter().take(3) {
        let a = grid[i.saturating_sub(1)].log10();
        let b = grid[(i + 1).min(grid.len() - 1)].log10();
        if b > a {
            best = best.max(golden_max(&|x: f64| magnitude(10f64.powf(x)), a, b, tol)?);
        }
    }
    Ok(best)
}

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = fc.max(fd);
    while (b - a) > tol * 0.5 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
        best = best.max(fc).max(fd);
    }
    Ok(best)
}
