use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::tf::TransferFunction;

/// Frequency model of one machine, from net power (p.u.) to frequency
/// deviation (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorModel {
    /// `1 / (m s + d)`.
    Swing { m: f64, d: f64 },
    /// `1 / (m s + d + r_inv / (tau s + 1))`.
    SwingTurbine { m: f64, d: f64, r_inv: f64, tau: f64 },
    /// `k_p / (tau_p s + 1)`.
    DroopInverter { k_p: f64, tau_p: f64 },
}

/// A generator written in swing form `m s + d + r_inv / (tau s + 1)` for its
/// inverse transfer function. Droop inverters map to `m = tau_p / k_p`,
/// `d = 1 / k_p` without a turbine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingForm {
    pub m: f64,
    pub d: f64,
    pub turbine: Option<(f64, f64)>,
}

impl GeneratorModel {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(what.to_string()))
            }
        };
        match *self {
            GeneratorModel::Swing { m, d } => {
                check(m > 0.0, "m > 0")?;
                check(d >= 0.0, "d >= 0")
            }
            GeneratorModel::SwingTurbine { m, d, r_inv, tau } => {
                check(m > 0.0, "m > 0")?;
                check(d >= 0.0, "d >= 0")?;
                check(r_inv >= 0.0, "r_inv >= 0")?;
                check(tau > 0.0, "τ > 0")
            }
            GeneratorModel::DroopInverter { k_p, tau_p } => {
                check(k_p > 0.0, "k_P > 0")?;
                check(tau_p > 0.0, "τ_P > 0")
            }
        }
    }

    pub fn swing_form(&self) -> SwingForm {
        match *self {
            GeneratorModel::Swing { m, d } => SwingForm { m, d, turbine: None },
            GeneratorModel::SwingTurbine { m, d, r_inv, tau } => SwingForm {
                m,
                d,
                turbine: (r_inv != 0.0).then_some((r_inv, tau)),
            },
            GeneratorModel::DroopInverter { k_p, tau_p } => SwingForm {
                m: tau_p / k_p,
                d: 1.0 / k_p,
                turbine: None,
            },
        }
    }

    /// Inertia used for centre-of-inertia weighting.
    pub fn inertia(&self) -> f64 {
        self.swing_form().m
    }

    /// `g^-1(s)`.
    pub fn inverse_at(&self, s: Complex64) -> Complex64 {
        match *self {
            GeneratorModel::DroopInverter { k_p, tau_p } => (s * tau_p + 1.0) / k_p,
            _ => {
                let f = self.swing_form();
                let base = s * f.m + f.d;
                match f.turbine {
                    Some((r, tau)) => base + r / (s * tau + 1.0),
                    None => base,
                }
            }
        }
    }

    /// Number of states in the generator's own realization.
    pub fn state_count(&self) -> usize {
        match *self {
            GeneratorModel::SwingTurbine { r_inv, .. } if r_inv != 0.0 => 2,
            _ => 1,
        }
    }
}

/// Transfer function of a single generator.
pub fn generator_transfer(g: &GeneratorModel) -> TransferFunction {
    match *g {
        GeneratorModel::Swing { m, d } => swing(m, d),
        GeneratorModel::SwingTurbine { m, d, r_inv, tau } => {
            if r_inv == 0.0 {
                return swing(m, d);
            }
            // (tau s + 1) / ((m s + d)(tau s + 1) + r_inv)
            let lag = [tau, 1.0];
            let den = poly::add(&poly::mul(&[m, d], &lag), &[r_inv]);
            TransferFunction::new(lag.to_vec(), den).expect("nonzero denominator")
        }
        GeneratorModel::DroopInverter { k_p, tau_p } => TransferFunction::first_order(k_p, tau_p),
    }
}

fn swing(m: f64, d: f64) -> TransferFunction {
    TransferFunction::new(vec![1.0], vec![m, d]).expect("nonzero denominator")
}
