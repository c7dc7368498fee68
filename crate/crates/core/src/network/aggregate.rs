use crate::error::{Error, Result};
use crate::poly;
use crate::tf::TransferFunction;

use super::generator::GeneratorModel;

/// Turbine time constants closer than this (relative) are merged.
const TAU_MERGE_TOL: f64 = 1e-12;

/// A group of generators assumed to respond coherently.
///
/// The aggregate inertia and damping default to the sums over the members
/// (droop inverters contribute `tau_p / k_p` and `1 / k_p`). Overrides replace
/// those sums in the aggregate model only; per-member parameters keep
/// driving the network routines.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentGroup {
    generators: Vec<GeneratorModel>,
    inertia_override: Option<f64>,
    damping_override: Option<f64>,
}

impl CoherentGroup {
    pub fn new(generators: Vec<GeneratorModel>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument(
                "a coherent group needs at least one generator".into(),
            ));
        }
        for g in &generators {
            g.validate()?;
        }
        Ok(Self {
            generators,
            inertia_override: None,
            damping_override: None,
        })
    }

    pub fn with_inertia(mut self, m_hat: f64) -> Result<Self> {
        if !(m_hat > 0.0) {
            return Err(Error::InvalidArgument("m̂ > 0".into()));
        }
        self.inertia_override = Some(m_hat);
        Ok(self)
    }

    pub fn with_damping(mut self, d_hat: f64) -> Result<Self> {
        if !(d_hat >= 0.0) {
            return Err(Error::InvalidArgument("d̂ >= 0".into()));
        }
        self.damping_override = Some(d_hat);
        Ok(self)
    }

    pub fn generators(&self) -> &[GeneratorModel] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn inertia_override(&self) -> Option<f64> {
        self.inertia_override
    }

    pub fn damping_override(&self) -> Option<f64> {
        self.damping_override
    }

    /// `m̂`: override if present, else the member sum.
    pub fn aggregate_inertia(&self) -> f64 {
        self.inertia_override
            .unwrap_or_else(|| self.generators.iter().map(|g| g.swing_form().m).sum())
    }

    /// `d̂`: override if present, else the member sum.
    pub fn aggregate_damping(&self) -> f64 {
        self.damping_override
            .unwrap_or_else(|| self.generators.iter().map(|g| g.swing_form().d).sum())
    }

    /// Turbine `(r_inv, tau)` pairs with equal time constants merged by
    /// summing their droop gains, in order of first appearance.
    pub fn merged_turbines(&self) -> Vec<(f64, f64)> {
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for g in &self.generators {
            let Some((r, tau)) = g.swing_form().turbine else {
                continue;
            };
            match merged
                .iter_mut()
                .find(|(_, t)| (t - tau).abs() <= TAU_MERGE_TOL * t.abs().max(tau.abs()))
            {
                Some(entry) => entry.0 += r,
                None => merged.push((r, tau)),
            }
        }
        merged
    }
}

/// `ĝ_t(s) = sum r_i / (tau_i s + 1)` over a common denominator.
pub fn aggregate_turbine(group: &CoherentGroup) -> TransferFunction {
    let turbines = group.merged_turbines();
    if turbines.is_empty() {
        return TransferFunction::gain(0.0);
    }
    let den = turbines
        .iter()
        .fold(vec![1.0], |acc, &(_, tau)| poly::mul(&acc, &[tau, 1.0]));
    let num = turbines.iter().enumerate().fold(vec![0.0], |acc, (i, &(r, _))| {
        let others = turbines
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(vec![r], |p, (_, &(_, tau))| poly::mul(&p, &[tau, 1.0]));
        poly::add(&acc, &others)
    });
    TransferFunction::new(num, den).expect("nonzero denominator")
}

/// `1 / (m s + d + turbine(s))` for a turbine model `n_t / d_t`, i.e.
/// `d_t / ((m s + d) d_t + n_t)`.
pub fn close_swing_loop(m: f64, d: f64, turbine: &TransferFunction) -> TransferFunction {
    let den = poly::add(&poly::mul(&[m, d], turbine.den()), turbine.num());
    TransferFunction::new(turbine.den().to_vec(), den).expect("nonzero denominator")
}

/// Coherent dynamics `ĝ(s) = (sum g_i^-1(s))^-1`.
pub fn coherent_aggregate(group: &CoherentGroup) -> TransferFunction {
    close_swing_loop(
        group.aggregate_inertia(),
        group.aggregate_damping(),
        &aggregate_turbine(group),
    )
}
