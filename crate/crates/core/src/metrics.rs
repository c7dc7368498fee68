//! Approximation errors between the coherent dynamics and reduced models.

use crate::error::{Error, Result};
use crate::network::{coherent_aggregate, CoherentGroup};
use crate::reduction::{
    interpret_reduced, match_dc, reduce_closed_loop_path, reduce_turbine_path, EquivalentGenerator, FrequencyWeight,
};
use crate::response::{dc_gain, hinf_norm, step_response, Lti, Trajectory, HINF_TOL};
use crate::tf::TransferFunction;

/// Largest relative DC gap accepted by [`step_error_norms`].
pub const DC_MATCH_TOL: f64 = 1e-9;

/// Step-response and frequency-domain errors of one reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorTriple {
    /// `(∫ e² dt)^½` in rad/s^½.
    pub l2: f64,
    /// `max |e(t)|` in rad/s.
    pub linf: f64,
    /// `‖ĝ − g̃‖_∞`.
    pub hinf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    /// Step amplitude in p.u.
    pub amplitude: f64,
    pub horizon: f64,
    pub dt: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            amplitude: -0.1,
            horizon: 200.0,
            dt: 1e-3,
        }
    }
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidArgument("step amplitude must be finite".into()));
        }
        if !(self.dt > 0.0) || !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return Err(Error::InvalidArgument("need dt > 0 and horizon >= dt".into()));
        }
        Ok(())
    }
}

/// When reduced models are scaled to the DC gain of `ĝ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DcRescale {
    /// Rescale before every metric, H∞ included.
    Before,
    /// H∞ on the raw reduced model, step metrics after rescaling.
    #[default]
    After,
    /// Never rescale; step metrics see the raw DC offset.
    Off,
}

fn l2_linf(orig: &Trajectory, reduced: &Trajectory) -> Result<(f64, f64)> {
    if !orig.same_grid(reduced) {
        return Err(Error::GridMismatch);
    }
    let dt = orig.dt().unwrap_or(0.0);
    let errors: Vec<f64> = orig.values().iter().zip(reduced.values()).map(|(a, b)| a - b).collect();
    let linf = errors.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let n = errors.len();
    let mut sum: f64 = errors.iter().map(|e| e * e).sum();
    if n >= 2 {
        sum -= 0.5 * (errors[0] * errors[0] + errors[n - 1] * errors[n - 1]);
    }
    Ok(((sum * dt).max(0.0).sqrt(), linf))
}

fn relative_dc_gap(orig: &TransferFunction, reduced: &TransferFunction) -> Result<f64> {
    let a = dc_gain(orig)?;
    let b = dc_gain(reduced)?;
    Ok((a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
}

/// `(l2, linf)` of `e = step(orig) − step(reduced)`; the models must already
/// share their DC gain.
pub fn step_error_norms(
    orig: &TransferFunction,
    reduced: &TransferFunction,
    amplitude: f64,
    horizon: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    let gap = relative_dc_gap(orig, reduced)?;
    if gap > DC_MATCH_TOL {
        return Err(Error::DcMismatch(gap));
    }
    unmatched_step_error_norms(orig, reduced, amplitude, horizon, dt)
}

/// As [`step_error_norms`] without the DC check.
pub fn unmatched_step_error_norms<S: Lti + ?Sized, R: Lti + ?Sized>(
    orig: &S,
    reduced: &R,
    amplitude: f64,
    horizon: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    let a = step_response(orig, amplitude, horizon, dt)?;
    let b = step_response(reduced, amplitude, horizon, dt)?;
    l2_linf(&a, &b)
}

/// `‖orig − reduced‖_∞`.
pub fn hinf_diff(orig: &TransferFunction, reduced: &TransferFunction) -> Result<f64> {
    for sys in [orig, reduced] {
        if !sys.is_stable() {
            let worst = sys.poles().iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::UnstableSystem(worst));
        }
    }
    if orig == reduced {
        return Ok(0.0);
    }
    hinf_norm(&(orig - reduced), HINF_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionPath {
    Turbine,
    ClosedLoop,
}

impl ReductionPath {
    pub fn tag(self) -> &'static str {
        match self {
            ReductionPath::Turbine => "tb",
            ReductionPath::ClosedLoop => "cl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMethod {
    pub path: ReductionPath,
    pub order: usize,
    pub weight: FrequencyWeight,
}

impl ReductionMethod {
    pub fn new(path: ReductionPath, order: usize, weight: FrequencyWeight) -> Self {
        Self { path, order, weight }
    }

    /// `BT2-tb`, `BT3-cl`, ...
    pub fn label(&self) -> String {
        format!("BT{}-{}", self.order, self.path.tag())
    }

    pub fn reduce(&self, group: &CoherentGroup) -> Result<TransferFunction> {
        match self.path {
            ReductionPath::Turbine => reduce_turbine_path(group, self.order, &self.weight),
            ReductionPath::ClosedLoop => reduce_closed_loop_path(group, self.order, &self.weight),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub path: ReductionPath,
    pub order: usize,
    pub errors: ErrorTriple,
    /// Reduced model before any DC rescaling.
    pub reduced: TransferFunction,
    /// `|ĝ(0) − g̃(0)| / |ĝ(0)|` before rescaling.
    pub dc_gap: f64,
    pub equivalent: Option<EquivalentGenerator>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub aggregate_inertia: f64,
    pub aggregate_damping: f64,
    pub settings: SimulationSettings,
    pub rescale: DcRescale,
    pub weights: Vec<TransferFunction>,
    pub rows: Vec<ComparisonRow>,
}

fn compare_row(
    exact: &TransferFunction,
    group: &CoherentGroup,
    method: &ReductionMethod,
    settings: &SimulationSettings,
    rescale: DcRescale,
) -> Result<ComparisonRow> {
    let reduced = method.reduce(group)?;
    let dc_gap = relative_dc_gap(exact, &reduced)?;
    let target = dc_gain(exact)?;
    let matched = match rescale {
        DcRescale::Off => reduced.clone(),
        DcRescale::Before | DcRescale::After => match_dc(&reduced, target)?,
    };
    let hinf = match rescale {
        DcRescale::Before => hinf_diff(exact, &matched)?,
        DcRescale::After | DcRescale::Off => hinf_diff(exact, &reduced)?,
    };
    let (l2, linf) = unmatched_step_error_norms(exact, &matched, settings.amplitude, settings.horizon, settings.dt)?;
    let equivalent = if reduced.order() <= 3 {
        interpret_reduced(&reduced).ok()
    } else {
        None
    };
    Ok(ComparisonRow {
        label: method.label(),
        path: method.path,
        order: method.order,
        errors: ErrorTriple { l2, linf, hinf },
        reduced,
        dc_gap,
        equivalent,
    })
}

/// One row per method, in input order.
pub fn compare_models(
    group: &CoherentGroup,
    methods: &[ReductionMethod],
    settings: &SimulationSettings,
    rescale: DcRescale,
) -> Result<ComparisonReport> {
    settings.validate()?;
    let exact = coherent_aggregate(group);
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|m| scope.spawn(|| compare_row(&exact, group, m, settings, rescale)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("comparison worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut weights: Vec<TransferFunction> = Vec::new();
    for m in methods {
        if !weights.contains(m.weight.transfer()) {
            weights.push(m.weight.transfer().clone());
        }
    }
    Ok(ComparisonReport {
        aggregate_inertia: group.aggregate_inertia(),
        aggregate_damping: group.aggregate_damping(),
        settings: *settings,
        rescale,
        weights,
        rows,
    })
}

/// One report per `m̂`, in the order given, with everything else held.
pub fn inertia_sweep(
    group: &CoherentGroup,
    inertias: &[f64],
    methods: &[ReductionMethod],
    settings: &SimulationSettings,
    rescale: DcRescale,
) -> Result<Vec<ComparisonReport>> {
    inertias
        .iter()
        .map(|&m| compare_models(&group.clone().with_inertia(m)?, methods, settings, rescale))
        .collect()
}
