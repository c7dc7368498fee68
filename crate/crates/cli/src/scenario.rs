//! Scenario files: TOML with the sections `[generators]`, `[network]`,
//! `[weights]`, `[simulation]` and `[reduction]`.
//!
//! ```toml
//! [generators]
//! m_hat = 0.0683
//! d_hat = 0.0107
//! units = [
//!     { kind = "swing_turbine", r_inv = 0.0218, tau = 9.08 },
//!     { kind = "droop_inverter", k_p = 2.0, tau_p = 0.5 },
//! ]
//!
//! [network]
//! edges = [{ from = 0, to = 1, weight = 1.2 }]
//!
//! [weights]
//! W_tb = { num = [1.0, 3e-2], den = [1.0, 1e-4] }
//!
//! [simulation]
//! step = -0.1
//!
//! [reduction]
//! requests = [{ path = "tb", order = 2, weight = "W_tb" }]
//! ```
//!
//! Unit inertia and damping default to `m_hat / n` and `d_hat / n`.

use std::collections::BTreeMap;

use coherent_core::metrics::{ReductionMethod, ReductionPath, SimulationSettings};
use coherent_core::network::{CoherentGroup, Edge, GeneratorModel, NetworkSpec};
use coherent_core::reduction::FrequencyWeight;
use coherent_core::{Error as CoreError, TransferFunction};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::CliError;

const SHIPPED: [(&str, &str); 2] = [
    ("testcase_table1", include_str!("../scenarios/testcase_table1.toml")),
    ("random10", include_str!("../scenarios/random10.toml")),
];

/// Text of a scenario bundled with the binary, by bare name.
pub fn shipped(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".toml").unwrap_or(name);
    SHIPPED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn shipped_names() -> impl Iterator<Item = &'static str> {
    SHIPPED.iter().map(|(n, _)| *n)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    generators: RawGenerators,
    network: Option<RawNetwork>,
    #[serde(default)]
    weights: BTreeMap<String, RawWeight>,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    reduction: RawReduction,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerators {
    m_hat: Option<f64>,
    d_hat: Option<f64>,
    units: Vec<RawUnit>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawUnit {
    Swing {
        m: Option<f64>,
        d: Option<f64>,
    },
    SwingTurbine {
        m: Option<f64>,
        d: Option<f64>,
        r_inv: f64,
        tau: f64,
    },
    DroopInverter {
        k_p: f64,
        tau_p: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    laplacian: Option<Vec<Vec<f64>>>,
    edges: Option<Vec<RawEdge>>,
    line_data: Option<toml::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: usize,
    to: usize,
    weight: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    num: Vec<f64>,
    den: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    #[serde(default = "default_step")]
    step: f64,
    #[serde(default = "default_horizon")]
    horizon: f64,
    #[serde(default = "default_dt")]
    dt: f64,
}

fn default_step() -> f64 {
    SimulationSettings::default().amplitude
}

fn default_horizon() -> f64 {
    SimulationSettings::default().horizon
}

fn default_dt() -> f64 {
    SimulationSettings::default().dt
}

impl Default for RawSimulation {
    fn default() -> Self {
        Self {
            step: default_step(),
            horizon: default_horizon(),
            dt: default_dt(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReduction {
    #[serde(default)]
    requests: Vec<RawRequest>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRequest {
    path: String,
    order: usize,
    weight: String,
}

/// A reduction request with its weight resolved by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub method: ReductionMethod,
    pub weight_name: String,
}

/// Fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub group: CoherentGroup,
    pub network: Option<NetworkSpec>,
    pub weights: BTreeMap<String, FrequencyWeight>,
    pub simulation: SimulationSettings,
    pub requests: Vec<Request>,
}

impl Scenario {
    /// Weight by name; `unity` is always available.
    pub fn weight(&self, name: &str) -> Option<FrequencyWeight> {
        match self.weights.get(name) {
            Some(w) => Some(w.clone()),
            None if name == "unity" => Some(FrequencyWeight::unity()),
            None => None,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn invalid(field: &str, err: CoreError) -> CliError {
    match err {
        CoreError::InvalidArgument(msg) => CliError::validation(field, msg),
        other => CliError::validation(field, other.to_string()),
    }
}

fn finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(field, "value must be finite"))
    }
}

pub fn parse_path(name: &str) -> Result<ReductionPath, String> {
    match name {
        "tb" | "turbine" => Ok(ReductionPath::Turbine),
        "cl" | "closed_loop" => Ok(ReductionPath::ClosedLoop),
        other => Err(format!("unknown reduction path `{other}` (expected tb or cl)")),
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;

    let n = raw.generators.units.len();
    if n == 0 {
        return Err(CliError::validation("generators.units", "at least one generator"));
    }
    let m_hat = raw
        .generators
        .m_hat
        .map(|v| finite("generators.m_hat", v))
        .transpose()?;
    let d_hat = raw
        .generators
        .d_hat
        .map(|v| finite("generators.d_hat", v))
        .transpose()?;
    let share = |field: &str, own: Option<f64>, total: Option<f64>, name: &str| -> Result<f64, CliError> {
        match (own, total) {
            (Some(v), _) => finite(field, v),
            (None, Some(t)) => Ok(t / n as f64),
            (None, None) => Err(CliError::validation(
                field,
                format!("{name} missing and no aggregate given"),
            )),
        }
    };
    let mut units = Vec::with_capacity(n);
    for (i, unit) in raw.generators.units.iter().enumerate() {
        let field = format!("generators.units[{i}]");
        let model = match *unit {
            RawUnit::Swing { m, d } => GeneratorModel::Swing {
                m: share(&field, m, m_hat, "m")?,
                d: share(&field, d, d_hat, "d")?,
            },
            RawUnit::SwingTurbine { m, d, r_inv, tau } => GeneratorModel::SwingTurbine {
                m: share(&field, m, m_hat, "m")?,
                d: share(&field, d, d_hat, "d")?,
                r_inv: finite(&field, r_inv)?,
                tau: finite(&field, tau)?,
            },
            RawUnit::DroopInverter { k_p, tau_p } => GeneratorModel::DroopInverter {
                k_p: finite(&field, k_p)?,
                tau_p: finite(&field, tau_p)?,
            },
        };
        model.validate().map_err(|e| invalid(&field, e))?;
        units.push(model);
    }
    let mut group = CoherentGroup::new(units).map_err(|e| invalid("generators.units", e))?;
    if let Some(m) = m_hat {
        group = group.with_inertia(m).map_err(|e| invalid("generators.m_hat", e))?;
    }
    if let Some(d) = d_hat {
        group = group.with_damping(d).map_err(|e| invalid("generators.d_hat", e))?;
    }

    let network = raw.network.map(|net| build_network(net, n)).transpose()?;

    let mut weights = BTreeMap::new();
    for (name, w) in raw.weights {
        let field = format!("weights.{name}");
        let tf = TransferFunction::new(w.num, w.den).map_err(|e| invalid(&field, e))?;
        let weight = FrequencyWeight::new(tf).map_err(|e| match e {
            CoreError::UnstableSystem(_) => CliError::validation(&field, "weight must be stable"),
            CoreError::ImproperTransfer { .. } => CliError::validation(&field, "weight must be proper"),
            other => invalid(&field, other),
        })?;
        weights.insert(name, weight);
    }

    let simulation = SimulationSettings {
        amplitude: finite("simulation.step", raw.simulation.step)?,
        horizon: finite("simulation.horizon", raw.simulation.horizon)?,
        dt: finite("simulation.dt", raw.simulation.dt)?,
    };
    simulation.validate().map_err(|e| invalid("simulation", e))?;

    let mut scenario = Scenario {
        group,
        network,
        weights,
        simulation,
        requests: Vec::new(),
    };
    for (i, r) in raw.reduction.requests.iter().enumerate() {
        let field = format!("reduction.requests[{i}]");
        let path = parse_path(&r.path).map_err(|msg| CliError::validation(&field, msg))?;
        if r.order < 2 {
            return Err(CliError::validation(&field, "order >= 2"));
        }
        let weight = scenario
            .weight(&r.weight)
            .ok_or_else(|| CliError::validation(&field, format!("unknown weight `{}`", r.weight)))?;
        scenario.requests.push(Request {
            method: ReductionMethod::new(path, r.order, weight),
            weight_name: r.weight.clone(),
        });
    }
    Ok(scenario)
}

fn build_network(raw: RawNetwork, n: usize) -> Result<NetworkSpec, CliError> {
    let mut spec = match (raw.laplacian, raw.edges) {
        (Some(rows), None) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::validation(
                    "network.laplacian",
                    format!("Laplacian must be {n}x{n} to match the generators"),
                ));
            }
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            if flat.iter().any(|v| !v.is_finite()) {
                return Err(CliError::validation("network.laplacian", "value must be finite"));
            }
            NetworkSpec::from_laplacian(DMatrix::from_row_slice(n, n, &flat))
                .map_err(|e| invalid("network.laplacian", e))?
        }
        (None, Some(edges)) => {
            let edges: Vec<Edge> = edges
                .into_iter()
                .map(|e| Edge {
                    from: e.from,
                    to: e.to,
                    weight: e.weight,
                })
                .collect();
            NetworkSpec::from_edges(n, &edges).map_err(|e| invalid("network.edges", e))?
        }
        _ => {
            return Err(CliError::validation(
                "network",
                "give exactly one of `laplacian` or `edges`",
            ))
        }
    };
    spec.metadata = raw.line_data.map(|v| v.to_string());
    Ok(spec)
}
