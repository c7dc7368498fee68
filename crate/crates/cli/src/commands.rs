use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherent_core::metrics::{
    compare_models, inertia_sweep, ComparisonReport, DcRescale, ReductionMethod, ReductionPath, SimulationSettings,
};
use coherent_core::network::{band_constants, coherence_gap, coherent_aggregate, lemma2_bound};
use coherent_core::reduction::{interpret_reduced, match_dc, reduced_turbine};
use coherent_core::{dc_gain, step_response, Error as CoreError, TransferFunction};

use crate::error::CliError;
use crate::output::{num, Emitted, Table};
use crate::scenario::{parse_path, parse_scenario, shipped, shipped_names, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "coherent",
    version,
    about = "Aggregate, reduce and compare coherent generator dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients of the coherent dynamics ĝ(s).
    Aggregate(CommonArgs),
    /// Reduced transfer functions and their equivalent generators.
    Reduce(ReduceArgs),
    /// Step responses of ĝ and each reduced model.
    Respond(ReduceArgs),
    /// L2, L∞ and H∞ errors of each reduced model.
    Compare(ReduceArgs),
    /// Errors of each method over a range of aggregate inertias.
    Sweep(SweepArgs),
    /// Coherence gap of the network response under Laplacian scaling.
    Coherence(CoherenceArgs),
}

impl Command {
    pub fn out(&self) -> Option<&Path> {
        let common = match self {
            Command::Aggregate(c) => c,
            Command::Reduce(r) | Command::Respond(r) | Command::Compare(r) => &r.common,
            Command::Sweep(s) => &s.reduce.common,
            Command::Coherence(c) => &c.common,
        };
        common.out.as_deref()
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file, or the name of a shipped scenario.
    pub scenario: String,
    /// Write `<table>.csv` files into this directory instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RescaleArg {
    Before,
    After,
    Off,
}

impl From<RescaleArg> for DcRescale {
    fn from(r: RescaleArg) -> Self {
        match r {
            RescaleArg::Before => DcRescale::Before,
            RescaleArg::After => DcRescale::After,
            RescaleArg::Off => DcRescale::Off,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated methods such as `tb2,cl3`; defaults to the scenario's
    /// requests.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Order for methods given without one, and override for scenario
    /// requests.
    #[arg(long)]
    pub order: Option<usize>,
    /// Weight name applied to every method.
    #[arg(long)]
    pub weight: Option<String>,
    /// Step amplitude in p.u.
    #[arg(long, allow_negative_numbers = true)]
    pub step: Option<f64>,
    /// Simulation horizon in s.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Sample period in s.
    #[arg(long)]
    pub dt: Option<f64>,
    /// When reduced models are scaled to the DC gain of ĝ.
    #[arg(long, value_enum, default_value = "after")]
    pub rescale_dc: RescaleArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub reduce: ReduceArgs,
    /// Aggregate inertias m̂ in s²/rad.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.03,0.0683,0.15",
        allow_negative_numbers = true
    )]
    pub inertias: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Band edge η0 in rad/s.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub eta0: f64,
    /// Laplacian scalings α.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,10,100,1000",
        allow_negative_numbers = true
    )]
    pub scales: Vec<f64>,
    /// Frequencies per band.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
}

/// Reads a scenario from a path, falling back to the shipped scenarios.
pub fn load_scenario(name: &str) -> Result<Scenario, CliError> {
    let path = Path::new(name);
    if path.is_file() {
        return parse_scenario(&std::fs::read_to_string(path)?);
    }
    match shipped(name) {
        Some(text) => parse_scenario(text),
        None => Err(CliError::validation(
            "scenario",
            format!(
                "`{name}` is neither a file nor a shipped scenario ({})",
                shipped_names().collect::<Vec<_>>().join(", ")
            ),
        )),
    }
}

pub fn execute(command: &Command) -> Result<Vec<Emitted>, CliError> {
    match command {
        Command::Aggregate(args) => aggregate(&load_scenario(&args.scenario)?),
        Command::Reduce(args) => {
            let scenario = load_scenario(&args.common.scenario)?;
            reduce(&scenario, &resolve_methods(&scenario, args)?, args.rescale_dc.into())
        }
        Command::Respond(args) => {
            let scenario = load_scenario(&args.common.scenario)?;
            let methods = resolve_methods(&scenario, args)?;
            respond(&scenario, &methods, &settings(&scenario, args)?, args.rescale_dc.into())
        }
        Command::Compare(args) => {
            let scenario = load_scenario(&args.common.scenario)?;
            let methods = resolve_methods(&scenario, args)?;
            compare(&scenario, &methods, &settings(&scenario, args)?, args.rescale_dc.into())
        }
        Command::Sweep(args) => {
            let r = &args.reduce;
            let scenario = load_scenario(&r.common.scenario)?;
            let methods = resolve_methods(&scenario, r)?;
            if let Some(bad) = args.inertias.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
                return Err(CliError::validation("--inertias", format!("m̂ > 0, got {bad}")));
            }
            sweep(
                &scenario,
                &methods,
                &args.inertias,
                &settings(&scenario, r)?,
                r.rescale_dc.into(),
            )
        }
        Command::Coherence(args) => coherence(&load_scenario(&args.common.scenario)?, args),
    }
}

/// A resolved method together with the weight name used for it.
#[derive(Debug, Clone)]
pub struct Method {
    pub method: ReductionMethod,
    pub weight_name: String,
}

fn default_weight_name(scenario: &Scenario, path: ReductionPath) -> Option<String> {
    let name = match path {
        ReductionPath::Turbine => "W_tb",
        ReductionPath::ClosedLoop => "W_cl",
    };
    scenario.weights.contains_key(name).then(|| name.to_string())
}

fn parse_method_token(token: &str, order: Option<usize>) -> Result<(ReductionPath, usize), CliError> {
    let field = "--methods";
    let t = token.trim();
    // accept `BT2-tb` as printed in reports
    let t = match t.strip_prefix("BT").and_then(|rest| rest.split_once('-')) {
        Some((k, p)) => format!("{p}{k}"),
        None => t.to_string(),
    };
    let split = t.find(|c: char| c.is_ascii_digit()).unwrap_or(t.len());
    let path = parse_path(&t[..split]).map_err(|m| CliError::validation(field, m))?;
    let k = if split < t.len() {
        t[split..]
            .parse::<usize>()
            .map_err(|_| CliError::validation(field, format!("bad order in `{token}`")))?
    } else {
        order.ok_or_else(|| CliError::validation(field, format!("`{token}` needs an order (or pass --order)")))?
    };
    if k < 2 {
        return Err(CliError::validation(field, "order >= 2"));
    }
    Ok((path, k))
}

fn resolve_methods(scenario: &Scenario, args: &ReduceArgs) -> Result<Vec<Method>, CliError> {
    let specs: Vec<(ReductionPath, usize, Option<String>)> = match &args.methods {
        Some(tokens) => tokens
            .iter()
            .map(|t| parse_method_token(t, args.order).map(|(p, k)| (p, k, None)))
            .collect::<Result<_, _>>()?,
        None if !scenario.requests.is_empty() => scenario
            .requests
            .iter()
            .map(|r| {
                (
                    r.method.path,
                    args.order.unwrap_or(r.method.order),
                    Some(r.weight_name.clone()),
                )
            })
            .collect(),
        None => {
            let orders = args.order.map_or(vec![2, 3], |k| vec![k]);
            orders
                .into_iter()
                .flat_map(|k| [(ReductionPath::Turbine, k, None), (ReductionPath::ClosedLoop, k, None)])
                .collect()
        }
    };
    if args.order.is_some_and(|k| k < 2) {
        return Err(CliError::validation("--order", "order >= 2"));
    }
    specs
        .into_iter()
        .map(|(path, order, requested)| {
            let name = args
                .weight
                .clone()
                .or(requested)
                .or_else(|| default_weight_name(scenario, path))
                .ok_or_else(|| {
                    CliError::validation(
                        "--weight",
                        format!("no weight for the {} path; pass --weight", path.tag()),
                    )
                })?;
            let weight = scenario
                .weight(&name)
                .ok_or_else(|| CliError::validation("--weight", format!("unknown weight `{name}`")))?;
            Ok(Method {
                method: ReductionMethod::new(path, order, weight),
                weight_name: name,
            })
        })
        .collect()
}

fn settings(scenario: &Scenario, args: &ReduceArgs) -> Result<SimulationSettings, CliError> {
    let s = SimulationSettings {
        amplitude: args.step.unwrap_or(scenario.simulation.amplitude),
        horizon: args.horizon.unwrap_or(scenario.simulation.horizon),
        dt: args.dt.unwrap_or(scenario.simulation.dt),
    };
    s.validate().map_err(|e| match e {
        CoreError::InvalidArgument(m) => CliError::validation("simulation flags", m),
        other => other.into(),
    })?;
    Ok(s)
}

fn coefficient_rows(table: &mut Table, prefix: &[String], tf: &TransferFunction) -> Result<(), CliError> {
    let n = tf.den().len();
    let pad = n - tf.num().len();
    for i in 0..n {
        let numerator = if i < pad { 0.0 } else { tf.num()[i - pad] };
        let mut row = prefix.to_vec();
        row.extend([(n - 1 - i).to_string(), num(numerator), num(tf.den()[i])]);
        table.row(row)?;
    }
    Ok(())
}

fn aggregate(scenario: &Scenario) -> Result<Vec<Emitted>, CliError> {
    let g = coherent_aggregate(&scenario.group);
    let mut table = Table::new(
        "aggregate",
        &[
            "model [-]",
            "power_of_s [-]",
            "numerator [rad/s per p.u.]",
            "denominator [-]",
        ],
    )?;
    coefficient_rows(&mut table, &["g_hat".to_string()], &g)?;
    Ok(vec![table.finish()?])
}

fn reduce(scenario: &Scenario, methods: &[Method], rescale: DcRescale) -> Result<Vec<Emitted>, CliError> {
    let target = dc_gain(&coherent_aggregate(&scenario.group))?;
    let mut models = Table::new(
        "reduced",
        &[
            "method [-]",
            "part [-]",
            "weight [-]",
            "power_of_s [-]",
            "numerator [rad/s per p.u.]",
            "denominator [-]",
        ],
    )?;
    let mut interp = Table::new(
        "interpretation",
        &[
            "method [-]",
            "m_tilde [s^2/rad]",
            "d_tilde [p.u.]",
            "turbine [-]",
            "r_inv_tilde [p.u.]",
            "tau_tilde [s]",
            "residual_flag [-]",
        ],
    )?;
    for m in methods {
        let label = m.method.label();
        let raw = m.method.reduce(&scenario.group)?;
        let reduced = match rescale {
            DcRescale::Before => match_dc(&raw, target)?,
            DcRescale::After | DcRescale::Off => raw,
        };
        let prefix = |part: &str| vec![label.clone(), part.to_string(), m.weight_name.clone()];
        coefficient_rows(&mut models, &prefix("model"), &reduced)?;
        if m.method.path == ReductionPath::Turbine {
            let turbine = reduced_turbine(&scenario.group, m.method.order - 1, &m.method.weight)?;
            coefficient_rows(&mut models, &prefix("turbine"), &turbine)?;
        }
        match interpret_reduced(&reduced) {
            Ok(eq) => {
                let flag = eq.residual_flag.to_string();
                if eq.turbines.is_empty() {
                    interp.row([
                        label.clone(),
                        num(eq.inertia),
                        num(eq.damping),
                        String::new(),
                        String::new(),
                        String::new(),
                        flag.clone(),
                    ])?;
                }
                for (i, t) in eq.turbines.iter().enumerate() {
                    interp.row([
                        label.clone(),
                        num(eq.inertia),
                        num(eq.damping),
                        (i + 1).to_string(),
                        num(t.gain),
                        num(t.time_constant),
                        flag.clone(),
                    ])?;
                }
            }
            Err(CoreError::WrongOrder(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(vec![models.finish()?, interp.finish()?])
}

fn respond(
    scenario: &Scenario,
    methods: &[Method],
    settings: &SimulationSettings,
    rescale: DcRescale,
) -> Result<Vec<Emitted>, CliError> {
    let g = coherent_aggregate(&scenario.group);
    let target = dc_gain(&g)?;
    let mut columns = vec![step_response(&g, settings.amplitude, settings.horizon, settings.dt)?];
    let mut header = vec!["time [s]".to_string(), "g_hat [rad/s]".to_string()];
    for m in methods {
        let raw = m.method.reduce(&scenario.group)?;
        let model = match rescale {
            DcRescale::Off => raw,
            DcRescale::Before | DcRescale::After => match_dc(&raw, target)?,
        };
        columns.push(step_response(
            &model,
            settings.amplitude,
            settings.horizon,
            settings.dt,
        )?);
        header.push(format!("{} [rad/s]", m.method.label()));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new("response", &header)?;
    for (i, t) in columns[0].times().iter().enumerate() {
        let mut row = vec![num(*t)];
        row.extend(columns.iter().map(|c| num(c.values()[i])));
        table.row(row)?;
    }
    Ok(vec![table.finish()?])
}

fn methods_only(methods: &[Method]) -> Vec<ReductionMethod> {
    methods.iter().map(|m| m.method.clone()).collect()
}

fn compare(
    scenario: &Scenario,
    methods: &[Method],
    settings: &SimulationSettings,
    rescale: DcRescale,
) -> Result<Vec<Emitted>, CliError> {
    let report = compare_models(&scenario.group, &methods_only(methods), settings, rescale)?;
    let mut table = Table::new(
        "compare",
        &[
            "method [-]",
            "order [-]",
            "weight [-]",
            "l2 [rad/s^0.5]",
            "linf [rad/s]",
            "hinf [rad/s per p.u.]",
            "dc_gap_before_rescale [-]",
        ],
    )?;
    for (row, m) in report.rows.iter().zip(methods) {
        table.row([
            row.label.clone(),
            row.order.to_string(),
            m.weight_name.clone(),
            num(row.errors.l2),
            num(row.errors.linf),
            num(row.errors.hinf),
            num(row.dc_gap),
        ])?;
    }
    Ok(vec![table.finish()?])
}

fn sweep_rows(table: &mut Table, report: &ComparisonReport) -> Result<(), CliError> {
    for row in &report.rows {
        for (metric, value) in [
            ("l2", row.errors.l2),
            ("linf", row.errors.linf),
            ("hinf", row.errors.hinf),
        ] {
            table.row([
                num(report.aggregate_inertia),
                row.label.clone(),
                metric.to_string(),
                num(value),
            ])?;
        }
    }
    Ok(())
}

fn sweep(
    scenario: &Scenario,
    methods: &[Method],
    inertias: &[f64],
    settings: &SimulationSettings,
    rescale: DcRescale,
) -> Result<Vec<Emitted>, CliError> {
    let reports = inertia_sweep(&scenario.group, inertias, &methods_only(methods), settings, rescale)?;
    let mut table = Table::new(
        "sweep",
        &["m_hat [s^2/rad]", "method [-]", "metric [-]", "value [metric unit]"],
    )?;
    for report in &reports {
        sweep_rows(&mut table, report)?;
    }
    Ok(vec![table.finish()?])
}

fn coherence(scenario: &Scenario, args: &CoherenceArgs) -> Result<Vec<Emitted>, CliError> {
    let net = scenario
        .network
        .as_ref()
        .ok_or_else(|| CliError::validation("network", "the coherence command needs a [network] section"))?;
    if !(args.eta0 > 0.0 && args.eta0.is_finite()) {
        return Err(CliError::validation("--eta0", "η0 > 0"));
    }
    if args.grid < 2 {
        return Err(CliError::validation("--grid", "at least 2 frequencies"));
    }
    if let Some(bad) = args.scales.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(CliError::validation("--scales", format!("α > 0, got {bad}")));
    }
    let bc = band_constants(&scenario.group, args.eta0, args.grid)?;
    let mut table = Table::new(
        "coherence",
        &[
            "scale [-]",
            "lambda2 [p.u.]",
            "gap [rad/s per p.u.]",
            "lemma2_bound [rad/s per p.u.]",
        ],
    )?;
    for &alpha in &args.scales {
        let scaled = net.scaled(alpha);
        let lambda2 = scaled.lambda2();
        let gap = coherence_gap(&scenario.group, &scaled, args.eta0, args.grid)?;
        let bound = match lemma2_bound(bc.m1, bc.m2, lambda2, args.eta0) {
            Ok(b) => num(b),
            Err(CoreError::NotApplicable { .. }) => "N/A".to_string(),
            Err(e) => return Err(e.into()),
        };
        table.row([num(alpha), num(lambda2), num(gap), bound])?;
    }
    Ok(vec![table.finish()?])
}
