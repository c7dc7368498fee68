mod common;

use coherent_core::metrics::{
    compare_models, hinf_diff, inertia_sweep, step_error_norms, unmatched_step_error_norms, ComparisonReport,
    DcRescale, ErrorTriple, ReductionMethod, ReductionPath, SimulationSettings,
};
use coherent_core::network::coherent_aggregate;
use coherent_core::reduction::{match_dc, reduce_closed_loop_path};
use coherent_core::{dc_gain, Error, TransferFunction};
use common::*;

fn methods() -> Vec<ReductionMethod> {
    vec![
        ReductionMethod::new(ReductionPath::Turbine, 2, w_tb()),
        ReductionMethod::new(ReductionPath::ClosedLoop, 2, w_cl()),
        ReductionMethod::new(ReductionPath::Turbine, 3, w_tb()),
        ReductionMethod::new(ReductionPath::ClosedLoop, 3, w_cl()),
    ]
}

fn metrics(e: &ErrorTriple) -> [f64; 3] {
    [e.l2, e.linf, e.hinf]
}

fn assert_cl_dominates(report: &ComparisonReport) {
    for k in [2, 3] {
        let find = |path| {
            report
                .rows
                .iter()
                .find(|r| r.order == k && r.path == path)
                .expect("row present")
        };
        let tb = metrics(&find(ReductionPath::Turbine).errors);
        let cl = metrics(&find(ReductionPath::ClosedLoop).errors);
        for (c, t) in cl.iter().zip(tb) {
            assert!(*c <= t, "m̂ {}: k {k}: cl {cl:?} vs tb {tb:?}", report.aggregate_inertia);
        }
    }
}

#[test]
fn first_order_oracle() {
    let a = TransferFunction::new(vec![1.0], vec![1.0, 1.0]).unwrap();
    let b = TransferFunction::new(vec![2.0], vec![1.0, 2.0]).unwrap();
    let (l2, linf) = step_error_norms(&a, &b, 1.0, 60.0, 1e-3).unwrap();
    assert!((l2 - (1.0f64 / 12.0).sqrt()).abs() < 1e-4);
    assert!((linf - 0.25).abs() < 1e-4);
    let (l2n, linfn) = step_error_norms(&a, &b, -0.1, 60.0, 1e-3).unwrap();
    assert!((l2n - 0.1 * l2).abs() < 1e-14 && (linfn - 0.1 * linf).abs() < 1e-14);
}

#[test]
fn grid_convergence_and_horizon_sufficiency() {
    let group = test_case_group();
    let g = coherent_aggregate(&group);
    let target = dc_gain(&g).unwrap();
    for k in [2, 3] {
        let red = match_dc(&reduce_closed_loop_path(&group, k, &w_cl()).unwrap(), target).unwrap();
        let (base, _) = step_error_norms(&g, &red, -0.1, 200.0, 1e-3).unwrap();
        let (half, _) = step_error_norms(&g, &red, -0.1, 200.0, 5e-4).unwrap();
        assert!(rel(half, base) < 1e-3, "k {k}: {base} vs {half}");
        let (long, _) = step_error_norms(&g, &red, -0.1, 400.0, 1e-3).unwrap();
        assert!((long - base).abs() < 1e-6, "k {k}: {base} vs {long}");
    }
}

#[test]
fn metrics_nonnegative_and_zero_on_self() {
    let g = coherent_aggregate(&test_case_group());
    assert_eq!(step_error_norms(&g, &g, -0.1, 50.0, 1e-2).unwrap(), (0.0, 0.0));
    assert_eq!(hinf_diff(&g, &g).unwrap(), 0.0);
    let report = compare_models(
        &test_case_group(),
        &methods(),
        &SimulationSettings::default(),
        DcRescale::After,
    )
    .unwrap();
    assert_eq!(report.rows.len(), 4);
    for row in &report.rows {
        assert!(metrics(&row.errors).iter().all(|&v| v > 0.0 && v.is_finite()));
    }
}

#[test]
fn unmatched_dc_is_rejected() {
    let group = test_case_group();
    let g = coherent_aggregate(&group);
    let red = reduce_closed_loop_path(&group, 2, &w_cl()).unwrap();
    assert!(matches!(
        step_error_norms(&g, &red, -0.1, 10.0, 1e-2),
        Err(Error::DcMismatch(_))
    ));
}

#[test]
fn closed_loop_path_dominates_on_test_case() {
    let report = compare_models(
        &test_case_group(),
        &methods(),
        &SimulationSettings::default(),
        DcRescale::After,
    )
    .unwrap();
    assert_cl_dominates(&report);
    let labels: Vec<&str> = report.rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["BT2-tb", "BT2-cl", "BT3-tb", "BT3-cl"]);
}

#[test]
fn inertia_sweep_dominance_and_order() {
    let inertias = [0.03, TEST_CASE_M_HAT, 0.15];
    let settings = SimulationSettings::default();
    let reports = inertia_sweep(&test_case_group(), &inertias, &methods(), &settings, DcRescale::After).unwrap();
    assert_eq!(reports.len(), 3);
    for (report, m) in reports.iter().zip(inertias) {
        assert_eq!(report.aggregate_inertia, m);
        assert_eq!(report.aggregate_damping, TEST_CASE_D_HAT);
        assert_cl_dominates(report);
    }
    let direct = compare_models(&test_case_group(), &methods(), &settings, DcRescale::After).unwrap();
    assert_eq!(reports[1].rows, direct.rows);
}

#[test]
fn degenerate_sweep_matches_compare() {
    let settings = SimulationSettings {
        amplitude: -0.1,
        horizon: 100.0,
        dt: 1e-2,
    };
    let methods = &methods()[..1];
    let swept = inertia_sweep(
        &test_case_group(),
        &[TEST_CASE_M_HAT],
        methods,
        &settings,
        DcRescale::After,
    )
    .unwrap();
    let direct = compare_models(&test_case_group(), methods, &settings, DcRescale::After).unwrap();
    assert_eq!(swept[0].rows, direct.rows);
    assert!(inertia_sweep(&test_case_group(), &[0.0], methods, &settings, DcRescale::After).is_err());
}

#[test]
fn rescale_modes() {
    let settings = SimulationSettings {
        amplitude: -0.1,
        horizon: 200.0,
        dt: 1e-2,
    };
    let m = &methods()[1..2];
    let after = compare_models(&test_case_group(), m, &settings, DcRescale::After)
        .unwrap()
        .rows[0]
        .errors;
    let before = compare_models(&test_case_group(), m, &settings, DcRescale::Before)
        .unwrap()
        .rows[0]
        .errors;
    let off = compare_models(&test_case_group(), m, &settings, DcRescale::Off)
        .unwrap()
        .rows[0]
        .errors;
    assert_eq!(after.l2, before.l2);
    assert_eq!(after.hinf, off.hinf);
    assert_ne!(after.hinf, before.hinf);
    let group = test_case_group();
    let g = coherent_aggregate(&group);
    let raw = reduce_closed_loop_path(&group, 2, &w_cl()).unwrap();
    let (l2, linf) = unmatched_step_error_norms(&g, &raw, -0.1, 200.0, 1e-2).unwrap();
    assert_eq!((off.l2, off.linf), (l2, linf));
    assert_ne!(off.l2, after.l2);
}
