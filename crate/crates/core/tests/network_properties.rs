mod common;

use coherent_core::network::{
    aggregate_turbine, band_constants, coherence_gap, coherent_aggregate, coi_trajectory, generator_transfer,
    lemma2_bound, network_response, CoherentGroup, CoupledRealization, Edge, GeneratorModel, NetworkSpec,
};
use coherent_core::{dc_gain, hinf_norm, step_response, Error, Trajectory, TransferFunction};
use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

const SCALES: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const ETA0: f64 = 5.0;
const GRID: usize = 400;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn swing_sums(params in prop::collection::vec((0.05..2.0f64, 0.01..1.5f64), 1..8)) {
        let group = CoherentGroup::new(params.iter().map(|&(m, d)| GeneratorModel::Swing { m, d }).collect()).unwrap();
        let m: f64 = params.iter().map(|p| p.0).sum();
        let d: f64 = params.iter().map(|p| p.1).sum();
        let expected = TransferFunction::new(vec![1.0], vec![m, d]).unwrap();
        prop_assert!(coherent_aggregate(&group).coefficient_error(&expected) < 1e-9);
    }

    #[test]
    fn inverter_harmonic_mean(params in prop::collection::vec((0.2..5.0f64, 0.05..2.0f64), 1..8)) {
        let group = CoherentGroup::new(
            params.iter().map(|&(k_p, tau_p)| GeneratorModel::DroopInverter { k_p, tau_p }).collect(),
        ).unwrap();
        let k_hat = 1.0 / params.iter().map(|p| 1.0 / p.0).sum::<f64>();
        let tau_hat = k_hat * params.iter().map(|p| p.1 / p.0).sum::<f64>();
        let expected = TransferFunction::first_order(k_hat, tau_hat);
        prop_assert!(coherent_aggregate(&group).coefficient_error(&expected) < 1e-9);
    }

    #[test]
    fn homogeneous_time_constant_collapse(
        params in prop::collection::vec((0.05..2.0f64, 0.0..1.5f64, 0.0..1.0f64), 1..8),
        tau in 0.5..10.0f64,
    ) {
        let group = CoherentGroup::new(
            params.iter().map(|&(m, d, r_inv)| GeneratorModel::SwingTurbine { m, d, r_inv, tau }).collect(),
        ).unwrap();
        let m: f64 = params.iter().map(|p| p.0).sum();
        let d: f64 = params.iter().map(|p| p.1).sum();
        let r: f64 = params.iter().map(|p| p.2).sum();
        let expected = generator_transfer(&GeneratorModel::SwingTurbine { m, d, r_inv: r, tau });
        let g = coherent_aggregate(&group);
        prop_assert_eq!(g.order(), expected.order());
        prop_assert!(g.coefficient_error(&expected) < 1e-9);
        if r > 0.0 {
            prop_assert!((dc_gain(&aggregate_turbine(&group)).unwrap() - r).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn aggregation_identity(group in prop::collection::vec(generator(), 1..8), etas in prop::collection::vec(-3.0..2.0f64, 50)) {
        let group = CoherentGroup::new(group).unwrap();
        let g = coherent_aggregate(&group);
        for x in etas {
            let s = Complex64::new(0.0, 10f64.powf(x));
            let sum: Complex64 = group.generators().iter().map(|u| u.inverse_at(s)).sum();
            let inv = g.eval(s).inv();
            prop_assert!((inv - sum).norm() <= 1e-9 * sum.norm());
        }
    }

    #[test]
    fn laplacian_annihilation(group in prop::collection::vec(generator(), 10), x in -2.0..2.0f64, alpha in 0.1..100.0f64) {
        let group = CoherentGroup::new(group).unwrap();
        let net = random10_network().scaled(alpha);
        let eta = 10f64.powf(x);
        let s = Complex64::new(0.0, eta);
        let t = network_response(&group, &net, eta).unwrap();
        let diag = DMatrix::from_fn(10, 10, |i, j| if i == j { group.generators()[i].inverse_at(s) } else { Complex64::new(0.0, 0.0) });
        let sums = (diag * t).row_sum();
        for v in sums.iter() {
            prop_assert!((v - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn perturbed_inverse_bound(
        a in prop::collection::vec(-2.0..2.0f64, 16),
        b in prop::collection::vec(-1.0..1.0f64, 16),
        frac in 0.0..0.99f64,
    ) {
        let a = DMatrix::from_vec(4, 4, a) + DMatrix::identity(4, 4) * 3.0;
        let sigma_min = a.singular_values().min();
        prop_assume!(sigma_min > 1e-3);
        let b = DMatrix::from_vec(4, 4, b);
        let b = &b * (frac * sigma_min / b.singular_values().max().max(1e-12));
        let b_norm = b.singular_values().max();
        let inv = (&a + &b).try_inverse().unwrap();
        prop_assert!(inv.singular_values().max() <= 1.0 / (sigma_min - b_norm) * (1.0 + 1e-12));
    }
}

#[test]
fn gap_trend_on_random10() {
    let group = random10_group();
    let net = random10_network();
    let gaps: Vec<f64> = SCALES
        .iter()
        .map(|&a| coherence_gap(&group, &net.scaled(a), ETA0, GRID).unwrap())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] < 1e-2, "{gaps:?}");
}

#[test]
fn bound_dominates_gap() {
    let group = random10_group();
    let net = random10_network();
    let bc = band_constants(&group, ETA0, GRID).unwrap();
    let mut applied = 0;
    for alpha in [1.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 1e4] {
        let scaled = net.scaled(alpha);
        match lemma2_bound(bc.m1, bc.m2, scaled.lambda2(), ETA0) {
            Ok(bound) => {
                applied += 1;
                let gap = coherence_gap(&group, &scaled, ETA0, GRID).unwrap();
                assert!(gap <= bound, "alpha {alpha}: gap {gap} > bound {bound}");
            }
            Err(Error::NotApplicable { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(applied >= 3);
}

#[test]
fn bound_arithmetic() {
    let b = lemma2_bound(1.0, 1.0, 10.0, 1.0).unwrap();
    assert!((b - ((1.0 + 2.0 + 1.0 / 9.0) / 8.0 + 1.0 / 9.0)).abs() < 1e-15);
    assert!((b - 0.5).abs() < 1e-15);
    assert!(matches!(
        lemma2_bound(1.0, 1.0, 2.0, 1.0),
        Err(Error::NotApplicable { .. })
    ));
    assert!(lemma2_bound(1.0, 1.0, 1e12, 1.0).unwrap() < 1e-10);
}

#[test]
fn band_constants_single_swing() {
    let group = CoherentGroup::new(vec![GeneratorModel::Swing { m: 1.0, d: 1.0 }]).unwrap();
    let bc = band_constants(&group, 1.0, 200).unwrap();
    assert!((bc.m1 - 1.0).abs() < 1e-12);
    assert!((bc.m2 - 2f64.sqrt()).abs() < 1e-12);
    let group = CoherentGroup::new(vec![GeneratorModel::Swing { m: 0.5, d: 2.0 }; 3]).unwrap();
    let bc = band_constants(&group, 1e-3, 200).unwrap();
    assert!((bc.m1 - 3.0 / 6.0).abs() < 1e-12);
}

#[test]
fn band_constants_test_case_regression() {
    let group = test_case_group();
    let bc = band_constants(&group, 10.0, GRID).unwrap();
    // the resonance peak of ĝ lies inside the band, the largest inverse at its edge
    let peak = 5.0 * hinf_norm(&coherent_aggregate(&group), 1e-9).unwrap();
    assert!(bc.m1 <= peak * (1.0 + 1e-9) && bc.m1 > 0.98 * peak, "{bc:?} vs {peak}");
    let edge = group
        .generators()
        .iter()
        .map(|g| g.inverse_at(Complex64::new(0.0, 10.0)).norm())
        .fold(0.0, f64::max);
    assert!(rel(bc.m2, edge) < 1e-12, "{bc:?} vs {edge}");
}

#[test]
fn two_identical_swings_converge() {
    let group = CoherentGroup::new(vec![GeneratorModel::Swing { m: 1.0, d: 1.0 }; 2]).unwrap();
    let net = NetworkSpec::from_edges(
        2,
        &[Edge {
            from: 0,
            to: 1,
            weight: 1.0,
        }],
    )
    .unwrap();
    let gaps: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&a| coherence_gap(&group, &net.scaled(a), 1.0, 200).unwrap())
        .collect();
    assert!(gaps[2] < gaps[1] && gaps[1] < gaps[0], "{gaps:?}");
    assert!(coherence_gap(&group, &net.scaled(1e6), 1.0, 200).unwrap() < 1e-3);
}

#[test]
fn off_diagonal_entries_approach_coherent_response() {
    let group = CoherentGroup::new(vec![GeneratorModel::Swing { m: 0.2, d: 0.5 }; 4]).unwrap();
    let edges = [
        Edge {
            from: 0,
            to: 1,
            weight: 1.0,
        },
        Edge {
            from: 1,
            to: 2,
            weight: 1.0,
        },
        Edge {
            from: 2,
            to: 3,
            weight: 1.0,
        },
    ];
    let net = NetworkSpec::from_edges(4, &edges).unwrap();
    let eta = 0.7;
    let ghat = coherent_aggregate(&group).eval(Complex64::new(0.0, eta));
    let dist: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&a| (network_response(&group, &net.scaled(a), eta).unwrap()[(0, 3)] - ghat).norm())
        .collect();
    assert!(dist[2] < dist[1] && dist[1] < dist[0], "{dist:?}");
}

#[test]
fn single_bus_is_its_generator() {
    let g = GeneratorModel::SwingTurbine {
        m: 0.3,
        d: 0.1,
        r_inv: 0.2,
        tau: 4.0,
    };
    let group = CoherentGroup::new(vec![g]).unwrap();
    let net = NetworkSpec::from_laplacian(DMatrix::zeros(1, 1)).unwrap();
    let t = network_response(&group, &net, 0.9).unwrap();
    assert!((t[(0, 0)] - generator_transfer(&g).eval(Complex64::new(0.0, 0.9))).norm() < 1e-14);
    assert_eq!(coherence_gap(&group, &net, 1.0, 10).unwrap(), 0.0);
}

#[test]
fn coupled_realizations_are_hurwitz() {
    assert!(CoupledRealization::new(&random10_group(), &random10_network())
        .unwrap()
        .is_hurwitz());
    for alpha in SCALES {
        assert!(
            CoupledRealization::new(&random10_group(), &random10_network().scaled(alpha))
                .unwrap()
                .is_hurwitz()
        );
    }
}

#[test]
fn strong_coupling_coi_tracks_aggregate() {
    let group = random10_group();
    let net = random10_network().scaled(1000.0);
    let coupled = CoupledRealization::new(&group, &net).unwrap();
    let mut disturbance = vec![0.0; 10];
    disturbance[3] = -0.1;
    let trajs = coupled.step_response(&disturbance, 20.0, 1e-3).unwrap();
    let coi = coi_trajectory(&RANDOM10_M, &trajs).unwrap();
    let aggregate = step_response(&coherent_aggregate(&group), -0.1, 20.0, 1e-3).unwrap();
    let scale = aggregate.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let worst = coi
        .values()
        .iter()
        .zip(aggregate.values())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst < 1e-2 * scale, "{worst} vs {scale}");
}

#[test]
fn coi_examples() {
    let a = Trajectory::uniform(0.1, vec![0.0, 1.0, 2.0]);
    let b = Trajectory::uniform(0.1, vec![4.0, 5.0, 6.0]);
    assert_eq!(coi_trajectory(&[2.0, 2.0], &[a.clone(), a.clone()]).unwrap(), a);
    assert_eq!(
        coi_trajectory(&[1.0, 1.0], &[a.clone(), b.clone()]).unwrap().values(),
        &[2.0, 3.0, 4.0]
    );
    assert_eq!(
        coi_trajectory(&[1.0, 3.0], &[a.clone(), b.clone()]).unwrap().values()[0],
        3.0
    );
    let c = Trajectory::uniform(0.2, vec![0.0, 1.0, 2.0]);
    assert_eq!(coi_trajectory(&[1.0, 1.0], &[a, c]), Err(Error::GridMismatch));
}
