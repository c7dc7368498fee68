#![allow(dead_code)]

use coherent_core::network::{CoherentGroup, GeneratorModel};
use coherent_core::poly;
use coherent_core::reduction::FrequencyWeight;
use coherent_core::TransferFunction;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

pub const TEST_CASE_R_INV: [f64; 5] = [0.0218, 0.0256, 0.0236, 0.0255, 0.0192];
pub const TEST_CASE_TAU: [f64; 5] = [9.08, 5.26, 2.29, 7.97, 3.24];
pub const TEST_CASE_M_HAT: f64 = 0.0683;
pub const TEST_CASE_D_HAT: f64 = 0.0107;

pub fn test_case_group() -> CoherentGroup {
    let n = TEST_CASE_R_INV.len() as f64;
    let units = TEST_CASE_R_INV
        .iter()
        .zip(TEST_CASE_TAU)
        .map(|(&r_inv, tau)| GeneratorModel::SwingTurbine {
            m: TEST_CASE_M_HAT / n,
            d: TEST_CASE_D_HAT / n,
            r_inv,
            tau,
        })
        .collect();
    CoherentGroup::new(units).unwrap()
}

pub fn w_tb() -> FrequencyWeight {
    FrequencyWeight::lag_lead(3e-2, 1e-4).unwrap()
}

pub fn w_cl() -> FrequencyWeight {
    FrequencyWeight::lag_lead(8e-2, 1e-4).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Stable pole set of exactly `order` poles: real poles and conjugate pairs.
pub fn stable_poles(max_order: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-4.0..-0.3f64, 0.2..3.0f64, any::<bool>()), 1..=max_order).prop_map(move |specs| {
        let mut poles = Vec::new();
        for (re, im, complex) in specs {
            if complex && poles.len() + 2 <= max_order {
                poles.push(Complex64::new(re, im));
                poles.push(Complex64::new(re, -im));
            } else if poles.len() < max_order {
                poles.push(Complex64::new(re, 0.0));
            }
        }
        poles
    })
}

/// Random stable, strictly proper plant of order at most `max_order`.
pub fn stable_plant(max_order: usize) -> impl Strategy<Value = TransferFunction> {
    (
        stable_poles(max_order),
        prop::collection::vec(-2.0..2.0f64, max_order),
        0.5..2.0f64,
    )
        .prop_map(|(poles, coeffs, lead)| {
            let den = poly::from_roots(&poles);
            let mut num = coeffs[..poles.len()].to_vec();
            num[0] = lead.copysign(num[0]);
            // keep the DC gain away from zero
            let last = num.len() - 1;
            if num[last].abs() < 0.2 {
                num[last] = 0.2f64.copysign(num[last]);
            }
            TransferFunction::new(num, den).unwrap()
        })
}

/// Random stable proper (possibly biproper) system.
pub fn stable_proper(max_order: usize) -> impl Strategy<Value = TransferFunction> {
    (stable_plant(max_order), -1.0..1.0f64).prop_map(|(g, d)| &g + &TransferFunction::gain(d))
}

/// `∫₀^T e^{At} Q e^{Aᵀt} dt` by composite Simpson on `n_steps` (even) panels.
pub fn gramian_quadrature(a: &DMatrix<f64>, q: &DMatrix<f64>, horizon: f64, n_steps: usize) -> DMatrix<f64> {
    let h = horizon / n_steps as f64;
    let step = (a * h).exp();
    let mut phi = DMatrix::<f64>::identity(a.nrows(), a.ncols());
    let mut acc = DMatrix::<f64>::zeros(a.nrows(), a.ncols());
    for k in 0..=n_steps {
        let w = if k == 0 || k == n_steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += (&phi * q * phi.transpose()) * w;
        phi = &step * &phi;
    }
    acc * (h / 3.0)
}

pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub const RANDOM10_SEED: u64 = 1;
pub const RANDOM10_M: [f64; 10] = [0.1, 0.09, 0.11, 0.12, 0.08, 0.105, 0.095, 0.115, 0.085, 0.1];
pub const RANDOM10_D: [f64; 10] = [1.0, 1.1, 0.9, 0.8, 1.2, 1.0, 0.95, 1.05, 0.85, 1.15];
pub const RANDOM10_R_INV: [f64; 10] = [0.6, 0.8, 0.5, 0.9, 0.7, 1.0, 0.55, 0.75, 0.65, 0.85];
pub const RANDOM10_TAU: [f64; 10] = [5.0, 3.0, 8.0, 2.5, 6.5, 4.0, 9.0, 3.5, 7.0, 2.0];

pub fn random10_group() -> CoherentGroup {
    let units = (0..10)
        .map(|i| GeneratorModel::SwingTurbine {
            m: RANDOM10_M[i],
            d: RANDOM10_D[i],
            r_inv: RANDOM10_R_INV[i],
            tau: RANDOM10_TAU[i],
        })
        .collect();
    CoherentGroup::new(units).unwrap()
}

pub fn random10_network() -> coherent_core::network::NetworkSpec {
    let edges = coherent_core::network::random_connected_edges(10, 0.5, 0.5, 1.5, RANDOM10_SEED).unwrap();
    coherent_core::network::NetworkSpec::from_edges(10, &edges).unwrap()
}

/// Mixed group of swing, turbine and inverter units.
pub fn generator() -> impl Strategy<Value = GeneratorModel> {
    prop_oneof![
        (0.05..2.0f64, 0.0..1.5f64).prop_map(|(m, d)| GeneratorModel::Swing { m, d }),
        (0.05..2.0f64, 0.0..1.5f64, 0.0..1.0f64, 0.5..10.0f64)
            .prop_map(|(m, d, r_inv, tau)| GeneratorModel::SwingTurbine { m, d, r_inv, tau }),
        (0.2..5.0f64, 0.05..2.0f64).prop_map(|(k_p, tau_p)| GeneratorModel::DroopInverter { k_p, tau_p }),
    ]
}
