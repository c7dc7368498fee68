//! Fixtures shared by the benches.

use coherent_core::network::{CoherentGroup, GeneratorModel};
use coherent_core::reduction::FrequencyWeight;

/// Five turbine-governed machines with aggregate inertia 0.0683 and damping
/// 0.0107.
pub fn test_case_group() -> CoherentGroup {
    let r_inv = [0.0218, 0.0256, 0.0236, 0.0255, 0.0192];
    let tau = [9.08, 5.26, 2.29, 7.97, 3.24];
    let units = r_inv
        .iter()
        .zip(tau)
        .map(|(&r_inv, tau)| GeneratorModel::SwingTurbine {
            m: 0.0683 / 5.0,
            d: 0.0107 / 5.0,
            r_inv,
            tau,
        })
        .collect();
    CoherentGroup::new(units).expect("valid parameters")
}

pub fn w_tb() -> FrequencyWeight {
    FrequencyWeight::lag_lead(3e-2, 1e-4).expect("valid weight")
}

pub fn w_cl() -> FrequencyWeight {
    FrequencyWeight::lag_lead(8e-2, 1e-4).expect("valid weight")
}
