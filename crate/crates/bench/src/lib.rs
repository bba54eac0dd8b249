//! Fixtures shared by the benchmarks.

use roa_core::{Family, IntegratorConfig, LearnerConfig, VectorField};

pub fn duffing() -> VectorField {
    VectorField::builtin("paper2d", None, None).expect("builtin system")
}

/// `epsilon = 0.1`, `k = 50`, `c = 3`, `tau_s = 0.5`, `J = 2000`.
pub fn reference_config(family: Family, seed: u64) -> LearnerConfig {
    let mut cfg = LearnerConfig::new(family);
    cfg.seed = seed;
    cfg.integrator = IntegratorConfig::default();
    cfg
}
