//! Shared fixtures for the criterion benchmarks.

use onc_core::{NoiseMode, RateParams, ScenarioConfig, TrialProfiles};

/// The K = 7 equal-SIR scenario used throughout the outage benchmarks.
pub fn fig_scenario(sir_db: f64) -> TrialProfiles {
    ScenarioConfig::equal(7, 1.0, sir_db)
        .and_then(|s| s.profiles())
        .expect("valid scenario")
}

pub fn onc_params(rate: f64) -> RateParams {
    RateParams::onc(rate, NoiseMode::InterferenceLimited).expect("valid rate")
}
