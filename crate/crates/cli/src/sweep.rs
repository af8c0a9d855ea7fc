use onc_core::montecarlo::{sweep, McConfig, Scheme};
use onc_core::SweepRow;

use crate::config::LoadedConfig;
use crate::error::CliError;

/// 0 to 30 dB in 5 dB steps.
pub fn default_sir_grid() -> Vec<f64> {
    (0..=6).map(|i| 5.0 * i as f64).collect()
}

/// Both schemes at every (rate, SIR) pair, rates outermost. Every link of the
/// configured scenario is set to the grid SIR.
pub fn outage_sweep(
    config: &LoadedConfig,
    sir_grid_db: &[f64],
    rates: &[f64],
    workers: usize,
) -> Result<Vec<SweepRow>, CliError> {
    if sir_grid_db.is_empty() {
        return Err(CliError::Argument("SIR grid is empty".into()));
    }
    if rates.is_empty() {
        return Err(CliError::Argument("rate list is empty".into()));
    }
    let s = &config.scenario;
    let grid: Vec<(f64, f64)> = rates
        .iter()
        .flat_map(|&r| sir_grid_db.iter().map(move |&db| (db, r)))
        .collect();
    let mc = McConfig::new(s.trials, s.seed, Scheme::Onc)
        .with_noise(s.noise)
        .with_workers(workers);
    Ok(sweep(&grid, &mc, s)?)
}
