//! Monte Carlo estimation of outage and relay-state probabilities.
//!
//! Trials are identified by their index. Each trial builds its own
//! [`TrialStream`] from `(master_seed, index)`, so the set of outcomes does
//! not depend on how indices are split across workers, and the reduction is
//! an integer sum.

use std::fmt;

use rayon::prelude::*;

use crate::analytic::{outage_noncoop, outage_onc};
use crate::capacity::{
    classify_relay_state, mutual_information, relay_state, trial_outage_noncoop, trial_outage_onc,
    NoiseMode, RateParams, RelayState,
};
use crate::error::{Error, Result};
use crate::fading::{draw_slot, draw_trial, Receiver, Slot, TrialProfiles, TrialStream};
use crate::scenario::ScenarioConfig;

const BATCH: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Onc,
    NonCoop,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Onc => "onc",
            Scheme::NonCoop => "noncoop",
        }
    }

    pub fn params(self, rate: f64, noise: NoiseMode) -> Result<RateParams> {
        match self {
            Scheme::Onc => RateParams::onc(rate, noise),
            Scheme::NonCoop => RateParams::noncoop(rate, noise),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub scheme: Scheme,
    pub noise: NoiseMode,
    /// Worker threads; 0 lets the thread pool pick.
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: u64, master_seed: u64, scheme: Scheme) -> Self {
        Self {
            trials,
            master_seed,
            scheme,
            noise: NoiseMode::InterferenceLimited,
            workers: 0,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn with_noise(self, noise: NoiseMode) -> Self {
        Self { noise, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        Ok(())
    }
}

/// Binomial proportion with its normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl OutageEstimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p_hat = hits as f64 / n;
        let stderr = (p_hat * (1.0 - p_hat) / n).sqrt();
        let half = 1.96 * stderr;
        Self {
            p_hat,
            trials,
            stderr,
            ci95: ((p_hat - half).max(0.0), (p_hat + half).min(1.0)),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci95.0 <= p && p <= self.ci95.1
    }
}

/// Run `trial(index)` for every index and reduce with `reduce` starting
/// from `zero`. `reduce` must be associative and commutative.
fn run_indexed<T, F, R>(config: &McConfig, zero: T, trial: F, reduce: R) -> Result<T>
where
    T: Copy + Send + Sync,
    F: Fn(u64, &mut T) + Sync,
    R: Fn(T, T) -> T + Sync,
{
    let batches = config.trials.div_ceil(BATCH);
    let total = config.trials;
    let work = || {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut acc = zero;
                for i in b * BATCH..((b + 1) * BATCH).min(total) {
                    trial(i, &mut acc);
                }
                acc
            })
            .reduce(|| zero, &reduce)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(work))
}

/// Fraction of trials in outage at U1 for the configured scheme.
pub fn estimate_outage(
    config: &McConfig,
    profiles: &TrialProfiles,
    rate: f64,
) -> Result<OutageEstimate> {
    config.validate()?;
    let params = config.scheme.params(rate, config.noise)?;
    let seed = config.master_seed;
    let hits = match config.scheme {
        Scheme::Onc => run_indexed(
            config,
            0u64,
            |i, acc| {
                let t = draw_trial(profiles, &mut TrialStream::new(seed, i));
                *acc += u64::from(trial_outage_onc(&t, &params));
            },
            |a, b| a + b,
        )?,
        Scheme::NonCoop => run_indexed(
            config,
            0u64,
            |i, acc| {
                // The direct link is U1's slot-n reception; drawing it alone
                // yields the same gains as a full draw.
                let mut s = TrialStream::new(seed, i);
                let slot = draw_slot(&profiles.bs_u1, Receiver::User1, Slot::N, &mut s);
                *acc += u64::from(trial_outage_noncoop(&slot, &params));
            },
            |a, b| a + b,
        )?,
    };
    Ok(OutageEstimate::from_counts(hits, config.trials))
}

/// Empirical relay-state counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaCounts {
    pub counts: [u64; 4],
    pub trials: u64,
}

impl ThetaCounts {
    pub fn frequencies(&self) -> [f64; 4] {
        self.counts.map(|c| c as f64 / self.trials as f64)
    }

    pub fn estimate(&self, index: usize) -> OutageEstimate {
        OutageEstimate::from_counts(self.counts[index], self.trials)
    }
}

pub fn estimate_theta_frequencies(
    config: &McConfig,
    profiles: &TrialProfiles,
    rate: f64,
) -> Result<ThetaCounts> {
    config.validate()?;
    let params = RateParams::onc(rate, config.noise)?;
    let seed = config.master_seed;
    let counts = run_indexed(
        config,
        [0u64; 4],
        |i, acc| {
            let mut s = TrialStream::new(seed, i);
            let rs = [
                draw_slot(&profiles.bs_rs, Receiver::Relay, Slot::N, &mut s),
                draw_slot(&profiles.bs_rs, Receiver::Relay, Slot::N1, &mut s),
            ];
            let i_n = mutual_information(&rs[0], &params);
            let i_n1 = mutual_information(&rs[1], &params);
            acc[classify_relay_state(i_n, i_n1, rate).index()] += 1;
        },
        |a, b| std::array::from_fn(|k| a[k] + b[k]),
    )?;
    Ok(ThetaCounts {
        counts,
        trials: config.trials,
    })
}

/// Relay state of one full trial; exposed for consistency checks against
/// [`estimate_theta_frequencies`].
pub fn trial_relay_state(
    profiles: &TrialProfiles,
    params: &RateParams,
    seed: u64,
    index: u64,
) -> RelayState {
    relay_state(
        &draw_trial(profiles, &mut TrialStream::new(seed, index)),
        params,
    )
}

/// One line of an outage sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sir_db: f64,
    pub rate: f64,
    pub scheme: Scheme,
    pub p_analytic: f64,
    pub p_mc: f64,
    pub mc_trials: u64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Evaluate both schemes at every `(sir_db, rate)` grid point, setting all
/// links of `template` to the grid SIR. Rows follow grid order, relay scheme
/// first. The Monte Carlo column always uses `config`'s seed and noise mode;
/// the analytic column is the interference-limited closed form.
pub fn sweep(
    grid: &[(f64, f64)],
    config: &McConfig,
    template: &ScenarioConfig,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::param("grid", "must contain at least one point"));
    }
    let mut rows = Vec::with_capacity(grid.len() * 2);
    for &(sir_db, rate) in grid {
        let scenario = template.with_equal_sir(sir_db);
        let profiles = scenario.profiles()?;
        let [rs, b1, r1] = scenario.sir_vectors()?;
        for scheme in [Scheme::Onc, Scheme::NonCoop] {
            let p_analytic = match scheme {
                Scheme::Onc => outage_onc(rate, &rs, &b1, &r1)?.p_total,
                Scheme::NonCoop => outage_noncoop(rate, &b1)?,
            };
            let est = estimate_outage(&config.with_scheme(scheme), &profiles, rate)?;
            rows.push(SweepRow {
                sir_db,
                rate,
                scheme,
                p_analytic,
                p_mc: est.p_hat,
                mc_trials: est.trials,
                stderr: est.stderr,
                ci_low: est.ci95.0,
                ci_high: est.ci95.1,
            });
        }
    }
    Ok(rows)
}
