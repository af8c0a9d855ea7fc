//! Cross-checks of the closed forms against simulation and of the packet
//! protocol against the capacity predicates, for one configured scenario.

use std::fmt;

use onc_core::analytic::{outage_noncoop, outage_onc, pr_theta};
use onc_core::capacity::{evaluate_onc_u1, RateParams};
use onc_core::fading::{draw_trial, TrialStream};
use onc_core::montecarlo::{estimate_outage, estimate_theta_frequencies, McConfig, Scheme};
use onc_core::packetsim::run_packet_trial;
use onc_core::{NoiseMode, RelayState};

use crate::config::LoadedConfig;
use crate::error::CliError;

/// Absolute floor on the outage tolerance for very small probabilities.
pub const OUTAGE_FLOOR: f64 = 5e-4;
pub const MAX_PACKET_TRIALS: u64 = 100_000;
const PAYLOAD_LEN: usize = 16;
const PAYLOAD_AUX: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    pub workers: usize,
    /// Multiplies the closed-form outage values before comparison.
    pub perturb_analytic: Option<f64>,
}

fn binomial_check(name: String, p: f64, p_hat: f64, n: u64, floor: f64) -> Check {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let tol = (3.0 * sigma).max(floor);
    let err = (p_hat - p).abs();
    Check {
        name,
        pass: err <= tol,
        detail: format!(
            "analytic {p:.6}, simulated {p_hat:.6}, |diff| {err:.2e} vs tolerance {tol:.2e} \
             (margin {:+.2e})",
            tol - err
        ),
    }
}

pub fn validate(config: &LoadedConfig, opts: ValidateOptions) -> Result<Vec<Check>, CliError> {
    let s = &config.scenario;
    let rate = s.rate_bits;
    let [rs, b1, r1] = s.sir_vectors()?;
    let profiles = s.profiles()?;
    let scale = opts.perturb_analytic.unwrap_or(1.0);
    // The closed forms hold in the interference-limited regime only.
    let mc = McConfig::new(s.trials, s.seed, Scheme::Onc)
        .with_noise(NoiseMode::InterferenceLimited)
        .with_workers(opts.workers);
    let mut checks = Vec::new();

    let onc = outage_onc(rate, &rs, &b1, &r1)?.p_total * scale;
    let est = estimate_outage(&mc, &profiles, rate)?;
    checks.push(binomial_check(
        "relay scheme outage".into(),
        onc,
        est.p_hat,
        est.trials,
        OUTAGE_FLOOR,
    ));

    let direct = outage_noncoop(rate, &b1)? * scale;
    let est = estimate_outage(&mc.with_scheme(Scheme::NonCoop), &profiles, rate)?;
    checks.push(binomial_check(
        "direct transmission outage".into(),
        direct,
        est.p_hat,
        est.trials,
        OUTAGE_FLOOR,
    ));

    let p_theta = pr_theta(rate, &rs)?;
    let counts = estimate_theta_frequencies(&mc, &profiles, rate)?;
    for state in RelayState::ALL {
        let i = state.index();
        checks.push(binomial_check(
            format!("relay state {state} frequency"),
            p_theta[i],
            counts.frequencies()[i],
            counts.trials,
            0.0,
        ));
    }
    let sum_err = (p_theta.iter().sum::<f64>() - 1.0).abs();
    checks.push(Check {
        name: "relay state probabilities sum to 1".into(),
        pass: sum_err <= 1e-12,
        detail: format!("|sum - 1| = {sum_err:.1e} vs tolerance 1e-12"),
    });

    checks.extend(packet_checks(config)?);
    Ok(checks)
}

/// Couple fading draws to the bit-level protocol and compare against the
/// mutual-information predicates.
fn packet_checks(config: &LoadedConfig) -> Result<Vec<Check>, CliError> {
    let s = &config.scenario;
    let params = RateParams::onc(s.rate_bits, s.noise)?;
    let profiles = s.profiles()?;
    let n = s.trials.min(MAX_PACKET_TRIALS);
    let mut mismatches = 0u64;
    let mut disagreements = 0u64;
    for i in 0..n {
        let mut stream = TrialStream::new(s.seed, i);
        let draw = draw_trial(&profiles, &mut stream);
        stream.seek_aux(PAYLOAD_AUX);
        let mut b1 = [0u8; PAYLOAD_LEN];
        let mut b2 = [0u8; PAYLOAD_LEN];
        stream.fill_bytes(&mut b1);
        stream.fill_bytes(&mut b2);
        let out = run_packet_trial(&draw, &params, (&b1, &b2), &mut stream)?;
        let predicate = evaluate_onc_u1(&draw, &params)
            .conditional
            .supports(s.rate_bits);
        let decoded = out.run.user1.recovered.as_deref() == Some(&b1[..]);
        mismatches += u64::from(decoded != predicate);
        disagreements += u64::from(out.run.action.kind.relay_state() != out.theta);
    }
    Ok(vec![
        Check {
            name: "packet decoding matches capacity predicate".into(),
            pass: mismatches <= 1,
            detail: format!("{mismatches} mismatches in {n} trials (allowance 1)"),
        },
        Check {
            name: "relay action matches relay state".into(),
            pass: disagreements == 0,
            detail: format!("{disagreements} disagreements in {n} trials"),
        },
    ])
}
