//! Scenario description shared by the analytic and simulation paths.

use crate::analytic::{db_to_linear, SirVector};
use crate::capacity::NoiseMode;
use crate::error::{Error, Result};
use crate::fading::{LinkGainProfile, TrialProfiles};

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// Per-interferer SIRs in dB, either one value for every link or one vector
/// per desired link. U2's links mirror U1's.
#[derive(Debug, Clone, PartialEq)]
pub enum SirSpec {
    Equal(f64),
    PerLink {
        bs_rs: Vec<f64>,
        bs_u1: Vec<f64>,
        rs_u1: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub k_interferers: usize,
    pub rate_bits: f64,
    pub sir: SirSpec,
    pub noise: NoiseMode,
    pub trials: u64,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Equal-SIR scenario with default Monte Carlo settings.
    pub fn equal(k: usize, rate_bits: f64, sir_db: f64) -> Result<Self> {
        Self {
            k_interferers: k,
            rate_bits,
            sir: SirSpec::Equal(sir_db),
            noise: NoiseMode::InterferenceLimited,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.k_interferers == 0 {
            return Err(Error::param("k_interferers", "must be at least 1"));
        }
        if !(self.rate_bits >= 0.0 && self.rate_bits.is_finite()) {
            return Err(Error::param(
                "rate_bits",
                format!("must be >= 0, got {}", self.rate_bits),
            ));
        }
        if self.trials == 0 {
            return Err(Error::param("mc.trials", "must be at least 1"));
        }
        if let NoiseMode::FiniteSnr { snr } = self.noise {
            if !(snr > 0.0 && snr.is_finite()) {
                return Err(Error::param("snr_db", "must be finite"));
            }
        }
        match &self.sir {
            SirSpec::Equal(db) => {
                if !db.is_finite() {
                    return Err(Error::param("sir_db", "must be finite"));
                }
            }
            SirSpec::PerLink {
                bs_rs,
                bs_u1,
                rs_u1,
            } => {
                for (name, v) in [("bs_rs", bs_rs), ("bs_u1", bs_u1), ("rs_u1", rs_u1)] {
                    if v.len() != self.k_interferers {
                        return Err(Error::Config(format!(
                            "sir_db.{name} has {} entries, expected k_interferers = {}",
                            v.len(),
                            self.k_interferers
                        )));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Config(format!(
                            "sir_db.{name} contains a non-finite value"
                        )));
                    }
                }
            }
        }
        Ok(self)
    }

    /// Copy of this scenario with every link at `sir_db`.
    pub fn with_equal_sir(&self, sir_db: f64) -> Self {
        Self {
            sir: SirSpec::Equal(sir_db),
            ..self.clone()
        }
    }

    fn link_db(&self) -> [Vec<f64>; 3] {
        match &self.sir {
            SirSpec::Equal(db) => std::array::from_fn(|_| vec![*db; self.k_interferers]),
            SirSpec::PerLink {
                bs_rs,
                bs_u1,
                rs_u1,
            } => [bs_rs.clone(), bs_u1.clone(), rs_u1.clone()],
        }
    }

    /// Linear SIR vectors for (BS→RS, BS→U1, RS→U1).
    pub fn sir_vectors(&self) -> Result<[SirVector; 3]> {
        let [a, b, c] = self.link_db();
        let lin = |v: Vec<f64>| SirVector::new(v.into_iter().map(db_to_linear).collect());
        Ok([lin(a)?, lin(b)?, lin(c)?])
    }

    pub fn profiles(&self) -> Result<TrialProfiles> {
        let [a, b, c] = self.sir_vectors()?;
        TrialProfiles::symmetric(
            LinkGainProfile::from_sir(a.lambdas())?,
            LinkGainProfile::from_sir(b.lambdas())?,
            LinkGainProfile::from_sir(c.lambdas())?,
        )
    }
}
