//! Rayleigh block fading at power-gain level.
//!
//! Every channel power gain `|h|²` is exponentially distributed, constant over
//! one slot and independent across slots, receivers and links. Draws come from
//! a counter-based stream: a ChaCha8 generator keyed by the master seed, with
//! the trial index selecting the ChaCha stream and the (receiver, slot) pair
//! selecting a disjoint block of the keystream. A gain is therefore a pure
//! function of `(master seed, trial, receiver, slot, link)`, whatever order or
//! thread the trials run on.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Mean power gains seen by one receiver: the desired link plus `K`
/// cochannel interferers. Interferers transmit at the same power as the
/// desired source.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGainProfile {
    sigma2_desired: f64,
    sigma2_int: Vec<f64>,
}

impl LinkGainProfile {
    pub fn new(sigma2_desired: f64, sigma2_int: Vec<f64>) -> Result<Self> {
        if !(sigma2_desired > 0.0 && sigma2_desired.is_finite()) {
            return Err(Error::param(
                "sigma2_desired",
                format!("must be positive and finite, got {sigma2_desired}"),
            ));
        }
        if let Some(bad) = sigma2_int.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::param(
                "sigma2_int",
                format!("every interferer gain must be positive and finite, got {bad}"),
            ));
        }
        Ok(Self {
            sigma2_desired,
            sigma2_int,
        })
    }

    /// Profile with unit desired gain and interferer gains `1/λ[k]`.
    pub fn from_sir(lambdas: &[f64]) -> Result<Self> {
        if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::param(
                "lambda",
                format!("SIR must be positive and finite, got {bad}"),
            ));
        }
        Self::new(1.0, lambdas.iter().map(|l| 1.0 / l).collect())
    }

    pub fn sigma2_desired(&self) -> f64 {
        self.sigma2_desired
    }

    pub fn sigma2_int(&self) -> &[f64] {
        &self.sigma2_int
    }

    pub fn k(&self) -> usize {
        self.sigma2_int.len()
    }

    /// SIR vector `λ[k] = σ²_desired / σ²_int[k]`.
    pub fn lambdas(&self) -> Vec<f64> {
        self.sigma2_int
            .iter()
            .map(|s| self.sigma2_desired / s)
            .collect()
    }
}

/// Sampled gains of one slot at one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRealization {
    pub g_desired: f64,
    pub g_int: Vec<f64>,
}

impl SlotRealization {
    pub fn new(g_desired: f64, g_int: Vec<f64>) -> Self {
        Self { g_desired, g_int }
    }

    pub fn interference(&self) -> f64 {
        // fold from +0.0: an empty f64 `sum()` is -0.0
        self.g_int.iter().fold(0.0, |acc, g| acc + g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Receiver {
    Relay,
    User1,
    User2,
}

/// Position in the three-slot schedule: `n`, `n+1`, `n+2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    N,
    N1,
    N2,
}

impl Slot {
    pub fn index(self) -> u64 {
        match self {
            Slot::N => 0,
            Slot::N1 => 1,
            Slot::N2 => 2,
        }
    }
}

// Each (receiver, slot) block owns 2^32 keystream words.
const BLOCK_SHIFT: u32 = 32;
// Blocks past the fading ones are handed out for auxiliary randomness
// (bit-error patterns in the packet simulator).
const AUX_BLOCK_BASE: u64 = 16;

/// Counter-addressed random stream for one trial.
#[derive(Debug, Clone)]
pub struct TrialStream {
    rng: ChaCha8Rng,
}

impl TrialStream {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial_index);
        Self { rng }
    }

    /// Position the stream at the start of the block owned by
    /// `(receiver, slot)`.
    pub fn seek_slot(&mut self, receiver: Receiver, slot: Slot) {
        let r = match receiver {
            Receiver::Relay => 0,
            Receiver::User1 => 1,
            Receiver::User2 => 2,
        };
        self.seek_block(r * 3 + slot.index());
    }

    /// Position the stream at an auxiliary block, disjoint from every fading
    /// block.
    pub fn seek_aux(&mut self, aux: u64) {
        self.seek_block(AUX_BLOCK_BASE + aux);
    }

    fn seek_block(&mut self, block: u64) {
        self.rng.set_word_pos(u128::from(block) << BLOCK_SHIFT);
    }

    /// Uniform draw on `(0, 1]` with 53 bits of resolution.
    pub fn next_open01(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Exponential draw with the given mean, by inversion of one uniform.
pub fn sample_exponential(mean: f64, stream: &mut TrialStream) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::param(
            "mean",
            format!("must be positive and finite, got {mean}"),
        ));
    }
    Ok(exp_unchecked(mean, stream))
}

#[inline]
fn exp_unchecked(mean: f64, stream: &mut TrialStream) -> f64 {
    -mean * stream.next_open01().ln()
}

/// Draw one slot: desired gain first, then interferers in index order.
pub fn draw_slot(
    profile: &LinkGainProfile,
    receiver: Receiver,
    slot: Slot,
    stream: &mut TrialStream,
) -> SlotRealization {
    stream.seek_slot(receiver, slot);
    let g_desired = exp_unchecked(profile.sigma2_desired, stream);
    let g_int = profile
        .sigma2_int
        .iter()
        .map(|&s| exp_unchecked(s, stream))
        .collect();
    SlotRealization { g_desired, g_int }
}

/// Link-gain profiles for every (receiver, desired link) pair in the
/// downlink schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialProfiles {
    /// BS→RS, used in slots `n` and `n+1`.
    pub bs_rs: LinkGainProfile,
    pub bs_u1: LinkGainProfile,
    pub rs_u1: LinkGainProfile,
    pub bs_u2: LinkGainProfile,
    pub rs_u2: LinkGainProfile,
}

impl TrialProfiles {
    pub fn new(
        bs_rs: LinkGainProfile,
        bs_u1: LinkGainProfile,
        rs_u1: LinkGainProfile,
        bs_u2: LinkGainProfile,
        rs_u2: LinkGainProfile,
    ) -> Result<Self> {
        let k = bs_rs.k();
        for (name, p) in [
            ("bs_u1", &bs_u1),
            ("rs_u1", &rs_u1),
            ("bs_u2", &bs_u2),
            ("rs_u2", &rs_u2),
        ] {
            if p.k() != k {
                return Err(Error::Config(format!(
                    "profile {name} has {} interferers, bs_rs has {k}",
                    p.k()
                )));
            }
        }
        Ok(Self {
            bs_rs,
            bs_u1,
            rs_u1,
            bs_u2,
            rs_u2,
        })
    }

    /// Profiles where U2 mirrors U1.
    pub fn symmetric(
        bs_rs: LinkGainProfile,
        bs_u: LinkGainProfile,
        rs_u: LinkGainProfile,
    ) -> Result<Self> {
        Self::new(bs_rs, bs_u.clone(), rs_u.clone(), bs_u, rs_u)
    }

    /// Every link at every receiver sees the same SIR vector.
    pub fn equal_sir(lambdas: &[f64]) -> Result<Self> {
        let p = LinkGainProfile::from_sir(lambdas)?;
        Self::symmetric(p.clone(), p.clone(), p)
    }

    pub fn k(&self) -> usize {
        self.bs_rs.k()
    }
}

/// All gains needed for one pass of the three-slot protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    /// BS→RS in slots `n`, `n+1`.
    pub rs_slots: [SlotRealization; 2],
    /// BS→U1 in `n`, BS→U1 in `n+1`, RS→U1 in `n+2`.
    pub u1_slots: [SlotRealization; 3],
    /// BS→U2 in `n`, BS→U2 in `n+1`, RS→U2 in `n+2`.
    pub u2_slots: [SlotRealization; 3],
}

pub fn draw_trial(profiles: &TrialProfiles, stream: &mut TrialStream) -> TrialDraw {
    use Receiver::*;
    use Slot::*;
    TrialDraw {
        rs_slots: [
            draw_slot(&profiles.bs_rs, Relay, N, stream),
            draw_slot(&profiles.bs_rs, Relay, N1, stream),
        ],
        u1_slots: [
            draw_slot(&profiles.bs_u1, User1, N, stream),
            draw_slot(&profiles.bs_u1, User1, N1, stream),
            draw_slot(&profiles.rs_u1, User1, N2, stream),
        ],
        u2_slots: [
            draw_slot(&profiles.bs_u2, User2, N, stream),
            draw_slot(&profiles.bs_u2, User2, N1, stream),
            draw_slot(&profiles.rs_u2, User2, N2, stream),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_deterministic() {
        let a = sample_exponential(1.0, &mut TrialStream::new(42, 7)).unwrap();
        let b = sample_exponential(1.0, &mut TrialStream::new(42, 7)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn exponential_rejects_bad_mean() {
        let mut s = TrialStream::new(0, 0);
        assert!(matches!(
            sample_exponential(0.0, &mut s),
            Err(Error::Parameter { name: "mean", .. })
        ));
        assert!(sample_exponential(-1.0, &mut s).is_err());
        assert!(sample_exponential(f64::NAN, &mut s).is_err());
    }

    #[test]
    fn exponential_sample_mean() {
        let mut s = TrialStream::new(1, 0);
        let n = 1_000_000;
        let mean = (0..n)
            .map(|_| sample_exponential(2.0, &mut s).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 2.0).abs() <= 0.01, "mean {mean}");
    }

    #[test]
    fn exponential_ks_statistic() {
        let n = 100_000;
        let mut s = TrialStream::new(2024, 3);
        let mut xs: Vec<f64> = (0..n)
            .map(|_| sample_exponential(1.0, &mut s).unwrap())
            .collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (-x).exp();
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                (f - lo).abs().max((hi - f).abs())
            })
            .fold(0.0, f64::max);
        // asymptotic 1% critical value
        let crit = 1.628 / (n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} >= {crit}");
    }

    #[test]
    fn zero_interferers() {
        let profiles = TrialProfiles::equal_sir(&[]).unwrap();
        let t = draw_trial(&profiles, &mut TrialStream::new(5, 5));
        assert!(t.rs_slots.iter().all(|s| s.g_int.is_empty()));
        assert!(t.u1_slots.iter().all(|s| s.g_int.is_empty()));
        assert!(t.u2_slots.iter().all(|s| s.g_int.is_empty()));
    }

    #[test]
    fn trials_are_separated() {
        let profiles = TrialProfiles::equal_sir(&[10.0; 3]).unwrap();
        let a = draw_trial(&profiles, &mut TrialStream::new(9, 0));
        let b = draw_trial(&profiles, &mut TrialStream::new(9, 1));
        assert_ne!(a, b);
        assert_ne!(a.u1_slots[0].g_desired, b.u1_slots[0].g_desired);
    }

    #[test]
    fn slots_use_distinct_blocks() {
        let p = LinkGainProfile::from_sir(&[1.0, 1.0]).unwrap();
        let mut s = TrialStream::new(3, 0);
        let a = draw_slot(&p, Receiver::User1, Slot::N, &mut s);
        let b = draw_slot(&p, Receiver::User1, Slot::N1, &mut s);
        let a2 = draw_slot(&p, Receiver::User1, Slot::N, &mut s);
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }

    #[test]
    fn draw_order_does_not_matter() {
        let profiles = TrialProfiles::equal_sir(&[3.0, 5.0]).unwrap();
        let full = draw_trial(&profiles, &mut TrialStream::new(11, 4));
        let mut s = TrialStream::new(11, 4);
        let u2 = draw_slot(&profiles.rs_u2, Receiver::User2, Slot::N2, &mut s);
        let rs = draw_slot(&profiles.bs_rs, Receiver::Relay, Slot::N1, &mut s);
        assert_eq!(full.u2_slots[2], u2);
        assert_eq!(full.rs_slots[1], rs);
    }

    #[test]
    fn mismatched_k_is_a_config_error() {
        let a = LinkGainProfile::from_sir(&[1.0, 2.0]).unwrap();
        let b = LinkGainProfile::from_sir(&[1.0]).unwrap();
        assert!(matches!(
            TrialProfiles::symmetric(a.clone(), b, a),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn profile_validation() {
        assert!(LinkGainProfile::new(0.0, vec![1.0]).is_err());
        assert!(LinkGainProfile::new(1.0, vec![1.0, -2.0]).is_err());
        assert!(LinkGainProfile::from_sir(&[0.0]).is_err());
        let p = LinkGainProfile::new(2.0, vec![1.0, 4.0]).unwrap();
        assert_eq!(p.lambdas(), vec![2.0, 0.5]);
    }

    #[test]
    fn desired_gain_moment_and_slot_independence() {
        let profiles = TrialProfiles::equal_sir(&[10.0; 7]).unwrap();
        let n = 1_000_000u64;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut stream_m = 0.0;
        for i in 0..n {
            let mut s = TrialStream::new(77, i);
            let x = draw_slot(&profiles.bs_u1, Receiver::User1, Slot::N, &mut s).g_desired;
            stream_m += x;
            if i < 100_000 {
                let y = draw_slot(&profiles.bs_u1, Receiver::User1, Slot::N1, &mut s).g_desired;
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
            }
        }
        let mean = stream_m / n as f64;
        assert!((mean - 1.0).abs() <= 0.003, "mean {mean}");

        let m = 100_000.0;
        let cov = sxy / m - (sx / m) * (sy / m);
        let vx = sxx / m - (sx / m).powi(2);
        let vy = syy / m - (sy / m).powi(2);
        let rho = cov / (vx * vy).sqrt();
        assert!(rho.abs() <= 0.01, "correlation {rho}");
    }
}
