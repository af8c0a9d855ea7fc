//! Per-slot mutual information under cochannel interference and the
//! decoding predicates of the three-slot relay protocol.
//!
//! A reception "succeeds" when its mutual information strictly exceeds the
//! target rate; equality counts as failure.

use std::fmt;

use crate::error::{Error, Result};
use crate::fading::{SlotRealization, TrialDraw};

/// Time-sharing factor of the relay scheme: two messages in three slots.
pub const ONC_PREFACTOR: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// SINR = g·γ / (Σ g_k·γ + 1).
    FiniteSnr { snr: f64 },
    /// SINR = g / Σ g_k; thermal noise neglected.
    InterferenceLimited,
}

impl NoiseMode {
    pub fn finite_snr_db(snr_db: f64) -> Self {
        NoiseMode::FiniteSnr {
            snr: 10f64.powf(snr_db / 10.0),
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseMode::FiniteSnr { snr } => {
                write!(f, "finite-snr({} dB)", 10.0 * snr.log10())
            }
            NoiseMode::InterferenceLimited => f.write_str("interference-limited"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    rate: f64,
    prefactor: f64,
    noise: NoiseMode,
}

impl RateParams {
    pub fn new(rate: f64, prefactor: f64, noise: NoiseMode) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::param("rate", format!("must be >= 0, got {rate}")));
        }
        if !(prefactor > 0.0 && prefactor <= 1.0) {
            return Err(Error::param(
                "prefactor",
                format!("must lie in (0, 1], got {prefactor}"),
            ));
        }
        if let NoiseMode::FiniteSnr { snr } = noise {
            if !(snr > 0.0 && snr.is_finite()) {
                return Err(Error::param("snr", format!("must be positive, got {snr}")));
            }
        }
        Ok(Self {
            rate,
            prefactor,
            noise,
        })
    }

    /// Parameters for the relay scheme (prefactor 2/3).
    pub fn onc(rate: f64, noise: NoiseMode) -> Result<Self> {
        Self::new(rate, ONC_PREFACTOR, noise)
    }

    /// Parameters for direct transmission (prefactor 1).
    pub fn noncoop(rate: f64, noise: NoiseMode) -> Result<Self> {
        Self::new(rate, 1.0, noise)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn noise(&self) -> NoiseMode {
        self.noise
    }

    /// SINR below which a slot is in outage: `2^{R/prefactor} − 1`.
    pub fn sinr_threshold(&self) -> f64 {
        (self.rate / self.prefactor).exp2() - 1.0
    }
}

/// Mutual information in bit/s/Hz. May be `+∞` for an interference-free,
/// noise-free link.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MutualInfo(f64);

impl MutualInfo {
    pub const ZERO: MutualInfo = MutualInfo(0.0);

    pub fn new(bits: f64) -> Self {
        debug_assert!(bits >= 0.0, "mutual information must be nonnegative");
        MutualInfo(bits)
    }

    pub fn bits(self) -> f64 {
        self.0
    }

    /// Reception at rate `rate` succeeds; equality is a failure.
    pub fn supports(self, rate: f64) -> bool {
        self.0 > rate
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }
}

pub fn sinr(slot: &SlotRealization, noise: NoiseMode) -> f64 {
    let interference = slot.interference();
    match noise {
        NoiseMode::FiniteSnr { snr } => slot.g_desired * snr / (interference * snr + 1.0),
        NoiseMode::InterferenceLimited => {
            if slot.g_desired == 0.0 {
                0.0
            } else {
                // K = 0 (or all-zero interference) gives +inf.
                slot.g_desired / interference
            }
        }
    }
}

pub fn mutual_information(slot: &SlotRealization, params: &RateParams) -> MutualInfo {
    let s = sinr(slot, params.noise);
    MutualInfo(params.prefactor * s.ln_1p() / std::f64::consts::LN_2)
}

/// Which source messages the relay decoded in slots `n` and `n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelayState {
    /// θ = 1: both messages.
    Both,
    /// θ = 2: only the first (b₁).
    FirstOnly,
    /// θ = 3: only the second (b₂).
    SecondOnly,
    /// θ = 4: neither.
    Neither,
}

impl RelayState {
    pub const ALL: [RelayState; 4] = [
        RelayState::Both,
        RelayState::FirstOnly,
        RelayState::SecondOnly,
        RelayState::Neither,
    ];

    pub fn from_decoded(first: bool, second: bool) -> Self {
        match (first, second) {
            (true, true) => RelayState::Both,
            (true, false) => RelayState::FirstOnly,
            (false, true) => RelayState::SecondOnly,
            (false, false) => RelayState::Neither,
        }
    }

    pub fn theta(self) -> u8 {
        self.index() as u8 + 1
    }

    /// Zero-based position, `theta() - 1`.
    pub fn index(self) -> usize {
        match self {
            RelayState::Both => 0,
            RelayState::FirstOnly => 1,
            RelayState::SecondOnly => 2,
            RelayState::Neither => 3,
        }
    }

    pub fn from_theta(theta: u8) -> Option<Self> {
        Self::ALL.get(usize::from(theta).checked_sub(1)?).copied()
    }

    /// Same event seen from U2: the roles of the two messages swap.
    pub fn mirrored(self) -> Self {
        match self {
            RelayState::FirstOnly => RelayState::SecondOnly,
            RelayState::SecondOnly => RelayState::FirstOnly,
            s => s,
        }
    }
}

impl fmt::Display for RelayState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ={}", self.theta())
    }
}

pub fn classify_relay_state(i_br_n: MutualInfo, i_br_n1: MutualInfo, rate: f64) -> RelayState {
    RelayState::from_decoded(i_br_n.supports(rate), i_br_n1.supports(rate))
}

/// Mutual information U1 effectively sees for b₁ given the relay state.
///
/// θ=1: direct branch or the XOR branch (which needs both the overheard b₂
/// and the relay word); θ=2: direct or the forwarded b₁; θ=3,4: direct only.
pub fn conditional_mi_u1(
    theta: RelayState,
    i_b1_n: MutualInfo,
    i_b1_n1: MutualInfo,
    i_r1_n2: MutualInfo,
) -> MutualInfo {
    match theta {
        RelayState::Both => i_b1_n.max(i_b1_n1.min(i_r1_n2)),
        RelayState::FirstOnly => i_b1_n.max(i_r1_n2),
        RelayState::SecondOnly | RelayState::Neither => i_b1_n,
    }
}

/// Mirror image of [`conditional_mi_u1`] for U2 decoding b₂: its direct slot
/// is `n+1` and the overheard message arrives in slot `n`.
pub fn conditional_mi_u2(
    theta: RelayState,
    i_b2_n: MutualInfo,
    i_b2_n1: MutualInfo,
    i_r2_n2: MutualInfo,
) -> MutualInfo {
    conditional_mi_u1(theta.mirrored(), i_b2_n1, i_b2_n, i_r2_n2)
}

/// Every intermediate quantity of one trial's evaluation at U1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OncEvaluation {
    pub i_br_n: MutualInfo,
    pub i_br_n1: MutualInfo,
    pub theta: RelayState,
    pub i_b1_n: MutualInfo,
    pub i_b1_n1: MutualInfo,
    pub i_r1_n2: MutualInfo,
    pub conditional: MutualInfo,
}

impl OncEvaluation {
    pub fn outage(&self, rate: f64) -> bool {
        !self.conditional.supports(rate)
    }
}

pub fn relay_state(trial: &TrialDraw, params: &RateParams) -> RelayState {
    let i_n = mutual_information(&trial.rs_slots[0], params);
    let i_n1 = mutual_information(&trial.rs_slots[1], params);
    classify_relay_state(i_n, i_n1, params.rate)
}

pub fn evaluate_onc_u1(trial: &TrialDraw, params: &RateParams) -> OncEvaluation {
    let i_br_n = mutual_information(&trial.rs_slots[0], params);
    let i_br_n1 = mutual_information(&trial.rs_slots[1], params);
    let theta = classify_relay_state(i_br_n, i_br_n1, params.rate);
    let i_b1_n = mutual_information(&trial.u1_slots[0], params);
    let i_b1_n1 = mutual_information(&trial.u1_slots[1], params);
    let i_r1_n2 = mutual_information(&trial.u1_slots[2], params);
    OncEvaluation {
        i_br_n,
        i_br_n1,
        theta,
        i_b1_n,
        i_b1_n1,
        i_r1_n2,
        conditional: conditional_mi_u1(theta, i_b1_n, i_b1_n1, i_r1_n2),
    }
}

/// Outage indicator for U1 under the relay scheme.
pub fn trial_outage_onc(trial: &TrialDraw, params: &RateParams) -> bool {
    evaluate_onc_u1(trial, params).outage(params.rate)
}

/// Outage indicator for U2 under the relay scheme.
pub fn trial_outage_onc_u2(trial: &TrialDraw, params: &RateParams) -> bool {
    let theta = relay_state(trial, params);
    let i_n = mutual_information(&trial.u2_slots[0], params);
    let i_n1 = mutual_information(&trial.u2_slots[1], params);
    let i_n2 = mutual_information(&trial.u2_slots[2], params);
    !conditional_mi_u2(theta, i_n, i_n1, i_n2).supports(params.rate)
}

/// Outage indicator for direct transmission over one slot. `params` should
/// carry prefactor 1 (see [`RateParams::noncoop`]).
pub fn trial_outage_noncoop(slot: &SlotRealization, params: &RateParams) -> bool {
    !mutual_information(slot, params).supports(params.rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::{draw_trial, TrialProfiles, TrialStream};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn slot(g: f64, int: &[f64]) -> SlotRealization {
        SlotRealization::new(g, int.to_vec())
    }

    fn il(rate: f64) -> RateParams {
        RateParams::onc(rate, NoiseMode::InterferenceLimited).unwrap()
    }

    fn mi(b: f64) -> MutualInfo {
        MutualInfo::new(b)
    }

    #[test]
    fn zero_desired_gain_is_zero_bits() {
        assert_eq!(
            mutual_information(&slot(0.0, &[1.0, 3.0]), &il(1.0)).bits(),
            0.0
        );
        let fs = RateParams::onc(1.0, NoiseMode::FiniteSnr { snr: 10.0 }).unwrap();
        assert_eq!(mutual_information(&slot(0.0, &[]), &fs).bits(), 0.0);
    }

    #[test]
    fn unit_sinr_interference_limited() {
        let v = mutual_information(&slot(3.0, &[1.0, 2.0]), &il(1.0)).bits();
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn finite_snr_substitution() {
        let p = RateParams::onc(1.0, NoiseMode::FiniteSnr { snr: 1.0 }).unwrap();
        let v = mutual_information(&slot(3.0, &[1.0, 2.0]), &p).bits();
        assert_relative_eq!(v, (2.0 / 3.0) * (1.75f64).log2(), max_relative = 1e-15);
    }

    #[test]
    fn no_interference_is_infinite() {
        let v = mutual_information(&slot(0.5, &[]), &il(1.0));
        assert!(v.bits().is_infinite() && v.bits() > 0.0);
        assert!(v.supports(1e300));
    }

    #[test]
    fn relay_state_cases() {
        assert_eq!(classify_relay_state(mi(0.9), mi(0.9), 0.5).theta(), 1);
        assert_eq!(classify_relay_state(mi(0.9), mi(0.1), 0.5).theta(), 2);
        assert_eq!(classify_relay_state(mi(0.1), mi(0.9), 0.5).theta(), 3);
        assert_eq!(classify_relay_state(mi(0.1), mi(0.1), 0.5).theta(), 4);
        // equality is failure
        assert_eq!(classify_relay_state(mi(0.5), mi(0.5), 0.5).theta(), 4);
    }

    #[test]
    fn theta_round_trip() {
        for s in RelayState::ALL {
            assert_eq!(RelayState::from_theta(s.theta()), Some(s));
        }
        assert_eq!(RelayState::from_theta(0), None);
        assert_eq!(RelayState::from_theta(5), None);
    }

    #[test]
    fn conditional_mi_cases() {
        let (a, b, c) = (mi(0.4), mi(0.9), mi(0.7));
        assert_eq!(conditional_mi_u1(RelayState::Both, a, b, c).bits(), 0.7);
        assert_eq!(
            conditional_mi_u1(RelayState::FirstOnly, a, b, c).bits(),
            0.7
        );
        assert_eq!(
            conditional_mi_u1(RelayState::SecondOnly, a, b, c).bits(),
            0.4
        );
        assert_eq!(conditional_mi_u1(RelayState::Neither, a, b, c).bits(), 0.4);
    }

    #[test]
    fn conditional_mi_u2_mirrors_u1() {
        let (a, b, c) = (mi(0.4), mi(0.9), mi(0.7));
        // U2's direct slot is n+1.
        assert_eq!(conditional_mi_u2(RelayState::Neither, a, b, c).bits(), 0.9);
        assert_eq!(
            conditional_mi_u2(RelayState::FirstOnly, a, b, c).bits(),
            0.9
        );
        assert_eq!(
            conditional_mi_u2(RelayState::SecondOnly, b, a, c).bits(),
            0.7
        );
        assert_eq!(conditional_mi_u2(RelayState::Both, b, a, c).bits(), 0.7);
    }

    fn trial(rs: [(f64, f64); 2], u1: [(f64, f64); 3]) -> TrialDraw {
        let s = |(g, i): (f64, f64)| slot(g, &[i]);
        TrialDraw {
            rs_slots: [s(rs[0]), s(rs[1])],
            u1_slots: [s(u1[0]), s(u1[1]), s(u1[2])],
            u2_slots: [s(u1[1]), s(u1[0]), s(u1[2])],
        }
    }

    #[test]
    fn zero_rate_never_outage() {
        let t = trial([(0.1, 5.0); 2], [(0.01, 9.0); 3]);
        assert!(!trial_outage_onc(&t, &il(0.0)));
        let nc = RateParams::noncoop(0.0, NoiseMode::InterferenceLimited).unwrap();
        assert!(!trial_outage_noncoop(&t.u1_slots[0], &nc));
    }

    #[test]
    fn zero_gains_always_outage() {
        let t = trial([(0.0, 1.0); 2], [(0.0, 1.0); 3]);
        assert!(trial_outage_onc(&t, &il(0.5)));
        assert!(trial_outage_onc_u2(&t, &il(0.5)));
    }

    #[test]
    fn first_only_relay_saves_u1() {
        // R = 0.5 → SINR threshold 2^0.75 − 1 ≈ 0.682.
        // RS: slot n SINR 2 (ok), slot n+1 SINR 0.1 (fail) → θ = 2.
        // U1: direct SINR 0.1 → I = (2/3)log2(1.1) ≈ 0.092 < 0.5;
        //     relay SINR 3 → I = (2/3)·2 = 4/3 > 0.5.
        let t = trial(
            [(2.0, 1.0), (0.1, 1.0)],
            [(0.1, 1.0), (5.0, 1.0), (3.0, 1.0)],
        );
        let e = evaluate_onc_u1(&t, &il(0.5));
        assert_eq!(e.theta, RelayState::FirstOnly);
        assert_relative_eq!(
            e.i_b1_n.bits(),
            (2.0 / 3.0) * 1.1f64.log2(),
            max_relative = 1e-14
        );
        assert_relative_eq!(e.conditional.bits(), 4.0 / 3.0, max_relative = 1e-14);
        assert!(!trial_outage_onc(&t, &il(0.5)));

        // Same gains with the relay failing slot n as well → outage.
        let t4 = trial(
            [(0.1, 1.0), (0.1, 1.0)],
            [(0.1, 1.0), (5.0, 1.0), (3.0, 1.0)],
        );
        assert!(trial_outage_onc(&t4, &il(0.5)));
    }

    #[test]
    fn noncoop_threshold_is_outage() {
        let p = RateParams::noncoop(1.0, NoiseMode::InterferenceLimited).unwrap();
        // SINR exactly 2^1 − 1 = 1
        assert!(trial_outage_noncoop(&slot(2.0, &[2.0]), &p));
        assert!(!trial_outage_noncoop(&slot(3.0, &[1.0]), &p));
    }

    #[test]
    fn threshold_matches_closed_form() {
        assert_relative_eq!(
            il(1.0).sinr_threshold(),
            2f64.powf(1.5) - 1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn params_validation() {
        assert!(RateParams::new(-1.0, 1.0, NoiseMode::InterferenceLimited).is_err());
        assert!(RateParams::new(1.0, 0.0, NoiseMode::InterferenceLimited).is_err());
        assert!(RateParams::new(1.0, 1.5, NoiseMode::InterferenceLimited).is_err());
        assert!(RateParams::new(1.0, 1.0, NoiseMode::FiniteSnr { snr: 0.0 }).is_err());
    }

    proptest! {
        #[test]
        fn mi_monotone(
            g in 0.0f64..50.0,
            dg in 0.0f64..10.0,
            ints in proptest::collection::vec(0.01f64..10.0, 1..8),
            which in 0usize..8,
            di in 0.0f64..10.0,
            fin in proptest::bool::ANY,
        ) {
            let noise = if fin { NoiseMode::FiniteSnr { snr: 5.0 } } else { NoiseMode::InterferenceLimited };
            let p = RateParams::onc(1.0, noise).unwrap();
            let base = mutual_information(&slot(g, &ints), &p);
            prop_assert!(mutual_information(&slot(g + dg, &ints), &p) >= base);
            let mut more = ints.clone();
            let j = which % more.len();
            more[j] += di;
            prop_assert!(mutual_information(&slot(g, &more), &p) <= base);
        }

        #[test]
        fn threshold_equivalence(
            g in 0.0f64..50.0,
            ints in proptest::collection::vec(0.01f64..10.0, 1..8),
            rate in 0.01f64..4.0,
        ) {
            let p = il(rate);
            let s = slot(g, &ints);
            let by_mi = mutual_information(&s, &p).bits() < rate;
            let by_sinr = sinr(&s, p.noise()) < p.sinr_threshold();
            // the two routes can only disagree within rounding of the threshold
            let margin = (sinr(&s, p.noise()) - p.sinr_threshold()).abs();
            prop_assert!(by_mi == by_sinr || margin < 1e-9 * (1.0 + p.sinr_threshold()));
        }

        #[test]
        fn relay_help_never_hurts(a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0) {
            let (a, b, c) = (mi(a), mi(b), mi(c));
            let direct = conditional_mi_u1(RelayState::SecondOnly, a, b, c);
            prop_assert!(conditional_mi_u1(RelayState::Both, a, b, c) >= direct);
            prop_assert!(conditional_mi_u1(RelayState::FirstOnly, a, b, c) >= direct);
        }

        #[test]
        fn theta_partition(seed in any::<u64>(), idx in 0u64..1000, rate in 0.0f64..3.0) {
            let profiles = TrialProfiles::equal_sir(&[5.0; 4]).unwrap();
            let t = draw_trial(&profiles, &mut TrialStream::new(seed, idx));
            let p = il(rate);
            let i_n = mutual_information(&t.rs_slots[0], &p).bits();
            let i_n1 = mutual_information(&t.rs_slots[1], &p).bits();
            let events = [
                i_n > rate && i_n1 > rate,
                i_n > rate && i_n1 <= rate,
                i_n <= rate && i_n1 > rate,
                i_n <= rate && i_n1 <= rate,
            ];
            prop_assert_eq!(events.iter().filter(|&&e| e).count(), 1);
            let theta = relay_state(&t, &p);
            prop_assert!(events[theta.index()]);
        }
    }
}
