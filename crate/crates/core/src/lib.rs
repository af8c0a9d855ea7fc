//! Analysis and simulation of opportunistic network coding (ONC) in a
//! cellular downlink with one relay station and two users under cochannel
//! interference.
//!
//! The base station sends `b₁` (for U1) in slot `n` and `b₂` (for U2) in
//! slot `n+1`; in slot `n+2` the relay sends `b₁ ⊕ b₂`, whichever single
//! message it decoded, or nothing useful, depending on its CRC checks.
//!
//! - [`fading`]: Rayleigh block-fading power gains with counter-based seeding.
//! - [`capacity`]: per-slot mutual information, relay state, conditional MI.
//! - [`analytic`]: closed-form interference-limited outage probabilities.
//! - [`montecarlo`]: deterministic parallel outage estimation and sweeps.
//! - [`dmt`]: diversity–multiplexing tradeoff curves and slope estimates.
//! - [`packetsim`]: bit-exact CRC/XOR protocol state machine.
//! - [`scenario`]: scenario description shared by the above.
//! - [`output`]: CSV rendering of sweep and DMT tables.

pub mod analytic;
pub mod capacity;
pub mod dmt;
pub mod error;
pub mod fading;
pub mod montecarlo;
pub mod output;
pub mod packetsim;
pub mod scenario;

pub use analytic::{OutageBreakdown, SirVector};
pub use capacity::{MutualInfo, NoiseMode, RateParams, RelayState};
pub use dmt::{DmtPoint, DmtScheme};
pub use error::{Error, Result};
pub use fading::{LinkGainProfile, SlotRealization, TrialDraw, TrialProfiles, TrialStream};
pub use montecarlo::{McConfig, OutageEstimate, Scheme, SweepRow};
pub use packetsim::{CrcCode, DecodeResult, Frame, FrameFormat, RelayAction, RelayActionKind};
pub use scenario::{ScenarioConfig, SirSpec};
