//! Slot-by-slot trace of one protocol run.

use std::fmt::Write as _;

use onc_core::capacity::RateParams;
use onc_core::fading::{draw_trial, TrialStream};
use onc_core::packetsim::{run_protocol, HopOutcomes, ProtocolRun, ReceivedWord};
use onc_core::{DecodeResult, ScenarioConfig};

use crate::error::CliError;

/// Channel override for the demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Force {
    /// Every hop delivers its word intact.
    Clean,
    /// The relay misses b₂; every other hop is clean.
    RsB2,
    /// The relay misses both messages; every other hop is clean.
    RsBoth,
}

impl Force {
    fn hops(self) -> HopOutcomes {
        let mut hops = HopOutcomes::ALL_CLEAN;
        match self {
            Force::Clean => {}
            Force::RsB2 => hops.relay[1] = false,
            Force::RsBoth => hops.relay = [false, false],
        }
        hops
    }

    fn name(self) -> &'static str {
        match self {
            Force::Clean => "clean",
            Force::RsB2 => "rs-b2",
            Force::RsBoth => "rs-both",
        }
    }
}

pub fn parse_payload(name: &str, text: &str) -> Result<Vec<u8>, CliError> {
    let bytes = hex::decode(text).map_err(|e| CliError::Argument(format!("{name}: {e}")))?;
    if bytes.is_empty() {
        return Err(CliError::Argument(format!("{name}: payload is empty")));
    }
    Ok(bytes)
}

/// Run the protocol once and render the trace. Without `force`, hop outcomes
/// come from trial 0 of `scenario` under `seed`.
pub fn packet_demo(
    b1: &[u8],
    b2: &[u8],
    seed: u64,
    force: Option<Force>,
    scenario: &ScenarioConfig,
) -> Result<(ProtocolRun, String), CliError> {
    let mut stream = TrialStream::new(seed, 0);
    let (hops, source) = match force {
        Some(f) => (f.hops(), format!("forced {}", f.name())),
        None => {
            let params = RateParams::onc(scenario.rate_bits, scenario.noise)?;
            let draw = draw_trial(&scenario.profiles()?, &mut stream);
            (
                HopOutcomes::from_trial(&draw, &params),
                format!(
                    "fading draw, seed {seed}, K={}, R={} bit/s/Hz, {}",
                    scenario.k_interferers, scenario.rate_bits, scenario.noise
                ),
            )
        }
    };
    let run = run_protocol(hops, (b1, b2), &mut stream)?;
    let trace = render(&run, b1.len(), &source);
    Ok((run, trace))
}

fn hop(clean: bool) -> &'static str {
    if clean {
        "clean    "
    } else {
        "corrupted"
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn rx_line(out: &mut String, who: &str, word: &ReceivedWord, clean: bool, note: &str) {
    let _ = writeln!(
        out,
        "          {who}  {} rx {}{note}",
        hop(clean),
        hex::encode(&word.bytes)
    );
}

fn decode_line(out: &mut String, who: &str, msg: &str, d: &DecodeResult) {
    let [p1, p2, p3] = d.passed;
    let outcome = match (&d.recovered, d.branch) {
        (Some(payload), Some(b)) => {
            format!("recovered {msg} = {} via branch {b}", hex::encode(payload))
        }
        _ => "no recovery".to_string(),
    };
    let _ = writeln!(
        out,
        "{who} branches: 1 {}, 2 {}, 3 {} -> {outcome}",
        pass(p1),
        pass(p2),
        pass(p3)
    );
}

fn render(run: &ProtocolRun, payload_len: usize, source: &str) -> String {
    let h = &run.hops;
    let mut out = String::new();
    let _ = writeln!(out, "payload length {payload_len} bytes; channel: {source}");

    let _ = writeln!(
        out,
        "slot n    BS sends F1 = b1 | CRC_1 = {}",
        hex::encode(&run.frame1)
    );
    let crc = format!("  CRC_1 {}", pass(run.relay_checks[0]));
    rx_line(&mut out, "RS", &run.relay_rx[0], h.relay[0], &crc);
    rx_line(&mut out, "U1", &run.user1_rx[0], h.user1[0], "");
    rx_line(&mut out, "U2", &run.user2_rx[0], h.user2[0], "");

    let _ = writeln!(
        out,
        "slot n+1  BS sends F2 = b2 | CRC_2 = {}",
        hex::encode(&run.frame2)
    );
    let crc = format!("  CRC_2 {}", pass(run.relay_checks[1]));
    rx_line(&mut out, "RS", &run.relay_rx[1], h.relay[1], &crc);
    rx_line(&mut out, "U1", &run.user1_rx[1], h.user1[1], "");
    rx_line(&mut out, "U2", &run.user2_rx[1], h.user2[1], "");

    let state = run.action.kind.relay_state();
    let _ = writeln!(
        out,
        "relay     action {} (relay state {})",
        run.action.kind,
        state.theta()
    );
    let _ = writeln!(out, "slot n+2  RS sends {}", hex::encode(&run.relay_word));
    rx_line(&mut out, "U1", &run.user1_rx[2], h.user1[2], "");
    rx_line(&mut out, "U2", &run.user2_rx[2], h.user2[2], "");

    decode_line(&mut out, "U1", "b1", &run.user1);
    decode_line(&mut out, "U2", "b2", &run.user2);
    out
}
