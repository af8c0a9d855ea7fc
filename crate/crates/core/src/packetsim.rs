//! Bit-exact model of the three-slot opportunistic network coding protocol.
//!
//! Slot `n` carries `F₁ = b₁ ∥ CRC₁(b₁)` from the BS, slot `n+1` carries
//! `F₂ = b₂ ∥ CRC₂(b₂)`. In slot `n+2` the relay sends `F₁ ⊕ F₂`, `F₁`, `F₂`
//! or an all-zero null word depending on which CRCs it verified. Receivers
//! never learn the relay's choice: they identify the slot-`n+2` content
//! purely by which CRC it satisfies.
//!
//! Wire format: payload bytes, then the 32-bit check most significant byte
//! first. `CRC₁` is CRC-32/ISO-HDLC (the zlib/Ethernet CRC), `CRC₂` is
//! CRC-32/ISCSI (Castagnoli).

use std::fmt;

use crc::{Crc, CRC_32_ISCSI, CRC_32_ISO_HDLC};

use crate::capacity::{classify_relay_state, mutual_information, RateParams, RelayState};
use crate::error::{Error, Result};
use crate::fading::{Slot, TrialDraw, TrialStream};

pub const CHECK_LEN: usize = 4;

const CRC_1: Crc<u32> = Crc::<u32>::new(&CRC_32_ISO_HDLC);
const CRC_2: Crc<u32> = Crc::<u32>::new(&CRC_32_ISCSI);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrcCode {
    /// Protects b₁.
    Crc1,
    /// Protects b₂.
    Crc2,
}

impl CrcCode {
    pub fn checksum(self, bytes: &[u8]) -> u32 {
        match self {
            CrcCode::Crc1 => CRC_1.checksum(bytes),
            CrcCode::Crc2 => CRC_2.checksum(bytes),
        }
    }

    pub fn other(self) -> Self {
        match self {
            CrcCode::Crc1 => CrcCode::Crc2,
            CrcCode::Crc2 => CrcCode::Crc1,
        }
    }
}

impl fmt::Display for CrcCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrcCode::Crc1 => f.write_str("CRC_1"),
            CrcCode::Crc2 => f.write_str("CRC_2"),
        }
    }
}

/// Fixed payload length `L` shared by both messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameFormat {
    pub payload_len: usize,
}

impl FrameFormat {
    pub fn new(payload_len: usize) -> Self {
        Self { payload_len }
    }

    pub fn word_len(&self) -> usize {
        self.payload_len + CHECK_LEN
    }

    pub fn encode(&self, payload: &[u8], code: CrcCode) -> Result<Frame> {
        if payload.len() != self.payload_len {
            return Err(Error::Framing(format!(
                "payload is {} bytes, frame format expects {}",
                payload.len(),
                self.payload_len
            )));
        }
        Ok(crc_encode(payload, code))
    }

    /// All-zero word sent by the relay when it decoded nothing.
    pub fn null_word(&self) -> Vec<u8> {
        vec![0; self.word_len()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub payload: Vec<u8>,
    pub check: u32,
    pub code: CrcCode,
}

impl Frame {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.payload.len() + CHECK_LEN);
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(&self.check.to_be_bytes());
        out
    }
}

pub fn crc_encode(payload: &[u8], code: CrcCode) -> Frame {
    Frame {
        payload: payload.to_vec(),
        check: code.checksum(payload),
        code,
    }
}

/// Whether `word` (payload ∥ check) satisfies `code`.
pub fn verify(word: &[u8], code: CrcCode) -> bool {
    split(word).is_some_and(|(payload, check)| code.checksum(payload) == check)
}

fn split(word: &[u8]) -> Option<(&[u8], u32)> {
    let cut = word.len().checked_sub(CHECK_LEN)?;
    let (payload, check) = word.split_at(cut);
    Some((payload, u32::from_be_bytes(check.try_into().ok()?)))
}

pub fn xor_words(a: &[u8], b: &[u8]) -> Result<Vec<u8>> {
    if a.len() != b.len() {
        return Err(Error::Framing(format!(
            "cannot XOR words of {} and {} bytes",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedWord {
    pub bytes: Vec<u8>,
    pub slot: Slot,
}

impl ReceivedWord {
    pub fn new(bytes: Vec<u8>, slot: Slot) -> Self {
        Self { bytes, slot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelayActionKind {
    XorBoth,
    Forward1,
    Forward2,
    Null,
}

impl RelayActionKind {
    /// The relay state this action realizes.
    pub fn relay_state(self) -> RelayState {
        match self {
            RelayActionKind::XorBoth => RelayState::Both,
            RelayActionKind::Forward1 => RelayState::FirstOnly,
            RelayActionKind::Forward2 => RelayState::SecondOnly,
            RelayActionKind::Null => RelayState::Neither,
        }
    }
}

impl fmt::Display for RelayActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelayActionKind::XorBoth => "XorBoth",
            RelayActionKind::Forward1 => "Forward1",
            RelayActionKind::Forward2 => "Forward2",
            RelayActionKind::Null => "Null",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayAction {
    pub kind: RelayActionKind,
    /// Word to transmit; `None` for the null action.
    pub word: Option<Vec<u8>>,
}

impl RelayAction {
    /// Bytes put on the air in slot `n+2`.
    pub fn transmitted(&self, format: &FrameFormat) -> Vec<u8> {
        self.word.clone().unwrap_or_else(|| format.null_word())
    }
}

/// Relay decision from the words it heard in slots `n` and `n+1`.
pub fn relay_decide(rx1: &ReceivedWord, rx2: &ReceivedWord) -> Result<RelayAction> {
    if rx1.bytes.len() != rx2.bytes.len() {
        return Err(Error::Framing(format!(
            "relay words differ in length: {} vs {}",
            rx1.bytes.len(),
            rx2.bytes.len()
        )));
    }
    let ok1 = verify(&rx1.bytes, CrcCode::Crc1);
    let ok2 = verify(&rx2.bytes, CrcCode::Crc2);
    Ok(match (ok1, ok2) {
        (true, true) => RelayAction {
            kind: RelayActionKind::XorBoth,
            word: Some(xor_words(&rx1.bytes, &rx2.bytes)?),
        },
        (true, false) => RelayAction {
            kind: RelayActionKind::Forward1,
            word: Some(rx1.bytes.clone()),
        },
        (false, true) => RelayAction {
            kind: RelayActionKind::Forward2,
            word: Some(rx2.bytes.clone()),
        },
        (false, false) => RelayAction {
            kind: RelayActionKind::Null,
            word: None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub recovered: Option<Vec<u8>>,
    /// Selected branch (1, 2 or 3), lowest passing one.
    pub branch: Option<u8>,
    /// CRC outcome of branches 1..=3.
    pub passed: [bool; 3],
}

impl DecodeResult {
    pub fn success(&self) -> bool {
        self.recovered.is_some()
    }
}

/// Three-branch decoder for the message protected by `target`.
///
/// `direct` is the slot carrying that message from the BS, `overheard` the
/// slot carrying the other message, `relayed` the relay's slot-`n+2` word.
/// Branch 1 checks `direct`; branch 2 XORs `relayed` with `overheard` when
/// the latter passes the other code; branch 3 checks `relayed` itself.
pub fn user_decode(
    target: CrcCode,
    direct: Option<&ReceivedWord>,
    overheard: Option<&ReceivedWord>,
    relayed: Option<&ReceivedWord>,
) -> DecodeResult {
    let branch1 = direct
        .filter(|w| verify(&w.bytes, target))
        .map(|w| w.bytes.clone());
    let branch2 = match (overheard, relayed) {
        (Some(o), Some(r)) if verify(&o.bytes, target.other()) => xor_words(&r.bytes, &o.bytes)
            .ok()
            .filter(|w| verify(w, target)),
        _ => None,
    };
    let branch3 = relayed
        .filter(|w| verify(&w.bytes, target))
        .map(|w| w.bytes.clone());

    let passed = [branch1.is_some(), branch2.is_some(), branch3.is_some()];
    let (branch, word) = match (branch1, branch2, branch3) {
        (Some(w), _, _) => (Some(1), Some(w)),
        (None, Some(w), _) => (Some(2), Some(w)),
        (None, None, Some(w)) => (Some(3), Some(w)),
        _ => (None, None),
    };
    DecodeResult {
        recovered: word.map(|mut w| {
            w.truncate(w.len() - CHECK_LEN);
            w
        }),
        branch,
        passed,
    }
}

/// U1 decoding b₁: direct slot `n`, overheard slot `n+1`.
pub fn user1_decode(
    rx_n: Option<&ReceivedWord>,
    rx_n1: Option<&ReceivedWord>,
    rx_n2: Option<&ReceivedWord>,
) -> DecodeResult {
    user_decode(CrcCode::Crc1, rx_n, rx_n1, rx_n2)
}

/// U2 decoding b₂: direct slot `n+1`, overheard slot `n`.
pub fn user2_decode(
    rx_n: Option<&ReceivedWord>,
    rx_n1: Option<&ReceivedWord>,
    rx_n2: Option<&ReceivedWord>,
) -> DecodeResult {
    user_decode(CrcCode::Crc2, rx_n1, rx_n, rx_n2)
}

/// Which hops deliver their word intact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopOutcomes {
    /// BS→RS in slots `n`, `n+1`.
    pub relay: [bool; 2],
    /// BS→U1 in `n`, `n+1`, RS→U1 in `n+2`.
    pub user1: [bool; 3],
    /// BS→U2 in `n`, `n+1`, RS→U2 in `n+2`.
    pub user2: [bool; 3],
}

impl HopOutcomes {
    pub const ALL_CLEAN: HopOutcomes = HopOutcomes {
        relay: [true; 2],
        user1: [true; 3],
        user2: [true; 3],
    };

    /// A hop is clean iff its mutual information exceeds the target rate.
    pub fn from_trial(trial: &TrialDraw, params: &RateParams) -> Self {
        let ok = |s| mutual_information(s, params).supports(params.rate());
        Self {
            relay: [ok(&trial.rs_slots[0]), ok(&trial.rs_slots[1])],
            user1: [
                ok(&trial.u1_slots[0]),
                ok(&trial.u1_slots[1]),
                ok(&trial.u1_slots[2]),
            ],
            user2: [
                ok(&trial.u2_slots[0]),
                ok(&trial.u2_slots[1]),
                ok(&trial.u2_slots[2]),
            ],
        }
    }
}

/// Deliver `word`, or a copy with a uniformly random nonzero set of bits
/// flipped when the hop fails. Error patterns for each hop come from a
/// dedicated auxiliary block of `stream`.
fn channel(word: &[u8], clean: bool, hop: u64, stream: &mut TrialStream) -> Vec<u8> {
    if clean {
        return word.to_vec();
    }
    stream.seek_aux(hop);
    let mut pattern = vec![0u8; word.len()];
    loop {
        stream.fill_bytes(&mut pattern);
        if pattern.iter().any(|&b| b != 0) {
            break;
        }
    }
    word.iter().zip(&pattern).map(|(w, p)| w ^ p).collect()
}

/// Everything that happened during one pass of the protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolRun {
    pub hops: HopOutcomes,
    pub frame1: Vec<u8>,
    pub frame2: Vec<u8>,
    pub relay_rx: [ReceivedWord; 2],
    pub relay_checks: [bool; 2],
    pub action: RelayAction,
    pub relay_word: Vec<u8>,
    pub user1_rx: [ReceivedWord; 3],
    pub user2_rx: [ReceivedWord; 3],
    pub user1: DecodeResult,
    pub user2: DecodeResult,
}

/// Run the protocol over hops whose success is given explicitly.
pub fn run_protocol(
    hops: HopOutcomes,
    payloads: (&[u8], &[u8]),
    stream: &mut TrialStream,
) -> Result<ProtocolRun> {
    let (b1, b2) = payloads;
    if b1.is_empty() {
        // An empty payload's CRC is zero for both codes, so the null word
        // would verify.
        return Err(Error::Framing("payloads must be nonempty".into()));
    }
    if b1.len() != b2.len() {
        return Err(Error::Framing(format!(
            "payloads must have equal length, got {} and {}",
            b1.len(),
            b2.len()
        )));
    }
    let format = FrameFormat::new(b1.len());
    let frame1 = format.encode(b1, CrcCode::Crc1)?.to_bytes();
    let frame2 = format.encode(b2, CrcCode::Crc2)?.to_bytes();

    let relay_rx = [
        ReceivedWord::new(channel(&frame1, hops.relay[0], 0, stream), Slot::N),
        ReceivedWord::new(channel(&frame2, hops.relay[1], 1, stream), Slot::N1),
    ];
    let relay_checks = [
        verify(&relay_rx[0].bytes, CrcCode::Crc1),
        verify(&relay_rx[1].bytes, CrcCode::Crc2),
    ];
    let action = relay_decide(&relay_rx[0], &relay_rx[1])?;
    let relay_word = action.transmitted(&format);

    let user1_rx = [
        ReceivedWord::new(channel(&frame1, hops.user1[0], 2, stream), Slot::N),
        ReceivedWord::new(channel(&frame2, hops.user1[1], 3, stream), Slot::N1),
        ReceivedWord::new(channel(&relay_word, hops.user1[2], 4, stream), Slot::N2),
    ];
    let user2_rx = [
        ReceivedWord::new(channel(&frame1, hops.user2[0], 5, stream), Slot::N),
        ReceivedWord::new(channel(&frame2, hops.user2[1], 6, stream), Slot::N1),
        ReceivedWord::new(channel(&relay_word, hops.user2[2], 7, stream), Slot::N2),
    ];
    let user1 = user1_decode(Some(&user1_rx[0]), Some(&user1_rx[1]), Some(&user1_rx[2]));
    let user2 = user2_decode(Some(&user2_rx[0]), Some(&user2_rx[1]), Some(&user2_rx[2]));

    Ok(ProtocolRun {
        hops,
        frame1,
        frame2,
        relay_rx,
        relay_checks,
        action,
        relay_word,
        user1_rx,
        user2_rx,
        user1,
        user2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketTrialOutcome {
    /// Relay state from the mutual-information predicates.
    pub theta: RelayState,
    pub run: ProtocolRun,
}

/// Couple a channel draw to the protocol: each hop is clean iff its
/// mutual information exceeds the rate, then the relay and users run
/// bit-exactly on the resulting words.
pub fn run_packet_trial(
    trial: &TrialDraw,
    params: &RateParams,
    payloads: (&[u8], &[u8]),
    stream: &mut TrialStream,
) -> Result<PacketTrialOutcome> {
    let i_n = mutual_information(&trial.rs_slots[0], params);
    let i_n1 = mutual_information(&trial.rs_slots[1], params);
    let theta = classify_relay_state(i_n, i_n1, params.rate());
    let run = run_protocol(HopOutcomes::from_trial(trial, params), payloads, stream)?;
    Ok(PacketTrialOutcome { theta, run })
}
