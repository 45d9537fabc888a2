//! Interlock transfer of a symmetric session key.
//!
//! The initiator splits a fresh 128-bit key into two 64-bit halves, wraps each
//! under the responder's RSA public key and releases the second half only
//! after the responder has acknowledged the first. Together with the second
//! half it sends a probe sealed under the full key; the responder proves it
//! reassembled the key by returning the probe, reversed and resealed.
//!
//! A relay that holds back or rewrites either half ends up with a key that
//! fails the probe's authentication tag.

use num_bigint::BigUint;
use rand::Rng;

use super::rsa::{rsa_encrypt, RsaKeyPair, RsaPublicKey};
use super::symmetric::{symmetric_decrypt, symmetric_encrypt, SessionKey};
use crate::error::CryptoError;
use crate::mac::Leg;
use crate::types::NodeId;

pub type KeyHalf = [u8; 8];

pub fn split_key(key: &SessionKey) -> (KeyHalf, KeyHalf) {
    let mut a = [0u8; 8];
    let mut b = [0u8; 8];
    a.copy_from_slice(&key[..8]);
    b.copy_from_slice(&key[8..]);
    (a, b)
}

pub fn join_key(half_a: &[u8], half_b: &[u8]) -> Result<SessionKey, CryptoError> {
    if half_a.len() != half_b.len() || half_a.len() != 8 {
        return Err(CryptoError::HalfLengthMismatch(half_a.len(), half_b.len()));
    }
    let mut k = [0u8; 16];
    k[..8].copy_from_slice(half_a);
    k[8..].copy_from_slice(half_b);
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    /// A message never arrived.
    Timeout,
    /// The reassembled key did not authenticate the probe.
    ProbeRejected,
    /// The confirmation did not match the probe.
    BadConfirmation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterlockState {
    Idle,
    SentFirstHalf,
    AwaitingResponse,
    Complete,
    Failed(FailReason),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterlockMsg {
    FirstHalf(BigUint),
    Ack,
    SecondHalf { wrapped: BigUint, probe: Vec<u8> },
    Confirm(Vec<u8>),
}

impl InterlockMsg {
    /// Encoded length given the RSA modulus size.
    pub fn wire_bytes(&self, modulus_bytes: usize, control_bytes: usize) -> usize {
        match self {
            InterlockMsg::FirstHalf(_) => modulus_bytes,
            InterlockMsg::Ack => control_bytes,
            InterlockMsg::SecondHalf { probe, .. } => modulus_bytes + probe.len(),
            InterlockMsg::Confirm(sealed) => sealed.len(),
        }
    }
}

/// Carries messages between the two parties. `Leg::Forward` is initiator to
/// responder. Returning `None` models a lost message.
pub trait Channel {
    fn carry(&mut self, leg: Leg, msg: InterlockMsg) -> Option<InterlockMsg>;
}

/// Passes everything through unchanged.
pub struct DirectChannel;

impl Channel for DirectChannel {
    fn carry(&mut self, _leg: Leg, msg: InterlockMsg) -> Option<InterlockMsg> {
        Some(msg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterlockSession {
    pub initiator: NodeId,
    pub responder: NodeId,
    pub session_key: SessionKey,
    pub half_a: KeyHalf,
    pub half_b: KeyHalf,
    pub state: InterlockState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterlockOutcome {
    pub session: InterlockSession,
    /// Key the responder ended up with, when it got both halves.
    pub responder_key: Option<SessionKey>,
    /// Messages that actually crossed the channel, in order.
    pub sent: Vec<(Leg, InterlockMsg)>,
    /// Node the initiator no longer trusts after a failed probe.
    pub suspect: Option<NodeId>,
}

impl InterlockOutcome {
    pub fn is_complete(&self) -> bool {
        self.session.state == InterlockState::Complete
    }
}

const PROBE_PREFIX: &[u8] = b"interlock-probe:";

fn wrap_half(half: &KeyHalf, key: &RsaPublicKey) -> Result<BigUint, CryptoError> {
    rsa_encrypt(&BigUint::from_bytes_be(half), key)
}

fn unwrap_half(wrapped: &BigUint, key: &RsaKeyPair) -> Option<KeyHalf> {
    let plain = key.decrypt_crt(wrapped).ok()?;
    let bytes = plain.to_bytes_be();
    if bytes.len() > 8 {
        return None;
    }
    let mut half = [0u8; 8];
    half[8 - bytes.len()..].copy_from_slice(&bytes);
    Some(half)
}

/// Runs both sides of the exchange over `channel`.
///
/// Fails with [`CryptoError::MessageTooLarge`] when the responder's modulus
/// cannot hold a 64-bit half.
pub fn interlock_exchange<R: Rng + ?Sized>(
    initiator: NodeId,
    responder: NodeId,
    responder_keys: &RsaKeyPair,
    channel: &mut dyn Channel,
    rng: &mut R,
) -> Result<InterlockOutcome, CryptoError> {
    let public = responder_keys.public();
    if public.modulus.bits() <= 64 {
        return Err(CryptoError::MessageTooLarge);
    }
    let session_key: SessionKey = rng.gen();
    let (half_a, half_b) = split_key(&session_key);
    let mut out = InterlockOutcome {
        session: InterlockSession { initiator, responder, session_key, half_a, half_b, state: InterlockState::Idle },
        responder_key: None,
        sent: Vec::new(),
        suspect: None,
    };

    // Initiator: first half.
    let first = InterlockMsg::FirstHalf(wrap_half(&half_a, &public)?);
    out.sent.push((Leg::Forward, first.clone()));
    out.session.state = InterlockState::SentFirstHalf;
    let received_a = match channel.carry(Leg::Forward, first) {
        Some(InterlockMsg::FirstHalf(w)) => unwrap_half(&w, responder_keys),
        Some(_) => None,
        None => {
            out.session.state = InterlockState::Failed(FailReason::Timeout);
            return Ok(out);
        }
    };

    // Responder: acknowledge.
    out.sent.push((Leg::Backward, InterlockMsg::Ack));
    if channel.carry(Leg::Backward, InterlockMsg::Ack) != Some(InterlockMsg::Ack) {
        out.session.state = InterlockState::Failed(FailReason::Timeout);
        return Ok(out);
    }
    out.session.state = InterlockState::AwaitingResponse;

    // Initiator: second half plus probe.
    let mut probe_plain = PROBE_PREFIX.to_vec();
    probe_plain.extend_from_slice(&rng.gen::<[u8; 8]>());
    let probe = symmetric_encrypt(&session_key, &probe_plain, rng);
    let second = InterlockMsg::SecondHalf { wrapped: wrap_half(&half_b, &public)?, probe };
    out.sent.push((Leg::Forward, second.clone()));
    let (wrapped_b, probe) = match channel.carry(Leg::Forward, second) {
        Some(InterlockMsg::SecondHalf { wrapped, probe }) => (wrapped, probe),
        Some(_) | None => {
            out.session.state = InterlockState::Failed(FailReason::Timeout);
            return Ok(out);
        }
    };

    // Responder: reassemble and open the probe.
    let joined = match (received_a, unwrap_half(&wrapped_b, responder_keys)) {
        (Some(a), Some(b)) => join_key(&a, &b).ok(),
        _ => None,
    };
    let opened = joined.and_then(|k| symmetric_decrypt(&k, &probe).ok().map(|p| (k, p)));
    let Some((k, plain)) = opened else {
        out.session.state = InterlockState::Failed(FailReason::ProbeRejected);
        out.suspect = Some(responder);
        return Ok(out);
    };
    out.responder_key = Some(k);
    let mut echo = plain;
    echo.reverse();
    let confirm = InterlockMsg::Confirm(symmetric_encrypt(&k, &echo, rng));
    out.sent.push((Leg::Backward, confirm.clone()));
    let confirmed = match channel.carry(Leg::Backward, confirm) {
        Some(InterlockMsg::Confirm(sealed)) => symmetric_decrypt(&session_key, &sealed).ok(),
        Some(_) => None,
        None => {
            out.session.state = InterlockState::Failed(FailReason::Timeout);
            return Ok(out);
        }
    };
    let mut expected = probe_plain;
    expected.reverse();
    out.session.state = if confirmed.as_deref() == Some(expected.as_slice()) {
        InterlockState::Complete
    } else {
        out.suspect = Some(responder);
        InterlockState::Failed(FailReason::BadConfirmation)
    };
    Ok(out)
}
