use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MessageKind, SimError, WireMessage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdversaryKind {
    None,
    /// Records every message; never alters delivery.
    Eavesdrop,
    /// Delivers each targeted message, then delivers a verbatim copy.
    Replay,
    /// Flips one octet of each targeted message in flight.
    Tamper,
}

impl AdversaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryKind::None => "none",
            AdversaryKind::Eavesdrop => "eavesdrop",
            AdversaryKind::Replay => "replay",
            AdversaryKind::Tamper => "tamper",
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(AdversaryKind::None),
            "eavesdrop" => Ok(AdversaryKind::Eavesdrop),
            "replay" => Ok(AdversaryKind::Replay),
            "tamper" => Ok(AdversaryKind::Tamper),
            other => Err(SimError::UnknownAdversary(other.to_string())),
        }
    }
}

/// One adversary behaviour per scenario run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryMode {
    pub mode: AdversaryKind,
    pub target_kind: MessageKind,
    pub seed: u64,
}

impl AdversaryMode {
    pub fn new(mode: AdversaryKind) -> Self {
        AdversaryMode {
            mode,
            target_kind: MessageKind::Registration,
            seed: 0,
        }
    }

    pub fn none() -> Self {
        Self::new(AdversaryKind::None)
    }

    pub fn with_target(mut self, kind: MessageKind) -> Self {
        self.target_kind = kind;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for AdversaryMode {
    fn default() -> Self {
        Self::none()
    }
}

/// What the adversary does to one message in flight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Interception {
    Deliver(Vec<u8>),
    DeliverThenReplay(Vec<u8>),
    Tampered(Vec<u8>),
}

#[derive(Debug)]
pub(crate) struct Adversary {
    mode: AdversaryMode,
    rng: ChaCha8Rng,
    observed: Vec<WireMessage>,
}

impl Adversary {
    pub(crate) fn new(mode: AdversaryMode) -> Self {
        Adversary {
            mode,
            rng: ChaCha8Rng::seed_from_u64(mode.seed),
            observed: Vec::new(),
        }
    }

    pub(crate) fn mode(&self) -> AdversaryMode {
        self.mode
    }

    /// Messages seen on the bus (eavesdrop mode only).
    pub(crate) fn observed(&self) -> &[WireMessage] {
        &self.observed
    }

    pub(crate) fn observe(&mut self, msg: &WireMessage) {
        if self.mode.mode == AdversaryKind::Eavesdrop {
            self.observed.push(msg.clone());
        }
    }

    /// `flippable` lists the octet offsets worth corrupting; the whole payload when `None`.
    pub(crate) fn intercept(
        &mut self,
        kind: MessageKind,
        payload: Vec<u8>,
        flippable: Option<&[usize]>,
    ) -> Interception {
        if kind != self.mode.target_kind {
            return Interception::Deliver(payload);
        }
        match self.mode.mode {
            AdversaryKind::None | AdversaryKind::Eavesdrop => Interception::Deliver(payload),
            AdversaryKind::Replay => Interception::DeliverThenReplay(payload),
            AdversaryKind::Tamper => {
                let mut payload = payload;
                let idx = match flippable {
                    Some([]) => return Interception::Deliver(payload),
                    Some(offsets) => offsets[self.rng.gen_range(0..offsets.len())],
                    None if payload.is_empty() => return Interception::Deliver(payload),
                    None => self.rng.gen_range(0..payload.len()),
                };
                let mask: u8 = self.rng.gen_range(1..=255);
                payload[idx] ^= mask;
                Interception::Tampered(payload)
            }
        }
    }
}
