use std::fmt;
use std::str::FromStr;

use crate::primitives::{decode_fields, encode_fields, HashDigest};
use crate::trust::{ActionKind, ActivityRecord};

use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActorId(String);

impl ActorId {
    pub fn new(id: impl Into<String>) -> Self {
        ActorId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Registration,
    ActivityReport,
    Response,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Registration => "registration",
            MessageKind::ActivityReport => "activity-report",
            MessageKind::Response => "response",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MessageKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "registration" => Ok(MessageKind::Registration),
            "activity-report" => Ok(MessageKind::ActivityReport),
            "response" => Ok(MessageKind::Response),
            other => Err(SimError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub seq: u64,
    pub sender: ActorId,
    pub receiver: ActorId,
    pub kind: MessageKind,
    pub payload: Vec<u8>,
    pub ts: u64,
}

impl WireMessage {
    /// `seq,sender,receiver,kind,ts,hex(payload)`
    pub fn export_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.seq,
            self.sender,
            self.receiver,
            self.kind,
            self.ts,
            hex::encode(&self.payload)
        )
    }
}

/// Every message delivered on the bus during a run, in delivery order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    messages: Vec<WireMessage>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a message, assigning the next sequence number.
    pub fn push(
        &mut self,
        sender: ActorId,
        receiver: ActorId,
        kind: MessageKind,
        payload: Vec<u8>,
        ts: u64,
    ) -> u64 {
        let seq = self.messages.last().map_or(0, |m| m.seq + 1);
        self.messages.push(WireMessage {
            seq,
            sender,
            receiver,
            kind,
            payload,
            ts,
        });
        seq
    }

    pub fn messages(&self) -> &[WireMessage] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn export(&self) -> String {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&m.export_line());
            out.push('\n');
        }
        out
    }
}

pub(crate) const STATUS_OK: u8 = 0;
pub(crate) const STATUS_DUPLICATE: u8 = 1;
pub(crate) const STATUS_MALFORMED: u8 = 2;

pub(crate) fn registration_response(status: u8, d_i: Option<&HashDigest>) -> Vec<u8> {
    let mut out = vec![status];
    if let Some(d) = d_i {
        out.extend_from_slice(d.as_ref());
    }
    out
}

/// `Some(D_i)` for an accepting response.
pub(crate) fn parse_registration_response(payload: &[u8]) -> Option<HashDigest> {
    match payload.split_first() {
        Some((&STATUS_OK, rest)) => HashDigest::from_slice(rest).ok(),
        _ => None,
    }
}

fn kind_byte(kind: ActionKind) -> u8 {
    match kind {
        ActionKind::Positive => b'P',
        ActionKind::Negative => b'N',
    }
}

pub(crate) fn encode_activity(records: &[ActivityRecord]) -> Vec<u8> {
    let rows: Vec<Vec<u8>> = records
        .iter()
        .map(|r| {
            encode_fields(&[
                &r.uid,
                &r.sid,
                &[kind_byte(r.kind)],
                &r.action_time.to_be_bytes(),
            ])
            .expect("activity fields are small")
        })
        .collect();
    let refs: Vec<&[u8]> = rows.iter().map(Vec::as_slice).collect();
    encode_fields(&refs).expect("activity batch is small")
}

pub(crate) fn decode_activity(payload: &[u8]) -> Option<Vec<ActivityRecord>> {
    decode_fields(payload)
        .ok()?
        .into_iter()
        .map(|row| {
            let fields = decode_fields(row).ok()?;
            let [uid, sid, kind, time] = fields.as_slice() else {
                return None;
            };
            let kind = match kind {
                [b'P'] => ActionKind::Positive,
                [b'N'] => ActionKind::Negative,
                _ => return None,
            };
            Some(ActivityRecord {
                uid: uid.to_vec(),
                sid: sid.to_vec(),
                kind,
                action_time: u64::from_be_bytes((*time).try_into().ok()?),
            })
        })
        .collect()
}

/// Count of appended records followed by the batch indices that were rejected.
pub(crate) fn encode_ack(appended: usize, rejected: &[usize]) -> Vec<u8> {
    let mut out = vec![STATUS_OK];
    out.extend_from_slice(&(appended as u32).to_be_bytes());
    for &i in rejected {
        out.extend_from_slice(&(i as u32).to_be_bytes());
    }
    out
}

pub(crate) fn decode_ack(payload: &[u8]) -> Option<(usize, Vec<usize>)> {
    let (&STATUS_OK, rest) = payload.split_first()? else {
        return None;
    };
    if rest.len() < 4 || rest.len() % 4 != 0 {
        return None;
    }
    let mut words = rest
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes(c.try_into().unwrap()) as usize);
    let appended = words.next()?;
    Some((appended, words.collect()))
}
