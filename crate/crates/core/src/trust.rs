//! Per-device activity logs and windowed trust assessment.
//!
//! Positive actions count only while their age is within `W_p = |curr - Pos|`;
//! negative actions stay relevant for the wider `W_n = |curr - Neg|`. The
//! qualified counts feed the fuzzy engine.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fuzzy::{FuzzyConfig, FuzzyError};

/// Integer seconds since the Unix epoch.
pub type Timestamp = u64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrustError {
    #[error("negative window {w_n} is narrower than positive window {w_p}")]
    InvalidWindow { w_p: u64, w_n: u64 },
    #[error(
        "record for {} appended to the log of {}",
        String::from_utf8_lossy(got),
        String::from_utf8_lossy(expected)
    )]
    WrongDevice { expected: Vec<u8>, got: Vec<u8> },
    #[error("unknown action kind {0:?}, expected PA or NA")]
    UnknownKind(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Positive,
    Negative,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Positive => "PA",
            ActionKind::Negative => "NA",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionKind {
    type Err = TrustError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PA" => Ok(ActionKind::Positive),
            "NA" => Ok(ActionKind::Negative),
            other => Err(TrustError::UnknownKind(other.to_string())),
        }
    }
}

/// One row of a device's activity table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityRecord {
    pub action_time: Timestamp,
    pub kind: ActionKind,
    pub sid: Vec<u8>,
    pub uid: Vec<u8>,
}

impl ActivityRecord {
    pub fn new(uid: &[u8], sid: &[u8], kind: ActionKind, action_time: Timestamp) -> Self {
        ActivityRecord {
            action_time,
            kind,
            sid: sid.to_vec(),
            uid: uid.to_vec(),
        }
    }
}

/// Append-only, insertion-ordered activity of a single device.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityLog {
    uid: Vec<u8>,
    records: Vec<ActivityRecord>,
}

impl ActivityLog {
    pub fn new(uid: &[u8]) -> Self {
        ActivityLog {
            uid: uid.to_vec(),
            records: Vec::new(),
        }
    }

    pub fn uid(&self) -> &[u8] {
        &self.uid
    }

    pub fn records(&self) -> &[ActivityRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record_action(&mut self, record: ActivityRecord) -> Result<(), TrustError> {
        if record.uid != self.uid {
            return Err(TrustError::WrongDevice {
                expected: self.uid.clone(),
                got: record.uid,
            });
        }
        self.records.push(record);
        Ok(())
    }
}

pub fn record_action(
    mut log: ActivityLog,
    record: ActivityRecord,
) -> Result<ActivityLog, TrustError> {
    log.record_action(record)?;
    Ok(log)
}

/// The `Pos` and `Neg` boundaries of the assessment time frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    pub pos_boundary: Timestamp,
    pub neg_boundary: Timestamp,
}

/// `(W_p, W_n)`; the negative window may not be the narrower one.
pub fn window_bounds(curr: Timestamp, config: &WindowConfig) -> Result<(u64, u64), TrustError> {
    let w_p = curr.abs_diff(config.pos_boundary);
    let w_n = curr.abs_diff(config.neg_boundary);
    if w_n < w_p {
        return Err(TrustError::InvalidWindow { w_p, w_n });
    }
    Ok((w_p, w_n))
}

/// Counts actions whose age lies in `[0, width]` for their kind.
/// Future-dated records never qualify.
pub fn qualify_with_widths(
    records: &[ActivityRecord],
    curr: Timestamp,
    w_p: u64,
    w_n: u64,
) -> (usize, usize) {
    records
        .iter()
        .filter(|r| r.action_time <= curr)
        .fold((0, 0), |(p, n), r| {
            let age = curr - r.action_time;
            match r.kind {
                ActionKind::Positive if age <= w_p => (p + 1, n),
                ActionKind::Negative if age <= w_n => (p, n + 1),
                _ => (p, n),
            }
        })
}

pub fn qualify_actions(
    log: &ActivityLog,
    curr: Timestamp,
    config: &WindowConfig,
) -> Result<(usize, usize), TrustError> {
    let (w_p, w_n) = window_bounds(curr, config)?;
    Ok(qualify_with_widths(log.records(), curr, w_p, w_n))
}

/// Positive when positive actions dominate, negative otherwise.
pub fn net_activity(qualified_pos: usize, qualified_neg: usize) -> i64 {
    qualified_pos as i64 - qualified_neg as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustReport {
    pub uid: Vec<u8>,
    pub qualified_pos: usize,
    pub qualified_neg: usize,
    pub net_activity: i64,
    pub trust_degree: f64,
}

impl TrustReport {
    pub const CSV_HEADER: &'static str =
        "uid,qualified_pos,qualified_neg,net_activity,trust_degree";

    pub fn from_counts(
        uid: &[u8],
        qualified_pos: usize,
        qualified_neg: usize,
        fuzzy: &FuzzyConfig,
    ) -> Result<Self, TrustError> {
        Ok(TrustReport {
            uid: uid.to_vec(),
            qualified_pos,
            qualified_neg,
            net_activity: net_activity(qualified_pos, qualified_neg),
            trust_degree: fuzzy.trust_score(qualified_pos as f64, qualified_neg as f64)?,
        })
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6}",
            String::from_utf8_lossy(&self.uid),
            self.qualified_pos,
            self.qualified_neg,
            self.net_activity,
            self.trust_degree
        )
    }
}

pub fn assess_trust(
    log: &ActivityLog,
    curr: Timestamp,
    config: &WindowConfig,
    fuzzy: &FuzzyConfig,
) -> Result<TrustReport, TrustError> {
    let (pos, neg) = qualify_actions(log, curr, config)?;
    TrustReport::from_counts(log.uid(), pos, neg, fuzzy)
}

/// Maps a trust degree to an access tier. Tiers carry no built-in meaning;
/// the degree falls into the tier with the greatest threshold not above it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AccessPolicy {
    thresholds: Vec<(f64, String)>,
}

impl AccessPolicy {
    pub fn new(mut thresholds: Vec<(f64, String)>) -> Self {
        thresholds.sort_by(|a, b| a.0.total_cmp(&b.0));
        AccessPolicy { thresholds }
    }

    pub fn tier_for(&self, trust_degree: f64) -> Option<&str> {
        self.thresholds
            .iter()
            .rev()
            .find(|(min, _)| trust_degree >= *min)
            .map(|(_, tier)| tier.as_str())
    }
}
