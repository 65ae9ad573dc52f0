//! Delimited-text persistence for the credential tables, the activity log and
//! the trust center secret.
//!
//! All files are line oriented with comma-separated columns. Digests and
//! nonces are lowercase hex. Free-form byte strings (uid, sid, password) are
//! percent-escaped so that any octet survives a round trip:
//!
//! ```text
//! trust center:  uid,hex(C_i),hex(D_i),hex(b_i)
//! device:        uid,P_i,hex(D_i),hex(b_i)
//! activity:      uid,sid,PA|NA,action_time
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::primitives::{HashDigest, DIGEST_LEN};
use crate::registration::{
    DeviceRecord, DeviceStore, TrustCenterRecord, TrustCenterSecret, TrustCenterStore,
};
use crate::trust::{ActivityLog, ActivityRecord};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}:{line}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{}:{line}: {reason}", path.display())]
    Integrity {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl StoreError {
    fn io(path: &Path, source: io::Error) -> Self {
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Line number for parse and integrity errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            StoreError::Parse { line, .. } | StoreError::Integrity { line, .. } => Some(*line),
            StoreError::Io { .. } => None,
        }
    }
}

/// Reason plus "is this an integrity problem" for a single line.
type LineResult<T> = Result<T, (bool, String)>;

fn parse_err<T>(reason: impl Into<String>) -> LineResult<T> {
    Err((false, reason.into()))
}

fn attach(path: &Path, line: usize, (integrity, reason): (bool, String)) -> StoreError {
    let path = path.to_path_buf();
    if integrity {
        StoreError::Integrity { path, line, reason }
    } else {
        StoreError::Parse { path, line, reason }
    }
}

fn is_plain(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~' | b':' | b'@' | b'+' | b'/')
}

pub fn escape_field(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for &b in bytes {
        if is_plain(b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn unescape_field(s: &str) -> Option<Vec<u8>> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'%' => {
                let hex = s.get(i + 1..i + 3)?;
                out.push(u8::from_str_radix(hex, 16).ok()?);
                i += 3;
            }
            b if is_plain(b) => {
                out.push(b);
                i += 1;
            }
            _ => return None,
        }
    }
    Some(out)
}

fn columns<const N: usize>(line: &str) -> LineResult<[&str; N]> {
    let cols: Vec<&str> = line.split(',').collect();
    cols.try_into()
        .or_else(|cols: Vec<&str>| parse_err(format!("expected {N} columns, got {}", cols.len())))
}

fn field(s: &str, what: &str) -> LineResult<Vec<u8>> {
    match unescape_field(s) {
        Some(b) if !b.is_empty() => Ok(b),
        _ => parse_err(format!("bad {what} field {s:?}")),
    }
}

fn digest(s: &str, what: &str) -> LineResult<HashDigest> {
    let bytes = hex::decode(s).or_else(|_| parse_err(format!("bad hex in {what}")))?;
    if bytes.len() != DIGEST_LEN {
        return parse_err(format!(
            "{what} has {} octets, expected {DIGEST_LEN}",
            bytes.len()
        ));
    }
    Ok(HashDigest::from_slice(&bytes).expect("length checked"))
}

fn nonce(s: &str) -> LineResult<Vec<u8>> {
    hex::decode(s).or_else(|_| parse_err("bad hex in b_i"))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.is_empty())
}

fn read(path: &Path) -> Result<String, StoreError> {
    fs::read_to_string(path).map_err(|e| StoreError::io(path, e))
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), StoreError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| StoreError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))
}

pub fn format_trust_center_rows(store: &TrustCenterStore) -> String {
    store
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{}\n",
                escape_field(&r.uid),
                r.c_i.to_hex(),
                r.d_i.to_hex(),
                hex::encode(&r.b_i)
            )
        })
        .collect()
}

pub fn parse_trust_center_rows(path: &Path, text: &str) -> Result<TrustCenterStore, StoreError> {
    let mut store = TrustCenterStore::new();
    for (line, content) in data_lines(text) {
        let parsed = (|| -> LineResult<TrustCenterRecord> {
            let [uid, c, d, b] = columns::<4>(content)?;
            Ok(TrustCenterRecord {
                uid: field(uid, "uid")?,
                c_i: digest(c, "C_i")?,
                d_i: digest(d, "D_i")?,
                b_i: nonce(b)?,
            })
        })()
        .map_err(|e| attach(path, line, e))?;
        if store.contains(&parsed.uid) {
            return Err(attach(path, line, (true, "duplicate uid".into())));
        }
        store.insert(parsed).expect("uniqueness checked");
    }
    Ok(store)
}

pub fn save_trust_center(path: &Path, store: &TrustCenterStore) -> Result<(), StoreError> {
    write_atomic(path, &format_trust_center_rows(store))
}

pub fn load_trust_center(path: &Path) -> Result<TrustCenterStore, StoreError> {
    parse_trust_center_rows(path, &read(path)?)
}

pub fn format_device_rows(store: &DeviceStore) -> String {
    store
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{}\n",
                escape_field(&r.uid),
                escape_field(&r.p_i),
                r.d_i.to_hex(),
                hex::encode(&r.b_i)
            )
        })
        .collect()
}

pub fn parse_device_rows(path: &Path, text: &str) -> Result<DeviceStore, StoreError> {
    let mut store = DeviceStore::new();
    for (line, content) in data_lines(text) {
        let parsed = (|| -> LineResult<DeviceRecord> {
            let [uid, p, d, b] = columns::<4>(content)?;
            Ok(DeviceRecord {
                uid: field(uid, "uid")?,
                p_i: field(p, "password")?,
                d_i: digest(d, "D_i")?,
                b_i: nonce(b)?,
            })
        })()
        .map_err(|e| attach(path, line, e))?;
        if store.get(&parsed.uid).is_some() {
            return Err(attach(path, line, (true, "duplicate uid".into())));
        }
        store.put(parsed);
    }
    Ok(store)
}

pub fn save_devices(path: &Path, store: &DeviceStore) -> Result<(), StoreError> {
    write_atomic(path, &format_device_rows(store))
}

pub fn load_devices(path: &Path) -> Result<DeviceStore, StoreError> {
    parse_device_rows(path, &read(path)?)
}

pub fn format_activity_row(r: &ActivityRecord) -> String {
    format!(
        "{},{},{},{}\n",
        escape_field(&r.uid),
        escape_field(&r.sid),
        r.kind,
        r.action_time
    )
}

fn parse_activity_row(content: &str) -> LineResult<ActivityRecord> {
    let [uid, sid, kind, time] = columns::<4>(content)?;
    Ok(ActivityRecord {
        uid: field(uid, "uid")?,
        sid: field(sid, "sid")?,
        kind: kind
            .parse()
            .or_else(|e: crate::trust::TrustError| parse_err(e.to_string()))?,
        action_time: time
            .parse()
            .or_else(|_| parse_err(format!("bad action time {time:?}")))?,
    })
}

/// Append-only activity file, replayed into per-device logs on open.
#[derive(Debug)]
pub struct ActivityStore {
    path: PathBuf,
    logs: BTreeMap<Vec<u8>, ActivityLog>,
}

impl ActivityStore {
    /// Opens the file at `path`, treating a missing file as empty.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(StoreError::io(&path, e)),
        };
        let logs = Self::replay(&path, &text)?;
        Ok(ActivityStore { path, logs })
    }

    fn replay(path: &Path, text: &str) -> Result<BTreeMap<Vec<u8>, ActivityLog>, StoreError> {
        let mut logs: BTreeMap<Vec<u8>, ActivityLog> = BTreeMap::new();
        for (line, content) in data_lines(text) {
            let rec = parse_activity_row(content).map_err(|e| attach(path, line, e))?;
            logs.entry(rec.uid.clone())
                .or_insert_with(|| ActivityLog::new(&rec.uid))
                .record_action(rec)
                .expect("log keyed by uid");
        }
        Ok(logs)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn log(&self, uid: &[u8]) -> Option<&ActivityLog> {
        self.logs.get(uid)
    }

    pub fn logs(&self) -> impl Iterator<Item = &ActivityLog> {
        self.logs.values()
    }

    /// Writes the row to disk first, then updates the in-memory log.
    pub fn append(&mut self, record: ActivityRecord) -> Result<(), StoreError> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| StoreError::io(&self.path, e))?;
        file.write_all(format_activity_row(&record).as_bytes())
            .and_then(|_| file.sync_data())
            .map_err(|e| StoreError::io(&self.path, e))?;
        self.logs
            .entry(record.uid.clone())
            .or_insert_with(|| ActivityLog::new(&record.uid))
            .record_action(record)
            .expect("log keyed by uid");
        Ok(())
    }
}

pub fn save_secret(path: &Path, secret: &TrustCenterSecret) -> Result<(), StoreError> {
    let mut file = File::create(path).map_err(|e| StoreError::io(path, e))?;
    writeln!(file, "{}", hex::encode(secret.as_bytes())).map_err(|e| StoreError::io(path, e))
}

pub fn load_secret(path: &Path) -> Result<TrustCenterSecret, StoreError> {
    let text = read(path)?;
    let bytes = hex::decode(text.trim())
        .map_err(|_| attach(path, 1, (false, "bad hex in secret".into())))?;
    let arr: [u8; DIGEST_LEN] = bytes.try_into().map_err(|b: Vec<u8>| {
        attach(
            path,
            1,
            (
                false,
                format!("secret has {} octets, expected {DIGEST_LEN}", b.len()),
            ),
        )
    })?;
    Ok(TrustCenterSecret::from_bytes(arr))
}

pub fn load_or_create_secret<R: RngCore + CryptoRng>(
    path: &Path,
    rng: &mut R,
) -> Result<TrustCenterSecret, StoreError> {
    if path.exists() {
        return load_secret(path);
    }
    let secret = TrustCenterSecret::generate(rng);
    save_secret(path, &secret)?;
    Ok(secret)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::hash;
    use crate::trust::ActionKind;
    use proptest::prelude::*;

    fn p() -> PathBuf {
        PathBuf::from("mem")
    }

    #[test]
    fn escaping_round_trips_awkward_bytes() {
        let raw = b"a,b\n%c d\xff";
        let esc = escape_field(raw);
        assert!(!esc.contains(',') && !esc.contains('\n'));
        assert_eq!(unescape_field(&esc).unwrap(), raw.to_vec());
        assert_eq!(unescape_field("%4"), None);
        assert_eq!(unescape_field("a,b"), None);
    }

    #[test]
    fn empty_file_is_empty_store() {
        assert!(parse_trust_center_rows(&p(), "").unwrap().is_empty());
        assert!(parse_device_rows(&p(), "").unwrap().is_empty());
    }

    #[test]
    fn truncated_digest_reports_line() {
        let d = hash(b"x").to_hex();
        let good = format!("dev1,{d},{d},00ff\n");
        let bad = format!("dev2,{},{d},00ff\n", &d[..60]);
        let err = parse_trust_center_rows(&p(), &(good + &bad)).unwrap_err();
        assert!(matches!(err, StoreError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_uid_is_integrity_error() {
        let d = hash(b"x").to_hex();
        let row = format!("dev1,{d},{d},00\n");
        let err = parse_trust_center_rows(&p(), &row.repeat(2)).unwrap_err();
        assert!(matches!(err, StoreError::Integrity { line: 2, .. }));
        let drow = format!("dev1,pw,{d},00\n");
        let err = parse_device_rows(&p(), &drow.repeat(2)).unwrap_err();
        assert!(matches!(err, StoreError::Integrity { line: 2, .. }));
    }

    #[test]
    fn wrong_column_count() {
        let err = parse_trust_center_rows(&p(), "a,b,c\n").unwrap_err();
        assert!(matches!(err, StoreError::Parse { line: 1, .. }));
        assert!(parse_activity_row("a,s,PA").is_err());
        assert!(parse_activity_row("a,s,XX,5").is_err());
        assert!(parse_activity_row("a,s,PA,-5").is_err());
    }

    #[test]
    fn activity_store_replays() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("activity.log");
        let mut store = ActivityStore::open(&path).unwrap();
        store
            .append(ActivityRecord::new(b"d1", b"sp1", ActionKind::Positive, 10))
            .unwrap();
        store
            .append(ActivityRecord::new(b"d2", b"sp1", ActionKind::Negative, 11))
            .unwrap();
        store
            .append(ActivityRecord::new(
                b"d1",
                b"sp,2",
                ActionKind::Negative,
                12,
            ))
            .unwrap();
        let reopened = ActivityStore::open(&path).unwrap();
        assert_eq!(reopened.log(b"d1"), store.log(b"d1"));
        assert_eq!(reopened.log(b"d2"), store.log(b"d2"));
        assert_eq!(reopened.log(b"d1").unwrap().len(), 2);
    }

    #[test]
    fn activity_corruption_is_diagnosed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("activity.log");
        fs::write(&path, "d1,sp,PA,10\nd1,sp,PA,ten\n").unwrap();
        let err = ActivityStore::open(&path).unwrap_err();
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn secret_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("secret");
        let mut rng = rand::rngs::OsRng;
        let s = load_or_create_secret(&path, &mut rng).unwrap();
        assert_eq!(load_or_create_secret(&path, &mut rng).unwrap(), s);
        fs::write(&path, "abcd\n").unwrap();
        assert!(matches!(load_secret(&path), Err(StoreError::Parse { .. })));
    }

    fn arb_tc_record() -> impl Strategy<Value = TrustCenterRecord> {
        (
            prop::collection::vec(any::<u8>(), 1..12),
            any::<[u8; 32]>(),
            any::<[u8; 32]>(),
            prop::collection::vec(any::<u8>(), 0..20),
        )
            .prop_map(|(uid, c, d, b)| TrustCenterRecord {
                uid,
                c_i: HashDigest::from_bytes(c),
                d_i: HashDigest::from_bytes(d),
                b_i: b,
            })
    }

    proptest! {
        #[test]
        fn trust_center_rows_round_trip(records in prop::collection::vec(arb_tc_record(), 0..100)) {
            let mut store = TrustCenterStore::new();
            for r in records {
                let _ = store.insert(r);
            }
            let text = format_trust_center_rows(&store);
            prop_assert_eq!(parse_trust_center_rows(&p(), &text).unwrap(), store);
        }

        #[test]
        fn corrupt_input_never_panics(text in "[ -~\n]{0,200}") {
            let _ = parse_trust_center_rows(&p(), &text);
            let _ = parse_device_rows(&p(), &text);
            let _ = ActivityStore::replay(&p(), &text);
        }
    }
}
