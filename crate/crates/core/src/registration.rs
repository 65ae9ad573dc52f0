//! Device registration with the trust center.
//!
//! Flow for device `i`:
//!
//! ```text
//! device:  A_i    = H(P_i + b_i)                      -> (UID_i, A_i, b_i, TS)
//! center:  PUID_i = h(UID_i + b_i)
//!          M_i    = h(PUID_i + X)
//!          C_i    = h(PUID_i + A_i)
//!          D_i    = M_i xor C_i                       -> stores (C_i, D_i, b_i)
//! device:                                             -> stores (UID_i, P_i, D_i, b_i)
//! ```
//!
//! `+` is [`adjoin`](crate::primitives::adjoin) and both hash symbols are
//! [`hash`](crate::primitives::hash). `PUID_i` and `M_i` are never stored;
//! they are recomputed from `uid`, `b_i` and `X` when needed.

use std::collections::BTreeMap;
use std::fmt;

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::primitives::{
    decode_fields, encode_fields, hash_adjoined, xor, HashDigest, PrimitiveError, DIGEST_LEN,
};

/// Octets of randomness drawn for each `b_i`.
pub const NONCE_LEN: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistrationError {
    #[error("device identity and password must be non-empty")]
    InvalidIdentity,
    #[error("device {} is already registered", String::from_utf8_lossy(.0))]
    DuplicateIdentity(Vec<u8>),
    #[error("device {} is not registered", String::from_utf8_lossy(.0))]
    NotRegistered(Vec<u8>),
    #[error("malformed registration message: {0}")]
    Malformed(String),
    #[error(transparent)]
    Encoding(#[from] PrimitiveError),
}

/// The trust center's security number `X`. Never placed in a wire message.
#[derive(Clone, PartialEq, Eq)]
pub struct TrustCenterSecret([u8; DIGEST_LEN]);

impl TrustCenterSecret {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut x = [0u8; DIGEST_LEN];
        rng.fill_bytes(&mut x);
        TrustCenterSecret(x)
    }

    pub const fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        TrustCenterSecret(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }
}

impl fmt::Debug for TrustCenterSecret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TrustCenterSecret(..)")
    }
}

/// `(UID_i, A_i, b_i)` plus a timestamp. The timestamp is carried but not checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationMessage {
    pub uid: Vec<u8>,
    pub a_i: HashDigest,
    pub b_i: Vec<u8>,
    pub ts: u64,
}

impl RegistrationMessage {
    /// Wire form: four length-prefixed fields `uid, a_i, b_i, ts(u64 BE)`.
    pub fn to_payload(&self) -> Vec<u8> {
        encode_fields(&[
            &self.uid,
            self.a_i.as_ref(),
            &self.b_i,
            &self.ts.to_be_bytes(),
        ])
        .expect("registration fields are small")
    }

    pub fn from_payload(payload: &[u8]) -> Result<Self, RegistrationError> {
        let fields = decode_fields(payload)?;
        let [uid, a_i, b_i, ts] = fields.as_slice() else {
            return Err(RegistrationError::Malformed(format!(
                "expected 4 fields, got {}",
                fields.len()
            )));
        };
        let ts: [u8; 8] = (*ts)
            .try_into()
            .map_err(|_| RegistrationError::Malformed("timestamp is not 8 octets".into()))?;
        Ok(RegistrationMessage {
            uid: uid.to_vec(),
            a_i: HashDigest::from_slice(a_i)?,
            b_i: b_i.to_vec(),
            ts: u64::from_be_bytes(ts),
        })
    }
}

/// Row of the trust center's credential table: `(C_i, D_i, b_i)` keyed by uid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustCenterRecord {
    pub uid: Vec<u8>,
    pub c_i: HashDigest,
    pub d_i: HashDigest,
    pub b_i: Vec<u8>,
}

/// Row of the IoT-level table: `(UID_i, P_i, D_i, b_i)`.
///
/// The password is held in plaintext, as the device table lists it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceRecord {
    pub uid: Vec<u8>,
    pub p_i: Vec<u8>,
    pub d_i: HashDigest,
    pub b_i: Vec<u8>,
}

/// In-memory credential table, one row per uid. Writers need `&mut`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrustCenterStore {
    rows: BTreeMap<Vec<u8>, TrustCenterRecord>,
}

impl TrustCenterStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, record: TrustCenterRecord) -> Result<(), RegistrationError> {
        if self.rows.contains_key(&record.uid) {
            return Err(RegistrationError::DuplicateIdentity(record.uid));
        }
        self.rows.insert(record.uid.clone(), record);
        Ok(())
    }

    pub fn get(&self, uid: &[u8]) -> Option<&TrustCenterRecord> {
        self.rows.get(uid)
    }

    pub fn contains(&self, uid: &[u8]) -> bool {
        self.rows.contains_key(uid)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows in uid order.
    pub fn iter(&self) -> impl Iterator<Item = &TrustCenterRecord> {
        self.rows.values()
    }
}

/// Device-side table. Re-storing a uid replaces the row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeviceStore {
    rows: BTreeMap<Vec<u8>, DeviceRecord>,
}

impl DeviceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, record: DeviceRecord) {
        self.rows.insert(record.uid.clone(), record);
    }

    pub fn get(&self, uid: &[u8]) -> Option<&DeviceRecord> {
        self.rows.get(uid)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DeviceRecord> {
        self.rows.values()
    }
}

/// `A_i = H(P_i + b_i)`.
pub fn password_verifier(password: &[u8], b_i: &[u8]) -> Result<HashDigest, PrimitiveError> {
    hash_adjoined(password, b_i)
}

/// `PUID_i = h(UID_i + b_i)`.
pub fn pseudonym(uid: &[u8], b_i: &[u8]) -> Result<HashDigest, PrimitiveError> {
    hash_adjoined(uid, b_i)
}

/// `M_i = h(PUID_i + X)`.
pub fn center_mask(
    puid: &HashDigest,
    secret: &TrustCenterSecret,
) -> Result<HashDigest, PrimitiveError> {
    hash_adjoined(puid.as_ref(), secret.as_bytes())
}

/// `C_i = h(PUID_i + A_i)`.
pub fn credential_commitment(
    puid: &HashDigest,
    a_i: &HashDigest,
) -> Result<HashDigest, PrimitiveError> {
    hash_adjoined(puid.as_ref(), a_i.as_ref())
}

/// Device side of registration: draws a fresh `b_i` and computes `A_i`.
pub fn device_enroll<R: RngCore + CryptoRng>(
    uid: &[u8],
    password: &[u8],
    rng: &mut R,
    ts: u64,
) -> Result<RegistrationMessage, RegistrationError> {
    let mut b_i = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut b_i);
    device_enroll_with_nonce(uid, password, &b_i, ts)
}

/// [`device_enroll`] with a caller-chosen `b_i`.
pub fn device_enroll_with_nonce(
    uid: &[u8],
    password: &[u8],
    b_i: &[u8],
    ts: u64,
) -> Result<RegistrationMessage, RegistrationError> {
    if uid.is_empty() || password.is_empty() {
        return Err(RegistrationError::InvalidIdentity);
    }
    Ok(RegistrationMessage {
        uid: uid.to_vec(),
        a_i: password_verifier(password, b_i)?,
        b_i: b_i.to_vec(),
        ts,
    })
}

/// Derives `(C_i, D_i)` for a message without touching any store.
pub fn derive_record(
    msg: &RegistrationMessage,
    secret: &TrustCenterSecret,
) -> Result<TrustCenterRecord, RegistrationError> {
    if msg.uid.is_empty() {
        return Err(RegistrationError::InvalidIdentity);
    }
    let puid = pseudonym(&msg.uid, &msg.b_i)?;
    let m_i = center_mask(&puid, secret)?;
    let c_i = credential_commitment(&puid, &msg.a_i)?;
    Ok(TrustCenterRecord {
        uid: msg.uid.clone(),
        c_i,
        d_i: xor(&m_i, &c_i),
        b_i: msg.b_i.clone(),
    })
}

/// Trust-center side of registration. A uid can register once; a second
/// message for the same uid (including a verbatim replay) is rejected.
pub fn tc_register(
    msg: &RegistrationMessage,
    secret: &TrustCenterSecret,
    store: &mut TrustCenterStore,
) -> Result<TrustCenterRecord, RegistrationError> {
    if store.contains(&msg.uid) {
        return Err(RegistrationError::DuplicateIdentity(msg.uid.clone()));
    }
    let record = derive_record(msg, secret)?;
    store.insert(record.clone())?;
    Ok(record)
}

pub fn device_store(uid: &[u8], password: &[u8], d_i: HashDigest, b_i: &[u8]) -> DeviceRecord {
    DeviceRecord {
        uid: uid.to_vec(),
        p_i: password.to_vec(),
        d_i,
        b_i: b_i.to_vec(),
    }
}

/// Recomputes `C_i'` from the presented credentials and checks
/// `D_i xor C_i' == h(PUID_i + X)` against the stored `D_i`.
pub fn verify_credentials(
    uid: &[u8],
    password: &[u8],
    b_i: &[u8],
    secret: &TrustCenterSecret,
    store: &TrustCenterStore,
) -> Result<bool, RegistrationError> {
    let stored = store
        .get(uid)
        .ok_or_else(|| RegistrationError::NotRegistered(uid.to_vec()))?;
    let a_i = password_verifier(password, b_i)?;
    let puid = pseudonym(uid, b_i)?;
    let c_i = credential_commitment(&puid, &a_i)?;
    Ok(xor(&stored.d_i, &c_i) == center_mask(&puid, secret)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{adjoin, hash};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ZERO_NONCE: [u8; NONCE_LEN] = [0; NONCE_LEN];

    // Golden vectors for uid="dev1", pw="pw", b_i=0^16, X=0^32, computed
    // independently with Python's hashlib over the length-prefixed encoding.
    const GOLDEN_A: &str = "351a0432deb9dc0caa576033601c1b914e0d8eba78e7a444a7c52ac81087c154";
    const GOLDEN_PUID: &str = "b7bcaa3f249f1361e97d40577fbc1db8919724ad980f58cd13c0035bcb76d2f4";
    const GOLDEN_M: &str = "60ea7c17a8c02acdcc3feaf54e679a7a5138636771a5e2c12ba416cbb629533b";
    const GOLDEN_C: &str = "c4a6b27a69c3ec7ca30e1e148bdc6d460432e55550a403a743cb0b880d92a2ec";
    const GOLDEN_D: &str = "a44cce6dc103c6b16f31f4e1c5bbf73c550a86322101e166686f1d43bbbbf1d7";

    #[test]
    fn enroll_matches_hash_oracle() {
        let msg = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 0).unwrap();
        let mut encoded = vec![0, 0, 0, 2, b'p', b'w', 0, 0, 0, 16];
        encoded.extend_from_slice(&ZERO_NONCE);
        assert_eq!(msg.a_i, hash(&encoded));
        assert_eq!(msg.a_i.to_hex(), GOLDEN_A);
    }

    #[test]
    fn golden_registration_vectors() {
        let msg = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 0).unwrap();
        let secret = TrustCenterSecret::from_bytes([0; 32]);
        let puid = pseudonym(b"dev1", &ZERO_NONCE).unwrap();
        let m_i = center_mask(&puid, &secret).unwrap();
        let rec = derive_record(&msg, &secret).unwrap();
        assert_eq!(puid.to_hex(), GOLDEN_PUID);
        assert_eq!(m_i.to_hex(), GOLDEN_M);
        assert_eq!(rec.c_i.to_hex(), GOLDEN_C);
        assert_eq!(rec.d_i.to_hex(), GOLDEN_D);
    }

    #[test]
    fn enroll_is_deterministic_given_nonce() {
        let a = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 5).unwrap();
        let b = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_identity_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            device_enroll(b"", b"pw", &mut rng, 0),
            Err(RegistrationError::InvalidIdentity)
        );
        assert_eq!(
            device_enroll(b"dev", b"", &mut rng, 0),
            Err(RegistrationError::InvalidIdentity)
        );
    }

    #[test]
    fn enroll_draws_sixteen_octets() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let msg = device_enroll(b"dev", b"pw", &mut rng, 0).unwrap();
        assert_eq!(msg.b_i.len(), NONCE_LEN);
    }

    #[test]
    fn register_then_duplicate() {
        let secret = TrustCenterSecret::from_bytes([7; 32]);
        let mut store = TrustCenterStore::new();
        let msg = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 0).unwrap();
        let rec = tc_register(&msg, &secret, &mut store).unwrap();

        let puid = hash(&adjoin(b"dev1", &ZERO_NONCE).unwrap());
        let m_i = hash(&adjoin(puid.as_ref(), secret.as_bytes()).unwrap());
        assert_eq!(xor(&rec.d_i, &rec.c_i), m_i);
        assert_eq!(store.get(b"dev1"), Some(&rec));

        assert_eq!(
            tc_register(&msg, &secret, &mut store),
            Err(RegistrationError::DuplicateIdentity(b"dev1".to_vec()))
        );
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn verify_accepts_and_rejects() {
        let secret = TrustCenterSecret::from_bytes([3; 32]);
        let mut store = TrustCenterStore::new();
        let msg = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 0).unwrap();
        let rec = tc_register(&msg, &secret, &mut store).unwrap();
        let dev = device_store(b"dev1", b"pw", rec.d_i, &msg.b_i);
        assert_eq!(dev.d_i, rec.d_i);

        assert_eq!(
            verify_credentials(b"dev1", b"pw", &dev.b_i, &secret, &store),
            Ok(true)
        );
        assert_eq!(
            verify_credentials(b"dev1", b"px", &dev.b_i, &secret, &store),
            Ok(false)
        );
        assert_eq!(
            verify_credentials(b"dev2", b"pw", &dev.b_i, &secret, &store),
            Err(RegistrationError::NotRegistered(b"dev2".to_vec()))
        );
    }

    #[test]
    fn payload_round_trip_and_rejects_garbage() {
        let msg = device_enroll_with_nonce(b"dev1", b"pw", &ZERO_NONCE, 1234).unwrap();
        assert_eq!(
            RegistrationMessage::from_payload(&msg.to_payload()),
            Ok(msg)
        );
        assert!(RegistrationMessage::from_payload(b"\x00\x00\x00\x09x").is_err());
        let short = encode_fields(&[b"u", &[0; 32], b"b"]).unwrap();
        assert!(matches!(
            RegistrationMessage::from_payload(&short),
            Err(RegistrationError::Malformed(_))
        ));
    }

    #[test]
    fn secret_debug_is_redacted() {
        let s = TrustCenterSecret::from_bytes([0xAB; 32]);
        assert!(!format!("{s:?}").contains("ab"));
    }
}
