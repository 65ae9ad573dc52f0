//! Byte-level building blocks: the adjoint operator, the one-way hash and
//! XOR over digests.
//!
//! The adjoint operator combines two operands before hashing. It is realised
//! as length-prefixed concatenation (4-octet big-endian length, then the
//! bytes) so that `adjoin(a, b)` is injective in the ordered pair. The same
//! framing is reused by the wire encoding in [`crate::sim`], which is why the
//! multi-field helpers [`encode_fields`] and [`decode_fields`] live here too.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Length of a [`HashDigest`] in octets.
pub const DIGEST_LEN: usize = 32;

const LEN_PREFIX: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimitiveError {
    #[error("operand of {0} octets does not fit a 4-octet length prefix")]
    EncodingOverflow(usize),
    #[error("truncated field encoding at offset {0}")]
    Truncated(usize),
    #[error("expected {expected} octets for a digest, got {got}")]
    DigestLength { expected: usize, got: usize },
}

/// A 256-bit digest. XOR of two digests is again a digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HashDigest([u8; DIGEST_LEN]);

impl HashDigest {
    pub const ZERO: HashDigest = HashDigest([0; DIGEST_LEN]);

    pub const fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        HashDigest(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, PrimitiveError> {
        let arr: [u8; DIGEST_LEN] = bytes.try_into().map_err(|_| PrimitiveError::DigestLength {
            expected: DIGEST_LEN,
            got: bytes.len(),
        })?;
        Ok(HashDigest(arr))
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl AsRef<[u8]> for HashDigest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for HashDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HashDigest({})", self.to_hex())
    }
}

impl fmt::Display for HashDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl std::ops::BitXor for HashDigest {
    type Output = HashDigest;

    fn bitxor(self, rhs: HashDigest) -> HashDigest {
        xor(&self, &rhs)
    }
}

fn length_prefix(len: usize) -> Result<[u8; LEN_PREFIX], PrimitiveError> {
    u32::try_from(len)
        .map(u32::to_be_bytes)
        .map_err(|_| PrimitiveError::EncodingOverflow(len))
}

/// The adjoint operator: an injective encoding of the ordered pair `(a, b)`.
pub fn adjoin(a: &[u8], b: &[u8]) -> Result<Vec<u8>, PrimitiveError> {
    encode_fields(&[a, b])
}

/// Length-prefixes each field and concatenates the results.
pub fn encode_fields(fields: &[&[u8]]) -> Result<Vec<u8>, PrimitiveError> {
    let total = fields.iter().map(|f| f.len() + LEN_PREFIX).sum();
    let mut out = Vec::with_capacity(total);
    for field in fields {
        out.extend_from_slice(&length_prefix(field.len())?);
        out.extend_from_slice(field);
    }
    Ok(out)
}

/// Inverse of [`encode_fields`]. Trailing garbage is treated as a truncated field.
pub fn decode_fields(mut bytes: &[u8]) -> Result<Vec<&[u8]>, PrimitiveError> {
    let start = bytes.as_ptr() as usize;
    let mut fields = Vec::new();
    while !bytes.is_empty() {
        let offset = bytes.as_ptr() as usize - start;
        if bytes.len() < LEN_PREFIX {
            return Err(PrimitiveError::Truncated(offset));
        }
        let (prefix, rest) = bytes.split_at(LEN_PREFIX);
        let len = u32::from_be_bytes(prefix.try_into().expect("4-octet prefix")) as usize;
        if rest.len() < len {
            return Err(PrimitiveError::Truncated(offset));
        }
        let (field, rest) = rest.split_at(len);
        fields.push(field);
        bytes = rest;
    }
    Ok(fields)
}

/// SHA-256. Serves as both `H(.)` and `h(.)`.
pub fn hash(m: &[u8]) -> HashDigest {
    HashDigest(Sha256::digest(m).into())
}

/// `hash(adjoin(a, b))`, the shape every derivation in registration takes.
pub fn hash_adjoined(a: &[u8], b: &[u8]) -> Result<HashDigest, PrimitiveError> {
    Ok(hash(&adjoin(a, b)?))
}

pub fn xor(a: &HashDigest, b: &HashDigest) -> HashDigest {
    let mut out = [0u8; DIGEST_LEN];
    for (o, (x, y)) in out.iter_mut().zip(a.0.iter().zip(b.0.iter())) {
        *o = x ^ y;
    }
    HashDigest(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn adjoin_single_octets() {
        assert_eq!(
            adjoin(b"a", b"b").unwrap(),
            vec![0, 0, 0, 1, 0x61, 0, 0, 0, 1, 0x62]
        );
    }

    #[test]
    fn adjoin_empty_pair() {
        assert_eq!(adjoin(b"", b"").unwrap(), vec![0u8; 8]);
    }

    #[test]
    fn adjoin_split_point_matters() {
        assert_ne!(adjoin(b"ab", b"c").unwrap(), adjoin(b"a", b"bc").unwrap());
    }

    #[test]
    fn oversized_operand_overflows() {
        // Allocating 4 GiB is not an option in a unit test; probe the prefix directly.
        let too_long = u32::MAX as usize + 1;
        assert_eq!(
            length_prefix(too_long),
            Err(PrimitiveError::EncodingOverflow(too_long))
        );
        assert!(length_prefix(u32::MAX as usize).is_ok());
    }

    // FIPS 180-2 test vectors.
    #[test]
    fn sha256_vectors() {
        assert_eq!(
            hash(b"").to_hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            hash(b"abc").to_hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(hash(b"abc"), hash(b"abc"));
    }

    #[test]
    fn xor_identities() {
        let a = hash(b"a");
        assert_eq!(xor(&a, &a), HashDigest::ZERO);
        assert_eq!(xor(&a, &HashDigest::ZERO), a);
        let c = hash(b"c");
        assert_eq!(xor(&xor(&a, &c), &c), a);
    }

    #[test]
    fn decode_rejects_truncation() {
        let mut enc = encode_fields(&[b"hello", b"world"]).unwrap();
        enc.pop();
        assert_eq!(decode_fields(&enc), Err(PrimitiveError::Truncated(9)));
        assert_eq!(decode_fields(&[0, 0]), Err(PrimitiveError::Truncated(0)));
    }

    #[test]
    fn digest_from_slice_checks_length() {
        assert!(HashDigest::from_slice(&[0u8; 31]).is_err());
        assert_eq!(
            HashDigest::from_slice(&[0u8; 32]).unwrap(),
            HashDigest::ZERO
        );
    }

    fn digest() -> impl Strategy<Value = HashDigest> {
        any::<[u8; 32]>().prop_map(HashDigest::from_bytes)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn adjoin_is_injective(
            a in prop::collection::vec(any::<u8>(), 0..8),
            b in prop::collection::vec(any::<u8>(), 0..8),
            a2 in prop::collection::vec(any::<u8>(), 0..8),
            b2 in prop::collection::vec(any::<u8>(), 0..8),
        ) {
            let same = adjoin(&a, &b).unwrap() == adjoin(&a2, &b2).unwrap();
            prop_assert_eq!(same, (a, b) == (a2, b2));
        }
    }

    proptest! {
        #[test]
        fn xor_algebra(a in digest(), b in digest(), c in digest()) {
            prop_assert_eq!(xor(&a, &b), xor(&b, &a));
            prop_assert_eq!(xor(&xor(&a, &b), &c), xor(&a, &xor(&b, &c)));
            prop_assert_eq!(xor(&xor(&a, &b), &b), a);
        }

        #[test]
        fn hash_is_always_32_octets(m in prop::collection::vec(any::<u8>(), 0..256)) {
            prop_assert_eq!(hash(&m).as_bytes().len(), DIGEST_LEN);
        }

        #[test]
        fn fields_round_trip(fields in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..16), 0..6)) {
            let refs: Vec<&[u8]> = fields.iter().map(Vec::as_slice).collect();
            let enc = encode_fields(&refs).unwrap();
            prop_assert_eq!(decode_fields(&enc).unwrap(), refs);
        }
    }
}
