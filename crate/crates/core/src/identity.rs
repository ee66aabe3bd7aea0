//! Code-identity commitments.
//!
//! A code identity is the SHA-256 digest of the byte payload implementing one
//! protocol step in one client implementation. The [`CommitmentRegistry`] is
//! the on-chain view of approved identities: every digest is unique (a payload
//! shared by two implementations cannot serve as a fingerprint), every
//! `(impl_id, step_id)` pair appears at most once, and iteration order is
//! lexicographic by `(impl_id, step_id)` on every platform.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// 32-byte SHA-256 commitment digest. Serialized as lowercase hex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Digest(out))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Digest::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// SHA-256 of arbitrary bytes.
pub fn sha256(bytes: &[u8]) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    Digest(hasher.finalize().into())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("code segment payload is empty")]
    EmptyCode,
    #[error("implementation or step identifier is empty")]
    EmptyIdentifier,
    #[error("non-distinct fingerprint: segments {first} and {second} hash to the same digest {digest}")]
    NonDistinctFingerprint {
        /// `impl_id/step_id` of the first segment with this digest.
        first: String,
        /// `impl_id/step_id` of the offending segment.
        second: String,
        digest: Digest,
    },
    #[error("duplicate registry key ({impl_id}, {step_id})")]
    DuplicateKey { impl_id: String, step_id: String },
    #[error("registry must contain at least one commitment")]
    EmptyRegistry,
}

/// The code bytes implementing one protocol step in one implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSegment {
    pub impl_id: String,
    pub step_id: String,
    pub code: Vec<u8>,
}

impl CodeSegment {
    pub fn new(
        impl_id: impl Into<String>,
        step_id: impl Into<String>,
        code: impl Into<Vec<u8>>,
    ) -> Result<Self, IdentityError> {
        let segment = CodeSegment {
            impl_id: impl_id.into(),
            step_id: step_id.into(),
            code: code.into(),
        };
        if segment.impl_id.is_empty() || segment.step_id.is_empty() {
            return Err(IdentityError::EmptyIdentifier);
        }
        if segment.code.is_empty() {
            return Err(IdentityError::EmptyCode);
        }
        Ok(segment)
    }
}

/// A commitment binding `(impl_id, step_id)` to the digest of its code bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeIdentity {
    pub impl_id: String,
    pub step_id: String,
    pub digest: Digest,
}

/// Compute the commitment for a code segment.
///
/// The digest depends on the code bytes only: two segments with identical
/// payloads yield identical digests regardless of their identifiers.
pub fn compute_commitment(segment: &CodeSegment) -> Result<CodeIdentity, IdentityError> {
    if segment.impl_id.is_empty() || segment.step_id.is_empty() {
        return Err(IdentityError::EmptyIdentifier);
    }
    if segment.code.is_empty() {
        return Err(IdentityError::EmptyCode);
    }
    Ok(CodeIdentity {
        impl_id: segment.impl_id.clone(),
        step_id: segment.step_id.clone(),
        digest: sha256(&segment.code),
    })
}

/// Registry of approved code identities, ordered by `(impl_id, step_id)`.
///
/// Immutable after construction; updates go through [`Self::with_added`] /
/// [`Self::with_removed`], which rebuild and revalidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CodeIdentity>", into = "Vec<CodeIdentity>")]
pub struct CommitmentRegistry {
    entries: BTreeMap<(String, String), CodeIdentity>,
    by_digest: BTreeMap<Digest, (String, String)>,
}

impl CommitmentRegistry {
    /// Build a registry from identities, enforcing digest and key uniqueness.
    pub fn from_identities(
        identities: impl IntoIterator<Item = CodeIdentity>,
    ) -> Result<Self, IdentityError> {
        let mut entries = BTreeMap::new();
        let mut by_digest: BTreeMap<Digest, (String, String)> = BTreeMap::new();
        for identity in identities {
            if identity.impl_id.is_empty() || identity.step_id.is_empty() {
                return Err(IdentityError::EmptyIdentifier);
            }
            let key = (identity.impl_id.clone(), identity.step_id.clone());
            if let Some((prev_impl, prev_step)) = by_digest.get(&identity.digest) {
                return Err(IdentityError::NonDistinctFingerprint {
                    first: format!("{prev_impl}/{prev_step}"),
                    second: format!("{}/{}", identity.impl_id, identity.step_id),
                    digest: identity.digest,
                });
            }
            if entries.contains_key(&key) {
                return Err(IdentityError::DuplicateKey {
                    impl_id: key.0,
                    step_id: key.1,
                });
            }
            by_digest.insert(identity.digest, key.clone());
            entries.insert(key, identity);
        }
        if entries.is_empty() {
            return Err(IdentityError::EmptyRegistry);
        }
        Ok(CommitmentRegistry { entries, by_digest })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in `(impl_id, step_id)` order.
    pub fn entries(&self) -> impl Iterator<Item = &CodeIdentity> {
        self.entries.values()
    }

    pub fn contains_digest(&self, digest: &Digest) -> bool {
        self.by_digest.contains_key(digest)
    }

    /// Implementation id owning `digest`, if registered.
    pub fn impl_of(&self, digest: &Digest) -> Option<&str> {
        self.by_digest.get(digest).map(|(impl_id, _)| impl_id.as_str())
    }

    pub fn get(&self, impl_id: &str, step_id: &str) -> Option<&CodeIdentity> {
        self.entries
            .get(&(impl_id.to_string(), step_id.to_string()))
    }

    /// Distinct implementation ids, sorted. Its length is the `n_impls` used
    /// by the reward function.
    pub fn impl_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .entries
            .keys()
            .map(|(impl_id, _)| impl_id.clone())
            .collect();
        ids.dedup();
        ids
    }

    pub fn impl_count(&self) -> usize {
        self.impl_ids().len()
    }

    pub fn with_added(&self, identity: CodeIdentity) -> Result<Self, IdentityError> {
        let identities = self.entries.values().cloned().chain([identity]);
        Self::from_identities(identities)
    }

    pub fn with_removed(&self, digest: &Digest) -> Result<Self, IdentityError> {
        let identities = self
            .entries
            .values()
            .filter(|identity| identity.digest != *digest)
            .cloned();
        Self::from_identities(identities)
    }
}

impl TryFrom<Vec<CodeIdentity>> for CommitmentRegistry {
    type Error = IdentityError;

    fn try_from(identities: Vec<CodeIdentity>) -> Result<Self, Self::Error> {
        Self::from_identities(identities)
    }
}

impl From<CommitmentRegistry> for Vec<CodeIdentity> {
    fn from(registry: CommitmentRegistry) -> Self {
        registry.entries.into_values().collect()
    }
}

/// Commit every segment and store the results in a registry.
pub fn build_registry(segments: &[CodeSegment]) -> Result<CommitmentRegistry, IdentityError> {
    if segments.is_empty() {
        return Err(IdentityError::EmptyRegistry);
    }
    let identities = segments
        .iter()
        .map(compute_commitment)
        .collect::<Result<Vec<_>, _>>()?;
    CommitmentRegistry::from_identities(identities)
}
