//! Keyed 128-bit hashing shared by the hash-based algorithms.
//!
//! Every identifier produced by [`crate::schaetzle`] and [`crate::brs`] is a
//! SipHash-1-3 128-bit digest under a fixed key, so runs are reproducible
//! across processes and platforms. Inputs are always serialized in a fixed
//! little-endian byte order.

use std::collections::HashMap;
use std::hash::Hasher;

use siphasher::sip128::{Hasher128, SipHasher13};
use thiserror::Error;

use crate::graph::VertexId;

/// A 128-bit block or vertex-state identifier.
pub type Id128 = u128;

const KEY0: u64 = 0x6b62_6973_696d_0001;
const KEY1: u64 = 0x7374_7261_7469_6669;

/// Streaming builder for one identifier.
#[derive(Clone)]
pub struct IdHasher(SipHasher13);

impl IdHasher {
    pub fn new() -> Self {
        IdHasher(SipHasher13::new_with_keys(KEY0, KEY1))
    }

    /// Starts a hasher whose output cannot coincide with other domains'
    /// outputs for the same payload.
    pub fn with_domain(tag: u8) -> Self {
        let mut h = Self::new();
        h.0.write_u8(tag);
        h
    }

    pub fn write_u32(&mut self, x: u32) {
        self.0.write(&x.to_le_bytes());
    }

    pub fn write_u64(&mut self, x: u64) {
        self.0.write(&x.to_le_bytes());
    }

    pub fn write_id(&mut self, x: Id128) {
        self.0.write(&x.to_le_bytes());
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        self.write_u64(bytes.len() as u64);
        self.0.write(bytes);
    }

    pub fn finish(&self) -> Id128 {
        self.0.finish128().as_u128()
    }
}

impl Default for IdHasher {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("hash collision in iteration {iteration}: vertices {first} and {second} share id {id:032x} but differ in {what}")]
/// Two inputs with different preimages received the same identifier.
pub struct HashCollision {
    pub iteration: usize,
    pub first: VertexId,
    pub second: VertexId,
    pub id: Id128,
    pub what: &'static str,
}

/// Confirms that vertices sharing an identifier also share the preimage the
/// identifier was hashed from.
pub fn check_preimages<P: PartialEq>(
    ids: &[Id128],
    preimage: impl Fn(VertexId) -> P,
    iteration: usize,
    what: &'static str,
) -> Result<(), HashCollision> {
    let mut seen: HashMap<Id128, (VertexId, P)> = HashMap::new();
    for (v, &id) in ids.iter().enumerate() {
        let v = v as VertexId;
        let p = preimage(v);
        match seen.get(&id) {
            Some((first, q)) if *q != p => {
                return Err(HashCollision {
                    iteration,
                    first: *first,
                    second: v,
                    id,
                    what,
                })
            }
            Some(_) => {}
            None => {
                seen.insert(id, (v, p));
            }
        }
    }
    Ok(())
}

/// Hashes a raw byte buffer in one shot.
pub fn hash_raw(bytes: &[u8]) -> Id128 {
    let mut h = SipHasher13::new_with_keys(KEY0, KEY1);
    h.write(bytes);
    h.finish128().as_u128()
}

/// Non-commutative combination of an old identifier with a new hash value.
///
/// Implemented as the hash of `old || new`, so `combine(a, b) != combine(b, a)`
/// in general and successive rounds remain distinguishable.
pub fn combine(old: Id128, new: Id128) -> Id128 {
    let mut buf = [0u8; 32];
    buf[..16].copy_from_slice(&old.to_le_bytes());
    buf[16..].copy_from_slice(&new.to_le_bytes());
    hash_raw(&buf)
}

/// Counts distinct identifiers exactly.
pub fn count_distinct(ids: &[Id128]) -> usize {
    use rayon::slice::ParallelSliceMut;
    let mut sorted = ids.to_vec();
    sorted.par_sort_unstable();
    sorted.dedup();
    sorted.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_is_order_sensitive() {
        let a = hash_raw(b"a");
        let b = hash_raw(b"b");
        assert_ne!(combine(a, b), combine(b, a));
        assert_eq!(combine(a, b), combine(a, b));
    }

    #[test]
    fn domains_separate_equal_payloads() {
        let mut x = IdHasher::with_domain(1);
        let mut y = IdHasher::with_domain(2);
        x.write_u32(7);
        y.write_u32(7);
        assert_ne!(x.finish(), y.finish());
    }

    #[test]
    fn distinct_count() {
        assert_eq!(count_distinct(&[]), 0);
        assert_eq!(count_distinct(&[3, 1, 3, 2, 1]), 3);
    }

    #[test]
    fn streaming_matches_one_shot() {
        let mut h = IdHasher::with_domain(9);
        h.write_u32(5);
        h.write_id(u128::MAX - 3);
        h.write_bytes(b"xyz");
        let mut raw = vec![9u8];
        raw.extend_from_slice(&5u32.to_le_bytes());
        raw.extend_from_slice(&(u128::MAX - 3).to_le_bytes());
        raw.extend_from_slice(&3u64.to_le_bytes());
        raw.extend_from_slice(b"xyz");
        assert_eq!(h.finish(), hash_raw(&raw));
    }

    #[test]
    fn preimage_check_reports_collisions() {
        let ids = [1, 2, 1, 2];
        assert!(check_preimages(&ids, |v| v % 2, 1, "test").is_ok());
        let err = check_preimages(&ids, |v| v, 4, "test").unwrap_err();
        assert_eq!((err.iteration, err.first, err.second, err.id), (4, 0, 2, 1));
    }
}
