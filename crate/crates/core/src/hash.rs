//! Stable 64-bit content hashing.
//!
//! `std::hash::DefaultHasher` is not guaranteed stable across toolchains, so
//! fingerprints that land in files (prompt hashes, fixture names, index
//! metadata) go through FNV-1a instead.

use std::hash::Hasher;

use fnv::FnvHasher;

/// FNV-1a hash of a byte string.
pub fn content_hash(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// Hash rendered as the 16-char lowercase hex form used in file names.
pub fn content_hash_hex(bytes: &[u8]) -> String {
    format!("{:016x}", content_hash(bytes))
}
