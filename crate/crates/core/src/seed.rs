//! Stable sub-seed derivation.
//!
//! Everything random in the simulator flows from one master seed. Sub-seeds
//! for links, analysis sets, and schedules are derived by hashing a textual
//! label with FNV-1a and mixing through a SplitMix64 finalizer, so the
//! mapping is stable across runs, platforms, and compiler versions
//! (`DefaultHasher` gives no such guarantee).

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a deterministic sub-seed from a master seed and a label.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    splitmix64(master ^ fnv1a(label.as_bytes()))
}
