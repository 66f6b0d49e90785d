//! Document image degradation: ink, paper and post phases of probability-gated effects,
//! with full provenance of every sampled parameter.

pub mod binding;
pub mod effect;
pub mod effects;
pub mod error;
pub mod evalkit;
pub mod fixtures;
pub mod params;
pub mod pipeline;
pub mod raster;
pub mod rng;
pub mod synthesis;

pub use effect::{catalog, Effect, EffectParams, External, Family, Registration, Registry};
pub use error::{Error, Result};
pub use params::Sampled;
pub use raster::Raster;
pub use rng::{StreamKey, StreamRng};

/// Hex SHA-256 of `bytes`.
pub fn digest_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-file seed: the base seed folded with a hash of the `/`-separated relative path, so a
/// file's seed never depends on which other files are present.
pub fn file_seed(base_seed: u64, relative_path: &str) -> u64 {
    use sha2::{Digest, Sha256};
    let h = Sha256::digest(relative_path.replace('\\', "/").as_bytes());
    let h = u64::from_le_bytes(h[..8].try_into().expect("8 bytes"));
    rng::mix64(base_seed ^ rng::mix64(h))
}
