use sha2::{Digest, Sha256};
use unicode_normalization::UnicodeNormalization;

const SEPARATOR: u8 = 0x1F;

/// Identity hash for an article: SHA-256 over the NFC forms of
/// `title ‖ 0x1F ‖ description ‖ 0x1F ‖ outlet_id`, hex encoded.
pub fn compute_dedup_hash(title: &str, description: &str, outlet_id: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(title.nfc().collect::<String>().as_bytes());
    hasher.update([SEPARATOR]);
    hasher.update(description.nfc().collect::<String>().as_bytes());
    hasher.update([SEPARATOR]);
    hasher.update(outlet_id.nfc().collect::<String>().as_bytes());
    format!("{:x}", hasher.finalize())
}
