// Copyright 2026 The delisort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Seed derivation. Every random choice in the crate flows from a 64-bit seed
//! mixed with a label through SHA-256, so streams are stable across
//! platforms and toolchains.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives a 64-bit seed from a label, a base seed and extra key material.
pub fn derive_seed(label: &str, seed: u64, key: &[u8]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(seed.to_le_bytes());
    hasher.update(key);
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn stream(label: &str, seed: u64, key: &[u8]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(label, seed, key))
}

/// Uniform draw in `[0, 1)` keyed by `(seed, a, b)`.
pub fn keyed_unit(label: &str, seed: u64, a: u64, b: u64) -> f64 {
    let mut key = [0u8; 16];
    key[..8].copy_from_slice(&a.to_le_bytes());
    key[8..].copy_from_slice(&b.to_le_bytes());
    // 53 high bits -> exactly representable fraction
    (derive_seed(label, seed, &key) >> 11) as f64 / (1u64 << 53) as f64
}
