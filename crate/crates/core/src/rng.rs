//! Labelled random streams derived from one master seed.
//!
//! A [`StreamKey`] names a stream by its master seed and a path of
//! `(label, index)` steps. Streams with different paths are independent and
//! do not depend on the order in which they are created.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub tag: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl StreamKey {
    pub fn new(seed: u64) -> StreamKey {
        StreamKey { seed, tag: 0 }
    }

    /// Sub-stream `label[idx]` of this stream.
    pub fn child(&self, label: &str, idx: u64) -> StreamKey {
        let t = splitmix(self.tag ^ fnv1a(label));
        StreamKey { seed: self.seed, tag: splitmix(t ^ splitmix(idx.wrapping_add(0x632b_e59b_d9b4_e019))) }
    }

    pub fn rng(&self) -> StreamRng {
        let mut bytes = [0u8; 32];
        let words = [
            splitmix(self.seed),
            splitmix(self.tag ^ 0x5851_f42d_4c95_7f2d),
            splitmix(self.seed ^ self.tag.rotate_left(17)),
            splitmix(self.tag.wrapping_add(self.seed.rotate_left(29))),
        ];
        for (k, w) in words.iter().enumerate() {
            bytes[8 * k..8 * k + 8].copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(bytes)
    }
}
