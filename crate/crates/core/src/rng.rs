//! Counter-based pseudorandom numbers.
//!
//! Every random quantity in the crate is a pure function of a 64-bit key and
//! a 128-bit counter, evaluated with the Philox4x32-10 bijection. Instruction
//! tapes, initial configurations, per-trial seeds and auxiliary walks use
//! disjoint [`Stream`] tags in the top counter word, so no two consumers ever
//! read the same counter.

use rand::RngCore;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
#[inline]
pub fn philox4x32(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = ctr;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Domain separation tags. The tag occupies the top byte of the counter,
/// leaving 64 bits for a primary and 56 bits for a secondary index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Stream {
    Tape = 1,
    Config = 2,
    TrialTape = 3,
    TrialConfig = 4,
    Walk = 5,
    Order = 6,
    Instance = 7,
}

#[inline]
fn split_key(seed: u64) -> [u32; 2] {
    [seed as u32, (seed >> 32) as u32]
}

#[inline]
fn counter(stream: Stream, major: u64, minor: u64) -> [u32; 4] {
    debug_assert!(minor < (1 << 56));
    [
        major as u32,
        (major >> 32) as u32,
        minor as u32,
        ((minor >> 32) as u32 & 0x00FF_FFFF) | ((stream as u32) << 24),
    ]
}

/// 64 random bits addressed by `(seed, stream, major, minor)`.
#[inline]
pub fn random_bits(seed: u64, stream: Stream, major: u64, minor: u64) -> u64 {
    let out = philox4x32(counter(stream, major, minor), split_key(seed));
    u64::from(out[0]) | (u64::from(out[1]) << 32)
}

/// Uniform draw in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn random_unit(seed: u64, stream: Stream, major: u64, minor: u64) -> f64 {
    bits_to_unit(random_bits(seed, stream, major, minor))
}

#[inline]
pub fn bits_to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Child seed for item `index` of a family keyed by `master`.
pub fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    random_bits(master, stream, index, 0)
}

/// Sequential generator over a counter-based stream: block `b` of the stream
/// `(seed, stream, minor)` is `philox4x32((b, minor, tag), seed)`.
#[derive(Clone, Debug)]
pub struct PhiloxRng {
    key: [u32; 2],
    stream: Stream,
    minor: u64,
    block: u64,
    buf: [u32; 4],
    used: usize,
}

impl PhiloxRng {
    pub fn new(seed: u64, stream: Stream, minor: u64) -> Self {
        PhiloxRng {
            key: split_key(seed),
            stream,
            minor,
            block: 0,
            buf: [0; 4],
            used: 4,
        }
    }

    #[inline]
    fn refill(&mut self) {
        self.buf = philox4x32(counter(self.stream, self.block, self.minor), self.key);
        self.block += 1;
        self.used = 0;
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        bits_to_unit(self.next_u64())
    }
}

impl RngCore for PhiloxRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        if self.used == 4 {
            self.refill();
        }
        let v = self.buf[self.used];
        self.used += 1;
        v
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        lo | (hi << 32)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(4) {
            let bytes = self.next_u32().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
