//! Synthetic packet streams and the flat binary packet record file.
//!
//! A record file is a plain concatenation of 9-byte records:
//!
//! | bytes | field                     |
//! |-------|---------------------------|
//! | 0..4  | `src`, u32 little-endian  |
//! | 4..8  | `dst`, u32 little-endian  |
//! | 8     | `valid`, 0 or 1           |

use std::io::{self, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TrafficError;

/// One observed packet, reduced to its endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketRecord {
    pub src: u32,
    pub dst: u32,
    pub valid: bool,
}

impl PacketRecord {
    pub const ENCODED_LEN: usize = 9;

    pub const fn new(src: u32, dst: u32) -> Self {
        Self { src, dst, valid: true }
    }

    pub fn encode(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        out[0..4].copy_from_slice(&self.src.to_le_bytes());
        out[4..8].copy_from_slice(&self.dst.to_le_bytes());
        out[8] = u8::from(self.valid);
        out
    }

    pub fn decode(bytes: &[u8; Self::ENCODED_LEN]) -> Option<Self> {
        let valid = match bytes[8] {
            0 => false,
            1 => true,
            _ => return None,
        };
        Some(Self {
            src: u32::from_le_bytes(bytes[0..4].try_into().ok()?),
            dst: u32::from_le_bytes(bytes[4..8].try_into().ok()?),
            valid,
        })
    }
}

/// Deterministic stream of uniformly random packets.
///
/// Endpoints are drawn independently and uniformly from
/// `[0, address_space)` using ChaCha8 seeded with `seed`.
#[derive(Clone, Debug)]
pub struct PacketGenerator {
    rng: ChaCha8Rng,
    remaining: usize,
    address_space: u32,
    invalid_fraction: f64,
}

impl PacketGenerator {
    pub fn new(n: usize, address_space: u32, seed: u64) -> Result<Self, TrafficError> {
        if address_space == 0 {
            return Err(TrafficError::EmptyAddressSpace);
        }
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            remaining: n,
            address_space,
            invalid_fraction: 0.0,
        })
    }

    /// Marks roughly `fraction` of the packets invalid. With a fraction of
    /// zero the stream is identical to one built without this call.
    pub fn with_invalid_fraction(mut self, fraction: f64) -> Result<Self, TrafficError> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(TrafficError::InvalidFraction(fraction));
        }
        self.invalid_fraction = fraction;
        Ok(self)
    }
}

impl Iterator for PacketGenerator {
    type Item = PacketRecord;

    fn next(&mut self) -> Option<PacketRecord> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let src = self.rng.random_range(0..self.address_space);
        let dst = self.rng.random_range(0..self.address_space);
        let valid = self.invalid_fraction == 0.0 || !self.rng.random_bool(self.invalid_fraction);
        Some(PacketRecord { src, dst, valid })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for PacketGenerator {}

/// `n` uniform random valid packets over `[0, address_space)`.
pub fn generate_packets(n: usize, address_space: u32, seed: u64) -> Result<Vec<PacketRecord>, TrafficError> {
    Ok(PacketGenerator::new(n, address_space, seed)?.collect())
}

pub fn write_packets<W: Write>(mut out: W, packets: &[PacketRecord]) -> io::Result<()> {
    for p in packets {
        out.write_all(&p.encode())?;
    }
    out.flush()
}

pub fn read_packets<R: Read>(mut input: R) -> Result<Vec<PacketRecord>, TrafficError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() % PacketRecord::ENCODED_LEN != 0 {
        return Err(TrafficError::TruncatedRecord { len: bytes.len() });
    }
    bytes
        .chunks_exact(PacketRecord::ENCODED_LEN)
        .enumerate()
        .map(|(i, chunk)| {
            let raw: &[u8; PacketRecord::ENCODED_LEN] = chunk.try_into().expect("exact chunk");
            PacketRecord::decode(raw).ok_or(TrafficError::BadValidFlag { record: i, flag: raw[8] })
        })
        .collect()
}
