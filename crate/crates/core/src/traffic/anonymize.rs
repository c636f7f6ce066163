//! Keyed relabeling of addresses into a dense anonymized index space.
//!
//! Distinct addresses are collected in first-seen order and handed the
//! indices `0..m` in an order shuffled by the key. The result is injective,
//! dense (so matrix dimensions stay small) and reproducible for a given
//! key and stream.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PacketRecord;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnonymizationMap {
    key: u64,
    mapping: HashMap<u32, u32>,
}

impl AnonymizationMap {
    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn get(&self, raw: u32) -> Option<u32> {
        self.mapping.get(&raw).copied()
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.mapping.iter().map(|(&raw, &anon)| (raw, anon))
    }
}

pub fn anonymize(packets: &[PacketRecord], key: u64) -> (Vec<PacketRecord>, AnonymizationMap) {
    let mut first_seen: Vec<u32> = Vec::new();
    let mut mapping: HashMap<u32, u32> = HashMap::new();
    for p in packets {
        for addr in [p.src, p.dst] {
            mapping.entry(addr).or_insert_with(|| {
                first_seen.push(addr);
                0
            });
        }
    }

    let mut labels: Vec<u32> = (0..first_seen.len() as u32).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(key));
    for (addr, label) in first_seen.iter().zip(labels) {
        mapping.insert(*addr, label);
    }

    let relabeled = packets
        .iter()
        .map(|p| PacketRecord {
            src: mapping[&p.src],
            dst: mapping[&p.dst],
            valid: p.valid,
        })
        .collect();
    (relabeled, AnonymizationMap { key, mapping })
}
