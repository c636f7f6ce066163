//! Reference computation of the aggregate measures straight from packet
//! pairs, with no matrix, no containers and no scheduler involved.

use std::collections::{HashMap, HashSet};

use super::AggregateReport;
use crate::traffic::PacketRecord;

pub fn oracle_analyze(window: &[PacketRecord]) -> AggregateReport {
    let valid: Vec<(u32, u32)> = window.iter().filter(|p| p.valid).map(|p| (p.src, p.dst)).collect();
    let links: HashSet<(u32, u32)> = valid.iter().copied().collect();

    let mut fanout: HashMap<u32, HashSet<u32>> = HashMap::new();
    let mut fanin: HashMap<u32, HashSet<u32>> = HashMap::new();
    for &(s, d) in &valid {
        fanout.entry(s).or_default().insert(d);
        fanin.entry(d).or_default().insert(s);
    }

    AggregateReport {
        valid_packets: valid.len() as u64,
        unique_links: links.len() as u64,
        unique_sources: fanout.len() as u64,
        max_fanout: fanout.values().map(|d| d.len() as u64).max().unwrap_or(0),
        unique_destinations: fanin.len() as u64,
        max_fanin: fanin.values().map(|s| s.len() as u64).max().unwrap_or(0),
    }
}
