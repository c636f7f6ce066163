use std::fmt;

use serde::{Deserialize, Serialize};

/// The six aggregate measures of one traffic matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AggregateReport {
    pub valid_packets: u64,
    pub unique_links: u64,
    pub unique_sources: u64,
    pub max_fanout: u64,
    pub unique_destinations: u64,
    pub max_fanin: u64,
}

impl AggregateReport {
    pub const FIELD_NAMES: [&'static str; 6] = [
        "valid_packets",
        "unique_links",
        "unique_sources",
        "max_fanout",
        "unique_destinations",
        "max_fanin",
    ];

    pub fn fields(&self) -> [(&'static str, u64); 6] {
        let values = [
            self.valid_packets,
            self.unique_links,
            self.unique_sources,
            self.max_fanout,
            self.unique_destinations,
            self.max_fanin,
        ];
        std::array::from_fn(|i| (Self::FIELD_NAMES[i], values[i]))
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Folds another window into a dataset total: counts add, maxima max.
    pub fn accumulate(&mut self, other: &AggregateReport) {
        self.valid_packets += other.valid_packets;
        self.unique_links += other.unique_links;
        self.unique_sources += other.unique_sources;
        self.unique_destinations += other.unique_destinations;
        self.max_fanout = self.max_fanout.max(other.max_fanout);
        self.max_fanin = self.max_fanin.max(other.max_fanin);
    }

    /// Ordering relations every single-window report satisfies.
    pub fn satisfies_bounds(&self) -> bool {
        let all_zero = self.is_empty();
        let any_zero = self.fields().iter().any(|(_, v)| *v == 0);
        self.unique_sources <= self.unique_links
            && self.unique_destinations <= self.unique_links
            && self.unique_links <= self.unique_sources * self.unique_destinations
            && self.max_fanout <= self.unique_destinations
            && self.max_fanin <= self.unique_sources
            && self.valid_packets >= self.unique_links
            && all_zero == any_zero
    }
}

/// `key=value` lines, one per measure.
impl fmt::Display for AggregateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in self.fields() {
            writeln!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

/// Per-window reports of a dataset and their totals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub matrices: Vec<AggregateReport>,
    pub totals: AggregateReport,
}

impl DatasetReport {
    pub fn from_reports(matrices: Vec<AggregateReport>) -> Self {
        let mut totals = AggregateReport::default();
        for r in &matrices {
            totals.accumulate(r);
        }
        Self { matrices, totals }
    }
}
