//! Machine-readable verification reports and seed derivation.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::field::FieldSpec;

/// Bumped whenever the JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// CLI exit code: 0 pass, 1 fail, 3 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportItem {
    pub id: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
}

impl ReportItem {
    pub fn new(id: impl Into<String>, status: Status) -> Self {
        ReportItem { id: id.into(), status, details: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(key.to_string(), serde_json::to_value(value).expect("serializable detail"));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub check: String,
    pub status: Status,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<String>,
    /// Seed given on the command line.
    pub seed: u64,
    /// Seeds actually used by the randomized parts.
    pub seeds: Vec<u64>,
    pub trials: u64,
    pub items: Vec<ReportItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<String>,
    /// Wall-clock time; not part of the deterministic canon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(check: &str, field: &FieldSpec) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            check: check.to_string(),
            status: Status::Pass,
            field: field.to_string(),
            params: None,
            seed: 0,
            seeds: Vec::new(),
            trials: 0,
            items: Vec::new(),
            reproducer: None,
            timing_ms: None,
        }
    }

    pub fn push(&mut self, item: ReportItem) {
        self.status = self.status.combine(item.status);
        self.items.push(item);
    }

    /// Appends another report's items under a prefix.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut item in other.items {
            item.id = format!("{prefix}/{}", item.id);
            self.push(item);
        }
        self.seeds.extend(other.seeds);
        self.status = self.status.combine(other.status);
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failing_ids(&self) -> Vec<&str> {
        self.items.iter().filter(|i| i.status != Status::Pass).map(|i| i.id.as_str()).collect()
    }

    pub fn item(&self, id: &str) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the timing field, for determinism comparisons.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.timing_ms = None;
        c.to_json()
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-task seed: `splitmix64(master ^ fnv1a64(task))`.
pub fn derive_seed(master: u64, task: &str) -> u64 {
    splitmix64(master ^ fnv1a64(task.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.combine(Status::Inconclusive), Status::Inconclusive);
        assert_eq!(Status::Inconclusive.combine(Status::Fail), Status::Fail);
        assert_eq!(Status::Fail.exit_code(), 1);
    }

    #[test]
    fn seeds_are_stable() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_ne!(derive_seed(1, "generation"), derive_seed(1, "minimality"));
        assert_eq!(derive_seed(7, "x"), derive_seed(7, "x"));
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new("counts", &FieldSpec::surrogate());
        r.push(ReportItem::new("d=1", Status::Pass).with("value", 3));
        r.timing_ms = Some(5);
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!r.canonical_json().contains("timing_ms"));
        assert!(r.to_json().contains("\"schema_version\": 1"));
    }
}
