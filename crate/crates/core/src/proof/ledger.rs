//! Machine-readable record of every constant a bound depends on.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Supplied by the caller (measured elsewhere or configured).
    Input,
    /// Stated explicitly by the argument being reconstructed.
    Explicit,
    /// Left implicit by the argument; reconstructed by tracing the inequality.
    Reconstructed,
    /// Configuration default.
    Configured,
    /// Measured on computed data.
    Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    /// Non-finite values serialize as `null`.
    pub value: f64,
    pub formula_id: String,
    #[serde(rename = "paper_step")]
    pub step: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn push(&mut self, name: &str, value: f64, formula_id: &str, step: &str, provenance: Provenance) {
        self.entries.push(LedgerEntry {
            name: name.to_string(),
            value,
            formula_id: formula_id.to_string(),
            step: step.to_string(),
            provenance,
        });
    }

    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn extend(&mut self, other: Ledger) {
        self.entries.extend(other.entries);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }
}
