use serde::{Deserialize, Serialize};

/// One certified (or refuted) sub-condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: String,
    pub values: Vec<f64>,
    pub threshold: Option<f64>,
    pub pass: bool,
    pub margin: Option<f64>,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<[f64; 2]>,
}

impl ConditionEntry {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            values: Vec::new(),
            threshold: None,
            pass,
            margin: None,
            detail: detail.into(),
            trace: Vec::new(),
        }
    }

    pub fn values(mut self, v: Vec<f64>) -> Self {
        self.values = v.into_iter().map(finite_or_nan).collect();
        self
    }

    pub fn threshold(mut self, t: f64) -> Self {
        self.threshold = Some(t);
        self
    }

    pub fn margin(mut self, m: f64) -> Self {
        self.margin = m.is_finite().then_some(m);
        self
    }

    pub fn trace(mut self, t: Vec<[f64; 2]>) -> Self {
        self.trace = t;
        self
    }
}

fn finite_or_nan(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::NAN
    }
}

/// Collection of entries; passes only when every entry passes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub pass: bool,
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn from_entries(entries: Vec<ConditionEntry>) -> Self {
        let pass = !entries.is_empty() && entries.iter().all(|e| e.pass);
        Self { pass, entries }
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn merge(mut self, other: ConditionReport) -> Self {
        self.entries.extend(other.entries);
        Self::from_entries(self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_all_entries() {
        let r = ConditionReport::from_entries(vec![
            ConditionEntry::new("a", true, ""),
            ConditionEntry::new("b", false, ""),
        ]);
        assert!(!r.pass);
        assert!(!ConditionReport::from_entries(vec![]).pass);
        assert!(ConditionReport::from_entries(vec![ConditionEntry::new("a", true, "")]).pass);
    }
}
