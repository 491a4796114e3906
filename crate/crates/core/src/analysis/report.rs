use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a sweep: a strategy (and target or parameter label) with its
/// named numeric results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: String,
    pub label: String,
    pub epsilon: Option<f64>,
    pub values: BTreeMap<String, f64>,
    /// Set when the row breaks the bound under test.
    pub violation: Option<String>,
}

impl SweepRow {
    pub fn new(
        strategy: impl Into<String>,
        label: impl Into<String>,
        epsilon: Option<f64>,
    ) -> Self {
        Self {
            strategy: strategy.into(),
            label: label.into(),
            epsilon,
            values: BTreeMap::new(),
            violation: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

/// Result table of a verifier or sweep.
///
/// JSON form: `{"kind", "metadata", "summary", "rows", "violations"}`.
/// CSV form: header `strategy,label,epsilon,<value keys sorted>,violation`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: String,
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub summary: BTreeMap<String, f64>,
    pub rows: Vec<SweepRow>,
    pub violations: Vec<String>,
}

impl SweepReport {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
        self
    }

    /// Appends a row, recording its violation if it has one.
    pub fn push(&mut self, row: SweepRow) {
        if let Some(v) = &row.violation {
            self.violations
                .push(format!("{} [{}]: {v}", row.strategy, row.label));
        }
        self.rows.push(row);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn columns(&self) -> Vec<String> {
        let keys: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.values.keys()).collect();
        ["strategy", "label", "epsilon"]
            .into_iter()
            .map(String::from)
            .chain(keys.into_iter().cloned())
            .chain(std::iter::once("violation".to_string()))
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        self.to_csv_with(&[])
    }

    /// CSV with extra columns appended that hold the same value on every row.
    pub fn to_csv_with(&self, constants: &[(&str, String)]) -> Result<String> {
        let base = self.columns();
        let columns: Vec<String> = base
            .iter()
            .cloned()
            .chain(constants.iter().map(|(k, _)| k.to_string()))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        w.write_record(&columns).map_err(csv_err)?;
        for row in &self.rows {
            let mut record = vec![
                row.strategy.clone(),
                row.label.clone(),
                row.epsilon.map(|e| e.to_string()).unwrap_or_default(),
            ];
            for key in &base[3..base.len() - 1] {
                record.push(
                    row.values
                        .get(key)
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                );
            }
            record.push(row.violation.clone().unwrap_or_default());
            record.extend(constants.iter().map(|(_, v)| v.clone()));
            w.write_record(&record).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_union_of_columns() {
        let mut r = SweepReport::new("t");
        r.push(SweepRow::new("a", "x", Some(0.5)).with("beta", 1.0));
        let mut bad = SweepRow::new("b", "y", None).with("alpha", 0.25);
        bad.violation = Some("too big".into());
        r.push(bad);
        let csv = r.to_csv().unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "strategy,label,epsilon,alpha,beta,violation");
        assert_eq!(lines[1], "a,x,0.5,,1,");
        assert_eq!(lines[2], "b,y,,0.25,,too big");
        assert_eq!(r.violations, vec!["b [y]: too big".to_string()]);
    }
}
