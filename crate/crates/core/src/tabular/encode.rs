//! Ordinal label encoding for categorical columns.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Per-column ordered label lists. Code `i` maps to the label at position `i`;
/// labels are assigned codes in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMap {
    labels: BTreeMap<usize, Vec<String>>,
}

impl EncodingMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a column with a fixed label list (labels in code order).
    pub fn with_labels(mut self, col: usize, labels: Vec<String>) -> Self {
        self.labels.insert(col, labels);
        self
    }

    /// Encode a label, assigning the next code on first appearance.
    pub fn encode_or_insert(&mut self, col: usize, label: &str) -> usize {
        let list = self.labels.entry(col).or_default();
        match list.iter().position(|l| l == label) {
            Some(code) => code,
            None => {
                list.push(label.to_string());
                list.len() - 1
            }
        }
    }

    pub fn encode(&self, col: usize, label: &str) -> Option<usize> {
        self.labels.get(&col)?.iter().position(|l| l == label)
    }

    pub fn decode(&self, col: usize, code: usize) -> Option<&str> {
        self.labels.get(&col)?.get(code).map(|s| s.as_str())
    }

    pub fn labels(&self, col: usize) -> Option<&[String]> {
        self.labels.get(&col).map(|v| v.as_slice())
    }

    pub fn n_codes(&self, col: usize) -> usize {
        self.labels.get(&col).map(|v| v.len()).unwrap_or(0)
    }

    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_appearance_order() {
        let mut map = EncodingMap::new();
        assert_eq!(map.encode_or_insert(1, "b"), 0);
        assert_eq!(map.encode_or_insert(1, "a"), 1);
        assert_eq!(map.encode_or_insert(1, "b"), 0);
        assert_eq!(map.decode(1, 1), Some("a"));
    }

    #[test]
    fn decode_of_encode_is_identity() {
        let mut map = EncodingMap::new();
        for label in ["x", "y", "z", "y"] {
            let code = map.encode_or_insert(0, label);
            assert_eq!(map.decode(0, code), Some(label));
        }
    }
}
