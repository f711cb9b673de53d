//! Motifs: windows of consecutive differences, how often they recur, and
//! the successor of a recurring window.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::{show_window, SetPrefix};
use crate::error::{Error, Result};
use crate::model::ModelElement;

pub type Window = Vec<ModelElement>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MotifTable {
    pub window_length: usize,
    /// Windows seen at least this often count as recurring.
    pub threshold: usize,
    #[serde(serialize_with = "counts")]
    pub occurrences: BTreeMap<Window, usize>,
    #[serde(serialize_with = "windows")]
    pub recurring: Vec<Window>,
    /// Observed one-longer extensions of each window, with counts.
    #[serde(skip)]
    pub transitions: BTreeMap<Window, BTreeMap<Window, usize>>,
}

fn counts<S: Serializer>(m: &BTreeMap<Window, usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<(String, usize)> = m.iter().map(|(w, c)| (show_window(w), *c)).collect();
    v.serialize(s)
}

fn windows<S: Serializer>(ws: &[Window], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<String> = ws.iter().map(|w| show_window(w)).collect();
    v.serialize(s)
}

pub const DEFAULT_THRESHOLD: usize = 3;

/// Motif table of a difference sequence.
pub fn motif_table_of(diffs: &[ModelElement], n: usize, threshold: usize) -> Result<MotifTable> {
    if n < 1 {
        return Err(Error::Input("window length must be at least 1".into()));
    }
    if diffs.len() < n {
        return Err(Error::Input(format!("{} differences are fewer than the window length {n}", diffs.len())));
    }
    let mut occurrences: BTreeMap<Window, usize> = BTreeMap::new();
    for w in diffs.windows(n) {
        *occurrences.entry(w.to_vec()).or_default() += 1;
    }
    let mut transitions: BTreeMap<Window, BTreeMap<Window, usize>> = BTreeMap::new();
    for w in diffs.windows(n + 1) {
        *transitions
            .entry(w[..n].to_vec())
            .or_default()
            .entry(w.to_vec())
            .or_default() += 1;
    }
    let recurring = occurrences
        .iter()
        .filter(|(_, c)| **c >= threshold)
        .map(|(w, _)| w.clone())
        .collect();
    Ok(MotifTable { window_length: n, threshold, occurrences, recurring, transitions })
}

pub fn motif_table(prefix: &SetPrefix, n: usize, threshold: usize) -> Result<MotifTable> {
    motif_table_of(&prefix.diffs(), n, threshold)
}

/// The unique recurring extension of `sigma`, shifted left by one.
pub fn sigma_successor(table: &MotifTable, sigma: &[ModelElement]) -> Result<Window> {
    if !table.recurring.iter().any(|w| w.as_slice() == sigma) {
        return Err(Error::Input(format!("window {} is not recurring", show_window(sigma))));
    }
    let ext: Vec<&Window> = table
        .transitions
        .get(sigma)
        .map(|m| m.iter().filter(|(_, c)| **c >= table.threshold).map(|(w, _)| w).collect())
        .unwrap_or_default();
    match ext.as_slice() {
        [one] => Ok(one[1..].to_vec()),
        [] => Err(Error::Inconclusive(format!(
            "window {} has no recurring extension; the prefix is too short",
            show_window(sigma)
        ))),
        many => Err(Error::AmbiguousExtension {
            window: show_window(sigma),
            competitors: many.iter().map(|w| show_window(w)).collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(xs: &[i64]) -> Window {
        xs.iter().map(|x| ModelElement::int(*x)).collect()
    }

    #[test]
    fn alternating_windows() {
        let t = motif_table_of(&w(&[1, 2, 1, 2, 1, 2]), 2, 2).unwrap();
        assert_eq!(t.occurrences[&w(&[1, 2])], 3);
        assert_eq!(t.occurrences[&w(&[2, 1])], 2);
        assert_eq!(t.recurring.len(), 2);
        assert_eq!(sigma_successor(&t, &w(&[1, 2])).unwrap(), w(&[2, 1]));
    }

    #[test]
    fn constant_and_growing() {
        let t = motif_table_of(&w(&[3, 3, 3, 3]), 1, 3).unwrap();
        assert_eq!(t.occurrences[&w(&[3])], 4);
        assert_eq!(sigma_successor(&t, &w(&[3])).unwrap(), w(&[3]));
        let t = motif_table_of(&w(&[1, 2, 4, 8]), 2, 2).unwrap();
        assert!(t.recurring.is_empty());
        assert_eq!(t.occurrences.values().sum::<usize>(), 3);
    }

    #[test]
    fn ambiguity_resolves_with_longer_windows() {
        let d = w(&[1, 2, 1, 3, 1, 2, 1, 3, 1, 2, 1, 3, 1, 2, 1, 3]);
        let t = motif_table_of(&d, 1, 3).unwrap();
        let err = sigma_successor(&t, &w(&[1])).unwrap_err();
        assert!(matches!(err, Error::AmbiguousExtension { ref competitors, .. } if competitors.len() == 2));
        let t = motif_table_of(&d, 2, 3).unwrap();
        assert_eq!(sigma_successor(&t, &w(&[2, 1])).unwrap(), w(&[1, 3]));
    }

    #[test]
    fn short_windows_rejected() {
        assert!(motif_table_of(&w(&[1, 2]), 0, 1).is_err());
    }
}
