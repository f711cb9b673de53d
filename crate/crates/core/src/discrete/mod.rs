//! Discrete sets at finite scale: difference sets, motifs and their
//! successors, eventual periodicity, arithmetic progression decompositions,
//! commensurability, sparsity screens and images under definable maps.

pub mod image;
pub mod motif;
pub mod period;
pub mod presburger;
pub mod screen;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelElement;

pub use image::{image_analyze, GuardedMap, ImageReport};
pub use motif::{motif_table, motif_table_of, sigma_successor, MotifTable, Window};
pub use period::{
    commensurable_merge, decompose_prefix, eventual_period, eventual_period_of, APDecomposition, Merge,
    Progression,
};
pub use presburger::decompose_presburger;
pub use screen::{d_delta, strength_screen, Certificate, Isolated, ScreenInput, StrengthReport, Verdict};

/// The first elements of a set of order type omega, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetPrefix {
    pub elements: Vec<ModelElement>,
    /// When present, `elements` are exactly the members `<= complete_below`.
    pub complete_below: Option<ModelElement>,
}

impl SetPrefix {
    pub fn new(elements: Vec<ModelElement>) -> Result<SetPrefix> {
        for w in elements.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Input(format!("prefix is not strictly increasing at {} >= {}", w[0], w[1])));
            }
        }
        Ok(SetPrefix { elements, complete_below: None })
    }

    pub fn complete(elements: Vec<ModelElement>, below: ModelElement) -> Result<SetPrefix> {
        let mut p = SetPrefix::new(elements)?;
        p.complete_below = Some(below);
        Ok(p)
    }

    pub fn from_ints(xs: impl IntoIterator<Item = i64>) -> Result<SetPrefix> {
        SetPrefix::new(xs.into_iter().map(ModelElement::int).collect())
    }

    /// Builds the prefix whose consecutive differences are `diffs`.
    pub fn from_diffs(start: ModelElement, diffs: &[ModelElement]) -> Result<SetPrefix> {
        let mut out = vec![start];
        for d in diffs {
            let next = out.last().unwrap().add(d);
            out.push(next);
        }
        SetPrefix::new(out)
    }

    /// One value per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<SetPrefix> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v = ModelElement::parse(line)
                .map_err(|e| Error::Input(format!("line {}: {e}", i + 1)))?;
            out.push(v);
        }
        SetPrefix::new(out)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn diffs(&self) -> Vec<ModelElement> {
        self.elements.windows(2).map(|w| w[1].sub(&w[0])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaData {
    pub diffs: Vec<ModelElement>,
    pub delta_set: Vec<ModelElement>,
    /// No gap in the second half of the prefix exceeds the largest gap of
    /// the first half.
    pub bounded_flag: bool,
    /// The largest gap in the second half exceeds twice the largest gap of
    /// the first half.
    pub growth_flag: bool,
}

fn half_maxima(diffs: &[ModelElement]) -> Option<(ModelElement, ModelElement)> {
    if diffs.len() < 2 {
        return None;
    }
    let (a, b) = diffs.split_at(diffs.len() / 2);
    Some((a.iter().max()?.clone(), b.iter().max()?.clone()))
}

pub fn delta(prefix: &SetPrefix) -> Result<DeltaData> {
    if prefix.len() < 2 {
        return Err(Error::Input("difference sets need at least two elements".into()));
    }
    SetPrefix::new(prefix.elements.clone())?;
    let diffs = prefix.diffs();
    let mut delta_set = diffs.clone();
    delta_set.sort();
    delta_set.dedup();
    let (bounded_flag, growth_flag) = match half_maxima(&diffs) {
        Some((first, second)) => (second <= first, second > first.add(&first)),
        None => (true, false),
    };
    Ok(DeltaData { diffs, delta_set, bounded_flag, growth_flag })
}

pub fn show_window(xs: &[ModelElement]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_qf, OracleModel};
    use crate::parse::parse;
    use crate::syntax::Signature;

    fn ints(xs: &[i64]) -> Vec<ModelElement> {
        xs.iter().map(|x| ModelElement::int(*x)).collect()
    }

    #[test]
    fn evens() {
        let d = delta(&SetPrefix::from_ints([2, 4, 6, 8]).unwrap()).unwrap();
        assert_eq!(d.diffs, ints(&[2, 2, 2]));
        assert_eq!(d.delta_set, ints(&[2]));
        assert!(!d.growth_flag);
    }

    #[test]
    fn powers_of_two_grow() {
        let d = delta(&SetPrefix::from_ints([1, 2, 4, 8, 16, 32]).unwrap()).unwrap();
        assert_eq!(d.delta_set, ints(&[1, 2, 4, 8, 16]));
        assert!(d.growth_flag);
        assert!(!d.bounded_flag);
    }

    #[test]
    fn multiples_of_two_or_three() {
        let sig = Signature::Presburger;
        let f = parse("Z(x/2) | Z(x/3)", sig).unwrap();
        let m = OracleModel::for_signature(sig);
        let xs: Vec<i64> = (1..=30)
            .filter(|x| {
                let asg = [("x".to_string(), ModelElement::int(*x))].into();
                eval_qf(&f, &asg, &m).unwrap()
            })
            .collect();
        assert_eq!(xs[..4], [2, 3, 4, 6]);
        assert_eq!(delta(&SetPrefix::from_ints(xs).unwrap()).unwrap().delta_set, ints(&[1, 2]));
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(SetPrefix::from_ints([1, 3, 2]).is_err());
        assert!(SetPrefix::parse("1\n# note\n1/2\n").is_err());
        let p = SetPrefix::parse("# halves\n1/2\n1\n1+sqrt2\n").unwrap();
        assert_eq!(p.len(), 3);
    }
}
