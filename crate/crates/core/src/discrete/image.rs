//! Images of discrete sets under piecewise linear definable maps.

use serde::Serialize;

use super::period::{decompose_prefix, APDecomposition};
use super::screen::accumulation_gap;
use super::{delta, SetPrefix};
use crate::error::{Error, Result};
use crate::model::{eval_qf, eval_term, Assignment, ModelElement, OracleModel};
use crate::parse::{parse, parse_term};
use crate::syntax::{Formula, Signature, Term};

/// `f(x) = value_i` where `guard_i` holds. Guards must not overlap.
#[derive(Debug, Clone)]
pub struct GuardedMap {
    pub var: String,
    pub sig: Signature,
    pub pieces: Vec<(Formula, Term)>,
}

impl GuardedMap {
    pub fn total(var: &str, sig: Signature, value: Term) -> GuardedMap {
        GuardedMap { var: var.into(), sig, pieces: vec![(Formula::Top, value)] }
    }

    /// `guard => term; guard => term; ...`, or a bare term for a total map.
    pub fn parse(text: &str, var: &str, sig: Signature) -> Result<GuardedMap> {
        let mut pieces = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (g, t) = match part.split_once("=>") {
                Some((g, t)) => (parse(g.trim(), sig)?, parse_term(t.trim())?),
                None => (Formula::Top, parse_term(part)?),
            };
            t.validate(sig)?;
            pieces.push((g, t));
        }
        if pieces.is_empty() {
            return Err(Error::Input("empty map".into()));
        }
        Ok(GuardedMap { var: var.into(), sig, pieces })
    }

    pub fn apply(&self, x: &ModelElement) -> Result<ModelElement> {
        let model = OracleModel::for_signature(self.sig);
        let asg: Assignment = [(self.var.clone(), x.clone())].into();
        let mut hit = None;
        for (i, (g, _)) in self.pieces.iter().enumerate() {
            if eval_qf(g, &asg, &model)? {
                if let Some(j) = hit {
                    return Err(Error::Input(format!("guards {j} and {i} overlap at {x}")));
                }
                hit = Some(i);
            }
        }
        let i = hit.ok_or_else(|| Error::Input(format!("no guard holds at {x}")))?;
        eval_term(&self.pieces[i].1, &asg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageReport {
    pub image: SetPrefix,
    /// `None` when no eventual period is visible.
    pub decomposition: Option<APDecomposition>,
    /// Gaps of the image stay above the accumulation scale.
    pub discrete_consistent: bool,
}

pub fn image_analyze(f: &GuardedMap, prefix: &SetPrefix) -> Result<ImageReport> {
    let mut img = prefix
        .elements
        .iter()
        .map(|x| f.apply(x))
        .collect::<Result<Vec<_>>>()?;
    img.sort();
    img.dedup();
    let image = SetPrefix::new(img)?;
    let (decomposition, discrete_consistent) = if image.len() < 2 {
        (None, true)
    } else {
        let dd = delta(&image)?;
        let ok = dd.delta_set.first().is_some_and(|g| *g >= accumulation_gap());
        let dec = match decompose_prefix(&image) {
            Ok(d) => Some(d),
            Err(Error::Inconclusive(_)) => None,
            Err(e) => return Err(e),
        };
        (dec, ok)
    };
    Ok(ImageReport { image, decomposition, discrete_consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::Progression;

    fn p(a: i64, b: i64) -> Progression {
        Progression::new(ModelElement::int(a), ModelElement::int(b))
    }

    #[test]
    fn doubling() {
        let f = GuardedMap::parse("2 * x", "x", Signature::Doag).unwrap();
        let r = image_analyze(&f, &SetPrefix::from_ints(1..=20).unwrap()).unwrap();
        assert_eq!(r.decomposition.unwrap().progressions, vec![p(2, 2)]);
        assert!(r.discrete_consistent);
    }

    #[test]
    fn identity_keeps_decomposition() {
        let input = SetPrefix::from_ints([1, 2, 4, 5, 7, 8, 10, 11]).unwrap();
        let f = GuardedMap::parse("x - 0 * floor(x) + 0", "x", Signature::T0Mixed).unwrap();
        let r = image_analyze(&f, &input).unwrap();
        assert_eq!(r.image, input);
        assert_eq!(r.decomposition.unwrap(), decompose_prefix(&input).unwrap());
    }

    #[test]
    fn integer_part_of_thirds() {
        let f = GuardedMap::parse("floor(x/3)", "x", Signature::T0Mixed).unwrap();
        let r = image_analyze(&f, &SetPrefix::from_ints(1..=30).unwrap()).unwrap();
        assert_eq!(r.image, SetPrefix::from_ints(0..=10).unwrap());
        assert_eq!(r.decomposition.unwrap().progressions, vec![p(0, 1)]);
        assert!(r.discrete_consistent);
    }

    #[test]
    fn overlapping_guards() {
        let f = GuardedMap::parse("x < 5 => x; x < 10 => 2 * x", "x", Signature::Doag).unwrap();
        assert!(image_analyze(&f, &SetPrefix::from_ints(1..=8).unwrap()).is_err());
        let g = GuardedMap::parse("x < 5 => x; 5 <= x => 2 * x", "x", Signature::Doag).unwrap();
        assert!(image_analyze(&g, &SetPrefix::from_ints(1..=8).unwrap()).is_ok());
    }
}
