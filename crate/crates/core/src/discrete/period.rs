//! Eventual periodicity of difference sequences and the resulting
//! decomposition into arithmetic progressions.

use num_traits::{One, Zero};
use serde::Serialize;

use super::SetPrefix;
use crate::error::{Error, Result};
use crate::model::ModelElement;
use crate::scalar::{rational_gcd, Scalar};

/// `{offset + i * step : i in N}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub offset: ModelElement,
    pub step: ModelElement,
}

impl Progression {
    pub fn new(offset: ModelElement, step: ModelElement) -> Progression {
        Progression { offset, step }
    }

    pub fn term(&self, i: i64) -> ModelElement {
        self.offset.add(&self.step.scale(&crate::scalar::int(i)))
    }

    /// Whether `x` is `offset + i * step` for some integer `i` (of any sign).
    pub fn contains_z(&self, x: &ModelElement) -> bool {
        ratio(&x.sub(&self.offset), &self.step).is_some_and(|r| crate::scalar::is_integer(&r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct APDecomposition {
    pub finite_part: Vec<ModelElement>,
    pub progressions: Vec<Progression>,
    /// A single integer-indexed progression containing every progression.
    pub merged_step: Option<Progression>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Merge {
    Merged(Progression),
    Incommensurable,
}

/// Smallest `(n0, l)`, by `n0` first, with `d[i + l] = d[i]` for every
/// `n0 <= i < len - l` and at least two full periods after `n0`.
pub fn eventual_period_of(diffs: &[ModelElement]) -> Option<(usize, usize)> {
    let len = diffs.len();
    if len < 3 {
        return None;
    }
    for n0 in 0..len {
        for l in 1..=(len - n0) / 2 {
            if (n0..len - l).all(|i| diffs[i + l] == diffs[i]) {
                return Some((n0, l));
            }
        }
    }
    None
}

pub fn eventual_period(prefix: &SetPrefix) -> Option<(usize, usize)> {
    eventual_period_of(&prefix.diffs())
}

fn coords(e: &ModelElement) -> Vec<Scalar> {
    match e.canonical() {
        ModelElement::RatPoint(a) => vec![a],
        ModelElement::QuadPoint(a, b) => vec![a, b],
        ModelElement::RootCombo(v) => v,
    }
}

/// `x / y` when it is rational.
pub fn ratio(x: &ModelElement, y: &ModelElement) -> Option<Scalar> {
    let (mut u, mut v) = (coords(x), coords(y));
    let n = u.len().max(v.len());
    u.resize(n, Scalar::zero());
    v.resize(n, Scalar::zero());
    let k = v.iter().position(|c| !c.is_zero())?;
    let r = &u[k] / &v[k];
    u.iter().zip(&v).all(|(a, b)| *a == &r * b).then_some(r)
}

/// The coarsest integer-indexed progression containing both inputs.
pub fn commensurable_merge(x: &Progression, y: &Progression) -> Result<Merge> {
    let zero = ModelElement::zero();
    if x.step <= zero || y.step <= zero {
        return Err(Error::Input("progression steps must be positive".into()));
    }
    let gens = [y.step.clone(), x.offset.sub(&y.offset)];
    let mut ratios = vec![Scalar::one()];
    for g in &gens {
        match ratio(g, &x.step) {
            Some(r) => ratios.push(r),
            None => return Ok(Merge::Incommensurable),
        }
    }
    let h = rational_gcd(ratios.iter()).expect("ratios include 1");
    Ok(Merge::Merged(Progression::new(x.offset.clone(), x.step.scale(&h))))
}

fn merge_all(ps: &[Progression]) -> Result<Option<Progression>> {
    let mut acc = match ps.first() {
        Some(p) => p.clone(),
        None => return Ok(None),
    };
    for p in &ps[1..] {
        match commensurable_merge(&acc, p)? {
            Merge::Merged(m) => acc = m,
            Merge::Incommensurable => return Ok(None),
        }
    }
    Ok(Some(acc))
}

pub fn decompose_prefix(prefix: &SetPrefix) -> Result<APDecomposition> {
    let diffs = prefix.diffs();
    let (n0, l) = eventual_period_of(&diffs)
        .ok_or_else(|| Error::Inconclusive("no eventual period with two full periods of evidence".into()))?;
    let step = diffs[n0..n0 + l].iter().fold(ModelElement::zero(), |a, d| a.add(d));
    let progressions: Vec<Progression> = (0..l)
        .map(|r| Progression::new(prefix.elements[n0 + r].clone(), step.clone()))
        .collect();
    Ok(APDecomposition {
        finite_part: prefix.elements[..n0].to_vec(),
        merged_step: merge_all(&progressions)?,
        progressions,
    })
}

impl APDecomposition {
    pub fn from_parts(finite_part: Vec<ModelElement>, progressions: Vec<Progression>) -> Result<APDecomposition> {
        let merged_step = merge_all(&progressions)?;
        Ok(APDecomposition { finite_part, progressions, merged_step })
    }

    /// Members up to `bound`, sorted.
    pub fn enumerate_upto(&self, bound: &ModelElement) -> Vec<ModelElement> {
        let mut out: Vec<ModelElement> = self.finite_part.iter().filter(|x| *x <= bound).cloned().collect();
        for p in &self.progressions {
            let mut i = 0;
            loop {
                let t = p.term(i);
                if &t > bound {
                    break;
                }
                out.push(t);
                i += 1;
            }
        }
        out.sort();
        out
    }

    /// The first `n` members, sorted.
    pub fn first(&self, n: usize) -> Vec<ModelElement> {
        let mut heads: Vec<(ModelElement, usize, i64)> =
            self.progressions.iter().enumerate().map(|(k, p)| (p.offset.clone(), k, 0)).collect();
        let mut out: Vec<ModelElement> = self.finite_part.clone();
        while out.len() < n + self.finite_part.len() && !heads.is_empty() {
            let (idx, _) = heads.iter().enumerate().min_by(|a, b| a.1 .0.cmp(&b.1 .0)).unwrap();
            let (v, k, i) = heads[idx].clone();
            out.push(v);
            heads[idx] = (self.progressions[k].term(i + 1), k, i + 1);
        }
        out.sort();
        out.dedup();
        out.truncate(n);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn w(xs: &[i64]) -> Vec<ModelElement> {
        xs.iter().map(|x| ModelElement::int(*x)).collect()
    }

    fn prog(a: Scalar, b: Scalar) -> Progression {
        Progression::new(ModelElement::rat(a), ModelElement::rat(b))
    }

    #[test]
    fn periods() {
        assert_eq!(eventual_period_of(&w(&[5, 1, 2, 1, 2, 1, 2])), Some((1, 2)));
        assert_eq!(eventual_period_of(&w(&[3, 3, 3, 3, 3])), Some((0, 1)));
        assert_eq!(eventual_period_of(&w(&[1, 2, 4, 8, 16])), None);
    }

    #[test]
    fn odd_numbers() {
        let d = decompose_prefix(&SetPrefix::from_ints([1, 3, 5, 7, 9]).unwrap()).unwrap();
        assert!(d.finite_part.is_empty());
        assert_eq!(d.progressions, vec![prog(rat(1, 1), rat(2, 1))]);
    }

    #[test]
    fn two_residues_merge_to_unit_step() {
        let d = decompose_prefix(&SetPrefix::from_ints([10, 11, 13, 14, 16, 17, 19]).unwrap()).unwrap();
        assert!(d.finite_part.is_empty());
        assert_eq!(d.progressions, vec![prog(rat(10, 1), rat(3, 1)), prog(rat(11, 1), rat(3, 1))]);
        assert_eq!(d.merged_step, Some(prog(rat(10, 1), rat(1, 1))));
    }

    #[test]
    fn no_period_for_powers() {
        let mut xs = vec![5];
        xs.extend((3..12).map(|k| 1i64 << k));
        assert!(matches!(decompose_prefix(&SetPrefix::from_ints(xs).unwrap()), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn merges() {
        let m = commensurable_merge(&prog(rat(1, 1), rat(2, 1)), &prog(rat(1, 2), rat(3, 1))).unwrap();
        let Merge::Merged(p) = m else { panic!() };
        assert_eq!(p, prog(rat(1, 1), rat(1, 2)));
        for i in 0..50 {
            assert!(p.contains_z(&prog(rat(1, 1), rat(2, 1)).term(i)));
            assert!(p.contains_z(&prog(rat(1, 2), rat(3, 1)).term(i)));
        }
        let m = commensurable_merge(&prog(rat(0, 1), rat(4, 1)), &prog(rat(2, 1), rat(4, 1))).unwrap();
        assert_eq!(m, Merge::Merged(prog(rat(0, 1), rat(2, 1))));
        let root2 = Progression::new(ModelElement::zero(), ModelElement::QuadPoint(rat(0, 1), rat(1, 1)));
        assert_eq!(commensurable_merge(&prog(rat(0, 1), rat(1, 1)), &root2).unwrap(), Merge::Incommensurable);
        assert!(commensurable_merge(&prog(rat(0, 1), rat(0, 1)), &root2).is_err());
    }

    #[test]
    fn enumeration() {
        let d = APDecomposition::from_parts(w(&[1]), vec![prog(rat(4, 1), rat(3, 1)), prog(rat(5, 1), rat(3, 1))]).unwrap();
        assert_eq!(d.first(5), w(&[1, 4, 5, 7, 8]));
        assert_eq!(d.enumerate_upto(&ModelElement::int(8)), w(&[1, 4, 5, 7, 8]));
    }
}
