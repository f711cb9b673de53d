//! Sparsity, accumulation and growth screens for discrete sets.

use serde::Serialize;

use super::period::eventual_period_of;
use super::{delta, presburger::decompose_presburger, SetPrefix};
use crate::error::{Error, Result};
use crate::model::ModelElement;
use crate::scalar::rat;
use crate::syntax::{Formula, Signature};

/// Points isolated at radius `delta`, with those whose isolation depends on
/// members outside the prefix listed separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isolated {
    pub set: SetPrefix,
    pub provisional: Vec<ModelElement>,
}

/// `D(delta)`: members whose open `delta`-neighbourhood meets the set only
/// in themselves, judged against in-prefix neighbours.
pub fn d_delta(prefix: &SetPrefix, delta: &ModelElement) -> Result<Isolated> {
    if *delta <= ModelElement::zero() {
        return Err(Error::Input("radius must be positive".into()));
    }
    let xs = &prefix.elements;
    let mut set = Vec::new();
    let mut provisional = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let left = i == 0 || x.sub(&xs[i - 1]) >= *delta;
        let right = i + 1 == xs.len() || xs[i + 1].sub(x) >= *delta;
        if !(left && right) {
            continue;
        }
        let exact_below = i > 0 || prefix.complete_below.is_some();
        let exact_above = i + 1 < xs.len()
            || prefix.complete_below.as_ref().is_some_and(|b| *b >= x.add(delta));
        if !(exact_below && exact_above) {
            provisional.push(x.clone());
        }
        set.push(x.clone());
    }
    Ok(Isolated {
        set: SetPrefix { elements: set, complete_below: prefix.complete_below.clone() },
        provisional,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Gaps grow (second-half maximum above twice the first-half maximum)
    /// while every tested `D(delta)` stays non-empty.
    Growth {
        first_half_max: ModelElement,
        second_half_max: ModelElement,
        tested: Vec<ModelElement>,
    },
    /// A run of strictly shrinking gaps towards one end of the prefix, ending
    /// below the accumulation scale: ever more points in ever smaller
    /// intervals around `near`.
    Accumulation {
        near: ModelElement,
        gaps: Vec<ModelElement>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "certificate")]
pub enum Verdict {
    ConsistentWithStrong,
    WitnessAgainstStrong(Certificate),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrengthReport {
    pub delta_finite: bool,
    /// Smallest tested radius with `D(delta)` empty.
    pub sparsity: Option<ModelElement>,
    pub accumulation: bool,
    pub period: Option<(usize, usize)>,
    pub verdict: Verdict,
}

pub enum ScreenInput {
    Prefix(SetPrefix),
    Formula(Formula, Signature),
}

/// Shortest run of shrinking gaps that counts as accumulation.
pub const ACCUMULATION_RUN: usize = 8;
/// Gaps must fall to this scale or below.
pub fn accumulation_gap() -> ModelElement {
    ModelElement::rat(rat(1, 256))
}
/// Elements generated for formula inputs.
pub const FORMULA_PREFIX_LEN: usize = 64;

/// Radii `2^j` and `3 * 2^(j-1)` for `j` in `-20..=40`, increasing.
fn radius_ladder() -> Vec<ModelElement> {
    let mut out = Vec::new();
    for j in -20i32..=40 {
        let p = if j >= 0 { rat(1i64 << j, 1) } else { rat(1, 1i64 << -j) };
        out.push(ModelElement::rat(p.clone()));
        out.push(ModelElement::rat(p * rat(3, 2)));
    }
    out.sort();
    out.dedup();
    out
}

fn shrinking_run(gaps: &[ModelElement]) -> usize {
    let mut n = 1;
    while n < gaps.len() && gaps[n] > gaps[n - 1] {
        n += 1;
    }
    n
}

fn accumulation(prefix: &SetPrefix, gaps: &[ModelElement]) -> Option<Certificate> {
    let small = accumulation_gap();
    // towards the first element
    let n = shrinking_run(gaps);
    if n >= ACCUMULATION_RUN && gaps[0] <= small {
        return Some(Certificate::Accumulation {
            near: prefix.elements[0].clone(),
            gaps: gaps[..n].to_vec(),
        });
    }
    let rev: Vec<ModelElement> = gaps.iter().rev().cloned().collect();
    let n = shrinking_run(&rev);
    if n >= ACCUMULATION_RUN && rev[0] <= small {
        return Some(Certificate::Accumulation {
            near: prefix.elements.last().unwrap().clone(),
            gaps: rev[..n].to_vec(),
        });
    }
    None
}

fn screen_prefix(prefix: &SetPrefix) -> Result<StrengthReport> {
    let dd = delta(prefix)?;
    let gaps = &dd.diffs;
    let (first, second) = gaps.split_at(gaps.len() / 2);
    let first_max = first.iter().max().cloned().unwrap_or_else(|| gaps[0].clone());
    let second_max = second.iter().max().cloned().unwrap_or_else(|| gaps[0].clone());
    let limit = first_max.add(&first_max);
    let mut tested = Vec::new();
    let mut sparsity = None;
    for r in radius_ladder().into_iter().filter(|r| *r <= limit) {
        let iso = d_delta(prefix, &r)?;
        let interior = iso.set.elements.iter().filter(|x| !iso.provisional.contains(x)).count();
        tested.push(r.clone());
        if interior == 0 {
            sparsity = Some(r);
            break;
        }
    }
    let acc = accumulation(prefix, gaps);
    let period = eventual_period_of(gaps);
    let verdict = if let Some(c) = acc.clone() {
        Verdict::WitnessAgainstStrong(c)
    } else if dd.growth_flag && sparsity.is_none() {
        Verdict::WitnessAgainstStrong(Certificate::Growth {
            first_half_max: first_max,
            second_half_max: second_max,
            tested,
        })
    } else if period.is_some() && sparsity.is_some() {
        Verdict::ConsistentWithStrong
    } else {
        Verdict::Inconclusive
    };
    Ok(StrengthReport {
        delta_finite: dd.bounded_flag,
        sparsity,
        accumulation: acc.is_some(),
        period,
        verdict,
    })
}

pub fn strength_screen(input: &ScreenInput) -> Result<StrengthReport> {
    match input {
        ScreenInput::Prefix(p) => screen_prefix(p),
        ScreenInput::Formula(f, Signature::Presburger) => {
            let d = decompose_presburger(f)?;
            let elements = d.first(FORMULA_PREFIX_LEN);
            let below = elements.last().cloned();
            let mut p = SetPrefix::new(elements)?;
            p.complete_below = below;
            screen_prefix(&p)
        }
        ScreenInput::Formula(_, sig) => Err(Error::Input(format!(
            "formula screens are available for the Presburger signature; supply a prefix for {sig}"
        ))),
    }
}

impl Certificate {
    /// Re-checks the certificate against `prefix`.
    pub fn check(&self, prefix: &SetPrefix) -> bool {
        match self {
            Certificate::Growth { first_half_max, second_half_max, tested } => {
                second_half_max > &first_half_max.add(first_half_max)
                    && tested.iter().all(|r| {
                        d_delta(prefix, r).is_ok_and(|iso| iso.set.elements.iter().any(|x| !iso.provisional.contains(x)))
                    })
            }
            Certificate::Accumulation { near, gaps } => {
                gaps.len() >= ACCUMULATION_RUN
                    && gaps.windows(2).all(|w| w[0] < w[1])
                    && gaps[0] <= accumulation_gap()
                    && prefix.elements.contains(near)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn isolated_points() {
        let p = SetPrefix::from_ints((0..=10).map(|i| 2 * i)).unwrap();
        assert_eq!(d_delta(&p, &ModelElement::int(1)).unwrap().set.len(), 11);
        assert!(d_delta(&p, &ModelElement::int(3)).unwrap().set.is_empty());
        let pw = SetPrefix::from_ints((0..=20).map(|k| 1i64 << k)).unwrap();
        assert!(!d_delta(&pw, &ModelElement::int(1 << 18)).unwrap().set.is_empty());
    }

    #[test]
    fn radius_monotone() {
        let p = SetPrefix::from_ints([0, 1, 3, 6, 10, 15, 21]).unwrap();
        let ladder = radius_ladder();
        for w in ladder.windows(2).take(60) {
            let a = d_delta(&p, &w[0]).unwrap().set.elements;
            let b = d_delta(&p, &w[1]).unwrap().set.elements;
            assert!(b.iter().all(|x| a.contains(x)));
        }
    }

    #[test]
    fn evens_are_consistent() {
        let f = parse("x > 0 & Z(x/2)", Signature::Presburger).unwrap();
        let r = strength_screen(&ScreenInput::Formula(f, Signature::Presburger)).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentWithStrong);
        assert_eq!(r.sparsity, Some(ModelElement::int(3)));
        assert_eq!(r.period, Some((0, 1)));
    }

    #[test]
    fn powers_of_two_grow() {
        let p = SetPrefix::from_ints((0..=20).map(|k| 1i64 << k)).unwrap();
        let r = strength_screen(&ScreenInput::Prefix(p.clone())).unwrap();
        match &r.verdict {
            Verdict::WitnessAgainstStrong(c @ Certificate::Growth { .. }) => assert!(c.check(&p)),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn reciprocals_accumulate() {
        let mut xs: Vec<ModelElement> = (2..=50).map(|k| ModelElement::rat(rat(1, k))).collect();
        xs.sort();
        let p = SetPrefix::new(xs).unwrap();
        let r = strength_screen(&ScreenInput::Prefix(p.clone())).unwrap();
        match &r.verdict {
            Verdict::WitnessAgainstStrong(c @ Certificate::Accumulation { near, .. }) => {
                assert!(c.check(&p));
                assert_eq!(*near, ModelElement::rat(rat(1, 50)));
            }
            v => panic!("{v:?}"),
        }
    }
}
