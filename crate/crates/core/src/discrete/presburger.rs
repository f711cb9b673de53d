//! Exact decomposition of unary Presburger-definable sets.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::period::{APDecomposition, Progression};
use crate::error::{Error, Result};
use crate::model::ModelElement;
use crate::qe::lit::{Dnf, Lit};
use crate::qe::qe_dnf;
use crate::scalar::{ceil_int, lcm};
use crate::syntax::{Formula, Signature};

fn holds(d: &Dnf, var: &str, x: &BigInt) -> Result<bool> {
    let asg = [(var.to_string(), ModelElement::rat(x.clone().into()))].into();
    for c in d {
        let mut all = true;
        for l in c {
            if !l.eval(&asg)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Period and threshold: beyond `[-n0, n0]` membership of `x` depends only
/// on `x` modulo the period.
fn period_and_threshold(d: &Dnf, var: &str) -> (BigInt, BigInt) {
    let mut period = BigInt::one();
    let mut n0 = BigInt::one();
    for l in d.iter().flatten() {
        let t = l.term();
        let a = t.coeff(var);
        match l {
            Lit::Z(..) => period = lcm(&period, a.denom()),
            _ => {
                if !a.is_zero() {
                    let b = ceil_int(&(&t.constant / &a).abs()) + 1;
                    n0 = n0.max(b);
                }
            }
        }
    }
    (period, n0)
}

/// Finite part below a threshold plus one progression per residue class
/// above it. The satisfying set must be bounded below.
pub fn decompose_presburger(f: &Formula) -> Result<APDecomposition> {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    let var = match free.as_slice() {
        [v] => v.clone(),
        _ => return Err(Error::Input(format!("expected exactly one free variable, found {free:?}"))),
    };
    let d = qe_dnf(f, Signature::Presburger)?;
    let (period, n0) = period_and_threshold(&d, &var);
    let mut x = -&n0 - &period;
    while x < -&n0 {
        if holds(&d, &var, &x)? {
            return Err(Error::Input(format!(
                "the set defined by {f} is unbounded below; analyze its negative part separately"
            )));
        }
        x += 1;
    }
    let mut finite = Vec::new();
    let mut x = -&n0;
    while x <= n0 {
        if holds(&d, &var, &x)? {
            finite.push(x.clone());
        }
        x += 1;
    }
    let mut progressions = Vec::new();
    let mut r = &n0 + 1;
    while r <= &n0 + &period {
        if holds(&d, &var, &r)? {
            // pull the offset down while the class keeps going
            let mut offset = r.clone();
            while let Some(pos) = finite.iter().position(|y| *y == &offset - &period) {
                offset -= &period;
                finite.remove(pos);
            }
            progressions.push(offset);
        }
        r += 1;
    }
    progressions.sort();
    let step = ModelElement::rat(period.clone().into());
    let progressions = progressions
        .into_iter()
        .map(|o| Progression::new(ModelElement::rat(o.into()), step.clone()))
        .collect();
    let finite = finite.into_iter().map(|x| ModelElement::rat(x.into())).collect();
    APDecomposition::from_parts(finite, progressions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_qf, OracleModel};
    use crate::parse::parse;

    fn dec(text: &str) -> Result<APDecomposition> {
        decompose_presburger(&parse(text, Signature::Presburger).unwrap())
    }

    fn ints(xs: &[i64]) -> Vec<ModelElement> {
        xs.iter().map(|x| ModelElement::int(*x)).collect()
    }

    #[test]
    fn positive_evens() {
        let d = dec("x > 0 & Z(x/2)").unwrap();
        assert!(d.finite_part.is_empty());
        assert_eq!(d.progressions, vec![Progression::new(ModelElement::int(2), ModelElement::int(2))]);
    }

    #[test]
    fn multiples_of_three_or_five() {
        let d = dec("x > 0 & (Z(x/3) | Z(x/5))").unwrap();
        let offsets: Vec<ModelElement> = d.progressions.iter().map(|p| p.offset.clone()).collect();
        assert_eq!(offsets, ints(&[3, 5, 6, 9, 10, 12, 15]));
        assert!(d.progressions.iter().all(|p| p.step == ModelElement::int(15)));
        assert!(d.finite_part.is_empty());
    }

    #[test]
    fn finite_sets() {
        let d = dec("x = 4 | x = 7").unwrap();
        assert_eq!(d.finite_part, ints(&[4, 7]));
        assert!(d.progressions.is_empty());
    }

    #[test]
    fn unbounded_below_is_rejected() {
        assert!(dec("x < 3").is_err());
        assert!(dec("x < y").is_err());
    }

    #[test]
    fn matches_brute_force() {
        let text = "E y. x = 3 * y + 1 & y > 2 | x = 5";
        let f = parse(text, Signature::Presburger).unwrap();
        let d = decompose_presburger(&f).unwrap();
        let got = d.enumerate_upto(&ModelElement::int(300));
        let body = qe_dnf(&f, Signature::Presburger).unwrap();
        let g = crate::qe::lit::dnf_to_formula(&body);
        let m = OracleModel::for_signature(Signature::Presburger);
        let want: Vec<ModelElement> = (-20..=300)
            .map(ModelElement::int)
            .filter(|x| eval_qf(&g, &[("x".to_string(), x.clone())].into(), &m).unwrap())
            .collect();
        assert_eq!(got, want);
    }
}
