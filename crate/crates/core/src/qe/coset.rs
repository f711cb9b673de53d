//! Elimination with a predicate for a dense, codense subgroup (the rationals
//! inside the line).

use super::fm::{combine, split_bounds, substitute_conj, Bound};
use super::lit::{simplify_dnf, Conj, Dnf, Lit};
use crate::error::{Error, Result};
use crate::normal::NormalTerm;

/// `Q(a*var + s)` read as `var + s/a` in `Q`; returns `s/a`.
fn coset_shift(var: &str, t: &NormalTerm) -> NormalTerm {
    let a = t.coeff(var);
    t.without(var).scale(&a.recip())
}

/// Positive and negative coset shifts of the membership literals on `var`.
pub fn coset_shifts(var: &str, membership: &[Lit]) -> Result<(Vec<NormalTerm>, Vec<NormalTerm>)> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for l in membership {
        match l {
            Lit::Q(true, t) => pos.push(coset_shift(var, t)),
            Lit::Q(false, t) => neg.push(coset_shift(var, t)),
            _ => {
                return Err(Error::Engine(format!(
                    "{} is not a coset literal",
                    l.to_formula()
                )))
            }
        }
    }
    Ok((pos, neg))
}

/// Cases where `var` sits on a non-strict lower bound.
fn pinned_cases(var: &str, conj: &[Lit], lower: &[Bound]) -> Dnf {
    lower
        .iter()
        .filter(|b| !b.strict)
        .map(|b| substitute_conj(conj, var, &b.value))
        .collect()
}

pub fn coset_conj(var: &str, conj: &[Lit]) -> Result<Dnf> {
    let b = split_bounds(var, conj)?;
    if let Some(value) = b.pinned.first() {
        return Ok(simplify_dnf(vec![substitute_conj(conj, var, value)]));
    }
    let (pos, neg) = coset_shifts(var, &b.membership)?;
    if pos.is_empty() && neg.is_empty() {
        let mut out = b.rest;
        out.extend(combine(&b.lower, &b.upper, false));
        return Ok(simplify_dnf(vec![out]));
    }
    let mut interior: Conj = b.rest.clone();
    if let Some(anchor) = pos.first() {
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                interior.push(Lit::Q(true, pos[i].sub(&pos[j])));
            }
        }
        for s in &neg {
            interior.push(Lit::Q(false, s.sub(anchor)));
        }
    }
    interior.extend(combine(&b.lower, &b.upper, true));
    let mut out = vec![interior];
    out.extend(pinned_cases(var, conj, &b.lower));
    Ok(simplify_dnf(out))
}
