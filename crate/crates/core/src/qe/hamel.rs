//! Elimination with projections onto finitely many Hamel basis lines. The
//! variable is split into its components `x_1 .. x_n` along the basis and a
//! remainder `x_{n+1}` in the common kernel; components are eliminated one at
//! a time, last first.

use super::fm::{fm_conj, split_bounds, substitute_conj};
use super::lit::{simplify_dnf, Conj, Dnf, Lit};
use crate::error::{Error, Result};
use crate::normal::NormalTerm;

pub fn component_name(r: u32) -> String {
    format!("_h{r}")
}

fn component_index(v: &str) -> Option<u32> {
    v.strip_prefix("_h").and_then(|s| s.parse().ok())
}

/// `pi_i(t)` where components are projected by index and everything else by
/// the usual rules.
pub fn proj_split(i: u32, t: &NormalTerm) -> NormalTerm {
    let mut params = t.clone();
    let mut comps = NormalTerm::zero();
    for (v, c) in &t.linear_part {
        if let Some(r) = component_index(v) {
            params.linear_part.remove(v);
            if r == i {
                comps.linear_part.insert(v.clone(), c.clone());
            }
        }
    }
    NormalTerm::proj_of(i, &params).add(&comps)
}

/// Rewrites `var` and its projections in terms of the split components.
pub fn split_var(var: &str, t: &NormalTerm, n: u32) -> Result<NormalTerm> {
    if t.floor_parts.keys().any(|k| k.contains_var(var)) {
        return Err(Error::Engine(format!("integer part of {var} in {t}")));
    }
    let a = t.coeff(var);
    let mut out = t.without(var);
    for r in 1..=n + 1 {
        out = out.add(&NormalTerm::var(&component_name(r)).scale(&a));
    }
    for ((i, v), c) in &t.proj_parts {
        if v != var {
            continue;
        }
        if *i == 0 || *i > n {
            return Err(Error::Engine(format!("projection index {i} out of range 1..{n}")));
        }
        out.proj_parts.remove(&(*i, v.clone()));
        out = out.add(&NormalTerm::var(&component_name(*i)).scale(c));
    }
    Ok(out)
}

/// Membership of a value in the range of component `r`.
pub fn membership(r: u32, n: u32, value: &NormalTerm) -> Conj {
    if r <= n {
        vec![Lit::eq(proj_split(r, value).sub(value))]
    } else {
        (1..=n).map(|i| Lit::eq(proj_split(i, value))).collect()
    }
}

/// Eliminates component `r` from a conjunction.
pub fn component_step(r: u32, n: u32, conj: &[Lit]) -> Result<Dnf> {
    let name = component_name(r);
    let b = split_bounds(&name, conj)?;
    if let Some(value) = b.pinned.first() {
        let mut c = substitute_conj(conj, &name, value);
        c.extend(membership(r, n, value));
        return Ok(simplify_dnf(vec![c]));
    }
    // every component range is dense in the line
    fm_conj(&name, conj)
}

pub fn split_conj(var: &str, conj: &[Lit], n: u32) -> Result<Conj> {
    conj.iter()
        .map(|l| -> Result<Lit> {
            let t = split_var(var, l.term(), n)?;
            Ok(l.map_term(|_| t.clone()))
        })
        .collect()
}

pub fn hamel_conj(var: &str, conj: &[Lit], n: u32) -> Result<Dnf> {
    let mut d: Dnf = simplify_dnf(vec![split_conj(var, conj, n)?]);
    for r in (1..=n + 1).rev() {
        let mut next = Vec::new();
        for c in &d {
            next.extend(component_step(r, n, c)?);
        }
        d = simplify_dnf(next);
    }
    Ok(d)
}
