//! Symbolic constants with side assumptions. A residual atom over the
//! constants is decided when the assumptions decide it and is kept otherwise.

use std::collections::BTreeSet;

use super::lit::{dnf, dnf_to_formula, q_span_clash, Conj, Dnf, Lit, Rel, Simplified};
use crate::normal::NormalTerm;
use super::qe_dnf;
use crate::error::{Error, Result};
use crate::syntax::{Formula, Signature};

#[derive(Debug, Clone, Default)]
pub struct Assumptions {
    pub constants: Vec<String>,
    facts: BTreeSet<Lit>,
}

fn canonical(l: &Lit) -> Option<Lit> {
    match l.simplify() {
        Simplified::Lit(l) => Some(l),
        _ => None,
    }
}

impl Assumptions {
    /// Each fact must be a conjunction of literals over the constants.
    pub fn new(constants: Vec<String>, facts: &[Formula]) -> Result<Assumptions> {
        let known: BTreeSet<&String> = constants.iter().collect();
        let mut set = BTreeSet::new();
        for f in facts {
            if let Some(v) = f.free_vars().into_iter().find(|v| !known.contains(v)) {
                return Err(Error::Input(format!("assumption {f} mentions {v}, which is not a constant")));
            }
            let d = dnf(f);
            match d.as_slice() {
                [] => return Err(Error::Input(format!("assumption {f} is unsatisfiable"))),
                [c] => set.extend(c.iter().cloned()),
                _ => return Err(Error::Input(format!("assumption {f} is not a conjunction of literals"))),
            }
        }
        Ok(Assumptions { constants, facts: set })
    }

    pub fn facts(&self) -> impl Iterator<Item = &Lit> {
        self.facts.iter()
    }

    fn has(&self, l: Lit) -> bool {
        canonical(&l).is_some_and(|l| self.facts.contains(&l))
    }

    /// Truth value of a literal under the assumptions, when they settle it.
    pub fn decide(&self, lit: &Lit) -> Option<bool> {
        let lit = match lit.simplify() {
            Simplified::True => return Some(true),
            Simplified::False => return Some(false),
            Simplified::Lit(l) => l,
        };
        if self.facts.contains(&lit) {
            return Some(true);
        }
        match &lit {
            Lit::Z(p, t) => self.has(Lit::Z(!p, t.clone())).then_some(false),
            Lit::Q(p, t) => self.has(Lit::Q(!p, t.clone())).then_some(false),
            Lit::Cmp(Rel::Lt, t) => {
                if self.has(Lit::lt(t.neg())) || self.has(Lit::le(t.neg())) || self.has(Lit::eq(t.clone())) {
                    Some(false)
                } else {
                    None
                }
            }
            Lit::Cmp(Rel::Le, t) => {
                if self.has(Lit::lt(t.clone())) || self.has(Lit::eq(t.clone())) {
                    Some(true)
                } else if self.has(Lit::lt(t.neg())) {
                    Some(false)
                } else {
                    None
                }
            }
            Lit::Cmp(Rel::Eq, t) => {
                let apart = self.has(Lit::lt(t.clone()))
                    || self.has(Lit::lt(t.neg()))
                    || self.has(Lit::Q(false, t.clone()));
                apart.then_some(false)
            }
        }
    }

    /// Folds every literal the assumptions decide.
    pub fn reduce(&self, d: &Dnf) -> Dnf {
        let mut out = Vec::new();
        'conj: for c in d {
            let mut kept: Conj = Vec::new();
            for l in c {
                match self.decide(l) {
                    Some(true) => {}
                    Some(false) => continue 'conj,
                    None => kept.push(l.clone()),
                }
            }
            let pos: Vec<&NormalTerm> = self.facts.iter().filter_map(|f| match f {
                Lit::Q(true, t) => Some(t),
                _ => None,
            }).collect();
            let neg: Vec<&NormalTerm> = self.facts.iter().filter_map(|f| match f {
                Lit::Q(false, t) => Some(t),
                _ => None,
            }).collect();
            if q_span_clash(&kept, &pos, &neg) {
                continue;
            }
            if kept.is_empty() {
                return vec![vec![]];
            }
            out.push(kept);
        }
        out
    }
}

/// Quantifier elimination followed by reduction under the assumptions.
pub fn qe_with_assumptions(f: &Formula, sig: Signature, asm: &Assumptions) -> Result<Formula> {
    Ok(dnf_to_formula(&asm.reduce(&qe_dnf(f, sig)?)))
}

/// Truth value of a formula whose free variables are all constants.
pub fn decide_with_assumptions(f: &Formula, sig: Signature, asm: &Assumptions) -> Result<bool> {
    let extra: Vec<String> = f
        .free_vars()
        .into_iter()
        .filter(|v| !asm.constants.contains(v))
        .collect();
    if !extra.is_empty() {
        return Err(Error::FreeVariables(extra));
    }
    let d = asm.reduce(&qe_dnf(f, sig)?);
    if d.is_empty() {
        return Ok(false);
    }
    if d.iter().any(|c| c.is_empty()) {
        return Ok(true);
    }
    let atom = d[0][0].to_formula();
    Err(Error::Undecided(format!("{atom}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn asm() -> Assumptions {
        let sig = Signature::T1Coset;
        let facts = ["~Q(c0)", "~Q(c1)", "~Q(c0 - c1)", "c0 < c1"].map(|s| parse(s, sig).unwrap());
        Assumptions::new(vec!["c0".into(), "c1".into()], &facts).unwrap()
    }

    #[test]
    fn distinct_cosets_do_not_meet() {
        let sig = Signature::T1Coset;
        let f = parse("E x. Q(x + c0) & Q(x + c1)", sig).unwrap();
        assert!(!decide_with_assumptions(&f, sig, &asm()).unwrap());
        let g = parse("E x. Q(x + c0) & ~Q(x + c1) & c0 < x", sig).unwrap();
        assert!(decide_with_assumptions(&g, sig, &asm()).unwrap());
    }

    #[test]
    fn undecided_atoms_are_reported() {
        let sig = Signature::T1Coset;
        let f = parse("E x. Q(x + c0) & Q(x + 2 * c1)", sig).unwrap();
        assert!(matches!(decide_with_assumptions(&f, sig, &asm()), Err(Error::Undecided(_))));
    }
}
