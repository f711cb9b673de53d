//! First-order syntax over the ordered-group signatures.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The theories the workbench knows how to handle. Each one fixes which
/// term and atom constructors are legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signature {
    /// Divisible ordered Abelian groups: `+ < 0 1` and rational scaling.
    Doag,
    /// Presburger arithmetic over the integers, with `Z(t/d)` for divisibility.
    Presburger,
    /// The reals with `Z` and the integer part function.
    T0Mixed,
    /// The reals with the rationals as a distinguished subgroup `Q`.
    T1Coset,
    /// The reals with `Z`, `Q` and the integer part function.
    TFull,
    /// The reals with `n` Hamel-basis projections `pi1..pin`.
    TnHamel(u32),
}

impl Signature {
    pub fn has_floor(self) -> bool {
        matches!(self, Signature::T0Mixed | Signature::TFull)
    }

    pub fn has_z(self) -> bool {
        matches!(
            self,
            Signature::Presburger | Signature::T0Mixed | Signature::TFull
        )
    }

    pub fn has_q(self) -> bool {
        matches!(self, Signature::T1Coset | Signature::TFull)
    }

    /// Number of projection symbols.
    pub fn projections(self) -> u32 {
        match self {
            Signature::TnHamel(n) => n,
            _ => 0,
        }
    }

    /// Whether the intended domain is densely ordered.
    pub fn is_dense(self) -> bool {
        !matches!(self, Signature::Presburger)
    }

    pub fn flag(self) -> String {
        match self {
            Signature::Doag => "doag".into(),
            Signature::Presburger => "pres".into(),
            Signature::T0Mixed => "t0".into(),
            Signature::T1Coset => "t1".into(),
            Signature::TFull => "t".into(),
            Signature::TnHamel(n) => format!("tn:{n}"),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.flag())
    }
}

impl Serialize for Signature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.flag())
    }
}

impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doag" => Ok(Signature::Doag),
            "pres" | "presburger" => Ok(Signature::Presburger),
            "t0" => Ok(Signature::T0Mixed),
            "t1" => Ok(Signature::T1Coset),
            "t" => Ok(Signature::TFull),
            other => {
                let n = other
                    .strip_prefix("tn:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| Error::Input(format!("unknown theory `{other}`")))?;
                Ok(Signature::TnHamel(n))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Scalar),
    Add(Box<Term>, Box<Term>),
    Scale(Scalar, Box<Term>),
    Floor(Box<Term>),
    /// Projection `pi<i>`, with `i` starting at 1.
    Proj(u32, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(c: Scalar) -> Term {
        Term::Const(c)
    }

    pub fn zero() -> Term {
        Term::Const(Scalar::zero())
    }

    pub fn one() -> Term {
        Term::Const(Scalar::one())
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::add(a, Term::neg(b))
    }

    pub fn neg(a: Term) -> Term {
        Term::Scale(-Scalar::one(), Box::new(a))
    }

    pub fn scale(c: Scalar, a: Term) -> Term {
        Term::Scale(c, Box::new(a))
    }

    pub fn floor(a: Term) -> Term {
        Term::Floor(Box::new(a))
    }

    pub fn proj(i: u32, a: Term) -> Term {
        Term::Proj(i, Box::new(a))
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Add(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
            Term::Scale(_, a) | Term::Floor(a) | Term::Proj(_, a) => a.vars_into(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::Add(a, b) => a.contains_var(v) || b.contains_var(v),
            Term::Scale(_, a) | Term::Floor(a) | Term::Proj(_, a) => a.contains_var(v),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Add(a, b) => 1 + a.depth().max(b.depth()),
            Term::Scale(_, a) | Term::Floor(a) | Term::Proj(_, a) => 1 + a.depth(),
        }
    }

    pub fn substitute(&self, v: &str, t: &Term) -> Term {
        match self {
            Term::Var(w) if w == v => t.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.substitute(v, t), b.substitute(v, t)),
            Term::Scale(c, a) => Term::scale(c.clone(), a.substitute(v, t)),
            Term::Floor(a) => Term::floor(a.substitute(v, t)),
            Term::Proj(i, a) => Term::proj(*i, a.substitute(v, t)),
        }
    }

    pub fn validate(&self, sig: Signature) -> Result<()> {
        match self {
            Term::Var(_) | Term::Const(_) => Ok(()),
            Term::Add(a, b) => {
                a.validate(sig)?;
                b.validate(sig)
            }
            Term::Scale(_, a) => a.validate(sig),
            Term::Floor(a) => {
                if !sig.has_floor() {
                    return Err(sig_error(sig, "integer part is not in the signature", self));
                }
                a.validate(sig)
            }
            Term::Proj(i, a) => {
                if *i == 0 || *i > sig.projections() {
                    return Err(sig_error(
                        sig,
                        &format!("projection index {i} out of range"),
                        self,
                    ));
                }
                a.validate(sig)
            }
        }
    }
}

fn sig_error(sig: Signature, msg: &str, sub: &dyn fmt::Display) -> Error {
    Error::Signature {
        sig,
        msg: msg.to_string(),
        subterm: sub.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Lt(Term, Term),
    Eq(Term, Term),
    InZ(Term),
    InQ(Term),
}

impl Atom {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Lt(a, b) | Atom::Eq(a, b) => vec![a, b],
            Atom::InZ(a) | Atom::InQ(a) => vec![a],
        }
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Lt(a, b) => Atom::Lt(f(a), f(b)),
            Atom::Eq(a, b) => Atom::Eq(f(a), f(b)),
            Atom::InZ(a) => Atom::InZ(f(a)),
            Atom::InQ(a) => Atom::InQ(f(a)),
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        self.terms().iter().any(|t| t.contains_var(v))
    }

    pub fn validate(&self, sig: Signature) -> Result<()> {
        match self {
            Atom::InZ(_) if !sig.has_z() => {
                return Err(sig_error(sig, "predicate Z is not in the signature", self))
            }
            Atom::InQ(_) if !sig.has_q() => {
                return Err(sig_error(sig, "predicate Q is not in the signature", self))
            }
            _ => {}
        }
        self.terms().into_iter().try_for_each(|t| t.validate(sig))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bot,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Lt(a, b))
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Eq(a, b))
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::or(vec![Formula::lt(a.clone(), b.clone()), Formula::eq(a, b)])
    }

    pub fn in_z(a: Term) -> Formula {
        Formula::Atom(Atom::InZ(a))
    }

    pub fn in_q(a: Term) -> Formula {
        Formula::Atom(Atom::InQ(a))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; an empty list is `Top` and a singleton is returned as is.
    pub fn and(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Top,
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction; an empty list is `Bot` and a singleton is returned as is.
    pub fn or(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::Bot,
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![Formula::not(a), b])
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Atom(a) => {
                for t in a.terms() {
                    for v in t.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Not(f) => f.free_vars_into(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.free_vars_into(bound, out))
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.free_vars_into(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_atoms(&mut |a| a.terms().iter().for_each(|t| t.vars_into(&mut out)));
        self.walk_binders(&mut |v| {
            out.insert(v.to_string());
        });
        out
    }

    fn walk_binders(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Not(g) => g.walk_binders(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.walk_binders(f)),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                f(v);
                g.walk_binders(f)
            }
            _ => {}
        }
    }

    pub fn walk_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.walk_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.walk_atoms(f)),
            Formula::Top | Formula::Bot => {}
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(g.map_atoms(f))),
            Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(g.map_atoms(f))),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => true,
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| g.is_quantifier_free()),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => 0,
            Formula::Not(g) => g.quantifier_count(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().map(|g| g.quantifier_count()).sum(),
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.quantifier_count(),
        }
    }

    pub fn validate(&self, sig: Signature) -> Result<()> {
        let mut res = Ok(());
        self.walk_atoms(&mut |a| {
            if res.is_ok() {
                res = a.validate(sig);
            }
        });
        res
    }

    /// Capture-avoiding substitution of `t` for the free variable `v`.
    pub fn substitute(&self, v: &str, t: &Term) -> Formula {
        let tvars = t.vars();
        self.subst_inner(v, t, &tvars)
    }

    /// Substitution that also checks `t` against `sig`.
    pub fn substitute_checked(&self, v: &str, t: &Term, sig: Signature) -> Result<Formula> {
        t.validate(sig)?;
        Ok(self.substitute(v, t))
    }

    fn subst_inner(&self, v: &str, t: &Term, tvars: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Atom(a) => Formula::Atom(a.map_terms(|s| s.substitute(v, t))),
            Formula::Not(g) => Formula::not(g.subst_inner(v, t, tvars)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.subst_inner(v, t, tvars)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.subst_inner(v, t, tvars)).collect()),
            Formula::Exists(w, g) | Formula::Forall(w, g) => {
                if w == v || !g.free_vars().contains(v) {
                    return self.clone();
                }
                let (w2, g2) = if tvars.contains(w) {
                    let mut avoid = g.all_vars();
                    avoid.extend(tvars.iter().cloned());
                    avoid.insert(v.to_string());
                    let fresh = fresh_name(w, &avoid);
                    let renamed = g.substitute(w, &Term::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (w.clone(), (**g).clone())
                };
                let body = Box::new(g2.subst_inner(v, t, tvars));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(w2, body)
                } else {
                    Formula::Forall(w2, body)
                }
            }
        }
    }

    /// Renames bound variables to a canonical scheme so that alpha-equivalent
    /// formulas become structurally equal.
    pub fn canonical_bound_names(&self) -> Formula {
        self.canon(0)
    }

    fn canon(&self, depth: usize) -> Formula {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => self.clone(),
            Formula::Not(g) => Formula::not(g.canon(depth)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.canon(depth)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.canon(depth)).collect()),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                // `_` prefixes cannot be written in the surface grammar, so no clash.
                let name = format!("_b{depth}");
                let body = Box::new(g.substitute(v, &Term::Var(name.clone())).canon(depth + 1));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(name, body)
                } else {
                    Formula::Forall(name, body)
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical_bound_names() == other.canonical_bound_names()
    }
}

/// `base` with a numeric suffix appended until it avoids `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}
