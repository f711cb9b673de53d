//! Canonical linear form of terms: a sum of scaled integer parts, scaled
//! projections of variables, scaled variables and a constant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{floor_int, is_integer, Scalar};
use crate::syntax::{Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalTerm {
    /// `coefficient * floor(argument)`; arguments are themselves normal.
    pub floor_parts: BTreeMap<NormalTerm, Scalar>,
    /// `coefficient * pi<index>(variable)`.
    pub proj_parts: BTreeMap<(u32, String), Scalar>,
    pub linear_part: BTreeMap<String, Scalar>,
    pub constant: Scalar,
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(key);
    match entry {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl Default for NormalTerm {
    fn default() -> Self {
        NormalTerm::zero()
    }
}

impl NormalTerm {
    pub fn zero() -> NormalTerm {
        NormalTerm {
            floor_parts: BTreeMap::new(),
            proj_parts: BTreeMap::new(),
            linear_part: BTreeMap::new(),
            constant: Scalar::zero(),
        }
    }

    pub fn constant(c: Scalar) -> NormalTerm {
        NormalTerm {
            constant: c,
            ..NormalTerm::zero()
        }
    }

    pub fn var(v: &str) -> NormalTerm {
        let mut t = NormalTerm::zero();
        t.linear_part.insert(v.to_string(), Scalar::one());
        t
    }

    pub fn is_zero(&self) -> bool {
        self.floor_parts.is_empty()
            && self.proj_parts.is_empty()
            && self.linear_part.is_empty()
            && self.constant.is_zero()
    }

    /// The value when the term has no variable, projection or integer part.
    pub fn as_constant(&self) -> Option<&Scalar> {
        if self.floor_parts.is_empty() && self.proj_parts.is_empty() && self.linear_part.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }

    pub fn add(&self, other: &NormalTerm) -> NormalTerm {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &NormalTerm) {
        for (k, c) in &other.floor_parts {
            add_into(&mut self.floor_parts, k.clone(), c.clone());
        }
        for (k, c) in &other.proj_parts {
            add_into(&mut self.proj_parts, k.clone(), c.clone());
        }
        for (k, c) in &other.linear_part {
            add_into(&mut self.linear_part, k.clone(), c.clone());
        }
        self.constant += &other.constant;
    }

    pub fn sub(&self, other: &NormalTerm) -> NormalTerm {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn neg(&self) -> NormalTerm {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> NormalTerm {
        if c.is_zero() {
            return NormalTerm::zero();
        }
        NormalTerm {
            floor_parts: self.floor_parts.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            proj_parts: self.proj_parts.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            linear_part: self.linear_part.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn plus_constant(&self, c: &Scalar) -> NormalTerm {
        let mut out = self.clone();
        out.constant += c;
        out
    }

    /// `floor(arg)` in normal form. Integer constants and integer multiples of
    /// integer parts are pulled out of the bracket; a purely fractional
    /// constant remainder floors to zero.
    pub fn floor_of(arg: &NormalTerm) -> NormalTerm {
        let mut pulled = NormalTerm::zero();
        let mut rest = NormalTerm::zero();
        let whole = floor_int(&arg.constant);
        pulled.constant = Scalar::from_integer(whole.clone());
        rest.constant = &arg.constant - Scalar::from_integer(whole);
        for (k, c) in &arg.floor_parts {
            if is_integer(c) {
                add_into(&mut pulled.floor_parts, k.clone(), c.clone());
            } else {
                add_into(&mut rest.floor_parts, k.clone(), c.clone());
            }
        }
        rest.proj_parts = arg.proj_parts.clone();
        rest.linear_part = arg.linear_part.clone();
        if rest.as_constant().is_none() {
            add_into(&mut pulled.floor_parts, rest, Scalar::one());
        }
        pulled
    }

    /// `pi<i>(t)`. Projections are additive, commute with rational scaling,
    /// are idempotent, kill the other projections and vanish on rationals
    /// (the unit is not one of the projected basis elements).
    pub fn proj_of(i: u32, t: &NormalTerm) -> NormalTerm {
        let mut out = NormalTerm::zero();
        for (v, c) in &t.linear_part {
            add_into(&mut out.proj_parts, (i, v.clone()), c.clone());
        }
        for ((j, v), c) in &t.proj_parts {
            if *j == i {
                add_into(&mut out.proj_parts, (i, v.clone()), c.clone());
            }
        }
        out
    }

    pub fn coeff(&self, v: &str) -> Scalar {
        self.linear_part.get(v).cloned().unwrap_or_else(Scalar::zero)
    }

    /// The term with the linear occurrence of `v` removed.
    pub fn without(&self, v: &str) -> NormalTerm {
        let mut out = self.clone();
        out.linear_part.remove(v);
        out
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        out.extend(self.linear_part.keys().cloned());
        out.extend(self.proj_parts.keys().map(|(_, v)| v.clone()));
        for k in self.floor_parts.keys() {
            k.vars_into(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    pub fn contains_var(&self, v: &str) -> bool {
        self.linear_part.contains_key(v)
            || self.proj_parts.keys().any(|(_, w)| w == v)
            || self.floor_parts.keys().any(|k| k.contains_var(v))
    }

    /// Whether `v` occurs inside an integer part or a projection.
    pub fn has_nonlinear(&self, v: &str) -> bool {
        self.proj_parts.keys().any(|(_, w)| w == v) || self.floor_parts.keys().any(|k| k.contains_var(v))
    }

    /// Integer-valued under every assignment: integer multiples of integer
    /// parts plus an integer constant.
    pub fn is_integer_valued(&self) -> bool {
        self.linear_part.is_empty()
            && self.proj_parts.is_empty()
            && is_integer(&self.constant)
            && self.floor_parts.values().all(is_integer)
    }

    pub fn substitute(&self, v: &str, repl: &NormalTerm) -> NormalTerm {
        if !self.contains_var(v) {
            return self.clone();
        }
        let mut out = NormalTerm::constant(self.constant.clone());
        for (w, c) in &self.linear_part {
            if w == v {
                out.add_assign(&repl.scale(c));
            } else {
                add_into(&mut out.linear_part, w.clone(), c.clone());
            }
        }
        for ((i, w), c) in &self.proj_parts {
            if w == v {
                out.add_assign(&NormalTerm::proj_of(*i, repl).scale(c));
            } else {
                add_into(&mut out.proj_parts, (*i, w.clone()), c.clone());
            }
        }
        for (arg, c) in &self.floor_parts {
            let new_arg = arg.substitute(v, repl);
            out.add_assign(&NormalTerm::floor_of(&new_arg).scale(c));
        }
        out
    }

    /// Replaces every occurrence of `floor(target)` (at any depth) by `repl`.
    pub fn replace_floor(&self, target: &NormalTerm, repl: &NormalTerm) -> NormalTerm {
        if self.floor_parts.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        out.floor_parts.clear();
        for (arg, c) in &self.floor_parts {
            if arg == target {
                out.add_assign(&repl.scale(c));
            } else {
                let new_arg = arg.replace_floor(target, repl);
                out.add_assign(&NormalTerm::floor_of(&new_arg).scale(c));
            }
        }
        out
    }

    /// Visits every integer-part argument, innermost first.
    pub fn floor_args(&self, out: &mut Vec<NormalTerm>) {
        for arg in self.floor_parts.keys() {
            arg.floor_args(out);
            out.push(arg.clone());
        }
    }

    /// The least positive integer multiplier clearing all denominators of the
    /// coefficients and the constant.
    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        crate::scalar::denom_lcm(
            self.floor_parts
                .values()
                .chain(self.proj_parts.values())
                .chain(self.linear_part.values())
                .chain(std::iter::once(&self.constant)),
        )
    }

    /// Scales so that the first non-zero coefficient (in a fixed order) is
    /// positive; used to canonicalise sign-symmetric atoms.
    pub fn sign_normalized(&self) -> NormalTerm {
        let lead = self
            .proj_parts
            .values()
            .chain(self.floor_parts.values())
            .chain(self.linear_part.values())
            .chain(std::iter::once(&self.constant))
            .find(|c| !c.is_zero());
        match lead {
            Some(c) if c < &Scalar::zero() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn expand(&self) -> Term {
        let mut parts: Vec<Term> = Vec::new();
        let scaled = |c: &Scalar, t: Term| if c.is_one() { t } else { Term::scale(c.clone(), t) };
        for (v, c) in &self.linear_part {
            parts.push(scaled(c, Term::Var(v.clone())));
        }
        for ((i, v), c) in &self.proj_parts {
            parts.push(scaled(c, Term::proj(*i, Term::Var(v.clone()))));
        }
        for (arg, c) in &self.floor_parts {
            parts.push(scaled(c, Term::floor(arg.expand())));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(Term::Const(self.constant.clone()));
        }
        let mut it = parts.into_iter();
        let first = it.next().unwrap();
        it.fold(first, Term::add)
    }

    pub fn from_term(t: &Term) -> NormalTerm {
        match t {
            Term::Var(v) => NormalTerm::var(v),
            Term::Const(c) => NormalTerm::constant(c.clone()),
            Term::Add(a, b) => NormalTerm::from_term(a).add(&NormalTerm::from_term(b)),
            Term::Scale(c, a) => NormalTerm::from_term(a).scale(c),
            Term::Floor(a) => NormalTerm::floor_of(&NormalTerm::from_term(a)),
            Term::Proj(i, a) => NormalTerm::proj_of(*i, &NormalTerm::from_term(a)),
        }
    }
}

impl fmt::Display for NormalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expand())
    }
}

/// Normal form of a signature-valid term.
pub fn normalize_term(t: &Term, sig: Signature) -> NormalTerm {
    debug_assert!(t.validate(sig).is_ok(), "normalize_term on invalid term {t}");
    NormalTerm::from_term(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::scalar::{int, rat};

    fn nt(s: &str) -> NormalTerm {
        NormalTerm::from_term(&parse_term(s).unwrap())
    }

    #[test]
    fn variable_is_its_own_linear_part() {
        let n = nt("x");
        assert_eq!(n.linear_part, BTreeMap::from([("x".to_string(), int(1))]));
        assert!(n.floor_parts.is_empty() && n.proj_parts.is_empty());
        assert_eq!(n.constant, int(0));
    }

    #[test]
    fn integer_constant_leaves_the_bracket() {
        let n = nt("floor(2 * x + 3) + 1/2 * x");
        assert_eq!(n.constant, int(3));
        assert_eq!(n.coeff("x"), rat(1, 2));
        assert_eq!(n.floor_parts.len(), 1);
        let (arg, c) = n.floor_parts.iter().next().unwrap();
        assert_eq!(c, &int(1));
        assert_eq!(arg, &nt("2 * x"));
    }

    #[test]
    fn nested_integer_parts_split() {
        let n = nt("floor(floor(x) + y)");
        assert_eq!(n, nt("floor(x) + floor(y)"));
    }

    #[test]
    fn scaling_distributes_and_multiplies() {
        assert_eq!(nt("2 * (x + 3 * y)"), nt("2 * x + 6 * y"));
        assert_eq!(nt("1/2 * (2 * x)"), nt("x"));
        assert!(nt("x - x").is_zero());
    }

    #[test]
    fn projections_are_linear_and_idempotent() {
        assert_eq!(nt("pi1(x + 2 * y + 3)"), nt("pi1(x) + 2 * pi1(y)"));
        assert_eq!(nt("pi1(pi1(x))"), nt("pi1(x)"));
        assert!(nt("pi2(pi1(x))").is_zero());
    }

    #[test]
    fn repeated_integer_part_accumulates() {
        assert_eq!(nt("floor(floor(y) + y)"), nt("2 * floor(y)"));
    }

    #[test]
    fn fractional_constant_floors_to_zero() {
        assert!(nt("floor(1/2)").is_zero());
        assert_eq!(nt("floor(-1/2)"), NormalTerm::constant(int(-1)));
    }
}
