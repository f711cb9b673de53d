//! Literals in normal form and the disjunctive normal form used by every
//! elimination engine.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::model::{eval_normal, Assignment};
use crate::normal::NormalTerm;
use crate::scalar::{is_integer, Scalar};
use crate::syntax::{Atom, Formula, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

/// `Cmp(rel, t)` means `t rel 0`; `Z`/`Q` carry their polarity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lit {
    Cmp(Rel, NormalTerm),
    Z(bool, NormalTerm),
    Q(bool, NormalTerm),
}

/// A conjunction of literals.
pub type Conj = Vec<Lit>;
/// A disjunction of conjunctions.
pub type Dnf = Vec<Conj>;

/// Scales `t` by a positive rational so that all coefficients and the
/// constant are coprime integers.
pub fn primitive(t: &NormalTerm) -> NormalTerm {
    let l = t.denominator_lcm();
    let scaled = t.scale(&Scalar::from_integer(l));
    let g = scaled
        .floor_parts
        .values()
        .chain(scaled.proj_parts.values())
        .chain(scaled.linear_part.values())
        .chain(std::iter::once(&scaled.constant))
        .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
    if g.is_zero() || g.is_one() {
        scaled
    } else {
        scaled.scale(&Scalar::new(BigInt::one(), g))
    }
}

/// Removes the parts of `t` that are rational under every assignment
/// (integer parts and the constant); membership in `Q` is invariant under them.
pub fn drop_rational_parts(t: &NormalTerm) -> NormalTerm {
    let mut out = t.clone();
    out.floor_parts.clear();
    out.constant = Scalar::zero();
    out
}

/// Removes the parts of `t` that are integers under every assignment;
/// membership in `Z` is invariant under them.
pub fn drop_integer_parts(t: &NormalTerm) -> NormalTerm {
    let mut out = t.clone();
    out.floor_parts.retain(|_, c| !is_integer(c));
    out.constant = &t.constant - Scalar::from_integer(crate::scalar::floor_int(&t.constant));
    out
}

/// Outcome of simplifying a literal.
pub enum Simplified {
    True,
    False,
    Lit(Lit),
}

/// `a * (floor(s) + floor(-s)) + c` takes only the values `c` (when `s` is
/// an integer) and `c - a`, so a comparison on it is a `Z` literal or a
/// constant.
fn floor_pair(rel: Rel, t: &NormalTerm) -> Option<Simplified> {
    if !t.linear_part.is_empty() || !t.proj_parts.is_empty() || t.floor_parts.len() != 2 {
        return None;
    }
    let mut it = t.floor_parts.iter();
    let ((s, a), (u, b)) = (it.next()?, it.next()?);
    if a != b || *u != s.neg() {
        return None;
    }
    let at = |v: Scalar| matches!(Lit::Cmp(rel, NormalTerm::constant(v)).simplify(), Simplified::True);
    let int_case = at(t.constant.clone());
    let frac_case = at(&t.constant - a);
    Some(match (int_case, frac_case) {
        (true, true) => Simplified::True,
        (false, false) => Simplified::False,
        (pos, _) => Lit::Z(pos, s.clone()).simplify(),
    })
}

impl Lit {
    pub fn lt(t: NormalTerm) -> Lit {
        Lit::Cmp(Rel::Lt, t)
    }

    pub fn le(t: NormalTerm) -> Lit {
        Lit::Cmp(Rel::Le, t)
    }

    pub fn eq(t: NormalTerm) -> Lit {
        Lit::Cmp(Rel::Eq, t)
    }

    pub fn term(&self) -> &NormalTerm {
        match self {
            Lit::Cmp(_, t) | Lit::Z(_, t) | Lit::Q(_, t) => t,
        }
    }

    pub fn map_term(&self, f: impl Fn(&NormalTerm) -> NormalTerm) -> Lit {
        match self {
            Lit::Cmp(r, t) => Lit::Cmp(*r, f(t)),
            Lit::Z(p, t) => Lit::Z(*p, f(t)),
            Lit::Q(p, t) => Lit::Q(*p, f(t)),
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        self.term().contains_var(v)
    }

    pub fn substitute(&self, v: &str, repl: &NormalTerm) -> Lit {
        self.map_term(|t| t.substitute(v, repl))
    }

    /// Canonical form, with ground literals decided.
    pub fn simplify(&self) -> Simplified {
        match self {
            Lit::Cmp(rel, t) => {
                if let Some(c) = t.as_constant() {
                    let ord = c.cmp(&Scalar::zero());
                    let holds = match rel {
                        Rel::Lt => ord == Ordering::Less,
                        Rel::Le => ord != Ordering::Greater,
                        Rel::Eq => ord == Ordering::Equal,
                    };
                    return if holds { Simplified::True } else { Simplified::False };
                }
                if let Some(l) = floor_pair(*rel, t) {
                    return l;
                }
                let mut p = primitive(t);
                if *rel == Rel::Eq {
                    p = p.sign_normalized();
                }
                Simplified::Lit(Lit::Cmp(*rel, p))
            }
            Lit::Z(pos, t) => {
                let t = &drop_integer_parts(&t.sign_normalized());
                let decided = if let Some(c) = t.as_constant() {
                    Some(is_integer(c))
                } else if t.is_integer_valued() {
                    Some(true)
                } else {
                    None
                };
                match decided {
                    Some(b) if b == *pos => Simplified::True,
                    Some(_) => Simplified::False,
                    None => Simplified::Lit(Lit::Z(*pos, t.clone())),
                }
            }
            Lit::Q(pos, t) => {
                let r = drop_rational_parts(t);
                if r.is_zero() {
                    return if *pos { Simplified::True } else { Simplified::False };
                }
                Simplified::Lit(Lit::Q(*pos, primitive(&r).sign_normalized()))
            }
        }
    }

    /// Truth value under a total assignment.
    pub fn eval(&self, asg: &Assignment) -> Result<bool> {
        let v = eval_normal(self.term(), asg)?;
        Ok(match self {
            Lit::Cmp(Rel::Lt, _) => v.sign() < 0,
            Lit::Cmp(Rel::Le, _) => v.sign() <= 0,
            Lit::Cmp(Rel::Eq, _) => v.sign() == 0,
            Lit::Z(pos, _) => v.is_integer() == *pos,
            Lit::Q(pos, _) => v.is_rational() == *pos,
        })
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Lit::Cmp(rel, t) => {
                let (lhs, rhs) = split_sides(t);
                match rel {
                    Rel::Lt => Formula::lt(lhs, rhs),
                    Rel::Le => Formula::le(lhs, rhs),
                    Rel::Eq => Formula::eq(lhs, rhs),
                }
            }
            Lit::Z(pos, t) => polarity(*pos, Formula::in_z(t.expand())),
            Lit::Q(pos, t) => polarity(*pos, Formula::in_q(t.expand())),
        }
    }
}

fn polarity(pos: bool, f: Formula) -> Formula {
    if pos {
        f
    } else {
        Formula::not(f)
    }
}

/// Splits `t` into `(lhs, rhs)` with `t = lhs - rhs`, putting the positively
/// weighted parts on the left.
fn split_sides(t: &NormalTerm) -> (Term, Term) {
    let mut pos = NormalTerm::zero();
    let mut neg = NormalTerm::zero();
    let place = |c: &Scalar| c.is_positive();
    for (k, c) in &t.linear_part {
        let target = if place(c) { &mut pos } else { &mut neg };
        target.linear_part.insert(k.clone(), c.abs());
    }
    for (k, c) in &t.proj_parts {
        let target = if place(c) { &mut pos } else { &mut neg };
        target.proj_parts.insert(k.clone(), c.abs());
    }
    for (k, c) in &t.floor_parts {
        let target = if place(c) { &mut pos } else { &mut neg };
        target.floor_parts.insert(k.clone(), c.abs());
    }
    if t.constant.is_positive() {
        pos.constant = t.constant.clone();
    } else {
        neg.constant = -t.constant.clone();
    }
    (pos.expand(), neg.expand())
}

/// Literals equivalent to an atom with the given polarity, as a DNF.
pub fn atom_dnf(a: &Atom, positive: bool) -> Dnf {
    let nt = |t: &Term| NormalTerm::from_term(t);
    match (a, positive) {
        (Atom::Lt(s, t), true) => vec![vec![Lit::lt(nt(s).sub(&nt(t)))]],
        (Atom::Lt(s, t), false) => vec![vec![Lit::le(nt(t).sub(&nt(s)))]],
        (Atom::Eq(s, t), true) => vec![vec![Lit::eq(nt(s).sub(&nt(t)))]],
        (Atom::Eq(s, t), false) => {
            let d = nt(s).sub(&nt(t));
            vec![vec![Lit::lt(d.clone())], vec![Lit::lt(d.neg())]]
        }
        (Atom::InZ(s), p) => vec![vec![Lit::Z(p, nt(s))]],
        (Atom::InQ(s), p) => vec![vec![Lit::Q(p, nt(s))]],
    }
}

/// Simplifies a conjunction; `None` when it is unsatisfiable on its face.
fn irrational_coords(t: &NormalTerm) -> BTreeMap<String, Scalar> {
    let mut out: BTreeMap<String, Scalar> = t.linear_part.clone();
    for ((i, v), c) in &t.proj_parts {
        out.insert(format!("pi{i}({v})"), c.clone());
    }
    out
}

/// Whether `Q(t)` follows from `Q(b)` for every `b` in `basis`: the rational
/// subgroup is a vector space over the rationals, so this asks whether `t`
/// lies in the span of `basis` modulo rational constants.
pub fn in_rational_span(basis: &[&NormalTerm], t: &NormalTerm) -> bool {
    // row-reduce the basis, pivoting on the first key of each row
    let mut rows: Vec<(String, BTreeMap<String, Scalar>)> = Vec::new();
    let reduce = |mut v: BTreeMap<String, Scalar>, rows: &[(String, BTreeMap<String, Scalar>)]| {
        for (k, r) in rows {
            if let Some(c) = v.get(k).cloned() {
                for (rk, rc) in r {
                    let e = v.entry(rk.clone()).or_insert_with(Scalar::zero);
                    *e -= &c * rc;
                }
                v.retain(|_, c| !c.is_zero());
            }
        }
        v
    };
    for b in basis {
        let v = reduce(irrational_coords(b), &rows);
        if let Some((k, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) {
            let v: BTreeMap<String, Scalar> = v.into_iter().map(|(rk, rc)| (rk, rc / &c)).collect();
            for (_, r) in rows.iter_mut() {
                if let Some(rc) = r.get(&k).cloned() {
                    for (vk, vc) in &v {
                        let e = r.entry(vk.clone()).or_insert_with(Scalar::zero);
                        *e -= &rc * vc;
                    }
                    r.retain(|_, c| !c.is_zero());
                }
            }
            rows.push((k, v));
        }
    }
    reduce(irrational_coords(t), &rows).is_empty()
}

/// A negative `Q` literal whose term lies in the span of the positive ones.
pub fn q_span_clash(conj: &[Lit], extra_pos: &[&NormalTerm], extra_neg: &[&NormalTerm]) -> bool {
    let mut pos: Vec<&NormalTerm> = extra_pos.to_vec();
    let mut neg: Vec<&NormalTerm> = extra_neg.to_vec();
    for l in conj {
        match l {
            Lit::Q(true, t) => pos.push(t),
            Lit::Q(false, t) => neg.push(t),
            _ => {}
        }
    }
    !pos.is_empty() && neg.iter().any(|t| in_rational_span(&pos, t))
}

pub fn simplify_conj(conj: &[Lit]) -> Option<Conj> {
    let mut out: BTreeSet<Lit> = BTreeSet::new();
    for l in conj {
        match l.simplify() {
            Simplified::True => {}
            Simplified::False => return None,
            Simplified::Lit(l) => {
                out.insert(l);
            }
        }
    }
    // complementary Z/Q literals
    for l in &out {
        let clash = match l {
            Lit::Z(true, t) => out.contains(&Lit::Z(false, t.clone())),
            Lit::Q(true, t) => out.contains(&Lit::Q(false, t.clone())),
            Lit::Cmp(Rel::Lt, t) => {
                out.contains(&Lit::Cmp(Rel::Le, t.neg())) || out.contains(&Lit::Cmp(Rel::Lt, t.neg()))
            }
            _ => false,
        };
        if clash {
            return None;
        }
    }
    let out: Conj = out.into_iter().collect();
    if q_span_clash(&out, &[], &[]) {
        return None;
    }
    Some(out)
}

fn complement(l: &Lit) -> Option<Lit> {
    match l {
        Lit::Z(p, t) => Some(Lit::Z(!p, t.clone())),
        Lit::Q(p, t) => Some(Lit::Q(!p, t.clone())),
        _ => None,
    }
}

/// Conjunctions up to this count are merged by resolution.
const RESOLUTION_LIMIT: usize = 64;

/// Replaces `C & L | C & ~L` by `C` for membership literals `L`.
fn resolve(mut d: Vec<Conj>) -> Dnf {
    'again: loop {
        if d.len() > RESOLUTION_LIMIT {
            return d;
        }
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if d[i].len() != d[j].len() {
                    continue;
                }
                let only_i: Vec<&Lit> = d[i].iter().filter(|l| !d[j].contains(l)).collect();
                if only_i.len() != 1 {
                    continue;
                }
                let only_j: Vec<&Lit> = d[j].iter().filter(|l| !d[i].contains(l)).collect();
                if complement(only_i[0]).as_ref() == Some(only_j[0]) {
                    let drop = only_i[0].clone();
                    let merged: Conj = d[i].iter().filter(|l| **l != drop).cloned().collect();
                    if merged.is_empty() {
                        return vec![vec![]];
                    }
                    d.remove(j);
                    d.remove(i);
                    if !d.contains(&merged) {
                        d.push(merged);
                    }
                    continue 'again;
                }
            }
        }
        return d;
    }
}

pub fn simplify_dnf(d: Dnf) -> Dnf {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in d {
        if let Some(c) = simplify_conj(&c) {
            if c.is_empty() {
                return vec![vec![]];
            }
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    resolve(out)
}

fn product(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            if let Some(c) = simplify_conj(&c) {
                out.push(c);
            }
        }
    }
    simplify_dnf(out)
}

/// Disjunctive normal form of a quantifier-free formula.
pub fn dnf(f: &Formula) -> Dnf {
    dnf_pol(f, true)
}

fn dnf_pol(f: &Formula, positive: bool) -> Dnf {
    match f {
        Formula::Top => {
            if positive {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        Formula::Bot => dnf_pol(&Formula::Top, !positive),
        Formula::Atom(a) => simplify_dnf(atom_dnf(a, positive)),
        Formula::Not(g) => dnf_pol(g, !positive),
        Formula::And(gs) | Formula::Or(gs) => {
            let conjunctive = matches!(f, Formula::And(_)) == positive;
            if conjunctive {
                gs.iter()
                    .fold(vec![vec![]], |acc, g| product(&acc, &dnf_pol(g, positive)))
            } else {
                simplify_dnf(gs.iter().flat_map(|g| dnf_pol(g, positive)).collect())
            }
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            panic!("dnf of a quantified formula: {f}")
        }
    }
}

pub fn conj_to_formula(c: &[Lit]) -> Formula {
    Formula::and(c.iter().map(Lit::to_formula).collect())
}

pub fn dnf_to_formula(d: &Dnf) -> Formula {
    if d.iter().any(|c| c.is_empty()) {
        return Formula::Top;
    }
    Formula::or(d.iter().map(|c| conj_to_formula(c)).collect())
}
