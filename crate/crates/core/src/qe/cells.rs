//! Cell decomposition of unary sets in the coset theories: finitely many
//! points, intervals, intervals inside one coset of `Q`, and intervals
//! avoiding finitely many cosets.
//!
//! Free variables other than the cell variable are symbolic constants; they
//! are taken to be independent over `Q` modulo `Q`, so two coset
//! representatives name the same coset exactly when they differ by a
//! rational.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::lit::{drop_rational_parts, Dnf, Lit, Simplified};
use super::mixed::{decompose, FRAC};
use super::qe_dnf;
use crate::error::{Error, Result};
use crate::model::{eval_normal, Assignment, ModelElement};
use crate::normal::NormalTerm;
use crate::scalar::{ceil_int, fmt_scalar, Scalar};
use crate::syntax::{Formula, Signature};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Point(Scalar),
    /// Open interval; `None` is unbounded.
    Open(Option<Scalar>, Option<Scalar>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellKind {
    Whole,
    /// Inside the coset `Q + r`.
    Coset(NormalTerm),
    /// Outside each coset `Q + r`.
    Avoiding(Vec<NormalTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub region: Region,
    pub kind: CellKind,
}

fn fmt_end(e: &Option<Scalar>, neg: bool) -> String {
    match e {
        Some(s) => fmt_scalar(s),
        None if neg => "-inf".into(),
        None => "inf".into(),
    }
}

fn fmt_coset(r: &NormalTerm) -> String {
    format!("Q+{r}")
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.region {
            Region::Point(p) => write!(f, "point {}", fmt_scalar(p))?,
            Region::Open(lo, hi) => write!(f, "interval ({}, {})", fmt_end(lo, true), fmt_end(hi, false))?,
        }
        match &self.kind {
            CellKind::Whole => Ok(()),
            CellKind::Coset(r) => write!(f, " ∩ coset {}", fmt_coset(r)),
            CellKind::Avoiding(rs) => {
                let names: Vec<String> = rs.iter().map(fmt_coset).collect();
                let noun = if rs.len() == 1 { "coset" } else { "cosets" };
                write!(f, " ∖ {noun} {}", names.join(", "))
            }
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Cell {
    /// Membership of a model element, with the symbolic constants assigned.
    pub fn contains(&self, x: &ModelElement, consts: &Assignment) -> Result<bool> {
        let in_region = match &self.region {
            Region::Point(p) => x.sub(&ModelElement::rat(p.clone())).is_zero(),
            Region::Open(lo, hi) => {
                lo.as_ref().is_none_or(|l| x.cmp_value(&ModelElement::rat(l.clone())).is_gt())
                    && hi.as_ref().is_none_or(|h| x.cmp_value(&ModelElement::rat(h.clone())).is_lt())
            }
        };
        if !in_region {
            return Ok(false);
        }
        let in_coset = |r: &NormalTerm| -> Result<bool> { Ok(x.sub(&eval_normal(r, consts)?).is_rational()) };
        Ok(match &self.kind {
            CellKind::Whole => true,
            CellKind::Coset(r) => in_coset(r)?,
            CellKind::Avoiding(rs) => {
                for r in rs {
                    if in_coset(r)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }
}

/// Truth of a literal without the cell variable, under the independence
/// convention for symbolic constants.
fn sym_truth(l: &Lit) -> Result<bool> {
    match l.simplify() {
        Simplified::True => Ok(true),
        Simplified::False => Ok(false),
        Simplified::Lit(Lit::Q(p, _)) | Simplified::Lit(Lit::Z(p, _)) => Ok(!p),
        Simplified::Lit(other) => Err(Error::Input(format!(
            "order literal {} depends on a symbolic constant",
            other.to_formula()
        ))),
    }
}

/// Coset `Q + r` of the solutions of `Q(a*x + s)`.
fn coset_rep(var: &str, t: &NormalTerm) -> NormalTerm {
    let a = t.coeff(var);
    drop_rational_parts(&t.without(var).scale(&(-a.recip())))
}

fn endpoint(var: &str, t: &NormalTerm) -> Result<Scalar> {
    let a = t.coeff(var);
    let v = t.without(var).scale(&(-a.recip()));
    v.as_constant().cloned().ok_or_else(|| {
        Error::Input(format!("endpoint {v} of the cell variable is not a rational number"))
    })
}

#[derive(Debug, Clone)]
enum Set {
    Empty,
    Whole,
    Coset(NormalTerm),
    Avoid(BTreeSet<NormalTerm>),
}

fn conj_on_interval(var: &str, conj: &[Lit], sample: &Scalar) -> Result<Set> {
    let s = NormalTerm::constant(sample.clone());
    let mut pos: BTreeSet<NormalTerm> = BTreeSet::new();
    let mut neg: BTreeSet<NormalTerm> = BTreeSet::new();
    for l in conj {
        match l {
            Lit::Q(p, t) if t.contains_var(var) => {
                let r = coset_rep(var, t);
                if *p {
                    pos.insert(r);
                } else {
                    neg.insert(r);
                }
            }
            _ => {
                if !sym_truth(&l.substitute(var, &s))? {
                    return Ok(Set::Empty);
                }
            }
        }
    }
    Ok(match pos.len() {
        0 if neg.is_empty() => Set::Whole,
        0 => Set::Avoid(neg),
        1 => {
            let r = pos.into_iter().next().unwrap();
            if neg.contains(&r) {
                Set::Empty
            } else {
                Set::Coset(r)
            }
        }
        _ => Set::Empty,
    })
}

fn union(sets: Vec<Set>) -> Vec<CellKind> {
    let mut avoid: Option<BTreeSet<NormalTerm>> = None;
    let mut cosets: BTreeSet<NormalTerm> = BTreeSet::new();
    for s in sets {
        match s {
            Set::Empty => {}
            Set::Whole => return vec![CellKind::Whole],
            Set::Coset(r) => {
                cosets.insert(r);
            }
            Set::Avoid(a) => {
                avoid = Some(match avoid {
                    None => a,
                    Some(cur) => cur.intersection(&a).cloned().collect(),
                });
            }
        }
    }
    match avoid {
        Some(a) => {
            let rest: Vec<NormalTerm> = a.difference(&cosets).cloned().collect();
            if rest.is_empty() {
                vec![CellKind::Whole]
            } else {
                vec![CellKind::Avoiding(rest)]
            }
        }
        None => cosets.into_iter().map(CellKind::Coset).collect(),
    }
}

fn point_in(kind: &CellKind) -> bool {
    match kind {
        CellKind::Whole => true,
        CellKind::Coset(r) => r.is_zero(),
        CellKind::Avoiding(rs) => !rs.iter().any(|r| r.is_zero()),
    }
}

fn merge(pieces: Vec<(Region, Vec<CellKind>)>) -> Vec<Cell> {
    let mut out: Vec<(Region, Vec<CellKind>)> = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let (region, kinds) = pieces[i].clone();
        if let (Some((Region::Open(a, Some(b)), prev)), Region::Point(p)) = (out.last(), &region) {
            let next = pieces.get(i + 1);
            if let Some((Region::Open(Some(start), c), next_kinds)) = next {
                let same = prev.len() == 1 && prev == next_kinds && kinds == vec![CellKind::Whole];
                if same && b == p && start == p && point_in(&prev[0]) {
                    let merged = Region::Open(a.clone(), c.clone());
                    let k = prev.clone();
                    out.pop();
                    out.push((merged, k));
                    i += 2;
                    continue;
                }
            }
        }
        out.push((region, kinds));
        i += 1;
    }
    out.into_iter()
        .flat_map(|(region, kinds)| kinds.into_iter().map(move |kind| Cell { region: region.clone(), kind }))
        .collect()
}

fn coset_cells(var: &str, d: &Dnf) -> Result<Vec<Cell>> {
    let mut points: BTreeSet<Scalar> = BTreeSet::new();
    for c in d {
        for l in c {
            if let Lit::Cmp(_, t) = l {
                if t.contains_var(var) {
                    points.insert(endpoint(var, t)?);
                }
            }
        }
    }
    let points: Vec<Scalar> = points.into_iter().collect();
    let mut regions = Vec::new();
    let mut prev: Option<Scalar> = None;
    for p in &points {
        regions.push(Region::Open(prev.clone(), Some(p.clone())));
        regions.push(Region::Point(p.clone()));
        prev = Some(p.clone());
    }
    regions.push(Region::Open(prev, None));

    let mut pieces = Vec::new();
    for region in regions {
        let sets = match &region {
            Region::Point(p) => {
                let s = NormalTerm::constant(p.clone());
                let mut sets = Vec::new();
                for c in d {
                    let mut ok = true;
                    for l in c {
                        if !sym_truth(&l.substitute(var, &s))? {
                            ok = false;
                            break;
                        }
                    }
                    sets.push(if ok { Set::Whole } else { Set::Empty });
                }
                sets
            }
            Region::Open(lo, hi) => {
                let sample = match (lo, hi) {
                    (Some(a), Some(b)) => (a + b) / Scalar::from_integer(2.into()),
                    (Some(a), None) => a + Scalar::one(),
                    (None, Some(b)) => b - Scalar::one(),
                    (None, None) => Scalar::zero(),
                };
                d.iter()
                    .map(|c| conj_on_interval(var, c, &sample))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let kinds = union(sets);
        if !kinds.is_empty() {
            pieces.push((region, kinds));
        }
    }
    Ok(merge(pieces))
}

fn depends_on_integer_part(var: &str, d: &Dnf) -> bool {
    d.iter()
        .flatten()
        .any(|l| l.term().has_nonlinear(var) || (matches!(l, Lit::Z(..)) && l.contains_var(var)))
}

fn default_window(d: &Dnf) -> (BigInt, BigInt) {
    let mut w = Scalar::zero();
    for l in d.iter().flatten() {
        let t = l.term();
        w = w.max(t.constant.abs());
        for c in t.linear_part.values() {
            if !c.is_zero() {
                w = w.max((&t.constant / c).abs());
            }
        }
    }
    let w: BigInt = ceil_int(&w) + 2;
    (-w.clone(), w)
}

/// Unfolds the integer part of `var` over `[lo, hi)`: each unit interval
/// becomes a formula without integer parts of `var`.
fn unfold(var: &str, d: &Dnf, lo: &BigInt, hi: &BigInt) -> Result<Dnf> {
    let mut out = Vec::new();
    for c in d {
        let pieces = decompose(var, c, true)?;
        let mut n = lo.clone();
        while &n < hi {
            let shifted = NormalTerm::var(var).plus_constant(&-Scalar::from_integer(n.clone()));
            for piece in &pieces {
                // int_expr = a*k + b
                let a = piece.int_expr.coeff(&piece.int_var);
                let b = &piece.int_expr.constant;
                let k = (Scalar::from_integer(n.clone()) - b) / &a;
                if !k.is_integer() {
                    continue;
                }
                let kt = NormalTerm::constant(k);
                out.push(
                    piece
                        .lits
                        .iter()
                        .map(|l| l.substitute(&piece.int_var, &kt).substitute(FRAC, &shifted))
                        .collect(),
                );
            }
            n += 1;
        }
    }
    Ok(super::lit::simplify_dnf(out))
}

fn cell_var(f: &Formula) -> Result<String> {
    let free = f.free_vars();
    if free.contains("x") {
        return Ok("x".into());
    }
    match free.len() {
        1 => Ok(free.into_iter().next().unwrap()),
        0 => Err(Error::Input("formula has no free variable".into())),
        _ => Err(Error::Input(format!(
            "formula is not unary: free variables {}",
            free.into_iter().collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Cells of the set defined by `f` in its variable `x` (or its only free
/// variable). When the set depends on the integer part of `x`, cells are
/// computed over a window of unit intervals around the constants of the
/// formula; use [`classify_cells_in`] to choose it.
pub fn classify_cells(f: &Formula, sig: Signature) -> Result<Vec<Cell>> {
    classify_cells_in(f, sig, None)
}

/// As [`classify_cells`], unfolding integer parts over `[lo, hi)`.
pub fn classify_cells_in(f: &Formula, sig: Signature, window: Option<(BigInt, BigInt)>) -> Result<Vec<Cell>> {
    if !matches!(sig, Signature::T1Coset | Signature::TFull) {
        return Err(Error::Input(format!("cell decomposition needs a coset signature, not {sig}")));
    }
    let var = cell_var(f)?;
    let d = qe_dnf(f, sig)?;
    if sig == Signature::TFull && depends_on_integer_part(&var, &d) {
        let (lo, hi) = window.unwrap_or_else(|| default_window(&d));
        let unfolded = unfold(&var, &d, &lo, &hi)?;
        return coset_cells(&var, &unfolded);
    }
    coset_cells(&var, &d)
}

/// The window `classify_cells` uses for a formula, if it needs one.
pub fn cell_window(f: &Formula, sig: Signature) -> Result<Option<(BigInt, BigInt)>> {
    let var = cell_var(f)?;
    let d = qe_dnf(f, sig)?;
    Ok((sig == Signature::TFull && depends_on_integer_part(&var, &d)).then(|| default_window(&d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn cells(text: &str, sig: Signature) -> Vec<String> {
        classify_cells(&parse(text, sig).unwrap(), sig)
            .unwrap()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    #[test]
    fn coset_interval() {
        assert_eq!(cells("0 < x & x < 1 & Q(x)", Signature::T1Coset), ["interval (0, 1) ∩ coset Q+0"]);
    }

    #[test]
    fn point_and_interval() {
        assert_eq!(
            cells("x = 3/2 | (2 < x & x < 3)", Signature::T1Coset),
            ["point 3/2", "interval (2, 3)"]
        );
    }

    #[test]
    fn avoided_coset() {
        assert_eq!(cells("0 < x & x < 2 & ~Q(x - c)", Signature::T1Coset), ["interval (0, 2) ∖ coset Q+c"]);
    }

    #[test]
    fn closed_interval_merges_interior_points() {
        assert_eq!(
            cells("(0 <= x & x < 1) | (1 <= x & x <= 2)", Signature::T1Coset),
            ["point 0", "interval (0, 2)", "point 2"]
        );
    }

    #[test]
    fn integer_parts_unfold() {
        let out = classify_cells_in(
            &parse("floor(x) = 1 & ~Q(x)", Signature::TFull).unwrap(),
            Signature::TFull,
            Some((BigInt::from(-2), BigInt::from(3))),
        )
        .unwrap();
        let s: Vec<String> = out.iter().map(|c| c.to_string()).collect();
        assert_eq!(s, ["interval (1, 2) ∖ coset Q+0"]);
    }

    #[test]
    fn non_unary_is_rejected() {
        assert!(classify_cells(&parse("y < z", Signature::T1Coset).unwrap(), Signature::T1Coset).is_err());
    }
}
