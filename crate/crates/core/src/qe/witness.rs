//! Constructive witnesses: every engine's case analysis is replayed on
//! concrete parameter values and the remaining one-variable problem is solved
//! directly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::fm::split_bounds;
use super::hamel::{component_name, component_step, split_conj};
use super::lit::{Dnf, Lit};
use super::mixed::{decompose, eliminate_frac, FRAC};
use crate::error::{Error, Result};
use crate::model::{eval_normal, Assignment, ModelElement};
use crate::scalar::{denom_lcm, lcm, simplest_between, Scalar};
use crate::syntax::Signature;

/// Where a dense variable has to live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    /// Any element.
    Any,
    /// The rational line.
    Rational,
    /// Rational multiples of the `r`-th basis root.
    Root(u32),
}

impl Line {
    fn contains(self, e: &ModelElement) -> Result<bool> {
        Ok(match self {
            Line::Any => true,
            Line::Rational => e.is_rational(),
            Line::Root(r) => e.proj(r)?.sub(e).is_zero(),
        })
    }

    fn unit(self) -> ModelElement {
        match self {
            Line::Any | Line::Rational => ModelElement::int(1),
            Line::Root(r) => {
                let mut v = vec![Scalar::zero(); r as usize + 1];
                v[r as usize] = Scalar::one();
                ModelElement::RootCombo(v)
            }
        }
    }
}

pub fn holds(conj: &[Lit], asg: &Assignment) -> Result<bool> {
    for l in conj {
        if !l.eval(asg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn with(asg: &Assignment, var: &str, value: ModelElement) -> Assignment {
    let mut a = asg.clone();
    a.insert(var.to_string(), value);
    a
}

fn ceil_elem(e: &ModelElement) -> Result<BigInt> {
    Ok(-e.neg().floor()?)
}

struct Endpoint {
    value: ModelElement,
    strict: bool,
}

/// Tightest lower and upper endpoints and pinned values of `var`.
fn endpoints(
    var: &str,
    conj: &[Lit],
    asg: &Assignment,
) -> Result<(Option<Endpoint>, Option<Endpoint>, Vec<ModelElement>)> {
    let b = split_bounds(var, conj)?;
    let mut lo: Option<Endpoint> = None;
    for bound in &b.lower {
        let v = eval_normal(&bound.value, asg)?;
        let replace = match &lo {
            None => true,
            Some(cur) => match v.cmp_value(&cur.value) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal => bound.strict,
                std::cmp::Ordering::Less => false,
            },
        };
        if replace {
            lo = Some(Endpoint { value: v, strict: bound.strict });
        }
    }
    let mut hi: Option<Endpoint> = None;
    for bound in &b.upper {
        let v = eval_normal(&bound.value, asg)?;
        let replace = match &hi {
            None => true,
            Some(cur) => match v.cmp_value(&cur.value) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => bound.strict,
                std::cmp::Ordering::Greater => false,
            },
        };
        if replace {
            hi = Some(Endpoint { value: v, strict: bound.strict });
        }
    }
    let pinned = b
        .pinned
        .iter()
        .map(|p| eval_normal(p, asg))
        .collect::<Result<Vec<_>>>()?;
    Ok((lo, hi, pinned))
}

/// Smallest integer `n` with `var = n` satisfying a conjunction that is
/// linear in `var`, scanning one period of the divisibility literals from
/// the binding bound.
pub fn int_scan(var: &str, conj: &[Lit], asg: &Assignment) -> Result<Option<BigInt>> {
    let (lo, hi, pinned) = endpoints(var, conj, asg)?;
    let check = |n: &BigInt| holds(conj, &with(asg, var, ModelElement::rat(Scalar::from_integer(n.clone()))));
    if let Some(p) = pinned.first() {
        if !p.is_integer() {
            return Ok(None);
        }
        let n = p.floor()?;
        return Ok(if check(&n)? { Some(n) } else { None });
    }
    let period = conj
        .iter()
        .filter(|l| matches!(l, Lit::Z(..)) && l.contains_var(var))
        .fold(BigInt::one(), |acc, l| lcm(&acc, &denom_lcm([&l.term().coeff(var)])));
    let lo_int = match &lo {
        Some(e) if e.strict => Some(e.value.floor()? + 1),
        Some(e) => Some(ceil_elem(&e.value)?),
        None => None,
    };
    let hi_int = match &hi {
        Some(e) if e.strict => Some(ceil_elem(&e.value)? - 1),
        Some(e) => Some(e.value.floor()?),
        None => None,
    };
    let candidates: Vec<BigInt> = match (lo_int, hi_int) {
        (Some(l), h) => {
            let mut end: BigInt = &l + &period - 1;
            if let Some(h) = h {
                end = end.min(h);
            }
            let mut out = Vec::new();
            let mut n = l;
            while n <= end {
                out.push(n.clone());
                n += 1;
            }
            out
        }
        (None, Some(h)) => {
            let mut out = Vec::new();
            let mut n = h.clone();
            while n > &h - &period {
                out.push(n.clone());
                n -= 1;
            }
            out
        }
        (None, None) => {
            let mut out = Vec::new();
            let mut n = BigInt::zero();
            while n < period {
                out.push(n.clone());
                n += 1;
            }
            out
        }
    };
    for n in candidates {
        if check(&n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// A rational strictly between two distinct elements.
fn rational_between(lo: &ModelElement, hi: &ModelElement) -> Scalar {
    if let (Some(a), Some(b)) = (lo.as_rational(), hi.as_rational()) {
        return simplest_between(&a, &b);
    }
    let mut bits = 64;
    loop {
        let (_, l) = lo.approx(bits);
        let (h, _) = hi.approx(bits);
        if l < h {
            return simplest_between(&l, &h);
        }
        bits *= 2;
    }
}

/// Preferred rational offset `q` with `lo < shift + q < hi`: the midpoint
/// when it is rational, else the simplest rational in the interval.
fn pick_offset(lo: Option<&ModelElement>, hi: Option<&ModelElement>, shift: &ModelElement) -> Scalar {
    let half = Scalar::new(BigInt::one(), BigInt::from(2));
    match (lo.map(|l| l.sub(shift)), hi.map(|h| h.sub(shift))) {
        (Some(l), Some(h)) => {
            let mid = l.add(&h).scale(&half);
            mid.as_rational().unwrap_or_else(|| rational_between(&l, &h))
        }
        (Some(l), None) => match l.as_rational() {
            Some(r) => r + Scalar::one(),
            None => Scalar::from_integer(crate::scalar::floor_int(&l.approx(64).1) + 1),
        },
        (None, Some(h)) => match h.as_rational() {
            Some(r) => r - Scalar::one(),
            None => Scalar::from_integer(crate::scalar::ceil_int(&h.approx(64).0) - 1),
        },
        (None, None) => Scalar::zero(),
    }
}

/// A rational multiple of `unit` strictly inside `(lo, hi)`, by refinement.
fn pick_on_root(lo: Option<&ModelElement>, hi: Option<&ModelElement>, unit: &ModelElement) -> ModelElement {
    let inside = |e: &ModelElement| {
        lo.is_none_or(|l| e.cmp_value(l).is_gt()) && hi.is_none_or(|h| e.cmp_value(h).is_lt())
    };
    let mut bits = 32;
    loop {
        let (u_lo, _) = unit.approx(bits);
        let target = match (lo, hi) {
            (Some(l), Some(h)) => {
                let (_, a) = l.approx(bits);
                let (b, _) = h.approx(bits);
                (a + b) / Scalar::from_integer(2.into())
            }
            (Some(l), None) => l.approx(bits).1 + Scalar::one(),
            (None, Some(h)) => h.approx(bits).0 - Scalar::one(),
            (None, None) => Scalar::zero(),
        };
        let q = target / u_lo;
        let cand = unit.scale(&q);
        if inside(&cand) {
            return cand;
        }
        bits *= 2;
    }
}

/// A value for `var` satisfying a conjunction linear in `var`, on the given
/// line. Coset literals are honoured by anchoring at a positive coset or
/// perturbing off the negative ones.
pub fn dense_pick(var: &str, conj: &[Lit], asg: &Assignment, line: Line) -> Result<Option<ModelElement>> {
    let (lo, hi, pinned) = endpoints(var, conj, asg)?;
    let check = |e: &ModelElement| -> Result<bool> {
        Ok(line.contains(e)? && holds(conj, &with(asg, var, e.clone()))?)
    };
    if let Some(p) = pinned.first() {
        return Ok(if check(p)? { Some(p.clone()) } else { None });
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        match l.value.cmp_value(&h.value) {
            std::cmp::Ordering::Greater => return Ok(None),
            std::cmp::Ordering::Equal => {
                if l.strict || h.strict {
                    return Ok(None);
                }
                let p = l.value.clone();
                return Ok(if check(&p)? { Some(p) } else { None });
            }
            std::cmp::Ordering::Less => {}
        }
    }
    let lo_v = lo.as_ref().map(|e| &e.value);
    let hi_v = hi.as_ref().map(|e| &e.value);

    // anchor at the first positive coset literal
    let mut anchor = ModelElement::zero();
    let mut has_negative = false;
    for l in conj {
        if !l.contains_var(var) {
            continue;
        }
        if let Lit::Q(pos, t) = l {
            if *pos {
                let shift = eval_normal(&t.without(var), asg)?.scale(&t.coeff(var).recip());
                anchor = shift.neg();
            } else {
                has_negative = true;
            }
        }
    }
    let base = match line {
        Line::Root(_) => pick_on_root(lo_v, hi_v, &line.unit()),
        _ => anchor.add(&ModelElement::rat(pick_offset(lo_v, hi_v, &anchor))),
    };
    if check(&base)? {
        return Ok(Some(base));
    }
    if !has_negative {
        return Ok(None);
    }
    // step off the finitely many excluded cosets
    let room = match (lo_v, hi_v) {
        (Some(l), Some(h)) => {
            let a = base.sub(l).approx(64).0;
            let b = h.sub(&base).approx(64).0;
            a.min(b)
        }
        (Some(l), None) => base.sub(l).approx(64).0,
        (None, Some(h)) => h.sub(&base).approx(64).0,
        (None, None) => Scalar::one(),
    };
    let mut eps = room / Scalar::from_integer(2.into());
    for _ in 0..64 {
        let cand = base.add(&ModelElement::QuadPoint(Scalar::zero(), eps.clone()));
        if check(&cand)? {
            return Ok(Some(cand));
        }
        eps /= Scalar::from_integer(2.into());
    }
    Ok(None)
}

fn mixed_witness(var: &str, conj: &[Lit], asg: &Assignment, with_q: bool) -> Result<Option<ModelElement>> {
    for piece in decompose(var, conj, with_q)? {
        for c in eliminate_frac(&piece.lits, with_q)? {
            let Some(n) = int_scan(&piece.int_var, &c, asg)? else { continue };
            let asg2 = with(asg, &piece.int_var, ModelElement::rat(Scalar::from_integer(n)));
            let Some(u) = dense_pick(FRAC, &piece.lits, &asg2, Line::Any)? else { continue };
            let k = eval_normal(&piece.int_expr, &asg2)?;
            return Ok(Some(k.add(&u)));
        }
    }
    Ok(None)
}

fn hamel_solve(r: u32, n: u32, conj: &[Lit], asg: &Assignment) -> Result<Option<Assignment>> {
    if r == 0 {
        return Ok(if holds(conj, asg)? { Some(asg.clone()) } else { None });
    }
    let name = component_name(r);
    let line = if r <= n { Line::Root(r) } else { Line::Rational };
    for c in component_step(r, n, conj)? {
        let Some(inner) = hamel_solve(r - 1, n, &c, asg)? else { continue };
        if let Some(v) = dense_pick(&name, conj, &inner, line)? {
            return Ok(Some(with(&inner, &name, v)));
        }
    }
    Ok(None)
}

fn hamel_witness(var: &str, conj: &[Lit], asg: &Assignment, n: u32) -> Result<Option<ModelElement>> {
    let split = split_conj(var, conj, n)?;
    let Some(sol) = hamel_solve(n + 1, n, &split, asg)? else { return Ok(None) };
    let mut x = ModelElement::zero();
    for r in 1..=n + 1 {
        x = x.add(&sol[&component_name(r)]);
    }
    Ok(Some(x))
}

/// A witness for one conjunction.
pub fn conj_witness(var: &str, conj: &[Lit], asg: &Assignment, sig: Signature) -> Result<Option<ModelElement>> {
    let found = match sig {
        Signature::Doag | Signature::T1Coset => dense_pick(var, conj, asg, Line::Any)?,
        Signature::Presburger => int_scan(var, conj, asg)?.map(|n| ModelElement::rat(Scalar::from_integer(n))),
        Signature::T0Mixed => mixed_witness(var, conj, asg, false)?,
        Signature::TFull => mixed_witness(var, conj, asg, true)?,
        Signature::TnHamel(n) => hamel_witness(var, conj, asg, n)?,
    };
    match found {
        Some(w) if holds(conj, &with(asg, var, w.clone()))? => Ok(Some(w)),
        Some(w) => Err(Error::Engine(format!("witness {w} for {var} failed verification"))),
        None => Ok(None),
    }
}

/// A witness for the first satisfiable disjunct.
pub fn dnf_witness(var: &str, d: &Dnf, asg: &Assignment, sig: Signature) -> Result<ModelElement> {
    for c in d {
        if let Some(w) = conj_witness(var, c, asg, sig)? {
            return Ok(w);
        }
    }
    Err(Error::NoWitness(format!("no value of {var} satisfies the formula")))
}
