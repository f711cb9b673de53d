//! Exact, computable oracle models.
//!
//! * rationals (and integers) for the divisible, Presburger and mixed theories;
//! * `Q + Q*sqrt2` for the theories with a distinguished rational subgroup;
//! * `Q + Q*sqrt2 + ... + Q*sqrt(p_n)` for the Hamel projection theories,
//!   where `sqrt(p_i)` plays the role of the i-th projected basis element and
//!   the unit is a further basis element.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::normal::NormalTerm;
use crate::scalar::{fmt_scalar, floor_int, is_integer, Scalar};
use crate::syntax::{Atom, Formula, Signature, Term};

#[derive(Debug, Clone)]
pub enum ModelElement {
    RatPoint(Scalar),
    /// `a + b*sqrt2`.
    QuadPoint(Scalar, Scalar),
    /// `c0 + c1*sqrt(p1) + ... + cn*sqrt(pn)` over the first `n` primes.
    RootCombo(Vec<Scalar>),
}

pub type Assignment = BTreeMap<String, ModelElement>;

/// The first `n` primes.
pub fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Rational bounds `lo <= sqrt(p) <= hi` with `hi - lo = 2^-bits`.
fn sqrt_bounds(p: u64, bits: u32) -> (Scalar, Scalar) {
    let scale = BigInt::one() << bits;
    let s = (BigInt::from(p) * &scale * &scale).sqrt();
    let lo = Scalar::new(s.clone(), scale.clone());
    let hi = Scalar::new(s + 1, scale);
    (lo, hi)
}

impl ModelElement {
    pub fn rat(s: Scalar) -> ModelElement {
        ModelElement::RatPoint(s)
    }

    pub fn int(n: i64) -> ModelElement {
        ModelElement::RatPoint(crate::scalar::int(n))
    }

    pub fn zero() -> ModelElement {
        ModelElement::RatPoint(Scalar::zero())
    }

    /// Rational points are written as `RatPoint`, trailing zero root
    /// coefficients are trimmed.
    pub fn canonical(&self) -> ModelElement {
        match self {
            ModelElement::QuadPoint(a, b) if b.is_zero() => ModelElement::RatPoint(a.clone()),
            ModelElement::RootCombo(v) => {
                let mut v = v.clone();
                while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
                    v.pop();
                }
                match v.len() {
                    0 => ModelElement::zero(),
                    1 => ModelElement::RatPoint(v.pop().unwrap()),
                    _ => ModelElement::RootCombo(v),
                }
            }
            other => other.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<Scalar> {
        match self.canonical() {
            ModelElement::RatPoint(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_rational().is_some_and(|s| s.is_zero())
    }

    fn root_vec(&self) -> Option<Vec<Scalar>> {
        match self {
            ModelElement::RatPoint(s) => Some(vec![s.clone()]),
            ModelElement::RootCombo(v) => Some(v.clone()),
            ModelElement::QuadPoint(..) => None,
        }
    }

    fn quad_pair(&self) -> Option<(Scalar, Scalar)> {
        match self {
            ModelElement::RatPoint(s) => Some((s.clone(), Scalar::zero())),
            ModelElement::QuadPoint(a, b) => Some((a.clone(), b.clone())),
            ModelElement::RootCombo(_) => None,
        }
    }

    /// Sum. Panics when mixing `QuadPoint` with non-rational `RootCombo`
    /// values, which belong to different oracle models.
    pub fn add(&self, other: &ModelElement) -> ModelElement {
        let (a, b) = (self.canonical(), other.canonical());
        match (&a, &b) {
            (ModelElement::RatPoint(x), ModelElement::RatPoint(y)) => ModelElement::RatPoint(x + y),
            (ModelElement::RootCombo(_), _) | (_, ModelElement::RootCombo(_)) => {
                let (u, v) = match (a.root_vec(), b.root_vec()) {
                    (Some(u), Some(v)) => (u, v),
                    _ => panic!("cannot add {a} and {b}: different oracle models"),
                };
                let n = u.len().max(v.len());
                let out = (0..n)
                    .map(|i| {
                        u.get(i).cloned().unwrap_or_else(Scalar::zero)
                            + v.get(i).cloned().unwrap_or_else(Scalar::zero)
                    })
                    .collect();
                ModelElement::RootCombo(out).canonical()
            }
            _ => {
                let (a1, b1) = a.quad_pair().unwrap();
                let (a2, b2) = b.quad_pair().unwrap();
                ModelElement::QuadPoint(a1 + a2, b1 + b2).canonical()
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> ModelElement {
        match self {
            ModelElement::RatPoint(s) => ModelElement::RatPoint(s * c),
            ModelElement::QuadPoint(a, b) => ModelElement::QuadPoint(a * c, b * c).canonical(),
            ModelElement::RootCombo(v) => {
                ModelElement::RootCombo(v.iter().map(|x| x * c).collect()).canonical()
            }
        }
    }

    pub fn neg(&self) -> ModelElement {
        self.scale(&-Scalar::one())
    }

    pub fn sub(&self, other: &ModelElement) -> ModelElement {
        self.add(&other.neg())
    }

    /// Enclosing rational interval of width at most about `2^-bits` times the
    /// size of the irrational coefficients.
    pub fn approx(&self, bits: u32) -> (Scalar, Scalar) {
        match self {
            ModelElement::RatPoint(s) => (s.clone(), s.clone()),
            ModelElement::QuadPoint(a, b) => {
                let (lo, hi) = sqrt_bounds(2, bits);
                let (x, y) = (a + b * &lo, a + b * &hi);
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            }
            ModelElement::RootCombo(v) => {
                let ps = primes(v.len().saturating_sub(1));
                let mut lo = v[0].clone();
                let mut hi = v[0].clone();
                for (c, p) in v[1..].iter().zip(ps) {
                    let (s_lo, s_hi) = sqrt_bounds(p, bits);
                    let (x, y) = (c * &s_lo, c * &s_hi);
                    if x <= y {
                        lo += x;
                        hi += y;
                    } else {
                        lo += y;
                        hi += x;
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Exact sign. Zero is detected algebraically (square roots of distinct
    /// primes are linearly independent over the rationals); a non-zero value is
    /// separated from zero by interval refinement starting at 64 bits.
    pub fn sign(&self) -> i8 {
        match self.canonical() {
            ModelElement::RatPoint(s) => sign_of(&s),
            ModelElement::QuadPoint(a, b) => {
                let (sa, sb) = (sign_of(&a), sign_of(&b));
                if sa == sb || sb == 0 {
                    return sa;
                }
                if sa == 0 {
                    return sb;
                }
                // opposite signs: compare a^2 with 2 b^2
                let lhs = &a * &a;
                let rhs = &b * &b * Scalar::from_integer(BigInt::from(2));
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => unreachable!("sqrt2 is irrational"),
                }
            }
            e @ ModelElement::RootCombo(_) => {
                let mut bits = 64;
                loop {
                    let (lo, hi) = e.approx(bits);
                    if lo.is_positive() {
                        return 1;
                    }
                    if hi.is_negative() {
                        return -1;
                    }
                    bits *= 2;
                }
            }
        }
    }

    pub fn cmp_value(&self, other: &ModelElement) -> Ordering {
        self.sub(other).sign().cmp(&0)
    }

    /// Greatest integer not above the value.
    pub fn floor(&self) -> Result<BigInt> {
        match self.canonical() {
            ModelElement::RatPoint(s) => Ok(floor_int(&s)),
            e @ ModelElement::QuadPoint(..) => {
                let mut bits = 64;
                loop {
                    let (lo, hi) = e.approx(bits);
                    let (fl, fh) = (floor_int(&lo), floor_int(&hi));
                    if fl == fh {
                        return Ok(fl);
                    }
                    bits *= 2;
                }
            }
            e @ ModelElement::RootCombo(_) => Err(Error::Eval(format!(
                "integer part of root combination {e} is outside the supported signatures"
            ))),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|s| is_integer(&s))
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// The i-th Hamel projection (1-based): keeps only the `sqrt(p_i)` coordinate.
    pub fn proj(&self, i: u32) -> Result<ModelElement> {
        match self.canonical() {
            ModelElement::RatPoint(_) => Ok(ModelElement::zero()),
            ModelElement::RootCombo(v) => {
                let i = i as usize;
                let mut out = vec![Scalar::zero(); v.len().max(i + 1)];
                if let Some(c) = v.get(i) {
                    out[i] = c.clone();
                }
                Ok(ModelElement::RootCombo(out).canonical())
            }
            e @ ModelElement::QuadPoint(..) => Err(Error::Eval(format!(
                "projection of {e} is outside the supported signatures"
            ))),
        }
    }

    /// Parses `p/q`, `a+b*sqrt2`, `b*sqrt2`, `sqrt2`, and sums of
    /// `c*sqrtP` terms for other primes (giving a root combination).
    pub fn parse(text: &str) -> Result<ModelElement> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Input("empty value".into()));
        }
        // split into signed summands
        let mut parts = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                parts.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        parts.push(cur);
        let mut rational = Scalar::zero();
        let mut roots: BTreeMap<u64, Scalar> = BTreeMap::new();
        for part in parts {
            let (neg, body) = match part.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, part.trim_start_matches('+').to_string()),
            };
            let (coef, root) = match body.find("sqrt") {
                Some(idx) => {
                    let coef_txt = body[..idx].trim_end_matches('*');
                    let coef = if coef_txt.is_empty() {
                        Scalar::one()
                    } else {
                        parse_rational(coef_txt)?
                    };
                    let p: u64 = body[idx + 4..]
                        .parse()
                        .map_err(|_| Error::Input(format!("bad root in `{text}`")))?;
                    (coef, Some(p))
                }
                None => (parse_rational(&body)?, None),
            };
            let coef = if neg { -coef } else { coef };
            match root {
                None => rational += coef,
                Some(p) => *roots.entry(p).or_insert_with(Scalar::zero) += coef,
            }
        }
        if roots.is_empty() {
            return Ok(ModelElement::RatPoint(rational));
        }
        if roots.keys().all(|p| *p == 2) {
            return Ok(ModelElement::QuadPoint(rational, roots[&2].clone()).canonical());
        }
        let max_p = *roots.keys().max().unwrap();
        let ps = primes(64);
        let idx = ps
            .iter()
            .position(|p| *p == max_p)
            .ok_or_else(|| Error::Input(format!("sqrt{max_p} is not a supported prime root")))?;
        let mut v = vec![Scalar::zero(); idx + 2];
        v[0] = rational;
        for (p, c) in roots {
            let i = ps
                .iter()
                .position(|q| *q == p)
                .ok_or_else(|| Error::Input(format!("sqrt{p} is not a prime root")))?;
            v[i + 1] = c;
        }
        Ok(ModelElement::RootCombo(v).canonical())
    }
}

pub fn parse_rational(s: &str) -> Result<Scalar> {
    let bad = || Error::Input(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

fn sign_of(s: &Scalar) -> i8 {
    if s.is_positive() {
        1
    } else if s.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialEq for ModelElement {
    fn eq(&self, other: &Self) -> bool {
        match (self.canonical(), other.canonical()) {
            (ModelElement::RatPoint(a), ModelElement::RatPoint(b)) => a == b,
            (ModelElement::QuadPoint(a, b), ModelElement::QuadPoint(c, d)) => a == c && b == d,
            (ModelElement::RootCombo(u), ModelElement::RootCombo(v)) => u == v,
            _ => false,
        }
    }
}

impl Eq for ModelElement {}

impl Hash for ModelElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.canonical() {
            ModelElement::RatPoint(a) => {
                0u8.hash(state);
                a.hash(state)
            }
            ModelElement::QuadPoint(a, b) => {
                1u8.hash(state);
                a.hash(state);
                b.hash(state)
            }
            ModelElement::RootCombo(v) => {
                2u8.hash(state);
                v.hash(state)
            }
        }
    }
}

impl PartialOrd for ModelElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of the real line.
impl Ord for ModelElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Display for ModelElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.canonical() {
            ModelElement::RatPoint(s) => f.write_str(&fmt_scalar(&s)),
            ModelElement::QuadPoint(a, b) => {
                let mut out = String::new();
                write_combo(&mut out, &a, &[(b, 2)]);
                f.write_str(&out)
            }
            ModelElement::RootCombo(v) => {
                let ps = primes(v.len() - 1);
                let roots: Vec<(Scalar, u64)> = v[1..].iter().cloned().zip(ps).collect();
                let mut out = String::new();
                write_combo(&mut out, &v[0], &roots);
                f.write_str(&out)
            }
        }
    }
}

fn write_combo(out: &mut String, rational: &Scalar, roots: &[(Scalar, u64)]) {
    let mut first = true;
    if !rational.is_zero() {
        out.push_str(&fmt_scalar(rational));
        first = false;
    }
    for (c, p) in roots {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if c.is_negative() {
            out.push('-');
        } else if !first {
            out.push('+');
        }
        if !mag.is_one() {
            out.push_str(&fmt_scalar(&mag));
            out.push('*');
        }
        out.push_str(&format!("sqrt{p}"));
        first = false;
    }
    if first {
        out.push('0');
    }
}

impl serde::Serialize for ModelElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The carrier of an oracle model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Integer,
    Rational,
    Quadratic,
    RootCombination(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleModel {
    pub signature: Signature,
    pub kind: ElementKind,
}

impl OracleModel {
    pub fn for_signature(sig: Signature) -> OracleModel {
        let kind = match sig {
            Signature::Doag | Signature::T0Mixed => ElementKind::Rational,
            Signature::Presburger => ElementKind::Integer,
            Signature::T1Coset | Signature::TFull => ElementKind::Quadratic,
            Signature::TnHamel(n) => ElementKind::RootCombination(n),
        };
        OracleModel {
            signature: sig,
            kind,
        }
    }

    /// Whether `e` lives in this model's carrier.
    pub fn contains(&self, e: &ModelElement) -> bool {
        match (self.kind, e.canonical()) {
            (ElementKind::Integer, e) => e.is_integer(),
            (_, ModelElement::RatPoint(_)) => true,
            (ElementKind::Quadratic, ModelElement::QuadPoint(..)) => true,
            (ElementKind::RootCombination(n), ModelElement::RootCombo(v)) => v.len() <= n as usize + 1,
            _ => false,
        }
    }
}

pub fn eval_term(t: &Term, asg: &Assignment) -> Result<ModelElement> {
    Ok(match t {
        Term::Var(v) => asg
            .get(v)
            .cloned()
            .ok_or_else(|| Error::Eval(format!("variable `{v}` is unassigned")))?,
        Term::Const(c) => ModelElement::RatPoint(c.clone()),
        Term::Add(a, b) => eval_term(a, asg)?.add(&eval_term(b, asg)?),
        Term::Scale(c, a) => eval_term(a, asg)?.scale(c),
        Term::Floor(a) => ModelElement::RatPoint(Scalar::from_integer(eval_term(a, asg)?.floor()?)),
        Term::Proj(i, a) => eval_term(a, asg)?.proj(*i)?,
    })
}

pub fn eval_normal(t: &NormalTerm, asg: &Assignment) -> Result<ModelElement> {
    let mut acc = ModelElement::RatPoint(t.constant.clone());
    for (v, c) in &t.linear_part {
        let x = asg
            .get(v)
            .ok_or_else(|| Error::Eval(format!("variable `{v}` is unassigned")))?;
        acc = acc.add(&x.scale(c));
    }
    for ((i, v), c) in &t.proj_parts {
        let x = asg
            .get(v)
            .ok_or_else(|| Error::Eval(format!("variable `{v}` is unassigned")))?;
        acc = acc.add(&x.proj(*i)?.scale(c));
    }
    for (arg, c) in &t.floor_parts {
        let fl = eval_normal(arg, asg)?.floor()?;
        acc = acc.add(&ModelElement::RatPoint(Scalar::from_integer(fl) * c));
    }
    Ok(acc)
}

pub fn eval_atom(a: &Atom, asg: &Assignment) -> Result<bool> {
    Ok(match a {
        Atom::Lt(s, t) => eval_term(s, asg)?.cmp_value(&eval_term(t, asg)?) == Ordering::Less,
        Atom::Eq(s, t) => eval_term(s, asg)? == eval_term(t, asg)?,
        Atom::InZ(s) => eval_term(s, asg)?.is_integer(),
        Atom::InQ(s) => eval_term(s, asg)?.is_rational(),
    })
}

/// Truth value of a quantifier-free formula under `asg`.
pub fn eval_qf(f: &Formula, asg: &Assignment, model: &OracleModel) -> Result<bool> {
    let _ = model;
    Ok(match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(a) => eval_atom(a, asg)?,
        Formula::Not(g) => !eval_qf(g, asg, model)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_qf(g, asg, model)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_qf(g, asg, model)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            return Err(Error::Eval(format!("`{f}` is not quantifier-free")))
        }
    })
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    let n = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=bound);
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

fn random_nonzero_rational(rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    loop {
        let r = random_rational(rng, bound);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Deterministic pseudo-random elements with numerators and denominators
/// bounded by `bound`. Elements cycle through the strata of the carrier
/// (rational and irrational for the quadratic model; each single root and a
/// full combination for root combinations).
pub fn sample(model: &OracleModel, count: usize, bound: i64, seed: u64) -> Vec<ModelElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = bound.max(1);
    (0..count)
        .map(|i| match model.kind {
            ElementKind::Integer => ModelElement::int(rng.gen_range(-bound..=bound)),
            ElementKind::Rational => ModelElement::RatPoint(random_rational(&mut rng, bound)),
            ElementKind::Quadratic => {
                let a = random_rational(&mut rng, bound);
                if i % 2 == 0 {
                    ModelElement::RatPoint(a)
                } else {
                    ModelElement::QuadPoint(a, random_nonzero_rational(&mut rng, bound))
                }
            }
            ElementKind::RootCombination(n) => {
                let n = n as usize;
                let stratum = i % (n + 2);
                let mut v = vec![Scalar::zero(); n + 1];
                v[0] = random_rational(&mut rng, bound);
                if stratum == n + 1 {
                    for c in v.iter_mut().skip(1) {
                        *c = random_rational(&mut rng, bound);
                    }
                } else if stratum >= 1 {
                    v[stratum] = random_nonzero_rational(&mut rng, bound);
                }
                ModelElement::RootCombo(v).canonical()
            }
        })
        .collect()
}
