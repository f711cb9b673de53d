//! Fourier–Motzkin elimination over divisible ordered Abelian groups.

use num_traits::Signed;

use super::lit::{simplify_dnf, Conj, Dnf, Lit, Rel};
use crate::error::{Error, Result};
use crate::normal::NormalTerm;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub value: NormalTerm,
    pub strict: bool,
}

/// The literals of a conjunction sorted by how they constrain one variable.
#[derive(Debug, Clone, Default)]
pub struct Bounds {
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    /// Values the variable is pinned to.
    pub pinned: Vec<NormalTerm>,
    /// Literals free of the variable.
    pub rest: Conj,
    /// `Z`/`Q` literals on the variable.
    pub membership: Conj,
}

/// Solves `a*var + r rel 0` for var.
fn solve(var: &str, t: &NormalTerm) -> (Scalar, NormalTerm) {
    let a = t.coeff(var);
    let value = t.without(var).scale(&(-a.recip()));
    (a, value)
}

pub fn split_bounds(var: &str, conj: &[Lit]) -> Result<Bounds> {
    let mut b = Bounds::default();
    for lit in conj {
        if !lit.contains_var(var) {
            b.rest.push(lit.clone());
            continue;
        }
        if lit.term().has_nonlinear(var) {
            return Err(Error::Engine(format!(
                "non-linear occurrence of {var} in {}",
                lit.to_formula()
            )));
        }
        match lit {
            Lit::Cmp(rel, t) => {
                let (a, value) = solve(var, t);
                match rel {
                    Rel::Eq => b.pinned.push(value),
                    _ => {
                        let bound = Bound { value, strict: *rel == Rel::Lt };
                        if a.is_positive() {
                            b.upper.push(bound);
                        } else {
                            b.lower.push(bound);
                        }
                    }
                }
            }
            _ => b.membership.push(lit.clone()),
        }
    }
    Ok(b)
}

/// Substitutes `var := value` through a conjunction.
pub fn substitute_conj(conj: &[Lit], var: &str, value: &NormalTerm) -> Conj {
    conj.iter().map(|l| l.substitute(var, value)).collect()
}

/// Pairwise combination of lower and upper bounds. With `force_strict` every
/// pair must leave an open interval.
pub fn combine(lower: &[Bound], upper: &[Bound], force_strict: bool) -> Conj {
    let mut out = Vec::with_capacity(lower.len() * upper.len());
    for l in lower {
        for u in upper {
            let rel = if force_strict || l.strict || u.strict { Rel::Lt } else { Rel::Le };
            out.push(Lit::Cmp(rel, l.value.sub(&u.value)));
        }
    }
    out
}

/// Eliminates `var` from a conjunction of order literals.
pub fn fm_conj(var: &str, conj: &[Lit]) -> Result<Dnf> {
    let b = split_bounds(var, conj)?;
    if let Some(l) = b.membership.first() {
        return Err(Error::Engine(format!(
            "membership literal {} is outside the order fragment",
            l.to_formula()
        )));
    }
    if let Some(value) = b.pinned.first() {
        return Ok(simplify_dnf(vec![substitute_conj(conj, var, value)]));
    }
    let mut out = b.rest;
    out.extend(combine(&b.lower, &b.upper, false));
    Ok(simplify_dnf(vec![out]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::qe::lit::{dnf, dnf_to_formula};

    fn run(text: &str) -> String {
        let d = dnf(&parse_formula(text).unwrap());
        let mut out = Vec::new();
        for c in d {
            out.extend(fm_conj("x", &c).unwrap());
        }
        dnf_to_formula(&simplify_dnf(out)).to_string()
    }

    #[test]
    fn density() {
        assert_eq!(run("a < x & x < b"), "a < b");
    }

    #[test]
    fn equality_first() {
        assert_eq!(run("x = y + z & 0 < x"), "0 < y + z");
    }

    #[test]
    fn scaled_bounds() {
        assert_eq!(run("2 * x < y & z < 3 * x"), "2 * z < 3 * y");
    }

    #[test]
    fn unbounded_side_is_top() {
        assert_eq!(run("a < x & b <= x"), "true");
    }

    #[test]
    fn non_strict_pair() {
        assert_eq!(run("a <= x & x <= b"), "a < b | a = b");
    }
}
