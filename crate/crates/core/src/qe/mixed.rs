//! Elimination in the theories with an integer part: the variable is split
//! into an integer `n` and a fraction `u` in `[0,1)`, integer parts of terms
//! in `n` and `u` are resolved by finite case analysis, `u` is eliminated
//! over the dense line and `n` by the Presburger procedure.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::coset::coset_conj;
use super::cooper::cooper_conj;
use super::fm::fm_conj;
use super::lit::{drop_rational_parts, simplify_conj, Conj, Dnf, Lit, Rel};
use crate::error::{Error, Result};
use crate::normal::NormalTerm;
use crate::scalar::{ceil_int, floor_int, is_integer, Scalar};

/// Name of the fractional part.
pub const FRAC: &str = "_u";

/// One branch of the case analysis: literals in the integer variable and
/// [`FRAC`], free of integer parts of either.
#[derive(Debug, Clone)]
pub struct Piece {
    pub lits: Conj,
    pub int_var: String,
    /// The integer part of the eliminated variable, in terms of `int_var`.
    pub int_expr: NormalTerm,
}

fn int_name(i: usize) -> String {
    format!("_k{i}")
}

fn innermost_floor(lits: &[Lit], n: &str) -> Option<NormalTerm> {
    for l in lits {
        let mut args = Vec::new();
        l.term().floor_args(&mut args);
        if let Some(a) = args.into_iter().find(|a| a.contains_var(n) || a.contains_var(FRAC)) {
            return Some(a);
        }
    }
    None
}

fn replace_floor_conj(lits: &[Lit], target: &NormalTerm, repl: &NormalTerm) -> Conj {
    lits.iter()
        .map(|l| l.map_term(|t| t.replace_floor(target, repl)))
        .collect()
}

fn int(n: BigInt) -> Scalar {
    Scalar::from_integer(n)
}

/// Splits `var` and resolves every integer part that depends on it.
pub fn decompose(var: &str, conj: &[Lit], with_q: bool) -> Result<Vec<Piece>> {
    let k0 = int_name(0);
    let split = NormalTerm::var(&k0).add(&NormalTerm::var(FRAC));
    let u = NormalTerm::var(FRAC);
    let mut lits: Conj = vec![Lit::le(u.neg()), Lit::lt(u.plus_constant(&-Scalar::one()))];
    for l in conj {
        if !l.contains_var(var) {
            lits.push(l.clone());
            continue;
        }
        let l = l.substitute(var, &split);
        lits.push(match l {
            Lit::Z(pos, t) => {
                let gap = NormalTerm::floor_of(&t).sub(&t);
                if pos {
                    Lit::eq(gap)
                } else {
                    Lit::lt(gap)
                }
            }
            Lit::Q(pos, t) => {
                if !with_q {
                    return Err(Error::Engine("Q literal outside its signature".into()));
                }
                // integers are rational
                Lit::Q(pos, drop_rational_parts(&t.without(&k0)))
            }
            other => other,
        });
    }

    let mut counter = 1usize;
    let mut done = Vec::new();
    let mut work = vec![Piece { lits, int_var: k0.clone(), int_expr: NormalTerm::var(&k0) }];
    while let Some(piece) = work.pop() {
        let Some(lits) = simplify_conj(&piece.lits) else { continue };
        let n = piece.int_var.clone();
        let Some(arg) = innermost_floor(&lits, &n) else {
            done.push(Piece { lits, ..piece });
            continue;
        };
        let a = arg.coeff(&n);
        let b = arg.coeff(FRAC);
        let e = arg.without(&n).without(FRAC);
        if !is_integer(&a) {
            let s = a.denom().clone();
            let q = int_name(counter);
            counter += 1;
            let mut r = BigInt::zero();
            while r < s {
                let repl = NormalTerm::var(&q).scale(&int(s.clone())).plus_constant(&int(r.clone()));
                work.push(Piece {
                    lits: lits.iter().map(|l| l.substitute(&n, &repl)).collect(),
                    int_var: q.clone(),
                    int_expr: piece.int_expr.substitute(&n, &repl),
                });
                r += 1;
            }
            continue;
        }
        let fe = NormalTerm::floor_of(&e);
        let an = NormalTerm::var(&n).scale(&a);
        if b.is_zero() {
            let repl = an.add(&fe);
            work.push(Piece { lits: replace_floor_conj(&lits, &arg, &repl), ..piece });
            continue;
        }
        // floor(b*u + e) = floor(e) + j with j in the range of floor(b*u + {e})
        let (lo, hi) = if b.is_positive() {
            (BigInt::zero(), ceil_int(&b))
        } else {
            (floor_int(&b), BigInt::zero())
        };
        let bu_e = u.scale(&b).add(&e);
        let mut j = lo;
        while j <= hi {
            let base = fe.plus_constant(&int(j.clone()));
            let mut next = replace_floor_conj(&lits, &arg, &an.add(&base));
            next.push(Lit::le(base.sub(&bu_e)));
            next.push(Lit::lt(bu_e.sub(&base).plus_constant(&-Scalar::one())));
            work.push(Piece { lits: next, ..piece.clone() });
            j += 1;
        }
    }
    Ok(done)
}

/// Eliminates the fractional part of a piece.
pub fn eliminate_frac(lits: &[Lit], with_q: bool) -> Result<Dnf> {
    if with_q {
        coset_conj(FRAC, lits)
    } else {
        fm_conj(FRAC, lits)
    }
}

/// Rewrites literals in the integer variable `n` so that `n` has coefficient
/// ±1 and everything else in them is integer-valued.
pub fn integer_form(n: &str, conj: &[Lit]) -> Result<Conj> {
    let mut out = Vec::new();
    for l in conj {
        if !l.contains_var(n) {
            out.push(l.clone());
            continue;
        }
        if l.term().has_nonlinear(n) {
            return Err(Error::Engine(format!("integer part of {n} survived in {}", l.to_formula())));
        }
        match l {
            Lit::Cmp(rel, t) => {
                let c = t.coeff(n);
                let e = t.without(n).scale(&c.abs().recip());
                let sn = NormalTerm::var(n).scale(&c.signum());
                match rel {
                    Rel::Lt => out.push(Lit::lt(sn.add(&NormalTerm::floor_of(&e)))),
                    Rel::Le => out.push(Lit::le(sn.sub(&NormalTerm::floor_of(&e.neg())))),
                    Rel::Eq => {
                        out.push(Lit::Z(true, e.clone()));
                        out.push(Lit::eq(sn.add(&NormalTerm::floor_of(&e))));
                    }
                }
            }
            Lit::Q(p, t) => out.push(Lit::Q(*p, t.without(n))),
            Lit::Z(p, t) => {
                if !is_integer(&t.coeff(n)) {
                    return Err(Error::Engine(format!("unexpected literal {}", l.to_formula())));
                }
                out.push(Lit::Z(*p, t.without(n)));
            }
        }
    }
    Ok(out)
}

pub fn mixed_conj(var: &str, conj: &[Lit], with_q: bool) -> Result<Dnf> {
    let mut out = Vec::new();
    for piece in decompose(var, conj, with_q)? {
        for c in eliminate_frac(&piece.lits, with_q)? {
            let c = integer_form(&piece.int_var, &c)?;
            out.extend(cooper_conj(&piece.int_var, &c)?);
        }
    }
    Ok(super::lit::simplify_dnf(out))
}
