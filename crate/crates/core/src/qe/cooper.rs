//! Cooper-style elimination for Presburger arithmetic. Divisibility `d | t`
//! is carried as `Z(t/d)`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::lit::{simplify_dnf, Conj, Dnf, Lit, Rel};
use crate::error::{Error, Result};
use crate::normal::NormalTerm;
use crate::scalar::{lcm, Scalar};

#[derive(Debug, Clone)]
enum CLit {
    /// `t < 0`
    Lt(NormalTerm),
    /// `t = 0`
    Eq(NormalTerm),
    /// `d | t` (or its negation)
    Div(BigInt, bool, NormalTerm),
}

impl CLit {
    fn term(&self) -> &NormalTerm {
        match self {
            CLit::Lt(t) | CLit::Eq(t) | CLit::Div(_, _, t) => t,
        }
    }

    fn substitute(&self, v: &str, repl: &NormalTerm) -> CLit {
        match self {
            CLit::Lt(t) => CLit::Lt(t.substitute(v, repl)),
            CLit::Eq(t) => CLit::Eq(t.substitute(v, repl)),
            CLit::Div(d, p, t) => CLit::Div(d.clone(), *p, t.substitute(v, repl)),
        }
    }

    fn to_lit(&self) -> Lit {
        match self {
            CLit::Lt(t) => Lit::lt(t.clone()),
            CLit::Eq(t) => Lit::eq(t.clone()),
            CLit::Div(d, p, t) => Lit::Z(*p, t.scale(&Scalar::new(BigInt::one(), d.clone()))),
        }
    }
}

fn clear(t: &NormalTerm) -> (BigInt, NormalTerm) {
    let m = t.denominator_lcm();
    let scaled = t.scale(&Scalar::from_integer(m.clone()));
    (m, scaled)
}

/// Integer-coefficient form of a literal; every variable and integer part
/// is assumed integer-valued.
fn to_clit(lit: &Lit) -> Result<CLit> {
    Ok(match lit {
        Lit::Cmp(Rel::Lt, t) => CLit::Lt(clear(t).1),
        Lit::Cmp(Rel::Le, t) => CLit::Lt(clear(t).1.plus_constant(&-Scalar::one())),
        Lit::Cmp(Rel::Eq, t) => CLit::Eq(clear(t).1),
        Lit::Z(p, t) => {
            let (m, s) = clear(t);
            CLit::Div(m, *p, s)
        }
        Lit::Q(..) => {
            return Err(Error::Engine(format!(
                "{} is not a Presburger literal",
                lit.to_formula()
            )))
        }
    })
}

fn int_coeff(t: &NormalTerm, var: &str) -> BigInt {
    t.coeff(var).to_integer()
}

/// Eliminates `var` from a conjunction whose variables all range over the
/// integers.
pub fn cooper_conj(var: &str, conj: &[Lit]) -> Result<Dnf> {
    let mut rest: Conj = Vec::new();
    let mut lits: Vec<CLit> = Vec::new();
    for l in conj {
        if !l.contains_var(var) {
            rest.push(l.clone());
            continue;
        }
        if l.term().has_nonlinear(var) {
            return Err(Error::Engine(format!(
                "non-linear occurrence of {var} in {}",
                l.to_formula()
            )));
        }
        lits.push(to_clit(l)?);
    }
    if lits.is_empty() {
        return Ok(simplify_dnf(vec![rest]));
    }

    // Scale every literal so that var has coefficient ±L, then write y = L*var.
    let big_l = lits
        .iter()
        .fold(BigInt::one(), |acc, c| lcm(&acc, &int_coeff(c.term(), var).abs()));
    let y = NormalTerm::var(var);
    let rescale = |t: &NormalTerm, k: &BigInt| -> NormalTerm {
        let scaled = t.scale(&Scalar::from_integer(k.clone()));
        let sign = scaled.coeff(var).signum();
        scaled.without(var).add(&y.scale(&sign))
    };
    let mut ys: Vec<CLit> = lits
        .iter()
        .map(|c| {
            let a = int_coeff(c.term(), var);
            let k = &big_l / a.abs();
            match c {
                CLit::Lt(t) => CLit::Lt(rescale(t, &k)),
                CLit::Eq(t) => CLit::Eq(rescale(t, &(&big_l / &a))),
                CLit::Div(d, p, t) => CLit::Div(d * &k, *p, rescale(t, &k)),
            }
        })
        .collect();
    if !big_l.is_one() {
        ys.push(CLit::Div(big_l.clone(), true, y.clone()));
    }

    let emit = |chosen: &[CLit], rest: &Conj| -> Conj {
        let mut c = rest.clone();
        c.extend(chosen.iter().map(CLit::to_lit));
        c
    };

    if let Some(pos) = ys.iter().position(|c| matches!(c, CLit::Eq(_))) {
        let t = ys[pos].term();
        // t = y + r with coefficient +1
        let value = t.without(var).neg();
        let subst: Vec<CLit> = ys
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, c)| c.substitute(var, &value))
            .collect();
        return Ok(simplify_dnf(vec![emit(&subst, &rest)]));
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut delta = BigInt::one();
    for c in &ys {
        match c {
            CLit::Lt(t) => {
                if t.coeff(var).is_negative() {
                    // -y + r < 0, y > r
                    lower.push(t.without(var));
                } else {
                    // y + r < 0, y < -r
                    upper.push(t.without(var).neg());
                }
            }
            CLit::Div(d, _, _) => delta = lcm(&delta, d),
            CLit::Eq(_) => unreachable!(),
        }
    }

    let use_lower = lower.len() <= upper.len();
    let (bounds, step) = if use_lower {
        (&lower, Scalar::one())
    } else {
        (&upper, -Scalar::one())
    };
    let mut out: Dnf = Vec::new();
    let delta_u = delta.to_string().parse::<u64>().map_err(|_| {
        Error::Engine(format!("divisibility period {delta} is too large"))
    })?;
    if bounds.is_empty() {
        // var unbounded on the chosen side: only divisibility matters
        let divs: Vec<&CLit> = ys.iter().filter(|c| matches!(c, CLit::Div(..))).collect();
        for j in 1..=delta_u {
            let value = NormalTerm::constant(&step * Scalar::from_integer(j.into()));
            let subst: Vec<CLit> = divs.iter().map(|c| c.substitute(var, &value)).collect();
            out.push(emit(&subst, &rest));
        }
    } else {
        for b in bounds {
            for j in 1..=delta_u {
                let value = b.plus_constant(&(&step * Scalar::from_integer(j.into())));
                let subst: Vec<CLit> = ys.iter().map(|c| c.substitute(var, &value)).collect();
                out.push(emit(&subst, &rest));
            }
        }
    }
    Ok(simplify_dnf(out))
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
            out.extend(cooper_conj("x", &c).unwrap());
        }
        dnf_to_formula(&simplify_dnf(out)).to_string()
    }

    #[test]
    fn halving() {
        assert_eq!(run("2 * x = y"), "Z(1/2 * y)");
    }

    #[test]
    fn gap_of_two() {
        assert_eq!(run("y < x & x < y + 2"), "true");
    }

    #[test]
    fn no_common_multiple_below_fifteen() {
        assert_eq!(run("Z(x/3) & Z(x/5) & 0 < x & x < 15"), "false");
    }
}
