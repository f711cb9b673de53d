//! Printer for the ASCII formula grammar. Output re-parses to the same tree.

use std::fmt;

use num_traits::One;

use crate::scalar::fmt_scalar;
use crate::syntax::{Atom, Formula, Term};

fn is_minus_one(c: &crate::scalar::Scalar) -> bool {
    (-c).is_one()
}

fn fmt_factor(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Add(..) => write!(f, "({t})"),
        _ => write!(f, "{t}"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(&fmt_scalar(c)),
            Term::Add(a, b) => {
                write!(f, "{a}")?;
                match &**b {
                    Term::Scale(c, inner) if is_minus_one(c) => {
                        f.write_str(" - ")?;
                        fmt_factor(inner, f)
                    }
                    Term::Add(..) => write!(f, " + ({b})"),
                    _ => write!(f, " + {b}"),
                }
            }
            Term::Scale(c, a) => {
                write!(f, "{} * ", fmt_scalar(c))?;
                fmt_factor(a, f)
            }
            Term::Floor(a) => write!(f, "floor({a})"),
            Term::Proj(i, a) => write!(f, "pi{i}({a})"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Lt(a, b) => write!(f, "{a} < {b}"),
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
            Atom::InZ(a) => write!(f, "Z({a})"),
            Atom::InQ(a) => write!(f, "Q({a})"),
        }
    }
}

fn fmt_operand(g: &Formula, f: &mut fmt::Formatter<'_>, parent_and: bool) -> fmt::Result {
    let needs_parens = match g {
        Formula::Or(_) | Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::And(_) => parent_and,
        _ => false,
    };
    if needs_parens {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Bot => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => match &**g {
                Formula::Atom(_) | Formula::Top | Formula::Bot | Formula::Not(_) => write!(f, "~{g}"),
                _ => write!(f, "~({g})"),
            },
            Formula::And(gs) | Formula::Or(gs) => {
                let is_and = matches!(self, Formula::And(_));
                let sep = if is_and { " & " } else { " | " };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    fmt_operand(g, f, is_and)?;
                }
                Ok(())
            }
            Formula::Exists(v, g) => write!(f, "E {v}. {g}"),
            Formula::Forall(v, g) => write!(f, "A {v}. {g}"),
        }
    }
}
