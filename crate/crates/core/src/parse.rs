//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! term    ::= var | rat | term + term | term - term | rat * term | term / rat
//!           | floor(term) | pi<i>(term) | (term)
//! atom    ::= term < term | term <= term | term = term | term > term
//!           | term >= term | term != term | Z(term) | Q(term)
//! formula ::= atom | true | false | ~formula | formula & formula
//!           | formula | formula | formula -> formula
//!           | E x. formula | A x. formula | (formula)
//! ```
//!
//! Precedence from tightest: `~`, `&`, `|`, `->` (right associative).
//! Quantifier bodies extend as far right as possible.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::syntax::{Formula, Signature, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Scalar),
    Sym(&'static str),
    Upper(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_lowercase() {
            while i < bytes.len()
                && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let num: BigInt = text[start..i].parse().unwrap();
            let mut value = Scalar::from_integer(num);
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                let dstart = i + 1;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let den: BigInt = text[dstart..i].parse().unwrap();
                if den.is_zero() {
                    return Err(Error::Syntax {
                        pos: dstart,
                        msg: "zero denominator".into(),
                    });
                }
                value /= Scalar::from_integer(den);
            }
            out.push((start, Tok::Num(value)));
            continue;
        }
        if c.is_ascii_uppercase() {
            out.push((start, Tok::Upper(c)));
            i += 1;
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let sym: &'static str = match two {
            "<=" => "<=",
            ">=" => ">=",
            "->" => "->",
            "!=" => "!=",
            _ => match c {
                '<' => "<",
                '>' => ">",
                '=' => "=",
                '+' => "+",
                '-' => "-",
                '*' => "*",
                '/' => "/",
                '(' => "(",
                ')' => ")",
                '~' => "~",
                '&' => "&",
                '|' => "|",
                '.' => ".",
                ',' => ",",
                _ => {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            },
        };
        i += sym.len();
        out.push((start, Tok::Sym(sym)));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.err(format!("expected `{sym}`"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if let Some(Tok::Upper('E' | 'A')) = self.peek() {
            return self.quantifier();
        }
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantifier(&mut self) -> Result<Formula> {
        let universal = matches!(self.peek(), Some(Tok::Upper('A')));
        self.pos += 1;
        let v = match self.peek() {
            Some(Tok::Ident(v)) if !is_keyword(v) => v.clone(),
            _ => return self.err("expected a variable after quantifier"),
        };
        self.pos += 1;
        self.expect(".")?;
        let body = self.formula()?;
        Ok(if universal {
            Formula::forall(&v, body)
        } else {
            Formula::exists(&v, body)
        })
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat("|") {
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat("&") {
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Sym("~")) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Upper('E' | 'A')) => self.quantifier(),
            Some(Tok::Upper(c @ ('Z' | 'Q'))) => {
                let c = *c;
                self.pos += 1;
                self.expect("(")?;
                let t = self.term()?;
                self.expect(")")?;
                Ok(if c == 'Z' {
                    Formula::in_z(t)
                } else {
                    Formula::in_q(t)
                })
            }
            Some(Tok::Ident(w)) if w == "true" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Ident(w)) if w == "false" => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::Sym("(")) => {
                // Either a parenthesised formula or an atom starting with a
                // parenthesised term; try the atom first and backtrack.
                let save = self.pos;
                if let Ok(a) = self.comparison() {
                    return Ok(a);
                }
                self.pos = save;
                self.pos += 1;
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            Some(_) => self.comparison(),
            None => self.err("unexpected end of input"),
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Some(Tok::Sym(s @ ("<" | "<=" | "=" | ">" | ">=" | "!="))) => *s,
            _ => return self.err("expected a comparison operator"),
        };
        self.pos += 1;
        let rhs = self.term()?;
        Ok(match op {
            "<" => Formula::lt(lhs, rhs),
            "<=" => Formula::le(lhs, rhs),
            "=" => Formula::eq(lhs, rhs),
            ">" => Formula::lt(rhs, lhs),
            ">=" => Formula::le(rhs, lhs),
            _ => Formula::not(Formula::eq(lhs, rhs)),
        })
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.product()?;
        loop {
            if self.eat("+") {
                acc = Term::add(acc, self.product()?);
            } else if self.eat("-") {
                acc = Term::sub(acc, self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        // rat * product
        let coefficient = match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Some(Tok::Num(n)), Some(Tok::Sym("*")), _) => Some((n.clone(), 2)),
            (Some(Tok::Sym("-")), Some(Tok::Num(n)), Some(Tok::Sym("*"))) => Some((-n.clone(), 3)),
            _ => None,
        };
        if let Some((c, skip)) = coefficient {
            self.pos += skip;
            let inner = self.product()?;
            return Ok(Term::scale(c, inner));
        }
        let mut t = self.factor()?;
        while self.eat("/") {
            let d = match self.peek() {
                Some(Tok::Num(d)) if !d.is_zero() => d.clone(),
                _ => return self.err("expected a non-zero rational divisor"),
            };
            self.pos += 1;
            t = Term::scale(Scalar::one() / d, t);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Term::Const(n))
            }
            Some(Tok::Sym("-")) => {
                self.pos += 1;
                if let Some(Tok::Num(n)) = self.peek().cloned() {
                    self.pos += 1;
                    return Ok(Term::Const(-n));
                }
                Ok(Term::neg(self.factor()?))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            Some(Tok::Ident(w)) if w == "floor" => {
                self.pos += 1;
                self.expect("(")?;
                let t = self.term()?;
                self.expect(")")?;
                Ok(Term::floor(t))
            }
            Some(Tok::Ident(w)) if proj_index(&w).is_some() => {
                self.pos += 1;
                self.expect("(")?;
                let t = self.term()?;
                self.expect(")")?;
                Ok(Term::proj(proj_index(&w).unwrap(), t))
            }
            Some(Tok::Ident(w)) if !is_keyword(&w) => {
                self.pos += 1;
                Ok(Term::Var(w))
            }
            _ => self.err("expected a term"),
        }
    }
}

fn proj_index(w: &str) -> Option<u32> {
    let digits = w.strip_prefix("pi")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "floor" | "true" | "false") || proj_index(w).is_some()
}

/// Parses without signature validation.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
        _src: text,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses a formula and validates it against `sig`.
pub fn parse(text: &str, sig: Signature) -> Result<Formula> {
    let f = parse_formula(text)?;
    f.validate(sig)?;
    Ok(f)
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
        _src: text,
    };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn parses_existential_interval() {
        let f = parse("E x. (0 < x & x < 1)", Signature::Doag).unwrap();
        let expected = Formula::exists(
            "x",
            Formula::and(vec![
                Formula::lt(Term::Const(int(0)), Term::var("x")),
                Formula::lt(Term::var("x"), Term::Const(int(1))),
            ]),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_floor_under_z() {
        let f = parse("Z(floor(y))", Signature::T0Mixed).unwrap();
        assert_eq!(f, Formula::in_z(Term::floor(Term::var("y"))));
    }

    #[test]
    fn rejects_q_in_presburger() {
        let e = parse("Q(x)", Signature::Presburger).unwrap_err();
        assert!(matches!(e, Error::Signature { .. }), "{e:?}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_formula("x < ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("x < 1/0").is_err());
        assert!(parse_formula("x $ y").is_err());
    }

    #[test]
    fn sugar() {
        assert_eq!(
            parse_formula("x/2 > 1").unwrap(),
            Formula::lt(Term::Const(int(1)), Term::scale(rat(1, 2), Term::var("x")))
        );
        assert_eq!(
            parse_formula("a = 0 -> b = 0").unwrap(),
            Formula::implies(
                Formula::eq(Term::var("a"), Term::Const(int(0))),
                Formula::eq(Term::var("b"), Term::Const(int(0)))
            )
        );
        assert_eq!(
            parse_formula("x != 1").unwrap(),
            Formula::not(Formula::eq(Term::var("x"), Term::Const(int(1))))
        );
    }

    #[test]
    fn parenthesised_term_versus_formula() {
        let f = parse_formula("(x + 1) < y & (y < 2 | y = 3)").unwrap();
        assert!(matches!(f, Formula::And(ref v) if v.len() == 2));
    }

    #[test]
    fn printer_round_trips_examples() {
        for s in [
            "E x. 0 < x & x < 1",
            "~Z(y)",
            "pi1(y) = y",
            "x - 1/2 * (y + -3) < floor(2 * x)",
            "A x. E y. x < y",
            "(a < b | b < a) & ~(E z. z = a)",
        ] {
            let f = parse_formula(s).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{s} -> {printed}");
        }
    }
}
