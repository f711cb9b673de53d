//! Pattern files.
//!
//! ```text
//! # comment
//! theory t                 # signature flag, required
//! var x                    # object variable, default x
//! grid 0..64               # optional brute-force backend (integers lo..hi)
//! grid 1/2, 1, 3/2         # or an explicit list of values
//! const c0, c1             # symbolic constants
//! assume ~Q(c0 - c1)       # one quantifier-free formula over the constants
//! row 2 (a): a < x & x < a + 1/2
//! col 0                    # one parameter tuple per line
//! col 1
//! ```

use super::{Backend, ParamValue, PatternRow, PatternSpec};
use crate::error::{Error, Result};
use crate::model::ModelElement;
use crate::parse::parse;
use crate::syntax::Signature;

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("line {line}: {msg}"))
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn parse_grid(s: &str, line: usize) -> Result<Vec<ModelElement>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| err(line, "bad grid bound"))?;
        let hi: i64 = hi.trim().parse().map_err(|_| err(line, "bad grid bound"))?;
        return Ok((lo..=hi).map(ModelElement::int).collect());
    }
    let mut v = split_list(s)
        .into_iter()
        .map(ModelElement::parse)
        .collect::<Result<Vec<_>>>()?;
    v.sort();
    v.dedup();
    Ok(v)
}

pub fn parse_pattern(text: &str) -> Result<PatternSpec> {
    let mut sig: Option<Signature> = None;
    let mut var = "x".to_string();
    let mut grid: Option<Vec<ModelElement>> = None;
    let mut constants: Vec<String> = Vec::new();
    let mut assume_text: Vec<(usize, String)> = Vec::new();
    // (line, k, vars, formula text, columns)
    let mut rows: Vec<(usize, usize, Vec<String>, String, Vec<(usize, String)>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "theory" => sig = Some(rest.parse().map_err(|e| err(n, e))?),
            "var" => var = rest.to_string(),
            "grid" => grid = Some(parse_grid(rest, n)?),
            "const" => constants.extend(split_list(rest).into_iter().map(String::from)),
            "assume" => assume_text.push((n, rest.to_string())),
            "row" => {
                let (head, formula) = rest.split_once(':').ok_or_else(|| err(n, "expected `row <k> (<params>): <formula>`"))?;
                let (k, vars) = head.trim().split_once('(').ok_or_else(|| err(n, "missing parameter list"))?;
                let k: usize = k.trim().parse().map_err(|_| err(n, "bad k"))?;
                let vars = vars.trim().strip_suffix(')').ok_or_else(|| err(n, "unclosed parameter list"))?;
                let vars = split_list(vars).into_iter().map(String::from).collect();
                rows.push((n, k, vars, formula.trim().to_string(), vec![]));
            }
            "col" => {
                let row = rows.last_mut().ok_or_else(|| err(n, "`col` before any `row`"))?;
                row.4.push((n, rest.to_string()));
            }
            other => return Err(err(n, format!("unknown keyword `{other}`"))),
        }
    }
    let sig = sig.ok_or_else(|| Error::Input("missing `theory` line".into()))?;
    let assumptions = assume_text
        .iter()
        .map(|(n, t)| parse(t, sig).map_err(|e| err(*n, e)))
        .collect::<Result<Vec<_>>>()?;
    let mut out_rows = Vec::new();
    for (n, k, vars, ftext, cols) in rows {
        let formula = parse(&ftext, sig).map_err(|e| err(n, e))?;
        let mut params = Vec::new();
        for (cn, c) in cols {
            let tuple = split_list(&c)
                .into_iter()
                .map(|p| {
                    if constants.iter().any(|k| k == p) {
                        Ok(ParamValue::Symbol(p.to_string()))
                    } else {
                        ModelElement::parse(p).map(ParamValue::Element).map_err(|e| err(cn, e))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            params.push(tuple);
        }
        out_rows.push(PatternRow { formula, param_vars: vars, k, params });
    }
    let backend = match grid {
        Some(g) => Backend::FiniteGrid(sig, g),
        None => Backend::Theory(sig),
    };
    Ok(PatternSpec { var, rows: out_rows, backend, constants, assumptions })
}
