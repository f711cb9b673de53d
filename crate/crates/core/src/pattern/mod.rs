//! Finite checks of inp- and ict-pattern witnesses.
//!
//! A pattern of depth `d` and width `w` is an array of formula instances
//! `phi_a(x; b_{a,i})`. For an inp-pattern every `k_a` instances of a row are
//! jointly inconsistent and every path picking one instance per row is
//! consistent. For an ict-pattern each path, together with the negations of
//! the other instances in each row, is consistent.

pub mod file;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{eval_qf, Assignment, ModelElement, OracleModel};
use crate::par::{self, Strategy};
use crate::qe::assume::decide_with_assumptions;
use crate::qe::{find_witness, Assumptions};
use crate::syntax::{Formula, Signature, Term};

pub use file::parse_pattern;

/// Largest number of paths a check will enumerate.
pub const PATH_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Element(ModelElement),
    Symbol(String),
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Element(e) => write!(f, "{e}"),
            ParamValue::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PatternRow {
    pub formula: Formula,
    pub param_vars: Vec<String>,
    pub k: usize,
    /// One tuple per column, each of the arity of `param_vars`.
    pub params: Vec<Vec<ParamValue>>,
}

impl PatternRow {
    pub fn width(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Theory(Signature),
    /// Brute force over finitely many values of the object variable;
    /// formulas are evaluated in the oracle model of the signature.
    FiniteGrid(Signature, Vec<ModelElement>),
}

impl Backend {
    pub fn signature(&self) -> Signature {
        match self {
            Backend::Theory(s) | Backend::FiniteGrid(s, _) => *s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PatternSpec {
    pub var: String,
    pub rows: Vec<PatternRow>,
    pub backend: Backend,
    pub constants: Vec<String>,
    pub assumptions: Vec<Formula>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Inp,
    Ict,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "inp" => Ok(Mode::Inp),
            "ict" => Ok(Mode::Ict),
            other => Err(Error::Input(format!("unknown pattern mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowResult {
    Ok,
    /// These columns are jointly satisfiable.
    Satisfiable { columns: Vec<usize> },
    WidthBelowK { width: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathResult {
    pub path: Vec<usize>,
    pub ok: bool,
    pub witness: Option<ModelElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternVerdict {
    pub mode: Mode,
    pub row_results: Vec<RowResult>,
    pub path_results: Vec<PathResult>,
    pub valid: bool,
    pub notes: Vec<String>,
}

impl PatternVerdict {
    pub fn rows_ok(&self) -> usize {
        self.row_results.iter().filter(|r| **r == RowResult::Ok).count()
    }

    pub fn paths_ok(&self) -> usize {
        self.path_results.iter().filter(|p| p.ok).count()
    }

    pub fn first_failing_path(&self) -> Option<&PathResult> {
        self.path_results.iter().find(|p| !p.ok)
    }

    pub fn summary(&self) -> String {
        let head = if self.valid { "valid" } else { "invalid" };
        match self.mode {
            Mode::Inp => format!(
                "{head}, rows {}/{}, paths {}/{}",
                self.rows_ok(),
                self.row_results.len(),
                self.paths_ok(),
                self.path_results.len()
            ),
            Mode::Ict => format!("{head}, paths {}/{}", self.paths_ok(), self.path_results.len()),
        }
    }
}

/// One instance `phi_row(x; b_col)`, possibly negated.
#[derive(Debug, Clone, Copy)]
struct Instance {
    row: usize,
    col: usize,
    positive: bool,
}

struct Checker<'a> {
    spec: &'a PatternSpec,
    assumptions: Assumptions,
    model: OracleModel,
}

fn param_term(v: &ParamValue) -> Result<Term> {
    match v {
        ParamValue::Symbol(s) => Ok(Term::var(s)),
        ParamValue::Element(e) => e
            .as_rational()
            .map(Term::constant)
            .ok_or_else(|| Error::Input(format!("parameter {e} is not rational; use a constant with assumptions"))),
    }
}

impl<'a> Checker<'a> {
    fn new(spec: &'a PatternSpec) -> Result<Checker<'a>> {
        if spec.rows.is_empty() {
            return Err(Error::Input("a pattern needs at least one row".into()));
        }
        let sig = spec.backend.signature();
        for (i, r) in spec.rows.iter().enumerate() {
            r.formula.validate(sig)?;
            if let Some(t) = r.params.iter().find(|t| t.len() != r.param_vars.len()) {
                return Err(Error::Input(format!(
                    "row {i}: parameter tuple of arity {} for {} variables",
                    t.len(),
                    r.param_vars.len()
                )));
            }
        }
        let paths = spec.rows.iter().try_fold(1u128, |acc, r| acc.checked_mul(r.width() as u128));
        match paths {
            Some(p) if p <= PATH_LIMIT => {}
            _ => {
                return Err(Error::PathExplosion { paths: paths.unwrap_or(u128::MAX), limit: PATH_LIMIT });
            }
        }
        Ok(Checker {
            spec,
            assumptions: Assumptions::new(spec.constants.clone(), &spec.assumptions)?,
            model: OracleModel::for_signature(sig),
        })
    }

    fn formula(&self, inst: &Instance) -> Result<Formula> {
        let row = &self.spec.rows[inst.row];
        let mut f = row.formula.clone();
        for (v, p) in row.param_vars.iter().zip(&row.params[inst.col]) {
            f = f.substitute(v, &param_term(p)?);
        }
        Ok(if inst.positive { f } else { Formula::not(f) })
    }

    fn grid_holds(&self, inst: &Instance, x: &ModelElement) -> Result<bool> {
        let row = &self.spec.rows[inst.row];
        let mut asg = Assignment::new();
        asg.insert(self.spec.var.clone(), x.clone());
        for (v, p) in row.param_vars.iter().zip(&row.params[inst.col]) {
            match p {
                ParamValue::Element(e) => asg.insert(v.clone(), e.clone()),
                ParamValue::Symbol(s) => {
                    return Err(Error::Input(format!("constant {s} cannot be evaluated on a finite grid")))
                }
            };
        }
        Ok(eval_qf(&row.formula, &asg, &self.model)? == inst.positive)
    }

    /// Whether the instances are jointly satisfiable, with a witness when
    /// one is available.
    fn satisfiable(&self, insts: &[Instance], want_witness: bool) -> Result<(bool, Option<ModelElement>)> {
        match &self.spec.backend {
            Backend::FiniteGrid(_, grid) => {
                for x in grid {
                    let mut all = true;
                    for i in insts {
                        if !self.grid_holds(i, x)? {
                            all = false;
                            break;
                        }
                    }
                    if all {
                        return Ok((true, Some(x.clone())));
                    }
                }
                Ok((false, None))
            }
            Backend::Theory(sig) => {
                let body = Formula::and(insts.iter().map(|i| self.formula(i)).collect::<Result<Vec<_>>>()?);
                let sentence = Formula::exists(&self.spec.var, body.clone());
                let sat = decide_with_assumptions(&sentence, *sig, &self.assumptions)?;
                let witness = if sat && want_witness && self.spec.constants.is_empty() {
                    Some(find_witness(&self.spec.var, &body, &Assignment::new(), *sig)?)
                } else {
                    None
                };
                Ok((sat, witness))
            }
        }
    }

    fn row_result(&self, row: usize, strategy: Strategy) -> Result<RowResult> {
        let r = &self.spec.rows[row];
        if r.width() < r.k {
            return Ok(RowResult::WidthBelowK { width: r.width(), k: r.k });
        }
        let subsets = combinations(r.width(), r.k);
        let found = par::map(strategy, &subsets, |cols| -> Result<bool> {
            let insts: Vec<Instance> = cols.iter().map(|&col| Instance { row, col, positive: true }).collect();
            Ok(self.satisfiable(&insts, false)?.0)
        });
        for (cols, f) in subsets.iter().zip(found) {
            if f? {
                return Ok(RowResult::Satisfiable { columns: cols.clone() });
            }
        }
        Ok(RowResult::Ok)
    }

    fn path_result(&self, path: &[usize], mode: Mode) -> Result<PathResult> {
        let mut insts = Vec::new();
        for (row, &col) in path.iter().enumerate() {
            insts.push(Instance { row, col, positive: true });
            if mode == Mode::Ict {
                for other in (0..self.spec.rows[row].width()).filter(|c| *c != col) {
                    insts.push(Instance { row, col: other, positive: false });
                }
            }
        }
        let (ok, witness) = self.satisfiable(&insts, true)?;
        Ok(PathResult { path: path.to_vec(), ok, witness })
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn paths(widths: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &w in widths {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..w).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn check_with(spec: &PatternSpec, mode: Mode, strategy: Strategy) -> Result<PatternVerdict> {
    let c = Checker::new(spec)?;
    let row_results = match mode {
        Mode::Inp => (0..spec.rows.len())
            .map(|r| c.row_result(r, strategy))
            .collect::<Result<Vec<_>>>()?,
        Mode::Ict => vec![],
    };
    let widths: Vec<usize> = spec.rows.iter().map(|r| r.width()).collect();
    let ps = paths(&widths);
    let path_results = par::map(strategy, &ps, |p| c.path_result(p, mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let valid = row_results.iter().all(|r| *r == RowResult::Ok) && path_results.iter().all(|p| p.ok);
    let mut notes = vec![
        "depth and width are finite; path consistency at this width is evidence, not proof".to_string(),
        "mutual indiscernibility of the parameter arrays is not checked".to_string(),
    ];
    if !spec.constants.is_empty() {
        notes.push("paths over symbolic constants carry no witness".to_string());
    }
    Ok(PatternVerdict { mode, row_results, path_results, valid, notes })
}

pub fn check_inp(spec: &PatternSpec) -> Result<PatternVerdict> {
    check_with(spec, Mode::Inp, Strategy::default())
}

pub fn check_ict(spec: &PatternSpec) -> Result<PatternVerdict> {
    check_with(spec, Mode::Ict, Strategy::default())
}

/// Largest `d` such that the first `d` rows form a valid pattern.
pub fn probe_depth(spec: &PatternSpec, mode: Mode) -> Result<usize> {
    let mut best = 0;
    for d in 1..=spec.rows.len() {
        let mut s = spec.clone();
        s.rows.truncate(d);
        if !check_with(&s, mode, Strategy::default())?.valid {
            break;
        }
        best = d;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(paths(&[2, 3]).len(), 6);
    }
}
