//! Quantifier elimination. Quantifiers are removed innermost first; the body
//! of each is put in disjunctive normal form and every conjunction is handed
//! to the engine of the signature.

pub mod assume;
pub mod cells;
pub mod cooper;
pub mod coset;
pub mod fm;
pub mod hamel;
pub mod lit;
pub mod mixed;
pub mod witness;

use crate::error::{Error, Result};
use crate::model::{Assignment, ModelElement};
use crate::par::{self, Strategy};
use crate::syntax::{Formula, Signature};
use lit::{dnf, dnf_to_formula, primitive, simplify_dnf, Conj, Dnf, Lit, Rel};

pub use assume::{qe_with_assumptions, Assumptions};
pub use cells::{classify_cells, Cell, CellKind};

/// Output of one elimination step.
#[derive(Debug, Clone)]
pub struct EliminationResult {
    pub var: String,
    /// Quantifier-free and free of `var`.
    pub formula: Formula,
    pub witness_recipe: Option<WitnessRecipe>,
}

/// Replays an elimination on concrete parameters to produce a witness.
#[derive(Debug, Clone)]
pub struct WitnessRecipe {
    var: String,
    sig: Signature,
    body: Dnf,
}

impl WitnessRecipe {
    pub fn witness(&self, params: &Assignment) -> Result<ModelElement> {
        witness::dnf_witness(&self.var, &self.body, params, self.sig)
    }
}

/// Eliminates `var` from one conjunction.
pub fn eliminate_conj(var: &str, conj: &[Lit], sig: Signature) -> Result<Dnf> {
    if !conj.iter().any(|l| l.contains_var(var)) {
        return Ok(vec![conj.to_vec()]);
    }
    match sig {
        Signature::Doag => fm::fm_conj(var, conj),
        Signature::Presburger => cooper::cooper_conj(var, conj),
        Signature::T0Mixed => mixed::mixed_conj(var, conj, false),
        Signature::T1Coset => coset::coset_conj(var, conj),
        Signature::TFull => mixed::mixed_conj(var, conj, true),
        Signature::TnHamel(n) => hamel::hamel_conj(var, conj, n),
    }
}

/// Rewrites literals into the canonical shape of the signature: in
/// Presburger arithmetic every variable is an integer, so `t <= 0` becomes
/// `t - 1 < 0` and integer combinations are dropped from `Z` literals.
fn canon_lit(lit: &Lit, sig: Signature) -> Lit {
    if sig != Signature::Presburger {
        return lit.clone();
    }
    match lit {
        Lit::Cmp(Rel::Le, t) => {
            Lit::lt(primitive(t).plus_constant(&-crate::scalar::int(1)))
        }
        Lit::Z(p, t) => {
            let mut t = t.clone();
            t.linear_part.retain(|_, c| !crate::scalar::is_integer(c));
            Lit::Z(*p, t)
        }
        other => other.clone(),
    }
}

pub fn normalize_dnf(d: Dnf, sig: Signature) -> Dnf {
    simplify_dnf(
        d.into_iter()
            .map(|c| c.iter().map(|l| canon_lit(l, sig)).collect::<Conj>())
            .collect(),
    )
}

/// Eliminates `var` from a disjunction, one conjunction at a time.
pub fn eliminate_dnf(var: &str, d: &Dnf, sig: Signature, strategy: Strategy) -> Result<Dnf> {
    let parts = par::map(strategy, d, |c| eliminate_conj(var, c, sig));
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(normalize_dnf(out, sig))
}

fn qe_rec(f: &Formula, sig: Signature, strategy: Strategy) -> Result<Formula> {
    Ok(match f {
        Formula::Exists(v, body) => {
            let b = qe_rec(body, sig, strategy)?;
            let d = normalize_dnf(dnf(&b), sig);
            dnf_to_formula(&eliminate_dnf(v, &d, sig, strategy)?)
        }
        Formula::Forall(v, body) => {
            let b = qe_rec(body, sig, strategy)?;
            let d = normalize_dnf(dnf(&Formula::not(b)), sig);
            Formula::not(dnf_to_formula(&eliminate_dnf(v, &d, sig, strategy)?))
        }
        Formula::Not(g) => Formula::not(qe_rec(g, sig, strategy)?),
        Formula::And(gs) => Formula::and(
            gs.iter()
                .map(|g| qe_rec(g, sig, strategy))
                .collect::<Result<Vec<_>>>()?,
        ),
        Formula::Or(gs) => Formula::or(
            gs.iter()
                .map(|g| qe_rec(g, sig, strategy))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => f.clone(),
    })
}

/// Quantifier-free disjunctive normal form equivalent to `f`.
pub fn qe_dnf(f: &Formula, sig: Signature) -> Result<Dnf> {
    qe_dnf_with(f, sig, Strategy::default())
}

pub fn qe_dnf_with(f: &Formula, sig: Signature, strategy: Strategy) -> Result<Dnf> {
    f.validate(sig)?;
    let r = qe_rec(f, sig, strategy)?;
    Ok(normalize_dnf(dnf(&r), sig))
}

/// A quantifier-free formula equivalent to `f` in the theory of `sig`.
pub fn qe(f: &Formula, sig: Signature) -> Result<Formula> {
    Ok(dnf_to_formula(&qe_dnf(f, sig)?))
}

/// Truth value of a sentence.
pub fn decide(sentence: &Formula, sig: Signature) -> Result<bool> {
    let free = sentence.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariables(free.into_iter().collect()));
    }
    match qe(sentence, sig)? {
        Formula::Top => Ok(true),
        Formula::Bot => Ok(false),
        other => Err(Error::Engine(format!("sentence did not reduce to a truth value: {other}"))),
    }
}

/// Eliminates `var` from `f` (quantifiers inside `f` are eliminated first).
pub fn eliminate(var: &str, f: &Formula, sig: Signature) -> Result<EliminationResult> {
    let body = qe_dnf(f, sig)?;
    let out = eliminate_dnf(var, &body, sig, Strategy::default())?;
    Ok(EliminationResult {
        var: var.to_string(),
        formula: dnf_to_formula(&out),
        witness_recipe: Some(WitnessRecipe { var: var.to_string(), sig, body }),
    })
}

/// Fourier–Motzkin over a conjunction of order literals.
pub fn fm_eliminate(var: &str, conj: &[Lit]) -> Result<EliminationResult> {
    let out = normalize_dnf(fm::fm_conj(var, conj)?, Signature::Doag);
    Ok(EliminationResult {
        var: var.to_string(),
        formula: dnf_to_formula(&out),
        witness_recipe: Some(WitnessRecipe {
            var: var.to_string(),
            sig: Signature::Doag,
            body: vec![conj.to_vec()],
        }),
    })
}

pub fn cooper_eliminate(var: &str, f: &Formula) -> Result<EliminationResult> {
    eliminate(var, f, Signature::Presburger)
}

pub fn mixed_eliminate(var: &str, f: &Formula) -> Result<EliminationResult> {
    eliminate(var, f, Signature::T0Mixed)
}

pub fn coset_eliminate(var: &str, f: &Formula) -> Result<EliminationResult> {
    eliminate(var, f, Signature::T1Coset)
}

pub fn full_t_eliminate(var: &str, f: &Formula) -> Result<EliminationResult> {
    eliminate(var, f, Signature::TFull)
}

pub fn hamel_eliminate(var: &str, f: &Formula, n: u32) -> Result<EliminationResult> {
    eliminate(var, f, Signature::TnHamel(n))
}

/// A value of `var` satisfying `f` under `params`.
pub fn find_witness(var: &str, f: &Formula, params: &Assignment, sig: Signature) -> Result<ModelElement> {
    let body = qe_dnf(f, sig)?;
    let missing: Vec<String> = f
        .free_vars()
        .into_iter()
        .filter(|v| v != var && !params.contains_key(v))
        .collect();
    if !missing.is_empty() {
        return Err(Error::FreeVariables(missing));
    }
    witness::dnf_witness(var, &body, params, sig)
}
