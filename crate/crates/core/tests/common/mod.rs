#![allow(dead_code)]

use oag_core::model::{eval_qf, sample};
use oag_core::qe::{find_witness, qe};
use oag_core::scalar::rat;
use oag_core::{Assignment, Formula, ModelElement, OracleModel, Scalar, Signature, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PARAMS: [&str; 2] = ["y", "z"];

pub fn pool() -> Vec<Scalar> {
    vec![rat(1, 1), rat(-1, 1), rat(1, 2), rat(-1, 2), rat(2, 1), rat(-2, 1), rat(3, 1)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Exists,
    ExistsExists,
    Forall,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub shape: Shape,
    pub body: Formula,
    pub formula: Formula,
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub sig: Signature,
}

impl Gen {
    pub fn new(sig: Signature, seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), sig }
    }

    fn scalar(&mut self) -> Scalar {
        pool().choose(&mut self.rng).unwrap().clone()
    }

    pub fn term(&mut self, depth: usize, vars: &[&str]) -> Term {
        if depth <= 1 || self.rng.gen_bool(0.35) {
            return if self.rng.gen_bool(0.8) {
                Term::var(vars.choose(&mut self.rng).unwrap())
            } else {
                Term::constant(self.scalar())
            };
        }
        let mut ops = vec![0, 1];
        if self.sig.has_floor() {
            ops.push(2);
        }
        if self.sig.projections() > 0 {
            ops.push(3);
        }
        match *ops.choose(&mut self.rng).unwrap() {
            0 => Term::add(self.term(depth - 1, vars), self.term(depth - 1, vars)),
            1 => Term::scale(self.scalar(), self.term(depth - 1, vars)),
            2 => Term::floor(self.term(depth - 1, vars)),
            _ => {
                let i = self.rng.gen_range(1..=self.sig.projections());
                Term::proj(i, self.term(depth - 1, vars))
            }
        }
    }

    pub fn atom(&mut self, vars: &[&str]) -> Formula {
        let mut kinds = vec![0, 0, 1];
        if self.sig.has_z() {
            kinds.push(2);
        }
        if self.sig.has_q() {
            kinds.push(3);
        }
        let f = match *kinds.choose(&mut self.rng).unwrap() {
            0 => Formula::lt(self.term(3, vars), self.term(3, vars)),
            1 => Formula::eq(self.term(3, vars), self.term(3, vars)),
            2 => Formula::in_z(self.term(3, vars)),
            _ => Formula::in_q(self.term(3, vars)),
        };
        if self.rng.gen_bool(0.3) {
            Formula::not(f)
        } else {
            f
        }
    }

    pub fn qf(&mut self, vars: &[&str], atoms: usize) -> Formula {
        if atoms <= 1 {
            return self.atom(vars);
        }
        let left = self.rng.gen_range(1..atoms);
        let a = self.qf(vars, left);
        let b = self.qf(vars, atoms - left);
        let f = if self.rng.gen_bool(0.65) {
            Formula::and(vec![a, b])
        } else {
            Formula::or(vec![a, b])
        };
        if self.rng.gen_bool(0.1) {
            Formula::not(f)
        } else {
            f
        }
    }

    pub fn case(&mut self) -> Case {
        let shape = match self.rng.gen_range(0..10) {
            0..=5 => Shape::Exists,
            6..=7 => Shape::ExistsExists,
            _ => Shape::Forall,
        };
        let atoms = self.rng.gen_range(1..=3);
        let (body, formula) = match shape {
            Shape::Exists => {
                let b = self.qf(&["x", "x", "y", "z"], atoms);
                (b.clone(), Formula::exists("x", b))
            }
            Shape::ExistsExists => {
                let b = self.qf(&["x", "w", "y", "z"], atoms.max(2));
                (b.clone(), Formula::exists("x", Formula::exists("w", b)))
            }
            Shape::Forall => {
                let b = self.qf(&["x", "x", "y", "z"], atoms);
                (b.clone(), Formula::forall("x", b))
            }
        };
        Case { shape, body, formula }
    }
}

/// Candidate values for refutation: samples from the model plus shifts of
/// the parameters.
pub fn candidates(model: &OracleModel, params: &Assignment, count: usize, seed: u64) -> Vec<ModelElement> {
    let half = count / 2;
    let mut out = sample(model, half, 6, seed);
    let shifts = sample(&OracleModel::for_signature(Signature::Presburger), count - half, 4, seed ^ 0x5eed);
    let ps: Vec<&ModelElement> = params.values().collect();
    for (i, s) in shifts.iter().enumerate() {
        let base = ps[i % ps.len().max(1)];
        let step = if model.kind == oag_core::model::ElementKind::Integer {
            s.clone()
        } else {
            s.scale(&rat(1, 1 + (i % 3) as i64))
        };
        out.push(base.add(&step));
    }
    out
}

pub fn with(asg: &Assignment, v: &str, e: ModelElement) -> Assignment {
    let mut a = asg.clone();
    a.insert(v.to_string(), e);
    a
}

/// Cross-checks `case` at `params`. Errors describe the disagreement.
pub fn check_case(case: &Case, sig: Signature, params: &Assignment, samples: usize, seed: u64) -> Result<(), String> {
    let model = OracleModel::for_signature(sig);
    let ev = |f: &Formula, a: &Assignment| eval_qf(f, a, &model).map_err(|e| e.to_string());
    let r = qe(&case.formula, sig).map_err(|e| format!("qe failed on {}: {e}", case.formula))?;
    let truth = ev(&r, params)?;
    let cands = candidates(&model, params, samples, seed);
    let ctx = || format!("{} ~> {r} at {params:?}", case.formula);
    match case.shape {
        Shape::Exists => {
            if truth {
                let w = find_witness("x", &case.body, params, sig).map_err(|e| format!("{}: witness {e}", ctx()))?;
                if !ev(&case.body, &with(params, "x", w.clone()))? {
                    return Err(format!("{}: witness {w} fails", ctx()));
                }
            } else if let Some(c) = cands.iter().find(|c| ev(&case.body, &with(params, "x", (*c).clone())).unwrap_or(false)) {
                return Err(format!("{}: x = {c} satisfies the body", ctx()));
            }
        }
        Shape::ExistsExists => {
            if truth {
                let inner = Formula::exists("w", case.body.clone());
                let wx = find_witness("x", &inner, params, sig).map_err(|e| format!("{}: witness {e}", ctx()))?;
                let p2 = with(params, "x", wx.clone());
                let ww = find_witness("w", &case.body, &p2, sig).map_err(|e| format!("{}: inner witness {e}", ctx()))?;
                if !ev(&case.body, &with(&p2, "w", ww.clone()))? {
                    return Err(format!("{}: witnesses x = {wx}, w = {ww} fail", ctx()));
                }
            } else {
                let other = candidates(&model, params, samples, seed ^ 77);
                for (a, b) in cands.iter().zip(other.iter()) {
                    let asg = with(&with(params, "x", a.clone()), "w", b.clone());
                    if ev(&case.body, &asg)? {
                        return Err(format!("{}: x = {a}, w = {b} satisfies the body", ctx()));
                    }
                }
            }
        }
        Shape::Forall => {
            let neg = Formula::not(case.body.clone());
            if truth {
                if let Some(c) = cands.iter().find(|c| !ev(&case.body, &with(params, "x", (*c).clone())).unwrap_or(true)) {
                    return Err(format!("{}: x = {c} falsifies the body", ctx()));
                }
            } else {
                let w = find_witness("x", &neg, params, sig).map_err(|e| format!("{}: counterexample {e}", ctx()))?;
                if ev(&case.body, &with(params, "x", w.clone()))? {
                    return Err(format!("{}: counterexample {w} satisfies the body", ctx()));
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive check of the bounded Presburger version of `case` with the
/// quantified variables confined to `[-b, b]`.
pub fn check_presburger_bounded(case: &Case, params: &Assignment, b: i64) -> Result<(), String> {
    let sig = Signature::Presburger;
    let model = OracleModel::for_signature(sig);
    let box_of = |v: &str| {
        Formula::and(vec![
            Formula::le(Term::constant(rat(-b, 1)), Term::var(v)),
            Formula::le(Term::var(v), Term::constant(rat(b, 1))),
        ])
    };
    let (bounded, expected) = match case.shape {
        Shape::Exists => {
            let f = Formula::exists("x", Formula::and(vec![box_of("x"), case.body.clone()]));
            let e = (-b..=b).any(|x| eval_qf(&case.body, &with(params, "x", ModelElement::int(x)), &model).unwrap());
            (f, e)
        }
        Shape::ExistsExists => {
            let f = Formula::exists(
                "x",
                Formula::exists("w", Formula::and(vec![box_of("x"), box_of("w"), case.body.clone()])),
            );
            let e = (-b..=b).any(|x| {
                (-b..=b).any(|w| {
                    let a = with(&with(params, "x", ModelElement::int(x)), "w", ModelElement::int(w));
                    eval_qf(&case.body, &a, &model).unwrap()
                })
            });
            (f, e)
        }
        Shape::Forall => {
            let f = Formula::forall("x", Formula::implies(box_of("x"), case.body.clone()));
            let e = (-b..=b).all(|x| eval_qf(&case.body, &with(params, "x", ModelElement::int(x)), &model).unwrap());
            (f, e)
        }
    };
    let r = qe(&bounded, sig).map_err(|e| format!("qe failed on {bounded}: {e}"))?;
    let got = eval_qf(&r, params, &model).map_err(|e| e.to_string())?;
    if got != expected {
        return Err(format!("{bounded} ~> {r} at {params:?}: got {got}, brute force {expected}"));
    }
    Ok(())
}

pub fn random_params(sig: Signature, seed: u64) -> Assignment {
    let model = OracleModel::for_signature(sig);
    let vals = sample(&model, 8, 4, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Assignment::new();
    for p in PARAMS {
        a.insert(p.to_string(), vals.choose(&mut rng).unwrap().clone());
    }
    a
}
