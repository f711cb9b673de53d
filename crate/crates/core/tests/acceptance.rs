//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{check_case, check_presburger_bounded, random_params, Gen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use oag_core::discrete::{
    commensurable_merge, decompose_presburger, delta, eventual_period_of, motif_table_of, sigma_successor,
    strength_screen, Certificate, Merge, Progression, ScreenInput, SetPrefix, Verdict,
};
use oag_core::model::{eval_normal, eval_term, sample};
use oag_core::par::{map_range, Strategy};
use oag_core::pattern::{check_with, parse_pattern, probe_depth, Backend, Mode, ParamValue, PatternRow, PatternSpec};
use oag_core::scalar::{rat, Scalar};
use oag_core::{normalize_term, parse, Assignment, Formula, ModelElement, OracleModel, Signature, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QE_FORMULAS: usize = 500;
const QE_PARAM_POINTS: usize = 3;
const REFUTATION_SAMPLES: usize = 200;
const PRES_BOX: i64 = 8;
const QE_BUDGET: Duration = Duration::from_secs(120);
const DECOMPOSE_BOUND: i64 = 10_000;
const DECOMPOSE_BUDGET: Duration = Duration::from_secs(10);
const PATTERN_BUDGET: Duration = Duration::from_secs(5);
const PERIODIC_SEQUENCES: usize = 50;
const MERGE_PAIRS: usize = 100;
const MERGE_TERMS: i64 = 100;
const NORMAL_TERMS: usize = 1000;
const NORMAL_POINTS: usize = 100;
const GRID_SPECS: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const SIGS: [Signature; 6] = [
    Signature::Doag,
    Signature::Presburger,
    Signature::T0Mixed,
    Signature::T1Coset,
    Signature::TFull,
    Signature::TnHamel(2),
];

fn qe_soundness() -> Outcome {
    let started = Instant::now();
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (s, sig) in SIGS.iter().enumerate() {
        let sig = *sig;
        let seed = 1000 + s as u64;
        let results = map_range(Strategy::Parallel, QE_FORMULAS, |i| {
            let mut g = Gen::new(sig, seed * 100_000 + i as u64);
            let case = g.case();
            for j in 0..QE_PARAM_POINTS {
                let params = random_params(sig, seed * 1_000_000 + (i * QE_PARAM_POINTS + j) as u64);
                if sig == Signature::Presburger {
                    check_presburger_bounded(&case, &params, PRES_BOX)?;
                }
                check_case(&case, sig, &params, REFUTATION_SAMPLES, i as u64)?;
            }
            Ok::<(), String>(())
        });
        let bad: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
        parts.push(format!("{sig} {}/{QE_FORMULAS}", QE_FORMULAS - bad.len()));
        failures.extend(bad.into_iter().take(2));
    }
    let elapsed = started.elapsed();
    for f in &failures {
        eprintln!("  {f}");
    }
    outcome(
        failures.is_empty() && elapsed < QE_BUDGET,
        format!("{} in {:.1}s (budget {}s)", parts.join(", "), elapsed.as_secs_f64(), QE_BUDGET.as_secs()),
    )
}

type Oracle = fn(i64) -> bool;

fn presburger_corpus() -> Vec<(&'static str, Oracle)> {
    vec![
        ("x > 0 & Z(x/2)", |x| x > 0 && x % 2 == 0),
        ("x > 0 & (Z(x/3) | Z(x/5))", |x| x > 0 && (x % 3 == 0 || x % 5 == 0)),
        ("x = 4 | x = 7", |x| x == 4 || x == 7),
        ("x > 5 & ~Z(x/4)", |x| x > 5 && x % 4 != 0),
        ("x >= 1 & Z((x - 1)/3)", |x| x >= 1 && (x - 1) % 3 == 0),
        ("E y. x = 3 * y + 1 & y > 2 | x = 5", |x| (x - 1) % 3 == 0 && (x - 1) / 3 > 2 || x == 5),
        ("x > 0 & Z(x/6) & ~Z(x/4)", |x| x > 0 && x % 6 == 0 && x % 4 != 0),
        ("x > 10 & (Z(x/7) | x < 20)", |x| x > 10 && (x % 7 == 0 || x < 20)),
        ("x > 0 & x < 50 | x > 100 & Z(x/9)", |x| x > 0 && x < 50 || x > 100 && x % 9 == 0),
        ("E y. E z. y >= 0 & z >= 0 & x = 3 * y + 5 * z", |x| {
            x >= 0 && (0..=x / 5).any(|z| (x - 5 * z) % 3 == 0)
        }),
        ("x > 0 & ~Z(x/2) & ~Z(x/3)", |x| x > 0 && x % 2 != 0 && x % 3 != 0),
        ("x > 3 & Z((2 * x + 1)/5)", |x| x > 3 && (2 * x + 1) % 5 == 0),
        ("x > 0 & (Z(x/4) | Z((x - 1)/4)) & ~(x = 9)", |x| x > 0 && (x % 4 == 0 || x % 4 == 1) && x != 9),
        ("x >= 0 & E y. x = 2 * y & Z(y/3)", |x| x >= 0 && x % 6 == 0),
        ("x > 0 & A y. (0 < y & y < 3) -> ~Z((x + y)/3)", |x| x > 0 && x % 3 == 0),
        ("x >= 100 & Z(x/10) | x = 1 | x = 2", |x| x >= 100 && x % 10 == 0 || x == 1 || x == 2),
        ("x > 0 & Z(x/2) & Z(x/3) & Z(x/5)", |x| x > 0 && x % 30 == 0),
        ("x > -5 & Z((x + 5)/7)", |x| x > -5 && (x + 5) % 7 == 0),
        ("E y. y > 0 & x = 4 * y - 1 & ~Z(y/3)", |x| (x + 1) % 4 == 0 && (x + 1) / 4 > 0 && ((x + 1) / 4) % 3 != 0),
        ("x > 0 & (Z(x/8) | Z((x - 3)/8) | Z((x - 5)/12))", |x| {
            x > 0 && (x % 8 == 0 || (x - 3).rem_euclid(8) == 0 || (x - 5).rem_euclid(12) == 0)
        }),
    ]
}

fn presburger_decomposition() -> Outcome {
    let started = Instant::now();
    let corpus = presburger_corpus();
    let mut ok = 0;
    for (text, oracle) in &corpus {
        let check = || -> Result<(), String> {
            let f = parse(text, Signature::Presburger).map_err(|e| e.to_string())?;
            let d = decompose_presburger(&f).map_err(|e| e.to_string())?;
            let got: Vec<i64> = d
                .enumerate_upto(&ModelElement::int(DECOMPOSE_BOUND))
                .into_iter()
                .filter_map(|x| x.as_rational().map(|r| r.to_integer().try_into().unwrap()))
                .filter(|x| *x >= 1)
                .collect();
            let want: Vec<i64> = (1..=DECOMPOSE_BOUND).filter(|x| oracle(*x)).collect();
            if got != want {
                return Err(format!("{text}: enumeration differs"));
            }
            if d.progressions.is_empty() {
                return Ok(());
            }
            // beyond the threshold the gaps are the cyclic differences of the offsets
            let step = d.progressions[0].step.clone();
            let offsets: Vec<ModelElement> = d.progressions.iter().map(|p| p.offset.clone()).collect();
            let step_q = step.as_rational().unwrap();
            let mut residues: Vec<ModelElement> = offsets
                .iter()
                .map(|o| {
                    let o = o.as_rational().unwrap();
                    ModelElement::rat(&o - (&o / &step_q).floor() * &step_q)
                })
                .collect();
            residues.sort();
            let mut cyclic: Vec<ModelElement> = residues.windows(2).map(|w| w[1].sub(&w[0])).collect();
            cyclic.push(residues[0].add(&step).sub(residues.last().unwrap()));
            cyclic.sort();
            cyclic.dedup();
            let past_finite = d.finite_part.iter().max().map(|x| x.add(&int(1)));
            let start = offsets.iter().chain(&past_finite).max().unwrap().clone();
            let tail: Vec<ModelElement> = d
                .enumerate_upto(&ModelElement::int(DECOMPOSE_BOUND))
                .into_iter()
                .filter(|x| *x >= start)
                .collect();
            let dd = delta(&SetPrefix::new(tail).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            if dd.delta_set != cyclic {
                return Err(format!("{text}: difference set differs from the cyclic period differences"));
            }
            Ok(())
        };
        match check() {
            Ok(()) => ok += 1,
            Err(e) => eprintln!("  {e}"),
        }
    }
    let elapsed = started.elapsed();
    outcome(
        ok == corpus.len() && elapsed < DECOMPOSE_BUDGET,
        format!("{ok}/{} formulas exact on [1, {DECOMPOSE_BOUND}] in {:.2}s", corpus.len(), elapsed.as_secs_f64()),
    )
}

const ZQ: &str = include_str!("../../cli/corpus/zq_depth3.pat");
const ZQ_COLLAPSED: &str = include_str!("../../cli/corpus/zq_collapsed.pat");
const HAMEL: &str = include_str!("../../cli/corpus/hamel_n2.pat");

fn zq_pattern() -> Outcome {
    let started = Instant::now();
    let run = || -> oag_core::Result<(String, bool, usize)> {
        let spec = parse_pattern(ZQ)?;
        let v = check_with(&spec, Mode::Inp, Strategy::Parallel)?;
        let collapsed = probe_depth(&parse_pattern(ZQ_COLLAPSED)?, Mode::Inp)?;
        Ok((v.summary(), v.valid && v.rows_ok() == 3 && v.paths_ok() == 64, collapsed))
    };
    let elapsed = |s: Instant| s.elapsed();
    match run() {
        Ok((summary, good, collapsed)) => {
            let t = elapsed(started);
            outcome(
                good && collapsed == 2 && t < PATTERN_BUDGET,
                format!("{summary}; inverted assumptions give depth {collapsed}; {:.2}s", t.as_secs_f64()),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn hamel_pattern() -> Outcome {
    let started = Instant::now();
    match parse_pattern(HAMEL).and_then(|s| check_with(&s, Mode::Ict, Strategy::Parallel)) {
        Ok(v) => {
            let t = started.elapsed();
            outcome(
                v.valid && v.paths_ok() == 27 && t < PATTERN_BUDGET,
                format!("{}; {:.2}s", v.summary(), t.as_secs_f64()),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn strength_screens() -> Outcome {
    let mut verdicts = 0;
    let mut notes = Vec::new();
    let powers = SetPrefix::from_ints((0..=40).map(|k| 1i64 << k)).unwrap();
    match strength_screen(&ScreenInput::Prefix(powers.clone())) {
        Ok(r) => match &r.verdict {
            Verdict::WitnessAgainstStrong(c @ Certificate::Growth { tested, .. }) if c.check(&powers) => {
                verdicts += 1;
                notes.push(format!("2^k growth, {} radii tested", tested.len()));
            }
            v => notes.push(format!("2^k gave {v:?}")),
        },
        Err(e) => notes.push(e.to_string()),
    }
    let mut recip: Vec<ModelElement> = (2..=50).map(|k| ModelElement::rat(rat(1, k))).collect();
    recip.sort();
    let recip = SetPrefix::new(recip).unwrap();
    match strength_screen(&ScreenInput::Prefix(recip.clone())) {
        Ok(r) => match &r.verdict {
            Verdict::WitnessAgainstStrong(c @ Certificate::Accumulation { .. }) if c.check(&recip) => {
                verdicts += 1;
                notes.push("1/k accumulation".into());
            }
            v => notes.push(format!("1/k gave {v:?}")),
        },
        Err(e) => notes.push(e.to_string()),
    }
    let evens = parse("x > 0 & Z(x/2)", Signature::Presburger).unwrap();
    match strength_screen(&ScreenInput::Formula(evens, Signature::Presburger)) {
        Ok(r) if r.verdict == Verdict::ConsistentWithStrong => {
            verdicts += 1;
            notes.push("evens consistent".into());
        }
        Ok(r) => notes.push(format!("evens gave {:?}", r.verdict)),
        Err(e) => notes.push(e.to_string()),
    }
    outcome(verdicts == 3, format!("{verdicts}/3 verdicts ({})", notes.join(", ")))
}

fn int(n: i64) -> ModelElement {
    ModelElement::int(n)
}

/// A random eventually periodic sequence with its exact `(n0, l)`.
fn periodic_sequence(rng: &mut ChaCha8Rng) -> (Vec<ModelElement>, usize, usize) {
    let l = rng.gen_range(1..=6);
    let cycle: Vec<i64> = loop {
        let c: Vec<i64> = (0..l).map(|_| rng.gen_range(1..=9)).collect();
        // primitive: no proper rotation equals the cycle
        if (1..l).all(|r| (0..l).any(|i| c[i] != c[(i + r) % l])) {
            break c;
        }
    };
    let n0 = rng.gen_range(0..=10);
    let len = n0 + (12 * l).max(40);
    let mut d: Vec<i64> = (0..len).map(|i| if i < n0 { 0 } else { cycle[(i - n0) % l] }).collect();
    for i in (0..n0).rev() {
        // the value one period later; the last noise entry must differ from it
        let later = d[i + l];
        let v = loop {
            let v = rng.gen_range(1..=10);
            if i + 1 < n0 || v != later {
                break v;
            }
        };
        d[i] = v;
    }
    (d.into_iter().map(int).collect(), n0, l)
}

fn motifs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = 0;
    for _ in 0..PERIODIC_SEQUENCES {
        let (d, n0, l) = periodic_sequence(&mut rng);
        let good = (|| {
            if eventual_period_of(&d) != Some((n0, l)) {
                return false;
            }
            let t = match motif_table_of(&d, l, 3) {
                Ok(t) => t,
                Err(_) => return false,
            };
            if t.recurring.len() != l {
                return false;
            }
            // successor is a permutation of the recurring windows with one orbit
            let start = t.recurring[0].clone();
            let mut cur = start.clone();
            let mut seen = vec![cur.clone()];
            for _ in 0..l {
                match sigma_successor(&t, &cur) {
                    Ok(next) => cur = next,
                    Err(_) => return false,
                }
                if cur == start {
                    break;
                }
                if seen.contains(&cur) {
                    return false;
                }
                seen.push(cur.clone());
            }
            cur == start && seen.len() == l
        })();
        if good {
            ok += 1;
        }
    }
    outcome(ok == PERIODIC_SEQUENCES, format!("{ok}/{PERIODIC_SEQUENCES} sequences"))
}

/// Largest `g` with `b`, `b2` and `a - a2` in `g Z`, by trying divisors.
fn lattice_oracle(a: &Scalar, b: &Scalar, a2: &Scalar, b2: &Scalar) -> Scalar {
    let l = [a, b, a2, b2].iter().fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let to_int = |v: &Scalar| (v * Scalar::from_integer(l.clone())).to_integer();
    let (bi, b2i, di) = (to_int(b), to_int(b2), to_int(&(a - a2)).abs());
    let mut g = bi.clone();
    while !g.is_zero() {
        if bi.is_multiple_of(&g) && b2i.is_multiple_of(&g) && di.is_multiple_of(&g) {
            return Scalar::new(g, l);
        }
        g -= 1;
    }
    unreachable!("1 divides everything")
}

fn commensurability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = 0;
    let mut r = |lo: i64, hi: i64| rat(rng.gen_range(lo..=hi), rng.gen_range(1..=6));
    for _ in 0..MERGE_PAIRS {
        let (a, b, a2, b2) = (r(-12, 12), r(1, 12), r(-12, 12), r(1, 12));
        let x = Progression::new(ModelElement::rat(a.clone()), ModelElement::rat(b.clone()));
        let y = Progression::new(ModelElement::rat(a2.clone()), ModelElement::rat(b2.clone()));
        let good = match commensurable_merge(&x, &y) {
            Ok(Merge::Merged(m)) => {
                (0..MERGE_TERMS).all(|i| m.contains_z(&x.term(i)) && m.contains_z(&y.term(i)))
                    && m.step == ModelElement::rat(lattice_oracle(&a, &b, &a2, &b2))
            }
            _ => false,
        };
        if good {
            ok += 1;
        }
    }
    let quad = commensurable_merge(
        &Progression::new(int(0), int(1)),
        &Progression::new(int(0), ModelElement::QuadPoint(rat(0, 1), rat(1, 1))),
    );
    let quad_ok = matches!(quad, Ok(Merge::Incommensurable));
    outcome(
        ok == MERGE_PAIRS && quad_ok,
        format!("{ok}/{MERGE_PAIRS} rational pairs, sqrt2 pair incommensurable: {quad_ok}"),
    )
}

fn normal_forms() -> Outcome {
    let mut parts = Vec::new();
    let mut all = true;
    for (s, sig) in SIGS.iter().enumerate() {
        let sig = *sig;
        let model = OracleModel::for_signature(sig);
        let pts = sample(&model, NORMAL_POINTS * 3, 5, 800 + s as u64);
        let results = map_range(Strategy::Parallel, NORMAL_TERMS, |i| {
            let mut g = Gen::new(sig, 8_000_000 + (s * NORMAL_TERMS + i) as u64);
            let t = g.term(3, &["x", "y", "z"]);
            let n = normalize_term(&t, sig);
            let back = n.expand();
            (0..NORMAL_POINTS).all(|p| {
                let asg: Assignment = [
                    ("x".to_string(), pts[3 * p].clone()),
                    ("y".to_string(), pts[3 * p + 1].clone()),
                    ("z".to_string(), pts[3 * p + 2].clone()),
                ]
                .into();
                let want = eval_term(&t, &asg).unwrap();
                eval_normal(&n, &asg).unwrap() == want && eval_term(&back, &asg).unwrap() == want
            })
        });
        let ok = results.iter().filter(|b| **b).count();
        all &= ok == NORMAL_TERMS;
        parts.push(format!("{sig} {ok}/{NORMAL_TERMS}"));
    }
    outcome(all, parts.join(", "))
}

fn grid_spec(rng: &mut ChaCha8Rng, seed: u64) -> PatternSpec {
    let sig = Signature::Presburger;
    let mut g = Gen::new(sig, seed);
    let depth = rng.gen_range(1..=2);
    let rows = (0..depth)
        .map(|_| {
            let body = g.qf(&["x", "x", "a"], rng.gen_range(1..=2));
            let boxed = Formula::and(vec![
                Formula::le(Term::constant(rat(-PRES_BOX, 1)), Term::var("x")),
                Formula::le(Term::var("x"), Term::constant(rat(PRES_BOX, 1))),
                body,
            ]);
            let width = rng.gen_range(2..=3);
            PatternRow {
                formula: boxed,
                param_vars: vec!["a".into()],
                k: 2,
                params: (0..width)
                    .map(|_| vec![ParamValue::Element(int(rng.gen_range(-4..=4)))])
                    .collect(),
            }
        })
        .collect();
    PatternSpec {
        var: "x".into(),
        rows,
        backend: Backend::Theory(sig),
        constants: vec![],
        assumptions: vec![],
    }
}

fn backend_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = 0;
    let mut valid = 0;
    for i in 0..GRID_SPECS {
        let spec = grid_spec(&mut rng, 9_000 + i as u64);
        let mut grid = spec.clone();
        grid.backend = Backend::FiniteGrid(Signature::Presburger, (-PRES_BOX..=PRES_BOX).map(int).collect());
        let mode = if i % 2 == 0 { Mode::Inp } else { Mode::Ict };
        let a = check_with(&spec, mode, Strategy::Parallel);
        let b = check_with(&grid, mode, Strategy::Parallel);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let oks = |v: &oag_core::pattern::PatternVerdict| v.path_results.iter().map(|p| p.ok).collect::<Vec<_>>();
                if a.valid == b.valid && a.row_results == b.row_results && oks(&a) == oks(&b) {
                    ok += 1;
                    valid += a.valid as usize;
                }
            }
            (a, b) => eprintln!("  spec {i}: {:?} / {:?}", a.err(), b.err()),
        }
    }
    outcome(ok == GRID_SPECS, format!("{ok}/{GRID_SPECS} specs agree ({valid} valid)"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("qe differential soundness", qe_soundness),
        ("presburger progression decomposition", presburger_decomposition),
        ("depth-three inp pattern with cosets", zq_pattern),
        ("hamel ict pattern, n = 2", hamel_pattern),
        ("strength screens", strength_screens),
        ("motifs and eventual periods", motifs),
        ("commensurable merge", commensurability),
        ("normal-form equivalence", normal_forms),
        ("pattern backend agreement", backend_agreement),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", i + 1, o.detail);
        failed += !o.pass as usize;
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
