use std::time::Instant;

use clap::Args;
use oag_core::discrete::{
    self, decompose_presburger, decompose_prefix, eventual_period, motif_table, sigma_successor, strength_screen,
    APDecomposition, Certificate, ScreenInput, SetPrefix, Verdict,
};
use oag_core::model::{eval_qf, sample};
use oag_core::pattern::{check_with, parse_pattern, probe_depth, Mode, PatternVerdict, RowResult};
use oag_core::qe::{classify_cells, find_witness, qe as eliminate};
use oag_core::{normalize_term, parse, Assignment, Atom, Error, Formula, OracleModel, Result, Signature};
use serde_json::{json, Value};

use crate::corpus;
use crate::{Common, FormulaInput};

pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

fn seed() -> u64 {
    std::env::var("OAG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

/// Reads a file from disk, falling back to the bundled corpus by name.
pub fn read_source(path: &str) -> Result<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => corpus::file(path)
            .map(str::to_string)
            .ok_or_else(|| Error::Input(format!("cannot read {path}: {e}"))),
    }
}

fn read_formula(input: &FormulaInput) -> Result<(String, Formula, Signature)> {
    let sig: Signature = input.theory.parse()?;
    let text = match (&input.formula, &input.file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => read_source(p)?,
        (None, None) => return Err(Error::Input("give a formula or --file".into())),
    };
    let f = parse(text.trim(), sig)?;
    Ok((text.trim().to_string(), f, sig))
}

fn envelope(input: &str, theory: &str, output: Value, started: Instant, common: &Common) -> Value {
    let elapsed = common.timing.then(|| started.elapsed().as_secs_f64());
    json!({ "input": input, "theory": theory, "output": output, "elapsed": elapsed })
}

fn timed(text: String, common: &Common, started: Instant) -> String {
    if common.timing {
        format!("{text}\nelapsed: {:.3}s", started.elapsed().as_secs_f64())
    } else {
        text
    }
}

pub fn normalize(input: &FormulaInput, common: &Common) -> Result<Outcome> {
    let started = Instant::now();
    let (text, f, sig) = read_formula(input)?;
    let n = |t: &oag_core::Term| normalize_term(t, sig).expand();
    let out = f.map_atoms(&|a| match a {
        Atom::Lt(s, t) => Formula::lt(n(s), n(t)),
        Atom::Eq(s, t) => Formula::eq(n(s), n(t)),
        Atom::InZ(s) => Formula::in_z(n(s)),
        Atom::InQ(s) => Formula::in_q(n(s)),
    });
    let s = out.to_string();
    Ok(Outcome {
        json: envelope(&text, &sig.flag(), json!(s), started, common),
        text: timed(s, common, started),
        code: 0,
    })
}

/// Cross-checks `E v. body` (or `A v. body`) against its elimination at
/// sampled parameter values: witnesses where the result holds, sampled
/// refutations where it fails.
fn spot_check(f: &Formula, result: &Formula, sig: Signature, points: usize) -> Result<usize> {
    let (v, body, universal) = match f {
        Formula::Exists(v, b) => (v, b, false),
        Formula::Forall(v, b) => (v, b, true),
        _ => return Err(Error::Input("--check needs a formula of the form `E x. body` or `A x. body`".into())),
    };
    let body = eliminate(body, sig)?;
    let body = if universal { Formula::not(body) } else { body };
    let model = OracleModel::for_signature(sig);
    let params: Vec<String> = f.free_vars().into_iter().collect();
    let values = sample(&model, points * params.len().max(1), 6, seed());
    let probes = sample(&model, 100, 8, seed() ^ 0x9e37);
    for i in 0..points {
        let mut asg = Assignment::new();
        for (j, p) in params.iter().enumerate() {
            asg.insert(p.clone(), values[i * params.len() + j].clone());
        }
        let claimed = eval_qf(result, &asg, &model)? != universal;
        if claimed {
            let w = find_witness(v, &body, &asg, sig)?;
            let mut a = asg.clone();
            a.insert(v.clone(), w.clone());
            if !eval_qf(&body, &a, &model)? {
                return Err(Error::Engine(format!("witness {v} = {w} fails at {asg:?}")));
            }
        } else {
            for x in &probes {
                let mut a = asg.clone();
                a.insert(v.clone(), x.clone());
                if eval_qf(&body, &a, &model)? {
                    return Err(Error::Engine(format!("{v} = {x} refutes the result at {asg:?}")));
                }
            }
        }
    }
    Ok(points)
}

pub fn qe(input: &FormulaInput, check: usize, common: &Common) -> Result<Outcome> {
    let started = Instant::now();
    let (text, f, sig) = read_formula(input)?;
    let out = eliminate(&f, sig)?;
    let s = out.to_string();
    let mut display = s.clone();
    let mut json = envelope(&text, &sig.flag(), json!(s), started, common);
    if check > 0 {
        let n = spot_check(&f, &out, sig, check)?;
        display.push_str(&format!("\ncheck: {n} sampled points agree"));
        json["check"] = json!(n);
    }
    Ok(Outcome { json, text: timed(display, common, started), code: 0 })
}

pub fn decide(input: &FormulaInput, common: &Common) -> Result<Outcome> {
    let started = Instant::now();
    let (text, f, sig) = read_formula(input)?;
    let b = oag_core::qe::decide(&f, sig)?;
    Ok(Outcome {
        json: envelope(&text, &sig.flag(), json!(b), started, common),
        text: timed(b.to_string(), common, started),
        code: 0,
    })
}

pub fn cells(input: &FormulaInput, common: &Common) -> Result<Outcome> {
    let started = Instant::now();
    let (text, f, sig) = read_formula(input)?;
    let cs = classify_cells(&f, sig)?;
    let lines: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
    Ok(Outcome {
        json: envelope(&text, &sig.flag(), json!(lines), started, common),
        text: timed(lines.join("\n"), common, started),
        code: 0,
    })
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Prefix file: one value per line, strictly increasing, `#` comments.
    pub prefix: Option<String>,
    /// Analyze the set defined by a formula in one variable instead.
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long, default_value = "pres")]
    pub theory: String,
    #[arg(long)]
    pub delta: bool,
    #[arg(long)]
    pub period: bool,
    #[arg(long)]
    pub decompose: bool,
    #[arg(long)]
    pub screen: bool,
    /// Motif table with windows of this length.
    #[arg(long)]
    pub motif: Option<usize>,
    /// Occurrences needed for a window to count as recurring.
    #[arg(long, default_value_t = discrete::motif::DEFAULT_THRESHOLD)]
    pub threshold: usize,
    /// Successor of this comma-separated window (with --motif).
    #[arg(long)]
    pub successor: Option<String>,
    /// Elements generated from a formula.
    #[arg(long, default_value_t = 64)]
    pub count: usize,
    #[command(flatten)]
    pub common: Common,
}

fn pairs(d: &APDecomposition) -> String {
    let fin: Vec<String> = d.finite_part.iter().map(|x| x.to_string()).collect();
    let prog: Vec<String> = d.progressions.iter().map(|p| format!("[{},{}]", p.offset, p.step)).collect();
    format!("{{finite:[{}], progressions:[{}]}}", fin.join(","), prog.join(","))
}

pub fn verdict_label(v: &Verdict) -> &'static str {
    match v {
        Verdict::ConsistentWithStrong => "ConsistentWithStrong",
        Verdict::WitnessAgainstStrong(Certificate::Growth { .. }) => "WitnessAgainstStrong(growth)",
        Verdict::WitnessAgainstStrong(Certificate::Accumulation { .. }) => "WitnessAgainstStrong(accumulation)",
        Verdict::Inconclusive => "Inconclusive",
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let started = Instant::now();
    let (input, prefix, formula) = match (&args.prefix, &args.formula) {
        (_, Some(text)) => {
            let sig: Signature = args.theory.parse()?;
            if sig != Signature::Presburger {
                return Err(Error::Input(format!("formula analysis needs the Presburger signature, not {sig}")));
            }
            let f = parse(text, sig)?;
            let d = decompose_presburger(&f)?;
            let xs = d.first(args.count);
            let below = xs.last().cloned();
            let mut p = SetPrefix::new(xs)?;
            p.complete_below = below;
            (text.clone(), p, Some((f, d)))
        }
        (Some(path), None) => (path.clone(), SetPrefix::parse(&read_source(path)?)?, None),
        (None, None) => return Err(Error::Input("give a prefix file or --formula".into())),
    };
    let all = !(args.delta || args.period || args.decompose || args.screen || args.motif.is_some());
    let mut text = Vec::new();
    let mut out = serde_json::Map::new();
    if all || args.delta {
        let d = discrete::delta(&prefix)?;
        let show = |xs: &[oag_core::ModelElement]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        text.push(format!("differences: {}", show(&d.diffs)));
        text.push(format!("difference set: {{{}}}", show(&d.delta_set)));
        text.push(format!("bounded: {}, growth: {}", d.bounded_flag, d.growth_flag));
        out.insert("delta".into(), json!(d));
    }
    if all || args.period {
        let p = eventual_period(&prefix);
        text.push(match p {
            Some((n0, l)) => format!("(N0={n0}, l={l})"),
            None => "no period".into(),
        });
        out.insert("period".into(), json!(p.map(|(n0, l)| json!({ "n0": n0, "l": l }))));
    }
    if all || args.decompose {
        let d = match &formula {
            Some((_, d)) => Ok(d.clone()),
            None => decompose_prefix(&prefix),
        };
        match d {
            Ok(d) => {
                text.push(pairs(&d));
                if let Some(m) = &d.merged_step {
                    text.push(format!("merged: [{},{}]", m.offset, m.step));
                }
                out.insert("decompose".into(), json!(d));
            }
            Err(Error::Inconclusive(msg)) => {
                text.push(format!("decomposition inconclusive: {msg}"));
                out.insert("decompose".into(), json!({ "inconclusive": msg }));
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(n) = args.motif {
        let t = motif_table(&prefix, n, args.threshold)?;
        for (w, c) in &t.occurrences {
            let rec = if *c >= t.threshold { " recurring" } else { "" };
            text.push(format!("window {}: {c}{rec}", discrete::show_window(w)));
        }
        out.insert("motif".into(), json!(t));
        if let Some(s) = &args.successor {
            let sigma = s
                .split(',')
                .map(|v| oag_core::ModelElement::parse(v.trim()))
                .collect::<Result<Vec<_>>>()?;
            let next = sigma_successor(&t, &sigma)?;
            text.push(format!("successor: {}", discrete::show_window(&next)));
            out.insert("successor".into(), json!(next));
        }
    }
    if all || args.screen {
        let r = strength_screen(&ScreenInput::Prefix(prefix.clone()))?;
        text.push(verdict_label(&r.verdict).to_string());
        match &r.verdict {
            Verdict::WitnessAgainstStrong(Certificate::Growth { first_half_max, second_half_max, tested }) => {
                text.push(format!(
                    "  largest gap {second_half_max} in the second half against {first_half_max} in the first; D(delta) non-empty for {} tested radii",
                    tested.len()
                ));
            }
            Verdict::WitnessAgainstStrong(Certificate::Accumulation { near, gaps }) => {
                text.push(format!("  {} shrinking gaps towards {near}, the last {}", gaps.len(), gaps[0]));
            }
            _ => {}
        }
        if let Some(s) = &r.sparsity {
            text.push(format!("  D({s}) is empty"));
        }
        out.insert("screen".into(), json!(r));
    }
    let theory = if formula.is_some() { args.theory.clone() } else { "prefix".into() };
    Ok(Outcome {
        json: envelope(&input, &theory, Value::Object(out), started, &args.common),
        text: timed(text.join("\n"), &args.common, started),
        code: 0,
    })
}

#[derive(Args)]
pub struct PatternArgs {
    /// Pattern file.
    pub file: String,
    #[arg(long, default_value = "inp")]
    pub mode: String,
    /// Print every path with its witness.
    #[arg(long)]
    pub witnesses: bool,
    /// Also report the largest valid prefix of rows.
    #[arg(long)]
    pub probe: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn pattern_text(v: &PatternVerdict, witnesses: bool) -> Vec<String> {
    let mut text = vec![v.summary()];
    for (i, r) in v.row_results.iter().enumerate() {
        match r {
            RowResult::Ok => {}
            RowResult::Satisfiable { columns } => {
                text.push(format!("row {i}: columns {columns:?} are jointly satisfiable"))
            }
            RowResult::WidthBelowK { width, k } => text.push(format!("row {i}: width {width} is below k = {k}")),
        }
    }
    if let Some(p) = v.first_failing_path() {
        text.push(format!("failing path: {:?}", p.path));
    }
    if witnesses {
        for p in &v.path_results {
            let w = p.witness.as_ref().map(|w| w.to_string()).unwrap_or_else(|| "-".into());
            text.push(format!("path {:?}: {} x = {w}", p.path, if p.ok { "ok" } else { "fails" }));
        }
    }
    text.extend(v.notes.iter().map(|n| format!("note: {n}")));
    text
}

pub fn pattern(args: &PatternArgs) -> Result<Outcome> {
    let started = Instant::now();
    let mode: Mode = args.mode.parse()?;
    let spec = parse_pattern(&read_source(&args.file)?)?;
    let v = check_with(&spec, mode, oag_core::par::Strategy::default())?;
    let mut text = pattern_text(&v, args.witnesses);
    let mut out = json!(v);
    if args.probe {
        let d = probe_depth(&spec, mode)?;
        text.insert(1, format!("valid depth: {d}"));
        out["depth"] = json!(d);
    }
    let theory = spec.backend.signature().flag();
    Ok(Outcome {
        json: envelope(&args.file, &theory, out, started, &args.common),
        text: timed(text.join("\n"), &args.common, started),
        code: 0,
    })
}
