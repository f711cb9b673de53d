//! The bundled corpus: worked examples with their expected outcomes.

use std::process::ExitCode;

use clap::Subcommand;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{self, AnalyzeArgs, Outcome, PatternArgs};
use crate::{Common, Format, FormulaInput};

const MANIFEST: &str = include_str!("../corpus/manifest.txt");

const FILES: &[(&str, &str)] = &[
    ("powers_of_two.txt", include_str!("../corpus/powers_of_two.txt")),
    ("odd_evens.txt", include_str!("../corpus/odd_evens.txt")),
    ("reciprocals.txt", include_str!("../corpus/reciprocals.txt")),
    ("zq_depth3.pat", include_str!("../corpus/zq_depth3.pat")),
    ("zq_collapsed.pat", include_str!("../corpus/zq_collapsed.pat")),
    ("mixed_depth2.pat", include_str!("../corpus/mixed_depth2.pat")),
    ("hamel_n2.pat", include_str!("../corpus/hamel_n2.pat")),
    ("doag_intervals.pat", include_str!("../corpus/doag_intervals.pat")),
    ("doag_repeated.pat", include_str!("../corpus/doag_repeated.pat")),
    ("sums_grid.pat", include_str!("../corpus/sums_grid.pat")),
];

pub fn file(name: &str) -> Option<&'static str> {
    let base = name.rsplit('/').next().unwrap_or(name);
    FILES.iter().find(|(n, _)| *n == base).map(|(_, s)| *s)
}

#[derive(Subcommand)]
pub enum Action {
    /// Run every entry (or those matching --filter) and compare outcomes.
    Run {
        /// Substring of the entry name or anchor.
        #[arg(long)]
        filter: Option<String>,
        /// Entries run concurrently.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List entries.
    List {
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Entry {
    pub name: String,
    pub anchor: String,
    pub kind: String,
    pub theory: String,
    pub input: String,
    pub flags: String,
    pub expect: String,
}

pub fn entries() -> Vec<Entry> {
    let mut out = Vec::new();
    let mut cur: Option<Entry> = None;
    for line in MANIFEST.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            out.extend(cur.take());
            cur = Some(Entry { name: name.into(), ..Entry::default() });
            continue;
        }
        let (k, v) = line.split_once(':').expect("manifest lines are `key: value`");
        let e = cur.as_mut().expect("manifest key before any entry");
        let v = v.trim().to_string();
        match k.trim() {
            "anchor" => e.anchor = v,
            "kind" => e.kind = v,
            "theory" => e.theory = v,
            "input" => e.input = v,
            "flags" => e.flags = v,
            "expect" => e.expect = v,
            other => panic!("unknown manifest key {other}"),
        }
    }
    out.extend(cur);
    out
}

fn quiet() -> Common {
    Common { format: Format::Text, timing: false }
}

fn has(flags: &str, f: &str) -> bool {
    flags.split_whitespace().any(|x| x == f)
}

fn execute(e: &Entry) -> oag_core::Result<Outcome> {
    let input = || FormulaInput { formula: Some(e.input.clone()), file: None, theory: e.theory.clone() };
    match e.kind.as_str() {
        "qe" => commands::qe(&input(), 0, &quiet()),
        "decide" => commands::decide(&input(), &quiet()),
        "cells" => commands::cells(&input(), &quiet()),
        "analyze" => {
            let is_formula = has(&e.flags, "formula");
            let args = AnalyzeArgs {
                prefix: (!is_formula).then(|| e.input.clone()),
                formula: is_formula.then(|| e.input.clone()),
                theory: if e.theory.is_empty() { "pres".into() } else { e.theory.clone() },
                delta: has(&e.flags, "delta"),
                period: has(&e.flags, "period"),
                decompose: has(&e.flags, "decompose"),
                screen: has(&e.flags, "screen"),
                motif: None,
                threshold: oag_core::discrete::motif::DEFAULT_THRESHOLD,
                successor: None,
                count: 64,
                common: quiet(),
            };
            commands::analyze(&args)
        }
        "pattern" => {
            let mode = if has(&e.flags, "ict") { "ict" } else { "inp" };
            let args = PatternArgs {
                file: e.input.clone(),
                mode: mode.into(),
                witnesses: false,
                probe: has(&e.flags, "probe"),
                common: quiet(),
            };
            commands::pattern(&args)
        }
        other => Err(oag_core::Error::Input(format!("unknown corpus kind {other}"))),
    }
}

#[derive(Debug, Serialize)]
struct Row {
    name: String,
    anchor: String,
    pass: bool,
    got: String,
    expect: String,
}

fn matching(filter: &Option<String>) -> Vec<Entry> {
    entries()
        .into_iter()
        .filter(|e| filter.as_ref().is_none_or(|f| e.name.contains(f.as_str()) || e.anchor.contains(f.as_str())))
        .collect()
}

pub fn run(action: Action) -> ExitCode {
    match action {
        Action::List { filter } => {
            for e in matching(&filter) {
                println!("{:<30} {:<8} {}", e.name, e.kind, e.anchor);
            }
            ExitCode::SUCCESS
        }
        Action::Run { filter, jobs, format } => {
            let es = matching(&filter);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
            let rows: Vec<Row> = pool.install(|| {
                es.par_iter()
                    .map(|e| {
                        let got = match execute(e) {
                            Ok(o) => o.text.lines().next().unwrap_or("").to_string(),
                            Err(err) => format!("error: {err}"),
                        };
                        Row {
                            name: e.name.clone(),
                            anchor: e.anchor.clone(),
                            pass: got == e.expect,
                            got,
                            expect: e.expect.clone(),
                        }
                    })
                    .collect()
            });
            let passed = rows.iter().filter(|r| r.pass).count();
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({ "entries": rows, "passed": passed }))
                        .expect("json")
                ),
                Format::Text => {
                    for r in &rows {
                        let tag = if r.pass { "PASS" } else { "FAIL" };
                        println!("{tag}  {:<30} {}", r.name, r.anchor);
                        if !r.pass {
                            println!("      expected: {}\n      got:      {}", r.expect, r.got);
                        }
                    }
                    println!("{} entries, {passed} passed", rows.len());
                }
            }
            if passed == rows.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
