//! Report values and their text and JSON renderings.

use std::fmt::Write as _;

use causerep_core::Rational;
use serde::{Serialize, Serializer};

#[derive(Serialize)]
struct Fraction {
    num: u64,
    den: u64,
}

fn fraction<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    Fraction {
        num: *r.numer(),
        den: *r.denom(),
    }
    .serialize(s)
}

/// A tuple id or a position such as `R[2;1]`.
#[derive(Serialize, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[serde(untagged)]
pub enum Item {
    Tid(u64),
    Position(String),
}

impl std::fmt::Display for Item {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Item::Tid(t) => write!(f, "{t}"),
            Item::Position(p) => f.write_str(p),
        }
    }
}

#[derive(Serialize)]
pub struct QueryInfo {
    pub name: String,
    pub answer: Vec<String>,
    pub holds: bool,
}

#[derive(Serialize)]
pub struct RepairEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<String>>,
    pub tuples: Vec<String>,
}

#[derive(Serialize)]
pub struct RepairsReport {
    pub semantics: &'static str,
    pub minimality: &'static str,
    pub ics: bool,
    pub constraints: Vec<String>,
    pub repairs: Vec<RepairEntry>,
}

#[derive(Serialize)]
pub struct CauseEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    #[serde(serialize_with = "fraction")]
    pub responsibility: Rational,
    pub counterfactual: bool,
    pub contingency_sets: Vec<Vec<Item>>,
}

#[derive(Serialize)]
pub struct CausesReport {
    pub semantics: &'static str,
    pub ics: bool,
    pub query: QueryInfo,
    pub causes: Vec<CauseEntry>,
    /// Tuple-level causes under null semantics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple_causes: Option<Vec<CauseEntry>>,
}

#[derive(Serialize)]
pub struct ResponsibilityReport {
    pub semantics: &'static str,
    pub query: QueryInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Item>,
    #[serde(serialize_with = "fraction")]
    pub responsibility: Rational,
    /// Causes reaching `responsibility` when no target was given.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub most_responsible: Vec<Item>,
}

#[derive(Serialize)]
pub struct EmitReport {
    pub semantics: &'static str,
    pub dialect: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub written: Option<String>,
    pub program: String,
}

#[derive(Serialize)]
pub struct CheckReport {
    pub semantics: &'static str,
    pub minimality: &'static str,
    pub models: usize,
    pub repairs: usize,
    pub bijection: bool,
    /// `[model, repair]`, both 1-based.
    pub matched: Vec<[usize; 2]>,
    pub unmatched_models: Vec<usize>,
    pub unmatched_repairs: Vec<usize>,
}

#[derive(Serialize)]
pub struct QueryEval {
    pub name: String,
    pub head: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    pub answers: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct EvalReport {
    pub queries: Vec<QueryEval>,
    pub violations: usize,
    pub conflicting_tuples: Vec<u64>,
    pub ids_satisfied: bool,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum Report {
    Repairs(RepairsReport),
    Causes(CausesReport),
    Responsibility(ResponsibilityReport),
    Emit(EmitReport),
    Check(CheckReport),
    Eval(EvalReport),
}

/// `"{}"` when empty.
fn set<T: std::fmt::Display>(items: &[T]) -> String {
    format!("{{{}}}", join(items))
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut line = |cells: Vec<String>| {
        let last = cells.len() - 1;
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == last {
                s.push_str(cell);
            } else {
                let _ = write!(s, "{cell:<w$}  ");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.iter().map(|h| h.to_string()).collect());
    for row in rows {
        line(row.clone());
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

fn query_line(q: &QueryInfo) -> String {
    let answer = if q.answer.is_empty() {
        String::new()
    } else {
        format!("({})", q.answer.join(","))
    };
    let verdict = if q.holds { "holds" } else { "does not hold" };
    format!("query {}{answer} {verdict}\n", q.name)
}

fn cause_rows(entries: &[CauseEntry], by_position: bool) -> Vec<Vec<String>> {
    entries
        .iter()
        .map(|c| {
            let sets: Vec<String> = c.contingency_sets.iter().map(|s| set(s)).collect();
            let mut row = Vec::new();
            if by_position {
                row.push(c.position.clone().unwrap_or_default());
                row.push(c.value.clone().unwrap_or_default());
            } else {
                row.push(c.id.map(|t| t.to_string()).unwrap_or_default());
                row.push(c.tuple.clone().unwrap_or_default());
            }
            row.push(c.responsibility.to_string());
            row.push(yes_no(c.counterfactual));
            row.push(sets.join(" "));
            row
        })
        .collect()
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Repairs(r) => {
                let _ = writeln!(
                    out,
                    "semantics: {}, minimality: {}{}",
                    r.semantics,
                    r.minimality,
                    if r.ics { ", hard inclusion dependencies" } else { "" }
                );
                out.push_str("constraints:\n");
                for c in &r.constraints {
                    let _ = writeln!(out, "  {c}");
                }
                let _ = writeln!(
                    out,
                    "{} repair{}",
                    r.repairs.len(),
                    if r.repairs.len() == 1 { "" } else { "s" }
                );
                for (i, e) in r.repairs.iter().enumerate() {
                    match (&e.removed, &e.delta) {
                        (Some(removed), _) => {
                            let _ = writeln!(out, "#{} removed {}", i + 1, set(removed));
                        }
                        (None, Some(delta)) if delta.is_empty() => {
                            let _ = writeln!(out, "#{} delta {{}}", i + 1);
                        }
                        (None, Some(delta)) => {
                            let _ = writeln!(out, "#{} delta {}", i + 1, join(delta));
                        }
                        (None, None) => {}
                    }
                    let _ = writeln!(out, "   {}", e.tuples.join(" "));
                }
            }
            Report::Causes(r) => {
                out.push_str(&query_line(&r.query));
                match &r.tuple_causes {
                    None => {
                        if r.causes.is_empty() {
                            out.push_str("no causes\n");
                        } else {
                            table(
                                &mut out,
                                &["tid", "tuple", "rho", "counterfactual", "contingency sets"],
                                &cause_rows(&r.causes, false),
                            );
                        }
                    }
                    Some(by_tuple) => {
                        out.push_str("attribute causes\n");
                        if r.causes.is_empty() {
                            out.push_str("none\n");
                        } else {
                            table(
                                &mut out,
                                &["position", "value", "rho", "counterfactual", "contingency sets"],
                                &cause_rows(&r.causes, true),
                            );
                        }
                        out.push_str("tuple causes\n");
                        if by_tuple.is_empty() {
                            out.push_str("none\n");
                        } else {
                            table(
                                &mut out,
                                &["tid", "tuple", "rho", "counterfactual", "contingency sets"],
                                &cause_rows(by_tuple, false),
                            );
                        }
                    }
                }
            }
            Report::Responsibility(r) => {
                out.push_str(&query_line(&r.query));
                match &r.target {
                    Some(t) => {
                        let _ = writeln!(out, "rho({t}) = {}", r.responsibility);
                    }
                    None if r.most_responsible.is_empty() => out.push_str("no causes\n"),
                    None => {
                        let _ = writeln!(
                            out,
                            "most responsible (rho = {}): {}",
                            r.responsibility,
                            join(&r.most_responsible)
                        );
                    }
                }
            }
            Report::Emit(r) => match &r.written {
                Some(path) => {
                    let _ = writeln!(out, "wrote {} program to {path}", r.dialect);
                }
                None => out.push_str(&r.program),
            },
            Report::Check(r) => {
                let verdict = if r.bijection { "one-to-one" } else { "mismatch" };
                let _ = writeln!(
                    out,
                    "{} models, {} {} repairs: {verdict}",
                    r.models, r.repairs, r.minimality
                );
                for [m, k] in &r.matched {
                    let _ = writeln!(out, "model {m} <-> repair {k}");
                }
                if !r.unmatched_models.is_empty() {
                    let _ = writeln!(out, "unmatched models: {}", join(&r.unmatched_models));
                }
                if !r.unmatched_repairs.is_empty() {
                    let _ = writeln!(out, "unmatched repairs: {}", join(&r.unmatched_repairs));
                }
            }
            Report::Eval(r) => {
                for q in &r.queries {
                    match q.holds {
                        Some(h) => {
                            let _ = writeln!(out, "{}: {h}", q.name);
                        }
                        None => {
                            let answers: Vec<String> = q.answers.iter().map(|a| format!("({})", a.join(","))).collect();
                            let _ = writeln!(out, "{}({}): {}", q.name, q.head.join(","), set(&answers));
                        }
                    }
                }
                let _ = writeln!(out, "constraint violations: {}", r.violations);
                if !r.conflicting_tuples.is_empty() {
                    let _ = writeln!(out, "conflicting tuples: {}", join(&r.conflicting_tuples));
                }
                let _ = writeln!(
                    out,
                    "inclusion dependencies: {}",
                    if r.ids_satisfied { "satisfied" } else { "violated" }
                );
            }
        }
        out
    }
}
