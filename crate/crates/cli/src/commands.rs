//! Command dispatch over the engine.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use causerep_core::asp::{
    emit_null_repair_program, emit_tuple_repair_program_with_ids, verify_model_correspondence, EmitOptions, Extension,
    Flavor, Semantics, VerifyError,
};
use causerep_core::null_causes::{NullCauseAnalysis, TupleMultiplicity};
use causerep_core::null_repairs::{cardinality_null_repairs, null_repairs};
use causerep_core::qlang::{
    eval_bcq, eval_open, negate_query_to_dc, parse_problem, satisfies_ids, violations, DenialConstraint, Problem,
    QuerySpec,
};
use causerep_core::relmodel::{Constant, Instance, PositionRef, Tid};
use causerep_core::tuple_causes::{actual_causes_under_ics, actual_causes_with, CauseOptions, TupleCauseReport};
use causerep_core::tuple_repairs::{c_repairs, s_repairs, s_repairs_under_hard_ics};
use causerep_core::Rational;

use crate::report::{
    CauseEntry, CausesReport, CheckReport, EmitReport, EvalReport, Item, QueryEval, QueryInfo, RepairEntry,
    RepairsReport, Report, ResponsibilityReport,
};
use crate::{Cli, Command, Common, ExtensionArg, FlavorArg, Format, MinimalityArg, SemanticsArg};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Analysis(String),
    /// Solver output and engine disagree; carries the rendered report.
    Mismatch(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Analysis(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Analysis(m) | CliError::Mismatch(m) => f.write_str(m),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl From<causerep_core::Error> for CliError {
    fn from(e: causerep_core::Error) -> Self {
        CliError::Analysis(e.to_string())
    }
}

impl From<causerep_core::qlang::EvalError> for CliError {
    fn from(e: causerep_core::qlang::EvalError) -> Self {
        CliError::Analysis(e.to_string())
    }
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn load(path: &Path) -> Result<Problem, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| CliError::Parse(format!("{}:{e}", path.display())))
}

fn parse_constant(s: &str) -> Constant {
    let s = s.trim();
    match s.parse::<i64>() {
        Ok(i) => Constant::Integer(i),
        Err(_) => Constant::from(s),
    }
}

/// The query named by `--query`, or the file's only query, grounded with
/// `--answer` when it has head variables.
fn select_query(problem: &Problem, common: &Common) -> Result<Option<QuerySpec>, CliError> {
    let query = match &common.query {
        Some(name) => Some(
            problem
                .query(name)
                .ok_or_else(|| usage(format!("no query named {name}")))?,
        ),
        None if problem.queries.len() == 1 => Some(&problem.queries[0]),
        None => None,
    };
    let Some(query) = query else {
        if common.answer.is_some() {
            return Err(usage("--answer needs a query"));
        }
        return Ok(None);
    };
    match (&common.answer, query.is_boolean()) {
        (None, true) => Ok(Some(query.clone())),
        (Some(_), true) => Err(usage(format!("query {} is Boolean and takes no --answer", query.name))),
        (None, false) => Err(usage(format!(
            "query {} has head variables {}; pass --answer",
            query.name,
            query.head.join(",")
        ))),
        (Some(a), false) => {
            let values: Vec<Constant> = a.split(',').map(parse_constant).collect();
            Ok(Some(query.ground(&values)?))
        }
    }
}

fn required_query(problem: &Problem, common: &Common) -> Result<QuerySpec, CliError> {
    select_query(problem, common)?.ok_or_else(|| usage("the file declares several queries or none; pass --query"))
}

/// The file's denial constraints, plus the negation of the selected query
/// when one is named or when the file has no constraints of its own.
fn constraints(problem: &Problem, common: &Common) -> Result<Vec<DenialConstraint>, CliError> {
    let mut dcs = problem.dcs.clone();
    if common.query.is_some() || dcs.is_empty() {
        if let Some(q) = select_query(problem, common)? {
            dcs.extend(negate_query_to_dc(&q)?);
        }
    }
    Ok(dcs)
}

fn prepared_instance(problem: &Problem, common: &Common) -> Result<Instance, CliError> {
    let mut instance = problem.instance.clone();
    if !common.exogenous.is_empty() && common.semantics == SemanticsArg::Null {
        return Err(usage("--exogenous applies to tuple semantics only"));
    }
    for &t in &common.exogenous {
        instance
            .set_endogenous(Tid(t), false)
            .map_err(|e| usage(format!("--exogenous: {e}")))?;
    }
    Ok(instance)
}

fn check_ics(common: &Common) -> Result<(), CliError> {
    if common.ics && common.semantics == SemanticsArg::Null {
        return Err(usage("--ics is only available with tuple semantics"));
    }
    Ok(())
}

fn semantics_name(s: SemanticsArg) -> &'static str {
    match s {
        SemanticsArg::Tuple => "tuple",
        SemanticsArg::Null => "null",
    }
}

fn query_info(query: &QuerySpec, answer: &Option<String>, holds: bool) -> QueryInfo {
    QueryInfo {
        name: query.name.clone(),
        answer: answer
            .as_deref()
            .map(|a| a.split(',').map(|s| parse_constant(s).to_string()).collect())
            .unwrap_or_default(),
        holds,
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let common = &cli.common;
    let report = match &cli.command {
        Command::Repairs(input) => repairs(&load(&input.file)?, common)?,
        Command::Causes(args) => {
            let caps = CauseOptions {
                max_contingency_sets: args.max_contingency_sets,
                max_contingency_size: args.max_contingency_size,
            };
            Report::Causes(causes(
                &load(&args.file)?,
                common,
                &caps,
                multiplicity(args.collapse_tuples),
            )?)
        }
        Command::Responsibility(args) => responsibility(&load(&args.file)?, common, args)?,
        Command::EmitAsp(args) => emit(&load(&args.file)?, common, args)?,
        Command::Check(args) => {
            let report = check(&load(&args.file)?, common, &args.models)?;
            let bijection = report.bijection;
            let out = render(&Report::Check(report), common.format);
            return if bijection {
                Ok(out)
            } else {
                Err(CliError::Mismatch(out))
            };
        }
        Command::Eval(input) => eval(&load(&input.file)?, common)?,
    };
    Ok(render(&report, common.format))
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
            s.push('\n');
            s
        }
    }
}

fn multiplicity(collapse: bool) -> TupleMultiplicity {
    if collapse {
        TupleMultiplicity::Collapsed
    } else {
        TupleMultiplicity::Plain
    }
}

fn repairs(problem: &Problem, common: &Common) -> Result<Report, CliError> {
    check_ics(common)?;
    let instance = prepared_instance(problem, common)?;
    let dcs = constraints(problem, common)?;
    let cardinality = common.minimality == MinimalityArg::Cardinality;
    let entries: Vec<RepairEntry> = match common.semantics {
        SemanticsArg::Tuple => {
            let records = match (common.ics, cardinality) {
                (true, true) => return Err(usage("--ics repairs are subset-minimal; drop --minimality cardinality")),
                (true, false) => s_repairs_under_hard_ics(&instance, &dcs, &problem.ids)?,
                (false, false) => s_repairs(&instance, &dcs)?,
                (false, true) => c_repairs(&instance, &dcs)?,
            };
            records
                .into_iter()
                .map(|r| RepairEntry {
                    removed: Some(r.removed.iter().map(|t| t.0).collect()),
                    delta: None,
                    tuples: tuples(&r.repair),
                })
                .collect()
        }
        SemanticsArg::Null => {
            let records = if cardinality {
                cardinality_null_repairs(&instance, &dcs)?
            } else {
                null_repairs(&instance, &dcs)?
            };
            records
                .into_iter()
                .map(|r| RepairEntry {
                    removed: None,
                    delta: Some(r.delta.iter().map(ToString::to_string).collect()),
                    tuples: tuples(&r.repair),
                })
                .collect()
        }
    };
    Ok(Report::Repairs(RepairsReport {
        semantics: semantics_name(common.semantics),
        minimality: if cardinality { "cardinality" } else { "subset" },
        ics: common.ics,
        constraints: dcs.iter().map(ToString::to_string).collect(),
        repairs: entries,
    }))
}

fn tuples(instance: &Instance) -> Vec<String> {
    instance.iter().map(ToString::to_string).collect()
}

fn capped(mut sets: Vec<Vec<Item>>, caps: &CauseOptions) -> Vec<Vec<Item>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    if let Some(size) = caps.max_contingency_size {
        sets.retain(|s| s.len() <= size);
    }
    if let Some(n) = caps.max_contingency_sets {
        sets.truncate(n);
    }
    sets
}

fn tuple_entry(instance: &Instance, r: &TupleCauseReport, caps: &CauseOptions) -> CauseEntry {
    let sets = r
        .contingency_sets
        .iter()
        .map(|s| s.iter().map(|t| Item::Tid(t.0)).collect())
        .collect();
    CauseEntry {
        id: Some(r.tid.0),
        position: None,
        value: None,
        tuple: instance.get(r.tid).map(ToString::to_string),
        responsibility: r.responsibility,
        counterfactual: r.counterfactual,
        contingency_sets: capped(sets, caps),
    }
}

fn positions(set: &BTreeSet<PositionRef>, skip: impl Fn(&PositionRef) -> bool) -> Vec<Item> {
    set.iter()
        .filter(|p| !skip(p))
        .map(|p| Item::Position(p.to_string()))
        .collect()
}

fn causes(
    problem: &Problem,
    common: &Common,
    caps: &CauseOptions,
    mult: TupleMultiplicity,
) -> Result<CausesReport, CliError> {
    check_ics(common)?;
    let instance = prepared_instance(problem, common)?;
    let query = required_query(problem, common)?;
    let holds = eval_bcq(&instance, &query)?;
    let info = query_info(&query, &common.answer, holds);
    match common.semantics {
        SemanticsArg::Tuple => {
            let reports = if common.ics {
                actual_causes_under_ics(&instance, &query, &problem.ids)?
            } else {
                actual_causes_with(&instance, &query, caps)?
            };
            Ok(CausesReport {
                semantics: "tuple",
                ics: common.ics,
                query: info,
                causes: reports.iter().map(|r| tuple_entry(&instance, r, caps)).collect(),
                tuple_causes: None,
            })
        }
        SemanticsArg::Null => {
            let analysis = NullCauseAnalysis::new(&instance, &query)?;
            let attr = analysis
                .attr_causes()?
                .into_iter()
                .map(|c| {
                    let sets = analysis
                        .diff_null(&c.position)
                        .iter()
                        .map(|d| positions(d, |p| *p == c.position))
                        .collect();
                    CauseEntry {
                        id: None,
                        position: Some(c.position.to_string()),
                        value: Some(c.original_value.to_string()),
                        tuple: None,
                        responsibility: c.responsibility,
                        counterfactual: c.counterfactual,
                        contingency_sets: capped(sets, caps),
                    }
                })
                .collect();
            let by_tuple = analysis
                .tuple_null_causes(mult)
                .into_iter()
                .map(|c| {
                    let sets = analysis
                        .deltas()
                        .iter()
                        .filter(|d| d.iter().any(|p| p.tid == c.tid))
                        .map(|d| positions(d, |p| p.tid == c.tid))
                        .collect();
                    CauseEntry {
                        id: Some(c.tid.0),
                        position: None,
                        value: None,
                        tuple: instance.get(c.tid).map(ToString::to_string),
                        responsibility: c.responsibility,
                        counterfactual: c.counterfactual,
                        contingency_sets: capped(sets, caps),
                    }
                })
                .collect();
            Ok(CausesReport {
                semantics: "null",
                ics: false,
                query: info,
                causes: attr,
                tuple_causes: Some(by_tuple),
            })
        }
    }
}

/// `R[2;1]`.
fn parse_position(s: &str) -> Result<PositionRef, CliError> {
    let bad = || usage(format!("cannot read position {s:?}; expected the form R[2;1]"));
    let (relation, rest) = s.trim().split_once('[').ok_or_else(bad)?;
    let inner = rest.strip_suffix(']').ok_or_else(bad)?;
    let (tid, pos) = inner.split_once(';').ok_or_else(bad)?;
    let tid: u64 = tid.trim().parse().map_err(|_| bad())?;
    let pos: usize = pos.trim().parse().map_err(|_| bad())?;
    if relation.is_empty() || tid == 0 || pos == 0 {
        return Err(bad());
    }
    Ok(PositionRef::new(relation, tid, pos))
}

fn responsibility(problem: &Problem, common: &Common, args: &crate::ResponsibilityArgs) -> Result<Report, CliError> {
    if args.position.is_some() && common.semantics == SemanticsArg::Tuple {
        return Err(usage("--position needs --semantics null"));
    }
    let all = causes(
        problem,
        common,
        &CauseOptions::default(),
        multiplicity(args.collapse_tuples),
    )?;
    let zero = Rational::new(0, 1);
    let (target, pool) = match (&args.tid, &args.position) {
        (Some(t), _) => (Some(Item::Tid(*t)), all.tuple_causes.as_ref().unwrap_or(&all.causes)),
        (None, Some(p)) => (Some(Item::Position(parse_position(p)?.to_string())), &all.causes),
        (None, None) => (None, &all.causes),
    };
    let key = |c: &CauseEntry| match (&c.id, &c.position) {
        (_, Some(p)) => Item::Position(p.clone()),
        (Some(t), None) => Item::Tid(*t),
        (None, None) => unreachable!("every cause has an id or a position"),
    };
    let report = match target {
        Some(target) => {
            let rho = pool
                .iter()
                .find(|c| key(c) == target)
                .map(|c| c.responsibility)
                .unwrap_or(zero);
            ResponsibilityReport {
                semantics: all.semantics,
                query: all.query,
                target: Some(target),
                responsibility: rho,
                most_responsible: Vec::new(),
            }
        }
        None => {
            let max = pool.iter().map(|c| c.responsibility).max().unwrap_or(zero);
            ResponsibilityReport {
                semantics: all.semantics,
                query: all.query,
                target: None,
                responsibility: max,
                most_responsible: pool.iter().filter(|c| c.responsibility == max).map(key).collect(),
            }
        }
    };
    Ok(Report::Responsibility(report))
}

fn emit(problem: &Problem, common: &Common, args: &crate::EmitArgs) -> Result<Report, CliError> {
    check_ics(common)?;
    let dcs = constraints(problem, common)?;
    let options = EmitOptions {
        flavor: match args.flavor {
            FlavorArg::Disjunctive => Flavor::Disjunctive,
            FlavorArg::NonDisjunctive => Flavor::NonDisjunctive,
        },
        include: args
            .include
            .iter()
            .map(|e| match e {
                ExtensionArg::Causes => Extension::Causes,
                ExtensionArg::CauCont => Extension::CauCont,
                ExtensionArg::ContingencySets => Extension::ContingencySets,
                ExtensionArg::PreRho => Extension::PreRho,
                ExtensionArg::WeakConstraints => Extension::WeakConstraints,
            })
            .collect(),
        maxint: args.maxint,
        semantics: match common.semantics {
            SemanticsArg::Tuple => Semantics::Tuple,
            SemanticsArg::Null => Semantics::Null,
        },
    };
    let ids = if common.ics { problem.ids.as_slice() } else { &[] };
    let program = match options.semantics {
        Semantics::Tuple => emit_tuple_repair_program_with_ids(&problem.instance, &dcs, ids, &options),
        Semantics::Null => emit_null_repair_program(&problem.instance, &dcs, &options),
    }
    .map_err(|e| usage(e.to_string()))?;
    let written = match &args.output {
        Some(path) => {
            fs::write(path, &program.text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    Ok(Report::Emit(EmitReport {
        semantics: semantics_name(common.semantics),
        dialect: match program.dialect {
            causerep_core::asp::Dialect::CoreAsp => "core-asp",
            causerep_core::asp::Dialect::SetExtendedAsp => "set-extended-asp",
        },
        written,
        program: program.text,
    }))
}

fn check(problem: &Problem, common: &Common, models: &Path) -> Result<CheckReport, CliError> {
    if common.ics {
        return Err(usage("check does not support --ics"));
    }
    let dcs = constraints(problem, common)?;
    let text = fs::read_to_string(models).map_err(|e| usage(format!("cannot read {}: {e}", models.display())))?;
    let semantics = match common.semantics {
        SemanticsArg::Tuple => Semantics::Tuple,
        SemanticsArg::Null => Semantics::Null,
    };
    let r = verify_model_correspondence(&problem.instance, &dcs, &text, semantics).map_err(|e| match e {
        VerifyError::Parse(p) => CliError::Parse(format!("{}:{p}", models.display())),
        other => CliError::Analysis(other.to_string()),
    })?;
    Ok(CheckReport {
        semantics: semantics_name(common.semantics),
        minimality: match r.minimality {
            causerep_core::tuple_repairs::Minimality::Subset => "subset",
            causerep_core::tuple_repairs::Minimality::Cardinality => "cardinality",
        },
        models: r.models,
        repairs: r.repairs,
        bijection: r.is_bijection(),
        matched: r.matched.iter().map(|&(m, k)| [m + 1, k + 1]).collect(),
        unmatched_models: r.unmatched_models.iter().map(|m| m + 1).collect(),
        unmatched_repairs: r.unmatched_repairs.iter().map(|k| k + 1).collect(),
    })
}

fn eval(problem: &Problem, common: &Common) -> Result<Report, CliError> {
    let queries: Vec<&QuerySpec> = match &common.query {
        Some(name) => vec![problem
            .query(name)
            .ok_or_else(|| usage(format!("no query named {name}")))?],
        None => problem.queries.iter().collect(),
    };
    let mut out = Vec::new();
    for q in queries {
        let entry = if q.is_boolean() {
            QueryEval {
                name: q.name.clone(),
                head: Vec::new(),
                holds: Some(eval_bcq(&problem.instance, q)?),
                answers: Vec::new(),
            }
        } else {
            QueryEval {
                name: q.name.clone(),
                head: q.head.clone(),
                holds: None,
                answers: eval_open(&problem.instance, q)?
                    .into_iter()
                    .map(|a| a.iter().map(ToString::to_string).collect())
                    .collect(),
            }
        };
        out.push(entry);
    }
    let violated = violations(&problem.instance, &problem.dcs)?;
    Ok(Report::Eval(EvalReport {
        queries: out,
        violations: violated.len(),
        conflicting_tuples: violated
            .iter()
            .flat_map(|w| w.tids.iter().map(|t| t.0))
            .collect::<BTreeSet<u64>>()
            .into_iter()
            .collect(),
        ids_satisfied: satisfies_ids(&problem.instance, &problem.ids)?,
    }))
}
