//! Program text generation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{EmitError, EmitOptions, Extension, Flavor, ProgramText, Semantics};
use crate::qlang::{critical_slots, BodyAtom, BuiltinAtom, DenialConstraint, InclusionDependency, Term};
use crate::relmodel::{Constant, Instance};

const CONTINGENCY_RULES: [&str; 6] = [
    "preCont(T,{TC}) :- cauCont(T,TC).",
    "preCont(T,#union(C,{TC})) :- cauCont(T,TC), preCont(T,C), not #member(TC,C).",
    "cont(T,C) :- preCont(T,C), not HoleIn(T,C).",
    "HoleIn(T,C) :- preCont(T,C), cauCont(T,TC), not #member(TC,C).",
    "tmpCont(T) :- cont(T,C), not #card(C,0).",
    "cont(T,{}) :- cause(T), not tmpCont(T).",
];

const PRE_RHO_RULE: &str = "preRho(T,N + 1) :- cause(T), #int(N), #count{TC: cauCont(T,TC)} = N.";

/// The repair program for tuple deletions, with the extensions selected in
/// `options`.
pub fn emit_tuple_repair_program(
    instance: &Instance,
    dcs: &[DenialConstraint],
    options: &EmitOptions,
) -> Result<ProgramText, EmitError> {
    emit_tuple_repair_program_with_ids(instance, dcs, &[], options)
}

/// As [`emit_tuple_repair_program`], adding one deletion rule per inclusion
/// dependency so that a premise tuple is deleted when no witness stays.
pub fn emit_tuple_repair_program_with_ids(
    instance: &Instance,
    dcs: &[DenialConstraint],
    ids: &[InclusionDependency],
    options: &EmitOptions,
) -> Result<ProgramText, EmitError> {
    if options.semantics == Semantics::Null {
        return emit_null_repair_program(instance, dcs, options);
    }
    options.validate(instance.len(), max_tid(instance))?;
    let relations = relations(instance, dcs, ids);
    let mut out = Program::default();
    out.facts(instance);

    for dc in dcs {
        let dc = Renamed::new(dc);
        match options.flavor {
            Flavor::Disjunctive => out.push(dc.disjunctive_rule()),
            Flavor::NonDisjunctive => {
                for i in 0..dc.atoms.len() {
                    out.push(dc.deletion_rule(i));
                }
            }
        }
    }
    out.gap();

    let aux_names: Vec<String> = match ids.len() {
        1 => alloc::vec!["aux".into()],
        n => (1..=n).map(|k| format!("aux{k}")).collect(),
    };
    for (id, aux) in ids.iter().zip(&aux_names) {
        let shared: Vec<String> = id
            .shared_variables()
            .into_iter()
            .map(|(v, _, _)| avoid_tid_var(&v))
            .collect();
        let premise_terms = terms(&id.premise.terms);
        let premise = render_atom(&id.premise.relation, Some("T"), &premise_terms, None);
        let witness = render_atom(
            &primed(&id.conclusion.relation),
            Some("T"),
            &terms(&id.conclusion.terms),
            Some("s"),
        );
        let aux_atom = render_atom(aux, None, &shared, None);
        out.push(format!(
            "{} :- {premise}, not {aux_atom}.",
            render_atom(&primed(&id.premise.relation), Some("T"), &premise_terms, Some("d"))
        ));
        out.push(format!("{aux_atom} :- {witness}."));
    }
    if !ids.is_empty() {
        out.gap();
    }

    for (rel, &arity) in &relations {
        let xs = generic_vars("X", arity);
        out.push(format!(
            "{} :- {}, not {}.",
            render_atom(&primed(rel), Some("T"), &xs, Some("s")),
            render_atom(rel, Some("T"), &xs, None),
            render_atom(&primed(rel), Some("T"), &xs, Some("d")),
        ));
    }
    out.gap();

    let deletable: Vec<(&str, usize)> = deletable(dcs, ids).into_iter().map(|r| (r, relations[r])).collect();
    let deleted = |rel: &str, arity: usize, tid: &str, base: &str| {
        render_atom(&primed(rel), Some(tid), &generic_vars(base, arity), Some("d"))
    };

    if options.has(Extension::Causes) {
        for &(rel, arity) in &deletable {
            out.push(format!("cause(T) :- {}.", deleted(rel, arity, "T", "X")));
        }
        out.gap();
    }
    if options.has(Extension::CauCont) {
        for &(p, pa) in &deletable {
            for &(q, qa) in &deletable {
                let guard = if p == q { ", T != TC" } else { "" };
                out.push(format!(
                    "cauCont(T,TC) :- {}, {}{guard}.",
                    deleted(p, pa, "T", "X"),
                    deleted(q, qa, "TC", "U")
                ));
            }
        }
        out.gap();
    }
    if options.has(Extension::ContingencySets) {
        for rule in CONTINGENCY_RULES {
            out.push(rule.into());
        }
        out.gap();
    }
    if options.has(Extension::PreRho) {
        out.push(format!("#maxint = {}.", options.maxint));
        out.push(PRE_RHO_RULE.into());
        out.gap();
    }
    if options.has(Extension::WeakConstraints) {
        for &(rel, arity) in &deletable {
            out.push(format!(":~ {}.", deleted(rel, arity, "T", "X")));
        }
    }
    Ok(ProgramText {
        text: out.finish(),
        dialect: options.dialect(),
    })
}

/// The repair program for null updates, with u/fu/t/s annotations and,
/// with [`Extension::Causes`], attribute-cause rules.
pub fn emit_null_repair_program(
    instance: &Instance,
    dcs: &[DenialConstraint],
    options: &EmitOptions,
) -> Result<ProgramText, EmitError> {
    let options = EmitOptions {
        semantics: Semantics::Null,
        ..options.clone()
    };
    options.validate(instance.len(), max_tid(instance))?;
    let relations = relations(instance, dcs, &[]);
    let mut out = Program::default();
    out.facts(instance);

    for (rel, &arity) in &relations {
        let xs = generic_vars("X", arity);
        let p = primed(rel);
        out.push(format!(
            "{} :- {}.",
            render_atom(&p, Some("T"), &xs, Some("t")),
            render_atom(rel, Some("T"), &xs, None)
        ));
        out.push(format!(
            "{} :- {}.",
            render_atom(&p, Some("T"), &xs, Some("t")),
            render_atom(&p, Some("T"), &xs, Some("u"))
        ));
    }
    out.gap();

    for (k, dc) in dcs.iter().enumerate() {
        let slots = critical_slots(&dc.body);
        if slots.is_empty() {
            return Err(EmitError::NotNullRepairable(k));
        }
        let dc = Renamed::new(dc);
        for &(a, j) in &slots {
            out.push(dc.update_rule(a, j, &slots));
        }
    }
    out.gap();

    for (rel, &arity) in &relations {
        let xs = generic_vars("X", arity);
        let p = primed(rel);
        let mut fu = format!(
            "{} :- {}",
            render_atom(&p, Some("T"), &xs, Some("fu")),
            render_atom(&p, Some("T"), &xs, Some("u"))
        );
        let mut aux_rules = Vec::new();
        for j in 0..arity {
            let aux = render_atom(&format!("aux{rel}{}", j + 1), Some("T"), &xs, None);
            fu.push_str(&format!(", not {aux}"));
            aux_rules.push(format!(
                "{aux} :- {}, {}, {} != null.",
                render_atom(rel, Some("T"), &xs, None),
                render_atom(&p, Some("T"), &with_null(&xs, j), Some("u")),
                xs[j]
            ));
        }
        fu.push('.');
        out.push(fu);
        for r in aux_rules {
            out.push(r);
        }
    }
    out.gap();

    for (rel, &arity) in &relations {
        let xs = generic_vars("X", arity);
        let p = primed(rel);
        let stays = render_atom(&p, Some("T"), &xs, Some("s"));
        let aux = format!("aux{rel}(T)");
        out.push(format!("{stays} :- {}.", render_atom(&p, Some("T"), &xs, Some("fu"))));
        out.push(format!(
            "{stays} :- {}, not {aux}.",
            render_atom(rel, Some("T"), &xs, None)
        ));
        out.push(format!("{aux} :- {}.", render_atom(&p, Some("T"), &xs, Some("u"))));
    }

    if options.has(Extension::Causes) {
        out.gap();
        for rel in deletable(dcs, &[]) {
            let arity = relations[rel];
            let xs = generic_vars("X", arity);
            let us = generic_vars("U", arity);
            for j in 0..arity {
                out.push(format!(
                    "cause(T,{},{}) :- {}, {}, {} != null.",
                    j + 1,
                    us[j],
                    render_atom(&primed(rel), Some("T"), &with_null(&xs, j), Some("s")),
                    render_atom(rel, Some("T"), &us, None),
                    us[j]
                ));
            }
        }
    }
    Ok(ProgramText {
        text: out.finish(),
        dialect: options.dialect(),
    })
}

#[derive(Default)]
struct Program {
    lines: Vec<String>,
}

impl Program {
    fn push(&mut self, line: String) {
        self.lines.push(line);
    }

    fn gap(&mut self) {
        if self.lines.last().is_some_and(|l| !l.is_empty()) {
            self.lines.push(String::new());
        }
    }

    fn facts(&mut self, instance: &Instance) {
        for t in instance.iter() {
            let values: Vec<String> = t.values.iter().map(render_const).collect();
            self.push(format!(
                "{}.",
                render_atom(&t.relation, Some(&t.tid.0.to_string()), &values, None)
            ));
        }
        self.gap();
    }

    fn finish(mut self) -> String {
        while self.lines.last().is_some_and(String::is_empty) {
            self.lines.pop();
        }
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}

fn max_tid(instance: &Instance) -> u64 {
    instance.tids().map(|t| t.0).max().unwrap_or(0)
}

/// Every relation the program mentions, with its arity.
fn relations<'a>(
    instance: &'a Instance,
    dcs: &'a [DenialConstraint],
    ids: &'a [InclusionDependency],
) -> BTreeMap<&'a str, usize> {
    let mut out: BTreeMap<&str, usize> = instance.schema().iter().map(|(r, a)| (r.as_str(), *a)).collect();
    let atoms = dcs
        .iter()
        .flat_map(|dc| dc.body.atoms.iter())
        .chain(ids.iter().flat_map(|id| [&id.premise, &id.conclusion]));
    for atom in atoms {
        out.entry(atom.relation.as_str()).or_insert(atom.terms.len());
    }
    out
}

/// Relations whose tuples a repair may delete.
fn deletable<'a>(dcs: &'a [DenialConstraint], ids: &'a [InclusionDependency]) -> BTreeSet<&'a str> {
    dcs.iter()
        .flat_map(|dc| dc.body.atoms.iter().map(|a| a.relation.as_str()))
        .chain(ids.iter().map(|id| id.premise.relation.as_str()))
        .collect()
}

fn primed(relation: &str) -> String {
    format!("{relation}_a")
}

/// `X, Y, Z` for small arities, `X1 … Xn` beyond.
fn generic_vars(base: &str, arity: usize) -> Vec<String> {
    let small: &[&str] = match base {
        "X" => &["X", "Y", "Z"],
        _ => &["U", "V", "W"],
    };
    if arity <= small.len() {
        small[..arity].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=arity).map(|i| format!("{base}{i}")).collect()
    }
}

fn with_null(args: &[String], j: usize) -> Vec<String> {
    let mut out = args.to_vec();
    out[j] = "null".into();
    out
}

fn render_const(c: &Constant) -> String {
    match c {
        Constant::Null => "null".into(),
        Constant::Integer(i) => i.to_string(),
        Constant::Symbol(s) => {
            let plain = s.starts_with(|c: char| c.is_ascii_lowercase())
                && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if plain {
                s.clone()
            } else {
                format!("\"{s}\"")
            }
        }
    }
}

fn avoid_tid_var(v: &str) -> String {
    let mut name = v.to_string();
    while name == "T" {
        name.push('_');
    }
    name
}

fn terms(ts: &[Term]) -> Vec<String> {
    ts.iter()
        .map(|t| match t {
            Term::Var(v) => avoid_tid_var(v),
            Term::Const(c) => render_const(c),
        })
        .collect()
}

fn render_atom(pred: &str, tid: Option<&str>, args: &[String], annotation: Option<&str>) -> String {
    let all: Vec<&str> = tid
        .into_iter()
        .chain(args.iter().map(String::as_str))
        .chain(annotation)
        .collect();
    if all.is_empty() {
        pred.into()
    } else {
        format!("{pred}({})", all.join(","))
    }
}

/// A denial constraint rendered with variable names that cannot clash with
/// the tid variables the rules introduce.
struct Renamed {
    atoms: Vec<(String, Vec<String>)>,
    builtins: Vec<String>,
    builtin_vars: Vec<String>,
}

impl Renamed {
    fn new(dc: &DenialConstraint) -> Self {
        let m = dc.body.atoms.len();
        let mut reserved: BTreeSet<String> = ["T".into(), "TC".into()].into_iter().collect();
        reserved.extend((1..=m).map(|i| format!("T{i}")));
        let mut names: BTreeMap<&str, String> = BTreeMap::new();
        for v in dc.body.variables() {
            let mut name = v.to_string();
            while reserved.contains(&name) {
                name.push('_');
            }
            reserved.insert(name.clone());
            names.insert(v, name);
        }
        let render = |t: &Term| match t {
            Term::Var(v) => names[v.as_str()].clone(),
            Term::Const(c) => render_const(c),
        };
        let atoms = dc
            .body
            .atoms
            .iter()
            .map(|a: &BodyAtom| (a.relation.clone(), a.terms.iter().map(render).collect()))
            .collect();
        let builtins = dc
            .body
            .builtins
            .iter()
            .map(|b: &BuiltinAtom| format!("{} {} {}", render(&b.left), b.op.symbol(), render(&b.right)))
            .collect();
        let mut builtin_vars: Vec<String> = Vec::new();
        for t in dc.body.builtins.iter().flat_map(|b| [&b.left, &b.right]) {
            if let Term::Var(v) = t {
                let n = names[v.as_str()].clone();
                if !builtin_vars.contains(&n) {
                    builtin_vars.push(n);
                }
            }
        }
        Renamed {
            atoms,
            builtins,
            builtin_vars,
        }
    }

    /// Tid variables with atom `head` first: `T` for it, `T2 …` for the rest
    /// in body order.
    fn tid_vars(&self, head: usize) -> Vec<String> {
        let mut next = 2;
        (0..self.atoms.len())
            .map(|i| {
                if i == head {
                    "T".into()
                } else {
                    next += 1;
                    format!("T{}", next - 1)
                }
            })
            .collect()
    }

    fn order(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        core::iter::once(head).chain((0..self.atoms.len()).filter(move |&i| i != head))
    }

    fn disjunctive_rule(&self) -> String {
        let tids: Vec<String> = (1..=self.atoms.len()).map(|i| format!("T{i}")).collect();
        let head: Vec<String> = self
            .atoms
            .iter()
            .zip(&tids)
            .map(|((r, args), t)| render_atom(&primed(r), Some(t), args, Some("d")))
            .collect();
        let mut body: Vec<String> = self
            .atoms
            .iter()
            .zip(&tids)
            .map(|((r, args), t)| render_atom(r, Some(t), args, None))
            .collect();
        body.extend(self.builtins.iter().cloned());
        format!("{} :- {}.", head.join(" v "), body.join(", "))
    }

    fn deletion_rule(&self, head: usize) -> String {
        let tids = self.tid_vars(head);
        let (hr, hargs) = &self.atoms[head];
        let mut body: Vec<String> = self
            .order(head)
            .map(|i| render_atom(&self.atoms[i].0, Some(&tids[i]), &self.atoms[i].1, None))
            .collect();
        body.extend(self.builtins.iter().cloned());
        for i in self.order(head).skip(1) {
            body.push(format!(
                "not {}",
                render_atom(&primed(&self.atoms[i].0), Some(&tids[i]), &self.atoms[i].1, Some("d"))
            ));
        }
        format!(
            "{} :- {}.",
            render_atom(&primed(hr), Some("T"), hargs, Some("d")),
            body.join(", ")
        )
    }

    /// Sets the critical position `(head, j)` to null, provided no other
    /// critical position of the same violation was already updated.
    fn update_rule(&self, head: usize, j: usize, critical: &BTreeSet<(usize, usize)>) -> String {
        let tids = self.tid_vars(head);
        let (hr, hargs) = &self.atoms[head];
        let mut body: Vec<String> = self
            .order(head)
            .map(|i| render_atom(&primed(&self.atoms[i].0), Some(&tids[i]), &self.atoms[i].1, Some("t")))
            .collect();
        body.extend(self.builtins.iter().cloned());
        let mut guarded: Vec<&str> = Vec::new();
        let target = &hargs[j - 1];
        if is_var(target) {
            guarded.push(target);
        }
        for v in &self.builtin_vars {
            if !guarded.contains(&v.as_str()) {
                guarded.push(v);
            }
        }
        body.extend(guarded.iter().map(|v| format!("{v} != null")));
        for i in self.order(head) {
            for &(a, k) in critical.iter().filter(|(a, _)| *a == i) {
                if (a, k) == (head, j) {
                    continue;
                }
                let (r, args) = &self.atoms[a];
                body.push(format!(
                    "not {}",
                    render_atom(&primed(r), Some(&tids[a]), &with_null(args, k - 1), Some("u"))
                ));
            }
        }
        format!(
            "{} :- {}.",
            render_atom(&primed(hr), Some("T"), &with_null(hargs, j - 1), Some("u")),
            body.join(", ")
        )
    }
}

fn is_var(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlang::{negate_query_to_dc, parse_problem};

    fn opts(flavor: Flavor, ext: &[Extension]) -> EmitOptions {
        EmitOptions {
            flavor,
            ..EmitOptions::default()
        }
        .with(ext)
    }

    #[test]
    fn disjunctive_example3_program() {
        let p = parse_problem("R(a4,a3). R(a2,a1). R(a3,a3). S(a4). S(a2). S(a3). q :- S(X), R(X,Y), S(Y)?").unwrap();
        let dcs = negate_query_to_dc(&p.queries[0]).unwrap();
        let prog = emit_tuple_repair_program(&p.instance, &dcs, &opts(Flavor::Disjunctive, &[])).unwrap();
        let expected = "R(1,a4,a3).\nR(2,a2,a1).\nR(3,a3,a3).\nS(4,a4).\nS(5,a2).\nS(6,a3).\n\n\
            S_a(T1,X,d) v R_a(T2,X,Y,d) v S_a(T3,Y,d) :- S(T1,X), R(T2,X,Y), S(T3,Y).\n\n\
            R_a(T,X,Y,s) :- R(T,X,Y), not R_a(T,X,Y,d).\nS_a(T,X,s) :- S(T,X), not S_a(T,X,d).\n";
        assert_eq!(prog.text, expected);
        assert_eq!(prog.dialect, super::super::Dialect::CoreAsp);
    }

    #[test]
    fn non_disjunctive_rules_rotate_the_head() {
        let p = parse_problem("B(a). E(a). :- B(X), E(X).").unwrap();
        let prog = emit_tuple_repair_program(&p.instance, &p.dcs, &EmitOptions::default()).unwrap();
        assert!(prog.text.contains("B_a(T,X,d) :- B(T,X), E(T2,X), not E_a(T2,X,d).\n"));
        assert!(prog.text.contains("E_a(T,X,d) :- E(T,X), B(T2,X), not B_a(T2,X,d).\n"));
    }

    #[test]
    fn fd_rule_keeps_the_builtin() {
        let p = parse_problem("R(a,b). R(a,c). :- R(X,Y), R(X,Z), Y != Z.").unwrap();
        let prog = emit_tuple_repair_program(&p.instance, &p.dcs, &EmitOptions::default()).unwrap();
        assert!(prog
            .text
            .contains("R_a(T,X,Y,d) :- R(T,X,Y), R(T2,X,Z), Y != Z, not R_a(T2,X,Z,d).\n"));
    }

    #[test]
    fn clashing_variable_names_are_renamed() {
        let p = parse_problem("P(a,b). Q(b). :- P(T,T2), Q(T2).").unwrap();
        let prog = emit_tuple_repair_program(&p.instance, &p.dcs, &EmitOptions::default()).unwrap();
        assert!(prog
            .text
            .contains("P_a(T,T_,T2_,d) :- P(T,T_,T2_), Q(T2,T2_), not Q_a(T2,T2_,d)."));
    }

    #[test]
    fn cau_cont_guard_only_for_same_predicate() {
        let p = parse_problem("P(a). Q(a). :- P(X), Q(X).").unwrap();
        let o = opts(Flavor::NonDisjunctive, &[Extension::Causes, Extension::CauCont]);
        let text = emit_tuple_repair_program(&p.instance, &p.dcs, &o).unwrap().text;
        assert!(text.contains("cauCont(T,TC) :- P_a(T,X,d), P_a(TC,U,d), T != TC."));
        assert!(text.contains("cauCont(T,TC) :- P_a(T,X,d), Q_a(TC,U,d)."));
        assert!(text.contains("cauCont(T,TC) :- Q_a(T,X,d), Q_a(TC,U,d), T != TC."));
        assert!(text.contains("cauCont(T,TC) :- Q_a(T,X,d), P_a(TC,U,d)."));
    }

    #[test]
    fn option_validation() {
        let p = parse_problem("P(a). Q(a). :- P(X), Q(X).").unwrap();
        let bad = opts(Flavor::NonDisjunctive, &[Extension::Causes, Extension::ContingencySets]);
        assert_eq!(
            emit_tuple_repair_program(&p.instance, &p.dcs, &bad).unwrap_err(),
            EmitError::Requires {
                extension: Extension::ContingencySets,
                needs: Extension::CauCont
            }
        );
        let mut low = opts(
            Flavor::NonDisjunctive,
            &[Extension::Causes, Extension::CauCont, Extension::PreRho],
        );
        low.maxint = 2;
        assert_eq!(
            emit_tuple_repair_program(&p.instance, &p.dcs, &low).unwrap_err(),
            EmitError::MaxintTooSmall { maxint: 2, needed: 3 }
        );
        low.maxint = 3;
        let ok = emit_tuple_repair_program(&p.instance, &p.dcs, &low).unwrap();
        assert_eq!(ok.dialect, super::super::Dialect::SetExtendedAsp);
        assert!(ok.text.contains("#maxint = 3."));
        let null = EmitOptions {
            semantics: Semantics::Null,
            ..opts(Flavor::NonDisjunctive, &[Extension::WeakConstraints])
        };
        assert_eq!(
            emit_null_repair_program(&p.instance, &p.dcs, &null).unwrap_err(),
            EmitError::UnsupportedForNull(Extension::WeakConstraints)
        );
    }

    #[test]
    fn inclusion_dependency_rules() {
        let p = parse_problem("Dep(computing,john). Course(com08,john). :- Course(Z,john). Dep(X,Y) -> Course(U,Y).")
            .unwrap();
        let text = emit_tuple_repair_program_with_ids(&p.instance, &p.dcs, &p.ids, &EmitOptions::default())
            .unwrap()
            .text;
        assert!(text.contains("Course_a(T,Z,john,d) :- Course(T,Z,john).\n"));
        assert!(text.contains("Dep_a(T,X,Y,d) :- Dep(T,X,Y), not aux(Y).\n"));
        assert!(text.contains("aux(Y) :- Course_a(T,U,Y,s).\n"));
        assert!(text.contains("Dep_a(T,X,Y,s) :- Dep(T,X,Y), not Dep_a(T,X,Y,d).\n"));
    }

    #[test]
    fn null_program_example12() {
        let p = parse_problem("P(1;1,2). R(2;2,1). :- P(X,Y), R(Y,Z).").unwrap();
        let text = emit_null_repair_program(&p.instance, &p.dcs, &EmitOptions::default())
            .unwrap()
            .text;
        assert!(text.starts_with("P(1,1,2).\nR(2,2,1).\n"));
        assert!(text.contains("P_a(T,X,null,u) :- P_a(T,X,Y,t), R_a(T2,Y,Z,t), Y != null, not R_a(T2,null,Z,u).\n"));
        assert!(text.contains("R_a(T,null,Z,u) :- R_a(T,Y,Z,t), P_a(T2,X,Y,t), Y != null, not P_a(T2,X,null,u).\n"));
        assert!(text.contains("P_a(T,X,Y,fu) :- P_a(T,X,Y,u), not auxP1(T,X,Y), not auxP2(T,X,Y).\n"));
        assert!(text.contains("auxP2(T,X,Y) :- P(T,X,Y), P_a(T,X,null,u), Y != null.\n"));
        assert!(text.contains("R_a(T,X,Y,s) :- R(T,X,Y), not auxR(T).\n"));
        assert!(!text.contains("cause"));
    }

    #[test]
    fn null_program_cause_rules_and_guards() {
        let p = parse_problem("P(1;1,2). R(2;2,1). :- P(X,Y), R(Y,Z), X < 3.").unwrap();
        let o = opts(Flavor::NonDisjunctive, &[Extension::Causes]);
        let text = emit_null_repair_program(&p.instance, &p.dcs, &o).unwrap().text;
        assert!(text.contains("cause(T,1,U) :- P_a(T,null,Y,s), P(T,U,V), U != null.\n"));
        assert!(text.contains("cause(T,2,V) :- R_a(T,X,null,s), R(T,U,V), V != null.\n"));
        assert!(text.contains(
            "P_a(T,null,Y,u) :- P_a(T,X,Y,t), R_a(T2,Y,Z,t), X < 3, X != null, not P_a(T,X,null,u), not R_a(T2,null,Z,u).\n"
        ));
    }

    #[test]
    fn null_program_rejects_unrepairable_constraint() {
        let p = parse_problem("P(a). :- P(X).").unwrap();
        assert_eq!(
            emit_null_repair_program(&p.instance, &p.dcs, &EmitOptions::default()).unwrap_err(),
            EmitError::NotNullRepairable(0)
        );
    }
}
