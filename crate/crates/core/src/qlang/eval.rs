//! Evaluation under the null semantics: a join or comparison through null is
//! never satisfied, while a variable occurring once may bind null.
//!
//! Bodies are first normalized so that every atom position carries its own
//! slot; repeated variables and constants turn into explicit equalities
//! between slots. Only those equalities and the user's built-ins can ever
//! reject a null, which is what makes a position "critical".

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::{BodyAtom, CompareOp, ConjunctiveBody, DenialConstraint, InclusionDependency, QuerySpec, Term};
use crate::relmodel::{Constant, Instance, PositionRef, Tid, Tuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    OpenQuery(String),
    AnswerArity {
        query: String,
        expected: usize,
        found: usize,
    },
    CrossTypeComparison {
        op: CompareOp,
        left: Constant,
        right: Constant,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::OpenQuery(q) => write!(f, "query {q} has free variables; supply an answer"),
            EvalError::AnswerArity { query, expected, found } => write!(
                f,
                "query {query} has {expected} head variables, got {found} answer values"
            ),
            EvalError::CrossTypeComparison { op, left, right } => {
                write!(f, "cannot compare {left} {op} {right}: different constant types")
            }
        }
    }
}

impl core::error::Error for EvalError {}

/// A satisfying assignment of a DC body: one violation of the constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationWitness {
    pub dc_index: usize,
    /// The hyperedge: tids of all tuples used by the assignment.
    pub tids: BTreeSet<Tid>,
    /// Tid matched by each body atom, in body order.
    pub atom_tids: Vec<Tid>,
    /// Each variable's value together with every position it is read from.
    pub binding: BTreeMap<String, (Constant, BTreeSet<PositionRef>)>,
    /// Positions matched against a constant of the body.
    pub constant_positions: BTreeSet<PositionRef>,
    critical: BTreeSet<PositionRef>,
}

impl ViolationWitness {
    /// Positions whose nulling destroys this witness: those read by a
    /// variable occurring at least twice (atoms and built-ins counted) and
    /// those matched against a constant.
    pub fn critical_positions(&self) -> &BTreeSet<PositionRef> {
        &self.critical
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Slot {
    atom: usize,
    position: usize,
}

#[derive(Clone, Debug)]
enum Operand {
    Slot(Slot),
    Const(Constant),
}

#[derive(Clone, Debug)]
struct Check {
    op: CompareOp,
    left: Operand,
    right: Operand,
    /// Checked once the atom with this index is matched.
    ready_at: usize,
}

struct Normalized<'b> {
    body: &'b ConjunctiveBody,
    checks: Vec<Check>,
    first_slot: BTreeMap<&'b str, Slot>,
    critical_slots: BTreeSet<(usize, usize)>,
    constant_slots: BTreeSet<(usize, usize)>,
}

fn normalize(body: &ConjunctiveBody) -> Normalized<'_> {
    let mut first_slot: BTreeMap<&str, Slot> = BTreeMap::new();
    let mut checks = Vec::new();
    let mut constant_slots = BTreeSet::new();
    for (a, atom) in body.atoms.iter().enumerate() {
        for (i, term) in atom.terms.iter().enumerate() {
            let here = Slot {
                atom: a,
                position: i + 1,
            };
            match term {
                Term::Var(v) => match first_slot.get(v.as_str()) {
                    Some(&prev) => checks.push(Check {
                        op: CompareOp::Eq,
                        left: Operand::Slot(prev),
                        right: Operand::Slot(here),
                        ready_at: a,
                    }),
                    None => {
                        first_slot.insert(v, here);
                    }
                },
                Term::Const(c) => {
                    constant_slots.insert((a, i + 1));
                    checks.push(Check {
                        op: CompareOp::Eq,
                        left: Operand::Slot(here),
                        right: Operand::Const(c.clone()),
                        ready_at: a,
                    });
                }
            }
        }
    }
    let operand = |t: &Term| match t {
        Term::Var(v) => Operand::Slot(first_slot[v.as_str()]),
        Term::Const(c) => Operand::Const(c.clone()),
    };
    for b in &body.builtins {
        let (left, right) = (operand(&b.left), operand(&b.right));
        let ready_at = [&left, &right]
            .iter()
            .filter_map(|o| match o {
                Operand::Slot(s) => Some(s.atom),
                Operand::Const(_) => None,
            })
            .max()
            .unwrap_or(0);
        checks.push(Check {
            op: b.op,
            left,
            right,
            ready_at,
        });
    }
    let mut critical_slots = BTreeSet::new();
    for c in &checks {
        for o in [&c.left, &c.right] {
            if let Operand::Slot(s) = o {
                critical_slots.insert((s.atom, s.position));
            }
        }
    }
    Normalized {
        body,
        checks,
        first_slot,
        critical_slots,
        constant_slots,
    }
}

/// Positions `(atom index, 1-based position)` of `body` that take part in a
/// join, constant or built-in check.
pub(crate) fn critical_slots(body: &ConjunctiveBody) -> BTreeSet<(usize, usize)> {
    normalize(body).critical_slots
}

/// `θ` under the null semantics.
fn compare(op: CompareOp, l: &Constant, r: &Constant) -> Result<bool, EvalError> {
    let ord = match (l, r) {
        (Constant::Null, _) | (_, Constant::Null) => return Ok(false),
        (Constant::Symbol(a), Constant::Symbol(b)) => a.cmp(b),
        (Constant::Integer(a), Constant::Integer(b)) => a.cmp(b),
        _ => {
            return match op {
                CompareOp::Eq => Ok(false),
                CompareOp::Ne => Ok(true),
                _ => Err(EvalError::CrossTypeComparison {
                    op,
                    left: l.clone(),
                    right: r.clone(),
                }),
            }
        }
    };
    Ok(match op {
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
    })
}

struct Matcher<'a, 'b> {
    norm: &'a Normalized<'b>,
    candidates: Vec<Vec<&'a Tuple>>,
}

impl<'a, 'b> Matcher<'a, 'b> {
    fn new(norm: &'a Normalized<'b>, instance: &'a Instance) -> Self {
        let candidates = norm
            .body
            .atoms
            .iter()
            .map(|atom| {
                instance
                    .relation(&atom.relation)
                    .filter(|t| t.values.len() == atom.terms.len())
                    .collect()
            })
            .collect();
        Matcher { norm, candidates }
    }

    fn value<'t>(chosen: &[&'t Tuple], o: &'t Operand) -> &'t Constant {
        match o {
            Operand::Slot(s) => &chosen[s.atom].values[s.position - 1],
            Operand::Const(c) => c,
        }
    }

    /// Calls `visit` with every satisfying assignment (tuples per atom) in
    /// lexicographic tid order. `visit` returns `false` to stop early.
    fn run(&self, visit: &mut dyn FnMut(&[&'a Tuple]) -> bool) -> Result<(), EvalError> {
        for c in self
            .norm
            .checks
            .iter()
            .filter(|c| matches!((&c.left, &c.right), (Operand::Const(_), Operand::Const(_))))
        {
            let (l, r) = (Self::value(&[], &c.left), Self::value(&[], &c.right));
            if !compare(c.op, l, r)? {
                return Ok(());
            }
        }
        let mut chosen = Vec::with_capacity(self.candidates.len());
        self.step(&mut chosen, visit).map(|_| ())
    }

    fn step(
        &self,
        chosen: &mut Vec<&'a Tuple>,
        visit: &mut dyn FnMut(&[&'a Tuple]) -> bool,
    ) -> Result<bool, EvalError> {
        let level = chosen.len();
        if level == self.candidates.len() {
            return Ok(visit(chosen));
        }
        'tuples: for &t in &self.candidates[level] {
            chosen.push(t);
            for c in self.norm.checks.iter().filter(|c| c.ready_at == level) {
                let both_const = matches!((&c.left, &c.right), (Operand::Const(_), Operand::Const(_)));
                if both_const {
                    continue;
                }
                let (l, r) = (Self::value(chosen, &c.left), Self::value(chosen, &c.right));
                if !compare(c.op, l, r)? {
                    chosen.pop();
                    continue 'tuples;
                }
            }
            let go_on = self.step(chosen, visit)?;
            chosen.pop();
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn body_satisfied(instance: &Instance, body: &ConjunctiveBody) -> Result<bool, EvalError> {
    let norm = normalize(body);
    let mut found = false;
    Matcher::new(&norm, instance).run(&mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// `D ⊨ Q` for a Boolean UCQ.
pub fn eval_bcq(instance: &Instance, query: &QuerySpec) -> Result<bool, EvalError> {
    if !query.is_boolean() {
        return Err(EvalError::OpenQuery(query.name.clone()));
    }
    for d in &query.disjuncts {
        if body_satisfied(instance, d)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `Q(D)`: all answers of an open UCQ (a Boolean query yields `{()}` or `{}`).
pub fn eval_open(instance: &Instance, query: &QuerySpec) -> Result<BTreeSet<Vec<Constant>>, EvalError> {
    let mut answers = BTreeSet::new();
    for d in &query.disjuncts {
        let norm = normalize(d);
        let slots: Vec<Slot> = query.head.iter().map(|v| norm.first_slot[v.as_str()]).collect();
        Matcher::new(&norm, instance).run(&mut |chosen| {
            answers.insert(
                slots
                    .iter()
                    .map(|s| chosen[s.atom].values[s.position - 1].clone())
                    .collect(),
            );
            true
        })?;
    }
    Ok(answers)
}

/// `κ(Q)`: one denial constraint per disjunct of a Boolean UCQ.
pub fn negate_query_to_dc(query: &QuerySpec) -> Result<Vec<DenialConstraint>, EvalError> {
    if !query.is_boolean() {
        return Err(EvalError::OpenQuery(query.name.clone()));
    }
    Ok(query.disjuncts.iter().cloned().map(DenialConstraint::new).collect())
}

/// All violations of `dcs` in `instance`, ordered by constraint and then by
/// the tids matched per atom.
pub fn violations(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<ViolationWitness>, EvalError> {
    let mut out = Vec::new();
    for (dc_index, dc) in dcs.iter().enumerate() {
        let norm = normalize(&dc.body);
        Matcher::new(&norm, instance).run(&mut |chosen| {
            out.push(witness(dc_index, &norm, chosen));
            true
        })?;
    }
    Ok(out)
}

fn witness(dc_index: usize, norm: &Normalized<'_>, chosen: &[&Tuple]) -> ViolationWitness {
    let pos = |a: usize, p: usize| chosen[a].position(p);
    let mut binding: BTreeMap<String, (Constant, BTreeSet<PositionRef>)> = BTreeMap::new();
    for (a, atom) in norm.body.atoms.iter().enumerate() {
        for (i, term) in atom.terms.iter().enumerate() {
            if let Term::Var(v) = term {
                let entry = binding
                    .entry(v.to_string())
                    .or_insert_with(|| (chosen[a].values[i].clone(), BTreeSet::new()));
                entry.1.insert(pos(a, i + 1));
            }
        }
    }
    ViolationWitness {
        dc_index,
        tids: chosen.iter().map(|t| t.tid).collect(),
        atom_tids: chosen.iter().map(|t| t.tid).collect(),
        binding,
        constant_positions: norm.constant_slots.iter().map(|&(a, p)| pos(a, p)).collect(),
        critical: norm.critical_slots.iter().map(|&(a, p)| pos(a, p)).collect(),
    }
}

/// Premise tuples of `id` with no witnessing conclusion tuple. A premise whose
/// shared variable holds null is considered satisfied.
pub fn id_violations(instance: &Instance, id: &InclusionDependency) -> Result<Vec<Tid>, EvalError> {
    let premise_body = ConjunctiveBody::new(alloc::vec![id.premise.clone()], Vec::new());
    let norm = normalize(&premise_body);
    let shared = id.shared_variables();
    let mut unwitnessed = Vec::new();
    let mut failure = None;
    Matcher::new(&norm, instance).run(&mut |chosen| {
        let tuple = chosen[0];
        let mut bindings = Vec::with_capacity(shared.len());
        for (_, premise_positions, _) in &shared {
            let v = &tuple.values[premise_positions[0] - 1];
            if v.is_null() {
                return true;
            }
            bindings.push(v.clone());
        }
        let conclusion = ground_conclusion(&id.conclusion, &shared, &bindings);
        match body_satisfied(instance, &ConjunctiveBody::new(alloc::vec![conclusion], Vec::new())) {
            Ok(true) => {}
            Ok(false) => unwitnessed.push(tuple.tid),
            Err(e) => {
                failure = Some(e);
                return false;
            }
        }
        true
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(unwitnessed),
    }
}

fn ground_conclusion(atom: &BodyAtom, shared: &[(String, Vec<usize>, Vec<usize>)], values: &[Constant]) -> BodyAtom {
    let terms = atom
        .terms
        .iter()
        .map(|t| match t {
            Term::Var(v) => shared
                .iter()
                .position(|(name, _, _)| name == v)
                .map(|i| Term::Const(values[i].clone()))
                .unwrap_or_else(|| t.clone()),
            other => other.clone(),
        })
        .collect();
    BodyAtom::new(atom.relation.clone(), terms)
}

/// `D ⊨ Ψ` for a set of inclusion dependencies.
pub fn satisfies_ids(instance: &Instance, ids: &[InclusionDependency]) -> Result<bool, EvalError> {
    for id in ids {
        if !id_violations(instance, id)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}
