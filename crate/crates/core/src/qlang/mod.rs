//! The input language: facts, denial constraints, (unions of) conjunctive
//! queries with built-ins, and inclusion dependencies.

mod eval;
mod parse;

pub(crate) use eval::critical_slots;
pub use eval::{
    eval_bcq, eval_open, id_violations, negate_query_to_dc, satisfies_ids, violations, EvalError, ViolationWitness,
};
pub use parse::{parse_problem, ParseError, ParseErrorKind};

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::relmodel::{Constant, Instance};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(Constant),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BodyAtom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl BodyAtom {
    pub fn new(relation: impl Into<String>, terms: Vec<Term>) -> Self {
        BodyAtom {
            relation: relation.into(),
            terms,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(Term::as_var)
    }
}

impl fmt::Display for BodyAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        write_joined(f, &self.terms, ",")?;
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn is_order(self) -> bool {
        !matches!(self, CompareOp::Eq | CompareOp::Ne)
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BuiltinAtom {
    pub op: CompareOp,
    pub left: Term,
    pub right: Term,
}

impl fmt::Display for BuiltinAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjunctiveBody {
    pub atoms: Vec<BodyAtom>,
    pub builtins: Vec<BuiltinAtom>,
}

impl ConjunctiveBody {
    pub fn new(atoms: Vec<BodyAtom>, builtins: Vec<BuiltinAtom>) -> Self {
        ConjunctiveBody { atoms, builtins }
    }

    /// Variables of the atoms, in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.atoms.iter().flat_map(BodyAtom::variables) {
            if seen.insert(v) {
                out.push(v);
            }
        }
        out
    }

    /// Number of occurrences of `var` across atoms and built-ins.
    pub fn occurrences(&self, var: &str) -> usize {
        let in_atoms = self
            .atoms
            .iter()
            .flat_map(BodyAtom::variables)
            .filter(|v| *v == var)
            .count();
        let in_builtins = self
            .builtins
            .iter()
            .flat_map(|b| [&b.left, &b.right])
            .filter(|t| t.as_var() == Some(var))
            .count();
        in_atoms + in_builtins
    }

    fn substitute(&self, var: &str, value: &Constant) -> ConjunctiveBody {
        let sub = |t: &Term| match t {
            Term::Var(v) if v == var => Term::Const(value.clone()),
            other => other.clone(),
        };
        ConjunctiveBody {
            atoms: self
                .atoms
                .iter()
                .map(|a| BodyAtom::new(a.relation.clone(), a.terms.iter().map(sub).collect()))
                .collect(),
            builtins: self
                .builtins
                .iter()
                .map(|b| BuiltinAtom {
                    op: b.op,
                    left: sub(&b.left),
                    right: sub(&b.right),
                })
                .collect(),
        }
    }
}

impl fmt::Display for ConjunctiveBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.atoms, ", ")?;
        for b in &self.builtins {
            write!(f, ", {b}")?;
        }
        Ok(())
    }
}

/// `← P1(x̄1), …, Pm(x̄m), builtins`: no instance may satisfy the body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DenialConstraint {
    pub body: ConjunctiveBody,
}

impl DenialConstraint {
    pub fn new(body: ConjunctiveBody) -> Self {
        DenialConstraint { body }
    }
}

impl fmt::Display for DenialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":- {}.", self.body)
    }
}

/// A named UCQ. An empty head makes it Boolean.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuerySpec {
    pub name: String,
    pub head: Vec<String>,
    pub disjuncts: Vec<ConjunctiveBody>,
}

impl QuerySpec {
    pub fn boolean(name: impl Into<String>, disjuncts: Vec<ConjunctiveBody>) -> Self {
        QuerySpec {
            name: name.into(),
            head: Vec::new(),
            disjuncts,
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.head.is_empty()
    }

    /// `Q[ā]`: substitute the answer for the head variables, giving a BCQ.
    pub fn ground(&self, answer: &[Constant]) -> Result<QuerySpec, EvalError> {
        if answer.len() != self.head.len() {
            return Err(EvalError::AnswerArity {
                query: self.name.clone(),
                expected: self.head.len(),
                found: answer.len(),
            });
        }
        let disjuncts = self
            .disjuncts
            .iter()
            .map(|d| {
                self.head
                    .iter()
                    .zip(answer)
                    .fold(d.clone(), |body, (v, c)| body.substitute(v, c))
            })
            .collect();
        Ok(QuerySpec {
            name: self.name.clone(),
            head: Vec::new(),
            disjuncts,
        })
    }
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            f.write_str(&self.name)?;
            if !self.head.is_empty() {
                f.write_str("(")?;
                write_joined(f, &self.head, ",")?;
                f.write_str(")")?;
            }
            write!(f, " :- {d}?")?;
        }
        Ok(())
    }
}

/// `∀x̄ (P(x̄) → ∃ȳ C(x̄', ȳ))`. Variables occurring in both atoms are shared;
/// conclusion-only variables are existential.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InclusionDependency {
    pub premise: BodyAtom,
    pub conclusion: BodyAtom,
}

impl InclusionDependency {
    pub fn new(premise: BodyAtom, conclusion: BodyAtom) -> Self {
        InclusionDependency { premise, conclusion }
    }

    /// Shared variables as (variable, premise positions, conclusion positions),
    /// positions 1-based.
    pub fn shared_variables(&self) -> Vec<(String, Vec<usize>, Vec<usize>)> {
        let mut out: Vec<(String, Vec<usize>, Vec<usize>)> = Vec::new();
        for (i, t) in self.premise.terms.iter().enumerate() {
            let Some(v) = t.as_var() else { continue };
            let in_conclusion: Vec<usize> = positions_of(&self.conclusion, v);
            if in_conclusion.is_empty() {
                continue;
            }
            match out.iter_mut().find(|(name, _, _)| name == v) {
                Some(entry) => entry.1.push(i + 1),
                None => out.push((v.into(), alloc::vec![i + 1], in_conclusion)),
            }
        }
        out
    }
}

fn positions_of(atom: &BodyAtom, var: &str) -> Vec<usize> {
    atom.terms
        .iter()
        .enumerate()
        .filter(|(_, t)| t.as_var() == Some(var))
        .map(|(i, _)| i + 1)
        .collect()
}

impl fmt::Display for InclusionDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}.", self.premise, self.conclusion)
    }
}

/// Everything a problem file declares.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub instance: Instance,
    pub dcs: Vec<DenialConstraint>,
    pub queries: Vec<QuerySpec>,
    pub ids: Vec<InclusionDependency>,
}

impl Problem {
    pub fn query(&self, name: &str) -> Option<&QuerySpec> {
        self.queries.iter().find(|q| q.name == name)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.instance.iter() {
            writeln!(f, "{t}.")?;
        }
        for dc in &self.dcs {
            writeln!(f, "{dc}")?;
        }
        for q in &self.queries {
            writeln!(f, "{q}")?;
        }
        for id in &self.ids {
            writeln!(f, "{id}")?;
        }
        Ok(())
    }
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
