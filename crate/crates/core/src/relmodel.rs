//! Value-semantics relational model: constants with a distinguished null,
//! tid-keyed tuples, instances, deletions and attribute updates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A database constant. `Null` behaves like SQL `NULL`: it never satisfies a
/// join or a built-in comparison.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Symbol(String),
    Integer(i64),
    Null,
}

impl Constant {
    pub fn symbol(s: impl Into<String>) -> Self {
        Constant::Symbol(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Constant::Null)
    }
}

impl From<&str> for Constant {
    fn from(s: &str) -> Self {
        if s == "null" {
            Constant::Null
        } else {
            Constant::Symbol(s.into())
        }
    }
}

impl From<i64> for Constant {
    fn from(i: i64) -> Self {
        Constant::Integer(i)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Symbol(s) => f.write_str(s),
            Constant::Integer(i) => write!(f, "{i}"),
            Constant::Null => f.write_str("null"),
        }
    }
}

/// Global tuple identifier. Occupies the 0-th position of every tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tid(pub u64);

impl fmt::Display for Tid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for Tid {
    fn from(v: u64) -> Self {
        Tid(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub relation: String,
    pub tid: Tid,
    pub values: Vec<Constant>,
    pub endogenous: bool,
}

impl Tuple {
    pub fn position(&self, position: usize) -> PositionRef {
        PositionRef::new(self.relation.clone(), self.tid, position)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({};", self.relation, self.tid)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// The positioned value `R[i;j]`: position `j >= 1` of the `R`-tuple with tid `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionRef {
    pub relation: String,
    pub tid: Tid,
    pub position: usize,
}

impl PositionRef {
    pub fn new(relation: impl Into<String>, tid: impl Into<Tid>, position: usize) -> Self {
        PositionRef {
            relation: relation.into(),
            tid: tid.into(),
            position,
        }
    }
}

impl fmt::Display for PositionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{};{}]", self.relation, self.tid, self.position)
    }
}

/// An attribute-null-based update: the set of positions to overwrite with null.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateSet {
    pub changes: BTreeSet<PositionRef>,
}

impl UpdateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }
}

impl FromIterator<PositionRef> for UpdateSet {
    fn from_iter<I: IntoIterator<Item = PositionRef>>(iter: I) -> Self {
        UpdateSet {
            changes: iter.into_iter().collect(),
        }
    }
}

impl From<BTreeSet<PositionRef>> for UpdateSet {
    fn from(changes: BTreeSet<PositionRef>) -> Self {
        UpdateSet { changes }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    DuplicateTid(Tid),
    ZeroTid,
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    UnknownTid(Tid),
    RelationMismatch {
        position: PositionRef,
        actual: String,
    },
    PositionOutOfRange(PositionRef),
    TidMismatch(Tid),
    NonNullChange(PositionRef),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DuplicateTid(t) => write!(f, "duplicate tuple identifier {t}"),
            ModelError::ZeroTid => f.write_str("tuple identifiers must be positive"),
            ModelError::ArityMismatch {
                relation,
                expected,
                found,
            } => write!(f, "relation {relation} has arity {expected}, got {found} values"),
            ModelError::UnknownTid(t) => write!(f, "unknown tuple identifier {t}"),
            ModelError::RelationMismatch { position, actual } => write!(
                f,
                "{position} refers to tid {} which belongs to relation {actual}",
                position.tid
            ),
            ModelError::PositionOutOfRange(p) => write!(f, "position out of range: {p}"),
            ModelError::TidMismatch(t) => {
                write!(f, "instances disagree on tuple identifier {t}")
            }
            ModelError::NonNullChange(p) => {
                write!(f, "{p} changed to a value other than null")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// A finite set of tid-keyed ground tuples together with the arities of its
/// relations. Instances are immutable values: every operation that changes
/// the content returns a new instance.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    schema: BTreeMap<String, usize>,
    tuples: BTreeMap<Tid, Tuple>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.tuples.len() == other.tuples.len()
            && self
                .tuples
                .iter()
                .zip(other.tuples.iter())
                .all(|(a, b)| a.0 == b.0 && a.1.relation == b.1.relation && a.1.values == b.1.values)
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schema(&self) -> &BTreeMap<String, usize> {
        &self.schema
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.schema.get(relation).copied()
    }

    /// Declares `relation` with `arity`, or checks the arity if already declared.
    pub fn declare(&mut self, relation: &str, arity: usize) -> Result<(), ModelError> {
        match self.schema.get(relation) {
            Some(&a) if a != arity => Err(ModelError::ArityMismatch {
                relation: relation.into(),
                expected: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.schema.insert(relation.into(), arity);
                Ok(())
            }
        }
    }

    /// Inserts an endogenous tuple. Without an explicit tid the smallest unused
    /// positive integer is assigned.
    pub fn add_fact(&mut self, relation: &str, tid: Option<Tid>, values: Vec<Constant>) -> Result<Tid, ModelError> {
        self.add_tuple(relation, tid, values, true)
    }

    pub fn add_tuple(
        &mut self,
        relation: &str,
        tid: Option<Tid>,
        values: Vec<Constant>,
        endogenous: bool,
    ) -> Result<Tid, ModelError> {
        let tid = match tid {
            Some(Tid(0)) => return Err(ModelError::ZeroTid),
            Some(t) if self.tuples.contains_key(&t) => return Err(ModelError::DuplicateTid(t)),
            Some(t) => t,
            None => self.next_free_tid(),
        };
        self.declare(relation, values.len())?;
        self.tuples.insert(
            tid,
            Tuple {
                relation: relation.into(),
                tid,
                values,
                endogenous,
            },
        );
        Ok(tid)
    }

    fn next_free_tid(&self) -> Tid {
        let mut candidate = 1;
        for &Tid(t) in self.tuples.keys() {
            if t != candidate {
                break;
            }
            candidate += 1;
        }
        Tid(candidate)
    }

    pub fn set_endogenous(&mut self, tid: Tid, endogenous: bool) -> Result<(), ModelError> {
        let t = self.tuples.get_mut(&tid).ok_or(ModelError::UnknownTid(tid))?;
        t.endogenous = endogenous;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn get(&self, tid: Tid) -> Option<&Tuple> {
        self.tuples.get(&tid)
    }

    pub fn contains(&self, tid: Tid) -> bool {
        self.tuples.contains_key(&tid)
    }

    /// Tuples in tid order.
    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.values()
    }

    pub fn tids(&self) -> impl Iterator<Item = Tid> + '_ {
        self.tuples.keys().copied()
    }

    pub fn endogenous_tids(&self) -> impl Iterator<Item = Tid> + '_ {
        self.tuples.values().filter(|t| t.endogenous).map(|t| t.tid)
    }

    pub fn relation<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = &'a Tuple> + 'a {
        self.tuples.values().filter(move |t| t.relation == relation)
    }

    /// Tuples in the canonical output order `(relation, tid)`.
    pub fn canonical(&self) -> Vec<&Tuple> {
        let mut out: Vec<&Tuple> = self.tuples.values().collect();
        out.sort_by(|a, b| (&a.relation, a.tid).cmp(&(&b.relation, b.tid)));
        out
    }

    pub fn value_at(&self, position: &PositionRef) -> Result<&Constant, ModelError> {
        let tuple = self
            .tuples
            .get(&position.tid)
            .ok_or(ModelError::UnknownTid(position.tid))?;
        if tuple.relation != position.relation {
            return Err(ModelError::RelationMismatch {
                position: position.clone(),
                actual: tuple.relation.clone(),
            });
        }
        if position.position == 0 || position.position > tuple.values.len() {
            return Err(ModelError::PositionOutOfRange(position.clone()));
        }
        Ok(&tuple.values[position.position - 1])
    }

    /// Every position holding a non-null value, in canonical order.
    pub fn non_null_positions(&self) -> Vec<PositionRef> {
        let mut out: Vec<PositionRef> = self
            .iter()
            .flat_map(|t| {
                t.values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_null())
                    .map(move |(i, _)| t.position(i + 1))
            })
            .collect();
        out.sort();
        out
    }

    /// `D \ Γ`.
    pub fn delete_tuples(&self, tids: &BTreeSet<Tid>) -> Result<Instance, ModelError> {
        if let Some(&t) = tids.iter().find(|t| !self.tuples.contains_key(t)) {
            return Err(ModelError::UnknownTid(t));
        }
        Ok(self.without(tids))
    }

    /// `D \ Γ` for tids known to be present; unknown tids are ignored.
    pub(crate) fn without(&self, tids: &BTreeSet<Tid>) -> Instance {
        Instance {
            schema: self.schema.clone(),
            tuples: self
                .tuples
                .iter()
                .filter(|(t, _)| !tids.contains(t))
                .map(|(t, tuple)| (*t, tuple.clone()))
                .collect(),
        }
    }

    /// `U ∘ D`: overwrite every referenced position with null. Tids are preserved.
    pub fn apply_update(&self, update: &UpdateSet) -> Result<Instance, ModelError> {
        for p in &update.changes {
            self.value_at(p)?;
        }
        let mut out = self.clone();
        for p in &update.changes {
            if let Some(t) = out.tuples.get_mut(&p.tid) {
                t.values[p.position - 1] = Constant::Null;
            }
        }
        Ok(out)
    }

    /// `apply_update` without the validity checks, for positions known to
    /// come from `self`.
    pub(crate) fn nulled<'a>(&self, changes: impl IntoIterator<Item = &'a PositionRef>) -> Instance {
        let mut out = self.clone();
        for p in changes {
            if let Some(t) = out.tuples.get_mut(&p.tid) {
                t.values[p.position - 1] = Constant::Null;
            }
        }
        out
    }
}

/// `Δ^null(D, D')`: the positions that hold a non-null value in `D` and null in `D'`.
pub fn delta_null(original: &Instance, updated: &Instance) -> Result<BTreeSet<PositionRef>, ModelError> {
    if original.tuples.len() != updated.tuples.len() {
        let missing = original
            .tids()
            .find(|t| !updated.contains(*t))
            .or_else(|| updated.tids().find(|t| !original.contains(*t)));
        return Err(ModelError::TidMismatch(missing.unwrap_or(Tid(0))));
    }
    let mut delta = BTreeSet::new();
    for (tid, before) in &original.tuples {
        let after = updated.tuples.get(tid).ok_or(ModelError::TidMismatch(*tid))?;
        if after.relation != before.relation || after.values.len() != before.values.len() {
            return Err(ModelError::TidMismatch(*tid));
        }
        for (j, (b, a)) in before.values.iter().zip(&after.values).enumerate() {
            if b == a {
                continue;
            }
            let p = before.position(j + 1);
            if !a.is_null() {
                return Err(ModelError::NonNullChange(p));
            }
            delta.insert(p);
        }
    }
    Ok(delta)
}
