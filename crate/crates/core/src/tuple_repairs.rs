//! Tuple-deletion repairs: S-repairs, C-repairs and repair differences.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::hitting::{minimal_hitting_sets, minimize};
use crate::qlang::{id_violations, satisfies_ids, violations, DenialConstraint, InclusionDependency};
use crate::relmodel::{Instance, Tid};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Minimality {
    Subset,
    Cardinality,
}

/// Vertices are tuples, edges the tid sets of DC violations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictHypergraph {
    pub vertices: BTreeSet<Tid>,
    pub edges: Vec<BTreeSet<Tid>>,
}

impl ConflictHypergraph {
    pub fn build(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Self, Error> {
        let mut edges: Vec<BTreeSet<Tid>> = Vec::new();
        for w in violations(instance, dcs)? {
            if !edges.contains(&w.tids) {
                edges.push(w.tids);
            }
        }
        Ok(ConflictHypergraph {
            vertices: instance.tids().collect(),
            edges,
        })
    }

    /// Edges restricted to endogenous tuples.
    pub fn endogenous_edges(&self, instance: &Instance) -> Vec<BTreeSet<Tid>> {
        self.edges
            .iter()
            .map(|e| {
                e.iter()
                    .copied()
                    .filter(|t| instance.get(*t).is_some_and(|tuple| tuple.endogenous))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairRecord {
    pub repair: Instance,
    pub removed: BTreeSet<Tid>,
    pub kind: Minimality,
}

fn records(instance: &Instance, removed: Vec<BTreeSet<Tid>>, kind: Minimality) -> Vec<RepairRecord> {
    removed
        .into_iter()
        .map(|r| RepairRecord {
            repair: instance.without(&r),
            removed: r,
            kind,
        })
        .collect()
}

fn keep_minimum_size(mut sets: Vec<BTreeSet<Tid>>) -> Vec<BTreeSet<Tid>> {
    if let Some(min) = sets.iter().map(BTreeSet::len).min() {
        sets.retain(|s| s.len() == min);
    }
    sets
}

/// The removed-sets of all S-repairs: minimal hitting sets of the conflict
/// hypergraph. With `endogenous_only`, only endogenous tuples may be removed.
pub fn s_repair_differences(
    instance: &Instance,
    dcs: &[DenialConstraint],
    endogenous_only: bool,
) -> Result<Vec<BTreeSet<Tid>>, Error> {
    let graph = ConflictHypergraph::build(instance, dcs)?;
    let edges = if endogenous_only {
        graph.endogenous_edges(instance)
    } else {
        graph.edges
    };
    Ok(minimal_hitting_sets(&edges))
}

/// `Srep(D, Σ)`: all ⊆-maximal consistent subinstances.
pub fn s_repairs(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<RepairRecord>, Error> {
    s_repairs_with(instance, dcs, false)
}

pub fn s_repairs_with(
    instance: &Instance,
    dcs: &[DenialConstraint],
    endogenous_only: bool,
) -> Result<Vec<RepairRecord>, Error> {
    let removed = s_repair_differences(instance, dcs, endogenous_only)?;
    Ok(records(instance, removed, Minimality::Subset))
}

/// `Crep(D, Σ)`: the S-repairs removing the fewest tuples.
pub fn c_repairs(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<RepairRecord>, Error> {
    c_repairs_with(instance, dcs, false)
}

pub fn c_repairs_with(
    instance: &Instance,
    dcs: &[DenialConstraint],
    endogenous_only: bool,
) -> Result<Vec<RepairRecord>, Error> {
    let removed = keep_minimum_size(s_repair_differences(instance, dcs, endogenous_only)?);
    Ok(records(instance, removed, Minimality::Cardinality))
}

/// `Diff^s(D, Σ, τ)` or `Diff^c(D, Σ, τ)`: repair differences containing `tid`.
pub fn diff_sets(
    instance: &Instance,
    dcs: &[DenialConstraint],
    tid: Tid,
    mode: Minimality,
) -> Result<Vec<BTreeSet<Tid>>, Error> {
    let mut all = s_repair_differences(instance, dcs, false)?;
    if mode == Minimality::Cardinality {
        all = keep_minimum_size(all);
    }
    all.retain(|d| d.contains(&tid));
    Ok(all)
}

/// ⊆-maximal subinstances satisfying both the DCs and the inclusion
/// dependencies, where dependency violations are repaired by deleting the
/// premise tuple.
pub fn s_repairs_under_hard_ics(
    instance: &Instance,
    dcs: &[DenialConstraint],
    ids: &[InclusionDependency],
) -> Result<Vec<RepairRecord>, Error> {
    if !satisfies_ids(instance, ids)? {
        return Err(Error::IdsViolated);
    }
    let mut closed = Vec::new();
    for h in s_repair_differences(instance, dcs, false)? {
        closed.push(cascade(instance, h, ids)?);
    }
    Ok(records(instance, minimize(&closed), Minimality::Subset))
}

/// Least superset of `removed` whose complement satisfies `ids`, deleting
/// unwitnessed premise tuples until nothing changes.
fn cascade(
    instance: &Instance,
    mut removed: BTreeSet<Tid>,
    ids: &[InclusionDependency],
) -> Result<BTreeSet<Tid>, Error> {
    loop {
        let current = instance.without(&removed);
        let mut grew = false;
        for id in ids {
            for t in id_violations(&current, id)? {
                grew |= removed.insert(t);
            }
        }
        if !grew {
            return Ok(removed);
        }
    }
}
