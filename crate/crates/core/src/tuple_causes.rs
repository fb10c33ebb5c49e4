//! Actual causes, contingency sets and responsibilities for Boolean UCQs
//! under tuple deletions.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::hitting::{minimize, sort_sets};
use crate::qlang::{eval_bcq, negate_query_to_dc, satisfies_ids, EvalError, InclusionDependency, QuerySpec};
use crate::relmodel::{Instance, Tid};
use crate::tuple_repairs::s_repair_differences;
use crate::{Error, Rational};

/// Largest number of endogenous tuples the exhaustive searches accept.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleCauseReport {
    pub tid: Tid,
    pub counterfactual: bool,
    /// ⊆-minimal contingency sets, sorted by size then lexicographically.
    pub contingency_sets: Vec<BTreeSet<Tid>>,
    pub responsibility: Rational,
}

/// Caps on the reported contingency sets. They never change responsibilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CauseOptions {
    pub max_contingency_sets: Option<usize>,
    pub max_contingency_size: Option<usize>,
}

impl CauseOptions {
    fn apply(&self, sets: &mut Vec<BTreeSet<Tid>>) {
        sort_sets(sets);
        if let Some(size) = self.max_contingency_size {
            sets.retain(|s| s.len() <= size);
        }
        if let Some(n) = self.max_contingency_sets {
            sets.truncate(n);
        }
    }
}

fn report(tid: Tid, mut sets: Vec<BTreeSet<Tid>>, options: &CauseOptions) -> TupleCauseReport {
    let min = sets.iter().map(BTreeSet::len).min().unwrap_or(0);
    options.apply(&mut sets);
    TupleCauseReport {
        tid,
        counterfactual: min == 0,
        contingency_sets: sets,
        responsibility: Rational::new(1, min as u64 + 1),
    }
}

fn sort_reports(reports: &mut [TupleCauseReport]) {
    reports.sort_by(|a, b| b.responsibility.cmp(&a.responsibility).then(a.tid.cmp(&b.tid)));
}

fn require_boolean(query: &QuerySpec) -> Result<(), Error> {
    if query.is_boolean() {
        Ok(())
    } else {
        Err(EvalError::OpenQuery(query.name.clone()).into())
    }
}

/// Causes for `D ⊨ Q`, read off the S-repairs w.r.t. `κ(Q)`: `τ` is a cause
/// iff some repair difference `s` contains it, `s ∖ {τ}` is a minimal
/// contingency set, and `ρ(τ) = 1/|s|` for the smallest such `s`.
pub fn actual_causes(instance: &Instance, query: &QuerySpec) -> Result<Vec<TupleCauseReport>, Error> {
    actual_causes_with(instance, query, &CauseOptions::default())
}

pub fn actual_causes_with(
    instance: &Instance,
    query: &QuerySpec,
    options: &CauseOptions,
) -> Result<Vec<TupleCauseReport>, Error> {
    require_boolean(query)?;
    if !eval_bcq(instance, query)? {
        return Ok(Vec::new());
    }
    let diffs = s_repair_differences(instance, &negate_query_to_dc(query)?, true)?;
    let causes: BTreeSet<Tid> = diffs.iter().flatten().copied().collect();
    let mut reports: Vec<TupleCauseReport> = causes
        .into_iter()
        .map(|tid| {
            let sets = diffs
                .iter()
                .filter(|d| d.contains(&tid))
                .map(|d| d.iter().copied().filter(|t| *t != tid).collect())
                .collect();
            report(tid, sets, options)
        })
        .collect();
    sort_reports(&mut reports);
    Ok(reports)
}

/// Causes with maximum responsibility: those removed by some C-repair.
pub fn most_responsible_causes(instance: &Instance, query: &QuerySpec) -> Result<Vec<Tid>, Error> {
    require_boolean(query)?;
    if !eval_bcq(instance, query)? {
        return Ok(Vec::new());
    }
    let diffs = s_repair_differences(instance, &negate_query_to_dc(query)?, true)?;
    let Some(min) = diffs.iter().map(BTreeSet::len).min() else {
        return Ok(Vec::new());
    };
    let tids: BTreeSet<Tid> = diffs.iter().filter(|d| d.len() == min).flatten().copied().collect();
    Ok(tids.into_iter().collect())
}

/// Causes straight from the counterfactual definition, by trying every
/// `Γ ⊆ Dⁿ ∖ {τ}`. Exponential; meant as an oracle.
pub fn causes_oracle(instance: &Instance, query: &QuerySpec) -> Result<Vec<TupleCauseReport>, Error> {
    require_boolean(query)?;
    if !eval_bcq(instance, query)? {
        return Ok(Vec::new());
    }
    brute_force(instance, |d| Ok(eval_bcq(d, query)?))
}

/// Causes when every instance involved must also satisfy `ids`:
/// `D∖Γ ⊨ Ψ`, `D∖Γ ⊨ Q`, `D∖(Γ∪{τ}) ⊨ Ψ` and `D∖(Γ∪{τ}) ⊭ Q`.
pub fn actual_causes_under_ics(
    instance: &Instance,
    query: &QuerySpec,
    ids: &[InclusionDependency],
) -> Result<Vec<TupleCauseReport>, Error> {
    require_boolean(query)?;
    if !satisfies_ids(instance, ids)? {
        return Err(Error::IdsViolated);
    }
    if !eval_bcq(instance, query)? {
        return Ok(Vec::new());
    }
    brute_force(instance, |d| {
        if !satisfies_ids(d, ids)? {
            return Ok(None);
        }
        Ok(Some(eval_bcq(d, query)?))
    })
}

/// `holds(d)` is `Some(true)` if `d` is admissible and satisfies the query,
/// `Some(false)` if admissible and not, `None` if inadmissible.
trait Outcome {
    fn outcome(self) -> Option<bool>;
}

impl Outcome for bool {
    fn outcome(self) -> Option<bool> {
        Some(self)
    }
}

impl Outcome for Option<bool> {
    fn outcome(self) -> Option<bool> {
        self
    }
}

fn brute_force<O: Outcome>(
    instance: &Instance,
    mut holds: impl FnMut(&Instance) -> Result<O, Error>,
) -> Result<Vec<TupleCauseReport>, Error> {
    let endogenous: Vec<Tid> = instance.endogenous_tids().collect();
    if endogenous.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchTooLarge {
            items: endogenous.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let n = endogenous.len();
    // Outcome for every subset of endogenous tuples removed, indexed by mask.
    let mut table: Vec<Option<bool>> = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        let removed: BTreeSet<Tid> = bits(mask, &endogenous).collect();
        table.push(holds(&instance.without(&removed))?.outcome());
    }
    let mut reports = Vec::new();
    for (i, &tau) in endogenous.iter().enumerate() {
        let tau_bit = 1u32 << i;
        let mut valid = Vec::new();
        for gamma in 0u32..(1u32 << n) {
            if gamma & tau_bit != 0 {
                continue;
            }
            if table[gamma as usize] == Some(true) && table[(gamma | tau_bit) as usize] == Some(false) {
                valid.push(bits(gamma, &endogenous).collect::<BTreeSet<Tid>>());
            }
        }
        if !valid.is_empty() {
            reports.push(report(tau, minimize(&valid), &CauseOptions::default()));
        }
    }
    sort_reports(&mut reports);
    Ok(reports)
}

fn bits(mask: u32, items: &[Tid]) -> impl Iterator<Item = Tid> + '_ {
    items
        .iter()
        .enumerate()
        .filter(move |(i, _)| mask & (1 << i) != 0)
        .map(|(_, t)| *t)
}
