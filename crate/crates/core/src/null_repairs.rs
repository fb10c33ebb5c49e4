//! Null-based repairs: consistent instances reached by a ⊆-minimal set of
//! value-to-null replacements.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::hitting::{minimal_hitting_sets_by, minimize};
use crate::qlang::{violations, DenialConstraint, EvalError};
use crate::relmodel::{Instance, PositionRef};
use crate::tuple_repairs::Minimality;
use crate::Error;

/// Largest number of non-null positions the exhaustive oracle accepts.
pub const ORACLE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullRepairRecord {
    pub repair: Instance,
    pub delta: BTreeSet<PositionRef>,
    pub kind: Minimality,
}

fn records(instance: &Instance, deltas: Vec<BTreeSet<PositionRef>>, kind: Minimality) -> Vec<NullRepairRecord> {
    deltas
        .into_iter()
        .map(|delta| NullRepairRecord {
            repair: instance.nulled(&delta),
            delta,
            kind,
        })
        .collect()
}

/// The positions a change may usefully touch: critical positions of some
/// violation.
pub fn candidate_positions(instance: &Instance, dcs: &[DenialConstraint]) -> Result<BTreeSet<PositionRef>, Error> {
    Ok(violations(instance, dcs)?
        .iter()
        .flat_map(|w| w.critical_positions().iter().cloned())
        .collect())
}

/// Deltas of all null-based repairs.
///
/// The search grows a change set one position at a time: it applies the
/// changes, recomputes the violations, and branches on the critical
/// positions of the first remaining one. Supersets of repairs already found
/// are cut, and a final pass keeps the ⊆-minimal deltas.
pub fn null_repair_deltas(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<BTreeSet<PositionRef>>, Error> {
    let mut failure: Option<EvalError> = None;
    let deltas = minimal_hitting_sets_by(|chosen: &BTreeSet<PositionRef>| {
        if failure.is_some() {
            return None;
        }
        match violations(&instance.nulled(chosen), dcs) {
            Ok(ws) => ws.first().map(|w| w.critical_positions().iter().cloned().collect()),
            Err(e) => {
                failure = Some(e);
                None
            }
        }
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(deltas),
    }
}

/// `Rep^null(D, Σ)`.
pub fn null_repairs(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<NullRepairRecord>, Error> {
    Ok(records(
        instance,
        null_repair_deltas(instance, dcs)?,
        Minimality::Subset,
    ))
}

/// The null-based repairs with the fewest changes.
pub fn cardinality_null_repairs(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<NullRepairRecord>, Error> {
    let mut deltas = null_repair_deltas(instance, dcs)?;
    if let Some(min) = deltas.iter().map(BTreeSet::len).min() {
        deltas.retain(|d| d.len() == min);
    }
    Ok(records(instance, deltas, Minimality::Cardinality))
}

/// Exhaustive search over every subset of non-null positions, without any
/// candidate pruning.
pub fn null_repairs_oracle(instance: &Instance, dcs: &[DenialConstraint]) -> Result<Vec<NullRepairRecord>, Error> {
    let positions = instance.non_null_positions();
    if positions.len() > ORACLE_LIMIT {
        return Err(Error::SearchTooLarge {
            items: positions.len(),
            limit: ORACLE_LIMIT,
        });
    }
    let mut consistent = Vec::new();
    for mask in 0u32..(1u32 << positions.len()) {
        let delta: BTreeSet<PositionRef> = positions
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        if violations(&instance.nulled(&delta), dcs)?.is_empty() {
            consistent.push(delta);
        }
    }
    Ok(records(instance, minimize(&consistent), Minimality::Subset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlang::{negate_query_to_dc, parse_problem};
    use crate::relmodel::{delta_null, Constant, Tid};
    use alloc::vec;

    fn pos(r: &str, t: u64, j: usize) -> PositionRef {
        PositionRef::new(r, t, j)
    }

    fn deltas(rs: &[NullRepairRecord]) -> Vec<BTreeSet<PositionRef>> {
        rs.iter().map(|r| r.delta.clone()).collect()
    }

    fn set(ps: &[PositionRef]) -> BTreeSet<PositionRef> {
        ps.iter().cloned().collect()
    }

    const EX6: &str = "R(a2,a1). R(a3,a3). R(a4,a3). S(a2). S(a3). S(a4). :- S(X), R(X,Y), S(Y).";
    const EX7: &str = "S(a2). S(a3). R(a3,a1). R(a3,a4). R(a3,a5). :- S(X), R(X,Y).";
    const EX12: &str = "P(8;1,2). R(9;2,1). :- P(X,Y), R(Y,Z).";

    #[test]
    fn example6_has_seven_repairs() {
        let p = parse_problem(EX6).unwrap();
        let rs = null_repairs(&p.instance, &p.dcs).unwrap();
        let expected = vec![
            set(&[pos("S", 5, 1)]),
            set(&[pos("R", 2, 1), pos("R", 3, 1)]),
            set(&[pos("R", 2, 1), pos("R", 3, 2)]),
            set(&[pos("R", 2, 1), pos("S", 6, 1)]),
            set(&[pos("R", 2, 2), pos("R", 3, 1)]),
            set(&[pos("R", 2, 2), pos("R", 3, 2)]),
            set(&[pos("R", 2, 2), pos("S", 6, 1)]),
        ];
        assert_eq!(deltas(&rs), expected);
        assert_eq!(null_repairs_oracle(&p.instance, &p.dcs).unwrap(), rs);
        for r in &rs {
            assert_eq!(delta_null(&p.instance, &r.repair).unwrap(), r.delta);
        }
        let c = cardinality_null_repairs(&p.instance, &p.dcs).unwrap();
        assert_eq!(deltas(&c), vec![set(&[pos("S", 5, 1)])]);
        assert_eq!(c[0].kind, Minimality::Cardinality);
    }

    #[test]
    fn example7_repairs() {
        let p = parse_problem(EX7).unwrap();
        let rs = null_repairs(&p.instance, &p.dcs).unwrap();
        assert_eq!(
            deltas(&rs),
            vec![
                set(&[pos("S", 2, 1)]),
                set(&[pos("R", 3, 1), pos("R", 4, 1), pos("R", 5, 1)])
            ]
        );
        let c = cardinality_null_repairs(&p.instance, &p.dcs).unwrap();
        assert_eq!(deltas(&c), vec![set(&[pos("S", 2, 1)])]);
    }

    #[test]
    fn example12_repairs() {
        let p = parse_problem(EX12).unwrap();
        let rs = null_repairs(&p.instance, &p.dcs).unwrap();
        assert_eq!(deltas(&rs), vec![set(&[pos("P", 8, 2)]), set(&[pos("R", 9, 1)])]);
        assert_eq!(null_repairs_oracle(&p.instance, &p.dcs).unwrap(), rs);
        let p8 = rs[0].repair.get(Tid(8)).unwrap();
        assert_eq!(p8.values, vec![Constant::Integer(1), Constant::Null]);
        let both = set(&[pos("P", 8, 2), pos("R", 9, 1)]);
        assert!(!deltas(&rs).contains(&both));
    }

    #[test]
    fn interacting_constraints_need_further_updates() {
        let p = parse_problem("P(8;1,2). R(9;2,1). :- P(X,Y), R(Y,Z). :- P(X,Y), R(Y,X).").unwrap();
        let rs = null_repairs(&p.instance, &p.dcs).unwrap();
        assert_eq!(null_repairs_oracle(&p.instance, &p.dcs).unwrap(), rs);
        for r in &rs {
            assert!(violations(&r.repair, &p.dcs).unwrap().is_empty());
        }
    }

    #[test]
    fn degenerate_inputs() {
        let consistent = parse_problem("P(a). :- P(X), Q(X).").unwrap();
        let rs = null_repairs(&consistent.instance, &consistent.dcs).unwrap();
        assert_eq!(deltas(&rs), vec![BTreeSet::new()]);
        assert_eq!(rs[0].repair, consistent.instance);
        assert_eq!(
            deltas(&null_repairs_oracle(&Instance::new(), &[]).unwrap()),
            vec![BTreeSet::new()]
        );
        // Nothing can be nulled to falsify a body without joins or constants.
        let hopeless = parse_problem("P(a). :- P(X).").unwrap();
        assert!(null_repairs(&hopeless.instance, &hopeless.dcs).unwrap().is_empty());
        assert!(null_repairs_oracle(&hopeless.instance, &hopeless.dcs)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn initial_nulls_are_tolerated() {
        let p = parse_problem("S(1;a3). S(2;null). R(3;a3,null). R(4;null,a3). q :- S(X), R(X,Y)?").unwrap();
        let dcs = negate_query_to_dc(&p.queries[0]).unwrap();
        let rs = null_repairs(&p.instance, &dcs).unwrap();
        assert_eq!(deltas(&rs), vec![set(&[pos("R", 3, 1)]), set(&[pos("S", 1, 1)])]);
        assert_eq!(null_repairs_oracle(&p.instance, &dcs).unwrap(), rs);
    }

    #[test]
    fn candidates_exclude_single_occurrence_positions() {
        let p = parse_problem(EX7).unwrap();
        let c = candidate_positions(&p.instance, &p.dcs).unwrap();
        assert!(c.contains(&pos("R", 3, 1)));
        assert!(!c.contains(&pos("R", 3, 2)));
        assert!(!c.contains(&pos("S", 1, 1)));
    }
}
