//! Attribute-level and tuple-level causes under null-based repairs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::null_repairs::{candidate_positions, null_repair_deltas, ORACLE_LIMIT};
use crate::qlang::{eval_bcq, negate_query_to_dc, DenialConstraint, EvalError, QuerySpec};
use crate::relmodel::{Constant, Instance, PositionRef, Tid};
use crate::{Error, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttrCauseReport {
    pub position: PositionRef,
    pub original_value: Constant,
    pub counterfactual: bool,
    pub responsibility: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleNullCauseReport {
    pub tid: Tid,
    /// Set when a single change inside the tuple falsifies the query.
    pub counterfactual: bool,
    pub responsibility: Rational,
    /// Positions of the tuple that occur in some repair delta.
    pub witness_positions: BTreeSet<PositionRef>,
}

/// How a delta is sized for tuple-level responsibility.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TupleMultiplicity {
    /// `|Δ|`.
    #[default]
    Plain,
    /// `|Δ|` minus one for every extra position of the same tuple.
    Collapsed,
}

/// The null-repair deltas w.r.t. `κ(Q)`, computed once and shared by every
/// attribute and tuple cause query.
#[derive(Clone, Debug)]
pub struct NullCauseAnalysis<'a> {
    instance: &'a Instance,
    query: &'a QuerySpec,
    holds: bool,
    deltas: Vec<BTreeSet<PositionRef>>,
}

impl<'a> NullCauseAnalysis<'a> {
    pub fn new(instance: &'a Instance, query: &'a QuerySpec) -> Result<Self, Error> {
        if !query.is_boolean() {
            return Err(EvalError::OpenQuery(query.name.clone()).into());
        }
        let holds = eval_bcq(instance, query)?;
        let deltas = if holds {
            null_repair_deltas(instance, &negate_query_to_dc(query)?)?
        } else {
            Vec::new()
        };
        Ok(NullCauseAnalysis {
            instance,
            query,
            holds,
            deltas,
        })
    }

    pub fn deltas(&self) -> &[BTreeSet<PositionRef>] {
        &self.deltas
    }

    /// `Diff^null(D, κ(Q), ν)`.
    pub fn diff_null(&self, position: &PositionRef) -> Vec<BTreeSet<PositionRef>> {
        self.deltas.iter().filter(|d| d.contains(position)).cloned().collect()
    }

    pub fn attr_causes(&self) -> Result<Vec<AttrCauseReport>, Error> {
        let mut smallest: BTreeMap<&PositionRef, usize> = BTreeMap::new();
        for d in &self.deltas {
            for p in d {
                let e = smallest.entry(p).or_insert(d.len());
                *e = (*e).min(d.len());
            }
        }
        let mut out = Vec::with_capacity(smallest.len());
        for (p, size) in smallest {
            out.push(AttrCauseReport {
                position: p.clone(),
                original_value: self.instance.value_at(p)?.clone(),
                counterfactual: size == 1,
                responsibility: Rational::new(1, size as u64),
            });
        }
        out.sort_by(|a, b| {
            b.responsibility
                .cmp(&a.responsibility)
                .then_with(|| a.position.cmp(&b.position))
        });
        Ok(out)
    }

    pub fn tuple_null_causes(&self, multiplicity: TupleMultiplicity) -> Vec<TupleNullCauseReport> {
        let mut best: BTreeMap<Tid, (usize, BTreeSet<PositionRef>)> = BTreeMap::new();
        for d in &self.deltas {
            let mut touched: BTreeMap<Tid, usize> = BTreeMap::new();
            for p in d {
                *touched.entry(p.tid).or_default() += 1;
            }
            for (tid, count) in touched {
                let size = match multiplicity {
                    TupleMultiplicity::Plain => d.len(),
                    TupleMultiplicity::Collapsed => d.len() - (count - 1),
                };
                let entry = best.entry(tid).or_insert((size, BTreeSet::new()));
                entry.0 = entry.0.min(size);
                entry.1.extend(d.iter().filter(|p| p.tid == tid).cloned());
            }
        }
        let mut out: Vec<TupleNullCauseReport> = best
            .into_iter()
            .map(|(tid, (size, witness_positions))| TupleNullCauseReport {
                tid,
                counterfactual: size == 1,
                responsibility: Rational::new(1, size as u64),
                witness_positions,
            })
            .collect();
        out.sort_by(|a, b| b.responsibility.cmp(&a.responsibility).then(a.tid.cmp(&b.tid)));
        out
    }

    /// `D ⊨ Q` and `{p}∘D ⊭ Q`.
    pub fn is_counterfactual_attr_cause(&self, position: &PositionRef) -> Result<bool, Error> {
        if !self.holds || self.instance.value_at(position)?.is_null() {
            return Ok(false);
        }
        Ok(!eval_bcq(&self.instance.nulled([position]), self.query)?)
    }

    /// Whether some update `U` not touching `position` keeps `Q` true while
    /// `U ∪ {position}` falsifies it. Searches subsets of the candidate
    /// positions of `κ(Q)`.
    pub fn is_actual_attr_cause(&self, position: &PositionRef) -> Result<bool, Error> {
        if !self.holds || self.instance.value_at(position)?.is_null() {
            return Ok(false);
        }
        let dcs: Vec<DenialConstraint> = negate_query_to_dc(self.query)?;
        let candidates = candidate_positions(self.instance, &dcs)?;
        if !candidates.contains(position) {
            return Ok(false);
        }
        let others: Vec<&PositionRef> = candidates.iter().filter(|p| *p != position).collect();
        if others.len() > ORACLE_LIMIT {
            return Err(Error::SearchTooLarge {
                items: others.len(),
                limit: ORACLE_LIMIT,
            });
        }
        for mask in 0u32..(1u32 << others.len()) {
            let update: Vec<&PositionRef> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| *p)
                .collect();
            let before = self.instance.nulled(update.iter().copied());
            if !eval_bcq(&before, self.query)? {
                continue;
            }
            if !eval_bcq(&before.nulled([position]), self.query)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub fn diff_null(
    instance: &Instance,
    query: &QuerySpec,
    position: &PositionRef,
) -> Result<Vec<BTreeSet<PositionRef>>, Error> {
    Ok(NullCauseAnalysis::new(instance, query)?.diff_null(position))
}

/// Attribute-null-based causes with `ρ = 1 / min |Δ|` over the deltas that
/// contain the position.
pub fn attr_causes(instance: &Instance, query: &QuerySpec) -> Result<Vec<AttrCauseReport>, Error> {
    NullCauseAnalysis::new(instance, query)?.attr_causes()
}

/// Tuple-null-based causes with `ρ = 1 / min |Δ|` over the deltas touching
/// the tuple.
pub fn tuple_null_causes(instance: &Instance, query: &QuerySpec) -> Result<Vec<TupleNullCauseReport>, Error> {
    Ok(NullCauseAnalysis::new(instance, query)?.tuple_null_causes(TupleMultiplicity::Plain))
}

pub fn is_counterfactual_attr_cause(
    instance: &Instance,
    query: &QuerySpec,
    position: &PositionRef,
) -> Result<bool, Error> {
    NullCauseAnalysis::new(instance, query)?.is_counterfactual_attr_cause(position)
}

pub fn is_actual_attr_cause(instance: &Instance, query: &QuerySpec, position: &PositionRef) -> Result<bool, Error> {
    NullCauseAnalysis::new(instance, query)?.is_actual_attr_cause(position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlang::parse_problem;
    use alloc::vec;

    fn pos(r: &str, t: u64, j: usize) -> PositionRef {
        PositionRef::new(r, t, j)
    }

    fn set(ps: &[PositionRef]) -> BTreeSet<PositionRef> {
        ps.iter().cloned().collect()
    }

    const EX6: &str = "R(a2,a1). R(a3,a3). R(a4,a3). S(a2). S(a3). S(a4). q :- S(X), R(X,Y), S(Y)?";
    const EX7: &str = "S(a2). S(a3). R(a3,a1). R(a3,a4). R(a3,a5). q :- S(X), R(X,Y)?";
    const EX12: &str = "P(8;1,2). R(9;2,1). q :- P(X,Y), R(Y,Z)?";

    #[test]
    fn example6_diff_and_responsibilities() {
        let p = parse_problem(EX6).unwrap();
        let a = NullCauseAnalysis::new(&p.instance, &p.queries[0]).unwrap();
        let d = a.diff_null(&pos("R", 2, 1));
        assert!(d.contains(&set(&[pos("R", 2, 1), pos("R", 3, 2)])));
        assert!(d.contains(&set(&[pos("R", 2, 1), pos("S", 6, 1)])));
        let causes = a.attr_causes().unwrap();
        let r21 = causes.iter().find(|c| c.position == pos("R", 2, 1)).unwrap();
        assert_eq!(r21.responsibility, Rational::new(1, 2));
        assert_eq!(r21.original_value, Constant::from("a3"));
        let tuples = a.tuple_null_causes(TupleMultiplicity::Plain);
        let t2 = tuples.iter().find(|t| t.tid == Tid(2)).unwrap();
        assert_eq!(t2.responsibility, Rational::new(1, 2));
        assert_eq!(causes[0].position, pos("S", 5, 1));
        assert!(causes[0].counterfactual);
    }

    #[test]
    fn example7_attribute_causes() {
        let p = parse_problem(EX7).unwrap();
        let causes = attr_causes(&p.instance, &p.queries[0]).unwrap();
        let got: Vec<_> = causes.iter().map(|c| (c.position.clone(), c.responsibility)).collect();
        let third = Rational::new(1, 3);
        assert_eq!(
            got,
            vec![
                (pos("S", 2, 1), Rational::from(1)),
                (pos("R", 3, 1), third),
                (pos("R", 4, 1), third),
                (pos("R", 5, 1), third),
            ]
        );
        assert!(causes[0].counterfactual);
        assert_eq!(
            diff_null(&p.instance, &p.queries[0], &pos("S", 2, 1)).unwrap(),
            vec![set(&[pos("S", 2, 1)])]
        );
        assert!(diff_null(&p.instance, &p.queries[0], &pos("R", 3, 2))
            .unwrap()
            .is_empty());
        let tuples = tuple_null_causes(&p.instance, &p.queries[0]).unwrap();
        assert_eq!(tuples[0].tid, Tid(2));
        assert_eq!(tuples[0].responsibility, Rational::from(1));
        assert!(tuples[0].counterfactual);
    }

    #[test]
    fn example7_cause_checks() {
        let p = parse_problem(EX7).unwrap();
        let a = NullCauseAnalysis::new(&p.instance, &p.queries[0]).unwrap();
        assert!(a.is_counterfactual_attr_cause(&pos("S", 2, 1)).unwrap());
        assert!(!a.is_counterfactual_attr_cause(&pos("R", 3, 1)).unwrap());
        assert!(a.is_actual_attr_cause(&pos("R", 3, 1)).unwrap());
        assert!(!a.is_actual_attr_cause(&pos("R", 3, 2)).unwrap());
        let u = p.instance.nulled(&[pos("R", 4, 1), pos("R", 5, 1)]);
        assert!(eval_bcq(&u, &p.queries[0]).unwrap());
        assert!(!eval_bcq(&u.nulled([&pos("R", 3, 1)]), &p.queries[0]).unwrap());
    }

    #[test]
    fn example12_counterfactual() {
        let p = parse_problem(EX12).unwrap();
        assert!(is_counterfactual_attr_cause(&p.instance, &p.queries[0], &pos("P", 8, 2)).unwrap());
        assert!(!is_counterfactual_attr_cause(&p.instance, &p.queries[0], &pos("P", 8, 1)).unwrap());
    }

    #[test]
    fn false_query_yields_nothing() {
        let p = parse_problem("S(a2). R(a3,a1). q :- S(X), R(X,Y)?").unwrap();
        let a = NullCauseAnalysis::new(&p.instance, &p.queries[0]).unwrap();
        assert!(a.attr_causes().unwrap().is_empty());
        assert!(a.tuple_null_causes(TupleMultiplicity::Plain).is_empty());
        assert!(!a.is_actual_attr_cause(&pos("S", 1, 1)).unwrap());
    }

    #[test]
    fn collapsed_multiplicity() {
        let p = parse_problem("R(1;a,b). S(2;a). T(3;b). q :- R(X,Y), S(X)?\nq :- R(X,Y), T(Y)?").unwrap();
        let a = NullCauseAnalysis::new(&p.instance, &p.queries[0]).unwrap();
        assert!(a.deltas().contains(&set(&[pos("R", 1, 1), pos("R", 1, 2)])));
        let rho = |m, tid| {
            a.tuple_null_causes(m)
                .into_iter()
                .find(|t| t.tid == Tid(tid))
                .unwrap()
                .responsibility
        };
        assert_eq!(rho(TupleMultiplicity::Plain, 1), Rational::new(1, 2));
        assert_eq!(rho(TupleMultiplicity::Collapsed, 1), Rational::from(1));
        assert_eq!(rho(TupleMultiplicity::Collapsed, 2), Rational::new(1, 2));
    }

    #[test]
    fn open_query_is_rejected() {
        let p = parse_problem("S(a). q(X) :- S(X)?").unwrap();
        assert!(NullCauseAnalysis::new(&p.instance, &p.queries[0]).is_err());
    }
}
