//! Reading solver output and checking it against the engine's repairs.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::Semantics;
use crate::null_repairs::{cardinality_null_repairs, null_repairs};
use crate::qlang::DenialConstraint;
use crate::relmodel::{Constant, Instance, Tid};
use crate::tuple_repairs::{c_repairs, s_repairs, Minimality};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelTerm {
    Const(String),
    Set(Vec<ModelTerm>),
}

impl fmt::Display for ModelTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTerm::Const(c) => f.write_str(c),
            ModelTerm::Set(items) => {
                f.write_str("{")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelAtom {
    pub predicate: String,
    pub args: Vec<ModelTerm>,
}

impl fmt::Display for ModelAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableModel {
    pub atoms: Vec<ModelAtom>,
    /// Printed as `Best model: {…}`, i.e. optimal under weak constraints.
    pub best: bool,
    /// The text after `Cost ([Weight:Level]):`, when present.
    pub cost: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ModelParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl core::error::Error for ModelParseError {}

struct Reader<'a> {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
    _text: &'a str,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().collect(),
            at: 0,
            line: 1,
            column: 1,
            _text: text,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn rest_starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.chars.get(self.at + i) == Some(&c))
    }

    fn rest_of_line(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn error(&self, message: impl Into<String>) -> ModelParseError {
        ModelParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ModelParseError> {
        self.skip_ws();
        match self.peek() {
            Some(d) if d == c => {
                self.bump();
                Ok(())
            }
            Some(d) => Err(self.error(alloc::format!("expected '{c}', found '{d}'"))),
            None => Err(self.error(alloc::format!("expected '{c}', found end of input"))),
        }
    }

    fn word(&mut self) -> Result<String, ModelParseError> {
        self.skip_ws();
        let mut s = String::new();
        if self.peek() == Some('"') {
            s.push(self.bump().expect("peeked"));
            loop {
                match self.bump() {
                    Some('"') => break,
                    Some(c) => s.push(c),
                    None => return Err(self.error("unterminated string")),
                }
            }
            s.push('"');
            return Ok(s);
        }
        if self.peek() == Some('-') {
            s.push(self.bump().expect("peeked"));
        }
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
            s.push(c);
            self.bump();
        }
        if s.is_empty() || s == "-" {
            return Err(match self.peek() {
                Some(c) => self.error(alloc::format!("unexpected '{c}'")),
                None => self.error("unexpected end of input"),
            });
        }
        Ok(s)
    }

    fn term(&mut self) -> Result<ModelTerm, ModelParseError> {
        self.skip_ws();
        if self.peek() == Some('{') {
            self.bump();
            let items = self.list('}', Self::term)?;
            return Ok(ModelTerm::Set(items));
        }
        Ok(ModelTerm::Const(self.word()?))
    }

    /// Comma-separated items up to `close`, which is consumed.
    fn list<T>(
        &mut self,
        close: char,
        item: fn(&mut Self) -> Result<T, ModelParseError>,
    ) -> Result<Vec<T>, ModelParseError> {
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(c) if c == close => {
                    self.bump();
                    return Ok(out);
                }
                _ => self.expect(close).map(|_| ())?,
            }
        }
    }

    fn atom(&mut self) -> Result<ModelAtom, ModelParseError> {
        let predicate = self.word()?;
        self.skip_ws();
        let args = if self.peek() == Some('(') {
            self.bump();
            self.list(')', Self::term)?
        } else {
            Vec::new()
        };
        Ok(ModelAtom { predicate, args })
    }
}

/// Reads solver output: brace-delimited models, optionally prefixed by
/// `Best model:` and followed by a `Cost ([Weight:Level]): <…>` line. Blank
/// lines and solver banner lines starting with `DLV` are skipped.
pub fn parse_models(text: &str) -> Result<Vec<StableModel>, ModelParseError> {
    let mut r = Reader::new(text);
    let mut models: Vec<StableModel> = Vec::new();
    loop {
        r.skip_ws();
        let Some(c) = r.peek() else { break };
        if r.rest_starts_with("Best model:") {
            for _ in 0.."Best model:".len() {
                r.bump();
            }
            r.expect('{')?;
            let atoms = r.list('}', Reader::atom)?;
            models.push(StableModel {
                atoms,
                best: true,
                cost: None,
            });
        } else if c == '{' {
            r.bump();
            let atoms = r.list('}', Reader::atom)?;
            models.push(StableModel {
                atoms,
                best: false,
                cost: None,
            });
        } else if r.rest_starts_with("Cost") {
            let line = r.rest_of_line();
            let value = line.split_once("):").map(|(_, v)| v.trim().to_string());
            match models.last_mut() {
                Some(m) if m.cost.is_none() => m.cost = value,
                _ => return Err(r.error("cost line without a preceding model")),
            }
        } else if r.rest_starts_with("DLV") {
            r.rest_of_line();
        } else {
            return Err(r.error(alloc::format!("unexpected '{c}' outside a model")));
        }
    }
    Ok(models)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    Parse(ModelParseError),
    /// A model atom that does not describe a tuple of the instance's schema.
    BadAtom {
        model: usize,
        atom: String,
    },
    Engine(Error),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::Parse(e) => write!(f, "cannot parse models: {e}"),
            VerifyError::BadAtom { model, atom } => write!(f, "model #{}: malformed repair atom {atom}", model + 1),
            VerifyError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for VerifyError {}

impl From<ModelParseError> for VerifyError {
    fn from(e: ModelParseError) -> Self {
        VerifyError::Parse(e)
    }
}

impl From<Error> for VerifyError {
    fn from(e: Error) -> Self {
        VerifyError::Engine(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceReport {
    /// Subset repairs, or cardinality repairs when every model is marked best.
    pub minimality: Minimality,
    pub models: usize,
    pub repairs: usize,
    /// `(model index, repair index)`, both 0-based.
    pub matched: Vec<(usize, usize)>,
    pub unmatched_models: Vec<usize>,
    pub unmatched_repairs: Vec<usize>,
}

impl CorrespondenceReport {
    pub fn is_bijection(&self) -> bool {
        self.unmatched_models.is_empty() && self.unmatched_repairs.is_empty() && self.models == self.repairs
    }
}

fn constant(term: &ModelTerm) -> Option<Constant> {
    let ModelTerm::Const(s) = term else { return None };
    Some(if s == "null" {
        Constant::Null
    } else if let Ok(i) = s.parse::<i64>() {
        Constant::Integer(i)
    } else if let Some(inner) = s.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        Constant::Symbol(inner.into())
    } else {
        Constant::Symbol(s.clone())
    })
}

/// `(relation, tid, values)` of an annotated atom.
type Annotated<'m> = (&'m str, Tid, Vec<Constant>);

/// Reads an annotated atom `R_a(t, v̄, ann)`; `Err` when it is malformed.
fn annotated<'m>(atom: &'m ModelAtom, instance: &Instance, annotation: &str) -> Option<Result<Annotated<'m>, ()>> {
    let relation = atom.predicate.strip_suffix("_a")?;
    let arity = instance.arity(relation)?;
    if atom.args.last() != Some(&ModelTerm::Const(annotation.into())) {
        return None;
    }
    if atom.args.len() != arity + 2 {
        return Some(Err(()));
    }
    let tid = match &atom.args[0] {
        ModelTerm::Const(s) => s.parse::<u64>().map_err(|_| ()),
        ModelTerm::Set(_) => Err(()),
    };
    let values: Option<Vec<Constant>> = atom.args[1..=arity].iter().map(constant).collect();
    Some(match (tid, values) {
        (Ok(t), Some(v)) if t > 0 => Ok((relation, Tid(t), v)),
        _ => Err(()),
    })
}

/// The repair a model describes: its `s`-annotated atoms, or for tuple
/// semantics with filtered output, the instance minus its `d`-annotated atoms.
fn model_repair(
    index: usize,
    model: &StableModel,
    instance: &Instance,
    semantics: Semantics,
) -> Result<Instance, VerifyError> {
    let bad = |atom: &ModelAtom| VerifyError::BadAtom {
        model: index,
        atom: atom.to_string(),
    };
    let mut repair = Instance::new();
    for (rel, arity) in instance.schema() {
        repair.declare(rel, *arity).map_err(Error::from)?;
    }
    let mut stays = 0;
    for atom in &model.atoms {
        if let Some(parsed) = annotated(atom, instance, "s") {
            let (rel, tid, values) = parsed.map_err(|_| bad(atom))?;
            repair.add_fact(rel, Some(tid), values).map_err(|_| bad(atom))?;
            stays += 1;
        }
    }
    if stays == 0 && semantics == Semantics::Tuple {
        let mut deleted = BTreeSet::new();
        for atom in &model.atoms {
            if let Some(parsed) = annotated(atom, instance, "d") {
                let (_, tid, _) = parsed.map_err(|_| bad(atom))?;
                deleted.insert(tid);
            }
        }
        return Ok(instance.without(&deleted));
    }
    Ok(repair)
}

/// Parses `models_text`, turns each model into a repair and pairs the
/// models with the engine's repairs of the same semantics.
pub fn verify_model_correspondence(
    instance: &Instance,
    dcs: &[DenialConstraint],
    models_text: &str,
    semantics: Semantics,
) -> Result<CorrespondenceReport, VerifyError> {
    let models = parse_models(models_text)?;
    let minimality = if !models.is_empty() && models.iter().all(|m| m.best) {
        Minimality::Cardinality
    } else {
        Minimality::Subset
    };
    let repairs: Vec<Instance> = match (semantics, minimality) {
        (Semantics::Tuple, Minimality::Subset) => s_repairs(instance, dcs)?.into_iter().map(|r| r.repair).collect(),
        (Semantics::Tuple, Minimality::Cardinality) => {
            c_repairs(instance, dcs)?.into_iter().map(|r| r.repair).collect()
        }
        (Semantics::Null, Minimality::Subset) => null_repairs(instance, dcs)?.into_iter().map(|r| r.repair).collect(),
        (Semantics::Null, Minimality::Cardinality) => cardinality_null_repairs(instance, dcs)?
            .into_iter()
            .map(|r| r.repair)
            .collect(),
    };
    let mut taken = alloc::vec![false; repairs.len()];
    let mut matched = Vec::new();
    let mut unmatched_models = Vec::new();
    for (i, m) in models.iter().enumerate() {
        let repair = model_repair(i, m, instance, semantics)?;
        match (0..repairs.len()).find(|&j| !taken[j] && repairs[j] == repair) {
            Some(j) => {
                taken[j] = true;
                matched.push((i, j));
            }
            None => unmatched_models.push(i),
        }
    }
    Ok(CorrespondenceReport {
        minimality,
        models: models.len(),
        repairs: repairs.len(),
        matched,
        unmatched_models,
        unmatched_repairs: (0..repairs.len()).filter(|&j| !taken[j]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlang::{negate_query_to_dc, parse_problem};

    const EX3_MODELS: &str = "
    {S_a(4,a4,d), R_a(3,a3,a3,d), R_a(1,a4,a3,s), R_a(2,a2,a1,s),
     S_a(5,a2,s), S_a(6,a3,s)}

    {R_a(1,a4,a3,d), R_a(3,a3,a3,d), R_a(2,a2,a1,s), S_a(4,a4,s),
     S_a(5,a2,s), S_a(6,a3,s)}

    {S_a(6,a3,d), R_a(1,a4,a3,s), R_a(2,a2,a1,s), R_a(3,a3,a3,s),
     S_a(4,a4,s), S_a(5,a2,s)}
";

    fn example3() -> (Instance, Vec<DenialConstraint>) {
        let p = parse_problem("R(a4,a3). R(a2,a1). R(a3,a3). S(a4). S(a2). S(a3). q :- S(X), R(X,Y), S(Y)?").unwrap();
        let dcs = negate_query_to_dc(&p.queries[0]).unwrap();
        (p.instance, dcs)
    }

    #[test]
    fn parses_sets_best_models_and_costs() {
        let text = "DLV [build BEN]\n\nBest model: {cause(6), cont(6,{}), cont(3,{4,5}), p}\nCost ([Weight:Level]): <[1:1]>\n{q(-1,\"A b\")}";
        let ms = parse_models(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms[0].best && !ms[1].best);
        assert_eq!(ms[0].cost.as_deref(), Some("<[1:1]>"));
        assert_eq!(ms[0].atoms[1].args[1], ModelTerm::Set(alloc::vec![]));
        assert_eq!(ms[0].atoms[2].to_string(), "cont(3,{4,5})");
        assert_eq!(ms[0].atoms[3].to_string(), "p");
        assert_eq!(ms[1].atoms[0].to_string(), "q(-1,\"A b\")");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_models("{p(1}").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        let e = parse_models("{p(1)}\n  garbage").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse_models("{p(1)").is_err());
        assert!(parse_models("Cost ([Weight:Level]): <[1:1]>").is_err());
        assert_eq!(parse_models("").unwrap(), alloc::vec![]);
    }

    #[test]
    fn example3_models_match_s_repairs() {
        let (inst, dcs) = example3();
        let r = verify_model_correspondence(&inst, &dcs, EX3_MODELS, Semantics::Tuple).unwrap();
        assert!(r.is_bijection(), "{r:?}");
        assert_eq!(r.minimality, Minimality::Subset);
        // Engine order: {6}, {1,3}, {3,4}.
        assert_eq!(r.matched, alloc::vec![(0, 2), (1, 1), (2, 0)]);
    }

    #[test]
    fn filtered_models_fall_back_to_deletions() {
        let (inst, dcs) = example3();
        let text =
            "{S_a(4,a4,d), R_a(3,a3,a3,d), cause(4), cause(3), preRho(3,2), preRho(4,2), cont(3,{4}), cont(4,{3})}
                    {R_a(1,a4,a3,d), R_a(3,a3,a3,d), cause(1), cause(3)}
                    {S_a(6,a3,d), cause(6), preRho(6,1), cont(6,{})}";
        assert!(verify_model_correspondence(&inst, &dcs, text, Semantics::Tuple)
            .unwrap()
            .is_bijection());
        let best = "Best model: {S_a(6,a3,d), cause(6)}\nCost ([Weight:Level]): <[1:1]>";
        let r = verify_model_correspondence(&inst, &dcs, best, Semantics::Tuple).unwrap();
        assert_eq!(r.minimality, Minimality::Cardinality);
        assert!(r.is_bijection());
    }

    #[test]
    fn example14_models_match_null_repairs() {
        let p = parse_problem("P(1;1,2). R(2;2,1). :- P(X,Y), R(Y,Z).").unwrap();
        let text = "{R_a(2,2,1,s), P_a(1,1,null,s)}\n{P_a(1,1,2,s), R_a(2,null,1,s)}";
        let r = verify_model_correspondence(&p.instance, &p.dcs, text, Semantics::Null).unwrap();
        assert!(r.is_bijection());
        assert_eq!(r.matched, alloc::vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn mismatches_are_reported() {
        let p = parse_problem("P(a). :- P(X), Q(X).").unwrap();
        let r = verify_model_correspondence(&p.instance, &p.dcs, "", Semantics::Tuple).unwrap();
        assert!(!r.is_bijection());
        assert_eq!((r.models, r.repairs), (0, 1));
        assert_eq!(r.unmatched_repairs, alloc::vec![0]);

        let (inst, dcs) = example3();
        let dup = "{S_a(6,a3,d)}\n{S_a(6,a3,d)}";
        let r = verify_model_correspondence(&inst, &dcs, dup, Semantics::Tuple).unwrap();
        assert_eq!(r.unmatched_models, alloc::vec![1]);
        assert_eq!(r.unmatched_repairs, alloc::vec![1, 2]);

        let bad = verify_model_correspondence(&inst, &dcs, "{S_a(x,a3,s)}", Semantics::Tuple).unwrap_err();
        assert!(matches!(bad, VerifyError::BadAtom { model: 0, .. }));
    }
}
