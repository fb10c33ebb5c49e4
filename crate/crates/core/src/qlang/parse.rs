use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{
    BodyAtom, BuiltinAtom, CompareOp, ConjunctiveBody, DenialConstraint, InclusionDependency, Problem, QuerySpec, Term,
};
use crate::relmodel::{Constant, Instance, ModelError, Tid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        expected: &'static str,
        found: String,
    },
    UnexpectedEof {
        expected: &'static str,
    },
    UnknownBuiltin(String),
    VariableInFact(String),
    NonVariableHead(String),
    TidOutsideFact,
    UnsafeVariable(String),
    ArityConflict {
        relation: String,
        expected: usize,
        found: usize,
    },
    QueryArityConflict(String),
    CrossTypeComparison(String),
    IntegerOverflow(String),
    Model(ModelError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnexpectedEof { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnknownBuiltin(op) => write!(f, "unknown builtin operator {op:?}"),
            ParseErrorKind::VariableInFact(v) => write!(f, "variable {v} in a fact"),
            ParseErrorKind::NonVariableHead(t) => {
                write!(f, "query head arguments must be variables, found {t}")
            }
            ParseErrorKind::TidOutsideFact => f.write_str("tuple identifiers are only allowed in facts"),
            ParseErrorKind::UnsafeVariable(v) => {
                write!(f, "unsafe rule: variable {v} does not occur in a body atom")
            }
            ParseErrorKind::ArityConflict {
                relation,
                expected,
                found,
            } => write!(f, "relation {relation} used with arity {found}, previously {expected}"),
            ParseErrorKind::QueryArityConflict(name) => {
                write!(f, "disjuncts of query {name} have different head arities")
            }
            ParseErrorKind::CrossTypeComparison(b) => {
                write!(f, "order comparison between constants of different types: {b}")
            }
            ParseErrorKind::IntegerOverflow(s) => write!(f, "integer out of range: {s}"),
            ParseErrorKind::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Question,
    If,
    Arrow,
    Op(CompareOp),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "{s:?}"),
            Tok::LParen => f.write_str("\"(\""),
            Tok::RParen => f.write_str("\")\""),
            Tok::Comma => f.write_str("\",\""),
            Tok::Semi => f.write_str("\";\""),
            Tok::Dot => f.write_str("\".\""),
            Tok::Question => f.write_str("\"?\""),
            Tok::If => f.write_str("\":-\""),
            Tok::Arrow => f.write_str("\"->\""),
            Tok::Op(op) => write!(f, "{:?}", op.symbol()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, kind: ParseErrorKind) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind,
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let next = chars.get(i + 1).copied();
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Int(chars[start..i].iter().collect()), pos));
            continue;
        }
        let (tok, len) = match (c, next) {
            (':', Some('-')) => (Tok::If, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('!', Some('=')) => (Tok::Op(CompareOp::Ne), 2),
            ('<', Some('=')) => (Tok::Op(CompareOp::Le), 2),
            ('>', Some('=')) => (Tok::Op(CompareOp::Ge), 2),
            ('<', Some('>')) | ('=', Some('=')) | ('=', Some('<')) | ('=', Some('>')) => {
                let op: String = [c, next.unwrap_or(' ')].iter().collect();
                return Err(err(pos, ParseErrorKind::UnknownBuiltin(op)));
            }
            ('=', _) => (Tok::Op(CompareOp::Eq), 1),
            ('<', _) => (Tok::Op(CompareOp::Lt), 1),
            ('>', _) => (Tok::Op(CompareOp::Gt), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            ('.', _) => (Tok::Dot, 1),
            ('?', _) => (Tok::Question, 1),
            ('!', _) | ('~', _) => return Err(err(pos, ParseErrorKind::UnknownBuiltin(c.to_string()))),
            _ => return Err(err(pos, ParseErrorKind::UnexpectedChar(c))),
        };
        advance(len, &mut i, &mut col);
        out.push((tok, pos));
    }
    Ok(out)
}

fn is_variable(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
}

struct FactDraft {
    relation: String,
    tid: Option<Tid>,
    values: Vec<Constant>,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    arities: BTreeMap<String, usize>,
}

/// An optional explicit tid and the positioned terms of an atom.
type Arguments = (Option<(Tid, Pos)>, Vec<(Term, Pos)>);

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.at + offset).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self, expected: &'static str) -> Result<(Tok, Pos), ParseError> {
        match self.toks.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.clone())
            }
            None => Err(err(self.end, ParseErrorKind::UnexpectedEof { expected })),
        }
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<Pos, ParseError> {
        let (tok, pos) = self.next(expected)?;
        if tok == want {
            Ok(pos)
        } else {
            Err(unexpected(pos, expected, &tok))
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<(String, Pos), ParseError> {
        match self.next(expected)? {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (tok, pos) => Err(unexpected(pos, expected, &tok)),
        }
    }

    fn record_arity(&mut self, relation: &str, arity: usize, pos: Pos) -> Result<(), ParseError> {
        match self.arities.get(relation) {
            Some(&a) if a != arity => Err(err(
                pos,
                ParseErrorKind::ArityConflict {
                    relation: relation.into(),
                    expected: a,
                    found: arity,
                },
            )),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(relation.into(), arity);
                Ok(())
            }
        }
    }

    fn term(&mut self) -> Result<(Term, Pos), ParseError> {
        match self.next("a term")? {
            (Tok::Ident(s), pos) if s == "null" => Ok((Term::Const(Constant::Null), pos)),
            (Tok::Ident(s), pos) if is_variable(&s) => Ok((Term::Var(s), pos)),
            (Tok::Ident(s), pos) => Ok((Term::Const(Constant::Symbol(s)), pos)),
            (Tok::Int(s), pos) => Ok((Term::Const(Constant::Integer(int(&s, pos)?)), pos)),
            (tok, pos) => Err(unexpected(pos, "a term", &tok)),
        }
    }

    /// `"(" [INT ";"] term {"," term} ")"`, after the relation name.
    fn arguments(&mut self) -> Result<Arguments, ParseError> {
        self.expect(Tok::LParen, "\"(\"")?;
        let mut tid = None;
        if let (Some(Tok::Int(s)), Some(Tok::Semi)) = (self.peek(), self.peek_at(1)) {
            let s = s.clone();
            let pos = self.pos();
            let value = int(&s, pos)?;
            if value <= 0 {
                return Err(err(pos, ParseErrorKind::Model(ModelError::ZeroTid)));
            }
            tid = Some((Tid(value as u64), pos));
            self.at += 2;
        }
        let mut terms = Vec::new();
        if self.peek() == Some(&Tok::RParen) && tid.is_none() {
            self.at += 1;
            return Ok((tid, terms));
        }
        loop {
            terms.push(self.term()?);
            match self.next("\",\" or \")\"")? {
                (Tok::Comma, _) => continue,
                (Tok::RParen, _) => break,
                (tok, pos) => return Err(unexpected(pos, "\",\" or \")\"", &tok)),
            }
        }
        Ok((tid, terms))
    }

    fn atom_from(&mut self, relation: String, pos: Pos) -> Result<BodyAtom, ParseError> {
        let (tid, terms) = self.arguments()?;
        if let Some((_, p)) = tid {
            return Err(err(p, ParseErrorKind::TidOutsideFact));
        }
        self.record_arity(&relation, terms.len(), pos)?;
        Ok(BodyAtom::new(relation, terms.into_iter().map(|(t, _)| t).collect()))
    }

    /// Literals up to (and consuming) the terminator.
    fn body(&mut self, terminator: Tok, expected: &'static str) -> Result<ConjunctiveBody, ParseError> {
        let mut atoms = Vec::new();
        let mut builtins: Vec<(BuiltinAtom, Pos)> = Vec::new();
        let mut var_pos: BTreeMap<String, Pos> = BTreeMap::new();
        loop {
            let start = self.pos();
            let is_atom = matches!((self.peek(), self.peek_at(1)), (Some(Tok::Ident(_)), Some(Tok::LParen)));
            if is_atom {
                let (name, pos) = self.ident("an atom")?;
                atoms.push(self.atom_from(name, pos)?);
            } else {
                let (left, lp) = self.term()?;
                let op = match self.next("a comparison operator")? {
                    (Tok::Op(op), _) => op,
                    (Tok::Ident(s), p) | (Tok::Int(s), p) => return Err(err(p, ParseErrorKind::UnknownBuiltin(s))),
                    (tok, p) => return Err(unexpected(p, "a comparison operator", &tok)),
                };
                let (right, rp) = self.term()?;
                for (t, p) in [(&left, lp), (&right, rp)] {
                    if let Term::Var(v) = t {
                        var_pos.entry(v.clone()).or_insert(p);
                    }
                }
                let b = BuiltinAtom { op, left, right };
                check_constant_builtin(&b, start)?;
                builtins.push((b, start));
            }
            match self.next(expected)? {
                (Tok::Comma, _) => continue,
                (tok, _) if tok == terminator => break,
                (tok, pos) => return Err(unexpected(pos, expected, &tok)),
            }
        }
        let body = ConjunctiveBody::new(atoms, builtins.into_iter().map(|(b, _)| b).collect());
        if body.atoms.is_empty() {
            return Err(err(
                self.pos(),
                ParseErrorKind::UnexpectedToken {
                    expected: "at least one body atom",
                    found: String::from("only built-ins"),
                },
            ));
        }
        let bound = body.variables();
        for (v, p) in var_pos {
            if !bound.contains(&v.as_str()) {
                return Err(err(p, ParseErrorKind::UnsafeVariable(v)));
            }
        }
        Ok(body)
    }
}

fn check_constant_builtin(b: &BuiltinAtom, pos: Pos) -> Result<(), ParseError> {
    if let (Term::Const(l), Term::Const(r)) = (&b.left, &b.right) {
        let cross = matches!(
            (l, r),
            (Constant::Symbol(_), Constant::Integer(_)) | (Constant::Integer(_), Constant::Symbol(_))
        );
        if cross && b.op.is_order() {
            return Err(err(pos, ParseErrorKind::CrossTypeComparison(b.to_string())));
        }
    }
    Ok(())
}

fn int(s: &str, pos: Pos) -> Result<i64, ParseError> {
    s.parse()
        .map_err(|_| err(pos, ParseErrorKind::IntegerOverflow(s.into())))
}

fn unexpected(pos: Pos, expected: &'static str, found: &Tok) -> ParseError {
    err(
        pos,
        ParseErrorKind::UnexpectedToken {
            expected,
            found: found.to_string(),
        },
    )
}

/// Parses a problem file. Facts with explicit tids are placed first; facts
/// without one then receive the smallest unused tids in input order.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let toks = tokenize(text)?;
    let end = {
        let lines = text.split('\n').count();
        let last = text.rsplit('\n').next().unwrap_or("");
        Pos {
            line: lines.max(1),
            column: last.chars().count() + 1,
        }
    };
    let mut p = Parser {
        toks,
        at: 0,
        end,
        arities: BTreeMap::new(),
    };
    let mut facts = Vec::new();
    let mut dcs = Vec::new();
    let mut queries: Vec<QuerySpec> = Vec::new();
    let mut ids = Vec::new();

    while p.peek().is_some() {
        if p.peek() == Some(&Tok::If) {
            p.at += 1;
            dcs.push(DenialConstraint::new(p.body(Tok::Dot, "\",\" or \".\"")?));
            continue;
        }
        let (name, name_pos) = p.ident("a fact, rule or query")?;
        let args = if p.peek() == Some(&Tok::LParen) {
            Some(p.arguments()?)
        } else {
            None
        };
        match p.peek() {
            Some(Tok::If) => {
                p.at += 1;
                let mut head = Vec::new();
                if let Some((tid, terms)) = args {
                    if let Some((_, tp)) = tid {
                        return Err(err(tp, ParseErrorKind::TidOutsideFact));
                    }
                    for (t, tp) in terms {
                        match t {
                            Term::Var(v) => head.push(v),
                            other => return Err(err(tp, ParseErrorKind::NonVariableHead(other.to_string()))),
                        }
                    }
                }
                let body = p.body(Tok::Question, "\",\" or \"?\"")?;
                let bound = body.variables();
                if let Some(v) = head.iter().find(|v| !bound.contains(&v.as_str())) {
                    return Err(err(name_pos, ParseErrorKind::UnsafeVariable(v.clone())));
                }
                match queries.iter_mut().find(|q| q.name == name) {
                    Some(q) if q.head.len() != head.len() => {
                        return Err(err(name_pos, ParseErrorKind::QueryArityConflict(name)))
                    }
                    Some(q) => q.disjuncts.push(body),
                    None => queries.push(QuerySpec {
                        name,
                        head,
                        disjuncts: alloc::vec![body],
                    }),
                }
            }
            Some(Tok::Arrow) => {
                let Some((tid, terms)) = args else {
                    let (tok, pos) = p.next("\"(\"")?;
                    return Err(unexpected(pos, "\"(\"", &tok));
                };
                if let Some((_, tp)) = tid {
                    return Err(err(tp, ParseErrorKind::TidOutsideFact));
                }
                p.record_arity(&name, terms.len(), name_pos)?;
                let premise = BodyAtom::new(name, terms.into_iter().map(|(t, _)| t).collect());
                p.at += 1;
                let (cname, cpos) = p.ident("a relation name")?;
                let conclusion = p.atom_from(cname, cpos)?;
                p.expect(Tok::Dot, "\".\"")?;
                ids.push(InclusionDependency::new(premise, conclusion));
            }
            _ => {
                let Some((tid, terms)) = args else {
                    let (tok, pos) = p.next("\"(\" or \":-\"")?;
                    return Err(unexpected(pos, "\"(\" or \":-\"", &tok));
                };
                let mut values = Vec::with_capacity(terms.len());
                for (t, tp) in terms {
                    match t {
                        Term::Const(c) => values.push(c),
                        Term::Var(v) => return Err(err(tp, ParseErrorKind::VariableInFact(v))),
                    }
                }
                if values.is_empty() {
                    let (tok, pos) = (Tok::RParen, p.toks[p.at - 1].1);
                    return Err(unexpected(pos, "a constant", &tok));
                }
                p.record_arity(&name, values.len(), name_pos)?;
                p.expect(Tok::Dot, "\".\"")?;
                facts.push(FactDraft {
                    relation: name,
                    tid: tid.map(|(t, _)| t),
                    values,
                    pos: name_pos,
                });
            }
        }
    }

    let mut instance = Instance::new();
    for (rel, arity) in &p.arities {
        instance
            .declare(rel, *arity)
            .map_err(|e| err(end, ParseErrorKind::Model(e)))?;
    }
    let (explicit, auto): (Vec<_>, Vec<_>) = facts.into_iter().partition(|f| f.tid.is_some());
    for f in explicit.into_iter().chain(auto) {
        instance
            .add_fact(&f.relation, f.tid, f.values)
            .map_err(|e| err(f.pos, ParseErrorKind::Model(e)))?;
    }
    Ok(Problem {
        instance,
        dcs,
        queries,
        ids,
    })
}
