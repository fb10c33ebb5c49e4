//! Equivalence of DLV program texts up to whitespace, comments, statement
//! order, literal order and consistent renaming of variables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Tok {
    Word(String),
    Var(String),
    Punct(String),
}

impl Tok {
    fn text(&self) -> &str {
        match self {
            Tok::Word(s) | Tok::Var(s) | Tok::Punct(s) => s,
        }
    }

    fn shape(&self) -> &str {
        match self {
            Tok::Var(_) => "?",
            other => other.text(),
        }
    }
}

fn tokenize(text: &str) -> Vec<Tok> {
    let chars: Vec<char> = text.chars().collect();
    let mut raw: Vec<(String, bool)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '#' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            raw.push((chars[start..i].iter().collect(), true));
        } else if c == '"' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            i = (i + 1).min(chars.len());
            raw.push((chars[start..i].iter().collect(), true));
        } else {
            let pair: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if [":-", ":~", "!=", "<=", ">=", "<>", "=="].contains(&pair.as_str()) {
                raw.push((pair, false));
                i += 2;
            } else {
                raw.push((c.into(), false));
                i += 1;
            }
        }
    }
    (0..raw.len())
        .map(|k| {
            let (text, word) = &raw[k];
            let called = raw.get(k + 1).is_some_and(|(t, _)| t == "(");
            let variable = *word && !called && text.starts_with(|c: char| c.is_ascii_uppercase() || c == '_');
            if variable {
                Tok::Var(text.clone())
            } else if *word {
                Tok::Word(text.clone())
            } else {
                Tok::Punct(text.clone())
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Part {
    Head,
    Body,
}

#[derive(Clone, Debug)]
struct Statement {
    weak: bool,
    literals: Vec<(Part, Vec<Tok>)>,
    shape: Vec<(Part, String)>,
    text: String,
}

fn split_top_level(toks: &[Tok], at: impl Fn(&Tok) -> bool) -> Vec<Vec<Tok>> {
    let mut out = alloc::vec![Vec::new()];
    let mut depth = 0i32;
    for t in toks {
        match t.text() {
            "(" | "{" | "[" => depth += 1,
            ")" | "}" | "]" => depth -= 1,
            _ => {}
        }
        if depth == 0 && at(t) {
            out.push(Vec::new());
        } else {
            out.last_mut().expect("never empty").push(t.clone());
        }
    }
    out.retain(|l| !l.is_empty());
    out
}

fn render(toks: &[Tok]) -> String {
    let mut s = String::new();
    for (i, t) in toks.iter().enumerate() {
        let spaced = matches!(t.text(), ":-" | ":~" | "v");
        let after_word = i > 0 && !matches!(toks[i - 1], Tok::Punct(_)) && !matches!(t, Tok::Punct(_));
        if i > 0 && (spaced || after_word || matches!(toks[i - 1].text(), ":-" | ":~" | "v" | ",")) {
            s.push(' ');
        }
        s.push_str(t.text());
    }
    s
}

fn statements(text: &str) -> Vec<Statement> {
    let toks = tokenize(text);
    split_top_level(&toks, |t| t.text() == ".")
        .into_iter()
        .map(|st| {
            let text = alloc::format!("{}.", render(&st));
            let weak = st.first().is_some_and(|t| t.text() == ":~");
            let mut literals = Vec::new();
            if weak {
                for l in split_top_level(&st[1..], |t| t.text() == ",") {
                    literals.push((Part::Body, l));
                }
            } else {
                let neck = st.iter().position(|t| t.text() == ":-").unwrap_or(st.len());
                for l in split_top_level(&st[..neck], |t| matches!(t.text(), "v" | "|")) {
                    literals.push((Part::Head, l));
                }
                if neck < st.len() {
                    for l in split_top_level(&st[neck + 1..], |t| t.text() == ",") {
                        literals.push((Part::Body, l));
                    }
                }
            }
            let mut shape: Vec<(Part, String)> = literals
                .iter()
                .map(|(p, l)| (*p, l.iter().map(Tok::shape).collect::<Vec<_>>().join(" ")))
                .collect();
            shape.sort();
            Statement {
                weak,
                literals,
                shape,
                text,
            }
        })
        .collect()
}

#[derive(Clone, Default)]
struct Renaming {
    forward: BTreeMap<String, String>,
    backward: BTreeMap<String, String>,
}

impl Renaming {
    fn unify(&self, a: &[Tok], b: &[Tok]) -> Option<Renaming> {
        if a.len() != b.len() {
            return None;
        }
        let mut next = self.clone();
        for (x, y) in a.iter().zip(b) {
            match (x, y) {
                (Tok::Var(u), Tok::Var(v)) => {
                    let f = next.forward.get(u);
                    let g = next.backward.get(v);
                    match (f, g) {
                        (None, None) => {
                            next.forward.insert(u.clone(), v.clone());
                            next.backward.insert(v.clone(), u.clone());
                        }
                        (Some(f), Some(_)) if f == v => {}
                        _ => return None,
                    }
                }
                _ if x == y => {}
                _ => return None,
            }
        }
        Some(next)
    }
}

fn match_literals(a: &[(Part, Vec<Tok>)], b: &[(Part, Vec<Tok>)], used: &mut [bool], map: &Renaming) -> bool {
    let Some(((part, lit), rest)) = a.split_first() else {
        return true;
    };
    for j in 0..b.len() {
        if used[j] || b[j].0 != *part {
            continue;
        }
        if let Some(extended) = map.unify(lit, &b[j].1) {
            used[j] = true;
            if match_literals(rest, b, used, &extended) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

fn alpha_equivalent(a: &Statement, b: &Statement) -> bool {
    a.weak == b.weak
        && a.shape == b.shape
        && match_literals(
            &a.literals,
            &b.literals,
            &mut alloc::vec![false; b.literals.len()],
            &Renaming::default(),
        )
}

/// Statements present on one side only, in whitespace-collapsed form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgramDiff {
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
}

impl ProgramDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

/// Matches the statements of `expected` one-to-one against `actual`.
/// Statement order, body literal order, disjunct order, whitespace, `%`
/// comments and a consistent renaming of variables are all ignored.
pub fn compare_programs(expected: &str, actual: &str) -> ProgramDiff {
    let exp = statements(expected);
    let act = statements(actual);
    let mut taken = alloc::vec![false; act.len()];
    let mut diff = ProgramDiff::default();
    for e in &exp {
        match (0..act.len()).find(|&j| !taken[j] && alpha_equivalent(e, &act[j])) {
            Some(j) => taken[j] = true,
            None => diff.missing.push(e.text.clone()),
        }
    }
    diff.unexpected = act
        .iter()
        .zip(&taken)
        .filter(|(_, t)| !**t)
        .map(|(s, _)| s.text.clone())
        .collect();
    diff
}

pub fn programs_equivalent(a: &str, b: &str) -> bool {
    compare_programs(a, b).is_empty()
}
