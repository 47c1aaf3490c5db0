//! Reader and writer for the CPLEX LP text format (the subset used by the
//! exported models: linear objective and rows, bounds, integrality sections).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// `(coefficient, variable)`.
pub type Term = (f64, String);

#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub name: Option<String>,
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpBound {
    pub variable: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub sense: Sense,
    pub objective_name: Option<String>,
    pub objective: Vec<Term>,
    pub constraints: Vec<LpConstraint>,
    pub bounds: Vec<LpBound>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

impl LpModel {
    /// Every variable named anywhere in the model.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        let terms = self
            .objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| c.terms.iter()));
        vars.extend(terms.map(|(_, v)| v.clone()));
        vars.extend(self.bounds.iter().map(|b| b.variable.clone()));
        vars.extend(self.binaries.iter().cloned());
        vars.extend(self.generals.iter().cloned());
        vars
    }
}

/// Longest physical line the writer emits before wrapping a row.
const WRAP: usize = 200;

pub(crate) fn write_terms(out: &mut String, terms: &[Term]) {
    let mut line_len = 0;
    for (i, (coef, var)) in terms.iter().enumerate() {
        let mut piece = String::new();
        let sign = if *coef < 0.0 { "-" } else { "+" };
        let mag = coef.abs();
        if i > 0 || *coef < 0.0 {
            piece.push_str(sign);
            piece.push(' ');
        }
        if mag != 1.0 {
            let _ = write!(piece, "{mag} ");
        }
        piece.push_str(var);
        if line_len + piece.len() > WRAP {
            out.push_str("\n   ");
            line_len = 3;
        } else if i > 0 {
            out.push(' ');
            line_len += 1;
        }
        line_len += piece.len();
        out.push_str(&piece);
    }
}

pub(crate) fn write_row(out: &mut String, name: &str, terms: &[Term], relation: Relation, rhs: f64) {
    let _ = write!(out, " {name}: ");
    write_terms(out, terms);
    let _ = writeln!(out, " {} {rhs}", relation.symbol());
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Plus,
    Minus,
    Colon,
    Rel(Relation),
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || "_!\"#$%&()/,;?@`'{}|~".contains(c)
}

fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit() || c == '.' || c == '[' || c == ']'
}

/// Tokens tagged with their 1-based source line.
fn tokenize(line_no: usize, text: &str, out: &mut Vec<(usize, Tok)>) -> Result<()> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '\\' {
            break;
        } else if c == '+' {
            out.push((line_no, Tok::Plus));
            i += 1;
        } else if c == '-' {
            out.push((line_no, Tok::Minus));
            i += 1;
        } else if c == ':' {
            out.push((line_no, Tok::Colon));
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut op = String::from(c);
            i += 1;
            if i < chars.len() && matches!(chars[i], '<' | '>' | '=') {
                op.push(chars[i]);
                i += 1;
            }
            let rel = match op.as_str() {
                "<" | "<=" | "=<" => Relation::Le,
                ">" | ">=" | "=>" => Relation::Ge,
                "=" => Relation::Eq,
                _ => return Err(Error::parse(line_no, format!("bad operator '{op}'"))),
            };
            out.push((line_no, Tok::Rel(rel)));
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v = lit
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad number '{lit}'")))?;
            out.push((line_no, Tok::Num(v)));
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let tok = match name.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Tok::Num(f64::INFINITY),
                _ => Tok::Ident(name),
            };
            out.push((line_no, tok));
        } else {
            return Err(Error::parse(line_no, format!("unexpected character '{c}'")));
        }
    }
    Ok(())
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    last_line: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(_, t)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |(l, _)| *l)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn optional_name(&mut self) -> Option<String> {
        if let (Some(Tok::Ident(name)), Some(Tok::Colon)) = (self.peek(), self.peek2()) {
            let name = name.clone();
            self.pos += 2;
            Some(name)
        } else {
            None
        }
    }

    /// Linear expression up to (not including) a relation or the next row name.
    fn expression(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        loop {
            match (self.peek(), self.peek2()) {
                (None, _) | (Some(Tok::Rel(_)), _) => break,
                (Some(Tok::Ident(_)), Some(Tok::Colon)) => break,
                _ => {}
            }
            let line = self.line();
            let mut sign = 1.0;
            let mut signed = false;
            while let Some(Tok::Plus | Tok::Minus) = self.peek() {
                if self.next() == Some(Tok::Minus) {
                    sign = -sign;
                }
                signed = true;
            }
            if !terms.is_empty() && !signed {
                return Err(Error::parse(line, "expected '+' or '-' between terms"));
            }
            let coef = match self.peek() {
                Some(Tok::Num(v)) => {
                    let v = *v;
                    self.pos += 1;
                    v
                }
                _ => 1.0,
            };
            match self.next() {
                Some(Tok::Ident(var)) => terms.push((sign * coef, var)),
                _ => return Err(Error::parse(line, "expected a variable name")),
            }
        }
        Ok(terms)
    }

    fn signed_number(&mut self) -> Result<f64> {
        let line = self.line();
        let mut sign = 1.0;
        while let Some(Tok::Plus | Tok::Minus) = self.peek() {
            if self.next() == Some(Tok::Minus) {
                sign = -sign;
            }
        }
        match self.next() {
            Some(Tok::Num(v)) => Ok(sign * v),
            _ => Err(Error::parse(line, "expected a number")),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_header(line: &str) -> Option<(Section, Option<Sense>)> {
    let l = line.trim().to_ascii_lowercase();
    let l = l.split_whitespace().collect::<Vec<_>>().join(" ");
    Some(match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, Some(Sense::Minimize)),
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, Some(Sense::Maximize)),
        "subject to" | "such that" | "st" | "s.t." => (Section::Constraints, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "binaries" | "binary" | "bin" => (Section::Binaries, None),
        "generals" | "general" | "gen" => (Section::Generals, None),
        "end" => (Section::End, None),
        _ => return None,
    })
}

fn parse_bound(line_no: usize, text: &str) -> Result<LpBound> {
    let mut toks = Vec::new();
    tokenize(line_no, text, &mut toks)?;
    let mut c = Cursor {
        toks,
        pos: 0,
        last_line: line_no,
    };
    let bad = || Error::parse(line_no, format!("unrecognised bound '{}'", text.trim()));
    if let (Some(Tok::Ident(v)), Some(Tok::Ident(kw))) = (c.peek(), c.peek2()) {
        if kw.eq_ignore_ascii_case("free") {
            return Ok(LpBound {
                variable: v.clone(),
                lower: Some(f64::NEG_INFINITY),
                upper: None,
            });
        }
    }
    let mut bound = LpBound {
        variable: String::new(),
        lower: None,
        upper: None,
    };
    // leading "num rel"
    if !matches!(c.peek(), Some(Tok::Ident(_))) {
        let v = c.signed_number()?;
        match c.next() {
            Some(Tok::Rel(Relation::Le)) => bound.lower = Some(v),
            Some(Tok::Rel(Relation::Ge)) => bound.upper = Some(v),
            _ => return Err(bad()),
        }
    }
    match c.next() {
        Some(Tok::Ident(v)) => bound.variable = v,
        _ => return Err(bad()),
    }
    if let Some(Tok::Rel(rel)) = c.next() {
        let v = c.signed_number()?;
        match rel {
            Relation::Le => bound.upper = Some(v),
            Relation::Ge => bound.lower = Some(v),
            Relation::Eq => {
                bound.lower = Some(v);
                bound.upper = Some(v);
            }
        }
    }
    if c.peek().is_some() {
        return Err(bad());
    }
    Ok(bound)
}

/// Parses LP text. Row and objective expressions may span lines; each bound
/// sits on its own line.
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut section = Section::Preamble;
    let mut sense = None;
    let mut obj_toks = Vec::new();
    let mut row_toks = Vec::new();
    let mut model = LpModel {
        sense: Sense::Minimize,
        objective_name: None,
        objective: Vec::new(),
        constraints: Vec::new(),
        bounds: Vec::new(),
        binaries: Vec::new(),
        generals: Vec::new(),
    };
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        last_line = ln;
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some((next, s)) = section_header(line) {
            if next == Section::Objective && sense.is_some() {
                return Err(Error::parse(ln, "second objective section"));
            }
            if s.is_some() {
                sense = s;
            }
            section = next;
            continue;
        }
        match section {
            Section::Preamble => return Err(Error::parse(ln, "expected an objective section")),
            Section::End => return Err(Error::parse(ln, "content after End")),
            Section::Objective => tokenize(ln, line, &mut obj_toks)?,
            Section::Constraints => tokenize(ln, line, &mut row_toks)?,
            Section::Bounds => model.bounds.push(parse_bound(ln, line)?),
            Section::Binaries => model.binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::Generals => model.generals.extend(line.split_whitespace().map(str::to_string)),
        }
    }
    if section != Section::End {
        return Err(Error::parse(last_line, "missing End"));
    }
    model.sense = sense.ok_or_else(|| Error::parse(0, "missing objective section"))?;

    let mut c = Cursor {
        toks: obj_toks,
        pos: 0,
        last_line,
    };
    model.objective_name = c.optional_name();
    model.objective = c.expression()?;
    if c.peek().is_some() {
        return Err(Error::parse(c.line(), "unexpected token in objective"));
    }

    let mut c = Cursor {
        toks: row_toks,
        pos: 0,
        last_line,
    };
    while c.peek().is_some() {
        let name = c.optional_name();
        let line = c.line();
        let terms = c.expression()?;
        if terms.is_empty() {
            return Err(Error::parse(line, "row without variables"));
        }
        let relation = match c.next() {
            Some(Tok::Rel(r)) => r,
            _ => return Err(Error::parse(line, "row without a relation")),
        };
        let rhs = c.signed_number()?;
        model.constraints.push(LpConstraint {
            name,
            terms,
            relation,
            rhs,
        });
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_small_model() {
        let text = "\\ toy\nMinimize\n obj: 2 x + 3.5 y - z\nSubject To\n c1: x + y\n   >= 1\n \
                    c2: - x + 1e1 z <= -2.5\n x - y = 0\nBounds\n 0 <= x <= 4\n y free\n z >= -1\n\
                    Binaries\n b1 b2\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.sense, Sense::Minimize);
        assert_eq!(m.objective_name.as_deref(), Some("obj"));
        assert_eq!(m.objective, vec![(2.0, "x".into()), (3.5, "y".into()), (-1.0, "z".into())]);
        assert_eq!(m.constraints.len(), 3);
        assert_eq!(m.constraints[0].rhs, 1.0);
        assert_eq!(m.constraints[1].terms, vec![(-1.0, "x".into()), (10.0, "z".into())]);
        assert_eq!(m.constraints[1].rhs, -2.5);
        assert_eq!(m.constraints[2].name, None);
        assert_eq!(m.constraints[2].relation, Relation::Eq);
        assert_eq!(m.bounds[0].lower, Some(0.0));
        assert_eq!(m.bounds[0].upper, Some(4.0));
        assert_eq!(m.bounds[1].lower, Some(f64::NEG_INFINITY));
        assert_eq!(m.binaries, vec!["b1", "b2"]);
        assert_eq!(m.variables().len(), 5);
    }

    #[test]
    fn writer_output_reparses() {
        let terms: Vec<Term> = (0..80).map(|i| (if i % 2 == 0 { 1.0 } else { -2.5 }, format!("var_{i}"))).collect();
        let mut text = String::from("Minimize\n obj: T\nSubject To\n");
        write_row(&mut text, "long", &terms, Relation::Ge, -3.0);
        text.push_str("End\n");
        assert!(text.lines().all(|l| l.len() <= WRAP + 20));
        let m = parse_lp(&text).unwrap();
        assert_eq!(m.constraints[0].terms, terms);
        assert_eq!(m.constraints[0].rhs, -3.0);
    }

    #[test]
    fn rejects_malformed_text() {
        for (text, line) in [
            ("Minimize\n obj: x\nSubject To\n c: x + \nEnd\n", 4),
            ("Minimize\n obj: x\nSubject To\n c: x y >= 1\nEnd\n", 4),
            ("Minimize\n obj: x\nSubject To\n c: x >= 1\n", 4),
            ("Minimize\n obj: x\nSubject To\n c: x ?? 1\nEnd\n", 4),
            ("x + y\nEnd\n", 1),
        ] {
            match parse_lp(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
