//! Minimal reader for the CPLEX-LP subset: objective (linear plus one
//! `[ ... ] / 2` block), named rows, bounds, generals and binaries.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Default)]
pub struct LpFile {
    pub linear: BTreeMap<String, f64>,
    /// Coefficient of `v^2` after applying the `/ 2`.
    pub quadratic: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub generals: BTreeSet<String>,
    pub binaries: BTreeSet<String>,
}

impl LpFile {
    /// Every variable mentioned anywhere.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut v: BTreeSet<String> = self.linear.keys().cloned().collect();
        v.extend(self.quadratic.keys().cloned());
        for r in &self.rows {
            v.extend(r.terms.iter().map(|(n, _)| n.clone()));
        }
        v.extend(self.bounds.keys().cloned());
        v.extend(self.generals.iter().cloned());
        v.extend(self.binaries.iter().cloned());
        v
    }

    pub fn continuous(&self) -> BTreeSet<String> {
        self.variables()
            .into_iter()
            .filter(|v| !self.generals.contains(v) && !self.binaries.contains(v))
            .collect()
    }

    pub fn rows_with_prefix(&self, prefix: &str) -> usize {
        self.rows
            .iter()
            .filter(|r| r.name.strip_prefix(prefix).is_some_and(|rest| rest.starts_with(|c: char| c.is_ascii_digit())))
            .count()
    }

    pub fn objective_value(&self, point: &BTreeMap<String, f64>) -> f64 {
        let get = |v: &String| point.get(v).copied().unwrap_or(0.0);
        self.linear.iter().map(|(v, c)| c * get(v)).sum::<f64>()
            + self.quadratic.iter().map(|(v, c)| c * get(v) * get(v)).sum::<f64>()
    }

    pub fn satisfied(&self, point: &BTreeMap<String, f64>, tol: f64) -> bool {
        let get = |v: &String| point.get(v).copied().unwrap_or(0.0);
        let rows_ok = self.rows.iter().all(|r| {
            let lhs: f64 = r.terms.iter().map(|(v, c)| c * get(v)).sum();
            match r.sense {
                Sense::Le => lhs <= r.rhs + tol,
                Sense::Ge => lhs >= r.rhs - tol,
                Sense::Eq => (lhs - r.rhs).abs() <= tol,
            }
        });
        let bounds_ok = self
            .bounds
            .iter()
            .all(|(v, &(lo, hi))| get(v) >= lo - tol && get(v) <= hi + tol);
        let binaries_ok = self.binaries.iter().all(|v| get(v) == 0.0 || get(v) == 1.0);
        rows_ok && bounds_ok && binaries_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(String),
    Plus,
    Minus,
    Open,
    Close,
    Slash,
    Caret,
    Rel(Sense),
}

fn tokenize(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '[' => {
                out.push(Tok::Open);
                i += 1
            }
            ']' => {
                out.push(Tok::Close);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '<' | '>' | '=' => {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                    j += 1;
                }
                let op: String = chars[i..j].iter().collect();
                out.push(Tok::Rel(match op.as_str() {
                    "<=" | "=<" | "<" => Sense::Le,
                    ">=" | "=>" | ">" => Sense::Ge,
                    "=" => Sense::Eq,
                    other => panic!("bad operator {other}"),
                }));
                i = j;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_digit()
                        || chars[j] == '.'
                        || ((chars[j] == 'e' || chars[j] == 'E') && j + 1 < chars.len())
                        || ((chars[j] == '-' || chars[j] == '+') && matches!(chars[j - 1], 'e' | 'E')))
                {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(Tok::Num(s.parse().unwrap_or_else(|_| panic!("bad number {s}"))));
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                out.push(Tok::Var(chars[i..j].iter().collect()));
                i = j;
            }
            other => panic!("unexpected character {other:?}"),
        }
    }
    out
}

/// Parses `[+|-] [coef] var ...` linear terms, plus an optional quadratic block.
fn expression(toks: &[Tok]) -> (Vec<(String, f64)>, Vec<(String, f64)>) {
    let mut linear = Vec::new();
    let mut quad = Vec::new();
    let mut i = 0;
    let mut in_quad = false;
    let mut sign = 1.0;
    let mut coef = 1.0;
    while i < toks.len() {
        match &toks[i] {
            Tok::Plus => {}
            Tok::Minus => sign = -sign,
            Tok::Num(v) => coef *= v,
            Tok::Open => in_quad = true,
            Tok::Close => {
                in_quad = false;
                assert_eq!(toks.get(i + 1), Some(&Tok::Slash), "quadratic block must end with / 2");
                assert_eq!(toks.get(i + 2), Some(&Tok::Num(2.0)));
                i += 2;
            }
            Tok::Var(name) => {
                if toks.get(i + 1) == Some(&Tok::Caret) {
                    assert!(in_quad);
                    assert_eq!(toks.get(i + 2), Some(&Tok::Num(2.0)));
                    quad.push((name.clone(), sign * coef / 2.0));
                    i += 2;
                } else {
                    linear.push((name.clone(), sign * coef));
                }
                sign = 1.0;
                coef = 1.0;
            }
            other => panic!("unexpected token {other:?}"),
        }
        i += 1;
    }
    (linear, quad)
}

/// Splits a section into `name: body` pieces.
fn labelled(text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once(':') {
            Some((name, rest)) if !name.contains(' ') => out.push((name.to_string(), rest.to_string())),
            _ => {
                let last = out.last_mut().expect("continuation before first row");
                last.1.push(' ');
                last.1.push_str(line);
            }
        }
    }
    out
}

pub fn parse(text: &str) -> LpFile {
    let mut sections: BTreeMap<&str, String> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for raw in text.lines() {
        let line = raw.split('\\').next().unwrap_or("");
        let key = match line.trim().to_ascii_lowercase().as_str() {
            "minimize" | "minimum" | "min" => Some("obj"),
            "subject to" | "such that" | "st" | "s.t." => Some("rows"),
            "bounds" | "bound" => Some("bounds"),
            "generals" | "general" | "gen" => Some("generals"),
            "binaries" | "binary" | "bin" => Some("binaries"),
            "end" => Some("end"),
            _ => None,
        };
        if let Some(k) = key {
            current = Some(k);
            sections.entry(k).or_default();
            continue;
        }
        if let Some(k) = current {
            let s = sections.get_mut(k).unwrap();
            s.push_str(line);
            s.push('\n');
        }
    }
    let mut lp = LpFile::default();

    let obj = labelled(sections.get("obj").map(String::as_str).unwrap_or(""));
    assert!(obj.len() <= 1, "one objective expected");
    if let Some((_, body)) = obj.first() {
        let (lin, quad) = expression(&tokenize(body));
        for (v, c) in lin {
            *lp.linear.entry(v).or_default() += c;
        }
        for (v, c) in quad {
            *lp.quadratic.entry(v).or_default() += c;
        }
    }

    for (name, body) in labelled(sections.get("rows").map(String::as_str).unwrap_or("")) {
        let toks = tokenize(&body);
        let pos = toks
            .iter()
            .position(|t| matches!(t, Tok::Rel(_)))
            .unwrap_or_else(|| panic!("row {name} has no relation"));
        let Tok::Rel(sense) = toks[pos] else { unreachable!() };
        let (terms, quad) = expression(&toks[..pos]);
        assert!(quad.is_empty(), "quadratic row {name}");
        let rhs = match &toks[pos + 1..] {
            [Tok::Num(v)] => *v,
            [Tok::Minus, Tok::Num(v)] => -v,
            other => panic!("row {name}: bad right-hand side {other:?}"),
        };
        lp.rows.push(Row { name, terms, sense, rhs });
    }

    for line in sections.get("bounds").map(String::as_str).unwrap_or("").lines() {
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let value = |t: &[Tok]| match t {
            [Tok::Num(v)] => *v,
            [Tok::Minus, Tok::Num(v)] => -v,
            other => panic!("bad bound value {other:?}"),
        };
        let rels: Vec<usize> = toks
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, Tok::Rel(_)))
            .map(|(i, _)| i)
            .collect();
        match rels.as_slice() {
            [a, b] => {
                let Tok::Var(v) = &toks[a + 1] else { panic!("bad bound {line}") };
                lp.bounds.insert(v.clone(), (value(&toks[..*a]), value(&toks[b + 1..])));
            }
            [a] => {
                let Tok::Var(v) = &toks[0] else { panic!("bad bound {line}") };
                let x = value(&toks[a + 1..]);
                let entry = lp.bounds.entry(v.clone()).or_insert((0.0, f64::INFINITY));
                match toks[*a] {
                    Tok::Rel(Sense::Ge) => entry.0 = x,
                    Tok::Rel(Sense::Le) => entry.1 = x,
                    _ => *entry = (x, x),
                }
            }
            _ => panic!("bad bound {line}"),
        }
    }
    for (key, set) in [("generals", &mut lp.generals), ("binaries", &mut lp.binaries)] {
        for t in tokenize(sections.get(key).map(String::as_str).unwrap_or("")) {
            let Tok::Var(v) = t else { panic!("bad {key} entry") };
            set.insert(v);
        }
    }
    assert!(sections.contains_key("end"), "missing End");
    lp
}
