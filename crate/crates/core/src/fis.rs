//! Text formats: rule-base documents, observation files and the CSV report.
//!
//! A rule-base document is line oriented:
//!
//! ```text
//! [System]
//! Name='demo'
//! NumInputs=1
//! NumOutputs=1
//! NumRules=2
//!
//! [Input1]
//! Name='x'
//! Range=[0 10]
//! NumMFs=2
//! MF1='A1':'trimf',[0 1 2]|[0 1 0]
//! MF2='A2':'trimf',[8 9 10]|[0 1 0]
//!
//! [Output1]
//! Name='y'
//! Range=[20 30]
//! MF1='B1':'trimf',[20 21 22]|[0 1 0]
//! MF2='B2':'trimf',[28 29 30]|[0 1 0]
//!
//! [Rules]
//! 1, 1 (1) : 1
//! 2, 2 (1) : 1
//! ```
//!
//! `#` starts a comment. The membership vector after `|` must match the
//! canonical one of the shape code; `pwlmf` takes any equal-length pair of
//! vectors. Observation files hold one `OBS<k>=` line per input dimension in
//! the same MF syntax.

use crate::fuzzy::{Breakpoint, FuzzyError, FuzzySet};
use crate::rulebase::{LinguisticPartition, Observation, Rule, RuleBase};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FisError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("line {line}: {params} parameters but {paramsy} membership values")]
    ParamsyLengthMismatch { line: usize, params: usize, paramsy: usize },
    #[error("line {line}: membership values do not match shape '{shape}'")]
    ParamsyShapeMismatch { line: usize, shape: String },
    #[error("line {line}: unknown shape code '{code}'")]
    UnknownShapeCode { line: usize, code: String },
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("section [{section}] lacks key '{key}'")]
    MissingKey { section: String, key: String },
    #[error("line {line}: don't-care term index 0 is not supported")]
    DontCareUnsupported { line: usize },
    #[error("{what} {missing} is missing")]
    IndexGap { what: String, missing: usize },
    #[error("{key} declares {declared} but {found} were given")]
    CountMismatch { key: String, declared: usize, found: usize },
    #[error("observation line OBS{missing} is missing")]
    DimensionGap { missing: usize },
    #[error("rule {rule} refers to term {term} of a partition with {size} terms")]
    TermIndex { rule: usize, term: usize, size: usize },
    #[error("line {line}: {source}")]
    InvalidSet { line: usize, source: FuzzyError },
}

impl FisError {
    pub fn code(&self) -> &'static str {
        match self {
            FisError::SyntaxError { .. } => "SyntaxError",
            FisError::ParamsyLengthMismatch { .. } => "ParamsyLengthMismatch",
            FisError::ParamsyShapeMismatch { .. } => "ParamsyShapeMismatch",
            FisError::UnknownShapeCode { .. } => "UnknownShapeCode",
            FisError::MissingSection(_) => "MissingSection",
            FisError::MissingKey { .. } => "MissingKey",
            FisError::DontCareUnsupported { .. } => "DontCareUnsupported",
            FisError::IndexGap { .. } => "IndexGap",
            FisError::CountMismatch { .. } => "CountMismatch",
            FisError::DimensionGap { .. } => "DimensionGap",
            FisError::TermIndex { .. } => "TermIndex",
            FisError::InvalidSet { .. } => "InvalidSet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeCode {
    Trimf,
    Trapmf,
    Singlmf,
    Pwlmf,
}

impl ShapeCode {
    pub fn token(self) -> &'static str {
        match self {
            ShapeCode::Trimf => "trimf",
            ShapeCode::Trapmf => "trapmf",
            ShapeCode::Singlmf => "singlmf",
            ShapeCode::Pwlmf => "pwlmf",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [ShapeCode::Trimf, ShapeCode::Trapmf, ShapeCode::Singlmf, ShapeCode::Pwlmf]
            .into_iter()
            .find(|c| c.token() == s)
    }

    /// Membership vector fixed by the shape, if any.
    pub fn canonical_paramsy(self) -> Option<&'static [f64]> {
        match self {
            ShapeCode::Trimf => Some(&[0.0, 1.0, 0.0]),
            ShapeCode::Trapmf => Some(&[0.0, 1.0, 1.0, 0.0]),
            ShapeCode::Singlmf => Some(&[1.0]),
            ShapeCode::Pwlmf => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipFunction {
    pub label: String,
    pub shape: ShapeCode,
    pub params: Vec<f64>,
    pub paramsy: Vec<f64>,
}

impl MembershipFunction {
    pub fn to_set(&self) -> Result<FuzzySet, FuzzyError> {
        let pts = self.params.iter().zip(&self.paramsy).map(|(x, y)| Breakpoint::new(*x, *y)).collect();
        FuzzySet::new(pts, self.label.clone())
    }

    /// Picks the most specific shape code that describes `set`.
    pub fn from_set(set: &FuzzySet) -> Self {
        let params: Vec<f64> = set.points().iter().map(|p| p.x).collect();
        let paramsy: Vec<f64> = set.points().iter().map(|p| p.mu).collect();
        let shape = [ShapeCode::Trimf, ShapeCode::Trapmf, ShapeCode::Singlmf]
            .into_iter()
            .find(|c| c.canonical_paramsy() == Some(paramsy.as_slice()))
            .unwrap_or(ShapeCode::Pwlmf);
        Self { label: set.label().to_string(), shape, params, paramsy }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub name: String,
    pub range: (f64, f64),
    pub mfs: Vec<MembershipFunction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleDoc {
    /// 1-based term index per input.
    pub antecedents: Vec<usize>,
    /// 1-based output term index.
    pub consequent: usize,
    pub weight: f64,
    pub connective: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleBaseDocument {
    pub name: String,
    pub default_method: Option<String>,
    pub inputs: Vec<PartitionDoc>,
    pub output: PartitionDoc,
    pub rules: Vec<RuleDoc>,
    /// Text the document was parsed from, if any.
    #[serde(skip)]
    pub source_text: Option<String>,
}

impl PartialEq for RuleBaseDocument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.default_method == other.default_method
            && self.inputs == other.inputs
            && self.output == other.output
            && self.rules == other.rules
    }
}

impl RuleBaseDocument {
    pub fn to_rulebase(&self) -> Result<RuleBase, FisError> {
        let partition = |p: &PartitionDoc| -> Result<LinguisticPartition, FisError> {
            let terms = p
                .mfs
                .iter()
                .map(|m| m.to_set().map_err(|source| FisError::InvalidSet { line: 0, source }))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LinguisticPartition::new(p.name.clone(), p.range, terms))
        };
        let inputs = self.inputs.iter().map(partition).collect::<Result<Vec<_>, _>>()?;
        let output = partition(&self.output)?;
        let mut rules = Vec::with_capacity(self.rules.len());
        for (i, r) in self.rules.iter().enumerate() {
            if r.antecedents.len() != inputs.len() {
                return Err(FisError::CountMismatch {
                    key: format!("rule {}", i + 1),
                    declared: inputs.len(),
                    found: r.antecedents.len(),
                });
            }
            let check = |term: usize, size: usize| {
                if term == 0 || term > size {
                    Err(FisError::TermIndex { rule: i + 1, term, size })
                } else {
                    Ok(term - 1)
                }
            };
            let ante = r
                .antecedents
                .iter()
                .zip(&inputs)
                .map(|(t, p)| check(*t, p.terms.len()))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rule = Rule::new(ante, check(r.consequent, output.terms.len())?);
            rule.weight = r.weight;
            rules.push(rule);
        }
        Ok(RuleBase { inputs, output, rules })
    }

    pub fn from_rulebase(name: impl Into<String>, rb: &RuleBase) -> Self {
        let partition = |p: &LinguisticPartition| PartitionDoc {
            name: p.name.clone(),
            range: p.range,
            mfs: p.terms.iter().map(MembershipFunction::from_set).collect(),
        };
        Self {
            name: name.into(),
            default_method: None,
            inputs: rb.inputs.iter().map(partition).collect(),
            output: partition(&rb.output),
            rules: rb
                .rules
                .iter()
                .map(|r| RuleDoc {
                    antecedents: r.antecedents.iter().map(|a| a + 1).collect(),
                    consequent: r.consequent + 1,
                    weight: r.weight,
                    connective: 1,
                })
                .collect(),
            source_text: None,
        }
    }
}

/// Character cursor over one line, tracking the column for error reports.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Self { text, pos: 0, line }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn error(&self, msg: impl Into<String>) -> FisError {
        FisError::SyntaxError { line: self.line, col: self.col(), msg: msg.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FisError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn expect_end(&mut self) -> Result<(), FisError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing text"))
        }
    }

    /// Single-quoted string; `''` stands for a literal quote.
    fn quoted(&mut self) -> Result<String, FisError> {
        self.expect('\'')?;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated string")),
                Some('\'') => {
                    self.pos += 1;
                    if self.peek() == Some('\'') {
                        self.pos += 1;
                        out.push('\'');
                    } else {
                        return Ok(out);
                    }
                }
                Some(c) => {
                    self.pos += c.len_utf8();
                    out.push(c);
                }
            }
        }
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, ']' | '[' | ',' | '(' | ')' | ':' | '|' | '=' | '\'') {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.text[start..self.pos]
    }

    fn number(&mut self) -> Result<f64, FisError> {
        self.skip_ws();
        let at = self.col();
        let tok = self.token();
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(FisError::SyntaxError { line: self.line, col: at, msg: format!("expected a number, found '{tok}'") }),
        }
    }

    fn integer(&mut self) -> Result<usize, FisError> {
        self.skip_ws();
        let at = self.col();
        let tok = self.token();
        tok.parse::<usize>().map_err(|_| FisError::SyntaxError {
            line: self.line,
            col: at,
            msg: format!("expected a non-negative integer, found '{tok}'"),
        })
    }

    /// `[v1 v2 ...]`, whitespace separated.
    fn vector(&mut self) -> Result<Vec<f64>, FisError> {
        self.expect('[')?;
        let mut v = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(']') => {
                    self.pos += 1;
                    return Ok(v);
                }
                None => return Err(self.error("unterminated vector")),
                _ => v.push(self.number()?),
            }
        }
    }
}

/// Removes a trailing `#` comment that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// `'label':'shape',[params]|[paramsy]` starting at the cursor.
fn parse_mf(cur: &mut Cursor) -> Result<MembershipFunction, FisError> {
    let label = cur.quoted()?;
    cur.expect(':')?;
    let code = cur.quoted()?;
    let shape = ShapeCode::parse(&code).ok_or_else(|| FisError::UnknownShapeCode { line: cur.line, code: code.clone() })?;
    cur.expect(',')?;
    let params = cur.vector()?;
    let paramsy = if cur.eat('|') {
        cur.vector()?
    } else {
        match shape.canonical_paramsy() {
            Some(c) => c.to_vec(),
            None => return Err(cur.error("pwlmf requires membership values after '|'")),
        }
    };
    cur.expect_end()?;
    if params.len() != paramsy.len() {
        return Err(FisError::ParamsyLengthMismatch { line: cur.line, params: params.len(), paramsy: paramsy.len() });
    }
    if let Some(canon) = shape.canonical_paramsy() {
        if paramsy != canon {
            return Err(FisError::ParamsyShapeMismatch { line: cur.line, shape: code });
        }
    }
    let mf = MembershipFunction { label, shape, params, paramsy };
    mf.to_set().map_err(|source| FisError::InvalidSet { line: cur.line, source })?;
    Ok(mf)
}

/// A `[Section]` with its `key = value` lines (value cursor positioned after
/// the `=`) in file order.
struct Section<'a> {
    name: String,
    line: usize,
    entries: Vec<(String, Cursor<'a>)>,
    /// Raw lines of a `[Rules]` section.
    raw: Vec<Cursor<'a>>,
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>, FisError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = strip_comment(raw_line);
        let n = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') && !trimmed.contains('=') {
            let mut cur = Cursor::new(line, n);
            cur.expect('[')?;
            let name = cur.token().to_string();
            cur.expect(']')?;
            cur.expect_end()?;
            if name.is_empty() {
                return Err(FisError::SyntaxError { line: n, col: 2, msg: "empty section name".into() });
            }
            sections.push(Section { name, line: n, entries: Vec::new(), raw: Vec::new() });
            continue;
        }
        let Some(sec) = sections.last_mut() else {
            return Err(FisError::SyntaxError { line: n, col: 1, msg: "content before the first section".into() });
        };
        if sec.name == "Rules" {
            sec.raw.push(Cursor::new(line, n));
            continue;
        }
        let mut cur = Cursor::new(line, n);
        let key = cur.token().to_string();
        if key.is_empty() {
            return Err(cur.error("expected a key"));
        }
        cur.expect('=')?;
        sec.entries.push((key, cur));
    }
    Ok(sections)
}

fn take_string(entries: &mut [(String, Cursor)], key: &str) -> Result<Option<String>, FisError> {
    match entries.iter_mut().find(|(k, _)| k == key) {
        Some((_, cur)) => {
            let s = cur.quoted()?;
            cur.expect_end()?;
            Ok(Some(s))
        }
        None => Ok(None),
    }
}

fn take_count(entries: &mut [(String, Cursor)], key: &str) -> Result<Option<usize>, FisError> {
    match entries.iter_mut().find(|(k, _)| k == key) {
        Some((_, cur)) => {
            let v = cur.integer()?;
            cur.expect_end()?;
            Ok(Some(v))
        }
        None => Ok(None),
    }
}

fn check_count(key: &str, declared: Option<usize>, found: usize) -> Result<(), FisError> {
    match declared {
        Some(d) if d != found => Err(FisError::CountMismatch { key: key.into(), declared: d, found }),
        _ => Ok(()),
    }
}

/// Parses indexed `<prefix><k>=` entries into a gap-free 1-based list.
fn indexed<T>(items: BTreeMap<usize, T>, missing: impl Fn(usize) -> FisError) -> Result<Vec<T>, FisError> {
    let mut out = Vec::with_capacity(items.len());
    for (expected, (k, v)) in (1..).zip(items) {
        if k != expected {
            return Err(missing(expected));
        }
        out.push(v);
    }
    Ok(out)
}

fn key_index(key: &str, prefix: &str) -> Option<usize> {
    key.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok())
}

fn parse_partition(sec: &mut Section) -> Result<PartitionDoc, FisError> {
    let section = sec.name.clone();
    let missing_key = |key: &str| FisError::MissingKey { section: section.clone(), key: key.into() };
    let name = take_string(&mut sec.entries, "Name")?.ok_or_else(|| missing_key("Name"))?;
    let range = match sec.entries.iter_mut().find(|(k, _)| k == "Range") {
        Some((_, cur)) => {
            let v = cur.vector()?;
            cur.expect_end()?;
            if v.len() != 2 || v[0] >= v[1] {
                return Err(FisError::SyntaxError { line: cur.line, col: 1, msg: "Range must be [lo hi] with lo < hi".into() });
            }
            (v[0], v[1])
        }
        None => return Err(missing_key("Range")),
    };
    let declared = take_count(&mut sec.entries, "NumMFs")?;
    let mut mfs = BTreeMap::new();
    for (key, cur) in sec.entries.iter_mut() {
        match key.as_str() {
            "Name" | "Range" | "NumMFs" => {}
            k => match key_index(k, "MF") {
                Some(i) if i > 0 => {
                    if mfs.insert(i, parse_mf(cur)?).is_some() {
                        return Err(FisError::SyntaxError { line: cur.line, col: 1, msg: format!("duplicate {k}") });
                    }
                }
                _ => return Err(FisError::SyntaxError { line: cur.line, col: 1, msg: format!("unknown key '{k}'") }),
            },
        }
    }
    let mfs = indexed(mfs, |m| FisError::IndexGap { what: format!("[{section}] MF"), missing: m })?;
    check_count(&format!("[{section}] NumMFs"), declared, mfs.len())?;
    Ok(PartitionDoc { name, range, mfs })
}

fn parse_rule(cur: &mut Cursor) -> Result<RuleDoc, FisError> {
    let mut idx = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('(') => break,
            Some(',') => {
                cur.pos += 1;
            }
            None => return Err(cur.error("expected '(' before the rule weight")),
            _ => {
                let v = cur.integer()?;
                if v == 0 {
                    return Err(FisError::DontCareUnsupported { line: cur.line });
                }
                idx.push(v);
            }
        }
    }
    if idx.len() < 2 {
        return Err(cur.error("a rule needs at least one antecedent and a consequent"));
    }
    cur.expect('(')?;
    let weight = cur.number()?;
    cur.expect(')')?;
    cur.expect(':')?;
    let connective = cur.integer()? as u32;
    cur.expect_end()?;
    let consequent = idx.pop().expect("checked length");
    Ok(RuleDoc { antecedents: idx, consequent, weight, connective })
}

pub fn parse_fis(text: &str) -> Result<RuleBaseDocument, FisError> {
    let mut sections = split_sections(text)?;
    let find = |sections: &[Section], name: &str| sections.iter().position(|s| s.name == name);

    let sys = find(&sections, "System").ok_or_else(|| FisError::MissingSection("System".into()))?;
    let entries = &mut sections[sys].entries;
    let name = take_string(entries, "Name")?
        .ok_or_else(|| FisError::MissingKey { section: "System".into(), key: "Name".into() })?;
    let default_method = take_string(entries, "Method")?;
    let num_inputs = take_count(entries, "NumInputs")?;
    let num_outputs = take_count(entries, "NumOutputs")?;
    let num_rules = take_count(entries, "NumRules")?;

    let mut inputs = BTreeMap::new();
    let mut output = None;
    let mut rules = None;
    for sec in sections.iter_mut() {
        let line = sec.line;
        let sec_name = sec.name.clone();
        match sec_name.as_str() {
            "System" => {}
            "Output1" => output = Some(parse_partition(sec)?),
            "Rules" => {
                let mut list = Vec::with_capacity(sec.raw.len());
                for cur in sec.raw.iter_mut() {
                    list.push(parse_rule(cur)?);
                }
                rules = Some(list);
            }
            other => match key_index(other, "Input") {
                Some(k) if k > 0 => {
                    if inputs.insert(k, parse_partition(sec)?).is_some() {
                        return Err(FisError::SyntaxError { line, col: 1, msg: format!("duplicate section [{other}]") });
                    }
                }
                _ => return Err(FisError::SyntaxError { line, col: 2, msg: format!("unknown section [{other}]") }),
            },
        }
    }
    if inputs.is_empty() {
        return Err(FisError::MissingSection("Input1".into()));
    }
    let inputs = indexed(inputs, |m| FisError::MissingSection(format!("Input{m}")))?;
    let output = output.ok_or_else(|| FisError::MissingSection("Output1".into()))?;
    let rules = rules.ok_or_else(|| FisError::MissingSection("Rules".into()))?;
    check_count("NumInputs", num_inputs, inputs.len())?;
    check_count("NumOutputs", num_outputs, 1)?;
    check_count("NumRules", num_rules, rules.len())?;
    Ok(RuleBaseDocument { name, default_method, inputs, output, rules, source_text: Some(text.to_string()) })
}

struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // shortest representation that parses back to the same value
        if self.0 == 0.0 {
            f.write_str("0")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn vector(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| Num(*x).to_string()).collect();
    format!("[{}]", items.join(" "))
}

fn mf_body(mf: &MembershipFunction) -> String {
    format!("{}:{},{}|{}", quote(&mf.label), quote(mf.shape.token()), vector(&mf.params), vector(&mf.paramsy))
}

fn write_partition(out: &mut String, header: &str, p: &PartitionDoc) {
    let _ = writeln!(out, "[{header}]");
    let _ = writeln!(out, "Name={}", quote(&p.name));
    let _ = writeln!(out, "Range={}", vector(&[p.range.0, p.range.1]));
    let _ = writeln!(out, "NumMFs={}", p.mfs.len());
    for (i, mf) in p.mfs.iter().enumerate() {
        let _ = writeln!(out, "MF{}={}", i + 1, mf_body(mf));
    }
    out.push('\n');
}

/// Canonical text of a document.
pub fn serialize_fis(doc: &RuleBaseDocument) -> String {
    let mut out = String::new();
    out.push_str("[System]\n");
    let _ = writeln!(out, "Name={}", quote(&doc.name));
    if let Some(m) = &doc.default_method {
        let _ = writeln!(out, "Method={}", quote(m));
    }
    let _ = writeln!(out, "NumInputs={}", doc.inputs.len());
    out.push_str("NumOutputs=1\n");
    let _ = writeln!(out, "NumRules={}", doc.rules.len());
    out.push('\n');
    for (k, p) in doc.inputs.iter().enumerate() {
        write_partition(&mut out, &format!("Input{}", k + 1), p);
    }
    write_partition(&mut out, "Output1", &doc.output);
    out.push_str("[Rules]\n");
    for r in &doc.rules {
        let idx: Vec<String> = r.antecedents.iter().chain(std::iter::once(&r.consequent)).map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{} ({}) : {}", idx.join(", "), Num(r.weight), r.connective);
    }
    out
}

/// Parses an observation file: one `OBS<k>=` line per input dimension.
pub fn parse_observation(text: &str) -> Result<Observation, FisError> {
    let mfs = parse_observation_mfs(text)?;
    let sets = mfs
        .iter()
        .map(|m| m.to_set().map_err(|source| FisError::InvalidSet { line: 0, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Observation::new(sets))
}

/// The membership-function lines of an observation file, in dimension order.
pub fn parse_observation_mfs(text: &str) -> Result<Vec<MembershipFunction>, FisError> {
    let mut found = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = strip_comment(raw_line);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed == "[Observation]" {
            continue;
        }
        let mut cur = Cursor::new(line, i + 1);
        let key = cur.token();
        let Some(k) = key_index(key, "OBS").filter(|k| *k > 0) else {
            return Err(FisError::SyntaxError { line: i + 1, col: 1, msg: format!("expected OBS<k>=, found '{key}'") });
        };
        cur.expect('=')?;
        if found.insert(k, parse_mf(&mut cur)?).is_some() {
            return Err(FisError::SyntaxError { line: i + 1, col: 1, msg: format!("duplicate OBS{k}") });
        }
    }
    if found.is_empty() {
        return Err(FisError::MissingSection("OBS1".into()));
    }
    indexed(found, |m| FisError::DimensionGap { missing: m })
}

pub fn serialize_observation(obs: &Observation) -> String {
    let mut out = String::new();
    for (k, s) in obs.sets.iter().enumerate() {
        let _ = writeln!(out, "OBS{}={}", k + 1, mf_body(&MembershipFunction::from_set(s)));
    }
    out
}

/// One line of the comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub example: String,
    pub method: String,
    /// `ok` or `error:<code>`.
    pub status: String,
    pub abnormal: Option<bool>,
    pub linear: Option<bool>,
    pub lf: Option<f64>,
    pub lc: Option<f64>,
    pub rc: Option<f64>,
    pub rf: Option<f64>,
}

/// Writes rows with the header
/// `example,method,status,abnormal,linear,lf,lc,rc,rf`.
pub fn write_csv<W: io::Write>(rows: &[ReportRow], writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["example", "method", "status", "abnormal", "linear", "lf", "lc", "rc", "rf"])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAGMENT: &str = "\
[System]
Name='fig'
NumInputs=1
NumOutputs=1
NumRules=1

[Input1]
Name='x'
Range=[0 40]
NumMFs=2
MF1='A_{1;1}':'trimf',[10 20 30]|[0 1 0]
MF2='A_{1;2}':'trapmf',[4.5 5 5.5 6]|[0 1 1 0]

[Output1]
Name='y'
Range=[0 1]
NumMFs=1
MF1='B_{1;1}':'singlmf',[0.46]|[1]

[Rules]
1, 1 (1) : 1
";

    #[test]
    fn figure_lines_parse_to_their_shapes() {
        let doc = parse_fis(FRAGMENT).unwrap();
        let rb = doc.to_rulebase().unwrap();
        assert!(rb.inputs[0].terms[0].approx_eq(&FuzzySet::triangular(10.0, 20.0, 30.0).unwrap(), 0.0));
        assert!(rb.inputs[0].terms[1].approx_eq(&FuzzySet::trapezoidal(4.5, 5.0, 5.5, 6.0).unwrap(), 0.0));
        assert!(rb.output.terms[0].approx_eq(&FuzzySet::singleton(0.46).unwrap(), 0.0));
        assert_eq!(rb.inputs[0].terms[0].label(), "A_{1;1}");
    }

    #[test]
    fn fragment_is_a_fixpoint() {
        let doc = parse_fis(FRAGMENT).unwrap();
        let text = serialize_fis(&doc);
        assert_eq!(text, FRAGMENT);
        assert_eq!(parse_fis(&text).unwrap(), doc);
    }

    #[test]
    fn paramsy_errors() {
        let bad = FRAGMENT.replace("'trapmf',[4.5 5 5.5 6]", "'trapmf',[4.5 5 5.5]");
        assert!(matches!(parse_fis(&bad), Err(FisError::ParamsyLengthMismatch { line: 12, params: 3, paramsy: 4 })));
        let bad = FRAGMENT.replace("[10 20 30]|[0 1 0]", "[10 20 30]|[0 0.5 0]");
        assert!(matches!(parse_fis(&bad), Err(FisError::ParamsyShapeMismatch { line: 11, .. })));
        let bad = FRAGMENT.replace("'singlmf'", "'gaussmf'");
        assert!(matches!(parse_fis(&bad), Err(FisError::UnknownShapeCode { line: 18, .. })));
    }

    #[test]
    fn structural_errors() {
        let bad = FRAGMENT.replace("[Output1]", "[Output2]");
        assert!(parse_fis(&bad).is_err());
        let bad = FRAGMENT.replace("[Rules]\n1, 1 (1) : 1\n", "");
        assert_eq!(parse_fis(&bad).unwrap_err(), FisError::MissingSection("Rules".into()));
        let bad = FRAGMENT.replace("1, 1 (1)", "0, 1 (1)");
        assert_eq!(parse_fis(&bad).unwrap_err(), FisError::DontCareUnsupported { line: 21 });
        let bad = FRAGMENT.replace("MF2='A_{1;2}'", "MF3='A_{1;2}'");
        assert!(matches!(parse_fis(&bad), Err(FisError::IndexGap { missing: 2, .. })));
        let bad = FRAGMENT.replace("Range=[0 40]", "Range=[0 4x]");
        assert_eq!(
            parse_fis(&bad).unwrap_err(),
            FisError::SyntaxError { line: 9, col: 10, msg: "expected a number, found '4x'".into() }
        );
    }

    #[test]
    fn empty_rule_section() {
        let text = FRAGMENT.replace("NumRules=1", "NumRules=0").replace("1, 1 (1) : 1\n", "");
        let doc = parse_fis(&text).unwrap();
        assert!(doc.rules.is_empty());
        assert!(serialize_fis(&doc).ends_with("[Rules]\n"));
    }

    #[test]
    fn observations() {
        let obs = parse_observation("OBS1='A*':'trapmf',[4.5 5 5.5 6]|[0 1 1 0]\n").unwrap();
        assert_eq!(obs.dims(), 1);
        let gap = "OBS1='a':'singlmf',[1]|[1]\nOBS3='c':'singlmf',[3]|[1]\n";
        assert_eq!(parse_observation(gap).unwrap_err(), FisError::DimensionGap { missing: 2 });
        let crisp = "OBS1='a':'singlmf',[1]|[1]\nOBS2='b':'singlmf',[2]|[1]\nOBS3='c':'singlmf',[3]|[1]\n";
        let obs = parse_observation(crisp).unwrap();
        assert!(obs.sets.iter().all(|s| s.is_singleton()));
        assert_eq!(serialize_observation(&obs), crisp);
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = vec![ReportRow {
            example: "1".into(),
            method: "KH".into(),
            status: "ok".into(),
            abnormal: Some(false),
            linear: Some(true),
            lf: Some(1.5),
            lc: Some(2.0),
            rc: Some(2.0),
            rf: Some(3.0),
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "example,method,status,abnormal,linear,lf,lc,rc,rf\n1,KH,ok,false,true,1.5,2.0,2.0,3.0\n");
    }
}
