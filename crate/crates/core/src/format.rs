//! Plain-text system format.
//!
//! ```text
//! # comment
//! symbols 3
//! initiator (s1,s2) (s2*,s1*)
//! monomer (s2*,s1*,s1,s2) + conc=0.5
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Initiator, InsertionSystem, MonomerId, MonomerSpec, Sign, Symbol, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    /// Each violation with the line it is blamed on.
    #[error("invalid system: {}", .0.iter().map(|(l, v)| format!("line {l}: {v}")).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<(usize, Violation)>),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_tuple(text: &str, line: usize) -> Result<Vec<Symbol>, FormatError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("expected a parenthesised tuple, got `{text}`")))?;
    inner
        .split(',')
        .map(|s| s.trim().parse::<Symbol>().map_err(|e| syntax(line, e.to_string())))
        .collect()
}

fn parse_pair(text: &str, line: usize) -> Result<[Symbol; 2], FormatError> {
    let v = parse_tuple(text, line)?;
    v.try_into()
        .map_err(|_| syntax(line, format!("expected two symbols in `{text}`")))
}

/// Parses and validates a system.
pub fn parse_system(text: &str) -> Result<InsertionSystem, FormatError> {
    let (sys, lines) = parse_with_lines(text)?;
    let report = sys.validate();
    if report.is_ok() {
        return Ok(sys);
    }
    let monomer_line = |m: MonomerId| lines.monomers[m.index()];
    let blamed = report
        .violations
        .into_iter()
        .map(|v| {
            let line = match &v {
                Violation::ConcentrationSum { .. } => {
                    lines.monomers.last().copied().unwrap_or(lines.initiator)
                }
                Violation::ConcentrationOutOfRange { monomer, .. } => monomer_line(*monomer),
                Violation::SymbolOutOfRange { monomer: Some(m), .. } => monomer_line(*m),
                Violation::SymbolOutOfRange { monomer: None, .. }
                | Violation::InitiatorNotComplementary { .. } => lines.initiator,
                Violation::DuplicateMonomer { duplicate, .. } => monomer_line(*duplicate),
            };
            (line, v)
        })
        .collect();
    Err(FormatError::Invalid(blamed))
}

/// Parses a system without validating it.
pub fn parse_system_unchecked(text: &str) -> Result<InsertionSystem, FormatError> {
    parse_with_lines(text).map(|(sys, _)| sys)
}

struct SourceLines {
    initiator: usize,
    monomers: Vec<usize>,
}

fn parse_with_lines(text: &str) -> Result<(InsertionSystem, SourceLines), FormatError> {
    let mut symbols = None;
    let mut initiator = None;
    let mut monomers = Vec::new();
    let mut monomer_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        match keyword {
            "symbols" => {
                let n = rest
                    .parse::<u32>()
                    .map_err(|_| syntax(line, format!("bad symbol count `{rest}`")))?;
                symbols = Some(n);
            }
            "initiator" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [q, r] = parts[..] else {
                    return Err(syntax(line, "initiator needs two pairs"));
                };
                initiator = Some((
                    Initiator::new(parse_pair(q, line)?, parse_pair(r, line)?),
                    line,
                ));
            }
            "monomer" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [quad, sign, conc] = parts[..] else {
                    return Err(syntax(line, "monomer needs a quad, a sign and conc=<value>"));
                };
                let quad: [Symbol; 4] = parse_tuple(quad, line)?
                    .try_into()
                    .map_err(|_| syntax(line, "a monomer has exactly four symbols"))?;
                let sign = match sign {
                    "+" => Sign::Positive,
                    "-" => Sign::Negative,
                    other => return Err(syntax(line, format!("bad sign `{other}`"))),
                };
                let concentration = conc
                    .strip_prefix("conc=")
                    .and_then(|c| c.parse::<f64>().ok())
                    .ok_or_else(|| syntax(line, format!("bad concentration `{conc}`")))?;
                monomers.push(MonomerSpec::new(quad, sign, concentration));
                monomer_lines.push(line);
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    let symbols = symbols.ok_or(FormatError::Missing("symbols"))?;
    let (initiator, initiator_line) = initiator.ok_or(FormatError::Missing("initiator"))?;
    let lines = SourceLines {
        initiator: initiator_line,
        monomers: monomer_lines,
    };
    Ok((InsertionSystem::new(symbols, initiator, monomers), lines))
}

/// Serialises a system; `parse_system_unchecked(&write_system(s)) == s`.
pub fn write_system(sys: &InsertionSystem) -> String {
    let mut out = String::new();
    let init = sys.initiator();
    writeln!(out, "symbols {}", sys.symbol_count()).unwrap();
    writeln!(
        out,
        "initiator ({},{}) ({},{})",
        init.q[0], init.q[1], init.r[0], init.r[1]
    )
    .unwrap();
    for m in sys.monomers() {
        let q = &m.quad;
        writeln!(
            out,
            "monomer ({},{},{},{}) {} conc={}",
            q[0], q[1], q[2], q[3], m.sign, m.concentration
        )
        .unwrap();
    }
    out
}
