//! Context-free grammars and their compilation into insertion systems.
//!
//! ```text
//! start: S
//! S -> a S b | a b
//! ```
//!
//! Tokens starting with an uppercase letter are nonterminals, `eps` is the
//! empty alternative and everything else is a terminal.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

mod cnf;
mod compile;
mod cyk;
mod derive;
mod pair;

pub use cnf::{is_cnf, relabel, to_cnf};
pub use compile::{apply_expression, kappa_check, to_insertion_system, CompiledSystem, ExpressionMap, Family, KAPPA};
pub use cyk::cyk_member;
pub use derive::{derive_strings, Word};
pub use pair::{to_integer_pair, IntegerPairGrammar, Pair, PairBinary, PairUnary};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GSym {
    T(String),
    N(String),
}

impl GSym {
    pub fn is_terminal(&self) -> bool {
        matches!(self, GSym::T(_))
    }

    pub fn name(&self) -> &str {
        match self {
            GSym::T(s) | GSym::N(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Vec<GSym>,
}

impl Rule {
    pub fn new(lhs: impl Into<String>, rhs: Vec<GSym>) -> Self {
        Rule { lhs: lhs.into(), rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("grammar has no rules")]
    NoRules,
    #[error("missing `start:` line")]
    MissingStart,
    #[error("symbol `{0}` is used but has no rules")]
    Undefined(String),
    #[error("the language is empty")]
    EmptyLanguage,
    #[error("the language contains the empty string")]
    Epsilon,
    #[error("not in Chomsky normal form: {0}")]
    NotCnf(String),
    #[error("the empty string is not a valid input")]
    EmptyWord,
}

/// `(Σ, Γ, Δ, S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub terminals: BTreeSet<String>,
    pub nonterminals: BTreeSet<String>,
    pub rules: Vec<Rule>,
    pub start: String,
}

fn is_nonterminal_token(tok: &str) -> bool {
    tok.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

impl Grammar {
    /// Collects terminals and nonterminals from the rules. Every
    /// nonterminal used on a right-hand side must have a rule.
    pub fn new(start: impl Into<String>, rules: Vec<Rule>) -> Result<Self, GrammarError> {
        let start = start.into();
        if rules.is_empty() {
            return Err(GrammarError::NoRules);
        }
        let nonterminals: BTreeSet<String> = rules.iter().map(|r| r.lhs.clone()).collect();
        let mut terminals = BTreeSet::new();
        for sym in rules.iter().flat_map(|r| &r.rhs) {
            match sym {
                GSym::T(t) => {
                    terminals.insert(t.clone());
                }
                GSym::N(n) if !nonterminals.contains(n) => {
                    return Err(GrammarError::Undefined(n.clone()));
                }
                GSym::N(_) => {}
            }
        }
        if !nonterminals.contains(&start) {
            return Err(GrammarError::Undefined(start));
        }
        Ok(Grammar {
            terminals,
            nonterminals,
            rules,
            start,
        })
    }

    pub fn size(&self) -> usize {
        self.rules.len()
    }

    pub fn rules_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }
}

pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut start = None;
    let mut rules = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |message: String| GrammarError::Syntax { line, message };
        if let Some(rest) = body.strip_prefix("start:") {
            let name = rest.trim();
            if !is_nonterminal_token(name) || name.contains(char::is_whitespace) {
                return Err(syntax(format!("`{name}` is not a nonterminal")));
            }
            start = Some(name.to_string());
            continue;
        }
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| syntax("expected `LHS -> RHS`".into()))?;
        let lhs = lhs.trim();
        if !is_nonterminal_token(lhs) || lhs.contains(char::is_whitespace) {
            return Err(syntax(format!("left-hand side `{lhs}` is not a nonterminal")));
        }
        for alt in rhs.split('|') {
            let toks: Vec<&str> = alt.split_whitespace().collect();
            if toks.is_empty() {
                return Err(syntax("empty alternative (write `eps`)".into()));
            }
            let rhs = if toks == ["eps"] {
                Vec::new()
            } else {
                if toks.contains(&"eps") {
                    return Err(syntax("`eps` must stand alone".into()));
                }
                toks.iter()
                    .map(|t| {
                        if is_nonterminal_token(t) {
                            GSym::N(t.to_string())
                        } else {
                            GSym::T(t.to_string())
                        }
                    })
                    .collect()
            };
            rules.push(Rule::new(lhs, rhs));
        }
    }
    let start = start.ok_or(GrammarError::MissingStart)?;
    Grammar::new(start, rules)
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start: {}", self.start)?;
        let mut order: Vec<&str> = Vec::new();
        for r in &self.rules {
            if !order.contains(&r.lhs.as_str()) {
                order.push(&r.lhs);
            }
        }
        for lhs in order {
            let alts: Vec<String> = self
                .rules_for(lhs)
                .map(|r| {
                    if r.rhs.is_empty() {
                        "eps".to_string()
                    } else {
                        r.rhs.iter().map(GSym::name).collect::<Vec<_>>().join(" ")
                    }
                })
                .collect();
            writeln!(f, "{lhs} -> {}", alts.join(" | "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let g = parse_grammar("start: S\nS -> a S b | a b  # anbn\n").unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.terminals, BTreeSet::from(["a".to_string(), "b".to_string()]));
        assert_eq!(g.to_string(), "start: S\nS -> a S b | a b\n");
        assert_eq!(parse_grammar(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn eps_alternative() {
        let g = parse_grammar("start: S\nS -> ( S ) S | eps\n").unwrap();
        assert!(g.rules[1].rhs.is_empty());
        assert!(g.terminals.contains("("));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_grammar("S -> a"), Err(GrammarError::MissingStart));
        assert!(matches!(
            parse_grammar("start: S\nS a"),
            Err(GrammarError::Syntax { line: 2, .. })
        ));
        assert_eq!(
            parse_grammar("start: S\nS -> A"),
            Err(GrammarError::Undefined("A".into()))
        );
        assert_eq!(parse_grammar("start: S\n"), Err(GrammarError::NoRules));
    }
}
