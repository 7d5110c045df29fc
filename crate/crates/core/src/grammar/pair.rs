//! Integer-pair grammars: CNF grammars whose nonterminals are pairs
//! `(a, d)` standing for `A_{(a+d) mod n}`, with binary rules of the shape
//! `(a,d) → (a,b)(c,d)`.

use std::collections::{BTreeSet, HashMap};

use super::cnf::{is_cnf, nonterminal_order};
use super::{GSym, Grammar, GrammarError, Rule};

pub type Pair = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairBinary {
    pub lhs: Pair,
    pub left: Pair,
    pub right: Pair,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairUnary {
    pub lhs: Pair,
    pub terminal: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPairGrammar {
    pub modulus: u32,
    pub terminals: BTreeSet<String>,
    pub binary: Vec<PairBinary>,
    pub unary: Vec<PairUnary>,
    pub start: Pair,
}

fn pair_name((a, d): Pair) -> String {
    format!("P{a}_{d}")
}

impl IntegerPairGrammar {
    pub fn size(&self) -> usize {
        self.binary.len() + self.unary.len()
    }

    /// The nonterminal `A_{(a+d) mod n}` a pair stands for.
    pub fn project(&self, (a, d): Pair) -> u32 {
        (a + d) % self.modulus
    }

    /// The same rules as a plain grammar over nonterminals `P<a>_<d>`,
    /// keeping only pairs that occur as a left-hand side.
    pub fn to_grammar(&self) -> Grammar {
        let defined: BTreeSet<Pair> = self
            .binary
            .iter()
            .map(|r| r.lhs)
            .chain(self.unary.iter().map(|r| r.lhs))
            .collect();
        let mut rules = Vec::with_capacity(self.size());
        for r in &self.binary {
            if defined.contains(&r.left) && defined.contains(&r.right) {
                rules.push(Rule::new(
                    pair_name(r.lhs),
                    vec![GSym::N(pair_name(r.left)), GSym::N(pair_name(r.right))],
                ));
            }
        }
        for r in &self.unary {
            rules.push(Rule::new(pair_name(r.lhs), vec![GSym::T(r.terminal.clone())]));
        }
        Grammar::new(pair_name(self.start), rules).expect("start pair has rules")
    }
}

/// Relabels `g` to `A0..A(n-1)` (start first) and emits, for every
/// `Ai → Aj Ak` and every `a < n`, the rule `(a,d) → (a,b)(c,d)` with
/// `d = (i−a) mod n`, `b = (j−a) mod n`, `c = (k−d) mod n`, and for every
/// `Ai → t` the rule `(a,d) → t`.
pub fn to_integer_pair(g: &Grammar) -> Result<IntegerPairGrammar, GrammarError> {
    if !is_cnf(g) {
        let bad = g
            .rules
            .iter()
            .find(|r| !matches!(r.rhs.as_slice(), [GSym::T(_)] | [GSym::N(_), GSym::N(_)]))
            .expect("some rule is not CNF");
        let rhs: Vec<&str> = bad.rhs.iter().map(GSym::name).collect();
        return Err(GrammarError::NotCnf(format!("{} -> {}", bad.lhs, rhs.join(" "))));
    }
    let index: HashMap<String, u32> = nonterminal_order(g)
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n, i as u32))
        .collect();
    let n = index.len() as u32;
    let sub = |x: u32, y: u32| (x + n - y) % n;
    let mut binary = Vec::new();
    let mut unary = Vec::new();
    for rule in &g.rules {
        let i = index[&rule.lhs];
        match rule.rhs.as_slice() {
            [GSym::N(aj), GSym::N(ak)] => {
                let (j, k) = (index[aj], index[ak]);
                for a in 0..n {
                    let d = sub(i, a);
                    let b = sub(j, a);
                    let c = sub(k, d);
                    binary.push(PairBinary {
                        lhs: (a, d),
                        left: (a, b),
                        right: (c, d),
                    });
                }
            }
            [GSym::T(t)] => {
                for a in 0..n {
                    unary.push(PairUnary {
                        lhs: (a, sub(i, a)),
                        terminal: t.clone(),
                    });
                }
            }
            _ => unreachable!("checked CNF"),
        }
    }
    Ok(IntegerPairGrammar {
        modulus: n,
        terminals: g.terminals.clone(),
        binary,
        unary,
        start: (0, 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{derive_strings, parse_grammar, to_cnf};

    #[test]
    fn modulus_one() {
        let g = parse_grammar("start: S\nS -> S S | t").unwrap();
        let p = to_integer_pair(&g).unwrap();
        assert_eq!(p.modulus, 1);
        assert_eq!(
            p.binary,
            vec![PairBinary {
                lhs: (0, 0),
                left: (0, 0),
                right: (0, 0)
            }]
        );
        assert_eq!(
            p.unary,
            vec![PairUnary {
                lhs: (0, 0),
                terminal: "t".into()
            }]
        );
    }

    #[test]
    fn modulus_two() {
        let g = parse_grammar("start: A0\nA0 -> A1 A1\nA1 -> t").unwrap();
        let p = to_integer_pair(&g).unwrap();
        assert_eq!(p.modulus, 2);
        let want = [
            PairBinary {
                lhs: (0, 0),
                left: (0, 1),
                right: (1, 0),
            },
            PairBinary {
                lhs: (1, 1),
                left: (1, 0),
                right: (0, 1),
            },
        ];
        for w in want {
            assert!(p.binary.contains(&w), "{w:?}");
        }
        for r in &p.binary {
            assert_eq!(p.project(r.lhs), 0);
            assert_eq!(p.project(r.left), 1);
            assert_eq!(p.project(r.right), 1);
        }
    }

    #[test]
    fn rejects_non_cnf() {
        let g = parse_grammar("start: S\nS -> a S b | a b").unwrap();
        assert!(matches!(to_integer_pair(&g), Err(GrammarError::NotCnf(_))));
    }

    #[test]
    fn language_is_kept() {
        let g = parse_grammar("start: S\nS -> a S b | a b").unwrap();
        let c = to_cnf(&g).unwrap();
        let p = to_integer_pair(&c).unwrap();
        assert_eq!(derive_strings(&p.to_grammar(), 8), derive_strings(&g, 8));
    }
}
