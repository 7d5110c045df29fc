use std::collections::{BTreeSet, HashMap};

use super::{GSym, Grammar};

/// A terminal string.
pub type Word = Vec<String>;

/// Every terminal string of length at most `max_len` derivable from the
/// start symbol, including the empty string if derivable.
///
/// Computed as a least fixpoint of per-nonterminal word sets, each truncated
/// to `max_len`, so it terminates on any grammar (ε-rules and unit cycles
/// included).
pub fn derive_strings(g: &Grammar, max_len: usize) -> BTreeSet<Word> {
    let mut lang: HashMap<&str, BTreeSet<Word>> =
        g.nonterminals.iter().map(|n| (n.as_str(), BTreeSet::new())).collect();
    loop {
        let mut changed = false;
        for rule in &g.rules {
            let mut acc: BTreeSet<Word> = BTreeSet::from([Vec::new()]);
            for sym in &rule.rhs {
                let mut next = BTreeSet::new();
                match sym {
                    GSym::T(t) => {
                        for w in &acc {
                            if w.len() < max_len {
                                let mut w = w.clone();
                                w.push(t.clone());
                                next.insert(w);
                            }
                        }
                    }
                    GSym::N(n) => {
                        for u in &acc {
                            for v in &lang[n.as_str()] {
                                if u.len() + v.len() <= max_len {
                                    let mut w = u.clone();
                                    w.extend(v.iter().cloned());
                                    next.insert(w);
                                }
                            }
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            let target = lang.get_mut(rule.lhs.as_str()).expect("lhs is a nonterminal");
            for w in acc {
                changed |= target.insert(w);
            }
        }
        if !changed {
            break;
        }
    }
    lang.remove(g.start.as_str()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;

    pub(crate) fn words(list: &[&str]) -> BTreeSet<Word> {
        list.iter()
            .map(|w| w.chars().map(|c| c.to_string()).collect())
            .collect()
    }

    #[test]
    fn anbn() {
        let g = parse_grammar("start: S\nS -> a S b | a b").unwrap();
        assert_eq!(derive_strings(&g, 6), words(&["ab", "aabb", "aaabbb"]));
        assert_eq!(derive_strings(&g, 1), words(&[]));
    }

    #[test]
    fn unreachable_nonterminal_is_harmless() {
        let g = parse_grammar("start: S\nS -> a S b | a b\nU -> b b | U a").unwrap();
        assert_eq!(derive_strings(&g, 6), words(&["ab", "aabb", "aaabbb"]));
    }

    #[test]
    fn eps_and_unit_cycles() {
        let g = parse_grammar("start: S\nS -> A | S B\nA -> a | B A\nB -> eps | b").unwrap();
        assert_eq!(
            derive_strings(&g, 2),
            words(&["a", "ab", "ba"])
        );
    }
}
