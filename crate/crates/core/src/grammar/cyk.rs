use std::collections::HashMap;

use super::{is_cnf, GSym, Grammar, GrammarError};

/// CYK membership for a CNF grammar.
pub fn cyk_member<S: AsRef<str>>(g: &Grammar, w: &[S]) -> Result<bool, GrammarError> {
    if !is_cnf(g) {
        return Err(GrammarError::NotCnf("cyk needs a CNF grammar".into()));
    }
    if w.is_empty() {
        return Err(GrammarError::EmptyWord);
    }
    let index: HashMap<&str, usize> = g
        .nonterminals
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let k = index.len();
    let mut unary: Vec<(usize, &str)> = Vec::new();
    let mut binary: Vec<(usize, usize, usize)> = Vec::new();
    for r in &g.rules {
        let lhs = index[r.lhs.as_str()];
        match r.rhs.as_slice() {
            [GSym::T(t)] => unary.push((lhs, t)),
            [GSym::N(b), GSym::N(c)] => binary.push((lhs, index[b.as_str()], index[c.as_str()])),
            _ => unreachable!("checked CNF"),
        }
    }
    let n = w.len();
    // table[len-1][start][nonterminal]
    let mut table = vec![vec![vec![false; k]; n]; n];
    for (i, sym) in w.iter().enumerate() {
        for &(a, t) in &unary {
            if t == sym.as_ref() {
                table[0][i][a] = true;
            }
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            for split in 1..len {
                for &(a, b, c) in &binary {
                    if table[split - 1][i][b] && table[len - split - 1][i + split][c] {
                        table[len - 1][i][a] = true;
                    }
                }
            }
        }
    }
    Ok(table[n - 1][0][index[g.start.as_str()]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{derive_strings, parse_grammar, to_cnf};

    fn chars(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn anbn() {
        let g = to_cnf(&parse_grammar("start: S\nS -> a S b | a b").unwrap()).unwrap();
        assert!(cyk_member(&g, &chars("aabb")).unwrap());
        assert!(!cyk_member(&g, &chars("abab")).unwrap());
        assert_eq!(cyk_member(&g, &chars("")), Err(GrammarError::EmptyWord));
    }

    #[test]
    fn agrees_with_derivation() {
        let g = to_cnf(&parse_grammar("start: S\nS -> a S a | b S b | a a | b b").unwrap()).unwrap();
        let lang = derive_strings(&g, 8);
        for len in 1..=8u32 {
            for bits in 0..1u32 << len {
                let w: Vec<String> = (0..len)
                    .map(|i| if bits >> i & 1 == 1 { "b" } else { "a" }.to_string())
                    .collect();
                assert_eq!(cyk_member(&g, &w).unwrap(), lang.contains(&w), "{w:?}");
            }
        }
    }
}
