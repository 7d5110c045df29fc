//! Chomsky normal form: START, TERM, BIN, DEL, UNIT, then useless symbols.
//!
//! Fresh nonterminals are `S0` for the new start, `T_<t>` for a terminal
//! `t` inside a long rule and `X1`, `X2`, ... for binarisation, each with a
//! numeric suffix if the name is taken.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{GSym, Grammar, GrammarError, Rule};

struct Names {
    used: HashSet<String>,
    next_x: usize,
}

impl Names {
    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut k = 1;
        while self.used.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.used.insert(name.clone());
        name
    }

    fn fresh_x(&mut self) -> String {
        loop {
            self.next_x += 1;
            let name = format!("X{}", self.next_x);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

pub fn is_cnf(g: &Grammar) -> bool {
    g.rules
        .iter()
        .all(|r| matches!(r.rhs.as_slice(), [GSym::T(_)] | [GSym::N(_), GSym::N(_)]))
}

fn dedup(rules: Vec<Rule>) -> Vec<Rule> {
    let mut seen = HashSet::new();
    rules.into_iter().filter(|r| seen.insert(r.clone())).collect()
}

fn nullable(rules: &[Rule]) -> HashSet<String> {
    let mut set = HashSet::new();
    loop {
        let before = set.len();
        for r in rules {
            if r.rhs.iter().all(|s| matches!(s, GSym::N(n) if set.contains(n))) {
                set.insert(r.lhs.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

fn generating(rules: &[Rule]) -> HashSet<String> {
    let mut set = HashSet::new();
    loop {
        let before = set.len();
        for r in rules {
            if r.rhs.iter().all(|s| match s {
                GSym::T(_) => true,
                GSym::N(n) => set.contains(n),
            }) {
                set.insert(r.lhs.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

fn reachable(rules: &[Rule], start: &str) -> HashSet<String> {
    let mut set = HashSet::from([start.to_string()]);
    let mut stack = vec![start.to_string()];
    while let Some(n) = stack.pop() {
        for r in rules.iter().filter(|r| r.lhs == n) {
            for s in &r.rhs {
                if let GSym::N(m) = s {
                    if set.insert(m.clone()) {
                        stack.push(m.clone());
                    }
                }
            }
        }
    }
    set
}

pub fn to_cnf(g: &Grammar) -> Result<Grammar, GrammarError> {
    if g.rules.is_empty() {
        return Err(GrammarError::NoRules);
    }
    let mut names = Names {
        used: g.nonterminals.iter().cloned().collect(),
        next_x: 0,
    };

    // START
    let start = names.fresh("S0");
    let mut rules = vec![Rule::new(start.clone(), vec![GSym::N(g.start.clone())])];
    rules.extend(g.rules.iter().cloned());

    // TERM
    let mut term_of: HashMap<String, String> = HashMap::new();
    let mut extra = Vec::new();
    for r in &mut rules {
        if r.rhs.len() < 2 {
            continue;
        }
        for s in &mut r.rhs {
            if let GSym::T(t) = s {
                let n = term_of.entry(t.clone()).or_insert_with(|| {
                    let n = names.fresh(&format!("T_{t}"));
                    extra.push(Rule::new(n.clone(), vec![GSym::T(t.clone())]));
                    n
                });
                *s = GSym::N(n.clone());
            }
        }
    }
    rules.extend(extra);

    // BIN
    let mut binary = Vec::with_capacity(rules.len());
    for r in rules {
        if r.rhs.len() <= 2 {
            binary.push(r);
            continue;
        }
        let mut lhs = r.lhs;
        let k = r.rhs.len();
        for s in &r.rhs[..k - 2] {
            let next = names.fresh_x();
            binary.push(Rule::new(lhs, vec![s.clone(), GSym::N(next.clone())]));
            lhs = next;
        }
        binary.push(Rule::new(lhs, r.rhs[k - 2..].to_vec()));
    }

    // DEL
    let null = nullable(&binary);
    if null.contains(&start) {
        return Err(GrammarError::Epsilon);
    }
    let is_null = |s: &GSym| matches!(s, GSym::N(n) if null.contains(n));
    let mut rules = Vec::new();
    for r in binary {
        match r.rhs.as_slice() {
            [] => {}
            [a, b] => {
                rules.push(r.clone());
                if is_null(a) {
                    rules.push(Rule::new(r.lhs.clone(), vec![b.clone()]));
                }
                if is_null(b) {
                    rules.push(Rule::new(r.lhs.clone(), vec![a.clone()]));
                }
            }
            _ => rules.push(r),
        }
    }
    let rules = dedup(rules);

    // UNIT
    let lhs_set: BTreeSet<String> = rules.iter().map(|r| r.lhs.clone()).collect();
    let mut out = Vec::new();
    for a in &lhs_set {
        let mut closure = vec![a.clone()];
        let mut seen = HashSet::from([a.clone()]);
        let mut k = 0;
        while k < closure.len() {
            let b = closure[k].clone();
            k += 1;
            for r in rules.iter().filter(|r| r.lhs == b) {
                if let [GSym::N(c)] = r.rhs.as_slice() {
                    if seen.insert(c.clone()) {
                        closure.push(c.clone());
                    }
                }
            }
        }
        for b in &closure {
            for r in rules.iter().filter(|r| &r.lhs == b) {
                if !matches!(r.rhs.as_slice(), [GSym::N(_)]) {
                    out.push(Rule::new(a.clone(), r.rhs.clone()));
                }
            }
        }
    }
    // Keep the original rule order as far as possible.
    let mut order: HashMap<Rule, usize> = HashMap::new();
    for (i, r) in rules.iter().enumerate() {
        order.entry(r.clone()).or_insert(i);
    }
    let mut rules = dedup(out);
    rules.sort_by_key(|r| (r.lhs != start, order.get(r).copied().unwrap_or(usize::MAX)));

    // Useless symbols.
    let gen = generating(&rules);
    if !gen.contains(&start) {
        return Err(GrammarError::EmptyLanguage);
    }
    rules.retain(|r| {
        gen.contains(&r.lhs) && r.rhs.iter().all(|s| !matches!(s, GSym::N(n) if !gen.contains(n)))
    });
    let reach = reachable(&rules, &start);
    rules.retain(|r| reach.contains(&r.lhs));

    Grammar::new(start, rules)
}

/// Nonterminals in first-occurrence order over the rules, start first.
pub(crate) fn nonterminal_order(g: &Grammar) -> Vec<String> {
    let mut order = vec![g.start.clone()];
    let mut seen = HashSet::from([g.start.clone()]);
    for r in &g.rules {
        let names = std::iter::once(&r.lhs).chain(r.rhs.iter().filter_map(|s| match s {
            GSym::N(n) => Some(n),
            GSym::T(_) => None,
        }));
        for n in names {
            if seen.insert(n.clone()) {
                order.push(n.clone());
            }
        }
    }
    order
}

/// Renames nonterminals to `A0..A(n-1)` in first-occurrence order, start
/// as `A0`.
pub fn relabel(g: &Grammar) -> Grammar {
    let index: HashMap<String, usize> = nonterminal_order(g)
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    let name = |n: &str| format!("A{}", index[n]);
    let rules = g
        .rules
        .iter()
        .map(|r| {
            Rule::new(
                name(&r.lhs),
                r.rhs
                    .iter()
                    .map(|s| match s {
                        GSym::N(n) => GSym::N(name(n)),
                        t => t.clone(),
                    })
                    .collect(),
            )
        })
        .collect();
    Grammar::new(name(&g.start), rules).expect("renaming keeps the grammar well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{derive_strings, parse_grammar};

    fn check(text: &str, max_len: usize) -> Grammar {
        let g = parse_grammar(text).unwrap();
        let c = to_cnf(&g).unwrap();
        assert!(is_cnf(&c), "{c}");
        assert_eq!(derive_strings(&g, max_len), derive_strings(&c, max_len), "{c}");
        c
    }

    #[test]
    fn anbn() {
        let c = check("start: S\nS -> a S b | a b", 8);
        assert_eq!(derive_strings(&c, 8).len(), 4);
    }

    #[test]
    fn already_cnf_is_equivalent() {
        let text = "start: S\nS -> A B | A C\nC -> S B\nA -> a\nB -> b";
        let c = check(text, 8);
        let again = to_cnf(&c).unwrap();
        assert_eq!(derive_strings(&c, 8), derive_strings(&again, 8));
        assert_eq!(relabel(&again).nonterminals.len(), relabel(&c).nonterminals.len());
    }

    #[test]
    fn eps_rules_and_units() {
        check("start: S\nS -> ( B ) B | S\nB -> eps | ( B ) B", 8);
        check("start: S\nS -> A | S B\nA -> a | B A\nB -> eps | b", 6);
        check("start: S\nS -> a S a | b S b | a a | b b", 8);
    }

    #[test]
    fn rejections() {
        let g = parse_grammar("start: S\nS -> eps").unwrap();
        assert_eq!(to_cnf(&g), Err(GrammarError::Epsilon));
        let g = parse_grammar("start: S\nS -> a S").unwrap();
        assert_eq!(to_cnf(&g), Err(GrammarError::EmptyLanguage));
    }

    #[test]
    fn relabel_puts_start_first() {
        let c = relabel(&check("start: S\nS -> a S b | a b", 8));
        assert_eq!(c.start, "A0");
        assert_eq!(c.rules[0].lhs, "A0");
        let n = c.nonterminals.len();
        for i in 0..n {
            assert!(c.nonterminals.contains(&format!("A{i}")));
        }
    }
}
