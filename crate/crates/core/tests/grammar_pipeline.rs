use std::collections::{BTreeSet, HashSet};

use insertion_core::enumerator::{enumerate, enumerate_leftmost, language, Bounds};
use insertion_core::grammar::{
    apply_expression, cyk_member, derive_strings, kappa_check, parse_grammar, to_cnf,
    to_insertion_system, to_integer_pair, CompiledSystem, GSym, Grammar, IntegerPairGrammar, Word,
};
use insertion_core::Polymer;

const ANBN: &str = "start: S\nS -> a S b | a b\n";
const PARENS: &str = "start: S\nS -> S S | ( S ) | ( )\n";
const PALINDROMES: &str = "start: S
S -> A X | B Y | A A | B B
X -> S A
Y -> S B
A -> a
B -> b
";

fn compile(text: &str) -> (Grammar, Grammar, IntegerPairGrammar, CompiledSystem) {
    let g = parse_grammar(text).unwrap();
    let cnf = to_cnf(&g).unwrap();
    let pair = to_integer_pair(&cnf).unwrap();
    let compiled = to_insertion_system(&pair);
    (g, cnf, pair, compiled)
}

/// Polymer length (initiator halves counted) of a terminal polymer
/// expressing `n` grammar terminals.
fn polymer_len(n: usize) -> usize {
    4 * n - 1
}

fn all_words(alphabet: &BTreeSet<String>, max_len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for t in alphabet {
                let mut w = w.clone();
                w.push(t.clone());
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn compiled_languages_match_grammars() {
    for text in [ANBN, PARENS, PALINDROMES] {
        let (g, cnf, _, compiled) = compile(text);
        let sys = &compiled.system;
        assert!(sys.validate().is_ok());
        let lang = language(sys, polymer_len(5));
        assert!(!lang.truncated);
        let image: BTreeSet<Word> = lang
            .strings
            .iter()
            .map(|s| apply_expression(&compiled.expression, s))
            .collect();
        let want = derive_strings(&g, 5);
        assert_eq!(image, want, "{text}");
        for w in all_words(&g.terminals, 5) {
            assert_eq!(cyk_member(&cnf, &w).unwrap(), want.contains(&w), "{w:?}");
        }
        for s in &lang.strings {
            assert_eq!((s.len() + 8) % 16, 0, "length {}", s.len());
        }
        assert!(kappa_check(
            &compiled.expression,
            lang.strings.iter().map(Vec::as_slice)
        ));
    }
}

#[test]
fn expression_pattern() {
    let (_, _, _, compiled) = compile(ANBN);
    let lang = language(&compiled.system, polymer_len(4));
    assert!(!lang.strings.is_empty());
    for s in &lang.strings {
        let hits: Vec<usize> = s
            .iter()
            .enumerate()
            .filter(|(_, &c)| compiled.expression.image(c).is_some())
            .map(|(i, _)| i)
            .collect();
        let n = hits.len();
        assert_eq!(s.len(), 16 * n - 8);
        assert_eq!(hits[0], 3);
        for w in hits.windows(2) {
            assert_eq!(w[1] - w[0], 16);
        }
        assert_eq!(s.len() - 1 - hits[n - 1], 4);
    }
}

fn family_of(compiled: &CompiledSystem, p: &Polymer, k: usize) -> u8 {
    // Positions 0 and len-1 are the initiator halves, which sit where a Δ3'
    // and a Δ1' monomer would.
    if k == 0 {
        3
    } else if k == p.len() - 1 {
        1
    } else {
        compiled.family(p.ids()[k - 1]).number()
    }
}

#[test]
fn insertion_patterns_and_period() {
    let allowed: HashSet<(u8, u8, u8)> = [(2, 3, 1), (3, 2, 1), (3, 4, 1), (3, 1, 2)].into();
    let period: HashSet<(u8, u8, u8)> = [(4, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 1)].into();
    for text in [ANBN, PARENS] {
        let (_, _, _, compiled) = compile(text);
        let sys = &compiled.system;
        let reach = enumerate(sys, Bounds::new(polymer_len(3), 200_000));
        assert!(reach.terminal_count() > 0);
        for (p, &terminal) in reach.polymers.iter().zip(&reach.terminal) {
            for (i, site) in sys.sites(p).enumerate() {
                for m in sys.insertable_types(&site) {
                    let pattern = (
                        family_of(&compiled, p, i),
                        compiled.family(m).number(),
                        family_of(&compiled, p, i + 1),
                    );
                    assert!(allowed.contains(&pattern), "{pattern:?}");
                }
            }
            if terminal {
                let fam: Vec<u8> = p.ids().iter().map(|&m| compiled.family(m).number()).collect();
                assert_eq!(fam.first(), Some(&4));
                assert_eq!(fam.last(), Some(&4));
                for w in fam.windows(3) {
                    assert!(period.contains(&(w[0], w[1], w[2])), "{fam:?}");
                }
            }
        }
    }
}

#[test]
fn leftmost_and_full_enumeration_agree_on_terminals() {
    let (_, _, _, compiled) = compile(ANBN);
    let sys = &compiled.system;
    let bounds = Bounds::new(polymer_len(2), 1_000_000);
    let full: BTreeSet<Vec<_>> = enumerate(sys, bounds)
        .terminals()
        .map(|p| p.ids().to_vec())
        .collect();
    let left: BTreeSet<Vec<_>> = enumerate_leftmost(sys, bounds)
        .terminals()
        .map(|p| p.ids().to_vec())
        .collect();
    assert_eq!(full, left);
    assert_eq!(full.len(), 1);
}

fn pair_forms(p: &IntegerPairGrammar, steps: usize) -> BTreeSet<Vec<GSym>> {
    let g = p.to_grammar();
    forms(&g, steps)
        .into_iter()
        .map(|f| {
            f.into_iter()
                .map(|s| match s {
                    GSym::N(name) => {
                        let (a, d) = name[1..].split_once('_').unwrap();
                        let idx = p.project((a.parse().unwrap(), d.parse().unwrap()));
                        GSym::N(format!("A{idx}"))
                    }
                    t => t,
                })
                .collect()
        })
        .collect()
}

/// Sentential forms reachable in at most `steps` rewrites.
fn forms(g: &Grammar, steps: usize) -> BTreeSet<Vec<GSym>> {
    let mut all = BTreeSet::from([vec![GSym::N(g.start.clone())]]);
    let mut layer = all.clone();
    for _ in 0..steps {
        let mut next = BTreeSet::new();
        for f in &layer {
            for (i, s) in f.iter().enumerate() {
                if let GSym::N(n) = s {
                    for r in g.rules_for(n) {
                        let mut h = f[..i].to_vec();
                        h.extend(r.rhs.iter().cloned());
                        h.extend(f[i + 1..].iter().cloned());
                        if all.insert(h.clone()) {
                            next.insert(h);
                        }
                    }
                }
            }
        }
        layer = next;
    }
    all
}

#[test]
fn pair_grammar_projects_onto_sentential_forms() {
    for text in [ANBN, PALINDROMES] {
        let g = parse_grammar(text).unwrap();
        let cnf = insertion_core::grammar::relabel(&to_cnf(&g).unwrap());
        let pair = to_integer_pair(&cnf).unwrap();
        assert_eq!(pair_forms(&pair, 4), forms(&cnf, 4));
        assert_eq!(derive_strings(&pair.to_grammar(), 8), derive_strings(&g, 8));
    }
}
