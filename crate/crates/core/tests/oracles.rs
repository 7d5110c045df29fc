use std::collections::{BTreeMap, BTreeSet, HashSet};

use proptest::prelude::*;

use insertion_core::analyzer::insertion_sets;
use insertion_core::constructions::{fast_forward, gen_counter_system, gen_doubling_system};
use insertion_core::enumerator::{
    enumerate, enumerate_leftmost, site_graph, terminal_length, Bounds,
};
use insertion_core::format::{parse_system_unchecked, write_system};
use insertion_core::model::{
    insertable, Initiator, InsertionSite, InsertionSystem, MonomerId, MonomerSpec, MonomerType,
    Polymer, Sign, Symbol,
};

fn universe(bases: u32) -> Vec<Symbol> {
    (0..bases)
        .flat_map(|b| [Symbol::new(b), Symbol::starred(b)])
        .collect()
}

fn bar(s: Symbol) -> Symbol {
    if s.is_starred() {
        Symbol::new(s.base())
    } else {
        Symbol::starred(s.base())
    }
}

/// Every monomer the two insertion templates produce for `site`: rule 1
/// gives `(b̅,e,f,c̅)+` when `a̅ = d`, rule 2 gives `(e,a̅,d̅,f)-` when
/// `b̅ = c`, for all `e`, `f`.
fn template_monomers(site: &InsertionSite, u: &[Symbol]) -> HashSet<([Symbol; 4], Sign)> {
    let ([a, b], [c, d]) = (site.left, site.right);
    let mut out = HashSet::new();
    for &e in u {
        for &f in u {
            if bar(a) == d {
                out.insert(([bar(b), e, f, bar(c)], Sign::Positive));
            }
            if bar(b) == c {
                out.insert(([e, bar(a), bar(d), f], Sign::Negative));
            }
        }
    }
    out
}

fn quads(u: &[Symbol]) -> Vec<[Symbol; 4]> {
    let mut out = Vec::new();
    for &a in u {
        for &b in u {
            for &c in u {
                for &d in u {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

#[test]
fn insertable_matches_templates_exhaustively() {
    let u = universe(3);
    let all = quads(&u);
    let mut checked = 0usize;
    for q in &all {
        let site = InsertionSite::new([q[0], q[1]], [q[2], q[3]]);
        let fits = template_monomers(&site, &u);
        for m in &all {
            for sign in [Sign::Positive, Sign::Negative] {
                let ty = MonomerType {
                    id: MonomerId(0),
                    quad: *m,
                    sign,
                    concentration: 1.0,
                };
                assert_eq!(insertable(&site, &ty), fits.contains(&(*m, sign)), "{site} {ty}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 6usize.pow(8) * 2);
}

fn symbol(bases: u32) -> impl Strategy<Value = Symbol> {
    (0..bases, any::<bool>()).prop_map(|(b, star)| Symbol::with_star(b, star))
}

fn quad(bases: u32) -> impl Strategy<Value = [Symbol; 4]> {
    [symbol(bases), symbol(bases), symbol(bases), symbol(bases)]
}

fn system(bases: u32, max_types: usize) -> impl Strategy<Value = InsertionSystem> {
    let monomer = (quad(bases), any::<bool>(), 1u32..100);
    (
        [symbol(bases), symbol(bases)],
        symbol(bases),
        prop::collection::vec(monomer, 0..=max_types),
    )
        .prop_map(move |(q, c, ms)| {
            let r = [c, q[0].complement()];
            let total: u32 = ms.iter().map(|m| m.2).sum();
            let mut seen = HashSet::new();
            let specs = ms
                .into_iter()
                .filter(|(q, pos, _)| seen.insert((*q, *pos)))
                .map(|(q, pos, w)| {
                    let sign = if pos { Sign::Positive } else { Sign::Negative };
                    MonomerSpec::new(q, sign, w as f64 / total.max(1) as f64)
                })
                .collect();
            InsertionSystem::new(bases, Initiator::new(q, r), specs)
        })
}

/// Same-signed types grouped by the set of sites (over the finite
/// universe) they insert into.
fn extensional_sets(sys: &InsertionSystem) -> BTreeSet<BTreeSet<MonomerId>> {
    let u = universe(sys.symbol_count());
    let sites: Vec<InsertionSite> = quads(&u)
        .into_iter()
        .map(|q| InsertionSite::new([q[0], q[1]], [q[2], q[3]]))
        .collect();
    let mut groups: BTreeMap<(Sign, Vec<bool>), BTreeSet<MonomerId>> = BTreeMap::new();
    for m in sys.monomers() {
        let key: Vec<bool> = sites.iter().map(|s| insertable(s, m)).collect();
        groups.entry((m.sign, key)).or_default().insert(m.id);
    }
    groups.into_values().collect()
}

/// All terminal polymers by plain recursion over every site and type.
fn dfs_terminals(sys: &InsertionSystem, max_len: usize) -> BTreeSet<Vec<MonomerId>> {
    fn go(
        sys: &InsertionSystem,
        p: &Polymer,
        max_len: usize,
        seen: &mut HashSet<Polymer>,
        out: &mut BTreeSet<Vec<MonomerId>>,
    ) {
        if !seen.insert(p.clone()) {
            return;
        }
        let mut live = false;
        for i in 0..p.site_count() {
            let site = sys.site_at(p, i).unwrap();
            for m in sys.monomers() {
                if insertable(&site, m) {
                    live = true;
                    if p.len() < max_len {
                        go(sys, &sys.insert(p, i, m.id).unwrap(), max_len, seen, out);
                    }
                }
            }
        }
        if !live {
            out.insert(p.ids().to_vec());
        }
    }
    let mut out = BTreeSet::new();
    go(sys, &sys.initial_polymer(), max_len, &mut HashSet::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn format_round_trip(sys in system(6, 8)) {
        let text = write_system(&sys);
        prop_assert_eq!(parse_system_unchecked(&text).unwrap(), sys);
    }

    #[test]
    fn insertion_sets_match_extension(sys in system(2, 10)) {
        let part = insertion_sets(&sys);
        let ours: BTreeSet<BTreeSet<MonomerId>> =
            part.sets.iter().map(|s| s.iter().copied().collect()).collect();
        prop_assert_eq!(ours, extensional_sets(&sys));
    }

    #[test]
    fn enumeration_matches_recursion(sys in system(3, 5)) {
        let max_len = 6;
        let reach = enumerate(&sys, Bounds::new(max_len, 200));
        prop_assume!(!reach.truncated || reach.len() < 200);
        let ours: BTreeSet<Vec<MonomerId>> = reach.terminals().map(|p| p.ids().to_vec()).collect();
        prop_assert_eq!(&ours, &dfs_terminals(&sys, max_len));
        let left: BTreeSet<Vec<MonomerId>> = enumerate_leftmost(&sys, Bounds::new(max_len, 200))
            .terminals()
            .map(|p| p.ids().to_vec())
            .collect();
        prop_assert_eq!(&left, &ours);
    }

    #[test]
    fn polymer_invariants_after_random_insertions(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let sys = gen_doubling_system();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut p = sys.initial_polymer();
        for _ in 0..30 {
            let live: Vec<(usize, MonomerId)> = sys
                .sites(&p)
                .enumerate()
                .flat_map(|(i, s)| sys.insertable_types(&s).into_iter().map(move |m| (i, m)))
                .collect();
            if live.is_empty() {
                break;
            }
            let (i, m) = live[rng.gen_range(0..live.len())];
            let q = sys.insert(&p, i, m).unwrap();
            prop_assert_eq!(q.len(), p.len() + 1);
            prop_assert_eq!(sys.string_representation(&q).len(), 4 * q.len() - 4);
            sys.check_polymer(&q).unwrap();
            p = q;
        }
    }
}

#[test]
fn counter_oracles_agree() {
    let sys = gen_counter_system(1).unwrap();
    let ff = fast_forward(&sys, 1000).unwrap();
    let left: Vec<Polymer> = enumerate_leftmost(&sys, Bounds::new(1000, 10_000))
        .terminals()
        .cloned()
        .collect();
    assert_eq!(left, vec![ff.clone()]);
    let graph = site_graph(&sys, 10_000);
    assert_eq!(terminal_length(&graph), Some(ff.len() as u64));
}
