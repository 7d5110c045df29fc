//! Exhaustive exploration of constructible polymers and reachable sites.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::model::{InsertionSite, InsertionSystem, MonomerId, Polymer, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_len: usize,
    pub max_count: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_len: 10_000,
            max_count: 1_000_000,
        }
    }
}

impl Bounds {
    pub fn new(max_len: usize, max_count: usize) -> Self {
        Bounds { max_len, max_count }
    }

    pub fn max_len(max_len: usize) -> Self {
        Bounds {
            max_len,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReachableSet {
    /// Discovery (breadth-first) order.
    pub polymers: Vec<Polymer>,
    pub terminal: Vec<bool>,
    pub truncated: bool,
    pub bounds: Bounds,
}

impl ReachableSet {
    pub fn len(&self) -> usize {
        self.polymers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polymers.is_empty()
    }

    pub fn terminals(&self) -> impl Iterator<Item = &Polymer> {
        self.polymers
            .iter()
            .zip(&self.terminal)
            .filter(|(_, &t)| t)
            .map(|(p, _)| p)
    }

    pub fn terminal_count(&self) -> usize {
        self.terminal.iter().filter(|&&t| t).count()
    }
}

pub fn is_terminal(sys: &InsertionSystem, p: &Polymer) -> bool {
    sys.sites(p).all(|site| !sys.accepts_any(&site))
}

fn leftmost_live_site(sys: &InsertionSystem, p: &Polymer) -> Option<(usize, InsertionSite)> {
    sys.sites(p)
        .enumerate()
        .find(|(_, site)| sys.accepts_any(site))
}

fn explore(sys: &InsertionSystem, bounds: Bounds, leftmost_only: bool) -> ReachableSet {
    let root = sys.initial_polymer();
    let mut seen: HashSet<Polymer> = HashSet::new();
    let mut polymers = Vec::new();
    let mut terminal = Vec::new();
    let mut queue = VecDeque::new();
    let mut truncated = false;

    seen.insert(root.clone());
    queue.push_back(root);
    while let Some(p) = queue.pop_front() {
        let live: Vec<(usize, InsertionSite)> = if leftmost_only {
            leftmost_live_site(sys, &p).into_iter().collect()
        } else {
            sys.sites(&p)
                .enumerate()
                .filter(|(_, s)| sys.accepts_any(s))
                .collect()
        };
        terminal.push(live.is_empty());
        if !live.is_empty() && p.len() >= bounds.max_len {
            truncated = true;
        } else {
            'expand: for (i, site) in live {
                for m in sys.insertable_types(&site) {
                    let child = sys
                        .insert(&p, i, m)
                        .expect("insertable_types only returns insertable types");
                    if seen.contains(&child) {
                        continue;
                    }
                    if seen.len() >= bounds.max_count {
                        truncated = true;
                        break 'expand;
                    }
                    seen.insert(child.clone());
                    queue.push_back(child);
                }
            }
        }
        polymers.push(p);
    }
    ReachableSet {
        polymers,
        terminal,
        truncated,
        bounds,
    }
}

/// Breadth-first closure of `insert` over every site and type.
pub fn enumerate(sys: &InsertionSystem, bounds: Bounds) -> ReachableSet {
    explore(sys, bounds, false)
}

/// Like [`enumerate`] but only the leftmost site that accepts anything is
/// expanded.
///
/// Insertions at distinct sites never interact, so every terminal polymer
/// still appears (built in pre-order of its insertion tree); only the
/// non-terminal intermediates are thinned out.
pub fn enumerate_leftmost(sys: &InsertionSystem, bounds: Bounds) -> ReachableSet {
    explore(sys, bounds, true)
}

/// Terminal string representations with length at most `max_len`.
pub fn language(sys: &InsertionSystem, max_len: usize) -> LanguageResult {
    let reach = enumerate_leftmost(sys, Bounds::max_len(max_len));
    let strings = reach
        .terminals()
        .filter(|p| p.len() <= max_len)
        .map(|p| sys.string_representation(p))
        .collect();
    LanguageResult {
        strings,
        truncated: reach.truncated && reach.polymers.len() >= reach.bounds.max_count,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageResult {
    pub strings: BTreeSet<Vec<Symbol>>,
    /// Set when the polymer-count bound (not the length bound) stopped the
    /// search, so short strings may be missing.
    pub truncated: bool,
}

pub type SiteId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteEdge {
    pub from: SiteId,
    pub monomer: MonomerId,
    pub left: SiteId,
    pub right: SiteId,
}

/// Sites reachable from the initiator site, with one edge per insertable
/// type. Node 0 is the initiator site.
#[derive(Clone, Debug)]
pub struct SiteGraph {
    pub nodes: Vec<InsertionSite>,
    pub edges: Vec<SiteEdge>,
    pub truncated: bool,
    out: Vec<Vec<usize>>,
    index: HashMap<InsertionSite, SiteId>,
}

impl SiteGraph {
    pub fn root(&self) -> SiteId {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn id_of(&self, site: &InsertionSite) -> Option<SiteId> {
        self.index.get(site).copied()
    }

    pub fn out_edges(&self, node: SiteId) -> impl Iterator<Item = &SiteEdge> {
        self.out[node].iter().map(move |&e| &self.edges[e])
    }

    pub fn out_degree(&self, node: SiteId) -> usize {
        self.out[node].len()
    }

    pub fn is_live(&self, node: SiteId) -> bool {
        !self.out[node].is_empty()
    }

    /// True if no site can (transitively) regenerate itself.
    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// A site lying on a cycle, if any.
    pub fn find_cycle(&self) -> Option<SiteId> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack: Vec<(SiteId, usize)> = vec![(start, 0)];
            state[start] = 1;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let succ = self.successors(node);
                if *next < succ.len() {
                    let s = succ[*next];
                    *next += 1;
                    match state[s] {
                        0 => {
                            state[s] = 1;
                            stack.push((s, 0));
                        }
                        1 => return Some(s),
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    fn successors(&self, node: SiteId) -> Vec<SiteId> {
        self.out_edges(node)
            .flat_map(|e| [e.left, e.right])
            .collect()
    }

    /// Number of monomers inserted below each node when every node has at
    /// most one out-edge and the graph is acyclic; `None` otherwise or on
    /// overflow.
    pub fn subtree_sizes(&self) -> Option<Vec<u64>> {
        if self.truncated || self.nodes.iter().enumerate().any(|(i, _)| self.out_degree(i) > 1) {
            return None;
        }
        let order = self.post_order()?;
        let mut size = vec![0u64; self.nodes.len()];
        for node in order {
            if let Some(e) = self.out_edges(node).next() {
                size[node] = 1u64
                    .checked_add(size[e.left])?
                    .checked_add(size[e.right])?;
            }
        }
        Some(size)
    }

    /// Children-before-parents order, or `None` if there is a cycle.
    fn post_order(&self) -> Option<Vec<SiteId>> {
        if !self.is_acyclic() {
            return None;
        }
        let mut done = vec![false; self.nodes.len()];
        let mut order = Vec::with_capacity(self.nodes.len());
        for start in 0..self.nodes.len() {
            if done[start] {
                continue;
            }
            let mut stack = vec![(start, false)];
            while let Some((node, expanded)) = stack.pop() {
                if expanded {
                    if !done[node] {
                        done[node] = true;
                        order.push(node);
                    }
                    continue;
                }
                if done[node] {
                    continue;
                }
                stack.push((node, true));
                for s in self.successors(node) {
                    if !done[s] {
                        stack.push((s, false));
                    }
                }
            }
        }
        Some(order)
    }
}

pub fn site_graph(sys: &InsertionSystem, max_sites: usize) -> SiteGraph {
    let root = sys.initiator().site();
    let mut nodes = vec![root];
    let mut index = HashMap::from([(root, 0usize)]);
    let mut edges = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut truncated = false;
    let mut next = 0;

    let mut intern = |site: InsertionSite,
                      nodes: &mut Vec<InsertionSite>,
                      out: &mut Vec<Vec<usize>>,
                      truncated: &mut bool|
     -> Option<SiteId> {
        if let Some(&id) = index.get(&site) {
            return Some(id);
        }
        if nodes.len() >= max_sites {
            *truncated = true;
            return None;
        }
        let id = nodes.len();
        nodes.push(site);
        out.push(Vec::new());
        index.insert(site, id);
        Some(id)
    };

    while next < nodes.len() {
        let site = nodes[next];
        for m in sys.insertable_types(&site) {
            let (l, r) = site.split(sys.monomer(m));
            let left = intern(l, &mut nodes, &mut out, &mut truncated);
            let right = intern(r, &mut nodes, &mut out, &mut truncated);
            if let (Some(left), Some(right)) = (left, right) {
                out[next].push(edges.len());
                edges.push(SiteEdge {
                    from: next,
                    monomer: m,
                    left,
                    right,
                });
            }
        }
        next += 1;
    }
    SiteGraph {
        nodes,
        edges,
        truncated,
        out,
        index,
    }
}

/// Length of the unique terminal polymer when every reachable site accepts
/// at most one type and no site regenerates itself.
pub fn terminal_length(graph: &SiteGraph) -> Option<u64> {
    let sizes = graph.subtree_sizes()?;
    sizes[graph.root()].checked_add(2)
}

/// Shape of the terminal polymers of an acyclic, fully explored site graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TerminalTrees {
    pub min_len: u64,
    pub max_len: u64,
    /// Distinct insertion trees, an upper bound on distinct terminal
    /// polymers. Saturates at `u128::MAX`.
    pub trees: u128,
}

/// `None` if the graph is truncated or cyclic (no finite bound exists), or
/// a length overflows.
pub fn terminal_trees(graph: &SiteGraph) -> Option<TerminalTrees> {
    if graph.truncated {
        return None;
    }
    let order = graph.post_order()?;
    let n = graph.node_count();
    let (mut lo, mut hi, mut count) = (vec![0u64; n], vec![0u64; n], vec![1u128; n]);
    for node in order {
        if !graph.is_live(node) {
            continue;
        }
        let (mut l, mut h, mut c) = (u64::MAX, 0u64, 0u128);
        for e in graph.out_edges(node) {
            l = l.min(1 + lo[e.left] + lo[e.right]);
            h = h.max(
                1u64.checked_add(hi[e.left])?
                    .checked_add(hi[e.right])?,
            );
            c = c.saturating_add(count[e.left].saturating_mul(count[e.right]));
        }
        lo[node] = l;
        hi[node] = h;
        count[node] = c;
    }
    let root = graph.root();
    Some(TerminalTrees {
        min_len: lo[root] + 2,
        max_len: hi[root].checked_add(2)?,
        trees: count[root],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Two distinct terminal polymers.
    TwoTerminals(Polymer, Polymer),
    /// A site accepting more than one monomer type.
    AmbiguousSite {
        site: InsertionSite,
        types: Vec<MonomerId>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeterminismVerdict {
    Deterministic {
        length: u64,
        /// Present when the polymer was materialised.
        polymer: Option<Polymer>,
    },
    NotDeterministic(Witness),
    Inconclusive(String),
}

impl DeterminismVerdict {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, DeterminismVerdict::Deterministic { .. })
    }

    pub fn is_not_deterministic(&self) -> bool {
        matches!(self, DeterminismVerdict::NotDeterministic(_))
    }
}

fn verdict_from_reach(reach: &ReachableSet) -> DeterminismVerdict {
    let mut terminals = reach.terminals();
    let first = terminals.next().cloned();
    if let (Some(a), Some(b)) = (first.clone(), terminals.next().cloned()) {
        return DeterminismVerdict::NotDeterministic(Witness::TwoTerminals(a, b));
    }
    if reach.truncated {
        return DeterminismVerdict::Inconclusive(format!(
            "search stopped at {} polymers (max length {}, max count {})",
            reach.len(),
            reach.bounds.max_len,
            reach.bounds.max_count
        ));
    }
    match first {
        Some(p) => DeterminismVerdict::Deterministic {
            length: p.len() as u64,
            polymer: Some(p),
        },
        None => DeterminismVerdict::Inconclusive("no terminal polymer found".to_string()),
    }
}

/// Polymer-level check over the full breadth-first closure.
///
/// A complete closure with exactly one terminal `P` means every other
/// constructed polymer is a proper sub-polymer on the way to `P`, hence
/// non-terminal and shorter.
pub fn check_deterministic(sys: &InsertionSystem, bounds: Bounds) -> DeterminismVerdict {
    verdict_from_reach(&enumerate(sys, bounds))
}

/// Polymer-level check over the leftmost-site closure. Sound for the same
/// reason as [`enumerate_leftmost`]: it finds every terminal polymer, and a
/// finite acyclic site graph rules out unbounded non-terminal growth.
pub fn check_deterministic_leftmost(
    sys: &InsertionSystem,
    bounds: Bounds,
    max_sites: usize,
) -> DeterminismVerdict {
    let reach = enumerate_leftmost(sys, bounds);
    let verdict = verdict_from_reach(&reach);
    if verdict.is_deterministic() {
        let graph = site_graph(sys, max_sites);
        if graph.truncated {
            return DeterminismVerdict::Inconclusive("site graph truncated".to_string());
        }
        if let Some(s) = graph.find_cycle() {
            return DeterminismVerdict::Inconclusive(format!(
                "site {} regenerates itself",
                graph.nodes[s]
            ));
        }
    }
    verdict
}

/// Site-level check: at most one insertable type per reachable site and an
/// acyclic, finite site graph. Produces the terminal length without building
/// the polymer.
pub fn check_deterministic_sites(sys: &InsertionSystem, max_sites: usize) -> DeterminismVerdict {
    let graph = site_graph(sys, max_sites);
    for (i, &site) in graph.nodes.iter().enumerate() {
        if graph.out_degree(i) > 1 {
            return DeterminismVerdict::NotDeterministic(Witness::AmbiguousSite {
                site,
                types: graph.out_edges(i).map(|e| e.monomer).collect(),
            });
        }
    }
    if graph.truncated {
        return DeterminismVerdict::Inconclusive(format!(
            "site graph truncated at {max_sites} sites"
        ));
    }
    if let Some(s) = graph.find_cycle() {
        return DeterminismVerdict::Inconclusive(format!(
            "site {} regenerates itself, so growth never ends",
            graph.nodes[s]
        ));
    }
    match terminal_length(&graph) {
        Some(length) => DeterminismVerdict::Deterministic {
            length,
            polymer: None,
        },
        None => DeterminismVerdict::Inconclusive("terminal length overflows u64".to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthViolation {
    pub site: InsertionSite,
    /// Types whose insertion leaves at least one live successor site.
    pub growing: Vec<MonomerId>,
    pub types: Vec<MonomerId>,
}

#[derive(Clone, Debug)]
pub struct GrowthVerdict {
    pub violations: Vec<GrowthViolation>,
    pub sites_checked: usize,
    pub branching_sites: usize,
    pub truncated: bool,
    pub acyclic: bool,
}

impl GrowthVerdict {
    pub fn is_growth_deterministic(&self) -> bool {
        !self.truncated && self.violations.is_empty()
    }

    /// Finite means no site can regenerate itself, so every insertion
    /// sequence stops.
    pub fn is_finite(&self) -> bool {
        !self.truncated && self.acyclic
    }
}

/// At every site accepting two or more types, at most one of those types may
/// leave a successor site that accepts anything.
pub fn check_growth_deterministic(sys: &InsertionSystem, max_sites: usize) -> GrowthVerdict {
    let graph = site_graph(sys, max_sites);
    let mut violations = Vec::new();
    let mut branching_sites = 0;
    for (i, &site) in graph.nodes.iter().enumerate() {
        if graph.out_degree(i) < 2 {
            continue;
        }
        branching_sites += 1;
        let types: Vec<MonomerId> = graph.out_edges(i).map(|e| e.monomer).collect();
        let growing: Vec<MonomerId> = graph
            .out_edges(i)
            .filter(|e| graph.is_live(e.left) || graph.is_live(e.right))
            .map(|e| e.monomer)
            .collect();
        if growing.len() > 1 {
            violations.push(GrowthViolation {
                site,
                growing,
                types,
            });
        }
    }
    GrowthVerdict {
        violations,
        sites_checked: graph.node_count(),
        branching_sites,
        truncated: graph.truncated,
        acyclic: graph.is_acyclic(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Initiator, MonomerSpec, Sign};

    fn s(b: u32) -> Symbol {
        Symbol::new(b)
    }
    fn t(b: u32) -> Symbol {
        Symbol::starred(b)
    }

    fn doubling() -> InsertionSystem {
        InsertionSystem::new(
            3,
            Initiator::new([s(1), s(2)], [t(2), t(1)]),
            vec![
                MonomerSpec::new([t(2), t(1), s(1), s(2)], Sign::Positive, 0.5),
                MonomerSpec::new([t(2), s(0), s(0), s(2)], Sign::Positive, 0.5),
            ],
        )
    }

    fn empty() -> InsertionSystem {
        InsertionSystem::new(2, Initiator::new([s(0), s(1)], [t(1), t(0)]), vec![])
    }

    #[test]
    fn terminality() {
        let sys = doubling();
        assert!(!is_terminal(&sys, &sys.initial_polymer()));
        let p = sys.insert(&sys.initial_polymer(), 0, MonomerId(1)).unwrap();
        assert!(is_terminal(&sys, &p));
        assert!(is_terminal(&empty(), &empty().initial_polymer()));
    }

    #[test]
    fn doubling_enumeration_to_length_five() {
        // Every growth insertion adds one live site, so terminals have odd
        // length while constructed polymers take every length.
        let reach = enumerate(&doubling(), Bounds::max_len(5));
        let lens: BTreeSet<usize> = reach.terminals().map(|p| p.len()).collect();
        assert_eq!(lens, BTreeSet::from([3, 5]));
        let all: BTreeSet<usize> = reach.polymers.iter().map(|p| p.len()).collect();
        assert_eq!(all, BTreeSet::from([2, 3, 4, 5]));
        assert!(reach.truncated);
    }

    #[test]
    fn empty_system_enumerates_to_initiator() {
        let reach = enumerate(&empty(), Bounds::default());
        assert_eq!(reach.len(), 1);
        assert_eq!(reach.terminal_count(), 1);
        assert!(!reach.truncated);
        let g = site_graph(&empty(), 100);
        assert_eq!(g.node_count(), 1);
        assert!(g.edges.is_empty());
        let lang = language(&empty(), 10);
        assert_eq!(lang.strings.len(), 1);
    }

    #[test]
    fn doubling_site_graph_has_three_sites() {
        let g = site_graph(&doubling(), 100);
        assert_eq!(g.node_count(), 3);
        assert!(!g.is_acyclic());
        assert!(g.id_of(&InsertionSite::new([s(1), s(2)], [t(2), s(0)])).is_some());
        assert!(g.id_of(&InsertionSite::new([s(0), s(2)], [t(2), t(1)])).is_some());
    }

    #[test]
    fn doubling_language_at_three() {
        let lang = language(&doubling(), 3);
        let expected: BTreeSet<Vec<Symbol>> =
            BTreeSet::from([vec![s(1), s(2), t(2), s(0), s(0), s(2), t(2), t(1)]]);
        assert_eq!(lang.strings, expected);
    }

    #[test]
    fn doubling_is_not_deterministic() {
        let v = check_deterministic(&doubling(), Bounds::max_len(5));
        assert!(v.is_not_deterministic(), "{v:?}");
        let short = check_deterministic(&doubling(), Bounds::max_len(4));
        assert!(matches!(short, DeterminismVerdict::Inconclusive(_)));
        assert!(check_deterministic_sites(&doubling(), 100).is_not_deterministic());
    }

    #[test]
    fn doubling_growth_check_sees_one_growing_type() {
        let v = check_growth_deterministic(&doubling(), 100);
        assert_eq!(v.branching_sites, 1);
        assert!(v.violations.is_empty());
        assert!(!v.is_finite());
    }

    #[test]
    fn site_graph_truncates() {
        let g = site_graph(&doubling(), 2);
        assert!(g.truncated);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn leftmost_and_full_agree_on_terminals() {
        let sys = doubling();
        let full = enumerate(&sys, Bounds::max_len(7));
        let left = enumerate_leftmost(&sys, Bounds::max_len(7));
        let a: BTreeSet<_> = full.terminals().cloned().collect();
        let b: BTreeSet<_> = left.terminals().cloned().collect();
        assert_eq!(a, b);
        assert!(left.len() <= full.len());
    }

    #[test]
    fn count_bound_truncates() {
        let reach = enumerate(&doubling(), Bounds::new(100, 5));
        assert!(reach.truncated);
        assert_eq!(reach.len(), 5);
    }
}
