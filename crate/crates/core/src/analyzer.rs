//! Site classes, insertion sets and per-lineage statistics over traces.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::kinetics::{Side, Trace, TraceEvent};
use crate::model::{insertable, InsertionSite, InsertionSystem, MonomerId, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiteClass {
    /// `a̅ = d` only.
    Positive,
    /// Both `a̅ = d` and `b̅ = c`.
    Mixed,
    /// `b̅ = c` only.
    Negative,
}

impl fmt::Display for SiteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteClass::Positive => "positive",
            SiteClass::Mixed => "mixed",
            SiteClass::Negative => "negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzerError {
    #[error("site {0} is not valid")]
    InvalidSite(InsertionSite),
    #[error("event {event}: {reason}")]
    Mismatch { event: usize, reason: String },
}

pub fn classify_site(site: &InsertionSite) -> Result<SiteClass, AnalyzerError> {
    match (site.outer_complementary(), site.inner_complementary()) {
        (true, false) => Ok(SiteClass::Positive),
        (true, true) => Ok(SiteClass::Mixed),
        (false, true) => Ok(SiteClass::Negative),
        (false, false) => Err(AnalyzerError::InvalidSite(*site)),
    }
}

/// Same-signed types grouped by the sites they accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionSetPartition {
    /// Ordered by smallest member id; members ascending.
    pub sets: Vec<Vec<MonomerId>>,
    /// Monomer id → index into `sets`.
    pub set_of: Vec<usize>,
}

impl InsertionSetPartition {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn non_singleton(&self) -> usize {
        self.sets.iter().filter(|s| s.len() > 1).count()
    }
}

/// A positive `(p,q,r,s)+` accepts exactly the sites `(a,p̅)(s̅,a̅)`, a
/// negative `(p,q,r,s)-` exactly `(q̅,b)(b̅,r̅)`, so the signature determines
/// the accepted set.
pub fn insertion_sets(sys: &InsertionSystem) -> InsertionSetPartition {
    let mut index: HashMap<Signature, usize> = HashMap::new();
    let mut sets: Vec<Vec<MonomerId>> = Vec::new();
    let mut set_of = Vec::with_capacity(sys.size());
    for m in sys.monomers() {
        let next = sets.len();
        let k = *index.entry(m.signature()).or_insert(next);
        if k == next {
            sets.push(Vec::new());
        }
        sets[k].push(m.id);
        set_of.push(k);
    }
    InsertionSetPartition { sets, set_of }
}

/// One root-to-leaf chain of insertions, each into a site created by the
/// previous one. The initiator site is position 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineageStats {
    pub leaf_event: usize,
    pub length: usize,
    pub max_nonpositive_run: usize,
    pub repeated_sites: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequenceReport {
    pub class_counts: BTreeMap<SiteClass, usize>,
    pub lineages: Vec<LineageStats>,
}

impl SequenceReport {
    pub fn count(&self, class: SiteClass) -> usize {
        self.class_counts.get(&class).copied().unwrap_or(0)
    }

    /// Longest non-positive run over lineages with no repeated site.
    pub fn max_run_without_repeats(&self) -> usize {
        self.lineages
            .iter()
            .filter(|l| !l.repeated_sites)
            .map(|l| l.max_nonpositive_run)
            .max()
            .unwrap_or(0)
    }

    pub fn lineages_with_repeats(&self) -> usize {
        self.lineages.iter().filter(|l| l.repeated_sites).count()
    }
}

/// Recovers parent links from `(time, site_index, monomer)` steps by
/// replaying them on the initial polymer.
pub fn events_from_steps(
    sys: &InsertionSystem,
    steps: &[(f64, usize, MonomerId)],
) -> Result<Vec<TraceEvent>, AnalyzerError> {
    let mut p = sys.initial_polymer();
    // Event (and side) that created each current site.
    let mut creator: Vec<Option<(usize, Side)>> = vec![None];
    let mut events = Vec::with_capacity(steps.len());
    for (k, &(time, site_index, monomer)) in steps.iter().enumerate() {
        p = sys
            .insert(&p, site_index, monomer)
            .map_err(|e| AnalyzerError::Mismatch {
                event: k,
                reason: e.to_string(),
            })?;
        let parent = creator[site_index];
        creator.splice(
            site_index..=site_index,
            [Some((k, Side::Left)), Some((k, Side::Right))],
        );
        events.push(TraceEvent {
            time,
            site_index,
            monomer,
            parent,
        });
    }
    Ok(events)
}

/// Rebuilds the site of every event from parent links.
pub fn event_sites(sys: &InsertionSystem, events: &[TraceEvent]) -> Result<Vec<InsertionSite>, AnalyzerError> {
    let (table, ids) = interned_sites(sys, events)?;
    Ok(ids.iter().map(|&i| table[i as usize]).collect())
}

/// Distinct sites, and for each event the index of its site. Children of
/// a (site, monomer) pair are memoised so only new sites are hashed.
fn interned_sites(
    sys: &InsertionSystem,
    events: &[TraceEvent],
) -> Result<(Vec<InsertionSite>, Vec<u32>), AnalyzerError> {
    const UNKNOWN: u32 = u32::MAX;
    let width = 2 * sys.size();
    let mut table: Vec<InsertionSite> = Vec::new();
    let mut index: HashMap<InsertionSite, u32> = HashMap::new();
    let mut memo: Vec<u32> = Vec::new();
    let mut intern = |site: InsertionSite, table: &mut Vec<InsertionSite>, memo: &mut Vec<u32>| {
        *index.entry(site).or_insert_with(|| {
            table.push(site);
            memo.resize(memo.len() + width, UNKNOWN);
            (table.len() - 1) as u32
        })
    };
    let mut ids: Vec<u32> = Vec::with_capacity(events.len());
    let mut root_used = false;
    for (k, e) in events.iter().enumerate() {
        let mismatch = |reason: String| AnalyzerError::Mismatch { event: k, reason };
        if e.monomer.index() >= sys.size() {
            return Err(mismatch(format!("unknown monomer {}", e.monomer)));
        }
        let id = match e.parent {
            None => {
                if root_used {
                    return Err(mismatch("second insertion into the initiator site".into()));
                }
                root_used = true;
                intern(sys.initiator().site(), &mut table, &mut memo)
            }
            Some((p, side)) => {
                if p >= k {
                    return Err(mismatch(format!("parent {p} is not earlier")));
                }
                let parent = ids[p] as usize;
                let slot = parent * width + 2 * events[p].monomer.index() + side as usize;
                if memo[slot] == UNKNOWN {
                    let (l, r) = table[parent].split(sys.monomer(events[p].monomer));
                    let child = match side {
                        Side::Left => l,
                        Side::Right => r,
                    };
                    memo[slot] = intern(child, &mut table, &mut memo);
                }
                memo[slot]
            }
        };
        let site = &table[id as usize];
        if !insertable(site, sys.monomer(e.monomer)) {
            return Err(mismatch(format!("monomer {} does not fit {site}", e.monomer)));
        }
        ids.push(id);
    }
    Ok((table, ids))
}

pub fn sequence_stats(trace: &Trace, sys: &InsertionSystem) -> Result<SequenceReport, AnalyzerError> {
    event_stats(sys, &trace.events)
}

pub fn event_stats(sys: &InsertionSystem, events: &[TraceEvent]) -> Result<SequenceReport, AnalyzerError> {
    let (table, site_id) = interned_sites(sys, events)?;
    let mut report = SequenceReport::default();
    let classes = table
        .iter()
        .map(classify_site)
        .collect::<Result<Vec<SiteClass>, _>>()?;
    for &id in &site_id {
        *report.class_counts.entry(classes[id as usize]).or_insert(0) += 1;
    }

    const NONE: u32 = u32::MAX;
    // Children and site id per event, kept together for locality.
    let mut nodes: Vec<[u32; 3]> = site_id.iter().map(|&id| [NONE, NONE, id]).collect();
    let mut roots = Vec::new();
    for (k, e) in events.iter().enumerate() {
        match e.parent {
            Some((p, side)) => {
                let slot = &mut nodes[p][side as usize];
                if *slot != NONE {
                    return Err(AnalyzerError::Mismatch {
                        event: k,
                        reason: format!("site already filled by event {}", *slot),
                    });
                }
                *slot = k as u32;
            }
            None => roots.push(k as u32),
        }
    }

    // Depth-first walk keeping, for the current path, a count of each site
    // and the number of sites seen more than once.
    struct Frame {
        event: u32,
        site: u32,
        run: u32,
        best: u32,
        entered: bool,
    }
    let mut on_path = vec![0u32; classes.len()];
    let mut repeats = 0usize;
    let mut depth = 0usize;
    let mut stack: Vec<Frame> = roots
        .iter()
        .rev()
        .map(|&event| Frame {
            event,
            site: nodes[event as usize][2],
            run: 0,
            best: 0,
            entered: false,
        })
        .collect();
    while let Some(frame) = stack.last_mut() {
        let k = frame.event as usize;
        let id = frame.site as usize;
        if frame.entered {
            on_path[id] -= 1;
            if on_path[id] == 1 {
                repeats -= 1;
            }
            depth -= 1;
            stack.pop();
            continue;
        }
        frame.entered = true;
        depth += 1;
        on_path[id] += 1;
        if on_path[id] == 2 {
            repeats += 1;
        }
        let run = if classes[id] == SiteClass::Positive {
            0
        } else {
            frame.run + 1
        };
        let best = frame.best.max(run);
        let [left, right, _] = nodes[k];
        if left == NONE && right == NONE {
            report.lineages.push(LineageStats {
                leaf_event: k,
                length: depth,
                max_nonpositive_run: best as usize,
                repeated_sites: repeats > 0,
            });
        }
        for child in [right, left] {
            if child != NONE {
                stack.push(Frame {
                    event: child,
                    site: nodes[child as usize][2],
                    run,
                    best,
                    entered: false,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_counter_system, gen_doubling_system};
    use crate::kinetics::{simulate, SimConfig, Stop};
    use crate::model::{Polymer, Symbol};

    fn s(b: u32) -> Symbol {
        Symbol::new(b)
    }

    #[test]
    fn three_forms() {
        let (a, b, c) = (s(0), s(1), s(2));
        let pos = InsertionSite::new([a, b], [c.complement(), a.complement()]);
        let mixed = InsertionSite::new([a, b], [b.complement(), a.complement()]);
        let neg = InsertionSite::new([b, a], [a.complement(), c.complement()]);
        assert_eq!(classify_site(&pos), Ok(SiteClass::Positive));
        assert_eq!(classify_site(&mixed), Ok(SiteClass::Mixed));
        assert_eq!(classify_site(&neg), Ok(SiteClass::Negative));
        let bad = InsertionSite::new([a, b], [c, c]);
        assert!(classify_site(&bad).is_err());
    }

    #[test]
    fn counter_sets_are_singletons() {
        let sys = gen_counter_system(2).unwrap();
        let part = insertion_sets(&sys);
        assert_eq!(part.len(), sys.size());
        assert_eq!(part.largest(), 1);
    }

    #[test]
    fn empty_trace_gives_zero_counts() {
        let sys = gen_doubling_system();
        let trace = Trace {
            events: vec![],
            final_polymer: Polymer::initial(*sys.initiator()),
            final_time: 0.0,
            outcome: crate::kinetics::Outcome::Terminal,
            final_rate: 0.0,
        };
        let rep = sequence_stats(&trace, &sys).unwrap();
        assert!(rep.class_counts.is_empty());
        assert!(rep.lineages.is_empty());
    }

    #[test]
    fn doubling_lineages_repeat() {
        let sys = gen_doubling_system();
        let trace = (0..)
            .map(|seed| simulate(&sys, &SimConfig::new(seed, Stop::TargetLength(40))).unwrap())
            .find(|t| t.outcome == crate::kinetics::Outcome::TargetReached)
            .unwrap();
        let rep = sequence_stats(&trace, &sys).unwrap();
        assert!(rep.lineages_with_repeats() > 0);
    }

    #[test]
    fn counter_lineages_respect_the_bound() {
        let sys = gen_counter_system(1).unwrap();
        let trace = simulate(&sys, &SimConfig::new(11, Stop::Terminal)).unwrap();
        let rep = sequence_stats(&trace, &sys).unwrap();
        let total: usize = rep.class_counts.values().sum();
        assert_eq!(total, 243);
        assert!(rep.max_run_without_repeats() <= 3);
    }

    #[test]
    fn replayed_steps_recover_parents() {
        let sys = gen_counter_system(1).unwrap();
        let trace = simulate(&sys, &SimConfig::new(3, Stop::Terminal)).unwrap();
        let steps: Vec<_> = trace
            .events
            .iter()
            .map(|e| (e.time, e.site_index, e.monomer))
            .collect();
        assert_eq!(events_from_steps(&sys, &steps).unwrap(), trace.events);
        let bad = [(0.0, 5, MonomerId(0))];
        assert!(events_from_steps(&sys, &bad).is_err());
    }

    #[test]
    fn mismatched_trace_is_rejected() {
        let sys = gen_doubling_system();
        let trace = Trace {
            events: vec![TraceEvent {
                time: 1.0,
                site_index: 0,
                monomer: MonomerId(0),
                parent: Some((3, Side::Left)),
            }],
            final_polymer: Polymer::initial(*sys.initiator()),
            final_time: 1.0,
            outcome: crate::kinetics::Outcome::Terminal,
            final_rate: 0.0,
        };
        assert!(matches!(
            sequence_stats(&trace, &sys),
            Err(AnalyzerError::Mismatch { event: 0, .. })
        ));
    }
}
