//! Continuous-time stochastic growth (Gillespie direct method).
//!
//! Every (site, type) pair is an exponential clock with rate equal to the
//! type's concentration. A site never changes its set of insertable types,
//! so it leaves the live set only when it is consumed; sites are grouped
//! into buckets of equal total rate and the next site is drawn in two
//! steps (bucket by weight, then uniformly inside it).
//!
//! Randomness: one [`ChaCha8Rng`] per run, seeded with `seed_from_u64`.
//! Trial `i` of a batch with master seed `m` uses [`trial_seed`]`(m, i)`.
//! Per event the run draws the waiting time first (inverse CDF), then the
//! site, then (only when the site accepts several types) the type.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{InsertionSite, InsertionSystem, MonomerId, Polymer};

pub const DEFAULT_MAX_EVENTS: u64 = 10_000_000;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix(master, i) = splitmix64(master ^ splitmix64(i))`.
pub fn trial_seed(master: u64, i: u64) -> u64 {
    splitmix64(master ^ splitmix64(i))
}

/// `-ln(1 - U) / rate` with `U` uniform on `[0, 1)`.
pub fn exponential<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Until the polymer has at least this many monomers (end-caps included).
    TargetLength(usize),
    MaxEvents(u64),
    MaxTime(f64),
    /// Until nothing can insert.
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub stop: Stop,
    /// Safety cap on events for every stop mode.
    pub max_events: u64,
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(seed: u64, stop: Stop) -> Self {
        SimConfig {
            seed,
            stop,
            max_events: DEFAULT_MAX_EVENTS,
            record_trace: true,
        }
    }

    pub fn with_max_events(mut self, max_events: u64) -> Self {
        self.max_events = max_events;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    TargetReached,
    Terminal,
    EventLimit,
    TimeLimit,
    SafetyCap,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::TargetReached => "target",
            Outcome::Terminal => "terminal",
            Outcome::EventLimit => "event_limit",
            Outcome::TimeLimit => "time_limit",
            Outcome::SafetyCap => "safety_cap",
        }
    }

    /// Whether a run with this outcome finished the job `stop` describes.
    pub fn completes(self, stop: Stop) -> bool {
        match stop {
            Stop::TargetLength(_) => self == Outcome::TargetReached,
            Stop::Terminal => self == Outcome::Terminal,
            Stop::MaxEvents(_) => matches!(self, Outcome::EventLimit | Outcome::Terminal),
            Stop::MaxTime(_) => matches!(self, Outcome::TimeLimit | Outcome::Terminal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    /// Position of the site in the polymer at the moment of insertion.
    pub site_index: usize,
    pub monomer: MonomerId,
    /// The earlier event whose insertion created this site, and on which
    /// side of the inserted monomer. `None` for the initiator site.
    pub parent: Option<(usize, Side)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub final_polymer: Polymer,
    pub final_time: f64,
    pub outcome: Outcome,
    /// Total rate as maintained incrementally at the end of the run.
    pub final_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub time: f64,
    pub length: u64,
    pub events: u64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticsError {
    #[error("polymer is terminal; nothing can insert")]
    Terminal,
    #[error("system is invalid: {0}")]
    InvalidSystem(String),
    #[error("at least one trial is required")]
    NoTrials,
}

/// Sum over sites of the concentrations of their insertable types.
pub fn total_rate(sys: &InsertionSystem, p: &Polymer) -> f64 {
    sys.sites(p).map(|s| sys.site_rate(&s)).sum()
}

/// One Gillespie step on an explicit polymer: `(dt, site_index, type)`.
pub fn step<R: Rng>(
    sys: &InsertionSystem,
    p: &Polymer,
    rng: &mut R,
) -> Result<(f64, usize, MonomerId), KineticsError> {
    let choices: Vec<(usize, MonomerId, f64)> = sys
        .sites(p)
        .enumerate()
        .flat_map(|(i, site)| {
            sys.insertable_types(&site)
                .into_iter()
                .map(move |m| (i, m, sys.monomer(m).concentration))
        })
        .collect();
    let total: f64 = choices.iter().map(|c| c.2).sum();
    if choices.is_empty() || total <= 0.0 {
        return Err(KineticsError::Terminal);
    }
    let dt = exponential(rng, total);
    let mut u = rng.gen::<f64>() * total;
    for &(i, m, c) in &choices {
        if u < c {
            return Ok((dt, i, m));
        }
        u -= c;
    }
    let &(i, m, _) = choices.last().expect("non-empty");
    Ok((dt, i, m))
}

type SiteId = u32;

struct SiteInfo {
    site: InsertionSite,
    types: Vec<MonomerId>,
    cumulative: Vec<f64>,
    rate: f64,
    children: Vec<Option<(SiteId, SiteId)>>,
}

/// Interned sites with their types, rates and successors, filled lazily.
struct SiteTable<'a> {
    sys: &'a InsertionSystem,
    ids: HashMap<InsertionSite, SiteId>,
    info: Vec<SiteInfo>,
}

impl<'a> SiteTable<'a> {
    fn new(sys: &'a InsertionSystem) -> Self {
        SiteTable {
            sys,
            ids: HashMap::new(),
            info: Vec::new(),
        }
    }

    fn intern(&mut self, site: InsertionSite) -> SiteId {
        if let Some(&id) = self.ids.get(&site) {
            return id;
        }
        let types = self.sys.insertable_types(&site);
        let mut acc = 0.0;
        let cumulative: Vec<f64> = types
            .iter()
            .map(|&m| {
                acc += self.sys.monomer(m).concentration;
                acc
            })
            .collect();
        let id = self.info.len() as SiteId;
        self.info.push(SiteInfo {
            site,
            children: vec![None; types.len()],
            types,
            cumulative,
            rate: acc,
        });
        self.ids.insert(site, id);
        id
    }

    fn children(&mut self, id: SiteId, k: usize) -> (SiteId, SiteId) {
        if let Some(c) = self.info[id as usize].children[k] {
            return c;
        }
        let info = &self.info[id as usize];
        let (l, r) = info.site.split(self.sys.monomer(info.types[k]));
        let c = (self.intern(l), self.intern(r));
        self.info[id as usize].children[k] = Some(c);
        c
    }
}

/// Live entries grouped by exact site rate.
struct Buckets {
    rates: Vec<f64>,
    entries: Vec<Vec<u32>>,
    by_bits: HashMap<u64, usize>,
    live: usize,
}

impl Buckets {
    fn new() -> Self {
        Buckets {
            rates: Vec::new(),
            entries: Vec::new(),
            by_bits: HashMap::new(),
            live: 0,
        }
    }

    fn bucket_for(&mut self, rate: f64) -> usize {
        let next = self.rates.len();
        let b = *self.by_bits.entry(rate.to_bits()).or_insert(next);
        if b == next {
            self.rates.push(rate);
            self.entries.push(Vec::new());
        }
        b
    }

    fn push(&mut self, bucket: usize, entry: u32) {
        self.entries[bucket].push(entry);
        self.live += 1;
    }

    fn total(&self) -> f64 {
        self.rates
            .iter()
            .zip(&self.entries)
            .map(|(r, e)| r * e.len() as f64)
            .sum()
    }

    /// Removes and returns the entry that `u ∈ [0, total)` lands on.
    fn take(&mut self, mut u: f64) -> u32 {
        let mut last = None;
        for (b, (rate, entries)) in self.rates.iter().zip(&self.entries).enumerate() {
            if entries.is_empty() {
                continue;
            }
            let w = rate * entries.len() as f64;
            if u < w {
                let k = ((u / rate) as usize).min(entries.len() - 1);
                return self.remove(b, k);
            }
            u -= w;
            last = Some(b);
        }
        // Rounding pushed u past the end; use the last non-empty bucket.
        let b = last.expect("take called with no live entries");
        let k = self.entries[b].len() - 1;
        self.remove(b, k)
    }

    fn remove(&mut self, b: usize, k: usize) -> u32 {
        self.live -= 1;
        self.entries[b].swap_remove(k)
    }
}

/// What a run remembers about each insertion.
trait Tracker {
    fn root(&mut self, site: SiteId) -> u32;
    fn site_of(&self, entry: u32) -> SiteId;
    fn insert(
        &mut self,
        entry: u32,
        time: f64,
        monomer: MonomerId,
        left: SiteId,
        right: SiteId,
    ) -> (u32, u32);
}

struct Lean;

impl Tracker for Lean {
    fn root(&mut self, site: SiteId) -> u32 {
        site
    }
    fn site_of(&self, entry: u32) -> SiteId {
        entry
    }
    fn insert(&mut self, _: u32, _: f64, _: MonomerId, left: SiteId, right: SiteId) -> (u32, u32) {
        (left, right)
    }
}

const NO_EVENT: u32 = u32::MAX;

/// Slot 0 is the initiator site; event `e` creates slots `2e+1` (left)
/// and `2e+2` (right).
struct Arena {
    /// Site of each slot and the event that filled it.
    slots: Vec<(SiteId, u32)>,
    events: Vec<(f64, u32, MonomerId)>,
}

impl Arena {
    fn creator(slot: u32) -> Option<(u32, Side)> {
        (slot > 0).then(|| {
            let side = if slot % 2 == 1 { Side::Left } else { Side::Right };
            ((slot - 1) / 2, side)
        })
    }
}

impl Tracker for Arena {
    fn root(&mut self, site: SiteId) -> u32 {
        self.slots.push((site, NO_EVENT));
        0
    }
    fn site_of(&self, entry: u32) -> SiteId {
        self.slots[entry as usize].0
    }
    fn insert(
        &mut self,
        entry: u32,
        time: f64,
        monomer: MonomerId,
        left: SiteId,
        right: SiteId,
    ) -> (u32, u32) {
        let event = self.events.len() as u32;
        self.events.push((time, entry, monomer));
        let l = self.slots.len() as u32;
        self.slots.push((left, NO_EVENT));
        self.slots.push((right, NO_EVENT));
        self.slots[entry as usize].1 = event;
        (l, l + 1)
    }
}

struct EngineResult {
    summary: RunSummary,
    final_rate: f64,
}

fn run_engine<T: Tracker>(sys: &InsertionSystem, cfg: &SimConfig, tracker: &mut T) -> EngineResult {
    let mut rng = rng_from_seed(cfg.seed);
    let mut table = SiteTable::new(sys);
    let mut buckets = Buckets::new();
    let mut bucket_of: Vec<u32> = Vec::new();
    const UNSET: u32 = u32::MAX;

    let mut enqueue = |table: &SiteTable, buckets: &mut Buckets, site: SiteId, entry: u32| {
        let rate = table.info[site as usize].rate;
        if rate <= 0.0 {
            return;
        }
        if bucket_of.len() <= site as usize {
            bucket_of.resize(table.info.len(), UNSET);
        }
        if bucket_of[site as usize] == UNSET {
            bucket_of[site as usize] = buckets.bucket_for(rate) as u32;
        }
        buckets.push(bucket_of[site as usize] as usize, entry);
    };

    let root = table.intern(sys.initiator().site());
    let root_entry = tracker.root(root);
    enqueue(&table, &mut buckets, root, root_entry);

    let mut time = 0.0;
    let mut length: u64 = 2;
    let mut events: u64 = 0;
    let outcome = loop {
        match cfg.stop {
            Stop::TargetLength(n) if length >= n as u64 => break Outcome::TargetReached,
            Stop::MaxEvents(n) if events >= n => break Outcome::EventLimit,
            _ => {}
        }
        if buckets.live == 0 {
            break Outcome::Terminal;
        }
        if events >= cfg.max_events {
            break Outcome::SafetyCap;
        }
        let total = buckets.total();
        let dt = exponential(&mut rng, total);
        if let Stop::MaxTime(limit) = cfg.stop {
            if time + dt > limit {
                time = limit;
                break Outcome::TimeLimit;
            }
        }
        time += dt;
        let entry = buckets.take(rng.gen::<f64>() * total);
        let site = tracker.site_of(entry);
        let info = &table.info[site as usize];
        let k = if info.types.len() == 1 {
            0
        } else {
            let v = rng.gen::<f64>() * info.rate;
            info.cumulative
                .iter()
                .position(|&c| v < c)
                .unwrap_or(info.types.len() - 1)
        };
        let monomer = info.types[k];
        let (l, r) = table.children(site, k);
        let (le, re) = tracker.insert(entry, time, monomer, l, r);
        enqueue(&table, &mut buckets, l, le);
        enqueue(&table, &mut buckets, r, re);
        length += 1;
        events += 1;
    };
    EngineResult {
        summary: RunSummary {
            time,
            length,
            events,
            outcome,
        },
        final_rate: buckets.total(),
    }
}

fn check_valid(sys: &InsertionSystem) -> Result<(), KineticsError> {
    let report = sys.validate();
    if report.is_ok() {
        Ok(())
    } else {
        Err(KineticsError::InvalidSystem(
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}

/// Runs without keeping per-event data. Same trajectory as [`simulate`]
/// for the same config.
pub fn run(sys: &InsertionSystem, cfg: &SimConfig) -> Result<RunSummary, KineticsError> {
    check_valid(sys)?;
    Ok(run_engine(sys, cfg, &mut Lean).summary)
}

struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count over positions `< i`.
    fn prefix(&self, i: usize) -> u32 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

pub fn simulate(sys: &InsertionSystem, cfg: &SimConfig) -> Result<Trace, KineticsError> {
    check_valid(sys)?;
    let mut arena = Arena {
        slots: Vec::new(),
        events: Vec::new(),
    };
    let result = run_engine(sys, cfg, &mut arena);

    // In-order position of each event's monomer; the final polymer falls
    // out of the same walk.
    let mut position = vec![0u32; arena.events.len()];
    let mut ids = Vec::with_capacity(arena.events.len());
    let mut stack: Vec<(u32, bool)> = vec![(0, false)];
    while let Some((slot, visited)) = stack.pop() {
        let e = arena.slots[slot as usize].1;
        if e == NO_EVENT {
            continue;
        }
        if visited {
            position[e as usize] = ids.len() as u32;
            ids.push(arena.events[e as usize].2);
        } else {
            stack.push((2 * e + 2, false));
            stack.push((slot, true));
            stack.push((2 * e + 1, false));
        }
    }

    // The site filled by event k sits after one site per earlier monomer
    // to its left.
    let events = if cfg.record_trace {
        let mut earlier = Fenwick::new(arena.events.len());
        arena
            .events
            .iter()
            .enumerate()
            .map(|(k, &(time, slot, monomer))| {
                let pos = position[k] as usize;
                let site_index = earlier.prefix(pos) as usize;
                earlier.add(pos);
                TraceEvent {
                    time,
                    site_index,
                    monomer,
                    parent: Arena::creator(slot).map(|(e, side)| (e as usize, side)),
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(Trace {
        events,
        final_polymer: Polymer::from_ids(*sys.initiator(), ids),
        final_time: result.summary.time,
        outcome: result.summary.outcome,
        final_rate: result.final_rate,
    })
}

/// Summary statistics of completion times over the completed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSummary {
    pub mean: f64,
    /// Sample variance; `None` with a single completed run.
    pub variance: Option<f64>,
    pub median: f64,
    /// `(p, value)` pairs for p in 0.05, 0.25, 0.5, 0.75, 0.95, 0.99.
    pub quantiles: Vec<(f64, f64)>,
    pub min: f64,
    pub max: f64,
}

impl TimeSummary {
    pub fn standard_error(&self, n: usize) -> Option<f64> {
        self.variance.map(|v| (v / n as f64).sqrt())
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_times(times: &[f64]) -> Option<TimeSummary> {
    if times.is_empty() {
        return None;
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let variance =
        (times.len() > 1).then(|| times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0));
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantiles = [0.05, 0.25, 0.5, 0.75, 0.95, 0.99]
        .iter()
        .map(|&p| (p, quantile(&sorted, p)))
        .collect();
    Some(TimeSummary {
        mean,
        variance,
        median: quantile(&sorted, 0.5),
        quantiles,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub n: usize,
    pub completed: usize,
    /// Over completed runs only.
    pub times: Option<TimeSummary>,
    /// Final length → number of runs.
    pub length_histogram: BTreeMap<u64, usize>,
    pub outcomes: BTreeMap<Outcome, usize>,
    /// Per-trial results in trial order.
    pub samples: Vec<RunSummary>,
}

impl TrialStats {
    pub fn from_samples(samples: Vec<RunSummary>, stop: Stop) -> Self {
        let mut length_histogram = BTreeMap::new();
        let mut outcomes = BTreeMap::new();
        for s in &samples {
            *length_histogram.entry(s.length).or_insert(0) += 1;
            *outcomes.entry(s.outcome).or_insert(0) += 1;
        }
        let times: Vec<f64> = samples
            .iter()
            .filter(|s| s.outcome.completes(stop))
            .map(|s| s.time)
            .collect();
        TrialStats {
            n: samples.len(),
            completed: times.len(),
            times: summarize_times(&times),
            length_histogram,
            outcomes,
            samples,
        }
    }

    pub fn completed_times(&self, stop: Stop) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.outcome.completes(stop))
            .map(|s| s.time)
            .collect()
    }
}

/// `n` independent runs; trial `i` uses seed `trial_seed(cfg.seed, i)`.
/// `jobs = 0` uses rayon's default pool. Results do not depend on `jobs`.
pub fn trials(
    sys: &InsertionSystem,
    cfg: &SimConfig,
    n: usize,
    jobs: usize,
) -> Result<TrialStats, KineticsError> {
    if n == 0 {
        return Err(KineticsError::NoTrials);
    }
    check_valid(sys)?;
    let one = |i: usize| {
        let c = SimConfig {
            seed: trial_seed(cfg.seed, i as u64),
            ..*cfg
        };
        run_engine(sys, &c, &mut Lean).summary
    };
    let samples: Vec<RunSummary> = if jobs == 1 {
        (0..n).map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| (0..n).into_par_iter().map(one).collect())
    };
    Ok(TrialStats::from_samples(samples, cfg.stop))
}
