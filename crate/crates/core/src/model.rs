//! Symbols, monomer types, polymers and the two insertion rules.
//!
//! A polymer `Q m1 m2 ... mn R` is stored as the initiator plus the ordered
//! list of inserted monomer ids. The end-caps `Q` and `R` behave like
//! two-symbol monomers: `Q` only ever contributes its pair as the left end of
//! site 0 and `R` only ever contributes its pair as the right end of the last
//! site, so every site is read the same way ("right pair of the left
//! neighbour, left pair of the right neighbour").

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Tolerance used when checking that concentrations sum to at most one.
pub const CONCENTRATION_TOLERANCE: f64 = 1e-9;

/// A symbol `s_k` or its complement `s_k*`.
///
/// Packed as `base << 1 | starred`, so complementing is a single xor and
/// equality is canonical.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

impl Symbol {
    pub const fn new(base: u32) -> Self {
        Symbol(base << 1)
    }

    pub const fn starred(base: u32) -> Self {
        Symbol((base << 1) | 1)
    }

    pub const fn with_star(base: u32, starred: bool) -> Self {
        Symbol((base << 1) | starred as u32)
    }

    pub const fn base(self) -> u32 {
        self.0 >> 1
    }

    pub const fn is_starred(self) -> bool {
        self.0 & 1 == 1
    }

    pub const fn complement(self) -> Self {
        Symbol(self.0 ^ 1)
    }
}

/// `s̅`: flips the star, keeps the base.
pub const fn complement(s: Symbol) -> Symbol {
    s.complement()
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_starred() {
            write!(f, "s{}*", self.base())
        } else {
            write!(f, "s{}", self.base())
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed symbol `{0}` (expected s<k> or s<k>*)")]
pub struct SymbolParseError(pub String);

impl FromStr for Symbol {
    type Err = SymbolParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SymbolParseError(s.to_string());
        let rest = s.strip_prefix('s').ok_or_else(err)?;
        let (digits, starred) = match rest.strip_suffix('*') {
            Some(d) => (d, true),
            None => (rest, false),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let base: u32 = digits.parse().map_err(|_| err())?;
        if base > u32::MAX >> 1 {
            return Err(err());
        }
        Ok(Symbol::with_star(base, starred))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Positive,
    Negative,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MonomerId(pub u32);

impl MonomerId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for MonomerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A monomer type before it has been given an id inside a system.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct MonomerSpec {
    pub quad: [Symbol; 4],
    pub sign: Sign,
    pub concentration: f64,
}

impl MonomerSpec {
    pub fn new(quad: [Symbol; 4], sign: Sign, concentration: f64) -> Self {
        MonomerSpec {
            quad,
            sign,
            concentration,
        }
    }

    pub fn positive(quad: [Symbol; 4]) -> Self {
        Self::new(quad, Sign::Positive, 0.0)
    }

    pub fn negative(quad: [Symbol; 4]) -> Self {
        Self::new(quad, Sign::Negative, 0.0)
    }
}

/// The pair of symbols a monomer type presents to the rule that inserts it:
/// first and fourth for positive types, second and third for negative ones.
/// Two same-signed types with equal signatures are insertable into exactly
/// the same sites.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Signature {
    pub sign: Sign,
    pub pair: (Symbol, Symbol),
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct MonomerType {
    pub id: MonomerId,
    pub quad: [Symbol; 4],
    pub sign: Sign,
    pub concentration: f64,
}

impl MonomerType {
    pub fn signature(&self) -> Signature {
        let q = &self.quad;
        let pair = match self.sign {
            Sign::Positive => (q[0], q[3]),
            Sign::Negative => (q[1], q[2]),
        };
        Signature {
            sign: self.sign,
            pair,
        }
    }

    pub fn left_end(&self) -> [Symbol; 2] {
        [self.quad[0], self.quad[1]]
    }

    pub fn right_end(&self) -> [Symbol; 2] {
        [self.quad[2], self.quad[3]]
    }
}

impl fmt::Display for MonomerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.quad;
        write!(f, "({},{},{},{}){}", q[0], q[1], q[2], q[3], self.sign)
    }
}

/// The four symbols `(a,b)(c,d)` exposed between two adjacent monomer ends.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InsertionSite {
    pub left: [Symbol; 2],
    pub right: [Symbol; 2],
}

impl InsertionSite {
    pub const fn new(left: [Symbol; 2], right: [Symbol; 2]) -> Self {
        InsertionSite { left, right }
    }

    /// `a̅ = d`: the condition for rule 1 (positive insertions).
    pub fn outer_complementary(&self) -> bool {
        self.left[0].complement() == self.right[1]
    }

    /// `b̅ = c`: the condition for rule 2 (negative insertions).
    pub fn inner_complementary(&self) -> bool {
        self.left[1].complement() == self.right[0]
    }

    pub fn is_valid(&self) -> bool {
        self.outer_complementary() || self.inner_complementary()
    }

    /// Signatures of the monomer types this site accepts, one per rule that
    /// applies.
    pub fn accepted_signatures(&self) -> impl Iterator<Item = Signature> {
        let [a, b] = self.left;
        let [c, d] = self.right;
        let positive = self.outer_complementary().then(|| Signature {
            sign: Sign::Positive,
            pair: (b.complement(), c.complement()),
        });
        let negative = self.inner_complementary().then(|| Signature {
            sign: Sign::Negative,
            pair: (a.complement(), d.complement()),
        });
        positive.into_iter().chain(negative)
    }

    /// The two sites created by splicing `m` into this one.
    pub fn split(&self, m: &MonomerType) -> (InsertionSite, InsertionSite) {
        (
            InsertionSite::new(self.left, m.left_end()),
            InsertionSite::new(m.right_end(), self.right),
        )
    }
}

impl fmt::Display for InsertionSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})({},{})",
            self.left[0], self.left[1], self.right[0], self.right[1]
        )
    }
}

impl fmt::Debug for InsertionSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Rule 1: if `a̅ = d`, any `(b̅, e, f, c̅)+` inserts.
/// Rule 2: if `b̅ = c`, any `(e, a̅, d̅, f)-` inserts.
pub fn insertable(site: &InsertionSite, m: &MonomerType) -> bool {
    let [a, b] = site.left;
    let [c, d] = site.right;
    match m.sign {
        Sign::Positive => {
            site.outer_complementary() && m.quad[0] == b.complement() && m.quad[3] == c.complement()
        }
        Sign::Negative => {
            site.inner_complementary() && m.quad[1] == a.complement() && m.quad[2] == d.complement()
        }
    }
}

/// The two-part initiator `Q = (a,b)`, `R = (c,d)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Initiator {
    pub q: [Symbol; 2],
    pub r: [Symbol; 2],
}

impl Initiator {
    pub const fn new(q: [Symbol; 2], r: [Symbol; 2]) -> Self {
        Initiator { q, r }
    }

    pub fn site(&self) -> InsertionSite {
        InsertionSite::new(self.q, self.r)
    }
}

/// `Q m1 ... mn R`, identified by the initiator and the monomer-id sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Polymer {
    initiator: Initiator,
    ids: Vec<MonomerId>,
}

impl Polymer {
    pub fn initial(initiator: Initiator) -> Self {
        Polymer {
            initiator,
            ids: Vec::new(),
        }
    }

    /// Builds a polymer from an explicit monomer sequence without checking
    /// adjacency; use [`InsertionSystem::check_polymer`] to validate.
    pub fn from_ids(initiator: Initiator, ids: Vec<MonomerId>) -> Self {
        Polymer { initiator, ids }
    }

    pub fn initiator(&self) -> &Initiator {
        &self.initiator
    }

    pub fn ids(&self) -> &[MonomerId] {
        &self.ids
    }

    /// Number of monomers including both end-caps.
    pub fn len(&self) -> usize {
        self.ids.len() + 2
    }

    /// Always false: a polymer contains at least its end-caps.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn site_count(&self) -> usize {
        self.ids.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("site index {index} out of range for a polymer with {sites} sites")]
    SiteOutOfRange { index: usize, sites: usize },
    #[error("monomer {monomer} is not insertable into site {site}")]
    NotInsertable {
        site: InsertionSite,
        monomer: MonomerId,
    },
    #[error("unknown monomer id {0}")]
    UnknownMonomer(MonomerId),
    #[error("adjacent ends {site} at position {position} are not complementary")]
    BrokenAdjacency {
        position: usize,
        site: InsertionSite,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ConcentrationSum { sum: f64 },
    ConcentrationOutOfRange { monomer: MonomerId, concentration: f64 },
    InitiatorNotComplementary { site: InsertionSite },
    SymbolOutOfRange { monomer: Option<MonomerId>, symbol: Symbol },
    DuplicateMonomer { first: MonomerId, duplicate: MonomerId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConcentrationSum { sum } => {
                write!(f, "concentrations sum to {sum}, which exceeds 1")
            }
            Violation::ConcentrationOutOfRange {
                monomer,
                concentration,
            } => write!(
                f,
                "monomer {monomer} has concentration {concentration} outside (0, 1]"
            ),
            Violation::InitiatorNotComplementary { site } => {
                write!(f, "initiator {site} has neither a̅ = d nor b̅ = c")
            }
            Violation::SymbolOutOfRange {
                monomer: Some(m),
                symbol,
            } => write!(f, "monomer {m} uses symbol {symbol} outside the alphabet"),
            Violation::SymbolOutOfRange {
                monomer: None,
                symbol,
            } => write!(f, "initiator uses symbol {symbol} outside the alphabet"),
            Violation::DuplicateMonomer { first, duplicate } => {
                write!(f, "monomer {duplicate} duplicates monomer {first}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `(Σ, Δ, Q, R)`. Monomer ids are positions in `monomers`.
#[derive(Clone)]
pub struct InsertionSystem {
    symbol_count: u32,
    monomers: Vec<MonomerType>,
    initiator: Initiator,
    by_signature: HashMap<Signature, Vec<MonomerId>>,
}

impl PartialEq for InsertionSystem {
    fn eq(&self, other: &Self) -> bool {
        self.symbol_count == other.symbol_count
            && self.initiator == other.initiator
            && self.monomers == other.monomers
    }
}

impl fmt::Debug for InsertionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InsertionSystem")
            .field("symbol_count", &self.symbol_count)
            .field("initiator", &self.initiator)
            .field("monomers", &self.monomers)
            .finish()
    }
}

impl InsertionSystem {
    /// Assigns ids in order. No validation happens here; see [`Self::validate`].
    pub fn new(symbol_count: u32, initiator: Initiator, monomers: Vec<MonomerSpec>) -> Self {
        let monomers: Vec<MonomerType> = monomers
            .into_iter()
            .enumerate()
            .map(|(i, m)| MonomerType {
                id: MonomerId(i as u32),
                quad: m.quad,
                sign: m.sign,
                concentration: m.concentration,
            })
            .collect();
        let mut by_signature: HashMap<Signature, Vec<MonomerId>> = HashMap::new();
        for m in &monomers {
            by_signature.entry(m.signature()).or_default().push(m.id);
        }
        InsertionSystem {
            symbol_count,
            monomers,
            initiator,
            by_signature,
        }
    }

    pub fn symbol_count(&self) -> u32 {
        self.symbol_count
    }

    pub fn monomers(&self) -> &[MonomerType] {
        &self.monomers
    }

    pub fn monomer(&self, id: MonomerId) -> &MonomerType {
        &self.monomers[id.index()]
    }

    pub fn initiator(&self) -> &Initiator {
        &self.initiator
    }

    pub fn size(&self) -> usize {
        self.monomers.len()
    }

    pub fn initial_polymer(&self) -> Polymer {
        Polymer::initial(self.initiator)
    }

    pub fn total_concentration(&self) -> f64 {
        self.monomers.iter().map(|m| m.concentration).sum()
    }

    /// Returns a copy with the given concentrations (indexed by monomer id).
    pub fn with_concentrations(&self, concentrations: &[f64]) -> Self {
        assert_eq!(concentrations.len(), self.monomers.len());
        let mut out = self.clone();
        for (m, &c) in out.monomers.iter_mut().zip(concentrations) {
            m.concentration = c;
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for m in &self.monomers {
            if !(m.concentration > 0.0 && m.concentration <= 1.0 + CONCENTRATION_TOLERANCE) {
                violations.push(Violation::ConcentrationOutOfRange {
                    monomer: m.id,
                    concentration: m.concentration,
                });
            }
        }
        let sum = self.total_concentration();
        if sum > 1.0 + CONCENTRATION_TOLERANCE {
            violations.push(Violation::ConcentrationSum { sum });
        }
        let site = self.initiator.site();
        if !site.is_valid() {
            violations.push(Violation::InitiatorNotComplementary { site });
        }
        for &s in self.initiator.q.iter().chain(&self.initiator.r) {
            if s.base() >= self.symbol_count {
                violations.push(Violation::SymbolOutOfRange {
                    monomer: None,
                    symbol: s,
                });
            }
        }
        for m in &self.monomers {
            for &s in &m.quad {
                if s.base() >= self.symbol_count {
                    violations.push(Violation::SymbolOutOfRange {
                        monomer: Some(m.id),
                        symbol: s,
                    });
                }
            }
        }
        let mut seen: HashMap<([Symbol; 4], Sign), MonomerId> = HashMap::new();
        for m in &self.monomers {
            if let Some(&first) = seen.get(&(m.quad, m.sign)) {
                violations.push(Violation::DuplicateMonomer {
                    first,
                    duplicate: m.id,
                });
            } else {
                seen.insert((m.quad, m.sign), m.id);
            }
        }
        ValidationReport { violations }
    }

    /// Exactly the monomer types insertable into `site`, in id order.
    pub fn insertable_types(&self, site: &InsertionSite) -> Vec<MonomerId> {
        let mut out = Vec::new();
        for sig in site.accepted_signatures() {
            if let Some(ids) = self.by_signature.get(&sig) {
                out.extend_from_slice(ids);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn accepts_any(&self, site: &InsertionSite) -> bool {
        site.accepted_signatures()
            .any(|sig| self.by_signature.contains_key(&sig))
    }

    /// Sum of concentrations of the types insertable into `site`.
    pub fn site_rate(&self, site: &InsertionSite) -> f64 {
        self.insertable_types(site)
            .iter()
            .map(|&id| self.monomer(id).concentration)
            .sum()
    }

    fn left_end_at(&self, p: &Polymer, position: usize) -> [Symbol; 2] {
        if position == 0 {
            p.initiator.q
        } else {
            self.monomer(p.ids[position - 1]).right_end()
        }
    }

    fn right_end_at(&self, p: &Polymer, position: usize) -> [Symbol; 2] {
        if position == p.ids.len() {
            p.initiator.r
        } else {
            self.monomer(p.ids[position]).left_end()
        }
    }

    /// The site between ends `i` and `i + 1`.
    pub fn site_at(&self, p: &Polymer, i: usize) -> Result<InsertionSite, ModelError> {
        if i >= p.site_count() {
            return Err(ModelError::SiteOutOfRange {
                index: i,
                sites: p.site_count(),
            });
        }
        Ok(InsertionSite::new(
            self.left_end_at(p, i),
            self.right_end_at(p, i),
        ))
    }

    pub fn sites<'a>(&'a self, p: &'a Polymer) -> impl Iterator<Item = InsertionSite> + 'a {
        (0..p.site_count())
            .map(move |i| InsertionSite::new(self.left_end_at(p, i), self.right_end_at(p, i)))
    }

    pub fn insert(&self, p: &Polymer, i: usize, m: MonomerId) -> Result<Polymer, ModelError> {
        let site = self.site_at(p, i)?;
        let monomer = self
            .monomers
            .get(m.index())
            .ok_or(ModelError::UnknownMonomer(m))?;
        if !insertable(&site, monomer) {
            return Err(ModelError::NotInsertable { site, monomer: m });
        }
        let mut ids = Vec::with_capacity(p.ids.len() + 1);
        ids.extend_from_slice(&p.ids[..i]);
        ids.push(m);
        ids.extend_from_slice(&p.ids[i..]);
        Ok(Polymer {
            initiator: p.initiator,
            ids,
        })
    }

    pub fn string_representation(&self, p: &Polymer) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(4 * p.len() - 4);
        out.extend_from_slice(&p.initiator.q);
        for &id in &p.ids {
            out.extend_from_slice(&self.monomer(id).quad);
        }
        out.extend_from_slice(&p.initiator.r);
        out
    }

    /// Checks the adjacency invariant on every site of `p`.
    pub fn check_polymer(&self, p: &Polymer) -> Result<(), ModelError> {
        if let Some(&bad) = p.ids.iter().find(|id| id.index() >= self.monomers.len()) {
            return Err(ModelError::UnknownMonomer(bad));
        }
        for (position, site) in self.sites(p).enumerate() {
            if !site.is_valid() {
                return Err(ModelError::BrokenAdjacency { position, site });
            }
        }
        Ok(())
    }
}

pub fn format_symbols(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
