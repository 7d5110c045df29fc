//! Integer-pair grammar → insertion system.
//!
//! Symbol layout for modulus `n`: `s0..s(n-1)` for pair components, then
//! `u = sn`, `x = s(n+1)`, then one symbol per terminal in sorted order.

use std::collections::BTreeMap;

use crate::constructions::{dedup, with_equal_concentrations};
use crate::model::{Initiator, InsertionSystem, MonomerId, MonomerSpec, Symbol};

use super::pair::IntegerPairGrammar;

pub const KAPPA: usize = 16;

/// `g`: symbols not in `per_symbol` map to ε.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpressionMap {
    pub per_symbol: BTreeMap<Symbol, String>,
    pub kappa: usize,
}

impl ExpressionMap {
    /// Panics if `kappa` is 0.
    pub fn new(per_symbol: BTreeMap<Symbol, String>, kappa: usize) -> Self {
        assert!(kappa >= 1, "kappa must be at least 1");
        ExpressionMap { per_symbol, kappa }
    }

    pub fn image(&self, s: Symbol) -> Option<&str> {
        self.per_symbol.get(&s).map(String::as_str)
    }
}

pub fn apply_expression(map: &ExpressionMap, s: &[Symbol]) -> Vec<String> {
    s.iter()
        .filter_map(|&c| map.image(c).map(str::to_string))
        .collect()
}

/// True iff every window of `kappa` consecutive symbols of every string has
/// a symbol with a non-ε image. A string shorter than `kappa` is one window.
pub fn kappa_check<'a, I>(map: &ExpressionMap, strings: I) -> bool
where
    I: IntoIterator<Item = &'a [Symbol]>,
{
    strings.into_iter().all(|s| {
        let hit: Vec<bool> = s.iter().map(|&c| map.image(c).is_some()).collect();
        if hit.len() <= map.kappa {
            return hit.contains(&true);
        }
        let mut count = hit[..map.kappa].iter().filter(|&&h| h).count();
        if count == 0 {
            return false;
        }
        for i in map.kappa..hit.len() {
            count += hit[i] as usize;
            count -= hit[i - map.kappa] as usize;
            if count == 0 {
                return false;
            }
        }
        true
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    D1,
    D2,
    D3,
    D4,
}

impl Family {
    pub fn number(self) -> u8 {
        match self {
            Family::D1 => 1,
            Family::D2 => 2,
            Family::D3 => 3,
            Family::D4 => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledSystem {
    pub system: InsertionSystem,
    pub expression: ExpressionMap,
    pub modulus: u32,
    pub u: Symbol,
    pub x: Symbol,
    pub terminal_symbols: BTreeMap<String, Symbol>,
    /// Indexed by monomer id.
    pub families: Vec<Family>,
}

impl CompiledSystem {
    pub fn family(&self, m: MonomerId) -> Family {
        self.families[m.index()]
    }
}

/// ```text
/// Δ1' (s_b, u, s_b*, x)-     per rule (a,d) → (a,b)(c,d)
/// Δ2' (s_a, s_b, s_c*, s_d*)+
/// Δ3' (x, s_c, u*, s_c*)-
/// Δ4' (s_a, t, x, s_d*)+     per rule (a,d) → t
/// ```
/// Duplicates are merged; concentrations are equal; the initiator is
/// `(u*, s_a*)(s_b, u)` for the start pair `(a, b)`.
pub fn to_insertion_system(g: &IntegerPairGrammar) -> CompiledSystem {
    let n = g.modulus;
    let s = Symbol::new;
    let t = Symbol::starred;
    let u = s(n);
    let x = s(n + 1);
    let terminal_symbols: BTreeMap<String, Symbol> = g
        .terminals
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), s(n + 2 + i as u32)))
        .collect();

    let mut tagged: Vec<(MonomerSpec, Family)> = Vec::new();
    for r in &g.binary {
        let ((a, d), (_, b), (c, _)) = (r.lhs, r.left, r.right);
        tagged.push((MonomerSpec::negative([s(b), u, t(b), x]), Family::D1));
        tagged.push((MonomerSpec::positive([s(a), s(b), t(c), t(d)]), Family::D2));
        tagged.push((MonomerSpec::negative([x, s(c), u.complement(), t(c)]), Family::D3));
    }
    for r in &g.unary {
        let (a, d) = r.lhs;
        let sym = terminal_symbols[&r.terminal];
        tagged.push((MonomerSpec::positive([s(a), sym, x, t(d)]), Family::D4));
    }
    let monomers = with_equal_concentrations(dedup(tagged.iter().map(|(m, _)| *m).collect()));
    let families = monomers
        .iter()
        .map(|m| {
            tagged
                .iter()
                .find(|(spec, _)| spec.quad == m.quad && spec.sign == m.sign)
                .map(|(_, f)| *f)
                .expect("kept monomer was tagged")
        })
        .collect();

    let (a, b) = g.start;
    let initiator = Initiator::new([u.complement(), t(a)], [s(b), u]);
    let per_symbol = terminal_symbols
        .iter()
        .map(|(name, &sym)| (sym, name.clone()))
        .collect();
    CompiledSystem {
        system: InsertionSystem::new(n + 2 + g.terminals.len() as u32, initiator, monomers),
        expression: ExpressionMap::new(per_symbol, KAPPA),
        modulus: n,
        u,
        x,
        terminal_symbols,
        families,
    }
}
