//! The deterministic three-variable counter.
//!
//! A site `(s_a, s_b)(s_c, s_a*)` encodes the state `(a, b, c)`. Inner
//! increments (`b < r`) duplicate the site, middle increments (`b = r`,
//! `c < r`) reset `b` and bump `c`, outer increments (`b = c = r`, `a < r`)
//! reset both and bump `a`. The only doubling steps are the inner ones, so
//! the terminal polymer has length `2^Θ(r³)` from `O(r²)` monomer types.

use crate::model::{Initiator, InsertionSite, InsertionSystem, MonomerSpec, Symbol};

use super::{dedup, f, with_equal_concentrations, ConstructionError};

/// Symbol allocation for a given `r`: bases `0..=25r²+r` hold the counter
/// and helper families and `x` takes the next base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterLayout {
    pub r: u32,
    pub x: Symbol,
    pub symbol_count: u32,
}

impl CounterLayout {
    pub fn new(r: u32) -> Self {
        let x = 25 * r * r + r + 1;
        CounterLayout {
            r,
            x: Symbol::new(x),
            symbol_count: x + 1,
        }
    }

    /// Upper bound on the number of monomer types.
    pub fn max_types(&self) -> usize {
        let r = self.r as usize;
        12 * r * r + 24 * r + 3
    }
}

/// The site encoding counter state `(a, b, c)`.
pub fn counter_state_site(a: u32, b: u32, c: u32) -> InsertionSite {
    InsertionSite::new(
        [Symbol::new(a), Symbol::new(b)],
        [Symbol::new(c), Symbol::starred(a)],
    )
}

pub fn gen_counter_system(r: u32) -> Result<InsertionSystem, ConstructionError> {
    if r == 0 {
        return Err(ConstructionError::ZeroR);
    }
    let layout = CounterLayout::new(r);
    let x = layout.x;
    let s = Symbol::new;
    let t = Symbol::starred;
    let fs = |i: u32, n: u32| Symbol::new(f(i, n, r));
    let ft = |i: u32, n: u32| Symbol::starred(f(i, n, r));
    let all = 0..=r;
    let below = 0..r;
    let mut m: Vec<MonomerSpec> = Vec::new();
    let pos = MonomerSpec::positive;
    let neg = MonomerSpec::negative;

    // Inner increments, b < r.
    for b in below.clone() {
        for c in all.clone() {
            m.push(pos([t(b), fs(8, c), fs(8, b + 1), t(c)]));
        }
    }
    for c in all.clone() {
        for a in all.clone() {
            m.push(neg([fs(8, c), t(a), ft(8, c), x]));
        }
    }
    for b in below.clone() {
        for a in all.clone() {
            m.push(neg([x, ft(8, b + 1), s(a), s(b + 1)]));
        }
    }
    for b in below.clone() {
        for c in all.clone() {
            m.push(pos([t(b), x, fs(10, b), ft(8, c)]));
        }
    }
    for b in below.clone() {
        for a in all.clone() {
            m.push(neg([x, ft(10, b), s(a), fs(9, b)]));
        }
    }
    for b in below.clone() {
        for c in all.clone() {
            m.push(pos([ft(9, b), fs(11, c), x, ft(8, c)]));
        }
    }
    for c in all.clone() {
        for a in all.clone() {
            m.push(neg([s(c), t(a), ft(11, c), x]));
        }
    }
    for b in below.clone() {
        for c in all.clone() {
            m.push(pos([ft(9, b), x, fs(12, b + 1), t(c)]));
        }
    }
    for b in below.clone() {
        for a in all.clone() {
            m.push(neg([x, ft(12, b + 1), s(a), s(b + 1)]));
        }
    }

    // Middle increments, c < r.
    for c in below.clone() {
        m.push(pos([t(r), fs(2, c), x, t(c)]));
        for a in all.clone() {
            m.push(neg([fs(1, c), t(a), ft(2, c), x]));
        }
    }
    for c in below.clone() {
        m.push(pos([t(r), x, fs(3, c), ft(1, c)]));
        for a in all.clone() {
            m.push(neg([x, ft(3, c), s(a), s(0)]));
        }
    }
    for c in below.clone() {
        m.push(pos([t(0), fs(4, c + 1), x, ft(1, c)]));
        for a in all.clone() {
            m.push(neg([s(c + 1), t(a), ft(4, c + 1), x]));
        }
    }

    // Outer increments, a < r.
    m.push(pos([t(r), x, fs(6, r), t(r)]));
    for a in below.clone() {
        m.push(neg([x, ft(6, r), s(a), fs(5, a)]));
    }
    for a in below.clone() {
        m.push(pos([ft(5, a), ft(7, r), x, t(r)]));
        m.push(neg([ft(5, a), t(a), fs(7, r), x]));
    }
    for a in below.clone() {
        m.push(pos([ft(5, a), x, s(a + 1), fs(5, a)]));
        m.push(neg([s(0), t(a + 1), s(a), x]));
    }
    for a in below {
        m.push(pos([ft(5, a), x, fs(7, r), t(0)]));
        m.push(neg([x, ft(7, r), s(a + 1), s(0)]));
    }

    let monomers = with_equal_concentrations(dedup(m));
    let initiator = Initiator::new([s(0), s(0)], [s(0), t(0)]);
    Ok(InsertionSystem::new(
        layout.symbol_count,
        initiator,
        monomers,
    ))
}
