//! The fast two-variable counter.
//!
//! A site `(s_{fp(a)}, s_{fp(b)})(s_{fp(b)}*, s_{fp(a)}*)` with `p = b mod 2`
//! encodes `(a, b)`. Each increment starts with a guess: every value of the
//! unknown variable competes for the same site, the matching one carries
//! on and the rest leave dead sites. Only finitely many polymers result.

use std::collections::HashMap;

use crate::model::{Initiator, InsertionSite, InsertionSystem, MonomerSpec, Symbol};

use super::{dedup, f, ConstructionError};

/// Symbol allocation: bases `0..=7r²+r` for the families, `x` next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastLayout {
    pub r: u32,
    pub x: Symbol,
    pub symbol_count: u32,
}

impl FastLayout {
    pub fn new(r: u32) -> Self {
        let x = 7 * r * r + r + 1;
        FastLayout {
            r,
            x: Symbol::new(x),
            symbol_count: x + 1,
        }
    }
}

/// The site encoding `(a, b)` with its parity family.
pub fn fast_state_site(r: u32, a: u32, b: u32) -> InsertionSite {
    let p = b % 2;
    let (sa, sb) = (f(p, a, r), f(p, b, r));
    InsertionSite::new(
        [Symbol::new(sa), Symbol::new(sb)],
        [Symbol::starred(sb), Symbol::starred(sa)],
    )
}

pub fn gen_fast_system(r: u32) -> Result<InsertionSystem, ConstructionError> {
    if r == 0 {
        return Err(ConstructionError::ZeroR);
    }
    if r.is_multiple_of(2) {
        return Err(ConstructionError::EvenR(r));
    }
    let layout = FastLayout::new(r);
    let x = layout.x;
    let fs = |i: u32, n: u32| Symbol::new(f(i, n, r));
    let ft = |i: u32, n: u32| Symbol::starred(f(i, n, r));
    let pos = MonomerSpec::positive;
    let neg = MonomerSpec::negative;
    let mut m: Vec<MonomerSpec> = Vec::new();

    // Inner even-to-odd, b < r and b even.
    let evens: Vec<u32> = (0..r).filter(|b| b % 2 == 0).collect();
    let odds: Vec<u32> = (0..r).filter(|b| b % 2 == 1).collect();
    for &b in &evens {
        for a in 0..=r {
            m.push(neg([ft(1, b + 1), ft(0, a), fs(0, a), x]));
        }
    }
    for &b in &evens {
        for a in 0..=r {
            m.push(pos([ft(0, b), x, fs(1, a), fs(1, b + 1)]));
        }
    }
    for &b in &evens {
        for a in 0..=r {
            m.push(neg([ft(1, b + 1), ft(1, a), fs(0, a), fs(2, b + 2)]));
        }
    }
    for &b in &evens {
        for a in 0..=r {
            m.push(pos([ft(2, b + 2), ft(2, a), x, fs(1, b + 1)]));
        }
    }
    for &b in &evens {
        for a in 0..=r {
            m.push(neg([ft(0, b + 2), ft(0, a), fs(2, a), x]));
        }
    }
    for &b in &evens {
        for a in 0..=r {
            m.push(pos([ft(2, b + 2), x, fs(3, a), fs(0, b + 2)]));
        }
    }
    for &b in &evens {
        for a in 0..=r {
            m.push(neg([x, ft(3, a), fs(0, a), fs(0, b + 2)]));
        }
    }

    // Inner odd-to-even, b < r and b odd.
    for &b in &odds {
        for a in 0..=r {
            m.push(neg([ft(0, b + 1), ft(1, a), fs(1, a), x]));
        }
    }
    for &b in &odds {
        for a in 0..=r {
            m.push(pos([ft(1, b), x, fs(0, a), fs(0, b + 1)]));
        }
    }
    for &b in &odds {
        for a in 0..=r {
            m.push(neg([ft(0, b + 1), ft(0, a), fs(1, a), x]));
        }
    }

    // Outer, a < r.
    for a in 0..r {
        m.push(pos([ft(1, r), x, fs(3, a + 1), fs(1, r)]));
    }
    for a in 0..r {
        m.push(neg([ft(0, 0), ft(3, a + 1), fs(1, a), x]));
    }
    for a in 0..r {
        m.push(pos([ft(1, r), x, fs(0, a + 1), fs(0, 0)]));
    }
    for a in 0..r {
        m.push(neg([ft(0, 0), ft(0, a + 1), fs(3, a + 1), x]));
    }

    let monomers = per_set_concentrations(dedup(m));
    let start = fs(0, 0);
    let initiator = Initiator::new([start, start], [start.complement(), start.complement()]);
    Ok(InsertionSystem::new(
        layout.symbol_count,
        initiator,
        monomers,
    ))
}

/// Equal total concentration per insertion set, split equally inside it.
fn per_set_concentrations(mut monomers: Vec<MonomerSpec>) -> Vec<MonomerSpec> {
    let sig = |m: &MonomerSpec| match m.sign {
        crate::model::Sign::Positive => (m.sign, m.quad[0], m.quad[3]),
        crate::model::Sign::Negative => (m.sign, m.quad[1], m.quad[2]),
    };
    let mut sizes: HashMap<_, usize> = HashMap::new();
    for m in &monomers {
        *sizes.entry(sig(m)).or_default() += 1;
    }
    let sets = sizes.len() as f64;
    for m in &mut monomers {
        m.concentration = 1.0 / sets / sizes[&sig(m)] as f64;
    }
    monomers
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_zero() {
        assert_eq!(gen_fast_system(2), Err(ConstructionError::EvenR(2)));
        assert_eq!(gen_fast_system(0), Err(ConstructionError::ZeroR));
    }

    #[test]
    fn valid_and_sums_to_one() {
        for r in [1, 3, 5] {
            let sys = gen_fast_system(r).unwrap();
            assert!(sys.validate().is_ok(), "r={r}");
            assert!((sys.total_concentration() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn initiator_encodes_zero_zero() {
        let sys = gen_fast_system(3).unwrap();
        assert_eq!(sys.initiator().site(), fast_state_site(3, 0, 0));
    }

    #[test]
    fn x_is_never_complemented() {
        let sys = gen_fast_system(3).unwrap();
        let x = FastLayout::new(3).x;
        for m in sys.monomers() {
            assert!(!m.quad.contains(&x.complement()), "{m}");
        }
    }
}
