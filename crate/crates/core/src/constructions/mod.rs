//! Generators for the explicit systems: the deterministic three-variable
//! counter, the fast two-variable counter with guessing, and the
//! two-type doubling system.

mod counter;
mod fast;
mod fast_forward;

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{Initiator, InsertionSystem, MonomerSpec, Sign, Symbol};

pub use counter::{counter_state_site, gen_counter_system, CounterLayout};
pub use fast::{fast_state_site, gen_fast_system, FastLayout};
pub use fast_forward::{fast_forward, fast_forward_random, FastForwardError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("r must be positive")]
    ZeroR,
    #[error("r must be odd, got {0}")]
    EvenR(u32),
    #[error("growth concentration must lie strictly between 0 and 1, got {0}")]
    BadBias(String),
}

/// `f_i(n) = n + 2ir²`, which keeps the symbol families for different `i`
/// disjoint over `0 ≤ n ≤ r`.
pub fn f(i: u32, n: u32, r: u32) -> u32 {
    n + 2 * i * r * r
}

/// The four single-symbol rewrites a pair of monomers can perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReplacementKind {
    /// `(a, b)(c, a̅) ⇝ (a, d)(c, a̅)`
    Row1,
    /// `(a, b)(c, a̅) ⇝ (a, b)(d, a̅)`
    Row2,
    /// `(b, a)(a̅, c) ⇝ (d, a)(a̅, c)`
    Row3,
    /// `(b, a)(a̅, c) ⇝ (b, a)(a̅, d)`
    Row4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplacementSpec {
    pub kind: ReplacementKind,
    pub a: Symbol,
    pub b: Symbol,
    pub c: Symbol,
    pub d: Symbol,
    /// Helper symbol carried between the two monomers.
    pub u: Symbol,
    /// Blocking symbol; its complement must not occur on any monomer.
    pub x: Symbol,
}

impl ReplacementSpec {
    /// The site the pair rewrites.
    pub fn site_before(&self) -> crate::model::InsertionSite {
        use crate::model::InsertionSite as S;
        let (a, b, c) = (self.a, self.b, self.c);
        match self.kind {
            ReplacementKind::Row1 | ReplacementKind::Row2 => S::new([a, b], [c, a.complement()]),
            ReplacementKind::Row3 | ReplacementKind::Row4 => S::new([b, a], [a.complement(), c]),
        }
    }

    /// The site left behind once both monomers are in.
    pub fn site_after(&self) -> crate::model::InsertionSite {
        use crate::model::InsertionSite as S;
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        match self.kind {
            ReplacementKind::Row1 => S::new([a, d], [c, a.complement()]),
            ReplacementKind::Row2 => S::new([a, b], [d, a.complement()]),
            ReplacementKind::Row3 => S::new([d, a], [a.complement(), c]),
            ReplacementKind::Row4 => S::new([b, a], [a.complement(), d]),
        }
    }
}

/// The monomer pair implementing a replacement, in insertion order.
pub fn compile_replacement(spec: &ReplacementSpec) -> (MonomerSpec, MonomerSpec) {
    let ReplacementSpec {
        kind,
        a,
        b,
        c,
        d,
        u,
        x,
    } = *spec;
    let (bs, cs, us, as_) = (b.complement(), c.complement(), u.complement(), a.complement());
    match kind {
        ReplacementKind::Row1 => (
            MonomerSpec::positive([bs, x, u, cs]),
            MonomerSpec::negative([x, us, a, d]),
        ),
        ReplacementKind::Row2 => (
            MonomerSpec::positive([bs, u, x, cs]),
            MonomerSpec::negative([d, as_, us, x]),
        ),
        ReplacementKind::Row3 => (
            MonomerSpec::negative([x, bs, cs, u]),
            MonomerSpec::positive([us, x, d, a]),
        ),
        ReplacementKind::Row4 => (
            MonomerSpec::negative([u, bs, cs, x]),
            MonomerSpec::positive([as_, d, x, us]),
        ),
    }
}

/// Drops repeated `(quad, sign)` entries, keeping first occurrences.
pub(crate) fn dedup(monomers: Vec<MonomerSpec>) -> Vec<MonomerSpec> {
    let mut seen = HashSet::new();
    monomers
        .into_iter()
        .filter(|m| seen.insert((m.quad, m.sign)))
        .collect()
}

pub(crate) fn with_equal_concentrations(mut monomers: Vec<MonomerSpec>) -> Vec<MonomerSpec> {
    let c = 1.0 / monomers.len() as f64;
    for m in &mut monomers {
        m.concentration = c;
    }
    monomers
}

/// Initiator `(s1,s2)(s2*,s1*)` with `(s2*,s1*,s1,s2)+` (regrows the
/// initiator site on both sides) and `(s2*,x,x,s2)+` (caps it). `x` is
/// base 0. Equal concentrations.
pub fn gen_doubling_system() -> InsertionSystem {
    doubling(0.5)
}

/// Doubling system with concentration `growth` on the regrowing type and
/// `1 - growth` on the cap.
pub fn gen_doubling_system_biased(growth: f64) -> Result<InsertionSystem, ConstructionError> {
    if !(growth > 0.0 && growth < 1.0) {
        return Err(ConstructionError::BadBias(growth.to_string()));
    }
    Ok(doubling(growth))
}

fn doubling(growth: f64) -> InsertionSystem {
    let x = Symbol::new(0);
    let (s1, s2) = (Symbol::new(1), Symbol::new(2));
    InsertionSystem::new(
        3,
        Initiator::new([s1, s2], [s2.complement(), s1.complement()]),
        vec![
            MonomerSpec::new(
                [s2.complement(), s1.complement(), s1, s2],
                Sign::Positive,
                growth,
            ),
            MonomerSpec::new([s2.complement(), x, x, s2], Sign::Positive, 1.0 - growth),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{insertable, InsertionSite, MonomerId, MonomerType};

    fn s(b: u32) -> Symbol {
        Symbol::new(b)
    }

    fn typed(m: MonomerSpec) -> MonomerType {
        MonomerType {
            id: MonomerId(0),
            quad: m.quad,
            sign: m.sign,
            concentration: 1.0,
        }
    }

    #[test]
    fn f_families_are_disjoint() {
        for r in 1..=4 {
            let mut seen = HashSet::new();
            for i in 0..13 {
                for n in 0..=r {
                    assert!(seen.insert(f(i, n, r)), "r={r} i={i} n={n}");
                }
            }
        }
    }

    #[test]
    fn row_one_and_four_match_table() {
        let (a, b, c, d, u, x) = (s(1), s(2), s(3), s(4), s(5), s(0));
        let spec = ReplacementSpec {
            kind: ReplacementKind::Row1,
            a,
            b,
            c,
            d,
            u,
            x,
        };
        let (p, n) = compile_replacement(&spec);
        assert_eq!(p, MonomerSpec::positive([b.complement(), x, u, c.complement()]));
        assert_eq!(n, MonomerSpec::negative([x, u.complement(), a, d]));
        let (n, p) = compile_replacement(&ReplacementSpec {
            kind: ReplacementKind::Row4,
            ..spec
        });
        assert_eq!(n, MonomerSpec::negative([u, b.complement(), c.complement(), x]));
        assert_eq!(p, MonomerSpec::positive([a.complement(), d, x, u.complement()]));
    }

    /// Applies both monomers at the rewritten site and checks that exactly
    /// the advertised site survives.
    #[test]
    fn every_row_rewrites_one_symbol_and_kills_the_rest() {
        let (a, b, c, d, u, x) = (s(1), s(2), s(3), s(4), s(5), s(0));
        for kind in [
            ReplacementKind::Row1,
            ReplacementKind::Row2,
            ReplacementKind::Row3,
            ReplacementKind::Row4,
        ] {
            let spec = ReplacementSpec {
                kind,
                a,
                b,
                c,
                d,
                u,
                x,
            };
            let (first, second) = compile_replacement(&spec);
            let (first, second) = (typed(first), typed(second));
            let site = spec.site_before();
            assert!(insertable(&site, &first), "{kind:?} first");
            let (l, r) = site.split(&first);
            let (keep, mid, dead) = if insertable(&l, &second) {
                let (ll, lr) = l.split(&second);
                (ll, lr, r)
            } else {
                assert!(insertable(&r, &second), "{kind:?} second");
                let (rl, rr) = r.split(&second);
                (rr, rl, l)
            };
            // The surviving site is the outer one, formed from the
            // original ends and the second monomer.
            let survivors: Vec<InsertionSite> = [keep, mid, dead]
                .into_iter()
                .filter(|st| *st == spec.site_after())
                .collect();
            assert_eq!(survivors.len(), 1, "{kind:?}");
            for other in [keep, mid, dead] {
                if other != spec.site_after() {
                    let touches_x = other.left.contains(&x) || other.right.contains(&x);
                    assert!(touches_x, "{kind:?}: by-product site {other} lacks x");
                    assert!(!insertable(&other, &first) && !insertable(&other, &second));
                }
            }
        }
    }

    #[test]
    fn doubling_layout() {
        let sys = gen_doubling_system();
        assert!(sys.validate().is_ok());
        assert_eq!(sys.size(), 2);
        assert_eq!(
            sys.initiator().site(),
            InsertionSite::new([s(1), s(2)], [Symbol::starred(2), Symbol::starred(1)])
        );
        assert!(gen_doubling_system_biased(1.0).is_err());
        let biased = gen_doubling_system_biased(0.9).unwrap();
        assert!((biased.total_concentration() - 1.0).abs() < 1e-12);
    }
}
