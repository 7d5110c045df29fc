//! Deterministic closure without kinetics.

use rand::Rng;
use thiserror::Error;

use crate::model::{InsertionSite, InsertionSystem, MonomerId, Polymer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FastForwardError {
    #[error("site {site} accepts {} monomer types", .types.len())]
    Ambiguous {
        site: InsertionSite,
        types: Vec<MonomerId>,
    },
    #[error("polymer grew past {0} monomers")]
    TooLong(usize),
}

fn unique_type(sys: &InsertionSystem, site: &InsertionSite) -> Result<Option<MonomerId>, FastForwardError> {
    let types = sys.insertable_types(site);
    match types.len() {
        0 => Ok(None),
        1 => Ok(Some(types[0])),
        _ => Err(FastForwardError::Ambiguous { site: *site, types }),
    }
}

/// Fills every live site with its only insertable type, left to right,
/// until nothing can insert or the polymer would exceed `max_len`.
pub fn fast_forward(sys: &InsertionSystem, max_len: usize) -> Result<Polymer, FastForwardError> {
    enum Task {
        Site(InsertionSite),
        Emit(MonomerId),
    }
    let mut ids = Vec::new();
    let mut pending = 0usize;
    let mut stack = vec![Task::Site(sys.initiator().site())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Emit(m) => {
                pending -= 1;
                ids.push(m);
            }
            Task::Site(site) => {
                if let Some(m) = unique_type(sys, &site)? {
                    let (left, right) = site.split(sys.monomer(m));
                    stack.push(Task::Site(right));
                    stack.push(Task::Emit(m));
                    stack.push(Task::Site(left));
                    pending += 1;
                    if ids.len() + pending + 2 > max_len {
                        return Err(FastForwardError::TooLong(max_len));
                    }
                }
            }
        }
    }
    Ok(Polymer::from_ids(*sys.initiator(), ids))
}

/// Same closure but picking the next live site uniformly at random. Given
/// one type per site the result matches [`fast_forward`].
pub fn fast_forward_random<R: Rng>(
    sys: &InsertionSystem,
    max_len: usize,
    rng: &mut R,
) -> Result<Polymer, FastForwardError> {
    struct Node {
        site: InsertionSite,
        filled: Option<(MonomerId, usize, usize)>,
    }
    let mut nodes = vec![Node {
        site: sys.initiator().site(),
        filled: None,
    }];
    let mut live = vec![0usize];
    let mut inserted = 0usize;
    while !live.is_empty() {
        let k = rng.gen_range(0..live.len());
        let n = live.swap_remove(k);
        let site = nodes[n].site;
        if let Some(m) = unique_type(sys, &site)? {
            inserted += 1;
            if inserted + 2 > max_len {
                return Err(FastForwardError::TooLong(max_len));
            }
            let (l, r) = site.split(sys.monomer(m));
            let (li, ri) = (nodes.len(), nodes.len() + 1);
            nodes.push(Node { site: l, filled: None });
            nodes.push(Node { site: r, filled: None });
            nodes[n].filled = Some((m, li, ri));
            live.push(li);
            live.push(ri);
        }
    }
    // In-order walk of the insertion tree.
    let mut ids = Vec::with_capacity(inserted);
    let mut stack: Vec<(usize, bool)> = vec![(0, false)];
    while let Some((n, visited)) = stack.pop() {
        if let Some((m, l, r)) = nodes[n].filled {
            if visited {
                ids.push(m);
            } else {
                stack.push((r, false));
                stack.push((n, true));
                stack.push((l, false));
            }
        }
    }
    Ok(Polymer::from_ids(*sys.initiator(), ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_counter_system, gen_doubling_system};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn doubling_is_rejected() {
        let err = fast_forward(&gen_doubling_system(), 1000).unwrap_err();
        assert!(matches!(err, FastForwardError::Ambiguous { ref types, .. } if types.len() == 2));
    }

    #[test]
    fn random_order_agrees_on_counter() {
        let sys = gen_counter_system(1).unwrap();
        let p = fast_forward(&sys, 10_000).unwrap();
        sys.check_polymer(&p).unwrap();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(fast_forward_random(&sys, 10_000, &mut rng).unwrap(), p);
        }
    }

    #[test]
    fn length_cap() {
        let sys = gen_counter_system(1).unwrap();
        assert_eq!(fast_forward(&sys, 10), Err(FastForwardError::TooLong(10)));
    }
}
