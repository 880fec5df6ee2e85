use serde::Serialize;

use crate::error::{Error, Result};
use crate::set::GroupSet;
use crate::setstat;

/// Largest supported rank for the exhaustive search.
pub const SEARCH_MAX_RANK: usize = 14;
pub const DEFAULT_NODE_CAP: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceWitness {
    pub subspace: GroupSet,
    /// Canonical basis: each vector is the smallest of its coset modulo the
    /// span of the earlier ones, in increasing order.
    pub basis: Vec<usize>,
    pub translate: usize,
    pub dim: usize,
    pub codim: usize,
    pub nodes: usize,
}

struct Search<'a> {
    target: &'a GroupSet,
    nodes: usize,
    cap: usize,
    best_dim: usize,
    best: Option<Vec<usize>>,
}

impl Search<'_> {
    /// Extends the subspace `members` (closed under XOR, inside the target)
    /// by canonical vectors greater than `last`.
    fn run(&mut self, members: &[usize], basis: &mut Vec<usize>, last: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SearchCapExceeded(self.cap));
        }
        if basis.len() > self.best_dim {
            self.best_dim = basis.len();
            self.best = Some(basis.clone());
        }
        let candidates: Vec<usize> = self
            .target
            .iter()
            .filter(|&v| v > last && members.iter().all(|&h| self.target.contains(h ^ v)))
            .collect();
        // Every element added by a deeper extension is itself a candidate,
        // so (2^extra - 1) |H| <= #candidates.
        let mut extra = 0;
        while extra < 63 && ((1usize << (extra + 1)) - 1) * members.len() <= candidates.len() {
            extra += 1;
        }
        if basis.len() + extra <= self.best_dim {
            return Ok(());
        }
        for &v in &candidates {
            if members.iter().any(|&h| h ^ v < v) {
                continue;
            }
            let mut next = members.to_vec();
            next.extend(members.iter().map(|&h| h ^ v));
            basis.push(v);
            self.run(&next, basis, v)?;
            basis.pop();
        }
        Ok(())
    }
}

/// Largest subspace `H` with `H + z ⊆ B' + B' + B'` for some `z`, found by
/// exhaustive canonical-basis search; `None` when the best has codimension
/// above `max_codim`.
pub fn brute_force_3b_subspace(
    b_prime: &GroupSet,
    max_codim: usize,
    node_cap: usize,
) -> Result<Option<SubspaceWitness>> {
    let g = b_prime.group();
    if !g.is_boolean() {
        return Err(Error::NotBoolean);
    }
    if g.rank() > SEARCH_MAX_RANK {
        return Err(Error::SizeLimit {
            what: "subspace search rank",
            limit: SEARCH_MAX_RANK,
            actual: g.rank(),
        });
    }
    if max_codim > g.rank() {
        return Err(Error::InvalidArgument(format!("max_codim {max_codim} exceeds the rank")));
    }
    if b_prime.is_empty() {
        return Ok(None);
    }
    let two = setstat::sumset(b_prime, b_prime)?;
    let three = setstat::sumset(&two, b_prime)?;
    let min_dim = g.rank() - max_codim;
    // {0} + z fits for any z in 3B'
    let mut best: (usize, Vec<usize>, usize) = (0, Vec::new(), three.members()[0]);
    let mut nodes = 0;
    for z in three.iter() {
        let target = three.translate(z);
        let mut s = Search {
            target: &target,
            nodes: 0,
            cap: node_cap.saturating_sub(nodes),
            best_dim: best.0,
            best: None,
        };
        s.run(&[0], &mut Vec::new(), 0)?;
        nodes += s.nodes;
        if let Some(basis) = s.best {
            best = (basis.len(), basis, z);
        }
        if best.0 == g.rank() {
            break;
        }
    }
    let (dim, basis, z) = best;
    if dim < min_dim {
        return Ok(None);
    }
    let mut members = vec![0usize];
    for &v in &basis {
        let shifted: Vec<usize> = members.iter().map(|&h| h ^ v).collect();
        members.extend(shifted);
    }
    let subspace = GroupSet::new(g.clone(), members)?;
    if !subspace.translate(z).is_subset(&three) {
        return Err(Error::InclusionFailed {
            element: subspace.iter().find(|&h| !three.contains(h ^ z)).unwrap_or(0),
        });
    }
    Ok(Some(SubspaceWitness {
        subspace,
        basis,
        translate: z,
        dim,
        codim: g.rank() - dim,
        nodes,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    /// Every subspace of F2^n, as sorted member lists.
    fn all_subspaces(n: usize) -> Vec<Vec<usize>> {
        let mut seen = std::collections::BTreeSet::new();
        let total = 1usize << n;
        let mut frontier = vec![vec![0usize]];
        seen.insert(vec![0usize]);
        while let Some(h) = frontier.pop() {
            for v in 1..total {
                if h.contains(&v) {
                    continue;
                }
                let mut next = h.clone();
                next.extend(h.iter().map(|&x| x ^ v));
                next.sort_unstable();
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn oracle(b: &GroupSet) -> usize {
        let g = b.group();
        let two = setstat::sumset(b, b).unwrap();
        let three = setstat::sumset(&two, b).unwrap();
        let mut best = 0;
        for h in all_subspaces(g.rank()) {
            if three.iter().any(|z| h.iter().all(|&x| three.contains(x ^ z))) {
                best = best.max(h.len());
            }
        }
        best
    }

    #[test]
    fn subspace_is_its_own_answer() {
        let g = Group::boolean(8).unwrap();
        let h = GroupSet::new(g, 0..16).unwrap();
        let w = brute_force_3b_subspace(&h, 8, DEFAULT_NODE_CAP).unwrap().unwrap();
        assert_eq!(w.subspace, h);
        assert_eq!(w.translate, 0);
    }

    #[test]
    fn two_points_give_small_subspace() {
        let g = Group::boolean(6).unwrap();
        let b = GroupSet::new(g, [3, 40]).unwrap();
        let w = brute_force_3b_subspace(&b, 6, DEFAULT_NODE_CAP).unwrap().unwrap();
        // 3B' = {3, 40}, so H + z ⊆ {3, 40} forces |H| <= 2
        assert_eq!(w.dim, oracle(&b).trailing_zeros() as usize);
        assert_eq!(w.dim, 1);
        assert!(brute_force_3b_subspace(&b, 4, DEFAULT_NODE_CAP).unwrap().is_none());
    }

    #[test]
    fn matches_exhaustive_oracle_in_f2_4() {
        let g = Group::boolean(4).unwrap();
        for seed in 0..40u64 {
            let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
            let members: Vec<usize> = (0..16)
                .filter(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    x % 3 == 0
                })
                .collect();
            let b = GroupSet::new(g.clone(), members).unwrap();
            if b.is_empty() {
                continue;
            }
            let w = brute_force_3b_subspace(&b, 4, DEFAULT_NODE_CAP).unwrap().unwrap();
            assert_eq!(w.subspace.len(), oracle(&b), "seed {seed}");
        }
    }

    #[test]
    fn cap_is_reported() {
        let g = Group::boolean(8).unwrap();
        let b = GroupSet::new(g, (0..256).filter(|x| x % 3 != 0)).unwrap();
        assert!(matches!(brute_force_3b_subspace(&b, 8, 5), Err(Error::SearchCapExceeded(5))));
    }
}
