use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::set::{generated_subgroup, GroupSet};

/// Uniform `size`-subset of the group, deterministic in `seed`.
pub fn make_random_set(g: &Group, size: usize, seed: u64) -> Result<GroupSet> {
    let n = g.order();
    if size > n {
        return Err(Error::InvalidArgument(format!("size {size} exceeds the group order {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GroupSet::new(g.clone(), index::sample(&mut rng, n, size))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlantedCoset {
    pub generators: Vec<usize>,
    pub translate: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Planted {
    pub set: GroupSet,
    pub cosets: Vec<PlantedCoset>,
    /// Noise elements outside the coset union.
    pub noise: Vec<usize>,
}

/// Union of cosets of random subgroups plus `noise` random elements.
/// On `F2^n` each subgroup has exactly the requested dimension; on other
/// groups it is generated by that many random elements.
pub fn make_planted(g: &Group, subgroup_dims: &[usize], noise: usize, seed: u64) -> Result<Planted> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.order();
    let mut union = GroupSet::empty(g.clone())?;
    let mut cosets = Vec::new();
    for &dim in subgroup_dims {
        if g.is_boolean() && dim > g.rank() {
            return Err(Error::InvalidArgument(format!("dimension {dim} exceeds the rank")));
        }
        let mut gens: Vec<usize> = Vec::new();
        let mut sub = generated_subgroup(g, &[])?;
        let mut attempts = 0;
        while gens.len() < dim {
            attempts += 1;
            if attempts > 64 * (dim + 1) {
                return Err(Error::InvalidArgument(format!("could not find {dim} independent generators")));
            }
            let x = rng.gen_range(0..n);
            if g.is_boolean() && sub.contains(x) {
                continue;
            }
            gens.push(x);
            sub = generated_subgroup(g, &gens)?;
        }
        let translate = rng.gen_range(0..n);
        let coset = sub.translate(translate);
        union = union.union(&coset)?;
        cosets.push(PlantedCoset {
            generators: gens,
            translate,
            size: coset.len(),
        });
    }
    let free = n - union.len();
    if noise > free {
        return Err(Error::InvalidArgument(format!("{noise} noise elements requested, {free} available")));
    }
    let outside: Vec<usize> = (0..n).filter(|&x| !union.contains(x)).collect();
    let mut picked: Vec<usize> = index::sample(&mut rng, outside.len(), noise)
        .into_iter()
        .map(|i| outside[i])
        .collect();
    picked.sort_unstable();
    let set = union.union(&GroupSet::new(g.clone(), picked.iter().copied())?)?;
    Ok(Planted {
        set,
        cosets,
        noise: picked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_sets_are_seeded() {
        let g = Group::boolean(8).unwrap();
        let a = make_random_set(&g, 40, 3).unwrap();
        assert_eq!(a.len(), 40);
        assert_eq!(a, make_random_set(&g, 40, 3).unwrap());
        assert_ne!(a, make_random_set(&g, 40, 4).unwrap());
        assert_eq!(make_random_set(&g, 256, 0).unwrap().len(), 256);
        assert!(make_random_set(&g, 257, 0).is_err());
    }

    #[test]
    fn planted_without_noise_is_a_coset_union() {
        let g = Group::boolean(10).unwrap();
        let p = make_planted(&g, &[3, 2], 0, 11).unwrap();
        assert_eq!(p.cosets[0].size, 8);
        assert_eq!(p.cosets[1].size, 4);
        let mut expected = GroupSet::empty(g.clone()).unwrap();
        for c in &p.cosets {
            let h = generated_subgroup(&g, &c.generators).unwrap();
            expected = expected.union(&h.translate(c.translate)).unwrap();
        }
        assert_eq!(p.set, expected);
        let noisy = make_planted(&g, &[3], 5, 11).unwrap();
        assert_eq!(noisy.set.len(), 13);
    }
}
