//! Linear algebra over F2 on bit-packed vectors.

use crate::error::Result;
use crate::group::Group;
use crate::set::GroupSet;

pub fn parity(x: usize) -> u32 {
    x.count_ones() & 1
}

/// A subspace of `F2^n` with a basis in which each vector owns a bit
/// (`keys[i]`) that no other basis vector has, so coordinates are read off
/// directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Subspace {
    n: u32,
    basis: Vec<usize>,
    keys: Vec<u32>,
}

impl F2Subspace {
    /// Reduced echelon basis of the span, pivots on the highest bits.
    pub fn span(n: u32, gens: &[usize]) -> F2Subspace {
        let mut rows: Vec<usize> = Vec::new();
        for &g in gens {
            let mut v = g;
            for &r in &rows {
                let top = usize::BITS - 1 - r.leading_zeros();
                if v >> top & 1 == 1 {
                    v ^= r;
                }
            }
            if v != 0 {
                let top = usize::BITS - 1 - v.leading_zeros();
                for r in rows.iter_mut() {
                    if *r >> top & 1 == 1 {
                        *r ^= v;
                    }
                }
                rows.push(v);
                rows.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        let keys = rows.iter().map(|r| usize::BITS - 1 - r.leading_zeros()).collect();
        F2Subspace { n, basis: rows, keys }
    }

    /// `{x : ⟨λ, x⟩ = 0 for every λ}`.
    pub fn annihilator(n: u32, lambda: &[usize]) -> F2Subspace {
        let rows = F2Subspace::span(n, lambda);
        let pivots: u64 = rows.keys.iter().fold(0, |m, &k| m | 1 << k);
        let mut basis = Vec::new();
        let mut keys = Vec::new();
        for f in 0..n {
            if pivots >> f & 1 == 1 {
                continue;
            }
            let mut v = 1usize << f;
            for (r, &p) in rows.basis.iter().zip(&rows.keys) {
                if r >> f & 1 == 1 {
                    v |= 1 << p;
                }
            }
            basis.push(v);
            keys.push(f);
        }
        F2Subspace { n, basis, keys }
    }

    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// `Σ c_i v_i` for the coefficient bits `c`.
    pub fn embed(&self, c: usize) -> usize {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| c >> i & 1 == 1)
            .fold(0, |acc, (_, &v)| acc ^ v)
    }

    /// Coefficients of `x` in the basis, or `None` when `x` is outside.
    pub fn coords(&self, x: usize) -> Option<usize> {
        let c = self
            .keys
            .iter()
            .enumerate()
            .fold(0usize, |c, (i, &k)| c | (x >> k & 1) << i);
        (self.embed(c) == x).then_some(c)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.coords(x).is_some()
    }

    pub fn to_set(&self, group: &Group) -> Result<GroupSet> {
        GroupSet::new(group.clone(), (0..1usize << self.dim()).map(|c| self.embed(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilator_matches_brute_force() {
        let n = 6;
        for lambda in [vec![], vec![1], vec![3, 5], vec![7, 9, 14], vec![3, 5, 6]] {
            let ann = F2Subspace::annihilator(n, &lambda);
            let brute: Vec<usize> = (0..64)
                .filter(|&x| lambda.iter().all(|&l| parity(l & x) == 0))
                .collect();
            let g = Group::boolean(n as usize).unwrap();
            assert_eq!(ann.to_set(&g).unwrap().members(), &brute[..], "{lambda:?}");
            for x in 0..64 {
                assert_eq!(ann.contains(x), brute.contains(&x));
                if let Some(c) = ann.coords(x) {
                    assert_eq!(ann.embed(c), x);
                }
            }
        }
    }

    #[test]
    fn span_reduces() {
        let s = F2Subspace::span(5, &[3, 5, 6, 16]);
        assert_eq!(s.dim(), 3);
        let g = Group::boolean(5).unwrap();
        let set = s.to_set(&g).unwrap();
        assert_eq!(set.len(), 8);
        for x in [0, 3, 5, 6, 16, 19, 21, 22] {
            assert!(set.contains(x));
        }
    }
}
