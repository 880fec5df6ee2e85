//! Invariants checked on random small sets against brute-force counts.

use addstruct::bohr::{BohrProfile, BohrSpec, Radius};
use addstruct::exact::{q, qi};
use addstruct::group::Group;
use addstruct::harmonic::{self, FunctionTable};
use addstruct::set::GroupSet;
use addstruct::setstat::{self, SliceHistogram};
use addstruct::spectral;
use num_bigint::BigUint;
use proptest::prelude::*;

fn small_group() -> impl Strategy<Value = Group> {
    prop_oneof![
        (1usize..=7).prop_map(|n| Group::boolean(n).unwrap()),
        (2u64..=40).prop_map(|n| Group::cyclic(n).unwrap()),
        Just(Group::new(&[4, 6]).unwrap()),
        Just(Group::new(&[3, 3, 2]).unwrap()),
    ]
}

fn group_and_set() -> impl Strategy<Value = GroupSet> {
    small_group().prop_flat_map(|g| {
        let n = g.order();
        proptest::collection::btree_set(0..n, 1..=n.min(14))
            .prop_map(move |m| GroupSet::new(g.clone(), m).unwrap())
    })
}

fn group_and_pair() -> impl Strategy<Value = (GroupSet, GroupSet)> {
    small_group().prop_flat_map(|g| {
        let n = g.order();
        let set = move || proptest::collection::btree_set(0..n, 1..=n.min(10));
        let g2 = g.clone();
        (set(), set()).prop_map(move |(a, b)| (GroupSet::new(g2.clone(), a).unwrap(), GroupSet::new(g2.clone(), b).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_on_integer_functions(g in small_group(), seed in any::<u64>()) {
        let mut s = seed;
        let values: Vec<i128> = (0..g.order())
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 40) as i128 % 41 - 20
            })
            .collect();
        let f = FunctionTable::from_int(g, values).unwrap();
        let c = harmonic::parseval(&f, 1e-9).unwrap();
        prop_assert!(c.holds);
        prop_assert!(c.exact.is_some());
    }

    #[test]
    fn difference_counts_sum_to_product((a, b) in group_and_pair()) {
        let g = a.group();
        let r = setstat::difference_counts(&a, &b).unwrap();
        prop_assert_eq!(r.iter().sum::<u64>(), (a.len() * b.len()) as u64);
        for (x, &c) in r.iter().enumerate() {
            let direct = a.iter().filter(|&u| b.contains(g.sub_idx(u, x))).count() as u64;
            prop_assert_eq!(c, direct);
        }
    }

    #[test]
    fn energy_bounds((a, b) in group_and_pair()) {
        // |A|² |B|² / |A - B| <= E(A, B) <= |A| |B| min(|A|, |B|)
        let e = setstat::energy(&a, &b).unwrap();
        let (na, nb) = (a.len() as u128, b.len() as u128);
        let diff = setstat::difference_set(&a, &b).unwrap().len() as u128;
        prop_assert!(e * diff >= na * na * nb * nb);
        prop_assert!(e <= na * nb * na.min(nb));
    }

    #[test]
    fn higher_energies_are_log_convex_and_bounded(a in group_and_set()) {
        let hist = SliceHistogram::new(&a).unwrap();
        let size = BigUint::from(a.len());
        let e: Vec<BigUint> = (1..=5).map(|k| hist.energy(k)).collect();
        prop_assert_eq!(&e[0], &(&size * &size));
        for k in 0..4 {
            prop_assert!(e[k + 1] <= (&size * &e[k]));
        }
        for k in 1..4 {
            prop_assert!(&e[k] * &e[k] <= &e[k - 1] * &e[k + 1]);
        }
        prop_assert_eq!(&e[1], &BigUint::from(setstat::energy(&a, &a).unwrap()));
    }

    #[test]
    fn doubling_is_at_least_one(a in group_and_set()) {
        prop_assert!(setstat::doubling(&a).unwrap() >= qi(1));
    }

    #[test]
    fn katz_koester_inclusion((a, b) in group_and_pair()) {
        prop_assert_eq!(setstat::katz_koester_all(&a, &b).unwrap(), None);
    }

    #[test]
    fn energy_product_holds((a, b) in group_and_pair(), k in 2u32..=3) {
        prop_assert!(setstat::check_energy_product(&a, &b, k).unwrap().holds);
    }

    #[test]
    fn peak_lies_between_averages(a in group_and_set()) {
        // the nonprincipal average of |Â|² is (N|A| - |A|²)/(N - 1)
        let n = a.group().order();
        if n > 1 {
            let p = setstat::peak_coefficient(&a).unwrap();
            let s = a.len() as f64;
            let avg = (n as f64 * s - s * s) / (n as f64 - 1.0);
            prop_assert!(p.value_sq >= avg * (1.0 - 1e-9) - 1e-9);
            prop_assert!(p.value_sq <= s * s * (1.0 + 1e-9));
        }
    }

    #[test]
    fn bohr_sets_grow_with_the_radius(
        n in 5u64..=200,
        gamma in proptest::collection::vec(1u64..1000, 1..=3),
        nums in proptest::collection::vec(1u64..=16, 3),
    ) {
        let g = Group::cyclic(n).unwrap();
        let gamma: Vec<usize> = gamma.iter().map(|&x| (x % n) as usize).collect();
        let radii = gamma.iter().zip(&nums).map(|(_, &m)| Radius::new(m, 32).unwrap()).collect();
        let spec = BohrSpec::new(gamma, radii).unwrap();
        let p = BohrProfile::new(&g, &spec).unwrap();
        let scales = [q(1, 4), q(1, 2), q(3, 4), q(1, 1)];
        for w in scales.windows(2) {
            prop_assert!(p.count(&w[0]) <= p.count(&w[1]));
            prop_assert!(p.members(&w[0]).is_subset(&p.members(&w[1])));
        }
        let b = p.members(&q(1, 1));
        prop_assert!(b.contains(0));
        prop_assert_eq!(b.negate(), b);
    }

    #[test]
    fn dissociated_witness_is_dissociated_and_maximal(a in group_and_set()) {
        let g = a.group().clone();
        let candidates: Vec<usize> = a.iter().filter(|&x| x != 0).take(10).collect();
        let w = spectral::max_dissociated(&g, &candidates, None).unwrap();
        prop_assert!(spectral::is_dissociated(&g, &w.members).unwrap());
        for &c in &candidates {
            if !w.members.contains(&c) {
                let mut ext = w.members.clone();
                ext.push(c);
                prop_assert!(!spectral::is_dissociated(&g, &ext).unwrap());
            }
        }
    }
}
