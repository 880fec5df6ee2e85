//! Acceptance run: every criterion prints one `PASS`/`FAIL` line with its
//! timing, and the test fails if any criterion fails.

use std::time::{Duration, Instant};

use addstruct::bohr::{self, BohrSpec, Radius};
use addstruct::exact::{parse_q, q, qi, Q};
use addstruct::group::Group;
use addstruct::harmonic::{self, FunctionTable};
use addstruct::set::{generated_subgroup, GroupSet};
use addstruct::setstat::{self, TupleSet};
use addstruct::spectral::DissociationMode;
use addstruct::structure::{
    certify_difference_subset, check_hypotheses, derive_params, dichotomy_m, extract_bohr, extract_subspace,
    regularize_density, PairStats, ParamOverrides, Piece, StructureResult,
};
use addstruct::worked::{
    make_finite_field, make_h_lambda, make_katz_set, make_planted, make_random_set, verify_h_lambda,
    verify_katz_bound, HLambdaSpec,
};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_subset(g: &Group, r: &mut ChaCha8Rng, max: usize) -> GroupSet {
    let size = r.gen_range(1..=max.min(g.order()));
    make_random_set(g, size, r.gen()).unwrap()
}

// ---------------------------------------------------------------------------
// brute-force oracles

fn oracle_difference_counts(a: &GroupSet, b: &GroupSet) -> Vec<u64> {
    let g = a.group();
    let mut r = vec![0u64; g.order()];
    for x in a.iter() {
        for y in b.iter() {
            r[g.sub_idx(x, y)] += 1;
        }
    }
    r
}

/// `#{(a1, b1, a2, b2) : a1 - b1 = a2 - b2}` by enumerating quadruples.
fn oracle_energy(a: &GroupSet, b: &GroupSet) -> u128 {
    let g = a.group();
    let mut count = 0u128;
    for a1 in a.iter() {
        for b1 in b.iter() {
            let d = g.sub_idx(a1, b1);
            for a2 in a.iter() {
                count += b.iter().filter(|&b2| g.sub_idx(a2, b2) == d).count() as u128;
            }
        }
    }
    count
}

/// `E_k(A) = Σ_s |A ∩ (A + s)|^k` with every slice built from scratch.
fn oracle_higher_energy(a: &GroupSet, k: u32) -> u128 {
    let g = a.group();
    (0..g.order())
        .map(|s| {
            let slice = a.iter().filter(|&x| a.contains(g.sub_idx(x, s))).count() as u128;
            slice.pow(k)
        })
        .sum()
}

fn oracle_doubling(a: &GroupSet) -> Q {
    let g = a.group();
    let mut seen = vec![false; g.order()];
    for x in a.iter() {
        for y in a.iter() {
            seen[g.sub_idx(x, y)] = true;
        }
    }
    q(seen.iter().filter(|&&s| s).count() as i64, a.len() as i64)
}

/// `max_{χ ≠ 0} |Â(χ)|²` on `F2^n` by direct character sums.
fn oracle_peak_sq_boolean(a: &GroupSet) -> i128 {
    (1..a.group().order())
        .map(|chi| {
            let s: i128 = a.iter().map(|x| if (chi & x).count_ones() % 2 == 0 { 1 } else { -1 }).sum();
            s * s
        })
        .max()
        .unwrap_or(0)
}

// ---------------------------------------------------------------------------
// instance families

fn h_lambda(n: usize, k: usize, lambda: usize) -> GroupSet {
    make_h_lambda(HLambdaSpec {
        n,
        k,
        lambda_size: lambda,
    })
    .unwrap()
}

/// `H + Λ` moved by a random translate.
fn shifted_h_lambda(n: usize, k: usize, lambda: usize, seed: u64) -> GroupSet {
    let z = rng(seed).gen_range(0..1usize << n);
    h_lambda(n, k, lambda).translate(z)
}

fn planted(n: usize, dims: &[usize], noise: usize, seed: u64) -> GroupSet {
    make_planted(&Group::boolean(n).unwrap(), dims, noise, seed).unwrap().set
}

/// `100 K² |A| <= N`.
fn passes_size_gate(a: &GroupSet) -> bool {
    let k = setstat::doubling(a).unwrap();
    qi(100) * &k * &k * qi(a.len() as u64) <= qi(a.group().order() as u64)
}

/// Example-1 family and planted coset unions in `F2^10`–`F2^12`, restricted to
/// sets small enough for the dichotomy's size gate so that one family serves
/// both the extraction and the dichotomy runs.
fn pipeline_instances() -> Vec<(String, GroupSet)> {
    let mut out: Vec<(String, GroupSet)> = Vec::new();
    for n in 10..=12 {
        for k in 0..=3 {
            for lambda in 1..=5 {
                for shift in 0..2u64 {
                    if k + lambda > n {
                        continue;
                    }
                    let a = if shift == 0 {
                        h_lambda(n, k, lambda)
                    } else {
                        shifted_h_lambda(n, k, lambda, 1000 * n as u64 + 10 * k as u64 + lambda as u64)
                    };
                    if passes_size_gate(&a) && (out.len() < 25 || lambda == 5) {
                        out.push((format!("h+lambda n={n} k={k} |Λ|={lambda} shift={shift}"), a));
                    }
                }
            }
        }
    }
    let shapes: [&[usize]; 6] = [&[3], &[2], &[2, 2], &[3, 1], &[2, 1, 1], &[1, 1, 1]];
    let mut seed = 0u64;
    'outer: for _round in 0..4 {
        for n in 10..=12 {
            for shape in shapes {
                for noise in 0..=2 {
                    seed += 1;
                    let a = planted(n, shape, noise, seed);
                    if passes_size_gate(&a) {
                        out.push((format!("planted n={n} dims={shape:?} noise={noise} seed={seed}"), a));
                    }
                    if out.len() >= 50 {
                        break 'outer;
                    }
                }
            }
        }
    }
    out.truncate(50);
    let planted_count = out.iter().filter(|(name, _)| name.starts_with("planted")).count();
    assert!(planted_count >= 10, "only {planted_count} planted instances");
    out
}

// ---------------------------------------------------------------------------
// criteria

fn parseval_exact() -> Outcome {
    let groups = [
        Group::boolean(8).unwrap(),
        Group::boolean(12).unwrap(),
        Group::cyclic(24).unwrap(),
        Group::cyclic(101).unwrap(),
        Group::new(&[4, 6]).unwrap(),
    ];
    let mut r = rng(1);
    let mut failures = 0;
    let mut exact = 0;
    for g in &groups {
        for _ in 0..100 {
            let values: Vec<i128> = (0..g.order()).map(|_| r.gen_range(-50..=50)).collect();
            let f = FunctionTable::from_int(g.clone(), values).unwrap();
            let c = harmonic::parseval(&f, 1e-9).unwrap();
            if c.exact.is_some() {
                exact += 1;
            }
            if !c.holds || c.exact.is_none() {
                failures += 1;
            }
        }
    }
    ok(failures == 0, format!("500 functions, {exact} compared as exact integers, {failures} failures"))
}

fn energy_product() -> Outcome {
    let groups = [Group::cyclic(24).unwrap(), Group::boolean(8).unwrap()];
    let mut r = rng(2);
    let (mut failures, mut worst) = (0, f64::INFINITY);
    for i in 0..1000 {
        let g = &groups[i % 2];
        let a = random_subset(g, &mut r, 12);
        let b = random_subset(g, &mut r, 12);
        let k = 2 + (i / 2 % 2) as u32;
        let rep = setstat::check_energy_product(&a, &b, k).unwrap();
        worst = worst.min(rep.margin);
        if !rep.holds || rep.margin < 1.0 {
            failures += 1;
        }
    }
    ok(failures == 0, format!("1000 instances, smallest margin {worst:.4}, {failures} failures"))
}

fn triangle_inequality() -> Outcome {
    let groups = [Group::cyclic(15).unwrap(), Group::boolean(5).unwrap()];
    let mut r = rng(3);
    let mut failures = 0;
    for i in 0..200 {
        let g = &groups[i % 2];
        let sets: Vec<GroupSet> = (0..4).map(|_| random_subset(g, &mut r, 6)).collect();
        let rep = setstat::check_generalized_triangle(
            &TupleSet::from_set(&sets[0]),
            &TupleSet::from_set(&sets[1]),
            &sets[2],
            &sets[3],
        )
        .unwrap();
        if !rep.holds {
            failures += 1;
        }
    }
    let mut equal = true;
    for (g, gens) in [(Group::cyclic(15).unwrap(), vec![5]), (Group::boolean(5).unwrap(), vec![1, 6])] {
        let h = generated_subgroup(&g, &gens).unwrap();
        let t = TupleSet::from_set(&h);
        let rep = setstat::check_generalized_triangle(&t, &t, &h, &h).unwrap();
        equal &= rep.lhs == rep.rhs;
    }
    ok(
        failures == 0 && equal,
        format!("200 instances, {failures} failures; subgroup equality {equal}"),
    )
}

fn katz_koester() -> Outcome {
    let g = Group::cyclic(30).unwrap();
    let mut r = rng(4);
    let mut failures = 0;
    for _ in 0..100 {
        let a = random_subset(&g, &mut r, 10);
        let b = random_subset(&g, &mut r, 10);
        if setstat::katz_koester_all(&a, &b).unwrap().is_some() {
            failures += 1;
        }
    }
    ok(failures == 0, format!("100 pairs in Z30, {failures} failing pairs"))
}

fn bohr_lemmas() -> Outcome {
    let groups = [Group::cyclic(101).unwrap(), Group::cyclic(256).unwrap(), Group::cyclic(2520).unwrap()];
    let mut r = rng(5);
    let (mut lemma_failures, mut undensified, mut not_found) = (0, 0, 0);
    let specs = 200;
    for i in 0..specs {
        let g = &groups[i % 3];
        let d = r.gen_range(1..=3);
        let gamma: Vec<usize> = (0..d).map(|_| r.gen_range(1..g.order())).collect();
        let radii: Vec<Radius> = (0..d)
            .map(|_| {
                let den = r.gen_range(4..=64u64);
                Radius::new(r.gen_range(1..=den / 2), den).unwrap()
            })
            .collect();
        let spec = BohrSpec::new(gamma, radii).unwrap();
        let checks = bohr::check_size_bounds(g, &spec).unwrap();
        lemma_failures += checks.iter().filter(|c| !c.holds).count();
        match bohr::find_regular_radius(g, &spec) {
            Ok(s) if s.densified == 0 => undensified += 1,
            Ok(_) => {}
            Err(_) => not_found += 1,
        }
    }
    let rate = undensified as f64 / specs as f64;
    ok(
        lemma_failures == 0 && rate >= 0.95,
        format!(
            "{specs} specs, {lemma_failures} lemma failures, regular without densification {:.1}%, not found {not_found}",
            100.0 * rate
        ),
    )
}

fn example_h_lambda() -> Outcome {
    let spec = HLambdaSpec {
        n: 8,
        k: 3,
        lambda_size: 5,
    };
    let a = make_h_lambda(spec).unwrap();
    let rep = verify_h_lambda(&a, spec, 6).unwrap();
    let g = a.group();
    let slice_len = |s: usize| a.iter().filter(|&x| a.contains(g.sub_idx(x, s))).count();
    let diff = setstat::difference_set(&a, &a).unwrap();
    let on_h = (0..8).all(|s| slice_len(s) == 40);
    let off_h = diff.iter().filter(|&s| s >= 8).all(|s| slice_len(s) == 16);
    let ratio = |k: u32| parse_q(&rep.ratios.iter().find(|c| c.k == k).unwrap().ratio).unwrap();
    let (r2, r4, r6) = (ratio(2), ratio(4), ratio(6));
    // independent r_2 from the brute-force slices
    let num: u128 = (0..8).map(|s| (slice_len(s) as u128).pow(2)).sum();
    let r2_oracle = Q::new((num as i64).into(), (oracle_higher_energy(&a, 2) as i64).into());
    let passed = a.len() == 40
        && diff.len() == 88
        && on_h
        && off_h
        && r2 < r4
        && r4 < r6
        && r2 == r2_oracle
        && rep.checks.iter().all(|c| c.holds);
    ok(
        passed,
        format!(
            "|A| = {}, |A-A| = {}, slices on H full {on_h}, off H of size 16 {off_h}, r2 = {r2}, r4 = {r4}, r6 = {r6}",
            a.len(),
            diff.len()
        ),
    )
}

fn example_katz() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (p, d) in [(3, 2), (5, 2), (3, 3), (3, 4)] {
        let f = make_finite_field(p, d, 0).unwrap();
        let a = make_katz_set(&f).unwrap();
        let rep = verify_katz_bound(&a, &f).unwrap();
        let bound = &rep.checks[0];
        let chain = rep.checks.len() == 4;
        passed &= bound.holds && chain;
        parts.push(format!("({p},{d}) peak {:.4} <= {:.4} {}", rep.peak, rep.bound, bound.holds));
    }
    ok(passed, parts.join("; "))
}

/// Independent recount of the structured piece: `|B ∩ (piece + z)|`.
fn recount(b: &GroupSet, r: &StructureResult) -> Option<(usize, usize)> {
    let (members, z) = match &r.piece {
        Piece::Subspace(s) => (&s.subspace, s.translate),
        Piece::Bohr(p) => (&p.bohr.members, p.translate),
        Piece::LargeCoefficient { .. } => return None,
    };
    let g = b.group();
    let hits = members.iter().filter(|&x| b.contains(g.add_idx(x, z))).count();
    Some((members.len(), hits))
}

fn extraction_soundness(instances: &[(String, GroupSet)]) -> Outcome {
    let mut failures = Vec::new();
    let mut used = 0;
    for (name, a) in instances {
        let stats = PairStats::new(a, a).unwrap();
        let p = derive_params(&stats, &ParamOverrides::default()).unwrap();
        if !check_hypotheses(&stats, &p, &Q::one()).passed {
            continue;
        }
        used += 1;
        match extract_subspace(a, a, &p) {
            Ok(r) => {
                let exact_mode = r
                    .stage
                    .as_ref()
                    .is_some_and(|s| s.lambda.mode == DissociationMode::Exact);
                let (size, hits) = recount(a, &r).unwrap();
                let required = (Q::one() - &p.zeta) * &p.omega * qi(size as u64) / (&p.t * (&p.m + &p.kappa));
                if !exact_mode || qi(hits as u64) < required || r.piece.size_and_hits() != Some((size, hits)) {
                    failures.push(format!("{name}: {hits} < {required} or inexact"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    ok(
        used == 50 && failures.is_empty(),
        format!("{used} instances pass the hypotheses, {} failures {:?}", failures.len(), failures),
    )
}

fn dichotomy_exclusive(instances: &[(String, GroupSet)]) -> Outcome {
    let mut failures = Vec::new();
    let (mut runs, mut large, mut structured, mut above_one) = (0, 0, 0, 0);
    for (name, a) in instances {
        let k = oracle_doubling(a);
        let peak = oracle_peak_sq_boolean(a);
        for m in [1i64, 2, 4, 8] {
            let m = qi(m);
            if m > k {
                continue;
            }
            runs += 1;
            if m > Q::one() {
                above_one += 1;
            }
            let size = qi(a.len() as u64);
            let large_fires = qi(peak) > &m * &size * &size / &k;
            match dichotomy_m(a, &m, a) {
                Ok(r) => {
                    let branch_large = r.is_large_coefficient();
                    if branch_large != large_fires {
                        failures.push(format!("{name} M={m}: branch disagrees with the oracle peak"));
                        continue;
                    }
                    if branch_large {
                        large += 1;
                        continue;
                    }
                    structured += 1;
                    let (psize, hits) = recount(a, &r).unwrap();
                    if qi(hits as u64) * qi(8) * &m < qi(psize as u64) {
                        failures.push(format!("{name} M={m}: {hits} < {psize}/(8M)"));
                    }
                }
                Err(e) => failures.push(format!("{name} M={m}: {e}")),
            }
        }
    }
    ok(
        failures.is_empty() && runs > 0,
        format!(
            "{} instances, {runs} runs ({above_one} with M > 1; {large} large-coefficient, {structured} structured), {} failures {:?}",
            instances.len(),
            failures.len(),
            failures
        ),
    )
}

fn inclusion_instances() -> Vec<(String, GroupSet)> {
    let mut out = Vec::new();
    for n in 10..=14 {
        let g = Group::boolean(n).unwrap();
        let mut r = rng(70 + n as u64);
        // subgroups and cosets of codimension at least 8
        for dim in [1, 2] {
            let gens: Vec<usize> = (0..dim).map(|i| 1usize << (n - 1 - i)).collect();
            let h = generated_subgroup(&g, &gens).unwrap();
            out.push((format!("coset n={n} dim={dim}"), h.translate(r.gen_range(0..g.order()))));
        }
        for (k, lambda) in [(0, 2), (0, 3), (1, 3)] {
            if n >= 11 + k {
                out.push((format!("h+lambda n={n} k={k} |Λ|={lambda}"), shifted_h_lambda(n, k, lambda, 90 + n as u64)));
            }
        }
    }
    out.truncate(20);
    out
}

fn inclusion_in_difference_set() -> Outcome {
    let eps = q(1, 2);
    let instances = inclusion_instances();
    let mut failures = Vec::new();
    let (mut checked, mut used) = (0usize, 0);
    for (name, a) in &instances {
        let k = oracle_doubling(a);
        let delta = q(a.len() as i64, a.group().order() as i64);
        if qi(100) * &k * &k * &delta > eps {
            failures.push(format!("{name}: gate fails"));
            continue;
        }
        used += 1;
        match certify_difference_subset(a, &eps) {
            Ok(r) => {
                let piece = match &r.piece {
                    Piece::Subspace(s) => &s.subspace,
                    Piece::Bohr(b) => &b.bohr.members,
                    Piece::LargeCoefficient { .. } => {
                        failures.push(format!("{name}: no structured set"));
                        continue;
                    }
                };
                let diff = oracle_difference_counts(a, a);
                let outside = piece.iter().filter(|&x| diff[x] == 0).count();
                checked += piece.len();
                if outside > 0 {
                    failures.push(format!("{name}: {outside} elements outside A-A"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    ok(
        used == 20 && failures.is_empty(),
        format!("{used} instances, {checked} elements checked, {} failures {:?}", failures.len(), failures),
    )
}

/// `100 K² δ <= 1`, so the loop takes at least one step.
fn enters_loop(a: &GroupSet) -> bool {
    let k = oracle_doubling(a);
    qi(100) * &k * &k * q(a.len() as i64, a.group().order() as i64) <= Q::one()
}

fn regularization_instances() -> Vec<(String, GroupSet)> {
    let mut sets: Vec<(String, GroupSet)> = Vec::new();
    for n in (12..=14).rev() {
        let g = Group::boolean(n).unwrap();
        for k in 0..=4 {
            for lambda in [3, 4] {
                sets.push((format!("h+lambda n={n} k={k} |Λ|={lambda}"), shifted_h_lambda(n, k, lambda, 7 * n as u64 + k as u64)));
            }
        }
        for dim in [3, 5] {
            // two cosets of one subgroup
            let h = generated_subgroup(&g, &(0..dim).map(|i| 1usize << i).collect::<Vec<_>>()).unwrap();
            let a = h.translate(1 << (n - 1)).union(&h.translate(1 << (n - 2))).unwrap();
            sets.push((format!("two cosets n={n} dim={dim}"), a));
        }
        sets.push((format!("planted n={n} [4]"), planted(n, &[4], 0, 600 + n as u64)));
    }
    sets.retain(|(_, a)| enters_loop(a));
    sets.truncate(20);
    sets
}

fn regularization() -> Outcome {
    let sets = regularization_instances();
    let mut failures = Vec::new();
    let mut total_steps = 0;
    for (name, a) in &sets {
        match regularize_density(a) {
            Ok(t) => {
                total_steps += t.steps.len();
                let k = oracle_doubling(&t.final_set);
                let delta = parse_q(&t.final_density).unwrap();
                let stop = qi(100) * &k * &k * &delta > Q::one();
                let mut densities = vec![q(a.len() as i64, a.group().order() as i64)];
                densities.extend(t.steps.iter().map(|s| parse_q(&s.density_after).unwrap()));
                let increasing = densities.windows(2).all(|w| w[1] > w[0]);
                let subset = t.final_set.is_subset(a);
                if !(stop && increasing && subset && t.checks.iter().all(|c| c.holds)) {
                    failures.push(format!("{name}: stop {stop} increasing {increasing} subset {subset}"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    ok(
        sets.len() == 20 && failures.is_empty(),
        format!("{} sets, {total_steps} steps in total, {} failures {:?}", sets.len(), failures.len(), failures),
    )
}

fn cross_oracles(pipeline: &[(String, GroupSet)]) -> Outcome {
    let mut failures = Vec::new();
    let mut compared = 0;
    for (name, a) in pipeline.iter().take(20) {
        let stats = PairStats::new(a, a).unwrap();
        let p = derive_params(&stats, &ParamOverrides::default()).unwrap();
        let sub = extract_subspace(a, a, &p);
        let bohr = extract_bohr(a, a, &p);
        match (sub, bohr) {
            (Ok(s), Ok(b)) => {
                compared += 1;
                let radius_ok = match &b.piece {
                    Piece::Bohr(bp) => bp.bohr.spec.radii.iter().all(|r| r.to_q() < q(1, 2)),
                    _ => false,
                };
                if s.piece.size_and_hits() != b.piece.size_and_hits() || !radius_ok {
                    failures.push(format!(
                        "{name}: subspace {:?} vs Bohr {:?}, radius below 1/2 {radius_ok}",
                        s.piece.size_and_hits(),
                        b.piece.size_and_hits()
                    ));
                }
            }
            (s, b) => failures.push(format!("{name}: {:?} / {:?}", s.err(), b.err())),
        }
    }
    // module outputs against brute force on every small instance
    let mut oracle_sets: Vec<GroupSet> = pipeline.iter().map(|(_, a)| a.clone()).collect();
    let mut r = rng(12);
    for g in [Group::boolean(6).unwrap(), Group::cyclic(30).unwrap(), Group::new(&[4, 6]).unwrap()] {
        for _ in 0..10 {
            oracle_sets.push(random_subset(&g, &mut r, 12));
        }
    }
    let mut oracle_checked = 0;
    for a in oracle_sets.iter().filter(|a| a.group().order() <= 1 << 10) {
        oracle_checked += 1;
        let g = a.group();
        let b = random_subset(g, &mut r, 10);
        let agree = setstat::difference_counts(a, &b).unwrap() == oracle_difference_counts(a, &b)
            && setstat::energy(a, &b).unwrap() == oracle_energy(a, &b)
            && (2..=4).all(|k| {
                setstat::higher_energy(a, k).unwrap().to_string() == oracle_higher_energy(a, k).to_string()
            })
            && setstat::doubling(a).unwrap() == oracle_doubling(a)
            && (!g.is_boolean()
                || setstat::peak_coefficient(a).unwrap().exact_sq == Some(oracle_peak_sq_boolean(a)));
        if !agree {
            failures.push(format!("oracle mismatch on a set of size {} in a group of order {}", a.len(), g.order()));
        }
    }
    ok(
        compared == 20 && failures.is_empty(),
        format!(
            "{compared} Bohr/subspace comparisons, {oracle_checked} brute-force oracle sets, {} failures {:?}",
            failures.len(),
            failures
        ),
    )
}

#[test]
fn acceptance() {
    let instances = pipeline_instances();
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 parseval", Duration::from_secs(5), Box::new(parseval_exact)),
        ("2 energy product", Duration::from_secs(60), Box::new(energy_product)),
        ("3 triangle inequality", Duration::from_secs(30), Box::new(triangle_inequality)),
        ("4 katz-koester inclusion", Duration::from_secs(10), Box::new(katz_koester)),
        ("5 bohr lemmas and regular radius", Duration::from_secs(120), Box::new(bohr_lemmas)),
        ("6 H + Λ example", Duration::from_secs(10), Box::new(example_h_lambda)),
        ("7 finite-field index sets", Duration::from_secs(10), Box::new(example_katz)),
        ("8 extraction soundness", Duration::from_secs(600), Box::new(|| extraction_soundness(&instances))),
        ("9 dichotomy exclusivity", Duration::from_secs(600), Box::new(|| dichotomy_exclusive(&instances))),
        ("10 inclusion in A - A", Duration::from_secs(300), Box::new(inclusion_in_difference_set)),
        ("11 regularization loop", Duration::from_secs(600), Box::new(regularization)),
        ("12 cross-oracle agreement", Duration::from_secs(600), Box::new(|| cross_oracles(&instances))),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in &criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let passed = out.passed && elapsed <= *limit;
        println!(
            "{} criterion {name}: {} [{:.2}s of {}s]",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !passed {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
