//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use ttlab::finegrained::{
    aut_order_closed_form, classify_graph, count_k_cliques_special, family_graph, ov_sweep,
    parity_sweep, BaseFamily, GraphFamily,
};
use ttlab::noise::{
    build_table, corrupt, mask_stats, CorruptionMask, CorruptionStrategy, NoiseModel,
};
use ttlab::perm::{
    aut_group, list_coset_reps, orbit_of, schreier_sims, AutStrategy, CosetSide, Permutation,
    Permutations,
};
use ttlab::problems::{make_problem, GraphAutOracle, GraphInstance, Params};
use ttlab::ratio::Ratio64;
use ttlab::recover::{recover_all, RecoveryConfig};
use ttlab::rng::{derive_seed, SplitMix64};
use ttlab::aggregate::{
    eval_bruteforce, eval_compressed, eval_compressed_regular, InstanceIndex,
    InstanceStabilizerOracle, Problem, ProblemSpec,
};

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion:02}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn problem(id: &str, pairs: &[(&str, i64)]) -> ProblemSpec {
    let mut params = Params::new();
    for (k, v) in pairs {
        params.insert(k.to_string(), *v);
    }
    make_problem(id, &params, None).unwrap()
}

fn instance_chain(p: &dyn Problem, idx: u64) -> ttlab::perm::StabilizerChain {
    let oracle = InstanceStabilizerOracle::new(p, InstanceIndex(idx));
    aut_group(&oracle, p.group_degree(), AutStrategy::Backtracking).unwrap()
}

/// Criterion 1: compressed evaluation equals brute force for every instance
/// of the six graph problems at n = 4 and 2-CSP at q = 3; zero tolerance.
#[test]
fn acceptance_01_compressed_matches_bruteforce() {
    let started = Instant::now();
    let mut checked = 0u64;
    let specs: Vec<ProblemSpec> = vec![
        problem("clique", &[("n", 4)]),
        problem("indset", &[("n", 4)]),
        problem("vertexcover", &[("n", 4)]),
        problem("kcol", &[("n", 4), ("k", 3)]),
        problem("hampath", &[("n", 4)]),
        problem("hamcycle", &[("n", 4)]),
        problem("kcsp", &[("n", 3), ("k", 2)]),
    ];
    for p in &specs {
        for idx in 0..p.instance_count() {
            let chain = instance_chain(p.as_ref(), idx);
            let compressed = eval_compressed(p.as_ref(), InstanceIndex(idx), &chain, None).unwrap();
            let brute = eval_bruteforce(p.as_ref(), InstanceIndex(idx)).unwrap();
            assert_eq!(compressed, brute, "{} instance {idx}", p.id());
            checked += 1;
        }
    }
    verdict(
        1,
        true,
        &format!(
            "eval_compressed == eval_bruteforce on {checked} instances across 7 problems ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 2: |Orb(x)| * |Aut(x)| = |G| for every 5-vertex graph and
/// every CLIQUE instance at n = 4.
#[test]
fn acceptance_02_orbit_stabilizer_identity() {
    let started = Instant::now();
    // All 1024 graphs on 5 vertices under vertex relabeling.
    for bits in 0u64..1 << 10 {
        let graph = GraphInstance::from_bits(5, false, bits).unwrap();
        let orbit = orbit_of(|g, h: &GraphInstance| h.relabel(g), &graph, 5).unwrap();
        let aut = aut_group(&GraphAutOracle(&graph), 5, AutStrategy::Backtracking).unwrap();
        let aut_order: u64 = aut.group_order().try_into().unwrap();
        assert_eq!(orbit.len() as u64 * aut_order, 120, "graph {bits:#x}");
    }
    // All 256 CLIQUE instances at n = 4 under the instance action.
    let p = problem("clique", &[("n", 4)]);
    for idx in 0..p.instance_count() {
        let orbit = orbit_of(
            |g, i: &u64| p.act_instance(g, InstanceIndex(*i)).0,
            &idx,
            4,
        )
        .unwrap();
        let aut_order: u64 = instance_chain(p.as_ref(), idx)
            .group_order()
            .try_into()
            .unwrap();
        assert_eq!(orbit.len() as u64 * aut_order, 24, "instance {idx}");
    }
    verdict(
        2,
        true,
        &format!(
            "orbit-stabilizer identity exact on 1024 graphs (n=5) and 256 clique instances ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 3: the exact-fraction mask has exactly floor(delta*N) entries
/// for 20 parameter combinations, and equal seeds give byte-identical masks.
#[test]
fn acceptance_03_noise_operator_exactness() {
    let deltas = [(1u64, 4u64), (1, 3), (2, 5), (1, 10), (49, 100)];
    let sizes = [24u64, 1024, 4096, 32768];
    let mut combos = 0;
    for &(num, den) in &deltas {
        for &n in &sizes {
            let delta = Ratio64::new(num, den).unwrap();
            let a =
                CorruptionMask::generate("t", 1, n, delta, 1234, NoiseModel::ExactFraction).unwrap();
            assert_eq!(a.count(), delta.floor_times(n), "delta {num}/{den} N {n}");
            let b =
                CorruptionMask::generate("t", 1, n, delta, 1234, NoiseModel::ExactFraction).unwrap();
            let (mut abytes, mut bbytes) = (Vec::new(), Vec::new());
            a.write_to(&mut abytes).unwrap();
            b.write_to(&mut bbytes).unwrap();
            assert_eq!(abytes, bbytes);
            combos += 1;
        }
    }
    verdict(
        3,
        true,
        &format!("exact floor(delta*N) cardinality and byte-identical reruns on {combos} (delta, N) combinations"),
    );
}

/// Criterion 4: over 200 seeded masks at delta = 0.2 on a 2^15 table, the
/// frequency of a fixed 444-element subset keeping at most a 0.65
/// uncorrupted fraction stays below exp(-0.09*444/8) plus 3-sigma slack.
#[test]
fn acceptance_04_concentration_consistency() {
    let n = 1u64 << 15;
    let delta = Ratio64::new(1, 5).unwrap();
    let subset: Vec<u64> = (0..444).collect();
    let trials = 200;
    let mut low = 0u32;
    for t in 0..trials {
        let mask = CorruptionMask::generate(
            "t",
            1,
            n,
            delta,
            derive_seed(0xc0ffee, t as u64),
            NoiseModel::ExactFraction,
        )
        .unwrap();
        let fraction = mask_stats(&mask, &[subset.clone()])[0];
        if fraction <= 0.65 {
            low += 1;
        }
    }
    let bound = (-0.09f64 * 444.0 / 8.0).exp();
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let limit = bound + 3.0 * sigma;
    let freq = low as f64 / trials as f64;
    verdict(
        4,
        freq <= limit,
        &format!("empirical low-fraction frequency {freq:.4} <= {limit:.4} (bound {bound:.4} + 3 sigma) over {trials} masks"),
    );
}

/// Criterion 5: with s >= 120 = 5!, every CLIQUE n=5 instance takes the
/// symmetric branch: 100% correct with zero oracle queries across 10
/// corruption seeds at delta = 0.25.
#[test]
fn acceptance_05_symmetric_branch_is_corruption_proof() {
    let started = Instant::now();
    let p = problem("clique", &[("n", 5)]);
    let table = Arc::new(build_table(p.as_ref(), 0).unwrap());
    // epsilon = 9/20 gives s = ceil(16*10*ln2/0.45^2) = 548 >= 120.
    let config = RecoveryConfig::new(Ratio64::new(9, 20).unwrap()).unwrap();
    let threshold = ttlab::recover::recovery_threshold(p.as_ref(), &config);
    assert!(threshold >= 120, "threshold {threshold}");
    for seed in 0..10u64 {
        let (corrupted, _) = corrupt(
            table.clone(),
            Ratio64::new(1, 4).unwrap(),
            derive_seed(5050, seed),
            NoiseModel::ExactFraction,
            CorruptionStrategy::FlipBoolean,
        )
        .unwrap();
        let sweep = recover_all(p.as_ref(), &corrupted, &config, 0).unwrap();
        assert_eq!(sweep.symmetric, sweep.total, "seed {seed}");
        assert_eq!(sweep.correct, sweep.total, "seed {seed}");
        assert_eq!(sweep.queries, 0, "seed {seed}");
        assert_eq!(corrupted.queries_made(), 0, "query counter, seed {seed}");
    }
    verdict(
        5,
        true,
        &format!(
            "10 seeds at delta=1/4: 5120/5120 symmetric, 100% correct, 0 queries ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 6: CLIQUE n=6 with override s=240 and delta=0.2 across 20
/// seeds: per-instance correctness at least 99% and no undefined
/// majorities.
#[test]
fn acceptance_06_query_branch_end_to_end() {
    let started = Instant::now();
    let p = problem("clique", &[("n", 6)]);
    let table = Arc::new(build_table(p.as_ref(), 0).unwrap());
    assert_eq!(table.entry_count(), 196_608);
    let config = RecoveryConfig::new(Ratio64::new(1, 4).unwrap())
        .unwrap()
        .with_override(240);
    let mut correct = 0u64;
    let mut total = 0u64;
    let mut undefined = 0u64;
    let mut query_instances = 0u64;
    for seed in 0..20u64 {
        let (corrupted, _) = corrupt(
            table.clone(),
            Ratio64::new(1, 5).unwrap(),
            derive_seed(6060, seed),
            NoiseModel::ExactFraction,
            CorruptionStrategy::FlipBoolean,
        )
        .unwrap();
        let sweep = recover_all(p.as_ref(), &corrupted, &config, 0).unwrap();
        correct += sweep.correct;
        total += sweep.total;
        undefined += sweep.majority_undefined;
        query_instances += sweep.query_branch;
    }
    let rate = correct as f64 / total as f64;
    verdict(
        6,
        rate >= 0.99 && undefined == 0,
        &format!(
            "success rate {rate:.6} over {total} recoveries ({query_instances} query-branch), majority_undefined = {undefined} ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 7: closed-form automorphism orders and k-clique counts match
/// brute force for every family at n in {6,7,8}; at n = 6 the classifier's
/// Other class is exactly the complement of the twelve orbits.
#[test]
fn acceptance_07_closed_forms_and_classifier_sweep() {
    let started = Instant::now();
    let bases = [
        BaseFamily::Complete,
        BaseFamily::CompleteMinusEdge,
        BaseFamily::CliqueN1PlusIsolated,
        BaseFamily::CliqueN1PlusPendant,
        BaseFamily::CliqueN2PlusTwoIsolated,
        BaseFamily::CliqueN2PlusEdge,
    ];
    for n in [6usize, 7, 8] {
        for base in bases {
            for complemented in [false, true] {
                let family = GraphFamily::Known { base, complemented };
                let graph = family_graph(family, n).unwrap();
                let chain =
                    aut_group(&GraphAutOracle(&graph), n, AutStrategy::Backtracking).unwrap();
                assert_eq!(
                    aut_order_closed_form(family, n).unwrap(),
                    chain.group_order(),
                    "aut order n={n} {base:?} complemented={complemented}"
                );
                for k in [3usize, 4] {
                    let closed = count_k_cliques_special(family, n, k).unwrap();
                    let brute = BigUint::from(brute_clique_count(&graph, k));
                    assert_eq!(closed, brute, "count n={n} k={k} {base:?} c={complemented}");
                }
            }
        }
    }
    // Exhaustive n = 6 sweep against the union of the twelve orbits.
    let mut twelve: HashSet<u64> = HashSet::new();
    for base in bases {
        for complemented in [false, true] {
            let g = family_graph(GraphFamily::Known { base, complemented }, 6).unwrap();
            for member in orbit_of(|p, h: &GraphInstance| h.relabel(p), &g, 6).unwrap() {
                twelve.insert(member.bits());
            }
        }
    }
    for bits in 0u64..1 << 15 {
        let graph = GraphInstance::from_bits(6, false, bits).unwrap();
        let known = matches!(classify_graph(&graph), GraphFamily::Known { .. });
        assert_eq!(
            known,
            twelve.contains(&bits),
            "classifier disagrees with the orbit union on graph {bits:#x}"
        );
    }
    verdict(
        7,
        true,
        &format!(
            "closed forms match brute force for 12 families at n=6,7,8; n=6 sweep consistent on 32768 graphs ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 8: OV (n=6, d=3) and parity 3-clique (n=6) at delta = 0.2 with
/// 201 samples over 20 seeds: at least 99% agreement with brute force, and
/// the shortcut/classifier paths make zero oracle queries.
#[test]
fn acceptance_08_fine_grained_recovery() {
    let started = Instant::now();
    let epsilon = Ratio64::new(1, 4).unwrap();
    let delta = Ratio64::new(1, 5).unwrap();
    let samples = 201u64;

    let ov = problem("ov", &[("n", 6), ("d", 3)]);
    let ov_table = Arc::new(build_table(ov.as_ref(), 0).unwrap());
    assert_eq!(ov_table.entry_count(), 262_144);
    let mut ov_correct = 0u64;
    let mut ov_total = 0u64;
    let mut ov_undefined = 0u64;
    for seed in 0..20u64 {
        let (corrupted, _) = corrupt(
            ov_table.clone(),
            delta,
            derive_seed(8080, seed),
            NoiseModel::ExactFraction,
            CorruptionStrategy::FlipBoolean,
        )
        .unwrap();
        let sweep = ov_sweep(6, 3, &corrupted, epsilon, Some(samples), seed, 0).unwrap();
        // Shortcut instances contribute no queries to the counter: every
        // query the table saw came from a sampled instance.
        assert_eq!(
            corrupted.queries_made(),
            sweep.query_branch * samples,
            "ov seed {seed}"
        );
        ov_correct += sweep.correct;
        ov_total += sweep.total;
        ov_undefined += sweep.majority_undefined;
    }
    let ov_rate = ov_correct as f64 / ov_total as f64;

    let parity = problem("parity_kclique", &[("n", 6), ("k", 3)]);
    let parity_table = Arc::new(build_table(parity.as_ref(), 0).unwrap());
    let mut pk_correct = 0u64;
    let mut pk_total = 0u64;
    let mut pk_undefined = 0u64;
    for seed in 0..20u64 {
        let (corrupted, _) = corrupt(
            parity_table.clone(),
            delta,
            derive_seed(9090, seed),
            NoiseModel::ExactFraction,
            CorruptionStrategy::FlipBoolean,
        )
        .unwrap();
        let sweep = parity_sweep(6, 3, &corrupted, epsilon, Some(samples), seed, 0).unwrap();
        assert_eq!(
            corrupted.queries_made(),
            sweep.query_branch * samples,
            "parity seed {seed}"
        );
        pk_correct += sweep.correct;
        pk_total += sweep.total;
        pk_undefined += sweep.majority_undefined;
    }
    let pk_rate = pk_correct as f64 / pk_total as f64;

    verdict(
        8,
        ov_rate >= 0.99 && pk_rate >= 0.99 && ov_undefined == 0 && pk_undefined == 0,
        &format!(
            "ov agreement {ov_rate:.6} ({ov_total} recoveries), parity agreement {pk_rate:.6} ({pk_total}), zero-query fast paths verified ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 9: chain order equals brute-force closure for 100 random
/// generator pairs in S_6 and for S_7; coset representatives lie in
/// pairwise-distinct cosets for 50 random subgroups of S_6 at the full
/// index.
#[test]
fn acceptance_09_permutation_core() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x1009);
    for round in 0..100 {
        let gens: Vec<Permutation> = (0..2)
            .map(|_| Permutation::from_images(rng.permutation(6)).unwrap())
            .collect();
        let chain = schreier_sims(&gens, 6).unwrap();
        assert_eq!(
            chain.group_order(),
            BigUint::from(closure_size(&gens, 6)),
            "round {round}"
        );
    }
    let s7 = schreier_sims(
        &[
            Permutation::transposition(7, 0, 1).unwrap(),
            Permutation::cycle(7),
        ],
        7,
    )
    .unwrap();
    assert_eq!(s7.group_order(), BigUint::from(5040u32));

    for round in 0..50 {
        let gens: Vec<Permutation> = (0..2)
            .map(|_| Permutation::from_images(rng.permutation(6)).unwrap())
            .collect();
        let chain = schreier_sims(&gens, 6).unwrap();
        let index: u64 = ttlab::perm::subgroup_index(&chain, 6).try_into().unwrap();
        let reps = list_coset_reps(&chain, 6, index, CosetSide::Right).unwrap();
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                if i != j {
                    let probe = reps[i].compose(&reps[j].inverse()).unwrap();
                    assert!(
                        !chain.contains(&probe),
                        "round {round}: reps {i},{j} share a right coset"
                    );
                }
            }
        }
    }
    verdict(
        9,
        true,
        &format!(
            "orders match closure on 100 random S_6 subgroups and S_7 = 5040; transversals pairwise distinct for 50 subgroups ({:?})",
            started.elapsed()
        ),
    );
}

/// Criterion 10: the regular-orbit compressed evaluator reproduces brute
/// force for directed Hamiltonian path parity (XOR) and count (ADD) on all
/// 4096 directed graphs at n = 4; zero tolerance.
#[test]
fn acceptance_10_regular_orbit_extension() {
    let started = Instant::now();
    for id in ["dir_hampath_parity", "dir_hampath_count"] {
        let p = problem(id, &[("n", 4)]);
        assert_eq!(p.instance_count(), 4096);
        for idx in 0..p.instance_count() {
            let chain = instance_chain(p.as_ref(), idx);
            let compressed =
                eval_compressed_regular(p.as_ref(), InstanceIndex(idx), &chain, None).unwrap();
            let brute = eval_bruteforce(p.as_ref(), InstanceIndex(idx)).unwrap();
            assert_eq!(compressed, brute, "{id} instance {idx}");
        }
    }
    verdict(
        10,
        true,
        &format!(
            "regular-orbit evaluation exact on 4096 directed graphs for parity and count ({:?})",
            started.elapsed()
        ),
    );
}

// --- independent oracles used above ---------------------------------------

/// Brute-force closure size of a generated subgroup.
fn closure_size(generators: &[Permutation], m: usize) -> u64 {
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(Permutation::identity(m));
    let mut frontier = vec![Permutation::identity(m)];
    while let Some(p) = frontier.pop() {
        for g in generators {
            let next = g.compose(&p).unwrap();
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen.len() as u64
}

/// Brute-force k-clique counter over all vertex subsets.
fn brute_clique_count(graph: &GraphInstance, k: usize) -> u64 {
    let n = graph.n();
    let mut count = 0u64;
    for mask in 0u64..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut ok = true;
        'outer: for i in 0..n {
            if mask >> i & 1 == 0 {
                continue;
            }
            for j in i + 1..n {
                if mask >> j & 1 == 1 && !graph.edge(i, j) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// The whole S_m enumeration is the independent membership oracle for the
/// chain-based sift; spot-checked here on top of the unit suite.
#[test]
fn sift_membership_matches_exhaustive_scan_on_s4() {
    let gens = vec![Permutation::from_one_line("2,1,4,3").unwrap()];
    let chain = schreier_sims(&gens, 4).unwrap();
    let closure: HashSet<Permutation> = {
        let mut seen = HashSet::new();
        seen.insert(Permutation::identity(4));
        let mut frontier = vec![Permutation::identity(4)];
        while let Some(p) = frontier.pop() {
            for g in &gens {
                let next = g.compose(&p).unwrap();
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        seen
    };
    for p in Permutations::new(4) {
        assert_eq!(chain.contains(&p), closure.contains(&p));
    }
}
