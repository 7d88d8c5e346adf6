//! Acceptance suite: every criterion the crate has to meet, one test per
//! criterion, each printing a `criterion NN: pass` line (visible with
//! `cargo test --test acceptance -- --nocapture`).

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::*;
use episodary::episode::Episode;
use episodary::instance;
use episodary::oracle;
use episodary::sequence::{gen_planted, PlantedConfig, Sequence};
use episodary::subepisode::{self, step};
use episodary::{mine, MineOutcome, MinerConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn planted(nodes: u32) -> Sequence {
    gen_planted(&PlantedConfig {
        nodes,
        reps: 100,
        gap: 50,
        noise_count: 500,
        noise_alphabet: 900,
        seed: 42,
    })
    .unwrap()
}

fn mine_planted(nodes: u32) -> MineOutcome {
    mine(&planted(nodes), &MinerConfig::new(10, 100)).unwrap()
}

/// Synthetic replication: closed and i-closed counts for patterns of one to
/// four simultaneous pairs, plus the frequent-episode lower bound.
#[test]
fn criterion_01_synthetic_replication() {
    let started = Instant::now();
    let expected_closed = [1u64, 3, 6, 10];
    let expected_i_closed = [3u64, 15, 63, 255];
    let expected_estimate = [3u128, 27, 729, 59_049];
    for n in 1u32..=4 {
        let out = mine_planted(n);
        assert_eq!(out.stats.closed, expected_closed[n as usize - 1], "closed for N={n}");
        assert_eq!(
            out.stats.i_closed,
            expected_i_closed[n as usize - 1],
            "i-closed for N={n}"
        );
        assert_eq!(
            out.stats.frequent_estimate,
            expected_estimate[n as usize - 1],
            "frequent estimate for N={n}"
        );
        println!("  N={n}: scans={} (reported, not asserted)", out.stats.scans);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "replication took {elapsed:?}");
    println!("criterion 01: pass ({elapsed:?})");
}

/// Count laws for the planted patterns: closed = N(N+1)/2 (the contiguous
/// subchains) and i-closed = 4^N - 1 (three arrangements per group or skip,
/// minus the empty choice).
#[test]
fn criterion_02_count_laws() {
    for n in 1u32..=5 {
        let out = mine_planted(n);
        assert_eq!(out.stats.closed, (n as u64 * (n as u64 + 1)) / 2, "closed law at N={n}");
        assert_eq!(out.stats.i_closed, 4u64.pow(n) - 1, "i-closed law at N={n}");
    }
    println!("criterion 02: pass");
}

/// The toy search space on `(aa)ba` with window 2 and threshold 2: the four
/// reachable frequent states and nothing else; support-1 branches die.
#[test]
fn criterion_03_toy_search_space() {
    let out = mine(&compact("(aa)ba"), &MinerConfig::new(2, 2)).unwrap();
    let visited: BTreeSet<(String, u64)> = out
        .i_closed
        .iter()
        .map(|e| (e.canonical_text(), e.support().unwrap()))
        .collect();
    let expected: BTreeSet<(String, u64)> = [
        ("nodes: 1{a}; proper: -; weak: -", 4u64),
        ("nodes: 1{a,a}; proper: -; weak: -", 2),
        ("nodes: 1{b}; proper: -; weak: -", 2),
        ("nodes: 1{a} 2{b}; proper: -; weak: -", 2),
    ]
    .into_iter()
    .map(|(t, s)| (t.to_string(), s))
    .collect();
    assert_eq!(visited, expected);
    assert_eq!(out.stats.i_closed, 4);
    println!("criterion 03: pass");
}

/// The worked support example: the a..d episode with proper a->d is covered
/// by exactly two windows of size 4 on `abcdacbd`.
#[test]
fn criterion_04_worked_support_example() {
    let s = compact("abcdacbd");
    let g1 = toy_g1();
    let fast = instance::support(&instance::instances_of(&s, &g1, 4), 4);
    assert_eq!(fast, 2);
    assert_eq!(oracle::brute_support(&s, &g1, 4), 2);
    println!("criterion 04: pass");
}

/// The instance fixture on `abcbdacbcd` with window 5: exactly four
/// embeddings, and their closure orders every pair except b and c.
#[test]
fn criterion_05_instance_fixture() {
    let s = compact("abcbdacbcd");
    let iset = instance::instances_of(&s, &toy_g1(), 5);
    assert_eq!(
        iset.mapped_ids(&s),
        vec![
            vec![1, 2, 3, 5],
            vec![1, 4, 3, 5],
            vec![6, 8, 7, 10],
            vec![6, 8, 9, 10],
        ]
    );
    let icl = instance::instance_closure(&s, &iset).unwrap();
    assert_eq!(icl.canonical_code(), closure_g2().canonical_code());
    println!("criterion 05: pass");
}

/// Coverage fixtures for both evaluation routes: the backtracking oracle and
/// instance enumeration.
#[test]
fn criterion_06_coverage_fixtures() {
    let cases = [
        ("ab(cd)", toy_g1(), true),
        ("ab(cd)", toy_g2(), false),
        ("ab(cd)", toy_g3(), true),
        ("(ab)cd", toy_g1(), true),
        ("(ab)cd", toy_g2(), true),
        ("(ab)cd", toy_g3(), false),
    ];
    for (text, episode, expected) in cases {
        let s = compact(text);
        assert_eq!(oracle::covers(&s, &episode), expected, "oracle on {text}");
        let span = (s.max_ts().unwrap() - s.min_ts().unwrap() + 1) as u64;
        let via_instances = !instance::instances_of(&s, &episode, span).is_empty();
        assert_eq!(via_instances, expected, "instances on {text}");
    }
    println!("criterion 06: pass");
}

/// Subepisode fixtures for both deciders: the recursion and the witness
/// oracle.
#[test]
fn criterion_07_subepisode_fixtures() {
    let g1 = toy_g1();
    let g2 = toy_g2();
    let g3 = toy_g3();
    let h1 = toy_h1();
    let h2 = toy_h2();
    let cases = [
        (&h1, &h2, true),
        (&h2, &h1, true),
        (&g1, &g2, true),
        (&g1, &g3, true),
        (&g2, &g3, false),
        (&g3, &g2, false),
    ];
    for (g, h, expected) in cases {
        assert_eq!(step(std::slice::from_ref(g), h), expected, "step");
        assert_eq!(oracle::brute_subepisode(g, h), expected, "oracle");
    }
    println!("criterion 07: pass");
}

/// Support agreement on randomized inputs: the two-pass instance computation
/// equals the window-sliding oracle on at least 200 (sequence, episode, rho)
/// triples.
#[test]
fn criterion_08_randomized_support_agreement() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let labels = ["a", "b", "c", "d"];
    let episodes = oracle::enumerate_episodes(&labels, 3, 3);
    let mut checked = 0u32;
    while checked < 220 {
        let len = rng.random_range(1..=12usize);
        let alphabet = rng.random_range(1..=4usize);
        let mut ts = 1i64;
        let mut pairs = Vec::new();
        for _ in 0..len {
            ts += rng.random_range(0..=2i64);
            pairs.push((ts, labels[rng.random_range(0..alphabet)].to_string()));
        }
        let s = Sequence::from_pairs(pairs).unwrap();
        let rho = rng.random_range(1..=5u64);
        let ep = &episodes[rng.random_range(0..episodes.len())];
        let fast = instance::support(&instance::instances_of(&s, ep, rho), rho);
        let brute = oracle::brute_support(&s, ep, rho);
        assert_eq!(fast, brute, "sequence {s:?} episode {} rho {rho}", ep.canonical_text());
        checked += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "support agreement took {elapsed:?}");
    println!("criterion 08: pass ({checked} triples, {elapsed:?})");
}

fn brute_closed(s: &Sequence, rho: u64, sigma: u64, max_nodes: usize, max_events: usize) -> Vec<Episode> {
    let frequent = oracle::brute_frequent(s, rho, sigma, max_nodes, max_events);
    frequent
        .iter()
        .filter(|g| {
            !frequent.iter().any(|h| {
                h.support() == g.support()
                    && g.label_multiset().subset_of(&h.label_multiset())
                    && oracle::brute_subepisode(g, h)
                    && !oracle::brute_subepisode(h, g)
            })
        })
        .cloned()
        .collect()
}

fn assert_mine_matches_brute(s: &Sequence, rho: u64, sigma: u64, max_nodes: usize, max_events: usize) {
    let mined = mine(s, &MinerConfig::new(rho, sigma)).unwrap().closed;
    let brute = brute_closed(s, rho, sigma, max_nodes, max_events);
    assert_eq!(
        mined.len(),
        brute.len(),
        "closed counts differ on {s:?} rho={rho} sigma={sigma}\nmined: {:?}\nbrute: {:?}",
        mined.iter().map(Episode::canonical_text).collect::<Vec<_>>(),
        brute.iter().map(Episode::canonical_text).collect::<Vec<_>>(),
    );
    for m in &mined {
        let partners = brute
            .iter()
            .filter(|b| {
                b.support() == m.support()
                    && oracle::brute_subepisode(b, m)
                    && oracle::brute_subepisode(m, b)
            })
            .count();
        assert_eq!(
            partners,
            1,
            "no unique similar partner for {} on {s:?} rho={rho}",
            m.canonical_text()
        );
    }
}

/// Miner soundness and completeness against the brute-force closed frequent
/// set on an exhaustive small universe, up to similarity.
#[test]
fn criterion_09_miner_vs_bruteforce() {
    let started = Instant::now();
    let labels = ["a", "b", "c"];
    // every length-3 labelling under every time-stamp pattern (simultaneity
    // included), two window sizes
    let ts_patterns: [&[i64]; 4] = [&[1, 2, 3], &[1, 1, 2], &[1, 2, 2], &[1, 1, 1]];
    for combo in 0..27u32 {
        let picks = [combo % 3, (combo / 3) % 3, (combo / 9) % 3];
        for pattern in ts_patterns {
            let pairs: Vec<(i64, String)> = pattern
                .iter()
                .zip(picks)
                .map(|(&ts, p)| (ts, labels[p as usize].to_string()))
                .collect();
            let s = Sequence::from_pairs(pairs).unwrap();
            for rho in [2u64, 4] {
                assert_mine_matches_brute(&s, rho, 2, 3, 4);
            }
        }
    }
    // every length-4 labelling over consecutive time stamps
    for combo in 0..81u32 {
        let pairs: Vec<(i64, String)> = (0..4)
            .map(|i| (i as i64 + 1, labels[(combo / 3u32.pow(i)) as usize % 3].to_string()))
            .collect();
        let s = Sequence::from_pairs(pairs).unwrap();
        assert_mine_matches_brute(&s, 3, 2, 3, 4);
    }
    // longer sequences, seeded: distinct stamps up to length 8 (window 4
    // holds at most 4 events) and repeat-heavy ones up to length 6
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let len = rng.random_range(6..=8usize);
        let mut ts = 0i64;
        let mut pairs = Vec::new();
        for _ in 0..len {
            ts += rng.random_range(1..=2i64);
            pairs.push((ts, labels[rng.random_range(0..3)].to_string()));
        }
        let s = Sequence::from_pairs(pairs).unwrap();
        assert_mine_matches_brute(&s, 4, 2, 4, 4);
    }
    for _ in 0..12 {
        let len = rng.random_range(4..=6usize);
        loop {
            let mut ts = 1i64;
            let mut pairs = vec![(1i64, labels[rng.random_range(0..3)].to_string())];
            for _ in 1..len {
                ts += rng.random_range(0..=2i64);
                pairs.push((ts, labels[rng.random_range(0..3)].to_string()));
            }
            let s = Sequence::from_pairs(pairs).unwrap();
            let dense = (s.min_ts().unwrap()..=s.max_ts().unwrap())
                .any(|t| s.ts_index_range(t, t + 2).len() > 4);
            if dense {
                continue; // window 3 must hold at most 4 events for the bounds
            }
            assert_mine_matches_brute(&s, 3, 2, 4, 4);
            break;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "miner comparison took {elapsed:?}");
    println!("criterion 09: pass ({elapsed:?})");
}

/// The recursion against the witness oracle: exhaustive over the two-label
/// universe with up to three nodes, plus 500 seeded larger pairs.
#[test]
fn criterion_10_step_vs_oracle() {
    let started = Instant::now();
    let small = oracle::enumerate_episodes(&["a", "b"], 3, 4);
    for g in &small {
        for h in &small {
            assert_eq!(
                step(std::slice::from_ref(g), h),
                oracle::brute_subepisode(g, h),
                "{} vs {}",
                g.canonical_text(),
                h.canonical_text()
            );
        }
    }
    let larger = oracle::enumerate_episodes(&["a", "b", "c"], 4, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..500 {
        let g = &larger[rng.random_range(0..larger.len())];
        let h = &larger[rng.random_range(0..larger.len())];
        assert_eq!(
            step(std::slice::from_ref(g), h),
            oracle::brute_subepisode(g, h),
            "{} vs {}",
            g.canonical_text(),
            h.canonical_text()
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "step comparison took {elapsed:?}");
    println!(
        "criterion 10: pass ({} exhaustive pairs + 500 sampled, {elapsed:?})",
        small.len() * small.len()
    );
}

/// Reflexivity and transitivity of the subepisode relation on sampled
/// episodes, decided through the recursion.
#[test]
fn subepisode_relation_is_a_preorder() {
    let universe = oracle::enumerate_episodes(&["a", "b"], 2, 3);
    for e in &universe {
        assert!(subepisode::subepisode(e, e).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..400 {
        let g = &universe[rng.random_range(0..universe.len())];
        let h = &universe[rng.random_range(0..universe.len())];
        let k = &universe[rng.random_range(0..universe.len())];
        if subepisode::subepisode(g, h).unwrap() && subepisode::subepisode(h, k).unwrap() {
            assert!(
                subepisode::subepisode(g, k).unwrap(),
                "transitivity broke on {}, {}, {}",
                g.canonical_text(),
                h.canonical_text(),
                k.canonical_text()
            );
        }
    }
}

/// Every mined episode is transitively closed, acyclic, i-closed and
/// frequent — checked over a handful of dissimilar sequences.
#[test]
fn mined_output_invariants() {
    for (text, rho, sigma) in [
        ("(aa)ba", 2u64, 2u64),
        ("abcbdacbcd", 5, 2),
        ("a(bc)ab(ac)b", 3, 2),
        ("(ab)(ab)(ab)", 2, 2),
    ] {
        let s = compact(text);
        let out = mine(&s, &MinerConfig::new(rho, sigma)).unwrap();
        for ep in out.closed.iter().chain(out.i_closed.iter()) {
            assert!(ep.is_transitively_closed(), "{}", ep.canonical_text());
            assert!(!ep.has_cycle());
            let support = ep.support().unwrap();
            assert!(support >= sigma);
            let iset = instance::instances_of(&s, ep, rho);
            assert_eq!(instance::support(&iset, rho), support);
            let icl = instance::instance_closure(&s, &iset).unwrap();
            assert_eq!(icl.canonical_code(), ep.canonical_code(), "i-closed");
        }
    }
}
