use std::collections::BTreeSet;

use algturan::analysis::exponent_scan;
use algturan::construction::{
    derive_params, draw_polynomial, find_bad_sequences, run_construction, Budget, ConstructionParams, ExtensionRoute,
    FSource, Overrides,
};
use algturan::hypergraph::{build_from_polynomial, count_pattern, extension_set};
use algturan::oracle::{exact_turan, TuranInstance, DEFAULT_SLOT_CAP};
use algturan::{FieldCtx, Hypergraph, Pattern};

fn params(sizes: &[usize], pattern: &Pattern, q: u64, c: usize) -> ConstructionParams {
    let ctx = FieldCtx::with_order(q).unwrap();
    let overrides = Overrides { bad_threshold: Some(c), ..Overrides::default() };
    derive_params(sizes, pattern, (ctx.characteristic(), ctx.degree()), &overrides).unwrap()
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// Mean copies of `H` in `G_f` against `C(N, v) * (v! / aut(H)) / q^e`.
fn first_moment(pattern: Pattern, q: u64, seeds: u64) -> (f64, f64) {
    let budget = Budget::default();
    let p = params(&[2], &pattern, q, 1);
    let n = p.vertex_count() as u64;
    let mut total = 0u64;
    for seed in 0..seeds {
        let f = draw_polynomial(&p, &FSource::Random, seed, "polynomial", 0, &budget).unwrap();
        let g = build_from_polynomial(&f, budget.build_caps()).unwrap();
        total += count_pattern(&g, &pattern).unwrap().unordered_copies;
    }
    let v = pattern.vertex_count() as u64;
    let aut = pattern.automorphism_count().unwrap() as f64;
    let placements = binom(n, v) * (1..=v).product::<u64>() as f64 / aut;
    (total as f64 / seeds as f64, placements / (q as f64).powi(pattern.edge_count() as i32))
}

#[test]
fn expected_edges_before_deletion() {
    let (mean, bound) = first_moment(Pattern::edge(2), 5, 30);
    assert!(mean >= 0.75 * bound, "mean {mean} vs {bound}");
}

#[test]
fn expected_triangles_before_deletion() {
    let (mean, bound) = first_moment(Pattern::clique(2, 3), 7, 30);
    assert!(mean >= 0.75 * bound, "mean {mean} vs {bound}");
}

/// Ordered pairs with `|W| >= c`, computed from adjacency alone.
fn naive_ordered_bad(g: &Hypergraph, c: usize) -> usize {
    let n = g.vertex_count() as u32;
    let mut bad = 0;
    for u in 0..n {
        for w in 0..n {
            if u == w {
                continue;
            }
            let common = (0..n).filter(|&x| x != u && x != w && g.has_edge(&[u, x]) && g.has_edge(&[w, x])).count();
            if common >= c {
                bad += 1;
            }
        }
    }
    bad
}

#[test]
fn bad_count_matches_naive_rescan() {
    let budget = Budget::default();
    let mut nonzero = 0;
    for c in [2, 3, 4] {
        let p = params(&[2], &Pattern::edge(2), 5, c);
        for seed in 0..5 {
            let res = run_construction(&p, seed, &budget, &FSource::Random).unwrap();
            assert_eq!(res.report.count() * 2, naive_ordered_bad(&res.g, c), "c={c} seed={seed}");
            nonzero += usize::from(res.report.count() > 0);

            for (seq, size) in &res.report.bad {
                assert_eq!(extension_set(&res.g, seq).unwrap().size(), *size);
                assert!(*size >= c);
                assert!(seq.vertices().any(|v| res.report.removed_vertices.contains(&v)));
            }
            assert!(res.report.removed_vertices.len() <= res.report.count());
            assert_eq!(res.g_prime.vertex_count(), res.g.vertex_count() - res.report.removed_vertices.len());
            assert!(res.certificate.is_none());
        }
    }
    assert!(nonzero > 0, "no instance exercised deletion");
}

#[test]
fn three_uniform_routes_and_deletion() {
    let budget = Budget::default();
    let p = params(&[1, 1], &Pattern::edge(3), 5, 2);
    for seed in 0..4 {
        let res = run_construction(&p, seed, &budget, &FSource::Random).unwrap();
        let by_poly = find_bad_sequences(ExtensionRoute::Polynomial(&res.polynomial), &res.params, &budget).unwrap();
        assert_eq!(by_poly, res.report);
        for (seq, _) in &res.report.bad {
            let survivors: Vec<Vec<u32>> = seq.groups().to_vec();
            let intact = survivors.iter().flatten().all(|v| !res.report.removed_vertices.contains(v));
            assert!(!intact);
        }
    }
}

#[test]
fn lower_bounds_never_exceed_exact_values() {
    let budget = Budget::default();
    let cases: Vec<(Vec<usize>, Pattern, Vec<u64>, usize)> = vec![
        (vec![1], Pattern::edge(2), vec![3, 4, 5, 7], 2),
        (vec![1], Pattern::edge(2), vec![5, 7], 3),
        (vec![2], Pattern::edge(2), vec![2], 2),
        (vec![1, 1], Pattern::edge(3), vec![3, 4, 5], 2),
    ];
    for (sizes, pattern, qs, c) in cases {
        let mut parts = sizes.clone();
        parts.push(c);
        let forbidden = Pattern::complete_partite(parts).unwrap();
        for q in qs {
            for seed in 0..3 {
                let res = run_construction(&params(&sizes, &pattern, q, c), seed, &budget, &FSource::Random).unwrap();
                let n = res.g_prime.vertex_count();
                let inst = TuranInstance::new(n, forbidden.clone(), pattern.clone()).unwrap();
                let best = exact_turan(&inst, DEFAULT_SLOT_CAP).unwrap().max_count;
                assert!(res.summary.copies.unordered_copies <= best, "{} > {best} ({})", res.summary.copies.unordered_copies, inst.canonical());
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_runs() {
    let budget = Budget::default();
    let p = params(&[2], &Pattern::clique(2, 3), 4, 3);
    let a = run_construction(&p, 17, &budget, &FSource::Random).unwrap();
    let b = run_construction(&p, 17, &budget, &FSource::Random).unwrap();
    assert_eq!(a.summary, b.summary);
    assert_eq!(a.polynomial.to_text(), b.polynomial.to_text());
    assert_eq!(a.g_prime, b.g_prime);
    assert_eq!(a.report, b.report);
    let c = run_construction(&p, 18, &budget, &FSource::Random).unwrap();
    assert_ne!(a.summary.polynomial_sha256, c.summary.polynomial_sha256);
}

#[test]
fn exponent_scan_ignores_q_order() {
    let budget = Budget::default();
    let p = params(&[2], &Pattern::edge(2), 3, 3);
    let a = exponent_scan(&p, &[3, 4, 5], 3, 2, &budget).unwrap();
    let b = exponent_scan(&p, &[5, 3, 4, 3], 3, 2, &budget).unwrap();
    assert_eq!(a.slope, b.slope);
    assert_eq!(a.rows, b.rows);
}

#[test]
fn removed_sequences_lose_a_vertex() {
    let budget = Budget::default();
    let p = params(&[2], &Pattern::edge(2), 7, 3);
    let res = run_construction(&p, 4, &budget, &FSource::Random).unwrap();
    let removed: BTreeSet<u32> = res.report.removed_vertices.clone();
    let designated: BTreeSet<u32> = res.report.bad.iter().map(|(s, _)| s.min_vertex()).collect();
    assert!(!removed.is_empty());
    assert_eq!(removed, designated);
    let original: Vec<u64> = (0..res.g.vertex_count() as u64).filter(|v| !removed.contains(&(*v as u32))).collect();
    assert_eq!(res.g_prime.labels().unwrap(), original.as_slice());
}
