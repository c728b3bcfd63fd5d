use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use percolab::graph::{component_diameter, exact_diameter, sample_perfect_matching};
use percolab::{connected_components, percolate, sample_swg_erdos, sample_swg_matching, GenericGraph, Seed};

fn ring_pair(n: usize, u: usize, v: usize) -> bool {
    let d = u.abs_diff(v);
    d == 1 || d == n - 1
}

/// Every perfect matching of `0..n`, each as a sorted pair list.
fn all_matchings(nodes: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if nodes.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 1..nodes.len() {
        let rest: Vec<usize> = nodes[1..].iter().copied().filter(|&x| x != nodes[i]).collect();
        for mut m in all_matchings(&rest) {
            m.push((nodes[0], nodes[i]));
            m.sort_unstable();
            out.push(m);
        }
    }
    out
}

fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, var.sqrt())
}

#[test]
fn erdos_bridge_count_and_degree() {
    let n = 10_000usize;
    let q = 1.0 / n as f64;
    let pairs = (n * (n - 1) / 2 - n) as f64;
    let stats: Vec<(f64, usize)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_swg_erdos(n, 1.0, &mut Seed::new(1).derive(i).rng()).unwrap();
            (g.bridge_count() as f64, g.max_degree())
        })
        .collect();
    let counts: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let (mean, _) = mean_and_sd(&counts);
    let sigma = (pairs * q * (1.0 - q) / 100.0).sqrt();
    assert!((mean - pairs * q).abs() <= 3.0 * sigma, "mean {mean} vs {}", pairs * q);
    let cap = 4.0 * (n as f64).ln();
    assert!(stats.iter().all(|s| s.1 as f64 <= cap));
}

#[test]
fn matching_ring_overlap_matches_enumeration() {
    // exact expectation by enumeration at small n agrees with n / (n - 1)
    for n in [4usize, 6, 8] {
        let nodes: Vec<usize> = (0..n).collect();
        let ms = all_matchings(&nodes);
        let overlap: usize = ms.iter().map(|m| m.iter().filter(|&&(u, v)| ring_pair(n, u, v)).count()).sum();
        let exact = overlap as f64 / ms.len() as f64;
        assert!((exact - n as f64 / (n - 1) as f64).abs() < 1e-12, "n {n}: {exact}");
    }
    let n = 10_000usize;
    let samples: Vec<(f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_swg_matching(n, &mut Seed::new(2).derive(i).rng()).unwrap();
            let mut two = 0;
            for v in 0..n {
                let d = g.degree(v);
                assert!(d == 2 || d == 3);
                two += (d == 2) as usize;
            }
            ((n / 2 - g.bridge_count()) as f64, two as f64)
        })
        .collect();
    let overlaps: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let (mean, sd) = mean_and_sd(&overlaps);
    let expected = n as f64 / (n - 1) as f64;
    assert!((mean - expected).abs() <= 3.0 * sd / 10.0, "mean {mean}");
    // each dropped pair leaves two degree-2 nodes
    let degree_two: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (mean, sd) = mean_and_sd(&degree_two);
    assert!((mean - 2.0 * expected).abs() <= 3.0 * sd / 10.0, "degree-2 mean {mean}");
}

#[test]
fn perfect_matchings_are_uniform() {
    let nodes: Vec<usize> = (0..6).collect();
    let all = all_matchings(&nodes);
    assert_eq!(all.len(), 15);
    let draws = 100_000u64;
    let counts: BTreeMap<Vec<(usize, usize)>, u64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut m = sample_perfect_matching(6, &mut Seed::new(3).derive(i).rng()).unwrap();
            m.sort_unstable();
            m
        })
        .fold(BTreeMap::new, |mut acc, m| {
            *acc.entry(m).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    assert_eq!(counts.len(), 15);
    let f = 1.0 / 15.0;
    let sigma = (f * (1.0 - f) / draws as f64).sqrt();
    for m in &all {
        let got = counts[m] as f64 / draws as f64;
        assert!((got - f).abs() <= 4.0 * sigma, "{m:?}: {got}");
    }
}

#[test]
fn per_pair_bridge_marginals_agree() {
    let n = 50usize;
    let draws = 100_000u64;
    let tally = |matching: bool| -> Vec<u64> {
        (0..draws)
            .into_par_iter()
            .fold(
                || vec![0u64; n * n],
                |mut acc, i| {
                    let mut rng = Seed::new(4).derive(matching as u64).derive(i).rng();
                    let g = if matching {
                        sample_swg_matching(n, &mut rng).unwrap()
                    } else {
                        sample_swg_erdos(n, 1.0, &mut rng).unwrap()
                    };
                    for (u, v) in g.bridges().edges() {
                        acc[u * n + v] += 1;
                    }
                    acc
                },
            )
            .reduce(|| vec![0u64; n * n], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
    };
    let sigma = |f: f64| (f * (1.0 - f) / draws as f64).sqrt();
    // the matching marginal is 1 / (n - 1), indistinguishable from 1 / n here
    let erdos = 1.0 / n as f64;
    let pairing = 1.0 / (n - 1) as f64;
    assert!(pairing - erdos <= 4.0 * sigma(erdos));
    for matching in [false, true] {
        let target = if matching { pairing } else { erdos };
        let counts = tally(matching);
        for u in 0..n {
            for v in u + 1..n {
                let got = counts[u * n + v] as f64 / draws as f64;
                if ring_pair(n, u, v) {
                    assert_eq!(got, 0.0);
                } else {
                    assert!((got - target).abs() <= 4.0 * sigma(target), "matching {matching} ({u}, {v}): {got}");
                }
            }
        }
    }
}

fn flood_fill(n: usize, edges: &[(usize, usize)]) -> BTreeSet<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut out = BTreeSet::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.insert(comp);
    }
    out
}

#[test]
fn components_agree_with_flood_fill() {
    for i in 0..1000u64 {
        let mut rng = Seed::new(5).derive(i).rng();
        let n = 1 + (rng.uniform() * 64.0) as usize;
        let density = rng.uniform() * 4.0 / n as f64;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.uniform() < density {
                    edges.push((u, v));
                }
            }
        }
        let g = GenericGraph::from_edges(n, &edges, n).unwrap();
        let comps = connected_components(&g);
        assert!(comps.windows(2).all(|w| w[0].len() >= w[1].len()));
        assert_eq!(comps.into_iter().collect::<BTreeSet<_>>(), flood_fill(n, &edges), "graph {i}");
    }
}

#[test]
fn bounded_diameter_matches_all_sources_bfs() {
    for i in 0..300u64 {
        let mut rng = Seed::new(6).derive(i).rng();
        let n = 20 + (rng.uniform() * 400.0) as usize;
        let g = sample_swg_erdos(n, 1.5, &mut rng).unwrap();
        let p = 0.4 + 0.5 * rng.uniform();
        let gp = percolate(&g, p, p, &mut rng).unwrap();
        for comp in connected_components(&gp).iter().take(3) {
            assert_eq!(exact_diameter(&gp, comp).unwrap(), component_diameter(&gp, comp).unwrap(), "instance {i}");
        }
    }
}
