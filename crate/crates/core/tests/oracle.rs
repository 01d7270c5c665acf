//! Cross-checks against an independent utility model built from all-pairs
//! shortest complete-hop distances (Floyd-Warshall) instead of BFS.

use netform::analysis::{best_response, diameter, enumerate_all, StabilityNotion, DEFAULT_CENSUS_BUDGET};
use netform::constructors::{make_balanced_flower, make_kautz, make_random};
use netform::params::ratio;
use netform::utility::{edge_status, utility, welfare, EdgeStatus};
use netform::{BidirectedGraph, EdgeAction, EdgeRef, Horizon, Layer, Mode, ModelParams, Rational};

const INF: usize = usize::MAX / 4;

/// dist[u][v] = fewest complete speaking hops from u to v.
#[allow(clippy::needless_range_loop)]
fn distances(g: &BidirectedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for v in 0..n {
            let speak = g.has_edge(EdgeRef::speaking(u, v));
            let listen = g.mode() == Mode::Directed || g.has_edge(EdgeRef::listening(v, u));
            if u != v && speak && listen {
                d[u][v] = 1;
            }
        }
    }
    for m in 0..n {
        for u in 0..n {
            for v in 0..n {
                d[u][v] = d[u][v].min(d[u][m] + d[m][v]);
            }
        }
    }
    d
}

fn within(d: usize, k: Horizon) -> bool {
    match k {
        Horizon::Infinite => d < INF,
        Horizon::Finite(k) => d <= k as usize,
    }
}

fn oracle_utility(g: &BidirectedGraph, p: &ModelParams, v: usize) -> Rational {
    let d = distances(g);
    let n = g.n();
    let speak_reach = (0..n).filter(|&u| u != v && within(d[v][u], p.horizon)).count();
    let mut u = Rational::from_integer(speak_reach as i64)
        - p.c_speak * Rational::from_integer(g.out_degree(Layer::Speaking, v) as i64);
    if g.mode() == Mode::Bidirected {
        // Listening hops run against speaking hops.
        let listen_reach = (0..n).filter(|&u| u != v && within(d[u][v], p.horizon)).count();
        u += Rational::from_integer(listen_reach as i64)
            - p.c_listen * Rational::from_integer(g.out_degree(Layer::Listening, v) as i64);
    }
    u
}

fn oracle_welfare(g: &BidirectedGraph, p: &ModelParams) -> Rational {
    (0..g.n()).map(|v| oracle_utility(g, p, v)).sum()
}

fn oracle_status(g: &BidirectedGraph, p: &ModelParams, e: EdgeRef) -> EdgeStatus {
    let before = oracle_utility(g, p, e.tail);
    let mut h = g.clone();
    let present = g.has_edge(e);
    h.apply(e, if present { EdgeAction::Remove } else { EdgeAction::Add }).unwrap();
    let after = oracle_utility(&h, p, e.tail);
    match (present, after > before) {
        (true, true) => EdgeStatus::Removable,
        (true, false) => EdgeStatus::NeutralPresent,
        (false, true) => EdgeStatus::Addable,
        (false, false) => EdgeStatus::NeutralAbsent,
    }
}

fn param_grid(mode: Mode) -> Vec<ModelParams> {
    let mut out = Vec::new();
    for (num, den) in [(1, 2), (1, 1), (3, 2), (5, 2)] {
        for k in [Horizon::Finite(1), Horizon::Finite(2), Horizon::Finite(3), Horizon::Infinite] {
            out.push(match mode {
                Mode::Directed => ModelParams::directed(ratio(num, den), k).unwrap(),
                Mode::Bidirected => ModelParams::new(ratio(num, den), ratio(den, num), k).unwrap(),
            });
        }
    }
    out
}

#[test]
fn utilities_match_distance_oracle() {
    for seed in 0..60 {
        let mode = if seed % 2 == 0 { Mode::Directed } else { Mode::Bidirected };
        let n = 2 + seed as usize % 7;
        let g = make_random(n, mode, 0.15 + 0.1 * (seed % 5) as f64, seed).unwrap();
        for p in param_grid(mode) {
            for v in 0..n {
                assert_eq!(utility(&g, &p, v).unwrap().u_total, oracle_utility(&g, &p, v), "seed {seed} v {v}");
            }
            assert_eq!(welfare(&g, &p).unwrap(), oracle_welfare(&g, &p));
            for e in g.potential_edges() {
                assert_eq!(edge_status(&g, &p, e).unwrap(), oracle_status(&g, &p, e), "seed {seed} {e}");
            }
        }
    }
}

#[test]
fn diameter_matches_distance_oracle() {
    for seed in 0..40 {
        let g = make_random(2 + seed as usize % 6, Mode::Directed, 0.45, seed).unwrap();
        let worst = distances(&g).into_iter().flatten().max().unwrap();
        assert_eq!(diameter(&g), (worst < INF).then_some(worst));
    }
}

#[test]
fn flower_welfare_formula_holds() {
    // n(n-1) - c*ceil((n-1)/floor(k/2)) - c(n-1), valid while every petal
    // is short enough for the horizon.
    for (n, k) in [(10, 6), (26, 10), (24, 10), (17, 8), (13, 6), (30, 11)] {
        let g = make_balanced_flower(n, k, Mode::Directed).unwrap();
        let half = k / 2;
        let q = (n - 1).div_ceil(half) as i64;
        let n = n as i64;
        for c in [ratio(1, 1), ratio(3, 2), ratio(2, 1)] {
            let p = ModelParams::directed(c, Horizon::Finite(k as u32)).unwrap();
            let expected = Rational::from_integer(n * (n - 1)) - c * q - c * (n - 1);
            assert_eq!(welfare(&g, &p).unwrap(), expected, "n={n} k={k}");
            assert_eq!(oracle_welfare(&g, &p), expected);
        }
    }
}

#[test]
fn kautz_welfare_identity() {
    for (d, diam) in [(2, 3), (2, 4), (3, 2), (3, 3), (1, 2)] {
        let g = make_kautz(d, diam, Mode::Directed).unwrap();
        let n = ((d + 1) * d.pow(diam as u32 - 1)) as i64;
        assert_eq!(g.n() as i64, n);
        let c = ratio(9, 10);
        let p = ModelParams::directed(c, Horizon::Finite(diam as u32)).unwrap();
        let expected = Rational::from_integer(n) * (Rational::from_integer(n - 1) - c * d as i64);
        assert_eq!(welfare(&g, &p).unwrap(), expected);
        assert_eq!(oracle_welfare(&g, &p), expected);
    }
    let k24 = make_kautz(2, 4, Mode::Directed).unwrap();
    let p = ModelParams::directed(ratio(9, 10), Horizon::Finite(4)).unwrap();
    assert_eq!(welfare(&k24, &p).unwrap(), ratio(2544, 5));
}

#[test]
fn best_response_matches_naive_search() {
    // Naive search without tie-breaking: compare utilities only.
    for seed in 0..12 {
        let n = 3 + seed as usize % 3;
        let mode = if seed % 3 == 0 { Mode::Bidirected } else { Mode::Directed };
        let g = make_random(n, mode, 0.3, seed).unwrap();
        let p = match mode {
            Mode::Directed => ModelParams::directed(ratio(3, 4), Horizon::Finite(2)).unwrap(),
            Mode::Bidirected => ModelParams::uniform(ratio(1, 2), Horizon::Finite(2)).unwrap(),
        };
        for v in 0..n {
            let (_, best) = best_response(&g, &p, v, 1 << 20).unwrap();
            let others: Vec<usize> = (0..n).filter(|&w| w != v).collect();
            let layers = if mode == Mode::Bidirected { 2 } else { 1 };
            let mut naive = None::<Rational>;
            for mask in 0u64..1 << (others.len() * layers) {
                let mut h = g.clone();
                for (i, &w) in others.iter().enumerate() {
                    let s = EdgeRef::speaking(v, w);
                    h.apply(s, if mask >> i & 1 == 1 { EdgeAction::Add } else { EdgeAction::Remove }).unwrap();
                    if layers == 2 {
                        let l = EdgeRef::listening(v, w);
                        let bit = mask >> (i + others.len()) & 1 == 1;
                        h.apply(l, if bit { EdgeAction::Add } else { EdgeAction::Remove }).unwrap();
                    }
                }
                let u = oracle_utility(&h, &p, v);
                naive = Some(naive.map_or(u, |b| b.max(u)));
            }
            assert_eq!(Some(best), naive, "seed {seed} v {v}");
        }
    }
}

#[test]
fn census_max_welfare_matches_oracle() {
    let p = ModelParams::directed(ratio(1, 1), Horizon::Infinite).unwrap();
    let census = enumerate_all(3, &p, Mode::Directed, StabilityNotion::Edge, DEFAULT_CENSUS_BUDGET).unwrap();
    let edges = netform::graph::potential_edges(3, Mode::Directed);
    let mut best = None::<Rational>;
    for mask in 0u64..64 {
        let mut g = BidirectedGraph::new(3, Mode::Directed).unwrap();
        for (i, &e) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_edge(e).unwrap();
            }
        }
        let w = oracle_welfare(&g, &p);
        best = Some(best.map_or(w, |b| b.max(w)));
    }
    assert_eq!(Some(census.max_welfare), best);
}
