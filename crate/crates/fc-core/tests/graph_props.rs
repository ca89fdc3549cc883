//! Randomized catalog-graph workloads checked against per-vertex oracles:
//! independent predecessor searches, brute-force bridge recomputation, and
//! the per-edge cost discipline.

use std::collections::HashMap;

use fc_core::audit;
use fc_core::{reduce_degree, CatalogGraph, ElementHandle, Key, VertexId, EDGE_COST_COEFF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
enum Shape {
    Path,
    Tree,
    Sparse,
}

#[derive(Clone, Copy, Debug)]
enum KeyStyle {
    Continuous,
    Grid,
}

fn sample_key(rng: &mut ChaCha8Rng, style: KeyStyle) -> f64 {
    match style {
        KeyStyle::Continuous => rng.random::<f64>(),
        KeyStyle::Grid => rng.random_range(0..32) as f64,
    }
}

fn build_graph(
    shape: Shape,
    vertices: usize,
    keys_per_vertex: usize,
    style: KeyStyle,
    rng: &mut ChaCha8Rng,
) -> CatalogGraph {
    let ids: Vec<VertexId> = (0..vertices as u64).map(VertexId).collect();
    let vertex_keys: Vec<(VertexId, Vec<f64>)> = ids
        .iter()
        .map(|&v| {
            let n = rng.random_range(0..=keys_per_vertex);
            (v, (0..n).map(|_| sample_key(rng, style)).collect())
        })
        .collect();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    match shape {
        Shape::Path => {
            for w in ids.windows(2) {
                edges.push((w[0], w[1]));
            }
        }
        Shape::Tree => {
            let mut degree = vec![0usize; vertices];
            for i in 1..vertices {
                let mut parent = rng.random_range(0..i);
                while degree[parent] >= 2 {
                    parent = rng.random_range(0..i);
                }
                degree[parent] += 1;
                degree[i] += 1;
                edges.push((ids[parent], ids[i]));
            }
        }
        Shape::Sparse => {
            let mut degree = vec![0usize; vertices];
            let attempts = vertices * 2;
            for _ in 0..attempts {
                let a = rng.random_range(0..vertices);
                let b = rng.random_range(0..vertices);
                if a == b || degree[a] >= 3 || degree[b] >= 3 {
                    continue;
                }
                if edges.contains(&(ids[a], ids[b])) || edges.contains(&(ids[b], ids[a])) {
                    continue;
                }
                degree[a] += 1;
                degree[b] += 1;
                edges.push((ids[a], ids[b]));
            }
        }
    }
    CatalogGraph::build(3, rng.random(), vertex_keys, edges).unwrap()
}

type Mirror = HashMap<VertexId, Vec<(f64, ElementHandle)>>;

fn mirror_of(g: &CatalogGraph) -> Mirror {
    g.vertex_ids()
        .map(|v| {
            let entries = g
                .catalog(v)
                .unwrap()
                .iter()
                .map(|(h, k)| (k.value(), h))
                .collect();
            (v, entries)
        })
        .collect()
}

fn oracle_pred(entries: &[(f64, ElementHandle)], x: f64) -> Option<ElementHandle> {
    let idx = entries.partition_point(|(k, _)| *k <= x);
    if idx == 0 {
        None
    } else {
        Some(entries[idx - 1].1)
    }
}

fn random_walk(g: &CatalogGraph, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<VertexId> {
    let ids: Vec<VertexId> = g.vertex_ids().collect();
    let mut path = vec![ids[rng.random_range(0..ids.len())]];
    for _ in 1..max_len {
        let here = *path.last().unwrap();
        let neighbors = g.neighbors(here).unwrap();
        if neighbors.is_empty() {
            break;
        }
        path.push(neighbors[rng.random_range(0..neighbors.len())]);
    }
    path
}

fn mutate(g: &mut CatalogGraph, mirror: &mut Mirror, style: KeyStyle, rng: &mut ChaCha8Rng) {
    let ids: Vec<VertexId> = g.vertex_ids().collect();
    let v = ids[rng.random_range(0..ids.len())];
    let entries = mirror.get_mut(&v).unwrap();
    let remove = !entries.is_empty() && rng.random_bool(0.45);
    if remove {
        let (k, h) = entries.remove(rng.random_range(0..entries.len()));
        assert_eq!(g.remove(v, h).unwrap(), Key::finite(k).unwrap());
    } else {
        let k = sample_key(rng, style);
        let h = g.insert(v, Key::finite(k).unwrap()).unwrap();
        let pos = entries.partition_point(|(o, _)| *o <= k);
        entries.insert(pos, (k, h));
    }
}

#[test]
fn path_search_matches_per_vertex_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6A71);
    let mut queries = 0usize;
    for trial in 0..60 {
        let shape = [Shape::Path, Shape::Tree, Shape::Sparse][trial % 3];
        let style = if trial % 2 == 0 {
            KeyStyle::Continuous
        } else {
            KeyStyle::Grid
        };
        let mut g = build_graph(shape, rng.random_range(2..24), 48, style, &mut rng);
        let mut mirror = mirror_of(&g);
        for _ in 0..rng.random_range(0..40) {
            mutate(&mut g, &mut mirror, style, &mut rng);
        }
        for _ in 0..40 {
            let path = random_walk(&g, &mut rng, 10);
            let x = sample_key(&mut rng, style) + rng.random_range(-1..=1) as f64 * 0.25;
            let key = Key::finite(x).unwrap();
            let (answers, trace) = g.path_search(&path, key).unwrap();
            assert_eq!(answers.len(), path.len());
            assert_eq!(trace.edges.len(), path.len() - 1);
            for (vertex, pos) in answers {
                assert_eq!(pos, oracle_pred(&mirror[&vertex], x), "vertex {vertex}");
            }
            for e in &trace.edges {
                assert!(e.delta.get() >= 2);
            }
            queries += 1;
        }
    }
    assert!(queries >= 2000);
}

#[test]
fn bridges_stay_exact_under_updates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB21D);
    for trial in 0..12 {
        let shape = [Shape::Path, Shape::Tree, Shape::Sparse][trial % 3];
        let style = if trial % 2 == 0 {
            KeyStyle::Grid
        } else {
            KeyStyle::Continuous
        };
        let mut g = build_graph(shape, rng.random_range(2..10), 16, style, &mut rng);
        let mut mirror = mirror_of(&g);
        audit::check_graph(&g).unwrap();
        for _ in 0..60 {
            mutate(&mut g, &mut mirror, style, &mut rng);
            audit::check_bridges(&g).unwrap();
            audit::check_bridge_monotonicity(&g).unwrap();
        }
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Per-edge finger steps against the local discrepancy at the query: the
/// normalized ratio `steps / (1 + log2 delta)` stays below the committed
/// coefficient in the mean, with a bounded 99th percentile.
#[test]
fn edge_cost_tracks_local_discrepancy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC057);
    let mut ratios: Vec<f64> = Vec::new();
    for trial in 0..30 {
        let shape = [Shape::Path, Shape::Tree, Shape::Sparse][trial % 3];
        let g = build_graph(shape, 16, 512, KeyStyle::Continuous, &mut rng);
        for _ in 0..40 {
            let path = random_walk(&g, &mut rng, 12);
            let x = Key::finite(rng.random::<f64>()).unwrap();
            let (_, trace) = g.path_search(&path, x).unwrap();
            for e in &trace.edges {
                ratios.push(e.finger_steps as f64 / (1.0 + e.delta.log2()));
            }
        }
    }
    assert!(ratios.len() >= 10_000, "collected {}", ratios.len());
    ratios.sort_by(f64::total_cmp);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let p99 = percentile(&ratios, 0.99);
    println!(
        "edge cost over {} traversals: mean ratio {:.3}, p99 {:.3} (budget {}, 3x = {})",
        ratios.len(),
        mean,
        p99,
        EDGE_COST_COEFF,
        3.0 * EDGE_COST_COEFF
    );
    assert!(mean <= EDGE_COST_COEFF, "mean ratio {mean}");
    assert!(p99 <= 3.0 * EDGE_COST_COEFF, "p99 ratio {p99}");
}

/// Degree reduction on random graphs with degrees up to 16: the reduced
/// graph obeys the bound and answers match on all original vertices.
#[test]
fn degree_reduction_preserves_answers() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD36);
    for _ in 0..100 {
        let vertices = rng.random_range(4..28);
        let ids: Vec<VertexId> = (0..vertices as u64).map(VertexId).collect();
        let vertex_keys: Vec<(VertexId, Vec<f64>)> = ids
            .iter()
            .map(|&v| {
                let n = rng.random_range(0..24);
                (v, (0..n).map(|_| rng.random::<f64>()).collect())
            })
            .collect();
        let mut degree = vec![0usize; vertices];
        let mut edges = Vec::new();
        for _ in 0..vertices * 4 {
            let a = rng.random_range(0..vertices);
            let b = rng.random_range(0..vertices);
            if a == b || degree[a] >= 16 || degree[b] >= 16 {
                continue;
            }
            if edges.contains(&(ids[a], ids[b])) || edges.contains(&(ids[b], ids[a])) {
                continue;
            }
            degree[a] += 1;
            degree[b] += 1;
            edges.push((ids[a], ids[b]));
        }
        let g = CatalogGraph::build(16, rng.random(), vertex_keys, edges).unwrap();
        let reduced = reduce_degree(&g, 3).unwrap();
        for v in reduced.graph().vertex_ids() {
            assert!(reduced.graph().degree(v).unwrap() <= 3);
        }
        for _ in 0..10 {
            let path = random_walk(&g, &mut rng, 8);
            let mapped = reduced.map_path(&path).unwrap();
            for w in mapped.windows(2) {
                assert!(reduced.graph().has_edge(w[0], w[1]));
            }
            let x = Key::finite(rng.random::<f64>()).unwrap();
            let original = g.path_locate(&path, x).unwrap();
            let through = reduced.graph().path_locate(&mapped, x).unwrap();
            for (v, pos) in &original {
                let want = pos.map(|h| g.catalog(*v).unwrap().key_of(h).unwrap());
                let (rv, rpos) = through
                    .iter()
                    .find(|(rv, _)| reduced.original_of(*rv) == Some(*v))
                    .expect("original vertex appears among its copies");
                let got = rpos.map(|h| reduced.graph().catalog(*rv).unwrap().key_of(h).unwrap());
                assert_eq!(want, got);
            }
        }
    }
}
