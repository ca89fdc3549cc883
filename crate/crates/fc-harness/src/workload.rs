//! Randomized catalog-graph workloads for verification runs: graph shapes,
//! a per-vertex sorted mirror serving as the independent oracle, random
//! walk paths, and single-step mutations that keep the mirror in lockstep.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use fc_core::{CatalogGraph, ElementHandle, Key, VertexId};

#[derive(Clone, Copy, Debug)]
pub enum GraphShape {
    Path,
    Tree,
    Sparse,
}

pub const SHAPES: [GraphShape; 3] = [GraphShape::Path, GraphShape::Tree, GraphShape::Sparse];

#[derive(Clone, Copy, Debug)]
pub enum KeyStyle {
    Continuous,
    /// Small integer grid; exercises duplicate keys heavily.
    Grid,
}

pub fn sample_key(rng: &mut ChaCha8Rng, style: KeyStyle) -> f64 {
    match style {
        KeyStyle::Continuous => rng.random::<f64>(),
        KeyStyle::Grid => rng.random_range(0..32) as f64,
    }
}

/// Bounded-degree random graph (max degree 3) with random catalogs of up to
/// `max_keys` elements per vertex.
pub fn random_graph(
    shape: GraphShape,
    vertices: usize,
    max_keys: usize,
    style: KeyStyle,
    rng: &mut ChaCha8Rng,
) -> CatalogGraph {
    let ids: Vec<VertexId> = (0..vertices as u64).map(VertexId).collect();
    let vertex_keys: Vec<(VertexId, Vec<f64>)> = ids
        .iter()
        .map(|&v| {
            let n = rng.random_range(0..=max_keys);
            (v, (0..n).map(|_| sample_key(rng, style)).collect())
        })
        .collect();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut degree = vec![0usize; vertices];
    match shape {
        GraphShape::Path => {
            for w in ids.windows(2) {
                edges.push((w[0], w[1]));
            }
        }
        GraphShape::Tree => {
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
        GraphShape::Sparse => {
            for _ in 0..vertices * 2 {
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
    CatalogGraph::build(3, rng.random(), vertex_keys, edges).expect("degree-respecting build")
}

/// Per-vertex sorted `(key, handle)` lists mirroring the catalogs; the
/// independent predecessor oracle.
pub type Mirror = HashMap<VertexId, Vec<(f64, ElementHandle)>>;

pub fn mirror_of(g: &CatalogGraph) -> Mirror {
    g.vertex_ids()
        .map(|v| {
            let entries = g
                .catalog(v)
                .expect("listed vertex")
                .iter()
                .map(|(h, k)| (k.value(), h))
                .collect();
            (v, entries)
        })
        .collect()
}

pub fn oracle_pred(entries: &[(f64, ElementHandle)], x: f64) -> Option<ElementHandle> {
    let idx = entries.partition_point(|(k, _)| *k <= x);
    if idx == 0 {
        None
    } else {
        Some(entries[idx - 1].1)
    }
}

pub fn total_elements(mirror: &Mirror) -> usize {
    mirror.values().map(Vec::len).sum()
}

/// Random walk along edges; restarts are not needed since any prefix is a
/// valid search path.
pub fn random_walk(g: &CatalogGraph, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<VertexId> {
    let ids: Vec<VertexId> = g.vertex_ids().collect();
    let mut path = vec![ids[rng.random_range(0..ids.len())]];
    for _ in 1..max_len {
        let here = *path.last().unwrap();
        let neighbors = g.neighbors(here).expect("listed vertex");
        if neighbors.is_empty() {
            break;
        }
        path.push(neighbors[rng.random_range(0..neighbors.len())]);
    }
    path
}

/// One random insert or delete, applied to the graph and its mirror. When
/// `max_total` is hit, the step is forced to delete.
pub fn mutate(
    g: &mut CatalogGraph,
    mirror: &mut Mirror,
    style: KeyStyle,
    max_total: usize,
    rng: &mut ChaCha8Rng,
) {
    let ids: Vec<VertexId> = g.vertex_ids().collect();
    let v = ids[rng.random_range(0..ids.len())];
    let at_cap = total_elements(mirror) >= max_total;
    let entries = mirror.get_mut(&v).expect("mirrored vertex");
    let remove = !entries.is_empty() && (at_cap || rng.random_bool(0.45));
    if remove {
        let (k, h) = entries.remove(rng.random_range(0..entries.len()));
        assert_eq!(
            g.remove(v, h).expect("live handle"),
            Key::finite(k).unwrap()
        );
    } else {
        let k = sample_key(rng, style);
        let h = g.insert(v, Key::finite(k).unwrap()).expect("listed vertex");
        let pos = entries.partition_point(|(o, _)| *o <= k);
        entries.insert(pos, (k, h));
    }
}
