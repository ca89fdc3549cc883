//! Degree reduction: vertices above the degree bound are replaced by a
//! perfect binary tree of copies sharing one underlying catalog, so every
//! copy answers queries identically while no vertex exceeds degree 3. The
//! original edges attach to tree leaves, two per leaf; a path through a
//! replaced vertex detours through the tree, adding `O(log degree)` hops.

use std::collections::{BTreeMap, HashMap};

use crate::graph::{CatalogGraph, GraphError, VertexId};
use crate::seed::mix_seed;

pub struct ReducedGraph {
    graph: CatalogGraph,
    root_of: BTreeMap<VertexId, VertexId>,
    original_of: BTreeMap<VertexId, VertexId>,
    parent_of: HashMap<VertexId, VertexId>,
    port_of: HashMap<(VertexId, VertexId), (VertexId, VertexId)>,
}

impl ReducedGraph {
    pub fn graph(&self) -> &CatalogGraph {
        &self.graph
    }

    /// The copy holding the original vertex's id (the tree root; identity for
    /// vertices that were not replaced).
    pub fn root_of(&self, original: VertexId) -> Option<VertexId> {
        self.root_of.get(&original).copied()
    }

    /// The original vertex a reduced-graph vertex stands for.
    pub fn original_of(&self, copy: VertexId) -> Option<VertexId> {
        self.original_of.get(&copy).copied()
    }

    /// Translates a path of the original graph into an adjacent-vertex path
    /// of the reduced graph, detouring through copy trees where needed.
    /// Every vertex of the input appears as at least one of its copies in
    /// the output.
    pub fn map_path(&self, path: &[VertexId]) -> Result<Vec<VertexId>, GraphError> {
        if path.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        if path.len() == 1 {
            let root = self
                .root_of(path[0])
                .ok_or(GraphError::UnknownVertex(path[0]))?;
            return Ok(vec![root]);
        }
        let mut out: Vec<VertexId> = Vec::new();
        let mut at: Option<VertexId> = None;
        for win in path.windows(2) {
            let (pa, pb) = *self
                .port_of
                .get(&(win[0], win[1]))
                .ok_or(GraphError::NotAdjacent(win[0], win[1]))?;
            match at {
                None => out.push(pa),
                Some(arrived) => {
                    let seg = self.tree_path(arrived, pa);
                    out.extend(seg.into_iter().skip(1));
                }
            }
            out.push(pb);
            at = Some(pb);
        }
        Ok(out)
    }

    /// Path between two copies inside one replacement tree.
    fn tree_path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        if a == b {
            return vec![a];
        }
        let chain = |mut x: VertexId| {
            let mut c = vec![x];
            while let Some(&p) = self.parent_of.get(&x) {
                c.push(p);
                x = p;
            }
            c
        };
        let ca = chain(a);
        let cb = chain(b);
        let depth_a: HashMap<VertexId, usize> =
            ca.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let meet = cb
            .iter()
            .position(|v| depth_a.contains_key(v))
            .expect("copies share a tree root");
        let mut path: Vec<VertexId> = ca[..=depth_a[&cb[meet]]].to_vec();
        for &v in cb[..meet].iter().rev() {
            path.push(v);
        }
        path
    }
}

/// Rebuilds `g` so that no vertex exceeds degree `target` (at least 3).
/// Vertices already within the bound keep their ids; replaced vertices keep
/// their id on the tree root and spawn fresh ids for the other copies.
pub fn reduce_degree(g: &CatalogGraph, target: usize) -> Result<ReducedGraph, GraphError> {
    assert!(target >= 3, "a binary copy tree needs degree 3");
    let mut out = CatalogGraph::with_max_degree(target, mix_seed(g.seed(), 0xDEC0DE));
    let mut next_id = g.vertex_ids().map(|v| v.0).max().map_or(0, |m| m + 1);
    let mut root_of = BTreeMap::new();
    let mut original_of = BTreeMap::new();
    let mut parent_of = HashMap::new();
    let mut port_of = HashMap::new();
    // departure copy per directed original edge
    let mut my_port: HashMap<(VertexId, VertexId), VertexId> = HashMap::new();

    for v in g.vertex_ids() {
        let keys: Vec<f64> = g
            .catalog(v)
            .expect("listed vertex")
            .iter()
            .map(|(_, k)| k.value())
            .collect();
        let mut neighbors = g.neighbors(v).expect("listed vertex").to_vec();
        neighbors.sort_unstable();
        out.add_vertex(v, keys)?;
        root_of.insert(v, v);
        original_of.insert(v, v);
        if neighbors.len() <= target {
            for u in neighbors {
                my_port.insert((v, u), v);
            }
        } else {
            let leaf_count = neighbors.len().div_ceil(2).next_power_of_two();
            let total = 2 * leaf_count - 1;
            let mut ids = Vec::with_capacity(total);
            ids.push(v);
            for _ in 1..total {
                let id = VertexId(next_id);
                next_id += 1;
                out.add_vertex_sharing(id, v)?;
                original_of.insert(id, v);
                ids.push(id);
            }
            for i in 1..total {
                let parent = ids[(i - 1) / 2];
                out.add_edge(parent, ids[i])?;
                parent_of.insert(ids[i], parent);
            }
            for (j, &u) in neighbors.iter().enumerate() {
                // heap layout: leaves occupy the last leaf_count slots
                my_port.insert((v, u), ids[leaf_count - 1 + j / 2]);
            }
        }
    }

    for (a, b) in g.edges() {
        let pa = my_port[&(a, b)];
        let pb = my_port[&(b, a)];
        out.add_edge(pa, pb)?;
        port_of.insert((a, b), (pa, pb));
        port_of.insert((b, a), (pb, pa));
    }

    Ok(ReducedGraph {
        graph: out,
        root_of,
        original_of,
        parent_of,
        port_of,
    })
}
