//! Catalog graph with per-edge bridges and discrepancy-sensitive path search.
//!
//! Every directed edge `(v, w)` carries a bridge map sending each element of
//! `C(v)` to its closed predecessor in `C(w)`. A path query locates the
//! search key once at the first vertex and then hops bridge + forward finger
//! search per edge, so the per-edge cost tracks the local discrepancy
//! between neighboring catalogs at the query value rather than catalog size.
//! Updates keep every bridge map exact: the elements whose bridge changes
//! form one contiguous run per incoming edge, found by a predecessor search
//! and a bounded forward scan.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, ElementHandle, SearchMode};
use crate::key::{FiniteKey, Key, KeyError};
use crate::seed::mix_seed;

/// Empirical per-edge step budget: the mean over traversals of
/// `finger_steps / (1 + log2 delta)` stays below this coefficient, with the
/// 99th percentile below three times it. Asserted by the verification
/// suites.
pub const EDGE_COST_COEFF: f64 = 5.0;

pub const DEFAULT_MAX_DEGREE: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("degree bound {max_degree} exceeded at vertex {vertex}")]
    DegreeExceeded { vertex: VertexId, max_degree: usize },
    #[error("no edge between {0} and {1}")]
    NotAnEdge(VertexId, VertexId),
    #[error("edge {0}-{1} already exists")]
    DuplicateEdge(VertexId, VertexId),
    #[error("self loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("path is empty")]
    EmptyPath,
    #[error("consecutive path vertices {0} and {1} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Local discrepancy of a directed edge at a query value: 2 plus the number
/// of neighbor elements falling in the gap of the source catalog containing
/// the value. Always at least 2, so its log never degenerates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LocalDiscrepancy(u64);

impl LocalDiscrepancy {
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn log2(self) -> f64 {
        (self.0 as f64).log2()
    }
}

/// Cost record of one edge traversal during a path search.
#[derive(Clone, Copy, Debug)]
pub struct EdgeCost {
    pub from: VertexId,
    pub to: VertexId,
    pub finger_steps: u32,
    pub delta: LocalDiscrepancy,
}

/// Instrumentation accumulated by [`CatalogGraph::path_search`]: one entry
/// per edge traversed, plus the step count of the initial full search.
#[derive(Clone, Debug, Default)]
pub struct CostTrace {
    pub entry_steps: u32,
    pub edges: Vec<EdgeCost>,
}

impl CostTrace {
    pub fn total_finger_steps(&self) -> u64 {
        self.edges.iter().map(|e| e.finger_steps as u64).sum()
    }

    pub fn total_log2_delta(&self) -> f64 {
        self.edges.iter().map(|e| e.delta.log2()).sum()
    }
}

// Bridge targets are packed as (slot << 32) | generation of the target
// element. Live slots never equal u32::MAX, so the two sentinels below
// cannot collide with a real handle.
const RAW_EMPTY: u64 = u64::MAX; // no entry recorded for this source slot
const RAW_FLOOR: u64 = u64::MAX - 1; // entry exists; target is the catalog floor

struct BridgeMap {
    raw: Vec<u64>,
}

impl BridgeMap {
    fn new() -> Self {
        BridgeMap { raw: Vec::new() }
    }

    fn set(&mut self, slot: u32, target: Option<ElementHandle>) {
        let idx = slot as usize;
        if idx >= self.raw.len() {
            self.raw.resize(idx + 1, RAW_EMPTY);
        }
        self.raw[idx] = match target {
            Some(h) => h.pack_local(),
            None => RAW_FLOOR,
        };
    }

    fn clear(&mut self, slot: u32) {
        let idx = slot as usize;
        if idx < self.raw.len() {
            self.raw[idx] = RAW_EMPTY;
        }
    }

    /// Raw entry; `None` when no entry is recorded for the slot.
    fn get_raw(&self, slot: u32) -> Option<u64> {
        match self.raw.get(slot as usize) {
            None | Some(&RAW_EMPTY) => None,
            Some(&raw) => Some(raw),
        }
    }

    fn get(&self, slot: u32, target_catalog: u64) -> Option<ElementHandle> {
        match self.get_raw(slot) {
            None => panic!("bridge map has no entry for a live element"),
            Some(RAW_FLOOR) => None,
            Some(raw) => Some(ElementHandle::unpack_local(target_catalog, raw)),
        }
    }
}

struct CatalogCell {
    catalog: Catalog,
    members: Vec<VertexId>,
}

struct VertexInfo {
    cell: usize,
    neighbors: Vec<VertexId>,
}

pub struct CatalogGraph {
    max_degree: usize,
    seed: u64,
    cells: Vec<Option<CatalogCell>>,
    free_cells: Vec<usize>,
    vertices: BTreeMap<VertexId, VertexInfo>,
    bridges: HashMap<(VertexId, VertexId), BridgeMap>,
}

impl CatalogGraph {
    pub fn new(seed: u64) -> Self {
        Self::with_max_degree(DEFAULT_MAX_DEGREE, seed)
    }

    pub fn with_max_degree(max_degree: usize, seed: u64) -> Self {
        CatalogGraph {
            max_degree,
            seed,
            cells: Vec::new(),
            free_cells: Vec::new(),
            vertices: BTreeMap::new(),
            bridges: HashMap::new(),
        }
    }

    /// Builds a graph in one shot: all catalogs, then all edges with their
    /// bridge maps bulk-built by merging the sorted catalogs.
    pub fn build(
        max_degree: usize,
        seed: u64,
        vertices: impl IntoIterator<Item = (VertexId, Vec<f64>)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::with_max_degree(max_degree, seed);
        for (v, keys) in vertices {
            g.add_vertex(v, keys)?;
        }
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.vertices
            .get(&v)
            .map(|info| info.neighbors.as_slice())
            .ok_or(GraphError::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.neighbors(v).map(|n| n.len())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.vertices
            .get(&u)
            .is_some_and(|info| info.neighbors.contains(&v))
    }

    /// Undirected edges, each reported once with the smaller endpoint first.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (&v, info) in &self.vertices {
            for &u in &info.neighbors {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out
    }

    fn info(&self, v: VertexId) -> Result<&VertexInfo, GraphError> {
        self.vertices.get(&v).ok_or(GraphError::UnknownVertex(v))
    }

    fn cell(&self, idx: usize) -> &CatalogCell {
        self.cells[idx].as_ref().expect("live catalog cell")
    }

    fn cell_mut(&mut self, idx: usize) -> &mut CatalogCell {
        self.cells[idx].as_mut().expect("live catalog cell")
    }

    pub fn catalog(&self, v: VertexId) -> Result<&Catalog, GraphError> {
        Ok(&self.cell(self.info(v)?.cell).catalog)
    }

    fn cat(&self, v: VertexId) -> &Catalog {
        &self.cell(self.vertices[&v].cell).catalog
    }

    fn alloc_cell(&mut self, cell: CatalogCell) -> usize {
        if let Some(idx) = self.free_cells.pop() {
            self.cells[idx] = Some(cell);
            idx
        } else {
            self.cells.push(Some(cell));
            self.cells.len() - 1
        }
    }

    /// Adds a vertex owning a fresh catalog built from `keys` (any order;
    /// non-finite values are rejected).
    pub fn add_vertex(
        &mut self,
        v: VertexId,
        keys: impl IntoIterator<Item = f64>,
    ) -> Result<(), GraphError> {
        if self.vertices.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        let mut finite: Vec<FiniteKey> = keys
            .into_iter()
            .map(FiniteKey::new)
            .collect::<Result<_, _>>()?;
        finite.sort_unstable();
        self.add_vertex_sorted(v, finite)
    }

    /// Bulk vertex construction from keys already in order.
    pub(crate) fn add_vertex_sorted(
        &mut self,
        v: VertexId,
        keys: impl IntoIterator<Item = FiniteKey>,
    ) -> Result<(), GraphError> {
        if self.vertices.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        let catalog = Catalog::from_sorted(mix_seed(self.seed, v.0), keys);
        let cell = self.alloc_cell(CatalogCell {
            catalog,
            members: vec![v],
        });
        self.vertices.insert(
            v,
            VertexInfo {
                cell,
                neighbors: Vec::new(),
            },
        );
        Ok(())
    }

    /// Adds a vertex that shares the catalog of an existing vertex; used by
    /// degree reduction so every copy answers from one source of truth.
    pub(crate) fn add_vertex_sharing(
        &mut self,
        v: VertexId,
        with: VertexId,
    ) -> Result<(), GraphError> {
        if self.vertices.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        let cell = self.info(with)?.cell;
        self.cell_mut(cell).members.push(v);
        self.vertices.insert(
            v,
            VertexInfo {
                cell,
                neighbors: Vec::new(),
            },
        );
        Ok(())
    }

    /// Removes a vertex together with its incident edges. The underlying
    /// catalog is dropped once its last member vertex goes away.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        let neighbors = self.info(v)?.neighbors.clone();
        for u in neighbors {
            self.remove_edge(v, u)?;
        }
        let info = self.vertices.remove(&v).expect("vertex checked above");
        let cell = self.cell_mut(info.cell);
        cell.members.retain(|&m| m != v);
        if cell.members.is_empty() {
            self.cells[info.cell] = None;
            self.free_cells.push(info.cell);
        }
        Ok(())
    }

    /// Adds an undirected edge and bulk-builds both directed bridge maps by
    /// merging the two sorted catalogs in `O(|C(u)| + |C(v)|)`.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.info(v)?;
        let info_u = self.info(u)?;
        if info_u.neighbors.contains(&v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        for &side in &[u, v] {
            if self.info(side)?.neighbors.len() + 1 > self.max_degree {
                return Err(GraphError::DegreeExceeded {
                    vertex: side,
                    max_degree: self.max_degree,
                });
            }
        }
        let map_uv = self.merge_bridges(u, v);
        let map_vu = self.merge_bridges(v, u);
        self.bridges.insert((u, v), map_uv);
        self.bridges.insert((v, u), map_vu);
        self.vertices.get_mut(&u).unwrap().neighbors.push(v);
        self.vertices.get_mut(&v).unwrap().neighbors.push(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        self.bridges.remove(&(u, v));
        self.bridges.remove(&(v, u));
        self.vertices
            .get_mut(&u)
            .unwrap()
            .neighbors
            .retain(|&x| x != v);
        self.vertices
            .get_mut(&v)
            .unwrap()
            .neighbors
            .retain(|&x| x != u);
        Ok(())
    }

    fn merge_bridges(&self, from: VertexId, to: VertexId) -> BridgeMap {
        let src = self.cat(from);
        let dst = self.cat(to);
        let mut map = BridgeMap::new();
        let mut target: Option<ElementHandle> = None;
        let mut ahead = dst.iter().peekable();
        for (h, key) in src.iter() {
            while let Some((bh, bk)) = ahead.peek() {
                if *bk <= key {
                    target = Some(*bh);
                    ahead.next();
                } else {
                    break;
                }
            }
            map.set(h.slot(), target);
        }
        map
    }

    /// Bridge of `h` (an element of `C(from)`) over the directed edge
    /// `from -> to`: the closed predecessor of its key in `C(to)`, or `None`
    /// for the floor.
    pub fn bridge(
        &self,
        from: VertexId,
        to: VertexId,
        h: ElementHandle,
    ) -> Result<Option<ElementHandle>, GraphError> {
        if !self.has_edge(from, to) {
            return Err(GraphError::NotAnEdge(from, to));
        }
        self.cat(from).key_of(h)?;
        let map = self.bridges.get(&(from, to)).expect("maps exist per edge");
        Ok(map.get(h.slot(), self.cat(to).id()))
    }

    /// Closed predecessor of `x` in the catalog of `v`.
    pub fn pred(&self, v: VertexId, x: Key) -> Result<Option<ElementHandle>, GraphError> {
        Ok(self.catalog(v)?.pred(x))
    }

    /// Inserts a key at a vertex and restores bridge exactness on every
    /// incident directed edge: the new element gets its outgoing bridges via
    /// one predecessor search per neighbor, and per incoming edge the run of
    /// elements whose closed predecessor becomes the new element is
    /// re-targeted. Cost `O(max_degree * (log n + reverse local
    /// discrepancy))` expected.
    pub fn insert(&mut self, v: VertexId, k: Key) -> Result<ElementHandle, GraphError> {
        let cell_idx = self.info(v)?.cell;
        let new = self.cell_mut(cell_idx).catalog.insert(k)?;
        let key = self
            .cell(cell_idx)
            .catalog
            .key_of(new)
            .expect("fresh element");
        let members = self.cell(cell_idx).members.clone();
        for m in members {
            let neighbors = self.vertices[&m].neighbors.clone();
            for u in neighbors {
                let target = self.cat(u).pred(Key::Finite(key));
                self.bridges
                    .get_mut(&(m, u))
                    .expect("maps exist per edge")
                    .set(new.slot(), target);
                self.retarget_after_insert(u, m, new, key);
            }
        }
        Ok(new)
    }

    /// Elements of `C(u)` at or above the new key whose old bridge over
    /// `u -> m` sat at or below it now belong to the new element. They form
    /// a contiguous run starting at the first element with key >= the new
    /// key.
    fn retarget_after_insert(
        &mut self,
        u: VertexId,
        m: VertexId,
        new: ElementHandle,
        key: FiniteKey,
    ) {
        let mut run: Vec<u32> = Vec::new();
        {
            let src = self.cat(u);
            let dst = self.cat(m);
            let map = &self.bridges[&(u, m)];
            let mut cur = src.succ(Key::Finite(key));
            while let Some(a) = cur {
                let retarget = match map.get_raw(a.slot()) {
                    // Only the just-inserted element can lack an entry here
                    // (shared-catalog edges); its bridge is itself.
                    None => true,
                    Some(RAW_FLOOR) => true,
                    Some(raw) => {
                        let t = ElementHandle::unpack_local(dst.id(), raw);
                        dst.key_of(t).expect("bridge targets live elements") <= key
                    }
                };
                if !retarget {
                    break;
                }
                run.push(a.slot());
                cur = src.next_of(a).expect("live element");
            }
        }
        let map = self.bridges.get_mut(&(u, m)).expect("maps exist per edge");
        for slot in run {
            map.set(slot, Some(new));
        }
    }

    /// Removes the element behind `h` from the catalog of `v`; bridges that
    /// targeted it are re-pointed at its in-order predecessor. Cost
    /// `O(max_degree * (log n + reverse local discrepancy))` expected.
    pub fn remove(&mut self, v: VertexId, h: ElementHandle) -> Result<Key, GraphError> {
        let cell_idx = self.info(v)?.cell;
        let (key, prev) = self.cell_mut(cell_idx).catalog.remove_with_prev(h)?;
        let members = self.cell(cell_idx).members.clone();
        for m in members {
            let neighbors = self.vertices[&m].neighbors.clone();
            for u in neighbors {
                self.bridges
                    .get_mut(&(m, u))
                    .expect("maps exist per edge")
                    .clear(h.slot());
                let mut run: Vec<u32> = Vec::new();
                {
                    let src = self.cat(u);
                    let map = &self.bridges[&(u, m)];
                    let mut cur = src.succ(Key::Finite(key));
                    while let Some(a) = cur {
                        if map.get_raw(a.slot()) == Some(h.pack_local()) {
                            run.push(a.slot());
                            cur = src.next_of(a).expect("live element");
                        } else {
                            break;
                        }
                    }
                }
                let map = self.bridges.get_mut(&(u, m)).expect("maps exist per edge");
                for slot in run {
                    map.set(slot, prev);
                }
            }
        }
        Ok(Key::Finite(key))
    }

    /// Local discrepancy of edge `(v, w)` at `x`: two predecessor lookups in
    /// `C(v)` delimit the gap containing `x`, then the matching elements of
    /// `C(w)` are counted by a bounded scan.
    pub fn local_discrepancy(
        &self,
        v: VertexId,
        w: VertexId,
        x: Key,
    ) -> Result<LocalDiscrepancy, GraphError> {
        if !self.has_edge(v, w) {
            return Err(GraphError::NotAnEdge(v, w));
        }
        let a_minus = self.cat(v).pred(x);
        Ok(self.edge_delta(v, w, a_minus))
    }

    fn edge_delta(
        &self,
        v: VertexId,
        w: VertexId,
        a_minus: Option<ElementHandle>,
    ) -> LocalDiscrepancy {
        let src = self.cat(v);
        let (lo, a_plus) = match a_minus {
            Some(a) => (
                Key::Finite(src.key_of(a).expect("live element")),
                src.next_of(a).expect("live element"),
            ),
            None => (Key::MinusInf, src.first()),
        };
        let hi = match a_plus {
            Some(b) => Key::Finite(src.key_of(b).expect("live element")),
            None => Key::PlusInf,
        };
        LocalDiscrepancy(2 + self.cat(w).count_range(lo, hi) as u64)
    }

    fn check_path(&self, path: &[VertexId]) -> Result<(), GraphError> {
        if path.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        for &v in path {
            self.info(v)?;
        }
        for win in path.windows(2) {
            if !self.has_edge(win[0], win[1]) {
                return Err(GraphError::NotAdjacent(win[0], win[1]));
            }
        }
        Ok(())
    }

    /// Locates the closed predecessor of `x` in every catalog along `path`:
    /// one full search at the first vertex, then per edge a hop through the
    /// bridge of the previous answer followed by a forward finger search.
    /// The returned trace records per-edge finger steps and the local
    /// discrepancy at `x` (the discrepancy count is instrumentation and
    /// costs an extra bounded scan; use [`Self::path_locate`] to skip it).
    #[allow(clippy::type_complexity)]
    pub fn path_search(
        &self,
        path: &[VertexId],
        x: Key,
    ) -> Result<(Vec<(VertexId, Option<ElementHandle>)>, CostTrace), GraphError> {
        self.path_query(path, x, true)
    }

    /// [`Self::path_search`] without cost instrumentation.
    pub fn path_locate(
        &self,
        path: &[VertexId],
        x: Key,
    ) -> Result<Vec<(VertexId, Option<ElementHandle>)>, GraphError> {
        Ok(self.path_query(path, x, false)?.0)
    }

    #[allow(clippy::type_complexity)]
    fn path_query(
        &self,
        path: &[VertexId],
        x: Key,
        instrument: bool,
    ) -> Result<(Vec<(VertexId, Option<ElementHandle>)>, CostTrace), GraphError> {
        self.check_path(path)?;
        let (mut pos, entry_steps) = self.cat(path[0]).finger_search(None, x)?;
        let mut answers = Vec::with_capacity(path.len());
        answers.push((path[0], pos));
        let mut trace = CostTrace {
            entry_steps,
            edges: Vec::with_capacity(path.len().saturating_sub(1)),
        };
        for win in path.windows(2) {
            let (v, w) = (win[0], win[1]);
            let start = match pos {
                Some(a) => self
                    .bridges
                    .get(&(v, w))
                    .expect("maps exist per edge")
                    .get(a.slot(), self.cat(w).id()),
                None => None,
            };
            let (next_pos, steps) = self.cat(w).finger_search(start, x)?;
            if instrument {
                trace.edges.push(EdgeCost {
                    from: v,
                    to: w,
                    finger_steps: steps,
                    delta: self.edge_delta(v, w, pos),
                });
            }
            pos = next_pos;
            answers.push((w, pos));
        }
        Ok((answers, trace))
    }

    /// Strict-mode finger search in the catalog of `v`; exposed for layered
    /// structures that cascade boundary positions instead of closed
    /// predecessors.
    pub(crate) fn finger_mode(
        &self,
        v: VertexId,
        from: Option<ElementHandle>,
        x: Key,
        mode: SearchMode,
    ) -> (Option<ElementHandle>, u32) {
        self.cat(v)
            .finger_search_mode(from, x, mode)
            .expect("finger start comes from a maintained bridge")
    }
}

#[derive(Debug, Error)]
pub enum GraphFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Loads a graph description: `v <id> <k1> <k2> ...` per vertex,
/// `e <id> <id>` per edge, `#` comments and blank lines ignored. The degree
/// bound is validated while edges are added.
pub fn load_graph<R: BufRead>(
    reader: R,
    max_degree: usize,
    seed: u64,
) -> Result<CatalogGraph, GraphFileError> {
    let mut vertices: Vec<(VertexId, Vec<f64>)> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let tag = parts.next().expect("nonempty line");
        let parse_id = |tok: Option<&str>| -> Result<VertexId, GraphFileError> {
            let tok = tok.ok_or_else(|| GraphFileError::Parse {
                line: line_no,
                msg: "missing vertex id".into(),
            })?;
            tok.parse::<u64>()
                .map(VertexId)
                .map_err(|e| GraphFileError::Parse {
                    line: line_no,
                    msg: format!("bad vertex id {tok:?}: {e}"),
                })
        };
        match tag {
            "v" => {
                let id = parse_id(parts.next())?;
                let keys = parts
                    .map(|tok| {
                        tok.parse::<f64>().map_err(|e| GraphFileError::Parse {
                            line: line_no,
                            msg: format!("bad key {tok:?}: {e}"),
                        })
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                vertices.push((id, keys));
            }
            "e" => {
                let a = parse_id(parts.next())?;
                let b = parse_id(parts.next())?;
                if parts.next().is_some() {
                    return Err(GraphFileError::Parse {
                        line: line_no,
                        msg: "trailing tokens after edge".into(),
                    });
                }
                edges.push((a, b));
            }
            other => {
                return Err(GraphFileError::Parse {
                    line: line_no,
                    msg: format!("unknown record tag {other:?}"),
                });
            }
        }
    }
    Ok(CatalogGraph::build(max_degree, seed, vertices, edges)?)
}

pub fn load_graph_path(
    path: impl AsRef<Path>,
    max_degree: usize,
    seed: u64,
) -> Result<CatalogGraph, GraphFileError> {
    let file = std::fs::File::open(path)?;
    load_graph(io::BufReader::new(file), max_degree, seed)
}

/// Writes a graph in the same line format the loader accepts.
pub fn write_graph<W: Write>(g: &CatalogGraph, mut w: W) -> io::Result<()> {
    for v in g.vertex_ids() {
        write!(w, "v {}", v)?;
        for (_, key) in g.catalog(v).expect("listed vertex").iter() {
            write!(w, " {}", key.value())?;
        }
        writeln!(w)?;
    }
    for (a, b) in g.edges() {
        writeln!(w, "e {} {}", a, b)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit;

    // whole-graph transfer between threads and concurrent read-only use
    fn _assert_send_sync<T: Send + Sync>() {}
    const _: () = {
        let _ = _assert_send_sync::<CatalogGraph>;
    };

    fn k(v: f64) -> Key {
        Key::finite(v).unwrap()
    }

    fn vid(v: u64) -> VertexId {
        VertexId(v)
    }

    fn bridge_key(g: &CatalogGraph, from: VertexId, to: VertexId, src_key: f64) -> Option<f64> {
        let h = g.catalog(from).unwrap().pred(k(src_key)).unwrap();
        assert_eq!(g.catalog(from).unwrap().key_of(h).unwrap().value(), src_key);
        g.bridge(from, to, h)
            .unwrap()
            .map(|t| g.catalog(to).unwrap().key_of(t).unwrap().value())
    }

    fn two_vertex_graph() -> (CatalogGraph, VertexId, VertexId) {
        let v = vid(1);
        let w = vid(2);
        let g = CatalogGraph::build(
            3,
            7,
            vec![(v, vec![10.0, 20.0, 30.0]), (w, vec![12.0, 14.0, 25.0])],
            vec![(v, w)],
        )
        .unwrap();
        (g, v, w)
    }

    #[test]
    fn build_bridges_match_brute_force() {
        let (g, v, w) = two_vertex_graph();
        assert_eq!(bridge_key(&g, v, w, 10.0), None);
        assert_eq!(bridge_key(&g, v, w, 20.0), Some(14.0));
        assert_eq!(bridge_key(&g, v, w, 30.0), Some(25.0));
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn single_vertex_graph_is_trivial() {
        let g = CatalogGraph::build(3, 1, vec![(vid(9), vec![1.0, 2.0])], vec![]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges().is_empty());
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn path_of_empty_catalogs() {
        let vertices: Vec<_> = (0..5).map(|i| (vid(i), vec![])).collect();
        let edges: Vec<_> = (0..4).map(|i| (vid(i), vid(i + 1))).collect();
        let g = CatalogGraph::build(3, 2, vertices, edges).unwrap();
        audit::check_graph(&g).unwrap();
        let path: Vec<_> = (0..5).map(vid).collect();
        let (answers, trace) = g.path_search(&path, k(1.0)).unwrap();
        assert!(answers.iter().all(|(_, pos)| pos.is_none()));
        assert!(trace.edges.iter().all(|e| e.delta.get() == 2));
    }

    #[test]
    fn degree_bound_enforced_and_named() {
        let mut g = CatalogGraph::with_max_degree(2, 3);
        for i in 0..4 {
            g.add_vertex(vid(i), vec![]).unwrap();
        }
        g.add_edge(vid(0), vid(1)).unwrap();
        g.add_edge(vid(0), vid(2)).unwrap();
        let err = g.add_edge(vid(0), vid(3)).unwrap_err();
        assert_eq!(
            err,
            GraphError::DegreeExceeded {
                vertex: vid(0),
                max_degree: 2
            }
        );
    }

    #[test]
    fn local_discrepancy_examples() {
        let a = vid(1);
        let b = vid(2);
        let g = CatalogGraph::build(
            3,
            4,
            vec![
                (a, vec![10.0, 20.0, 30.0]),
                (b, vec![12.0, 14.0, 16.0, 25.0]),
            ],
            vec![(a, b)],
        )
        .unwrap();
        assert_eq!(g.local_discrepancy(a, b, k(21.0)).unwrap().get(), 3);

        let g2 = CatalogGraph::build(
            3,
            4,
            vec![(a, vec![10.0, 20.0, 30.0]), (b, vec![])],
            vec![(a, b)],
        )
        .unwrap();
        assert_eq!(g2.local_discrepancy(a, b, k(21.0)).unwrap().get(), 2);

        let g3 = CatalogGraph::build(
            3,
            4,
            vec![(a, vec![]), (b, vec![1.0, 2.0, 3.0])],
            vec![(a, b)],
        )
        .unwrap();
        assert_eq!(g3.local_discrepancy(a, b, k(0.5)).unwrap().get(), 5);

        let g4 = CatalogGraph::build(3, 4, vec![(a, vec![]), (b, vec![])], vec![]).unwrap();
        assert_eq!(
            g4.local_discrepancy(a, b, k(1.0)).unwrap_err(),
            GraphError::NotAnEdge(a, b)
        );
    }

    #[test]
    fn path_search_two_vertices() {
        let (g, v, w) = two_vertex_graph();
        let (answers, trace) = g.path_search(&[v, w], k(21.0)).unwrap();
        let keys: Vec<Option<f64>> = answers
            .iter()
            .map(|(vx, pos)| pos.map(|h| g.catalog(*vx).unwrap().key_of(h).unwrap().value()))
            .collect();
        assert_eq!(keys, vec![Some(20.0), Some(14.0)]);
        assert_eq!(trace.edges.len(), 1);
        assert_eq!(
            trace.edges[0].delta,
            g.local_discrepancy(v, w, k(21.0)).unwrap()
        );
    }

    #[test]
    fn path_search_single_vertex_below_min() {
        let g = CatalogGraph::build(3, 5, vec![(vid(0), vec![10.0])], vec![]).unwrap();
        let (answers, trace) = g.path_search(&[vid(0)], k(5.0)).unwrap();
        assert_eq!(answers, vec![(vid(0), None)]);
        assert!(trace.edges.is_empty());
    }

    #[test]
    fn path_search_identical_catalogs() {
        let keys = vec![2.0, 4.0, 6.0, 8.0, 10.0];
        let vertices: Vec<_> = (0..10).map(|i| (vid(i), keys.clone())).collect();
        let edges: Vec<_> = (0..9).map(|i| (vid(i), vid(i + 1))).collect();
        let g = CatalogGraph::build(3, 6, vertices, edges).unwrap();
        let path: Vec<_> = (0..10).map(vid).collect();
        let (answers, trace) = g.path_search(&path, k(5.0)).unwrap();
        for (vx, pos) in &answers {
            let key = g
                .catalog(*vx)
                .unwrap()
                .key_of(pos.unwrap())
                .unwrap()
                .value();
            assert_eq!(key, 4.0);
        }
        let per_edge_budget = EDGE_COST_COEFF * (1.0 + 3.0f64.log2());
        for e in &trace.edges {
            assert_eq!(e.delta.get(), 3, "identical catalogs: own image in gap");
            assert_eq!(e.delta, g.local_discrepancy(e.from, e.to, k(5.0)).unwrap());
            assert!((e.finger_steps as f64) <= per_edge_budget);
        }
    }

    #[test]
    fn path_search_errors() {
        let (g, v, w) = two_vertex_graph();
        assert_eq!(
            g.path_search(&[], k(1.0)).unwrap_err(),
            GraphError::EmptyPath
        );
        let mut g2 = CatalogGraph::new(0);
        g2.add_vertex(vid(1), vec![]).unwrap();
        g2.add_vertex(vid(2), vec![]).unwrap();
        assert_eq!(
            g2.path_search(&[vid(1), vid(2)], k(1.0)).unwrap_err(),
            GraphError::NotAdjacent(vid(1), vid(2))
        );
        let _ = (v, w);
    }

    #[test]
    fn insert_retargets_incoming_bridges() {
        let u = vid(1);
        let v = vid(2);
        let mut g = CatalogGraph::build(
            3,
            8,
            vec![(u, vec![10.0, 20.0, 30.0]), (v, vec![12.0, 25.0])],
            vec![(u, v)],
        )
        .unwrap();
        assert_eq!(bridge_key(&g, u, v, 20.0), Some(12.0));
        g.insert(v, k(18.0)).unwrap();
        assert_eq!(bridge_key(&g, u, v, 10.0), None);
        assert_eq!(bridge_key(&g, u, v, 20.0), Some(18.0));
        assert_eq!(bridge_key(&g, u, v, 30.0), Some(25.0));
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn insert_into_isolated_vertex() {
        let mut g = CatalogGraph::build(3, 9, vec![(vid(5), vec![1.0])], vec![]).unwrap();
        g.insert(vid(5), k(2.0)).unwrap();
        assert_eq!(g.catalog(vid(5)).unwrap().len(), 2);
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn insert_above_all_neighbor_elements() {
        let u = vid(1);
        let v = vid(2);
        let mut g = CatalogGraph::build(
            3,
            10,
            vec![(u, vec![10.0, 20.0]), (v, vec![5.0, 15.0])],
            vec![(u, v)],
        )
        .unwrap();
        g.insert(v, k(100.0)).unwrap();
        // no incoming retargets: every element of u keeps its old bridge
        assert_eq!(bridge_key(&g, u, v, 10.0), Some(5.0));
        assert_eq!(bridge_key(&g, u, v, 20.0), Some(15.0));
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn remove_retargets_to_predecessor() {
        let v = vid(1);
        let w = vid(2);
        let mut g = CatalogGraph::build(
            3,
            11,
            vec![(v, vec![10.0, 20.0, 30.0]), (w, vec![12.0, 14.0, 25.0])],
            vec![(v, w)],
        )
        .unwrap();
        assert_eq!(bridge_key(&g, v, w, 20.0), Some(14.0));
        let h14 = g.catalog(w).unwrap().pred(k(14.0)).unwrap();
        assert_eq!(g.remove(w, h14).unwrap(), k(14.0));
        assert_eq!(bridge_key(&g, v, w, 20.0), Some(12.0));
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn remove_untargeted_element_changes_nothing_else() {
        let v = vid(1);
        let w = vid(2);
        let mut g = CatalogGraph::build(
            3,
            12,
            vec![(v, vec![10.0, 30.0]), (w, vec![5.0, 20.0, 25.0])],
            vec![(v, w)],
        )
        .unwrap();
        // 25 is bridged by no element of v (10 -> 5, 30 -> 25)... pick 20:
        // bridges are 10 -> 5 and 30 -> 25, so 20 is untargeted.
        let h20 = g.catalog(w).unwrap().pred(k(20.0)).unwrap();
        g.remove(w, h20).unwrap();
        assert_eq!(bridge_key(&g, v, w, 10.0), Some(5.0));
        assert_eq!(bridge_key(&g, v, w, 30.0), Some(25.0));
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn remove_last_element_floors_incoming_bridges() {
        let v = vid(1);
        let w = vid(2);
        let mut g = CatalogGraph::build(
            3,
            13,
            vec![(v, vec![10.0, 20.0]), (w, vec![5.0])],
            vec![(v, w)],
        )
        .unwrap();
        let h5 = g.catalog(w).unwrap().pred(k(5.0)).unwrap();
        g.remove(w, h5).unwrap();
        assert_eq!(bridge_key(&g, v, w, 10.0), None);
        assert_eq!(bridge_key(&g, v, w, 20.0), None);
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn duplicate_keys_bridge_to_last_equal() {
        let v = vid(1);
        let w = vid(2);
        let mut g = CatalogGraph::build(
            3,
            14,
            vec![(v, vec![7.0, 9.0]), (w, vec![7.0])],
            vec![(v, w)],
        )
        .unwrap();
        // inserting an equal key lands after the old one and takes over the
        // incoming bridges of every element at or above it
        let new = g.insert(w, k(7.0)).unwrap();
        let h7 = g.catalog(v).unwrap().pred(k(7.0)).unwrap();
        assert_eq!(g.bridge(v, w, h7).unwrap(), Some(new));
        audit::check_graph(&g).unwrap();
    }

    #[test]
    fn graph_file_round_trip() {
        let text = "# sample\nv 1 10 20 30\nv 2 12 14 25\n\ne 1 2\n";
        let g = load_graph(text.as_bytes(), 3, 7).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges(), vec![(vid(1), vid(2))]);
        let mut out = Vec::new();
        write_graph(&g, &mut out).unwrap();
        let g2 = load_graph(out.as_slice(), 3, 7).unwrap();
        assert_eq!(g2.vertex_count(), 2);
        assert_eq!(g2.edges(), vec![(vid(1), vid(2))]);
        audit::check_graph(&g2).unwrap();
    }

    #[test]
    fn graph_file_errors() {
        assert!(matches!(
            load_graph("x 1 2\n".as_bytes(), 3, 0),
            Err(GraphFileError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_graph("v 1 abc\n".as_bytes(), 3, 0),
            Err(GraphFileError::Parse { line: 1, .. })
        ));
        // degree violation detected by the loader
        let text = "v 1\nv 2\nv 3\nv 4\nv 5\ne 1 2\ne 1 3\ne 1 4\ne 1 5\n";
        match load_graph(text.as_bytes(), 3, 0) {
            Err(GraphFileError::Graph(GraphError::DegreeExceeded { vertex, .. })) => {
                assert_eq!(vertex, vid(1));
            }
            Ok(_) => panic!("expected degree violation, got a graph"),
            Err(other) => panic!("expected degree violation, got {other:?}"),
        }
        // duplicate edges, self loops and unknown endpoints are rejected
        assert!(matches!(
            load_graph("v 1\nv 2\ne 1 2\ne 2 1\n".as_bytes(), 3, 0),
            Err(GraphFileError::Graph(GraphError::DuplicateEdge(..)))
        ));
        assert!(matches!(
            load_graph("v 1\ne 1 1\n".as_bytes(), 3, 0),
            Err(GraphFileError::Graph(GraphError::SelfLoop(..)))
        ));
        assert!(matches!(
            load_graph("v 1\ne 1 9\n".as_bytes(), 3, 0),
            Err(GraphFileError::Graph(GraphError::UnknownVertex(..)))
        ));
    }
}
