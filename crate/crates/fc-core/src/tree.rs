//! Dynamic planar point set answering dominated-maxima and exact
//! nearest-neighbor queries.
//!
//! Points live at the leaves of a weight-balanced binary tree ordered by
//! `(x, id)`; every tree node owns a catalog holding the y-values of its
//! subtree, and parent-child links are catalog-graph edges with maintained
//! bridges. A quadrant query descends the x-boundary path once, cascading
//! the y-position through bridges, and extracts staircase points from the
//! `O(log n)` canonical subtrees hanging off the path, pruned by a running
//! y-threshold so the work tracks the answer size. Updates touch the
//! `O(log n)` catalogs on one root-to-leaf path (`O(log^2 n)` expected) and
//! rebuild any subtree whose child weights drift past the balance factor.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::audit::{self, AuditError};
use crate::catalog::{ElementHandle, SearchMode};
use crate::graph::{CatalogGraph, VertexId};
use crate::key::{FiniteKey, Key};
use crate::points::{GeometryError, Metric, Point, PointId, Quadrant, Staircase};
use crate::seed::mix_seed;

/// Rebuild a subtree as soon as one child holds more than this fraction of
/// its weight.
const BALANCE_ALPHA: f64 = 0.7;

type XKey = (f64, PointId);

fn xkey(p: &Point) -> XKey {
    (p.x(), p.id())
}

fn cmp_xkey(a: XKey, b: XKey) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

struct PointRec {
    point: Point,
    leaf: VertexId,
}

enum NodeKind {
    Leaf {
        point: Point,
    },
    Internal {
        left: VertexId,
        right: VertexId,
        weight: usize,
        lo: XKey,
        hi: XKey,
    },
}

struct NodeMeta {
    parent: Option<VertexId>,
    kind: NodeKind,
}

/// Search orientation of one quadrant query after reflection to the
/// south-west convention.
struct ViewEnv {
    qx: f64,
    qy: Key,
    flip_x: bool,
    flip_y: bool,
}

impl ViewEnv {
    fn mode(&self) -> SearchMode {
        // Reflected y-searches maintain the strict predecessor of the
        // boundary so the candidate is its successor (the smallest y >= qy).
        if self.flip_y {
            SearchMode::Strict
        } else {
            SearchMode::Closed
        }
    }

    fn vy(&self, y: f64) -> f64 {
        if self.flip_y {
            -y
        } else {
            y
        }
    }

    fn x_inside(&self, x: f64) -> bool {
        if self.flip_x {
            x >= self.qx
        } else {
            x <= self.qx
        }
    }
}

pub struct PointSet {
    graph: CatalogGraph,
    meta: HashMap<VertexId, NodeMeta>,
    root: Option<VertexId>,
    points: HashMap<PointId, PointRec>,
    next_vertex: u64,
}

impl PointSet {
    pub fn new(seed: u64) -> Self {
        PointSet {
            graph: CatalogGraph::with_max_degree(3, mix_seed(seed, 1)),
            meta: HashMap::new(),
            root: None,
            points: HashMap::new(),
            next_vertex: 0,
        }
    }

    /// Bulk construction: sorts by `(x, id)` and builds a perfectly
    /// balanced tree with catalogs and bridges assembled bottom-up.
    pub fn from_points(
        seed: u64,
        points: impl IntoIterator<Item = Point>,
    ) -> Result<Self, GeometryError> {
        let mut set = PointSet::new(seed);
        let mut pts: Vec<Point> = points.into_iter().collect();
        pts.sort_by(|a, b| cmp_xkey(xkey(a), xkey(b)));
        let mut seen = HashSet::with_capacity(pts.len());
        for p in &pts {
            if !seen.insert(p.id()) {
                return Err(GeometryError::DuplicatePointId(p.id()));
            }
        }
        for p in &pts {
            let leaf = set.new_leaf(*p);
            set.points.insert(p.id(), PointRec { point: *p, leaf });
        }
        if !pts.is_empty() {
            let (root, _) = set.build_subtree(&pts);
            set.root = Some(root);
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.points.contains_key(&id)
    }

    pub fn get(&self, id: PointId) -> Option<Point> {
        self.points.get(&id).map(|r| r.point)
    }

    /// All points, in no particular order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.values().map(|r| r.point)
    }

    fn alloc_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        id
    }

    fn kind(&self, v: VertexId) -> &NodeKind {
        &self.meta[&v].kind
    }

    fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.meta[&v].parent
    }

    fn children(&self, v: VertexId) -> (VertexId, VertexId) {
        match self.kind(v) {
            NodeKind::Internal { left, right, .. } => (*left, *right),
            NodeKind::Leaf { .. } => unreachable!("leaf has no children"),
        }
    }

    fn weight(&self, v: VertexId) -> usize {
        match self.kind(v) {
            NodeKind::Leaf { .. } => 1,
            NodeKind::Internal { weight, .. } => *weight,
        }
    }

    fn lo(&self, v: VertexId) -> XKey {
        match self.kind(v) {
            NodeKind::Leaf { point } => xkey(point),
            NodeKind::Internal { lo, .. } => *lo,
        }
    }

    fn hi(&self, v: VertexId) -> XKey {
        match self.kind(v) {
            NodeKind::Leaf { point } => xkey(point),
            NodeKind::Internal { hi, .. } => *hi,
        }
    }

    fn new_leaf(&mut self, p: Point) -> VertexId {
        let v = self.alloc_vertex();
        self.graph.add_vertex(v, [p.y()]).expect("fresh vertex");
        self.meta.insert(
            v,
            NodeMeta {
                parent: None,
                kind: NodeKind::Leaf { point: p },
            },
        );
        v
    }

    fn replace_child(&mut self, parent: VertexId, from: VertexId, to: VertexId) {
        match &mut self.meta.get_mut(&parent).unwrap().kind {
            NodeKind::Internal { left, right, .. } => {
                if *left == from {
                    *left = to;
                } else {
                    debug_assert_eq!(*right, from);
                    *right = to;
                }
            }
            NodeKind::Leaf { .. } => unreachable!("parent is internal"),
        }
    }

    /// Inserts a point; its y-value joins every catalog on the root-to-leaf
    /// path. Expected `O(log^2 n)`, plus amortized rebuild work.
    pub fn insert(&mut self, p: Point) -> Result<(), GeometryError> {
        if self.points.contains_key(&p.id()) {
            return Err(GeometryError::DuplicatePointId(p.id()));
        }
        let Some(root) = self.root else {
            let leaf = self.new_leaf(p);
            self.root = Some(leaf);
            self.points.insert(p.id(), PointRec { point: p, leaf });
            return Ok(());
        };
        let mut cur = root;
        loop {
            match self.kind(cur) {
                NodeKind::Leaf { .. } => break,
                NodeKind::Internal { left, right, .. } => {
                    let (l, r) = (*left, *right);
                    cur = if cmp_xkey(xkey(&p), self.hi(l)) == Ordering::Less {
                        l
                    } else {
                        r
                    };
                }
            }
        }
        let (join, leaf) = self.split_leaf(cur, p);
        self.points.insert(p.id(), PointRec { point: p, leaf });
        let y = Key::Finite(FiniteKey::new(p.y()).expect("validated on construction"));
        let mut anc = self.parent(join);
        while let Some(v) = anc {
            self.graph.insert(v, y).expect("tree vertex");
            anc = self.parent(v);
        }
        self.refresh_up(self.parent(join));
        self.rebalance_chain(join);
        Ok(())
    }

    /// Replaces `leaf` by a two-leaf join node holding both points.
    fn split_leaf(&mut self, leaf: VertexId, p: Point) -> (VertexId, VertexId) {
        let old = match self.kind(leaf) {
            NodeKind::Leaf { point } => *point,
            NodeKind::Internal { .. } => unreachable!("split target is a leaf"),
        };
        let parent = self.parent(leaf);
        let new_leaf = self.new_leaf(p);
        let join = self.alloc_vertex();
        let (a, b) = if cmp_xkey(xkey(&p), xkey(&old)) == Ordering::Less {
            (new_leaf, leaf)
        } else {
            (leaf, new_leaf)
        };
        let mut ys = [old.y(), p.y()];
        ys.sort_by(f64::total_cmp);
        self.graph.add_vertex(join, ys).expect("fresh vertex");
        if let Some(par) = parent {
            self.graph.remove_edge(par, leaf).expect("tree edge");
        }
        self.graph.add_edge(join, a).expect("tree edge");
        self.graph.add_edge(join, b).expect("tree edge");
        if let Some(par) = parent {
            self.graph.add_edge(par, join).expect("tree edge");
            self.replace_child(par, leaf, join);
        } else {
            self.root = Some(join);
        }
        let (lo, hi) = (
            if a == new_leaf { xkey(&p) } else { xkey(&old) },
            if b == new_leaf { xkey(&p) } else { xkey(&old) },
        );
        self.meta.insert(
            join,
            NodeMeta {
                parent,
                kind: NodeKind::Internal {
                    left: a,
                    right: b,
                    weight: 2,
                    lo,
                    hi,
                },
            },
        );
        self.meta.get_mut(&a).unwrap().parent = Some(join);
        self.meta.get_mut(&b).unwrap().parent = Some(join);
        (join, new_leaf)
    }

    /// Removes a point by id; its y-value leaves every catalog on the path.
    pub fn remove(&mut self, id: PointId) -> Result<Point, GeometryError> {
        let rec = match self.points.remove(&id) {
            Some(rec) => rec,
            None => return Err(GeometryError::UnknownPointId(id)),
        };
        let leaf = rec.leaf;
        let p = rec.point;
        let Some(par) = self.parent(leaf) else {
            self.graph.remove_vertex(leaf).expect("tree vertex");
            self.meta.remove(&leaf);
            self.root = None;
            return Ok(p);
        };
        let (l, r) = self.children(par);
        let sibling = if l == leaf { r } else { l };
        let grand = self.parent(par);
        self.graph.remove_vertex(leaf).expect("tree vertex");
        self.meta.remove(&leaf);
        self.graph.remove_vertex(par).expect("tree vertex");
        self.meta.remove(&par);
        match grand {
            Some(g) => {
                self.graph.add_edge(g, sibling).expect("tree edge");
                self.replace_child(g, par, sibling);
                self.meta.get_mut(&sibling).unwrap().parent = Some(g);
            }
            None => {
                self.root = Some(sibling);
                self.meta.get_mut(&sibling).unwrap().parent = None;
            }
        }
        let y = Key::Finite(FiniteKey::new(p.y()).expect("validated on construction"));
        let mut anc = grand;
        while let Some(v) = anc {
            let h = self
                .graph
                .catalog(v)
                .expect("tree vertex")
                .pred(y)
                .expect("subtree holds this y");
            debug_assert_eq!(
                self.graph.catalog(v).unwrap().key_of(h).unwrap().value(),
                p.y()
            );
            self.graph.remove(v, h).expect("live handle");
            anc = self.parent(v);
        }
        if let Some(g) = grand {
            self.refresh_up(Some(g));
            self.rebalance_chain(g);
        }
        Ok(p)
    }

    fn refresh_up(&mut self, mut at: Option<VertexId>) {
        while let Some(v) = at {
            let (l, r) = self.children(v);
            let weight = self.weight(l) + self.weight(r);
            let lo = self.lo(l);
            let hi = self.hi(r);
            if let NodeKind::Internal {
                weight: w,
                lo: plo,
                hi: phi,
                ..
            } = &mut self.meta.get_mut(&v).unwrap().kind
            {
                *w = weight;
                *plo = lo;
                *phi = hi;
            }
            at = self.parent(v);
        }
    }

    /// Rebuilds the highest node along the given leaf-to-root chain whose
    /// child weights violate the balance factor. Updates change weights
    /// only on this chain, so any lower violator sits inside the rebuilt
    /// subtree and is fixed by the same rebuild.
    fn rebalance_chain(&mut self, bottom: VertexId) {
        let mut chain = vec![bottom];
        while let Some(p) = self.parent(*chain.last().unwrap()) {
            chain.push(p);
        }
        for &v in chain.iter().rev() {
            if let NodeKind::Internal {
                left,
                right,
                weight,
                ..
            } = self.kind(v)
            {
                let heavier = self.weight(*left).max(self.weight(*right));
                if heavier as f64 > BALANCE_ALPHA * *weight as f64 {
                    self.rebuild(v);
                    return;
                }
            }
        }
    }

    fn rebuild(&mut self, v: VertexId) {
        let parent = self.parent(v);
        let mut pts = Vec::with_capacity(self.weight(v));
        self.collect_points(v, &mut pts);
        self.demolish_internals(v);
        let (fresh, _) = self.build_subtree(&pts);
        self.meta.get_mut(&fresh).unwrap().parent = parent;
        match parent {
            Some(par) => {
                self.graph.add_edge(par, fresh).expect("tree edge");
                self.replace_child(par, v, fresh);
            }
            None => self.root = Some(fresh),
        }
    }

    fn collect_points(&self, v: VertexId, out: &mut Vec<Point>) {
        match self.kind(v) {
            NodeKind::Leaf { point } => out.push(*point),
            NodeKind::Internal { left, right, .. } => {
                let (l, r) = (*left, *right);
                self.collect_points(l, out);
                self.collect_points(r, out);
            }
        }
    }

    /// Drops every internal vertex of the subtree; leaves survive with
    /// their catalogs intact.
    fn demolish_internals(&mut self, v: VertexId) {
        if let NodeKind::Internal { left, right, .. } = self.kind(v) {
            let (l, r) = (*left, *right);
            self.demolish_internals(l);
            self.demolish_internals(r);
            self.graph.remove_vertex(v).expect("tree vertex");
            self.meta.remove(&v);
        }
    }

    /// Builds a perfectly balanced subtree over `pts` (sorted by x-key),
    /// merging child y-lists upward so every catalog and bridge map is
    /// constructed in sorted bulk. Returns the subtree root and its sorted
    /// y-values.
    fn build_subtree(&mut self, pts: &[Point]) -> (VertexId, Vec<f64>) {
        if pts.len() == 1 {
            let leaf = self.points[&pts[0].id()].leaf;
            return (leaf, vec![pts[0].y()]);
        }
        let mid = pts.len() / 2;
        let (l, ys_l) = self.build_subtree(&pts[..mid]);
        let (r, ys_r) = self.build_subtree(&pts[mid..]);
        let ys = merge_sorted(&ys_l, &ys_r);
        let join = self.alloc_vertex();
        self.graph
            .add_vertex_sorted(
                join,
                ys.iter().map(|&y| FiniteKey::new(y).expect("validated")),
            )
            .expect("fresh vertex");
        self.graph.add_edge(join, l).expect("tree edge");
        self.graph.add_edge(join, r).expect("tree edge");
        self.meta.insert(
            join,
            NodeMeta {
                parent: None,
                kind: NodeKind::Internal {
                    left: l,
                    right: r,
                    weight: pts.len(),
                    lo: xkey(&pts[0]),
                    hi: xkey(&pts[pts.len() - 1]),
                },
            },
        );
        self.meta.get_mut(&l).unwrap().parent = Some(join);
        self.meta.get_mut(&r).unwrap().parent = Some(join);
        (join, ys)
    }

    /// Staircase of the points in `quad` of `q`: the maxima toward the
    /// query corner, in staircase order. Closed quadrant boundaries.
    pub fn dominated_maxima(&self, q: Point, quad: Quadrant) -> Staircase {
        let (flip_x, flip_y) = quad.flips();
        let env = ViewEnv {
            qx: q.x(),
            qy: Key::Finite(FiniteKey::new(q.y()).expect("validated on construction")),
            flip_x,
            flip_y,
        };
        Staircase::new(quad, self.staircase_view(&env))
    }

    /// Size of the global staircase toward `(+inf, +inf)`.
    pub fn maxima_count(&self) -> usize {
        let env = ViewEnv {
            qx: f64::INFINITY,
            qy: Key::PlusInf,
            flip_x: false,
            flip_y: false,
        };
        self.staircase_view(&env).len()
    }

    /// Exact nearest neighbor under the metric; ties go to the smallest id.
    /// Every non-staircase point is dominated toward `q` by a staircase
    /// point of its quadrant, which metric monotonicity makes at least as
    /// near, so the four staircases suffice as candidates.
    pub fn nearest_neighbor(&self, q: Point, metric: Metric) -> Option<Point> {
        self.nearest_neighbor_counted(q, metric).0
    }

    /// Nearest neighbor plus the number of staircase candidates scanned
    /// across the four quadrants.
    pub fn nearest_neighbor_counted(&self, q: Point, metric: Metric) -> (Option<Point>, usize) {
        let mut best: Option<(f64, Point)> = None;
        let mut candidates = 0;
        for quad in Quadrant::ALL {
            let stairs = self.dominated_maxima(q, quad);
            candidates += stairs.len();
            for p in stairs.points() {
                let d = metric.distance(q.xy(), p.xy());
                let better = match &best {
                    None => true,
                    Some((bd, bp)) => match d.total_cmp(bd) {
                        Ordering::Less => true,
                        Ordering::Equal => p.id() < bp.id(),
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((d, *p));
                }
            }
        }
        (best.map(|(_, p)| p), candidates)
    }

    /// Walks the x-boundary path, cascading the y-position, and collects
    /// the canonical subtrees fully inside the quadrant together with their
    /// cascaded positions; then extracts staircase points right-to-left.
    fn staircase_view(&self, env: &ViewEnv) -> Vec<Point> {
        let Some(root) = self.root else {
            return Vec::new();
        };
        let mode = env.mode();
        let mut canon: Vec<(VertexId, Option<ElementHandle>)> = Vec::new();
        let (mut pos, _) = self.graph.finger_mode(root, None, env.qy, mode);
        let mut cur = root;
        loop {
            match self.kind(cur) {
                NodeKind::Leaf { point } => {
                    if env.x_inside(point.x()) {
                        canon.push((cur, pos));
                    }
                    break;
                }
                NodeKind::Internal { left, right, .. } => {
                    let (l, r) = (*left, *right);
                    let (first, second) = if env.flip_x { (r, l) } else { (l, r) };
                    let first_inside = if env.flip_x {
                        self.lo(first).0 >= env.qx
                    } else {
                        self.hi(first).0 <= env.qx
                    };
                    if first_inside {
                        let fpos = self.cascade(cur, first, pos, env, mode);
                        canon.push((first, fpos));
                        pos = self.cascade(cur, second, pos, env, mode);
                        cur = second;
                    } else {
                        // everything on the second side lies outside
                        pos = self.cascade(cur, first, pos, env, mode);
                        cur = first;
                    }
                }
            }
        }
        let mut out: Vec<Point> = Vec::new();
        let mut best_vy = f64::NEG_INFINITY;
        for (v, p) in canon.into_iter().rev() {
            self.walk(v, p, env, mode, &mut out, &mut best_vy);
        }
        out.reverse();
        out
    }

    /// Moves a y-boundary position one tree edge down via the bridge map
    /// plus a forward finger search.
    fn cascade(
        &self,
        from: VertexId,
        to: VertexId,
        pos: Option<ElementHandle>,
        env: &ViewEnv,
        mode: SearchMode,
    ) -> Option<ElementHandle> {
        // A child's y-multiset is contained in its parent's, so an empty
        // parent position stays empty below.
        let pos = pos?;
        let start = self.graph.bridge(from, to, pos).expect("tree edge");
        self.graph.finger_mode(to, start, env.qy, mode).0
    }

    /// Best in-quadrant y-value of the subtree, read off the maintained
    /// boundary position.
    fn view_candidate(
        &self,
        v: VertexId,
        pos: Option<ElementHandle>,
        mode: SearchMode,
    ) -> Option<f64> {
        let c = self.graph.catalog(v).expect("tree vertex");
        let h = match mode {
            SearchMode::Closed => pos,
            SearchMode::Strict => match pos {
                Some(h) => c.next_of(h).expect("live position"),
                None => c.first(),
            },
        };
        h.map(|h| c.key_of(h).expect("live element").value())
    }

    fn walk(
        &self,
        v: VertexId,
        pos: Option<ElementHandle>,
        env: &ViewEnv,
        mode: SearchMode,
        out: &mut Vec<Point>,
        best_vy: &mut f64,
    ) {
        let Some(cand) = self.view_candidate(v, pos, mode) else {
            return;
        };
        let vy = env.vy(cand);
        if !out.is_empty() && vy < *best_vy {
            return; // everything here is dominated from the right
        }
        match self.kind(v) {
            NodeKind::Leaf { point } => {
                let p = *point;
                if out.is_empty() || vy > *best_vy {
                    // an earlier same-x emission sits strictly lower, hence
                    // is dominated by this point
                    while out.last().is_some_and(|t| t.x() == p.x()) {
                        out.pop();
                    }
                    out.push(p);
                    *best_vy = vy;
                } else if vy == *best_vy {
                    if let Some(last) = out.last_mut() {
                        if last.x() == p.x() && last.y() == p.y() && p.id() < last.id() {
                            *last = p; // coincident points: smallest id represents
                        }
                    }
                }
            }
            NodeKind::Internal { left, right, .. } => {
                let (l, r) = (*left, *right);
                let (first, second) = if env.flip_x { (r, l) } else { (l, r) };
                let spos = self.cascade(v, second, pos, env, mode);
                self.walk(second, spos, env, mode, out, best_vy);
                let fpos = self.cascade(v, first, pos, env, mode);
                self.walk(first, fpos, env, mode, out, best_vy);
            }
        }
    }

    /// Full structural audit: bridge exactness and monotonicity on the
    /// underlying graph, every catalog equal to its subtree y-multiset,
    /// order, weight, bound and balance invariants at every node.
    pub fn audit(&self) -> Result<(), AuditError> {
        audit::check_graph(&self.graph)?;
        let Some(root) = self.root else {
            if !self.points.is_empty() || !self.meta.is_empty() {
                return Err(AuditError::Structure(
                    "empty tree still holds points or nodes".into(),
                ));
            }
            return Ok(());
        };
        if self.parent(root).is_some() {
            return Err(AuditError::Structure("root has a parent".into()));
        }
        let summary = self.audit_node(root)?;
        if summary.weight != self.points.len() {
            return Err(AuditError::Structure(format!(
                "tree holds {} leaves but the point table holds {}",
                summary.weight,
                self.points.len()
            )));
        }
        if self.meta.len() != 2 * self.points.len() - 1 {
            return Err(AuditError::Structure("stray tree nodes".into()));
        }
        Ok(())
    }

    fn audit_node(&self, v: VertexId) -> Result<NodeSummary, AuditError> {
        let catalog_ys: Vec<f64> = self
            .graph
            .catalog(v)
            .expect("tree vertex")
            .iter()
            .map(|(_, k)| k.value())
            .collect();
        let fail = |msg: String| Err(AuditError::Structure(msg));
        match self.kind(v) {
            NodeKind::Leaf { point } => {
                if catalog_ys != vec![point.y()] {
                    return fail(format!("leaf {v} catalog != its point's y"));
                }
                match self.points.get(&point.id()) {
                    Some(rec) if rec.leaf == v && rec.point == *point => {}
                    _ => return fail(format!("point table out of sync at leaf {v}")),
                }
                Ok(NodeSummary {
                    weight: 1,
                    lo: xkey(point),
                    hi: xkey(point),
                    ys: catalog_ys,
                })
            }
            NodeKind::Internal {
                left,
                right,
                weight,
                lo,
                hi,
            } => {
                let ls = self.audit_node(*left)?;
                let rs = self.audit_node(*right)?;
                if cmp_xkey(ls.hi, rs.lo) != Ordering::Less {
                    return fail(format!("x-order violated at node {v}"));
                }
                if self.parent(*left) != Some(v) || self.parent(*right) != Some(v) {
                    return fail(format!("parent links broken at node {v}"));
                }
                if *weight != ls.weight + rs.weight || *lo != ls.lo || *hi != rs.hi {
                    return fail(format!("cached weight/bounds stale at node {v}"));
                }
                let heavier = ls.weight.max(rs.weight);
                if heavier as f64 > BALANCE_ALPHA * *weight as f64 {
                    return fail(format!("balance violated at node {v}: {heavier}/{weight}"));
                }
                let ys = merge_sorted(&ls.ys, &rs.ys);
                if catalog_ys != ys {
                    return fail(format!("catalog at node {v} != subtree y-multiset"));
                }
                Ok(NodeSummary {
                    weight: *weight,
                    lo: *lo,
                    hi: *hi,
                    ys,
                })
            }
        }
    }
}

struct NodeSummary {
    weight: usize,
    lo: XKey,
    hi: XKey,
    ys: Vec<f64>,
}

fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].total_cmp(&b[j]) != Ordering::Greater {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
