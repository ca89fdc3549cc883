//! Walks through the three layers: a catalog with finger search, a small
//! catalog graph with a cascaded path query, and the dynamic point set
//! answering staircase and nearest-neighbor queries.

use fc_core::{CatalogGraph, Key, Metric, Point, PointSet, Quadrant, VertexId};

fn main() {
    // --- one catalog -----------------------------------------------------
    let mut catalog = fc_core::Catalog::with_seed(1);
    for v in [12.0, 14.0, 25.0, 40.0] {
        catalog.insert(Key::finite(v).unwrap()).unwrap();
    }
    let from = catalog.pred(Key::finite(13.0).unwrap());
    let (pos, steps) = catalog
        .finger_search(from, Key::finite(29.0).unwrap())
        .unwrap();
    println!(
        "catalog: predecessor of 29 is {} ({steps} finger steps from 12)",
        catalog.key_of(pos.unwrap()).unwrap()
    );

    // --- a path of catalogs ----------------------------------------------
    let graph = CatalogGraph::build(
        3,
        7,
        vec![
            (VertexId(0), vec![10.0, 20.0, 30.0]),
            (VertexId(1), vec![12.0, 14.0, 25.0]),
            (VertexId(2), vec![5.0, 21.0, 22.0]),
        ],
        vec![(VertexId(0), VertexId(1)), (VertexId(1), VertexId(2))],
    )
    .unwrap();
    let path = [VertexId(0), VertexId(1), VertexId(2)];
    let (answers, trace) = graph
        .path_search(&path, Key::finite(21.0).unwrap())
        .unwrap();
    for (v, pos) in &answers {
        let key = pos.map(|h| graph.catalog(*v).unwrap().key_of(h).unwrap().value());
        println!("graph: predecessor of 21 at vertex {v}: {key:?}");
    }
    println!(
        "graph: {} finger steps over {} edges, sum log2 delta = {:.2}",
        trace.total_finger_steps(),
        trace.edges.len(),
        trace.total_log2_delta()
    );

    // --- the planar point set --------------------------------------------
    let points = vec![
        Point::new(0, 1.0, 5.0).unwrap(),
        Point::new(1, 2.0, 3.0).unwrap(),
        Point::new(2, 4.0, 4.0).unwrap(),
        Point::new(3, 3.0, 1.0).unwrap(),
    ];
    let set = PointSet::from_points(42, points).unwrap();
    let q = Point::new(u64::MAX, 5.0, 6.0).unwrap();
    let stairs = set.dominated_maxima(q, Quadrant::SouthWest);
    let ids: Vec<u64> = stairs.points().iter().map(|p| p.id()).collect();
    println!("points: south-west staircase of (5, 6): points {ids:?}");
    let nn = set.nearest_neighbor(q, Metric::L2).unwrap();
    println!(
        "points: nearest neighbor of (5, 6) under L2: point {} at ({}, {})",
        nn.id(),
        nn.x(),
        nn.y()
    );
    println!("points: global maxima count: {}", set.maxima_count());
}
