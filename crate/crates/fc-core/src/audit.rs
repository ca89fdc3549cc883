//! Brute-force consistency checks, independent of the maintained structures.

use std::collections::HashMap;

use thiserror::Error;

use crate::catalog::ElementHandle;
use crate::graph::{CatalogGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuditError {
    #[error("bridge {from}->{to} at key {key}: expected {expected:?}, found {found:?}")]
    BridgeMismatch {
        from: VertexId,
        to: VertexId,
        key: f64,
        expected: Option<f64>,
        found: Option<f64>,
    },
    #[error("bridge {from}->{to} not monotone at key {key}")]
    BridgeNotMonotone {
        from: VertexId,
        to: VertexId,
        key: f64,
    },
    #[error("vertex {vertex} has degree {degree} above bound {max_degree}")]
    DegreeViolation {
        vertex: VertexId,
        degree: usize,
        max_degree: usize,
    },
    #[error("{0}")]
    Structure(String),
}

/// Recomputes every directed bridge map from scratch (binary search over the
/// plain sorted element list, no skip-list involvement) and compares it with
/// the maintained map element by element, handle identity included.
pub fn check_bridges(g: &CatalogGraph) -> Result<(), AuditError> {
    for v in g.vertex_ids() {
        for &w in g.neighbors(v).expect("listed vertex") {
            let target_catalog = g.catalog(w).expect("listed vertex");
            let targets: Vec<(f64, ElementHandle)> = target_catalog
                .iter()
                .map(|(h, key)| (key.value(), h))
                .collect();
            let source = g.catalog(v).expect("listed vertex");
            for (h, key) in source.iter() {
                let idx = targets.partition_point(|(tk, _)| *tk <= key.value());
                let expected = if idx == 0 {
                    None
                } else {
                    Some(targets[idx - 1].1)
                };
                let found = g.bridge(v, w, h).expect("edge exists");
                if expected != found {
                    let show = |t: Option<ElementHandle>| {
                        t.map(|h| {
                            target_catalog
                                .key_of(h)
                                .map(|k| k.value())
                                .unwrap_or(f64::NAN)
                        })
                    };
                    return Err(AuditError::BridgeMismatch {
                        from: v,
                        to: w,
                        key: key.value(),
                        expected: show(expected),
                        found: show(found),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Checks that bridge targets never move backwards as the source catalog is
/// walked in order (with the floor below every element).
pub fn check_bridge_monotonicity(g: &CatalogGraph) -> Result<(), AuditError> {
    for v in g.vertex_ids() {
        for &w in g.neighbors(v).expect("listed vertex") {
            let rank: HashMap<ElementHandle, usize> = g
                .catalog(w)
                .expect("listed vertex")
                .iter()
                .enumerate()
                .map(|(i, (h, _))| (h, i))
                .collect();
            let mut prev: i64 = -1; // the floor sorts below rank 0
            for (h, key) in g.catalog(v).expect("listed vertex").iter() {
                let cur = g
                    .bridge(v, w, h)
                    .expect("edge exists")
                    .map_or(-1, |t| rank[&t] as i64);
                if cur < prev {
                    return Err(AuditError::BridgeNotMonotone {
                        from: v,
                        to: w,
                        key: key.value(),
                    });
                }
                prev = cur;
            }
        }
    }
    Ok(())
}

pub fn check_degrees(g: &CatalogGraph) -> Result<(), AuditError> {
    for v in g.vertex_ids() {
        let degree = g.degree(v).expect("listed vertex");
        if degree > g.max_degree() {
            return Err(AuditError::DegreeViolation {
                vertex: v,
                degree,
                max_degree: g.max_degree(),
            });
        }
    }
    Ok(())
}

/// Full graph audit: degrees, bridge exactness, bridge monotonicity.
pub fn check_graph(g: &CatalogGraph) -> Result<(), AuditError> {
    check_degrees(g)?;
    check_bridges(g)?;
    check_bridge_monotonicity(g)
}
