//! The instrumented experiments: discrepancy sums along catalog paths,
//! maxima-count statistics, nearest-neighbor scaling, and the oracle checks
//! behind `nn-check` and `graph-check`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use fc_core::{
    audit, mix_seed, nn_oracle, CatalogGraph, GeometryError, GraphError, Key, Metric, Point,
    PointSet, VertexId,
};

use crate::dist::Distribution;
use crate::report::{mean, percentile, stddev, Record, Report};
use crate::runner::map_trials;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn require(cond: bool, msg: &str) -> Result<(), ExperimentError> {
    if cond {
        Ok(())
    } else {
        Err(ExperimentError::InvalidParameter(msg.into()))
    }
}

// ---------------------------------------------------------------------------
// discrepancy sums along a path of catalogs

#[derive(Clone, Debug)]
pub struct DiscrepancyConfig {
    pub dist: Distribution,
    pub path_len: usize,
    pub catalog_size: usize,
    pub queries: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyTrial {
    pub query_index: usize,
    pub x: f64,
    pub sum_log2_delta: f64,
    pub sum_finger_steps: u64,
    /// `sum_log2_delta` divided by the path length.
    pub norm_log2_delta: f64,
}

impl Record for DiscrepancyTrial {
    fn csv_header() -> &'static [&'static str] {
        &[
            "query_index",
            "x",
            "sum_log2_delta",
            "sum_finger_steps",
            "norm_log2_delta",
        ]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.query_index.to_string(),
            self.x.to_string(),
            self.sum_log2_delta.to_string(),
            self.sum_finger_steps.to_string(),
            self.norm_log2_delta.to_string(),
        ]
    }
}

/// Path graph whose catalog at position `i` holds `catalog_size` i.i.d.
/// samples of the population fixed by `seed`.
pub fn build_path_graph(
    dist: &Distribution,
    path_len: usize,
    catalog_size: usize,
    seed: u64,
) -> Result<CatalogGraph, GraphError> {
    let vertices: Vec<(VertexId, Vec<f64>)> = (0..path_len)
        .map(|i| {
            (
                VertexId(i as u64),
                dist.sample_catalog(seed, i, catalog_size),
            )
        })
        .collect();
    let edges: Vec<(VertexId, VertexId)> = (1..path_len)
        .map(|i| (VertexId(i as u64 - 1), VertexId(i as u64)))
        .collect();
    CatalogGraph::build(3, mix_seed(seed, 1), vertices, edges)
}

pub fn discrepancy_sum(
    cfg: &DiscrepancyConfig,
) -> Result<Report<DiscrepancyTrial>, ExperimentError> {
    require(cfg.path_len >= 2, "path length must be at least 2")?;
    require(cfg.catalog_size >= 1, "catalog size must be at least 1")?;
    require(cfg.queries >= 1, "query count must be at least 1")?;
    let graph = build_path_graph(&cfg.dist, cfg.path_len, cfg.catalog_size, cfg.seed)?;
    let path: Vec<VertexId> = (0..cfg.path_len as u64).map(VertexId).collect();
    let queries = cfg.dist.sample_queries(cfg.seed, cfg.path_len, cfg.queries);
    let trials = map_trials(cfg.queries, |i| {
        let x = Key::finite(queries[i]).expect("generators yield finite values");
        let (_, trace) = graph.path_search(&path, x).expect("path is valid");
        let sum = trace.total_log2_delta();
        DiscrepancyTrial {
            query_index: i,
            x: queries[i],
            sum_log2_delta: sum,
            sum_finger_steps: trace.total_finger_steps(),
            norm_log2_delta: sum / cfg.path_len as f64,
        }
    });
    let aggregates = discrepancy_aggregates(&trials, cfg.path_len);
    Ok(Report {
        experiment: "discrepancy_sum".into(),
        params: vec![
            ("dist".into(), cfg.dist.label()),
            ("path_len".into(), cfg.path_len.to_string()),
            ("catalog_size".into(), cfg.catalog_size.to_string()),
            ("queries".into(), cfg.queries.to_string()),
            ("seed".into(), cfg.seed.to_string()),
        ],
        trials,
        aggregates,
    })
}

pub fn discrepancy_aggregates(trials: &[DiscrepancyTrial], path_len: usize) -> Vec<(String, f64)> {
    let norms: Vec<f64> = trials.iter().map(|t| t.norm_log2_delta).collect();
    let steps: Vec<f64> = trials
        .iter()
        .map(|t| t.sum_finger_steps as f64 / (path_len - 1) as f64)
        .collect();
    vec![
        ("mean_norm_log2_delta".into(), mean(&norms)),
        ("stddev_norm_log2_delta".into(), stddev(&norms)),
        ("p99_norm_log2_delta".into(), percentile(&norms, 0.99)),
        ("mean_finger_steps_per_edge".into(), mean(&steps)),
        ("p99_finger_steps_per_edge".into(), percentile(&steps, 0.99)),
    ]
}

// ---------------------------------------------------------------------------
// maxima counts of uniform point sets

#[derive(Clone, Debug)]
pub struct MaximaConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximaTrial {
    pub n: usize,
    pub trial: usize,
    pub maxima: usize,
}

impl Record for MaximaTrial {
    fn csv_header() -> &'static [&'static str] {
        &["n", "trial", "maxima"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.trial.to_string(),
            self.maxima.to_string(),
        ]
    }
}

/// n-th harmonic number, the exact expectation of the maxima count of n
/// i.i.d. points with continuous coordinate distributions.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

pub fn uniform_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Distribution::UniformSquare
        .sample_points(n, &mut rng)
        .into_iter()
        .enumerate()
        .map(|(id, (x, y))| Point::new(id as u64, x, y).expect("finite"))
        .collect()
}

pub fn maxima_counts(cfg: &MaximaConfig) -> Result<Report<MaximaTrial>, ExperimentError> {
    require(!cfg.sizes.is_empty(), "need at least one size")?;
    require(cfg.sizes.iter().all(|&n| n >= 1), "sizes must be positive")?;
    require(cfg.trials >= 1, "need at least one trial")?;
    let mut trials = Vec::with_capacity(cfg.sizes.len() * cfg.trials);
    for &n in &cfg.sizes {
        let base = mix_seed(cfg.seed, n as u64);
        let counts = map_trials(cfg.trials, |t| {
            let pts = uniform_points(n, mix_seed(base, t as u64));
            let set = PointSet::from_points(mix_seed(base, 1 << 40 | t as u64), pts)
                .expect("ids are unique");
            set.maxima_count()
        });
        trials.extend(
            counts
                .into_iter()
                .enumerate()
                .map(|(trial, maxima)| MaximaTrial { n, trial, maxima }),
        );
    }
    let aggregates = maxima_aggregates(&trials, &cfg.sizes);
    Ok(Report {
        experiment: "maxima_count".into(),
        params: vec![
            (
                "sizes".into(),
                cfg.sizes
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join("|"),
            ),
            ("trials".into(), cfg.trials.to_string()),
            ("seed".into(), cfg.seed.to_string()),
        ],
        trials,
        aggregates,
    })
}

pub fn maxima_aggregates(trials: &[MaximaTrial], sizes: &[usize]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for &n in sizes {
        let counts: Vec<f64> = trials
            .iter()
            .filter(|t| t.n == n)
            .map(|t| t.maxima as f64)
            .collect();
        let m = mean(&counts);
        let h = harmonic(n);
        out.push((format!("mean_maxima_n{n}"), m));
        out.push((format!("harmonic_n{n}"), h));
        out.push((format!("ratio_to_harmonic_n{n}"), m / h));
    }
    out
}

// ---------------------------------------------------------------------------
// nearest-neighbor scaling

#[derive(Clone, Debug)]
pub struct NnScalingConfig {
    pub sizes: Vec<usize>,
    pub ops: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NnScalingTrial {
    pub n: usize,
    pub build_ms: f64,
    pub insert_us: f64,
    pub delete_us: f64,
    pub query_us: f64,
    pub mean_candidates: f64,
    pub p99_candidates: f64,
}

impl Record for NnScalingTrial {
    fn csv_header() -> &'static [&'static str] {
        &[
            "n",
            "build_ms",
            "insert_us",
            "delete_us",
            "query_us",
            "mean_candidates",
            "p99_candidates",
        ]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.build_ms.to_string(),
            self.insert_us.to_string(),
            self.delete_us.to_string(),
            self.query_us.to_string(),
            self.mean_candidates.to_string(),
            self.p99_candidates.to_string(),
        ]
    }
}

/// Builds a uniform set per size, then times batches of inserts, deletes
/// and nearest-neighbor queries and records per-query staircase candidate
/// counts. Runs sequentially regardless of the `parallel` feature so the
/// wall-clock numbers are not polluted by sibling trials; candidate counts
/// are deterministic either way, timings are advisory by nature.
pub fn nn_scaling(cfg: &NnScalingConfig) -> Result<Report<NnScalingTrial>, ExperimentError> {
    require(!cfg.sizes.is_empty(), "need at least one size")?;
    require(cfg.sizes.iter().all(|&n| n >= 1), "sizes must be positive")?;
    require(cfg.ops >= 1, "need at least one operation per batch")?;
    let mut trials = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let base = mix_seed(cfg.seed, n as u64);
        let points = uniform_points(n, mix_seed(base, 1));
        let t0 = Instant::now();
        let mut set = PointSet::from_points(mix_seed(base, 0), points)?;
        let build_ms = t0.elapsed().as_secs_f64() * 1e3;

        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(base, 3));
        let extra: Vec<Point> = (0..cfg.ops)
            .map(|i| Point::new((n + i) as u64, rng.random(), rng.random()).expect("finite"))
            .collect();
        let t1 = Instant::now();
        for p in &extra {
            set.insert(*p)?;
        }
        let insert_us = t1.elapsed().as_secs_f64() * 1e6 / cfg.ops as f64;
        let t2 = Instant::now();
        for p in &extra {
            set.remove(p.id())?;
        }
        let delete_us = t2.elapsed().as_secs_f64() * 1e6 / cfg.ops as f64;

        let queries: Vec<Point> = (0..cfg.ops)
            .map(|_| Point::new(u64::MAX, rng.random(), rng.random()).expect("finite"))
            .collect();
        let mut candidates = Vec::with_capacity(cfg.ops);
        let t3 = Instant::now();
        for q in &queries {
            let (_, c) = set.nearest_neighbor_counted(*q, Metric::L2);
            candidates.push(c as f64);
        }
        let query_us = t3.elapsed().as_secs_f64() * 1e6 / cfg.ops as f64;
        trials.push(NnScalingTrial {
            n,
            build_ms,
            insert_us,
            delete_us,
            query_us,
            mean_candidates: mean(&candidates),
            p99_candidates: percentile(&candidates, 0.99),
        });
    }
    let aggregates = nn_scaling_aggregates(&trials);
    Ok(Report {
        experiment: "nn_scaling".into(),
        params: vec![
            (
                "sizes".into(),
                cfg.sizes
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join("|"),
            ),
            ("ops".into(), cfg.ops.to_string()),
            ("seed".into(), cfg.seed.to_string()),
        ],
        trials,
        aggregates,
    })
}

pub fn nn_scaling_aggregates(trials: &[NnScalingTrial]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    if let (Some(first), Some(last)) = (trials.first(), trials.last()) {
        out.push((
            "candidates_ratio_last_over_first".into(),
            last.mean_candidates / first.mean_candidates,
        ));
        out.push((
            "update_time_ratio_last_over_first".into(),
            (last.insert_us + last.delete_us) / (first.insert_us + first.delete_us),
        ));
        out.push((
            "query_time_ratio_last_over_first".into(),
            last.query_us / first.query_us,
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// oracle equivalence on a concrete point set (nn-check)

#[derive(Clone, Debug)]
pub struct NnCheckConfig {
    pub queries: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NnCheckTrial {
    pub query_index: usize,
    pub metric: String,
    pub qx: f64,
    pub qy: f64,
    pub found_id: Option<u64>,
    pub oracle_id: Option<u64>,
    pub matched: bool,
}

impl Record for NnCheckTrial {
    fn csv_header() -> &'static [&'static str] {
        &[
            "query_index",
            "metric",
            "qx",
            "qy",
            "found_id",
            "oracle_id",
            "matched",
        ]
    }

    fn csv_row(&self) -> Vec<String> {
        let opt = |v: Option<u64>| v.map_or("none".to_string(), |id| id.to_string());
        vec![
            self.query_index.to_string(),
            self.metric.clone(),
            self.qx.to_string(),
            self.qy.to_string(),
            opt(self.found_id),
            opt(self.oracle_id),
            self.matched.to_string(),
        ]
    }
}

/// The metric orders `nn-check` exercises.
pub fn check_metrics() -> [(Metric, &'static str); 4] {
    [
        (Metric::L1, "1"),
        (Metric::L2, "2"),
        (Metric::minkowski(3.0).expect("3 >= 1"), "3"),
        (Metric::L_INF, "inf"),
    ]
}

/// Compares the structure's nearest neighbor with a linear scan over the
/// same points for Minkowski orders 1, 2, 3 and infinity. A query matches
/// when both sides return the same point, or points at bit-identical
/// distance (exact ties), or both report an empty set.
pub fn nn_check(
    points: &[Point],
    cfg: &NnCheckConfig,
) -> Result<Report<NnCheckTrial>, ExperimentError> {
    require(cfg.queries >= 1, "need at least one query")?;
    let set = PointSet::from_points(mix_seed(cfg.seed, 1), points.to_vec())?;
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (0.0f64, 1.0f64, 0.0f64, 1.0f64);
    if !points.is_empty() {
        lo_x = points.iter().map(|p| p.x()).fold(f64::MAX, f64::min);
        hi_x = points.iter().map(|p| p.x()).fold(f64::MIN, f64::max);
        lo_y = points.iter().map(|p| p.y()).fold(f64::MAX, f64::min);
        hi_y = points.iter().map(|p| p.y()).fold(f64::MIN, f64::max);
    }
    let pad = |lo: f64, hi: f64| {
        let margin = ((hi - lo) * 0.1).max(0.1);
        (lo - margin, hi + margin)
    };
    let (lo_x, hi_x) = pad(lo_x, hi_x);
    let (lo_y, hi_y) = pad(lo_y, hi_y);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 2));
    let mut trials = Vec::with_capacity(cfg.queries * 4);
    for query_index in 0..cfg.queries {
        let qx = rng.random_range(lo_x..=hi_x);
        let qy = rng.random_range(lo_y..=hi_y);
        let q = Point::new(u64::MAX, qx, qy).expect("finite");
        for (metric, label) in check_metrics() {
            let found = set.nearest_neighbor(q, metric);
            let oracle = nn_oracle(points, (qx, qy), metric);
            let matched = match (found, oracle) {
                (None, None) => true,
                (Some(a), Some(b)) => {
                    a.id() == b.id()
                        || metric.distance((qx, qy), a.xy()) == metric.distance((qx, qy), b.xy())
                }
                _ => false,
            };
            trials.push(NnCheckTrial {
                query_index,
                metric: label.to_string(),
                qx,
                qy,
                found_id: found.map(|p| p.id()),
                oracle_id: oracle.map(|p| p.id()),
                matched,
            });
        }
    }
    let mismatches = trials.iter().filter(|t| !t.matched).count() as f64;
    let aggregates = vec![
        ("checks".into(), trials.len() as f64),
        ("mismatches".into(), mismatches),
    ];
    Ok(Report {
        experiment: "nn_check".into(),
        params: vec![
            ("points".into(), points.len().to_string()),
            ("queries".into(), cfg.queries.to_string()),
            ("seed".into(), cfg.seed.to_string()),
        ],
        trials,
        aggregates,
    })
}

// ---------------------------------------------------------------------------
// bridge audit of a loaded graph (graph-check)

#[derive(Clone, Debug)]
pub struct GraphCheckOutcome {
    pub vertices: usize,
    pub edges: usize,
    pub elements: usize,
    pub failure: Option<String>,
}

pub fn graph_check(g: &CatalogGraph) -> GraphCheckOutcome {
    let elements = g
        .vertex_ids()
        .map(|v| g.catalog(v).expect("listed vertex").len())
        .sum();
    GraphCheckOutcome {
        vertices: g.vertex_count(),
        edges: g.edges().len(),
        elements,
        failure: audit::check_graph(g).err().map(|e| e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrepancy_identical_catalogs_match_local_discrepancy_oracle() {
        // two identical catalogs: the trace's per-edge delta must equal the
        // direct local-discrepancy computation, query by query
        let keys = vec![1.0, 3.0, 5.0, 7.0];
        let g = CatalogGraph::build(
            3,
            9,
            vec![(VertexId(0), keys.clone()), (VertexId(1), keys)],
            vec![(VertexId(0), VertexId(1))],
        )
        .unwrap();
        let path = [VertexId(0), VertexId(1)];
        for x in [0.0, 1.0, 2.0, 4.5, 7.0, 9.0] {
            let key = Key::finite(x).unwrap();
            let (_, trace) = g.path_search(&path, key).unwrap();
            let expect = g.local_discrepancy(VertexId(0), VertexId(1), key).unwrap();
            assert_eq!(trace.edges.len(), 1);
            assert_eq!(trace.edges[0].delta, expect);
            assert_eq!(trace.total_log2_delta(), expect.log2());
        }
    }

    #[test]
    fn discrepancy_report_is_deterministic_and_recomputable() {
        let cfg = DiscrepancyConfig {
            dist: Distribution::UniformSquare,
            path_len: 8,
            catalog_size: 64,
            queries: 50,
            seed: 11,
        };
        let a = discrepancy_sum(&cfg).unwrap();
        let b = discrepancy_sum(&cfg).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        a.write_csv(&mut ba).unwrap();
        b.write_csv(&mut bb).unwrap();
        assert_eq!(ba, bb);
        assert_eq!(
            a.aggregates,
            discrepancy_aggregates(&a.trials, cfg.path_len)
        );
    }

    #[test]
    fn maxima_trivial_size_one() {
        let cfg = MaximaConfig {
            sizes: vec![1],
            trials: 5,
            seed: 3,
        };
        let report = maxima_counts(&cfg).unwrap();
        assert!(report.trials.iter().all(|t| t.maxima == 1));
        assert_eq!(report.aggregate("mean_maxima_n1"), Some(1.0));
        assert_eq!(report.aggregate("harmonic_n1"), Some(1.0));
    }

    #[test]
    fn maxima_aggregates_recomputable() {
        let cfg = MaximaConfig {
            sizes: vec![16, 64],
            trials: 10,
            seed: 5,
        };
        let report = maxima_counts(&cfg).unwrap();
        assert_eq!(
            report.aggregates,
            maxima_aggregates(&report.trials, &cfg.sizes)
        );
    }

    #[test]
    fn nn_scaling_smallest_case_runs() {
        let cfg = NnScalingConfig {
            sizes: vec![1, 64],
            ops: 8,
            seed: 2,
        };
        let report = nn_scaling(&cfg).unwrap();
        assert_eq!(report.trials.len(), 2);
        assert!(report.trials[0].mean_candidates >= 1.0);
        assert_eq!(report.aggregates, nn_scaling_aggregates(&report.trials));
    }

    #[test]
    fn nn_check_clean_set_matches() {
        let points = uniform_points(128, 77);
        let report = nn_check(
            &points,
            &NnCheckConfig {
                queries: 40,
                seed: 13,
            },
        )
        .unwrap();
        assert_eq!(report.aggregate("mismatches"), Some(0.0));
        assert_eq!(report.aggregate("checks"), Some(160.0));
    }

    #[test]
    fn graph_check_reports_clean_and_sized() {
        let g = CatalogGraph::build(
            3,
            1,
            vec![(VertexId(0), vec![1.0, 2.0]), (VertexId(1), vec![1.5])],
            vec![(VertexId(0), VertexId(1))],
        )
        .unwrap();
        let outcome = graph_check(&g);
        assert_eq!(outcome.vertices, 2);
        assert_eq!(outcome.edges, 1);
        assert_eq!(outcome.elements, 3);
        assert!(outcome.failure.is_none());
    }
}
