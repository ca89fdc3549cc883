//! Synthetic input generators. Every generator is deterministic given
//! (kind, parameters, seed, n). For path experiments the instance seed
//! fixes one concrete population (for example one set of cluster centers)
//! and every catalog of the path draws i.i.d. samples from it through its
//! own derived stream, so neighboring catalogs are similar the way real
//! co-located data is — except for the adversarial generator, which is
//! built to violate exactly that.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use fc_core::mix_seed;

// stream tags for deriving independent generators from one instance seed
const STREAM_CENTERS: u64 = 0xCE11;
const STREAM_QUERIES: u64 = 0x9E;
const STREAM_CATALOG: u64 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    /// i.i.d. uniform on the unit square (unit interval for catalogs).
    UniformSquare,
    /// Mixture of `clusters` Gaussian blobs with standard deviation
    /// `sigma`; the centers are part of the instance, drawn uniformly once
    /// per seed.
    GaussianCluster { clusters: usize, sigma: f64 },
    /// Regular grid perturbed per cell by uniform jitter of amplitude
    /// `eps` (in cell units).
    GridJitter { eps: f64 },
    /// Known-bad case for cascading: catalog `i` spreads uniformly over
    /// `[0, ratio^i)`, so along a path almost every neighbor concentrates
    /// its mass inside the top gap of the previous catalog and the local
    /// discrepancy grows with the catalog size instead of staying flat.
    AdversarialGeometric { ratio: f64 },
}

impl Distribution {
    /// Parses `KIND` or `KIND:params`, e.g. `uniform_square`,
    /// `gaussian_cluster:4,0.05`, `grid_jitter:0.3`,
    /// `adversarial_geometric:2`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let (kind, params) = match text.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (text, None),
        };
        let parse_f64 = |tok: &str| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {tok:?}: {e}"))
        };
        match kind {
            "uniform_square" => match params {
                None => Ok(Distribution::UniformSquare),
                Some(_) => Err("uniform_square takes no parameters".into()),
            },
            "gaussian_cluster" => {
                let (clusters, sigma) = match params {
                    None => (4, 0.05),
                    Some(p) => {
                        let mut it = p.split(',');
                        let k = it
                            .next()
                            .ok_or("gaussian_cluster:<clusters>,<sigma>")?
                            .trim()
                            .parse::<usize>()
                            .map_err(|e| format!("bad cluster count: {e}"))?;
                        let sigma = parse_f64(it.next().ok_or("missing sigma")?)?;
                        if it.next().is_some() {
                            return Err("gaussian_cluster takes two parameters".into());
                        }
                        (k, sigma)
                    }
                };
                if clusters == 0 || !sigma.is_finite() || sigma <= 0.0 {
                    return Err("gaussian_cluster needs clusters >= 1 and sigma > 0".into());
                }
                Ok(Distribution::GaussianCluster { clusters, sigma })
            }
            "grid_jitter" => {
                let eps = match params {
                    None => 0.3,
                    Some(p) => parse_f64(p)?,
                };
                if !eps.is_finite() || eps < 0.0 {
                    return Err("grid_jitter needs eps >= 0".into());
                }
                Ok(Distribution::GridJitter { eps })
            }
            "adversarial_geometric" => {
                let ratio = match params {
                    None => 2.0,
                    Some(p) => parse_f64(p)?,
                };
                if !ratio.is_finite() || ratio <= 1.0 {
                    return Err("adversarial_geometric needs ratio > 1".into());
                }
                Ok(Distribution::AdversarialGeometric { ratio })
            }
            other => Err(format!(
                "unknown distribution {other:?} (expected uniform_square, \
                 gaussian_cluster, grid_jitter or adversarial_geometric)"
            )),
        }
    }

    /// Canonical spelling, parseable by [`Distribution::parse`].
    pub fn label(&self) -> String {
        match self {
            Distribution::UniformSquare => "uniform_square".into(),
            Distribution::GaussianCluster { clusters, sigma } => {
                format!("gaussian_cluster:{clusters},{sigma}")
            }
            Distribution::GridJitter { eps } => format!("grid_jitter:{eps}"),
            Distribution::AdversarialGeometric { ratio } => {
                format!("adversarial_geometric:{ratio}")
            }
        }
    }

    fn centers_1d(&self, instance: u64) -> Vec<f64> {
        match self {
            Distribution::GaussianCluster { clusters, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(instance, STREAM_CENTERS));
                (0..*clusters).map(|_| rng.random()).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `n` planar points; one call is one instance.
    pub fn sample_points(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
        match self {
            Distribution::UniformSquare => (0..n).map(|_| (rng.random(), rng.random())).collect(),
            Distribution::GaussianCluster { clusters, sigma } => {
                let centers: Vec<(f64, f64)> = (0..*clusters)
                    .map(|_| (rng.random(), rng.random()))
                    .collect();
                let normal = Normal::new(0.0, *sigma).expect("validated sigma");
                (0..n)
                    .map(|_| {
                        let (cx, cy) = centers[rng.random_range(0..centers.len())];
                        (cx + normal.sample(rng), cy + normal.sample(rng))
                    })
                    .collect()
            }
            Distribution::GridJitter { eps } => {
                let m = (n as f64).sqrt().ceil().max(1.0) as usize;
                (0..n)
                    .map(|i| {
                        let (row, col) = (i / m, i % m);
                        let jx = rng.random_range(-eps..=*eps);
                        let jy = rng.random_range(-eps..=*eps);
                        (
                            (col as f64 + 0.5 + jx) / m as f64,
                            (row as f64 + 0.5 + jy) / m as f64,
                        )
                    })
                    .collect()
            }
            Distribution::AdversarialGeometric { ratio } => {
                // heavy concentration toward the origin with geometric span
                let span = 16.0;
                let g = |u: f64| (ratio.powf(span * u) - 1.0) / (ratio.powf(span) - 1.0);
                (0..n).map(|_| (g(rng.random()), g(rng.random()))).collect()
            }
        }
    }

    /// `n` catalog keys for position `index` of a path graph: i.i.d. draws
    /// from the population fixed by `instance`, through a per-catalog
    /// stream.
    pub fn sample_catalog(&self, instance: u64, index: usize, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(instance, STREAM_CATALOG + index as u64));
        match self {
            Distribution::UniformSquare => (0..n).map(|_| rng.random()).collect(),
            Distribution::GaussianCluster { sigma, .. } => {
                let centers = self.centers_1d(instance);
                let normal = Normal::new(0.0, *sigma).expect("validated sigma");
                (0..n)
                    .map(|_| centers[rng.random_range(0..centers.len())] + normal.sample(&mut rng))
                    .collect()
            }
            Distribution::GridJitter { eps } => (0..n)
                .map(|i| (i as f64 + 0.5 + rng.random_range(-eps..=*eps)) / n as f64)
                .collect(),
            Distribution::AdversarialGeometric { ratio } => {
                let span = ratio.powi(index as i32);
                (0..n).map(|_| rng.random::<f64>() * span).collect()
            }
        }
    }

    /// Query values for a path of `path_len` catalogs of this instance,
    /// drawn from the same population the catalogs sample.
    pub fn sample_queries(&self, instance: u64, path_len: usize, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(instance, STREAM_QUERIES));
        match self {
            Distribution::GaussianCluster { sigma, .. } => {
                let centers = self.centers_1d(instance);
                let normal = Normal::new(0.0, *sigma).expect("validated sigma");
                (0..count)
                    .map(|_| centers[rng.random_range(0..centers.len())] + normal.sample(&mut rng))
                    .collect()
            }
            Distribution::AdversarialGeometric { ratio } => {
                let span = ratio.powi(path_len.saturating_sub(1) as i32);
                (0..count).map(|_| rng.random::<f64>() * span).collect()
            }
            _ => (0..count).map(|_| rng.random()).collect(),
        }
    }
}
