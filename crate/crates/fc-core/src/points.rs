//! Planar point domain: points, quadrants, Minkowski metrics, staircases,
//! point-file ingestion, and the brute-force oracles the test suites check
//! the maintained structures against.

use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate must be finite, got {0}")]
    NonFiniteCoordinate(f64),
    #[error("point id {0} already present")]
    DuplicatePointId(u64),
    #[error("no point with id {0}")]
    UnknownPointId(u64),
    #[error("metric order must satisfy p >= 1, got {0}")]
    InvalidMetricOrder(f64),
}

pub type PointId = u64;

/// A planar point with a unique tag. Coordinates are finite by construction
/// (`-0.0` normalized to `+0.0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    id: PointId,
    x: f64,
    y: f64,
}

impl Point {
    pub fn new(id: PointId, x: f64, y: f64) -> Result<Self, GeometryError> {
        for c in [x, y] {
            if !c.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate(c));
            }
        }
        Ok(Point {
            id,
            x: if x == 0.0 { 0.0 } else { x },
            y: if y == 0.0 { 0.0 } else { y },
        })
    }

    pub fn id(&self) -> PointId {
        self.id
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn xy(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

/// Quadrant relative to a query point; closed boundaries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Quadrant {
    NorthEast,
    NorthWest,
    SouthWest,
    SouthEast,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::NorthEast,
        Quadrant::NorthWest,
        Quadrant::SouthWest,
        Quadrant::SouthEast,
    ];

    /// Coordinate reflections mapping this quadrant onto the south-west
    /// convention: `(flip_x, flip_y)`.
    pub(crate) fn flips(self) -> (bool, bool) {
        match self {
            Quadrant::SouthWest => (false, false),
            Quadrant::SouthEast => (true, false),
            Quadrant::NorthWest => (false, true),
            Quadrant::NorthEast => (true, true),
        }
    }

    pub fn contains(self, q: (f64, f64), p: (f64, f64)) -> bool {
        let (fx, fy) = self.flips();
        let x_ok = if fx { p.0 >= q.0 } else { p.0 <= q.0 };
        let y_ok = if fy { p.1 >= q.1 } else { p.1 <= q.1 };
        x_ok && y_ok
    }
}

/// Minkowski metric of order `p` in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric(f64);

impl Metric {
    pub const L1: Metric = Metric(1.0);
    pub const L2: Metric = Metric(2.0);
    pub const L_INF: Metric = Metric(f64::INFINITY);

    pub fn minkowski(p: f64) -> Result<Self, GeometryError> {
        if p.is_nan() || p < 1.0 {
            return Err(GeometryError::InvalidMetricOrder(p));
        }
        Ok(Metric(p))
    }

    pub fn order(self) -> f64 {
        self.0
    }

    pub fn distance(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let dx = (a.0 - b.0).abs();
        let dy = (a.1 - b.1).abs();
        if self.0 == 1.0 {
            dx + dy
        } else if self.0 == 2.0 {
            (dx * dx + dy * dy).sqrt()
        } else if self.0.is_infinite() {
            dx.max(dy)
        } else {
            (dx.powf(self.0) + dy.powf(self.0)).powf(1.0 / self.0)
        }
    }
}

/// The non-dominated points of one quadrant of a query: walked in staircase
/// order, x strictly advancing toward the query and y strictly receding
/// (after reflection to the south-west convention).
#[derive(Clone, Debug, PartialEq)]
pub struct Staircase {
    quadrant: Quadrant,
    points: Vec<Point>,
}

impl Staircase {
    pub(crate) fn new(quadrant: Quadrant, points: Vec<Point>) -> Self {
        Staircase { quadrant, points }
    }

    pub fn quadrant(&self) -> Quadrant {
        self.quadrant
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Structural check: all points inside the quadrant, x strictly
    /// increasing and y strictly decreasing in view coordinates.
    pub fn well_formed(&self, q: (f64, f64)) -> bool {
        let (fx, fy) = self.quadrant.flips();
        let vx = |p: &Point| if fx { -p.x } else { p.x };
        let vy = |p: &Point| if fy { -p.y } else { p.y };
        self.points
            .iter()
            .all(|p| self.quadrant.contains(q, p.xy()))
            && self
                .points
                .windows(2)
                .all(|w| vx(&w[0]) < vx(&w[1]) && vy(&w[0]) > vy(&w[1]))
    }
}

/// Does `p` dominate `s` toward the corner of `quad`? Coordinate-wise at
/// least as close on both axes; coincident points are ordered by id so that
/// exactly one of them survives as a maximum (the smallest id).
pub fn dominates(quad: Quadrant, p: &Point, s: &Point) -> bool {
    let (fx, fy) = quad.flips();
    let vx = |pt: &Point| if fx { -pt.x } else { pt.x };
    let vy = |pt: &Point| if fy { -pt.y } else { pt.y };
    if vx(p) < vx(s) || vy(p) < vy(s) {
        return false;
    }
    if p.x == s.x && p.y == s.y {
        p.id < s.id
    } else {
        true
    }
}

/// Brute-force dominated-maxima oracle: quadratic dominance test over the
/// points inside the quadrant, sorted into staircase order.
pub fn staircase_oracle(points: &[Point], q: (f64, f64), quad: Quadrant) -> Vec<Point> {
    let inside: Vec<&Point> = points.iter().filter(|p| quad.contains(q, p.xy())).collect();
    let mut maxima: Vec<Point> = inside
        .iter()
        .filter(|s| !inside.iter().any(|p| p.id != s.id && dominates(quad, p, s)))
        .map(|p| **p)
        .collect();
    let (fx, _) = quad.flips();
    maxima.sort_by(|a, b| {
        let (ax, bx) = if fx { (-a.x, -b.x) } else { (a.x, b.x) };
        ax.total_cmp(&bx)
    });
    maxima
}

/// Linear-scan nearest-neighbor oracle; ties broken by smallest id.
pub fn nn_oracle(points: &[Point], q: (f64, f64), metric: Metric) -> Option<Point> {
    points
        .iter()
        .min_by(|a, b| {
            metric
                .distance(q, a.xy())
                .total_cmp(&metric.distance(q, b.xy()))
                .then(a.id.cmp(&b.id))
        })
        .copied()
}

#[derive(Debug, Error)]
pub enum PointFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Loads points from `x,y` lines (decimal doubles). `#` comments and blank
/// lines are skipped; ids are assigned by point order starting at 0.
pub fn load_points<R: BufRead>(reader: R) -> Result<Vec<Point>, PointFileError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split(',');
        let mut coord = |name: &str| -> Result<f64, PointFileError> {
            let tok = parts
                .next()
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .ok_or_else(|| PointFileError::Parse {
                    line: line_no,
                    msg: format!("missing {name} coordinate"),
                })?;
            tok.parse::<f64>().map_err(|e| PointFileError::Parse {
                line: line_no,
                msg: format!("bad {name} coordinate {tok:?}: {e}"),
            })
        };
        let x = coord("x")?;
        let y = coord("y")?;
        if parts.next().is_some() {
            return Err(PointFileError::Parse {
                line: line_no,
                msg: "expected exactly two comma-separated coordinates".into(),
            });
        }
        let id = out.len() as u64;
        out.push(Point::new(id, x, y).map_err(|e| PointFileError::Parse {
            line: line_no,
            msg: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn load_points_path(path: impl AsRef<Path>) -> Result<Vec<Point>, PointFileError> {
    let file = std::fs::File::open(path)?;
    load_points(io::BufReader::new(file))
}

pub fn write_points<W: Write>(points: &[Point], mut w: W) -> io::Result<()> {
    for p in points {
        writeln!(w, "{},{}", p.x(), p.y())?;
    }
    Ok(())
}
