//! Finite samples of geodesic spaces.
//!
//! A [`MetricSpaceSample`] is a list of identified points with a validated
//! distance matrix. Samples produced by [`generate_space`] also keep an
//! analytic backend, so distances and geodesics can be evaluated at points
//! that are not part of the sample (probe points, interior points of
//! geodesics).

mod analytic;
mod generate;
mod geodesic;
mod graph;
mod matrix;
mod spec;

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Constraint, Error, MatrixViolation, Result};

pub use generate::{completion, generate_space};
pub use geodesic::{geodesic, DiscreteGeodesic, DEFAULT_RESOLUTION};
pub use graph::{GraphEdge, GraphPos, MetricGraph};
pub use matrix::{
    load_distance_matrix, parse_distance_matrix, write_distance_matrix, DEFAULT_INPUT_TOLERANCE,
};
pub use spec::{SpaceKind, SpaceSpec, Variant};

/// Tolerance for the metric axioms on analytic samples.
pub const ANALYTIC_TOLERANCE: f64 = 1e-9;

/// A point of some backend geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Location {
    Plane([f64; 2]),
    /// Unit vector; the sphere radius lives in the backend.
    Sphere([f64; 3]),
    /// Hyperboloid model `t² − x² − y² = 1`, stored as `[t, x, y]`.
    Hyperboloid([f64; 3]),
    /// Polar coordinates on a cone, `theta ∈ [0, total_angle)`.
    Cone {
        r: f64,
        theta: f64,
    },
    Graph(GraphPos),
    /// Row of a distance matrix.
    Index(usize),
}

impl Location {
    fn rank(&self) -> u8 {
        match self {
            Location::Plane(_) => 0,
            Location::Sphere(_) => 1,
            Location::Hyperboloid(_) => 2,
            Location::Cone { .. } => 3,
            Location::Graph(_) => 4,
            Location::Index(_) => 5,
        }
    }

    fn coords(&self) -> Vec<f64> {
        match self {
            Location::Plane(p) => p.to_vec(),
            Location::Sphere(p) | Location::Hyperboloid(p) => p.to_vec(),
            Location::Cone { r, theta } => vec![*r, *theta],
            Location::Graph(GraphPos::Node(u)) => vec![*u as f64, -1.0],
            Location::Graph(GraphPos::Edge { edge, offset }) => vec![*edge as f64, *offset],
            Location::Index(i) => vec![*i as f64],
        }
    }

    /// Total order used to orient geodesic computations canonically.
    pub fn canonical_cmp(&self, other: &Location) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| {
            for (a, b) in self.coords().iter().zip(other.coords()) {
                match a.total_cmp(&b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

/// Geometry behind a sample.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Backend {
    /// The Euclidean plane, or the closed unit disk when `disk` is set.
    Euclidean {
        disk: bool,
    },
    /// Round sphere, or its upper hemisphere.
    Sphere {
        radius: f64,
        hemisphere: bool,
    },
    /// Hyperbolic plane of curvature −1.
    Hyperbolic,
    /// Flat cone over a circle of length `total_angle`.
    Cone {
        total_angle: f64,
    },
    Graph {
        graph: Arc<MetricGraph>,
    },
    /// Only the distance matrix is known.
    Matrix,
}

impl Backend {
    pub fn is_analytic(&self) -> bool {
        !matches!(self, Backend::Matrix)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Euclidean { .. } => "analytic-euclidean",
            Backend::Sphere { .. } => "analytic-sphere",
            Backend::Hyperbolic => "analytic-hyperbolic",
            Backend::Cone { .. } => "analytic-cone",
            Backend::Graph { .. } => "graph",
            Backend::Matrix => "matrix-only",
        }
    }
}

/// Whether a point belongs to the original space or was added by completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointTag {
    Original,
    CompletionPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub id: String,
    pub location: Location,
    pub tag: PointTag,
}

/// A finite sample with validated distances.
#[derive(Debug, Clone, Serialize)]
pub struct MetricSpaceSample {
    pub label: String,
    pub backend: Backend,
    pub variant: Variant,
    pub points: Vec<SamplePoint>,
    distances: Vec<f64>,
    /// Neighborhood radius of the ε-graph used for matrix-only geodesics.
    pub neighborhood_radius: Option<f64>,
    /// Tolerance the metric axioms were validated at.
    pub tolerance: f64,
}

impl MetricSpaceSample {
    /// Builds a sample on an analytic or graph backend, computing all distances.
    pub fn from_points(
        label: impl Into<String>,
        backend: Backend,
        variant: Variant,
        points: Vec<SamplePoint>,
    ) -> Self {
        let mut sample = MetricSpaceSample {
            label: label.into(),
            backend,
            variant,
            points,
            distances: Vec::new(),
            neighborhood_radius: None,
            tolerance: ANALYTIC_TOLERANCE,
        };
        let n = sample.points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = sample.dist(&sample.points[i].location, &sample.points[j].location);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        sample.distances = d;
        sample
    }

    pub(crate) fn from_matrix(
        label: String,
        ids: Vec<String>,
        distances: Vec<f64>,
        tolerance: f64,
    ) -> Self {
        let points = ids
            .into_iter()
            .enumerate()
            .map(|(i, id)| SamplePoint {
                id,
                location: Location::Index(i),
                tag: PointTag::Original,
            })
            .collect();
        MetricSpaceSample {
            label,
            backend: Backend::Matrix,
            variant: Variant::Complete,
            points,
            distances,
            neighborhood_radius: None,
            tolerance,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.points[i].id
    }

    pub fn location(&self, i: usize) -> &Location {
        &self.points[i].location
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Distance between sample points `i` and `j`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.points.len() + j]
    }

    pub fn distance_matrix(&self) -> &[f64] {
        &self.distances
    }

    /// Distance between arbitrary locations of the backend.
    pub fn dist(&self, x: &Location, y: &Location) -> f64 {
        match (&self.backend, x, y) {
            (Backend::Euclidean { .. }, Location::Plane(a), Location::Plane(b)) => {
                analytic::plane_dist(a, b)
            }
            (Backend::Sphere { radius, .. }, Location::Sphere(a), Location::Sphere(b)) => {
                radius * analytic::sphere_angle(a, b)
            }
            (Backend::Hyperbolic, Location::Hyperboloid(a), Location::Hyperboloid(b)) => {
                analytic::hyperbolic_dist(a, b)
            }
            (
                Backend::Cone { total_angle },
                Location::Cone { r: r1, theta: t1 },
                Location::Cone { r: r2, theta: t2 },
            ) => analytic::cone_dist(*total_angle, (*r1, *t1), (*r2, *t2)),
            (Backend::Graph { graph }, Location::Graph(a), Location::Graph(b)) => graph.dist(a, b),
            (Backend::Matrix, Location::Index(i), Location::Index(j)) => self.d(*i, *j),
            _ => f64::NAN,
        }
    }

    /// Whether `x` lies in the space (not just in its completion).
    pub fn contains(&self, x: &Location) -> bool {
        let incomplete = self.variant == Variant::Incomplete;
        match (&self.backend, x) {
            (Backend::Euclidean { disk }, Location::Plane(p)) => {
                let r = p[0].hypot(p[1]);
                if *disk {
                    r <= 1.0 + 1e-12 && !(incomplete && r <= 1e-12)
                } else {
                    true
                }
            }
            (Backend::Sphere { hemisphere, .. }, Location::Sphere(p)) => {
                if !hemisphere {
                    true
                } else if incomplete {
                    p[2] > 1e-12
                } else {
                    p[2] >= -1e-12
                }
            }
            (Backend::Hyperbolic, Location::Hyperboloid(_)) => true,
            (Backend::Cone { .. }, Location::Cone { r, .. }) => !(incomplete && *r <= 1e-12),
            (Backend::Graph { .. }, Location::Graph(_)) => true,
            (Backend::Matrix, Location::Index(i)) => *i < self.len(),
            _ => false,
        }
    }

    /// Sectional curvature scale of the backend (used in error bounds).
    pub fn curvature_scale(&self) -> f64 {
        match &self.backend {
            Backend::Sphere { radius, .. } => 1.0 / (radius * radius),
            Backend::Hyperbolic => 1.0,
            _ => 0.0,
        }
    }

    /// A new sample on the same backend consisting of the given points.
    pub fn subsample(&self, label: impl Into<String>, points: Vec<SamplePoint>) -> Self {
        if let Backend::Matrix = self.backend {
            let n = points.len();
            let idx: Vec<usize> = points
                .iter()
                .map(|p| match p.location {
                    Location::Index(i) => i,
                    _ => usize::MAX,
                })
                .collect();
            let mut d = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    d[a * n + b] = self.d(idx[a], idx[b]);
                }
            }
            let mut out = MetricSpaceSample {
                label: label.into(),
                backend: Backend::Matrix,
                variant: self.variant,
                points,
                distances: d,
                neighborhood_radius: self.neighborhood_radius,
                tolerance: self.tolerance,
            };
            // re-index into the new matrix
            for (k, p) in out.points.iter_mut().enumerate() {
                p.location = Location::Index(k);
            }
            return out;
        }
        let mut s =
            MetricSpaceSample::from_points(label, self.backend.clone(), self.variant, points);
        s.neighborhood_radius = self.neighborhood_radius;
        s
    }

    /// Checks symmetry, the zero diagonal, positivity and the triangle
    /// inequality, reporting the first witness for each failed constraint.
    pub fn validate(&self) -> Result<()> {
        let ids: Vec<String> = self.points.iter().map(|p| p.id.clone()).collect();
        let violations = validate_matrix(&ids, &self.distances, self.tolerance);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMatrix(violations))
        }
    }

    /// Ids of the points whose tag is [`PointTag::CompletionPoint`].
    pub fn completion_points(&self) -> Vec<&str> {
        self.points
            .iter()
            .filter(|p| p.tag == PointTag::CompletionPoint)
            .map(|p| p.id.as_str())
            .collect()
    }

    /// Random points of the space within distance `< radius` of `center`.
    ///
    /// Empty for matrix-only samples. Deterministic in `seed`.
    pub fn probe_ball(
        &self,
        center: &Location,
        radius: f64,
        count: usize,
        seed: u64,
    ) -> Vec<Location> {
        analytic::probe_ball(self, center, radius, count, seed)
    }

    /// The point at distance `t` from `x` along the geodesic through `x` and
    /// `y`, continued past `y` when `t > |xy|`. `None` when the backend cannot
    /// extend geodesics.
    pub fn extend(&self, x: &Location, y: &Location, t: f64) -> Option<Location> {
        analytic::extend(self, x, y, t)
    }

    pub(crate) fn segment_point(&self, x: &Location, y: &Location, t: f64) -> Location {
        analytic::segment_point(self, x, y, t)
    }
}

/// Validates a square distance matrix. Returns the first witness of every
/// violated constraint, in a fixed constraint order.
pub(crate) fn validate_matrix(ids: &[String], d: &[f64], tol: f64) -> Vec<MatrixViolation> {
    let n = ids.len();
    let mut out = Vec::new();
    if d.len() != n * n {
        out.push(MatrixViolation {
            constraint: Constraint::Shape,
            witness: vec![],
            detail: format!("expected {}x{} entries, found {}", n, n, d.len()),
        });
        return out;
    }
    let at = |i: usize, j: usize| d[i * n + j];
    let pair = |i: usize, j: usize| vec![ids[i].clone(), ids[j].clone()];
    let mut push_first = |constraint: Constraint, found: Option<(Vec<String>, String)>| {
        if let Some((witness, detail)) = found {
            out.push(MatrixViolation {
                constraint,
                witness,
                detail,
            });
        }
    };
    let all_pairs = || (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)));
    push_first(
        Constraint::NonFinite,
        all_pairs()
            .find(|&(i, j)| !at(i, j).is_finite())
            .map(|(i, j)| (pair(i, j), format!("entry {}", at(i, j)))),
    );
    push_first(
        Constraint::Negative,
        all_pairs()
            .find(|&(i, j)| at(i, j) < 0.0)
            .map(|(i, j)| (pair(i, j), format!("entry {}", at(i, j)))),
    );
    push_first(
        Constraint::Diagonal,
        (0..n)
            .find(|&i| at(i, i).abs() > tol)
            .map(|i| (vec![ids[i].clone()], format!("diagonal {}", at(i, i)))),
    );
    push_first(
        Constraint::Asymmetry,
        all_pairs()
            .find(|&(i, j)| i < j && (at(i, j) - at(j, i)).abs() > tol)
            .map(|(i, j)| (pair(i, j), format!("{} vs {}", at(i, j), at(j, i)))),
    );
    push_first(
        Constraint::Coincident,
        all_pairs()
            .find(|&(i, j)| i < j && at(i, j) <= 0.0)
            .map(|(i, j)| (pair(i, j), "distinct points at distance 0".to_string())),
    );
    let mut triangle = None;
    'outer: for x in 0..n {
        for z in 0..n {
            for y in 0..n {
                if x == z || y == x || y == z {
                    continue;
                }
                let (dxz, dxy, dyz) = (at(x, z), at(x, y), at(y, z));
                if dxz > dxy + dyz + tol * (1.0 + dxz) {
                    triangle = Some((
                        vec![ids[x].clone(), ids[y].clone(), ids[z].clone()],
                        format!("d(x,z) = {dxz} > d(x,y) + d(y,z) = {}", dxy + dyz),
                    ));
                    break 'outer;
                }
            }
        }
    }
    push_first(Constraint::TriangleInequality, triangle);
    out
}
