use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::analytic;
use super::{Backend, Location, MetricSpaceSample};
use crate::error::{Error, Result};

/// An ordered vertex list approximating a minimizing geodesic.
///
/// `params[i]` is the arclength of `vertices[i]` from the start. On analytic
/// and graph backends the vertices lie exactly on the geodesic and points in
/// between are evaluated in closed form (`continuous`); on matrix-only
/// samples only the vertices themselves exist.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteGeodesic {
    pub vertices: Vec<Location>,
    pub params: Vec<f64>,
    /// Distance between the endpoints.
    pub length: f64,
    /// Bound on `|polyline length − length|` and on the parametrization error.
    pub error_bound: f64,
    pub continuous: bool,
}

impl DiscreteGeodesic {
    pub fn start(&self) -> &Location {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Location {
        self.vertices.last().unwrap()
    }

    /// Arclength of the polyline, measured with the space metric.
    pub fn polyline_length(&self, space: &MetricSpaceSample) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| space.dist(&w[0], &w[1]))
            .sum()
    }

    pub fn reversed(&self) -> Self {
        let total = *self.params.last().unwrap();
        DiscreteGeodesic {
            vertices: self.vertices.iter().rev().cloned().collect(),
            params: self.params.iter().rev().map(|t| total - t).collect(),
            length: self.length,
            error_bound: self.error_bound,
            continuous: self.continuous,
        }
    }

    /// Index of the segment `[params[i], params[i+1]]` containing `t`.
    fn segment_index(&self, t: f64) -> usize {
        let k = self.params.partition_point(|&p| p <= t);
        k.saturating_sub(1).min(self.params.len().saturating_sub(2))
    }

    /// Index of the first vertex with parameter `≥ t` (the last one if none).
    pub fn vertex_at_or_after(&self, t: f64) -> usize {
        self.params
            .iter()
            .position(|&p| p >= t - 1e-12)
            .unwrap_or(self.params.len() - 1)
    }

    /// The point of the geodesic at arclength `t` from the start.
    ///
    /// On matrix-only samples this is the first vertex at or beyond `t`.
    pub fn point_at(&self, space: &MetricSpaceSample, t: f64) -> Location {
        let total = *self.params.last().unwrap();
        let t = t.clamp(0.0, total);
        if !self.continuous {
            return self.vertices[self.vertex_at_or_after(t)].clone();
        }
        if self.vertices.len() == 1 {
            return self.vertices[0].clone();
        }
        let i = self.segment_index(t);
        let local = t - self.params[i];
        if local <= 0.0 {
            return self.vertices[i].clone();
        }
        if t >= self.params[i + 1] {
            return self.vertices[i + 1].clone();
        }
        space.segment_point(&self.vertices[i], &self.vertices[i + 1], local)
    }

    /// The sub-geodesic between parameters `t0 < t1`.
    pub fn restrict(&self, space: &MetricSpaceSample, t0: f64, t1: f64) -> Self {
        let total = *self.params.last().unwrap();
        let (t0, t1) = (t0.clamp(0.0, total), t1.clamp(0.0, total));
        if !self.continuous {
            let i0 = self.vertex_at_or_after(t0);
            let i1 = self.vertex_at_or_after(t1).max(i0);
            let base = self.params[i0];
            return DiscreteGeodesic {
                vertices: self.vertices[i0..=i1].to_vec(),
                params: self.params[i0..=i1].iter().map(|p| p - base).collect(),
                length: space.dist(&self.vertices[i0], &self.vertices[i1]),
                error_bound: self.error_bound,
                continuous: false,
            };
        }
        let mut vertices = vec![self.point_at(space, t0)];
        let mut params = vec![0.0];
        for (v, &p) in self.vertices.iter().zip(&self.params) {
            if p > t0 + 1e-12 && p < t1 - 1e-12 {
                vertices.push(v.clone());
                params.push(p - t0);
            }
        }
        if t1 > t0 {
            vertices.push(self.point_at(space, t1));
            params.push(t1 - t0);
        }
        DiscreteGeodesic {
            length: space.dist(&vertices[0], vertices.last().unwrap()),
            vertices,
            params,
            error_bound: self.error_bound,
            continuous: true,
        }
    }
}

/// Default sampling resolution of geodesic vertex lists.
pub const DEFAULT_RESOLUTION: f64 = 0.02;

/// Chooses a geodesic from `x` to `y`.
///
/// The choice is deterministic: the geodesic is computed from the smaller of
/// the two endpoints (in [`Location::canonical_cmp`] order) and reversed if
/// needed, so `geodesic(x, y)` and `geodesic(y, x)` share their vertices.
pub fn geodesic(
    space: &MetricSpaceSample,
    x: &Location,
    y: &Location,
    resolution: f64,
) -> Result<DiscreteGeodesic> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if !space.contains(x) || !space.contains(y) {
        return Err(Error::InvalidParameter("endpoint outside the space".into()));
    }
    if space.dist(x, y) <= 0.0 {
        return Err(Error::InvalidParameter(
            "geodesic endpoints coincide".into(),
        ));
    }
    if x.canonical_cmp(y) == Ordering::Greater {
        return Ok(oriented(space, y, x, resolution)?.reversed());
    }
    oriented(space, x, y, resolution)
}

fn describe(x: &Location) -> String {
    serde_json::to_string(x).unwrap_or_default()
}

fn oriented(
    space: &MetricSpaceSample,
    x: &Location,
    y: &Location,
    resolution: f64,
) -> Result<DiscreteGeodesic> {
    let length = space.dist(x, y);
    if let Backend::Matrix = space.backend {
        return neighborhood_path(space, x, y, length);
    }
    if analytic::is_antipodal(space, x, y) {
        return Err(Error::NoGeodesic {
            from: describe(x),
            to: describe(y),
            reason: "antipodal points are joined by many geodesics".into(),
        });
    }
    let corners = analytic::breakpoints(space, x, y);
    let mut vertices = vec![corners[0].clone()];
    let mut params = vec![0.0];
    for w in corners.windows(2) {
        let piece = space.dist(&w[0], &w[1]);
        let parts = (piece / resolution).ceil().max(1.0) as usize;
        let base = *params.last().unwrap();
        for k in 1..=parts {
            let t = piece * k as f64 / parts as f64;
            let v = if k == parts {
                w[1].clone()
            } else {
                space.segment_point(&w[0], &w[1], t)
            };
            vertices.push(v);
            params.push(base + t);
        }
    }
    if let Some(bad) = vertices.iter().find(|v| !space.contains(v)) {
        return Err(Error::NoGeodesic {
            from: describe(x),
            to: describe(y),
            reason: format!("the shortest path leaves the space at {}", describe(bad)),
        });
    }
    let mut g = DiscreteGeodesic {
        vertices,
        params,
        length,
        error_bound: 0.0,
        continuous: true,
    };
    let poly = g.polyline_length(space);
    let mut worst: f64 = (poly - length).abs();
    for (v, &p) in g.vertices.iter().zip(&g.params) {
        worst = worst.max((space.dist(x, v) - p).abs());
    }
    g.error_bound = worst.max(64.0 * f64::EPSILON * (1.0 + length));
    Ok(g)
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Default ε of the neighborhood graph: twice the median nearest-neighbor
/// distance.
pub(crate) fn default_neighborhood_radius(space: &MetricSpaceSample) -> f64 {
    let n = space.len();
    let mut nn: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| space.d(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    2.0 * nn[n / 2]
}

/// Shortest path in the ε-neighborhood graph of a matrix-only sample.
fn neighborhood_path(
    space: &MetricSpaceSample,
    x: &Location,
    y: &Location,
    length: f64,
) -> Result<DiscreteGeodesic> {
    let (Location::Index(src), Location::Index(dst)) = (x, y) else {
        return Err(Error::InvalidParameter(
            "matrix samples use index locations".into(),
        ));
    };
    let (src, dst) = (*src, *dst);
    let n = space.len();
    let eps = space
        .neighborhood_radius
        .unwrap_or_else(|| default_neighborhood_radius(space));
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut hops = vec![usize::MAX; n];
    dist[src] = 0.0;
    hops[src] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, src));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for v in 0..n {
            if hops[u] >= n {
                break;
            }
            let w = space.d(u, v);
            if v == u || w > eps {
                continue;
            }
            let nd = d + w;
            // prefer more hops on ties (finer polylines), then smaller ids
            let better = nd < dist[v] - 1e-15
                || ((nd - dist[v]).abs() <= 1e-15
                    && (hops[u] + 1 > hops[v]
                        || (hops[u] + 1 == hops[v] && space.id(u) < space.id(pred[v]))));
            if better {
                dist[v] = nd;
                pred[v] = u;
                hops[v] = hops[u] + 1;
                heap.push(Item(nd, v));
            }
        }
    }
    if dist[dst].is_infinite() {
        return Err(Error::NoGeodesic {
            from: space.id(src).to_string(),
            to: space.id(dst).to_string(),
            reason: format!("disconnected in the neighborhood graph (eps = {eps})"),
        });
    }
    let mut path = vec![dst];
    while *path.last().unwrap() != src {
        path.push(pred[*path.last().unwrap()]);
    }
    path.reverse();
    let mut params = vec![0.0];
    for w in path.windows(2) {
        params.push(params.last().unwrap() + space.d(w[0], w[1]));
    }
    let poly = *params.last().unwrap();
    let mut worst: f64 = poly - length;
    for (&v, &p) in path.iter().zip(&params) {
        worst = worst.max((space.d(src, v) - p).abs());
    }
    Ok(DiscreteGeodesic {
        vertices: path.into_iter().map(Location::Index).collect(),
        params,
        length,
        error_bound: worst.max(0.0),
        continuous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, SpaceKind, SpaceSpec};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sphere() -> MetricSpaceSample {
        generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(4).with_anchors()).unwrap()
    }

    #[test]
    fn meridian_from_pole_to_equator() {
        let s = sphere();
        let pole = Location::Sphere([0.0, 0.0, 1.0]);
        let eq = Location::Sphere([1.0, 0.0, 0.0]);
        let g = geodesic(&s, &pole, &eq, PI / 100.0).unwrap();
        assert!((g.polyline_length(&s) - FRAC_PI_2).abs() < 1e-6);
        assert_eq!(g.vertices.len(), 51);
        for v in &g.vertices {
            let Location::Sphere(p) = v else { panic!() };
            assert!(p[1].abs() < 1e-12, "leaves the meridian plane");
        }
    }

    #[test]
    fn antipodal_points_have_no_geodesic() {
        let s = sphere();
        let n = Location::Sphere([0.0, 0.0, 1.0]);
        let south = Location::Sphere([0.0, 0.0, -1.0]);
        assert!(matches!(
            geodesic(&s, &n, &south, 0.1),
            Err(Error::NoGeodesic { .. })
        ));
    }

    #[test]
    fn straight_segment_in_the_plane() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(4)).unwrap();
        let g = geodesic(
            &s,
            &Location::Plane([0.0, 0.0]),
            &Location::Plane([1.0, 0.0]),
            0.1,
        )
        .unwrap();
        assert!(g.error_bound < 1e-12);
        assert!((g.length - 1.0).abs() < 1e-15);
        let mid = g.point_at(&s, 0.35);
        assert_eq!(mid, Location::Plane([0.35, 0.0]));
    }

    #[test]
    fn invalid_requests() {
        let s = sphere();
        let p = Location::Sphere([0.0, 0.0, 1.0]);
        assert!(matches!(
            geodesic(&s, &p, &p, 0.1),
            Err(Error::InvalidParameter(_))
        ));
        let q = Location::Sphere([1.0, 0.0, 0.0]);
        assert!(matches!(
            geodesic(&s, &p, &q, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn tripod_leaf_to_leaf_passes_hub() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Tripod)).unwrap();
        let a = s.location(s.index_of("leaf1").unwrap()).clone();
        let b = s.location(s.index_of("leaf2").unwrap()).clone();
        let hub = s.location(s.index_of("hub").unwrap()).clone();
        let g = geodesic(&s, &a, &b, 0.1).unwrap();
        assert!((g.length - 2.0).abs() < 1e-15);
        assert!(g.vertices.contains(&hub));
        assert!((g.polyline_length(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cone_minus_apex_lacks_geodesics_through_the_apex() {
        let spec = SpaceSpec::new(SpaceKind::Cone)
            .with_total_angle(2.5 * PI)
            .with_variant(crate::space::Variant::Incomplete);
        let s = generate_space(&spec).unwrap();
        let a = Location::Cone { r: 0.5, theta: 0.0 };
        let b = Location::Cone {
            r: 0.5,
            theta: 1.2 * PI,
        };
        assert!(matches!(
            geodesic(&s, &a, &b, 0.05),
            Err(Error::NoGeodesic { .. })
        ));
        let full =
            generate_space(&spec.clone().with_variant(crate::space::Variant::Complete)).unwrap();
        let g = geodesic(&full, &a, &b, 0.05).unwrap();
        assert!((g.length - 1.0).abs() < 1e-12);
        assert!(g.vertices.contains(&Location::Cone { r: 0.0, theta: 0.0 }));
    }

    #[test]
    fn restriction_is_a_geodesic() {
        let s =
            generate_space(&SpaceSpec::new(SpaceKind::Hyperbolic).with_n(6).with_seed(2)).unwrap();
        let g = geodesic(&s, s.location(0), s.location(1), 0.05).unwrap();
        let sub = g.restrict(&s, 0.2 * g.length, 0.7 * g.length);
        assert!((sub.length - 0.5 * g.length).abs() < 1e-9);
        assert!((sub.polyline_length(&s) - sub.length).abs() <= g.error_bound + 1e-12);
    }
}
