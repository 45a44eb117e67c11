//! Closed-form distances, geodesic points and probes for the analytic backends.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Backend, Location, MetricSpaceSample};

pub(crate) fn plane_dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(&a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Great-circle angle between unit vectors.
pub(crate) fn sphere_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm3(&cross(a, b)).atan2(dot3(a, b))
}

/// Minkowski form `−t₁t₂ + x₁x₂ + y₁y₂`.
fn mink(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn hyperboloid_point(x: f64, y: f64) -> [f64; 3] {
    [(1.0 + x * x + y * y).sqrt(), x, y]
}

pub(crate) fn hyperbolic_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let c = -mink(a, b);
    if c > 2.0 {
        return c.acosh();
    }
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let q = mink(&d, &d).max(0.0);
    2.0 * (0.5 * q.sqrt()).asinh()
}

/// Angular separation on a cone of total angle `total`, in `[0, total/2]`.
pub(crate) fn cone_separation(total: f64, t1: f64, t2: f64) -> f64 {
    let d = (t1 - t2).rem_euclid(total);
    d.min(total - d)
}

pub(crate) fn cone_dist(total: f64, (r1, t1): (f64, f64), (r2, t2): (f64, f64)) -> f64 {
    let sep = cone_separation(total, t1, t2);
    if sep >= PI {
        r1 + r2
    } else {
        let s = (0.5 * sep).sin();
        ((r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s).sqrt()
    }
}

/// Signed angle from `t1` to `t2` along the shorter way round; exact ties go
/// the positive way.
fn cone_signed(total: f64, t1: f64, t2: f64) -> f64 {
    let d = (t2 - t1).rem_euclid(total);
    if d <= total - d {
        d
    } else {
        d - total
    }
}

/// Point at distance `t` from `x` along the straight line from `x` through
/// `y` in the development of the cone, continued beyond `y`.
fn cone_line_point(total: f64, x: (f64, f64), y: (f64, f64), t: f64) -> Location {
    let (rx, tx) = x;
    let (ry, ty) = y;
    if rx <= 0.0 {
        return Location::Cone { r: t, theta: ty };
    }
    if ry <= 0.0 {
        let r = rx - t;
        return if r >= 0.0 {
            Location::Cone { r, theta: tx }
        } else {
            Location::Cone {
                r: -r,
                theta: (tx + 0.5 * total).rem_euclid(total),
            }
        };
    }
    let delta = cone_signed(total, tx, ty);
    let p0 = [rx, 0.0];
    let p1 = [ry * delta.cos(), ry * delta.sin()];
    let len = plane_dist(&p0, &p1);
    if len == 0.0 {
        return Location::Cone { r: rx, theta: tx };
    }
    let p = [
        p0[0] + t * (p1[0] - p0[0]) / len,
        p0[1] + t * (p1[1] - p0[1]) / len,
    ];
    let r = p[0].hypot(p[1]);
    let theta = if r == 0.0 {
        0.0
    } else {
        (tx + p[1].atan2(p[0])).rem_euclid(total)
    };
    Location::Cone { r, theta }
}

fn sphere_tangent(x: &[f64; 3], y: &[f64; 3]) -> Option<[f64; 3]> {
    let c = dot3(x, y);
    let w = [y[0] - c * x[0], y[1] - c * x[1], y[2] - c * x[2]];
    let n = norm3(&w);
    (n > 1e-300).then(|| [w[0] / n, w[1] / n, w[2] / n])
}

fn hyperbolic_tangent(x: &[f64; 3], y: &[f64; 3]) -> Option<[f64; 3]> {
    let c = -mink(x, y);
    let w = [y[0] - c * x[0], y[1] - c * x[1], y[2] - c * x[2]];
    let n = mink(&w, &w);
    (n > 1e-300).then(|| {
        let n = n.sqrt();
        [w[0] / n, w[1] / n, w[2] / n]
    })
}

fn hyperbolic_along(x: &[f64; 3], u: &[f64; 3], t: f64) -> [f64; 3] {
    let (c, s) = (t.cosh(), t.sinh());
    let p = [
        c * x[0] + s * u[0],
        c * x[1] + s * u[1],
        c * x[2] + s * u[2],
    ];
    hyperboloid_point(p[1], p[2])
}

fn sphere_along(x: &[f64; 3], u: &[f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    normalize3([
        c * x[0] + s * u[0],
        c * x[1] + s * u[1],
        c * x[2] + s * u[2],
    ])
}

/// Point at distance `t` from `x` on the geodesic segment `[x y]`, which is
/// assumed to be a single piece (no graph node or cone apex inside).
pub(crate) fn segment_point(
    space: &MetricSpaceSample,
    x: &Location,
    y: &Location,
    t: f64,
) -> Location {
    if t <= 0.0 {
        return x.clone();
    }
    match (&space.backend, x, y) {
        (Backend::Graph { graph }, Location::Graph(a), Location::Graph(b)) => {
            Location::Graph(graph.interpolate(a, b, t))
        }
        (Backend::Matrix, _, _) => x.clone(),
        _ => extend(space, x, y, t).unwrap_or_else(|| x.clone()),
    }
}

/// Geodesic through `x` and `y`, at arclength `t` from `x`.
pub(crate) fn extend(
    space: &MetricSpaceSample,
    x: &Location,
    y: &Location,
    t: f64,
) -> Option<Location> {
    match (&space.backend, x, y) {
        (Backend::Euclidean { .. }, Location::Plane(a), Location::Plane(b)) => {
            let len = plane_dist(a, b);
            (len > 0.0).then(|| {
                Location::Plane([
                    a[0] + t * (b[0] - a[0]) / len,
                    a[1] + t * (b[1] - a[1]) / len,
                ])
            })
        }
        (Backend::Sphere { radius, .. }, Location::Sphere(a), Location::Sphere(b)) => {
            let u = sphere_tangent(a, b)?;
            Some(Location::Sphere(sphere_along(a, &u, t / radius)))
        }
        (Backend::Hyperbolic, Location::Hyperboloid(a), Location::Hyperboloid(b)) => {
            let u = hyperbolic_tangent(a, b)?;
            Some(Location::Hyperboloid(hyperbolic_along(a, &u, t)))
        }
        (
            Backend::Cone { total_angle },
            Location::Cone { r: r1, theta: t1 },
            Location::Cone { r: r2, theta: t2 },
        ) => Some(cone_line_point(*total_angle, (*r1, *t1), (*r2, *t2), t)),
        _ => None,
    }
}

/// Interior breakpoints of the chosen geodesic `[x y]` (graph nodes, cone apex).
pub(crate) fn breakpoints(space: &MetricSpaceSample, x: &Location, y: &Location) -> Vec<Location> {
    match (&space.backend, x, y) {
        (Backend::Graph { graph }, Location::Graph(a), Location::Graph(b)) => graph
            .breakpoints(a, b)
            .into_iter()
            .map(Location::Graph)
            .collect(),
        (
            Backend::Cone { total_angle },
            Location::Cone { r: r1, theta: t1 },
            Location::Cone { r: r2, theta: t2 },
        ) if *r1 > 0.0 && *r2 > 0.0 && cone_separation(*total_angle, *t1, *t2) >= PI => {
            vec![x.clone(), Location::Cone { r: 0.0, theta: 0.0 }, y.clone()]
        }
        _ => vec![x.clone(), y.clone()],
    }
}

/// Sphere geodesics are ambiguous between antipodal points.
pub(crate) fn is_antipodal(space: &MetricSpaceSample, x: &Location, y: &Location) -> bool {
    match (x, y) {
        (Location::Sphere(a), Location::Sphere(b))
            if matches!(space.backend, Backend::Sphere { .. }) =>
        {
            sphere_angle(a, b) > PI - 1e-9
        }
        _ => false,
    }
}

fn tangent_frame_sphere(c: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if c[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e1 = normalize3(cross(&helper, c));
    let e2 = cross(c, &e1);
    (e1, e2)
}

fn tangent_frame_hyperbolic(c: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let project = |v: [f64; 3]| {
        let k = mink(&v, c);
        [v[0] + k * c[0], v[1] + k * c[1], v[2] + k * c[2]]
    };
    let unit = |v: [f64; 3]| {
        let n = mink(&v, &v).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let e1 = unit(project([0.0, 1.0, 0.0]));
    let v = project([0.0, 0.0, 1.0]);
    let k = mink(&v, &e1);
    let e2 = unit([v[0] - k * e1[0], v[1] - k * e1[1], v[2] - k * e1[2]]);
    (e1, e2)
}

/// Candidate point at distance `s` from `center` in direction `phi`.
fn exp_map(space: &MetricSpaceSample, center: &Location, s: f64, phi: f64) -> Option<Location> {
    let (sp, cp) = phi.sin_cos();
    match (&space.backend, center) {
        (Backend::Euclidean { .. }, Location::Plane(c)) => {
            Some(Location::Plane([c[0] + s * cp, c[1] + s * sp]))
        }
        (Backend::Sphere { radius, .. }, Location::Sphere(c)) => {
            let (e1, e2) = tangent_frame_sphere(c);
            let u = [
                cp * e1[0] + sp * e2[0],
                cp * e1[1] + sp * e2[1],
                cp * e1[2] + sp * e2[2],
            ];
            Some(Location::Sphere(sphere_along(c, &u, s / radius)))
        }
        (Backend::Hyperbolic, Location::Hyperboloid(c)) => {
            let (e1, e2) = tangent_frame_hyperbolic(c);
            let u = [
                cp * e1[0] + sp * e2[0],
                cp * e1[1] + sp * e2[1],
                cp * e1[2] + sp * e2[2],
            ];
            Some(Location::Hyperboloid(hyperbolic_along(c, &u, s)))
        }
        (Backend::Cone { total_angle }, Location::Cone { r, theta }) => {
            if *r <= 0.0 {
                return Some(Location::Cone {
                    r: s,
                    theta: (phi / TAU * total_angle).rem_euclid(*total_angle),
                });
            }
            let p = [r + s * cp, s * sp];
            let rr = p[0].hypot(p[1]);
            Some(Location::Cone {
                r: rr,
                theta: (theta + p[1].atan2(p[0])).rem_euclid(*total_angle),
            })
        }
        _ => None,
    }
}

pub(crate) fn probe_ball(
    space: &MetricSpaceSample,
    center: &Location,
    radius: f64,
    count: usize,
    seed: u64,
) -> Vec<Location> {
    match (&space.backend, center) {
        (Backend::Matrix, _) => Vec::new(),
        (Backend::Graph { graph }, Location::Graph(c)) => graph
            .ball_points(c, radius)
            .into_iter()
            .map(Location::Graph)
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            let mut attempts = 0;
            while out.len() < count && attempts < 50 * count.max(1) {
                attempts += 1;
                let s = radius * rng.gen::<f64>().sqrt() * 0.999;
                let phi = rng.gen::<f64>() * TAU;
                if let Some(p) = exp_map(space, center, s, phi) {
                    if space.contains(&p) && space.dist(center, &p) < radius {
                        out.push(p);
                    }
                }
            }
            out
        }
    }
}
