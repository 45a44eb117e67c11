use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::analytic::{hyperboloid_point, normalize3};
use super::{
    Backend, Location, MetricGraph, MetricSpaceSample, PointTag, SamplePoint, SpaceKind, SpaceSpec,
    Variant,
};
use crate::error::{Error, Result};

fn point(id: String, location: Location) -> SamplePoint {
    SamplePoint {
        id,
        location,
        tag: PointTag::Original,
    }
}

fn ids(n: usize) -> impl Fn(usize) -> String {
    let width = n.saturating_sub(1).to_string().len().max(2);
    move |i| format!("p{:0width$}", i, width = width)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Builds the sample described by `spec`.
///
/// All randomness comes from a ChaCha8 stream seeded with `spec.seed`, so a
/// sample is a pure function of its spec. Complete variants of kinds that
/// have an incomplete variant are built as the completion of the incomplete
/// sample with the same seed.
pub fn generate_space(spec: &SpaceSpec) -> Result<MetricSpaceSample> {
    let random_kind = !matches!(spec.kind, SpaceKind::Tripod | SpaceKind::Graph);
    if random_kind && spec.n < 4 {
        return Err(Error::InvalidParameter(format!(
            "point count must be at least 4, got {}",
            spec.n
        )));
    }
    if spec.variant == Variant::Incomplete && !spec.kind.has_incomplete_variant() {
        return Err(Error::InvalidParameter(format!(
            "{:?} has no incomplete variant",
            spec.kind
        )));
    }
    if spec.variant == Variant::Complete && spec.kind.has_incomplete_variant() {
        let open = spec.clone().with_variant(Variant::Incomplete);
        let mut closed = completion(&generate_space(&open)?)?;
        closed.label = spec.to_string();
        return Ok(closed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let id = ids(spec.n);
    let label = spec.to_string();
    let n = spec.n;
    let sample = match spec.kind {
        SpaceKind::Sphere | SpaceKind::Hemisphere => {
            let radius = positive("radius", spec.radius.unwrap_or(1.0))?;
            let hemisphere = spec.kind == SpaceKind::Hemisphere;
            let mut pts = Vec::with_capacity(n);
            if spec.anchors {
                let anchors: &[[f64; 3]] = if hemisphere {
                    &[[0.0, 0.0, 1.0]]
                } else {
                    &[
                        [0.0, 0.0, 1.0],
                        [0.0, 0.0, -1.0],
                        [1.0, 0.0, 0.0],
                        [0.0, 1.0, 0.0],
                        [-1.0, 0.0, 0.0],
                        [0.0, -1.0, 0.0],
                    ]
                };
                pts.extend(anchors.iter().take(n).map(|a| Location::Sphere(*a)));
            }
            while pts.len() < n {
                let u: f64 = rng.gen();
                let z = if hemisphere { 1.0 - u } else { 2.0 * u - 1.0 };
                let phi = rng.gen::<f64>() * TAU;
                let s = (1.0 - z * z).max(0.0).sqrt();
                pts.push(Location::Sphere(normalize3([
                    s * phi.cos(),
                    s * phi.sin(),
                    z,
                ])));
            }
            MetricSpaceSample::from_points(
                label,
                Backend::Sphere { radius, hemisphere },
                spec.variant,
                pts.into_iter()
                    .enumerate()
                    .map(|(i, l)| point(id(i), l))
                    .collect(),
            )
        }
        SpaceKind::Hyperbolic => {
            let extent = positive("extent", spec.extent.unwrap_or(2.0))?;
            let mut pts = Vec::with_capacity(n);
            if spec.anchors {
                pts.push(hyperboloid_point(0.0, 0.0));
                for k in 0..3 {
                    let th = TAU * k as f64 / 3.0;
                    let s = (0.9 * extent).sinh();
                    pts.push(hyperboloid_point(s * th.cos(), s * th.sin()));
                }
                pts.truncate(n);
            }
            while pts.len() < n {
                let u: f64 = rng.gen();
                let r = (1.0 + u * (extent.cosh() - 1.0)).acosh();
                let th = rng.gen::<f64>() * TAU;
                pts.push(hyperboloid_point(r.sinh() * th.cos(), r.sinh() * th.sin()));
            }
            MetricSpaceSample::from_points(
                label,
                Backend::Hyperbolic,
                spec.variant,
                pts.into_iter()
                    .enumerate()
                    .map(|(i, l)| point(id(i), Location::Hyperboloid(l)))
                    .collect(),
            )
        }
        SpaceKind::Cone => {
            let total = positive(
                "total angle",
                spec.total_angle
                    .ok_or_else(|| Error::InvalidParameter("cone needs a total angle".into()))?,
            )?;
            let extent = positive("extent", spec.extent.unwrap_or(1.0))?;
            let mut pts = Vec::with_capacity(n);
            if spec.anchors {
                for k in 0..3.min(n) {
                    pts.push(Location::Cone {
                        r: extent,
                        theta: total * k as f64 / 3.0,
                    });
                }
            }
            while pts.len() < n {
                let r = extent * rng.gen::<f64>().sqrt();
                let theta = total * rng.gen::<f64>();
                if r > 0.0 {
                    pts.push(Location::Cone { r, theta });
                }
            }
            MetricSpaceSample::from_points(
                label,
                Backend::Cone { total_angle: total },
                spec.variant,
                pts.into_iter()
                    .enumerate()
                    .map(|(i, l)| point(id(i), l))
                    .collect(),
            )
        }
        SpaceKind::Euclidean | SpaceKind::Disk => {
            let disk = spec.kind == SpaceKind::Disk;
            let mut pts = Vec::with_capacity(n);
            if spec.anchors {
                let a: &[[f64; 2]] = if disk {
                    &[[-0.5, 0.0], [0.5, 0.0], [0.0, 0.5], [0.0, -0.5]]
                } else {
                    &[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.5, 0.5]]
                };
                pts.extend(a.iter().take(n).map(|p| Location::Plane(*p)));
            }
            while pts.len() < n {
                let p = if disk {
                    let r = rng.gen::<f64>().sqrt();
                    let th = rng.gen::<f64>() * TAU;
                    [r * th.cos(), r * th.sin()]
                } else {
                    [rng.gen::<f64>(), rng.gen::<f64>()]
                };
                if !(disk && p[0] == 0.0 && p[1] == 0.0) {
                    pts.push(Location::Plane(p));
                }
            }
            MetricSpaceSample::from_points(
                label,
                Backend::Euclidean { disk },
                spec.variant,
                pts.into_iter()
                    .enumerate()
                    .map(|(i, l)| point(id(i), l))
                    .collect(),
            )
        }
        SpaceKind::Tripod | SpaceKind::Graph => {
            let graph = if spec.kind == SpaceKind::Tripod {
                MetricGraph::tripod()
            } else {
                let edges = spec
                    .edge_list
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter("graph needs an edge list".into()))?;
                MetricGraph::new(edges)?
            };
            let step = positive("step", spec.step.unwrap_or(0.25))?;
            let pts = graph
                .subdivision(step)
                .into_iter()
                .map(|(name, pos)| point(name, Location::Graph(pos)))
                .collect();
            MetricSpaceSample::from_points(
                label,
                Backend::Graph {
                    graph: Arc::new(graph),
                },
                spec.variant,
                pts,
            )
        }
    };
    sample.validate()?;
    Ok(sample)
}

/// Adds the analytically known limit points of an incomplete sample.
///
/// Open hemisphere → an odd number of rim points at the sample's mean
/// spacing; cone minus
/// apex → apex; punctured disk → center. Complete samples are returned
/// unchanged. Matrix-only samples have no computable completion.
pub fn completion(space: &MetricSpaceSample) -> Result<MetricSpaceSample> {
    if let Backend::Matrix = space.backend {
        return Err(Error::NoCompletion(
            "completion is not computable from a finite distance matrix".into(),
        ));
    }
    if space.variant == Variant::Complete {
        return Ok(space.clone());
    }
    let mut points = space.points.clone();
    let added = |id: String, location: Location| SamplePoint {
        id,
        location,
        tag: PointTag::CompletionPoint,
    };
    match &space.backend {
        Backend::Sphere {
            radius,
            hemisphere: true,
        } => {
            let originals = points
                .iter()
                .filter(|p| p.tag == PointTag::Original)
                .count();
            let spacing = (TAU * radius * radius / originals.max(1) as f64).sqrt();
            // odd, so no two rim points are antipodal
            let m = (2 * ((TAU * radius / spacing) / 2.0).floor() as usize + 1).max(5);
            for k in 0..m {
                let phi = TAU * k as f64 / m as f64;
                points.push(added(
                    format!("rim{k:02}"),
                    Location::Sphere([phi.cos(), phi.sin(), 0.0]),
                ));
            }
        }
        Backend::Cone { .. } => {
            points.push(added("apex".into(), Location::Cone { r: 0.0, theta: 0.0 }))
        }
        Backend::Euclidean { disk: true } => {
            points.push(added("center".into(), Location::Plane([0.0, 0.0])))
        }
        other => {
            return Err(Error::NoCompletion(format!(
                "no incomplete variant known for {}",
                other.name()
            )))
        }
    }
    let label = space.label.replacen("incomplete,", "", 1);
    let completed =
        MetricSpaceSample::from_points(label, space.backend.clone(), Variant::Complete, points);
    completed.validate()?;
    Ok(completed)
}
