use serde::Serialize;

use crate::comparison::{kappa_domain_check, DomainOptions, Region};
use crate::error::{Error, Result};
use crate::model_plane::{model_angle, model_diameter};
use crate::space::{Location, MetricSpaceSample};

/// A curve `α: [r, R] → X` leaving `w`, parametrized by distance from `w`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialCurve {
    pub w: Location,
    pub a: Location,
    /// `|wa|`.
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub step: f64,
    pub vertices: Vec<Location>,
    /// Parameter of each vertex; nominally its distance from `w`.
    pub params: Vec<f64>,
}

impl RadialCurve {
    /// Largest `|dist(w, α(t)) − t|` over the recorded vertices.
    pub fn parametrization_error(&self, space: &MetricSpaceSample) -> f64 {
        self.vertices
            .iter()
            .zip(&self.params)
            .map(|(v, t)| (space.dist(&self.w, v) - t).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialOptions {
    pub kappa: f64,
    pub step: f64,
    /// Certify `B[w, R]` with [`kappa_domain_check`] before building the curve.
    pub verify_domain: bool,
    pub domain: DomainOptions,
}

impl RadialOptions {
    pub fn new(kappa: f64, step: f64) -> Self {
        RadialOptions {
            kappa,
            step,
            verify_domain: true,
            domain: DomainOptions::default(),
        }
    }

    pub fn without_domain_check(mut self) -> Self {
        self.verify_domain = false;
        self
    }
}

/// Builds the radial curve from `w` through `a` up to distance `big_r`.
///
/// Analytic backends continue the geodesic `[w a]` beyond `a`. Graph and
/// matrix samples take greedy steps to the neighboring sample point farthest
/// from `w`; neighbors are sample points within `1.5·step`. A curve that
/// cannot increase its distance from `w` stops with [`Error::Trapped`].
pub fn radial_curve(
    space: &MetricSpaceSample,
    w: &Location,
    a: &Location,
    big_r: f64,
    options: &RadialOptions,
) -> Result<RadialCurve> {
    let step = options.step;
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    let r = space.dist(w, a);
    let half_diameter = 0.5 * model_diameter(options.kappa);
    if !(r > 0.0 && r <= big_r && big_r < half_diameter) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r <= R < diameter/2, got r = {r}, R = {big_r}, diameter/2 = {half_diameter}"
        )));
    }
    if options.verify_domain {
        let region = Region::ball(w.clone(), big_r + step);
        let report = kappa_domain_check(space, &region, options.kappa, &options.domain)?;
        if !report.passed {
            return Err(Error::DomainNotCertified(format!(
                "closed ball of radius {big_r} around the basepoint"
            )));
        }
    }
    let mut curve = RadialCurve {
        w: w.clone(),
        a: a.clone(),
        r,
        big_r,
        step,
        vertices: vec![a.clone()],
        params: vec![r],
    };
    if big_r == r {
        return Ok(curve);
    }
    if space.backend.is_analytic() && space.extend(w, a, r).is_some() {
        let count = ((big_r - r) / step).ceil() as usize;
        for k in 1..=count {
            let t = if k == count {
                big_r
            } else {
                r + step * k as f64
            };
            let v = space.extend(w, a, t).expect("extension available");
            let off = (space.dist(w, &v) - t).abs();
            if !space.contains(&v) || off > 2.0 * step {
                return Err(Error::Trapped {
                    t: *curve.params.last().unwrap(),
                    vertex: serde_json::to_string(curve.vertices.last().unwrap())
                        .unwrap_or_default(),
                });
            }
            curve.vertices.push(v);
            curve.params.push(t);
        }
        return Ok(curve);
    }
    greedy_ascent(space, &mut curve)?;
    Ok(curve)
}

fn greedy_ascent(space: &MetricSpaceSample, curve: &mut RadialCurve) -> Result<()> {
    let w = curve.w.clone();
    let mut here = curve.a.clone();
    let mut t = curve.r;
    let mut name = space
        .points
        .iter()
        .find(|p| p.location == here)
        .map(|p| p.id.clone())
        .unwrap_or_else(|| "a".into());
    while t < curve.big_r {
        let mut best: Option<(f64, usize)> = None;
        for (i, p) in space.points.iter().enumerate() {
            if space.dist(&here, &p.location) > 1.5 * curve.step {
                continue;
            }
            let d = space.dist(&w, &p.location);
            if d > t + 1e-12 && best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, i));
            }
        }
        let Some((d, i)) = best else {
            return Err(Error::Trapped { t, vertex: name });
        };
        here = space.points[i].location.clone();
        name = space.points[i].id.clone();
        t = d;
        curve.vertices.push(here.clone());
        curve.params.push(t);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    /// Largest `f(t_j) − f(t_i)` over `t_i < t_j` (zero when nonincreasing).
    pub max_increase: f64,
    /// Parameters at which the model triangle is undefined.
    pub undefined_at: Vec<f64>,
    /// `(t, f(t))` with `f(t)` the model angle at `w̃`.
    pub series: Vec<(f64, Option<f64>)>,
}

/// Tracks the angle at `w̃` of the `M^κ` triangle with sides
/// `|w̃p̃| = |wp|`, `|w̃α̃(t)| = t`, `|p̃α̃(t)| = |pα(t)|` along the curve.
pub fn radial_monotonicity_check(
    space: &MetricSpaceSample,
    curve: &RadialCurve,
    p: &Location,
    kappa: f64,
) -> MonotonicityReport {
    let wp = space.dist(&curve.w, p);
    let series: Vec<(f64, Option<f64>)> = curve
        .vertices
        .iter()
        .zip(&curve.params)
        .map(|(v, &t)| (t, model_angle(kappa, wp, t, space.dist(p, v))))
        .collect();
    let mut max_increase: f64 = 0.0;
    let mut running_min = f64::INFINITY;
    for &(_, f) in &series {
        if let Some(f) = f {
            max_increase = max_increase.max(f - running_min);
            running_min = running_min.min(f);
        }
    }
    MonotonicityReport {
        max_increase,
        undefined_at: series
            .iter()
            .filter(|s| s.1.is_none())
            .map(|s| s.0)
            .collect(),
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, SpaceKind, SpaceSpec};

    #[test]
    fn rays_in_the_plane() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(20)).unwrap();
        let w = Location::Plane([0.1, 0.2]);
        let a = Location::Plane([0.4, 0.6]);
        let c = radial_curve(&s, &w, &a, 1.5, &RadialOptions::new(0.0, 0.05)).unwrap();
        assert!(c.parametrization_error(&s) < 1e-12);
        assert_eq!(*c.params.last().unwrap(), 1.5);
        assert!(c.params.windows(2).all(|p| p[1] > p[0]));
        let m = radial_monotonicity_check(&s, &c, &Location::Plane([0.9, 0.1]), 0.0);
        assert!(m.max_increase <= 1e-9);
        assert!(m.undefined_at.is_empty());
    }

    #[test]
    fn great_circle_on_the_sphere() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(30)).unwrap();
        let w = Location::Sphere([0.0, 0.0, 1.0]);
        let a = Location::Sphere([0.2f64.sin(), 0.0, 0.2f64.cos()]);
        let c = radial_curve(
            &s,
            &w,
            &a,
            1.4,
            &RadialOptions::new(1.0, 0.05).without_domain_check(),
        )
        .unwrap();
        for (v, t) in c.vertices.iter().zip(&c.params) {
            let Location::Sphere(x) = v else { panic!() };
            // oracle: the meridian at longitude 0 has colatitude t
            assert!((x[0] - t.sin()).abs() < 1e-12 && (x[2] - t.cos()).abs() < 1e-12);
        }
        let p = Location::Sphere([0.0, (0.7f64).sin(), (0.7f64).cos()]);
        let m = radial_monotonicity_check(&s, &c, &p, 1.0);
        assert!(m.max_increase <= 1e-9, "{}", m.max_increase);
    }

    #[test]
    fn tripod_curve_is_trapped_at_the_leaf() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Tripod)).unwrap();
        let hub = s.location(s.index_of("hub").unwrap()).clone();
        let a = s.location(s.index_of("hub-leaf1@0.250").unwrap()).clone();
        let opts = RadialOptions::new(-1.0, 0.25).without_domain_check();
        let err = radial_curve(&s, &hub, &a, 1.5, &opts).unwrap_err();
        assert_eq!(
            err,
            Error::Trapped {
                t: 1.0,
                vertex: "leaf1".into()
            }
        );
        let c = radial_curve(&s, &hub, &a, 0.75, &opts).unwrap();
        assert_eq!(c.params, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn degenerate_curve_is_a_point() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(10)).unwrap();
        let w = Location::Plane([0.0, 0.0]);
        let a = Location::Plane([0.3, 0.4]);
        let c = radial_curve(&s, &w, &a, 0.5, &RadialOptions::new(0.0, 0.1)).unwrap();
        assert_eq!(c.vertices.len(), 1);
        let m = radial_monotonicity_check(&s, &c, &Location::Plane([1.0, 0.0]), 0.0);
        assert_eq!(m.max_increase, 0.0);
    }

    #[test]
    fn preconditions() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(10)).unwrap();
        let w = Location::Sphere([0.0, 0.0, 1.0]);
        let a = Location::Sphere([0.2f64.sin(), 0.0, 0.2f64.cos()]);
        let opts = RadialOptions::new(1.0, 0.1).without_domain_check();
        assert!(radial_curve(&s, &w, &a, 1.6, &opts).is_err());
        assert!(radial_curve(&s, &w, &a, 0.1, &opts).is_err());
        assert!(radial_curve(&s, &w, &w, 0.5, &opts).is_err());
    }
}
