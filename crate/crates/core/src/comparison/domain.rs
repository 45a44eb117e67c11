use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hinge::{default_scales, hinge_angle, Hinge};
use super::{budget, scan_quadruples, ComparisonReport, ScanOptions, Strategy, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};
use crate::model_plane::model_angle;
use crate::space::{geodesic, Location, MetricSpaceSample, PointTag, SamplePoint};

/// A region of a space: an open ball or a union of open balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Region {
    Ball { center: Location, radius: f64 },
    Union { balls: Vec<(Location, f64)> },
}

impl Region {
    pub fn ball(center: Location, radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    pub fn balls(&self) -> Vec<(Location, f64)> {
        match self {
            Region::Ball { center, radius } => vec![(center.clone(), *radius)],
            Region::Union { balls } => balls.clone(),
        }
    }

    pub fn contains(&self, space: &MetricSpaceSample, x: &Location) -> bool {
        self.balls().iter().any(|(c, r)| space.dist(c, x) < *r)
    }

    /// The same region with every radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Region::Ball { center, radius } => Region::ball(center.clone(), radius * factor),
            Region::Union { balls } => Region::Union {
                balls: balls.iter().map(|(c, r)| (c.clone(), r * factor)).collect(),
            },
        }
    }

    fn min_radius(&self) -> f64 {
        self.balls()
            .iter()
            .map(|b| b.1)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainOptions {
    /// Random probe points added per ball on analytic backends.
    pub probes: usize,
    /// Cap on the number of checked hinges; larger sets are subsampled.
    pub max_hinges: usize,
    pub seed: u64,
    /// Vertex spacing of the geodesics used by the hinges.
    pub resolution: f64,
    /// Quadruple count of the half-radius scan when it cannot be exhaustive.
    pub random_quadruples: usize,
}

impl Default for DomainOptions {
    fn default() -> Self {
        DomainOptions {
            probes: 12,
            max_hinges: 64,
            seed: 0,
            resolution: 0.02,
            random_quadruples: 20_000,
        }
    }
}

/// A hinge `(q; s, p)` at which `∠̃κ q(s̄, p)` exceeded `∠[q s̄ p]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HingeWitness {
    pub q: String,
    pub s: String,
    pub p: String,
    /// `|q s̄|`.
    pub scale: f64,
    pub model_angle: f64,
    pub hinge_angle: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainReport {
    pub region: Region,
    pub kappa: f64,
    /// Sample and probe points found in the region.
    pub points: usize,
    pub hinges_checked: usize,
    pub hinges_failed: usize,
    /// Hinges without a computable geodesic or usable scale grid.
    pub hinges_skipped: usize,
    pub worst_hinge: Option<HingeWitness>,
    /// Quadruple scan of the half-radius region; `None` when it holds
    /// fewer than four points.
    pub scan: Option<ComparisonReport>,
    /// Fewer than four points in the region: nothing can be certified.
    pub insufficient: bool,
    pub passed: bool,
}

/// Sample points and probes inside `region`, as named sample points.
pub(crate) fn region_points(
    space: &MetricSpaceSample,
    region: &Region,
    options: &DomainOptions,
    salt: u64,
) -> Vec<SamplePoint> {
    let mut out: Vec<SamplePoint> = space
        .points
        .iter()
        .filter(|p| region.contains(space, &p.location))
        .cloned()
        .collect();
    for (k, (c, r)) in region.balls().into_iter().enumerate() {
        let seed = options.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ k as u64;
        for loc in space.probe_ball(&c, r, options.probes, seed) {
            if out.iter().all(|p| space.dist(&p.location, &loc) > 1e-12) {
                out.push(SamplePoint {
                    id: format!("probe{:02}", out.len()),
                    location: loc,
                    tag: PointTag::Original,
                });
            }
        }
    }
    out
}

/// Ordered triples `(q, s, p)` of distinct indices below `m`, all of them or
/// a seeded subset of `cap`.
fn hinge_triples(m: usize, cap: usize, seed: u64) -> Vec<[usize; 3]> {
    let total = m * (m - 1) * (m - 2);
    let decode = |k: usize| {
        let q = k / ((m - 1) * (m - 2));
        let rest = k % ((m - 1) * (m - 2));
        let s = rest / (m - 2);
        let p = rest % (m - 2);
        let s = if s >= q { s + 1 } else { s };
        let (lo, hi) = (q.min(s), q.max(s));
        let p = if p >= lo { p + 1 } else { p };
        let p = if p >= hi { p + 1 } else { p };
        [q, s, p]
    };
    if total <= cap {
        (0..total).map(decode).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = sample(&mut rng, total, cap).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(decode).collect()
    }
}

/// Certifies a region as a curvature-`κ` domain.
///
/// For sampled hinges `(q; s, p)` of region points, checks
/// `∠̃κ q(s̄, p) ≤ ∠[q s̄ p] + budget` for `s̄ ∈ [q s]` on the scale grid
/// `r₀/2ᵏ`, `r₀ = radius/8`. Then scans all quadruples of the half-radius
/// region. The region passes when both find nothing.
pub fn kappa_domain_check(
    space: &MetricSpaceSample,
    region: &Region,
    kappa: f64,
    options: &DomainOptions,
) -> Result<DomainReport> {
    if !(region.min_radius() > 0.0) {
        return Err(Error::InvalidParameter(
            "region radii must be positive".into(),
        ));
    }
    let pts = region_points(space, region, options, 1);
    let m = pts.len();
    let mut report = DomainReport {
        region: region.clone(),
        kappa,
        points: m,
        hinges_checked: 0,
        hinges_failed: 0,
        hinges_skipped: 0,
        worst_hinge: None,
        scan: None,
        insufficient: m < 4,
        passed: false,
    };
    if report.insufficient {
        return Ok(report);
    }
    let r0 = region.min_radius() / 8.0;
    for [qi, si, pi] in hinge_triples(m, options.max_hinges, options.seed) {
        let (q, s, p) = (&pts[qi].location, &pts[si].location, &pts[pi].location);
        let geodesics = geodesic(space, q, s, options.resolution)
            .and_then(|gs| Ok((gs, geodesic(space, q, p, options.resolution)?)));
        let Ok((gs, gp)) = geodesics else {
            report.hinges_skipped += 1;
            continue;
        };
        let top = r0.min(gs.length).min(gp.length);
        let scales = default_scales(top);
        let hinge = match Hinge::new(space, gs.clone(), gp.clone(), &scales) {
            Ok(h) => h,
            Err(_) => {
                report.hinges_skipped += 1;
                continue;
            }
        };
        let Ok(est) = hinge_angle(space, &hinge, kappa) else {
            report.hinges_skipped += 1;
            continue;
        };
        report.hinges_checked += 1;
        let slack = budget(hinge.error_bound());
        let qp = space.dist(q, p);
        let mut worst: Option<HingeWitness> = None;
        for &t in &scales {
            let sb = gs.point_at(space, t);
            let Some(a) = model_angle(kappa, space.dist(q, &sb), qp, space.dist(&sb, p)) else {
                continue;
            };
            let excess = a - est.angle;
            if excess > slack && worst.as_ref().is_none_or(|w| excess > w.excess) {
                worst = Some(HingeWitness {
                    q: pts[qi].id.clone(),
                    s: pts[si].id.clone(),
                    p: pts[pi].id.clone(),
                    scale: t,
                    model_angle: a,
                    hinge_angle: est.angle,
                    excess,
                });
            }
        }
        if let Some(w) = worst {
            report.hinges_failed += 1;
            if report
                .worst_hinge
                .as_ref()
                .is_none_or(|b| w.excess > b.excess)
            {
                report.worst_hinge = Some(w);
            }
        }
    }

    // comparison on the half-radius region
    let half = region.scaled(0.5);
    let inner = region_points(space, &half, options, 2);
    if inner.len() >= 4 {
        let strategy = if inner.len() <= EXHAUSTIVE_LIMIT {
            Strategy::Exhaustive
        } else {
            Strategy::Random {
                count: options.random_quadruples,
                seed: options.seed,
            }
        };
        let label = format!("{} (half region)", space.label);
        let sub = space.subsample(label, inner);
        report.scan = Some(scan_quadruples(&sub, kappa, &ScanOptions::new(strategy))?);
    }
    report.passed = report.hinges_failed == 0 && report.scan.as_ref().is_none_or(|s| s.passed());
    Ok(report)
}
