use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::comparison::{
    budget, default_scales, hinge_angle, kappa_domain_check, region_points, DomainOptions,
    DomainReport, Hinge, Region,
};
use crate::constructions::{key_lemma_check, KeyLemmaOptions, KeyLemmaVerdict};
use crate::error::{Error, Result};
use crate::model_plane::model_angle;
use crate::space::{geodesic, DiscreteGeodesic, Location, MetricSpaceSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeOptions {
    /// Configurations `(p, q, s)` to check.
    pub configurations: usize,
    pub seed: u64,
    /// `|q s̄|`; defaults to a sixteenth of the smaller radius.
    pub scale: Option<f64>,
    pub resolution: f64,
    pub domain: DomainOptions,
    /// Certify `B(w, R)` inside each Key Lemma step.
    pub key_lemma_domain: bool,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions {
            configurations: 16,
            seed: 0,
            scale: None,
            resolution: 0.02,
            domain: DomainOptions::default(),
            key_lemma_domain: true,
        }
    }
}

/// The inequality of a merge configuration that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeStep {
    /// `∠[w s̄ q] ≥ ∠̃κ w(s̄, q)`.
    NearAngle,
    /// `∠[w s̄ p] ≤ π − ∠̃κ w(s̄, q)`.
    FarAngle,
    /// Key Lemma for the hinge `[w p s̄]`.
    KeyLemma,
    /// `∠̃κ q(s̄, p) ≤ ∠[q s̄ p]`.
    Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeFailure {
    pub step: MergeStep,
    pub p: String,
    pub q: String,
    pub s: String,
    pub w: Location,
    /// How far the inequality is violated, beyond the budget.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeReport {
    pub kappa: f64,
    pub omega_p: (Location, f64),
    pub omega_q: (Location, f64),
    pub checked: usize,
    /// Draws without a usable geodesic, intersection point or hinge.
    pub skipped: usize,
    /// Key Lemma steps whose hypotheses could not be established.
    pub key_lemma_unmet: usize,
    pub failures: Vec<MergeFailure>,
    /// Certificate of the union `Ω_p ∪ Ω_q`.
    pub union: DomainReport,
    pub passed: bool,
}

fn in_ball(space: &MetricSpaceSample, b: &(Location, f64), x: &Location) -> bool {
    space.dist(&b.0, x) < b.1
}

fn estimate(
    space: &MetricSpaceSample,
    a: DiscreteGeodesic,
    b: DiscreteGeodesic,
    kappa: f64,
) -> Option<(f64, f64)> {
    let top = a.length.min(b.length) / 8.0;
    let h = Hinge::new(space, a, b, &default_scales(top)).ok()?;
    let est = hinge_angle(space, &h, kappa).ok()?;
    Some((est.angle, budget(h.error_bound())))
}

/// Checks condition (**) for hinges whose sides run through two overlapping
/// balls, along the chain of inequalities at an intermediate point
/// `w ∈ [pq] ∩ Ω_p ∩ Ω_q`, then certifies the union of the balls.
///
/// Configurations draw `p` from `Ω_p` and `q ≠ s` from `Ω_q` (sample points
/// and probes). Draws whose geodesic `[pq]` leaves the union or misses the
/// intersection are skipped.
pub fn domain_merge_check(
    space: &MetricSpaceSample,
    omega_p: (Location, f64),
    omega_q: (Location, f64),
    kappa: f64,
    options: &MergeOptions,
) -> Result<MergeReport> {
    if space.dist(&omega_p.0, &omega_q.0) >= omega_p.1 + omega_q.1 {
        return Err(Error::InvalidParameter(
            "the two balls do not overlap".into(),
        ));
    }
    let pool_p = region_points(
        space,
        &Region::ball(omega_p.0.clone(), omega_p.1),
        &options.domain,
        11,
    );
    let pool_q = region_points(
        space,
        &Region::ball(omega_q.0.clone(), omega_q.1),
        &options.domain,
        12,
    );
    if pool_p.is_empty() || pool_q.len() < 2 {
        return Err(Error::InvalidParameter(
            "too few points in the balls".into(),
        ));
    }
    let scale = options.scale.unwrap_or(omega_p.1.min(omega_q.1) / 16.0);
    let union = Region::Union {
        balls: vec![omega_p.clone(), omega_q.clone()],
    };
    let mut report = MergeReport {
        kappa,
        omega_p: omega_p.clone(),
        omega_q: omega_q.clone(),
        checked: 0,
        skipped: 0,
        key_lemma_unmet: 0,
        failures: Vec::new(),
        union: kappa_domain_check(space, &union, kappa, &options.domain)?,
        passed: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut attempts = 0;
    while report.checked < options.configurations && attempts < 20 * options.configurations {
        attempts += 1;
        let p = &pool_p[rng.gen_range(0..pool_p.len())];
        let qi = rng.gen_range(0..pool_q.len());
        let si = (qi + rng.gen_range(1..pool_q.len())) % pool_q.len();
        let (q, s) = (&pool_q[qi], &pool_q[si]);
        match check_configuration(
            space,
            &omega_p,
            &omega_q,
            &union,
            [p, q, s].map(|x| &x.location),
            kappa,
            scale,
            options,
        )? {
            None => report.skipped += 1,
            Some(outcome) => {
                report.checked += 1;
                report.key_lemma_unmet += usize::from(outcome.unmet);
                for (step, excess) in outcome.failed {
                    report.failures.push(MergeFailure {
                        step,
                        p: p.id.clone(),
                        q: q.id.clone(),
                        s: s.id.clone(),
                        w: outcome.w.clone(),
                        excess,
                    });
                }
            }
        }
    }
    report.passed = report.failures.is_empty() && report.union.passed;
    Ok(report)
}

struct Outcome {
    w: Location,
    unmet: bool,
    failed: Vec<(MergeStep, f64)>,
}

#[allow(clippy::too_many_arguments)]
fn check_configuration(
    space: &MetricSpaceSample,
    omega_p: &(Location, f64),
    omega_q: &(Location, f64),
    union: &Region,
    [p, q, s]: [&Location; 3],
    kappa: f64,
    scale: f64,
    options: &MergeOptions,
) -> Result<Option<Outcome>> {
    let res = options.resolution;
    if space.dist(p, q) < 1e-9 {
        return Ok(None);
    }
    let Ok(g) = geodesic(space, p, q, res) else {
        return Ok(None);
    };
    if !g.vertices.iter().all(|v| union.contains(space, v)) {
        return Ok(None);
    }
    let total = g.length;
    let depth = |v: &Location| {
        (omega_p.1 - space.dist(&omega_p.0, v)).min(omega_q.1 - space.dist(&omega_q.0, v))
    };
    let Some((tw, w)) = g
        .params
        .iter()
        .zip(&g.vertices)
        .filter(|(&t, v)| {
            t > 1e-9 && t < total - 1e-9 && in_ball(space, omega_p, v) && in_ball(space, omega_q, v)
        })
        .max_by(|a, b| depth(a.1).total_cmp(&depth(b.1)))
        .map(|(&t, v)| (t, v.clone()))
    else {
        return Ok(None);
    };
    let Ok(gqs) = geodesic(space, q, s, res) else {
        return Ok(None);
    };
    let sb = gqs.point_at(space, scale.min(gqs.length / 2.0));
    let Ok(gws) = geodesic(space, &w, &sb, res) else {
        return Ok(None);
    };
    let to_q = g.restrict(space, tw, total);
    let to_p = g.restrict(space, 0.0, tw).reversed();
    let (Some((near, b1)), Some((far, b2))) = (
        estimate(space, gws.clone(), to_q, kappa),
        estimate(space, gws.clone(), to_p, kappa),
    ) else {
        return Ok(None);
    };
    let mut out = Outcome {
        w: w.clone(),
        unmet: false,
        failed: Vec::new(),
    };
    if let Some(m) = model_angle(
        kappa,
        space.dist(&w, &sb),
        space.dist(&w, q),
        space.dist(&sb, q),
    ) {
        if m - near > b1 {
            out.failed.push((MergeStep::NearAngle, m - near - b1));
        }
        if far - (PI - m) > b2 {
            out.failed.push((MergeStep::FarAngle, far - (PI - m) - b2));
        }
    }
    let kl = KeyLemmaOptions {
        resolution: res,
        check_domain: options.key_lemma_domain,
        domain: options.domain,
        ..Default::default()
    };
    match key_lemma_check(space, p, &sb, &w, kappa, &kl) {
        Ok(r) => match r.verdict {
            KeyLemmaVerdict::Verified => {}
            KeyLemmaVerdict::HypothesesUnmet => out.unmet = true,
            KeyLemmaVerdict::Violated => {
                let excess = r.pq - r.model_pq.unwrap_or(f64::INFINITY) - r.budget;
                out.failed.push((MergeStep::KeyLemma, excess));
            }
        },
        Err(_) => out.unmet = true,
    }
    if let Some((angle, b4)) = estimate(space, gqs, g.reversed(), kappa) {
        let m = model_angle(kappa, space.dist(q, &sb), total, space.dist(&sb, p));
        if let Some(m) = m.filter(|m| m - angle > b4) {
            out.failed.push((MergeStep::Comparison, m - angle - b4));
        }
    }
    Ok(Some(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContainmentScanOptions {
    pub pairs: usize,
    pub seed: u64,
    /// Radius of the neighborhood of `[xz]` the pairs are drawn from;
    /// defaults to a quarter of the smaller ball radius.
    pub tube: Option<f64>,
    pub resolution: f64,
    /// Curvature bound at which both balls must pass [`kappa_domain_check`]
    /// before the scan.
    pub certify: Option<f64>,
    pub domain: DomainOptions,
}

impl Default for ContainmentScanOptions {
    fn default() -> Self {
        ContainmentScanOptions {
            pairs: 64,
            seed: 0,
            tube: None,
            resolution: 0.02,
            certify: None,
            domain: DomainOptions::default(),
        }
    }
}

/// A geodesic `[vw]` with a vertex outside `Ω₁ ∪ Ω₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Escape {
    pub v: Location,
    pub w: Location,
    pub exit_vertex: Location,
    /// Arclength of the exit vertex from `v`.
    pub param: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentScanReport {
    pub checked: usize,
    /// Pairs outside the union or without a computable geodesic.
    pub skipped: usize,
    pub escapes: usize,
    pub first_escape: Option<Escape>,
    pub passed: bool,
}

/// Draws pairs `v, w` near the geodesic `[xz]` and checks that every vertex
/// of `[vw]` stays in `Ω₁ ∪ Ω₂`.
pub fn geodesic_containment_scan(
    space: &MetricSpaceSample,
    omega1: (Location, f64),
    omega2: (Location, f64),
    x: &Location,
    z: &Location,
    options: &ContainmentScanOptions,
) -> Result<ContainmentScanReport> {
    let union = Region::Union {
        balls: vec![omega1.clone(), omega2.clone()],
    };
    if let Some(kappa) = options.certify {
        for b in [&omega1, &omega2] {
            let r = kappa_domain_check(
                space,
                &Region::ball(b.0.clone(), b.1),
                kappa,
                &options.domain,
            )?;
            if !r.passed {
                return Err(Error::DomainNotCertified(format!("ball of radius {}", b.1)));
            }
        }
    }
    let xz = geodesic(space, x, z, options.resolution)?;
    let tube = options.tube.unwrap_or(omega1.1.min(omega2.1) / 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let base = xz.point_at(space, rng.gen::<f64>() * xz.length);
        let near = space.probe_ball(&base, tube, 4, rng.gen());
        if near.is_empty() {
            base
        } else {
            near[rng.gen_range(0..near.len())].clone()
        }
    };
    let mut report = ContainmentScanReport {
        checked: 0,
        skipped: 0,
        escapes: 0,
        first_escape: None,
        passed: false,
    };
    for _ in 0..options.pairs {
        let (v, w) = (draw(&mut rng), draw(&mut rng));
        if !union.contains(space, &v) || !union.contains(space, &w) || space.dist(&v, &w) < 1e-9 {
            report.skipped += 1;
            continue;
        }
        let Ok(g) = geodesic(space, &v, &w, options.resolution) else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        if let Some((u, &t)) = g
            .vertices
            .iter()
            .zip(&g.params)
            .find(|(u, _)| !union.contains(space, u))
        {
            report.escapes += 1;
            report.first_escape.get_or_insert(Escape {
                v: v.clone(),
                w: w.clone(),
                exit_vertex: u.clone(),
                param: t,
            });
        }
    }
    report.passed = report.escapes == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, SpaceKind, SpaceSpec};

    fn sphere_point(colat: f64, lon: f64) -> Location {
        Location::Sphere([
            colat.sin() * lon.cos(),
            colat.sin() * lon.sin(),
            colat.cos(),
        ])
    }

    #[test]
    fn overlapping_plane_balls_merge() {
        let s =
            generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(40).with_seed(3)).unwrap();
        let r = domain_merge_check(
            &s,
            (Location::Plane([0.35, 0.5]), 0.3),
            (Location::Plane([0.65, 0.5]), 0.3),
            0.0,
            &MergeOptions::default(),
        )
        .unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert!(r.checked > 0);
    }

    #[test]
    fn overlapping_caps_merge() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(60).with_seed(1)).unwrap();
        let r = domain_merge_check(
            &s,
            (sphere_point(0.0, 0.0), 0.4),
            (sphere_point(0.5, 0.0), 0.4),
            1.0,
            &MergeOptions::default(),
        )
        .unwrap();
        assert!(r.passed, "{:?} {:?}", r.failures, r.union.worst_hinge);
    }

    #[test]
    fn ball_over_the_tripod_hub_does_not_merge() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Tripod).with_step(0.1)).unwrap();
        let hub = s.location(s.index_of("hub").unwrap()).clone();
        let leg = s.location(s.index_of("hub-leaf1@0.500").unwrap()).clone();
        let r =
            domain_merge_check(&s, (hub, 0.4), (leg, 0.4), 0.0, &MergeOptions::default()).unwrap();
        assert!(!r.passed);
        assert!(!r.union.passed);
    }

    #[test]
    fn disjoint_balls_are_rejected() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(10)).unwrap();
        let r = domain_merge_check(
            &s,
            (Location::Plane([0.0, 0.0]), 0.2),
            (Location::Plane([1.0, 0.0]), 0.2),
            0.0,
            &MergeOptions::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn straight_segments_stay_in_the_union() {
        let s =
            generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(40).with_seed(3)).unwrap();
        let r = geodesic_containment_scan(
            &s,
            (Location::Plane([0.3, 0.5]), 0.3),
            (Location::Plane([0.7, 0.5]), 0.3),
            &Location::Plane([0.15, 0.5]),
            &Location::Plane([0.85, 0.5]),
            &ContainmentScanOptions::default(),
        )
        .unwrap();
        assert!(r.passed && r.checked > 40, "{r:?}");
    }

    #[test]
    fn great_circle_arcs_stay_in_two_caps() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(60).with_seed(2)).unwrap();
        let r = geodesic_containment_scan(
            &s,
            (sphere_point(0.3, 0.0), 0.4),
            (sphere_point(0.9, 0.0), 0.4),
            &sphere_point(0.1, 0.0),
            &sphere_point(1.1, 0.0),
            &ContainmentScanOptions::default(),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }
}
