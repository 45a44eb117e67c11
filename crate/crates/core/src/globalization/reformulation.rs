use serde::Serialize;

use super::SCOPE_NOTE;
use crate::comparison::{budget, default_scales, hinge_angle, Hinge};
use crate::error::{Error, Result};
use crate::model_plane::model_angle;
use crate::space::{geodesic, Location, MetricSpaceSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReformulationOptions {
    /// Largest `|q s̄|`; defaults to half the shorter side.
    pub r0: Option<f64>,
    pub resolution: f64,
}

impl Default for ReformulationOptions {
    fn default() -> Self {
        ReformulationOptions {
            r0: None,
            resolution: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReformulationReport {
    pub kappa: f64,
    pub kappa1: f64,
    /// `∠[q s̄ p]`, estimated at curvature `kappa`.
    pub hinge_angle: f64,
    /// `(|q s̄|, ∠̃κ₁ q(s̄, p))` over the scale grid.
    pub series: Vec<(f64, Option<f64>)>,
    /// Largest `∠̃κ₁ q(s̄, p) − ∠[q s̄ p]` over the grid.
    pub worst_excess: Option<f64>,
    pub budget: f64,
    pub passed: bool,
    pub scope: &'static str,
}

/// Checks `∠̃κ₁ q(s̄, p) ≤ ∠[q s̄ p]` for `s̄ ∈ [q s]` on the grid
/// `r₀/2ᵏ`, for one `κ₁ < κ`.
pub fn reformulation_check(
    space: &MetricSpaceSample,
    q: &Location,
    s: &Location,
    p: &Location,
    kappa: f64,
    kappa1: f64,
    options: &ReformulationOptions,
) -> Result<ReformulationReport> {
    if !(kappa1 < kappa) {
        return Err(Error::InvalidParameter(format!(
            "kappa1 must be below kappa, got {kappa1} and {kappa}"
        )));
    }
    let gs = geodesic(space, q, s, options.resolution)?;
    let gp = geodesic(space, q, p, options.resolution)?;
    let r0 = options.r0.unwrap_or(gs.length.min(gp.length) / 2.0);
    let scales = default_scales(r0);
    let hinge = Hinge::new(space, gs.clone(), gp.clone(), &scales)?;
    let angle = hinge_angle(space, &hinge, kappa)?.angle;
    let slack = budget(hinge.error_bound());
    let qp = gp.length;
    let series: Vec<(f64, Option<f64>)> = scales
        .iter()
        .map(|&t| {
            let sb = gs.point_at(space, t);
            (
                t,
                model_angle(kappa1, space.dist(q, &sb), qp, space.dist(&sb, p)),
            )
        })
        .collect();
    let worst_excess = series
        .iter()
        .filter_map(|(_, a)| a.map(|a| a - angle))
        .reduce(f64::max);
    Ok(ReformulationReport {
        kappa,
        kappa1,
        hinge_angle: angle,
        series,
        worst_excess,
        budget: slack,
        passed: worst_excess.is_none_or(|e| e <= slack),
        scope: SCOPE_NOTE,
    })
}

/// [`reformulation_check`] at each of `kappa1s`.
pub fn reformulation_sweep(
    space: &MetricSpaceSample,
    q: &Location,
    s: &Location,
    p: &Location,
    kappa: f64,
    kappa1s: &[f64],
    options: &ReformulationOptions,
) -> Result<Vec<ReformulationReport>> {
    kappa1s
        .iter()
        .map(|&k1| reformulation_check(space, q, s, p, kappa, k1, options))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate_space, SpaceKind, SpaceSpec};

    #[test]
    fn flat_hinge_passes_below_zero() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(8)).unwrap();
        let r = reformulation_check(
            &s,
            &Location::Plane([0.0, 0.0]),
            &Location::Plane([1.0, 0.2]),
            &Location::Plane([0.3, 0.9]),
            0.0,
            -0.1,
            &Default::default(),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.worst_excess.unwrap() < 0.0);
    }

    #[test]
    fn spherical_hinge_sweep() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(8)).unwrap();
        let (q, a, b) = (
            Location::Sphere([0.0, 0.0, 1.0]),
            Location::Sphere([0.8f64.sin(), 0.0, 0.8f64.cos()]),
            Location::Sphere([0.0, 1.1f64.sin(), 1.1f64.cos()]),
        );
        let rs = reformulation_sweep(
            &s,
            &q,
            &a,
            &b,
            1.0,
            &[0.0, 0.5, 0.9, 0.99],
            &Default::default(),
        )
        .unwrap();
        assert!(rs.iter().all(|r| r.passed));
        assert!((rs[0].hinge_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn tripod_branch_fails() {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Tripod).with_step(0.1)).unwrap();
        let at = |id: &str| s.location(s.index_of(id).unwrap()).clone();
        let r = reformulation_check(
            &s,
            &at("hub-leaf1@0.100"),
            &at("leaf2"),
            &at("leaf3"),
            0.0,
            -0.1,
            &Default::default(),
        )
        .unwrap();
        assert!(!r.passed);
        assert!(r.hinge_angle.abs() < 1e-9);
        assert!(reformulation_check(
            &s,
            &at("hub"),
            &at("leaf2"),
            &at("leaf3"),
            0.0,
            0.0,
            &Default::default()
        )
        .is_err());
    }
}
