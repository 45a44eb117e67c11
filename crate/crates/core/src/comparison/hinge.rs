use std::f64::consts::PI;

use serde::Serialize;

use super::budget;
use crate::error::{Error, Result};
use crate::model_plane::model_angle;
use crate::space::{geodesic, DiscreteGeodesic, Location, MetricSpaceSample};

/// Number of scales in the default grid `r₀, r₀/2, …, r₀/2⁸`.
pub const SCALE_LEVELS: usize = 9;

/// The geometric grid `r₀/2ᵏ`, `k = 0..SCALE_LEVELS`.
pub fn default_scales(r0: f64) -> Vec<f64> {
    (0..SCALE_LEVELS).map(|k| r0 / (1u64 << k) as f64).collect()
}

/// Two geodesics `[p x]`, `[p y]` leaving a common vertex `p`, with the
/// decreasing scales at which the model angle `∠̃κ p(x̄, ȳ)` is evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct Hinge {
    pub vertex: Location,
    pub x: DiscreteGeodesic,
    pub y: DiscreteGeodesic,
    /// Arclength pairs `(|p x̄|, |p ȳ|)`, strictly decreasing in both entries.
    pub scales: Vec<(f64, f64)>,
}

impl Hinge {
    /// A hinge evaluated at the scale pairs `(s, s)` for `s` in `scales`.
    pub fn new(
        space: &MetricSpaceSample,
        x: DiscreteGeodesic,
        y: DiscreteGeodesic,
        scales: &[f64],
    ) -> Result<Self> {
        let vertex = x.start().clone();
        if space.dist(&vertex, y.start()) > 1e-12 {
            return Err(Error::InvalidParameter(
                "hinge geodesics must start at the same vertex".into(),
            ));
        }
        if scales.is_empty()
            || scales.iter().any(|s| !(*s > 0.0))
            || scales.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidParameter(
                "hinge scales must be positive and strictly decreasing".into(),
            ));
        }
        let reach = x.length.min(y.length);
        if scales[0] > reach * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "largest scale {} exceeds the shorter side {}",
                scales[0], reach
            )));
        }
        Ok(Hinge {
            vertex,
            x,
            y,
            scales: scales.iter().map(|&s| (s, s)).collect(),
        })
    }

    /// The hinge `[x p y]` with geodesics computed at `resolution` and the
    /// default grid starting at `r0` (or at `min(|px|, |py|)/8`).
    pub fn between(
        space: &MetricSpaceSample,
        p: &Location,
        x: &Location,
        y: &Location,
        r0: Option<f64>,
        resolution: f64,
    ) -> Result<Self> {
        let gx = geodesic(space, p, x, resolution)?;
        let gy = geodesic(space, p, y, resolution)?;
        let r0 = r0.unwrap_or(gx.length.min(gy.length) / 8.0);
        Hinge::new(space, gx, gy, &default_scales(r0))
    }

    pub fn error_bound(&self) -> f64 {
        self.x.error_bound.max(self.y.error_bound)
    }
}

/// Estimate of a hinge angle from the grid of model angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HingeEstimate {
    pub kappa: f64,
    /// Model angle at the smallest scale pair.
    pub angle: f64,
    /// `(4·A(s/2) − A(s))/3` from the two smallest diagonal scales; advisory.
    pub extrapolated: Option<f64>,
    /// Largest increase of the grid when a scale grows.
    pub monotonicity_defect: f64,
    pub budget: f64,
    /// `monotonicity_defect ≤ budget`.
    pub monotone: bool,
    /// `(scale, model angle)` along the diagonal of the grid.
    pub diagonal: Vec<(f64, Option<f64>)>,
}

/// Model angle `∠̃κ p(x̄, ȳ)` for the points of `gx`, `gy` at arclengths `sx`, `sy`.
fn grid_angle(
    space: &MetricSpaceSample,
    gx: &DiscreteGeodesic,
    gy: &DiscreteGeodesic,
    kappa: f64,
    sx: f64,
    sy: f64,
) -> Option<f64> {
    let p = gx.start();
    let xb = gx.point_at(space, sx);
    let yb = gy.point_at(space, sy);
    model_angle(
        kappa,
        space.dist(p, &xb),
        space.dist(p, &yb),
        space.dist(&xb, &yb),
    )
}

/// Evaluates the model-angle grid of `hinge` at curvature `kappa`.
///
/// The angle is the grid value at the smallest scale pair; monotonicity of
/// the grid (nonincreasing in each scale) is reported as a diagnostic.
pub fn hinge_angle(space: &MetricSpaceSample, hinge: &Hinge, kappa: f64) -> Result<HingeEstimate> {
    let eb = hinge.error_bound();
    let (last_x, last_y) = *hinge.scales.last().unwrap();
    if last_x.min(last_y) < 2.0 * eb {
        return Err(Error::InvalidParameter(format!(
            "smallest scale {} is below twice the geodesic error bound {}",
            last_x.min(last_y),
            eb
        )));
    }
    let m = hinge.scales.len();
    let mut grid = vec![vec![None; m]; m];
    for (i, &(sx, _)) in hinge.scales.iter().enumerate() {
        for (j, &(_, sy)) in hinge.scales.iter().enumerate() {
            grid[i][j] = grid_angle(space, &hinge.x, &hinge.y, kappa, sx, sy);
        }
    }
    let angle = grid[m - 1][m - 1].ok_or_else(|| {
        Error::UndefinedTriangle("model angle undefined at the smallest scale".into())
    })?;
    let mut defect: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let Some(here) = grid[i][j] else { continue };
            if let Some(Some(finer)) = grid.get(i + 1).map(|r| r[j]) {
                defect = defect.max(here - finer);
            }
            if let Some(Some(finer)) = grid[i].get(j + 1) {
                defect = defect.max(here - finer);
            }
        }
    }
    let diagonal: Vec<(f64, Option<f64>)> =
        (0..m).map(|k| (hinge.scales[k].0, grid[k][k])).collect();
    let extrapolated = match (m >= 2).then(|| (grid[m - 2][m - 2], grid[m - 1][m - 1])) {
        Some((Some(coarse), Some(fine))) => Some((4.0 * fine - coarse) / 3.0),
        _ => None,
    };
    let b = budget(eb);
    Ok(HingeEstimate {
        kappa,
        angle,
        extrapolated,
        monotonicity_defect: defect,
        budget: b,
        monotone: defect <= b,
        diagonal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacentAngleReport {
    /// `∠[p y z]`.
    pub angle_y: f64,
    /// `∠[p x z]`.
    pub angle_x: f64,
    /// `|∠[p y z] + ∠[p x z] − π|`.
    pub deviation: f64,
    /// Sum of the budgets of both hinge estimates.
    pub budget: f64,
}

/// For `p` at arclength `t` inside the geodesic `g = [x y]` and a third point
/// `z`, measures how far the adjacent hinge angles at `p` are from summing
/// to `π`.
pub fn adjacent_angle_check(
    space: &MetricSpaceSample,
    g: &DiscreteGeodesic,
    t: f64,
    z: &Location,
    kappa: f64,
    resolution: f64,
) -> Result<AdjacentAngleReport> {
    let len = *g.params.last().unwrap();
    if !(t > 0.0 && t < len) {
        return Err(Error::InvalidParameter(format!(
            "p must be interior to the geodesic: t = {t}, length {len}"
        )));
    }
    let p = g.point_at(space, t);
    let to_y = g.restrict(space, t, len);
    let to_x = g.restrict(space, 0.0, t).reversed();
    let to_z = geodesic(space, &p, z, resolution)?;
    let r0 = t.min(len - t).min(to_z.length) / 4.0;
    let scales = default_scales(r0);
    let hy = hinge_angle(
        space,
        &Hinge::new(space, to_y, to_z.clone(), &scales)?,
        kappa,
    )?;
    let hx = hinge_angle(space, &Hinge::new(space, to_x, to_z, &scales)?, kappa)?;
    Ok(AdjacentAngleReport {
        angle_y: hy.angle,
        angle_x: hx.angle,
        deviation: (hy.angle + hx.angle - PI).abs(),
        budget: hy.budget + hx.budget,
    })
}
