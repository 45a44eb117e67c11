//! Trigonometry of the model planes `M^κ`: the Euclidean plane (`κ = 0`),
//! the sphere of radius `1/√κ` (`κ > 0`) and the hyperbolic plane of
//! curvature `κ < 0`.
//!
//! Angles are recovered with half-angle formulas instead of `acos`/`acosh`,
//! so nearly degenerate triangles keep full relative precision. With the
//! half-sides
//!
//! ```text
//! h₁ = (c − a + b)/2   h₂ = (c + a − b)/2   h₃ = (a + b − c)/2   h₄ = (a + b + c)/2
//! ```
//!
//! the angle opposite `c` is `γ = 2·atan2(√(S(h₁)S(h₂)), √(S(h₃)S(h₄)))`, where
//! `S` is `sin(√κ·x)`, `x` or `sinh(√−κ·x)` depending on the sign of `κ`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bisect::bisect;
use crate::error::{Error, Result};

/// Slack accepted on triangle-inequality and diameter constraints before a
/// configuration is declared to have no model triangle.
pub const EXISTENCE_GUARD: f64 = 1e-9;

/// A curvature value together with the diameter of its model plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    kappa: f64,
    model_diameter: f64,
}

impl Curvature {
    pub fn new(kappa: f64) -> Self {
        Curvature {
            kappa,
            model_diameter: model_diameter(kappa),
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `ϖ^κ`: `+∞` for `κ ≤ 0`, `π/√κ` otherwise.
    pub fn model_diameter(&self) -> f64 {
        self.model_diameter
    }
}

/// Diameter of `M^κ`.
pub fn model_diameter(kappa: f64) -> f64 {
    if kappa > 0.0 {
        PI / kappa.sqrt()
    } else {
        f64::INFINITY
    }
}

/// `S_κ(x)` up to the positive factor `1/√|κ|`, which cancels in every ratio
/// it is used in.
fn scaled_sine(kappa: f64, x: f64) -> f64 {
    if kappa > 0.0 {
        (kappa.sqrt() * x).sin()
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * x).sinh()
    } else {
        x
    }
}

/// Half-sides smaller than this multiple of the half-perimeter are set to 0.
const ROUNDING_FLOOR: f64 = 8.0 * f64::EPSILON;

fn guard(a: f64, b: f64, c: f64) -> f64 {
    EXISTENCE_GUARD * (a + b + c).max(1.0)
}

/// Whether sides `a, b, c` bound a triangle in `M^κ` (boundary cases included).
pub fn triangle_exists(kappa: f64, a: f64, b: f64, c: f64) -> bool {
    half_sides(kappa, a, b, c).is_some()
}

fn half_sides(kappa: f64, a: f64, b: f64, c: f64) -> Option<[f64; 4]> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) || a < 0.0 || b < 0.0 || c < 0.0 {
        return None;
    }
    let g = guard(a, b, c);
    let h = [
        0.5 * (c - a + b),
        0.5 * (c + a - b),
        0.5 * (a + b - c),
        0.5 * (a + b + c),
    ];
    if h[..3].iter().any(|&x| x < -g) {
        return None;
    }
    if kappa > 0.0 {
        let diam = model_diameter(kappa);
        if a > diam + g || b > diam + g || c > diam + g || h[3] > diam + g {
            return None;
        }
    }
    // below this the half-sides are rounding noise of a degenerate triangle,
    // which the square roots in `model_angle` would amplify to ~1e-8
    let noise = ROUNDING_FLOOR * h[3].max(1.0);
    Some(h.map(|x| if x < noise { 0.0 } else { x }))
}

/// Side `c` of the `M^κ` triangle with sides `a`, `b` enclosing angle `gamma`.
///
/// Returns `None` when the inputs are inadmissible: negative sides, an angle
/// outside `[0, π]`, or (for `κ > 0`) a side longer than `ϖ^κ`.
pub fn model_side(kappa: f64, a: f64, b: f64, gamma: f64) -> Option<f64> {
    if !(a.is_finite() && b.is_finite() && gamma.is_finite()) || a < 0.0 || b < 0.0 {
        return None;
    }
    if !(-EXISTENCE_GUARD..=PI + EXISTENCE_GUARD).contains(&gamma) {
        return None;
    }
    let gamma = gamma.clamp(0.0, PI);
    let (sin_half, cos_half) = (0.5 * gamma).sin_cos();
    let (s2, c2) = (sin_half * sin_half, cos_half * cos_half);
    if kappa > 0.0 {
        let diam = model_diameter(kappa);
        let g = guard(a, b, 0.0);
        if a > diam + g || b > diam + g {
            return None;
        }
        let k = kappa.sqrt();
        let (x, y) = ((k * a).min(PI), (k * b).min(PI));
        let prod = (x.sin() * y.sin()).max(0.0);
        let d = (0.5 * (x - y)).sin();
        let e = (0.5 * (x + y)).cos();
        let num = d * d + prod * s2;
        let den = e * e + prod * c2;
        Some(2.0 * num.sqrt().atan2(den.sqrt()) / k)
    } else if kappa < 0.0 {
        let k = (-kappa).sqrt();
        let (x, y) = (k * a, k * b);
        let d = (0.5 * (x - y)).sinh();
        let half = (d * d + x.sinh() * y.sinh() * s2).sqrt();
        Some(2.0 * half.asinh() / k)
    } else {
        let d = a - b;
        Some((d * d + 4.0 * a * b * s2).sqrt())
    }
}

/// Angle opposite `c` in the `M^κ` triangle with sides `a, b, c`.
///
/// `None` exactly when no such triangle exists. A zero adjacent side yields
/// angle `0`.
pub fn model_angle(kappa: f64, a: f64, b: f64, c: f64) -> Option<f64> {
    let h = half_sides(kappa, a, b, c)?;
    let s = h.map(|x| scaled_sine(kappa, x).max(0.0));
    let opp = (s[0] * s[1]).sqrt();
    let adj = (s[2] * s[3]).sqrt();
    Some((2.0 * opp.atan2(adj)).clamp(0.0, PI))
}

/// Whether a model triangle exists for its side data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriangleStatus {
    Defined,
    Undefined,
}

/// A comparison triangle `[P W Q]` in `M^κ`, described by `a = |WP|`,
/// `b = |WQ|` and `c = |PQ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTriangle {
    pub curvature: Curvature,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub status: TriangleStatus,
}

impl ModelTriangle {
    pub fn from_sides(kappa: f64, a: f64, b: f64, c: f64) -> Self {
        let status = if triangle_exists(kappa, a, b, c) {
            TriangleStatus::Defined
        } else {
            TriangleStatus::Undefined
        };
        ModelTriangle {
            curvature: Curvature::new(kappa),
            a,
            b,
            c,
            status,
        }
    }

    /// The triangle with `|WP| = a`, `|WQ| = b` and angle `angle_w` at `W`.
    pub fn from_hinge(kappa: f64, a: f64, b: f64, angle_w: f64) -> Self {
        match model_side(kappa, a, b, angle_w) {
            Some(c) => Self::from_sides(kappa, a, b, c),
            None => ModelTriangle {
                curvature: Curvature::new(kappa),
                a,
                b,
                c: f64::NAN,
                status: TriangleStatus::Undefined,
            },
        }
    }

    pub fn is_defined(&self) -> bool {
        self.status == TriangleStatus::Defined
    }

    fn kappa(&self) -> f64 {
        self.curvature.kappa()
    }

    pub fn angle_w(&self) -> Option<f64> {
        self.defined()?;
        model_angle(self.kappa(), self.a, self.b, self.c)
    }

    pub fn angle_p(&self) -> Option<f64> {
        self.defined()?;
        model_angle(self.kappa(), self.a, self.c, self.b)
    }

    pub fn angle_q(&self) -> Option<f64> {
        self.defined()?;
        model_angle(self.kappa(), self.b, self.c, self.a)
    }

    fn defined(&self) -> Option<()> {
        self.is_defined().then_some(())
    }

    /// Parameter along `[P Q]` (distance from `P`) of the point nearest to `W`.
    pub fn foot_parameter(&self) -> Result<f64> {
        if !self.is_defined() {
            return Err(Error::UndefinedTriangle(format!(
                "sides ({}, {}, {}) at kappa {}",
                self.a,
                self.b,
                self.c,
                self.kappa()
            )));
        }
        let (a, len) = (self.a, self.c);
        if len <= 0.0 || a <= 0.0 {
            return Ok(0.0);
        }
        if self.b <= 0.0 {
            return Ok(len);
        }
        let beta = self.angle_p().unwrap_or(0.0);
        let kappa = self.kappa();
        let t = if kappa > 0.0 {
            let k = kappa.sqrt();
            ((k * a).sin() * beta.cos()).atan2((k * a).cos()) / k
        } else if kappa < 0.0 {
            let k = (-kappa).sqrt();
            let arg = ((k * a).tanh() * beta.cos()).clamp(-1.0 + 1e-16, 1.0 - 1e-16);
            arg.atanh() / k
        } else {
            a * beta.cos()
        };
        Ok(t.clamp(0.0, len))
    }
}

/// Distance in `M^κ` from `W` to the side `[P Q]` of `tri`.
pub fn dist_to_opposite_side(tri: &ModelTriangle) -> Result<f64> {
    let t = tri.foot_parameter()?;
    let beta = tri.angle_p().unwrap_or(0.0);
    let along = model_side(tri.kappa(), tri.a, t, beta).unwrap_or(tri.a);
    Ok(along.min(tri.a).min(tri.b).max(0.0))
}

/// Result of splitting `[p_δ q_δ]` by Alexandrov's lemma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaSplit {
    /// Position of `a_δ` on `[p_δ q_δ]`, as a fraction of its length from `p_δ`.
    pub t: f64,
    /// `∠̃κ w(p_δ, a_δ)`.
    pub angle_p: f64,
    /// `∠̃κ w(q_δ, a_δ)`.
    pub angle_q: f64,
    /// Feasible interval of `t` found by bisection.
    pub t_lo: f64,
    pub t_hi: f64,
}

/// Bisection tolerance on the split parameter.
pub const SPLIT_TOLERANCE: f64 = 1e-10;

/// Angles at `W` of the two sub-triangles cut from the model triangle
/// `[P W Q]` (with `|WP| = hp`, `|WQ| = hq`, `|PQ| = len`) by the point at
/// fraction `t` of `[P Q]`.
pub fn split_angles(kappa: f64, hp: f64, hq: f64, len: f64, t: f64) -> Option<(f64, f64)> {
    let tri = ModelTriangle::from_sides(kappa, hp, hq, len);
    let beta = tri.angle_p()?;
    let from_p = t * len;
    let wa = model_side(kappa, hp, from_p, beta)?;
    let first = model_angle(kappa, hp, wa, from_p)?;
    let second = model_angle(kappa, hq, wa, len - from_p)?;
    Some((first, second))
}

/// Chooses `a_δ ∈ [p_δ q_δ]` with
/// `∠̃κ w(p_δ, a_δ) ≤ targets.0` and `∠̃κ w(q_δ, a_δ) ≤ targets.1`.
///
/// The first angle grows and the second shrinks as `a_δ` moves from `p_δ`
/// to `q_δ`, so the admissible set is an interval `[t_lo, t_hi]`; its
/// midpoint is returned.
pub fn alexandrov_lemma_split(
    kappa: f64,
    hinge_sides: (f64, f64),
    target_angles: (f64, f64),
    opposite: f64,
) -> Result<LemmaSplit> {
    let (hp, hq) = hinge_sides;
    let (target_p, target_q) = target_angles;
    if !triangle_exists(kappa, hp, hq, opposite) {
        return Err(Error::UndefinedTriangle(format!(
            "hinge sides ({hp}, {hq}) with opposite side {opposite} at kappa {kappa}"
        )));
    }
    if opposite <= 0.0 {
        return Ok(LemmaSplit {
            t: 0.5,
            angle_p: 0.0,
            angle_q: 0.0,
            t_lo: 0.0,
            t_hi: 1.0,
        });
    }
    let angles = |t: f64| split_angles(kappa, hp, hq, opposite, t).unwrap_or((PI, PI));
    let slack = 1e-12;
    let t_hi = if angles(1.0).0 <= target_p + slack {
        1.0
    } else if angles(0.0).0 > target_p + slack {
        0.0
    } else {
        bisect(0.0, 1.0, SPLIT_TOLERANCE, |t| {
            angles(t).0 <= target_p + slack
        })
        .0
    };
    let t_lo = if angles(0.0).1 <= target_q + slack {
        0.0
    } else if angles(1.0).1 > target_q + slack {
        1.0
    } else {
        bisect(0.0, 1.0, SPLIT_TOLERANCE, |t| {
            angles(t).1 > target_q + slack
        })
        .1
    };
    if t_lo > t_hi + SPLIT_TOLERANCE {
        return Err(Error::Infeasible { t_lo, t_hi });
    }
    let t = (0.5 * (t_lo + t_hi)).clamp(0.0, 1.0);
    let (angle_p, angle_q) = angles(t);
    Ok(LemmaSplit {
        t,
        angle_p,
        angle_q,
        t_lo,
        t_hi,
    })
}
