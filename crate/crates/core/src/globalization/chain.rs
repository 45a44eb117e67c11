use serde::Serialize;

use super::{certify_ball, KappaDomainCover};
use crate::comparison::DomainOptions;
use crate::error::{Error, Result};
use crate::space::{DiscreteGeodesic, Location, MetricSpaceSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainOptions {
    /// Covering radius `ρ`: each segment lies in `B(c, ρ)` and the certified
    /// ball is `B(c, 2ρ)`, whose half-radius scan then contains the segment.
    pub radius: f64,
    pub max_halvings: u32,
    pub domain: DomainOptions,
}

impl ChainOptions {
    pub fn new(radius: f64) -> Self {
        ChainOptions {
            radius,
            max_halvings: 4,
            domain: DomainOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentChain {
    /// `p = p₀, p₁, …, pₙ = q`.
    pub points: Vec<Location>,
    /// Arclength of each `pᵢ` along the geodesic.
    pub params: Vec<f64>,
    /// One certified ball per segment `[pᵢ₋₁ pᵢ]`.
    pub cover: KappaDomainCover,
}

impl SegmentChain {
    /// Number of segments.
    pub fn n(&self) -> usize {
        self.points.len() - 1
    }
}

/// Splits `g` into segments, each inside a certified curvature-`κ` ball, with
/// the first segment shorter than `epsilon`.
///
/// Steps are greedy: from the current point the longest admissible segment
/// is tried first, at radius `ρ`, then `ρ/2`, `ρ/4`, … up to
/// `max_halvings` times. When no radius certifies, the chain stops with
/// [`Error::ChainObstructed`] at the current parameter.
pub fn segment_chain(
    space: &MetricSpaceSample,
    g: &DiscreteGeodesic,
    kappa: f64,
    epsilon: f64,
    options: &ChainOptions,
) -> Result<SegmentChain> {
    if !(epsilon > 0.0) || !(options.radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon and radius must be positive, got {epsilon} and {}",
            options.radius
        )));
    }
    let total = *g.params.last().unwrap();
    let mut chain = SegmentChain {
        points: vec![g.start().clone()],
        params: vec![0.0],
        cover: KappaDomainCover {
            kappa,
            options: options.domain,
            balls: Vec::new(),
        },
    };
    let mut t = 0.0;
    while t < total {
        let mut advanced = false;
        for h in 0..=options.max_halvings {
            let rho = options.radius / f64::from(1u32 << h);
            let mut reach = 2.0 * rho * 0.98;
            if chain.points.len() == 1 {
                reach = reach.min(0.99 * epsilon);
            }
            let Some(next) = next_param(g, t, (t + reach).min(total)) else {
                continue;
            };
            if chain.points.len() == 1 && next >= epsilon {
                return Err(Error::InvalidParameter(format!(
                    "epsilon {epsilon} is below the vertex spacing of the geodesic"
                )));
            }
            let center = g.point_at(space, 0.5 * (t + next));
            if !segment_inside(space, g, t, next, &center, rho) {
                continue;
            }
            let opts = DomainOptions {
                seed: options
                    .domain
                    .seed
                    .wrapping_add(chain.cover.balls.len() as u64),
                ..options.domain
            };
            let label = format!("segment {} center", chain.cover.balls.len() + 1);
            let ball = certify_ball(space, &center, label, 2.0 * rho, kappa, &opts, 0)?;
            if ball.passed() {
                chain.cover.balls.push(ball);
                chain.points.push(g.point_at(space, next));
                chain.params.push(next);
                t = next;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(Error::ChainObstructed { param: t });
        }
    }
    Ok(chain)
}

/// The parameter to step to from `t` toward `target`. Vertex-only geodesics
/// snap down to the last vertex before `target`, or to the next vertex.
fn next_param(g: &DiscreteGeodesic, t: f64, target: f64) -> Option<f64> {
    if g.continuous {
        return (target > t).then_some(target);
    }
    g.params
        .iter()
        .copied()
        .rfind(|&p| p > t + 1e-12 && p <= target + 1e-12)
        .or_else(|| g.params.iter().copied().find(|&p| p > t + 1e-12))
}

fn segment_inside(
    space: &MetricSpaceSample,
    g: &DiscreteGeodesic,
    t0: f64,
    t1: f64,
    center: &Location,
    radius: f64,
) -> bool {
    let ends = [g.point_at(space, t0), g.point_at(space, t1)];
    g.vertices
        .iter()
        .zip(&g.params)
        .filter(|(_, &p)| p > t0 && p < t1)
        .map(|(v, _)| v)
        .chain(ends.iter())
        .all(|v| space.dist(center, v) < radius)
}
