use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{geodesic, Location, MetricSpaceSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltReason {
    MaxSteps,
    LeftDomain,
    /// The current target is closer than `ε`.
    Converged,
    /// A geodesic to the current target could not be computed.
    NoGeodesic,
}

/// Vertices `w₀, w₁, …` of the cat's cradle with the derived sequences
/// `ℓₙ = |p w₂ₙ| + |w₂ₙ q|` and `sₙ = Σᵢ₌₁..ₙ |w₂₍ᵢ₋₁₎ w₂ᵢ|`.
#[derive(Debug, Clone, Serialize)]
pub struct CradleTrace {
    pub p: Location,
    pub q: Location,
    pub w: Location,
    pub epsilon: f64,
    pub vertices: Vec<Location>,
    pub ell: Vec<f64>,
    pub s: Vec<f64>,
    pub halt: HaltReason,
}

impl CradleTrace {
    /// `(ℓₙ, sₙ)` recomputed from the vertex list.
    pub fn recompute(&self, space: &MetricSpaceSample) -> (Vec<f64>, Vec<f64>) {
        let even: Vec<&Location> = self.vertices.iter().step_by(2).collect();
        let ell = even
            .iter()
            .map(|v| space.dist(&self.p, v) + space.dist(v, &self.q))
            .collect();
        let mut s = vec![0.0];
        for pair in even.windows(2) {
            s.push(s.last().unwrap() + space.dist(pair[0], pair[1]));
        }
        (ell, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CradleOptions {
    pub max_steps: usize,
    /// Vertex spacing of the geodesics; at most `ε/10`.
    pub resolution: Option<f64>,
    /// Halt once an iterate is at distance `≥ R` from `center`.
    pub domain: Option<(Location, f64)>,
}

impl CradleOptions {
    pub fn new(max_steps: usize) -> Self {
        CradleOptions {
            max_steps,
            resolution: None,
            domain: None,
        }
    }

    pub fn within(mut self, center: Location, radius: f64) -> Self {
        self.domain = Some((center, radius));
        self
    }
}

/// Alternating `ε`-steps from `w` along geodesics toward `p`, then `q`,
/// then `p`, and so on.
pub fn cats_cradle(
    space: &MetricSpaceSample,
    p: &Location,
    q: &Location,
    w: &Location,
    epsilon: f64,
    options: &CradleOptions,
) -> Result<CradleTrace> {
    cats_cradle_with_schedule(space, p, q, w, |_| epsilon, options)
}

/// [`cats_cradle`] with step `k` of length `epsilon(k)`.
///
/// The recorded `epsilon` is the first step length.
pub fn cats_cradle_with_schedule(
    space: &MetricSpaceSample,
    p: &Location,
    q: &Location,
    w: &Location,
    epsilon: impl Fn(usize) -> f64,
    options: &CradleOptions,
) -> Result<CradleTrace> {
    let eps0 = epsilon(0);
    if !(eps0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {eps0}"
        )));
    }
    let mut vertices = vec![w.clone()];
    let mut halt = HaltReason::MaxSteps;
    for k in 0..options.max_steps {
        let eps = epsilon(k);
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step {k} has length {eps}"
            )));
        }
        let here = vertices.last().unwrap().clone();
        let target = if k % 2 == 0 { p } else { q };
        let d = space.dist(&here, target);
        if d < eps * (1.0 - 1e-12) {
            halt = HaltReason::Converged;
            break;
        }
        let resolution = options.resolution.unwrap_or(eps / 10.0).min(eps / 10.0);
        let next = if d <= eps {
            target.clone()
        } else {
            match geodesic(space, &here, target, resolution) {
                Ok(g) => g.point_at(space, eps),
                Err(_) => {
                    halt = HaltReason::NoGeodesic;
                    break;
                }
            }
        };
        vertices.push(next);
        if let Some((c, r)) = &options.domain {
            if space.dist(c, vertices.last().unwrap()) >= *r {
                halt = HaltReason::LeftDomain;
                break;
            }
        }
    }
    let mut trace = CradleTrace {
        p: p.clone(),
        q: q.clone(),
        w: w.clone(),
        epsilon: eps0,
        vertices,
        ell: Vec::new(),
        s: Vec::new(),
        halt,
    };
    let (ell, s) = trace.recompute(space);
    trace.ell = ell;
    trace.s = s;
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub passed: bool,
    /// Largest `n` with `sₙ < R − ε`.
    pub n: usize,
    /// First vertex index `k ≤ 2n` with `|w w_k| ≥ R`, and that distance.
    pub violation: Option<(usize, f64)>,
}

/// Checks `|w w_k| < R` for `k ≤ 2n`, where `n` is the largest index with
/// `sₙ < R − ε`.
pub fn cradle_domain_containment(
    space: &MetricSpaceSample,
    trace: &CradleTrace,
    w: &Location,
    big_r: f64,
) -> ContainmentReport {
    let (_, s) = trace.recompute(space);
    let n = s
        .iter()
        .rposition(|&sn| sn < big_r - trace.epsilon)
        .unwrap_or(0);
    let last = (2 * n).min(trace.vertices.len() - 1);
    let violation = trace.vertices[..=last]
        .iter()
        .enumerate()
        .map(|(k, v)| (k, space.dist(w, v)))
        .find(|&(_, d)| d >= big_r);
    ContainmentReport {
        passed: violation.is_none(),
        n,
        violation,
    }
}
