//! From local to global comparison.
//!
//! [`globalization_experiment`] certifies small balls around every point of
//! an incomplete sample, builds the completion and scans it for failing
//! quadruples. The remaining operations exercise the individual steps of the
//! local-to-global argument on concrete configurations.

mod chain;
mod merge;
mod reformulation;

use rayon::prelude::*;
use serde::Serialize;

use crate::comparison::{
    kappa_domain_check, scan_quadruples, with_workers, ComparisonReport, DomainOptions,
    DomainReport, Region, ScanOptions, Strategy, EXHAUSTIVE_LIMIT,
};
use crate::error::{Error, Result};
use crate::space::{completion, generate_space, Location, MetricSpaceSample, SpaceSpec, Variant};

pub use chain::{segment_chain, ChainOptions, SegmentChain};
pub use merge::{
    domain_merge_check, geodesic_containment_scan, ContainmentScanOptions, ContainmentScanReport,
    Escape, MergeFailure, MergeOptions, MergeReport, MergeStep,
};
pub use reformulation::{
    reformulation_check, reformulation_sweep, ReformulationOptions, ReformulationReport,
};

/// Stated in every report that depends on a second curvature value.
pub const SCOPE_NOTE: &str =
    "checked at the stated curvature values only; no limit over kappa1 < kappa is verified";

/// Default number of random quadruples when the completed sample is too large
/// for an exhaustive scan.
pub const DEFAULT_GLOBAL_QUADRUPLES: usize = 200_000;

/// A ball with its domain certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverBall {
    pub center: Location,
    /// Id of the sample point at the center, or a description of it.
    pub label: String,
    /// Radius actually certified (after halvings).
    pub radius: f64,
    pub halvings: u32,
    /// Seed the certificate was computed with.
    pub seed: u64,
    pub certificate: DomainReport,
}

impl CoverBall {
    pub fn passed(&self) -> bool {
        self.certificate.passed
    }
}

/// Balls certified as curvature-`κ` domains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaDomainCover {
    pub kappa: f64,
    pub options: DomainOptions,
    pub balls: Vec<CoverBall>,
}

impl KappaDomainCover {
    pub fn passed(&self) -> bool {
        self.balls.iter().all(CoverBall::passed)
    }

    /// Recomputes every certificate and reports whether each one matches the
    /// stored record exactly.
    pub fn recheck(&self, space: &MetricSpaceSample) -> Result<bool> {
        for b in &self.balls {
            let opts = DomainOptions {
                seed: b.seed,
                ..self.options
            };
            let region = Region::ball(b.center.clone(), b.radius);
            if kappa_domain_check(space, &region, self.kappa, &opts)? != b.certificate {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `x` lies in one of the balls.
    pub fn covers(&self, space: &MetricSpaceSample, x: &Location) -> bool {
        self.balls
            .iter()
            .any(|b| space.dist(&b.center, x) < b.radius)
    }
}

/// Certifies `B(center, radius)`, halving the radius up to `max_halvings`
/// times while certification fails. The last attempt is returned either way.
pub(crate) fn certify_ball(
    space: &MetricSpaceSample,
    center: &Location,
    label: String,
    radius: f64,
    kappa: f64,
    options: &DomainOptions,
    max_halvings: u32,
) -> Result<CoverBall> {
    let mut h = 0;
    loop {
        let r = radius / f64::from(1u32 << h);
        let report = kappa_domain_check(space, &Region::ball(center.clone(), r), kappa, options)?;
        if report.passed || h == max_halvings {
            return Ok(CoverBall {
                center: center.clone(),
                label,
                radius: r,
                halvings: h,
                seed: options.seed,
                certificate: report,
            });
        }
        h += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalizationOptions {
    /// Strategy of the global scan; by default exhaustive when the completed
    /// sample has at most [`EXHAUSTIVE_LIMIT`] points, random otherwise.
    pub strategy: Option<Strategy>,
    pub max_halvings: u32,
    pub domain: DomainOptions,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for GlobalizationOptions {
    fn default() -> Self {
        GlobalizationOptions {
            strategy: None,
            max_halvings: 4,
            domain: DomainOptions::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Local,
    Completion,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalPhase {
    pub cover: KappaDomainCover,
    /// Labels of the balls whose certificate failed at every radius.
    pub failed: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionSummary {
    pub built: bool,
    pub points_before: usize,
    pub points_after: usize,
    pub added: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalizationReport {
    pub spec: SpaceSpec,
    pub kappa: f64,
    pub local_radius: f64,
    pub local: LocalPhase,
    pub completion: CompletionSummary,
    pub global: Option<ComparisonReport>,
    pub failed_phases: Vec<Phase>,
    pub passed: bool,
    pub scope: &'static str,
}

impl GlobalizationReport {
    /// The verdict as implied by the three phase records.
    pub fn recompute_verdict(&self) -> bool {
        self.local.cover.passed()
            && self.completion.built
            && self.global.as_ref().is_some_and(|g| g.counts.fails == 0)
    }
}

/// Certifies balls of `local_radius` around each point of the incomplete
/// sample described by `spec`, completes it and scans the completion.
///
/// All phases run even when an earlier one fails, so a failing report still
/// carries the global witness.
pub fn globalization_experiment(
    spec: &SpaceSpec,
    kappa: f64,
    local_radius: f64,
    options: &GlobalizationOptions,
) -> Result<GlobalizationReport> {
    if spec.variant != Variant::Incomplete || !spec.kind.has_incomplete_variant() {
        return Err(Error::InvalidParameter(format!(
            "`{spec}` is not an incomplete space with a known completion"
        )));
    }
    if !(local_radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "local radius must be positive, got {local_radius}"
        )));
    }
    let space = generate_space(spec)?;

    let balls = with_workers(options.workers, || {
        space
            .points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let opts = DomainOptions {
                    seed: options.domain.seed.wrapping_add(i as u64),
                    ..options.domain
                };
                certify_ball(
                    &space,
                    &p.location,
                    p.id.clone(),
                    local_radius,
                    kappa,
                    &opts,
                    options.max_halvings,
                )
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let cover = KappaDomainCover {
        kappa,
        options: options.domain,
        balls,
    };
    let failed: Vec<String> = cover
        .balls
        .iter()
        .filter(|b| !b.passed())
        .map(|b| b.label.clone())
        .collect();
    let local = LocalPhase {
        passed: failed.is_empty(),
        failed,
        cover,
    };

    let (completion_summary, global) = match completion(&space) {
        Ok(done) => {
            let strategy = options
                .strategy
                .unwrap_or(if done.len() <= EXHAUSTIVE_LIMIT {
                    Strategy::Exhaustive
                } else {
                    Strategy::Random {
                        count: DEFAULT_GLOBAL_QUADRUPLES,
                        seed: spec.seed,
                    }
                });
            let mut scan = ScanOptions::new(strategy);
            scan.workers = options.workers;
            let report = scan_quadruples(&done, kappa, &scan)?;
            let summary = CompletionSummary {
                built: true,
                points_before: space.len(),
                points_after: done.len(),
                added: done
                    .completion_points()
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                error: None,
            };
            (summary, Some(report))
        }
        Err(e) => (
            CompletionSummary {
                built: false,
                points_before: space.len(),
                points_after: space.len(),
                added: Vec::new(),
                error: Some(e.to_string()),
            },
            None,
        ),
    };

    let mut failed_phases = Vec::new();
    if !local.passed {
        failed_phases.push(Phase::Local);
    }
    if !completion_summary.built {
        failed_phases.push(Phase::Completion);
    }
    if !global.as_ref().is_some_and(ComparisonReport::passed) {
        failed_phases.push(Phase::Global);
    }
    Ok(GlobalizationReport {
        spec: spec.clone(),
        kappa,
        local_radius,
        local,
        completion: completion_summary,
        global,
        passed: failed_phases.is_empty(),
        failed_phases,
        scope: SCOPE_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceKind;
    use std::f64::consts::PI;

    #[test]
    fn complete_specs_are_rejected() {
        let spec = SpaceSpec::new(SpaceKind::Sphere);
        assert!(globalization_experiment(&spec, 1.0, 0.3, &Default::default()).is_err());
        let spec = SpaceSpec::new(SpaceKind::Hemisphere);
        assert!(globalization_experiment(&spec, 1.0, 0.3, &Default::default()).is_err());
    }

    #[test]
    fn narrow_cone_globalizes() {
        let spec = SpaceSpec::new(SpaceKind::Cone)
            .with_total_angle(1.5 * PI)
            .with_n(16)
            .with_seed(1)
            .with_variant(Variant::Incomplete);
        let r = globalization_experiment(&spec, 0.0, 0.3, &Default::default()).unwrap();
        assert!(r.passed, "{:?}", r.failed_phases);
        assert_eq!(r.completion.added, vec!["apex".to_string()]);
        assert_eq!(r.recompute_verdict(), r.passed);
    }

    #[test]
    fn cover_rechecks_identically() {
        let spec = SpaceSpec::new(SpaceKind::Disk)
            .with_n(10)
            .with_seed(4)
            .with_variant(Variant::Incomplete);
        let r = globalization_experiment(&spec, 0.0, 0.3, &Default::default()).unwrap();
        let space = generate_space(&spec).unwrap();
        assert!(r.local.cover.recheck(&space).unwrap());
    }
}
