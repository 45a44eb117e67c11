use serde::Serialize;

use crate::bisect::bisect;
use crate::comparison::{
    budget, default_scales, hinge_angle, kappa_domain_check, DomainOptions, DomainReport, Hinge,
    Region,
};
use crate::error::Result;
use crate::model_plane::{
    alexandrov_lemma_split, dist_to_opposite_side, model_angle, model_diameter, model_side,
    split_angles, LemmaSplit, ModelTriangle,
};
use crate::space::{geodesic, Location, MetricSpaceSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyLemmaVerdict {
    /// `|pq| ≤ |p̃q̃|` within budget.
    Verified,
    HypothesesUnmet,
    Violated,
}

/// Which radius of the ball around `w` must be a curvature domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Threshold {
    /// Distance from `w̃` to the side `[p̃ q̃]`.
    Distance,
    /// Length of the bisector of the model triangle at `w̃`.
    Bisector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyLemmaOptions {
    pub resolution: f64,
    pub threshold: Threshold,
    /// Certify `B[w, R]` before comparing.
    pub check_domain: bool,
    pub domain: DomainOptions,
    /// Scale of the split diagnostic; defaults to
    /// `0.099·min(1, R/|wp|, R/|wq|)`.
    pub delta: Option<f64>,
}

impl Default for KeyLemmaOptions {
    fn default() -> Self {
        KeyLemmaOptions {
            resolution: 0.02,
            threshold: Threshold::Distance,
            check_domain: true,
            domain: DomainOptions::default(),
            delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyLemmaReport {
    pub verdict: KeyLemmaVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub kappa: f64,
    pub wp: f64,
    pub wq: f64,
    pub pq: f64,
    /// Hinge angle `∠[w p q]`.
    pub hinge_angle: f64,
    /// `|p̃q̃|` of the model triangle with the same hinge.
    pub model_pq: Option<f64>,
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    pub domain: Option<DomainReport>,
    pub delta: Option<f64>,
    /// Split of `[p_δ q_δ]` by Alexandrov's lemma, or why it failed.
    pub split: Option<std::result::Result<LemmaSplit, String>>,
    pub budget: f64,
}

/// Length of the bisector from `W` in the model triangle `[P W Q]`.
fn bisector_length(kappa: f64, tri: &ModelTriangle) -> Option<f64> {
    let beta = tri.angle_p()?;
    let (lo, hi) = bisect(0.0, 1.0, 1e-12, |t| {
        split_angles(kappa, tri.a, tri.b, tri.c, t).is_some_and(|(x, y)| x <= y)
    });
    model_side(kappa, tri.a, 0.5 * (lo + hi) * tri.c, beta)
}

/// Checks `|pq| ≤ |p̃q̃|` for the model triangle with `|p̃w̃| = |pw|`,
/// `|q̃w̃| = |qw|` and angle `∠[w p q]` at `w̃`, under the hypotheses
/// `R < ϖκ/2` and `B[w, R]` a curvature-`κ` domain.
pub fn key_lemma_check(
    space: &MetricSpaceSample,
    p: &Location,
    q: &Location,
    w: &Location,
    kappa: f64,
    options: &KeyLemmaOptions,
) -> Result<KeyLemmaReport> {
    let gp = geodesic(space, w, p, options.resolution)?;
    let gq = geodesic(space, w, q, options.resolution)?;
    let (wp, wq, pq) = (gp.length, gq.length, space.dist(p, q));
    let hinge = Hinge::new(
        space,
        gp.clone(),
        gq.clone(),
        &default_scales(wp.min(wq) / 8.0),
    )?;
    let angle = hinge_angle(space, &hinge, kappa)?.angle;
    let slack = budget(hinge.error_bound());
    let mut report = KeyLemmaReport {
        verdict: KeyLemmaVerdict::HypothesesUnmet,
        detail: None,
        kappa,
        wp,
        wq,
        pq,
        hinge_angle: angle,
        model_pq: None,
        big_r: None,
        domain: None,
        delta: None,
        split: None,
        budget: slack,
    };
    let tri = ModelTriangle::from_hinge(kappa, wp, wq, angle);
    if !tri.is_defined() {
        report.detail = Some("model triangle undefined for the hinge data".into());
        return Ok(report);
    }
    report.model_pq = Some(tri.c);
    let big_r = match options.threshold {
        Threshold::Distance => dist_to_opposite_side(&tri)?,
        Threshold::Bisector => bisector_length(kappa, &tri).unwrap_or(tri.a.min(tri.b)),
    };
    report.big_r = Some(big_r);
    if big_r >= 0.5 * model_diameter(kappa) {
        report.detail = Some(format!("R = {big_r} is not below half the model diameter"));
        return Ok(report);
    }
    if big_r <= 1e-12 {
        // w̃ lies on [p̃ q̃]: the claim is the triangle inequality
        report.verdict = if pq <= wp + wq + slack {
            KeyLemmaVerdict::Verified
        } else {
            KeyLemmaVerdict::Violated
        };
        return Ok(report);
    }
    if options.check_domain {
        let d = kappa_domain_check(
            space,
            &Region::ball(w.clone(), big_r),
            kappa,
            &options.domain,
        )?;
        let ok = d.passed;
        report.domain = Some(d);
        if !ok {
            report.detail = Some("ball around w is not a certified domain".into());
            return Ok(report);
        }
    }

    let delta = options
        .delta
        .unwrap_or(0.099 * 1f64.min(big_r / wp).min(big_r / wq));
    report.delta = Some(delta);
    let foot = tri.foot_parameter()?;
    let targets = (
        model_angle(kappa, wp, big_r, foot),
        model_angle(kappa, wq, big_r, tri.c - foot),
    );
    let p_d = gp.point_at(space, delta * wp);
    let q_d = gq.point_at(space, delta * wq);
    report.split = Some(match targets {
        (Some(tp), Some(tq)) => alexandrov_lemma_split(
            kappa,
            (delta * wp, delta * wq),
            (tp, tq),
            space.dist(&p_d, &q_d),
        )
        .map_err(|e| e.to_string()),
        _ => Err("foot angles undefined".into()),
    });

    report.verdict = if pq <= tri.c + slack {
        KeyLemmaVerdict::Verified
    } else {
        KeyLemmaVerdict::Violated
    };
    Ok(report)
}
