//! The (1+3)-point comparison, hinge angles and curvature-domain checks.

mod domain;
mod hinge;

pub(crate) use domain::region_points;
pub use domain::{kappa_domain_check, DomainOptions, DomainReport, HingeWitness, Region};
pub use hinge::{
    adjacent_angle_check, default_scales, hinge_angle, AdjacentAngleReport, Hinge, HingeEstimate,
    SCALE_LEVELS,
};

use std::f64::consts::TAU;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bisect::bisect;
use crate::error::{Error, Result};
use crate::model_plane::{model_angle, EXISTENCE_GUARD};
use crate::space::MetricSpaceSample;

/// Absolute slack of every verdict before discretization error is added.
pub const BASE_TOLERANCE: f64 = 1e-8;

/// Multiplier of the geodesic error bound in [`budget`].
pub const BUDGET_FACTOR: f64 = 4.0;

/// Largest sample on which exhaustive quadruple scans are allowed.
pub const EXHAUSTIVE_LIMIT: usize = 40;

/// Slack `1e-8 + 4·error_bound` used by all comparison verdicts.
pub fn budget(error_bound: f64) -> f64 {
    BASE_TOLERANCE + BUDGET_FACTOR * error_bound
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// All three model angles are defined and sum to at most `2π`.
    Holds,
    /// At least one model angle is undefined; the comparison holds vacuously.
    HoldsUndefined,
    Fails,
}

/// Outcome of the comparison for one quadruple `(p; x¹, x², x³)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrupleVerdict {
    /// Point ids `[p, x¹, x², x³]`, when the quadruple came from a sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadruple: Option<[String; 4]>,
    /// `∠̃κ p(x¹,x²)`, `∠̃κ p(x²,x³)`, `∠̃κ p(x³,x¹)`.
    pub angles: [Option<f64>; 3],
    pub angle_sum: Option<f64>,
    pub verdict: Verdict,
    /// `angle_sum − 2π` for failing quadruples, `0` otherwise.
    pub excess: f64,
}

fn classify(kappa: f64, px: [f64; 3], xx: [f64; 3], tolerance: f64) -> QuadrupleVerdict {
    let angles = [
        model_angle(kappa, px[0], px[1], xx[0]),
        model_angle(kappa, px[1], px[2], xx[1]),
        model_angle(kappa, px[2], px[0], xx[2]),
    ];
    let (angle_sum, verdict, excess) = match angles {
        [Some(a), Some(b), Some(c)] => {
            let sum = a + b + c;
            if sum <= TAU + tolerance {
                (Some(sum), Verdict::Holds, 0.0)
            } else {
                (Some(sum), Verdict::Fails, sum - TAU)
            }
        }
        _ => (None, Verdict::HoldsUndefined, 0.0),
    };
    QuadrupleVerdict {
        quadruple: None,
        angles,
        angle_sum,
        verdict,
        excess,
    }
}

/// The (1+3)-point comparison at curvature `kappa`.
///
/// `px = [|px¹|, |px²|, |px³|]` and `xx = [|x¹x²|, |x²x³|, |x³x¹|]`. The
/// comparison holds when the three model angles at `p` sum to at most
/// `2π + tolerance`, or when one of them is undefined.
///
/// ```
/// use alexandrov::comparison::{quadruple_check, Verdict};
/// // hub of a tripod and its three leaves
/// let v = quadruple_check(0.0, [1.0; 3], [2.0; 3], 1e-8).unwrap();
/// assert_eq!(v.verdict, Verdict::Fails);
/// assert!((v.excess - std::f64::consts::PI).abs() < 1e-12);
/// ```
pub fn quadruple_check(
    kappa: f64,
    px: [f64; 3],
    xx: [f64; 3],
    tolerance: f64,
) -> Result<QuadrupleVerdict> {
    if px.iter().chain(&xx).any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::NotAMetric(
            "distances must be finite and non-negative".into(),
        ));
    }
    let triangles = [
        ("p,x1,x2", px[0], px[1], xx[0]),
        ("p,x2,x3", px[1], px[2], xx[1]),
        ("p,x3,x1", px[2], px[0], xx[2]),
        ("x1,x2,x3", xx[0], xx[1], xx[2]),
    ];
    for (name, a, b, c) in triangles {
        let slack = EXISTENCE_GUARD * (1.0 + a + b + c);
        if a > b + c + slack || b > a + c + slack || c > a + b + slack {
            return Err(Error::NotAMetric(format!(
                "triangle ({name}) has sides {a}, {b}, {c}"
            )));
        }
    }
    Ok(classify(kappa, px, xx, tolerance))
}

/// How quadruples are chosen by [`scan_quadruples`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Strategy {
    /// Every point `p` with every unordered triple of the other points.
    Exhaustive,
    /// `count` quadruples drawn from a ChaCha8 stream seeded with `seed`.
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub strategy: Strategy,
    pub tolerance: f64,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            strategy: Strategy::Exhaustive,
            tolerance: BASE_TOLERANCE,
            workers: None,
        }
    }
}

impl ScanOptions {
    pub fn new(strategy: Strategy) -> Self {
        ScanOptions {
            strategy,
            ..Default::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub holds: u64,
    pub holds_undefined: u64,
    pub fails: u64,
}

impl VerdictCounts {
    pub fn total(&self) -> u64 {
        self.holds + self.holds_undefined + self.fails
    }
}

/// Histogram range of `angle_sum − 2π`.
pub const HISTOGRAM_RANGE: (f64, f64) = (-TAU, std::f64::consts::PI);
pub const HISTOGRAM_BINS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub space: String,
    pub kappa: f64,
    pub strategy: Strategy,
    pub counts: VerdictCounts,
    /// Largest `angle_sum − 2π` over failing quadruples.
    pub worst_excess: Option<f64>,
    pub witness: Option<QuadrupleVerdict>,
    pub tolerance: f64,
    /// Counts of `angle_sum − 2π` over defined quadruples, in
    /// [`HISTOGRAM_BINS`] equal bins spanning [`HISTOGRAM_RANGE`] (clamped).
    #[serde(skip)]
    pub excess_histogram: Vec<u64>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.counts.fails == 0
    }
}

#[derive(Clone)]
struct Tally {
    counts: VerdictCounts,
    worst: Option<(f64, [usize; 4])>,
    histogram: Vec<u64>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            counts: VerdictCounts::default(),
            worst: None,
            histogram: vec![0; HISTOGRAM_BINS],
        }
    }

    fn add(&mut self, q: [usize; 4], v: &QuadrupleVerdict) {
        match v.verdict {
            Verdict::Holds => self.counts.holds += 1,
            Verdict::HoldsUndefined => self.counts.holds_undefined += 1,
            Verdict::Fails => {
                self.counts.fails += 1;
                self.offer(v.excess, q);
            }
        }
        if let Some(sum) = v.angle_sum {
            let (lo, hi) = HISTOGRAM_RANGE;
            let x = ((sum - TAU - lo) / (hi - lo) * HISTOGRAM_BINS as f64).floor();
            let bin = (x.max(0.0) as usize).min(HISTOGRAM_BINS - 1);
            self.histogram[bin] += 1;
        }
    }

    fn offer(&mut self, excess: f64, q: [usize; 4]) {
        let better = match self.worst {
            None => true,
            Some((e, w)) => excess > e || (excess == e && q < w),
        };
        if better {
            self.worst = Some((excess, q));
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.counts.holds += other.counts.holds;
        self.counts.holds_undefined += other.counts.holds_undefined;
        self.counts.fails += other.counts.fails;
        if let Some((e, q)) = other.worst {
            self.offer(e, q);
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }
}

fn check_indices(
    space: &MetricSpaceSample,
    kappa: f64,
    q: [usize; 4],
    tol: f64,
) -> QuadrupleVerdict {
    let [p, a, b, c] = q;
    classify(
        kappa,
        [space.d(p, a), space.d(p, b), space.d(p, c)],
        [space.d(a, b), space.d(b, c), space.d(c, a)],
        tol,
    )
}

/// Runs `f` on a pool with `workers` threads, or on the global pool.
pub(crate) fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Random quadruples `[p, x¹, x², x³]` with `x¹ < x² < x³`, all distinct.
fn random_quadruples(n: usize, count: usize, seed: u64) -> Vec<[usize; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p = rng.gen_range(0..n);
            let mut x: Vec<usize> = sample(&mut rng, n - 1, 3)
                .into_iter()
                .map(|i| if i >= p { i + 1 } else { i })
                .collect();
            x.sort_unstable();
            [p, x[0], x[1], x[2]]
        })
        .collect()
}

/// Applies [`quadruple_check`] to the quadruples of `space` chosen by the
/// strategy. The report is identical for every worker count.
pub fn scan_quadruples(
    space: &MetricSpaceSample,
    kappa: f64,
    options: &ScanOptions,
) -> Result<ComparisonReport> {
    let n = space.len();
    if n < 4 {
        return Err(Error::InfeasibleStrategy(format!(
            "a quadruple scan needs at least 4 points, the sample has {n}"
        )));
    }
    let tol = options.tolerance;
    let tally = match options.strategy {
        Strategy::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::InfeasibleStrategy(format!(
                    "exhaustive scans are limited to {EXHAUSTIVE_LIMIT} points, the sample has {n}"
                )));
            }
            with_workers(options.workers, || {
                (0..n)
                    .into_par_iter()
                    .map(|p| {
                        let mut t = Tally::new();
                        let others: Vec<usize> = (0..n).filter(|&i| i != p).collect();
                        for (ia, &a) in others.iter().enumerate() {
                            for (ib, &b) in others.iter().enumerate().skip(ia + 1) {
                                for &c in &others[ib + 1..] {
                                    let q = [p, a, b, c];
                                    t.add(q, &check_indices(space, kappa, q, tol));
                                }
                            }
                        }
                        t
                    })
                    .reduce(Tally::new, Tally::merge)
            })?
        }
        Strategy::Random { count, seed } => {
            let quads = random_quadruples(n, count, seed);
            with_workers(options.workers, || {
                quads
                    .par_chunks(1024)
                    .map(|chunk| {
                        let mut t = Tally::new();
                        for &q in chunk {
                            t.add(q, &check_indices(space, kappa, q, tol));
                        }
                        t
                    })
                    .reduce(Tally::new, Tally::merge)
            })?
        }
    };
    let witness = tally.worst.map(|(_, q)| {
        let mut v = check_indices(space, kappa, q, tol);
        v.quadruple = Some(q.map(|i| space.id(i).to_string()));
        v
    });
    Ok(ComparisonReport {
        space: space.label.clone(),
        kappa,
        strategy: options.strategy,
        counts: tally.counts,
        worst_excess: tally.worst.map(|(e, _)| e),
        witness,
        tolerance: tol,
        excess_histogram: tally.histogram,
    })
}

/// Bisects for the largest `κ` at which the scan passes.
///
/// Requires the scan to pass at `kappa_lo` and fail at `kappa_hi`. The
/// returned `κ*` satisfies: the scan passes at `κ* − tol` and fails at
/// `κ* + tol`.
pub fn max_lower_bound(
    space: &MetricSpaceSample,
    kappa_lo: f64,
    kappa_hi: f64,
    tol: f64,
    options: &ScanOptions,
) -> Result<f64> {
    if !(tol > 0.0) || !(kappa_lo < kappa_hi) {
        return Err(Error::InvalidBracket(format!(
            "need kappa_lo < kappa_hi and tol > 0, got [{kappa_lo}, {kappa_hi}], tol {tol}"
        )));
    }
    let passes = |k: f64| scan_quadruples(space, k, options).map(|r| r.passed());
    if !passes(kappa_lo)? {
        return Err(Error::InvalidBracket(format!(
            "scan fails at the lower end {kappa_lo}"
        )));
    }
    if passes(kappa_hi)? {
        return Err(Error::InvalidBracket(format!(
            "scan passes at the upper end {kappa_hi}"
        )));
    }
    let mut failure = None;
    let (lo, hi) = bisect(kappa_lo, kappa_hi, tol, |k| match passes(k) {
        Ok(ok) => ok,
        Err(e) => {
            failure.get_or_insert(e);
            false
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(0.5 * (lo + hi)),
    }
}
