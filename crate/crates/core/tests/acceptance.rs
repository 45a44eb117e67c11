//! The twelve acceptance criteria, one line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use alexandrov::comparison::{
    adjacent_angle_check, budget, max_lower_bound, scan_quadruples, ScanOptions, Strategy,
};
use alexandrov::constructions::{
    cats_cradle, cradle_domain_containment, key_lemma_check, radial_curve,
    radial_monotonicity_check, CradleOptions, KeyLemmaOptions, KeyLemmaVerdict, RadialOptions,
};
use alexandrov::globalization::{globalization_experiment, GlobalizationOptions};
use alexandrov::model_plane::model_diameter;
use alexandrov::space::geodesic;
use alexandrov::{
    generate_space, model_angle, model_side, Location, MetricSpaceSample, SpaceKind, SpaceSpec,
    Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn sph(colat: f64, lon: f64) -> Location {
    Location::Sphere([
        colat.sin() * lon.cos(),
        colat.sin() * lon.sin(),
        colat.cos(),
    ])
}

fn in_cap(rng: &mut ChaCha8Rng, max_colat: f64) -> Location {
    sph(rng.gen_range(0.0..max_colat), rng.gen_range(0.0..2.0 * PI))
}

fn in_square(rng: &mut ChaCha8Rng, half: f64) -> Location {
    Location::Plane([rng.gen_range(-half..half), rng.gen_range(-half..half)])
}

fn in_hyperbolic_disk(rng: &mut ChaCha8Rng, max_r: f64) -> Location {
    let (r, f): (f64, f64) = (rng.gen_range(0.0..max_r), rng.gen_range(0.0..2.0 * PI));
    Location::Hyperboloid([r.cosh(), r.sinh() * f.cos(), r.sinh() * f.sin()])
}

fn space(spec: SpaceSpec) -> MetricSpaceSample {
    generate_space(&spec).expect("sample generates")
}

fn sphere25() -> MetricSpaceSample {
    space(SpaceSpec::new(SpaceKind::Sphere).with_n(25).with_seed(7))
}

fn hyperbolic() -> MetricSpaceSample {
    space(
        SpaceSpec::new(SpaceKind::Hyperbolic)
            .with_n(24)
            .with_seed(4)
            .with_extent(2.5),
    )
}

fn exhaustive() -> ScanOptions {
    ScanOptions::new(Strategy::Exhaustive)
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let kappa = rng.gen_range(-4.0..=4.0);
        let cap = 1.0f64.min(model_diameter(kappa) / 2.0);
        let (a, b) = (rng.gen_range(0.0..cap), rng.gen_range(0.0..cap));
        let gamma = rng.gen_range(0.0..=PI);
        // a zero side leaves the angle undetermined
        if a == 0.0 || b == 0.0 {
            continue;
        }
        let c = model_side(kappa, a, b, gamma).unwrap();
        worst = worst.max((model_angle(kappa, a, b, c).unwrap() - gamma).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs < 5.0,
        format!("max error {worst:.2e}, {secs:.2} s"),
    )
}

fn kappa_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut checked, mut worst) = (0, 0.0f64);
    for _ in 0..10_000 {
        let (k1, k2) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let (lo, hi): (f64, f64) = (f64::min(k1, k2), f64::max(k1, k2));
        // a random triangle shrunk to fit the smaller model plane
        let x: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let d = |i: usize, j: usize| (x[2 * i] - x[2 * j]).hypot(x[2 * i + 1] - x[2 * j + 1]);
        let (a, b, c) = (d(0, 1), d(0, 2), d(1, 2));
        let s = (0.95 * model_diameter(hi) / (a + b + c)).min(1.0);
        if let (Some(f), Some(g)) = (
            model_angle(lo, a * s, b * s, c * s),
            model_angle(hi, a * s, b * s, c * s),
        ) {
            checked += 1;
            worst = worst.max(f - g);
        }
    }
    outcome(
        checked == 10_000 && worst <= 1e-9,
        format!("{checked} triples, largest decrease {worst:.2e}"),
    )
}

fn sphere_positive() -> Outcome {
    let start = Instant::now();
    let s = sphere25();
    let at1 = scan_quadruples(&s, 1.0, &exhaustive()).unwrap();
    let at12 = scan_quadruples(&s, 1.2, &exhaustive()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        at1.counts.fails == 0 && at12.counts.fails >= 1 && secs < 10.0,
        format!(
            "fails {} at 1, {} at 1.2, {secs:.2} s",
            at1.counts.fails, at12.counts.fails
        ),
    )
}

fn hyperbolic_bound() -> Outcome {
    let s = hyperbolic();
    let diam = (0..s.len())
        .flat_map(|i| (0..s.len()).map(move |j| (i, j)))
        .map(|(i, j)| s.d(i, j))
        .fold(0.0, f64::max);
    let at_m1 = scan_quadruples(&s, -1.0, &exhaustive()).unwrap();
    let at_half = scan_quadruples(&s, -0.5, &exhaustive()).unwrap();
    let kmax = max_lower_bound(&s, -2.0, 0.0, 1e-3, &exhaustive());
    let ok = matches!(kmax, Ok(k) if (k + 1.0).abs() <= 0.1);
    outcome(
        diam >= 2.0 && at_m1.passed() && !at_half.passed() && ok,
        format!(
            "diameter {diam:.2}, fails {} at -1, {} at -0.5, kappa_max {kmax:?}",
            at_m1.counts.fails, at_half.counts.fails
        ),
    )
}

fn tripod_control() -> Outcome {
    let s = space(SpaceSpec::new(SpaceKind::Tripod));
    let r = scan_quadruples(&s, 0.0, &exhaustive()).unwrap();
    let Some(w) = r.witness.as_ref() else {
        return outcome(false, "no witness".into());
    };
    let q = w.quadruple.clone().unwrap();
    outcome(
        q[0] == "hub" && (w.excess - PI).abs() <= 1e-6,
        format!("witness {q:?}, excess {:.9}", w.excess),
    )
}

fn adjacent_angles() -> Outcome {
    let backends: [(&str, MetricSpaceSample, f64); 3] = [
        (
            "euclidean",
            space(SpaceSpec::new(SpaceKind::Euclidean).with_n(8)),
            0.0,
        ),
        (
            "sphere",
            space(SpaceSpec::new(SpaceKind::Sphere).with_n(8)),
            1.0,
        ),
        (
            "hyperbolic",
            space(SpaceSpec::new(SpaceKind::Hyperbolic).with_n(8)),
            -1.0,
        ),
    ];
    let mut details = Vec::new();
    let mut passed = true;
    for (name, s, kappa) in &backends {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (mut worst, mut over) = (0.0f64, 0);
        for _ in 0..100 {
            let pick = |rng: &mut ChaCha8Rng| match *kappa {
                k if k > 0.0 => in_cap(rng, 1.0),
                k if k < 0.0 => in_hyperbolic_disk(rng, 1.5),
                _ => in_square(rng, 1.0),
            };
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let Ok(g) = geodesic(s, &x, &y, 0.02) else {
                continue;
            };
            let t = rng.gen_range(0.2..0.8) * g.length;
            let r = adjacent_angle_check(s, &g, t, &z, *kappa, 0.02).unwrap();
            let limit = if *kappa == 0.0 { 1e-6 } else { r.budget };
            over += usize::from(r.deviation > limit);
            worst = worst.max(r.deviation);
        }
        passed &= over == 0;
        details.push(format!("{name} max {worst:.1e} ({over} over)"));
    }
    outcome(passed, details.join(", "))
}

fn key_lemma_models() -> Outcome {
    let opts = KeyLemmaOptions::default();
    let mut passed = true;
    let mut details = Vec::new();
    let models: [(&str, MetricSpaceSample, f64); 2] = [
        (
            "euclidean",
            space(SpaceSpec::new(SpaceKind::Euclidean).with_n(20).with_seed(1)),
            0.0,
        ),
        (
            "sphere",
            space(SpaceSpec::new(SpaceKind::Sphere).with_n(30).with_seed(1)),
            1.0,
        ),
    ];
    for (name, s, kappa) in &models {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut equal, mut worst) = (0, 0.0f64);
        for _ in 0..100 {
            // caps of colatitude 0.6 keep every distance below π/2
            let pick = |rng: &mut ChaCha8Rng| {
                if *kappa > 0.0 {
                    in_cap(rng, 0.6)
                } else {
                    in_square(rng, 1.0)
                }
            };
            let (p, q, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let r = key_lemma_check(s, &p, &q, &w, *kappa, &opts).unwrap();
            let gap = r.model_pq.map_or(f64::INFINITY, |m| (r.pq - m).abs());
            worst = worst.max(gap);
            equal += usize::from(r.verdict == KeyLemmaVerdict::Verified && gap <= r.budget);
        }
        passed &= equal == 100;
        details.push(format!("{name} {equal}/100 equal (max gap {worst:.1e})"));
    }
    let cone = space(
        SpaceSpec::new(SpaceKind::Cone)
            .with_total_angle(1.5 * PI)
            .with_n(30),
    );
    let r = key_lemma_check(
        &cone,
        &Location::Cone { r: 1.0, theta: 0.0 },
        &Location::Cone {
            r: 1.0,
            theta: 0.7 * PI,
        },
        &Location::Cone {
            r: 0.3,
            theta: 1.1 * PI,
        },
        0.0,
        &opts,
    )
    .unwrap();
    let strict =
        r.verdict == KeyLemmaVerdict::Verified && r.model_pq.is_some_and(|m| r.pq < m - r.budget);
    passed &= strict;
    details.push(format!(
        "cone |pq| {:.4} < {:.4}",
        r.pq,
        r.model_pq.unwrap_or(f64::NAN)
    ));
    outcome(passed, details.join(", "))
}

fn radial_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = space(SpaceSpec::new(SpaceKind::Sphere).with_n(30).with_seed(2));
    let (mut over, mut worst) = (0, 0.0f64);
    for _ in 0..50 {
        let (w, a, p) = (
            in_cap(&mut rng, 0.4),
            in_cap(&mut rng, 0.4),
            in_cap(&mut rng, 0.4),
        );
        let wa = s.dist(&w, &a);
        if wa < 0.02 {
            continue;
        }
        let big_r = rng.gen_range(wa + 0.05..FRAC_PI_2 - 0.01);
        let c = radial_curve(&s, &w, &a, big_r, &RadialOptions::new(1.0, 0.05)).unwrap();
        let m = radial_monotonicity_check(&s, &c, &p, 1.0);
        let slack = budget(geodesic(&s, &w, &a, 0.02).unwrap().error_bound);
        over += usize::from(m.max_increase > slack);
        worst = worst.max(m.max_increase);
    }
    let plane = space(SpaceSpec::new(SpaceKind::Euclidean).with_n(20));
    let mut flat = 0.0f64;
    for _ in 0..50 {
        let (w, a, p) = (
            in_square(&mut rng, 1.0),
            in_square(&mut rng, 1.0),
            in_square(&mut rng, 1.0),
        );
        let big_r = plane.dist(&w, &a) + rng.gen_range(0.1..1.0);
        let c = radial_curve(&plane, &w, &a, big_r, &RadialOptions::new(0.0, 0.05)).unwrap();
        flat = flat.max(radial_monotonicity_check(&plane, &c, &p, 0.0).max_increase);
    }
    outcome(
        over == 0 && flat <= 1e-9,
        format!("sphere max increase {worst:.1e} ({over} over budget), plane {flat:.1e}"),
    )
}

fn cradle_containment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let plane = space(SpaceSpec::new(SpaceKind::Euclidean).with_n(10));
    let sphere = space(SpaceSpec::new(SpaceKind::Sphere).with_n(30));
    let (mut runs, mut contained, mut drift) = (0, 0, 0.0f64);
    for k in 0..100 {
        let (s, [p, q, w], eps, big_r) = if k % 2 == 0 {
            let pts = [(); 3].map(|_| in_square(&mut rng, 1.0));
            (&plane, pts, 0.1, 1.5)
        } else {
            let pts = [(); 3].map(|_| in_cap(&mut rng, 0.5));
            (&sphere, pts, 0.05, 0.8)
        };
        let trace = cats_cradle(s, &p, &q, &w, eps, &CradleOptions::new(200)).unwrap();
        let (ell, sums) = trace.recompute(s);
        for (x, y) in ell.iter().zip(&trace.ell).chain(sums.iter().zip(&trace.s)) {
            drift = drift.max((x - y).abs());
        }
        runs += 1;
        contained += usize::from(cradle_domain_containment(s, &trace, &w, big_r).passed);
    }
    outcome(
        contained == runs && drift <= 1e-12,
        format!("{contained}/{runs} contained, recomputation drift {drift:.1e}"),
    )
}

fn incomplete(kind: SpaceKind, n: usize, seed: u64) -> SpaceSpec {
    SpaceSpec::new(kind)
        .with_n(n)
        .with_seed(seed)
        .with_variant(Variant::Incomplete)
}

fn globalization_positive() -> Outcome {
    let opts = GlobalizationOptions::default();
    let timed = |spec: SpaceSpec, kappa: f64| {
        let start = Instant::now();
        let r = globalization_experiment(&spec, kappa, 0.3, &opts).unwrap();
        (
            r.passed && r.recompute_verdict() == r.passed,
            start.elapsed().as_secs_f64(),
        )
    };
    let (hemi, t1) = timed(incomplete(SpaceKind::Hemisphere, 40, 3), 1.0);
    let (cone, t2) = timed(
        incomplete(SpaceKind::Cone, 30, 1).with_total_angle(1.5 * PI),
        0.0,
    );
    outcome(
        hemi && cone && t1 < 60.0 && t2 < 60.0,
        format!("hemisphere {hemi} ({t1:.1} s), cone 3pi/2 {cone} ({t2:.1} s)"),
    )
}

fn globalization_negative() -> Outcome {
    let spec = incomplete(SpaceKind::Cone, 20, 1).with_total_angle(2.5 * PI);
    let r = globalization_experiment(&spec, 0.0, 0.3, &GlobalizationOptions::default()).unwrap();
    let witness = r
        .global
        .as_ref()
        .and_then(|g| g.witness.as_ref())
        .and_then(|w| w.quadruple.clone());
    let apex = witness
        .as_ref()
        .is_some_and(|q| q.iter().any(|id| id == "apex"));
    outcome(
        !r.passed && apex,
        format!("passed {}, global witness {witness:?}", r.passed),
    )
}

fn determinism() -> Outcome {
    let bytes = |workers: usize| {
        let scan = scan_quadruples(&sphere25(), 1.2, &exhaustive().with_workers(workers)).unwrap();
        let random = ScanOptions::new(Strategy::Random {
            count: 50_000,
            seed: 11,
        })
        .with_workers(workers);
        let sampled = scan_quadruples(&hyperbolic(), -0.5, &random).unwrap();
        let opts = GlobalizationOptions {
            workers: Some(workers),
            ..Default::default()
        };
        let global =
            globalization_experiment(&incomplete(SpaceKind::Hemisphere, 40, 3), 1.0, 0.3, &opts)
                .unwrap();
        [
            serde_json::to_vec(&scan).unwrap(),
            serde_json::to_vec(&sampled).unwrap(),
            serde_json::to_vec(&global).unwrap(),
        ]
    };
    let (one, four) = (bytes(1), bytes(4));
    let same = one.iter().zip(&four).filter(|(a, b)| a == b).count();
    outcome(
        same == 3,
        format!("{same}/3 reports byte-identical for 1 and 4 workers"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("model-plane round trip", round_trip),
        ("kappa-monotonicity of model angles", kappa_monotonicity),
        ("sphere positive", sphere_positive),
        ("hyperbolic negative bound", hyperbolic_bound),
        ("tripod negative control", tripod_control),
        ("adjacent angles sum to pi", adjacent_angles),
        ("key lemma on models", key_lemma_models),
        ("radial monotonicity", radial_monotonicity),
        ("cat's cradle containment", cradle_containment),
        ("globalization positive", globalization_positive),
        ("globalization negative", globalization_negative),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let mark = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        println!("criterion {:>2} {mark} {name}: {}", k + 1, o.detail);
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
