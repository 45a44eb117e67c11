use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use alexandrov::comparison::{
    hinge_angle, max_lower_bound, scan_quadruples, ComparisonReport, Hinge, ScanOptions, Strategy,
    HISTOGRAM_BINS, HISTOGRAM_RANGE,
};
use alexandrov::constructions::{
    cats_cradle, cradle_domain_containment, key_lemma_check, CradleOptions, KeyLemmaOptions,
    KeyLemmaVerdict,
};
use alexandrov::globalization::{globalization_experiment, GlobalizationOptions};
use alexandrov::space::{load_distance_matrix, write_distance_matrix};
use alexandrov::{generate_space, Error, Location, MetricSpaceSample, Result, SpaceSpec};
use serde::Serialize;
use serde_json::json;

use crate::args::{Command, Common, Input};

/// Tabular plot data written next to the report as `<stem>.<name>.csv`.
struct Series {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Runs one subcommand. `Ok(true)` when every check passed.
pub fn run(command: &Command) -> Result<bool> {
    match command {
        Command::Gen(a) => {
            let space = generate_space(&a.space.parse()?)?;
            match &a.out {
                Some(path) => write_distance_matrix(&space, File::create(path)?)?,
                None => write_distance_matrix(&space, io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Check(a) => {
            let space = load(&a.input, &a.common)?;
            let strategy = a.strategy.resolve()?.unwrap_or(Strategy::Exhaustive);
            let opts = scan_options(strategy, &a.common).with_tolerance(a.tolerance);
            let report = scan_quadruples(&space, a.kappa, &opts)?;
            let passed = report.passed();
            emit(
                command,
                &report,
                vec![histogram(&report)],
                a.common.out.as_deref(),
            )?;
            Ok(passed)
        }
        Command::KappaMax(a) => {
            let space = load(&a.input, &a.common)?;
            let strategy = a.strategy.resolve()?.unwrap_or(Strategy::Exhaustive);
            let opts = scan_options(strategy, &a.common);
            let kappa = max_lower_bound(&space, a.lo, a.hi, a.resolution, &opts)?;
            let result = json!({ "space": space.label, "kappa_max": kappa });
            emit(command, &result, vec![], a.common.out.as_deref())?;
            Ok(true)
        }
        Command::Hinge(a) => {
            let space = load(&a.input, &a.common)?;
            let [p, x, y] = points(&space, [&a.at, &a.x, &a.y])?;
            let hinge = Hinge::between(&space, &p, &x, &y, a.r0, a.resolution)?;
            let est = hinge_angle(&space, &hinge, a.kappa)?;
            let series = Series {
                name: "diagonal",
                header: vec!["scale", "model_angle"],
                rows: est
                    .diagonal
                    .iter()
                    .map(|&(s, v)| vec![num(s), opt(v)])
                    .collect(),
            };
            emit(command, &est, vec![series], a.common.out.as_deref())?;
            Ok(est.monotone)
        }
        Command::Cradle(a) => {
            let space = load(&a.input, &a.common)?;
            let [p, q, w] = points(&space, [&a.p, &a.q, &a.w])?;
            let trace = cats_cradle(&space, &p, &q, &w, a.epsilon, &CradleOptions::new(a.steps))?;
            let containment = a
                .radius
                .map(|r| cradle_domain_containment(&space, &trace, &w, r));
            let passed = containment.as_ref().is_none_or(|c| c.passed);
            let vertices = Series {
                name: "vertices",
                header: vec!["k", "dist_w", "dist_p", "dist_q"],
                rows: trace
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let d = [&w, &p, &q].map(|o| num(space.dist(o, v)));
                        vec![k.to_string(), d[0].clone(), d[1].clone(), d[2].clone()]
                    })
                    .collect(),
            };
            let sequences = Series {
                name: "sequences",
                header: vec!["n", "ell", "s"],
                rows: trace
                    .ell
                    .iter()
                    .zip(&trace.s)
                    .enumerate()
                    .map(|(n, (l, s))| vec![n.to_string(), num(*l), num(*s)])
                    .collect(),
            };
            let result = json!({ "trace": trace, "containment": containment });
            emit(
                command,
                &result,
                vec![vertices, sequences],
                a.common.out.as_deref(),
            )?;
            Ok(passed)
        }
        Command::Keylemma(a) => {
            let space = load(&a.input, &a.common)?;
            let [p, q, w] = points(&space, [&a.p, &a.q, &a.w])?;
            let opts = KeyLemmaOptions {
                resolution: a.resolution,
                threshold: a.threshold.into(),
                check_domain: !a.no_domain_check,
                ..Default::default()
            };
            let report = key_lemma_check(&space, &p, &q, &w, a.kappa, &opts)?;
            let passed = report.verdict == KeyLemmaVerdict::Verified;
            emit(command, &report, vec![], a.common.out.as_deref())?;
            Ok(passed)
        }
        Command::Globalize(a) => {
            let spec: SpaceSpec = a.space.parse()?;
            let opts = GlobalizationOptions {
                strategy: a.strategy.resolve()?,
                max_halvings: a.max_halvings,
                workers: a.workers,
                ..Default::default()
            };
            let report = globalization_experiment(&spec, a.kappa, a.local_radius, &opts)?;
            let series = report.global.as_ref().map(histogram).into_iter().collect();
            emit(command, &report, series, a.out.as_deref())?;
            Ok(report.passed)
        }
    }
}

fn load(input: &Input, common: &Common) -> Result<MetricSpaceSample> {
    match (&input.space, &input.matrix) {
        (Some(spec), None) => generate_space(&spec.parse()?),
        (None, Some(path)) => load_distance_matrix(path, common.input_tolerance),
        _ => Err(Error::InvalidParameter(
            "give exactly one of --space and --matrix".into(),
        )),
    }
}

fn points<const N: usize>(space: &MetricSpaceSample, ids: [&String; N]) -> Result<[Location; N]> {
    let mut out = Vec::with_capacity(N);
    for id in ids {
        out.push(space.location(space.index_of(id)?).clone());
    }
    Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
}

fn scan_options(strategy: Strategy, common: &Common) -> ScanOptions {
    let opts = ScanOptions::new(strategy);
    match common.workers {
        Some(w) => opts.with_workers(w),
        None => opts,
    }
}

fn histogram(report: &ComparisonReport) -> Series {
    let (lo, hi) = HISTOGRAM_RANGE;
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    Series {
        name: "histogram",
        header: vec!["excess_lo", "excess_hi", "count"],
        rows: report
            .excess_histogram
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let a = lo + width * i as f64;
                vec![num(a), num(a + width), c.to_string()]
            })
            .collect(),
    }
}

fn series_path(out: &Path, name: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{name}.csv"))
}

/// Writes `{config, result}` to `out` (or stdout) and the series next to it.
fn emit(
    config: &Command,
    result: &impl Serialize,
    series: Vec<Series>,
    out: Option<&Path>,
) -> Result<()> {
    let doc = json!({ "config": config, "result": result });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))? + "\n";
    let Some(out) = out else {
        io::stdout().lock().write_all(text.as_bytes())?;
        return Ok(());
    };
    std::fs::write(out, text)?;
    for s in series {
        let mut w = csv::Writer::from_path(series_path(out, s.name))
            .map_err(|e| Error::Io(e.to_string()))?;
        w.write_record(&s.header)
            .map_err(|e| Error::Io(e.to_string()))?;
        for row in &s.rows {
            w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
    }
    Ok(())
}
