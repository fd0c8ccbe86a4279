//! The validate, metric and verify commands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use toric_asd::bridge::{reality_check, BridgeMap};
use toric_asd::cech::{period_check, EllipticCover};
use toric_asd::complex::C64;
use toric_asd::config::{Chart, RunConfig, Tolerances};
use toric_asd::curvature::{summarize, CurvatureReport, PointCurvature};
use toric_asd::gen_engine::{crosscheck_d2, swap_symmetry_residual};
use toric_asd::holo::{validate, CheckResult, HoloData, ValidationReport};
use toric_asd::kahler::{kahler_verdict, KahlerVerdict};
use toric_asd::so_engine::{derivative_residual, pde_residual};
use toric_asd::Error;

use crate::engine::Engine;
use crate::CliError;

/// Lines on which the Čech period is checked.
const PERIOD_LINES: usize = 3;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::config(e.to_string()))?;
    write_file(path, &(text + "\n"))
}

/// Errors that mean a numerical routine gave up rather than a check failing.
fn is_non_convergence(e: &Error) -> bool {
    matches!(
        e,
        Error::NoConvergence(_) | Error::Resolution { .. } | Error::Numerical(_)
    )
}

#[derive(Debug, Clone, Serialize)]
struct PointError {
    index: usize,
    point: [[f64; 2]; 4],
    error: String,
    #[serde(skip)]
    non_convergence: bool,
}

impl PointError {
    fn new(index: usize, x: &[C64; 4], e: &Error) -> Self {
        Self {
            index,
            point: x.map(|v| [v.re, v.im]),
            error: e.to_string(),
            non_convergence: is_non_convergence(e),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Gate {
    name: &'static str,
    passed: bool,
    value: f64,
    tolerance: f64,
}

fn gate(name: &'static str, value: f64, tolerance: f64) -> Gate {
    Gate {
        name,
        passed: value.is_finite() && value < tolerance,
        value,
        tolerance,
    }
}

/// The exit status for a finished run.
fn outcome(gates: &[Gate], errors: &[PointError]) -> Result<(), CliError> {
    let failed: Vec<&str> = gates.iter().filter(|g| !g.passed).map(|g| g.name).collect();
    if failed.is_empty() {
        return Ok(());
    }
    let message = format!("gate failure: {}", failed.join(", "));
    if !errors.is_empty() && errors.iter().all(|e| e.non_convergence) {
        Err(CliError::non_convergence(message))
    } else {
        Err(CliError::gate(message))
    }
}

/// Period ∮ φ̂ dz/W on the elliptic cover of a few sampled lines.
fn period_checks(engine: &Engine, points: &[[C64; 4]]) -> Option<(f64, Vec<String>)> {
    if engine.chart == Chart::General {
        return None;
    }
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for x in points.iter().take(PERIOD_LINES) {
        let (r, s) = engine.line_of(x);
        match EllipticCover::from_line(r, s).and_then(|cv| period_check(&engine.data, &cv)) {
            Ok(p) => worst = worst.max(p[0].norm().max(p[1].norm())),
            Err(e) => {
                worst = f64::INFINITY;
                errors.push(format!("line ({r}, {s}): {e}"));
            }
        }
    }
    Some((worst, errors))
}

pub fn run_validate(cfg: &RunConfig, data: &HoloData, out: &Path) -> Result<(), CliError> {
    let chart = toric_asd::config::chart_for(data);
    let mut report: ValidationReport = validate(data);
    let engine = Engine::new(data.clone(), chart);
    let grid = cfg.grid_or_default().map_err(CliError::from_core)?;
    if let Some((period, errors)) = period_checks(&engine, &grid.sample(PERIOD_LINES, cfg.seed)) {
        let passed = errors.is_empty() && period < cfg.tolerances.period;
        let detail = if errors.is_empty() {
            format!("max period {period:.3e} (tol {:.0e})", cfg.tolerances.period)
        } else {
            errors.join("; ")
        };
        report.checks.push(CheckResult {
            name: "period".into(),
            passed,
            residual: period,
            detail,
        });
    }
    write_json(
        &out.join("validate.json"),
        &json!({ "schema": 1, "chart": chart, "passed": report.passed(), "checks": report.checks }),
    )?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("{}: {}", c.name, c.detail);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::gate(format!(
            "validation failed: {}",
            report.failures().join(", ")
        )))
    }
}

fn fmt_num(out: &mut String, v: f64) {
    let _ = write!(out, ",{v:e}");
}

pub fn run_metric(cfg: &RunConfig, data: &HoloData, out: &Path) -> Result<(), CliError> {
    let chart = toric_asd::config::chart_for(data);
    let engine = Engine::new(data.clone(), chart);
    let points = cfg.grid_or_default().map_err(CliError::from_core)?.points();
    let results: Vec<_> = points.par_iter().map(|x| engine.metric_at(x)).collect();

    let holo = chart != Chart::Real;
    let names = ["x1", "x2", "v1", "v2"];
    let mut comps = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            comps.push((i, j));
        }
    }
    let mut header: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    header.extend(comps.iter().map(|(i, j)| format!("g{}{}", i + 1, j + 1)));
    if holo {
        header.extend(names.iter().map(|s| format!("{s}_im")));
        header.extend(comps.iter().map(|(i, j)| format!("g{}{}_im", i + 1, j + 1)));
    }
    let mut csv = header.join(",") + "\n";
    let mut errors = Vec::new();
    for (index, (x, res)) in points.iter().zip(&results).enumerate() {
        let g = match res {
            Ok(g) => g,
            Err(e) => {
                errors.push(PointError::new(index, x, e));
                continue;
            }
        };
        let mut row = String::new();
        let _ = write!(row, "{:e}", x[0].re);
        for v in &x[1..] {
            fmt_num(&mut row, v.re);
        }
        for &(i, j) in &comps {
            fmt_num(&mut row, g[i][j].re);
        }
        if holo {
            for v in x {
                fmt_num(&mut row, v.im);
            }
            for &(i, j) in &comps {
                fmt_num(&mut row, g[i][j].im);
            }
        }
        csv.push_str(&row);
        csv.push('\n');
    }
    write_file(&out.join("metric.csv"), &csv)?;

    let mut side = String::from("index,x1,x2,v1,v2,error\n");
    for e in &errors {
        let p = e.point;
        let _ = writeln!(
            side,
            "{},{:e},{:e},{:e},{:e},\"{}\"",
            e.index,
            p[0][0],
            p[1][0],
            p[2][0],
            p[3][0],
            e.error.replace('"', "'")
        );
    }
    write_file(&out.join("metric_errors.csv"), &side)?;
    log::info!("metric: {} points, {} failed", points.len(), errors.len());

    let fraction = errors.len() as f64 / points.len() as f64;
    if fraction > cfg.tolerances.failure_fraction {
        let message = format!(
            "{} of {} grid points failed (see metric_errors.csv)",
            errors.len(),
            points.len()
        );
        if errors.iter().all(|e| e.non_convergence) {
            return Err(CliError::non_convergence(message));
        }
        return Err(CliError::gate(message));
    }
    Ok(())
}

struct PointOutcome {
    curvature: Result<PointCurvature, Error>,
    pde: Result<[f64; 2], Error>,
    crosscheck: Option<Result<[f64; 2], Error>>,
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

pub fn run_verify(cfg: &RunConfig, data: &HoloData, out: &Path) -> Result<(), CliError> {
    let tol: &Tolerances = &cfg.tolerances;
    let chart = toric_asd::config::chart_for(data);
    let engine = Engine::new(data.clone(), chart);
    let grid = cfg.grid_or_default().map_err(CliError::from_core)?;
    let points = grid.sample(cfg.verify.points, cfg.seed);
    let validation = validate(data);
    let kahler: KahlerVerdict = kahler_verdict(&data.tau);

    let outcomes: Vec<PointOutcome> = points
        .par_iter()
        .map(|x| {
            let curvature = engine.curvature_at(x, cfg.verify.orientation);
            let (r, s) = engine.line_of(x);
            let pde = pde_residual(&engine.data, r, s, &engine.so)
                .and_then(|p| Ok([p, derivative_residual(&engine.data, r, s, &engine.so)?]));
            let crosscheck = (chart == Chart::General).then(|| {
                let c = crosscheck_d2(&engine.data, r, s, &engine.gen)?;
                Ok([c.deviation, swap_symmetry_residual(&engine.data, r, s, &engine.gen)?])
            });
            PointOutcome {
                curvature,
                pde,
                crosscheck,
            }
        })
        .collect();

    let mut errors = Vec::new();
    let mut curv_points = Vec::new();
    let (mut pde, mut derivs, mut cross, mut swap) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (index, (x, o)) in points.iter().zip(outcomes).enumerate() {
        match o.curvature {
            Ok(p) => curv_points.push(p),
            Err(e) => errors.push(PointError::new(index, x, &e)),
        }
        match o.pde {
            Ok([p, d]) => {
                pde.push(p);
                derivs.push(d);
            }
            Err(e) => {
                pde.push(f64::INFINITY);
                errors.push(PointError::new(index, x, &e));
            }
        }
        match o.crosscheck {
            Some(Ok([c, s])) => {
                cross.push(c);
                swap.push(s);
            }
            Some(Err(e)) => {
                cross.push(f64::INFINITY);
                errors.push(PointError::new(index, x, &e));
            }
            None => {}
        }
    }
    let complete = curv_points.len() == points.len();
    let asd: CurvatureReport = summarize(curv_points, tol.asd);

    let mut gates = vec![Gate {
        name: "validation",
        passed: validation.passed(),
        value: validation.failures().len() as f64,
        tolerance: 1.0,
    }];
    let asd_value = if complete { asd.max_ratio } else { f64::INFINITY };
    gates.push(Gate {
        passed: asd.asd_passed() && complete,
        ..gate("asd", asd_value, tol.asd)
    });
    gates.push(gate(
        "killing",
        if complete { asd.max_lie_residual } else { f64::INFINITY },
        tol.killing,
    ));
    gates.push(gate("pde", max_of(pde.iter().cloned()), tol.pde));
    gates.push(gate("derivatives", max_of(derivs.iter().cloned()), tol.pde));

    let mut crosscheck_json = serde_json::Value::Null;
    if chart == Chart::General {
        let (c, s) = (max_of(cross.iter().cloned()), max_of(swap.iter().cloned()));
        gates.push(gate("crosscheck", c, tol.crosscheck));
        gates.push(gate("swap", s, tol.swap));
        crosscheck_json =
            json!({ "max_deviation": c, "max_swap_residual": s, "deviations": cross, "swap_residuals": swap });
    }

    let mut reality_json = serde_json::Value::Null;
    if chart == Chart::Real {
        let zetas: Vec<C64> = points.iter().map(|x| C64::new(x[0].re, x[1].re)).collect();
        let positive = asd.points.iter().all(|p| p.signature == "(4,0)");
        match reality_check(data, &BridgeMap::default(), &zetas, &engine.so) {
            Ok(rep) => {
                gates.push(gate("reality", rep.max_g_residual.max(rep.max_f_residual), tol.reality));
                reality_json = json!({ "report": rep, "positive_definite": positive });
            }
            Err(e) => {
                gates.push(gate("reality", f64::INFINITY, tol.reality));
                reality_json = json!({ "error": e.to_string(), "positive_definite": positive });
            }
        }
        gates.push(Gate {
            name: "positive_definite",
            passed: positive && complete,
            value: 0.0,
            tolerance: 0.0,
        });
    }

    let mut period_json = serde_json::Value::Null;
    if let Some((period, perrs)) = period_checks(&engine, &points) {
        gates.push(gate("period", period, tol.period));
        period_json = json!({ "max_period": period, "errors": perrs });
    }

    let passed = gates.iter().all(|g| g.passed);
    let report = json!({
        "schema": 1,
        "chart": chart,
        "seed": cfg.seed,
        "orientation": cfg.verify.orientation,
        "passed": passed,
        "gates": gates,
        "validation": validation,
        "asd": asd,
        "kahler": kahler,
        "pde": { "max_residual": max_of(pde.iter().cloned()), "residuals": pde, "derivative_residuals": derivs },
        "crosscheck": crosscheck_json,
        "reality": reality_json,
        "period": period_json,
        "errors": errors,
    });
    write_json(&out.join("report.json"), &report)?;
    for g in gates.iter().filter(|g| !g.passed) {
        eprintln!("gate {} failed: {:.3e} (tol {:.0e})", g.name, g.value, g.tolerance);
    }
    for e in &errors {
        log::warn!("point {}: {}", e.index, e.error);
    }
    outcome(&gates, &errors)
}
