//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_asd::bridge::{
    h_gauge_residual, joyce_metric, joyce_residuals, mobius_identity_residual, reality_check, BridgeMap, BridgedField,
    JoyceField, JoyceMetricField,
};
use toric_asd::cech::{period_check, solve_cochain, CurvePoint, EllipticCover};
use toric_asd::complex::{Mobius, QuadratureOptions, C64};
use toric_asd::config::{builtin, default_grid, Chart};
use toric_asd::curvature::{
    analyze_point, coordinate_field, summarize, symmetric_eigenvalues, FdOptions, PointCurvature, VectorField,
};
use toric_asd::dsl::parse;
use toric_asd::gen_engine::{compute_mn, crosscheck_d2, swap_symmetry_residual, GenMetricField, GenOptions};
use toric_asd::holo::{gauge_rotate, HoloData, PhiSpec, TauC, TauSpec};
use toric_asd::kahler::{fit_tau_c, kahler_circle};
use toric_asd::so_engine::{
    compute_potential, derivative_residual, holomorphic_metric, pde_residual, LinePoint, SoOptions,
};
use toric_asd::Result;

const ASD_POINTS: usize = 20;
const ASD_TOL: f64 = 1e-4;
const ASD_SECONDS: f64 = 60.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(value: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        passed: value.is_finite() && value < tol,
        detail: format!("{what} {value:.2e} < {tol:.0e}"),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|p| p.passed),
        detail: parts.iter().map(|p| p.detail.as_str()).collect::<Vec<_>>().join("; "),
    }
}

fn failed(e: impl std::fmt::Display) -> Outcome {
    Outcome {
        passed: false,
        detail: format!("error: {e}"),
    }
}

fn data(name: &str) -> HoloData {
    builtin(name).unwrap().holo_data().unwrap()
}

fn cubic() -> HoloData {
    data("linear_cubic")
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(2024)
}

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..2.0 * PI))
}

/// Random admissible lines for the cubic seed: |r| small, |s| large.
fn lines(n: usize) -> Vec<(C64, C64)> {
    let mut rng = rng();
    (0..n)
        .map(|_| (polar(&mut rng, 0.02, 0.3), polar(&mut rng, 3.0, 30.0)))
        .collect()
}

fn max_rel(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max)
}

// 1 ----------------------------------------------------------------------

fn asd_pipeline(field_at: &dyn Fn(&[C64; 4]) -> Result<PointCurvature>, points: &[[C64; 4]]) -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    for x in points {
        match field_at(x) {
            Ok(p) => out.push(p),
            Err(e) => return failed(e),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let report = summarize(out, ASD_TOL);
    Outcome {
        passed: report.asd_passed() && secs < ASD_SECONDS,
        detail: format!(
            "{} points, side {:?}, max ratio {:.2e}, {:.1} s",
            report.points.len(),
            report.vanishing_side,
            report.max_ratio,
            secs
        ),
    }
}

fn criterion_asd() -> Outcome {
    let fd = FdOptions::default();
    let (k1, k2) = (coordinate_field(2), coordinate_field(3));
    let killing: [&VectorField; 2] = [&k1, &k2];
    let real_pts = default_grid(Chart::Real)
        .sample(ASD_POINTS, 1)
        .iter()
        .map(|x| x.map(|v| C64::new(v.re, 0.0)))
        .collect::<Vec<_>>();
    let gen_pts = default_grid(Chart::General).sample(ASD_POINTS, 1);
    let mut parts = Vec::new();
    for (label, name) in [
        ("(a) τ = −z, φ = (z, iz)", "linear_real"),
        ("(b) Fubini–Study", "fubini_study"),
    ] {
        let field = JoyceMetricField {
            field: BridgedField::new(data(name), SoOptions::default()),
        };
        let run = asd_pipeline(&|x| analyze_point(&field, x, &killing, 1, &fd), &real_pts);
        parts.push(Outcome {
            passed: run.passed,
            detail: format!("{label}: {}", run.detail),
        });
    }
    let gen = GenMetricField {
        data: data("rational_d2"),
        opts: GenOptions::default(),
    };
    let run = asd_pipeline(&|x| analyze_point(&gen.adapted_at(*x)?, x, &killing, 1, &fd), &gen_pts);
    parts.push(Outcome {
        passed: run.passed,
        detail: format!("(c) rational_d2, λ = (w + w², −w − w²/2): {}", run.detail),
    });
    all(parts)
}

// 2 ----------------------------------------------------------------------

fn criterion_pde() -> Outcome {
    let d = cubic();
    let mut worst = 0.0f64;
    for (r, s) in lines(10) {
        match pde_residual(&d, r, s, &SoOptions::default()) {
            Ok(v) => worst = worst.max(v),
            Err(e) => return failed(e),
        }
    }
    check(worst, 1e-6, "max r–s equation residual over 10 lines")
}

// 3 ----------------------------------------------------------------------

fn criterion_cech() -> Outcome {
    let run = || -> Result<Outcome> {
        let d = HoloData {
            tau: TauSpec::linear(),
            phi: PhiSpec::exprs([parse("z + 0.3*z^3")?, parse("i*z - z^5")?]),
            domain_radius: 100.0,
            reality: false,
        };
        let cover = EllipticCover::new(C64::new(0.3, 0.1), C64::new(3.0, -0.5))?;
        let sol = solve_cochain(&d, &cover)?;
        let mut cob = 0.0f64;
        for p in cover.overlap_samples(32) {
            cob = cob.max(sol.coboundary_residual(p)?);
        }
        let fs = data("fubini_study");
        let fs_cover = EllipticCover::from_line(C64::new(0.05, 0.02), 1.0 / C64::new(0.05, -0.02))?;
        let mut period = 0.0f64;
        for (dd, cv) in [(&d, &cover), (&fs, &fs_cover)] {
            let p = period_check(dd, cv)?;
            period = period.max(p[0].norm().max(p[1].norm()));
        }
        let probes = [
            CurvePoint::new(C64::new(0.9, 0.4), 1),
            CurvePoint::new(C64::new(-0.01, 0.35), -1),
            CurvePoint::new(C64::new(-2.4, 1.0), 1),
            CurvePoint::new(C64::new(-0.2, -0.95), 1),
        ];
        let mut spread = 0.0f64;
        for scale in [0.8, 1.2] {
            let other = solve_cochain(&d, &cover.with_radius_scale(scale)?)?;
            let diffs: Vec<[C64; 2]> = probes
                .iter()
                .map(|&p| {
                    let (u, v) = (sol.f_u(p)?, other.f_u(p)?);
                    Ok([u[0] - v[0], u[1] - v[1]])
                })
                .collect::<Result<_>>()?;
            for d in &diffs {
                for i in 0..2 {
                    spread = spread.max((d[i] - diffs[0][i]).norm());
                }
            }
        }
        Ok(all(vec![
            check(cob, 1e-9, "coboundary over 32 overlap samples"),
            check(period, 1e-10, "period"),
            check(spread, 1e-9, "non-constant difference across radii"),
        ]))
    };
    run().unwrap_or_else(failed)
}

// 4 ----------------------------------------------------------------------

fn criterion_derivatives() -> Outcome {
    let d = cubic();
    let mut ab = 0.0f64;
    for (r, s) in lines(10) {
        match derivative_residual(&d, r, s, &SoOptions::default()) {
            Ok(v) => ab = ab.max(v),
            Err(e) => return failed(e),
        }
    }
    let field = BridgedField::new(data("fubini_study"), SoOptions::default());
    let mut joyce = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let x = -0.3 + 0.6 * i as f64 / 19.0;
            let y = 0.6 + 0.8 * j as f64 / 19.0;
            match joyce_residuals(&field, x, y, 1e-3) {
                Ok(r) => joyce = joyce.max(r[0]).max(r[1]),
                Err(e) => return failed(format!("({x}, {y}): {e}")),
            }
        }
    }
    all(vec![
        check(ab, 1e-6, "A, B against differences of G"),
        check(joyce, 1e-6, "Joyce residual on 20×20 grid (Fubini–Study)"),
    ])
}

// 5 ----------------------------------------------------------------------

fn criterion_crosscheck() -> Outcome {
    let d = data("rational_d2");
    let opts = GenOptions::default();
    let (mut dev, mut swap) = (0.0f64, 0.0f64);
    for x in default_grid(Chart::General).sample(10, 5) {
        let res = crosscheck_d2(&d, x[0], x[1], &opts)
            .and_then(|c| Ok((c.deviation, swap_symmetry_residual(&d, x[0], x[1], &opts)?)));
        match res {
            Ok((c, s)) => {
                dev = dev.max(c);
                swap = swap.max(s);
            }
            Err(e) => return failed(e),
        }
    }
    all(vec![
        check(dev, 1e-6, "conformal ratio deviation"),
        check(swap, 1e-9, "M(r,s) − N(s,r)"),
    ])
}

// 6 ----------------------------------------------------------------------

fn criterion_kahler() -> Outcome {
    let run = || -> Result<Outcome> {
        let mut fit_err = 0.0f64;
        for c in [-1.0, -2.0, -0.5] {
            let map = TauC::new(C64::new(c, 0.0))?;
            let fit = fit_tau_c(&|z| map.apply(z), map.radius)?;
            fit_err = fit_err.max((fit.c - c).norm());
        }
        let zero = kahler_circle(-1.0, 0.0)?.0.residue().norm();
        let others = [-0.5, -2.0]
            .iter()
            .map(|&c| Ok(kahler_circle(c, 0.0)?.0.residue().norm()))
            .collect::<Result<Vec<f64>>>()?;
        let smallest = others.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut drift = 0.0f64;
        for c in [-4.0, -2.0, -0.5] {
            let base = kahler_circle(c, 0.0)?.1.omega;
            for k in 1..64 {
                let theta = 2.0 * PI * k as f64 / 64.0;
                drift = drift.max((kahler_circle(c, theta)?.1.omega - base).norm());
            }
        }
        Ok(all(vec![
            check(fit_err, 1e-6, "fitted c error"),
            check(zero, 1e-12, "residue at c = −1"),
            Outcome {
                passed: smallest > 1e-4,
                detail: format!("min residue at c ∈ {{−0.5, −2}} {smallest:.2e} > 1e-4"),
            },
            check(drift, 1e-10, "ω variation over the circle"),
        ]))
    };
    run().unwrap_or_else(failed)
}

// 7 ----------------------------------------------------------------------

/// Rotating the seed by ω = e^{iθ} moves the line (r, s, v) to (ω²r, ω²s, v);
/// the pulled-back metric is e^{4iθ} times the metric of the rotated seed.
fn criterion_gauge() -> Outcome {
    let d = cubic();
    let opts = SoOptions::default();
    let mut worst = 0.0f64;
    for (k, (r, s)) in lines(10).into_iter().enumerate() {
        let theta = 0.2 + 0.37 * k as f64;
        let w = C64::from_polar(1.0, theta);
        let rot = gauge_rotate(&d, theta);
        let res = holomorphic_metric(&rot, &LinePoint::new(r, s), &opts).and_then(|g1| {
            Ok((
                g1,
                holomorphic_metric(&d, &LinePoint::new(w * w * r, w * w * s), &opts)?,
            ))
        });
        let (g1, g0) = match res {
            Ok(v) => v,
            Err(e) => return failed(e),
        };
        let one = C64::new(1.0, 0.0);
        let jac = [w * w, w * w, one, one];
        let factor = C64::from_polar(1.0, 4.0 * theta);
        let size = g1.g.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..4 {
            for j in 0..4 {
                let pulled = jac[i] * jac[j] * g0.g[i][j];
                worst = worst.max((pulled - factor * g1.g[i][j]).norm() / size);
            }
        }
    }
    check(worst, 1e-9, "max |Φ*g − e^{4iθ}g_θ|/|g_θ| over 10 points")
}

// 8 ----------------------------------------------------------------------

fn criterion_mobius() -> Outcome {
    let mut rng = rng();
    let mut pick = || C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let mut worst_m = 0.0f64;
    let mut worst_h = 0.0f64;
    for _ in 0..100 {
        let map = match Mobius::new(pick(), pick(), pick(), pick()) {
            Ok(m) => m,
            Err(_) => Mobius::cayley(),
        };
        let (z, w) = (pick(), pick());
        worst_m = worst_m.max(mobius_identity_residual(&map, z, w));
        let (a, b, l) = ([pick(), pick()], [pick(), pick()], pick());
        match h_gauge_residual(a, b, l) {
            Ok(v) => worst_h = worst_h.max(v),
            Err(e) => return failed(e),
        }
    }
    all(vec![
        check(worst_m, 1e-12, "Möbius identity"),
        check(worst_h, 1e-12, "H gauge"),
    ])
}

// 9 ----------------------------------------------------------------------

fn criterion_reality() -> Outcome {
    let mut rng = rng();
    let zetas: Vec<C64> = (0..20)
        .map(|_| C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.6..1.4)))
        .collect();
    let mut parts = Vec::new();
    for name in ["linear_real", "fubini_study"] {
        let d = data(name);
        let rep = match reality_check(&d, &BridgeMap::default(), &zetas, &SoOptions::default()) {
            Ok(r) => r,
            Err(e) => return failed(e),
        };
        parts.push(check(
            rep.max_g_residual.max(rep.max_f_residual),
            1e-7,
            &format!("{name} reality relations"),
        ));
        let field = BridgedField::new(d, SoOptions::default());
        let mut least = f64::INFINITY;
        for z in &zetas {
            let res = field.pq(z.re, z.im).and_then(|(p, q)| joyce_metric(z.im, p, q));
            match res {
                Ok(g) => least = least.min(symmetric_eigenvalues(&g).iter().cloned().fold(f64::INFINITY, f64::min)),
                Err(e) => return failed(e),
            }
        }
        parts.push(Outcome {
            passed: least > 0.0,
            detail: format!("{name} least eigenvalue {least:.2e} > 0"),
        });
    }
    all(parts)
}

// 10 ---------------------------------------------------------------------

fn fixed(nodes: usize) -> QuadratureOptions {
    QuadratureOptions {
        min_nodes: nodes,
        max_nodes: nodes,
        ..QuadratureOptions::default()
    }
}

fn criterion_robustness() -> Outcome {
    let run = || -> Result<Outcome> {
        let mut radius = 0.0f64;
        let mut nodes = 0.0f64;
        let fs_lines = [0.05, 0.1, 0.2].map(|m| {
            let r = C64::from_polar(m, 0.7);
            (r, 1.0 / r.conj())
        });
        for (d, ls) in [(cubic(), lines(5)), (data("fubini_study"), fs_lines.to_vec())] {
            for (r, s) in ls {
                let base = compute_potential(&d, r, s, &SoOptions::default())?;
                let flat = |p: &toric_asd::so_engine::Potential| [p.g, p.a, p.b].concat();
                for scale in [0.8, 1.2] {
                    let p = compute_potential(
                        &d,
                        r,
                        s,
                        &SoOptions {
                            radius_scale: scale,
                            ..SoOptions::default()
                        },
                    )?;
                    radius = radius.max(max_rel(&flat(&p), &flat(&base)));
                }
                let one = compute_potential(
                    &d,
                    r,
                    s,
                    &SoOptions {
                        quadrature: fixed(base.nodes),
                        ..SoOptions::default()
                    },
                )?;
                let two = compute_potential(
                    &d,
                    r,
                    s,
                    &SoOptions {
                        quadrature: fixed(2 * base.nodes),
                        ..SoOptions::default()
                    },
                )?;
                nodes = nodes.max(max_rel(&flat(&two), &flat(&one)));
            }
        }
        let gd = data("rational_d2");
        for x in default_grid(Chart::General).sample(5, 9) {
            let base = compute_mn(&gd, x[0], x[1], &GenOptions::default())?;
            let mut o = GenOptions::default();
            o.quadrature.min_nodes *= 2;
            let p = compute_mn(&gd, x[0], x[1], &o)?;
            nodes = nodes.max(max_rel(&[p.m, p.n].concat(), &[base.m, base.n].concat()));
        }
        Ok(all(vec![
            check(radius, 1e-9, "G, A, B under radius ±20%"),
            check(nodes, 1e-9, "G, A, B, M, N under node doubling"),
        ]))
    };
    run().unwrap_or_else(failed)
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("anti-self-dual Weyl tensor for three pipelines", criterion_asd),
        ("r–s equation for G", criterion_pde),
        ("Čech coboundary, periods and uniqueness", criterion_cech),
        ("derivative consistency and Joyce equations", criterion_derivatives),
        ("degree-2 crosscheck and swap symmetry", criterion_crosscheck),
        ("Kähler classification", criterion_kahler),
        ("gauge covariance", criterion_gauge),
        ("Möbius identity and H gauge invariance", criterion_mobius),
        ("reality relations and positivity", criterion_reality),
        ("quadrature robustness", criterion_robustness),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.passed {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.1} s]",
            if o.passed { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
