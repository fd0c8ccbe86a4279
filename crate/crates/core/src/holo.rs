//! Seed data: a holomorphic involution τ near 0 and a τ-odd map φ into ℂ².
//!
//! Data may be one-sided (a single φ analytic on an annulus around the unit
//! circle) or two-sided, where φ near 0 and φ near ∞ are separate germs. Real
//! data is two-sided with the far germ given by the antipodal reflection
//! z ↦ conj(φ(−1/conj z)).

use std::f64::consts::PI;

use crate::complex::{continue_sqrt, contour_integrate, segment_integrate, track_roots, Contour, C64, I};
use crate::dsl::{DualComplex, Expr};
use crate::error::{Error, Result};

/// The family of involutions admitted as seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauKind {
    /// τ(z) = −z.
    Linear,
    /// Sheet exchange for the primitive of z dz/((z−1)²(z−c)²).
    TauC { c: C64 },
    /// Sheet exchange of z ↦ z² in the standard coordinate of a degree-2 family.
    RationalD2,
}

/// An involution, optionally conjugated by the rotation z ↦ e^{iθ}z so that
/// τ_θ(z) = e^{−iθ} τ(e^{iθ} z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSpec {
    pub kind: TauKind,
    pub rotation: f64,
}

impl TauSpec {
    pub fn linear() -> Self {
        Self {
            kind: TauKind::Linear,
            rotation: 0.0,
        }
    }

    pub fn tau_c(c: C64) -> Self {
        Self {
            kind: TauKind::TauC { c },
            rotation: 0.0,
        }
    }

    pub fn rational_d2() -> Self {
        Self {
            kind: TauKind::RationalD2,
            rotation: 0.0,
        }
    }

    /// True when τ(z) = −z in the working coordinate.
    pub fn is_odd_reflection(&self) -> bool {
        matches!(self.kind, TauKind::Linear | TauKind::RationalD2)
    }

    pub fn apply(&self, z: C64) -> Result<C64> {
        match self.kind {
            TauKind::Linear | TauKind::RationalD2 => Ok(-z),
            TauKind::TauC { c } => {
                let omega = C64::from_polar(1.0, self.rotation);
                Ok(tau_c(c, omega * z)? / omega)
            }
        }
    }

    /// Radius of the disc on which `apply` is trusted.
    pub fn validity_radius(&self) -> Result<f64> {
        match self.kind {
            TauKind::Linear | TauKind::RationalD2 => Ok(f64::INFINITY),
            TauKind::TauC { c } => Ok(TauC::new(c)?.radius),
        }
    }
}

/// f(z) = ∫₀^z t dt/((t−1)²(t−c)²) and its sheet exchange.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauC {
    pub c: C64,
    /// Empirically validated disc radius.
    pub radius: f64,
}

fn alpha_c(c: C64, t: C64) -> C64 {
    let a = t - 1.0;
    let b = t - c;
    t / (a * a * b * b)
}

fn check_c(c: C64) -> Result<()> {
    if c.norm() < 1e-12 || (c - 1.0).norm() < 1e-12 {
        return Err(Error::Degenerate(format!("τ_c parameter {c} must avoid 0 and 1")));
    }
    Ok(())
}

/// τ_c moves points of the validated disc slightly outward, so evaluation is
/// accepted on a modestly larger disc that contains the image.
const DISC_SLACK: f64 = 1.25;

fn initial_radius(c: C64) -> f64 {
    0.25 * c.norm().min(1.0)
}

/// Newton solve of f(w) = f(z) from the seed −z.
fn tau_c_newton(c: C64, z: C64) -> Result<C64> {
    if z.norm() < 1e-300 {
        return Ok(z);
    }
    let mut w = -z;
    for _ in 0..50 {
        let g = segment_integrate(&|t| alpha_c(c, t), z, w, 2, 24);
        let step = g / alpha_c(c, w);
        w -= step;
        if !w.re.is_finite() || !w.im.is_finite() {
            break;
        }
        if step.norm() <= 1e-15 * w.norm().max(1e-300) {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(format!(
        "τ_c Newton iteration for c = {c}, z = {z}"
    )))
}

impl TauC {
    pub fn new(c: C64) -> Result<Self> {
        check_c(c)?;
        let mut radius = initial_radius(c);
        for _ in 0..40 {
            if Self::boundary_ok(c, radius) {
                return Ok(Self { c, radius });
            }
            radius *= 0.5;
        }
        Err(Error::NoConvergence(format!("no validity disc found for τ_c, c = {c}")))
    }

    fn boundary_ok(c: C64, radius: f64) -> bool {
        (0..16).all(|k| {
            let z = C64::from_polar(radius, 2.0 * PI * k as f64 / 16.0);
            match tau_c_newton(c, z) {
                Ok(w) => {
                    (w - z).norm() > 0.5 * radius
                        && w.norm() < DISC_SLACK * radius
                        && tau_c_newton(c, w)
                            .map(|b| (b - z).norm() < 1e-10 * radius)
                            .unwrap_or(false)
                }
                Err(_) => false,
            }
        })
    }

    pub fn apply(&self, z: C64) -> Result<C64> {
        if z.norm() > DISC_SLACK * self.radius {
            return Err(Error::OutOfDomain(format!("{z} (radius {})", self.radius)));
        }
        tau_c_newton(self.c, z)
    }

    /// f(z), by Gauss–Legendre quadrature along the segment [0, z].
    pub fn primitive(&self, z: C64) -> C64 {
        segment_integrate(&|t| alpha_c(self.c, t), C64::new(0.0, 0.0), z, 2, 24)
    }
}

/// The involution τ_c(z) on the default disc 0.25·min(1, |c|).
pub fn tau_c(c: C64, z: C64) -> Result<C64> {
    check_c(c)?;
    if z.norm() > DISC_SLACK * initial_radius(c) {
        return Err(Error::OutOfDomain(format!("{z} (radius {})", initial_radius(c))));
    }
    tau_c_newton(c, z)
}

/// β = κ·z dz/((z−λ)²(z−μ)²) with λ = μ/c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaForm {
    pub mu: C64,
    pub lambda: C64,
    pub c: f64,
    pub reality: bool,
    pub scale: C64,
}

impl BetaForm {
    pub fn new(mu: C64, c: f64, reality: bool) -> Result<Self> {
        if c == 0.0 || c == 1.0 || !c.is_finite() {
            return Err(Error::Degenerate(format!("β parameter c = {c}")));
        }
        if reality && c >= 0.0 {
            return Err(Error::NotKahler(c));
        }
        let lambda = mu / c;
        if (mu - lambda).norm() < 1e-14 * mu.norm().max(1.0) {
            return Err(Error::Degenerate("β poles coincide".into()));
        }
        Ok(Self {
            mu,
            lambda,
            c,
            reality,
            scale: C64::new(1.0, 0.0),
        })
    }

    pub fn with_scale(mut self, scale: C64) -> Self {
        self.scale = scale;
        self
    }

    pub fn eval(&self, z: C64) -> C64 {
        let a = z - self.lambda;
        let b = z - self.mu;
        self.scale * z / (a * a * b * b)
    }

    /// Residue at μ: d/dz[z/(z−λ)²] at μ, times the scale.
    pub fn residue(&self) -> C64 {
        let d = self.mu - self.lambda;
        -self.scale * (self.mu + self.lambda) / (d * d * d)
    }

    pub fn residue_at_lambda(&self) -> C64 {
        -self.residue()
    }

    /// Whether λ = −1/conj(μ) holds.
    pub fn antipodal_residual(&self) -> f64 {
        (self.lambda + 1.0 / self.mu.conj()).norm()
    }
}

/// The residue of β at μ.
pub fn beta_residue(b: &BetaForm) -> C64 {
    b.residue()
}

/// Leading order and coefficient of a germ λ(w) at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leading {
    pub order: u32,
    pub coefficient: C64,
}

/// φ as user expressions, or as the square root of λ(x²) with odd leading order.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    Exprs {
        near_zero: [Expr; 2],
        /// The germ near ∞ for two-sided data.
        near_infinity: Option<[Expr; 2]>,
    },
    SqrtLambda {
        /// λ in the variable w, composed with w = x².
        lambda: [Expr; 2],
        leading: [Leading; 2],
        /// φ_i(x) = scale_i·xⁿ·√(λ_i(x²)/(c·x²ⁿ)) with the root equal to 1 at x = 0.
        scale: [C64; 2],
    },
}

/// Which germ of φ a contour samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Zero,
    Infinity,
}

fn cauchy_coefficients(f: &dyn Fn(C64) -> Result<C64>, radius: f64, count: usize) -> Result<Vec<C64>> {
    let contour = Contour::new(C64::new(0.0, 0.0), radius, 128)?;
    let samples: Vec<C64> = contour.points().iter().map(|&w| f(w)).collect::<Result<_>>()?;
    (0..count)
        .map(|k| {
            let vals: Vec<C64> = contour
                .points()
                .iter()
                .zip(&samples)
                .map(|(&w, &v)| v / w.powi(k as i32 + 1))
                .collect();
            Ok(contour_integrate(&vals, &contour)? / (2.0 * PI * I))
        })
        .collect()
}

/// Finds the leading order of λ at 0; φ = √λ(x²) needs it odd.
pub fn leading_term(lambda: &Expr, radius: f64) -> Result<Leading> {
    let coeffs = cauchy_coefficients(&|w| lambda.eval(w), radius, 12)?;
    let scaled: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * radius.powi(k as i32))
        .collect();
    let peak = scaled.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Branch("λ vanishes identically".into()));
    }
    let order = scaled.iter().position(|&v| v > 1e-10 * peak).unwrap_or(0);
    if order % 2 == 0 {
        return Err(Error::Branch(format!(
            "λ has even leading order {order}; √λ(x²) would not be odd"
        )));
    }
    // Quadrature leaves roundoff in the coefficient; snapping it keeps the
    // principal root of a negative real coefficient on the +i side.
    let mut coefficient = coeffs[order];
    let size = coefficient.norm();
    if coefficient.im.abs() < 1e-13 * size {
        coefficient.im = 0.0;
    }
    if coefficient.re.abs() < 1e-13 * size {
        coefficient.re = 0.0;
    }
    Ok(Leading {
        order: order as u32,
        coefficient,
    })
}

impl PhiSpec {
    pub fn exprs(near_zero: [Expr; 2]) -> Self {
        PhiSpec::Exprs {
            near_zero,
            near_infinity: None,
        }
    }

    /// Real data: the far germ is the antipodal reflection of the near germ.
    pub fn real_from(chi: [Expr; 2]) -> Self {
        let far = [chi[0].antipodal_reflection(), chi[1].antipodal_reflection()];
        PhiSpec::Exprs {
            near_zero: chi,
            near_infinity: Some(far),
        }
    }

    pub fn sqrt_lambda(lambda: [Expr; 2], probe_radius: f64) -> Result<Self> {
        let l0 = leading_term(&lambda[0], probe_radius)?;
        let l1 = leading_term(&lambda[1], probe_radius)?;
        let scale = [l0.coefficient.sqrt(), l1.coefficient.sqrt()];
        Ok(PhiSpec::SqrtLambda {
            lambda,
            leading: [l0, l1],
            scale,
        })
    }

    pub fn is_two_sided(&self) -> bool {
        matches!(
            self,
            PhiSpec::Exprs {
                near_infinity: Some(_),
                ..
            }
        )
    }

    fn sqrt_lambda_ratio(lambda: &Expr, leading: &Leading, x: C64) -> Result<C64> {
        let w = x * x;
        let lead = leading.coefficient * w.powi(leading.order as i32);
        if lead.norm() < 1e-300 {
            return Ok(C64::new(1.0, 0.0));
        }
        Ok(lambda.eval(w)? / lead)
    }

    /// φ near 0 (principal branches; √ ratio continued radially for √λ data).
    pub fn eval(&self, z: C64) -> Result<[C64; 2]> {
        match self {
            PhiSpec::Exprs { near_zero, .. } => Ok([near_zero[0].eval(z)?, near_zero[1].eval(z)?]),
            PhiSpec::SqrtLambda { lambda, leading, scale } => {
                let mut out = [C64::new(0.0, 0.0); 2];
                for i in 0..2 {
                    let root = self.radial_root(&lambda[i], &leading[i], z)?;
                    out[i] = scale[i] * z.powi(leading[i].order as i32) * root;
                }
                Ok(out)
            }
        }
    }

    fn radial_root(&self, lambda: &Expr, leading: &Leading, z: C64) -> Result<C64> {
        let f = |x: C64| Self::sqrt_lambda_ratio(lambda, leading, x).unwrap_or(C64::new(f64::NAN, 0.0));
        let steps = 8 + (64.0 * z.norm()) as usize;
        continue_sqrt(&f, C64::new(0.0, 0.0), z, C64::new(1.0, 0.0), steps)
    }

    /// φ for the given side (the far germ when two-sided).
    pub fn eval_side(&self, side: Side, z: C64) -> Result<[C64; 2]> {
        match (self, side) {
            (
                PhiSpec::Exprs {
                    near_infinity: Some(far),
                    ..
                },
                Side::Infinity,
            ) => Ok([far[0].eval(z)?, far[1].eval(z)?]),
            _ => self.eval(z),
        }
    }

    /// φ′(0).
    pub fn derivative_at_zero(&self) -> Result<[C64; 2]> {
        match self {
            PhiSpec::Exprs { near_zero, .. } => {
                let d = DualComplex::variable(C64::new(0.0, 0.0));
                Ok([
                    near_zero[0].eval_dual(d)?.derivative,
                    near_zero[1].eval_dual(d)?.derivative,
                ])
            }
            PhiSpec::SqrtLambda { leading, scale, .. } => {
                let mut out = [C64::new(0.0, 0.0); 2];
                for i in 0..2 {
                    if leading[i].order == 1 {
                        out[i] = scale[i];
                    }
                }
                Ok(out)
            }
        }
    }

    /// φ at every contour node, continuing square roots along the contour.
    pub fn sample(&self, side: Side, contour: &Contour) -> Result<Vec<[C64; 2]>> {
        self.sample_closed(side, &contour.points())
    }

    /// φ along a closed polygon, with square roots continued from point to point.
    pub fn sample_closed(&self, side: Side, pts: &[C64]) -> Result<Vec<[C64; 2]>> {
        match self {
            PhiSpec::Exprs { .. } => pts.iter().map(|&z| self.eval_side(side, z)).collect(),
            PhiSpec::SqrtLambda { lambda, leading, scale } => {
                let mut out = vec![[C64::new(0.0, 0.0); 2]; pts.len()];
                for i in 0..2 {
                    let ratios: Vec<C64> = pts
                        .iter()
                        .map(|&x| Self::sqrt_lambda_ratio(&lambda[i], &leading[i], x))
                        .collect::<Result<_>>()?;
                    let seed = self.radial_root(&lambda[i], &leading[i], pts[0])?;
                    let roots = track_roots(&ratios, seed)?;
                    for (k, &x) in pts.iter().enumerate() {
                        out[k][i] = scale[i] * x.powi(leading[i].order as i32) * roots[k];
                    }
                }
                Ok(out)
            }
        }
    }

    /// φ∘(z ↦ ωz).
    pub fn rotated(&self, omega: C64) -> Self {
        match self {
            PhiSpec::Exprs {
                near_zero,
                near_infinity,
            } => PhiSpec::Exprs {
                near_zero: [near_zero[0].rotated(omega), near_zero[1].rotated(omega)],
                near_infinity: near_infinity
                    .as_ref()
                    .map(|f| [f[0].rotated(omega), f[1].rotated(omega)]),
            },
            PhiSpec::SqrtLambda { lambda, leading, scale } => {
                let o2 = omega * omega;
                let mut new_leading = *leading;
                let mut new_scale = *scale;
                for i in 0..2 {
                    let n = leading[i].order as i32;
                    new_leading[i].coefficient = leading[i].coefficient * o2.powi(n);
                    new_scale[i] = scale[i] * omega.powi(n);
                }
                PhiSpec::SqrtLambda {
                    lambda: [lambda[0].rotated(o2), lambda[1].rotated(o2)],
                    leading: new_leading,
                    scale: new_scale,
                }
            }
        }
    }
}

/// A seed pair (τ, φ).
#[derive(Debug, Clone, PartialEq)]
pub struct HoloData {
    pub tau: TauSpec,
    pub phi: PhiSpec,
    /// Radius of the disc about 0 where τ and the near germ of φ are defined.
    pub domain_radius: f64,
    pub reality: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

pub const VALIDATION_TOL: f64 = 1e-10;

fn circle_samples(radii: &[f64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(64 * radii.len());
    for &r in radii {
        for k in 0..64 {
            // Offset the angle so no sample sits on a real axis cut.
            out.push(C64::from_polar(r, 2.0 * PI * (k as f64 + 0.37) / 64.0));
        }
    }
    out
}

fn max_residual(points: &[C64], f: impl Fn(C64) -> Result<f64>) -> (f64, Option<String>) {
    let mut worst = 0.0f64;
    for &z in points {
        match f(z) {
            Ok(v) if v.is_finite() => worst = worst.max(v),
            Ok(_) => return (f64::INFINITY, Some(format!("non-finite residual at {z}"))),
            Err(e) => return (f64::INFINITY, Some(format!("{e} at {z}"))),
        }
    }
    (worst, None)
}

fn make_check(name: &str, residual: f64, tol: f64, err: Option<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: err.is_none() && residual < tol,
        residual,
        detail: err.unwrap_or_else(|| format!("max residual {residual:.3e} (tol {tol:.0e})")),
    }
}

fn pair_dist(a: [C64; 2], b: [C64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

/// Checks the seed conditions: τ an involution fixing 0 with τ′(0) = −1, φ
/// τ-odd, φ′(0) and its conjugate independent, and reality when flagged.
pub fn validate(data: &HoloData) -> ValidationReport {
    let mut checks = Vec::new();
    let tau_radius = data.tau.validity_radius().unwrap_or(0.0);
    let r_max = data.domain_radius.min(tau_radius);
    let near = circle_samples(&[0.3 * r_max, 0.6 * r_max, 0.9 * r_max]);

    let (res, err) = max_residual(&near, |z| {
        let w = data.tau.apply(z)?;
        Ok((data.tau.apply(w)? - z).norm())
    });
    checks.push(make_check("involution", res, VALIDATION_TOL, err));

    let h = 1e-4 * r_max.min(1.0);
    let tau_prime = data
        .tau
        .apply(C64::new(h, 0.0))
        .and_then(|a| Ok((a - data.tau.apply(C64::new(-h, 0.0))?) / (2.0 * h)));
    let fixed = data.tau.apply(C64::new(0.0, 0.0)).map(|v| v.norm());
    match (tau_prime, fixed) {
        (Ok(d), Ok(f0)) => {
            let res = (d + 1.0).norm();
            checks.push(make_check("fixed_point", f0, VALIDATION_TOL, None));
            checks.push(make_check("tau_derivative", res, 1e-8, None));
        }
        (Err(e), _) | (_, Err(e)) => {
            checks.push(make_check(
                "fixed_point",
                f64::INFINITY,
                VALIDATION_TOL,
                Some(e.to_string()),
            ));
            checks.push(make_check("tau_derivative", f64::INFINITY, 1e-8, Some(e.to_string())));
        }
    }

    let (mut res, mut err) = max_residual(&near, |z| {
        let a = data.phi.eval(data.tau.apply(z)?)?;
        let b = data.phi.eval(z)?;
        Ok((a[0] + b[0]).norm().max((a[1] + b[1]).norm()))
    });
    if data.phi.is_two_sided() && err.is_none() {
        let far = circle_samples(&[1.0 / (0.3 * r_max), 1.0 / (0.6 * r_max), 1.0 / (0.9 * r_max)]);
        let (r2, e2) = max_residual(&far, |z| {
            let a = data.phi.eval_side(Side::Infinity, -z)?;
            let b = data.phi.eval_side(Side::Infinity, z)?;
            Ok((a[0] + b[0]).norm().max((a[1] + b[1]).norm()))
        });
        res = res.max(r2);
        err = e2;
    }
    checks.push(make_check("oddness", res, VALIDATION_TOL, err));

    match data.phi.derivative_at_zero() {
        Ok(d) => {
            let det = d[0] * d[1].conj() - d[1] * d[0].conj();
            let passed = det.norm() > VALIDATION_TOL;
            checks.push(CheckResult {
                name: "independence".into(),
                passed,
                residual: det.norm(),
                detail: format!("det[φ′(0), conj φ′(0)] = {det}"),
            });
        }
        Err(e) => checks.push(make_check(
            "independence",
            f64::INFINITY,
            VALIDATION_TOL,
            Some(e.to_string()),
        )),
    }

    if data.reality {
        let (res, err) = if data.phi.is_two_sided() {
            max_residual(&near, |z| {
                let a = data.phi.eval_side(Side::Infinity, -1.0 / z.conj())?;
                let b = data.phi.eval(z)?;
                Ok(pair_dist(a, [b[0].conj(), b[1].conj()]))
            })
        } else {
            // One germ must then cover both z and −1/conj z.
            let lo = (1.0 / data.domain_radius).max(0.0);
            if lo >= data.domain_radius {
                (
                    f64::INFINITY,
                    Some("one-sided real data needs domain radius above 1".into()),
                )
            } else {
                let mid = (lo * data.domain_radius).sqrt();
                let ring = circle_samples(&[mid, (mid * data.domain_radius).sqrt().min(0.95 * data.domain_radius)]);
                max_residual(&ring, |z| {
                    let a = data.phi.eval(-1.0 / z.conj())?;
                    let b = data.phi.eval(z)?;
                    Ok(pair_dist(a, [b[0].conj(), b[1].conj()]))
                })
            }
        };
        checks.push(make_check("reality", res, VALIDATION_TOL, err));
    }

    ValidationReport { checks }
}

/// Pulls the data back by z ↦ e^{iθ}z.
pub fn gauge_rotate(data: &HoloData, theta: f64) -> HoloData {
    let omega = C64::from_polar(1.0, theta);
    HoloData {
        tau: TauSpec {
            kind: data.tau.kind,
            rotation: data.tau.rotation + theta,
        },
        phi: data.phi.rotated(omega),
        domain_radius: data.domain_radius,
        reality: data.reality,
    }
}

/// The λ maps of the toric Fubini–Study example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FubiniStudy {
    pub p: [C64; 2],
}

impl FubiniStudy {
    pub fn new(p1: C64, p2: C64) -> Result<Self> {
        for p in [p1, p2] {
            if (p.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Degenerate(format!("{p} is not on the unit circle")));
            }
            if (p - 1.0).norm() < 1e-9 || (p + 1.0).norm() < 1e-9 {
                return Err(Error::Degenerate(format!("{p} coincides with ±1")));
            }
        }
        if (p1 - p2).norm() < 1e-9 {
            return Err(Error::Degenerate("p1 = p2".into()));
        }
        Ok(Self { p: [p1, p2] })
    }

    pub fn from_angles(a1: f64, a2: f64) -> Result<Self> {
        Self::new(C64::from_polar(1.0, a1), C64::from_polar(1.0, a2))
    }

    /// λ_i(z) = (z + p_i)(z − 1)/((z − p_i)(z + 1)).
    pub fn lambda(&self, i: usize, z: C64) -> C64 {
        let p = self.p[i];
        (z + p) * (z - 1.0) / ((z - p) * (z + 1.0))
    }

    /// −i·log λ_i as a sum of principal logarithms, each analytic for |z| < 1:
    /// λ_i = (1 + z/p)(1 − z)/((1 − z/p)(1 + z)).
    pub fn phi_expr(&self, i: usize) -> Expr {
        use crate::dsl::{BinOp, Func};
        let q = self.p[i].inv();
        let qz = || Expr::bin(BinOp::Mul, Expr::Num(q), Expr::Var);
        let log = |op: BinOp, e: Expr| Expr::call(Func::Log, Expr::bin(op, Expr::num(1.0), e));
        let sum = Expr::bin(
            BinOp::Sub,
            Expr::bin(
                BinOp::Sub,
                Expr::bin(BinOp::Add, log(BinOp::Add, qz()), log(BinOp::Sub, Expr::Var)),
                log(BinOp::Sub, qz()),
            ),
            log(BinOp::Add, Expr::Var),
        );
        Expr::bin(BinOp::Mul, Expr::Neg(Box::new(Expr::ImagUnit)), sum)
    }

    pub fn data(&self) -> HoloData {
        HoloData {
            tau: TauSpec::linear(),
            phi: PhiSpec::real_from([self.phi_expr(0), self.phi_expr(1)]),
            domain_radius: 0.9,
            reality: true,
        }
    }
}

/// The built-in Fubini–Study seed for unit p₁, p₂ away from ±1.
pub fn fubini_study_data(p1: C64, p2: C64) -> Result<HoloData> {
    Ok(FubiniStudy::new(p1, p2)?.data())
}
