//! From the potential G(r, s) to an axisymmetric solution F(x, y) of
//! F_xx + F_yy + F_y/y = 0 and the Joyce form of the metric.
//!
//! r = f(ζ) and s = f(ξ) for one Möbius map f (the Cayley map by default).
//! With λ² = (r − s)/(r_ζ(ζ − ξ)) the pair F_ζ = λG_ζ, F_ξ = λ⁻¹G_ξ solves
//! F_ζξ = (F_ζ − F_ξ)/(2(ζ − ξ)); on the real slice ξ = ζ̄ it is a real
//! gradient, P = −yF_x and Q = yF_y solve the Joyce equations, and
//! (dx² + dy²)/y² + ((P₂du₁ − P₁du₂)² + (Q₂du₁ − Q₁du₂)²)/(P₁Q₂ − Q₁P₂)²
//! is the Riemannian representative.

use serde::Serialize;

use crate::complex::{integrate_adaptive, sqrt_p, track_products, Contour, Mobius, QuadratureOptions, C64, I};
use crate::curvature::{Mat4, MetricField};
use crate::dsl::Expr;
use crate::error::{Error, Result};
use crate::holo::HoloData;
use crate::so_engine::{compute_ab, h_block, sigma, MetricKind, MetricSample, SoOptions};

/// The pair r = f(ζ), s = f(ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeMap {
    pub map: Mobius,
}

impl Default for BridgeMap {
    fn default() -> Self {
        Self { map: Mobius::cayley() }
    }
}

impl BridgeMap {
    pub fn new(map: Mobius) -> Self {
        Self { map }
    }

    pub fn r(&self, zeta: C64) -> C64 {
        self.map.eval(zeta)
    }

    pub fn s(&self, xi: C64) -> C64 {
        self.map.eval(xi)
    }

    /// r_ζ (and s_ξ, the same function of ξ).
    pub fn derivative(&self, zeta: C64) -> C64 {
        self.map.derivative(zeta)
    }

    pub fn zeta_of(&self, r: C64) -> C64 {
        self.map.inverse().eval(r)
    }

    /// λ = (cζ + d)^{1/2}/(cξ + d)^{1/2}, principal roots.
    pub fn lambda(&self, zeta: C64, xi: C64) -> C64 {
        sqrt_p(self.map.c * zeta + self.map.d) / sqrt_p(self.map.c * xi + self.map.d)
    }

    /// The root of −s = −f(ξ) that pairs with λ.
    pub fn sigma(&self, xi: C64) -> C64 {
        sqrt_p(-(self.map.a * xi + self.map.b)) / sqrt_p(self.map.c * xi + self.map.d)
    }

    /// Residuals of λ² = (r − s)/(r_ζ(ζ − ξ)) and λ⁻² = (r − s)/(s_ξ(ζ − ξ)).
    pub fn lambda_residuals(&self, zeta: C64, xi: C64) -> (f64, f64) {
        let l2 = self.lambda(zeta, xi).powi(2);
        let diff = self.r(zeta) - self.s(xi);
        let a = diff / (self.derivative(zeta) * (zeta - xi));
        let b = diff / (self.derivative(xi) * (zeta - xi));
        ((l2 - a).norm() / a.norm(), (1.0 / l2 - b).norm() / b.norm())
    }
}

/// f′(ζ)f′(ξ)((ζ − ξ)/(f(ζ) − f(ξ)))² − 1.
pub fn mobius_identity_residual(map: &Mobius, zeta: C64, xi: C64) -> f64 {
    let q = (zeta - xi) / (map.eval(zeta) - map.eval(xi));
    (map.derivative(zeta) * map.derivative(xi) * q * q - 1.0).norm()
}

/// H_{a,b} as a symmetric 2×2 block.
pub fn h_form(a: [C64; 2], b: [C64; 2]) -> Result<[[C64; 2]; 2]> {
    let d = a[1] * b[0] - a[0] * b[1];
    if d.norm() == 0.0 {
        return Err(Error::DegenerateFrame("a and b are parallel".into()));
    }
    Ok(h_block(a, b, d))
}

/// max |H_{λa, λ⁻¹b} − H_{a,b}| relative to |H_{a,b}|.
pub fn h_gauge_residual(a: [C64; 2], b: [C64; 2], lambda: C64) -> Result<f64> {
    let h = h_form(a, b)?;
    let hl = h_form(a.map(|v| v * lambda), b.map(|v| v / lambda))?;
    let scale = h.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((h[i][j] - hl[i][j]).norm());
        }
    }
    Ok(worst / scale)
}

/// F_ζ and F_ξ at one (ζ, ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgedDerivatives {
    pub f_zeta: [C64; 2],
    pub f_xi: [C64; 2],
    /// The branch token of the potential that matches the bridge's root of −s.
    pub token: i8,
}

fn matching_token(bridge: &BridgeMap, s: C64, xi: C64) -> Result<i8> {
    let want = bridge.sigma(xi);
    for token in [1i8, -1] {
        if (sigma(s, token) - want).norm() <= 1e-8 * want.norm() {
            return Ok(token);
        }
    }
    Err(Error::Branch(format!("no root of −s matches {want}")))
}

/// F_ζ = λ r_ζ A and F_ξ = λ⁻¹ s_ξ B, with the potential's token chosen so
/// that the products do not depend on any square-root convention.
pub fn bridge_f_from_g(
    data: &HoloData,
    bridge: &BridgeMap,
    zeta: C64,
    xi: C64,
    opts: &SoOptions,
) -> Result<BridgedDerivatives> {
    let (r, s) = (bridge.r(zeta), bridge.s(xi));
    let token = matching_token(bridge, s, xi)?;
    let ab = compute_ab(data, r, s, &SoOptions { token, ..*opts })?;
    let lambda = bridge.lambda(zeta, xi);
    let (rz, sx) = (bridge.derivative(zeta), bridge.derivative(xi));
    Ok(BridgedDerivatives {
        f_zeta: ab.a.map(|v| lambda * rz * v),
        f_xi: ab.b.map(|v| sx * v / lambda),
        token,
    })
}

/// Recomputes F with the opposite potential token and the opposite root of −s;
/// the two must agree.
pub fn branch_consistency(data: &HoloData, bridge: &BridgeMap, zeta: C64, xi: C64, opts: &SoOptions) -> Result<f64> {
    let base = bridge_f_from_g(data, bridge, zeta, xi, opts)?;
    let flipped = compute_ab(
        data,
        bridge.r(zeta),
        bridge.s(xi),
        &SoOptions {
            token: -base.token,
            ..*opts
        },
    )?;
    // Flipping σ negates A and B; the bridge root must flip with it.
    let lambda = -bridge.lambda(zeta, xi);
    let (rz, sx) = (bridge.derivative(zeta), bridge.derivative(xi));
    let mut worst = 0.0f64;
    for i in 0..2 {
        worst = worst.max((lambda * rz * flipped.a[i] - base.f_zeta[i]).norm() / base.f_zeta[i].norm());
        worst = worst.max((sx * flipped.b[i] / lambda - base.f_xi[i]).norm() / base.f_xi[i].norm());
    }
    if worst > 1e-10 {
        return Err(Error::Branch(format!(
            "bridged derivatives change by {worst} under a token flip"
        )));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealitySample {
    pub zeta: [f64; 2],
    /// |G_s + (r̄²/|r|)·conj(G_r)| / |G_s| on s = 1/r̄.
    pub g_residual: f64,
    /// |F_ξ − conj(F_ζ)| / |F_ζ| on ξ = ζ̄.
    pub f_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealityReport {
    pub samples: Vec<RealitySample>,
    pub max_g_residual: f64,
    pub max_f_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const REALITY_TOL: f64 = 1e-7;

/// Checks both reality relations at the given ζ (with ξ = ζ̄).
pub fn reality_check(data: &HoloData, bridge: &BridgeMap, samples: &[C64], opts: &SoOptions) -> Result<RealityReport> {
    let mut out = Vec::with_capacity(samples.len());
    for &zeta in samples {
        let xi = zeta.conj();
        let (r, s) = (bridge.r(zeta), bridge.s(xi));
        let token = matching_token(bridge, s, xi)?;
        let ab = compute_ab(data, r, s, &SoOptions { token, ..*opts })?;
        let f = bridge_f_from_g(data, bridge, zeta, xi, opts)?;
        let factor = r.conj() * r.conj() / r.norm();
        let mut g_res = 0.0f64;
        let mut f_res = 0.0f64;
        for i in 0..2 {
            g_res = g_res.max((ab.b[i] + factor * ab.a[i].conj()).norm() / ab.b[i].norm());
            f_res = f_res.max((f.f_xi[i] - f.f_zeta[i].conj()).norm() / f.f_zeta[i].norm());
        }
        out.push(RealitySample {
            zeta: [zeta.re, zeta.im],
            g_residual: g_res,
            f_residual: f_res,
        });
    }
    let max_g = out.iter().map(|s| s.g_residual).fold(0.0, f64::max);
    let max_f = out.iter().map(|s| s.f_residual).fold(0.0, f64::max);
    Ok(RealityReport {
        samples: out,
        max_g_residual: max_g,
        max_f_residual: max_f,
        tolerance: REALITY_TOL,
        passed: max_g < REALITY_TOL && max_f < REALITY_TOL,
    })
}

/// F(ζ, ξ) = ∮ Ψ(u) du / ((u − ζ)^{1/2}(u − ξ)^{1/2}) over a circle enclosing ζ and ξ.
///
/// The root is continued around the circle from (u − m)·√(1 − δ²/(u − m)²)
/// at the first node, m and δ the midpoint and half-difference of ζ, ξ.
pub fn psi_forward(
    psi: &[Expr; 2],
    zeta: C64,
    xi: C64,
    contour: &Contour,
    quad: &QuadratureOptions,
) -> Result<[C64; 2]> {
    for p in [zeta, xi] {
        let gap = (p - contour.center).norm();
        if gap >= contour.radius * (1.0 - 1e-6) {
            return Err(Error::Geometry(format!("{p} is not strictly inside the contour")));
        }
    }
    let m = 0.5 * (zeta + xi);
    let delta = 0.5 * (zeta - xi);
    let q = integrate_adaptive::<2, _>(contour, quad, |ct| {
        let pts = ct.points();
        let products: Vec<C64> = pts.iter().map(|&u| (u - zeta) * (u - xi)).collect();
        let u0 = pts[0] - m;
        let seed = u0 * sqrt_p(1.0 - delta * delta / (u0 * u0));
        let roots = track_products(&products, ct, seed)?;
        pts.iter()
            .zip(&roots.values)
            .map(|(&u, &w)| Ok([psi[0].eval(u)? / w, psi[1].eval(u)? / w]))
            .collect()
    })?;
    Ok(q.values)
}

/// F_xx + F_yy + F_y/y by fourth-order central differences with step h.
pub fn ash_residual(
    field: &dyn Fn(f64, f64) -> Result<[C64; 2]>,
    points: &[(f64, f64)],
    h: f64,
) -> Result<Vec<[C64; 2]>> {
    points
        .iter()
        .map(|&(x, y)| {
            if y - 2.0 * h <= 0.0 {
                return Err(Error::Axis);
            }
            let f0 = field(x, y)?;
            let fx = [
                field(x - 2.0 * h, y)?,
                field(x - h, y)?,
                field(x + h, y)?,
                field(x + 2.0 * h, y)?,
            ];
            let fy = [
                field(x, y - 2.0 * h)?,
                field(x, y - h)?,
                field(x, y + h)?,
                field(x, y + 2.0 * h)?,
            ];
            let second = |s: &[[C64; 2]; 4], i: usize| {
                (-s[0][i] + 16.0 * s[1][i] - 30.0 * f0[i] + 16.0 * s[2][i] - s[3][i]) / (12.0 * h * h)
            };
            let first = |s: &[[C64; 2]; 4], i: usize| (s[0][i] - 8.0 * s[1][i] + 8.0 * s[2][i] - s[3][i]) / (12.0 * h);
            Ok([0, 1].map(|i| second(&fx, i) + second(&fy, i) + first(&fy, i) / y))
        })
        .collect()
}

/// Gradient (F_x, F_y) of an axisymmetric solution on the upper half plane.
pub trait JoyceField: Sync {
    fn gradient(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]>;

    /// P = −yF_x and Q = yF_y.
    fn pq(&self, x: f64, y: f64) -> Result<([f64; 2], [f64; 2])> {
        if y <= 0.0 {
            return Err(Error::Axis);
        }
        let [fx, fy] = self.gradient(x, y)?;
        Ok(([-y * fx[0], -y * fx[1]], [y * fy[0], y * fy[1]]))
    }
}

/// A closed-form F with its gradient supplied alongside.
pub struct ClosedFormField<G>(pub G);

impl<G> JoyceField for ClosedFormField<G>
where
    G: Fn(f64, f64) -> [[f64; 2]; 2] + Sync,
{
    fn gradient(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        Ok((self.0)(x, y))
    }
}

/// F from the potential through the bridge, on the real slice ξ = ζ̄.
#[derive(Debug, Clone)]
pub struct BridgedField {
    pub data: HoloData,
    pub bridge: BridgeMap,
    pub opts: SoOptions,
}

impl BridgedField {
    pub fn new(data: HoloData, opts: SoOptions) -> Self {
        Self {
            data,
            bridge: BridgeMap::default(),
            opts,
        }
    }
}

/// Largest imaginary part of (F_x, F_y) relative to their size.
pub const NOT_REAL_TOL: f64 = 1e-8;

impl JoyceField for BridgedField {
    fn gradient(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        let zeta = C64::new(x, y);
        let f = bridge_f_from_g(&self.data, &self.bridge, zeta, zeta.conj(), &self.opts)?;
        let fx = [f.f_zeta[0] + f.f_xi[0], f.f_zeta[1] + f.f_xi[1]];
        let fy = [I * (f.f_zeta[0] - f.f_xi[0]), I * (f.f_zeta[1] - f.f_xi[1])];
        let size = fx.iter().chain(&fy).map(|v| v.norm()).fold(0.0, f64::max);
        let imag = fx.iter().chain(&fy).map(|v| v.im.abs()).fold(0.0, f64::max);
        if imag > NOT_REAL_TOL * size {
            return Err(Error::NotReal(imag / size));
        }
        Ok([[fx[0].re, fx[1].re], [fy[0].re, fy[1].re]])
    }
}

/// Residuals |P_x − Q_y| and |P_y + Q_x − P/y|, relative to (|P| + |Q|)/y.
pub fn joyce_residuals(field: &dyn JoyceField, x: f64, y: f64, h: f64) -> Result<[f64; 2]> {
    if y - 2.0 * h <= 0.0 {
        return Err(Error::Axis);
    }
    let d = |dx: f64, dy: f64| {
        let at = |k: f64| field.pq(x + k * dx, y + k * dy);
        let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
        let diff = |a: [f64; 2], b: [f64; 2], c: [f64; 2], e: [f64; 2]| {
            [0, 1].map(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - e[i]) / (12.0 * h))
        };
        Ok::<_, Error>((diff(m2.0, m1.0, p1.0, p2.0), diff(m2.1, m1.1, p1.1, p2.1)))
    };
    let (p, q) = field.pq(x, y)?;
    let (px, qx) = d(h, 0.0)?;
    let (py, qy) = d(0.0, h)?;
    let scale = (p[0].hypot(p[1]) + q[0].hypot(q[1])) / y;
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for i in 0..2 {
        first = first.max((px[i] - qy[i]).abs());
        second = second.max((py[i] + qx[i] - p[i] / y).abs());
    }
    Ok([first / scale, second / scale])
}

/// The Joyce metric in coordinates (x, y, u₁, u₂).
pub fn joyce_metric(y: f64, p: [f64; 2], q: [f64; 2]) -> Result<[[f64; 4]; 4]> {
    let det = p[0] * q[1] - q[0] * p[1];
    let size = p[0].hypot(p[1]) * q[0].hypot(q[1]);
    if !(det.abs() >= 1e-12 * size) || size == 0.0 {
        return Err(Error::Degenerate(format!("P₁Q₂ − Q₁P₂ = {det}")));
    }
    let d2 = det * det;
    let base = 1.0 / (y * y);
    let mut g = [[0.0; 4]; 4];
    g[0][0] = base;
    g[1][1] = base;
    g[2][2] = (p[1] * p[1] + q[1] * q[1]) / d2;
    g[3][3] = (p[0] * p[0] + q[0] * q[0]) / d2;
    g[2][3] = -(p[0] * p[1] + q[0] * q[1]) / d2;
    g[3][2] = g[2][3];
    Ok(g)
}

fn to_complex(g: [[f64; 4]; 4]) -> Mat4 {
    g.map(|row| row.map(|v| C64::new(v, 0.0)))
}

/// The Riemannian metric at x = (Re ζ, Im ζ, u₁, u₂).
pub fn real_metric(data: &HoloData, x: [f64; 4], opts: &SoOptions) -> Result<MetricSample> {
    if !data.reality {
        return Err(Error::NotReal(f64::INFINITY));
    }
    let field = BridgedField::new(data.clone(), *opts);
    let (p, q) = field.pq(x[0], x[1])?;
    let g = joyce_metric(x[1], p, q)?;
    let det = p[0] * q[1] - q[0] * p[1];
    Ok(MetricSample {
        point: x.map(|v| C64::new(v, 0.0)),
        g: to_complex(g),
        kind: MetricKind::Real,
        sqrt_det: Some(C64::new(1.0 / (x[1] * x[1] * det.abs()), 0.0)),
    })
}

/// The Joyce metric of a field as an evaluator on (x, y, u₁, u₂).
pub struct JoyceMetricField<F: JoyceField> {
    pub field: F,
}

impl<F: JoyceField> MetricField for JoyceMetricField<F> {
    fn metric(&self, x: &[C64; 4]) -> Result<Mat4> {
        let (p, q) = self.field.pq(x[0].re, x[1].re)?;
        Ok(to_complex(joyce_metric(x[1].re, p, q)?))
    }

    fn sqrt_det(&self, x: &[C64; 4]) -> Option<C64> {
        let (p, q) = self.field.pq(x[0].re, x[1].re).ok()?;
        let det = p[0] * q[1] - q[0] * p[1];
        Some(C64::new(1.0 / (x[1].re.powi(2) * det.abs()), 0.0))
    }

    fn length_scales(&self, x: &[C64; 4]) -> [f64; 4] {
        let y = x[1].re;
        [y, y, 1.0, 1.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;
    use crate::curvature::{signature, symmetric_eigenvalues};
    use crate::dsl::{parse, parse_in};
    use crate::holo::{fubini_study_data, PhiSpec, TauSpec};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn real_linear() -> HoloData {
        HoloData {
            tau: TauSpec::linear(),
            phi: PhiSpec::real_from([parse("z + 0.2*z^3").unwrap(), parse("i*z").unwrap()]),
            domain_radius: 0.9,
            reality: true,
        }
    }

    fn fs() -> HoloData {
        fubini_study_data(C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, 2.0 * PI / 3.0)).unwrap()
    }

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn mobius_identity_and_gauge_invariance() {
        let mut rng = rng();
        let mut pick = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let maps = [Mobius::cayley(), Mobius::new(pick(), pick(), pick(), pick()).unwrap()];
        for _ in 0..100 {
            let (z, w) = (pick(), pick());
            for m in &maps {
                assert!(mobius_identity_residual(m, z, w) < 1e-12);
            }
            let (a, b, l) = ([pick(), pick()], [pick(), pick()], pick());
            assert!(h_gauge_residual(a, b, l).unwrap() < 1e-12);
        }
    }

    #[test]
    fn lambda_satisfies_both_relations() {
        let bridge = BridgeMap::default();
        for (z, w) in [(c(0.1, 0.9), c(0.2, -1.1)), (c(-0.3, 1.2), c(-0.3, -1.2))] {
            let (a, b) = bridge.lambda_residuals(z, w);
            assert!(a < 1e-12 && b < 1e-12);
            let s = bridge.s(w);
            assert!((bridge.sigma(w).powi(2) + s).norm() < 1e-12 * s.norm());
        }
        let id = BridgeMap::new(Mobius::identity());
        assert_eq!(id.lambda(c(0.3, 0.1), c(2.0, 1.0)), c(1.0, 0.0));
    }

    #[test]
    fn identity_bridge_returns_potential_derivatives() {
        let data = real_linear();
        let id = BridgeMap::new(Mobius::identity());
        let (r, s) = (c(0.04, 0.01), c(20.0, -3.0));
        let f = bridge_f_from_g(&data, &id, r, s, &SoOptions::default()).unwrap();
        let ab = compute_ab(
            &data,
            r,
            s,
            &SoOptions {
                token: f.token,
                ..SoOptions::default()
            },
        )
        .unwrap();
        assert_eq!(f.f_zeta, ab.a);
        assert_eq!(f.f_xi, ab.b);
    }

    #[test]
    fn bridged_pair_solves_the_cross_derivative_system() {
        let data = real_linear();
        let bridge = BridgeMap::default();
        let opts = SoOptions::default();
        let mut rng = rng();
        for _ in 0..10 {
            let zeta = c(rng.gen_range(-0.3..0.3), rng.gen_range(0.8..1.3));
            let xi = zeta.conj() + c(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
            let h = 1e-3;
            let at = |dz: f64, dx: f64| bridge_f_from_g(&data, &bridge, zeta + dz, xi + dx, &opts).unwrap();
            let base = at(0.0, 0.0);
            let stencil = |f: &dyn Fn(f64) -> [C64; 2]| {
                let (m2, m1, p1, p2) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
                [0, 1].map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
            };
            let alpha_xi = stencil(&|d| at(0.0, d).f_zeta);
            let beta_zeta = stencil(&|d| at(d, 0.0).f_xi);
            for i in 0..2 {
                let rhs = (base.f_zeta[i] - base.f_xi[i]) / (2.0 * (zeta - xi));
                assert!(
                    (alpha_xi[i] - rhs).norm() < 1e-6 * rhs.norm().max(1.0),
                    "{} vs {rhs}",
                    alpha_xi[i]
                );
                assert!((beta_zeta[i] - rhs).norm() < 1e-6 * rhs.norm().max(1.0));
            }
            assert!(branch_consistency(&data, &bridge, zeta, xi, &opts).unwrap() < 1e-10);
        }
    }

    #[test]
    fn reality_relations_hold_for_real_data() {
        let samples = [c(0.05, 1.0), c(0.2, 1.1), c(-0.3, 0.8), c(0.1, 1.4)];
        for data in [real_linear(), fs()] {
            let rep = reality_check(&data, &BridgeMap::default(), &samples, &SoOptions::default()).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
        let mut bad = real_linear();
        bad.phi = PhiSpec::exprs([parse("z + 0.3*z^3").unwrap(), parse("i*z").unwrap()]);
        bad.domain_radius = 100.0;
        let rep = reality_check(&bad, &BridgeMap::default(), &samples[1..], &SoOptions::default()).unwrap();
        assert!(!rep.passed && rep.max_f_residual > 1e-3);
    }

    #[test]
    fn psi_forward_constant_and_symmetry() {
        let quad = QuadratureOptions::default();
        let one = [parse_in("1", "u").unwrap(), parse_in("0", "u").unwrap()];
        let ct = Contour::new(c(0.0, 0.0), 3.0, 64).unwrap();
        let (z, w) = (c(0.3, 1.1), c(-0.2, -0.9));
        let f = psi_forward(&one, z, w, &ct, &quad).unwrap();
        assert!((f[0] - 2.0 * PI * I).norm() < 1e-12);
        assert!(f[1].norm() < 1e-14);
        let quad_psi = [parse_in("u", "u").unwrap(), parse_in("u^2", "u").unwrap()];
        let a = psi_forward(&quad_psi, z, w, &ct, &quad).unwrap();
        let b = psi_forward(&quad_psi, w, z, &ct, &quad).unwrap();
        assert!((a[0] - b[0]).norm() < 1e-12 && (a[1] - b[1]).norm() < 1e-12);
        // Laurent at ∞: u/√((u−ζ)(u−ξ)) has residue (ζ+ξ)/2.
        assert!((a[0] - 2.0 * PI * I * 0.5 * (z + w)).norm() < 1e-12);
        let off = Contour::new(c(0.0, 0.0), 1.0, 64).unwrap();
        assert!(matches!(psi_forward(&one, z, w, &off, &quad), Err(Error::Geometry(_))));
    }

    #[test]
    fn psi_forward_solves_the_pde() {
        let quad = QuadratureOptions::default();
        let psi = [parse_in("u", "u").unwrap(), parse_in("u^2", "u").unwrap()];
        let ct = Contour::new(c(0.0, 0.0), 4.0, 64).unwrap();
        let f = |z: C64, w: C64| psi_forward(&psi, z, w, &ct, &quad).unwrap();
        for (z, w) in [
            (c(0.3, 1.1), c(0.3, -1.1)),
            (c(-0.5, 0.7), c(0.2, -1.3)),
            (c(1.0, 0.5), c(-1.0, 0.2)),
        ] {
            let h = 1e-3;
            let dz = |z: C64, w: C64| {
                let (m2, m1, p1, p2) = (f(z - 2.0 * h, w), f(z - h, w), f(z + h, w), f(z + 2.0 * h, w));
                [0, 1].map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
            };
            let dw = |z: C64, w: C64| dz(w, z);
            let fz = dz(z, w);
            let fw = dw(z, w);
            let (m1, p1) = (dz(z, w - h), dz(z, w + h));
            let (m2, p2) = (dz(z, w - 2.0 * h), dz(z, w + 2.0 * h));
            for i in 0..2 {
                let mixed = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
                let rhs = (fz[i] - fw[i]) / (2.0 * (z - w));
                assert!((mixed - rhs).norm() < 1e-6, "{mixed} vs {rhs}");
            }
        }
        let ash = ash_residual(
            &|x, y| psi_forward(&psi, c(x, y), c(x, -y), &ct, &quad),
            &[(0.1, 1.0), (-0.4, 0.6)],
            1e-3,
        )
        .unwrap();
        assert!(ash.iter().flatten().all(|v| v.norm() < 1e-6));
    }

    #[test]
    fn ash_residual_closed_forms() {
        let log = |x: f64, y: f64| Ok([c(x, 0.0), c(y.ln(), 0.0)]);
        let res = ash_residual(&log, &[(0.0, 1.0), (0.5, 2.0)], 1e-3).unwrap();
        assert!(res.iter().flatten().all(|v| v.norm() < 1e-8));
        let sq = |x: f64, _y: f64| Ok([c(x * x, 0.0), c(0.0, 0.0)]);
        let res = ash_residual(&sq, &[(0.3, 1.0)], 1e-3).unwrap();
        assert!((res[0][0] - 2.0).norm() < 1e-8 && res[0][1].norm() == 0.0);
        assert!(matches!(ash_residual(&log, &[(0.0, 0.001)], 1e-3), Err(Error::Axis)));
    }

    #[test]
    fn injected_joyce_metric() {
        // F = (x, log y): P = (−y, 0), Q = (0, 1).
        let y = 1.7;
        let g = joyce_metric(y, [-y, 0.0], [0.0, 1.0]).unwrap();
        let want = [1.0 / (y * y), 1.0 / (y * y), 1.0 / (y * y), 1.0];
        for i in 0..4 {
            assert!((g[i][i] - want[i]).abs() < 1e-15);
        }
        assert_eq!(g[2][3], 0.0);
        let field = ClosedFormField(|_x: f64, y: f64| [[1.0, 0.0], [0.0, 1.0 / y]]);
        let r = joyce_residuals(&field, 0.2, 1.3, 1e-3).unwrap();
        assert!(r[0] < 1e-10 && r[1] < 1e-10);
        assert!(matches!(
            joyce_metric(1.0, [1.0, 2.0], [2.0, 4.0]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bridged_fields_satisfy_the_joyce_equations() {
        for data in [real_linear(), fs()] {
            let field = BridgedField::new(data, SoOptions::default());
            for (x, y) in [(0.05, 1.0), (0.25, 0.8), (-0.2, 1.3)] {
                let r = joyce_residuals(&field, x, y, 1e-3 * y).unwrap();
                assert!(r[0] < 1e-6 && r[1] < 1e-6, "{r:?}");
            }
        }
    }

    #[test]
    fn real_metric_is_positive_definite() {
        let data = fs();
        let mut rng = rng();
        for _ in 0..20 {
            let x = [
                rng.gen_range(-0.3..0.3),
                rng.gen_range(0.7..1.4),
                rng.gen_range(-1.0..1.0),
                0.0,
            ];
            let m = real_metric(&data, x, &SoOptions::default()).unwrap();
            assert_eq!(signature(&m.g), "(4,0)");
            let ev = symmetric_eigenvalues(&m.g.map(|row| row.map(|v| v.re)));
            assert!(ev[0] > 0.0);
        }
        let mut not_real = real_linear();
        not_real.reality = false;
        assert!(matches!(
            real_metric(&not_real, [0.0, 1.0, 0.0, 0.0], &SoOptions::default()),
            Err(Error::NotReal(_))
        ));
    }

    #[test]
    fn joyce_form_is_conformal_to_the_holomorphic_metric() {
        // Pull dr ds + H_{A,B} back along (x, y, u) ↦ (f(x+iy), f(x−iy), iu).
        let data = fs();
        let bridge = BridgeMap::default();
        let opts = SoOptions::default();
        for (x, y) in [(0.05, 1.0), (0.2, 0.9), (-0.15, 1.25)] {
            let zeta = c(x, y);
            let (r, s) = (bridge.r(zeta), bridge.s(zeta.conj()));
            let token = matching_token(&bridge, s, zeta.conj()).unwrap();
            let ab = compute_ab(&data, r, s, &SoOptions { token, ..opts }).unwrap();
            let (hol, _) = crate::so_engine::metric_from_ab(ab.a, ab.b).unwrap();
            let (rz, sx) = (bridge.derivative(zeta), bridge.derivative(zeta.conj()));
            let zero = c(0.0, 0.0);
            let jac = [
                [rz, I * rz, zero, zero],
                [sx, -I * sx, zero, zero],
                [zero, zero, I, zero],
                [zero, zero, zero, I],
            ];
            let mut pulled = [[zero; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for a in 0..4 {
                        for b in 0..4 {
                            pulled[i][j] += jac[a][i] * hol[a][b] * jac[b][j];
                        }
                    }
                }
            }
            let real = real_metric(&data, [x, y, 0.0, 0.0], &opts).unwrap().g;
            let ratio = pulled[0][0] / real[0][0];
            assert!((ratio - rz * sx * y * y).norm() < 1e-9 * ratio.norm());
            for i in 0..4 {
                for j in 0..4 {
                    let want = ratio * real[i][j];
                    assert!(
                        (pulled[i][j] - want).norm() < 1e-6 * ratio.norm() * (1.0 + real[i][j].norm()),
                        "{i}{j}"
                    );
                }
            }
        }
    }
}
