//! Metrics for τ(z) = −z: the potential G(r, s), its derivatives A = G_r and
//! B = G_s as contour integrals around two cuts, and the conformal class
//! dr ds + H_{A,B} on the space of lines.
//!
//! The cuts are the segment [−√r, √r] and the two rays beyond ±√s. Their
//! square root W(z) = (z²−r)^{1/2}(z²−s)^{1/2} is factored as
//! z·√(1 − r/z²)·σ·√(1 − z²/s) with σ² = −s; the root σ is the branch token
//! shared by G, A and B.

use std::f64::consts::PI;

use crate::complex::{track_products, Contour, QuadratureOptions, C64, I};
use crate::error::{Error, Result};
use crate::holo::{HoloData, Side};

pub type Mat4 = [[C64; 4]; 4];

/// A point (r, s, v₁, v₂) on the complexified space of lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePoint {
    pub r: C64,
    pub s: C64,
    pub v: [C64; 2],
}

impl LinePoint {
    pub fn new(r: C64, s: C64) -> Self {
        Self {
            r,
            s,
            v: [C64::new(0.0, 0.0); 2],
        }
    }

    /// s = 1/conj(r) with real v.
    pub fn real_slice(r: C64, v: [f64; 2]) -> Self {
        Self {
            r,
            s: 1.0 / r.conj(),
            v: [C64::new(v[0], 0.0), C64::new(v[1], 0.0)],
        }
    }

    pub fn coords(&self) -> [C64; 4] {
        [self.r, self.s, self.v[0], self.v[1]]
    }

    pub fn from_coords(x: &[C64; 4]) -> Self {
        Self {
            r: x[0],
            s: x[1],
            v: [x[2], x[3]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoOptions {
    pub quadrature: QuadratureOptions,
    /// Multiplies the canonical contour radii (robustness checks use 0.8 and 1.2).
    pub radius_scale: f64,
    /// Branch token: +1 takes σ = √(−s) principal, −1 its negative.
    pub token: i8,
}

impl Default for SoOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            radius_scale: 1.0,
            token: 1,
        }
    }
}

/// G, A = G_r and B = G_s under one branch token.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub g: [C64; 2],
    pub a: [C64; 2],
    pub b: [C64; 2],
    pub token: i8,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABPair {
    pub a: [C64; 2],
    pub b: [C64; 2],
    pub token: i8,
}

/// One circle of the integration cycle with its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePiece {
    pub side: Side,
    pub contour: Contour,
    pub weight: f64,
}

/// Circles separating the cut [−√r, √r] from the rays beyond ±√s.
///
/// One-sided data uses the single circle |z| = (|r||s|)^{1/4}. Two-sided data
/// integrates the near germ on a circle inside the domain disc and the far germ
/// on a circle outside its reflection, each with weight ½; when both germs
/// continue one function the two circles give the same value.
pub fn integration_cycle(data: &HoloData, r: C64, s: C64, radius_scale: f64) -> Result<Vec<CyclePiece>> {
    if (r - s).norm() < 1e-12 * (1.0 + s.norm()) {
        return Err(Error::Geometry("r = s is excluded".into()));
    }
    let a = r.norm().sqrt();
    let b = s.norm().sqrt();
    if !(a < b) {
        return Err(Error::Geometry(format!(
            "cut half-lengths |√r| = {a} and |√s| = {b} are not nested"
        )));
    }
    let node = |radius: f64| Contour::new(C64::new(0.0, 0.0), radius, 64);
    let pieces = if data.phi.is_two_sided() {
        let dom = data.domain_radius;
        if !(a < dom) || !(b > 1.0 / dom) {
            return Err(Error::Geometry(format!(
                "cuts |√r| = {a}, |√s| = {b} must lie inside radius {dom} and outside {}",
                1.0 / dom
            )));
        }
        // Geometric midpoints of the annuli a < |z| < min(dom, b) and max(1/dom, a) < |z| < b.
        let near = (a * dom.min(b)).sqrt() * radius_scale;
        let far = (b * (1.0 / dom).max(a)).sqrt() * radius_scale;
        if !(near > a && near < dom.min(b)) || !(far < b && far > (1.0 / dom).max(a)) {
            return Err(Error::Geometry(format!(
                "scaled contours {near}, {far} leave the admissible annuli"
            )));
        }
        vec![
            CyclePiece {
                side: Side::Zero,
                contour: node(near)?,
                weight: 0.5,
            },
            CyclePiece {
                side: Side::Infinity,
                contour: node(far)?,
                weight: 0.5,
            },
        ]
    } else {
        let radius = (a * b).sqrt() * radius_scale;
        if !(radius > a && radius < b) {
            return Err(Error::Geometry(format!("contour radius {radius} collides with a cut")));
        }
        if radius > data.domain_radius {
            return Err(Error::Geometry(format!(
                "contour radius {radius} exceeds the domain radius"
            )));
        }
        vec![CyclePiece {
            side: Side::Zero,
            contour: node(radius)?,
            weight: 1.0,
        }]
    };
    Ok(pieces)
}

/// σ with σ² = −s for the given token.
pub fn sigma(s: C64, token: i8) -> C64 {
    let root = (-s).sqrt();
    if token < 0 {
        -root
    } else {
        root
    }
}

/// W(z) from the explicit factorization, valid for |√r| < |z| < |√s|.
pub fn w_factored(z: C64, r: C64, s: C64, token: i8) -> C64 {
    z * (1.0 - r / (z * z)).sqrt() * sigma(s, token) * (1.0 - z * z / s).sqrt()
}

/// W at the contour nodes: continued along the circle from the factored value
/// at node 0, which pins the branch consistently for every (r, s).
pub fn w_track(contour: &Contour, r: C64, s: C64, token: i8) -> Result<Vec<C64>> {
    let pts = contour.points();
    let products: Vec<C64> = pts.iter().map(|&z| (z * z - r) * (z * z - s)).collect();
    if let Some(k) = products.iter().position(|p| p.norm() == 0.0) {
        return Err(Error::BranchCutOnContour { node: k });
    }
    let seed = w_factored(pts[0], r, s, token);
    Ok(track_products(&products, contour, seed)?.values)
}

/// G, A and B at (r, s).
pub fn compute_potential(data: &HoloData, r: C64, s: C64, opts: &SoOptions) -> Result<Potential> {
    if !data.tau.is_odd_reflection() {
        return Err(Error::Unsupported(
            "the surface-orthogonal engine needs τ(z) = −z".into(),
        ));
    }
    let cycle = integration_cycle(data, r, s, opts.radius_scale)?;
    let mut g = [C64::new(0.0, 0.0); 2];
    let mut a = [C64::new(0.0, 0.0); 2];
    let mut b = [C64::new(0.0, 0.0); 2];
    let mut nodes = 0;
    for piece in &cycle {
        let q = crate::complex::integrate_adaptive::<6, _>(&piece.contour, &opts.quadrature, |ct| {
            let phi = data.phi.sample(piece.side, ct)?;
            let w = w_track(ct, r, s, opts.token)?;
            Ok(ct
                .points()
                .iter()
                .enumerate()
                .map(|(k, &z)| {
                    let base = z / w[k];
                    let ar = base / (z * z - r);
                    let bs = base / (z * z - s);
                    [
                        base * phi[k][0],
                        base * phi[k][1],
                        ar * phi[k][0],
                        ar * phi[k][1],
                        bs * phi[k][0],
                        bs * phi[k][1],
                    ]
                })
                .collect())
        })?;
        let wg = -piece.weight / (4.0 * PI * I);
        let wab = -piece.weight / (8.0 * PI * I);
        for i in 0..2 {
            g[i] += wg * q.values[i];
            a[i] += wab * q.values[2 + i];
            b[i] += wab * q.values[4 + i];
        }
        nodes = nodes.max(q.nodes);
    }
    Ok(Potential {
        g,
        a,
        b,
        token: opts.token,
        nodes,
    })
}

pub fn compute_ab(data: &HoloData, r: C64, s: C64, opts: &SoOptions) -> Result<ABPair> {
    let p = compute_potential(data, r, s, opts)?;
    Ok(ABPair {
        a: p.a,
        b: p.b,
        token: p.token,
    })
}

pub fn compute_g(data: &HoloData, r: C64, s: C64, opts: &SoOptions) -> Result<[C64; 2]> {
    Ok(compute_potential(data, r, s, opts)?.g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Holomorphic,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub point: [C64; 4],
    pub g: Mat4,
    pub kind: MetricKind,
    /// A square root of det g on the branch the construction naturally provides.
    pub sqrt_det: Option<C64>,
}

impl MetricSample {
    pub fn symmetric_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.g[i][j] - self.g[j][i]).norm());
            }
        }
        worst
    }
}

/// The quadratic form (P₂dv₁ − P₁dv₂)(Q₂dv₁ − Q₁dv₂)/D² as a symmetric 2×2 block.
pub fn h_block(p: [C64; 2], q: [C64; 2], denominator: C64) -> [[C64; 2]; 2] {
    let d2 = denominator * denominator;
    let off = -(p[1] * q[0] + p[0] * q[1]) / (2.0 * d2);
    [[p[1] * q[1] / d2, off], [off, p[0] * q[0] / d2]]
}

/// A₂B₁ − A₁B₂.
pub fn frame_determinant(a: [C64; 2], b: [C64; 2]) -> C64 {
    a[1] * b[0] - a[0] * b[1]
}

fn norm2(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// dr ds + H_{A,B} in coordinates (r, s, v₁, v₂).
pub fn metric_from_ab(a: [C64; 2], b: [C64; 2]) -> Result<(Mat4, C64)> {
    let d = frame_determinant(a, b);
    if !(d.norm() >= 1e-12 * norm2(a) * norm2(b)) {
        return Err(Error::DegenerateFrame(format!("A₂B₁ − A₁B₂ = {d}")));
    }
    let h = h_block(a, b, d);
    let z = C64::new(0.0, 0.0);
    let half = C64::new(0.5, 0.0);
    let g = [
        [z, half, z, z],
        [half, z, z, z],
        [z, z, h[0][0], h[0][1]],
        [z, z, h[1][0], h[1][1]],
    ];
    Ok((g, 1.0 / (4.0 * d)))
}

pub fn holomorphic_metric(data: &HoloData, p: &LinePoint, opts: &SoOptions) -> Result<MetricSample> {
    let pot = compute_potential(data, p.r, p.s, opts)?;
    let (g, sqrt_det) = metric_from_ab(pot.a, pot.b)?;
    Ok(MetricSample {
        point: p.coords(),
        g,
        kind: MetricKind::Holomorphic,
        sqrt_det: Some(sqrt_det),
    })
}

/// The real metric at (x, y, u₁, u₂) through the Joyce form.
pub fn real_metric(data: &HoloData, x: [f64; 4], opts: &SoOptions) -> Result<MetricSample> {
    crate::bridge::real_metric(data, x, opts)
}

/// Residual of G_rs = (G_r − G_s)/(2(r − s)), with G_rs from a fourth-order
/// difference of A in s. Relative to max(|rhs|, 1).
pub fn pde_residual(data: &HoloData, r: C64, s: C64, opts: &SoOptions) -> Result<f64> {
    let k = 1e-3 * s.norm();
    let a_at = |ds: f64| compute_potential(data, r, s + ds, opts).map(|p| p.a);
    let (p1, m1, p2, m2) = (a_at(k)?, a_at(-k)?, a_at(2.0 * k)?, a_at(-2.0 * k)?);
    let p = compute_potential(data, r, s, opts)?;
    let mut worst = 0.0f64;
    for i in 0..2 {
        let g_rs = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * k);
        let rhs = (p.a[i] - p.b[i]) / (2.0 * (r - s));
        worst = worst.max((g_rs - rhs).norm() / rhs.norm().max(1.0));
    }
    Ok(worst)
}

/// How far A and B from their own contour integrals sit from fourth-order
/// differences of G, relative to max(|A|, |B|, 1).
pub fn derivative_residual(data: &HoloData, r: C64, s: C64, opts: &SoOptions) -> Result<f64> {
    let p = compute_potential(data, r, s, opts)?;
    let diff = |dr: C64, ds: C64| -> Result<[C64; 2]> {
        let g = |t: f64| compute_g(data, r + t * dr, s + t * ds, opts);
        let (p1, m1, p2, m2) = (g(1.0)?, g(-1.0)?, g(2.0)?, g(-2.0)?);
        let h = dr + ds;
        Ok([0, 1].map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h)))
    };
    let zero = C64::new(0.0, 0.0);
    let ga = diff(C64::new(1e-3 * r.norm(), 0.0), zero)?;
    let gb = diff(zero, C64::new(1e-3 * s.norm(), 0.0))?;
    let scale = p.a.iter().chain(&p.b).map(|v| v.norm()).fold(1.0, f64::max);
    Ok((0..2)
        .map(|i| (ga[i] - p.a[i]).norm().max((gb[i] - p.b[i]).norm()))
        .fold(0.0, f64::max)
        / scale)
}

/// The holomorphic metric as an evaluator on (r, s, v₁, v₂).
#[derive(Debug, Clone)]
pub struct SoMetricField {
    pub data: HoloData,
    pub opts: SoOptions,
}

impl crate::curvature::MetricField for SoMetricField {
    fn metric(&self, x: &[C64; 4]) -> Result<Mat4> {
        Ok(holomorphic_metric(&self.data, &LinePoint::from_coords(x), &self.opts)?.g)
    }

    fn sqrt_det(&self, x: &[C64; 4]) -> Option<C64> {
        compute_potential(&self.data, x[0], x[1], &self.opts)
            .ok()
            .map(|p| 1.0 / (4.0 * frame_determinant(p.a, p.b)))
    }

    fn length_scales(&self, x: &[C64; 4]) -> [f64; 4] {
        [x[0].norm().max(1e-3), x[1].norm().max(1e-3), 1.0, 1.0]
    }
}

/// The common root test behind the null cone: for a null tangent vector
/// (r′, s′, v′) the equations r′A_i q + s′B_i/q + v′_i = 0 (i = 1, 2), with
/// q = ((p²−s)/(p²−r))^{1/2}, share a root q. Returns the smallest residual of
/// the second equation over the roots of the first.
pub fn null_root_residual(a: [C64; 2], b: [C64; 2], t: [C64; 4]) -> f64 {
    // q²·r′A₁ + q·v′₁ + s′B₁ = 0.
    let (qa, qb, qc) = (t[0] * a[0], t[2], t[1] * b[0]);
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let roots = [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)];
    let scale = (t[0] * a[1]).norm() + t[3].norm() + (t[1] * b[1]).norm();
    roots
        .iter()
        .map(|&q| (t[0] * a[1] * q + t[1] * b[1] / q + t[3]).norm() / scale)
        .fold(f64::INFINITY, f64::min)
}
