//! Metrics for a general involution τ, through the rational family F_{r,s}.
//!
//! The glued sphere is uniformised by ẑ = F_{r,s}⁻¹∘F₀. For degree 2 the
//! family is explicit, F_{r,s}(z) = s(kz² + r)/(kz² + s) with
//! k = (1 − r)/(1 − 1/s), and F₀(z) = z². The line through (r, s, v) has
//! ∂f/∂r = M(ẑ⁻¹ − 1) and ∂f/∂s = N(ẑ − 1), and the conformal class is
//! dr ρ_M − ds ρ_N + ρ_M ρ_N/(M₂N₁ − M₁N₂).

use std::f64::consts::PI;

use crate::complex::{integrate_adaptive, sqrt_p, Contour, QuadratureOptions, C64, I};
use crate::curvature::{AffineChart, Mat4, MetricField};
use crate::error::{Error, Result};
use crate::holo::{HoloData, Side};
use crate::so_engine::{compute_ab, metric_from_ab, w_factored, LinePoint, MetricKind, MetricSample, SoOptions};

/// Smallest admissible |1 − r|, |1 − s|, |r − s| and |s|.
const ADMISSIBLE_GAP: f64 = 1e-9;

/// A deformation F_{r,s} of F₀ with critical values r, s (and more for d ≥ 3).
///
/// Higher degrees need the roots of an algebraic system; a caller may supply
/// its own family through this trait. Only degree 2 ships.
pub trait FamilyMap: Sync {
    fn degree(&self) -> u32;
    fn eval(&self, z: C64) -> C64;
    /// Critical values beyond r and s.
    fn extra_critical_values(&self) -> Vec<C64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalFamily {
    pub r: C64,
    pub s: C64,
    pub k: C64,
}

impl RationalFamily {
    pub fn d2(r: C64, s: C64) -> Result<Self> {
        let bad = |v: C64| !(v.norm() > ADMISSIBLE_GAP) || !v.re.is_finite() || !v.im.is_finite();
        if bad(1.0 - r) || bad(1.0 - s) || bad(r - s) || bad(s) || !s.norm().is_finite() {
            return Err(Error::Domain(format!("(r, s) = ({r}, {s}) is not admissible")));
        }
        let k = (1.0 - r) / (1.0 - 1.0 / s);
        if bad(k) {
            return Err(Error::Domain(format!("k vanishes at r = {r}")));
        }
        Ok(Self { r, s, k })
    }

    /// F at ∞, which is s.
    pub fn at_infinity(&self) -> C64 {
        self.s
    }

    /// F″(0) = 2k(s − r)/s.
    pub fn second_derivative_at_zero(&self) -> C64 {
        2.0 * self.k * (self.s - self.r) / self.s
    }

    /// d₁² from F(ẑ) ≈ r + d₁²ẑ² near 0.
    pub fn d1_squared(&self) -> C64 {
        self.second_derivative_at_zero() / 2.0
    }

    /// c₁ = 1/d₁ on the principal root.
    pub fn c1(&self) -> C64 {
        1.0 / sqrt_p(self.d1_squared())
    }
}

impl FamilyMap for RationalFamily {
    fn degree(&self) -> u32 {
        2
    }

    fn eval(&self, z: C64) -> C64 {
        let kz2 = self.k * z * z;
        self.s * (kz2 + self.r) / (kz2 + self.s)
    }
}

/// F₀(z) = z².
pub fn base_map(z: C64) -> C64 {
    z * z
}

/// ẑ and its inverse for degree 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniformisation {
    pub family: RationalFamily,
    /// |ẑ|² on the contour used by the residue route; separates the ẑ-plane
    /// branch points ±√(−r/k) from ±√(−s/k).
    pub contour_radius: f64,
    kappa_prime: C64,
    inverse_norm: C64,
}

/// √(ẑ² + c) continued from the side of |ẑ|² = rho2 away from ±√(−c).
fn shifted_root(zh: C64, c: C64, rho2: f64) -> C64 {
    if c.norm() < rho2 {
        zh * sqrt_p(1.0 + c / (zh * zh))
    } else {
        sqrt_p(c) * sqrt_p(1.0 + zh * zh / c)
    }
}

impl Uniformisation {
    pub fn new(r: C64, s: C64) -> Result<Self> {
        let family = RationalFamily::d2(r, s)?;
        let k = family.k;
        let (lo, hi) = {
            let (a, b) = ((r / k).norm(), (s / k).norm());
            (a.min(b), a.max(b))
        };
        if !(lo < 1.0 && 1.0 < hi) {
            return Err(Error::Geometry(format!(
                "ẑ = 1 must separate the branch points: |r/k| = {}, |s/k| = {}",
                (r / k).norm(),
                (s / k).norm()
            )));
        }
        let contour_radius = (lo * hi).sqrt().sqrt();
        let rho2 = contour_radius * contour_radius;
        let one = C64::new(1.0, 0.0);
        let inverse_norm = shifted_root(one, r / k, rho2) / shifted_root(one, s / k, rho2);
        let kappa_prime = sqrt_p(1.0 - r) / sqrt_p(1.0 - 1.0 / s);
        Ok(Self {
            family,
            contour_radius,
            kappa_prime,
            inverse_norm,
        })
    }

    /// True for (r, s) with |r| < |s|, where ẑ is given by principal factors on
    /// the plane cut along [−√r, √r] and the rays from ±√s to ∞.
    fn forward_supported(&self) -> bool {
        self.family.r.norm() < self.family.s.norm()
    }

    /// ẑ(z) = z√(1 − r/z²)/(κ′√(1 − z²/s)).
    pub fn forward(&self, z: C64) -> Result<C64> {
        if !self.forward_supported() {
            return Err(Error::Unsupported("ẑ is implemented for |r| < |s|".into()));
        }
        let (r, s) = (self.family.r, self.family.s);
        let near = 1.0 - r / (z * z);
        let far = 1.0 - z * z / s;
        let cut = |v: C64| v.im.abs() <= 1e-14 * v.norm().max(1.0) && v.re <= 0.0;
        if z.norm() == 0.0 || cut(near) || cut(far) {
            return Err(Error::OnCut(format!("{z}")));
        }
        Ok(z * sqrt_p(near) / (self.kappa_prime * sqrt_p(far)))
    }

    /// z(ẑ), normalised so that z(1) = 1.
    pub fn inverse(&self, zh: C64) -> C64 {
        let rho2 = self.contour_radius * self.contour_radius;
        let k = self.family.k;
        shifted_root(zh, self.family.r / k, rho2) / shifted_root(zh, self.family.s / k, rho2) / self.inverse_norm
    }
}

/// ẑ(z) for degree 2.
pub fn uniformize_d2(r: C64, s: C64, z: C64) -> Result<C64> {
    Uniformisation::new(r, s)?.forward(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MnRoute {
    /// Contour integral in the ẑ-plane.
    Residue,
    /// From the so-engine A, B at degree 2.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MNPair {
    pub m: [C64; 2],
    pub n: [C64; 2],
    pub route: MnRoute,
}

impl MNPair {
    /// M₂N₁ − M₁N₂.
    pub fn frame_determinant(&self) -> C64 {
        self.m[1] * self.n[0] - self.m[0] * self.n[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenOptions {
    pub route: MnRoute,
    pub quadrature: QuadratureOptions,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            route: MnRoute::Residue,
            quadrature: QuadratureOptions::default(),
        }
    }
}

fn check_data(data: &HoloData) -> Result<()> {
    if !data.tau.is_odd_reflection() {
        return Err(Error::Unsupported(
            "degree-2 uniformisation needs τ conjugate to z ↦ −z".into(),
        ));
    }
    if data.phi.is_two_sided() {
        return Err(Error::Unsupported("the ẑ-plane integrals take one-sided data".into()));
    }
    Ok(())
}

/// M and N at (r, s).
pub fn compute_mn(data: &HoloData, r: C64, s: C64, opts: &GenOptions) -> Result<MNPair> {
    check_data(data)?;
    match opts.route {
        MnRoute::Residue => mn_residue(data, r, s, &opts.quadrature),
        MnRoute::Closed => mn_closed(data, r, s, &opts.quadrature),
    }
}

fn mn_residue(data: &HoloData, r: C64, s: C64, quad: &QuadratureOptions) -> Result<MNPair> {
    let uni = Uniformisation::new(r, s)?;
    let fam = uni.family;
    let template = Contour::new(C64::new(0.0, 0.0), uni.contour_radius, 8)?;
    let q = integrate_adaptive::<4, _>(&template, quad, |ct| {
        let zh = ct.points();
        let z: Vec<C64> = zh.iter().map(|&w| uni.inverse(w)).collect();
        if let Some(k) = z.iter().position(|p| p.norm() > data.domain_radius) {
            return Err(Error::OutOfDomain(format!("{} on the image of the ẑ-contour", z[k])));
        }
        let phi = data.phi.sample_closed(Side::Zero, &z)?;
        Ok(zh
            .iter()
            .zip(&phi)
            .map(|(&w, p)| {
                let inv2 = 1.0 / (w * w);
                [p[0] * inv2, p[1] * inv2, p[0], p[1]]
            })
            .collect())
    })?;
    let wm = -1.0 / (4.0 * PI * I * fam.second_derivative_at_zero());
    let wn = -fam.k / (8.0 * PI * I * fam.s * (fam.s - fam.r));
    Ok(MNPair {
        m: [wm * q.values[0], wm * q.values[1]],
        n: [wn * q.values[2], wn * q.values[3]],
        route: MnRoute::Residue,
    })
}

fn mn_closed(data: &HoloData, r: C64, s: C64, quad: &QuadratureOptions) -> Result<MNPair> {
    let so = SoOptions {
        quadrature: *quad,
        ..SoOptions::default()
    };
    let ab = compute_ab(data, r, s, &so)?;
    let w1 = w_factored(C64::new(1.0, 0.0), r, s, so.token);
    let (fm, fn_) = (w1 / (1.0 - r), w1 / (1.0 - s));
    Ok(MNPair {
        m: [ab.a[0] * fm, ab.a[1] * fm],
        n: [ab.b[0] * fn_, ab.b[1] * fn_],
        route: MnRoute::Closed,
    })
}

/// How far M(r, s) is from ±N(s, r), relative to |M|; the smaller of the two signs.
pub fn swap_symmetry_residual(data: &HoloData, r: C64, s: C64, opts: &GenOptions) -> Result<f64> {
    let fwd = compute_mn(data, r, s, opts)?;
    let back = compute_mn(data, s, r, opts)?;
    let size = (fwd.m[0].norm_sqr() + fwd.m[1].norm_sqr()).sqrt();
    let dev = |sign: f64| {
        let d0 = fwd.m[0] - sign * back.n[0];
        let d1 = fwd.m[1] - sign * back.n[1];
        (d0.norm_sqr() + d1.norm_sqr()).sqrt() / size
    };
    Ok(dev(1.0).min(dev(-1.0)))
}

/// dr ρ_M − ds ρ_N + ρ_Mρ_N/K in coordinates (r, s, v₁, v₂), with K = M₂N₁ − M₁N₂.
/// The second value is the square root K/4 of det g.
pub fn metric_from_mn(m: [C64; 2], n: [C64; 2]) -> Result<(Mat4, C64)> {
    let k = m[1] * n[0] - m[0] * n[1];
    let size = (m[0].norm_sqr() + m[1].norm_sqr()).sqrt() * (n[0].norm_sqr() + n[1].norm_sqr()).sqrt();
    if !(k.norm() >= 1e-12 * size) {
        return Err(Error::DegenerateFrame(format!("M₂N₁ − M₁N₂ = {k}")));
    }
    let z = C64::new(0.0, 0.0);
    let mut g = [[z; 4]; 4];
    let mut put = |i: usize, j: usize, v: C64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    put(0, 2, m[1] / 2.0);
    put(0, 3, -m[0] / 2.0);
    put(1, 2, -n[1] / 2.0);
    put(1, 3, n[0] / 2.0);
    put(2, 2, m[1] * n[1] / k);
    put(3, 3, m[0] * n[0] / k);
    put(2, 3, -(m[1] * n[0] + m[0] * n[1]) / (2.0 * k));
    Ok((g, k / 4.0))
}

pub fn general_metric(data: &HoloData, p: &LinePoint, opts: &GenOptions) -> Result<MetricSample> {
    let mn = compute_mn(data, p.r, p.s, opts)?;
    let (g, sqrt_det) = metric_from_mn(mn.m, mn.n)?;
    Ok(MetricSample {
        point: p.coords(),
        g,
        kind: MetricKind::Holomorphic,
        sqrt_det: Some(sqrt_det),
    })
}

/// Jᵀ g J.
fn pullback(g: &Mat4, j: &Mat4) -> Mat4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                for k in 0..4 {
                    acc += j[i][a] * g[i][k] * j[k][b];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crosscheck {
    /// g_gen/g_so on the largest component.
    pub ratio: C64,
    /// max |g_gen − ratio·g_so| over max |g_gen|.
    pub deviation: f64,
}

/// Compares the general metric with the so-engine metric at degree 2.
///
/// The two line families differ by v_so = v − h(1; r, s), so the so-engine
/// metric is pulled back along dv_so = dv − M dr − N ds before the ratio is taken.
pub fn crosscheck_d2(data: &HoloData, r: C64, s: C64, opts: &GenOptions) -> Result<Crosscheck> {
    let mn = compute_mn(data, r, s, opts)?;
    let (g_gen, _) = metric_from_mn(mn.m, mn.n)?;
    let so = SoOptions {
        quadrature: opts.quadrature,
        ..SoOptions::default()
    };
    let ab = compute_ab(data, r, s, &so)?;
    let (g_so, _) = metric_from_ab(ab.a, ab.b)?;
    let one = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    let jac = [
        [one, z, z, z],
        [z, one, z, z],
        [-mn.m[0], -mn.n[0], one, z],
        [-mn.m[1], -mn.n[1], z, one],
    ];
    let pulled = pullback(&g_so, &jac);
    let (mut bi, mut bj, mut big) = (0, 0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            if g_gen[i][j].norm() > big {
                big = g_gen[i][j].norm();
                (bi, bj) = (i, j);
            }
        }
    }
    let ratio = g_gen[bi][bj] / pulled[bi][bj];
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((g_gen[i][j] - ratio * pulled[i][j]).norm());
        }
    }
    Ok(Crosscheck {
        ratio,
        deviation: worst / big,
    })
}

/// Common-root test for the null quadratics r′M_i(1 − ẑ) + s′N_i(ẑ² − ẑ) + v′_iẑ = 0.
pub fn null_root_residual(m: [C64; 2], n: [C64; 2], t: [C64; 4]) -> f64 {
    let quad = |i: usize| {
        let a2 = t[1] * n[i];
        let a1 = -t[0] * m[i] - t[1] * n[i] + t[2 + i];
        let a0 = t[0] * m[i];
        (a2, a1, a0)
    };
    let (a2, a1, a0) = quad(0);
    let disc = (a1 * a1 - 4.0 * a2 * a0).sqrt();
    let roots = [(-a1 + disc) / (2.0 * a2), (-a1 - disc) / (2.0 * a2)];
    let (b2, b1, b0) = quad(1);
    roots
        .iter()
        .map(|&q| {
            let terms = [b2 * q * q, b1 * q, b0];
            let scale: f64 = terms.iter().map(|v| v.norm()).sum();
            (terms[0] + terms[1] + terms[2]).norm() / scale
        })
        .fold(f64::INFINITY, f64::min)
}

/// The general conformal class as an evaluator on (r, s, v₁, v₂).
///
/// It returns the representative g/K, with K = M₂N₁ − M₁N₂. The raw formula
/// carries the factor K, whose variation swamps the Weyl tensor in finite
/// differences; dividing it out leaves the class unchanged.
#[derive(Debug, Clone)]
pub struct GenMetricField {
    pub data: HoloData,
    pub opts: GenOptions,
}

impl GenMetricField {
    /// The chart v′ = v − M₀(r − r₀) − N₀(s − s₀), in which the class is block
    /// diagonal at the base point. Curvature is evaluated there.
    pub fn adapted_at(&self, base: [C64; 4]) -> Result<AffineChart<GenMetricField>> {
        let mn = compute_mn(&self.data, base[0], base[1], &self.opts)?;
        let (one, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let map = [
            [one, z, z, z],
            [z, one, z, z],
            [mn.m[0], mn.n[0], one, z],
            [mn.m[1], mn.n[1], z, one],
        ];
        Ok(AffineChart {
            field: self.clone(),
            base,
            map,
        })
    }
}

impl MetricField for GenMetricField {
    fn metric(&self, x: &[C64; 4]) -> Result<Mat4> {
        let mn = compute_mn(&self.data, x[0], x[1], &self.opts)?;
        let (g, _) = metric_from_mn(mn.m, mn.n)?;
        let k = mn.frame_determinant();
        Ok(g.map(|row| row.map(|v| v / k)))
    }

    fn sqrt_det(&self, x: &[C64; 4]) -> Option<C64> {
        let mn = compute_mn(&self.data, x[0], x[1], &self.opts).ok()?;
        Some(1.0 / (4.0 * mn.frame_determinant()))
    }

    fn length_scales(&self, x: &[C64; 4]) -> [f64; 4] {
        [x[0].norm().max(1e-3), x[1].norm().max(1e-3), 1.0, 1.0]
    }
}
