//! The jump problem f(z) → f(−z) + φ(z) as a Čech coboundary problem on the
//! elliptic curve w² = (z² − a²)(z² − b²).
//!
//! A point of the curve is (z, sheet) with w = sheet·W(z), where W is the
//! branch of the square root on the sphere slit along [−a, a] and along the
//! two rays from ±b through ∞. U is the + sheet together with discs D₀ and
//! D_∞ about the cuts, V = ρ(U) the − sheet with the same discs; the overlap
//! is the preimage of D₀ ∪ D_∞.
//!
//! With J₀, J_∞ the Cauchy-type integrals ∮ φ dζ/(W(ζ)(ζ − z)) over the
//! boundary circles of D₀ and D_∞, the solution is
//! f_U(z, ε) = ε·W(z)(J_∞ − J₀)(z)/(4πi) + ψ(z) + c, where ψ is φ/2 on D₀,
//! the far germ over 2 on D_∞ (zero for one-sided data) and 0 in between.
//! Boundedness at ∞ is exactly the vanishing of the period ∮ φ dz/W.

use std::f64::consts::PI;

use crate::complex::{integrate_adaptive, Contour, QuadratureOptions, C64, I};
use crate::error::{Error, Result};
use crate::holo::{HoloData, Side};
use crate::so_engine::{w_factored, w_track};

const ZERO2: [C64; 2] = [C64::new(0.0, 0.0); 2];

/// A point of the curve: z with the sign of w relative to W(z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub z: C64,
    pub sheet: i8,
}

impl CurvePoint {
    pub fn new(z: C64, sheet: i8) -> Self {
        Self {
            z,
            sheet: if sheet < 0 { -1 } else { 1 },
        }
    }
}

/// Which piece of the cover a value of z falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Inside the circle around [−a, a].
    Inner,
    Between,
    /// Outside the circle around the far cut.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticCover {
    pub a: C64,
    pub b: C64,
    /// Radius of the circle bounding D₀.
    pub inner_radius: f64,
    /// Radius of the circle bounding D_∞.
    pub outer_radius: f64,
    pub token: i8,
}

impl EllipticCover {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let (na, nb) = (a.norm(), b.norm());
        if (a - b).norm() < 1e-12 * nb || (a + b).norm() < 1e-12 * nb {
            return Err(Error::Geometry("a = ±b".into()));
        }
        if !(na > 0.0 && na < nb) {
            return Err(Error::Geometry(format!("need 0 < |a| = {na} < |b| = {nb}")));
        }
        Ok(Self {
            a,
            b,
            inner_radius: (na.powi(3) * nb).powf(0.25),
            outer_radius: (na * nb.powi(3)).powf(0.25),
            token: 1,
        })
    }

    /// The cover for the line (r, s): a = √r, b = √s.
    pub fn from_line(r: C64, s: C64) -> Result<Self> {
        Self::new(r.sqrt(), s.sqrt())
    }

    /// Moves both circles by a common factor towards or away from the cuts.
    pub fn with_radius_scale(mut self, scale: f64) -> Result<Self> {
        let mid = (self.a.norm() * self.b.norm()).sqrt();
        self.inner_radius = mid * (self.inner_radius / mid).powf(scale);
        self.outer_radius = mid * (self.outer_radius / mid).powf(scale);
        if !(self.inner_radius > self.a.norm() && self.outer_radius < self.b.norm()) {
            return Err(Error::Geometry("scaled circles cross a cut".into()));
        }
        Ok(self)
    }

    fn r(&self) -> C64 {
        self.a * self.a
    }

    fn s(&self) -> C64 {
        self.b * self.b
    }

    /// W(z) on the slit sphere.
    pub fn big_w(&self, z: C64) -> C64 {
        w_factored(z, self.r(), self.s(), self.token)
    }

    pub fn w(&self, p: CurvePoint) -> C64 {
        p.sheet as f64 * self.big_w(p.z)
    }

    /// |w² − (z² − a²)(z² − b²)| relative to the right side.
    pub fn curve_residual(&self, p: CurvePoint) -> f64 {
        let rhs = (p.z * p.z - self.r()) * (p.z * p.z - self.s());
        (self.w(p).powi(2) - rhs).norm() / rhs.norm()
    }

    /// The sheet exchange (z, w) ↦ (z, −w).
    pub fn rho(&self, p: CurvePoint) -> CurvePoint {
        CurvePoint::new(p.z, -p.sheet)
    }

    /// The lift of z ↦ −z that keeps the sheet label, (z, w) ↦ (−z, −w).
    pub fn tau(&self, p: CurvePoint) -> CurvePoint {
        CurvePoint::new(-p.z, p.sheet)
    }

    pub fn on_cut(&self, z: C64) -> bool {
        if z.norm() == 0.0 {
            return true;
        }
        let cut = |t: C64| t.im.abs() <= 1e-12 * t.norm() && t.re >= 1.0 - 1e-12;
        cut(self.r() / (z * z)) || cut(z * z / self.s())
    }

    pub fn region(&self, z: C64) -> Region {
        let m = z.norm();
        if m < self.inner_radius {
            Region::Inner
        } else if m < self.outer_radius {
            Region::Between
        } else {
            Region::Outer
        }
    }

    /// Smallest admissible distance between an evaluation point and a circle.
    pub fn clearance(&self) -> f64 {
        0.2 * self.a.norm()
    }

    /// n points on each overlap component, on the mid-radius circle of the
    /// annulus between the cut and its circle, alternating sheets.
    pub fn overlap_samples(&self, n: usize) -> Vec<CurvePoint> {
        let inner = 0.5 * (self.a.norm() + self.inner_radius);
        let outer = 0.5 * (self.outer_radius + self.b.norm());
        let mut out = Vec::with_capacity(2 * n);
        for radius in [inner, outer] {
            for k in 0..n {
                let t = 2.0 * PI * (k as f64 + 0.31) / n as f64;
                out.push(CurvePoint::new(
                    C64::from_polar(radius, t),
                    if k % 2 == 0 { 1 } else { -1 },
                ));
            }
        }
        out
    }

    fn circle(&self, radius: f64) -> Result<Contour> {
        Contour::new(C64::new(0.0, 0.0), radius, 64)
    }
}

fn far_germ(data: &HoloData) -> bool {
    data.phi.is_two_sided()
}

/// ∮ φ̂ dz/W around D₀ minus the same around D_∞; the obstruction to a
/// bounded solution.
pub fn period_check(data: &HoloData, cover: &EllipticCover) -> Result<[C64; 2]> {
    period_with(data, cover, &QuadratureOptions::default())
}

fn period_with(data: &HoloData, cover: &EllipticCover, quad: &QuadratureOptions) -> Result<[C64; 2]> {
    let mut out = ZERO2;
    for (side, radius, sign) in [
        (Side::Zero, cover.inner_radius, 1.0),
        (Side::Infinity, cover.outer_radius, -1.0),
    ] {
        if side == Side::Infinity && !far_germ(data) {
            continue;
        }
        let q = integrate_adaptive::<2, _>(&cover.circle(radius)?, quad, |ct| {
            let phi = data.phi.sample(side, ct)?;
            let w = w_track(ct, cover.r(), cover.s(), cover.token)?;
            Ok(phi.iter().zip(&w).map(|(p, &w)| [p[0] / w, p[1] / w]).collect())
        })?;
        for i in 0..2 {
            out[i] += sign * q.values[i];
        }
    }
    Ok(out)
}

/// Tolerance on the period below which the problem is solvable.
pub const PERIOD_TOL: f64 = 1e-10;

/// The 0-cochain (f_U, f_V) with f_U − f_V = φ̂ and f_U(1, +) = 0.
#[derive(Debug, Clone)]
pub struct CochainSolution {
    pub cover: EllipticCover,
    pub data: HoloData,
    pub constant: [C64; 2],
    pub quadrature: QuadratureOptions,
}

pub fn solve_cochain(data: &HoloData, cover: &EllipticCover) -> Result<CochainSolution> {
    let quadrature = QuadratureOptions::default();
    let period = period_with(data, cover, &quadrature)?;
    let size = period.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if size > PERIOD_TOL {
        return Err(Error::Degenerate(format!(
            "period {size} does not vanish; φ is not odd"
        )));
    }
    let mut sol = CochainSolution {
        cover: *cover,
        data: data.clone(),
        constant: ZERO2,
        quadrature,
    };
    let base = sol.f_u(CurvePoint::new(C64::new(1.0, 0.0), 1))?;
    sol.constant = [-base[0], -base[1]];
    Ok(sol)
}

impl CochainSolution {
    fn cauchy(&self, side: Side, radius: f64, z: C64) -> Result<[C64; 2]> {
        if side == Side::Infinity && !far_germ(&self.data) {
            return Ok(ZERO2);
        }
        let cv = &self.cover;
        let q = integrate_adaptive::<2, _>(&cv.circle(radius)?, &self.quadrature, |ct| {
            let phi = self.data.phi.sample(side, ct)?;
            let w = w_track(ct, cv.r(), cv.s(), cv.token)?;
            Ok(ct
                .points()
                .iter()
                .enumerate()
                .map(|(k, &zeta)| {
                    let den = w[k] * (zeta - z);
                    [phi[k][0] / den, phi[k][1] / den]
                })
                .collect())
        })?;
        Ok(q.values)
    }

    /// W(z)(J_∞ − J₀)(z)/(4πi) and ψ(z).
    fn parts(&self, z: C64) -> Result<([C64; 2], [C64; 2])> {
        let cv = &self.cover;
        if cv.on_cut(z) {
            return Err(Error::OnCut(format!("z = {z}")));
        }
        let gap = (z.norm() - cv.inner_radius)
            .abs()
            .min((z.norm() - cv.outer_radius).abs());
        if gap < cv.clearance() {
            return Err(Error::Geometry(format!("z = {z} is within {gap} of a contour")));
        }
        let j0 = self.cauchy(Side::Zero, cv.inner_radius, z)?;
        let jf = self.cauchy(Side::Infinity, cv.outer_radius, z)?;
        let factor = cv.big_w(z) / (4.0 * PI * I);
        let main = [0, 1].map(|i| factor * (jf[i] - j0[i]));
        let psi = match cv.region(z) {
            Region::Inner => self.data.phi.eval_side(Side::Zero, z)?.map(|v| 0.5 * v),
            Region::Outer if far_germ(&self.data) => self.data.phi.eval_side(Side::Infinity, z)?.map(|v| 0.5 * v),
            _ => ZERO2,
        };
        Ok((main, psi))
    }

    fn check_member(&self, p: CurvePoint, home: i8) -> Result<()> {
        if p.sheet != home && self.cover.region(p.z) == Region::Between {
            return Err(Error::OutOfDomain(format!(
                "({}, {}) lies outside the chart",
                p.z, p.sheet
            )));
        }
        Ok(())
    }

    pub fn f_u(&self, p: CurvePoint) -> Result<[C64; 2]> {
        self.check_member(p, 1)?;
        let (main, psi) = self.parts(p.z)?;
        let e = p.sheet as f64;
        Ok([0, 1].map(|i| e * main[i] + psi[i] + self.constant[i]))
    }

    pub fn f_v(&self, p: CurvePoint) -> Result<[C64; 2]> {
        self.check_member(p, -1)?;
        let (main, psi) = self.parts(p.z)?;
        let e = p.sheet as f64;
        Ok([0, 1].map(|i| e * main[i] - psi[i] + self.constant[i]))
    }

    /// The cochain on the overlap: φ near the inner cut, the far germ (or 0) near the outer.
    pub fn phi_hat(&self, p: CurvePoint) -> Result<[C64; 2]> {
        match self.cover.region(p.z) {
            Region::Inner => self.data.phi.eval_side(Side::Zero, p.z),
            Region::Outer if far_germ(&self.data) => self.data.phi.eval_side(Side::Infinity, p.z),
            Region::Outer => Ok(ZERO2),
            Region::Between => Err(Error::OutOfDomain(format!("{} is not in the overlap", p.z))),
        }
    }

    pub fn coboundary_residual(&self, p: CurvePoint) -> Result<f64> {
        let (u, v, phi) = (self.f_u(p)?, self.f_v(p)?, self.phi_hat(p)?);
        Ok((0..2).map(|i| (u[i] - v[i] - phi[i]).norm()).fold(0.0, f64::max))
    }

    /// |f_V(p) − f_U(τρ(p))|.
    pub fn symmetry_residual(&self, p: CurvePoint) -> Result<f64> {
        let cv = &self.cover;
        let (v, u) = (self.f_v(p)?, self.f_u(cv.tau(cv.rho(p)))?);
        Ok((0..2).map(|i| (v[i] - u[i]).norm()).fold(0.0, f64::max))
    }

    /// f_U(p) + f_V(ρ(p)), constant over the curve.
    pub fn rho_sum(&self, p: CurvePoint) -> Result<[C64; 2]> {
        let (u, v) = (self.f_u(p)?, self.f_v(self.cover.rho(p))?);
        Ok([u[0] + v[0], u[1] + v[1]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;
    use crate::dsl::parse;
    use crate::holo::{PhiSpec, TauSpec};

    fn data(a: &str, b: &str) -> HoloData {
        HoloData {
            tau: TauSpec::linear(),
            phi: PhiSpec::exprs([parse(a).unwrap(), parse(b).unwrap()]),
            domain_radius: 100.0,
            reality: false,
        }
    }

    fn cover() -> EllipticCover {
        EllipticCover::new(c(0.3, 0.0), c(3.0, 0.0)).unwrap()
    }

    #[test]
    fn involutions_and_curve() {
        let cv = EllipticCover::new(c(0.3, 0.1), c(2.0, -1.0)).unwrap();
        for p in cv.overlap_samples(8) {
            assert!(cv.curve_residual(p) < 1e-14);
            assert_eq!(cv.rho(cv.tau(p)), cv.tau(cv.rho(p)));
            assert_eq!(cv.rho(cv.rho(p)), p);
            // τ lifts z ↦ −z and the lift keeps w up to the sheet exchange.
            assert!((cv.w(cv.tau(p)) + cv.w(p)).norm() < 1e-14 * cv.w(p).norm());
        }
        assert!(cv.on_cut(0.5 * cv.a) && cv.on_cut(2.0 * cv.b) && !cv.on_cut(c(0.1, -0.1)));
        assert!(EllipticCover::new(c(1.0, 0.0), c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn periods() {
        let p = period_check(&data("z", "i*z"), &cover()).unwrap();
        assert!(p[0].norm() < 1e-10 && p[1].norm() < 1e-10);
        let zero = period_check(&data("0", "0"), &cover()).unwrap();
        assert_eq!(zero, ZERO2);
        let even = period_check(&data("z^2", "0"), &cover()).unwrap();
        assert!(even[0].norm() > 1e-3);
        assert!(matches!(
            solve_cochain(&data("z^2", "0"), &cover()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn coboundary_symmetry_and_rho_sum() {
        let sol = solve_cochain(&data("z", "i*z"), &cover()).unwrap();
        let samples = sol.cover.overlap_samples(32);
        let c0 = sol.rho_sum(samples[0]).unwrap();
        for p in samples {
            assert!(sol.coboundary_residual(p).unwrap() < 1e-9);
            assert!(sol.symmetry_residual(p).unwrap() < 1e-9);
            let s = sol.rho_sum(p).unwrap();
            assert!((s[0] - c0[0]).norm() < 1e-9 && (s[1] - c0[1]).norm() < 1e-9);
        }
        let one = sol.f_u(CurvePoint::new(c(1.0, 0.0), 1)).unwrap();
        assert!(one[0].norm() < 1e-15);
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let sol = solve_cochain(&data("0", "0"), &cover()).unwrap();
        let v = sol.f_u(CurvePoint::new(c(0.4, 0.2), -1)).unwrap();
        assert_eq!(v, ZERO2);
    }

    #[test]
    fn unique_up_to_constants() {
        let d = data("z + 0.3*z^3", "i*z - z^5");
        let a = solve_cochain(&d, &cover()).unwrap();
        let b = solve_cochain(&d, &cover().with_radius_scale(0.8).unwrap()).unwrap();
        for p in [
            CurvePoint::new(c(0.9, 0.4), 1),
            CurvePoint::new(c(0.05, 0.45), -1),
            CurvePoint::new(c(-2.4, 1.0), 1),
        ] {
            let (u, v) = (a.f_u(p).unwrap(), b.f_u(p).unwrap());
            assert!(
                (u[0] - v[0]).norm() < 1e-9 && (u[1] - v[1]).norm() < 1e-9,
                "{u:?} {v:?}"
            );
        }
    }

    #[test]
    fn jump_condition_across_the_inner_cut() {
        // Upper-sheet values above [−a, a] and lower-sheet values below it glue
        // to one analytic function: Cauchy's formula on a small disc straddling
        // the cut reproduces the upper value.
        let d = data("z + 0.3*z^3", "i*z");
        let sol = solve_cochain(&d, &cover()).unwrap();
        let centre = c(0.1, 0.001);
        let ct = Contour::new(centre, 0.08, 256).unwrap();
        let glued = |z: C64| {
            let sheet = if z.im >= 0.0 { 1 } else { -1 };
            sol.f_u(CurvePoint::new(z, sheet)).unwrap()
        };
        let target = c(0.12, 0.02);
        let mut acc = ZERO2;
        for k in 0..ct.nodes {
            let z = ct.node(k);
            let v = glued(z);
            for i in 0..2 {
                acc[i] += v[i] / (z - target) * ct.weight(k) / (2.0 * PI * I);
            }
        }
        let want = glued(target);
        assert!((acc[0] - want[0]).norm() < 1e-9 && (acc[1] - want[1]).norm() < 1e-9);
        // Crossing the cut, f(z) becomes f(−z) + φ(z).
        for z in [c(0.12, -0.01), c(-0.2, 0.02)] {
            let across = sol.f_u(CurvePoint::new(z, -1)).unwrap();
            let other = sol.f_u(CurvePoint::new(-z, 1)).unwrap();
            let phi = d.phi.eval(z).unwrap();
            for i in 0..2 {
                assert!((across[i] - other[i] - phi[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn two_sided_data() {
        let d = HoloData {
            tau: TauSpec::linear(),
            phi: PhiSpec::real_from([parse("z + 0.2*z^3").unwrap(), parse("i*z").unwrap()]),
            domain_radius: 0.9,
            reality: true,
        };
        let cv = EllipticCover::from_line(c(0.05, 0.02), 1.0 / c(0.05, -0.02)).unwrap();
        let sol = solve_cochain(&d, &cv).unwrap();
        for p in cv.overlap_samples(32) {
            assert!(sol.coboundary_residual(p).unwrap() < 1e-9);
        }
    }

    #[test]
    fn domain_errors() {
        let sol = solve_cochain(&data("z", "i*z"), &cover()).unwrap();
        assert!(matches!(sol.f_u(CurvePoint::new(c(0.1, 0.0), 1)), Err(Error::OnCut(_))));
        assert!(matches!(
            sol.f_u(CurvePoint::new(c(1.0, 0.0), -1)),
            Err(Error::OutOfDomain(_))
        ));
        let near = c(sol.cover.inner_radius + 0.01, 0.0);
        assert!(matches!(sol.f_u(CurvePoint::new(near, 1)), Err(Error::Geometry(_))));
    }
}
