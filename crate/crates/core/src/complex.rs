//! Complex-analysis substrate: Möbius maps on the Riemann sphere, circular
//! contours with trapezoid quadrature, and square roots continued along a
//! contour so that no integrand silently crosses a cut.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Principal square root with the cut on the negative real axis.
pub fn sqrt_p(z: C64) -> C64 {
    z.sqrt()
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    Finite(C64),
    Infinity,
}

impl Ext {
    pub fn finite(self) -> Option<C64> {
        match self {
            Ext::Finite(z) => Some(z),
            Ext::Infinity => None,
        }
    }
}

impl From<C64> for Ext {
    fn from(z: C64) -> Self {
        Ext::Finite(z)
    }
}

/// z ↦ (az + b)/(cz + d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm() * d.norm() + b.norm() * c.norm();
        if !(det.norm() > 1e-14 * scale) {
            return Err(Error::Degenerate(format!("Möbius determinant {det}")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: C64::new(1.0, 0.0),
            b: C64::new(0.0, 0.0),
            c: C64::new(0.0, 0.0),
            d: C64::new(1.0, 0.0),
        }
    }

    /// The Cayley map (z − i)/(z + i), taking the upper half plane to the unit disc.
    pub fn cayley() -> Self {
        Self {
            a: C64::new(1.0, 0.0),
            b: -I,
            c: C64::new(1.0, 0.0),
            d: I,
        }
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: Ext) -> Ext {
        match z {
            Ext::Infinity => {
                if self.c == C64::new(0.0, 0.0) {
                    Ext::Infinity
                } else {
                    Ext::Finite(self.a / self.c)
                }
            }
            Ext::Finite(z) => {
                let den = self.c * z + self.d;
                if den == C64::new(0.0, 0.0) {
                    Ext::Infinity
                } else {
                    Ext::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Finite evaluation; the caller guarantees z is not the pole.
    pub fn eval(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative(&self, z: C64) -> C64 {
        let den = self.c * z + self.d;
        self.determinant() / (den * den)
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Residual of f′(ζ)f′(ξ) = ((f(ζ) − f(ξ))/(ζ − ξ))², relative to the left side.
    pub fn identity_residual(&self, zeta: C64, xi: C64) -> f64 {
        let lhs = self.derivative(zeta) * self.derivative(xi);
        let q = (self.eval(zeta) - self.eval(xi)) / (zeta - xi);
        (lhs - q * q).norm() / lhs.norm().max(f64::MIN_POSITIVE)
    }
}

/// Counter-clockwise circle sampled at `nodes` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: C64, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Geometry(format!("contour radius {radius} must be positive")));
        }
        if nodes < 8 || !nodes.is_power_of_two() {
            return Err(Error::Geometry(format!(
                "node count {nodes} must be a power of two ≥ 8"
            )));
        }
        Ok(Self { center, radius, nodes })
    }

    pub fn unit_offset(&self, k: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * k as f64 / self.nodes as f64)
    }

    pub fn node(&self, k: usize) -> C64 {
        self.center + self.radius * self.unit_offset(k)
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.nodes).map(|k| self.node(k)).collect()
    }

    /// dz at node k under the trapezoid rule.
    pub fn weight(&self, k: usize) -> C64 {
        I * self.radius * self.unit_offset(k) * (2.0 * PI / self.nodes as f64)
    }

    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        Self::new(self.center, self.radius, nodes)
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// Trapezoid approximation of ∮ f dz from samples at the contour nodes.
pub fn contour_integrate(values: &[C64], contour: &Contour) -> Result<C64> {
    if values.len() != contour.nodes {
        return Err(Error::Numerical(format!(
            "{} samples for a {}-node contour",
            values.len(),
            contour.nodes
        )));
    }
    let mut sum = C64::new(0.0, 0.0);
    for (k, v) in values.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numerical(format!("non-finite sample at node {k}")));
        }
        sum += v * contour.weight(k);
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Convergence threshold relative to the L¹ mass Σ|f||dz|.
    pub rel_tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            min_nodes: 64,
            max_nodes: 1 << 16,
            rel_tol: 1e-14,
        }
    }
}

/// Integrals of K integrands sharing one contour, with the node count used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<const K: usize> {
    pub values: [C64; K],
    pub nodes: usize,
}

/// Doubles the node count until every component agrees between N and 2N.
/// The integrand receives the whole contour so it may track branches.
pub fn integrate_adaptive<const K: usize, F>(
    template: &Contour,
    opts: &QuadratureOptions,
    mut integrand: F,
) -> Result<Quadrature<K>>
where
    F: FnMut(&Contour) -> Result<Vec<[C64; K]>>,
{
    let mut n = opts.min_nodes.max(8).next_power_of_two();
    let mut prev: Option<[C64; K]> = None;
    while n <= opts.max_nodes {
        let contour = template.with_nodes(n)?;
        let samples = integrand(&contour)?;
        if samples.len() != n {
            return Err(Error::Numerical("integrand returned wrong sample count".into()));
        }
        let mut sums = [C64::new(0.0, 0.0); K];
        let mut mass = [0.0f64; K];
        for (k, row) in samples.iter().enumerate() {
            let w = contour.weight(k);
            for j in 0..K {
                let v = row[j];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Numerical(format!("non-finite integrand at node {k}")));
                }
                sums[j] += v * w;
                mass[j] += v.norm() * w.norm();
            }
        }
        if opts.min_nodes >= opts.max_nodes {
            // A fixed rule: smooth in the parameters, which finite differences need.
            return Ok(Quadrature { values: sums, nodes: n });
        }
        if let Some(p) = prev {
            let converged = (0..K).all(|j| (sums[j] - p[j]).norm() <= opts.rel_tol * mass[j].max(1e-300));
            if converged {
                return Ok(Quadrature { values: sums, nodes: n });
            }
        }
        prev = Some(sums);
        n *= 2;
    }
    Err(Error::NoConvergence(format!(
        "contour quadrature exceeded {} nodes",
        opts.max_nodes
    )))
}

/// A square root of a product of factors, continued node by node along a contour.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTrack {
    pub contour: Contour,
    pub values: Vec<C64>,
    pub seed_phase: f64,
}

impl BranchTrack {
    /// The same track with the opposite global sign.
    pub fn flipped(&self) -> Self {
        Self {
            contour: self.contour,
            values: self.values.iter().map(|v| -v).collect(),
            seed_phase: self.seed_phase + PI,
        }
    }
}

/// Largest admissible phase step of the squared value between nodes; beyond it
/// the nearest-root rule could pick the wrong sheet.
const MAX_PRODUCT_PHASE_STEP: f64 = PI / 2.0;

/// Continues √(∏ factors) around the contour. A nonzero `seed` selects the
/// root nearest to it at node 0; a zero seed selects the principal root.
pub fn branch_sqrt_product(factors: &[&dyn Fn(C64) -> C64], contour: &Contour, seed: C64) -> Result<BranchTrack> {
    let mut products = Vec::with_capacity(contour.nodes);
    for k in 0..contour.nodes {
        let z = contour.node(k);
        let mut p = C64::new(1.0, 0.0);
        for f in factors {
            let v = f(z);
            if v.norm() == 0.0 || !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::BranchCutOnContour { node: k });
            }
            p *= v;
        }
        products.push(p);
    }
    track_products(&products, contour, seed)
}

/// Square-root track from precomputed products at the contour nodes.
pub fn track_products(products: &[C64], contour: &Contour, seed: C64) -> Result<BranchTrack> {
    let values = track_roots(products, seed)?;
    let seed_phase = values[0].arg();
    Ok(BranchTrack {
        contour: *contour,
        values,
        seed_phase,
    })
}

/// Square roots of `products` continued along the closed polygon through them.
/// A nonzero `seed` picks the root nearest to it at the first point.
pub fn track_roots(products: &[C64], seed: C64) -> Result<Vec<C64>> {
    let n = products.len();
    if n == 0 {
        return Err(Error::Numerical("empty branch track".into()));
    }
    let mut values = Vec::with_capacity(n);
    let mut first = products[0].sqrt();
    if seed.norm() > 0.0 && (first - seed).norm() > (first + seed).norm() {
        first = -first;
    }
    values.push(first);
    for k in 1..=n {
        let p = products[k % n];
        let prev_p = products[k - 1];
        let jump = (p / prev_p).arg().abs();
        if jump > MAX_PRODUCT_PHASE_STEP {
            return Err(Error::Resolution { node: k % n, jump });
        }
        let mut v = p.sqrt();
        let prev = values[k - 1];
        if (v - prev).norm() > (v + prev).norm() {
            v = -v;
        }
        if k < n {
            values.push(v);
        }
    }
    Ok(values)
}

/// Continues √f along the straight path from `from` to `to`, starting from
/// `start` (a square root of f(from)).
pub fn continue_sqrt(f: &dyn Fn(C64) -> C64, from: C64, to: C64, start: C64, steps: usize) -> Result<C64> {
    let mut cur = start;
    let mut prev_p = f(from);
    for j in 1..=steps {
        let z = from + (to - from) * (j as f64 / steps as f64);
        let p = f(z);
        if p.norm() == 0.0 || !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::Branch(format!("radicand vanishes on the path at {z}")));
        }
        if prev_p.norm() > 0.0 && (p / prev_p).arg().abs() > MAX_PRODUCT_PHASE_STEP {
            return Err(Error::Resolution {
                node: j,
                jump: (p / prev_p).arg().abs(),
            });
        }
        let mut v = p.sqrt();
        if (v - cur).norm() > (v + cur).norm() {
            v = -v;
        }
        cur = v;
        prev_p = p;
    }
    Ok(cur)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (t * p - pm) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// ∫ f along the segment a → b with composite Gauss–Legendre (panels × order).
pub fn segment_integrate(f: &dyn Fn(C64) -> C64, a: C64, b: C64, panels: usize, order: usize) -> C64 {
    let (x, w) = gauss_legendre(order);
    let mut sum = C64::new(0.0, 0.0);
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            sum += f(mid + h * (0.5 * xi)) * *wi;
        }
    }
    sum * h * 0.5
}
