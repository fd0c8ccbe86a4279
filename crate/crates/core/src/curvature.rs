//! Finite-difference tensor calculus on a 4-dimensional chart.
//!
//! Metrics are complex symmetric matrices; real Riemannian metrics are the
//! special case with vanishing imaginary parts. Derivatives are taken along
//! the real coordinate directions, which for a holomorphic metric are its
//! complex derivatives. Weyl curvature is split into the ±1 eigenspaces of the
//! Hodge star of g and the coordinate orientation dx¹∧dx²∧dx³∧dx⁴.

use serde::Serialize;

use crate::complex::C64;
use crate::error::{Error, Result};

pub type Mat4 = [[C64; 4]; 4];
type Tensor3 = [[[C64; 4]; 4]; 4];
type Tensor4 = [[[[C64; 4]; 4]; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);

/// A metric given as an evaluator on chart coordinates.
pub trait MetricField: Sync {
    fn metric(&self, x: &[C64; 4]) -> Result<Mat4>;

    /// The square root of det g selected by the construction, when it has one;
    /// it fixes which Weyl half is called self-dual.
    fn sqrt_det(&self, _x: &[C64; 4]) -> Option<C64> {
        None
    }

    /// Typical coordinate scales; finite-difference steps are proportional.
    fn length_scales(&self, _x: &[C64; 4]) -> [f64; 4] {
        [1.0; 4]
    }
}

/// A field seen through the affine chart x_old = base + L(x − base).
///
/// Finite-difference curvature loses digits in charts where the metric mixes
/// coordinates of very different sizes; a chart in which g is block diagonal
/// at the base point avoids that without changing any tensorial quantity.
pub struct AffineChart<F> {
    pub field: F,
    pub base: [C64; 4],
    /// L[i][j] = ∂x_old^i/∂x^j.
    pub map: Mat4,
}

impl<F: MetricField> AffineChart<F> {
    fn to_old(&self, x: &[C64; 4]) -> [C64; 4] {
        let mut out = self.base;
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.map[i][j] * (x[j] - self.base[j]);
            }
        }
        out
    }
}

impl<F: MetricField> MetricField for AffineChart<F> {
    fn metric(&self, x: &[C64; 4]) -> Result<Mat4> {
        let g = self.field.metric(&self.to_old(x))?;
        let l = &self.map;
        let mut out = [[ZERO; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = ZERO;
                for i in 0..4 {
                    for j in 0..4 {
                        acc += l[i][a] * g[i][j] * l[j][b];
                    }
                }
                out[a][b] = acc;
            }
        }
        Ok(out)
    }

    fn sqrt_det(&self, x: &[C64; 4]) -> Option<C64> {
        Some(self.field.sqrt_det(&self.to_old(x))? * det4(&self.map))
    }

    fn length_scales(&self, x: &[C64; 4]) -> [f64; 4] {
        self.field.length_scales(&self.to_old(x))
    }
}

/// A metric given by a closure.
pub struct FnMetric<F>(pub F);

impl<F> MetricField for FnMetric<F>
where
    F: Fn(&[C64; 4]) -> Result<Mat4> + Sync,
{
    fn metric(&self, x: &[C64; 4]) -> Result<Mat4> {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Step as a fraction of the coordinate's length scale.
    pub rel_step: f64,
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            rel_step: 1e-3,
            richardson: true,
        }
    }
}

pub fn det4(m: &Mat4) -> C64 {
    let mut a = *m;
    let mut det = C64::new(1.0, 0.0);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() == 0.0 {
            return ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
        }
    }
    det
}

pub fn inverse4(m: &Mat4) -> Result<Mat4> {
    let mut a = *m;
    let mut inv = [[ZERO; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() == 0.0 {
            return Err(Error::NearSingularMetric(f64::INFINITY));
        }
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col];
        for k in 0..4 {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..4 {
            if row != col {
                let f = a[row][col];
                for k in 0..4 {
                    let (av, iv) = (a[col][k], inv[col][k]);
                    a[row][k] -= f * av;
                    inv[row][k] -= f * iv;
                }
            }
        }
    }
    Ok(inv)
}

fn frobenius(m: &Mat4) -> f64 {
    m.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Metric with first and second coordinate derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub g: Mat4,
    /// dg[c][a][b] = ∂_c g_ab.
    pub dg: [Mat4; 4],
    /// ddg[c][d][a][b] = ∂_c ∂_d g_ab.
    pub ddg: [[Mat4; 4]; 4],
}

fn axpy(acc: &mut Mat4, w: f64, m: &Mat4) {
    for i in 0..4 {
        for j in 0..4 {
            acc[i][j] += w * m[i][j];
        }
    }
}

fn scaled(m: &Mat4, w: C64) -> Mat4 {
    let mut out = *m;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= w;
        }
    }
    out
}

fn shifted(x: &[C64; 4], moves: &[(usize, f64)]) -> [C64; 4] {
    let mut y = *x;
    for &(k, d) in moves {
        y[k] += d;
    }
    y
}

fn jet_at_step(field: &dyn MetricField, x: &[C64; 4], h: [f64; 4]) -> Result<Jet> {
    let g = field.metric(x)?;
    let mut dg = [[[ZERO; 4]; 4]; 4];
    let mut ddg = [[[[ZERO; 4]; 4]; 4]; 4];
    // Four-point first derivatives and five-point pure second derivatives.
    let mut side = [[[[ZERO; 4]; 4]; 4]; 4];
    for k in 0..4 {
        for (j, m) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
            side[k][j] = field.metric(&shifted(x, &[(k, m * h[k])]))?;
        }
        let mut d = [[ZERO; 4]; 4];
        axpy(&mut d, 1.0, &side[k][0]);
        axpy(&mut d, -8.0, &side[k][1]);
        axpy(&mut d, 8.0, &side[k][2]);
        axpy(&mut d, -1.0, &side[k][3]);
        dg[k] = scaled(&d, C64::new(1.0 / (12.0 * h[k]), 0.0));
        let mut dd = [[ZERO; 4]; 4];
        axpy(&mut dd, -1.0, &side[k][0]);
        axpy(&mut dd, 16.0, &side[k][1]);
        axpy(&mut dd, -30.0, &g);
        axpy(&mut dd, 16.0, &side[k][2]);
        axpy(&mut dd, -1.0, &side[k][3]);
        ddg[k][k] = scaled(&dd, C64::new(1.0 / (12.0 * h[k] * h[k]), 0.0));
    }
    let weights = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    for k in 0..4 {
        for l in k + 1..4 {
            let mut acc = [[ZERO; 4]; 4];
            for &(mk, wk) in &weights {
                for &(ml, wl) in &weights {
                    let m = field.metric(&shifted(x, &[(k, mk * h[k]), (l, ml * h[l])]))?;
                    axpy(&mut acc, wk * wl, &m);
                }
            }
            let v = scaled(&acc, C64::new(1.0 / (144.0 * h[k] * h[l]), 0.0));
            ddg[k][l] = v;
            ddg[l][k] = v;
        }
    }
    Ok(Jet { g, dg, ddg })
}

/// Metric jet by fourth-order central differences, optionally Richardson-extrapolated.
pub fn metric_jet(field: &dyn MetricField, x: &[C64; 4], opts: &FdOptions) -> Result<Jet> {
    let scales = field.length_scales(x);
    let h = scales.map(|s| s * opts.rel_step);
    let coarse = jet_at_step(field, x, h)?;
    if !opts.richardson {
        return Ok(coarse);
    }
    let fine = jet_at_step(field, x, h.map(|v| v * 0.5))?;
    let mut out = fine;
    let extrap = |f: &Mat4, c: &Mat4| {
        let mut m = [[ZERO; 4]; 4];
        axpy(&mut m, 16.0 / 15.0, f);
        axpy(&mut m, -1.0 / 15.0, c);
        m
    };
    for k in 0..4 {
        out.dg[k] = extrap(&fine.dg[k], &coarse.dg[k]);
        for l in 0..4 {
            out.ddg[k][l] = extrap(&fine.ddg[k][l], &coarse.ddg[k][l]);
        }
    }
    Ok(out)
}

/// Condition number after symmetric row equilibration, so a mere rescaling of
/// coordinates does not count as near singular.
fn check_conditioning(g: &Mat4) -> Result<Mat4> {
    let inv = inverse4(g)?;
    let mut d = [0.0f64; 4];
    for i in 0..4 {
        let row = g[i].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(row > 0.0) {
            return Err(Error::NearSingularMetric(f64::INFINITY));
        }
        d[i] = row.sqrt();
    }
    let mut eq = *g;
    let mut eq_inv = inv;
    for i in 0..4 {
        for j in 0..4 {
            eq[i][j] /= d[i] * d[j];
            eq_inv[i][j] *= d[i] * d[j];
        }
    }
    let cond = frobenius(&eq) * frobenius(&eq_inv);
    if !(cond <= 1e10) {
        return Err(Error::NearSingularMetric(cond));
    }
    Ok(inv)
}

/// Γ^a_{bc} from a jet.
pub fn christoffel_from_jet(jet: &Jet) -> Result<Tensor3> {
    let ginv = check_conditioning(&jet.g)?;
    let mut gamma = [[[ZERO; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                let mut sum = ZERO;
                for d in 0..4 {
                    sum += ginv[a][d] * (jet.dg[b][d][c] + jet.dg[c][d][b] - jet.dg[d][b][c]);
                }
                gamma[a][b][c] = 0.5 * sum;
                gamma[a][c][b] = 0.5 * sum;
            }
        }
    }
    Ok(gamma)
}

/// Γ^a_{bc} of the field at x.
pub fn christoffel(field: &dyn MetricField, x: &[C64; 4], opts: &FdOptions) -> Result<Tensor3> {
    christoffel_from_jet(&metric_jet(field, x, opts)?)
}

/// Curvature tensors at a point.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub g: Mat4,
    pub ginv: Mat4,
    pub riemann: Tensor4,
    pub ricci: Mat4,
    pub scalar: C64,
    pub weyl: Tensor4,
}

pub fn curvature_from_jet(jet: &Jet) -> Result<Curvature> {
    let ginv = check_conditioning(&jet.g)?;
    let gamma = christoffel_from_jet(jet)?;
    let g = &jet.g;
    let dd = &jet.ddg;
    let mut riemann = [[[[ZERO; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let second = 0.5 * (dd[b][c][a][d] + dd[a][d][b][c] - dd[a][c][b][d] - dd[b][d][a][c]);
                    let mut quad = ZERO;
                    for e in 0..4 {
                        for f in 0..4 {
                            quad += g[e][f] * (gamma[e][b][c] * gamma[f][a][d] - gamma[e][b][d] * gamma[f][a][c]);
                        }
                    }
                    riemann[a][b][c][d] = second + quad;
                }
            }
        }
    }
    let mut ricci = [[ZERO; 4]; 4];
    for b in 0..4 {
        for d in 0..4 {
            let mut sum = ZERO;
            for a in 0..4 {
                for c in 0..4 {
                    sum += ginv[a][c] * riemann[a][b][c][d];
                }
            }
            ricci[b][d] = sum;
        }
    }
    let mut scalar = ZERO;
    for b in 0..4 {
        for d in 0..4 {
            scalar += ginv[b][d] * ricci[b][d];
        }
    }
    let mut weyl = [[[[ZERO; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let ric =
                        g[a][c] * ricci[b][d] - g[a][d] * ricci[b][c] - g[b][c] * ricci[a][d] + g[b][d] * ricci[a][c];
                    let sc = g[a][c] * g[b][d] - g[a][d] * g[b][c];
                    weyl[a][b][c][d] = riemann[a][b][c][d] - 0.5 * ric + scalar / 6.0 * sc;
                }
            }
        }
    }
    Ok(Curvature {
        g: *g,
        ginv,
        riemann,
        ricci,
        scalar,
        weyl,
    })
}

/// Columns e_i with g(e_i, e_j) = δ_ij.
///
/// Coordinates are first rescaled so every row of g has unit maximum; the
/// positive rescaling keeps the orientation of the frame.
pub fn orthonormal_frame(g: &Mat4) -> Result<Mat4> {
    let mut d = [1.0f64; 4];
    for i in 0..4 {
        let row = g[i].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(row > 0.0) {
            return Err(Error::DegenerateFrame(format!("row {i} of the metric vanishes")));
        }
        d[i] = 1.0 / row.sqrt();
    }
    let mut eq = *g;
    for i in 0..4 {
        for j in 0..4 {
            eq[i][j] *= d[i] * d[j];
        }
    }
    let mut frame = gram_schmidt(&eq)?;
    for (i, row) in frame.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v *= d[i];
        }
    }
    Ok(frame)
}

/// Gram–Schmidt for the bilinear form, taking the least isotropic candidate
/// at each step.
fn gram_schmidt(g: &Mat4) -> Result<Mat4> {
    let form = |u: &[C64; 4], v: &[C64; 4]| {
        let mut s = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                s += g[i][j] * u[i] * v[j];
            }
        }
        s
    };
    let mut candidates: Vec<[C64; 4]> = Vec::new();
    for i in 0..4 {
        let mut e = [ZERO; 4];
        e[i] = C64::new(1.0, 0.0);
        candidates.push(e);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let mut e = [ZERO; 4];
            e[i] = C64::new(1.0, 0.0);
            e[j] = C64::new(1.0, 0.0);
            candidates.push(e);
        }
    }
    let scale = frobenius(g);
    let mut frame: Vec<[C64; 4]> = Vec::new();
    for _ in 0..4 {
        let mut best: Option<([C64; 4], f64)> = None;
        for cand in &candidates {
            let mut v = *cand;
            for e in &frame {
                let p = form(e, &v);
                for k in 0..4 {
                    v[k] -= p * e[k];
                }
            }
            let len2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            if len2 < 1e-24 {
                continue;
            }
            let q = form(&v, &v).norm() / len2;
            if best.is_none_or(|(_, bq)| q > bq) {
                best = Some((v, q));
            }
        }
        let (v, q) = best.ok_or_else(|| Error::DegenerateFrame("no candidate vector left".into()))?;
        if q < 1e-12 * scale {
            return Err(Error::DegenerateFrame("metric is degenerate".into()));
        }
        let n = form(&v, &v).sqrt();
        frame.push(v.map(|x| x / n));
    }
    let mut m = [[ZERO; 4]; 4];
    for (j, e) in frame.iter().enumerate() {
        for i in 0..4 {
            m[i][j] = e[i];
        }
    }
    Ok(m)
}

/// Index pairs spanning Λ².
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// The Hodge star on Λ² in an oriented orthonormal frame, in the `PAIRS` basis.
pub fn hodge_star(orientation: f64) -> [[f64; 6]; 6] {
    // *e01 = e23, *e02 = −e13, *e03 = e12, and the inverse assignments.
    let images = [(5, 1.0), (4, -1.0), (3, 1.0), (2, 1.0), (1, -1.0), (0, 1.0)];
    let mut s = [[0.0; 6]; 6];
    for (j, &(i, sign)) in images.iter().enumerate() {
        s[i][j] = sign * orientation;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylNorms {
    pub plus: f64,
    pub minus: f64,
    pub total: f64,
    /// Sign relating the frame orientation to the coordinate volume form.
    pub orientation: i8,
}

/// Splits the Weyl tensor into its self-dual and anti-self-dual parts.
pub fn weyl_split_curvature(curv: &Curvature, sqrt_det: Option<C64>, orientation: i8) -> Result<WeylNorms> {
    let frame = orthonormal_frame(&curv.g)?;
    // det(frame)² det(g) = 1; the sign tells whether the frame is coordinate oriented.
    let root = sqrt_det.unwrap_or_else(|| det4(&curv.g).sqrt());
    let rel = det4(&frame) * root;
    let frame_sign = if rel.re >= 0.0 { 1.0 } else { -1.0 };
    let o = frame_sign * orientation as f64;
    let w = &curv.weyl;
    let mut m = [[ZERO; 6]; 6];
    for (big_i, &(i, j)) in PAIRS.iter().enumerate() {
        for (big_j, &(k, l)) in PAIRS.iter().enumerate() {
            let mut sum = ZERO;
            for a in 0..4 {
                for b in 0..4 {
                    let fab = frame[a][i] * frame[b][j];
                    if fab == ZERO {
                        continue;
                    }
                    for c in 0..4 {
                        for d in 0..4 {
                            sum += w[a][b][c][d] * fab * frame[c][k] * frame[d][l];
                        }
                    }
                }
            }
            m[big_i][big_j] = sum;
        }
    }
    let star = hodge_star(o);
    let project = |sign: f64| {
        let mut p = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                p[i][j] = 0.5 * (if i == j { 1.0 } else { 0.0 } + sign * star[i][j]);
            }
        }
        let mut out = [[ZERO; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                let mut s = ZERO;
                for k in 0..6 {
                    for l in 0..6 {
                        s += p[i][k] * m[k][l] * p[l][j];
                    }
                }
                out[i][j] = s;
            }
        }
        out.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    };
    let total = m.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    Ok(WeylNorms {
        plus: project(1.0),
        minus: project(-1.0),
        total,
        orientation: o as i8,
    })
}

pub fn weyl_split(field: &dyn MetricField, x: &[C64; 4], orientation: i8, opts: &FdOptions) -> Result<WeylNorms> {
    let curv = curvature_from_jet(&metric_jet(field, x, opts)?)?;
    weyl_split_curvature(&curv, field.sqrt_det(x), orientation)
}

/// ‖L_X g − ¼ tr_g(L_X g) g‖ and ‖L_X g‖ (Frobenius, coordinate components).
pub fn lie_residuals(
    field: &dyn MetricField,
    vector: &dyn Fn(&[C64; 4]) -> [C64; 4],
    x: &[C64; 4],
    opts: &FdOptions,
) -> Result<(f64, f64)> {
    let jet = metric_jet(
        field,
        x,
        &FdOptions {
            richardson: false,
            ..*opts
        },
    )?;
    let scales = field.length_scales(x);
    let xv = vector(x);
    let mut dx = [[ZERO; 4]; 4]; // dx[a][c] = ∂_a X^c
    for a in 0..4 {
        let h = scales[a] * opts.rel_step;
        let f = |m: f64| vector(&shifted(x, &[(a, m * h)]));
        let (p1, m1, p2, m2) = (f(1.0), f(-1.0), f(2.0), f(-2.0));
        for c in 0..4 {
            dx[a][c] = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * h);
        }
    }
    let g = &jet.g;
    let mut lie = [[ZERO; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut s = ZERO;
            for c in 0..4 {
                s += xv[c] * jet.dg[c][a][b] + g[c][b] * dx[a][c] + g[a][c] * dx[b][c];
            }
            lie[a][b] = s;
        }
    }
    let ginv = inverse4(g)?;
    let mut trace = ZERO;
    for a in 0..4 {
        for b in 0..4 {
            trace += ginv[a][b] * lie[a][b];
        }
    }
    let mut conformal = lie;
    for a in 0..4 {
        for b in 0..4 {
            conformal[a][b] -= 0.25 * trace * g[a][b];
        }
    }
    // Relative to the size of a generic Lie derivative of g along X.
    let flow = (0..4).map(|c| xv[c].norm() / scales[c]).sum::<f64>();
    let shear = dx.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let size = frobenius(g) * flow.max(shear).max(1e-300);
    Ok((frobenius(&conformal) / size, frobenius(&lie) / size))
}

pub fn conformal_killing_residual(
    field: &dyn MetricField,
    vector: &dyn Fn(&[C64; 4]) -> [C64; 4],
    x: &[C64; 4],
    opts: &FdOptions,
) -> Result<f64> {
    Ok(lie_residuals(field, vector, x, opts)?.0)
}

/// Eigenvalues of a real symmetric 4×4 matrix (cyclic Jacobi).
pub fn symmetric_eigenvalues(m: &[[f64; 4]; 4]) -> [f64; 4] {
    let mut a = *m;
    for _ in 0..100 {
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = [a[0][0], a[1][1], a[2][2], a[3][3]];
    ev.sort_by(f64::total_cmp);
    ev
}

/// "(p,q)" for a real metric, "complex" otherwise.
pub fn signature(g: &Mat4) -> String {
    let scale = frobenius(g);
    if g.iter().flatten().any(|v| v.im.abs() > 1e-12 * scale) {
        return "complex".into();
    }
    let re = g.map(|row| row.map(|v| v.re));
    let ev = symmetric_eigenvalues(&re);
    let pos = ev.iter().filter(|&&e| e > 0.0).count();
    format!("({},{})", pos, 4 - pos)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VanishingSide {
    Plus,
    Minus,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCurvature {
    /// Chart coordinates as (re, im) pairs.
    pub point: [[f64; 2]; 4],
    pub w_plus: f64,
    pub w_minus: f64,
    pub w_total: f64,
    pub ricci_scalar: [f64; 2],
    pub signature: String,
    /// Conformal-Killing residuals for the given fields (∂v₁, ∂v₂ for toric charts).
    pub lie_residuals: Vec<f64>,
    pub orientation: i8,
}

impl PointCurvature {
    pub fn vanishing_ratio(&self) -> f64 {
        self.w_plus.min(self.w_minus) / self.w_total.max(1e-300)
    }

    pub fn side(&self, tol: f64) -> VanishingSide {
        let (rp, rm) = (
            self.w_plus / self.w_total.max(1e-300),
            self.w_minus / self.w_total.max(1e-300),
        );
        if rp < tol && rp <= rm {
            VanishingSide::Plus
        } else if rm < tol {
            VanishingSide::Minus
        } else {
            VanishingSide::None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub points: Vec<PointCurvature>,
    pub vanishing_side: VanishingSide,
    /// Largest ‖W^vanish‖/‖W‖ over the points for the common side.
    pub max_ratio: f64,
    pub max_lie_residual: f64,
    pub signature_consistent: bool,
    pub tolerance: f64,
}

impl CurvatureReport {
    pub fn asd_passed(&self) -> bool {
        self.vanishing_side != VanishingSide::None && self.max_ratio < self.tolerance && self.signature_consistent
    }
}

/// A vector field on the chart, for Killing checks.
pub type VectorField = dyn Fn(&[C64; 4]) -> [C64; 4] + Sync;

pub fn analyze_point(
    field: &dyn MetricField,
    x: &[C64; 4],
    killing: &[&VectorField],
    orientation: i8,
    opts: &FdOptions,
) -> Result<PointCurvature> {
    let jet = metric_jet(field, x, opts)?;
    let curv = curvature_from_jet(&jet)?;
    let norms = weyl_split_curvature(&curv, field.sqrt_det(x), orientation)?;
    let mut lie = Vec::new();
    for v in killing {
        lie.push(conformal_killing_residual(field, *v, x, opts)?);
    }
    Ok(PointCurvature {
        point: x.map(|v| [v.re, v.im]),
        w_plus: norms.plus,
        w_minus: norms.minus,
        w_total: norms.total,
        ricci_scalar: [curv.scalar.re, curv.scalar.im],
        signature: signature(&curv.g),
        lie_residuals: lie,
        orientation: norms.orientation,
    })
}

/// Gathers per-point results into a report with a common vanishing side.
pub fn summarize(points: Vec<PointCurvature>, tol: f64) -> CurvatureReport {
    let plus = points
        .iter()
        .map(|p| p.w_plus / p.w_total.max(1e-300))
        .fold(0.0, f64::max);
    let minus = points
        .iter()
        .map(|p| p.w_minus / p.w_total.max(1e-300))
        .fold(0.0, f64::max);
    let (vanishing_side, max_ratio) = if points.is_empty() {
        (VanishingSide::None, f64::INFINITY)
    } else if plus <= minus && plus < tol {
        (VanishingSide::Plus, plus)
    } else if minus < tol {
        (VanishingSide::Minus, minus)
    } else {
        (VanishingSide::None, plus.min(minus))
    };
    let signature_consistent = points.windows(2).all(|w| w[0].signature == w[1].signature);
    let max_lie_residual = points
        .iter()
        .flat_map(|p| p.lie_residuals.iter().cloned())
        .fold(0.0, f64::max);
    CurvatureReport {
        points,
        vanishing_side,
        max_ratio,
        max_lie_residual,
        signature_consistent,
        tolerance: tol,
    }
}

/// ∂/∂x_k as a vector field.
pub fn coordinate_field(k: usize) -> impl Fn(&[C64; 4]) -> [C64; 4] + Sync {
    move |_| {
        let mut v = [ZERO; 4];
        v[k] = C64::new(1.0, 0.0);
        v
    }
}
