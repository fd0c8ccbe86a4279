//! Kähler verdicts: whether τ is some τ_c with c real and negative, the circle
//! of Kähler representatives, and the Lagrangian-orbit case c = −1.

use std::f64::consts::PI;

use crate::complex::{contour_integrate, Contour, C64, I};
use crate::error::{Error, Result};
use crate::holo::{BetaForm, TauC, TauSpec};

pub const TAU_C_TOL: f64 = 1e-6;
pub const LAGRANGIAN_TOL: f64 = 1e-8;
const FIT_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TauFit {
    pub c: C64,
    /// RMS of τ(z_k) − τ_c(z_k) over the samples.
    pub residual: f64,
    pub sample_radius: f64,
}

/// τ(z) = −z + a₂z² + …; for τ_c, a₂ = −(4/3)(1 + 1/c).
fn c_from_quadratic(a2: C64) -> Result<C64> {
    let kappa = -0.75 * a2;
    let denom = kappa - 1.0;
    if denom.norm() < 1e-12 {
        return Err(Error::NoFit(format!("quadratic coefficient {a2} sends c to ∞")));
    }
    Ok(1.0 / denom)
}

fn residuals(c: C64, pts: &[C64], targets: &[C64]) -> Result<Vec<C64>> {
    let map = TauC::new(c)?;
    pts.iter().zip(targets).map(|(&z, &t)| Ok(t - map.apply(z)?)).collect()
}

fn rms(v: &[C64]) -> f64 {
    (v.iter().map(|e| e.norm_sqr()).sum::<f64>() / v.len() as f64).sqrt()
}

/// Least-squares fit of c to a sampled involution defined on |z| < `radius`.
pub fn fit_tau_c(tau: &dyn Fn(C64) -> Result<C64>, radius: f64) -> Result<TauFit> {
    if !(radius > 0.0) {
        return Err(Error::NoFit("sample radius must be positive".into()));
    }
    let probe = Contour::new(C64::new(0.0, 0.0), 0.5 * radius, 64)?;
    let vals: Vec<C64> = probe
        .points()
        .iter()
        .map(|&z| Ok(tau(z)? / (z * z * z)))
        .collect::<Result<_>>()?;
    let a2 = contour_integrate(&vals, &probe)? / (2.0 * PI * I);
    let mut c = c_from_quadratic(a2)?;
    let disc = |c: C64| -> Result<f64> { Ok(TauC::new(c)?.radius.min(radius)) };
    let sample_radius = 0.5 * disc(c).map_err(|e| Error::NoFit(e.to_string()))?;
    let pts: Vec<C64> = (0..FIT_SAMPLES)
        .map(|k| C64::from_polar(sample_radius, 2.0 * PI * (k as f64 + 0.5) / FIT_SAMPLES as f64))
        .collect();
    let targets: Vec<C64> = pts.iter().map(|&z| tau(z)).collect::<Result<_>>()?;
    let fit_err = |e: Error| Error::NoFit(e.to_string());
    let mut err = residuals(c, &pts, &targets).map_err(fit_err)?;
    for _ in 0..30 {
        // Gauss–Newton in the complex parameter; τ_c depends holomorphically on c.
        let h = 1e-6 * c.norm().max(1.0);
        let plus = residuals(c + h, &pts, &targets).map_err(fit_err)?;
        let minus = residuals(c - h, &pts, &targets).map_err(fit_err)?;
        let (mut num, mut den) = (C64::new(0.0, 0.0), 0.0);
        for k in 0..pts.len() {
            // e = target − τ_c, so ∂e/∂c = −∂τ_c/∂c.
            let jac = (plus[k] - minus[k]) / (2.0 * h);
            num += jac.conj() * err[k];
            den += jac.norm_sqr();
        }
        if den == 0.0 {
            break;
        }
        let step = -num / den;
        let next = c + step;
        let next_err = match residuals(next, &pts, &targets) {
            Ok(e) => e,
            Err(_) => break,
        };
        if rms(&next_err) > rms(&err) {
            break;
        }
        c = next;
        err = next_err;
        if step.norm() < 1e-14 * c.norm().max(1.0) {
            break;
        }
    }
    let residual = rms(&err);
    if !residual.is_finite() {
        return Err(Error::NoFit("residual is not finite".into()));
    }
    Ok(TauFit {
        c,
        residual,
        sample_radius,
    })
}

/// Fits c for a configured involution.
pub fn fit_tau_spec(tau: &TauSpec) -> Result<TauFit> {
    let radius = tau.validity_radius()?.min(0.25);
    fit_tau_c(&|z| tau.apply(z), radius)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KahlerRepresentative {
    pub theta: f64,
    pub mu: C64,
    pub lambda: C64,
    pub scale: C64,
    /// 2πi·res_μ β, the value of ω on the torus generators up to sign.
    pub omega: C64,
}

/// The Kähler representative at angle θ: μ = √(−c)e^{iθ} and λ = μ/c, which is
/// antipodal to μ. The scale i·e^{2iθ} fixes ω along the circle.
pub fn kahler_circle(c: f64, theta: f64) -> Result<(BetaForm, KahlerRepresentative)> {
    if !(c < 0.0) {
        return Err(Error::NotKahler(c));
    }
    let phase = C64::from_polar(1.0, theta);
    let mu = (-c).sqrt() * phase;
    let scale = I * phase * phase;
    let beta = BetaForm::new(mu, c, true)?.with_scale(scale);
    let rep = KahlerRepresentative {
        theta,
        mu,
        lambda: beta.lambda,
        scale,
        omega: 2.0 * PI * I * beta.residue(),
    };
    Ok((beta, rep))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KahlerVerdict {
    pub is_tau_c: bool,
    pub c: C64,
    pub residual: f64,
    pub kahler: bool,
    pub lagrangian: bool,
    /// Sample of the representative circle (empty unless Kähler).
    pub representatives: Vec<KahlerRepresentative>,
}

/// The verdict chain from a fit.
pub fn verdict_from_fit(fit: &TauFit) -> KahlerVerdict {
    let is_tau_c = fit.residual < TAU_C_TOL;
    let c_real = fit.c.im.abs() < TAU_C_TOL * fit.c.norm().max(1.0);
    let kahler = is_tau_c && c_real && fit.c.re < 0.0;
    let lagrangian = kahler && (fit.c - C64::new(-1.0, 0.0)).norm() < LAGRANGIAN_TOL;
    let representatives = if kahler {
        (0..8)
            .filter_map(|k| kahler_circle(fit.c.re, 2.0 * PI * k as f64 / 8.0).ok().map(|(_, r)| r))
            .collect()
    } else {
        Vec::new()
    };
    KahlerVerdict {
        is_tau_c,
        c: fit.c,
        residual: fit.residual,
        kahler,
        lagrangian,
        representatives,
    }
}

/// Fits τ and classifies it; a failed fit gives the all-false verdict.
pub fn kahler_verdict(tau: &TauSpec) -> KahlerVerdict {
    match fit_tau_spec(tau) {
        Ok(fit) => verdict_from_fit(&fit),
        Err(e) => {
            log::debug!("τ_c fit failed: {e}");
            KahlerVerdict {
                is_tau_c: false,
                c: C64::new(f64::NAN, f64::NAN),
                residual: f64::INFINITY,
                kahler: false,
                lagrangian: false,
                representatives: Vec::new(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;

    #[test]
    fn reflection_fits_minus_one() {
        let fit = fit_tau_c(&|z| Ok(-z), 0.25).unwrap();
        assert!((fit.c + 1.0).norm() < 1e-10);
        assert!(fit.residual < 1e-10);
        let v = verdict_from_fit(&fit);
        assert!(v.is_tau_c && v.kahler && v.lagrangian);
    }

    #[test]
    fn sampled_tau_c_round_trips() {
        let map = TauC::new(c(-2.0, 0.0)).unwrap();
        let fit = fit_tau_c(&|z| map.apply(z), map.radius).unwrap();
        assert!((fit.c - c(-2.0, 0.0)).norm() < 1e-6, "{:?}", fit);
        let v = verdict_from_fit(&fit);
        assert!(v.kahler && !v.lagrangian);
        assert_eq!(v.representatives.len(), 8);
    }

    #[test]
    fn complex_parameter_is_not_kahler() {
        let map = TauC::new(c(-2.0, 1.0)).unwrap();
        let fit = fit_tau_c(&|z| map.apply(z), map.radius).unwrap();
        assert!((fit.c - c(-2.0, 1.0)).norm() < 1e-6);
        let v = verdict_from_fit(&fit);
        assert!(v.is_tau_c && !v.kahler && !v.lagrangian);
    }

    #[test]
    fn generic_involution_is_rejected() {
        let fit = fit_tau_c(&|z| Ok(-z + z * z * z), 0.25).unwrap();
        assert!(fit.residual > 1e-4, "{}", fit.residual);
        let v = verdict_from_fit(&fit);
        assert!(!v.is_tau_c && !v.kahler && !v.lagrangian);
    }

    #[test]
    fn configured_taus() {
        assert!(kahler_verdict(&TauSpec::linear()).lagrangian);
        let v = kahler_verdict(&TauSpec::tau_c(c(-2.0, 0.0)));
        assert!(v.kahler && !v.lagrangian);
    }

    #[test]
    fn circle_at_minus_one_is_residue_free() {
        let (beta, rep) = kahler_circle(-1.0, 0.0).unwrap();
        assert!((rep.mu - 1.0).norm() < 1e-15);
        assert!((rep.lambda + 1.0).norm() < 1e-15);
        assert_eq!(beta.residue(), c(0.0, 0.0));
    }

    #[test]
    fn circle_forms_are_antipodal() {
        for k in 0..12 {
            let theta = 0.5 * k as f64;
            let (beta, rep) = kahler_circle(-4.0, theta).unwrap();
            assert!(beta.antipodal_residual() < 1e-14);
            assert!((rep.lambda / rep.mu - 1.0 / -4.0).norm() < 1e-15);
            assert!((rep.lambda.norm() * rep.mu.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_is_constant_on_the_circle() {
        for cc in [-4.0, -2.0, -0.3] {
            let (_, base) = kahler_circle(cc, 0.0).unwrap();
            for k in 1..24 {
                let (_, rep) = kahler_circle(cc, 0.27 * k as f64).unwrap();
                assert!(
                    (rep.omega - base.omega).norm() < 1e-10,
                    "{cc}: {} vs {}",
                    rep.omega,
                    base.omega
                );
            }
        }
    }

    #[test]
    fn nonnegative_parameter_is_not_kahler() {
        assert!(matches!(kahler_circle(0.5, 0.0), Err(Error::NotKahler(_))));
        assert!(matches!(kahler_circle(0.0, 0.0), Err(Error::NotKahler(_))));
    }
}
