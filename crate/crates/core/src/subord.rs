//! Subordination of free diffusion by the inverse stable time change.
//!
//! `n(s, tau) = (1/(alpha s)) (tau/s^{1/alpha}) g_alpha(tau/s^{1/alpha})` is a
//! probability density in the operational time `s`, and
//! `P_alpha(x, tau) = int_0^inf n(s, tau) P_1(x, s) ds` with the heat kernel
//! `P_1(x, s) = exp(-x^2/(4s)) / sqrt(4 pi s)`.

use rayon::prelude::*;

use crate::densities::{DensityHandle, StableIndex};
use crate::error::{LevyError, Result};
use crate::laplace::{Metric, VerifyReport};
use crate::quad::{integrate, QuadPlan};
use crate::specfun::gamma;
use crate::transform::{levy2_apply, TransformRequest};

#[derive(Debug, Clone)]
pub struct SubordinationRequest {
    pub alpha: StableIndex,
    pub tau: f64,
    pub x_grid: Vec<f64>,
    pub plan: QuadPlan,
}

impl SubordinationRequest {
    pub fn new(alpha: StableIndex, tau: f64, x_grid: Vec<f64>) -> Self {
        SubordinationRequest { alpha, tau, x_grid, plan: QuadPlan::default().with_tols(1e-300, 1e-12) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(LevyError::Config(format!("tau = {} must be positive", self.tau)));
        }
        if let Some(x) = self.x_grid.iter().find(|x| !x.is_finite()) {
            return Err(LevyError::Config(format!("non-finite grid point {x}")));
        }
        self.plan.validate()
    }
}

/// One point of `P_alpha(x, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorPoint {
    pub x: f64,
    pub value: f64,
    pub converged: bool,
}

fn n_with(g: &DensityHandle, s: f64, tau: f64) -> Result<f64> {
    if !(s > 0.0) || !(tau > 0.0) {
        return Err(LevyError::domain("kernel_n", format!("s = {s} and tau = {tau} must be positive")));
    }
    let a = g.alpha().value();
    let u = tau * s.powf(-1.0 / a);
    if u == 0.0 {
        return Ok(0.0);
    }
    if u > 1e250 {
        // g(u) ~ alpha u^{-1-alpha} / Gamma(1 - alpha), so n -> tau^{-alpha} / Gamma(1 - alpha)
        return Ok(tau.powf(-a) / gamma(1.0 - a)?);
    }
    Ok(u * g.pdf(u)? / (a * s))
}

/// `n(s, tau)`; note the order of arguments relative to `kappa(t, x)`:
/// `n(s, tau) = tau / (alpha s) * kappa_alpha(s, tau)`.
pub fn kernel_n(alpha: StableIndex, s: f64, tau: f64) -> Result<f64> {
    n_with(&DensityHandle::for_index(alpha)?, s, tau)
}

fn n_plan(alpha: f64, tau: f64) -> QuadPlan {
    // the mass of n(., tau) sits at s ~ tau^alpha
    QuadPlan::default().with_split(tau.powf(alpha)).with_tols(1e-300, 1e-12)
}

/// `int_0^inf n(s, tau) ds`, expected to be 1.
pub fn n_mass(alpha: StableIndex, tau: f64) -> Result<f64> {
    let g = DensityHandle::for_index(alpha)?;
    integrate(|s| n_with(&g, s, tau).unwrap_or(f64::NAN), &n_plan(alpha.value(), tau))?.certified()
}

/// `P_alpha(x, tau)` at every point of the request's grid.
pub fn subordinate_free_diffusion(req: &SubordinationRequest) -> Result<Vec<PropagatorPoint>> {
    req.validate()?;
    let g = DensityHandle::for_index(req.alpha)?;
    let plan = req.plan.with_split(req.tau.powf(req.alpha.value()));
    req.x_grid
        .par_iter()
        .map(|&x| {
            let r = integrate(
                |s| {
                    let heat = (-x * x / (4.0 * s)).exp() / (4.0 * std::f64::consts::PI * s).sqrt();
                    if heat == 0.0 {
                        0.0
                    } else {
                        heat * n_with(&g, s, req.tau).unwrap_or(f64::NAN)
                    }
                },
                &plan,
            )?;
            Ok(PropagatorPoint { x, value: r.value, converged: r.converged })
        })
        .collect()
}

/// Uniform symmetric grid with step `h` on `|x| <= 40 tau^{alpha/2}`. A change
/// of step would cost the trapezoid rule its accuracy on the smooth flanks, so
/// the cusp at the origin is handled by a small `h` alone.
pub fn normalization_grid(alpha: StableIndex, tau: f64, h: f64) -> Vec<f64> {
    let n = (40.0 * tau.powf(alpha.value() / 2.0) / h).ceil() as i64;
    (-n..=n).map(|i| i as f64 * h).collect()
}

/// Trapezoid sums of `P` and `x^2 P` over a non-uniform grid.
pub fn trapezoid_moments(points: &[PropagatorPoint]) -> (f64, f64) {
    let (mut m0, mut m2) = (0.0, 0.0);
    for w in points.windows(2) {
        let h = w[1].x - w[0].x;
        m0 += 0.5 * h * (w[0].value + w[1].value);
        m2 += 0.5 * h * (w[0].x * w[0].x * w[0].value + w[1].x * w[1].x * w[1].value);
    }
    (m0, m2)
}

/// `int P_alpha(x, tau) dx` by the trapezoid rule on [`normalization_grid`],
/// less the kink term `h^2 [P']/12`. The slope jump at the origin is
/// `[P'] = n(0+, tau) = tau^{-alpha} / Gamma(1 - alpha)`.
/// Returns `(raw, corrected)`.
pub fn propagator_mass(alpha: StableIndex, tau: f64, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(LevyError::Config(format!("grid step h = {h} must be positive")));
    }
    let req = SubordinationRequest::new(alpha, tau, normalization_grid(alpha, tau, h));
    let points = subordinate_free_diffusion(&req)?;
    if let Some(p) = points.iter().find(|p| !p.converged) {
        return Err(LevyError::Quadrature { value: p.value, est_error: f64::NAN });
    }
    let (m0, _) = trapezoid_moments(&points);
    let a = alpha.value();
    Ok((m0, m0 - h * h * tau.powf(-a) / (12.0 * gamma(1.0 - a)?)))
}

/// `<x^2>(tau) = 2 int_0^inf s n(s, tau) ds`.
pub fn msd(alpha: StableIndex, tau: f64) -> Result<f64> {
    let g = DensityHandle::for_index(alpha)?;
    let r = integrate(|s| s * n_with(&g, s, tau).unwrap_or(f64::NAN), &n_plan(alpha.value(), tau))?;
    Ok(2.0 * r.certified()?)
}

/// `2 tau^alpha / Gamma(1 + alpha)`.
pub fn msd_exact(alpha: StableIndex, tau: f64) -> Result<f64> {
    Ok(2.0 * tau.powf(alpha.value()) / gamma(1.0 + alpha.value())?)
}

/// Least-squares slope of `ln <x^2>` against `ln tau`.
pub fn msd_exponent(alpha: StableIndex, tau_grid: &[f64]) -> Result<f64> {
    let (lo, hi) = tau_grid.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if tau_grid.len() < 2 || !(hi / lo >= 10.0) {
        return Err(LevyError::Config("tau grid must span at least one decade".into()));
    }
    let pts: Vec<(f64, f64)> = tau_grid.iter().map(|&t| Ok((t.ln(), msd(alpha, t)?.ln()))).collect::<Result<_>>()?;
    let m = pts.len() as f64;
    let (su, sv) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (suu, suv) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 * p.0, b + p.0 * p.1));
    Ok((m * suv - su * sv) / (m * suu - su * su))
}

/// `int n(s, tau) P(s) ds` against the Lévy2 transform of `P(s)/(alpha s)`
/// evaluated at `x = tau`. The two differ by the factor `tau`:
/// `int n P ds = tau * L_alpha[P(s)/(alpha s)](tau)`.
pub fn verify_levy2_relation<P>(alpha: StableIndex, tau: f64, name: &str, probe: P, tol: f64) -> VerifyReport
where
    P: Fn(f64) -> f64 + Sync,
{
    let a = alpha.value();
    let pair = (|| {
        let g = DensityHandle::for_index(alpha)?;
        let direct = integrate(|s| n_with(&g, s, tau).unwrap_or(f64::NAN) * probe(s), &n_plan(a, tau))?.certified()?;
        let req = TransformRequest::for_index(alpha)?;
        let via = levy2_apply(&req, |s| probe(s) / (a * s), tau)?.certified()?;
        Ok((tau * via, direct))
    })();
    VerifyReport::build(format!("levy2 relation {name} alpha={alpha} tau={tau}"), &[tau], vec![pair], tol, Metric::Rel)
}
