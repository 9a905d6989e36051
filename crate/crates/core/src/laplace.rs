//! Numerical Laplace transform on `(0, inf)` and the identity checks built on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::densities::{kernel_kappa, DensityHandle, StableIndex};
use crate::error::Result;
use crate::quad::{integrate, plan_for_density, QuadPlan, QuadResult};
use crate::specfun::{arc_ratio, bessel_k};
use crate::transform::{compose_oriented, levy2_apply, TransformRequest};

/// Which error bounds `passed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Abs,
    Rel,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub identity_id: String,
    pub grid: Vec<f64>,
    /// `|computed - reference|` per grid point; infinite where the
    /// computation itself failed.
    pub residuals: Vec<f64>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub tol: f64,
    pub metric: Metric,
    pub passed: bool,
}

impl VerifyReport {
    /// Assemble a report from `(computed, reference)` pairs.
    pub fn build(id: impl Into<String>, grid: &[f64], pairs: Vec<Result<(f64, f64)>>, tol: f64, metric: Metric) -> Self {
        let mut residuals = Vec::with_capacity(grid.len());
        let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
        for pair in pairs {
            match pair {
                Ok((got, want)) => {
                    let abs = (got - want).abs();
                    let rel = abs / want.abs();
                    residuals.push(abs);
                    max_abs = max_abs.max(if abs.is_nan() { f64::INFINITY } else { abs });
                    max_rel = max_rel.max(if rel.is_nan() { f64::INFINITY } else { rel });
                }
                Err(_) => {
                    residuals.push(f64::INFINITY);
                    max_abs = f64::INFINITY;
                    max_rel = f64::INFINITY;
                }
            }
        }
        let err = match metric {
            Metric::Abs => max_abs,
            Metric::Rel => max_rel,
        };
        VerifyReport {
            identity_id: id.into(),
            grid: grid.to_vec(),
            residuals,
            max_abs_err: max_abs,
            max_rel_err: max_rel,
            tol,
            metric,
            passed: err <= tol,
        }
    }
}

/// `int_0^inf e^{-p t} f(t) dt`.
pub fn laplace_numeric<F: Fn(f64) -> f64>(f: F, p: f64, plan: &QuadPlan) -> Result<QuadResult> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(crate::LevyError::domain("laplace_numeric", format!("p = {p} must be positive and finite")));
    }
    integrate(|t| f(t) * (-p * t).exp(), plan)
}

fn density_plan(d: &DensityHandle, p: f64) -> QuadPlan {
    plan_for_density(d.alpha().value(), Some(p)).with_tols(1e-300, 1e-12)
}

/// Certified Laplace transform of a density at `p`.
pub fn laplace_density(d: &DensityHandle, p: f64) -> Result<f64> {
    laplace_numeric(|x| d.pdf_or_nan(x), p, &density_plan(d, p))?.certified()
}

/// `L[g](p) = exp(-p^alpha)` on `p_grid`, in absolute error.
pub fn verify_char(d: &DensityHandle, p_grid: &[f64], tol: f64) -> VerifyReport {
    verify_char_as(d, d.alpha().value(), 1.0, p_grid, tol)
}

/// As [`verify_char`] with the kernel scaled by `t`: `L[kappa(t, .)](p) = exp(-t p^alpha)`.
pub fn verify_char_scaled(d: &DensityHandle, t: f64, p_grid: &[f64], tol: f64) -> VerifyReport {
    verify_char_as(d, d.alpha().value(), t, p_grid, tol)
}

/// The characteristic check against a claimed index, which need not be the
/// density's own (negative controls).
pub fn verify_char_as(d: &DensityHandle, claimed_alpha: f64, t: f64, p_grid: &[f64], tol: f64) -> VerifyReport {
    let a = d.alpha().value();
    let pairs = p_grid
        .par_iter()
        .map(|&p| {
            let got = if t == 1.0 {
                laplace_density(d, p)?
            } else {
                let plan = density_plan(d, p).with_split(plan_for_density(a, Some(p)).split_scale * t.powf(1.0 / a));
                laplace_numeric(|x| kernel_kappa(d, t, x).unwrap_or(f64::NAN), p, &plan)?.certified()?
            };
            Ok((got, (-t * p.powf(claimed_alpha)).exp()))
        })
        .collect();
    let id = if t == 1.0 {
        format!("char alpha={} claim={claimed_alpha}", d.alpha())
    } else {
        format!("char alpha={} t={t} claim={claimed_alpha}", d.alpha())
    };
    VerifyReport::build(id, p_grid, pairs, tol, Metric::Abs)
}

/// `L[L_alpha[f]](p) = F(p^alpha)` by nested quadrature, in absolute error.
pub fn verify_scaling<F, G>(alpha: StableIndex, f: F, image: G, p_grid: &[f64], tol: f64) -> VerifyReport
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> Result<f64> + Sync,
{
    verify_scaling_named(&format!("scaling alpha={alpha}"), alpha, f, image, p_grid, tol)
}

pub fn verify_scaling_named<F, G>(id: &str, alpha: StableIndex, f: F, image: G, p_grid: &[f64], tol: f64) -> VerifyReport
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> Result<f64> + Sync,
{
    let a = alpha.value();
    let pairs = p_grid
        .par_iter()
        .map(|&p| {
            let req = TransformRequest::for_index(alpha)?;
            let transformed = |x: f64| match levy2_apply(&req, &f, x) {
                Ok(r) if r.converged => r.value,
                _ => f64::NAN,
            };
            let plan = QuadPlan::default().with_split(1.0 / p).with_tols(1e-300, 1e-10);
            let got = laplace_numeric(transformed, p, &plan)?.certified()?;
            Ok((got, image(p.powf(a))?))
        })
        .collect();
    VerifyReport::build(id, p_grid, pairs, tol, Metric::Abs)
}

/// `K_0` with its Laplace image `arc_ratio(p)`; the image is continued
/// analytically through `p = 1`.
pub fn verify_scaling_k0(alpha: StableIndex, p_grid: &[f64], tol: f64) -> VerifyReport {
    verify_scaling_named(
        &format!("scaling K0 alpha={alpha}"),
        alpha,
        |t| bessel_k(0.0, t).unwrap_or(f64::NAN),
        arc_ratio,
        p_grid,
        tol,
    )
}

/// Both composition orders agree pointwise, in relative error.
pub fn verify_commute(alpha: StableIndex, beta: StableIndex, x_grid: &[f64], tol: f64) -> VerifyReport {
    let pairs = x_grid
        .par_iter()
        .map(|&x| {
            let ga = DensityHandle::for_index(alpha)?;
            let gb = DensityHandle::for_index(beta)?;
            let one = compose_oriented(&ga, &gb)?.pdf(x)?;
            let two = compose_oriented(&gb, &ga)?.pdf(x)?;
            Ok((one, two))
        })
        .collect();
    VerifyReport::build(format!("commute {alpha} {beta}"), x_grid, pairs, tol, Metric::Rel)
}

/// The Efros chain with `G = 1`, `q(p) = p^alpha`:
/// `int_0^inf g_beta(t) e^{-t p^alpha} dt` and the Laplace transform of the
/// composed density must both equal `exp(-p^{alpha beta})`. The residual at
/// each `p` is the larger of the two discrepancies.
pub fn verify_efros(alpha: StableIndex, beta: StableIndex, p_grid: &[f64], tol: f64) -> VerifyReport {
    let ab = alpha.value() * beta.value();
    verify_efros_against(alpha, beta, p_grid, tol, &|p| (-p.powf(ab)).exp(), "efros")
}

/// [`verify_efros`] against an arbitrary reference (negative controls).
pub fn verify_efros_against(
    alpha: StableIndex,
    beta: StableIndex,
    p_grid: &[f64],
    tol: f64,
    reference: &(dyn Fn(f64) -> f64 + Sync),
    label: &str,
) -> VerifyReport {
    let pairs = p_grid
        .par_iter()
        .map(|&p| {
            let ga = DensityHandle::for_index(alpha)?;
            let gb = DensityHandle::for_index(beta)?;
            let q = p.powf(alpha.value());
            let inner = laplace_density(&gb, q)?;
            let composed = compose_oriented(&ga, &gb)?;
            let outer = laplace_density(&composed, p)?;
            let want = reference(p);
            let got = if (inner - want).abs() > (outer - want).abs() { inner } else { outer };
            Ok((got, want))
        })
        .collect();
    VerifyReport::build(format!("{label} {alpha} {beta}"), p_grid, pairs, tol, Metric::Abs)
}
