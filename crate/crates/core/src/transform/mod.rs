//! The Lévy2 transform `L[f](x) = int_0^inf kappa_alpha(t, x) f(t) dt`,
//! composition of stable densities (`L_alpha[g_beta] = g_{alpha beta}`),
//! iterated synthesis of `g_{alpha^p}`, and tabulation.

mod cache;

use rayon::prelude::*;

pub use cache::{cache_dir, cache_load, cache_save, CACHE_VERSION};

use crate::densities::{cheb_nodes, kernel_kappa, ChebLogInterpolant, DensityHandle, StableIndex};
use crate::error::{LevyError, Result};
use crate::quad::{approx_mode, integrate, integrate_bracketed, QuadPlan, QuadResult};

pub const DEFAULT_NODES: usize = 128;
pub const DEFAULT_U_RANGE: (f64, f64) = (-6.907_755_278_982_137, 9.210_340_371_976_184);
/// Relative bound on the interpolation error at off-node checkpoints.
pub const TABULATION_BOUND: f64 = 1e-7;
pub const MAX_CHAIN_DEPTH: u32 = 4;
pub const BUMP_WIDTH: f64 = 1e-3;

/// Kernel density and quadrature plan for a Lévy2 transform.
#[derive(Debug, Clone)]
pub struct TransformRequest {
    pub kernel: DensityHandle,
    pub plan: QuadPlan,
    /// Where the operand concentrates, if known; replaces the peak scan.
    pub split_hint: Option<f64>,
}

impl TransformRequest {
    pub fn new(kernel: DensityHandle) -> Self {
        TransformRequest { kernel, plan: QuadPlan::default().with_tols(1e-300, 1e-10), split_hint: None }
    }

    pub fn for_index(alpha: StableIndex) -> Result<Self> {
        Ok(Self::new(DensityHandle::for_index(alpha)?))
    }

    pub fn with_split_hint(mut self, t: f64) -> Self {
        self.split_hint = Some(t);
        self
    }
}

const SCAN_PER_DECADE: i32 = 8;
const SCAN_HALF: i32 = 6 * SCAN_PER_DECADE;
const BRACKET_DROP: f64 = 1e-30;

/// `int_0^inf kappa_alpha(t, x) f(t) dt`. Non-convergence is reported in the
/// result, not as an error.
pub fn levy2_apply<F: Fn(f64) -> f64 + Sync>(req: &TransformRequest, f: F, x: f64) -> Result<QuadResult> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LevyError::domain("levy2_apply", format!("x = {x} must be positive and finite")));
    }
    let alpha = req.kernel.alpha().value();
    let integrand = |t: f64| {
        let k = kernel_kappa(&req.kernel, t, x).unwrap_or(f64::NAN);
        if k == 0.0 {
            0.0
        } else {
            k * f(t)
        }
    };
    if let Some(t) = req.split_hint {
        return integrate(integrand, &req.plan.with_split(t));
    }
    // kappa peaks where x t^{-1/alpha} sits at the kernel's mode; the operand
    // may move the product's peak far from there, so scan a wide log grid
    let centre = (x / approx_mode(alpha)).powf(alpha);
    let step = 10f64.powf(1.0 / SCAN_PER_DECADE as f64);
    let ts: Vec<f64> = (-SCAN_HALF..=SCAN_HALF).map(|i| centre * step.powi(i)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| (t * integrand(t)).abs()).map(|v| if v.is_finite() { v } else { 0.0 }).collect();
    let (imax, peak) = vals.iter().cloned().enumerate().fold((0, 0.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    if peak == 0.0 {
        return Ok(QuadResult { value: 0.0, est_error: 0.0, evaluations: ts.len(), converged: true });
    }
    // a single DE split samples a peak that is narrow in ln t too sparsely;
    // bracket the region above peak * 1e-30 when the scan finds both edges
    let lo = (0..imax).rev().find(|&i| vals[i] < peak * BRACKET_DROP);
    let hi = (imax + 1..ts.len()).find(|&i| vals[i] < peak * BRACKET_DROP);
    if let (Some(lo), Some(hi)) = (lo, hi) {
        return integrate_bracketed(integrand, ts[lo], ts[hi], &req.plan);
    }
    integrate(integrand, &req.plan.with_split(ts[imax]))
}

/// Pointwise value of `L_kernel[operand](x)`, i.e. the composed density.
pub fn levy2_density(kernel: &DensityHandle, operand: &DensityHandle, x: f64) -> Result<f64> {
    let req = TransformRequest::new(kernel.clone());
    let r = levy2_apply(&req, |t| operand.pdf_or_nan(t), x)?;
    let v = r.certified()?;
    Ok(if (-1e-12..0.0).contains(&v) { 0.0 } else { v })
}

/// `g_{alpha beta}` as a live composition. The kernel is whichever of the two
/// closed-form indices is larger; the other density is the operand.
pub fn compose(alpha: StableIndex, beta_density: &DensityHandle) -> Result<DensityHandle> {
    let kernel = DensityHandle::for_index(alpha)?;
    if beta_density.is_closed() && beta_density.alpha().value() > alpha.value() {
        return DensityHandle::live(beta_density.clone(), kernel);
    }
    DensityHandle::live(kernel, beta_density.clone())
}

/// Composition with an explicit kernel, regardless of orientation.
pub fn compose_oriented(kernel: &DensityHandle, operand: &DensityHandle) -> Result<DensityHandle> {
    DensityHandle::live(kernel.clone(), operand.clone())
}

/// `g_{alpha^p}` by repeated composition with the closed-form `g_alpha`; every
/// stage, including the last, is tabulated. `p > 4` needs `allow_deep`.
pub fn power_chain(alpha: StableIndex, p: u32, allow_deep: bool) -> Result<DensityHandle> {
    if p < 2 {
        return Err(LevyError::Config(format!("power_chain needs p >= 2, got {p}")));
    }
    if p > MAX_CHAIN_DEPTH && !allow_deep {
        return Err(LevyError::Config(format!(
            "p = {p} exceeds {MAX_CHAIN_DEPTH}; interpolation error grows with each stage, pass the deep-chain override to proceed"
        )));
    }
    let base = DensityHandle::for_index(alpha)?;
    let mut current = base.clone();
    for _ in 1..p {
        let live = compose_oriented(&base, &current)?;
        current = synthesize(&live)?;
    }
    Ok(current)
}

/// Tabulate a density over its automatic range and wrap the result as a handle.
pub fn synthesize(d: &DensityHandle) -> Result<DensityHandle> {
    let range = auto_range(d.alpha().value());
    let mut nodes = DEFAULT_NODES;
    loop {
        match tabulate(d, nodes, range) {
            Ok(interp) => return DensityHandle::tabulated(d.chain(), interp),
            Err(LevyError::TabulationAccuracy { .. }) if nodes < 512 => nodes *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// `u = ln x` range covering all but a negligible share of the mass: the head
/// down to `exp(-c x^-rho) ~ e^-40`, the tail out to `x^-alpha ~ 1e-9`.
pub fn auto_range(alpha: f64) -> (f64, f64) {
    let rho = alpha / (1.0 - alpha);
    let c = (1.0 - alpha) * alpha.powf(rho);
    let lo = ((c / 40.0).ln() / rho).min(DEFAULT_U_RANGE.0);
    let hi = (9.0 * std::f64::consts::LN_10 / alpha).max(DEFAULT_U_RANGE.1);
    (lo, hi)
}

/// Chebyshev fit of `ln g` on `u in u_range`; node evaluations run in parallel.
pub fn tabulate(d: &DensityHandle, nodes: usize, u_range: (f64, f64)) -> Result<ChebLogInterpolant> {
    if nodes < 32 {
        return Err(LevyError::Config(format!("tabulation needs at least 32 nodes, got {nodes}")));
    }
    let (lo, hi) = u_range;
    let us = cheb_nodes(nodes, lo, hi);
    let ln_at = |u: f64| -> Result<f64> {
        let x = u.exp();
        let v = d.ln_pdf(x).map_err(|e| LevyError::Tabulation { x, detail: e.to_string() })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LevyError::Tabulation { x, detail: format!("ln g = {v}") })
        }
    };
    let values: Vec<f64> = us.par_iter().map(|&u| ln_at(u)).collect::<Result<_>>()?;
    let interp = ChebLogInterpolant::from_node_values(lo, hi, &values)?;

    // checkpoints midway between neighbouring nodes
    let stride = (nodes / 32).max(1);
    let checks: Vec<f64> = (0..nodes - 1).step_by(stride).map(|j| 0.5 * (us[j] + us[j + 1])).collect();
    let errs: Vec<f64> = checks
        .par_iter()
        .map(|&u| Ok((interp.ln_eval(u) - ln_at(u)?).exp_m1().abs()))
        .collect::<Result<_>>()?;
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    if worst > TABULATION_BOUND {
        return Err(LevyError::TabulationAccuracy { achieved: worst, bound: TABULATION_BOUND, nodes });
    }
    Ok(interp)
}

/// Unit-mass Gaussian of width [`BUMP_WIDTH`] centred at `t0`; stands in for a
/// point mass, with an `O(width^2)` bias in anything smooth it is integrated against.
pub fn narrow_bump(t0: f64) -> impl Fn(f64) -> f64 + Sync {
    let w = BUMP_WIDTH;
    move |t: f64| {
        let z = (t - t0) / w;
        (-0.5 * z * z).exp() / (w * (2.0 * std::f64::consts::PI).sqrt())
    }
}
