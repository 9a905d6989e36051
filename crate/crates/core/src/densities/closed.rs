//! The five closed-form one-sided stable densities.
//!
//! | alpha | primary evaluation                         | cross-check            |
//! |-------|--------------------------------------------|------------------------|
//! | 1/2   | elementary                                 |                        |
//! | 1/3   | `K_{1/3}` form                             | Airy form              |
//! | 2/3   | two `1F1` terms; `K` form when they cancel | `1F1` in multiprecision|
//! | 1/4   | three `0F2` terms, integral below 0.01     |                        |
//! | 1/6   | five `0F4` terms, integral below 0.02      |                        |

use std::f64::consts::PI;

use astro_float::BigFloat;

use crate::error::{LevyError, Result};
use crate::quad::{integrate, QuadPlan};
use crate::specfun::mp::{self, RM};
use crate::specfun::{airy_ai, bessel_k_scaled, gamma, hyper_pfq, HyperParams, Ratio};

use super::StableIndex;

/// Below this `x` the `0F2` sum for `g_{1/4}` is replaced by its integral form.
pub const QUARTER_SWITCH: f64 = 0.01;
/// Below this `x` the `0F4` sum for `g_{1/6}` is replaced by its integral form.
pub const SIXTH_SWITCH: f64 = 0.02;
/// Series results with a larger estimated relative error are not used.
const SERIES_TOL: f64 = 1e-13;
/// Tiny negative values from cancellation down to this size are clamped to zero.
const NEGATIVE_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    Half,
    Third,
    TwoThirds,
    Quarter,
    Sixth,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 5] =
        [ClosedForm::Half, ClosedForm::Third, ClosedForm::TwoThirds, ClosedForm::Quarter, ClosedForm::Sixth];

    pub fn from_index(alpha: StableIndex) -> Result<Self> {
        match (alpha.l(), alpha.k()) {
            (1, 2) => Ok(ClosedForm::Half),
            (1, 3) => Ok(ClosedForm::Third),
            (2, 3) => Ok(ClosedForm::TwoThirds),
            (1, 4) => Ok(ClosedForm::Quarter),
            (1, 6) => Ok(ClosedForm::Sixth),
            _ => Err(LevyError::UnsupportedIndex(alpha.to_string())),
        }
    }

    pub fn index(self) -> StableIndex {
        let (l, k) = match self {
            ClosedForm::Half => (1, 2),
            ClosedForm::Third => (1, 3),
            ClosedForm::TwoThirds => (2, 3),
            ClosedForm::Quarter => (1, 4),
            ClosedForm::Sixth => (1, 6),
        };
        StableIndex::new(l, k).expect("table entries are valid")
    }

    pub fn alpha(self) -> f64 {
        self.index().value()
    }
}

/// `g_alpha(x)` for one of the closed forms.
pub fn eval_closed(which: ClosedForm, x: f64) -> Result<f64> {
    check_x(x)?;
    let v = match which {
        ClosedForm::Half => g_half(x),
        ClosedForm::Third => g_third_bessel(x)?,
        ClosedForm::TwoThirds => g_two_thirds(x)?,
        ClosedForm::Quarter => g_quarter(x)?,
        ClosedForm::Sixth => g_sixth(x)?,
    };
    clamp(v, x)
}

/// `ln g_alpha(x)`; stays finite where the density underflows for the
/// elementary and Bessel forms.
pub fn ln_closed(which: ClosedForm, x: f64) -> Result<f64> {
    check_x(x)?;
    match which {
        ClosedForm::Half => Ok(-0.25 / x - (2.0 * PI.sqrt()).ln() - 1.5 * x.ln()),
        ClosedForm::Third => {
            let z = third_arg(x);
            Ok(bessel_k_scaled(1.0 / 3.0, z)?.ln() - z - (3.0 * PI).ln() - 1.5 * x.ln())
        }
        ClosedForm::TwoThirds => ln_two_thirds_bessel(x),
        _ => Ok(eval_closed(which, x)?.ln()),
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LevyError::domain("eval_closed", format!("x = {x} must be positive and finite")));
    }
    Ok(())
}

fn clamp(v: f64, x: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= NEGATIVE_FLOOR {
        Ok(0.0)
    } else {
        Err(LevyError::domain("eval_closed", format!("density {v:e} at x = {x} is negative beyond round-off")))
    }
}

/// `exp(-1/(4x)) / (2 sqrt(pi) x^{3/2})`.
pub fn g_half(x: f64) -> f64 {
    (-0.25 / x).exp() / (2.0 * PI.sqrt() * x * x.sqrt())
}

fn third_arg(x: f64) -> f64 {
    2.0 / (3.0 * (3.0 * x).sqrt())
}

/// `K_{1/3}(2 / (3 sqrt(3x))) / (3 pi x^{3/2})`.
pub fn g_third_bessel(x: f64) -> Result<f64> {
    let z = third_arg(x);
    Ok(bessel_k_scaled(1.0 / 3.0, z)? * (-z).exp() / (3.0 * PI * x * x.sqrt()))
}

/// `Ai((3x)^{-1/3}) / (3 x^4)^{1/3}`.
pub fn g_third_airy(x: f64) -> Result<f64> {
    Ok(airy_ai((3.0 * x).cbrt().recip())? / (3.0 * x.powi(4)).cbrt())
}

fn two_thirds_arg(x: f64) -> f64 {
    2.0 / (27.0 * x * x)
}

/// Bessel form: `2 sqrt(3) / (27 pi x^3) e^{-z} (K_{1/3}(z) + K_{2/3}(z))`, `z = 2/(27 x^2)`.
pub fn g_two_thirds_bessel(x: f64) -> Result<f64> {
    Ok(ln_two_thirds_bessel(x)?.exp())
}

fn ln_two_thirds_bessel(x: f64) -> Result<f64> {
    let z = two_thirds_arg(x);
    // e^{-z} K(z) = e^{-2z} (e^z K(z))
    let scaled = bessel_k_scaled(1.0 / 3.0, z)? + bessel_k_scaled(2.0 / 3.0, z)?;
    Ok((2.0 * 3f64.sqrt() / (27.0 * PI)).ln() - 3.0 * x.ln() - 2.0 * z + scaled.ln())
}

/// Kummer form in binary64. `None` when the two terms or either series
/// cancel too heavily to certify [`SERIES_TOL`].
pub fn g_two_thirds_kummer(x: f64) -> Result<Option<f64>> {
    let y = -4.0 / (27.0 * x * x);
    let f1 = hyper_pfq(&HyperParams::from_ratios(&[Ratio::new(5, 6)], &[Ratio::new(2, 3)], y)?, SERIES_TOL)?;
    let f2 = hyper_pfq(&HyperParams::from_ratios(&[Ratio::new(7, 6)], &[Ratio::new(4, 3)], y)?, SERIES_TOL)?;
    let g23 = gamma(2.0 / 3.0)?;
    let a = g23 / (3f64.sqrt() * PI) * x.powf(-5.0 / 3.0) * f1.value;
    let b = 2.0 / 9.0 / g23 * x.powf(-7.0 / 3.0) * f2.value;
    let sum = a + b;
    let err = a.abs() * (f1.est_rel_error + 4.0 * f64::EPSILON) + b.abs() * (f2.est_rel_error + 4.0 * f64::EPSILON);
    if f1.converged && f2.converged && err <= SERIES_TOL * sum.abs() {
        Ok(Some(sum))
    } else {
        Ok(None)
    }
}

/// `ln g_{2/3}(x)` from the Kummer form summed entirely in multiprecision,
/// with enough bits to absorb the cancellation between its two terms.
pub fn ln_two_thirds_kummer_mp(x: f64) -> Result<f64> {
    check_x(x)?;
    let mut cc = mp::consts()?;
    let y = 4.0 / (27.0 * x * x);
    // the two terms cancel down to ~ e^{-y}
    let bits = 96 + (y * std::f64::consts::LOG2_E).ceil() as usize;
    let p = bits + 64;
    let xb = BigFloat::from_f64(x, p);
    let z = BigFloat::from_i64(-4, p).div(&BigFloat::from_i64(27, p).mul(&xb, p, RM).mul(&xb, p, RM), p, RM);
    let (f1, _, _) = mp::hyper_pfq_big(&[Ratio::new(5, 6)], &[Ratio::new(2, 3)], &z, p)?;
    let (f2, _, _) = mp::hyper_pfq_big(&[Ratio::new(7, 6)], &[Ratio::new(4, 3)], &z, p)?;
    let g23 = mp::gamma_two_thirds(p, &mut cc);
    let pi = cc.pi(p, RM);
    let root3 = BigFloat::from_i64(3, p).sqrt(p, RM);
    let cbrt_x = xb.cbrt(p, RM);
    // x^{-5/3} = 1 / (x cbrt(x)^2), x^{-7/3} = 1 / (x^2 cbrt(x))
    let x53 = xb.mul(&cbrt_x, p, RM).mul(&cbrt_x, p, RM);
    let x73 = xb.mul(&xb, p, RM).mul(&cbrt_x, p, RM);
    let a = g23.mul(&f1, p, RM).div(&root3.mul(&pi, p, RM).mul(&x53, p, RM), p, RM);
    let b = BigFloat::from_i64(2, p).mul(&f2, p, RM).div(&BigFloat::from_i64(9, p).mul(&g23, p, RM).mul(&x73, p, RM), p, RM);
    let sum = a.add(&b, p, RM);
    if !sum.is_positive() {
        return Err(LevyError::domain("ln_two_thirds_kummer_mp", format!("non-positive sum at x = {x}")));
    }
    mp::ln_to_f64(&sum, &mut cc)
}

/// Beyond this `4/(27x^2)` the Kummer terms cancel past certification
/// (observed limit near 4); the attempt is skipped rather than summed.
const KUMMER_MAX_ARG: f64 = 8.0;

fn g_two_thirds(x: f64) -> Result<f64> {
    if 4.0 / (27.0 * x * x) > KUMMER_MAX_ARG {
        return g_two_thirds_bessel(x);
    }
    match g_two_thirds_kummer(x)? {
        Some(v) => Ok(v),
        None => g_two_thirds_bessel(x),
    }
}

fn series_term(denom: &[Ratio], y: f64, coeff: f64) -> Result<(f64, f64, bool)> {
    let r = hyper_pfq(&HyperParams::from_ratios(&[], denom, y)?, SERIES_TOL)?;
    let v = coeff * r.value;
    Ok((v, v.abs() * (r.est_rel_error + 4.0 * f64::EPSILON), r.converged))
}

fn sum_terms(terms: &[(f64, f64, bool)], what: &str, x: f64) -> Result<f64> {
    let sum: f64 = terms.iter().map(|t| t.0).sum();
    let err: f64 = terms.iter().map(|t| t.1).sum();
    if terms.iter().all(|t| t.2) && err <= 1e-11 * sum.abs().max(f64::MIN_POSITIVE) {
        Ok(sum)
    } else {
        Err(LevyError::domain(
            "eval_closed",
            format!("{what} series at x = {x} cannot be certified (error {err:e} against value {sum:e})"),
        ))
    }
}

/// Three-term `0F2` form of `g_{1/4}`.
pub fn g_quarter_series(x: f64) -> Result<f64> {
    let y = -1.0 / (256.0 * x);
    let g34 = gamma(0.75)?;
    let terms = [
        series_term(&[Ratio::new(5, 4), Ratio::new(3, 2)], y, g34 / (2f64.powf(3.5) * PI * x.powf(1.75)))?,
        series_term(&[Ratio::new(3, 4), Ratio::new(5, 4)], y, -1.0 / (4.0 * PI.sqrt() * x.powf(1.5)))?,
        series_term(&[Ratio::new(1, 2), Ratio::new(3, 4)], y, 1.0 / (4.0 * g34 * x.powf(1.25)))?,
    ];
    sum_terms(&terms, "g_1/4", x)
}

/// `g_{1/4}(x) = 1/(4 pi x^{3/2}) int_0^inf t^{-1/2} exp(-(t^2/(4x) + 1/(4t))) dt`.
pub fn g_quarter_integral(x: f64) -> Result<f64> {
    // peak of the exponent at t = x^{1/3} / 2^{1/3}... use it as the split
    let split = (0.5 * x).cbrt();
    let plan = QuadPlan::default().with_split(split).with_tols(1e-300, 1e-13);
    let r = integrate(|t| (-(t * t / (4.0 * x) + 0.25 / t)).exp() / t.sqrt(), &plan)?;
    Ok(r.certified()? / (4.0 * PI * x * x.sqrt()))
}

fn g_quarter(x: f64) -> Result<f64> {
    if x < QUARTER_SWITCH {
        g_quarter_integral(x)
    } else {
        g_quarter_series(x)
    }
}

/// Five-term `0F4` form of `g_{1/6}`.
pub fn g_sixth_series(x: f64) -> Result<f64> {
    let y = -1.0 / (46656.0 * x);
    let g23 = gamma(2.0 / 3.0)?;
    let sqrt_pi = PI.sqrt();
    let r = |a, b| Ratio::new(a, b);
    let terms = [
        series_term(
            &[r(1, 3), r(1, 2), r(2, 3), r(5, 6)],
            y,
            2f64.powf(-1.0 / 3.0) * 3f64.powf(-1.5) * sqrt_pi / (g23 * g23 * x.powf(7.0 / 6.0)),
        )?,
        series_term(&[r(1, 2), r(2, 3), r(5, 6), r(7, 6)], y, -1.0 / (6.0 * g23 * x.powf(4.0 / 3.0)))?,
        series_term(&[r(2, 3), r(5, 6), r(7, 6), r(4, 3)], y, 1.0 / (12.0 * sqrt_pi * x.powf(1.5)))?,
        series_term(
            &[r(5, 6), r(7, 6), r(4, 3), r(3, 2)],
            y,
            -(3f64.sqrt()) * g23 / (72.0 * PI * x.powf(5.0 / 3.0)),
        )?,
        series_term(
            &[r(7, 6), r(4, 3), r(3, 2), r(5, 3)],
            y,
            3f64.powf(-1.5) * g23 * g23 / (2f64.powf(17.0 / 3.0) * PI.powf(1.5) * x.powf(11.0 / 6.0)),
        )?,
    ];
    sum_terms(&terms, "g_1/6", x)
}

/// `g_{1/6}(x) = 1/(12 (pi x)^{3/2}) int_0^inf e^{-y/(4x)} y^{-3/4} K_{1/3}(b y^{-1/4}) dy`,
/// `b = 2/(3 sqrt 3)`.
pub fn g_sixth_integral(x: f64) -> Result<f64> {
    let b = 2.0 / (3.0 * 3f64.sqrt());
    // the exponent -y/(4x) - b y^{-1/4} peaks at y = (b x)^{4/5}
    let split = (b * x).powf(0.8);
    let plan = QuadPlan::default().with_split(split).with_tols(1e-300, 1e-13);
    let r = integrate(
        |y| {
            let q = y.powf(-0.25);
            let k = bessel_k_scaled(1.0 / 3.0, b * q).unwrap_or(f64::NAN);
            (-y / (4.0 * x) - b * q).exp() * q * q * q * k
        },
        &plan,
    )?;
    Ok(r.certified()? / (12.0 * (PI * x).powf(1.5)))
}

fn g_sixth(x: f64) -> Result<f64> {
    if x < SIXTH_SWITCH {
        g_sixth_integral(x)
    } else {
        g_sixth_series(x)
    }
}
