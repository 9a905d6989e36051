//! Generalized hypergeometric series `pFq(a_1..a_p; b_1..b_q; z)`.
//!
//! Terms are generated by the ratio recurrence
//! `t_{n+1} / t_n = prod(a_i + n) / prod(b_j + n) * z / (n + 1)`.
//! Summation stops once three consecutive terms are below the target relative
//! size and a geometric bound on the remaining tail is also below it.
//!
//! Alternating series with a large argument lose digits to cancellation. The
//! loss is tracked as the ratio of the largest partial-sum magnitude to the
//! final value and folded into `est_rel_error`. When that ratio exceeds
//! [`CANCELLATION_FALLBACK`] the series is re-summed in double-double
//! arithmetic.

use twofloat::TwoFloat;

use crate::error::{LevyError, Result};

/// Cancellation factor above which the double-double path is taken.
pub const CANCELLATION_FALLBACK: f64 = 1e6;

const MAX_TERMS: usize = 20_000;
const STOP_RUN: usize = 3;
const DD_EPS: f64 = 1e-31;

/// A rational parameter `num / den`, kept exact for the double-double path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub const fn new(num: i64, den: i64) -> Self {
        Ratio { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self + n` in double-double precision.
    fn shifted_dd(self, n: usize) -> TwoFloat {
        // num + n*den is an exact integer in binary64 for the sizes used here.
        let top = self.num as f64 + n as f64 * self.den as f64;
        TwoFloat::from(top) / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    pub numer: Vec<f64>,
    pub denom: Vec<f64>,
    pub arg: f64,
    exact: Option<(Vec<Ratio>, Vec<Ratio>)>,
}

impl HyperParams {
    pub fn new(numer: Vec<f64>, denom: Vec<f64>, arg: f64) -> Result<Self> {
        let params = HyperParams { numer, denom, arg, exact: None };
        params.validate()?;
        Ok(params)
    }

    /// Parameters given as exact rationals; the double-double fallback then
    /// sees no representation error in `a_i + n` or `b_j + n`.
    pub fn from_ratios(numer: &[Ratio], denom: &[Ratio], arg: f64) -> Result<Self> {
        let params = HyperParams {
            numer: numer.iter().map(|r| r.value()).collect(),
            denom: denom.iter().map(|r| r.value()).collect(),
            arg,
            exact: Some((numer.to_vec(), denom.to_vec())),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn p(&self) -> usize {
        self.numer.len()
    }

    pub fn q(&self) -> usize {
        self.denom.len()
    }

    fn validate(&self) -> Result<()> {
        if !self.arg.is_finite() {
            return Err(LevyError::domain("hyper_pfq", "argument is not finite"));
        }
        if let Some(b) = self.denom.iter().find(|&&b| b <= 0.0 && b == b.floor()) {
            return Err(LevyError::domain(
                "hyper_pfq",
                format!("lower parameter {b} is zero or a negative integer"),
            ));
        }
        if self.p() > self.q() + 1 {
            return Err(LevyError::domain(
                "hyper_pfq",
                format!("p = {} exceeds q + 1 = {}; series diverges", self.p(), self.q() + 1),
            ));
        }
        if self.p() == self.q() + 1 && self.arg.abs() >= 1.0 {
            return Err(LevyError::domain(
                "hyper_pfq",
                "p = q + 1 needs |z| < 1 for the series to converge",
            ));
        }
        Ok(())
    }

    /// `t_{n+1} / t_n` in binary64.
    fn ratio(&self, n: usize) -> f64 {
        let n = n as f64;
        let up: f64 = self.numer.iter().map(|a| a + n).product();
        let down: f64 = self.denom.iter().map(|b| b + n).product();
        up / down * self.arg / (n + 1.0)
    }

    fn ratio_dd(&self, n: usize) -> TwoFloat {
        let mut r = TwoFloat::from(self.arg) / (n as f64 + 1.0);
        match &self.exact {
            Some((num, den)) => {
                for a in num {
                    r *= a.shifted_dd(n);
                }
                for b in den {
                    r = dd_div(r, b.shifted_dd(n));
                }
            }
            None => {
                for a in &self.numer {
                    r *= TwoFloat::new_add(*a, n as f64);
                }
                for b in &self.denom {
                    r = dd_div(r, TwoFloat::new_add(*b, n as f64));
                }
            }
        }
        r
    }

    /// Upper bound for |t_{m+1}/t_m| over all m > n, valid once n is past
    /// every parameter (the ratio magnitude then decreases monotonically for
    /// p <= q and tends to |z| from below or above for p = q + 1).
    fn tail_ratio_bound(&self, n: usize) -> Option<f64> {
        let largest = self
            .numer
            .iter()
            .chain(self.denom.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if (n as f64) < largest + 1.0 {
            return None;
        }
        let r = self.ratio(n + 1).abs();
        let bound = if self.p() == self.q() + 1 { r.max(self.arg.abs()) } else { r };
        (bound < 1.0).then_some(bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub est_rel_error: f64,
    pub converged: bool,
}

/// Sums `pFq` to the requested relative tolerance.
///
/// A result that could not be certified comes back with `converged == false`
/// and an honest `est_rel_error`; it is never silently wrong.
pub fn hyper_pfq(params: &HyperParams, target_rel_tol: f64) -> Result<SeriesResult> {
    if !(target_rel_tol > 0.0) {
        return Err(LevyError::Config(format!("target_rel_tol must be positive, got {target_rel_tol}")));
    }
    let fast = sum_f64(params, target_rel_tol);
    if fast.cancellation <= CANCELLATION_FALLBACK {
        return Ok(fast.finish(f64::EPSILON, target_rel_tol));
    }
    let slow = sum_dd(params, target_rel_tol);
    let eps = if params.exact.is_some() { DD_EPS } else { f64::EPSILON };
    Ok(slow.finish(eps, target_rel_tol))
}

struct Partial {
    value: f64,
    terms: usize,
    tail_rel: f64,
    cancellation: f64,
}

impl Partial {
    fn finish(self, eps: f64, tol: f64) -> SeriesResult {
        let est = self.tail_rel + (1.0 + self.cancellation) * eps;
        SeriesResult {
            value: self.value,
            terms_used: self.terms,
            est_rel_error: est,
            converged: est <= tol,
        }
    }
}

fn sum_f64(params: &HyperParams, tol: f64) -> Partial {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut largest = 1.0f64;
    let mut run = 0;
    for n in 0..MAX_TERMS {
        let ratio = params.ratio(n);
        let prev = term;
        term *= ratio;
        debug_assert!(
            prev == 0.0 || term == 0.0 || !term.is_normal() || (term / prev - ratio).abs() <= 4.0 * f64::EPSILON * ratio.abs(),
            "term recurrence violated at n = {n}"
        );
        sum += term;
        largest = largest.max(sum.abs()).max(term.abs());
        if term == 0.0 {
            // terminating series (a numerator parameter hit a non-positive integer)
            return Partial { value: sum, terms: n + 2, tail_rel: 0.0, cancellation: cancel(largest, sum) };
        }
        if term.abs() <= tol * sum.abs() {
            run += 1;
        } else {
            run = 0;
        }
        if run >= STOP_RUN {
            if let Some(r) = params.tail_ratio_bound(n) {
                let tail = term.abs() * r / (1.0 - r);
                if tail <= tol * sum.abs() {
                    return Partial {
                        value: sum,
                        terms: n + 2,
                        tail_rel: tail / sum.abs(),
                        cancellation: cancel(largest, sum),
                    };
                }
            }
        }
    }
    Partial {
        value: sum,
        terms: MAX_TERMS + 1,
        tail_rel: f64::INFINITY,
        cancellation: cancel(largest, sum),
    }
}

fn sum_dd(params: &HyperParams, tol: f64) -> Partial {
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    let mut largest = 1.0f64;
    let mut run = 0;
    for n in 0..MAX_TERMS {
        term *= params.ratio_dd(n);
        sum += term;
        let t = term.hi().abs();
        let s = sum.hi();
        largest = largest.max(s.abs()).max(t);
        if t == 0.0 {
            return Partial { value: s + sum.lo(), terms: n + 2, tail_rel: 0.0, cancellation: cancel(largest, s) };
        }
        if t <= tol * s.abs() {
            run += 1;
        } else {
            run = 0;
        }
        if run >= STOP_RUN {
            if let Some(r) = params.tail_ratio_bound(n) {
                let tail = t * r / (1.0 - r);
                if tail <= tol * s.abs() {
                    return Partial {
                        value: s + sum.lo(),
                        terms: n + 2,
                        tail_rel: tail / s.abs(),
                        cancellation: cancel(largest, s),
                    };
                }
            }
        }
    }
    Partial {
        value: sum.hi() + sum.lo(),
        terms: MAX_TERMS + 1,
        tail_rel: f64::INFINITY,
        cancellation: cancel(largest, sum.hi()),
    }
}

// twofloat's own TwoFloat / TwoFloat quotient is only good to binary64;
// two correction steps of long division restore the full width.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

fn cancel(largest: f64, sum: f64) -> f64 {
    if sum == 0.0 {
        f64::INFINITY
    } else {
        largest / sum.abs()
    }
}
