//! Double-exponential quadrature on `(0, inf)`.
//!
//! The half-line is split at `split_scale`. The piece `(0, s)` uses the
//! logistic map `t = s / (1 + exp(-pi sinh u))`, which clusters nodes
//! doubly exponentially at the origin, where the stable densities vanish
//! like `exp(-c t^-rho)`. The piece `(s, inf)` uses the exp-sinh map
//! `t = s (1 + exp(pi/2 sinh u))`; an algebraic tail `t^-(1+a)` then decays
//! like `exp(-a pi/4 e^u)` in `u`, so even slow tails are reached before
//! `t` overflows.
//!
//! Each piece is a trapezoid sum in `u` whose step is halved until two
//! successive levels agree. The range in `u` is extended outward until the
//! weighted samples are negligible; if the map runs out of representable `t`
//! first, the integral is reported as not converged (this is how
//! non-integrable tails such as `1/(1+t)` are caught).

use std::f64::consts::PI;

use crate::error::{LevyError, Result};

/// Integration strategy for `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPlan {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
    /// Breakpoint between the origin-dominated and tail-dominated pieces.
    pub split_scale: f64,
    /// Expected algebraic decay exponent of the integrand's tail.
    pub tail_decay_hint: f64,
    /// `(c, rho)` of an `exp(-c t^-rho)` suppression at the origin.
    pub origin_hint: Option<(f64, f64)>,
}

impl Default for QuadPlan {
    fn default() -> Self {
        QuadPlan {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 12,
            split_scale: 1.0,
            tail_decay_hint: 2.0,
            origin_hint: None,
        }
    }
}

impl QuadPlan {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(LevyError::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_depth < 1 {
            return Err(LevyError::Config("max_depth must be at least 1".into()));
        }
        if !(self.split_scale > 0.0) || !self.split_scale.is_finite() {
            return Err(LevyError::Config(format!("split_scale {} must be positive", self.split_scale)));
        }
        Ok(())
    }

    pub fn with_split(mut self, split_scale: f64) -> Self {
        self.split_scale = split_scale;
        self
    }

    pub fn with_tols(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    /// The value, or a quadrature error if it was not certified.
    pub fn certified(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(LevyError::Quadrature { value: self.value, est_error: self.est_error })
        }
    }
}

/// `int_0^inf f(t) dt`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, plan: &QuadPlan) -> Result<QuadResult> {
    plan.validate()?;
    let s = plan.split_scale;
    let head = Piece::new(&f, Map::Head(s), plan)?;
    let tail = Piece::new(&f, Map::Tail(s), plan)?;
    Ok(combine(head, tail, plan))
}

/// `int_a^b f(t) dt` for finite `0 <= a < b` by tanh-sinh, used where the
/// integrand is known to vanish outside a bounded interval.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, plan: &QuadPlan) -> Result<QuadResult> {
    plan.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(LevyError::Config(format!("bad interval [{a}, {b}]")));
    }
    let piece = Piece::new(&f, Map::Finite(a, b), plan)?;
    let zero = Piece { value: 0.0, err: 0.0, evals: 0, ok: true };
    Ok(combine(piece, zero, plan))
}

/// `int_0^inf f(t) dt` for an integrand concentrated on `[a, b]`: DE on
/// `(0, a)` and `(b, inf)`, tanh-sinh in `ln t` on `[a, b]`.
pub fn integrate_bracketed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, plan: &QuadPlan) -> Result<QuadResult> {
    plan.validate()?;
    if !(0.0 < a && a < b) || !b.is_finite() {
        return Err(LevyError::Config(format!("bad bracket [{a}, {b}]")));
    }
    let head = Piece::new(&f, Map::Head(a), plan)?;
    let mid = Piece::new(&f, Map::LogFinite(a.ln(), b.ln()), plan)?;
    let tail = Piece::new(&f, Map::Tail(b), plan)?;
    Ok(combine_all(&[head, mid, tail], plan))
}

fn combine(a: Piece, b: Piece, plan: &QuadPlan) -> QuadResult {
    combine_all(&[a, b], plan)
}

fn combine_all(pieces: &[Piece], plan: &QuadPlan) -> QuadResult {
    let value: f64 = pieces.iter().map(|p| p.value).sum();
    let est_error: f64 = pieces.iter().map(|p| p.err).sum();
    let bound = plan.abs_tol.max(plan.rel_tol * value.abs());
    QuadResult {
        value,
        est_error,
        evaluations: pieces.iter().map(|p| p.evals).sum(),
        converged: pieces.iter().all(|p| p.ok) && est_error <= bound,
    }
}

#[derive(Clone, Copy)]
enum Map {
    Head(f64),
    Tail(f64),
    Finite(f64, f64),
    /// `[e^a, e^b]` by tanh-sinh in `ln t`.
    LogFinite(f64, f64),
}

enum Node {
    At(f64, f64),
    /// `t` rounded onto a finite endpoint; only the weight is meaningful.
    Collapsed(f64),
    /// `t` overflowed.
    Exhausted,
}

impl Map {
    /// Node and weight `dt/du` at `u`.
    fn node(self, u: f64) -> Node {
        match self {
            Map::Head(s) => {
                let v = PI * u.sinh();
                // sigma(v) = 1/(1+e^-v); weight s sigma (1-sigma) pi cosh u
                let (sig, one_minus) = if v >= 0.0 {
                    let e = (-v).exp();
                    (1.0 / (1.0 + e), e / (1.0 + e))
                } else {
                    let e = v.exp();
                    (e / (1.0 + e), 1.0 / (1.0 + e))
                };
                // t may round onto s, an interior point of the half-line
                let t = (s * sig).min(s);
                let w = s * sig * one_minus * PI * u.cosh();
                if t > 0.0 {
                    Node::At(t, w)
                } else {
                    Node::Collapsed(w)
                }
            }
            Map::Tail(s) => {
                let e = (0.5 * PI * u.sinh()).exp();
                let t = s * (1.0 + e);
                let w = s * e * 0.5 * PI * u.cosh();
                if !t.is_finite() || !w.is_finite() {
                    Node::Exhausted
                } else {
                    Node::At(t, w)
                }
            }
            Map::Finite(a, b) => {
                let half = 0.5 * (b - a);
                let v = 0.5 * PI * u.sinh();
                let ch = v.cosh();
                let w = half * 0.5 * PI * u.cosh() / (ch * ch);
                // distance to the nearer endpoint, computed without cancellation
                let gap = half / (v.abs().exp() * ch);
                let t = if u < 0.0 { a + gap } else { b - gap };
                if t > a && t < b && w.is_finite() {
                    Node::At(t, w)
                } else {
                    Node::Collapsed(if w.is_finite() { w } else { 0.0 })
                }
            }
            Map::LogFinite(a, b) => match Map::Finite(a, b).node(u) {
                Node::At(v, w) => {
                    let t = v.exp();
                    Node::At(t, w * t)
                }
                Node::Collapsed(w) => Node::Collapsed(w * if u < 0.0 { a.exp() } else { b.exp() }),
                Node::Exhausted => Node::Exhausted,
            },
        }
    }
}

struct Piece {
    value: f64,
    err: f64,
    evals: usize,
    ok: bool,
}

const H0: f64 = 0.5;
const NEGLIGIBLE: f64 = 1e-20;
const QUIET_RUN: usize = 4;
const U_LIMIT: f64 = 12.0;

enum Sample {
    Value(f64),
    /// Node lost to rounding; the estimate `w |f|` uses the last seen `|f|`.
    Collapsed(f64),
    Exhausted,
}

impl Piece {
    fn new<F: Fn(f64) -> f64>(f: &F, map: Map, plan: &QuadPlan) -> Result<Piece> {
        let mut evals = 0usize;
        let mut last_f = 0.0f64;
        let mut eval = |u: f64| -> Result<Sample> {
            match map.node(u) {
                Node::Exhausted => Ok(Sample::Exhausted),
                Node::Collapsed(w) => Ok(Sample::Collapsed(w * last_f)),
                Node::At(t, w) => {
                    evals += 1;
                    let y = f(t);
                    if !y.is_finite() {
                        return Err(LevyError::NonFinite { at: t, value: y });
                    }
                    last_f = y.abs();
                    Ok(Sample::Value(w * y))
                }
            }
        };

        // Level 0: walk outward from u = 0 until the samples fall silent.
        let center = match eval(0.0)? {
            Sample::Value(v) => v,
            _ => 0.0,
        };
        let mut sum = center;
        let mut abs_sum = center.abs();
        let mut scale = center.abs();
        let mut reach = [0usize; 2];
        let mut clean = true;
        for (side, dir) in [(0usize, 1.0f64), (1, -1.0)] {
            let mut quiet = 0;
            let mut j = 1usize;
            loop {
                let u = dir * H0 * j as f64;
                if u.abs() > U_LIMIT {
                    clean = false;
                    break;
                }
                let v = match eval(u)? {
                    Sample::Exhausted => {
                        if quiet == 0 {
                            clean = false;
                        }
                        break;
                    }
                    Sample::Collapsed(est) => {
                        if est > NEGLIGIBLE * scale {
                            clean = false;
                        }
                        break;
                    }
                    Sample::Value(v) => v,
                };
                sum += v;
                abs_sum += v.abs();
                scale = scale.max(v.abs());
                if v.abs() <= NEGLIGIBLE * scale {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                reach[side] = j;
                if quiet >= QUIET_RUN {
                    break;
                }
                j += 1;
            }
        }
        if scale == 0.0 {
            // integrand vanished at every probe
            return Ok(Piece { value: 0.0, err: 0.0, evals, ok: clean });
        }

        let mut h = H0;
        let mut prev = sum * h;
        let mut err = f64::INFINITY;
        let mut value = prev;
        let mut ok = false;
        let u_hi = reach[0] as f64 * H0;
        let u_lo = -(reach[1] as f64) * H0;
        for _level in 1..=plan.max_depth {
            h *= 0.5;
            let mut u = u_lo + h;
            while u < u_hi {
                if let Sample::Value(v) = eval(u)? {
                    sum += v;
                    abs_sum += v.abs();
                }
                u += 2.0 * h;
            }
            value = sum * h;
            let rounding = 64.0 * f64::EPSILON * abs_sum * h;
            err = 4.0 * (value - prev).abs() + rounding;
            prev = value;
            // the piece gets half of the overall budget
            let bound = 0.5 * plan.abs_tol.max(plan.rel_tol * value.abs());
            if err <= bound {
                ok = true;
                break;
            }
        }
        Ok(Piece { value, err, evals, ok: ok && clean })
    }
}

/// Quadrature plan for integrands shaped like the stable density `g_alpha`:
/// split near its mode, tail exponent `1 + alpha`, origin suppression
/// `exp(-c x^-rho)` with `rho = alpha/(1-alpha)`.
///
/// With `p_damping = Some(p)` the split moves to the smaller of the mode and `1/p`.
pub fn plan_for_density(alpha: f64, p_damping: Option<f64>) -> QuadPlan {
    let rho = alpha / (1.0 - alpha);
    let c = (1.0 - alpha) * alpha.powf(rho);
    let mode = approx_mode(alpha);
    let split = match p_damping {
        Some(p) if p > 0.0 => mode.min(1.0 / p).max(mode * 1e-3),
        _ => mode,
    };
    QuadPlan {
        split_scale: split,
        tail_decay_hint: 1.0 + alpha,
        origin_hint: Some((c, rho)),
        ..QuadPlan::default()
    }
}

/// Mode of the small-`x` saddle-point form
/// `x^-a exp(-c x^-rho)`, `a = (2-alpha)/(2(1-alpha))`; exact at `alpha = 1/2`.
pub fn approx_mode(alpha: f64) -> f64 {
    let rho = alpha / (1.0 - alpha);
    let c = (1.0 - alpha) * alpha.powf(rho);
    let a = (2.0 - alpha) / (2.0 * (1.0 - alpha));
    (c * rho / a).powf(1.0 / rho)
}

/// Locate the maximiser of `f` on a log grid around `guess`, then refine by
/// golden-section search in `ln x`.
pub fn locate_mode<F: Fn(f64) -> f64>(f: F, guess: f64) -> f64 {
    let lo = guess.ln() - 3.0 * std::f64::consts::LN_10;
    let n = 61;
    let step = 6.0 * std::f64::consts::LN_10 / (n - 1) as f64;
    let mut best = (f64::NEG_INFINITY, lo);
    for i in 0..n {
        let u = lo + step * i as f64;
        let v = f(u.exp());
        if v > best.0 {
            best = (v, u);
        }
    }
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c.exp()) > f(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    (0.5 * (a + b)).exp()
}
