//! Upper incomplete gamma at order zero, `Gamma(0, x) = E1(x) = -Ei(-x)`.

use crate::error::{LevyError, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 500;

/// `Gamma(0, x)` for `x > 0`.
pub fn gamma0_incomplete(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LevyError::domain("gamma0_incomplete", format!("argument {x} must be positive and finite")));
    }
    if x <= 1.0 {
        Ok(series(x))
    } else {
        Ok(continued_fraction_scaled(x) * (-x).exp())
    }
}

/// `e^x Gamma(0, x)`, which stays representable for large `x`.
pub fn gamma0_incomplete_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LevyError::domain("gamma0_incomplete", format!("argument {x} must be positive and finite")));
    }
    if x <= 1.0 {
        Ok(series(x) * x.exp())
    } else {
        Ok(continued_fraction_scaled(x))
    }
}

// E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
fn series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz on e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
fn continued_fraction_scaled(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
