//! `arccos(w)/sqrt(1-w^2)` continued analytically through `w = 1`.

use crate::error::{LevyError, Result};

const SERIES_RADIUS: f64 = 1e-4;

/// `arccos(w)/sqrt(1-w^2)` for `w < 1`, `arccosh(w)/sqrt(w^2-1)` for `w > 1`, 1 at `w = 1`.
pub fn arc_ratio(w: f64) -> Result<f64> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(LevyError::domain("arc_ratio", format!("argument {w} must be positive and finite")));
    }
    let d = w - 1.0;
    if d.abs() < SERIES_RADIUS {
        // coefficients c_n = (-2)^n (n!)^2 / (2n+1)!, c_n / c_{n-1} = -n / (2n+1)
        let mut c = 1.0;
        let mut pow = 1.0;
        let mut sum = 1.0;
        for n in 1..8 {
            let n = n as f64;
            c *= -n / (2.0 * n + 1.0);
            pow *= d;
            sum += c * pow;
        }
        return Ok(sum);
    }
    if w < 1.0 {
        Ok(w.acos() / ((1.0 - w) * (1.0 + w)).sqrt())
    } else {
        Ok(w.acosh() / ((w - 1.0) * (w + 1.0)).sqrt())
    }
}
