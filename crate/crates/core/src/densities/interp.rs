//! Chebyshev interpolant of `ln g` against `u = ln x`, with a power-law tail
//! beyond `u_hi` and a stretched-exponential head below `u_lo`.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};

const FIT_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebLogInterpolant {
    pub u_lo: f64,
    pub u_hi: f64,
    pub coeffs: Vec<f64>,
    /// `g ~ x^{-tail_exponent}` beyond `u_hi`.
    pub tail_exponent: f64,
    /// Below `u_lo`, `ln g = ln g(x_lo) - c (x^{-rho} - x_lo^{-rho})`, with `rho`
    /// fitted over the first decade and `c` matching the slope at `u_lo`.
    /// `rho = 0` means the head is algebraic with slope `c` in `u`.
    pub origin_c: f64,
    pub origin_rho: f64,
}

/// Chebyshev points of the first kind mapped onto `[u_lo, u_hi]`, highest first.
pub fn cheb_nodes(n: usize, u_lo: f64, u_hi: f64) -> Vec<f64> {
    let (mid, half) = (0.5 * (u_hi + u_lo), 0.5 * (u_hi - u_lo));
    (0..n).map(|j| mid + half * (PI * (j as f64 + 0.5) / n as f64).cos()).collect()
}

impl ChebLogInterpolant {
    /// Fit from `ln g` sampled at [`cheb_nodes`]`(values.len(), u_lo, u_hi)`.
    pub fn from_node_values(u_lo: f64, u_hi: f64, values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 8 {
            return Err(LevyError::Config(format!("{n} nodes; at least 8 are needed")));
        }
        if !(u_lo < u_hi) || !u_lo.is_finite() || !u_hi.is_finite() {
            return Err(LevyError::Config(format!("bad interpolation range [{u_lo}, {u_hi}]")));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let u = cheb_nodes(n, u_lo, u_hi)[j];
            return Err(LevyError::Tabulation { x: u.exp(), detail: format!("ln g = {v}") });
        }
        let mut coeffs = vec![0.0; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in values.iter().enumerate() {
                s += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        let mut out = ChebLogInterpolant { u_lo, u_hi, coeffs, tail_exponent: 0.0, origin_c: 0.0, origin_rho: 0.0 };
        out.fit_extrapolations();
        Ok(out)
    }

    fn fit_extrapolations(&mut self) {
        let width = (self.u_hi - self.u_lo).min(LN_10);
        let (mut su, mut sv, mut suu, mut suv) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..FIT_POINTS {
            let u = self.u_hi - width * i as f64 / (FIT_POINTS - 1) as f64;
            let v = self.interior(u);
            su += u;
            sv += v;
            suu += u * u;
            suv += u * v;
        }
        let m = FIT_POINTS as f64;
        self.tail_exponent = -(m * suv - su * sv) / (m * suu - su * su);

        // d ln g / du = c rho e^{-rho u}: a line in (u, ln D)
        let mut pts = Vec::with_capacity(FIT_POINTS);
        for i in 0..FIT_POINTS {
            let u = self.u_lo + width * i as f64 / (FIT_POINTS - 1) as f64;
            pts.push((u, self.interior_slope(u)));
        }
        if pts.iter().all(|p| p.1 > 0.0) {
            let (mut su, mut sv, mut suu, mut suv) = (0.0, 0.0, 0.0, 0.0);
            for &(u, d) in &pts {
                let v = d.ln();
                su += u;
                sv += v;
                suu += u * u;
                suv += u * v;
            }
            let rho = -(m * suv - su * sv) / (m * suu - su * su);
            if rho > 0.0 {
                // c from the slope at the seam, so the head joins with a continuous derivative
                self.origin_rho = rho;
                self.origin_c = pts[0].1 * (rho * self.u_lo).exp() / rho;
                return;
            }
        }
        self.origin_rho = 0.0;
        self.origin_c = self.interior_slope(self.u_lo);
    }

    fn t_of(&self, u: f64) -> f64 {
        (2.0 * u - self.u_lo - self.u_hi) / (self.u_hi - self.u_lo)
    }

    fn interior(&self, u: f64) -> f64 {
        let t = self.t_of(u).clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    fn interior_slope(&self, u: f64) -> f64 {
        // derivative coefficients: d_{k-1} = d_{k+1} + 2k c_k
        let n = self.coeffs.len();
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        let t = self.t_of(u).clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in d[..n - 1].iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        (t * b1 - b2 + d[0]) * 2.0 / (self.u_hi - self.u_lo)
    }

    /// `ln g` at `u = ln x`.
    pub fn ln_eval(&self, u: f64) -> f64 {
        if u > self.u_hi {
            self.interior(self.u_hi) - self.tail_exponent * (u - self.u_hi)
        } else if u < self.u_lo {
            let base = self.interior(self.u_lo);
            if self.origin_rho > 0.0 {
                base - self.origin_c * ((-self.origin_rho * u).exp() - (-self.origin_rho * self.u_lo).exp())
            } else {
                base + self.origin_c * (u - self.u_lo)
            }
        } else {
            self.interior(u)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.ln_eval(x.ln()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit<F: Fn(f64) -> f64>(f: F, n: usize, lo: f64, hi: f64) -> ChebLogInterpolant {
        let v: Vec<f64> = cheb_nodes(n, lo, hi).into_iter().map(f).collect();
        ChebLogInterpolant::from_node_values(lo, hi, &v).unwrap()
    }

    #[test]
    fn reproduces_polynomials() {
        let p = |u: f64| 1.0 - 0.5 * u + 0.25 * u * u * u;
        let c = fit(p, 8, -2.0, 3.0);
        for u in [-2.0, -1.3, 0.0, 0.7, 2.9, 3.0] {
            assert!((c.ln_eval(u) - p(u)).abs() < 1e-12);
        }
    }

    #[test]
    fn power_law_tail_is_recovered() {
        let c = fit(|u| 2.0 - 1.5 * u, 16, 0.0, 5.0);
        assert!((c.tail_exponent - 1.5).abs() < 1e-12);
        assert!((c.ln_eval(9.0) - (2.0 - 13.5)).abs() < 1e-10);
    }

    #[test]
    fn stretched_head_is_recovered() {
        // ln g = -0.7 x^{-0.4}
        let f = |u: f64| -0.7 * (-0.4 * u).exp();
        let c = fit(f, 48, -6.0, 4.0);
        assert!((c.origin_rho - 0.4).abs() < 1e-8, "{}", c.origin_rho);
        assert!((c.origin_c - 0.7).abs() < 1e-7);
        assert!((c.ln_eval(-9.0) - f(-9.0)).abs() < 1e-6 * f(-9.0).abs());
    }

    #[test]
    fn seams_are_continuous() {
        let c = fit(|u: f64| -u.exp().recip() - 1.5 * u, 64, -4.0, 7.0);
        let eps = 1e-12;
        assert!((c.ln_eval(c.u_hi + eps) - c.ln_eval(c.u_hi - eps)).abs() < 1e-9);
        assert!((c.ln_eval(c.u_lo + eps) - c.ln_eval(c.u_lo - eps)).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ChebLogInterpolant::from_node_values(0.0, 1.0, &[0.0; 4]).is_err());
        assert!(ChebLogInterpolant::from_node_values(1.0, 0.0, &[0.0; 8]).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NEG_INFINITY;
        assert!(ChebLogInterpolant::from_node_values(0.0, 1.0, &v).is_err());
    }
}
