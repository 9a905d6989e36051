//! Arbitrary-precision pFq summation, used as an independent check on the
//! double-precision series where the latter loses digits to cancellation.
//!
//! Working precision is raised until the guard bits cover the observed
//! cancellation (largest term over final sum).

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{LevyError, Result};

use super::hyper::Ratio;

pub const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 64;
const MAX_TERMS: usize = 200_000;

/// Sign and natural log of the magnitude of a multiprecision result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpValue {
    pub sign: f64,
    pub ln_abs: f64,
    pub terms_used: usize,
    pub bits_used: usize,
}

impl MpValue {
    pub fn to_f64(self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// `pFq(numer; denom; z)` with rational parameters and a binary64 argument
/// taken as exact, to roughly `bits` significant bits.
pub fn hyper_pfq_mp(numer: &[Ratio], denom: &[Ratio], z: f64, bits: usize) -> Result<MpValue> {
    if !z.is_finite() {
        return Err(LevyError::domain("hyper_pfq_mp", "non-finite argument"));
    }
    let mut cc = consts()?;
    let zb = BigFloat::from_f64(z, 64);
    let (sum, terms, prec) = hyper_pfq_big(numer, denom, &zb, bits)?;
    if sum.is_zero() {
        return Err(LevyError::domain("hyper_pfq_mp", "sum is exactly zero"));
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    Ok(MpValue { sign, ln_abs: ln_to_f64(&sum, &mut cc)?, terms_used: terms, bits_used: prec })
}

/// Multiprecision `pFq` returning the sum itself, its term count and the
/// working precision that was needed; the result carries about `bits`
/// correct bits.
pub fn hyper_pfq_big(numer: &[Ratio], denom: &[Ratio], z: &BigFloat, bits: usize) -> Result<(BigFloat, usize, usize)> {
    let big_arg = z.abs_cmp(&BigFloat::from_i64(1, 64)).map(|c| c >= 0).unwrap_or(true);
    if numer.len() > denom.len() + 1 || (numer.len() == denom.len() + 1 && big_arg) {
        return Err(LevyError::domain("hyper_pfq_mp", "series does not converge"));
    }
    for b in denom {
        if b.den == 0 || (b.num % b.den == 0 && b.num / b.den <= 0) {
            return Err(LevyError::domain("hyper_pfq_mp", format!("lower parameter {}/{} is a pole", b.num, b.den)));
        }
    }
    let mut prec = bits + GUARD_BITS;
    loop {
        let (sum, lost, terms) = sum_at(numer, denom, z, bits, prec)?;
        if lost + bits + 8 <= prec {
            return Ok((sum, terms, prec));
        }
        prec = lost + bits + GUARD_BITS;
    }
}

pub fn consts() -> Result<Consts> {
    Consts::new().map_err(|e| LevyError::domain("mp", format!("{e:?}")))
}

/// `Gamma(1/3)` from `Gamma(1/3)^3 = 2^{4/3} pi^2 / (3^{1/4} agm(1, cos(pi/12)))`.
pub fn gamma_one_third(p: usize, cc: &mut Consts) -> BigFloat {
    let w = p + 32;
    let int = |v: i64| BigFloat::from_i64(v, w);
    // cos(pi/12) = (sqrt 6 + sqrt 2) / 4
    let c = int(6).sqrt(w, RM).add(&int(2).sqrt(w, RM), w, RM).div(&int(4), w, RM);
    let (mut a, mut b) = (int(1), c);
    for _ in 0..64 {
        let next_a = a.add(&b, w, RM).div(&int(2), w, RM);
        let next_b = a.mul(&b, w, RM).sqrt(w, RM);
        let gap = next_a.sub(&next_b, w, RM);
        a = next_a;
        b = next_b;
        if gap.is_zero() || exp_of(&gap) < -(w as i64) {
            break;
        }
    }
    let pi = cc.pi(w, RM);
    let num = int(2).cbrt(w, RM).mul(&int(2), w, RM).mul(&pi, w, RM).mul(&pi, w, RM);
    let den = int(3).sqrt(w, RM).sqrt(w, RM).mul(&a, w, RM);
    num.div(&den, w, RM).cbrt(p, RM)
}

/// `Gamma(2/3) = 2 pi / (sqrt 3 Gamma(1/3))`.
pub fn gamma_two_thirds(p: usize, cc: &mut Consts) -> BigFloat {
    let w = p + 32;
    let g = gamma_one_third(w, cc);
    let pi = cc.pi(w, RM);
    let root3 = BigFloat::from_i64(3, w).sqrt(w, RM);
    pi.mul(&BigFloat::from_i64(2, w), w, RM).div(&root3.mul(&g, w, RM), p, RM)
}

// Returns the sum, the number of bits lost to cancellation, and terms used.
fn sum_at(numer: &[Ratio], denom: &[Ratio], zb: &BigFloat, bits: usize, p: usize) -> Result<(BigFloat, usize, usize)> {
    let one = BigFloat::from_i64(1, p);
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut max_exp = 1i64;
    let stop = -(bits as i64) - 8;
    for n in 0..MAX_TERMS {
        let nn = n as i64;
        let mut r = zb.div(&BigFloat::from_i64(nn + 1, p), p, RM);
        for a in numer {
            r = r.mul(&rational_shift(*a, nn, p), p, RM);
        }
        for b in denom {
            r = r.div(&rational_shift(*b, nn, p), p, RM);
        }
        term = term.mul(&r, p, RM);
        if term.is_zero() {
            let lost = lost_bits(max_exp, &sum);
            return Ok((sum, lost, n + 1));
        }
        sum = sum.add(&term, p, RM);
        let te = exp_of(&term);
        max_exp = max_exp.max(te);
        // past the peak once the ratio magnitude is below one
        if r.abs_cmp(&one).unwrap_or(1) < 0 && te - exp_of(&sum) < stop {
            let lost = lost_bits(max_exp, &sum);
            return Ok((sum, lost, n + 1));
        }
    }
    Err(LevyError::domain("hyper_pfq_mp", "term limit reached"))
}

fn rational_shift(r: Ratio, n: i64, p: usize) -> BigFloat {
    BigFloat::from_i64(r.num + n * r.den, p).div(&BigFloat::from_i64(r.den, p), p, RM)
}

/// Binary exponent, or a very negative sentinel for zero.
pub fn exp_of(x: &BigFloat) -> i64 {
    x.exponent().map(|e| e as i64).unwrap_or(i64::MIN / 4)
}

fn lost_bits(max_exp: i64, sum: &BigFloat) -> usize {
    (max_exp - exp_of(sum)).max(0) as usize
}

/// `ln |x|` rounded to binary64.
pub fn ln_to_f64(x: &BigFloat, cc: &mut Consts) -> Result<f64> {
    let p = x.precision().unwrap_or(128).max(128);
    to_f64(&x.abs().ln(p, RM, cc), cc)
}

/// Conversion through the decimal formatter.
pub fn to_f64(x: &BigFloat, cc: &mut Consts) -> Result<f64> {
    let s = x
        .format(Radix::Dec, RM, cc)
        .map_err(|e| LevyError::domain("mp::to_f64", format!("{e:?}")))?;
    s.parse::<f64>().map_err(|e| LevyError::domain("mp::to_f64", format!("{s}: {e}")))
}
