//! One-sided Lévy stable densities `g_alpha` (Laplace transform `exp(-p^alpha)`),
//! the scaled kernel `kappa_alpha(t, x)`, and the evaluable handle shared by
//! the transform, Laplace and subordination modules.

mod closed;
mod interp;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use closed::{
    eval_closed, g_half, g_quarter_integral, g_quarter_series, g_sixth_integral, g_sixth_series, g_third_airy,
    g_third_bessel, g_two_thirds_bessel, g_two_thirds_kummer, ln_closed, ln_two_thirds_kummer_mp, ClosedForm,
    QUARTER_SWITCH, SIXTH_SWITCH,
};
pub use interp::{cheb_nodes, ChebLogInterpolant};

use crate::error::{LevyError, Result};

/// Rational stable index `l/k` with `0 < l < k`, `gcd(l, k) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StableIndex {
    l: i64,
    k: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl StableIndex {
    pub fn new(l: i64, k: i64) -> Result<Self> {
        if l <= 0 || k <= 0 || l >= k || gcd(l, k) != 1 {
            return Err(LevyError::InvalidIndex { l, k });
        }
        Ok(StableIndex { l, k })
    }

    pub fn l(self) -> i64 {
        self.l
    }

    pub fn k(self) -> i64 {
        self.k
    }

    pub fn value(self) -> f64 {
        self.l as f64 / self.k as f64
    }

    /// Exact product, reduced.
    pub fn times(self, other: StableIndex) -> Result<StableIndex> {
        let l = self.l.checked_mul(other.l);
        let k = self.k.checked_mul(other.k);
        match (l, k) {
            (Some(l), Some(k)) => {
                let g = gcd(l, k);
                StableIndex::new(l / g, k / g)
            }
            _ => Err(LevyError::Config(format!("index product {self} * {other} overflows"))),
        }
    }

    pub fn product(chain: &[StableIndex]) -> Result<StableIndex> {
        let (first, rest) = chain.split_first().ok_or_else(|| LevyError::Config("empty index chain".into()))?;
        rest.iter().try_fold(*first, |acc, s| acc.times(*s))
    }
}

impl fmt::Display for StableIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.l, self.k)
    }
}

impl FromStr for StableIndex {
    type Err = LevyError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || LevyError::Config(format!("cannot parse stable index {s:?}; expected l/k"));
        let (l, k) = s.trim().split_once('/').ok_or_else(bad)?;
        let l = l.trim().parse().map_err(|_| bad())?;
        let k = k.trim().parse().map_err(|_| bad())?;
        StableIndex::new(l, k)
    }
}

#[derive(Debug, Clone)]
pub enum Form {
    Closed(ClosedForm),
    Synthesized(Arc<Synthesized>),
}

#[derive(Debug)]
pub struct Synthesized {
    pub chain: Vec<StableIndex>,
    pub source: Source,
}

#[derive(Debug)]
pub enum Source {
    Tabulated(ChebLogInterpolant),
    /// Evaluated pointwise by one Lévy2 quadrature per call.
    Live { kernel: DensityHandle, operand: DensityHandle },
}

/// An evaluable one-sided stable density. Cheap to clone; immutable.
#[derive(Debug, Clone)]
pub struct DensityHandle {
    alpha: StableIndex,
    form: Form,
}

impl DensityHandle {
    pub fn closed(which: ClosedForm) -> Self {
        DensityHandle { alpha: which.index(), form: Form::Closed(which) }
    }

    /// Closed-form handle for one of the five supported indices.
    pub fn for_index(alpha: StableIndex) -> Result<Self> {
        Ok(Self::closed(ClosedForm::from_index(alpha)?))
    }

    pub fn tabulated(chain: Vec<StableIndex>, interp: ChebLogInterpolant) -> Result<Self> {
        let alpha = StableIndex::product(&chain)?;
        Ok(DensityHandle { alpha, form: Form::Synthesized(Arc::new(Synthesized { chain, source: Source::Tabulated(interp) })) })
    }

    pub fn live(kernel: DensityHandle, operand: DensityHandle) -> Result<Self> {
        let mut chain = kernel.chain();
        chain.extend(operand.chain());
        let alpha = StableIndex::product(&chain)?;
        Ok(DensityHandle {
            alpha,
            form: Form::Synthesized(Arc::new(Synthesized { chain, source: Source::Live { kernel, operand } })),
        })
    }

    pub fn alpha(&self) -> StableIndex {
        self.alpha
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.form, Form::Closed(_))
    }

    /// Provenance: the indices whose product is `alpha`.
    pub fn chain(&self) -> Vec<StableIndex> {
        match &self.form {
            Form::Closed(c) => vec![c.index()],
            Form::Synthesized(s) => s.chain.clone(),
        }
    }

    pub fn interpolant(&self) -> Option<&ChebLogInterpolant> {
        match &self.form {
            Form::Synthesized(s) => match &s.source {
                Source::Tabulated(i) => Some(i),
                Source::Live { .. } => None,
            },
            Form::Closed(_) => None,
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(LevyError::domain("pdf", format!("x = {x} must be positive and finite")));
        }
        match &self.form {
            Form::Closed(c) => eval_closed(*c, x),
            Form::Synthesized(s) => match &s.source {
                Source::Tabulated(i) => Ok(i.eval(x)),
                Source::Live { kernel, operand } => crate::transform::levy2_density(kernel, operand, x),
            },
        }
    }

    /// `ln g(x)`; closed forms stay finite where `g` underflows.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(LevyError::domain("ln_pdf", format!("x = {x} must be positive and finite")));
        }
        match &self.form {
            Form::Closed(c) => ln_closed(*c, x),
            Form::Synthesized(s) => match &s.source {
                Source::Tabulated(i) => Ok(i.ln_eval(x.ln())),
                Source::Live { .. } => Ok(self.pdf(x)?.ln()),
            },
        }
    }

    /// `pdf` with failures mapped to NaN, for use inside quadrature closures;
    /// the quadrature reports NaN as a non-finite integrand.
    pub fn pdf_or_nan(&self, x: f64) -> f64 {
        self.pdf(x).unwrap_or(f64::NAN)
    }
}

/// `kappa_alpha(t, x) = t^{-1/alpha} g_alpha(x t^{-1/alpha})` where `base` is `g_alpha`.
pub fn kernel_kappa(base: &DensityHandle, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(LevyError::domain("kernel_kappa", format!("t = {t} must be positive and finite")));
    }
    let s = t.powf(-1.0 / base.alpha().value());
    let y = x * s;
    // s g(y) ~ x^{-1-alpha} s^{-alpha} -> 0 as s grows; g vanishes at the origin
    if s == 0.0 || !s.is_finite() || y == 0.0 || !y.is_finite() {
        return Ok(0.0);
    }
    Ok(s * base.pdf(y)?)
}

const TAIL_FIT_POINTS: usize = 41;

/// Least-squares decay exponent of `g` over a log-spaced window; expected `1 + alpha`.
pub fn tail_exponent(d: &DensityHandle, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo >= 10.0) || !hi.is_finite() {
        return Err(LevyError::Config(format!("tail window [{lo}, {hi}] must start at 10 or above")));
    }
    if !(hi / lo >= 10f64.sqrt()) {
        return Err(LevyError::Config(format!("tail window [{lo}, {hi}] is narrower than half a decade")));
    }
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let (mut su, mut sv, mut suu, mut suv) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..TAIL_FIT_POINTS {
        let u = ulo + (uhi - ulo) * i as f64 / (TAIL_FIT_POINTS - 1) as f64;
        let v = d.ln_pdf(u.exp())?;
        su += u;
        sv += v;
        suu += u * u;
        suv += u * v;
    }
    let m = TAIL_FIT_POINTS as f64;
    Ok(-(m * suv - su * sv) / (m * suu - su * su))
}
