//! Scalar C² building blocks: polynomial envelope, sigmoid, Gaussian weight.
//!
//! ```text
//! p(x) = 1 - (n+1)(n+2)/2 x^n + n(n+2) x^(n+1) - n(n+1)/2 x^(n+2),  0 <= x < 1
//! p(x) = 0                                                          x >= 1
//! ```
//!
//! The derivatives factor as
//!
//! ```text
//! p'(x)  = -K x^(n-1) (1-x)^2
//! p''(x) = -K x^(n-2) (1-x) ((n-1) - (n+1) x),      K = n(n+1)(n+2)/2
//! ```
//!
//! so p, p' and p'' all vanish at x = 1 and the clamp to zero beyond it
//! keeps the function C² on [0, ∞).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Exponent of the polynomial envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnvelopeParams {
    n: u32,
}

impl EnvelopeParams {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "envelope exponent must be >= 3, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        Self { n: 50 }
    }
}

/// Gaussian rank weighting: target count `mu` and tolerance `sigma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightParams {
    mu: f64,
    sigma: f64,
}

impl WeightParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Precomputed polynomial envelope for hot loops. Inputs are assumed `>= 0`.
#[derive(Clone, Copy, Debug)]
pub struct Envelope {
    n: i32,
    a: f64,
    b: f64,
    c: f64,
    k: f64,
}

impl Envelope {
    pub fn new(params: EnvelopeParams) -> Self {
        let n = params.n as f64;
        Self {
            n: params.n as i32,
            a: (n + 1.0) * (n + 2.0) / 2.0,
            b: n * (n + 2.0),
            c: n * (n + 1.0) / 2.0,
            k: n * (n + 1.0) * (n + 2.0) / 2.0,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 0.0;
        }
        1.0 - x.powi(self.n) * (self.a - x * (self.b - self.c * x))
    }

    #[inline]
    pub fn d1(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - x;
        -self.k * x.powi(self.n - 1) * one_minus * one_minus
    }

    #[inline]
    pub fn d2(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 0.0;
        }
        let n = self.n as f64;
        -self.k * x.powi(self.n - 2) * (1.0 - x) * ((n - 1.0) - (n + 1.0) * x)
    }

    /// `(p, p', p'')` in one call.
    #[inline]
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        if x >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let n = self.n as f64;
        let xn2 = x.powi(self.n - 2);
        let xn = xn2 * x * x;
        let one_minus = 1.0 - x;
        let p = 1.0 - xn * (self.a - x * (self.b - self.c * x));
        let d1 = -self.k * xn2 * x * one_minus * one_minus;
        let d2 = -self.k * xn2 * one_minus * ((n - 1.0) - (n + 1.0) * x);
        (p, d1, d2)
    }
}

fn check_envelope_arg(x: f64, function: &'static str) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { function, value: x })
    }
}

pub fn envelope(x: f64, params: EnvelopeParams) -> Result<f64> {
    check_envelope_arg(x, "envelope")?;
    Ok(Envelope::new(params).value(x))
}

pub fn envelope_d1(x: f64, params: EnvelopeParams) -> Result<f64> {
    check_envelope_arg(x, "envelope_d1")?;
    Ok(Envelope::new(params).d1(x))
}

pub fn envelope_d2(x: f64, params: EnvelopeParams) -> Result<f64> {
    check_envelope_arg(x, "envelope_d2")?;
    Ok(Envelope::new(params).d2(x))
}

/// Logistic sigmoid, evaluated on the branch that cannot overflow.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// S'(x) = S(x)(1 - S(x)), written in terms of e^{-|x|} so the tails keep
/// full relative precision.
#[inline]
pub fn sigmoid_d1(x: f64) -> f64 {
    let t = (-x.abs()).exp();
    let d = 1.0 + t;
    t / (d * d)
}

/// S''(x) = S'(x)(1 - 2S(x)).
#[inline]
pub fn sigmoid_d2(x: f64) -> f64 {
    let t = (-x.abs()).exp();
    let d = 1.0 + t;
    let s1 = t / (d * d);
    // 1 - 2S(x) = -(1 - t)/(1 + t) for x >= 0, and its negation otherwise.
    let m = (1.0 - t) / d;
    if x >= 0.0 {
        -s1 * m
    } else {
        s1 * m
    }
}

/// `(S(x), S(-x), S'(x))` from a single exponential.
#[inline]
pub(crate) fn sigmoid_pair(x: f64) -> (f64, f64, f64) {
    let t = (-x.abs()).exp();
    let d = 1.0 + t;
    let hi = 1.0 / d;
    let lo = t / d;
    let s1 = t / (d * d);
    if x >= 0.0 {
        (hi, lo, s1)
    } else {
        (lo, hi, s1)
    }
}

/// Normalised Gaussian in rank space.
#[derive(Clone, Copy, Debug)]
pub struct GaussWeight {
    mu: f64,
    sigma: f64,
    norm: f64,
    log_norm: f64,
}

/// Beyond this many standard deviations the density is formed in log space.
const LOG_SPACE_Z: f64 = 30.0;

impl GaussWeight {
    pub fn new(params: WeightParams) -> Self {
        let norm = 1.0 / (params.sigma * (2.0 * PI).sqrt());
        Self {
            mu: params.mu,
            sigma: params.sigma,
            norm,
            log_norm: norm.ln(),
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        if z.abs() > LOG_SPACE_Z {
            (self.log_norm - 0.5 * z * z).exp()
        } else {
            self.norm * (-0.5 * z * z).exp()
        }
    }

    /// `(ω, ω', ω'')` in one call.
    #[inline]
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let z = (x - self.mu) / self.sigma;
        let w = self.value(x);
        let d1 = -z / self.sigma * w;
        let d2 = (z * z - 1.0) / (self.sigma * self.sigma) * w;
        (w, d1, d2)
    }
}

pub fn gauss_weight(x: f64, params: WeightParams) -> f64 {
    GaussWeight::new(params).value(x)
}

pub fn gauss_weight_d1(x: f64, params: WeightParams) -> f64 {
    GaussWeight::new(params).eval(x).1
}

pub fn gauss_weight_d2(x: f64, params: WeightParams) -> f64 {
    GaussWeight::new(params).eval(x).2
}
