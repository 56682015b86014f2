use rug::ops::Pow;
use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{QError, Result};

/// Smallest working precision accepted by [`QContext::new`].
pub const MIN_PRECISION: u32 = 64;

/// Degree budget used for the negative lattice cutoff unless overridden.
pub const DEFAULT_DEGREE_BUDGET: usize = 64;

/// Immutable numerical configuration shared by every module: the base `q`,
/// the working precision, the truncation tolerance and the two lattice cutoffs.
#[derive(Debug, Clone)]
pub struct QContext {
    q: Float,
    prec: u32,
    trunc_tol: Float,
    k_pos: i64,
    k_neg: i64,
    degree_budget: usize,
}

/// Working precision that keeps orthogonalization up to degree `n_max`
/// well inside the available mantissa: `max(1024, ceil(n_max^2 log2(1/q)))`.
pub fn default_precision(n_max: usize, q: f64) -> u32 {
    let need = (n_max * n_max) as f64 * (1.0 / q).log2();
    (need.ceil() as u32).max(1024)
}

impl QContext {
    /// Context for a base given as a decimal string (parsed exactly at the
    /// working precision). The truncation tolerance defaults to
    /// `2^(-precision_bits/2)` and both cutoffs follow from it.
    pub fn new(q: &str, precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION {
            return Err(QError::InvalidPrecision {
                got: precision_bits,
                min: MIN_PRECISION,
            });
        }
        let parsed = Float::parse(q).map_err(|_| QError::InvalidQ(q.to_string()))?;
        let q = Float::with_val(precision_bits, parsed);
        if !(q > 0 && q < 1) {
            return Err(QError::InvalidQ(q.to_string()));
        }
        let half = i32::try_from(precision_bits / 2).unwrap_or(i32::MAX);
        let trunc_tol = Float::with_val(precision_bits, Float::i_exp(1, -half));
        let mut ctx = QContext {
            q,
            prec: precision_bits,
            trunc_tol,
            k_pos: 0,
            k_neg: 0,
            degree_budget: DEFAULT_DEGREE_BUDGET,
        };
        ctx.recompute_cutoffs();
        Ok(ctx)
    }

    /// Replaces the truncation tolerance (decimal string) and recomputes cutoffs.
    pub fn with_trunc_tol(mut self, tol: &str) -> Result<Self> {
        let parsed = Float::parse(tol).map_err(|_| QError::InvalidTolerance(tol.to_string()))?;
        let tol_f = Float::with_val(self.prec, parsed);
        if !(tol_f > 0 && tol_f < 1) {
            return Err(QError::InvalidTolerance(tol.to_string()));
        }
        self.trunc_tol = tol_f;
        self.recompute_cutoffs();
        Ok(self)
    }

    /// Sets the largest polynomial degree the negative cutoff must cover.
    pub fn with_degree_budget(mut self, degree: usize) -> Self {
        self.degree_budget = degree.max(1);
        self.recompute_cutoffs();
        self
    }

    /// Overrides both lattice cutoffs explicitly.
    pub fn with_cutoffs(mut self, k_pos: i64, k_neg: i64) -> Self {
        self.k_pos = k_pos.max(1);
        self.k_neg = k_neg.max(1);
        self
    }

    /// Same configuration at a different precision. `q` and the tolerance are
    /// re-rounded, cutoffs are kept.
    pub fn with_precision(&self, precision_bits: u32) -> Self {
        QContext {
            q: Float::with_val(precision_bits, &self.q),
            prec: precision_bits,
            trunc_tol: Float::with_val(precision_bits, &self.trunc_tol),
            ..self.clone()
        }
    }

    /// `log_q(trunc_tol)`, the number of powers of q needed to reach the tolerance.
    pub fn tol_exponent(&self) -> f64 {
        self.log2_tol() / self.log2_q()
    }

    fn log2_tol(&self) -> f64 {
        Float::with_val(64, self.trunc_tol.log2_ref()).to_f64()
    }

    fn log2_q(&self) -> f64 {
        Float::with_val(64, self.q.log2_ref()).to_f64()
    }

    fn recompute_cutoffs(&mut self) {
        let l = self.tol_exponent();
        self.k_pos = l.ceil() as i64 + 4;
        // w(q^-m) <= q^(2m(m-1)); a degree-d integrand grows like q^(-dm) and the
        // Jackson factor adds q^(-m), so require 2m(m-1) - (d+1)m >= l.
        let d = self.degree_budget as f64;
        let mut m = 1i64;
        while (2 * m * (m - 1)) as f64 - (d + 1.0) * m as f64 <= l {
            m += 1;
        }
        self.k_neg = m + 1;
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn q_f64(&self) -> f64 {
        self.q.to_f64()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn trunc_tol(&self) -> &Float {
        &self.trunc_tol
    }

    pub fn k_pos(&self) -> i64 {
        self.k_pos
    }

    pub fn k_neg(&self) -> i64 {
        self.k_neg
    }

    pub fn degree_budget(&self) -> usize {
        self.degree_budget
    }

    /// Offset used for symmetric limits at lattice points: `2^(-precision_bits/4)`.
    pub fn limit_offset(&self) -> Float {
        let e = i32::try_from(self.prec / 4).unwrap_or(i32::MAX);
        Float::with_val(self.prec, Float::i_exp(1, -e))
    }

    /// Radius of the exclusion disk around poles and zeros: `10 sqrt(trunc_tol)`.
    pub fn guard_radius(&self) -> Float {
        Float::with_val(self.prec, self.trunc_tol.sqrt_ref()) * 10u32
    }

    pub fn real(&self, v: f64) -> Float {
        Float::with_val(self.prec, v)
    }

    /// Exact decimal parse at working precision. Panics on malformed literals,
    /// so only use it with constants.
    pub fn dec(&self, s: &str) -> Float {
        Float::with_val(self.prec, Float::parse(s).expect("decimal literal"))
    }

    pub fn cx(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.prec, (re, im))
    }

    pub fn cx_real(&self, re: &Float) -> Complex {
        Complex::with_val(self.prec, (re, 0))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec, Constant::Pi)
    }

    /// `r e^(i theta)` with `theta = frac * pi`.
    pub fn polar(&self, r: &Float, frac_of_pi: f64) -> Complex {
        let theta = self.pi() * frac_of_pi;
        self.polar_angle(r, &theta)
    }

    pub fn polar_angle(&self, r: &Float, theta: &Float) -> Complex {
        let (s, c) = theta.clone().sin_cos(Float::new(self.prec));
        Complex::with_val(self.prec, (c * r, s * r))
    }

    /// `q^k` for integer `k`.
    pub fn qpow(&self, k: i64) -> Float {
        let k = i32::try_from(k).expect("exponent fits in i32");
        Float::with_val(self.prec, (&self.q).pow(k))
    }

    /// `q^x` for real `x`.
    pub fn qpow_real(&self, x: &Float) -> Float {
        Float::with_val(self.prec, (&self.q).pow(x))
    }

    /// `q^(num/den)`.
    pub fn qpow_frac(&self, num: i64, den: i64) -> Float {
        let x = Float::with_val(self.prec, num) / den;
        self.qpow_real(&x)
    }
}
