//! The q-discrete Painleve equation satisfied by the recurrence coefficients:
//!
//! `alpha_n (alpha_{n+1} + q^{n-1} alpha_n + q^-2 alpha_{n-1}
//!   - q^{2n-3} alpha_{n+1} alpha_n alpha_{n-1}) = (q^-n - 1) q^{1-n}`.
//!
//! Orbits come either from the lattice construction in `qortho` for a shift
//! `c`, or from forward iteration of the equation from `alpha_0 = 0` and a
//! given `alpha_1`.

use rug::ops::Pow;
use rug::Float;

use crate::error::{QError, Result};
use crate::qcore::{fitted_slope, QContext};
use crate::qortho::build_polys;

/// `LHS - RHS` of the equation at index `n`.
pub fn painleve_residual(a_prev: &Float, a_n: &Float, a_next: &Float, n: i64, ctx: &QContext) -> Float {
    let (lhs, rhs, _) = painleve_sides(a_prev, a_n, a_next, n, ctx);
    lhs - rhs
}

/// `|LHS - RHS|` divided by the largest individual term, so the value is
/// comparable across `n` even though both sides grow like `q^{1-2n}`.
pub fn painleve_relative_residual(a_prev: &Float, a_n: &Float, a_next: &Float, n: i64, ctx: &QContext) -> Float {
    let (lhs, rhs, scale) = painleve_sides(a_prev, a_n, a_next, n, ctx);
    (lhs - rhs).abs() / scale
}

fn painleve_sides(a_prev: &Float, a_n: &Float, a_next: &Float, n: i64, ctx: &QContext) -> (Float, Float, Float) {
    let p = ctx.prec();
    let terms = [
        Float::with_val(p, a_n * a_next),
        Float::with_val(p, a_n.square_ref()) * ctx.qpow(n - 1),
        Float::with_val(p, a_n * a_prev) * ctx.qpow(-2),
        -(Float::with_val(p, a_next * a_n) * a_n * a_prev * ctx.qpow(2 * n - 3)),
    ];
    let rhs = Float::with_val(p, ctx.qpow(-n) - 1u32) * ctx.qpow(1 - n);
    let mut lhs = Float::new(p);
    let mut scale = Float::with_val(p, rhs.abs_ref());
    for t in &terms {
        lhs += t;
        let a = Float::with_val(p, t.abs_ref());
        if a > scale {
            scale = a;
        }
    }
    (lhs, rhs, scale)
}

/// Where an orbit came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Recurrence coefficients of the lattice `{+-c q^k}`.
    Moments { c: Float },
    ForwardIteration,
}

/// `alpha_0..alpha_N` with per-entry positivity and, for iterated orbits, the
/// index at which iteration stopped on a vanishing denominator.
#[derive(Debug, Clone)]
pub struct AlphaOrbit {
    pub alpha: Vec<Float>,
    pub provenance: Provenance,
    pub q: Float,
    pub blowup: Option<usize>,
}

impl AlphaOrbit {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `alpha_n > 0` for each `n >= 1`; entry 0 is reported as positive.
    pub fn positivity(&self) -> Vec<bool> {
        self.alpha
            .iter()
            .enumerate()
            .map(|(n, a)| n == 0 || a.is_sign_positive() && !a.is_zero())
            .collect()
    }

    pub fn all_positive(&self) -> bool {
        self.positivity().into_iter().all(|b| b)
    }

    /// Largest relative residual over `1 <= n <= N-1`.
    pub fn max_residual(&self, ctx: &QContext) -> Float {
        let mut worst = Float::new(ctx.prec());
        for n in 1..self.alpha.len().saturating_sub(1) {
            let r = painleve_relative_residual(&self.alpha[n - 1], &self.alpha[n], &self.alpha[n + 1], n as i64, ctx);
            if r > worst {
                worst = r;
            }
        }
        worst
    }
}

/// Recurrence coefficients `alpha_0..alpha_N` of the shifted lattice.
pub fn from_moments(c: &Float, n_max: usize, ctx: &QContext) -> Result<AlphaOrbit> {
    let seq = build_polys(c, n_max, ctx)?;
    Ok(AlphaOrbit {
        alpha: seq.alphas().to_vec(),
        provenance: Provenance::Moments { c: c.clone() },
        q: ctx.q().clone(),
        blowup: None,
    })
}

/// Forward iteration from `alpha_0 = 0`:
/// `alpha_{n+1} = [(q^-n - 1) q^{1-n} - q^{n-1} alpha_n^2 - q^-2 alpha_n alpha_{n-1}]
///   / [alpha_n (1 - q^{2n-3} alpha_n alpha_{n-1})]`.
/// Stops early, recording `blowup`, when the denominator falls below
/// `2^{-bits/2}` in magnitude.
pub fn iterate_forward(alpha1: &Float, n_max: usize, ctx: &QContext) -> Result<AlphaOrbit> {
    if !alpha1.is_sign_positive() || alpha1.is_zero() {
        return Err(QError::InvalidInput(format!("alpha_1 must be positive (got {})", alpha1.to_f64())));
    }
    let p = ctx.prec();
    let guard = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2));
    let mut alpha = vec![Float::new(p), Float::with_val(p, alpha1)];
    let mut blowup = None;
    for n in 1..n_max {
        let ni = n as i64;
        let (am, a) = (&alpha[n - 1], &alpha[n]);
        let aa = Float::with_val(p, a * am);
        let den = Float::with_val(p, 1u32 - Float::with_val(p, &aa * ctx.qpow(2 * ni - 3))) * a;
        if Float::with_val(p, den.abs_ref()) < guard {
            blowup = Some(n + 1);
            break;
        }
        let num = Float::with_val(p, ctx.qpow(-ni) - 1u32) * ctx.qpow(1 - ni)
            - Float::with_val(p, a.square_ref()) * ctx.qpow(ni - 1)
            - aa * ctx.qpow(-2);
        alpha.push(num / den);
    }
    Ok(AlphaOrbit {
        alpha,
        provenance: Provenance::ForwardIteration,
        q: ctx.q().clone(),
        blowup,
    })
}

/// First `n` at which `orbit` departs from `reference` by more than
/// `threshold`, measured against the gap `q^{1-n} - alpha_n` of the reference
/// (the scale of the shift ratios `r_n`); `None` if they agree on the common
/// range. Plain relative differences hide the instability because
/// `alpha_n ~ q^{1-n}` dominates both orbits.
pub fn divergence_point(orbit: &AlphaOrbit, reference: &AlphaOrbit, threshold: f64) -> Option<usize> {
    let n = orbit.len().min(reference.len());
    if let Some(b) = orbit.blowup {
        if b < n {
            return Some(b);
        }
    }
    (1..n).find(|&i| {
        let d = scaled_deviation(orbit, reference, i).to_f64();
        d.is_nan() || d > threshold
    })
}

/// `|alpha_n - alpha_n^ref| / |q^{1-n} - alpha_n^ref|`.
pub fn scaled_deviation(orbit: &AlphaOrbit, reference: &AlphaOrbit, n: usize) -> Float {
    let r = &reference.alpha[n];
    let p = r.prec();
    let q = Float::with_val(p, &reference.q);
    let gap = Float::with_val(p, (&q).pow(1 - n as i32)) - r;
    Float::with_val(p, &orbit.alpha[n] - r).abs() / gap.abs()
}

/// One row of the limit diagnostic.
#[derive(Debug, Clone)]
pub struct LimitRow {
    pub n: usize,
    /// `q^n alpha_n`.
    pub scaled: Float,
    /// `|q^n alpha_n - q| / q^{n/2}`.
    pub deviation: Float,
}

/// `(n, q^n alpha_n, |q^n alpha_n - q| / q^{n/2})` for `n >= 1`.
pub fn limit_diagnostic(orbit: &AlphaOrbit, ctx: &QContext) -> Vec<LimitRow> {
    let p = ctx.prec();
    (1..orbit.len())
        .map(|n| {
            let scaled = Float::with_val(p, &orbit.alpha[n] * ctx.qpow(n as i64));
            let dev = Float::with_val(p, &scaled - ctx.q()).abs() / ctx.qpow_frac(n as i64, 2);
            LimitRow {
                n,
                scaled,
                deviation: dev,
            }
        })
        .collect()
}

/// Least-squares slope of `ln |q^n alpha_n - q|` against `n`, in units of
/// `ln q`, over the given rows. The expected value is 1/2.
pub fn limit_rate_exponent(rows: &[LimitRow], ctx: &QContext) -> f64 {
    let lnq = ctx.q_f64().ln();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let d = Float::with_val(r.scaled.prec(), &r.scaled - ctx.q()).abs();
            (r.n as f64, Float::with_val(64, d.ln_ref()).to_f64())
        })
        .collect();
    fitted_slope(&pts) / lnq
}

/// `r_n(c) = (alpha_n^(c) - alpha_n^(1)) / (q^{1-n} - alpha_n^(1))` at even `n`.
#[derive(Debug, Clone)]
pub struct ShiftRow {
    pub c: Float,
    pub ratios: Vec<(usize, Float)>,
    /// `min |r_n|` over the last five even `n`.
    pub tail_min: Float,
}

/// Compares the orbits of each shift with the `c = 1` orbit. Every `c` must
/// lie in `(q, 1]`.
pub fn shift_discrimination(cs: &[Float], n_max: usize, ctx: &QContext) -> Result<Vec<ShiftRow>> {
    let p = ctx.prec();
    for c in cs {
        if !(c > ctx.q() && *c <= 1) {
            return Err(QError::InvalidShift(c.to_string_radix(10, Some(8))));
        }
    }
    let base = from_moments(&Float::with_val(p, 1), n_max, ctx)?;
    cs.iter()
        .map(|c| {
            let orbit = from_moments(c, n_max, ctx)?;
            if !orbit.all_positive() {
                let n = orbit.positivity().iter().position(|b| !b).unwrap_or(0);
                return Err(QError::LossOfPositivity(n));
            }
            let ratios: Vec<(usize, Float)> = (2..=n_max)
                .step_by(2)
                .map(|n| {
                    let a1 = &base.alpha[n];
                    let num = Float::with_val(p, &orbit.alpha[n] - a1);
                    let den = ctx.qpow(1 - n as i64) - a1;
                    (n, num / den)
                })
                .collect();
            let tail_min = ratios
                .iter()
                .rev()
                .take(5)
                .map(|(_, r)| Float::with_val(p, r.abs_ref()))
                .reduce(|a, b| if b < a { b } else { a })
                .unwrap_or_else(|| Float::new(p));
            Ok(ShiftRow {
                c: c.clone(),
                ratios,
                tail_min,
            })
        })
        .collect()
}
