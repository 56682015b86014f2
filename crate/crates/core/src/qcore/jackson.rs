use rug::Float;

use super::QContext;
use crate::error::{QError, Result};

/// A truncated bilateral lattice sum with its tail estimate.
#[derive(Debug, Clone)]
pub struct JacksonSum {
    pub value: Float,
    /// Magnitude of the two boundary terms, an estimate of the discarded tails.
    pub tail: Float,
    /// Sum of absolute values of all retained terms.
    pub scale: Float,
}

/// `sum_{k=-K-}^{K+} [f(c q^k) + f(-c q^k)] q^k`, accumulated in ascending `k`.
///
/// Fails when the boundary terms exceed `trunc_tol` relative to the sum of
/// absolute values.
pub fn jackson_bilateral<F>(f: F, c: &Float, ctx: &QContext) -> Result<JacksonSum>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.prec();
    let mut value = Float::new(prec);
    let mut scale = Float::new(prec);
    let mut first = Float::new(prec);
    let mut last = Float::new(prec);
    let (lo, hi) = (-ctx.k_neg(), ctx.k_pos());
    for k in lo..=hi {
        let qk = ctx.qpow(k);
        let x = Float::with_val(prec, c * &qk);
        let neg = Float::with_val(prec, -&x);
        let term = (f(&x) + f(&neg)) * &qk;
        let mag = Float::with_val(prec, term.abs_ref());
        if k == lo {
            first = mag.clone();
        }
        if k == hi {
            last = mag.clone();
        }
        scale += &mag;
        value += &term;
    }
    let tail = first + last;
    if tail > Float::with_val(prec, &scale * ctx.trunc_tol()) {
        return Err(QError::TailBound {
            tail: tail.to_string_radix(10, Some(6)),
            scale: scale.to_string_radix(10, Some(6)),
        });
    }
    Ok(JacksonSum { value, tail, scale })
}
