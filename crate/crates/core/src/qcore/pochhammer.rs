use rug::ops::Pow;
use rug::{Complex, Float};

use super::QContext;
use crate::error::{QError, Result};

fn check_base(base: &Float) -> Result<()> {
    if *base > 0 && *base < 1 {
        Ok(())
    } else {
        Err(QError::DivergentProduct(base.to_string_radix(10, Some(12))))
    }
}

/// `(x; base)_inf = prod_{j>=0} (1 - x base^j)`.
///
/// The product stops once `|x base^j| < trunc_tol (1 - base)`, which bounds the
/// multiplicative perturbation of the discarded tail by about `trunc_tol`.
pub fn pochhammer_inf(x: &Complex, base: &Float, ctx: &QContext) -> Result<Complex> {
    check_base(base)?;
    let prec = ctx.prec();
    let stop = Float::with_val(prec, 1 - base) * ctx.trunc_tol();
    let stop2 = Float::with_val(prec, stop.square_ref());
    let mut p = Complex::with_val(prec, (1, 0));
    let mut t = x.clone();
    loop {
        if Float::with_val(prec, t.norm_ref()) < stop2 {
            return Ok(p);
        }
        p *= Complex::with_val(prec, 1 - &t);
        t *= base;
    }
}

/// Real-argument specialization of [`pochhammer_inf`].
pub fn pochhammer_inf_real(x: &Float, base: &Float, ctx: &QContext) -> Result<Float> {
    check_base(base)?;
    let prec = ctx.prec();
    let stop = Float::with_val(prec, 1 - base) * ctx.trunc_tol();
    let mut p = Float::with_val(prec, 1);
    let mut t = x.clone();
    loop {
        if Float::with_val(prec, t.abs_ref()) < stop {
            return Ok(p);
        }
        p *= Float::with_val(prec, 1 - &t);
        t *= base;
    }
}

/// `(x_1, ..., x_m; base)_inf`, the product of the single-argument symbols.
pub fn pochhammer_multi(xs: &[Complex], base: &Float, ctx: &QContext) -> Result<Complex> {
    let mut p = Complex::with_val(ctx.prec(), (1, 0));
    for x in xs {
        p *= pochhammer_inf(x, base, ctx)?;
    }
    Ok(p)
}

/// `[n]_base = (base^n - 1)/(base - 1)`, valid for negative `n` as well.
pub fn q_integer(n: i64, base: &Float) -> Float {
    let prec = base.prec();
    let n = i32::try_from(n).expect("q-integer index fits in i32");
    let num = Float::with_val(prec, base.pow(n)) - 1u32;
    num / Float::with_val(prec, base - 1u32)
}

/// Two-point q-derivative `(f(base x) - f(x)) / (x (base - 1))`.
///
/// Passing `base = 1/q` gives the backward derivative.
pub fn q_derivative<F>(f: F, x: &Complex, base: &Float) -> Result<Complex>
where
    F: Fn(&Complex) -> Complex,
{
    if x.real().is_zero() && x.imag().is_zero() {
        return Err(QError::ZeroPoint);
    }
    let prec = x.prec().0;
    let bx = Complex::with_val(prec, x * base);
    let num = f(&bx) - f(x);
    let den = Complex::with_val(prec, x * Float::with_val(prec, base - 1u32));
    Ok(num / den)
}
