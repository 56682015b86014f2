use rug::{Complex, Float};

/// `|z|` at the precision of `z`.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `|z|` as an `f64`; saturates to 0 or infinity outside the double range.
pub fn cabs_f64(z: &Complex) -> f64 {
    cabs(z).to_f64()
}

/// `log10 |z|`, finite even when `|z|` is far outside the double range.
pub fn log10_abs(z: &Complex) -> f64 {
    let a = cabs(z);
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    Float::with_val(64, a.log10_ref()).to_f64()
}

/// Relative deviation `|a - b| / |b|`.
pub fn rel_diff(a: &Complex, b: &Complex) -> Float {
    let prec = a.prec().0;
    let d = Complex::with_val(prec, a - b);
    cabs(&d) / cabs(b)
}

/// Decimal rendering with every significant digit the precision supports.
pub fn decimal(x: &Float) -> String {
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.to_string_radix(10, Some(digits))
}

/// Decimal rendering with a fixed number of significant digits.
pub fn decimal_digits(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

/// Polynomial extrapolation to `x = 0` through the points `(xs[i], ys[i])`
/// (Neville's scheme).
pub fn neville_at_zero(xs: &[Complex], ys: &[Complex]) -> Complex {
    assert_eq!(xs.len(), ys.len(), "abscissae and values must pair up");
    assert!(!xs.is_empty(), "need at least one point");
    let mut p: Vec<Complex> = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            let num = Complex::with_val(p[i].prec().0, &xs[i] * &p[i + 1])
                - Complex::with_val(p[i].prec().0, &xs[i + m] * &p[i]);
            let den = Complex::with_val(p[i].prec().0, &xs[i] - &xs[i + m]);
            p[i] = num / den;
        }
    }
    p.swap_remove(0)
}

/// Real-valued wrapper around [`neville_at_zero`].
pub fn neville_at_zero_real(xs: &[Float], ys: &[Float]) -> Float {
    let cx = |v: &Float| Complex::with_val(v.prec(), (v, 0));
    let xs: Vec<Complex> = xs.iter().map(cx).collect();
    let ys: Vec<Complex> = ys.iter().map(cx).collect();
    neville_at_zero(&xs, &ys).real().clone()
}

/// Least-squares geometric rate of a sequence sampled at equally spaced
/// steps: fits `ln |v_i| = c + i ln r` and returns `r`.
pub fn fitted_ratio(values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 0.0 && v.is_finite())
        .map(|(i, v)| (i as f64, v.abs().ln()))
        .collect();
    fitted_slope(&pts).exp()
}

/// Least-squares slope of `(x, y)` pairs.
pub fn fitted_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Band test `1/factor <= value / target <= factor`.
pub fn within_factor(value: f64, target: f64, factor: f64) -> bool {
    let r = value / target;
    r.is_finite() && r >= 1.0 / factor && r <= factor
}
