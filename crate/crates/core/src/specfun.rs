//! The weight `w`, the theta-type products `g` and `omega`, the q-periodic
//! function `h_q` (bilateral series and product form), and the lattice limit
//! constants `c0` and `calH`.

use rug::{Complex, Float};

use crate::error::{QError, Result};
use crate::qcore::{cabs, pochhammer_inf, pochhammer_inf_real, rel_diff, QContext};

fn short(z: &Complex) -> String {
    format!(
        "{}{:+}i",
        z.real().to_string_radix(10, Some(8)),
        z.imag().to_f64()
    )
}

fn q_squared(ctx: &QContext) -> Float {
    Float::with_val(ctx.prec(), ctx.q().square_ref())
}

fn q_fourth(ctx: &QContext) -> Float {
    let q2 = q_squared(ctx);
    Float::with_val(ctx.prec(), q2.square_ref())
}

/// `w(x) = 1 / (-x^4; q^4)_inf`.
pub fn weight_w(x: &Complex, ctx: &QContext) -> Result<Complex> {
    let prec = ctx.prec();
    let x2 = Complex::with_val(prec, x.square_ref());
    let x4 = Complex::with_val(prec, x2.square_ref());
    let p = pochhammer_inf(&(-x4), &q_fourth(ctx), ctx)?;
    Ok(Complex::with_val(prec, p.recip_ref()))
}

/// Real-argument [`weight_w`], used on the orthogonality lattice.
pub fn weight_w_real(x: &Float, ctx: &QContext) -> Result<Float> {
    let prec = ctx.prec();
    let x2 = Float::with_val(prec, x.square_ref());
    let x4 = Float::with_val(prec, x2.square_ref());
    let p = pochhammer_inf_real(&(-x4), &q_fourth(ctx), ctx)?;
    Ok(Float::with_val(prec, p.recip_ref()))
}

/// `g(z) = (z^2; q^2)_inf (q^2 z^-2; q^2)_inf`; vanishes on `+-q^k`.
pub fn gfun(z: &Complex, ctx: &QContext) -> Result<Complex> {
    let prec = ctx.prec();
    let q2 = q_squared(ctx);
    let z2 = Complex::with_val(prec, z.square_ref());
    let inv = Complex::with_val(prec, &q2 / &z2);
    Ok(pochhammer_inf(&z2, &q2, ctx)? * pochhammer_inf(&inv, &q2, ctx)?)
}

/// `omega(t) = 1 / ((-t^4; q^4)_inf (-q^4 t^-4; q^4)_inf)`.
pub fn omegafun(t: &Complex, ctx: &QContext) -> Result<Complex> {
    let prec = ctx.prec();
    let q4 = q_fourth(ctx);
    let t2 = Complex::with_val(prec, t.square_ref());
    let t4 = Complex::with_val(prec, t2.square_ref());
    let inv = Complex::with_val(prec, &q4 / &t4);
    let p = pochhammer_inf(&(-t4), &q4, ctx)? * pochhammer_inf(&(-inv), &q4, ctx)?;
    Ok(Complex::with_val(prec, p.recip_ref()))
}

fn nearest_lattice_distance(z: &Complex, ctx: &QContext) -> Float {
    let prec = ctx.prec();
    let r = cabs(z);
    let k0 = (Float::with_val(64, r.ln_ref()).to_f64() / ctx.q_f64().ln()).round() as i64;
    let mut best = Float::with_val(prec, f64::INFINITY);
    for k in k0 - 1..=k0 + 1 {
        let qk = ctx.qpow(k);
        for s in [&qk, &Float::with_val(prec, -&qk)] {
            let d = cabs(&Complex::with_val(prec, z - s));
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Rejects points closer than the guard radius to `{0} U {+-q^k}`.
pub fn check_off_lattice(z: &Complex, what: &'static str, ctx: &QContext) -> Result<()> {
    let guard = ctx.guard_radius();
    if cabs(z) < guard || nearest_lattice_distance(z, ctx) < guard {
        return Err(QError::PoleProximity {
            what,
            point: short(z),
            radius: guard.to_string_radix(10, Some(4)),
        });
    }
    Ok(())
}

/// `h_q(z) = sum_{k in Z} 2 z q^k / (z^2 - q^{2k})` with the pole guard.
pub fn hq_series(z: &Complex, ctx: &QContext) -> Result<Complex> {
    check_off_lattice(z, "h_q", ctx)?;
    Ok(hq_series_unchecked(z, ctx))
}

/// Bilateral series for `h_q` without the proximity check; used for the
/// symmetric-offset limits at lattice points.
pub(crate) fn hq_series_unchecked(z: &Complex, ctx: &QContext) -> Complex {
    let prec = ctx.prec();
    let q = ctx.q();
    let z2 = Complex::with_val(prec, z.square_ref());
    let r2 = Float::with_val(prec, z2.abs_ref());
    // Terms on either side decay like q^|k| once q^{2k} is far from |z|^2;
    // stop when that regime is reached and the term is below tolerance.
    let stop = Float::with_val(prec, 1 - q) * ctx.trunc_tol();
    let mut sum = Complex::new(prec);
    let two_z = Complex::with_val(prec, z * 2u32);

    let mut qk = Float::with_val(prec, 1);
    loop {
        let q2k = Float::with_val(prec, qk.square_ref());
        let term = Complex::with_val(prec, &two_z * &qk) / Complex::with_val(prec, &z2 - &q2k);
        let small = cabs(&term) < stop;
        sum += &term;
        if small && q2k * 4u32 < r2 {
            break;
        }
        qk *= q;
    }
    let mut qk = Float::with_val(prec, q.recip_ref());
    loop {
        let q2k = Float::with_val(prec, qk.square_ref());
        let term = Complex::with_val(prec, &two_z * &qk) / Complex::with_val(prec, &z2 - &q2k);
        let small = cabs(&term) < stop;
        sum += &term;
        if small && q2k > Float::with_val(prec, &r2 * 4u32) {
            break;
        }
        qk /= q;
    }
    sum
}

/// Product form without the normalizing constant:
/// `z (q z^2, q z^-2; q^2)_inf / (z^2, q^2 z^-2; q^2)_inf`.
pub fn hq_product_raw(z: &Complex, ctx: &QContext) -> Result<Complex> {
    check_off_lattice(z, "h_q product", ctx)?;
    Ok(gh_raw(z, ctx)? / gfun(z, ctx)?)
}

/// Numerator of the product form, `z (q z^2; q^2)_inf (q z^-2; q^2)_inf`.
/// It equals `g(z) h_q(z) / c1` and is analytic on `C \ {0}`.
pub fn gh_raw(z: &Complex, ctx: &QContext) -> Result<Complex> {
    let prec = ctx.prec();
    let q = ctx.q();
    let q2 = q_squared(ctx);
    let z2 = Complex::with_val(prec, z.square_ref());
    let a = Complex::with_val(prec, &z2 * q);
    let b = Complex::with_val(prec, q / &z2);
    Ok(Complex::with_val(prec, z * pochhammer_inf(&a, &q2, ctx)?) * pochhammer_inf(&b, &q2, ctx)?)
}

/// Reference point that fixes the product-form constant `c1`.
pub fn c1_reference_point(ctx: &QContext) -> Complex {
    ctx.polar(&ctx.dec("0.4"), 0.125)
}

/// Off-lattice points used to confirm that `c1` does not depend on `z`.
pub fn c1_check_points(ctx: &QContext) -> Vec<Complex> {
    [
        ("0.35", 0.31),
        ("0.52", 0.07),
        ("0.61", 0.45),
        ("0.77", 0.83),
        ("0.93", 0.19),
        ("1.21", 0.66),
        ("1.47", 0.38),
        ("1.83", 0.91),
        ("2.6", 0.14),
        ("3.3", 0.57),
    ]
    .iter()
    .map(|(r, a)| ctx.polar(&ctx.dec(r), *a))
    .collect()
}

/// Calibrated product-form constant and its spread over the check points.
#[derive(Debug, Clone)]
pub struct C1Calibration {
    pub c1: Float,
    /// Largest relative deviation of `h_q / raw product` from `c1`.
    pub spread: Float,
    /// `|Im c1| / |c1|` at the reference point; `c1` is real.
    pub imag_ratio: Float,
}

/// Matches the series and product forms at the reference point and measures
/// how constant the ratio is elsewhere.
pub fn calibrate_c1(ctx: &QContext) -> Result<C1Calibration> {
    let prec = ctx.prec();
    let zr = c1_reference_point(ctx);
    let c1c = hq_series(&zr, ctx)? / hq_product_raw(&zr, ctx)?;
    let imag_ratio = Float::with_val(prec, c1c.imag().abs_ref()) / cabs(&c1c);
    let mut spread = Float::new(prec);
    for z in c1_check_points(ctx) {
        let r = hq_series(&z, ctx)? / hq_product_raw(&z, ctx)?;
        let d = rel_diff(&r, &c1c);
        if d > spread {
            spread = d;
        }
    }
    Ok(C1Calibration {
        c1: c1c.real().clone(),
        spread,
        imag_ratio,
    })
}

/// The four special functions bound to one context, with `c1` calibrated.
#[derive(Debug, Clone)]
pub struct SpecialFunctionSet {
    ctx: QContext,
    c1: Float,
}

impl SpecialFunctionSet {
    pub fn new(ctx: &QContext) -> Result<Self> {
        let cal = calibrate_c1(ctx)?;
        Ok(SpecialFunctionSet {
            ctx: ctx.clone(),
            c1: cal.c1,
        })
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn c1(&self) -> &Float {
        &self.c1
    }

    pub fn w(&self, x: &Complex) -> Result<Complex> {
        weight_w(x, &self.ctx)
    }

    pub fn g(&self, z: &Complex) -> Result<Complex> {
        gfun(z, &self.ctx)
    }

    pub fn omega(&self, t: &Complex) -> Result<Complex> {
        omegafun(t, &self.ctx)
    }

    pub fn h(&self, z: &Complex) -> Result<Complex> {
        hq_series(z, &self.ctx)
    }

    /// Product form `c1 z (q z^2, q z^-2; q^2) / (z^2, q^2 z^-2; q^2)`.
    pub fn h_product(&self, z: &Complex) -> Result<Complex> {
        Ok(hq_product_raw(z, &self.ctx)? * &self.c1)
    }

    /// `g(z) h_q(z)` through the entire product; finite on the lattice.
    pub fn gh(&self, z: &Complex) -> Result<Complex> {
        Ok(gh_raw(z, &self.ctx)? * &self.c1)
    }
}

/// The two lattice limits and their product.
#[derive(Debug, Clone)]
pub struct LimitConstants {
    pub c0: Float,
    pub calh: Float,
    /// `c0 * calH`, equal to 1.
    pub product: Float,
    /// `k` at which the `c0` sequence stabilized.
    pub k_final: i64,
    /// Successive differences `|c0(k) - c0(k-1)|` along the scan.
    pub c0_steps: Vec<Float>,
    /// Difference between the offset-`eps` and offset-`eps/2` estimates of `calH`.
    pub calh_offset_change: Float,
}

/// `(g h)(z)` at a lattice point, from the symmetric offsets `z (1 +- eps)`.
fn gh_symmetric(z: &Float, eps: &Float, ctx: &QContext) -> Result<Float> {
    let prec = ctx.prec();
    let mut acc = Float::new(prec);
    for s in [1i32, -1] {
        let f = Float::with_val(prec, eps * s) + 1u32;
        let zz = Complex::with_val(prec, (Float::with_val(prec, z * &f), 0));
        let v = gfun(&zz, ctx)? * hq_series_unchecked(&zz, ctx);
        acc += v.real();
    }
    Ok(acc / 2u32)
}

/// Richardson-combined symmetric-offset value: the `O(eps^2)` error of the
/// symmetric average cancels in `(4 V(eps/2) - V(eps)) / 3`.
fn gh_limit(z: &Float, ctx: &QContext) -> Result<(Float, Float)> {
    let eps = ctx.limit_offset();
    let half = Float::with_val(ctx.prec(), &eps / 2u32);
    let v1 = gh_symmetric(z, &eps, ctx)?;
    let v2 = gh_symmetric(z, &half, ctx)?;
    let change = Float::with_val(ctx.prec(), &v2 - &v1).abs();
    let lim = (Float::with_val(ctx.prec(), &v2 * 4u32) - v1) / 3u32;
    Ok((lim, change))
}

/// `1 / (g(q^-k)^2 w(q^-k) h_q(q^-k)^2)` for one `k`.
pub fn c0_at(k: i64, ctx: &QContext) -> Result<Float> {
    let z = ctx.qpow(-k);
    let (gh, _) = gh_limit(&z, ctx)?;
    let w = weight_w_real(&z, ctx)?;
    let f = Float::with_val(ctx.prec(), gh.square_ref()) * w;
    Ok(f.recip())
}

/// `calH = omega(q) (g h_q)(q)^2` via symmetric offsets.
pub fn calh_limit(ctx: &QContext) -> Result<(Float, Float)> {
    let (gh, change) = gh_limit(ctx.q(), ctx)?;
    let om = omegafun(&ctx.cx_real(ctx.q()), ctx)?;
    let v = Float::with_val(ctx.prec(), gh.square_ref()) * om.real();
    Ok((v, change))
}

/// `c0` as the stabilized value of the lattice sequence, and `calH`.
///
/// Successive `c0(k)` differ by about `q^{4k}`, so the scan starts a few steps
/// before that reaches `trunc_tol` and runs until the change drops below it.
pub fn limit_c0_calh(ctx: &QContext) -> Result<LimitConstants> {
    let prec = ctx.prec();
    let k_est = (ctx.tol_exponent() / 4.0).ceil() as i64;
    let k_start = (k_est - 6).max(1);
    let k_max = k_est + 24;
    let mut prev = c0_at(k_start, ctx)?;
    let mut steps = Vec::new();
    let mut k = k_start;
    let c0 = loop {
        k += 1;
        let cur = c0_at(k, ctx)?;
        let d = Float::with_val(prec, &cur - &prev).abs();
        let done = d <= Float::with_val(prec, cur.abs_ref()) * ctx.trunc_tol();
        steps.push(d.clone());
        if done {
            break cur;
        }
        if k >= k_max {
            return Err(QError::NonConvergence {
                what: "c0 lattice sequence",
                change: d.to_string_radix(10, Some(4)),
            });
        }
        prev = cur;
    };
    let (calh, calh_offset_change) = calh_limit(ctx)?;
    let product = Float::with_val(prec, &c0 * &calh);
    Ok(LimitConstants {
        c0,
        calh,
        product,
        k_final: k,
        c0_steps: steps,
        calh_offset_change,
    })
}

/// One row of a ray scan of `h_q`.
#[derive(Debug, Clone)]
pub struct RayPoint {
    pub r: Float,
    pub re: Float,
    pub im: Float,
}

/// `h_q(r e^{i angle})` along a ray.
pub fn hq_ray_scan(r_grid: &[Float], angle: &Float, ctx: &QContext) -> Result<Vec<RayPoint>> {
    r_grid
        .iter()
        .map(|r| {
            let z = ctx.polar_angle(r, angle);
            let h = hq_series(&z, ctx)?;
            Ok(RayPoint {
                r: r.clone(),
                re: h.real().clone(),
                im: h.imag().clone(),
            })
        })
        .collect()
}

/// Largest `|Re h_q|` over `samples` equally spaced points on `|z| = radius`,
/// offset by half a step so no sample sits on the real axis.
pub fn max_real_part_on_circle(radius: &Float, samples: usize, ctx: &QContext) -> Result<Float> {
    let prec = ctx.prec();
    let mut worst = Float::new(prec);
    for j in 0..samples {
        let frac = (2.0 * j as f64 + 1.0) / samples as f64;
        let z = ctx.polar(radius, frac);
        let h = hq_series(&z, ctx)?;
        let re = Float::with_val(prec, h.real().abs_ref());
        if re > worst {
            worst = re;
        }
    }
    Ok(worst)
}
