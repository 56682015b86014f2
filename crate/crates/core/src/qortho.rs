//! Moments, monic orthogonal polynomials on the shifted lattice `+-c q^k`,
//! norms and recurrence coefficients, second-kind functions, and the
//! polynomial identities satisfied by the family.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{QError, Result};
use crate::qcore::{cabs, decimal, q_integer, QContext};
use crate::specfun::{hq_series, weight_w, weight_w_real};

/// Positive half of the lattice `c q^k`, `-K- <= k <= K+`, with the Jackson
/// masses `w(c q^k) q^k`. The negative half mirrors it because `w` is even.
#[derive(Debug, Clone)]
pub struct Lattice {
    c: Float,
    nodes: Vec<Float>,
    masses: Vec<Float>,
}

impl Lattice {
    pub fn new(c: &Float, ctx: &QContext) -> Result<Self> {
        if *c <= 0 {
            return Err(QError::InvalidShift(c.to_string_radix(10, Some(10))));
        }
        let prec = ctx.prec();
        let mut nodes = Vec::new();
        let mut masses = Vec::new();
        for k in -ctx.k_neg()..=ctx.k_pos() {
            let qk = ctx.qpow(k);
            let x = Float::with_val(prec, c * &qk);
            let m = weight_w_real(&x, ctx)? * &qk;
            nodes.push(x);
            masses.push(m);
        }
        Ok(Lattice {
            c: Float::with_val(prec, c),
            nodes,
            masses,
        })
    }

    pub fn c(&self) -> &Float {
        &self.c
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn masses(&self) -> &[Float] {
        &self.masses
    }

    /// `sum_k [f(x_k) + f(-x_k)] m_k` in ascending `k`.
    pub fn integrate<F>(&self, f: F) -> Float
    where
        F: Fn(&Float) -> Float,
    {
        let prec = self.c.prec();
        let mut s = Float::new(prec);
        for (x, m) in self.nodes.iter().zip(&self.masses) {
            let neg = Float::with_val(prec, -x);
            s += (f(x) + f(&neg)) * m;
        }
        s
    }
}

/// Even moments `m[2k]` of the shifted weight; odd entries are exact zeros.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub c: Float,
    /// `m[j]` for `j = 0..=2K`.
    pub m: Vec<Float>,
    pub normalized: bool,
}

impl MomentTable {
    /// Table rescaled so that `m[0] = 1`.
    pub fn normalized(&self) -> MomentTable {
        let m0 = self.m[0].clone();
        MomentTable {
            c: self.c.clone(),
            m: self.m.iter().map(|v| Float::with_val(v.prec(), v / &m0)).collect(),
            normalized: true,
        }
    }
}

/// `m[j] = int (c x)^j w(c x) d_q x` for `j = 0..=two_k`.
pub fn compute_moments(c: &Float, two_k: usize, ctx: &QContext) -> Result<MomentTable> {
    let lattice = Lattice::new(c, ctx)?;
    Ok(moments_on(&lattice, two_k, ctx))
}

pub(crate) fn moments_on(lattice: &Lattice, two_k: usize, ctx: &QContext) -> MomentTable {
    let prec = ctx.prec();
    let m = (0..=two_k)
        .map(|j| {
            if j % 2 == 1 {
                Float::new(prec)
            } else {
                let e = j as i32;
                lattice.integrate(|x| Float::with_val(prec, x.pow(e)))
            }
        })
        .collect();
    MomentTable {
        c: lattice.c().clone(),
        m,
        normalized: false,
    }
}

/// Monic orthogonal polynomials `P_0..P_N` on one shifted lattice, with norms
/// `gamma_n` and recurrence coefficients `alpha_n = gamma_n / gamma_{n-1}`
/// (`alpha_0 = 0`).
#[derive(Debug, Clone)]
pub struct MonicPolySeq {
    ctx: QContext,
    lattice: Lattice,
    coeffs: Vec<Vec<Float>>,
    gamma: Vec<Float>,
    alpha: Vec<Float>,
}

/// Number of precision doublings attempted when a norm turns non-positive.
const MAX_PRECISION_RETRIES: usize = 2;

/// Builds `P_0..P_N` by the three-term recurrence with inner products taken
/// pointwise on the lattice. A non-positive norm doubles the precision and
/// restarts.
pub fn build_polys(c: &Float, n_max: usize, ctx: &QContext) -> Result<MonicPolySeq> {
    let mut ctx = ctx.clone();
    let mut attempt = 0;
    loop {
        let c_here = Float::with_val(ctx.prec(), c);
        match build_once(&c_here, n_max, &ctx) {
            Err(QError::LossOfPositivity(_)) if attempt < MAX_PRECISION_RETRIES => {
                attempt += 1;
                ctx = ctx.with_precision(ctx.prec() * 2);
            }
            other => return other,
        }
    }
}

fn build_once(c: &Float, n_max: usize, ctx: &QContext) -> Result<MonicPolySeq> {
    let prec = ctx.prec();
    let lattice = Lattice::new(c, ctx)?;
    let nodes = lattice.nodes();
    let masses = lattice.masses();
    // Values at the positive nodes suffice: P_n(-x)^2 = P_n(x)^2.
    let norm = |vals: &[Float]| {
        let mut s = Float::new(prec);
        for (v, m) in vals.iter().zip(masses) {
            s += Float::with_val(prec, v.square_ref()) * m;
        }
        s * 2u32
    };
    let mut prev: Vec<Float> = vec![Float::with_val(prec, 1); nodes.len()];
    let mut cur: Vec<Float> = nodes.to_vec();
    let mut gamma = vec![norm(&prev)];
    let mut alpha = vec![Float::new(prec)];
    let mut coeffs = vec![vec![Float::with_val(prec, 1)]];
    if n_max >= 1 {
        coeffs.push(vec![Float::new(prec), Float::with_val(prec, 1)]);
    }
    for n in 1..=n_max {
        let g = norm(&cur);
        if g <= 0 {
            return Err(QError::LossOfPositivity(n));
        }
        let a = Float::with_val(prec, &g / &gamma[n - 1]);
        gamma.push(g);
        if n == n_max {
            alpha.push(a);
            break;
        }
        let next: Vec<Float> = cur
            .iter()
            .zip(&prev)
            .zip(nodes)
            .map(|((p, pm), x)| Float::with_val(prec, x * p) - Float::with_val(prec, &a * pm))
            .collect();
        let mut cn = vec![Float::new(prec)];
        cn.extend(coeffs[n].iter().cloned());
        for (j, cj) in coeffs[n - 1].iter().enumerate() {
            cn[j] -= Float::with_val(prec, &a * cj);
        }
        coeffs.push(cn);
        alpha.push(a);
        prev = cur;
        cur = next;
    }
    Ok(MonicPolySeq {
        ctx: ctx.clone(),
        lattice,
        coeffs,
        gamma,
        alpha,
    })
}

impl MonicPolySeq {
    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn c(&self) -> &Float {
        self.lattice.c()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n_max(&self) -> usize {
        self.gamma.len() - 1
    }

    /// Coefficients of `P_n`, lowest degree first.
    pub fn coeffs(&self, n: usize) -> &[Float] {
        &self.coeffs[n]
    }

    pub fn gamma(&self, n: usize) -> &Float {
        &self.gamma[n]
    }

    pub fn alpha(&self, n: usize) -> &Float {
        &self.alpha[n]
    }

    pub fn gammas(&self) -> &[Float] {
        &self.gamma
    }

    pub fn alphas(&self) -> &[Float] {
        &self.alpha
    }

    pub fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(QError::DegreeOutOfRange {
                n,
                max: self.n_max(),
            });
        }
        Ok(())
    }

    /// `P_n(z)` by the three-term recurrence.
    pub fn eval(&self, n: usize, z: &Complex) -> Result<Complex> {
        self.check_degree(n)?;
        let prec = self.ctx.prec();
        let mut pm = Complex::with_val(prec, (1, 0));
        if n == 0 {
            return Ok(pm);
        }
        let mut p = z.clone();
        for k in 1..n {
            let next = Complex::with_val(prec, z * &p) - Complex::with_val(prec, &pm * &self.alpha[k]);
            pm = p;
            p = next;
        }
        Ok(p)
    }

    /// `P_n(x)` at a real point by Horner's rule on the coefficient array.
    pub fn eval_coeffs_real(&self, n: usize, x: &Float) -> Float {
        let prec = self.ctx.prec();
        let mut s = Float::new(prec);
        for c in self.coeffs[n].iter().rev() {
            s = Float::with_val(prec, &s * x) + c;
        }
        s
    }

    /// `P_n(z)` by Horner's rule on the coefficient array.
    pub fn eval_coeffs(&self, n: usize, z: &Complex) -> Complex {
        let prec = self.ctx.prec();
        let mut s = Complex::new(prec);
        for c in self.coeffs[n].iter().rev() {
            s = Complex::with_val(prec, &s * z) + c;
        }
        s
    }
}

impl Serialize for MonicPolySeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let dec = |v: &[Float]| v.iter().map(decimal).collect::<Vec<_>>();
        let mut s = serializer.serialize_struct("MonicPolySeq", 7)?;
        s.serialize_field("q", &decimal(self.ctx.q()))?;
        s.serialize_field("c", &decimal(self.c()))?;
        s.serialize_field("precision_bits", &self.ctx.prec())?;
        s.serialize_field("n_max", &self.n_max())?;
        s.serialize_field("coeffs", &self.coeffs.iter().map(|c| dec(c)).collect::<Vec<_>>())?;
        s.serialize_field("gamma", &dec(&self.gamma))?;
        s.serialize_field("alpha", &dec(&self.alpha))?;
        s.end()
    }
}

/// Largest `|<P_n, P_m>| / sqrt(gamma_n gamma_m)` over `n != m`, with the
/// polynomials evaluated from their coefficient arrays on both lattice halves.
pub fn verify_orthogonality(seq: &MonicPolySeq) -> Float {
    let prec = seq.ctx.prec();
    let lat = &seq.lattice;
    let n_max = seq.n_max();
    let eval_all = |sign: i32| -> Vec<Vec<Float>> {
        (0..=n_max)
            .map(|n| {
                lat.nodes()
                    .iter()
                    .map(|x| seq.eval_coeffs_real(n, &Float::with_val(prec, x * sign)))
                    .collect()
            })
            .collect()
    };
    let pos = eval_all(1);
    let neg = eval_all(-1);
    let mut worst = Float::new(prec);
    for n in 0..=n_max {
        for m in 0..n {
            let mut s = Float::new(prec);
            for (i, w) in lat.masses().iter().enumerate() {
                let both = Float::with_val(prec, &pos[n][i] * &pos[m][i])
                    + Float::with_val(prec, &neg[n][i] * &neg[m][i]);
                s += both * w;
            }
            let scale = Float::with_val(prec, &seq.gamma[n] * &seq.gamma[m]).sqrt();
            let r = s.abs() / scale;
            if r > worst {
                worst = r;
            }
        }
    }
    worst
}

/// Side of the contour on which a second-kind function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Inside the contour (encloses `+-q^k`, `k >= 0`).
    Interior,
    /// Outside the contour.
    Exterior,
}

/// Cauchy-Jackson transform `int P_n(x) w(x) / (z - x) d_q x`. The interior
/// variant subtracts `P_n(z) w(z) h_q(z)`, which removes the poles at the
/// enclosed lattice points.
pub fn second_kind(seq: &MonicPolySeq, n: usize, z: &Complex, side: Side) -> Result<Complex> {
    seq.check_degree(n)?;
    let ctx = &seq.ctx;
    let prec = ctx.prec();
    let guard = ctx.guard_radius();
    let lat = &seq.lattice;
    let mut s = Complex::new(prec);
    let sign = if n.is_multiple_of(2) { 1i32 } else { -1 };
    for (x, m) in lat.nodes().iter().zip(lat.masses()) {
        let p = seq.eval_coeffs_real(n, x);
        let dp = Complex::with_val(prec, z - x);
        let dm = Complex::with_val(prec, z + x);
        if cabs(&dp) < guard || cabs(&dm) < guard {
            return Err(QError::PoleProximity {
                what: "second-kind function",
                point: z.real().to_string_radix(10, Some(8)),
                radius: guard.to_string_radix(10, Some(4)),
            });
        }
        let pm = Float::with_val(prec, &p * m);
        let term = Complex::with_val(prec, (&pm, 0)) / dp
            + Complex::with_val(prec, (Float::with_val(prec, &pm * sign), 0)) / dm;
        s += term;
    }
    match side {
        Side::Exterior => Ok(s),
        Side::Interior => {
            let pwh = seq.eval(n, z)? * weight_w(z, ctx)? * hq_series(z, ctx)?;
            Ok(s - pwh)
        }
    }
}

/// Residual of the lowering identity
/// `D_{1/q} P_n = [n]_{1/q} P_{n-1} + q^{n-3}/(1/q - 1) alpha_n alpha_{n-1} alpha_{n-2} P_{n-3}`,
/// as the largest coefficient of the difference over the largest coefficient
/// of `D_{1/q} P_n`. The `alpha` values may be overridden to probe sensitivity.
pub fn ladder_check(seq: &MonicPolySeq, n: usize) -> Result<Float> {
    ladder_check_with(seq, n, seq.alphas())
}

/// [`ladder_check`] with caller-supplied recurrence coefficients.
pub fn ladder_check_with(seq: &MonicPolySeq, n: usize, alpha: &[Float]) -> Result<Float> {
    if n < 3 {
        return Err(QError::InvalidInput(format!("ladder identity needs n >= 3 (got {n})")));
    }
    seq.check_degree(n)?;
    let ctx = &seq.ctx;
    let prec = ctx.prec();
    let qinv = Float::with_val(prec, ctx.q().recip_ref());
    let qinv_m1 = Float::with_val(prec, &qinv - 1u32);
    // D_{1/q} x^j = [j]_{1/q} x^{j-1}
    let dp: Vec<Float> = (1..=n)
        .map(|j| q_integer(j as i64, &qinv) * &seq.coeffs[n][j])
        .collect();
    let nq = q_integer(n as i64, &qinv);
    let k = ctx.qpow(n as i64 - 3) / &qinv_m1
        * &alpha[n]
        * &alpha[n - 1]
        * &alpha[n - 2];
    let mut r = dp.clone();
    for (j, c) in seq.coeffs[n - 1].iter().enumerate() {
        r[j] -= Float::with_val(prec, &nq * c);
    }
    for (j, c) in seq.coeffs[n - 3].iter().enumerate() {
        r[j] -= Float::with_val(prec, &k * c);
    }
    let max_abs = |v: &[Float]| {
        v.iter()
            .map(|x| Float::with_val(prec, x.abs_ref()))
            .fold(Float::new(prec), |a, b| if b > a { b } else { a })
    };
    Ok(max_abs(&r) / max_abs(&dp))
}

/// Largest scaled residual over `samples` of
/// `P_n(z/q) - (1 - q^{n-3} z^2 alpha_n) P_n(z)
///  - ((q^-n - 1) z - z alpha_n alpha_{n-1} q^{n-3} + z^3 alpha_n q^{n-3}) P_{n-1}(z)`.
pub fn pnqdiff_check(seq: &MonicPolySeq, n: usize, samples: &[Complex]) -> Result<Float> {
    if n < 1 {
        return Err(QError::InvalidInput("q-difference identity needs n >= 1".into()));
    }
    seq.check_degree(n)?;
    let ctx = &seq.ctx;
    let prec = ctx.prec();
    let a = &seq.alpha[n];
    let am = &seq.alpha[n - 1];
    let qn3 = ctx.qpow(n as i64 - 3);
    let qmn = ctx.qpow(-(n as i64)) - 1u32;
    let mut worst = Float::new(prec);
    for z in samples {
        let zq = Complex::with_val(prec, z / ctx.q());
        let p_zq = seq.eval(n, &zq)?;
        let p = seq.eval(n, z)?;
        let pm = seq.eval(n - 1, z)?;
        let z2 = Complex::with_val(prec, z.square_ref());
        let z3 = Complex::with_val(prec, &z2 * z);
        let qa = Float::with_val(prec, &qn3 * a);
        let c1 = Complex::with_val(prec, 1) - Complex::with_val(prec, &z2 * &qa);
        let c2 = Complex::with_val(prec, z * &qmn)
            - Complex::with_val(prec, z * Float::with_val(prec, &qa * am))
            + Complex::with_val(prec, &z3 * &qa);
        let t1 = Complex::with_val(prec, &c1 * &p);
        let t2 = Complex::with_val(prec, &c2 * &pm);
        let res = Complex::with_val(prec, &p_zq - &t1) - &t2;
        let scale = [cabs(&p_zq), cabs(&t1), cabs(&t2)]
            .into_iter()
            .fold(Float::new(prec), |x, y| if y > x { y } else { x });
        if scale.is_zero() {
            continue;
        }
        let r = cabs(&res) / scale;
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

fn det(mut a: Vec<Vec<Float>>) -> Float {
    let n = a.len();
    let prec = a.first().map(|r| r[0].prec()).unwrap_or(64);
    let mut d = Float::with_val(prec, 1);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .clone()
                    .abs()
                    .partial_cmp(&a[j][col].clone().abs())
                    .expect("finite entries")
            })
            .expect("non-empty column");
        if a[piv][col].is_zero() {
            return Float::new(prec);
        }
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        for r in col + 1..n {
            let f = Float::with_val(prec, &a[r][col] / &a[col][col]);
            for k in col..n {
                let t = Float::with_val(prec, &f * &a[col][k]);
                a[r][k] -= t;
            }
        }
        d *= &a[col][col];
    }
    d
}

/// Coefficients of monic `P_n` from the moment determinants:
/// `P_n(x) = det[m_{i+j} | x^j] / D_{n-1}`, expanded along the last row, so
/// the coefficient of `x^j` is `(-1)^{n+j} M_j / D_{n-1}` with `M_j` the minor
/// that drops column `j`.
pub fn hankel_poly(moments: &MomentTable, n: usize) -> Result<Vec<Float>> {
    if moments.m.len() < 2 * n {
        return Err(QError::InvalidInput(format!(
            "need moments up to order {} for degree {n}",
            2 * n - 1
        )));
    }
    let prec = moments.m[0].prec();
    if n == 0 {
        return Ok(vec![Float::with_val(prec, 1)]);
    }
    let full: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..=n).map(|j| moments.m[i + j].clone()).collect())
        .collect();
    let minor = |skip: usize| -> Float {
        let rows = full
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        det(rows)
    };
    let d = minor(n);
    Ok((0..=n)
        .map(|j| {
            let s = if (n + j).is_multiple_of(2) { 1i32 } else { -1 };
            minor(j) * s / &d
        })
        .collect())
}

/// The two sides of the norm ratio relating the `c = 1` and `c = q^{1/2}`
/// families: `gamma_1(1) / gamma_1(q^{1/2})` and
/// `q^{1/2} h_q(e^{i pi/4}) / h_q(q^{1/2} e^{i pi/4})`.
pub fn gamma_ratio_check(ctx: &QContext) -> Result<(Float, Complex)> {
    let prec = ctx.prec();
    let one = Float::with_val(prec, 1);
    let sq = Float::with_val(prec, ctx.q().sqrt_ref());
    let lhs = {
        let a = build_polys(&one, 1, ctx)?;
        let b = build_polys(&sq, 1, ctx)?;
        Float::with_val(prec, a.gamma(1) / b.gamma(1))
    };
    let zeta = ctx.polar(&one, 0.25);
    let zs = ctx.polar(&sq, 0.25);
    let rhs = hq_series(&zeta, ctx)? / hq_series(&zs, ctx)? * &sq;
    Ok((lhs, rhs))
}
