//! Near-field and far-field parametrices of the Riemann-Hilbert problem,
//! their jump and limit conditions, and the residual of gluing them across
//! a circle between lattice shells.

use rug::{Complex, Float};

use crate::error::{QError, Result};
use crate::qcore::{cabs, fitted_ratio, pochhammer_inf, QContext};
use crate::qseries::{estimate_cpsi, solve_connection, ConnectionConstants, ConnectionPoints, SeriesKind, SeriesSet};
use crate::specfun::{hq_series_unchecked, limit_c0_calh, LimitConstants, SpecialFunctionSet};

/// A 2x2 complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix2(pub [[Complex; 2]; 2]);

impl Matrix2 {
    pub fn new(m00: Complex, m01: Complex, m10: Complex, m11: Complex) -> Self {
        Matrix2([[m00, m01], [m10, m11]])
    }

    pub fn identity(prec: u32) -> Self {
        let one = Complex::with_val(prec, (1, 0));
        let zero = Complex::new(prec);
        Matrix2::new(one.clone(), zero.clone(), zero, one)
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.0[i][j]
    }

    fn prec(&self) -> u32 {
        self.0[0][0].prec().0
    }

    pub fn mul(&self, other: &Matrix2) -> Matrix2 {
        let p = self.prec();
        let e = |i: usize, j: usize| {
            Complex::with_val(p, &self.0[i][0] * &other.0[0][j]) + Complex::with_val(p, &self.0[i][1] * &other.0[1][j])
        };
        Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self) -> Complex {
        let p = self.prec();
        Complex::with_val(p, &self.0[0][0] * &self.0[1][1]) - Complex::with_val(p, &self.0[0][1] * &self.0[1][0])
    }

    pub fn inverse(&self) -> Result<Matrix2> {
        let p = self.prec();
        let d = self.det();
        if d.is_zero() {
            return Err(QError::InvalidInput("singular 2x2 matrix".into()));
        }
        let [[a, b], [c, e]] = &self.0;
        Ok(Matrix2::new(
            Complex::with_val(p, e / &d),
            -Complex::with_val(p, b / &d),
            -Complex::with_val(p, c / &d),
            Complex::with_val(p, a / &d),
        ))
    }

    /// Largest `|m_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Matrix2) -> Float {
        let p = self.prec();
        let mut worst = Float::new(p);
        for i in 0..2 {
            for j in 0..2 {
                let d = cabs(&Complex::with_val(p, &self.0[i][j] - &other.0[i][j]));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Max-entry norm of `M - I`.
    pub fn deviation_from_identity(&self) -> Float {
        self.max_abs_diff(&Matrix2::identity(self.prec()))
    }
}

/// Which side of the contour a matrix value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Bounded side, containing the lattice points `+-q^k`, `k >= 0`.
    Interior,
    Exterior,
}

#[derive(Debug, Clone)]
pub struct ParametrixMatrix {
    pub value: Matrix2,
    pub region: Region,
}

/// All constants and series needed to assemble both parametrices.
#[derive(Debug, Clone)]
pub struct Parametrix {
    sf: SpecialFunctionSet,
    series: SeriesSet,
    connection: ConnectionConstants,
    limits: LimitConstants,
    c_psi: Complex,
    /// `calH` as used by the far field; differs from `limits.calh` only in
    /// deliberately perturbed copies.
    calh_far: Float,
}

impl Parametrix {
    pub fn new(ctx: &QContext) -> Result<Self> {
        let sf = SpecialFunctionSet::new(ctx)?;
        let series = SeriesSet::new(ctx)?;
        let connection = solve_connection(&series, &sf, &ConnectionPoints::standard(ctx))?;
        let limits = limit_c0_calh(ctx)?;
        let c_psi = estimate_cpsi(&series, &sf)?.value;
        let calh_far = limits.calh.clone();
        Ok(Parametrix {
            sf,
            series,
            connection,
            limits,
            c_psi,
            calh_far,
        })
    }

    /// Copy whose far field is built as if `c0` were `factor * c0`, i.e. with
    /// `calH` replaced by `1 / (factor * c0)`.
    pub fn with_perturbed_c0(&self, factor: f64) -> Self {
        let prec = self.ctx().prec();
        let mut out = self.clone();
        out.calh_far = Float::with_val(prec, &self.limits.c0 * factor).recip();
        out
    }

    pub fn ctx(&self) -> &QContext {
        self.sf.ctx()
    }

    pub fn special_functions(&self) -> &SpecialFunctionSet {
        &self.sf
    }

    pub fn series(&self) -> &SeriesSet {
        &self.series
    }

    pub fn connection(&self) -> &ConnectionConstants {
        &self.connection
    }

    pub fn limits(&self) -> &LimitConstants {
        &self.limits
    }

    pub fn c_psi(&self) -> &Complex {
        &self.c_psi
    }

    fn s(&self, k: SeriesKind, z: &Complex) -> Result<Complex> {
        self.series.eval(k, z)
    }

    /// Jump factor `[[1/g, w g h], [0, g]]` across the near-field contour.
    pub fn near_jump(&self, z: &Complex) -> Result<Matrix2> {
        let p = self.ctx().prec();
        let g = self.sf.g(z)?;
        let wgh = self.sf.w(z)? * self.sf.gh(z)?;
        Ok(Matrix2::new(Complex::with_val(p, g.recip_ref()), wgh, Complex::new(p), g))
    }

    /// Near-field matrix. Interior:
    /// `[[a/eta2, lambda2/(eta2 lambda1) w b], [lambda3 b, lambda4 w a]]`;
    /// exterior: interior times the jump factor, assembled directly from
    /// `phi_odd`, `phi_even` so it stays finite at the poles of `w`.
    pub fn nearfield(&self, z: &Complex, region: Region) -> Result<ParametrixMatrix> {
        let p = self.ctx().prec();
        let cc = &self.connection;
        let [l1, l2, l3, l4] = &cc.lambda;
        let eta2 = &cc.eta[1];
        let a = self.s(SeriesKind::A, z)?;
        let b = self.s(SeriesKind::B, z)?;
        let value = match region {
            Region::Interior => {
                let w = self.sf.w(z)?;
                let k12 = Complex::with_val(p, l2 / eta2) / l1;
                Matrix2::new(
                    Complex::with_val(p, &a / eta2),
                    k12 * &w * &b,
                    Complex::with_val(p, l3 * &b),
                    Complex::with_val(p, l4 * &w) * &a,
                )
            }
            Region::Exterior => {
                let g = self.sf.g(z)?;
                let e2g = Complex::with_val(p, eta2 * &g);
                Matrix2::new(
                    Complex::with_val(p, &a / &e2g),
                    self.s(SeriesKind::PhiOdd, z)? / Complex::with_val(p, eta2 * l1),
                    Complex::with_val(p, l3 * &b) / &g,
                    self.s(SeriesKind::PhiEven, z)?,
                )
            }
        };
        Ok(ParametrixMatrix { value, region })
    }

    /// Expected large-`z` limit `[[1, 0], [c0 h(z), 1]]` of the exterior near field.
    pub fn nearfield_limit(&self, z: &Complex) -> Result<Matrix2> {
        let p = self.ctx().prec();
        let c0h = self.sf.h(z)? * &self.limits.c0;
        let one = Complex::with_val(p, (1, 0));
        Ok(Matrix2::new(one.clone(), Complex::new(p), c0h, one))
    }

    /// Far-field matrix. The interior (small `t`) branch is
    /// `[[a_inf/g, mu2 calH psi_odd], [b_inf/(g mu4 calH c_psi), varpsi_even/c_psi]]`;
    /// the exterior branch moves the `1/g` factor from the first column to
    /// the second.
    pub fn farfield(&self, t: &Complex, region: Region) -> Result<ParametrixMatrix> {
        let p = self.ctx().prec();
        let mu = &self.connection.mu;
        let calh = &self.calh_far;
        let g = self.sf.g(t)?;
        let ainf = self.s(SeriesKind::AInf, t)?;
        let binf = self.s(SeriesKind::BInf, t)?;
        let m12 = Complex::with_val(p, &mu[1] * calh) * self.s(SeriesKind::PsiOdd, t)?;
        let den21 = Complex::with_val(p, &mu[3] * calh) * &self.c_psi;
        let m21 = binf / den21;
        let m22 = self.s(SeriesKind::VarPsiEven, t)? / &self.c_psi;
        let value = match region {
            Region::Interior => Matrix2::new(ainf / &g, m12, m21 / &g, m22),
            Region::Exterior => Matrix2::new(ainf, m12 / &g, m21, m22 / &g),
        };
        Ok(ParametrixMatrix { value, region })
    }

    /// Expected small-`t` limit `[[mu2, 0], [h(t)/(calH c_psi), 1/c_psi]]` of
    /// the interior far field.
    pub fn farfield_small_limit(&self, t: &Complex) -> Result<Matrix2> {
        let p = self.ctx().prec();
        let hc = Complex::with_val(p, &self.c_psi * &self.calh_far);
        Ok(Matrix2::new(
            self.connection.mu[1].clone(),
            Complex::new(p),
            self.sf.h(t)? / hc,
            Complex::with_val(p, self.c_psi.recip_ref()),
        ))
    }

    /// Relative mismatch of the residue relation at `t = q^k`:
    /// `Res(b_inf omega h) = mu4 calH Res(varpsi_even / g)`, both residues
    /// taken from symmetric offsets `q^k (1 +- eps)`.
    pub fn residue_relation(&self, k: i64) -> Result<Float> {
        let ctx = self.ctx();
        let p = ctx.prec();
        let pt = ctx.qpow(k);
        let eps = ctx.limit_offset();
        let residue = |f: &dyn Fn(&Complex) -> Result<Complex>| -> Result<Complex> {
            let up = ctx.cx_real(&Float::with_val(p, &pt * Float::with_val(p, 1u32 + &eps)));
            let dn = ctx.cx_real(&Float::with_val(p, &pt * Float::with_val(p, 1u32 - &eps)));
            let d = f(&up)? - f(&dn)?;
            Ok(d * Float::with_val(p, &pt * &eps) / 2u32)
        };
        let lhs = residue(&|t| {
            Ok(self.s(SeriesKind::BInf, t)? * self.sf.omega(t)? * hq_series_unchecked(t, ctx))
        })?;
        let rhs = residue(&|t| Ok(self.s(SeriesKind::VarPsiEven, t)? / self.sf.g(t)?))?;
        let rhs = rhs * Complex::with_val(p, &self.connection.mu[3] * &self.limits.calh);
        Ok(cabs(&Complex::with_val(p, &lhs - &rhs)) / cabs(&rhs))
    }
}

/// Sample points `rho e^{i theta_j}` on the gluing circle.
#[derive(Debug, Clone)]
pub struct ContourSpec {
    pub radius: Float,
    /// Angles as fractions of pi.
    pub angle_fracs: Vec<f64>,
}

impl ContourSpec {
    /// `rho = q^{-1/4}`, 32 angles `pi (2j+1)/32`: halfway between lattice
    /// shells, never on the real axis or on the pole rays `arg = pi/4 + k pi/2`.
    pub fn standard(ctx: &QContext) -> Self {
        ContourSpec {
            radius: ctx.qpow_frac(-1, 4),
            angle_fracs: (0..32).map(|j| (2 * j + 1) as f64 / 32.0).collect(),
        }
    }

    pub fn points(&self, ctx: &QContext) -> Vec<Complex> {
        self.angle_fracs.iter().map(|&a| ctx.polar(&self.radius, a)).collect()
    }

    /// Whether every sample avoids the real axis and the pole rays of the
    /// weight, and the radius lies strictly between `q^{1/2}` and `q^{-1/2}`.
    pub fn is_appropriate(&self, ctx: &QContext) -> bool {
        let r = self.radius.to_f64();
        let q = ctx.q_f64();
        let radius_ok = r > q.sqrt() && r < 1.0 / q.sqrt();
        const EPS: f64 = 1e-9;
        let inside = |m: f64, period: f64| m > EPS && m < period - EPS;
        let angles_ok = self
            .angle_fracs
            .iter()
            .all(|&a| inside(a.rem_euclid(1.0), 1.0) && inside((4.0 * a - 1.0).rem_euclid(2.0), 2.0));
        radius_ok && angles_ok
    }
}

#[derive(Debug, Clone)]
pub struct GlueResidual {
    pub n: usize,
    /// `max_s || W(z)^{-1} calW(t) - I ||` over the contour samples.
    pub residual: Float,
}

/// Glue residual at even `n`: `z = s q^{-n/4}`, `t = s q^{n/4}`, and
/// `J = Wt(z)^{-1} calWt(t)` with `Wt = diag(mu2, 1/c_psi) W_ext(z)` and
/// `calWt` the interior far field with column 2 scaled by `(-q^4 z^{-4}; q^4)_inf`.
pub fn glue_residual(par: &Parametrix, n: usize, contour: &ContourSpec) -> Result<GlueResidual> {
    if !n.is_multiple_of(2) {
        return Err(QError::OddDegree(n));
    }
    let ctx = par.ctx();
    let p = ctx.prec();
    let zs = ctx.qpow_frac(-(n as i64), 4);
    let ts = ctx.qpow_frac(n as i64, 4);
    let q4 = ctx.qpow(4);
    let diag = [par.connection.mu[1].clone(), Complex::with_val(p, par.c_psi.recip_ref())];
    let mut worst = Float::new(p);
    for s in contour.points(ctx) {
        let z = Complex::with_val(p, &s * &zs);
        let t = Complex::with_val(p, &s * &ts);
        let mut wn = par.nearfield(&z, Region::Exterior)?.value;
        for (i, d) in diag.iter().enumerate() {
            for j in 0..2 {
                wn.0[i][j] *= d;
            }
        }
        let mut wf = par.farfield(&t, Region::Interior)?.value;
        let zi4 = Complex::with_val(p, z.square_ref()).square().recip();
        let x = -(zi4 * &q4);
        let scale = pochhammer_inf(&x, &q4, ctx)?;
        for i in 0..2 {
            wf.0[i][1] *= &scale;
        }
        let dev = wn.inverse()?.mul(&wf).deviation_from_identity();
        if dev > worst {
            worst = dev;
        }
    }
    Ok(GlueResidual { n, residual: worst })
}

/// Glue residuals over `ns` and the fitted ratio per step (`ns` should be
/// equally spaced).
pub fn glue_table(par: &Parametrix, ns: &[usize], contour: &ContourSpec) -> Result<(Vec<GlueResidual>, f64)> {
    let rows = ns
        .iter()
        .map(|&n| glue_residual(par, n, contour))
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = rows.iter().map(|r| r.residual.to_f64()).collect();
    Ok((rows, fitted_ratio(&vals)))
}
