//! Power-series solutions of the seven linear q-difference equations behind
//! the near-field and far-field parametrices, and the connection constants
//! that relate the bases to one another.

use rug::{Complex, Float};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{QError, Result};
use crate::qcore::{cabs, decimal, fitted_ratio, neville_at_zero, QContext};
use crate::specfun::{check_off_lattice, SpecialFunctionSet};

/// Which of the twelve series solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// Even entire solution at the origin, `a(0) = 1`.
    A,
    /// Odd entire solution at the origin, `b'(0) = 1`.
    B,
    PhiEven,
    PhiOdd,
    /// Solutions in `1/z` that converge for `|z| > q`.
    VarphiEven,
    VarphiOdd,
    /// Far-field solutions at infinity.
    AInf,
    BInf,
    /// Entire far-field solutions at the origin.
    PsiEven,
    PsiOdd,
    VarPsiEven,
    VarPsiOdd,
}

pub const ALL_KINDS: [SeriesKind; 12] = [
    SeriesKind::A,
    SeriesKind::B,
    SeriesKind::PhiEven,
    SeriesKind::PhiOdd,
    SeriesKind::VarphiEven,
    SeriesKind::VarphiOdd,
    SeriesKind::AInf,
    SeriesKind::BInf,
    SeriesKind::PsiEven,
    SeriesKind::PsiOdd,
    SeriesKind::VarPsiEven,
    SeriesKind::VarPsiOdd,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expansion {
    /// Powers of `z`.
    Ascending,
    /// Powers of `1/z`.
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Entire,
    /// `C \ {0}`.
    Punctured,
    /// `|z| > q`.
    OutsideQ,
}

/// The seven q-difference equations, written as `L[y](z) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QDiffEquation {
    /// `y(z/q^2) + (q^-3 z^2 (1+1/q) - (1+1/q)) y(z/q) + (1 + q^-4 z^4) y(z)/q`
    NearZero,
    /// `(q^6 z^-4 + q^-2) v(z/q^2) + (q(1+q) z^-2 - (1+1/q)/q) v(z/q) + v(z)/q`
    VDiff,
    /// `q^-5 u(z/q^2) + (z^-2 (1+1/q) - q^-3 (1+1/q)) u(z/q)/q + (z^-4 + q^-4) u(z)`
    UDiff,
    /// `q^7 t^-4 y(t/q^2) - (1 - q^2 (1+q) t^-2) y(t/q) + y(t)`
    NearInf1,
    /// `q^7 t^-4 y(t/q^2) - (1/q - q^2 (1+q) t^-2) y(t/q) + y(t)`
    NearInf2,
    /// `q y(t/q^2) + (t^2/q^2 - (1+q)) y(t/q) + y(t)`
    VInf1,
    /// `q y(t/q^2) + (t^2/q^3 - (1+q)) y(t/q) + y(t)`
    VInf2,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::A => "a",
            SeriesKind::B => "b",
            SeriesKind::PhiEven => "phi_even",
            SeriesKind::PhiOdd => "phi_odd",
            SeriesKind::VarphiEven => "varphi_even",
            SeriesKind::VarphiOdd => "varphi_odd",
            SeriesKind::AInf => "a_inf",
            SeriesKind::BInf => "b_inf",
            SeriesKind::PsiEven => "psi_even",
            SeriesKind::PsiOdd => "psi_odd",
            SeriesKind::VarPsiEven => "varpsi_even",
            SeriesKind::VarPsiOdd => "varpsi_odd",
        }
    }

    pub fn expansion(self) -> Expansion {
        use SeriesKind::*;
        match self {
            A | B | PsiEven | PsiOdd | VarPsiEven | VarPsiOdd => Expansion::Ascending,
            _ => Expansion::Descending,
        }
    }

    pub fn parity(self) -> Parity {
        use SeriesKind::*;
        match self {
            A | PhiEven | VarphiEven | AInf | PsiEven | VarPsiEven => Parity::Even,
            _ => Parity::Odd,
        }
    }

    pub fn validity(self) -> Validity {
        use SeriesKind::*;
        match self {
            A | B | PsiEven | PsiOdd | VarPsiEven | VarPsiOdd => Validity::Entire,
            VarphiEven | VarphiOdd => Validity::OutsideQ,
            _ => Validity::Punctured,
        }
    }

    pub fn equation(self) -> QDiffEquation {
        use SeriesKind::*;
        match self {
            A | B => QDiffEquation::NearZero,
            PhiEven | PhiOdd => QDiffEquation::VDiff,
            VarphiEven | VarphiOdd => QDiffEquation::UDiff,
            AInf => QDiffEquation::NearInf1,
            BInf => QDiffEquation::NearInf2,
            PsiEven | PsiOdd => QDiffEquation::VInf1,
            VarPsiEven | VarPsiOdd => QDiffEquation::VInf2,
        }
    }

    fn seed(self) -> usize {
        match self.parity() {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Coefficient `i` from `c_{i-2}` and `c_{i-4}`.
fn next_coeff(kind: SeriesKind, i: usize, c2: &Float, c4: &Float, ctx: &QContext) -> Result<Float> {
    use SeriesKind::*;
    let prec = ctx.prec();
    let q = ctx.q();
    let ii = i as i64;
    let one_q = Float::with_val(prec, q + 1u32);
    let qi = ctx.qpow(ii);
    let qmi = ctx.qpow(-ii);
    let (num, den) = match kind {
        A | B => {
            let f = Float::with_val(prec, q.recip_ref()) + 1u32;
            let num = f * &qmi * c2 + ctx.qpow(-4) * c4;
            let den = ctx.qpow(1 - 2 * ii) - Float::with_val(prec, &one_q * &qmi) + 1u32;
            (num, den)
        }
        PhiEven | PhiOdd | VarphiEven | VarphiOdd => {
            let q2i = ctx.qpow(2 * ii);
            let num = if matches!(kind, PhiEven | PhiOdd) {
                Float::with_val(prec, q * &one_q) * &qi * c2 + Float::with_val(prec, &q2i * c4)
            } else {
                Float::with_val(prec, &one_q * ctx.qpow(ii + 1)) * c2 + ctx.qpow(5) * c4
            };
            let den = Float::with_val(prec, q - Float::with_val(prec, &one_q * &qi)) + q2i;
            (num, den)
        }
        AInf | BInf => {
            let num = Float::with_val(prec, &one_q * &qi) * c2 + ctx.qpow(2 * ii - 1) * c4;
            let den = if kind == AInf {
                1u32 - qi
            } else {
                1u32 - ctx.qpow(ii - 1)
            };
            (num, den)
        }
        PsiEven | PsiOdd | VarPsiEven | VarPsiOdd => {
            let num = if matches!(kind, PsiEven | PsiOdd) {
                Float::with_val(prec, &qmi * c2)
            } else {
                ctx.qpow(-1 - ii) * c2
            };
            let den = Float::with_val(prec, 1u32 - Float::with_val(prec, &one_q * &qmi)) + ctx.qpow(1 - 2 * ii);
            (num, den)
        }
    };
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    if Float::with_val(prec, den.abs_ref()) < tiny {
        return Err(QError::VanishingDenominator {
            kind: kind.name().to_string(),
            index: i,
        });
    }
    Ok(-(num / den))
}

/// A truncated one-sided power series with its parity and validity domain.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    kind: SeriesKind,
    coeffs: Vec<Float>,
    ctx: QContext,
}

/// Default truncation order: twice the number of powers of `q` needed to reach
/// the tolerance, plus slack. The `|z| > q` series decay only like `(q/|z|)^i`,
/// so a single multiple is not enough at `|z| = 2q`.
pub fn default_order(ctx: &QContext) -> usize {
    2 * ctx.tol_exponent().ceil() as usize + 16
}

impl PowerSeries {
    /// Coefficients `0..=order` from the seed and the kind's recurrence.
    pub fn build(kind: SeriesKind, order: usize, ctx: &QContext) -> Result<Self> {
        if order < 4 {
            return Err(QError::InvalidInput(format!("series order must be at least 4 (got {order})")));
        }
        let prec = ctx.prec();
        let mut coeffs = vec![Float::new(prec); order + 1];
        let seed = kind.seed();
        coeffs[seed] = Float::with_val(prec, 1);
        let zero = Float::new(prec);
        for i in (seed + 2..=order).step_by(2) {
            let c4 = if i >= 4 { coeffs[i - 4].clone() } else { zero.clone() };
            coeffs[i] = next_coeff(kind, i, &coeffs[i - 2], &c4, ctx)?;
        }
        Ok(PowerSeries {
            kind,
            coeffs,
            ctx: ctx.clone(),
        })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Float {
        &self.coeffs[i]
    }

    fn variable(&self, z: &Complex) -> Result<Complex> {
        let prec = self.ctx.prec();
        let r = cabs(z);
        let bad = match self.kind.validity() {
            Validity::Entire => false,
            Validity::Punctured => r.is_zero(),
            Validity::OutsideQ => r <= *self.ctx.q(),
        };
        if bad {
            return Err(QError::Divergent {
                kind: self.kind.name().to_string(),
                radius: r.to_string_radix(10, Some(6)),
            });
        }
        Ok(match self.kind.expansion() {
            Expansion::Ascending => z.clone(),
            Expansion::Descending => Complex::with_val(prec, z.recip_ref()),
        })
    }

    /// Sum of the series at `z`. Stops after two consecutive terms fall below
    /// `trunc_tol` relative to the partial sum while decreasing; running out
    /// of coefficients first is reported as divergence.
    pub fn eval(&self, z: &Complex) -> Result<Complex> {
        let prec = self.ctx.prec();
        let u = self.variable(z)?;
        let u2 = Complex::with_val(prec, u.square_ref());
        let seed = self.kind.seed();
        let mut pw = if seed == 0 {
            Complex::with_val(prec, (1, 0))
        } else {
            u.clone()
        };
        let tol = self.ctx.trunc_tol();
        let mut sum = Complex::new(prec);
        // Magnitudes of the previous two terms; the recurrences couple
        // `c_i` to `c_{i-4}`, so terms can alternate in size and "falling"
        // is judged against the term of the same residue mod 4.
        let mut back: [Option<Float>; 2] = [None, None];
        let mut quiet = 0;
        for i in (seed..self.coeffs.len()).step_by(2) {
            let term = Complex::with_val(prec, &pw * &self.coeffs[i]);
            sum += &term;
            let mag = cabs(&term);
            let small = mag <= Float::with_val(prec, cabs(&sum) * tol);
            let falling = back[0].as_ref().is_some_and(|p| mag <= *p);
            if small && falling {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
            back = [back[1].take(), Some(mag)];
            pw *= &u2;
        }
        Err(QError::Divergent {
            kind: self.kind.name().to_string(),
            radius: cabs(z).to_string_radix(10, Some(6)),
        })
    }

    /// `|c_M u^M| / |c_{M-4} u^{M-4}|` for the last retained coefficient and the
    /// one four places back (same residue mod 4, as in `eval`), ignoring the
    /// validity domain. Values below 1 mean the tail is shrinking.
    pub fn tail_ratio(&self, z: &Complex) -> Float {
        let prec = self.ctx.prec();
        let u = match self.kind.expansion() {
            Expansion::Ascending => z.clone(),
            Expansion::Descending => Complex::with_val(prec, z.recip_ref()),
        };
        let r4 = Float::with_val(prec, u.norm_ref()).square();
        let m = if (self.order() - self.kind.seed()).is_multiple_of(2) {
            self.order()
        } else {
            self.order() - 1
        };
        let a = Float::with_val(prec, self.coeffs[m].abs_ref());
        let b = Float::with_val(prec, self.coeffs[m - 4].abs_ref());
        a / b * r4
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PowerSeries", 7)?;
        s.serialize_field("kind", self.kind.name())?;
        s.serialize_field(
            "expansion",
            match self.kind.expansion() {
                Expansion::Ascending => "ascending",
                Expansion::Descending => "descending",
            },
        )?;
        s.serialize_field(
            "parity",
            match self.kind.parity() {
                Parity::Even => "even",
                Parity::Odd => "odd",
            },
        )?;
        s.serialize_field("M", &self.order())?;
        s.serialize_field("q", &decimal(self.ctx.q()))?;
        s.serialize_field("precision_bits", &self.ctx.prec())?;
        s.serialize_field("coeffs", &self.coeffs.iter().map(decimal).collect::<Vec<_>>())?;
        s.end()
    }
}

/// All twelve series at one truncation order.
#[derive(Debug, Clone)]
pub struct SeriesSet {
    series: Vec<PowerSeries>,
}

impl SeriesSet {
    pub fn new(ctx: &QContext) -> Result<Self> {
        Self::with_order(default_order(ctx), ctx)
    }

    pub fn with_order(order: usize, ctx: &QContext) -> Result<Self> {
        let series = ALL_KINDS
            .iter()
            .map(|&k| PowerSeries::build(k, order, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesSet { series })
    }

    pub fn get(&self, kind: SeriesKind) -> &PowerSeries {
        let i = ALL_KINDS.iter().position(|&k| k == kind).expect("every kind is built");
        &self.series[i]
    }

    pub fn eval(&self, kind: SeriesKind, z: &Complex) -> Result<Complex> {
        self.get(kind).eval(z)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PowerSeries> {
        self.series.iter()
    }
}

/// Relative residual `|L[y](z)| / max |term|` of a function in one of the
/// q-difference equations.
pub fn equation_residual<F>(eq: QDiffEquation, y: F, z: &Complex, ctx: &QContext) -> Result<Float>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    use QDiffEquation::*;
    let prec = ctx.prec();
    let q = ctx.q();
    let cx = |v: Float| Complex::with_val(prec, (v, 0));
    let z1 = Complex::with_val(prec, z / q);
    let z2 = Complex::with_val(prec, &z1 / q);
    let (y0, y1, y2) = (y(z)?, y(&z1)?, y(&z2)?);
    let zz = Complex::with_val(prec, z.square_ref());
    let zi2 = Complex::with_val(prec, zz.recip_ref());
    let zi4 = Complex::with_val(prec, zi2.square_ref());
    let qinv = Float::with_val(prec, q.recip_ref());
    let one_qinv = Float::with_val(prec, &qinv + 1u32);
    let one_q = Float::with_val(prec, q + 1u32);
    let (c2, c1, c0) = match eq {
        NearZero => {
            let z4 = Complex::with_val(prec, zz.square_ref());
            let c1 = Complex::with_val(prec, &zz * Float::with_val(prec, ctx.qpow(-3) * &one_qinv))
                - cx(one_qinv.clone());
            let c0 = (Complex::with_val(prec, &z4 * ctx.qpow(-4)) + 1u32) * &qinv;
            (cx(Float::with_val(prec, 1)), c1, c0)
        }
        VDiff => {
            let c2 = Complex::with_val(prec, &zi4 * ctx.qpow(6)) + ctx.qpow(-2);
            let c1 = Complex::with_val(prec, &zi2 * Float::with_val(prec, q * &one_q))
                - cx(Float::with_val(prec, &one_qinv * &qinv));
            (c2, c1, cx(qinv.clone()))
        }
        UDiff => {
            let c1 = (Complex::with_val(prec, &zi2 * &one_qinv) - cx(ctx.qpow(-3) * &one_qinv)) * &qinv;
            let c0 = Complex::with_val(prec, &zi4 + ctx.qpow(-4));
            (cx(ctx.qpow(-5)), c1, c0)
        }
        NearInf1 | NearInf2 => {
            let lead = if eq == NearInf1 {
                Float::with_val(prec, 1)
            } else {
                qinv.clone()
            };
            let c2 = Complex::with_val(prec, &zi4 * ctx.qpow(7));
            let c1 = Complex::with_val(prec, &zi2 * Float::with_val(prec, ctx.qpow(2) * &one_q)) - cx(lead);
            (c2, c1, cx(Float::with_val(prec, 1)))
        }
        VInf1 | VInf2 => {
            let s = if eq == VInf1 { ctx.qpow(-2) } else { ctx.qpow(-3) };
            let c1 = Complex::with_val(prec, &zz * &s) - cx(one_q.clone());
            (cx(q.clone()), c1, cx(Float::with_val(prec, 1)))
        }
    };
    let t2 = Complex::with_val(prec, &c2 * &y2);
    let t1 = Complex::with_val(prec, &c1 * &y1);
    let t0 = Complex::with_val(prec, &c0 * &y0);
    let res = Complex::with_val(prec, &t2 + &t1) + &t0;
    let scale = [cabs(&t2), cabs(&t1), cabs(&t0)]
        .into_iter()
        .fold(Float::new(prec), |a, b| if b > a { b } else { a });
    Ok(cabs(&res) / scale)
}

/// Residual of one series in its own equation at `z`.
pub fn series_residual(series: &PowerSeries, z: &Complex) -> Result<Float> {
    equation_residual(series.kind.equation(), |x| series.eval(x), z, &series.ctx)
}

/// Sample points for the 2x2 connection solves plus one held-out validator.
#[derive(Debug, Clone)]
pub struct ConnectionPoints {
    pub fit: [Complex; 2],
    pub held_out: Complex,
}

impl ConnectionPoints {
    /// `2 e^{i pi/5}`, `3 e^{i pi/6}` and `1.7 - 2.2 i`: inside every validity
    /// domain, off the lattices and off the pole rays of `w` and `omega`.
    pub fn standard(ctx: &QContext) -> Self {
        ConnectionPoints {
            fit: [ctx.polar(&ctx.real(2.0), 0.2), ctx.polar(&ctx.real(3.0), 1.0 / 6.0)],
            held_out: Complex::with_val(ctx.prec(), (ctx.dec("1.7"), ctx.dec("-2.2"))),
        }
    }
}

/// One solved relation `f = x1 u1 + x2 u2`.
#[derive(Debug, Clone)]
pub struct RelationFit {
    pub name: &'static str,
    pub x1: Complex,
    pub x2: Complex,
    /// Relative residual at the held-out point.
    pub held_out_residual: Float,
    pub condition: Float,
}

/// Infinity-norm condition number of `[[a, b], [c, d]]` after scaling each
/// column to unit largest entry, so it does not depend on how the two basis
/// functions happen to be normalized.
fn equilibrated_condition(m: [&Complex; 4], prec: u32) -> Float {
    let fmax = |x: Float, y: Float| if x > y { x } else { y };
    let s1 = fmax(cabs(m[0]), cabs(m[2]));
    let s2 = fmax(cabs(m[1]), cabs(m[3]));
    let [a, b, c, d] = [
        Complex::with_val(prec, m[0] / &s1),
        Complex::with_val(prec, m[1] / &s2),
        Complex::with_val(prec, m[2] / &s1),
        Complex::with_val(prec, m[3] / &s2),
    ];
    let det = Complex::with_val(prec, &a * &d) - Complex::with_val(prec, &b * &c);
    let row = |x: &Complex, y: &Complex| cabs(x) + cabs(y);
    let norm = fmax(row(&a, &b), row(&c, &d));
    let inv_norm = fmax(row(&d, &b), row(&c, &a)) / cabs(&det);
    norm * inv_norm
}

/// Solves `f = x1 u1 + x2 u2` at the two fit points and validates it at the
/// held-out point. The column-equilibrated condition number must stay below 1e6.
pub fn solve_relation<F, U1, U2>(
    name: &'static str,
    f: F,
    u1: U1,
    u2: U2,
    pts: &ConnectionPoints,
    ctx: &QContext,
) -> Result<RelationFit>
where
    F: Fn(&Complex) -> Result<Complex>,
    U1: Fn(&Complex) -> Result<Complex>,
    U2: Fn(&Complex) -> Result<Complex>,
{
    let prec = ctx.prec();
    let [p, r] = &pts.fit;
    let (a, b, c, d) = (u1(p)?, u2(p)?, u1(r)?, u2(r)?);
    let (f1, f2) = (f(p)?, f(r)?);
    let det = Complex::with_val(prec, &a * &d) - Complex::with_val(prec, &b * &c);
    let x1 = (Complex::with_val(prec, &f1 * &d) - Complex::with_val(prec, &b * &f2)) / &det;
    let x2 = (Complex::with_val(prec, &a * &f2) - Complex::with_val(prec, &c * &f1)) / &det;
    let condition = equilibrated_condition([&a, &b, &c, &d], prec);
    if condition > 1e6 {
        return Err(QError::IllConditioned {
            what: name,
            cond: condition.to_string_radix(10, Some(4)),
        });
    }
    let h = &pts.held_out;
    let fh = f(h)?;
    let pred = Complex::with_val(prec, &x1 * u1(h)?) + Complex::with_val(prec, &x2 * u2(h)?);
    let held_out_residual = cabs(&Complex::with_val(prec, &fh - &pred)) / cabs(&fh);
    Ok(RelationFit {
        name,
        x1,
        x2,
        held_out_residual,
        condition,
    })
}

/// `eta_1..4`, `lambda_1..4`, `mu_1..4` with the fits that produced them.
#[derive(Debug, Clone)]
pub struct ConnectionConstants {
    pub eta: [Complex; 4],
    pub lambda: [Complex; 4],
    pub mu: [Complex; 4],
    pub fits: Vec<RelationFit>,
}

impl ConnectionConstants {
    /// Largest held-out relative residual over the six relations.
    pub fn max_held_out_residual(&self) -> Float {
        self.fits
            .iter()
            .map(|f| f.held_out_residual.clone())
            .fold(Float::new(64), |a, b| if b > a { b } else { a })
    }
}

/// Solves the six relations
/// `a/g = eta1 h varphi_odd + eta2 varphi_even`,
/// `b/g = eta3 varphi_odd + eta4 h varphi_even`,
/// `phi_odd/(g w) = lambda1 h a + lambda2 b`,
/// `phi_even/(g w) = lambda3 h b + lambda4 a`,
/// `a_inf/g = mu1 h psi_odd + mu2 psi_even`,
/// `b_inf/g = mu3 varpsi_odd + mu4 h varpsi_even`.
pub fn solve_connection(
    set: &SeriesSet,
    sf: &SpecialFunctionSet,
    pts: &ConnectionPoints,
) -> Result<ConnectionConstants> {
    use SeriesKind::*;
    let ctx = sf.ctx();
    let s = |k: SeriesKind| move |z: &Complex| set.eval(k, z);
    let h_times = |k: SeriesKind| move |z: &Complex| Ok(sf.h(z)? * set.eval(k, z)?);
    let over_g = |k: SeriesKind| move |z: &Complex| Ok(set.eval(k, z)? / sf.g(z)?);
    let over_gw = |k: SeriesKind| move |z: &Complex| Ok(set.eval(k, z)? / (sf.g(z)? * sf.w(z)?));

    let e12 = solve_relation("eta1, eta2", over_g(A), h_times(VarphiOdd), s(VarphiEven), pts, ctx)?;
    let e34 = solve_relation("eta3, eta4", over_g(B), s(VarphiOdd), h_times(VarphiEven), pts, ctx)?;
    let l12 = solve_relation("lambda1, lambda2", over_gw(PhiOdd), h_times(A), s(B), pts, ctx)?;
    let l34 = solve_relation("lambda3, lambda4", over_gw(PhiEven), h_times(B), s(A), pts, ctx)?;
    let m12 = solve_relation("mu1, mu2", over_g(AInf), h_times(PsiOdd), s(PsiEven), pts, ctx)?;
    let m34 = solve_relation("mu3, mu4", over_g(BInf), s(VarPsiOdd), h_times(VarPsiEven), pts, ctx)?;
    for f in [&e12, &e34] {
        for x in [&f.x1, &f.x2] {
            if cabs(x) < Float::with_val(ctx.prec(), ctx.guard_radius()) {
                return Err(QError::InvalidInput(format!("{} has a vanishing constant", f.name)));
            }
        }
    }
    Ok(ConnectionConstants {
        eta: [e12.x1.clone(), e12.x2.clone(), e34.x1.clone(), e34.x2.clone()],
        lambda: [l12.x1.clone(), l12.x2.clone(), l34.x1.clone(), l34.x2.clone()],
        mu: [m12.x1.clone(), m12.x2.clone(), m34.x1.clone(), m34.x2.clone()],
        fits: vec![e12, e34, l12, l34, m12, m34],
    })
}

/// The two ratio identities at `zeta = e^{i pi/4}`:
/// `lambda2/lambda1 = -h(zeta) a(zeta)/b(zeta)` and
/// `lambda4/lambda3 = -h(zeta) b(zeta)/a(zeta)`. Returns the relative
/// deviations in that order.
pub fn lambda_ratio_check(
    set: &SeriesSet,
    sf: &SpecialFunctionSet,
    cc: &ConnectionConstants,
) -> Result<(Float, Float)> {
    let ctx = sf.ctx();
    let prec = ctx.prec();
    let zeta = ctx.polar(&ctx.real(1.0), 0.25);
    let h = sf.h(&zeta)?;
    let a = set.eval(SeriesKind::A, &zeta)?;
    let b = set.eval(SeriesKind::B, &zeta)?;
    let [l1, l2, l3, l4] = &cc.lambda;
    let r12 = Complex::with_val(prec, l2 / l1);
    let r34 = Complex::with_val(prec, l4 / l3);
    let p12 = -Complex::with_val(prec, &h * &a) / &b;
    let p34 = -Complex::with_val(prec, &h * &b) / &a;
    let rel = |x: &Complex, y: &Complex| cabs(&Complex::with_val(prec, x - y)) / cabs(y);
    Ok((rel(&r12, &p12), rel(&r34, &p34)))
}

/// `|lambda4 a(z*) + lambda3 h(z*) b(z*)| / |lambda4 a(z*)|` at the pole
/// `z* = e^{i pi/4} q^{-k}` of `w`; the combination vanishes there.
pub fn pole_cancellation(
    set: &SeriesSet,
    sf: &SpecialFunctionSet,
    cc: &ConnectionConstants,
    k: i64,
) -> Result<Float> {
    let ctx = sf.ctx();
    let prec = ctx.prec();
    let z = ctx.polar(&ctx.qpow(-k), 0.25);
    let a = Complex::with_val(prec, &cc.lambda[3] * set.eval(SeriesKind::A, &z)?);
    let hb = sf.h(&z)? * set.eval(SeriesKind::B, &z)? * &cc.lambda[2];
    Ok(cabs(&Complex::with_val(prec, &a + &hb)) / cabs(&a))
}

/// Limit of `varpsi_even(t)/g(t)` as `t -> infinity` along `arg t = pi/8`.
#[derive(Debug, Clone)]
pub struct CPsiEstimate {
    pub value: Complex,
    /// Difference between extrapolations through 12 and 10 points.
    pub error: Float,
    /// `j` values of the sample radii `|t| = q^{-j-1/2}`.
    pub js: Vec<i64>,
    pub estimates: Vec<Complex>,
    /// Fitted per-unit-`j` ratio of successive estimate differences.
    pub step_ratio: f64,
    /// Smallest distance from a sample point to `+-q^k`.
    pub min_lattice_distance: Float,
}

/// Samples `varpsi_even/g` at `t_j = q^{-j-1/2} e^{i pi/8}`, `j = 2..=41`, and
/// extrapolates polynomially in `1/t^2` (the quotient is even in `t`).
pub fn estimate_cpsi(set: &SeriesSet, sf: &SpecialFunctionSet) -> Result<CPsiEstimate> {
    let ctx = sf.ctx();
    let prec = ctx.prec();
    let js: Vec<i64> = (2..=41).collect();
    let mut xs = Vec::new();
    let mut estimates = Vec::new();
    let mut min_dist: Option<Float> = None;
    for &j in &js {
        let r = ctx.qpow_frac(-2 * j - 1, 2);
        let t = ctx.polar(&r, 0.125);
        check_off_lattice(&t, "c_psi ray", ctx)?;
        // Nearest lattice points to the ray sample are +-q^{-j} and +-q^{-j-1}.
        for k in [-j, -j - 1] {
            let d = cabs(&Complex::with_val(prec, &t - ctx.qpow(k)));
            if min_dist.as_ref().is_none_or(|m| d < *m) {
                min_dist = Some(d);
            }
        }
        let v = set.eval(SeriesKind::VarPsiEven, &t)? / sf.g(&t)?;
        let t2 = Complex::with_val(prec, t.square_ref());
        xs.push(Complex::with_val(prec, t2.recip_ref()));
        estimates.push(v);
    }
    let n = xs.len();
    let e12 = neville_at_zero(&xs[n - 12..], &estimates[n - 12..]);
    let e10 = neville_at_zero(&xs[n - 10..], &estimates[n - 10..]);
    let error = cabs(&Complex::with_val(prec, &e12 - &e10));
    let quarter = Float::with_val(prec, ctx.trunc_tol().sqrt_ref()).sqrt();
    if error > Float::with_val(prec, cabs(&e12) * &quarter) {
        return Err(QError::NonConvergence {
            what: "c_psi extrapolation",
            change: error.to_string_radix(10, Some(4)),
        });
    }
    let diffs: Vec<f64> = estimates
        .windows(2)
        .take(8)
        .map(|w| cabs(&Complex::with_val(prec, &w[1] - &w[0])).to_f64())
        .collect();
    Ok(CPsiEstimate {
        value: e12,
        error,
        js,
        estimates,
        step_ratio: fitted_ratio(&diffs),
        min_lattice_distance: min_dist.expect("at least one sample"),
    })
}
