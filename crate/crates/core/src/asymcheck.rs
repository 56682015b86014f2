//! Asymptotics of the orthogonal polynomials for even `n`, checked against
//! the lattice-built polynomials:
//!
//! * near field, `|z| <= q^{-n/4}`:
//!   `P_n(z) ~ (-1)^{n/2} q^{-(n/2)(n/2-1)} a(z) mu2/eta2`,
//!   `P_{n-1}(z) ~ (-1)^{n/2} q^{(n/2)(n/2-1)} gamma_{n-1} b(z) lambda3/c_psi`;
//! * far field, `|z| > q^{-n/4}`, `t = z q^{n/2}`:
//!   `P_n(z) ~ z^n a_inf(t)`,
//!   `P_{n-1}(z) ~ q^{n(n/2-1)} gamma_{n-1} z^n b_inf(t) / (mu4 calH c_psi)`;
//! * norms: `gamma_n q^{n(n-1)/2} -> A`, `1/(gamma_{n-1} q^{-n(3-n)/2}) -> B`,
//!   with `A B = q`.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{QError, Result};
use crate::qcore::{cabs, fitted_slope, neville_at_zero_real};
use crate::qortho::MonicPolySeq;
use crate::qseries::SeriesKind;
use crate::rhpcheck::{Parametrix, Region};

/// Which polynomial of the pair is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// `P_n`.
    Even,
    /// `P_{n-1}`.
    Odd,
}

#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub region: Region,
    pub which: Which,
    pub ns: Vec<usize>,
    /// `errors[i][j]`: relative error at `ns[i]` and sample `j`.
    pub errors: Vec<Vec<f64>>,
    /// Least-squares ratio of the largest per-`n` error per step of 4 in `n`.
    pub ratio_per_4: f64,
}

impl AsymptoticReport {
    pub fn max_errors(&self) -> Vec<f64> {
        self.errors
            .iter()
            .map(|row| row.iter().cloned().fold(0.0, f64::max))
            .collect()
    }
}

fn check_even(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(QError::OddDegree(n));
    }
    Ok(())
}

fn sign_half(n: usize) -> i32 {
    if (n / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Near-field prediction for `P_n` (`Which::Even`) or `P_{n-1}` (`Which::Odd`).
pub fn near_prediction(par: &Parametrix, seq: &MonicPolySeq, n: usize, which: Which, z: &Complex) -> Result<Complex> {
    check_even(n)?;
    let ctx = par.ctx();
    let p = ctx.prec();
    let m = (n / 2) as i64;
    let cc = par.connection();
    let e = m * (m - 1);
    Ok(match which {
        Which::Even => {
            let k = Complex::with_val(p, &cc.mu[1] / &cc.eta[1]) * ctx.qpow(-e) * sign_half(n);
            par.series().eval(SeriesKind::A, z)? * k
        }
        Which::Odd => {
            seq.check_degree(n - 1)?;
            let k = Complex::with_val(p, &cc.lambda[2] / par.c_psi()) * ctx.qpow(e) * seq.gamma(n - 1) * sign_half(n);
            par.series().eval(SeriesKind::B, z)? * k
        }
    })
}

/// Far-field prediction for `P_n` or `P_{n-1}`.
pub fn far_prediction(par: &Parametrix, seq: &MonicPolySeq, n: usize, which: Which, z: &Complex) -> Result<Complex> {
    check_even(n)?;
    let ctx = par.ctx();
    let p = ctx.prec();
    let t = Complex::with_val(p, z * ctx.qpow_frac(n as i64, 2));
    let zn = Complex::with_val(p, z.pow(n as u32));
    Ok(match which {
        Which::Even => zn * par.series().eval(SeriesKind::AInf, &t)?,
        Which::Odd => {
            seq.check_degree(n - 1)?;
            let m = (n / 2) as i64;
            let num = ctx.qpow(n as i64 * (m - 1)) * seq.gamma(n - 1);
            let den = Complex::with_val(p, &par.connection().mu[3] * &par.limits().calh) * par.c_psi();
            zn * par.series().eval(SeriesKind::BInf, &t)? * num / den
        }
    })
}

fn actual(seq: &MonicPolySeq, n: usize, which: Which, z: &Complex) -> Result<Complex> {
    match which {
        Which::Even => seq.eval(n, z),
        Which::Odd => seq.eval(n - 1, z),
    }
}

fn rel_err(actual: &Complex, predicted: &Complex) -> f64 {
    let p = actual.prec().0;
    (cabs(&Complex::with_val(p, actual - predicted)) / cabs(predicted)).to_f64()
}

fn ratio_per_4(ns: &[usize], maxes: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(maxes)
        .filter(|(_, e)| **e > 0.0 && e.is_finite())
        .map(|(&n, e)| (n as f64, e.ln()))
        .collect();
    (4.0 * fitted_slope(&pts)).exp()
}

/// Near-field errors at fixed samples, each required to satisfy
/// `|z| <= q^{-n/4}` for every `n`.
pub fn check_pn_near(
    par: &Parametrix,
    seq: &MonicPolySeq,
    ns: &[usize],
    which: Which,
    samples: &[Complex],
) -> Result<AsymptoticReport> {
    let ctx = par.ctx();
    let mut errors = Vec::new();
    for &n in ns {
        check_even(n)?;
        let bound = ctx.qpow_frac(-(n as i64), 4);
        let mut row = Vec::new();
        for z in samples {
            if cabs(z) > bound {
                return Err(QError::InvalidInput(format!("near-field sample outside |z| <= q^(-{n}/4)")));
            }
            let pred = near_prediction(par, seq, n, which, z)?;
            row.push(rel_err(&actual(seq, n, which, z)?, &pred));
        }
        errors.push(row);
    }
    finish(Region::Interior, which, ns, errors)
}

/// Far-field errors at `z = s q^{-n/4}` for scaled samples `s` with `|s| > 1`.
pub fn check_pn_far(
    par: &Parametrix,
    seq: &MonicPolySeq,
    ns: &[usize],
    which: Which,
    scaled: &[Complex],
) -> Result<AsymptoticReport> {
    let ctx = par.ctx();
    let p = ctx.prec();
    let mut errors = Vec::new();
    for &n in ns {
        check_even(n)?;
        let r = ctx.qpow_frac(-(n as i64), 4);
        let mut row = Vec::new();
        for s in scaled {
            if cabs(s) <= 1 {
                return Err(QError::InvalidInput("far-field scaled sample must satisfy |s| > 1".into()));
            }
            let z = Complex::with_val(p, s * &r);
            let pred = far_prediction(par, seq, n, which, &z)?;
            row.push(rel_err(&actual(seq, n, which, &z)?, &pred));
        }
        errors.push(row);
    }
    finish(Region::Exterior, which, ns, errors)
}

fn finish(region: Region, which: Which, ns: &[usize], errors: Vec<Vec<f64>>) -> Result<AsymptoticReport> {
    let mut rep = AsymptoticReport {
        region,
        which,
        ns: ns.to_vec(),
        errors,
        ratio_per_4: f64::NAN,
    };
    rep.ratio_per_4 = ratio_per_4(ns, &rep.max_errors());
    Ok(rep)
}

/// Errors of both formulas on either side of the region boundary.
#[derive(Debug, Clone)]
pub struct CrossoverRow {
    pub n: usize,
    /// Near formula at `|z| = 0.9 q^{-n/4}`.
    pub near_inside: f64,
    /// Far formula at `|z| = 1.1 q^{-n/4}`.
    pub far_outside: f64,
}

/// Crossover errors along `arg z = angle_frac * pi`.
pub fn crossover(par: &Parametrix, seq: &MonicPolySeq, ns: &[usize], angle_frac: f64) -> Result<Vec<CrossoverRow>> {
    let ctx = par.ctx();
    ns.iter()
        .map(|&n| {
            check_even(n)?;
            let r = ctx.qpow_frac(-(n as i64), 4);
            let zi = ctx.polar(&Float::with_val(ctx.prec(), &r * ctx.dec("0.9")), angle_frac);
            let zo = ctx.polar(&Float::with_val(ctx.prec(), &r * ctx.dec("1.1")), angle_frac);
            let near = rel_err(&seq.eval(n, &zi)?, &near_prediction(par, seq, n, Which::Even, &zi)?);
            let far = rel_err(&seq.eval(n, &zo)?, &far_prediction(par, seq, n, Which::Even, &zo)?);
            Ok(CrossoverRow {
                n,
                near_inside: near,
                far_outside: far,
            })
        })
        .collect()
}

/// Norm asymptotics estimated from even `n = 2..=N`.
#[derive(Debug, Clone)]
pub struct GammaScaling {
    pub ns: Vec<usize>,
    /// `gamma_n q^{n(n-1)/2}`.
    pub a_seq: Vec<Float>,
    /// `1 / (gamma_{n-1} q^{-n(3-n)/2})`.
    pub b_seq: Vec<Float>,
    /// Limits extrapolated in `x = q^{n/2}`.
    pub a_est: Float,
    pub b_est: Float,
    pub ab_minus_q: Float,
    /// `|A_n - A_{n-2}|` for consecutive even `n`.
    pub a_steps: Vec<f64>,
    /// Fitted ratio of successive `a_steps` (expected `q`).
    pub step_ratio: f64,
}

pub fn check_gamma_scaling(seq: &MonicPolySeq, n_max: usize) -> Result<GammaScaling> {
    check_even(n_max)?;
    seq.check_degree(n_max)?;
    let ctx = seq.ctx();
    let p = ctx.prec();
    let ns: Vec<usize> = (2..=n_max).step_by(2).collect();
    let mut a_seq = Vec::new();
    let mut b_seq = Vec::new();
    let mut xs = Vec::new();
    for &n in &ns {
        let ni = n as i64;
        a_seq.push(Float::with_val(p, seq.gamma(n) * ctx.qpow_frac(ni * (ni - 1), 2)));
        let g = Float::with_val(p, seq.gamma(n - 1) * ctx.qpow_frac(-ni * (3 - ni), 2));
        b_seq.push(g.recip());
        xs.push(ctx.qpow_frac(ni, 2));
    }
    let a_est = neville_at_zero_real(&xs, &a_seq);
    let b_est = neville_at_zero_real(&xs, &b_seq);
    let ab_minus_q = Float::with_val(p, &a_est * &b_est) - ctx.q();
    let a_steps: Vec<f64> = a_seq
        .windows(2)
        .map(|w| Float::with_val(p, &w[1] - &w[0]).abs().to_f64())
        .collect();
    let pts: Vec<(f64, f64)> = a_steps
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 0.0)
        .map(|(i, d)| (i as f64, d.ln()))
        .collect();
    Ok(GammaScaling {
        ns,
        a_seq,
        b_seq,
        a_est,
        b_est,
        ab_minus_q,
        a_steps,
        step_ratio: fitted_slope(&pts).exp(),
    })
}

/// `P_n(0) / a(0)` against `(-1)^{n/2} q^{-(n/2)(n/2-1)} mu2/eta2`; since
/// `a(0) = 1` this isolates the constant `mu2/eta2`.
pub fn origin_constant_error(par: &Parametrix, seq: &MonicPolySeq, n: usize) -> Result<f64> {
    let z = Complex::new(par.ctx().prec());
    let pred = near_prediction(par, seq, n, Which::Even, &z)?;
    Ok(rel_err(&seq.eval(n, &z)?, &pred))
}

