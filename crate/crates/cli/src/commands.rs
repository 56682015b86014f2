use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde_json::Value;

use qfreud::asymcheck::{check_gamma_scaling, check_pn_far, check_pn_near, crossover, Which};
use qfreud::qcore::{decimal, default_precision, within_factor, QContext};
use qfreud::qortho::{build_polys, compute_moments, verify_orthogonality};
use qfreud::qpainleve::{from_moments, painleve_relative_residual};
use qfreud::qseries::{series_residual, SeriesSet, Validity, ALL_KINDS};
use qfreud::rhpcheck::{glue_table, ContourSpec, Parametrix};
use qfreud::specfun::{hq_ray_scan, max_real_part_on_circle};
use qfreud::QError;

use crate::config::RunConfig;
use crate::report::{Check, Report};

/// Options of the `hq` ray scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RayOptions {
    /// Ray angle as a multiple of pi.
    pub angle: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            angle: 0.25,
            r_min: 0.1,
            r_max: 1.0,
            points: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Moments,
    Polys,
    Painleve,
    Series,
    Rhp,
    Asym,
    Hq(RayOptions),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Polys => "polys",
            Command::Painleve => "painleve",
            Command::Series => "series",
            Command::Rhp => "rhp",
            Command::Asym => "asym",
            Command::Hq(_) => "hq",
        }
    }
}

/// Shared state for one run: the numerical context and the check threshold.
struct Run<'a> {
    cfg: &'a RunConfig,
    ctx: QContext,
    /// Threshold for identities that hold exactly: `sqrt(trunc_tol)`.
    tol: Float,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self, QError> {
        let q: f64 = cfg.q.parse().map_err(|_| QError::InvalidQ(cfg.q.clone()))?;
        let bits = cfg.precision_bits.unwrap_or_else(|| default_precision(cfg.n_max, q));
        let mut ctx = QContext::new(&cfg.q, bits)?;
        if let Some(t) = &cfg.trunc_tol {
            ctx = ctx.with_trunc_tol(t)?;
        }
        let tol = Float::with_val(ctx.prec(), ctx.trunc_tol().sqrt_ref());
        Ok(Run { cfg, ctx, tol })
    }

    fn meta(&self, command: &str) -> Vec<(String, String)> {
        [
            ("command", command.to_string()),
            ("q", self.cfg.q.clone()),
            ("precision_bits", self.ctx.prec().to_string()),
            ("trunc_tol", short(self.ctx.trunc_tol())),
            ("k_pos", self.ctx.k_pos().to_string()),
            ("k_neg", self.ctx.k_neg().to_string()),
            ("n_max", self.cfg.n_max.to_string()),
            ("seed", self.cfg.seed.to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    fn shifts(&self) -> Vec<(String, Float)> {
        self.cfg.shift_c.iter().map(|s| (s.clone(), self.ctx.dec(s))).collect()
    }

    fn below_tol(&self, name: impl Into<String>, value: &Float) -> Check {
        Check::new(name, short(value), short(&self.tol), *value <= self.tol)
    }
}

fn short(x: &Float) -> String {
    x.to_string_radix(10, Some(6))
}

fn rel(a: &Float, b: &Float) -> Float {
    let p = a.prec();
    Float::with_val(p, a - b).abs() / Float::with_val(p, b.abs_ref())
}

fn even_range(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).filter(|n| n % 2 == 0).collect()
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Report, QError> {
    let r = Run::new(cfg)?;
    match cmd {
        Command::Moments => cmd_moments(&r),
        Command::Polys => cmd_polys(&r),
        Command::Painleve => cmd_painleve(&r),
        Command::Series => cmd_series(&r),
        Command::Rhp => cmd_rhp(&r),
        Command::Asym => cmd_asym(&r),
        Command::Hq(opts) => cmd_hq(&r, opts),
    }
}

/// Even moments up to `m_6` and the two closed-form ratio identities.
fn cmd_moments(r: &Run) -> Result<Report, QError> {
    let ctx = &r.ctx;
    let mut rep = Report::with_columns(r.meta("moments"), &["c", "m0", "m2", "m4", "m6"]);
    let t1 = Float::with_val(ctx.prec(), ctx.qpow(-1) - 1u32);
    let t3 = Float::with_val(ctx.prec(), ctx.qpow(-3) - 1u32);
    for (label, c) in r.shifts() {
        let mt = compute_moments(&c, 6, ctx)?;
        let m = &mt.m;
        rep.push_row(vec![label.clone(), decimal(&m[0]), decimal(&m[2]), decimal(&m[4]), decimal(&m[6])]);
        let r40 = Float::with_val(ctx.prec(), &m[4] / &m[0]);
        let r62 = Float::with_val(ctx.prec(), &m[6] / &m[2]);
        rep.check(r.below_tol(format!("m4/m0 = 1/q - 1 (c={label})"), &rel(&r40, &t1)));
        rep.check(r.below_tol(format!("m6/m2 = 1/q^3 - 1 (c={label})"), &rel(&r62, &t3)));
    }
    Ok(rep)
}

/// Norms, recurrence coefficients and (JSON only) coefficient arrays.
fn cmd_polys(r: &Run) -> Result<Report, QError> {
    let mut rep = Report::with_columns(r.meta("polys"), &["c", "n", "gamma", "alpha"]);
    let mut dumps = Vec::new();
    for (label, c) in r.shifts() {
        let seq = build_polys(&c, r.cfg.n_max, &r.ctx)?;
        for n in 0..=seq.n_max() {
            rep.push_row(vec![label.clone(), n.to_string(), decimal(seq.gamma(n)), decimal(seq.alpha(n))]);
        }
        rep.check(r.below_tol(format!("orthogonality (c={label})"), &verify_orthogonality(&seq)));
        rep.check(Check::new(
            format!("positive norms (c={label})"),
            seq.gammas().iter().all(|g| *g > 0),
            true,
            seq.gammas().iter().all(|g| *g > 0),
        ));
        dumps.push(serde_json::to_value(&seq).unwrap_or(Value::Null));
    }
    rep.extra = Some(("polynomials".into(), Value::Array(dumps)));
    Ok(rep)
}

/// `alpha_n`, `q^n alpha_n` and the shift ratio `r_n` against `c = 1`.
fn cmd_painleve(r: &Run) -> Result<Report, QError> {
    let ctx = &r.ctx;
    let p = ctx.prec();
    let n_max = r.cfg.n_max;
    let mut rep = Report::with_columns(r.meta("painleve"), &["c", "n", "alpha_n", "qn_alpha_n", "r_n"]);
    let base = from_moments(&Float::with_val(p, 1), n_max, ctx)?;
    for (label, c) in r.shifts() {
        let orbit = from_moments(&c, n_max, ctx)?;
        for n in 0..orbit.len() {
            let a = &orbit.alpha[n];
            let scaled = Float::with_val(p, a * ctx.qpow(n as i64));
            let rn = if n == 0 {
                Float::new(p)
            } else {
                let gap = ctx.qpow(1 - n as i64) - &base.alpha[n];
                Float::with_val(p, a - &base.alpha[n]) / gap
            };
            rep.push_row(vec![label.clone(), n.to_string(), decimal(a), decimal(&scaled), decimal(&rn)]);
        }
        let mut worst = Float::new(p);
        for n in 1..orbit.len().saturating_sub(1) {
            let res = painleve_relative_residual(&orbit.alpha[n - 1], &orbit.alpha[n], &orbit.alpha[n + 1], n as i64, ctx);
            if res > worst {
                worst = res;
            }
        }
        rep.check(r.below_tol(format!("q-Painleve residual (c={label})"), &worst));
        let pos = orbit.all_positive();
        rep.check(Check::new(format!("alpha_n > 0 (c={label})"), pos, true, pos));
    }
    Ok(rep)
}

/// Residuals of every series at seeded sample points inside its domain;
/// the coefficient arrays go into the JSON payload.
fn cmd_series(r: &Run) -> Result<Report, QError> {
    let ctx = &r.ctx;
    let q = ctx.q_f64();
    let set = SeriesSet::new(ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(r.cfg.seed);
    let mut rep = Report::with_columns(r.meta("series"), &["series", "re_z", "im_z", "residual"]);
    for kind in ALL_KINDS {
        let (lo, hi) = match kind.validity() {
            // At the default order the 1/z series reach trunc_tol only for
            // |z| above roughly q^(1/2).
            Validity::OutsideQ => (1.2 * q.sqrt(), 1.2 * q.sqrt() + 1.0),
            _ => (0.4, 1.5),
        };
        let mut worst = Float::new(ctx.prec());
        for _ in 0..5 {
            let rad: f64 = rng.gen_range(lo..hi);
            let frac: f64 = rng.gen_range(0.0..2.0);
            let z = ctx.polar(&ctx.real(rad), frac);
            let res = series_residual(set.get(kind), &z)?;
            rep.push_row(vec![
                kind.name().to_string(),
                short(z.real()),
                short(z.imag()),
                short(&res),
            ]);
            if res > worst {
                worst = res;
            }
        }
        rep.check(r.below_tol(format!("{} residual", kind.name()), &worst));
    }
    let dumps: Vec<Value> = set.iter().map(|s| serde_json::to_value(s).unwrap_or(Value::Null)).collect();
    rep.extra = Some(("series_data".into(), Value::Array(dumps)));
    Ok(rep)
}

/// Glue residual on the standard contour for `n = 8, 12, ...` up to `n_max`.
/// The rate check needs at least four values of `n`, i.e. `n_max >= 20`.
fn cmd_rhp(r: &Run) -> Result<Report, QError> {
    let ctx = &r.ctx;
    let par = Parametrix::new(ctx)?;
    let contour = ContourSpec::standard(ctx);
    let ns: Vec<usize> = (8..=r.cfg.n_max.max(8)).step_by(4).collect();
    let (rows, ratio) = glue_table(&par, &ns, &contour)?;
    let mut rep = Report::with_columns(r.meta("rhp"), &["n", "residual"]);
    for g in &rows {
        rep.push_row(vec![g.n.to_string(), short(&g.residual)]);
    }
    let q = ctx.q_f64();
    rep.check(Check::new(
        "glue residual ratio per step 4 within factor 2 of q",
        ratio,
        format!("[{}, {}]", q / 2.0, 2.0 * q),
        rows.len() >= 4 && within_factor(ratio, q, 2.0),
    ));
    Ok(rep)
}

/// Near/far error tables for `P_n`, `P_{n-1}`, the crossover rows and the
/// norm-limit estimates.
fn cmd_asym(r: &Run) -> Result<Report, QError> {
    let ctx = &r.ctx;
    let q = ctx.q_f64();
    let n_max = r.cfg.n_max - r.cfg.n_max % 2;
    let ns = even_range(8, n_max);
    if ns.len() < 4 {
        return Err(QError::InvalidInput(format!("asym needs n_max >= 14 (got {})", r.cfg.n_max)));
    }
    let par = Parametrix::new(ctx)?;
    let seq = build_polys(&ctx.real(1.0), n_max, ctx)?;
    let near = [ctx.cx(0.6, 0.0), ctx.cx(0.5, 0.3), ctx.cx(-0.2, 0.9)];
    let far = [ctx.polar(&ctx.real(2.0), 0.13), ctx.polar(&ctx.real(1.5), 0.6)];
    let mut rep = Report::with_columns(r.meta("asym"), &["region", "polynomial", "n", "max_rel_error"]);
    for which in [Which::Even, Which::Odd] {
        let label = if which == Which::Even { "P_n" } else { "P_n-1" };
        let nr = check_pn_near(&par, &seq, &ns, which, &near)?;
        let fr = check_pn_far(&par, &seq, &ns, which, &far)?;
        for (region, rp) in [("near", &nr), ("far", &fr)] {
            for (n, e) in rp.ns.iter().zip(rp.max_errors()) {
                rep.push_row(vec![region.into(), label.into(), n.to_string(), e.to_string()]);
            }
        }
        rep.check(Check::new(
            format!("near {label} ratio per 4 at most 2q"),
            nr.ratio_per_4,
            2.0 * q,
            nr.ratio_per_4 <= 2.0 * q,
        ));
        rep.check(Check::new(
            format!("far {label} ratio per 4 within factor 2 of q"),
            fr.ratio_per_4,
            format!("[{}, {}]", q / 2.0, 2.0 * q),
            within_factor(fr.ratio_per_4, q, 2.0),
        ));
    }
    for row in crossover(&par, &seq, &ns, 0.13)? {
        rep.push_row(vec!["cross_near".into(), "P_n".into(), row.n.to_string(), row.near_inside.to_string()]);
        rep.push_row(vec!["cross_far".into(), "P_n".into(), row.n.to_string(), row.far_outside.to_string()]);
    }
    let gs = check_gamma_scaling(&seq, n_max)?;
    rep.check(Check::new(
        "norm step ratio within factor 2 of q",
        gs.step_ratio,
        format!("[{}, {}]", q / 2.0, 2.0 * q),
        within_factor(gs.step_ratio, q, 2.0),
    ));
    rep.extra = Some((
        "norm_limits".into(),
        serde_json::json!({
            "A": decimal(&gs.a_est),
            "B": decimal(&gs.b_est),
            "AB_minus_q": short(&gs.ab_minus_q),
        }),
    ));
    Ok(rep)
}

/// `h_q` along a ray, plus the vanishing of its real part on the two circles.
fn cmd_hq(r: &Run, opts: &RayOptions) -> Result<Report, QError> {
    let ctx = &r.ctx;
    if !(opts.r_min > 0.0 && opts.r_max > opts.r_min && opts.points >= 2) {
        return Err(QError::InvalidInput("ray scan needs 0 < r_min < r_max and at least 2 points".into()));
    }
    let p = ctx.prec();
    let step = (opts.r_max - opts.r_min) / (opts.points - 1) as f64;
    let grid: Vec<Float> = (0..opts.points).map(|i| ctx.real(opts.r_min + step * i as f64)).collect();
    let angle = Float::with_val(p, ctx.pi() * ctx.real(opts.angle));
    let mut rep = Report::with_columns(r.meta("hq"), &["r", "re", "im"]);
    for pt in hq_ray_scan(&grid, &angle, ctx)? {
        rep.push_row(vec![short(&pt.r), decimal(&pt.re), decimal(&pt.im)]);
    }
    let one = ctx.real(1.0);
    let sq = Float::with_val(p, ctx.q().sqrt_ref());
    rep.check(r.below_tol("max |Re h_q| on |z| = 1", &max_real_part_on_circle(&one, 64, ctx)?));
    rep.check(r.below_tol("max |Re h_q| on |z| = q^(1/2)", &max_real_part_on_circle(&sq, 64, ctx)?));
    Ok(rep)
}
