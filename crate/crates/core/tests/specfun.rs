mod common;

use proptest::prelude::*;
use qfreud::qcore::{cabs_f64, fitted_ratio, pochhammer_inf, rel_diff, QContext};
use qfreud::specfun::{
    calibrate_c1, gfun, hq_product_raw, hq_ray_scan, hq_series, limit_c0_calh, max_real_part_on_circle, omegafun,
    weight_w, SpecialFunctionSet,
};
use qfreud::QError;
use rug::ops::Pow;
use rug::{Complex, Float};

use common::{ctx, rel_to_ref, QS, REF_TOL};

fn f(x: &Float) -> f64 {
    x.to_f64()
}

/// 1000 trunc_tol, the margin allowed for accumulated rounding.
fn tol(c: &QContext) -> f64 {
    1e3 * c.trunc_tol().to_f64()
}

#[test]
fn weight_and_g_examples() {
    let c = ctx("0.5");
    let w0 = weight_w(&c.cx(0.0, 0.0), &c).unwrap();
    assert_eq!(*w0.real(), 1);
    assert!(gfun(&c.cx(1.0, 0.0), &c).unwrap().real().is_zero());
    let z = c.cx(1.3, 0.0);
    let qz = Complex::with_val(1024, &z * c.q());
    let ratio = weight_w(&qz, &c).unwrap() / weight_w(&z, &c).unwrap();
    let expect = Complex::with_val(1024, (&z).pow(4u32)) + 1u32;
    assert!(f(&rel_diff(&ratio, &expect)) < tol(&c));
}

#[test]
fn hq_examples() {
    let c = ctx("0.5");
    let sf = SpecialFunctionSet::new(&c).unwrap();
    let z = c.cx(0.3, 0.2);
    let qz = Complex::with_val(1024, &z * c.q());
    let d = Complex::with_val(1024, sf.h(&qz).unwrap() - sf.h(&z).unwrap());
    assert!(cabs_f64(&d) < tol(&c));
    let root = c.cx_real(&Float::with_val(1024, c.q().sqrt_ref()));
    assert!(cabs_f64(&sf.h(&root).unwrap()) < tol(&c));
    let on_circle = c.polar_angle(&c.real(1.0), &c.real(0.7));
    assert!(sf.h(&on_circle).unwrap().real().to_f64().abs() < tol(&c));
    // product zero at q^{1/2 + k}
    for k in 0..3 {
        let zk = c.cx_real(&c.qpow_frac(1 + 2 * k, 2));
        assert!(cabs_f64(&hq_product_raw(&zk, &c).unwrap()) < 1e-300);
    }
}

#[test]
fn hq_rejects_points_on_the_pole_lattice() {
    let c = ctx("0.5");
    let r = hq_series(&c.cx_real(&c.qpow(2)), &c);
    assert!(matches!(r, Err(QError::PoleProximity { .. })));
}

#[test]
fn c1_calibration_matches_reference_and_is_constant() {
    for qs in QS {
        let c = ctx(qs);
        let cal = calibrate_c1(&c).unwrap();
        assert!(f(&cal.spread) < tol(&c), "q = {qs}: spread {}", f(&cal.spread));
        assert!(f(&cal.imag_ratio) < tol(&c));
        assert!(rel_to_ref(&cal.c1, qs, "c1") < REF_TOL, "q = {qs}");
    }
}

#[test]
fn lattice_limits_match_reference_and_multiply_to_one() {
    for qs in QS {
        let c = ctx(qs);
        let lim = limit_c0_calh(&c).unwrap();
        assert!(rel_to_ref(&lim.c0, qs, "c0") < REF_TOL, "q = {qs}");
        assert!(rel_to_ref(&lim.calh, qs, "calH") < REF_TOL, "q = {qs}");
        assert!(f(&Float::with_val(1024, &lim.product - 1u32)).abs() < tol(&c));
        assert!(f(&lim.calh_offset_change) < tol(&c) * f(&lim.calh));
        // differences shrink geometrically, about q^4 per step
        let steps: Vec<f64> = lim.c0_steps.iter().map(|s| s.to_f64()).filter(|s| *s > 0.0).collect();
        assert!(steps.len() >= 3);
        let q4 = c.q_f64().powi(4);
        let r = fitted_ratio(&steps);
        assert!(r > q4 / 2.0 && r < q4 * 2.0, "q = {qs}: step ratio {r}");
    }
}

#[test]
fn imaginary_circles() {
    for qs in QS {
        let c = ctx(qs);
        let one = c.real(1.0);
        let sq = Float::with_val(1024, c.q().sqrt_ref());
        assert!(f(&max_real_part_on_circle(&one, 64, &c).unwrap()) < tol(&c));
        assert!(f(&max_real_part_on_circle(&sq, 64, &c).unwrap()) < tol(&c));
        // a generic circle is not imaginary
        assert!(f(&max_real_part_on_circle(&c.real(0.8), 64, &c).unwrap()) > 1e-3);
    }
}

#[test]
fn ray_scan_examples() {
    let c = ctx("0.5");
    let quarter = Float::with_val(1024, c.pi() / 4u32);
    let three = Float::with_val(1024, &quarter * 3u32);
    let sq = Float::with_val(1024, c.q().sqrt_ref());
    let mid = Float::with_val(1024, &sq + c.q()) / 2u32;
    let grid = vec![sq.clone(), mid.clone(), c.real(0.9)];
    let a = hq_ray_scan(&grid, &quarter, &c).unwrap();
    let b = hq_ray_scan(&grid, &three, &c).unwrap();
    assert!(f(&a[0].re).abs() < tol(&c));
    assert!(f(&a[1].re).abs() > 1e-3);
    for (x, y) in a.iter().zip(&b) {
        assert!(f(&Float::with_val(1024, &x.re + &y.re)).abs() < tol(&c));
        assert!(f(&Float::with_val(1024, &x.im - &y.im)).abs() < tol(&c));
    }
}

#[test]
fn g_shift_chain() {
    let c = ctx("0.5");
    let z = c.cx(0.37, 0.52);
    let gz = gfun(&z, &c).unwrap();
    for n in (2..=12i64).step_by(2) {
        let zs = Complex::with_val(1024, &z * c.qpow_frac(-n, 2));
        let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
        let lhs = gfun(&zs, &c).unwrap() * c.qpow_frac(n * n + 2 * n, 4) * Complex::with_val(1024, (&z).pow(-n as i32)) * sign;
        assert!(f(&rel_diff(&lhs, &gz)) < 1e4 * c.trunc_tol().to_f64(), "n = {n}");
    }
}

#[test]
fn weight_omega_relation() {
    let c = ctx("0.5");
    let q4 = c.qpow(4);
    for z in [c.cx(0.37, 0.52), c.cx(-1.1, 0.3), c.cx(0.8, -0.9)] {
        let w = weight_w(&z, &c).unwrap();
        let x = -(Complex::with_val(1024, (&z).pow(-4i32)) * &q4);
        let pf = pochhammer_inf(&x, &q4, &c).unwrap();
        for n in (2..=10i64).step_by(2) {
            let t = Complex::with_val(1024, &z * c.qpow_frac(n, 2));
            let rhs = Complex::with_val(1024, &pf * omegafun(&t, &c).unwrap());
            let lhs = Complex::with_val(1024, &w * Complex::with_val(1024, (&z).pow(2 * n as i32))) * c.qpow_frac(n * (n - 2), 2);
            assert!(f(&rel_diff(&lhs, &rhs)) < tol(&c), "n = {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn series_and_product_agree(r in 0.05f64..3.0, a in 0.02f64..0.23) {
        // angles in (0, pi/4) keep away from the real-axis poles and zeros
        let c = QContext::new("0.5", 512).unwrap();
        let sf = SpecialFunctionSet::new(&c).unwrap();
        let z = c.polar(&c.real(r), a);
        let d = rel_diff(&sf.h_product(&z).unwrap(), &sf.h(&z).unwrap());
        prop_assert!(f(&d) < 1e3 * c.trunc_tol().to_f64());
    }

    #[test]
    fn hq_is_q_periodic(r in 0.32f64..0.98, a in 0.02f64..0.48) {
        let c = QContext::new("0.3", 512).unwrap();
        let z = c.polar(&c.real(r), a);
        let qz = Complex::with_val(512, &z * c.q());
        let d = Complex::with_val(512, hq_series(&qz, &c).unwrap() - hq_series(&z, &c).unwrap());
        prop_assert!(cabs_f64(&d) < 1e3 * c.trunc_tol().to_f64());
    }
}
