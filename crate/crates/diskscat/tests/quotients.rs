mod common;

use common::oracle::{j_dd, jp_dd, y_dd, yp_dd};
use diskscat::quotients::{
    critical_constants, g, g_ode_rhs, k, k_ode_rhs, phi, EULER_GAMMA, KAPPA_PLUS,
};
use diskscat::specfun::{eval_cylinder, zeros};

#[test]
fn quotients_match_oracle() {
    let want_g = 1.5 * (jp_dd(1, 1.5) / j_dd(1, 1.5)).to_f64();
    assert!((g(1, 1.5).unwrap() - want_g).abs() < 1e-13 * want_g.abs());
    let want_k = -(3.0 / 7.0) * (yp_dd(7, 3.0) / y_dd(7, 3.0)).to_f64();
    assert!((k(7, 3.0).unwrap() - want_k).abs() < 1e-13 * want_k.abs());
}

#[test]
fn k0_envelope_at_one_tenth() {
    let x: f64 = 0.1;
    let base = -1.0 / (EULER_GAMMA + (x / 2.0).ln());
    let v = k(0, x).unwrap();
    assert!(base + x * x / 2.0 <= v && v <= base + x * x);
}

#[test]
fn calibration_constant_at_thirty() {
    let c = critical_constants(30).unwrap().c_n.unwrap();
    assert!(c > 0.5f64.sqrt() && c < 13.0 / 14.0);
    assert!((g(30, 30.0).unwrap() - c / 30f64.cbrt()).abs() < 1e-15);
}

#[test]
fn calibration_constant_increases() {
    let mut prev = 0.0;
    for n in 1..=120u32 {
        let c = critical_constants(n).unwrap();
        let cn = c.c_n.unwrap();
        assert!(cn > prev, "n={n}");
        assert!(cn > 0.5f64.sqrt() && cn < 13.0 / 14.0);
        let nu = n as f64;
        let kap = c.kappa_n.unwrap();
        assert!(kap > nu - 0.8 * nu.cbrt() && kap < nu, "kappa n={n}");
        assert!(c.zeta_n > kap && c.zeta_n < nu);
        prev = cn;
    }
    const { assert!(KAPPA_PLUS > 1.91) };
}

fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x;
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[test]
fn riccati_equations_hold() {
    for n in [0u32, 1, 2, 5, 10, 30] {
        let t = zeros(n, 2).unwrap();
        // stay clear of the pole at y_{n,1}, where the difference quotient degrades
        for i in 1..36 {
            let x = t.y1 * i as f64 / 40.0;
            let d = central(|s| g(n, s).unwrap(), x);
            let r = g_ode_rhs(n, x, g(n, x).unwrap());
            assert!((d - r).abs() <= 1e-8 * r.abs().max(1.0), "g n={n} x={x}: {d} vs {r}");
            let d = central(|s| k(n, s).unwrap(), x);
            let r = k_ode_rhs(n, x, k(n, x).unwrap());
            assert!((d - r).abs() <= 1e-8 * r.abs().max(1.0), "k n={n} x={x}: {d} vs {r}");
        }
    }
}

#[test]
fn phi_is_composition() {
    let lam = 8.0;
    let t = zeros(1, 1).unwrap();
    let x = 0.5 * (t.jp(1) + t.j(1)) / lam;
    let want = g(1, lam * x).unwrap() / k(1, x).unwrap();
    assert_eq!(phi(1, lam, x).unwrap(), want);
    // just past the first critical point of J_n the ratio turns negative
    let x = t.jp(1) / lam * (1.0 + 1e-6);
    let p = phi(1, lam, x).unwrap();
    assert!(p < 0.0 && p > -1e-4);
}

#[test]
fn wronskian_form_of_the_quotient_sum() {
    for n in [1u32, 4, 20] {
        let nu = n as f64;
        for i in 1..50 {
            let x = nu * i as f64 / 50.0;
            let v = eval_cylinder(n, x).unwrap();
            let lhs = k(n, x).unwrap() + g(n, x).unwrap();
            let rhs = 2.0 / (std::f64::consts::PI * nu * (-v.j * v.y));
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
        }
    }
}
