use diskscat::quotients::phi;
use diskscat::resonance::{
    branch_set, broadband_set, eta_max, exclusion_intervals, find_quasi_resonances, n0_thresholds,
    omega01_bounds, zeta_zero, BroadbandParams,
};
use diskscat::scatter::{m_lambda, s_ratio_at};
use diskscat::specfun::{eval_cylinder, first_jp_zero, first_y_zero, j_zero};

/// F(x) = Y'_n(x)J_n(λx) − λJ'_n(λx)Y_n(x), straight from the cylinder values.
fn raw_f(n: u32, lambda: f64, x: f64) -> f64 {
    let o = eval_cylinder(n, x).unwrap();
    let i = eval_cylinder(n, lambda * x).unwrap();
    o.yp * i.j - lambda * i.jp * o.y
}

#[test]
fn below_the_threshold_there_is_nothing() {
    let ratio = j_zero(5, 1).unwrap() / first_y_zero(5).unwrap();
    assert!(ratio > 1.01);
    assert!(find_quasi_resonances(5, 1.01, None).unwrap().is_empty());
    let y1 = first_y_zero(5).unwrap();
    let s0 = raw_f(5, 1.01, 0.05 * y1).signum();
    for i in 1..2000 {
        let x = 0.05 * y1 + 0.95 * y1 * i as f64 / 2000.0;
        assert_eq!(raw_f(5, 1.01, x).signum(), s0, "x={x}");
    }
}

#[test]
fn one_root_per_branch_at_order_thirty() {
    let recs = find_quasi_resonances(30, 2.0, None).unwrap();
    assert_eq!(recs.len(), 8);
    let y1 = first_y_zero(30).unwrap();
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r.branch, i + 1);
        assert!(r.u_lo < r.location && r.location < r.u_hi && r.location < y1);
        assert!((phi(30, 2.0, r.location).unwrap() + 1.0).abs() < 1e-8);
        // fine scan of the part of U below y_{30,1}: one sign change
        let hi = r.u_hi.min(y1);
        let mut changes = 0;
        let mut prev = raw_f(30, 2.0, r.u_lo + 1e-9).signum();
        for j in 1..=4000 {
            let x = r.u_lo + (hi - r.u_lo) * j as f64 / 4000.0 - 1e-9;
            let s = raw_f(30, 2.0, x).signum();
            if s != prev {
                changes += 1;
            }
            prev = s;
        }
        assert_eq!(changes, 1, "branch {}", r.branch);
    }
    assert!((recs[0].location - 17.4211682).abs() < 1e-6);
    assert!((recs[7].location - 31.4683226).abs() < 1e-6);
}

#[test]
fn omega01_inside_its_bounds() {
    let (lo, hi) = omega01_bounds(std::f64::consts::E.powi(2)).unwrap();
    assert!((lo - 0.0875).abs() < 5e-4 && (hi - 0.1832).abs() < 5e-4);
    for lambda in [std::f64::consts::E.powi(2), 10.0, 100.0, 1e4] {
        let (lo, hi) = omega01_bounds(lambda).unwrap();
        let r = find_quasi_resonances(0, lambda, None).unwrap();
        assert!(lo < r[0].location && r[0].location < hi, "lambda={lambda}");
        assert!(hi < 1.0 / lambda.sqrt());
    }
    assert!(omega01_bounds(7.0).is_err());
}

#[test]
fn exclusion_intervals_hold_their_resonance() {
    for (n, lambda) in [(1u32, 8.0), (3, 20.0), (0, 10.0), (12, 100.0)] {
        let recs = find_quasi_resonances(n, lambda, None).unwrap();
        for tau in [0.05, 0.25] {
            for iv in exclusion_intervals(n, lambda, tau).unwrap() {
                let r = recs.iter().find(|r| r.branch == iv.branch).unwrap();
                assert!(iv.contains(r.location));
                assert!(iv.alpha_end > r.u_lo && iv.beta_end < r.u_hi);
                let pa = phi(n, lambda, iv.alpha_end).unwrap();
                let pb = phi(n, lambda, iv.beta_end).unwrap();
                assert!((pa + 1.0 - tau).abs() < 1e-9 && (pb + 1.0 + tau).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn exclusion_measure_examples() {
    let s: f64 = exclusion_intervals(1, 8.0, 0.25).unwrap().iter().map(|i| i.len()).sum();
    assert!(s > 0.0 && s <= 6.0 * 0.25 * 8f64.ln() / 8.0);
    let s0: f64 = exclusion_intervals(0, 10.0, 0.1).unwrap().iter().map(|i| i.len()).sum();
    assert!(s0 > 0.0 && s0 <= 7.0 * 0.1 * 10f64.ln().ln() / 10.0);
}

#[test]
fn exclusion_measure_grows_with_tau() {
    for (n, lambda) in [(0u32, 9.0), (2, 8.0), (6, 30.0)] {
        let mut prev = 0.0;
        for tau in [0.01, 0.05, 0.1, 0.2, 0.25] {
            let s: f64 = exclusion_intervals(n, lambda, tau).unwrap().iter().map(|i| i.len()).sum();
            assert!(s >= prev);
            prev = s;
        }
    }
    assert!(exclusion_intervals(1, 8.0, 0.3).is_err());
    assert!(exclusion_intervals(1, 6.0, 0.1).is_err());
}

#[test]
fn s_ratio_bounded_outside_exclusions() {
    for lambda in [8.0, 25.0] {
        for tau in [0.05, 0.25] {
            for n in 1..=6u32 {
                let ivs = exclusion_intervals(n, lambda, tau).unwrap();
                let lo = first_jp_zero(n).unwrap() / lambda;
                let hi = first_y_zero(n).unwrap();
                for i in 1..2000 {
                    let x = lo + (hi - lo) * i as f64 / 2000.0;
                    if ivs.iter().any(|iv| iv.contains(x)) {
                        continue;
                    }
                    let s = s_ratio_at(n as i64, lambda, x).unwrap().norm();
                    assert!(s <= 4.5 / tau, "n={n} λ={lambda} τ={tau} x={x}: {s}");
                }
            }
            let ivs = exclusion_intervals(0, lambda, tau).unwrap();
            let lo = m_lambda(lambda).unwrap();
            let hi = zeta_zero().unwrap();
            for i in 1..2000 {
                let x = lo + (hi - lo) * i as f64 / 2000.0;
                if ivs.iter().any(|iv| iv.contains(x)) {
                    continue;
                }
                let s = s_ratio_at(0, lambda, x).unwrap().norm();
                assert!(s <= 5.0 / (3.0 * tau), "n=0 λ={lambda} τ={tau} x={x}: {s}");
            }
        }
    }
}

#[test]
fn branch_sets_follow_the_derivative_zeros() {
    let k = branch_set(4, 10.0).unwrap();
    let z = diskscat::specfun::zeros(4, k.len() + 1).unwrap();
    assert!(z.jp(k.len()) < 40.0 && z.jp(k.len() + 1) >= 40.0);
    let k0 = branch_set(0, 50.0).unwrap();
    let z0 = diskscat::specfun::zeros(0, k0.len() + 1).unwrap();
    let lim = zeta_zero().unwrap() * 50.0;
    assert!(z0.jp(k0.len()) < lim && z0.jp(k0.len() + 1) >= lim);
}

#[test]
fn broadband_measure_below_eta() {
    let eps = 0.01;
    for (lambda, alpha) in [(8.0, 1.0), (20.0, 0.5), (100.0, 2.0)] {
        let eta = eta_max(lambda) / alpha;
        let set = broadband_set(lambda, eps, &BroadbandParams {
            alpha,
            eta,
            eta_zero: None,
            window: (0.0, 2.0 / eps),
        })
        .unwrap();
        assert!(set.measure_i1 < eta / eps, "λ={lambda}");
        assert!(set.measure_i1 <= set.i1_bound());
        assert!(set.measure_i0 <= set.i0_bound());
        assert!(set.tau_schedule.iter().all(|(_, t)| *t <= 0.25));
        for w in set.merged.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
    }
}

#[test]
fn broadband_with_contrast_one_over_eps() {
    for (eps, beta) in [(0.1f64, 0.5), (0.02, 1.0), (0.125, 0.25)] {
        let lambda = 1.0 / eps;
        let eta = eps.powf(beta) * eta_max(lambda);
        let set = broadband_set(lambda, eps, &BroadbandParams {
            alpha: 1.0,
            eta,
            eta_zero: None,
            window: (0.0, 3.0 / eps),
        })
        .unwrap();
        assert!(set.measure_i1 <= eps.powf(beta) * eps.ln().abs(), "eps={eps}");
    }
}

#[test]
fn broadband_empty_window() {
    let lambda = 10.0;
    let eps = 0.1;
    let zero = exclusion_intervals(0, lambda, 0.25).unwrap();
    let below = zero[0].alpha_end.min(first_jp_zero(1).unwrap() / lambda);
    let set = broadband_set(lambda, eps, &BroadbandParams {
        alpha: 1.0,
        eta: eta_max(lambda),
        eta_zero: None,
        window: (1e-3 * below / eps, 0.99 * below / eps),
    })
    .unwrap();
    assert!(set.intervals.is_empty() && set.merged.is_empty());
    assert_eq!(set.total_measure, 0.0);
}

#[test]
fn n0_threshold_cases() {
    assert_eq!(n0_thresholds(1e-9).unwrap().n0_small, Some(13));
    let t = n0_thresholds(0.5).unwrap();
    let n = t.n0_small.unwrap() as f64;
    assert!(0.25 <= 1.0 - 49.0 / (9.0 * n.powf(2.0 / 3.0)));
    assert!(0.25 > 1.0 - 49.0 / (9.0 * (n - 1.0).powf(2.0 / 3.0)));
    let two = n0_thresholds(2.0).unwrap().n0_large.unwrap();
    assert!(two <= 30);
    let m = two as u32;
    assert!(2.0 > j_zero(m, 1).unwrap() / first_y_zero(m).unwrap());
    if m > 0 {
        assert!(2.0 <= j_zero(m - 1, 1).unwrap() / first_y_zero(m - 1).unwrap());
    }
    assert!(n0_thresholds(1.0 + 1e-9).unwrap().n0_large.is_some());
}
