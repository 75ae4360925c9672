//! One PASS/FAIL line per acceptance criterion.
//!
//! Failures are reported, not fatal: the binary exits 0 so that the
//! criteria that cannot hold (see the detail text) do not mask the others.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::time::Instant;

use common::oracle::{bisect_dd, j_dd, y_dd, yp_dd};
use diskscat::cli::{figure_profile, run};
use diskscat::quotients::critical_constants;
use diskscat::resonance::{exclusion_intervals, find_quasi_resonances, omega01_bounds, zeta_zero};
use diskscat::scatter::{m_lambda, reflection_at, s_ratio_at};
use diskscat::specfun::{clear_zero_cache, eval_cylinder, first_jp_zero, first_y_zero, j_zero, sup_abs_jn, zeros};
use diskscat::verify::{check, CheckParams, Statement};
use diskscat::Error;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn golden_order_thirty() -> Verdict {
    clear_zero_cache();
    let t0 = Instant::now();
    let (recs, lo, hi) = single_threaded(|| {
        let recs = find_quasi_resonances(30, 2.0, None).unwrap();
        (recs, first_jp_zero(30).unwrap() / 2.0, first_y_zero(30).unwrap())
    });
    let secs = t0.elapsed().as_secs_f64();
    let inside = recs.iter().filter(|r| lo < r.location && r.location < hi).count();
    let w1 = recs.first().map_or(f64::NAN, |r| r.location);
    let w8 = recs.last().map_or(f64::NAN, |r| r.location);
    let checks = [
        ("8 roots", recs.len() == 8 && inside == 8),
        ("left end 16.28±0.01", (lo - 16.28).abs() <= 0.01),
        ("right end 32.98±0.01", (hi - 32.98).abs() <= 0.01),
        ("first root", (w1 - 17.4211682).abs() <= 1e-6),
        ("last root", (w8 - 31.4683226).abs() <= 1e-6),
        ("runtime < 1 s", secs < 1.0),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    verdict(
        failed.is_empty(),
        format!(
            "{} roots in ({lo:.5}, {hi:.5}), first {w1:.8}, last {w8:.8}, {secs:.3} s{}",
            recs.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; missed: {} (j'_30,1/2 = {lo:.10} is {:.4} from the quoted 16.28)", failed.join(", "), (lo - 16.28).abs())
            }
        ),
    )
}

/// |R_n+1| that the nearest double to the root can reach in exact arithmetic.
///
/// t = −(R_n+1)/R_n = iF/Re D is linear across the root with slope 1/w, w the
/// width of the resonance; the best double sits within ulp/2, so |R_n+1| ≈ ulp/(2w).
fn double_precision_floor(n: u32, lambda: f64, x: f64) -> f64 {
    let ulp = f64::from_bits(x.to_bits() + 1) - x;
    let h = 64.0 * ulp;
    let t = |z: f64| {
        let r = reflection_at(n as i64, lambda, z).unwrap();
        -(r + 1.0) / r
    };
    let width = 2.0 * h / (t(x + h) - t(x - h)).norm();
    ulp / (2.0 * width)
}

fn residuals_at_roots() -> Verdict {
    let mut worst = (0.0f64, 0u32, 0.0f64, 0.0f64);
    let (mut total, mut over, mut below_floor, mut over_resolvable, mut worst_resolvable) = (0, 0, 0, 0, 0.0f64);
    for lambda in [1.5, 2.0, 5.0, 10.0] {
        for n in 1..=40u32 {
            for r in find_quasi_resonances(n, lambda, None).unwrap() {
                total += 1;
                let floor = double_precision_floor(n, lambda, r.location);
                if floor > 1e-8 {
                    below_floor += 1;
                }
                if r.residual > 1e-8 {
                    over += 1;
                    if floor <= 1e-8 {
                        over_resolvable += 1;
                        worst_resolvable = worst_resolvable.max(r.residual);
                    }
                }
                if r.residual > worst.0 {
                    worst = (r.residual, n, lambda, r.location);
                }
            }
        }
    }
    let (res, n, lambda, x) = worst;
    verdict(
        over == 0,
        format!(
            "{total} roots, {over} with |R_n+1| > 1e-8, worst {res:.2e} at n={n}, λ={lambda}, x={x:.10}. \
             At {below_floor} roots the resonance is narrower than ~5e7 ulps, so even the double nearest \
             the exact root has |R_n+1| > 1e-8 (R_n+1 = iF/D, width |Re D/F'| ~ |J_n/Y_n|·x); \
             {over_resolvable} misses lie at resolvable roots, worst {worst_resolvable:.2e}"
        ),
    )
}

fn special_functions() -> Verdict {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    let mut bad = 0;
    for n in 0..=200u32 {
        for i in 0..=280 {
            let x = 1e-4 * 10f64.powf(i as f64 / 40.0);
            match eval_cylinder(n, x) {
                Ok(v) => {
                    let w = 2.0 / (PI * x);
                    let e = ((v.wronskian() - w) / w).abs();
                    worst = worst.max(e);
                    if e > 1e-12 {
                        bad += 1;
                    }
                }
                Err(Error::Domain(_)) => skipped += 1,
                Err(_) => bad += 1,
            }
        }
    }
    let t = zeros(0, 1).unwrap();
    let oracle = [
        bisect_dd(|x| j_dd(0, x), 2.0, 3.0),
        bisect_dd(|x| y_dd(0, x), 0.5, 1.5),
        bisect_dd(|x| yp_dd(0, x), 1.5, 2.5),
    ];
    let ours = [t.j(1), t.y1, t.yp1];
    let quoted = [2.40, 0.894, 2.20];
    let near_quoted = ours.iter().zip(quoted).all(|(a, b)| (a - b).abs() <= 5e-3);
    let oracle_err = ours.iter().zip(oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        bad == 0 && near_quoted && oracle_err <= 1e-12 && secs < 10.0,
        format!(
            "Wronskian worst {worst:.1e} ({bad} over 1e-12, {skipped} grid points outside double range); \
             j01={:.6} y01={:.6} y'01={:.6}, oracle gap {oracle_err:.1e}; {secs:.2} s",
            ours[0], ours[1], ours[2]
        ),
    )
}

fn landau() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=200u32 {
        let s = sup_abs_jn(n).unwrap();
        let c = (n as f64 + 1.0).cbrt();
        if !(4.0 / 7.0 / c <= s && s <= 6.0 / 7.0 / c) {
            bad.push(n);
        }
    }
    verdict(bad.is_empty(), format!("n = 1..200, violations at {bad:?}"))
}

/// 500-point midpoint grids on the domain of each property.
fn propsg_points(part: &str, n: u32) -> Vec<f64> {
    let nu = n as f64;
    let cc = critical_constants(n).unwrap();
    let kappa = cc.kappa_n.unwrap();
    let j1 = j_zero(n, 1).unwrap();
    let grid = |lo: f64, hi: f64, m: usize| (0..m).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / m as f64);
    match part {
        "iii-cn-lower" | "iii-cn-upper" | "iv-kappa-lower" | "iv-kappa-upper" => vec![f64::NAN],
        "i-decreasing" => grid(0.0, j1, 250).chain(grid(j1, j_zero(n, 2).unwrap(), 250)).collect(),
        "ii-concave" => grid(0.0, j1, 500).collect(),
        "iv-k-positive" => grid(0.0, first_y_zero(n).unwrap(), 500).collect(),
        "iv-k-decreasing" | "v-inner-lower" | "v-inner-upper" => grid(0.0, kappa, 500).collect(),
        "v-outer-lower" | "v-outer-upper" => grid(kappa, nu, 500).collect(),
        _ => grid(0.0, nu, 500).collect(),
    }
}

fn appendix_suite() -> Verdict {
    let mut tally = 0usize;
    let mut bad: Vec<String> = Vec::new();
    let mut run = |id: Statement, p: CheckParams, what: String| {
        tally += 1;
        match check(id, &p) {
            Ok(c) if c.pass => {}
            Ok(c) => bad.push(format!("{what} margin {:.2e}", c.margin)),
            Err(e) => bad.push(format!("{what}: {e}")),
        }
    };
    for n in [1u32, 2, 5, 10, 30, 100] {
        for part in Statement::PropPropsg.parts() {
            for x in propsg_points(part, n) {
                let p = CheckParams {
                    part: Some(part.to_string()),
                    order: Some(n),
                    oeps: (!x.is_nan()).then_some(x),
                    ..CheckParams::default()
                };
                run(Statement::PropPropsg, p, format!("propsg {part} n={n} x={x}"));
            }
        }
        let cc = critical_constants(n).unwrap();
        let chi = cc.chi_n.unwrap();
        for i in 0..500 {
            let t = (i as f64 + 0.5) / 500.0;
            for (part, x) in [("increasing", cc.zeta_n * t), ("bdkn-inner", chi * t), ("bdkn-outer", chi + (n as f64 - chi) * t)] {
                let p = CheckParams {
                    part: Some(part.into()),
                    order: Some(n),
                    oeps: Some(x),
                    ..CheckParams::default()
                };
                run(Statement::PropLogYn, p, format!("logyn {part} n={n} x={x}"));
            }
        }
    }
    for part in ["zeta0", "zeta0-ratio"] {
        let p = CheckParams {
            part: Some(part.into()),
            ..CheckParams::default()
        };
        run(Statement::PropLogYn, p, format!("logyn {part}"));
    }
    for y in [1.5, 2.0, 10.0, 100.0] {
        for i in 0..=120 {
            let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 120.0);
            if x * y > 1e4 {
                continue;
            }
            for part in ["ratio-upper", "ratio-lower"] {
                let p = CheckParams {
                    part: Some(part.into()),
                    oeps: Some(x),
                    y: Some(y),
                    ..CheckParams::default()
                };
                run(Statement::LemmaLogConcave, p, format!("logconcave {part} x={x} y={y}"));
            }
        }
    }
    let z = zeta_zero().unwrap();
    let detail = format!(
        "{tally} checks, {} violations; ζ₀ = {z:.6}{}",
        bad.len(),
        bad.first().map_or(String::new(), |b| format!("; first: {b}"))
    );
    verdict(bad.is_empty(), detail)
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("diskscat").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn theorem_sweeps(report: &[u8], secs: f64) -> Verdict {
    let mut per_part: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    let mut lower_without_grid = Vec::new();
    for line in String::from_utf8_lossy(report).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if let Some(s) = v.get("summary") {
            let id: Statement = s["id"].as_str().unwrap().parse().unwrap();
            if id.is_lower_bound() && s["grid_suprema"].as_u64() != s["samples"].as_u64() {
                lower_without_grid.push(id.id());
            }
        } else if let Some(id) = v.get("id") {
            let key = (id.as_str().unwrap().to_string(), v["part"].as_str().unwrap_or("").to_string());
            let e = per_part.entry(key).or_default();
            e.0 += 1;
            if v["pass"] != true {
                e.1 += 1;
            }
        }
    }
    let failing: Vec<String> = per_part
        .iter()
        .filter(|(_, (_, f))| *f > 0)
        .map(|((id, part), (n, f))| format!("{id}/{part} {f}/{n}"))
        .collect();
    let checks: usize = per_part.values().map(|v| v.0).sum();
    verdict(
        failing.is_empty() && lower_without_grid.is_empty() && secs < 300.0,
        format!(
            "{} statements, {checks} checks in {secs:.1} s; failing parts: [{}]; lower bounds off-grid: {:?}",
            Statement::ALL.len(),
            failing.join(", "),
            lower_without_grid
        ),
    )
}

fn exclusion_measures() -> Verdict {
    let mut bad = Vec::new();
    let mut samples = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for lambda in [8.0, 20.0, 100.0] {
        for tau in [0.05, 0.1, 0.25] {
            for n in 0..=30u32 {
                let ivs = exclusion_intervals(n, lambda, tau).unwrap();
                let total: f64 = ivs.iter().map(|i| i.len()).sum();
                let (bound, lo, hi, s_max) = if n == 0 {
                    (7.0 * tau * lambda.ln().ln() / lambda, m_lambda(lambda).unwrap(), zeta_zero().unwrap(), 5.0 / (3.0 * tau))
                } else {
                    let nu = n as f64;
                    (6.0 * tau * nu * lambda.ln() / lambda, first_jp_zero(n).unwrap() / lambda, first_y_zero(n).unwrap(), 4.5 / tau)
                };
                if total > bound {
                    bad.push(format!("measure n={n} λ={lambda} τ={tau}: {total:.3e} > {bound:.3e}"));
                }
                for i in 1..2000 {
                    let x = lo + (hi - lo) * i as f64 / 2000.0;
                    if ivs.iter().any(|iv| iv.contains(x)) {
                        continue;
                    }
                    samples += 1;
                    let s = s_ratio_at(n as i64, lambda, x).unwrap().norm();
                    worst_ratio = worst_ratio.max(s / s_max);
                    if s > s_max {
                        bad.push(format!("|S_{n}| n={n} λ={lambda} τ={tau} x={x}: {s:.3e} > {s_max:.3e}"));
                    }
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "279 interval sets, {samples} off-interval samples, max |S_n|/bound {worst_ratio:.3}; {} violations{}",
            bad.len(),
            bad.first().map_or(String::new(), |b| format!("; first: {b}"))
        ),
    )
}

fn order_zero_resonance() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for lambda in [E * E, 10.0, 100.0] {
        let (lo, hi) = omega01_bounds(lambda).unwrap();
        let top = j_zero(0, 1).unwrap() / lambda;
        let w = find_quasi_resonances(0, lambda, Some((0.0, top))).unwrap().first().map_or(f64::NAN, |r| r.location);
        ok &= lo < w && w < hi;
        parts.push(format!("λ={lambda:.4}: {lo:.5} < {w:.5} < {hi:.5}"));
    }
    verdict(ok, parts.join("; "))
}

fn figures() -> Verdict {
    let recs = find_quasi_resonances(30, 2.0, None).unwrap();
    let ratio = |x: f64, at: f64| {
        let rows = figure_profile(30, 2.0, x, 600).unwrap();
        let r = rows.iter().find(|r| r.r_over_eps == at).unwrap();
        r.full / r.incident
    };
    let (first, last) = (recs[0].location, recs[7].location);
    let (q2, q3) = (ratio(first, 1.0), ratio(last, 1.0));
    let (q2_out, q3_out) = (ratio(first, 2.0), ratio(last, 2.0));
    // regression values frozen from the first run
    let frozen = (q2 / 5.976e8 - 1.0).abs() < 1e-3 && (q3 / 0.6818 - 1.0).abs() < 1e-3;
    let away = [q2_out, q3_out].iter().all(|r| (1e-2..=1e2).contains(r));
    verdict(
        q2 > 1e4 && q3 <= 1e2 && frozen && away,
        format!("ratio at r=ε: qr2 {q2:.4e}, qr3 {q3:.4e}; at r=2ε: {q2_out:.3e}, {q3_out:.3e}"),
    )
}

fn main() {
    let mut results: Vec<(&str, Verdict)> = vec![
        ("quasi-resonance golden test", golden_order_thirty()),
        ("|R_n+1| at every root", residuals_at_roots()),
        ("special-function certification", special_functions()),
        ("Landau inequality", landau()),
        ("appendix property suite", appendix_suite()),
    ];
    let t0 = Instant::now();
    let (code_a, first) = run_cli(&["verify", "all", "--seed", "42"]);
    let secs = t0.elapsed().as_secs_f64();
    let (code_b, second) = run_cli(&["verify", "all", "--seed", "42"]);
    let mut sweeps = theorem_sweeps(&first, secs);
    sweeps.detail.push_str(&format!("; exit status {code_a}"));
    results.push(("theorem sweeps", sweeps));
    results.push(("exclusion-measure bounds", exclusion_measures()));
    results.push(("order-0 resonance bounds", order_zero_resonance()));
    results.push(("figure reproduction", figures()));
    results.push((
        "determinism of verify all --seed 42",
        verdict(
            first == second && code_a == code_b,
            format!("{} bytes, identical: {}", first.len(), first == second),
        ),
    ));
    let passed = results.iter().filter(|r| r.1.pass).count();
    for (i, (name, v)) in results.iter_mut().enumerate() {
        println!("{} {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {passed}/{} criteria pass", results.len());
}
