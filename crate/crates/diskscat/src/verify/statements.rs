//! Evaluators and samplers, one block per statement.

use std::collections::HashMap;
use std::f64::consts::{E, PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{frequency_grid, CheckParams, Statement};
use crate::error::{Error, Result};
use crate::norms::{h_sigma, h_sigma_star, n_bold, n_script};
use crate::quotients::{critical_constants, g, g_ode_rhs, k, k_ode_rhs, KAPPA_PLUS};
use crate::resonance::{
    broadband_set, eta_max, eta_zero, exclusion_intervals, find_quasi_resonances, n0_thresholds,
    omega01_bounds, zeta_zero, BroadbandParams, ExclusionInterval, ExclusionSet,
};
use crate::roots::brent;
use crate::scatter::{
    crossing_function, field_trace, m_lambda, reflection_at, s_ratio_at, FieldKind, ModeCoefficients,
    ScatterConfig,
};
use crate::specfun::{eval_cylinder, eval_scaled, first_jp_zero, first_y_zero, j_zero, ldexp, MAX_ARG};

pub(super) struct Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub grid_supremum: bool,
}

fn le(lhs: f64, rhs: f64) -> Result<Outcome> {
    Ok(Outcome {
        lhs,
        rhs,
        grid_supremum: false,
    })
}

fn le_grid(lhs: f64, rhs: f64, grid: bool) -> Result<Outcome> {
    Ok(Outcome {
        lhs,
        rhs,
        grid_supremum: grid,
    })
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parameter(format!("missing parameter '{name}'")))
}

fn hyp(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("hypothesis violated: {}", what())))
    }
}

fn positive(v: f64, name: &str) -> Result<f64> {
    hyp(v > 0.0 && v.is_finite(), || format!("{name} > 0 ({name} = {v})"))?;
    Ok(v)
}

pub(super) fn parts(id: Statement) -> &'static [&'static str] {
    use Statement::*;
    match id {
        ThmOsLs | ThmOsLb => &["main", "p-zero"],
        CorSosl | ThmObLsUpper | ThmObLsLower | ThmObLbLower | PropNtoYn1 | PropR0Plus => &["main"],
        PropLleq1 => &["s-bound", "s-small", "at-n", "zero-far", "zero-near"],
        PropLgeq1 => &["s-bound", "s-small", "zero-near", "zero-far"],
        ThmObLr => &["orders", "zero"],
        ThmObLbUpper => &["trace", "trace-rescaled", "uniform"],
        PropItoOne => &["s", "s0"],
        LemmaHighContrast | CorBroadband | ThmBroadband => &["measure-i1", "measure-i0", "field", "mean"],
        LemmaFirstCase => &["s-bound", "s-small", "at-n"],
        PropEstimate5Half => &["upper", "lower"],
        PropN0 => &["below-one", "above-one"],
        PropR0 => &["decay", "below-one-far", "below-one-near", "above-one-far", "above-one-near"],
        PropInk => &["orders", "zero"],
        PropPropsg => &[
            "i-decreasing",
            "ii-concave",
            "iii-lower",
            "iii-upper",
            "iii-cn-lower",
            "iii-cn-upper",
            "iv-slope",
            "iv-k-positive",
            "iv-k-decreasing",
            "iv-kappa-lower",
            "iv-kappa-upper",
            "v-lower",
            "v-upper",
            "v-inner-lower",
            "v-inner-upper",
            "v-outer-lower",
            "v-outer-upper",
            "vi-lower",
            "vi-upper",
            "bd-product",
        ],
        PropLogYn => &["increasing", "zeta-above-kappa", "bdkn-inner", "bdkn-outer", "zeta0", "zeta0-ratio"],
        LemmaLogConcave => &["convex", "ratio-upper", "ratio-lower", "ratio-decreasing"],
        LemmaMuZeroOne => &["lower", "upper"],
    }
}

// ---------------------------------------------------------------- field helpers

struct Setup {
    lambda: f64,
    eps: f64,
    rho: f64,
    sigma: f64,
    modes: ModeCoefficients,
}

fn setup(p: &CheckParams) -> Result<Setup> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    let eps = positive(p.eps.unwrap_or(1.0), "eps")?;
    let rho = p.radius.unwrap_or(1.0);
    hyp(rho >= 1.0, || format!("R >= eps (R/eps = {rho})"))?;
    let sigma = p.sigma.unwrap_or(0.0);
    let list = p
        .modes
        .as_ref()
        .ok_or_else(|| Error::Parameter("missing parameter 'modes'".into()))?;
    let modes = ModeCoefficients::explicit(list.iter().map(|(n, [re, im])| (*n, Complex64::new(*re, *im))));
    Ok(Setup {
        lambda,
        eps,
        rho,
        sigma,
        modes,
    })
}

impl Setup {
    fn config(&self, x: f64) -> Result<ScatterConfig> {
        ScatterConfig::new(1.0, self.lambda * self.lambda, self.eps, x / self.eps)
    }

    fn a0(&self) -> f64 {
        self.modes.coefficient(0).norm()
    }

    /// ‖u^s(R)‖ in H^σ (or H^σ_* with `star`).
    fn scattered(&self, x: f64, sigma: f64, star: bool) -> Result<f64> {
        let cfg = self.config(x)?;
        let tr = field_trace(FieldKind::Scattered, &cfg, &self.modes, self.rho * self.eps, None)?;
        Ok(if star { h_sigma_star(&tr, sigma)? } else { h_sigma(&tr, sigma)? }.value)
    }

    /// ‖u^i(ε)‖ in H^σ_*.
    fn incident_star(&self, x: f64, sigma: f64) -> Result<f64> {
        let cfg = self.config(x)?;
        let tr = field_trace(FieldKind::Incident, &cfg, &self.modes, self.eps, None)?;
        Ok(h_sigma_star(&tr, sigma)?.value)
    }

    fn n_script(&self, sigma: f64) -> Result<f64> {
        Ok(n_script(&self.modes, sigma, None)?.value)
    }

    fn n_bold(&self, sigma: f64, p: u32) -> Result<f64> {
        Ok(n_bold(&self.modes, sigma, p, None)?.value)
    }

    fn sup_on(&self, grid: &[f64], star: bool) -> Result<f64> {
        let mut best = 0.0_f64;
        for &x in grid {
            best = best.max(self.scattered(x, self.sigma, star)?);
        }
        Ok(best)
    }

    fn orders(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.modes.entries.keys().map(|n| n.unsigned_abs() as u32).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn h0(z: f64) -> Result<f64> {
    let v = eval_cylinder(0, z)?;
    Ok(v.j.hypot(v.y))
}

fn hn(n: u32, z: f64) -> Result<f64> {
    let v = eval_cylinder(n, z)?;
    Ok(v.j.hypot(v.y))
}

/// |R₀(x)·H₀(x·R/ε)|.
fn r0h0(lambda: f64, x: f64, rho: f64) -> Result<f64> {
    Ok(reflection_at(0, lambda, x)?.norm() * h0(x * rho)?)
}

fn s_abs(n: u32, lambda: f64, x: f64) -> Result<f64> {
    Ok(s_ratio_at(n as i64, lambda, x)?.norm())
}

fn y01() -> Result<f64> {
    first_y_zero(0)
}

fn x_param(p: &CheckParams) -> Result<f64> {
    positive(need(p.oeps, "oeps")?, "oeps")
}

fn order_param(p: &CheckParams, min: u32) -> Result<u32> {
    let n = need(p.order, "order")?;
    hyp(n >= min, || format!("n >= {min} (n = {n})"))?;
    Ok(n)
}

fn min_half_m(lambda: f64) -> f64 {
    m_lambda(lambda).map_or(0.5, |m| m.min(0.5))
}

fn f_plus(lambda: f64) -> Result<f64> {
    Ok(omega01_bounds(lambda)?.1)
}

/// Roots of F = Y'_n(x)J_n(λx) − λJ'_n(λx)Y_n(x) on U_{n,1}, also past y_{n,1}.
fn first_branch_roots(n: u32, lambda: f64) -> Result<Vec<f64>> {
    let hi = j_zero(n, 1)? / lambda;
    let lo = if n == 0 { hi * 1e-6 } else { first_jp_zero(n)? / lambda };
    let f = |x: f64| crossing_function(n, lambda, x, 1.0);
    let pts = 64;
    let at = |i: usize| lo + (hi - lo) * (i as f64 + 0.5) / pts as f64;
    let mut out = Vec::new();
    let mut prev = (at(0), f(at(0))?);
    for i in 1..pts {
        let x = at(i);
        let v = f(x)?;
        if v.signum() != prev.1.signum() {
            out.push(brent(f, prev.0, x, 1e-15 * x)?);
        }
        prev = (x, v);
    }
    Ok(out)
}

fn obls_grid(s: &Setup) -> Result<Vec<f64>> {
    let hi = 1e3f64.min(MAX_ARG / s.rho);
    let mut extra = vec![y01()?];
    for n in s.orders() {
        extra.push(n as f64);
        extra.push(first_y_zero(n)?);
    }
    Ok(frequency_grid(1e-3, hi, &extra))
}

/// Candidate frequencies for λ ≥ 1: quasi-resonances of every order in the
/// support, the first-branch roots past y_{n,1}, n/λ, j'_{n,1}/λ and n.
fn oblb_candidates(s: &Setup) -> Result<Vec<f64>> {
    let mut extra = Vec::new();
    for n in s.orders() {
        if s.lambda > 1.0 {
            extra.extend(find_quasi_resonances(n, s.lambda, None)?.iter().map(|r| r.location));
            extra.extend(first_branch_roots(n, s.lambda)?);
        }
        if n > 0 {
            extra.push(n as f64 / s.lambda);
            extra.push(first_jp_zero(n)? / s.lambda);
            extra.push(n as f64);
        }
    }
    Ok(extra)
}

fn oblb_top(s: &Setup) -> f64 {
    1e2f64.min(MAX_ARG / s.rho).min(MAX_ARG / s.lambda)
}

fn oblb_grid(s: &Setup) -> Result<Vec<f64>> {
    Ok(frequency_grid(1e-3, oblb_top(s), &oblb_candidates(s)?))
}

fn one_over_sqrt(v: f64) -> f64 {
    1.0 / v.sqrt()
}

// ---------------------------------------------------------------- exclusion caches

type IntervalKey = (u32, u64, u64);

fn interval_cache() -> &'static Mutex<HashMap<IntervalKey, Arc<Vec<ExclusionInterval>>>> {
    static C: OnceLock<Mutex<HashMap<IntervalKey, Arc<Vec<ExclusionInterval>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn intervals(n: u32, lambda: f64, tau: f64) -> Result<Arc<Vec<ExclusionInterval>>> {
    let key = (n, lambda.to_bits(), tau.to_bits());
    if let Some(v) = interval_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(exclusion_intervals(n, lambda, tau)?);
    interval_cache().lock().unwrap().insert(key, v.clone());
    Ok(v)
}

type SetKey = [u64; 6];

fn set_cache() -> &'static Mutex<HashMap<SetKey, Arc<ExclusionSet>>> {
    static C: OnceLock<Mutex<HashMap<SetKey, Arc<ExclusionSet>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Broadband set over x ∈ (0, top).
fn exclusion_set(lambda: f64, eps: f64, alpha: f64, eta: f64, eta0: f64, top: f64) -> Result<Arc<ExclusionSet>> {
    let key = [lambda, eps, alpha, eta, eta0, top].map(f64::to_bits);
    if let Some(v) = set_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let set = Arc::new(broadband_set(
        lambda,
        eps,
        &BroadbandParams {
            alpha,
            eta,
            eta_zero: Some(eta0),
            window: (0.0, top / eps),
        },
    )?);
    set_cache().lock().unwrap().insert(key, set.clone());
    Ok(set)
}

fn in_part(set: &ExclusionSet, x: f64, zero: bool) -> bool {
    set.intervals.iter().any(|i| (i.order == 0) == zero && i.contains(x))
}

fn window_param(p: &CheckParams) -> Result<f64> {
    positive(need(p.window, "window")?, "window")
}

fn outside_window_part(set: &ExclusionSet, x: f64, top: f64, zero: bool) -> Result<()> {
    hyp(x < top, || format!("x inside the constructed window (x = {x}, top = {top})"))?;
    let name = if zero { "I0" } else { "I1" };
    hyp(!in_part(set, x, zero), || format!("omega outside {name} (x = {x})"))
}

// ---------------------------------------------------------------- evaluation

pub(super) fn evaluate(id: Statement, part: &str, p: &CheckParams) -> Result<Outcome> {
    use Statement::*;
    match id {
        ThmOsLs => os_ls(part, p),
        CorSosl => cor_sosl(p),
        ThmObLsUpper => ob_ls_upper(p),
        ThmObLsLower => ob_ls_lower(p),
        PropLleq1 => lleq1(part, p),
        ThmOsLb => os_lb(part, p),
        PropLgeq1 => lgeq1(part, p),
        ThmObLr => ob_lr(part, p),
        ThmObLbUpper => ob_lb_upper(part, p),
        ThmObLbLower => ob_lb_lower(p),
        PropItoOne => ito_one(part, p),
        LemmaHighContrast => high_contrast(part, p),
        CorBroadband => cor_broadband(part, p),
        ThmBroadband => thm_broadband(part, p),
        LemmaFirstCase => first_case(part, p),
        PropEstimate5Half => estimate_5half(part, p),
        PropNtoYn1 => n_to_yn1(p),
        PropN0 => prop_n0(part, p),
        PropR0 => prop_r0(part, p),
        PropR0Plus => r0_plus(p),
        PropInk => ink(part, p),
        PropPropsg => propsg(part, p),
        PropLogYn => log_yn(part, p),
        LemmaLogConcave => log_concave(part, p),
        LemmaMuZeroOne => mu_zero_one(part, p),
    }
}

fn p_zero_modes(s: &Setup, p: &CheckParams) -> Result<u32> {
    let pz = need(p.p, "p")?;
    hyp(pz >= 1, || "p >= 1".into())?;
    hyp(s.orders().iter().all(|n| *n >= pz), || format!("a_n = 0 for |n| < p = {pz}"))?;
    Ok(pz)
}

fn os_ls(part: &str, p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    let x = x_param(p)?;
    hyp(s.lambda <= 1.0, || format!("lambda <= 1 (lambda = {})", s.lambda))?;
    let lhs = s.scattered(x, s.sigma, false)?;
    let inc = s.incident_star(x, s.sigma - 1.0 / 3.0)?;
    let c = (1.0 - s.lambda) * x;
    if part == "main" {
        hyp(x < y01()?, || format!("omega*eps < y01 (x = {x})"))?;
        le(lhs, c * (3.0 * one_over_sqrt(s.rho) * inc + 9.0 * x * s.a0() * h0(x * s.rho)?))
    } else {
        let pz = p_zero_modes(&s, p)?;
        hyp(x < pz as f64, || format!("omega*eps < p (x = {x}, p = {pz})"))?;
        le(lhs, 3.0 * c * one_over_sqrt(s.rho) * inc)
    }
}

fn cor_sosl(p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    let x = x_param(p)?;
    hyp(s.lambda <= 1.0, || format!("lambda <= 1 (lambda = {})", s.lambda))?;
    hyp(x < y01()?, || format!("omega*eps < y01 (x = {x})"))?;
    let lhs = s.scattered(x, s.sigma, false)?;
    let rhs = 9.0
        * (1.0 - s.lambda)
        * x
        * x
        * (s.a0() * h0(x * s.rho)? + one_over_sqrt(s.rho) * s.n_script(s.sigma - 1.0 / 3.0)?);
    le(lhs, rhs)
}

/// Pointwise at `oeps` when given, otherwise the supremum over 1e-3 ≤ ωε ≤
/// min(1e3, 1e4·ε/R) with the orders of the support, y₀,₁ and y_{n,1} added.
fn ob_ls_upper(p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    hyp(s.lambda <= 1.0, || format!("lambda <= 1 (lambda = {})", s.lambda))?;
    let rhs = 2.5 * one_over_sqrt(s.rho) * s.n_script(s.sigma)? + (2.0 * PI).sqrt() * s.a0() * h0(y01()? * s.rho)?;
    match p.oeps {
        Some(x) => le(s.scattered(positive(x, "oeps")?, s.sigma, false)?, rhs),
        None => le_grid(s.sup_on(&obls_grid(&s)?, false)?, rhs, true),
    }
}

/// Supremum at R = ε over ωε = n for n₀ ≤ n ≤ n₀ + 20 and the orders of the
/// support, plus the log grid on [0.1, max order + 25].
fn ob_ls_lower(p: &CheckParams) -> Result<Outcome> {
    let mut s = setup(p)?;
    s.rho = 1.0;
    hyp(s.lambda < 1.0, || format!("lambda < 1 (lambda = {})", s.lambda))?;
    let n0 = n0_thresholds(s.lambda)?.n0_small.expect("lambda < 1") as u32;
    let floor = s.n_bold(s.sigma, n0)? / 10f64.sqrt();
    let top = s.orders().last().copied().unwrap_or(0).max(n0 + 20) as f64 + 5.0;
    let mut extra: Vec<f64> = (n0..=n0 + 20).map(f64::from).collect();
    extra.extend(s.orders().into_iter().filter(|n| *n >= n0).map(f64::from));
    let sup = s.sup_on(&frequency_grid(0.1, top, &extra), true)?;
    le_grid(floor, sup, true)
}

fn lleq1(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    hyp(lambda <= 1.0, || format!("lambda <= 1 (lambda = {lambda})"))?;
    match part {
        "s-bound" | "s-small" | "at-n" => {
            let n = order_param(p, 1)?;
            let nu = n as f64;
            if part == "at-n" {
                let t = 7.0 / (3.0 * nu.cbrt());
                hyp(lambda * lambda < 1.0 - t * t, || format!("lambda^2 < 1 - (7/(3n^(1/3)))^2 (n = {n})"))?;
                return le(0.5, s_abs(n, lambda, nu)?);
            }
            let x = x_param(p)?;
            let sv = s_abs(n, lambda, x)?;
            if part == "s-bound" {
                hyp(x < first_y_zero(n)?, || format!("omega*eps < y_(n,1) (x = {x})"))?;
                le(sv, 2.5)
            } else {
                hyp(x < nu, || format!("omega*eps < n (x = {x})"))?;
                le(sv, 2.0 * (1.0 - lambda) * x / nu.cbrt())
            }
        }
        _ => {
            let x = x_param(p)?;
            let rho = p.radius.unwrap_or(1.0);
            hyp(rho >= 1.0, || "R >= eps".into())?;
            let lhs = r0h0(lambda, x, rho)?;
            if part == "zero-far" {
                le(lhs, h0(y01()? * rho)?)
            } else {
                hyp(x < y01()?, || format!("omega*eps < y01 (x = {x})"))?;
                le(lhs, PI * PI / (2.0 * SQRT_2) * (1.0 - lambda) * x * x * h0(x * rho)?)
            }
        }
    }
}

fn os_lb(part: &str, p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    let x = x_param(p)?;
    hyp(s.lambda >= 1.0, || format!("lambda >= 1 (lambda = {})", s.lambda))?;
    let lhs = s.scattered(x, s.sigma, false)?;
    let inc = s.incident_star(x, s.sigma - 1.0 / 3.0)?;
    // (1 − λ) ≤ 0 here; its modulus is the meaningful factor
    let c = (s.lambda - 1.0) * x;
    if part == "main" {
        let top = min_half_m(s.lambda);
        hyp(x < top, || format!("omega*eps < min(1/2, m_lambda) = {top} (x = {x})"))?;
        le(lhs, c * (3.0 * one_over_sqrt(s.rho) * inc + 23.0 * x * s.lambda * s.a0() * h0(x * s.rho)?))
    } else {
        let pz = p_zero_modes(&s, p)?;
        hyp(x < pz as f64 / s.lambda, || format!("omega*eps < p/lambda (x = {x}, p = {pz})"))?;
        le(lhs, 3.0 * c * one_over_sqrt(s.rho) * inc)
    }
}

fn lgeq1(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    hyp(lambda >= 1.0, || format!("lambda >= 1 (lambda = {lambda})"))?;
    let x = x_param(p)?;
    match part {
        "s-bound" => {
            let n = order_param(p, 1)?;
            let top = (first_jp_zero(n)? / lambda).min(first_y_zero(n)?);
            hyp(x <= top, || format!("omega*eps <= min(j'_(n,1)/lambda, y_(n,1)) = {top} (x = {x})"))?;
            le(s_abs(n, lambda, x)?, 2.5)
        }
        "s-small" => {
            let n = order_param(p, 1)?;
            let nu = n as f64;
            hyp(x < nu / lambda, || format!("omega*eps < n/lambda (x = {x})"))?;
            le(s_abs(n, lambda, x)?, 2.0 * (lambda - 1.0) * x / nu.cbrt())
        }
        _ => {
            let rho = p.radius.unwrap_or(1.0);
            hyp(rho >= 1.0, || "R >= eps".into())?;
            let lhs = r0h0(lambda, x, rho)?;
            let top = min_half_m(lambda);
            if part == "zero-near" {
                hyp(x < top, || format!("omega*eps < min(1/2, m_lambda) = {top} (x = {x})"))?;
                le(lhs, 1.25 * PI * PI * (lambda - 1.0) * lambda * x * x * h0(x * rho)?)
            } else {
                le(lhs, 5f64.sqrt() * h0(top * rho)?)
            }
        }
    }
}

/// Lower bounds at λ > 1. For "orders" the supremum runs over
/// λωε ≤ j_{p,1}: a 3-decade log grid below j_{p,1}/λ plus the first-branch
/// roots and j'_{n,1}/λ of n₀ ≤ n ≤ p. For "zero" it runs over ωε < f₊(λ)
/// with ω₀,₁ added.
fn ob_lr(part: &str, p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    hyp(s.lambda > 1.0, || format!("lambda > 1 (lambda = {})", s.lambda))?;
    if part == "orders" {
        let n0 = n0_thresholds(s.lambda)?.n0_large.expect("lambda > 1") as u32;
        let pp = need(p.p, "p")?;
        hyp(pp >= n0, || format!("p >= n0 = {n0} (p = {pp})"))?;
        let mut floor = 0.0_f64;
        for (n, a) in &s.modes.entries {
            let m = n.unsigned_abs() as u32;
            if m < n0 || m > pp {
                continue;
            }
            let h = hn(m, j_zero(m, 1)? / s.lambda * s.rho)?;
            floor = floor.max(a.norm() * (1.0 + m as f64).powf(s.sigma) * h);
        }
        let top = j_zero(pp, 1)? / s.lambda;
        let mut extra = vec![top];
        for n in n0..=pp {
            extra.extend(first_branch_roots(n, s.lambda)?);
            if n > 0 {
                extra.push(first_jp_zero(n)? / s.lambda);
            }
        }
        let sup = s.sup_on(&frequency_grid(top * 1e-3, top, &extra), false)?;
        le_grid(floor, sup, true)
    } else {
        hyp(s.lambda > E * E, || format!("lambda > e^2 (lambda = {})", s.lambda))?;
        let fp = f_plus(s.lambda)?;
        let floor = s.a0() * h0(fp * s.rho)?;
        let mut extra = first_branch_roots(0, s.lambda)?;
        extra.retain(|x| *x < fp);
        let mut grid = frequency_grid(fp * 1e-3, fp, &extra);
        grid.retain(|x| *x < fp);
        le_grid(floor, s.sup_on(&grid, false)?, true)
    }
}

fn oblb_hyp(s: &Setup) -> Result<()> {
    hyp(s.lambda >= 1.0, || format!("lambda >= 1 (lambda = {})", s.lambda))?;
    hyp(s.rho > s.lambda, || format!("eps*lambda < R (lambda = {}, R/eps = {})", s.lambda, s.rho))
}

fn ob_lb_upper(part: &str, p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    oblb_hyp(&s)?;
    let zero = (10.0 * PI).sqrt() * s.a0() * h0(min_half_m(s.lambda) * s.rho)?;
    let c = 2.5 * (s.lambda / s.rho).sqrt();
    if part != "uniform" {
        let x = x_param(p)?;
        // the tail argument is ωR > j'_{n,1}R/(λε) and |H_n(z)|² ≤ 2/(π√(z² − n²));
        // the printed form drops λ and the square root
        let shrink = if part == "trace" { 1.0 } else { s.lambda };
        let mut tail = 0.0;
        for (n, a) in &s.modes.entries {
            if *n == 0 {
                continue;
            }
            let m = n.unsigned_abs() as u32;
            let d = (first_jp_zero(m)? * s.rho / shrink).powi(2) - (m as f64).powi(2);
            let d = if part == "trace" { d } else { d.sqrt() };
            tail += a.norm_sqr() * (1.0 + m as f64).powf(2.0 * s.sigma) / d;
        }
        let rhs = c * s.incident_star(x, s.sigma)? + 2.0 * tail.sqrt() + zero;
        le(s.scattered(x, s.sigma, false)?, rhs)
    } else {
        let rhs = c * s.n_script(s.sigma)? + zero;
        match p.oeps {
            Some(x) => le(s.scattered(positive(x, "oeps")?, s.sigma, false)?, rhs),
            None => le_grid(s.sup_on(&oblb_grid(&s)?, false)?, rhs, true),
        }
    }
}

/// Supremum over 1e-3 ≤ ωε ≤ min(1e2, 1e4·ε/R, 1e4/λ) with the candidate
/// points of the support orders (quasi-resonances, first-branch roots, n/λ,
/// j'_{n,1}/λ, n).
fn ob_lb_lower(p: &CheckParams) -> Result<Outcome> {
    let s = setup(p)?;
    oblb_hyp(&s)?;
    let floor = 0.4 * (s.lambda / s.rho).sqrt() * s.n_bold(s.sigma - 1.0 / 6.0, 1)?;
    le_grid(floor, s.sup_on(&oblb_grid(&s)?, true)?, true)
}

fn tau_param(p: &CheckParams) -> Result<f64> {
    let tau = need(p.tau, "tau")?;
    hyp(tau > 0.0 && tau <= 0.25, || format!("0 < tau <= 1/4 (tau = {tau})"))?;
    Ok(tau)
}

fn ito_one(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = need(p.lambda, "lambda")?;
    hyp(lambda > 7.0, || format!("lambda > 7 (lambda = {lambda})"))?;
    let tau = tau_param(p)?;
    let x = x_param(p)?;
    let n = if part == "s" { order_param(p, 1)? } else { 0 };
    let top = if part == "s" { first_y_zero(n)? } else { zeta_zero()? };
    hyp(x < top, || format!("omega*eps < {top} (x = {x})"))?;
    let ivs = intervals(n, lambda, tau)?;
    hyp(!ivs.iter().any(|i| i.contains(x)), || format!("omega*eps outside I_(n,k)(tau) (x = {x})"))?;
    if part == "s" {
        le(s_abs(n, lambda, x)?, 4.5 / tau)
    } else {
        le(r0h0(lambda, x, 1.0)?, 5.0 / (3.0 * tau) * eval_cylinder(0, x)?.j)
    }
}

fn high_contrast(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = need(p.lambda, "lambda")?;
    hyp(lambda > 7.0, || format!("lambda > 7 (lambda = {lambda})"))?;
    let eps = positive(need(p.eps, "eps")?, "eps")?;
    let alpha = positive(need(p.alpha, "alpha")?, "alpha")?;
    let eta = positive(need(p.eta, "eta")?, "eta")?;
    let emax = eta_max(lambda);
    hyp(eta <= emax / alpha, || format!("eta <= eta_max/alpha = {}", emax / alpha))?;
    let e0 = eta_zero(lambda);
    let eta0 = positive(p.eta_zero.unwrap_or(e0), "eta_zero")?;
    hyp(eta0 <= e0, || format!("order-0 eta <= eta_0 = {e0}"))?;
    let top = window_param(p)?;
    let set = exclusion_set(lambda, eps, alpha, eta, eta0, top)?;
    match part {
        "measure-i1" => le(set.measure_i1, eta / eps),
        "measure-i0" => le(set.measure_i0, eta0 / eps),
        "field" => {
            let s = setup(p)?;
            let x = x_param(p)?;
            outside_window_part(&set, x, top, false)?;
            let rhs = 18.0 * one_over_sqrt(s.rho) * emax / (eta * alpha) * s.n_script(s.sigma + 2.0 + alpha)?;
            le(s.scattered(x, s.sigma, true)?, rhs)
        }
        _ => {
            let s = setup(p)?;
            let x = x_param(p)?;
            outside_window_part(&set, x, top, true)?;
            let m = m_lambda(lambda).expect("lambda > 7");
            let rhs = 7.0 * e0 / eta0 * s.a0() * h0(m * s.rho)? / h0(m)?;
            le(s.a0() * r0h0(lambda, x, s.rho)?, rhs)
        }
    }
}

fn cor_broadband(part: &str, p: &CheckParams) -> Result<Outcome> {
    let eps = positive(need(p.eps, "eps")?, "eps")?;
    hyp(eps < 1.0 / 7.0, || format!("eps < 1/7 (eps = {eps})"))?;
    let lambda = 1.0 / eps;
    if let Some(l) = p.lambda {
        hyp((l - lambda).abs() <= 1e-12 * lambda, || format!("lambda = 1/eps (lambda = {l})"))?;
    }
    let alpha = positive(need(p.alpha, "alpha")?, "alpha")?;
    let beta = positive(need(p.beta, "beta")?, "beta")?;
    let l = eps.ln().abs();
    let eta = eps.powf(beta) * eta_max(lambda);
    // the choice η = ε^β·η_max must stay admissible: η ≤ η_max/α
    hyp(alpha * eps.powf(beta) <= 1.0, || format!("alpha*eps^beta <= 1 (alpha = {alpha}, beta = {beta})"))?;
    let eta0 = (l + 1.0).powf(-beta) * eta_zero(lambda);
    let top = window_param(p)?;
    let set = exclusion_set(lambda, eps, alpha, eta, eta0, top)?;
    match part {
        "measure-i1" => le(set.measure_i1, eps.powf(beta) * l),
        "measure-i0" => le(set.measure_i0, l.ln() / (l + 1.0).powf(beta)),
        "field" => {
            let s = setup(&CheckParams { lambda: Some(lambda), ..p.clone() })?;
            let x = x_param(p)?;
            outside_window_part(&set, x, top, false)?;
            let r = s.rho * eps;
            let rhs = 18.0 / alpha * (eps.powf(1.0 - 2.0 * beta) / r).sqrt() * s.n_script(s.sigma + 2.0 + alpha)?;
            le(s.scattered(x, s.sigma, true)?, rhs)
        }
        _ => {
            let s = setup(&CheckParams { lambda: Some(lambda), ..p.clone() })?;
            let x = x_param(p)?;
            outside_window_part(&set, x, top, true)?;
            let r = s.rho * eps;
            let rhs = 12.0 * s.a0() / ((l + 1.0).powf(1.5 - 2.0 * beta) * r).sqrt();
            le(s.a0() * r0h0(lambda, x, s.rho)?, rhs)
        }
    }
}

/// Which of I₁, I₀ the broadband statement needs at (λ, ε), with their η.
struct BroadbandChoice {
    eta1: Option<f64>,
    eta0: Option<f64>,
}

fn broadband_choice(lambda: f64, eps: f64) -> BroadbandChoice {
    let l = eps.ln().abs();
    let eta1 = (lambda > eps.powf(-0.75)).then(|| 8.0 / 9.0 * eps.powf(0.375) * eta_max(lambda));
    let lambda0 = 1.0 / (eps * (l + 1.0).powf(7.0 / 12.0));
    let needs0 = lambda >= 1.0 && min_half_m(lambda) < 0.5 && lambda > lambda0;
    let eta0 = needs0.then(|| {
        if lambda < (l + 1.0).powf(1.0 / 12.0) / eps {
            4.0 / 7.0 * (1.0 + l).powf(-2.0 / 3.0) * eta_zero(lambda)
        } else {
            6.0 / 11.0 * eta_zero(lambda)
        }
    });
    BroadbandChoice { eta1, eta0 }
}

fn thm_broadband(part: &str, p: &CheckParams) -> Result<Outcome> {
    let eps = positive(need(p.eps, "eps")?, "eps")?;
    hyp(eps < 1.0 / 15.0, || format!("eps < 1/15 (eps = {eps})"))?;
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    let alpha = positive(need(p.alpha, "alpha")?, "alpha")?;
    let l = eps.ln().abs();
    let top = window_param(p)?;
    let choice = broadband_choice(lambda, eps);
    let set = if choice.eta1.is_some() || choice.eta0.is_some() {
        let eta = match choice.eta1 {
            Some(e) => {
                hyp(e <= eta_max(lambda) / alpha, || format!("(8/9)eps^(3/8)*alpha <= 1 (alpha = {alpha})"))?;
                e
            }
            None => eta_max(lambda) / alpha,
        };
        Some(exclusion_set(lambda, eps, alpha, eta, choice.eta0.unwrap_or(eta_zero(lambda)), top)?)
    } else {
        None
    };
    let i1 = set.as_ref().filter(|_| choice.eta1.is_some());
    let i0 = set.as_ref().filter(|_| choice.eta0.is_some());
    match part {
        "measure-i1" => le(i1.map_or(0.0, |s| s.measure_i1), eps.powf(0.125) * l),
        "measure-i0" => le(i0.map_or(0.0, |s| s.measure_i0), (l.ln() + 2.0) / (l + 1.0)),
        "field" => {
            let s = setup(p)?;
            let x = x_param(p)?;
            let r = s.rho * eps;
            hyp(r >= eps.powf(0.25), || format!("R >= eps^(1/4) (R = {r})"))?;
            hyp(x < top, || format!("x inside the constructed window (x = {x})"))?;
            if let Some(set) = i1 {
                outside_window_part(set, x, top, false)?;
            }
            let rhs = 21.0 / alpha * (eps.powf(0.25) / r).sqrt() * s.n_script(s.sigma + 2.0 + alpha)?;
            le(s.scattered(x, s.sigma, true)?, rhs)
        }
        _ => {
            let s = setup(p)?;
            let x = x_param(p)?;
            let r = s.rho * eps;
            let c = (l + 1.0).powf(1.0 / 12.0);
            hyp(c * r <= 1.0, || format!("(|ln eps|+1)^(1/12) R <= 1 (R = {r})"))?;
            hyp(x < top, || format!("x inside the constructed window (x = {x})"))?;
            if let Some(set) = i0 {
                outside_window_part(set, x, top, true)?;
            }
            let mut bound = (2.0 / (c * r)).sqrt();
            if let Some(m) = m_lambda(lambda) {
                bound = bound.max(h0(m * s.rho)? / h0(m)?);
            }
            le(s.a0() * r0h0(lambda, x, s.rho)?, 21.0 * s.a0() * bound)
        }
    }
}

fn first_case(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    let n = order_param(p, 1)?;
    let nu = n as f64;
    match part {
        "s-bound" => {
            let x = x_param(p)?;
            let top = (first_jp_zero(n)? / lambda).min(first_y_zero(n)?);
            hyp(x <= top, || format!("x <= min(j'_(n,1)/lambda, y_(n,1)) = {top} (x = {x})"))?;
            le(s_abs(n, lambda, x)?, 2.5)
        }
        "s-small" => {
            let x = x_param(p)?;
            let top = (nu / lambda).min(nu);
            hyp(x <= top, || format!("x <= min(n/lambda, n) = {top} (x = {x})"))?;
            le(s_abs(n, lambda, x)?, 2.0 * (lambda - 1.0).abs() * x / nu.cbrt())
        }
        _ => {
            let t = 7.0 / (3.0 * nu.cbrt());
            hyp(lambda * lambda < 1.0 - t * t, || format!("lambda^2 < 1 - (7/(3n^(1/3)))^2 (n = {n})"))?;
            le(0.5, s_abs(n, lambda, nu)?)
        }
    }
}

/// (1 + Y²/J²)/(1 + Y'²/J'²) from mantissas, safe where J underflows.
fn estimate_ratio(n: u32, x: f64) -> Result<f64> {
    let s = eval_scaled(n, x)?.normalized();
    let e = s.yexp - s.jexp;
    let a = s.y / s.j;
    let b = s.yp / s.jp;
    if e >= 0 {
        let t = ldexp(1.0, -2 * e);
        Ok((t + a * a) / (t + b * b))
    } else {
        let (a, b) = (ldexp(a, e), ldexp(b, e));
        Ok((1.0 + a * a) / (1.0 + b * b))
    }
}

fn estimate_5half(part: &str, p: &CheckParams) -> Result<Outcome> {
    let n = order_param(p, 1)?;
    let x = x_param(p)?;
    hyp(x <= n as f64, || format!("0 < x <= n (x = {x})"))?;
    let r = estimate_ratio(n, x)?;
    if part == "upper" {
        le(r, 6.25)
    } else {
        le(0.36, r)
    }
}

fn n_to_yn1(p: &CheckParams) -> Result<Outcome> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    let n = order_param(p, 1)?;
    let x = x_param(p)?;
    let y1 = first_y_zero(n)?;
    hyp(x >= n as f64 && x <= y1, || format!("x in [n, y_(n,1)] = [{n}, {y1}] (x = {x})"))?;
    le(s_abs(n, lambda, x)?, 5f64.sqrt())
}

fn prop_n0(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    let x = x_param(p)?;
    let base = x * x * (x / 2.0).ln().abs();
    let sv = s_abs(0, lambda, x)?;
    if part == "below-one" {
        hyp(lambda <= 1.0, || format!("lambda <= 1 (lambda = {lambda})"))?;
        hyp(x < y01()?, || format!("x < y01 (x = {x})"))?;
        le(sv, PI / (2.0 * SQRT_2) * (2.0 - 2.0 * lambda).min(1.0) * base)
    } else {
        hyp(lambda >= 1.0, || format!("lambda >= 1 (lambda = {lambda})"))?;
        let top = min_half_m(lambda);
        hyp(x <= top, || format!("x <= min(1/2, m_lambda) = {top} (x = {x})"))?;
        le(sv, PI * (2.5 * (lambda - 1.0) / lambda).min(1.0) * lambda * lambda * base)
    }
}

fn prop_r0(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = positive(need(p.lambda, "lambda")?, "lambda")?;
    let x = x_param(p)?;
    let rho = p.radius.unwrap_or(1.0);
    hyp(rho >= 1.0, || "R >= eps".into())?;
    let v = r0h0(lambda, x, rho)?;
    match part {
        "decay" => le(v * v, 2.0 / (PI * x * rho)),
        "below-one-far" | "below-one-near" => {
            hyp(lambda < 1.0, || format!("lambda < 1 (lambda = {lambda})"))?;
            if part == "below-one-far" {
                le(v, h0(y01()? * rho)?)
            } else {
                hyp(x < y01()?, || format!("x < y01 (x = {x})"))?;
                le(v, PI * PI / (2.0 * SQRT_2) * (1.0 - lambda) * x * x * h0(x * rho)?)
            }
        }
        _ => {
            hyp(lambda >= 1.0, || format!("lambda >= 1 (lambda = {lambda})"))?;
            let top = min_half_m(lambda);
            if part == "above-one-far" {
                le(v, 5f64.sqrt() * h0(top * rho)?)
            } else {
                hyp(x < top, || format!("x < min(1/2, m_lambda) = {top} (x = {x})"))?;
                le(v, 1.25 * PI * PI * (lambda - 1.0) / lambda * x * x * lambda * lambda * h0(x * rho)?)
            }
        }
    }
}

fn r0_plus(p: &CheckParams) -> Result<Outcome> {
    let lambda = need(p.lambda, "lambda")?;
    hyp(lambda >= 7.0, || format!("lambda >= 7 (lambda = {lambda})"))?;
    let x = x_param(p)?;
    let m = m_lambda(lambda).expect("lambda >= 7");
    hyp(x <= m, || format!("x <= m_lambda = {m} (x = {x})"))?;
    let rho = p.radius.unwrap_or(1.0);
    hyp(rho >= 1.0, || "R >= eps".into())?;
    le(r0h0(lambda, x, rho)?, 4.0 * h0(m * rho)? / h0(m)?)
}

fn union_length(ivs: &[ExclusionInterval]) -> f64 {
    let mut spans: Vec<(f64, f64)> = ivs.iter().map(|i| (i.alpha_end, i.beta_end)).collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in spans {
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    total + cur.map_or(0.0, |(a, b)| b - a)
}

fn ink(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = need(p.lambda, "lambda")?;
    hyp(lambda >= 7.0, || format!("lambda >= 7 (lambda = {lambda})"))?;
    let tau = tau_param(p)?;
    if part == "orders" {
        let n = order_param(p, 1)?;
        le(union_length(&intervals(n, lambda, tau)?), 6.0 * tau * n as f64 * lambda.ln() / lambda)
    } else {
        le(union_length(&intervals(0, lambda, tau)?), 7.0 * tau * lambda.ln().ln() / lambda)
    }
}

/// g_n'' from the Riccati equation g' = n/x − x/n − (n/x)g².
fn g_second(n: f64, x: f64, gv: f64, gp: f64) -> f64 {
    -n / (x * x) - 1.0 / n + n / (x * x) * gv * gv - 2.0 * n / x * gv * gp
}

fn propsg(part: &str, p: &CheckParams) -> Result<Outcome> {
    let n = order_param(p, 1)?;
    let nu = n as f64;
    let cc = critical_constants(n)?;
    let c_n = cc.c_n.expect("n >= 1");
    let kappa = cc.kappa_n.expect("n >= 1");
    let root = |x: f64| (1.0 - (x / nu).powi(2)).max(0.0).sqrt();
    let in_open_n = |x: f64| hyp(x > 0.0 && x < nu, || format!("0 < x < n (x = {x})"));
    let in_closed_n = |x: f64| hyp(x > 0.0 && x <= nu, || format!("0 < x <= n (x = {x})"));
    match part {
        "iii-cn-lower" => return le(0.5f64.sqrt(), c_n),
        "iii-cn-upper" => return le(c_n, 13.0 / 14.0),
        "iv-kappa-lower" => return le(nu - 0.8 * nu.cbrt(), kappa),
        "iv-kappa-upper" => return le(kappa, nu),
        _ => {}
    }
    let x = x_param(p)?;
    match part {
        "i-decreasing" => {
            let gv = g(n, x)?;
            le(g_ode_rhs(n, x, gv), 0.0)
        }
        "ii-concave" => {
            let j1 = j_zero(n, 1)?;
            hyp(x < j1, || format!("x < j_(n,1) (x = {x})"))?;
            let gv = g(n, x)?;
            le(g_second(nu, x, gv, g_ode_rhs(n, x, gv)), 0.0)
        }
        "iii-lower" => {
            in_closed_n(x)?;
            le(root(x), g(n, x)?)
        }
        "iii-upper" => {
            in_closed_n(x)?;
            le(g(n, x)?, (root(x).powi(2) + c_n * c_n / nu.powf(2.0 / 3.0) * x / nu).sqrt())
        }
        "iv-slope" => {
            in_open_n(x)?;
            let gn = g(n, nu)?;
            le(-g_ode_rhs(n, x, g(n, x)?), gn * gn)
        }
        "iv-k-positive" => {
            hyp(x < first_y_zero(n)?, || format!("x < y_(n,1) (x = {x})"))?;
            le(0.0, k(n, x)?)
        }
        "iv-k-decreasing" => {
            hyp(x < kappa, || format!("x < kappa_n = {kappa} (x = {x})"))?;
            le(k_ode_rhs(n, x, k(n, x)?), 0.0)
        }
        "v-lower" => {
            in_open_n(x)?;
            le(0.6 / nu.cbrt(), k(n, x)?)
        }
        "v-upper" => {
            in_open_n(x)?;
            le(k(n, x)?, root(x).max(7.0 / (6.0 * nu.cbrt())))
        }
        "v-inner-lower" => {
            hyp(x > 0.0 && x <= kappa, || format!("x <= kappa_n = {kappa} (x = {x})"))?;
            le(KAPPA_PLUS * root(x) - g(n, x)?, k(n, x)?)
        }
        "v-inner-upper" => {
            hyp(x > 0.0 && x <= kappa, || format!("x <= kappa_n = {kappa} (x = {x})"))?;
            le(k(n, x)?, root(x))
        }
        "v-outer-lower" | "v-outer-upper" => {
            hyp(x >= kappa && x <= nu, || format!("kappa_n <= x <= n (x = {x})"))?;
            if part == "v-outer-lower" {
                le(0.6 / nu.cbrt(), k(n, x)?)
            } else {
                le(k(n, x)?, 7.0 / (6.0 * nu.cbrt()))
            }
        }
        "vi-lower" | "vi-upper" => {
            in_closed_n(x)?;
            let r = k(n, x)? / g(n, x)?;
            if part == "vi-lower" {
                le(0.4, r)
            } else {
                le(r, 5.0 / 3.0)
            }
        }
        _ => {
            // Boyd–Dunster: 2π(−J_nY_n)√(n² − x²) ≤ 2.09 for x ≤ n
            in_closed_n(x)?;
            let s = eval_scaled(n, x)?;
            let prod = -ldexp(s.j * s.y, s.jexp + s.yexp);
            le(2.0 * PI * prod * (nu * nu - x * x).sqrt(), 2.09)
        }
    }
}

fn log_yn(part: &str, p: &CheckParams) -> Result<Outcome> {
    match part {
        "zeta0" => return le((zeta_zero()? - 0.3135).abs(), 5e-4),
        "zeta0-ratio" => {
            let z = zeta_zero()?;
            return le((z / k(0, z)? - 0.3524).abs(), 5e-4);
        }
        _ => {}
    }
    let n = need(p.order, "order")?;
    let cc = critical_constants(n)?;
    if part == "increasing" {
        let x = x_param(p)?;
        hyp(x < cc.zeta_n, || format!("x < zeta_n = {} (x = {x})", cc.zeta_n))?;
        let kv = k(n, x)?;
        // (x/k)' has the sign of k − x·k'
        return le(0.0, kv - x * k_ode_rhs(n, x, kv));
    }
    let n = order_param(p, 1)?;
    let nu = n as f64;
    let chi = cc.chi_n.expect("n >= 1");
    match part {
        "zeta-above-kappa" => le(cc.kappa_n.expect("n >= 1"), cc.zeta_n),
        "bdkn-inner" => {
            let x = x_param(p)?;
            hyp(x <= chi, || format!("x <= chi_n = {chi} (x = {x})"))?;
            le((nu * nu / (x * x) - 1.0).powf(-0.5), x / (nu * k(n, x)?))
        }
        _ => {
            let x = x_param(p)?;
            hyp(x >= chi && x <= nu, || format!("chi_n <= x <= n (x = {x})"))?;
            le((nu * nu / (chi * chi) - 1.0).powf(-0.5), x / (nu * k(n, x)?))
        }
    }
}

/// (ln|H₀|)' and (ln|H₀|)''.
fn log_h0_derivatives(x: f64) -> Result<(f64, f64)> {
    let v = eval_cylinder(0, x)?;
    let m2 = v.j * v.j + v.y * v.y;
    let d1 = (v.j * v.jp + v.y * v.yp) / m2;
    let jpp = -v.jp / x - v.j;
    let ypp = -v.yp / x - v.y;
    let d2 = (v.jp * v.jp + v.yp * v.yp + v.j * jpp + v.y * ypp) / m2 - 2.0 * d1 * d1;
    Ok((d1, d2))
}

fn log_concave(part: &str, p: &CheckParams) -> Result<Outcome> {
    let x = x_param(p)?;
    if part == "convex" {
        return le(0.0, log_h0_derivatives(x)?.1);
    }
    let y = need(p.y, "y")?;
    hyp(y > 1.0, || format!("y > 1 (y = {y})"))?;
    match part {
        "ratio-upper" => le(h0(x * y)? / h0(x)?, 1.0),
        "ratio-lower" => le(1.0 / y.sqrt(), h0(x * y)? / h0(x)?),
        _ => le(y * log_h0_derivatives(x * y)?.0 - log_h0_derivatives(x)?.0, 0.0),
    }
}

fn mu_zero_one(part: &str, p: &CheckParams) -> Result<Outcome> {
    let lambda = need(p.lambda, "lambda")?;
    hyp(lambda >= E * E, || format!("lambda >= e^2 (lambda = {lambda})"))?;
    let (lo, hi) = omega01_bounds(lambda)?;
    let top = j_zero(0, 1)? / lambda;
    let w = find_quasi_resonances(0, lambda, Some((0.0, top)))?
        .first()
        .map(|r| r.location)
        .ok_or_else(|| Error::Numeric(format!("no order-0 quasi-resonance for lambda = {lambda}")))?;
    if part == "lower" {
        le(lo, w)
    } else {
        le(w, hi)
    }
}

// ---------------------------------------------------------------- sampling

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..=hi.log10()))
}

/// Uniform on (0, 1) away from both ends.
fn frac(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(1e-3..0.999)
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, v: &[T]) -> T {
    v[rng.gen_range(0..v.len())]
}

fn phase(rng: &mut ChaCha8Rng, modulus: f64) -> [f64; 2] {
    let t: f64 = rng.gen_range(0.0..2.0 * PI);
    [modulus * t.cos(), modulus * t.sin()]
}

/// Single mode, truncated plane wave or random coefficients with
/// |a_n| ≤ (1+|n|)^{-2}, on orders min ≤ |n| ≤ max.
fn draw_modes(rng: &mut ChaCha8Rng, min: u32, max: u32) -> Vec<(i64, [f64; 2])> {
    let (min, max) = (min as i64, max.max(min) as i64);
    let order = |rng: &mut ChaCha8Rng| {
        let m = rng.gen_range(min..=max);
        if m > 0 && rng.gen_bool(0.5) {
            -m
        } else {
            m
        }
    };
    match rng.gen_range(0..3) {
        0 => {
            let n = order(rng);
            let a = log_uniform(rng, 0.1, 1.0);
            vec![(n, phase(rng, a))]
        }
        1 => {
            let d: f64 = rng.gen_range(0.0..2.0 * PI);
            let t = rng.gen_range(min.max(1)..=max.max(1));
            let mut v = Vec::new();
            for n in -t..=t {
                if n.abs() >= min {
                    let ang = n as f64 * (PI / 2.0 - d);
                    v.push((n, [ang.cos(), ang.sin()]));
                }
            }
            v
        }
        _ => {
            let count = rng.gen_range(1..=6);
            let mut v: Vec<(i64, [f64; 2])> = Vec::new();
            for _ in 0..count {
                let n = order(rng);
                if v.iter().any(|(m, _)| *m == n) {
                    continue;
                }
                let cap = (1.0 + n.unsigned_abs() as f64).powi(-2);
                let a = rng.gen_range(0.05..1.0) * cap;
                v.push((n, phase(rng, a)));
            }
            v.sort_by_key(|(n, _)| *n);
            v
        }
    }
}

/// Modes with a guaranteed non-zero a₀ plus a few others.
fn draw_modes_with_mean(rng: &mut ChaCha8Rng, max: u32) -> Vec<(i64, [f64; 2])> {
    let mut v = draw_modes(rng, 1, max);
    let a = rng.gen_range(0.2..1.0);
    v.push((0, phase(rng, a)));
    v.sort_by_key(|(n, _)| *n);
    v
}

fn sigma(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..1.5)
}

fn radius(rng: &mut ChaCha8Rng, decades: f64) -> f64 {
    10f64.powf(rng.gen_range(0.0..decades))
}

fn rng_order(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    rng.gen_range(lo..=hi)
}

/// A point of (0, top) outside the given intervals, by rejection.
fn outside(rng: &mut ChaCha8Rng, top: f64, bad: impl Fn(f64) -> bool) -> Result<f64> {
    for _ in 0..10_000 {
        let x = top * frac(rng);
        if !bad(x) {
            return Ok(x);
        }
    }
    Err(Error::Numeric(format!("no sample outside the exclusion set below {top}")))
}

const ITO_LAMBDAS: [f64; 6] = [8.0, 10.0, 15.0, 20.0, 30.0, 50.0];
const TAUS: [f64; 4] = [0.05, 0.1, 0.2, 0.25];

pub(super) fn sample(id: Statement, part: Option<&str>, index: usize, rng: &mut ChaCha8Rng) -> Result<CheckParams> {
    use Statement::*;
    let all = parts(id);
    let part = part.unwrap_or(all[index % all.len()]).to_string();
    let mut p = CheckParams {
        part: Some(part.clone()),
        ..CheckParams::default()
    };
    let y01 = y01()?;
    match id {
        ThmOsLs | CorSosl => {
            p.lambda = Some(rng.gen_range(0.01..=1.0));
            p.eps = Some(log_uniform(rng, 1e-3, 0.3));
            p.radius = Some(radius(rng, 2.0));
            p.sigma = Some(sigma(rng));
            if part == "p-zero" {
                let pz = rng_order(rng, 1, 10);
                p.p = Some(pz);
                p.oeps = Some(pz as f64 * frac(rng));
                p.modes = Some(draw_modes(rng, pz, 30));
            } else {
                p.oeps = Some(y01 * frac(rng));
                p.modes = Some(draw_modes(rng, 0, 30));
            }
        }
        ThmObLsUpper => {
            p.lambda = Some(rng.gen_range(0.01..=1.0));
            p.eps = Some(log_uniform(rng, 1e-3, 0.3));
            p.radius = Some(radius(rng, 2.0));
            p.sigma = Some(sigma(rng));
            p.modes = Some(draw_modes(rng, 0, 25));
            let s = setup(&p)?;
            let grid = obls_grid(&s)?;
            p.oeps = Some(pick(rng, &grid));
        }
        ThmObLsLower => {
            let lambda = rng.gen_range(0.05..0.8);
            let n0 = n0_thresholds(lambda)?.n0_small.expect("lambda < 1") as u32;
            p.lambda = Some(lambda);
            p.sigma = Some(rng.gen_range(-1.0..1.0));
            p.modes = Some(draw_modes(rng, n0, n0 + 20));
        }
        PropLleq1 => {
            let lambda = rng.gen_range(0.01..=1.0);
            p.lambda = Some(lambda);
            match part.as_str() {
                "s-bound" => {
                    let n = rng_order(rng, 1, 100);
                    p.order = Some(n);
                    p.oeps = Some(first_y_zero(n)? * frac(rng));
                }
                "s-small" => {
                    let n = rng_order(rng, 1, 100);
                    p.order = Some(n);
                    p.oeps = Some(n as f64 * frac(rng));
                }
                "at-n" => {
                    let n = rng_order(rng, 13, 300);
                    let t = 7.0 / (3.0 * (n as f64).cbrt());
                    p.order = Some(n);
                    p.lambda = Some((1.0 - t * t).sqrt() * frac(rng));
                }
                "zero-far" => {
                    p.oeps = Some(log_uniform(rng, 1e-3, 1e2));
                    p.radius = Some(radius(rng, 2.0));
                }
                _ => {
                    p.oeps = Some(y01 * frac(rng));
                    p.radius = Some(radius(rng, 2.0));
                }
            }
        }
        ThmOsLb => {
            p.eps = Some(log_uniform(rng, 1e-3, 0.3));
            p.radius = Some(radius(rng, 2.0));
            p.sigma = Some(sigma(rng));
            if part == "p-zero" {
                let lambda = log_uniform(rng, 1.0, 100.0);
                let pz = rng_order(rng, 1, 10);
                p.lambda = Some(lambda);
                p.p = Some(pz);
                p.oeps = Some(pz as f64 / lambda * frac(rng));
                p.modes = Some(draw_modes(rng, pz, 30));
            } else {
                let lambda = log_uniform(rng, 1.0, 1e3);
                p.lambda = Some(lambda);
                p.oeps = Some(min_half_m(lambda) * frac(rng));
                p.modes = Some(draw_modes(rng, 0, 30));
            }
        }
        PropLgeq1 => {
            let lambda = log_uniform(rng, 1.0, 100.0);
            p.lambda = Some(lambda);
            match part.as_str() {
                "s-bound" => {
                    let n = rng_order(rng, 1, 100);
                    p.order = Some(n);
                    p.oeps = Some((first_jp_zero(n)? / lambda).min(first_y_zero(n)?) * rng.gen_range(1e-3..=1.0));
                }
                "s-small" => {
                    let n = rng_order(rng, 1, 100);
                    p.order = Some(n);
                    p.oeps = Some(n as f64 / lambda * frac(rng));
                }
                "zero-near" => {
                    p.oeps = Some(min_half_m(lambda) * frac(rng));
                    p.radius = Some(radius(rng, 2.0));
                }
                _ => {
                    p.oeps = Some(log_uniform(rng, 1e-3, 1e2));
                    p.radius = Some(radius(rng, 2.0));
                }
            }
        }
        ThmObLr => {
            p.radius = Some(radius(rng, 1.0));
            p.sigma = Some(rng.gen_range(-1.0..1.0));
            if part == "orders" {
                let lambda = rng.gen_range(1.5..10.0);
                let n0 = n0_thresholds(lambda)?.n0_large.expect("lambda > 1") as u32;
                let pp = n0 + rng_order(rng, 0, 10);
                p.lambda = Some(lambda);
                p.p = Some(pp);
                p.modes = Some(draw_modes(rng, n0.saturating_sub(3), pp + 3));
            } else {
                p.lambda = Some(log_uniform(rng, E * E * 1.001, 1e3));
                p.modes = Some(draw_modes_with_mean(rng, 10));
            }
        }
        ThmObLbUpper => {
            let lambda = log_uniform(rng, 1.0, 50.0);
            p.lambda = Some(lambda);
            p.radius = Some(lambda * log_uniform(rng, 1.01, 30.0));
            p.sigma = Some(sigma(rng));
            p.modes = Some(draw_modes(rng, 0, 20));
            let s = setup(&p)?;
            // half the samples on a log scale, half on candidate points
            let x = if rng.gen_bool(0.5) {
                log_uniform(rng, 1e-3, oblb_top(&s))
            } else {
                let orders = s.orders();
                let n = pick(rng, &orders);
                let mut c = Vec::new();
                if lambda > 1.0 {
                    c.extend(find_quasi_resonances(n, lambda, None)?.iter().map(|r| r.location));
                    c.extend(first_branch_roots(n, lambda)?);
                }
                if n > 0 {
                    c.push(n as f64 / lambda);
                    c.push(first_jp_zero(n)? / lambda);
                }
                c.retain(|x| *x <= oblb_top(&s));
                if c.is_empty() {
                    log_uniform(rng, 1e-3, oblb_top(&s))
                } else {
                    pick(rng, &c)
                }
            };
            p.oeps = Some(x);
        }
        ThmObLbLower => {
            let lambda = log_uniform(rng, 1.0, 20.0);
            p.lambda = Some(lambda);
            p.radius = Some(lambda * log_uniform(rng, 1.01, 10.0));
            p.sigma = Some(rng.gen_range(-1.0..1.0));
            p.modes = Some(draw_modes(rng, 1, 20));
        }
        PropItoOne => {
            let lambda = pick(rng, &ITO_LAMBDAS);
            let tau = pick(rng, &TAUS);
            p.lambda = Some(lambda);
            p.tau = Some(tau);
            if part == "s" {
                let n = rng_order(rng, 1, 20);
                p.order = Some(n);
                let ivs = intervals(n, lambda, tau)?;
                p.oeps = Some(outside(rng, first_y_zero(n)?, |x| ivs.iter().any(|i| i.contains(x)))?);
            } else {
                let ivs = intervals(0, lambda, tau)?;
                p.oeps = Some(outside(rng, zeta_zero()?, |x| ivs.iter().any(|i| i.contains(x)))?);
            }
        }
        LemmaHighContrast => {
            let lambda = pick(rng, &[8.0, 20.0, 50.0]);
            let alpha = pick(rng, &[0.5, 1.0, 2.0]);
            let f = pick(rng, &[1.0, 0.5]);
            let eps = 0.01;
            let top = 1.5;
            p.lambda = Some(lambda);
            p.eps = Some(eps);
            p.alpha = Some(alpha);
            p.eta = Some(f * eta_max(lambda) / alpha);
            p.eta_zero = Some(f * eta_zero(lambda));
            p.window = Some(top);
            fill_outside_sample(rng, &mut p, &part, exclusion_set(lambda, eps, alpha, f * eta_max(lambda) / alpha, f * eta_zero(lambda), top)?, top)?;
        }
        CorBroadband => {
            let eps: f64 = pick(rng, &[0.125, 0.1, 0.05, 0.02]);
            let beta = pick(rng, &[0.25, 0.5, 1.0]);
            let alpha = if 2.0 * eps.powf(beta) <= 1.0 { pick(rng, &[0.5, 1.0, 2.0]) } else { pick(rng, &[0.5, 1.0]) };
            let lambda = 1.0 / eps;
            let top = 1.5;
            p.eps = Some(eps);
            p.beta = Some(beta);
            p.alpha = Some(alpha);
            p.window = Some(top);
            let l = eps.ln().abs();
            let set = exclusion_set(
                lambda,
                eps,
                alpha,
                eps.powf(beta) * eta_max(lambda),
                (l + 1.0).powf(-beta) * eta_zero(lambda),
                top,
            )?;
            fill_outside_sample(rng, &mut p, &part, set, top)?;
            p.lambda = None;
        }
        ThmBroadband => {
            let eps = pick(rng, &[1.0 / 16.0, 1.0 / 30.0, 0.01]);
            let lambda = pick(rng, &[0.5, 3.0, 8.0, 20.0, 60.0]);
            let alpha = pick(rng, &[0.5, 1.0, 2.0]);
            let top = 1.0;
            p.eps = Some(eps);
            p.lambda = Some(lambda);
            p.alpha = Some(alpha);
            p.window = Some(top);
            p.sigma = Some(rng.gen_range(-1.0..0.5));
            let choice = broadband_choice(lambda, eps);
            let set = if choice.eta1.is_some() || choice.eta0.is_some() {
                let eta = choice.eta1.unwrap_or(eta_max(lambda) / alpha);
                Some(exclusion_set(lambda, eps, alpha, eta, choice.eta0.unwrap_or(eta_zero(lambda)), top)?)
            } else {
                None
            };
            let l = eps.ln().abs();
            match part.as_str() {
                "field" => {
                    p.modes = Some(draw_modes(rng, 1, 15));
                    p.radius = Some(eps.powf(-0.75) * radius(rng, 1.0));
                    let bad = |x: f64| choice.eta1.is_some() && set.as_ref().is_some_and(|s| in_part(s, x, false));
                    p.oeps = Some(outside(rng, top, bad)?);
                }
                "mean" => {
                    p.modes = Some(draw_modes_with_mean(rng, 5));
                    let rmax = (l + 1.0).powf(-1.0 / 12.0);
                    p.radius = Some(rng.gen_range(1.0..=rmax / eps));
                    let bad = |x: f64| choice.eta0.is_some() && set.as_ref().is_some_and(|s| in_part(s, x, true));
                    p.oeps = Some(outside(rng, top, bad)?);
                }
                _ => {}
            }
        }
        LemmaFirstCase => {
            let lambda = log_uniform(rng, 0.01, 100.0);
            p.lambda = Some(lambda);
            match part.as_str() {
                "s-bound" => {
                    let n = rng_order(rng, 1, 100);
                    p.order = Some(n);
                    p.oeps = Some((first_jp_zero(n)? / lambda).min(first_y_zero(n)?) * rng.gen_range(1e-3..=1.0));
                }
                "s-small" => {
                    let n = rng_order(rng, 1, 100);
                    p.order = Some(n);
                    p.oeps = Some((n as f64 / lambda).min(n as f64) * rng.gen_range(1e-3..=1.0));
                }
                _ => {
                    let n = rng_order(rng, 13, 300);
                    let t = 7.0 / (3.0 * (n as f64).cbrt());
                    p.order = Some(n);
                    p.lambda = Some((1.0 - t * t).sqrt() * frac(rng));
                }
            }
        }
        PropEstimate5Half => {
            let n = rng_order(rng, 1, 200);
            p.order = Some(n);
            p.oeps = Some(n as f64 * rng.gen_range(1e-3..=1.0));
        }
        PropNtoYn1 => {
            let n = rng_order(rng, 1, 100);
            let y1 = first_y_zero(n)?;
            p.order = Some(n);
            p.lambda = Some(log_uniform(rng, 0.01, 100.0));
            p.oeps = Some(n as f64 + (y1 - n as f64) * rng.gen_range(0.0..=1.0));
        }
        PropN0 => {
            if part == "below-one" {
                p.lambda = Some(rng.gen_range(0.01..=1.0));
                p.oeps = Some(y01 * frac(rng));
            } else {
                let lambda = log_uniform(rng, 1.0, 1e3);
                p.lambda = Some(lambda);
                p.oeps = Some(min_half_m(lambda) * rng.gen_range(1e-3..=1.0));
            }
        }
        PropR0 => {
            p.radius = Some(radius(rng, 2.0));
            match part.as_str() {
                "decay" => {
                    p.lambda = Some(log_uniform(rng, 0.01, 100.0));
                    p.oeps = Some(log_uniform(rng, 1e-3, 1e2));
                }
                "below-one-far" => {
                    p.lambda = Some(rng.gen_range(0.01..1.0));
                    p.oeps = Some(log_uniform(rng, 1e-3, 1e2));
                }
                "below-one-near" => {
                    p.lambda = Some(rng.gen_range(0.01..1.0));
                    p.oeps = Some(y01 * frac(rng));
                }
                "above-one-far" => {
                    p.lambda = Some(log_uniform(rng, 1.0, 100.0));
                    p.oeps = Some(log_uniform(rng, 1e-3, 1e2));
                }
                _ => {
                    let lambda = log_uniform(rng, 1.0, 1e3);
                    p.lambda = Some(lambda);
                    p.oeps = Some(min_half_m(lambda) * frac(rng));
                }
            }
        }
        PropR0Plus => {
            let lambda = log_uniform(rng, 7.0, 1e3);
            p.lambda = Some(lambda);
            p.oeps = Some(m_lambda(lambda).expect("lambda >= 7") * rng.gen_range(1e-3..=1.0));
            p.radius = Some(radius(rng, 2.0));
        }
        PropInk => {
            p.lambda = Some(pick(rng, &[7.0, 8.0, 10.0, 15.0, 20.0, 30.0, 50.0, 100.0]));
            p.tau = Some(pick(rng, &TAUS));
            if part == "orders" {
                p.order = Some(rng_order(rng, 1, 30));
            }
        }
        PropPropsg => {
            let n = pick(rng, &[1u32, 2, 3, 5, 8, 10, 20, 30, 50, 100, 200]);
            p.order = Some(n);
            let nu = n as f64;
            let cc = critical_constants(n)?;
            let kappa = cc.kappa_n.expect("n >= 1");
            let j1 = j_zero(n, 1)?;
            let x = match part.as_str() {
                "i-decreasing" => {
                    if rng.gen_bool(0.5) {
                        j1 * rng.gen_range(0.01..0.999)
                    } else {
                        j1 + (j_zero(n, 2)? - j1) * rng.gen_range(0.001..0.999)
                    }
                }
                "ii-concave" => j1 * rng.gen_range(0.01..0.999),
                "iii-lower" | "iii-upper" | "vi-lower" | "vi-upper" | "bd-product" => nu * rng.gen_range(1e-3..=1.0),
                "iv-k-positive" => first_y_zero(n)? * frac(rng),
                "iv-k-decreasing" => kappa * frac(rng),
                "v-inner-lower" | "v-inner-upper" => kappa * rng.gen_range(1e-3..=1.0),
                "v-outer-lower" | "v-outer-upper" => kappa + (nu - kappa) * rng.gen_range(0.0..=1.0),
                _ => nu * frac(rng),
            };
            if !part.starts_with("iii-cn") && !part.starts_with("iv-kappa") {
                p.oeps = Some(x);
            }
        }
        PropLogYn => {
            match part.as_str() {
                "zeta0" | "zeta0-ratio" => {}
                "increasing" => {
                    let n = pick(rng, &[0u32, 1, 2, 5, 10, 30, 100]);
                    p.order = Some(n);
                    p.oeps = Some(critical_constants(n)?.zeta_n * frac(rng));
                }
                "zeta-above-kappa" => p.order = Some(rng_order(rng, 1, 200)),
                "bdkn-inner" => {
                    let n = rng_order(rng, 1, 200);
                    p.order = Some(n);
                    p.oeps = Some(critical_constants(n)?.chi_n.expect("n >= 1") * rng.gen_range(1e-3..=1.0));
                }
                _ => {
                    let n = rng_order(rng, 1, 200);
                    let chi = critical_constants(n)?.chi_n.expect("n >= 1");
                    p.order = Some(n);
                    p.oeps = Some(chi + (n as f64 - chi) * rng.gen_range(0.0..=1.0));
                }
            }
        }
        LemmaLogConcave => {
            let x = log_uniform(rng, 1e-3, 1e3);
            p.oeps = Some(x);
            if part != "convex" {
                let ymax = (MAX_ARG / x).min(100.0);
                p.y = Some(log_uniform(rng, 1.0001, ymax.max(1.001)));
            }
        }
        LemmaMuZeroOne => {
            p.lambda = Some(log_uniform(rng, E * E, 1e4));
        }
    }
    Ok(p)
}

/// Mode set, radius and an out-of-set frequency for the exclusion statements.
fn fill_outside_sample(
    rng: &mut ChaCha8Rng,
    p: &mut CheckParams,
    part: &str,
    set: Arc<ExclusionSet>,
    top: f64,
) -> Result<()> {
    match part {
        "field" => {
            p.modes = Some(draw_modes(rng, 1, 20));
            p.sigma = Some(rng.gen_range(-1.0..0.5));
            p.radius = Some(radius(rng, 2.0));
            p.oeps = Some(outside(rng, top, |x| in_part(&set, x, false))?);
        }
        "mean" => {
            p.modes = Some(draw_modes_with_mean(rng, 5));
            p.radius = Some(radius(rng, 2.0));
            p.oeps = Some(outside(rng, top, |x| in_part(&set, x, true))?);
        }
        _ => {}
    }
    Ok(())
}
