//! Quasi-resonant frequencies, exclusion intervals around them and the
//! broadband exclusion sets built from those intervals.
//!
//! A triplet (n, x, λ) is quasi-resonant when 0 < x < y_{n,1} and
//! R_n(x, λ) = −1, i.e. F(x) = Y'_n(x)J_n(λx) − λJ'_n(λx)Y_n(x) = 0. For
//! n ≥ 1 every root lies in some U_{n,k} = (j'_{n,k}/λ, j_{n,k}/λ), one per
//! interval; for n = 0 the first interval is (0, j_{0,1}/λ).

use std::cmp::Ordering;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quotients::critical_constants;
use crate::roots::brent;
use crate::scatter::{crossing_function, fmt17, m_lambda, reflection_at, resonance_equation_residual};
use crate::specfun::{first_jp_zero, first_y_zero, j_zero, zeros, ZeroTable, MAX_ORDER};

/// One quasi-resonance ω_{n,k} with the interval U_{n,k} that contains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub order: u32,
    pub branch: usize,
    pub location: f64,
    /// |R_n(x, λ) + 1| at the stored location
    pub residual: f64,
    /// |F| / (|Y'_n(x)J_n(λx)| + |λJ'_n(λx)Y_n(x)|)
    pub equation_residual: f64,
    pub u_lo: f64,
    pub u_hi: f64,
}

/// I_{n,k}(τ) = [α, β] with φ_n(α) = −1 + τ and φ_n(β) = −1 − τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionInterval {
    pub order: u32,
    pub branch: usize,
    pub tau: f64,
    pub alpha_end: f64,
    pub beta_end: f64,
    pub resonance: f64,
}

impl ExclusionInterval {
    pub fn len(&self) -> f64 {
        self.beta_end - self.alpha_end
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.alpha_end && x <= self.beta_end
    }
}

/// Exclusion set of one contrast, in physical frequency √q₀·ω = x/ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionSet {
    pub lambda: f64,
    pub eps: f64,
    pub eta: f64,
    pub alpha: f64,
    pub eta_max: f64,
    pub eta_zero: f64,
    /// flat τ of the order-0 intervals
    pub tau_zero: f64,
    /// (n, τ_n) for every order n ≥ 1 that was scanned
    pub tau_schedule: Vec<(u32, f64)>,
    /// (n, k) pairs of K(λ, n) whose U_{n,k} meets the window below y_{n,1},
    /// for every scanned order, n = 0 included
    pub branches: Vec<(u32, Vec<usize>)>,
    /// per-(n, k) intervals, nondimensional, sorted by left end
    pub intervals: Vec<ExclusionInterval>,
    /// union of the intervals in physical frequency, sorted and disjoint
    pub merged: Vec<(f64, f64)>,
    /// |I₁| and |I₀| in physical frequency
    pub measure_i1: f64,
    pub measure_i0: f64,
    pub total_measure: f64,
    pub n0: N0Thresholds,
    pub window: (f64, f64),
}

/// n₀ of the small-contrast and large-contrast blow-up statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct N0Thresholds {
    /// smallest n ≥ 1 with λ² ≤ 1 − 49/(9n^{2/3}) (λ < 1 only)
    pub n0_small: Option<u64>,
    /// smallest n ≥ 0 with λ > j_{n,1}/y_{n,1} (λ > 1 only)
    pub n0_large: Option<u64>,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("contrast must be positive, got {lambda}")))
    }
}

/// Zero table with every j'_{n,k} below `limit` (plus one more).
fn table_covering(n: u32, limit: f64) -> Result<ZeroTable> {
    let mut count = (((limit - n as f64).max(0.0) / std::f64::consts::PI) as usize + 4).max(4);
    loop {
        let t = zeros(n, count)?;
        if t.jp(count) >= limit {
            return Ok(t);
        }
        count *= 2;
    }
}

/// (k, j'_{n,k}/λ, j_{n,k}/λ) for every k with j'_{n,k} < λ·upper.
fn branch_intervals(n: u32, lambda: f64, upper: f64) -> Result<Vec<(usize, f64, f64)>> {
    let t = table_covering(n, lambda * upper)?;
    Ok((1..=t.len())
        .take_while(|&k| t.jp(k) < lambda * upper)
        .map(|k| (k, t.jp(k) / lambda, t.j(k) / lambda))
        .collect())
}

fn resonance_fn(n: u32, lambda: f64) -> impl Fn(f64) -> Result<f64> {
    move |x| crossing_function(n, lambda, x, 1.0)
}

/// Brent to a few ulps, then the float with the smallest |f| nearby.
fn polish<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<f64> {
    let x = brent(f, a, b, 1e-15 * a.abs().max(b.abs()))?;
    let mut best = (f(x)?.abs(), x);
    let (mut up, mut down) = (x, x);
    for _ in 0..6 {
        up = up.next_up();
        down = down.next_down();
        for c in [up, down] {
            if c > a && c < b {
                let v = f(c)?.abs();
                if v < best.0 {
                    best = (v, c);
                }
            }
        }
    }
    Ok(best.1)
}

/// Roots of `f` on (lo, hi) located by sign changes on an even grid.
fn grid_roots<F: Fn(f64) -> Result<f64>>(f: &F, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    let mut roots = Vec::new();
    let h = (hi - lo) / points as f64;
    let mut xa = lo;
    let mut fa = f(xa)?;
    for i in 1..=points {
        let xb = if i == points { hi } else { lo + h * i as f64 };
        let fb = f(xb)?;
        if fa == 0.0 {
            roots.push(xa);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(polish(f, xa, xb)?);
        }
        xa = xb;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(xa);
    }
    Ok(roots)
}

fn record(n: u32, lambda: f64, k: usize, x: f64, u_lo: f64, u_hi: f64) -> Result<ResonanceRecord> {
    let r = reflection_at(n as i64, lambda, x)?;
    Ok(ResonanceRecord {
        order: n,
        branch: k,
        location: x,
        residual: (r + Complex64::new(1.0, 0.0)).norm(),
        equation_residual: resonance_equation_residual(n, lambda, x)?,
        u_lo,
        u_hi,
    })
}

fn resonance_in(n: u32, lambda: f64, k: usize, u_lo: f64, u_hi: f64, y1: f64) -> Result<Option<ResonanceRecord>> {
    let hi = u_hi.min(y1);
    // F is singular at 0 only for the first order-0 interval
    let lo = if u_lo == 0.0 { hi * 1e-9 } else { u_lo };
    if hi <= lo {
        return Ok(None);
    }
    let points = 32.max((8.0 * lambda * (u_hi - u_lo)).ceil() as usize);
    let f = resonance_fn(n, lambda);
    let roots = grid_roots(&f, lo, hi, points)?;
    match roots.as_slice() {
        [] if hi < u_hi => Ok(None),
        [] => Err(Error::Numeric(format!(
            "no sign change of F on U_({n},{k}) = ({u_lo:e}, {u_hi:e}), lambda = {lambda}"
        ))),
        [x] => Ok(Some(record(n, lambda, k, *x, u_lo, u_hi)?)),
        many => Err(Error::Numeric(format!(
            "{} sign changes of F on U_({n},{k}) = ({u_lo:e}, {u_hi:e}), lambda = {lambda}: {many:?}",
            many.len()
        ))),
    }
}

/// All quasi-resonances of order n, optionally restricted to a window of x.
///
/// Intervals cut by y_{n,1} are scanned as well; a root there is still
/// quasi-resonant. Records are ordered by branch.
pub fn find_quasi_resonances(n: u32, lambda: f64, window: Option<(f64, f64)>) -> Result<Vec<ResonanceRecord>> {
    check_lambda(lambda)?;
    let y1 = first_y_zero(n)?;
    let (wlo, whi) = window.unwrap_or((0.0, y1));
    if !(wlo < whi) {
        return Err(Error::Domain(format!("empty window ({wlo}, {whi})")));
    }
    let top = whi.min(y1);
    let branches: Vec<_> = branch_intervals(n, lambda, top)?
        .into_iter()
        .filter(|(_, lo, hi)| *hi > wlo && *lo < top)
        .collect();
    let found: Vec<Option<ResonanceRecord>> = branches
        .par_iter()
        .map(|&(k, lo, hi)| resonance_in(n, lambda, k, lo, hi, y1))
        .collect::<Result<_>>()?;
    Ok(found
        .into_iter()
        .flatten()
        .filter(|r| r.location > wlo && r.location < whi)
        .collect())
}

/// (√2/(λ√lnλ))·(1 ∓ 1/(2√lnλ)), valid for λ ≥ e².
pub fn omega01_bounds(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda >= std::f64::consts::E.powi(2)) {
        return Err(Error::Domain(format!("omega01 bounds need lambda >= e^2, got {lambda}")));
    }
    let l = lambda.ln().sqrt();
    let base = std::f64::consts::SQRT_2 / (lambda * l);
    Ok((base * (1.0 - 0.5 / l), base * (1.0 + 0.5 / l)))
}

/// ζ₀, the end of the window where the order-0 intervals are monotone.
pub fn zeta_zero() -> Result<f64> {
    Ok(critical_constants(0)?.zeta_n)
}

/// K(λ, n): k with j'_{n,k} < nλ (n ≥ 1) or j'_{0,k} < ζ₀λ (n = 0).
pub fn branch_set(n: u32, lambda: f64) -> Result<Vec<usize>> {
    check_lambda(lambda)?;
    let limit = if n == 0 { zeta_zero()? * lambda } else { n as f64 * lambda };
    let t = table_covering(n, limit)?;
    Ok((1..=t.len()).take_while(|&k| t.jp(k) < limit).collect())
}

/// Endpoint of I_{n,k}(τ) where g_n(λx) = −c·k_n(x), between `a` and `b`.
fn endpoint(n: u32, lambda: f64, c: f64, a: f64, b: f64) -> Result<f64> {
    let f = |x: f64| crossing_function(n, lambda, x, c);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Numeric(format!(
            "phi_{n} = -{c} not bracketed on ({a:e}, {b:e}) for lambda = {lambda}: ({fa:e}, {fb:e})"
        )));
    }
    brent(f, a, b, 1e-15 * b)
}

fn interval_for(n: u32, lambda: f64, tau: f64, r: &ResonanceRecord, y1: f64) -> Result<ExclusionInterval> {
    let lo = if r.u_lo == 0.0 { r.u_hi * 1e-9 } else { r.u_lo };
    let hi = r.u_hi.min(y1 * (1.0 - 1e-12));
    Ok(ExclusionInterval {
        order: n,
        branch: r.branch,
        tau,
        alpha_end: endpoint(n, lambda, 1.0 - tau, lo, r.location)?,
        beta_end: endpoint(n, lambda, 1.0 + tau, r.location, hi)?,
        resonance: r.location,
    })
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 0.25 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("tau must lie in (0, 1/4], got {tau}")))
    }
}

/// I_{n,k}(τ) for every k ∈ K(λ, n) that carries a quasi-resonance.
///
/// For n = 0 only intervals meeting (m_λ, ζ₀) are kept; they are not clipped.
pub fn exclusion_intervals(n: u32, lambda: f64, tau: f64) -> Result<Vec<ExclusionInterval>> {
    exclusion_intervals_within(n, lambda, tau, (0.0, f64::INFINITY)).map(|(iv, _)| iv)
}

/// K(λ, n) cut to the branches whose U_{n,k} meets (xlo, min(xhi, y_{n,1})).
fn branches_within(n: u32, lambda: f64, xlo: f64, xhi: f64) -> Result<Vec<(usize, f64, f64)>> {
    let y1 = first_y_zero(n)?;
    let cap = if n == 0 { zeta_zero()? } else { n as f64 };
    let top = xhi.min(y1);
    let limit = (cap * lambda).min(top * lambda);
    if !(limit > 0.0) {
        return Ok(Vec::new());
    }
    let t = table_covering(n, limit)?;
    Ok((1..=t.len())
        .take_while(|&k| t.jp(k) < limit)
        .map(|k| (k, t.jp(k) / lambda, t.j(k) / lambda))
        .filter(|(_, _, hi)| *hi > xlo)
        .collect())
}

/// Intervals of order n whose branch meets the x-window, with the branch indices used.
fn exclusion_intervals_within(
    n: u32,
    lambda: f64,
    tau: f64,
    (xlo, xhi): (f64, f64),
) -> Result<(Vec<ExclusionInterval>, Vec<usize>)> {
    if !(lambda >= 7.0) {
        return Err(Error::Domain(format!("exclusion intervals need lambda >= 7, got {lambda}")));
    }
    check_tau(tau)?;
    let y1 = first_y_zero(n)?;
    let branches = branches_within(n, lambda, xlo, xhi)?;
    let found: Vec<Option<ExclusionInterval>> = branches
        .par_iter()
        .map(|&(k, lo, hi)| -> Result<Option<ExclusionInterval>> {
            match resonance_in(n, lambda, k, lo, hi, y1)? {
                Some(r) => Ok(Some(interval_for(n, lambda, tau, &r, y1)?)),
                None => Ok(None),
            }
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<ExclusionInterval> = found.into_iter().flatten().collect();
    if n == 0 {
        let lo = m_lambda(lambda).expect("lambda >= 7");
        let hi = zeta_zero()?;
        out.retain(|i| i.beta_end > lo && i.alpha_end < hi);
    }
    out.sort_by(|a, b| a.alpha_end.partial_cmp(&b.alpha_end).unwrap_or(Ordering::Equal));
    Ok((out, branches.into_iter().map(|(k, _, _)| k).collect()))
}

/// η_max = (3/2)·lnλ/λ.
pub fn eta_max(lambda: f64) -> f64 {
    1.5 * lambda.ln() / lambda
}

/// η₀ = (7/4)·ln(lnλ)/λ.
pub fn eta_zero(lambda: f64) -> f64 {
    1.75 * lambda.ln().ln() / lambda
}

/// τ_n = ηα/((1+n)^{2+α}) · 1/(4η_max).
pub fn tau_schedule(n: u32, lambda: f64, alpha: f64, eta: f64) -> f64 {
    eta * alpha / (1.0 + n as f64).powf(2.0 + alpha) / (4.0 * eta_max(lambda))
}

/// Parameters of [`broadband_set`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BroadbandParams {
    pub alpha: f64,
    /// η of the n ≥ 1 part, at most η_max/α
    pub eta: f64,
    /// η of the n = 0 part, at most η₀; defaults to min(η, η₀)
    pub eta_zero: Option<f64>,
    /// window in physical frequency √q₀·ω
    pub window: (f64, f64),
}

fn merge(mut spans: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in spans {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn measure(spans: &[(f64, f64)]) -> f64 {
    merge(spans.to_vec()).iter().map(|(a, b)| b - a).sum()
}

/// Exclusion set O_ε = ε⁻¹·∪ I_{n,k}(τ_n) together with the order-0 part I₀.
///
/// Orders n ≥ 1 are scanned while j'_{n,1}/λ lies below the window top.
pub fn broadband_set(lambda: f64, eps: f64, params: &BroadbandParams) -> Result<ExclusionSet> {
    if !(lambda > 7.0) {
        return Err(Error::Domain(format!("broadband sets need lambda > 7, got {lambda}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let BroadbandParams { alpha, eta, window, .. } = *params;
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let emax = eta_max(lambda);
    if !(eta > 0.0 && eta <= emax / alpha) {
        return Err(Error::Parameter(format!(
            "eta = {eta} outside (0, eta_max/alpha = {}]",
            emax / alpha
        )));
    }
    let e0 = eta_zero(lambda);
    let eta0 = params.eta_zero.unwrap_or(eta.min(e0));
    if !(eta0 > 0.0 && eta0 <= e0) {
        return Err(Error::Parameter(format!("order-0 eta = {eta0} outside (0, eta_0 = {e0}]")));
    }
    let (wlo, whi) = window;
    if !(wlo >= 0.0 && wlo < whi && whi.is_finite()) {
        return Err(Error::Domain(format!("bad frequency window ({wlo}, {whi})")));
    }
    let (xlo, xhi) = (wlo * eps, whi * eps);
    let in_window = |i: &ExclusionInterval| i.beta_end > xlo && i.alpha_end < xhi;

    let tau0 = 0.25 * eta0 / e0;
    check_tau(tau0)?;
    let (zero, k0) = exclusion_intervals_within(0, lambda, tau0, (xlo, xhi))?;
    let mut intervals: Vec<ExclusionInterval> = zero.into_iter().filter(in_window).collect();
    let mut branches = vec![(0, k0)];
    let mut schedule = Vec::new();
    let mut n = 1u32;
    while first_jp_zero(n)? / lambda < xhi {
        if n > MAX_ORDER {
            return Err(Error::Domain(format!(
                "window top {whi} needs orders beyond {MAX_ORDER}"
            )));
        }
        let tau = tau_schedule(n, lambda, alpha, eta);
        check_tau(tau)?;
        schedule.push((n, tau));
        let (found, ks) = exclusion_intervals_within(n, lambda, tau, (xlo, xhi))?;
        branches.push((n, ks));
        intervals.extend(found.into_iter().filter(in_window));
        n += 1;
    }
    intervals.sort_by(|a, b| {
        a.alpha_end
            .partial_cmp(&b.alpha_end)
            .unwrap_or(Ordering::Equal)
            .then(a.order.cmp(&b.order))
    });
    let phys = |i: &ExclusionInterval| (i.alpha_end / eps, i.beta_end / eps);
    let i1: Vec<_> = intervals.iter().filter(|i| i.order > 0).map(phys).collect();
    let i0: Vec<_> = intervals.iter().filter(|i| i.order == 0).map(phys).collect();
    let merged = merge(intervals.iter().map(phys).collect());
    let total_measure = merged.iter().map(|(a, b)| b - a).sum();
    Ok(ExclusionSet {
        lambda,
        eps,
        eta,
        alpha,
        eta_max: emax,
        eta_zero: eta0,
        tau_zero: tau0,
        tau_schedule: schedule,
        branches,
        measure_i1: measure(&i1),
        measure_i0: measure(&i0),
        total_measure,
        merged,
        intervals,
        n0: n0_thresholds(lambda)?,
        window,
    })
}

impl ExclusionSet {
    /// Bound Σ_n 6τ_n·n·lnλ/λ/ε on the n ≥ 1 part.
    pub fn i1_bound(&self) -> f64 {
        let l = self.lambda;
        self.tau_schedule
            .iter()
            .map(|(n, t)| 6.0 * t * *n as f64 * l.ln() / l)
            .sum::<f64>()
            / self.eps
    }

    /// Bound 7τ₀·ln(lnλ)/λ/ε on the n = 0 part.
    pub fn i0_bound(&self) -> f64 {
        7.0 * self.tau_zero * self.lambda.ln().ln() / self.lambda / self.eps
    }

    /// CSV rows (n, k, alpha_end, beta_end, tau_n) in physical frequency.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# diskscat {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "lambda,eps,eta,alpha,total_measure")?;
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt17(self.lambda),
            fmt17(self.eps),
            fmt17(self.eta),
            fmt17(self.alpha),
            fmt17(self.total_measure)
        )?;
        writeln!(out, "n,k,alpha_end,beta_end,tau_n")?;
        for i in &self.intervals {
            writeln!(
                out,
                "{},{},{},{},{}",
                i.order,
                i.branch,
                fmt17(i.alpha_end / self.eps),
                fmt17(i.beta_end / self.eps),
                fmt17(i.tau)
            )?;
        }
        Ok(())
    }
}

/// Asymptotic j_{n,1}/y_{n,1} for orders past the zero tables.
fn asymptotic_ratio(n: f64) -> f64 {
    let c = n.cbrt();
    (n + 1.855_757_1 * c + 1.033_150 / c) / (n + 0.931_576_8 * c + 0.260_351 / c)
}

/// n₀ thresholds for a contrast; only the one matching the side of 1 is set.
///
/// Past order 500 the large-contrast threshold uses the three-term
/// asymptotic expansions of j_{n,1} and y_{n,1}.
pub fn n0_thresholds(lambda: f64) -> Result<N0Thresholds> {
    check_lambda(lambda)?;
    let mut out = N0Thresholds {
        n0_small: None,
        n0_large: None,
    };
    if lambda < 1.0 {
        let gap = 1.0 - lambda * lambda;
        let ok = |n: u64| lambda * lambda <= 1.0 - 49.0 / (9.0 * (n as f64).powf(2.0 / 3.0));
        let mut n = ((49.0 / (9.0 * gap)).powf(1.5).floor() as u64).saturating_sub(2).max(1);
        while !ok(n) {
            n += 1;
        }
        out.n0_small = Some(n);
    } else if lambda > 1.0 {
        for n in 0..=MAX_ORDER {
            if lambda > j_zero(n, 1)? / first_y_zero(n)? {
                out.n0_large = Some(n as u64);
                return Ok(out);
            }
        }
        let (mut lo, mut hi) = (MAX_ORDER as u64, 2 * MAX_ORDER as u64);
        while lambda <= asymptotic_ratio(hi as f64) {
            lo = hi;
            hi = hi.checked_mul(2).ok_or_else(|| {
                Error::Numeric(format!("n0 beyond u64 range for lambda = {lambda}"))
            })?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if lambda > asymptotic_ratio(mid as f64) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.n0_large = Some(hi);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_thirty_contrast_two() {
        let r = find_quasi_resonances(30, 2.0, None).unwrap();
        assert_eq!(r.len(), 8);
        assert!((r[0].location - 17.4211682).abs() < 1e-6);
        assert!((r[7].location - 31.4683226).abs() < 1e-6);
    }

    #[test]
    fn small_contrast_threshold() {
        let t = n0_thresholds(1e-6).unwrap();
        assert_eq!(t.n0_small, Some(13));
        assert!(n0_thresholds(2.0).unwrap().n0_large.unwrap() <= 30);
    }

    #[test]
    fn merge_overlaps() {
        let m = merge(vec![(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(m, vec![(0.0, 2.0), (3.0, 4.0)]);
    }
}
