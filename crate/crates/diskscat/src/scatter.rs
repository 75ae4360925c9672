//! Reflection/transmission coefficients and Fourier traces of the fields.
//!
//! Exterior index q₀, inclusion index q on the disk of radius ε, frequency ω.
//! With x = √q₀·ω·ε and λ = √(q/q₀), mode n of the incident field
//! a_n·J_n(√q₀ωr)e^{inθ} produces a_n·R_n·H_n(√q₀ωr)e^{inθ} outside and
//! a_n·T_n·J_n(√q·ωr)e^{inθ} inside.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quotients::{g_from_scaled, k_from_scaled, n_plus};
use crate::specfun::{eval_scaled, ldexp, phase_from_scaled, Scaled};
use crate::wide::Wide;

/// Distance to a zero of J_n(λx) inside which S_n is replaced by its limit 1.
pub const S_LIMIT_RADIUS: f64 = 1e-8;
/// Relative distance to a zero of J_n(x) at which S_n is declared degenerate.
pub const S_DEGENERATE_RADIUS: f64 = 1e-10;
/// Normalised residual of the resonance equation accepted by [`resonant_mode`].
pub const RESONANCE_TOL: f64 = 1e-8;

/// Physical parameters of one scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterConfig {
    pub q0: f64,
    pub q: f64,
    pub eps: f64,
    pub omega: f64,
}

impl ScatterConfig {
    pub fn new(q0: f64, q: f64, eps: f64, omega: f64) -> Result<ScatterConfig> {
        for (name, v) in [("q0", q0), ("q", q), ("eps", eps), ("omega", omega)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(ScatterConfig { q0, q, eps, omega })
    }

    /// Unit background, unit radius: ω is then the rescaled frequency.
    pub fn from_contrast(lambda: f64, oeps: f64) -> Result<ScatterConfig> {
        ScatterConfig::new(1.0, lambda * lambda, 1.0, oeps)
    }

    /// λ = √(q/q₀).
    pub fn lambda(&self) -> f64 {
        (self.q / self.q0).sqrt()
    }

    /// ωε = √q₀·ω·ε.
    pub fn oeps(&self) -> f64 {
        self.q0.sqrt() * self.omega * self.eps
    }

    /// m_λ = 1/(λ√(ln λ + 1)), defined for λ ≥ 1.
    pub fn m_lambda(&self) -> Option<f64> {
        m_lambda(self.lambda())
    }

    /// Same geometry at another frequency.
    pub fn with_omega(&self, omega: f64) -> ScatterConfig {
        ScatterConfig { omega, ..*self }
    }

    /// Same geometry at a given rescaled frequency.
    pub fn with_oeps(&self, oeps: f64) -> ScatterConfig {
        self.with_omega(oeps / (self.q0.sqrt() * self.eps))
    }
}

/// m_λ = 1/(λ√(ln λ + 1)) for λ ≥ 1.
pub fn m_lambda(lambda: f64) -> Option<f64> {
    (lambda >= 1.0).then(|| 1.0 / (lambda * (lambda.ln() + 1.0).sqrt()))
}

/// R_n, T_n and S_n of one order (S_n is `None` where J_n(ωε) vanishes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPair {
    pub order: i64,
    pub r: Complex64,
    pub t: Complex64,
    pub s: Option<Complex64>,
}

fn order_u32(n: i64) -> Result<u32> {
    u32::try_from(n.unsigned_abs()).map_err(|_| Error::Domain(format!("order {n} out of range")))
}

fn check_nondim(lambda: f64, x: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("contrast must be positive, got {lambda}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("rescaled frequency must be positive, got {x}")));
    }
    Ok(())
}

/// Scaled values at x and at λx, the common input of every coefficient.
struct Pair {
    at_x: Scaled,
    at_lx: Scaled,
    lambda: f64,
}

impl Pair {
    fn new(n: u32, lambda: f64, x: f64) -> Result<Pair> {
        check_nondim(lambda, x)?;
        Ok(Pair {
            at_x: eval_scaled(n, x)?.normalized(),
            at_lx: eval_scaled(n, lambda * x)?.normalized(),
            lambda,
        })
    }

    /// Mantissas of Re D and Im D; Re D carries 2^(jx+jl), Im D 2^(yx+jl).
    fn denominator(&self) -> (f64, f64) {
        let s = &self.at_x;
        let a = self.at_lx.j;
        let b = self.lambda * self.at_lx.jp;
        (s.jp * a - b * s.j, s.yp * a - b * s.y)
    }

    fn reflection(&self) -> Wide {
        let (rr, ri) = self.denominator();
        if rr == 0.0 {
            return Wide::real(0.0, 0);
        }
        if ri == 0.0 {
            return Wide::real(-1.0, 0);
        }
        let te = self.at_x.yexp - self.at_x.jexp;
        let tm = ri / rr;
        if tm.abs().log2() + te as f64 <= 0.0 {
            let t = ldexp(tm, te);
            Wide::new(Complex64::new(-1.0, t) / (1.0 + t * t), 0)
        } else {
            let um = rr / ri;
            let u = ldexp(um, -te);
            Wide::new(Complex64::new(-u, 1.0) * um / (1.0 + u * u), -te)
        }
    }

    fn transmission(&self) -> Wide {
        let s = &self.at_x;
        let (rr, ri) = self.denominator();
        let num = Wide::new(Complex64::new(0.0, s.j * s.yp - s.y * s.jp), s.jexp + s.yexp);
        let den = Wide::from_parts(rr, s.jexp, ri, s.yexp);
        let den = Wide::new(den.m, den.e + self.at_lx.jexp);
        num.div(den)
    }

    /// −R·H_n(x)/J_n(x) without the limit/degeneracy handling.
    fn s_raw(&self) -> Wide {
        let s = &self.at_x;
        let h_over_j = Wide::from_parts(1.0, 0, s.y / s.j, s.yexp - s.jexp);
        self.reflection().mul(h_over_j).scale(Complex64::new(-1.0, 0.0))
    }

    fn s_ratio(&self, n: u32, x: f64) -> Result<Complex64> {
        let l = &self.at_lx;
        if l.j == 0.0 || (l.j / l.jp).abs() < S_LIMIT_RADIUS {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let s = &self.at_x;
        if s.j == 0.0 || (s.j / s.jp).abs() < S_DEGENERATE_RADIUS * x {
            return Err(Error::Degenerate(format!(
                "J_{n}({x}) vanishes; S_n has a pole there"
            )));
        }
        Ok(self.s_raw().to_complex())
    }
}

pub(crate) fn wide_j(s: &Scaled) -> Wide {
    Wide::real(s.j, s.jexp)
}

pub(crate) fn wide_h(s: &Scaled) -> Wide {
    Wide::from_parts(s.j, s.jexp, s.y, s.yexp)
}

/// R_n at rescaled frequency x and contrast λ.
pub fn reflection_at(n: i64, lambda: f64, x: f64) -> Result<Complex64> {
    Ok(Pair::new(order_u32(n)?, lambda, x)?.reflection().to_complex())
}

/// T_n from the two matching conditions at r = ε.
pub fn transmission_at(n: i64, lambda: f64, x: f64) -> Result<Complex64> {
    let t = Pair::new(order_u32(n)?, lambda, x)?.transmission().to_complex();
    if !t.re.is_finite() || !t.im.is_finite() {
        return Err(Error::Domain(format!("T_{n} overflows at λ={lambda}, x={x}")));
    }
    Ok(t)
}

/// S_n = −R_n·H_n(x)/J_n(x), with the value 1 near zeros of J_n(λx).
pub fn s_ratio_at(n: i64, lambda: f64, x: f64) -> Result<Complex64> {
    let m = order_u32(n)?;
    Pair::new(m, lambda, x)?.s_ratio(m, x)
}

/// S_n through g_n, k_n and the Hankel phase.
pub fn s_ratio_quotient_form(n: i64, lambda: f64, x: f64) -> Result<Complex64> {
    let m = order_u32(n)?;
    let p = Pair::new(m, lambda, x)?;
    let gl = g_from_scaled(m, lambda * x, &p.at_lx)?;
    let gx = g_from_scaled(m, x, &p.at_x)?;
    let kx = k_from_scaled(m, x, &p.at_x)?;
    let tan = phase_from_scaled(m, x, &p.at_x).tan();
    let d = gl - gx;
    let i = Complex64::new(0.0, 1.0);
    if tan.abs() > 1.0 {
        let c = 1.0 / tan;
        Ok(d * (c + i) / (d * c + i * (gl + kx)))
    } else {
        Ok(d * (1.0 + i * tan) / (d + i * tan * (gl + kx)))
    }
}

/// S_n through u_n = n₊·J_n(x)J_n(λx)(g_n(x) − g_n(λx)).
pub fn s_ratio_product_form(n: i64, lambda: f64, x: f64) -> Result<Complex64> {
    let m = order_u32(n)?;
    let p = Pair::new(m, lambda, x)?;
    let gl = g_from_scaled(m, lambda * x, &p.at_lx)?;
    let gx = g_from_scaled(m, x, &p.at_x)?;
    // u_n·H_n/J_n(λx) = n₊·J_n(x)·H_n(x)·(g(x) − g(λx))
    let uh = wide_j(&p.at_x)
        .mul(wide_h(&p.at_x))
        .scale(Complex64::new(n_plus(m) * (gx - gl), 0.0))
        .to_complex();
    Ok(uh / (uh + Complex64::new(0.0, 2.0 / PI)))
}

/// R_n(x)·H_n(z), finite even when the factors are not.
pub(crate) fn reflected_hankel(n: u32, lambda: f64, x: f64, z: f64) -> Result<Complex64> {
    let p = Pair::new(n, lambda, x)?;
    let hz = eval_scaled(n, z)?;
    Ok(p.reflection().mul(wide_h(&hz)).to_complex())
}

/// Reflection coefficient of mode n.
pub fn reflection(n: i64, config: &ScatterConfig) -> Result<Complex64> {
    reflection_at(n, config.lambda(), config.oeps())
}

/// Transmission coefficient of mode n.
pub fn transmission(n: i64, config: &ScatterConfig) -> Result<Complex64> {
    transmission_at(n, config.lambda(), config.oeps())
}

/// S_n at the configuration's frequency.
pub fn s_ratio(n: i64, config: &ScatterConfig) -> Result<Complex64> {
    s_ratio_at(n, config.lambda(), config.oeps())
}

/// All three coefficients of one order.
pub fn coefficients(n: i64, config: &ScatterConfig) -> Result<CoefficientPair> {
    let m = order_u32(n)?;
    let x = config.oeps();
    let p = Pair::new(m, config.lambda(), x)?;
    let s = match p.s_ratio(m, x) {
        Ok(s) => Some(s),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CoefficientPair {
        order: n,
        r: p.reflection().to_complex(),
        t: p.transmission().to_complex(),
        s,
    })
}

/// Where the incident coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeGenerator {
    /// finitely many listed coefficients
    Explicit,
    /// e^{iω√q₀ x·d} with d at angle `direction`: a_n = amplitude·e^{in(π/2 − direction)}
    PlaneWave { direction: f64, amplitude: Complex64 },
}

/// Fourier coefficients a_n of the incident field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub entries: BTreeMap<i64, Complex64>,
    pub generator: ModeGenerator,
}

impl ModeCoefficients {
    pub fn explicit<I: IntoIterator<Item = (i64, Complex64)>>(entries: I) -> ModeCoefficients {
        ModeCoefficients {
            entries: entries.into_iter().filter(|(_, a)| *a != Complex64::new(0.0, 0.0)).collect(),
            generator: ModeGenerator::Explicit,
        }
    }

    pub fn single(n: i64, a: Complex64) -> ModeCoefficients {
        ModeCoefficients::explicit([(n, a)])
    }

    pub fn plane_wave(direction: f64, amplitude: Complex64) -> ModeCoefficients {
        ModeCoefficients {
            entries: BTreeMap::new(),
            generator: ModeGenerator::PlaneWave {
                direction,
                amplitude,
            },
        }
    }

    pub fn is_plane_wave(&self) -> bool {
        matches!(self.generator, ModeGenerator::PlaneWave { .. })
    }

    /// a_n (generated on demand for plane waves).
    pub fn coefficient(&self, n: i64) -> Complex64 {
        match self.generator {
            ModeGenerator::Explicit => self.entries.get(&n).copied().unwrap_or_default(),
            ModeGenerator::PlaneWave {
                direction,
                amplitude,
            } => amplitude * Complex64::from_polar(1.0, n as f64 * (FRAC_PI_2 - direction)),
        }
    }

    /// Largest |n| in the support; `None` for plane waves.
    pub fn max_order(&self) -> Option<u32> {
        match self.generator {
            ModeGenerator::Explicit => {
                Some(self.entries.keys().map(|n| n.unsigned_abs() as u32).max().unwrap_or(0))
            }
            ModeGenerator::PlaneWave { .. } => None,
        }
    }

    /// Orders with a (possibly) non-zero coefficient, |n| ≤ truncation.
    pub fn orders(&self, truncation: u32) -> Vec<i64> {
        let t = truncation as i64;
        match self.generator {
            ModeGenerator::Explicit => self.entries.keys().copied().filter(|n| n.abs() <= t).collect(),
            ModeGenerator::PlaneWave { .. } => (-t..=t).collect(),
        }
    }

    /// Multiplies every coefficient by `t`.
    pub fn scaled(&self, t: Complex64) -> ModeCoefficients {
        match self.generator {
            ModeGenerator::Explicit => {
                ModeCoefficients::explicit(self.entries.iter().map(|(n, a)| (*n, a * t)))
            }
            ModeGenerator::PlaneWave {
                direction,
                amplitude,
            } => ModeCoefficients::plane_wave(direction, amplitude * t),
        }
    }

    /// Same coefficients with a_n = 0 for |n| < p.
    pub fn without_low_orders(&self, p: u32) -> ModeCoefficients {
        ModeCoefficients::explicit(
            self.entries
                .iter()
                .filter(|(n, _)| n.unsigned_abs() >= p as u64)
                .map(|(n, a)| (*n, *a)),
        )
    }
}

/// Which field a trace belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Incident,
    Scattered,
    Transmitted,
    /// incident + scattered outside the disk
    Total,
    ResonantMode,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Incident => "incident",
            FieldKind::Scattered => "scattered",
            FieldKind::Transmitted => "transmitted",
            FieldKind::Total => "total",
            FieldKind::ResonantMode => "resonant-mode",
        })
    }
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<FieldKind> {
        Ok(match s {
            "incident" => FieldKind::Incident,
            "scattered" => FieldKind::Scattered,
            "transmitted" => FieldKind::Transmitted,
            "total" => FieldKind::Total,
            "resonant-mode" => FieldKind::ResonantMode,
            other => return Err(Error::Domain(format!("unknown field kind '{other}'"))),
        })
    }
}

/// Bound C·|a|·K_n(w) on the dropped coefficients |n| > `from`, where
/// K_n(w) = (z·e^√(1−z²)/(1+√(1−z²)))^n with z = w/n is Kapteyn's bound on
/// |J_n(w)|. C is 1 for the incident field, 5/2 for the scattered one
/// (|S_n| ≤ 5/2 below the turning point) and 7/2 inside or in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub amplitude: f64,
    pub factor: f64,
    pub arg: f64,
    pub from: u32,
}

/// Kapteyn's bound on |J_n(w)| for n ≥ w (1 otherwise).
pub fn kapteyn_bound(n: u32, w: f64) -> f64 {
    let nu = n as f64;
    if n == 0 || w >= nu {
        return 1.0;
    }
    if w == 0.0 {
        return 0.0;
    }
    let z = w / nu;
    let s = (1.0 - z * z).sqrt();
    (nu * (z.ln() + s - s.ln_1p())).exp()
}

impl TailModel {
    /// √(2π)·√(Σ_{|n|>from} bound_n²·(1+|n|)^{2σ}).
    pub fn weighted(&self, sigma: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        if (self.from as f64) < self.arg {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        for n in (self.from + 1)..=(self.from + 100_000) {
            let b = self.factor * self.amplitude * kapteyn_bound(n, self.arg);
            let t = 2.0 * (b * (1.0 + n as f64).powf(sigma)).powi(2);
            sum += t;
            if t <= 1e-30 * sum || t == 0.0 {
                return (2.0 * PI).sqrt() * sum.sqrt();
            }
        }
        f64::INFINITY
    }
}

/// Fourier coefficients c_n of one field on the circle |x| = R.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTrace {
    pub kind: FieldKind,
    pub radius: f64,
    pub config: ScatterConfig,
    pub truncation: u32,
    pub coefficients: BTreeMap<i64, Complex64>,
    pub tail: Option<TailModel>,
}

impl FieldTrace {
    /// Unweighted tail estimate in norm units (zero for finite support).
    pub fn tail_bound(&self) -> f64 {
        self.tail.map_or(0.0, |t| t.weighted(0.0))
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.coefficients.get(&n).copied().unwrap_or_default()
    }

    /// CSV with a provenance comment, one parameter row and (n, re_c, im_c) rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# diskscat {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "kind,R,q0,q,eps,omega,truncation,tail_bound")?;
        let c = &self.config;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            self.kind,
            fmt17(self.radius),
            fmt17(c.q0),
            fmt17(c.q),
            fmt17(c.eps),
            fmt17(c.omega),
            self.truncation,
            fmt17(self.tail_bound())
        )?;
        writeln!(out, "n,re_c,im_c")?;
        for (n, v) in &self.coefficients {
            writeln!(out, "{},{},{}", n, fmt17(v.re), fmt17(v.im))?;
        }
        Ok(())
    }

    /// Reads the parameter row and coefficients written by [`FieldTrace::write_csv`].
    /// The tail model is not stored; the returned trace has none.
    pub fn read_csv<R: BufRead>(input: R) -> Result<(FieldTrace, f64)> {
        let lines: Vec<String> = input
            .lines()
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .collect();
        let bad = |m: &str| Error::Io(format!("malformed trace file: {m}"));
        if lines.len() < 3 {
            return Err(bad("too short"));
        }
        let p: Vec<&str> = lines[1].split(',').collect();
        if p.len() != 8 {
            return Err(bad("parameter row"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
        let config = ScatterConfig::new(num(p[2])?, num(p[3])?, num(p[4])?, num(p[5])?)?;
        let mut coefficients = BTreeMap::new();
        for l in &lines[3..] {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(bad(l));
            }
            let n = f[0].parse::<i64>().map_err(|_| bad(f[0]))?;
            coefficients.insert(n, Complex64::new(num(f[1])?, num(f[2])?));
        }
        Ok((
            FieldTrace {
                kind: p[0].parse()?,
                radius: num(p[1])?,
                config,
                truncation: p[6].parse().map_err(|_| bad(p[6]))?,
                coefficients,
                tail: None,
            },
            num(p[7])?,
        ))
    }
}

/// Round-trip decimal with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Default order cut-off for a trace at radius R.
pub fn default_truncation(config: &ScatterConfig, radius: f64) -> u32 {
    let w = config.q.max(config.q0).sqrt() * config.omega * radius;
    (w.ceil() + 12.0 + 2.0 * w.cbrt().ceil()) as u32
}

fn sign_for(n: i64) -> f64 {
    if n < 0 && n % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// J_n(z) as a complex number, with J_n(0) = δ_{n0}.
fn bessel_j(n: u32, z: f64) -> Result<Wide> {
    if z == 0.0 {
        return Ok(Wide::real(if n == 0 { 1.0 } else { 0.0 }, 0));
    }
    Ok(wide_j(&eval_scaled(n, z)?))
}

/// Fourier trace of one field on the circle of radius `radius`.
///
/// `truncation` defaults to [`default_truncation`] and must cover the support
/// of explicit mode lists.
pub fn field_trace(
    kind: FieldKind,
    config: &ScatterConfig,
    modes: &ModeCoefficients,
    radius: f64,
    truncation: Option<u32>,
) -> Result<FieldTrace> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius must be non-negative, got {radius}")));
    }
    let exterior = matches!(kind, FieldKind::Scattered | FieldKind::Total);
    if exterior && radius < config.eps {
        return Err(Error::Domain(format!(
            "{kind} trace needs R >= eps ({radius} < {})",
            config.eps
        )));
    }
    if kind == FieldKind::Transmitted && radius > config.eps {
        return Err(Error::Domain(format!(
            "transmitted trace needs R <= eps ({radius} > {})",
            config.eps
        )));
    }
    if kind == FieldKind::ResonantMode {
        return Err(Error::Domain("use resonant_mode for resonant-mode traces".into()));
    }
    let support = modes.max_order();
    let auto = default_truncation(config, radius).max(support.unwrap_or(0));
    let truncation = truncation.unwrap_or(auto);
    if let Some(s) = support {
        if truncation < s {
            return Err(Error::Domain(format!(
                "truncation {truncation} below the mode support {s}"
            )));
        }
    }
    let lambda = config.lambda();
    let x = config.oeps();
    let z_out = x * radius / config.eps;
    let z_in = lambda * z_out;
    let mut coefficients = BTreeMap::new();
    for n in modes.orders(truncation) {
        let a = modes.coefficient(n);
        let m = order_u32(n)?;
        let sgn = sign_for(n);
        let c = match kind {
            FieldKind::Incident => bessel_j(m, z_out)?.scale(a * sgn).to_complex(),
            FieldKind::Scattered => reflected_hankel(m, lambda, x, z_out)? * a * sgn,
            FieldKind::Total => {
                let inc = bessel_j(m, z_out)?.to_complex();
                (inc + reflected_hankel(m, lambda, x, z_out)?) * a * sgn
            }
            FieldKind::Transmitted => {
                let p = Pair::new(m, lambda, x)?;
                p.transmission().mul(bessel_j(m, z_in)?).scale(a * sgn).to_complex()
            }
            FieldKind::ResonantMode => unreachable!(),
        };
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Domain(format!("coefficient {n} of the {kind} trace overflows")));
        }
        coefficients.insert(n, c);
    }
    let tail = match modes.generator {
        ModeGenerator::PlaneWave { amplitude, .. } => Some(TailModel {
            amplitude: amplitude.norm(),
            factor: match kind {
                FieldKind::Incident => 1.0,
                FieldKind::Scattered => 2.5,
                _ => 3.5,
            },
            arg: z_out.max(z_in).max(lambda * x),
            from: truncation,
        }),
        ModeGenerator::Explicit => None,
    };
    Ok(FieldTrace {
        kind,
        radius,
        config: *config,
        truncation,
        coefficients,
        tail,
    })
}

/// Normalised residual |F|/(|Y'_n(x)J_n(λx)| + |λJ'_n(λx)Y_n(x)|) of the
/// resonance equation F = Y'_n(x)J_n(λx) − λJ'_n(λx)Y_n(x) = 0.
pub fn resonance_equation_residual(n: u32, lambda: f64, x: f64) -> Result<f64> {
    let p = Pair::new(n, lambda, x)?;
    let (_, ri) = p.denominator();
    let scale = (p.at_x.yp * p.at_lx.j).abs() + (lambda * p.at_lx.jp * p.at_x.y).abs();
    Ok(ri.abs() / scale)
}

/// Signed, scale-free form of λJ'_n(λx)Y_n(x) − c·Y'_n(x)J_n(λx).
///
/// With c = 1 this is −F normalised; its zeros are the points where
/// g_n(λx) = −c·k_n(x), and it stays smooth across the poles of g_n(λx).
pub(crate) fn crossing_function(n: u32, lambda: f64, x: f64, c: f64) -> Result<f64> {
    check_nondim(lambda, x)?;
    let sx = eval_scaled(n, x)?;
    let sl = eval_scaled(n, lambda * x)?;
    let p = lambda * sl.jp * sx.y;
    let q = c * sx.yp * sl.j;
    Ok((p - q) / (p.abs() + q.abs()))
}

/// Trace of the particular solution at a quasi-resonance: the single mode
/// (Y_n(x)/J_n(λx))·J_n(λx·r/ε) inside the disk and Y_n(x·r/ε) outside.
pub fn resonant_mode(n: u32, config: &ScatterConfig, radius: f64) -> Result<FieldTrace> {
    let lambda = config.lambda();
    let x = config.oeps();
    let res = resonance_equation_residual(n, lambda, x)?;
    if res > RESONANCE_TOL {
        return Err(Error::Precondition(format!(
            "(n={n}, x={x}, λ={lambda}) is not quasi-resonant: normalised residual {res:e}"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let rho = radius / config.eps;
    let value = if rho <= 1.0 {
        let sx = eval_scaled(n, x)?;
        let sl = eval_scaled(n, lambda * x)?;
        let inner = eval_scaled(n, lambda * x * rho)?;
        Wide::real(sx.y, sx.yexp).div(wide_j(&sl)).mul(wide_j(&inner)).to_complex()
    } else {
        let so = eval_scaled(n, x * rho)?;
        Wide::real(so.y, so.yexp).to_complex()
    };
    if !value.re.is_finite() {
        return Err(Error::Domain(format!("resonant mode overflows at r/eps = {rho}")));
    }
    Ok(FieldTrace {
        kind: FieldKind::ResonantMode,
        radius,
        config: *config,
        truncation: n,
        coefficients: BTreeMap::from([(n as i64, value)]),
        tail: None,
    })
}
