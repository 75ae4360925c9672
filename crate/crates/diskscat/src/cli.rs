//! Command-line front end. `main` only forwards to [`run`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::norms::{h_sigma, h_sigma_star, n_bold, n_script, NormValue};
use crate::quotients::{g, k};
use crate::resonance::{
    broadband_set, eta_max, eta_zero, exclusion_intervals, find_quasi_resonances, BroadbandParams, ResonanceRecord,
};
use crate::scatter::{default_truncation, field_trace, fmt17, resonant_mode, FieldKind, ModeCoefficients, ScatterConfig};
use crate::specfun::{eval_cylinder, first_jp_zero, first_y_zero};
use crate::verify::{sweep, write_jsonl, SamplingPlan, Statement};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "diskscat", version, about = "Scattering by a small disk: fields, quasi-resonances, exclusion sets, bound checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Flags shared by every subcommand; unset ones fall back to the config
/// file, then to the defaults shown by `--show-config`.
#[derive(Debug, Default, Clone, Args)]
pub struct Common {
    /// exterior index q₀
    #[arg(long, global = true)]
    pub q0: Option<f64>,
    /// interior index q
    #[arg(long, global = true, conflicts_with = "lambda")]
    pub q: Option<f64>,
    /// contrast λ = √(q/q₀)
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// disk radius ε
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true, conflicts_with = "oeps")]
    pub omega: Option<f64>,
    /// rescaled frequency √q₀·ω·ε
    #[arg(long, global = true)]
    pub oeps: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub truncation: Option<u32>,
    /// key = value file with any of the flags above
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// print the resolved configuration and exit
    #[arg(long, global = true)]
    pub show_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier trace of one field on a circle
    Field(FieldArgs),
    /// quasi-resonances of one order
    Resonances(ResonanceArgs),
    /// data behind the quasi-resonance figures
    Figure(FigureArgs),
    /// exclusion intervals or a broadband exclusion set
    Exclusions(ExclusionArgs),
    /// seeded sweep of one statement, or of all of them
    Verify(VerifyArgs),
    /// 𝒩^σ, 𝐍^σ_p and trace norms of an incident field
    Norms(NormArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModeArgs {
    /// incident mode n:re:im (repeatable)
    #[arg(long = "mode", allow_hyphen_values = true)]
    pub modes: Vec<String>,
    /// plane wave e^{iω d·x} with direction angle d (the default, d = 0)
    #[arg(long, allow_hyphen_values = true)]
    pub plane_wave: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long, default_value = "scattered")]
    pub kind: String,
    /// circle radius (default ε)
    #[arg(long)]
    pub radius: Option<f64>,
    #[command(flatten)]
    pub modes: ModeArgs,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Qr1,
    Qr2,
    Qr3,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
    #[arg(long, default_value_t = 30)]
    pub n: u32,
    /// samples of the x or r/ε axis
    #[arg(long, default_value_t = 600)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct ExclusionArgs {
    /// one flat τ for the intervals of a single order (needs --n)
    #[arg(long, requires = "n")]
    pub tau: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub eta_zero: Option<f64>,
    /// η = ε^β·η_max at λ = 1/ε
    #[arg(long, conflicts_with = "eta")]
    pub beta: Option<f64>,
    /// top of the rescaled window (0, top)
    #[arg(long, default_value_t = 1.5)]
    pub window: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// statement id or "all"
    pub id: String,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub part: Option<String>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// p of 𝐍^σ_p
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// also report H^σ and H^σ_* of this field's trace
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[command(flatten)]
    pub modes: ModeArgs,
}

/// Common flags after merging flags, config file and defaults.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub q0: f64,
    pub q: f64,
    pub lambda: f64,
    pub eps: f64,
    pub omega: f64,
    pub oeps: f64,
    pub sigma: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub truncation: Option<u32>,
}

impl Resolved {
    fn config(&self) -> Result<ScatterConfig> {
        ScatterConfig::new(self.q0, self.q, self.eps, self.omega)
    }

    fn provenance(&self) -> String {
        format!(
            "# q0={} q={} lambda={} eps={} omega={} oeps={} sigma={} seed={}",
            fmt17(self.q0),
            fmt17(self.q),
            fmt17(self.lambda),
            fmt17(self.eps),
            fmt17(self.omega),
            fmt17(self.oeps),
            fmt17(self.sigma),
            self.seed
        )
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

const KEYS: [&str; 11] = ["q0", "q", "lambda", "eps", "omega", "oeps", "sigma", "out", "format", "seed", "truncation"];

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key '{key}'", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| usage(format!("config: bad value '{v}' for {key}"))))
        .transpose()
}

/// Flags > config file > defaults.
pub fn resolve(c: &Common) -> Result<Resolved> {
    let file = match &c.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let q0 = c.q0.or(from_file(&file, "q0")?).unwrap_or(1.0);
    let eps = c.eps.or(from_file(&file, "eps")?).unwrap_or(0.1);
    // a flag of either pair overrides both file keys of that pair
    let (q, lambda) = if c.q.is_some() || c.lambda.is_some() {
        (c.q, c.lambda)
    } else {
        (from_file::<f64>(&file, "q")?, from_file::<f64>(&file, "lambda")?)
    };
    let (omega, oeps) = if c.omega.is_some() || c.oeps.is_some() {
        (c.omega, c.oeps)
    } else {
        (from_file::<f64>(&file, "omega")?, from_file::<f64>(&file, "oeps")?)
    };
    if q.is_some() && lambda.is_some() {
        return Err(usage("q and lambda are mutually exclusive"));
    }
    if omega.is_some() && oeps.is_some() {
        return Err(usage("omega and oeps are mutually exclusive"));
    }
    if !(q0 > 0.0 && eps > 0.0) {
        return Err(usage("q0 and eps must be positive"));
    }
    let lambda = match q {
        Some(q) => (q / q0).sqrt(),
        None => lambda.unwrap_or(2.0),
    };
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(usage(format!("contrast must be positive, got {lambda}")));
    }
    let oeps = match omega {
        Some(w) => q0.sqrt() * w * eps,
        None => oeps.unwrap_or(1.0),
    };
    if !(oeps > 0.0 && oeps.is_finite()) {
        return Err(usage(format!("frequency must be positive, got {oeps}")));
    }
    let format = match c.format {
        Some(f) => f,
        None => match file.get("format").map(String::as_str) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(usage(format!("config: unknown format '{other}'"))),
        },
    };
    Ok(Resolved {
        q0,
        q: lambda * lambda * q0,
        lambda,
        eps,
        omega: oeps / (q0.sqrt() * eps),
        oeps,
        sigma: c.sigma.or(from_file(&file, "sigma")?).unwrap_or(0.0),
        out: c.out.clone().or(from_file(&file, "out")?),
        format,
        seed: c.seed.or(from_file(&file, "seed")?).unwrap_or(42),
        truncation: c.truncation.or(from_file(&file, "truncation")?),
    })
}

fn parse_modes(m: &ModeArgs) -> Result<ModeCoefficients> {
    if m.modes.is_empty() {
        return Ok(ModeCoefficients::plane_wave(m.plane_wave.unwrap_or(0.0), Complex64::new(1.0, 0.0)));
    }
    if m.plane_wave.is_some() {
        return Err(usage("--mode and --plane-wave are mutually exclusive"));
    }
    let mut entries = Vec::new();
    for s in &m.modes {
        let f: Vec<&str> = s.split(':').collect();
        let bad = || usage(format!("--mode expects n:re:im, got '{s}'"));
        if f.len() != 3 {
            return Err(bad());
        }
        let n = f[0].parse::<i64>().map_err(|_| bad())?;
        let re = f[1].parse::<f64>().map_err(|_| bad())?;
        let im = f[2].parse::<f64>().map_err(|_| bad())?;
        entries.push((n, Complex64::new(re, im)));
    }
    Ok(ModeCoefficients::explicit(entries))
}

fn parse_kind(s: &str) -> Result<FieldKind> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn sink(path: &Option<PathBuf>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(body)?;
            w.flush()?;
        }
        None => stdout.write_all(body)?,
    }
    Ok(())
}

fn json_doc<T: Serialize>(command: &str, r: &Resolved, body: T) -> Result<Vec<u8>> {
    let doc = json!({ "diskscat": VERSION, "command": command, "config": r, "data": body });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_head(command: &str, r: &Resolved, extra: &str) -> String {
    let mut s = format!("# diskscat {VERSION} {command}{extra}\n{}\n", r.provenance());
    if s.contains("\n\n") {
        s = s.replace("\n\n", "\n");
    }
    s
}

fn cmd_field(a: &FieldArgs, r: &Resolved) -> Result<Vec<u8>> {
    let kind = parse_kind(&a.kind)?;
    let cfg = r.config()?;
    let radius = a.radius.unwrap_or(r.eps);
    let modes = parse_modes(&a.modes)?;
    let trace = field_trace(kind, &cfg, &modes, radius, r.truncation)?;
    match r.format {
        Format::Json => json_doc("field", r, &trace),
        Format::Csv => {
            let mut out = csv_head("field", r, &format!(" kind={kind} radius={}", fmt17(radius))).into_bytes();
            trace.write_csv(&mut out)?;
            Ok(out)
        }
    }
}

fn cmd_resonances(a: &ResonanceArgs, r: &Resolved) -> Result<Vec<u8>> {
    let recs = find_quasi_resonances(a.n, r.lambda, None)?;
    match r.format {
        Format::Json => json_doc("resonances", r, &recs),
        Format::Csv => {
            let mut s = csv_head("resonances", r, &format!(" n={}", a.n));
            s.push_str("# omega_nk is the rescaled frequency; residual is |R_n + 1| there\n");
            s.push_str("n,k,omega_nk,residual,u_lo,u_hi\n");
            for rec in &recs {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    rec.order,
                    rec.branch,
                    fmt17(rec.location),
                    fmt17(rec.residual),
                    fmt17(rec.u_lo),
                    fmt17(rec.u_hi)
                ));
            }
            Ok(s.into_bytes())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Qr1Row {
    pub x: f64,
    pub g_lambda_x: f64,
    pub minus_k_x: f64,
    pub is_resonance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub r_over_eps: f64,
    pub full: f64,
    pub incident: f64,
}

fn or_nan(v: Result<f64>) -> Result<f64> {
    match v {
        Ok(v) => Ok(v),
        Err(Error::Pole { .. }) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// g_n(λx) and −k_n(x) on (j'_{n,1}/λ, y_{n,1}); they cross at the resonances.
pub fn figure_qr1(n: u32, lambda: f64, points: usize, recs: &[ResonanceRecord]) -> Result<Vec<Qr1Row>> {
    let lo = first_jp_zero(n)? / lambda;
    let hi = first_y_zero(n)?;
    let mut xs: Vec<(f64, bool)> = (1..points).map(|i| (lo + (hi - lo) * i as f64 / points as f64, false)).collect();
    xs.extend(recs.iter().map(|r| (r.location, true)));
    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
    xs.iter()
        .map(|&(x, flag)| {
            Ok(Qr1Row {
                x,
                g_lambda_x: or_nan(g(n, lambda * x))?,
                minus_k_x: -or_nan(k(n, x))?,
                is_resonance: flag,
            })
        })
        .collect()
}

/// |full field| and |incident field| of mode n at a quasi-resonance, r/ε ∈ (0, 3].
///
/// The full field is the particular solution (Y_n(x)/J_n(λx))·J_n(λx·r/ε)
/// inside and Y_n(x·r/ε) outside; the incident one is J_n(x·r/ε).
pub fn figure_profile(n: u32, lambda: f64, x: f64, points: usize) -> Result<Vec<ProfileRow>> {
    let cfg = ScatterConfig::new(1.0, lambda * lambda, 1.0, x)?;
    let mut rs: Vec<f64> = (0..points).map(|i| 3.0 * 10f64.powf(-2.0 * (1.0 - i as f64 / (points - 1) as f64))).collect();
    rs.extend([1.0, lambda.min(3.0)]);
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs.iter()
        .map(|&rho| {
            let t = resonant_mode(n, &cfg, rho)?;
            let full = t.coefficient(n as i64).norm();
            Ok(ProfileRow {
                r_over_eps: rho,
                full,
                incident: eval_cylinder(n, x * rho)?.j.abs(),
            })
        })
        .collect()
}

fn cmd_figure(a: &FigureArgs, r: &Resolved) -> Result<Vec<u8>> {
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let recs = find_quasi_resonances(a.n, r.lambda, None)?;
    let name = format!("figure {:?}", a.name).to_lowercase();
    let extra = format!(" n={} lambda={}", a.n, fmt17(r.lambda));
    if a.name == FigureName::Qr1 {
        let rows = figure_qr1(a.n, r.lambda, a.points, &recs)?;
        return match r.format {
            Format::Json => json_doc(&name, r, &rows),
            Format::Csv => {
                let mut s = csv_head(&name, r, &extra);
                s.push_str("x,g_n_lambda_x,minus_k_n_x,is_resonance\n");
                for row in &rows {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt17(row.x),
                        fmt17(row.g_lambda_x),
                        fmt17(row.minus_k_x),
                        row.is_resonance as u8
                    ));
                }
                Ok(s.into_bytes())
            }
        };
    }
    let rec = if a.name == FigureName::Qr2 { recs.first() } else { recs.last() }
        .ok_or_else(|| Error::Precondition(format!("no quasi-resonance for n={} at lambda={}", a.n, r.lambda)))?;
    let rows = figure_profile(a.n, r.lambda, rec.location, a.points)?;
    match r.format {
        Format::Json => json_doc(&name, r, json!({ "omega": rec.location, "rows": rows })),
        Format::Csv => {
            let mut s = csv_head(&name, r, &format!("{extra} omega={}", fmt17(rec.location)));
            s.push_str("r_over_eps,full,incident\n");
            for row in &rows {
                s.push_str(&format!("{},{},{}\n", fmt17(row.r_over_eps), fmt17(row.full), fmt17(row.incident)));
            }
            Ok(s.into_bytes())
        }
    }
}

fn cmd_exclusions(a: &ExclusionArgs, r: &Resolved, stderr: &mut dyn Write) -> Result<Vec<u8>> {
    if let Some(tau) = a.tau {
        if !(tau > 0.0 && tau <= 0.25) {
            return Err(usage(format!("tau must lie in (0, 1/4], got {tau}")));
        }
        let n = a.n.expect("clap enforces --n");
        let ivs = exclusion_intervals(n, r.lambda, tau)?;
        let total: f64 = ivs.iter().map(|i| i.len()).sum();
        let bound = if n == 0 {
            7.0 * tau * r.lambda.ln().ln() / r.lambda
        } else {
            6.0 * tau * n as f64 * r.lambda.ln() / r.lambda
        };
        let summary = json!({ "n": n, "tau": tau, "measure": total, "bound": bound });
        writeln!(stderr, "{summary}")?;
        return match r.format {
            Format::Json => json_doc("exclusions", r, json!({ "intervals": ivs, "summary": summary })),
            Format::Csv => {
                let mut s = csv_head("exclusions", r, &format!(" n={n} tau={}", fmt17(tau)));
                s.push_str("n,k,alpha_end,beta_end,tau_n\n");
                for i in ivs.iter() {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        i.order,
                        i.branch,
                        fmt17(i.alpha_end),
                        fmt17(i.beta_end),
                        fmt17(i.tau)
                    ));
                }
                Ok(s.into_bytes())
            }
        };
    }
    let alpha = a.alpha.unwrap_or(1.0);
    let (lambda, eta, eta0) = match a.beta {
        Some(beta) => {
            let lambda = 1.0 / r.eps;
            let l = r.eps.ln().abs();
            let eta0 = a.eta_zero.unwrap_or((l + 1.0).powf(-beta) * eta_zero(lambda));
            (lambda, r.eps.powf(beta) * eta_max(lambda), eta0)
        }
        None => (r.lambda, a.eta.unwrap_or(eta_max(r.lambda) / alpha), a.eta_zero.unwrap_or(eta_zero(r.lambda))),
    };
    let set = broadband_set(
        lambda,
        r.eps,
        &BroadbandParams {
            alpha,
            eta,
            eta_zero: Some(eta0),
            window: (0.0, a.window / r.eps),
        },
    )?;
    let mut summary = json!({
        "lambda": lambda,
        "eps": r.eps,
        "measure_i1": set.measure_i1,
        "bound_i1": eta / r.eps,
        "measure_i0": set.measure_i0,
        "bound_i0": eta0 / r.eps,
        "tau_max": set.tau_schedule.iter().map(|(_, t)| *t).fold(set.tau_zero, f64::max),
    });
    if let Some(beta) = a.beta {
        let l = r.eps.ln().abs();
        summary["broadband_bound_i1"] = json!(r.eps.powf(beta) * l);
        summary["broadband_bound_i0"] = json!(l.ln() / (l + 1.0).powf(beta));
    }
    writeln!(stderr, "{summary}")?;
    match r.format {
        Format::Json => json_doc("exclusions", r, json!({ "set": set, "summary": summary })),
        Format::Csv => {
            let mut out = csv_head("exclusions", r, &format!(" window={}", fmt17(a.window))).into_bytes();
            writeln!(out, "# tau schedule: {}", set.tau_schedule.iter().map(|(n, t)| format!("{n}:{}", fmt17(*t))).collect::<Vec<_>>().join(" "))?;
            set.write_csv(&mut out)?;
            Ok(out)
        }
    }
}

/// Runs one sweep per selected statement; returns the report and the number of failures.
pub fn verify_report(id: &str, seed: u64, samples: Option<usize>, part: Option<String>) -> Result<(Vec<u8>, usize)> {
    let ids: Vec<Statement> = if id == "all" {
        Statement::ALL.to_vec()
    } else {
        vec![id.parse().map_err(|e: Error| usage(e.to_string()))?]
    };
    if part.is_some() && ids.len() != 1 {
        return Err(usage("--part needs a single statement id"));
    }
    let mut out = Vec::new();
    writeln!(out, "{}", json!({ "diskscat": VERSION, "seed": seed, "statements": ids }))?;
    let mut failures = 0;
    for id in ids {
        let mut plan = SamplingPlan::default_for(id, seed);
        if let Some(s) = samples {
            plan.samples = s;
        }
        plan.part = part.clone();
        let report = sweep(id, &plan)?;
        failures += report.summary.failures;
        write_jsonl(&report, &mut out)?;
    }
    Ok((out, failures))
}

#[derive(Debug, Serialize)]
struct NormRow<'a> {
    name: &'a str,
    value: NormValue,
}

fn cmd_norms(a: &NormArgs, r: &Resolved) -> Result<Vec<u8>> {
    let modes = parse_modes(&a.modes)?;
    let radius = a.radius.unwrap_or(r.eps);
    // a plane wave has no finite 𝒩^σ for σ ≥ −1/2; cut it where the trace is resolved
    let truncation = match r.truncation {
        None if modes.is_plane_wave() => Some(default_truncation(&r.config()?, radius)),
        t => t,
    };
    let mut rows = vec![
        NormRow {
            name: "n_script",
            value: n_script(&modes, r.sigma, truncation)?,
        },
        NormRow {
            name: "n_bold",
            value: n_bold(&modes, r.sigma, a.p, truncation)?,
        },
    ];
    if let Some(kind) = &a.kind {
        let t = field_trace(parse_kind(kind)?, &r.config()?, &modes, radius, truncation)?;
        rows.push(NormRow {
            name: "h_sigma",
            value: h_sigma(&t, r.sigma)?,
        });
        rows.push(NormRow {
            name: "h_sigma_star",
            value: h_sigma_star(&t, r.sigma)?,
        });
    }
    match r.format {
        Format::Json => json_doc("norms", r, &rows),
        Format::Csv => {
            let mut s = csv_head("norms", r, &format!(" p={}", a.p));
            s.push_str("name,value,tail_bound,truncation\n");
            for row in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    row.name,
                    fmt17(row.value.value),
                    fmt17(row.value.tail_bound),
                    row.value.truncation.map_or(String::new(), |t| t.to_string())
                ));
            }
            Ok(s.into_bytes())
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => 2,
        _ => 1,
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let r = resolve(&cli.common)?;
    if cli.common.show_config {
        let s = serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(stdout, "{s}")?;
        return Ok(0);
    }
    let Some(command) = &cli.command else {
        return Err(usage("a subcommand is required (see --help)"));
    };
    let body = match command {
        Command::Field(a) => cmd_field(a, &r)?,
        Command::Resonances(a) => cmd_resonances(a, &r)?,
        Command::Figure(a) => cmd_figure(a, &r)?,
        Command::Exclusions(a) => cmd_exclusions(a, &r, stderr)?,
        Command::Norms(a) => cmd_norms(a, &r)?,
        Command::Verify(a) => {
            let (body, failures) = verify_report(&a.id, r.seed, a.samples, a.part.clone())?;
            sink(&r.out, stdout, &body)?;
            if failures > 0 {
                writeln!(stderr, "{failures} bound violation(s)")?;
                return Ok(1);
            }
            return Ok(0);
        }
    };
    sink(&r.out, stdout, &body)?;
    Ok(0)
}

/// Parses `args` (program name first) and runs the command.
///
/// Returns the exit status: 0 success, 1 numeric failure or bound violation,
/// 2 usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "diskscat: {e}");
            exit_code(&e)
        }
    }
}
