//! Executable forms of the analytic bounds.
//!
//! Every statement is checked as `lhs ≤ rhs`: for upper bounds lhs is the
//! field quantity, for lower bounds lhs is the claimed floor and rhs the
//! (grid-)supremum. `margin = rhs − lhs`; a check passes when
//! `margin ≥ −TOL_REL·|rhs|`.
//!
//! Suprema over the frequency are taken on [`frequency_grid`]: 512
//! log-spaced points per decade, merged with the statement's own candidate
//! points (quasi-resonances, ωε = n, ...). A grid supremum can only
//! under-estimate the true one, so a passing lower bound is conclusive while
//! a passing upper bound on a grid is not; such checks carry
//! `grid_supremum = true`.

mod statements;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative round-off allowance on the right-hand side.
pub const TOL_REL: f64 = 1e-9;
/// Points per decade of the supremum grids.
pub const GRID_PER_DECADE: usize = 512;
/// Samples per upper-bound statement in a default sweep.
pub const UPPER_SAMPLES: usize = 1000;
/// Samples per lower-bound (grid supremum) statement in a default sweep.
pub const LOWER_SAMPLES: usize = 24;

macro_rules! statements {
    ($($variant:ident => $id:literal, $lower:literal;)*) => {
        /// Statement identifiers, in report order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(into = "String", try_from = "String")]
        pub enum Statement {
            $($variant,)*
        }

        impl Statement {
            pub const ALL: &'static [Statement] = &[$(Statement::$variant,)*];

            pub fn id(self) -> &'static str {
                match self {
                    $(Statement::$variant => $id,)*
                }
            }

            /// Lower-bound statements are checked on grid suprema only.
            pub fn is_lower_bound(self) -> bool {
                match self {
                    $(Statement::$variant => $lower,)*
                }
            }
        }

        impl FromStr for Statement {
            type Err = Error;
            fn from_str(s: &str) -> Result<Statement> {
                match s {
                    $($id => Ok(Statement::$variant),)*
                    other => Err(Error::Parameter(format!("unknown statement id '{other}'"))),
                }
            }
        }
    };
}

statements! {
    ThmOsLs => "thm-os-ls", false;
    CorSosl => "cor-sosl", false;
    ThmObLsUpper => "thm-ob-ls-upper", false;
    ThmObLsLower => "thm-ob-ls-lower", true;
    PropLleq1 => "prop-lleq1", false;
    ThmOsLb => "thm-os-lb", false;
    PropLgeq1 => "prop-lgeq1", false;
    ThmObLr => "thm-ob-lr", true;
    ThmObLbUpper => "thm-ob-lb-upper", false;
    ThmObLbLower => "thm-ob-lb-lower", true;
    PropItoOne => "prop-ito-one", false;
    LemmaHighContrast => "lemma-highcontrast", false;
    CorBroadband => "cor-broadband", false;
    ThmBroadband => "thm-broadband", false;
    LemmaFirstCase => "lemma-firstcase", false;
    PropEstimate5Half => "prop-estimate5half", false;
    PropNtoYn1 => "prop-ntoyn1", false;
    PropN0 => "prop-n0", false;
    PropR0 => "prop-r0", false;
    PropR0Plus => "prop-r0plus", false;
    PropInk => "prop-ink", false;
    PropPropsg => "prop-propsg", false;
    PropLogYn => "prop-logyn", false;
    LemmaLogConcave => "lemma-logconcave", false;
    LemmaMuZeroOne => "lemma-muzeroone", false;
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl From<Statement> for String {
    fn from(s: Statement) -> String {
        s.id().to_string()
    }
}

impl TryFrom<String> for Statement {
    type Error = Error;
    fn try_from(s: String) -> Result<Statement> {
        s.parse()
    }
}

impl Statement {
    /// Sub-statements accepted in [`CheckParams::part`]; the first is the default.
    pub fn parts(self) -> &'static [&'static str] {
        statements::parts(self)
    }
}

/// Parameters of one check. Unused fields stay `None`.
///
/// `oeps` is the rescaled frequency x = ωε, `radius` is R/ε, and `modes`
/// lists incident coefficients as (n, [Re a_n, Im a_n]).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oeps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    /// top of the nondimensional window over which exclusion sets are built
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<(i64, [f64; 2])>>,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub id: Statement,
    pub part: String,
    pub params: CheckParams,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub grid_supremum: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BoundCheck {
    fn new(id: Statement, part: &str, params: CheckParams, lhs: f64, rhs: f64, grid_supremum: bool) -> BoundCheck {
        let margin = rhs - lhs;
        BoundCheck {
            id,
            part: part.to_string(),
            params,
            lhs,
            rhs,
            margin,
            pass: margin >= -TOL_REL * rhs.abs(),
            grid_supremum,
            error: None,
        }
    }

    fn failed(id: Statement, params: CheckParams, e: &Error) -> BoundCheck {
        BoundCheck {
            id,
            part: params.part.clone().unwrap_or_default(),
            params,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            pass: false,
            grid_supremum: false,
            error: Some(e.to_string()),
        }
    }

    /// margin/|rhs| (the raw margin when rhs = 0).
    pub fn relative_margin(&self) -> f64 {
        if self.rhs == 0.0 {
            self.margin
        } else {
            self.margin / self.rhs.abs()
        }
    }
}

/// Evaluates one statement at the given parameters.
///
/// Parameters outside the statement's hypotheses give a domain error naming
/// the hypothesis; missing parameters give a parameter error.
pub fn check(id: Statement, params: &CheckParams) -> Result<BoundCheck> {
    let part = match &params.part {
        Some(p) => {
            if !id.parts().contains(&p.as_str()) {
                return Err(Error::Parameter(format!(
                    "{id} has no part '{p}' (parts: {})",
                    id.parts().join(", ")
                )));
            }
            p.clone()
        }
        None => id.parts()[0].to_string(),
    };
    let out = statements::evaluate(id, &part, params)?;
    let mut stored = params.clone();
    stored.part = Some(part.clone());
    Ok(BoundCheck::new(id, &part, stored, out.lhs, out.rhs, out.grid_supremum))
}

/// Seed and size of a sweep; `part` restricts it to one sub-statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub seed: u64,
    pub samples: usize,
    pub part: Option<String>,
}

impl SamplingPlan {
    /// [`UPPER_SAMPLES`] or [`LOWER_SAMPLES`] samples over every part.
    pub fn default_for(id: Statement, seed: u64) -> SamplingPlan {
        SamplingPlan {
            seed,
            samples: if id.is_lower_bound() { LOWER_SAMPLES } else { UPPER_SAMPLES },
            part: None,
        }
    }
}

/// Per-statement digest of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub id: Statement,
    pub seed: u64,
    pub samples: usize,
    pub failures: usize,
    pub min_relative_margin: f64,
    pub min_margin: f64,
    pub argmin: Option<CheckParams>,
    pub grid_suprema: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub checks: Vec<BoundCheck>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn stream_seed(seed: u64, id: Statement) -> u64 {
    // FNV-1a of the id, mixed into the user seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.id().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

/// Draws `plan.samples` parameter sets inside the hypotheses of `id`.
pub fn sample_params(id: Statement, plan: &SamplingPlan) -> Result<Vec<CheckParams>> {
    if let Some(p) = &plan.part {
        if !id.parts().contains(&p.as_str()) {
            return Err(Error::Parameter(format!("{id} has no part '{p}'")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(plan.seed, id));
    (0..plan.samples)
        .map(|i| statements::sample(id, plan.part.as_deref(), i, &mut rng))
        .collect()
}

/// Runs `check` on a seeded sample. Deterministic for a given plan; checks
/// run in parallel and are returned in sampling order.
pub fn sweep(id: Statement, plan: &SamplingPlan) -> Result<SweepReport> {
    let params = sample_params(id, plan)?;
    let checks: Vec<BoundCheck> = params
        .into_par_iter()
        .map(|p| check(id, &p).unwrap_or_else(|e| BoundCheck::failed(id, p, &e)))
        .collect();
    let mut summary = SweepSummary {
        id,
        seed: plan.seed,
        samples: checks.len(),
        failures: checks.iter().filter(|c| !c.pass).count(),
        min_relative_margin: f64::INFINITY,
        min_margin: f64::INFINITY,
        argmin: None,
        grid_suprema: checks.iter().filter(|c| c.grid_supremum).count(),
    };
    for c in &checks {
        let r = if c.margin.is_nan() { f64::NEG_INFINITY } else { c.relative_margin() };
        if summary.argmin.is_none() || r < summary.min_relative_margin {
            summary.min_relative_margin = r;
            summary.min_margin = c.margin;
            summary.argmin = Some(c.params.clone());
        }
    }
    Ok(SweepReport { checks, summary })
}

/// One JSON object per check, then `{"summary": ...}`.
pub fn write_jsonl<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    let io = |e: serde_json::Error| Error::Io(e.to_string());
    for c in &report.checks {
        serde_json::to_writer(&mut out, c).map_err(io)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut out, &serde_json::json!({ "summary": report.summary })).map_err(io)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Log-spaced grid on [lo, hi] with [`GRID_PER_DECADE`] points per decade,
/// merged with the `extra` points that fall inside.
pub fn frequency_grid(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut g = Vec::new();
    if lo > 0.0 && hi >= lo {
        let decades = (hi / lo).log10();
        let count = (decades * GRID_PER_DECADE as f64).ceil() as usize;
        for i in 0..=count {
            g.push((lo * 10f64.powf(i as f64 / GRID_PER_DECADE as f64)).min(hi));
        }
    }
    g.extend(extra.iter().copied().filter(|x| *x >= lo && *x <= hi));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}
