//! Zeros of J_n, J'_n and Y_n, Y'_n with a per-order cache.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::{eval_cylinder, eval_scaled, ldexp, phase_from_scaled};
use crate::error::{Error, Result};
use crate::roots::{brent, newton_bisect};

const ZERO_TOL: f64 = 1e-15;
/// Accuracy promised for cached values.
const STATED_TOL: f64 = 1e-12;

/// First zeros of one order.
///
/// `first_jp_zeros[0]` is 0 for n = 0, following the convention that the
/// origin counts as the first critical point of J_0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    pub order: u32,
    pub first_j_zeros: Vec<f64>,
    pub first_jp_zeros: Vec<f64>,
    pub y1: f64,
    pub yp1: f64,
}

impl ZeroTable {
    /// j_{n,k} with 1-based k.
    pub fn j(&self, k: usize) -> f64 {
        self.first_j_zeros[k - 1]
    }

    /// j'_{n,k} with 1-based k.
    pub fn jp(&self, k: usize) -> f64 {
        self.first_jp_zeros[k - 1]
    }

    pub fn len(&self) -> usize {
        self.first_j_zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first_j_zeros.is_empty()
    }

    fn truncated(&self, k: usize) -> ZeroTable {
        ZeroTable {
            order: self.order,
            first_j_zeros: self.first_j_zeros[..k].to_vec(),
            first_jp_zeros: self.first_jp_zeros[..k].to_vec(),
            y1: self.y1,
            yp1: self.yp1,
        }
    }
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<ZeroTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<ZeroTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Drops every cached table.
pub fn clear_zero_cache() {
    cache().write().expect("zero cache poisoned").clear();
}

/// Solves θ_n(x) = target by safeguarded Newton on the monotone phase.
fn solve_phase(n: u32, target: f64, guess: f64) -> Result<f64> {
    let nu = n as f64;
    let theta = |x: f64| -> Result<(f64, f64)> {
        let s = eval_scaled(n, x)?;
        let th = phase_from_scaled(n, x, &s);
        let e = s.jexp.max(s.yexp);
        let m2 = ldexp(s.j, s.jexp - e).powi(2) + ldexp(s.y, s.yexp - e).powi(2);
        let d = ldexp(2.0 / (PI * x * m2), -2 * e);
        Ok((th - target, d))
    };
    let floor = if n == 0 { 1e-6 } else { nu };
    let mut step = 0.5;
    let mut lo = (guess - step).max(floor);
    while theta(lo)?.0 > 0.0 {
        if lo <= floor {
            return Err(Error::Numeric(format!(
                "phase target {target} lies below x = {floor} for order {n}"
            )));
        }
        step *= 2.0;
        lo = (guess - step).max(floor);
    }
    step = 0.5;
    let mut hi = guess + step;
    while theta(hi)?.0 < 0.0 {
        step *= 2.0;
        hi = guess + step;
    }
    newton_bisect(theta, lo, hi, guess.clamp(lo, hi), ZERO_TOL * guess.max(1.0))
}

fn mcmahon(n: u32, beta: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
}

/// k-th positive zero of J_n.
pub fn j_zero(n: u32, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    let nu = n as f64;
    let guess = if k == 1 && n >= 1 {
        let c = nu.cbrt();
        nu + 1.855_757_1 * c + 1.033_150 / c
    } else {
        mcmahon(n, (k as f64 + 0.5 * nu - 0.25) * PI).max(nu + 1.0)
    };
    solve_phase(n, -0.5 * PI + k as f64 * PI, guess)
}

/// k-th positive zero of Y_n.
pub fn y_zero(n: u32, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    let nu = n as f64;
    let guess = if k == 1 && n >= 1 {
        let c = nu.cbrt();
        nu + 0.931_576_8 * c + 0.260_351 / c
    } else {
        mcmahon(n, (k as f64 + 0.5 * nu - 0.75) * PI).max(if n == 0 { 0.5 } else { nu + 0.5 })
    };
    solve_phase(n, (k as f64 - 1.0) * PI, guess)
}

fn jp_value(n: u32, x: f64) -> Result<f64> {
    Ok(eval_cylinder(n, x)?.jp)
}

/// k-th zero of J'_n, with j'_{0,1} = 0.
pub fn jp_zero(n: u32, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    if n == 0 && k == 1 {
        return Ok(0.0);
    }
    let (lo, hi) = if k == 1 {
        (n as f64, first_y_zero(n)?)
    } else {
        (j_zero(n, k - 1)?, j_zero(n, k)?)
    };
    brent(|x| jp_value(n, x), lo, hi, ZERO_TOL * lo.max(1.0))
}

fn yp_zero_first(n: u32, y1: f64, j1: f64) -> Result<f64> {
    brent(|x| Ok(eval_cylinder(n, x)?.yp), y1, j1, ZERO_TOL * y1.max(1.0))
}

fn compute_table(n: u32, count: usize) -> Result<ZeroTable> {
    let mut js = Vec::with_capacity(count);
    for k in 1..=count {
        js.push(j_zero(n, k)?);
    }
    let y1 = y_zero(n, 1)?;
    let mut jps = Vec::with_capacity(count);
    for k in 1..=count {
        let v = if n == 0 && k == 1 {
            0.0
        } else if k == 1 {
            brent(|x| jp_value(n, x), n as f64, y1, ZERO_TOL * y1.max(1.0))?
        } else {
            brent(|x| jp_value(n, x), js[k - 2], js[k - 1], ZERO_TOL * js[k - 2])?
        };
        jps.push(v);
    }
    let yp1 = yp_zero_first(n, y1, js[0])?;
    Ok(ZeroTable {
        order: n,
        first_j_zeros: js,
        first_jp_zeros: jps,
        y1,
        yp1,
    })
}

/// Zero table with at least `count` entries per kind; cached per order.
pub fn zeros(n: u32, count: usize) -> Result<ZeroTable> {
    if count == 0 {
        return Err(Error::Domain("zero count must be positive".into()));
    }
    if let Some(t) = cache().read().expect("zero cache poisoned").get(&n) {
        if t.len() >= count {
            return Ok(t.truncated(count));
        }
    }
    let table = compute_table(n, count)?;
    let mut guard = cache().write().expect("zero cache poisoned");
    let keep = !matches!(guard.get(&n), Some(old) if old.len() >= table.len());
    if keep {
        guard.insert(n, Arc::new(table.clone()));
    }
    Ok(table)
}

/// j'_{n,1} (0 for n = 0).
pub fn first_jp_zero(n: u32) -> Result<f64> {
    Ok(zeros(n, 1)?.first_jp_zeros[0])
}

/// y_{n,1}.
pub fn first_y_zero(n: u32) -> Result<f64> {
    if let Some(t) = cache().read().expect("zero cache poisoned").get(&n) {
        return Ok(t.y1);
    }
    y_zero(n, 1)
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheRow {
    n: u32,
    kind: String,
    k: usize,
    value: f64,
    tol: f64,
}

/// Writes every cached table as CSV rows (n, kind, k, value, tol).
pub fn save_zero_cache<W: Write>(out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let guard = cache().read().expect("zero cache poisoned");
    let mut orders: Vec<_> = guard.keys().copied().collect();
    orders.sort_unstable();
    for n in orders {
        let t = &guard[&n];
        let mut row = |kind: &str, k: usize, value: f64| {
            w.serialize(CacheRow {
                n,
                kind: kind.into(),
                k,
                value,
                tol: STATED_TOL,
            })
        };
        for (i, v) in t.first_j_zeros.iter().enumerate() {
            row("j", i + 1, *v)?;
        }
        for (i, v) in t.first_jp_zeros.iter().enumerate() {
            row("jp", i + 1, *v)?;
        }
        row("y", 1, t.y1)?;
        row("yp", 1, t.yp1)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads tables written by [`save_zero_cache`] into the in-memory cache.
/// Rows with a tolerance looser than the one used here are ignored.
pub fn load_zero_cache<R: Read>(input: R) -> Result<usize> {
    let mut rd = csv::Reader::from_reader(input);
    let mut parts: HashMap<u32, (Vec<(usize, f64)>, Vec<(usize, f64)>, Option<f64>, Option<f64>)> =
        HashMap::new();
    for row in rd.deserialize() {
        let row: CacheRow = row?;
        if row.tol > STATED_TOL {
            continue;
        }
        let e = parts.entry(row.n).or_default();
        match row.kind.as_str() {
            "j" => e.0.push((row.k, row.value)),
            "jp" => e.1.push((row.k, row.value)),
            "y" if row.k == 1 => e.2 = Some(row.value),
            "yp" if row.k == 1 => e.3 = Some(row.value),
            other => return Err(Error::Io(format!("unknown zero kind '{other}'"))),
        }
    }
    let mut loaded = 0;
    let mut guard = cache().write().expect("zero cache poisoned");
    for (n, (mut js, mut jps, y1, yp1)) in parts {
        let (Some(y1), Some(yp1)) = (y1, yp1) else { continue };
        js.sort_by_key(|p| p.0);
        jps.sort_by_key(|p| p.0);
        let contiguous = |v: &[(usize, f64)]| v.iter().enumerate().all(|(i, p)| p.0 == i + 1);
        if js.is_empty() || js.len() != jps.len() || !contiguous(&js) || !contiguous(&jps) {
            continue;
        }
        guard.insert(
            n,
            Arc::new(ZeroTable {
                order: n,
                first_j_zeros: js.into_iter().map(|p| p.1).collect(),
                first_jp_zeros: jps.into_iter().map(|p| p.1).collect(),
                y1,
                yp1,
            }),
        );
        loaded += 1;
    }
    Ok(loaded)
}

/// Convenience wrapper reading a cache file if it exists.
pub fn load_zero_cache_file(path: &Path) -> Result<usize> {
    if !path.exists() {
        return Ok(0);
    }
    load_zero_cache(std::fs::File::open(path)?)
}
