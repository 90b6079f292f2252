//! Largest achievable constraint fraction for each decoder condition, the
//! rows of the comparison table and the rate curves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{center_probability, fourth_power_bound, kv_bound};

/// Slack allowed when comparing the two sides of a condition, so that
/// conditions holding with equality (in exact arithmetic) still hold.
pub const CONDITION_TOL: f64 = 1e-12;

const MONOTONE_SAMPLES: usize = 2000;
const SCAN_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Reconstructed baseline `rho + R (1 - rho)`.
    Classical,
    /// Unique decoding: `1 - R/2 <= c`.
    Bw,
    /// List decoding to the Johnson radius: `1 - R <= c^2`.
    Gs,
    /// Soft decoding: `1 - R <= U(tau, rho)`.
    Kv,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Classical, Criterion::Bw, Criterion::Gs, Criterion::Kv];
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Criterion::Classical => "classical",
            Criterion::Bw => "bw",
            Criterion::Gs => "gs",
            Criterion::Kv => "kv",
        };
        f.write_str(s)
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Criterion::Classical),
            "bw" => Ok(Criterion::Bw),
            "gs" => Ok(Criterion::Gs),
            "kv" => Ok(Criterion::Kv),
            other => Err(Error::InvalidParameter(format!("unknown criterion {other:?}"))),
        }
    }
}

/// A threshold question. `interval` pins the soft-decoding bound to an
/// explicit `(q, z)` instead of a real density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdQuery {
    pub kind: Criterion,
    pub rate: f64,
    pub rho: f64,
    pub interval: Option<(u32, u32)>,
}

impl ThresholdQuery {
    pub fn new(kind: Criterion, rate: f64, rho: f64) -> Self {
        Self { kind, rate, rho, interval: None }
    }

    /// Soft-decoding query at `rho = (2z + 1) / q`.
    pub fn kv_interval(rate: f64, q: u32, z: u32) -> Self {
        Self { kind: Criterion::Kv, rate, rho: (2 * z + 1) as f64 / q as f64, interval: Some((q, z)) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(Error::InvalidParameter(format!("rate {} outside (0, 1)", self.rate)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter(format!("rho {} outside (0, 1)", self.rho)));
        }
        if self.interval.is_some() && self.kind != Criterion::Kv {
            return Err(Error::InvalidParameter("an explicit interval only applies to kv".into()));
        }
        Ok(())
    }

    /// Left-hand side of the condition.
    pub fn lhs(&self) -> f64 {
        match self.kind {
            Criterion::Bw => 1.0 - self.rate / 2.0,
            _ => 1.0 - self.rate,
        }
    }

    /// Right-hand side at `tau`.
    pub fn rhs(&self, tau: f64) -> f64 {
        match (self.kind, self.interval) {
            (Criterion::Bw, _) => center_probability(tau, self.rho),
            (Criterion::Gs, _) => center_probability(tau, self.rho).powi(2),
            (Criterion::Kv, Some((q, z))) => fourth_power_bound(q, z, tau).unwrap_or(f64::NAN),
            (Criterion::Kv, None) => kv_bound(tau, self.rho),
            (Criterion::Classical, _) => f64::NAN,
        }
    }

    pub fn holds(&self, tau: f64) -> bool {
        self.rhs(tau) >= self.lhs() - CONDITION_TOL
    }
}

/// Largest `tau` in `[rho, 1]` for which the query's condition holds.
pub fn tau_max_query(query: &ThresholdQuery) -> Result<f64> {
    query.validate()?;
    if let Some((q, z)) = query.interval {
        fourth_power_bound(q, z, 1.0)?;
    }
    if query.kind == Criterion::Classical {
        return Ok(query.rho + query.rate * (1.0 - query.rho));
    }
    let lo = query.rho;
    if !query.holds(lo) {
        return Err(Error::Infeasible);
    }
    if query.holds(1.0) {
        return Ok(1.0);
    }
    if is_nonincreasing(query) {
        Ok(bisect(query, lo, 1.0))
    } else {
        Ok(scan(query, lo))
    }
}

pub fn tau_max(kind: Criterion, rate: f64, rho: f64) -> Result<f64> {
    tau_max_query(&ThresholdQuery::new(kind, rate, rho))
}

fn is_nonincreasing(query: &ThresholdQuery) -> bool {
    let rho = query.rho;
    let mut prev = query.rhs(rho);
    for i in 1..=MONOTONE_SAMPLES {
        let tau = rho + (1.0 - rho) * i as f64 / MONOTONE_SAMPLES as f64;
        let v = query.rhs(tau);
        if v > prev + 1e-12 {
            return false;
        }
        prev = v;
    }
    true
}

/// `lo` satisfies the condition and `hi` does not.
fn bisect(query: &ThresholdQuery, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if query.holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Fallback when the right-hand side is not monotone: the last grid point
/// that satisfies the condition, refined inside its cell.
fn scan(query: &ThresholdQuery, lo: f64) -> f64 {
    let step = (1.0 - lo) / SCAN_SAMPLES as f64;
    let last = (0..=SCAN_SAMPLES).rev().map(|i| lo + step * i as f64).find(|&t| query.holds(t)).unwrap_or(lo);
    if last + step <= 1.0 {
        bisect(query, last, last + step)
    } else {
        last
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub label: String,
    pub rate: f64,
    pub rho: f64,
    /// Reconstructed baseline `rho + R (1 - rho)`.
    pub tau_classical: f64,
    pub tau_bw: f64,
    pub tau_gs: f64,
    pub tau_kv: f64,
    pub saturated_bw: bool,
    pub saturated_gs: bool,
    pub saturated_kv: bool,
}

impl ThresholdRow {
    pub fn compute(label: &str, rate: f64, rho: f64) -> Result<Self> {
        let tau_bw = tau_max(Criterion::Bw, rate, rho)?;
        let tau_gs = tau_max(Criterion::Gs, rate, rho)?;
        let tau_kv = tau_max(Criterion::Kv, rate, rho)?;
        Ok(Self {
            label: label.to_string(),
            rate,
            rho,
            tau_classical: tau_max(Criterion::Classical, rate, rho)?,
            tau_bw,
            tau_gs,
            tau_kv,
            saturated_bw: tau_bw == 1.0,
            saturated_gs: tau_gs == 1.0,
            saturated_kv: tau_kv == 1.0,
        })
    }

    pub fn get(&self, kind: Criterion) -> f64 {
        match kind {
            Criterion::Classical => self.tau_classical,
            Criterion::Bw => self.tau_bw,
            Criterion::Gs => self.tau_gs,
            Criterion::Kv => self.tau_kv,
        }
    }
}

/// Maximizer of `tau_max(kind, R, rho)` along `rho + R (1 - rho) = target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub rate: f64,
    pub rho: f64,
    pub tau: f64,
}

fn rate_on_curve(rho: f64, target: f64) -> f64 {
    (target - rho) / (1.0 - rho)
}

fn value_on_curve(kind: Criterion, rho: f64, target: f64) -> f64 {
    tau_max(kind, rate_on_curve(rho, target), rho).unwrap_or(f64::NEG_INFINITY)
}

/// Grid search over `rho` with step `1e-3`, then golden-section refinement
/// in the neighbouring cells.
pub fn optimize_over_rho(kind: Criterion, target: f64) -> Result<Optimum> {
    if kind == Criterion::Classical {
        return Err(Error::InvalidParameter("the classical baseline is constant along the curve".into()));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target {target} outside (0, 1)")));
    }
    let step = 1e-3;
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut i = 1;
    loop {
        let rho = step * i as f64;
        if rho >= target {
            break;
        }
        let v = value_on_curve(kind, rho, target);
        if v > best.0 {
            best = (v, rho);
        }
        i += 1;
    }
    if !best.0.is_finite() {
        return Err(Error::Infeasible);
    }
    let (mut a, mut b) = ((best.1 - step).max(step * 1e-3), (best.1 + step).min(target - step * 1e-3));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (value_on_curve(kind, c, target), value_on_curve(kind, d, target));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = value_on_curve(kind, c, target);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = value_on_curve(kind, d, target);
        }
    }
    let rho = 0.5 * (a + b);
    let tau = value_on_curve(kind, rho, target);
    let (rho, tau) = if tau >= best.0 { (rho, tau) } else { (best.1, best.0) };
    Ok(Optimum { rate: rate_on_curve(rho, target), rho, tau })
}

/// Published three-decimal rows: `(R, rho, [classical, bw, gs, kv])`.
pub const REFERENCE_TABLE: [(f64, f64, [f64; 4]); 6] = [
    (0.1, 0.5, [0.55, 0.718, 0.721, 0.722]),
    (0.75, 0.5, [0.875, 0.984, 1.0, 1.0]),
    (2.0 / 3.0, 0.5, [0.833, 0.971, 0.994, 1.0]),
    (0.234, 0.413, [0.55, 0.749, 0.760, 0.763]),
    (0.259, 0.393, [0.55, 0.748, 0.761, 0.765]),
    (0.267, 0.386, [0.55, 0.748, 0.761, 0.765]),
];

/// Largest deviation of `rows` from [`REFERENCE_TABLE`] over all 24 cells.
pub fn max_reference_deviation(rows: &[ThresholdRow]) -> f64 {
    rows.iter()
        .zip(REFERENCE_TABLE)
        .flat_map(|(row, (_, _, cells))| Criterion::ALL.iter().zip(cells).map(move |(k, c)| (row.get(*k) - c).abs()))
        .fold(0.0, f64::max)
}

/// Classical fraction used for the optimized rows.
pub const TABLE_CLASSICAL_TARGET: f64 = 0.55;

/// The six comparison rows: three fixed points at `rho = 1/2` and the
/// optimum of each quantum condition at a classical fraction of 0.55.
pub fn table1() -> Result<Vec<ThresholdRow>> {
    let mut rows = vec![
        ThresholdRow::compute("P1", 0.1, 0.5)?,
        ThresholdRow::compute("P2", 0.75, 0.5)?,
        ThresholdRow::compute("P3", 2.0 / 3.0, 0.5)?,
    ];
    for (label, kind) in [("opt_bw", Criterion::Bw), ("opt_gs", Criterion::Gs), ("opt_kv", Criterion::Kv)] {
        let opt = optimize_over_rho(kind, TABLE_CLASSICAL_TARGET)?;
        rows.push(ThresholdRow::compute(label, opt.rate, opt.rho)?);
    }
    Ok(rows)
}

/// One point of the rate curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rate: f64,
    pub rho: f64,
    pub tau_classical: f64,
    pub tau_bw: f64,
    pub tau_gs: f64,
    pub tau_kv: f64,
}

pub fn figure1_curves(rho: f64, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    grid.iter()
        .map(|&rate| {
            let row = ThresholdRow::compute("", rate, rho)?;
            Ok(CurvePoint {
                rate,
                rho,
                tau_classical: row.tau_classical,
                tau_bw: row.tau_bw,
                tau_gs: row.tau_gs,
                tau_kv: row.tau_kv,
            })
        })
        .collect()
}

pub const CURVE_HEADER: &str = "R,rho,tau_classical,tau_bw,tau_gs,tau_kv";

/// CSV with a header row, six decimals, LF line endings.
pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            p.rate, p.rho, p.tau_classical, p.tau_bw, p.tau_gs, p.tau_kv
        ));
    }
    out
}

pub const TABLE_HEADER: &str = "label,R,rho,tau_classical,tau_bw,tau_gs,tau_kv";

pub fn table_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            r.label, r.rate, r.rho, r.tau_classical, r.tau_bw, r.tau_gs, r.tau_kv
        ));
    }
    out
}

/// Parses `start:end:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(format!("grid {spec:?}: {e}"))))
        .collect::<Result<_>>()?;
    let [start, end, step] = parts[..] else {
        return Err(Error::InvalidParameter(format!("grid {spec:?} must be start:end:step")));
    };
    if !(step > 0.0) || end < start {
        return Err(Error::InvalidParameter(format!("grid {spec:?} is empty")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation_points() {
        assert!((tau_max(Criterion::Bw, 0.1, 0.5).unwrap() - 0.71794).abs() < 1e-4);
        assert_eq!(tau_max(Criterion::Gs, 0.75, 0.5).unwrap(), 1.0);
        assert!((center_probability(1.0, 0.5).powi(2) - 0.25).abs() < 1e-12);
        assert_eq!(tau_max(Criterion::Kv, 2.0 / 3.0, 0.5).unwrap(), 1.0);
        assert_eq!(tau_max_query(&ThresholdQuery::kv_interval(2.0 / 3.0, 2, 0)).unwrap(), 1.0);
    }

    #[test]
    fn classical_baseline() {
        assert!((tau_max(Criterion::Classical, 0.234, 0.413).unwrap() - 0.55).abs() < 5e-4);
    }

    #[test]
    fn returned_tau_saturates() {
        for kind in [Criterion::Bw, Criterion::Gs, Criterion::Kv] {
            for (rate, rho) in [(0.1, 0.5), (0.3, 0.2), (0.5, 0.7)] {
                let q = ThresholdQuery::new(kind, rate, rho);
                let t = tau_max_query(&q).unwrap();
                assert!(q.holds(t));
                if t < 1.0 {
                    assert!(!q.holds(t + 1e-6));
                }
            }
        }
    }

    #[test]
    fn explicit_interval_agrees_with_density_form() {
        for (q, z) in [(11u32, 2u32), (13, 4), (17, 3)] {
            let rho = (2 * z + 1) as f64 / q as f64;
            let a = tau_max_query(&ThresholdQuery::kv_interval(0.3, q, z)).unwrap();
            let b = tau_max(Criterion::Kv, 0.3, rho).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn gs_dominates_bw() {
        for i in 1..20 {
            let rate = i as f64 / 20.0;
            for rho in [0.2, 0.5, 0.8] {
                assert!(tau_max(Criterion::Gs, rate, rho).unwrap() >= tau_max(Criterion::Bw, rate, rho).unwrap());
            }
        }
    }

    #[test]
    fn invalid_queries() {
        assert!(tau_max(Criterion::Bw, 0.0, 0.5).is_err());
        assert!(tau_max(Criterion::Bw, 0.5, 1.0).is_err());
        assert!(optimize_over_rho(Criterion::Classical, 0.55).is_err());
        assert!(tau_max_query(&ThresholdQuery::kv_interval(0.5, 7, 3)).is_err());
    }

    #[test]
    fn curves_are_monotone_and_csv_is_fixed_point() {
        let grid = parse_grid("0.05:0.95:0.05").unwrap();
        assert_eq!(grid.len(), 19);
        let pts = figure1_curves(0.5, &grid).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].tau_bw >= w[0].tau_bw && w[1].tau_gs >= w[0].tau_gs && w[1].tau_kv >= w[0].tau_kv);
            assert!(w[1].tau_classical >= w[0].tau_classical);
        }
        let csv = curves_csv(&pts[..1]);
        assert_eq!(csv.lines().next().unwrap(), CURVE_HEADER);
        assert_eq!(csv.lines().nth(1).unwrap().split(',').nth(1).unwrap(), "0.500000");
    }

    #[test]
    fn grid_parsing() {
        assert!(parse_grid("0.1:0.2").is_err());
        assert!(parse_grid("0.5:0.1:0.1").is_err());
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
    }

    #[test]
    fn table_matches_independent_optimizer() {
        // Frozen from a separate solver using exact optimizers along the
        // classical-0.55 curve.
        let expected = [
            (0.1, 0.5, [0.55, 0.717945, 0.720643, 0.721599]),
            (0.75, 0.5, [0.875, 0.984123, 1.0, 1.0]),
            (2.0 / 3.0, 0.5, [0.833333, 0.971405, 0.993981, 1.0]),
            (0.233691, 0.412770, [0.55, 0.749464, 0.759719, 0.763345]),
            (0.258981, 0.392728, [0.55, 0.748434, 0.760657, 0.764880]),
            (0.266915, 0.386156, [0.55, 0.747679, 0.760563, 0.764975]),
        ];
        let rows = table1().unwrap();
        for (row, (rate, rho, taus)) in rows.iter().zip(expected) {
            assert!((row.rate - rate).abs() < 2e-4, "{row:?}");
            assert!((row.rho - rho).abs() < 2e-4, "{row:?}");
            for (kind, t) in Criterion::ALL.iter().zip(taus) {
                assert!((row.get(*kind) - t).abs() < 2e-6, "{kind} {row:?}");
            }
        }
    }
}
