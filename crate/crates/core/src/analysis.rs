//! Coherence sweeps over a bare-coupling grid, finite-difference derivatives,
//! derivative peaks and log-log scaling fits.
//!
//! A sweep point `(x, n)` flows the bare coupling `x` through `n` QRG steps,
//! builds the 5-site block at the flowed coupling with `J = 1`, selects its
//! ground state and measures the l1 coherence of each requested marginal.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::subsystem_coherence;
use crate::error::{Error, Result};
use crate::groundstate::GroundSelection;
use crate::ising::{ising_ground, rg_flow_ising};
use crate::spinops::SiteIndex;
use crate::xy::{rg_flow_xy, xy_ground, XYCouplings, BLOCK_SITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Xy,
    Ising,
}

impl Model {
    pub fn default_grid(self) -> Grid {
        match self {
            Model::Xy => Grid { min: -1.0, max: 1.0, points: 2001 },
            Model::Ising => Grid { min: 0.01, max: 4.0, points: 2001 },
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Xy => "xy",
            Model::Ising => "ising",
        })
    }
}

/// Number of lattice spins represented by the effective block after `n` steps:
/// `5^(n+1)` for the XY blocking, `5 * 4^n` for the Ising blocking.
pub fn system_size(model: Model, n: usize) -> u64 {
    match model {
        Model::Xy => 5u64.pow(n as u32 + 1),
        Model::Ising => 5 * 4u64.pow(n as u32),
    }
}

/// Uniform grid `min..=max` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let grid = Self { min, max, points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(Error::InvalidSpec(format!("grid needs at least 3 points, got {}", self.points)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidSpec(format!("grid bounds {}..{} are not increasing", self.min, self.max)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    /// `x_i = ((P-1-i) min + i max) / (P-1)`, which lands exactly on zero and
    /// on short decimal values for symmetric grids.
    pub fn value(&self, i: usize) -> f64 {
        let last = (self.points - 1) as f64;
        ((last - i as f64) * self.min + i as f64 * self.max) / last
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

/// Marginal selection: the whole block or a set of 1-based sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subsystem {
    All,
    Sites(Vec<SiteIndex>),
}

impl Subsystem {
    pub fn sites(values: &[usize]) -> Result<Self> {
        if values.is_empty() {
            return Ok(Subsystem::All);
        }
        let mut v = values
            .iter()
            .map(|&s| {
                if s > BLOCK_SITES {
                    Err(Error::InvalidSite { site: s, n_sites: BLOCK_SITES })
                } else {
                    SiteIndex::new(s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        v.dedup();
        if v.len() == BLOCK_SITES {
            return Ok(Subsystem::All);
        }
        Ok(Subsystem::Sites(v))
    }

    pub fn keep(&self) -> &[SiteIndex] {
        match self {
            Subsystem::All => &[],
            Subsystem::Sites(v) => v,
        }
    }

    /// Number of kept sites.
    pub fn len(&self) -> usize {
        match self {
            Subsystem::All => BLOCK_SITES,
            Subsystem::Sites(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::All => f.write_str("all"),
            Subsystem::Sites(v) => {
                let labels: Vec<String> = v.iter().map(|s| s.to_string()).collect();
                f.write_str(&labels.join("-"))
            }
        }
    }
}

impl FromStr for Subsystem {
    type Err = Error;

    /// Accepts `all`, comma-separated (`1,2`) or dash-joined (`1-2`) sites.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Subsystem::All);
        }
        let values = s
            .split([',', '-'])
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidSpec(format!("bad site list `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::InvalidSpec(format!("bad site list `{s}`")));
        }
        Subsystem::sites(&values)
    }
}

impl Serialize for Subsystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Subsystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: Model,
    pub grid: Grid,
    pub rg_steps: Vec<usize>,
    pub subsystems: Vec<Subsystem>,
    /// Step for the fixed-point flow derivative; sweeps difference on the grid.
    pub fd_step: f64,
}

impl SweepSpec {
    pub fn new(model: Model, grid: Grid, rg_steps: Vec<usize>, subsystems: Vec<Subsystem>) -> Self {
        Self { model, grid, rg_steps, subsystems, fd_step: crate::ising::DEFAULT_FD_STEP }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.rg_steps.is_empty() {
            return Err(Error::InvalidSpec("no RG steps requested".into()));
        }
        if self.subsystems.is_empty() {
            return Err(Error::InvalidSpec("no subsystems requested".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidSpec(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if self.model == Model::Ising && !(self.grid.min > 0.0) {
            return Err(Error::InvalidSpec(
                "Ising grids must start above g = 0 (degenerate point excluded from derivatives)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: Model,
    pub rg_step: usize,
    pub subsystem: Subsystem,
    pub bare: f64,
    pub flowed: f64,
    pub coherence: f64,
    pub derivative: Option<f64>,
}

/// Bare coupling after `n` QRG steps.
pub fn flow_coupling(model: Model, x: f64, n: usize) -> Result<f64> {
    match model {
        Model::Xy => Ok(rg_flow_xy(XYCouplings::unit(x), n)?.last().gamma),
        Model::Ising => Ok(rg_flow_ising(x, n)?.last()),
    }
}

/// Selected block ground state at an already-flowed coupling.
pub fn block_ground(model: Model, coupling: f64) -> Result<GroundSelection> {
    match model {
        Model::Xy => xy_ground(coupling),
        Model::Ising => ising_ground(coupling),
    }
}

/// Coherence at one sweep point for each subsystem: returns the flowed
/// coupling and the coherences in `subsystems` order.
pub fn evaluate_point(model: Model, x: f64, n: usize, subsystems: &[Subsystem]) -> Result<(f64, Vec<f64>)> {
    let run = || -> Result<(f64, Vec<f64>)> {
        let flowed = flow_coupling(model, x, n)?;
        let ground = block_ground(model, flowed)?;
        let values =
            subsystems.iter().map(|s| subsystem_coherence(&ground.state, s.keep())).collect::<Result<Vec<_>>>()?;
        Ok((flowed, values))
    };
    run().map_err(|e| Error::AtPoint { x, step: n, source: Box::new(e) })
}

/// Evaluates every (grid point, step) pair; rows are ordered by step, then
/// subsystem, then grid index. Derivatives are left empty.
pub fn coherence_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let xs = spec.grid.values();
    let points = xs.len();
    let jobs: Vec<(usize, usize)> = (0..spec.rg_steps.len()).flat_map(|s| (0..points).map(move |i| (s, i))).collect();
    let results = jobs
        .par_iter()
        .map(|&(s, i)| evaluate_point(spec.model, xs[i], spec.rg_steps[s], &spec.subsystems))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(results.len() * spec.subsystems.len());
    for (s, &step) in spec.rg_steps.iter().enumerate() {
        let block = &results[s * points..(s + 1) * points];
        for (k, subsystem) in spec.subsystems.iter().enumerate() {
            for (i, (flowed, values)) in block.iter().enumerate() {
                rows.push(SweepRow {
                    model: spec.model,
                    rg_step: step,
                    subsystem: subsystem.clone(),
                    bare: xs[i],
                    flowed: *flowed,
                    coherence: values[k],
                    derivative: None,
                });
            }
        }
    }
    Ok(rows)
}

/// Fills `derivative` along one (step, subsystem) series on a uniform grid:
/// central differences inside, one-sided at the ends, and a right difference
/// at the XY cusp `gamma = 0`.
pub fn derivative(series: &mut [SweepRow], model: Model) -> Result<()> {
    let n = series.len();
    if n < 2 {
        return Err(Error::EmptySeries);
    }
    let h = series[1].bare - series[0].bare;
    if !(h > 0.0) {
        return Err(Error::NonUniformGrid(1));
    }
    for i in 1..n {
        let d = series[i].bare - series[i - 1].bare;
        if (d - h).abs() > 1e-6 * h {
            return Err(Error::NonUniformGrid(i));
        }
    }
    let c: Vec<f64> = series.iter().map(|r| r.coherence).collect();
    for i in 0..n {
        let d = if i == 0 {
            (c[1] - c[0]) / h
        } else if i == n - 1 {
            (c[n - 1] - c[n - 2]) / h
        } else if model == Model::Xy && series[i].bare.abs() < 0.5 * h {
            (c[i + 1] - c[i]) / h
        } else {
            (c[i + 1] - c[i - 1]) / (2.0 * h)
        };
        series[i].derivative = Some(d);
    }
    Ok(())
}

/// Sweep followed by derivatives on every (step, subsystem) series.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut rows = coherence_sweep(spec)?;
    for chunk in rows.chunks_mut(spec.grid.points) {
        derivative(chunk, spec.model)?;
    }
    Ok(rows)
}

/// Rows of one (step, subsystem) series, in grid order.
pub fn select_series(rows: &[SweepRow], rg_step: usize, subsystem: &Subsystem) -> Vec<SweepRow> {
    rows.iter().filter(|r| r.rg_step == rg_step && &r.subsystem == subsystem).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativePeak {
    pub x_max: f64,
    pub f_max: f64,
    pub rg_step: usize,
}

/// Interior point with the largest `|derivative|`; ties go to smaller x.
pub fn find_peak(series: &[SweepRow]) -> Result<DerivativePeak> {
    if series.len() < 3 {
        return Err(Error::EmptySeries);
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, row) in series.iter().enumerate().take(series.len() - 1).skip(1) {
        let Some(d) = row.derivative else { continue };
        let d = d.abs();
        if best.is_none_or(|(_, b)| d > b) {
            best = Some((i, d));
        }
    }
    let (i, f_max) = best.ok_or(Error::EmptySeries)?;
    Ok(DerivativePeak { x_max: series[i].bare, f_max, rg_step: series[i].rg_step })
}

/// `|dC/dgamma|` at `gamma = 0` (right difference), as a peak record.
pub fn cusp_slope(series: &[SweepRow]) -> Result<DerivativePeak> {
    let h = series.get(1).map(|r| r.bare - series[0].bare).ok_or(Error::EmptySeries)?;
    let row = series
        .iter()
        .find(|r| r.bare.abs() < 0.5 * h)
        .ok_or_else(|| Error::InvalidSpec("grid does not contain gamma = 0".into()))?;
    let d = row.derivative.ok_or(Error::EmptySeries)?;
    Ok(DerivativePeak { x_max: row.bare, f_max: d.abs(), rg_step: row.rg_step })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `(ln N, ln f_max)` pairs.
    pub points: Vec<(f64, f64)>,
    pub theta: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `1 / (2 theta)`.
    pub nu_from_theta: f64,
}

/// Ordinary least squares of `ln f_max` on `ln N`.
pub fn scaling_fit(peaks: &[DerivativePeak], model: Model) -> Result<ScalingFit> {
    if peaks.len() < 3 {
        return Err(Error::TooFewPoints(peaks.len()));
    }
    let points = peaks
        .iter()
        .map(|p| {
            if !(p.f_max > 0.0) || !p.f_max.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "peak value {} at step {} cannot be log-transformed",
                    p.f_max, p.rg_step
                )));
            }
            Ok(((system_size(model, p.rg_step) as f64).ln(), p.f_max.ln()))
        })
        .collect::<Result<Vec<_>>>()?;

    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidSpec("scaling fit needs distinct system sizes".into()));
    }
    let theta = sxy / sxx;
    let intercept = mean_y - theta * mean_x;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - theta * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(ScalingFit { points, theta, intercept, r_squared, nu_from_theta: 1.0 / (2.0 * theta) })
}

/// Per-step scaling observable plus the fit: the XY model uses the slope at
/// the `gamma = 0` cusp, the Ising model the interior derivative peak.
pub fn scaling_analysis(
    model: Model,
    grid: Grid,
    steps: &[usize],
    subsystem: &Subsystem,
) -> Result<(Vec<DerivativePeak>, ScalingFit)> {
    let spec = SweepSpec::new(model, grid, steps.to_vec(), vec![subsystem.clone()]);
    let rows = run_sweep(&spec)?;
    let peaks = rows
        .chunks(grid.points)
        .map(|series| match model {
            Model::Xy => cusp_slope(series),
            Model::Ising => find_peak(series),
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = scaling_fit(&peaks, model)?;
    Ok((peaks, fit))
}
