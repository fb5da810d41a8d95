//! Cartesian parameter sweeps over the finite-gain pipeline.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use su11::interferometer::{Drive, MpaModel, SecondSqueeze};
use su11::numerics::{linspace, logspace};
use su11::sensitivity::snr;
use su11::{evaluate, InterferometerConfig, SensitivityReport};

use crate::table::Table;

pub const DEFAULT_MAX_GRID: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    List {
        values: Vec<f64>,
    },
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl AxisValues {
    pub fn len(&self) -> usize {
        match self {
            AxisValues::List { values } => values.len(),
            AxisValues::Range { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<f64> {
        match *self {
            AxisValues::List { ref values } => values.clone(),
            AxisValues::Range {
                start,
                stop,
                count,
                spacing: Spacing::Linear,
            } => linspace(start, stop, count),
            AxisValues::Range {
                start,
                stop,
                count,
                spacing: Spacing::Log,
            } => logspace(start, stop, count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    #[serde(flatten)]
    pub values: AxisValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    MeanN,
    VarN,
    SignalDerivative,
    VarianceEpsilon,
    Snr,
}

impl Output {
    fn column(self) -> &'static str {
        match self {
            Output::MeanN => "mean_n",
            Output::VarN => "var_n",
            Output::SignalDerivative => "signal_derivative",
            Output::VarianceEpsilon => "variance_epsilon",
            Output::Snr => "snr",
        }
    }
}

/// Input of `su11 sweep`.
///
/// Parameters not named in `fixed` or `axes` start from `m = 2`, `n_s = 1`,
/// `r1 = r2 = 0`, `phi_las = pi/2`, `phi_int = pi`, no loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub schema_version: u32,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: BTreeMap<String, Value>,
    pub outputs: Vec<Output>,
    /// Needed for the `snr` output.
    #[serde(default)]
    pub eps_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: usize,
    /// Points whose evaluation failed; their outputs are NaN.
    pub failed: usize,
    pub min_variance_epsilon: Option<f64>,
    pub argmin: Option<BTreeMap<String, f64>>,
}

const NUMERIC: [&str; 9] = [
    "m", "r1", "r2", "phi_las", "phi_int", "eta_in", "eta_ex", "alpha", "n_s",
];

fn set_numeric(config: &mut InterferometerConfig, name: &str, v: f64) -> Result<()> {
    match name {
        "m" => {
            ensure!(v.fract() == 0.0 && v >= 0.0, "m must be a whole number, got {v}");
            config.m = v as u32;
        }
        "r1" => config.r1 = v,
        "r2" => config.r2 = SecondSqueeze::Finite(v),
        "phi_las" => config.phi_las = v,
        "phi_int" => config.phi_int = v,
        "eta_in" => config.eta_in = v,
        "eta_ex" => config.eta_ex = v,
        "alpha" => config.drive = Drive::Alpha(v),
        "n_s" => config.drive = Drive::PhotonsAtSample(v),
        _ => bail!("unknown parameter {name:?}; expected one of {NUMERIC:?}"),
    }
    Ok(())
}

fn set_fixed(config: &mut InterferometerConfig, name: &str, value: &Value) -> Result<()> {
    match (name, value) {
        ("model", v) => config.model = serde_json::from_value::<MpaModel>(v.clone())?,
        ("r2", Value::String(_)) => {
            if let SecondSqueeze::Infinite = serde_json::from_value::<SecondSqueeze>(value.clone())? {
                bail!("sweeps run the finite-gain pipeline; use `optimize` or a figure for infinite r2");
            }
        }
        (_, Value::Number(n)) => set_numeric(config, name, n.as_f64().context("number out of range")?)?,
        _ => bail!("fixed parameter {name:?} has unsupported value {value}"),
    }
    Ok(())
}

impl SweepSpec {
    fn base(&self) -> Result<InterferometerConfig> {
        ensure!(
            self.schema_version == crate::SCHEMA_VERSION,
            "schema_version {} is not supported",
            self.schema_version
        );
        let mut config = InterferometerConfig::new(2, 1.0, 0.0, 0.0);
        if self.fixed.contains_key("alpha") && self.fixed.contains_key("n_s") {
            bail!("give either alpha or n_s, not both");
        }
        for (name, value) in &self.fixed {
            set_fixed(&mut config, name, value)?;
        }
        for (i, axis) in self.axes.iter().enumerate() {
            ensure!(NUMERIC.contains(&axis.name.as_str()), "unknown axis {:?}", axis.name);
            ensure!(!axis.values.is_empty(), "axis {:?} has no points", axis.name);
            ensure!(
                !self.fixed.contains_key(&axis.name),
                "{:?} is both fixed and swept",
                axis.name
            );
            ensure!(
                self.axes[..i].iter().all(|a| a.name != axis.name),
                "axis {:?} appears twice",
                axis.name
            );
        }
        ensure!(!self.outputs.is_empty(), "no outputs requested");
        if self.outputs.contains(&Output::Snr) {
            ensure!(self.eps_m.is_some(), "the snr output needs eps_m");
        }
        Ok(config)
    }

    /// Number of grid points, or `None` on overflow.
    pub fn size(&self) -> Option<u64> {
        self.axes
            .iter()
            .try_fold(1u64, |acc, a| acc.checked_mul(a.values.len() as u64))
    }
}

fn output_value(out: Output, report: &SensitivityReport, eps_m: Option<f64>) -> f64 {
    match out {
        Output::MeanN => report.mean_n,
        Output::VarN => report.var_n,
        Output::SignalDerivative => report.signal_derivative,
        Output::VarianceEpsilon => report.variance_epsilon,
        Output::Snr => snr(eps_m.unwrap_or(f64::NAN), report),
    }
}

/// Evaluates every grid point. Rows follow an odometer over the axes in declaration
/// order: the last axis changes fastest.
pub fn evaluate_sweep(spec: &SweepSpec, max_grid: u64) -> Result<(Table, SweepSummary)> {
    let base = spec.base()?;
    let size = spec.size().filter(|&n| n <= max_grid);
    let Some(size) = size else {
        bail!("sweep grid exceeds the cap of {max_grid} points (raise it with SU11_MAX_GRID or --max-grid)");
    };
    let points: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values.points()).collect();
    let coordinates = |mut idx: usize| -> Vec<f64> {
        let mut c = vec![0.0; points.len()];
        for (k, axis) in points.iter().enumerate().rev() {
            c[k] = axis[idx % axis.len()];
            idx /= axis.len();
        }
        c
    };

    let results: Vec<(Vec<f64>, Option<SensitivityReport>)> = (0..size as usize)
        .into_par_iter()
        .map(|idx| {
            let coords = coordinates(idx);
            let mut config = base;
            let ok = spec
                .axes
                .iter()
                .zip(&coords)
                .all(|(a, &v)| set_numeric(&mut config, &a.name, v).is_ok());
            let report = if ok { evaluate(&config).ok() } else { None };
            (coords, report)
        })
        .collect();

    let mut table = Table::new(
        spec.axes
            .iter()
            .map(|a| a.name.clone())
            .chain(spec.outputs.iter().map(|o| o.column().to_string())),
    );
    let mut failed = 0;
    let mut best: Option<(f64, usize)> = None;
    for (i, (coords, report)) in results.iter().enumerate() {
        let mut row = coords.clone();
        match report {
            Some(r) => {
                row.extend(spec.outputs.iter().map(|&o| output_value(o, r, spec.eps_m)));
                if r.variance_epsilon.is_finite() && best.is_none_or(|b| r.variance_epsilon < b.0) {
                    best = Some((r.variance_epsilon, i));
                }
            }
            None => {
                failed += 1;
                row.extend(spec.outputs.iter().map(|_| f64::NAN));
            }
        }
        table.push(row);
    }
    let summary = SweepSummary {
        rows: results.len(),
        failed,
        min_variance_epsilon: best.map(|b| b.0),
        argmin: best.map(|b| {
            spec.axes
                .iter()
                .zip(&results[b.1].0)
                .map(|(a, &v)| (a.name.clone(), v))
                .collect()
        }),
    };
    Ok((table, summary))
}

/// Writes the CSV to `out` and a JSON sidecar next to it with the extension `.json`.
pub fn run_sweep(spec: &SweepSpec, out: &Path, max_grid: u64) -> Result<SweepSummary> {
    let start = Instant::now();
    let (table, summary) = evaluate_sweep(spec, max_grid)?;
    table.write(out)?;
    let file = out
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    crate::write_sidecar(
        &out.with_extension("json"),
        "sweep",
        &serde_json::json!({ "spec": spec, "summary": summary }),
        &[file],
        start.elapsed(),
    )?;
    Ok(summary)
}
