//! Datasets behind the standard plots. Each figure writes one or more CSV files
//! plus `<name>.json` recording the parameters used.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use su11::interferometer::{max_r1, SecondSqueeze};
use su11::numerics::{linspace, logspace};
use su11::optimize::{
    optimal_state_condition, optimize_r1, optimize_r1_limit, phase_grid, scaling_exponent, SqueezeSearch,
};
use su11::sensitivity::{coherent_variance, min_photons_for_detection, DetectionStrategy};
use su11::{evaluate, InterferometerConfig};

use crate::table::Table;

pub const FIGURES: [&str; 9] = [
    "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig2d", "figA1a", "figA1b", "figA1c",
];

type Dataset = (Vec<(String, Table)>, Value);

fn or_nan(r: su11::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn orders() -> Vec<u32> {
    (1..=4).collect()
}

fn variance(config: &InterferometerConfig) -> f64 {
    match evaluate(config) {
        Ok(r) => r.variance_epsilon,
        Err(_) => f64::NAN,
    }
}

fn limit_variance(m: u32, n_s: f64, r1: f64) -> f64 {
    or_nan(SqueezeSearch::new(m, n_s, SecondSqueeze::Infinite, 1.0, 1.0).variance(r1))
}

/// Phase landscape at the reference working point.
fn fig1b() -> Result<Dataset> {
    let (m, n_s, r1, r2, grid) = (2, 15.0, 0.939, 1.447, 64);
    let base = InterferometerConfig::new(m, n_s, r1, r2);
    let mut t = Table::new(["phi_las", "phi_int", "variance_epsilon"]);
    for (pl, pi, v) in phase_grid(&base, grid) {
        t.push(vec![pl, pi, v]);
    }
    let params = json!({ "m": m, "n_s": n_s, "r1": r1, "r2": r2, "grid": grid, "eta_in": 1.0, "eta_ex": 1.0 });
    Ok((vec![("fig1b.csv".into(), t)], params))
}

/// Sensitivity over both squeezing gains, and the best `r1` for each `r2`.
fn fig1c() -> Result<Dataset> {
    let (m, n_s) = (2, 15.0);
    let r1s = linspace(0.0, max_r1(n_s), 64);
    let r2s = linspace(0.0, 3.0, 61);
    let map: Vec<Vec<f64>> = (0..r1s.len() * r2s.len())
        .into_par_iter()
        .map(|idx| {
            let (r1, r2) = (r1s[idx / r2s.len()], r2s[idx % r2s.len()]);
            vec![r1, r2, variance(&InterferometerConfig::new(m, n_s, r1, r2))]
        })
        .collect();
    let mut t = Table::new(["r1", "r2", "variance_epsilon"]);
    map.into_iter().for_each(|r| t.push(r));

    let valley_r2: Vec<f64> = linspace(0.25, 3.0, 12).into_iter().chain([f64::INFINITY]).collect();
    let valley: Vec<Vec<f64>> = valley_r2
        .par_iter()
        .map(|&r2| {
            let mode = if r2.is_finite() {
                SecondSqueeze::Finite(r2)
            } else {
                SecondSqueeze::Infinite
            };
            match optimize_r1(&SqueezeSearch::new(m, n_s, mode, 1.0, 1.0)) {
                Ok(o) => vec![r2, o.best_r1, o.best_variance],
                Err(_) => vec![r2, f64::NAN, f64::NAN],
            }
        })
        .collect();
    let mut v = Table::new(["r2", "best_r1", "best_variance"]);
    valley.into_iter().for_each(|r| v.push(r));
    let params = json!({
        "m": m, "n_s": n_s,
        "r1": { "start": 0.0, "stop": max_r1(n_s), "count": 64 },
        "r2": { "start": 0.0, "stop": 3.0, "count": 61 },
        "valley_r2": "12 points from 0.25 to 3, then the infinite-gain limit (written as inf)",
    });
    Ok((vec![("fig1c.csv".into(), t), ("fig1c_valley.csv".into(), v)], params))
}

fn photon_grid() -> Vec<f64> {
    logspace(1.0, 1e4, 31)
}

/// Optimised sensitivity against photon number.
fn fig2a() -> Result<Dataset> {
    let rows: Vec<Vec<f64>> = orders()
        .into_par_iter()
        .flat_map_iter(|m| {
            photon_grid().into_iter().map(move |n| {
                let best = optimize_r1_limit(m, n, 1.0, 1.0);
                vec![
                    m as f64,
                    n,
                    or_nan(coherent_variance(m, n, 1.0, 1.0)),
                    best.map(|b| b.best_variance).unwrap_or(f64::NAN),
                ]
            })
        })
        .collect();
    let mut t = Table::new(["m", "n_s", "coherent", "su11_optimal"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": orders(), "n_s": { "start": 1.0, "stop": 1e4, "count": 31, "spacing": "log" },
                         "r2": "infinite", "eta_in": 1.0, "eta_ex": 1.0 });
    Ok((vec![("fig2a.csv".into(), t)], params))
}

/// Dependence on detection efficiency.
fn fig2b() -> Result<Dataset> {
    let n_s = 100.0;
    let etas = linspace(0.05, 1.0, 20);
    let rows: Vec<Vec<f64>> = orders()
        .into_par_iter()
        .flat_map_iter(|m| {
            etas.clone().into_iter().map(move |eta| {
                vec![
                    m as f64,
                    eta,
                    or_nan(coherent_variance(m, n_s, 1.0, eta)),
                    optimize_r1_limit(m, n_s, 1.0, eta)
                        .map(|b| b.best_variance)
                        .unwrap_or(f64::NAN),
                ]
            })
        })
        .collect();
    let mut t = Table::new(["m", "eta_ex", "coherent", "su11_optimal"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": orders(), "n_s": n_s, "eta_ex": { "start": 0.05, "stop": 1.0, "count": 20 },
                         "r2": "infinite", "eta_in": 1.0 });
    Ok((vec![("fig2b.csv".into(), t)], params))
}

/// Scaling exponent against internal loss.
fn fig2c() -> Result<Dataset> {
    let losses: Vec<f64> = [0.0].into_iter().chain(logspace(1e-4, 0.9, 17)).collect();
    let grid = su11::optimize::default_scaling_grid();
    let rows: Vec<Vec<f64>> = orders()
        .into_par_iter()
        .flat_map_iter(|m| {
            let grid = grid.clone();
            losses.clone().into_iter().map(move |x| {
                let su = scaling_exponent(m, DetectionStrategy::Su11Optimal, 1.0 - x, &grid);
                let coh = scaling_exponent(m, DetectionStrategy::Coherent, 1.0 - x, &grid);
                let (g, r2) = su
                    .map(|f| (f.exponent_gamma, f.r_squared))
                    .unwrap_or((f64::NAN, f64::NAN));
                vec![m as f64, x, g, r2, coh.map(|f| f.exponent_gamma).unwrap_or(f64::NAN)]
            })
        })
        .collect();
    let mut t = Table::new(["m", "one_minus_eta_in", "gamma_su11", "r_squared", "gamma_coherent"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": orders(), "one_minus_eta_in": losses, "ns_grid": grid, "r2": "infinite" });
    Ok((vec![("fig2c.csv".into(), t)], params))
}

/// Optimal first squeezing against photon number.
fn fig2d() -> Result<Dataset> {
    let rows: Vec<Vec<f64>> = orders()
        .into_par_iter()
        .flat_map_iter(|m| {
            photon_grid()
                .into_iter()
                .map(move |n| match optimize_r1_limit(m, n, 1.0, 1.0) {
                    Ok(b) => vec![
                        m as f64,
                        n,
                        b.best_r1,
                        b.best_alpha,
                        b.best_r1.sinh().powi(2),
                        or_nan(optimal_state_condition(n, b.best_r1, FRAC_PI_2)),
                    ],
                    Err(_) => vec![m as f64, n, f64::NAN, f64::NAN, f64::NAN, f64::NAN],
                })
        })
        .collect();
    let mut t = Table::new(["m", "n_s", "best_r1", "best_alpha", "n_r1", "state_ratio"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": orders(), "n_s": { "start": 1.0, "stop": 1e4, "count": 31, "spacing": "log" },
                         "r2": "infinite", "eta_in": 1.0, "eta_ex": 1.0 });
    Ok((vec![("fig2d.csv".into(), t)], params))
}

/// Finite gain approaching the infinite-gain value.
fn fig_a1a() -> Result<Dataset> {
    let (m, n_s) = (2, 15.0);
    let r1 = optimize_r1_limit(m, n_s, 1.0, 1.0).context("optimising r1")?.best_r1;
    let limit = limit_variance(m, n_s, r1);
    let r2s = linspace(0.0, 8.0, 81);
    let rows: Vec<Vec<f64>> = r2s
        .par_iter()
        .map(|&r2| vec![r2, variance(&InterferometerConfig::new(m, n_s, r1, r2)), limit])
        .collect();
    let mut t = Table::new(["r2", "variance_epsilon", "limit"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": m, "n_s": n_s, "r1": r1, "r2": { "start": 0.0, "stop": 8.0, "count": 81 },
                         "phi_las": FRAC_PI_2, "phi_int": PI });
    Ok((vec![("figA1a.csv".into(), t)], params))
}

/// Infinite-gain sensitivity across the whole feasible `r1` interval.
fn fig_a1b() -> Result<Dataset> {
    let m = 2;
    let photons = [15.0, 100.0, 1000.0];
    let rows: Vec<Vec<f64>> = photons
        .par_iter()
        .flat_map_iter(|&n| {
            linspace(0.0, max_r1(n), 101)
                .into_iter()
                .map(move |r1| vec![n, r1, limit_variance(m, n, r1)])
        })
        .collect();
    let mut t = Table::new(["n_s", "r1", "variance_epsilon"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": m, "n_s": photons, "r1_points": 101, "r2": "infinite" });
    Ok((vec![("figA1b.csv".into(), t)], params))
}

/// Photon number needed for unit signal-to-noise.
fn fig_a1c() -> Result<Dataset> {
    let eps = logspace(1e-5, 1e-1, 17);
    let rows: Vec<Vec<f64>> = orders()
        .into_par_iter()
        .flat_map_iter(|m| {
            eps.clone().into_iter().map(move |e| {
                vec![
                    m as f64,
                    e,
                    or_nan(min_photons_for_detection(m, e, DetectionStrategy::Coherent, 1.0)),
                    or_nan(min_photons_for_detection(m, e, DetectionStrategy::Su11Optimal, 1.0)),
                ]
            })
        })
        .collect();
    let mut t = Table::new(["m", "eps_m", "n_coherent", "n_su11_optimal"]);
    rows.into_iter().for_each(|r| t.push(r));
    let params = json!({ "m": orders(), "eps_m": { "start": 1e-5, "stop": 0.1, "count": 17, "spacing": "log" },
                         "eta_in": 1.0, "r2": "infinite" });
    Ok((vec![("figA1c.csv".into(), t)], params))
}

pub fn figure_tables(name: &str) -> Result<Dataset> {
    match name {
        "fig1b" => fig1b(),
        "fig1c" => fig1c(),
        "fig2a" => fig2a(),
        "fig2b" => fig2b(),
        "fig2c" => fig2c(),
        "fig2d" => fig2d(),
        "figA1a" => fig_a1a(),
        "figA1b" => fig_a1b(),
        "figA1c" => fig_a1c(),
        _ => bail!("unknown figure {name:?}; expected one of {FIGURES:?}"),
    }
}

/// Writes the figure's CSV files and `<name>.json` into `out_dir`, returning every path written.
pub fn write_figure(name: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let (tables, params) = figure_tables(name)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut written = Vec::new();
    for (file, table) in &tables {
        let path = out_dir.join(file);
        table.write(&path)?;
        written.push(path);
    }
    let files: Vec<String> = tables.iter().map(|t| t.0.clone()).collect();
    let sidecar = out_dir.join(format!("{name}.json"));
    crate::write_sidecar(&sidecar, name, &params, &files, start.elapsed())?;
    written.push(sidecar);
    Ok(written)
}
