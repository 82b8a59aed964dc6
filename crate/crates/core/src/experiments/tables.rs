//! Fixed-driver anneal tables on the centered barrier target, and gap scans.

use rayon::prelude::*;
use serde::Serialize;

use super::{ablation_drivers, ser_sig6, NamedDriver, Result, Setup};
use crate::dynamics::{gap_scan, AnnealOutcome, ScheduleConfig};
use crate::hamiltonian::BarrierTargetConfig;

/// One anneal cell. Shared by the ablation, convergence, time and size tables.
#[derive(Clone, Debug, Serialize)]
pub struct AnnealRow {
    pub driver: String,
    pub n: u32,
    #[serde(serialize_with = "ser_sig6")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub epsilon: f64,
    pub w: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub total_time: f64,
    pub slices: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub fidelity: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub energy_residual: f64,
    pub degenerate_target: bool,
}

impl AnnealRow {
    pub fn new(driver: &NamedDriver, n: u32, schedule: &ScheduleConfig, out: &AnnealOutcome) -> Self {
        Self {
            driver: driver.label.to_string(),
            n,
            alpha: driver.config.alpha,
            epsilon: driver.config.epsilon,
            w: driver.config.w,
            total_time: schedule.total_time,
            slices: schedule.slices,
            fidelity: out.fidelity,
            energy_residual: out.energy_residual,
            degenerate_target: out.degeneracy_flag,
        }
    }
}

pub const ABLATION_WINDOW: usize = 8;

/// The five drivers followed across slices, anneal times and sizes.
pub fn sweep_drivers() -> Vec<NamedDriver> {
    let keep = ["tf", "sector", "sector+path", "sector+path+tf", "path"];
    ablation_drivers(ABLATION_WINDOW).into_iter().filter(|d| keep.contains(&d.label)).collect()
}

fn run_drivers(setup: &Setup, drivers: &[NamedDriver], schedule: &ScheduleConfig) -> Result<Vec<AnnealRow>> {
    let target = setup.barrier_target(&setup.strict)?;
    drivers
        .par_iter()
        .map(|d| {
            let out = setup.anneal_with(&d.config, &setup.strict, &target, schedule)?;
            Ok(AnnealRow::new(d, setup.n, schedule, &out))
        })
        .collect()
}

pub fn run_ablation(setup: &Setup) -> Result<Vec<AnnealRow>> {
    run_drivers(setup, &ablation_drivers(ABLATION_WINDOW), &setup.schedule)
}

pub fn run_convergence(setup: &Setup, slices: &[usize]) -> Result<Vec<AnnealRow>> {
    let mut rows = Vec::new();
    for &m in slices {
        let schedule = ScheduleConfig::new(setup.schedule.total_time, m)?;
        rows.extend(run_drivers(setup, &sweep_drivers(), &schedule)?);
    }
    Ok(rows)
}

pub const DEFAULT_TIMES: [f64; 6] = [10.0, 20.0, 40.0, 80.0, 120.0, 160.0];

pub fn run_time_sweep(setup: &Setup, times: &[f64]) -> Result<Vec<AnnealRow>> {
    let mut rows = Vec::new();
    for &t in times {
        let schedule = ScheduleConfig::new(t, setup.schedule.slices)?;
        rows.extend(run_drivers(setup, &sweep_drivers(), &schedule)?);
    }
    Ok(rows)
}

pub fn run_finite_size(ns: &[u32], schedule: &ScheduleConfig, barrier: &BarrierTargetConfig) -> Result<Vec<AnnealRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let setup = Setup::new(n, *schedule, *barrier)?;
        rows.extend(run_drivers(&setup, &sweep_drivers(), schedule)?);
    }
    Ok(rows)
}

pub fn gap_drivers() -> Vec<NamedDriver> {
    vec![
        NamedDriver::new("tf", 0.0, 1.0, 4),
        NamedDriver::new("sector", 0.0, 0.0, 4),
        NamedDriver::new("original_w4", 1.0, 0.0, 4),
        NamedDriver::new("original_hybrid_w4", 0.30, 0.10, 4),
        NamedDriver::new("original_hybrid_w8", 0.25, 0.10, 8),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub driver: String,
    #[serde(serialize_with = "ser_sig6")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub epsilon: f64,
    pub w: usize,
    pub grid_points: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub argmin_s: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub min_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapProfileRow {
    pub driver: String,
    #[serde(serialize_with = "ser_sig6")]
    pub s: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub gap: f64,
}

pub fn run_gaps(setup: &Setup, points: usize) -> Result<(Vec<GapRow>, Vec<GapProfileRow>)> {
    let target = setup.barrier_target(&setup.strict)?;
    let drivers = gap_drivers();
    let scans = drivers
        .par_iter()
        .map(|d| {
            let h = setup.driver(&d.config, &setup.strict)?;
            Ok(gap_scan(&h, &target.operator, points)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    for (d, scan) in drivers.iter().zip(scans) {
        rows.push(GapRow {
            driver: d.label.to_string(),
            alpha: d.config.alpha,
            epsilon: d.config.epsilon,
            w: d.config.w,
            grid_points: points,
            argmin_s: scan.argmin_s,
            min_gap: scan.min_gap,
        });
        for (s, gap) in scan.grid.iter().zip(&scan.gaps) {
            profiles.push(GapProfileRow { driver: d.label.to_string(), s: *s, gap: *gap });
        }
    }
    Ok((rows, profiles))
}
