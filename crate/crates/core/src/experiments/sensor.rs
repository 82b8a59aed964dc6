//! Staged sensor-placement benchmark.

use rayon::prelude::*;
use serde::Serialize;

use super::{ser_sig6, ExperimentError, NamedDriver, Result, Setup};
use crate::dynamics::Target;
use crate::hamiltonian::{sensor_target, SensorModelConfig};

/// Path window of the driver's path component in this benchmark.
pub const SENSOR_DRIVER_WINDOW: usize = 12;

pub fn sensor_drivers(w: usize) -> Vec<NamedDriver> {
    vec![
        NamedDriver::new("tf", 0.0, 1.0, w),
        NamedDriver::new("sector", 0.0, 0.0, w),
        NamedDriver::new("path", 1.0, 0.0, w),
        NamedDriver::new("sector+path", 0.5, 0.0, w),
        NamedDriver::new("hybrid_0.30_0.10", 0.30, 0.10, w),
        NamedDriver::new("hybrid_0.50_0.20", 0.50, 0.20, w),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct SensorRow {
    pub driver: String,
    #[serde(serialize_with = "ser_sig6")]
    pub alpha: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub epsilon: f64,
    pub w: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub fidelity: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub energy_residual: f64,
}

/// `setup` must be an eight-bit setup; the strict ordering defines both the
/// target's transition graph and the driver's path component.
pub fn run_sensor(setup: &Setup, cfg: &SensorModelConfig, driver_window: usize) -> Result<Vec<SensorRow>> {
    if setup.n != cfg.n_sensors {
        return Err(ExperimentError::Config(format!("{} sensors need an n = {} setup", cfg.n_sensors, cfg.n_sensors)));
    }
    let target = Target::new(sensor_target(cfg, &setup.basis, &setup.strict)?)?;
    sensor_drivers(driver_window)
        .par_iter()
        .map(|d| {
            let out = setup.anneal(&d.config, &setup.strict, &target)?;
            Ok(SensorRow {
                driver: d.label.into(),
                alpha: d.config.alpha,
                epsilon: d.config.epsilon,
                w: d.config.w,
                fidelity: out.fidelity,
                energy_residual: out.energy_residual,
            })
        })
        .collect()
}
