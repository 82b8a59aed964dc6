//! Table and figure datasets: anneal sweeps, scans, controls, banding and
//! the sensor benchmark, written as CSV with a JSON manifest.

pub mod banding;
pub mod controls;
pub mod diagonal_qa;
pub mod generator;
pub mod reference;
pub mod reproduce;
pub mod scan;
pub mod sensor;
pub mod tables;

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dynamics::{anneal_to, AnnealOutcome, DynamicsError, ScheduleConfig, Target};
use crate::graphs::GraphError;
use crate::hamiltonian::{
    barrier_target, hybrid_driver, BarrierTargetConfig, DriverBasis, DriverConfig, HamiltonianError, PathComponent,
};
use crate::linalg::{HermitianOperator, LinalgError};
use crate::ordering::{strict_ordering, v2_generate, Ordering, OrderingError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// `%.6g`-style formatting: six significant digits, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-4..6).contains(&exp) {
        let m = trim(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(format!("{x:.*}", (5 - exp) as usize))
    }
}

pub fn ser_sig6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&sig6(*x))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Which ordering supplies the driver's path-window component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSource {
    Original,
    V2,
}

impl PathSource {
    pub fn name(self) -> &'static str {
        match self {
            PathSource::Original => "original",
            PathSource::V2 => "v2",
        }
    }
}

/// A named driver row: weights plus the window used for its path part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NamedDriver {
    pub label: &'static str,
    pub config: DriverConfig,
}

impl NamedDriver {
    pub fn new(label: &'static str, alpha: f64, epsilon: f64, w: usize) -> Self {
        Self { label, config: DriverConfig { alpha, epsilon, w } }
    }
}

/// The driver rows of the ablation, with the path window `w`.
pub fn ablation_drivers(w: usize) -> Vec<NamedDriver> {
    vec![
        NamedDriver::new("sector+path+tf", 0.5, 0.15, w),
        NamedDriver::new("sector+path", 0.5, 0.0, w),
        NamedDriver::new("sector+tf", 0.0, 0.15, w),
        NamedDriver::new("sector", 0.0, 0.0, w),
        NamedDriver::new("tf", 0.0, 1.0, w),
        NamedDriver::new("path+tf", 1.0, 0.15, w),
        NamedDriver::new("path", 1.0, 0.0, w),
    ]
}

/// Shared state for one problem size: driver Laplacians, the two
/// sector-snake orderings and the schedule.
pub struct Setup {
    pub n: u32,
    pub schedule: ScheduleConfig,
    pub barrier: BarrierTargetConfig,
    pub basis: DriverBasis,
    pub strict: Ordering,
    pub v2: Ordering,
    paths: Mutex<HashMap<(String, usize), Arc<PathComponent>>>,
}

impl Setup {
    pub fn new(n: u32, schedule: ScheduleConfig, barrier: BarrierTargetConfig) -> Result<Self> {
        barrier.validate()?;
        Ok(Self {
            n,
            schedule,
            barrier,
            basis: DriverBasis::new(n)?,
            strict: strict_ordering(n)?,
            v2: v2_generate(n)?,
            paths: Mutex::new(HashMap::new()),
        })
    }

    pub fn source(&self, source: PathSource) -> &Ordering {
        match source {
            PathSource::Original => &self.strict,
            PathSource::V2 => &self.v2,
        }
    }

    pub fn path(&self, ordering: &Ordering, w: usize) -> Result<Arc<PathComponent>> {
        let key = (ordering.label(), w);
        if let Some(hit) = self.paths.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let built = Arc::new(self.basis.path(ordering, w)?);
        self.paths.lock().expect("cache lock").insert(key, built.clone());
        Ok(built)
    }

    /// Drops cached path components for orderings used once (random controls).
    pub fn forget_path(&self, ordering: &Ordering, w: usize) {
        self.paths.lock().expect("cache lock").remove(&(ordering.label(), w));
    }

    pub fn driver(&self, config: &DriverConfig, source: &Ordering) -> Result<HermitianOperator> {
        let path = if config.alpha > 0.0 && config.epsilon < 1.0 { Some(self.path(source, config.w)?) } else { None };
        Ok(hybrid_driver(config, &self.basis, path.as_deref())?)
    }

    pub fn barrier_target(&self, ordering: &Ordering) -> Result<Target> {
        Ok(Target::new(barrier_target(&self.barrier, &self.basis, ordering)?)?)
    }

    pub fn anneal(&self, config: &DriverConfig, source: &Ordering, target: &Target) -> Result<AnnealOutcome> {
        self.anneal_with(config, source, target, &self.schedule)
    }

    pub fn anneal_with(
        &self,
        config: &DriverConfig,
        source: &Ordering,
        target: &Target,
        schedule: &ScheduleConfig,
    ) -> Result<AnnealOutcome> {
        let driver = self.driver(config, source)?;
        Ok(anneal_to(&driver, target, schedule)?)
    }
}

/// Sample mean and standard deviation (divisor `len - 1`).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_matches_printf_g() {
        assert_eq!(sig6(0.9798201234), "0.97982");
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e+06");
        assert_eq!(sig6(0.000012345678), "1.23457e-05");
        assert_eq!(sig6(0.00012345678), "0.000123457");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(9.999996), "10");
        assert_eq!(sig6(1.0), "1");
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }
}
