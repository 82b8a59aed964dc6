//! Hybrid-driver fine scans over `(alpha, epsilon, path source)` for several
//! non-diagonal target classes.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ser_sig6, ExperimentError, PathSource, Result, Setup};
use crate::dynamics::Target;
use crate::hamiltonian::{mixture_target, DriverConfig, MixtureClass, MixtureParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub path_sources: Vec<PathSource>,
    pub w_driver: usize,
}

fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step).round() as usize;
    (0..=count).map(|k| ((start + k as f64 * step) * 1e6).round() / 1e6).collect()
}

impl ScanGrid {
    /// `alpha` in 0.10..=0.60 by 0.05, `epsilon` in {0.05, 0.10}, both sources,
    /// driver window 4.
    pub fn reproduction() -> Self {
        Self {
            alphas: steps(0.10, 0.60, 0.05),
            epsilons: vec![0.05, 0.10],
            path_sources: vec![PathSource::Original, PathSource::V2],
            w_driver: 4,
        }
    }

    /// The reproduction grid extended to `epsilon` up to 0.20.
    pub fn wide() -> Self {
        Self { epsilons: vec![0.05, 0.10, 0.15, 0.20], ..Self::reproduction() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let grid: ScanGrid = serde_json::from_str(&fs::read_to_string(path)?)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: &f64| (0.0..=1.0).contains(v);
        if self.alphas.is_empty() || self.epsilons.is_empty() || self.path_sources.is_empty() {
            return Err(ExperimentError::Config("scan grid axes must be nonempty".into()));
        }
        if !self.alphas.iter().all(in_unit) || !self.epsilons.iter().all(in_unit) {
            return Err(ExperimentError::Config("scan grid values must lie in [0, 1]".into()));
        }
        if self.w_driver == 0 {
            return Err(ExperimentError::Config("w_driver must be at least 1".into()));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(PathSource, f64, f64)> {
        let mut cells = Vec::new();
        for &source in &self.path_sources {
            for &alpha in &self.alphas {
                for &epsilon in &self.epsilons {
                    cells.push((source, alpha, epsilon));
                }
            }
        }
        cells
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetClass {
    OriginalBarrier,
    V2Barrier,
    SectorWell,
    OriginalMix,
    V2Mix,
}

impl TargetClass {
    pub const ALL: [TargetClass; 5] = [
        TargetClass::OriginalBarrier,
        TargetClass::V2Barrier,
        TargetClass::SectorWell,
        TargetClass::OriginalMix,
        TargetClass::V2Mix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetClass::OriginalBarrier => "original_barrier",
            TargetClass::V2Barrier => "v2_barrier",
            TargetClass::SectorWell => "sector_well",
            TargetClass::OriginalMix => "original_mix",
            TargetClass::V2Mix => "v2_mix",
        }
    }

    fn source(self) -> PathSource {
        match self {
            TargetClass::V2Barrier | TargetClass::V2Mix => PathSource::V2,
            _ => PathSource::Original,
        }
    }

    fn mixture(self, setup: &Setup) -> Option<MixtureParams> {
        let class = match self {
            TargetClass::SectorWell => MixtureClass::SectorWellR1,
            TargetClass::OriginalMix | TargetClass::V2Mix => MixtureClass::MixSectorPath,
            _ => return None,
        };
        Some(MixtureParams { barrier: setup.barrier, ..MixtureParams::for_class(class) })
    }

    pub fn describe(self, setup: &Setup) -> String {
        match self.mixture(setup) {
            Some(p) => format!("{} [path ordering {}]", p.describe(setup.n), self.source().name()),
            None => format!(
                "L_path(w={}) + diag(barrier h={}, p_star_frac={}) [ordering {}]",
                setup.barrier.w_t,
                setup.barrier.h,
                setup.barrier.p_star_frac,
                self.source().name()
            ),
        }
    }

    pub fn build(self, setup: &Setup) -> Result<Target> {
        let ordering = setup.source(self.source());
        match self.mixture(setup) {
            Some(params) => Ok(Target::new(mixture_target(&params, &setup.basis, ordering)?)?),
            None => setup.barrier_target(ordering),
        }
    }
}

impl fmt::Display for TargetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetClass {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        TargetClass::ALL
            .into_iter()
            .find(|t| t.name() == s.trim().replace('-', "_"))
            .ok_or_else(|| ExperimentError::Config(format!("unknown target class {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub target: String,
    pub path_source: String,
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

#[derive(Clone, Debug, Serialize)]
pub struct TargetClassRow {
    pub target: String,
    #[serde(serialize_with = "ser_sig6")]
    pub tf: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub sector: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub original_path: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub v2_path: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub best_hybrid: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub best_residual: f64,
    pub best_source: String,
    #[serde(serialize_with = "ser_sig6")]
    pub best_alpha: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub best_epsilon: f64,
    pub construction: String,
}

/// Full-precision scan result for one target class.
#[derive(Clone, Debug)]
pub struct TargetScan {
    pub target: TargetClass,
    pub baselines: [f64; 4],
    pub cells: Vec<ScanRow>,
    pub best: usize,
}

impl TargetScan {
    pub fn best_cell(&self) -> &ScanRow {
        &self.cells[self.best]
    }

    /// Cells whose fidelity is within `resolution` of the maximum.
    pub fn co_maximal(&self, resolution: f64) -> Vec<&ScanRow> {
        let top = self.best_cell().fidelity;
        self.cells.iter().filter(|c| top - c.fidelity < resolution).collect()
    }
}

/// Highest fidelity; exact ties go to the earlier cell in grid order
/// (source, then smaller alpha, then smaller epsilon).
fn argmax(cells: &[ScanRow]) -> usize {
    let mut best = 0;
    for (k, c) in cells.iter().enumerate() {
        if c.fidelity > cells[best].fidelity {
            best = k;
        }
    }
    best
}

pub fn scan_target(setup: &Setup, target_class: TargetClass, grid: &ScanGrid) -> Result<TargetScan> {
    grid.validate()?;
    let target = target_class.build(setup)?;
    let w = grid.w_driver;
    let baseline_cfgs = [
        (DriverConfig::new(0.0, 1.0, w)?, PathSource::Original),
        (DriverConfig::new(0.0, 0.0, w)?, PathSource::Original),
        (DriverConfig::new(1.0, 0.0, w)?, PathSource::Original),
        (DriverConfig::new(1.0, 0.0, w)?, PathSource::V2),
    ];
    let baselines = baseline_cfgs
        .par_iter()
        .map(|(cfg, src)| Ok(setup.anneal(cfg, setup.source(*src), &target)?.fidelity))
        .collect::<Result<Vec<f64>>>()?;
    let cells = grid
        .cells()
        .par_iter()
        .map(|&(source, alpha, epsilon)| {
            let cfg = DriverConfig::new(alpha, epsilon, w)?;
            let out = setup.anneal(&cfg, setup.source(source), &target)?;
            Ok(ScanRow {
                target: target_class.name().to_string(),
                path_source: source.name().to_string(),
                alpha,
                epsilon,
                w,
                fidelity: out.fidelity,
                energy_residual: out.energy_residual,
            })
        })
        .collect::<Result<Vec<ScanRow>>>()?;
    let best = argmax(&cells);
    Ok(TargetScan { target: target_class, baselines: [baselines[0], baselines[1], baselines[2], baselines[3]], cells, best })
}

pub fn summary_row(setup: &Setup, scan: &TargetScan) -> TargetClassRow {
    let best = scan.best_cell();
    TargetClassRow {
        target: scan.target.name().to_string(),
        tf: scan.baselines[0],
        sector: scan.baselines[1],
        original_path: scan.baselines[2],
        v2_path: scan.baselines[3],
        best_hybrid: best.fidelity,
        best_residual: best.energy_residual,
        best_source: best.path_source.clone(),
        best_alpha: best.alpha,
        best_epsilon: best.epsilon,
        construction: scan.target.describe(setup),
    }
}

pub fn run_fine_scan(setup: &Setup, targets: &[TargetClass], grid: &ScanGrid) -> Result<Vec<TargetScan>> {
    targets.iter().map(|&t| scan_target(setup, t, grid)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduction_grid_shape() {
        let g = ScanGrid::reproduction();
        assert_eq!(g.alphas.len(), 11);
        assert_eq!(g.alphas[4], 0.30);
        assert_eq!(g.cells().len(), 44);
        assert_eq!(ScanGrid::wide().cells().len(), 88);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<ScanGrid>(&json).unwrap(), g);
    }

    #[test]
    fn invalid_grid_rejected() {
        let mut g = ScanGrid::reproduction();
        g.epsilons.push(1.5);
        assert!(g.validate().is_err());
        g = ScanGrid::reproduction();
        g.path_sources.clear();
        assert!(g.validate().is_err());
    }

    #[test]
    fn argmax_prefers_earlier_on_ties() {
        let row = |a: f64, f: f64| ScanRow {
            target: "t".into(),
            path_source: "original".into(),
            alpha: a,
            epsilon: 0.1,
            w: 4,
            fidelity: f,
            energy_residual: 0.0,
        };
        assert_eq!(argmax(&[row(0.1, 0.5), row(0.2, 0.7), row(0.3, 0.7)]), 1);
    }

    #[test]
    fn target_names_parse() {
        for t in TargetClass::ALL {
            assert_eq!(t.name().parse::<TargetClass>().unwrap(), t);
        }
    }
}
