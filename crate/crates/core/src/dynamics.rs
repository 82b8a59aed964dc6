//! Linear-schedule annealing and spectral-gap scans.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigh, ground_state, EigenDecomposition, HermitianOperator, LinalgError, StateVector};

pub const DEFAULT_GAP_POINTS: usize = 15;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("driver and target dimensions differ ({driver} vs {target})")]
    DimensionMismatch { driver: usize, target: usize },
    #[error("driver ground state is degenerate (gap {gap:e})")]
    DegenerateDriver { gap: f64 },
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub total_time: f64,
    pub slices: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { total_time: 80.0, slices: 35 }
    }
}

impl ScheduleConfig {
    pub fn new(total_time: f64, slices: usize) -> Result<Self, DynamicsError> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(DynamicsError::Schedule(format!("T = {total_time} must be positive")));
        }
        if slices == 0 {
            return Err(DynamicsError::Schedule("at least one slice required".into()));
        }
        Ok(Self { total_time, slices })
    }

    /// `s_j = (j + 1/2) / M`.
    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.slices).map(move |j| (j as f64 + 0.5) / self.slices as f64)
    }
}

/// Target operator with its ground space resolved once.
#[derive(Clone, Debug)]
pub struct Target {
    pub operator: HermitianOperator,
    pub energy: f64,
    pub gap: f64,
    /// Orthonormal basis of the ground space.
    pub ground_space: Vec<StateVector>,
}

impl Target {
    pub fn new(operator: HermitianOperator) -> Result<Self, DynamicsError> {
        let eig = eigh(&operator)?;
        let gs = crate::linalg::ground_state_from(&eig);
        let ground_space = (0..gs.multiplicity).map(|k| eig.eigenstate(k)).collect();
        Ok(Self { operator, energy: gs.energy, gap: gs.gap, ground_space })
    }

    pub fn is_degenerate(&self) -> bool {
        self.ground_space.len() > 1
    }

    /// Weight of `psi` in the ground space.
    pub fn fidelity(&self, psi: &StateVector) -> f64 {
        self.ground_space.iter().map(|phi| phi.overlap_probability(psi)).sum::<f64>().min(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct AnnealOutcome {
    pub fidelity: f64,
    pub energy_residual: f64,
    pub final_state: StateVector,
    /// Target ground space has dimension > 1; `fidelity` is then the
    /// projection weight onto the whole space.
    pub degeneracy_flag: bool,
    pub target_energy: f64,
}

/// Anneal from the driver ground state along `H(s) = (1-s) H_D + s H_T`.
pub fn anneal(driver: &HermitianOperator, target: &HermitianOperator, cfg: &ScheduleConfig) -> Result<AnnealOutcome, DynamicsError> {
    anneal_to(driver, &Target::new(target.clone())?, cfg)
}

pub fn anneal_to(driver: &HermitianOperator, target: &Target, cfg: &ScheduleConfig) -> Result<AnnealOutcome, DynamicsError> {
    check_dims(driver, &target.operator)?;
    let start = ground_state(driver)?;
    if start.is_degenerate() {
        return Err(DynamicsError::DegenerateDriver { gap: start.gap });
    }
    let psi = propagate(driver, &target.operator, cfg, start.state)?;
    Ok(outcome(target, psi)?)
}

/// Propagates `psi` through the midpoint schedule.
pub fn propagate(
    driver: &HermitianOperator,
    target: &HermitianOperator,
    cfg: &ScheduleConfig,
    mut psi: StateVector,
) -> Result<StateVector, DynamicsError> {
    check_dims(driver, target)?;
    let dt = cfg.total_time / cfg.slices as f64;
    for s in cfg.midpoints() {
        let h = HermitianOperator::linear_combination(&[(1.0 - s, driver), (s, target)])?;
        let eig = eigh(&h)?;
        psi = crate::linalg::evolve_with(&eig, dt, &psi);
    }
    Ok(psi)
}

fn outcome(target: &Target, psi: StateVector) -> Result<AnnealOutcome, DynamicsError> {
    let energy = target.operator.expectation(&psi)?;
    Ok(AnnealOutcome {
        fidelity: target.fidelity(&psi),
        energy_residual: energy - target.energy,
        final_state: psi,
        degeneracy_flag: target.is_degenerate(),
        target_energy: target.energy,
    })
}

fn check_dims(a: &HermitianOperator, b: &HermitianOperator) -> Result<(), DynamicsError> {
    if a.dim() != b.dim() {
        return Err(DynamicsError::DimensionMismatch { driver: a.dim(), target: b.dim() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScanResult {
    pub grid: Vec<f64>,
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub argmin_s: f64,
}

/// `E_1(s) - E_0(s)` on `points` uniform values of `s` in `[0, 1]`.
pub fn gap_scan(driver: &HermitianOperator, target: &HermitianOperator, points: usize) -> Result<GapScanResult, DynamicsError> {
    check_dims(driver, target)?;
    if points < 2 {
        return Err(DynamicsError::Schedule("gap scan needs at least two points".into()));
    }
    if driver.dim() < 2 {
        return Err(DynamicsError::Schedule("gap undefined in one dimension".into()));
    }
    let grid: Vec<f64> = (0..points).map(|k| k as f64 / (points - 1) as f64).collect();
    let mut gaps = Vec::with_capacity(points);
    for &s in &grid {
        let h = HermitianOperator::linear_combination(&[(1.0 - s, driver), (s, target)])?;
        let eig: EigenDecomposition = eigh(&h)?;
        let values = eig.eigenvalues();
        gaps.push(values[1] - values[0]);
    }
    let (idx, &min_gap) = gaps
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (k, g)| match best {
            Some((_, b)) if b <= g => best,
            _ => Some((k, g)),
        })
        .expect("nonempty grid");
    Ok(GapScanResult { argmin_s: grid[idx], grid, gaps, min_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{hypercube_graph, laplacian};

    fn tf(n: u32) -> HermitianOperator {
        laplacian(&hypercube_graph(n).unwrap(), true).unwrap().operator
    }

    #[test]
    fn identical_hamiltonians_keep_ground_state() {
        let h = tf(3);
        let out = anneal(&h, &h, &ScheduleConfig::new(5.0, 7).unwrap()).unwrap();
        assert!((out.fidelity - 1.0).abs() < 1e-10);
        assert!(out.energy_residual.abs() < 1e-10);
        assert!(!out.degeneracy_flag);
    }

    #[test]
    fn midpoints() {
        let cfg = ScheduleConfig::new(1.0, 4).unwrap();
        assert_eq!(cfg.midpoints().collect::<Vec<_>>(), vec![0.125, 0.375, 0.625, 0.875]);
        assert!(ScheduleConfig::new(0.0, 4).is_err());
        assert!(ScheduleConfig::new(1.0, 0).is_err());
    }

    #[test]
    fn degenerate_target_reports_projection() {
        let driver = tf(2);
        let target = HermitianOperator::from_diagonal(&[0.0, 0.0, 1.0, 1.0]);
        let out = anneal(&driver, &target, &ScheduleConfig::new(30.0, 60).unwrap()).unwrap();
        assert!(out.degeneracy_flag);
        let weight: f64 = out.final_state.probabilities()[..2].iter().sum();
        assert!((out.fidelity - weight).abs() < 1e-12);
    }

    #[test]
    fn degenerate_driver_rejected() {
        let driver = HermitianOperator::from_diagonal(&[0.0, 0.0]);
        let target = HermitianOperator::from_diagonal(&[0.0, 1.0]);
        assert!(matches!(
            anneal(&driver, &target, &ScheduleConfig::default()),
            Err(DynamicsError::DegenerateDriver { .. })
        ));
    }

    #[test]
    fn mismatched_dims() {
        assert!(matches!(
            anneal(&tf(2), &tf(3), &ScheduleConfig::default()),
            Err(DynamicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constant_gap_for_identical_operators() {
        let h = tf(3);
        let scan = gap_scan(&h, &h, DEFAULT_GAP_POINTS).unwrap();
        assert_eq!(scan.grid.len(), 15);
        assert!((scan.grid[13] - 13.0 / 14.0).abs() < 1e-15);
        for g in &scan.gaps {
            assert!((g - 1.0 / 3.0).abs() < 1e-10);
        }
        assert_eq!(scan.argmin_s, scan.grid[scan.gaps.iter().position(|g| *g == scan.min_gap).unwrap()]);
    }

    #[test]
    fn slow_anneal_is_adiabatic() {
        let driver = tf(3);
        let target = HermitianOperator::from_diagonal(&[0.3, 0.9, 0.0, 0.5, 0.7, 0.2, 1.0, 0.4]);
        let out = anneal(&driver, &target, &ScheduleConfig::new(400.0, 400).unwrap()).unwrap();
        assert!(out.fidelity > 0.999);
        assert!(out.energy_residual >= -1e-9);
    }
}
