//! Driver and target Hamiltonians.
//!
//! All operators here are real symmetric. Basis state `x` is the bit string
//! with integer value `x`; path-based quantities are looked up through the
//! ordering's inverse map.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{
    hypercube_graph, laplacian, laplacian_matrix, path_window_graph, sector_graph, GraphError, GraphSpec,
    LaplacianOperator,
};
use crate::linalg::{solve_spd, HermitianOperator, LinalgError};
use crate::ordering::{hamming, skeleton, weight, Ordering, OrderingError};

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("driver graph is disconnected for {0}")]
    DisconnectedDriver(String),
    #[error("cannot rescale a constant potential")]
    ConstantPotential,
}

fn check_unit(name: &str, v: f64) -> Result<(), HamiltonianError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(HamiltonianError::Parameter(format!("{name} = {v} outside [0, 1]")))
    }
}

/// Affine map onto `[0, 1]` using the exact extremes.
pub fn rescale_unit(values: &[f64]) -> Result<Vec<f64>, HamiltonianError> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(HamiltonianError::ConstantPotential);
    }
    Ok(values.iter().map(|v| (v - min) / (max - min)).collect())
}

/// Path-coordinate values `f(t)` placed on basis states: entry `E(t)` gets
/// `f(t)`.
pub fn path_to_basis(ordering: &Ordering, by_position: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; ordering.len()];
    for (t, &x) in ordering.states().iter().enumerate() {
        out[x as usize] = by_position[t];
    }
    out
}

/// Normalized Laplacians of the two ordering-independent driver graphs.
#[derive(Clone, Debug)]
pub struct DriverBasis {
    pub n: u32,
    pub sector: LaplacianOperator,
    pub hypercube: LaplacianOperator,
    sector_graph: GraphSpec,
    hypercube_graph: GraphSpec,
}

impl DriverBasis {
    pub fn new(n: u32) -> Result<Self, HamiltonianError> {
        let sector_graph = sector_graph(n)?;
        let hypercube_graph = hypercube_graph(n)?;
        Ok(Self {
            n,
            sector: laplacian(&sector_graph, true)?,
            hypercube: laplacian(&hypercube_graph, true)?,
            sector_graph,
            hypercube_graph,
        })
    }

    /// Normalized path-window Laplacian for `ordering`.
    pub fn path(&self, ordering: &Ordering, w: usize) -> Result<PathComponent, HamiltonianError> {
        if ordering.n() != self.n {
            return Err(HamiltonianError::Parameter(format!(
                "ordering has n = {}, driver basis n = {}",
                ordering.n(),
                self.n
            )));
        }
        let graph = path_window_graph(ordering, w)?;
        let laplacian = laplacian(&graph, true)?;
        Ok(PathComponent { graph, laplacian })
    }
}

#[derive(Clone, Debug)]
pub struct PathComponent {
    pub graph: GraphSpec,
    pub laplacian: LaplacianOperator,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub w: usize,
}

impl DriverConfig {
    pub fn new(alpha: f64, epsilon: f64, w: usize) -> Result<Self, HamiltonianError> {
        check_unit("alpha", alpha)?;
        check_unit("epsilon", epsilon)?;
        if w == 0 {
            return Err(HamiltonianError::Parameter("w must be at least 1".into()));
        }
        Ok(Self { alpha, epsilon, w })
    }

    /// Weights on (sector, path, hypercube).
    pub fn weights(&self) -> (f64, f64, f64) {
        let keep = 1.0 - self.epsilon;
        (keep * (1.0 - self.alpha), keep * self.alpha, self.epsilon)
    }
}

/// `(1-eps)[(1-alpha) L_sec + alpha L_path] + eps L_TF`.
///
/// Components with zero weight are left out. The union of the graphs that do
/// carry weight must be connected so the uniform state is the unique ground
/// state.
pub fn hybrid_driver(
    cfg: &DriverConfig,
    basis: &DriverBasis,
    path: Option<&PathComponent>,
) -> Result<HermitianOperator, HamiltonianError> {
    let (ws, wp, wt) = cfg.weights();
    let mut terms: Vec<(f64, &HermitianOperator)> = Vec::new();
    let mut graphs: Vec<&GraphSpec> = Vec::new();
    if ws > 0.0 {
        terms.push((ws, &basis.sector.operator));
        graphs.push(&basis.sector_graph);
    }
    if wp > 0.0 {
        let path = path.ok_or_else(|| HamiltonianError::Parameter("alpha > 0 needs a path component".into()))?;
        if path.graph.n != basis.n {
            return Err(HamiltonianError::Parameter("path component size mismatch".into()));
        }
        terms.push((wp, &path.laplacian.operator));
        graphs.push(&path.graph);
    }
    if wt > 0.0 {
        terms.push((wt, &basis.hypercube.operator));
        graphs.push(&basis.hypercube_graph);
    }
    if terms.is_empty() {
        return Err(HamiltonianError::Parameter("driver has no weighted component".into()));
    }
    if !union_connected(basis.n, &graphs) {
        return Err(HamiltonianError::DisconnectedDriver(format!(
            "alpha={}, epsilon={}, w={}",
            cfg.alpha, cfg.epsilon, cfg.w
        )));
    }
    if terms.len() == 1 && terms[0].0 == 1.0 {
        return Ok(terms[0].1.clone());
    }
    Ok(HermitianOperator::linear_combination(&terms)?)
}

fn union_connected(n: u32, graphs: &[&GraphSpec]) -> bool {
    let dim = 1usize << n;
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut components = dim;
    for g in graphs {
        for &(x, y) in g.edges() {
            let (rx, ry) = (find(&mut parent, x as usize), find(&mut parent, y as usize));
            if rx != ry {
                parent[rx] = ry;
                components -= 1;
            }
        }
    }
    components == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierTargetConfig {
    pub w_t: usize,
    pub p_star_frac: f64,
    pub h: f64,
    pub p_b_frac: f64,
    pub sigma: f64,
}

impl Default for BarrierTargetConfig {
    fn default() -> Self {
        Self { w_t: 4, p_star_frac: 0.5, h: 0.35, p_b_frac: 0.35, sigma: 0.06 }
    }
}

impl BarrierTargetConfig {
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        check_unit("p_star_frac", self.p_star_frac)?;
        if self.w_t == 0 || self.h < 0.0 || self.sigma <= 0.0 {
            return Err(HamiltonianError::Parameter(format!("invalid barrier config {self:?}")));
        }
        Ok(())
    }

    pub fn p_star(&self, len: usize) -> usize {
        (self.p_star_frac * (len - 1) as f64).round() as usize
    }
}

/// Rescaled barrier potential, indexed by path position.
pub fn barrier_potential_by_position(cfg: &BarrierTargetConfig, len: usize) -> Result<Vec<f64>, HamiltonianError> {
    cfg.validate()?;
    let span = (len - 1) as f64;
    let p_star = cfg.p_star(len) as f64;
    let p_b = cfg.p_b_frac * span;
    let width = cfg.sigma * len as f64;
    let raw: Vec<f64> = (0..len)
        .map(|p| {
            let p = p as f64;
            (p - p_star).abs() / span + cfg.h * (-((p - p_b) / width).powi(2)).exp()
        })
        .collect();
    rescale_unit(&raw)
}

/// `L_hat(G_{E,w_T}) + diag(V)` with `V` on basis states via `p_E`.
pub fn barrier_target(
    cfg: &BarrierTargetConfig,
    basis: &DriverBasis,
    ordering: &Ordering,
) -> Result<HermitianOperator, HamiltonianError> {
    let path = basis.path(ordering, cfg.w_t)?;
    let potential = path_to_basis(ordering, &barrier_potential_by_position(cfg, ordering.len())?);
    let mut h = path.laplacian.operator;
    h.add_diagonal(&potential)?;
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalFamily {
    IndexWell,
    SectorWell,
    Mix,
    BarrierPath,
}

impl DiagonalFamily {
    pub const ALL: [DiagonalFamily; 4] =
        [DiagonalFamily::IndexWell, DiagonalFamily::SectorWell, DiagonalFamily::Mix, DiagonalFamily::BarrierPath];

    pub fn name(self) -> &'static str {
        match self {
            DiagonalFamily::IndexWell => "index_well",
            DiagonalFamily::SectorWell => "sector_well",
            DiagonalFamily::Mix => "mix",
            DiagonalFamily::BarrierPath => "barrier_path",
        }
    }
}

impl fmt::Display for DiagonalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiagonalFamily {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiagonalFamily::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().replace('-', "_"))
            .ok_or_else(|| HamiltonianError::Parameter(format!("unknown diagonal family {s:?}")))
    }
}

/// Rescaled family cost by path position. Sector distances use the strict
/// skeleton at every position, whatever the encoding.
pub fn diagonal_cost_by_position(family: DiagonalFamily, n: u32, t_star: usize) -> Result<Vec<f64>, HamiltonianError> {
    let len = 1usize << n;
    if t_star >= len {
        return Err(HamiltonianError::Parameter(format!("t_star = {t_star} outside [0, {len})")));
    }
    let pi = skeleton(n)?.weights;
    let span = (len - 1) as f64;
    let centre = span / 2.0;
    let raw: Vec<f64> = (0..len)
        .map(|t| {
            let d_idx = t.abs_diff(t_star) as f64 / span;
            let d_sec = pi[t].abs_diff(pi[t_star]) as f64 / n as f64;
            match family {
                DiagonalFamily::IndexWell => d_idx,
                DiagonalFamily::SectorWell => d_sec + 0.02 * d_idx,
                DiagonalFamily::Mix => 0.5 * d_sec + 0.5 * d_idx,
                DiagonalFamily::BarrierPath if t == t_star => 0.0,
                DiagonalFamily::BarrierPath => d_idx + 0.35 * (-((t as f64 - centre) / (0.10 * len as f64)).powi(2)).exp(),
            }
        })
        .collect();
    rescale_unit(&raw)
}

/// Family cost placed on basis states through `encoding`.
pub fn diagonal_cost(
    family: DiagonalFamily,
    encoding: &Ordering,
    t_star: usize,
) -> Result<Vec<f64>, HamiltonianError> {
    Ok(path_to_basis(encoding, &diagonal_cost_by_position(family, encoding.n(), t_star)?))
}

/// `round(f (N - 1))`, half away from zero.
pub fn target_index(fraction: f64, len: usize) -> usize {
    (fraction * (len - 1) as f64).round() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixtureClass {
    SectorWellR1,
    MixSectorPath,
}

/// Weighted sum `a (L_sec + s diag(well)) + b (L_hat(G_{E,w_T}) + diag(V))`
/// where `well` is the rescaled distance of `wt(x)` from the well centre and
/// `V` the barrier potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub sector_weight: f64,
    pub path_weight: f64,
    pub well_scale: f64,
    /// Defaults to `round(n / 2)`.
    pub well_centre: Option<u32>,
    pub barrier: BarrierTargetConfig,
}

impl MixtureParams {
    pub fn for_class(class: MixtureClass) -> Self {
        let (sector_weight, path_weight) = match class {
            MixtureClass::SectorWellR1 => (1.0, 0.0),
            MixtureClass::MixSectorPath => (0.5, 0.5),
        };
        Self { sector_weight, path_weight, well_scale: 1.0, well_centre: None, barrier: BarrierTargetConfig::default() }
    }

    pub fn describe(&self, n: u32) -> String {
        format!(
            "{} * (L_sec + {} * diag(|wt - {}| rescaled)) + {} * (L_path(w={}) + diag(barrier h={}, p_star_frac={}))",
            self.sector_weight,
            self.well_scale,
            self.centre(n),
            self.path_weight,
            self.barrier.w_t,
            self.barrier.h,
            self.barrier.p_star_frac
        )
    }

    fn centre(&self, n: u32) -> u32 {
        self.well_centre.unwrap_or((n as f64 / 2.0).round() as u32)
    }
}

pub fn sector_well(n: u32, centre: u32) -> Result<Vec<f64>, HamiltonianError> {
    let raw: Vec<f64> = (0..1u32 << n).map(|x| weight(x).abs_diff(centre) as f64).collect();
    rescale_unit(&raw)
}

pub fn mixture_target(
    params: &MixtureParams,
    basis: &DriverBasis,
    ordering: &Ordering,
) -> Result<HermitianOperator, HamiltonianError> {
    let n = basis.n;
    let mut terms: Vec<(f64, HermitianOperator)> = Vec::new();
    if params.sector_weight != 0.0 {
        let mut h = basis.sector.operator.clone();
        if params.well_scale != 0.0 {
            let well: Vec<f64> = sector_well(n, params.centre(n))?.iter().map(|v| v * params.well_scale).collect();
            h.add_diagonal(&well)?;
        }
        terms.push((params.sector_weight, h));
    }
    if params.path_weight != 0.0 {
        terms.push((params.path_weight, barrier_target(&params.barrier, basis, ordering)?));
    }
    if terms.is_empty() {
        return Ok(HermitianOperator::zeros(1 << n));
    }
    let refs: Vec<(f64, &HermitianOperator)> = terms.iter().map(|(c, h)| (*c, h)).collect();
    Ok(HermitianOperator::linear_combination(&refs)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorModelConfig {
    pub n_sensors: u32,
    pub n_grid: usize,
    pub lengthscale: f64,
    pub noise: f64,
    pub budget: u32,
    pub penalty: f64,
    pub laplacian_weight: f64,
    pub window: usize,
}

impl Default for SensorModelConfig {
    fn default() -> Self {
        Self {
            n_sensors: 8,
            n_grid: 16,
            lengthscale: 0.25,
            noise: 0.08,
            budget: 4,
            penalty: 0.20,
            laplacian_weight: 0.6,
            window: 4,
        }
    }
}

impl SensorModelConfig {
    /// Sensor `i` (1-based) sits at `(i - 1) / (n_sensors - 1)`.
    pub fn sensor_locations(&self) -> Vec<f64> {
        let m = self.n_sensors.max(2) - 1;
        (0..self.n_sensors).map(|i| i as f64 / m as f64).collect()
    }

    pub fn grid_locations(&self) -> Vec<f64> {
        let m = self.n_grid.max(2) - 1;
        (0..self.n_grid).map(|j| j as f64 / m as f64).collect()
    }

    fn kernel(&self, a: f64, b: f64) -> f64 {
        (-(a - b).powi(2) / (2.0 * self.lengthscale * self.lengthscale)).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensorCost {
    /// `tr Sigma_post(S)` for every subset `S`, indexed by bit string.
    pub posterior_trace: Vec<f64>,
    pub raw: Vec<f64>,
    pub rescaled: Vec<f64>,
}

/// Posterior covariance on the grid after observing the sensors in `subset`.
pub fn sensor_posterior(cfg: &SensorModelConfig, subset: u32) -> Result<Vec<f64>, HamiltonianError> {
    let sensors = cfg.sensor_locations();
    let grid = cfg.grid_locations();
    let g = grid.len();
    let chosen: Vec<f64> = (0..cfg.n_sensors).filter(|i| subset >> i & 1 == 1).map(|i| sensors[i as usize]).collect();
    let mut post: Vec<f64> = (0..g * g).map(|k| cfg.kernel(grid[k / g], grid[k % g])).collect();
    let s = chosen.len();
    if s == 0 {
        return Ok(post);
    }
    let mut kss = vec![0.0; s * s];
    for i in 0..s {
        for j in 0..s {
            kss[i * s + j] = cfg.kernel(chosen[i], chosen[j]) + if i == j { cfg.noise * cfg.noise } else { 0.0 };
        }
    }
    let mut ksg = vec![0.0; s * g];
    for i in 0..s {
        for j in 0..g {
            ksg[i * g + j] = cfg.kernel(chosen[i], grid[j]);
        }
    }
    let solved = solve_spd(&kss, s, &ksg, g)?;
    for a in 0..g {
        for b in 0..g {
            let correction: f64 = (0..s).map(|i| ksg[i * g + a] * solved[i * g + b]).sum();
            post[a * g + b] -= correction;
        }
    }
    Ok(post)
}

pub fn sensor_cost(cfg: &SensorModelConfig) -> Result<SensorCost, HamiltonianError> {
    if cfg.lengthscale <= 0.0 || cfg.noise <= 0.0 || cfg.n_sensors == 0 || cfg.n_sensors > 9 {
        return Err(HamiltonianError::Parameter(format!("invalid sensor config {cfg:?}")));
    }
    let g = cfg.n_grid;
    let prior_trace = g as f64;
    let mut posterior_trace = Vec::with_capacity(1 << cfg.n_sensors);
    let mut raw = Vec::with_capacity(1 << cfg.n_sensors);
    for subset in 0..1u32 << cfg.n_sensors {
        let post = sensor_posterior(cfg, subset)?;
        let trace: f64 = (0..g).map(|k| post[k * g + k]).sum();
        let size_gap = (weight(subset) as f64 - cfg.budget as f64) / cfg.n_sensors as f64;
        posterior_trace.push(trace);
        raw.push(trace / prior_trace + cfg.penalty * size_gap * size_gap);
    }
    let rescaled = rescale_unit(&raw)?;
    Ok(SensorCost { posterior_trace, raw, rescaled })
}

/// `c L_hat(G_{E,w}) + diag(C_sens)`.
pub fn sensor_target(
    cfg: &SensorModelConfig,
    basis: &DriverBasis,
    ordering: &Ordering,
) -> Result<HermitianOperator, HamiltonianError> {
    let cost = sensor_cost(cfg)?;
    let path = basis.path(ordering, cfg.window)?;
    let mut h = path.laplacian.operator.scaled(cfg.laplacian_weight);
    h.add_diagonal(&cost.rescaled)?;
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandingFamily {
    SectorDense,
    SameSectorSwap,
    PathWindow,
    MixSectorPath,
    LocalHopping1d,
    LocalPairCreation1d,
}

impl BandingFamily {
    pub fn name(self) -> &'static str {
        match self {
            BandingFamily::SectorDense => "sector_dense",
            BandingFamily::SameSectorSwap => "same_sector_swap",
            BandingFamily::PathWindow => "path_window",
            BandingFamily::MixSectorPath => "mix_sector_path",
            BandingFamily::LocalHopping1d => "local_hopping_1d",
            BandingFamily::LocalPairCreation1d => "local_pair_creation_1d",
        }
    }

    pub fn needs_ordering(self) -> bool {
        matches!(self, BandingFamily::PathWindow | BandingFamily::MixSectorPath)
    }
}

fn pair_matrix(n: u32, coupled: impl Fn(u32, u32) -> bool) -> Vec<f64> {
    let dim = 1usize << n;
    let mut a = vec![0.0; dim * dim];
    for x in 0..dim as u32 {
        for y in 0..dim as u32 {
            if x != y && coupled(x, y) {
                a[x as usize * dim + y as usize] = 1.0;
            }
        }
    }
    a
}

fn adjacency_from_laplacian(l: Vec<f64>, dim: usize) -> Vec<f64> {
    l.into_iter()
        .enumerate()
        .map(|(k, v)| if k / dim == k % dim { 0.0 } else { -v })
        .collect()
}

/// Off-diagonal Hamiltonian families used for banding comparisons. The
/// mixture adds the sector and path adjacencies after scaling each to unit
/// total weight. The 1D families act on an open chain of sites `1..n`.
pub fn banding_family(
    family: BandingFamily,
    n: u32,
    ordering: Option<&Ordering>,
    w: usize,
) -> Result<HermitianOperator, HamiltonianError> {
    let dim = 1usize << n;
    let path_adjacency = || -> Result<Vec<f64>, HamiltonianError> {
        let o = ordering.ok_or_else(|| HamiltonianError::Parameter(format!("{} needs an ordering", family.name())))?;
        if o.n() != n {
            return Err(HamiltonianError::Parameter("ordering size mismatch".into()));
        }
        Ok(adjacency_from_laplacian(laplacian_matrix(&path_window_graph(o, w)?), dim))
    };
    let sector_adjacency = || -> Result<Vec<f64>, HamiltonianError> {
        Ok(adjacency_from_laplacian(laplacian_matrix(&sector_graph(n)?), dim))
    };
    let chain_pairs = |x: u32, y: u32, hop: bool| {
        let diff = x ^ y;
        (0..n.saturating_sub(1)).any(|i| {
            let mask = 0b11 << i;
            diff == mask && {
                let bits = x >> i & 0b11;
                if hop {
                    bits == 0b01 || bits == 0b10
                } else {
                    bits == 0b00 || bits == 0b11
                }
            }
        })
    };
    let matrix = match family {
        BandingFamily::SectorDense => sector_adjacency()?,
        BandingFamily::SameSectorSwap => pair_matrix(n, |x, y| weight(x) == weight(y) && hamming(x, y) == 2),
        BandingFamily::PathWindow => path_adjacency()?,
        BandingFamily::MixSectorPath => {
            let s = sector_adjacency()?;
            let p = path_adjacency()?;
            let (ts, tp): (f64, f64) = (s.iter().sum(), p.iter().sum());
            s.iter().zip(&p).map(|(a, b)| 0.5 * a / ts + 0.5 * b / tp).collect()
        }
        BandingFamily::LocalHopping1d => pair_matrix(n, |x, y| chain_pairs(x, y, true)),
        BandingFamily::LocalPairCreation1d => pair_matrix(n, |x, y| chain_pairs(x, y, false)),
    };
    Ok(HermitianOperator::from_real(dim, matrix)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, ground_state, StateVector};
    use crate::ordering::{standard_ordering, strict_ordering, v2_generate, OrderingKind};

    fn max_diff(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
        let (a, b) = (a.as_real().unwrap(), b.as_real().unwrap());
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn driver_limits() {
        let basis = DriverBasis::new(5).unwrap();
        let o = strict_ordering(5).unwrap();
        let path = basis.path(&o, 4).unwrap();
        let sec = hybrid_driver(&DriverConfig::new(0.0, 0.0, 4).unwrap(), &basis, Some(&path)).unwrap();
        assert_eq!(max_diff(&sec, &basis.sector.operator), 0.0);
        let p = hybrid_driver(&DriverConfig::new(1.0, 0.0, 4).unwrap(), &basis, Some(&path)).unwrap();
        assert_eq!(max_diff(&p, &path.laplacian.operator), 0.0);
        let tf = hybrid_driver(&DriverConfig::new(0.3, 1.0, 4).unwrap(), &basis, None).unwrap();
        assert_eq!(max_diff(&tf, &basis.hypercube.operator), 0.0);
        assert!(hybrid_driver(&DriverConfig::new(0.5, 0.1, 4).unwrap(), &basis, None).is_err());
        assert!(DriverConfig::new(1.5, 0.0, 4).is_err());
    }

    #[test]
    fn driver_ground_state_is_uniform() {
        let basis = DriverBasis::new(5).unwrap();
        let o = strict_ordering(5).unwrap();
        let path = basis.path(&o, 3).unwrap();
        let h = hybrid_driver(&DriverConfig::new(0.4, 0.2, 3).unwrap(), &basis, Some(&path)).unwrap();
        let gs = ground_state(&h).unwrap();
        assert!(gs.energy.abs() < 1e-10);
        assert!(!gs.is_degenerate());
        assert!((gs.state.overlap_probability(&StateVector::uniform(32)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ramp_when_barrier_off() {
        let cfg = BarrierTargetConfig { h: 0.0, p_star_frac: 0.0, ..Default::default() };
        let v = barrier_potential_by_position(&cfg, 32).unwrap();
        for (p, value) in v.iter().enumerate() {
            assert!((value - p as f64 / 31.0).abs() < 1e-15);
        }
    }

    #[test]
    fn barrier_rescaled_to_unit_interval() {
        let v = barrier_potential_by_position(&BarrierTargetConfig::default(), 256).unwrap();
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, 0.0);
        assert_eq!(max, 1.0);
        assert_eq!(BarrierTargetConfig::default().p_star(256), 128);
    }

    #[test]
    fn barrier_target_two_bits_by_hand() {
        // strict n=2 is 00,01,11,10; with w_T=1 the path graph is the 4-cycle
        // minus the 10-00 edge, a path with lambda_max = 2 + sqrt(2).
        let o = strict_ordering(2).unwrap();
        let basis = DriverBasis::new(2).unwrap();
        let cfg = BarrierTargetConfig { w_t: 1, h: 0.0, p_star_frac: 0.0, ..Default::default() };
        let h = barrier_target(&cfg, &basis, &o).unwrap();
        let lmax = 2.0 + 2f64.sqrt();
        let mut m = vec![0.0; 16];
        let path = [0usize, 1, 3, 2];
        for k in 0..3 {
            let (a, b) = (path[k], path[k + 1]);
            m[a * 4 + b] -= 1.0 / lmax;
            m[b * 4 + a] -= 1.0 / lmax;
            m[a * 4 + a] += 1.0 / lmax;
            m[b * 4 + b] += 1.0 / lmax;
        }
        for (k, &x) in path.iter().enumerate() {
            m[x * 4 + x] += k as f64 / 3.0;
        }
        let expected = HermitianOperator::from_real(4, m).unwrap();
        assert!(max_diff(&h, &expected) < 1e-14);
        let e0 = eigh(&h).unwrap().eigenvalues()[0];
        assert!(e0 >= 0.0 && e0 < 0.5);
    }

    #[test]
    fn diagonal_families_minimum_at_target() {
        let strict = strict_ordering(6).unwrap();
        for family in DiagonalFamily::ALL {
            for t_star in [0, 16, 32, 47, 63] {
                let c = diagonal_cost_by_position(family, 6, t_star).unwrap();
                assert!(c.iter().all(|&v| (0.0..=1.0).contains(&v)));
                let min = c.iter().copied().fold(f64::INFINITY, f64::min);
                assert_eq!(c[t_star], min, "{family} t*={t_star}");
                let on_basis = diagonal_cost(family, &strict, t_star).unwrap();
                assert_eq!(on_basis[strict.states()[t_star] as usize], c[t_star]);
            }
        }
        assert!(diagonal_cost_by_position(DiagonalFamily::Mix, 6, 64).is_err());
    }

    #[test]
    fn index_well_from_origin() {
        let c = diagonal_cost_by_position(DiagonalFamily::IndexWell, 4, 0).unwrap();
        for (t, v) in c.iter().enumerate() {
            assert!((v - t as f64 / 15.0).abs() < 1e-15);
        }
    }

    #[test]
    fn target_index_rounds_half_up() {
        assert_eq!(target_index(0.5, 256), 128);
        assert_eq!(target_index(0.25, 256), 64);
        assert_eq!(target_index(0.75, 256), 191);
    }

    #[test]
    fn mixture_reduces_to_sector_laplacian() {
        let basis = DriverBasis::new(4).unwrap();
        let o = strict_ordering(4).unwrap();
        let mut p = MixtureParams::for_class(MixtureClass::SectorWellR1);
        p.well_scale = 0.0;
        let h = mixture_target(&p, &basis, &o).unwrap();
        assert_eq!(max_diff(&h, &basis.sector.operator), 0.0);
        let mix = mixture_target(&MixtureParams::for_class(MixtureClass::MixSectorPath), &basis, &o).unwrap();
        assert!(eigh(&mix).unwrap().eigenvalues()[0] >= -1e-12);
    }

    #[test]
    fn sensor_empty_set_cost() {
        let cost = sensor_cost(&SensorModelConfig::default()).unwrap();
        assert!((cost.raw[0] - 1.05).abs() < 1e-12);
        assert_eq!(cost.rescaled.len(), 256);
    }

    #[test]
    fn sensor_posterior_symmetric_psd() {
        let cfg = SensorModelConfig::default();
        for subset in [0u32, 1, 0b1010_0101, 255] {
            let post = sensor_posterior(&cfg, subset).unwrap();
            let h = HermitianOperator::from_real(16, post).unwrap();
            assert!(eigh(&h).unwrap().eigenvalues()[0] > -1e-10);
        }
    }

    #[test]
    fn banding_locality() {
        let hop = banding_family(BandingFamily::LocalHopping1d, 5, None, 0).unwrap();
        let pair = banding_family(BandingFamily::LocalPairCreation1d, 5, None, 0).unwrap();
        for x in 0..32usize {
            for y in 0..32usize {
                if hop.get(x, y).re != 0.0 {
                    assert_eq!(weight(x as u32), weight(y as u32));
                }
                if pair.get(x, y).re != 0.0 {
                    assert_eq!(weight(x as u32).abs_diff(weight(y as u32)), 2);
                }
            }
        }
        // open chain on 5 sites: 4 bonds, each coupling 2^3 * 2 ordered pairs per direction
        let count = hop.as_real().unwrap().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(count, 4 * 16);
        assert!(banding_family(BandingFamily::PathWindow, 5, None, 4).is_err());
    }

    #[test]
    fn banding_mix_components_have_unit_weight() {
        let o = v2_generate(5).unwrap();
        let mix = banding_family(BandingFamily::MixSectorPath, 5, Some(&o), 4).unwrap();
        let total: f64 = mix.as_real().unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let g = standard_ordering(OrderingKind::Gray, 5, None).unwrap();
        assert!(banding_family(BandingFamily::SameSectorSwap, 5, Some(&g), 4).is_ok());
    }
}
