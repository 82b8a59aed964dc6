//! How far off-diagonal weight sits from the diagonal under an ordering.

use serde::Serialize;

use super::{mean_std, ser_sig6, ExperimentError, Result};
use crate::hamiltonian::{banding_family, BandingFamily};
use crate::linalg::HermitianOperator;
use crate::ordering::{build_ordering, standard_ordering, Ordering, OrderingKind};
use crate::rng::derive_seed;

pub const DEFAULT_RANDOM_SAMPLES: usize = 50;
pub const DEFAULT_BASE_SEED: u64 = 20_240_818;
pub const OFF_BAND_WINDOW: usize = 4;

fn weighted_distances(h: &HermitianOperator, ordering: &Ordering) -> Result<Vec<(f64, usize)>> {
    if h.dim() != ordering.len() {
        return Err(ExperimentError::Config(format!(
            "operator dimension {} does not match ordering length {}",
            h.dim(),
            ordering.len()
        )));
    }
    let dim = h.dim();
    let mut out = Vec::new();
    for x in 0..dim {
        for y in x + 1..dim {
            let weight = h.get(x, y).norm();
            if weight != 0.0 {
                out.push((weight, ordering.position(x as u32).abs_diff(ordering.position(y as u32))));
            }
        }
    }
    if out.is_empty() {
        return Err(ExperimentError::Config("operator has no off-diagonal weight".into()));
    }
    Ok(out)
}

/// `sum |H_xy| |p(x) - p(y)| / sum |H_xy|` over `x < y`.
pub fn mean_band(h: &HermitianOperator, ordering: &Ordering) -> Result<f64> {
    let pairs = weighted_distances(h, ordering)?;
    let total: f64 = pairs.iter().map(|p| p.0).sum();
    Ok(pairs.iter().map(|&(w, d)| w * d as f64).sum::<f64>() / total)
}

/// Fraction of off-diagonal weight at path distance greater than `w`.
pub fn off_band(h: &HermitianOperator, ordering: &Ordering, w: usize) -> Result<f64> {
    let pairs = weighted_distances(h, ordering)?;
    let total: f64 = pairs.iter().map(|p| p.0).sum();
    let tail: f64 = pairs.iter().filter(|p| p.1 > w).map(|p| p.0).sum();
    // An empty float sum is -0.0.
    Ok((tail + 0.0) / total)
}

/// Table rows: family label, family, and which ordering (if any) defines it.
pub fn banding_rows() -> Vec<(&'static str, BandingFamily, Option<OrderingKind>)> {
    vec![
        ("sector_dense", BandingFamily::SectorDense, None),
        ("same_sector_swap", BandingFamily::SameSectorSwap, None),
        ("path_original_w4", BandingFamily::PathWindow, Some(OrderingKind::Strict)),
        ("path_v2_w4", BandingFamily::PathWindow, Some(OrderingKind::V2)),
        ("mix_sector_original_path", BandingFamily::MixSectorPath, Some(OrderingKind::Strict)),
        ("mix_sector_v2_path", BandingFamily::MixSectorPath, Some(OrderingKind::V2)),
        ("local_hopping_1d", BandingFamily::LocalHopping1d, None),
        ("local_pair_creation_1d", BandingFamily::LocalPairCreation1d, None),
    ]
}

pub const DETERMINISTIC_COLUMNS: [OrderingKind; 5] =
    [OrderingKind::Strict, OrderingKind::V2, OrderingKind::Binary, OrderingKind::Gray, OrderingKind::WeightBlock];

#[derive(Clone, Debug, Serialize)]
pub struct BandingRow {
    pub family: String,
    pub ordering: String,
    pub samples: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub mean_band: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub mean_band_std: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub off_band_w4: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandingSampleRow {
    pub family: String,
    pub sample: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_sig6")]
    pub mean_band: f64,
}

pub fn run_banding(n: u32, samples: usize, base_seed: u64) -> Result<(Vec<BandingRow>, Vec<BandingSampleRow>)> {
    let columns = DETERMINISTIC_COLUMNS
        .iter()
        .map(|&k| build_ordering(k, n, None))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let randoms = (0..samples)
        .map(|i| {
            let seed = derive_seed(base_seed, i as u64);
            standard_ordering(OrderingKind::RandomPerm, n, Some(seed)).map(|o| (seed, o))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut sample_rows = Vec::new();
    for (label, family, defining) in banding_rows() {
        let defining = defining.map(|k| &columns[DETERMINISTIC_COLUMNS.iter().position(|&c| c == k).expect("column")]);
        let h = banding_family(family, n, defining, OFF_BAND_WINDOW)?;
        for o in &columns {
            rows.push(BandingRow {
                family: label.into(),
                ordering: o.kind().name().into(),
                samples: 1,
                mean_band: mean_band(&h, o)?,
                mean_band_std: 0.0,
                off_band_w4: off_band(&h, o, OFF_BAND_WINDOW)?,
            });
        }
        if samples > 0 {
            let mut bands = Vec::with_capacity(samples);
            let mut offs = Vec::with_capacity(samples);
            for (i, (seed, o)) in randoms.iter().enumerate() {
                let band = mean_band(&h, o)?;
                bands.push(band);
                offs.push(off_band(&h, o, OFF_BAND_WINDOW)?);
                sample_rows.push(BandingSampleRow { family: label.into(), sample: i, seed: *seed, mean_band: band });
            }
            let (mean, std) = mean_std(&bands);
            rows.push(BandingRow {
                family: label.into(),
                ordering: OrderingKind::RandomPerm.name().into(),
                samples,
                mean_band: mean,
                mean_band_std: std,
                off_band_w4: mean_std(&offs).0,
            });
        }
    }
    Ok((rows, sample_rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::strict_ordering;

    #[test]
    fn single_pair() {
        let o = standard_ordering(OrderingKind::Binary, 2, None).unwrap();
        let mut m = vec![0.0; 16];
        m[3] = 2.0;
        m[12] = 2.0;
        m[1] = 1.0;
        m[4] = 1.0;
        let h = HermitianOperator::from_real(4, m).unwrap();
        assert!((mean_band(&h, &o).unwrap() - (2.0 * 3.0 + 1.0) / 3.0).abs() < 1e-15);
        assert!((off_band(&h, &o, 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_operator_rejected() {
        let o = strict_ordering(2).unwrap();
        let h = HermitianOperator::from_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        assert!(mean_band(&h, &o).is_err());
        let small = HermitianOperator::from_diagonal(&[1.0, 2.0]);
        assert!(mean_band(&small, &o).is_err());
    }
}
