use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{validate_states, BitString, Ordering, OrderingError, OrderingKind, ValidationReport};

pub const CERTIFICATE_FORMAT: &str = "sector-snake-certificate/1";

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("cannot access certificate: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("certificate failed check '{check}': {detail}")]
    Validation { check: String, detail: String },
    #[error("certificate checksum mismatch: recorded {recorded}, computed {computed}")]
    Checksum { recorded: String, computed: String },
}

/// On-disk form of an ordering. States are printed bit strings in path order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub n: u32,
    pub kind: OrderingKind,
    pub seed: Option<u64>,
    pub search_nodes: Option<u64>,
    pub states: Vec<String>,
    pub validation: ValidationReport,
    pub sha256: String,
}

fn checksum(n: u32, kind: OrderingKind, seed: Option<u64>, states: &[String]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{n}\n{kind}\n{}\n", seed.map_or("-".to_string(), |s| s.to_string())));
    for s in states {
        hasher.update(s.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

impl Certificate {
    pub fn from_ordering(ordering: &Ordering) -> Self {
        let states: Vec<String> = (0..ordering.len()).map(|t| ordering.state(t).to_string()).collect();
        Self {
            format: CERTIFICATE_FORMAT.to_string(),
            n: ordering.n(),
            kind: ordering.kind(),
            seed: ordering.seed(),
            search_nodes: ordering.search_nodes(),
            sha256: checksum(ordering.n(), ordering.kind(), ordering.seed(), &states),
            validation: ordering.validate(ordering.kind().validation_mode()),
            states,
        }
    }

    /// Re-validates the states for the recorded kind, then verifies the
    /// checksum.
    pub fn into_ordering(self) -> Result<Ordering, CertificateError> {
        if self.format != CERTIFICATE_FORMAT {
            return Err(CertificateError::Malformed(format!("unsupported format {:?}", self.format)));
        }
        let states = self
            .states
            .iter()
            .map(|s| BitString::parse(s, self.n).map(BitString::value))
            .collect::<Result<Vec<u32>, OrderingError>>()
            .map_err(|e| CertificateError::Validation { check: "bit_strings".to_string(), detail: e.to_string() })?;
        let report = validate_states(self.n, &states, self.kind.validation_mode());
        if let Some(failure) = report.first_failure() {
            return Err(CertificateError::Validation { check: failure.name.clone(), detail: failure.detail.clone() });
        }
        let computed = checksum(self.n, self.kind, self.seed, &self.states);
        if computed != self.sha256 {
            return Err(CertificateError::Checksum { recorded: self.sha256, computed });
        }
        let mut ordering = Ordering::new(self.n, states, self.kind, self.seed)
            .map_err(|e| CertificateError::Malformed(e.to_string()))?;
        if let Some(nodes) = self.search_nodes {
            ordering = ordering.with_search_nodes(nodes);
        }
        Ok(ordering)
    }
}

pub fn save_certificate(ordering: &Ordering, path: &Path) -> Result<(), CertificateError> {
    let json = serde_json::to_string_pretty(&Certificate::from_ordering(ordering))
        .map_err(|e| CertificateError::Malformed(e.to_string()))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_certificate(path: &Path) -> Result<Ordering, CertificateError> {
    let text = fs::read_to_string(path)?;
    let cert: Certificate = serde_json::from_str(&text).map_err(|e| CertificateError::Malformed(e.to_string()))?;
    cert.into_ordering()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{standard_ordering, strict_ordering, v2_generate};

    #[test]
    fn round_trip_all_kinds() {
        let orderings = vec![
            strict_ordering(5).unwrap(),
            v2_generate(5).unwrap(),
            standard_ordering(OrderingKind::Gray, 5, None).unwrap(),
            standard_ordering(OrderingKind::RandomPerm, 5, Some(3)).unwrap(),
        ];
        for o in orderings {
            let back = Certificate::from_ordering(&o).into_ordering().unwrap();
            assert_eq!(back, o);
        }
    }

    #[test]
    fn swapped_states_fail_adjacency_before_checksum() {
        let mut cert = Certificate::from_ordering(&strict_ordering(5).unwrap());
        cert.states.swap(20, 21);
        match cert.into_ordering() {
            Err(CertificateError::Validation { check, .. }) => assert_eq!(check, "skeleton"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tampered_checksum_detected() {
        let mut cert = Certificate::from_ordering(&strict_ordering(4).unwrap());
        cert.seed = Some(1);
        assert!(matches!(cert.into_ordering(), Err(CertificateError::Checksum { .. })));
    }

    #[test]
    fn bad_bit_string() {
        let mut cert = Certificate::from_ordering(&strict_ordering(4).unwrap());
        cert.states[3] = "10x1".to_string();
        match cert.into_ordering() {
            Err(CertificateError::Validation { check, .. }) => assert_eq!(check, "bit_strings"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
