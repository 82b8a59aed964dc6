//! Orderings of the Boolean hypercube.
//!
//! An ordering is a bijection between path positions `0..2^n` and `n`-bit
//! strings. Element `i` (1-based) of the subset view is bit `i - 1` of the
//! integer value, and printed bit strings put element `n` leftmost.
//!
//! The sector-snake orderings (`strict`, `v2`, and the sector-preserving random
//! control) share a Hamming-weight skeleton fixed by the active counts
//! `a_0 = 1, a_k = C(n, k) - a_{k-1} + 1` and the prefix
//! `{}, {1}, {1,2}, {2}, ..., {n-1,n}, {n}`.

mod certificate;
mod strict;

pub use certificate::{load_certificate, save_certificate, Certificate, CertificateError, CERTIFICATE_FORMAT};
pub use strict::{strict_generate, AttemptLog, GeneratorBudget, StopReason, StrictOutcome};

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::seeded_rng;

pub const MAX_SKELETON_N: u32 = 16;
pub const MAX_STRICT_N: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrderingError {
    #[error("n = {n} outside supported range {min}..={max}")]
    Domain { n: u32, min: u32, max: u32 },
    #[error("ordering kind {0} requires a seed")]
    MissingSeed(OrderingKind),
    #[error("ordering kind {0} is produced by its own generator")]
    NotStandard(OrderingKind),
    #[error("invalid ordering: {0}")]
    Invalid(String),
    #[error("unknown ordering kind {0:?}")]
    UnknownKind(String),
    #[error("invalid bit string {0:?}")]
    BadBitString(String),
}

pub(crate) fn check_n(n: u32, min: u32, max: u32) -> Result<(), OrderingError> {
    if (min..=max).contains(&n) {
        Ok(())
    } else {
        Err(OrderingError::Domain { n, min, max })
    }
}

#[inline]
pub fn weight(x: u32) -> u32 {
    x.count_ones()
}

#[inline]
pub fn hamming(x: u32, y: u32) -> u32 {
    (x ^ y).count_ones()
}

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// An `n`-bit string; bit `i - 1` set means element `i` is selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u32,
    n: u32,
}

impl BitString {
    pub fn new(value: u32, n: u32) -> Result<Self, OrderingError> {
        if n == 0 || n > 31 || value >= (1u32 << n) {
            return Err(OrderingError::BadBitString(format!("value {value} with n = {n}")));
        }
        Ok(Self { value, n })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn weight(self) -> u32 {
        weight(self.value)
    }

    /// Selected elements, ascending, 1-based.
    pub fn elements(self) -> Vec<u32> {
        (0..self.n).filter(|i| self.value >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// Compact subset label such as `134`, or `∅`. Elements above 9 are
    /// comma separated.
    pub fn subset_label(self) -> String {
        let elements = self.elements();
        if elements.is_empty() {
            return "∅".to_string();
        }
        let sep = if self.n > 9 { "," } else { "" };
        elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(sep)
    }

    pub fn parse(text: &str, n: u32) -> Result<Self, OrderingError> {
        if text.len() != n as usize || !text.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(OrderingError::BadBitString(text.to_string()));
        }
        let value = u32::from_str_radix(text, 2).map_err(|_| OrderingError::BadBitString(text.to_string()))?;
        Self::new(value, n)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.n as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingKind {
    Strict,
    V2,
    Binary,
    Gray,
    WeightBlock,
    RandomPerm,
    SectorPreservingRandom,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 7] = [
        OrderingKind::Strict,
        OrderingKind::V2,
        OrderingKind::Binary,
        OrderingKind::Gray,
        OrderingKind::WeightBlock,
        OrderingKind::RandomPerm,
        OrderingKind::SectorPreservingRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingKind::Strict => "strict",
            OrderingKind::V2 => "v2",
            OrderingKind::Binary => "binary",
            OrderingKind::Gray => "gray",
            OrderingKind::WeightBlock => "weight_block",
            OrderingKind::RandomPerm => "random_perm",
            OrderingKind::SectorPreservingRandom => "sector_preserving_random",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, OrderingKind::RandomPerm | OrderingKind::SectorPreservingRandom)
    }

    /// Validation mode implied by the kind's construction guarantees.
    pub fn validation_mode(self) -> ValidationMode {
        match self {
            OrderingKind::Strict => ValidationMode::Strict,
            OrderingKind::V2 | OrderingKind::SectorPreservingRandom => ValidationMode::SkeletonOnly,
            _ => ValidationMode::BijectionOnly,
        }
    }
}

impl fmt::Display for OrderingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingKind {
    type Err = OrderingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let kind = match key.as_str() {
            "strict" | "orig" | "original" => OrderingKind::Strict,
            "v2" => OrderingKind::V2,
            "binary" => OrderingKind::Binary,
            "gray" => OrderingKind::Gray,
            "weight_block" => OrderingKind::WeightBlock,
            "random_perm" | "random" => OrderingKind::RandomPerm,
            "sector_preserving_random" | "sector_preserving" => OrderingKind::SectorPreservingRandom,
            _ => return Err(OrderingError::UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// Bijection `E_n` from path positions to bit strings, with its inverse `p_E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    n: u32,
    states: Vec<u32>,
    positions: Vec<u32>,
    kind: OrderingKind,
    seed: Option<u64>,
    search_nodes: Option<u64>,
}

impl Ordering {
    /// Builds an ordering, rejecting anything that is not a bijection onto
    /// `{0,1}^n`.
    pub fn new(n: u32, states: Vec<u32>, kind: OrderingKind, seed: Option<u64>) -> Result<Self, OrderingError> {
        check_n(n, 1, 20)?;
        let len = 1usize << n;
        if states.len() != len {
            return Err(OrderingError::Invalid(format!("expected {len} states, found {}", states.len())));
        }
        let mut positions = vec![u32::MAX; len];
        for (t, &x) in states.iter().enumerate() {
            let slot = positions
                .get_mut(x as usize)
                .ok_or_else(|| OrderingError::Invalid(format!("state {x} out of range at position {t}")))?;
            if *slot != u32::MAX {
                return Err(OrderingError::Invalid(format!("state {x} repeated at positions {} and {t}", *slot)));
            }
            *slot = t as u32;
        }
        Ok(Self { n, states, positions, kind, seed, search_nodes: None })
    }

    pub(crate) fn with_search_nodes(mut self, nodes: u64) -> Self {
        self.search_nodes = Some(nodes);
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn kind(&self) -> OrderingKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn search_nodes(&self) -> Option<u64> {
        self.search_nodes
    }

    /// `E_n(t)` as integers, in path order.
    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state(&self, t: usize) -> BitString {
        BitString { value: self.states[t], n: self.n }
    }

    /// Path coordinate `p_E(x)`.
    pub fn position(&self, x: u32) -> usize {
        self.positions[x as usize] as usize
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn weights(&self) -> Vec<u32> {
        self.states.iter().map(|&x| weight(x)).collect()
    }

    pub fn label(&self) -> String {
        match self.seed {
            Some(seed) => format!("{}[seed={seed}]", self.kind),
            None => self.kind.to_string(),
        }
    }

    pub fn validate(&self, mode: ValidationMode) -> ValidationReport {
        validate_states(self.n, &self.states, mode)
    }

    pub fn diagnostics(&self) -> OrderingDiagnostics {
        diagnostics(&self.states)
    }
}

/// `a_0 .. a_n`.
pub fn active_counts(n: u32) -> Result<Vec<i64>, OrderingError> {
    check_n(n, 1, MAX_SKELETON_N)?;
    let mut counts = vec![1i64];
    for k in 1..=n {
        let prev = *counts.last().expect("nonempty");
        counts.push(binomial(n, k) as i64 - prev + 1);
    }
    Ok(counts)
}

/// Hamming-weight skeleton `j_0 .. j_{2^n - 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub n: u32,
    pub weights: Vec<u32>,
    pub active_counts: Vec<i64>,
}

pub fn skeleton(n: u32) -> Result<Skeleton, OrderingError> {
    let counts = active_counts(n)?;
    let mut weights = Vec::with_capacity(1 << n);
    for k in 0..n {
        let active = counts[k as usize].max(0);
        for r in 0..active {
            weights.push(k);
            if r + 1 < active {
                weights.push(k + 1);
            }
        }
    }
    if counts[n as usize] == 1 {
        weights.push(n);
    }
    if weights.len() != 1 << n {
        return Err(OrderingError::Invalid(format!(
            "active counts {counts:?} do not produce a skeleton of length {}",
            1u64 << n
        )));
    }
    Ok(Skeleton { n, weights, active_counts: counts })
}

/// `{}, {1}, {1,2}, {2}, {2,3}, ..., {n-1,n}, {n}` (length `2n`).
pub fn fixed_prefix(n: u32) -> Vec<u32> {
    let mut prefix = vec![0u32];
    for i in 0..n {
        prefix.push(1 << i);
        if i + 1 < n {
            prefix.push((1 << i) | (1 << (i + 1)));
        }
    }
    prefix
}

fn span(y: u32) -> u32 {
    if y == 0 {
        0
    } else {
        (31 - y.leading_zeros()) - y.trailing_zeros()
    }
}

/// Greedy completion: each slot takes the unused state of the required weight
/// minimizing `(d_H to previous, span, value)`.
pub fn v2_generate(n: u32) -> Result<Ordering, OrderingError> {
    let skel = skeleton(n)?;
    let len = 1usize << n;
    let prefix = fixed_prefix(n);
    let mut used = vec![false; len];
    for &x in &prefix {
        used[x as usize] = true;
    }
    let mut pools: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
    for x in 0..len as u32 {
        if !used[x as usize] {
            pools[weight(x) as usize].push(x);
        }
    }
    let mut states = prefix;
    for t in states.len()..len {
        let prev = *states.last().expect("prefix nonempty");
        let pool = &mut pools[skel.weights[t] as usize];
        let (idx, _) = pool
            .iter()
            .enumerate()
            .min_by_key(|&(_, &y)| (hamming(y, prev), span(y), y))
            .ok_or_else(|| OrderingError::Invalid(format!("no unused state of weight {} at {t}", skel.weights[t])))?;
        states.push(pool.swap_remove(idx));
    }
    Ordering::new(n, states, OrderingKind::V2, None)
}

/// Binary, Gray, weight-block and the two seeded random controls.
pub fn standard_ordering(kind: OrderingKind, n: u32, seed: Option<u64>) -> Result<Ordering, OrderingError> {
    check_n(n, 1, MAX_SKELETON_N)?;
    let len = 1u32 << n;
    if kind.is_random() && seed.is_none() {
        return Err(OrderingError::MissingSeed(kind));
    }
    let states: Vec<u32> = match kind {
        OrderingKind::Binary => (0..len).collect(),
        OrderingKind::Gray => (0..len).map(|t| t ^ (t >> 1)).collect(),
        OrderingKind::WeightBlock => {
            let mut s: Vec<u32> = (0..len).collect();
            s.sort_by_key(|&x| (weight(x), x));
            s
        }
        OrderingKind::RandomPerm => {
            let mut rng = seeded_rng(seed.expect("checked"));
            let mut s: Vec<u32> = (0..len).collect();
            s.shuffle(&mut rng);
            s
        }
        OrderingKind::SectorPreservingRandom => {
            let mut rng = seeded_rng(seed.expect("checked"));
            let skel = skeleton(n)?;
            let prefix = fixed_prefix(n);
            let mut used = vec![false; len as usize];
            for &x in &prefix {
                used[x as usize] = true;
            }
            let mut pools: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
            for x in 0..len {
                if !used[x as usize] {
                    pools[weight(x) as usize].push(x);
                }
            }
            for pool in pools.iter_mut() {
                pool.shuffle(&mut rng);
            }
            let mut s = prefix;
            for t in s.len()..len as usize {
                let x = pools[skel.weights[t] as usize].pop().expect("skeleton multiplicities match binomials");
                s.push(x);
            }
            s
        }
        OrderingKind::Strict | OrderingKind::V2 => return Err(OrderingError::NotStandard(kind)),
    };
    let seed = if kind.is_random() { seed } else { None };
    Ordering::new(n, states, kind, seed)
}

/// Canonical strict ordering with an unbounded budget.
pub fn strict_ordering(n: u32) -> Result<Ordering, OrderingError> {
    match strict_generate(n, &GeneratorBudget::unbounded())? {
        StrictOutcome::Complete(ordering) => Ok(ordering),
        StrictOutcome::Incomplete(log) => Err(OrderingError::Invalid(format!(
            "strict completion failed for n = {n} after {} nodes",
            log.nodes
        ))),
    }
}

/// Any ordering kind by name; random kinds need a seed.
pub fn build_ordering(kind: OrderingKind, n: u32, seed: Option<u64>) -> Result<Ordering, OrderingError> {
    match kind {
        OrderingKind::Strict => strict_ordering(n),
        OrderingKind::V2 => v2_generate(n),
        _ => standard_ordering(kind, n, seed),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMode {
    Strict,
    SkeletonOnly,
    BijectionOnly,
}

impl FromStr for ValidationMode {
    type Err = OrderingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "strict" => Ok(ValidationMode::Strict),
            "skeleton_only" | "skeleton" => Ok(ValidationMode::SkeletonOnly),
            "bijection_only" | "bijection" => Ok(ValidationMode::BijectionOnly),
            other => Err(OrderingError::Invalid(format!("unknown validation mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: u32,
    pub mode: ValidationMode,
    pub length: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks bijectivity, then (mode permitting) prefix, skeleton and one-bit
/// adjacency. Failures are report entries.
pub fn validate_states(n: u32, states: &[u32], mode: ValidationMode) -> ValidationReport {
    let mut checks = Vec::new();
    let len = 1usize.checked_shl(n).unwrap_or(0);
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(CheckResult { name: name.to_string(), passed, detail })
    };

    let length_ok = states.len() == len;
    push("length", length_ok, format!("{} states, expected {len}", states.len()));

    let mut seen = vec![false; len];
    let mut bijection_detail = String::from("every state appears exactly once");
    let mut bijective = length_ok;
    for (t, &x) in states.iter().enumerate() {
        match seen.get_mut(x as usize) {
            None => {
                bijective = false;
                bijection_detail = format!("state {x} at position {t} out of range");
                break;
            }
            Some(slot) if *slot => {
                bijective = false;
                bijection_detail = format!("state {:0w$b} repeated at position {t}", x, w = n as usize);
                break;
            }
            Some(slot) => *slot = true,
        }
    }
    if !length_ok && bijective {
        bijective = false;
        bijection_detail = "length mismatch".to_string();
    }
    push("bijectivity", bijective, bijection_detail);

    if mode != ValidationMode::BijectionOnly {
        let prefix = fixed_prefix(n);
        let mismatch = prefix.iter().enumerate().find(|&(t, &x)| states.get(t) != Some(&x));
        push(
            "fixed_prefix",
            mismatch.is_none(),
            match mismatch {
                None => format!("first {} positions match", prefix.len()),
                Some((t, _)) => format!("position {t} differs from the fixed prefix"),
            },
        );
        match skeleton(n) {
            Ok(skel) => {
                let bad = states.iter().zip(&skel.weights).position(|(&x, &j)| weight(x) != j);
                let ok = bad.is_none() && states.len() == skel.weights.len();
                push(
                    "skeleton",
                    ok,
                    match bad {
                        None if ok => "weights follow the sector skeleton".to_string(),
                        None => "length mismatch".to_string(),
                        Some(t) => format!(
                            "position {t} has weight {}, skeleton requires {}",
                            weight(states[t]),
                            skel.weights[t]
                        ),
                    },
                );
            }
            Err(e) => push("skeleton", false, e.to_string()),
        }
    }
    if mode == ValidationMode::Strict {
        let bad = states.windows(2).position(|w| hamming(w[0], w[1]) != 1);
        push(
            "adjacency",
            bad.is_none(),
            match bad {
                None => "all adjacent pairs at Hamming distance 1".to_string(),
                Some(t) => format!(
                    "positions {t},{} at Hamming distance {}",
                    t + 1,
                    hamming(states[t], states[t + 1])
                ),
            },
        );
    }
    ValidationReport { n, mode, length: states.len(), checks }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingDiagnostics {
    pub mean_adjacent_dh: f64,
    pub max_adjacent_dh: u32,
    pub fraction_dh1: f64,
}

pub fn diagnostics(states: &[u32]) -> OrderingDiagnostics {
    let dists: Vec<u32> = states.windows(2).map(|w| hamming(w[0], w[1])).collect();
    if dists.is_empty() {
        return OrderingDiagnostics { mean_adjacent_dh: 0.0, max_adjacent_dh: 0, fraction_dh1: 0.0 };
    }
    let count = dists.len() as f64;
    OrderingDiagnostics {
        mean_adjacent_dh: dists.iter().map(|&d| d as f64).sum::<f64>() / count,
        max_adjacent_dh: dists.iter().copied().max().unwrap_or(0),
        fraction_dh1: dists.iter().filter(|&&d| d == 1).count() as f64 / count,
    }
}
