use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{check_n, fixed_prefix, skeleton, weight, Ordering, OrderingError, OrderingKind, MAX_STRICT_N};

const CLOCK_CHECK_INTERVAL: u64 = 4096;

/// Limits for the depth-first completion. `None` means unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBudget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl GeneratorBudget {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Self { max_nodes: Some(max_nodes), max_seconds: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    NodeBudget,
    TimeBudget,
    Exhausted,
}

/// Record of an attempt that did not complete.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptLog {
    pub n: u32,
    pub reason: StopReason,
    pub nodes: u64,
    pub elapsed_seconds: f64,
    /// Largest path index reached by any partial path.
    pub deepest_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrictOutcome {
    Complete(Ordering),
    Incomplete(AttemptLog),
}

impl StrictOutcome {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            StrictOutcome::Complete(o) => Some(o),
            StrictOutcome::Incomplete(_) => None,
        }
    }
}

struct Frame {
    candidates: Vec<u32>,
    next: usize,
}

fn candidates(n: u32, prev: u32, target: u32, onward: Option<u32>, used: &[bool]) -> Vec<u32> {
    let mut keyed: Vec<(u32, i64, u32)> = (0..n)
        .map(|i| prev ^ (1 << i))
        .filter(|&y| !used[y as usize] && weight(y) == target)
        .map(|y| {
            let c = onward.map_or(0, |next_weight| {
                (0..n)
                    .map(|i| y ^ (1 << i))
                    .filter(|&z| !used[z as usize] && weight(z) == next_weight)
                    .count() as u32
            });
            let bit = (prev ^ y).trailing_zeros() as i64 + 1;
            let tau = if y > prev { -bit } else { bit };
            (c, tau, y)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, _, y)| y).collect()
}

/// Depth-first completion of the fixed prefix along the sector skeleton.
///
/// Candidates at each slot are unused one-bit neighbours of the required
/// weight, tried in order of (onward unused neighbours, signed flip index,
/// value). The node count includes the root, so a search that never
/// backtracks from the prefix costs `1 + candidates tried`.
pub fn strict_generate(n: u32, budget: &GeneratorBudget) -> Result<StrictOutcome, OrderingError> {
    check_n(n, 1, MAX_STRICT_N)?;
    let start = Instant::now();
    let time_limit = budget.max_seconds.map(Duration::from_secs_f64);
    let len = 1usize << n;
    let weights = skeleton(n)?.weights;

    let mut path = fixed_prefix(n);
    let mut used = vec![false; len];
    for &x in &path {
        used[x as usize] = true;
    }
    let mut nodes: u64 = 1;
    let mut deepest = path.len() - 1;

    let finish = |path: Vec<u32>, nodes: u64| {
        Ordering::new(n, path, OrderingKind::Strict, None).map(|o| StrictOutcome::Complete(o.with_search_nodes(nodes)))
    };
    if path.len() == len {
        return finish(path, nodes);
    }

    let frame_for = |path: &[u32], used: &[bool]| {
        let t = path.len();
        let onward = weights.get(t + 1).copied();
        Frame { candidates: candidates(n, path[t - 1], weights[t], onward, used), next: 0 }
    };
    let mut stack = vec![frame_for(&path, &used)];
    let root_depth = path.len();

    while let Some(frame) = stack.last_mut() {
        if frame.next < frame.candidates.len() {
            let y = frame.candidates[frame.next];
            frame.next += 1;
            nodes += 1;
            path.push(y);
            used[y as usize] = true;
            deepest = deepest.max(path.len() - 1);
            if path.len() == len {
                return finish(path, nodes);
            }
            let stop = if budget.max_nodes.is_some_and(|m| nodes >= m) {
                Some(StopReason::NodeBudget)
            } else if nodes % CLOCK_CHECK_INTERVAL == 0 && time_limit.is_some_and(|l| start.elapsed() >= l) {
                Some(StopReason::TimeBudget)
            } else {
                None
            };
            if let Some(reason) = stop {
                return Ok(StrictOutcome::Incomplete(AttemptLog {
                    n,
                    reason,
                    nodes,
                    elapsed_seconds: start.elapsed().as_secs_f64(),
                    deepest_index: deepest,
                }));
            }
            let next = frame_for(&path, &used);
            stack.push(next);
        } else {
            stack.pop();
            if path.len() > root_depth {
                let y = path.pop().expect("nonempty");
                used[y as usize] = false;
            }
        }
    }
    Ok(StrictOutcome::Incomplete(AttemptLog {
        n,
        reason: StopReason::Exhausted,
        nodes,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        deepest_index: deepest,
    }))
}
