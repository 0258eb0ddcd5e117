//! The selection algorithms: classic grouped SELECT with a parameterized
//! group size, the repeated-step variants, the shifting-target variant, the
//! lower/upper hybrid, plus a sorting oracle and a randomized-quickselect
//! baseline.
//!
//! All deterministic variants share one driver: an outer partition loop that
//! records a [`TraceEvent`] per iteration, and an inner pivot recursion
//! (the same algorithm applied to the medians sequence) that contributes
//! comparisons but no events.

use crate::error::{Error, Result};
use crate::instrument::{RunReport, TraceEvent};
use crate::primitives::{
    medians_of_groups, sort_counted, stable_partition, ComparisonCounter, Element, MedianPolicy,
    Sequence,
};
use crate::rng::{mix_seed, SplitMix64};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Identifies one algorithm variant, including the knobs that change its
/// behavior. `Classic(5, _)` is the reference linear algorithm; `Classic(3|4, _)`
/// exist for the growth probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Classic { group: u8, policy: MedianPolicy },
    RepeatedStep3,
    RepeatedStep4,
    ShiftingTarget4,
    Hybrid4,
    SortingOracle,
    RandomizedQuickselect { seed: u64 },
}

impl AlgorithmId {
    pub fn classic(group: usize, policy: MedianPolicy) -> Result<Self> {
        if !(3..=5).contains(&group) {
            return Err(Error::InvalidSpec(format!(
                "classic group size must be 3, 4 or 5, got {group}"
            )));
        }
        Ok(AlgorithmId::Classic {
            group: group as u8,
            policy,
        })
    }

    /// Stable textual id, used in CSV output and on the command line.
    pub fn name(&self) -> String {
        match self {
            AlgorithmId::Classic { group, policy } => format!("classic{group}-{policy}"),
            AlgorithmId::RepeatedStep3 => "repeated3".into(),
            AlgorithmId::RepeatedStep4 => "repeated4".into(),
            AlgorithmId::ShiftingTarget4 => "shifting4".into(),
            AlgorithmId::Hybrid4 => "hybrid4".into(),
            AlgorithmId::SortingOracle => "oracle".into(),
            AlgorithmId::RandomizedQuickselect { .. } => "random".into(),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            AlgorithmId::RandomizedQuickselect { .. } => {
                AlgorithmId::RandomizedQuickselect { seed }
            }
            other => other,
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, policy) = match s.split_once('-') {
            Some((base, "lower")) => (base, MedianPolicy::Lower),
            Some((base, "upper")) => (base, MedianPolicy::Upper),
            Some(_) => return Err(Error::Parse(format!("unknown algorithm {s:?}"))),
            None => (s, MedianPolicy::Lower),
        };
        match base {
            "classic3" => AlgorithmId::classic(3, policy),
            "classic4" => AlgorithmId::classic(4, policy),
            "classic5" => AlgorithmId::classic(5, policy),
            "repeated3" => Ok(AlgorithmId::RepeatedStep3),
            "repeated4" => Ok(AlgorithmId::RepeatedStep4),
            "shifting4" => Ok(AlgorithmId::ShiftingTarget4),
            "hybrid4" => Ok(AlgorithmId::Hybrid4),
            "oracle" => Ok(AlgorithmId::SortingOracle),
            "random" => Ok(AlgorithmId::RandomizedQuickselect { seed: 0 }),
            other => Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl Serialize for AlgorithmId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlgorithmId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A validated selection request: find the element of 1-indexed rank `target`.
#[derive(Debug, Clone)]
pub struct SelectionRequest<K> {
    pub sequence: Sequence<K>,
    pub target: usize,
}

impl<K> SelectionRequest<K> {
    pub fn new(sequence: Sequence<K>, target: usize) -> Result<Self> {
        if target == 0 || target > sequence.len() {
            return Err(Error::RankOutOfBounds {
                i: target,
                n: sequence.len(),
            });
        }
        Ok(Self { sequence, target })
    }
}

/// The grouping scheme shared by the deterministic variants.
#[derive(Debug, Clone, Copy)]
enum Scheme {
    /// One grouping pass; pivot is the recursive lower median of M.
    OnePass { group: usize, policy: MedianPolicy },
    /// Two grouping passes; pivot is the recursive lower median of M'.
    TwoPass {
        group: usize,
        first: MedianPolicy,
        second: MedianPolicy,
    },
    /// One pass over groups of 4; the policy follows the current target:
    /// lower medians while i <= n/2, upper medians otherwise.
    ShiftingTarget,
}

impl Scheme {
    fn for_algorithm(alg: &AlgorithmId) -> Option<Scheme> {
        match alg {
            AlgorithmId::Classic { group, policy } => Some(Scheme::OnePass {
                group: *group as usize,
                policy: *policy,
            }),
            AlgorithmId::RepeatedStep3 => Some(Scheme::TwoPass {
                group: 3,
                first: MedianPolicy::Lower,
                second: MedianPolicy::Lower,
            }),
            AlgorithmId::RepeatedStep4 => Some(Scheme::TwoPass {
                group: 4,
                first: MedianPolicy::Lower,
                second: MedianPolicy::Lower,
            }),
            AlgorithmId::Hybrid4 => Some(Scheme::TwoPass {
                group: 4,
                first: MedianPolicy::Lower,
                second: MedianPolicy::Upper,
            }),
            AlgorithmId::ShiftingTarget4 => Some(Scheme::ShiftingTarget),
            AlgorithmId::SortingOracle | AlgorithmId::RandomizedQuickselect { .. } => None,
        }
    }

    /// Below this length the variant sorts directly. Two-pass schemes fall
    /// back whenever two grouping passes cannot both complete (n < g^2).
    fn base_threshold(&self) -> usize {
        match self {
            Scheme::OnePass { group, .. } => *group,
            Scheme::TwoPass { group, .. } => group * group - 1,
            Scheme::ShiftingTarget => 4,
        }
    }
}

struct RunCtx<'a> {
    counter: &'a mut ComparisonCounter,
    max_depth: usize,
    /// Comparisons consumed by the outer run's terminal base-case sort
    /// (pivot recursions attribute theirs to the calling iteration).
    outer_base_case: u64,
}

fn sorted_rank<K: Ord + Clone>(
    seq: Sequence<K>,
    target: usize,
    counter: &mut ComparisonCounter,
) -> Element<K> {
    let mut elements = seq.into_elements();
    sort_counted(&mut elements, counter);
    elements.swap_remove(target - 1)
}

/// The shared outer loop. `trace` is `Some` only for the outermost partition
/// recursion; pivot recursions pass `None` so their iterations contribute
/// comparisons without events.
fn drive<K: Ord + Clone>(
    alg: &AlgorithmId,
    scheme: Scheme,
    mut seq: Sequence<K>,
    mut target: usize,
    ctx: &mut RunCtx<'_>,
    mut trace: Option<&mut Vec<TraceEvent>>,
    depth: usize,
) -> Result<Element<K>> {
    ctx.max_depth = ctx.max_depth.max(depth);
    loop {
        let n = seq.len();
        debug_assert!((1..=n).contains(&target));
        if n <= scheme.base_threshold() {
            let before = ctx.counter.count();
            let result = sorted_rank(seq, target, ctx.counter);
            if trace.is_some() {
                ctx.outer_base_case = ctx.counter.count() - before;
            }
            return Ok(result);
        }

        let started_at = ctx.counter.count();
        let (pivot, policy_used) = match scheme {
            Scheme::OnePass { group, policy } => {
                let medians = medians_of_groups(&seq, group, policy, ctx.counter)?;
                let rank = MedianPolicy::Lower.median_rank(medians.len());
                let pivot = drive(alg, scheme, medians, rank, ctx, None, depth + 1)?;
                (pivot, Some(policy))
            }
            Scheme::TwoPass {
                group,
                first,
                second,
            } => {
                let medians = medians_of_groups(&seq, group, first, ctx.counter)?;
                let medians2 = medians_of_groups(&medians, group, second, ctx.counter)?;
                let rank = MedianPolicy::Lower.median_rank(medians2.len());
                let pivot = drive(alg, scheme, medians2, rank, ctx, None, depth + 1)?;
                // A single policy label only makes sense when both passes agree.
                let label = if first == second { Some(first) } else { None };
                (pivot, label)
            }
            Scheme::ShiftingTarget => {
                let policy = if 2 * target <= n {
                    MedianPolicy::Lower
                } else {
                    MedianPolicy::Upper
                };
                let medians = medians_of_groups(&seq, 4, policy, ctx.counter)?;
                let rank = MedianPolicy::Lower.median_rank(medians.len());
                let pivot = drive(alg, scheme, medians, rank, ctx, None, depth + 1)?;
                (pivot, Some(policy))
            }
        };

        let (below, above) = stable_partition(seq, &pivot, ctx.counter)?;
        if let Some(events) = trace.as_deref_mut() {
            events.push(TraceEvent {
                iteration: events.len(),
                n,
                i: target,
                algorithm: *alg,
                policy: policy_used,
                pivot_rank: below.len() + 1,
                size_a1: below.len(),
                size_a2: above.len(),
                comparisons_delta: ctx.counter.count() - started_at,
            });
        }

        if below.len() == target - 1 {
            return Ok(pivot);
        } else if below.len() > target - 1 {
            seq = below;
        } else {
            target -= below.len() + 1;
            seq = above;
        }
    }
}

fn drive_randomized<K: Ord + Clone>(
    alg: &AlgorithmId,
    mut seq: Sequence<K>,
    mut target: usize,
    seed: u64,
    ctx: &mut RunCtx<'_>,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    ctx.max_depth = 1;
    let mut rng = SplitMix64::new(seed);
    loop {
        let n = seq.len();
        if n == 1 {
            return Ok(seq.into_elements().pop().expect("nonempty"));
        }
        let started_at = ctx.counter.count();
        let pivot = seq.elements()[rng.next_below(n)].clone();
        let (below, above) = stable_partition(seq, &pivot, ctx.counter)?;
        trace.push(TraceEvent {
            iteration: trace.len(),
            n,
            i: target,
            algorithm: *alg,
            policy: None,
            pivot_rank: below.len() + 1,
            size_a1: below.len(),
            size_a2: above.len(),
            comparisons_delta: ctx.counter.count() - started_at,
        });
        if below.len() == target - 1 {
            return Ok(pivot);
        } else if below.len() > target - 1 {
            seq = below;
        } else {
            target -= below.len() + 1;
            seq = above;
        }
    }
}

/// Runs `alg` on the request and returns the full instrumented report.
pub fn run<K: Ord + Clone>(alg: &AlgorithmId, req: SelectionRequest<K>) -> Result<RunReport<K>> {
    let n = req.sequence.len();
    let target = req.target;
    let started = Instant::now();
    let mut counter = ComparisonCounter::new();
    let mut trace = Vec::new();
    let mut ctx = RunCtx {
        counter: &mut counter,
        max_depth: 0,
        outer_base_case: 0,
    };

    let result = match alg {
        AlgorithmId::SortingOracle => {
            let before = ctx.counter.count();
            let result = sorted_rank(req.sequence, target, ctx.counter);
            ctx.outer_base_case = ctx.counter.count() - before;
            result
        }
        AlgorithmId::RandomizedQuickselect { seed } => {
            drive_randomized(alg, req.sequence, target, *seed, &mut ctx, &mut trace)?
        }
        deterministic => {
            let scheme = Scheme::for_algorithm(deterministic).expect("deterministic scheme");
            drive(
                deterministic,
                scheme,
                req.sequence,
                target,
                &mut ctx,
                Some(&mut trace),
                1,
            )?
        }
    };

    let max_depth = ctx.max_depth;
    let base_case_comparisons = ctx.outer_base_case;
    Ok(RunReport {
        algorithm: *alg,
        n,
        i: target,
        result_key: result.key,
        result_origin: result.origin_index,
        total_comparisons: counter.count(),
        max_depth,
        base_case_comparisons,
        iterations: trace,
        wall_time_ns: started.elapsed().as_nanos() as u64,
    })
}

/// Classic grouped SELECT with group size `g` (3, 4 or 5) and the given
/// median policy for even-sized groups.
pub fn classic_select<K: Ord + Clone>(
    req: SelectionRequest<K>,
    g: usize,
    policy: MedianPolicy,
    counter: &mut ComparisonCounter,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    let alg = AlgorithmId::classic(g, policy)?;
    run_into(&alg, req, counter, trace)
}

/// Groups of 3 with the "group and take medians" step applied twice before
/// the pivot recursion.
pub fn repeated_step_select_3<K: Ord + Clone>(
    req: SelectionRequest<K>,
    counter: &mut ComparisonCounter,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    run_into(&AlgorithmId::RepeatedStep3, req, counter, trace)
}

/// Groups of 4, both passes under the lower-median policy.
pub fn repeated_step_select_4<K: Ord + Clone>(
    req: SelectionRequest<K>,
    counter: &mut ComparisonCounter,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    run_into(&AlgorithmId::RepeatedStep4, req, counter, trace)
}

/// Groups of 4, switching between lower and upper medians on the current
/// target: lower while i <= n/2, upper otherwise.
pub fn shifting_target_select_4<K: Ord + Clone>(
    req: SelectionRequest<K>,
    counter: &mut ComparisonCounter,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    run_into(&AlgorithmId::ShiftingTarget4, req, counter, trace)
}

/// Groups of 4 twice in a row, lower medians on the first pass and upper
/// medians on the second.
pub fn hybrid_select_4<K: Ord + Clone>(
    req: SelectionRequest<K>,
    counter: &mut ComparisonCounter,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    run_into(&AlgorithmId::Hybrid4, req, counter, trace)
}

fn run_into<K: Ord + Clone>(
    alg: &AlgorithmId,
    req: SelectionRequest<K>,
    counter: &mut ComparisonCounter,
    trace: &mut Vec<TraceEvent>,
) -> Result<Element<K>> {
    let scheme = Scheme::for_algorithm(alg).expect("deterministic scheme");
    let mut ctx = RunCtx {
        counter,
        max_depth: 0,
        outer_base_case: 0,
    };
    drive(alg, scheme, req.sequence, req.target, &mut ctx, Some(trace), 1)
}

/// Ground truth: sorts a copy by (key, origin_index) and indexes rank i.
/// Deliberately independent of the counted machinery above.
pub fn sorting_oracle_select<K: Ord + Clone>(req: &SelectionRequest<K>) -> Element<K> {
    let mut elements = req.sequence.elements().to_vec();
    elements.sort_by(|a, b| (&a.key, a.origin_index).cmp(&(&b.key, b.origin_index)));
    elements.swap_remove(req.target - 1)
}

/// Quickselect with a seeded uniform pivot; the expected-linear baseline.
pub fn randomized_quickselect<K: Ord + Clone>(
    req: SelectionRequest<K>,
    seed: u64,
) -> Result<Element<K>> {
    let report = run(&AlgorithmId::RandomizedQuickselect { seed }, req)?;
    Ok(Element {
        key: report.result_key,
        origin_index: report.result_origin,
    })
}

/// Derives the pivot seed the experiment runner hands to the randomized
/// baseline for a given cell seed.
pub fn randomized_seed_for_cell(cell_seed: u64) -> u64 {
    mix_seed(cell_seed, 0x5EED)
}
