//! Declarative scaling sweeps and the growth-rate fits they feed.
//!
//! A sweep executes every (algorithm, size, repetition) cell with a seed
//! derived from the base seed and the cell indices, validates every run's
//! trace inline, and aggregates one [`ScalingRow`] per (algorithm, size).
//! Outputs are deterministic functions of the spec, byte for byte.

use crate::algorithms::{randomized_seed_for_cell, run, AlgorithmId, SelectionRequest};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorKind, GeneratorSpec};
use crate::instrument::validate_run;
use crate::rng::mix_seed;
use serde::{Deserialize, Serialize};
use std::fmt;

/// How the target rank i is chosen for a run of size n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetRule {
    /// i = ceil(n/2).
    Middle,
    /// i = 1.
    ExtremeLow,
    /// i = n.
    ExtremeHigh,
    /// Repetition t uses quantile (t mod 9 + 1)/10, i = round(q * n),
    /// clamped into 1..=n. Covers the quartile regimes the shifting-target
    /// analysis distinguishes.
    NineQuantiles,
    /// A fixed rank, which must be valid for the smallest size.
    Fixed(usize),
}

impl TargetRule {
    pub fn target_for(&self, n: usize, repetition: usize) -> usize {
        match self {
            TargetRule::Middle => n.div_ceil(2),
            TargetRule::ExtremeLow => 1,
            TargetRule::ExtremeHigh => n,
            TargetRule::NineQuantiles => {
                let decile = repetition % 9 + 1;
                ((decile * n + 5) / 10).clamp(1, n)
            }
            TargetRule::Fixed(i) => *i,
        }
    }
}

impl fmt::Display for TargetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetRule::Middle => write!(f, "middle"),
            TargetRule::ExtremeLow => write!(f, "extreme-low"),
            TargetRule::ExtremeHigh => write!(f, "extreme-high"),
            TargetRule::NineQuantiles => write!(f, "nine-quantiles"),
            TargetRule::Fixed(i) => write!(f, "fixed:{i}"),
        }
    }
}

/// A declarative sweep description, also readable from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub algorithms: Vec<AlgorithmId>,
    /// Strictly increasing input sizes.
    pub sizes: Vec<usize>,
    pub target: TargetRule,
    pub generator: GeneratorKind,
    /// Distinct-key count; required by the fewdistinct generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub repetitions: usize,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidSpec("no algorithms listed".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidSpec("no sizes listed".into()));
        }
        if !self.sizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpec("sizes must be strictly increasing".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidSpec("repetitions must be >= 1".into()));
        }
        if let TargetRule::Fixed(i) = self.target {
            if i == 0 || i > self.sizes[0] {
                return Err(Error::InvalidSpec(format!(
                    "fixed target {i} is out of range for the smallest size {}",
                    self.sizes[0]
                )));
            }
        }
        // Reuse the generator validation on the smallest cell.
        self.cell_generator(self.sizes[0], 0).map(|_| ())
    }

    fn cell_generator(&self, n: usize, cell_seed: u64) -> Result<GeneratorSpec> {
        let spec = match self.generator {
            GeneratorKind::FewDistinct => {
                let k = self.k.ok_or_else(|| {
                    Error::InvalidSpec("fewdistinct requires k".into())
                })?;
                GeneratorSpec::few_distinct(n, k, cell_seed)
            }
            kind => {
                if self.k.is_some() {
                    return Err(Error::InvalidSpec("k is only valid for fewdistinct".into()));
                }
                GeneratorSpec::new(kind, n, cell_seed)
            }
        };
        Ok(spec)
    }
}

/// Aggregates over exactly `reps` runs of one (algorithm, size) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub algo: String,
    pub n: usize,
    pub target: String,
    pub reps: usize,
    pub mean_cmp: f64,
    pub max_cmp: u64,
    pub mean_cmp_per_elem: f64,
    pub mean_depth: f64,
}

pub const SCALING_CSV_HEADER: &str =
    "algo,n,target,reps,mean_cmp,max_cmp,mean_cmp_per_elem,mean_depth";

/// Renders rows as CSV with the fixed header. Plain f64 formatting is
/// deterministic, which criterion-level determinism checks rely on.
pub fn rows_to_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from(SCALING_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.algo, r.n, r.target, r.reps, r.mean_cmp, r.max_cmp, r.mean_cmp_per_elem, r.mean_depth
        ));
    }
    out
}

/// Executes the sweep. Every run is validated against the instrumentation
/// checks; the first violation aborts the experiment with a diagnostic.
///
/// Cell seeds: `mix_seed` folds the algorithm index, then the size index,
/// then the repetition index into the base seed. The randomized baseline
/// additionally derives its pivot seed from the cell seed.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ScalingRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.algorithms.len() * spec.sizes.len());
    for (algo_idx, algorithm) in spec.algorithms.iter().enumerate() {
        for (size_idx, &n) in spec.sizes.iter().enumerate() {
            let mut total_cmp = 0u64;
            let mut max_cmp = 0u64;
            let mut total_depth = 0u64;
            for rep in 0..spec.repetitions {
                let cell_seed = mix_seed(
                    mix_seed(mix_seed(spec.seed, algo_idx as u64), size_idx as u64),
                    rep as u64,
                );
                let sequence = generate(&spec.cell_generator(n, cell_seed)?)?;
                let target = spec.target.target_for(n, rep);
                let algorithm = algorithm.with_seed(randomized_seed_for_cell(cell_seed));
                let report = run(&algorithm, SelectionRequest::new(sequence, target)?)?;
                validate_run(&report).map_err(|e| {
                    Error::TraceCheck(format!(
                        "{algorithm} n={n} rep={rep} seed={cell_seed}: {e}"
                    ))
                })?;
                total_cmp += report.total_comparisons;
                max_cmp = max_cmp.max(report.total_comparisons);
                total_depth += report.max_depth as u64;
            }
            let reps = spec.repetitions as f64;
            rows.push(ScalingRow {
                algo: algorithm.name(),
                n,
                target: spec.target.to_string(),
                reps: spec.repetitions,
                mean_cmp: total_cmp as f64 / reps,
                max_cmp,
                mean_cmp_per_elem: total_cmp as f64 / reps / n as f64,
                mean_depth: total_depth as f64 / reps,
            });
        }
    }
    Ok(rows)
}

/// Ordinary least squares over (x, y) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
}

fn least_squares(points: &[(f64, f64)]) -> LineFit {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = points
        .iter()
        .map(|p| p.1 - (intercept + slope * p.0))
        .collect();
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    LineFit {
        slope,
        intercept,
        residuals,
        max_abs_residual,
    }
}

/// Growth evidence for one algorithm: a log-log exponent fit and a fit of
/// comparisons-per-element against ln n (slope is per e-fold of n).
///
/// The report states measurements only; it deliberately offers no verdict on
/// linearity, because finite ranges cannot settle an asymptotic question.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthFit {
    pub algo: String,
    pub sizes: Vec<usize>,
    /// ln(mean comparisons) against ln n.
    pub exponent: LineFit,
    /// mean comparisons per element against ln n.
    pub per_element: LineFit,
}

/// Fits growth curves for the rows of a single algorithm. Requires at least
/// 4 distinct sizes spanning two orders of magnitude.
pub fn growth_fit(rows: &[ScalingRow]) -> Result<GrowthFit> {
    let Some(first) = rows.first() else {
        return Err(Error::InvalidSpec("no rows to fit".into()));
    };
    if rows.iter().any(|r| r.algo != first.algo) {
        return Err(Error::InvalidSpec("growth_fit expects rows of one algorithm".into()));
    }
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    if sizes.len() < 4 || sizes.len() != rows.len() {
        return Err(Error::InvalidSpec(
            "growth_fit requires >= 4 distinct sizes".into(),
        ));
    }
    let (min_n, max_n) = (sizes[0], *sizes.last().unwrap());
    if max_n < 100 * min_n {
        return Err(Error::InvalidSpec(format!(
            "sizes {min_n}..{max_n} span less than two orders of magnitude"
        )));
    }
    let loglog: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.mean_cmp.ln()))
        .collect();
    let per_elem: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.mean_cmp_per_elem))
        .collect();
    Ok(GrowthFit {
        algo: first.algo.clone(),
        sizes,
        exponent: least_squares(&loglog),
        per_element: least_squares(&per_elem),
    })
}

/// The sub-experiment of the growth probe: the original grouped SELECT with
/// groups of 3 and 4 under both medians, plus two known-linear controls.
pub fn probe_algorithms() -> Vec<AlgorithmId> {
    vec![
        AlgorithmId::classic(3, crate::primitives::MedianPolicy::Lower).unwrap(),
        AlgorithmId::classic(3, crate::primitives::MedianPolicy::Upper).unwrap(),
        AlgorithmId::classic(4, crate::primitives::MedianPolicy::Lower).unwrap(),
        AlgorithmId::classic(4, crate::primitives::MedianPolicy::Upper).unwrap(),
        AlgorithmId::RepeatedStep3,
        AlgorithmId::classic(5, crate::primitives::MedianPolicy::Lower).unwrap(),
    ]
}
