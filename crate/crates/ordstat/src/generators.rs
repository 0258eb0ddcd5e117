//! Deterministic input corpora for verification, benchmarking, and the
//! growth probe.
//!
//! A [`GeneratorSpec`] is a pure function of its fields: the same spec yields
//! the same sequence on every platform. Randomized kinds use the pinned
//! [`SplitMix64`](crate::rng::SplitMix64) generator and the normative shuffle
//! documented in [`crate::rng`].

use crate::error::{Error, Result};
use crate::primitives::Sequence;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// Seeded uniform permutation of 1..=n (Fisher-Yates over SplitMix64).
    Uniform,
    /// 1, 2, ..., n.
    Sorted,
    /// n, n-1, ..., 1.
    Reversed,
    /// Ascending odds then descending evens: 1, 3, 5, ..., 6, 4, 2.
    OrganPipe,
    /// n seeded draws from 1..=k (duplicates expected; the element order
    /// normalization makes them selectable).
    FewDistinct,
    /// Deterministic small/large interleaving: position 2t gets t+1 and
    /// position 2t+1 gets ceil(n/2)+t+1, so every small group mixes extremes
    /// and its median is dragged toward the global middle. A best-effort
    /// adversary, not a proven worst case.
    MedianKiller,
}

impl GeneratorKind {
    fn name(self) -> &'static str {
        match self {
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::Sorted => "sorted",
            GeneratorKind::Reversed => "reversed",
            GeneratorKind::OrganPipe => "organpipe",
            GeneratorKind::FewDistinct => "fewdistinct",
            GeneratorKind::MedianKiller => "mediankiller",
        }
    }

    /// Whether the output depends on the seed.
    pub fn is_seeded(self) -> bool {
        matches!(self, GeneratorKind::Uniform | GeneratorKind::FewDistinct)
    }
}

/// A declarative input description, serializable as a compact string such as
/// `uniform:n=1000:seed=42` or `fewdistinct:n=100:k=5:seed=7`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    /// Ignored (normalized to 0) for unseeded kinds.
    pub seed: u64,
    /// Number of distinct keys; only meaningful for `FewDistinct`.
    pub k: Option<usize>,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        let seed = if kind.is_seeded() { seed } else { 0 };
        Self {
            kind,
            n,
            seed,
            k: None,
        }
    }

    pub fn few_distinct(n: usize, k: usize, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::FewDistinct,
            n,
            seed,
            k: Some(k),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        if self.kind.is_seeded() {
            self.seed = seed;
        }
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("generator requires n >= 1".into()));
        }
        match self.kind {
            GeneratorKind::FewDistinct => match self.k {
                Some(0) => Err(Error::InvalidSpec("fewdistinct requires k >= 1".into())),
                Some(_) => Ok(()),
                None => Err(Error::InvalidSpec("fewdistinct requires k".into())),
            },
            _ if self.k.is_some() => {
                Err(Error::InvalidSpec(format!("{} takes no k", self.kind.name())))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:n={}", self.kind.name(), self.n)?;
        if let Some(k) = self.k {
            write!(f, ":k={}", k)?;
        }
        if self.kind.is_seeded() {
            write!(f, ":seed={}", self.seed)?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut parts = text.split(':');
        let kind = match parts.next().unwrap_or("") {
            "uniform" => GeneratorKind::Uniform,
            "sorted" => GeneratorKind::Sorted,
            "reversed" => GeneratorKind::Reversed,
            "organpipe" => GeneratorKind::OrganPipe,
            "fewdistinct" => GeneratorKind::FewDistinct,
            "mediankiller" => GeneratorKind::MedianKiller,
            other => return Err(Error::Parse(format!("unknown generator kind {other:?}"))),
        };
        let (mut n, mut seed, mut k) = (None, None, None);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            match key {
                "n" if n.is_none() => {
                    n = Some(value.parse::<usize>().map_err(|e| {
                        Error::Parse(format!("bad n {value:?}: {e}"))
                    })?);
                }
                "seed" if seed.is_none() => {
                    seed = Some(value.parse::<u64>().map_err(|e| {
                        Error::Parse(format!("bad seed {value:?}: {e}"))
                    })?);
                }
                "k" if k.is_none() => {
                    k = Some(value.parse::<usize>().map_err(|e| {
                        Error::Parse(format!("bad k {value:?}: {e}"))
                    })?);
                }
                "n" | "seed" | "k" => {
                    return Err(Error::Parse(format!("duplicate field {key:?}")));
                }
                other => return Err(Error::Parse(format!("unknown field {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("generator spec requires n".into()))?;
        let spec = GeneratorSpec {
            kind,
            n,
            seed: if kind.is_seeded() {
                seed.unwrap_or(0)
            } else {
                0
            },
            k,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Materializes the sequence described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Sequence<i64>> {
    spec.validate()?;
    let n = spec.n;
    let keys: Vec<i64> = match spec.kind {
        GeneratorKind::Sorted => (1..=n as i64).collect(),
        GeneratorKind::Reversed => (1..=n as i64).rev().collect(),
        GeneratorKind::Uniform => {
            let mut keys: Vec<i64> = (1..=n as i64).collect();
            SplitMix64::new(spec.seed).shuffle(&mut keys);
            keys
        }
        GeneratorKind::OrganPipe => {
            let mut keys: Vec<i64> = (1..=n as i64).filter(|k| k % 2 == 1).collect();
            keys.extend((1..=n as i64).filter(|k| k % 2 == 0).rev());
            keys
        }
        GeneratorKind::FewDistinct => {
            let k = spec.k.expect("validated") as u64;
            let mut rng = SplitMix64::new(spec.seed);
            (0..n).map(|_| (rng.next_u64() % k) as i64 + 1).collect()
        }
        GeneratorKind::MedianKiller => {
            let half = n.div_ceil(2) as i64;
            (0..n as i64)
                .map(|pos| if pos % 2 == 0 { pos / 2 + 1 } else { half + pos / 2 + 1 })
                .collect()
        }
    };
    Ok(Sequence::from_keys(keys))
}

/// All n! permutations of 1..=n in lexicographic order, for n <= 9.
pub fn exhaustive_permutations(n: usize) -> Result<Permutations> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > 9 {
        return Err(Error::ExhaustiveDomainTooLarge(n));
    }
    Ok(Permutations {
        next: Some((1..=n as i64).collect()),
    })
}

pub struct Permutations {
    next: Option<Vec<i64>>,
}

impl Iterator for Permutations {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(current)
    }
}

fn next_permutation(v: &mut [i64]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
