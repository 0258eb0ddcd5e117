//! Group formation, small-group median networks, and stable partition.
//!
//! Every key-ordering decision in the crate funnels through
//! [`ComparisonCounter::less`], so comparison budgets and totals reported by
//! the instrumentation are exact, not sampled.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// A keyed element with its position in the original input.
///
/// Keys may repeat at the API boundary; ordering is always the lexicographic
/// pair (key, origin_index), which restores distinctness. Selection is over
/// this total order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element<K> {
    pub key: K,
    pub origin_index: usize,
}

impl<K: Ord> Element<K> {
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then(self.origin_index.cmp(&other.origin_index))
    }
}

/// An ordered working sequence. Relative order is meaningful: partition
/// preserves it, so the type never reorders elements on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence<K> {
    elements: Vec<Element<K>>,
}

impl<K> Sequence<K> {
    /// Wraps raw keys, assigning origin indices 0..n in input order.
    pub fn from_keys<I: IntoIterator<Item = K>>(keys: I) -> Self {
        let elements = keys
            .into_iter()
            .enumerate()
            .map(|(origin_index, key)| Element { key, origin_index })
            .collect();
        Self { elements }
    }

    pub(crate) fn from_elements(elements: Vec<Element<K>>) -> Self {
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element<K>] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element<K>> {
        self.elements
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.elements.iter().map(|e| &e.key)
    }
}

/// Which median a group of even size yields.
///
/// For a group of even size k, `Lower` selects rank k/2 and `Upper` selects
/// rank k/2 + 1 (1-indexed). Odd sizes have a unique median, rank (k+1)/2,
/// under either policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MedianPolicy {
    Lower,
    Upper,
}

impl MedianPolicy {
    /// 1-indexed rank this policy selects in a group of `len` elements.
    pub fn median_rank(self, len: usize) -> usize {
        if len % 2 == 1 {
            len.div_ceil(2)
        } else {
            match self {
                MedianPolicy::Lower => len / 2,
                MedianPolicy::Upper => len / 2 + 1,
            }
        }
    }
}

impl std::fmt::Display for MedianPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MedianPolicy::Lower => write!(f, "lower"),
            MedianPolicy::Upper => write!(f, "upper"),
        }
    }
}

/// Counts key comparisons. Every ordering decision goes through [`Self::less`]
/// or [`Self::cmp_elems`], each ticking the counter exactly once.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ComparisonCounter {
    count: u64,
}

impl ComparisonCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn cmp_elems<K: Ord>(&mut self, a: &Element<K>, b: &Element<K>) -> Ordering {
        self.count += 1;
        a.total_cmp(b)
    }

    pub fn less<K: Ord>(&mut self, a: &Element<K>, b: &Element<K>) -> bool {
        self.cmp_elems(a, b) == Ordering::Less
    }
}

/// Splits `s` into consecutive groups of `g`; the last group keeps its
/// natural short size when g does not divide n.
pub fn form_groups<K>(s: &Sequence<K>, g: usize) -> Result<Vec<&[Element<K>]>> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    debug_assert!(g >= 2);
    Ok(s.elements.chunks(g).collect())
}

/// Policy median of a group of at most 5 elements.
///
/// Comparison budgets, asserted by the test sweep over every ordering:
/// size 3 uses at most 3 comparisons, size 4 at most 4, size 5 at most 6.
pub fn group_median<K: Ord + Clone>(
    group: &[Element<K>],
    policy: MedianPolicy,
    counter: &mut ComparisonCounter,
) -> Result<Element<K>> {
    let chosen = match group.len() {
        0 => return Err(Error::EmptyInput),
        1 => 0,
        2 => median_of_2(group, policy, counter),
        3 => median_of_3(group, counter),
        4 => median_of_4(group, policy, counter),
        5 => median_of_5(group, counter),
        n => return Err(Error::GroupTooLarge(n)),
    };
    Ok(group[chosen].clone())
}

fn median_of_2<K: Ord>(
    g: &[Element<K>],
    policy: MedianPolicy,
    c: &mut ComparisonCounter,
) -> usize {
    let first_smaller = c.less(&g[0], &g[1]);
    match policy {
        MedianPolicy::Lower => {
            if first_smaller {
                0
            } else {
                1
            }
        }
        MedianPolicy::Upper => {
            if first_smaller {
                1
            } else {
                0
            }
        }
    }
}

// 2 or 3 comparisons.
fn median_of_3<K: Ord>(g: &[Element<K>], c: &mut ComparisonCounter) -> usize {
    let (lo, hi) = if c.less(&g[0], &g[1]) { (0, 1) } else { (1, 0) };
    if c.less(&g[2], &g[lo]) {
        lo
    } else if c.less(&g[2], &g[hi]) {
        2
    } else {
        hi
    }
}

// Exactly 4 comparisons: two pairwise sorts, then two more to pin the
// second-smallest (lower) or second-largest (upper).
fn median_of_4<K: Ord>(
    g: &[Element<K>],
    policy: MedianPolicy,
    c: &mut ComparisonCounter,
) -> usize {
    let (a_lo, a_hi) = if c.less(&g[0], &g[1]) { (0, 1) } else { (1, 0) };
    let (b_lo, b_hi) = if c.less(&g[2], &g[3]) { (2, 3) } else { (3, 2) };
    match policy {
        MedianPolicy::Lower => {
            // Rank 2 of 4: drop the smaller of the two pair-minima, then take
            // the smaller of the survivor and the dropped pair's maximum.
            if c.less(&g[a_lo], &g[b_lo]) {
                if c.less(&g[a_hi], &g[b_lo]) {
                    a_hi
                } else {
                    b_lo
                }
            } else if c.less(&g[b_hi], &g[a_lo]) {
                b_hi
            } else {
                a_lo
            }
        }
        MedianPolicy::Upper => {
            // Rank 3 of 4: mirror image.
            if c.less(&g[b_hi], &g[a_hi]) {
                if c.less(&g[b_hi], &g[a_lo]) {
                    a_lo
                } else {
                    b_hi
                }
            } else if c.less(&g[a_hi], &g[b_lo]) {
                b_lo
            } else {
                a_hi
            }
        }
    }
}

// Exactly 6 comparisons. Sort two pairs, order the pairs by their minima and
// discard the overall minimum (rank <= 2, never the median); the answer is
// then the second-smallest of the four survivors, found the same way with the
// fifth element paired against the discarded slot's partner.
fn median_of_5<K: Ord>(g: &[Element<K>], c: &mut ComparisonCounter) -> usize {
    let mut idx = [0usize, 1, 2, 3, 4];
    if c.less(&g[idx[1]], &g[idx[0]]) {
        idx.swap(0, 1);
    }
    if c.less(&g[idx[3]], &g[idx[2]]) {
        idx.swap(2, 3);
    }
    if c.less(&g[idx[2]], &g[idx[0]]) {
        idx.swap(0, 2);
        idx.swap(1, 3);
    }
    // idx[0] < idx[1], idx[0] < idx[2] < idx[3]: idx[0] is out.
    // Need the 2nd smallest of {idx[1], idx[2], idx[3], idx[4]}.
    if c.less(&g[idx[4]], &g[idx[1]]) {
        idx.swap(1, 4);
    }
    if c.less(&g[idx[2]], &g[idx[1]]) {
        idx.swap(1, 2);
        idx.swap(3, 4);
    }
    // idx[1] < idx[4], idx[1] < idx[2] < idx[3]: idx[1] is the minimum of the
    // four, so the median is min(idx[4], idx[2]).
    if c.less(&g[idx[4]], &g[idx[2]]) {
        idx[4]
    } else {
        idx[2]
    }
}

/// The sequence of per-group policy medians, in group order.
pub fn medians_of_groups<K: Ord + Clone>(
    s: &Sequence<K>,
    g: usize,
    policy: MedianPolicy,
    counter: &mut ComparisonCounter,
) -> Result<Sequence<K>> {
    let groups = form_groups(s, g)?;
    let mut medians = Vec::with_capacity(groups.len());
    for group in groups {
        medians.push(group_median(group, policy, counter)?);
    }
    Ok(Sequence::from_elements(medians))
}

/// Partitions `s` around `pivot` into (smaller, larger), preserving relative
/// order on both sides. Consumes exactly n - 1 comparisons: the pivot is
/// recognized by origin index, which is not a key comparison.
pub fn stable_partition<K: Ord>(
    s: Sequence<K>,
    pivot: &Element<K>,
    counter: &mut ComparisonCounter,
) -> Result<(Sequence<K>, Sequence<K>)> {
    let mut below = Vec::new();
    let mut above = Vec::new();
    let mut pivot_seen = false;
    for element in s.elements {
        if element.origin_index == pivot.origin_index {
            pivot_seen = true;
            continue;
        }
        if counter.less(&element, pivot) {
            below.push(element);
        } else {
            above.push(element);
        }
    }
    if !pivot_seen {
        return Err(Error::PivotNotInSequence);
    }
    Ok((Sequence::from_elements(below), Sequence::from_elements(above)))
}

/// Stable merge sort over the (key, origin_index) order, counting every
/// comparison. Used by the sorting oracle and by the base-case sorts; the
/// worst case is n ceil(lg n) - 2^ceil(lg n) + 1 comparisons.
pub fn sort_counted<K: Ord + Clone>(elements: &mut [Element<K>], counter: &mut ComparisonCounter) {
    let n = elements.len();
    if n <= 1 {
        return;
    }
    let mut scratch = elements.to_vec();
    merge_sort(elements, &mut scratch, counter);
}

fn merge_sort<K: Ord + Clone>(
    v: &mut [Element<K>],
    scratch: &mut [Element<K>],
    counter: &mut ComparisonCounter,
) {
    let n = v.len();
    if n <= 1 {
        return;
    }
    let mid = n / 2;
    merge_sort(&mut v[..mid], &mut scratch[..mid], counter);
    merge_sort(&mut v[mid..], &mut scratch[mid..], counter);
    scratch[..n].clone_from_slice(v);
    let (left, right) = scratch[..n].split_at(mid);
    let (mut i, mut j) = (0, 0);
    for slot in v.iter_mut() {
        if i < left.len() && (j >= right.len() || !counter.less(&right[j], &left[i])) {
            *slot = left[i].clone();
            i += 1;
        } else {
            *slot = right[j].clone();
            j += 1;
        }
    }
}
