//! Permutations in one-line notation, together with the cycle and pattern
//! statistics that drive the telescoping laws: cycle decomposition, reduction
//! by largest-element deletion, the unicyclic statistic, first ascents,
//! longest increasing subsequences, and pattern containment.
//!
//! Everything here is exact. Counts are arbitrary-precision integers and no
//! floating point enters until a caller divides at the reporting boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default cap on `n` for full symmetric-group enumeration (10! ≈ 3.6M).
pub const DEFAULT_ENUMERATION_CAP: u64 = 10;

/// A permutation of {1, ..., n} in one-line notation.
///
/// `values[i]` is the image of `i + 1`, so `[2, 3, 1]` sends 1 to 2, 2 to 3
/// and 3 to 1. Construction validates that the entries form a rearrangement
/// of {1, ..., n}; every method may assume it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty one-line notation".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if seen[v] {
                return Err(Error::InvalidPermutation(format!("value {v} repeats")));
            }
            seen[v] = true;
        }
        Ok(Self { values })
    }

    /// Skips validation; for internal construction of values already known
    /// to be a rearrangement (reductions, standardizations, enumeration).
    fn unchecked(values: Vec<usize>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Image of `i` under the permutation, 1-based.
    pub fn apply(&self, i: usize) -> Result<usize> {
        if i < 1 || i > self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(self.values[i - 1])
    }

    /// Cycle decomposition in canonical form: each cycle is led by its
    /// smallest element and cycles are listed in increasing order of leader.
    pub fn cycle_decomposition(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n + 1];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            // start is the smallest unvisited element, hence the smallest
            // of its cycle
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j);
                j = self.values[j - 1];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut counts = BTreeMap::new();
        for cycle in self.cycle_decomposition() {
            *counts.entry(cycle.len()).or_insert(0) += 1;
        }
        CycleType { counts }
    }

    /// True iff the permutation is a single n-cycle.
    pub fn is_unicyclic(&self) -> bool {
        let n = self.n();
        let mut j = self.values[0];
        let mut steps = 1;
        while j != 1 {
            j = self.values[j - 1];
            steps += 1;
        }
        steps == n
    }

    /// Reduction to [i]: repeatedly delete the largest element m, bridging
    /// its cycle (if a maps to m and m maps to b, then a maps to b after the
    /// deletion; a fixed point is simply dropped), until only 1..=i remain.
    pub fn reduce(&self, i: usize) -> Result<Permutation> {
        let n = self.n();
        if i < 1 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let (mut fwd, mut inv) = self.maps();
        for m in ((i + 1)..=n).rev() {
            let a = inv[m];
            let b = fwd[m];
            if a != m {
                fwd[a] = b;
                inv[b] = a;
            }
        }
        Ok(Permutation::unchecked(fwd[1..=i].to_vec()))
    }

    /// The largest i such that the reduction to [i] is unicyclic. Always at
    /// least 1; equal to n exactly when the permutation itself is unicyclic.
    ///
    /// Runs in O(n): deleting the largest element changes the cycle count by
    /// at most one, so the count can be maintained across the whole peel.
    pub fn unicyclic_statistic(&self) -> usize {
        raw_unicyclic_statistic(&self.values)
    }

    /// Position of the first ascent: the smallest k with π(k) < π(k+1), or
    /// n for the strictly decreasing permutation, so the statistic is total.
    pub fn first_ascent(&self) -> usize {
        let n = self.n();
        for k in 1..n {
            if self.values[k - 1] < self.values[k] {
                return k;
            }
        }
        n
    }

    /// Length of the longest increasing subsequence (patience sorting).
    pub fn lis_length(&self) -> usize {
        let mut tails: Vec<usize> = Vec::new();
        for &v in &self.values {
            let pos = tails.partition_point(|&t| t < v);
            if pos == tails.len() {
                tails.push(v);
            } else {
                tails[pos] = v;
            }
        }
        tails.len()
    }

    pub fn is_123_avoiding(&self) -> bool {
        self.lis_length() <= 2
    }

    /// True iff some index subsequence of this permutation is in the same
    /// relative order as `pattern`. Backtracking with a room-left prune;
    /// exponential in the worst case, which is fine at oracle scale.
    pub fn contains_pattern(&self, pattern: &Permutation) -> bool {
        let k = pattern.n();
        if k > self.n() {
            return false;
        }
        let mut chosen = Vec::with_capacity(k);
        extend_match(&self.values, &pattern.values, &mut chosen, 0)
    }

    /// Standardization of the first `len` entries: the unique permutation of
    /// [len] in the same relative order as the prefix.
    pub fn prefix_pattern(&self, len: usize) -> Result<Permutation> {
        if len < 1 || len > self.n() {
            return Err(Error::IndexOutOfRange {
                index: len,
                n: self.n(),
            });
        }
        Ok(Permutation::unchecked(standardize(&self.values[..len])))
    }

    /// The set of indices i whose sample-point list contains this
    /// permutation. For i < n, membership requires the (i+1)st entry to be
    /// the maximum of the first i+1 entries and the standardization of the
    /// first i entries to be unicyclic; n is a member iff the permutation
    /// itself is unicyclic. The sets of distinct i overlap, which is exactly
    /// why the i-indexed probabilities fail to form a distribution.
    pub fn rho_event_indices(&self) -> BTreeSet<usize> {
        let n = self.n();
        let mut out = BTreeSet::new();
        let mut prefix_max = self.values[0];
        for i in 1..n {
            let next = self.values[i];
            if next > prefix_max {
                // entry i+1 (1-based) is the running maximum
                let prefix = Permutation::unchecked(standardize(&self.values[..i]));
                if prefix.is_unicyclic() {
                    out.insert(i);
                }
                prefix_max = next;
            }
        }
        if self.is_unicyclic() {
            out.insert(n);
        }
        out
    }

    /// 1-based forward and inverse maps with a padding slot at index 0.
    fn maps(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n();
        let mut fwd = vec![0; n + 1];
        let mut inv = vec![0; n + 1];
        for (i, &v) in self.values.iter().enumerate() {
            fwd[i + 1] = v;
            inv[v] = i + 1;
        }
        (fwd, inv)
    }
}

fn extend_match(host: &[usize], pat: &[usize], chosen: &mut Vec<usize>, start: usize) -> bool {
    let j = chosen.len();
    if j == pat.len() {
        return true;
    }
    let room = pat.len() - j;
    if start + room > host.len() {
        return false;
    }
    for idx in start..=(host.len() - room) {
        let v = host[idx];
        let consistent = chosen
            .iter()
            .enumerate()
            .all(|(t, &prev)| (host[prev] < v) == (pat[t] < pat[j]));
        if consistent {
            chosen.push(idx);
            if extend_match(host, pat, chosen, idx + 1) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Ranks of a sequence of distinct values, as a one-line permutation of
/// [len]: the smallest value becomes 1, the next 2, and so on.
fn standardize(values: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| values[i]);
    let mut out = vec![0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank + 1;
    }
    out
}

/// Statistic kernel over a raw one-line buffer, so bulk simulations can
/// reuse a scratch vector without rebuilding a `Permutation` per draw.
/// `values` must be a rearrangement of 1..=len.
pub(crate) fn raw_unicyclic_statistic(values: &[usize]) -> usize {
    let n = values.len();
    let mut fwd = vec![0; n + 1];
    let mut inv = vec![0; n + 1];
    for (i, &v) in values.iter().enumerate() {
        fwd[i + 1] = v;
        inv[v] = i + 1;
    }
    let mut cycles = 0;
    let mut seen = vec![false; n + 1];
    for s in 1..=n {
        if !seen[s] {
            cycles += 1;
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                j = fwd[j];
            }
        }
    }
    for m in (2..=n).rev() {
        // state here is the reduction to [m]
        if cycles == 1 {
            return m;
        }
        let a = inv[m];
        let b = fwd[m];
        if a == m {
            cycles -= 1;
        } else {
            fwd[a] = b;
            inv[b] = a;
        }
    }
    1
}

impl fmt::Display for Permutation {
    /// Compact digits for n ≤ 9 ("2314"), space-separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts compact digits ("2314") or separated entries ("2 3 1 4",
    /// "2,3,1,4"); the compact form is only unambiguous for n ≤ 9.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values: Vec<usize> = if s.contains([' ', ',']) {
            s.split([' ', ','])
                .filter(|part| !part.is_empty())
                .map(|part| {
                    part.parse::<usize>()
                        .map_err(|_| Error::InvalidPermutation(format!("bad entry {part:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::InvalidPermutation(format!("bad character {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(values)
    }
}

/// Multiset of cycle lengths: a map from length k to the number of cycles
/// of that length. The weighted sum Σ k·j_k recovers n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleType {
    counts: BTreeMap<usize, usize>,
}

impl CycleType {
    pub fn new(counts: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (len, count) in counts {
            if len == 0 {
                return Err(Error::InvalidCycleType { n: 0, total: 0 });
            }
            if count > 0 {
                *map.entry(len).or_insert(0) += count;
            }
        }
        Ok(Self { counts: map })
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    /// Σ k·j_k, the size of the permutations carrying this type.
    pub fn weighted_total(&self) -> usize {
        self.counts.iter().map(|(len, count)| len * count).sum()
    }
}

/// Number of permutations of [n] with the given cycle type, by the Cauchy
/// formula n! / Π k^{j_k} · j_k!.
pub fn cauchy_count(n: usize, t: &CycleType) -> Result<BigUint> {
    let total = t.weighted_total();
    if total != n {
        return Err(Error::InvalidCycleType { n, total });
    }
    let mut denom = BigUint::one();
    for (&len, &count) in t.counts() {
        denom *= BigUint::from(len).pow(count as u32);
        denom *= crate::catalan::factorial(count as u64);
    }
    let num = crate::catalan::factorial(n as u64);
    debug_assert!((&num % &denom).is_zero());
    Ok(num / denom)
}

/// All cycle types on [n] (the partitions of n), in decreasing
/// lexicographic order of their part lists.
pub fn cycle_types(n: usize) -> Vec<CycleType> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    partitions_into(n, n, &mut parts, &mut out);
    out
}

fn partitions_into(
    remaining: usize,
    max_part: usize,
    parts: &mut Vec<usize>,
    out: &mut Vec<CycleType>,
) {
    if remaining == 0 {
        let mut counts = BTreeMap::new();
        for &p in parts.iter() {
            *counts.entry(p).or_insert(0) += 1;
        }
        out.push(CycleType { counts });
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        parts.push(part);
        partitions_into(remaining - part, part, parts, out);
        parts.pop();
    }
}

/// Lexicographic stream of all permutations of [n], gated by a cap because
/// n! grows past any reasonable test budget around n = 11.
pub fn enumerate_permutations(n: usize) -> Result<Permutations> {
    enumerate_permutations_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_permutations_with_cap(n: usize, cap: u64) -> Result<Permutations> {
    if n == 0 {
        return Err(Error::InvalidPermutation("empty one-line notation".into()));
    }
    if n as u64 > cap {
        return Err(Error::CapExceeded { n: n as u64, cap });
    }
    Ok(Permutations {
        next: Some((1..=n).collect()),
    })
}

/// Iterator over S_n in lexicographic order of one-line notation.
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let item = Permutation::unchecked(current.clone());
        self.next = next_lexicographic(current);
        Some(item)
    }
}

/// Steps a one-line word to its lexicographic successor in place, or
/// reports that the word was the final (decreasing) one.
fn next_lexicographic(mut v: Vec<usize>) -> Option<Vec<usize>> {
    let n = v.len();
    if n <= 1 {
        return None;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(values: &[usize]) -> Permutation {
        Permutation::new(values.to_vec()).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert_eq!(perm(&[2, 3, 4, 1]).n(), 4);
        assert_eq!(perm(&[1]).n(), 1);
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn cycle_decomposition_is_canonical() {
        assert_eq!(
            perm(&[2, 3, 4, 1]).cycle_decomposition(),
            vec![vec![1, 2, 3, 4]]
        );
        assert_eq!(
            perm(&[1, 2, 3, 4]).cycle_decomposition(),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
        assert_eq!(
            perm(&[2, 1, 4, 3]).cycle_decomposition(),
            vec![vec![1, 2], vec![3, 4]]
        );
    }

    #[test]
    fn unicyclic_detection() {
        assert!(perm(&[2, 3, 4, 1]).is_unicyclic());
        assert!(!perm(&[1, 2, 3, 4]).is_unicyclic());
        assert!(perm(&[1]).is_unicyclic());
        let count = enumerate_permutations(4)
            .unwrap()
            .filter(Permutation::is_unicyclic)
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn reduction_bridges_cycles() {
        // deleting 6 from 452613 must send 4 directly to 3
        let p = perm(&[4, 5, 2, 6, 1, 3]);
        assert_eq!(p.reduce(5).unwrap(), perm(&[4, 5, 2, 3, 1]));
        assert_eq!(p.reduce(6).unwrap(), p);
        assert_eq!(p.reduce(1).unwrap(), perm(&[1]));
        assert!(p.reduce(0).is_err());
        assert!(p.reduce(7).is_err());
    }

    #[test]
    fn unicyclic_statistic_examples() {
        assert_eq!(perm(&[2, 3, 1, 4]).unicyclic_statistic(), 3);
        assert_eq!(perm(&[2, 3, 4, 1]).unicyclic_statistic(), 4);
        assert_eq!(perm(&[1]).unicyclic_statistic(), 1);
        // identity reduces to the 1-cycle and nothing larger
        assert_eq!(perm(&[1, 2, 3, 4]).unicyclic_statistic(), 1);
    }

    #[test]
    fn unicyclic_statistic_histogram_s4() {
        let mut histogram = [0usize; 5];
        for p in enumerate_permutations(4).unwrap() {
            histogram[p.unicyclic_statistic()] += 1;
        }
        assert_eq!(histogram[1..], [12, 4, 2, 6]);
    }

    #[test]
    fn unicyclic_statistic_matches_reduction_definition() {
        // the O(n) peel must agree with the direct definition
        for p in enumerate_permutations(6).unwrap() {
            let direct = (1..=6)
                .rev()
                .find(|&i| p.reduce(i).unwrap().is_unicyclic())
                .unwrap();
            assert_eq!(p.unicyclic_statistic(), direct, "{p}");
        }
    }

    #[test]
    fn first_ascent_examples() {
        assert_eq!(perm(&[4, 3, 2, 1]).first_ascent(), 4);
        assert_eq!(perm(&[3, 4, 2, 1]).first_ascent(), 1);
        assert_eq!(perm(&[1]).first_ascent(), 1);
        let mut histogram = [0usize; 5];
        for p in enumerate_permutations(4).unwrap() {
            histogram[p.first_ascent()] += 1;
        }
        assert_eq!(histogram[1..], [12, 8, 3, 1]);
    }

    #[test]
    fn lis_and_avoidance() {
        assert_eq!(perm(&[1, 2, 3, 4]).lis_length(), 4);
        assert_eq!(perm(&[4, 3, 2, 1]).lis_length(), 1);
        assert_eq!(perm(&[3, 1, 4, 2]).lis_length(), 2);
        assert_eq!(perm(&[4, 5, 2, 6, 1, 3]).lis_length(), 3);
        assert!(perm(&[4, 3, 2, 1]).is_123_avoiding());
        assert!(!perm(&[1, 2, 3, 4]).is_123_avoiding());
        let count = enumerate_permutations(4)
            .unwrap()
            .filter(Permutation::is_123_avoiding)
            .count();
        assert_eq!(count, 14);
    }

    #[test]
    fn pattern_containment() {
        assert!(perm(&[5, 4, 2, 1, 3]).contains_pattern(&perm(&[3, 1, 2])));
        let p = perm(&[2, 4, 1, 3]);
        assert!(p.contains_pattern(&p));
        assert!(!perm(&[4, 3, 2, 1]).contains_pattern(&perm(&[1, 2, 3])));
        assert!(!perm(&[1, 2]).contains_pattern(&perm(&[1, 2, 3])));
    }

    #[test]
    fn rho_event_indices_match_table_rows() {
        assert_eq!(
            perm(&[2, 3, 1, 4]).rho_event_indices(),
            BTreeSet::from([1, 3])
        );
        assert!(perm(&[3, 2, 1, 4]).rho_event_indices().is_empty());
        assert_eq!(
            perm(&[2, 3, 4, 1]).rho_event_indices(),
            BTreeSet::from([1, 4])
        );
    }

    #[test]
    fn cauchy_counts_s4() {
        let count = |pairs: &[(usize, usize)]| {
            cauchy_count(4, &CycleType::new(pairs.iter().copied()).unwrap()).unwrap()
        };
        assert_eq!(count(&[(4, 1)]), BigUint::from(6u32));
        assert_eq!(count(&[(1, 4)]), BigUint::from(1u32));
        assert_eq!(count(&[(2, 1), (1, 2)]), BigUint::from(6u32));
        assert_eq!(count(&[(2, 2)]), BigUint::from(3u32));
        assert_eq!(count(&[(3, 1), (1, 1)]), BigUint::from(8u32));
        let bad = CycleType::new([(3, 1)]).unwrap();
        assert!(cauchy_count(4, &bad).is_err());
    }

    #[test]
    fn cycle_type_partitions() {
        assert_eq!(cycle_types(4).len(), 5);
        assert_eq!(cycle_types(10).len(), 42);
        for t in cycle_types(7) {
            assert_eq!(t.weighted_total(), 7);
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_capped() {
        let all: Vec<Permutation> = enumerate_permutations(3).unwrap().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], perm(&[1, 2, 3]));
        assert_eq!(all[5], perm(&[3, 2, 1]));
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);

        let single: Vec<Permutation> = enumerate_permutations(1).unwrap().collect();
        assert_eq!(single, vec![perm(&[1])]);
        assert_eq!(enumerate_permutations(4).unwrap().count(), 24);
        assert!(enumerate_permutations(11).is_err());
        assert!(enumerate_permutations_with_cap(5, 4).is_err());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let p = perm(&[2, 3, 1, 4]);
        assert_eq!(p.to_string(), "2314");
        assert_eq!("2314".parse::<Permutation>().unwrap(), p);
        assert_eq!("2, 3, 1, 4".parse::<Permutation>().unwrap(), p);
        let big = Permutation::identity(12).unwrap();
        assert_eq!(big.to_string(), "1 2 3 4 5 6 7 8 9 10 11 12");
        assert_eq!(big.to_string().parse::<Permutation>().unwrap(), big);
        assert!("".parse::<Permutation>().is_err());
        assert!("1x2".parse::<Permutation>().is_err());
    }
}
