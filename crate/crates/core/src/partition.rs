//! Cyclically ordered partitions of `{1, ..., n}` — the universal cell label.
//!
//! A cyclic partition is stored in canonical rotation: the part containing
//! `n` stands on the last position and every part is a sorted index set.
//! Equality, hashing and ordering all act on this canonical form, which
//! identifies a cyclic sequence of parts with a linear one.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::linkage::{Linkage, LinkageError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts do not form a partition of 1..={0}")]
    NotAPartition(usize),

    #[error("empty part list")]
    NoParts,

    #[error("cannot parse label {0:?}")]
    BadLabel(String),

    #[error("ground sets differ: {0} vs {1}")]
    GroundSetMismatch(usize, usize),

    #[error(transparent)]
    Linkage(#[from] LinkageError),

    #[error("no unique finest common coarsening: {0:?} are incomparable")]
    AmbiguousMeet(Vec<String>),

    #[error("partition {0} is not admissible for the linkage")]
    NotAdmissible(String),
}

/// A cyclically ordered partition of `{1, ..., n}` in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicPartition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl fmt::Debug for CyclicPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

impl fmt::Display for CyclicPartition {
    /// Label grammar: parts separated by `|`, indices by `,` — e.g. `1|2|3|4,5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl CyclicPartition {
    /// Canonicalize a list of parts into a cyclic partition of `{1..n}`:
    /// sort each part, rotate the part containing `n` to the last position.
    pub fn new(parts: Vec<Vec<usize>>, n: usize) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::NoParts);
        }
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for part in &parts {
            if part.is_empty() {
                return Err(PartitionError::NotAPartition(n));
            }
            for &i in part {
                if i == 0 || i > n || seen[i] {
                    return Err(PartitionError::NotAPartition(n));
                }
                seen[i] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(PartitionError::NotAPartition(n));
        }
        let mut parts: Vec<Vec<usize>> = parts;
        for part in &mut parts {
            part.sort_unstable();
        }
        let pos = parts
            .iter()
            .position(|p| p.contains(&n))
            .expect("n is covered");
        let len = parts.len();
        parts.rotate_left((pos + 1) % len);
        Ok(Self { n, parts })
    }

    /// Parse the label grammar `1|2|3|4,5` over ground set `{1..n}`.
    pub fn parse(text: &str, n: usize) -> Result<Self, PartitionError> {
        let bad = || PartitionError::BadLabel(text.to_string());
        let mut parts = Vec::new();
        for chunk in text.split('|') {
            let mut part = Vec::new();
            for token in chunk.split(',') {
                let idx: usize = token.trim().parse().map_err(|_| bad())?;
                part.push(idx);
            }
            parts.push(part);
        }
        Self::new(parts, n)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    /// Index (into `parts`) of the part containing `i`.
    pub fn part_containing(&self, i: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&i))
    }

    /// The part containing `n` (always the last one in canonical form).
    pub fn last_part(&self) -> &[usize] {
        self.parts.last().expect("nonempty")
    }

    pub fn is_all_singletons(&self) -> bool {
        self.parts.iter().all(|p| p.len() == 1)
    }

    /// True iff `self` refines `coarse`: some rotation of this cyclic part
    /// sequence groups into consecutive runs whose unions are exactly the
    /// parts of `coarse`, in cyclic order. Reflexive. All rotations are
    /// tried because the run containing `n` may wrap.
    pub fn refines(&self, coarse: &CyclicPartition) -> Result<bool, PartitionError> {
        if self.n != coarse.n {
            return Err(PartitionError::GroundSetMismatch(self.n, coarse.n));
        }
        let m = self.parts.len();
        if m < coarse.parts.len() {
            return Ok(false);
        }
        'rotation: for rot in 0..m {
            let mut fine_idx = 0usize;
            for coarse_part in &coarse.parts {
                let mut need = coarse_part.len();
                while need > 0 {
                    if fine_idx == m {
                        continue 'rotation;
                    }
                    let part = &self.parts[(rot + fine_idx) % m];
                    if part.len() > need || !part.iter().all(|i| coarse_part.contains(i)) {
                        continue 'rotation;
                    }
                    need -= part.len();
                    fine_idx += 1;
                }
            }
            if fine_idx == m {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// All strictly coarser cyclic partitions, at every level down to the
    /// single-part one. Generated by merging cyclically consecutive runs:
    /// a subset of "cut" positions with k cuts produces k runs.
    pub fn coarsenings(&self) -> BTreeSet<CyclicPartition> {
        let m = self.parts.len();
        let mut out = BTreeSet::new();
        // Mask bit i set = cut before part i (i.e. part i starts a run).
        for mask in 1u64..(1u64 << m) {
            if mask == (1u64 << m) - 1 {
                continue; // all cuts: the partition itself
            }
            let cuts: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let mut merged: Vec<Vec<usize>> = Vec::with_capacity(cuts.len());
            for (c, &start) in cuts.iter().enumerate() {
                let end = if c + 1 < cuts.len() {
                    cuts[c + 1]
                } else {
                    m + cuts[0]
                };
                let mut run = Vec::new();
                for j in start..end {
                    run.extend_from_slice(&self.parts[j % m]);
                }
                merged.push(run);
            }
            out.insert(CyclicPartition::new(merged, self.n).expect("valid by construction"));
        }
        out
    }

    /// The coarsenings one dimension down: merge one cyclically adjacent
    /// pair of parts. These are exactly the codimension-1 face labels.
    pub fn adjacent_merges(&self) -> Vec<CyclicPartition> {
        let m = self.parts.len();
        if m < 2 {
            return Vec::new();
        }
        let mut out = BTreeSet::new();
        for i in 0..m {
            let j = (i + 1) % m;
            if m == 2 && i == 1 {
                break; // merging (1,0) equals merging (0,1)
            }
            let mut parts: Vec<Vec<usize>> = Vec::with_capacity(m - 1);
            for k in 0..m {
                if k == j {
                    continue;
                }
                let mut part = self.parts[k].clone();
                if k == i {
                    part.extend_from_slice(&self.parts[j]);
                }
                parts.push(part);
            }
            out.insert(CyclicPartition::new(parts, self.n).expect("valid by construction"));
        }
        out.into_iter().collect()
    }

    /// Apply an index relabeling `sigma` (1-based permutation table:
    /// `i -> sigma[i-1]`) and re-canonicalize.
    pub fn relabeled(&self, sigma: &[usize]) -> Result<Self, PartitionError> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.iter().map(|&i| sigma[i - 1]).collect())
            .collect();
        Self::new(parts, self.n)
    }

    /// Remove index `i` from its part, dropping the part if it was a
    /// singleton; the remaining indices above `i` are shifted down by one.
    /// This is the forgetting map on labels (used with `i = n`).
    pub fn delete_index(&self, i: usize) -> Result<Self, PartitionError> {
        let shift = |j: usize| if j > i { j - 1 } else { j };
        let mut parts = Vec::new();
        for part in &self.parts {
            let reduced: Vec<usize> = part
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| shift(j))
                .collect();
            if !reduced.is_empty() {
                parts.push(reduced);
            }
        }
        Self::new(parts, self.n - 1)
    }

    pub fn label_parts(&self) -> Vec<Vec<usize>> {
        self.parts.clone()
    }
}

/// The finest admissible common coarsening of `a` and `b` (the label of the
/// intersection of the two closed cells), or `None` when no admissible
/// common coarsening exists. A structural-anomaly error is raised if the
/// common coarsenings have several incomparable finest elements, which
/// would contradict the intersection property of the complex.
pub fn meet(
    a: &CyclicPartition,
    b: &CyclicPartition,
    linkage: &Linkage,
) -> Result<Option<CyclicPartition>, PartitionError> {
    if a.ground_size() != b.ground_size() {
        return Err(PartitionError::GroundSetMismatch(
            a.ground_size(),
            b.ground_size(),
        ));
    }
    if !linkage.is_admissible(a)? {
        return Err(PartitionError::NotAdmissible(a.to_string()));
    }
    if !linkage.is_admissible(b)? {
        return Err(PartitionError::NotAdmissible(b.to_string()));
    }
    let mut above_a = a.coarsenings();
    above_a.insert(a.clone());
    let mut above_b = b.coarsenings();
    above_b.insert(b.clone());
    let mut common: Vec<&CyclicPartition> = Vec::new();
    for p in above_a.intersection(&above_b) {
        if linkage.is_admissible(p)? {
            common.push(p);
        }
    }
    if common.is_empty() {
        return Ok(None);
    }
    // The finest element refines every other common coarsening.
    let mut finest: Vec<&CyclicPartition> = Vec::new();
    'candidates: for &cand in &common {
        for &other in &common {
            if !cand.refines(other)? {
                continue 'candidates;
            }
        }
        finest.push(cand);
    }
    match finest.len() {
        1 => Ok(Some(finest[0].clone())),
        0 => {
            // No minimum: report the minimal elements as the anomaly.
            let mut minimal = Vec::new();
            for &cand in &common {
                let mut is_minimal = true;
                for &other in &common {
                    if other != cand && other.refines(cand)? {
                        is_minimal = false;
                        break;
                    }
                }
                if is_minimal {
                    minimal.push(cand.to_string());
                }
            }
            Err(PartitionError::AmbiguousMeet(minimal))
        }
        _ => Err(PartitionError::AmbiguousMeet(
            finest.iter().map(|p| p.to_string()).collect(),
        )),
    }
}

/// All admissible cyclically ordered partitions of `{1..n}` into exactly
/// `parts_count` parts, in canonical form and lexicographic order.
pub fn enumerate_admissible(
    linkage: &Linkage,
    parts_count: usize,
) -> Result<Vec<CyclicPartition>, PartitionError> {
    let n = linkage.n();
    if parts_count < 3 || parts_count > n {
        return Err(PartitionError::BadLabel(format!(
            "part count {parts_count} out of range 3..={n}"
        )));
    }
    // Canonical form = parts listed in cyclic order with n in the last part,
    // so enumerating assignments of 1..n-1 to parts 0..m-1 (n fixed in part
    // m-1) visits each canonical label exactly once.
    let m = parts_count;
    let mut assignment = vec![0usize; n - 1];
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); m];
    parts[m - 1].push(n);
    let mut out = Vec::new();
    enumerate_rec(linkage, &mut assignment, 0, &mut parts, m, &mut out)?;
    out.sort();
    Ok(out)
}

fn enumerate_rec(
    linkage: &Linkage,
    assignment: &mut [usize],
    idx: usize,
    parts: &mut Vec<Vec<usize>>,
    m: usize,
    out: &mut Vec<CyclicPartition>,
) -> Result<(), PartitionError> {
    let n = linkage.n();
    if idx == n - 1 {
        if parts.iter().all(|p| !p.is_empty()) {
            // new() re-sorts the last part, where n was seeded up front.
            let candidate = CyclicPartition::new(parts.clone(), n)?;
            if linkage.is_admissible(&candidate)? {
                out.push(candidate);
            }
        }
        return Ok(());
    }
    // Elements are distributed in increasing order, so parts stay sorted.
    let remaining = n - 1 - idx;
    for part_idx in 0..m {
        // Prune: every still-empty part must receive one of the remaining
        // elements (part m-1 already holds n).
        let empties = parts.iter().take(m - 1).filter(|p| p.is_empty()).count();
        let will_fill = usize::from(parts[part_idx].is_empty() && part_idx != m - 1);
        if empties - will_fill > remaining - 1 {
            continue;
        }
        parts[part_idx].push(idx + 1);
        assignment[idx] = part_idx;
        enumerate_rec(linkage, assignment, idx + 1, parts, m, out)?;
        parts[part_idx].pop();
    }
    Ok(())
}
