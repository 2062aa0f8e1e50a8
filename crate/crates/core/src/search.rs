//! Subset sweeps shared by the frame and fusion deciders.
//!
//! Subsets are visited by increasing size and lexicographically within a size,
//! so the first hit is the minimal witness in that order. Each size is split
//! into branches by its first two indices; branches are ordered the same way
//! as the subsets they contain, so keeping the hit from the smallest branch
//! reproduces the sequential answer for any number of workers.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::exact::{integer_complement, integer_rank};
use crate::linalg::modp::{reduce_vector, Echelon};

pub const DEFAULT_MAX_MEMBERS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads for subset sweeps. Never changes results.
    pub jobs: usize,
    /// Largest family size an exhaustive sweep accepts.
    pub max_members: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            max_members: DEFAULT_MAX_MEMBERS,
        }
    }
}

impl SearchOptions {
    pub fn with_jobs(jobs: usize) -> Self {
        Self {
            jobs,
            ..Self::default()
        }
    }

    pub(crate) fn check_members(&self, m: usize) -> Result<()> {
        if m > self.max_members {
            return Err(Error::CapExceeded {
                what: "member count",
                value: m,
                cap: self.max_members,
            });
        }
        Ok(())
    }
}

/// Runs `f` over branch indices `0..branches` and returns the hit with the
/// smallest index.
pub(crate) fn first_hit<T, F>(branches: usize, jobs: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync,
{
    #[cfg(feature = "std")]
    if jobs > 1 && branches > 1 {
        return parallel_first_hit(branches, jobs, &f);
    }
    let _ = jobs;
    (0..branches).find_map(|b| f(b).map(|t| (b, t)))
}

#[cfg(feature = "std")]
fn parallel_first_hit<T, F>(branches: usize, jobs: usize, f: &F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync,
{
    use core::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let next = AtomicUsize::new(0);
    let best = AtomicUsize::new(usize::MAX);
    let hits: Mutex<Vec<(usize, T)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(branches) {
            scope.spawn(|| loop {
                let b = next.fetch_add(1, Ordering::Relaxed);
                // Branches past a known hit cannot improve the answer.
                if b >= branches || b > best.load(Ordering::Relaxed) {
                    break;
                }
                if let Some(t) = f(b) {
                    best.fetch_min(b, Ordering::Relaxed);
                    hits.lock().expect("no worker panicked").push((b, t));
                }
            });
        }
    });
    let hits = hits.into_inner().expect("no worker panicked");
    hits.into_iter().min_by_key(|(b, _)| *b)
}

/// Prefix of every branch for `k`-subsets of `m` items, in lex order.
fn branch_prefixes(m: usize, k: usize) -> Vec<Vec<usize>> {
    match k {
        0 => alloc::vec![Vec::new()],
        1 => (0..m).map(|a| alloc::vec![a]).collect(),
        _ => {
            let mut out = Vec::new();
            for a in 0..=m - k {
                for b in a + 1..=m - k + 1 {
                    out.push(alloc::vec![a, b]);
                }
            }
            out
        }
    }
}

/// Vectors grouped into members, with cached primitive integer forms and
/// residues mod p. A frame is the special case of one vector per member.
#[derive(Clone, Debug)]
pub(crate) struct SpanFamily {
    dim: usize,
    ints: Vec<Vec<Vec<BigInt>>>,
    residues: Vec<Vec<Vec<u64>>>,
}

impl SpanFamily {
    pub(crate) fn new(dim: usize, ints: Vec<Vec<Vec<BigInt>>>) -> Self {
        let residues = ints
            .iter()
            .map(|g| g.iter().map(|v| reduce_vector(v)).collect())
            .collect();
        Self { dim, ints, residues }
    }

    pub(crate) fn members(&self) -> usize {
        self.ints.len()
    }

    fn insert_member(&self, ech: &mut Echelon, i: usize) {
        for r in &self.residues[i] {
            ech.insert(r);
        }
    }

    pub(crate) fn rows(&self, subset: impl IntoIterator<Item = usize>) -> Vec<&[BigInt]> {
        subset
            .into_iter()
            .flat_map(|i| self.ints[i].iter().map(Vec::as_slice))
            .collect()
    }

    pub(crate) fn exact_rank(&self, subset: &[usize]) -> usize {
        let rows: Vec<Vec<BigInt>> = self
            .rows(subset.iter().copied())
            .into_iter()
            .map(<[BigInt]>::to_vec)
            .collect();
        integer_rank(&rows)
    }

    /// Primitive integer basis of `(span subset)^⊥`.
    pub(crate) fn complement(&self, subset: &[usize]) -> Vec<Vec<BigInt>> {
        integer_complement(&self.rows(subset.iter().copied()), self.dim)
    }

    /// Visits, in (size, lex) order over `|I| ≤ ⌊m/2⌋`, every `I` for which
    /// neither `I` nor its complement spans, and returns the first `I` where
    /// `f(I, Iᶜ)` produces a witness.
    pub(crate) fn first_partition<T, F>(&self, opts: &SearchOptions, f: F) -> Result<Option<(Vec<usize>, T)>>
    where
        T: Send,
        F: Fn(&[usize], &[usize]) -> Option<T> + Sync,
    {
        let m = self.members();
        opts.check_members(m)?;
        for k in 0..=m / 2 {
            let prefixes = branch_prefixes(m, k);
            let hit = first_hit(prefixes.len(), opts.jobs, |b| {
                let mut ech = Echelon::new(self.dim);
                let mut subset = Vec::with_capacity(k);
                for &i in &prefixes[b] {
                    self.insert_member(&mut ech, i);
                    subset.push(i);
                }
                if ech.is_full() {
                    return None;
                }
                let start = subset.last().map_or(0, |&i| i + 1);
                self.dfs_partition(k, start, &mut subset, &mut ech, &f)
            });
            if let Some((_, found)) = hit {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    fn dfs_partition<T, F>(
        &self,
        k: usize,
        start: usize,
        subset: &mut Vec<usize>,
        ech: &mut Echelon,
        f: &F,
    ) -> Option<(Vec<usize>, T)>
    where
        F: Fn(&[usize], &[usize]) -> Option<T>,
    {
        let m = self.members();
        if subset.len() == k {
            return self.leaf_partition(subset, f);
        }
        let need = k - subset.len();
        for i in start..=m - need {
            let mark = ech.rank();
            self.insert_member(ech, i);
            subset.push(i);
            // Supersets of a spanning set span, so nothing below can fail.
            let found = if ech.is_full() {
                None
            } else {
                self.dfs_partition(k, i + 1, subset, ech, f)
            };
            subset.pop();
            ech.truncate(mark);
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn leaf_partition<T, F>(&self, subset: &[usize], f: &F) -> Option<(Vec<usize>, T)>
    where
        F: Fn(&[usize], &[usize]) -> Option<T>,
    {
        let m = self.members();
        let rest = complement_indices(m, subset);
        let mut ech = Echelon::new(self.dim);
        for &i in &rest {
            self.insert_member(&mut ech, i);
            if ech.is_full() {
                return None;
            }
        }
        // Deficient mod p; confirm both sides exactly.
        if self.exact_rank(subset) == self.dim || self.exact_rank(&rest) == self.dim {
            return None;
        }
        f(subset, &rest).map(|t| (subset.to_vec(), t))
    }

    /// First `k`-subset (lex order) whose members are linearly dependent,
    /// decided exactly. Only meaningful for one vector per member.
    pub(crate) fn first_dependent(&self, k: usize, opts: &SearchOptions) -> Option<Vec<usize>> {
        let m = self.members();
        if k > m {
            return None;
        }
        let prefixes = branch_prefixes(m, k);
        first_hit(prefixes.len(), opts.jobs, |b| {
            let mut ech = Echelon::new(self.dim);
            let mut subset = Vec::with_capacity(k);
            for &i in &prefixes[b] {
                self.insert_member(&mut ech, i);
                subset.push(i);
            }
            let start = subset.last().map_or(0, |&i| i + 1);
            self.dfs_dependent(k, start, &mut subset, &mut ech)
        })
        .map(|(_, s)| s)
    }

    fn dfs_dependent(&self, k: usize, start: usize, subset: &mut Vec<usize>, ech: &mut Echelon) -> Option<Vec<usize>> {
        if subset.len() == k {
            if ech.rank() == k {
                return None;
            }
            return (self.exact_rank(subset) < k).then(|| subset.clone());
        }
        let need = k - subset.len();
        for i in start..=self.members() - need {
            let mark = ech.rank();
            self.insert_member(ech, i);
            subset.push(i);
            let found = self.dfs_dependent(k, i + 1, subset, ech);
            subset.pop();
            ech.truncate(mark);
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

pub(crate) fn complement_indices(m: usize, subset: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(m - subset.len());
    let mut it = subset.iter().peekable();
    for i in 0..m {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

/// Calls `f` on every `k`-subset of `0..m` in lex order until it returns
/// `Some`.
pub fn find_combination<T>(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
    if k > m {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let Some(t) = f(&idx) {
            return Some(t);
        }
        let i = (0..k).rev().find(|&i| idx[i] < m - k + i)?;
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
