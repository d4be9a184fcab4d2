//! Slice windows, entry snapshots and the ordering predicates every contract
//! in this crate is phrased in.

use std::collections::BTreeMap;
use std::ops::{Deref, Range};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UsageError {
    #[error("invalid window: need 0 <= l <= r <= n, got l={l}, r={r}, n={n}")]
    Bounds { l: usize, r: usize, n: usize },
    #[error("length mismatch: {what} has length {got}, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
}

/// A half-open window `[l, r)` over an array of length `n`.
///
/// Construction enforces `l <= r <= n`, so every value of this type already
/// satisfies the bound shape required of a slice precondition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SliceBounds {
    l: usize,
    r: usize,
    n: usize,
}

impl SliceBounds {
    pub fn new(l: usize, r: usize, n: usize) -> Result<Self, UsageError> {
        if l <= r && r <= n {
            Ok(SliceBounds { l, r, n })
        } else {
            Err(UsageError::Bounds { l, r, n })
        }
    }

    /// The whole array `[0, n)`.
    pub fn full(n: usize) -> Self {
        SliceBounds { l: 0, r: n, n }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.r - self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == self.r
    }

    pub fn range(&self) -> Range<usize> {
        self.l..self.r
    }

    /// A sub-window over the same array; fails unless `l <= l2 <= r2 <= r`.
    pub fn sub(&self, l2: usize, r2: usize) -> Result<Self, UsageError> {
        if self.l <= l2 && l2 <= r2 && r2 <= self.r {
            Ok(SliceBounds {
                l: l2,
                r: r2,
                n: self.n,
            })
        } else {
            Err(UsageError::Bounds {
                l: l2,
                r: r2,
                n: self.n,
            })
        }
    }
}

/// Immutable copy of an array's contents taken on entry to a call.
///
/// Plays the role of `old(a)`: post-conditions compare the current state
/// against it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Snapshot<T> {
    elems: Box<[T]>,
}

impl<T: Clone> Snapshot<T> {
    pub fn capture(a: &[T]) -> Self {
        Snapshot { elems: a.into() }
    }
}

impl<T> Snapshot<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.elems
    }
}

impl<T> Deref for Snapshot<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.elems
    }
}

/// Non-strict ascending order, checked on adjacent pairs.
pub fn is_sorted<T: Ord>(s: &[T]) -> bool {
    s.windows(2).all(|w| w[0] <= w[1])
}

/// Multiset equality.
pub fn is_perm<T: Ord>(s: &[T], t: &[T]) -> bool {
    if s.len() != t.len() {
        return false;
    }
    let mut counts: BTreeMap<&T, isize> = BTreeMap::new();
    for x in s {
        *counts.entry(x).or_default() += 1;
    }
    for x in t {
        match counts.get_mut(x) {
            Some(c) if *c > 0 => *c -= 1,
            _ => return false,
        }
    }
    counts.values().all(|&c| c == 0)
}

/// True iff `after` agrees with `before` on `[0, l)` and `[r, n)`.
pub fn outside_unchanged<T: PartialEq>(
    before: &[T],
    after: &[T],
    b: SliceBounds,
) -> Result<bool, UsageError> {
    if before.len() != b.n() {
        return Err(UsageError::Length {
            what: "before",
            got: before.len(),
            expected: b.n(),
        });
    }
    if after.len() != b.n() {
        return Err(UsageError::Length {
            what: "after",
            got: after.len(),
            expected: b.n(),
        });
    }
    Ok(before[..b.l()] == after[..b.l()] && before[b.r()..] == after[b.r()..])
}

/// True iff every element of `s` is `<=` every element of `t`.
pub fn uniformly_leq<T: Ord>(s: &[T], t: &[T]) -> bool {
    match (s.iter().max(), t.iter().min()) {
        (Some(hi), Some(lo)) => hi <= lo,
        _ => true,
    }
}
