//! Contract-checked divide-and-conquer sorting.
//!
//! Three generic drivers ([`run_simple`], [`run_pivot`], [`run_two_array`])
//! own the recursion of a divide-and-conquer algorithm and, depending on the
//! [`CheckMode`], assert the obligations that make it correct: pre- and
//! postconditions, non-interference outside the working window, the
//! partition predicate, base-case shortness and a strictly decreasing
//! variant. The sorts in this crate are instances of those drivers, plus a
//! bottom-up merge sort whose loops check their invariants instead.
//!
//! ```
//! use dcsort::{merge_sort_rec, Checker, CheckMode};
//!
//! let mut a = vec![3, 1, 2];
//! merge_sort_rec(&mut a, &Checker::new(CheckMode::Full)).unwrap();
//! assert_eq!(a, [1, 2, 3]);
//! ```

// Violations carry full before/after state by design.
#![allow(clippy::result_large_err)]

pub mod contracts;
pub mod laws;
pub mod merge_rec;
pub mod msort_iter;
pub mod msort_rec;
pub mod order;
pub mod quicksort;
pub mod schema;
pub mod trace;
pub mod verify;

use std::fmt;
use std::str::FromStr;

pub use contracts::{check_triple, check_variant, ensure, Breach, CheckMode, Checker, Fault, Location, Proviso, Violation};
pub use merge_rec::{fp, merge_two};
pub use msort_iter::{copy, merge_iter, merge_pair, merge_sort_iter, merges};
pub use msort_rec::{merge_in_place, merge_sort_rec, merge_sort_slice};
pub use order::{is_perm, is_sorted, outside_unchanged, uniformly_leq, SliceBounds, Snapshot, UsageError};
pub use quicksort::{partition, quicksort};
pub use schema::{run_pivot, run_simple, run_two_array, SchemaParts, TwoArrayPartition, TwoArraySchemaParts};
pub use trace::{Phase, TraceDocument, TraceEvent};

/// The three complete sorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Recursive merge sort.
    Rec,
    /// Bottom-up merge sort.
    Iter,
    Quick,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Rec, Algorithm::Iter, Algorithm::Quick];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rec => msort_rec::ALGO,
            Algorithm::Iter => msort_iter::ALGO,
            Algorithm::Quick => quicksort::ALGO,
        }
    }

    pub fn sort<T: Ord + Clone>(self, a: &mut [T], ctx: &Checker) -> Result<(), Violation<T>> {
        match self {
            Algorithm::Rec => merge_sort_rec(a, ctx),
            Algorithm::Iter => merge_sort_iter(a, ctx),
            Algorithm::Quick => quicksort(a, ctx),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}' (expected rec, iter or quick)"))
    }
}

impl serde::Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}
