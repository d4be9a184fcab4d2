//! Recursive merge sort: the simple schema with `B = r - l < 2`,
//! `E = skip`, `D = (l + r) / 2` and `C = merge_in_place`.

use crate::contracts::{ensure, Breach, Checker, Location, Proviso, Violation};
use crate::merge_rec::merge_two;
use crate::msort_iter::{copy, merge_iter};
use crate::order::{is_perm, is_sorted, outside_unchanged, SliceBounds, Snapshot};
use crate::schema::{run_simple, SchemaParts};
use crate::Fault;

pub const ALGO: &str = "rec";

/// Which two-array merge backs [`merge_in_place`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeBackend {
    /// The recursive pivot merge ([`merge_two`]).
    #[default]
    Recursive,
    /// The loop merge ([`merge_iter`]).
    Iterative,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MergeSortParts {
    pub backend: MergeBackend,
}

impl<T: Ord + Clone> SchemaParts<T> for MergeSortParts {
    fn algo(&self) -> &'static str {
        ALGO
    }

    fn q(&self, a: &[T], l: usize, r: usize) -> bool {
        l <= r && r <= a.len()
    }

    fn is_base(&self, l: usize, r: usize) -> bool {
        r - l < 2
    }

    fn solve_base(&self, _: &mut [T], _: usize, _: usize, _: &Checker) -> Result<(), Violation<T>> {
        Ok(())
    }

    fn divide(&self, _: &mut [T], l: usize, r: usize, _: &Checker) -> Result<usize, Violation<T>> {
        Ok(l + (r - l) / 2)
    }

    fn combine(&self, a: &mut [T], l: usize, m: usize, r: usize, ctx: &Checker) -> Result<(), Violation<T>> {
        if ctx.has_fault(Fault::CombineSkip) {
            return Ok(());
        }
        ctx.nested(|| merge_in_place_with(a, l, m, r, self.backend, ctx))
    }

    fn r_post(&self, old: &[T], a: &[T], l: usize, r: usize) -> bool {
        is_sorted(&a[l..r]) && is_perm(&a[l..r], &old[l..r])
    }

    fn p(&self, a: &[T], l: usize, m: usize, r: usize) -> bool {
        l < m && m < r && r <= a.len()
    }

    fn preserved_across_child(&self, before: &[T], a: &[T], l: usize, r: usize) -> bool {
        is_perm(&a[l..r], &before[l..r])
    }
}

/// Sorts `a` in place.
pub fn merge_sort_rec<T: Ord + Clone>(a: &mut [T], ctx: &Checker) -> Result<(), Violation<T>> {
    merge_sort_slice(a, 0, a.len(), ctx)
}

/// Sorts `a[l..r)` in place, leaving the rest of `a` untouched.
pub fn merge_sort_slice<T: Ord + Clone>(a: &mut [T], l: usize, r: usize, ctx: &Checker) -> Result<(), Violation<T>> {
    merge_sort_slice_with(a, l, r, MergeBackend::default(), ctx)
}

pub fn merge_sort_slice_with<T: Ord + Clone>(
    a: &mut [T],
    l: usize,
    r: usize,
    backend: MergeBackend,
    ctx: &Checker,
) -> Result<(), Violation<T>> {
    match SliceBounds::new(l, r, a.len()) {
        Ok(b) => run_simple(&MergeSortParts { backend }, a, b, ctx),
        Err(e) => {
            let snap = Snapshot::capture(a);
            Err(Violation::new(Proviso::Pre, Location::new(ALGO, "merge_sort_slice", l, r, a.len()), e.to_string(), &snap, a))
        }
    }
}

/// Merges the adjacent sorted runs `a[l..m)` and `a[m..r)` in place.
pub fn merge_in_place<T: Ord + Clone>(a: &mut [T], l: usize, m: usize, r: usize, ctx: &Checker) -> Result<(), Violation<T>> {
    merge_in_place_with(a, l, m, r, MergeBackend::default(), ctx)
}

pub fn merge_in_place_with<T: Ord + Clone>(
    a: &mut [T],
    l: usize,
    m: usize,
    r: usize,
    backend: MergeBackend,
    ctx: &Checker,
) -> Result<(), Violation<T>> {
    let n = a.len();
    let loc = || Location::new(ALGO, "merge_in_place", l, r, n);
    if !(l < m && m < r && r <= n) {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(Proviso::Pre, loc(), format!("need 0 <= l < m < r <= {n}, got m={m}"), &snap, a));
    }
    let check = ctx.contracts();
    let old = check.then(|| Snapshot::capture(a));
    if let Some(old) = &old {
        ensure(is_sorted(&a[l..m]) && is_sorted(&a[m..r]), Proviso::Pre, || {
            "a[l..m) and a[m..r) must both be sorted".into()
        })
        .map_err(|e| e.at(loc(), old, a))?;
    }

    let merged = ctx.nested(|| match backend {
        MergeBackend::Recursive => merge_two(a, l, m, a, m, r, ctx),
        MergeBackend::Iterative => {
            let mut c = vec![a[l].clone(); r - l];
            merge_iter(&a[l..m], &a[m..r], &mut c, ctx).map(|()| c)
        }
    });
    // Nested violations describe the scratch buffer or the read-only view;
    // re-anchor them on this call so before/after are views of `a`.
    let merged = merged.map_err(|v| reanchor(v, loc(), old.as_ref(), a))?;
    ctx.nested(|| copy(&merged, 0, a, l, r - l, ctx)).map_err(|v| reanchor(v, loc(), old.as_ref(), a))?;

    if let Some(old) = &old {
        ensure(is_sorted(&a[l..r]), Proviso::Post, || "a[l..r) not sorted".into())
            .and_then(|()| {
                ensure(is_perm(&a[l..r], &old[l..r]), Proviso::Post, || {
                    "a[l..r) is not a permutation of its entry value".into()
                })
            })
            .and_then(|()| {
                let w = SliceBounds::new(l, r, n).expect("checked above");
                ensure(outside_unchanged(old, a, w).unwrap_or(false), Proviso::NonInterference, || {
                    format!("a modified outside [{l}..{r})")
                })
            })
            .map_err(|e| e.at(loc(), old, a))?;
    }
    Ok(())
}

fn reanchor<T: Clone>(inner: Violation<T>, loc: Location, old: Option<&Snapshot<T>>, a: &[T]) -> Violation<T> {
    if inner.before.len() == a.len() && inner.location.algo == ALGO {
        return inner;
    }
    let snap = old.cloned().unwrap_or_else(|| Snapshot::capture(a));
    let mut v = Breach {
        proviso: inner.proviso,
        detail: format!("in {}: {}", inner.location, inner.detail),
    }
    .at(loc, &snap, a);
    v.operands.push(inner.after);
    v.operands.extend(inner.operands);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::CheckMode;
    use crate::test_oracle::{all_arrays, insertion_sort};

    const MODES: [CheckMode; 3] = [CheckMode::Unchecked, CheckMode::Contracts, CheckMode::Full];

    #[test]
    fn sort_examples() {
        for mode in MODES {
            let ctx = Checker::new(mode);
            for input in [vec![], vec![3, 1, 2], vec![2, 2, 1]] {
                let mut a = input.clone();
                merge_sort_rec(&mut a, &ctx).unwrap();
                assert_eq!(a, insertion_sort(&input));
            }
        }
    }

    #[test]
    fn slice_examples() {
        let ctx = Checker::new(CheckMode::Full);
        let mut a = vec![9, 7, 4, 9];
        merge_sort_slice(&mut a, 1, 3, &ctx).unwrap();
        assert_eq!(a, vec![9, 4, 7, 9]);
        let mut a = vec![5];
        merge_sort_slice(&mut a, 0, 1, &ctx).unwrap();
        assert_eq!(a, vec![5]);
        let mut a = vec![4, 3, 2, 1];
        merge_sort_slice(&mut a, 0, 4, &ctx).unwrap();
        assert_eq!(a, insertion_sort(&[4, 3, 2, 1]));
    }

    #[test]
    fn slice_bounds_are_checked() {
        let mut a = vec![1, 2];
        let v = merge_sort_slice(&mut a, 1, 3, &Checker::new(CheckMode::Unchecked)).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
    }

    #[test]
    fn merge_in_place_examples() {
        for backend in [MergeBackend::Recursive, MergeBackend::Iterative] {
            let ctx = Checker::new(CheckMode::Full);
            let mut a = vec![2, 5, 1, 3];
            merge_in_place_with(&mut a, 0, 2, 4, backend, &ctx).unwrap();
            assert_eq!(a, vec![1, 2, 3, 5]);
            let mut a = vec![1, 2];
            merge_in_place_with(&mut a, 0, 1, 2, backend, &ctx).unwrap();
            assert_eq!(a, vec![1, 2]);
            let mut a = vec![0, 1, 9, 2, 0];
            merge_in_place_with(&mut a, 1, 3, 4, backend, &ctx).unwrap();
            assert_eq!(a, vec![0, 1, 2, 9, 0]);
        }
    }

    #[test]
    fn merge_in_place_preconditions() {
        let ctx = Checker::new(CheckMode::Contracts);
        let mut a = vec![3, 1, 2];
        assert_eq!(merge_in_place(&mut a, 0, 2, 3, &ctx).unwrap_err().proviso, Proviso::Pre);
        assert_eq!(merge_in_place(&mut a, 0, 0, 3, &ctx).unwrap_err().proviso, Proviso::Pre);
        assert_eq!(merge_in_place(&mut a, 0, 1, 4, &ctx).unwrap_err().proviso, Proviso::Pre);
        assert_eq!(a, vec![3, 1, 2]);
    }

    #[test]
    fn skipped_combine_fails_root_post() {
        let ctx = Checker::new(CheckMode::Full).with_fault(Fault::CombineSkip);
        let mut a = vec![2, 1, 4, 3];
        let v = merge_sort_rec(&mut a, &ctx).unwrap_err();
        assert_eq!(v.proviso, Proviso::Post);
        // [2,1] is the first window whose R fails
        assert_eq!((v.location.l, v.location.r), (0, 2));

        // with the fault, Contracts mode still notices at the root
        let ctx = Checker::new(CheckMode::Contracts).with_fault(Fault::CombineSkip);
        let mut a = vec![2, 1, 4, 3];
        let v = merge_sort_rec(&mut a, &ctx).unwrap_err();
        assert_eq!(v.proviso, Proviso::Post);
        assert_eq!((v.location.l, v.location.r, v.location.depth), (0, 4, 0));
    }

    #[test]
    fn exhaustive_small_arrays_both_backends() {
        for len in 0..=8 {
            for input in all_arrays(len, 3) {
                for backend in [MergeBackend::Recursive, MergeBackend::Iterative] {
                    let ctx = Checker::new(CheckMode::Full);
                    let mut a = input.clone();
                    merge_sort_slice_with(&mut a, 0, len, backend, &ctx).unwrap();
                    assert_eq!(a, insertion_sort(&input));
                }
            }
        }
    }

    #[test]
    fn recursion_depth_bound() {
        for n in 1..=130usize {
            let ctx = Checker::new(CheckMode::Unchecked);
            let mut a: Vec<i64> = (0..n as i64).rev().collect();
            merge_sort_rec(&mut a, &ctx).unwrap();
            let bound = crate::merge_rec::ceil_log2(n) + 1;
            assert!(ctx.max_levels() <= bound, "n={n}: {} levels > {bound}", ctx.max_levels());
        }
    }
}
