//! Quicksort: the pivot schema with `B = r - l < 2`, `E = C = skip` and
//! `D = partition`.

use crate::contracts::{ensure, Checker, Location, Proviso, Violation};
use crate::order::{is_perm, is_sorted, outside_unchanged, uniformly_leq, SliceBounds, Snapshot};
use crate::schema::{run_pivot, SchemaParts};
use crate::Fault;

pub const ALGO: &str = "quick";

#[derive(Debug, Clone, Copy, Default)]
pub struct QuickParts;

/// `a[l..m)` is uniformly at most `a[m]`, which is at most all of `a[m+1..r)`.
pub fn partitioned<T: Ord>(a: &[T], l: usize, m: usize, r: usize) -> bool {
    l <= m
        && m < r
        && r <= a.len()
        && uniformly_leq(&a[l..m], &a[m..=m])
        && uniformly_leq(&a[m..=m], &a[m + 1..r])
}

impl<T: Ord + Clone> SchemaParts<T> for QuickParts {
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

    fn divide(&self, a: &mut [T], l: usize, r: usize, ctx: &Checker) -> Result<usize, Violation<T>> {
        ctx.nested(|| partition(a, l, r, ctx))
    }

    fn combine(&self, _: &mut [T], _: usize, _: usize, _: usize, _: &Checker) -> Result<(), Violation<T>> {
        Ok(())
    }

    fn r_post(&self, old: &[T], a: &[T], l: usize, r: usize) -> bool {
        is_sorted(&a[l..r]) && is_perm(&a[l..r], &old[l..r])
    }

    fn p(&self, a: &[T], l: usize, m: usize, r: usize) -> bool {
        partitioned(a, l, m, r)
    }

    fn preserved_across_child(&self, before: &[T], a: &[T], l: usize, r: usize) -> bool {
        is_perm(&a[l..r], &before[l..r])
    }
}

pub fn quicksort<T: Ord + Clone>(a: &mut [T], ctx: &Checker) -> Result<(), Violation<T>> {
    run_pivot(&QuickParts, a, SliceBounds::full(a.len()), ctx)
}

/// Partitions `a[l..r)` around its first element and returns the pivot's
/// final index.
pub fn partition<T: Ord + Clone>(a: &mut [T], l: usize, r: usize, ctx: &Checker) -> Result<usize, Violation<T>> {
    let n = a.len();
    let loc = || Location::new(ALGO, "partition", l, r, n);
    if !(l < r && r <= n && r - l >= 2) {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(
            Proviso::Pre,
            loc(),
            format!("need l < r <= {n} and r - l >= 2, got [{l}..{r})"),
            &snap,
            a,
        ));
    }
    let old = ctx.contracts().then(|| Snapshot::capture(a));

    let m = if ctx.has_fault(Fault::PartitionNoExchange) {
        l
    } else {
        let pivot = a[l].clone();
        let hi = r - 1;
        let (mut i, mut j) = (l, r);
        loop {
            loop {
                i += 1;
                if !ctx.lt(&a[i], &pivot) || i == hi {
                    break;
                }
            }
            loop {
                j -= 1;
                if !ctx.lt(&pivot, &a[j]) || j == l {
                    break;
                }
            }
            if i >= j {
                break;
            }
            a.swap(i, j);
        }
        a.swap(l, j);
        j
    };

    if let Some(old) = &old {
        ensure(partitioned(a, l, m, r), Proviso::Post, || format!("a[{l}..{r}) is not partitioned at m={m}"))
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
    Ok(m)
}
