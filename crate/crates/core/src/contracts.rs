//! Runtime Hoare-triple checking.
//!
//! Every algorithm in the crate takes a [`Checker`], which decides how much
//! gets asserted ([`CheckMode`]), counts element comparisons, optionally
//! records a trace, and carries the fault switches used by mutation testing.
//! A failed assertion never panics: it becomes a [`Violation`] value carrying
//! the entry snapshot and the current state, so a campaign can keep going and
//! a caller can replay the call.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::order::Snapshot;
use crate::trace::{Phase, TraceEvent, TraceRecorder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// No assertions at all.
    Unchecked,
    /// Pre/post and non-interference of the operation that was called.
    #[default]
    Contracts,
    /// Everything: every recursion node, every nested call, every loop
    /// iteration.
    Full,
}

/// Which proof obligation a violation broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Proviso {
    Pre,
    Post,
    NonInterference,
    PartitionPredicate,
    BaseImpliesShort,
    VariantDecrease,
    LoopInvariant,
    LoopVariant,
}

impl fmt::Display for Proviso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Where a violation happened. Indices are kept raw (not as a validated
/// window) so that out-of-range arguments can still be reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub algo: &'static str,
    pub op: &'static str,
    pub l: usize,
    pub r: usize,
    pub n: usize,
    pub depth: u32,
}

impl Location {
    pub fn new(algo: &'static str, op: &'static str, l: usize, r: usize, n: usize) -> Self {
        Location {
            algo,
            op,
            l,
            r,
            n,
            depth: 0,
        }
    }

    pub fn at_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}::{} [{}..{}) of {} at depth {}",
            self.algo, self.op, self.l, self.r, self.n, self.depth
        )
    }
}

/// A failed contract, with enough state to replay the call.
///
/// `before` and `after` are the whole mutated (or principal) array at entry
/// and at the point of failure, so they always have equal length. Any other
/// arrays involved (a secondary input, a freshly built output) go in
/// `operands`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation<T> {
    pub proviso: Proviso,
    pub location: Location,
    pub detail: String,
    pub before: Snapshot<T>,
    pub after: Vec<T>,
    pub operands: Vec<Vec<T>>,
}

impl<T: Clone> Violation<T> {
    pub fn new(
        proviso: Proviso,
        location: Location,
        detail: impl Into<String>,
        before: &Snapshot<T>,
        after: &[T],
    ) -> Self {
        // Callers that never mutate pass the current array as both, so a
        // length difference means the snapshot belongs to another array.
        debug_assert_eq!(before.len(), after.len());
        Violation {
            proviso,
            location,
            detail: detail.into(),
            before: before.clone(),
            after: after.to_vec(),
            operands: Vec::new(),
        }
    }

    pub fn with_operand(mut self, operand: &[T]) -> Self {
        self.operands.push(operand.to_vec());
        self
    }
}

impl<T> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated in {}: {}", self.proviso, self.location, self.detail)
    }
}

impl<T: fmt::Debug> std::error::Error for Violation<T> {}

/// A failed check that has not been attached to a call site yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breach {
    pub proviso: Proviso,
    pub detail: String,
}

impl Breach {
    pub fn at<T: Clone>(self, location: Location, before: &Snapshot<T>, after: &[T]) -> Violation<T> {
        Violation::new(self.proviso, location, self.detail, before, after)
    }
}

/// `Ok(())` when `cond` holds, otherwise a [`Breach`] of `proviso`. The
/// message is built lazily.
pub fn ensure(cond: bool, proviso: Proviso, detail: impl FnOnce() -> String) -> Result<(), Breach> {
    if cond {
        Ok(())
    } else {
        Err(Breach {
            proviso,
            detail: detail(),
        })
    }
}

/// Runs `body` on `a` under `{pre} body {post}`.
///
/// `pre` is evaluated first; if it fails the body does not run. Otherwise the
/// whole array is snapshotted, the body runs, and `post(old, new)` decides the
/// outcome. In [`CheckMode::Unchecked`] neither predicate is evaluated.
pub fn check_triple<T, R>(
    mode: CheckMode,
    location: Location,
    a: &mut [T],
    pre: impl FnOnce(&[T]) -> bool,
    body: impl FnOnce(&mut [T]) -> R,
    post: impl FnOnce(&[T], &[T]) -> Result<(), Breach>,
) -> Result<R, Violation<T>>
where
    T: Clone,
{
    if mode == CheckMode::Unchecked {
        return Ok(body(a));
    }
    if !pre(a) {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(
            Proviso::Pre,
            location,
            "precondition does not hold",
            &snap,
            a,
        ));
    }
    let old = Snapshot::capture(a);
    let result = body(a);
    post(&old, a).map_err(|b| b.at(location, &old, a))?;
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantFailure {
    pub previous: i64,
    pub current: i64,
}

impl fmt::Display for VariantFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "variant must satisfy 0 <= current < previous, got previous={} current={}",
            self.previous, self.current
        )
    }
}

/// Well-founded decrease: `0 <= current < previous`.
pub fn check_variant(previous: i64, current: i64) -> Result<(), VariantFailure> {
    if 0 <= current && current < previous {
        Ok(())
    } else {
        Err(VariantFailure { previous, current })
    }
}

/// Deliberate defects for mutation testing. Each one breaks a single step of
/// a single algorithm; the contracts are expected to notice.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Fault {
    /// Merge sort's combine phase does nothing.
    CombineSkip,
    /// The partition-point search always answers `l`.
    FpReturnsLeft,
    /// The array merge stops after its main loop.
    MergeIterNoDrain,
    /// Pair merging never copies the merged run back.
    MergePairNoCopyBack,
    /// Quicksort's partition returns `l` without moving anything.
    PartitionNoExchange,
}

impl Fault {
    pub const ALL: [Fault; 5] = [
        Fault::CombineSkip,
        Fault::FpReturnsLeft,
        Fault::MergeIterNoDrain,
        Fault::MergePairNoCopyBack,
        Fault::PartitionNoExchange,
    ];

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl Fault {
    pub fn name(self) -> &'static str {
        match self {
            Fault::CombineSkip => "combine-skip",
            Fault::FpReturnsLeft => "fp-returns-left",
            Fault::MergeIterNoDrain => "merge-iter-no-drain",
            Fault::MergePairNoCopyBack => "merge-pair-no-copy-back",
            Fault::PartitionNoExchange => "partition-no-exchange",
        }
    }
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown fault '{s}'"))
    }
}

/// Per-run checking context. Not `Sync`: one run, one checker.
#[derive(Debug, Default)]
pub struct Checker {
    mode: CheckMode,
    faults: u8,
    nesting: Cell<u32>,
    comparisons: Cell<u64>,
    max_levels: Cell<u32>,
    passes: Cell<u32>,
    trace: RefCell<Option<TraceRecorder>>,
}

impl Checker {
    pub fn new(mode: CheckMode) -> Self {
        Checker {
            mode,
            ..Default::default()
        }
    }

    #[doc(hidden)]
    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.faults |= fault.bit();
        self
    }

    /// Record events emitted by algorithm `algo` (nested helpers running
    /// under other ids are not recorded).
    pub fn with_trace(self, algo: &'static str) -> Self {
        *self.trace.borrow_mut() = Some(TraceRecorder::new(algo));
        self
    }

    pub fn mode(&self) -> CheckMode {
        self.mode
    }

    /// Whether the currently executing operation should check its own
    /// pre/post contract.
    pub fn contracts(&self) -> bool {
        match self.mode {
            CheckMode::Unchecked => false,
            CheckMode::Contracts => self.nesting.get() == 0,
            CheckMode::Full => true,
        }
    }

    /// Whether internal obligations (schema provisos, loop invariants) are
    /// checked.
    pub fn full(&self) -> bool {
        self.mode == CheckMode::Full
    }

    /// Runs `f` as a call nested inside the current operation.
    pub fn nested<R>(&self, f: impl FnOnce() -> R) -> R {
        self.nesting.set(self.nesting.get() + 1);
        let out = f();
        self.nesting.set(self.nesting.get() - 1);
        out
    }

    pub(crate) fn has_fault(&self, fault: Fault) -> bool {
        self.faults & fault.bit() != 0
    }

    /// Counted three-way comparison; the algorithms route every element
    /// comparison through here.
    pub fn cmp<T: Ord>(&self, x: &T, y: &T) -> Ordering {
        self.comparisons.set(self.comparisons.get() + 1);
        x.cmp(y)
    }

    pub fn le<T: Ord>(&self, x: &T, y: &T) -> bool {
        self.cmp(x, y) != Ordering::Greater
    }

    pub fn lt<T: Ord>(&self, x: &T, y: &T) -> bool {
        self.cmp(x, y) == Ordering::Less
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons.get()
    }

    /// Deepest recursion seen, counted in levels (a lone root is 1).
    pub fn max_levels(&self) -> u32 {
        self.max_levels.get()
    }

    /// Number of level passes made by the iterative merge sort.
    pub fn passes(&self) -> u32 {
        self.passes.get()
    }

    pub fn reset_stats(&self) {
        self.comparisons.set(0);
        self.max_levels.set(0);
        self.passes.set(0);
    }

    pub(crate) fn note_depth(&self, depth: u32) {
        if depth + 1 > self.max_levels.get() {
            self.max_levels.set(depth + 1);
        }
    }

    pub(crate) fn note_pass(&self) {
        self.passes.set(self.passes.get() + 1);
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn emit(
        &self,
        algo: &'static str,
        phase: Phase,
        l: usize,
        m: Option<usize>,
        r: usize,
        depth: u32,
        s: Option<usize>,
    ) {
        if let Some(rec) = self.trace.borrow_mut().as_mut() {
            if rec.algo() == algo {
                rec.push(TraceEvent::new(algo, phase, l, m, r, depth, s));
            }
        }
    }

    /// Takes the recorded events, leaving the recorder empty but attached.
    pub fn take_trace(&self) -> Vec<TraceEvent> {
        self.trace
            .borrow_mut()
            .as_mut()
            .map(TraceRecorder::take)
            .unwrap_or_default()
    }
}
