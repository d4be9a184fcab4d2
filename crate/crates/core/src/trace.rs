//! Call-tree and level-pass traces.
//!
//! A recursive run produces the upper tree of divisions and the lower tree of
//! combinations as one post-order event stream; the iterative merge sort
//! produces one event per level pass.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    Divide,
    Base,
    Combine,
    LevelPass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub seq: u64,
    #[serde(skip)]
    pub algo: &'static str,
    pub phase: Phase,
    pub l: usize,
    pub m: Option<usize>,
    pub r: usize,
    pub depth: u32,
    pub s: Option<usize>,
}

impl TraceEvent {
    pub(crate) fn new(
        algo: &'static str,
        phase: Phase,
        l: usize,
        m: Option<usize>,
        r: usize,
        depth: u32,
        s: Option<usize>,
    ) -> Self {
        TraceEvent {
            seq: 0,
            algo,
            phase,
            l,
            m,
            r,
            depth,
            s,
        }
    }
}

#[derive(Debug)]
pub(crate) struct TraceRecorder {
    algo: &'static str,
    next_seq: u64,
    events: Vec<TraceEvent>,
}

impl TraceRecorder {
    pub(crate) fn new(algo: &'static str) -> Self {
        TraceRecorder {
            algo,
            next_seq: 0,
            events: Vec::new(),
        }
    }

    pub(crate) fn algo(&self) -> &'static str {
        self.algo
    }

    pub(crate) fn push(&mut self, mut ev: TraceEvent) {
        ev.seq = self.next_seq;
        self.next_seq += 1;
        self.events.push(ev);
    }

    pub(crate) fn take(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.events)
    }
}

/// The serialized trace: `{"algo", "n", "events"}` in that order.
#[derive(Debug, Clone, Serialize)]
pub struct TraceDocument {
    pub algo: String,
    pub n: usize,
    pub events: Vec<TraceEvent>,
}

/// How a recursive algorithm splits `[l, r)` around `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    /// Children `[l, m)` and `[m, r)`.
    AtIndex,
    /// Children `[l, m)` and `[m + 1, r)`; `a[m]` is the pivot.
    AroundPivot,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraceShape {
    pub divide: usize,
    pub base: usize,
    pub combine: usize,
}

/// Checks that `events` is exactly the post-order rendering of a recursion
/// tree rooted at `[0, n)`: each internal node is a `Divide`, the complete
/// left subtree, the complete right subtree, then a matching `Combine`.
/// Also checks that `seq` increases and depths match nesting.
pub fn check_recursive_trace(
    events: &[TraceEvent],
    n: usize,
    split: Split,
) -> Result<TraceShape, String> {
    if let Some(w) = events.windows(2).find(|w| w[0].seq >= w[1].seq) {
        return Err(format!("seq not increasing at {}", w[1].seq));
    }
    let mut shape = TraceShape::default();
    let mut pos = 0;
    walk(events, &mut pos, 0, n, 0, split, &mut shape)?;
    if pos != events.len() {
        return Err(format!("{} trailing events after the root", events.len() - pos));
    }
    Ok(shape)
}

fn walk(
    events: &[TraceEvent],
    pos: &mut usize,
    l: usize,
    r: usize,
    depth: u32,
    split: Split,
    shape: &mut TraceShape,
) -> Result<(), String> {
    let ev = events
        .get(*pos)
        .ok_or_else(|| format!("trace ended while expecting node [{l}..{r})"))?;
    *pos += 1;
    if (ev.l, ev.r, ev.depth) != (l, r, depth) {
        return Err(format!(
            "event {} is [{}..{}) at depth {}, expected [{l}..{r}) at depth {depth}",
            ev.seq, ev.l, ev.r, ev.depth
        ));
    }
    match ev.phase {
        Phase::Base => {
            shape.base += 1;
            Ok(())
        }
        Phase::Divide => {
            let m = ev.m.ok_or_else(|| format!("divide event {} has no m", ev.seq))?;
            let right_start = match split {
                Split::AtIndex if l < m && m < r => m,
                Split::AroundPivot if l <= m && m < r => m + 1,
                _ => return Err(format!("event {} has m={m} outside [{l}..{r})", ev.seq)),
            };
            shape.divide += 1;
            walk(events, pos, l, m, depth + 1, split, shape)?;
            walk(events, pos, right_start, r, depth + 1, split, shape)?;
            let c = events
                .get(*pos)
                .ok_or_else(|| format!("missing combine for [{l}..{r})"))?;
            *pos += 1;
            if c.phase != Phase::Combine || (c.l, c.m, c.r, c.depth) != (l, Some(m), r, depth) {
                return Err(format!(
                    "event {} should combine [{l}..{m}..{r}) at depth {depth}",
                    c.seq
                ));
            }
            shape.combine += 1;
            Ok(())
        }
        other => Err(format!("unexpected {other:?} event {} in a recursive trace", ev.seq)),
    }
}

/// Checks a level-pass trace: only `LevelPass` events, `s` doubling from 1,
/// each covering `[0, n)`. Returns the number of passes.
pub fn check_level_trace(events: &[TraceEvent], n: usize) -> Result<usize, String> {
    let mut expected_s = 1;
    for (i, ev) in events.iter().enumerate() {
        if ev.phase != Phase::LevelPass {
            return Err(format!("event {} is {:?}, expected LevelPass", ev.seq, ev.phase));
        }
        if ev.s != Some(expected_s) {
            return Err(format!("pass {i} has s={:?}, expected {expected_s}", ev.s));
        }
        if (ev.l, ev.r, ev.depth as usize) != (0, n, i) {
            return Err(format!("pass {i} has malformed window or pass number"));
        }
        expected_s *= 2;
    }
    Ok(events.len())
}
