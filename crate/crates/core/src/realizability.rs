//! Blow-up rewrite system on anti-canonical types and the realizability search.
//!
//! Every anti-canonical cycle on a rational surface with minimal model ℙ² is
//! reached from one of three plane configurations by blowing up points of the
//! cycle. On types this is a rewrite system:
//!
//! * blowing up a smooth point of component `i` increments `d_i`;
//! * blowing up the node between `i` and `i + 1` increments both and inserts a
//!   new component with entry `1` (for a single nodal curve `[d]` the result
//!   is `[d + 2, 1]`).
//!
//! Each move raises the charge `Σ (d_i − 2)` by one and all three bases have
//! charge −9, so a type is at distance exactly `charge + 9` from the plane.
//! [`Solver`] searches backwards from the target, memoizing on the canonical
//! form alone since the remaining depth is a function of the state.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{canonical_vec, least_rotation, AnticanonicalType};
use crate::error::SearchError;

/// Charge shared by the three plane configurations.
pub const BASE_CHARGE: i64 = -9;

/// Default number of memo entries before a search aborts.
pub const DEFAULT_MEMO_LIMIT: usize = 10_000_000;

/// Default cap on the brute-force closure depth.
pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseId {
    /// Three general lines, `[-1,-1,-1]`.
    ThreeLines,
    /// A conic and a line in general position, `[-4,-1]`.
    ConicLine,
    /// A nodal cubic, `[-7]`.
    NodalCubic,
}

impl BaseId {
    pub const ALL: [BaseId; 3] = [BaseId::ThreeLines, BaseId::ConicLine, BaseId::NodalCubic];

    pub fn entries(self) -> &'static [i64] {
        match self {
            BaseId::ThreeLines => &[-1, -1, -1],
            BaseId::ConicLine => &[-4, -1],
            BaseId::NodalCubic => &[-7],
        }
    }

    pub fn base_type(self) -> AnticanonicalType {
        AnticanonicalType::from_canonical(self.entries().to_vec())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseId::ThreeLines => "three_lines",
            BaseId::ConicLine => "conic_line",
            BaseId::NodalCubic => "nodal_cubic",
        }
    }

    /// The base whose (canonical) type is `entries`, if any.
    pub fn from_entries(entries: &[i64]) -> Option<BaseId> {
        BaseId::ALL.into_iter().find(|b| b.entries() == entries)
    }
}

impl fmt::Display for BaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Blow up a smooth point of component `pos`.
    Smooth,
    /// Blow up the node between components `pos` and `pos + 1`.
    Node,
}

/// One blow-up. `pos` indexes the canonical rotation of the type it is
/// applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupMove {
    pub kind: MoveKind,
    pub pos: usize,
}

impl BlowupMove {
    pub fn smooth(pos: usize) -> Self {
        BlowupMove {
            kind: MoveKind::Smooth,
            pos,
        }
    }

    pub fn node(pos: usize) -> Self {
        BlowupMove {
            kind: MoveKind::Node,
            pos,
        }
    }
}

impl fmt::Display for BlowupMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MoveKind::Smooth => "smooth",
            MoveKind::Node => "node",
        };
        write!(f, "{kind}@{}", self.pos)
    }
}

/// A base configuration plus the blow-ups that realize `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub base: BaseId,
    pub moves: Vec<BlowupMove>,
    pub target: AnticanonicalType,
}

impl Certificate {
    /// Folds the moves over the base type.
    pub fn replay(&self) -> Result<AnticanonicalType, SearchError> {
        self.moves
            .iter()
            .try_fold(self.base.base_type(), |t, &m| apply_move(&t, m))
    }

    /// The replay ends at `target`.
    pub fn is_sound(&self) -> bool {
        self.replay().is_ok_and(|t| t == self.target)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// Applies `m` to the raw entry list `v` (rotation as given), without
/// canonicalizing.
fn forward(v: &[i64], m: BlowupMove) -> Vec<i64> {
    let n = v.len();
    let mut out = v.to_vec();
    match m.kind {
        MoveKind::Smooth => out[m.pos] += 1,
        MoveKind::Node if n == 1 => {
            out[0] += 2;
            out.push(1);
        }
        MoveKind::Node => {
            out[m.pos] += 1;
            out[(m.pos + 1) % n] += 1;
            out.insert(m.pos + 1, 1);
        }
    }
    out
}

/// Blows up `t` according to `m`; positions refer to the canonical rotation.
pub fn apply_move(t: &AnticanonicalType, m: BlowupMove) -> Result<AnticanonicalType, SearchError> {
    let len = t.len();
    if m.pos >= len {
        return Err(SearchError::PositionOutOfRange { pos: m.pos, len });
    }
    Ok(AnticanonicalType::from_canonical(canonical_vec(&forward(
        t.entries(),
        m,
    ))))
}

/// All moves applicable to a type of length `len`, smooth before node, each by
/// ascending position.
pub fn all_moves(len: usize) -> impl Iterator<Item = BlowupMove> {
    (0..len)
        .map(BlowupMove::smooth)
        .chain((0..len).map(BlowupMove::node))
}

/// `charge(t) + 9`.
pub fn required_depth(t: &AnticanonicalType) -> i64 {
    t.required_depth()
}

/// Types reachable from the bases in at most `depth_budget` moves, with the
/// default cap.
pub fn forward_closure(depth_budget: usize) -> Result<BTreeSet<AnticanonicalType>, SearchError> {
    forward_closure_capped(depth_budget, DEFAULT_ORACLE_CAP)
}

/// Breadth-first enumeration of the forward closure. Independent of
/// [`Solver`]; used to cross-check it.
pub fn forward_closure_capped(
    depth_budget: usize,
    cap: usize,
) -> Result<BTreeSet<AnticanonicalType>, SearchError> {
    if depth_budget > cap {
        return Err(SearchError::OracleBudget {
            budget: depth_budget,
            cap,
        });
    }
    let mut levels: Vec<BTreeSet<AnticanonicalType>> =
        vec![BaseId::ALL.iter().map(|b| b.base_type()).collect()];
    for _ in 0..depth_budget {
        let frontier = levels.last().expect("base level");
        // Every move raises the charge, so levels are disjoint.
        let next: BTreeSet<AnticanonicalType> = frontier
            .par_iter()
            .flat_map_iter(|t| {
                all_moves(t.len()).map(move |m| apply_move(t, m).expect("position in range"))
            })
            .collect();
        levels.push(next);
    }
    Ok(levels.into_iter().flatten().collect())
}

/// A reverse step: `pred` blown up by `forward` gives the current state.
struct Predecessor {
    pred: Vec<i64>,
    forward: BlowupMove,
}

/// Reverse moves from the canonical state `t`, in search order: node
/// removals by ascending position, then decrements by ascending position.
fn predecessors(t: &[i64]) -> Vec<Predecessor> {
    let n = t.len();
    let mut out = Vec::with_capacity(2 * n);
    if n == 2 {
        for j in 0..2 {
            if t[j] == 1 {
                out.push(Predecessor {
                    pred: vec![t[1 - j] - 2],
                    forward: BlowupMove::node(0),
                });
            }
        }
    } else if n >= 3 {
        for j in (0..n).filter(|&j| t[j] == 1) {
            // Read the cycle starting after `j` and stopping before it; the
            // removed node then sits between the last and first entries.
            let mut v: Vec<i64> = (1..n).map(|i| t[(j + i) % n]).collect();
            v[0] -= 1;
            v[n - 2] -= 1;
            let k = least_rotation(&v);
            let m = n - 1;
            let pos = (m - 1 + m - k) % m;
            out.push(Predecessor {
                pred: crate::cycle::rotated(&v, k),
                forward: BlowupMove::node(pos),
            });
        }
    }
    for j in 0..n {
        let mut v = t.to_vec();
        v[j] -= 1;
        let k = least_rotation(&v);
        let pos = (j + n - k) % n;
        out.push(Predecessor {
            pred: crate::cycle::rotated(&v, k),
            forward: BlowupMove::smooth(pos),
        });
    }
    out
}

/// Smallest entry of any base; entries never increase along reverse paths.
const MIN_BASE_ENTRY: i64 = -7;

/// Decides a state without expanding it when possible.
///
/// Entries never increase along reverse paths, and only entries equal to 1
/// are ever removed, so every entry ≤ 0 survives into the base and must
/// still dominate the base entry it ends up as.
fn settle(t: &[i64]) -> Option<bool> {
    let depth = t.iter().map(|d| d - 2).sum::<i64>() - BASE_CHARGE;
    if depth < 0 {
        return Some(false);
    }
    if depth == 0 {
        return Some(BaseId::from_entries(t).is_some());
    }
    if t.iter().any(|&d| d < MIN_BASE_ENTRY) {
        return Some(false);
    }
    let mut survivors: Vec<i64> = t.iter().copied().filter(|&d| d <= 0).collect();
    if survivors.len() > 3 {
        return Some(false);
    }
    survivors.sort_unstable();
    // At most one component disappears per step.
    let len = t.len() as i64;
    let min_base_len = (len - depth).max(survivors.len() as i64);
    let Some(max_base_len) = BaseId::ALL
        .iter()
        .filter(|b| {
            let mut base = b.entries().to_vec();
            base.sort_unstable();
            base.len() as i64 >= min_base_len && survivors.iter().zip(&base).all(|(s, b)| s >= b)
        })
        .map(|b| b.entries().len() as i64)
        .max()
    else {
        return Some(false);
    };
    // A single step lowers an entry by at most 2, and only once (the last
    // removal from length 2); everything must get down to 1 or below.
    if t.iter().any(|&d| d > depth + 2) {
        return Some(false);
    }
    // Before the first removal some entry has to be brought down to 1 by
    // smooth steps alone.
    if len > max_base_len {
        let smooth_budget = depth - (len - max_base_len);
        let nearest = t.iter().filter(|&&d| d >= 1).map(|d| d - 1).min();
        if nearest.is_none_or(|n| n > smooth_budget) {
            return Some(false);
        }
    }
    None
}

const PACKED_LEN: usize = 16;

/// Memo key. Nearly every searched state is short with small entries, so it
/// is stored inline without a heap allocation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum MemoKey {
    Packed { len: u8, entries: [i8; PACKED_LEN] },
    Wide(Box<[i64]>),
}

impl MemoKey {
    fn new(t: &[i64]) -> Self {
        if t.len() <= PACKED_LEN && t.iter().all(|&d| i8::try_from(d).is_ok()) {
            let mut entries = [0i8; PACKED_LEN];
            for (slot, &d) in entries.iter_mut().zip(t) {
                *slot = d as i8;
            }
            MemoKey::Packed {
                len: t.len() as u8,
                entries,
            }
        } else {
            MemoKey::Wide(t.into())
        }
    }
}

/// Memoized reverse search for realizability and certificates.
///
/// The memo maps canonical forms to their (state-intrinsic) answer and is
/// shared by all queries on the same solver, including concurrent ones.
pub struct Solver {
    memo: DashMap<MemoKey, bool>,
    entries: AtomicUsize,
    memo_limit: usize,
    parallel: bool,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(DEFAULT_MEMO_LIMIT)
    }
}

struct Frame {
    state: Vec<i64>,
    children: std::vec::IntoIter<Predecessor>,
}

impl Solver {
    pub fn new(memo_limit: usize) -> Self {
        Solver {
            memo: DashMap::new(),
            entries: AtomicUsize::new(0),
            memo_limit: memo_limit.max(1),
            parallel: false,
        }
    }

    /// Fan the root's sibling branches out to the rayon pool.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn memo_len(&self) -> usize {
        self.entries.load(Ordering::Relaxed)
    }

    pub fn memo_limit(&self) -> usize {
        self.memo_limit
    }

    fn remember(&self, state: Vec<i64>, value: bool) -> Result<(), SearchError> {
        if self.entries.load(Ordering::Relaxed) >= self.memo_limit {
            return Err(SearchError::MemoLimit(self.memo_limit));
        }
        if self.memo.insert(MemoKey::new(&state), value).is_none() {
            self.entries.fetch_add(1, Ordering::Relaxed);
        }
        Ok(())
    }

    fn lookup(&self, t: &[i64]) -> Option<bool> {
        self.memo
            .get(&MemoKey::new(t))
            .map(|v| *v)
            .or_else(|| settle(t))
    }

    /// Depth-first search with an explicit stack; the first realizable
    /// predecessor resolves every frame on the stack.
    fn decide(&self, root: &[i64]) -> Result<bool, SearchError> {
        if let Some(v) = self.lookup(root) {
            return Ok(v);
        }
        let mut stack = vec![Frame {
            state: root.to_vec(),
            children: predecessors(root).into_iter(),
        }];
        while let Some(top) = stack.last_mut() {
            let Some(child) = top.children.next() else {
                let done = stack.pop().expect("non-empty stack");
                self.remember(done.state, false)?;
                continue;
            };
            match self.lookup(&child.pred) {
                Some(true) => {
                    while let Some(f) = stack.pop() {
                        self.remember(f.state, true)?;
                    }
                    return Ok(true);
                }
                Some(false) => {}
                None => {
                    let children = predecessors(&child.pred).into_iter();
                    stack.push(Frame {
                        state: child.pred,
                        children,
                    });
                }
            }
        }
        Ok(false)
    }

    fn decide_parallel(&self, root: &[i64]) -> Result<bool, SearchError> {
        if let Some(v) = self.lookup(root) {
            return Ok(v);
        }
        let hit = predecessors(root)
            .par_iter()
            .find_map_any(|p| match self.decide(&p.pred) {
                Ok(true) => Some(Ok(())),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            });
        let value = match hit {
            Some(Ok(())) => true,
            Some(Err(e)) => return Err(e),
            None => false,
        };
        self.remember(root.to_vec(), value)?;
        Ok(value)
    }

    /// Membership of `t` in the forward closure of the bases.
    pub fn is_realizable(&self, t: &AnticanonicalType) -> Result<bool, SearchError> {
        if self.parallel {
            self.decide_parallel(t.entries())
        } else {
            self.decide(t.entries())
        }
    }

    /// A witness for `t`, or `None` if it is not realizable.
    ///
    /// The path always takes the first realizable predecessor in search
    /// order, so the result depends only on `t`, not on memo contents.
    pub fn find_certificate(
        &self,
        t: &AnticanonicalType,
    ) -> Result<Option<Certificate>, SearchError> {
        if !self.is_realizable(t)? {
            return Ok(None);
        }
        let mut cur = t.entries().to_vec();
        let mut moves = Vec::new();
        loop {
            if let Some(base) = BaseId::from_entries(&cur) {
                moves.reverse();
                return Ok(Some(Certificate {
                    base,
                    moves,
                    target: t.clone(),
                }));
            }
            let mut next = None;
            for p in predecessors(&cur) {
                if self.decide(&p.pred)? {
                    next = Some(p);
                    break;
                }
            }
            let p = next.expect("a realizable non-base state has a realizable predecessor");
            moves.push(p.forward);
            cur = p.pred;
        }
    }
}
