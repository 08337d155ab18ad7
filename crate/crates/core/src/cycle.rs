//! Oriented integer cycles, cusp types and the Hirzebruch–Zagier duality.
//!
//! A cycle `[m_0, …, m_{r-1}]` is a finite sequence of integers taken up to
//! cyclic rotation. It is always stored in its canonical rotation (the
//! lexicographically least one), so structural equality is cycle equality.
//! Reflection is *not* quotiented out.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CycleError;

/// Largest accepted absolute value of a cycle entry.
pub const MAX_ENTRY: i64 = 1_000_000;

/// Offset `k` of the lexicographically least rotation, so that the canonical
/// form is `entries[k..] ++ entries[..k]`. Ties (periodic cycles) resolve to
/// the smallest offset.
pub fn least_rotation(entries: &[i64]) -> usize {
    let n = entries.len();
    let mut best = 0;
    for k in 1..n {
        let cmp = (0..n)
            .map(|i| entries[(k + i) % n].cmp(&entries[(best + i) % n]))
            .find(|o| o.is_ne());
        if cmp == Some(std::cmp::Ordering::Less) {
            best = k;
        }
    }
    best
}

pub(crate) fn rotated(entries: &[i64], k: usize) -> Vec<i64> {
    let mut v = Vec::with_capacity(entries.len());
    v.extend_from_slice(&entries[k..]);
    v.extend_from_slice(&entries[..k]);
    v
}

/// Canonical rotation without validation. Callers guarantee non-emptiness.
pub(crate) fn canonical_vec(entries: &[i64]) -> Vec<i64> {
    rotated(entries, least_rotation(entries))
}

/// A finite cyclic sequence of integers, stored in canonical rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedCycle(Vec<i64>);

impl OrientedCycle {
    /// Validates and canonicalizes `entries`.
    pub fn new(entries: Vec<i64>) -> Result<Self, CycleError> {
        if entries.is_empty() {
            return Err(CycleError::Empty);
        }
        if let Some(&bad) = entries.iter().find(|e| e.abs() > MAX_ENTRY) {
            return Err(CycleError::EntryOutOfRange(bad));
        }
        Ok(OrientedCycle(canonical_vec(&entries)))
    }

    /// Wraps entries already known to be canonical and in range.
    pub(crate) fn from_canonical(entries: Vec<i64>) -> Self {
        debug_assert!(!entries.is_empty());
        debug_assert_eq!(least_rotation(&entries), 0);
        OrientedCycle(entries)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; cycles have at least one entry.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ (m_i − 2)`.
    pub fn excess(&self) -> i64 {
        self.0.iter().map(|m| m - 2).sum()
    }

    /// The same cycle traversed in the opposite direction.
    pub fn reverse_orientation(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        OrientedCycle(canonical_vec(&v))
    }

    /// All entries ≥ 2 and at least one entry ≥ 3.
    pub fn is_in_t(&self) -> bool {
        self.0.iter().all(|&m| m >= 2) && self.0.iter().any(|&m| m >= 3)
    }
}

/// Canonical form of a non-empty integer list.
pub fn canonicalize(entries: &[i64]) -> Result<OrientedCycle, CycleError> {
    OrientedCycle::new(entries.to_vec())
}

impl fmt::Display for OrientedCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for OrientedCycle {
    type Err = CycleError;

    /// Parses `"[3, 2, 2]"`: comma-separated integers in square brackets.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CycleError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        if inner.trim().is_empty() {
            return Err(CycleError::Empty);
        }
        let entries = inner
            .split(',')
            .map(|tok| tok.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        OrientedCycle::new(entries)
    }
}

impl Serialize for OrientedCycle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrientedCycle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(deserializer)?;
        OrientedCycle::new(v).map_err(serde::de::Error::custom)
    }
}

/// A cycle type in 𝒯: entries ≥ 2 with at least one entry ≥ 3.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CuspType(OrientedCycle);

impl CuspType {
    pub fn new(entries: Vec<i64>) -> Result<Self, CycleError> {
        Self::try_from(OrientedCycle::new(entries)?)
    }

    pub fn cycle(&self) -> &OrientedCycle {
        &self.0
    }

    pub fn entries(&self) -> &[i64] {
        self.0.entries()
    }

    /// Number of components.
    pub fn r(&self) -> usize {
        self.0.len()
    }

    /// `s = Σ (c_i − 2) = −C²`, which is also the length of the dual.
    pub fn s(&self) -> i64 {
        self.0.excess()
    }

    /// `C² = −Σ (c_i − 2)`. The length-one convention `c_0 = 2 − C²` is the
    /// same formula, so there is no case split.
    pub fn self_intersection(&self) -> i64 {
        -self.s()
    }

    pub fn reverse_orientation(&self) -> Self {
        CuspType(self.0.reverse_orientation())
    }

    /// Hirzebruch–Zagier dual.
    ///
    /// Writing the cycle as blocks `(a_i + 2, 2^{b_i − 1})`, the dual is the
    /// cycle of blocks `(2^{a_i − 1}, b_i + 2)`.
    pub fn hz_dual(&self) -> CuspType {
        let c = self.entries();
        let r = c.len();
        // Members of 𝒯 always have an entry ≥ 3.
        let start = c
            .iter()
            .position(|&m| m >= 3)
            .expect("cusp type has an entry >= 3");
        let mut out = Vec::with_capacity(self.s() as usize);
        let mut i = 0;
        while i < r {
            let a = c[(start + i) % r] - 2;
            let mut b = 1;
            while i + b < r && c[(start + i + b) % r] == 2 {
                b += 1;
            }
            out.extend(std::iter::repeat_n(2, (a - 1) as usize));
            out.push(b as i64 + 2);
            i += b;
        }
        CuspType(OrientedCycle(canonical_vec(&out)))
    }

    pub fn is_self_dual(&self) -> bool {
        self.hz_dual() == *self
    }
}

impl TryFrom<OrientedCycle> for CuspType {
    type Error = CycleError;

    fn try_from(c: OrientedCycle) -> Result<Self, Self::Error> {
        if c.is_in_t() {
            Ok(CuspType(c))
        } else {
            Err(CycleError::NotCuspType(c.to_string()))
        }
    }
}

impl FromStr for CuspType {
    type Err = CycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::try_from(s.parse::<OrientedCycle>()?)
    }
}

impl<'de> Deserialize<'de> for CuspType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let c = OrientedCycle::deserialize(deserializer)?;
        CuspType::try_from(c).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for CuspType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Type of an anti-canonical cycle on a rational surface; entries are
/// arbitrary integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnticanonicalType(OrientedCycle);

impl AnticanonicalType {
    pub fn new(entries: Vec<i64>) -> Result<Self, CycleError> {
        Ok(AnticanonicalType(OrientedCycle::new(entries)?))
    }

    pub(crate) fn from_canonical(entries: Vec<i64>) -> Self {
        AnticanonicalType(OrientedCycle::from_canonical(entries))
    }

    pub fn cycle(&self) -> &OrientedCycle {
        &self.0
    }

    pub fn entries(&self) -> &[i64] {
        self.0.entries()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Σ (d_i − 2)`; every blow-up raises it by exactly one.
    pub fn charge(&self) -> i64 {
        self.0.excess()
    }

    /// Number of blow-ups separating this type from the plane:
    /// `charge + 9`. Negative means unreachable.
    pub fn required_depth(&self) -> i64 {
        self.charge() + 9
    }

    pub fn reverse_orientation(&self) -> Self {
        AnticanonicalType(self.0.reverse_orientation())
    }
}

impl From<OrientedCycle> for AnticanonicalType {
    fn from(c: OrientedCycle) -> Self {
        AnticanonicalType(c)
    }
}

impl From<CuspType> for AnticanonicalType {
    fn from(c: CuspType) -> Self {
        AnticanonicalType(c.0)
    }
}

impl FromStr for AnticanonicalType {
    type Err = CycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(AnticanonicalType(s.parse()?))
    }
}

impl fmt::Display for AnticanonicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
