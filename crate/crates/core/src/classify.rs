//! Smoothability of cusps and of contractions of cycles on class VII surfaces.
//!
//! A cusp with type `c ∈ 𝒯` is smoothable exactly when the dual type of `c`
//! is realized by an anti-canonical cycle on a blow-up of the plane. Given
//! the ambient regime (`r < b₂(X)` or `r = b₂(X)`), the smooth deformations are
//! rational with `b₂ = 10 + r`, respectively Enriques.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::{least_rotation, CuspType, OrientedCycle};
use crate::error::{ClassifyError, SearchError};
use crate::lattice::{replay_certificate, smoothing_b2_from_lattice};
use crate::realizability::{Certificate, Solver};

/// Every type with `Σ (c_i − 2)` at most this is smoothable.
pub const SMOOTHABLE_EXCESS_BOUND: i64 = 10;

/// Sweeps beyond this excess are slow enough to warrant a warning.
pub const SWEEP_WARN_EXCESS: usize = 14;

/// How the cycle sits in its minimal class VII surface `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `r < b₂(X)`.
    RLtB2,
    /// `r = b₂(X)`: `X` is a half-Inoue surface.
    REqB2,
    Unspecified,
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r_lt_b2" => Ok(Case::RLtB2),
            "r_eq_b2" => Ok(Case::REqB2),
            "unspecified" => Ok(Case::Unspecified),
            _ => Err(format!("unknown case {s:?}; expected r_lt_b2 or r_eq_b2")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceClass {
    Rational,
    Enriques,
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceClass::Rational => "rational",
            SurfaceClass::Enriques => "enriques",
        })
    }
}

/// Class and second Betti number of the smooth deformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Deformation {
    pub class: SurfaceClass,
    pub b2: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothabilityReport {
    #[serde(rename = "type")]
    pub cusp_type: CuspType,
    pub dual: CuspType,
    pub r: usize,
    pub s: i64,
    #[serde(rename = "C2")]
    pub c2: i64,
    pub smoothable: bool,
    pub certificate: Option<Certificate>,
    pub wahl_dimension: Option<i64>,
    pub self_dual: bool,
    pub case: Case,
    #[serde(rename = "inferred_b2X")]
    pub inferred_b2x: Option<i64>,
    pub deformation: Option<Deformation>,
}

impl SmoothabilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// `r + 10 + C²`, the dimension of every smoothing component.
pub fn wahl_dimension(c: &CuspType) -> i64 {
    c.r() as i64 + 10 + c.self_intersection()
}

/// Necessary condition for smoothability: `r + 10 + C² > 0`.
pub fn check_wahl(c: &CuspType) -> bool {
    wahl_dimension(c) > 0
}

/// Classification front end over a shared [`Solver`].
#[derive(Default)]
pub struct Classifier {
    solver: Solver,
}

impl Classifier {
    pub fn new(solver: Solver) -> Self {
        Classifier { solver }
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    /// Smoothability of the cusp with type `c`.
    pub fn classify(&self, c: &CuspType) -> Result<SmoothabilityReport, ClassifyError> {
        let dual = c.hz_dual();
        let certificate = self.solver.find_certificate(&dual.clone().into())?;
        let smoothable = certificate.is_some();
        Ok(SmoothabilityReport {
            cusp_type: c.clone(),
            r: c.r(),
            s: c.s(),
            c2: c.self_intersection(),
            smoothable,
            certificate,
            wahl_dimension: smoothable.then(|| wahl_dimension(c)),
            self_dual: dual == *c,
            dual,
            case: Case::Unspecified,
            inferred_b2x: None,
            deformation: None,
        })
    }

    /// As [`Classifier::classify`], adding what the ambient regime implies
    /// about `b₂(X)` and the smooth deformations.
    pub fn classify_contraction(
        &self,
        c: &CuspType,
        case: Case,
    ) -> Result<SmoothabilityReport, ClassifyError> {
        if case == Case::REqB2 && !c.is_self_dual() {
            return Err(ClassifyError::NotSelfDual(c.to_string()));
        }
        let mut report = self.classify(c)?;
        let r = c.r() as i64;
        report.case = case;
        match case {
            Case::RLtB2 => {
                // b₂(X) + C² = r
                report.inferred_b2x = Some(r + c.s());
                report.deformation = Some(Deformation {
                    class: SurfaceClass::Rational,
                    b2: 10 + r,
                });
            }
            Case::REqB2 => {
                // −C² = r = b₂(X)
                report.inferred_b2x = Some(r);
                report.deformation = Some(Deformation {
                    class: SurfaceClass::Enriques,
                    b2: 10,
                });
            }
            Case::Unspecified => {}
        }
        Ok(report)
    }
}

/// All of 𝒯 with `r` entries and excess `s`, canonical and sorted.
pub fn enumerate_t(r: usize, s: usize) -> Vec<CuspType> {
    fn go(r: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<CuspType>) {
        let i = cur.len();
        if i + 1 == r {
            let last = left as i64;
            // The least rotation starts at a minimal entry.
            if cur.first().is_some_and(|&c0| last + 2 < c0) {
                return;
            }
            cur.push(last + 2);
            if least_rotation(cur) == 0 {
                out.push(
                    CuspType::try_from(OrientedCycle::from_canonical(cur.clone())).expect("in 𝒯"),
                );
            }
            cur.pop();
            return;
        }
        let lo = if i == 0 { 0 } else { (cur[0] - 2) as usize };
        for e in lo..=left {
            cur.push(e as i64 + 2);
            go(r, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 || s == 0 {
        return out;
    }
    go(r, s, &mut Vec::with_capacity(r), &mut out);
    out
}

/// One classified type in a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "type")]
    pub cusp_type: CuspType,
    pub dual: CuspType,
    pub r: usize,
    pub s: i64,
    pub smoothable: bool,
    pub wahl_ok: bool,
    pub wahl_dimension: i64,
    pub certificate_moves: Option<usize>,
    pub replay_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub max_r: usize,
    pub max_s: usize,
    pub total: usize,
    pub smoothable: usize,
    pub unsmoothable: usize,
    /// Types with excess ≤ 10 that came out unsmoothable.
    pub counterexamples: Vec<CuspType>,
    /// Smoothable types with `r + 10 + C² ≤ 0`.
    pub wahl_violations: Vec<CuspType>,
    /// Types whose certificate failed the lattice replay.
    pub replay_failures: Vec<CuspType>,
    pub unsmoothable_types: Vec<CuspType>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
            && self.wahl_violations.is_empty()
            && self.replay_failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Per-type rows as tab-separated values with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("type\tdual\tr\ts\tsmoothable\twahl_dimension\tmoves\treplay_ok\n");
        for row in &self.rows {
            let moves = row
                .certificate_moves
                .map_or("-".to_string(), |m| m.to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.cusp_type,
                row.dual,
                row.r,
                row.s,
                row.smoothable,
                row.wahl_dimension,
                moves,
                row.replay_ok
            ));
        }
        out
    }
}

/// Certificate replays in the lattice against the dual, and the lattice
/// gives `b₂ = 10 + r` for the smoothing.
fn replay_checks(c: &CuspType, dual: &CuspType, cert: &Certificate) -> bool {
    if cert.target.entries() != dual.entries() {
        return false;
    }
    let replay = replay_certificate(cert);
    replay.report.valid
        && smoothing_b2_from_lattice(replay.final_pair()).ok() == Some(10 + c.r() as i64)
}

impl Classifier {
    /// Classifies all of 𝒯 with `r ≤ max_r` and `s ≤ max_s`, in parallel on
    /// the current rayon pool. Rows come out sorted by canonical form.
    pub fn sweep(&self, max_r: usize, max_s: usize) -> Result<SweepReport, SearchError> {
        if max_s > SWEEP_WARN_EXCESS {
            log::warn!(
                "sweep with max_s = {max_s} > {SWEEP_WARN_EXCESS}: search depth grows as r + 9"
            );
        }
        let mut types: Vec<CuspType> = (1..=max_r)
            .flat_map(|r| (1..=max_s).map(move |s| (r, s)))
            .flat_map(|(r, s)| enumerate_t(r, s))
            .collect();
        types.sort();
        let rows = types
            .par_iter()
            .map(|c| {
                let rep = self.classify(c).map_err(|e| match e {
                    ClassifyError::Search(e) => e,
                    ClassifyError::NotSelfDual(_) => unreachable!("classify never checks duality"),
                })?;
                let replay_ok = rep
                    .certificate
                    .as_ref()
                    .is_none_or(|cert| replay_checks(c, &rep.dual, cert));
                Ok(SweepRow {
                    wahl_ok: check_wahl(c),
                    wahl_dimension: wahl_dimension(c),
                    certificate_moves: rep.certificate.as_ref().map(|cert| cert.moves.len()),
                    cusp_type: rep.cusp_type,
                    dual: rep.dual,
                    r: rep.r,
                    s: rep.s,
                    smoothable: rep.smoothable,
                    replay_ok,
                })
            })
            .collect::<Result<Vec<_>, SearchError>>()?;
        let pick = |f: &dyn Fn(&SweepRow) -> bool| {
            rows.iter()
                .filter(|r| f(r))
                .map(|r| r.cusp_type.clone())
                .collect::<Vec<_>>()
        };
        let smoothable = rows.iter().filter(|r| r.smoothable).count();
        Ok(SweepReport {
            max_r,
            max_s,
            total: rows.len(),
            smoothable,
            unsmoothable: rows.len() - smoothable,
            counterexamples: pick(&|r| !r.smoothable && r.s <= SMOOTHABLE_EXCESS_BOUND),
            wahl_violations: pick(&|r| r.smoothable && !r.wahl_ok),
            replay_failures: pick(&|r| !r.replay_ok),
            unsmoothable_types: pick(&|r| !r.smoothable),
            rows,
        })
    }
}
