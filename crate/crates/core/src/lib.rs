//! Smoothability of cusp singularities arising from cycles of rational curves.
//!
//! * [`cycle`]: oriented cycles, cusp types (𝒯) and Hirzebruch–Zagier duality.
//! * [`realizability`]: the blow-up rewrite system on anti-canonical types and
//!   a memoized reverse search producing replayable certificates.
//! * [`lattice`]: an independent Picard-lattice replay that checks
//!   certificates with exact intersection numbers.
//! * [`classify`]: end-to-end classification, Wahl's bound and sweeps.

pub mod classify;
pub mod cycle;
pub mod error;
pub mod lattice;
pub mod realizability;

pub use classify::{
    check_wahl, enumerate_t, wahl_dimension, Case, Classifier, Deformation, SmoothabilityReport,
    SurfaceClass, SweepReport, SweepRow,
};
pub use cycle::{canonicalize, AnticanonicalType, CuspType, OrientedCycle};
pub use error::{ClassifyError, CycleError, LatticeError, SearchError};
pub use lattice::{
    blow_up, init_base, replay_certificate, smoothing_b2_from_lattice, validate, validation_report,
    AnticanonicalPair, PicardLattice, ValidationReport,
};
pub use realizability::{
    apply_move, forward_closure, required_depth, BaseId, BlowupMove, Certificate, MoveKind, Solver,
};
