//! Exact Picard-lattice replay of certificates.
//!
//! A blow-up of ℙ² at `N` points has Picard lattice `Z h ⊕ Z e_1 ⊕ … ⊕ Z e_N`
//! with form `diag(1, −1, …, −1)` and canonical class `K = −3h + Σ e_i`. This
//! module tracks the classes of the cycle components through each blow-up and
//! checks the result with intersection numbers only. It never searches, and
//! it reads types off the lattice rather than from the rewrite rules.

use serde::Serialize;

use crate::cycle::{canonical_vec, least_rotation, AnticanonicalType};
use crate::error::LatticeError;
use crate::realizability::{BaseId, BlowupMove, Certificate, MoveKind};

/// Integer coordinates over `(h, e_1, …, e_N)`.
pub type LatticeVector = Vec<i64>;

/// The form `diag(1, −1, …, −1)`. Missing trailing coordinates are zero.
pub fn intersect(a: &[i64], b: &[i64]) -> i64 {
    let head = a.first().unwrap_or(&0) * b.first().unwrap_or(&0);
    head - a.iter().zip(b).skip(1).map(|(x, y)| x * y).sum::<i64>()
}

fn add(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Picard lattice of ℙ² blown up `blowups` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PicardLattice {
    pub blowups: usize,
}

impl PicardLattice {
    pub fn rank(&self) -> usize {
        1 + self.blowups
    }

    pub fn hyperplane(&self) -> LatticeVector {
        self.unit(0)
    }

    /// `e_i` for `1 ≤ i ≤ N`, or `h` for `i = 0`.
    pub fn unit(&self, i: usize) -> LatticeVector {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }
}

/// A rational surface with an anti-canonical cycle, as lattice data.
///
/// Components are kept in the canonical rotation of the type they carry so
/// that move positions mean the same thing here as in the rewrite system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnticanonicalPair {
    lattice: PicardLattice,
    canonical_class: LatticeVector,
    components: Vec<LatticeVector>,
}

impl AnticanonicalPair {
    pub fn lattice(&self) -> PicardLattice {
        self.lattice
    }

    pub fn canonical_class(&self) -> &[i64] {
        &self.canonical_class
    }

    pub fn components(&self) -> &[LatticeVector] {
        &self.components
    }

    pub fn blowups(&self) -> usize {
        self.lattice.blowups
    }

    /// `K · K`.
    pub fn k_squared(&self) -> i64 {
        intersect(&self.canonical_class, &self.canonical_class)
    }

    /// Entries read off the classes: `−D_i²`, or `2 − D²` for a single
    /// nodal component. Rotation as stored.
    fn raw_type(&self) -> Vec<i64> {
        match self.components.as_slice() {
            [d] => vec![2 - intersect(d, d)],
            ds => ds.iter().map(|d| -intersect(d, d)).collect(),
        }
    }

    /// The cycle type carried by the components.
    pub fn cycle_type(&self) -> AnticanonicalType {
        AnticanonicalType::from_canonical(canonical_vec(&self.raw_type()))
    }

    fn total(&self) -> LatticeVector {
        let zero = vec![0; self.lattice.rank()];
        self.components.iter().fold(zero, |acc, d| add(&acc, d))
    }

    fn rotate_canonical(&mut self) {
        let k = least_rotation(&self.raw_type());
        self.components.rotate_left(k);
    }

    /// Every violated invariant of an anti-canonical pair, ignoring any
    /// claimed type.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let k = &self.canonical_class;
        let neg_k: LatticeVector = k.iter().map(|x| -x).collect();
        let total = self.total();
        if total != neg_k {
            out.push(format!("sum of components {total:?} != -K {neg_k:?}"));
        }
        let k2 = self.k_squared();
        let expected = 9 - self.blowups() as i64;
        if k2 != expected {
            out.push(format!("K.K = {k2}, expected 9 - N = {expected}"));
        }
        let kd = intersect(k, &total);
        let dd = intersect(&total, &total);
        if kd + dd != 0 {
            out.push(format!("K.D + D.D = {} != 0", kd + dd));
        }
        let r = self.components.len();
        let genus_target = if r == 1 { 0 } else { -2 };
        for (i, d) in self.components.iter().enumerate() {
            let adj = intersect(d, &add(d, k));
            if adj != genus_target {
                out.push(format!("D{i}.(D{i}+K) = {adj}, expected {genus_target}"));
            }
        }
        match r {
            1 => {}
            2 => {
                let m = intersect(&self.components[0], &self.components[1]);
                if m != 2 {
                    out.push(format!("D0.D1 = {m}, expected 2"));
                }
            }
            _ => {
                for i in 0..r {
                    for j in i + 1..r {
                        let adjacent = j == i + 1 || (i == 0 && j == r - 1);
                        let want = i64::from(adjacent);
                        let m = intersect(&self.components[i], &self.components[j]);
                        if m != want {
                            out.push(format!("D{i}.D{j} = {m}, expected {want}"));
                        }
                    }
                }
            }
        }
        out
    }
}

/// The plane with one of the three base cycles.
pub fn init_base(id: BaseId) -> AnticanonicalPair {
    let lattice = PicardLattice { blowups: 0 };
    let components = match id {
        BaseId::ThreeLines => vec![vec![1], vec![1], vec![1]],
        BaseId::ConicLine => vec![vec![2], vec![1]],
        BaseId::NodalCubic => vec![vec![3]],
    };
    let mut p = AnticanonicalPair {
        lattice,
        canonical_class: vec![-3],
        components,
    };
    p.rotate_canonical();
    p
}

/// Like [`init_base`], from the textual identifier.
pub fn init_base_named(name: &str) -> Result<AnticanonicalPair, LatticeError> {
    name.parse::<BaseId>()
        .map(init_base)
        .map_err(LatticeError::UnknownBase)
}

/// Blows up a point of the cycle, adding a new exceptional class `e`.
pub fn blow_up(p: &AnticanonicalPair, m: BlowupMove) -> Result<AnticanonicalPair, LatticeError> {
    let r = p.components.len();
    if m.pos >= r {
        return Err(LatticeError::PositionOutOfRange { pos: m.pos, len: r });
    }
    let lattice = PicardLattice {
        blowups: p.lattice.blowups + 1,
    };
    let new_index = lattice.blowups;
    let widen = |v: &LatticeVector| {
        let mut w = v.clone();
        w.resize(lattice.rank(), 0);
        w
    };
    let mut canonical_class = widen(&p.canonical_class);
    canonical_class[new_index] += 1;
    let mut components: Vec<LatticeVector> = p.components.iter().map(widen).collect();
    // strict transform: π*D − mult_p(D)·e
    match m.kind {
        MoveKind::Smooth => components[m.pos][new_index] -= 1,
        MoveKind::Node if r == 1 => {
            components[0][new_index] -= 2;
            components.push(lattice.unit(new_index));
        }
        MoveKind::Node => {
            components[m.pos][new_index] -= 1;
            components[(m.pos + 1) % r][new_index] -= 1;
            components.insert(m.pos + 1, lattice.unit(new_index));
        }
    }
    let mut out = AnticanonicalPair {
        lattice,
        canonical_class,
        components,
    };
    out.rotate_canonical();
    Ok(out)
}

/// Outcome of checking a pair against a claimed type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    #[serde(rename = "K2")]
    pub k2: i64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "type")]
    pub cycle_type: Vec<i64>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Full check of `p` against `claimed`.
pub fn validation_report(p: &AnticanonicalPair, claimed: &AnticanonicalType) -> ValidationReport {
    let mut violations = p.structural_violations();
    let actual = p.cycle_type();
    if actual.len() != claimed.len() {
        violations.push(format!(
            "cycle has {} components, claimed type has {}",
            actual.len(),
            claimed.len()
        ));
    } else if actual != *claimed {
        violations.push(format!("cycle type {actual} != claimed {claimed}"));
    }
    ValidationReport {
        valid: violations.is_empty(),
        k2: p.k_squared(),
        n: p.blowups(),
        cycle_type: actual.entries().to_vec(),
        violations,
    }
}

pub fn validate(p: &AnticanonicalPair, claimed: &AnticanonicalType) -> bool {
    validation_report(p, claimed).valid
}

/// `10 − K·K`, the second Betti number of a smoothing when `p` realizes the
/// dual of a cusp type.
pub fn smoothing_b2_from_lattice(p: &AnticanonicalPair) -> Result<i64, LatticeError> {
    let v = p.structural_violations();
    if !v.is_empty() {
        return Err(LatticeError::Invalid(v.join("; ")));
    }
    Ok(10 - p.k_squared())
}

/// Result of replaying a certificate move by move.
#[derive(Clone, Debug)]
pub struct Replay {
    /// Pairs after each move, starting with the base.
    pub steps: Vec<AnticanonicalPair>,
    pub report: ValidationReport,
}

impl Replay {
    pub fn final_pair(&self) -> &AnticanonicalPair {
        self.steps.last().expect("replay holds at least the base")
    }
}

/// Replays `cert` in the lattice, checking `−K = Σ D_i` and `K·K = 9 − N`
/// after every move and the full invariants against the target at the end.
pub fn replay_certificate(cert: &Certificate) -> Replay {
    let mut pair = init_base(cert.base);
    let mut steps = vec![pair.clone()];
    let mut step_violations = Vec::new();
    for (i, &m) in cert.moves.iter().enumerate() {
        match blow_up(&pair, m) {
            Ok(next) => pair = next,
            Err(e) => {
                step_violations.push(format!("move {i} ({m}): {e}"));
                break;
            }
        }
        step_violations.extend(
            pair.structural_violations()
                .into_iter()
                .map(|v| format!("after move {i}: {v}")),
        );
        steps.push(pair.clone());
    }
    let mut report = validation_report(&pair, &cert.target);
    if !step_violations.is_empty() {
        step_violations.append(&mut report.violations);
        report.violations = step_violations;
        report.valid = false;
    }
    Replay { steps, report }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(v: &[i64]) -> AnticanonicalType {
        AnticanonicalType::new(v.to_vec()).unwrap()
    }

    fn same_cycle(a: &[LatticeVector], b: &[LatticeVector]) -> bool {
        a.len() == b.len()
            && (0..a.len()).any(|k| {
                let mut v = a.to_vec();
                v.rotate_left(k);
                v == b
            })
    }

    #[test]
    fn bases() {
        let p = init_base(BaseId::ThreeLines);
        assert_eq!(p.components(), &[vec![1], vec![1], vec![1]]);
        assert_eq!(p.canonical_class(), &[-3]);
        assert!(validate(&p, &at(&[-1, -1, -1])));

        let p = init_base(BaseId::NodalCubic);
        assert_eq!(intersect(&p.components()[0], &p.components()[0]), 9);
        assert!(validate(&p, &at(&[-7])));

        let p = init_base(BaseId::ConicLine);
        assert_eq!(intersect(&p.components()[0], &p.components()[1]), 2);
        assert!(validate(&p, &at(&[-4, -1])));

        assert_eq!(
            init_base_named("quartic"),
            Err(LatticeError::UnknownBase("quartic".into()))
        );
    }

    #[test]
    fn node_blowup_of_nodal_cubic() {
        let p = blow_up(&init_base(BaseId::NodalCubic), BlowupMove::node(0)).unwrap();
        let e1 = vec![0, 1];
        let d = vec![3, -2];
        assert!(same_cycle(p.components(), &[e1.clone(), d.clone()]));
        assert_eq!(intersect(&d, &d), 5);
        assert_eq!(intersect(&e1, &d), 2);
        assert_eq!(p.cycle_type(), at(&[1, -5]));
        assert!(validate(&p, &at(&[1, -5])));
    }

    #[test]
    fn smooth_blowup_of_a_line() {
        let p = blow_up(&init_base(BaseId::ThreeLines), BlowupMove::smooth(0)).unwrap();
        assert!(same_cycle(
            p.components(),
            &[vec![1, -1], vec![1, 0], vec![1, 0]]
        ));
        assert_eq!(intersect(&[1, -1], &[1, -1]), 0);
        assert_eq!(p.k_squared(), 8);
    }

    #[test]
    fn k_squared_drops_by_one() {
        let mut p = init_base(BaseId::ConicLine);
        for m in [
            BlowupMove::node(1),
            BlowupMove::smooth(2),
            BlowupMove::node(0),
        ] {
            let next = blow_up(&p, m).unwrap();
            assert_eq!(next.k_squared(), p.k_squared() - 1);
            assert!(next.structural_violations().is_empty());
            p = next;
        }
        assert_eq!(
            blow_up(&p, BlowupMove::smooth(9)),
            Err(LatticeError::PositionOutOfRange { pos: 9, len: 4 })
        );
    }

    #[test]
    fn length_mismatch_is_invalid() {
        let p = init_base(BaseId::ThreeLines);
        let rep = validation_report(&p, &at(&[-1, -1]));
        assert!(!rep.valid);
        assert_eq!(rep.violations.len(), 1);
    }

    #[test]
    fn broken_pair_is_detected() {
        let mut p = init_base(BaseId::ThreeLines);
        p.components[0] = vec![2];
        let v = p.structural_violations();
        assert!(v.iter().any(|s| s.contains("-K")));
        assert!(smoothing_b2_from_lattice(&p).is_err());
    }

    #[test]
    fn b2_of_base() {
        assert_eq!(
            smoothing_b2_from_lattice(&init_base(BaseId::ThreeLines)).unwrap(),
            1
        );
    }

    #[test]
    fn replay_and_tamper() {
        let cert = Certificate {
            base: BaseId::NodalCubic,
            moves: vec![BlowupMove::node(0), BlowupMove::node(0)],
            target: at(&[1, 2, -4]),
        };
        let r = replay_certificate(&cert);
        assert!(r.report.valid, "{:?}", r.report.violations);
        assert_eq!(r.report.n, 2);
        assert_eq!(r.report.k2, 7);
        assert_eq!(r.steps.len(), 3);

        let mut tampered = cert.clone();
        tampered.moves.pop();
        assert!(!replay_certificate(&tampered).report.valid);

        let mut bad_pos = cert;
        bad_pos.moves[1] = BlowupMove::smooth(7);
        let r = replay_certificate(&bad_pos);
        assert!(!r.report.valid);
        assert!(r.report.violations[0].contains("move 1"));
    }

    #[test]
    fn report_json_field_order() {
        let rep = validation_report(&init_base(BaseId::NodalCubic), &at(&[-7]));
        assert_eq!(
            rep.to_json(),
            r#"{"valid":true,"K2":9,"N":0,"type":[-7],"violations":[]}"#
        );
    }
}
