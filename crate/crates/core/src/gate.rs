//! Domain types and exact per-pulse propagators for the three decoupled
//! subsystem blocks of a blockaded qubit pair.
//!
//! A resonant pulse driving both qubits splits the dynamics into a 3-level
//! V block over {|00>, |r0>, |0r>} and two 2-level blocks over {|01>, |r1>}
//! and {|10>, |1r>}. The doubly-occupied state |11> never couples to the
//! field and is represented implicitly. Propagators depend on the pulse only
//! through its area, the spatial coefficients at the two qubit sites, and
//! the optical phase.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{Mat2, Mat3};

/// Normalization tolerance for structural vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// The three field-coupled subsystem blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    /// 3-level block {|00>, |r0>, |0r>}.
    V,
    /// 2-level block {|01>, |r1>}, driven by the site-A amplitude.
    A,
    /// 2-level block {|10>, |1r>}, driven by the site-B amplitude.
    B,
}

impl Subsystem {
    pub const ALL: [Subsystem; 3] = [Subsystem::V, Subsystem::A, Subsystem::B];
}

/// Normalized per-pulse spatial coefficients (a, b) at the two qubit sites.
///
/// Components may be negative; a relative sign encodes a pi phase between
/// the local drives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralVector {
    a: f64,
    b: f64,
}

impl StructuralVector {
    /// Builds a structural vector, rejecting non-normalized components.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let defect = (a * a + b * b - 1.0).abs();
        if !defect.is_finite() || defect > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { a, b, defect });
        }
        Ok(Self { a, b })
    }

    /// Builds the unit vector with component ratio `b/a = x` and `a > 0`.
    pub fn from_ratio(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFiniteRatio(x));
        }
        let a = 1.0 / (1.0 + x * x).sqrt();
        Ok(Self { a, b: x * a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Component ratio x = b/a. Infinite when a = 0.
    pub fn ratio(&self) -> f64 {
        self.b / self.a
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.a * other.a + self.b * other.b
    }

    /// Global sign flip; equivalent to shifting the pulse phase by pi.
    pub fn negated(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
        }
    }
}

/// One resonant pulse: signed area (integral of the Rabi frequency),
/// structural vector, and global optical phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub area: f64,
    pub structural: StructuralVector,
    pub phase: f64,
}

impl Pulse {
    pub fn new(area: f64, structural: StructuralVector, phase: f64) -> Self {
        Self {
            area,
            structural,
            phase,
        }
    }

    /// Pulse with ratio x and zero phase.
    pub fn from_ratio(area: f64, x: f64) -> Result<Self> {
        Ok(Self::new(area, StructuralVector::from_ratio(x)?, 0.0))
    }

    /// Mixing angle theta^S: A/2 for V, a*A/2 for A, b*A/2 for B.
    pub fn mixing_angle(&self, s: Subsystem) -> f64 {
        match s {
            Subsystem::V => self.area / 2.0,
            Subsystem::A => self.structural.a * self.area / 2.0,
            Subsystem::B => self.structural.b * self.area / 2.0,
        }
    }

    /// Generalized pulse area of subsystem `s`: 2*theta^S.
    pub fn gpa(&self, s: Subsystem) -> f64 {
        2.0 * self.mixing_angle(s)
    }

    /// Inverse pulse: same vector and phase, opposite area.
    pub fn inverse(&self) -> Self {
        Self {
            area: -self.area,
            ..*self
        }
    }
}

/// Generalized pulse area of subsystem `s` for pulse `p`.
pub fn gpa(p: &Pulse, s: Subsystem) -> f64 {
    p.gpa(s)
}

/// Time-ordered pulse train; index 0 is applied first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pulses: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<Pulse>) -> Result<Self> {
        if pulses.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(Self { pulses })
    }

    pub fn single(pulse: Pulse) -> Self {
        Self {
            pulses: vec![pulse],
        }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Accumulated area A_T = sum of |A_k|.
    pub fn accumulated_area(&self) -> f64 {
        self.pulses.iter().map(|p| p.area.abs()).sum()
    }
}

/// The three block propagators of a pulse or pulse train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSet {
    /// 3x3 propagator over {|00>, |r0>, |0r>}.
    pub u_v: Mat3,
    /// 2x2 propagator over {|01>, |r1>}.
    pub u_a: Mat2,
    /// 2x2 propagator over {|10>, |1r>}.
    pub u_b: Mat2,
}

impl PropagatorSet {
    pub fn identity() -> Self {
        Self {
            u_v: Mat3::identity(),
            u_a: Mat2::identity(),
            u_b: Mat2::identity(),
        }
    }

    /// First diagonal entry of the requested block: the amplitude for the
    /// corresponding computational state to return to itself.
    pub fn first_entry(&self, s: Subsystem) -> C64 {
        match s {
            Subsystem::V => self.u_v.get(0, 0),
            Subsystem::A => self.u_a.get(0, 0),
            Subsystem::B => self.u_b.get(0, 0),
        }
    }

    /// Worst unitarity defect over the three blocks.
    pub fn unitarity_defect(&self) -> f64 {
        self.u_v
            .unitarity_defect()
            .max(self.u_a.unitarity_defect())
            .max(self.u_b.unitarity_defect())
    }

    /// Left-multiplies by the blocks of a later pulse.
    pub fn then(&self, later: &Self) -> Self {
        Self {
            u_v: later.u_v.mul(&self.u_v),
            u_a: later.u_a.mul(&self.u_a),
            u_b: later.u_b.mul(&self.u_b),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u_v
            .max_abs_diff(&other.u_v)
            .max(self.u_a.max_abs_diff(&other.u_a))
            .max(self.u_b.max_abs_diff(&other.u_b))
    }
}

fn two_level(theta: f64, phase: C64) -> Mat2 {
    let (sin, cos) = theta.sin_cos();
    let i_sin = C64::new(0.0, sin);
    Mat2([
        [C64::new(cos, 0.0), i_sin * phase],
        [i_sin * phase.conj(), C64::new(cos, 0.0)],
    ])
}

/// Exact propagators of a single resonant pulse.
///
/// The V block couples |00> to both singly-excited states with weights
/// (a, b); its lower 2x2 corner mixes the two Rydberg locations through the
/// shared ground state. A global optical phase multiplies the couplings by
/// e^{+-i phi} and leaves every diagonal entry unchanged.
pub fn propagator_single(p: &Pulse) -> PropagatorSet {
    let a = p.structural.a();
    let b = p.structural.b();
    let theta_v = p.mixing_angle(Subsystem::V);
    let (sin_v, cos_v) = theta_v.sin_cos();
    let ph = C64::new(0.0, p.phase).exp();

    let cm1 = cos_v - 1.0;
    let u_v = Mat3([
        [
            C64::new(cos_v, 0.0),
            C64::new(0.0, a * sin_v) * ph,
            C64::new(0.0, b * sin_v) * ph,
        ],
        [
            C64::new(0.0, a * sin_v) * ph.conj(),
            C64::new(a * a * cos_v + b * b, 0.0),
            C64::new(a * b * cm1, 0.0),
        ],
        [
            C64::new(0.0, b * sin_v) * ph.conj(),
            C64::new(a * b * cm1, 0.0),
            C64::new(b * b * cos_v + a * a, 0.0),
        ],
    ]);

    PropagatorSet {
        u_v,
        u_a: two_level(p.mixing_angle(Subsystem::A), ph),
        u_b: two_level(p.mixing_angle(Subsystem::B), ph),
    }
}

/// Time-ordered product of the per-pulse propagators; later pulses multiply
/// on the left.
pub fn compose(seq: &PulseSequence) -> PropagatorSet {
    let mut acc = PropagatorSet::identity();
    for p in seq.pulses() {
        acc = acc.then(&propagator_single(p));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() < tol, "{x} !~ {y} (tol {tol})");
    }

    #[test]
    fn ratio_construction() {
        let e = StructuralVector::from_ratio(1.0).unwrap();
        assert_close(e.a(), FRAC_1_SQRT_2, 1e-15);
        assert_close(e.b(), FRAC_1_SQRT_2, 1e-15);

        let e = StructuralVector::from_ratio(0.0).unwrap();
        assert_eq!((e.a(), e.b()), (1.0, 0.0));

        let e = StructuralVector::from_ratio(1.0 / 3.0).unwrap();
        assert_close(e.a(), 3.0 / 10.0_f64.sqrt(), 1e-15);
        assert_close(e.b(), 1.0 / 10.0_f64.sqrt(), 1e-15);

        assert!(StructuralVector::from_ratio(f64::NAN).is_err());
        assert!(StructuralVector::from_ratio(f64::INFINITY).is_err());
    }

    #[test]
    fn negative_ratio_keeps_a_positive() {
        let e = StructuralVector::from_ratio(-0.5).unwrap();
        assert!(e.a() > 0.0);
        assert!(e.b() < 0.0);
        assert_close(e.ratio(), -0.5, 1e-15);
    }

    #[test]
    fn new_rejects_denormalized() {
        assert!(StructuralVector::new(1.0, 0.1).is_err());
        assert!(StructuralVector::new(0.6, 0.8).is_ok());
    }

    #[test]
    fn pi_area_on_decoupled_vector() {
        let p = Pulse::from_ratio(2.0 * PI, 0.0).unwrap();
        let u = propagator_single(&p);
        assert_close(u.first_entry(Subsystem::A).re, -1.0, 1e-15);
        assert!(u.u_b.max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn zero_area_is_identity() {
        let p = Pulse::from_ratio(0.0, 0.7).unwrap();
        let u = propagator_single(&p);
        assert_eq!(u.max_abs_diff(&PropagatorSet::identity()), 0.0);
    }

    #[test]
    fn symmetric_two_pi_pulse_entries() {
        // A = 2pi on (1/sqrt2, 1/sqrt2): U_V(1,1) = cos(pi) = -1 and the
        // second diagonal entry collapses to (cos pi)/2 + 1/2 = 0.
        let p = Pulse::from_ratio(2.0 * PI, 1.0).unwrap();
        let u = propagator_single(&p);
        assert_close(u.first_entry(Subsystem::V).re, -1.0, 1e-15);
        assert_close(u.u_v.get(1, 1).norm(), 0.0, 1e-15);
    }

    #[test]
    fn off_diagonal_cross_coupling() {
        // U_V(2,3) = U_V(3,2) = a*b*(cos theta - 1)
        let e = StructuralVector::from_ratio(0.37).unwrap();
        let p = Pulse::new(5.1, e, 0.0);
        let expected = e.a() * e.b() * ((5.1 / 2.0_f64).cos() - 1.0);
        assert_close(p0_entry(&p, 1, 2), expected, 1e-14);
        assert_close(p0_entry(&p, 2, 1), expected, 1e-14);
    }

    fn p0_entry(p: &Pulse, i: usize, j: usize) -> f64 {
        propagator_single(p).u_v.get(i, j).re
    }

    #[test]
    fn compose_single_matches_propagator_single() {
        let p = Pulse::from_ratio(1.3 * PI, 0.4).unwrap();
        let seq = PulseSequence::single(p);
        assert_eq!(compose(&seq).max_abs_diff(&propagator_single(&p)), 0.0);
    }

    #[test]
    fn aligned_areas_add() {
        let e = StructuralVector::from_ratio(0.31).unwrap();
        let (a1, a2) = (1.7 * PI, 0.9 * PI);
        let seq = PulseSequence::new(vec![Pulse::new(a1, e, 0.0), Pulse::new(a2, e, 0.0)]).unwrap();
        let u = compose(&seq);
        assert_close(
            u.first_entry(Subsystem::V).re,
            ((a1 + a2) / 2.0).cos(),
            1e-14,
        );
    }

    #[test]
    fn pulse_then_inverse_is_identity() {
        let p = Pulse::from_ratio(2.6, 0.8).unwrap();
        let seq = PulseSequence::new(vec![p, p.inverse()]).unwrap();
        assert!(compose(&seq).max_abs_diff(&PropagatorSet::identity()) < 1e-14);
    }

    #[test]
    fn sign_flip_equals_pi_phase() {
        let e = StructuralVector::from_ratio(0.45).unwrap();
        let flipped = propagator_single(&Pulse::new(2.2, e.negated(), 0.0));
        let phased = propagator_single(&Pulse::new(2.2, e, PI));
        assert!(flipped.max_abs_diff(&phased) < 1e-14);
    }

    #[test]
    fn gpa_values() {
        let p = Pulse::from_ratio(6.0 * PI, 1.0 / 3.0).unwrap();
        assert_close(p.gpa(Subsystem::V), 6.0 * PI, 1e-12);
        assert_close(p.gpa(Subsystem::B), 6.0 * PI / 10.0_f64.sqrt(), 1e-12);
        let z = Pulse::from_ratio(0.0, 1.0).unwrap();
        assert_eq!(z.gpa(Subsystem::A), 0.0);
    }

    #[test]
    fn accumulated_area_uses_magnitudes() {
        let p = Pulse::from_ratio(2.0, 0.3).unwrap();
        let seq = PulseSequence::new(vec![p, p.inverse()]).unwrap();
        assert_close(seq.accumulated_area(), 4.0, 1e-15);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(matches!(
            PulseSequence::new(vec![]),
            Err(Error::EmptySequence)
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn propagators_are_unitary(
                area in -30.0..30.0_f64,
                x in -8.0..8.0_f64,
                phase in -PI..PI,
            ) {
                let p = Pulse::new(area, StructuralVector::from_ratio(x).unwrap(), phase);
                prop_assert!(propagator_single(&p).unitarity_defect() < 1e-10);
            }

            #[test]
            fn diagonal_ignores_phase(
                area in -20.0..20.0_f64,
                x in -5.0..5.0_f64,
                phase in -PI..PI,
            ) {
                let e = StructuralVector::from_ratio(x).unwrap();
                let with_phase = propagator_single(&Pulse::new(area, e, phase));
                let no_phase = propagator_single(&Pulse::new(area, e, 0.0));
                for s in Subsystem::ALL {
                    prop_assert!(
                        (with_phase.first_entry(s) - no_phase.first_entry(s)).norm() < 1e-14
                    );
                }
            }

            #[test]
            fn composed_sequences_are_unitary(
                areas in proptest::collection::vec(-15.0..15.0_f64, 1..5),
                xs in proptest::collection::vec(-4.0..4.0_f64, 4),
            ) {
                let pulses: Vec<Pulse> = areas
                    .iter()
                    .zip(&xs)
                    .map(|(&a, &x)| Pulse::from_ratio(a, x).unwrap())
                    .collect();
                let seq = PulseSequence::new(pulses).unwrap();
                prop_assert!(compose(&seq).unitarity_defect() < 1e-10);
            }
        }
    }
}
