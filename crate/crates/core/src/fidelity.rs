//! Gate fidelity of a propagator set, two-pulse closed forms, and
//! classification of the underlying excitation pathways.
//!
//! The target gate puts a pi phase on every computational state except
//! |11>, so the figure of merit reads off the first diagonal entry of each
//! block: F = (1/16) (1 - U^A_11 - U^B_11 - U^V_11)^2.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{compose, PropagatorSet, Pulse, PulseSequence, StructuralVector, Subsystem};

/// Largest tolerated imaginary part on a propagator diagonal entry.
pub const REALNESS_TOL: f64 = 1e-12;

/// Weight ratio below which a pathway is considered absent.
pub const MECHANISM_THRESHOLD: f64 = 0.05;

/// Gate fidelity in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FidelityValue(f64);

impl FidelityValue {
    pub fn new(f: f64) -> Self {
        debug_assert!(
            (-1e-9..=1.0 + 1e-9).contains(&f),
            "fidelity {f} outside [0, 1]"
        );
        Self(f.clamp(0.0, 1.0))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for FidelityValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fidelity from the block diagonals, insisting that they are real.
///
/// Real structural vectors keep single-pulse diagonals real for any optical
/// phase; a non-real entry signals either a modeling error or a multi-pulse
/// train with unequal phases, and is rejected rather than silently
/// projected.
pub fn fidelity(u: &PropagatorSet) -> Result<FidelityValue> {
    let entries = Subsystem::ALL.map(|s| u.first_entry(s));
    let max_im = entries.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
    if max_im > REALNESS_TOL {
        return Err(Error::NonRealDiagonal(max_im));
    }
    // same reduction order as fidelity_magnitude, so the two agree
    // bitwise whenever the imaginary parts vanish
    let sum = entries.iter().fold(1.0, |acc, e| acc - e.re);
    Ok(FidelityValue::new((sum * sum) / 16.0))
}

/// Fidelity as |1 - U^A_11 - U^B_11 - U^V_11|^2 / 16.
///
/// Coincides with [`fidelity`] whenever the diagonals are real and stays
/// defined when relative-phase noise makes them complex, which is why the
/// Monte Carlo sampler uses it.
pub fn fidelity_magnitude(u: &PropagatorSet) -> FidelityValue {
    let sum = Subsystem::ALL
        .iter()
        .fold(C64::ONE, |acc, &s| acc - u.first_entry(s));
    FidelityValue::new(sum.norm_sqr() / 16.0)
}

/// Fidelity of a single zero-phase pulse with area `area` and ratio `x`.
///
/// Both arguments must be finite. Invariant under x -> 1/x.
pub fn fidelity_single(area: f64, x: f64) -> FidelityValue {
    let pulse = Pulse::from_ratio(area, x).expect("finite ratio");
    let u = crate::gate::propagator_single(&pulse);
    fidelity(&u).expect("single-pulse diagonals are real")
}

/// First diagonal entries of a two-pulse train in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPulseDiagonal {
    pub u_v11: f64,
    pub u_a11: f64,
    pub u_b11: f64,
}

/// Closed-form diagonals of a two-pulse train (zero phases).
///
/// Each two-level entry is cos(t2)cos(t1) - sin(t2)sin(t1) with the local
/// mixing angles; the V entry carries the overlap e1.e2 of the structural
/// vectors on its second term.
pub fn two_pulse_closed_form(
    area1: f64,
    area2: f64,
    e1: &StructuralVector,
    e2: &StructuralVector,
) -> TwoPulseDiagonal {
    let half = |a: f64| a / 2.0;
    let two_level = |t1: f64, t2: f64| t2.cos() * t1.cos() - t2.sin() * t1.sin();
    let (t1, t2) = (half(area1), half(area2));
    TwoPulseDiagonal {
        u_v11: t2.cos() * t1.cos() - e1.dot(e2) * t2.sin() * t1.sin(),
        u_a11: two_level(e1.a() * t1, e2.a() * t2),
        u_b11: two_level(e1.b() * t1, e2.b() * t2),
    }
}

/// Which pathway dominates the recovered amplitude of a subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MechanismKind {
    /// Amplitude returns without inter-pulse Rydberg storage.
    ZeroLoop,
    /// Amplitude is parked in a Rydberg state between pulses.
    OneLoop,
    Mixed,
}

impl std::fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MechanismKind::ZeroLoop => "0-loop",
            MechanismKind::OneLoop => "1-loop",
            MechanismKind::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Pathway label with the 0-loop and 1-loop weights of a subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismLabel {
    pub kind: MechanismKind,
    pub w0: f64,
    pub w1: f64,
}

impl MechanismLabel {
    fn from_weights(w0: f64, w1: f64) -> Self {
        let kind = if w1 < MECHANISM_THRESHOLD * w0 {
            MechanismKind::ZeroLoop
        } else if w0 < MECHANISM_THRESHOLD * w1 {
            MechanismKind::OneLoop
        } else {
            MechanismKind::Mixed
        };
        Self { kind, w0, w1 }
    }
}

/// Per-subsystem mechanism labels of a pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismReport {
    pub v: MechanismLabel,
    pub a: MechanismLabel,
    pub b: MechanismLabel,
}

impl MechanismReport {
    pub fn get(&self, s: Subsystem) -> MechanismLabel {
        match s {
            Subsystem::V => self.v,
            Subsystem::A => self.a,
            Subsystem::B => self.b,
        }
    }
}

/// Classifies the excitation pathway of each subsystem.
///
/// Expands the returning amplitude by the number of computational->Rydberg
/// excursions: w_m = |sum of all m-excursion path amplitudes|^2. For one or
/// two pulses this reproduces the closed-form weights |cos cos|^2 and
/// |sin sin|^2 (the latter scaled by e1.e2 for the V block); longer trains
/// are handled by the same expansion carried numerically.
pub fn classify_mechanism(seq: &PulseSequence) -> MechanismReport {
    MechanismReport {
        v: loop_weights_v(seq),
        a: loop_weights_2(seq, Subsystem::A),
        b: loop_weights_2(seq, Subsystem::B),
    }
}

/// Polynomial-in-z state: coefficient d holds the amplitude that has used
/// exactly d sector-switching factors.
fn loop_weights_2(seq: &PulseSequence, s: Subsystem) -> MechanismLabel {
    let np = seq.len();
    let mut coeffs = vec![[C64::ZERO; 2]; 2 * np + 1];
    coeffs[0][0] = C64::ONE;
    for p in seq.pulses() {
        let theta = p.mixing_angle(s);
        let (sin, cos) = theta.sin_cos();
        let ph = C64::new(0.0, p.phase).exp();
        let mut next = vec![[C64::ZERO; 2]; coeffs.len()];
        for (d, v) in coeffs.iter().enumerate() {
            // diagonal (sector-keeping) part
            next[d][0] += cos * v[0];
            next[d][1] += cos * v[1];
            // off-diagonal (sector-switching) part, one power of z
            if d + 1 < next.len() {
                next[d + 1][0] += C64::new(0.0, sin) * ph * v[1];
                next[d + 1][1] += C64::new(0.0, sin) * ph.conj() * v[0];
            }
        }
        coeffs = next;
    }
    let w0 = coeffs[0][0].norm_sqr();
    let w1 = if coeffs.len() > 2 {
        coeffs[2][0].norm_sqr()
    } else {
        0.0
    };
    MechanismLabel::from_weights(w0, w1)
}

fn loop_weights_v(seq: &PulseSequence) -> MechanismLabel {
    let np = seq.len();
    let mut coeffs = vec![[C64::ZERO; 3]; 2 * np + 1];
    coeffs[0][0] = C64::ONE;
    for p in seq.pulses() {
        let a = p.structural.a();
        let b = p.structural.b();
        let theta = p.mixing_angle(Subsystem::V);
        let (sin, cos) = theta.sin_cos();
        let ph = C64::new(0.0, p.phase).exp();
        let cm1 = cos - 1.0;
        // Rydberg-sector block of the single-pulse propagator
        let rr = [
            [a * a * cos + b * b, a * b * cm1],
            [a * b * cm1, b * b * cos + a * a],
        ];
        let mut next = vec![[C64::ZERO; 3]; coeffs.len()];
        for (d, v) in coeffs.iter().enumerate() {
            next[d][0] += cos * v[0];
            next[d][1] += rr[0][0] * v[1] + rr[0][1] * v[2];
            next[d][2] += rr[1][0] * v[1] + rr[1][1] * v[2];
            if d + 1 < next.len() {
                next[d + 1][0] += C64::new(0.0, sin) * ph * (a * v[1] + b * v[2]);
                next[d + 1][1] += C64::new(0.0, a * sin) * ph.conj() * v[0];
                next[d + 1][2] += C64::new(0.0, b * sin) * ph.conj() * v[0];
            }
        }
        coeffs = next;
    }
    let w0 = coeffs[0][0].norm_sqr();
    let w1 = if coeffs.len() > 2 {
        coeffs[2][0].norm_sqr()
    } else {
        0.0
    };
    MechanismLabel::from_weights(w0, w1)
}

/// Fidelity of an arbitrary pulse train via composition.
pub fn fidelity_of_sequence(seq: &PulseSequence) -> Result<FidelityValue> {
    fidelity(&compose(seq))
}
