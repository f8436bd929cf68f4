//! Independent numeric verification of the analytic propagators.
//!
//! Integrates the time-dependent Schroedinger equation for each subsystem
//! block with an explicit pulse envelope and a fixed-step RK4 scheme. On
//! resonance only the enclosed area matters, so any envelope that integrates
//! to the pulse area must reproduce [`crate::gate::compose`]; this module is
//! the check that it does.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gate::{Pulse, PropagatorSet, PulseSequence};
use crate::mat::{Mat2, Mat3};

/// Minimum RK4 steps per pulse.
pub const MIN_STEPS: usize = 1000;

/// Tolerance of the step-halving self-check. RK4 is fourth order, so a
/// fine/coarse gap below this bounds the fine-grid error by roughly a
/// fifteenth of it.
const HALVING_TOL: f64 = 1e-6;

/// Pulse envelope shape. The duration is arbitrary on resonance; the
/// Gaussian is truncated at +-4 sigma so its support is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Gaussian { duration: f64 },
    Square { duration: f64 },
}

impl Envelope {
    fn duration(&self) -> f64 {
        match *self {
            Envelope::Gaussian { duration } | Envelope::Square { duration } => duration,
        }
    }

    /// Unnormalized shape on [0, duration].
    fn shape(&self, t: f64) -> f64 {
        match *self {
            Envelope::Gaussian { duration } => {
                let sigma = duration / 8.0;
                let dt = t - duration / 2.0;
                (-dt * dt / (2.0 * sigma * sigma)).exp()
            }
            Envelope::Square { .. } => 1.0,
        }
    }
}

/// Numerically integrates the block Hamiltonians over the sequence of
/// non-overlapping pulses. `steps` is the RK4 step count per pulse; the
/// result is cross-checked against a half-resolution run and rejected if the
/// two disagree.
pub fn propagate_numeric(
    seq: &PulseSequence,
    envelope: Envelope,
    steps: usize,
) -> Result<PropagatorSet> {
    if steps < MIN_STEPS {
        return Err(Error::TooFewSteps {
            min: MIN_STEPS,
            got: steps,
        });
    }
    let fine = propagate_with_steps(seq, envelope, steps);
    let coarse = propagate_with_steps(seq, envelope, steps / 2);
    let diff = fine.max_abs_diff(&coarse);
    if diff > HALVING_TOL {
        return Err(Error::NumericNonConvergence(diff));
    }
    Ok(fine)
}

fn propagate_with_steps(seq: &PulseSequence, envelope: Envelope, steps: usize) -> PropagatorSet {
    let mut acc = PropagatorSet::identity();
    for p in seq.pulses() {
        acc = acc.then(&propagate_pulse(p, envelope, steps));
    }
    acc
}

fn propagate_pulse(p: &Pulse, envelope: Envelope, steps: usize) -> PropagatorSet {
    let duration = envelope.duration();
    let h = duration / steps as f64;

    // Normalize the envelope on its own grid (Simpson) so the enclosed area
    // equals the pulse area to far better than the RK4 error.
    let mut integral = 0.0;
    for k in 0..steps {
        let t0 = k as f64 * h;
        integral += h / 6.0
            * (envelope.shape(t0)
                + 4.0 * envelope.shape(t0 + h / 2.0)
                + envelope.shape(t0 + h));
    }
    let scale = p.area / integral;

    let a = p.structural.a();
    let b = p.structural.b();
    let ph = C64::new(0.0, p.phase).exp();

    // i dU/dt = H U with H = -(Omega/2) (coupling + h.c.); dU/dt = rate(t)*(i M U)
    // where M carries the couplings and rate = Omega/2.
    let m_v = Mat3([
        [C64::ZERO, C64::new(a, 0.0) * ph, C64::new(b, 0.0) * ph],
        [C64::new(a, 0.0) * ph.conj(), C64::ZERO, C64::ZERO],
        [C64::new(b, 0.0) * ph.conj(), C64::ZERO, C64::ZERO],
    ]);
    let m_a = Mat2([
        [C64::ZERO, C64::new(a, 0.0) * ph],
        [C64::new(a, 0.0) * ph.conj(), C64::ZERO],
    ]);
    let m_b = Mat2([
        [C64::ZERO, C64::new(b, 0.0) * ph],
        [C64::new(b, 0.0) * ph.conj(), C64::ZERO],
    ]);

    let rate = |t: f64| 0.5 * scale * envelope.shape(t);

    PropagatorSet {
        u_v: rk4_mat3(&m_v, rate, h, steps),
        u_a: rk4_mat2(&m_a, rate, h, steps),
        u_b: rk4_mat2(&m_b, rate, h, steps),
    }
}

macro_rules! rk4_impl {
    ($name:ident, $mat:ty) => {
        fn $name(m: &$mat, rate: impl Fn(f64) -> f64, h: f64, steps: usize) -> $mat {
            let deriv = |r: f64, u: &$mat| -> $mat {
                let mut out = m.mul(u);
                for row in out.0.iter_mut() {
                    for entry in row.iter_mut() {
                        *entry *= C64::new(0.0, r);
                    }
                }
                out
            };
            let add_scaled = |u: &$mat, k: &$mat, w: f64| -> $mat {
                let mut out = *u;
                for (orow, krow) in out.0.iter_mut().zip(k.0.iter()) {
                    for (o, kk) in orow.iter_mut().zip(krow.iter()) {
                        *o += *kk * w;
                    }
                }
                out
            };

            let mut u = <$mat>::identity();
            for k in 0..steps {
                let t = k as f64 * h;
                let r1 = rate(t);
                let r2 = rate(t + h / 2.0);
                let r4 = rate(t + h);
                let k1 = deriv(r1, &u);
                let k2 = deriv(r2, &add_scaled(&u, &k1, h / 2.0));
                let k3 = deriv(r2, &add_scaled(&u, &k2, h / 2.0));
                let k4 = deriv(r4, &add_scaled(&u, &k3, h));
                let mut step = add_scaled(&u, &k1, h / 6.0);
                step = add_scaled(&step, &k2, h / 3.0);
                step = add_scaled(&step, &k3, h / 3.0);
                step = add_scaled(&step, &k4, h / 6.0);
                u = step;
            }
            u
        }
    };
}

rk4_impl!(rk4_mat2, Mat2);
rk4_impl!(rk4_mat3, Mat3);
