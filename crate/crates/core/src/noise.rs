//! Shot-to-shot fluctuation model and Monte Carlo fidelity statistics.
//!
//! Intensity jitter rescales pulse areas (delta_A = delta_I / 2) and feeds
//! the ratio error together with thermal position jitter:
//! delta_x^2 = delta_I^2 + (2 + 1/(x^2 (x^2+1))) theta^2 delta_R^2.
//! All distributions are Gaussian. Sampling is counter-based: each sample
//! index opens its own deterministic stream, so results are independent of
//! evaluation order and thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fidelity::fidelity_magnitude;
use crate::gate::{compose, Pulse, PulseSequence, StructuralVector};

/// Position-noise anchor: relative distance jitter at the reference
/// temperature.
pub const DELTA_R_REF: f64 = 0.01;
/// Reference temperature of the anchor, micro-kelvin.
pub const T_REF_UK: f64 = 25.0;
/// Default beam overlap entering the ratio-noise formula.
pub const DEFAULT_THETA: f64 = 0.25;
/// Attempt cap when redrawing non-positive perturbed ratios.
const RESAMPLE_LIMIT: usize = 10_000;

/// Fluctuation magnitudes and sampling controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Relative intensity std, delta_I.
    pub delta_intensity: f64,
    /// Relative interatomic-distance std, delta_R; overrides the
    /// temperature and diffusion routes when present.
    pub delta_position: Option<f64>,
    /// Temperature in micro-kelvin; scales the anchor as sqrt(T / 25 uK).
    pub temperature_uk: Option<f64>,
    /// Absolute laser-phase std in radians.
    pub delta_phase: f64,
    /// Diffusion coefficient (length^2 / time) for the diffusion estimate.
    pub diffusion: Option<f64>,
    /// Gate duration for the diffusion estimate.
    pub gate_time: Option<f64>,
    /// Interatomic distance converting the diffusion estimate to relative
    /// form (same length unit as `diffusion`).
    pub distance: Option<f64>,
    /// Beam overlap used by the ratio-noise formula.
    pub theta: f64,
    /// Monte Carlo sample count.
    pub samples: usize,
    /// Base seed of the counter-based sample streams.
    pub seed: u64,
}

impl NoiseSpec {
    /// Present-day stabilization: delta_I = 3%, positions at 25 uK,
    /// delta_phi = 0.1 pi.
    pub fn standard(samples: usize, seed: u64) -> Self {
        Self {
            delta_intensity: 0.03,
            delta_position: None,
            temperature_uk: Some(T_REF_UK),
            delta_phase: 0.1 * PI,
            diffusion: None,
            gate_time: None,
            distance: None,
            theta: DEFAULT_THETA,
            samples,
            seed,
        }
    }

    /// Best-available stabilization: delta_I = 0.7%, sideband cooling to
    /// 3 uK, delta_phi = 0.01 pi.
    pub fn ultra(samples: usize, seed: u64) -> Self {
        Self {
            delta_intensity: 0.007,
            delta_position: None,
            temperature_uk: Some(3.0),
            delta_phase: 0.01 * PI,
            ..Self::standard(samples, seed)
        }
    }

    /// All fluctuations off.
    pub fn none(samples: usize, seed: u64) -> Self {
        Self {
            delta_intensity: 0.0,
            delta_position: Some(0.0),
            temperature_uk: None,
            delta_phase: 0.0,
            ..Self::standard(samples, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        for &v in [
            self.delta_intensity,
            self.delta_position.unwrap_or(0.0),
            self.delta_phase,
        ]
        .iter()
        {
            if v < 0.0 {
                return Err(Error::NegativeNoise(v));
            }
        }
        if self.samples == 0 {
            return Err(Error::NoSamples);
        }
        Ok(())
    }
}

/// Relative pulse-area std from the relative intensity std: delta_I / 2.
pub fn delta_area(delta_intensity: f64) -> f64 {
    delta_intensity / 2.0
}

/// Relative std of the component ratio x under intensity and position
/// jitter at beam overlap `theta`. Diverges as x -> 0, where even a small
/// positioning error leaks drive onto the nominally dark qubit.
pub fn delta_ratio(x: f64, theta: f64, delta_intensity: f64, delta_position: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::ZeroRatioNoise);
    }
    let x2 = x * x;
    let geom = 2.0 + 1.0 / (x2 * (x2 + 1.0));
    Ok((delta_intensity * delta_intensity
        + geom * theta * theta * delta_position * delta_position)
        .sqrt())
}

/// Resolves the relative position jitter of a spec: direct value first,
/// then the sqrt(T / 25 uK) temperature scaling of the 1% anchor, then the
/// diffusion estimate sqrt(2 D t_gate) / distance.
pub fn delta_r_effective(spec: &NoiseSpec) -> Result<f64> {
    if let Some(dr) = spec.delta_position {
        if dr < 0.0 {
            return Err(Error::NegativeNoise(dr));
        }
        return Ok(dr);
    }
    if let Some(t) = spec.temperature_uk {
        if t < 0.0 {
            return Err(Error::NegativeNoise(t));
        }
        return Ok(DELTA_R_REF * (t / T_REF_UK).sqrt());
    }
    if let (Some(d), Some(tg), Some(dist)) = (spec.diffusion, spec.gate_time, spec.distance) {
        if d < 0.0 || tg < 0.0 || dist <= 0.0 {
            return Err(Error::MissingNoiseAnchor);
        }
        return Ok((2.0 * d * tg).sqrt() / dist);
    }
    Err(Error::MissingNoiseAnchor)
}

/// Per-sequence outcome of one noise draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSequence {
    pub sequence: PulseSequence,
    /// Number of redraws forced by non-positive perturbed ratios.
    pub truncations: u32,
}

/// Draws one perturbed copy of the sequence for the given sample index.
///
/// Per pulse, one shared shot draw scales the area by (1 + g delta_A) and
/// contributes the intensity part of the ratio error; an independent draw
/// adds the position part; a third shifts the phase. The perturbed ratio
/// is renormalized back into a unit structural vector. The stream is a
/// pure function of (seed, sample_index).
pub fn sample_protocol(
    seq: &PulseSequence,
    spec: &NoiseSpec,
    sample_index: u64,
) -> Result<SampledSequence> {
    spec.validate()?;
    let d_area = delta_area(spec.delta_intensity);
    let d_r = delta_r_effective(spec)?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(sample_index);

    let mut truncations = 0u32;
    let mut pulses = Vec::with_capacity(seq.len());
    for p in seq.pulses() {
        let x = p.structural.ratio();
        // delta_ratio with delta_I = 0 isolates the position term; the
        // intensity term rides on the shared shot draw below
        let position_part = if d_r == 0.0 || spec.theta == 0.0 {
            0.0
        } else {
            delta_ratio(x, spec.theta, 0.0, d_r)?
        };

        let mut attempts = 0usize;
        let (area, structural) = loop {
            let g_shot: f64 = rng.sample(StandardNormal);
            let g_pos: f64 = rng.sample(StandardNormal);
            let area = p.area * (1.0 + g_shot * d_area);
            let x_scale = 1.0 + g_shot * spec.delta_intensity + g_pos * position_part;
            let x_new = x * x_scale;
            // a sign change of the ratio is an unphysical tail event
            if x_new * x > 0.0 || x == 0.0 {
                let structural = if x == 0.0 || x_scale == 1.0 {
                    p.structural
                } else {
                    StructuralVector::from_ratio(x_new)?
                };
                break (area, structural);
            }
            truncations += 1;
            attempts += 1;
            if attempts >= RESAMPLE_LIMIT {
                return Err(Error::ResampleExhausted(attempts));
            }
        };
        let g_phase: f64 = rng.sample(StandardNormal);
        let phase = p.phase + g_phase * spec.delta_phase;
        pulses.push(Pulse::new(area, structural, phase));
    }
    Ok(SampledSequence {
        sequence: PulseSequence::new(pulses)?,
        truncations,
    })
}

/// Monte Carlo fidelity statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSummary {
    pub mean_f: f64,
    /// Population standard deviation over the sample set.
    pub std_f: f64,
    pub samples: usize,
    pub truncations: u64,
    /// Per-sample fidelities in sample-index order, when retained.
    pub per_sample: Option<Vec<f64>>,
}

/// Runs the Monte Carlo over `spec.samples` draws. Samples evaluate in
/// parallel; the statistics reduce in index order, so the output depends
/// only on (spec, sequence). Reported statistics are meaningful from a
/// few hundred samples up; the presets use 1000.
pub fn monte_carlo(seq: &PulseSequence, spec: &NoiseSpec) -> Result<NoiseSummary> {
    monte_carlo_impl(seq, spec, false)
}

/// Same as [`monte_carlo`] but retains the per-sample fidelities.
pub fn monte_carlo_with_samples(seq: &PulseSequence, spec: &NoiseSpec) -> Result<NoiseSummary> {
    monte_carlo_impl(seq, spec, true)
}

fn monte_carlo_impl(seq: &PulseSequence, spec: &NoiseSpec, keep: bool) -> Result<NoiseSummary> {
    spec.validate()?;
    let draws: Vec<(f64, u32)> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|idx| -> Result<(f64, u32)> {
            let sampled = sample_protocol(seq, spec, idx)?;
            // relative-phase noise makes multi-pulse diagonals complex;
            // the magnitude form coincides with the strict one otherwise
            let f = fidelity_magnitude(&compose(&sampled.sequence));
            Ok((f.value(), sampled.truncations))
        })
        .collect::<Result<Vec<_>>>()?;

    // Welford in sample-index order: stable, thread-count independent,
    // and exactly a point mass when every draw coincides
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &(f, _)) in draws.iter().enumerate() {
        let delta = f - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (f - mean);
    }
    let truncations = draws.iter().map(|&(_, t)| t as u64).sum();
    Ok(NoiseSummary {
        mean_f: mean,
        std_f: (m2 / draws.len() as f64).sqrt(),
        samples: spec.samples,
        truncations,
        per_sample: keep.then(|| draws.iter().map(|&(f, _)| f).collect()),
    })
}

/// One row of a protocol-series noise scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub l_prime: u32,
    pub x: f64,
    pub area: f64,
    pub f_ideal: f64,
    pub mean_f: f64,
    pub std_f: f64,
    pub truncations: u64,
}

/// Monte Carlo over the refined (l, l, 0) single-pulse protocols for
/// l = l_min ..= l_max.
pub fn noise_series(l_min: u32, l_max: u32, spec: &NoiseSpec) -> Result<Vec<SeriesRow>> {
    let mut rows = Vec::new();
    for l in l_min..=l_max {
        let refined = {
            let (x0, a0) = crate::dioph::candidate_params(l, l, 0)?;
            crate::dioph::refine_local(x0, a0, None)
        };
        let seq = PulseSequence::single(Pulse::from_ratio(refined.area, refined.x)?);
        let summary = monte_carlo(&seq, spec)?;
        rows.push(SeriesRow {
            l_prime: l,
            x: refined.x,
            area: refined.area,
            f_ideal: refined.fidelity,
            mean_f: summary.mean_f,
            std_f: summary.std_f,
            truncations: summary.truncations,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::fidelity_single;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() < tol, "{x} !~ {y} (tol {tol})");
    }

    #[test]
    fn area_noise_is_half_intensity_noise() {
        assert_eq!(delta_area(0.03), 0.015);
        assert_eq!(delta_area(0.0), 0.0);
        assert_eq!(delta_area(0.007), 0.0035);
    }

    #[test]
    fn ratio_noise_values() {
        // overlap-free limit
        assert_close(delta_ratio(0.7, 0.0, 0.02, 0.05).unwrap(), 0.02, 1e-15);
        // symmetric drive
        assert_close(
            delta_ratio(1.0, 0.5, 0.0, 0.01).unwrap(),
            (2.5_f64 * 0.25).sqrt() * 0.01,
            1e-12,
        );
        // strongly asymmetric drive
        let x = 1.0 / 13.0;
        let geom = 2.0 + 1.0 / (x * x * (x * x + 1.0));
        assert_close(
            delta_ratio(x, 0.5, 0.0, 0.01).unwrap(),
            (geom * 0.25).sqrt() * 0.01,
            1e-12,
        );
        assert!(delta_ratio(0.0, 0.5, 0.01, 0.01).is_err());
    }

    #[test]
    fn position_noise_resolution() {
        let mut spec = NoiseSpec::standard(10, 1);
        assert_close(delta_r_effective(&spec).unwrap(), 0.01, 1e-15);

        spec.temperature_uk = Some(3.0);
        assert_close(
            delta_r_effective(&spec).unwrap(),
            0.01 * (3.0_f64 / 25.0).sqrt(),
            1e-15,
        );

        spec.delta_position = Some(0.004);
        assert_eq!(delta_r_effective(&spec).unwrap(), 0.004);

        let diffusion = NoiseSpec {
            delta_position: None,
            temperature_uk: None,
            diffusion: Some(1e-5),
            gate_time: Some(0.005),
            distance: Some(1.0),
            ..NoiseSpec::standard(10, 1)
        };
        assert_close(
            delta_r_effective(&diffusion).unwrap(),
            (2.0_f64 * 1e-5 * 0.005).sqrt(),
            1e-15,
        );

        let missing = NoiseSpec {
            delta_position: None,
            temperature_uk: None,
            ..NoiseSpec::standard(10, 1)
        };
        assert!(matches!(
            delta_r_effective(&missing),
            Err(Error::MissingNoiseAnchor)
        ));
    }

    #[test]
    fn zero_noise_reproduces_sequence() {
        let seq = PulseSequence::single(Pulse::from_ratio(6.0, 0.5).unwrap());
        let out = sample_protocol(&seq, &NoiseSpec::none(10, 7), 3).unwrap();
        assert_eq!(out.sequence, seq);
        assert_eq!(out.truncations, 0);
    }

    #[test]
    fn sampling_is_deterministic_per_index() {
        let seq = PulseSequence::single(Pulse::from_ratio(10.0, 0.2).unwrap());
        let spec = NoiseSpec::standard(10, 99);
        let a = sample_protocol(&seq, &spec, 5).unwrap();
        let b = sample_protocol(&seq, &spec, 5).unwrap();
        assert_eq!(a, b);
        let c = sample_protocol(&seq, &spec, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_area_statistics() {
        let area = 26.0 * PI;
        let seq = PulseSequence::single(Pulse::from_ratio(area, 1.0).unwrap());
        let spec = NoiseSpec {
            delta_intensity: 0.03,
            delta_position: Some(0.0),
            temperature_uk: None,
            delta_phase: 0.0,
            ..NoiseSpec::standard(1, 11)
        };
        let n = 100_000u64;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for idx in 0..n {
            let a = sample_protocol(&seq, &spec, idx).unwrap().sequence.pulses()[0].area;
            sum += a;
            sum2 += a * a;
        }
        let mean = sum / n as f64;
        let std = (sum2 / n as f64 - mean * mean).sqrt();
        assert_close(mean, area, 0.02 * PI);
        assert_close(std, 0.015 * area, 0.02 * 0.015 * area * 5.0);
    }

    #[test]
    fn zero_noise_monte_carlo_is_a_point_mass() {
        let seq = PulseSequence::single(Pulse::from_ratio(6.162 * PI, 1.0 / 3.0).unwrap());
        let ideal = fidelity_single(6.162 * PI, 1.0 / 3.0).value();
        let summary = monte_carlo_with_samples(&seq, &NoiseSpec::none(200, 5)).unwrap();
        // every draw is bit-identical to the ideal value
        for &f in summary.per_sample.as_ref().unwrap() {
            assert_eq!(f, ideal);
        }
        assert_eq!(summary.mean_f, ideal);
        assert_eq!(summary.std_f, 0.0);
    }

    #[test]
    fn phase_noise_alone_leaves_single_pulses_untouched() {
        let seq = PulseSequence::single(Pulse::from_ratio(2.414 * PI, 1.0).unwrap());
        let spec = NoiseSpec {
            delta_intensity: 0.0,
            delta_position: Some(0.0),
            temperature_uk: None,
            delta_phase: 0.3,
            ..NoiseSpec::standard(500, 31)
        };
        let ideal = fidelity_single(2.414 * PI, 1.0).value();
        let summary = monte_carlo_with_samples(&seq, &spec).unwrap();
        for &f in summary.per_sample.as_ref().unwrap() {
            assert_eq!(f, ideal);
        }
        assert_eq!(summary.mean_f, ideal);
        assert_eq!(summary.std_f, 0.0);
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let seq = PulseSequence::single(Pulse::from_ratio(10.1 * PI, 0.2).unwrap());
        let spec = NoiseSpec::standard(400, 1234);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| monte_carlo_with_samples(&seq, &spec)).unwrap();
        let r4 = pool4.install(|| monte_carlo_with_samples(&seq, &spec)).unwrap();
        assert_eq!(r1, r4);
    }

    #[test]
    fn low_area_protocol_is_robust() {
        // smallest protocol under present-day noise barely moves
        let refined = crate::dioph::refine_local(1.0, (1.0 + 2.0_f64.sqrt()) * PI, None);
        let seq =
            PulseSequence::single(Pulse::from_ratio(refined.area, refined.x).unwrap());
        let summary = monte_carlo(&seq, &NoiseSpec::standard(10_000, 2)).unwrap();
        assert_close(summary.mean_f, refined.fidelity, 0.02);
    }

    #[test]
    fn series_rows_cover_requested_range() {
        let spec = NoiseSpec::none(50, 3);
        let rows = noise_series(0, 2, &spec).unwrap();
        assert_eq!(rows.len(), 3);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.l_prime, i as u32);
            assert_eq!(row.mean_f, row.f_ideal);
            assert_eq!(row.std_f, 0.0);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let seq = PulseSequence::single(Pulse::from_ratio(1.0, 1.0).unwrap());
        let mut spec = NoiseSpec::standard(0, 1);
        assert!(matches!(monte_carlo(&seq, &spec), Err(Error::NoSamples)));
        spec.samples = 10;
        spec.delta_intensity = -0.1;
        assert!(matches!(
            monte_carlo(&seq, &spec),
            Err(Error::NegativeNoise(_))
        ));
    }
}
