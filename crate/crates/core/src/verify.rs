//! Built-in verification: the acceptance criteria and the randomized
//! property suites, producing machine-readable reports.
//!
//! Every tolerance is pinned here. The `acceptance` integration test and
//! the `verify` CLI subcommand both run these functions, so there is a
//! single source of truth for what "passing" means.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::beams::{amplitude_ratio, build_overlap_matrix, solve_amplitudes, BeamGeometry};
use crate::dioph::{
    candidate_params, diophantine_search, enumerate_candidates, exactness_impossible,
    find_exact_solution, refine_local,
};
use crate::fidelity::{fidelity, fidelity_single, two_pulse_closed_form};
use crate::gate::{compose, propagator_single, Pulse, PulseSequence, StructuralVector, Subsystem};
use crate::grid::{
    evaluate_grid, local_maxima, ridge_area, AxisSpec, FamilyConstraint, GridSpec, Param,
};
use crate::noise::{monte_carlo, noise_series, sample_protocol, NoiseSpec};
use crate::oracle::{propagate_numeric, Envelope};
use crate::report::write_noise_csv;

/// Options of a verification run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Seed of every randomized check and Monte Carlo in the suite.
    pub seed: u64,
    /// Self-check mode: tampers one tolerance so the suite must fail.
    pub inject_failure: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            inject_failure: false,
        }
    }
}

/// Outcome of one criterion or property check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub details: String,
    pub runtime_ms: u128,
}

impl CheckReport {
    pub fn line(&self) -> String {
        format!(
            "{} {:>4} {} ({} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.runtime_ms,
            self.details
        )
    }
}

fn run_check(
    id: &str,
    name: &str,
    f: impl FnOnce() -> (bool, String),
) -> CheckReport {
    let start = std::time::Instant::now();
    let (passed, details) = f();
    CheckReport {
        id: id.to_string(),
        name: name.to_string(),
        passed,
        details,
        runtime_ms: start.elapsed().as_millis(),
    }
}

/// Runs the ten acceptance criteria in order.
pub fn run_acceptance(opts: &VerifyOptions) -> Vec<CheckReport> {
    vec![
        criterion_1(opts),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(opts),
        criterion_7(),
        criterion_8(opts),
        criterion_9(opts),
        criterion_10(opts),
    ]
}

fn criterion_1(opts: &VerifyOptions) -> CheckReport {
    run_check("C1", "minimal single-pulse optimum", || {
        let tol = if opts.inject_failure { 0.0 } else { 3e-3 };
        let out = refine_local(1.0, (1.0 + 2.0_f64.sqrt()) * PI, None);
        let ok = (out.fidelity - 0.804).abs() <= tol;
        let mut details = format!(
            "refined F = {:.6} at x = {:.6}, A = {:.6} pi (target 0.804 +- {tol})",
            out.fidelity,
            out.x,
            out.area / PI
        );
        if opts.inject_failure {
            details.push_str(" [tolerance tampered for self-check]");
        }
        (ok, details)
    })
}

fn criterion_2() -> CheckReport {
    run_check("C2", "second single-pulse optimum", || {
        let (x0, a0) = candidate_params(1, 1, 0).unwrap();
        let out = refine_local(x0, a0, None);
        let ok = (out.fidelity - 0.968).abs() <= 3e-3;
        (
            ok,
            format!(
                "refined F = {:.6} at x = {:.6}, A = {:.6} pi (target 0.968 +- 0.003)",
                out.fidelity,
                out.x,
                out.area / PI
            ),
        )
    })
}

fn criterion_3() -> CheckReport {
    run_check("C3", "14 pi symmetric optimum", || {
        let (x0, a0) = candidate_params(3, 2, 2).unwrap();
        let out = refine_local(x0, a0, None);
        let ok = (0.990..=0.995).contains(&out.fidelity);
        (
            ok,
            format!(
                "refined F = {:.6} at x = {:.6}, A = {:.6} pi (window [0.990, 0.995])",
                out.fidelity,
                out.x,
                out.area / PI
            ),
        )
    })
}

fn criterion_4() -> CheckReport {
    run_check("C4", "integer-relation search sanity", || {
        let list = diophantine_search(2, 20, 200).unwrap();
        let Some(hit) = list
            .iter()
            .find(|t| t.terms[..2] == [10, 10] && t.rhs == 14)
        else {
            return (false, "(10, 10, 14) missing from bound-20 scan".into());
        };
        let err = hit.relative_error();
        let rank_ok = (err - 0.0204).abs() <= 5e-4;

        let exact2 = find_exact_solution(2, 10_000).unwrap();
        let exact3 = find_exact_solution(3, 400).unwrap();
        let cert = exactness_impossible(2) && exactness_impossible(3);
        let ok = rank_ok && exact2.is_none() && exact3.is_none() && cert;
        (
            ok,
            format!(
                "(10,10,14) error = {err:.6}; exact solutions: 2-term up to 1e4 -> {}, \
                 3-term up to 400 -> {}; residue certificate = {cert}",
                if exact2.is_none() { "none" } else { "FOUND" },
                if exact3.is_none() { "none" } else { "FOUND" },
            ),
        )
    })
}

fn criterion_5() -> CheckReport {
    run_check("C5", "single-pulse map ridge maxima", || {
        let spec = GridSpec::new(
            vec![
                AxisSpec::new(Param::Area, 0.0, 20.0 * PI, 400).unwrap(),
                AxisSpec::new(Param::Ratio, 0.05, 1.0, 200).unwrap(),
            ],
            BTreeMap::new(),
            FamilyConstraint::None,
        )
        .unwrap();
        let grid = evaluate_grid(&spec).unwrap();
        let xs = &grid.axis_values[1];

        // fidelity along the lowest-area ridge, restricted to the map range
        let curve: Vec<(f64, f64)> = xs
            .iter()
            .filter(|&&x| ridge_area(x) <= 20.0 * PI)
            .map(|&x| (x, fidelity_single(ridge_area(x), x).value()))
            .collect();
        let values: Vec<f64> = curve.iter().map(|&(_, f)| f).collect();
        let maxima: Vec<f64> = local_maxima(&values)
            .into_iter()
            .map(|i| curve[i].0)
            .collect();

        let targets = [1.0 / 3.0, 1.0 / 5.0, 1.0 / 7.0];
        let mut misses = Vec::new();
        for t in targets {
            let nearest = maxima
                .iter()
                .map(|&m| (m - t).abs())
                .fold(f64::MAX, f64::min);
            if nearest > 0.02 {
                misses.push(format!("x = {t:.4} off by {nearest:.4}"));
            }
        }
        let in_range = grid.values.iter().all(|v| (0.0..=1.0).contains(v));
        let ok = misses.is_empty() && grid.values.len() == 400 * 200 && in_range;
        let detail = if ok {
            format!(
                "ridge maxima found within 0.02 of 1/3, 1/5, 1/7 ({} maxima on the curve); \
                 all {} map values in [0, 1]",
                maxima.len(),
                grid.values.len()
            )
        } else {
            format!("missed: {}; values in range: {in_range}", misses.join("; "))
        };
        (ok, detail)
    })
}

fn criterion_6(opts: &VerifyOptions) -> CheckReport {
    run_check("C6", "checkered and area-sum laws", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc6);
        let mut worst_checkered = 0.0_f64;
        for _ in 0..100 {
            let l: u32 = rng.random_range(0..5);
            let m: u32 = rng.random_range(0..5);
            let x1 = rng.random_range(0.05..2.0);
            let e1 = StructuralVector::from_ratio(x1).unwrap();
            let e2 = StructuralVector::from_ratio(-1.0 / x1).unwrap();
            let seq = PulseSequence::new(vec![
                Pulse::new((4.0 * l as f64 + 2.0) * PI, e1, 0.0),
                Pulse::new(4.0 * m as f64 * PI, e2, 0.0),
            ])
            .unwrap();
            let u11 = compose(&seq).first_entry(Subsystem::V);
            worst_checkered = worst_checkered.max((u11 + 1.0).norm());
        }

        let mut worst_aligned = 0.0_f64;
        for _ in 0..100 {
            let n: u32 = rng.random_range(0..5);
            let total = (4.0 * n as f64 + 2.0) * PI;
            let a1 = rng.random_range(0.0..total);
            let x = rng.random_range(0.05..3.0);
            let e = StructuralVector::from_ratio(x).unwrap();
            let seq = PulseSequence::new(vec![
                Pulse::new(a1, e, 0.0),
                Pulse::new(total - a1, e, 0.0),
            ])
            .unwrap();
            let f_seq = fidelity(&compose(&seq)).unwrap().value();
            let f_single = fidelity_single(total, x).value();
            worst_aligned = worst_aligned.max((f_seq - f_single).abs());
        }

        let ok = worst_checkered <= 1e-13 && worst_aligned <= 1e-12;
        (
            ok,
            format!(
                "max |U_V11 + 1| = {worst_checkered:.2e} over 100 checkered draws; \
                 max aligned-reduction gap = {worst_aligned:.2e} over 100 draws"
            ),
        )
    })
}

fn criterion_7() -> CheckReport {
    run_check("C7", "two-pulse ridge maxima after a 1-loop opener", || {
        let x2s: Vec<f64> = (0..600).map(|i| 0.05 + 0.95 * i as f64 / 599.0).collect();
        let e1 = StructuralVector::from_ratio(0.25).unwrap();
        let values: Vec<f64> = x2s
            .iter()
            .map(|&x2| {
                let a2 = PI * (1.0 + x2 * x2).sqrt() / x2;
                let d = two_pulse_closed_form(
                    4.0 * PI,
                    a2,
                    &e1,
                    &StructuralVector::from_ratio(x2).unwrap(),
                );
                ((1.0 - d.u_v11 - d.u_a11 - d.u_b11) / 4.0).powi(2)
            })
            .collect();
        let maxima: Vec<f64> = local_maxima(&values).into_iter().map(|i| x2s[i]).collect();
        let targets = [0.5, 1.0 / 6.0, 0.1];
        let mut misses = Vec::new();
        for t in targets {
            let nearest = maxima
                .iter()
                .map(|&m| (m - t).abs())
                .fold(f64::MAX, f64::min);
            if nearest > 0.02 {
                misses.push(format!("x2 = {t:.4} off by {nearest:.4}"));
            }
        }
        let ok = misses.is_empty();
        let detail = if ok {
            format!(
                "maxima within 0.02 of 1/2, 1/6, 1/10 along A2 = pi sqrt(1+x2^2)/x2 \
                 ({} maxima)",
                maxima.len()
            )
        } else {
            format!("missed: {}", misses.join("; "))
        };
        (ok, detail)
    })
}

fn criterion_8(opts: &VerifyOptions) -> CheckReport {
    run_check("C8", "shot-to-shot noise statistics", || {
        let mut problems = Vec::new();

        // spread of the largest-area protocol under present-day noise
        let (x0, a0) = candidate_params(6, 6, 0).unwrap();
        let refined = refine_local(x0, a0, None);
        let seq =
            PulseSequence::single(Pulse::from_ratio(refined.area, refined.x).unwrap());
        let std_summary = monte_carlo(&seq, &NoiseSpec::standard(1000, opts.seed)).unwrap();
        if (std_summary.std_f - 0.17).abs() > 0.05 {
            problems.push(format!(
                "standard std_f = {:.4}, outside 0.17 +- 0.05",
                std_summary.std_f
            ));
        }

        // best-available stabilization across the series: the noise-induced
        // fidelity loss stays below 1.2% everywhere (the head of the series
        // is limited by its ideal value, not by noise)
        let ultra = NoiseSpec::ultra(1000, opts.seed);
        let rows = noise_series(0, 6, &ultra).unwrap();
        let worst = rows
            .iter()
            .map(|r| r.f_ideal - r.mean_f)
            .fold(f64::MIN, f64::max);
        if worst >= 0.012 {
            problems.push(format!(
                "ultra worst f_ideal - mean_f = {worst:.5}, not below 0.012"
            ));
        }

        // intensity jitter must hurt more than position jitter
        let intensity_only = NoiseSpec {
            delta_intensity: 0.03,
            delta_position: Some(0.0),
            temperature_uk: None,
            delta_phase: 0.0,
            ..NoiseSpec::standard(1000, opts.seed)
        };
        let position_only = NoiseSpec {
            delta_intensity: 0.0,
            delta_position: Some(0.02),
            temperature_uk: None,
            delta_phase: 0.0,
            ..NoiseSpec::standard(1000, opts.seed)
        };
        let m_int = monte_carlo(&seq, &intensity_only).unwrap().mean_f;
        let m_pos = monte_carlo(&seq, &position_only).unwrap().mean_f;
        if m_int >= m_pos {
            problems.push(format!(
                "intensity-only mean {m_int:.4} not below position-only mean {m_pos:.4}"
            ));
        }

        let ok = problems.is_empty();
        let detail = if ok {
            format!(
                "standard std_f = {:.4}; ultra worst noise-induced loss = {:.5}; \
                 intensity-only mean {:.4} < position-only mean {:.4}",
                std_summary.std_f, worst, m_int, m_pos
            )
        } else {
            problems.join("; ")
        };
        (ok, detail)
    })
}

fn criterion_9(opts: &VerifyOptions) -> CheckReport {
    run_check("C9", "numeric propagation oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc9);
        let mut worst = 0.0_f64;
        for trial in 0..50 {
            let len = rng.random_range(1..=4);
            let pulses: Vec<Pulse> = (0..len)
                .map(|_| {
                    Pulse::new(
                        rng.random_range(-8.0 * PI..8.0 * PI),
                        StructuralVector::from_ratio(rng.random_range(-3.0..3.0)).unwrap(),
                        rng.random_range(-PI..PI),
                    )
                })
                .collect();
            let seq = PulseSequence::new(pulses).unwrap();
            let envelope = if trial % 2 == 0 {
                Envelope::Gaussian { duration: 1.0 }
            } else {
                Envelope::Square { duration: 1.0 }
            };
            match propagate_numeric(&seq, envelope, 8000) {
                Ok(u) => worst = worst.max(u.max_abs_diff(&compose(&seq))),
                Err(e) => return (false, format!("trial {trial} failed: {e}")),
            }
        }
        (
            worst < 1e-6,
            format!("max |U_numeric - U_analytic| = {worst:.2e} over 50 sequences (tol 1e-6)"),
        )
    })
}

fn criterion_10(opts: &VerifyOptions) -> CheckReport {
    run_check("C10", "bit-identical noise suite across threads", || {
        let spec = NoiseSpec::standard(1000, opts.seed);
        let render = |threads: usize| -> String {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool");
            pool.install(|| {
                let rows = noise_series(0, 6, &spec).unwrap();
                write_noise_csv(&rows, &spec, "standard")
            })
        };
        let single = render(1);
        let quad = render(4);
        let repeat = render(4);
        let ok = single == quad && quad == repeat;
        (
            ok,
            format!(
                "CSV bytes: 1-thread vs 4-thread identical = {}, rerun identical = {} \
                 ({} bytes)",
                single == quad,
                quad == repeat,
                single.len()
            ),
        )
    })
}

/// Randomized property suites behind the acceptance criteria.
pub fn run_properties(opts: &VerifyOptions) -> Vec<CheckReport> {
    vec![
        prop_unitarity(opts),
        prop_phase_structure(opts),
        prop_closed_form(opts),
        prop_fidelity_symmetries(opts),
        prop_candidate_laws(),
        prop_integer_certificates(),
        prop_beam_laws(opts),
        prop_noise_determinism(opts),
        prop_noise_trends(opts),
    ]
}

fn prop_unitarity(opts: &VerifyOptions) -> CheckReport {
    run_check("P1", "propagator unitarity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x01);
        let mut worst = 0.0_f64;
        for _ in 0..1000 {
            let p = random_pulse(&mut rng);
            worst = worst.max(propagator_single(&p).unitarity_defect());
        }
        for _ in 0..200 {
            let len = rng.random_range(1..=5);
            let seq =
                PulseSequence::new((0..len).map(|_| random_pulse(&mut rng)).collect()).unwrap();
            worst = worst.max(compose(&seq).unitarity_defect());
        }
        (
            worst < 1e-10,
            format!("max |U^dag U - I| = {worst:.2e} (tol 1e-10)"),
        )
    })
}

fn prop_phase_structure(opts: &VerifyOptions) -> CheckReport {
    run_check("P2", "phase and sign structure", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x02);
        let mut worst_diag = 0.0_f64;
        let mut worst_flip = 0.0_f64;
        let mut worst_cross = 0.0_f64;
        for _ in 0..500 {
            let p = random_pulse(&mut rng);
            let zero_phase = Pulse::new(p.area, p.structural, 0.0);
            let u = propagator_single(&p);
            let u0 = propagator_single(&zero_phase);
            for s in Subsystem::ALL {
                worst_diag = worst_diag.max((u.first_entry(s) - u0.first_entry(s)).norm());
            }
            let flipped = propagator_single(&Pulse::new(p.area, p.structural.negated(), p.phase));
            let pi_shift =
                propagator_single(&Pulse::new(p.area, p.structural, p.phase + PI));
            worst_flip = worst_flip.max(flipped.max_abs_diff(&pi_shift));

            let expected = p.structural.a()
                * p.structural.b()
                * ((p.area / 2.0).cos() - 1.0);
            worst_cross = worst_cross.max((u.u_v.get(1, 2).re - expected).abs());
        }
        let ok = worst_diag < 1e-13 && worst_flip < 1e-12 && worst_cross < 1e-12;
        (
            ok,
            format!(
                "diagonal phase dependence {worst_diag:.2e}; sign-flip vs pi-phase gap \
                 {worst_flip:.2e}; V cross-coupling gap {worst_cross:.2e}"
            ),
        )
    })
}

fn prop_closed_form(opts: &VerifyOptions) -> CheckReport {
    run_check("P3", "two-pulse closed form matches composition", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x03);
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let (a1, a2) = (
                rng.random_range(-10.0 * PI..10.0 * PI),
                rng.random_range(-10.0 * PI..10.0 * PI),
            );
            let e1 = StructuralVector::from_ratio(rng.random_range(-4.0..4.0)).unwrap();
            let e2 = StructuralVector::from_ratio(rng.random_range(-4.0..4.0)).unwrap();
            let d = two_pulse_closed_form(a1, a2, &e1, &e2);
            let u = compose(
                &PulseSequence::new(vec![Pulse::new(a1, e1, 0.0), Pulse::new(a2, e2, 0.0)])
                    .unwrap(),
            );
            worst = worst
                .max((d.u_v11 - u.first_entry(Subsystem::V).re).abs())
                .max((d.u_a11 - u.first_entry(Subsystem::A).re).abs())
                .max((d.u_b11 - u.first_entry(Subsystem::B).re).abs());
        }
        (worst < 1e-12, format!("max entry gap = {worst:.2e}"))
    })
}

fn prop_fidelity_symmetries(opts: &VerifyOptions) -> CheckReport {
    run_check("P4", "fidelity reductions and symmetries", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x04);
        let mut worst = 0.0_f64;
        for _ in 0..500 {
            let area = rng.random_range(-15.0 * PI..15.0 * PI);
            let x = rng.random_range(0.02..5.0);
            worst = worst.max(
                (fidelity_single(area, x).value() - fidelity_single(area, 1.0 / x).value()).abs(),
            );

            let e = StructuralVector::from_ratio(x).unwrap();
            let a2 = rng.random_range(-10.0 * PI..10.0 * PI);
            let aligned = PulseSequence::new(vec![
                Pulse::new(area, e, 0.0),
                Pulse::new(a2, e, 0.0),
            ])
            .unwrap();
            worst = worst.max(
                (fidelity(&compose(&aligned)).unwrap().value()
                    - fidelity_single(area + a2, x).value())
                .abs(),
            );
            let anti = PulseSequence::new(vec![
                Pulse::new(area, e, 0.0),
                Pulse::new(a2, e.negated(), 0.0),
            ])
            .unwrap();
            worst = worst.max(
                (fidelity(&compose(&anti)).unwrap().value()
                    - fidelity_single(area - a2, x).value())
                .abs(),
            );

            let ortho = two_pulse_closed_form(
                area,
                a2,
                &e,
                &StructuralVector::from_ratio(-1.0 / x).unwrap(),
            );
            worst = worst.max((ortho.u_v11 - (area / 2.0).cos() * (a2 / 2.0).cos()).abs());
        }
        (worst < 1e-12, format!("max deviation = {worst:.2e}"))
    })
}

fn prop_candidate_laws() -> CheckReport {
    run_check("P5", "candidate enumeration laws", || {
        let list = enumerate_candidates(30.0 * PI).unwrap();
        let mut problems = Vec::new();
        if list.iter().any(|c| c.f_refined >= 1.0 - 1e-9) {
            problems.push("a refined fidelity reached 1".to_string());
        }
        if list.iter().any(|c| c.f_refined < c.f_ideal - 1e-12) {
            problems.push("refinement regressed below its seed".to_string());
        }
        let mut series: Vec<_> = list
            .iter()
            .filter(|c| c.l == c.l_prime && c.l_dprime == 0)
            .collect();
        series.sort_by_key(|c| c.l);
        if series.len() < 7 {
            problems.push(format!("series too short: {}", series.len()));
        }
        for pair in series.windows(2) {
            if 1.0 - pair[1].f_ideal > 1.0 - pair[0].f_ideal + 1e-12 {
                problems.push(format!(
                    "ideal infidelity grew from l = {} to {}",
                    pair[0].l, pair[1].l
                ));
            }
        }
        for c in &series {
            if c.x_op != 1.0 / (2.0 * c.l_prime as f64 + 1.0) {
                problems.push(format!("x_op not an inverse odd at l' = {}", c.l_prime));
            }
            // the 2 pi weak-site law is asymptotic; it enters its 0.05 pi
            // window from l = 2 (the first two members sit at 1.71 pi and
            // 1.95 pi)
            if c.l >= 2 {
                let b = c.x_op / (1.0 + c.x_op * c.x_op).sqrt();
                if (b * c.area_op - 2.0 * PI).abs() > 0.05 * PI {
                    problems.push(format!("weak-site area off 2 pi at l' = {}", c.l_prime));
                }
            }
        }
        let ok = problems.is_empty();
        let detail = if ok {
            format!(
                "{} candidates enumerated; sub-unity, monotone decay, inverse-odd ratios, \
                 and the 2 pi weak-site law all hold",
                list.len()
            )
        } else {
            problems.join("; ")
        };
        (ok, detail)
    })
}

fn prop_integer_certificates() -> CheckReport {
    run_check("P6", "integer-relation impossibility", || {
        let cert2 = exactness_impossible(2);
        let cert3 = exactness_impossible(3);
        let none2 = find_exact_solution(2, 2000).unwrap().is_none();
        let none3 = find_exact_solution(3, 200).unwrap().is_none();
        let positive = diophantine_search(2, 200, 5000)
            .unwrap()
            .iter()
            .all(|t| t.relative_error() > 0.0);
        let ok = cert2 && cert3 && none2 && none3 && positive;
        (
            ok,
            format!(
                "mod-16 certificates: 2-term {cert2}, 3-term {cert3}; exhaustive scans clean: \
                 {none2}/{none3}; all search errors positive: {positive}"
            ),
        )
    })
}

fn prop_beam_laws(opts: &VerifyOptions) -> CheckReport {
    run_check("P7", "beam synthesis laws", || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x07);
        let mut worst_round = 0.0_f64;
        let mut worst_inverse = 0.0_f64;
        let mut law_violations = 0usize;
        for _ in 0..500 {
            let theta = rng.random_range(-0.95..0.95);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let e = [angle.cos(), angle.sin()];
            let g = BeamGeometry::pair(theta).unwrap();
            let sol = solve_amplitudes(&g, &e, 1.0).unwrap();
            let m = build_overlap_matrix(&g).unwrap();
            let back0 = sol.amplitudes[0] + theta * sol.amplitudes[1];
            let back1 = theta * sol.amplitudes[0] + sol.amplitudes[1];
            worst_round = worst_round
                .max((back0 - e[0]).abs())
                .max((back1 - e[1]).abs());
            let det = 1.0 - theta * theta;
            worst_inverse = worst_inverse
                .max((sol.amplitudes[0] - (e[0] - theta * e[1]) / det).abs())
                .max((sol.amplitudes[1] - (e[1] - theta * e[0]) / det).abs());
            let _ = m;

            let x = rng.random_range(0.01..1.0);
            let t_pos = rng.random_range(1e-3..0.999);
            let r = amplitude_ratio(x, t_pos).unwrap();
            if (t_pos > x && r >= 0.0) || (t_pos < x && r <= 0.0) {
                law_violations += 1;
            }
            // magnitude bound on its provable region theta <= x
            let t_small = rng.random_range(0.0..x);
            if amplitude_ratio(x, t_small).unwrap().abs() >= x {
                law_violations += 1;
            }
        }
        let ok = worst_round < 1e-10 && worst_inverse < 1e-12 && law_violations == 0;
        (
            ok,
            format!(
                "round-trip residual {worst_round:.2e}; closed-inverse gap {worst_inverse:.2e}; \
                 sign/magnitude law violations {law_violations}"
            ),
        )
    })
}

fn prop_noise_determinism(opts: &VerifyOptions) -> CheckReport {
    run_check("P8", "noise sampling determinism and null effects", || {
        let seq = PulseSequence::single(Pulse::from_ratio(10.1 * PI, 0.2).unwrap());
        let spec = NoiseSpec::standard(300, opts.seed ^ 0x08);
        let a = sample_protocol(&seq, &spec, 17).unwrap();
        let b = sample_protocol(&seq, &spec, 17).unwrap();
        let deterministic = a == b;

        let ideal = fidelity(&compose(&seq)).unwrap().value();
        let phase_only = NoiseSpec {
            delta_intensity: 0.0,
            delta_position: Some(0.0),
            temperature_uk: None,
            delta_phase: 0.5,
            ..spec.clone()
        };
        let point_mass = |s: &crate::noise::NoiseSummary| {
            s.per_sample
                .as_ref()
                .is_some_and(|v| v.iter().all(|&f| f == ideal))
                && s.mean_f == ideal
                && s.std_f == 0.0
        };
        let summary = crate::noise::monte_carlo_with_samples(&seq, &phase_only).unwrap();
        let phase_null = point_mass(&summary);

        let silent =
            crate::noise::monte_carlo_with_samples(&seq, &NoiseSpec::none(300, opts.seed))
                .unwrap();
        let zero_noise = point_mass(&silent);

        let ok = deterministic && phase_null && zero_noise;
        (
            ok,
            format!(
                "repeat-draw identical = {deterministic}; single-pulse phase-noise null = \
                 {phase_null}; zero-noise point mass = {zero_noise}"
            ),
        )
    })
}

fn prop_noise_trends(opts: &VerifyOptions) -> CheckReport {
    run_check("P9", "noise trend invariants", || {
        let mut problems = Vec::new();
        let standard = NoiseSpec::standard(1000, opts.seed ^ 0x09);
        let rows = noise_series(0, 6, &standard).unwrap();
        // mean_f non-increasing over l = 2..6, with 2 standard errors slack
        // (the series head rises: ideal fidelity gains still outweigh the
        // growing noise sensitivity up to l = 2)
        for pair in rows.windows(2).skip(2) {
            let slack = 2.0
                * ((pair[0].std_f.powi(2) + pair[1].std_f.powi(2)).sqrt()
                    / (standard.samples as f64).sqrt());
            if pair[1].mean_f > pair[0].mean_f + slack {
                problems.push(format!(
                    "mean_f rose from l = {} ({:.4}) to l = {} ({:.4}) beyond 2 se",
                    pair[0].l_prime, pair[0].mean_f, pair[1].l_prime, pair[1].mean_f
                ));
            }
        }

        let cold = NoiseSpec {
            temperature_uk: Some(3.0),
            ..NoiseSpec::ultra(1000, opts.seed ^ 0x09)
        };
        let warm = NoiseSpec {
            temperature_uk: Some(30.0),
            ..cold.clone()
        };
        let rows_cold = noise_series(0, 6, &cold).unwrap();
        let rows_warm = noise_series(0, 6, &warm).unwrap();
        for (rc, rw) in rows_cold.iter().zip(&rows_warm) {
            let gap = (rc.mean_f - rw.mean_f).abs();
            if gap >= 0.005 {
                problems.push(format!(
                    "ultra mean_f moved by {gap:.4} between 3 uK and 30 uK at l = {}",
                    rc.l_prime
                ));
            }
        }

        let ok = problems.is_empty();
        let detail = if ok {
            "monotone degradation beyond l = 1 and 3-vs-30 uK insensitivity (< 0.005) hold"
                .to_string()
        } else {
            problems.join("; ")
        };
        (ok, detail)
    })
}

fn random_pulse(rng: &mut ChaCha8Rng) -> Pulse {
    Pulse::new(
        rng.random_range(-25.0..25.0),
        StructuralVector::from_ratio(rng.random_range(-8.0..8.0)).unwrap(),
        rng.random_range(-PI..PI),
    )
}

/// Full verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub seed: u64,
    pub criteria: Vec<CheckReport>,
    pub properties: Vec<CheckReport>,
    pub passed: bool,
}

/// Runs acceptance criteria and property suites.
pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    let criteria = run_acceptance(opts);
    let properties = run_properties(opts);
    let passed = criteria.iter().chain(&properties).all(|c| c.passed);
    VerifyReport {
        version: crate::report::VERSION.to_string(),
        seed: opts.seed,
        criteria,
        properties,
        passed,
    }
}
