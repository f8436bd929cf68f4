//! Subcommand implementations.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use rydgate_core::dioph::{enumerate_candidates, two_pulse_families, TwoPulseFamily};
use rydgate_core::error::Error as CoreError;
use rydgate_core::fidelity::{
    classify_mechanism, fidelity, fidelity_magnitude, MechanismReport,
};
use rydgate_core::gate::{compose, Pulse, PulseSequence, StructuralVector, Subsystem};
use rydgate_core::grid::{evaluate_grid, AxisSpec, FamilyConstraint, GridSpec, Param};
use rydgate_core::noise::{monte_carlo, noise_series, NoiseSpec};
use rydgate_core::report::{
    format_value, write_grid_csv, write_noise_csv, write_ridge_csv, VERSION,
};
use rydgate_core::verify::{run_all, VerifyOptions};

use crate::args::{
    parse_angle, parse_pulse, parse_series, BeamsArgs, FidelityArgs, MapArgs, NoiseArgs,
    OptimizeArgs, VerifyArgs,
};
use crate::config::{read_toml, GeometryFile, GridFile, NoiseFile};
use crate::CliError;

fn usage<T>(r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(CliError::Usage)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn build_sequence(pulse_args: &[String]) -> Result<PulseSequence, CliError> {
    let mut pulses = Vec::new();
    for spec in pulse_args {
        let (area, ratio, phase) = usage(parse_pulse(spec))?;
        let structural =
            StructuralVector::from_ratio(ratio).map_err(|e| CliError::Usage(e.to_string()))?;
        pulses.push(Pulse::new(area, structural, phase));
    }
    PulseSequence::new(pulses).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Serialize)]
struct FidelityRecord {
    version: &'static str,
    fidelity: f64,
    strict_diagonals: bool,
    accumulated_area_pi: f64,
    subsystems: Vec<SubsystemRecord>,
    pulses: Vec<PulseRecord>,
}

#[derive(Serialize)]
struct SubsystemRecord {
    subsystem: String,
    u11_re: f64,
    u11_im: f64,
    mechanism: String,
    w0: f64,
    w1: f64,
}

#[derive(Serialize)]
struct PulseRecord {
    area_pi: f64,
    x: f64,
    phase_pi: f64,
    gpa_pi: BTreeMap<String, f64>,
}

pub fn cmd_fidelity(args: &FidelityArgs) -> Result<(), CliError> {
    let seq = build_sequence(&args.pulses)?;
    let u = compose(&seq);

    // relative phases between pulses can push the diagonals off the real
    // axis; fall back to the magnitude form and say so
    let (f, strict) = match fidelity(&u) {
        Ok(f) => (f.value(), true),
        Err(CoreError::NonRealDiagonal(_)) => (fidelity_magnitude(&u).value(), false),
        Err(e) => return Err(e.into()),
    };
    let mech: MechanismReport = classify_mechanism(&seq);

    let record = FidelityRecord {
        version: VERSION,
        fidelity: f,
        strict_diagonals: strict,
        accumulated_area_pi: seq.accumulated_area() / PI,
        subsystems: Subsystem::ALL
            .iter()
            .map(|&s| {
                let u11 = u.first_entry(s);
                let label = mech.get(s);
                SubsystemRecord {
                    subsystem: format!("{s:?}"),
                    u11_re: u11.re,
                    u11_im: u11.im,
                    mechanism: label.kind.to_string(),
                    w0: label.w0,
                    w1: label.w1,
                }
            })
            .collect(),
        pulses: seq
            .pulses()
            .iter()
            .map(|p| PulseRecord {
                area_pi: p.area / PI,
                x: p.structural.ratio(),
                phase_pi: p.phase / PI,
                gpa_pi: Subsystem::ALL
                    .iter()
                    .map(|&s| (format!("{s:?}"), p.gpa(s) / PI))
                    .collect(),
            })
            .collect(),
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&record).expect("json"));
        return Ok(());
    }

    println!(
        "protocol: {} pulse(s), accumulated area {:.6} pi",
        record.pulses.len(),
        record.accumulated_area_pi
    );
    for (k, p) in record.pulses.iter().enumerate() {
        println!(
            "  pulse {}: A = {:.6} pi  x = {:.6}  phi = {:.4} pi  GPA/pi: V {:.4}  A {:.4}  B {:.4}",
            k + 1,
            p.area_pi,
            p.x,
            p.phase_pi,
            p.gpa_pi["V"],
            p.gpa_pi["A"],
            p.gpa_pi["B"]
        );
    }
    println!("fidelity: F = {:.6}", record.fidelity);
    if !record.strict_diagonals {
        println!("  (relative pulse phases make the diagonals complex; |.|^2 form used)");
    }
    println!("subsystem   U11                    mechanism   w0        w1");
    for s in &record.subsystems {
        println!(
            "{:<10}  {:>9.6} {:+.6}i   {:<10}  {:.6}  {:.6}",
            s.subsystem, s.u11_re, s.u11_im, s.mechanism, s.w0, s.w1
        );
    }
    Ok(())
}

fn parse_axis(s: &str) -> Result<AxisSpec, CliError> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("axis {s:?} is not NAME=MIN:MAX:POINTS")))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "axis {s:?} is not NAME=MIN:MAX:POINTS"
        )));
    }
    let param = Param::parse(name.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
    let min = usage(parse_angle(parts[0]))?;
    let max = usage(parse_angle(parts[1]))?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad point count {:?}", parts[2])))?;
    AxisSpec::new(param, min, max, points).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cmd_map(args: &MapArgs) -> Result<(), CliError> {
    let spec = match (&args.config, args.axes.is_empty()) {
        (Some(path), true) => {
            if !args.fixed.is_empty() {
                return Err(CliError::Usage(
                    "--fixed cannot be combined with --config".into(),
                ));
            }
            read_toml::<GridFile>(path)?.into_spec()?
        }
        (Some(_), false) => {
            return Err(CliError::Usage(
                "give axes on the command line or in the config file, not both".into(),
            ))
        }
        (None, false) => {
            let axes = args
                .axes
                .iter()
                .map(|a| parse_axis(a))
                .collect::<Result<Vec<_>, _>>()?;
            let mut fixed = BTreeMap::new();
            for binding in &args.fixed {
                let (name, value) = binding.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!("fixed binding {binding:?} is not NAME=VALUE"))
                })?;
                let param =
                    Param::parse(name.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
                fixed.insert(param, usage(parse_angle(value))?);
            }
            let family = FamilyConstraint::parse(&args.family)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            GridSpec::new(axes, fixed, family).map_err(|e| CliError::Usage(e.to_string()))?
        }
        (None, true) => {
            return Err(CliError::Usage(
                "map needs --axis definitions or a --config file".into(),
            ))
        }
    };

    let mut grid = evaluate_grid(&spec)?;
    grid.metadata.insert("version".into(), VERSION.into());
    grid.metadata.insert(
        "unix_time".into(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .to_string(),
    );
    write_file(&args.output, &write_grid_csv(&grid))?;
    println!(
        "wrote {} points to {}",
        grid.values.len(),
        args.output.display()
    );

    if let Some(overlay) = &args.overlay {
        let xs: Vec<f64> = spec
            .axes
            .iter()
            .find(|a| matches!(a.param, Param::Ratio | Param::Ratio1 | Param::Ratio2))
            .map(|a| a.values())
            .ok_or_else(|| {
                CliError::Usage("overlay needs a ratio axis (x, x1 or x2)".into())
            })?
            .into_iter()
            .filter(|&x| x > 0.0)
            .collect();
        write_file(overlay, &write_ridge_csv(&xs))?;
        println!("wrote ridge overlay to {}", overlay.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeRecord<T: Serialize> {
    version: &'static str,
    max_area_pi: f64,
    family: Option<String>,
    count: usize,
    candidates: Vec<T>,
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let max_area = usage(parse_angle(&args.max_area))?;
    let json = match &args.family {
        None => {
            let candidates = enumerate_candidates(max_area)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            serde_json::to_string_pretty(&OptimizeRecord {
                version: VERSION,
                max_area_pi: max_area / PI,
                family: None,
                count: candidates.len(),
                candidates,
            })
            .expect("json")
        }
        Some(tag) => {
            let family = match tag.as_str() {
                "checkered" => TwoPulseFamily::Checkered,
                "aligned" => TwoPulseFamily::Aligned,
                "anti-aligned" => TwoPulseFamily::AntiAligned,
                "orthogonal" => TwoPulseFamily::Orthogonal,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown family {other:?}; expected checkered, aligned, anti-aligned \
                         or orthogonal"
                    )))
                }
            };
            let members =
                two_pulse_families(family, max_area).map_err(|e| CliError::Usage(e.to_string()))?;
            serde_json::to_string_pretty(&OptimizeRecord {
                version: VERSION,
                max_area_pi: max_area / PI,
                family: Some(tag.clone()),
                count: members.len(),
                candidates: members,
            })
            .expect("json")
        }
    };
    match &args.output {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct BeamsRecord {
    version: &'static str,
    n_qubits: usize,
    condition_number: f64,
    pulses: Vec<BeamPulseRecord>,
}

#[derive(Serialize)]
struct BeamPulseRecord {
    target: Vec<f64>,
    amplitudes: Vec<f64>,
    /// E_b / E_a for a qubit pair.
    ratio: Option<f64>,
    residual: f64,
}

pub fn cmd_beams(args: &BeamsArgs) -> Result<(), CliError> {
    let input = read_toml::<GeometryFile>(&args.geometry)?.into_input()?;
    let mut pulses = Vec::new();
    let mut condition = 0.0;
    for target in &input.targets {
        let sol = rydgate_core::beams::solve_amplitudes(&input.geometry, target, input.omega0)?;
        condition = sol.condition;
        let ratio = (sol.amplitudes.len() == 2 && sol.amplitudes[0] != 0.0)
            .then(|| sol.amplitudes[1] / sol.amplitudes[0]);
        pulses.push(BeamPulseRecord {
            target: target.clone(),
            amplitudes: sol.amplitudes,
            ratio,
            residual: sol.residual,
        });
    }
    let record = BeamsRecord {
        version: VERSION,
        n_qubits: input.geometry.n_qubits(),
        condition_number: condition,
        pulses,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&record).expect("json"));
        return Ok(());
    }
    println!(
        "geometry: {} qubits, overlap-matrix condition number {:.6e}",
        record.n_qubits, record.condition_number
    );
    for (k, p) in record.pulses.iter().enumerate() {
        let amps: Vec<String> = p.amplitudes.iter().map(|a| format!("{a:+.6}")).collect();
        print!("  pulse {}: E = [{}]", k + 1, amps.join(", "));
        if let Some(r) = p.ratio {
            print!("  ratio E_b/E_a = {r:+.6}");
        }
        println!("  residual {:.2e}", p.residual);
    }
    Ok(())
}

fn resolve_noise_spec(args: &NoiseArgs, seed: u64) -> Result<(NoiseSpec, String), CliError> {
    let samples = args.samples.unwrap_or(1000);
    let (mut spec, name) = match (&args.preset, &args.config) {
        (Some(p), None) => {
            let spec = match p.as_str() {
                "standard" => NoiseSpec::standard(samples, seed),
                "ultra" => NoiseSpec::ultra(samples, seed),
                "none" => NoiseSpec::none(samples, seed),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown preset {other:?}; expected standard, ultra or none"
                    )))
                }
            };
            (spec, p.clone())
        }
        (None, Some(path)) => (
            read_toml::<NoiseFile>(path)?.into_spec(seed)?,
            "custom".to_string(),
        ),
        (None, None) => (NoiseSpec::standard(samples, seed), "standard".to_string()),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(n) = args.samples {
        spec.samples = n;
    }
    Ok((spec, name))
}

pub fn cmd_noise(args: &NoiseArgs, seed: u64) -> Result<(), CliError> {
    let (spec, preset) = resolve_noise_spec(args, seed)?;

    if let Some(series) = &args.series {
        let (lo, hi) = usage(parse_series(series))?;
        let rows = noise_series(lo, hi, &spec)?;
        let csv = write_noise_csv(&rows, &spec, &preset);
        for row in &rows {
            println!(
                "l' = {}: x = {:.6}  A = {:.4} pi  ideal = {:.6}  mean = {:.6}  std = {:.6}  \
                 truncated = {}",
                row.l_prime,
                row.x,
                row.area / PI,
                row.f_ideal,
                row.mean_f,
                row.std_f,
                row.truncations
            );
        }
        if let Some(path) = &args.output {
            write_file(path, &csv)?;
            println!("wrote {}", path.display());
        }
        return Ok(());
    }

    if args.pulses.is_empty() {
        return Err(CliError::Usage(
            "noise needs --series or at least one --pulse".into(),
        ));
    }
    let seq = build_sequence(&args.pulses)?;
    let ideal = fidelity_magnitude(&compose(&seq)).value();
    let summary = monte_carlo(&seq, &spec)?;
    println!(
        "preset = {preset}  seed = {}  samples = {}",
        spec.seed, spec.samples
    );
    println!(
        "ideal F = {}  mean F = {}  std F = {}  truncated = {}",
        format_value(ideal),
        format_value(summary.mean_f),
        format_value(summary.std_f),
        summary.truncations
    );
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, seed: u64) -> Result<(), CliError> {
    let report = run_all(&VerifyOptions {
        seed,
        inject_failure: args.inject_tolerance_failure,
    });
    println!("acceptance criteria:");
    for c in &report.criteria {
        println!("  {}", c.line());
    }
    println!("property suites:");
    for p in &report.properties {
        println!("  {}", p.line());
    }
    let n_pass = report
        .criteria
        .iter()
        .chain(&report.properties)
        .filter(|c| c.passed)
        .count();
    let total = report.criteria.len() + report.properties.len();
    println!(
        "{}: {n_pass}/{total} checks passed (seed {seed})",
        if report.passed { "OK" } else { "FAILED" }
    );
    if let Some(path) = &args.json {
        write_file(path, &serde_json::to_string_pretty(&report).expect("json"))?;
        println!("wrote {}", path.display());
    }
    if !report.passed {
        return Err(CliError::VerificationFailed);
    }
    Ok(())
}
