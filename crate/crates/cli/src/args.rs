//! Command-line surface and the `pi`-suffixed angle syntax.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Protocol design for CZ gates on a blockaded qubit pair: fidelity
/// evaluation, parameter maps, optimal-protocol search, beam synthesis,
/// noise statistics, and a built-in verification suite.
#[derive(Debug, Parser)]
#[command(name = "rydgate", version, max_term_width = 100)]
pub struct Cli {
    /// Base seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (default: RYDGATE_THREADS or all cores). Outputs do
    /// not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the fidelity and mechanism of a pulse protocol.
    Fidelity(FidelityArgs),
    /// Sweep the fidelity over one or two parameters into a CSV map.
    Map(MapArgs),
    /// Enumerate and refine optimal protocols up to an area budget.
    Optimize(OptimizeArgs),
    /// Solve beam amplitudes realizing target structural vectors.
    Beams(BeamsArgs),
    /// Monte Carlo fidelity statistics under shot-to-shot noise.
    Noise(NoiseArgs),
    /// Run the acceptance criteria and property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    /// Pulse as comma-separated fields, e.g. "A=6.162pi,x=0.3333" or
    /// "A=2pi,x=1,phi=0.5pi". Repeat for multi-pulse protocols.
    #[arg(long = "pulse", required = true)]
    pub pulses: Vec<String>,

    /// Emit a JSON record instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Swept axis as NAME=MIN:MAX:POINTS with NAME one of A, A1, A2, x,
    /// x1, x2 (areas accept the pi suffix). One or two axes.
    #[arg(long = "axis")]
    pub axes: Vec<String>,

    /// Fixed parameter binding NAME=VALUE.
    #[arg(long = "fixed")]
    pub fixed: Vec<String>,

    /// Constraint tying pulse 2 to pulse 1: none, aligned, anti-aligned,
    /// x2-neg-x1 or orthogonal.
    #[arg(long, default_value = "none")]
    pub family: String,

    /// Grid description file (TOML); command-line axes override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output CSV path.
    #[arg(long, short)]
    pub output: PathBuf,

    /// Also write the lowest-area ridge curve A(x) to this path.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Area budget, e.g. "15pi".
    #[arg(long)]
    pub max_area: String,

    /// Also enumerate a two-pulse family: checkered, aligned,
    /// anti-aligned or orthogonal.
    #[arg(long)]
    pub family: Option<String>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BeamsArgs {
    /// Geometry description file (TOML).
    #[arg(long)]
    pub geometry: PathBuf,

    /// Emit a JSON record instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Protocol series over the refined (l, l, 0) optima, e.g. "l0..6".
    #[arg(long, conflicts_with = "pulses")]
    pub series: Option<String>,

    /// Explicit protocol pulses (same syntax as `fidelity --pulse`).
    #[arg(long = "pulse")]
    pub pulses: Vec<String>,

    /// Noise preset: standard, ultra or none.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,

    /// Noise description file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Sample count override.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Output CSV path (series mode). Summary prints to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Write the machine-readable report here.
    #[arg(long)]
    pub json: Option<PathBuf>,

    /// Self-check: tamper one tolerance so the suite must fail.
    #[arg(long, hide = true)]
    pub inject_tolerance_failure: bool,
}

/// Parses an angle that is either raw radians ("19.3584") or a multiple
/// of pi ("6.162pi").
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (body, in_pi) = match t.strip_suffix("pi") {
        Some(b) => (b, true),
        None => (t, false),
    };
    let value: f64 = body
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse angle {s:?}"))?;
    if !value.is_finite() {
        return Err(format!("angle {s:?} is not finite"));
    }
    Ok(if in_pi {
        value * std::f64::consts::PI
    } else {
        value
    })
}

/// Parses "A=6.162pi,x=0.3333,phi=0" into (area, ratio, phase).
pub fn parse_pulse(s: &str) -> Result<(f64, f64, f64), String> {
    let mut area = None;
    let mut ratio = None;
    let mut phase = 0.0;
    for field in s.split(',') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| format!("pulse field {field:?} is not KEY=VALUE"))?;
        match key.trim() {
            "A" => area = Some(parse_angle(value)?),
            "x" => {
                ratio = Some(
                    value
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| format!("cannot parse ratio {value:?}"))?,
                )
            }
            "phi" => phase = parse_angle(value)?,
            other => return Err(format!("unknown pulse field {other:?}")),
        }
    }
    match (area, ratio) {
        (Some(a), Some(x)) => Ok((a, x, phase)),
        _ => Err(format!("pulse {s:?} needs both A and x")),
    }
}

/// Parses "l0..6" (or "0..6") into an inclusive index range.
pub fn parse_series(s: &str) -> Result<(u32, u32), String> {
    let t = s.trim().trim_start_matches('l');
    let (lo, hi) = t
        .split_once("..")
        .ok_or_else(|| format!("series {s:?} is not of the form l0..6"))?;
    let lo: u32 = lo
        .parse()
        .map_err(|_| format!("bad series start {lo:?}"))?;
    let hi: u32 = hi
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad series end {hi:?}"))?;
    if hi < lo {
        return Err(format!("series {s:?} is empty"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles_accept_pi_and_radians() {
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("-0.5pi").unwrap(), -0.5 * PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        // the round-trip through the shortest decimal repr is exact
        let x = 6.162 * PI;
        assert_eq!(parse_angle(&format!("{x}")).unwrap(), x);
        assert!(parse_angle("abc").is_err());
    }

    #[test]
    fn pulse_syntax() {
        let (a, x, phi) = parse_pulse("A=6.162pi,x=0.3333").unwrap();
        assert_eq!(a, 6.162 * PI);
        assert_eq!(x, 0.3333);
        assert_eq!(phi, 0.0);
        let (_, _, phi) = parse_pulse("A=1,x=1,phi=0.5pi").unwrap();
        assert_eq!(phi, 0.5 * PI);
        assert!(parse_pulse("x=1").is_err());
        assert!(parse_pulse("A=1,x=1,bogus=2").is_err());
    }

    #[test]
    fn series_syntax() {
        assert_eq!(parse_series("l0..6").unwrap(), (0, 6));
        assert_eq!(parse_series("2..4").unwrap(), (2, 4));
        assert!(parse_series("l5..1").is_err());
        assert!(parse_series("l5").is_err());
    }
}
