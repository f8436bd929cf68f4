//! TOML ingestion for noise specs, grid specs, and beam geometries.
//! Angle-valued fields accept either radians (number) or a "pi"-suffixed
//! string like "0.1pi".

use serde::Deserialize;
use std::collections::BTreeMap;

use rydgate_core::beams::BeamGeometry;
use rydgate_core::grid::{AxisSpec, FamilyConstraint, GridSpec, Param};
use rydgate_core::noise::{NoiseSpec, DEFAULT_THETA};

use crate::args::parse_angle;
use crate::CliError;

/// Number in radians, or a string in pi units ("7pi").
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64, CliError> {
        match self {
            Angle::Radians(v) => Ok(*v),
            Angle::Text(s) => parse_angle(s).map_err(CliError::Usage),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub delta_intensity: Option<f64>,
    pub delta_position: Option<f64>,
    pub temperature_uk: Option<f64>,
    pub delta_phase: Option<Angle>,
    pub diffusion: Option<f64>,
    pub gate_time: Option<f64>,
    pub distance: Option<f64>,
    pub theta: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl NoiseFile {
    pub fn into_spec(self, default_seed: u64) -> Result<NoiseSpec, CliError> {
        Ok(NoiseSpec {
            delta_intensity: self.delta_intensity.unwrap_or(0.0),
            delta_position: self.delta_position,
            temperature_uk: self.temperature_uk,
            delta_phase: self
                .delta_phase
                .map(|a| a.radians())
                .transpose()?
                .unwrap_or(0.0),
            diffusion: self.diffusion,
            gate_time: self.gate_time,
            distance: self.distance,
            theta: self.theta.unwrap_or(DEFAULT_THETA),
            samples: self.samples.unwrap_or(1000),
            seed: self.seed.unwrap_or(default_seed),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(default)]
    pub axis: Vec<GridAxisFile>,
    #[serde(default)]
    pub fixed: BTreeMap<String, Angle>,
    pub family: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxisFile {
    pub param: String,
    pub min: Angle,
    pub max: Angle,
    pub points: usize,
}

impl GridFile {
    pub fn into_spec(self) -> Result<GridSpec, CliError> {
        let mut axes = Vec::new();
        for axis in self.axis {
            let param = Param::parse(&axis.param)?;
            axes.push(AxisSpec::new(
                param,
                axis.min.radians()?,
                axis.max.radians()?,
                axis.points,
            )?);
        }
        let mut fixed = BTreeMap::new();
        for (name, value) in self.fixed {
            fixed.insert(Param::parse(&name)?, value.radians()?);
        }
        let family = match self.family {
            Some(f) => FamilyConstraint::parse(&f)?,
            None => FamilyConstraint::None,
        };
        Ok(GridSpec::new(axes, fixed, family)?)
    }
}

/// Qubit coordinate: scalar (collinear layouts) or up to 3 components.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PositionEntry {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl PositionEntry {
    fn coords(&self) -> Vec<f64> {
        match self {
            PositionEntry::Scalar(v) => vec![*v],
            PositionEntry::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    /// Beam waist parameter (inverse length squared); used with positions.
    pub alpha: Option<f64>,
    /// Qubit positions (length units matching alpha).
    pub positions: Option<Vec<PositionEntry>>,
    /// Explicit pairwise-overlap table for non-Gaussian profiles.
    pub overlaps: Option<Vec<Vec<f64>>>,
    /// Common amplitude scale.
    pub omega0: Option<f64>,
    #[serde(default)]
    pub target: Vec<TargetFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    /// Full target vector, one component per qubit.
    pub e: Option<Vec<f64>>,
    /// Two-qubit shorthand: component ratio b/a.
    pub x: Option<f64>,
}

pub struct GeometryInput {
    pub geometry: BeamGeometry,
    pub omega0: f64,
    /// Unit target vectors, one per pulse.
    pub targets: Vec<Vec<f64>>,
}

impl GeometryFile {
    pub fn into_input(self) -> Result<GeometryInput, CliError> {
        let geometry = match (self.overlaps, self.alpha, self.positions) {
            (Some(table), None, None) => BeamGeometry::from_overlaps(table)?,
            (None, Some(alpha), Some(positions)) => {
                let coords: Vec<Vec<f64>> = positions.iter().map(|p| p.coords()).collect();
                BeamGeometry::gaussian(alpha, coords)?
            }
            _ => {
                return Err(CliError::Usage(
                    "geometry needs either (alpha, positions) or overlaps".into(),
                ))
            }
        };
        let n = geometry.n_qubits();
        if self.target.is_empty() {
            return Err(CliError::Usage("geometry declares no targets".into()));
        }
        let mut targets = Vec::new();
        for (k, t) in self.target.into_iter().enumerate() {
            let raw = match (t.e, t.x) {
                (Some(e), None) => e,
                (None, Some(x)) => {
                    if n != 2 {
                        return Err(CliError::Usage(format!(
                            "target {k}: the x shorthand needs a 2-qubit geometry"
                        )));
                    }
                    let e = rydgate_core::StructuralVector::from_ratio(x)?;
                    vec![e.a(), e.b()]
                }
                _ => {
                    return Err(CliError::Usage(format!(
                        "target {k}: give exactly one of e or x"
                    )))
                }
            };
            let norm: f64 = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(CliError::Usage(format!("target {k} has no direction")));
            }
            targets.push(raw.iter().map(|v| v / norm).collect());
        }
        Ok(GeometryInput {
            geometry,
            omega0: self.omega0.unwrap_or(1.0),
            targets,
        })
    }
}

pub fn read_toml<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
