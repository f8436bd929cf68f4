//! Fidelity maps over one or two protocol parameters, with the family
//! constraints that tie the second pulse to the first.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fidelity::{fidelity, FidelityValue};
use crate::gate::{compose, Pulse, PulseSequence, StructuralVector};

/// Sweep parameters: single-pulse area/ratio or the per-pulse versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    Area,
    Area1,
    Area2,
    Ratio,
    Ratio1,
    Ratio2,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::Area => "A",
            Param::Area1 => "A1",
            Param::Area2 => "A2",
            Param::Ratio => "x",
            Param::Ratio1 => "x1",
            Param::Ratio2 => "x2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Param::Area),
            "A1" => Ok(Param::Area1),
            "A2" => Ok(Param::Area2),
            "x" => Ok(Param::Ratio),
            "x1" => Ok(Param::Ratio1),
            "x2" => Ok(Param::Ratio2),
            other => Err(Error::InvalidGrid(format!(
                "unknown parameter {other:?}; expected A, A1, A2, x, x1 or x2"
            ))),
        }
    }
}

/// Constraint linking the second pulse's structural vector to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FamilyConstraint {
    #[default]
    None,
    /// e2 = e1.
    Aligned,
    /// e2 = -e1 (full sign flip; exact area-difference reduction).
    AntiAligned,
    /// x2 = -x1 (component sign flip on the second site only).
    RatioFlipped,
    /// x2 = -1/x1 (orthogonal structural vectors).
    Orthogonal,
}

impl FamilyConstraint {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyConstraint::None => "none",
            FamilyConstraint::Aligned => "aligned",
            FamilyConstraint::AntiAligned => "anti-aligned",
            FamilyConstraint::RatioFlipped => "x2-neg-x1",
            FamilyConstraint::Orthogonal => "orthogonal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FamilyConstraint::None),
            "aligned" => Ok(FamilyConstraint::Aligned),
            "anti-aligned" => Ok(FamilyConstraint::AntiAligned),
            "x2-neg-x1" => Ok(FamilyConstraint::RatioFlipped),
            "orthogonal" => Ok(FamilyConstraint::Orthogonal),
            other => Err(Error::InvalidGrid(format!(
                "unknown family {other:?}; expected none, aligned, anti-aligned, x2-neg-x1 or orthogonal"
            ))),
        }
    }
}

/// One swept axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn new(param: Param, min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis {} needs at least 2 points, got {points}",
                param.name()
            )));
        }
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(Error::InvalidGrid(format!(
                "axis {} needs min < max, got [{min}, {max}]",
                param.name()
            )));
        }
        Ok(Self {
            param,
            min,
            max,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.min + step * i as f64)
            .collect()
    }
}

/// A full sweep description: one or two axes, fixed bindings for the
/// remaining parameters, and a family constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
    pub fixed: BTreeMap<Param, f64>,
    pub family: FamilyConstraint,
}

impl GridSpec {
    pub fn new(
        axes: Vec<AxisSpec>,
        fixed: BTreeMap<Param, f64>,
        family: FamilyConstraint,
    ) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "expected 1 or 2 axes, got {}",
                axes.len()
            )));
        }
        let spec = Self {
            axes,
            fixed,
            family,
        };
        // fail early if the bindings cannot produce a protocol
        spec.protocol_at(&spec.axes.iter().map(|a| a.min).collect::<Vec<_>>())?;
        Ok(spec)
    }

    fn binding(&self, values: &[f64], param: Param) -> Option<f64> {
        self.axes
            .iter()
            .position(|a| a.param == param)
            .map(|i| values[i])
            .or_else(|| self.fixed.get(&param).copied())
    }

    /// Assembles the pulse train at one grid point.
    pub fn protocol_at(&self, axis_values: &[f64]) -> Result<PulseSequence> {
        let get = |p: Param| self.binding(axis_values, p);

        // single-pulse sweep: A and x (x defaults to x1 spelling as well)
        let single_area = get(Param::Area);
        let a1 = get(Param::Area1);
        let a2 = get(Param::Area2);
        let x = get(Param::Ratio);
        let x1 = get(Param::Ratio1).or(x);
        let x2 = get(Param::Ratio2);

        if let (Some(area), Some(ratio), None, None) = (single_area, x, a1, a2) {
            return PulseSequence::new(vec![Pulse::from_ratio(area, ratio)?]);
        }

        let (Some(area1), Some(area2), Some(ratio1)) = (a1, a2, x1) else {
            return Err(Error::InvalidGrid(
                "incomplete bindings: need (A, x) or (A1, A2, x1[, x2]/family)".into(),
            ));
        };
        let e1 = StructuralVector::from_ratio(ratio1)?;
        let e2 = match self.family {
            FamilyConstraint::None => {
                let Some(ratio2) = x2 else {
                    return Err(Error::InvalidGrid(
                        "two-pulse sweep without family needs x2".into(),
                    ));
                };
                StructuralVector::from_ratio(ratio2)?
            }
            FamilyConstraint::Aligned => e1,
            FamilyConstraint::AntiAligned => e1.negated(),
            FamilyConstraint::RatioFlipped => StructuralVector::from_ratio(-ratio1)?,
            FamilyConstraint::Orthogonal => {
                if ratio1 == 0.0 {
                    return Err(Error::InvalidGrid(
                        "orthogonal family undefined at x1 = 0".into(),
                    ));
                }
                StructuralVector::from_ratio(-1.0 / ratio1)?
            }
        };
        PulseSequence::new(vec![Pulse::new(area1, e1, 0.0), Pulse::new(area2, e2, 0.0)])
    }
}

/// Evaluated sweep: axis vectors, row-major fidelities, and metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: GridSpec,
    pub axis_values: Vec<Vec<f64>>,
    /// Row-major over (axis1, axis2); length is the product of the axis
    /// point counts.
    pub values: Vec<f64>,
    pub metadata: BTreeMap<String, String>,
}

/// Evaluates the fidelity at every grid point in parallel. The output
/// ordering is row-major and independent of thread count.
pub fn evaluate_grid(spec: &GridSpec) -> Result<GridResult> {
    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let n2 = axis_values.get(1).map_or(1, |v| v.len());
    let total = axis_values[0].len() * n2;

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| -> Result<f64> {
            let i = idx / n2;
            let j = idx % n2;
            let mut point = vec![axis_values[0][i]];
            if let Some(second) = axis_values.get(1) {
                point.push(second[j]);
            }
            let seq = spec.protocol_at(&point)?;
            Ok(fidelity(&compose(&seq))?.value())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut metadata = BTreeMap::new();
    metadata.insert("family".into(), spec.family.name().to_string());
    for (p, v) in &spec.fixed {
        metadata.insert(format!("fixed_{}", p.name()), format!("{v:e}"));
    }
    Ok(GridResult {
        spec: spec.clone(),
        axis_values,
        values,
        metadata,
    })
}

/// Fidelity along an explicit curve A(x), used for ridge-line scans.
pub fn fidelity_values(points: impl IntoIterator<Item = (f64, f64)>) -> Vec<f64> {
    points
        .into_iter()
        .map(|(area, x)| crate::fidelity::fidelity_single(area, x).value())
        .collect()
}

/// Indices of strict interior local maxima of a sampled curve.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// Lowest-area ridge law A(x) = 2 pi sqrt(1 + x^2) / x on which the
/// weak-site generalized area stays at 2 pi.
pub fn ridge_area(x: f64) -> f64 {
    2.0 * std::f64::consts::PI * (1.0 + x * x).sqrt() / x
}

impl GridResult {
    /// Value at (i, j) of a 2-axis grid.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        let n2 = self.axis_values.get(1).map_or(1, |v| v.len());
        self.values[i * n2 + j]
    }

    pub fn fidelities(&self) -> impl Iterator<Item = FidelityValue> + '_ {
        self.values.iter().map(|&v| FidelityValue::new(v))
    }
}
