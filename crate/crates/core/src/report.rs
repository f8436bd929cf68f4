//! CSV emission and parsing for grids and noise series.
//!
//! Values are written with 12 significant digits; a parsed file
//! re-serializes to the identical bytes. Metadata travels as leading
//! `# key = value` comment lines so provenance stays attached to the data.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::{AxisSpec, FamilyConstraint, GridResult, GridSpec, Param};
use crate::noise::{NoiseSpec, SeriesRow};

/// Library version recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 12-significant-digit scientific notation used for every numeric field.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

fn metadata_block(metadata: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (k, v) in metadata {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out
}

fn parse_metadata<'a>(
    lines: &mut std::iter::Peekable<impl Iterator<Item = &'a str>>,
) -> BTreeMap<String, String> {
    let mut metadata = BTreeMap::new();
    while let Some(line) = lines.peek() {
        let Some(rest) = line.strip_prefix('#') else {
            break;
        };
        if let Some((k, v)) = rest.split_once('=') {
            metadata.insert(k.trim().to_string(), v.trim().to_string());
        }
        lines.next();
    }
    metadata
}

/// Serializes a grid: metadata block, header with the axis names, then one
/// row-major line per grid point.
pub fn write_grid_csv(grid: &GridResult) -> String {
    let mut out = String::new();
    let mut metadata = grid.metadata.clone();
    metadata.insert("version".into(), VERSION.into());
    out.push_str(&metadata_block(&metadata));

    let names: Vec<&str> = grid.spec.axes.iter().map(|a| a.param.name()).collect();
    out.push_str(&names.join(","));
    out.push_str(",fidelity\n");

    let n2 = grid.axis_values.get(1).map_or(1, |v| v.len());
    for (idx, &f) in grid.values.iter().enumerate() {
        let i = idx / n2;
        let j = idx % n2;
        out.push_str(&format_value(grid.axis_values[0][i]));
        if let Some(second) = grid.axis_values.get(1) {
            out.push(',');
            out.push_str(&format_value(second[j]));
        }
        out.push(',');
        out.push_str(&format_value(f));
        out.push('\n');
    }
    out
}

/// Parses a grid CSV produced by [`write_grid_csv`]. Axis ranges are
/// reconstructed from the stored values, so writing the parsed grid
/// reproduces the input bytes.
pub fn parse_grid_csv(text: &str) -> Result<GridResult> {
    let mut lines = text.lines().peekable();
    let metadata = parse_metadata(&mut lines);
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedRecord("missing header".into()))?;
    let mut columns: Vec<&str> = header.split(',').collect();
    let last = columns.pop();
    if last != Some("fidelity") || columns.is_empty() || columns.len() > 2 {
        return Err(Error::MalformedRecord(format!("bad header {header:?}")));
    }
    let params: Vec<Param> = columns
        .iter()
        .map(|c| Param::parse(c))
        .collect::<Result<_>>()?;

    let mut axis_values: Vec<Vec<f64>> = vec![Vec::new(); params.len()];
    let mut values = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != params.len() + 1 {
            return Err(Error::MalformedRecord(format!("bad row {line:?}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::MalformedRecord(format!("bad number {s:?}")))
        };
        for (axis, field) in axis_values.iter_mut().zip(&fields) {
            let v = parse(field)?;
            if axis.last() != Some(&v) && !axis.contains(&v) {
                axis.push(v);
            }
        }
        values.push(parse(fields[params.len()])?);
    }
    if values.is_empty() {
        return Err(Error::MalformedRecord("no data rows".into()));
    }

    let family = metadata
        .get("family")
        .map(|f| FamilyConstraint::parse(f))
        .transpose()?
        .unwrap_or_default();
    let axes: Vec<AxisSpec> = params
        .iter()
        .zip(&axis_values)
        .map(|(&param, vals)| {
            AxisSpec::new(
                param,
                vals.first().copied().unwrap_or(0.0),
                vals.last().copied().unwrap_or(1.0),
                vals.len(),
            )
        })
        .collect::<Result<_>>()?;

    let expected: usize = axis_values.iter().map(|v| v.len()).product();
    if expected != values.len() {
        return Err(Error::MalformedRecord(format!(
            "value count {} does not match axis product {expected}",
            values.len()
        )));
    }

    Ok(GridResult {
        spec: GridSpec {
            axes,
            fixed: BTreeMap::new(),
            family,
        },
        axis_values,
        values,
        metadata,
    })
}

/// Serializes the lowest-area ridge overlay A(x) sampled at the given
/// ratios.
pub fn write_ridge_csv(xs: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# version = {VERSION}\n"));
    out.push_str("x,A\n");
    for &x in xs {
        out.push_str(&format_value(x));
        out.push(',');
        out.push_str(&format_value(crate::grid::ridge_area(x)));
        out.push('\n');
    }
    out
}

/// Serializes a noise series with the spec echoed into the metadata.
/// Contains no volatile fields, so identical inputs give identical bytes.
pub fn write_noise_csv(rows: &[SeriesRow], spec: &NoiseSpec, preset: &str) -> String {
    let mut metadata = BTreeMap::new();
    metadata.insert("version".to_string(), VERSION.to_string());
    metadata.insert("preset".to_string(), preset.to_string());
    metadata.insert("seed".to_string(), spec.seed.to_string());
    metadata.insert("samples".to_string(), spec.samples.to_string());
    metadata.insert(
        "delta_intensity".to_string(),
        format_value(spec.delta_intensity),
    );
    if let Some(dr) = spec.delta_position {
        metadata.insert("delta_position".to_string(), format_value(dr));
    }
    if let Some(t) = spec.temperature_uk {
        metadata.insert("temperature_uk".to_string(), format_value(t));
    }
    metadata.insert("delta_phase".to_string(), format_value(spec.delta_phase));
    metadata.insert("theta".to_string(), format_value(spec.theta));
    metadata.insert(
        "x_perturbation".to_string(),
        "ratio-renormalized".to_string(),
    );

    let mut out = metadata_block(&metadata);
    out.push_str("l_prime,x,area,f_ideal,mean_f,std_f,truncated\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.l_prime,
            format_value(row.x),
            format_value(row.area),
            format_value(row.f_ideal),
            format_value(row.mean_f),
            format_value(row.std_f),
            row.truncations,
        ));
    }
    out
}

/// Parses a noise series CSV back into rows and metadata.
pub fn parse_noise_csv(text: &str) -> Result<(Vec<SeriesRow>, BTreeMap<String, String>)> {
    let mut lines = text.lines().peekable();
    let metadata = parse_metadata(&mut lines);
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedRecord("missing header".into()))?;
    if header != "l_prime,x,area,f_ideal,mean_f,std_f,truncated" {
        return Err(Error::MalformedRecord(format!("bad header {header:?}")));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::MalformedRecord(format!("bad row {line:?}")));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::MalformedRecord(format!("bad number {s:?}")))
        };
        rows.push(SeriesRow {
            l_prime: f[0]
                .parse()
                .map_err(|_| Error::MalformedRecord(format!("bad index {:?}", f[0])))?,
            x: num(f[1])?,
            area: num(f[2])?,
            f_ideal: num(f[3])?,
            mean_f: num(f[4])?,
            std_f: num(f[5])?,
            truncations: f[6]
                .parse()
                .map_err(|_| Error::MalformedRecord(format!("bad count {:?}", f[6])))?,
        });
    }
    Ok((rows, metadata))
}
