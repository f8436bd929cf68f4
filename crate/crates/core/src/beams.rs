//! Physical realization of structural vectors by superposed Gaussian
//! beams: pairwise overlaps, the spatial overlap matrix, and the linear
//! solve that turns a target vector into per-beam peak amplitudes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Condition number beyond which an amplitude solution is rejected as
/// noise amplification.
pub const CONDITION_LIMIT: f64 = 1e12;

const RESIDUAL_TOL: f64 = 1e-10;

/// Gaussian overlap of a beam of waist parameter `alpha` (inverse length
/// squared) evaluated a distance `r` from its focus: exp(-alpha r^2).
pub fn overlap_theta(alpha: f64, r: f64) -> f64 {
    assert!(alpha > 0.0 && r >= 0.0, "alpha > 0 and r >= 0 required");
    (-alpha * r * r).exp()
}

/// Ratio of the two beam amplitudes that realizes a target component
/// ratio `x` at overlap `theta`: (x - theta) / (1 - theta x).
///
/// Negative exactly when theta exceeds x (for 0 <= x <= 1): the second
/// beam must run in antiphase to cancel the first beam's tail.
pub fn amplitude_ratio(x: f64, theta: f64) -> Result<f64> {
    let denom = 1.0 - theta * x;
    if denom.abs() < 1e-14 {
        return Err(Error::RatioPole { theta, x });
    }
    Ok((x - theta) / denom)
}

/// Qubit layout seen by the beams: either focus positions with a common
/// Gaussian waist, or a caller-supplied table of pairwise overlaps for
/// non-Gaussian profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamGeometry {
    positions: Option<Vec<Vec<f64>>>,
    alpha: Option<f64>,
    overlaps: Vec<Vec<f64>>,
}

impl BeamGeometry {
    /// Geometry from focus positions (each a 1-3 component coordinate) and
    /// a shared waist parameter.
    #[allow(clippy::needless_range_loop)]
    pub fn gaussian(alpha: f64, positions: Vec<Vec<f64>>) -> Result<Self> {
        let n = positions.len();
        if n < 2 {
            return Err(Error::TooFewQubits(n));
        }
        assert!(alpha > 0.0, "alpha must be positive");
        let mut overlaps = vec![vec![0.0; n]; n];
        for i in 0..n {
            overlaps[i][i] = 1.0;
            for j in (i + 1)..n {
                let r2: f64 = positions[i]
                    .iter()
                    .zip(&positions[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if r2 == 0.0 {
                    return Err(Error::CoincidentQubits { i, j });
                }
                let theta = (-alpha * r2).exp();
                overlaps[i][j] = theta;
                overlaps[j][i] = theta;
            }
        }
        Ok(Self {
            positions: Some(positions),
            alpha: Some(alpha),
            overlaps,
        })
    }

    /// Geometry from an explicit symmetric overlap table with unit
    /// diagonal; accepts any beam profile.
    #[allow(clippy::needless_range_loop)]
    pub fn from_overlaps(overlaps: Vec<Vec<f64>>) -> Result<Self> {
        let n = overlaps.len();
        if n < 2 {
            return Err(Error::TooFewQubits(n));
        }
        for (i, row) in overlaps.iter().enumerate() {
            if row.len() != n || (row[i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidOverlap {
                    i,
                    j: i,
                    theta: row.get(i).copied().unwrap_or(f64::NAN),
                });
            }
            for j in 0..n {
                let theta = overlaps[i][j];
                if i != j && (!theta.is_finite() || theta.abs() >= 1.0) {
                    return Err(Error::InvalidOverlap { i, j, theta });
                }
                if (theta - overlaps[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidOverlap { i, j, theta });
                }
            }
        }
        Ok(Self {
            positions: None,
            alpha: None,
            overlaps,
        })
    }

    /// Two-qubit shorthand with a single overlap value.
    pub fn pair(theta: f64) -> Result<Self> {
        Self::from_overlaps(vec![vec![1.0, theta], vec![theta, 1.0]])
    }

    pub fn n_qubits(&self) -> usize {
        self.overlaps.len()
    }

    pub fn positions(&self) -> Option<&[Vec<f64>]> {
        self.positions.as_deref()
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.overlaps[i][j]
    }
}

/// Symmetric overlap matrix S with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    n: usize,
    /// Row-major entries.
    data: Vec<f64>,
}

/// Builds the N x N overlap matrix of a geometry and verifies it is
/// usable (condition number below [`CONDITION_LIMIT`]).
pub fn build_overlap_matrix(geometry: &BeamGeometry) -> Result<OverlapMatrix> {
    let n = geometry.n_qubits();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(geometry.theta(i, j));
        }
    }
    let m = OverlapMatrix { n, data };
    let cond = m.condition_number()?;
    if cond.is_nan() || cond >= CONDITION_LIMIT {
        let (i, j) = m.dominant_pair();
        return Err(Error::IllConditioned { cond, i, j });
    }
    Ok(m)
}

impl OverlapMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Off-diagonal pair with the largest |theta|; named in conditioning
    /// diagnostics.
    fn dominant_pair(&self) -> (usize, usize) {
        let mut best = (0, 1);
        let mut mag = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j).abs() > mag {
                    mag = self.get(i, j).abs();
                    best = (i, j);
                }
            }
        }
        best
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn lu(&self) -> Option<(Vec<f64>, Vec<usize>)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    a[r1 * n + col]
                        .abs()
                        .partial_cmp(&a[r2 * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            if a[pivot_row * n + col].abs() < 1e-300 {
                return None;
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = a[col * n + col];
            for row in (col + 1)..n {
                let factor = a[row * n + col] / pivot;
                a[row * n + col] = factor;
                for k in (col + 1)..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
        Some((a, perm))
    }

    fn lu_solve(lu: &[f64], perm: &[usize], n: usize, rhs: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            for k in 0..i {
                let l = lu[i * n + k];
                y[i] -= l * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = lu[i * n + k];
                y[i] -= u * y[k];
            }
            y[i] /= lu[i * n + i];
        }
        y
    }

    /// Solves S v = rhs by LU with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let (lu, perm) = self.lu().ok_or_else(|| {
            let (i, j) = self.dominant_pair();
            Error::IllConditioned {
                cond: f64::INFINITY,
                i,
                j,
            }
        })?;
        Ok(Self::lu_solve(&lu, &perm, self.n, rhs))
    }

    /// 1-norm condition number via the explicit inverse (the matrices here
    /// are tiny).
    pub fn condition_number(&self) -> Result<f64> {
        let n = self.n;
        let Some((lu, perm)) = self.lu() else {
            return Ok(f64::INFINITY);
        };
        let norm1 = |data: &dyn Fn(usize, usize) -> f64| -> f64 {
            (0..n)
                .map(|j| (0..n).map(|i| data(i, j).abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let mut inv = vec![0.0; n * n];
        for col in 0..n {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            let x = Self::lu_solve(&lu, &perm, n, &e);
            for row in 0..n {
                inv[row * n + col] = x[row];
            }
        }
        let a_norm = norm1(&|i, j| self.get(i, j));
        let inv_norm = norm1(&|i, j| inv[i * n + j]);
        Ok(a_norm * inv_norm)
    }
}

/// Per-beam peak amplitudes realizing a target structural vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamAmplitudeSolution {
    /// Peak Rabi amplitudes of the beams, one per qubit focus.
    pub amplitudes: Vec<f64>,
    /// The requested (unit) target vector.
    pub target: Vec<f64>,
    /// Common scale Omega_0.
    pub scale: f64,
    /// Max-norm of S * amplitudes - scale * target.
    pub residual: f64,
    /// Condition number of the overlap matrix used.
    pub condition: f64,
}

/// Solves S E = omega0 e for the beam amplitudes E. The target must be a
/// unit vector of the geometry's dimension.
pub fn solve_amplitudes(
    geometry: &BeamGeometry,
    target: &[f64],
    omega0: f64,
) -> Result<BeamAmplitudeSolution> {
    let n = geometry.n_qubits();
    if target.len() != n {
        return Err(Error::TargetLengthMismatch {
            expected: n,
            got: target.len(),
        });
    }
    let norm = target.iter().map(|t| t * t).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NonUnitTarget(norm));
    }
    let matrix = build_overlap_matrix(geometry)?;
    let condition = matrix.condition_number()?;
    let rhs: Vec<f64> = target.iter().map(|t| omega0 * t).collect();
    let amplitudes = matrix.solve(&rhs)?;
    let reproduced = matrix.apply(&amplitudes);
    let residual = reproduced
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL * omega0.abs().max(1.0) {
        let (i, j) = matrix.dominant_pair();
        return Err(Error::IllConditioned {
            cond: condition,
            i,
            j,
        });
    }
    Ok(BeamAmplitudeSolution {
        amplitudes,
        target: target.to_vec(),
        scale: omega0,
        residual,
        condition,
    })
}
