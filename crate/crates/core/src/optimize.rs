//! Small derivative-free simplex minimizer for polishing protocol
//! parameters on the smooth trigonometric fidelity landscape.

/// Result of a simplex minimization.
#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead minimization of `f` starting at `start`.
///
/// `step` sets the initial simplex edge per coordinate. Converges when the
/// vertex spread drops below `tol` in every coordinate; the best vertex is
/// returned either way, so the result never regresses below the start.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: &[f64],
    tol: f64,
    max_iter: usize,
) -> SimplexOutcome {
    assert_eq!(start.len(), step.len());
    let n = start.len();
    assert!(n >= 1);

    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step[i];
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

        let spread = (0..n)
            .map(|i| {
                let lo = simplex.iter().map(|(v, _)| v[i]).fold(f64::MAX, f64::min);
                let hi = simplex.iter().map(|(v, _)| v[i]).fold(f64::MIN, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max);
        if spread < tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(v, _)| v[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();

        let blend = |w: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + w * (centroid[i] - worst.0[i]))
                .collect()
        };

        let reflected = blend(ALPHA);
        let f_reflected = f(&reflected);

        if f_reflected < simplex[0].1 {
            let expanded = blend(GAMMA);
            let f_expanded = f(&expanded);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
            continue;
        }

        let contracted = blend(-RHO);
        let f_contracted = f(&contracted);
        if f_contracted < worst.1 {
            simplex[n] = (contracted, f_contracted);
            continue;
        }

        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            for (c, b) in entry.0.iter_mut().zip(&best) {
                *c = b + SIGMA * (*c - b);
            }
            entry.1 = f(&entry.0);
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (point, value) = simplex.swap_remove(0);
    SimplexOutcome {
        point,
        value,
        iterations,
        converged,
    }
}
