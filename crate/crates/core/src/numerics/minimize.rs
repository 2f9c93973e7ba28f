use crate::error::{Error, Result};

/// Uniform pre-scan size used to bracket sharp minima before golden-section
/// refinement.
pub const DEFAULT_SCAN_POINTS: usize = 2001;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_STEPS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMinimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// The pre-scan minimum sat on the first or last grid node.
    pub at_bracket_edge: bool,
    /// Spacing of the pre-scan grid.
    pub grid_step: f64,
}

pub fn minimize_scalar(
    f: impl FnMut(f64) -> f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<ScalarMinimum> {
    minimize_scalar_with(f, bracket, tol, DEFAULT_SCAN_POINTS)
}

/// Grid pre-scan over `bracket` followed by golden-section search in the two
/// grid cells around the best node.
pub fn minimize_scalar_with(
    mut f: impl FnMut(f64) -> f64,
    bracket: (f64, f64),
    tol: f64,
    scan_points: usize,
) -> Result<ScalarMinimum> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("bad bracket ({lo}, {hi})")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let scan_points = scan_points.max(3);
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { at: vec![x] })
        }
    };

    let step = (hi - lo) / (scan_points - 1) as f64;
    let grid_x = |i: usize| {
        if i == scan_points - 1 {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..scan_points {
        let v = eval(grid_x(i))?;
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let at_bracket_edge = best_i == 0 || best_i == scan_points - 1;

    let mut a = grid_x(best_i.saturating_sub(1));
    let mut b = grid_x((best_i + 1).min(scan_points - 1));
    let mut best_x = grid_x(best_i);

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..MAX_GOLDEN_STEPS {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    Ok(ScalarMinimum {
        x: best_x,
        value: best_v,
        evaluations,
        at_bracket_edge,
        grid_step: step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiOptions {
    pub max_iterations: usize,
}

impl Default for MultiOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

pub fn minimize_multi(
    f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    tol: f64,
) -> Result<MultiMinimum> {
    minimize_multi_with(f, start, step, tol, MultiOptions::default())
}

/// Nelder-Mead from a simplex of edge `step` around `start`, then a compass
/// search whose final stride is exactly `tol`.
///
/// On return no axis-aligned move of size `tol` lowers the value.
pub fn minimize_multi_with(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    tol: f64,
    options: MultiOptions,
) -> Result<MultiMinimum> {
    let d = start.len();
    if d == 0 {
        return Err(Error::InvalidInput("need at least one dimension".into()));
    }
    if step.is_nan() || tol.is_nan() || step <= 0.0 || tol <= 0.0 {
        return Err(Error::InvalidInput("step and tol must be positive".into()));
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| -> Result<f64> {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { at: x.to_vec() })
        }
    };

    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values = Vec::with_capacity(d + 1);
    for p in &simplex {
        values.push(eval(p)?);
    }

    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let size = simplex[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let spread = values[d] - values[0];
        if size <= tol && spread <= tol * values[0].abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if size <= 0.1 * tol {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|p| p[k]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected)?;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = eval(&expanded)?;
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[d] {
            let p = along(-0.5);
            let v = eval(&p)?;
            (p, v)
        } else {
            let p = along(0.5);
            let v = eval(&p)?;
            (p, v)
        };
        if fc < values[d].min(fr) {
            simplex[d] = contracted;
            values[d] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=d {
            let shrunk: Vec<f64> = simplex[i]
                .iter()
                .zip(&best)
                .map(|(x, b)| b + 0.5 * (x - b))
                .collect();
            values[i] = eval(&shrunk)?;
            simplex[i] = shrunk;
        }
    }

    let best_i = (0..=d)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    let mut point = simplex[best_i].clone();
    let mut value = values[best_i];

    // compass polish; the final pass runs at stride == tol
    let mut stride = step.min(1e3 * tol).max(tol);
    loop {
        let mut improved = false;
        for k in 0..d {
            for sign in [1.0, -1.0] {
                let mut trial = point.clone();
                trial[k] += sign * stride;
                let v = eval(&trial)?;
                if v < value {
                    point = trial;
                    value = v;
                    improved = true;
                }
            }
        }
        iterations += 1;
        if iterations >= 2 * options.max_iterations {
            return Err(Error::Convergence {
                iterations,
                best: point,
                value,
            });
        }
        if !improved {
            if stride <= tol {
                break;
            }
            stride = (stride / 2.0).max(tol);
        }
    }

    Ok(MultiMinimum {
        point,
        value,
        iterations,
        evaluations,
    })
}
