//! Nelder-Mead downhill simplex minimizer.
//!
//! Deterministic: the same objective and start always follow the same path.
//! Objectives may return `f64::INFINITY` to mark infeasible points.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Convergence when every vertex lies within `rel_tol * max(|x_best|, 1)`
    /// of the best vertex in every coordinate.
    pub rel_tol: f64,
    pub max_evaluations: usize,
    /// Fresh simplexes built around the optimum after convergence. A restart
    /// that does not improve the objective ends the search.
    pub max_restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_evaluations: 20_000,
            max_restarts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `objective` starting from `start`, with initial per-coordinate
/// steps `step`.
pub fn minimize<F>(
    mut objective: F,
    start: &[f64],
    step: &[f64],
    options: SimplexOptions,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(
        start.len(),
        step.len(),
        "start and step must have equal length"
    );
    let mut evaluations = 0usize;
    let mut best = start.to_vec();
    let mut best_value = {
        evaluations += 1;
        objective(start)
    };
    let mut converged = false;

    for round in 0..=options.max_restarts {
        let scale = if round == 0 { 1.0 } else { 1e-3 };
        let steps: Vec<f64> = step.iter().map(|s| s * scale).collect();
        let run = run_simplex(&mut objective, &best, &steps, &options, &mut evaluations);
        converged = run.converged;
        let improved = run.value < best_value;
        if run.value <= best_value {
            best = run.x;
            best_value = run.value;
        }
        if !improved && round > 0 || evaluations >= options.max_evaluations {
            break;
        }
    }

    SimplexResult {
        x: best,
        value: best_value,
        evaluations,
        converged,
    }
}

fn run_simplex<F>(
    objective: &mut F,
    start: &[f64],
    step: &[f64],
    options: &SimplexOptions,
    evaluations: &mut usize,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    vertices.push(start.to_vec());
    values.push(eval(start, evaluations));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step[i];
        let mut f = eval(&v, evaluations);
        if !f.is_finite() {
            // Try the mirrored step when the first lands outside the feasible region.
            v[i] = start[i] - step[i];
            f = eval(&v, evaluations);
        }
        vertices.push(v);
        values.push(f);
    }

    let mut converged = false;
    while *evaluations < options.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.iter().map(|&i| vertices[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if simplex_is_small(&vertices, options.rel_tol) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| vertices[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(REFLECT);
        let f_r = eval(&reflected, evaluations);
        if f_r < values[0] {
            let expanded = along(REFLECT * EXPAND);
            let f_e = eval(&expanded, evaluations);
            if f_e < f_r {
                vertices[n] = expanded;
                values[n] = f_e;
            } else {
                vertices[n] = reflected;
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            vertices[n] = reflected;
            values[n] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[n] {
            let c = along(REFLECT * CONTRACT);
            let f = eval(&c, evaluations);
            (c, f)
        } else {
            let c = along(-CONTRACT);
            let f = eval(&c, evaluations);
            (c, f)
        };
        if f_c < values[n].min(f_r) {
            vertices[n] = contracted;
            values[n] = f_c;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = vertices[0]
                .iter()
                .zip(&vertices[i])
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            values[i] = eval(&shrunk, evaluations);
            vertices[i] = shrunk;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    SimplexResult {
        x: vertices[best].clone(),
        value: values[best],
        evaluations: *evaluations,
        converged,
    }
}

fn simplex_is_small(vertices: &[Vec<f64>], rel_tol: f64) -> bool {
    let best = &vertices[0];
    vertices[1..].iter().all(|v| {
        v.iter()
            .zip(best)
            .all(|(a, b)| (a - b).abs() <= rel_tol * b.abs().max(1.0))
    })
}
