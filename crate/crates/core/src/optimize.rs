//! Derivative-free simplex minimization.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Spread of function values across the simplex.
    pub f_tol: f64,
    /// Largest vertex distance from the best vertex (max-norm).
    pub x_tol: f64,
    pub max_evals: usize,
    /// Fresh simplices built around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-14,
            x_tol: 1e-10,
            max_evals: 20_000,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (reflect 1, expand 2, contract ½,
/// shrink ½). After each convergence the simplex is rebuilt around the best
/// point with the original step sizes scaled down; the run stops when a
/// restart fails to improve the value.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut evals = 0;
    let mut best = x0.to_vec();
    let mut best_val = eval(&mut f, &best, &mut evals);
    let mut converged = false;
    let mut scale = 1.0;
    for round in 0..=opts.restarts {
        let scaled: Vec<f64> = steps.iter().map(|s| s * scale).collect();
        let (x, v, ok) = simplex_run(&mut f, &best, &scaled, opts, &mut evals);
        let improved = v < best_val - opts.f_tol.max(1e-15 * best_val.abs());
        if v <= best_val {
            best = x;
            best_val = v;
        }
        converged = ok;
        if !ok || (round > 0 && !improved) {
            break;
        }
        scale *= 0.1;
    }
    Minimum {
        x: best,
        value: best_val,
        evals,
        converged,
    }
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], evals: &mut usize) -> f64 {
    *evals += 1;
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn simplex_run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    steps: &[f64],
    opts: &NelderMeadOptions,
    evals: &mut usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(f, p, evals)).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    loop {
        // Sort vertices by value.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[n] - vals[0];
        let size = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            return (pts.swap_remove(0), vals[0], true);
        }
        if *evals >= opts.max_evals {
            return (pts.swap_remove(0), vals[0], false);
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &pts[..n] {
            centroid.iter_mut().zip(p).for_each(|(c, x)| *c += x / n as f64);
        }
        let worst = pts[n].clone();
        along(&centroid, &worst, -1.0, &mut trial);
        let fr = eval(f, &trial, evals);
        if fr < vals[0] {
            along(&centroid, &worst, -2.0, &mut trial2);
            let fe = eval(f, &trial2, evals);
            if fe < fr {
                pts[n].copy_from_slice(&trial2);
                vals[n] = fe;
            } else {
                pts[n].copy_from_slice(&trial);
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n].copy_from_slice(&trial);
            vals[n] = fr;
        } else {
            let outside = fr < vals[n];
            let t = if outside { -0.5 } else { 0.5 };
            along(&centroid, &worst, t, &mut trial2);
            let fc = eval(f, &trial2, evals);
            if fc < vals[n].min(fr) {
                pts[n].copy_from_slice(&trial2);
                vals[n] = fc;
            } else {
                let head = pts[0].clone();
                for i in 1..=n {
                    for (x, b) in pts[i].iter_mut().zip(&head) {
                        *x = b + 0.5 * (*x - b);
                    }
                    vals[i] = eval(f, &pts[i], evals);
                }
            }
        }
    }
}

// out = c + t (w − c)
fn along(c: &[f64], w: &[f64], t: f64, out: &mut [f64]) {
    for ((o, a), b) in out.iter_mut().zip(c).zip(w) {
        *o = a + t * (b - a);
    }
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Returns `(argmax, max)` once the bracket is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> crate::Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> crate::Result<(f64, f64)> {
    let r = 0.5 * (crate::math::sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Vertex of the parabola through three points.
pub fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let d1 = (y[1] - y[0]) * (x[2] - x[1]);
    let d2 = (y[2] - y[1]) * (x[1] - x[0]);
    let num = (x[1] - x[0]) * (x[1] - x[0]) * (y[1] - y[2]) - (x[1] - x[2]) * (x[1] - x[2]) * (y[1] - y[0]);
    let den = (x[1] - x[0]) * (y[1] - y[2]) - (x[1] - x[2]) * (y[1] - y[0]);
    if den == 0.0 || d1 == d2 {
        return None;
    }
    Some(x[1] - 0.5 * num / den)
}
