//! Local optimizers used by the SIC search: limited-memory BFGS for the
//! smooth objectives and a Gauss-Newton polish on the residual form of the
//! same conditions.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub max_iterations: usize,
    /// Stop once the largest gradient component falls below this.
    pub gradient_tolerance: f64,
    /// Number of stored correction pairs.
    pub memory: usize,
    /// Renormalize the iterate to unit length when its norm leaves
    /// `[1/2, 2]`. Only meaningful for scale-invariant objectives.
    pub keep_unit_norm: bool,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            gradient_tolerance: 1e-13,
            memory: 8,
            keep_unit_norm: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f`, which returns the value and gradient at a point.
pub fn lbfgs<F>(mut f: F, x0: &[f64], opts: &LbfgsOptions) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;

    while iterations < opts.max_iterations && inf_norm(&g) > opts.gradient_tolerance {
        iterations += 1;

        // Two-loop recursion for the search direction.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = match history.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / dot(&g, &g).sqrt().max(1e-300),
        };
        q.iter_mut().for_each(|qi| *qi *= gamma);
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&g, &dir);
        }

        // Backtracking line search with the Armijo condition.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((mut xn, mut fn_, mut gn)) = accepted else {
            if history.is_empty() {
                break;
            }
            history.clear();
            continue;
        };

        if opts.keep_unit_norm {
            let norm = dot(&xn, &xn).sqrt();
            if !(0.5..=2.0).contains(&norm) {
                xn.iter_mut().for_each(|v| *v /= norm);
                let (fr, gr) = f(&xn);
                fn_ = fr;
                gn = gr;
                history.clear();
                x = xn;
                fx = fn_;
                g = gn;
                continue;
            }
        }

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let stalled = (fx - fn_).abs() <= f64::EPSILON * fx.abs().max(1e-300) && step < 1e-6;
        x = xn;
        fx = fn_;
        g = gn;
        if stalled {
            break;
        }
    }
    debug_assert_eq!(x.len(), n);
    Minimum {
        x,
        value: fx,
        iterations,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// Euclidean norm of the residual vector at `x`.
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Gauss-Newton iteration on `r(x) = 0` with pseudo-inverse steps, so that
/// rank-deficient Jacobians (gauge directions) are handled. Keeps the best
/// point seen; stops when a step no longer reduces `|r|`.
pub fn gauss_newton<F>(mut f: F, x0: &[f64], max_iterations: usize) -> LeastSquares
where
    F: FnMut(&[f64]) -> (DVector<f64>, DMatrix<f64>),
{
    let mut x = x0.to_vec();
    let (mut r, mut jac) = f(&x);
    let mut norm = r.norm();
    let mut iterations = 0;
    while iterations < max_iterations && norm > 1e-15 {
        iterations += 1;
        let svd = jac.clone().svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let Ok(dx) = svd.solve(&r, 1e-10 * smax.max(1e-300)) else {
            break;
        };
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a - step * b).collect();
            let (rt, jt) = f(&trial);
            let nt = rt.norm();
            if nt.is_finite() && nt < norm {
                x = trial;
                r = rt;
                jac = jt;
                norm = nt;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    LeastSquares {
        x,
        residual_norm: norm,
        iterations,
    }
}
