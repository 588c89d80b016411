//! Numerical search for SIC-POVMs.
//!
//! Two objectives are provided.
//!
//! * The frame potential of a fiducial `psi`,
//!   `F(psi) = sum_p |<psi|D_p|psi>|^4 / |psi|^8 >= 2d/(d+1)`, with equality
//!   exactly when the orbit of `psi` is a SIC. Writing
//!   `x_p = |<psi|D_p|psi>|^2 / |psi|^4`, the gap is
//!   `F - 2d/(d+1) = sum_{p != 0} (x_p - 1/(d+1))^2`.
//! * The phase objective of a [`PhaseVector`],
//!   `Re sum s_{p+q} tau^<p,q> exp(i(theta_p + theta_q - theta_{p⊕q}))`
//!   over `p, q, p⊕q` all non-zero. It equals `(d+1)^(3/2) Tr(B^3)/d` for
//!   the generating vector `B`, is at most `(d-1)(d-2)(d+1)^(3/2)`, and
//!   attains that bound exactly when `B` is a pure-state Bloch vector.
//!
//! Each restart runs L-BFGS on the smooth objective and then a Gauss-Newton
//! polish on the residual form of the same condition, which is what brings
//! certified candidates down to rounding level.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{identity, outer, CMatrix, CVector};
use crate::optimize::{gauss_newton, lbfgs, LbfgsOptions};
use crate::povm::{verify_si, Povm, SiReport};
use crate::wh_covariant::{covariant_si_povm, generating_vector, PhaseChart, PhaseVector};
use crate::wh_group::GroupContext;
use crate::{Error, Result};

/// A unit vector with its global phase fixed: the first component of
/// modulus above `1e-12` is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial {
    psi: CVector,
}

impl Fiducial {
    /// Normalizes and canonicalizes `psi`. A vector already in canonical
    /// form is returned unchanged.
    pub fn new(psi: CVector) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::InvalidDimension(psi.len()));
        }
        let n = psi.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroVector);
        }
        let mut psi = if (n - 1.0).abs() <= 4.0 * f64::EPSILON { psi } else { psi.unscale(n) };
        if let Some(lead) = psi.iter().find(|z| z.norm() > 1e-12).copied() {
            if lead.im == 0.0 && lead.re > 0.0 {
                return Ok(Self { psi });
            }
            let phase = lead.conj() / lead.norm();
            psi.iter_mut().for_each(|z| *z *= phase);
        }
        Ok(Self { psi })
    }

    pub fn psi(&self) -> &CVector {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    fn from_real(x: &[f64]) -> Result<Self> {
        let d = x.len() / 2;
        Self::new(CVector::from_fn(d, |i, _| Complex64::new(x[i], x[d + i])))
    }
}

/// `2d/(d+1)`.
pub fn frame_potential_bound(d: usize) -> f64 {
    2.0 * d as f64 / (d as f64 + 1.0)
}

/// `(d-1)(d-2)(d+1)^(3/2)`.
pub fn phase_objective_bound(d: usize) -> f64 {
    let df = d as f64;
    (df - 1.0) * (df - 2.0) * (df + 1.0).powf(1.5)
}

/// Overlaps `<psi|D_p|psi>` and the vectors `D_p psi`, `D_p† psi`.
fn orbit_data(ctx: &GroupContext, psi: &CVector) -> Vec<(Complex64, CVector, CVector)> {
    ctx.points()
        .map(|p| {
            let dp = ctx.apply(p, psi);
            let dpa = ctx.apply_adjoint(p, psi);
            (psi.dotc(&dp), dp, dpa)
        })
        .collect()
}

/// `sum_p |<psi|D_p|psi>|^4` for a unit vector.
pub fn frame_potential(fiducial: &Fiducial) -> f64 {
    let ctx = GroupContext::new(fiducial.dim()).expect("fiducial dimension is at least 2");
    frame_potential_of(&ctx, fiducial.psi()).0
}

fn real_to_complex(x: &[f64]) -> CVector {
    let d = x.len() / 2;
    CVector::from_fn(d, |i, _| Complex64::new(x[i], x[d + i]))
}

fn complex_to_real(v: &CVector) -> Vec<f64> {
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

/// Normalized frame potential `N/|psi|^8` of an arbitrary non-zero vector
/// and its gradient with respect to `(Re psi, Im psi)`.
///
/// The gradient is `2 df/d(conj psi)` with
/// `d|c_p|^2/d(conj psi) = conj(c_p) D_p psi + c_p D_p† psi`.
pub fn frame_potential_of(ctx: &GroupContext, psi: &CVector) -> (f64, CVector) {
    let n = psi.norm_squared();
    let mut total = 0.0;
    let mut grad = CVector::zeros(psi.len());
    for (c, dp, dpa) in orbit_data(ctx, psi) {
        let m = c.norm_sqr();
        total += m * m;
        grad += (dp * c.conj() + dpa * c) * Complex64::new(2.0 * m, 0.0);
    }
    let n4 = n.powi(4);
    let value = total / n4;
    let grad = (grad.unscale(n4) - psi.scale(4.0 * total / (n4 * n))).scale(2.0);
    (value, grad)
}

/// Real form of [`frame_potential_of`] for the optimizer.
pub fn frame_potential_real(ctx: &GroupContext, x: &[f64]) -> (f64, Vec<f64>) {
    let (v, g) = frame_potential_of(ctx, &real_to_complex(x));
    (v, complex_to_real(&g))
}

/// Residuals `|c_p|^2/|psi|^4 - 1/(d+1)` for `p != 0` and their Jacobian
/// with respect to `(Re psi, Im psi)`.
fn overlap_residuals(ctx: &GroupContext, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let psi = real_to_complex(x);
    let d = psi.len();
    let n = psi.norm_squared();
    let target = 1.0 / (d as f64 + 1.0);
    let data = orbit_data(ctx, &psi);
    let m = data.len() - 1;
    let mut r = DVector::zeros(m);
    let mut jac = DMatrix::zeros(m, 2 * d);
    for (row, (c, dp, dpa)) in data.into_iter().skip(1).enumerate() {
        let a = c.norm_sqr();
        r[row] = a / (n * n) - target;
        let g = ((dp * c.conj() + dpa * c).unscale(n * n) - psi.scale(2.0 * a / (n * n * n))).scale(2.0);
        for i in 0..d {
            jac[(row, i)] = g[i].re;
            jac[(row, d + i)] = g[i].im;
        }
    }
    (r, jac)
}

/// The phase objective, a direct `O(d^4)` sum.
pub fn phase_objective(phi: &PhaseVector) -> f64 {
    phase_objective_with_gradient(phi).0
}

/// Phase objective and its gradient with respect to every `theta_q`
/// (entry `q.flat(d)`), treating all angles as independent.
pub fn phase_objective_with_gradient(phi: &PhaseVector) -> (f64, Vec<f64>) {
    let ctx = phi.ctx();
    let d = ctx.dim();
    let mut total = Complex64::new(0.0, 0.0);
    let mut grad = vec![0.0; d * d];
    for p in ctx.nonzero_points() {
        let pp = p.as_pair();
        for q in ctx.nonzero_points() {
            let pq = ctx.add(p, q);
            if pq.is_origin() {
                continue;
            }
            let qq = q.as_pair();
            let sign = ctx.sign((pp.0 + qq.0, pp.1 + qq.1)) as f64;
            let angle = phi.theta(p) + phi.theta(q) - phi.theta(pq);
            let term = ctx.tau_pow(crate::wh_group::symplectic(pp, qq)) * Complex64::from_polar(sign, angle);
            total += term;
            grad[p.flat(d)] -= term.im;
            grad[q.flat(d)] -= term.im;
            grad[pq.flat(d)] += term.im;
        }
    }
    (total.re, grad)
}

/// Phase objective as a function of the continuous chart coordinates, with
/// the binary choices held fixed, and its gradient.
pub fn phase_objective_chart(ctx: &GroupContext, free: &[f64], choices: &[bool]) -> (f64, Vec<f64>) {
    let phi = PhaseVector::from_chart(ctx, free, choices).expect("chart lengths match");
    let (value, full) = phase_objective_with_gradient(&phi);
    let d = ctx.dim();
    let chart = PhaseChart::new(ctx);
    // theta_q̄ = const - theta_q, so the partner contributes with a minus sign.
    let grad = chart
        .continuous
        .iter()
        .map(|&q| full[q.flat(d)] - full[ctx.neg(q).flat(d)])
        .collect();
    (value, grad)
}

/// Purity residual `B^2 - (d-2)B - (d-1)` of the generating vector, which
/// vanishes exactly when `B` has spectrum `{d-1, -1, ..., -1}`, and its
/// Jacobian in the chart.
fn purity_residuals(ctx: &GroupContext, free: &[f64], choices: &[bool]) -> (DVector<f64>, DMatrix<f64>) {
    let d = ctx.dim();
    let df = d as f64;
    let phi = PhaseVector::from_chart(ctx, free, choices).expect("chart lengths match");
    let b = generating_vector(&phi).into_matrix();
    let res = &b * &b - b.scale(df - 2.0) - identity(d).scale(df - 1.0);
    let chart = PhaseChart::new(ctx);
    let coeffs = phi.coefficients();
    let i = Complex64::new(0.0, 1.0);
    let mut jac = DMatrix::zeros(2 * d * d, chart.continuous.len());
    for (col, &q) in chart.continuous.iter().enumerate() {
        let qbar = ctx.neg(q);
        let db = ctx.displacement(q) * (i * coeffs.get(q)) - ctx.displacement(qbar) * (i * coeffs.get(qbar));
        let dr = &b * &db + &db * &b - db.scale(df - 2.0);
        for (k, z) in dr.iter().enumerate() {
            jac[(k, col)] = z.re;
            jac[(d * d + k, col)] = z.im;
        }
    }
    let r = DVector::from_iterator(2 * d * d, res.iter().map(|z| z.re).chain(res.iter().map(|z| z.im)));
    (r, jac)
}

/// `{(1/d) D_p |psi><psi| D_p†}` with its certificate.
pub fn sic_from_fiducial(fiducial: &Fiducial) -> Result<(Povm, SiReport)> {
    let ctx = GroupContext::new(fiducial.dim())?;
    let d = fiducial.dim() as f64;
    let elements = ctx
        .points()
        .map(|p| outer(&ctx.apply(p, fiducial.psi())).unscale(d))
        .collect();
    let povm = Povm::new(elements, &ctx)?;
    let report = verify_si(&povm);
    Ok((povm, report))
}

/// The qubit SIC fiducial: the `+1` eigenvector of
/// `(sigma_x - sigma_y + sigma_z)/sqrt(3)`.
pub fn qubit_sic_fiducial() -> Fiducial {
    let s3 = 3.0_f64.sqrt();
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0 / s3, 0.0),
            Complex64::new(1.0 / s3, 1.0 / s3),
            Complex64::new(1.0 / s3, -1.0 / s3),
            Complex64::new(-1.0 / s3, 0.0),
        ],
    );
    // Any non-zero column of (1 + m)/2 spans the +1 eigenspace.
    let proj = (identity(2) + m).scale(0.5);
    Fiducial::new(proj.column(0).into_owned()).expect("projector column is non-zero")
}

/// All-zero phases at `d = 2`; their generator is a pure state.
pub fn qubit_sic_phases() -> PhaseVector {
    PhaseVector::zeros(&GroupContext::new(2).expect("d = 2")).expect("zero phases are valid at d = 2")
}

/// All-`pi` phases at `d = 3`; they attain the phase-objective bound.
pub fn qutrit_sic_phases() -> PhaseVector {
    PhaseVector::constant(&GroupContext::new(3).expect("d = 3"), PI).expect("constant phases are valid for odd d")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    FramePotential,
    PhaseObjective,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub dimension: usize,
    pub method: SearchMethod,
    pub restarts: usize,
    /// L-BFGS iteration cap per restart.
    pub max_iterations: usize,
    pub seed: u64,
    /// Acceptance threshold on `|objective - bound|`.
    pub tolerance: f64,
}

impl SearchConfig {
    /// Defaults: 20 restarts, 1000 iterations, tolerance `1e-9` for the
    /// frame potential and `1e-8 d^3` for the phase objective.
    pub fn new(dimension: usize, method: SearchMethod) -> Self {
        Self {
            dimension,
            method,
            restarts: 20,
            max_iterations: 1000,
            seed: 0,
            tolerance: default_tolerance(dimension, method),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidDimension(self.dimension));
        }
        if self.restarts == 0 {
            return Err(Error::Invalid("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        Ok(())
    }
}

pub fn default_tolerance(d: usize, method: SearchMethod) -> f64 {
    match method {
        SearchMethod::FramePotential => 1e-9,
        SearchMethod::PhaseObjective => 1e-8 * (d as f64).powi(3),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchParameters {
    Fiducial(Fiducial),
    Phases(PhaseVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_parameters: SearchParameters,
    pub objective_value: f64,
    /// `|objective_value - bound|`.
    pub residual: f64,
    /// Residual within tolerance and the candidate POVM certified as a
    /// rank-one SIC.
    pub certified: bool,
    /// L-BFGS plus polish iterations of the returned restart.
    pub iterations_used: usize,
    /// Restarts run before the search stopped.
    pub restarts_used: usize,
    /// Index of the returned restart.
    pub best_restart: usize,
    pub seed_used: u64,
    pub report: SiReport,
    pub povm: Povm,
}

struct Outcome {
    params: SearchParameters,
    value: f64,
    residual: f64,
    certified: bool,
    iterations: usize,
    report: SiReport,
    povm: Povm,
}

// Restarts run in batches of this size; the accepted restart is always the
// lowest-index certified one, so the batch size does not affect the result.
const BATCH: usize = 8;

/// Multi-start local search. Restart `k` draws its start from ChaCha8 seeded
/// with `config.seed` on stream `k`. Returns the lowest-index certified
/// restart, otherwise the smallest residual (ties to the lower index).
pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let ctx = GroupContext::new(config.dimension)?;
    let mut outcomes: Vec<Outcome> = Vec::new();
    let mut start = 0;
    while start < config.restarts {
        let end = (start + BATCH).min(config.restarts);
        let batch: Vec<Outcome> = (start..end)
            .into_par_iter()
            .map(|k| run_restart(&ctx, config, k as u64))
            .collect();
        outcomes.extend(batch);
        if outcomes.iter().any(|o| o.certified) {
            break;
        }
        start = end;
    }
    let restarts_used = outcomes.len();
    let best_restart = match outcomes.iter().position(|o| o.certified) {
        Some(k) => k,
        None => outcomes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual).then(a.0.cmp(&b.0)))
            .map(|(k, _)| k)
            .expect("at least one restart"),
    };
    let best = outcomes.swap_remove(best_restart);
    Ok(SearchResult {
        best_parameters: best.params,
        objective_value: best.value,
        residual: best.residual,
        certified: best.certified,
        iterations_used: best.iterations,
        restarts_used,
        best_restart,
        seed_used: config.seed,
        report: best.report,
        povm: best.povm,
    })
}

fn restart_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn run_restart(ctx: &GroupContext, config: &SearchConfig, k: u64) -> Outcome {
    let mut rng = restart_rng(config.seed, k);
    let opts = LbfgsOptions {
        max_iterations: config.max_iterations,
        ..LbfgsOptions::default()
    };
    let d = ctx.dim();
    match config.method {
        SearchMethod::FramePotential => {
            let x0: Vec<f64> = (0..2 * d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x0: Vec<f64> = x0.iter().map(|v| v / norm).collect();
            let min = lbfgs(
                |x| frame_potential_real(ctx, x),
                &x0,
                &LbfgsOptions {
                    keep_unit_norm: true,
                    ..opts
                },
            );
            let polish = gauss_newton(|x| overlap_residuals(ctx, x), &min.x, 50);
            let fiducial = Fiducial::from_real(&polish.x).expect("iterate stays non-zero");
            let value = frame_potential_of(ctx, fiducial.psi()).0;
            let residual = (value - frame_potential_bound(d)).abs();
            let (povm, report) = sic_from_fiducial(&fiducial).expect("dimension already checked");
            Outcome {
                certified: residual <= config.tolerance && report.is_rank_one_sic,
                params: SearchParameters::Fiducial(fiducial),
                value,
                residual,
                iterations: min.iterations + polish.iterations,
                report,
                povm,
            }
        }
        SearchMethod::PhaseObjective => {
            let start = PhaseVector::random(ctx, &mut rng);
            let (free0, choices) = start.to_chart();
            let min = lbfgs(
                |x| {
                    let (v, g) = phase_objective_chart(ctx, x, &choices);
                    (-v, g.into_iter().map(|v| -v).collect())
                },
                &free0,
                &opts,
            );
            let polish = gauss_newton(|x| purity_residuals(ctx, x, &choices), &min.x, 50);
            let phi = PhaseVector::from_chart(ctx, &polish.x, &choices).expect("chart lengths match");
            let value = phase_objective(&phi);
            let residual = (value - phase_objective_bound(d)).abs();
            let povm = covariant_si_povm(&phi).povm;
            let report = verify_si(&povm);
            Outcome {
                certified: residual <= config.tolerance && report.is_rank_one_sic,
                params: SearchParameters::Phases(phi),
                value,
                residual,
                iterations: min.iterations + polish.iterations,
                report,
                povm,
            }
        }
    }
}
