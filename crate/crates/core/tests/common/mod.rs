//! Dense reference implementations and random inputs shared by the
//! integration tests. Nothing here goes through the library's coefficient
//! machinery.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type M = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `-exp(i pi / d)`.
pub fn tau(d: usize) -> Complex64 {
    -Complex64::from_polar(1.0, PI / d as f64)
}

pub fn shift(d: usize) -> M {
    M::from_fn(d, d, |i, j| if i == (j + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn clock(d: usize) -> M {
    let t = tau(d);
    M::from_fn(d, d, |i, j| if i == j { t.powi(2 * i as i32) } else { c(0.0, 0.0) })
}

fn mat_pow(m: &M, k: i64) -> M {
    let d = m.nrows();
    let base = if k >= 0 { m.clone() } else { m.adjoint() };
    let mut out = M::identity(d, d);
    for _ in 0..k.unsigned_abs() {
        out = &out * &base;
    }
    out
}

/// `tau^(p1 p2) S^p1 T^p2` by repeated multiplication, for any integers.
pub fn displacement(d: usize, p1: i64, p2: i64) -> M {
    let phase = tau(d).powi((p1 * p2) as i32);
    (mat_pow(&shift(d), p1) * mat_pow(&clock(d), p2)).map(|z| z * phase)
}

pub fn tr(m: &M) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn gaussian_matrix<R: Rng>(d: usize, rng: &mut R) -> M {
    M::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> M {
    let g = gaussian_matrix(d, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Full-rank random density matrix `G G† / Tr(G G†)`.
pub fn random_density<R: Rng>(d: usize, rng: &mut R) -> M {
    let g = gaussian_matrix(d, rng);
    let rho = &g * g.adjoint();
    let t = tr(&rho).re;
    rho.unscale(t)
}

pub fn random_unit_vector<R: Rng>(d: usize, rng: &mut R) -> nalgebra::DVector<Complex64> {
    let v = nalgebra::DVector::from_fn(d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v.unscale(n)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &M) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `Tr(A B)/(d(d-1))`.
pub fn bloch_inner(a: &M, b: &M) -> f64 {
    let d = a.nrows() as f64;
    tr(&(a * b)).re / (d * (d - 1.0))
}
