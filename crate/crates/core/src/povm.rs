//! POVMs, their SI certificate, and linear-inversion tomography.
//!
//! Any POVM with non-zero elements can be written `E_r = (t_r/d)(1 + B_r)`
//! with `t_r = Tr(E_r)` and `B_r` in the Bloch body. A POVM with `n`
//! elements is symmetric and informationally complete exactly when
//! `n = d^2`, every `t_r = 1/d`, and the Bloch vectors form a regular
//! simplex of squared radius `kappa^2` with `0 < kappa <= 1`:
//!
//! ```text
//! <B_r, B_s> = kappa^2            (r = s)
//!            = -kappa^2/(d^2 - 1) (r != s)
//! ```
//!
//! The Gram matrix of such a simplex has one zero eigenvalue and `d^2 - 1`
//! eigenvalues equal to `kappa^2 d^2/(d^2 - 1)`. [`verify_si`] measures how
//! far a candidate is from every one of these conditions and reports the
//! residuals next to the verdicts. `kappa = 1` is the rank-one (SIC) case.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bloch::{shrink_factor, BlochElement};
use crate::gell_mann;
use crate::linalg::{
    check_square, hermitian_deviation, hermitian_eigenvalues, identity, trace, trace_of_product,
    CMatrix, CVector,
};
use crate::wh_group::GroupContext;
use crate::{Error, Result};

/// Minimum eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Base tolerance for the identity-sum, symmetry, trace and spectrum
/// residuals; multiplied by `d`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Largest magnitude allowed for the vanishing eigenvalues of a rank-one
/// element.
pub const RANK_ONE_TOL: f64 = 1e-9;

/// An ordered list of `d x d` operators.
///
/// Construction only checks shapes. Whether the operators are positive and
/// resolve the identity is part of the certificate returned by
/// [`verify_si`], so that near-misses can be measured instead of rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
    ctx: GroupContext,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>, ctx: &GroupContext) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("a POVM needs at least one element"));
        }
        for e in &elements {
            check_square(e, ctx.dim())?;
        }
        Ok(Self {
            elements,
            ctx: ctx.clone(),
        })
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// Bloch vectors `B_r = (d/t_r) E_r - 1`.
    pub fn bloch_vectors(&self) -> Result<Vec<BlochElement>> {
        let d = self.dim();
        self.elements
            .iter()
            .map(|e| {
                let t = trace(e).re;
                if t.abs() < 1e-300 {
                    return Err(Error::ZeroMatrix);
                }
                BlochElement::new(e.scale(d as f64 / t) - identity(d), &self.ctx)
            })
            .collect()
    }
}

/// Certificate produced by [`verify_si`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiReport {
    pub n: usize,
    pub dimension: usize,
    /// Elements Hermitian, positive semidefinite, non-zero, summing to 1.
    pub is_povm: bool,
    pub min_eigenvalue: f64,
    pub identity_residual: f64,
    /// `Tr(E_r E_s) = alpha + beta δ_rs` within tolerance.
    pub is_symmetric: bool,
    pub alpha: f64,
    pub beta: f64,
    pub symmetry_residual: f64,
    /// Square root of the mean squared Bloch norm.
    pub kappa: f64,
    /// `max_r |Tr(E_r) - 1/d|`.
    pub trace_residual: f64,
    /// Numerical rank of the element Gram matrix `Tr(E_r E_s)`.
    pub gram_rank: usize,
    /// Distance of the Bloch Gram spectrum from `{0, kappa^2 n/(n-1)}`.
    pub gram_spectrum_residual: f64,
    pub is_informationally_complete: bool,
    /// The full SI certificate holds.
    pub is_si: bool,
    pub is_rank_one_sic: bool,
    /// `max_r` distance of the spectrum of `d E_r` from a rank-one projector.
    pub rank_one_residual: f64,
    /// `max_{r,s} |Tr(P_r P_s) - (1 + d δ_rs)/(d + 1)|` with `P_r = d E_r`.
    pub sic_overlap_deviation: f64,
    /// Largest of the residuals entering the SI verdict.
    pub max_residual: f64,
}

/// Checks the SI conditions and the rank-one SIC overlap condition at the
/// default tolerance [`RESIDUAL_TOL`].
pub fn verify_si(povm: &Povm) -> SiReport {
    verify_si_with_tolerance(povm, RESIDUAL_TOL)
}

/// [`verify_si`] with a different base tolerance for the residuals (still
/// multiplied by `d`).
pub fn verify_si_with_tolerance(povm: &Povm, base_tol: f64) -> SiReport {
    let d = povm.dim();
    let df = d as f64;
    let n = povm.len();
    let nf = n as f64;
    let tol = base_tol * df;

    // POVM structure.
    let mut min_eigenvalue = f64::INFINITY;
    let mut herm = 0.0_f64;
    let mut sum = CMatrix::zeros(d, d);
    let mut spectra = Vec::with_capacity(n);
    for e in povm.elements() {
        herm = herm.max(hermitian_deviation(e));
        let ev = hermitian_eigenvalues(e);
        min_eigenvalue = min_eigenvalue.min(ev[0]);
        spectra.push(ev);
        sum += e;
    }
    let identity_residual = crate::linalg::max_abs_diff(&sum, &identity(d));
    let traces: Vec<f64> = povm.elements().iter().map(|e| trace(e).re).collect();
    let nonzero = traces.iter().all(|&t| t > PSD_TOL);
    let is_povm = herm <= tol && min_eigenvalue >= -PSD_TOL && nonzero && identity_residual <= tol;

    // Pairwise traces Tr(E_r E_s) via one Gram product of the flattened elements.
    let flat = DMatrix::from_fn(n, d * d, |r, k| povm.elements()[r][(k / d, k % d)]);
    let gram_c = &flat * flat.adjoint();
    let gram = gram_c.map(|z| z.re);

    let diag_mean = (0..n).map(|r| gram[(r, r)]).sum::<f64>() / nf;
    let alpha = if n > 1 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&s| s != r).map(move |s| (r, s)))
            .map(|(r, s)| gram[(r, s)])
            .sum();
        off / (nf * (nf - 1.0))
    } else {
        0.0
    };
    let beta = diag_mean - alpha;
    let mut symmetry_residual = 0.0_f64;
    for r in 0..n {
        for s in 0..n {
            let model = alpha + if r == s { beta } else { 0.0 };
            symmetry_residual = symmetry_residual.max((gram[(r, s)] - model).abs());
        }
    }
    let is_symmetric = symmetry_residual <= tol;

    let trace_residual = traces
        .iter()
        .map(|t| (t - 1.0 / df).abs())
        .fold(0.0, f64::max);

    // Element Gram rank decides informational completeness.
    let gram_ev = gram.clone().symmetric_eigenvalues();
    let top = gram_ev.iter().copied().fold(0.0, f64::max);
    let gram_rank = gram_ev.iter().filter(|&&x| x > 1e-9 * top).count();
    let is_informationally_complete = top > 0.0 && gram_rank == d * d;

    // Bloch Gram: <B_r, B_s> = (d G_rs/(t_r t_s) - 1)/(d - 1).
    let safe_t: Vec<f64> = traces.iter().map(|&t| if t.abs() > 1e-300 { t } else { 1e-300 }).collect();
    let bloch_gram = DMatrix::from_fn(n, n, |r, s| {
        (df * gram[(r, s)] / (safe_t[r] * safe_t[s]) - 1.0) / (df - 1.0)
    });
    let kappa_sq = (0..n).map(|r| bloch_gram[(r, r)]).sum::<f64>() / nf;
    let kappa = kappa_sq.max(0.0).sqrt();
    let mut bloch_ev: Vec<f64> = bloch_gram.symmetric_eigenvalues().iter().copied().collect();
    bloch_ev.sort_by(f64::total_cmp);
    let target = if n > 1 { kappa_sq * nf / (nf - 1.0) } else { 0.0 };
    let gram_spectrum_residual = bloch_ev
        .iter()
        .enumerate()
        .map(|(i, &x)| if i == 0 { x.abs() } else { (x - target).abs() })
        .fold(0.0, f64::max);

    let kappa_ok = kappa > tol && kappa <= 1.0 + tol;
    let is_si = is_povm
        && n == d * d
        && is_symmetric
        && trace_residual <= tol
        && gram_spectrum_residual <= tol
        && kappa_ok
        && is_informationally_complete;

    // Rank-one SIC: d E_r are rank-one projectors with overlaps (1 + d δ)/(d+1).
    let rank_one_residual = spectra
        .iter()
        .map(|ev| {
            let k = ev.len();
            let lead = (ev[k - 1] * df - 1.0).abs() / df;
            ev[..k - 1].iter().map(|x| x.abs()).fold(lead, f64::max)
        })
        .fold(0.0, f64::max);
    let mut sic_overlap_deviation = 0.0_f64;
    for r in 0..n {
        for s in 0..n {
            let expected = if r == s { 1.0 } else { 1.0 / (df + 1.0) };
            sic_overlap_deviation = sic_overlap_deviation.max((df * df * gram[(r, s)] - expected).abs());
        }
    }
    let is_rank_one_sic = is_si
        && rank_one_residual <= RANK_ONE_TOL
        && sic_overlap_deviation <= tol
        && (kappa - 1.0).abs() <= tol;

    let max_residual = [identity_residual, symmetry_residual, trace_residual, gram_spectrum_residual]
        .into_iter()
        .fold(0.0, f64::max);

    SiReport {
        n,
        dimension: d,
        is_povm,
        min_eigenvalue,
        identity_residual,
        is_symmetric,
        alpha,
        beta,
        symmetry_residual,
        kappa,
        trace_residual,
        gram_rank,
        gram_spectrum_residual,
        is_informationally_complete,
        is_si,
        is_rank_one_sic,
        rank_one_residual,
        sic_overlap_deviation,
        max_residual,
    }
}

/// Vertices of a regular simplex with `n` unit vectors in `R^(n-1)`,
/// pairwise inner product `-1/(n-1)`.
///
/// Vertex `i` is the centered basis vector `e_i - (1/n)(1, ..., 1)` written
/// in the Helmert basis of the hyperplane orthogonal to `(1, ..., 1)`, then
/// scaled to unit length.
pub fn canonical_simplex(n: usize) -> Vec<Vec<f64>> {
    let scale = (n as f64 / (n as f64 - 1.0)).sqrt();
    (0..n)
        .map(|i| {
            (1..n)
                .map(|k| {
                    let h = 1.0 / ((k * (k + 1)) as f64).sqrt();
                    let c = match i.cmp(&k) {
                        std::cmp::Ordering::Less => h,
                        std::cmp::Ordering::Equal => -(k as f64) * h,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                    c * scale
                })
                .collect()
        })
        .collect()
}

/// Haar-random orthogonal matrix: the `Q` factor of a Gaussian matrix with
/// the column signs fixed by `sign(R_ii)`.
pub fn random_orthogonal<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// A `d^2`-element SI-POVM from a randomly rotated regular simplex in
/// `su(d)`, shrunk by [`shrink_factor`] until every vertex is a Bloch
/// vector. Deterministic in `(d, seed)`; the generator is ChaCha8.
pub fn random_si_povm(d: usize, seed: u64) -> Result<Povm> {
    let ctx = GroupContext::new(d)?;
    let n = d * d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(n - 1, &mut rng);
    let basis = gell_mann::basis(d);
    let vertices = canonical_simplex(n)
        .into_iter()
        .map(|v| {
            let rotated = &q * DVector::from_vec(v);
            BlochElement::new(gell_mann::combine(&basis, rotated.as_slice()), &ctx)
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = shrink_factor(&vertices)?;
    let scale = 1.0 / (n as f64);
    let elements = vertices
        .iter()
        .map(|b| (identity(d) + b.matrix().scale(kappa)).scale(scale))
        .collect();
    Povm::new(elements, &ctx)
}

/// Outcome probabilities `Tr(E_r rho)`.
pub fn probabilities(povm: &Povm, rho: &CMatrix) -> Result<Vec<f64>> {
    check_square(rho, povm.dim())?;
    Ok(povm
        .elements()
        .iter()
        .map(|e| trace_of_product(e, rho).re)
        .collect())
}

/// Raw linear-inversion estimate; positivity is reported, not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub rho: CMatrix,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

/// Least-squares solution of `Tr(E_r rho) = p_r` over Hermitian unit-trace
/// `rho`.
///
/// `rho` is parametrized as `1/d + sum_a x_a G_a` in the Gell-Mann chart, so
/// Hermiticity and the trace are exact and the system is real with `d^2 - 1`
/// unknowns. Fails when the elements do not span the operator space.
pub fn reconstruct_state(povm: &Povm, probs: &[f64]) -> Result<Reconstruction> {
    let d = povm.dim();
    let n = povm.len();
    if probs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: probs.len(),
        });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(total));
    }
    let basis = gell_mann::basis(d);
    let m = basis.len();
    let design = DMatrix::from_fn(n, m, |r, a| trace_of_product(&povm.elements()[r], &basis[a]).re);
    let rhs = DVector::from_fn(n, |r, _| probs[r] - trace(&povm.elements()[r]).re / d as f64);

    let svd = design.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    if smax == 0.0 || rank < m {
        return Err(Error::NotInformationallyComplete {
            rank: rank + 1,
            required: d * d,
        });
    }
    let x = svd
        .solve(&rhs, 1e-10 * smax)
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let rho = identity(d).unscale(d as f64) + gell_mann::combine(&basis, x.as_slice());
    let min_eigenvalue = hermitian_eigenvalues(&rho)[0];
    Ok(Reconstruction {
        rho,
        min_eigenvalue,
        is_psd: min_eigenvalue >= -PSD_TOL,
    })
}

/// A family of orthonormal bases of `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFamily {
    pub bases: Vec<Vec<CVector>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubReport {
    pub is_mub: bool,
    /// Larger of the two deviations below.
    pub max_deviation: f64,
    /// `max |(|<psi^r_a|psi^s_b>| - 1/sqrt(d))|` over `r != s`.
    pub overlap_deviation: f64,
    /// `max |<B^r_a, B^s_b>|` over `r != s`.
    pub bloch_deviation: f64,
}

const MUB_TOL: f64 = 1e-9;

/// Checks mutual unbiasedness, both as overlap moduli `1/sqrt(d)` and as
/// orthogonality of the Bloch simplices of different bases.
pub fn verify_mub(family: &BasisFamily) -> Result<MubReport> {
    if family.bases.len() < 2 {
        return Err(Error::Invalid("mutual unbiasedness needs at least two bases".into()));
    }
    let d = family.bases[0].len();
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    for (index, basis) in family.bases.iter().enumerate() {
        if basis.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                found: basis.len(),
            });
        }
        let mut deviation = 0.0_f64;
        for (a, u) in basis.iter().enumerate() {
            if u.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: u.len(),
                });
            }
            for (b, v) in basis.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                deviation = deviation.max((u.dotc(v) - Complex64::new(expected, 0.0)).norm());
            }
        }
        if deviation > MUB_TOL {
            return Err(Error::NotOrthonormal { index, deviation });
        }
    }
    let df = d as f64;
    let target = 1.0 / df.sqrt();
    let mut overlap_deviation = 0.0_f64;
    let mut bloch_deviation = 0.0_f64;
    for (r, br) in family.bases.iter().enumerate() {
        for bs in family.bases.iter().skip(r + 1) {
            for u in br {
                for v in bs {
                    let ov = u.dotc(v).norm();
                    overlap_deviation = overlap_deviation.max((ov - target).abs());
                    // <B_u, B_v> for B = d|psi><psi| - 1.
                    bloch_deviation = bloch_deviation.max(((df * ov * ov - 1.0) / (df - 1.0)).abs());
                }
            }
        }
    }
    let max_deviation = overlap_deviation.max(bloch_deviation);
    Ok(MubReport {
        is_mub: overlap_deviation <= MUB_TOL && bloch_deviation <= MUB_TOL,
        max_deviation,
        overlap_deviation,
        bloch_deviation,
    })
}
