//! Geometry of the Bloch body.
//!
//! Traceless Hermitian matrices form the real vector space `su(d)`, carrying
//! the rescaled inner product `<B1, B2> = Tr(B1 B2) / (d(d-1))`. A density
//! matrix is `rho = (1 + B) / d` for a unique `B` in the Bloch body
//! `{B in su(d) : B >= -1}`; pure states are exactly the Bloch vectors of
//! norm 1.
//!
//! For `B` on the unit sphere, with `-m_minus` and `m_plus` its extreme
//! eigenvalues:
//!
//! * `1 <= m_minus, m_plus <= d - 1`, and `m_minus = 1` iff `m_plus = d - 1`;
//! * `x B` is in the body iff `-1/m_plus <= x <= 1/m_minus`;
//! * `|Tr(B^3)| <= d(d-1)(d-2)`, with the upper bound attained iff `B` is a
//!   pure-state Bloch vector and the lower bound iff `-B` is.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::gell_mann;
use crate::linalg::{
    check_density, check_square, hermitian_deviation, hermitian_eigenvalues, identity, outer,
    trace, trace_of_product, CMatrix, CVector,
};
use crate::wh_group::GroupContext;
use crate::{Error, Result};

/// Tolerance for "on the outer sphere" and for the structural checks
/// (Hermitian, traceless) on construction.
pub const SPHERE_TOL: f64 = 1e-9;

/// Padding applied to the closed membership interval.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A traceless Hermitian `d x d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochElement {
    matrix: CMatrix,
    ctx: GroupContext,
}

/// Negated smallest and largest eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenExtremes {
    pub m_minus: f64,
    pub m_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purity {
    /// `B` is the Bloch vector of a pure state.
    PurePlus,
    /// `-B` is the Bloch vector of a pure state.
    PureMinus,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCubeClass {
    /// `Tr(B^3)`.
    pub value: f64,
    /// `d(d-1)(d-2)`.
    pub bound: f64,
    pub verdict: Purity,
    /// Set when both bounds are met at once, which happens only for `d = 2`
    /// where the bound is zero and `B` and `-B` are both pure.
    pub minus_also_pure: bool,
}

impl BlochElement {
    /// Wraps a matrix after checking that it is Hermitian and traceless.
    pub fn new(matrix: CMatrix, ctx: &GroupContext) -> Result<Self> {
        let d = ctx.dim();
        check_square(&matrix, d)?;
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let herm = hermitian_deviation(&matrix);
        if herm > SPHERE_TOL * scale {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&matrix);
        if tr.norm() > SPHERE_TOL * scale * d as f64 {
            return Err(Error::NotTraceless(tr.norm()));
        }
        Ok(Self {
            matrix,
            ctx: ctx.clone(),
        })
    }

    /// `sum_a coords[a] G_a` in the generalized Gell-Mann chart.
    pub fn from_coordinates(coords: &[f64], ctx: &GroupContext) -> Result<Self> {
        let d = ctx.dim();
        if coords.len() != d * d - 1 {
            return Err(Error::LengthMismatch {
                expected: d * d - 1,
                found: coords.len(),
            });
        }
        let m = gell_mann::combine(&gell_mann::basis(d), coords);
        Self::new(m, ctx)
    }

    /// Rotation-invariant random element of norm 1: standard normal
    /// coordinates in the Gell-Mann chart, normalized.
    pub fn random_unit<R: Rng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> Self {
        let d = ctx.dim();
        let mut coords: Vec<f64> = (0..d * d - 1).map(|_| rng.sample(StandardNormal)).collect();
        let n = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        coords.iter_mut().for_each(|x| *x /= n);
        Self::from_coordinates(&coords, ctx).expect("chart produces su(d) elements")
    }

    /// `d |psi><psi| - 1` for a (normalized internally) vector.
    pub fn pure(psi: &CVector, ctx: &GroupContext) -> Result<Self> {
        let d = ctx.dim();
        if psi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: psi.len(),
            });
        }
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        let p = outer(&psi.unscale(n));
        Self::new(p.scale(d as f64) - identity(d), ctx)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn scaled(&self, x: f64) -> Self {
        Self {
            matrix: self.matrix.scale(x),
            ctx: self.ctx.clone(),
        }
    }

    /// Rescaled Hilbert-Schmidt inner product.
    pub fn inner(&self, other: &BlochElement) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let d = self.dim() as f64;
        let t = trace_of_product(&self.matrix, &other.matrix);
        debug_assert!(t.im.abs() <= 1e-8 * (1.0 + t.re.abs()));
        Ok(t.re / (d * (d - 1.0)))
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same dimension").max(0.0).sqrt()
    }

    fn require_unit(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotOnOuterSphere(n));
        }
        Ok(())
    }

    /// Extreme eigenvalues, from a Hermitian solve on `(B + B†) / 2`.
    pub fn eigen_extremes(&self) -> Result<EigenExtremes> {
        if self.matrix.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::ZeroMatrix);
        }
        let ev = hermitian_eigenvalues(&self.matrix);
        Ok(EigenExtremes {
            m_minus: -ev[0],
            m_plus: ev[ev.len() - 1],
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// Whether `B` itself lies in the Bloch body (`B >= -1`).
    pub fn is_bloch_vector(&self) -> bool {
        self.min_eigenvalue() >= -1.0 - MEMBERSHIP_TOL
    }

    /// Whether `x B` lies in the Bloch body, for `B` on the outer sphere:
    /// `x` in `[-1/m_plus, 1/m_minus]`, padded by [`MEMBERSHIP_TOL`].
    pub fn scaling_membership(&self, x: f64) -> Result<bool> {
        self.require_unit()?;
        let ext = self.eigen_extremes()?;
        // Compared in eigenvalue form so the padding matches `x B >= -1`.
        Ok(if x >= 0.0 {
            x * ext.m_minus <= 1.0 + MEMBERSHIP_TOL
        } else {
            -x * ext.m_plus <= 1.0 + MEMBERSHIP_TOL
        })
    }

    /// Purity of `B` or `-B` from `Tr(B^3)` alone, for `B` on the outer sphere.
    pub fn classify_by_trace_cube(&self) -> Result<TraceCubeClass> {
        self.require_unit()?;
        let d = self.dim() as f64;
        let sq = &self.matrix * &self.matrix;
        let value = trace_of_product(&sq, &self.matrix).re;
        let bound = d * (d - 1.0) * (d - 2.0);
        let tol = 1e-8 * d * d * d;
        let plus = (value - bound).abs() <= tol;
        let minus = (value + bound).abs() <= tol;
        let verdict = if plus {
            Purity::PurePlus
        } else if minus {
            Purity::PureMinus
        } else {
            Purity::Interior
        };
        Ok(TraceCubeClass {
            value,
            bound,
            verdict,
            minus_also_pure: plus && minus,
        })
    }
}

/// `B = d rho - 1`, after checking that `rho` is a density matrix.
pub fn density_to_bloch(rho: &CMatrix, ctx: &GroupContext) -> Result<BlochElement> {
    check_density(rho, ctx.dim(), 1e-10)?;
    let d = ctx.dim();
    BlochElement::new(rho.scale(d as f64) - identity(d), ctx)
}

/// `rho = (1 + B) / d`, after checking that `B >= -1`.
pub fn bloch_to_density(b: &BlochElement) -> Result<CMatrix> {
    let min = b.min_eigenvalue();
    if min < -1.0 - MEMBERSHIP_TOL {
        return Err(Error::OutsideBlochBody(min));
    }
    let d = b.dim();
    Ok((identity(d) + b.matrix()).unscale(d as f64))
}

/// `kappa = min_r 1/m_minus(B_r)`: the largest common factor that shrinks
/// every unit-norm element into the Bloch body.
pub fn shrink_factor(elements: &[BlochElement]) -> Result<f64> {
    if elements.is_empty() {
        return Err(Error::Empty("shrink_factor needs at least one element"));
    }
    let mut kappa = f64::INFINITY;
    for b in elements {
        b.require_unit()?;
        kappa = kappa.min(1.0 / b.eigen_extremes()?.m_minus);
    }
    Ok(kappa)
}
