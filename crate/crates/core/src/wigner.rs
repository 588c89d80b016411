//! Discrete Wigner function for odd dimensions.
//!
//! For odd `d` the operator `U = (1/d) sum_q D_q` is the parity
//! `U|r> = |-r mod d>`: an involution with trace 1, `(d+1)/2` eigenvalues
//! `+1` and `(d-1)/2` eigenvalues `-1`. Its translates
//! `U_p = D_p U D_p† = (1/d) sum_q tau^(2<p,q>) D_q` give the Wigner function
//!
//! ```text
//! W_p = (1/d) Tr(U_p rho) = (1/d) sum_q tau^(-2<p,q>) rho_q
//! ```
//!
//! with `rho_q = Tr(D_q† rho)/d`. Since `(d U - 1)/2` is the zero-phase
//! generating vector scaled by `sqrt(d+1)`, the Wigner POVM
//! `E_p = (1 + U_p)/(d(d+1))` is a covariant SI-POVM with
//! `kappa = 1/sqrt(d+1)`, and `W_p = (d+1) Tr(E_p rho) - 1/d`.

use num_complex::Complex64;

use crate::linalg::{check_density, check_square, hermitian_eigenvalues, identity, CMatrix};
use crate::povm::{Povm, PSD_TOL};
use crate::wh_group::{symplectic, CoefficientTable, GroupContext, GroupIndex};
use crate::{Error, Result};

/// Largest imaginary residue tolerated when reading off real values.
pub const IMAG_TOL: f64 = 1e-12;

fn require_odd(ctx: &GroupContext) -> Result<()> {
    if ctx.dim().is_multiple_of(2) {
        return Err(Error::EvenDimension(ctx.dim()));
    }
    Ok(())
}

/// `U = (1/d) sum_q D_q`.
pub fn parity_operator(ctx: &GroupContext) -> Result<CMatrix> {
    require_odd(ctx)?;
    let d = ctx.dim();
    let values = vec![Complex64::new(1.0 / d as f64, 0.0); d * d];
    Ok(ctx.reconstruct(&CoefficientTable::from_values(d, values)?))
}

/// `U_p = D_p U D_p†` for every `p`, in storage order.
pub fn displaced_parities(ctx: &GroupContext) -> Result<Vec<CMatrix>> {
    let u = parity_operator(ctx)?;
    Ok(ctx.points().map(|p| ctx.conjugate(p, &u)).collect())
}

/// `E_p = (1 + U_p)/(d(d+1))`.
pub fn wigner_povm(ctx: &GroupContext) -> Result<Povm> {
    let d = ctx.dim();
    let scale = 1.0 / (d * (d + 1)) as f64;
    let elements = displaced_parities(ctx)?
        .into_iter()
        .map(|u| (identity(d) + u).scale(scale))
        .collect();
    Povm::new(elements, ctx)
}

/// Real values `W_p`, stored in the order of [`GroupContext::points`].
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    values: Vec<f64>,
    ctx: GroupContext,
}

impl WignerFunction {
    /// Wraps `d^2` real values; they must sum to 1.
    pub fn new(values: Vec<f64>, ctx: &GroupContext) -> Result<Self> {
        require_odd(ctx)?;
        let n = ctx.num_points();
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("Wigner values must be finite".into()));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self {
            values,
            ctx: ctx.clone(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: GroupIndex) -> f64 {
        self.values[p.flat(self.ctx.dim())]
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// `W_p = (1/d) Tr(U_p rho)` for a density matrix.
    pub fn from_state(rho: &CMatrix, ctx: &GroupContext) -> Result<Self> {
        require_odd(ctx)?;
        check_density(rho, ctx.dim(), 1e-10)?;
        let d = ctx.dim() as f64;
        let values = displaced_parities(ctx)?
            .iter()
            .map(|u| {
                let w = crate::linalg::trace_of_product(u, rho) / d;
                if w.im.abs() > IMAG_TOL {
                    Err(Error::NotHermitian(w.im.abs()))
                } else {
                    Ok(w.re)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, ctx)
    }

    /// `W_p = (d+1) p_p - 1/d` from Wigner-POVM outcome probabilities.
    pub fn from_probabilities(probs: &[f64], ctx: &GroupContext) -> Result<Self> {
        require_odd(ctx)?;
        let n = ctx.num_points();
        if probs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: probs.len(),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(total));
        }
        if let Some(&bad) = probs.iter().find(|&&p| !(-PSD_TOL..=1.0 + PSD_TOL).contains(&p)) {
            return Err(Error::Invalid(format!("probability {bad} outside [0, 1]")));
        }
        let d = ctx.dim() as f64;
        let values = probs.iter().map(|p| (d + 1.0) * p - 1.0 / d).collect();
        Self::new(values, ctx)
    }

    /// Symplectic Fourier transform of the displacement coefficients,
    /// `W_p = (1/d) sum_q tau^(-2<p,q>) rho_q`.
    pub fn from_coefficients(rho_q: &CoefficientTable, ctx: &GroupContext) -> Result<Self> {
        require_odd(ctx)?;
        check_table(rho_q, ctx)?;
        let d = ctx.dim() as f64;
        let values = ctx
            .points()
            .map(|p| {
                let w: Complex64 = ctx
                    .points()
                    .map(|q| ctx.tau_pow(-2 * symplectic(p.as_pair(), q.as_pair())) * rho_q.get(q))
                    .sum::<Complex64>()
                    / d;
                if w.im.abs() > IMAG_TOL {
                    Err(Error::NotHermitian(w.im.abs()))
                } else {
                    Ok(w.re)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, ctx)
    }

    /// Inverse transform `rho_q = (1/d) sum_p tau^(2<p,q>) W_p`.
    pub fn coefficients(&self) -> CoefficientTable {
        let ctx = &self.ctx;
        let d = ctx.dim() as f64;
        let values = ctx
            .points()
            .map(|q| {
                ctx.points()
                    .map(|p| ctx.tau_pow(2 * symplectic(p.as_pair(), q.as_pair())) * self.get(p))
                    .sum::<Complex64>()
                    / d
            })
            .collect();
        CoefficientTable::from_values(ctx.dim(), values).expect("table has d^2 entries")
    }
}

fn check_table(t: &CoefficientTable, ctx: &GroupContext) -> Result<()> {
    if t.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: t.dim(),
        });
    }
    Ok(())
}

/// State recovered from a Wigner function. Positivity is reported, not
/// enforced: an arbitrary real `W` can map outside the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerInverse {
    pub rho: CMatrix,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

/// `rho = sum_q rho_q D_q` with `rho_q` from the inverse transform.
pub fn state_from_wigner(w: &WignerFunction) -> Result<WignerInverse> {
    require_odd(w.ctx())?;
    let rho = w.ctx().reconstruct(&w.coefficients());
    check_square(&rho, w.dim())?;
    let min_eigenvalue = hermitian_eigenvalues(&rho)[0];
    Ok(WignerInverse {
        rho,
        min_eigenvalue,
        is_psd: min_eigenvalue >= -PSD_TOL,
    })
}
