//! Weyl-Heisenberg covariant regular simplices and SI-POVMs.
//!
//! A unit-norm `B` in `su(d)` generates a regular simplex under
//! `B_p = D_p B D_p†` exactly when every non-zero displacement coefficient
//! of `B` has modulus `1/sqrt(d+1)`, i.e.
//!
//! ```text
//! B = (1/sqrt(d+1)) sum_{q != 0} exp(i theta_q) D_q,
//! exp(i theta_q̄) = s_{-q} exp(-i theta_q)
//! ```
//!
//! where the second line is Hermiticity. The covariant SI-POVM is then
//! `E_p = (1 + kappa B_p)/d^2` with `-1/kappa` the smallest eigenvalue of
//! `B` (shared by the whole orbit).
//!
//! Free parameters: one angle per unordered pair `{q, q̄}` with `q != q̄`,
//! represented by the lexicographically smaller index, and one binary
//! choice per self-paired `q` (`2q = 0`, only for even `d`), where the angle
//! must solve `exp(2 i theta) = s_{-q}`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::bloch::BlochElement;
use crate::linalg::{hermitian_eigenvalues, identity, trace_of_product};
use crate::povm::Povm;
use crate::wh_group::{CoefficientTable, GroupContext, GroupIndex};
use crate::{Error, Result};

/// Tolerance for the pairing constraint on supplied angles.
pub const PHASE_TOL: f64 = 1e-9;
/// Tolerance for `|<B, B_p> + 1/(d^2 - 1)|`.
pub const SIMPLEX_TOL: f64 = 1e-10;

/// Angles `theta_q` for every `q != 0`, satisfying the pairing constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    // Indexed by flat position; entry 0 (the origin) is unused and kept at 0.
    theta: Vec<f64>,
    ctx: GroupContext,
}

/// The free-parameter chart of [`PhaseVector`] at one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseChart {
    /// Pair representatives carrying a continuous angle.
    pub continuous: Vec<GroupIndex>,
    /// Self-paired indices carrying a binary choice.
    pub binary: Vec<GroupIndex>,
}

impl PhaseChart {
    pub fn new(ctx: &GroupContext) -> Self {
        let mut continuous = Vec::new();
        let mut binary = Vec::new();
        for q in ctx.nonzero_points() {
            let qbar = ctx.neg(q);
            if qbar == q {
                binary.push(q);
            } else if q < qbar {
                continuous.push(q);
            }
        }
        Self { continuous, binary }
    }
}

/// `theta_q̄` forced by `theta_q`.
fn partner_angle(ctx: &GroupContext, q: GroupIndex, theta: f64) -> f64 {
    let qq = q.as_pair();
    let flip = if ctx.sign((-qq.0, -qq.1)) == -1 { PI } else { 0.0 };
    (flip - theta).rem_euclid(TAU)
}

/// Distance between `exp(i a)` and `exp(i b)`.
fn angle_distance(a: f64, b: f64) -> f64 {
    (Complex64::from_polar(1.0, a) - Complex64::from_polar(1.0, b)).norm()
}

impl PhaseVector {
    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// `theta_q`; the origin reads as 0.
    pub fn theta(&self, q: GroupIndex) -> f64 {
        self.theta[q.flat(self.ctx.dim())]
    }

    /// `(q, theta_q)` for every `q != 0`, in storage order.
    pub fn angles(&self) -> Vec<(GroupIndex, f64)> {
        self.ctx.nonzero_points().map(|q| (q, self.theta(q))).collect()
    }

    /// All angles equal to zero. Valid for odd `d` and for `d = 2`.
    pub fn zeros(ctx: &GroupContext) -> Result<Self> {
        Self::constant(ctx, 0.0)
    }

    /// Every representative set to `theta`, partners completed.
    pub fn constant(ctx: &GroupContext, theta: f64) -> Result<Self> {
        let chart = PhaseChart::new(ctx);
        let angles: Vec<_> = chart
            .continuous
            .iter()
            .chain(&chart.binary)
            .map(|&q| (q, theta))
            .collect();
        make_phase_vector(&angles, ctx)
    }

    /// Builds the vector from chart coordinates: one angle per entry of
    /// `chart.continuous` and one flag per entry of `chart.binary`
    /// (`false` picks the smaller admissible angle).
    pub fn from_chart(ctx: &GroupContext, free: &[f64], choices: &[bool]) -> Result<Self> {
        let chart = PhaseChart::new(ctx);
        if free.len() != chart.continuous.len() {
            return Err(Error::LengthMismatch {
                expected: chart.continuous.len(),
                found: free.len(),
            });
        }
        if choices.len() != chart.binary.len() {
            return Err(Error::LengthMismatch {
                expected: chart.binary.len(),
                found: choices.len(),
            });
        }
        let d = ctx.dim();
        let mut theta = vec![0.0; d * d];
        for (&q, &t) in chart.continuous.iter().zip(free) {
            theta[q.flat(d)] = t.rem_euclid(TAU);
            theta[ctx.neg(q).flat(d)] = partner_angle(ctx, q, t);
        }
        for (&q, &c) in chart.binary.iter().zip(choices) {
            let qq = q.as_pair();
            let base = if ctx.sign((-qq.0, -qq.1)) == 1 { 0.0 } else { FRAC_PI_2 };
            theta[q.flat(d)] = base + if c { PI } else { 0.0 };
        }
        Ok(Self {
            theta,
            ctx: ctx.clone(),
        })
    }

    /// Uniform continuous angles and fair binary choices.
    pub fn random<R: Rng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> Self {
        let chart = PhaseChart::new(ctx);
        let free: Vec<f64> = chart.continuous.iter().map(|_| rng.random::<f64>() * TAU).collect();
        let choices: Vec<bool> = chart.binary.iter().map(|_| rng.random::<bool>()).collect();
        Self::from_chart(ctx, &free, &choices).expect("chart lengths match")
    }

    /// Chart coordinates of this vector.
    pub fn to_chart(&self) -> (Vec<f64>, Vec<bool>) {
        let chart = PhaseChart::new(&self.ctx);
        let free = chart.continuous.iter().map(|&q| self.theta(q)).collect();
        let choices = chart
            .binary
            .iter()
            .map(|&q| self.theta(q).rem_euclid(TAU) >= PI - 1e-6)
            .collect();
        (free, choices)
    }

    /// Largest violation of the pairing constraint.
    pub fn constraint_deviation(&self) -> f64 {
        self.ctx
            .nonzero_points()
            .map(|q| angle_distance(self.theta(self.ctx.neg(q)), partner_angle(&self.ctx, q, self.theta(q))))
            .fold(0.0, f64::max)
    }

    /// Coefficient table `c_q = exp(i theta_q)/sqrt(d+1)`, `c_0 = 0`.
    pub fn coefficients(&self) -> CoefficientTable {
        let d = self.ctx.dim();
        let scale = 1.0 / ((d + 1) as f64).sqrt();
        let values = self
            .ctx
            .points()
            .map(|q| {
                if q.is_origin() {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(scale, self.theta(q))
                }
            })
            .collect();
        CoefficientTable::from_values(d, values).expect("table has d^2 entries")
    }
}

/// Completes a partial assignment into a full [`PhaseVector`].
///
/// Each unordered pair `{q, q̄}` needs an angle on at least one member; the
/// other is filled in from the constraint. If both members are given they
/// must agree with it. Self-paired angles must solve
/// `exp(2 i theta) = s_{-q}`.
pub fn make_phase_vector(angles: &[(GroupIndex, f64)], ctx: &GroupContext) -> Result<PhaseVector> {
    let d = ctx.dim();
    let mut given: BTreeMap<GroupIndex, f64> = BTreeMap::new();
    for &(q, t) in angles {
        if q.p1 >= d || q.p2 >= d || q.is_origin() {
            return Err(Error::Invalid(format!(
                "phase index ({}, {}) is not a non-zero point of Z_{d}^2",
                q.p1, q.p2
            )));
        }
        if !t.is_finite() {
            return Err(Error::Invalid(format!("phase at ({}, {}) is not finite", q.p1, q.p2)));
        }
        given.insert(q, t);
    }
    let mut theta = vec![0.0; d * d];
    for q in ctx.nonzero_points() {
        let qbar = ctx.neg(q);
        let qq = q.as_pair();
        let s = ctx.sign((-qq.0, -qq.1));
        if qbar == q {
            let t = *given.get(&q).ok_or(Error::MissingPhase { p1: q.p1, p2: q.p2 })?;
            let lhs = Complex64::from_polar(1.0, 2.0 * t);
            if (lhs - Complex64::new(s as f64, 0.0)).norm() > PHASE_TOL {
                return Err(Error::SelfPairedPhase {
                    p1: q.p1,
                    p2: q.p2,
                    sign: s,
                });
            }
            theta[q.flat(d)] = t;
            continue;
        }
        if q > qbar {
            continue;
        }
        let (tq, tbar) = match (given.get(&q), given.get(&qbar)) {
            (Some(&a), Some(&b)) => {
                if angle_distance(b, partner_angle(ctx, q, a)) > PHASE_TOL {
                    return Err(Error::InconsistentPhasePair { p1: q.p1, p2: q.p2 });
                }
                (a, b)
            }
            (Some(&a), None) => (a, partner_angle(ctx, q, a)),
            (None, Some(&b)) => (partner_angle(ctx, qbar, b), b),
            (None, None) => return Err(Error::MissingPhase { p1: q.p1, p2: q.p2 }),
        };
        theta[q.flat(d)] = tq;
        theta[qbar.flat(d)] = tbar;
    }
    Ok(PhaseVector {
        theta,
        ctx: ctx.clone(),
    })
}

/// `B = (1/sqrt(d+1)) sum_{q != 0} exp(i theta_q) D_q`.
pub fn generating_vector(phi: &PhaseVector) -> BlochElement {
    let m = phi.ctx.reconstruct(&phi.coefficients());
    BlochElement::new(m, &phi.ctx).expect("valid phases give a Hermitian traceless generator")
}

/// The `d^2` conjugates `B_p = D_p B D_p†`, in storage order of `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantOrbit {
    pub generator: BlochElement,
    pub members: Vec<BlochElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitCheck {
    pub orbit: CovariantOrbit,
    pub is_generating_simplex: bool,
    /// `max_{p != 0} |<B, B_p> + 1/(d^2 - 1)|`, together with `|<B, B> - 1|`.
    pub max_deviation: f64,
}

/// Builds the orbit of `b` and checks the regular-simplex condition
/// `<B, B_p> = -1/(d^2 - 1)` for `p != 0`.
///
/// Covariance reduces the full pairwise condition to this one row:
/// `<B_p, B_q> = <B, B_{q⊖p}>`.
pub fn orbit_and_check(b: &BlochElement) -> OrbitCheck {
    let ctx = b.ctx();
    let d = ctx.dim();
    let norm = (d * (d - 1)) as f64;
    let off = -1.0 / ((d * d - 1) as f64);
    let mut max_deviation = 0.0_f64;
    let members: Vec<BlochElement> = ctx
        .points()
        .map(|p| {
            let m = ctx.conjugate(p, b.matrix());
            let ip = trace_of_product(b.matrix(), &m).re / norm;
            let target = if p.is_origin() { 1.0 } else { off };
            max_deviation = max_deviation.max((ip - target).abs());
            BlochElement::new(m, ctx).expect("conjugation preserves su(d)")
        })
        .collect();
    OrbitCheck {
        orbit: CovariantOrbit {
            generator: b.clone(),
            members,
        },
        is_generating_simplex: max_deviation <= SIMPLEX_TOL,
        max_deviation,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovariantPovm {
    pub povm: Povm,
    pub kappa: f64,
    pub generator: BlochElement,
}

/// `E_p = (1 + kappa B_p)/d^2` with `kappa = -1/lambda_min(B)`.
pub fn covariant_si_povm(phi: &PhaseVector) -> CovariantPovm {
    let ctx = phi.ctx();
    let d = ctx.dim();
    let b = generating_vector(phi);
    let kappa = -1.0 / hermitian_eigenvalues(b.matrix())[0];
    let scale = 1.0 / (d * d) as f64;
    let e0 = (identity(d) + b.matrix().scale(kappa)).scale(scale);
    let elements = ctx.points().map(|p| ctx.conjugate(p, &e0)).collect();
    CovariantPovm {
        povm: Povm::new(elements, ctx).expect("elements are d x d"),
        kappa,
        generator: b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::verify_si;

    fn ctx(d: usize) -> GroupContext {
        GroupContext::new(d).unwrap()
    }

    #[test]
    fn chart_counts() {
        for d in 2..=7 {
            let c = PhaseChart::new(&ctx(d));
            if d % 2 == 1 {
                assert_eq!(c.continuous.len(), (d * d - 1) / 2);
                assert!(c.binary.is_empty());
            } else {
                assert_eq!(c.continuous.len(), (d * d - 4) / 2);
                assert_eq!(c.binary.len(), 3);
            }
        }
    }

    #[test]
    fn qubit_zero_phases_are_valid() {
        let c = ctx(2);
        for q in c.nonzero_points() {
            let qq = q.as_pair();
            assert_eq!(c.sign((-qq.0, -qq.1)), 1);
        }
        assert!(PhaseVector::zeros(&c).is_ok());
    }

    #[test]
    fn ququart_inconsistent_pair_is_flagged() {
        let c = ctx(4);
        assert_eq!(c.sign((-1, -2)), -1);
        let q = GroupIndex::new(1, 2);
        let mut angles: Vec<_> = PhaseChart::new(&c)
            .continuous
            .iter()
            .map(|&p| (p, 0.0))
            .chain(PhaseChart::new(&c).binary.iter().map(|&p| (p, 0.0)))
            .collect();
        angles.push((c.neg(q), 0.0));
        assert!(matches!(
            make_phase_vector(&angles, &c),
            Err(Error::InconsistentPhasePair { p1: 1, p2: 2 })
        ));
        // Completed instead of supplied, the partner picks up pi.
        angles.pop();
        let phi = make_phase_vector(&angles, &c).unwrap();
        assert!((phi.theta(c.neg(q)) - PI).abs() < 1e-15);
    }

    #[test]
    fn self_paired_and_missing_errors() {
        let c = ctx(4);
        let mut angles: Vec<_> = PhaseChart::new(&c).continuous.iter().map(|&p| (p, 0.0)).collect();
        assert!(matches!(make_phase_vector(&angles, &c), Err(Error::MissingPhase { .. })));
        for &q in &PhaseChart::new(&c).binary {
            angles.push((q, 0.3));
        }
        assert!(matches!(make_phase_vector(&angles, &c), Err(Error::SelfPairedPhase { .. })));
    }

    #[test]
    fn qutrit_zero_phases_give_wigner_generator() {
        let c = ctx(3);
        let b = generating_vector(&PhaseVector::zeros(&c).unwrap());
        let ev = hermitian_eigenvalues(b.matrix());
        assert!((ev[0] + 2.0).abs() < 1e-12);
        let cov = covariant_si_povm(&PhaseVector::zeros(&c).unwrap());
        assert!((cov.kappa - 0.5).abs() < 1e-12);
    }

    #[test]
    fn known_sics() {
        let rep = verify_si(&covariant_si_povm(&PhaseVector::zeros(&ctx(2)).unwrap()).povm);
        assert!(rep.is_rank_one_sic, "{rep:?}");
        let rep = verify_si(&covariant_si_povm(&PhaseVector::constant(&ctx(3), PI).unwrap()).povm);
        assert!(rep.is_rank_one_sic, "{rep:?}");
    }

    #[test]
    fn collapsed_orbit_is_not_a_simplex() {
        let c = ctx(2);
        let mut psi = crate::linalg::CVector::zeros(2);
        psi[0] = Complex64::new(1.0, 0.0);
        let b = BlochElement::pure(&psi, &c).unwrap();
        let check = orbit_and_check(&b);
        assert!(!check.is_generating_simplex);
        assert_eq!(check.orbit.members[0], b);
    }
}
