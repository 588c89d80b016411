//! Weyl-Heisenberg displacement operators and their coefficient algebra.
//!
//! With `tau = -exp(i pi / d)`, the clock `T|r> = tau^(2r)|r>` and the shift
//! `S|r> = |r+1 mod d>`, the displacement operator at an integer pair
//! `p = (p1, p2)` is
//!
//! ```text
//! D_p = tau^(p1 p2) S^p1 T^p2
//! ```
//!
//! The `d^2` operators at reduced indices form an orthogonal basis of the
//! `d x d` matrices (`Tr(D_p† D_q) = d δ_pq`), so every matrix has a
//! [`CoefficientTable`] `A_p = Tr(D_p† A) / d`. Products and traces of
//! products can be evaluated entirely in coefficient space; see
//! [`GroupContext::convolve_coefficients`] and [`GroupContext::trace_product`].
//!
//! Index arithmetic accepts unreduced integer pairs. The sign factor `s_p`
//! relates an unreduced index to its reduction, `D_p = s_p D_[p]`, and is
//! identically `+1` for odd `d`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{check_square, CMatrix, CVector, ZERO};
use crate::{Error, Result};

/// An unreduced index in `Z^2`.
pub type IntPair = (i64, i64);

/// Symplectic form `<p, q> = p2 q1 - p1 q2`.
#[inline]
pub fn symplectic(p: IntPair, q: IntPair) -> i64 {
    p.1 * q.0 - p.0 * q.1
}

/// A reduced point of `Z_d^2`, both components in `[0, d)`.
///
/// Ordering is lexicographic in `(p1, p2)`, which is also the storage order
/// of coefficient tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupIndex {
    pub p1: usize,
    pub p2: usize,
}

impl GroupIndex {
    pub const ORIGIN: GroupIndex = GroupIndex { p1: 0, p2: 0 };

    pub fn new(p1: usize, p2: usize) -> Self {
        Self { p1, p2 }
    }

    pub fn is_origin(self) -> bool {
        self.p1 == 0 && self.p2 == 0
    }

    pub fn as_pair(self) -> IntPair {
        (self.p1 as i64, self.p2 as i64)
    }

    /// Row-major position `p1 * d + p2`.
    pub fn flat(self, d: usize) -> usize {
        self.p1 * d + self.p2
    }
}

/// Result of [`GroupContext::index_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexArith {
    pub sum: GroupIndex,
    pub diff: GroupIndex,
    pub neg: GroupIndex,
    pub symplectic: i64,
}

/// Dimension together with the precomputed powers of `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupContext {
    d: usize,
    // tau^k for k in [0, 2d); tau has order dividing 2d.
    tau_pows: Vec<Complex64>,
}

impl GroupContext {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let two_d = 2 * d;
        // tau = exp(i pi (d + 1) / d); reducing the exponent before the
        // trig call keeps every table entry accurate to one ulp.
        let tau_pows = (0..two_d)
            .map(|k| {
                let e = (k * (d + 1)) % two_d;
                Complex64::from_polar(1.0, PI * e as f64 / d as f64)
            })
            .collect();
        Ok(Self { d, tau_pows })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of points of `Z_d^2`.
    #[inline]
    pub fn num_points(&self) -> usize {
        self.d * self.d
    }

    pub fn tau(&self) -> Complex64 {
        self.tau_pows[1]
    }

    /// `tau^k` for any integer `k`.
    #[inline]
    pub fn tau_pow(&self, k: i64) -> Complex64 {
        self.tau_pows[k.rem_euclid(2 * self.d as i64) as usize]
    }

    /// Entrywise tolerance for operator identities at this dimension.
    pub fn default_tol(&self) -> f64 {
        if self.d <= 16 {
            1e-12
        } else {
            1e-10
        }
    }

    /// All reduced indices in storage order.
    pub fn points(&self) -> impl Iterator<Item = GroupIndex> + '_ {
        (0..self.d).flat_map(move |p1| (0..self.d).map(move |p2| GroupIndex { p1, p2 }))
    }

    /// All reduced indices except the origin.
    pub fn nonzero_points(&self) -> impl Iterator<Item = GroupIndex> + '_ {
        self.points().filter(|p| !p.is_origin())
    }

    pub fn point_at(&self, flat: usize) -> GroupIndex {
        GroupIndex {
            p1: flat / self.d,
            p2: flat % self.d,
        }
    }

    /// `[p]`, the reduction of `p` modulo `d`.
    #[inline]
    pub fn reduce(&self, p: IntPair) -> GroupIndex {
        let d = self.d as i64;
        GroupIndex {
            p1: p.0.rem_euclid(d) as usize,
            p2: p.1.rem_euclid(d) as usize,
        }
    }

    /// `p ⊕ q`, `p ⊖ q`, `p̄` and `<p, q>` (the latter on the unreduced inputs).
    pub fn index_arith(&self, p: IntPair, q: IntPair) -> IndexArith {
        IndexArith {
            sum: self.reduce((p.0 + q.0, p.1 + q.1)),
            diff: self.reduce((p.0 - q.0, p.1 - q.1)),
            neg: self.reduce((-p.0, -p.1)),
            symplectic: symplectic(p, q),
        }
    }

    /// `p̄ = [-p]`.
    #[inline]
    pub fn neg(&self, p: GroupIndex) -> GroupIndex {
        self.reduce((-(p.p1 as i64), -(p.p2 as i64)))
    }

    /// `p ⊕ q`.
    #[inline]
    pub fn add(&self, p: GroupIndex, q: GroupIndex) -> GroupIndex {
        GroupIndex {
            p1: (p.p1 + q.p1) % self.d,
            p2: (p.p2 + q.p2) % self.d,
        }
    }

    /// Sign factor `s_p`: `1` for odd `d`, `(-1)^(<p,[p]>/d)` for even `d`.
    #[inline]
    pub fn sign(&self, p: IntPair) -> i32 {
        if self.d % 2 == 1 {
            return 1;
        }
        let r = self.reduce(p).as_pair();
        let w = symplectic(p, r);
        debug_assert_eq!(w % self.d as i64, 0);
        if (w / self.d as i64).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    #[inline]
    fn signf(&self, p: IntPair) -> f64 {
        self.sign(p) as f64
    }

    /// Phase of `D_p |r>`: `D_p |r> = phase(p, r) |r + p1>`.
    #[inline]
    fn column_phase(&self, p: IntPair, r: usize) -> Complex64 {
        self.tau_pow(p.0 * p.1 + 2 * r as i64 * p.1)
    }

    /// `D_p` for a reduced index.
    pub fn displacement(&self, p: GroupIndex) -> CMatrix {
        self.displacement_unreduced(p.as_pair())
    }

    /// `D_p = tau^(p1 p2) S^p1 T^p2` for an arbitrary integer pair.
    pub fn displacement_unreduced(&self, p: IntPair) -> CMatrix {
        let d = self.d;
        let shift = p.0.rem_euclid(d as i64) as usize;
        let mut m = CMatrix::zeros(d, d);
        for r in 0..d {
            m[((r + shift) % d, r)] = self.column_phase(p, r);
        }
        m
    }

    /// `D_p psi` without forming the matrix.
    pub fn apply(&self, p: GroupIndex, psi: &CVector) -> CVector {
        let d = self.d;
        let mut out = CVector::zeros(d);
        for r in 0..d {
            out[(r + p.p1) % d] = self.column_phase(p.as_pair(), r) * psi[r];
        }
        out
    }

    /// `D_p† psi` without forming the matrix.
    pub fn apply_adjoint(&self, p: GroupIndex, psi: &CVector) -> CVector {
        let d = self.d;
        let mut out = CVector::zeros(d);
        for r in 0..d {
            out[r] = self.column_phase(p.as_pair(), r).conj() * psi[(r + p.p1) % d];
        }
        out
    }

    /// `D_p m D_p†` in `O(d^2)`.
    pub fn conjugate(&self, p: GroupIndex, m: &CMatrix) -> CMatrix {
        let d = self.d;
        let phases: Vec<Complex64> = (0..d).map(|r| self.column_phase(p.as_pair(), r)).collect();
        CMatrix::from_fn(d, d, |a, b| {
            let ra = (a + d - p.p1) % d;
            let rb = (b + d - p.p1) % d;
            phases[ra] * phases[rb].conj() * m[(ra, rb)]
        })
    }

    /// Expansion coefficients `A_p = Tr(D_p† A) / d`.
    pub fn expand(&self, a: &CMatrix) -> Result<CoefficientTable> {
        check_square(a, self.d)?;
        let d = self.d;
        let inv_d = 1.0 / d as f64;
        let values = self
            .points()
            .map(|p| {
                let mut acc = ZERO;
                for r in 0..d {
                    acc += self.column_phase(p.as_pair(), r).conj() * a[((r + p.p1) % d, r)];
                }
                acc * inv_d
            })
            .collect();
        Ok(CoefficientTable { d, values })
    }

    /// `sum_p A_p D_p`.
    pub fn reconstruct(&self, c: &CoefficientTable) -> CMatrix {
        let d = self.d;
        let mut m = CMatrix::zeros(d, d);
        for p in self.points() {
            let a = c.get(p);
            if a == ZERO {
                continue;
            }
            for r in 0..d {
                m[((r + p.p1) % d, r)] += a * self.column_phase(p.as_pair(), r);
            }
        }
        m
    }

    fn check_tables(&self, tables: &[&CoefficientTable]) -> Result<()> {
        if !(2..=3).contains(&tables.len()) {
            return Err(Error::OperandCount(tables.len()));
        }
        for t in tables {
            if t.d != self.d {
                return Err(Error::DimensionMismatch {
                    expected: self.d,
                    found: t.d,
                });
            }
        }
        Ok(())
    }

    /// Coefficient table of the product of two or three operators, computed
    /// by convolution:
    ///
    /// ```text
    /// (AB)_p  = sum_q   s_{p-q}   tau^<q,p>               A_q B_{p⊖q}
    /// (ABC)_p = sum_q,r s_{p-q-r} tau^(<q+r,p> + <q,r>)   A_q B_r C_{p⊖q⊖r}
    /// ```
    pub fn convolve_coefficients(&self, tables: &[&CoefficientTable]) -> Result<CoefficientTable> {
        self.check_tables(tables)?;
        let values = if tables.len() == 2 {
            let (a, b) = (tables[0], tables[1]);
            self.points()
                .map(|p| {
                    let pp = p.as_pair();
                    let mut acc = ZERO;
                    for q in self.points() {
                        let qq = q.as_pair();
                        let diff = (pp.0 - qq.0, pp.1 - qq.1);
                        acc += a.get(q)
                            * b.get(self.reduce(diff))
                            * self.tau_pow(symplectic(qq, pp))
                            * self.signf(diff);
                    }
                    acc
                })
                .collect()
        } else {
            let (a, b, c) = (tables[0], tables[1], tables[2]);
            self.points()
                .map(|p| {
                    let pp = p.as_pair();
                    let mut acc = ZERO;
                    for q in self.points() {
                        let aq = a.get(q);
                        if aq == ZERO {
                            continue;
                        }
                        let qq = q.as_pair();
                        for r in self.points() {
                            let rr = r.as_pair();
                            let rest = (pp.0 - qq.0 - rr.0, pp.1 - qq.1 - rr.1);
                            let phase = symplectic((qq.0 + rr.0, qq.1 + rr.1), pp) + symplectic(qq, rr);
                            acc += aq
                                * b.get(r)
                                * c.get(self.reduce(rest))
                                * self.tau_pow(phase)
                                * self.signf(rest);
                        }
                    }
                    acc
                })
                .collect()
        };
        Ok(CoefficientTable { d: self.d, values })
    }

    /// `Tr(AB)` or `Tr(ABC)` from coefficients. Uses the Hermitian forms when
    /// every table satisfies the Hermiticity criterion, the general forms
    /// otherwise.
    pub fn trace_product(&self, tables: &[&CoefficientTable]) -> Result<Complex64> {
        self.check_tables(tables)?;
        let tol = 1e-12 * tables.iter().map(|t| t.max_abs()).fold(1.0, f64::max);
        if tables.iter().all(|t| t.is_hermitian(self, tol)) {
            self.trace_product_hermitian(tables)
        } else {
            self.trace_product_general(tables)
        }
    }

    /// General trace formulas:
    ///
    /// ```text
    /// Tr(AB)  = d sum_q   s_{-q}   A_q B_q̄
    /// Tr(ABC) = d sum_q,r s_{-q-r} tau^<q,r> A_q B_r C_{q̄⊕r̄}
    /// ```
    pub fn trace_product_general(&self, tables: &[&CoefficientTable]) -> Result<Complex64> {
        self.check_tables(tables)?;
        let d = self.d as f64;
        let mut acc = ZERO;
        if tables.len() == 2 {
            let (a, b) = (tables[0], tables[1]);
            for q in self.points() {
                let qq = q.as_pair();
                acc += a.get(q) * b.get(self.neg(q)) * self.signf((-qq.0, -qq.1));
            }
        } else {
            let (a, b, c) = (tables[0], tables[1], tables[2]);
            for q in self.points() {
                let qq = q.as_pair();
                for r in self.points() {
                    let rr = r.as_pair();
                    let rest = (-qq.0 - rr.0, -qq.1 - rr.1);
                    acc += a.get(q)
                        * b.get(r)
                        * c.get(self.reduce(rest))
                        * self.tau_pow(symplectic(qq, rr))
                        * self.signf(rest);
                }
            }
        }
        Ok(acc * d)
    }

    /// Hermitian trace formulas:
    ///
    /// ```text
    /// Tr(AB)  = d sum_q   A_q conj(B_q)
    /// Tr(ABC) = d sum_q,r s_{q+r} tau^<q,r> A_q B_r conj(C_{q⊕r})
    /// ```
    ///
    /// Only valid when every operand is Hermitian.
    pub fn trace_product_hermitian(&self, tables: &[&CoefficientTable]) -> Result<Complex64> {
        self.check_tables(tables)?;
        let d = self.d as f64;
        let mut acc = ZERO;
        if tables.len() == 2 {
            let (a, b) = (tables[0], tables[1]);
            for (x, y) in a.values.iter().zip(&b.values) {
                acc += x * y.conj();
            }
        } else {
            let (a, b, c) = (tables[0], tables[1], tables[2]);
            for q in self.points() {
                let qq = q.as_pair();
                for r in self.points() {
                    let rr = r.as_pair();
                    let sum = (qq.0 + rr.0, qq.1 + rr.1);
                    acc += a.get(q)
                        * b.get(r)
                        * c.get(self.add(q, r)).conj()
                        * self.tau_pow(symplectic(qq, rr))
                        * self.signf(sum);
                }
            }
        }
        Ok(acc * d)
    }
}

/// Expansion coefficients of an operator in the displacement basis, stored
/// row-major over reduced `(p1, p2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    d: usize,
    values: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn from_values(d: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != d * d {
            return Err(Error::LengthMismatch {
                expected: d * d,
                found: values.len(),
            });
        }
        Ok(Self { d, values })
    }

    /// Table with a single `1` at `p`.
    pub fn unit(d: usize, p: GroupIndex) -> Self {
        let mut values = vec![ZERO; d * d];
        values[p.flat(d)] = Complex64::new(1.0, 0.0);
        Self { d, values }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, p: GroupIndex) -> Complex64 {
        self.values[p.flat(self.d)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CoefficientTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest violation of `A_p̄ = s_{-p} conj(A_p)`.
    pub fn hermiticity_deviation(&self, ctx: &GroupContext) -> f64 {
        ctx.points()
            .map(|p| {
                let pp = p.as_pair();
                let expected = self.get(p).conj() * ctx.signf((-pp.0, -pp.1));
                (self.get(ctx.neg(p)) - expected).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Whether the table describes a Hermitian operator.
    pub fn is_hermitian(&self, ctx: &GroupContext, tol: f64) -> bool {
        self.hermiticity_deviation(ctx) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mod3_arithmetic() {
        let ctx = GroupContext::new(3).unwrap();
        let r = ctx.index_arith((2, 2), (2, 1));
        assert_eq!(r.sum, GroupIndex::new(1, 0));
        assert_eq!(ctx.index_arith((1, 2), (0, 0)).neg, GroupIndex::new(2, 1));
        assert_eq!(ctx.index_arith((1, 0), (0, 1)).symplectic, -1);
        assert_eq!(ctx.index_arith((2, 2), (2, 1)).diff, GroupIndex::new(0, 1));
    }

    #[test]
    fn signs() {
        let ctx3 = GroupContext::new(3).unwrap();
        for p in [(0, 0), (1, 2), (-4, 7), (5, 5)] {
            assert_eq!(ctx3.sign(p), 1);
        }
        let ctx2 = GroupContext::new(2).unwrap();
        assert_eq!(ctx2.sign((1, 1)), 1);
        assert_eq!(ctx2.sign((1, 2)), -1);
        assert_eq!(ctx2.sign((0, 0)), 1);
    }

    #[test]
    fn tau_has_order_dividing_2d_and_d_squared() {
        for d in 2..=9 {
            let ctx = GroupContext::new(d).unwrap();
            let tau = ctx.tau();
            assert!((tau - (-Complex64::from_polar(1.0, PI / d as f64))).norm() < 1e-15);
            assert!((tau.powi(2 * d as i32) - 1.0).norm() < 1e-12);
            assert!((tau.powi((d * d) as i32) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(GroupContext::new(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn qubit_displacements() {
        let ctx = GroupContext::new(2).unwrap();
        assert!(max_abs_diff(&ctx.displacement(GroupIndex::ORIGIN), &identity(2)) < 1e-15);
        let z = ctx.displacement(GroupIndex::new(0, 1));
        let expect_z = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        assert!(max_abs_diff(&z, &expect_z) < 1e-15);
        let x = ctx.displacement(GroupIndex::new(1, 0));
        let expect_x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert!(max_abs_diff(&x, &expect_x) < 1e-15);
    }

    #[test]
    fn expand_identity_and_basis_elements() {
        let ctx = GroupContext::new(4).unwrap();
        let t = ctx.expand(&identity(4)).unwrap();
        assert!(t.max_abs_diff(&CoefficientTable::unit(4, GroupIndex::ORIGIN)) < 1e-15);
        for q in ctx.points() {
            let t = ctx.expand(&ctx.displacement(q)).unwrap();
            assert!(t.max_abs_diff(&CoefficientTable::unit(4, q)) < 1e-14);
        }
    }

    #[test]
    fn expand_rejects_wrong_size() {
        let ctx = GroupContext::new(3).unwrap();
        assert!(matches!(
            ctx.expand(&identity(4)),
            Err(Error::DimensionMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn identity_tables_convolve_to_identity() {
        let ctx = GroupContext::new(3).unwrap();
        let id = CoefficientTable::unit(3, GroupIndex::ORIGIN);
        let prod = ctx.convolve_coefficients(&[&id, &id]).unwrap();
        assert!(prod.max_abs_diff(&id) < 1e-15);
        let prod3 = ctx.convolve_coefficients(&[&id, &id, &id]).unwrap();
        assert!(prod3.max_abs_diff(&id) < 1e-15);
    }

    #[test]
    fn operand_count_is_checked() {
        let ctx = GroupContext::new(3).unwrap();
        let id = CoefficientTable::unit(3, GroupIndex::ORIGIN);
        assert!(matches!(ctx.convolve_coefficients(&[&id]), Err(Error::OperandCount(1))));
        assert!(matches!(
            ctx.trace_product(&[&id, &id, &id, &id]),
            Err(Error::OperandCount(4))
        ));
    }

    #[test]
    fn trace_of_displacement_times_adjoint() {
        for d in 2..=6 {
            let ctx = GroupContext::new(d).unwrap();
            for p in ctx.points() {
                let dp = ctx.displacement(p);
                let a = ctx.expand(&dp).unwrap();
                let b = ctx.expand(&dp.adjoint()).unwrap();
                let t = ctx.trace_product(&[&a, &b]).unwrap();
                assert!((t - d as f64).norm() < 1e-12, "d={d} p={p:?} t={t}");
            }
        }
    }

    #[test]
    fn conjugate_and_apply_match_dense() {
        let ctx = GroupContext::new(5).unwrap();
        let m = CMatrix::from_fn(5, 5, |i, j| c((i * 3 + j) as f64, (i as f64) - j as f64));
        let psi = CVector::from_fn(5, |i, _| c(i as f64, 1.0 - i as f64));
        for p in ctx.points() {
            let dp = ctx.displacement(p);
            assert!(max_abs_diff(&ctx.conjugate(p, &m), &(&dp * &m * dp.adjoint())) < 1e-12);
            assert!((ctx.apply(p, &psi) - &dp * &psi).norm() < 1e-12);
            assert!((ctx.apply_adjoint(p, &psi) - dp.adjoint() * &psi).norm() < 1e-12);
        }
    }
}
