mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use sicpovm::povm::verify_si;
use sicpovm::wh_covariant::{
    covariant_si_povm, generating_vector, make_phase_vector, orbit_and_check, PhaseChart, PhaseVector,
};
use sicpovm::{GroupContext, GroupIndex};

fn ctx(d: usize) -> GroupContext {
    GroupContext::new(d).unwrap()
}

#[test]
fn qubit_zero_generator_is_the_tetrahedron_vertex() {
    let c = ctx(2);
    let b = generating_vector(&PhaseVector::zeros(&c).unwrap());
    let s3 = 3f64.sqrt();
    let sx = displacement(2, 1, 0);
    let sz = displacement(2, 0, 1);
    let sy = M::from_row_slice(2, 2, &[c0(), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c0()]);
    let expect = (sx - sy + sz).unscale(s3);
    assert!(max_diff(b.matrix(), &expect) < 1e-12);
    let ev = eigenvalues(b.matrix());
    assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
}

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[test]
fn known_efficiencies() {
    let rep = verify_si(&covariant_si_povm(&PhaseVector::zeros(&ctx(3)).unwrap()).povm);
    assert!(rep.is_si && (rep.kappa - 0.5).abs() < 1e-12 && !rep.is_rank_one_sic);
    let rep = verify_si(&covariant_si_povm(&PhaseVector::zeros(&ctx(2)).unwrap()).povm);
    assert!(rep.is_rank_one_sic && (rep.kappa - 1.0).abs() < 1e-12);
    // Qutrit all-pi: Tr(B^3) = +6 = d(d-1)(d-2).
    let cov = covariant_si_povm(&PhaseVector::constant(&ctx(3), PI).unwrap());
    let b = cov.generator.matrix();
    assert!((tr(&(b * b * b)).re - 6.0).abs() < 1e-10);
    assert!(verify_si(&cov.povm).is_rank_one_sic);
}

#[test]
fn every_angle_supplied_is_accepted_when_consistent() {
    let mut r = rng(1);
    for d in 2..=6 {
        let c = ctx(d);
        let phi = PhaseVector::random(&c, &mut r);
        let again = make_phase_vector(&phi.angles(), &c).unwrap();
        assert_eq!(phi, again);
        // Supplying only the non-representative member also works.
        let chart = PhaseChart::new(&c);
        let partners: Vec<(GroupIndex, f64)> = chart
            .continuous
            .iter()
            .map(|&q| (c.neg(q), phi.theta(c.neg(q))))
            .chain(chart.binary.iter().map(|&q| (q, phi.theta(q))))
            .collect();
        let from_partners = make_phase_vector(&partners, &c).unwrap();
        for q in c.nonzero_points() {
            let a = Complex64::from_polar(1.0, phi.theta(q));
            let b = Complex64::from_polar(1.0, from_partners.theta(q));
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn partner_sign_is_symmetric() {
    // s_{-q̄} = s_{-q}, so completing from either side gives the same pairing.
    for d in 2..=8 {
        let c = ctx(d);
        for q in c.nonzero_points() {
            let qq = q.as_pair();
            let qb = c.neg(q).as_pair();
            assert_eq!(c.sign((-qq.0, -qq.1)), c.sign((-qb.0, -qb.1)), "d={d} {q:?}");
        }
    }
}

#[test]
fn parameter_counts() {
    for d in 2..=9usize {
        let chart = PhaseChart::new(&ctx(d));
        let total = 2 * chart.continuous.len() + chart.binary.len();
        assert_eq!(total, d * d - 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generating_vector_invariants(d in 2usize..=7, seed in any::<u64>()) {
        let c = ctx(d);
        let phi = PhaseVector::random(&c, &mut rng(seed));
        prop_assert!(phi.constraint_deviation() < 1e-12);
        let b = generating_vector(&phi);
        let m = b.matrix();
        prop_assert!(max_diff(m, &m.adjoint()) <= 1e-12);
        prop_assert!(tr(m).norm() < 1e-12);
        prop_assert!((bloch_inner(m, m) - 1.0).abs() < 1e-12);
        let table = c.expand(m).unwrap();
        let scale = 1.0 / ((d + 1) as f64).sqrt();
        for q in c.nonzero_points() {
            let expect = Complex64::from_polar(scale, phi.theta(q));
            prop_assert!((table.get(q) - expect).norm() < 1e-12);
        }
        prop_assert!(table.get(GroupIndex::ORIGIN).norm() < 1e-12);
        let check = orbit_and_check(&b);
        prop_assert!(check.is_generating_simplex);
        prop_assert_eq!(&check.orbit.members[0], &b);
        // Full pairwise Gram of the orbit by dense products.
        let mem = &check.orbit.members;
        for (i, x) in mem.iter().enumerate().step_by(3) {
            for (j, y) in mem.iter().enumerate() {
                let expect = if i == j { 1.0 } else { -1.0 / ((d * d - 1) as f64) };
                prop_assert!((bloch_inner(x.matrix(), y.matrix()) - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn covariant_povm_invariants(d in 2usize..=7, seed in any::<u64>(), r1 in 0usize..7, r2 in 0usize..7) {
        let c = ctx(d);
        let phi = PhaseVector::random(&c, &mut rng(seed));
        let cov = covariant_si_povm(&phi);
        let top = 1.0 / (d as f64 - 1.0);
        prop_assert!(cov.kappa >= top - 1e-12 && cov.kappa <= 1.0 + 1e-12);
        let rep = verify_si(&cov.povm);
        prop_assert!(rep.is_si);
        prop_assert!((rep.kappa - cov.kappa).abs() < 1e-10);
        // E_{p⊕r} = D_r E_p D_r†.
        let r = GroupIndex::new(r1 % d, r2 % d);
        let dr = displacement(d, r.p1 as i64, r.p2 as i64);
        for p in c.points() {
            let lhs = &cov.povm.elements()[c.add(p, r).flat(d)];
            let rhs = &dr * &cov.povm.elements()[p.flat(d)] * dr.adjoint();
            prop_assert!(max_diff(lhs, &rhs) < 1e-12);
        }
    }
}
