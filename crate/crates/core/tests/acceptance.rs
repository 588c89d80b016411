//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
//! any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use sicpovm::bloch::{BlochElement, Purity};
use sicpovm::povm::{probabilities, random_si_povm, reconstruct_state, verify_si, Povm};
use sicpovm::sic_search::{
    frame_potential_bound, phase_objective, phase_objective_bound, search, SearchConfig, SearchMethod,
    SearchParameters,
};
use sicpovm::wh_covariant::{covariant_si_povm, generating_vector, PhaseVector};
use sicpovm::wh_group::symplectic;
use sicpovm::wigner::{parity_operator, state_from_wigner, wigner_povm, WignerFunction};
use sicpovm::{GroupContext, GroupIndex};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ctx(d: usize) -> GroupContext {
    GroupContext::new(d).unwrap()
}

fn random_index<R: rand::Rng>(d: usize, r: &mut R) -> GroupIndex {
    GroupIndex::new(r.random_range(0..d), r.random_range(0..d))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn rel_matrix(a: &M, b: &M) -> f64 {
    max_diff(a, b) / b.iter().fold(1.0f64, |m, z| m.max(z.norm()))
}

fn wh_algebra() -> Outcome {
    let mut r = rng(1001);
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let g = ctx(d);
        let id = M::identity(d, d);
        for _ in 0..100 {
            let p = random_index(d, &mut r);
            let q = random_index(d, &mut r);
            let (pp, qq) = (p.as_pair(), q.as_pair());
            let dp = g.displacement(p);
            let dq = g.displacement(q);
            worst = worst.max(max_diff(&dp, &displacement(d, pp.0, pp.1)));

            let sign = g.sign((pp.0 + qq.0, pp.1 + qq.1)) as f64;
            let rhs = g.displacement(g.add(p, q)).map(|z| z * g.tau_pow(symplectic(pp, qq)) * sign);
            worst = worst.max(max_diff(&(&dp * &dq), &rhs));

            let adj = g.displacement(g.neg(p)).scale(g.sign((-pp.0, -pp.1)) as f64);
            worst = worst.max(max_diff(&dp.adjoint(), &adj));

            let mut power = id.clone();
            for _ in 0..d {
                power = &power * &dp;
            }
            worst = worst.max(max_diff(&power, &id));

            let expect = if p == q { d as f64 } else { 0.0 };
            worst = worst.max((tr(&(dp.adjoint() * &dq)) - expect).norm());
        }
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e}"))
}

fn coefficient_products() -> Outcome {
    let mut r = rng(1002);
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        let g = ctx(d);
        for _ in 0..100 {
            let a = random_hermitian(d, &mut r);
            let b = random_hermitian(d, &mut r);
            let c = random_hermitian(d, &mut r);
            let (ta, tb, tc) = (g.expand(&a).unwrap(), g.expand(&b).unwrap(), g.expand(&c).unwrap());

            let ab = g.reconstruct(&g.convolve_coefficients(&[&ta, &tb]).unwrap());
            worst = worst.max(rel_matrix(&ab, &(&a * &b)));
            let abc = g.reconstruct(&g.convolve_coefficients(&[&ta, &tb, &tc]).unwrap());
            worst = worst.max(rel_matrix(&abc, &(&a * &b * &c)));

            let t2 = tr(&(&a * &b));
            let t3 = tr(&(&a * &b * &c));
            worst = worst.max(rel(g.trace_product_hermitian(&[&ta, &tb]).unwrap(), t2));
            worst = worst.max(rel(g.trace_product_hermitian(&[&ta, &tb, &tc]).unwrap(), t3));
            worst = worst.max(rel(g.trace_product_general(&[&ta, &tb]).unwrap(), t2));
            worst = worst.max(rel(g.trace_product_general(&[&ta, &tb, &tc]).unwrap(), t3));
        }
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.2e}"))
}

fn trace_cube_consistency() -> Outcome {
    let mut r = rng(1003);
    let mut disagreements = 0;
    let mut excess: f64 = 0.0;
    let mut samples = 0;
    for d in 2..=6 {
        let g = ctx(d);
        let mut check = |b: &BlochElement| {
            samples += 1;
            let class = b.classify_by_trace_cube().unwrap();
            let ev = eigenvalues(b.matrix());
            let eig_plus = (ev[0] + 1.0).abs() <= 1e-9;
            let eig_minus = (ev[d - 1] - 1.0).abs() <= 1e-9;
            let cls_plus = class.verdict == Purity::PurePlus;
            let cls_minus = class.verdict == Purity::PureMinus || class.minus_also_pure;
            if (eig_plus, eig_minus) != (cls_plus, cls_minus) {
                disagreements += 1;
            }
            excess = excess.max(class.value.abs() - class.bound);
        };
        for _ in 0..1000 {
            check(&BlochElement::random_unit(&g, &mut r));
        }
        for _ in 0..100 {
            let pure = BlochElement::pure(&random_unit_vector(d, &mut r), &g).unwrap();
            check(&pure);
            check(&pure.scaled(-1.0));
        }
    }
    outcome(
        disagreements == 0 && excess <= 1e-9,
        format!("{samples} samples, {disagreements} disagreements, max bound excess {excess:.2e}"),
    )
}

fn wigner_povm_numbers() -> Outcome {
    let mut r = rng(1004);
    let mut failures = Vec::new();
    for d in [3usize, 5, 7, 9] {
        let g = ctx(d);
        let povm = wigner_povm(&g).unwrap();
        let rep = verify_si(&povm);
        if !rep.is_si || (rep.kappa - 1.0 / ((d + 1) as f64).sqrt()).abs() > 1e-12 {
            failures.push(format!("d={d} kappa {}", rep.kappa));
        }
        for e in povm.elements() {
            let ev = eigenvalues(e);
            let rank = ev.iter().filter(|&&x| x > 1e-9).count();
            let gap = ev[d - rank] - ev[d - rank - 1];
            if rank != d.div_ceil(2) || gap < 1e-6 {
                failures.push(format!("d={d} rank {rank} gap {gap:.2e}"));
                break;
            }
        }
        let ev = eigenvalues(&parity_operator(&g).unwrap());
        let plus = ev.iter().filter(|&&x| (x - 1.0).abs() < 1e-9).count();
        let minus = ev.iter().filter(|&&x| (x + 1.0).abs() < 1e-9).count();
        if (plus, minus) != (d.div_ceil(2), (d - 1) / 2) {
            failures.push(format!("d={d} parity multiplicities ({plus}, {minus})"));
        }
        for _ in 0..10 {
            let rho = random_density(d, &mut r);
            let probs = probabilities(&povm, &rho).unwrap();
            let w = WignerFunction::from_state(&rho, &g).unwrap();
            let dev = probs
                .iter()
                .zip(w.values())
                .map(|(p, v)| ((d + 1) as f64 * p - 1.0 / d as f64 - v).abs())
                .fold(0.0, f64::max);
            if dev > 1e-12 {
                failures.push(format!("d={d} rescaling deviation {dev:.2e}"));
            }
        }
    }
    outcome(failures.is_empty(), summarize(failures, "d in {3,5,7,9}"))
}

fn summarize(failures: Vec<String>, ok: &str) -> String {
    if failures.is_empty() {
        ok.to_owned()
    } else {
        failures.join("; ")
    }
}

/// Largest deviation of the pairwise projector overlaps of the orbit of
/// `psi` from `(1 + d delta)/(d+1)`, computed densely.
fn sic_overlap_deviation(psi: &nalgebra::DVector<Complex64>) -> f64 {
    let d = psi.len();
    let orbit: Vec<_> = (0..d as i64)
        .flat_map(|p1| (0..d as i64).map(move |p2| (p1, p2)))
        .map(|(p1, p2)| displacement(d, p1, p2) * psi)
        .collect();
    let mut worst: f64 = 0.0;
    for (i, a) in orbit.iter().enumerate() {
        for (j, b) in orbit.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 1.0 / (d as f64 + 1.0) };
            worst = worst.max((a.dotc(b).norm_sqr() - expect).abs());
        }
    }
    worst
}

fn frame_search() -> Outcome {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for d in 2..=6 {
        let mut cfg = SearchConfig::new(d, SearchMethod::FramePotential);
        cfg.restarts = 50;
        cfg.seed = 2024;
        let res = search(&cfg).unwrap();
        let SearchParameters::Fiducial(f) = &res.best_parameters else {
            unreachable!("frame search returns a fiducial");
        };
        let gap = (res.objective_value - frame_potential_bound(d)).abs();
        let dev = sic_overlap_deviation(f.psi());
        details.push(format!("d={d}: {} restarts, dev {dev:.1e}", res.restarts_used));
        if !(res.certified && res.report.is_rank_one_sic && gap <= 1e-9 && dev < 1e-6) {
            failures.push(format!("d={d} gap {gap:.2e} overlap deviation {dev:.2e}"));
        }
    }
    outcome(failures.is_empty(), summarize(failures, &details.join(", ")))
}

fn phase_fixtures() -> Outcome {
    let mut r = rng(1006);
    let mut failures = Vec::new();
    let g2 = ctx(2);
    for _ in 0..100 {
        let v = phase_objective(&PhaseVector::random(&g2, &mut r));
        if v.abs() > 1e-12 {
            failures.push(format!("d=2 objective {v:.2e}"));
            break;
        }
    }
    let pi3 = PhaseVector::constant(&ctx(3), PI).unwrap();
    let v = phase_objective(&pi3);
    if (v - 16.0).abs() > 1e-10 || !verify_si(&covariant_si_povm(&pi3).povm).is_rank_one_sic {
        failures.push(format!("d=3 all-pi objective {v}"));
    }
    let (mut excess, mut cross): (f64, f64) = (f64::NEG_INFINITY, 0.0);
    for d in 3..=6 {
        let g = ctx(d);
        let df = d as f64;
        for _ in 0..1000 {
            let phi = PhaseVector::random(&g, &mut r);
            let v = phase_objective(&phi);
            excess = excess.max(v - phase_objective_bound(d));
            let b = generating_vector(&phi).into_matrix();
            let cube = tr(&(&b * &b * &b)).re;
            cross = cross.max((v - (df + 1.0).powf(1.5) * cube / df).abs());
        }
    }
    if excess > 1e-9 || cross > 1e-10 {
        failures.push(format!("bound excess {excess:.2e}, cross identity {cross:.2e}"));
    }
    outcome(
        failures.is_empty(),
        summarize(failures, &format!("max bound excess {excess:.2e}, cross identity {cross:.2e}")),
    )
}

/// Bloch Gram matrix of a POVM, from dense traces.
fn bloch_gram(povm: &Povm) -> M {
    let d = povm.dim();
    let blochs: Vec<M> = povm
        .elements()
        .iter()
        .map(|e| e.scale(d as f64 / tr(e).re) - M::identity(d, d))
        .collect();
    let n = blochs.len();
    M::from_fn(n, n, |i, j| c(bloch_inner(&blochs[i], &blochs[j]), 0.0))
}

fn random_si() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let floor = 1.0 / (d as f64 - 1.0);
        for seed in 0..10 {
            let povm = random_si_povm(d, seed).unwrap();
            let rep = verify_si(&povm);
            if !rep.is_si || rep.kappa < floor - 1e-12 {
                failures.push(format!("d={d} seed={seed} kappa {}", rep.kappa));
                continue;
            }
            let n = (d * d) as f64;
            let top = rep.kappa * rep.kappa * n / (n - 1.0);
            let ev = eigenvalues(&bloch_gram(&povm));
            let dev = ev[1..].iter().map(|x| (x - top).abs()).fold(ev[0].abs(), f64::max);
            worst = worst.max(dev);
        }
    }
    if worst > 1e-9 {
        failures.push(format!("Gram spectrum deviation {worst:.2e}"));
    }
    outcome(failures.is_empty(), summarize(failures, &format!("70 POVMs, Gram spectrum deviation {worst:.2e}")))
}

fn reconstruction() -> Outcome {
    let mut r = rng(1008);
    let (mut recon, mut round): (f64, f64) = (0.0, 0.0);
    let mut check = |povm: &Povm, rho: &M| {
        let probs = probabilities(povm, rho).unwrap();
        let back = reconstruct_state(povm, &probs).unwrap();
        recon = recon.max(max_diff(&back.rho, rho));
    };
    for d in [3usize, 5, 7] {
        let g = ctx(d);
        let povm = wigner_povm(&g).unwrap();
        for _ in 0..20 {
            let rho = random_density(d, &mut r);
            check(&povm, &rho);
            let w = WignerFunction::from_state(&rho, &g).unwrap();
            round = round.max(max_diff(&state_from_wigner(&w).unwrap().rho, &rho));
        }
    }
    for d in 2..=6 {
        for seed in 0..5 {
            let povm = random_si_povm(d, seed).unwrap();
            for _ in 0..4 {
                check(&povm, &random_density(d, &mut r));
            }
        }
    }
    outcome(
        recon <= 1e-10 && round <= 1e-12,
        format!("reconstruction error {recon:.2e}, Wigner round trip {round:.2e}"),
    )
}

fn cli_payload(args: &[&str], file: &std::path::Path) -> serde_json::Value {
    let status = Command::new(env!("CARGO_BIN_EXE_sicpovm"))
        .args(args)
        .arg("--out")
        .arg(file)
        .output()
        .unwrap()
        .status;
    assert!(status.code().is_some_and(|c| c < 2), "{args:?} failed");
    let mut value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    value["metadata"].as_object_mut().unwrap().remove("created_at");
    value
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["search", "--dim", "3", "--method", "frame", "--seed", "11"],
        &["search", "--dim", "4", "--method", "phase", "--seed", "5"],
        &["random-si", "--dim", "5", "--seed", "9"],
        &["covariant", "--dim", "4", "--phases", "pi"],
        &["wigner", "--dim", "5"],
    ];
    let mut failures = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let a = cli_payload(args, &dir.path().join(format!("{i}a.json")));
        let b = cli_payload(args, &dir.path().join(format!("{i}b.json")));
        if serde_json::to_string(&a).unwrap() != serde_json::to_string(&b).unwrap() {
            failures.push(args.join(" "));
        }
    }
    outcome(failures.is_empty(), summarize(failures, "5 commands byte-identical"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("WH algebra suite", Some(Duration::from_secs(5)), wh_algebra),
        ("coefficient products and traces", Some(Duration::from_secs(30)), coefficient_products),
        ("trace-cube vs eigenvalue purity", None, trace_cube_consistency),
        ("Wigner POVM numbers", Some(Duration::from_secs(10)), wigner_povm_numbers),
        ("frame-potential SIC search", Some(Duration::from_secs(600)), frame_search),
        ("phase-objective fixtures", None, phase_fixtures),
        ("random SI-POVM", None, random_si),
        ("reconstruction round trip", None, reconstruction),
        ("CLI determinism", None, determinism),
    ];
    let mut all = true;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed < b);
        let pass = out.pass && in_time;
        all &= pass;
        let budget = budget.map(|b| format!(" (budget {}s)", b.as_secs())).unwrap_or_default();
        println!(
            "criterion {}: {} {name}: {} [{:.2}s{budget}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
