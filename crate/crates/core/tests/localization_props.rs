use nalgebra::DVector;
use pencil_lab::localization::{lhp_certificate_with, LhpConclusion, LhpOptions, EIG_TOL};
use pencil_lab::kcf::{kronecker_structure, RankPolicy};
use pencil_lab::matrix::{c, Mat, C64};
use pencil_lab::numrange::sample_numerical_range;
use pencil_lab::oracles::{
    random_posh, random_posh_over_skew, random_posh_with_positive_eigenvalue, random_psd, random_skew, random_unitary,
    rng, Rng64,
};
use pencil_lab::pencil::{generalized_eigenvalues, regularity_probe, Eigenvalue, Pencil, PoshPencil};
use proptest::prelude::*;
use rand::Rng;

fn instance(kind: u8, n: usize, r: &mut Rng64) -> PoshPencil {
    match kind {
        0 => random_posh(n, false, r).unwrap(),
        1 => {
            let pp = random_posh(n, false, r).unwrap();
            let shift = Mat::identity(n, n) * c(2.0, 0.0);
            PoshPencil::from_parts(
                pp.j1.as_mat() * c(0.4, 0.0),
                pp.r1.as_mat() + &shift,
                pp.j2.as_mat() * c(0.4, 0.0),
                pp.r2.as_mat() + &shift,
                None,
            )
            .unwrap()
        }
        2 => {
            // Commuting skew parts with same-sign spectra.
            let u = random_unitary(n, r);
            let a: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let b: Vec<f64> = a.iter().map(|&x| x.signum() * r.random_range(0.0..2.0)).collect();
            let d = |v: &[f64]| Mat::from_diagonal(&DVector::from_iterator(n, v.iter().map(|&x| c(0.0, x))));
            let j1 = &u * d(&a) * u.adjoint();
            let j2 = &u * d(&b) * u.adjoint();
            let r1 = random_psd(n, r.random_range(0..=n), false, r);
            let r2 = random_psd(n, r.random_range(0..=n), false, r);
            PoshPencil::from_parts((&j1 - j1.adjoint()) * c(0.5, 0.0), r1, (&j2 - j2.adjoint()) * c(0.5, 0.0), r2, None)
                .unwrap()
        }
        3 => {
            let pp = random_posh(n, false, r).unwrap();
            PoshPencil::from_parts(Mat::zeros(n, n), pp.r1.as_mat().clone(), random_skew(n, false, r), pp.r2.as_mat().clone(), None)
                .unwrap()
        }
        _ => random_posh_over_skew(1 + n % 3, n + 2, r).unwrap().0,
    }
}

fn opts(seed: u64) -> LhpOptions {
    LhpOptions {
        falsify_budget: 2_000,
        sample_budget: 2_000,
        seed,
    }
}

/// QZ eigenvalues with the infinite ones removed by count. Chains at infinity
/// of length two or more come out of QZ as huge finite values with arbitrary
/// phase; the Kronecker structure says how many of the largest to drop.
fn structurally_finite(pp: &PoshPencil) -> Option<Vec<C64>> {
    let p = pp.to_pencil();
    let ks = kronecker_structure(&p.to_minus(), &RankPolicy::default()).ok()?;
    let mut all: Vec<Eigenvalue> = generalized_eigenvalues(&p).ok()?;
    all.sort_by(|a, b| match (a, b) {
        (Eigenvalue::Finite(x), Eigenvalue::Finite(y)) => x.norm().total_cmp(&y.norm()),
        (Eigenvalue::Finite(_), Eigenvalue::Infinite) => std::cmp::Ordering::Less,
        (Eigenvalue::Infinite, Eigenvalue::Finite(_)) => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Equal,
    });
    let infinite: usize = ks.infinite_block_sizes.iter().sum();
    all.truncate(all.len().checked_sub(infinite)?);
    all.into_iter().map(Eigenvalue::finite).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn certificate_conclusions_hold_numerically(kind in 0u8..5, n in 2usize..6, seed in any::<u64>()) {
        let pp = instance(kind, n, &mut rng(seed));
        let cert = lhp_certificate_with(&pp, &opts(seed));
        if cert.conclusion == LhpConclusion::NumrangeInLhp {
            let s = sample_numerical_range(&pp.to_pencil(), 2_000, seed).unwrap();
            for z in s.points {
                prop_assert!(z.re <= 1e-8 * (1.0 + z.norm()), "sample {z} with {:?}", cert.eejjx_status);
            }
        }
        if cert.conclusion != LhpConclusion::None {
            let finite = structurally_finite(&pp);
            prop_assume!(finite.is_some());
            for z in finite.unwrap() {
                prop_assert!(z.re <= 1e-8 * (1.0 + z.norm()), "eigenvalue {z} with {:?}", cert.conclusion);
            }
        }
    }

    #[test]
    fn regular_dissipation_rules_out_positive_eigenvalues(kind in 0u8..2, n in 2usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let pp = if kind == 0 {
            random_posh(n, seed % 2 == 0, &mut r).unwrap()
        } else {
            random_posh_with_positive_eigenvalue(n, r.random_range(0.1..5.0), &mut r).unwrap()
        };
        let dissipation = Pencil::plus(pp.r1.as_mat().clone(), pp.r2.as_mat().clone()).unwrap();
        if regularity_probe(&dissipation).regular {
            let finite = structurally_finite(&pp);
            prop_assume!(finite.is_some());
            for z in finite.unwrap() {
                let tol = EIG_TOL * (1.0 + z.norm());
                prop_assert!(!(z.re > tol && z.im.abs() <= tol), "positive real eigenvalue {z}");
            }
        }
        // A known positive eigenvalue forces the dissipation pencil singular.
        prop_assert!(kind == 0 || !regularity_probe(&dissipation).regular);
    }
}

#[test]
fn every_conclusion_is_reached() {
    let mut seen = [0usize; 3];
    for i in 0..150u64 {
        let pp = instance((i % 5) as u8, 2 + (i % 4) as usize, &mut rng(500 + i));
        let k = match lhp_certificate_with(&pp, &opts(i)).conclusion {
            LhpConclusion::NumrangeInLhp => 0,
            LhpConclusion::EigenvaluesInLhp => 1,
            LhpConclusion::None => 2,
        };
        seen[k] += 1;
    }
    assert!(seen.iter().all(|&s| s > 0), "conclusion counts {seen:?}");
}
