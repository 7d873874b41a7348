use pencil_lab::matrix::{c, hermitian_split, ComplexMatrix, Mat, C64};
use pencil_lab::oracles::{gaussian_matrix, random_posh, rng};
use pencil_lab::pencil::{generalized_eigenvalues, validate_posh, Eigenvalue, Pencil};
use proptest::prelude::*;
use rand::Rng;

fn within_ulps(got: f64, want: f64, scale: f64) -> bool {
    (got - want).abs() <= 2.0 * f64::EPSILON * scale
}

/// Entries over several magnitudes, including exact zeros.
fn wild_matrix(n: usize, seed: u64) -> Mat {
    let mut r = rng(seed);
    Mat::from_fn(n, n, |_, _| {
        let mut part = || match r.random_range(0..5) {
            0 => 0.0,
            k => r.random_range(-1.0..1.0) * 10f64.powi(4 * k - 10),
        };
        c(part(), part())
    })
}

/// Pencil whose Hermitian parts may be indefinite, so both verdicts occur.
fn maybe_posh(n: usize, seed: u64) -> Pencil {
    let mut r = rng(seed);
    let pp = random_posh(n, seed.is_multiple_of(3), &mut r).unwrap();
    let (mut l, mut k) = (pp.j1.as_mat() + pp.r1.as_mat(), pp.j2.as_mat() + pp.r2.as_mat());
    if r.random_bool(0.5) {
        let i = r.random_range(0..n);
        let which = r.random_bool(0.5);
        let target = if which { &mut l } else { &mut k };
        target[(i, i)] -= c(r.random_range(0.01..2.0), 0.0);
    }
    Pencil::plus(l, k).unwrap()
}

fn negate_skew(m: &Mat) -> Mat {
    let s = hermitian_split(&ComplexMatrix::new(m.clone()).unwrap()).unwrap();
    s.herm.as_mat() - s.skew.as_mat()
}

fn reciprocal(z: Eigenvalue) -> Eigenvalue {
    match z {
        Eigenvalue::Infinite => Eigenvalue::Finite(c(0.0, 0.0)),
        Eigenvalue::Finite(w) if w.norm() == 0.0 => Eigenvalue::Infinite,
        Eigenvalue::Finite(w) => Eigenvalue::Finite(c(1.0, 0.0) / w),
    }
}

fn close(a: Eigenvalue, b: Eigenvalue, rel: f64) -> bool {
    match (a, b) {
        (Eigenvalue::Infinite, Eigenvalue::Infinite) => true,
        (Eigenvalue::Finite(x), Eigenvalue::Finite(y)) => (x - y).norm() <= rel * (1.0 + x.norm().max(y.norm())),
        _ => false,
    }
}

/// Greedy matching of two eigenvalue lists.
fn same_multiset(a: &[Eigenvalue], b: &[Eigenvalue], rel: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|&x| {
            let hit = (0..b.len()).find(|&j| !used[j] && close(x, b[j], rel));
            hit.map(|j| used[j] = true).is_some()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn split_reassembles_within_two_ulps(n in 1usize..7, seed in any::<u64>()) {
        let m = wild_matrix(n, seed);
        let s = hermitian_split(&ComplexMatrix::new(m.clone()).unwrap()).unwrap();
        let sum = s.skew.as_mat() + s.herm.as_mat();
        for i in 0..n {
            for j in 0..n {
                let scale_re = m[(i, j)].re.abs().max(m[(j, i)].re.abs());
                let scale_im = m[(i, j)].im.abs().max(m[(j, i)].im.abs());
                prop_assert!(within_ulps(sum[(i, j)].re, m[(i, j)].re, scale_re), "({i},{j}) re");
                prop_assert!(within_ulps(sum[(i, j)].im, m[(i, j)].im, scale_im), "({i},{j}) im");
            }
        }
    }

    #[test]
    fn posh_acceptance_is_adjoint_symmetric(n in 1usize..7, seed in any::<u64>()) {
        let p = maybe_posh(n, seed);
        let direct = validate_posh(&p, None).is_ok();
        prop_assert_eq!(direct, validate_posh(&p.adjoint(), None).is_ok());
        let (l, k) = p.plus_parts();
        let flipped = Pencil::plus(negate_skew(&l), negate_skew(&k)).unwrap();
        prop_assert_eq!(direct, validate_posh(&flipped, None).is_ok());
    }

    #[test]
    fn reversal_eigenvalues_are_reciprocal(seed in any::<u64>(), drop_rank in 0usize..3) {
        let mut r = rng(seed);
        let mut e = gaussian_matrix(6, 6, &mut r);
        let a = gaussian_matrix(6, 6, &mut r);
        // Rank-deficient lead gives infinite eigenvalues, paired with zeros.
        for k in 0..drop_rank {
            e.column_mut(k).fill(C64::new(0.0, 0.0));
        }
        let p = Pencil::minus(e, a).unwrap();
        let fwd: Vec<Eigenvalue> = generalized_eigenvalues(&p).unwrap().into_iter().map(reciprocal).collect();
        let rev = generalized_eigenvalues(&p.reversal()).unwrap();
        prop_assert!(same_multiset(&fwd, &rev, 1e-8), "{:?}\nvs\n{:?}", fwd, rev);
    }
}
