use pencil_lab::matrix::{is_positive_definite, lambda_min, C64};
use pencil_lab::oracles::{real_companion_roots, rng, routh_hurwitz, PaperExample, RouthVerdict};
use proptest::prelude::*;
use rand::Rng;

fn max_re(coeffs: &[f64]) -> f64 {
    real_companion_roots(coeffs).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Ascending coefficients of `∏(λ − zᵢ)`.
fn from_roots(roots: &[C64]) -> Vec<f64> {
    let mut p = vec![C64::new(1.0, 0.0)];
    for &z in roots {
        let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
        for (k, &a) in p.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * z;
        }
        p = next;
    }
    p.iter().map(|z| z.re).collect()
}

#[test]
fn routh_agrees_with_companion_roots() {
    let mut r = rng(2024);
    let mut checked = 0;
    for k in 0..10_000 {
        let degree = 3 + k % 2;
        let coeffs: Vec<f64> = (0..=degree).map(|_| r.random_range(-1.0..3.0)).collect();
        let m = max_re(&coeffs);
        if m.abs() <= 1e-8 {
            continue;
        }
        checked += 1;
        let want = if m < 0.0 { RouthVerdict::StrictLhp } else { RouthVerdict::Unstable };
        assert_eq!(routh_hurwitz(&coeffs).unwrap(), want, "{coeffs:?} max Re {m}");
    }
    assert!(checked > 9_900);
}

#[test]
fn imaginary_axis_roots_are_marginal() {
    let mut r = rng(77);
    for k in 0..500 {
        let w: f64 = r.random_range(0.2..3.0);
        let mut roots = vec![C64::new(0.0, w), C64::new(0.0, -w), C64::new(-r.random_range(0.2..3.0), 0.0)];
        if k % 2 == 1 {
            roots.push(C64::new(-r.random_range(0.2..3.0), 0.0));
        }
        let coeffs = from_roots(&roots);
        assert_eq!(routh_hurwitz(&coeffs).unwrap(), RouthVerdict::ClosedLhpMarginal, "{roots:?}");
    }
}

proptest! {
    #[test]
    fn conjecture_example_is_posh_for_every_scale(t in 0.0f64..1e3) {
        let pp = PaperExample::Conjecture { t }.build().unwrap();
        prop_assert!(lambda_min(pp.r1.as_mat()) >= -1e-12 * (1.0 + t));
        if t > 0.0 {
            prop_assert!(is_positive_definite(pp.r2.as_mat()));
        }
    }
}
