use pencil_lab::dh::{check_dh_equivalence, realize_dh, DhVariant};
use pencil_lab::kcf::{kronecker_structure, RankPolicy};
use pencil_lab::oracles::{random_block_specs, random_dh_block_specs, rng, structure_of};

#[test]
fn admissible_structures_round_trip() {
    let policy = RankPolicy::default();
    let mut failures = Vec::new();
    for i in 0..300u64 {
        let variant = if i % 2 == 0 { DhVariant::GeneralQ } else { DhVariant::QIdentity };
        let mut r = rng(40_000 + i);
        let blocks = random_dh_block_specs(variant, 8, i % 3 == 0, &mut r);
        let ks = structure_of(&blocks);
        let verdict = check_dh_equivalence(&ks, variant);
        if !verdict.holds {
            failures.push(format!("#{i} rejected {blocks:?}: {verdict:?}"));
            continue;
        }
        let d = match realize_dh(&ks, variant) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("#{i} {e}"));
                continue;
            }
        };
        let v = d.check(1e-10);
        if !v.valid {
            failures.push(format!("#{i} invalid dH pencil {v:?}"));
        }
        if variant == DhVariant::QIdentity && d.q.as_mat() != &pencil_lab::matrix::Mat::identity(d.n(), d.n()) {
            failures.push(format!("#{i} Q is not the identity"));
        }
        match kronecker_structure(&d.to_pencil(), &policy) {
            Ok(back) if back.matches(&ks, 1e-6) => {}
            Ok(back) => failures.push(format!("#{i} {blocks:?}\n  got {back:?}")),
            Err(e) => failures.push(format!("#{i} {blocks:?}: {e}")),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn identity_variant_implies_general_variant() {
    for i in 0..500u64 {
        let mut r = rng(90_000 + i);
        let ks = structure_of(&random_block_specs(8, 0.5, &mut r));
        if check_dh_equivalence(&ks, DhVariant::QIdentity).holds {
            assert!(check_dh_equivalence(&ks, DhVariant::GeneralQ).holds, "{ks:?}");
        }
    }
}
