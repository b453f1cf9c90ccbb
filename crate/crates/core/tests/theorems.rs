//! End-to-end theorem verification and the seed-vs-target contrast fixture.

use num_traits::Zero;
use nwe_core::activation::{verify_theorem1, verify_theorem2, verify_theorem3, verify_theorem4};
use nwe_core::exactla::{rat, rvec, Rational};
use nwe_core::hilbert::{dot, PartySpec, ProductState};
use nwe_core::nonlocality::{certify_strong_irreducibility, check_upb, opm_solution_dims};
use nwe_core::protocols::{
    build_g1_protocol, build_g2_protocol, build_g3_protocol, build_g4_protocol, simulate,
};
use nwe_core::statesets::{
    build_g1, build_g2, build_g3, build_g4, build_shifts_upb, build_strong_set, build_tiles_upb,
    PartyTriple, StateSet, StrongTemplateParams,
};

#[test]
fn theorem3_all_eight_combinations() {
    let report = verify_theorem3().unwrap();
    assert!(report.opm_ok);
    assert!(report.deterministic);
    assert_eq!(report.outcomes.len(), 8);
    for o in &report.outcomes {
        assert_eq!(o.states, 27, "combination {}", o.label);
        assert!(o.matched.is_some(), "combination {} unmatched", o.label);
        let irr = o.irreducibility.as_ref().unwrap();
        assert_eq!(irr.restricted_dims, vec![3, 3, 3]);
        assert_eq!(irr.certificates.len(), 6);
        for cert in &irr.certificates {
            assert_eq!(
                (cert.dims.sym_dim, cert.dims.antisym_dim),
                (1, 0),
                "combination {} grouping {}",
                o.label,
                cert.grouping_label()
            );
        }
    }
    assert!(report.pass());
}

#[test]
fn theorem3_all_k1_is_the_verbatim_template() {
    let report = verify_theorem3().unwrap();
    let all_k1 = report
        .outcomes
        .iter()
        .find(|o| o.label == "K1K1K1")
        .unwrap();
    let pairs = &all_k1.matched.as_ref().unwrap().pairs;
    // the projected seed rows land on the template rows in listing order
    for (a, b, scalar) in pairs {
        assert_eq!(a.trim_start_matches("xi"), b.trim_start_matches('t'));
        let allowed = [rat(1), rat(-1), rat(2), rat(-2)];
        assert!(allowed.contains(scalar), "scalar {scalar}");
    }
}

#[test]
fn theorem_match_scalars_stay_in_unit_range() {
    for report in [verify_theorem3().unwrap(), verify_theorem4().unwrap()] {
        for o in &report.outcomes {
            for (_, _, scalar) in &o.matched.as_ref().unwrap().pairs {
                let allowed = [rat(1), rat(-1), rat(2), rat(-2)];
                assert!(allowed.contains(scalar), "scalar {scalar}");
            }
        }
    }
}

/// Seed families are distinguished by their protocols while every
/// transformation target resists: the tile and shift bases are unextendible
/// and the strong templates certify as irreducible in every bipartition,
/// with only trivial orthogonality-preserving measurements available.
#[test]
fn contrast_fixture_seeds_distinguish_targets_resist() {
    // seeds pass their discrimination protocols
    for (set, tree) in [
        (build_g1(), build_g1_protocol()),
        (build_g2(), build_g2_protocol()),
        (build_g3(), build_g3_protocol()),
        (build_g4(), build_g4_protocol()),
    ] {
        let report = simulate(&set, &tree).unwrap();
        assert!(report.all_distinguished());
    }
    // targets: unextendibility for the bipartite/tripartite bases
    assert!(check_upb(&build_tiles_upb()).unwrap().is_upb);
    assert!(check_upb(&build_shifts_upb()).unwrap().is_upb);
    // targets: certified irreducibility for the strong templates
    let t = PartyTriple::for_half(false);
    let strong = build_strong_set(StrongTemplateParams::Tripartite([t, t, t]));
    assert!(certify_strong_irreducibility(&strong)
        .unwrap()
        .strongly_irreducible());
    let charlie = build_strong_set(StrongTemplateParams::CharlieOnly(t));
    assert!(certify_strong_irreducibility(&charlie)
        .unwrap()
        .strongly_irreducible());
    // while the seeds admit nontrivial orthogonality-preserving measurements
    assert!(opm_solution_dims(&build_g1(), &[1]).unwrap().sym_dim >= 2);
}

/// Brute-force unextendibility oracle for two-qubit sets: search extending
/// product states over a small rational grid.
fn grid_extendible(set: &StateSet) -> bool {
    let grid: Vec<Vec<Rational>> = {
        let mut v = Vec::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                if a != 0 || b != 0 {
                    v.push(rvec(&[a, b]));
                }
            }
        }
        v
    };
    for wa in &grid {
        for wb in &grid {
            let orthogonal_to_all = set
                .states()
                .iter()
                .all(|s| (dot(s.local(0), wa) * dot(s.local(1), wb)).is_zero());
            if orthogonal_to_all {
                return true;
            }
        }
    }
    false
}

#[test]
fn upb_check_agrees_with_grid_search_on_two_qubit_sets() {
    let spec = PartySpec::new(&[2, 2]).unwrap();
    let st =
        |id: &str, a: &[i64], b: &[i64]| ProductState::new(id, vec![rvec(a), rvec(b)]).unwrap();
    let cases: Vec<StateSet> = vec![
        // extendible: two basis products
        StateSet::new(
            spec.clone(),
            vec![st("a", &[1, 0], &[1, 0]), st("b", &[0, 1], &[0, 1])],
        )
        .unwrap(),
        // complete product basis: nothing left to extend with
        StateSet::new(
            spec.clone(),
            vec![
                st("a", &[1, 0], &[1, 0]),
                st("b", &[1, 0], &[0, 1]),
                st("c", &[0, 1], &[1, 0]),
                st("d", &[0, 1], &[0, 1]),
            ],
        )
        .unwrap(),
        // three tilted states
        StateSet::new(
            spec.clone(),
            vec![
                st("a", &[1, 0], &[1, 1]),
                st("b", &[0, 1], &[1, -1]),
                st("c", &[1, 1], &[1, -1]),
            ],
        )
        .unwrap(),
    ];
    for (i, set) in cases.iter().enumerate() {
        let verdict = check_upb(set).unwrap();
        assert_eq!(
            verdict.is_upb,
            !grid_extendible(set),
            "case {i}: enumeration and grid search disagree"
        );
    }
}

#[test]
fn theorem_reports_pass_end_to_end() {
    assert!(verify_theorem1().unwrap().pass());
    assert!(verify_theorem2().unwrap().pass());
    assert!(verify_theorem4().unwrap().pass());
}
