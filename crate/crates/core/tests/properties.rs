//! Property tests for the structural invariants.

use num_traits::Zero;
use nwe_core::exactla::{self, rat, Matrix, RMatrix, Rational};
use nwe_core::hilbert::{
    densities_orthogonal, dot, reduced_density, DensityMatrix, FactorId, PartySpec, ProductState,
};
use nwe_core::measurements::projector_from_span;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4).prop_map(rat)
}

fn nonzero_local(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), dim)
        .prop_filter("local must be nonzero", |v| v.iter().any(|x| !x.is_zero()))
}

fn product_state(dims: &[usize]) -> impl Strategy<Value = ProductState> {
    let locals: Vec<_> = dims.iter().map(|&d| nonzero_local(d)).collect();
    locals.prop_map(|ls| ProductState::new("s", ls).unwrap())
}

fn matrix(max: usize) -> impl Strategy<Value = RMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(small_rational(), c), r)
            .prop_map(move |rows| Matrix::from_rows_with_cols(rows, c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_kernel_dim_is_cols(m in matrix(8)) {
        prop_assert_eq!(
            exactla::rank(&m) + exactla::solution_space_dim(&m),
            m.cols()
        );
    }

    #[test]
    fn kernel_vectors_annihilate(m in matrix(7)) {
        for v in exactla::kernel_basis(&m) {
            prop_assert!(m.matvec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn modular_rank_agrees(m in matrix(8)) {
        prop_assert_eq!(exactla::rank_modular(&m), exactla::rank(&m));
    }

    #[test]
    fn inner_product_matches_full_vector_dot(
        (a, b) in prop::sample::select(vec![vec![2usize, 3], vec![2, 2, 2], vec![3, 2]])
            .prop_flat_map(|dims| (product_state(&dims), product_state(&dims)))
    ) {
        prop_assert_eq!(
            a.inner_product(&b).unwrap(),
            dot(&a.full_vector(), &b.full_vector())
        );
    }

    #[test]
    fn projectors_idempotent_and_symmetric(
        vectors in prop::collection::vec(nonzero_local(4), 1..4)
    ) {
        let p = projector_from_span(4, &vectors).unwrap();
        prop_assert!(p.entries().is_symmetric());
        prop_assert_eq!(p.entries().matmul(p.entries()), p.entries().clone());
        // every span vector is fixed by the projector
        for v in &vectors {
            prop_assert_eq!(p.apply(v), v.clone());
        }
    }

    #[test]
    fn sequential_partial_traces_commute(s in product_state(&[2, 4])) {
        // the space factors as [2, 2, 2] with party B = factors 1 and 2
        let full = DensityMatrix::from_outer(&s.full_vector());
        let dims = [2, 2, 2];
        let at_once = full.trace_out(&dims, &[true, false, false]).unwrap();
        let f1_then_f2 = full
            .trace_out(&dims, &[true, true, false])
            .unwrap()
            .trace_out(&[2, 2], &[true, false])
            .unwrap();
        let f2_then_f1 = full
            .trace_out(&dims, &[true, false, true])
            .unwrap()
            .trace_out(&[2, 2], &[true, false])
            .unwrap();
        prop_assert_eq!(&at_once, &f1_then_f2);
        prop_assert_eq!(&at_once, &f2_then_f1);
    }

    #[test]
    fn reduction_trace_preserved(s in product_state(&[2, 4])) {
        let spec = PartySpec::new(&[2, 4]).unwrap().with_factors(1, &[2, 2]).unwrap();
        let keep: Vec<FactorId> = vec!["b2".parse().unwrap()];
        let rho = reduced_density(&spec, &s, &keep).unwrap();
        prop_assert_eq!(rho.trace(), s.inner_product(&s).unwrap());
    }

    #[test]
    fn orthogonal_locals_stay_orthogonal_after_reduction(
        s in product_state(&[2, 3]),
        t in product_state(&[2, 3]),
    ) {
        // make the states orthogonal on the kept party by construction
        let spec = PartySpec::new(&[2, 3]).unwrap();
        let e0 = vec![rat(1), rat(0)];
        let e1 = vec![rat(0), rat(1)];
        let s = ProductState::new("s", vec![e0, s.local(1).to_vec()]).unwrap();
        let t = ProductState::new("t", vec![e1, t.local(1).to_vec()]).unwrap();
        let keep: Vec<FactorId> = vec![FactorId { party: 0, factor: 0 }];
        let rs = reduced_density(&spec, &s, &keep).unwrap();
        let rt = reduced_density(&spec, &t, &keep).unwrap();
        prop_assert!(densities_orthogonal(&rs, &rt).unwrap());
    }
}
