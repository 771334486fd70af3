use approx::assert_abs_diff_eq;
use bqec_core::hilbert::{
    annihilation, c64, creation, gram_schmidt, hermitian_pinv_sqrt, hermitian_sqrt, kron, matrix_exponential, number,
    partial_trace_outer, BlockedMatrix, CMatrix, CVector,
};
use proptest::prelude::*;

fn complex_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| c64(re, im))))
}

fn complex_vectors(count: usize, n: usize) -> impl Strategy<Value = Vec<CVector>> {
    prop::collection::vec(
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
            .prop_map(move |v| CVector::from_iterator(n, v.into_iter().map(|(re, im)| c64(re, im)))),
        count,
    )
}

#[test]
fn number_is_creation_times_annihilation() {
    for dim in [2, 5, 30] {
        let n = number(dim).unwrap();
        let built = creation(dim).unwrap() * annihilation(dim).unwrap();
        assert_abs_diff_eq!((n - built).norm(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn partial_trace_of_product() {
    let a = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.5, 1.0), c64(0.5, -1.0), c64(2.0, 0.0)]);
    let b = CMatrix::from_fn(3, 3, |i, j| c64((i * 3 + j) as f64, i as f64 - j as f64));
    let pt = partial_trace_outer(&BlockedMatrix::new(2, 3, kron(&a, &b)).unwrap());
    assert_abs_diff_eq!((pt - b * a.trace()).norm(), 0.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn anti_hermitian_exponential_is_unitary(m in complex_matrix(6)) {
        let h = (&m - m.adjoint()) * c64(1.5, 0.0);
        let u = matrix_exponential(&h).unwrap();
        prop_assert!((u.adjoint() * &u - CMatrix::identity(6, 6)).norm() < 1e-10);
    }

    #[test]
    fn psd_square_root_squares_back(m in complex_matrix(5)) {
        let p = &m * m.adjoint();
        let s = hermitian_sqrt(&p).unwrap();
        prop_assert!((&s * &s - &p).norm() < 1e-10 * p.norm().max(1.0));
        prop_assert!((&s - s.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn pinv_sqrt_inverts_on_support(m in complex_matrix(4)) {
        let p = &m * m.adjoint() + CMatrix::identity(4, 4) * c64(0.1, 0.0);
        let q = hermitian_pinv_sqrt(&p, 1e-12).unwrap();
        prop_assert!((&q * &p * &q - CMatrix::identity(4, 4)).norm() < 1e-8);
    }

    #[test]
    fn gram_schmidt_output_is_orthonormal(vs in complex_vectors(4, 7)) {
        let out = gram_schmidt(&vs, 1e-10).unwrap();
        prop_assert_eq!(out.kept.len() + out.dropped.len(), vs.len());
        for (i, u) in out.basis.iter().enumerate() {
            for (j, v) in out.basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((u.dotc(v) - c64(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_schmidt_drops_dependent_inputs(vs in complex_vectors(2, 5), w in -2.0f64..2.0) {
        let dependent = &vs[0] * c64(w, 0.5) + &vs[1] * c64(-0.3, w);
        let input = vec![vs[0].clone(), vs[1].clone(), dependent];
        let out = gram_schmidt(&input, 1e-8).unwrap();
        prop_assert_eq!(out.dropped, vec![2]);
    }

    #[test]
    fn kron_mixed_product(a in complex_matrix(2), b in complex_matrix(3), c in complex_matrix(2), d in complex_matrix(3)) {
        let lhs = kron(&a, &b) * kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
