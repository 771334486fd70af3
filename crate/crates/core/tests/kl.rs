use approx::assert_abs_diff_eq;
use bqec_core::channels::{first_order_set, RateFamily};
use bqec_core::kl::{elementary_error_set, kl_cost_kraus, kl_tensor};
use bqec_core::states::{ReferenceCode, DEFAULT_DIM};

#[test]
fn squeezed_fock_loss_terms_vanish_by_parity() {
    let sf = ReferenceCode::SqueezedFock.build(DEFAULT_DIM).unwrap();
    let t = kl_tensor(&sf, &elementary_error_set(1, 0, DEFAULT_DIM).unwrap()).unwrap();
    for (i, j) in [(0, 1), (1, 0), (0, 0), (1, 1)] {
        assert!(t.get(i, j, 0, 1).norm() < 1e-12);
        assert!(t.get(i, j, 1, 0).norm() < 1e-12);
    }
    assert!(t.get(0, 1, 0, 0).norm() < 1e-9);
}

#[test]
fn tensor_is_hermitian_under_index_swap() {
    let code = ReferenceCode::PerpendicularHalf.build(DEFAULT_DIM).unwrap();
    let t = kl_tensor(&code, &elementary_error_set(2, 2, DEFAULT_DIM).unwrap()).unwrap();
    let n = t.n_errors();
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..n {
                for b in 0..n {
                    let d = t.get(i, j, a, b) - t.get(j, i, b, a).conj();
                    assert!(d.norm() < 1e-9 * t.get(i, i, a, a).norm().max(1.0));
                }
            }
        }
    }
}

#[test]
fn cost_is_monotone_in_rate() {
    for c in ReferenceCode::ALL {
        let code = c.build(DEFAULT_DIM).unwrap();
        for family in [RateFamily::Loss, RateFamily::Dephasing] {
            let costs: Vec<f64> = (0..8)
                .map(|k| 10f64.powf(-7.0 + 0.5 * k as f64))
                .map(|g| kl_cost_kraus(&code, &first_order_set(family, g, DEFAULT_DIM).unwrap()).unwrap())
                .collect();
            assert!(
                costs.windows(2).all(|w| w[0] < 1e-20 || w[1] > w[0]),
                "{c} {family:?} {costs:?}"
            );
        }
    }
}

#[test]
fn zero_rate_cost_vanishes() {
    let sf = ReferenceCode::SqueezedFock.build(DEFAULT_DIM).unwrap();
    let k = first_order_set(RateFamily::Dephasing, 0.0, DEFAULT_DIM).unwrap();
    assert_abs_diff_eq!(kl_cost_kraus(&sf, &k).unwrap(), 0.0, epsilon = 1e-12);
}
