use dpt::approx_lp::{approx_degree, parity_approximant, threshold_degree, ParityMethod};
use dpt::boolean_core::{compose, tensor_xor, PartialBooleanFunction, PartialSignMatrix};
use dpt::factor_norms::{gamma2_dual, gamma2_eps, gamma2_sign, gdm_bound, NormConfig};
use dpt::rational::{factorial, int, ratio};
use dpt::witness_forge::pk_poly;

fn cfg() -> NormConfig {
    NormConfig::default()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * b.abs().max(1.0)
}

#[test]
fn gamma2_of_all_ones_is_one() {
    for (r, c) in [(1, 1), (2, 2), (3, 5), (4, 2)] {
        let v = gamma2_sign(&PartialSignMatrix::all_ones(r, c), &cfg()).unwrap().value;
        assert!(close(v, 1.0), "{r}x{c}: {v}");
    }
}

#[test]
fn gamma2_of_hadamard_is_sqrt_n() {
    for k in 1..=3 {
        let v = gamma2_sign(&PartialSignMatrix::hadamard(k), &cfg()).unwrap().value;
        assert!(close(v, ((1u32 << k) as f64).sqrt()), "k={k}: {v}");
    }
}

#[test]
fn approximate_norms_scale_by_one_minus_eps() {
    let j = PartialSignMatrix::all_ones(3, 5);
    assert!(close(gamma2_eps(&j, 0.25, &cfg()).unwrap().value, 0.75));
    let h4 = PartialSignMatrix::hadamard(2);
    assert!(close(gamma2_eps(&h4, 0.5, &cfg()).unwrap().value, 1.0));
}

#[test]
fn dual_norm_of_hadamard_respects_trace_bound() {
    let h = PartialSignMatrix::hadamard(2).to_real().unwrap();
    let v = gamma2_dual(&h, &cfg()).unwrap().value;
    assert!(v <= 32.0 + 1e-6);
    assert!(close(v, 8.0), "{v}");
}

#[test]
fn discrepancy_bound_on_h16() {
    let b = gdm_bound(&PartialSignMatrix::hadamard(4), &ratio(1, 3), &cfg()).unwrap();
    assert!((b.value - 0.25).abs() < 1e-6, "{}", b.value);
}

#[test]
fn duplicated_row_keeps_gamma2() {
    let h = PartialSignMatrix::hadamard(1);
    let dup = h.submatrix(&[0, 1, 1], &[0, 1]).unwrap();
    let a = gamma2_sign(&h, &cfg()).unwrap().value;
    let b = gamma2_sign(&dup, &cfg()).unwrap().value;
    assert!(close(a, b));
}

#[test]
fn parity_degree_is_full_at_every_error() {
    for n in 1..=4 {
        for eps in [ratio(0, 1), ratio(1, 3), ratio(1, 2), ratio(3, 4)] {
            let r = approx_degree(&PartialBooleanFunction::parity(n), &eps).unwrap();
            assert_eq!(r.degree, n);
            assert!(r.primal_ok && r.dual_ok);
        }
    }
}

#[test]
fn or2_needs_full_degree_at_one_third() {
    assert_eq!(approx_degree(&PartialBooleanFunction::or(2), &ratio(1, 3)).unwrap().degree, 2);
}

#[test]
fn threshold_degrees() {
    assert_eq!(threshold_degree(&PartialBooleanFunction::majority(3)).unwrap().degree, 1);
    assert_eq!(threshold_degree(&PartialBooleanFunction::parity(3)).unwrap().degree, 3);
    assert_eq!(threshold_degree(&PartialBooleanFunction::identity()).unwrap().degree, 1);
}

#[test]
fn parity_interpolation_is_exact() {
    for n in 1..=4 {
        let q = parity_approximant(n, n, n, ParityMethod::Lp).unwrap();
        assert_eq!(q.delta, int(0));
    }
}

#[test]
fn pk_at_all_ones_is_k_factorial() {
    for n in 1..=8 {
        for k in 0..n {
            let p = pk_poly(n, k).unwrap();
            assert_eq!(p.eval_diagonal(&int(1)), dpt::Rational::from_integer(factorial(k as u64)));
            assert!(p.l1_ok());
        }
    }
}

#[test]
fn xor_and_parity_composition_agree() {
    let fs = vec![PartialBooleanFunction::or(2), PartialBooleanFunction::majority(3)];
    let a = tensor_xor(&fs).unwrap();
    let b = compose(&PartialBooleanFunction::parity(2), &fs).unwrap();
    assert_eq!(a, b);
}
