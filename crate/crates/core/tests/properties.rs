use dpt::approx_lp::{approx_degree, parity_approximant, ParityMethod};
use dpt::boolean_core::{fourier_transform, tensor_xor, MultilinearPolynomial, PartialBooleanFunction, PartialSignMatrix};
use dpt::factor_norms::{gamma2_eps, gamma2_sign, NormConfig};
use dpt::rational::{int, ratio, Rational};
use dpt::theorem_bench::{bucket_partition, Relation, Status, VerificationReport};
use dpt::witness_forge::{build_psi_k, pk_poly};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=5), 1 << n).prop_map(|v| v.into_iter().map(|(a, b)| ratio(a, b)).collect())
}

fn sign_function(n: usize) -> impl Strategy<Value = PartialBooleanFunction> {
    prop::collection::vec(prop::sample::select(vec![1i8, -1]), 1 << n)
        .prop_map(move |v| PartialBooleanFunction::from_values(n, v).unwrap())
}

fn partial_function(n: usize) -> impl Strategy<Value = PartialBooleanFunction> {
    prop::collection::vec(prop::sample::select(vec![1i8, -1, 0]), 1 << n)
        .prop_filter_map("nonempty domain", move |v| PartialBooleanFunction::from_values(n, v).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fourier_round_trip(n in 0usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<i8> = (0..1usize << n).map(|_| if rand::Rng::gen_bool(&mut rng, 0.5) { 1 } else { -1 }).collect();
        let f = PartialBooleanFunction::from_values(n, values.clone()).unwrap();
        let p = fourier_transform(&f).unwrap();
        let back: Vec<Rational> = values.iter().map(|&v| int(v as i64)).collect();
        prop_assert_eq!(p.to_table(), back);
        prop_assert_eq!(p.parseval_sum(), int(1));
    }

    #[test]
    fn vertex_evaluation_matches_table(t in (1usize..=6).prop_flat_map(table)) {
        let p = MultilinearPolynomial::from_table(&t).unwrap();
        let n = p.num_vars();
        for (x, v) in t.iter().enumerate() {
            let z: Vec<Rational> = (0..n).map(|i| if x >> i & 1 == 1 { int(-1) } else { int(1) }).collect();
            prop_assert_eq!(&p.eval(&z).unwrap(), v);
            prop_assert_eq!(&p.eval_vertex(x), v);
        }
    }

    #[test]
    fn fourier_mass_is_sub_additive_and_multiplicative((f, g) in (1usize..=8).prop_flat_map(|n| (table(n), table(n)))) {
        let f = MultilinearPolynomial::from_table(&f).unwrap();
        let g = MultilinearPolynomial::from_table(&g).unwrap();
        prop_assert!(f.add(&g).unwrap().fourier_l1() <= f.fourier_l1() + g.fourier_l1());
        prop_assert!(f.mul(&g).unwrap().fourier_l1() <= f.fourier_l1() * g.fourier_l1());
    }

    #[test]
    fn tensor_xor_is_associative(a in sign_function(2), b in partial_function(1), c in sign_function(2)) {
        let flat = tensor_xor(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let left = tensor_xor(&[tensor_xor(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = tensor_xor(&[a, tensor_xor(&[b, c]).unwrap()]).unwrap();
        prop_assert_eq!(&flat, &left);
        prop_assert_eq!(&flat, &right);
    }

    #[test]
    fn degree_is_certified_and_monotone(f in partial_function(3)) {
        let mut last = usize::MAX;
        for (a, b) in [(0, 1), (1, 5), (1, 3), (1, 2), (2, 3), (9, 10)] {
            let r = approx_degree(&f, &ratio(a, b)).unwrap();
            prop_assert!(r.primal_ok && r.dual_ok);
            prop_assert!(r.degree <= last);
            last = r.degree;
        }
    }

    #[test]
    fn lp_parity_error_beats_closed_form(n in 1usize..=6, ell in 0usize..=6) {
        let ell = ell.min(n);
        let lp = parity_approximant(n, 0, ell, ParityMethod::Lp).unwrap();
        let kkl = parity_approximant(n, 0, ell, ParityMethod::Kkl).unwrap();
        prop_assert!(lp.delta <= kkl.delta);
    }

    #[test]
    fn pk_even_is_nonnegative(n in 1usize..=8, k in 0usize..=7, z in prop::collection::vec(-64i64..=64, 8)) {
        prop_assume!(k < n && k % 2 == 0);
        let p = pk_poly(n, k).unwrap();
        let point: Vec<Rational> = z[..n].iter().map(|&v| ratio(v, 64)).collect();
        prop_assert!(p.eval(&point).unwrap() >= int(0));
    }

    #[test]
    fn product_witness_mass_is_rederivable(k in 0usize..=1) {
        let g = PartialBooleanFunction::majority(3);
        let eps = ratio(1, 3);
        let r = approx_degree(&g, &(int(1) - &eps)).unwrap();
        let psi = dpt::approx_lp::dual_witness_at(&g, &(int(1) - &eps), r.degree - 1).unwrap().unwrap();
        let w = build_psi_k(&[psi.clone(), psi], &[g.clone(), g], k, &eps).unwrap();
        let table = w.composite.table();
        let l1: Rational = table.iter().map(|v| if v < &int(0) { -v.clone() } else { v.clone() }).sum();
        prop_assert_eq!(&l1, w.composite.witness.l1_norm());
        prop_assert!(w.composite.all_checks_pass());
    }

    #[test]
    fn report_status_matches_stored_sides(a in -20i64..20, b in -20i64..20, rel in 0usize..3) {
        let relation = [Relation::Ge, Relation::Gt, Relation::Eq][rel];
        let r = VerificationReport::exact("g", "s", &int(a), &int(b), relation);
        let holds = match relation { Relation::Ge => a >= b, Relation::Gt => a > b, Relation::Eq => a == b };
        prop_assert_eq!(r.status == Status::Pass, holds);
        prop_assert_eq!(r.status, r.expected_status());
        let json = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.expected_status(), r.status);
    }

    #[test]
    fn bucketing_inequality(a in prop::collection::vec(0.0f64..1e6, 1..=20)) {
        prop_assume!(a.iter().any(|v| *v > 0.0));
        prop_assert!(bucket_partition(&a).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn approximate_norm_is_monotone(seed in any::<u64>(), r in 2usize..=3, c in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PartialSignMatrix::random(r, c, &mut rng);
        let cfg = NormConfig::default();
        let exact = gamma2_sign(&f, &cfg).unwrap();
        let zero = gamma2_eps(&f, 0.0, &cfg).unwrap();
        prop_assert!((exact.value - zero.value).abs() <= 1e-6 * exact.value.max(1.0));
        let mut last = f64::INFINITY;
        for eps in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9] {
            let cert = gamma2_eps(&f, eps, &cfg).unwrap();
            prop_assert!(cert.lower <= cert.upper + 1e-9);
            prop_assert!(cert.value <= last + 1e-6);
            last = cert.value;
        }
    }
}
