use gapclique_core::cnf::{
    parse_dimacs, random_normalized_cnf, sat_bruteforce, tovey_normalize, CnfFormula,
};
use gapclique_core::ff::{bilinear_f, poly_eval, FieldMat, FieldVec, PrimeField, VecCodec};
use gapclique_core::ldt::{
    ldt_coefficients, reject_rate, self_correct, LdtParams, RateMode, RejectRate, VecPoly,
};
use gapclique_core::vectorsum::{
    check_gadget_properties, reduce_sat_to_vectorsum, solve_vectorsum_bruteforce, VectorSumInstance,
};
use gapclique_core::Fraction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(vec![5u32, 7, 11, 13]).prop_map(|p| PrimeField::new(p).unwrap())
}

fn vec_in(f: PrimeField, len: usize) -> impl Strategy<Value = FieldVec> {
    prop::collection::vec(0..f.modulus(), len).prop_map(move |e| FieldVec::new(f, e))
}

proptest! {
    #[test]
    fn nonzero_elements_invert(f in field(), a in 1u32..13) {
        let a = a % f.modulus();
        prop_assume!(a != 0);
        let inv = f.inv(a).unwrap();
        prop_assert_eq!(f.mul(a, inv), 1);
        prop_assert_eq!(f.pow(a, f.modulus() as u64 - 1), 1);
    }

    #[test]
    fn field_axioms(f in field(), a in 0u32..13, b in 0u32..13, c in 0u32..13) {
        let (a, b, c) = (a % f.modulus(), b % f.modulus(), c % f.modulus());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
    }

    #[test]
    fn bilinear_in_both_arguments(seed in any::<u64>(), s in 0u32..5) {
        let f = PrimeField::F5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<FieldMat> = (0..3).map(|_| FieldMat::random(f, 2, 3, &mut rng)).collect();
        let a1 = FieldVec::new(f, [1, 4]);
        let a2 = FieldVec::new(f, [3, 0]);
        let v1 = FieldVec::new(f, [2, 2, 1]);
        let v2 = FieldVec::new(f, [0, 3, 4]);
        let mut sum_a = a1.clone();
        sum_a.add_scaled(s, &a2);
        let lhs = bilinear_f(&sum_a, &v1, &mats).unwrap();
        let mut rhs = bilinear_f(&a1, &v1, &mats).unwrap();
        rhs.add_scaled(s, &bilinear_f(&a2, &v1, &mats).unwrap());
        prop_assert_eq!(lhs, rhs);
        let lhs = bilinear_f(&a1, &(&v1 + &v2), &mats).unwrap();
        let rhs = &bilinear_f(&a1, &v1, &mats).unwrap() + &bilinear_f(&a1, &v2, &mats).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn codec_matches_vector_arithmetic((a, b) in (1usize..5).prop_flat_map(|n| (vec_in(PrimeField::F5, n), vec_in(PrimeField::F5, n))), s in 0u32..5) {
        let c = VecCodec::new(PrimeField::F5, a.len()).unwrap();
        let (pa, pb) = (c.pack_vec(&a), c.pack_vec(&b));
        prop_assert_eq!(c.unpack_vec(pa), a.clone());
        let mut expect = a.clone();
        expect.add_scaled(s, &b);
        prop_assert_eq!(c.unpack_vec(c.add_scaled(pa, s, pb)), expect);
        prop_assert_eq!(c.unpack_vec(c.sub(pa, pb)), &a - &b);
    }

    #[test]
    fn rank_plus_kernel(seed in any::<u64>(), rows in 1usize..5, cols in 1usize..5) {
        let f = PrimeField::F5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = FieldMat::random(f, rows, cols, &mut rng);
        match m.kernel_vector() {
            Some(v) => {
                prop_assert!(m.rank() < cols);
                prop_assert!(!v.is_zero());
                prop_assert!(m.mul_vec(&v).unwrap().is_zero());
            }
            None => prop_assert_eq!(m.rank(), cols),
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn tovey_is_equisatisfiable_and_normalized(seed in any::<u64>(), n in 3u32..7, m in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gapclique_core::cnf::random_3cnf(n, m, &mut rng);
        let g = tovey_normalize(&f);
        prop_assert!(g.is_normalized());
        let sf = sat_bruteforce(&f).unwrap().is_some();
        let sg = sat_bruteforce(&g).unwrap().is_some();
        prop_assert_eq!(sf, sg);
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), n in 1u32..10, m in 0usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_normalized_cnf(n, m, &[2, 3], &mut rng);
        let text = f.to_dimacs();
        let back = parse_dimacs(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_dimacs(), text);
    }

    #[test]
    fn reduction_agrees_with_sat(seed in any::<u64>(), n in 3u32..9, m in 1usize..7, k in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_normalized_cnf(n, m, &[2, 3], &mut rng);
        prop_assume!(f.num_clauses() >= k);
        let red = reduce_sat_to_vectorsum(&f, k).unwrap();
        let sat = sat_bruteforce(&f).unwrap();
        let vs = solve_vectorsum_bruteforce(&red.instance, 1 << 24).unwrap();
        prop_assert_eq!(sat.is_some(), vs.is_some());
        prop_assert!(check_gadget_properties(&red.instance).passed());
        prop_assert_eq!(red.instance.dim(), red.layout.x_vars().len() + 2 * red.layout.y_vars().len());
        if let Some(a) = sat {
            let w = red.witness_from_assignment(&f, &a).unwrap();
            prop_assert!(red.instance.is_witness(&w));
        }
        let back = VectorSumInstance::from_text(&red.instance.to_text()).unwrap();
        prop_assert_eq!(back, red.instance);
    }

    #[test]
    fn low_degree_polynomials_never_rejected(seed in any::<u64>(), m in 1usize..3, d in 0u32..3, ell in 1usize..3) {
        let f = PrimeField::F5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = VecPoly::random(f, m, ell, d, &mut rng);
        let table = poly.tabulate();
        let params = LdtParams::new(f, d).unwrap();
        let rate = reject_rate(&table, &params, RateMode::Exhaustive { budget: 1 << 20 }).unwrap();
        prop_assert_eq!(rate, RejectRate::Exact(Fraction::new(0, 1)));
        let x = vec![1u32; m];
        let corrected = self_correct(&table, &x, &params).unwrap();
        prop_assert_eq!(corrected.entries(), &poly.eval(&x)[..]);
    }

    #[test]
    fn interpolation_identity(f in prop::sample::select(vec![5u32, 7]), d in 0u32..3, seed in any::<u64>()) {
        let f = PrimeField::new(f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<FieldVec> = (0..=d).map(|_| FieldVec::new(f, [rand::Rng::gen_range(&mut rng, 0..f.modulus())])).collect();
        let alphas = ldt_coefficients(d, f).unwrap();
        for e in f.elements() {
            let mut acc = FieldVec::zeros(f, 1);
            for (i, &a) in alphas.iter().enumerate() {
                acc.add_scaled(a, &poly_eval(&coeffs, f.add(e, i as u32)).unwrap());
            }
            prop_assert!(acc.is_zero());
        }
    }
}

#[test]
fn unsatisfiable_formula_reduces_to_no_instance() {
    let f = CnfFormula::new(2, vec![vec![1, 2], vec![-1, 2], vec![1, -2], vec![-1, -2]]).unwrap();
    let g = tovey_normalize(&f);
    let red = reduce_sat_to_vectorsum(&g, 2).unwrap();
    assert!(sat_bruteforce(&g).unwrap().is_none());
    assert!(solve_vectorsum_bruteforce(&red.instance, 1 << 20)
        .unwrap()
        .is_none());
}
