use gspecies::fixtures::{c3_gsp, random_gsp};
use gspecies::gsp::{cyclic_derivative, elem_add, Potential};
use gspecies::json::{canonical, rep_from_json, rep_to_json, species_from_json, species_to_json};
use gspecies::linalg::q;
use gspecies::mutation::{cycle_basis, mutate};
use gspecies::poly::{IntPoly, SFRational};
use gspecies::reps::mutate_gspdr_sequence;
use gspecies::seed::{compute_fg, f_shape_ok, find_skew_symmetrizer, mutate_matrix, y_seed_mutate, ExchangeMatrix, YSeed};
use gspecies::species::species_from_matrix;
use gspecies::verify::conjecture_suites;
use gspecies::Exec;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `B = D S` with `S` skew-symmetric.
fn exchange_matrix(max_n: usize) -> impl Strategy<Value = ExchangeMatrix> {
    bounded_matrix(max_n, 2)
}

fn bounded_matrix(max_n: usize, max_s: i64) -> impl Strategy<Value = ExchangeMatrix> {
    (2..=max_n).prop_flat_map(move |n| (prop::collection::vec(1i64..=2, n), prop::collection::vec(-max_s..=max_s, n * (n - 1) / 2))).prop_map(|(d, upper)| {
        let n = d.len();
        let mut s = vec![vec![0i64; n]; n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let x = it.next().unwrap();
                s[i][j] = x;
                s[j][i] = -x;
            }
        }
        ExchangeMatrix::new((0..n).map(|i| (0..n).map(|j| d[i] * s[i][j]).collect()).collect()).unwrap()
    })
}

fn sequence(n: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, 0..=max_len).prop_map(|mut v| {
        v.dedup();
        v
    })
}

fn poly(nvars: usize) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, nvars), -3i64..=3), 1..5)
        .prop_map(move |terms| IntPoly::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_mutation_is_an_involution(b in exchange_matrix(5), k in 0usize..5) {
        let k = k % b.size();
        prop_assert_eq!(mutate_matrix(&mutate_matrix(&b, k).unwrap(), k).unwrap(), b);
    }

    #[test]
    fn y_seed_mutation_is_an_involution(b in exchange_matrix(4), k in 0usize..4) {
        let k = k % b.size();
        let y = YSeed::free(b);
        prop_assert_eq!(y_seed_mutate(&y_seed_mutate(&y, k).unwrap(), k).unwrap(), y);
    }

    #[test]
    fn species_from_matrix_round_trips(b in exchange_matrix(5)) {
        let d = find_skew_symmetrizer(&b).unwrap();
        let sp = species_from_matrix(&b, &d).unwrap();
        prop_assert_eq!(sp.exchange_matrix().unwrap(), b);
        let text = canonical(&species_to_json(&sp));
        let back = species_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(canonical(&species_to_json(&back)), text);
        prop_assert_eq!(back, sp);
    }

    #[test]
    fn species_mutation_projects_to_matrix_mutation(b in exchange_matrix(4), k in 0usize..4) {
        let k = k % b.size();
        let d = find_skew_symmetrizer(&b).unwrap();
        let g = gspecies::gsp::Gsp::from_species(&species_from_matrix(&b, &d).unwrap(), 4);
        if let Ok(r) = mutate(&g, k) {
            if r.reduced().is_2_acyclic() {
                prop_assert_eq!(r.reduced().species().exchange_matrix().unwrap().rows, mutate_matrix(&b, k).unwrap().rows);
            }
        }
    }

    #[test]
    fn f_polynomials_have_constant_term_and_top_monomial_one(b in exchange_matrix(3), seq in sequence(3, 4), k in 0usize..3) {
        let n = b.size();
        let seq: Vec<usize> = seq.into_iter().map(|i| i % n).collect::<Vec<_>>();
        let mut seq2 = seq.clone();
        seq2.dedup();
        let p = compute_fg(&b, &seq2, k % n).unwrap();
        prop_assert_eq!(f_shape_ok(&p.f), (true, true));
    }

    #[test]
    fn sfrational_arithmetic_is_canonical(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let x = SFRational::new(a.clone(), b.clone());
        let y = SFRational::new(c.clone(), b.clone());
        prop_assert_eq!(x.mul(&y).div(&y), x.clone());
        prop_assert_eq!(x.add(&y), SFRational::new(a.add(&c), b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_derivative_is_linear_and_rotation_invariant(seed in any::<u64>(), c1 in -3i64..=3, c2 in -3i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gsp(&mut rng, 5);
        let cycles = cycle_basis(&g, 4);
        prop_assume!(!cycles.is_empty());
        let mut s1 = Potential::zero();
        let mut s2 = Potential::zero();
        let mut rotated = Potential::zero();
        for (i, w) in cycles.iter().enumerate() {
            s1.add_cycle(w, q(i as i64 + 1));
            s2.add_cycle(w, q(2 - i as i64));
            let r = i % w.len();
            let rot: Vec<u32> = w[r..].iter().chain(&w[..r]).copied().collect();
            rotated.add_cycle(&rot, q(i as i64 + 1));
        }
        prop_assert_eq!(&rotated, &s1);
        let mut comb = Potential::zero();
        for (w, c) in &s1.terms {
            comb.add_cycle(w, c * q(c1));
        }
        for (w, c) in &s2.terms {
            comb.add_cycle(w, c * q(c2));
        }
        for a in 0..g.arrows.len() as u32 {
            let lhs = cyclic_derivative(&comb, a);
            let rhs = elem_add(&elem_add(&Default::default(), &cyclic_derivative(&s1, a), &q(c1)), &cyclic_derivative(&s2, a), &q(c2));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gsp_mutation_is_an_involution_on_species(seed in any::<u64>(), k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gsp(&mut rng, 5);
        let k = k % g.labels.len();
        if let Ok(once) = mutate(&g, k) {
            if once.reduced().is_2_acyclic_at(k) {
                let twice = mutate(once.reduced(), k).unwrap();
                prop_assert_eq!(twice.reduced().species(), g.species());
            }
        }
    }

    #[test]
    fn representation_json_round_trips(seq in sequence(3, 4), c in 0usize..4) {
        let g = c3_gsp();
        let mut deco = vec![0; 4];
        deco[c] = 1;
        let (h, r) = mutate_gspdr_sequence(&g, &deco, &seq).unwrap();
        let v = rep_to_json(&h, &r);
        let back = rep_from_json(&h, &v).unwrap();
        prop_assert_eq!(canonical(&rep_to_json(&h, &back)), canonical(&v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn parallel_and_sequential_reports_agree(b in bounded_matrix(3, 1)) {
        prop_assert_eq!(conjecture_suites(&b, 2, Exec::Parallel, 1), conjecture_suites(&b, 2, Exec::Sequential, 1));
    }
}
