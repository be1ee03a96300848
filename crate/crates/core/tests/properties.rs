use approx::assert_abs_diff_eq;
use fermidyn_core::hamiltonian::{Coefficient, FactorKind, ModeFactor, OperatorTerm};
use fermidyn_core::tensor::{fock_index, vector_norm_sq};
use fermidyn_core::{
    build_operators, check_hermitian, eigendecompose, parse, propagator, verify_car, ComplexMatrix,
    FermionicSystem, FockState, OperatorExpression,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), rows * cols)
        .prop_map(move |data| ComplexMatrix::from_vec(rows, cols, data).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim, dim).prop_map(|a| {
        let sum = &a + &a.adjoint();
        sum.scale(Complex64::new(0.5, 0.0))
    })
}

fn coefficient() -> impl Strategy<Value = Coefficient> {
    (
        -3.0f64..3.0,
        any::<bool>(),
        prop::collection::vec(prop::sample::select(vec!["lambda", "omega", "g2"]), 0..3),
    )
        .prop_map(|(value, imaginary, params)| {
            let mut c = Coefficient::real(value);
            if imaginary {
                c = c.times(&Coefficient::imaginary_unit());
            }
            for p in params {
                c = c.times(&Coefficient::parameter(p));
            }
            c
        })
}

fn factor(n_modes: usize) -> impl Strategy<Value = ModeFactor> {
    (
        prop::sample::select(vec![
            FactorKind::Lower,
            FactorKind::Raise,
            FactorKind::Number,
        ]),
        1..=n_modes,
    )
        .prop_map(|(kind, mode)| ModeFactor { kind, mode })
}

fn expression(n_modes: usize) -> impl Strategy<Value = OperatorExpression> {
    let term = (coefficient(), prop::collection::vec(factor(n_modes), 0..4)).prop_map(
        |(coefficient, factors)| OperatorTerm {
            coefficient,
            factors,
        },
    );
    prop::collection::vec(term, 1..5).prop_map(OperatorExpression::from_terms)
}

fn bound(expr: OperatorExpression) -> OperatorExpression {
    expr.with_parameters([("lambda", 0.7), ("omega", -1.3), ("g2", 2.1)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_entries(p in 1usize..=4, q in 1usize..=4, r in 1usize..=4, s in 1usize..=4, seed in any::<u64>()) {
        let a = ComplexMatrix::from_fn(p, q, |i, j| Complex64::new((seed % 7) as f64 + i as f64, j as f64 - 1.5)).unwrap();
        let b = ComplexMatrix::from_fn(r, s, |i, j| Complex64::new(j as f64 * 0.5, i as f64 - (seed % 3) as f64)).unwrap();
        let k = a.kron(&b);
        prop_assert_eq!((k.rows(), k.cols()), (p * r, q * s));
        for i in 0..p {
            for j in 0..q {
                for x in 0..r {
                    for y in 0..s {
                        prop_assert_eq!(k[(i * r + x, j * s + y)], a[(i, j)] * b[(x, y)]);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_reverses_products((a, b) in (1usize..=64, 1usize..=16, 1usize..=16)
        .prop_flat_map(|(n, m, k)| (matrix(n, m), matrix(m, k)))) {
        let lhs = a.matmul(&b).unwrap().adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-13);
    }

    #[test]
    fn fock_index_round_trip(n in 1usize..=8, raw in any::<u32>()) {
        let index = raw as usize % (1 << n);
        let state = FockState::from_index(index, n).unwrap();
        prop_assert_eq!(fock_index(&state), index);
        let again = FockState::from_occupations(&state.occupations()).unwrap();
        prop_assert_eq!(again, state);
        let expected: usize = state.occupations().iter().enumerate().map(|(k, &o)| (o as usize) << k).sum();
        prop_assert_eq!(expected, index);
    }

    #[test]
    fn total_number_counts_particles(n in 1usize..=8, raw in any::<u32>()) {
        let ops = build_operators(&FermionicSystem::new(n).unwrap()).unwrap();
        let state = FockState::from_index(raw as usize % (1 << n), n).unwrap();
        let mut phi = vec![Complex64::default(); 1 << n];
        phi[state.index()] = Complex64::new(1.0, 0.0);
        let mut total = vec![Complex64::default(); 1 << n];
        for j in 1..=n {
            let v = ops.number(j).unwrap().apply(&phi).unwrap();
            total.iter_mut().zip(v).for_each(|(t, x)| *t += x);
        }
        let count = state.particle_count() as f64;
        for (k, z) in total.iter().enumerate() {
            let want = if k == state.index() { count } else { 0.0 };
            prop_assert_eq!(*z, Complex64::new(want, 0.0));
        }
    }

    #[test]
    fn expression_plus_adjoint_is_hermitian(expr in expression(3)) {
        let ops = build_operators(&FermionicSystem::new(3).unwrap()).unwrap();
        let sym = bound(expr.plus(&expr.adjoint()));
        let h = sym.assemble(&ops).unwrap();
        prop_assert!(check_hermitian(&h).unwrap().max_deviation <= 1e-14);
    }

    #[test]
    fn postfix_hc_matches_explicit_adjoint(expr in expression(3)) {
        let ops = build_operators(&FermionicSystem::new(3).unwrap()).unwrap();
        let text = format!("({expr}) h.c.");
        let via_text = bound(parse(&text).unwrap()).assemble(&ops).unwrap();
        let explicit = bound(expr.plus(&expr.adjoint())).assemble(&ops).unwrap();
        prop_assert!(via_text.max_abs_diff(&explicit).unwrap() <= 1e-14);
    }

    #[test]
    fn render_parse_round_trip(expr in expression(5)) {
        let text = expr.to_string();
        let reparsed = parse(&text).unwrap();
        prop_assert_eq!(reparsed.terms(), expr.terms(), "{}", text);
        prop_assert_eq!(reparsed.to_string(), text);
    }

    #[test]
    fn assemble_is_linear(e1 in expression(3), e2 in expression(3), a in -3.0f64..3.0) {
        let ops = build_operators(&FermionicSystem::new(3).unwrap()).unwrap();
        let lhs = bound(e1.scaled(a).plus(&e2)).assemble(&ops).unwrap();
        let m1 = bound(e1.clone()).assemble(&ops).unwrap();
        let m2 = bound(e2).assemble(&ops).unwrap();
        let rhs = &m1.scale(Complex64::new(a, 0.0)) + &m2;
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
        let doubled = bound(parse(&format!("2*({e1})")).unwrap()).assemble(&ops).unwrap();
        prop_assert!(doubled.max_abs_diff(&m1.scale(Complex64::new(2.0, 0.0))).unwrap() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn car_holds_up_to_eight_modes(n in 1usize..=8) {
        let ops = build_operators(&FermionicSystem::new(n).unwrap()).unwrap();
        prop_assert_eq!(verify_car(&ops).unwrap().max_violation, 0.0);
    }

    #[test]
    fn decomposition_reconstructs(h in prop::sample::select(vec![2usize, 5, 16, 64, 256]).prop_flat_map(hermitian)) {
        let spec = eigendecompose(&h).unwrap();
        prop_assert!(spec.reconstruct().max_abs_diff(&h).unwrap() <= 1e-11);
        let sum: f64 = spec.eigenvalues().iter().sum();
        prop_assert!((sum - h.trace().re).abs() <= 1e-10);
        let u = spec.unitary();
        let gram = u.matmul(&u.adjoint()).unwrap();
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(h.rows())).unwrap() <= 1e-12);
    }

    #[test]
    fn propagator_matches_taylor_series_on_degenerate_spectrum(lambda in -2.0f64..2.0, t in -2.5f64..2.5) {
        // spectrum {0, 0, ±λ}: the zero eigenspace is two-dimensional
        let ops = build_operators(&FermionicSystem::new(2).unwrap()).unwrap();
        let h = parse("lambda*(c(2)*c'(1) + c(1)*c'(2))").unwrap().with_parameter("lambda", lambda).assemble(&ops).unwrap();
        let spec = eigendecompose(&h).unwrap();
        let p = propagator(&spec, t).matrix;

        let generator = h.scale(Complex64::new(0.0, t));
        let mut term = ComplexMatrix::identity(4);
        let mut sum = term.clone();
        for k in 1..=30 {
            term = term.matmul(&generator).unwrap().scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = &sum + &term;
        }
        prop_assert!(p.max_abs_diff(&sum).unwrap() <= 1e-9);
    }

    #[test]
    fn propagated_states_stay_normalized(h in hermitian(16), t in -5.0f64..5.0, index in 0usize..16) {
        let spec = eigendecompose(&h).unwrap();
        let mut v = vec![Complex64::default(); 16];
        v[index] = Complex64::new(1.0, 0.0);
        let w = spec.propagate(&v, t).unwrap();
        assert_abs_diff_eq!(vector_norm_sq(&w), 1.0, epsilon = 1e-12);
    }
}
