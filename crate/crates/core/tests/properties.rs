use driven_dicke::c64;
use driven_dicke::dynamics::{ground_state, propagate_ode, propagate_spectral};
use driven_dicke::linalg::{commutator, dagger, eigvalsh, fro, hermiticity_defect, null_space};
use driven_dicke::liouvillian::{build_liouvillian, spectrum, steady_state};
use driven_dicke::operators::{
    collective_ops, dicke_basis, dipole_bonds, hamiltonian, permutation_operator, Axis, Boundary, ModelParams, Operator,
};
use driven_dicke::rateq::build_rate_matrix;
use driven_dicke::symmetry::{build_group, GroupKind};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = ModelParams> {
    (1usize..=3)
        .prop_flat_map(|n| (Just(n), 0.0f64..5.0, prop::collection::vec(-4.0f64..4.0, n)))
        .prop_map(|(n, omega, w)| ModelParams::new(n, omega, w).unwrap())
}

/// Distinct detunings and a nonzero drive, so the steady state is unique.
fn generic_model() -> impl Strategy<Value = ModelParams> {
    (1usize..=3, 0.2f64..5.0, -3.0f64..3.0, 0.3f64..1.5).prop_map(|(n, omega, w0, step)| {
        let w = (0..n).map(|k| w0 + step * k as f64 * (1.0 + 0.1 * k as f64)).collect();
        ModelParams::new(n, omega, w).unwrap()
    })
}

fn random_density(n: usize, seed: &[f64]) -> Operator {
    let d = 1 << n;
    let a = Operator::from_fn(d, d, |i, j| c64::new(seed[(i * d + j) % seed.len()], seed[(i + 3 * j + 1) % seed.len()]));
    let rho = &a * dagger(a.as_ref());
    let tr: c64 = (0..d).map(|i| rho[(i, i)]).sum();
    driven_dicke::linalg::scale(rho.as_ref(), c64::new(1.0 / tr.re, 0.0))
}

fn trace(a: &Operator) -> c64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_preserves_trace(p in model()) {
        let l = build_liouvillian(&p).unwrap();
        let d = l.hilbert_dim();
        for c in 0..l.dim() {
            let s: c64 = (0..d).map(|i| l.matrix[(i * d + i, c)]).sum();
            prop_assert!(s.norm() < 1e-10);
        }
    }

    #[test]
    fn generator_preserves_hermiticity(p in model(), seed in prop::collection::vec(-1.0f64..1.0, 7)) {
        let l = build_liouvillian(&p).unwrap();
        let rho = random_density(p.n, &seed);
        let out = l.apply(&rho);
        prop_assert!(hermiticity_defect(out.as_ref()) < 1e-10 * (1.0 + fro(out.as_ref())));
        prop_assert!(trace(&out).norm() < 1e-10);
    }

    #[test]
    fn spectrum_in_left_half_plane_and_conjugate_closed(p in model()) {
        let spec = spectrum(&build_liouvillian(&p).unwrap()).unwrap();
        for z in &spec.eigenvalues {
            prop_assert!(z.re <= 1e-9);
            let nearest = spec.eigenvalues.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-8);
        }
    }

    #[test]
    fn steady_state_is_a_density_matrix(p in generic_model()) {
        let spec = spectrum(&build_liouvillian(&p).unwrap()).unwrap();
        let rho = steady_state(&spec).unwrap();
        prop_assert!(hermiticity_defect(rho.as_ref()) < 1e-10);
        prop_assert!((trace(&rho).re - 1.0).abs() < 1e-10);
        prop_assert!(eigvalsh(rho.as_ref()).unwrap()[0] > -1e-8);
    }

    #[test]
    fn spectral_and_ode_propagation_agree(p in generic_model(), t in 0.1f64..4.0) {
        let l = build_liouvillian(&p).unwrap();
        let spec = spectrum(&l).unwrap();
        let times = [0.0, t];
        let a = propagate_spectral(&spec, &ground_state(p.n), &times).unwrap();
        let b = propagate_ode(&l, &ground_state(p.n), &times).unwrap();
        prop_assert!(fro((&a.states[1] - &b.states[1]).as_ref()) < 1e-6);
    }

    #[test]
    fn rate_matrix_conserves_probability(p in model()) {
        let r = build_rate_matrix(&hamiltonian(&p), &collective_ops(p.n).jminus, 1.0, None).unwrap();
        prop_assert!(r.conservation_defect() < 1e-10);
        prop_assert!(r.min_off_diagonal() >= -1e-12);
    }

    #[test]
    fn spectrum_covariant_under_relabelling(p in model(), shift in 0usize..3) {
        let n = p.n;
        let images: Vec<usize> = (0..n).map(|k| (k + shift) % n).collect();
        let mut q = p.clone();
        for k in 0..n {
            q.detunings[images[k]] = p.detunings[k];
        }
        let a = spectrum(&build_liouvillian(&p).unwrap()).unwrap();
        let b = spectrum(&build_liouvillian(&q).unwrap()).unwrap();
        for z in &a.eigenvalues {
            let nearest = b.eigenvalues.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-7);
        }
        let perm = permutation_operator(&images);
        let conj = &perm * hamiltonian(&p) * dagger(perm.as_ref());
        prop_assert!(fro((&conj - hamiltonian(&q)).as_ref()) < 1e-10);
    }

    #[test]
    fn clean_hamiltonian_commutes_with_symmetries(n in 2usize..=4, omega in 0.0f64..5.0, delta in 0.1f64..2.0, ring in any::<bool>()) {
        let (boundary, kind) = if ring { (Boundary::Periodic, GroupKind::D) } else { (Boundary::Open, GroupKind::Cs) };
        let p = ModelParams::new(n, omega, vec![0.0; n]).unwrap().with_dipole(delta, boundary).unwrap();
        let h = hamiltonian(&p);
        let g = build_group(kind, n).unwrap();
        for e in 0..g.order() {
            prop_assert!(fro(commutator(h.as_ref(), g.operator(e).as_ref()).as_ref()) < 1e-10);
        }
        prop_assert!(!dipole_bonds(n, boundary).is_empty());
        let drive_only = ModelParams::new(n, omega, vec![0.0; n]).unwrap();
        let j2 = collective_ops(n).j2();
        prop_assert!(fro(commutator(hamiltonian(&drive_only).as_ref(), j2.as_ref()).as_ref()) < 1e-10);
    }
}

#[test]
fn lowering_kernel_dimension_is_central_binomial() {
    for (n, want) in [(1, 1), (2, 2), (3, 3), (4, 6), (5, 10)] {
        assert_eq!(null_space(collective_ops(n).jminus.as_ref(), 1e-10).unwrap().ncols(), want, "N={n}");
    }
}

#[test]
fn spin_projectors_agree_between_quantization_axes() {
    for n in 1..=4 {
        let z = dicke_basis(n, Axis::Z).unwrap();
        let x = dicke_basis(n, Axis::X).unwrap();
        for j in driven_dicke::operators::allowed_j(n) {
            let proj = |b: &driven_dicke::DickeBasis| {
                let cols: Vec<usize> = (0..b.len()).filter(|&k| b.labels[k].j == j).collect();
                let mut p = Operator::zeros(1 << n, 1 << n);
                for k in cols {
                    let v = b.vector(k);
                    p += v * v.adjoint();
                }
                p
            };
            assert!(fro((&proj(&z) - &proj(&x)).as_ref()) < 1e-10, "N={n} j={j}");
        }
    }
}
