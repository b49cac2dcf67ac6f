use proptest::prelude::*;

use ddfv::harness::orders;
use ddfv::mesh::{quality, MeshFamily};
use ddfv::operators::{bracket_t, div_t, grad_d, inner_lambda, DiamondField, DiscreteField, TensorSpec};
use ddfv::scheme::{energy, mass, project_initial, stationary_state, Potential, SchemeParams};
use ddfv::solver::l1;
use ddfv::{DdfvMesh, Point, Scheme};

fn family() -> impl Strategy<Value = MeshFamily> {
    prop_oneof![
        Just(MeshFamily::Uniform),
        (0.0..0.12f64).prop_map(MeshFamily::Quad),
        (0.05..0.2f64).prop_map(MeshFamily::Kershaw),
    ]
}

fn mesh() -> impl Strategy<Value = DdfvMesh> {
    (family(), 1usize..=2).prop_map(|(f, k)| DdfvMesh::build(f.generate(4 * k).unwrap()).unwrap())
}

fn tensor() -> impl Strategy<Value = TensorSpec> {
    (0.5..2.0f64, 0.5..8.0f64, 0.0..std::f64::consts::PI).prop_map(|(a, b, t)| TensorSpec::rotated(a, b, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orders_are_scale_invariant(
        h0 in 0.05..0.5f64,
        ratios in prop::collection::vec(1.2..3.0f64, 1..5),
        errs in prop::collection::vec(1e-6..1.0f64, 5),
        scale in 1e-3..1e3f64,
    ) {
        let mut h = vec![h0];
        for r in &ratios {
            let last = *h.last().unwrap();
            h.push(last / r);
        }
        let e = &errs[..h.len()];
        let scaled: Vec<f64> = e.iter().map(|x| x * scale).collect();
        for (a, b) in orders(&h, e).iter().zip(orders(&h, &scaled)) {
            match (a, b) {
                (None, None) => {}
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs())),
                _ => prop_assert!(false, "order presence differs"),
            }
        }
    }

    #[test]
    fn duality_for_boundary_vanishing_fields(m in mesh(), seed in any::<u64>()) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let lay = m.layout();
        let xi = DiamondField(
            (0..m.diamonds().len())
                .map(|_| Point::new(rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
                .collect(),
        );
        let mut v = DiscreteField::from_vec(lay, (0..m.n_unknowns()).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect());
        v.boundary_mut().fill(0.0);
        for (i, &b) in m.dual_on_boundary().iter().enumerate() {
            if b {
                v[lay.dual(i)] = 0.0;
            }
        }
        let lhs = bracket_t(&m, &div_t(&m, &xi), &v);
        let rhs = -inner_lambda(&m, &TensorSpec::Identity, &xi, &grad_d(&m, &v));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn gradient_is_exact_on_affine_fields(m in mesh(), a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
        let u = DiscreteField::from_fn(&m, |x| a + b * x.x + c * x.y);
        for g in grad_d(&m, &u).iter() {
            prop_assert!((g - Point::new(b, c)).norm() < 1e-11);
        }
    }

    #[test]
    fn regularity_factors_bound_angles(m in mesh()) {
        let q = quality(&m, None);
        prop_assert!(q.theta_star >= 1.0);
        for ((d, t), tt) in m.diamonds().iter().zip(&q.theta).zip(&q.theta_tilde) {
            prop_assert!(*t >= 1.0 - 1e-14 && *tt >= 1.0 - 1e-14);
            prop_assert!(d.sin_alpha >= 1.0 / q.theta_star - 1e-14);
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point(m in mesh(), lambda in tensor(), rho in 0.2..3.0f64, tilt in -1.0..1.0f64) {
        let params = SchemeParams {
            lambda,
            potential: Potential::new(move |x| -x.y + tilt * x.x),
            ..Default::default()
        };
        let s = Scheme::new(&m, params).unwrap();
        let u = stationary_state(&m, s.potential(), rho);
        let r = l1(&s.weak_residual(u.as_slice(), u.as_slice()).unwrap());
        prop_assert!(r < 1e-10, "residual {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn runs_conserve_mass_and_dissipate_energy(
        m in mesh(),
        lambda in tensor(),
        kappa in prop_oneof![Just(0.0), 0.0..0.5f64],
        beta in 0.2..1.9f64,
        amp in 0.0..0.9f64,
        fx in 1.0..4.0f64,
    ) {
        let params = SchemeParams {
            dt: 0.01,
            t_final: 0.05,
            kappa,
            beta,
            lambda,
            potential: Potential::new(|x| -x.y),
            ..Default::default()
        };
        let s = Scheme::new(&m, params).unwrap();
        let u0 = project_initial(&m, |x| 1.0 + amp * (fx * x.x).cos() * (3.0 * x.y).sin()).unwrap();
        let rep = s.run(&u0, |_, _, _| {}).unwrap();
        prop_assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        let m0 = mass(&m, &u0);
        for r in &rep.records {
            prop_assert!((r.mass - m0).abs() <= 1e-11 * m0);
        }
        for w in rep.records.windows(2) {
            prop_assert!(w[1].energy <= w[0].energy + 1e-9);
        }
        prop_assert!(rep.min_u() > 0.0);
        let e0 = energy(&m, &u0, s.potential());
        prop_assert!((rep.records[0].energy - e0).abs() < 1e-14 * (1.0 + e0.abs()));
    }
}
