//! Invariants over random inputs.

use proptest::prelude::*;

use thirdgrade::control::project_admissible;
use thirdgrade::io::{decode, encode};
use thirdgrade::sampling::{random_field, random_smooth_trajectory, rng};
use thirdgrade::spectral::{
    apply_modified_stokes, constitutive_terms, invert_modified_stokes, l2_inner, norm, trilinear_b,
};
use thirdgrade::trajectory::time_norm;
use thirdgrade::{Model, ModelParams, NormKind, SpectralBasis, TrajectoryKind};

fn basis(max_mode: usize, alpha1: f64) -> SpectralBasis {
    SpectralBasis::new(max_mode, alpha1).unwrap()
}

fn model() -> Model {
    let params = ModelParams::new(0.5, 0.1, 0.05, 0.2).unwrap();
    Model::new(basis(3, 0.1), params).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trilinear_is_skew(seed in any::<u64>(), m in 1usize..6, alpha1 in 0.0f64..1.0) {
        let b = basis(m, alpha1);
        let mut r = rng(seed);
        let y = random_field(&b, &mut r, 1.0);
        let z = random_field(&b, &mut r, 1.0);
        let phi = random_field(&b, &mut r, 1.0);
        let s = trilinear_b(&b, &y, &z, &phi).unwrap() + trilinear_b(&b, &y, &phi, &z).unwrap();
        prop_assert!(s.abs() < 1e-10);
    }

    #[test]
    fn modified_stokes_round_trip(seed in any::<u64>(), alpha1 in 0.0f64..2.0) {
        let b = basis(4, alpha1);
        let f = random_field(&b, &mut rng(seed), 1.0);
        let back = apply_modified_stokes(&b, &invert_modified_stokes(&b, &f).unwrap()).unwrap();
        for (x, y) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval(seed in any::<u64>(), m in 1usize..6) {
        let b = basis(m, 0.3);
        let f = random_field(&b, &mut rng(seed), 1.0);
        let g = b.to_grid(&f).unwrap();
        let grid_sq: Vec<f64> = g.u[0].iter().zip(&g.u[1]).map(|(a, c)| a * a + c * c).collect();
        let l2 = norm(&b, &f, NormKind::L2).unwrap().powi(2);
        prop_assert!((b.integrate(&grid_sq) - l2).abs() <= 1e-12 * l2.max(1e-300));
    }

    #[test]
    fn discrete_divergence_vanishes(seed in any::<u64>(), m in 1usize..6) {
        let b = basis(m, 0.0);
        let f = random_field(&b, &mut rng(seed), 1.0);
        let div = b.divergence(&f).unwrap();
        prop_assert!(div.iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn cubic_stress_dissipates(seed in any::<u64>(), beta in 0.0f64..2.0) {
        let b = basis(4, 0.1);
        let params = ModelParams::new(1.0, 0.1, -0.1, beta).unwrap();
        let y = random_field(&b, &mut rng(seed), 2.0);
        let t = constitutive_terms(&b, &y, &params).unwrap();
        prop_assert!(l2_inner(&b, &t.div_s, &y).unwrap() <= 1e-14);
        prop_assert!(t.a.symmetry_defect() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), radius in 0.01f64..5.0) {
        let b = basis(3, 0.2);
        let u = random_smooth_trajectory(&b, &mut rng(seed), 2.0, 0.05, 8, TrajectoryKind::Control);
        let p = project_admissible(&b, &u, radius).unwrap();
        let pp = project_admissible(&b, &p, radius).unwrap();
        prop_assert!(time_norm(&b, &p, NormKind::H1).unwrap() <= radius * (1.0 + 1e-12));
        for (x, y) in p.nodes().iter().flatten().zip(pp.nodes().iter().flatten()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-12));
        }
    }

    #[test]
    fn container_round_trip(seed in any::<u64>(), m in 1usize..5, steps in 1usize..12) {
        let b = basis(m, 0.7);
        let u = random_smooth_trajectory(&b, &mut rng(seed), 1.0, 0.01, steps, TrajectoryKind::Adjoint);
        let back = decode(&encode(&u), std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(back, u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn linearized_solver_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let m = model();
        let b = m.basis();
        let mut r = rng(seed);
        let y0 = random_field(b, &mut r, 0.5);
        let u = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
        let state = m.integrate_state(&y0, &u).unwrap();
        let p1 = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
        let p2 = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
        let z1 = m.solve_linearized(&state, &p1).unwrap();
        let z2 = m.solve_linearized(&state, &p2).unwrap();
        let combo = p1.scaled(a).axpy(c, &p2).unwrap();
        let z = m.solve_linearized(&state, &combo).unwrap();
        let want = z1.scaled(a).axpy(c, &z2).unwrap();
        let scale = want.sup_norm(b, NormKind::V).unwrap().max(1e-12);
        let diff = z.axpy(-1.0, &want).unwrap().sup_norm(b, NormKind::V).unwrap();
        prop_assert!(diff <= 1e-9 * scale, "{} vs {}", diff, scale);
    }

    #[test]
    fn adjoint_solver_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let m = model();
        let b = m.basis();
        let mut r = rng(seed);
        let y0 = random_field(b, &mut r, 0.5);
        let u = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
        let state = m.integrate_state(&y0, &u).unwrap();
        let f = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::State);
        let p = m.solve_adjoint(&state, &f).unwrap();
        let pa = m.solve_adjoint(&state, &f.scaled(a)).unwrap();
        let scale = p.sup_norm(b, NormKind::V).unwrap().max(1e-12);
        let diff = pa.axpy(-a, &p).unwrap().sup_norm(b, NormKind::V).unwrap();
        prop_assert!(diff <= 1e-9 * scale * a.abs().max(1.0));
    }

    #[test]
    fn duality_holds(seed in any::<u64>()) {
        let m = model();
        let b = m.basis();
        let mut r = rng(seed);
        let y0 = random_field(b, &mut r, 0.5);
        let u = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
        let state = m.integrate_state(&y0, &u).unwrap();
        let psi = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::Control);
        let f = random_smooth_trajectory(b, &mut r, 1.0, 0.02, 10, TrajectoryKind::State);
        let d = m.check_duality(&state, &psi, &f).unwrap();
        prop_assert!(d.gap <= 1e-10);
    }
}
