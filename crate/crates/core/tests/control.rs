use thirdgrade::control::project_admissible;
use thirdgrade::sampling::{random_field, random_smooth_trajectory, rng, single_mode_trajectory};
use thirdgrade::trajectory::{l2_pairing, time_norm};
use thirdgrade::{
    ControlProblem, CostConfig, Model, ModelParams, NormKind, OptimizerOptions, SpectralBasis,
    Trajectory, TrajectoryKind,
};

const DT: f64 = 0.5 / 64.0;
const STEPS: usize = 64;

fn model() -> Model {
    let params = ModelParams::new(0.5, 0.1, 0.05, 0.2).unwrap();
    Model::new(SpectralBasis::new(4, 0.1).unwrap(), params).unwrap()
}

#[test]
fn gradient_matches_central_differences() {
    let m = model();
    let b = m.basis();
    let mut r = rng(21);
    let y0 = random_field(b, &mut r, 1.0);
    let target = random_smooth_trajectory(b, &mut r, 0.5, DT, STEPS, TrajectoryKind::Target);
    let cost = CostConfig::new(target, 0.1, 100.0).unwrap();
    let prob = ControlProblem::new(&m, y0, cost).unwrap();
    let u = random_smooth_trajectory(b, &mut r, 1.0, DT, STEPS, TrajectoryKind::Control);
    let g = prob.gradient_direction(&u).unwrap().gradient;
    for _ in 0..5 {
        let psi = random_smooth_trajectory(b, &mut r, 1.0, DT, STEPS, TrajectoryKind::Control);
        let rho = 1e-4;
        let jp = prob.eval_cost(&u.axpy(rho, &psi).unwrap()).unwrap().j;
        let jm = prob.eval_cost(&u.axpy(-rho, &psi).unwrap()).unwrap().j;
        let fd = (jp - jm) / (2.0 * rho);
        let an = l2_pairing(b, &g, &psi).unwrap();
        assert!((fd - an).abs() <= 1e-4 * an.abs(), "fd {fd} vs adjoint {an}");
    }
}

#[test]
fn cost_is_affine_in_lambda() {
    let m = model();
    let b = m.basis();
    let mut r = rng(2);
    let y0 = random_field(b, &mut r, 1.0);
    let target = random_smooth_trajectory(b, &mut r, 0.5, DT, STEPS, TrajectoryKind::Target);
    let u = random_smooth_trajectory(b, &mut r, 1.0, DT, STEPS, TrajectoryKind::Control);
    let j = |lambda| {
        let c = CostConfig::new(target.clone(), lambda, 1.0).unwrap();
        ControlProblem::new(&m, y0.clone(), c).unwrap().eval_cost(&u).unwrap().j
    };
    let uu = l2_pairing(b, &u, &u).unwrap();
    assert!(((j(0.7) - j(0.2)) - 0.25 * uu).abs() < 1e-10 * (1.0 + uu));
}

#[test]
fn projection_is_radial_and_idempotent() {
    let b = SpectralBasis::new(3, 0.2).unwrap();
    let mut r = rng(9);
    let u = random_smooth_trajectory(&b, &mut r, 1.0, 0.1, 10, TrajectoryKind::Control);
    let len = time_norm(&b, &u, NormKind::H1).unwrap();
    assert_eq!(project_admissible(&b, &u, 2.0 * len).unwrap(), u);
    let p = project_admissible(&b, &u, 0.5 * len).unwrap();
    let plen = time_norm(&b, &p, NormKind::H1).unwrap();
    assert!((plen - 0.5 * len).abs() <= 1e-12 * len);
    let pp = project_admissible(&b, &p, 0.5 * len).unwrap();
    for (a, c) in pp.nodes().iter().flatten().zip(p.nodes().iter().flatten()) {
        assert!((a - c).abs() <= 1e-15 * len);
    }
}

#[test]
fn manufactured_target_is_recovered() {
    let m = model();
    let b = m.basis();
    let mut r = rng(4);
    let y0 = random_field(b, &mut r, 1.0);
    let u_true = random_smooth_trajectory(b, &mut r, 2.0, DT, STEPS, TrajectoryKind::Control);
    let target = m.integrate_state(&y0, &u_true).unwrap();
    let radius = 2.0 * time_norm(b, &u_true, NormKind::H1).unwrap();
    let prob = ControlProblem::new(&m, y0, CostConfig::new(target, 1e-6, radius).unwrap()).unwrap();
    let zero = Trajectory::zeros(b, DT, STEPS, TrajectoryKind::Control);
    let opts = OptimizerOptions { max_iter: 100, tol: 1e-4, ..Default::default() };
    let (_, rep) = prob.optimize(&zero, &opts).unwrap();
    assert!(rep.final_j <= 0.05 * rep.initial_j);
    assert!(rep.is_monotone());
    assert!(rep.vi_satisfied());
}

#[test]
fn target_reached_by_zero_control_costs_nothing() {
    let m = model();
    let b = m.basis();
    let y0 = random_field(b, &mut rng(12), 1.0);
    let zero = Trajectory::zeros(b, DT, STEPS, TrajectoryKind::Control);
    let target = m.integrate_state(&y0, &zero).unwrap().with_kind(TrajectoryKind::Target);
    let prob = ControlProblem::new(&m, y0, CostConfig::new(target, 0.0, 1.0).unwrap()).unwrap();
    assert_eq!(prob.eval_cost(&zero).unwrap().j, 0.0);
    // Zero adjoint source and lambda = 0: the gradient vanishes.
    let g = prob.gradient_direction(&zero).unwrap();
    assert!(g.gradient.is_zero() && g.adjoint.is_zero());
    let (u, rep) = prob.optimize(&zero, &OptimizerOptions::default()).unwrap();
    assert!(rep.accepted_steps() <= 1);
    assert!(rep.final_j.abs() < 1e-20);
    assert!(u.is_zero());
}

#[test]
fn constant_single_mode_control_term() {
    let m = model();
    let b = m.basis();
    let (mm, nn, a, lambda) = (2, 3, 1.7, 0.3);
    let u = single_mode_trajectory(b, mm, nn, DT, STEPS, TrajectoryKind::Control, |_| a).unwrap();
    let target = Trajectory::zeros(b, DT, STEPS, TrajectoryKind::Target);
    let prob = ControlProblem::new(&m, random_field(b, &mut rng(2), 1.0), CostConfig::new(target, lambda, 10.0).unwrap()).unwrap();
    // A V-normalized mode has squared L2 norm 1 / (1 + alpha1 lambda_k).
    let l2 = a * a / (1.0 + 0.1 * (mm * mm + nn * nn) as f64);
    let want = 0.5 * lambda * 0.5 * l2;
    let got = prob.eval_cost(&u).unwrap().control;
    assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
}

#[test]
fn without_regularization_gradient_is_adjoint() {
    let m = model();
    let b = m.basis();
    let mut r = rng(13);
    let y0 = random_field(b, &mut r, 1.0);
    let target = random_smooth_trajectory(b, &mut r, 0.5, DT, STEPS, TrajectoryKind::Target);
    let prob = ControlProblem::new(&m, y0, CostConfig::new(target, 0.0, 5.0).unwrap()).unwrap();
    let u = random_smooth_trajectory(b, &mut r, 1.0, DT, STEPS, TrajectoryKind::Control);
    let g = prob.gradient_direction(&u).unwrap();
    assert_eq!(g.gradient.nodes(), g.adjoint.nodes());
}

#[test]
fn invalid_cost_settings() {
    let b = SpectralBasis::new(2, 0.0).unwrap();
    let t = Trajectory::zeros(&b, 0.1, 3, TrajectoryKind::Target);
    assert!(CostConfig::new(t.clone(), -1.0, 1.0).is_err());
    assert!(CostConfig::new(t.clone(), 0.0, 0.0).is_err());
    assert!(CostConfig::new(t, f64::NAN, 1.0).is_err());
}
