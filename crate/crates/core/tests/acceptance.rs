//! Acceptance criteria at desk scale: basis M = 4, N_t = 64, T = 0.5.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::path::Path;
use std::process::ExitCode;

use thirdgrade::control::{ControlProblem, CostConfig, OptimizerOptions};
use thirdgrade::io::{RunConfig, TargetSpec};
use thirdgrade::sampling::{random_field, random_smooth_trajectory, rng, single_mode_trajectory};
use thirdgrade::spectral::{constitutive_terms, l2_inner};
use thirdgrade::trajectory::l2_pairing;
use thirdgrade::verify::{
    manufactured_convergence, run_suite, stability_check, uniqueness_diagnostics, Level, SearchBudget,
};
use thirdgrade::{Model, ModelParams, Result, SpectralBasis, Trajectory, TrajectoryKind};

const M: usize = 4;
const STEPS: usize = 64;
const HORIZON: f64 = 0.5;
const DT: f64 = HORIZON / STEPS as f64;

struct Outcome {
    passed: bool,
    summary: String,
}

fn show(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-2 {
        format!("{x:.3e}")
    } else {
        format!("{x:.4}")
    }
}

fn at_most(measured: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        passed: measured <= tol,
        summary: format!("{what} = {} (<= {tol:?})", show(measured)),
    }
}

fn at_least(measured: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        passed: measured >= tol,
        summary: format!("{what} = {} (>= {tol:?})", show(measured)),
    }
}

fn model() -> Model {
    let params = ModelParams::new(0.5, 0.1, 0.05, 0.2).expect("admissible");
    Model::new(SpectralBasis::new(M, params.alpha1()).expect("basis"), params).expect("model")
}

fn control(b: &SpectralBasis, r: &mut impl rand::Rng, amplitude: f64) -> Trajectory {
    random_smooth_trajectory(b, r, amplitude, DT, STEPS, TrajectoryKind::Control)
}

fn duality() -> Result<Outcome> {
    let m = model();
    let b = m.basis();
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let y0 = random_field(b, &mut r, 1.0);
        let state = m.integrate_state(&y0, &control(b, &mut r, 1.0))?;
        let psi = control(b, &mut r, 1.0);
        let f = control(b, &mut r, 1.0).with_kind(TrajectoryKind::State);
        worst = worst.max(m.check_duality(&state, &psi, &f)?.gap);
    }
    Ok(at_most(worst, 1e-6, "worst relative gap over 10 draws"))
}

fn taylor() -> Result<Outcome> {
    let m = model();
    let b = m.basis();
    let mut r = rng(102);
    let y0 = random_field(b, &mut r, 1.0);
    let u = control(b, &mut r, 1.0);
    let psi = control(b, &mut r, 1.0);
    let rep = m.gateaux_taylor_test(&y0, &u, &psi, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    Ok(at_least(rep.fitted_slope.unwrap_or(f64::NAN), 0.9, "log-log slope"))
}

fn gradient() -> Result<Outcome> {
    let m = model();
    let b = m.basis();
    let mut r = rng(103);
    let y0 = random_field(b, &mut r, 1.0);
    let target = random_smooth_trajectory(b, &mut r, 0.5, DT, STEPS, TrajectoryKind::Target);
    let prob = ControlProblem::new(&m, y0, CostConfig::new(target, 0.05, 100.0)?)?;
    let u = control(b, &mut r, 1.0);
    let g = prob.gradient_direction(&u)?.gradient;
    let rho = 1e-4;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let psi = control(b, &mut r, 1.0);
        let fd = (prob.eval_cost(&u.axpy(rho, &psi)?)?.j - prob.eval_cost(&u.axpy(-rho, &psi)?)?.j) / (2.0 * rho);
        let adj = l2_pairing(b, &g, &psi)?;
        worst = worst.max((fd - adj).abs() / adj.abs());
    }
    Ok(at_most(worst, 1e-4, "worst relative error over 5 directions"))
}

fn energy() -> Result<Outcome> {
    let m = model();
    let b = m.basis();
    let mut r = rng(104);
    let y0 = random_field(b, &mut r, 1.0);
    let (traj, report) = m.solve_state(&y0, &control(b, &mut r, 1.0))?;
    let slack = report.worst_relative_slack();
    // <div S(y), y> = -(beta/2) int |A|^4, right side by a fine midpoint rule.
    let mut identity: f64 = 0.0;
    for n in [0, STEPS / 2, STEPS] {
        let y = traj.field(n);
        let lhs = l2_inner(b, &constitutive_terms(b, &y, m.params())?.div_s, &y)?;
        let q = 96;
        let h = std::f64::consts::PI / q as f64;
        let mut a4 = 0.0;
        for i in 0..q {
            for j in 0..q {
                let (_, g) = b.eval_point(y.coeffs(), (i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                let s: f64 = (0..2)
                    .flat_map(|a| (0..2).map(move |c| (a, c)))
                    .map(|(a, c)| (g[a][c] + g[c][a]).powi(2))
                    .sum();
                a4 += s * s * h * h;
            }
        }
        let rhs = -0.5 * m.params().beta() * a4;
        identity = identity.max((lhs - rhs).abs() / rhs.abs());
    }
    let mut out = at_least(slack, -1e-6, "worst relative slack");
    out.passed &= identity <= 1e-8;
    out.summary += &format!(", quadrature identity error = {} (<= 1e-8)", show(identity));
    Ok(out)
}

fn stability() -> Result<Outcome> {
    let m = model();
    let b = m.basis();
    let mut r = rng(105);
    let y0 = random_field(b, &mut r, 1.0);
    let u = control(b, &mut r, 1.0);
    let psi = single_mode_trajectory(b, 2, 1, DT, STEPS, TrajectoryKind::Control, |t| 0.2 * (1.0 - t))?;
    let table = stability_check(&m, &y0, &u, &psi, &[1e-1, 1e-2, 1e-3])?;
    Ok(at_most(table.spread, 0.25, "ratio spread max/min - 1"))
}

fn convergence() -> Result<Outcome> {
    let m = model();
    let g = |t: f64| 0.8 + (2.0 * t).cos();
    let dg = |t: f64| -2.0 * (2.0 * t).sin();
    let table = manufactured_convergence(&m, (2, 1), HORIZON, &[16, 32, 64, 128], g, dg)?;
    let order = table.orders.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(at_least(order, 1.8, "smallest observed order over 3 halvings"))
}

fn optimizer() -> Result<Outcome> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/manufactured_target.toml");
    let cfg = RunConfig::load(&path)?;
    let params = cfg.params;
    let m = Model::new(cfg.basis()?, params)?;
    let b = m.basis();
    let y0 = RunConfig::modes_field(b, &cfg.init_modes)?;
    let TargetSpec::Manufactured(modes) = &cfg.target else {
        unreachable!("shipped config has a manufactured target")
    };
    let u_true = Trajectory::constant(&RunConfig::modes_field(b, modes)?, cfg.dt, cfg.n_steps, TrajectoryKind::Control);
    let target = m.integrate_state(&y0, &u_true)?;
    let prob = ControlProblem::new(&m, y0, CostConfig::new(target, cfg.lambda, cfg.radius)?)?;
    let zero = Trajectory::zeros(b, cfg.dt, cfg.n_steps, TrajectoryKind::Control);
    let (_, rep) = prob.optimize(&zero, &cfg.optimizer_options(cfg.seed))?;
    let ratio = rep.final_j / rep.initial_j;
    let worst_vi = rep.vi_residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut out = at_most(ratio, 0.05, "J / J0");
    out.passed &= rep.is_monotone() && rep.vi_residuals.len() == 20 && rep.vi_satisfied();
    out.summary += &format!(
        ", monotone = {}, worst of {} VI residuals = {} (>= {})",
        rep.is_monotone(),
        rep.vi_residuals.len(),
        show(worst_vi),
        show(-rep.vi_tolerance)
    );
    Ok(out)
}

fn uniqueness() -> Result<Outcome> {
    let m = model();
    let b = m.basis();
    let mut r = rng(108);
    let y0 = random_field(b, &mut r, 1.0);
    let target = random_smooth_trajectory(b, &mut r, 0.5, DT, STEPS, TrajectoryKind::Target);
    let radius = 5.0;
    let prob = ControlProblem::new(&m, y0, CostConfig::new(target, 0.0, radius)?)?;
    let reference = Trajectory::zeros(b, DT, STEPS, TrajectoryKind::Control);
    let opts = OptimizerOptions {
        max_iter: 500,
        tol: 1e-7,
        vi_samples: 0,
        ..OptimizerOptions::default()
    };
    let rep = uniqueness_diagnostics(&prob, &reference, 3, 10.0, SearchBudget::default(), &opts, 108)?;
    let mut out = at_most(rep.max_pairwise_distance, 1e-4 * radius, "max pairwise L2L2 distance");
    out.summary += &format!(" at lambda = {:.3} (10 x proxy)", rep.lambda_used);
    Ok(out)
}

fn determinism() -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool");
    let (a, b) = pool.install(|| (run_suite(Level::Fast, 42).to_json(), run_suite(Level::Fast, 42).to_json()));
    Ok(Outcome {
        passed: a == b && !a.is_empty(),
        summary: format!("two fast-suite reports identical = {} ({} bytes)", a == b, a.len()),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("duality identity", duality),
        ("Gateaux derivative Taylor test", taylor),
        ("adjoint gradient check", gradient),
        ("discrete energy inequality", energy),
        ("stability scaling", stability),
        ("manufactured convergence", convergence),
        ("optimizer contract", optimizer),
        ("uniqueness at large lambda", uniqueness),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run().unwrap_or_else(|e| Outcome {
            passed: false,
            summary: format!("error: {e}"),
        });
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} {name}: {}", i + 1, outcome.summary);
        if !outcome.passed {
            failures += 1;
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
