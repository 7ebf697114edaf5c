//! Batch front end behind the `thirdgrade` binary.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::control::{ControlProblem, CostConfig, OptimizerOptions, OptimizerReport};
use crate::error::{Error, Result};
use crate::io::{
    cost_csv, energy_csv, load_trajectory, norms_csv, save_trajectory, write_atomic, ControlSpec,
    Provenance, RunConfig, TargetSpec,
};
use crate::sampling::{random_smooth_trajectory, rng};
use crate::solver::Model;
use crate::spectral::SpectralBasis;
use crate::trajectory::{Trajectory, TrajectoryKind};
use crate::verify::{run_suite, Level};

#[derive(Debug, Parser)]
#[command(name = "thirdgrade", version, about = "Optimal control of 2D third grade fluids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the `seed` key of the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = LevelArg::Fast)]
    pub level: LevelArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Fast,
    Full,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Fast => Level::Fast,
            LevelArg::Full => Level::Full,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the state equation; writes state.traj and energy.csv.
    Simulate,
    /// Projected gradient descent; writes control.traj, state.traj, optimizer.json and cost.csv.
    Optimize,
    /// Run the property suite; writes verify_report.json.
    Verify,
    /// Gateaux derivative test along a random direction; writes taylor.json.
    Taylor,
    /// Per-node norms of a trajectory file; writes norms.csv.
    ExportPlot {
        /// Trajectory file to export.
        #[arg(long)]
        input: PathBuf,
    },
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    ChecksFailed = 1,
    Invalid = 2,
    SolverFailure = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_error(e: &Error) -> Self {
        if e.is_solver_failure() {
            Exit::SolverFailure
        } else {
            Exit::Invalid
        }
    }
}

/// Execute the parsed command, reporting errors on stderr.
pub fn run(cli: &Cli) -> Exit {
    match dispatch(cli) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            Exit::from_error(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Exit> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Verify => verify(cli),
        Command::ExportPlot { input } => export_plot(input, &cli.out).map(|_| Exit::Success),
        Command::Simulate => simulate(&Session::open(cli)?).map(|_| Exit::Success),
        Command::Optimize => optimize(&Session::open(cli)?).map(|_| Exit::Success),
        Command::Taylor => taylor(&Session::open(cli)?).map(|_| Exit::Success),
    }
}

/// A loaded configuration with its model and output location.
struct Session {
    config: RunConfig,
    model: Model,
    seed: u64,
    out: PathBuf,
}

impl Session {
    fn open(cli: &Cli) -> Result<Self> {
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| Error::config("--config", "this command needs a configuration file"))?;
        let config = RunConfig::load(path)?;
        let model = Model::new(config.basis()?, config.params)?;
        Ok(Self {
            seed: cli.seed.unwrap_or(config.seed),
            config,
            model,
            out: cli.out.clone(),
        })
    }

    fn basis(&self) -> &SpectralBasis {
        self.model.basis()
    }

    fn y0(&self) -> Result<crate::spectral::Field> {
        RunConfig::modes_field(self.basis(), &self.config.init_modes)
    }

    fn constant(&self, modes: &[(usize, usize, f64)], kind: TrajectoryKind) -> Result<Trajectory> {
        let f = RunConfig::modes_field(self.basis(), modes)?;
        Ok(Trajectory::constant(&f, self.config.dt, self.config.n_steps, kind))
    }

    fn load_on_grid(&self, path: &Path, what: &str) -> Result<Trajectory> {
        let t = load_trajectory(path)?;
        let expected = Trajectory::zeros(self.basis(), self.config.dt, self.config.n_steps, t.kind());
        expected
            .check_compatible(&t)
            .map_err(|e| Error::GridMismatch(format!("{what} {}: {e}", path.display())))?;
        Ok(t)
    }

    fn control(&self) -> Result<Trajectory> {
        let u = match &self.config.control {
            ControlSpec::Modes(m) => self.constant(m, TrajectoryKind::Control)?,
            ControlSpec::Path(p) => self.load_on_grid(p, "control")?,
        };
        Ok(u.with_kind(TrajectoryKind::Control))
    }

    fn target(&self) -> Result<Trajectory> {
        match &self.config.target {
            TargetSpec::None => Err(Error::config(
                "cost.target_path",
                "optimize needs a target: set cost.target_path or [target].control_modes",
            )),
            TargetSpec::Path(p) => self.load_on_grid(p, "target"),
            TargetSpec::Manufactured(m) => {
                let u = self.constant(m, TrajectoryKind::Control)?;
                self.model.integrate_state(&self.y0()?, &u)
            }
        }
    }

    fn provenance(&self, traj: &Trajectory) -> Provenance {
        Provenance {
            config_hash: self.config.hash.clone(),
            seed: self.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            kind: traj.kind(),
            max_mode: traj.key().max_mode,
            n_steps: traj.n_steps(),
        }
    }

    fn save(&self, name: &str, traj: &Trajectory) -> Result<()> {
        save_trajectory(&self.out.join(name), traj, &self.provenance(traj))
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<()> {
        write_atomic(&self.out.join(name), serde_json::to_string_pretty(value)?.as_bytes())
    }
}

fn simulate(s: &Session) -> Result<()> {
    let u = s.control()?;
    let (traj, energy) = s.model.solve_state(&s.y0()?, &u)?;
    s.save("state.traj", &traj)?;
    write_atomic(&s.out.join("energy.csv"), energy_csv(&energy).as_bytes())?;
    println!(
        "simulated {} steps of {}; gamma = {}, final ||y||_V^2 = {}",
        traj.n_steps(),
        traj.dt(),
        energy.gamma,
        energy.v_energy.last().copied().unwrap_or(0.0)
    );
    Ok(())
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    lambda: f64,
    radius: f64,
    options: OptimizerOptions,
    report: &'a OptimizerReport,
}

fn optimize(s: &Session) -> Result<()> {
    if !s.config.radius.is_finite() {
        return Err(Error::config("cost.K", "optimize needs a finite admissible radius"));
    }
    let cost = CostConfig::new(s.target()?, s.config.lambda, s.config.radius)?;
    let problem = ControlProblem::new(&s.model, s.y0()?, cost)?;
    let opts = s.config.optimizer_options(s.seed);
    let (u, report) = problem.optimize(&s.control()?, &opts)?;
    let state = s.model.integrate_state(problem.y0(), &u)?;
    s.save("control.traj", &u)?;
    s.save("state.traj", &state)?;
    write_atomic(&s.out.join("cost.csv"), cost_csv(&report).as_bytes())?;
    s.write_json(
        "optimizer.json",
        &OptimizeOutput {
            lambda: s.config.lambda,
            radius: s.config.radius,
            options: opts,
            report: &report,
        },
    )?;
    println!(
        "J: {} -> {} in {} steps (converged: {}, VI residuals ok: {})",
        report.initial_j,
        report.final_j,
        report.accepted_steps(),
        report.converged,
        report.vi_satisfied()
    );
    Ok(())
}

fn taylor(s: &Session) -> Result<()> {
    let u = s.control()?;
    let mut r = rng(s.seed);
    let psi = random_smooth_trajectory(
        s.basis(),
        &mut r,
        1.0,
        s.config.dt,
        s.config.n_steps,
        TrajectoryKind::Control,
    );
    let rep = s.model.gateaux_taylor_test(&s.y0()?, &u, &psi, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    s.write_json("taylor.json", &rep)?;
    println!("fitted slope: {:?}", rep.fitted_slope);
    Ok(())
}

fn verify(cli: &Cli) -> Result<Exit> {
    let seed = match (&cli.seed, &cli.config) {
        (Some(s), _) => *s,
        (None, Some(path)) => RunConfig::load(path)?.seed,
        (None, None) => 0,
    };
    let report = run_suite(cli.level.into(), seed);
    for c in &report.checks {
        println!("{}", c.summary_line());
    }
    write_atomic(&cli.out.join("verify_report.json"), report.to_json().as_bytes())?;
    Ok(if report.passed {
        Exit::Success
    } else {
        Exit::ChecksFailed
    })
}

fn export_plot(input: &Path, out: &Path) -> Result<()> {
    let traj = load_trajectory(input)?;
    let key = traj.key();
    let basis = SpectralBasis::with_grid(key.max_mode, key.alpha1(), key.grid_size)?;
    write_atomic(&out.join("norms.csv"), norms_csv(&basis, &traj)?.as_bytes())
}
