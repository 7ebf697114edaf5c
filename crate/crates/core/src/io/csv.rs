//! CSV exports. Floats use `Display`, which prints the shortest string that
//! parses back to the same `f64`.

use std::fmt::Write;

use crate::control::OptimizerReport;
use crate::error::Result;
use crate::solver::EnergyReport;
use crate::spectral::{norm, NormKind, SpectralBasis};
use crate::trajectory::Trajectory;

pub fn energy_csv(report: &EnergyReport) -> String {
    let mut out = String::from("t,h1,h2,h3,a4,v_energy,dissipation,cubic_dissipation,forcing_work\n");
    for n in 0..report.times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            report.times[n],
            report.h1[n],
            report.h2[n],
            report.h3[n],
            report.a4[n],
            report.v_energy[n],
            report.dissipation[n],
            report.cubic_dissipation[n],
            report.forcing_work[n]
        );
    }
    out
}

pub fn cost_csv(report: &OptimizerReport) -> String {
    let mut out = String::from("iteration,j,step,gradient_norm,gradient_mapping,control_norm,active\n");
    for r in &report.iterations {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iteration, r.j, r.step, r.gradient_norm, r.gradient_mapping, r.control_norm, r.active
        );
    }
    out
}

/// Per-node norms of every kind.
pub fn norms_csv(basis: &SpectralBasis, traj: &Trajectory) -> Result<String> {
    traj.check_basis(basis)?;
    let kinds = NormKind::ALL;
    let mut out = String::from("t");
    for k in kinds {
        let _ = write!(out, ",{}", k.name());
    }
    out.push('\n');
    for (n, t) in traj.times().iter().enumerate() {
        let field = traj.field(n);
        let _ = write!(out, "{t}");
        for k in kinds {
            let _ = write!(out, ",{}", norm(basis, &field, k)?);
        }
        out.push('\n');
    }
    Ok(out)
}
