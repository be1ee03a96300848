use std::io::Write;
use std::path::{Path, PathBuf};

use fermidyn_core::dynamics::{
    find_conserved_combinations, readable_basis, simulate_with, uniform_grid, verify_conservation,
    ConservedCombination, Dynamics, SimulationPlan, TrajectoryTable,
};
use fermidyn_core::oracle::{crosscheck_with, CrosscheckOptions, CrosscheckReport};
use fermidyn_core::{build_operators, parse, verify_car, FermionicSystem, FockState};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output;

/// Largest Hilbert-space dimension for which `--verify` runs the RK4 oracle.
pub const RK4_MAX_DIMENSION: usize = 32;
/// Largest tolerated drift of a conserved combination along the trajectory.
pub const CONSERVATION_DRIFT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub verify: bool,
    pub list_conserved: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub table: TrajectoryTable,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    pub conserved: Vec<ConservedCombination>,
    pub crosscheck: Option<CrosscheckReport>,
}

/// `<config stem>.csv` next to the config file.
pub fn default_csv_path(config_path: &Path) -> PathBuf {
    config_path.with_extension("csv")
}

fn format_vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{:.6}", x + 0.0)).collect();
    format!("({})", parts.join(", "))
}

/// Runs a simulation, writes its outputs and prints a report to `out`.
///
/// The CSV is written before verification, so it exists even when the run
/// ends with a verification failure.
pub fn run(
    config: &RunConfig,
    default_csv: &Path,
    options: &RunOptions,
    out: &mut dyn Write,
) -> Result<RunOutcome, CliError> {
    let stdout_err = |e| CliError::io("<stdout>", e);

    let system = FermionicSystem::new(config.n_modes)?;
    let expr = parse(&config.hamiltonian)
        .map_err(fermidyn_core::Error::from)?
        .with_parameters(config.parameters.iter().map(|(k, v)| (k.as_str(), *v)));
    let initial = FockState::from_occupations(&config.initial)?;
    let plan = SimulationPlan::new(
        system,
        expr,
        initial,
        uniform_grid(config.t_end, config.samples)?,
    )?;

    let ops = build_operators(&system)?;
    let h = plan.hamiltonian().assemble(&ops)?;
    let dynamics = Dynamics::from_matrix(ops, h, initial)?;
    let table = simulate_with(&dynamics, &plan)?;

    let csv_path = options
        .csv
        .clone()
        .or_else(|| config.csv.clone())
        .unwrap_or_else(|| default_csv.to_path_buf());
    output::write_csv(&csv_path, &table)?;
    let svg_path = options.svg.clone().or_else(|| config.svg.clone());
    if let Some(path) = &svg_path {
        output::write_svg(path, &table)?;
    }

    let spectrum = dynamics.spectrum();
    let eigenvalues = spectrum.eigenvalues();
    writeln!(
        out,
        "modes: {} (dimension {})",
        system.n_modes(),
        system.dimension()
    )
    .map_err(stdout_err)?;
    writeln!(out, "hamiltonian: {}", plan.hamiltonian()).map_err(stdout_err)?;
    let occupations: Vec<String> = config.initial.iter().map(u8::to_string).collect();
    writeln!(
        out,
        "initial state: {} (n1..n{} = {})",
        initial,
        system.n_modes(),
        occupations.join(",")
    )
    .map_err(stdout_err)?;
    writeln!(
        out,
        "spectrum: [{:.6}, {:.6}] in {} block(s), {} sweep(s)",
        eigenvalues[0],
        eigenvalues[eigenvalues.len() - 1],
        spectrum.blocks(),
        spectrum.sweeps()
    )
    .map_err(stdout_err)?;
    writeln!(
        out,
        "samples: {} on [0, {}] -> {}",
        config.samples,
        config.t_end,
        csv_path.display()
    )
    .map_err(stdout_err)?;
    if let Some(path) = &svg_path {
        writeln!(out, "chart: {}", path.display()).map_err(stdout_err)?;
    }

    let conserved = find_conserved_combinations(dynamics.hamiltonian(), dynamics.operators())?;
    writeln!(
        out,
        "conserved combinations of n1..n{}: {}",
        system.n_modes(),
        conserved.len()
    )
    .map_err(stdout_err)?;
    for v in readable_basis(&conserved) {
        writeln!(out, "  {}", format_vector(&v)).map_err(stdout_err)?;
    }
    if options.list_conserved {
        writeln!(
            out,
            "orthonormal basis (coefficients, commutator residual, drift along trajectory):"
        )
        .map_err(stdout_err)?;
        for combo in &conserved {
            let drift = verify_conservation(&table, combo)?;
            let coefficients: Vec<String> = combo
                .coefficients
                .iter()
                .map(|c| format!("{}", c + 0.0))
                .collect();
            writeln!(
                out,
                "  [{}]  residual {:.3e}  drift {:.3e}",
                coefficients.join(", "),
                combo.residual,
                drift
            )
            .map_err(stdout_err)?;
        }
    }

    let mut outcome = RunOutcome {
        table,
        csv_path,
        svg_path,
        conserved,
        crosscheck: None,
    };
    if options.verify || config.verify {
        verify(&dynamics, &plan, &mut outcome, out)?;
    }
    Ok(outcome)
}

fn verify(
    dynamics: &Dynamics,
    plan: &SimulationPlan,
    outcome: &mut RunOutcome,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let stdout_err = |e| CliError::io("<stdout>", e);
    let mut failures = Vec::new();

    let car = verify_car(dynamics.operators())?;
    writeln!(
        out,
        "verify: anticommutation relations, max violation {:e}",
        car.max_violation
    )
    .map_err(stdout_err)?;
    if !car.holds(0.0) {
        failures.push(format!(
            "anticommutation violated by {:e} in {}",
            car.max_violation,
            car.worst_relation.unwrap_or_default()
        ));
    }

    let options = CrosscheckOptions {
        step: None,
        max_rk4_dimension: Some(RK4_MAX_DIMENSION),
    };
    let report = crosscheck_with(dynamics, plan, &options)?;
    match (report.spectral_vs_rk4, report.rk4_step) {
        (Some(d), Some(h)) => {
            writeln!(out, "verify: spectral vs RK4 (step {h}): {d:.3e}").map_err(stdout_err)?;
            if d > CrosscheckReport::RK4_TOLERANCE {
                failures.push(format!("spectral and RK4 densities differ by {d:e}"));
            }
        }
        _ => writeln!(
            out,
            "verify: RK4 skipped above dimension {RK4_MAX_DIMENSION}"
        )
        .map_err(stdout_err)?,
    }
    match (&report.closed_form_case, report.spectral_vs_closed_form) {
        (Some(case), Some(d)) => {
            writeln!(out, "verify: spectral vs closed form {case}: {d:.3e}").map_err(stdout_err)?;
            if d > CrosscheckReport::CLOSED_FORM_TOLERANCE {
                failures.push(format!(
                    "spectral and closed-form densities differ by {d:e}"
                ));
            }
        }
        _ => writeln!(out, "verify: no closed form for this model").map_err(stdout_err)?,
    }

    let mut worst_drift: f64 = 0.0;
    for combo in &outcome.conserved {
        let drift = verify_conservation(&outcome.table, combo)?;
        worst_drift = worst_drift.max(drift);
        if drift > CONSERVATION_DRIFT_TOLERANCE {
            failures.push(format!(
                "combination {} drifts by {drift:e}",
                format_vector(&combo.coefficients)
            ));
        }
    }
    if !outcome.conserved.is_empty() {
        writeln!(
            out,
            "verify: largest drift of a conserved combination: {worst_drift:.3e}"
        )
        .map_err(stdout_err)?;
    }
    outcome.crosscheck = Some(report);

    if failures.is_empty() {
        writeln!(out, "verify: ok").map_err(stdout_err)?;
        Ok(())
    } else {
        Err(CliError::Verification(failures.join("; ")))
    }
}
