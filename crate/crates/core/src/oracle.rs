//! Independent references for the spectral pipeline: a fixed-step RK4
//! integrator of the Heisenberg equation and closed-form density formulas
//! for a catalog of exactly solvable models.

use std::fmt;

use num_complex::Complex64;

use crate::dynamics::{Dynamics, SimulationPlan};
use crate::error::{Error, Result};
use crate::fermion::{build_operators, FermionicSystem, ModeOperatorSet};
use crate::hamiltonian::{parse, OperatorExpression};
use crate::tensor::{ComplexMatrix, FockState, ZERO};

/// Integration aborts once `‖X − X†‖_max` exceeds this.
pub const MAX_HERMITICITY_DRIFT: f64 = 1e-6;
/// Default RK4 step before scaling by the Hamiltonian magnitude.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Solution of `dX/dt = i(HX − XH)` sampled at `times`.
#[derive(Clone, Debug)]
pub struct OdeRun {
    pub times: Vec<f64>,
    pub samples: Vec<ComplexMatrix>,
    /// Largest step actually taken.
    pub step: f64,
}

impl OdeRun {
    /// `⟨φ, X(t_k) φ⟩` for a Fock state `φ`, one value per sample.
    pub fn expectation(&self, state: &FockState) -> Vec<f64> {
        let s = state.index();
        self.samples.iter().map(|x| x.get(s, s).re).collect()
    }

    pub fn last(&self) -> &ComplexMatrix {
        self.samples.last().expect("at least the initial sample")
    }
}

/// `out = i(HX − XH)`, both products explicit so round-off in the two
/// orderings is independent and instability shows up as Hermiticity drift.
fn heisenberg_rhs(h: &[Complex64], x: &[Complex64], n: usize, out: &mut [Complex64]) {
    out.iter_mut().for_each(|z| *z = ZERO);
    for a in 0..n {
        let out_row = &mut out[a * n..(a + 1) * n];
        for k in 0..n {
            let hak = h[a * n + k];
            let xak = x[a * n + k];
            let x_row = &x[k * n..(k + 1) * n];
            let h_row = &h[k * n..(k + 1) * n];
            for ((o, &xkb), &hkb) in out_row.iter_mut().zip(x_row).zip(h_row) {
                *o += hak * xkb - xak * hkb;
            }
        }
    }
    for z in out.iter_mut() {
        *z = Complex64::new(-z.im, z.re);
    }
}

fn hermiticity_drift(x: &[Complex64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let d = x[a * n + b] - x[b * n + a].conj();
            if !(d.re.is_finite() && d.im.is_finite()) {
                return f64::INFINITY;
            }
            worst = worst.max(d.norm());
        }
    }
    worst
}

struct Rk4 {
    n: usize,
    h: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
}

impl Rk4 {
    fn new(h: &ComplexMatrix) -> Self {
        let n = h.rows();
        let zeros = vec![ZERO; n * n];
        Self {
            n,
            h: h.as_slice().to_vec(),
            k: [zeros.clone(), zeros.clone(), zeros.clone(), zeros.clone()],
            stage: zeros,
        }
    }

    fn step(&mut self, x: &mut [Complex64], dt: f64) {
        let n = self.n;
        let half = 0.5 * dt;
        heisenberg_rhs(&self.h, x, n, &mut self.k[0]);
        for (i, (s, xv)) in self.stage.iter_mut().zip(x.iter()).enumerate() {
            *s = xv + self.k[0][i] * half;
        }
        heisenberg_rhs(&self.h, &self.stage, n, &mut self.k[1]);
        for (i, (s, xv)) in self.stage.iter_mut().zip(x.iter()).enumerate() {
            *s = xv + self.k[1][i] * half;
        }
        heisenberg_rhs(&self.h, &self.stage, n, &mut self.k[2]);
        for (i, (s, xv)) in self.stage.iter_mut().zip(x.iter()).enumerate() {
            *s = xv + self.k[2][i] * dt;
        }
        heisenberg_rhs(&self.h, &self.stage, n, &mut self.k[3]);
        let sixth = dt / 6.0;
        for (i, xv) in x.iter_mut().enumerate() {
            *xv += (self.k[0][i] + (self.k[1][i] + self.k[2][i]) * 2.0 + self.k[3][i]) * sixth;
        }
    }
}

/// Integrates the Heisenberg equation from `x0` at `t = 0` through every
/// point of `sample_times` (strictly increasing, starting at 0), using steps
/// no longer than `max_step`. Each interval is split into equal steps.
pub fn integrate_heisenberg(
    h: &ComplexMatrix,
    x0: &ComplexMatrix,
    sample_times: &[f64],
    max_step: f64,
) -> Result<OdeRun> {
    if !h.is_square() || h.rows() != x0.rows() || !x0.is_square() {
        return Err(Error::Shape(format!(
            "hamiltonian {}x{} with observable {}x{}",
            h.rows(),
            h.cols(),
            x0.rows(),
            x0.cols()
        )));
    }
    if !(max_step > 0.0 && max_step.is_finite()) {
        return Err(Error::InvalidPlan(format!(
            "step must be positive, got {max_step}"
        )));
    }
    match sample_times.first() {
        Some(&0.0) => {}
        _ => return Err(Error::InvalidPlan("sample times must start at 0".into())),
    }
    if sample_times
        .windows(2)
        .any(|w| w[1] <= w[0] || !w[1].is_finite())
    {
        return Err(Error::InvalidPlan(
            "sample times must be strictly increasing".into(),
        ));
    }

    let n = h.rows();
    let mut rk = Rk4::new(h);
    let mut x = x0.as_slice().to_vec();
    let mut samples = vec![x0.clone()];
    let mut taken: f64 = 0.0;
    for w in sample_times.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / max_step - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        taken = taken.max(dt);
        for _ in 0..steps {
            rk.step(&mut x, dt);
        }
        let drift = hermiticity_drift(&x, n);
        if drift > MAX_HERMITICITY_DRIFT {
            return Err(Error::StepTooLarge { drift, time: w[1] });
        }
        samples.push(ComplexMatrix::from_vec(n, n, x.clone())?);
    }
    Ok(OdeRun {
        times: sample_times.to_vec(),
        samples,
        step: taken,
    })
}

/// RK4 step used when none is given: `min(1e-3, 0.01 / ‖H‖_max)`.
pub fn default_step(h: &ComplexMatrix) -> f64 {
    let scale = h.max_abs();
    if scale > 0.0 {
        DEFAULT_STEP.min(0.01 / scale)
    } else {
        DEFAULT_STEP
    }
}

/// Densities of all modes from RK4, `result[j - 1][k] = n_j(t_k)`.
pub fn rk4_densities(
    h: &ComplexMatrix,
    ops: &ModeOperatorSet,
    initial: &FockState,
    sample_times: &[f64],
    max_step: f64,
) -> Result<Vec<Vec<f64>>> {
    (1..=ops.n_modes())
        .map(|j| {
            let run = integrate_heisenberg(h, &ops.number(j)?.to_dense(), sample_times, max_step)?;
            Ok(run.expectation(initial))
        })
        .collect()
}

/// Exactly solvable models with known density formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedFormModel {
    /// Two-mode hopping `λ(a2 a1† + a1 a2†)`.
    Hopping2 { lambda: f64 },
    /// Three-mode all-to-all hopping.
    Hopping3 { lambda: f64 },
    /// `λ(a1† N̂2 + N̂2 a1)`.
    CubicPair { lambda: f64 },
    /// `λ(a1† a2† a3 + a3† a2 a1)`.
    CubicTriad { lambda: f64 },
    /// The triad plus a uniform on-site energy `ω Σ N̂_j`.
    CubicTriadFree { omega: f64, lambda: f64 },
}

impl ClosedFormModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hopping2 { .. } => "hopping2",
            Self::Hopping3 { .. } => "hopping3",
            Self::CubicPair { .. } => "cubic-pair",
            Self::CubicTriad { .. } => "cubic-triad",
            Self::CubicTriadFree { .. } => "cubic-triad-free",
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Self::Hopping2 { .. } | Self::CubicPair { .. } => 2,
            _ => 3,
        }
    }

    /// Hamiltonian in the expression language, unbound.
    pub fn hamiltonian_text(&self) -> &'static str {
        match self {
            Self::Hopping2 { .. } => "lambda*(c(2)*c'(1) + c(1)*c'(2))",
            Self::Hopping3 { .. } => {
                "lambda*(c(2)*c'(1) + c(1)*c'(2) + c(3)*c'(1) + c(1)*c'(3) + c(3)*c'(2) + c(2)*c'(3))"
            }
            Self::CubicPair { .. } => "lambda*(c'(1)*n(2) + n(2)*c(1))",
            Self::CubicTriad { .. } => "lambda*(c'(1)*c'(2)*c(3) + c'(3)*c(2)*c(1))",
            Self::CubicTriadFree { .. } => {
                "omega*(n(1) + n(2) + n(3)) + lambda*(c'(1)*c'(2)*c(3) + c'(3)*c(2)*c(1))"
            }
        }
    }

    /// Hamiltonian with parameters bound.
    pub fn hamiltonian(&self) -> OperatorExpression {
        let expr = parse(self.hamiltonian_text()).expect("catalog expressions parse");
        match *self {
            Self::Hopping2 { lambda }
            | Self::Hopping3 { lambda }
            | Self::CubicPair { lambda }
            | Self::CubicTriad { lambda } => expr.with_parameter("lambda", lambda),
            Self::CubicTriadFree { omega, lambda } => expr
                .with_parameter("lambda", lambda)
                .with_parameter("omega", omega),
        }
    }

    fn with_lambda(&self, value: f64) -> Self {
        match *self {
            Self::Hopping2 { .. } => Self::Hopping2 { lambda: value },
            Self::Hopping3 { .. } => Self::Hopping3 { lambda: value },
            Self::CubicPair { .. } => Self::CubicPair { lambda: value },
            Self::CubicTriad { .. } => Self::CubicTriad { lambda: value },
            Self::CubicTriadFree { omega, .. } => Self::CubicTriadFree {
                omega,
                lambda: value,
            },
        }
    }

    /// `n_j(t)` from the occupations `n0` (mode 1 first).
    fn density(&self, n0: &[f64], j: usize, t: f64) -> f64 {
        match *self {
            Self::Hopping2 { lambda } => {
                let (c2, s2) = ((lambda * t).cos().powi(2), (lambda * t).sin().powi(2));
                let other = 3 - j;
                n0[j - 1] * c2 + n0[other - 1] * s2
            }
            Self::Hopping3 { lambda } => (1..=3)
                .map(|k| n0[k - 1] * hopping3_amplitude(j, k, lambda, t).norm_sqr())
                .sum(),
            Self::CubicPair { lambda } => {
                if j == 2 || n0[1] == 0.0 {
                    n0[j - 1]
                } else {
                    let (c2, s2) = ((lambda * t).cos().powi(2), (lambda * t).sin().powi(2));
                    n0[0] * c2 + (1.0 - n0[0]) * s2
                }
            }
            Self::CubicTriad { lambda } => {
                let transfer = (lambda * t).sin().powi(2);
                triad_density(n0, j, transfer)
            }
            Self::CubicTriadFree { omega, lambda } => {
                let rabi = (omega * omega + 4.0 * lambda * lambda).sqrt();
                let amplitude = if rabi > 0.0 {
                    2.0 * lambda * lambda / (rabi * rabi)
                } else {
                    0.0
                };
                triad_density(n0, j, amplitude * (1.0 - (rabi * t).cos()))
            }
        }
    }
}

/// Only `(0,0,1)` and `(1,1,0)` mix; `transfer` is the population moved.
fn triad_density(n0: &[f64], j: usize, transfer: f64) -> f64 {
    let moves = match n0 {
        [a, b, c] if *a == 0.0 && *b == 0.0 && *c == 1.0 => true,
        [a, b, c] if *a == 1.0 && *b == 1.0 && *c == 0.0 => true,
        _ => false,
    };
    if !moves {
        return n0[j - 1];
    }
    if n0[j - 1] == 1.0 {
        1.0 - transfer
    } else {
        transfer
    }
}

/// Coefficient of `a_k` in `b_j(t)` for three-mode all-to-all hopping.
pub fn hopping3_amplitude(j: usize, k: usize, lambda: f64, t: f64) -> Complex64 {
    let (x, y) = (lambda * t, 2.0 * lambda * t);
    if j == k {
        Complex64::new(2.0 * x.cos() + y.cos(), -2.0 * x.sin() + y.sin()) / 3.0
    } else {
        Complex64::new(-x.cos() + y.cos(), x.sin() + y.sin()) / 3.0
    }
}

/// A model together with an initial Fock state.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormCase {
    pub id: String,
    pub model: ClosedFormModel,
    pub initial: FockState,
}

impl ClosedFormCase {
    pub fn new(model: ClosedFormModel, initial: FockState) -> Result<Self> {
        if initial.n_modes() != model.n_modes() {
            return Err(Error::InvalidPlan(format!(
                "{} has {} modes, initial state has {}",
                model.name(),
                model.n_modes(),
                initial.n_modes()
            )));
        }
        let occupations: String = initial
            .occupations()
            .iter()
            .map(|o| o.to_string())
            .collect();
        Ok(Self {
            id: format!("{}/{}", model.name(), occupations),
            model,
            initial,
        })
    }

    /// Closed-form `n_j(t)`.
    pub fn density(&self, j: usize, t: f64) -> Result<f64> {
        let n = self.model.n_modes();
        if j == 0 || j > n {
            return Err(Error::ModeOutOfRange {
                mode: j,
                n_modes: n,
            });
        }
        let n0: Vec<f64> = self
            .initial
            .occupations()
            .iter()
            .map(|&o| o as f64)
            .collect();
        Ok(self.model.density(&n0, j, t))
    }
}

impl fmt::Display for ClosedFormCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// Every model in the catalog with every initial Fock state, for the given
/// parameters. Ids look like `cubic-triad/001` (occupations, mode 1 first).
pub fn catalog(lambda: f64, omega: f64) -> Vec<ClosedFormCase> {
    let models = [
        ClosedFormModel::Hopping2 { lambda },
        ClosedFormModel::Hopping3 { lambda },
        ClosedFormModel::CubicPair { lambda },
        ClosedFormModel::CubicTriad { lambda },
        ClosedFormModel::CubicTriadFree { omega, lambda },
    ];
    models
        .iter()
        .flat_map(|&model| {
            let n = model.n_modes();
            (0..1usize << n).map(move |index| {
                ClosedFormCase::new(model, FockState::from_index(index, n).expect("index fits"))
                    .expect("modes agree")
            })
        })
        .collect()
}

/// Looks a case up by id.
pub fn lookup(id: &str, lambda: f64, omega: f64) -> Result<ClosedFormCase> {
    catalog(lambda, omega)
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCase(id.to_string()))
}

/// `n_j(t)` for the catalog case `id`.
pub fn closed_form_density(id: &str, lambda: f64, omega: f64, j: usize, t: f64) -> Result<f64> {
    lookup(id, lambda, omega)?.density(j, t)
}

/// Catalog case whose assembled Hamiltonian equals `h` (entrywise within
/// `1e-12`), given candidate parameter values. Both signs of the coupling
/// are tried; the densities are even in it.
pub fn match_catalog(
    h: &ComplexMatrix,
    ops: &ModeOperatorSet,
    initial: &FockState,
    lambda: f64,
    omega: f64,
) -> Option<ClosedFormCase> {
    let n = ops.n_modes();
    let models = [
        ClosedFormModel::Hopping2 { lambda },
        ClosedFormModel::Hopping3 { lambda },
        ClosedFormModel::CubicPair { lambda },
        ClosedFormModel::CubicTriad { lambda },
        ClosedFormModel::CubicTriadFree { omega, lambda },
    ];
    for model in models.iter().filter(|m| m.n_modes() == n) {
        for sign in [1.0, -1.0] {
            let candidate = model.with_lambda(sign * lambda);
            let Ok(matrix) = candidate.hamiltonian().assemble(ops) else {
                continue;
            };
            if matrix.max_abs_diff(h).is_ok_and(|d| d <= 1e-12) {
                return ClosedFormCase::new(candidate, *initial).ok();
            }
        }
    }
    None
}

#[derive(Clone, Debug, Default)]
pub struct CrosscheckOptions {
    /// RK4 step; [`default_step`] when `None`.
    pub step: Option<f64>,
    /// Skip RK4 above this Hilbert-space dimension.
    pub max_rk4_dimension: Option<usize>,
}

/// Agreement of the spectral densities with the independent references,
/// as max absolute differences over all modes and grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct CrosscheckReport {
    pub spectral_vs_rk4: Option<f64>,
    pub spectral_vs_closed_form: Option<f64>,
    pub rk4_vs_closed_form: Option<f64>,
    pub closed_form_case: Option<String>,
    pub rk4_step: Option<f64>,
}

impl CrosscheckReport {
    pub const RK4_TOLERANCE: f64 = 1e-7;
    pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

    pub fn passes(&self) -> bool {
        self.spectral_vs_rk4
            .is_none_or(|d| d <= Self::RK4_TOLERANCE)
            && self
                .spectral_vs_closed_form
                .is_none_or(|d| d <= Self::CLOSED_FORM_TOLERANCE)
    }
}

fn max_table_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// Runs the plan through the spectral path, RK4 and, when the Hamiltonian
/// is a catalog model, the closed form.
pub fn crosscheck(plan: &SimulationPlan, options: &CrosscheckOptions) -> Result<CrosscheckReport> {
    let ops = build_operators(plan.system())?;
    let h = plan.hamiltonian().assemble(&ops)?;
    let dynamics = Dynamics::from_matrix(ops, h, *plan.initial())?;
    crosscheck_with(&dynamics, plan, options)
}

/// Like [`crosscheck`], reusing the decomposition held by `dynamics`, which
/// must belong to the same Hamiltonian and initial state as `plan`.
pub fn crosscheck_with(
    dynamics: &Dynamics,
    plan: &SimulationPlan,
    options: &CrosscheckOptions,
) -> Result<CrosscheckReport> {
    let system: &FermionicSystem = plan.system();
    let ops = dynamics.operators();
    let h = dynamics.hamiltonian();
    let times = plan.time_grid();

    let mut spectral = vec![Vec::with_capacity(times.len()); system.n_modes()];
    for &t in times {
        for (j, v) in dynamics.raw_densities(t).into_iter().enumerate() {
            spectral[j].push(v);
        }
    }

    let mut report = CrosscheckReport {
        spectral_vs_rk4: None,
        spectral_vs_closed_form: None,
        rk4_vs_closed_form: None,
        closed_form_case: None,
        rk4_step: None,
    };

    let rk4 = if options
        .max_rk4_dimension
        .is_none_or(|max| system.dimension() <= max)
    {
        let step = options.step.unwrap_or_else(|| default_step(h));
        report.rk4_step = Some(step);
        let table = rk4_densities(h, ops, plan.initial(), times, step)?;
        report.spectral_vs_rk4 = Some(max_table_diff(&spectral, &table));
        Some(table)
    } else {
        None
    };

    let params = plan.hamiltonian().parameters();
    let lambda = params.get("lambda").copied().unwrap_or(0.0);
    let omega = params.get("omega").copied().unwrap_or(0.0);
    if let Some(case) = match_catalog(h, ops, plan.initial(), lambda, omega) {
        let exact = (1..=system.n_modes())
            .map(|j| {
                times
                    .iter()
                    .map(|&t| case.density(j, t))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        report.spectral_vs_closed_form = Some(max_table_diff(&spectral, &exact));
        report.rk4_vs_closed_form = rk4.as_ref().map(|table| max_table_diff(table, &exact));
        report.closed_form_case = Some(case.id);
    }
    Ok(report)
}
