//! Occupation-density trajectories and conserved linear combinations of
//! number operators.
//!
//! One decomposition of `H` serves every time point:
//! `n_j(t) = ‖a_j e^{-iHt} φ_in‖² = ‖a_j U† e^{-iεt} U φ_in‖²`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{build_operators, FermionicSystem, ModeOperatorSet};
use crate::hamiltonian::{require_hermitian, OperatorExpression};
use crate::spectral::{eigendecompose, SpectralDecomposition};
use crate::tensor::{basis_vector, vector_norm_sq, ComplexMatrix, FockState};

/// Densities this far outside `[0, 1]` are clamped; anything further is an error.
pub const DENSITY_SLACK: f64 = 1e-10;
/// Largest `‖[H, Σ c_j N̂_j]‖_max` for a reported conserved combination.
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;
/// Gram eigenvalues below this fraction of `‖G‖_F` are candidate null directions.
pub const GRAM_NULL_RELATIVE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SimulationPlan {
    system: FermionicSystem,
    hamiltonian: OperatorExpression,
    initial: FockState,
    time_grid: Vec<f64>,
}

impl SimulationPlan {
    pub fn new(
        system: FermionicSystem,
        hamiltonian: OperatorExpression,
        initial: FockState,
        time_grid: Vec<f64>,
    ) -> Result<Self> {
        if initial.n_modes() != system.n_modes() {
            return Err(Error::InvalidPlan(format!(
                "initial state has {} modes, system has {}",
                initial.n_modes(),
                system.n_modes()
            )));
        }
        if hamiltonian.max_mode() > system.n_modes() {
            return Err(Error::ModeOutOfRange {
                mode: hamiltonian.max_mode(),
                n_modes: system.n_modes(),
            });
        }
        match time_grid.first() {
            None => return Err(Error::InvalidPlan("empty time grid".into())),
            Some(&t0) if t0 != 0.0 => {
                return Err(Error::InvalidPlan(format!(
                    "time grid starts at {t0}, not 0"
                )))
            }
            _ => {}
        }
        if time_grid.iter().any(|t| !t.is_finite()) || time_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPlan(
                "time grid must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self {
            system,
            hamiltonian,
            initial,
            time_grid,
        })
    }

    pub fn system(&self) -> &FermionicSystem {
        &self.system
    }

    pub fn hamiltonian(&self) -> &OperatorExpression {
        &self.hamiltonian
    }

    pub fn initial(&self) -> &FockState {
        &self.initial
    }

    pub fn time_grid(&self) -> &[f64] {
        &self.time_grid
    }
}

/// `samples` evenly spaced points on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || t_end <= 0.0 || !t_end.is_finite() {
        return Err(Error::InvalidPlan(format!(
            "uniform grid needs t_end > 0 and at least 2 samples (got {t_end}, {samples})"
        )));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(|k| k as f64 * t_end / last).collect())
}

/// A diagonalized Hamiltonian together with an initial Fock state.
#[derive(Clone, Debug)]
pub struct Dynamics {
    ops: ModeOperatorSet,
    hamiltonian: ComplexMatrix,
    spectrum: SpectralDecomposition,
    initial: FockState,
    initial_vector: Vec<Complex64>,
    eigen_coords: Vec<Complex64>,
}

impl Dynamics {
    /// Assembles, certifies and diagonalizes `expr`.
    pub fn new(
        system: &FermionicSystem,
        expr: &OperatorExpression,
        initial: FockState,
    ) -> Result<Self> {
        let ops = build_operators(system)?;
        let hamiltonian = expr.assemble(&ops)?;
        Self::from_matrix(ops, hamiltonian, initial)
    }

    pub fn from_matrix(
        ops: ModeOperatorSet,
        hamiltonian: ComplexMatrix,
        initial: FockState,
    ) -> Result<Self> {
        if initial.n_modes() != ops.n_modes() {
            return Err(Error::InvalidPlan(format!(
                "initial state has {} modes, operators have {}",
                initial.n_modes(),
                ops.n_modes()
            )));
        }
        if hamiltonian.rows() != ops.dimension() {
            return Err(Error::Shape(format!(
                "hamiltonian of dim {} on a space of dim {}",
                hamiltonian.rows(),
                ops.dimension()
            )));
        }
        require_hermitian(&hamiltonian)?;
        let spectrum = eigendecompose(&hamiltonian)?;
        Ok(Self::with_spectrum(ops, hamiltonian, spectrum, initial))
    }

    /// Reuses an existing decomposition of `hamiltonian` for a new initial state.
    pub fn with_spectrum(
        ops: ModeOperatorSet,
        hamiltonian: ComplexMatrix,
        spectrum: SpectralDecomposition,
        initial: FockState,
    ) -> Self {
        let initial_vector =
            basis_vector(initial.index(), ops.dimension()).expect("index within 2^N");
        let eigen_coords = spectrum.unitary().column(initial.index());
        Self {
            ops,
            hamiltonian,
            spectrum,
            initial,
            initial_vector,
            eigen_coords,
        }
    }

    pub fn operators(&self) -> &ModeOperatorSet {
        &self.ops
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn initial(&self) -> &FockState {
        &self.initial
    }

    /// `e^{-iHt} φ_in`.
    pub fn state_at(&self, t: f64) -> Vec<Complex64> {
        if t == 0.0 {
            return self.initial_vector.clone();
        }
        self.spectrum
            .from_eigenbasis(&self.eigen_coords, -t)
            .expect("coordinates match the decomposition")
    }

    /// Unclamped `‖b_j(t) φ_in‖²`.
    pub fn raw_density(&self, j: usize, t: f64) -> Result<f64> {
        let a_j = self.ops.lowering(j)?;
        Ok(vector_norm_sq(&a_j.apply(&self.state_at(t))?))
    }

    /// Unclamped densities of all modes at `t`, mode 1 first.
    pub fn raw_densities(&self, t: f64) -> Vec<f64> {
        let psi = self.state_at(t);
        (1..=self.ops.n_modes())
            .map(|j| {
                let a_j = self.ops.lowering(j).expect("mode in range");
                vector_norm_sq(&a_j.apply(&psi).expect("dimensions match"))
            })
            .collect()
    }
}

/// Maps values within [`DENSITY_SLACK`] of `[0, 1]` onto it.
fn clamp_density(mode: usize, time: f64, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if (-DENSITY_SLACK..0.0).contains(&value) {
        Ok(0.0)
    } else if value > 1.0 && value <= 1.0 + DENSITY_SLACK {
        Ok(1.0)
    } else {
        Err(Error::DensityOutOfRange { mode, time, value })
    }
}

/// `n_j(t) = ⟨φ_in, e^{iHt} N̂_j e^{-iHt} φ_in⟩`, clamped to `[0, 1]`.
pub fn density(dynamics: &Dynamics, j: usize, t: f64) -> Result<f64> {
    clamp_density(j, t, dynamics.raw_density(j, t)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMetadata {
    pub hamiltonian: String,
    pub parameters: BTreeMap<String, f64>,
    /// Mode 1 first.
    pub initial: Vec<u8>,
}

/// Densities `n_j(t_k)` of every mode on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    /// `densities[j - 1][k] = n_j(t_k)`.
    pub densities: Vec<Vec<f64>>,
    pub metadata: TrajectoryMetadata,
}

impl TrajectoryTable {
    pub fn n_modes(&self) -> usize {
        self.densities.len()
    }

    pub fn mode(&self, j: usize) -> Result<&[f64]> {
        if j == 0 || j > self.n_modes() {
            return Err(Error::ModeOutOfRange {
                mode: j,
                n_modes: self.n_modes(),
            });
        }
        Ok(&self.densities[j - 1])
    }

    /// All densities at time index `k`, mode 1 first.
    pub fn row(&self, k: usize) -> Vec<f64> {
        self.densities.iter().map(|d| d[k]).collect()
    }
}

/// Densities of all modes at every grid point of `plan`.
pub fn simulate(plan: &SimulationPlan) -> Result<TrajectoryTable> {
    let dynamics = Dynamics::new(&plan.system, &plan.hamiltonian, plan.initial)?;
    simulate_with(&dynamics, plan)
}

/// Like [`simulate`], reusing a prepared [`Dynamics`].
pub fn simulate_with(dynamics: &Dynamics, plan: &SimulationPlan) -> Result<TrajectoryTable> {
    let n = plan.system.n_modes();
    let mut densities = vec![Vec::with_capacity(plan.time_grid.len()); n];
    for &t in &plan.time_grid {
        for (j, value) in dynamics.raw_densities(t).into_iter().enumerate() {
            densities[j].push(clamp_density(j + 1, t, value)?);
        }
    }
    Ok(TrajectoryTable {
        times: plan.time_grid.clone(),
        densities,
        metadata: TrajectoryMetadata {
            hamiltonian: plan.hamiltonian.to_string(),
            parameters: plan.hamiltonian.parameters().clone(),
            initial: plan.initial.occupations(),
        },
    })
}

/// A real combination `Σ c_j N̂_j` commuting with `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedCombination {
    /// Unit length, first nonzero entry positive.
    pub coefficients: Vec<f64>,
    /// `‖[H, Σ c_j N̂_j]‖_max`.
    pub residual: f64,
}

/// `‖[H, Σ c_j N̂_j]‖_max`, using that every `N̂_j` is diagonal.
pub fn commutator_residual(h: &ComplexMatrix, diagonals: &[Vec<f64>], c: &[f64]) -> f64 {
    let n = h.rows();
    let weight: Vec<f64> = (0..n)
        .map(|a| diagonals.iter().zip(c).map(|(d, cj)| cj * d[a]).sum())
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for (b, z) in h.row(a).iter().enumerate() {
            if z.re != 0.0 || z.im != 0.0 {
                worst = worst.max(z.norm() * (weight[b] - weight[a]).abs());
            }
        }
    }
    worst
}

/// Orthonormal basis of `{c : [H, Σ c_j N̂_j] = 0}`.
///
/// The null space comes from the Gram matrix
/// `G_jk = Re tr([H, N̂_j]† [H, N̂_k])`; the returned basis is canonical
/// (Gram–Schmidt on the reduced row echelon form), so it does not depend on
/// how the eigensolver resolves degenerate directions.
pub fn find_conserved_combinations(
    h: &ComplexMatrix,
    ops: &ModeOperatorSet,
) -> Result<Vec<ConservedCombination>> {
    require_hermitian(h)?;
    if h.rows() != ops.dimension() {
        return Err(Error::Shape(format!(
            "hamiltonian of dim {} on a space of dim {}",
            h.rows(),
            ops.dimension()
        )));
    }
    let n_modes = ops.n_modes();
    let diagonals = (1..=n_modes)
        .map(|j| ops.number_diagonal(j))
        .collect::<Result<Vec<_>>>()?;

    // [H, N̂_j]_ab = H_ab (d_j[b] - d_j[a])
    let mut gram = vec![0.0; n_modes * n_modes];
    let mut delta = vec![0.0; n_modes];
    let dim = h.rows();
    for a in 0..dim {
        for (b, z) in h.row(a).iter().enumerate() {
            let w = z.norm_sqr();
            if w == 0.0 {
                continue;
            }
            for (j, d) in diagonals.iter().enumerate() {
                delta[j] = d[b] - d[a];
            }
            for j in 0..n_modes {
                if delta[j] == 0.0 {
                    continue;
                }
                for k in 0..n_modes {
                    gram[j * n_modes + k] += w * delta[j] * delta[k];
                }
            }
        }
    }
    let gram = ComplexMatrix::from_real(n_modes, n_modes, &gram)?;
    let spec = eigendecompose(&gram)?;
    let scale = gram.frobenius_norm();
    let null: Vec<Vec<f64>> = spec
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &lambda)| lambda <= GRAM_NULL_RELATIVE * scale)
        .map(|(k, _)| spec.unitary().row(k).iter().map(|z| z.re).collect())
        .collect();

    let basis = gram_schmidt(&reduced_row_echelon(null));
    Ok(basis
        .into_iter()
        .map(|c| ConservedCombination {
            residual: commutator_residual(h, &diagonals, &c),
            coefficients: c,
        })
        .filter(|combo| combo.residual <= CONSERVATION_TOLERANCE)
        .collect())
}

const PIVOT_EPS: f64 = 1e-9;

/// Reduced row echelon form of the row space of `rows`, zero rows dropped.
fn reduced_row_echelon(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut lead = 0;
    for col in 0..n_cols {
        if lead == rows.len() {
            break;
        }
        let Some(pivot) = (lead..rows.len())
            .filter(|&r| rows[r][col].abs() > PIVOT_EPS)
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            continue;
        };
        rows.swap(lead, pivot);
        let p = rows[lead][col];
        rows[lead].iter_mut().for_each(|x| *x /= p);
        let pivot_row = rows[lead].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != lead && row[col] != 0.0 {
                let f = row[col];
                row.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(x, y)| *x -= f * y);
            }
        }
        lead += 1;
    }
    rows.truncate(lead);
    for row in &mut rows {
        for x in row.iter_mut() {
            if x.abs() < PIVOT_EPS * 1e-3 {
                *x = 0.0;
            }
        }
    }
    rows
}

fn gram_schmidt(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for q in &out {
            let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > PIVOT_EPS {
            out.push(normalize_sign(v.into_iter().map(|x| x / norm).collect()));
        }
    }
    out
}

fn normalize_sign(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Unit-length reduced-row-echelon spanning set of the same subspace, which
/// reads better than the orthonormal basis, e.g. `(1,0,1)/√2, (0,1,1)/√2`.
pub fn readable_basis(combos: &[ConservedCombination]) -> Vec<Vec<f64>> {
    let rows = combos.iter().map(|c| c.coefficients.clone()).collect();
    reduced_row_echelon(rows)
        .into_iter()
        .map(|r| {
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            normalize_sign(r.into_iter().map(|x| x / norm).collect())
        })
        .collect()
}

/// `max_t |Σ c_j n_j(t) − Σ c_j n_j(0)|`.
pub fn verify_conservation(table: &TrajectoryTable, combo: &ConservedCombination) -> Result<f64> {
    weighted_drift(table, &combo.coefficients)
}

/// Drift of an arbitrary weighting of the densities.
pub fn weighted_drift(table: &TrajectoryTable, coefficients: &[f64]) -> Result<f64> {
    if coefficients.len() != table.n_modes() {
        return Err(Error::Shape(format!(
            "{} coefficients for {} modes",
            coefficients.len(),
            table.n_modes()
        )));
    }
    let value = |k: usize| -> f64 {
        coefficients
            .iter()
            .zip(&table.densities)
            .map(|(c, d)| c * d[k])
            .sum()
    };
    if table.times.is_empty() {
        return Ok(0.0);
    }
    let start = value(0);
    Ok((0..table.times.len())
        .map(|k| (value(k) - start).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::parse;

    const HOPPING2: &str = "lambda*(c(2)*c'(1) + c(1)*c'(2))";
    const HOPPING3: &str =
        "lambda*(c(2)*c'(1) + c(1)*c'(2) + c(3)*c'(1) + c(1)*c'(3) + c(3)*c'(2) + c(2)*c'(3))";
    const TRIAD: &str = "lambda*(c'(1)*c'(2)*c(3) + c'(3)*c(2)*c(1))";

    fn dynamics(text: &str, occupations: &[u8], lambda: f64) -> Dynamics {
        let system = FermionicSystem::new(occupations.len()).unwrap();
        let expr = parse(text).unwrap().with_parameter("lambda", lambda);
        Dynamics::new(
            &system,
            &expr,
            FockState::from_occupations(occupations).unwrap(),
        )
        .unwrap()
    }

    fn plan(
        text: &str,
        occupations: &[u8],
        lambda: f64,
        t_end: f64,
        samples: usize,
    ) -> SimulationPlan {
        SimulationPlan::new(
            FermionicSystem::new(occupations.len()).unwrap(),
            parse(text).unwrap().with_parameter("lambda", lambda),
            FockState::from_occupations(occupations).unwrap(),
            uniform_grid(t_end, samples).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn two_mode_hopping_density() {
        let lambda = 0.6;
        let d = dynamics(HOPPING2, &[1, 0], lambda);
        for k in 0..50 {
            let t = 0.21 * k as f64;
            let expected = (lambda * t).cos().powi(2);
            assert!((density(&d, 1, t).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn three_mode_hopping_density() {
        let d = dynamics(HOPPING3, &[1, 0, 0], 1.0);
        for k in 0..50 {
            let t = 0.17 * k as f64;
            let expected = (5.0 + 4.0 * (3.0 * t).cos()) / 9.0;
            assert!((density(&d, 1, t).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_stays_empty() {
        let d = dynamics(TRIAD, &[0, 0, 0], 1.0);
        for j in 1..=3 {
            assert_eq!(density(&d, j, 2.5).unwrap(), 0.0);
        }
    }

    #[test]
    fn cubic_pair_case_iii() {
        let table = simulate(&plan(
            "lambda*(c'(1)*n(2) + n(2)*c(1))",
            &[0, 1],
            0.8,
            6.0,
            61,
        ))
        .unwrap();
        for (k, &t) in table.times.iter().enumerate() {
            assert!((table.densities[0][k] - (0.8 * t).sin().powi(2)).abs() < 1e-12);
            assert!((table.densities[1][k] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triad_case_iv() {
        let table = simulate(&plan(TRIAD, &[0, 0, 1], 1.0, 5.0, 51)).unwrap();
        for (k, &t) in table.times.iter().enumerate() {
            let (s2, c2) = (t.sin().powi(2), t.cos().powi(2));
            assert!((table.densities[0][k] - s2).abs() < 1e-12);
            assert!((table.densities[1][k] - s2).abs() < 1e-12);
            assert!((table.densities[2][k] - c2).abs() < 1e-12);
        }
        assert_eq!(table.metadata.initial, vec![0, 0, 1]);
    }

    #[test]
    fn initial_densities_are_exact() {
        let table = simulate(&plan(HOPPING3, &[1, 1, 0], 1.0, 1.0, 3)).unwrap();
        assert_eq!(table.row(0), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn plan_validation() {
        let system = FermionicSystem::new(2).unwrap();
        let expr = parse(HOPPING2).unwrap();
        let state = FockState::from_occupations(&[1, 0]).unwrap();
        for grid in [
            vec![],
            vec![0.5, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, f64::NAN],
        ] {
            assert!(matches!(
                SimulationPlan::new(system, expr.clone(), state, grid),
                Err(Error::InvalidPlan(_))
            ));
        }
        let wrong_modes = FockState::from_occupations(&[1, 0, 0]).unwrap();
        assert!(SimulationPlan::new(system, expr.clone(), wrong_modes, vec![0.0]).is_err());
        let too_big = parse("n(3)").unwrap();
        assert!(matches!(
            SimulationPlan::new(system, too_big, state, vec![0.0]),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(uniform_grid(1.0, 1).is_err());
        assert!(uniform_grid(0.0, 5).is_err());
        assert_eq!(uniform_grid(1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn non_hermitian_is_refused() {
        let system = FermionicSystem::new(1).unwrap();
        let expr = parse("c(1)").unwrap();
        let state = FockState::from_occupations(&[1]).unwrap();
        assert!(matches!(
            Dynamics::new(&system, &expr, state),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn clamping_rules() {
        assert_eq!(clamp_density(1, 0.0, -5e-11).unwrap(), 0.0);
        assert_eq!(clamp_density(1, 0.0, 1.0 + 5e-11).unwrap(), 1.0);
        assert_eq!(clamp_density(1, 0.0, 0.25).unwrap(), 0.25);
        assert!(matches!(
            clamp_density(2, 1.0, 1.0 + 1e-6),
            Err(Error::DensityOutOfRange { mode: 2, .. })
        ));
        assert!(clamp_density(1, 0.0, -1e-9).is_err());
    }

    fn conserved(text: &str, n: usize, params: &[(&str, f64)]) -> Vec<ConservedCombination> {
        let ops = build_operators(&FermionicSystem::new(n).unwrap()).unwrap();
        let h = parse(text)
            .unwrap()
            .with_parameters(params.iter().copied())
            .assemble(&ops)
            .unwrap();
        find_conserved_combinations(&h, &ops).unwrap()
    }

    #[test]
    fn hopping_conserves_total_number() {
        let combos = conserved(HOPPING2, 2, &[("lambda", 1.0)]);
        assert_eq!(combos.len(), 1);
        let s = 0.5f64.sqrt();
        assert!((combos[0].coefficients[0] - s).abs() < 1e-12);
        assert!((combos[0].coefficients[1] - s).abs() < 1e-12);
        assert!(combos[0].residual <= CONSERVATION_TOLERANCE);
    }

    #[test]
    fn triad_conserves_two_combinations() {
        let combos = conserved(TRIAD, 3, &[("lambda", 1.0)]);
        assert_eq!(combos.len(), 2);
        let s = 0.5f64.sqrt();
        let readable = readable_basis(&combos);
        let expected = [vec![s, 0.0, s], vec![0.0, s, s]];
        for (got, want) in readable.iter().zip(&expected) {
            for (a, b) in got.iter().zip(want) {
                assert!((a - b).abs() < 1e-12, "{readable:?}");
            }
        }
        // orthonormal
        let dot: f64 = combos[0]
            .coefficients
            .iter()
            .zip(&combos[1].coefficients)
            .map(|(a, b)| a * b)
            .sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn diagonal_hamiltonian_conserves_everything() {
        let combos = conserved("omega*(n(1) + n(2) + n(3))", 3, &[("omega", 1.3)]);
        assert_eq!(combos.len(), 3);
        for (k, combo) in combos.iter().enumerate() {
            assert_eq!(combo.residual, 0.0);
            assert_eq!(combo.coefficients[k], 1.0);
        }
    }

    #[test]
    fn drift_examples() {
        let table = simulate(&plan(HOPPING2, &[0, 1], 1.0, 10.0, 101)).unwrap();
        let combo = ConservedCombination {
            coefficients: vec![1.0, 1.0],
            residual: 0.0,
        };
        assert!(verify_conservation(&table, &combo).unwrap() <= 1e-9);
        assert!(weighted_drift(&table, &[1.0, 0.0]).unwrap() > 0.9);
        assert!(matches!(
            weighted_drift(&table, &[1.0]),
            Err(Error::Shape(_))
        ));

        let table = simulate(&plan(TRIAD, &[1, 1, 0], 1.0, 20.0, 201)).unwrap();
        assert!(weighted_drift(&table, &[1.0, 0.0, 1.0]).unwrap() <= 1e-9);
        assert!(weighted_drift(&table, &[0.0, 1.0, 1.0]).unwrap() <= 1e-9);

        let table = simulate(&plan("0*n(1)", &[1, 0], 1.0, 3.0, 7)).unwrap();
        assert_eq!(weighted_drift(&table, &[0.3, -2.0]).unwrap(), 0.0);
    }

    #[test]
    fn total_number_not_conserved_by_triad() {
        let table = simulate(&plan(TRIAD, &[0, 0, 1], 1.0, 4.0, 401)).unwrap();
        let totals: Vec<f64> = (0..table.times.len())
            .map(|k| table.row(k).iter().sum())
            .collect();
        let min = totals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (min - 1.0).abs() < 1e-6 && (max - 2.0).abs() < 1e-4,
            "{min} {max}"
        );
    }
}
