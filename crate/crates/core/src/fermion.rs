//! Matrix representation of fermionic ladder operators on `2^N` dimensions.
//!
//! Mode `j` is built as `1^{⊗(N-j)} ⊗ σ+ ⊗ σz^{⊗(j-1)}`: the sign string sits on
//! the lower-numbered modes, which are the less significant tensor factors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{pauli, ComplexMatrix, FockState, MonomialMatrix, ONE};

/// Largest supported number of modes.
pub const MAX_MODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FermionicSystem {
    n_modes: usize,
}

impl FermionicSystem {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::UnsupportedModeCount(n_modes));
        }
        Ok(Self { n_modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_modes
    }
}

/// Lowering, raising and number operators for every mode, indexed from 1.
#[derive(Clone, Debug)]
pub struct ModeOperatorSet {
    n_modes: usize,
    lowering: Vec<MonomialMatrix>,
    raising: Vec<MonomialMatrix>,
    number: Vec<MonomialMatrix>,
}

impl ModeOperatorSet {
    /// Builds a set from arbitrary lowering operators; used to probe `verify_car`.
    pub fn from_lowering(lowering: Vec<MonomialMatrix>) -> Result<Self> {
        let n_modes = lowering.len();
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::UnsupportedModeCount(n_modes));
        }
        let dim = 1usize << n_modes;
        if let Some(bad) = lowering.iter().find(|a| a.dim() != dim) {
            return Err(Error::Shape(format!(
                "lowering operator of dim {} in a {n_modes}-mode set",
                bad.dim()
            )));
        }
        let raising: Vec<MonomialMatrix> = lowering.iter().map(MonomialMatrix::adjoint).collect();
        let number = raising
            .iter()
            .zip(&lowering)
            .map(|(up, down)| up.compose(down))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_modes,
            lowering,
            raising,
            number,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_modes
    }

    fn slot(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.n_modes {
            return Err(Error::ModeOutOfRange {
                mode: j,
                n_modes: self.n_modes,
            });
        }
        Ok(j - 1)
    }

    /// `a_j`.
    pub fn lowering(&self, j: usize) -> Result<&MonomialMatrix> {
        Ok(&self.lowering[self.slot(j)?])
    }

    /// `a_j†`.
    pub fn raising(&self, j: usize) -> Result<&MonomialMatrix> {
        Ok(&self.raising[self.slot(j)?])
    }

    /// `N̂_j = a_j† a_j`.
    pub fn number(&self, j: usize) -> Result<&MonomialMatrix> {
        Ok(&self.number[self.slot(j)?])
    }

    /// Diagonal of `N̂_j` as real numbers.
    pub fn number_diagonal(&self, j: usize) -> Result<Vec<f64>> {
        let n = self.number(j)?;
        Ok((0..n.dim())
            .map(|c| match n.column(c) {
                Some((r, v)) if r == c => v.re,
                _ => 0.0,
            })
            .collect())
    }
}

/// Jordan–Wigner operators for `system`.
pub fn build_operators(system: &FermionicSystem) -> Result<ModeOperatorSet> {
    let n = system.n_modes();
    let identity = MonomialMatrix::identity(2);
    let plus = MonomialMatrix::from_dense(&pauli::sigma_plus())?;
    let z = MonomialMatrix::from_dense(&pauli::sigma_z())?;

    let lowering = (1..=n)
        .map(|j| {
            let mut op = MonomialMatrix::identity(1);
            for _ in 0..n - j {
                op = op.kron(&identity);
            }
            op = op.kron(&plus);
            for _ in 0..j - 1 {
                op = op.kron(&z);
            }
            op
        })
        .collect();
    ModeOperatorSet::from_lowering(lowering)
}

/// Occupation of mode `j` in `state`, i.e. the eigenvalue of `N̂_j`.
pub fn number_eigenvalue(j: usize, state: &FockState) -> Result<u8> {
    state.occupation(j)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CarReport {
    /// Largest entrywise deviation over all checked relations.
    pub max_violation: f64,
    /// Relation that attains `max_violation`, e.g. `{a1, a2†}`.
    pub worst_relation: Option<String>,
}

impl CarReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.max_violation <= tolerance
    }
}

/// Max entrywise deviation of `A B + B A` from `expected * I`.
fn anticommutator_deviation(
    a: &MonomialMatrix,
    b: &MonomialMatrix,
    expected: Complex64,
) -> Result<f64> {
    let ab = a.compose(b)?;
    let ba = b.compose(a)?;
    let mut worst: f64 = 0.0;
    for col in 0..a.dim() {
        // Column `col` of the anticommutator has at most two nonzero rows.
        let mut entries: [(usize, Complex64); 3] = [
            (col, -expected),
            (usize::MAX, Complex64::default()),
            (usize::MAX, Complex64::default()),
        ];
        let mut used = 1;
        for (r, v) in [ab.column(col), ba.column(col)].into_iter().flatten() {
            match entries[..used].iter_mut().find(|(row, _)| *row == r) {
                Some(slot) => slot.1 += v,
                None => {
                    entries[used] = (r, v);
                    used += 1;
                }
            }
        }
        for (_, v) in &entries[..used] {
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

/// Checks `{a_j, a_k†} = δ_jk I`, `{a_j, a_k} = 0` and `a_j² = 0` for all pairs.
pub fn verify_car(ops: &ModeOperatorSet) -> Result<CarReport> {
    let mut report = CarReport {
        max_violation: 0.0,
        worst_relation: None,
    };
    let mut record = |value: f64, name: String| {
        if value > report.max_violation {
            report.max_violation = value;
            report.worst_relation = Some(name);
        }
    };
    for j in 1..=ops.n_modes() {
        let a_j = ops.lowering(j)?;
        let square = a_j.compose(a_j)?;
        let square_dev = (0..square.dim())
            .filter_map(|c| square.column(c))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        record(square_dev, format!("a{j}^2"));
        for k in 1..=ops.n_modes() {
            let delta = if j == k { ONE } else { Complex64::default() };
            let mixed = anticommutator_deviation(a_j, ops.raising(k)?, delta)?;
            record(mixed, format!("{{a{j}, a{k}†}}"));
            if j < k {
                let pure = anticommutator_deviation(a_j, ops.lowering(k)?, Complex64::default())?;
                record(pure, format!("{{a{j}, a{k}}}"));
            }
        }
    }
    Ok(report)
}

/// Dense copy of `a_j`, convenient for small systems.
pub fn lowering_dense(ops: &ModeOperatorSet, j: usize) -> Result<ComplexMatrix> {
    Ok(ops.lowering(j)?.to_dense())
}
