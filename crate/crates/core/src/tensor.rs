//! Dense complex matrices, Kronecker products and Fock-basis indexing.
//!
//! Matrices are stored row-major. Every constructor rejects non-finite
//! entries, so a `ComplexMatrix` never carries NaN or infinity.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

fn all_finite(entries: &[Complex64]) -> bool {
    entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.data[k * n + k] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![ZERO; n * n];
        for (k, &d) in diag.iter().enumerate() {
            data[k * n + k] = d;
        }
        Self::from_vec(n, n, data)
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::from_vec(rows, cols, data)
    }

    /// Wraps entries produced by arithmetic on finite inputs, checking finiteness.
    pub(crate) fn from_computed(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        debug_assert_eq!(data.len(), rows * cols);
        if !all_finite(&data) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Column `c` as a vector.
    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols))
            .map(|k| self.get(k, k))
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m) = (self.rows, other.cols);
        let mut out = vec![ZERO; n * m];
        // i-k-j order keeps both inner accesses contiguous; each output row
        // is accumulated in a fixed order.
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix::from_computed(n, m, out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).conj());
            }
        }
        ComplexMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![ZERO; rows * cols];
        for p in 0..self.rows {
            for r in 0..self.cols {
                let a = self.get(p, r);
                if a == ZERO {
                    continue;
                }
                for q in 0..other.rows {
                    let base = (p * other.rows + q) * cols + r * other.cols;
                    for (s, &b) in other.row(q).iter().enumerate() {
                        data[base + s] = a * b;
                    }
                }
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// `self * v` for a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Anticommutator `self*other + other*self`.
    pub fn anticommutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.try_add(&ba)
    }

    /// Commutator `self*other - other*self`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.try_sub(&ba)
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ComplexMatrix::from_computed(self.rows, self.cols, data)
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:>8.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator sugar for tests and small computations; panics on shape mismatch.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Square matrix with at most one nonzero entry in every row and every column.
///
/// Fermionic ladder and number operators in the occupation basis all have this
/// shape, so products and adjoints stay in the class and can be applied in
/// O(dim) without materialising `dim x dim` storage.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMatrix {
    dim: usize,
    /// `columns[c] = Some((r, v))` means entry `(r, c)` equals `v`.
    columns: Vec<Option<(usize, Complex64)>>,
}

impl MonomialMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            columns: (0..dim).map(|c| Some((c, ONE))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Converts a dense matrix, failing if some row or column has two nonzeros.
    pub fn from_dense(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "{}x{} is not square",
                m.rows(),
                m.cols()
            )));
        }
        let dim = m.rows();
        let mut columns = vec![None; dim];
        let mut row_used = vec![false; dim];
        for (r, used) in row_used.iter_mut().enumerate() {
            for (c, &v) in m.row(r).iter().enumerate() {
                if v == ZERO {
                    continue;
                }
                if columns[c].is_some() || *used {
                    return Err(Error::NotMonomial);
                }
                columns[c] = Some((r, v));
                *used = true;
            }
        }
        Ok(Self { dim, columns })
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        let dim = self.dim;
        let data = m.data_mut();
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, v)) = *entry {
                data[r * dim + c] = v;
            }
        }
        m
    }

    /// Image of the basis vector `e_col`: the single nonzero row and its value.
    pub fn column(&self, col: usize) -> Option<(usize, Complex64)> {
        self.columns[col]
    }

    /// `self * other`.
    pub fn compose(&self, other: &MonomialMatrix) -> Result<MonomialMatrix> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!("{} against {}", self.dim, other.dim)));
        }
        let columns = other
            .columns
            .iter()
            .map(|entry| {
                let (mid, v) = (*entry)?;
                let (r, w) = self.columns[mid]?;
                Some((r, w * v))
            })
            .collect();
        Ok(MonomialMatrix {
            dim: self.dim,
            columns,
        })
    }

    pub fn adjoint(&self) -> MonomialMatrix {
        let mut columns = vec![None; self.dim];
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, v)) = *entry {
                columns[r] = Some((c, v.conj()));
            }
        }
        MonomialMatrix {
            dim: self.dim,
            columns,
        }
    }

    pub fn kron(&self, other: &MonomialMatrix) -> MonomialMatrix {
        let dim = self.dim * other.dim;
        let mut columns = vec![None; dim];
        for (r_a, a) in self.columns.iter().enumerate() {
            for (r_b, b) in other.columns.iter().enumerate() {
                if let (Some((p, x)), Some((q, y))) = (a, b) {
                    columns[r_a * other.dim + r_b] = Some((p * other.dim + q, x * y));
                }
            }
        }
        MonomialMatrix { dim, columns }
    }

    /// `self * v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector of length {} against dim {}",
                v.len(),
                self.dim
            )));
        }
        let mut out = vec![ZERO; self.dim];
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, w)) = *entry {
                out[r] += w * v[c];
            }
        }
        Ok(out)
    }

    /// `self * m` for a dense matrix: a signed row selection.
    pub fn mul_dense(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim {
            return Err(Error::Shape(format!(
                "dim {} against {} rows",
                self.dim,
                m.rows()
            )));
        }
        let cols = m.cols();
        let mut out = ComplexMatrix::zeros(self.dim, cols);
        let data = out.data_mut();
        for (c, entry) in self.columns.iter().enumerate() {
            if let Some((r, w)) = *entry {
                for (o, &x) in data[r * cols..(r + 1) * cols].iter_mut().zip(m.row(c)) {
                    *o = w * x;
                }
            }
        }
        Ok(out)
    }
}

/// Occupation tuple of `n` fermionic modes. Mode `j` (1-based) is stored in bit `j-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockState {
    n_modes: usize,
    bits: usize,
}

impl FockState {
    /// Occupations listed mode 1 first.
    pub fn from_occupations(occupations: &[u8]) -> Result<Self> {
        let n_modes = occupations.len();
        if n_modes == 0 || n_modes >= usize::BITS as usize {
            return Err(Error::InvalidState(format!("{n_modes} modes")));
        }
        let mut bits = 0;
        for (k, &occ) in occupations.iter().enumerate() {
            match occ {
                0 => {}
                1 => bits |= 1 << k,
                other => {
                    return Err(Error::InvalidState(format!(
                        "occupation of mode {} is {other}, expected 0 or 1",
                        k + 1
                    )))
                }
            }
        }
        Ok(Self { n_modes, bits })
    }

    /// Occupations in the written order `(i_{N-1}, ..., i_1, i_0)`.
    pub fn from_tuple(tuple: &[u8]) -> Result<Self> {
        let reversed: Vec<u8> = tuple.iter().rev().copied().collect();
        Self::from_occupations(&reversed)
    }

    /// Inverse of [`fock_index`].
    pub fn from_index(index: usize, n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes >= usize::BITS as usize || index >> n_modes != 0 {
            return Err(Error::IndexOutOfRange {
                index,
                len: 1usize.checked_shl(n_modes as u32).unwrap_or(usize::MAX),
            });
        }
        Ok(Self {
            n_modes,
            bits: index,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Occupation (0 or 1) of 1-based mode `j`.
    pub fn occupation(&self, j: usize) -> Result<u8> {
        if j == 0 || j > self.n_modes {
            return Err(Error::ModeOutOfRange {
                mode: j,
                n_modes: self.n_modes,
            });
        }
        Ok(((self.bits >> (j - 1)) & 1) as u8)
    }

    /// Occupations listed mode 1 first.
    pub fn occupations(&self) -> Vec<u8> {
        (0..self.n_modes)
            .map(|k| ((self.bits >> k) & 1) as u8)
            .collect()
    }

    pub fn particle_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn index(&self) -> usize {
        self.bits
    }
}

impl fmt::Display for FockState {
    /// Written as `|i_{N-1},...,i_0>`, highest mode first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let occ: Vec<String> = self.occupations().iter().rev().map(u8::to_string).collect();
        write!(f, "|{}>", occ.join(","))
    }
}

/// 0-based canonical-basis position `Σ_k 2^k i_k` of a Fock state.
pub fn fock_index(state: &FockState) -> usize {
    state.index()
}

/// Unit vector with a one at `index`.
pub fn basis_vector(index: usize, dim: usize) -> Result<Vec<Complex64>> {
    if index >= dim {
        return Err(Error::IndexOutOfRange { index, len: dim });
    }
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    Ok(v)
}

/// `Σ |v_k|²`.
pub fn vector_norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// The 2x2 Pauli-type building blocks used for the mode operators.
pub mod pauli {
    use super::*;

    /// `[[0, 1], [0, 0]]`: maps the occupied state to the empty one.
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).expect("finite")
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("finite")
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_times_sigma_plus() {
        assert_eq!(&identity() * &sigma_plus(), sigma_plus());
    }

    #[test]
    fn sigma_plus_is_nilpotent() {
        let sq = &sigma_plus() * &sigma_plus();
        assert_eq!(sq, ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn number_operator_of_first_mode() {
        // a1 = 1 ⊗ σ+, entries written out by hand
        let a1 = ComplexMatrix::from_real(
            4,
            4,
            &[
                0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0.,
            ],
        )
        .unwrap();
        let n1 = &a1.adjoint() * &a1;
        let expected = ComplexMatrix::from_diagonal(&[ZERO, ONE, ZERO, ONE]).unwrap();
        assert_eq!(n1, expected);
    }

    #[test]
    fn matmul_shape_error() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Shape(_))));
    }

    #[test]
    fn adjoint_examples() {
        let d = ComplexMatrix::from_diagonal(&[ONE, I]).unwrap();
        assert_eq!(
            d.adjoint(),
            ComplexMatrix::from_diagonal(&[ONE, -I]).unwrap()
        );

        let a1 = identity().kron(&sigma_plus());
        let a1_dag = a1.adjoint();
        // 1s at (2,1) and (4,3) in 1-based positions
        for r in 0..4 {
            for col in 0..4 {
                let expected = if (r, col) == (1, 0) || (r, col) == (3, 2) {
                    ONE
                } else {
                    ZERO
                };
                assert_eq!(a1_dag[(r, col)], expected);
            }
        }

        let h = ComplexMatrix::from_real(
            4,
            4,
            &[
                0., 0., 0., 0., 0., 0., -1., 0., 0., -1., 0., 0., 0., 0., 0., 0.,
            ],
        )
        .unwrap();
        assert_eq!(h.adjoint(), h);
    }

    #[test]
    fn kron_builds_two_mode_lowering_operators() {
        let a1 = identity().kron(&sigma_plus());
        let a1_expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0.,
            ],
        )
        .unwrap();
        assert_eq!(a1, a1_expected);

        let a2 = sigma_plus().kron(&sigma_z());
        let a2_expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                0., 0., 1., 0., 0., 0., 0., -1., 0., 0., 0., 0., 0., 0., 0., 0.,
            ],
        )
        .unwrap();
        assert_eq!(a2, a2_expected);

        let m = ComplexMatrix::from_vec(2, 2, vec![c(1., 2.), c(0., -1.), c(3., 0.), c(-2., 5.)])
            .unwrap();
        assert_eq!(m.kron(&ComplexMatrix::identity(1)), m);
    }

    #[test]
    fn fock_index_examples() {
        let vac = FockState::from_tuple(&[0, 0, 0, 0]).unwrap();
        assert_eq!(fock_index(&vac), 0);
        let one = FockState::from_tuple(&[0, 0, 0, 1]).unwrap();
        assert_eq!(fock_index(&one), 1);
        let three = FockState::from_tuple(&[0, 0, 1, 1]).unwrap();
        assert_eq!(fock_index(&three), 3);
        assert_eq!(three.to_string(), "|0,0,1,1>");
        assert_eq!(three.occupations(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn fock_state_rejects_bad_occupation() {
        assert!(matches!(
            FockState::from_occupations(&[2, 0]),
            Err(Error::InvalidState(_))
        ));
        assert!(FockState::from_occupations(&[]).is_err());
        assert!(FockState::from_index(4, 2).is_err());
    }

    #[test]
    fn basis_vector_examples() {
        assert_eq!(basis_vector(0, 4).unwrap(), vec![ONE, ZERO, ZERO, ZERO]);
        assert_eq!(basis_vector(3, 4).unwrap(), vec![ZERO, ZERO, ZERO, ONE]);
        let e3 = basis_vector(2, 8).unwrap();
        assert_eq!(e3.iter().filter(|z| **z == ONE).count(), 1);
        assert_eq!(e3[2], ONE);
        assert!(matches!(
            basis_vector(4, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(vector_norm_sq(&[ONE, ZERO, ZERO, ZERO]), 1.0);
        let theta: f64 = 0.73;
        let v = [c(theta.cos(), 0.0), c(0.0, theta.sin())];
        assert!((vector_norm_sq(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(matches!(
            ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            ComplexMatrix::from_real(1, 2, &[1.0, f64::INFINITY]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            ComplexMatrix::from_vec(2, 2, vec![ONE; 3]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn monomial_round_trip_and_products() {
        let a2 = sigma_plus().kron(&sigma_z());
        let m = MonomialMatrix::from_dense(&a2).unwrap();
        assert_eq!(m.to_dense(), a2);
        assert_eq!(m.adjoint().to_dense(), a2.adjoint());
        let prod = m.adjoint().compose(&m).unwrap();
        assert_eq!(prod.to_dense(), &a2.adjoint() * &a2);
        let dense_kron = a2.kron(&sigma_plus());
        let mono_kron = m.kron(&MonomialMatrix::from_dense(&sigma_plus()).unwrap());
        assert_eq!(mono_kron.to_dense(), dense_kron);

        let full = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            MonomialMatrix::from_dense(&full),
            Err(Error::NotMonomial)
        ));
    }
}
