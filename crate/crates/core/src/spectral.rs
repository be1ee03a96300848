//! Hermitian eigendecomposition by cyclic Jacobi rotations, the exact
//! propagator `e^{iHt} = U† e^{iεt} U`, and evolved annihilators
//! `b_j(t) = a_j e^{-iHt}`.
//!
//! Before rotating, the matrix is split into the connected components of its
//! nonzero pattern. This is an exact permutation similarity; Hamiltonians with
//! conserved quantities break into many small blocks. Blocks whose entries are
//! all real are rotated in real arithmetic.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::ModeOperatorSet;
use crate::hamiltonian::require_hermitian;
use crate::tensor::{ComplexMatrix, ZERO};

/// Convergence target: off-diagonal Frobenius norm relative to `‖H‖_F`.
pub const JACOBI_RELATIVE_TOLERANCE: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order and the unitary `U` with `U H U† = diag(ε)`.
///
/// Row `k` of `U` holds the conjugated coordinates of the `k`-th eigenvector.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    unitary: ComplexMatrix,
    sweeps: usize,
    blocks: usize,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest number of Jacobi sweeps spent on any block.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Number of independent blocks found in the nonzero pattern.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// `U† diag(f(ε)) U`.
    pub fn spectral_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dimension();
        let u = &self.unitary;
        let mut out = ComplexMatrix::zeros(n, n);
        let data = out.data_mut();
        for (k, &eps) in self.eigenvalues.iter().enumerate() {
            let phase = f(eps);
            let row = u.row(k);
            for (a, &ua) in row.iter().enumerate() {
                if ua == ZERO {
                    continue;
                }
                let coeff = ua.conj() * phase;
                for (o, &ub) in data[a * n..(a + 1) * n].iter_mut().zip(row) {
                    *o += coeff * ub;
                }
            }
        }
        out
    }

    /// `U† diag(ε) U`, which should reproduce the input.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.spectral_function(|eps| Complex64::new(eps, 0.0))
    }

    /// Coordinates `U v` of a vector in the eigenbasis.
    pub fn to_eigenbasis(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.unitary.apply(v)
    }

    /// `U† diag(e^{iεt}) w` for eigenbasis coordinates `w`.
    pub fn from_eigenbasis(&self, w: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let n = self.dimension();
        if w.len() != n {
            return Err(Error::Shape(format!(
                "vector of length {} against dim {n}",
                w.len()
            )));
        }
        let mut out = vec![ZERO; n];
        for (k, (&wk, &eps)) in w.iter().zip(&self.eigenvalues).enumerate() {
            if wk == ZERO {
                continue;
            }
            let coeff = wk * Complex64::from_polar(1.0, eps * t);
            for (o, &u) in out.iter_mut().zip(self.unitary.row(k)) {
                *o += u.conj() * coeff;
            }
        }
        Ok(out)
    }

    /// `e^{iHt} v`.
    pub fn propagate(&self, v: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let w = self.to_eigenbasis(v)?;
        self.from_eigenbasis(&w, t)
    }
}

type SparseRow = Vec<(usize, Complex64)>;

/// Decomposes a Hermitian matrix.
pub fn eigendecompose(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    require_hermitian(h)?;
    let n = h.rows();
    // (eigenvalue, original slot, sparse eigenvector row)
    let mut pairs: Vec<(f64, usize, SparseRow)> = Vec::with_capacity(n);
    let mut sweeps = 0;
    let components = components(h);
    let blocks = components.len();
    for indices in components {
        let is_real = indices
            .iter()
            .all(|&r| indices.iter().all(|&c| h.get(r, c).im == 0.0));
        let (values, vectors, used) = if is_real {
            let block = gather(h, &indices, |z| z.re);
            let (vals, u, used) = jacobi(block, indices.len())?;
            (
                vals,
                u.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
                used,
            )
        } else {
            let block = gather(h, &indices, |z| z);
            jacobi(block, indices.len())?
        };
        sweeps = sweeps.max(used);
        let m = indices.len();
        for (r, value) in values.into_iter().enumerate() {
            let row = vectors[r * m..(r + 1) * m]
                .iter()
                .zip(&indices)
                .filter(|(z, _)| **z != ZERO)
                .map(|(&z, &g)| (g, z))
                .collect();
            pairs.push((value, indices[r], row));
        }
    }
    // Ties keep the order of the diagonal slot each eigenvalue converged in.
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });

    let mut unitary = ComplexMatrix::zeros(n, n);
    let data = unitary.data_mut();
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, (value, _, row)) in pairs.into_iter().enumerate() {
        eigenvalues.push(value);
        for (g, z) in row {
            data[k * n + g] = z;
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        unitary,
        sweeps,
        blocks,
    })
}

/// Connected components of the graph with an edge wherever `h[r][c] != 0`.
fn components(h: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = h.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in 0..n {
        for (c, z) in h.row(r).iter().enumerate().skip(r + 1) {
            if *z != ZERO {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Vec::new());
        }
        out[slot[root]].push(i);
    }
    out
}

fn gather<T>(h: &ComplexMatrix, indices: &[usize], f: impl Fn(Complex64) -> T) -> Vec<T> {
    indices
        .iter()
        .flat_map(|&r| indices.iter().map(move |&c| (r, c)))
        .map(|(r, c)| f(h.get(r, c)))
        .collect()
}

/// Scalars the rotation kernel runs on.
trait Scalar: Copy + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    const ONE: Self;
    fn conj(self) -> Self;
    fn norm(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn from_re(x: f64) -> Self;
    fn scale(self, x: f64) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    fn conj(self) -> Self {
        self
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
}

/// Rotation annihilating one off-diagonal pivot.
#[derive(Clone, Copy)]
struct Rotation<T> {
    p: usize,
    q: usize,
    c: f64,
    /// `s e^{iφ}` where `e^{iφ}` is the phase of the pivot.
    sp: T,
    new_pp: f64,
    new_qq: f64,
}

/// Pairings of a round-robin tournament on `n` players; every pair meets once
/// per sweep and the pairs within a round are disjoint.
fn tournament_rounds(n: usize) -> Vec<Vec<(usize, usize)>> {
    let m = n + n % 2;
    if m < 2 {
        return Vec::new();
    }
    let mut ring: Vec<usize> = (1..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        let seats: Vec<usize> = std::iter::once(0).chain(ring.iter().copied()).collect();
        let round = (0..m / 2)
            .map(|i| (seats[i], seats[m - 1 - i]))
            .filter(|&(a, b)| a < n && b < n)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        rounds.push(round);
        ring.rotate_right(1);
    }
    rounds
}

/// Cyclic Jacobi on a Hermitian `n x n` row-major block.
///
/// Pivots are visited in round-robin order. The rotations of one round act on
/// disjoint index pairs, so they are applied together as one pass over the
/// rows followed by one pass over the columns.
///
/// Returns unsorted eigenvalues, the row-major `U` with `U A U† = diag`, and
/// the number of sweeps performed.
fn jacobi<T: Scalar>(mut a: Vec<T>, n: usize) -> Result<(Vec<f64>, Vec<T>, usize)> {
    let mut u = vec![T::ZERO; n * n];
    for k in 0..n {
        u[k * n + k] = T::ONE;
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = JACOBI_RELATIVE_TOLERANCE * total;
    // Pivots below this size are left alone; if every off-diagonal entry is
    // below it, the off-diagonal norm is already below `target`.
    let negligible = target / n as f64;

    let off_norm = |a: &[T]| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[r * n + c].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let rounds = tournament_rounds(n);
    let mut rotations: Vec<Rotation<T>> = Vec::with_capacity(n / 2);
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target || total == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for round in &rounds {
            rotations.clear();
            for &(p, q) in round {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g <= negligible {
                    continue;
                }
                let app = a[p * n + p].re();
                let aqq = a[q * n + q].re();
                let zeta = (aqq - app) / (2.0 * g);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    let t = 1.0 / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    if zeta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                rotations.push(Rotation {
                    p,
                    q,
                    c,
                    sp: apq.scale(t * c / g),
                    new_pp: app - t * g,
                    new_qq: aqq + t * g,
                });
            }
            if rotations.is_empty() {
                continue;
            }
            // A ← J† A and U ← J† U, row pairs at a time.
            for r in &rotations {
                rotate_rows(&mut a, n, r.p, r.q, r.c, r.sp, r.sp.conj());
                rotate_rows(&mut u, n, r.p, r.q, r.c, r.sp, r.sp.conj());
            }
            // A ← A J, one row at a time.
            for row in a.chunks_exact_mut(n) {
                for r in &rotations {
                    let (x, y) = (row[r.p], row[r.q]);
                    row[r.p] = x.scale(r.c) - r.sp.conj() * y;
                    row[r.q] = r.sp * x + y.scale(r.c);
                }
            }
            for r in &rotations {
                a[r.p * n + r.p] = T::from_re(r.new_pp);
                a[r.q * n + r.q] = T::from_re(r.new_qq);
                a[r.p * n + r.q] = T::ZERO;
                a[r.q * n + r.p] = T::ZERO;
            }
        }
    }
    let values = (0..n).map(|k| a[k * n + k].re()).collect();
    Ok((values, u, sweeps))
}

/// `row_p ← c row_p − s e^{iφ} row_q`, `row_q ← s e^{−iφ} row_p + c row_q`.
#[inline]
fn rotate_rows<T: Scalar>(m: &mut [T], n: usize, p: usize, q: usize, c: f64, sp: T, sp_conj: T) {
    let (head, tail) = m.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = xp.scale(c) - sp * xq;
        *y = sp_conj * xp + xq.scale(c);
    }
}

/// The unitary `e^{iHt}` at a fixed time.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub time: f64,
    pub matrix: ComplexMatrix,
}

/// `U† diag(e^{iε t}) U`; exactly the identity at `t = 0`.
pub fn propagator(spec: &SpectralDecomposition, t: f64) -> Propagator {
    let matrix = if t == 0.0 {
        ComplexMatrix::identity(spec.dimension())
    } else {
        spec.spectral_function(|eps| Complex64::from_polar(1.0, eps * t))
    };
    Propagator { time: t, matrix }
}

/// `b_j(t) = a_j e^{-iHt}`, satisfying `b_j†(t) b_j(t) = e^{iHt} N̂_j e^{-iHt}`.
#[derive(Clone, Debug)]
pub struct EvolvedAnnihilator {
    pub mode: usize,
    pub time: f64,
    pub matrix: ComplexMatrix,
}

pub fn evolved_annihilator(
    ops: &ModeOperatorSet,
    spec: &SpectralDecomposition,
    j: usize,
    t: f64,
) -> Result<EvolvedAnnihilator> {
    let a_j = ops.lowering(j)?;
    if a_j.dim() != spec.dimension() {
        return Err(Error::Shape(format!(
            "operators of dim {} against a decomposition of dim {}",
            a_j.dim(),
            spec.dimension()
        )));
    }
    let backward = propagator(spec, -t);
    Ok(EvolvedAnnihilator {
        mode: j,
        time: t,
        matrix: a_j.mul_dense(&backward.matrix)?,
    })
}
