//! Dense complex matrices and qubit-state primitives.
//!
//! Everything here is small (dimension at most 8) and stored densely. Basis
//! indices follow the big-endian convention: in a two-qubit index `2*i + j`,
//! `i` labels the first tensor factor and `j` the second.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Hermiticity tolerance for density operators.
pub const TOL_HERM: f64 = 1e-12;
/// Unit-trace tolerance for density operators.
pub const TOL_TRACE: f64 = 1e-12;
/// Smallest eigenvalue accepted as numerically non-negative.
pub const TOL_POS: f64 = -1e-10;
/// Hermiticity tolerance accepted by the eigensolver.
pub const TOL_EIG_HERM: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from entries in row-major order.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("matrix dimensions must be positive");
        }
        if entries.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            ));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    /// Builds a matrix from real entries in row-major order.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| C0)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { C1 } else { C0 })
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(entries[i], 0.0)
            } else {
                C0
            }
        })
    }

    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Entry at `(row, col)`. Panics when out of range.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(
            row < self.rows() && col < self.cols(),
            "index ({row}, {col}) out of range for {}x{} matrix",
            self.rows(),
            self.cols()
        );
        self.inner[(row, col)]
    }

    /// Overwrites the entry at `(row, col)`. Panics when out of range.
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(
            row < self.rows() && col < self.cols(),
            "index ({row}, {col}) out of range for {}x{} matrix",
            self.rows(),
            self.cols()
        );
        self.inner[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<Complex64> {
        (0..self.rows())
            .flat_map(|i| (0..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    /// Number of qubits when the matrix is square with a power-of-two side.
    pub fn qubit_count(&self) -> Option<usize> {
        if self.is_square() && self.rows().is_power_of_two() {
            Some(self.rows().trailing_zeros() as usize)
        } else {
            None
        }
    }

    pub fn dagger(&self) -> Self {
        Self::from_inner(self.inner.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_inner(self.inner.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        self.inner.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_inner(&self.inner * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Matrix product, checking shapes.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            ));
        }
        Ok(Self::from_inner(&self.inner * &rhs.inner))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "shape mismatch"
        );
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `M - M†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.dagger())
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.try_mul(self)?.try_mul(&u.dagger())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()), "shape mismatch");
        ComplexMatrix::from_inner(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()), "shape mismatch");
        ComplexMatrix::from_inner(&self.inner - &rhs.inner)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("shape mismatch in matrix product")
    }
}

/// Matrix unit `|i⟩⟨j|` of size `dim`.
pub fn matrix_unit(i: usize, j: usize, dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 || i >= dim || j >= dim {
        return invalid(format!("matrix unit ({i}, {j}) out of range for dimension {dim}"));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |r, c| {
        if r == i && c == j {
            C1
        } else {
            C0
        }
    }))
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_inner(a.inner.kronecker(&b.inner))
}

/// Which qubit of a (CR, CV) pair survives a two-qubit partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep the first (chronology-respecting) qubit: `Tr_CV X`.
    Cr,
    /// Keep the second (chronology-violating) qubit: `Tr_CR X`.
    Cv,
}

/// Two-qubit partial trace written out coefficient by coefficient, with
/// `x(ij,kl) = ⟨ij|X|kl⟩`.
pub fn partial_trace(x: &ComplexMatrix, keep: Keep) -> Result<ComplexMatrix> {
    if x.rows() != 4 || x.cols() != 4 {
        return invalid(format!(
            "two-qubit partial trace needs a 4x4 matrix, got {}x{}",
            x.rows(),
            x.cols()
        ));
    }
    let e = |i: usize, j: usize, k: usize, l: usize| x.get(2 * i + j, 2 * k + l);
    let entries = match keep {
        // Tr_CR X
        Keep::Cv => [
            e(0, 0, 0, 0) + e(1, 0, 1, 0),
            e(0, 0, 0, 1) + e(1, 0, 1, 1),
            e(0, 1, 0, 0) + e(1, 1, 1, 0),
            e(0, 1, 0, 1) + e(1, 1, 1, 1),
        ],
        // Tr_CV X
        Keep::Cr => [
            e(0, 0, 0, 0) + e(0, 1, 0, 1),
            e(0, 0, 1, 0) + e(0, 1, 1, 1),
            e(1, 0, 0, 0) + e(1, 1, 0, 1),
            e(1, 0, 1, 0) + e(1, 1, 1, 1),
        ],
    };
    ComplexMatrix::new(2, 2, entries.to_vec())
}

/// Traces out the two leading qubits of a three-qubit (B, M, T) matrix,
/// leaving the 2x2 marginal of T.
pub fn partial_trace_3q_keep_last(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != 8 || x.cols() != 8 {
        return invalid(format!(
            "three-qubit partial trace needs an 8x8 matrix, got {}x{}",
            x.rows(),
            x.cols()
        ));
    }
    let mut out = ComplexMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let s = (0..4).map(|cr| x.get(2 * cr + a, 2 * cr + b)).sum();
            out.set(a, b, s);
        }
    }
    Ok(out)
}

fn check_qubit_split(x: &ComplexMatrix, traced: usize) -> Result<usize> {
    let n = x
        .qubit_count()
        .ok_or_else(|| Error::InvalidArgument("partial trace needs a square 2^n matrix".into()))?;
    if traced > n {
        return invalid(format!("cannot trace {traced} qubits out of {n}"));
    }
    Ok(n)
}

/// Traces out the `count` leading qubits, keeping the trailing ones.
pub fn trace_leading(x: &ComplexMatrix, count: usize) -> Result<ComplexMatrix> {
    let n = check_qubit_split(x, count)?;
    let kept = 1usize << (n - count);
    let traced = 1usize << count;
    Ok(ComplexMatrix::from_fn(kept, kept, |a, b| {
        (0..traced).map(|t| x.get(t * kept + a, t * kept + b)).sum()
    }))
}

/// Traces out the `count` trailing qubits, keeping the leading ones.
pub fn trace_trailing(x: &ComplexMatrix, count: usize) -> Result<ComplexMatrix> {
    let n = check_qubit_split(x, count)?;
    let kept = 1usize << (n - count);
    let traced = 1usize << count;
    Ok(ComplexMatrix::from_fn(kept, kept, |a, b| {
        (0..traced).map(|t| x.get(a * traced + t, b * traced + t)).sum()
    }))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let deviation = m.hermiticity_deviation();
    if deviation > TOL_EIG_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (&m.inner + m.inner.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues and eigenvectors (as columns) of a Hermitian matrix, ascending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let deviation = m.hermiticity_deviation();
    if deviation > TOL_EIG_HERM {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (&m.inner + m.inner.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// A validated density operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    nqubits: usize,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and numerical positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let nqubits = matrix.qubit_count().ok_or_else(|| {
            Error::InvalidState(format!(
                "expected a square 2^n matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            ))
        })?;
        let deviation = matrix.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C1).norm() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&matrix)?[0];
        if min < TOL_POS {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, nqubits })
    }

    /// Rescales a positive matrix to unit trace before validating it.
    pub fn normalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize trace {tr}")));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    /// `|k⟩⟨k|` in a `2^nqubits` space.
    pub fn basis(k: usize, nqubits: usize) -> Result<Self> {
        Self::new(matrix_unit(k, k, 1 << nqubits)?)
    }

    pub fn maximally_mixed(nqubits: usize) -> Self {
        let d = 1usize << nqubits;
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            nqubits,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density operator is Hermitian")
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: tensor(&self.matrix, &other.matrix),
            nqubits: self.nqubits + other.nqubits,
        }
    }
}

/// A normalized pure state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Accepts a unit vector of length `2^n` (norm checked to 1e-12).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return invalid(format!(
                "state vector length {} is not a power of two",
                amplitudes.len()
            ));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return invalid(format!("state vector has squared norm {norm_sqr}"));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return invalid("cannot normalize a zero vector");
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(k: usize, nqubits: usize) -> Result<Self> {
        let d = 1usize << nqubits;
        if k >= d {
            return invalid(format!("basis index {k} out of range for {nqubits} qubits"));
        }
        let mut v = vec![C0; d];
        v[k] = C1;
        Self::new(v)
    }

    pub fn zero() -> Self {
        Self::basis(0, 1).unwrap()
    }

    pub fn one() -> Self {
        Self::basis(1, 1).unwrap()
    }

    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![h, h]).unwrap()
    }

    pub fn minus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![h, -h]).unwrap()
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell_phi() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![h, C0, C0, h]).unwrap()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub fn nqubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    /// Column vector as a `2^n x 1` matrix.
    pub fn ket(&self) -> ComplexMatrix {
        ComplexMatrix::from_inner(DMatrix::from_column_slice(
            self.amplitudes.len(),
            1,
            self.amplitudes.as_slice(),
        ))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> ComplexMatrix {
        let k = self.ket();
        &k * &k.dagger()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
            nqubits: self.nqubits(),
        }
    }
}

/// Real Bloch-vector parameterization of a single-qubit state,
/// `ρ = (I + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub const ORIGIN: Self = Self([0.0; 3]);

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }
}

/// Pauli matrices `[σx, σy, σz]`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::new(2, 2, vec![C0, C1, C1, C0]).unwrap(),
        ComplexMatrix::new(2, 2, vec![C0, -i, i, C0]).unwrap(),
        ComplexMatrix::new(2, 2, vec![C1, C0, C0, -C1]).unwrap(),
    ]
}

/// `(I + r·σ)/2` for an arbitrary real triple, without the ball check.
pub(crate) fn bloch_matrix(r: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = r;
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    )
    .unwrap()
}

/// Bloch components `Tr(σ_k X)` of any 2x2 matrix (real parts).
pub(crate) fn bloch_components(x: &ComplexMatrix) -> [f64; 3] {
    let a01 = x.get(0, 1);
    let a10 = x.get(1, 0);
    [
        (a01 + a10).re,
        (Complex64::new(0.0, 1.0) * (a01 - a10)).re,
        (x.get(0, 0) - x.get(1, 1)).re,
    ]
}

pub fn bloch_from_state(rho: &DensityOperator) -> Result<BlochVector> {
    if rho.nqubits() != 1 {
        return invalid("Bloch vector needs a single-qubit state");
    }
    Ok(BlochVector(bloch_components(rho.matrix())))
}

pub fn state_from_bloch(r: BlochVector) -> Result<DensityOperator> {
    let n = r.norm();
    if !n.is_finite() || n > 1.0 + 1e-10 {
        return invalid(format!("Bloch vector length {n} exceeds 1"));
    }
    DensityOperator::new(bloch_matrix(r.0))
}

fn check_same_dim(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return invalid(format!("dimension mismatch: {} vs {}", a.dim(), b.dim()));
    }
    Ok(())
}

/// `Tr|ρ - ξ| / 2`.
pub fn trace_distance(rho: &DensityOperator, xi: &DensityOperator) -> Result<f64> {
    check_same_dim(rho, xi)?;
    let diff = rho.matrix() - xi.matrix();
    let eig = hermitian_eigenvalues(&diff)?;
    Ok((0.5 * eig.iter().map(|v| v.abs()).sum::<f64>()).min(1.0))
}

/// Entropy in bits; eigenvalues are floored at zero first.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .map(|l| l.max(0.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn matrix_units() {
        let p00 = matrix_unit(0, 0, 2).unwrap();
        assert_eq!(p00.entries(), vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
        let p01 = matrix_unit(0, 1, 2).unwrap();
        assert_eq!(p01.entries(), vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        let t = tensor(&p00, &matrix_unit(1, 1, 2).unwrap());
        assert_eq!(t, matrix_unit(1, 1, 4).unwrap());
        assert!(matrix_unit(2, 0, 2).is_err());
        assert!(matrix_unit(0, 0, 0).is_err());
    }

    #[test]
    fn tensor_of_identities() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_access_panics() {
        ComplexMatrix::identity(2).get(2, 0);
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let rho = state_from_bloch(BlochVector([0.3, -0.2, 0.5])).unwrap();
        let sigma = state_from_bloch(BlochVector([-0.1, 0.6, 0.2])).unwrap();
        let x = tensor(rho.matrix(), sigma.matrix());
        assert!(partial_trace(&x, Keep::Cr).unwrap().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(partial_trace(&x, Keep::Cv).unwrap().max_abs_diff(sigma.matrix()) < 1e-15);

        let bell = PureState::bell_phi().projector();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        for keep in [Keep::Cr, Keep::Cv] {
            assert!(partial_trace(&bell, keep).unwrap().max_abs_diff(&half) < 1e-15);
        }
        assert!(partial_trace(&ComplexMatrix::identity(2), Keep::Cr).is_err());
    }

    #[test]
    fn three_qubit_trace_keeps_last_factor() {
        let b = state_from_bloch(BlochVector([0.0, 0.0, 1.0])).unwrap();
        let m = state_from_bloch(BlochVector([0.5, 0.0, 0.0])).unwrap();
        let t = state_from_bloch(BlochVector([0.1, 0.2, -0.7])).unwrap();
        let x = tensor(&tensor(b.matrix(), m.matrix()), t.matrix());
        let out = partial_trace_3q_keep_last(&x).unwrap();
        assert!(out.max_abs_diff(t.matrix()) < 1e-15);
        assert!(partial_trace_3q_keep_last(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn generic_traces_agree_with_fixed_size_ones() {
        let bell = PureState::bell_phi().projector();
        let x = tensor(&bell, &matrix_unit(0, 1, 2).unwrap());
        let two = trace_leading(&x, 1).unwrap();
        assert!(trace_leading(&two, 1)
            .unwrap()
            .max_abs_diff(&partial_trace_3q_keep_last(&x).unwrap())
            < 1e-15);
        assert!(trace_trailing(&bell, 1)
            .unwrap()
            .max_abs_diff(&partial_trace(&bell, Keep::Cr).unwrap())
            < 1e-15);
        assert!(trace_leading(&bell, 3).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = PureState::zero().density();
        let one = PureState::one().density();
        let minus = PureState::minus().density();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        let d = trace_distance(&zero, &minus).unwrap();
        assert!((d - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        let two = DensityOperator::maximally_mixed(2);
        assert!(trace_distance(&zero, &two).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&PureState::plus().density()).abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(1);
        assert!((von_neumann_entropy(&mixed) - 1.0).abs() < 1e-15);
        // binary entropy h(1/4) = 2 - (3/4) log2 3
        let tau = DensityOperator::new(ComplexMatrix::diagonal(&[0.25, 0.75])).unwrap();
        let h = 2.0 - 0.75 * 3f64.log2();
        assert!((von_neumann_entropy(&tau) - h).abs() < 1e-14);
        assert!((h - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn eigenvalue_examples() {
        let d = ComplexMatrix::diagonal(&[2.0, -1.0]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![-1.0, 2.0]);
        let x = &paulis()[0];
        let eig = hermitian_eigenvalues(x).unwrap();
        assert!((eig[0] + 1.0).abs() < 1e-15 && (eig[1] - 1.0).abs() < 1e-15);
        let bad = matrix_unit(0, 1, 2).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&bad),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn bloch_examples() {
        let cases = [
            (PureState::zero().density(), [0.0, 0.0, 1.0]),
            (DensityOperator::maximally_mixed(1), [0.0, 0.0, 0.0]),
            (PureState::minus().density(), [-1.0, 0.0, 0.0]),
        ];
        for (rho, r) in cases {
            let b = bloch_from_state(&rho).unwrap();
            for (got, want) in b.0.iter().zip(r) {
                assert!((got - want).abs() < 1e-15);
            }
            let back = state_from_bloch(b).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        }
        assert!(state_from_bloch(BlochVector([0.0, 0.0, 1.0 + 1e-9])).is_err());
        assert!(state_from_bloch(BlochVector([0.0, 0.0, 1.0 + 1e-11])).is_ok());
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::new(ComplexMatrix::diagonal(&[0.5, 0.6])).is_err());
        assert!(DensityOperator::new(ComplexMatrix::diagonal(&[1.5, -0.5])).is_err());
        assert!(DensityOperator::new(matrix_unit(0, 1, 2).unwrap()).is_err());
        assert!(DensityOperator::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
        let n = DensityOperator::normalized(ComplexMatrix::diagonal(&[2.0, 2.0])).unwrap();
        assert_eq!(n, DensityOperator::maximally_mixed(1));
    }

    #[test]
    fn pure_state_checks() {
        assert!(PureState::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::new(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!((PureState::plus().inner(&PureState::minus())).norm() < 1e-15);
        assert!((PureState::minus().density().purity() - 1.0).abs() < 1e-15);
    }
}
