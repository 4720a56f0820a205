//! Dense complex matrices and state vectors.
//!
//! Storage is row-major and 0-indexed. For a composite space `A ⊗ B` the
//! flattened index of `(a, b)` is `a * dim_b + b`, so the first factor is the
//! slow index.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub type C64 = Complex64;

/// Default entrywise tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Operator {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for Operator {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let data = repr.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Operator::new(repr.rows, repr.cols, data)
    }
}

impl From<Operator> for MatrixRepr {
    fn from(op: Operator) -> Self {
        MatrixRepr {
            rows: op.rows,
            cols: op.cols,
            entries: op.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Operator {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} operator needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Operator { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Operator::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "operator dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Operator { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Operator::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Operator::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Operator::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Operator::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &StateVector, b: &StateVector) -> Self {
        Operator::from_fn(a.dim(), b.dim(), |i, j| a[i] * b[j].conj())
    }

    /// `|i⟩⟨j|` in dimension `dim`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Operator::zeros(dim, dim);
        m[(i, j)] = ONE;
        m
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Operator {
        Operator::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Operator {
        Operator::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Operator {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Operator {
        Operator { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Operator {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Entrywise comparison; dimension mismatch compares unequal.
    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `max |self - other|` over entries. Panics on mismatched dimensions.
    pub fn max_diff(&self, other: &Operator) -> f64 {
        self.assert_same_shape(other);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `(self + self†) / 2`
    pub fn hermitian_part(&self) -> Operator {
        let n = self.rows;
        Operator::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        tensor(self, other)
    }

    pub fn apply(&self, v: &StateVector) -> Vec<C64> {
        assert_eq!(self.cols, v.dim(), "operator/vector dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Matrix power for square operators, `n >= 1`.
    pub fn pow(&self, n: usize) -> Operator {
        assert!(n >= 1);
        let mut acc = self.clone();
        for _ in 1..n {
            acc = &acc * self;
        }
        acc
    }

    /// `A · B · A†`
    pub fn sandwich(&self, m: &Operator) -> Operator {
        &(self * m) * &self.dagger()
    }

    fn assert_same_shape(&self, other: &Operator) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_shape(rhs);
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_shape(rhs);
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.map(|z| -z)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Operator::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;

    fn mul(self, s: C64) -> Operator {
        self.scale(s)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, s: f64) -> Operator {
        self.map(|z| z * s)
    }
}

impl std::iter::Sum for Operator {
    /// Panics on an empty iterator, which has no dimension.
    fn sum<It: Iterator<Item = Operator>>(mut iter: It) -> Operator {
        let first = iter.next().expect("sum of an empty operator sequence");
        iter.fold(first, |acc, m| &acc + &m)
    }
}

/// Kronecker product: entry `((i1,i2),(j1,j2)) = a[i1,j1] * b[i2,j2]`.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    Operator::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// Which factor of a bipartite operator to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on `A ⊗ B`.
pub fn partial_trace(m: &Operator, dim_a: usize, dim_b: usize, keep: Keep) -> Result<Operator> {
    let n = m.ensure_square()?;
    if dim_a == 0 || dim_b == 0 || n != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {n}x{n} operator over {dim_a}x{dim_b}"
        )));
    }
    Ok(match keep {
        Keep::A => Operator::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Keep::B => Operator::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// `‖m†m − I‖_max`
pub fn unitarity_residual(m: &Operator) -> Result<f64> {
    let n = m.ensure_square()?;
    Ok((&m.dagger() * m).max_diff(&Operator::identity(n)))
}

pub fn is_unitary(m: &Operator, tol: f64) -> Result<bool> {
    Ok(unitarity_residual(m)? <= tol)
}

pub fn is_hermitian(m: &Operator, tol: f64) -> Result<bool> {
    m.ensure_square()?;
    Ok(m.max_diff(&m.dagger()) <= tol)
}

/// Hermitian, unit trace and eigenvalues no smaller than `-tol`.
pub fn is_density(m: &Operator, tol: f64) -> Result<bool> {
    Ok(check_density(m, tol).is_ok())
}

pub(crate) fn check_density(m: &Operator, tol: f64) -> Result<()> {
    m.ensure_square()?;
    if !is_hermitian(m, tol)? {
        return Err(Error::InvalidDensity("not Hermitian".into()));
    }
    let tr = m.trace();
    if (tr - ONE).norm() > tol {
        return Err(Error::InvalidDensity(format!("trace {} != 1", tr.re)));
    }
    let min = linalg::eigvalsh(&m.hermitian_part()).into_iter().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `½‖a − b‖₁`, via the eigenvalues of the Hermitian part of `a − b`.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    a.ensure_square()?;
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let diff = (a - b).hermitian_part();
    Ok(0.5 * linalg::eigvalsh(&diff).iter().map(|x| x.abs()).sum::<f64>())
}

/// A unit vector.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct StateVector {
    amps: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<VectorRepr> for StateVector {
    type Error = Error;

    fn try_from(repr: VectorRepr) -> Result<Self> {
        if repr.amplitudes.len() != repr.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of dim {} has {} amplitudes",
                repr.dim,
                repr.amplitudes.len()
            )));
        }
        StateVector::new(repr.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

impl From<StateVector> for VectorRepr {
    fn from(v: StateVector) -> Self {
        VectorRepr { dim: v.dim(), amplitudes: v.amps.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl StateVector {
    /// Accepts only vectors whose norm is 1 within [`DEFAULT_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        StateVector::with_tol(amps, DEFAULT_TOL)
    }

    pub fn with_tol(amps: Vec<C64>, tol: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch("empty state vector".into()));
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { amps })
    }

    /// Explicit normalization. The zero vector is rejected.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if amps.is_empty() || n < 1e-300 {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(StateVector { amps: amps.into_iter().map(|z| z / n).collect() })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        StateVector::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut amps = vec![ZERO; dim];
        amps[k] = ONE;
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|self⟩⟨self|`
    pub fn projector(&self) -> Operator {
        Operator::outer(self, self)
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        StateVector { amps }
    }

    pub(crate) fn from_raw_unchecked(amps: Vec<C64>) -> Self {
        StateVector { amps }
    }
}

impl Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter().map(|z| (z.re, z.im))).finish()
    }
}

fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Checks that `vectors` are pairwise orthonormal, returning the max residual
/// of the Gram matrix against the identity.
pub fn orthonormality_residual(vectors: &[StateVector]) -> Result<f64> {
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidArgument("empty vector family".into()));
    };
    if vectors.iter().any(|v| v.dim() != first.dim()) {
        return Err(Error::DimensionMismatch("vectors of unequal dimension".into()));
    }
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((a.inner(b) - target).norm());
        }
    }
    Ok(worst)
}

/// Unitary whose columns are the given orthonormal vectors.
pub fn unitary_from_columns(vectors: &[StateVector], tol: f64) -> Result<Operator> {
    let residual = orthonormality_residual(vectors)?;
    if residual > tol || vectors.len() != vectors[0].dim() {
        return Err(Error::NotOrthonormal { residual });
    }
    let n = vectors.len();
    Ok(Operator::from_fn(n, n, |i, j| vectors[j][i]))
}

/// Common fixed gates.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> Operator {
        Operator::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Operator {
        Operator::new(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Operator {
        Operator::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn hadamard() -> Operator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Operator::from_real(2, 2, &[h, h, h, -h]).unwrap()
    }

    /// Swap `S|a⟩|b⟩ = |b⟩|a⟩` on `d ⊗ d`.
    pub fn swap(d: usize) -> Operator {
        Operator::from_fn(d * d, d * d, |r, c| {
            let (a, b) = (c / d, c % d);
            if r == b * d + a {
                ONE
            } else {
                ZERO
            }
        })
    }

    /// `|±x⟩ = (|0⟩ ± |1⟩)/√2`
    pub fn plus_x() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, h]).unwrap()
    }

    pub fn minus_x() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, -h]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    fn ket0() -> Operator {
        Operator::unit(2, 0, 0)
    }

    #[test]
    fn identity_tensor_identity() {
        assert!(tensor(&Operator::identity(2), &Operator::identity(2)).approx_eq(&Operator::identity(4), 0.0));
    }

    #[test]
    fn z_tensor_z_is_diagonal() {
        let zz = tensor(&pauli_z(), &pauli_z());
        assert!(zz.approx_eq(&Operator::diag_real(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn x_tensor_projector_index_layout() {
        let m = tensor(&pauli_x(), &ket0());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (2, 0) || (i, j) == (0, 2) { ONE } else { ZERO };
                assert_eq!(m[(i, j)], expected, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn partial_trace_of_identity() {
        let r = partial_trace(&Operator::identity(4), 2, 2, Keep::A).unwrap();
        assert!(r.approx_eq(&(&Operator::identity(2) * 2.0), 1e-15));
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        let r = partial_trace(&bell.projector(), 2, 2, Keep::A).unwrap();
        assert!(r.approx_eq(&Operator::diag_real(&[0.5, 0.5]), 1e-15));
    }

    #[test]
    fn partial_trace_keep_b_matches_index_sum() {
        let rho = Operator::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let xi = Operator::new(2, 2, vec![C64::new(0.4, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.6, 0.0)]).unwrap();
        let joint = tensor(&rho, &xi);
        let got = partial_trace(&joint, 2, 2, Keep::B).unwrap();
        // brute force: sum_k joint[(k,i),(k,j)]
        let mut want = Operator::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    want[(i, j)] += joint[(k * 2 + i, k * 2 + j)];
                }
            }
        }
        assert!(got.approx_eq(&want, 1e-15));
        assert!(got.approx_eq(&xi.scale(rho.trace()), 1e-15));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(matches!(
            partial_trace(&Operator::identity(4), 3, 2, Keep::A),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&Operator::zeros(2, 4), 2, 2, Keep::A),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn predicates() {
        assert!(is_unitary(&pauli_x(), DEFAULT_TOL).unwrap());
        assert!(!is_unitary(&(&pauli_x() * 1.01), DEFAULT_TOL).unwrap());
        assert!(!is_density(&Operator::diag_real(&[0.5, 0.6]), DEFAULT_TOL).unwrap());
        assert!(is_density(&Operator::diag_real(&[0.4, 0.6]), DEFAULT_TOL).unwrap());
        assert!(!is_density(&Operator::diag_real(&[1.2, -0.2]), DEFAULT_TOL).unwrap());
        assert!(is_unitary(&Operator::zeros(2, 3), DEFAULT_TOL).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let d = trace_distance(&Operator::unit(2, 0, 0), &Operator::unit(2, 1, 1)).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dagger_is_an_involution() {
        let m = Operator::new(2, 3, (0..6).map(|k| C64::new(k as f64, -(k as f64) * 0.5)).collect()).unwrap();
        assert_eq!(m.dagger().dagger(), m);
    }

    #[test]
    fn swap_exchanges_factors() {
        let s = swap(3);
        let a = StateVector::basis(3, 1);
        let b = StateVector::basis(3, 2);
        let out = s.apply(&a.kron(&b));
        assert_eq!(out, b.kron(&a).amplitudes());
    }

    #[test]
    fn state_vector_rejects_unnormalized() {
        assert!(matches!(StateVector::from_real(&[1.0, 1.0]), Err(Error::NotNormalized { .. })));
        assert!(StateVector::normalized(vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = Operator::new(1, 2, vec![C64::new(0.1, -0.3), C64::new(1.0 / 3.0, 2.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"rows\":1"));
        let back: Operator = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&m, 1e-15));
        let bad = r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#;
        assert!(serde_json::from_str::<Operator>(bad).is_err());
    }
}
