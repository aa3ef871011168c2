//! Exact linear algebra over `Q(i)`: ranks, kernels, cokernels and the maps
//! they induce.
//!
//! Elimination always takes the first nonzero entry as pivot and never
//! rescales for size; results are therefore deterministic. Subspaces are kept
//! as reduced row-echelon bases so that equal subspaces have equal
//! representations.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map does not carry the source subspace into the target subspace")]
    SubspaceNotPreserved,
    #[error("matrix is not invertible")]
    Singular,
    #[error("malformed matrix: {0}")]
    Malformed(String),
}

/// Dense `rows × cols` matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::Malformed(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    /// Build from nested rows; all rows must share a length. An empty outer
    /// list gives a `0 × cols` matrix, so pass `cols` explicitly.
    pub fn from_nested(rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinAlgError::Malformed(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(ExactMatrix {
            rows: r,
            cols,
            data,
        })
    }

    /// Convenience for tests and demos: integer entries.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let nested = rows
            .iter()
            .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
            .collect();
        ExactMatrix::from_nested(nested, cols).expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors (each of length `dim`).
    pub fn from_columns(dim: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = ExactMatrix::zeros(dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
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

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn to_nested(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = ExactMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn checked_mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, LinAlgError> {
        if self.cols != rhs.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(i, j)] += &p;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, LinAlgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinAlgError::DimensionMismatch(format!(
                "{}x{} minus {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, LinAlgError> {
        if self.rows != rhs.rows {
            return Err(LinAlgError::DimensionMismatch("hstack row counts differ".into()));
        }
        let mut out = ExactMatrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        Ok(out)
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let d = &factor * &m[(r, j)];
                    m[(i, j)] -= &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn determinant(&self) -> Result<Scalar, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] * &inv;
                for j in c..n {
                    let d = &factor * &m[(c, j)];
                    m[(i, j)] -= &d;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<ExactMatrix, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::Singular);
        }
        let n = self.rows;
        let aug = self.hstack(&ExactMatrix::identity(n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return Err(LinAlgError::Singular);
        }
        let mut inv = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Coefficients `[c_0, c_1, …, c_n = 1]` of `det(x·I − self)`, via
    /// Faddeev–LeVerrier (valid in characteristic zero).
    pub fn charpoly(&self) -> Result<Vec<Scalar>, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::DimensionMismatch("charpoly of non-square matrix".into()));
        }
        let n = self.rows;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut m_k = ExactMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1}·I ; c_{n-k} = -tr(A·M_k)/k
            let mut next = self.checked_mul(&m_k)?;
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m_k = next;
            let am = self.checked_mul(&m_k)?;
            let mut tr = Scalar::zero();
            for i in 0..n {
                tr += &am[(i, i)];
            }
            coeffs[n - k] = -(&tr / &Scalar::from_int(k as i64));
        }
        Ok(coeffs)
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_nested()).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Scalar>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_nested(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.entries.len() != raw.rows {
            return Err(serde::de::Error::custom(format!(
                "matrix declares {} rows but has {}",
                raw.rows,
                raw.entries.len()
            )));
        }
        ExactMatrix::from_nested(raw.entries, raw.cols).map_err(serde::de::Error::custom)
    }
}

/// A subspace of `Q(i)^ambient`, stored by its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: ExactMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: ExactMatrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: ExactMatrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors (dependent or repeated vectors allowed).
    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        let rows: Vec<Vec<Scalar>> = vectors.to_vec();
        let m = ExactMatrix::from_nested(rows, ambient).expect("vector length mismatch");
        Subspace::row_space(&m)
    }

    pub fn row_space(m: &ExactMatrix) -> Self {
        let (r, pivots) = m.rref();
        let k = pivots.len();
        let mut basis = ExactMatrix::zeros(k, m.cols());
        for i in 0..k {
            for j in 0..m.cols() {
                basis[(i, j)] = r[(i, j)].clone();
            }
        }
        Subspace {
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn column_space(m: &ExactMatrix) -> Self {
        Subspace::row_space(&m.transpose())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// RREF basis vectors as rows.
    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.to_nested()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient == self.ambient && other.basis_vectors().iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        // RREF rows carry the identity at their pivots, so the candidate
        // coordinates are just the pivot entries of v.
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    residual[j] -= &(c * b);
                }
            }
        }
        residual.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis_vectors();
        vs.extend(other.basis_vectors());
        Subspace::span(self.ambient, &vs)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // Kernel of [A^T | -B^T] gives pairs (x, y) with A^T x = B^T y.
        let a = self.basis.transpose();
        let b = other.basis.transpose();
        let mut neg_b = b.clone();
        for i in 0..neg_b.rows() {
            for j in 0..neg_b.cols() {
                neg_b[(i, j)] = -&b[(i, j)];
            }
        }
        let stacked = a.hstack(&neg_b).expect("same ambient");
        let vectors: Vec<Vec<Scalar>> = kernel_basis(&stacked)
            .into_iter()
            .map(|k| a.apply(&k[..self.dim()]))
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    /// Matrix of the inclusion `self ⊆ other` in the two RREF bases,
    /// shape `other.dim() × self.dim()`.
    pub fn inclusion_into(&self, other: &Subspace) -> Option<ExactMatrix> {
        let mut m = ExactMatrix::zeros(other.dim(), self.dim());
        for (j, v) in self.basis_vectors().iter().enumerate() {
            let coords = other.coordinates(v)?;
            for (i, c) in coords.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        Some(m)
    }
}

/// `ambient / subspace`, with a projection onto quotient coordinates and a
/// section choosing coset representatives.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuotientSpace {
    subspace: Subspace,
    projection: ExactMatrix,
    section: ExactMatrix,
}

impl QuotientSpace {
    pub fn new(subspace: Subspace) -> Self {
        let n = subspace.ambient();
        let free: Vec<usize> = (0..n).filter(|c| !subspace.pivots().contains(c)).collect();
        let q = free.len();
        let mut projection = ExactMatrix::zeros(q, n);
        let mut section = ExactMatrix::zeros(n, q);
        for (j, &col) in free.iter().enumerate() {
            projection[(j, col)] = Scalar::one();
            section[(col, j)] = Scalar::one();
            for (r, &p) in subspace.pivots().iter().enumerate() {
                let b = &subspace.basis()[(r, col)];
                if !b.is_zero() {
                    projection[(j, p)] = -b;
                }
            }
        }
        QuotientSpace {
            subspace,
            projection,
            section,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspace.ambient()
    }

    pub fn quotient_dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn subspace_basis(&self) -> Vec<Vec<Scalar>> {
        self.subspace.basis_vectors()
    }

    /// `quotient_dim × ambient_dim`.
    pub fn projection(&self) -> &ExactMatrix {
        &self.projection
    }

    /// `ambient_dim × quotient_dim`, a right inverse of the projection.
    pub fn section(&self) -> &ExactMatrix {
        &self.section
    }
}

pub fn rank(m: &ExactMatrix) -> usize {
    m.rref().1.len()
}

/// Basis of the null space; empty iff `m` is injective.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); m.cols()];
            v[f] = Scalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(row, f)];
            }
            v
        })
        .collect()
}

pub fn is_injective(m: &ExactMatrix) -> bool {
    rank(m) == m.cols()
}

pub fn is_surjective(m: &ExactMatrix) -> bool {
    rank(m) == m.rows()
}

/// Quotient of the codomain by the column span. Injectivity is not required.
pub fn cokernel(m: &ExactMatrix) -> QuotientSpace {
    QuotientSpace::new(Subspace::column_space(m))
}

/// The map on quotients induced by `f`, i.e. the unique `g` with
/// `dst.projection · f = g · src.projection`.
pub fn induced_quotient_map(
    f: &ExactMatrix,
    src: &QuotientSpace,
    dst: &QuotientSpace,
) -> Result<ExactMatrix, LinAlgError> {
    if f.cols() != src.ambient_dim() || f.rows() != dst.ambient_dim() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "map is {}x{}, quotients live in dims {} -> {}",
            f.rows(),
            f.cols(),
            src.ambient_dim(),
            dst.ambient_dim()
        )));
    }
    for v in src.subspace_basis() {
        if !dst.subspace().contains(&f.apply(&v)) {
            return Err(LinAlgError::SubspaceNotPreserved);
        }
    }
    Ok(&(dst.projection() * f) * src.section())
}

pub fn is_invertible(m: &ExactMatrix) -> bool {
    m.is_square() && rank(m) == m.rows()
}
