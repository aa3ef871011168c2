//! Mutations of exceptional sequences and two-block semi-orthogonal
//! decompositions, at the level of the Euler lattice.
//!
//! `χ(x, y) = xᵀ·G·y` in the reference basis. Left mutation sends
//! `(x, y)` to `(y − χ(x, y)·x, x)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{ExactMatrix, Subspace};
use crate::scalar::Scalar;

pub type LatticeVector = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("position {position} out of range for a sequence of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("not an exceptional sequence: {0}")]
    NotExceptional(String),
    #[error("blocks do not form a basis of the lattice")]
    NotSpanning,
    #[error("Euler form restricted to the first block is singular")]
    SingularBlockGram,
    #[error("Euler form on the first block is not unimodular; the mutation leaves the lattice")]
    NonIntegralMutation,
    #[error("bad braid word: {0}")]
    BadWord(String),
}

/// Integral lattice with its Euler form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerLattice {
    gram: Vec<Vec<BigInt>>,
}

impl EulerLattice {
    pub fn new(gram: Vec<Vec<BigInt>>) -> Result<Self, MutationError> {
        let n = gram.len();
        if let Some(i) = gram.iter().position(|r| r.len() != n) {
            return Err(MutationError::InvalidLattice(format!("gram row {i} has the wrong length")));
        }
        Ok(EulerLattice { gram })
    }

    pub fn from_ints(gram: &[&[i64]]) -> Result<Self, MutationError> {
        EulerLattice::new(gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn chi(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                acc += xi * &self.gram[i][j] * yj;
            }
        }
        acc
    }

    fn check_vector(&self, v: &[BigInt]) -> Result<(), MutationError> {
        if v.len() != self.rank() {
            return Err(MutationError::InvalidLattice(format!(
                "vector of length {} in a rank-{} lattice",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// Reference basis vector `e_i` (0-based).
    pub fn basis_vector(&self, i: usize) -> LatticeVector {
        (0..self.rank()).map(|j| BigInt::from((i == j) as i64)).collect()
    }
}

fn axpy(y: &[BigInt], a: &BigInt, x: &[BigInt]) -> LatticeVector {
    y.iter().zip(x).map(|(yi, xi)| yi - a * xi).collect()
}

/// Ordered vectors with unipotent upper-triangular Euler Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalSequence {
    lattice: EulerLattice,
    vectors: Vec<LatticeVector>,
}

impl ExceptionalSequence {
    pub fn new(lattice: EulerLattice, vectors: Vec<LatticeVector>) -> Result<Self, MutationError> {
        for v in &vectors {
            lattice.check_vector(v)?;
        }
        let seq = ExceptionalSequence { lattice, vectors };
        seq.check()?;
        Ok(seq)
    }

    /// The reference basis, exceptional when the Gram matrix is unipotent upper triangular.
    pub fn standard(lattice: EulerLattice) -> Result<Self, MutationError> {
        let vectors = (0..lattice.rank()).map(|i| lattice.basis_vector(i)).collect();
        ExceptionalSequence::new(lattice, vectors)
    }

    fn check(&self) -> Result<(), MutationError> {
        let chi = |i: usize, j: usize| self.lattice.chi(&self.vectors[i], &self.vectors[j]);
        for i in 0..self.vectors.len() {
            if !chi(i, i).is_one() {
                return Err(MutationError::NotExceptional(format!("χ(e{0}, e{0}) = {1}", i + 1, chi(i, i))));
            }
            for j in i + 1..self.vectors.len() {
                if !chi(j, i).is_zero() {
                    return Err(MutationError::NotExceptional(format!("χ(e{}, e{}) ≠ 0", j + 1, i + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &EulerLattice {
        &self.lattice
    }

    pub fn vectors(&self) -> &[LatticeVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Gram matrix of the sequence itself, `χ(e_i, e_j)`.
    pub fn sequence_gram(&self) -> Vec<Vec<BigInt>> {
        self.vectors
            .iter()
            .map(|a| self.vectors.iter().map(|b| self.lattice.chi(a, b)).collect())
            .collect()
    }

    /// `Q`-span of the vectors.
    pub fn span(&self) -> Subspace {
        Subspace::span(self.lattice.rank(), &self.vectors.iter().map(|v| to_scalars(v)).collect::<Vec<_>>())
    }

    fn position(&self, i: usize) -> Result<usize, MutationError> {
        if i == 0 || i >= self.vectors.len() {
            return Err(MutationError::PositionOutOfRange {
                position: i,
                len: self.vectors.len(),
            });
        }
        Ok(i - 1)
    }
}

fn to_scalars(v: &[BigInt]) -> Vec<Scalar> {
    v.iter().cloned().map(Scalar::from).collect()
}

/// `σ_i` for `1 ≤ i < n`: `(e_i, e_{i+1}) ↦ (e_{i+1} − χ(e_i, e_{i+1})·e_i, e_i)`.
pub fn pair_left_mutation(seq: &ExceptionalSequence, i: usize) -> Result<ExceptionalSequence, MutationError> {
    let k = seq.position(i)?;
    let (x, y) = (&seq.vectors[k], &seq.vectors[k + 1]);
    let c = seq.lattice.chi(x, y);
    let mut vectors = seq.vectors.clone();
    vectors[k] = axpy(y, &c, x);
    vectors[k + 1] = x.clone();
    ExceptionalSequence::new(seq.lattice.clone(), vectors)
}

/// `σ_i^{-1}`: `(a, b) ↦ (b, a − χ(a, b)·b)`.
pub fn pair_right_mutation(seq: &ExceptionalSequence, i: usize) -> Result<ExceptionalSequence, MutationError> {
    let k = seq.position(i)?;
    let (a, b) = (&seq.vectors[k], &seq.vectors[k + 1]);
    let c = seq.lattice.chi(a, b);
    let mut vectors = seq.vectors.clone();
    vectors[k] = b.clone();
    vectors[k + 1] = axpy(a, &c, b);
    ExceptionalSequence::new(seq.lattice.clone(), vectors)
}

/// A braid generator: `σ_i` (left) or `σ_i^{-1}` (right), 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BraidLetter {
    pub index: usize,
    pub inverse: bool,
}

/// Parse `"s1 s2 S1"`; a capital letter is the inverse generator.
pub fn parse_braid_word(text: &str) -> Result<Vec<BraidLetter>, MutationError> {
    text.split_whitespace()
        .map(|tok| {
            let (inverse, digits) = match tok.split_at(1) {
                ("s", d) => (false, d),
                ("S", d) => (true, d),
                _ => return Err(MutationError::BadWord(format!("token {tok:?} must be s<k> or S<k>"))),
            };
            let index: usize = digits
                .parse()
                .map_err(|_| MutationError::BadWord(format!("token {tok:?} has no index")))?;
            if index == 0 {
                return Err(MutationError::BadWord("generators are numbered from 1".into()));
            }
            Ok(BraidLetter { index, inverse })
        })
        .collect()
}

/// Apply a braid word left to right.
pub fn apply_braid_word(seq: &ExceptionalSequence, word: &[BraidLetter]) -> Result<ExceptionalSequence, MutationError> {
    word.iter().try_fold(seq.clone(), |s, l| {
        if l.inverse {
            pair_right_mutation(&s, l.index)
        } else {
            pair_left_mutation(&s, l.index)
        }
    })
}

/// `⟨A, B⟩` given by bases of the two blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SODPair {
    lattice: EulerLattice,
    block_a: Vec<LatticeVector>,
    block_b: Vec<LatticeVector>,
}

impl SODPair {
    pub fn new(lattice: EulerLattice, block_a: Vec<LatticeVector>, block_b: Vec<LatticeVector>) -> Result<Self, MutationError> {
        for v in block_a.iter().chain(&block_b) {
            lattice.check_vector(v)?;
        }
        let all: Vec<Vec<Scalar>> = block_a.iter().chain(&block_b).map(|v| to_scalars(v)).collect();
        if all.len() != lattice.rank() || Subspace::span(lattice.rank(), &all).dim() != lattice.rank() {
            return Err(MutationError::NotSpanning);
        }
        Ok(SODPair { lattice, block_a, block_b })
    }

    /// Skip the spanning check; block mutation does not need it.
    pub(crate) fn new_unchecked(lattice: EulerLattice, block_a: Vec<LatticeVector>, block_b: Vec<LatticeVector>) -> Self {
        SODPair { lattice, block_a, block_b }
    }

    pub fn lattice(&self) -> &EulerLattice {
        &self.lattice
    }

    pub fn block_a(&self) -> &[LatticeVector] {
        &self.block_a
    }

    pub fn block_b(&self) -> &[LatticeVector] {
        &self.block_b
    }

    /// Echelon spans `(span A, span B)`; equal up to sign and basis change.
    pub fn spans(&self) -> (Subspace, Subspace) {
        let n = self.lattice.rank();
        let s = |b: &[LatticeVector]| Subspace::span(n, &b.iter().map(|v| to_scalars(v)).collect::<Vec<_>>());
        (s(&self.block_a), s(&self.block_b))
    }
}

/// `L_A(x) = x − p_A(x)` where `χ(a, L_A x) = 0` for every `a ∈ A`.
pub fn left_projection_complement(
    lattice: &EulerLattice,
    block: &[LatticeVector],
    x: &[BigInt],
) -> Result<LatticeVector, MutationError> {
    let k = block.len();
    if k == 0 {
        return Ok(x.to_vec());
    }
    let g = ExactMatrix::from_nested(
        block
            .iter()
            .map(|aj| block.iter().map(|ai| Scalar::from(lattice.chi(aj, ai))).collect())
            .collect(),
        k,
    )
    .expect("square gram");
    let det = g.determinant().expect("square");
    if det.is_zero() {
        return Err(MutationError::SingularBlockGram);
    }
    let inv = g.inverse().map_err(|_| MutationError::SingularBlockGram)?;
    let b: Vec<Scalar> = block.iter().map(|aj| Scalar::from(lattice.chi(aj, x))).collect();
    let c = inv.apply(&b);
    let mut out: Vec<Scalar> = to_scalars(x);
    for (ci, ai) in c.iter().zip(block) {
        for (o, a) in out.iter_mut().zip(ai) {
            *o -= &(ci * &Scalar::from(a.clone()));
        }
    }
    out.into_iter()
        .map(|s| s.to_integer().ok_or(MutationError::NonIntegralMutation))
        .collect()
}

/// `⟨A, B⟩ ↦ ⟨L_A B, A⟩`.
pub fn block_left_mutation(p: &SODPair) -> Result<SODPair, MutationError> {
    let new_a = p
        .block_b
        .iter()
        .map(|x| left_projection_complement(&p.lattice, &p.block_a, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SODPair {
        lattice: p.lattice.clone(),
        block_a: new_a,
        block_b: p.block_a.clone(),
    })
}

/// Least `k ≤ max_iter` with `L^k ⟨A, B⟩` spanning the same ordered pair of sublattices.
pub fn mutation_period(p: &SODPair, max_iter: usize) -> Result<Option<usize>, MutationError> {
    let start = p.spans();
    let mut cur = p.clone();
    for k in 1..=max_iter {
        cur = block_left_mutation(&cur)?;
        if cur.spans() == start {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// JSON

fn int_value(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

fn int_from(s: &Scalar) -> Result<BigInt, String> {
    s.to_integer().ok_or_else(|| format!("{s} is not an integer"))
}

fn ints_rows<E: serde::de::Error>(rows: Vec<Vec<Scalar>>) -> Result<Vec<Vec<BigInt>>, E> {
    rows.into_iter()
        .map(|r| r.iter().map(int_from).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(E::custom)
}

fn rows_value(rows: &[Vec<BigInt>]) -> serde_json::Value {
    serde_json::Value::Array(rows.iter().map(|r| serde_json::Value::Array(r.iter().map(int_value).collect())).collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceJson {
    gram: Vec<Vec<Scalar>>,
    vectors: Vec<Vec<Scalar>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    gram: Vec<Vec<Scalar>>,
    block_a: Vec<Vec<Scalar>>,
    block_b: Vec<Vec<Scalar>>,
}

impl Serialize for ExceptionalSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_json::json!({
            "gram": rows_value(&self.lattice.gram),
            "vectors": rows_value(&self.vectors),
        })
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExceptionalSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = SequenceJson::deserialize(d)?;
        let lattice = EulerLattice::new(ints_rows::<D::Error>(raw.gram)?).map_err(D::Error::custom)?;
        ExceptionalSequence::new(lattice, ints_rows::<D::Error>(raw.vectors)?).map_err(D::Error::custom)
    }
}

impl Serialize for SODPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_json::json!({
            "gram": rows_value(&self.lattice.gram),
            "block_a": rows_value(&self.block_a),
            "block_b": rows_value(&self.block_b),
        })
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SODPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PairJson::deserialize(d)?;
        let lattice = EulerLattice::new(ints_rows::<D::Error>(raw.gram)?).map_err(D::Error::custom)?;
        SODPair::new(lattice, ints_rows::<D::Error>(raw.block_a)?, ints_rows::<D::Error>(raw.block_b)?)
            .map_err(D::Error::custom)
    }
}

/// Largest absolute coordinate, for growth diagnostics.
pub fn max_abs_entry(p: &SODPair) -> BigInt {
    p.block_a
        .iter()
        .chain(&p.block_b)
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_default()
}
