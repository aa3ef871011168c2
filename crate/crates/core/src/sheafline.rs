//! Pure sheaves on the line with co-oriented points, and the disk model
//! `(V, W, f, g)`.
//!
//! Points `x_{i+1/2}` sit between the intervals carrying `V_i` and `V_{i+1}`.
//! A negatively co-oriented point carries `f: V_i → V_{i+1}`, a positive one
//! `f: V_{i+1} → V_i`. Matrices act on column vectors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{cokernel, is_injective, ExactMatrix, LinAlgError, QuotientSpace, Subspace};
use crate::report::ValidationReport;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("not a flag: containment fails at point {0}+1/2")]
    NotAFlag(usize),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coorientation {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "+")]
    Positive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinePoints {
    pub coorientations: Vec<Coorientation>,
}

impl LinePoints {
    pub fn new(coorientations: Vec<Coorientation>) -> Self {
        LinePoints { coorientations }
    }

    pub fn all_negative(n: usize) -> Self {
        LinePoints::new(vec![Coorientation::Negative; n])
    }

    pub fn len(&self) -> usize {
        self.coorientations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coorientations.is_empty()
    }
}

/// `V_0, …, V_n` by dimension, and one map per point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSheaf {
    pub coorientations: Vec<Coorientation>,
    pub dims: Vec<usize>,
    pub maps: Vec<ExactMatrix>,
}

fn point_name(i: usize) -> String {
    format!("{}+1/2", i)
}

/// `(rows, cols)` a map at point `i` must have.
fn expected_shape(c: Coorientation, lower: usize, upper: usize) -> (usize, usize) {
    match c {
        Coorientation::Negative => (upper, lower),
        Coorientation::Positive => (lower, upper),
    }
}

impl LineSheaf {
    pub fn points(&self) -> LinePoints {
        LinePoints::new(self.coorientations.clone())
    }

    fn check_counts(&self, points: &LinePoints) -> Result<(), LineError> {
        let n = points.len();
        if self.coorientations != points.coorientations {
            return Err(LineError::ShapeMismatch("co-orientations differ from the points".into()));
        }
        if self.dims.len() != n + 1 || self.maps.len() != n {
            return Err(LineError::ShapeMismatch(format!(
                "{n} points need {} spaces and {n} maps, found {} and {}",
                n + 1,
                self.dims.len(),
                self.maps.len()
            )));
        }
        Ok(())
    }
}

/// Purity check: every map injective and pointing the way its co-orientation says.
pub fn validate_line(points: &LinePoints, s: &LineSheaf) -> Result<ValidationReport, LineError> {
    s.check_counts(points)?;
    let mut report = ValidationReport::new();
    for (i, (m, &c)) in s.maps.iter().zip(&points.coorientations).enumerate() {
        let want = expected_shape(c, s.dims[i], s.dims[i + 1]);
        let got = (m.rows(), m.cols());
        if got != want {
            if (got.1, got.0) == want {
                report.fail(point_name(i), "map points against its co-orientation");
                continue;
            }
            return Err(LineError::ShapeMismatch(format!(
                "map at {} is {}x{}, expected {}x{}",
                point_name(i),
                got.0,
                got.1,
                want.0,
                want.1
            )));
        }
        if !is_injective(m) {
            report.fail(point_name(i), "map is not injective");
        }
    }
    Ok(report)
}

/// Cokernel of the map at `x_{i+1/2}`.
pub fn microstalk_line(s: &LineSheaf, i: usize) -> Result<QuotientSpace, LineError> {
    s.maps.get(i).map(cokernel).ok_or(LineError::IndexOutOfRange(i))
}

/// Build a line sheaf from explicit subspaces `V_0, …, V_n` of one ambient
/// space; maps are inclusions in the echelon bases.
pub fn decategorify_line(filtration: &[Subspace], coorientations: &[Coorientation]) -> Result<LineSheaf, LineError> {
    if filtration.len() != coorientations.len() + 1 {
        return Err(LineError::ShapeMismatch(format!(
            "{} subspaces for {} points",
            filtration.len(),
            coorientations.len()
        )));
    }
    if let Some(w) = filtration.windows(2).find(|w| w[0].ambient() != w[1].ambient()) {
        return Err(LineError::ShapeMismatch(format!(
            "ambient dimensions {} and {} differ",
            w[0].ambient(),
            w[1].ambient()
        )));
    }
    let mut maps = Vec::with_capacity(coorientations.len());
    for (i, &c) in coorientations.iter().enumerate() {
        let (from, to) = match c {
            Coorientation::Negative => (&filtration[i], &filtration[i + 1]),
            Coorientation::Positive => (&filtration[i + 1], &filtration[i]),
        };
        maps.push(from.inclusion_into(to).ok_or(LineError::NotAFlag(i))?);
    }
    Ok(LineSheaf {
        coorientations: coorientations.to_vec(),
        dims: filtration.iter().map(Subspace::dim).collect(),
        maps,
    })
}

/// `V_i` = span of the first `i + 1` blocks, all points negative.
pub fn decategorify_blocks(ambient: usize, blocks: &[Vec<Vec<Scalar>>]) -> Result<LineSheaf, LineError> {
    let mut acc: Vec<Vec<Scalar>> = Vec::new();
    let mut filtration = Vec::with_capacity(blocks.len());
    for block in blocks {
        if let Some(v) = block.iter().find(|v| v.len() != ambient) {
            return Err(LineError::ShapeMismatch(format!(
                "block vector of length {} in ambient {ambient}",
                v.len()
            )));
        }
        acc.extend(block.iter().cloned());
        filtration.push(Subspace::span(ambient, &acc));
    }
    if filtration.is_empty() {
        return Err(LineError::ShapeMismatch("no blocks".into()));
    }
    decategorify_line(&filtration, &vec![Coorientation::Negative; blocks.len() - 1])
}

/// The disk model: `f: V → W` stored as a `W × V` matrix, `g: W → V` as `V × W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskBeilinson {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "W")]
    pub w: usize,
    pub f: ExactMatrix,
    pub g: ExactMatrix,
}

impl DiskBeilinson {
    fn check_shapes(&self) -> Result<(), LineError> {
        if (self.f.rows(), self.f.cols()) != (self.w, self.v) || (self.g.rows(), self.g.cols()) != (self.v, self.w) {
            return Err(LineError::ShapeMismatch(format!(
                "f must be {w}x{v} and g {v}x{w}; found {}x{} and {}x{}",
                self.f.rows(),
                self.f.cols(),
                self.g.rows(),
                self.g.cols(),
                v = self.v,
                w = self.w
            )));
        }
        Ok(())
    }

    /// `id_V − g∘f`.
    pub fn vanishing_operator(&self) -> Result<ExactMatrix, LineError> {
        self.check_shapes()?;
        let gf = self.g.checked_mul(&self.f)?;
        Ok(ExactMatrix::identity(self.v).checked_sub(&gf)?)
    }

    /// `id_W − f∘g`.
    pub fn nearby_operator(&self) -> Result<ExactMatrix, LineError> {
        self.check_shapes()?;
        let fg = self.f.checked_mul(&self.g)?;
        Ok(ExactMatrix::identity(self.w).checked_sub(&fg)?)
    }
}

pub fn validate_beilinson(b: &DiskBeilinson) -> Result<ValidationReport, LineError> {
    let mut report = ValidationReport::new();
    if !crate::exactla::is_invertible(&b.vanishing_operator()?) {
        report.fail("id_V-gf", "id_V - g∘f is not invertible");
    }
    if !crate::exactla::is_invertible(&b.nearby_operator()?) {
        report.fail("id_W-fg", "id_W - f∘g is not invertible");
    }
    Ok(report)
}

/// Counterclockwise monodromy on nearby cycles, `id_W − f∘g`.
pub fn monodromy_beilinson(b: &DiskBeilinson) -> Result<ExactMatrix, LineError> {
    b.nearby_operator()
}
