//! Pure sheaves on a front: one vector space per face, an injective upward
//! map per strand segment, exact crossings, microstalk transport and
//! monodromy.
//!
//! At a crossing with faces `B` (below), `L` (west), `R` (east), `T` (above)
//! the complex `B → L ⊕ R → T`, `x ↦ (e_BL x, e_BR x)`, `(l, r) ↦ e_LT l − e_RT r`
//! must be exact at all three spots. Transport runs west to east, which is
//! counterclockwise on the circle.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{cokernel, induced_quotient_map, is_injective, is_invertible, rank, ExactMatrix, QuotientSpace, Subspace};
use crate::front::{FrontDiagram, FrontGeometry};
use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown segment {0}")]
    UnknownSegment(usize),
    #[error("unknown crossing {0}")]
    UnknownCrossing(usize),
    #[error("unknown component {0}")]
    UnknownComponent(usize),
    #[error("strand {strand} does not pass through crossing {crossing}")]
    StrandNotAtCrossing { crossing: usize, strand: usize },
    #[error("transport at crossing {0} is not an isomorphism")]
    TransportNotIso(usize),
    #[error("sector flags do not match the front: {0}")]
    FlagMismatch(String),
    #[error("cannot read front sheaf: {0}")]
    Input(String),
}

/// Which spot of the crossing complex failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingDefect {
    ShapeMismatch,
    EdgeNotInjective,
    NotACommutativeSquare,
    NotExactAtBottom,
    NotExactAtMiddle,
    NotExactAtTop,
}

impl CrossingDefect {
    pub fn describe(&self) -> &'static str {
        match self {
            CrossingDefect::ShapeMismatch => "edge shapes do not match face dimensions",
            CrossingDefect::EdgeNotInjective => "an edge map is not injective",
            CrossingDefect::NotACommutativeSquare => "e_LT·e_BL ≠ e_RT·e_BR",
            CrossingDefect::NotExactAtBottom => "not exact at B",
            CrossingDefect::NotExactAtMiddle => "not exact at L⊕R",
            CrossingDefect::NotExactAtTop => "not exact at T",
        }
    }
}

/// The four maps around one crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingFilling {
    pub dims: [usize; 4],
    pub bottom_west: ExactMatrix,
    pub west_top: ExactMatrix,
    pub bottom_east: ExactMatrix,
    pub east_top: ExactMatrix,
}

impl CrossingFilling {
    /// Local filling from four subspaces `B ⊆ L, R ⊆ T` of one ambient space.
    pub fn from_subspaces(b: &Subspace, l: &Subspace, r: &Subspace, t: &Subspace) -> Option<Self> {
        Some(CrossingFilling {
            dims: [b.dim(), l.dim(), r.dim(), t.dim()],
            bottom_west: b.inclusion_into(l)?,
            west_top: l.inclusion_into(t)?,
            bottom_east: b.inclusion_into(r)?,
            east_top: r.inclusion_into(t)?,
        })
    }

    fn shapes_ok(&self) -> bool {
        let [b, l, r, t] = self.dims;
        let s = |m: &ExactMatrix| (m.rows(), m.cols());
        s(&self.bottom_west) == (l, b) && s(&self.west_top) == (t, l) && s(&self.bottom_east) == (r, b) && s(&self.east_top) == (t, r)
    }

    /// `d1 = (e_BL; e_BR)` and `d2 = (e_LT | −e_RT)`.
    fn differentials(&self) -> (ExactMatrix, ExactMatrix) {
        let [b, l, r, t] = self.dims;
        let mut d1 = ExactMatrix::zeros(l + r, b);
        for j in 0..b {
            for i in 0..l {
                d1[(i, j)] = self.bottom_west[(i, j)].clone();
            }
            for i in 0..r {
                d1[(l + i, j)] = self.bottom_east[(i, j)].clone();
            }
        }
        let mut d2 = ExactMatrix::zeros(t, l + r);
        for i in 0..t {
            for j in 0..l {
                d2[(i, j)] = self.west_top[(i, j)].clone();
            }
            for j in 0..r {
                d2[(i, l + j)] = -&self.east_top[(i, j)];
            }
        }
        (d1, d2)
    }

    /// Every failing condition; empty iff the filling is valid.
    pub fn defects(&self) -> Vec<CrossingDefect> {
        if !self.shapes_ok() {
            return vec![CrossingDefect::ShapeMismatch];
        }
        let mut out = Vec::new();
        if ![&self.bottom_west, &self.west_top, &self.bottom_east, &self.east_top]
            .iter()
            .all(|m| is_injective(m))
        {
            out.push(CrossingDefect::EdgeNotInjective);
        }
        let (d1, d2) = self.differentials();
        let composite = &d2 * &d1;
        if !composite.is_zero() {
            out.push(CrossingDefect::NotACommutativeSquare);
        }
        let [b, l, r, t] = self.dims;
        let r1 = rank(&d1);
        let r2 = rank(&d2);
        if r1 != b {
            out.push(CrossingDefect::NotExactAtBottom);
        }
        // ker d2 has dimension l + r − r2; im d1 ⊆ ker d2 needs the composite to vanish.
        if !composite.is_zero() || l + r - r2 != r1 {
            out.push(CrossingDefect::NotExactAtMiddle);
        }
        if r2 != t {
            out.push(CrossingDefect::NotExactAtTop);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.defects().is_empty()
    }
}

/// A face-indexed sheaf on a front.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSheaf {
    front: FrontDiagram,
    geometry: FrontGeometry,
    region_dims: Vec<usize>,
    edge_maps: Vec<ExactMatrix>,
    stwz_mode: bool,
}

impl FrontSheaf {
    /// Edge map `k` belongs to segment `k` and has shape
    /// `dim(above) × dim(below)`.
    pub fn new(
        front: FrontDiagram,
        region_dims: Vec<usize>,
        edge_maps: Vec<ExactMatrix>,
        stwz_mode: bool,
    ) -> Result<Self, SheafError> {
        let geometry = front.geometry();
        if region_dims.len() != geometry.regions().len() {
            return Err(SheafError::ShapeMismatch(format!(
                "front has {} regions, {} dimensions given",
                geometry.regions().len(),
                region_dims.len()
            )));
        }
        if edge_maps.len() != geometry.segments().len() {
            return Err(SheafError::ShapeMismatch(format!(
                "front has {} segments, {} edge maps given",
                geometry.segments().len(),
                edge_maps.len()
            )));
        }
        for (k, (seg, m)) in geometry.segments().iter().zip(&edge_maps).enumerate() {
            let want = (region_dims[seg.above], region_dims[seg.below]);
            if (m.rows(), m.cols()) != want {
                return Err(SheafError::ShapeMismatch(format!(
                    "edge map {k} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(FrontSheaf {
            front,
            geometry,
            region_dims,
            edge_maps,
            stwz_mode,
        })
    }

    /// The zero sheaf on a front.
    pub fn zero(front: FrontDiagram, stwz_mode: bool) -> Self {
        let g = front.geometry();
        let dims = vec![0; g.regions().len()];
        let maps = vec![ExactMatrix::zeros(0, 0); g.segments().len()];
        FrontSheaf::new(front, dims, maps, stwz_mode).expect("zero sheaf has consistent shapes")
    }

    /// Sheaf whose face over gap `p` in sector `j` is `flags[j][p]`, all
    /// inside one ambient space; maps are inclusions. `flags` lists sectors
    /// `0..C` and may repeat sector `0` at the end, which must then agree.
    pub fn from_sector_flags(front: FrontDiagram, flags: &[Vec<Subspace>], stwz_mode: bool) -> Result<Self, SheafError> {
        let geometry = front.geometry();
        let sectors = geometry.sector_count();
        let n = front.strands();
        let mismatch = |m: String| Err(SheafError::FlagMismatch(m));
        if flags.len() != sectors && flags.len() != sectors + 1 {
            return mismatch(format!("{} sector flags for {sectors} sectors", flags.len()));
        }
        if flags.len() == sectors + 1 && flags[sectors] != flags[0] {
            return mismatch("flag after a full turn differs from the initial flag".into());
        }
        if let Some(j) = flags.iter().position(|f| f.len() != n + 1) {
            return mismatch(format!("sector {j} flag has {} terms, expected {}", flags[j].len(), n + 1));
        }
        let mut spaces: Vec<Option<&Subspace>> = vec![None; geometry.regions().len()];
        for (j, flag) in flags.iter().take(sectors).enumerate() {
            for (gap, v) in flag.iter().enumerate() {
                let r = geometry.region_at(gap, j);
                match spaces[r] {
                    None => spaces[r] = Some(v),
                    Some(prev) if prev == v => {}
                    Some(_) => return mismatch(format!("face {r} (gap {gap}) differs between sectors")),
                }
            }
        }
        let spaces: Vec<&Subspace> = spaces.into_iter().map(|s| s.expect("every face meets a sector")).collect();
        let mut maps = Vec::with_capacity(geometry.segments().len());
        for (k, seg) in geometry.segments().iter().enumerate() {
            match spaces[seg.below].inclusion_into(spaces[seg.above]) {
                Some(m) => maps.push(m),
                None => return mismatch(format!("segment {k}: face below is not contained in face above")),
            }
        }
        let dims = spaces.iter().map(|s| s.dim()).collect();
        FrontSheaf::new(front, dims, maps, stwz_mode)
    }

    pub fn front(&self) -> &FrontDiagram {
        &self.front
    }

    pub fn geometry(&self) -> &FrontGeometry {
        &self.geometry
    }

    pub fn region_dims(&self) -> &[usize] {
        &self.region_dims
    }

    pub fn edge_maps(&self) -> &[ExactMatrix] {
        &self.edge_maps
    }

    pub fn stwz_mode(&self) -> bool {
        self.stwz_mode
    }

    pub fn crossing_filling(&self, crossing: usize) -> Result<CrossingFilling, SheafError> {
        if crossing >= self.front.crossing_count() {
            return Err(SheafError::UnknownCrossing(crossing));
        }
        let x = self.geometry.crossing_local(crossing);
        let d = &self.region_dims;
        Ok(CrossingFilling {
            dims: [d[x.bottom], d[x.west], d[x.east], d[x.top]],
            bottom_west: self.edge_maps[x.lower_west].clone(),
            west_top: self.edge_maps[x.upper_west].clone(),
            bottom_east: self.edge_maps[x.lower_east].clone(),
            east_top: self.edge_maps[x.upper_east].clone(),
        })
    }

    /// Read a sheaf file whose `"front"` is inline or a path relative to the file.
    pub fn read(path: &Path) -> Result<Self, SheafError> {
        let text = std::fs::read_to_string(path).map_err(|e| SheafError::Input(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| SheafError::Input(e.to_string()))?;
        FrontSheaf::from_value(value, path.parent())
    }

    /// Decode from JSON, resolving a string `"front"` against `base`.
    pub fn from_value(mut value: serde_json::Value, base: Option<&Path>) -> Result<Self, SheafError> {
        if let Some(serde_json::Value::String(rel)) = value.get("front").cloned() {
            let p = base.map(|b| b.join(&rel)).unwrap_or_else(|| rel.clone().into());
            let text = std::fs::read_to_string(&p).map_err(|e| SheafError::Input(format!("{}: {e}", p.display())))?;
            let front: serde_json::Value = serde_json::from_str(&text).map_err(|e| SheafError::Input(e.to_string()))?;
            value["front"] = front;
        }
        serde_json::from_value(value).map_err(|e| SheafError::Input(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrontSheafJson {
    front: FrontDiagram,
    region_dims: Vec<usize>,
    edge_maps: BTreeMap<usize, ExactMatrix>,
    #[serde(default)]
    stwz_mode: bool,
}

impl Serialize for FrontSheaf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FrontSheafJson {
            front: self.front.clone(),
            region_dims: self.region_dims.clone(),
            edge_maps: self.edge_maps.iter().cloned().enumerate().collect(),
            stwz_mode: self.stwz_mode,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrontSheaf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = FrontSheafJson::deserialize(d)?;
        let count = raw.edge_maps.len();
        if let Some((&k, _)) = raw.edge_maps.iter().enumerate().find(|(i, (&k, _))| *i != k).map(|(_, kv)| kv) {
            return Err(D::Error::custom(format!("edge_maps keys must be 0..{count}; found {k}")));
        }
        FrontSheaf::new(raw.front, raw.region_dims, raw.edge_maps.into_values().collect(), raw.stwz_mode)
            .map_err(D::Error::custom)
    }
}

/// All sheaf conditions: purity of every edge, exactness at every crossing,
/// and a zero bottom face in STWZ mode.
pub fn validate_front_sheaf(s: &FrontSheaf) -> ValidationReport {
    let mut report = ValidationReport::new();
    let bottom = s.geometry.bottom_region();
    if s.stwz_mode && s.region_dims[bottom] != 0 {
        report.fail(format!("region {bottom}"), "bottom face must be zero in STWZ mode");
    }
    for (k, m) in s.edge_maps.iter().enumerate() {
        if !is_injective(m) {
            report.fail(format!("segment {k}"), "edge map is not injective");
        }
    }
    for c in 0..s.front.crossing_count() {
        let filling = s.crossing_filling(c).expect("crossing in range");
        for defect in filling.defects() {
            if defect != CrossingDefect::EdgeNotInjective {
                report.fail(format!("crossing {c}"), defect.describe());
            }
        }
    }
    report
}

/// Microstalk along a segment: the cokernel of its edge map.
pub fn microstalk(s: &FrontSheaf, segment: usize) -> Result<QuotientSpace, SheafError> {
    s.edge_maps.get(segment).map(cokernel).ok_or(SheafError::UnknownSegment(segment))
}

/// West-to-east identification of the microstalks of `strand` at `crossing`.
pub fn transport(s: &FrontSheaf, crossing: usize, strand: usize) -> Result<ExactMatrix, SheafError> {
    let f = s.crossing_filling(crossing)?;
    let x = *s.geometry.crossing_local(crossing);
    let west = &s.front.sector_orders()[crossing];
    let not_iso = || SheafError::TransportNotIso(crossing);
    let m = if west[x.slot] == strand {
        // Lower-west to upper-east: L/B → T/R induced by e_LT.
        let src = cokernel(&f.bottom_west);
        let dst = cokernel(&f.east_top);
        induced_quotient_map(&f.west_top, &src, &dst).map_err(|_| not_iso())?
    } else if west[x.slot + 1] == strand {
        // Upper-west to lower-east: invert R/B → T/L induced by e_RT.
        let src = cokernel(&f.bottom_east);
        let dst = cokernel(&f.west_top);
        let back = induced_quotient_map(&f.east_top, &src, &dst).map_err(|_| not_iso())?;
        back.inverse().map_err(|_| not_iso())?
    } else {
        return Err(SheafError::StrandNotAtCrossing { crossing, strand });
    };
    if !is_invertible(&m) {
        return Err(not_iso());
    }
    Ok(m)
}

/// Monodromy around a component from the deterministic base point: the
/// segment of the component's least strand in sector `0`.
pub fn monodromy(s: &FrontSheaf, component: usize) -> Result<ExactMatrix, SheafError> {
    let comp = s.front.components().get(component).ok_or(SheafError::UnknownComponent(component))?;
    let strand = *comp.iter().min().expect("components are nonempty");
    let position = s.front.base_position(strand).expect("strand present in sector 0");
    monodromy_from(s, 0, position)
}

/// Monodromy based at the segment at `position` in `sector`.
pub fn monodromy_from(s: &FrontSheaf, sector: usize, position: usize) -> Result<ExactMatrix, SheafError> {
    let c = s.front.crossing_count();
    if position >= s.front.strands() {
        return Err(SheafError::ShapeMismatch(format!("no position {position}")));
    }
    let start = s.geometry.segment_at(position, sector);
    let dim = microstalk(s, start)?.quotient_dim();
    let mut m = ExactMatrix::identity(dim);
    if c == 0 {
        return Ok(m);
    }
    let sector = sector % c;
    let mut p = position;
    let mut step = 0usize;
    loop {
        let x = (sector + step) % c;
        let slot = s.front.crossings()[x].slot;
        if p == slot || p == slot + 1 {
            let strand = s.front.sector_orders()[x][p];
            let t = transport(s, x, strand)?;
            m = &t * &m;
            p = if p == slot { slot + 1 } else { slot };
        }
        step += 1;
        if step.is_multiple_of(c) && p == position {
            return Ok(m);
        }
    }
}

/// Every base segment of a component as `(sector, position)`.
pub fn base_points(s: &FrontSheaf, component: usize) -> Result<Vec<(usize, usize)>, SheafError> {
    let comp = s.front.components().get(component).ok_or(SheafError::UnknownComponent(component))?;
    let sectors = s.geometry.sector_count();
    let mut out = Vec::new();
    for j in 0..sectors {
        let order = &s.front.sector_orders()[j];
        for (p, id) in order.iter().enumerate() {
            if comp.contains(id) {
                out.push((j, p));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::FormalType;
    use crate::scalar::Scalar;
    use num_rational::BigRational;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    fn span(n: usize, vs: &[&[i64]]) -> Subspace {
        Subspace::span(n, &vs.iter().map(|x| v(x)).collect::<Vec<_>>())
    }

    /// Two strands crossing twice: west face of crossing 0 is sector 0.
    fn two_crossings(l: Subspace, r: Subspace, b: Subspace, t: Subspace, stwz: bool) -> FrontSheaf {
        let front = FrontDiagram::from_word(2, &[0, 0]).unwrap();
        FrontSheaf::from_sector_flags(front, &[vec![b.clone(), l, t.clone()], vec![b, r, t]], stwz).unwrap()
    }

    #[test]
    fn validate_examples() {
        let s = two_crossings(span(2, &[&[1, 0]]), span(2, &[&[0, 1]]), Subspace::zero(2), Subspace::full(2), true);
        assert!(validate_front_sheaf(&s).pass);
        let bad = two_crossings(span(2, &[&[1, 0]]), span(2, &[&[1, 0]]), Subspace::zero(2), Subspace::full(2), true);
        let r = validate_front_sheaf(&bad);
        assert!(!r.pass);
        assert!(r.failures.iter().any(|f| f.reason == "not exact at L⊕R"));
        let zero = FrontSheaf::zero(FrontDiagram::from_word(3, &[0, 1, 0]).unwrap(), true);
        assert!(validate_front_sheaf(&zero).pass);
    }

    #[test]
    fn local_filling_oracle_examples() {
        let b = Subspace::zero(2);
        let t = Subspace::full(2);
        let good = CrossingFilling::from_subspaces(&b, &span(2, &[&[1, 0]]), &span(2, &[&[0, 1]]), &t).unwrap();
        assert!(good.is_valid());
        let same = CrossingFilling::from_subspaces(&b, &span(2, &[&[1, 0]]), &span(2, &[&[1, 0]]), &t).unwrap();
        assert_eq!(same.defects(), vec![CrossingDefect::NotExactAtMiddle, CrossingDefect::NotExactAtTop]);
        let mut transverse = good.clone();
        transverse.east_top = ExactMatrix::from_ints(&[&[1], &[1]]);
        assert!(transverse.is_valid());
        let mut collapsed = good.clone();
        collapsed.east_top = ExactMatrix::from_ints(&[&[2], &[0]]);
        assert_eq!(collapsed.defects(), vec![CrossingDefect::NotExactAtMiddle, CrossingDefect::NotExactAtTop]);
    }

    #[test]
    fn transport_examples() {
        let s = two_crossings(span(2, &[&[1, 0]]), span(2, &[&[0, 1]]), Subspace::zero(2), Subspace::full(2), true);
        let rising = s.front().sector_orders()[0][0];
        assert_eq!(transport(&s, 0, rising).unwrap(), ExactMatrix::identity(1));
        let zero = FrontSheaf::zero(FrontDiagram::from_word(2, &[0, 0]).unwrap(), true);
        let t = transport(&zero, 0, 0).unwrap();
        assert_eq!((t.rows(), t.cols()), (0, 0));
        let s3 = two_crossings(
            span(3, &[&[1, 0, 0], &[0, 1, 0]]),
            span(3, &[&[1, 0, 0], &[0, 0, 1]]),
            span(3, &[&[1, 0, 0]]),
            Subspace::full(3),
            false,
        );
        assert!(validate_front_sheaf(&s3).pass);
        assert_eq!(transport(&s3, 0, rising).unwrap(), ExactMatrix::identity(1));
        assert_eq!(
            transport(&s3, 0, 7),
            Err(SheafError::StrandNotAtCrossing { crossing: 0, strand: 7 })
        );
    }

    #[test]
    fn microstalk_examples() {
        let zero_front = FrontDiagram::build(&FormalType::parse_all(&["0"]).unwrap(), &BigRational::new(1.into(), 10.into())).unwrap();
        let s = FrontSheaf::new(zero_front.clone(), vec![0, 1], vec![ExactMatrix::zeros(1, 0)], true).unwrap();
        assert_eq!(microstalk(&s, 0).unwrap().quotient_dim(), 1);
        assert_eq!(monodromy(&s, 0).unwrap(), ExactMatrix::identity(1));
        let iso = FrontSheaf::new(zero_front, vec![2, 2], vec![ExactMatrix::identity(2)], false).unwrap();
        assert_eq!(microstalk(&iso, 0).unwrap().quotient_dim(), 0);
        assert_eq!(microstalk(&iso, 1), Err(SheafError::UnknownSegment(1)));
    }

    /// Airy filling: three pairwise transverse lines in Q², one per middle face.
    fn airy_sheaf() -> FrontSheaf {
        let t = FormalType::parse_all(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]).unwrap();
        let front = FrontDiagram::build(&t, &BigRational::new(1.into(), 10.into())).unwrap();
        let lines = [span(2, &[&[1, 0]]), span(2, &[&[0, 1]]), span(2, &[&[1, 1]])];
        let flags: Vec<Vec<Subspace>> = lines
            .iter()
            .map(|l| vec![Subspace::zero(2), l.clone(), Subspace::full(2)])
            .collect();
        FrontSheaf::from_sector_flags(front, &flags, true).unwrap()
    }

    /// Independent path follower on representatives in Q²: a lower microstalk
    /// element is a vector of the line, an upper one a vector modulo the line.
    fn airy_oracle(start_upper: bool) -> Scalar {
        let lines = [v(&[1, 0]), v(&[0, 1]), v(&[1, 1])];
        // Coefficients (a, b) with a·x + b·y = w.
        let solve = |x: &[Scalar], y: &[Scalar], w: &[Scalar]| -> (Scalar, Scalar) {
            let det = &(&x[0] * &y[1]) - &(&x[1] * &y[0]);
            let a = &(&(&w[0] * &y[1]) - &(&w[1] * &y[0])) / &det;
            let b = &(&(&x[0] * &w[1]) - &(&x[1] * &w[0])) / &det;
            (a, b)
        };
        // Lower start: a vector on lines[0]. Upper start: a vector off lines[0].
        let start = if start_upper { lines[1].clone() } else { lines[0].clone() };
        let mut vec = start.clone();
        let mut upper = start_upper;
        for step in 0..6 {
            let c = step % 3;
            let west = &lines[c];
            let east = &lines[(c + 1) % 3];
            if upper {
                let (a, _) = solve(east, west, &vec);
                vec = east.iter().map(|x| &a * x).collect();
            }
            upper = !upper;
        }
        assert_eq!(upper, start_upper);
        if upper {
            // vec ≡ λ·start modulo lines[0].
            solve(&start, &lines[0], &vec).0
        } else {
            solve(&start, &lines[1], &vec).0
        }
    }

    #[test]
    fn airy_monodromy_matches_path_follower() {
        let s = airy_sheaf();
        assert!(validate_front_sheaf(&s).pass);
        let m = monodromy(&s, 0).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        let upper = s.front().base_position(0).unwrap() == 1;
        assert_eq!(m[(0, 0)], airy_oracle(upper));
        assert_eq!(m[(0, 0)], Scalar::from_int(-1));
        for (j, p) in base_points(&s, 0).unwrap() {
            assert_eq!(monodromy_from(&s, j, p).unwrap().charpoly().unwrap(), m.charpoly().unwrap());
        }
    }

    #[test]
    fn flag_mismatch_detected() {
        let front = FrontDiagram::from_word(2, &[0, 0]).unwrap();
        let flags = vec![
            vec![Subspace::zero(2), span(2, &[&[1, 0]]), Subspace::full(2)],
            vec![span(2, &[&[0, 1]]), span(2, &[&[0, 1]]), Subspace::full(2)],
        ];
        assert!(matches!(
            FrontSheaf::from_sector_flags(front.clone(), &flags, true),
            Err(SheafError::FlagMismatch(_))
        ));
        let open = vec![
            vec![Subspace::zero(2), span(2, &[&[1, 0]]), Subspace::full(2)],
            vec![Subspace::zero(2), span(2, &[&[0, 1]]), Subspace::full(2)],
            vec![Subspace::zero(2), span(2, &[&[1, 1]]), Subspace::full(2)],
        ];
        assert!(matches!(
            FrontSheaf::from_sector_flags(front, &open, true),
            Err(SheafError::FlagMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = airy_sheaf();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains(r#""edge_maps":{"0":"#));
        let back: FrontSheaf = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let broken = text.replace(r#""region_dims":[0,1,1,1,2]"#, r#""region_dims":[0,1,1,2]"#);
        assert!(serde_json::from_str::<FrontSheaf>(&broken).is_err());
    }
}
