//! Decategorified Stokes schobers: semi-orthogonal flags along Stokes rays
//! turned into front sheaves, and irregular Beilinson gluing data.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{is_invertible, ExactMatrix, Subspace};
use crate::front::{FrontDiagram, FrontError};
use crate::mutation::{block_left_mutation, EulerLattice, LatticeVector, MutationError, SODPair};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use crate::sheafknot::{microstalk, monodromy, transport, validate_front_sheaf, FrontSheaf, SheafError};

#[derive(Debug, Error)]
pub enum SchoberError {
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error(transparent)]
    Sheaf(SheafError),
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error("flag mismatch: {0}")]
    FlagMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("strand {0} is not a zero-class strand of the front")]
    NoZeroStrand(usize),
    #[error("mutation at slot {0} does not return within {1} steps")]
    NoPeriod(usize, usize),
    #[error("input error: {0}")]
    Input(String),
}

impl From<SheafError> for SchoberError {
    fn from(e: SheafError) -> Self {
        match e {
            SheafError::FlagMismatch(m) => SchoberError::FlagMismatch(m),
            other => SchoberError::Sheaf(other),
        }
    }
}

/// One block per strand position, bottom to top.
pub type BlockFlag = Vec<Vec<LatticeVector>>;

/// Per-sector semi-orthogonal flags on a front, consecutive sectors related
/// by a block mutation at the slot of the crossing between them.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesSchoberShadow {
    front: FrontDiagram,
    lattice: EulerLattice,
    sectors: Vec<BlockFlag>,
}

fn span_of(n: usize, vs: &[LatticeVector]) -> Subspace {
    let rows: Vec<Vec<Scalar>> = vs.iter().map(|v| v.iter().cloned().map(Scalar::from).collect()).collect();
    Subspace::span(n, &rows)
}

fn block_spans(n: usize, flag: &BlockFlag) -> Vec<Subspace> {
    flag.iter().map(|b| span_of(n, b)).collect()
}

/// Mutate blocks `(k, k+1)` of a flag.
fn mutate_at(lattice: &EulerLattice, flag: &BlockFlag, k: usize) -> Result<BlockFlag, SchoberError> {
    let mutated = block_left_mutation_unchecked(lattice, &flag[k], &flag[k + 1])?;
    let mut out = flag.clone();
    out[k] = mutated.0;
    out[k + 1] = mutated.1;
    Ok(out)
}

fn block_left_mutation_unchecked(
    lattice: &EulerLattice,
    a: &[LatticeVector],
    b: &[LatticeVector],
) -> Result<(Vec<LatticeVector>, Vec<LatticeVector>), SchoberError> {
    let pair = SODPair::new_unchecked(lattice.clone(), a.to_vec(), b.to_vec());
    let m = block_left_mutation(&pair)?;
    Ok((m.block_a().to_vec(), m.block_b().to_vec()))
}

impl StokesSchoberShadow {
    /// Check every sector step, including the one closing the circle.
    pub fn new(front: FrontDiagram, lattice: EulerLattice, sectors: Vec<BlockFlag>) -> Result<Self, SchoberError> {
        let c = front.crossing_count();
        let count = c.max(1);
        let n = front.strands();
        let rank = lattice.rank();
        if sectors.len() != count {
            return Err(SchoberError::FlagMismatch(format!("{} sector flags for {count} sectors", sectors.len())));
        }
        for (j, flag) in sectors.iter().enumerate() {
            if flag.len() != n {
                return Err(SchoberError::FlagMismatch(format!("sector {j} has {} blocks for {n} strands", flag.len())));
            }
            if flag.iter().flatten().any(|v| v.len() != rank) {
                return Err(SchoberError::ShapeMismatch(format!("sector {j} has a vector outside the rank-{rank} lattice")));
            }
            let total: usize = flag.iter().map(|b| b.len()).sum();
            let all: Vec<LatticeVector> = flag.iter().flatten().cloned().collect();
            if total != rank || span_of(rank, &all).dim() != rank {
                return Err(SchoberError::FlagMismatch(format!("sector {j} blocks do not form a basis")));
            }
        }
        for x in 0..c {
            let k = front.crossings()[x].slot;
            let expected = block_spans(rank, &mutate_at(&lattice, &sectors[x], k)?);
            if expected != block_spans(rank, &sectors[(x + 1) % c]) {
                return Err(SchoberError::FlagMismatch(format!(
                    "sector {} is not the mutation of sector {x} at slot {k}",
                    (x + 1) % c
                )));
            }
        }
        Ok(StokesSchoberShadow { front, lattice, sectors })
    }

    /// Propagate an initial flag through every crossing; the result must
    /// return to the initial flag after a full turn.
    pub fn generate(front: FrontDiagram, lattice: EulerLattice, initial: BlockFlag) -> Result<Self, SchoberError> {
        if initial.len() != front.strands() {
            return Err(SchoberError::FlagMismatch(format!(
                "{} initial blocks for {} strands",
                initial.len(),
                front.strands()
            )));
        }
        let mut sectors = vec![initial];
        for x in 0..front.crossing_count().saturating_sub(1) {
            let k = front.crossings()[x].slot;
            let next = mutate_at(&lattice, &sectors[x], k)?;
            sectors.push(next);
        }
        StokesSchoberShadow::new(front, lattice, sectors)
    }

    /// Combinatorial front built from `slots`, each repeated for a full
    /// mutation period, together with its closed flag chain.
    pub fn closed_from_slots(
        lattice: EulerLattice,
        initial: BlockFlag,
        slots: &[usize],
        max_period: usize,
    ) -> Result<Self, SchoberError> {
        let n = initial.len();
        let rank = lattice.rank();
        let mut word = Vec::new();
        let mut flag = initial.clone();
        for &k in slots {
            if k + 1 >= n {
                return Err(SchoberError::ShapeMismatch(format!("slot {k} needs {} strands", k + 2)));
            }
            let start = block_spans(rank, &flag);
            let mut cur = flag.clone();
            let mut period = None;
            for step in 1..=max_period {
                cur = mutate_at(&lattice, &cur, k)?;
                if block_spans(rank, &cur) == start {
                    period = Some(step);
                    break;
                }
            }
            let p = period.ok_or(SchoberError::NoPeriod(k, max_period))?;
            word.extend(std::iter::repeat_n(k, p));
            flag = cur;
        }
        let front = FrontDiagram::from_word(n, &word)?;
        StokesSchoberShadow::generate(front, lattice, initial)
    }

    pub fn front(&self) -> &FrontDiagram {
        &self.front
    }

    pub fn lattice(&self) -> &EulerLattice {
        &self.lattice
    }

    pub fn sectors(&self) -> &[BlockFlag] {
        &self.sectors
    }

    /// Partial sums of blocks, `n + 1` subspaces per sector.
    pub fn partial_sum_flags(&self) -> Vec<Vec<Subspace>> {
        let rank = self.lattice.rank();
        self.sectors
            .iter()
            .map(|flag| {
                let mut acc: Vec<LatticeVector> = Vec::new();
                let mut out = vec![Subspace::zero(rank)];
                for block in flag {
                    acc.extend(block.iter().cloned());
                    out.push(span_of(rank, &acc));
                }
                out
            })
            .collect()
    }

    /// Read `{"gram", "initial"}` or `{"gram", "sectors"}` for a given front.
    pub fn from_value(front: FrontDiagram, value: serde_json::Value) -> Result<Self, SchoberError> {
        let raw: ShadowJson = serde_json::from_value(value).map_err(|e| SchoberError::Input(e.to_string()))?;
        let to_ints = |rows: Vec<Vec<Scalar>>| -> Result<Vec<LatticeVector>, SchoberError> {
            rows.into_iter()
                .map(|r| {
                    r.iter()
                        .map(|s| s.to_integer().ok_or_else(|| SchoberError::Input(format!("{s} is not an integer"))))
                        .collect()
                })
                .collect()
        };
        let lattice = EulerLattice::new(to_ints(raw.gram)?)?;
        let flag = |f: Vec<Vec<Vec<Scalar>>>| f.into_iter().map(to_ints).collect::<Result<BlockFlag, _>>();
        match (raw.initial, raw.sectors) {
            (Some(init), None) => StokesSchoberShadow::generate(front, lattice, flag(init)?),
            (None, Some(sectors)) => {
                let sectors = sectors.into_iter().map(flag).collect::<Result<Vec<_>, _>>()?;
                StokesSchoberShadow::new(front, lattice, sectors)
            }
            _ => Err(SchoberError::Input("give exactly one of \"initial\" and \"sectors\"".into())),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShadowJson {
    gram: Vec<Vec<Scalar>>,
    #[serde(default)]
    initial: Option<Vec<Vec<Vec<Scalar>>>>,
    #[serde(default)]
    sectors: Option<Vec<Vec<Vec<Vec<Scalar>>>>>,
}

/// Faces are partial sums of the blocks, edges are inclusions, STWZ mode.
pub fn decategorify_schober(s: &StokesSchoberShadow) -> Result<FrontSheaf, SchoberError> {
    Ok(FrontSheaf::from_sector_flags(s.front.clone(), &s.partial_sum_flags(), true)?)
}

/// A front sheaf glued along a zero-class strand to `V` by `f: E → V`
/// and `g: V → E`, `E` the strand's microstalk.
#[derive(Clone, Debug, PartialEq)]
pub struct IrregularGluing {
    pub sheaf: FrontSheaf,
    pub zero_strand: usize,
    pub v_dim: usize,
    pub f: ExactMatrix,
    pub g: ExactMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GluingJson {
    sheaf: serde_json::Value,
    zero_strand: usize,
    #[serde(rename = "V_dim")]
    v_dim: usize,
    f: ExactMatrix,
    g: ExactMatrix,
}

impl IrregularGluing {
    pub fn read(path: &Path) -> Result<Self, SchoberError> {
        let text = std::fs::read_to_string(path).map_err(|e| SchoberError::Input(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| SchoberError::Input(e.to_string()))?;
        IrregularGluing::from_value(value, path.parent())
    }

    /// Decode; `"sheaf"` may be inline or a path relative to `base`.
    pub fn from_value(value: serde_json::Value, base: Option<&Path>) -> Result<Self, SchoberError> {
        let raw: GluingJson = serde_json::from_value(value).map_err(|e| SchoberError::Input(e.to_string()))?;
        let sheaf = match raw.sheaf {
            serde_json::Value::String(rel) => {
                let p = base.map(|b| b.join(&rel)).unwrap_or_else(|| rel.into());
                FrontSheaf::read(&p)?
            }
            v => FrontSheaf::from_value(v, base)?,
        };
        Ok(IrregularGluing {
            sheaf,
            zero_strand: raw.zero_strand,
            v_dim: raw.v_dim,
            f: raw.f,
            g: raw.g,
        })
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(GluingJson {
            sheaf: serde_json::to_value(&self.sheaf).expect("sheaf serializes"),
            zero_strand: self.zero_strand,
            v_dim: self.v_dim,
            f: self.f.clone(),
            g: self.g.clone(),
        })
        .expect("gluing serializes")
    }
}

/// Passes iff the sheaf is valid, `id − f·g` and `id − g·f` are invertible,
/// and `id − g·f` equals the monodromy along the zero strand.
pub fn validate_irregular_gluing(gd: &IrregularGluing) -> Result<ValidationReport, SchoberError> {
    let front = gd.sheaf.front();
    if !front.zero_strands().contains(&gd.zero_strand) {
        return Err(SchoberError::NoZeroStrand(gd.zero_strand));
    }
    let mut report = validate_front_sheaf(&gd.sheaf);
    if !report.pass {
        return Ok(report);
    }
    let component = front.component_of(gd.zero_strand).expect("strand exists");
    let m = monodromy(&gd.sheaf, component)?;
    let e = m.rows();
    let v = gd.v_dim;
    if (gd.f.rows(), gd.f.cols()) != (v, e) || (gd.g.rows(), gd.g.cols()) != (e, v) {
        return Err(SchoberError::ShapeMismatch(format!(
            "f must be {v}x{e} and g {e}x{v}; got {}x{} and {}x{}",
            gd.f.rows(),
            gd.f.cols(),
            gd.g.rows(),
            gd.g.cols()
        )));
    }
    let id_gf = ExactMatrix::identity(e).checked_sub(&(&gd.g * &gd.f)).expect("square");
    let id_fg = ExactMatrix::identity(v).checked_sub(&(&gd.f * &gd.g)).expect("square");
    if !is_invertible(&id_gf) {
        report.fail("id-gf", "id - g·f is not invertible");
    }
    if !is_invertible(&id_fg) {
        report.fail("id-fg", "id - f·g is not invertible");
    }
    if id_gf != m {
        report.fail("monodromy", "id - g·f differs from the monodromy of the zero strand");
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransportSummary {
    pub crossing: usize,
    pub strand: usize,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonodromySummary {
    pub component: usize,
    pub dim: usize,
    /// Coefficients of `det(x·I − M)` from the constant term up.
    pub charpoly: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantsReport {
    pub strands: usize,
    pub crossings: usize,
    pub region_dims: Vec<usize>,
    pub top_dim: usize,
    /// Microstalk dimension of each strand at its sector-0 segment.
    pub microstalk_dims: Vec<usize>,
    pub transports: Vec<TransportSummary>,
    pub monodromy: Vec<MonodromySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gluing_dim: Option<usize>,
}

/// Dimensions, transport shapes and monodromy characteristic polynomials.
pub fn invariants_report(s: &FrontSheaf) -> Result<InvariantsReport, SchoberError> {
    let front = s.front();
    let geometry = s.geometry();
    let microstalk_dims = (0..front.strands())
        .map(|strand| {
            let p = front.base_position(strand).expect("strand in sector 0");
            microstalk(s, geometry.segment_at(p, 0)).map(|q| q.quotient_dim())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut transports = Vec::new();
    for (x, c) in front.crossings().iter().enumerate() {
        for p in [c.slot, c.slot + 1] {
            let strand = front.sector_orders()[x][p];
            let t = transport(s, x, strand)?;
            transports.push(TransportSummary {
                crossing: x,
                strand,
                rows: t.rows(),
                cols: t.cols(),
            });
        }
    }
    let monodromy = (0..front.components().len())
        .map(|component| {
            let m = monodromy(s, component)?;
            Ok(MonodromySummary {
                component,
                dim: m.rows(),
                charpoly: m.charpoly().expect("square").iter().map(|c| c.to_string()).collect(),
            })
        })
        .collect::<Result<Vec<_>, SchoberError>>()?;
    Ok(InvariantsReport {
        strands: front.strands(),
        crossings: front.crossing_count(),
        region_dims: s.region_dims().to_vec(),
        top_dim: s.region_dims()[geometry.top_region()],
        microstalk_dims,
        transports,
        monodromy,
        gluing_dim: None,
    })
}

/// The sheaf report with the dimension of the glued space.
pub fn gluing_invariants_report(gd: &IrregularGluing) -> Result<InvariantsReport, SchoberError> {
    let mut r = invariants_report(&gd.sheaf)?;
    r.gluing_dim = Some(gd.v_dim);
    Ok(r)
}
