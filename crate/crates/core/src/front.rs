//! Legendrian fronts on the cylinder `S¹ × R` built from formal types.
//!
//! Strand heights are `n_i(θ) = Re f_i(ε·e^{iθ})`; co-orientation points
//! downward. Positions in a sector are counted from the bottom. Crossing `c`
//! separates sector `c` (west) from sector `c + 1` (east); sector `C` is
//! sector `0` seen after one full turn, labelled by continuing the strands,
//! so `order_0[q] = deck(order_C[q])`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::puiseux::{crossing_angles, parse_class, Angle, FormalType, PuiseuxClass, PuiseuxError};
use crate::scalar::{format_rational, parse_rational};

/// Numerical tie tolerance for heights at sector midpoints.
pub const HEIGHT_TOLERANCE: f64 = 1e-9;
const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontError {
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
    #[error("degenerate front: {0}")]
    DegenerateFront(String),
    #[error("epsilon must be positive")]
    InvalidEpsilon,
    #[error("inconsistent front data: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub angle: Angle,
    /// The crossing swaps positions `slot` and `slot + 1`.
    pub slot: usize,
}

/// Which sheet of which deck orbit a strand is.
#[derive(Clone, Debug, PartialEq)]
pub struct StrandClass {
    pub orbit: usize,
    pub sheet: usize,
    pub class: PuiseuxClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontDiagram {
    strands: usize,
    crossings: Vec<Crossing>,
    sector_orders: Vec<Vec<usize>>,
    components: Vec<Vec<usize>>,
    strand_classes: Option<Vec<StrandClass>>,
    deck: Vec<usize>,
}

fn angle_cmp(a: &Angle, b: &Angle) -> std::cmp::Ordering {
    if a.is_exact() && b.is_exact() {
        a.turns.cmp(&b.turns)
    } else {
        a.radians().total_cmp(&b.radians())
    }
}

fn angles_coincide(a: &Angle, b: &Angle) -> bool {
    if a.is_exact() && b.is_exact() {
        a.turns == b.turns
    } else {
        (a.radians() - b.radians()).abs() < ANGLE_TOLERANCE
    }
}

/// Cycles of a permutation, each starting at its least element, ordered by it.
fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut a = start;
        while !seen[a] {
            seen[a] = true;
            cyc.push(a);
            a = perm[a];
        }
        out.push(cyc);
    }
    out
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    v.len() == n && v.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

/// Midpoint angles (radians) of sectors `0..=C`; sector `C` is sector `0` plus `2π`.
fn sector_midpoints(angles: &[f64]) -> Vec<f64> {
    let c = angles.len();
    if c == 0 {
        return vec![PI, PI + TAU];
    }
    let first = (angles[c - 1] - TAU + angles[0]) / 2.0;
    let mut mids = vec![first];
    mids.extend(angles.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    mids.push(first + TAU);
    mids
}

impl FrontDiagram {
    /// Front of a formal type at radius `ε`.
    pub fn build(formal: &FormalType, epsilon: &BigRational) -> Result<Self, FrontError> {
        if epsilon <= &BigRational::zero() {
            return Err(FrontError::InvalidEpsilon);
        }
        if formal.classes.is_empty() {
            return Err(PuiseuxError::Invalid("formal type has no classes".into()).into());
        }
        let orbits = formal.orbits()?;
        let mut labels = Vec::new();
        let mut orbit_start = Vec::new();
        for (o, orbit) in orbits.iter().enumerate() {
            orbit_start.push(labels.len());
            for (s, class) in orbit.sheets.iter().enumerate() {
                labels.push(StrandClass {
                    orbit: o,
                    sheet: s,
                    class: class.clone(),
                });
            }
        }
        let n = labels.len();
        let deck: Vec<usize> = labels
            .iter()
            .map(|l| orbit_start[l.orbit] + (l.sheet + 1) % orbits[l.orbit].sheets.len())
            .collect();

        // Stokes directions on the base circle, one list per pair of strands.
        let one = BigRational::from_integer(1.into());
        let mut raw: Vec<(Angle, usize, usize)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let (exp, arg) = labels[a]
                    .class
                    .leading_difference(&labels[b].class)
                    .ok_or(PuiseuxError::EqualClasses)?;
                for th in crossing_angles(&-exp, &arg, &one) {
                    raw.push((th, a, b));
                }
            }
        }
        raw.sort_by(|x, y| angle_cmp(&x.0, &y.0));
        if let Some(w) = raw.windows(2).find(|w| angles_coincide(&w[0].0, &w[1].0)) {
            return Err(FrontError::DegenerateFront(format!(
                "crossings of strands {}/{} and {}/{} coincide at {}",
                w[0].1, w[0].2, w[1].1, w[1].2, w[0].0
            )));
        }

        let radians: Vec<f64> = raw.iter().map(|r| r.0.radians()).collect();
        let eps = epsilon.clone();
        let mut sector_orders = Vec::new();
        for (j, &mid) in sector_midpoints(&radians).iter().enumerate() {
            let mut heights: Vec<(f64, usize)> =
                labels.iter().enumerate().map(|(i, l)| (l.class.evaluate_re(&eps, mid), i)).collect();
            heights.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            if let Some(w) = heights.windows(2).find(|w| (w[1].0 - w[0].0).abs() < HEIGHT_TOLERANCE) {
                return Err(FrontError::DegenerateFront(format!(
                    "strands {} and {} are tied in sector {j}",
                    w[0].1, w[1].1
                )));
            }
            sector_orders.push(heights.into_iter().map(|h| h.1).collect::<Vec<_>>());
        }
        if raw.is_empty() {
            // One sector; the continued copy only serves the deck check below.
            let cont = sector_orders.pop().expect("two midpoints");
            if cont.iter().map(|&a| deck[a]).collect::<Vec<_>>() != sector_orders[0] {
                return Err(FrontError::DegenerateFront("strand order does not close up".into()));
            }
        }

        let mut crossings = Vec::with_capacity(raw.len());
        for (c, (angle, a, b)) in raw.into_iter().enumerate() {
            let west = &sector_orders[c];
            let east = &sector_orders[c + 1];
            let pa = west.iter().position(|&x| x == a).expect("permutation");
            let pb = west.iter().position(|&x| x == b).expect("permutation");
            let slot = pa.min(pb);
            let mut swapped = west.clone();
            swapped.swap(pa, pb);
            if pa.abs_diff(pb) != 1 || &swapped != east {
                return Err(FrontError::DegenerateFront(format!(
                    "crossing {c} of strands {a} and {b} is not an adjacent transposition; decrease epsilon"
                )));
            }
            crossings.push(Crossing { angle, slot });
        }
        let last = &sector_orders[sector_orders.len() - 1];
        if last.iter().map(|&a| deck[a]).collect::<Vec<_>>() != sector_orders[0] {
            return Err(FrontError::DegenerateFront(
                "strand order after a full turn is not the deck image of the initial order".into(),
            ));
        }
        Ok(FrontDiagram {
            strands: n,
            crossings,
            components: cycles(&deck),
            sector_orders,
            strand_classes: Some(labels),
            deck,
        })
    }

    /// Purely combinatorial front: `n` strands starting in identity order,
    /// crossing slots given by `slots`, evenly spaced angles.
    pub fn from_word(n: usize, slots: &[usize]) -> Result<Self, FrontError> {
        if n == 0 {
            return Err(FrontError::Inconsistent("a front needs at least one strand".into()));
        }
        let count = slots.len() as i64;
        let mut order: Vec<usize> = (0..n).collect();
        let mut sector_orders = vec![order.clone()];
        let mut crossings = Vec::new();
        for (j, &k) in slots.iter().enumerate() {
            if k + 1 >= n {
                return Err(FrontError::Inconsistent(format!("slot {k} out of range for {n} strands")));
            }
            order.swap(k, k + 1);
            sector_orders.push(order.clone());
            crossings.push(Crossing {
                angle: Angle::from_turns(BigRational::new((2 * j as i64 + 1).into(), (2 * count).into())),
                slot: k,
            });
        }
        let mut deck = vec![0; n];
        for (q, &a) in order.iter().enumerate() {
            deck[a] = q;
        }
        Ok(FrontDiagram {
            strands: n,
            crossings,
            components: cycles(&deck),
            sector_orders,
            strand_classes: None,
            deck,
        })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// `C + 1` orders, bottom to top; see the module docs for sector `C`.
    pub fn sector_orders(&self) -> &[Vec<usize>] {
        &self.sector_orders
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn strand_classes(&self) -> Option<&[StrandClass]> {
        self.strand_classes.as_deref()
    }

    /// Strand continuation once around the circle.
    pub fn deck(&self) -> &[usize] {
        &self.deck
    }

    pub fn component_of(&self, strand: usize) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&strand))
    }

    /// Position of `strand` in sector `0`.
    pub fn base_position(&self, strand: usize) -> Option<usize> {
        self.sector_orders[0].iter().position(|&s| s == strand)
    }

    /// Strands whose class is zero.
    pub fn zero_strands(&self) -> Vec<usize> {
        self.strand_classes
            .iter()
            .flatten()
            .enumerate()
            .filter(|(_, l)| l.class.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Re-derive and check every structural invariant.
    pub fn check(&self) -> Result<(), FrontError> {
        let bad = |m: String| Err(FrontError::Inconsistent(m));
        let n = self.strands;
        let c = self.crossings.len();
        if n == 0 {
            return bad("a front needs at least one strand".into());
        }
        if self.sector_orders.len() != c + 1 {
            return bad(format!("expected {} sector orders, found {}", c + 1, self.sector_orders.len()));
        }
        if let Some(j) = self.sector_orders.iter().position(|o| !is_permutation(o, n)) {
            return bad(format!("sector order {j} is not a permutation of the strands"));
        }
        for (i, x) in self.crossings.iter().enumerate() {
            let r = x.angle.radians();
            if !(0.0..TAU).contains(&r) {
                return bad(format!("crossing {i} angle outside [0, 2π)"));
            }
            if x.slot + 1 >= n {
                return bad(format!("crossing {i} slot out of range"));
            }
            let mut swapped = self.sector_orders[i].clone();
            swapped.swap(x.slot, x.slot + 1);
            if swapped != self.sector_orders[i + 1] {
                return bad(format!("crossing {i} does not swap its slot"));
            }
        }
        if let Some(i) = self
            .crossings
            .windows(2)
            .position(|w| angle_cmp(&w[0].angle, &w[1].angle).is_ge() || angles_coincide(&w[0].angle, &w[1].angle))
        {
            return bad(format!("crossing angles not strictly increasing at {i}"));
        }
        let mut deck = vec![0; n];
        for (q, &a) in self.sector_orders[c].iter().enumerate() {
            deck[a] = self.sector_orders[0][q];
        }
        if deck != self.deck {
            return bad("deck permutation disagrees with the sector orders".into());
        }
        if cycles(&deck) != self.components {
            return bad("components are not the cycles of strand continuation".into());
        }
        if let Some(labels) = &self.strand_classes {
            if labels.len() != n {
                return bad("strand_classes length differs from strand count".into());
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> FrontGeometry {
        FrontGeometry::new(self)
    }
}

/// Total crossings of the front of `T`.
pub fn crossing_count(formal: &FormalType, epsilon: &BigRational) -> Result<usize, FrontError> {
    FrontDiagram::build(formal, epsilon).map(|d| d.crossing_count())
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct CrossingJson {
    angle_turns: String,
    angle_offset_rad: f64,
    slot: usize,
}

#[derive(Serialize, Deserialize)]
struct StrandClassJson {
    orbit: usize,
    sheet: usize,
    class: String,
}

#[derive(Serialize, Deserialize)]
struct FrontJson {
    strands: usize,
    crossings: Vec<CrossingJson>,
    sector_orders: Vec<Vec<usize>>,
    components: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strand_classes: Option<Vec<StrandClassJson>>,
}

impl Serialize for FrontDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FrontJson {
            strands: self.strands,
            crossings: self
                .crossings
                .iter()
                .map(|c| CrossingJson {
                    angle_turns: format_rational(&c.angle.turns),
                    angle_offset_rad: c.angle.offset_rad,
                    slot: c.slot,
                })
                .collect(),
            sector_orders: self.sector_orders.clone(),
            components: self.components.clone(),
            strand_classes: self.strand_classes.as_ref().map(|ls| {
                ls.iter()
                    .map(|l| StrandClassJson {
                        orbit: l.orbit,
                        sheet: l.sheet,
                        class: l.class.render(),
                    })
                    .collect()
            }),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrontDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = FrontJson::deserialize(d)?;
        let crossings = raw
            .crossings
            .into_iter()
            .map(|c| {
                Ok(Crossing {
                    angle: Angle {
                        turns: parse_rational(&c.angle_turns).map_err(D::Error::custom)?,
                        offset_rad: c.angle_offset_rad,
                    },
                    slot: c.slot,
                })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        let strand_classes = raw
            .strand_classes
            .map(|ls| {
                ls.into_iter()
                    .map(|l| {
                        Ok(StrandClass {
                            orbit: l.orbit,
                            sheet: l.sheet,
                            class: parse_class(&l.class).map_err(D::Error::custom)?,
                        })
                    })
                    .collect::<Result<Vec<_>, D::Error>>()
            })
            .transpose()?;
        let n = raw.strands;
        let mut deck = vec![0; n];
        if let (Some(first), Some(last)) = (raw.sector_orders.first(), raw.sector_orders.last()) {
            if is_permutation(first, n) && is_permutation(last, n) {
                for (q, &a) in last.iter().enumerate() {
                    deck[a] = first[q];
                }
            }
        }
        let front = FrontDiagram {
            strands: n,
            crossings,
            sector_orders: raw.sector_orders,
            components: raw.components,
            strand_classes,
            deck,
        };
        front.check().map_err(D::Error::custom)?;
        Ok(front)
    }
}

// ---------------------------------------------------------------------------
// Faces and strand segments

/// A face of the complement of the front: the part of gap `gap` (between
/// positions `gap - 1` and `gap`) over a cyclic run of sectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub gap: usize,
    pub sectors: Vec<usize>,
}

/// A maximal piece of the front at a fixed position, with its generalization
/// edge from the face below to the face above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub position: usize,
    pub sectors: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

/// Faces and segments around crossing `c` at slot `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingLocal {
    pub slot: usize,
    pub bottom: usize,
    pub west: usize,
    pub east: usize,
    pub top: usize,
    /// bottom → west
    pub lower_west: usize,
    /// west → top
    pub upper_west: usize,
    /// bottom → east
    pub lower_east: usize,
    /// east → top
    pub upper_east: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontGeometry {
    sectors: usize,
    regions: Vec<Region>,
    region_at: Vec<Vec<usize>>,
    segments: Vec<Segment>,
    segment_at: Vec<Vec<usize>>,
    locals: Vec<CrossingLocal>,
}

/// Split the circle of `sectors` sectors at the given crossings into cyclic
/// runs. Returns the run index of each sector (the run through sector 0 is 0)
/// and the number of runs.
fn runs(sectors: usize, cut_after: &[bool]) -> (Vec<usize>, usize) {
    let mut id = vec![0; sectors];
    let mut current = 0;
    for j in 1..sectors {
        if cut_after[j - 1] {
            current += 1;
        }
        id[j] = current;
    }
    let count = if sectors > 0 && !cut_after[sectors - 1] && current > 0 {
        // The last run wraps into the first.
        for x in id.iter_mut() {
            if *x == current {
                *x = 0;
            }
        }
        current
    } else {
        current + 1
    };
    (id, count)
}

impl FrontGeometry {
    fn new(front: &FrontDiagram) -> Self {
        let n = front.strands;
        let c = front.crossings.len();
        let sectors = c.max(1);
        let slot_of: Vec<usize> = front.crossings.iter().map(|x| x.slot).collect();
        let cuts = |pred: &dyn Fn(usize) -> bool| -> Vec<bool> {
            (0..sectors).map(|j| j < c && pred(slot_of[j])).collect()
        };

        let mut regions = Vec::new();
        let mut region_at = Vec::with_capacity(n + 1);
        for gap in 0..=n {
            let (ids, count) = runs(sectors, &cuts(&|s| gap > 0 && s == gap - 1));
            let base = regions.len();
            for r in 0..count {
                regions.push(Region {
                    gap,
                    sectors: (0..sectors).filter(|&j| ids[j] == r).collect(),
                });
            }
            region_at.push(ids.iter().map(|&r| base + r).collect::<Vec<_>>());
        }

        let mut segments = Vec::new();
        let mut segment_at = Vec::with_capacity(n);
        for position in 0..n {
            let (ids, count) = runs(sectors, &cuts(&|s| s == position || s + 1 == position));
            let base = segments.len();
            for r in 0..count {
                let secs: Vec<usize> = (0..sectors).filter(|&j| ids[j] == r).collect();
                let j = secs[0];
                segments.push(Segment {
                    position,
                    below: region_at[position][j],
                    above: region_at[position + 1][j],
                    sectors: secs,
                });
            }
            segment_at.push(ids.iter().map(|&r| base + r).collect::<Vec<_>>());
        }

        let locals = (0..c)
            .map(|x| {
                let k = slot_of[x];
                let (w, e) = (x, (x + 1) % sectors);
                CrossingLocal {
                    slot: k,
                    bottom: region_at[k][w],
                    west: region_at[k + 1][w],
                    east: region_at[k + 1][e],
                    top: region_at[k + 2][w],
                    lower_west: segment_at[k][w],
                    upper_west: segment_at[k + 1][w],
                    lower_east: segment_at[k][e],
                    upper_east: segment_at[k + 1][e],
                }
            })
            .collect();

        FrontGeometry {
            sectors,
            regions,
            region_at,
            segments,
            segment_at,
            locals,
        }
    }

    /// Number of sector columns (`max(C, 1)`).
    pub fn sector_count(&self) -> usize {
        self.sectors
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn bottom_region(&self) -> usize {
        0
    }

    pub fn top_region(&self) -> usize {
        self.regions.len() - 1
    }

    /// Face at `gap` over `sector` (taken modulo the sector count).
    pub fn region_at(&self, gap: usize, sector: usize) -> usize {
        self.region_at[gap][sector % self.sectors]
    }

    /// Segment at `position` over `sector` (taken modulo the sector count).
    pub fn segment_at(&self, position: usize, sector: usize) -> usize {
        self.segment_at[position][sector % self.sectors]
    }

    pub fn crossing_local(&self, crossing: usize) -> &CrossingLocal {
        &self.locals[crossing]
    }

    pub fn crossing_locals(&self) -> &[CrossingLocal] {
        &self.locals
    }
}

// ---------------------------------------------------------------------------
// SVG

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 400.0;
const SVG_MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn x_of(theta: f64) -> f64 {
    SVG_MARGIN + theta / TAU * (SVG_WIDTH - 2.0 * SVG_MARGIN)
}

/// Sampled strand heights: analytic when the front carries its classes,
/// otherwise a schematic with heights equal to positions.
fn strand_samples(front: &FrontDiagram, epsilon: &BigRational, samples: usize) -> Vec<Vec<(f64, f64)>> {
    let thetas: Vec<f64> = (0..=samples).map(|i| TAU * i as f64 / samples as f64).collect();
    match &front.strand_classes {
        Some(labels) => labels
            .par_iter()
            .map(|l| thetas.iter().map(|&t| (t, l.class.evaluate_re(epsilon, t))).collect())
            .collect(),
        None => {
            let angles: Vec<f64> = front.crossings.iter().map(|c| c.angle.radians()).collect();
            let mids = sector_midpoints(&angles);
            (0..front.strands)
                .into_par_iter()
                .map(|s| {
                    let mut pts = Vec::new();
                    for (j, order) in front.sector_orders.iter().enumerate() {
                        let q = order.iter().position(|&x| x == s).expect("permutation") as f64;
                        let th = mids[j].clamp(0.0, TAU);
                        pts.push((th, q));
                    }
                    let first = pts[0].1;
                    let last = pts[pts.len() - 1].1;
                    pts.insert(0, (0.0, first));
                    pts.push((TAU, last));
                    pts
                })
                .collect()
        }
    }
}

/// Deterministic SVG 1.1 drawing of the front over `θ ∈ [0, 2π]`.
pub fn emit_svg(front: &FrontDiagram, epsilon: &BigRational, samples: usize) -> String {
    let samples = samples.max(16);
    let curves = strand_samples(front, epsilon, samples);
    let extent = curves
        .iter()
        .flatten()
        .map(|p| p.1.abs())
        .fold(0.0f64, f64::max);
    let schematic = front.strand_classes.is_none();
    let half = SVG_HEIGHT / 2.0 - SVG_MARGIN;
    let (center, scale) = if schematic {
        let top = (front.strands.max(2) - 1) as f64;
        (top / 2.0, 2.0 * half / top)
    } else if extent > 0.0 {
        (0.0, half / extent)
    } else {
        (0.0, 1.0)
    };
    let y_of = |h: f64| SVG_HEIGHT / 2.0 - (h - center) * scale;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = SVG_WIDTH,
        h = SVG_HEIGHT
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##,
        x_of(0.0),
        SVG_HEIGHT - SVG_MARGIN / 2.0,
        x_of(TAU),
        SVG_HEIGHT - SVG_MARGIN / 2.0
    );
    for (s, pts) in curves.iter().enumerate() {
        let colour = PALETTE[s % PALETTE.len()];
        let mut path = String::new();
        for (i, &(t, h)) in pts.iter().enumerate() {
            if i > 0 {
                path.push(' ');
            }
            let _ = write!(path, "{:.3},{:.3}", x_of(t), y_of(h));
        }
        let _ = writeln!(
            svg,
            r#"<polyline class="strand" data-strand="{s}" fill="none" stroke="{colour}" stroke-width="2" points="{path}"/>"#
        );
        // Downward co-orientation ticks.
        let stride = (pts.len() / 12).max(1);
        for &(t, h) in pts.iter().skip(stride / 2).step_by(stride) {
            let (x, y) = (x_of(t), y_of(h));
            let _ = writeln!(
                svg,
                r#"<line class="coorientation" x1="{x:.3}" y1="{y:.3}" x2="{x:.3}" y2="{:.3}" stroke="{colour}" stroke-width="1"/>"#,
                y + 6.0
            );
        }
    }
    let angles: Vec<f64> = front.crossings.iter().map(|c| c.angle.radians()).collect();
    for (c, x) in front.crossings.iter().enumerate() {
        let theta = angles[c];
        let strand = front.sector_orders[c][x.slot];
        let h = match &front.strand_classes {
            Some(labels) => labels[strand].class.evaluate_re(epsilon, theta),
            None => x.slot as f64 + 0.5,
        };
        let _ = writeln!(
            svg,
            r#"<circle class="crossing" data-crossing="{c}" cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#,
            x_of(theta),
            y_of(h)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::parse_class;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn formal(exprs: &[&str]) -> FormalType {
        FormalType::parse_all(exprs).unwrap()
    }

    /// Independent crossing oracle: sample Re(f_a − f_b) densely and count sign changes.
    fn sampled_crossings(t: &FormalType, eps: f64) -> usize {
        let strands: Vec<PuiseuxClass> = t.orbits().unwrap().into_iter().flat_map(|o| o.sheets).collect();
        let e = BigRational::from_float(eps).unwrap();
        let m = 20_000;
        let mut count = 0;
        for a in 0..strands.len() {
            for b in a + 1..strands.len() {
                let d = |th: f64| strands[a].evaluate_re(&e, th) - strands[b].evaluate_re(&e, th);
                let mut prev = d(1e-7);
                for i in 1..=m {
                    let cur = d(TAU * i as f64 / m as f64 + 1e-7);
                    if (prev < 0.0) != (cur < 0.0) {
                        count += 1;
                    }
                    prev = cur;
                }
            }
        }
        count
    }

    #[test]
    fn airy_front() {
        let t = formal(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]);
        let d = FrontDiagram::build(&t, &q(1, 10)).unwrap();
        assert_eq!(d.strands(), 2);
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.components().len(), 1);
        assert_eq!(sampled_crossings(&t, 0.1), 3);
        let turns: Vec<_> = d.crossings().iter().map(|c| c.angle.turns.clone()).collect();
        assert_eq!(turns, vec![q(1, 6), q(1, 2), q(5, 6)]);
        d.check().unwrap();
    }

    #[test]
    fn spherical_fronts() {
        // z^(-1) lies in the quotient, so N = 1 collapses to a duplicate.
        let t1 = formal(&["z^(-1)", "i*z^(-1)"]);
        assert!(matches!(
            FrontDiagram::build(&t1, &q(1, 10)),
            Err(FrontError::Puiseux(PuiseuxError::DuplicateClass(0, 1)))
        ));
        for n in 2..=6 {
            let f = format!("z^(-{n})");
            let g = format!("i*z^(-{n})");
            let t = formal(&[&f, &g]);
            let d = FrontDiagram::build(&t, &q(1, 10)).unwrap();
            assert_eq!(d.crossing_count(), 2 * n);
            assert_eq!(sampled_crossings(&t, 0.1), 2 * n);
            assert_eq!(d.components().len(), 2);
        }
    }

    #[test]
    fn zero_front() {
        let d = FrontDiagram::build(&formal(&["0"]), &q(1, 10)).unwrap();
        assert_eq!((d.strands(), d.crossing_count(), d.components().len()), (1, 0, 1));
        assert_eq!(d.sector_orders(), &[vec![0]]);
        let g = d.geometry();
        assert_eq!(g.regions().len(), 2);
        assert_eq!(g.segments().len(), 1);
    }

    #[test]
    fn build_errors() {
        let dup = formal(&["z^(-2)", "z^(-2) + z^(-1)"]);
        assert!(matches!(
            FrontDiagram::build(&dup, &q(1, 10)),
            Err(FrontError::Puiseux(PuiseuxError::DuplicateClass(0, 1)))
        ));
        assert_eq!(
            FrontDiagram::build(&formal(&["0"]), &q(0, 1)),
            Err(FrontError::InvalidEpsilon)
        );
        // Classes sharing a leading term cross along their first differing term.
        let tied = formal(&["z^(-3) + z^(-2)", "z^(-3)"]);
        let r = FrontDiagram::build(&tied, &q(1, 10));
        assert!(r.is_ok(), "{r:?}");
        // Three strands meeting at one angle.
        let triple = formal(&["z^(-2)", "-z^(-2)", "0"]);
        assert!(matches!(
            FrontDiagram::build(&triple, &q(1, 10)),
            Err(FrontError::DegenerateFront(_))
        ));
    }

    #[test]
    fn epsilon_stability() {
        for t in [
            formal(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]),
            formal(&["z^(-2)", "i*z^(-2)", "0"]),
            FormalType::new(parse_class("z^(-4/3)").unwrap().deck_conjugates()),
            FormalType::new(parse_class("z^(-5/2) + 3*z^(-3/2)").unwrap().deck_conjugates()),
        ] {
            let a = FrontDiagram::build(&t, &q(1, 10)).unwrap();
            let b = FrontDiagram::build(&t, &q(1, 20)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ramified_orbit_is_one_component() {
        // Four sheets of a monomial are pairwise symmetric: leading-order crossings coincide.
        let t = formal(&["z^(-5/4)", "-i*z^(-5/4)", "-z^(-5/4)", "i*z^(-5/4)"]);
        assert!(matches!(FrontDiagram::build(&t, &q(1, 10)), Err(FrontError::DegenerateFront(_))));
        let c3 = parse_class("z^(-4/3)").unwrap();
        let t3 = FormalType::new(c3.deck_conjugates());
        let d3 = FrontDiagram::build(&t3, &q(1, 10)).unwrap();
        assert_eq!(d3.components().len(), 1);
        assert_eq!(d3.crossing_count(), sampled_crossings(&t3, 0.1));
    }

    #[test]
    fn json_round_trip_and_check() {
        let t = formal(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]);
        let d = FrontDiagram::build(&t, &q(1, 10)).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.starts_with(r#"{"strands":2,"crossings":[{"angle_turns":"1/6","angle_offset_rad":0.0,"slot":0}"#));
        let back: FrontDiagram = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let broken = text.replace(r#""components":[[0,1]]"#, r#""components":[[0],[1]]"#);
        assert!(serde_json::from_str::<FrontDiagram>(&broken).is_err());
    }

    #[test]
    fn word_front_geometry() {
        // Two strands, two crossings: the middle gap splits into two faces.
        let d = FrontDiagram::from_word(2, &[0, 0]).unwrap();
        d.check().unwrap();
        assert_eq!(d.components().len(), 2);
        let g = d.geometry();
        assert_eq!(g.regions().len(), 4);
        assert_eq!(g.segments().len(), 4);
        let x0 = *g.crossing_local(0);
        assert_eq!((x0.bottom, x0.west, x0.east, x0.top), (0, 1, 2, 3));
        assert_eq!(g.segments()[x0.lower_west].below, x0.bottom);
        assert_eq!(g.segments()[x0.lower_west].above, x0.west);
        assert_eq!(g.segments()[x0.upper_east].below, x0.east);
        assert_eq!(g.segments()[x0.upper_east].above, x0.top);
        // Three strands: crossings at slots 0 and 1 leave gap 1 and 2 with one cut each.
        let d3 = FrontDiagram::from_word(3, &[0, 1, 0, 1]).unwrap();
        assert_eq!(d3.components().len(), 1);
        let g3 = d3.geometry();
        assert_eq!(g3.regions().len(), 1 + 2 + 2 + 1);
        assert_eq!(g3.segments().len(), 2 + 4 + 2);
    }

    proptest! {
        #[test]
        fn word_fronts_are_consistent(n in 1usize..5, word in proptest::collection::vec(0usize..4, 0..9)) {
            let word: Vec<usize> = word.into_iter().filter(|&k| k + 1 < n).collect();
            let d = FrontDiagram::from_word(n, &word).unwrap();
            prop_assert!(d.check().is_ok());
            let g = d.geometry();
            for (c, x) in g.crossing_locals().iter().enumerate() {
                let segs = g.segments();
                prop_assert_eq!(segs[x.lower_west].below, x.bottom);
                prop_assert_eq!(segs[x.lower_east].below, x.bottom);
                prop_assert_eq!(segs[x.upper_west].above, x.top);
                prop_assert_eq!(segs[x.upper_east].above, x.top);
                prop_assert_eq!(segs[x.lower_west].above, x.west);
                prop_assert_eq!(segs[x.upper_east].below, x.east);
                prop_assert_eq!(g.regions()[x.west].gap, word[c] + 1);
            }
            // Each crossing has four segment ends; untouched positions are closed loops.
            let untouched = (0..n).filter(|&q| !word.iter().any(|&k| k == q || k + 1 == q)).count();
            prop_assert_eq!(g.segments().len(), 2 * word.len() + untouched);
        }

        #[test]
        fn unramified_direction_spacing(k in 2i64..7, re in -3i64..4, im in -3i64..4) {
            prop_assume!(re != 0 || im != 0);
            let f = PuiseuxClass::from_pairs(&[(q(-k, 1), crate::Scalar::new(q(re, 1), q(im, 1)))]);
            let dirs = crate::puiseux::stokes_directions(&f, &PuiseuxClass::zero()).unwrap();
            prop_assert_eq!(dirs.len() as i64, 2 * k);
            for w in dirs.windows(2) {
                prop_assert!((w[1].radians() - w[0].radians() - PI / k as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let t = formal(&["(2/3)*z^(-3/2)", "(-2/3)*z^(-3/2)"]);
        let d = FrontDiagram::build(&t, &q(1, 10)).unwrap();
        let a = emit_svg(&d, &q(1, 10), 256);
        assert_eq!(a, emit_svg(&d, &q(1, 10), 256));
        assert_eq!(a.matches("class=\"strand\"").count(), 2);
        assert_eq!(a.matches("class=\"crossing\"").count(), 3);
        let z = FrontDiagram::build(&formal(&["0"]), &q(1, 10)).unwrap();
        let s = emit_svg(&z, &q(1, 10), 16);
        assert_eq!(s.matches("class=\"strand\"").count(), 1);
        assert!(s.contains(",200.000 "));
    }
}
