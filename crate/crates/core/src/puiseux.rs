//! Exponential factors `f ∈ C((z^{1/∞})) / z^{-1}·C[[z^{1/∞}]]` and formal types.
//!
//! Classes keep only their terms with exponent `< -1` (the canonical lift).
//! Coefficients live in `Q(i)` up to a root of unity: a [`Coeff`] is
//! `base · e^{2πi·twist}` with `twist ∈ [0, 1/4)`, which makes deck
//! conjugation exact for every ramification index.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{format_rational, parse_rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuiseuxError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("classes {0} and {1} of the formal type coincide")]
    DuplicateClass(usize, usize),
    #[error("class {index} is missing its deck conjugate {missing}")]
    IncompleteOrbit { index: usize, missing: String },
    #[error("the two classes are equal; a formal type lists each class once")]
    EqualClasses,
    #[error("invalid formal type: {0}")]
    Invalid(String),
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// An angle `2π·turns + offset_rad`. Closed-form angles keep `offset_rad = 0`
/// and are exact; the float offset only appears for arguments that are not
/// rational multiples of `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct Angle {
    pub turns: BigRational,
    pub offset_rad: f64,
}

impl Angle {
    pub fn from_turns(turns: BigRational) -> Self {
        Angle {
            turns,
            offset_rad: 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.offset_rad == 0.0
    }

    pub fn radians(&self) -> f64 {
        TAU * self.turns.to_f64().unwrap_or(f64::NAN) + self.offset_rad
    }

    pub fn add_turns(&self, t: &BigRational) -> Angle {
        Angle {
            turns: &self.turns + t,
            offset_rad: self.offset_rad,
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        Angle {
            turns: &self.turns + &other.turns,
            offset_rad: self.offset_rad + other.offset_rad,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Angle {
        Angle {
            turns: &self.turns * k,
            offset_rad: self.offset_rad * k.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Argument of a nonzero Gaussian rational. Exact exactly when the
    /// argument is a multiple of `π/4`, the only rational multiples of `π`
    /// attainable in `Q(i)`.
    pub fn arg_of(z: &Scalar) -> Angle {
        let (re, im) = (z.re(), z.im());
        let exact = |n: i64| Some(Angle::from_turns(q(n, 8)));
        let found = if im.is_zero() {
            if re.is_positive() {
                exact(0)
            } else {
                exact(4)
            }
        } else if re.is_zero() {
            if im.is_positive() {
                exact(2)
            } else {
                exact(6)
            }
        } else if re.abs() == im.abs() {
            match (re.is_positive(), im.is_positive()) {
                (true, true) => exact(1),
                (false, true) => exact(3),
                (false, false) => exact(5),
                (true, false) => exact(7),
            }
        } else {
            None
        };
        found.unwrap_or_else(|| {
            let (x, y) = z.to_f64_pair();
            Angle {
                turns: BigRational::zero(),
                offset_rad: y.atan2(x),
            }
        })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pi_mult = &self.turns * BigRational::from_integer(2.into());
        if self.is_exact() {
            write!(f, "{}π", format_rational(&pi_mult))
        } else {
            write!(f, "{}π{:+}", format_rational(&pi_mult), self.offset_rad)
        }
    }
}

/// `base · e^{2πi·twist}` with `base ≠ 0` and `twist ∈ [0, 1/4)`; this
/// representation is unique.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coeff {
    base: Scalar,
    twist: BigRational,
}

impl Coeff {
    pub fn new(base: Scalar, twist: BigRational) -> Self {
        let t = frac(&twist);
        let quarters = (&t * BigRational::from_integer(4.into())).floor();
        let k = quarters.to_integer().to_u32().unwrap_or(0);
        Coeff {
            base: base.mul_i_pow(k),
            twist: t - quarters / BigRational::from_integer(4.into()),
        }
    }

    pub fn exact(base: Scalar) -> Self {
        Coeff::new(base, BigRational::zero())
    }

    pub fn base(&self) -> &Scalar {
        &self.base
    }

    pub fn twist(&self) -> &BigRational {
        &self.twist
    }

    /// The value in `Q(i)` when it lies there.
    pub fn as_scalar(&self) -> Option<&Scalar> {
        self.twist.is_zero().then_some(&self.base)
    }

    pub fn arg(&self) -> Angle {
        Angle::arg_of(&self.base).add_turns(&self.twist)
    }

    pub fn abs_f64(&self) -> f64 {
        self.base.abs_f64()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let r = self.abs_f64();
        let a = self.arg().radians();
        (r * a.cos(), r * a.sin())
    }

    fn rotate(&self, turns: &BigRational) -> Coeff {
        Coeff::new(self.base.clone(), &self.twist + turns)
    }

    fn render(&self) -> String {
        if self.twist.is_zero() {
            format!("({})", self.base)
        } else {
            format!("({})*zeta({})", self.base, format_rational(&self.twist))
        }
    }
}

/// Argument of `a - b` where a missing side stands for zero. `None` when the
/// two coefficients agree.
fn difference_arg(a: Option<&Coeff>, b: Option<&Coeff>) -> Option<Angle> {
    match (a, b) {
        (None, None) => None,
        (Some(a), None) => Some(a.arg()),
        (None, Some(b)) => Some(b.arg().add_turns(&q(1, 2))),
        (Some(a), Some(b)) if a == b => None,
        (Some(a), Some(b)) if a.twist == b.twist => {
            Some(Angle::arg_of(&(&a.base - &b.base)).add_turns(&a.twist))
        }
        (Some(a), Some(b)) if a.base.norm_sqr() == b.base.norm_sqr() => {
            // r·e^{iα} − r·e^{iβ} = 2r·sin((α−β)/2)·e^{i((α+β)/2 + π/2)}
            let (alpha, beta) = (a.arg(), b.arg());
            let half = q(1, 2);
            let mid = alpha.add(&beta).scale(&half).add_turns(&q(1, 4));
            let delta = alpha.add(&beta.scale(&-BigRational::one())).scale(&half);
            let negative = if delta.is_exact() {
                frac(&delta.turns) > half
            } else {
                delta.radians().sin() < 0.0
            };
            Some(if negative { mid.add_turns(&half) } else { mid })
        }
        (Some(a), Some(b)) => {
            let (ax, ay) = a.to_f64_pair();
            let (bx, by) = b.to_f64_pair();
            Some(Angle {
                turns: BigRational::zero(),
                offset_rad: (ay - by).atan2(ax - bx),
            })
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub exp: BigRational,
    pub coeff: Coeff,
}

/// A normalized class: exponents `< -1`, strictly increasing, coefficients
/// nonzero. The empty class is `f = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PuiseuxClass {
    terms: Vec<Term>,
}

impl PuiseuxClass {
    pub fn zero() -> Self {
        PuiseuxClass::default()
    }

    /// Normalize arbitrary terms: drop exponents `≥ -1`, merge like terms and
    /// remove zeros. Like terms whose coefficients differ by a root of unity
    /// outside `Q(i)` cannot be merged exactly and are rejected.
    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Result<Self, PuiseuxError> {
        let cutoff = -BigRational::one();
        let mut merged: BTreeMap<BigRational, Option<Coeff>> = BTreeMap::new();
        for Term { exp, coeff } in terms {
            if exp >= cutoff {
                continue;
            }
            let slot = merged.entry(exp.clone()).or_insert(None);
            *slot = match slot.take() {
                None => Some(coeff),
                Some(prev) if prev.twist == coeff.twist => {
                    Some(Coeff::new(&prev.base + &coeff.base, prev.twist.clone()))
                }
                Some(_) => {
                    return Err(PuiseuxError::Invalid(format!(
                        "cannot merge coefficients of z^({}) differing by a root of unity",
                        format_rational(&exp)
                    )))
                }
            };
        }
        let terms = merged
            .into_iter()
            .filter_map(|(exp, c)| c.filter(|c| !c.base.is_zero()).map(|coeff| Term { exp, coeff }))
            .collect();
        Ok(PuiseuxClass { terms })
    }

    /// Exact-coefficient convenience constructor: `(exponent, coefficient)`.
    pub fn from_pairs(pairs: &[(BigRational, Scalar)]) -> Self {
        PuiseuxClass::from_terms(pairs.iter().map(|(e, c)| Term {
            exp: e.clone(),
            coeff: Coeff::exact(c.clone()),
        }))
        .expect("exact coefficients always merge")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least `l ≥ 1` with every exponent in `(1/l)·Z`.
    pub fn ramification(&self) -> usize {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, t| acc.lcm(t.exp.denom()))
            .to_usize()
            .expect("ramification fits in usize")
    }

    /// Conjugate under `z^{1/l} ↦ ζ_l^{sheet}·z^{1/l}`: the class continued
    /// `sheet` times around the origin.
    pub fn conjugate(&self, sheet: usize) -> PuiseuxClass {
        let s = BigRational::from_integer(sheet.into());
        PuiseuxClass {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exp: t.exp.clone(),
                    coeff: t.coeff.rotate(&(&t.exp * &s)),
                })
                .collect(),
        }
    }

    /// The deck-transformation orbit, sheet `s` at index `s`.
    pub fn deck_conjugates(&self) -> Vec<PuiseuxClass> {
        (0..self.ramification()).map(|s| self.conjugate(s)).collect()
    }

    /// `Re f(ε·e^{iθ})` on the branch where `z^{p} = ε^{p}·e^{ipθ}`. Floating
    /// point; for ordering and plotting only.
    pub fn evaluate_re(&self, epsilon: &BigRational, theta: f64) -> f64 {
        let eps = epsilon.to_f64().unwrap_or(f64::NAN);
        self.terms
            .iter()
            .map(|t| {
                let e = t.exp.to_f64().unwrap_or(f64::NAN);
                t.coeff.abs_f64() * eps.powf(e) * (t.coeff.arg().radians() + e * theta).cos()
            })
            .sum()
    }

    /// Exponent and argument of the leading (most negative exponent) term of
    /// `self − other`; `None` if the classes are equal.
    pub fn leading_difference(&self, other: &PuiseuxClass) -> Option<(BigRational, Angle)> {
        let mut exps: Vec<&BigRational> = self.terms.iter().chain(&other.terms).map(|t| &t.exp).collect();
        exps.sort();
        exps.dedup();
        exps.into_iter().find_map(|e| {
            let a = self.terms.iter().find(|t| &t.exp == e).map(|t| &t.coeff);
            let b = other.terms.iter().find(|t| &t.exp == e).map(|t| &t.coeff);
            difference_arg(a, b).map(|ang| (e.clone(), ang))
        })
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|t| format!("{}*z^({})", t.coeff.render(), format_rational(&t.exp)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for PuiseuxClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for PuiseuxClass {
    type Err = PuiseuxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_class(s)
    }
}

// ---------------------------------------------------------------------------
// Expression parser
//
//   expr     := [sign] term (('+' | '-') term)*
//   term     := factor ('*' factor)*
//   factor   := number | 'i' | 'z' ['^' exponent] | 'zeta(' rational ')' | '(' expr ')'
//   number   := digits ['/' digits] ['i']
//   exponent := [sign] digits ['/' digits] | '(' [sign] digits ['/' digits] ')'

/// Sum of monomials keyed by (exponent, twist).
type Poly = BTreeMap<(BigRational, BigRational), Scalar>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, PuiseuxError> {
        Err(PuiseuxError::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), PuiseuxError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn digits(&mut self) -> Result<BigInt, PuiseuxError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn unsigned_rational(&mut self) -> Result<BigRational, PuiseuxError> {
        let num = self.digits()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.digits()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    fn signed_rational(&mut self) -> Result<BigRational, PuiseuxError> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let r = self.unsigned_rational()?;
        Ok(if neg { -r } else { r })
    }

    fn expr(&mut self) -> Result<Poly, PuiseuxError> {
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = Poly::new();
        let first = self.term()?;
        add_into(&mut acc, first, negate);
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                add_into(&mut acc, t, false);
            } else if self.eat(b'-') {
                let t = self.term()?;
                add_into(&mut acc, t, true);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PuiseuxError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = multiply(&acc, &rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PuiseuxError> {
        let zero = BigRational::zero();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(monomial(zero.clone(), zero, Scalar::i()))
            }
            Some(b'z') if self.src[self.pos..].starts_with(b"zeta") => {
                self.pos += 4;
                self.expect(b'(')?;
                let t = self.signed_rational()?;
                self.expect(b')')?;
                Ok(monomial(zero, frac(&t), Scalar::one()))
            }
            Some(b'z') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    if self.eat(b'(') {
                        let e = self.signed_rational()?;
                        self.expect(b')')?;
                        e
                    } else {
                        self.signed_rational()?
                    }
                } else {
                    BigRational::one()
                };
                Ok(monomial(exp, zero, Scalar::one()))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.unsigned_rational()?;
                let value = if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    Scalar::new(BigRational::zero(), r)
                } else {
                    Scalar::from_rational(r)
                };
                Ok(monomial(zero.clone(), zero, value))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn monomial(exp: BigRational, twist: BigRational, c: Scalar) -> Poly {
    let mut p = Poly::new();
    p.insert((exp, twist), c);
    p
}

fn add_into(acc: &mut Poly, p: Poly, negate: bool) {
    for (k, v) in p {
        let v = if negate { -v } else { v };
        let slot = acc.entry(k).or_default();
        *slot += &v;
    }
}

fn multiply(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((ea, ta), ca) in a {
        for ((eb, tb), cb) in b {
            let coeff = Coeff::new(ca * cb, ta + tb);
            let slot = out.entry((ea + eb, coeff.twist.clone())).or_default();
            *slot += &coeff.base;
        }
    }
    out
}

/// Parse and normalize an exponential factor, e.g. `"(2/3)*z^(-3/2) - z^(-1) + 5"`.
pub fn parse_class(text: &str) -> Result<PuiseuxClass, PuiseuxError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let poly = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    PuiseuxClass::from_terms(poly.into_iter().map(|((exp, twist), c)| Term {
        exp,
        coeff: Coeff::new(c, twist),
    }))
}

// ---------------------------------------------------------------------------
// Formal types

/// One deck orbit: `sheets[s]` is the representative conjugated `s` times.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub sheets: Vec<PuiseuxClass>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FormalType {
    pub classes: Vec<PuiseuxClass>,
}

impl FormalType {
    pub fn new(classes: Vec<PuiseuxClass>) -> Self {
        FormalType { classes }
    }

    pub fn parse_all<S: AsRef<str>>(exprs: &[S]) -> Result<Self, PuiseuxError> {
        exprs
            .iter()
            .map(|e| parse_class(e.as_ref()))
            .collect::<Result<Vec<_>, _>>()
            .map(FormalType::new)
    }

    pub fn contains_zero(&self) -> bool {
        self.classes.iter().any(PuiseuxClass::is_zero)
    }

    /// Group the classes into complete deck orbits, representatives taken in
    /// input order.
    pub fn orbits(&self) -> Result<Vec<Orbit>, PuiseuxError> {
        for (i, a) in self.classes.iter().enumerate() {
            if let Some(j) = self.classes[i + 1..].iter().position(|b| a == b) {
                return Err(PuiseuxError::DuplicateClass(i, i + 1 + j));
            }
        }
        let mut used = vec![false; self.classes.len()];
        let mut orbits = Vec::new();
        for i in 0..self.classes.len() {
            if used[i] {
                continue;
            }
            let sheets = self.classes[i].deck_conjugates();
            for sheet in &sheets {
                match self.classes.iter().position(|c| c == sheet) {
                    Some(j) => used[j] = true,
                    None => {
                        return Err(PuiseuxError::IncompleteOrbit {
                            index: i,
                            missing: sheet.render(),
                        })
                    }
                }
            }
            orbits.push(Orbit { sheets });
        }
        Ok(orbits)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: String,
    coeff: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    terms: Vec<TermJson>,
}

impl Serialize for PuiseuxClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ClassJson {
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    exp: format_rational(&t.exp),
                    coeff: t.coeff.base.clone(),
                    twist: (!t.coeff.twist.is_zero()).then(|| format_rational(&t.coeff.twist)),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuiseuxClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ClassJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let exp = parse_rational(&t.exp).map_err(D::Error::custom)?;
            let twist = match t.twist {
                Some(tw) => parse_rational(&tw).map_err(D::Error::custom)?,
                None => BigRational::zero(),
            };
            terms.push(Term {
                exp,
                coeff: Coeff::new(t.coeff, twist),
            });
        }
        PuiseuxClass::from_terms(terms).map_err(D::Error::custom)
    }
}

/// The 2k solutions on `[0, 2πl)` of `cos(arg c − (k/l)·θ) = 0`, where
/// `c·z^{−k/l}` leads `f − g`: `θ = (l/k)·(arg c − π/2 + mπ)`.
pub fn stokes_directions(f: &PuiseuxClass, g: &PuiseuxClass) -> Result<Vec<Angle>, PuiseuxError> {
    let (exp, arg) = f
        .leading_difference(g)
        .ok_or(PuiseuxError::EqualClasses)?;
    let rate = -exp; // k/l > 1
    let cover = BigRational::from_integer(rate.denom().clone());
    Ok(crossing_angles(&rate, &arg, &cover))
}

/// Solutions of `cos(arg − rate·θ) = 0` with `θ ∈ [0, 2π·cover)`, ascending.
pub(crate) fn crossing_angles(rate: &BigRational, arg: &Angle, cover: &BigRational) -> Vec<Angle> {
    // θ(m) = (arg − 1/4 turn)/rate + m·step, step = 1/(2·rate) turns.
    let base = arg.add_turns(&-q(1, 4)).scale(&rate.recip());
    let step = (BigRational::from_integer(2.into()) * rate).recip();
    let offset_turns = BigRational::from_float(base.offset_rad / TAU).unwrap_or_default();
    let approx = &base.turns + offset_turns;
    let lower: BigInt = (-&approx / &step).floor().to_integer() - 1;
    let count: BigInt = (cover / &step).ceil().to_integer() + 3;
    let cover_f = cover.to_f64().unwrap_or(f64::NAN);
    let mut out = Vec::new();
    let mut m = lower;
    let mut left = count;
    while left > BigInt::zero() {
        let th = base.add_turns(&(&step * BigRational::from_integer(m.clone())));
        let inside = if th.is_exact() {
            !th.turns.is_negative() && &th.turns < cover
        } else {
            let t = th.radians() / TAU;
            (0.0..cover_f).contains(&t)
        };
        if inside {
            out.push(th);
        }
        m += 1;
        left -= 1;
    }
    out
}
