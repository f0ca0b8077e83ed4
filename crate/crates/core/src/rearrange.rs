//! Horizontal rearrangement of polyhedral sets in the closed right
//! half-plane.
//!
//! A [`SlabSet`] stores the upper half `y >= 0` of a set symmetric about the
//! x-axis. Between `y_lo` and `y_hi` each slab holds finitely many intervals
//! `(u_k(y), v_k(y))` whose endpoints are affine in `y`. All coordinates are
//! exact rationals, so areas and traces are exact; lengths of slanted edges
//! are square roots and are returned as `f64`. Every measure reported here is
//! for the full, mirrored set.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Alpha;

pub type Rational = BigRational;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a decimal with optional exponent, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if shift >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A function of `y` on a slab, affine and given by its values at the
/// slab's bottom and top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub lo: Rational,
    pub hi: Rational,
}

impl Affine {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Affine { lo, hi }
    }

    pub fn constant(c: Rational) -> Self {
        Affine { lo: c.clone(), hi: c }
    }

    pub fn is_constant(&self) -> bool {
        self.lo == self.hi
    }

    /// Value at `y_lo + s (y_hi - y_lo)`.
    pub fn at(&self, s: &Rational) -> Rational {
        &self.lo + (&self.hi - &self.lo) * s
    }

    fn add(&self, other: &Affine) -> Affine {
        Affine::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    fn sub(&self, other: &Affine) -> Affine {
        Affine::new(&self.lo - &other.lo, &self.hi - &other.hi)
    }

    fn shift(&self, c: &Rational) -> Affine {
        Affine::new(&self.lo + c, &self.hi + c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub u: Affine,
    pub v: Affine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slab {
    pub y_lo: Rational,
    pub y_hi: Rational,
    pub intervals: Vec<Interval>,
}

impl Slab {
    pub fn height(&self) -> Rational {
        &self.y_hi - &self.y_lo
    }

    /// The section at the bottom (`top = false`) or top of the slab as a
    /// sorted list of disjoint open intervals, touching ones merged.
    fn section(&self, top: bool) -> Vec<(Rational, Rational)> {
        let pick = |a: &Affine| if top { a.hi.clone() } else { a.lo.clone() };
        let mut out: Vec<(Rational, Rational)> = Vec::new();
        for iv in &self.intervals {
            let (a, b) = (pick(&iv.u), pick(&iv.v));
            if a >= b {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
        out
    }
}

/// The upper half of a set symmetric about the x-axis; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlabSet {
    slabs: Vec<Slab>,
}

impl SlabSet {
    /// Validates and normalizes: intervals of zero width are dropped,
    /// intervals touching along a whole edge are merged, and empty slabs are
    /// removed.
    pub fn new(slabs: Vec<Slab>) -> Result<Self> {
        let zero = Rational::zero();
        let mut prev_top: Option<Rational> = None;
        let mut out = Vec::with_capacity(slabs.len());
        for (i, slab) in slabs.into_iter().enumerate() {
            if slab.y_lo < zero || slab.y_lo >= slab.y_hi {
                return Err(Error::InvalidInput(format!(
                    "slab {i} must satisfy 0 <= y_lo < y_hi, got [{}, {}]",
                    format_rational(&slab.y_lo),
                    format_rational(&slab.y_hi)
                )));
            }
            if let Some(top) = &prev_top {
                if &slab.y_lo < top {
                    return Err(Error::InvalidInput(format!("slab {i} overlaps or precedes its predecessor")));
                }
            }
            prev_top = Some(slab.y_hi.clone());
            let mut intervals: Vec<Interval> = Vec::new();
            let mut right_end: Option<Affine> = None;
            for (k, iv) in slab.intervals.into_iter().enumerate() {
                if iv.u.lo < zero || iv.u.hi < zero {
                    return Err(Error::InvalidInput(format!("slab {i}, interval {k} leaves the right half-plane")));
                }
                if iv.u.lo > iv.v.lo || iv.u.hi > iv.v.hi {
                    return Err(Error::InvalidInput(format!("slab {i}, interval {k} has u > v")));
                }
                if iv.u.lo > iv.u.hi || iv.v.lo < iv.v.hi {
                    return Err(Error::InvalidInput(format!(
                        "slab {i}, interval {k}: u must be non-decreasing and v non-increasing in y"
                    )));
                }
                if let Some(prev) = &right_end {
                    if prev.lo > iv.u.lo || prev.hi > iv.u.hi {
                        return Err(Error::InvalidInput(format!(
                            "slab {i}, interval {k} overlaps or precedes its predecessor"
                        )));
                    }
                }
                right_end = Some(iv.v.clone());
                if iv.u == iv.v {
                    continue;
                }
                match intervals.last_mut() {
                    Some(last) if last.v == iv.u => last.v = iv.v,
                    _ => intervals.push(iv),
                }
            }
            if !intervals.is_empty() {
                out.push(Slab {
                    y_lo: slab.y_lo,
                    y_hi: slab.y_hi,
                    intervals,
                });
            }
        }
        Ok(SlabSet { slabs: out })
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    /// Builds from rows `(y_lo, y_hi, [[u_lo, u_hi, v_lo, v_hi], ...])`.
    pub fn from_rows(rows: &[(Rational, Rational, Vec<[Rational; 4]>)]) -> Result<Self> {
        SlabSet::new(
            rows.iter()
                .map(|(lo, hi, ivs)| Slab {
                    y_lo: lo.clone(),
                    y_hi: hi.clone(),
                    intervals: ivs
                        .iter()
                        .map(|[a, b, c, d]| Interval {
                            u: Affine::new(a.clone(), b.clone()),
                            v: Affine::new(c.clone(), d.clone()),
                        })
                        .collect(),
                })
                .collect(),
        )
    }

    /// Rectangles with constant intervals, from `f64` data converted exactly.
    pub fn from_boxes(rows: &[(f64, f64, &[(f64, f64)])]) -> Result<Self> {
        let exact = |x: f64| {
            Rational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite coordinate {x}")))
        };
        let mut slabs = Vec::new();
        for (lo, hi, ivs) in rows {
            let mut intervals = Vec::new();
            for &(a, b) in ivs.iter() {
                intervals.push(Interval {
                    u: Affine::constant(exact(a)?),
                    v: Affine::constant(exact(b)?),
                });
            }
            slabs.push(Slab {
                y_lo: exact(*lo)?,
                y_hi: exact(*hi)?,
                intervals,
            });
        }
        SlabSet::new(slabs)
    }

    /// Exact Lebesgue measure of the full set.
    pub fn area(&self) -> Rational {
        let mut total = Rational::zero();
        for slab in &self.slabs {
            for iv in &slab.intervals {
                let w = iv.v.sub(&iv.u);
                total += slab.height() * (&w.lo + &w.hi) / q(2);
            }
        }
        total * q(2)
    }

    /// Sections of the set seen from just below and just above each slab
    /// boundary, excluding the mirrored boundary `y = 0`.
    fn junctions(&self) -> Vec<(Vec<(Rational, Rational)>, Vec<(Rational, Rational)>)> {
        let mut out = Vec::new();
        let n = self.slabs.len();
        for i in 0..n {
            let slab = &self.slabs[i];
            let below = if i > 0 && self.slabs[i - 1].y_hi == slab.y_lo {
                self.slabs[i - 1].section(true)
            } else if slab.y_lo.is_zero() {
                // mirrored copy continues the section across the axis
                slab.section(false)
            } else {
                Vec::new()
            };
            out.push((below, slab.section(false)));
            let contiguous = i + 1 < n && self.slabs[i + 1].y_lo == slab.y_hi;
            if !contiguous {
                out.push((slab.section(true), Vec::new()));
            }
        }
        out
    }

    /// Total length of the horizontal edges of the upper half.
    fn closures(&self) -> Rational {
        self.junctions()
            .iter()
            .map(|(a, b)| symmetric_difference(a, b))
            .fold(Rational::zero(), |s, x| s + x)
    }

    /// `(lengths of slanted or vertical edges off the axis, length on the
    /// axis)` for the upper half.
    fn side_lengths(&self) -> (f64, Rational) {
        let mut open = 0.0;
        let mut trace = Rational::zero();
        for slab in &self.slabs {
            let h = slab.height();
            for (k, iv) in slab.intervals.iter().enumerate() {
                for (edge, is_left) in [(&iv.u, true), (&iv.v, false)] {
                    if is_left && k == 0 && edge.lo.is_zero() && edge.hi.is_zero() {
                        trace += h.clone();
                        continue;
                    }
                    let d = &edge.hi - &edge.lo;
                    open += to_f64(&(&h * &h + &d * &d)).sqrt();
                }
            }
        }
        (open, trace)
    }

    /// Euclidean perimeter of the full set.
    pub fn perimeter(&self) -> f64 {
        self.perimeter_open() + to_f64(&self.trace())
    }

    /// Perimeter inside the open half-plane `x > 0`.
    pub fn perimeter_open(&self) -> f64 {
        let (sides, _) = self.side_lengths();
        2.0 * (sides + to_f64(&self.closures()))
    }

    /// Length of the boundary on the axis `x = 0`.
    pub fn trace(&self) -> Rational {
        self.side_lengths().1 * q(2)
    }

    /// Measure of the heights whose section is not a single interval.
    pub fn noninterval_measure(&self) -> Rational {
        self.slabs
            .iter()
            .filter(|s| s.intervals.len() > 1)
            .map(|s| s.height())
            .fold(Rational::zero(), |a, b| a + b)
            * q(2)
    }

    /// Checks that the full set is y-Schwarz symmetric: every section is
    /// contained in the sections closer to the axis.
    pub fn validate_schwarz(&self) -> Result<()> {
        let Some(first) = self.slabs.first() else {
            return Ok(());
        };
        if !first.y_lo.is_zero() {
            return Err(Error::NotSchwarzSymmetric(format!(
                "the section at y = 0 is empty but the set reaches y = {}",
                format_rational(&first.y_lo)
            )));
        }
        for pair in self.slabs.windows(2) {
            if pair[0].y_hi != pair[1].y_lo {
                return Err(Error::NotSchwarzSymmetric(format!(
                    "empty sections between y = {} and y = {}",
                    format_rational(&pair[0].y_hi),
                    format_rational(&pair[1].y_lo)
                )));
            }
            let below = pair[0].section(true);
            let above = pair[1].section(false);
            if !contains(&below, &above) {
                return Err(Error::NotSchwarzSymmetric(format!(
                    "the section above y = {} is not contained in the one below",
                    format_rational(&pair[1].y_lo)
                )));
            }
        }
        Ok(())
    }

    /// `M_alpha` of the set read in transformed coordinates: the integral
    /// of `((alpha+1) x)^(-alpha/(alpha+1))`.
    pub fn weighted_area(&self, alpha: Alpha) -> f64 {
        let a = alpha.value();
        if a == 0.0 {
            return to_f64(&self.area());
        }
        let w = |x: f64| ((a + 1.0) * x).powf(1.0 / (a + 1.0));
        let big = |x: f64| ((a + 1.0) * x).powf((a + 2.0) / (a + 1.0)) / (a + 2.0);
        // mean of w over the edge from x0 to x1
        let edge = |x0: f64, x1: f64| {
            let dx = x1 - x0;
            if dx == 0.0 {
                w(x0)
            } else if x0.min(x1) > 2.0 * dx.abs() {
                GL8.iter()
                    .map(|&(t, wt)| 0.5 * wt * (w(x0 + dx * 0.5 * (1.0 - t)) + w(x0 + dx * 0.5 * (1.0 + t))))
                    .sum()
            } else {
                (big(x1) - big(x0)) / dx
            }
        };
        let mut total = 0.0;
        for slab in &self.slabs {
            let h = to_f64(&slab.height());
            for iv in &slab.intervals {
                let mean = edge(to_f64(&iv.v.lo), to_f64(&iv.v.hi)) - edge(to_f64(&iv.u.lo), to_f64(&iv.u.hi));
                total += h * mean;
            }
        }
        2.0 * total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RawSlabSet::from(self)).expect("slab sets serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawSlabSet = serde_json::from_str(s)?;
        raw.try_into()
    }
}

impl fmt::Display for SlabSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for slab in &self.slabs {
            write!(f, "[{}, {}]:", format_rational(&slab.y_lo), format_rational(&slab.y_hi))?;
            for iv in &slab.intervals {
                write!(
                    f,
                    " ({}..{}, {}..{})",
                    format_rational(&iv.u.lo),
                    format_rational(&iv.u.hi),
                    format_rational(&iv.v.lo),
                    format_rational(&iv.v.hi)
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

fn overlap(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Rational {
    let (mut i, mut j) = (0, 0);
    let mut total = Rational::zero();
    while i < a.len() && j < b.len() {
        let lo = (&a[i].0).max(&b[j].0);
        let hi = (&a[i].1).min(&b[j].1);
        if lo < hi {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

fn measure(a: &[(Rational, Rational)]) -> Rational {
    a.iter().map(|(x, y)| y - x).fold(Rational::zero(), |s, x| s + x)
}

fn symmetric_difference(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Rational {
    measure(a) + measure(b) - overlap(a, b) * q(2)
}

fn contains(outer: &[(Rational, Rational)], inner: &[(Rational, Rational)]) -> bool {
    overlap(outer, inner) == measure(inner)
}

#[derive(Debug, Clone)]
struct RationalRepr(Rational);

impl Serialize for RationalRepr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalRepr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(t) => t,
            Raw::Number(x) => format!("{x:e}"),
        };
        parse_rational(&text).map(RationalRepr).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    u_lo: RationalRepr,
    u_hi: RationalRepr,
    v_lo: RationalRepr,
    v_hi: RationalRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlab {
    y_lo: RationalRepr,
    y_hi: RationalRepr,
    intervals: Vec<RawInterval>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlabSet {
    slabs: Vec<RawSlab>,
}

impl From<&SlabSet> for RawSlabSet {
    fn from(s: &SlabSet) -> Self {
        let r = |x: &Rational| RationalRepr(x.clone());
        RawSlabSet {
            slabs: s
                .slabs
                .iter()
                .map(|slab| RawSlab {
                    y_lo: r(&slab.y_lo),
                    y_hi: r(&slab.y_hi),
                    intervals: slab
                        .intervals
                        .iter()
                        .map(|iv| RawInterval {
                            u_lo: r(&iv.u.lo),
                            u_hi: r(&iv.u.hi),
                            v_lo: r(&iv.v.lo),
                            v_hi: r(&iv.v.hi),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<RawSlabSet> for SlabSet {
    type Error = Error;

    fn try_from(raw: RawSlabSet) -> Result<Self> {
        SlabSet::new(
            raw.slabs
                .into_iter()
                .map(|s| Slab {
                    y_lo: s.y_lo.0,
                    y_hi: s.y_hi.0,
                    intervals: s
                        .intervals
                        .into_iter()
                        .map(|iv| Interval {
                            u: Affine::new(iv.u_lo.0, iv.u_hi.0),
                            v: Affine::new(iv.v_lo.0, iv.v_hi.0),
                        })
                        .collect(),
                })
                .collect(),
        )
    }
}

/// A function of `y >= 0` that is affine on each slab.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAffine {
    pub pieces: Vec<(Rational, Rational, Affine)>,
}

impl PiecewiseAffine {
    /// Value at `y`, taking the piece below at shared endpoints; `None`
    /// outside the pieces.
    pub fn eval(&self, y: &Rational) -> Option<Rational> {
        self.pieces.iter().find(|(lo, hi, _)| lo <= y && y <= hi).map(|(lo, hi, f)| {
            let s = (y - lo) / (hi - lo);
            f.at(&s)
        })
    }

    /// The limit from above at `y`.
    pub fn eval_right(&self, y: &Rational) -> Option<Rational> {
        self.pieces.iter().find(|(lo, hi, _)| lo <= y && y < hi).map(|(lo, hi, f)| {
            let s = (y - lo) / (hi - lo);
            f.at(&s)
        })
    }
}

/// `(lambda, phi)`: the length and the left end of each horizontal section.
pub fn slice_functions(s: &SlabSet) -> (PiecewiseAffine, PiecewiseAffine) {
    let mut lambda = Vec::new();
    let mut phi = Vec::new();
    for slab in &s.slabs {
        let len = slab
            .intervals
            .iter()
            .fold(Affine::constant(Rational::zero()), |acc, iv| acc.add(&iv.v.sub(&iv.u)));
        lambda.push((slab.y_lo.clone(), slab.y_hi.clone(), len));
        phi.push((slab.y_lo.clone(), slab.y_hi.clone(), slab.intervals[0].u.clone()));
    }
    (PiecewiseAffine { pieces: lambda }, PiecewiseAffine { pieces: phi })
}

/// The translation `tau`, constant on each slab: the sum of the jumps
/// `((phi(d+) - phi(d)) - (lambda(d) - lambda(d+)))^+` over the slab
/// boundaries `d` below it.
pub fn translation_function(s: &SlabSet) -> Vec<(Rational, Rational, Rational)> {
    let (lambda, phi) = slice_functions(s);
    let mut tau = Rational::zero();
    let mut out = Vec::with_capacity(s.slabs.len());
    for i in 0..s.slabs.len() {
        if i > 0 {
            let (prev, cur) = (&phi.pieces[i - 1].2, &phi.pieces[i].2);
            let (lprev, lcur) = (&lambda.pieces[i - 1].2, &lambda.pieces[i].2);
            let jump = (&cur.lo - &prev.hi) - (&lprev.hi - &lcur.lo);
            if jump.is_positive() {
                tau += jump;
            }
        }
        out.push((s.slabs[i].y_lo.clone(), s.slabs[i].y_hi.clone(), tau.clone()));
    }
    out
}

/// The horizontal rearrangement `{0 < x - phi + tau < lambda}` of a
/// y-Schwarz symmetric set.
pub fn rearrange(s: &SlabSet) -> Result<SlabSet> {
    s.validate_schwarz()?;
    Ok(rearrange_unchecked(s))
}

/// The rearrangement formula applied without checking that the sections
/// are nested.
pub fn rearrange_unchecked(s: &SlabSet) -> SlabSet {
    let (lambda, phi) = slice_functions(s);
    let tau = translation_function(s);
    let slabs = s
        .slabs
        .iter()
        .enumerate()
        .map(|(i, slab)| {
            let u = phi.pieces[i].2.shift(&-tau[i].2.clone());
            let v = u.add(&lambda.pieces[i].2);
            Slab {
                y_lo: slab.y_lo.clone(),
                y_hi: slab.y_hi.clone(),
                intervals: vec![Interval { u, v }],
            }
        })
        .collect();
    SlabSet::new(slabs).expect("rearranged slabs are valid")
}

pub fn perimeter(s: &SlabSet) -> f64 {
    s.perimeter()
}

pub fn perimeter_open(s: &SlabSet) -> f64 {
    s.perimeter_open()
}

pub fn trace(s: &SlabSet) -> f64 {
    to_f64(&s.trace())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `(P(E) - P(E*)) P(E) >= L^1(D)^2`, `D` the heights with more than one
/// interval.
pub fn quantitative_gap_check(before: &SlabSet, after: &SlabSet) -> GapCheck {
    let p = before.perimeter();
    let lhs = (p - after.perimeter()) * p;
    let d = to_f64(&before.noninterval_measure());
    let rhs = d * d;
    GapCheck { lhs, rhs, holds: lhs >= rhs }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementaryCheck {
    pub lhs: f64,
    /// `(N - 1) / (S + T)`.
    pub rhs1: f64,
    /// `(N - 1) / (2 S)`.
    pub rhs2: f64,
}

/// `S - T` with `S = sum sqrt(1 + |a_k|^2)`, `T = sqrt(1 + |sum a_k|^2)`,
/// and its two lower bounds.
///
/// The difference is evaluated as `(S^2 - T^2)/(S + T)` with
/// `S^2 - T^2 = N - 1 + 2 sum_{h<k} (sqrt((1+|a_h|^2)(1+|a_k|^2)) - <a_h, a_k>)`
/// so that it stays accurate when `S` and `T` nearly agree.
pub fn elementary_inequality_check(a: &[[f64; 2]]) -> Result<ElementaryCheck> {
    if a.is_empty() {
        return Err(Error::InvalidInput("need at least one vector".into()));
    }
    let n = a.len() as f64;
    let norm2 = |v: &[f64; 2]| v[0] * v[0] + v[1] * v[1];
    let s: f64 = a.iter().map(|v| (1.0 + norm2(v)).sqrt()).sum();
    let sum = a.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
    let t = (1.0 + norm2(&sum)).sqrt();
    let mut squares = n - 1.0;
    for h in 0..a.len() {
        for k in h + 1..a.len() {
            let (x, y) = (1.0 + norm2(&a[h]), 1.0 + norm2(&a[k]));
            let dot = a[h][0] * a[k][0] + a[h][1] * a[k][1];
            let root = (x * y).sqrt();
            let term = if dot > 0.0 {
                let cross = a[h][0] * a[k][1] - a[h][1] * a[k][0];
                // x y - dot^2 = 1 + |a_h|^2 + |a_k|^2 + cross^2
                (1.0 + norm2(&a[h]) + norm2(&a[k]) + cross * cross) / (root + dot)
            } else {
                root - dot
            };
            squares += 2.0 * term;
        }
    }
    Ok(ElementaryCheck {
        lhs: squares / (s + t),
        rhs1: (n - 1.0) / (s + t),
        rhs2: (n - 1.0) / (2.0 * s),
    })
}

/// Measure of `{s in [0, 1] : a + b s > 0}`-type constraints, as the
/// interval of `s` where `lo(s) < xi < hi(s)`.
fn section_height(iv: &Interval, xi: &Rational) -> Rational {
    let zero = Rational::zero();
    let one = Rational::one();
    let mut lo = zero.clone();
    let mut hi = one.clone();
    // u(s) < xi
    let du = &iv.u.hi - &iv.u.lo;
    if du.is_zero() {
        if iv.u.lo >= *xi {
            return zero;
        }
    } else {
        let s0 = (xi - &iv.u.lo) / &du;
        if du.is_positive() {
            hi = hi.min(s0);
        } else {
            lo = lo.max(s0);
        }
    }
    // v(s) > xi
    let dv = &iv.v.hi - &iv.v.lo;
    if dv.is_zero() {
        if iv.v.lo <= *xi {
            return zero;
        }
    } else {
        let s0 = (xi - &iv.v.lo) / &dv;
        if dv.is_positive() {
            lo = lo.max(s0);
        } else {
            hi = hi.min(s0);
        }
    }
    if hi > lo {
        hi - lo
    } else {
        zero
    }
}

/// Length of `{y >= 0 : (xi, y) in E}`.
fn vertical_section(s: &SlabSet, xi: &Rational) -> Rational {
    let mut total = Rational::zero();
    for slab in &s.slabs {
        let h = slab.height();
        for iv in &slab.intervals {
            total += section_height(iv, xi) * &h;
        }
    }
    total
}

/// Steiner symmetrization in the y-direction: every vertical section is
/// replaced by the centered interval of the same length.
///
/// The section length `ell(xi)` is affine between consecutive endpoint
/// values of the input, with possible jumps there; it is read off exactly
/// at two interior points of each piece. The output is rebuilt slab by slab
/// between consecutive values taken by `ell` at the breakpoints.
pub fn steiner_symmetrize_vertical(s: &SlabSet) -> SlabSet {
    let mut breaks: Vec<Rational> = vec![Rational::zero()];
    for slab in &s.slabs {
        for iv in &slab.intervals {
            breaks.extend([iv.u.lo.clone(), iv.u.hi.clone(), iv.v.lo.clone(), iv.v.hi.clone()]);
        }
    }
    breaks.sort();
    breaks.dedup();
    // (b_i, b_{i+1}, ell(b_i+), ell(b_{i+1}-))
    let pieces: Vec<(Rational, Rational, Rational, Rational)> = breaks
        .windows(2)
        .map(|w| {
            let width = &w[1] - &w[0];
            let p1 = &w[0] + &width / q(3);
            let p2 = &w[0] + &width * q(2) / q(3);
            let (l1, l2) = (vertical_section(s, &p1), vertical_section(s, &p2));
            let start = &l1 * q(2) - &l2;
            let end = &l2 * q(2) - &l1;
            (w[0].clone(), w[1].clone(), start, end)
        })
        .collect();
    let mut levels: Vec<Rational> = vec![Rational::zero()];
    for (_, _, a, b) in &pieces {
        levels.push(a.clone());
        levels.push(b.clone());
    }
    levels.retain(|l| !l.is_negative());
    levels.sort();
    levels.dedup();

    let mut slabs = Vec::new();
    for band in levels.windows(2) {
        let (e0, e1) = (&band[0], &band[1]);
        let mut intervals: Vec<Interval> = Vec::new();
        for (b0, b1, a, b) in &pieces {
            let (lo_val, hi_val) = if a < b { (a, b) } else { (b, a) };
            let iv = if hi_val <= e0 {
                continue;
            } else if lo_val >= e1 {
                Interval {
                    u: Affine::constant(b0.clone()),
                    v: Affine::constant(b1.clone()),
                }
            } else {
                let width = b1 - b0;
                let crossing = |eta: &Rational| -> Rational {
                    match a.cmp(b) {
                        Ordering::Greater => b0 + (a - eta) * &width / (a - b),
                        _ => b0 + (eta - a) * &width / (b - a),
                    }
                };
                let moving = Affine::new(crossing(e0), crossing(e1));
                if a > b {
                    Interval {
                        u: Affine::constant(b0.clone()),
                        v: moving,
                    }
                } else {
                    Interval {
                        u: moving,
                        v: Affine::constant(b1.clone()),
                    }
                }
            };
            match intervals.last_mut() {
                Some(last) if last.v == iv.u => last.v = iv.v,
                _ => intervals.push(iv),
            }
        }
        slabs.push(Slab {
            y_lo: e0.clone(),
            y_hi: e1.clone(),
            intervals,
        });
    }
    SlabSet::new(slabs).expect("symmetrized slabs are valid")
}

/// The double-bubble functional `P(F+) + P(F-) - min(trace+, trace-)` of
/// the pair of sets on either side of the axis, the left one given in
/// mirrored coordinates.
pub fn double_bubble_functional(right: &SlabSet, left: &SlabSet) -> f64 {
    let shared = right.trace().min(left.trace());
    right.perimeter() + left.perimeter() - to_f64(&shared)
}

/// Keeps the side with the smaller perimeter and mirrors it across the
/// axis; returns that side. The symmetric pair it defines has functional
/// `2 P(F) - trace(F)`, which never exceeds that of the input pair.
pub fn x_symmetrize(right: &SlabSet, left: &SlabSet) -> SlabSet {
    if right.perimeter() <= left.perimeter() {
        right.clone()
    } else {
        left.clone()
    }
}

pub fn weighted_area(s: &SlabSet, alpha: Alpha) -> f64 {
    s.weighted_area(alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementReport {
    pub original_perimeter: f64,
    pub rearranged_perimeter: f64,
    pub original_open_perimeter: f64,
    pub rearranged_open_perimeter: f64,
    pub original_trace: f64,
    pub rearranged_trace: f64,
    pub noninterval_measure: f64,
    pub area: f64,
    /// The same area as an exact fraction.
    pub area_exact: String,
    pub weighted_area_original: f64,
    pub weighted_area_rearranged: f64,
    pub gap: GapCheck,
}

/// Rearranges `s` and collects the bookkeeping for the report.
pub fn rearrangement_report(s: &SlabSet, alpha: Alpha) -> Result<(SlabSet, RearrangementReport)> {
    let after = rearrange(s)?;
    let report = RearrangementReport {
        original_perimeter: s.perimeter(),
        rearranged_perimeter: after.perimeter(),
        original_open_perimeter: s.perimeter_open(),
        rearranged_open_perimeter: after.perimeter_open(),
        original_trace: trace(s),
        rearranged_trace: trace(&after),
        noninterval_measure: to_f64(&s.noninterval_measure()),
        area: to_f64(&s.area()),
        area_exact: format_rational(&s.area()),
        weighted_area_original: s.weighted_area(alpha),
        weighted_area_rearranged: after.weighted_area(alpha),
        gap: quantitative_gap_check(s, &after),
    };
    Ok((after, report))
}
