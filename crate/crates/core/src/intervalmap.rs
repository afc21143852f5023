//! Piecewise isometries of `[0, 1)` and interval exchange transformations.

use std::fmt;

use thiserror::Error;

use crate::boundary::{check_tiling, BoundarySet, Span};
use crate::exactnum::{ExactScalar, ScalarError};
use crate::fingerprint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("point {0} outside [0, 1)")]
    PointOutsideDomain(String),
    #[error("corrupt map: {0}")]
    CorruptMap(String),
    #[error("piece {piece} has slope -1; not a translation map")]
    NotTranslationPiecewise { piece: usize },
    #[error("map is not a bijection of [0, 1)")]
    NotBijective,
    #[error("invalid map: {0}")]
    Invalid(ValidationReport),
    #[error("invalid interval [{lo}, {hi}): need 0 <= lo < hi <= 1")]
    BadInterval { lo: String, hi: String },
    #[error("map has no pieces")]
    Empty,
    #[error("IET length {index} is not positive")]
    NonPositiveLength { index: usize },
    #[error("IET lengths sum to {0}, expected 1")]
    LengthSum(String),
    #[error("permutation {0:?} is not a bijection of 0..{1}")]
    InvalidPermutation(Vec<usize>, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slope {
    Plus,
    Minus,
}

impl Slope {
    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            1 => Some(Slope::Plus),
            -1 => Some(Slope::Minus),
            _ => None,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Slope::Plus => 1,
            Slope::Minus => -1,
        }
    }
}

/// `[lo, hi)` with `0 <= lo < hi <= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HalfOpenInterval {
    lo: ExactScalar,
    hi: ExactScalar,
}

impl HalfOpenInterval {
    pub fn new(lo: ExactScalar, hi: ExactScalar) -> Result<Self, MapError> {
        if lo.field() != hi.field() {
            return Err(ScalarError::FieldMismatch { left: lo.field(), right: hi.field() }.into());
        }
        let d = lo.field();
        let ok = lo >= ExactScalar::zero(d)? && lo < hi && hi <= ExactScalar::one(d)?;
        if !ok {
            return Err(MapError::BadInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> &ExactScalar {
        &self.lo
    }

    pub fn hi(&self) -> &ExactScalar {
        &self.hi
    }

    pub fn length(&self) -> ExactScalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        self.lo <= *x && *x < self.hi
    }

    pub fn to_span(&self) -> Span {
        Span { lo: self.lo.clone(), lo_in: true, hi: self.hi.clone(), hi_in: false }
    }
}

impl fmt::Debug for HalfOpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// `x ↦ slope·x + intercept` on `domain`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePiece {
    pub domain: HalfOpenInterval,
    pub slope: Slope,
    pub intercept: ExactScalar,
}

impl AffinePiece {
    pub fn new(domain: HalfOpenInterval, slope: Slope, intercept: ExactScalar) -> Result<Self, MapError> {
        if intercept.field() != domain.lo.field() {
            return Err(ScalarError::FieldMismatch { left: intercept.field(), right: domain.lo.field() }.into());
        }
        Ok(Self { domain, slope, intercept })
    }

    /// A translation `x ↦ x + shift` on `[lo, hi)`.
    pub fn translation(lo: ExactScalar, hi: ExactScalar, shift: ExactScalar) -> Result<Self, MapError> {
        Self::new(HalfOpenInterval::new(lo, hi)?, Slope::Plus, shift)
    }

    /// Evaluates the affine formula without checking the domain; also
    /// gives the left limit at `domain.hi`.
    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        match self.slope {
            Slope::Plus => x + &self.intercept,
            Slope::Minus => &self.intercept - x,
        }
    }

    /// Image of the domain: `[l, h)` for slope +1, `(l, h]` for slope -1.
    pub fn image(&self) -> Span {
        self.image_of(&self.domain.to_span())
    }

    pub fn image_of(&self, span: &Span) -> Span {
        span.translate(self.slope == Slope::Minus, &self.intercept)
    }

    /// Inverse of [`AffinePiece::eval`].
    pub fn preimage(&self, y: &ExactScalar) -> ExactScalar {
        match self.slope {
            Slope::Plus => y - &self.intercept,
            Slope::Minus => &self.intercept - y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapViolation {
    DomainOverlap { first: usize, second: usize, region: Span },
    CoverageGap { region: Span },
    ImageEscapes { piece: usize, image: Span },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::DomainOverlap { first, second, region } => {
                write!(f, "domain overlap between pieces {first} and {second} at {region}")
            }
            MapViolation::CoverageGap { region } => write!(f, "coverage gap at {region}"),
            MapViolation::ImageEscapes { piece, image } => {
                write!(f, "image {image} of piece {piece} escapes [0, 1)")
            }
        }
    }
}

/// Structural problems plus the (non-fatal) bijectivity verdict.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValidationReport {
    pub violations: Vec<MapViolation>,
    pub bijective: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid, {}", if self.bijective { "bijective" } else { "non-bijective" });
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Stable digest of a map's canonical text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MapId(pub u64);

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "map:{:016x}", self.0)
    }
}

/// Finitely many affine pieces on `[0, 1)`, sorted by left endpoint.
///
/// Construction only checks field consistency; call
/// [`PiecewiseMap::validate`] (or build with [`PiecewiseMap::validated`]) to
/// learn whether the domains tile `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewiseMap {
    pieces: Vec<AffinePiece>,
    d: u32,
}

impl PiecewiseMap {
    pub fn new(mut pieces: Vec<AffinePiece>) -> Result<Self, MapError> {
        let d = pieces.first().ok_or(MapError::Empty)?.intercept.field();
        if let Some(p) = pieces.iter().find(|p| p.intercept.field() != d) {
            return Err(ScalarError::FieldMismatch { left: p.intercept.field(), right: d }.into());
        }
        pieces.sort_by(|a, b| a.domain.lo.cmp(&b.domain.lo));
        Ok(Self { pieces, d })
    }

    /// Builds the map and rejects it unless [`validate`](Self::validate)
    /// reports no violations.
    pub fn validated(pieces: Vec<AffinePiece>) -> Result<Self, MapError> {
        let map = Self::new(pieces)?;
        let report = map.validate();
        if report.is_valid() {
            Ok(map)
        } else {
            Err(MapError::Invalid(report))
        }
    }

    pub fn identity(d: u32) -> Result<Self, MapError> {
        let piece = AffinePiece::translation(ExactScalar::zero(d)?, ExactScalar::one(d)?, ExactScalar::zero(d)?)?;
        Self::new(vec![piece])
    }

    /// Rotation `x ↦ x + angle mod 1` for `angle` in `[0, 1)`.
    pub fn rotation(angle: &ExactScalar) -> Result<Self, MapError> {
        let d = angle.field();
        let zero = ExactScalar::zero(d)?;
        let one = ExactScalar::one(d)?;
        if *angle < zero || *angle >= one {
            return Err(MapError::PointOutsideDomain(angle.to_string()));
        }
        if angle.is_zero() {
            return Self::identity(d);
        }
        let cut = &one - angle;
        Self::new(vec![
            AffinePiece::translation(zero, cut.clone(), angle.clone())?,
            AffinePiece::translation(cut, one.clone(), angle - &one)?,
        ])
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn field(&self) -> u32 {
        self.d
    }

    pub fn id(&self) -> MapId {
        MapId(fingerprint(&self.to_string()))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let domains: Vec<Span> = self.pieces.iter().map(|p| p.domain.to_span()).collect();
        for i in 0..domains.len() {
            for j in i + 1..domains.len() {
                if let Some(region) = domains[i].intersect(&domains[j]) {
                    violations.push(MapViolation::DomainOverlap { first: i, second: j, region });
                }
            }
        }
        let covered = BoundarySet::from_spans(domains.iter().cloned());
        for region in covered.complement_in_unit(self.d).components() {
            violations.push(MapViolation::CoverageGap { region: region.clone() });
        }
        let images: Vec<Span> = self.pieces.iter().map(AffinePiece::image).collect();
        for (piece, image) in images.iter().enumerate() {
            if image.check_unit().is_err() {
                violations.push(MapViolation::ImageEscapes { piece, image: image.clone() });
            }
        }
        let bijective = violations.is_empty() && check_tiling(&images, self.d).is_ok();
        ValidationReport { violations, bijective }
    }

    /// Index of the piece whose domain contains `x`.
    pub fn locate(&self, x: &ExactScalar) -> Result<usize, MapError> {
        if x.field() != self.d {
            return Err(ScalarError::FieldMismatch { left: x.field(), right: self.d }.into());
        }
        if *x < ExactScalar::zero(self.d)? || *x >= ExactScalar::one(self.d)? {
            return Err(MapError::PointOutsideDomain(x.to_string()));
        }
        let idx = self.pieces.partition_point(|p| p.domain.lo <= *x);
        match idx.checked_sub(1) {
            Some(i) if self.pieces[i].domain.contains(x) => Ok(i),
            _ => Err(MapError::CorruptMap(format!("no piece contains {x}"))),
        }
    }

    pub fn apply(&self, x: &ExactScalar) -> Result<ExactScalar, MapError> {
        let y = self.pieces[self.locate(x)?].eval(x);
        if y < ExactScalar::zero(self.d)? || y >= ExactScalar::one(self.d)? {
            return Err(MapError::CorruptMap(format!("image {y} of {x} leaves [0, 1)")));
        }
        Ok(y)
    }

    /// Interior piece boundaries where the left limit differs from the value.
    pub fn discontinuities(&self) -> Vec<ExactScalar> {
        self.pieces
            .windows(2)
            .filter(|w| w[0].domain.hi == w[1].domain.lo)
            .filter_map(|w| {
                let p = &w[1].domain.lo;
                (w[0].eval(p) != w[1].eval(p)).then(|| p.clone())
            })
            .collect()
    }
}

impl fmt::Display for PiecewiseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let sign = if p.slope == Slope::Plus { "x" } else { "-x" };
            write!(f, "{:?} -> {sign} + {}", p.domain, p.intercept)?;
        }
        Ok(())
    }
}

/// An interval exchange: interval `i` (left to right) of length
/// `lengths[i]` is moved to slot `permutation[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Iet {
    lengths: Vec<ExactScalar>,
    permutation: Vec<usize>,
}

impl Iet {
    pub fn new(lengths: Vec<ExactScalar>, permutation: Vec<usize>) -> Result<Self, MapError> {
        let d = lengths.first().ok_or(MapError::Empty)?.field();
        let zero = ExactScalar::zero(d)?;
        let mut total = zero.clone();
        for (index, l) in lengths.iter().enumerate() {
            total = total.try_add(l)?;
            if *l <= zero {
                return Err(MapError::NonPositiveLength { index });
            }
        }
        if total != ExactScalar::one(d)? {
            return Err(MapError::LengthSum(total.to_string()));
        }
        let k = lengths.len();
        let mut seen = vec![false; k];
        for &slot in &permutation {
            if slot >= k || std::mem::replace(&mut seen[slot], true) {
                return Err(MapError::InvalidPermutation(permutation, k));
            }
        }
        if permutation.len() != k {
            return Err(MapError::InvalidPermutation(permutation, k));
        }
        Ok(Self { lengths, permutation })
    }

    pub fn lengths(&self) -> &[ExactScalar] {
        &self.lengths
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn field(&self) -> u32 {
        self.lengths[0].field()
    }

    /// Converts a bijective translation map into an IET.
    pub fn from_map(map: &PiecewiseMap) -> Result<Self, MapError> {
        if let Some(piece) = map.pieces.iter().position(|p| p.slope == Slope::Minus) {
            return Err(MapError::NotTranslationPiecewise { piece });
        }
        let report = map.validate();
        if !report.is_valid() {
            return Err(MapError::Invalid(report));
        }
        if !report.bijective {
            return Err(MapError::NotBijective);
        }
        let lengths: Vec<ExactScalar> = map.pieces.iter().map(|p| p.domain.length()).collect();
        let image_starts: Vec<ExactScalar> = map.pieces.iter().map(|p| p.eval(&p.domain.lo)).collect();
        let mut by_image: Vec<usize> = (0..lengths.len()).collect();
        by_image.sort_by(|&a, &b| image_starts[a].cmp(&image_starts[b]));
        let mut permutation = vec![0; lengths.len()];
        for (slot, &piece) in by_image.iter().enumerate() {
            permutation[piece] = slot;
        }
        Self::new(lengths, permutation)
    }

    /// The translation map realising this exchange.
    pub fn to_map(&self) -> PiecewiseMap {
        let d = self.field();
        let zero = ExactScalar::zero(d).expect("validated field");
        let mut slot_order: Vec<usize> = (0..self.lengths.len()).collect();
        slot_order.sort_by_key(|&i| self.permutation[i]);
        let mut image_start = vec![zero.clone(); self.lengths.len()];
        let mut acc = zero.clone();
        for &i in &slot_order {
            image_start[i] = acc.clone();
            acc = &acc + &self.lengths[i];
        }
        let mut pieces = Vec::with_capacity(self.lengths.len());
        let mut lo = zero;
        for (i, len) in self.lengths.iter().enumerate() {
            let hi = &lo + len;
            let shift = &image_start[i] - &lo;
            pieces.push(AffinePiece::translation(lo, hi.clone(), shift).expect("IET intervals are well formed"));
            lo = hi;
        }
        PiecewiseMap::new(pieces).expect("nonempty IET")
    }
}

/// `to_iet`: see [`Iet::from_map`].
pub fn to_iet(map: &PiecewiseMap) -> Result<Iet, MapError> {
    Iet::from_map(map)
}

/// `iet_to_map`: see [`Iet::to_map`].
pub fn iet_to_map(iet: &Iet) -> PiecewiseMap {
    iet.to_map()
}
