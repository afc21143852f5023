//! Finite unions of intervals with explicit endpoint-inclusion flags.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::exactnum::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("empty interval {0}")]
    Empty(String),
    #[error("interval {0} leaves [0, 1)")]
    OutsideUnit(String),
    #[error("endpoints of {0} live in different fields")]
    FieldMismatch(String),
}

/// One interval with flagged endpoints. `lo == hi` is allowed only as a
/// closed singleton.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: ExactScalar,
    pub lo_in: bool,
    pub hi: ExactScalar,
    pub hi_in: bool,
}

impl Span {
    pub fn new(lo: ExactScalar, lo_in: bool, hi: ExactScalar, hi_in: bool) -> Result<Self, SpanError> {
        let span = Self { lo, lo_in, hi, hi_in };
        if span.lo.field() != span.hi.field() {
            return Err(SpanError::FieldMismatch(span.to_string()));
        }
        if span.is_empty() {
            return Err(SpanError::Empty(span.to_string()));
        }
        Ok(span)
    }

    /// `[lo, hi)`
    pub fn half_open(lo: ExactScalar, hi: ExactScalar) -> Result<Self, SpanError> {
        Self::new(lo, true, hi, false)
    }

    pub fn point(p: ExactScalar) -> Self {
        Self { lo: p.clone(), lo_in: true, hi: p, hi_in: true }
    }

    fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_in && self.hi_in),
            Ordering::Greater => true,
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn field(&self) -> u32 {
        self.lo.field()
    }

    /// Checks the span sits inside `[0, 1)`.
    pub fn check_unit(&self) -> Result<(), SpanError> {
        let d = self.field();
        let zero = ExactScalar::zero(d).expect("field already validated");
        let one = ExactScalar::one(d).expect("field already validated");
        let ok = self.lo >= zero && (self.hi < one || (self.hi == one && !self.hi_in));
        if ok {
            Ok(())
        } else {
            Err(SpanError::OutsideUnit(self.to_string()))
        }
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_in,
            Ordering::Less => false,
        };
        above
            && match x.cmp(&self.hi) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_in,
                Ordering::Greater => false,
            }
    }

    /// True when `p` lies strictly between the endpoints.
    pub fn has_interior_point(&self, p: &ExactScalar) -> bool {
        self.lo < *p && *p < self.hi
    }

    pub fn intersect(&self, other: &Span) -> Option<Span> {
        let (lo, lo_in) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (&self.lo, self.lo_in),
            Ordering::Less => (&other.lo, other.lo_in),
            Ordering::Equal => (&self.lo, self.lo_in && other.lo_in),
        };
        let (hi, hi_in) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (&self.hi, self.hi_in),
            Ordering::Greater => (&other.hi, other.hi_in),
            Ordering::Equal => (&self.hi, self.hi_in && other.hi_in),
        };
        let span = Span { lo: lo.clone(), lo_in, hi: hi.clone(), hi_in };
        (!span.is_empty()).then_some(span)
    }

    /// Parts strictly left and strictly right of an interior point `p`.
    pub fn split_around(&self, p: &ExactScalar) -> (Span, Span) {
        debug_assert!(self.has_interior_point(p));
        (
            Span { lo: self.lo.clone(), lo_in: self.lo_in, hi: p.clone(), hi_in: false },
            Span { lo: p.clone(), lo_in: false, hi: self.hi.clone(), hi_in: self.hi_in },
        )
    }

    /// Image under `x ↦ slope·x + intercept` for `slope ∈ {+1, -1}`.
    pub fn translate(&self, flip: bool, intercept: &ExactScalar) -> Span {
        if flip {
            Span {
                lo: intercept - &self.hi,
                lo_in: self.hi_in,
                hi: intercept - &self.lo,
                hi_in: self.lo_in,
            }
        } else {
            Span {
                lo: &self.lo + intercept,
                lo_in: self.lo_in,
                hi: &self.hi + intercept,
                hi_in: self.hi_in,
            }
        }
    }

    /// A point guaranteed to lie in the span.
    pub fn sample_point(&self) -> ExactScalar {
        if self.lo_in {
            self.lo.clone()
        } else {
            midpoint(&self.lo, &self.hi)
        }
    }

    pub(crate) fn cmp_lower(&self, other: &Span) -> Ordering {
        self.lo.cmp(&other.lo).then_with(|| other.lo_in.cmp(&self.lo_in))
    }

    fn cmp_upper(&self, other: &Span) -> Ordering {
        self.hi.cmp(&other.hi).then_with(|| self.hi_in.cmp(&other.hi_in))
    }

    /// True when `next` (starting no earlier than `self`) overlaps or abuts
    /// `self` so that their union is a single interval.
    fn touches(&self, next: &Span) -> bool {
        match next.lo.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_in || next.lo_in,
            Ordering::Greater => false,
        }
    }
}

pub(crate) fn midpoint(x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
    (x + y).scale(&BigRational::new(BigInt::from(1), BigInt::from(2)))
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() && self.lo_in && self.hi_in {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_in { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_in { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A canonical union of spans: sorted, pairwise disjoint, and with no two
/// components that could merge into one.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BoundarySet {
    components: Vec<Span>,
}

impl BoundarySet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts and merges overlapping or abutting spans.
    pub fn from_spans(spans: impl IntoIterator<Item = Span>) -> Self {
        let mut spans: Vec<Span> = spans.into_iter().collect();
        spans.sort_by(|a, b| a.cmp_lower(b));
        let mut components: Vec<Span> = Vec::with_capacity(spans.len());
        for span in spans {
            match components.last_mut() {
                Some(last) if last.touches(&span) => {
                    if span.cmp_upper(last) == Ordering::Greater {
                        last.hi = span.hi;
                        last.hi_in = span.hi_in;
                    }
                }
                _ => components.push(span),
            }
        }
        Self { components }
    }

    pub fn components(&self) -> &[Span] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        // first component whose upper end is not below x
        let idx = self.components.partition_point(|s| match s.hi.cmp(x) {
            Ordering::Less => true,
            Ordering::Equal => !s.hi_in,
            Ordering::Greater => false,
        });
        self.components.get(idx).is_some_and(|s| s.contains(x))
    }

    pub fn union(&self, other: &BoundarySet) -> BoundarySet {
        Self::from_spans(self.components.iter().chain(&other.components).cloned())
    }

    pub fn intersect(&self, other: &BoundarySet) -> BoundarySet {
        let mut out = Vec::new();
        for a in &self.components {
            for b in &other.components {
                out.extend(a.intersect(b));
            }
        }
        Self::from_spans(out)
    }

    pub fn intersect_span(&self, span: &Span) -> BoundarySet {
        Self::from_spans(self.components.iter().filter_map(|c| c.intersect(span)))
    }

    pub fn sample_point(&self) -> Option<ExactScalar> {
        self.components.first().map(Span::sample_point)
    }

    /// `[0, 1)` minus this set.
    pub fn complement_in_unit(&self, d: u32) -> BoundarySet {
        let mut out = Vec::new();
        let mut cursor = ExactScalar::zero(d).expect("validated field");
        let mut cursor_in = true;
        for c in &self.components {
            if let Ok(gap) = Span::new(cursor.clone(), cursor_in, c.lo.clone(), !c.lo_in) {
                out.push(gap);
            }
            cursor = c.hi.clone();
            cursor_in = !c.hi_in;
        }
        let one = ExactScalar::one(d).expect("validated field");
        if let Ok(gap) = Span::new(cursor, cursor_in, one, false) {
            out.push(gap);
        }
        Self::from_spans(out)
    }
}

impl fmt::Display for BoundarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("∅");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoundarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// How a family of spans fails to tile `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingFault {
    /// A point covered twice, with the indices of the two offending spans.
    Overlap { witness: ExactScalar, first: usize, second: usize },
    Gap { witness: ExactScalar },
    OutsideUnit { index: usize },
}

/// Checks that `spans` are pairwise disjoint and cover `[0, 1)` exactly,
/// returning the first fault found left to right.
pub fn check_tiling(spans: &[Span], d: u32) -> Result<(), TilingFault> {
    for (i, s) in spans.iter().enumerate() {
        if s.check_unit().is_err() {
            return Err(TilingFault::OutsideUnit { index: i });
        }
    }
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_by(|&a, &b| spans[a].cmp_lower(&spans[b]));

    // Everything below `frontier` is covered; `frontier` itself is covered
    // iff `frontier_in`. `owner` is the span reaching furthest so far.
    let mut frontier = ExactScalar::zero(d).expect("validated field");
    let mut frontier_in = false;
    let mut owner: Option<usize> = None;
    for idx in order {
        let s = &spans[idx];
        match s.lo.cmp(&frontier) {
            Ordering::Less => {
                let witness = if s.lo_in {
                    s.lo.clone()
                } else {
                    let end = if s.hi < frontier { &s.hi } else { &frontier };
                    midpoint(&s.lo, end)
                };
                return Err(TilingFault::Overlap {
                    witness,
                    first: owner.expect("a span below the frontier exists"),
                    second: idx,
                });
            }
            Ordering::Equal if frontier_in && s.lo_in => {
                return Err(TilingFault::Overlap {
                    witness: s.lo.clone(),
                    first: owner.expect("frontier point is owned"),
                    second: idx,
                });
            }
            Ordering::Equal if !frontier_in && !s.lo_in => {
                return Err(TilingFault::Gap { witness: frontier });
            }
            Ordering::Greater => {
                let witness = if frontier_in { midpoint(&frontier, &s.lo) } else { frontier };
                return Err(TilingFault::Gap { witness });
            }
            Ordering::Equal => {}
        }
        frontier = s.hi.clone();
        frontier_in = s.hi_in;
        owner = Some(idx);
    }
    let one = ExactScalar::one(d).expect("validated field");
    if frontier < one {
        let witness = if frontier_in { midpoint(&frontier, &one) } else { frontier };
        return Err(TilingFault::Gap { witness });
    }
    Ok(())
}
