//! Colorings of `[0, 1)`, the good-subdivision test, refinement and gluing.
//!
//! A subdivision assigns every point of `[0, 1)` one letter; each letter's
//! class is a finite union of flagged intervals. It is *good* for a map `f`
//! when every class is a single interval and, whenever two points of one
//! class lie on either side of a discontinuity of `f`, their images carry
//! different letters. Cutting every class at every discontinuity yields a
//! good subdivision, and the cut pieces project back onto the original
//! letters, so the original word is a letter-by-letter image of the refined
//! one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::boundary::{check_tiling, BoundarySet, Span, SpanError, TilingFault};
use crate::coding::SymbolicWord;
use crate::exactnum::{ExactScalar, ScalarError};
use crate::fingerprint;
use crate::intervalmap::{MapId, PiecewiseMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubdivisionError {
    #[error("classes {first} and {second} overlap at {witness}")]
    Overlap { witness: ExactScalar, first: Letter, second: Letter },
    #[error("point {witness} is not covered by any class")]
    CoverageGap { witness: ExactScalar },
    #[error("class {letter} reaches outside [0, 1)")]
    OutsideUnit { letter: Letter },
    #[error("class {0} is empty")]
    EmptyClass(Letter),
    #[error("letter {0} appears twice")]
    DuplicateLetter(Letter),
    #[error("invalid letter {0:?}: letters are non-empty and contain no whitespace")]
    InvalidLetter(String),
    #[error("subdivision has no classes")]
    NoClasses,
    #[error("point {0} outside [0, 1)")]
    PointOutsideDomain(String),
    #[error("letter {0} is not in the gluing domain")]
    UnknownLetter(Letter),
    #[error("gluing misses original letter {0}")]
    NotSurjective(Letter),
    #[error("gluing sends {from} to {to}, which is not an original letter")]
    ForeignImage { from: Letter, to: Letter },
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A symbol of the coding alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(name: &str) -> Result<Self, SubdivisionError> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(SubdivisionError::InvalidLetter(name.to_string()));
        }
        Ok(Self(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Stable digest of a subdivision's canonical text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubdivisionId(pub u64);

impl fmt::Display for SubdivisionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sub:{:016x}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subdivision {
    alphabet: Vec<Letter>,
    classes: Vec<BoundarySet>,
    /// Every class component with its letter index, sorted left to right.
    index: Vec<(Span, usize)>,
    d: u32,
}

impl Subdivision {
    /// Merges each class into canonical form and checks that the classes
    /// partition `[0, 1)`. The alphabet keeps the input order.
    pub fn canonicalize(raw: Vec<(Letter, Vec<Span>)>) -> Result<Self, SubdivisionError> {
        if raw.is_empty() {
            return Err(SubdivisionError::NoClasses);
        }
        let d = raw.iter().find_map(|(_, spans)| spans.first()).map_or(0, Span::field);
        let mut alphabet = Vec::with_capacity(raw.len());
        let mut classes = Vec::with_capacity(raw.len());
        for (letter, spans) in raw {
            if alphabet.contains(&letter) {
                return Err(SubdivisionError::DuplicateLetter(letter));
            }
            if let Some(s) = spans.iter().find(|s| s.field() != d) {
                return Err(ScalarError::FieldMismatch { left: s.field(), right: d }.into());
            }
            let set = BoundarySet::from_spans(spans);
            if set.is_empty() {
                return Err(SubdivisionError::EmptyClass(letter));
            }
            alphabet.push(letter);
            classes.push(set);
        }

        let mut index: Vec<(Span, usize)> = classes
            .iter()
            .enumerate()
            .flat_map(|(i, set)| set.components().iter().map(move |s| (s.clone(), i)))
            .collect();
        let spans: Vec<Span> = index.iter().map(|(s, _)| s.clone()).collect();
        match check_tiling(&spans, d) {
            Ok(()) => {}
            Err(TilingFault::OutsideUnit { index: i }) => {
                return Err(SubdivisionError::OutsideUnit { letter: alphabet[index[i].1].clone() })
            }
            Err(TilingFault::Gap { witness }) => return Err(SubdivisionError::CoverageGap { witness }),
            Err(TilingFault::Overlap { witness, first, second }) => {
                return Err(SubdivisionError::Overlap {
                    witness,
                    first: alphabet[index[first].1].clone(),
                    second: alphabet[index[second].1].clone(),
                })
            }
        }
        index.sort_by(|a, b| a.0.cmp_lower(&b.0));
        Ok(Self { alphabet, classes, index, d })
    }

    /// The one-letter subdivision `{letter: [0, 1)}`.
    pub fn trivial(letter: Letter, d: u32) -> Result<Self, SubdivisionError> {
        let span = Span::half_open(ExactScalar::zero(d)?, ExactScalar::one(d)?)?;
        Self::canonicalize(vec![(letter, vec![span])])
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn field(&self) -> u32 {
        self.d
    }

    pub fn class(&self, letter: &Letter) -> Option<&BoundarySet> {
        self.alphabet.iter().position(|l| l == letter).map(|i| &self.classes[i])
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Letter, &BoundarySet)> {
        self.alphabet.iter().zip(&self.classes)
    }

    pub fn component_count(&self) -> usize {
        self.index.len()
    }

    pub fn id(&self) -> SubdivisionId {
        SubdivisionId(fingerprint(&self.to_string()))
    }

    /// True when both subdivisions have the same classes as point sets,
    /// ignoring letter names.
    pub fn same_partition(&self, other: &Subdivision) -> bool {
        let mine: BTreeSet<String> = self.classes.iter().map(|c| c.to_string()).collect();
        let theirs: BTreeSet<String> = other.classes.iter().map(|c| c.to_string()).collect();
        self.classes.len() == other.classes.len() && mine == theirs
    }

    pub fn color_of(&self, x: &ExactScalar) -> Result<&Letter, SubdivisionError> {
        self.color_index(x).map(|i| &self.alphabet[i])
    }

    fn color_index(&self, x: &ExactScalar) -> Result<usize, SubdivisionError> {
        if x.field() != self.d {
            return Err(ScalarError::FieldMismatch { left: x.field(), right: self.d }.into());
        }
        let idx = self.index.partition_point(|(s, _)| match s.lo.cmp(x) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => s.lo_in,
            std::cmp::Ordering::Greater => false,
        });
        match idx.checked_sub(1).map(|i| &self.index[i]) {
            Some((span, letter)) if span.contains(x) => Ok(*letter),
            _ => Err(SubdivisionError::PointOutsideDomain(x.to_string())),
        }
    }

    fn check_map(&self, map: &PiecewiseMap) -> Result<(), SubdivisionError> {
        if map.field() != self.d {
            return Err(ScalarError::FieldMismatch { left: map.field(), right: self.d }.into());
        }
        Ok(())
    }

    /// Letters met by `f(side)`, each with a point of `side` whose image
    /// has that letter.
    fn image_colors(&self, side: &Span, map: &PiecewiseMap) -> Vec<(usize, ExactScalar)> {
        let mut found: Vec<Option<ExactScalar>> = vec![None; self.alphabet.len()];
        for piece in map.pieces() {
            let Some(part) = side.intersect(&piece.domain.to_span()) else { continue };
            let image = piece.image_of(&part);
            for (c, class) in self.classes.iter().enumerate() {
                if found[c].is_some() {
                    continue;
                }
                if let Some(y) = class.intersect_span(&image).sample_point() {
                    found[c] = Some(piece.preimage(&y));
                }
            }
        }
        found.into_iter().enumerate().filter_map(|(c, w)| w.map(|w| (c, w))).collect()
    }

    /// Checks both goodness conditions against `map`.
    pub fn is_good(&self, map: &PiecewiseMap) -> Result<Goodness, SubdivisionError> {
        self.check_map(map)?;
        let mut violations = Vec::new();
        for (letter, class) in self.classes() {
            if class.len() != 1 {
                violations.push(GoodnessViolation::NotConvex { letter: letter.clone(), components: class.len() });
            }
        }
        let cuts = map.discontinuities();
        for (component, c) in &self.index {
            for p in cuts.iter().filter(|p| component.has_interior_point(p)) {
                let (left, right) = component.split_around(p);
                let left_colors = self.image_colors(&left, map);
                let right_colors = self.image_colors(&right, map);
                let shared: Vec<(usize, &ExactScalar, &ExactScalar)> = left_colors
                    .iter()
                    .filter_map(|(lc, a)| right_colors.iter().find(|(rc, _)| rc == lc).map(|(_, b)| (*lc, a, b)))
                    .collect();
                if let Some(&(_, a, b)) = shared.first() {
                    violations.push(GoodnessViolation::ImagesShareColor {
                        letter: self.alphabet[*c].clone(),
                        discontinuity: p.clone(),
                        shared: shared.iter().map(|(s, _, _)| self.alphabet[*s].clone()).collect(),
                        witness: (a.clone(), b.clone()),
                    });
                }
            }
        }
        Ok(if violations.is_empty() {
            Goodness::Good(GoodnessCertificate { subdivision: self.clone(), map_id: map.id() })
        } else {
            Goodness::Violations(violations)
        })
    }

    /// Splits every class component at every interior cut point (component
    /// boundaries and discontinuities of `map`); each piece gets a fresh
    /// letter `old letter + index`, indexed left to right within the old
    /// class.
    pub fn refine_to_good(&self, map: &PiecewiseMap) -> Result<Refinement, SubdivisionError> {
        self.check_map(map)?;
        let mut cuts: Vec<ExactScalar> = self
            .index
            .iter()
            .flat_map(|(s, _)| [s.lo.clone(), s.hi.clone()])
            .chain(map.discontinuities())
            .collect();
        cuts.sort();
        cuts.dedup();

        let mut pieces_by_letter: Vec<Vec<Span>> = vec![Vec::new(); self.alphabet.len()];
        for (letter, class) in self.classes.iter().enumerate() {
            for component in class.components() {
                let mut rest = component.clone();
                for p in cuts.iter().filter(|p| component.has_interior_point(p)) {
                    let (left, right) = rest.split_around(p);
                    pieces_by_letter[letter].push(left);
                    // the cut point joins the piece to its right
                    rest = Span { lo_in: true, ..right };
                }
                pieces_by_letter[letter].push(rest);
            }
        }

        let names = fresh_names(&self.alphabet, &pieces_by_letter)?;
        let mut raw = Vec::new();
        let mut pairs = Vec::new();
        for ((old, pieces), fresh) in self.alphabet.iter().zip(pieces_by_letter).zip(names) {
            for (piece, name) in pieces.into_iter().zip(fresh) {
                pairs.push((name.clone(), old.clone()));
                raw.push((name, vec![piece]));
            }
        }
        Ok(Refinement {
            subdivision: Subdivision::canonicalize(raw)?,
            gluing: GluingMap::new(pairs, &self.alphabet)?,
        })
    }
}

/// `old + index` names. If two classes would produce the same name (`A`
/// with eleven pieces and `A1` with two), an underscore run longer than any
/// in the alphabet separates letter from index, which cannot collide.
fn fresh_names(alphabet: &[Letter], pieces: &[Vec<Span>]) -> Result<Vec<Vec<Letter>>, SubdivisionError> {
    let build = |sep: &str| -> Vec<Vec<String>> {
        alphabet
            .iter()
            .zip(pieces)
            .map(|(old, ps)| (0..ps.len()).map(|i| format!("{old}{sep}{i}")).collect())
            .collect()
    };
    let mut names = build("");
    let mut seen = std::collections::HashSet::new();
    if !names.iter().flatten().all(|n| seen.insert(n.clone())) {
        let longest_run = alphabet
            .iter()
            .flat_map(|l| l.as_str().split(|c| c != '_').map(str::len))
            .max()
            .unwrap_or(0);
        names = build(&"_".repeat(longest_run + 1));
    }
    names
        .into_iter()
        .map(|ns| ns.iter().map(|n| Letter::new(n)).collect())
        .collect()
}

impl fmt::Display for Subdivision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (letter, class)) in self.classes().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{letter}: {class}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Subdivision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoodnessViolation {
    NotConvex { letter: Letter, components: usize },
    /// Points `witness.0 < discontinuity < witness.1` of class `letter`
    /// whose images share the first letter of `shared`.
    ImagesShareColor {
        letter: Letter,
        discontinuity: ExactScalar,
        shared: Vec<Letter>,
        witness: (ExactScalar, ExactScalar),
    },
}

impl fmt::Display for GoodnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoodnessViolation::NotConvex { letter, components } => {
                write!(f, "class {letter} is not convex ({components} components)")
            }
            GoodnessViolation::ImagesShareColor { letter, discontinuity, shared, witness } => {
                let shared: Vec<&str> = shared.iter().map(Letter::as_str).collect();
                write!(
                    f,
                    "class {letter} straddles discontinuity {discontinuity}: images of both sides meet {{{}}} (A = {}, B = {})",
                    shared.join(", "),
                    witness.0,
                    witness.1
                )
            }
        }
    }
}

/// Proof that a subdivision was found good for one particular map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessCertificate {
    subdivision: Subdivision,
    map_id: MapId,
}

impl GoodnessCertificate {
    pub fn subdivision(&self) -> &Subdivision {
        &self.subdivision
    }

    pub fn map_id(&self) -> MapId {
        self.map_id
    }

    pub fn is_valid_for(&self, map: &PiecewiseMap) -> bool {
        self.map_id == map.id()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goodness {
    Good(GoodnessCertificate),
    Violations(Vec<GoodnessViolation>),
}

impl Goodness {
    pub fn is_good(&self) -> bool {
        matches!(self, Goodness::Good(_))
    }

    pub fn violations(&self) -> &[GoodnessViolation] {
        match self {
            Goodness::Good(_) => &[],
            Goodness::Violations(v) => v,
        }
    }
}

/// Total, surjective projection from refined letters onto original ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingMap {
    pairs: Vec<(Letter, Letter)>,
    lookup: HashMap<Letter, Letter>,
}

impl GluingMap {
    pub fn new(pairs: Vec<(Letter, Letter)>, original: &[Letter]) -> Result<Self, SubdivisionError> {
        let mut lookup = HashMap::with_capacity(pairs.len());
        for (from, to) in &pairs {
            if !original.contains(to) {
                return Err(SubdivisionError::ForeignImage { from: from.clone(), to: to.clone() });
            }
            if lookup.insert(from.clone(), to.clone()).is_some() {
                return Err(SubdivisionError::DuplicateLetter(from.clone()));
            }
        }
        if let Some(missing) = original.iter().find(|l| !lookup.values().any(|v| v == *l)) {
            return Err(SubdivisionError::NotSurjective(missing.clone()));
        }
        Ok(Self { pairs, lookup })
    }

    pub fn identity(alphabet: &[Letter]) -> Self {
        let pairs: Vec<(Letter, Letter)> = alphabet.iter().map(|l| (l.clone(), l.clone())).collect();
        let lookup = pairs.iter().cloned().collect();
        Self { pairs, lookup }
    }

    pub fn pairs(&self) -> &[(Letter, Letter)] {
        &self.pairs
    }

    pub fn get(&self, letter: &Letter) -> Option<&Letter> {
        self.lookup.get(letter)
    }

    pub fn is_bijective(&self) -> bool {
        let images: BTreeSet<&Letter> = self.lookup.values().collect();
        images.len() == self.lookup.len()
    }

    /// Projects `word` letter by letter.
    pub fn glue_word(&self, word: &SymbolicWord) -> Result<SymbolicWord, SubdivisionError> {
        let letters = word
            .letters()
            .iter()
            .map(|l| self.get(l).cloned().ok_or_else(|| SubdivisionError::UnknownLetter(l.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(word.projected(letters))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub subdivision: Subdivision,
    pub gluing: GluingMap,
}

pub fn canonicalize(raw: Vec<(Letter, Vec<Span>)>) -> Result<Subdivision, SubdivisionError> {
    Subdivision::canonicalize(raw)
}

pub fn is_good(sub: &Subdivision, map: &PiecewiseMap) -> Result<Goodness, SubdivisionError> {
    sub.is_good(map)
}

pub fn refine_to_good(sub: &Subdivision, map: &PiecewiseMap) -> Result<Refinement, SubdivisionError> {
    sub.refine_to_good(map)
}

pub fn glue_word(word: &SymbolicWord, gluing: &GluingMap) -> Result<SymbolicWord, SubdivisionError> {
    gluing.glue_word(word)
}

pub fn color_of<'a>(sub: &'a Subdivision, x: &ExactScalar) -> Result<&'a Letter, SubdivisionError> {
    sub.color_of(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::decimal_oracle;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, m: i64) -> ExactScalar {
        ExactScalar::rational(n, m, 5).unwrap()
    }

    fn alpha() -> ExactScalar {
        ExactScalar::new(-1, 2, 1, 2, 5).unwrap()
    }

    fn l(s: &str) -> Letter {
        Letter::new(s).unwrap()
    }

    fn ho(lo: ExactScalar, hi: ExactScalar) -> Span {
        Span::half_open(lo, hi).unwrap()
    }

    fn golden() -> PiecewiseMap {
        PiecewiseMap::rotation(&alpha()).unwrap()
    }

    fn natural() -> Subdivision {
        let cut = &q(1, 1) - &alpha();
        canonicalize(vec![(l("0"), vec![ho(q(0, 1), cut.clone())]), (l("1"), vec![ho(cut, q(1, 1))])]).unwrap()
    }

    fn split_ab() -> Subdivision {
        canonicalize(vec![
            (l("A"), vec![ho(q(0, 1), q(1, 4)), ho(q(1, 2), q(3, 4))]),
            (l("B"), vec![ho(q(1, 4), q(1, 2)), ho(q(3, 4), q(1, 1))]),
        ])
        .unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let merged = canonicalize(vec![(l("A"), vec![ho(q(0, 1), q(1, 2)), ho(q(1, 2), q(1, 1))])]).unwrap();
        assert_eq!(merged.to_string(), "A: [0, 1)");

        let overlap = canonicalize(vec![(l("A"), vec![ho(q(0, 1), q(2, 3))]), (l("B"), vec![ho(q(1, 2), q(1, 1))])]);
        assert_eq!(overlap, Err(SubdivisionError::Overlap { witness: q(1, 2), first: l("A"), second: l("B") }));

        let gap = canonicalize(vec![(l("A"), vec![ho(q(0, 1), q(1, 3))])]);
        assert_eq!(gap, Err(SubdivisionError::CoverageGap { witness: q(1, 3) }));

        let dup = canonicalize(vec![(l("A"), vec![ho(q(0, 1), q(1, 2))]), (l("A"), vec![ho(q(1, 2), q(1, 1))])]);
        assert_eq!(dup, Err(SubdivisionError::DuplicateLetter(l("A"))));

        assert_eq!(canonicalize(vec![(l("A"), vec![])]), Err(SubdivisionError::EmptyClass(l("A"))));
        assert!(Letter::new("a b").is_err());
        assert!(Letter::new("").is_err());
    }

    #[test]
    fn flagged_classes_partition() {
        let sub = canonicalize(vec![
            (l("A"), vec![Span::new(q(0, 1), true, q(1, 2), true).unwrap()]),
            (l("B"), vec![Span::new(q(1, 2), false, q(1, 1), false).unwrap()]),
        ])
        .unwrap();
        assert_eq!(sub.color_of(&q(1, 2)).unwrap(), &l("A"));
        assert_eq!(sub.color_of(&q(3, 5)).unwrap(), &l("B"));

        let singleton = canonicalize(vec![
            (l("A"), vec![ho(q(0, 1), q(1, 2)), Span::new(q(1, 2), false, q(1, 1), false).unwrap()]),
            (l("P"), vec![Span::point(q(1, 2))]),
        ])
        .unwrap();
        assert_eq!(singleton.color_of(&q(1, 2)).unwrap(), &l("P"));
        assert_eq!(singleton.class(&l("A")).unwrap().len(), 2);
    }

    #[test]
    fn color_of_examples() {
        let n = natural();
        assert_eq!(color_of(&n, &q(0, 1)).unwrap(), &l("0"));
        assert_eq!(color_of(&n, &(&q(1, 1) - &alpha())).unwrap(), &l("1"));
        assert_eq!(decimal_oracle::cmp(&alpha(), &(&q(1, 1) - &alpha())), std::cmp::Ordering::Greater);
        assert_eq!(color_of(&n, &alpha()).unwrap(), &l("1"));
        assert!(matches!(color_of(&n, &q(1, 1)), Err(SubdivisionError::PointOutsideDomain(_))));
        assert!(matches!(color_of(&n, &q(-1, 9)), Err(SubdivisionError::PointOutsideDomain(_))));
    }

    #[test]
    fn is_good_examples() {
        let r = golden();
        match is_good(&natural(), &r).unwrap() {
            Goodness::Good(cert) => {
                assert!(cert.is_valid_for(&r));
                assert!(!cert.is_valid_for(&PiecewiseMap::identity(5).unwrap()));
            }
            Goodness::Violations(v) => panic!("unexpected violations {v:?}"),
        }

        let single = Subdivision::trivial(l("A"), 5).unwrap();
        let verdict = is_good(&single, &r).unwrap();
        match verdict.violations() {
            [GoodnessViolation::ImagesShareColor { letter, discontinuity, shared, witness }] => {
                assert_eq!(letter, &l("A"));
                assert_eq!(discontinuity, &(&q(1, 1) - &alpha()));
                assert_eq!(shared, &[l("A")]);
                assert!(witness.0 < *discontinuity && *discontinuity < witness.1);
            }
            other => panic!("unexpected {other:?}"),
        }

        let identity = PiecewiseMap::identity(5).unwrap();
        assert_eq!(
            is_good(&split_ab(), &identity).unwrap().violations(),
            &[
                GoodnessViolation::NotConvex { letter: l("A"), components: 2 },
                GoodnessViolation::NotConvex { letter: l("B"), components: 2 },
            ]
        );

        let other_field = PiecewiseMap::identity(2).unwrap();
        assert!(matches!(is_good(&natural(), &other_field), Err(SubdivisionError::Scalar(_))));
    }

    #[test]
    fn condition_two_passes_when_sides_land_apart() {
        // rotation by 1/2 with {A: [0, 3/4), B: [3/4, 1)}: A straddles 1/2;
        // left side [0,1/2) lands in [1/2,1) meeting A and B, right side
        // [1/2,3/4) lands in [0,1/4) meeting only A
        let rot = PiecewiseMap::rotation(&q(1, 2)).unwrap();
        let sub = canonicalize(vec![(l("A"), vec![ho(q(0, 1), q(3, 4))]), (l("B"), vec![ho(q(3, 4), q(1, 1))])]).unwrap();
        assert!(!is_good(&sub, &rot).unwrap().is_good());

        // {A: [1/4, 3/4), B: rest}: sides of 1/2 map to [3/4,1) (B) and [0,1/4) (B)
        let sub = canonicalize(vec![
            (l("A"), vec![ho(q(1, 4), q(3, 4))]),
            (l("B"), vec![ho(q(0, 1), q(1, 4)), ho(q(3, 4), q(1, 1))]),
        ])
        .unwrap();
        let v = is_good(&sub, &rot).unwrap();
        assert!(matches!(v.violations(), [GoodnessViolation::NotConvex { .. }, GoodnessViolation::ImagesShareColor { .. }]));

        // {A: [1/4, 3/4), B: [3/4,1), C: [0,1/4)}: images are B and C, disjoint
        let sub = canonicalize(vec![
            (l("A"), vec![ho(q(1, 4), q(3, 4))]),
            (l("B"), vec![ho(q(3, 4), q(1, 1))]),
            (l("C"), vec![ho(q(0, 1), q(1, 4))]),
        ])
        .unwrap();
        assert!(is_good(&sub, &rot).unwrap().is_good());
    }

    #[test]
    fn refine_examples() {
        let r = golden();
        let refined = refine_to_good(&natural(), &r).unwrap();
        assert!(refined.subdivision.same_partition(&natural()));
        assert!(refined.gluing.is_bijective());

        let single = Subdivision::trivial(l("A"), 5).unwrap();
        let refined = refine_to_good(&single, &r).unwrap();
        let cut = &q(1, 1) - &alpha();
        let expected = canonicalize(vec![(l("A0"), vec![ho(q(0, 1), cut.clone())]), (l("A1"), vec![ho(cut, q(1, 1))])]).unwrap();
        assert_eq!(refined.subdivision, expected);
        assert_eq!(refined.gluing.pairs(), &[(l("A0"), l("A")), (l("A1"), l("A"))]);
        assert!(is_good(&refined.subdivision, &r).unwrap().is_good());

        let identity = PiecewiseMap::identity(5).unwrap();
        let refined = refine_to_good(&split_ab(), &identity).unwrap();
        assert_eq!(refined.subdivision.alphabet(), &[l("A0"), l("A1"), l("B0"), l("B1")]);
        assert!(is_good(&refined.subdivision, &identity).unwrap().is_good());
        assert_eq!(refined.gluing.get(&l("B1")), Some(&l("B")));
    }

    #[test]
    fn refine_keeps_flags_and_cut_joins_right() {
        // rotation by 1/2 cuts at 1/2; A = [0, 1/2] ∪ (3/4, 1) keeps 1/2 on the left
        let rot = PiecewiseMap::rotation(&q(1, 2)).unwrap();
        let sub = canonicalize(vec![
            (l("A"), vec![Span::new(q(1, 4), true, q(3, 4), true).unwrap()]),
            (l("B"), vec![ho(q(0, 1), q(1, 4)), Span::new(q(3, 4), false, q(1, 1), false).unwrap()]),
        ])
        .unwrap();
        let refined = refine_to_good(&sub, &rot).unwrap();
        assert_eq!(refined.subdivision.to_string(), "A0: [1/4, 1/2); A1: [1/2, 3/4]; B0: [0, 1/4); B1: (3/4, 1)");
    }

    #[test]
    fn fresh_name_collisions_use_separator() {
        // A has twelve pieces, so "A" + "10" would clash with "A1" + "0"
        let sub = canonicalize(vec![
            (l("A"), (0..24).step_by(2).map(|i| ho(q(i, 24), q(i + 1, 24))).collect()),
            (l("A1"), (1..24).step_by(2).map(|i| ho(q(i, 24), q(i + 1, 24))).collect()),
        ])
        .unwrap();
        let identity = PiecewiseMap::identity(5).unwrap();
        let refined = refine_to_good(&sub, &identity).unwrap();
        let names: BTreeSet<&Letter> = refined.subdivision.alphabet().iter().collect();
        assert_eq!(names.len(), 24);
        assert!(names.contains(&l("A_10")) && names.contains(&l("A1_0")));
    }

    #[test]
    fn glue_examples() {
        let gluing = GluingMap::new(vec![(l("A0"), l("A")), (l("A1"), l("A"))], &[l("A")]).unwrap();
        let word = SymbolicWord::from_letters(vec![l("A0"), l("A1"), l("A0")]);
        let glued = glue_word(&word, &gluing).unwrap();
        assert_eq!(glued.to_string(), "A A A");
        assert!(glued.origin().projected);

        let id = GluingMap::identity(&[l("A0"), l("A1")]);
        assert_eq!(glue_word(&word, &id).unwrap().letters(), word.letters());

        let bad = SymbolicWord::from_letters(vec![l("A0"), l("C")]);
        assert_eq!(glue_word(&bad, &gluing), Err(SubdivisionError::UnknownLetter(l("C"))));

        assert_eq!(
            GluingMap::new(vec![(l("A0"), l("A"))], &[l("A"), l("B")]),
            Err(SubdivisionError::NotSurjective(l("B")))
        );
        assert!(matches!(
            GluingMap::new(vec![(l("A0"), l("Z"))], &[l("A")]),
            Err(SubdivisionError::ForeignImage { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn refinement_is_sound(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let map = random::piecewise_map(&mut rng, 5);
            let sub = random::subdivision(&mut rng, 5);
            let refined = refine_to_good(&sub, &map).unwrap();
            prop_assert!(is_good(&refined.subdivision, &map).unwrap().is_good());
            prop_assert!(refined.subdivision.alphabet().len() <= sub.component_count() + map.discontinuities().len());
            for _ in 0..200 {
                let x = random::point(&mut rng, 5);
                let new = refined.subdivision.color_of(&x).unwrap();
                prop_assert_eq!(refined.gluing.get(new).unwrap(), sub.color_of(&x).unwrap());
            }
        }

        #[test]
        fn refining_good_subdivision_renames_only(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let map = random::piecewise_map(&mut rng, 5);
            let sub = refine_to_good(&random::subdivision(&mut rng, 5), &map).unwrap().subdivision;
            let again = refine_to_good(&sub, &map).unwrap();
            prop_assert!(again.subdivision.same_partition(&sub));
            prop_assert!(again.gluing.is_bijective());
        }
    }
}
