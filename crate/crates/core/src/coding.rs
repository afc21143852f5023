//! Orbit generation and symbolic coding.
//!
//! The word of `x0` under a map `T` and subdivision `S` is the sequence of
//! letters of `x0, T(x0), T²(x0), …`; it starts at exponent 0.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::exactnum::{ExactScalar, ScalarError};
use crate::intervalmap::{MapError, MapId, PiecewiseMap};
use crate::subdivision::{Letter, Subdivision, SubdivisionError, SubdivisionId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("prefix length must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Where a word came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Origin {
    pub map_id: Option<MapId>,
    pub subdivision_id: Option<SubdivisionId>,
    pub x0: Option<ExactScalar>,
    pub length: usize,
    /// Set once the word has been pushed through a gluing map.
    pub projected: bool,
}

/// A finite prefix of a coded orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicWord {
    letters: Vec<Letter>,
    origin: Origin,
}

impl SymbolicWord {
    /// A word with no provenance beyond its length.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let origin = Origin { length: letters.len(), ..Origin::default() };
        Self { letters, origin }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub(crate) fn projected(&self, letters: Vec<Letter>) -> Self {
        debug_assert_eq!(letters.len(), self.letters.len());
        Self { letters, origin: Origin { projected: true, ..self.origin.clone() } }
    }

    /// Whitespace-separated tokens, `wrap` tokens per line when given.
    pub fn render(&self, wrap: Option<usize>) -> String {
        let mut out = String::new();
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                let new_line = wrap.is_some_and(|w| w > 0 && i % w == 0);
                out.push(if new_line { '\n' } else { ' ' });
            }
            out.push_str(l.as_str());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let letters: Vec<&str> = self.letters.iter().map(Letter::as_str).collect();
        json!({
            "letters": letters,
            "origin": {
                "map": self.origin.map_id.map(|m| m.to_string()),
                "subdivision": self.origin.subdivision_id.map(|s| s.to_string()),
                "x0": self.origin.x0.as_ref().map(|x| x.to_string()),
                "length": self.origin.length,
                "projected": self.origin.projected,
            }
        })
    }
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    points: Vec<ExactScalar>,
}

impl Orbit {
    pub fn points(&self) -> &[ExactScalar] {
        &self.points
    }
}

/// The first `n` points `x0, T(x0), …, Tⁿ⁻¹(x0)`.
pub fn orbit(map: &PiecewiseMap, x0: &ExactScalar, n: usize) -> Result<Orbit, CodingError> {
    if n == 0 {
        return Err(CodingError::ZeroLength);
    }
    let mut points = Vec::with_capacity(n);
    let mut x = x0.clone();
    map.locate(&x)?;
    for _ in 1..n {
        let next = map.apply(&x)?;
        points.push(std::mem::replace(&mut x, next));
    }
    points.push(x);
    Ok(Orbit { points })
}

fn check_fields(map: &PiecewiseMap, sub: &Subdivision) -> Result<(), CodingError> {
    if map.field() != sub.field() {
        return Err(ScalarError::FieldMismatch { left: map.field(), right: sub.field() }.into());
    }
    Ok(())
}

fn code_orbit(map: &PiecewiseMap, sub: &Subdivision, x0: &ExactScalar, orbit: &Orbit) -> Result<SymbolicWord, CodingError> {
    let letters = orbit
        .points
        .iter()
        .map(|x| sub.color_of(x).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SymbolicWord {
        origin: Origin {
            map_id: Some(map.id()),
            subdivision_id: Some(sub.id()),
            x0: Some(x0.clone()),
            length: letters.len(),
            projected: false,
        },
        letters,
    })
}

/// The length-`n` prefix of the coding of `x0`.
pub fn code(map: &PiecewiseMap, sub: &Subdivision, x0: &ExactScalar, n: usize) -> Result<SymbolicWord, CodingError> {
    check_fields(map, sub)?;
    let orbit = orbit(map, x0, n)?;
    code_orbit(map, sub, x0, &orbit)
}

/// Letter-at-a-time coding that keeps only the current orbit point.
pub struct WordStream<'a> {
    map: &'a PiecewiseMap,
    sub: &'a Subdivision,
    current: Option<ExactScalar>,
}

impl<'a> WordStream<'a> {
    pub fn new(map: &'a PiecewiseMap, sub: &'a Subdivision, x0: &ExactScalar) -> Result<Self, CodingError> {
        check_fields(map, sub)?;
        map.locate(x0)?;
        Ok(Self { map, sub, current: Some(x0.clone()) })
    }
}

impl Iterator for WordStream<'_> {
    type Item = Result<Letter, CodingError>;

    fn next(&mut self) -> Option<Self::Item> {
        let x = self.current.take()?;
        let letter = match self.sub.color_of(&x) {
            Ok(l) => l.clone(),
            Err(e) => return Some(Err(e.into())),
        };
        match self.map.apply(&x) {
            Ok(next) => self.current = Some(next),
            Err(e) => return Some(Err(e.into())),
        }
        Some(Ok(letter))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundTrip {
    Ok,
    Mismatch(usize),
}

impl fmt::Display for RoundTrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundTrip::Ok => f.write_str("OK"),
            RoundTrip::Mismatch(i) => write!(f, "Mismatch({i})"),
        }
    }
}

/// Refines `sub` to a good subdivision, codes `x0` with both, glues the
/// refined word back and compares it with the original word.
pub fn roundtrip_check(map: &PiecewiseMap, sub: &Subdivision, x0: &ExactScalar, n: usize) -> Result<RoundTrip, CodingError> {
    check_fields(map, sub)?;
    let refined = sub.refine_to_good(map)?;
    let orbit = orbit(map, x0, n)?;
    let fine = code_orbit(map, &refined.subdivision, x0, &orbit)?;
    let coarse = code_orbit(map, sub, x0, &orbit)?;
    let glued = refined.gluing.glue_word(&fine)?;
    Ok(first_mismatch(&glued, &coarse).map_or(RoundTrip::Ok, RoundTrip::Mismatch))
}

fn first_mismatch(a: &SymbolicWord, b: &SymbolicWord) -> Option<usize> {
    a.letters
        .iter()
        .zip(&b.letters)
        .position(|(x, y)| x != y)
        .or_else(|| (a.len() != b.len()).then(|| a.len().min(b.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Span;
    use crate::exactnum::decimal_oracle;
    use crate::random;
    use crate::subdivision::canonicalize;
    use num_integer::Integer;
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

    fn natural() -> Subdivision {
        let cut = &q(1, 1) - &alpha();
        canonicalize(vec![
            (l("0"), vec![Span::half_open(q(0, 1), cut.clone()).unwrap()]),
            (l("1"), vec![Span::half_open(cut, q(1, 1)).unwrap()]),
        ])
        .unwrap()
    }

    /// `natural` with the two labels exchanged: letter 0 gets the long
    /// interval, matching letter frequencies of the Fibonacci word.
    fn fibonacci_partition() -> Subdivision {
        let cut = &q(1, 1) - &alpha();
        canonicalize(vec![
            (l("0"), vec![Span::half_open(cut.clone(), q(1, 1)).unwrap()]),
            (l("1"), vec![Span::half_open(q(0, 1), cut).unwrap()]),
        ])
        .unwrap()
    }

    fn halves() -> Subdivision {
        canonicalize(vec![
            (l("A"), vec![Span::half_open(q(0, 1), q(1, 2)).unwrap()]),
            (l("B"), vec![Span::half_open(q(1, 2), q(1, 1)).unwrap()]),
        ])
        .unwrap()
    }

    /// Fibonacci word from the substitution 0 → 01, 1 → 0.
    fn fibonacci(n: usize) -> String {
        let mut w = String::from("0");
        while w.len() < n {
            w = w.chars().map(|c| if c == '0' { "01" } else { "0" }).collect();
        }
        w.truncate(n);
        w
    }

    #[test]
    fn orbit_examples() {
        let id = PiecewiseMap::identity(5).unwrap();
        assert_eq!(orbit(&id, &q(1, 3), 4).unwrap().points(), &[q(1, 3), q(1, 3), q(1, 3), q(1, 3)]);

        let third = PiecewiseMap::rotation(&q(1, 3)).unwrap();
        assert_eq!(orbit(&third, &q(0, 1), 4).unwrap().points(), &[q(0, 1), q(1, 3), q(2, 3), q(0, 1)]);

        let golden = PiecewiseMap::rotation(&alpha()).unwrap();
        assert_eq!(decimal_oracle::cmp(&alpha(), &(&q(1, 1) - &alpha())), std::cmp::Ordering::Greater);
        assert_eq!(
            orbit(&golden, &q(0, 1), 3).unwrap().points(),
            &[q(0, 1), alpha(), &(&alpha() + &alpha()) - &q(1, 1)]
        );

        assert_eq!(orbit(&id, &q(1, 3), 0), Err(CodingError::ZeroLength));
        assert!(matches!(orbit(&id, &q(1, 1), 3), Err(CodingError::Map(MapError::PointOutsideDomain(_)))));
    }

    #[test]
    fn code_examples() {
        let id = PiecewiseMap::identity(5).unwrap();
        assert_eq!(code(&id, &natural(), &q(0, 1), 5).unwrap().to_string(), "0 0 0 0 0");

        let third = PiecewiseMap::rotation(&q(1, 3)).unwrap();
        assert_eq!(code(&third, &halves(), &q(0, 1), 6).unwrap().to_string(), "A A B A A B");

        let golden = PiecewiseMap::rotation(&alpha()).unwrap();
        let word = code(&golden, &fibonacci_partition(), &alpha(), 20).unwrap();
        assert_eq!(word.letters().iter().map(Letter::as_str).collect::<String>(), fibonacci(20));
        let complement: String = fibonacci(20).chars().map(|c| if c == '0' { '1' } else { '0' }).collect();
        let natural_word = code(&golden, &natural(), &alpha(), 20).unwrap();
        assert_eq!(natural_word.letters().iter().map(Letter::as_str).collect::<String>(), complement);
        assert_eq!(word.origin().x0, Some(alpha()));
        assert_eq!(word.origin().length, 20);
    }

    #[test]
    fn render_wraps() {
        let word = SymbolicWord::from_letters(vec![l("a"); 5]);
        assert_eq!(word.render(Some(2)), "a a\na a\na");
        assert_eq!(word.to_json()["letters"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn stream_matches_batch() {
        let golden = PiecewiseMap::rotation(&alpha()).unwrap();
        let batch = code(&golden, &natural(), &q(1, 7), 500).unwrap();
        let streamed: Vec<Letter> = WordStream::new(&golden, &natural(), &q(1, 7))
            .unwrap()
            .take(500)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(batch.letters(), &streamed[..]);
    }

    #[test]
    fn roundtrip_examples() {
        let golden = PiecewiseMap::rotation(&alpha()).unwrap();
        let single = Subdivision::trivial(l("A"), 5).unwrap();
        assert_eq!(roundtrip_check(&golden, &single, &q(0, 1), 1000).unwrap(), RoundTrip::Ok);
        assert_eq!(roundtrip_check(&golden, &natural(), &alpha(), 1000).unwrap(), RoundTrip::Ok);
        let id = PiecewiseMap::identity(5).unwrap();
        assert_eq!(roundtrip_check(&id, &halves(), &q(3, 5), 10).unwrap(), RoundTrip::Ok);
        assert_eq!(RoundTrip::Mismatch(4).to_string(), "Mismatch(4)");
    }

    #[test]
    fn mismatch_index() {
        let a = SymbolicWord::from_letters(vec![l("a"), l("b"), l("c")]);
        let b = SymbolicWord::from_letters(vec![l("a"), l("b"), l("d")]);
        assert_eq!(first_mismatch(&a, &b), Some(2));
        assert_eq!(first_mismatch(&a, &a), None);
    }

    #[test]
    fn field_mismatch_is_reported() {
        let map = PiecewiseMap::identity(2).unwrap();
        assert!(matches!(code(&map, &natural(), &q(0, 1), 3), Err(CodingError::Scalar(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn universal_roundtrip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let map = random::piecewise_map(&mut rng, 5);
            let sub = random::subdivision(&mut rng, 5);
            let x0 = random::point(&mut rng, 5);
            prop_assert_eq!(roundtrip_check(&map, &sub, &x0, 300).unwrap(), RoundTrip::Ok);
        }

        #[test]
        fn orbit_denominators_divide_input_lcm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let map = random::iet(&mut rng, 5).to_map();
            let x0 = random::point(&mut rng, 5);
            let inputs = map.pieces().iter().map(|p| &p.intercept).chain([&x0]);
            let (a_lcm, b_lcm) = inputs.fold((1.into(), 1.into()), |(a, b): (num_bigint::BigInt, num_bigint::BigInt), s| {
                (a.lcm(s.a_den()), b.lcm(s.b_den()))
            });
            for p in orbit(&map, &x0, 200).unwrap().points() {
                prop_assert!(a_lcm.is_multiple_of(p.a_den()));
                prop_assert!(b_lcm.is_multiple_of(p.b_den()));
            }
        }

        #[test]
        fn periodic_orbits_give_periodic_words(q_den in 1i64..12, p_num in 0i64..12, start in 0i64..60) {
            let p_num = p_num % q_den;
            let map = PiecewiseMap::rotation(&q(p_num, q_den)).unwrap();
            let word = code(&map, &halves(), &q(start, 60), 4 * q_den as usize).unwrap();
            let period = q_den as usize;
            for i in period..word.len() {
                prop_assert_eq!(&word.letters()[i], &word.letters()[i - period]);
            }
        }
    }
}
