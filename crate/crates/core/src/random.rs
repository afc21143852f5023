//! Seeded random instances for property checks and the self-test.
//!
//! Endpoints are rationals with denominator dividing 24 or, in mixed mode,
//! fractional parts of `k/m + j·β` where `β` is the fractional part of `√d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::boundary::Span;
use crate::exactnum::ExactScalar;
use crate::intervalmap::{AffinePiece, HalfOpenInterval, Iet, PiecewiseMap, Slope};
use crate::subdivision::{Letter, Subdivision};

const DENOMINATORS: [i64; 8] = [1, 2, 3, 4, 6, 8, 12, 24];

#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    pub d: u32,
    pub rational_only: bool,
}

impl Sampler {
    pub fn mixed(d: u32) -> Self {
        Self { d, rational_only: d <= 1 }
    }

    pub fn rational(d: u32) -> Self {
        Self { d, rational_only: true }
    }

    fn q(&self, n: i64, m: i64) -> ExactScalar {
        ExactScalar::rational(n, m, self.d).expect("sampler field is squarefree")
    }

    fn frac(&self, mut x: ExactScalar) -> ExactScalar {
        let zero = self.q(0, 1);
        let one = self.q(1, 1);
        while x < zero {
            x = &x + &one;
        }
        while x >= one {
            x = &x - &one;
        }
        x
    }

    /// Fractional part of `√d`.
    fn beta(&self) -> ExactScalar {
        let floor = BigInt::from(self.d).sqrt();
        ExactScalar::new(-floor, 1, 1, 1, self.d).expect("sampler field is squarefree")
    }

    fn grid_point<R: Rng>(&self, rng: &mut R) -> ExactScalar {
        let m = *DENOMINATORS.choose(rng).expect("nonempty");
        self.q(rng.gen_range(0..m), m)
    }

    /// A point of `[0, 1)`.
    pub fn point<R: Rng>(&self, rng: &mut R) -> ExactScalar {
        let base = self.grid_point(rng);
        if self.rational_only || rng.gen_bool(0.5) {
            return base;
        }
        let j = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
        self.frac(&base + &self.beta().scale(&BigRational::from_integer(j.into())))
    }

    /// `count` distinct sorted points of the open interval `(0, 1)`.
    pub fn breakpoints<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<ExactScalar> {
        let zero = self.q(0, 1);
        let mut pts: Vec<ExactScalar> = Vec::with_capacity(count);
        while pts.len() < count {
            let p = self.point(rng);
            if p != zero && !pts.contains(&p) {
                pts.push(p);
            }
        }
        pts.sort();
        pts
    }

    fn cells<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<(ExactScalar, ExactScalar)> {
        let mut ends = vec![self.q(0, 1)];
        ends.extend(self.breakpoints(rng, count - 1));
        ends.push(self.q(1, 1));
        ends.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    /// An exchange of 2 to 6 intervals.
    pub fn iet<R: Rng>(&self, rng: &mut R) -> Iet {
        let k = rng.gen_range(2..=6);
        let lengths = self.cells(rng, k).into_iter().map(|(lo, hi)| &hi - &lo).collect();
        let mut permutation: Vec<usize> = (0..k).collect();
        permutation.shuffle(rng);
        Iet::new(lengths, permutation).expect("cells tile [0, 1)")
    }

    /// A bijective translation map with 2 to 6 pieces, built directly from
    /// the image order. Some pieces are split in two without changing the
    /// map, so the piece count can exceed the number of exchanged blocks.
    pub fn translation_bijection<R: Rng>(&self, rng: &mut R) -> PiecewiseMap {
        let k = rng.gen_range(2..=6);
        let cells = self.cells(rng, k);
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        let mut image_lo = vec![self.q(0, 1); k];
        let mut acc = self.q(0, 1);
        for &i in &order {
            image_lo[i] = acc.clone();
            acc = &acc + &(&cells[i].1 - &cells[i].0);
        }
        let mut pieces = Vec::new();
        for (i, (lo, hi)) in cells.into_iter().enumerate() {
            let shift = &image_lo[i] - &lo;
            if rng.gen_bool(0.25) {
                let mid = crate::boundary::midpoint(&lo, &hi);
                pieces.push(AffinePiece::translation(lo, mid.clone(), shift.clone()).expect("ordered cell"));
                pieces.push(AffinePiece::translation(mid, hi, shift).expect("ordered cell"));
            } else {
                pieces.push(AffinePiece::translation(lo, hi, shift).expect("ordered cell"));
            }
        }
        PiecewiseMap::new(pieces).expect("nonempty")
    }

    /// A valid piecewise isometry with 2 to 6 pieces: an IET most of the
    /// time, otherwise pieces of slope ±1 placed independently (possibly
    /// overlapping images).
    pub fn piecewise_map<R: Rng>(&self, rng: &mut R) -> PiecewiseMap {
        if rng.gen_bool(0.6) {
            return self.iet(rng).to_map();
        }
        let k = rng.gen_range(2..=6);
        let pieces = self
            .cells(rng, k)
            .into_iter()
            .map(|(lo, hi)| {
                let room = &self.q(1, 1) - &(&hi - &lo);
                let start = if self.rational_only {
                    // stay on the 1/24 grid: room is a positive multiple of 1/24
                    let steps: i64 = (room.rational_part() * BigRational::from_integer(24.into()))
                        .to_integer()
                        .try_into()
                        .expect("small grid");
                    self.q(rng.gen_range(0..steps), 24)
                } else {
                    let m = *DENOMINATORS.choose(rng).expect("nonempty");
                    room.scale(&BigRational::new(rng.gen_range(0..m).into(), m.into()))
                };
                let domain = HalfOpenInterval::new(lo.clone(), hi.clone()).expect("ordered cell");
                if rng.gen_bool(0.5) {
                    AffinePiece::new(domain, Slope::Plus, &start - &lo)
                } else {
                    // image (start, start + length]
                    AffinePiece::new(domain, Slope::Minus, &start + &hi)
                }
                .expect("shared field")
            })
            .collect();
        let map = PiecewiseMap::new(pieces).expect("nonempty");
        debug_assert!(map.validate().is_valid(), "{map}");
        map
    }

    /// 2 to 5 letters with 1 to 4 components each; every cut point is
    /// randomly assigned to the class on its left or right.
    pub fn subdivision<R: Rng>(&self, rng: &mut R) -> Subdivision {
        let colors = rng.gen_range(2..=5);
        let mut owners: Vec<usize> = (0..colors).flat_map(|c| std::iter::repeat_n(c, rng.gen_range(1..=4))).collect();
        for _ in 0..8 {
            owners.shuffle(rng);
            if owners.windows(2).all(|w| w[0] != w[1]) {
                break;
            }
        }
        let cells = self.cells(rng, owners.len());
        let n = cells.len();
        let mut left_closed = vec![true; n];
        let mut right_closed = vec![false; n];
        for i in 1..n {
            if rng.gen_bool(0.3) {
                left_closed[i] = false;
                right_closed[i - 1] = true;
            }
        }
        let mut raw: Vec<(Letter, Vec<Span>)> = (0..colors)
            .map(|c| (Letter::new(&((b'A' + c as u8) as char).to_string()).expect("ascii letter"), Vec::new()))
            .collect();
        for (i, (lo, hi)) in cells.into_iter().enumerate() {
            let span = Span::new(lo, left_closed[i], hi, right_closed[i]).expect("nonempty cell");
            raw[owners[i]].1.push(span);
        }
        Subdivision::canonicalize(raw).expect("cells partition [0, 1)")
    }
}

pub fn point<R: Rng>(rng: &mut R, d: u32) -> ExactScalar {
    Sampler::mixed(d).point(rng)
}

pub fn iet<R: Rng>(rng: &mut R, d: u32) -> Iet {
    Sampler::mixed(d).iet(rng)
}

pub fn piecewise_map<R: Rng>(rng: &mut R, d: u32) -> PiecewiseMap {
    Sampler::mixed(d).piecewise_map(rng)
}

pub fn subdivision<R: Rng>(rng: &mut R, d: u32) -> Subdivision {
    Sampler::mixed(d).subdivision(rng)
}
