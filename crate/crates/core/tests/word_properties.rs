use iet_words::analysis::{complexity, detect_period, Periodicity};
use iet_words::coding::code;
use iet_words::exactnum::ExactScalar;
use iet_words::intervalmap::PiecewiseMap;
use iet_words::random::Sampler;
use iet_words::subdivision::{Letter, Subdivision};
use iet_words::Span;
use num_integer::Integer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, m: i64, d: u32) -> ExactScalar {
    ExactScalar::rational(n, m, d).unwrap()
}

/// One letter per exchanged interval.
fn interval_coloring(map: &PiecewiseMap) -> Subdivision {
    let raw = map
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let span = Span::half_open(p.domain.lo().clone(), p.domain.hi().clone()).unwrap();
            (Letter::new(&format!("I{i}")).unwrap(), vec![span])
        })
        .collect();
    Subdivision::canonicalize(raw).unwrap()
}

#[test]
fn golden_rotation_is_sturmian_on_a_long_prefix() {
    let alpha = ExactScalar::new(-1, 2, 1, 2, 5).unwrap();
    let rotation = PiecewiseMap::rotation(&alpha).unwrap();
    let cut = &q(1, 1, 5) - &alpha;
    let natural = Subdivision::canonicalize(vec![
        (Letter::new("0").unwrap(), vec![Span::half_open(q(0, 1, 5), cut.clone()).unwrap()]),
        (Letter::new("1").unwrap(), vec![Span::half_open(cut, q(1, 1, 5)).unwrap()]),
    ])
    .unwrap();
    let word = code(&rotation, &natural, &alpha, 100_000).unwrap();
    let profile = complexity(&word, 100).unwrap();
    for (n, p) in profile.values {
        assert_eq!(p, n + 1, "n = {n}");
    }
}

#[test]
fn irrational_iet_complexity_is_at_most_linear() {
    let sampler = Sampler::mixed(5);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    while checked < 4 {
        let iet = sampler.iet(&mut rng);
        if iet.lengths().iter().all(ExactScalar::is_rational) {
            continue;
        }
        let k = iet.lengths().len();
        let map = iet.to_map();
        let word = code(&map, &interval_coloring(&map), &sampler.point(&mut rng), 100_000).unwrap();
        for (n, p) in complexity(&word, 50).unwrap().values {
            assert!(p <= (k - 1) * n + 1, "k = {k}, p({n}) = {p}");
        }
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_rotation_period_divides_q(den in 1i64..40, num in 0i64..40, seed in any::<u64>()) {
        let num = num % den;
        prop_assume!(num.gcd(&den) == 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = Sampler::rational(0);
        let sub = sampler.subdivision(&mut rng);
        let map = PiecewiseMap::rotation(&q(num, den, 0)).unwrap();
        let word = code(&map, &sub, &sampler.point(&mut rng), 3 * den as usize).unwrap();
        match detect_period(&word) {
            Periodicity::EventuallyPeriodic { period, .. } => prop_assert!((den as usize).is_multiple_of(period)),
            Periodicity::AperiodicAtScale => prop_assert!(false, "no period found for {}/{}", num, den),
        }
    }

    #[test]
    fn gluing_does_not_increase_complexity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = Sampler::mixed(5);
        let map = sampler.piecewise_map(&mut rng);
        let sub = sampler.subdivision(&mut rng);
        let x0 = sampler.point(&mut rng);
        let refined = sub.refine_to_good(&map).unwrap();
        let fine = code(&map, &refined.subdivision, &x0, 2000).unwrap();
        let glued = refined.gluing.glue_word(&fine).unwrap();
        let before = complexity(&fine, 20).unwrap();
        let after = complexity(&glued, 20).unwrap();
        for ((n, p_fine), (_, p_glued)) in before.values.iter().zip(&after.values) {
            prop_assert!(p_glued <= p_fine, "n = {}", n);
        }
    }
}
