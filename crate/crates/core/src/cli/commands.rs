use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::spec::{gluing_json, iet_json, subdivision_json};
use super::{CliError, Command, Context, Outcome};
use crate::analysis::{complexity, detect_period, recurrence_profile, Periodicity};
use crate::boundary::Span;
use crate::coding::{code, roundtrip_check, RoundTrip};
use crate::exactnum::ExactScalar;
use crate::intervalmap::{to_iet, PiecewiseMap};
use crate::random::Sampler;
use crate::subdivision::{Goodness, Letter, Subdivision};

/// Letters per line in text word output.
const WRAP: usize = 80;

pub fn builtin_commands() -> Vec<Box<dyn Command>> {
    vec![
        Box::new(Generate),
        Box::new(CheckGood),
        Box::new(Refine),
        Box::new(Roundtrip),
        Box::new(Analyze),
        Box::new(ToIet),
        Box::new(SelfTest),
    ]
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(domain)?;
    writeln!(out, "{text}")?;
    Ok(())
}

struct Generate;

impl Command for Generate {
    fn name(&self) -> &'static str {
        "generate"
    }

    fn summary(&self) -> &'static str {
        "print the coded word of x0"
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let spec = ctx.spec()?;
        let word = code(&spec.map, &spec.subdivision, &spec.x0, ctx.length).map_err(domain)?;
        if ctx.json {
            emit_json(out, &word.to_json())?;
        } else {
            writeln!(out, "{}", word.render(Some(WRAP)))?;
        }
        Ok(Outcome::Success)
    }
}

struct CheckGood;

impl Command for CheckGood {
    fn name(&self) -> &'static str {
        "check-good"
    }

    fn summary(&self) -> &'static str {
        "test whether the subdivision is good for the map"
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let spec = ctx.spec()?;
        let verdict = spec.subdivision.is_good(&spec.map).map_err(domain)?;
        match &verdict {
            Goodness::Good(cert) if ctx.json => emit_json(
                out,
                &json!({
                    "good": true,
                    "map": cert.map_id().to_string(),
                    "subdivision": cert.subdivision().id().to_string(),
                }),
            )?,
            Goodness::Good(cert) => {
                writeln!(out, "GOOD")?;
                writeln!(out, "map: {}", cert.map_id())?;
                writeln!(out, "subdivision: {}", cert.subdivision().id())?;
            }
            Goodness::Violations(vs) if ctx.json => {
                let vs: Vec<String> = vs.iter().map(ToString::to_string).collect();
                emit_json(out, &json!({ "good": false, "violations": vs }))?;
            }
            Goodness::Violations(vs) => {
                writeln!(out, "NOT GOOD: {} violation(s)", vs.len())?;
                for v in vs {
                    writeln!(out, "  {v}")?;
                }
            }
        }
        Ok(if verdict.is_good() { Outcome::Success } else { Outcome::Failure })
    }
}

struct Refine;

impl Command for Refine {
    fn name(&self) -> &'static str {
        "refine"
    }

    fn summary(&self) -> &'static str {
        "refine the subdivision into a good one (JSON)"
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let spec = ctx.spec()?;
        let refined = spec.subdivision.refine_to_good(&spec.map).map_err(domain)?;
        emit_json(
            out,
            &json!({
                "subdivision": subdivision_json(&refined.subdivision),
                "gluing": gluing_json(&refined.gluing),
            }),
        )?;
        Ok(Outcome::Success)
    }
}

struct Roundtrip;

impl Command for Roundtrip {
    fn name(&self) -> &'static str {
        "roundtrip"
    }

    fn summary(&self) -> &'static str {
        "code with the refined subdivision, glue, and compare"
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let spec = ctx.spec()?;
        let result = roundtrip_check(&spec.map, &spec.subdivision, &spec.x0, ctx.length).map_err(domain)?;
        if ctx.json {
            let value = match result {
                RoundTrip::Ok => json!({ "result": "OK", "length": ctx.length }),
                RoundTrip::Mismatch(i) => json!({ "result": "Mismatch", "index": i, "length": ctx.length }),
            };
            emit_json(out, &value)?;
        } else {
            writeln!(out, "{result}")?;
        }
        Ok(if result == RoundTrip::Ok { Outcome::Success } else { Outcome::Failure })
    }
}

struct Analyze;

fn table(out: &mut dyn Write, title: &str, header: [&str; 2], rows: &[(String, String)]) -> Result<(), CliError> {
    let w0 = rows.iter().map(|r| r.0.len()).chain([header[0].len()]).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.len()).chain([header[1].len()]).max().unwrap_or(0);
    writeln!(out, "{title}")?;
    writeln!(out, "  {:>w0$}  {:>w1$}", header[0], header[1])?;
    for (a, b) in rows {
        writeln!(out, "  {a:>w0$}  {b:>w1$}")?;
    }
    Ok(())
}

impl Command for Analyze {
    fn name(&self) -> &'static str {
        "analyze"
    }

    fn summary(&self) -> &'static str {
        "complexity, recurrence and period of the coded word"
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let spec = ctx.spec()?;
        let word = code(&spec.map, &spec.subdivision, &spec.x0, ctx.length).map_err(domain)?;
        let n_max = ctx.n_max.min(word.len());
        let comp = complexity(&word, n_max).map_err(domain)?;
        let rec = recurrence_profile(&word, n_max);
        let period = detect_period(&word);
        if ctx.json {
            let period_json = match period {
                Periodicity::EventuallyPeriodic { preperiod, period } => {
                    json!({ "preperiod": preperiod, "period": period })
                }
                Periodicity::AperiodicAtScale => json!("APERIODIC_AT_SCALE"),
            };
            emit_json(
                out,
                &json!({
                    "prefix_length": word.len(),
                    "complexity": comp.to_json(),
                    "recurrence": rec.to_json(),
                    "period": period_json,
                }),
            )?;
            return Ok(Outcome::Success);
        }
        let rows: Vec<(String, String)> = comp.values.iter().map(|(n, p)| (n.to_string(), p.to_string())).collect();
        table(out, &format!("complexity (prefix {})", comp.prefix_length), ["n", "p(n)"], &rows)?;
        writeln!(out)?;
        let rows: Vec<(String, String)> = rec
            .values
            .iter()
            .map(|(n, r)| (n.to_string(), r.to_string()))
            .collect();
        table(out, &format!("recurrence (prefix {})", rec.prefix_length), ["n", "window"], &rows)?;
        writeln!(out)?;
        writeln!(out, "period: {period}")?;
        Ok(Outcome::Success)
    }
}

struct ToIet;

impl Command for ToIet {
    fn name(&self) -> &'static str {
        "to-iet"
    }

    fn summary(&self) -> &'static str {
        "rewrite a bijective translation map as an interval exchange (JSON)"
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let spec = ctx.spec()?;
        let iet = to_iet(&spec.map).map_err(domain)?;
        emit_json(out, &iet_json(&iet))?;
        Ok(Outcome::Success)
    }
}

/// Embedded golden suites: the Fibonacci prefix, rational rotation periods
/// and seeded refinement round-trips.
pub struct SelfTest;

struct SuiteResult {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn q(n: i64, m: i64, d: u32) -> ExactScalar {
    ExactScalar::rational(n, m, d).expect("squarefree field")
}

fn letter(s: &str) -> Letter {
    Letter::new(s).expect("valid letter")
}

fn fibonacci_suite(length: usize, n_max: usize) -> Result<SuiteResult, CliError> {
    let alpha = ExactScalar::new(-1, 2, 1, 2, 5).map_err(domain)?;
    let rotation = PiecewiseMap::rotation(&alpha).map_err(domain)?;
    let cut = &q(1, 1, 5) - &alpha;
    // letter 0 on the long interval, as in the Fibonacci word
    let partition = Subdivision::canonicalize(vec![
        (letter("0"), vec![Span::half_open(cut.clone(), q(1, 1, 5)).map_err(domain)?]),
        (letter("1"), vec![Span::half_open(q(0, 1, 5), cut).map_err(domain)?]),
    ])
    .map_err(domain)?;
    let word = code(&rotation, &partition, &alpha, length).map_err(domain)?;

    let mut expected = String::from("0");
    while expected.len() < length {
        expected = expected.chars().map(|c| if c == '0' { "01" } else { "0" }).collect();
    }
    let got: String = word.letters().iter().map(Letter::as_str).collect();
    if got != expected[..length] {
        let at = got.bytes().zip(expected.bytes()).position(|(a, b)| a != b).unwrap_or(0);
        return Ok(SuiteResult { name: "fibonacci-prefix", passed: false, detail: format!("letter {at} differs") });
    }
    let n_max = n_max.min(length);
    let comp = complexity(&word, n_max).map_err(domain)?;
    let bad = comp.values.iter().find(|(n, p)| *p != n + 1);
    Ok(match bad {
        Some((n, p)) => SuiteResult { name: "fibonacci-prefix", passed: false, detail: format!("p({n}) = {p}") },
        None => SuiteResult {
            name: "fibonacci-prefix",
            passed: true,
            detail: format!("{length} letters, p(n) = n + 1 for n <= {n_max}"),
        },
    })
}

fn rotation_suite(length: usize) -> Result<SuiteResult, CliError> {
    let halves = Subdivision::canonicalize(vec![
        (letter("A"), vec![Span::half_open(q(0, 1, 0), q(1, 2, 0)).map_err(domain)?]),
        (letter("B"), vec![Span::half_open(q(1, 2, 0), q(1, 1, 0)).map_err(domain)?]),
    ])
    .map_err(domain)?;
    let length = length.min(1000);
    let mut checked = 0;
    for den in 1..=12i64 {
        for num in 0..den {
            if num_integer::gcd(num, den) != 1 && !(num == 0 && den == 1) {
                continue;
            }
            let map = PiecewiseMap::rotation(&q(num, den, 0)).map_err(domain)?;
            let word = code(&map, &halves, &q(0, 1, 0), length).map_err(domain)?;
            match detect_period(&word) {
                Periodicity::EventuallyPeriodic { preperiod: 0, period } if (den as usize).is_multiple_of(period) => {}
                other => {
                    return Ok(SuiteResult {
                        name: "rational-rotations",
                        passed: false,
                        detail: format!("rotation {num}/{den}: {other}"),
                    })
                }
            }
            checked += 1;
        }
    }
    Ok(SuiteResult { name: "rational-rotations", passed: true, detail: format!("{checked} rotations, period divides q") })
}

fn roundtrip_suite(seed: u64, length: usize) -> Result<SuiteResult, CliError> {
    const INSTANCES: usize = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = Sampler::mixed(5);
    let length = length.min(2000);
    for i in 0..INSTANCES {
        let map = sampler.piecewise_map(&mut rng);
        let sub = sampler.subdivision(&mut rng);
        let x0 = sampler.point(&mut rng);
        let refined = sub.refine_to_good(&map).map_err(domain)?;
        let good = refined.subdivision.is_good(&map).map_err(domain)?.is_good();
        let result = roundtrip_check(&map, &sub, &x0, length).map_err(domain)?;
        if !good || result != RoundTrip::Ok {
            return Ok(SuiteResult {
                name: "refinement-roundtrips",
                passed: false,
                detail: format!("instance {i}: good = {good}, roundtrip = {result}"),
            });
        }
    }
    Ok(SuiteResult {
        name: "refinement-roundtrips",
        passed: true,
        detail: format!("{INSTANCES} instances, seed {seed}, prefix {length}"),
    })
}

impl Command for SelfTest {
    fn name(&self) -> &'static str {
        "selftest"
    }

    fn summary(&self) -> &'static str {
        "run the embedded golden suites"
    }

    fn needs_spec(&self) -> bool {
        false
    }

    fn run(&self, ctx: &Context, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let suites = [
            fibonacci_suite(ctx.length, ctx.n_max)?,
            rotation_suite(ctx.length)?,
            roundtrip_suite(ctx.seed, ctx.length)?,
        ];
        let passed = suites.iter().all(|s| s.passed);
        if ctx.json {
            let list: Vec<Value> = suites
                .iter()
                .map(|s| json!({ "name": s.name, "passed": s.passed, "detail": s.detail }))
                .collect();
            emit_json(out, &json!({ "passed": passed, "suites": list }))?;
        } else {
            for s in &suites {
                writeln!(out, "[{}] {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail)?;
            }
            writeln!(out, "selftest: {}", if passed { "PASS" } else { "FAIL" })?;
        }
        Ok(if passed { Outcome::Success } else { Outcome::Failure })
    }
}
