//! Factor complexity, recurrence windows and period detection on finite
//! prefixes. Every verdict is about the analysed prefix only.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::coding::SymbolicWord;
use crate::subdivision::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("prefix of length {have} is too short; need at least {need}")]
    PrefixTooShort { have: usize, need: usize },
}

/// Letters replaced by dense ids in order of first appearance.
fn intern(letters: &[Letter]) -> Vec<u32> {
    let mut ids: HashMap<&Letter, u32> = HashMap::new();
    letters
        .iter()
        .map(|l| {
            let next = ids.len() as u32;
            *ids.entry(l).or_insert(next)
        })
        .collect()
}

const HASH_BASE: u64 = 0x100_0000_01b3;

/// Distinct length-`n` factors of `word`, each given by one start offset,
/// together with the start offsets of all occurrences. Factors are bucketed
/// by a rolling hash and split by direct comparison, so hash collisions can
/// never merge two different factors.
fn factor_classes(word: &[u32], n: usize) -> Vec<Vec<usize>> {
    if n == 0 || n > word.len() {
        return Vec::new();
    }
    let top = (0..n - 1).fold(1u64, |acc, _| acc.wrapping_mul(HASH_BASE));
    let mut hash = word[..n].iter().fold(0u64, |h, &c| h.wrapping_mul(HASH_BASE).wrapping_add(u64::from(c) + 1));
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for start in 0..=word.len() - n {
        if start > 0 {
            hash = hash
                .wrapping_sub((u64::from(word[start - 1]) + 1).wrapping_mul(top))
                .wrapping_mul(HASH_BASE)
                .wrapping_add(u64::from(word[start + n - 1]) + 1);
        }
        let bucket = buckets.entry(hash).or_default();
        let factor = &word[start..start + n];
        match bucket.iter().find(|&&c| word[classes[c][0]..classes[c][0] + n] == *factor) {
            Some(&c) => classes[c].push(start),
            None => {
                bucket.push(classes.len());
                classes.push(vec![start]);
            }
        }
    }
    classes
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityProfile {
    /// `(n, p(n))` for `n = 1..=n_max`.
    pub values: Vec<(usize, usize)>,
    pub prefix_length: usize,
}

impl ComplexityProfile {
    pub fn get(&self, n: usize) -> Option<usize> {
        self.values.iter().find(|(m, _)| *m == n).map(|(_, p)| *p)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.iter().map(|(n, p)| json!([n, p])).collect())
    }
}

/// `p(n)` = number of distinct length-`n` factors, for `1 ≤ n ≤ n_max`.
pub fn complexity(word: &SymbolicWord, n_max: usize) -> Result<ComplexityProfile, AnalysisError> {
    if word.len() < n_max.max(1) {
        return Err(AnalysisError::PrefixTooShort { have: word.len(), need: n_max.max(1) });
    }
    let ids = intern(word.letters());
    let values = (1..=n_max).map(|n| (n, factor_classes(&ids, n).len())).collect();
    Ok(ComplexityProfile { values, prefix_length: word.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recurrence {
    Window(usize),
    NotRecurrentAtScale,
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recurrence::Window(w) => write!(f, "{w}"),
            Recurrence::NotRecurrentAtScale => f.write_str("NOT_RECURRENT_AT_SCALE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceProfile {
    pub values: Vec<(usize, Recurrence)>,
    pub prefix_length: usize,
}

impl RecurrenceProfile {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.values
                .iter()
                .map(|(n, r)| match r {
                    Recurrence::Window(w) => json!([n, w]),
                    Recurrence::NotRecurrentAtScale => json!([n, "NOT_RECURRENT_AT_SCALE"]),
                })
                .collect(),
        )
    }
}

/// Smallest `W` such that every length-`W` window of the prefix contains
/// every length-`n` factor of the prefix.
///
/// A window of length `W ≤ N` always exists (`W = N` trivially works), so
/// the verdict is `NOT_RECURRENT_AT_SCALE` when the smallest window exceeds
/// half the prefix: the prefix then holds fewer than two disjoint windows
/// and cannot witness a return of every factor.
pub fn recurrence_window(word: &SymbolicWord, n: usize) -> Result<Recurrence, AnalysisError> {
    let len = word.len();
    let need = 4 * n.max(1);
    if len < need {
        return Err(AnalysisError::PrefixTooShort { have: len, need });
    }
    let ids = intern(word.letters());
    let mut window = n;
    for starts in factor_classes(&ids, n) {
        // window [s, s + W) must contain some occurrence p with s ≤ p and p + n ≤ s + W
        let first = starts[0];
        let last = *starts.last().expect("nonempty class");
        window = window.max(first + n).max(len - last);
        for pair in starts.windows(2) {
            window = window.max(pair[1] - pair[0] + n - 1);
        }
    }
    Ok(if 2 * window > len { Recurrence::NotRecurrentAtScale } else { Recurrence::Window(window) })
}

/// Recurrence windows for every `n` in `1..=n_max` that the prefix length
/// supports.
pub fn recurrence_profile(word: &SymbolicWord, n_max: usize) -> RecurrenceProfile {
    let values = (1..=n_max)
        .map_while(|n| recurrence_window(word, n).ok().map(|r| (n, r)))
        .collect();
    RecurrenceProfile { values, prefix_length: word.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    EventuallyPeriodic { preperiod: usize, period: usize },
    AperiodicAtScale,
}

impl fmt::Display for Periodicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Periodicity::EventuallyPeriodic { preperiod, period } => write!(f, "({preperiod}, {period})"),
            Periodicity::AperiodicAtScale => f.write_str("APERIODIC_AT_SCALE"),
        }
    }
}

/// Failure function: `border[i]` is the length of the longest proper border
/// of `s[..=i]`.
fn failure_function(s: &[u32]) -> Vec<usize> {
    let mut border = vec![0; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = border[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        border[i] = k;
    }
    border
}

/// Smallest `(preperiod, period)` consistent with the prefix.
///
/// Each suffix `w[t..]` is a prefix of the reversed word, so one failure
/// function over the reversal gives the smallest period of every suffix.
/// A candidate `(t, p)` is accepted when the first full period ends by the
/// middle of the prefix (`t + p ≤ len/2`), so the second half confirms the
/// repetition; the smallest such preperiod wins.
pub fn detect_period(word: &SymbolicWord) -> Periodicity {
    let ids = intern(word.letters());
    let len = ids.len();
    if len == 0 {
        return Periodicity::AperiodicAtScale;
    }
    let reversed: Vec<u32> = ids.iter().rev().copied().collect();
    let border = failure_function(&reversed);
    for preperiod in 0..len / 2 {
        let tail = len - preperiod;
        let period = tail - border[tail - 1];
        if preperiod + period <= len / 2 {
            return Periodicity::EventuallyPeriodic { preperiod, period };
        }
    }
    Periodicity::AperiodicAtScale
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn word(s: &str) -> SymbolicWord {
        SymbolicWord::from_letters(s.split_whitespace().map(|t| Letter::new(t).unwrap()).collect())
    }

    fn chars(s: &str) -> SymbolicWord {
        SymbolicWord::from_letters(s.chars().map(|c| Letter::new(&c.to_string()).unwrap()).collect())
    }

    fn fibonacci(n: usize) -> String {
        let mut w = String::from("0");
        while w.len() < n {
            w = w.chars().map(|c| if c == '0' { "01" } else { "0" }).collect();
        }
        w.truncate(n);
        w
    }

    fn brute_complexity(s: &str, n: usize) -> usize {
        (0..=s.len() - n).map(|i| &s[i..i + n]).collect::<HashSet<_>>().len()
    }

    /// Quadratic scan: tries every W and every window.
    fn brute_window(s: &str, n: usize) -> usize {
        let factors: HashSet<&str> = (0..=s.len() - n).map(|i| &s[i..i + n]).collect();
        (n..=s.len())
            .find(|&w| (0..=s.len() - w).all(|start| factors.iter().all(|f| s[start..start + w].contains(f))))
            .expect("W = len always works")
    }

    /// Naive periodicity: smallest preperiod, then smallest period, by
    /// direct letter comparison.
    fn brute_period(s: &[u8]) -> Option<(usize, usize)> {
        let len = s.len();
        (0..len / 2).find_map(|t| (1..=len / 2 - t).find(|&p| (t..len - p).all(|i| s[i] == s[i + p])).map(|p| (t, p)))
    }

    #[test]
    fn complexity_examples() {
        let constant = chars(&"A".repeat(40));
        let p = complexity(&constant, 10).unwrap();
        assert!(p.values.iter().all(|&(_, v)| v == 1));

        let aab = chars(&"AAB".repeat(10));
        assert_eq!(complexity(&aab, 3).unwrap().get(3), Some(3));

        let fib = fibonacci(1000);
        let p = complexity(&chars(&fib), 3).unwrap();
        let oracle: Vec<usize> = (1..=3).map(|n| brute_complexity(&fib, n)).collect();
        assert_eq!(oracle, vec![2, 3, 4]);
        assert_eq!(p.values, vec![(1, 2), (2, 3), (3, 4)]);

        assert_eq!(complexity(&chars("AB"), 3), Err(AnalysisError::PrefixTooShort { have: 2, need: 3 }));
    }

    #[test]
    fn complexity_matches_brute_force_on_fibonacci() {
        let fib = fibonacci(3000);
        let p = complexity(&chars(&fib), 60).unwrap();
        for (n, v) in p.values {
            assert_eq!(v, brute_complexity(&fib, n), "n = {n}");
            assert_eq!(v, n + 1);
        }
    }

    #[test]
    fn multi_character_letters_are_atomic() {
        // "A0 A1" and "A 0A 1" must not be confused
        let w = word("A0 A1 A0 A1");
        assert_eq!(complexity(&w, 2).unwrap().values, vec![(1, 2), (2, 2)]);
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(recurrence_window(&chars(&"A".repeat(20)), 3), Ok(Recurrence::Window(3)));
        let lonely = format!("A{}", "B".repeat(30));
        assert_eq!(recurrence_window(&chars(&lonely), 1), Ok(Recurrence::NotRecurrentAtScale));
        assert_eq!(recurrence_window(&chars("AB"), 1), Err(AnalysisError::PrefixTooShort { have: 2, need: 4 }));

        let fib = fibonacci(10_000);
        let fast = recurrence_window(&chars(&fib), 1).unwrap();
        assert_eq!(fast, Recurrence::Window(brute_window(&fib, 1)));
    }

    #[test]
    fn recurrence_matches_brute_force() {
        let fib = fibonacci(800);
        for n in 1..=8 {
            assert_eq!(recurrence_window(&chars(&fib), n).unwrap(), Recurrence::Window(brute_window(&fib, n)), "n = {n}");
        }
        let periodic = "ABACA".repeat(20);
        for n in 1..=5 {
            assert_eq!(recurrence_window(&chars(&periodic), n).unwrap(), Recurrence::Window(brute_window(&periodic, n)));
        }
    }

    #[test]
    fn period_examples() {
        assert_eq!(detect_period(&chars(&"AAB".repeat(10))), Periodicity::EventuallyPeriodic { preperiod: 0, period: 3 });
        assert_eq!(detect_period(&chars(&"A".repeat(9))), Periodicity::EventuallyPeriodic { preperiod: 0, period: 1 });
        assert_eq!(detect_period(&chars(&format!("B{}", "A".repeat(9)))), Periodicity::EventuallyPeriodic { preperiod: 1, period: 1 });
        let fib = fibonacci(1000);
        assert_eq!(brute_period(fib.as_bytes()), None);
        assert_eq!(detect_period(&chars(&fib)), Periodicity::AperiodicAtScale);
        assert_eq!(detect_period(&chars("AB")), Periodicity::AperiodicAtScale);
    }

    #[test]
    fn period_matches_naive_scan() {
        let samples = ["ABCABCABX", "XYABABABAB", "ABAABAABAABA", "AB", "A", "ABBA", "CAAAAAAB", "ABCDABCDAB"];
        for s in samples {
            let expected = brute_period(s.as_bytes())
                .map_or(Periodicity::AperiodicAtScale, |(preperiod, period)| Periodicity::EventuallyPeriodic { preperiod, period });
            assert_eq!(detect_period(&chars(s)), expected, "{s}");
        }
    }
}
