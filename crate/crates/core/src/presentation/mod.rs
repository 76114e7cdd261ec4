//! Group presentations `⟨S | R⟩` as data, with optional tiers
//! `R₀, R₁, …` for graded families.
//!
//! File format (line oriented, UTF-8):
//!
//! ```text
//! # comment
//! # name: genus-2 surface group
//! alphabet: a b c d
//! tier 1:
//! rel: abABcdCD
//! ```
//!
//! Once any `tier <n>:` header appears, every relator must follow one.

mod coset;

pub use coset::{coset_enumerate, enumerate_cosets, CosetOutcome, CosetTable};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::freeword::{symmetrize, Alphabet, SymmetrizedSet, Word, WordError};
use crate::rational::{in_open_unit_interval, Rational};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: relator is empty")]
    EmptyRelator { line: usize },
    #[error("line {line}: relator {word} is not cyclically reduced")]
    NotCyclicallyReduced { line: usize, word: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("tier list has {tiers} entries for {relators} relators")]
    TierMismatch { tiers: usize, relators: usize },
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("lambda must lie strictly between 0 and 1")]
pub struct BadLambda;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub alphabet: Alphabet,
    relators: Vec<Word>,
    /// Tier index of each relator, parallel to `relators`.
    tiers: Option<Vec<usize>>,
    pub name: String,
    /// Extra comment lines preserved on serialization (e.g. provenance).
    pub notes: Vec<String>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for r in &relators {
            alphabet.check_word(r)?;
            if r.is_empty() {
                return Err(WordError::EmptyRelator.into());
            }
            if !r.is_cyclically_reduced() {
                return Err(WordError::NotCyclicallyReduced(r.to_string()).into());
            }
        }
        Ok(Presentation {
            alphabet,
            relators,
            tiers: None,
            name: String::new(),
            notes: Vec::new(),
        })
    }

    /// Builds a presentation from arbitrary words, freely and cyclically
    /// reducing each and dropping those that collapse to the empty word.
    pub fn from_words(alphabet: Alphabet, words: &[Word]) -> Result<Self, PresentationError> {
        let relators = words
            .iter()
            .map(Word::cyclic_core)
            .filter(|w| !w.is_empty())
            .collect();
        Presentation::new(alphabet, relators)
    }

    pub fn tiered(
        alphabet: Alphabet,
        relators: Vec<Word>,
        tiers: Vec<usize>,
    ) -> Result<Self, PresentationError> {
        let mut p = Presentation::new(alphabet, relators)?;
        p.set_tiers(tiers)?;
        Ok(p)
    }

    pub fn set_tiers(&mut self, tiers: Vec<usize>) -> Result<(), PresentationError> {
        if tiers.len() != self.relators.len() {
            return Err(PresentationError::TierMismatch {
                tiers: tiers.len(),
                relators: self.relators.len(),
            });
        }
        self.tiers = Some(tiers);
        Ok(())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn tiers(&self) -> Option<&[usize]> {
        self.tiers.as_deref()
    }

    /// Relators grouped by tier index.
    pub fn tier_groups(&self) -> BTreeMap<usize, Vec<Word>> {
        let mut out: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
        match &self.tiers {
            Some(t) => {
                for (r, &k) in self.relators.iter().zip(t) {
                    out.entry(k).or_default().push(r.clone());
                }
            }
            None => {
                out.insert(0, self.relators.clone());
            }
        }
        out
    }

    /// The presentation generated by all tiers with index `≤ tier`.
    pub fn up_to_tier(&self, tier: usize) -> Presentation {
        let (relators, tiers): (Vec<Word>, Vec<usize>) = match &self.tiers {
            Some(t) => self
                .relators
                .iter()
                .zip(t)
                .filter(|(_, &k)| k <= tier)
                .map(|(r, &k)| (r.clone(), k))
                .unzip(),
            None => (self.relators.clone(), vec![0; self.relators.len()]),
        };
        Presentation {
            alphabet: self.alphabet.clone(),
            relators,
            tiers: self.tiers.as_ref().map(|_| tiers),
            name: format!("{} (tiers <= {tier})", self.name),
            notes: Vec::new(),
        }
    }

    pub fn symmetrized(&self) -> SymmetrizedSet {
        symmetrize(&self.relators).expect("presentation relators are validated")
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut relators = Vec::new();
        let mut tiers = Vec::new();
        let mut current_tier: Option<usize> = None;
        let mut any_tier = false;
        let mut name = String::new();
        let mut notes = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(n) = comment.strip_prefix("name:") {
                    name = n.trim().to_string();
                } else if alphabet.is_none() && comment.is_empty() {
                    continue;
                } else {
                    notes.push(comment.to_string());
                }
                continue;
            }
            let syntax = |message: String| PresentationError::Syntax {
                line: line_no,
                message,
            };
            if let Some(rest) = line.strip_prefix("alphabet:") {
                if alphabet.is_some() {
                    return Err(syntax("duplicate alphabet line".into()));
                }
                let syms: Vec<char> = rest
                    .split_whitespace()
                    .map(|t| {
                        let mut cs = t.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(syntax(format!("bad generator token {t:?}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?;
                alphabet = Some(Alphabet::new(&syms).map_err(|e| syntax(e.to_string()))?);
                continue;
            }
            let Some(alpha) = alphabet.as_ref() else {
                return Err(syntax("expected \"alphabet:\" line first".into()));
            };
            if let Some(rest) = line.strip_prefix("tier") {
                let idx = rest
                    .trim()
                    .strip_suffix(':')
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(|| syntax(format!("bad tier header {line:?}")))?;
                current_tier = Some(idx);
                any_tier = true;
                continue;
            }
            if let Some(rest) = line.strip_prefix("rel:") {
                let w = Word::parse(rest).map_err(|e| syntax(e.to_string()))?;
                alpha.check_word(&w).map_err(|e| syntax(e.to_string()))?;
                if w.is_empty() {
                    return Err(PresentationError::EmptyRelator { line: line_no });
                }
                if !w.is_cyclically_reduced() {
                    return Err(PresentationError::NotCyclicallyReduced {
                        line: line_no,
                        word: w.to_string(),
                    });
                }
                if any_tier && current_tier.is_none() {
                    return Err(syntax("relator outside any tier".into()));
                }
                relators.push(w);
                tiers.push(current_tier);
                continue;
            }
            return Err(syntax(format!("unrecognized line {line:?}")));
        }

        let alphabet = alphabet.ok_or(PresentationError::Syntax {
            line: 1,
            message: "missing \"alphabet:\" line".into(),
        })?;
        if any_tier && tiers.iter().any(Option::is_none) {
            return Err(PresentationError::Syntax {
                line: 1,
                message: "relators before the first tier header".into(),
            });
        }
        let tiers = any_tier.then(|| tiers.into_iter().map(Option::unwrap).collect());
        Ok(Presentation {
            alphabet,
            relators,
            tiers,
            name,
            notes,
        })
    }

    /// Serializes in normal form: tiers ascending, relators in input order
    /// within a tier.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "# name: {}", self.name);
        }
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        let _ = writeln!(out, "alphabet: {}", self.alphabet);
        match &self.tiers {
            None => {
                for r in &self.relators {
                    let _ = writeln!(out, "rel: {r}");
                }
            }
            Some(_) => {
                for (k, rels) in self.tier_groups() {
                    let _ = writeln!(out, "tier {k}:");
                    for r in rels {
                        let _ = writeln!(out, "rel: {r}");
                    }
                }
            }
        }
        out
    }
}

/// Sorted multiset of relator lengths `L(R)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LengthSpectrum {
    lengths: Vec<u64>,
}

impl LengthSpectrum {
    pub fn from_lengths(mut lengths: Vec<u64>) -> Self {
        lengths.sort_unstable();
        LengthSpectrum { lengths }
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lengths.binary_search(&n).is_ok()
    }
}

pub fn length_spectrum(p: &Presentation) -> LengthSpectrum {
    LengthSpectrum::from_lengths(p.relators().iter().map(|r| r.len() as u64).collect())
}

/// An integer interval `[a, b]` missing the spectrum, with `a/b < λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub a: u64,
    pub b: u64,
}

/// Searches `[lo, hi]` for an interval avoiding `spectrum` with `a/b < lambda`.
/// Among the maximal gaps, the one with the smallest ratio is returned.
pub fn sparseness_witness(
    spectrum: &[u64],
    lambda: &Rational,
    lo: u64,
    hi: u64,
) -> Result<Option<Gap>, BadLambda> {
    if !in_open_unit_interval(lambda) {
        return Err(BadLambda);
    }
    let lo = lo.max(1);
    if hi < lo {
        return Ok(None);
    }
    let mut points: Vec<u64> = spectrum
        .iter()
        .copied()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    points.sort_unstable();
    points.dedup();

    let mut best: Option<Gap> = None;
    let mut start = lo;
    let mut consider = |a: u64, b: u64| {
        if a > b {
            return;
        }
        let better = match best {
            None => true,
            // a/b < a'/b'  ⇔  a·b' < a'·b
            Some(g) => (a as u128) * (g.b as u128) < (g.a as u128) * (b as u128),
        };
        if better {
            best = Some(Gap { a, b });
        }
    };
    for &x in &points {
        if x > start {
            consider(start, x - 1);
        }
        start = x + 1;
    }
    if start <= hi {
        consider(start, hi);
    }
    Ok(best.filter(|g| Rational::new(g.a.into(), g.b.into()) < *lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn parse_basic() {
        let p = Presentation::parse("alphabet: a b\nrel: abAB\n").unwrap();
        assert_eq!(p.alphabet.rank(), 2);
        assert_eq!(p.relators(), &[w("abAB")]);
        assert!(p.tiers().is_none());
    }

    #[test]
    fn parse_rejects_empty_relator() {
        let e = Presentation::parse("alphabet: a\nrel: 1\n").unwrap_err();
        assert_eq!(e, PresentationError::EmptyRelator { line: 2 });
    }

    #[test]
    fn parse_rejects_non_cyclically_reduced() {
        let e = Presentation::parse("alphabet: a b\nrel: abA\n").unwrap_err();
        assert!(matches!(
            e,
            PresentationError::NotCyclicallyReduced { line: 2, .. }
        ));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let e = Presentation::parse("alphabet: a b\n# ok\nbogus\n").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { line: 3, .. }));
        let e = Presentation::parse("alphabet: a\nrel: ab\n").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { line: 2, .. }));
        let e = Presentation::parse("rel: ab\n").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { line: 1, .. }));
    }

    #[test]
    fn parse_tiers() {
        let text = "alphabet: a b\ntier 1:\nrel: aa\ntier 2:\nrel: bbbb\nrel: abab\n";
        let p = Presentation::parse(text).unwrap();
        assert_eq!(p.tiers(), Some(&[1, 2, 2][..]));
        assert_eq!(p.tier_groups()[&2].len(), 2);
        assert_eq!(p.up_to_tier(1).relators(), &[w("aa")]);
        let e = Presentation::parse("alphabet: a\nrel: a\ntier 1:\nrel: aa\n").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { .. }));
    }

    #[test]
    fn serialize_round_trip_normalizes() {
        let text = "# name: test\n# provenance: {\"x\": 1}\nalphabet: a b\ntier 2:\nrel: bb\ntier 1:\nrel: aa\n";
        let p = Presentation::parse(text).unwrap();
        let s = p.serialize();
        assert_eq!(
            s,
            "# name: test\n# provenance: {\"x\": 1}\nalphabet: a b\ntier 1:\nrel: aa\ntier 2:\nrel: bb\n"
        );
        let q = Presentation::parse(&s).unwrap();
        assert_eq!(q.serialize(), s);
    }

    #[test]
    fn length_spectrum_examples() {
        let a = Alphabet::standard(2);
        let p = Presentation::new(a.clone(), vec![w("abAB")]).unwrap();
        assert_eq!(length_spectrum(&p).lengths(), &[4]);
        let p = Presentation::new(a.clone(), vec![w("ab"), w("abab"), w("aaaa")]).unwrap();
        assert_eq!(length_spectrum(&p).lengths(), &[2, 4, 4]);
        let p = Presentation::new(a, vec![]).unwrap();
        assert!(length_spectrum(&p).lengths().is_empty());
        assert_eq!(
            serde_json::to_string(&LengthSpectrum::from_lengths(vec![4, 2])).unwrap(),
            "[2,4]"
        );
    }

    /// Exhaustive scan over every integer interval in the window.
    fn brute_best(spectrum: &[u64], lambda: &Rational, lo: u64, hi: u64) -> Option<(u64, u64)> {
        let mut best: Option<(u64, u64)> = None;
        for a in lo..=hi {
            for b in a..=hi {
                if (a..=b).any(|x| spectrum.contains(&x)) {
                    break;
                }
                if Rational::new(a.into(), b.into()) >= *lambda {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((ba, bb)) => a * bb < ba * b,
                };
                if better {
                    best = Some((a, b));
                }
            }
        }
        best
    }

    #[test]
    fn sparseness_examples() {
        let g = sparseness_witness(&[2, 16, 65536], &ratio(1, 10), 1, 70000)
            .unwrap()
            .unwrap();
        assert_eq!(g, Gap { a: 17, b: 65535 });
        let all: Vec<u64> = (1..=50).collect();
        assert_eq!(sparseness_witness(&all, &ratio(1, 2), 1, 50).unwrap(), None);
        assert_eq!(
            sparseness_witness(&[], &ratio(1, 2), 1, 10).unwrap(),
            Some(Gap { a: 1, b: 10 })
        );
        assert_eq!(sparseness_witness(&[], &ratio(1, 1), 1, 10), Err(BadLambda));
        assert_eq!(sparseness_witness(&[], &ratio(0, 1), 1, 10), Err(BadLambda));
    }

    #[test]
    fn sparseness_matches_exhaustive_scan() {
        let spectra: [&[u64]; 4] = [&[2, 16], &[3, 5, 30], &[], &[1, 2, 4, 8, 16, 32]];
        for spec in spectra {
            for lambda in [ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 3)] {
                for hi in [10, 40, 60] {
                    let got = sparseness_witness(spec, &lambda, 1, hi).unwrap();
                    let want = brute_best(spec, &lambda, 1, hi);
                    assert_eq!(got.map(|g| (g.a, g.b)), want, "{spec:?} {lambda} {hi}");
                    if let Some(g) = got {
                        // Nested windows keep the witness valid.
                        assert!((g.a..=g.b).all(|x| !spec.contains(&x)));
                        assert!(sparseness_witness(spec, &lambda, 1, hi + 50)
                            .unwrap()
                            .is_some());
                    }
                }
            }
        }
    }
}
