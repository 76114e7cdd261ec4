//! Words over a finite alphabet with formal inverses.
//!
//! Generators are lowercase ASCII letters and their inverses the matching
//! uppercase letters, so `abAB` is the commutator `a b a⁻¹ b⁻¹`. The empty
//! word renders as `1`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Errors from parsing words and building symmetrized sets.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid letter {0:?}: expected an ASCII letter")]
    BadChar(char),
    #[error("duplicate generator {0:?} in alphabet")]
    DuplicateGenerator(char),
    #[error("generator symbols must be lowercase ASCII letters, got {0:?}")]
    BadGenerator(char),
    #[error("alphabet must contain at least one generator")]
    EmptyAlphabet,
    #[error("letter {0:?} is not in the alphabet")]
    NotInAlphabet(char),
    #[error("relator is empty")]
    EmptyRelator,
    #[error("relator {0} is not cyclically reduced")]
    NotCyclicallyReduced(String),
}

/// A generator or formal inverse, packed as `2·generator + inverted`.
///
/// The derived order is the shortlex letter order `a < A < b < B < …`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(u8);

impl Letter {
    pub const fn generator(index: u8) -> Self {
        Letter(index << 1)
    }

    pub const fn code(self) -> u8 {
        self.0
    }

    pub const fn from_code(code: u8) -> Self {
        Letter(code)
    }

    /// Index of the underlying generator (`a` = 0).
    pub const fn base(self) -> u8 {
        self.0 >> 1
    }

    pub const fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub const fn inv(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn from_char(c: char) -> Result<Self, WordError> {
        match c {
            'a'..='z' => Ok(Letter::generator(c as u8 - b'a')),
            'A'..='Z' => Ok(Letter::generator(c as u8 - b'A').inv()),
            _ => Err(WordError::BadChar(c)),
        }
    }

    pub fn to_char(self) -> char {
        let base = b'a' + self.base();
        if self.is_inverse() {
            base.to_ascii_uppercase() as char
        } else {
            base as char
        }
    }
}

/// Ordered set of generators `S`; letters range over `S ∪ S⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet {
    gens: Vec<u8>,
}

impl Alphabet {
    pub fn new(symbols: &[char]) -> Result<Self, WordError> {
        if symbols.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        let mut gens = Vec::with_capacity(symbols.len());
        for &c in symbols {
            if !c.is_ascii_lowercase() {
                return Err(WordError::BadGenerator(c));
            }
            let g = c as u8 - b'a';
            if gens.contains(&g) {
                return Err(WordError::DuplicateGenerator(c));
            }
            gens.push(g);
        }
        Ok(Alphabet { gens })
    }

    /// The first `rank` letters `a, b, c, …`.
    pub fn standard(rank: usize) -> Self {
        assert!((1..=26).contains(&rank), "rank must be in 1..=26");
        Alphabet {
            gens: (0..rank as u8).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = char> + '_ {
        self.gens.iter().map(|&g| (b'a' + g) as char)
    }

    pub fn generators(&self) -> impl Iterator<Item = Letter> + '_ {
        self.gens.iter().map(|&g| Letter::generator(g))
    }

    /// All letters of `S ∪ S⁻¹` in shortlex order.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = self
            .gens
            .iter()
            .flat_map(|&g| [Letter::generator(g), Letter::generator(g).inv()])
            .collect();
        out.sort();
        out
    }

    pub fn contains(&self, letter: Letter) -> bool {
        self.gens.contains(&letter.base())
    }

    /// Position of a generator in the declared order.
    pub fn position(&self, letter: Letter) -> Option<usize> {
        self.gens.iter().position(|&g| g == letter.base())
    }

    pub fn check_word(&self, w: &Word) -> Result<(), WordError> {
        match w.letters().iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(WordError::NotInAlphabet(l.to_char())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms: Vec<String> = self.symbols().map(String::from).collect();
        f.write_str(&syms.join(" "))
    }
}

impl TryFrom<String> for Alphabet {
    type Error = WordError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        let syms: Vec<char> = s.split_whitespace().flat_map(|t| t.chars()).collect();
        Alphabet::new(&syms)
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.to_string()
    }
}

/// A finite sequence of letters. `Ord` is shortlex.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn parse(s: &str) -> Result<Self, WordError> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Word::empty());
        }
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inv())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.first(), self.last()) {
                (Some(f), Some(l)) => self.len() == 1 || f != l.inv(),
                _ => true,
            }
    }

    /// The unique freely reduced word freely equal to `self`.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Returns `(core, conjugator)` with `core` cyclically reduced and
    /// `conjugator · core · conjugator⁻¹` freely equal to `self`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let reduced = self.free_reduce().0;
        let (mut lo, mut hi) = (0, reduced.len());
        while hi - lo >= 2 && reduced[lo] == reduced[hi - 1].inv() {
            lo += 1;
            hi -= 1;
        }
        (Word(reduced[lo..hi].to_vec()), Word(reduced[..lo].to_vec()))
    }

    pub fn cyclic_core(&self) -> Word {
        self.cyclic_reduce().0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Rotation moving the first `k` letters to the end.
    pub fn cyclic_shift(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = k % self.0.len();
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word(self.0[start..start + len].to_vec())
    }

    /// Commutator `[x, y] = x⁻¹ y⁻¹ x y`, freely reduced.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.inverse()
            .concat(&y.inverse())
            .concat(x)
            .concat(y)
            .free_reduce()
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl TryFrom<String> for Word {
    type Error = WordError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Word::parse(&s)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

/// One member of a symmetrized set together with where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetrizedWord {
    pub word: Word,
    /// Index of the originating relator in the input list.
    pub relator: usize,
    /// Rotation offset applied to the relator (or its inverse).
    pub shift: usize,
    pub inverted: bool,
}

/// Closure of a relator list under inversion and cyclic shifts, deduplicated
/// by letter-for-letter equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetrizedSet {
    entries: Vec<SymmetrizedWord>,
}

impl SymmetrizedSet {
    pub fn entries(&self) -> &[SymmetrizedWord] {
        &self.entries
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.entries.iter().map(|e| &e.word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &SymmetrizedWord {
        &self.entries[i]
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.entries.iter().any(|e| &e.word == w)
    }

    pub fn max_len(&self) -> usize {
        self.entries.iter().map(|e| e.word.len()).max().unwrap_or(0)
    }

    /// Whether every word's inverse and cyclic shifts are present.
    pub fn is_closed(&self) -> bool {
        let set: HashSet<&Word> = self.words().collect();
        self.entries.iter().all(|e| {
            let inv = e.word.inverse();
            set.contains(&inv) && (0..e.word.len()).all(|k| set.contains(&e.word.cyclic_shift(k)))
        })
    }
}

/// Symmetrizes a list of nonempty cyclically reduced relators.
pub fn symmetrize(relators: &[Word]) -> Result<SymmetrizedSet, WordError> {
    let mut seen: HashSet<Word> = HashSet::new();
    let mut entries = Vec::new();
    for (index, r) in relators.iter().enumerate() {
        if r.is_empty() {
            return Err(WordError::EmptyRelator);
        }
        if !r.is_cyclically_reduced() {
            return Err(WordError::NotCyclicallyReduced(r.to_string()));
        }
        for (inverted, base) in [(false, r.clone()), (true, r.inverse())] {
            for shift in 0..base.len() {
                let w = base.cyclic_shift(shift);
                if seen.insert(w.clone()) {
                    entries.push(SymmetrizedWord {
                        word: w,
                        relator: index,
                        shift,
                        inverted,
                    });
                }
            }
        }
    }
    Ok(SymmetrizedSet { entries })
}
