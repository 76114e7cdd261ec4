//! Dehn's algorithm for C'(μ) presentations with μ ≤ 1/6.
//!
//! By Greendlinger's lemma every nonempty cyclically reduced word that is
//! trivial in such a group contains more than half of some relator, so
//! repeatedly replacing such a subword by the inverse of the rest of the
//! relator reaches the empty word exactly when the input is trivial.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cancellation::check_classical;
use crate::cayley::EqualityOracle;
use crate::freeword::{Alphabet, Letter, SymmetrizedSet, Word};
use crate::presentation::Presentation;
use crate::rational::{format_rational, int, ratio, serde_rational, Rational};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum DehnError {
    #[error("Dehn's algorithm needs 0 < mu <= 1/6, got {0}")]
    MuOutOfRange(String),
    #[error("relators are not C'({mu}): a piece has ratio {max_ratio}")]
    NotSmallCancellation { mu: String, max_ratio: String },
    #[error("trace does not end at the empty word")]
    TraceNotClosed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnStep {
    /// Start of the replaced subword in the cyclic word before the step.
    pub position: usize,
    /// Index of the relator in the symmetrized set.
    pub relator: usize,
    pub relator_len: usize,
    pub replaced_len: usize,
    pub replacement_len: usize,
    /// Cyclic word after the step, freely and cyclically reduced.
    pub result: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnTrace {
    pub input: Word,
    pub steps: Vec<DehnStep>,
    pub cells_used: usize,
    /// Sum of the full lengths of the relators applied.
    pub perimeter_sum: usize,
    #[serde(rename = "final")]
    pub final_word: Word,
}

impl DehnTrace {
    pub fn is_trivial(&self) -> bool {
        self.final_word.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
struct Node {
    children: Vec<(Letter, u32)>,
    /// Shortest relator through this node, as (length, index).
    shortest: Option<(usize, usize)>,
}

/// Prefix trie over the words of a symmetrized set.
#[derive(Clone, Debug)]
struct Trie {
    nodes: Vec<Node>,
}

impl Trie {
    fn new(s: &SymmetrizedSet) -> Self {
        let mut nodes = vec![Node::default()];
        for (i, w) in s.words().enumerate() {
            let mut at = 0usize;
            for &l in w.letters() {
                let next = match nodes[at].children.iter().find(|(m, _)| *m == l) {
                    Some(&(_, n)) => n as usize,
                    None => {
                        nodes.push(Node::default());
                        let n = nodes.len() - 1;
                        nodes[at].children.push((l, n as u32));
                        n
                    }
                };
                at = next;
                let cand = (w.len(), i);
                if nodes[at].shortest.is_none_or(|best| cand < best) {
                    nodes[at].shortest = Some(cand);
                }
            }
        }
        Trie { nodes }
    }

    fn child(&self, at: usize, l: Letter) -> Option<usize> {
        self.nodes[at]
            .children
            .iter()
            .find(|(m, _)| *m == l)
            .map(|&(_, n)| n as usize)
    }
}

/// A reusable solver for one symmetrized set.
#[derive(Clone, Debug)]
pub struct DehnSolver {
    s: SymmetrizedSet,
    mu: Rational,
    trie: Trie,
}

impl DehnSolver {
    pub fn new(s: SymmetrizedSet, mu: &Rational) -> Result<Self, DehnError> {
        if mu <= &Rational::zero() || mu > &ratio(1, 6) {
            return Err(DehnError::MuOutOfRange(format_rational(mu)));
        }
        let verdict = check_classical(&s, mu);
        if !verdict.ok {
            return Err(DehnError::NotSmallCancellation {
                mu: format_rational(mu),
                max_ratio: format_rational(&verdict.max_ratio),
            });
        }
        let trie = Trie::new(&s);
        Ok(DehnSolver {
            s,
            mu: mu.clone(),
            trie,
        })
    }

    pub fn for_presentation(p: &Presentation, mu: &Rational) -> Result<Self, DehnError> {
        Self::new(p.symmetrized(), mu)
    }

    pub fn symmetrized(&self) -> &SymmetrizedSet {
        &self.s
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    /// Longest-drop match in the cyclic word `cur`: `(drop, position, |U|, relator)`.
    fn best_match(&self, cur: &[Letter]) -> Option<(usize, usize, usize, usize)> {
        let n = cur.len();
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for pos in 0..n {
            let mut at = 0usize;
            for l in 1..=n {
                let Some(next) = self.trie.child(at, cur[(pos + l - 1) % n]) else {
                    break;
                };
                at = next;
                if let Some((rlen, wi)) = self.trie.nodes[at].shortest {
                    if 2 * l > rlen {
                        let drop = 2 * l - rlen;
                        // Larger drop wins; earlier position and shorter U break ties.
                        if best.is_none_or(|(d, ..)| drop > d) {
                            best = Some((drop, pos, l, wi));
                        }
                    }
                }
            }
        }
        best
    }

    pub fn reduce(&self, w: &Word) -> DehnTrace {
        let mut cur = w.cyclic_core();
        let mut steps = Vec::new();
        let mut perimeter_sum = 0;
        while !cur.is_empty() {
            let letters = cur.letters();
            let Some((_, pos, l, wi)) = self.best_match(letters) else {
                break;
            };
            let n = letters.len();
            let r = &self.s.get(wi).word;
            let replacement = r.subword(l, r.len() - l).inverse();
            let mut next = replacement.into_letters();
            next.extend((l..n).map(|k| letters[(pos + k) % n]));
            let reduced = Word::from_letters(next).cyclic_core();
            steps.push(DehnStep {
                position: pos,
                relator: wi,
                relator_len: r.len(),
                replaced_len: l,
                replacement_len: r.len() - l,
                result: reduced.clone(),
            });
            perimeter_sum += r.len();
            cur = reduced;
        }
        DehnTrace {
            input: w.clone(),
            cells_used: steps.len(),
            steps,
            perimeter_sum,
            final_word: cur,
        }
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.reduce(w).is_trivial()
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.is_trivial(&u.concat(&v.inverse()))
    }
}

pub fn dehn_reduce(w: &Word, s: &SymmetrizedSet, mu: &Rational) -> Result<DehnTrace, DehnError> {
    Ok(DehnSolver::new(s.clone(), mu)?.reduce(w))
}

pub fn is_trivial(w: &Word, s: &SymmetrizedSet, mu: &Rational) -> Result<bool, DehnError> {
    Ok(DehnSolver::new(s.clone(), mu)?.is_trivial(w))
}

pub fn equal(u: &Word, v: &Word, s: &SymmetrizedSet, mu: &Rational) -> Result<bool, DehnError> {
    Ok(DehnSolver::new(s.clone(), mu)?.equal(u, v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub holds: bool,
    pub lhs: usize,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Compares `|w|` with `(1 − 6μ)·A`, where `A` is the trace's perimeter sum.
///
/// The trace need not describe a reduced diagram, so a failure is reported
/// as a warning rather than an error.
pub fn check_area_inequality(
    trace: &DehnTrace,
    original: &Word,
    mu: &Rational,
) -> Result<AreaCheck, DehnError> {
    if !trace.is_trivial() {
        return Err(DehnError::TraceNotClosed);
    }
    let rhs = (Rational::one() - int(6) * mu) * int(trace.perimeter_sum as i64);
    let lhs = original.len();
    let holds = int(lhs as i64) > rhs;
    Ok(AreaCheck {
        holds,
        lhs,
        warning: (!holds).then(|| {
            format!(
                "|w| = {lhs} is not greater than (1 - 6mu)A = {}; the trace's diagram is not reduced",
                format_rational(&rhs)
            )
        }),
        rhs,
    })
}

/// Equality oracle backed by Dehn's algorithm.
///
/// Candidates are bucketed by exponent sums, each reduced modulo the gcd of
/// that generator's exponent sums over the relators; this is a homomorphism
/// to an abelian group that kills every relator.
#[derive(Clone, Debug)]
pub struct DehnOracle {
    solver: Arc<DehnSolver>,
    alphabet: Alphabet,
    moduli: Vec<i64>,
}

impl DehnOracle {
    pub fn new(p: &Presentation, mu: &Rational) -> Result<Self, DehnError> {
        let solver = DehnSolver::for_presentation(p, mu)?;
        let rank = p.alphabet.rank();
        let mut moduli = vec![0i64; rank];
        for r in p.relators() {
            let e = exponent_sums(&p.alphabet, r);
            for g in 0..rank {
                moduli[g] = moduli[g].gcd(&e[g]);
            }
        }
        Ok(DehnOracle {
            solver: Arc::new(solver),
            alphabet: p.alphabet.clone(),
            moduli,
        })
    }

    pub fn solver(&self) -> &DehnSolver {
        &self.solver
    }
}

fn exponent_sums(alphabet: &Alphabet, w: &Word) -> Vec<i64> {
    let mut e = vec![0i64; alphabet.rank()];
    for &l in w.letters() {
        if let Some(i) = alphabet.position(l) {
            e[i] += if l.is_inverse() { -1 } else { 1 };
        }
    }
    e
}

impl EqualityOracle for DehnOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn equal(&self, u: &Word, v: &Word) -> bool {
        self.solver.equal(u, v)
    }

    fn invariant(&self, w: &Word) -> Vec<i64> {
        exponent_sums(&self.alphabet, w)
            .into_iter()
            .zip(&self.moduli)
            .map(|(e, &m)| if m == 0 { e } else { e.rem_euclid(m) })
            .collect()
    }

    fn is_trivial(&self, w: &Word) -> bool {
        self.solver.is_trivial(w)
    }

    fn name(&self) -> &str {
        "dehn"
    }
}
