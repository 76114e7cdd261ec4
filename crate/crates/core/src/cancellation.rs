//! Small-cancellation conditions: classical pieces and C'(μ), ε-pieces over a
//! base group, and graded schedules.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{build_ball_with, BallBudget, CayleyError, EqualityOracle};
use crate::freeword::{SymmetrizedSet, Word};
use crate::presentation::Presentation;
use crate::rational::{int, ratio, serde_rational, Rational};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum CancellationError {
    #[error("word set is not closed under inverses and cyclic shifts")]
    NotSymmetrized,
    #[error("mu = {0} must satisfy 0 < mu < 1/6")]
    MuTooLarge(String),
    #[error("presentation is not C'({mu}): {detail}")]
    NotSmallCancellation { mu: String, detail: String },
    #[error("search budget of {0} oracle calls exhausted")]
    BudgetExceeded(u64),
}

/// Where a piece occurs: a word of the symmetrized set and its provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub word: usize,
    pub relator: usize,
    pub offset: usize,
    pub inverted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub piece: Word,
    pub occurrence_a: Occurrence,
    pub occurrence_b: Occurrence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceReport {
    pub pieces: Vec<Piece>,
    #[serde(with = "serde_rational")]
    pub max_ratio: Rational,
    pub max_piece_len: usize,
    pub relator_count: usize,
    pub piece_count: usize,
    /// Present when some relator is a proper power; see [`enumerate_pieces`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn occurrence(s: &SymmetrizedSet, i: usize) -> Occurrence {
    let e = s.get(i);
    Occurrence {
        word: i,
        relator: e.relator,
        offset: e.shift,
        inverted: e.inverted,
    }
}

/// Longest common prefix of each word with any other word of the set.
///
/// After sorting lexicographically by letters, the longest common prefix of a
/// word with any other is attained at a sorted neighbour.
pub fn longest_pieces(s: &SymmetrizedSet) -> Vec<(usize, Option<usize>)> {
    let words: Vec<&Word> = s.words().collect();
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&i, &j| words[i].letters().cmp(words[j].letters()).then(i.cmp(&j)));
    let mut best: Vec<(usize, Option<usize>)> = vec![(0, None); words.len()];
    for k in 1..order.len() {
        let (i, j) = (order[k - 1], order[k]);
        let l = words[i].common_prefix_len(words[j]);
        if l == 0 {
            continue;
        }
        for (a, b) in [(i, j), (j, i)] {
            let cur = &mut best[a];
            if l > cur.0 || (l == cur.0 && cur.1.is_some_and(|p| b < p)) {
                *cur = (l, Some(b));
            }
        }
    }
    best
}

fn proper_power_note(s: &SymmetrizedSet) -> Option<String> {
    let mut powers: Vec<usize> = s
        .entries()
        .iter()
        .filter(|e| !e.inverted && e.shift == 0)
        .filter(|e| (1..e.word.len()).any(|k| e.word.cyclic_shift(k) == e.word))
        .map(|e| e.relator)
        .collect();
    powers.dedup();
    if powers.is_empty() {
        return None;
    }
    Some(format!(
        "relators {powers:?} are proper powers; cyclic shifts equal to the word itself \
         are not distinct words and contribute no pieces (literal reading)"
    ))
}

/// Lists the maximal common initial subword of every unordered pair of
/// distinct words in `s`, when nonempty.
pub fn enumerate_pieces(s: &SymmetrizedSet) -> Result<PieceReport, CancellationError> {
    if s.is_empty() || !s.is_closed() {
        return Err(CancellationError::NotSymmetrized);
    }
    let words: Vec<&Word> = s.words().collect();
    // Only words sharing a first letter can share a prefix.
    let mut by_first: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        by_first.entry(w.first()).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for group in by_first.values() {
        for (x, &i) in group.iter().enumerate() {
            for &j in &group[x + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let l = words[i].common_prefix_len(words[j]);
                pairs.push((i, j, l));
            }
        }
    }
    pairs.sort_unstable();
    let pieces: Vec<Piece> = pairs
        .into_iter()
        .map(|(i, j, l)| Piece {
            piece: words[i].subword(0, l),
            occurrence_a: occurrence(s, i),
            occurrence_b: occurrence(s, j),
        })
        .collect();

    let longest = longest_pieces(s);
    let mut max_ratio = Rational::zero();
    let mut max_piece_len = 0;
    for (i, &(l, _)) in longest.iter().enumerate() {
        max_piece_len = max_piece_len.max(l);
        let r = ratio(l as i64, words[i].len() as i64);
        if r > max_ratio {
            max_ratio = r;
        }
    }
    let relator_count = s.entries().iter().map(|e| e.relator + 1).max().unwrap_or(0);
    Ok(PieceReport {
        piece_count: pieces.len(),
        pieces,
        max_ratio,
        max_piece_len,
        relator_count,
        note: proper_power_note(s),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalVerdict {
    pub ok: bool,
    #[serde(with = "serde_rational")]
    pub max_ratio: Rational,
    pub violating_piece: Option<Piece>,
}

/// C'(μ): every piece inside a word `R` of `s` has length strictly less
/// than `μ|R|`.
pub fn check_classical(s: &SymmetrizedSet, mu: &Rational) -> ClassicalVerdict {
    let words: Vec<&Word> = s.words().collect();
    let longest = longest_pieces(s);
    let mut max_ratio = Rational::zero();
    let mut violating: Option<(Rational, usize, usize, usize)> = None;
    for (i, &(l, partner)) in longest.iter().enumerate() {
        let r = ratio(l as i64, words[i].len() as i64);
        if r > max_ratio {
            max_ratio = r.clone();
        }
        if let Some(j) = partner {
            if &r >= mu && violating.as_ref().is_none_or(|(best, ..)| &r > best) {
                violating = Some((r, i, j, l));
            }
        }
    }
    let violating_piece = violating.map(|(_, i, j, l)| Piece {
        piece: words[i].subword(0, l),
        occurrence_a: occurrence(s, i),
        occurrence_b: occurrence(s, j),
    });
    ClassicalVerdict {
        ok: violating_piece.is_none(),
        max_ratio,
        violating_piece,
    }
}

/// The hyperbolicity constant `12·max|R| / (1 − 6μ)²` for a C'(μ)
/// presentation with `μ < 1/6`.
pub fn hyperbolicity_bound(p: &Presentation, mu: &Rational) -> Result<Rational, CancellationError> {
    if mu <= &Rational::zero() || mu >= &ratio(1, 6) {
        return Err(CancellationError::MuTooLarge(
            crate::rational::format_rational(mu),
        ));
    }
    let s = p.symmetrized();
    let verdict = check_classical(&s, mu);
    if !verdict.ok {
        return Err(CancellationError::NotSmallCancellation {
            mu: crate::rational::format_rational(mu),
            detail: format!(
                "max piece ratio {}",
                crate::rational::format_rational(&verdict.max_ratio)
            ),
        });
    }
    let gap = Rational::one() - int(6) * mu;
    Ok(int(12) * int(p.max_relator_len() as i64) / (gap.clone() * gap))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GeodesicVerdict {
    Geodesic,
    NotGeodesic { witness: Word },
    Unknown { reason: String },
}

/// Decides whether `w` is geodesic in the base group by building the ball of
/// radius `|w| − 1` and looking for `w` in it.
pub fn is_geodesic_in(
    w: &Word,
    base: &dyn EqualityOracle,
    radius_cap: u32,
    budget: BallBudget,
) -> GeodesicVerdict {
    if w.is_empty() {
        return GeodesicVerdict::Geodesic;
    }
    let r = w.len() as u32 - 1;
    if r > radius_cap {
        return GeodesicVerdict::Unknown {
            reason: format!("|w| - 1 = {r} exceeds the radius cap {radius_cap}"),
        };
    }
    let ball = match build_ball_with(base, r, budget) {
        Ok(b) => b,
        Err(e) => {
            return GeodesicVerdict::Unknown {
                reason: e.to_string(),
            }
        }
    };
    let hit = match base.normal_key(w) {
        Some(key) => ball
            .vertices()
            .iter()
            .find(|v| base.normal_key(v).as_ref() == Some(&key)),
        None => {
            let inv = base.invariant(w);
            ball.vertices()
                .iter()
                .find(|v| base.invariant(v) == inv && base.equal(v, w))
        }
    };
    match hit {
        Some(v) => GeodesicVerdict::NotGeodesic { witness: v.clone() },
        None => GeodesicVerdict::Geodesic,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsPiece {
    /// Index of the word `R ≡ UV` in the symmetrized set.
    pub word: usize,
    pub piece: Word,
    /// Index of the word `R' ≡ U'V'`.
    pub other: usize,
    pub other_piece: Word,
    pub y: Word,
    pub z: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsPieceReport {
    pub eps: u32,
    #[serde(with = "serde_rational")]
    pub mu: Rational,
    /// For each word of the set with an ε-piece prefix, the longest one.
    pub pieces: Vec<EpsPiece>,
    #[serde(with = "serde_rational")]
    pub max_ratio: Rational,
    pub violation: bool,
    pub violating: Option<EpsPiece>,
    pub oracle_calls: u64,
}

/// Searches for ε-pieces of Def. C(ε, μ, ρ) over a base group.
///
/// A prefix `U` of `R ∈ s` is an ε-piece when some prefix `U'` of some
/// `R' ∈ s` satisfies `U' = YUZ` in the base group with `|Y|, |Z| ≤ ε`, and
/// `YRY⁻¹ ≠ R'` there. `Y` and `Z` range over the ball of radius `ε`. The
/// words of `s` are assumed geodesic in the base group (see
/// [`is_geodesic_in`]), which bounds `||U| − |U'|| ≤ 2ε`.
pub fn find_eps_pieces(
    s: &SymmetrizedSet,
    eps: u32,
    mu: &Rational,
    base: &dyn EqualityOracle,
    max_oracle_calls: u64,
) -> Result<EpsPieceReport, CancellationError> {
    if !s.is_closed() {
        return Err(CancellationError::NotSymmetrized);
    }
    let ball = build_ball_with(
        base,
        eps,
        BallBudget {
            max_vertices: 1_000_000,
            max_oracle_calls,
        },
    )
    .map_err(|e| match e {
        CayleyError::OracleBudgetExceeded { limit } => CancellationError::BudgetExceeded(limit),
        _ => CancellationError::BudgetExceeded(max_oracle_calls),
    })?;
    let shifts: Vec<Word> = ball.vertices().to_vec();
    let words: Vec<&Word> = s.words().collect();
    let calls = AtomicU64::new(0);
    let tick = |n: u64| -> Result<(), CancellationError> {
        if calls.fetch_add(n, Ordering::Relaxed) + n > max_oracle_calls {
            Err(CancellationError::BudgetExceeded(max_oracle_calls))
        } else {
            Ok(())
        }
    };

    let search = |i: usize| -> Result<Option<EpsPiece>, CancellationError> {
        let r = words[i];
        for l in (1..=r.len()).rev() {
            let u = r.subword(0, l);
            for (j, r2) in words.iter().enumerate() {
                let lo = l.saturating_sub(2 * eps as usize).max(1);
                let hi = (l + 2 * eps as usize).min(r2.len());
                for l2 in lo..=hi {
                    let u2 = r2.subword(0, l2);
                    for y in &shifts {
                        let yu = y.concat(&u);
                        for z in &shifts {
                            tick(1)?;
                            if !base.equal(&u2, &yu.concat(z)) {
                                continue;
                            }
                            tick(1)?;
                            let conj = y.concat(r).concat(&y.inverse());
                            if base.equal(&conj, r2) {
                                continue;
                            }
                            return Ok(Some(EpsPiece {
                                word: i,
                                piece: u,
                                other: j,
                                other_piece: u2,
                                y: y.clone(),
                                z: z.clone(),
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    };

    let found: Vec<Option<EpsPiece>> = (0..words.len())
        .into_par_iter()
        .map(search)
        .collect::<Result<_, _>>()?;
    let pieces: Vec<EpsPiece> = found.into_iter().flatten().collect();

    let mut max_ratio = Rational::zero();
    let mut violating: Option<(Rational, EpsPiece)> = None;
    for p in &pieces {
        let q = ratio(p.piece.len() as i64, words[p.word].len() as i64);
        if q > max_ratio {
            max_ratio = q.clone();
        }
        if &q >= mu && violating.as_ref().is_none_or(|(best, _)| &q > best) {
            violating = Some((q, p.clone()));
        }
    }
    Ok(EpsPieceReport {
        eps,
        mu: mu.clone(),
        violation: violating.is_some(),
        violating: violating.map(|(_, p)| p),
        pieces,
        max_ratio,
        oracle_calls: calls.load(Ordering::Relaxed),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tier {
    pub epsilon: u64,
    #[serde(with = "serde_rational")]
    pub mu: Rational,
    #[serde(with = "serde_rational")]
    pub rho: Rational,
    #[serde(with = "crate::rational::serde_bigint")]
    pub max_relator_len: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSchedule {
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    #[serde(with = "serde_rational")]
    pub k: Rational,
    pub tiers: Vec<Tier>,
}

impl GradedSchedule {
    /// The standard condition Q(.01, 10⁶).
    pub fn standard(tiers: Vec<Tier>) -> Self {
        GradedSchedule {
            alpha: ratio(1, 100),
            k: int(1_000_000),
            tiers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleViolation {
    /// Tier number, counted from 1.
    pub tier: usize,
    pub clause: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleVerdict {
    pub ok: bool,
    pub violations: Vec<ScheduleViolation>,
    /// Advisory: whether μ is nonincreasing over the finite prefix.
    pub mu_nonincreasing: bool,
}

/// Checks the finitely checkable clauses of Q(α, K) on a schedule prefix:
/// `μ_n ≤ α`, `μ_n ρ_n > K ε_n` and `ε_{n+1} > 8·max|R_n|`.
pub fn check_graded_schedule(g: &GradedSchedule) -> ScheduleVerdict {
    use crate::rational::format_rational as f;
    let mut violations = Vec::new();
    for (n, t) in g.tiers.iter().enumerate() {
        let tier = n + 1;
        if t.mu > g.alpha {
            violations.push(ScheduleViolation {
                tier,
                clause: "Q2".into(),
                detail: format!("mu = {} exceeds alpha = {}", f(&t.mu), f(&g.alpha)),
            });
        }
        let lhs = &t.mu * &t.rho;
        let rhs = &g.k * int(t.epsilon as i64);
        if lhs <= rhs {
            violations.push(ScheduleViolation {
                tier,
                clause: "Q2".into(),
                detail: format!(
                    "mu*rho = {} is not greater than K*epsilon = {}",
                    f(&lhs),
                    f(&rhs)
                ),
            });
        }
        if let Some(next) = g.tiers.get(n + 1) {
            let bound = BigInt::from(8) * &t.max_relator_len;
            if BigInt::from(next.epsilon) <= bound {
                violations.push(ScheduleViolation {
                    tier: tier + 1,
                    clause: "Q3".into(),
                    detail: format!(
                        "epsilon = {} is not greater than 8*max|R| = {} of tier {}",
                        next.epsilon, bound, tier
                    ),
                });
            }
        }
    }
    let mu_nonincreasing = g.tiers.windows(2).all(|w| w[1].mu <= w[0].mu);
    ScheduleVerdict {
        ok: violations.is_empty(),
        violations,
        mu_nonincreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{AbelianOracle, CosetOracle, FreeOracle};
    use crate::freeword::{symmetrize, Alphabet};
    use crate::presentation::enumerate_cosets;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn sym(rels: &[&str]) -> SymmetrizedSet {
        symmetrize(&rels.iter().map(|r| w(r)).collect::<Vec<_>>()).unwrap()
    }

    /// All ordered pairs, all prefix lengths, letter by letter.
    fn brute_pieces(s: &SymmetrizedSet) -> Vec<(usize, usize, usize)> {
        let words: Vec<&Word> = s.words().collect();
        let mut out = Vec::new();
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                let mut l = 0;
                for k in 1..=words[i].len().min(words[j].len()) {
                    if words[i].letters()[..k] == words[j].letters()[..k] {
                        l = k;
                    }
                }
                if l > 0 {
                    out.push((i, j, l));
                }
            }
        }
        out
    }

    fn brute_max_ratio(s: &SymmetrizedSet) -> Rational {
        let words: Vec<&Word> = s.words().collect();
        let mut best = Rational::zero();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                if i != j {
                    let l = (0..=a.len().min(b.len()))
                        .rev()
                        .find(|&k| a.letters()[..k] == b.letters()[..k])
                        .unwrap();
                    best = best.max(ratio(l as i64, a.len() as i64));
                }
            }
        }
        best
    }

    #[test]
    fn piece_examples() {
        let s = sym(&["aaaaaaab", "aaaaaaabb"]);
        let report = enumerate_pieces(&s).unwrap();
        assert!(report
            .pieces
            .iter()
            .any(|p| p.piece.letters().starts_with(w("aaaaaaa").letters())));
        assert!(report.max_ratio >= ratio(7, 8));

        let g1 = enumerate_pieces(&sym(&["abAB"])).unwrap();
        assert_eq!(g1.max_piece_len, 1);
        let g2 = enumerate_pieces(&sym(&["abABcdCD"])).unwrap();
        assert_eq!(g2.max_piece_len, 1);
        assert_eq!(g2.max_ratio, ratio(1, 8));
        assert_eq!(g2.relator_count, 1);
        assert_eq!(g2.piece_count, g2.pieces.len());
    }

    #[test]
    fn classical_examples() {
        let genus2 = sym(&["abABcdCD"]);
        assert!(check_classical(&genus2, &ratio(1, 6)).ok);
        let v = check_classical(&sym(&["aaaaaaab", "aaaaaaabb"]), &ratio(1, 6));
        assert!(!v.ok);
        let piece = v.violating_piece.unwrap().piece;
        assert!(piece.letters().starts_with(w("aaaaaaa").letters()));
        for mu in [ratio(1, 100), ratio(1, 2)] {
            let v = check_classical(&sym(&["ab"]), &mu);
            assert!(v.ok);
            assert_eq!(v.max_ratio, Rational::zero());
        }
    }

    #[test]
    fn strict_inequality_at_the_threshold() {
        // Genus-2 max ratio is exactly 1/8: C'(1/8) must fail, anything above passes.
        let s = sym(&["abABcdCD"]);
        assert!(!check_classical(&s, &ratio(1, 8)).ok);
        assert!(check_classical(&s, &ratio(9, 70)).ok);
    }

    #[test]
    fn proper_powers_are_noted() {
        let report = enumerate_pieces(&sym(&["aaaaaaa"])).unwrap();
        assert!(report.note.is_some());
        assert!(report.pieces.is_empty());
        assert!(enumerate_pieces(&sym(&["abABcdCD"]))
            .unwrap()
            .note
            .is_none());
    }

    #[test]
    fn not_symmetrized_is_rejected() {
        let s = sym(&["abAB"]);
        let json = serde_json::to_string(&s).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["entries"].as_array_mut().unwrap().pop();
        let broken: SymmetrizedSet = serde_json::from_value(v).unwrap();
        assert_eq!(
            enumerate_pieces(&broken),
            Err(CancellationError::NotSymmetrized)
        );
    }

    #[test]
    fn hyperbolicity_constants() {
        let genus2 = Presentation::new(Alphabet::standard(4), vec![w("abABcdCD")]).unwrap();
        assert_eq!(
            hyperbolicity_bound(&genus2, &ratio(1, 7)).unwrap(),
            int(4704)
        );
        assert!(matches!(
            hyperbolicity_bound(&genus2, &ratio(1, 6)),
            Err(CancellationError::MuTooLarge(_))
        ));
        // A length-12 relator with no pieces at all.
        let p = Presentation::new(Alphabet::standard(2), vec![w("aaaaaaaaaaaa")]).unwrap();
        assert_eq!(hyperbolicity_bound(&p, &ratio(1, 12)).unwrap(), int(576));
        let bad = Presentation::new(Alphabet::standard(2), vec![w("abAB")]).unwrap();
        assert!(matches!(
            hyperbolicity_bound(&bad, &ratio(1, 7)),
            Err(CancellationError::NotSmallCancellation { .. })
        ));
    }

    #[test]
    fn geodesic_examples() {
        let free = FreeOracle::new(Alphabet::standard(2));
        let b = BallBudget::default();
        assert_eq!(
            is_geodesic_in(&w("abAAB"), &free, 10, b),
            GeodesicVerdict::Geodesic
        );
        let p = Presentation::new(Alphabet::standard(1), vec![w("aaaaa")]).unwrap();
        let z5 = CosetOracle::new(enumerate_cosets(&p, &[], 100).unwrap());
        assert_eq!(
            is_geodesic_in(&w("aaa"), &z5, 10, b),
            GeodesicVerdict::NotGeodesic { witness: w("AA") }
        );
        let z2 = AbelianOracle::new(Alphabet::standard(2));
        assert_eq!(
            is_geodesic_in(&w("ab"), &z2, 10, b),
            GeodesicVerdict::Geodesic
        );
        assert!(matches!(
            is_geodesic_in(&w("aaaa"), &z2, 2, b),
            GeodesicVerdict::Unknown { .. }
        ));
    }

    #[test]
    fn eps_zero_over_free_group_matches_classical_pieces() {
        let free = FreeOracle::new(Alphabet::standard(2));
        for rels in [&["abABB"][..], &["aabab", "bbaab"][..], &["abaabbb"][..]] {
            let s = sym(rels);
            let report = find_eps_pieces(&s, 0, &ratio(1, 6), &free, u64::MAX).unwrap();
            let classical = longest_pieces(&s);
            for (i, &(l, _)) in classical.iter().enumerate() {
                let found = report.pieces.iter().find(|p| p.word == i);
                assert_eq!(
                    found.map_or(0, |p| p.piece.len()),
                    l,
                    "word {i} of {rels:?}"
                );
            }
        }
    }

    #[test]
    fn no_self_pieces_at_eps_zero() {
        let free = FreeOracle::new(Alphabet::standard(2));
        let s = sym(&["ab"]);
        let report = find_eps_pieces(&s, 0, &ratio(1, 6), &free, u64::MAX).unwrap();
        assert!(report.pieces.is_empty());
        assert!(!report.violation);
    }

    #[test]
    fn base_equal_subwords_are_eps_pieces() {
        // In Z^3, "aab" and "aba" are equal but share only the letter "a".
        let z3 = AbelianOracle::new(Alphabet::standard(3));
        let s = sym(&["aabbc", "ababC"]);
        let report = find_eps_pieces(&s, 1, &ratio(1, 6), &z3, u64::MAX).unwrap();
        let first = s.words().position(|x| *x == w("aabbc")).unwrap();
        let p = report.pieces.iter().find(|p| p.word == first).unwrap();
        assert!(p.piece.len() >= 3);
        assert!(longest_pieces(&s)[first].0 < 3);
        assert!(report.violation);
        // The witness really satisfies both conditions.
        let o: &dyn EqualityOracle = &z3;
        assert!(o.equal(&p.other_piece, &p.y.concat(&p.piece).concat(&p.z)));
        let r = s.get(p.word).word.clone();
        let r2 = s.get(p.other).word.clone();
        assert!(!o.equal(&p.y.concat(&r).concat(&p.y.inverse()), &r2));
    }

    #[test]
    fn eps_budget_aborts() {
        let z3 = AbelianOracle::new(Alphabet::standard(3));
        let s = sym(&["aabbc", "ababC"]);
        assert!(matches!(
            find_eps_pieces(&s, 1, &ratio(1, 6), &z3, 50),
            Err(CancellationError::BudgetExceeded(50))
        ));
    }

    fn tier(epsilon: u64, mu: Rational, rho: i64, maxlen: i64) -> Tier {
        Tier {
            epsilon,
            mu,
            rho: int(rho),
            max_relator_len: BigInt::from(maxlen),
        }
    }

    #[test]
    fn schedule_examples() {
        let ok =
            GradedSchedule::standard(vec![tier(1, ratio(1, 100), 1_000_000_000, 1_000_000_000)]);
        assert!(check_graded_schedule(&ok).ok);

        let high_mu = GradedSchedule::standard(vec![tier(1, ratio(2, 100), 1_000_000_000, 10)]);
        let v = check_graded_schedule(&high_mu);
        assert!(!v.ok);
        assert_eq!(v.violations[0].clause, "Q2");

        let q3 = GradedSchedule::standard(vec![
            tier(1, ratio(1, 100), 1_000_000_000, 1),
            tier(5, ratio(1, 100), 1_000_000_000, 1),
        ]);
        let v = check_graded_schedule(&q3);
        assert!(!v.ok);
        assert_eq!(v.violations.len(), 1);
        assert_eq!(
            (v.violations[0].tier, v.violations[0].clause.as_str()),
            (2, "Q3")
        );
        assert!(v.mu_nonincreasing);

        let small_rho = GradedSchedule::standard(vec![tier(1, ratio(1, 100), 100_000_000, 10)]);
        assert!(!check_graded_schedule(&small_rho).ok);
    }

    fn arb_relators() -> impl Strategy<Value = Vec<Word>> {
        proptest::collection::vec("[abAB]{1,12}", 1..4).prop_map(|v| {
            v.iter()
                .map(|s| w(s).cyclic_core())
                .filter(|x| !x.is_empty())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn pieces_match_brute_force(rels in arb_relators()) {
            prop_assume!(!rels.is_empty());
            let s = symmetrize(&rels).unwrap();
            let report = enumerate_pieces(&s).unwrap();
            let got: Vec<_> = report.pieces.iter()
                .map(|p| (p.occurrence_a.word, p.occurrence_b.word, p.piece.len()))
                .collect();
            prop_assert_eq!(got, brute_pieces(&s));
            prop_assert_eq!(report.max_ratio, brute_max_ratio(&s));
        }

        #[test]
        fn classical_is_monotone_in_mu(rels in arb_relators(), a in 1i64..20, b in 1i64..20) {
            prop_assume!(!rels.is_empty());
            let s = symmetrize(&rels).unwrap();
            let (lo, hi) = (ratio(a.min(b), 20), ratio(a.max(b), 20));
            if check_classical(&s, &lo).ok {
                prop_assert!(check_classical(&s, &hi).ok);
            }
        }

        #[test]
        fn bound_is_monotone(len in 1i64..50, extra in 1i64..50, m in 7i64..40) {
            let word = |n: i64| w(&"a".repeat(n as usize));
            let short = Presentation::new(Alphabet::standard(1), vec![word(len)]).unwrap();
            let long = Presentation::new(Alphabet::standard(1), vec![word(len + extra)]).unwrap();
            let mu = ratio(1, m);
            let bigger_mu = ratio(1, m - 1);
            prop_assert!(hyperbolicity_bound(&short, &mu).unwrap() < hyperbolicity_bound(&long, &mu).unwrap());
            if m - 1 > 6 {
                prop_assert!(hyperbolicity_bound(&short, &mu).unwrap() < hyperbolicity_bound(&short, &bigger_mu).unwrap());
            }
        }
    }
}
