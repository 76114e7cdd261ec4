//! Generators for example families: aperiodic words, lacunary families,
//! central extensions, windowed-commutator groups and the torsion schedule.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cancellation::check_classical;
use crate::freeword::{Alphabet, Letter, Word};
use crate::presentation::{
    length_spectrum, sparseness_witness, Gap, Presentation, PresentationError,
};
use crate::rational::{format_rational, int, serde_rational, serde_rational_vec, Rational};

#[derive(thiserror::Error, Debug)]
pub enum ZooError {
    #[error("exponent k = {0} must be at least 2")]
    BadExponent(u64),
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("n0 = {n0} is not a power of {p}")]
    BadN0 { p: u64, n0: u64 },
    #[error("phi is not admissible: {0}")]
    PhiInadmissible(String),
    #[error("no delta estimate supplied for r = {0}")]
    MissingDelta(usize),
    #[error("intervals for r = {0} and r = {1} overlap")]
    IntervalOverlap(usize, usize),
    #[error("schedule value overflows 64-bit integers at r = {0}")]
    Overflow(usize),
    #[error("word source returned length {len} for index {index}")]
    SourceLength { index: u64, len: usize },
    #[error("index set must be strictly increasing")]
    IndexSetNotIncreasing,
    #[error("relator budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("{0} generators do not fit the single-letter alphabet")]
    TooManyGenerators(usize),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Generator name plus parameters, carried as a comment line in emitted
/// presentation files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub parameters: Value,
}

impl Provenance {
    pub fn new(generator: &str, parameters: Value) -> Self {
        Provenance {
            generator: generator.into(),
            parameters,
        }
    }

    pub fn note(&self) -> String {
        format!(
            "provenance: {}",
            serde_json::to_string(self).expect("plain json")
        )
    }

    /// Recovers the header from a parsed presentation.
    pub fn from_presentation(p: &Presentation) -> Option<Self> {
        p.notes
            .iter()
            .find_map(|n| n.strip_prefix("provenance:"))
            .and_then(|j| serde_json::from_str(j.trim()).ok())
    }
}

fn stamp(mut p: Presentation, name: &str, prov: Provenance) -> Presentation {
    p.notes.insert(0, prov.note());
    p.with_name(name)
}

fn has_power_suffix(w: &[u8], power: usize) -> bool {
    let n = w.len();
    (1..=n / power).any(|q| (n - power * q..n - q).all(|k| w[k] == w[k + q]))
}

/// All positive words over `{a, b}` of the given length with no non-empty
/// subword of the form `B^power`, in lexicographic order.
pub fn gen_aperiodic_words(length: usize, power: usize) -> Vec<Word> {
    fn go(buf: &mut Vec<u8>, length: usize, power: usize, out: &mut Vec<Word>) {
        if buf.len() == length {
            out.push(Word::from_letters(
                buf.iter().map(|&g| Letter::generator(g)).collect(),
            ));
            return;
        }
        for g in 0..2 {
            buf.push(g);
            if !has_power_suffix(buf, power) {
                go(buf, length, power, out);
            }
            buf.pop();
        }
    }
    let mut out = Vec::new();
    go(
        &mut Vec::with_capacity(length),
        length,
        power.max(1),
        &mut out,
    );
    out
}

/// `count >= (3/2)^length`, compared exactly as `2^length·count >= 3^length`.
pub fn meets_aperiodic_bound(length: u32, count: usize) -> bool {
    use num_bigint::BigUint;
    BigUint::from(2u32).pow(length) * BigUint::from(count) >= BigUint::from(3u32).pow(length)
}

/// Thue–Morse prefix of length `n`: overlap-free, so free of sixth powers,
/// and never a proper power.
pub fn thue_morse(n: u64) -> Word {
    Word::from_letters(
        (0..n)
            .map(|k| Letter::generator((k.count_ones() % 2) as u8))
            .collect(),
    )
}

/// The `k`-th relator is `a^i` for even `k` and `b^i` for odd `k`.
pub fn alternating_powers(k: usize, i: u64) -> Word {
    Word::letter(Letter::generator((k % 2) as u8)).pow(i as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsenessEntry {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub witness: Option<Gap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalEntry {
    /// Highest tier included.
    pub tier: usize,
    pub ok: bool,
    #[serde(with = "serde_rational")]
    pub max_ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunaryReport {
    pub spectrum: Vec<u64>,
    pub sparseness: Vec<SparsenessEntry>,
    #[serde(with = "serde_rational")]
    pub mu: Rational,
    /// One entry per tier prefix; prefixes whose symmetrized set would be too
    /// large to build are omitted.
    pub classical: Vec<ClassicalEntry>,
}

/// Above this many symmetrized letters the small-cancellation check is
/// skipped in the companion report.
pub const CLASSICAL_LETTER_CAP: u64 = 50_000_000;

/// Tiered presentation over `{a, b}` with the `k`-th relator `source(k, i_k)`
/// in tier `k + 1`, for the first `count` elements `i_k` of `index_set`.
pub fn gen_lacunary_family(
    source: &dyn Fn(usize, u64) -> Word,
    source_name: &str,
    index_set: &[u64],
    count: usize,
    lambdas: &[Rational],
    mu: &Rational,
) -> Result<(Presentation, LacunaryReport), ZooError> {
    if index_set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ZooError::IndexSetNotIncreasing);
    }
    let chosen = &index_set[..count.min(index_set.len())];
    let mut relators = Vec::with_capacity(chosen.len());
    for (k, &i) in chosen.iter().enumerate() {
        let w = source(k, i);
        if w.len() as u64 != i {
            return Err(ZooError::SourceLength {
                index: i,
                len: w.len(),
            });
        }
        relators.push(w);
    }
    let tiers = (1..=relators.len()).collect();
    let p = Presentation::tiered(Alphabet::standard(2), relators, tiers)?;
    let spectrum = length_spectrum(&p).lengths().to_vec();
    let hi = spectrum.last().copied().unwrap_or(1);
    let sparseness = lambdas
        .iter()
        .map(|l| SparsenessEntry {
            lambda: l.clone(),
            witness: sparseness_witness(&spectrum, l, 1, hi).ok().flatten(),
        })
        .collect();
    let mut classical = Vec::new();
    let mut letters = 0u64;
    for (t, r) in p.relators().iter().enumerate() {
        letters = letters.saturating_add(2 * (r.len() as u64).pow(2));
        if letters > CLASSICAL_LETTER_CAP {
            break;
        }
        let v = check_classical(&p.up_to_tier(t + 1).symmetrized(), mu);
        classical.push(ClassicalEntry {
            tier: t + 1,
            ok: v.ok,
            max_ratio: v.max_ratio,
        });
    }
    let prov = Provenance::new(
        "lacunary",
        json!({ "source": source_name, "index_set": chosen, "count": count }),
    );
    let report = LacunaryReport {
        spectrum,
        sparseness,
        mu: mu.clone(),
        classical,
    };
    Ok((stamp(p, "lacunary family", prov), report))
}

/// The super-exponential index set `2, 16, 65536` (`2^(4^k)`), truncated to
/// what fits in 64 bits.
pub fn lacunary_indices(count: usize) -> Vec<u64> {
    (0..count.min(3))
        .map(|k| 1u64 << (1u64 << (2 * k)))
        .collect()
}

/// For each `R_n`: `[R_n, x]` as `R_n x R_n⁻¹ x⁻¹` for every generator `x`,
/// and `R_n^{k_n}`, all cyclically reduced; relators of `R_n` form tier `n`.
///
/// Commutators that reduce to the empty word are dropped.
pub fn gen_central_extension(base: &[Word], ks: &[u64]) -> Result<Presentation, ZooError> {
    assert_eq!(base.len(), ks.len(), "one exponent per base relator");
    let alphabet = Alphabet::standard(2);
    let mut relators = Vec::new();
    let mut tiers = Vec::new();
    for (n, (r, &k)) in base.iter().zip(ks).enumerate() {
        if k < 2 {
            return Err(ZooError::BadExponent(k));
        }
        alphabet.check_word(r).map_err(PresentationError::from)?;
        let mut words: Vec<Word> = alphabet
            .generators()
            .map(|x| {
                let x = Word::letter(x);
                r.concat(&x).concat(&r.inverse()).concat(&x.inverse())
            })
            .collect();
        words.push(r.pow(k as usize));
        for w in words {
            let core = w.cyclic_core();
            if !core.is_empty() {
                relators.push(core);
                tiers.push(n + 1);
            }
        }
    }
    let p = Presentation::tiered(alphabet, relators, tiers)?;
    let prov = Provenance::new(
        "central",
        json!({
            "base": base.iter().map(Word::to_string).collect::<Vec<_>>(),
            "k": ks,
        }),
    );
    Ok(stamp(p, "central extension", prov))
}

/// Left-normed `[…[x0, x1], …, xc]` with `[x, y] = x⁻¹y⁻¹xy`.
pub fn left_normed(xs: &[Word]) -> Word {
    let mut it = xs.iter();
    let first = it.next().cloned().unwrap_or_else(Word::empty);
    it.fold(first, |acc, x| Word::commutator(&acc, x))
}

/// `[i]`: least `s >= 0` with `i ± s ≡ 0 (mod m)`.
pub fn circular_norm(i: i64, m: i64) -> i64 {
    let r = i.rem_euclid(m);
    r.min(m - r)
}

/// Letter used for `t`; the other generators take `a, b, c, …`.
const T_INDEX: u8 = b't' - b'a';

fn letters_with_t(n: usize) -> Result<Alphabet, ZooError> {
    if n > T_INDEX as usize {
        return Err(ZooError::TooManyGenerators(n + 1));
    }
    let mut syms: Vec<char> = (0..n as u8).map(|g| (b'a' + g) as char).collect();
    syms.push('t');
    Ok(Alphabet::new(&syms).expect("distinct lowercase letters"))
}

fn gen(i: usize) -> Word {
    Word::letter(Letter::generator(i as u8))
}

fn t() -> Word {
    Word::letter(Letter::generator(T_INDEX))
}

/// All tuples over `0..size` of length `len`, in lexicographic order,
/// accepted by `keep`.
fn tuples(size: usize, len: usize, keep: &dyn Fn(&[usize]) -> bool, out: &mut Vec<Vec<usize>>) {
    fn go(
        size: usize,
        len: usize,
        cur: &mut Vec<usize>,
        keep: &dyn Fn(&[usize]) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == len {
            if keep(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for i in 0..size {
            cur.push(i);
            go(size, len, cur, keep, out);
            cur.pop();
        }
    }
    go(size, len, &mut Vec::with_capacity(len), keep, out);
}

/// Appends the commutator relators for windows `1..=window`, skipping
/// trivial and repeated words. `diameter` measures a tuple of indices.
fn windowed_commutators(
    size: usize,
    c: &[u32],
    window: usize,
    diameter: &dyn Fn(&[usize]) -> usize,
    budget: usize,
    relators: &mut Vec<Word>,
    seen: &mut HashSet<Word>,
) -> Result<(), ZooError> {
    for n in 1..=window {
        let weight = c[n - 1] as usize + 1;
        let mut ts = Vec::new();
        tuples(size, weight, &|tu| diameter(tu) <= n, &mut ts);
        for tu in ts {
            let word = left_normed(&tu.iter().map(|&i| gen(i)).collect::<Vec<_>>()).cyclic_core();
            if !word.is_empty() && seen.insert(word.clone()) {
                if relators.len() >= budget {
                    return Err(ZooError::BudgetExceeded(budget));
                }
                relators.push(word);
            }
        }
    }
    Ok(())
}

fn check_c(c: &[u32], window: usize) {
    assert!(c.len() >= window, "c must be given for every window");
    assert!(
        c.windows(2).all(|w| w[0] <= w[1]),
        "c must be nondecreasing"
    );
}

fn is_odd_prime(p: u64) -> bool {
    p > 2
        && p % 2 == 1
        && (3..)
            .step_by(2)
            .take_while(|d| d * d <= p)
            .all(|d| p % d != 0)
}

/// Finite quotient `H_m`, `m = p^s`: generators `b_0 … b_{m-1}` as `a, b, …`
/// and `t`; relators `b_i^p`, windowed commutators of weight `c_n + 1` with
/// circular diameter at most `n`, `t⁻¹ b_i t b_{i+1}⁻¹` and `t^m`.
pub fn gen_gpc_finite_quotient(
    p: u64,
    s: u32,
    c: &[u32],
    window: usize,
    budget: usize,
) -> Result<Presentation, ZooError> {
    if !is_odd_prime(p) {
        return Err(ZooError::BadPrime(p));
    }
    let m = p.checked_pow(s).map_or(usize::MAX, |m| m as usize);
    let alphabet = letters_with_t(m)?;
    check_c(c, window);
    let mut relators: Vec<Word> = (0..m).map(|i| gen(i).pow(p as usize)).collect();
    let mut seen: HashSet<Word> = relators.iter().cloned().collect();
    let diameter = |tu: &[usize]| {
        let mut d = 0;
        for &x in tu {
            for &y in tu {
                d = d.max(circular_norm(x as i64 - y as i64, m as i64) as usize);
            }
        }
        d
    };
    windowed_commutators(
        m,
        c,
        window.min(m),
        &diameter,
        budget,
        &mut relators,
        &mut seen,
    )?;
    for i in 0..m {
        relators.push(
            t().inverse()
                .concat(&gen(i))
                .concat(&t())
                .concat(&gen((i + 1) % m).inverse()),
        );
    }
    relators.push(t().pow(m));
    let pres = Presentation::new(alphabet, relators)?;
    let prov = Provenance::new(
        "gpc-quotient",
        json!({ "p": p, "s": s, "c": &c[..window], "window": window }),
    );
    Ok(stamp(pres, &format!("H_{m}"), prov))
}

/// Truncation of `G_n` to generators `a_{-N} … a_N` (as `a, b, …`) and `t`.
pub fn gen_gn_truncation(
    p: u64,
    c: &[u32],
    n: usize,
    big_n: usize,
    budget: usize,
) -> Result<Presentation, ZooError> {
    if !is_odd_prime(p) {
        return Err(ZooError::BadPrime(p));
    }
    check_c(c, n);
    let size = 2 * big_n + 1;
    let alphabet = letters_with_t(size)?;
    let mut relators: Vec<Word> = (0..size).map(|i| gen(i).pow(p as usize)).collect();
    let mut seen: HashSet<Word> = relators.iter().cloned().collect();
    let diameter = |tu: &[usize]| tu.iter().max().unwrap() - tu.iter().min().unwrap();
    windowed_commutators(size, c, n, &diameter, budget, &mut relators, &mut seen)?;
    for i in 0..size - 1 {
        relators.push(
            t().inverse()
                .concat(&gen(i))
                .concat(&t())
                .concat(&gen(i + 1).inverse()),
        );
    }
    let pres = Presentation::new(alphabet, relators)?;
    let prov = Provenance::new(
        "gn-truncation",
        json!({ "p": p, "c": &c[..n], "n": n, "N": big_n }),
    );
    Ok(stamp(pres, &format!("G_{n} truncation"), prov))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentRegime {
    /// `i < d_r/φ(r)`: least power of p at least `max(n0, d_r/i)`.
    Lower,
    /// `d_r/φ(r) <= i <= i_r`: exactly `n0`.
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionSchedule {
    pub p: u64,
    pub n0: u64,
    #[serde(with = "serde_rational_vec")]
    pub phi: Vec<Rational>,
    /// `delta[r]` estimates the hyperbolicity constant of `G(i_{r-1})`;
    /// index 0 is unused.
    #[serde(with = "serde_rational_vec")]
    pub delta: Vec<Rational>,
    pub d: Vec<u64>,
    pub i: Vec<u64>,
}

pub const DEFAULT_N0: u64 = 243;

fn ceil_u64(x: &Rational, r: usize) -> Result<u64, ZooError> {
    x.ceil().to_integer().to_u64().ok_or(ZooError::Overflow(r))
}

/// Builds `d_r` as the least integer `>= max(φ(r)²d_{r-1}, φ(r)²δ, 2)` and
/// `i_r = ⌈φ(r)d_r⌉` for `r = 1..=r_max`.
pub fn schedule_torsion_params(
    p: u64,
    n0: u64,
    phi: &[Rational],
    delta: &[Rational],
    r_max: usize,
) -> Result<TorsionSchedule, ZooError> {
    if !is_odd_prime(p) {
        return Err(ZooError::BadPrime(p));
    }
    let mut q = n0;
    while q > 1 && q % p == 0 {
        q /= p;
    }
    if q != 1 || n0 < p {
        return Err(ZooError::BadN0 { p, n0 });
    }
    if phi.len() <= r_max {
        return Err(ZooError::PhiInadmissible(format!(
            "needs values up to r = {r_max}"
        )));
    }
    if !phi[0].is_zero() || (r_max >= 1 && phi[1] != int(1)) {
        return Err(ZooError::PhiInadmissible(
            "phi(0) = 0 and phi(1) = 1 are required".into(),
        ));
    }
    for r in 1..=r_max {
        if r >= 2 && phi[r] < int(2) {
            return Err(ZooError::PhiInadmissible(format!("phi({r}) < 2")));
        }
        if phi[r] < phi[r - 1] {
            return Err(ZooError::PhiInadmissible(format!(
                "phi decreases at r = {r}"
            )));
        }
    }
    let mut d = vec![1u64];
    let mut i = vec![0u64];
    for r in 1..=r_max {
        let est = delta.get(r).ok_or(ZooError::MissingDelta(r))?;
        let f2 = &phi[r] * &phi[r];
        let bound = (&f2 * int(d[r - 1] as i64)).max(&f2 * est).max(int(2));
        let dr = ceil_u64(&bound, r)?;
        let ir = ceil_u64(&(&phi[r] * Rational::from_integer(dr.into())), r)?;
        d.push(dr);
        i.push(ir);
    }
    let sched = TorsionSchedule {
        p,
        n0,
        phi: phi[..=r_max].to_vec(),
        delta: delta[..=r_max].to_vec(),
        d,
        i,
    };
    for r in 1..=r_max {
        for s in r + 1..=r_max {
            let (lo_r, hi_r) = sched.interval(r);
            let (lo_s, hi_s) = sched.interval(s);
            if lo_r.max(lo_s) < hi_r.min(hi_s) {
                return Err(ZooError::IntervalOverlap(r, s));
            }
        }
    }
    Ok(sched)
}

impl TorsionSchedule {
    pub fn r_max(&self) -> usize {
        self.d.len() - 1
    }

    /// The open interval `(d_r/φ(r), φ(r)·d_r)`.
    pub fn interval(&self, r: usize) -> (Rational, Rational) {
        let dr = Rational::from_integer(self.d[r].into());
        (&dr / &self.phi[r], &dr * &self.phi[r])
    }

    /// `r` with `i_{r-1} < i <= i_r`.
    pub fn rank_block(&self, i: u64) -> Option<usize> {
        (1..=self.r_max()).find(|&r| self.i[r - 1] < i && i <= self.i[r])
    }

    pub fn regime(&self, i: u64) -> Option<ExponentRegime> {
        let r = self.rank_block(i)?;
        Some(if int(i as i64) < self.interval(r).0 {
            ExponentRegime::Lower
        } else {
            ExponentRegime::Upper
        })
    }

    /// Exponent `n_A` for periods of rank `i`.
    pub fn n_a(&self, i: u64) -> Option<u128> {
        let r = self.rank_block(i)?;
        match self.regime(i)? {
            ExponentRegime::Upper => Some(self.n0 as u128),
            ExponentRegime::Lower => {
                let target =
                    (self.n0 as u128).max(Integer::div_ceil(&(self.d[r] as u128), &(i as u128)));
                let mut q = self.n0 as u128;
                while q < target {
                    q = q.checked_mul(self.p as u128)?;
                }
                Some(q)
            }
        }
    }

    /// `(i, regime, n_A)` for every rank `1..=i_{r_max}`, up to `limit` rows.
    pub fn exponent_table(&self, limit: usize) -> Vec<(u64, ExponentRegime, u128)> {
        (1..=self.i[self.r_max()])
            .take(limit)
            .filter_map(|i| Some((i, self.regime(i)?, self.n_a(i)?)))
            .collect()
    }

    pub fn describe(&self) -> Value {
        json!({
            "p": self.p,
            "n0": self.n0,
            "phi": self.phi.iter().map(format_rational).collect::<Vec<_>>(),
            "d": self.d,
            "i": self.i,
        })
    }
}
