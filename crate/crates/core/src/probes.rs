//! Metric probes on Cayley balls: Gromov's four-point δ, Rips thin
//! triangles, divergence and the Floyd metric.
//!
//! Every scan is confined to vertices whose pairwise distances are exact in
//! the ball; quantities are kept as doubled integers or exact rationals.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{Ball, CayleyError, NONE};
use crate::freeword::Word;
use crate::rational::{int, ratio, serde_rational, serde_rational_opt, Rational};

#[derive(thiserror::Error, Debug)]
pub enum ProbeError {
    #[error("basepoint {0} is outside the scan core, so its distances are not exact")]
    TooFewExactPairs(String),
    #[error("scan radius {scan} exceeds the exact limit {limit} for a ball of radius {radius}")]
    ScanTooLarge { scan: u32, limit: u32, radius: u32 },
    #[error("distance from {from} to {to} is not exact in this ball")]
    NotExact { from: String, to: String },
    #[error("n_max = {n_max} needs a ball of radius at least {needed}, got {radius}")]
    BallTooSmall {
        n_max: u32,
        needed: u32,
        radius: u32,
    },
    #[error("geodesic enumeration budget of {0} triangles exhausted")]
    BudgetExceeded(u64),
    #[error("Floyd weights for radius {0} overflow 128-bit arithmetic")]
    FloydOverflow(u32),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

/// All-pairs distances among `vertices`, by one BFS per vertex.
fn distance_table(ball: &Ball, vertices: &[u32]) -> Vec<Vec<u32>> {
    vertices.par_iter().map(|&v| ball.bfs(v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperbolicityEstimate {
    #[serde(with = "serde_rational")]
    pub gromov_delta_p: Rational,
    pub basepoint: Word,
    pub scan_radius: u32,
    #[serde(with = "serde_rational_opt")]
    pub thin_triangle_delta: Option<Rational>,
    #[serde(with = "serde_rational")]
    pub exact_pair_fraction: Rational,
}

/// Four-point δ at `basepoint` over the half-radius core.
pub fn gromov_delta_4pt(ball: &Ball, basepoint: u32) -> Result<Rational, ProbeError> {
    gromov_delta_4pt_within(ball, basepoint, ball.radius() / 2)
}

/// `max over x, y, z of min((x,z)_p, (y,z)_p) − (x,y)_p`, clamped at 0, with
/// `x, y, z, p` ranging over vertices at distance at most `scan` from the
/// identity.
pub fn gromov_delta_4pt_within(
    ball: &Ball,
    basepoint: u32,
    scan: u32,
) -> Result<Rational, ProbeError> {
    let limit = ball.radius() / 2;
    if scan > limit {
        return Err(ProbeError::ScanTooLarge {
            scan,
            limit,
            radius: ball.radius(),
        });
    }
    ball.dist(basepoint, basepoint)?;
    if ball.dist0(basepoint) > scan {
        return Err(ProbeError::TooFewExactPairs(
            ball.word(basepoint).to_string(),
        ));
    }
    Ok(gromov_delta_on(ball, &ball.core(scan), basepoint))
}

/// Four-point δ at `basepoint` over an explicit point set containing it.
///
/// The caller is responsible for every pairwise distance among `points`
/// being exact in the ball.
pub fn gromov_delta_on(ball: &Ball, points: &[u32], basepoint: u32) -> Rational {
    let table = distance_table(ball, points);
    let p = points
        .iter()
        .position(|&v| v == basepoint)
        .expect("basepoint among the points");
    let m = points.len();
    // Doubled Gromov products (x, y)_p.
    let gp: Vec<Vec<i64>> = (0..m)
        .map(|x| {
            (0..m)
                .map(|y| {
                    table[p][points[x] as usize] as i64 + table[p][points[y] as usize] as i64
                        - table[x][points[y] as usize] as i64
                })
                .collect()
        })
        .collect();
    let best = (0..m)
        .into_par_iter()
        .map(|x| {
            let mut best = 0i64;
            for y in 0..m {
                let xy = gp[x][y];
                for z in 0..m {
                    best = best.max(gp[x][z].min(gp[y][z]) - xy);
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    ratio(best, 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GeodesicChoice {
    /// One BFS-canonical geodesic per side.
    Canonical,
    /// Up to `per_side` geodesics per side, all combinations, at most
    /// `budget` triangles in total.
    All { per_side: usize, budget: u64 },
}

/// Thin-triangle δ over the quarter-radius core with canonical geodesics.
pub fn thin_triangle_delta(ball: &Ball) -> Result<Rational, ProbeError> {
    thin_triangle_delta_within(ball, ball.radius() / 4, GeodesicChoice::Canonical)
}

/// Smallest `R` such that every scanned geodesic triangle is `R`-thin at
/// vertex resolution, maximized over triangles with corners within `scan`
/// of the identity.
///
/// Geodesic sides between such corners stay within `radius/2` of the
/// identity, so every distance used is exact when `scan <= radius/4`.
pub fn thin_triangle_delta_within(
    ball: &Ball,
    scan: u32,
    choice: GeodesicChoice,
) -> Result<Rational, ProbeError> {
    let limit = ball.radius() / 4;
    if scan > limit {
        return Err(ProbeError::ScanTooLarge {
            scan,
            limit,
            radius: ball.radius(),
        });
    }
    let corners = ball.core(scan);
    let inner = ball.core(ball.radius() / 2);
    let mut slot = vec![NONE; ball.len()];
    for (i, &v) in inner.iter().enumerate() {
        slot[v as usize] = i as u32;
    }
    let table = distance_table(ball, &inner);
    let d = |u: u32, v: u32| table[slot[u as usize] as usize][v as usize];

    let per_side = match choice {
        GeodesicChoice::Canonical => 1,
        GeodesicChoice::All { per_side, .. } => per_side.max(1),
    };
    let m = corners.len();
    let mut sides: Vec<Vec<Vec<Vec<u32>>>> = vec![vec![Vec::new(); m]; m];
    for i in 0..m {
        for j in 0..m {
            sides[i][j] = ball.geodesics(corners[i], corners[j], per_side)?;
        }
    }
    if let GeodesicChoice::All { budget, .. } = choice {
        let mut total: u64 = 0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    total += (sides[i][j].len() * sides[j][k].len() * sides[k][i].len()) as u64;
                }
            }
        }
        if total > budget {
            return Err(ProbeError::BudgetExceeded(budget));
        }
    }

    // Largest distance from a point of `side` to the union of `a` and `b`.
    let side_gap = |side: &[u32], a: &[u32], b: &[u32]| -> u32 {
        side.iter()
            .map(|&v| a.iter().chain(b).map(|&w| d(v, w)).min().unwrap_or(0))
            .max()
            .unwrap_or(0)
    };
    let best = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = 0u32;
            for j in 0..m {
                for k in 0..m {
                    for xy in &sides[i][j] {
                        for yz in &sides[j][k] {
                            for zx in &sides[k][i] {
                                let r = side_gap(xy, yz, zx)
                                    .max(side_gap(yz, zx, xy))
                                    .max(side_gap(zx, xy, yz));
                                best = best.max(r);
                            }
                        }
                    }
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok(int(best as i64))
}

pub fn estimate_hyperbolicity(
    ball: &Ball,
    basepoint: u32,
    with_thin: bool,
) -> Result<HyperbolicityEstimate, ProbeError> {
    let scan = ball.radius() / 2;
    Ok(HyperbolicityEstimate {
        gromov_delta_p: gromov_delta_4pt_within(ball, basepoint, scan)?,
        basepoint: ball.word(basepoint).clone(),
        scan_radius: scan,
        thin_triangle_delta: if with_thin {
            Some(thin_triangle_delta(ball)?)
        } else {
            None
        },
        // The core restriction makes every scanned pair exact.
        exact_pair_fraction: int(1),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DivValue {
    Finite(u32),
    InfiniteInBall,
}

impl std::fmt::Display for DivValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivValue::Finite(n) => write!(f, "{n}"),
            DivValue::InfiniteInBall => f.write_str("inf"),
        }
    }
}

/// The forbidden radius `δr − λ`, or `None` when it is non-positive.
fn forbidden_radius(r: u32, delta: &Rational, lambda: &Rational) -> Option<Rational> {
    let rho = delta * int(r as i64) - lambda;
    (rho > Rational::zero()).then_some(rho)
}

/// Length of a shortest in-ball path from `a` to `b` avoiding the closed ball
/// `Ball(c, δr − λ)`, where `r = min(dist(c,a), dist(c,b))`.
pub fn divergence(
    ball: &Ball,
    a: u32,
    b: u32,
    c: u32,
    delta: &Rational,
    lambda: &Rational,
) -> Result<DivValue, ProbeError> {
    let from_c = ball.bfs(c);
    divergence_with(ball, a, b, c, &from_c, delta, lambda)
}

fn divergence_with(
    ball: &Ball,
    a: u32,
    b: u32,
    c: u32,
    from_c: &[u32],
    delta: &Rational,
    lambda: &Rational,
) -> Result<DivValue, ProbeError> {
    let not_exact = |x: u32| ProbeError::NotExact {
        from: ball.word(c).to_string(),
        to: ball.word(x).to_string(),
    };
    for x in [a, b] {
        if !ball.is_exact(c, x) {
            return Err(not_exact(x));
        }
    }
    let r = from_c[a as usize].min(from_c[b as usize]);
    let mut forbidden = vec![false; ball.len()];
    if let Some(rho) = forbidden_radius(r, delta, lambda) {
        // Vertices within rho of c are found exactly when the whole ball
        // around c fits inside the ball.
        let reach = rho.floor().to_integer().to_u32().unwrap_or(u32::MAX);
        if ball.dist0(c).saturating_add(reach) > ball.radius() {
            return Err(not_exact(c));
        }
        for (v, &dv) in from_c.iter().enumerate() {
            if dv != NONE && dv <= reach {
                forbidden[v] = true;
            }
        }
        if forbidden[a as usize] || forbidden[b as usize] {
            return Ok(DivValue::InfiniteInBall);
        }
    }
    Ok(match ball.shortest_path_avoiding(a, b, &forbidden)? {
        Some(p) => DivValue::Finite(p.length),
        None => DivValue::InfiniteInBall,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceEntry {
    pub n: u32,
    pub value: DivValue,
    pub a: Word,
    pub b: Word,
    pub c: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceProfile {
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub mode: ScanMode,
    pub entries: Vec<DivergenceEntry>,
    /// Number of triples evaluated.
    pub triples: u64,
    /// Smallest `C` with `value <= C·n` for every finite entry.
    #[serde(with = "serde_rational_opt")]
    pub linear_constant: Option<Rational>,
}

impl DivergenceProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,a,b,c\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{},{}", e.n, e.value, e.a, e.b, e.c);
        }
        out
    }
}

/// `Div_λ(n; δ)` for `n = 1..=n_max`, as a supremum over triples.
///
/// The Cayley graph is vertex-transitive, so `a` is fixed at the identity.
/// `b` ranges over `Ball(n_max)` and `c` over every vertex for which the
/// triple's distances and forbidden ball are exact; values are therefore
/// lower bounds for the group's divergence.
pub fn divergence_profile(
    ball: &Ball,
    n_max: u32,
    delta: &Rational,
    lambda: &Rational,
    mode: &ScanMode,
) -> Result<DivergenceProfile, ProbeError> {
    if n_max == 0 || 3 * n_max > ball.radius() {
        return Err(ProbeError::BallTooSmall {
            n_max,
            needed: 3 * n_max.max(1),
            radius: ball.radius(),
        });
    }
    let bs: Vec<u32> = ball.core(n_max).into_iter().filter(|&v| v != 0).collect();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for c in 0..ball.len() as u32 {
        for &b in &bs {
            if ball.is_exact(c, b) && forbidden_ball_exact(ball, c, delta, lambda) {
                pairs.push((c, b));
            }
        }
    }
    if let ScanMode::Sampled { seed, count } = mode {
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        pairs.shuffle(&mut rng);
        pairs.truncate(*count);
        pairs.sort_unstable();
    }

    // Group by c so one BFS from c serves every b.
    let mut by_c: Vec<(u32, Vec<u32>)> = Vec::new();
    for (c, b) in pairs.iter().copied() {
        match by_c.last_mut() {
            Some((last, list)) if *last == c => list.push(b),
            _ => by_c.push((c, vec![b])),
        }
    }
    let results: Vec<Vec<(u32, u32, DivValue)>> = by_c
        .par_iter()
        .map(|(c, list)| {
            let from_c = ball.bfs(*c);
            list.iter()
                .map(|&b| {
                    let v = divergence_with(ball, 0, b, *c, &from_c, delta, lambda)
                        .expect("triple prefiltered for exactness");
                    (b, *c, v)
                })
                .collect()
        })
        .collect();

    // best[n] = (value, b, c) maximizing value, first in (c, b) order on ties.
    let mut best: Vec<Option<(DivValue, u32, u32)>> = vec![None; n_max as usize + 1];
    for (b, c, v) in results.into_iter().flatten() {
        let n = ball.dist0(b) as usize;
        if best[n].is_none_or(|(bv, ..)| v > bv) {
            best[n] = Some((v, b, c));
        }
    }
    let mut entries = Vec::new();
    let mut running: Option<(DivValue, u32, u32)> = None;
    for n in 1..=n_max as usize {
        if let Some(cand) = best[n] {
            if running.is_none_or(|(rv, ..)| cand.0 > rv) {
                running = Some(cand);
            }
        }
        if let Some((value, b, c)) = running {
            entries.push(DivergenceEntry {
                n: n as u32,
                value,
                a: Word::empty(),
                b: ball.word(b).clone(),
                c: ball.word(c).clone(),
            });
        }
    }
    let linear_constant = entries
        .iter()
        .try_fold(Rational::zero(), |acc, e| match e.value {
            DivValue::Finite(v) => Some(acc.max(ratio(v as i64, e.n as i64))),
            DivValue::InfiniteInBall => None,
        });
    Ok(DivergenceProfile {
        delta: delta.clone(),
        lambda: lambda.clone(),
        mode: mode.clone(),
        entries,
        triples: pairs.len() as u64,
        linear_constant,
    })
}

fn forbidden_ball_exact(ball: &Ball, c: u32, delta: &Rational, lambda: &Rational) -> bool {
    // With a = 1 the forbidden radius is at most delta * |c| - lambda.
    let r = ball.dist0(c);
    match forbidden_radius(r, delta, lambda) {
        None => true,
        Some(rho) => {
            let reach = rho.floor().to_integer().to_u32().unwrap_or(u32::MAX);
            ball.dist0(c).saturating_add(reach) <= ball.radius()
        }
    }
}

/// Exact Floyd metric on a ball: edge `(x, y)` has length
/// `(1 + min(|x|, |y|))⁻²`.
///
/// Lengths are scaled by `L = lcm(1², …, (radius+1)²)` so that shortest paths
/// run on integers.
pub struct FloydMetric<'a> {
    ball: &'a Ball,
    scale: u128,
    weights: Vec<u128>,
}

impl<'a> FloydMetric<'a> {
    pub fn new(ball: &'a Ball) -> Result<Self, ProbeError> {
        let overflow = || ProbeError::FloydOverflow(ball.radius());
        let mut lcm: u128 = 1;
        for k in 1..=ball.radius() as u128 + 1 {
            lcm = lcm.lcm(&k);
        }
        let scale = lcm.checked_mul(lcm).ok_or_else(overflow)?;
        // Shortest paths have at most |V| edges of weight at most `scale`.
        scale.checked_mul(ball.len() as u128).ok_or_else(overflow)?;
        let weights = (0..=ball.radius() as u128)
            .map(|k| scale / ((k + 1) * (k + 1)))
            .collect();
        Ok(FloydMetric {
            ball,
            scale,
            weights,
        })
    }

    pub fn scale(&self) -> u128 {
        self.scale
    }

    /// Scaled Floyd distances from `src` to every vertex.
    pub fn scaled_from(&self, src: u32) -> Vec<u128> {
        let ball = self.ball;
        let mut dist = vec![u128::MAX; ball.len()];
        let mut heap = BinaryHeap::new();
        dist[src as usize] = 0;
        heap.push(Reverse((0u128, src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &u in ball.neighbors(v) {
                let k = ball.dist0(u).min(ball.dist0(v)) as usize;
                let nd = d + self.weights[k];
                if nd < dist[u as usize] {
                    dist[u as usize] = nd;
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        dist
    }

    pub fn to_rational(&self, scaled: u128) -> Rational {
        Rational::new(BigInt::from(scaled), BigInt::from(self.scale))
    }

    pub fn distance(&self, u: u32, v: u32) -> Result<Rational, ProbeError> {
        self.ball.dist(u, v)?;
        Ok(self.to_rational(self.scaled_from(u)[v as usize]))
    }
}

pub fn floyd_distance(ball: &Ball, u: u32, v: u32) -> Result<Rational, ProbeError> {
    FloydMetric::new(ball)?.distance(u, v)
}
