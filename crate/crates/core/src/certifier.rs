//! Rips complexes, brute-force loop filling and the local-to-global
//! hyperbolicity certificate.

use std::collections::{HashMap, VecDeque};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cayley::Ball;
use crate::probes::{gromov_delta_on, ProbeError};
use crate::rational::{int, ratio, serde_rational, serde_rational_opt, Rational};

#[derive(thiserror::Error, Debug)]
pub enum CertifierError {
    #[error("scale d must be positive")]
    NonPositiveScale,
    #[error("distance matrix is not square or not symmetric")]
    BadMetric,
    #[error("vertex {0} is not in the complex")]
    UnknownVertex(u32),
    #[error("consecutive loop vertices {0} and {1} are not joined by an edge")]
    NotALoop(u32, u32),
    #[error("no filling with at most {max_cells} triangles")]
    NoFillingFound { max_cells: u64 },
    #[error("filling search exceeded {0} states")]
    BudgetExceeded(usize),
    #[error("scale d = {d} is below 8·delta = {bound}")]
    ScaleBelowBound { d: String, bound: String },
    #[error("ball of radius {radius} cannot hold exact sub-balls of radius {needed}")]
    BallTooSmall { radius: u32, needed: u32 },
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// `coefficient · √radicand`, kept symbolic so no irrational value is ever
/// rounded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surd {
    #[serde(with = "serde_rational")]
    pub coefficient: Rational,
    pub radicand: u64,
}

impl Surd {
    pub fn new(coefficient: Rational, radicand: u64) -> Self {
        Surd {
            coefficient,
            radicand,
        }
    }

    /// The square `coefficient² · radicand`.
    pub fn squared(&self) -> Rational {
        &self.coefficient * &self.coefficient * int(self.radicand as i64)
    }
}

impl std::fmt::Display for Surd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*sqrt({})", self.coefficient, self.radicand)
    }
}

/// Clique complex up to dimension two on a finite metric space at scale `d`.
#[derive(Clone, Debug)]
pub struct RipsComplex {
    d: Rational,
    labels: Vec<String>,
    neighbors: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    triangles: Vec<[u32; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RipsSummary {
    #[serde(with = "serde_rational")]
    pub d: Rational,
    pub vertices: Vec<String>,
    pub edges: Vec<(u32, u32)>,
    pub triangles: Vec<[u32; 3]>,
}

pub fn build_rips(
    labels: Vec<String>,
    dist: &[Vec<Rational>],
    d: &Rational,
) -> Result<RipsComplex, CertifierError> {
    let n = labels.len();
    if dist.len() != n || dist.iter().any(|row| row.len() != n) {
        return Err(CertifierError::BadMetric);
    }
    for i in 0..n {
        for j in 0..i {
            if dist[i][j] != dist[j][i] {
                return Err(CertifierError::BadMetric);
            }
        }
    }
    RipsComplex::from_predicate(labels, d, |i, j| dist[i][j] <= *d)
}

impl RipsComplex {
    fn from_predicate(
        labels: Vec<String>,
        d: &Rational,
        close: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, CertifierError> {
        if *d <= Rational::zero() {
            return Err(CertifierError::NonPositiveScale);
        }
        let n = labels.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if close(i, j) {
                    neighbors[i].push(j as u32);
                    neighbors[j].push(i as u32);
                    edges.push((i as u32, j as u32));
                }
            }
        }
        let mut triangles = Vec::new();
        for &(i, j) in &edges {
            for &k in &neighbors[j as usize] {
                if k > j && neighbors[i as usize].binary_search(&k).is_ok() {
                    triangles.push([i, j, k]);
                }
            }
        }
        Ok(RipsComplex {
            d: d.clone(),
            labels,
            neighbors,
            edges,
            triangles,
        })
    }

    /// The complex on `Ball(scan)` of a Cayley ball, using in-ball distances,
    /// which are exact there when `2·scan <= radius`.
    pub fn from_ball(ball: &Ball, scan: u32, d: &Rational) -> Result<Self, CertifierError> {
        if 2 * scan > ball.radius() {
            return Err(CertifierError::BallTooSmall {
                radius: ball.radius(),
                needed: scan,
            });
        }
        let points = ball.core(scan);
        let rows: Vec<Vec<u32>> = points.iter().map(|&v| ball.bfs(v)).collect();
        let labels = points.iter().map(|&v| ball.word(v).to_string()).collect();
        Self::from_predicate(labels, d, |i, j| {
            int(rows[i][points[j] as usize] as i64) <= *d
        })
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[v as usize]
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.neighbors[u as usize].binary_search(&v).is_ok()
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as u32)
    }

    pub fn summary(&self) -> RipsSummary {
        RipsSummary {
            d: self.d.clone(),
            vertices: self.labels.clone(),
            edges: self.edges.clone(),
            triangles: self.triangles.clone(),
        }
    }

    fn check_loop(&self, cycle: &[u32]) -> Result<(), CertifierError> {
        for &v in cycle {
            if v as usize >= self.len() {
                return Err(CertifierError::UnknownVertex(v));
            }
        }
        if cycle.len() >= 2 {
            for i in 0..cycle.len() {
                let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                if !self.adjacent(u, v) {
                    return Err(CertifierError::NotALoop(u, v));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillOptions {
    pub max_cells: u64,
    /// Cap on distinct intermediate loops visited.
    pub max_states: usize,
    /// Intermediate loops may be this many edges longer than the input.
    pub slack: usize,
}

impl Default for FillOptions {
    fn default() -> Self {
        FillOptions {
            max_cells: 16,
            max_states: 2_000_000,
            slack: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filling {
    pub cells: u64,
    /// Area `cells · (√3/4)·d²`.
    pub area: Surd,
    /// Triangles of the disk, with multiplicity, in contraction order.
    pub disk: Vec<[u32; 3]>,
}

/// Least rotation of a cyclic sequence; loops of length at most one are the
/// trivial loop.
fn canonical(cycle: &[u32]) -> Vec<u32> {
    if cycle.len() <= 1 {
        return Vec::new();
    }
    let k = cycle.len();
    let best = (0..k)
        .min_by(|&a, &b| {
            (0..k)
                .map(|i| cycle[(a + i) % k])
                .cmp((0..k).map(|i| cycle[(b + i) % k]))
        })
        .unwrap();
    (0..k).map(|i| cycle[(best + i) % k]).collect()
}

fn sorted3(a: u32, b: u32, c: u32) -> [u32; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Moves from a loop: deleting or inserting a backtrack is free, and
/// crossing one triangle costs one cell.
fn moves(rc: &RipsComplex, cycle: &[u32], cap: usize) -> Vec<(Vec<u32>, Option<[u32; 3]>)> {
    let k = cycle.len();
    let mut out = Vec::new();
    let splice = |at: usize, remove: usize, insert: &[u32]| -> Vec<u32> {
        // Rotate so position `at` is first, then edit the front.
        let mut r: Vec<u32> = (0..k).map(|i| cycle[(at + i) % k]).collect();
        r.splice(0..remove, insert.iter().copied());
        r
    };
    for i in 0..k {
        if cycle[(i + k - 1) % k] == cycle[(i + 1) % k] {
            out.push((splice(i, 2.min(k), &[]), None));
        }
    }
    for i in 0..k {
        let prev = cycle[(i + k - 1) % k];
        let cur = cycle[i];
        let next = cycle[(i + 1) % k];
        if prev != next && rc.adjacent(prev, next) {
            out.push((splice(i, 1, &[]), Some(sorted3(prev, cur, next))));
        }
        if k < cap {
            for &z in rc.neighbors(cur) {
                if z != next && rc.adjacent(z, next) {
                    out.push((splice(i, 1, &[cur, z]), Some(sorted3(cur, z, next))));
                }
            }
        }
        if k + 2 <= cap {
            for &z in rc.neighbors(cur) {
                out.push((splice(i, 1, &[cur, z, cur]), None));
            }
        }
    }
    out
}

/// Least number of triangles in a singular disk bounding `cycle`, found by
/// 0-1 breadth-first search over intermediate loops.
///
/// `cycle` lists vertices `v0 … v(k-1)` with edges `v(i) → v(i+1 mod k)`.
/// Returns `Ok(None)` when no disk with at most `max_cells` triangles exists
/// within the explored loop lengths.
pub fn filling_area_bruteforce(
    rc: &RipsComplex,
    cycle: &[u32],
    opts: &FillOptions,
) -> Result<Option<Filling>, CertifierError> {
    rc.check_loop(cycle)?;
    let cap = cycle.len() + opts.slack;
    let start = canonical(cycle);
    let mut best: HashMap<Vec<u32>, (u64, Option<(Vec<u32>, Option<[u32; 3]>)>)> = HashMap::new();
    best.insert(start.clone(), (0, None));
    let mut queue = VecDeque::from([(0u64, start)]);
    while let Some((cost, state)) = queue.pop_front() {
        if best[&state].0 < cost {
            continue;
        }
        if cost > opts.max_cells {
            return Ok(None);
        }
        if state.is_empty() {
            let mut disk = Vec::new();
            let mut cur = state;
            while let Some((_, Some((parent, tri)))) = best.get(&cur) {
                if let Some(t) = tri {
                    disk.push(*t);
                }
                cur = parent.clone();
            }
            disk.reverse();
            let d2 = rc.d() * rc.d();
            return Ok(Some(Filling {
                cells: cost,
                area: Surd::new(int(cost as i64) * d2 * ratio(1, 4), 3),
                disk,
            }));
        }
        // Free moves go to the front in reverse, so backtrack deletions,
        // generated first, are explored first.
        for (next, tri) in moves(rc, &state, cap).into_iter().rev() {
            let next = canonical(&next);
            let step = tri.is_some() as u64;
            let nc = cost + step;
            if best.get(&next).is_none_or(|(c, _)| nc < *c) {
                if best.len() >= opts.max_states {
                    return Err(CertifierError::BudgetExceeded(opts.max_states));
                }
                best.insert(next.clone(), (nc, Some((state.clone(), tri))));
                if step == 0 {
                    queue.push_front((nc, next));
                } else {
                    queue.push_back((nc, next));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoperimetricCheck {
    pub holds: bool,
    /// Loop length `k·d`.
    #[serde(with = "serde_rational")]
    pub length: Rational,
    pub area: Surd,
    pub cells: u64,
}

/// Checks `L >= (d/(4√3))·A` for a loop and its least filling.
///
/// With `A = cells·(√3/4)·d²` and `L = k·d` the radicals cancel, leaving
/// `16·k >= cells·d²`.
pub fn check_isoperimetric(
    rc: &RipsComplex,
    cycle: &[u32],
    delta: &Rational,
    opts: &FillOptions,
) -> Result<IsoperimetricCheck, CertifierError> {
    let bound = int(8) * delta;
    if *rc.d() < bound {
        return Err(CertifierError::ScaleBelowBound {
            d: rc.d().to_string(),
            bound: bound.to_string(),
        });
    }
    let filling =
        filling_area_bruteforce(rc, cycle, opts)?.ok_or(CertifierError::NoFillingFound {
            max_cells: opts.max_cells,
        })?;
    let k = if cycle.len() <= 1 { 0 } else { cycle.len() };
    let d = rc.d();
    Ok(IsoperimetricCheck {
        holds: int(16 * k as i64) >= int(filling.cells as i64) * d * d,
        length: int(k as i64) * d,
        area: filling.area,
        cells: filling.cells,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centers {
    Identity,
    /// Every center whose sub-ball lies in the exact core.
    All,
}

/// Largest four-point δ of the radius-`r` sub-balls, each measured at its
/// own center.
pub fn local_hyperbolicity_scan(
    ball: &Ball,
    r: u32,
    centers: Centers,
) -> Result<Rational, CertifierError> {
    let half = ball.radius() / 2;
    if r > half {
        return Err(CertifierError::BallTooSmall {
            radius: ball.radius(),
            needed: r,
        });
    }
    match centers {
        Centers::Identity => Ok(gromov_delta_on(ball, &ball.core(r), 0)),
        Centers::All => {
            let mut best = Rational::zero();
            for c in ball.core(half - r) {
                let from_c = ball.bfs(c);
                let points: Vec<u32> = (0..ball.len() as u32)
                    .filter(|&v| from_c[v as usize] <= r)
                    .collect();
                best = best.max(gromov_delta_on(ball, &points, c));
            }
            Ok(best)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateConstants {
    pub c1: u64,
    pub c2: u64,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub c3: Surd,
    /// Scaled-down constants that exercise the verdict logic; they carry no
    /// mathematical guarantee.
    pub test_only: bool,
}

impl CertificateConstants {
    pub fn standard() -> Self {
        let (c1, c2) = (32u64, 64 * 500u64);
        CertificateConstants {
            c1,
            c2,
            c: ratio(1, 4 * c1 as i64 * c2 as i64),
            c3: Surd::new(int(400), 500),
            test_only: false,
        }
    }

    pub fn test() -> Self {
        CertificateConstants {
            c2: 2,
            c: ratio(1, 4),
            test_only: true,
            ..Self::standard()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    tag = "verdict",
    content = "reason",
    rename_all = "SCREAMING_SNAKE_CASE"
)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Maximal relator length as supplied.
    pub max_relator_len: u64,
    /// `max(D, 1)`, since a free group is handled as `D = 1`.
    pub d_used: u64,
    pub constants: CertificateConstants,
    #[serde(with = "serde_rational")]
    pub rho: Rational,
    pub r_tested: u32,
    pub centers: Centers,
    #[serde(with = "serde_rational_opt")]
    pub local_delta: Option<Rational>,
    /// `c·R`; PASS needs `4·local_delta <= c·R`.
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    pub verdict: Verdict,
    pub implication: String,
    pub caveat: String,
}

/// Local-to-global certificate: if every `R`-ball with `R >= ρ = C2·D` is
/// `cR`-hyperbolic in Rips' sense, the group is hyperbolic.
///
/// The four-point δ is converted to Rips thinness by the factor 4, so PASS
/// is only issued when `4·δ <= c·R`.
pub fn certify(
    ball: &Ball,
    max_relator_len: u64,
    r: u32,
    constants: &CertificateConstants,
    centers: Centers,
) -> Result<Certificate, CertifierError> {
    let d_used = max_relator_len.max(1);
    let rho = int(constants.c2 as i64) * int(d_used as i64);
    let threshold = &constants.c * int(r as i64);
    let mut cert = Certificate {
        max_relator_len,
        d_used,
        constants: constants.clone(),
        rho: rho.clone(),
        r_tested: r,
        centers,
        local_delta: None,
        threshold: threshold.clone(),
        verdict: Verdict::Inconclusive(String::new()),
        implication: "PASS implies that the group is Gromov hyperbolic".into(),
        caveat: "one sub-ball stands for all of them by vertex-transitivity of the Cayley graph"
            .into(),
    };
    if constants.test_only {
        cert.implication = "test constants: the verdict carries no mathematical guarantee".into();
    }
    if int(r as i64) < rho {
        cert.verdict = Verdict::Inconclusive("R below rho".into());
        return Ok(cert);
    }
    if ball.radius() < 2 * r {
        return Err(CertifierError::BallTooSmall {
            radius: ball.radius(),
            needed: r,
        });
    }
    let delta = local_hyperbolicity_scan(ball, r, centers)?;
    cert.verdict = if int(4) * &delta <= threshold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    cert.local_delta = Some(delta);
    Ok(cert)
}

/// All closed edge-walks of length `1..=max_len` starting at `base`.
pub fn closed_walks(rc: &RipsComplex, base: u32, max_len: usize) -> Vec<Vec<u32>> {
    fn go(
        rc: &RipsComplex,
        base: u32,
        max_len: usize,
        path: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let last = *path.last().unwrap();
        if path.len() > 1 && rc.adjacent(last, base) {
            out.push(path.clone());
        }
        if path.len() == max_len {
            return;
        }
        for &z in rc.neighbors(last) {
            path.push(z);
            go(rc, base, max_len, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    if max_len >= 2 {
        go(rc, base, max_len, &mut vec![base], &mut out);
    }
    out
}
