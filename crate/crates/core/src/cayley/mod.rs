//! Exact finite balls of Cayley graphs, built by breadth-first search from an
//! equality oracle.
//!
//! Vertices are stored by their shortlex-least representative, which for a
//! sound oracle is the true shortlex normal form. Distances between `u` and
//! `v` are exact whenever `dist0(u) + dist0(v) <= radius`, since every
//! geodesic between them then stays inside the ball.

mod export;
mod oracle;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::freeword::{Alphabet, Letter, Word};

pub use oracle::{AbelianOracle, CosetOracle, EqualityOracle, FreeOracle, NormalFormOracle};

pub const NONE: u32 = u32::MAX;

#[derive(thiserror::Error, Debug)]
pub enum CayleyError {
    #[error("oracle call budget of {limit} exhausted")]
    OracleBudgetExceeded { limit: u64 },
    #[error("memory budget of {limit} vertices exhausted")]
    MemoryBudgetExceeded { limit: usize },
    #[error("{0} is not a vertex of the ball")]
    NotInBall(String),
    #[error("distance between vertices {u} and {v} is not exact in this ball")]
    NotExact { u: u32, v: u32 },
    #[error("endpoint {0} lies in the forbidden set")]
    ForbiddenEndpoint(u32),
    #[error("{left} = {right} holds in the source group but fails in the target")]
    NotAQuotient { left: String, right: String },
    #[error("malformed ball file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallBudget {
    pub max_vertices: usize,
    pub max_oracle_calls: u64,
}

impl Default for BallBudget {
    fn default() -> Self {
        BallBudget {
            max_vertices: 5_000_000,
            max_oracle_calls: u64::MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distance {
    pub value: u32,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub length: u32,
    pub vertices: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum InjectivityRadius {
    Exactly(u32),
    AtLeast(u32),
}

/// An immutable radius-`r` ball of a Cayley graph.
#[derive(Clone, Debug)]
pub struct Ball {
    alphabet: Alphabet,
    letters: Vec<Letter>,
    oracle: String,
    radius: u32,
    vertices: Vec<Word>,
    dist0: Vec<u32>,
    /// `right[v * letters.len() + i]` is `v · letters[i]`, or [`NONE`] when that
    /// product leaves the ball.
    right: Vec<u32>,
    adjacency: Vec<Vec<u32>>,
    index: HashMap<Word, u32>,
}

struct Counter {
    calls: u64,
    limit: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<(), CayleyError> {
        self.calls += 1;
        if self.calls > self.limit {
            return Err(CayleyError::OracleBudgetExceeded { limit: self.limit });
        }
        Ok(())
    }
}

/// Looks up the vertex equal to a candidate word, restricted to vertices whose
/// distance from the identity lies in `lo..=hi`.
enum Lookup {
    Keyed(HashMap<Vec<u32>, u32>),
    Bucketed(HashMap<Vec<i64>, Vec<u32>>),
}

pub fn build_ball(oracle: &dyn EqualityOracle, radius: u32) -> Result<Ball, CayleyError> {
    build_ball_with(oracle, radius, BallBudget::default())
}

pub fn build_ball_with(
    oracle: &dyn EqualityOracle,
    radius: u32,
    budget: BallBudget,
) -> Result<Ball, CayleyError> {
    let alphabet = oracle.alphabet().clone();
    let letters = alphabet.letters();
    let nl = letters.len();
    let mut counter = Counter {
        calls: 0,
        limit: budget.max_oracle_calls,
    };

    let mut vertices = vec![Word::empty()];
    let mut dist0 = vec![0u32];
    let mut right = vec![NONE; nl];
    let mut index = HashMap::new();
    index.insert(Word::empty(), 0u32);

    let keyed = oracle.normal_key(&Word::empty()).is_some();
    let mut lookup = if keyed {
        let mut m = HashMap::new();
        m.insert(oracle.normal_key(&Word::empty()).unwrap(), 0u32);
        Lookup::Keyed(m)
    } else {
        let mut m = HashMap::new();
        m.insert(oracle.invariant(&Word::empty()), vec![0u32]);
        Lookup::Bucketed(m)
    };

    let inverse_slot: Vec<usize> = letters
        .iter()
        .map(|l| {
            letters
                .iter()
                .position(|m| *m == l.inv())
                .expect("alphabet closed under inverse")
        })
        .collect();

    let mut layer_start = 0usize;
    for k in 0..=radius {
        let layer_end = vertices.len();
        for v in layer_start..layer_end {
            for (i, &x) in letters.iter().enumerate() {
                if right[v * nl + i] != NONE {
                    continue;
                }
                let rep = &vertices[v];
                let found = if rep.last() == Some(x.inv()) {
                    // Prefixes of canonical representatives are canonical.
                    let prefix = rep.subword(0, rep.len() - 1);
                    Some(index[&prefix])
                } else {
                    let mut cand = rep.clone();
                    cand.push(x);
                    let lo = k.saturating_sub(1);
                    let hi = k + 1;
                    let hit = match &mut lookup {
                        Lookup::Keyed(m) => {
                            counter.tick()?;
                            let key = oracle.normal_key(&cand).expect("oracle advertised keys");
                            match m.get(&key) {
                                Some(&u) => Some(u),
                                None if k < radius => {
                                    let u = push_vertex(
                                        &mut vertices,
                                        &mut dist0,
                                        &mut right,
                                        &mut index,
                                        cand,
                                        k + 1,
                                        nl,
                                        budget.max_vertices,
                                    )?;
                                    m.insert(key, u);
                                    Some(u)
                                }
                                None => None,
                            }
                        }
                        Lookup::Bucketed(m) => {
                            let inv = oracle.invariant(&cand);
                            let mut hit = None;
                            if let Some(bucket) = m.get(&inv) {
                                for &u in bucket {
                                    let d = dist0[u as usize];
                                    if d < lo || d > hi {
                                        continue;
                                    }
                                    counter.tick()?;
                                    if oracle.equal(&cand, &vertices[u as usize]) {
                                        hit = Some(u);
                                        break;
                                    }
                                }
                            }
                            match hit {
                                Some(u) => Some(u),
                                None if k < radius => {
                                    let u = push_vertex(
                                        &mut vertices,
                                        &mut dist0,
                                        &mut right,
                                        &mut index,
                                        cand,
                                        k + 1,
                                        nl,
                                        budget.max_vertices,
                                    )?;
                                    m.entry(inv).or_default().push(u);
                                    Some(u)
                                }
                                None => None,
                            }
                        }
                    };
                    hit
                };
                if let Some(u) = found {
                    right[v * nl + i] = u;
                    let back = u as usize * nl + inverse_slot[i];
                    if right[back] == NONE {
                        right[back] = v as u32;
                    }
                }
            }
        }
        layer_start = layer_end;
    }

    Ok(Ball::assemble(
        alphabet,
        oracle.name().to_string(),
        radius,
        vertices,
        dist0,
        right,
        index,
    ))
}

#[allow(clippy::too_many_arguments)]
fn push_vertex(
    vertices: &mut Vec<Word>,
    dist0: &mut Vec<u32>,
    right: &mut Vec<u32>,
    index: &mut HashMap<Word, u32>,
    word: Word,
    d: u32,
    nl: usize,
    limit: usize,
) -> Result<u32, CayleyError> {
    if vertices.len() >= limit {
        return Err(CayleyError::MemoryBudgetExceeded { limit });
    }
    let u = vertices.len() as u32;
    index.insert(word.clone(), u);
    vertices.push(word);
    dist0.push(d);
    right.extend(std::iter::repeat(NONE).take(nl));
    Ok(u)
}

impl Ball {
    fn assemble(
        alphabet: Alphabet,
        oracle: String,
        radius: u32,
        vertices: Vec<Word>,
        dist0: Vec<u32>,
        right: Vec<u32>,
        index: HashMap<Word, u32>,
    ) -> Ball {
        let letters = alphabet.letters();
        let nl = letters.len();
        let adjacency = (0..vertices.len())
            .map(|v| {
                let mut ns: Vec<u32> = right[v * nl..(v + 1) * nl]
                    .iter()
                    .copied()
                    .filter(|&u| u != NONE && u != v as u32)
                    .collect();
                ns.sort_unstable();
                ns.dedup();
                ns
            })
            .collect();
        Ball {
            alphabet,
            letters,
            oracle,
            radius,
            vertices,
            dist0,
            right,
            adjacency,
            index,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn oracle_name(&self) -> &str {
        &self.oracle
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    pub fn word(&self, v: u32) -> &Word {
        &self.vertices[v as usize]
    }

    pub fn dist0(&self, v: u32) -> u32 {
        self.dist0[v as usize]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// `v · letters()[i]`, if it lies in the ball.
    pub fn step(&self, v: u32, i: usize) -> Option<u32> {
        let u = self.right[v as usize * self.letters.len() + i];
        (u != NONE).then_some(u)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn index_of(&self, w: &Word) -> Option<u32> {
        self.index.get(w).copied()
    }

    /// Resolves an arbitrary word to a vertex by walking its letters.
    pub fn locate(&self, w: &Word) -> Result<u32, CayleyError> {
        if let Some(v) = self.index_of(w) {
            return Ok(v);
        }
        let mut v = 0u32;
        for &l in w.letters() {
            let i = self
                .letters
                .iter()
                .position(|m| *m == l)
                .ok_or_else(|| CayleyError::NotInBall(w.to_string()))?;
            v = self
                .step(v, i)
                .ok_or_else(|| CayleyError::NotInBall(w.to_string()))?;
        }
        Ok(v)
    }

    /// Vertices within distance `n` of the identity, in vertex order.
    pub fn core(&self, n: u32) -> Vec<u32> {
        (0..self.len() as u32)
            .filter(|&v| self.dist0(v) <= n)
            .collect()
    }

    /// Cumulative sizes `|Ball(n)|` for `n = 0..=radius`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.radius as usize + 1];
        for &d in &self.dist0 {
            out[d as usize] += 1;
        }
        for n in 1..out.len() {
            out[n] += out[n - 1];
        }
        out
    }

    pub fn is_exact(&self, u: u32, v: u32) -> bool {
        self.dist0(u) + self.dist0(v) <= self.radius
    }

    fn check(&self, v: u32) -> Result<(), CayleyError> {
        if (v as usize) < self.len() {
            Ok(())
        } else {
            Err(CayleyError::NotInBall(format!("#{v}")))
        }
    }

    /// In-ball BFS distances from `src`; unreachable vertices get [`NONE`].
    pub fn bfs(&self, src: u32) -> Vec<u32> {
        self.bfs_avoiding(src, None).0
    }

    fn bfs_avoiding(&self, src: u32, forbidden: Option<&[bool]>) -> (Vec<u32>, Vec<u32>) {
        let n = self.len();
        let mut dist = vec![NONE; n];
        let mut parent = vec![NONE; n];
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize];
            for i in 0..self.letters.len() {
                let Some(u) = self.step(v, i) else { continue };
                if dist[u as usize] != NONE {
                    continue;
                }
                if forbidden.is_some_and(|f| f[u as usize]) {
                    continue;
                }
                dist[u as usize] = dv + 1;
                parent[u as usize] = v;
                queue.push_back(u);
            }
        }
        (dist, parent)
    }

    pub fn dist(&self, u: u32, v: u32) -> Result<Distance, CayleyError> {
        self.check(u)?;
        self.check(v)?;
        if u == 0 || v == 0 {
            let w = if u == 0 { v } else { u };
            return Ok(Distance {
                value: self.dist0(w),
                exact: true,
            });
        }
        let d = self.bfs(u)[v as usize];
        Ok(Distance {
            value: d,
            exact: self.is_exact(u, v),
        })
    }

    /// Up to `limit` distinct geodesic vertex paths from `u` to `v`, in
    /// lexicographic order of vertex indices.
    pub fn geodesics(&self, u: u32, v: u32, limit: usize) -> Result<Vec<Vec<u32>>, CayleyError> {
        self.check(u)?;
        self.check(v)?;
        if !self.is_exact(u, v) {
            return Err(CayleyError::NotExact { u, v });
        }
        let to_v = self.bfs(v);
        let mut out = Vec::new();
        let mut path = vec![u];
        self.walk_geodesics(u, v, &to_v, &mut path, &mut out, limit);
        Ok(out)
    }

    fn walk_geodesics(
        &self,
        at: u32,
        target: u32,
        to_target: &[u32],
        path: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if at == target {
            out.push(path.clone());
            return;
        }
        let d = to_target[at as usize];
        for &n in self.neighbors(at) {
            if to_target[n as usize] + 1 == d {
                path.push(n);
                self.walk_geodesics(n, target, to_target, path, out, limit);
                path.pop();
                if out.len() >= limit {
                    return;
                }
            }
        }
    }

    /// Shortest path from `u` to `v` in the ball with `forbidden` vertices
    /// removed, or `None` if they are disconnected there.
    pub fn shortest_path_avoiding(
        &self,
        u: u32,
        v: u32,
        forbidden: &[bool],
    ) -> Result<Option<Path>, CayleyError> {
        self.check(u)?;
        self.check(v)?;
        if forbidden.len() != self.len() {
            return Err(CayleyError::Format(format!(
                "forbidden mask has {} entries for {} vertices",
                forbidden.len(),
                self.len()
            )));
        }
        for w in [u, v] {
            if forbidden[w as usize] {
                return Err(CayleyError::ForbiddenEndpoint(w));
            }
        }
        let (dist, parent) = self.bfs_avoiding(u, Some(forbidden));
        if dist[v as usize] == NONE {
            return Ok(None);
        }
        let mut vertices = vec![v];
        let mut at = v;
        while at != u {
            at = parent[at as usize];
            vertices.push(at);
        }
        vertices.reverse();
        Ok(Some(Path {
            length: dist[v as usize],
            vertices,
        }))
    }

    /// Directed edges `(v, letter, v·letter)` within the ball.
    pub fn edges(&self) -> Vec<(u32, Letter, u32)> {
        let nl = self.letters.len();
        let mut out = Vec::new();
        for v in 0..self.len() {
            for i in 0..nl {
                let u = self.right[v * nl + i];
                if u != NONE {
                    out.push((v as u32, self.letters[i], u));
                }
            }
        }
        out
    }
}

/// `f(n) = #(Ball(n) ∩ H)` for `n = 0..=radius`.
pub fn growth_intersection(ball: &Ball, member: impl Fn(&Word) -> bool) -> Vec<usize> {
    let mut out = vec![0usize; ball.radius() as usize + 1];
    for (v, w) in ball.vertices().iter().enumerate() {
        if member(w) {
            out[ball.dist0(v as u32) as usize] += 1;
        }
    }
    for n in 1..out.len() {
        out[n] += out[n - 1];
    }
    out
}

/// Largest `r <= cap` such that `Ball_G(r)` maps injectively to `Q`.
///
/// A collision between two `G`-distinct vertices `u, v` is first visible in
/// `Ball_G(max(|u|, |v|))`, so the answer is one less than the smallest such
/// maximum, or at least `cap` if nothing collides.
pub fn injectivity_radius(
    g: &dyn EqualityOracle,
    q: &dyn EqualityOracle,
    cap: u32,
    budget: BallBudget,
) -> Result<InjectivityRadius, CayleyError> {
    let ball = build_ball_with(g, cap, budget)?;
    for (v, x, u) in ball.edges() {
        let mut lhs = ball.word(v).clone();
        lhs.push(x);
        if !q.equal(&lhs, ball.word(u)) {
            return Err(CayleyError::NotAQuotient {
                left: lhs.to_string(),
                right: ball.word(u).to_string(),
            });
        }
    }

    let mut first_collision = u32::MAX;
    if q.normal_key(&Word::empty()).is_some() {
        let mut seen: HashMap<Vec<u32>, u32> = HashMap::new();
        for v in 0..ball.len() as u32 {
            let key = q.normal_key(ball.word(v)).unwrap();
            if let Some(&u) = seen.get(&key) {
                first_collision = first_collision.min(ball.dist0(u).max(ball.dist0(v)));
            } else {
                seen.insert(key, v);
            }
        }
    } else {
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for v in 0..ball.len() as u32 {
            buckets
                .entry(q.invariant(ball.word(v)))
                .or_default()
                .push(v);
        }
        for bucket in buckets.values() {
            for (i, &u) in bucket.iter().enumerate() {
                for &v in &bucket[i + 1..] {
                    let m = ball.dist0(u).max(ball.dist0(v));
                    if m >= first_collision {
                        continue;
                    }
                    if q.equal(ball.word(u), ball.word(v)) {
                        first_collision = m;
                    }
                }
            }
        }
    }

    Ok(if first_collision == u32::MAX {
        InjectivityRadius::AtLeast(cap)
    } else {
        InjectivityRadius::Exactly(first_collision - 1)
    })
}
