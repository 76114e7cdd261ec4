//! Todd–Coxeter coset enumeration (HLT strategy with coincidence
//! processing). Used as a ground-truth oracle for finite quotients.

use serde::Serialize;

use crate::freeword::{Alphabet, Letter, Word};

use super::Presentation;

const UNDEF: u32 = u32::MAX;

/// Result of an enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CosetOutcome {
    /// Index of the subgroup (the group order for the trivial subgroup).
    Index { index: usize },
    /// The coset budget ran out before the table closed.
    Inconclusive { cosets_defined: usize },
}

/// A complete, standardized coset table. Coset 0 is the subgroup itself.
#[derive(Clone, Debug)]
pub struct CosetTable {
    alphabet: Alphabet,
    col_of: [u8; 52],
    ncols: usize,
    rows: Vec<u32>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.rows.len() / self.ncols
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn act(&self, coset: u32, letter: Letter) -> u32 {
        let col = self.col_of[letter.code() as usize] as usize;
        self.rows[coset as usize * self.ncols + col]
    }

    /// Coset reached from `coset` by reading `w` left to right.
    pub fn trace(&self, coset: u32, w: &Word) -> u32 {
        w.letters().iter().fold(coset, |c, &l| self.act(c, l))
    }
}

struct Enumerator {
    ncols: usize,
    inv_col: Vec<usize>,
    table: Vec<u32>,
    forward: Vec<u32>,
    max_cosets: usize,
    queue: Vec<u32>,
}

#[derive(Debug)]
struct OutOfCosets;

impl Enumerator {
    fn new(ncols: usize, inv_col: Vec<usize>, max_cosets: usize) -> Self {
        let mut e = Enumerator {
            ncols,
            inv_col,
            table: Vec::new(),
            forward: Vec::new(),
            max_cosets,
            queue: Vec::new(),
        };
        e.table.resize(ncols, UNDEF);
        e.forward.push(0);
        e
    }

    fn allocated(&self) -> usize {
        self.forward.len()
    }

    fn live(&self, c: u32) -> bool {
        self.forward[c as usize] == c
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.ncols + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, v: u32) {
        self.table[c as usize * self.ncols + col] = v;
    }

    fn define(&mut self, c: u32, col: usize) -> Result<(), OutOfCosets> {
        if self.allocated() >= self.max_cosets {
            return Err(OutOfCosets);
        }
        let n = self.allocated() as u32;
        self.forward.push(n);
        self.table.resize(self.table.len() + self.ncols, UNDEF);
        self.set(c, col, n);
        let ic = self.inv_col[col];
        self.set(n, ic, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.forward[root as usize] != root {
            root = self.forward[root as usize];
        }
        let mut cur = c;
        while self.forward[cur as usize] != root {
            let next = self.forward[cur as usize];
            self.forward[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.forward[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for col in 0..self.ncols {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                let ic = self.inv_col[col];
                if self.get(f, ic) == e {
                    self.set(f, ic, UNDEF);
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let e1x = self.get(e1, col);
                if e1x != UNDEF {
                    self.merge(f1, e1x);
                } else {
                    let f1x = self.get(f1, ic);
                    if f1x != UNDEF {
                        self.merge(e1, f1x);
                    } else {
                        self.set(e1, col, f1);
                        self.set(f1, ic, e1);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, start: u32, word: &[usize]) -> Result<(), OutOfCosets> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = start;
        let mut b = start;
        let mut i: isize = 0;
        let mut j: isize = word.len() as isize - 1;
        loop {
            while i <= j {
                let next = self.get(f, word[i as usize]);
                if next == UNDEF {
                    break;
                }
                f = next;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i {
                let next = self.get(b, self.inv_col[word[j as usize]]);
                if next == UNDEF {
                    break;
                }
                b = next;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let col = word[i as usize];
                self.set(f, col, b);
                self.set(b, self.inv_col[col], f);
                return Ok(());
            }
            self.define(f, word[i as usize])?;
        }
    }
}

/// Runs coset enumeration for the subgroup generated by `subgroup` and
/// returns the standardized table, or `None` when more than `max_cosets`
/// cosets would have to be allocated.
pub fn enumerate_cosets(
    p: &Presentation,
    subgroup: &[Word],
    max_cosets: usize,
) -> Option<CosetTable> {
    enumerate_inner(p, subgroup, max_cosets).ok()
}

pub fn coset_enumerate(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> CosetOutcome {
    match enumerate_inner(p, subgroup, max_cosets) {
        Ok(t) => CosetOutcome::Index { index: t.index() },
        Err(defined) => CosetOutcome::Inconclusive {
            cosets_defined: defined,
        },
    }
}

fn enumerate_inner(
    p: &Presentation,
    subgroup: &[Word],
    max_cosets: usize,
) -> Result<CosetTable, usize> {
    let letters = p.alphabet.letters();
    let ncols = letters.len();
    let mut col_of = [u8::MAX; 52];
    for (i, l) in letters.iter().enumerate() {
        col_of[l.code() as usize] = i as u8;
    }
    let inv_col: Vec<usize> = letters
        .iter()
        .map(|l| col_of[l.inv().code() as usize] as usize)
        .collect();
    let encode = |w: &Word| -> Vec<usize> {
        w.letters()
            .iter()
            .map(|l| col_of[l.code() as usize] as usize)
            .collect()
    };
    let relators: Vec<Vec<usize>> = p.relators().iter().map(encode).collect();
    let subgens: Vec<Vec<usize>> = subgroup
        .iter()
        .map(|w| w.free_reduce())
        .map(|w| encode(&w))
        .collect();
    if subgens.iter().flatten().any(|&c| c >= ncols) {
        return Err(0);
    }

    let mut e = Enumerator::new(ncols, inv_col, max_cosets.max(1));
    let run = |e: &mut Enumerator| -> Result<(), OutOfCosets> {
        for g in &subgens {
            e.scan_and_fill(0, g)?;
        }
        let mut c = 0u32;
        while (c as usize) < e.allocated() {
            for r in &relators {
                if !e.live(c) {
                    break;
                }
                e.scan_and_fill(c, r)?;
            }
            if e.live(c) {
                for col in 0..ncols {
                    if e.get(c, col) == UNDEF {
                        e.define(c, col)?;
                    }
                }
            }
            c += 1;
        }
        Ok(())
    };
    if run(&mut e).is_err() {
        return Err(e.allocated());
    }

    // Compact live cosets, renumbering in order of first appearance.
    let live: Vec<u32> = (0..e.allocated() as u32).filter(|&c| e.live(c)).collect();
    let mut new_id = vec![UNDEF; e.allocated()];
    for (i, &c) in live.iter().enumerate() {
        new_id[c as usize] = i as u32;
    }
    let mut rows = Vec::with_capacity(live.len() * ncols);
    for &c in &live {
        for col in 0..ncols {
            let t = e.get(c, col);
            if t == UNDEF {
                return Err(e.allocated());
            }
            let r = e.rep(t);
            rows.push(new_id[r as usize]);
        }
    }
    let table = CosetTable {
        alphabet: p.alphabet.clone(),
        col_of,
        ncols,
        rows,
    };
    // A closed table must satisfy every relator at every coset; anything
    // else is reported as inconclusive rather than as a wrong index.
    let consistent = (0..table.index() as u32).all(|c| {
        p.relators().iter().all(|r| table.trace(c, r) == c)
            && letters
                .iter()
                .all(|&l| table.act(table.act(c, l), l.inv()) == c)
    }) && subgroup.iter().all(|g| table.trace(0, g) == 0);
    if !consistent {
        return Err(e.allocated());
    }
    Ok(table)
}
