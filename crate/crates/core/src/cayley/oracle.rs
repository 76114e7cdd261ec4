use std::sync::Arc;

use crate::freeword::{Alphabet, Word};
use crate::presentation::CosetTable;

/// Decides equality of words in a fixed group.
///
/// Implementations must be an equivalence relation compatible with
/// concatenation. When [`normal_key`](EqualityOracle::normal_key) returns
/// `Some`, equal keys must coincide exactly with equal elements; ball
/// construction then hashes keys instead of comparing pairwise.
pub trait EqualityOracle: Send + Sync {
    fn alphabet(&self) -> &Alphabet;

    fn equal(&self, u: &Word, v: &Word) -> bool;

    fn normal_key(&self, _w: &Word) -> Option<Vec<u32>> {
        None
    }

    /// A cheap necessary condition: equal elements have equal invariants.
    /// Used to bucket candidates when no complete key is available.
    fn invariant(&self, _w: &Word) -> Vec<i64> {
        Vec::new()
    }

    fn is_trivial(&self, w: &Word) -> bool {
        self.equal(w, &Word::empty())
    }

    fn name(&self) -> &str;
}

/// The free group: free reduction is a normal form.
#[derive(Clone, Debug)]
pub struct FreeOracle {
    alphabet: Alphabet,
}

impl FreeOracle {
    pub fn new(alphabet: Alphabet) -> Self {
        FreeOracle { alphabet }
    }
}

impl EqualityOracle for FreeOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn equal(&self, u: &Word, v: &Word) -> bool {
        u.free_reduce() == v.free_reduce()
    }

    fn normal_key(&self, w: &Word) -> Option<Vec<u32>> {
        Some(
            w.free_reduce()
                .letters()
                .iter()
                .map(|l| l.code() as u32)
                .collect(),
        )
    }

    fn name(&self) -> &str {
        "free"
    }
}

/// Free abelian group on the alphabet, keyed by exponent vectors
/// (e.g. `ℤ² = ⟨a, b | abAB⟩`).
#[derive(Clone, Debug)]
pub struct AbelianOracle {
    alphabet: Alphabet,
}

impl AbelianOracle {
    pub fn new(alphabet: Alphabet) -> Self {
        AbelianOracle { alphabet }
    }

    pub fn exponents(&self, w: &Word) -> Vec<i64> {
        let mut v = vec![0i64; self.alphabet.rank()];
        for &l in w.letters() {
            if let Some(i) = self.alphabet.position(l) {
                v[i] += if l.is_inverse() { -1 } else { 1 };
            }
        }
        v
    }
}

impl EqualityOracle for AbelianOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn equal(&self, u: &Word, v: &Word) -> bool {
        self.exponents(u) == self.exponents(v)
    }

    fn normal_key(&self, w: &Word) -> Option<Vec<u32>> {
        Some(
            self.exponents(w)
                .into_iter()
                .map(|e| e as i32 as u32)
                .collect(),
        )
    }

    fn name(&self) -> &str {
        "abelian"
    }
}

/// A finite group given by a complete coset table of the trivial subgroup.
#[derive(Clone, Debug)]
pub struct CosetOracle {
    table: Arc<CosetTable>,
}

impl CosetOracle {
    pub fn new(table: CosetTable) -> Self {
        CosetOracle {
            table: Arc::new(table),
        }
    }

    pub fn order(&self) -> usize {
        self.table.index()
    }

    pub fn element(&self, w: &Word) -> u32 {
        self.table.trace(0, w)
    }
}

impl EqualityOracle for CosetOracle {
    fn alphabet(&self) -> &Alphabet {
        self.table.alphabet()
    }

    fn equal(&self, u: &Word, v: &Word) -> bool {
        self.element(u) == self.element(v)
    }

    fn normal_key(&self, w: &Word) -> Option<Vec<u32>> {
        Some(vec![self.element(w)])
    }

    fn name(&self) -> &str {
        "coset"
    }
}

type KeyFn = dyn Fn(&Word) -> Vec<u32> + Send + Sync;

/// A caller-supplied normal form.
pub struct NormalFormOracle {
    alphabet: Alphabet,
    key: Box<KeyFn>,
    name: String,
}

impl NormalFormOracle {
    pub fn new(
        alphabet: Alphabet,
        name: impl Into<String>,
        key: impl Fn(&Word) -> Vec<u32> + Send + Sync + 'static,
    ) -> Self {
        NormalFormOracle {
            alphabet,
            key: Box::new(key),
            name: name.into(),
        }
    }
}

impl EqualityOracle for NormalFormOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn equal(&self, u: &Word, v: &Word) -> bool {
        (self.key)(u) == (self.key)(v)
    }

    fn normal_key(&self, w: &Word) -> Option<Vec<u32>> {
        Some((self.key)(w))
    }

    fn name(&self) -> &str {
        &self.name
    }
}
