//! Ball serialization.
//!
//! The binary layout is little-endian throughout:
//!
//! ```text
//! magic     4 bytes  "LCNB"
//! version   u32      1
//! radius    u32
//! alphabet  u32 length, then UTF-8 generator symbols
//! oracle    u32 length, then UTF-8 name
//! vertices  u32 count, then per vertex: u32 length, UTF-8 representative
//! dist0     u32 per vertex
//! edges     u32 count, then per edge: u32 source, u32 letter code, u32 target
//! ```

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Ball, CayleyError, NONE};
use crate::freeword::{Alphabet, Letter, Word};

const MAGIC: &[u8; 4] = b"LCNB";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct BallFile {
    radius: u32,
    alphabet: Alphabet,
    oracle: String,
    vertices: Vec<Word>,
    dist0: Vec<u32>,
    edges: Vec<(u32, char, u32)>,
}

impl Ball {
    pub fn to_json(&self) -> String {
        let file = BallFile {
            radius: self.radius,
            alphabet: self.alphabet.clone(),
            oracle: self.oracle.clone(),
            vertices: self.vertices.clone(),
            dist0: self.dist0.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(v, l, u)| (v, l.to_char(), u))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("ball serializes")
    }

    pub fn from_json(text: &str) -> Result<Ball, CayleyError> {
        let file: BallFile =
            serde_json::from_str(text).map_err(|e| CayleyError::Format(e.to_string()))?;
        let edges = file
            .edges
            .iter()
            .map(|&(v, c, u)| {
                Letter::from_char(c)
                    .map(|l| (v, l, u))
                    .map_err(|e| CayleyError::Format(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ball::from_parts(
            file.alphabet,
            file.oracle,
            file.radius,
            file.vertices,
            file.dist0,
            edges,
        )
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<(), CayleyError> {
        out.write_all(MAGIC)?;
        put_u32(&mut out, VERSION)?;
        put_u32(&mut out, self.radius)?;
        let symbols: String = self.alphabet.symbols().collect();
        put_str(&mut out, &symbols)?;
        put_str(&mut out, &self.oracle)?;
        put_u32(&mut out, self.len() as u32)?;
        for w in &self.vertices {
            put_str(&mut out, &w.to_string())?;
        }
        for &d in &self.dist0 {
            put_u32(&mut out, d)?;
        }
        let edges = self.edges();
        put_u32(&mut out, edges.len() as u32)?;
        for (v, l, u) in edges {
            put_u32(&mut out, v)?;
            put_u32(&mut out, l.code() as u32)?;
            put_u32(&mut out, u)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Ball, CayleyError> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(CayleyError::Format("bad magic".into()));
        }
        let version = get_u32(&mut input)?;
        if version != VERSION {
            return Err(CayleyError::Format(format!(
                "unsupported version {version}"
            )));
        }
        let radius = get_u32(&mut input)?;
        let symbols: Vec<char> = get_str(&mut input)?.chars().collect();
        let alphabet = Alphabet::new(&symbols).map_err(|e| CayleyError::Format(e.to_string()))?;
        let oracle = get_str(&mut input)?;
        let n = get_u32(&mut input)? as usize;
        let mut vertices = Vec::with_capacity(n);
        for _ in 0..n {
            let s = get_str(&mut input)?;
            vertices.push(Word::parse(&s).map_err(|e| CayleyError::Format(e.to_string()))?);
        }
        let mut dist0 = Vec::with_capacity(n);
        for _ in 0..n {
            dist0.push(get_u32(&mut input)?);
        }
        let m = get_u32(&mut input)? as usize;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let v = get_u32(&mut input)?;
            let code = get_u32(&mut input)?;
            let u = get_u32(&mut input)?;
            let code = u8::try_from(code).map_err(|_| CayleyError::Format("bad letter".into()))?;
            edges.push((v, Letter::from_code(code), u));
        }
        Ball::from_parts(alphabet, oracle, radius, vertices, dist0, edges)
    }

    fn from_parts(
        alphabet: Alphabet,
        oracle: String,
        radius: u32,
        vertices: Vec<Word>,
        dist0: Vec<u32>,
        edges: Vec<(u32, Letter, u32)>,
    ) -> Result<Ball, CayleyError> {
        let n = vertices.len();
        if dist0.len() != n || n == 0 {
            return Err(CayleyError::Format("vertex and dist0 counts differ".into()));
        }
        let letters = alphabet.letters();
        let nl = letters.len();
        let slot: HashMap<Letter, usize> =
            letters.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut right = vec![NONE; n * nl];
        for (v, l, u) in edges {
            let i = *slot
                .get(&l)
                .ok_or_else(|| CayleyError::Format(format!("letter {l:?} not in alphabet")))?;
            if v as usize >= n || u as usize >= n {
                return Err(CayleyError::Format("edge endpoint out of range".into()));
            }
            right[v as usize * nl + i] = u;
        }
        let mut index = HashMap::with_capacity(n);
        for (i, w) in vertices.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(CayleyError::Format(format!("duplicate vertex {w}")));
            }
        }
        Ok(Ball::assemble(
            alphabet, oracle, radius, vertices, dist0, right, index,
        ))
    }
}

fn put_u32<W: Write>(out: &mut W, x: u32) -> std::io::Result<()> {
    out.write_all(&x.to_le_bytes())
}

fn put_str<W: Write>(out: &mut W, s: &str) -> std::io::Result<()> {
    put_u32(out, s.len() as u32)?;
    out.write_all(s.as_bytes())
}

fn get_u32<R: Read>(input: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_str<R: Read>(input: &mut R) -> Result<String, CayleyError> {
    let len = get_u32(input)? as usize;
    let mut buf = vec![0u8; len];
    input.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CayleyError::Format(e.to_string()))
}
