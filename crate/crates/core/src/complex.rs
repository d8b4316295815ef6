//! Combinatorial 2-complexes: a generator table, a vertex count, directed
//! labelled edges and 2-cells attached along closed edge paths.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{cyclic_reduce, CyclicWord, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "ray-edge")]
    RayEdge,
    #[serde(rename = "A-generator")]
    AGenerator,
    #[serde(rename = "B-generator")]
    BGenerator,
    #[serde(rename = "other")]
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub role: Role,
    pub level: usize,
    pub family: Option<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorTable {
    entries: Vec<Generator>,
    by_name: HashMap<String, u32>,
}

impl GeneratorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<Generator>) -> Result<Self> {
        let mut t = Self::new();
        for g in entries {
            t.push(g)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, g: Generator) -> Result<u32> {
        if self.by_name.contains_key(&g.name) {
            return Err(Error::InvalidComplex(format!(
                "duplicate generator name {:?}",
                g.name
            )));
        }
        let idx = self.entries.len() as u32;
        self.by_name.insert(g.name.clone(), idx);
        self.entries.push(g);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: u32) -> Option<&Generator> {
        self.entries.get(idx as usize)
    }

    pub fn entries(&self) -> &[Generator] {
        &self.entries
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    pub fn find(&self, role: Role, level: usize, family: Option<u8>) -> Option<u32> {
        self.entries
            .iter()
            .position(|g| g.role == role && g.level == level && g.family == family)
            .map(|i| i as u32)
    }

    /// Render a word with generator names; inverses are capitalized.
    pub fn render(&self, w: &[Letter]) -> String {
        w.iter()
            .map(|l| {
                let name = self
                    .get(l.generator)
                    .map(|g| g.name.clone())
                    .unwrap_or_else(|| format!("g{}", l.generator));
                if l.inverse {
                    invert_name(&name)
                } else {
                    name
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parse whitespace-separated letters.
    ///
    /// Grammar: a token is `NAME` (forward), `NAME'` (inverse), or `NAME`
    /// with its first character upper-cased (inverse). Either form may carry
    /// an integer exponent suffix `^k` (negative allowed). Names are matched
    /// exactly before the capitalized-inverse rule is tried.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            let letter = self.parse_letter(base)?;
            let (l, k) = if exp < 0 {
                (letter.inv(), exp.unsigned_abs())
            } else {
                (letter, exp as u64)
            };
            for _ in 0..k {
                out.push(l);
            }
        }
        Ok(Word(out))
    }

    fn parse_letter(&self, tok: &str) -> Result<Letter> {
        if let Some(stripped) = tok.strip_suffix('\'') {
            return self.parse_letter(stripped).map(Letter::inv);
        }
        if let Some(i) = self.index_of(tok) {
            return Ok(Letter::pos(i));
        }
        let lowered = invert_name(tok);
        if lowered != tok {
            if let Some(i) = self.index_of(&lowered) {
                return Ok(Letter::neg(i));
            }
        }
        Err(Error::Parse(format!("unknown letter {tok:?}")))
    }
}

/// Swap the case of the first character.
fn invert_name(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_lowercase() => c.to_uppercase().chain(chars).collect(),
        Some(c) if c.is_uppercase() => c.to_lowercase().chain(chars).collect(),
        _ => format!("{name}'"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub generator: u32,
}

/// Which family a 2-cell belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CellTag {
    /// A relator cell of the level-`level` two-generator complex.
    A { level: usize },
    /// The connecting cell `C_{level,family}`.
    C { level: usize, family: u8 },
    #[serde(rename = "other")]
    Other,
}

/// Signed edge reference: `e > 0` traverses edge `e-1` forward, `e < 0`
/// traverses edge `|e|-1` backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeStep(pub i64);

impl EdgeStep {
    pub fn forward(edge: usize) -> Self {
        Self(edge as i64 + 1)
    }

    pub fn backward(edge: usize) -> Self {
        Self(-(edge as i64 + 1))
    }

    pub fn edge(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_forward(self) -> bool {
        self.0 > 0
    }

    pub fn reversed(self) -> Self {
        Self(-self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub boundary: Vec<EdgeStep>,
    pub tag: CellTag,
}

/// Parameters recorded by the generator so later stages can re-derive the
/// construction without re-reading the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub levels: usize,
    pub m: usize,
    pub beta_length: usize,
    pub seed: Option<u64>,
    pub an_source: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoComplex {
    pub generators: GeneratorTable,
    pub vertices: usize,
    pub edges: Vec<Edge>,
    pub cells: Vec<Cell>,
    pub construction: Option<Construction>,
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    generators: Vec<Generator>,
    vertices: usize,
    edges: Vec<(usize, usize, u32)>,
    cells: Vec<Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    construction: Option<Construction>,
}

impl TwoComplex {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ComplexFile = serde_json::from_str(text)?;
        let c = TwoComplex {
            generators: GeneratorTable::from_entries(f.generators)?,
            vertices: f.vertices,
            edges: f
                .edges
                .into_iter()
                .map(|(source, target, generator)| Edge {
                    source,
                    target,
                    generator,
                })
                .collect(),
            cells: f.cells,
            construction: f.construction,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let f = ComplexFile {
            generators: self.generators.entries().to_vec(),
            vertices: self.vertices,
            edges: self
                .edges
                .iter()
                .map(|e| (e.source, e.target, e.generator))
                .collect(),
            cells: self.cells.clone(),
            construction: self.construction.clone(),
        };
        serde_json::to_string_pretty(&f).expect("complex serializes")
    }

    pub fn step_endpoints(&self, s: EdgeStep) -> (usize, usize) {
        let e = &self.edges[s.edge()];
        if s.is_forward() {
            (e.source, e.target)
        } else {
            (e.target, e.source)
        }
    }

    pub fn step_letter(&self, s: EdgeStep) -> Letter {
        let g = self.edges[s.edge()].generator;
        if s.is_forward() {
            Letter::pos(g)
        } else {
            Letter::neg(g)
        }
    }

    /// Base vertex of a cell's boundary path.
    pub fn cell_base(&self, cell: usize) -> usize {
        self.step_endpoints(self.cells[cell].boundary[0]).0
    }

    pub fn boundary_word(&self, cell: usize) -> Word {
        self.cells[cell]
            .boundary
            .iter()
            .map(|&s| self.step_letter(s))
            .collect()
    }

    /// The boundary as a cyclic word; fails if the path is not cyclically
    /// reduced as a word.
    pub fn cell_cyclic_word(&self, cell: usize) -> Result<CyclicWord> {
        CyclicWord::new(self.boundary_word(cell).0)
    }

    pub fn cyclic_words(&self) -> Result<Vec<CyclicWord>> {
        (0..self.cells.len())
            .map(|c| self.cell_cyclic_word(c))
            .collect()
    }

    /// Vertices visited by the boundary path of `cell`.
    pub fn cell_vertices(&self, cell: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &s in &self.cells[cell].boundary {
            let (a, b) = self.step_endpoints(s);
            out.insert(a);
            out.insert(b);
        }
        out
    }

    /// Number of cells whose boundary passes through each vertex.
    pub fn vertex_cell_incidence(&self) -> Vec<usize> {
        let mut inc = vec![0usize; self.vertices];
        for c in 0..self.cells.len() {
            for v in self.cell_vertices(c) {
                inc[v] += 1;
            }
        }
        inc
    }

    /// Number of edge ends at each vertex (a loop counts twice).
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertices];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.source >= self.vertices || e.target >= self.vertices {
                return Err(Error::InvalidComplex(format!(
                    "edge {i} has an endpoint outside 0..{}",
                    self.vertices
                )));
            }
            if self.generators.get(e.generator).is_none() {
                return Err(Error::InvalidComplex(format!(
                    "edge {i} refers to unknown generator {}",
                    e.generator
                )));
            }
        }
        for (c, cell) in self.cells.iter().enumerate() {
            if cell.boundary.is_empty() {
                return Err(Error::InvalidComplex(format!("cell {c} has empty boundary")));
            }
            for s in &cell.boundary {
                if s.0 == 0 || s.edge() >= self.edges.len() {
                    return Err(Error::InvalidComplex(format!(
                        "cell {c} refers to missing edge {}",
                        s.0
                    )));
                }
            }
            let mut at = self.cell_base(c);
            let start = at;
            for &s in &cell.boundary {
                let (a, b) = self.step_endpoints(s);
                if a != at {
                    return Err(Error::InvalidComplex(format!(
                        "cell {c} boundary is not a path"
                    )));
                }
                at = b;
            }
            if at != start {
                return Err(Error::InvalidComplex(format!(
                    "cell {c} boundary is not closed"
                )));
            }
            if cyclic_reduce(&self.boundary_word(c)).is_err() {
                return Err(Error::InvalidComplex(format!(
                    "cell {c} boundary is null-homotopic in the 1-skeleton"
                )));
            }
        }
        Ok(())
    }
}
