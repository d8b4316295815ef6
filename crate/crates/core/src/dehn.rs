//! Dehn's algorithm for C'(1/6) presentations and the mechanical check that
//! the level-0 loops generate: every conjugated generator
//! `t_1⋯t_n x_{ni} t_n⁻¹⋯t_1⁻¹` is rewritten through the relation
//! `t_n x_{ni} t_n⁻¹ = γ_{ni}⁻¹` down to level 0, and the difference is
//! certified trivial by Dehn reduction.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{CellTag, Role, TwoComplex};
use crate::error::{Error, Result};
use crate::smallcancel::{check_metric, Rational};
use crate::words::{CyclicWord, Letter, Word};

pub const DEFAULT_WORD_CAP: u64 = 1_000_000;

#[derive(Default)]
struct Node {
    children: Vec<(Letter, u32)>,
    /// Shortest relator whose closure word passes through this node at
    /// more than half its length: (relator length, closure word index).
    best: Option<(usize, u32)>,
}

/// Relators closed under rotation and inversion, indexed by a trie for
/// longest-prefix matching.
pub struct DehnPresentation {
    relators: Vec<CyclicWord>,
    closure: Vec<Vec<Letter>>,
    nodes: Vec<Node>,
    max_len: usize,
    small_cancellation: bool,
}

impl DehnPresentation {
    /// Records whether the relators satisfy C'(1/6); reductions refuse to
    /// run otherwise.
    pub fn new(relators: Vec<CyclicWord>) -> Self {
        let small_cancellation = check_metric(&relators, Rational::new(1, 6)).pass;
        let mut closure: Vec<Vec<Letter>> = Vec::new();
        for r in &relators {
            for word in [r.letters().to_vec(), r.inverse_letters()] {
                for k in 0..word.len() {
                    let mut v = word.clone();
                    v.rotate_left(k);
                    closure.push(v);
                }
            }
        }
        closure.sort();
        closure.dedup();
        let mut nodes = vec![Node::default()];
        for (ci, word) in closure.iter().enumerate() {
            let n = word.len();
            let mut at = 0usize;
            for (d, &l) in word.iter().enumerate() {
                let next = match nodes[at].children.iter().find(|(x, _)| *x == l) {
                    Some(&(_, nx)) => nx as usize,
                    None => {
                        nodes.push(Node::default());
                        let nx = nodes.len() - 1;
                        nodes[at].children.push((l, nx as u32));
                        nx
                    }
                };
                at = next;
                let depth = d + 1;
                if 2 * depth > n {
                    let cand = (n, ci as u32);
                    if nodes[at].best.is_none_or(|b| cand < b) {
                        nodes[at].best = Some(cand);
                    }
                }
            }
        }
        let max_len = relators.iter().map(|r| r.len()).max().unwrap_or(0);
        Self {
            relators,
            closure,
            nodes,
            max_len,
            small_cancellation,
        }
    }

    /// Presentation over the edge generators of a complex, one relator per
    /// 2-cell.
    pub fn from_complex(complex: &TwoComplex) -> Result<Self> {
        Ok(Self::new(complex.cyclic_words()?))
    }

    pub fn is_small_cancellation(&self) -> bool {
        self.small_cancellation
    }

    pub fn relators(&self) -> &[CyclicWord] {
        &self.relators
    }

    /// Longest match starting at `pos`: (length, closure word).
    fn longest_match(&self, w: &[Letter], pos: usize) -> Option<(usize, u32)> {
        let mut at = 0usize;
        let mut found = None;
        for (d, l) in w[pos..].iter().enumerate() {
            match self.nodes[at].children.iter().find(|(x, _)| x == l) {
                Some(&(_, nx)) => at = nx as usize,
                None => break,
            }
            if let Some((_, ci)) = self.nodes[at].best {
                found = Some((d + 1, ci));
            }
        }
        found
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub word: Word,
    /// Number of half-relator replacements.
    pub steps: usize,
}

pub fn dehn_reduce(w: &Word, p: &DehnPresentation) -> Result<Word> {
    dehn_reduce_traced(w, p).map(|r| r.word)
}

/// Replace the leftmost-longest subword that is more than half of a relator
/// `u·v` by `v⁻¹` until none remains.
pub fn dehn_reduce_traced(w: &Word, p: &DehnPresentation) -> Result<Reduction> {
    if !p.small_cancellation {
        return Err(Error::NotSmallCancellation);
    }
    let mut cur = w.free_reduce().0;
    let mut steps = 0usize;
    let mut pos = 0usize;
    while pos < cur.len() {
        let Some((len, ci)) = p.longest_match(&cur, pos) else {
            pos += 1;
            continue;
        };
        let rest = &p.closure[ci as usize][len..];
        let mut stack: Vec<Letter> = cur[..pos].to_vec();
        let mut low = stack.len();
        let replacement = rest.iter().rev().map(|l| l.inv());
        for l in replacement.chain(cur[pos + len..].iter().copied()) {
            if stack.last() == Some(&l.inv()) {
                stack.pop();
                low = low.min(stack.len());
            } else {
                stack.push(l);
            }
        }
        cur = stack;
        steps += 1;
        // positions whose window lies in the untouched prefix had no match
        pos = low.saturating_sub(p.max_len);
    }
    Ok(Reduction {
        word: Word(cur),
        steps,
    })
}

pub fn is_trivial(w: &Word, p: &DehnPresentation) -> Result<bool> {
    Ok(dehn_reduce(w, p)?.is_empty())
}

fn c_cell(complex: &TwoComplex, n: usize, i: u8) -> Result<usize> {
    complex
        .cells
        .iter()
        .position(|c| c.tag == CellTag::C { level: n, family: i })
        .ok_or_else(|| Error::InvalidComplex(format!("no cell C_{{{n},{i}}}")))
}

fn ray(complex: &TwoComplex, n: usize) -> Result<u32> {
    complex
        .generators
        .find(Role::RayEdge, n, None)
        .ok_or_else(|| Error::InvalidComplex(format!("no ray edge t{n}")))
}

/// `γ_{ni}`, read off the boundary of `C_{ni}` after its `t x t⁻¹` prefix.
pub fn gamma_of(complex: &TwoComplex, n: usize, i: u8) -> Result<Word> {
    let c = c_cell(complex, n, i)?;
    let w = complex.boundary_word(c);
    if w.len() < 3 {
        return Err(Error::InvalidComplex(format!("cell C_{{{n},{i}}} too short")));
    }
    Ok(Word(w.0[3..].to_vec()))
}

/// `t_1⋯t_n x_{ni} t_n⁻¹⋯t_1⁻¹`.
pub fn conjugated_generator(complex: &TwoComplex, n: usize, i: u8) -> Result<Word> {
    let role = if i <= 2 { Role::AGenerator } else { Role::BGenerator };
    let x = complex
        .generators
        .find(role, n, Some(i))
        .ok_or_else(|| Error::InvalidComplex(format!("no generator x{n}{i}")))?;
    let ts = (1..=n).map(|k| ray(complex, k)).collect::<Result<Vec<_>>>()?;
    let mut v: Vec<Letter> = ts.iter().map(|&t| Letter::pos(t)).collect();
    v.push(Letter::pos(x));
    v.extend(ts.iter().rev().map(|&t| Letter::neg(t)));
    Ok(Word(v))
}

struct Rewriter<'a> {
    complex: &'a TwoComplex,
    cap: u64,
    lengths: HashMap<(usize, u8), u64>,
    words: HashMap<(usize, u8), Word>,
}

impl Rewriter<'_> {
    fn family_of(&self, l: Letter) -> Result<(usize, u8)> {
        let g = self
            .complex
            .generators
            .get(l.generator)
            .ok_or_else(|| Error::InvalidComplex("unknown generator".into()))?;
        match (g.role, g.family) {
            (Role::AGenerator | Role::BGenerator, Some(f)) => Ok((g.level, f)),
            _ => Err(Error::InvalidComplex(format!(
                "unexpected letter {} in a gamma word",
                g.name
            ))),
        }
    }

    fn length(&mut self, n: usize, i: u8) -> Result<u64> {
        if n == 0 {
            return Ok(1);
        }
        if let Some(&l) = self.lengths.get(&(n, i)) {
            return Ok(l);
        }
        let gamma = gamma_of(self.complex, n, i)?;
        let mut total: u64 = 0;
        for &l in gamma.letters() {
            let (lv, f) = self.family_of(l)?;
            total = total.saturating_add(self.length(lv, f)?);
        }
        self.lengths.insert((n, i), total);
        Ok(total)
    }

    fn word(&mut self, n: usize, i: u8) -> Result<Word> {
        if let Some(w) = self.words.get(&(n, i)) {
            return Ok(w.clone());
        }
        let gamma_inv = gamma_of(self.complex, n, i)?.inverse();
        let mut out = Vec::new();
        for &l in gamma_inv.letters() {
            let (lv, f) = self.family_of(l)?;
            if lv == 0 {
                out.push(l);
            } else {
                let sub = self.word(lv, f)?;
                if l.inverse {
                    out.extend_from_slice(sub.inverse().letters());
                } else {
                    out.extend_from_slice(sub.letters());
                }
            }
        }
        let w = Word(out).free_reduce();
        self.words.insert((n, i), w.clone());
        Ok(w)
    }
}

/// Length of [`rewrite_generator`]'s result before free reduction, computed
/// by the recursion `|rw(n,i)| = Σ_{y ∈ γ_{ni}} |rw(level(y), family(y))|`.
pub fn rewrite_length(complex: &TwoComplex, n: usize, i: u8) -> Result<u64> {
    let mut rw = Rewriter {
        complex,
        cap: u64::MAX,
        lengths: HashMap::new(),
        words: HashMap::new(),
    };
    rw.length(n, i)
}

/// A word in the level-0 loops equal in `π₁` to `t_1⋯t_n x_{ni} t_n⁻¹⋯t_1⁻¹`.
pub fn rewrite_generator(complex: &TwoComplex, n: usize, i: u8, cap: u64) -> Result<Word> {
    if n == 0 {
        return Err(Error::InvalidConfig("level-0 generators need no rewriting".into()));
    }
    let mut rw = Rewriter {
        complex,
        cap,
        lengths: HashMap::new(),
        words: HashMap::new(),
    };
    let length = rw.length(n, i)?;
    if length > rw.cap {
        return Err(Error::DepthExceeded { length, cap });
    }
    rw.word(n, i)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationCheck {
    pub level: usize,
    pub family: u8,
    pub rewritten_length: usize,
    pub steps: usize,
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub levels: usize,
    pub checks: Vec<GenerationCheck>,
    pub pass: bool,
}

/// For every `1 <= n <= levels` and `i`, certify
/// `t_1⋯t_n x_{ni} t_n⁻¹⋯t_1⁻¹ · rewrite(n,i)⁻¹ = 1`.
pub fn verify_generation(complex: &TwoComplex, levels: usize, cap: u64) -> Result<GenerationReport> {
    let p = DehnPresentation::from_complex(complex)?;
    let mut checks = Vec::new();
    for n in 1..=levels {
        for i in 1..=4u8 {
            let rw = rewrite_generator(complex, n, i, cap)?;
            let w = conjugated_generator(complex, n, i)?.concat(&rw.inverse());
            let r = dehn_reduce_traced(&w, &p)?;
            checks.push(GenerationCheck {
                level: n,
                family: i,
                rewritten_length: rw.len(),
                steps: r.steps,
                trivial: r.word.is_empty(),
            });
        }
    }
    Ok(GenerationReport {
        levels,
        pass: checks.iter().all(|c| c.trivial),
        checks,
    })
}
