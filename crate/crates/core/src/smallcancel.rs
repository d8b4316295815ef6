//! Pieces among relators, the metric condition C'(λ), and periodicity of
//! attaching maps.
//!
//! Occurrences live in the set of boundary words closed under rotation and
//! inversion. An occurrence is `(cell, offset, inverted)`: the cyclic
//! subword of the cell word (or of its letter-by-letter inverse) that starts
//! at `offset`. Two occurrences in the same cell count as distinct when
//! their `(offset, inverted)` pairs differ.
//!
//! All occurrences of length `|cell|` are sorted once. The longest common
//! prefix of two rotations in sorted order is the minimum of adjacent LCPs
//! between them, so a single sweep that tracks the running minimum since
//! the last occurrence of each cell yields every pairwise maximum at once.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::words::{CyclicWord, Letter, Word};

pub type Rational = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub cell: usize,
    pub offset: usize,
    pub inverted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceMatch {
    pub length: usize,
    pub witness: Word,
    pub positions: Option<[Occurrence; 2]>,
}

impl PieceMatch {
    fn none() -> Self {
        Self {
            length: 0,
            witness: Word::empty(),
            positions: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPiece {
    pub cell_a: usize,
    pub cell_b: usize,
    pub max_piece_length: usize,
    pub witness: Word,
    pub positions: Option<[Occurrence; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRatio {
    pub cell: usize,
    pub boundary_length: usize,
    pub max_piece: usize,
    pub ratio: Rational,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceReport {
    pub lambda: Rational,
    pub pairs: Vec<PairPiece>,
    pub cells: Vec<CellRatio>,
    /// Largest per-cell ratio, 0 when there are no cells.
    pub worst_ratio: Rational,
    /// `λ - worst_ratio` when positive.
    pub margin: Option<Rational>,
    pub pass: bool,
}

impl PieceReport {
    pub fn pair(&self, a: usize, b: usize) -> Option<&PairPiece> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.pairs
            .iter()
            .find(|p| p.cell_a == a && p.cell_b == b)
    }
}

/// Sorted index over every rotation of every cell word and its inverse.
pub struct PieceIndex {
    lens: Vec<usize>,
    /// Per cell: forward word doubled, then inverse word doubled.
    buffers: Vec<[Vec<Letter>; 2]>,
    order: Vec<Occurrence>,
    /// `lcp[k]` is the common prefix length of `order[k]` and `order[k+1]`.
    lcp: Vec<usize>,
}

impl PieceIndex {
    pub fn new(cells: &[CyclicWord]) -> Self {
        let lens: Vec<usize> = cells.iter().map(|c| c.len()).collect();
        let buffers: Vec<[Vec<Letter>; 2]> = cells
            .iter()
            .map(|c| {
                let fwd = c.letters().to_vec();
                let inv: Vec<Letter> = fwd.iter().rev().map(|l| l.inv()).collect();
                [fwd.repeat(2), inv.repeat(2)]
            })
            .collect();
        let mut order: Vec<Occurrence> = Vec::with_capacity(lens.iter().sum::<usize>() * 2);
        for (cell, &n) in lens.iter().enumerate() {
            for inverted in [false, true] {
                for offset in 0..n {
                    order.push(Occurrence {
                        cell,
                        offset,
                        inverted,
                    });
                }
            }
        }
        let slice = |o: &Occurrence| -> &[Letter] {
            &buffers[o.cell][o.inverted as usize][o.offset..o.offset + lens[o.cell]]
        };
        order.par_sort_unstable_by(|a, b| slice(a).cmp(slice(b)).then_with(|| a.cmp(b)));
        let lcp = order
            .windows(2)
            .map(|w| {
                slice(&w[0])
                    .iter()
                    .zip(slice(&w[1]))
                    .take_while(|(x, y)| x == y)
                    .count()
            })
            .collect();
        Self {
            lens,
            buffers,
            order,
            lcp,
        }
    }

    fn slice(&self, o: &Occurrence) -> &[Letter] {
        &self.buffers[o.cell][o.inverted as usize][o.offset..o.offset + self.lens[o.cell]]
    }

    /// Maximal pieces for every unordered pair `a <= b`, row-major.
    pub fn all_pairs(&self) -> Vec<Vec<PieceMatch>> {
        let n = self.lens.len();
        // best[a][b - a]: (length, earlier index, later index)
        let mut best: Vec<Vec<(usize, usize, usize)>> =
            (0..n).map(|a| vec![(0, 0, 0); n - a]).collect();
        let mut last: Vec<Option<(usize, usize)>> = vec![None; n];
        for (k, occ) in self.order.iter().enumerate() {
            if k > 0 {
                let l = self.lcp[k - 1];
                for (_, m) in last.iter_mut().flatten() {
                    *m = (*m).min(l);
                }
            }
            let d = occ.cell;
            for (c, slot) in last.iter().enumerate() {
                if let Some((j, m)) = *slot {
                    let (a, b) = if c <= d { (c, d) } else { (d, c) };
                    let cur = &mut best[a][b - a];
                    if m > cur.0 {
                        *cur = (m, j, k);
                    }
                }
            }
            last[d] = Some((k, usize::MAX));
        }
        best.iter()
            .map(|row| {
                row.iter()
                    .map(|&(len, j, k)| {
                        if len == 0 {
                            return PieceMatch::none();
                        }
                        let (oj, ok) = (self.order[j], self.order[k]);
                        let (first, second) = if oj <= ok { (oj, ok) } else { (ok, oj) };
                        PieceMatch {
                            length: len,
                            witness: Word(self.slice(&ok)[..len].to_vec()),
                            positions: Some([first, second]),
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Longest common piece of `u` and `v`. With `samecell`, `u` and `v` are
/// the same cell and the two occurrences must differ in offset or
/// orientation; `v` is then ignored.
pub fn max_piece(u: &CyclicWord, v: &CyclicWord, samecell: bool) -> PieceMatch {
    if samecell {
        let idx = PieceIndex::new(std::slice::from_ref(u));
        idx.all_pairs().remove(0).remove(0)
    } else {
        let idx = PieceIndex::new(&[u.clone(), v.clone()]);
        // occurrences refer to the local pair: cell 0 is u, cell 1 is v
        idx.all_pairs().remove(0).remove(1)
    }
}

/// Piece report and C'(λ) verdict for a list of cell boundary words.
pub fn check_metric(cells: &[CyclicWord], lambda: Rational) -> PieceReport {
    let idx = PieceIndex::new(cells);
    let table = idx.all_pairs();
    let mut pairs = Vec::new();
    let mut per_cell = vec![0usize; cells.len()];
    for (a, row) in table.into_iter().enumerate() {
        for (off, m) in row.into_iter().enumerate() {
            let b = a + off;
            per_cell[a] = per_cell[a].max(m.length);
            per_cell[b] = per_cell[b].max(m.length);
            pairs.push(PairPiece {
                cell_a: a,
                cell_b: b,
                max_piece_length: m.length,
                witness: m.witness,
                positions: m.positions,
            });
        }
    }
    let cells: Vec<CellRatio> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ratio = Rational::new(per_cell[i] as u64, c.len() as u64);
            CellRatio {
                cell: i,
                boundary_length: c.len(),
                max_piece: per_cell[i],
                ratio,
                passes: ratio < lambda,
            }
        })
        .collect();
    let worst_ratio = cells
        .iter()
        .map(|c| c.ratio)
        .max()
        .unwrap_or_else(|| Rational::from_integer(0));
    let pass = cells.iter().all(|c| c.passes);
    PieceReport {
        lambda,
        pairs,
        margin: (worst_ratio < lambda).then(|| lambda - worst_ratio),
        worst_ratio,
        cells,
        pass,
    }
}

/// Smallest `p > 0` with `w` equal to its rotation by `p`.
pub fn period(w: &[Letter]) -> usize {
    let n = w.len();
    (1..=n)
        .filter(|&d| n.is_multiple_of(d))
        .find(|&d| (0..n).all(|i| w[i] == w[(i + d) % n]))
        .unwrap_or(n)
}

pub fn is_periodic(w: &CyclicWord) -> bool {
    period(w.letters()) < w.len()
}
