//! Walls on finite 2-complexes and the Sageev dual of a finite wallspace.
//!
//! Walls come from the antipodal pairing of edge midpoints inside 2-cells
//! (after subdividing so every boundary has even length). A wall is kept
//! only if deleting its edges splits the 1-skeleton into exactly two
//! components; those components are its halfspaces.
//!
//! The dual is grown by flood fill from the orientation that points every
//! wall at the base point 0. Cubes of dimension above one are not stored;
//! the crossing graph is kept instead.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Cell, Edge, EdgeStep, Generator, GeneratorTable, TwoComplex};
use crate::error::{Error, Result};

pub const DEFAULT_MEDIAN_CAP: usize = 2000;
pub const DEFAULT_DUAL_CAP: usize = 1 << 20;

/// Split every edge at a new midpoint vertex. Generator `g` becomes `2g`
/// (first half) and `2g+1` (second half).
pub fn subdivide(c: &TwoComplex) -> TwoComplex {
    let mut gens = GeneratorTable::new();
    for g in c.generators.entries() {
        for half in ["a", "b"] {
            gens.push(Generator {
                name: format!("{}{half}", g.name),
                ..g.clone()
            })
            .expect("halves of unique names are unique");
        }
    }
    let mut edges = Vec::with_capacity(2 * c.edges.len());
    for (e, edge) in c.edges.iter().enumerate() {
        let mid = c.vertices + e;
        edges.push(Edge {
            source: edge.source,
            target: mid,
            generator: 2 * edge.generator,
        });
        edges.push(Edge {
            source: mid,
            target: edge.target,
            generator: 2 * edge.generator + 1,
        });
    }
    let cells = c
        .cells
        .iter()
        .map(|cell| Cell {
            boundary: cell
                .boundary
                .iter()
                .flat_map(|&s| {
                    let (first, second) = (2 * s.edge(), 2 * s.edge() + 1);
                    if s.is_forward() {
                        [EdgeStep::forward(first), EdgeStep::forward(second)]
                    } else {
                        [EdgeStep::backward(second), EdgeStep::backward(first)]
                    }
                })
                .collect(),
            tag: cell.tag,
        })
        .collect();
    TwoComplex {
        generators: gens,
        vertices: c.vertices + c.edges.len(),
        edges,
        cells,
        construction: None,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so representatives are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// Edges whose midpoints the wall passes through; empty for abstract
    /// wallspaces.
    pub crossed_edges: Vec<usize>,
    pub halfspaces: [FixedBitSet; 2],
}

impl Wall {
    /// The halfspace containing the smallest point.
    fn side_of_first(&self) -> &FixedBitSet {
        let [a, b] = &self.halfspaces;
        if a.minimum() < b.minimum() {
            a
        } else {
            b
        }
    }
}

/// Walls are distinct partitions of the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wallspace {
    pub points: usize,
    pub walls: Vec<Wall>,
}

#[derive(Serialize, Deserialize)]
struct WallspaceFile {
    points: usize,
    walls: Vec<[Vec<usize>; 2]>,
}

impl Wallspace {
    pub fn new(points: usize, walls: Vec<[Vec<usize>; 2]>) -> Result<Self> {
        let walls = walls
            .into_iter()
            .map(|[a, b]| {
                let mut ha = FixedBitSet::with_capacity(points);
                let mut hb = FixedBitSet::with_capacity(points);
                for &p in &a {
                    Self::check_point(p, points)?;
                    ha.insert(p);
                }
                for &p in &b {
                    Self::check_point(p, points)?;
                    hb.insert(p);
                }
                Ok(Wall {
                    crossed_edges: Vec::new(),
                    halfspaces: [ha, hb],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ws = Self { points, walls };
        ws.validate()?;
        Ok(ws)
    }

    fn check_point(p: usize, points: usize) -> Result<()> {
        if p >= points {
            return Err(Error::InvalidComplex(format!(
                "point {p} outside 0..{points}"
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (i, w) in self.walls.iter().enumerate() {
            let [a, b] = &w.halfspaces;
            if a.count_ones(..) == 0 || b.count_ones(..) == 0 {
                return Err(Error::InvalidComplex(format!("wall {i} has an empty halfspace")));
            }
            if a.intersection(b).next().is_some() {
                return Err(Error::InvalidComplex(format!("wall {i} halfspaces overlap")));
            }
            if a.count_ones(..) + b.count_ones(..) != self.points {
                return Err(Error::InvalidComplex(format!("wall {i} does not cover all points")));
            }
        }
        if let Some((i, j)) = self.duplicate() {
            return Err(Error::InvalidComplex(format!(
                "walls {i} and {j} induce the same partition"
            )));
        }
        Ok(())
    }

    fn duplicate(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<&FixedBitSet, usize> = HashMap::new();
        for (i, w) in self.walls.iter().enumerate() {
            if let Some(&j) = seen.get(w.side_of_first()) {
                return Some((j, i));
            }
            seen.insert(w.side_of_first(), i);
        }
        None
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: WallspaceFile = serde_json::from_str(text)?;
        Self::new(f.points, f.walls)
    }

    pub fn to_json(&self) -> String {
        let f = WallspaceFile {
            points: self.points,
            walls: self
                .walls
                .iter()
                .map(|w| [w.halfspaces[0].ones().collect(), w.halfspaces[1].ones().collect()])
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("wallspace serializes")
    }

    fn meets(&self, w: usize, s: usize, v: usize, t: usize) -> bool {
        self.walls[w].halfspaces[s]
            .intersection(&self.walls[v].halfspaces[t])
            .next()
            .is_some()
    }

    /// All four quarter-spaces nonempty.
    pub fn crosses(&self, w: usize, v: usize) -> bool {
        w != v && (0..2).all(|s| (0..2).all(|t| self.meets(w, s, v, t)))
    }

    pub fn crossing_graph(&self) -> Vec<Vec<usize>> {
        let k = self.walls.len();
        (0..k)
            .map(|w| (0..k).filter(|&v| self.crosses(w, v)).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedWall {
    pub crossed_edges: Vec<usize>,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergraphWalls {
    pub wallspace: Wallspace,
    /// Walls that do not separate the finite complex into two pieces.
    pub dropped: Vec<DroppedWall>,
}

/// Walls of a complex whose 2-cells all have even boundary length.
pub fn hypergraph_walls(c: &TwoComplex) -> Result<HypergraphWalls> {
    let mut uf = UnionFind::new(c.edges.len());
    for (ci, cell) in c.cells.iter().enumerate() {
        let n = cell.boundary.len();
        if n % 2 == 1 {
            return Err(Error::OddBoundary {
                cell: ci,
                length: n,
            });
        }
        for i in 0..n / 2 {
            uf.union(cell.boundary[i].edge(), cell.boundary[i + n / 2].edge());
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..c.edges.len() {
        let r = uf.find(e);
        classes.entry(r).or_default().push(e);
    }
    let mut walls: Vec<Wall> = Vec::new();
    let mut dropped = Vec::new();
    let mut removed = vec![false; c.edges.len()];
    for crossed in classes.into_values() {
        for &e in &crossed {
            removed[e] = true;
        }
        let mut comp = UnionFind::new(c.vertices);
        for (e, edge) in c.edges.iter().enumerate() {
            if !removed[e] {
                comp.union(edge.source, edge.target);
            }
        }
        for &e in &crossed {
            removed[e] = false;
        }
        let roots: Vec<usize> = (0..c.vertices).map(|v| comp.find(v)).collect();
        let mut distinct: Vec<usize> = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != 2 {
            dropped.push(DroppedWall {
                crossed_edges: crossed,
                components: distinct.len(),
            });
            continue;
        }
        let mut ha = FixedBitSet::with_capacity(c.vertices);
        let mut hb = FixedBitSet::with_capacity(c.vertices);
        for (v, &r) in roots.iter().enumerate() {
            if r == distinct[0] {
                ha.insert(v);
            } else {
                hb.insert(v);
            }
        }
        // only possible when the 1-skeleton is already disconnected
        match walls.iter_mut().find(|w| w.halfspaces[0] == ha) {
            Some(w) => {
                w.crossed_edges.extend(crossed);
                w.crossed_edges.sort_unstable();
            }
            None => walls.push(Wall {
                crossed_edges: crossed,
                halfspaces: [ha, hb],
            }),
        }
    }
    Ok(HypergraphWalls {
        wallspace: Wallspace {
            points: c.vertices,
            walls,
        },
        dropped,
    })
}

/// The 1-skeleton of the Sageev dual plus the wall crossing graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualComplex {
    pub walls: usize,
    /// Bit `w` set means the orientation picks halfspace 1 of wall `w`.
    pub vertices: Vec<FixedBitSet>,
    /// `(u, v, wall)` with `u < v`.
    pub edges: Vec<(usize, usize, usize)>,
    pub crossing: Vec<Vec<usize>>,
    pub dimension: usize,
}

impl DualComplex {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph dual {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let label: String = (0..self.walls)
                .map(|w| if v.contains(w) { '1' } else { '0' })
                .collect();
            s.push_str(&format!("  {i} [label=\"{label}\"];\n"));
        }
        for &(u, v, w) in &self.edges {
            s.push_str(&format!("  {u} -- {v} [label=\"w{w}\"];\n"));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let orientations: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                (0..self.walls)
                    .map(|w| if v.contains(w) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        let crossing_pairs: Vec<[usize; 2]> = self
            .crossing
            .iter()
            .enumerate()
            .flat_map(|(w, row)| row.iter().filter(move |&&v| v > w).map(move |&v| [w, v]))
            .collect();
        serde_json::json!({
            "walls": self.walls,
            "dimension": self.dimension,
            "vertices": orientations,
            "edges": self.edges,
            "crossing_pairs": crossing_pairs,
        })
    }
}

/// Size of the largest clique (Bron-Kerbosch with pivoting).
pub fn max_clique(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let sets: Vec<FixedBitSet> = adj
        .iter()
        .map(|row| {
            let mut b = FixedBitSet::with_capacity(n);
            for &v in row {
                b.insert(v);
            }
            b
        })
        .collect();
    fn bk(r: usize, p: FixedBitSet, x: FixedBitSet, sets: &[FixedBitSet], best: &mut usize) {
        if p.count_ones(..) == 0 {
            if x.count_ones(..) == 0 {
                *best = (*best).max(r);
            }
            return;
        }
        if r + p.count_ones(..) <= *best {
            return;
        }
        let pivot = p
            .union(&x)
            .max_by_key(|&u| sets[u].intersection(&p).count())
            .expect("p nonempty");
        let candidates: Vec<usize> = p.difference(&sets[pivot]).collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            let np: FixedBitSet = p.intersection(&sets[v]).collect_bits(p.len());
            let nx: FixedBitSet = x.intersection(&sets[v]).collect_bits(x.len());
            bk(r + 1, np, nx, sets, best);
            p.set(v, false);
            x.insert(v);
        }
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let mut best = 0;
    bk(0, all, FixedBitSet::with_capacity(n), &sets, &mut best);
    best
}

trait CollectBits {
    fn collect_bits(self, len: usize) -> FixedBitSet;
}

impl<I: Iterator<Item = usize>> CollectBits for I {
    fn collect_bits(self, len: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(len);
        for i in self {
            b.insert(i);
        }
        b
    }
}

pub fn sageev_dual(ws: &Wallspace) -> Result<DualComplex> {
    sageev_dual_capped(ws, DEFAULT_DUAL_CAP)
}

pub fn sageev_dual_capped(ws: &Wallspace, cap: usize) -> Result<DualComplex> {
    let k = ws.walls.len();
    if k == 0 {
        if ws.points == 0 {
            return Err(Error::EmptyWallspace);
        }
        return Ok(DualComplex {
            walls: 0,
            vertices: vec![FixedBitSet::with_capacity(0)],
            edges: Vec::new(),
            crossing: Vec::new(),
            dimension: 0,
        });
    }
    // fits[w][s][t]: walls v for which halfspace (w, s) meets (v, t)
    let fits: Vec<[[FixedBitSet; 2]; 2]> = (0..k)
        .map(|w| {
            let row = |s: usize, t: usize| (0..k).filter(|&v| ws.meets(w, s, v, t)).collect_bits(k);
            [[row(0, 0), row(0, 1)], [row(1, 0), row(1, 1)]]
        })
        .collect();
    let base = if ws.points > 0 { 0 } else { usize::MAX };
    let mut principal = FixedBitSet::with_capacity(k);
    for (w, wall) in ws.walls.iter().enumerate() {
        if base != usize::MAX && wall.halfspaces[1].contains(base) {
            principal.insert(w);
        }
    }
    let consistent_flip = |o: &FixedBitSet, w: usize| -> bool {
        let s = !o.contains(w) as usize;
        // every other chosen halfspace must meet the new one
        (0..k).all(|v| v == w || fits[w][s][o.contains(v) as usize].contains(v))
    };
    let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut vertices = vec![principal.clone()];
    index.insert(principal, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for w in 0..k {
            if !consistent_flip(&vertices[u], w) {
                continue;
            }
            let mut o = vertices[u].clone();
            o.toggle(w);
            let v = match index.get(&o) {
                Some(&v) => v,
                None => {
                    if vertices.len() >= cap {
                        return Err(Error::TooLarge {
                            vertices: vertices.len() + 1,
                            cap,
                        });
                    }
                    let v = vertices.len();
                    index.insert(o.clone(), v);
                    vertices.push(o);
                    queue.push_back(v);
                    v
                }
            };
            if u < v {
                edges.push((u, v, w));
            }
        }
    }
    edges.sort_unstable();
    let crossing = ws.crossing_graph();
    let dimension = max_clique(&crossing);
    Ok(DualComplex {
        walls: k,
        vertices,
        edges,
        crossing,
        dimension,
    })
}

/// All-pairs BFS distances; `u32::MAX` marks unreachable.
fn distances(adj: &[Vec<usize>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let mut d = vec![u32::MAX; n];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if d[v] == u32::MAX {
                        d[v] = d[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

/// True iff every triple of vertices has exactly one median.
///
/// A median `x` of `(a, b, c)` has `d(a,x) = (ab + ac - bc)/2` and the two
/// symmetric values, so the median set is an intersection of three
/// distance spheres.
pub fn median_check(adj: &[Vec<usize>], cap: usize) -> Result<bool> {
    let n = adj.len();
    if n > cap {
        return Err(Error::TooLarge { vertices: n, cap });
    }
    if n == 0 {
        return Ok(true);
    }
    let d = distances(adj);
    if d[0].contains(&u32::MAX) {
        return Ok(false);
    }
    let diam = d.iter().flatten().copied().max().unwrap_or(0) as usize;
    // spheres[v][r] = vertices at distance r from v
    let spheres: Vec<Vec<FixedBitSet>> = d
        .iter()
        .map(|row| {
            let mut s = vec![FixedBitSet::with_capacity(n); diam + 1];
            for (x, &r) in row.iter().enumerate() {
                s[r as usize].insert(x);
            }
            s
        })
        .collect();
    let ok = (0..n).into_par_iter().all(|a| {
        for b in a + 1..n {
            for c in b + 1..n {
                let (ab, ac, bc) = (d[a][b], d[a][c], d[b][c]);
                let twice_p = ab + ac;
                if twice_p < bc || (twice_p - bc) % 2 == 1 || ab + bc < ac || ac + bc < ab {
                    return false;
                }
                let p = ((ab + ac - bc) / 2) as usize;
                let q = ((ab + bc - ac) / 2) as usize;
                let r = ((ac + bc - ab) / 2) as usize;
                let sa = spheres[a][p].as_slice();
                let sb = spheres[b][q].as_slice();
                let sc = spheres[c][r].as_slice();
                let mut count = 0u32;
                for i in 0..sa.len() {
                    count += (sa[i] & sb[i] & sc[i]).count_ones();
                    if count > 1 {
                        return false;
                    }
                }
                if count != 1 {
                    return false;
                }
            }
        }
        true
    });
    Ok(ok)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub vertices: usize,
    pub walls: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub histogram: BTreeMap<usize, usize>,
    /// Every degree is at most the number of walls.
    pub bounded: bool,
}

pub fn local_finiteness_report(d: &DualComplex) -> DegreeStats {
    let mut deg = vec![0usize; d.vertices.len()];
    for &(u, v, _) in &d.edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut histogram = BTreeMap::new();
    for &x in &deg {
        *histogram.entry(x).or_insert(0) += 1;
    }
    DegreeStats {
        vertices: deg.len(),
        walls: d.walls,
        min_degree: deg.iter().copied().min().unwrap_or(0),
        max_degree: deg.iter().copied().max().unwrap_or(0),
        mean_degree: if deg.is_empty() {
            0.0
        } else {
            deg.iter().sum::<usize>() as f64 / deg.len() as f64
        },
        histogram,
        bounded: deg.iter().all(|&x| x <= d.walls),
    }
}
