//! Brute-force oracles shared by the integration and acceptance tests.
//! Nothing here calls into the engines being checked.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::Rng;

/// Signed 1-based letters: `3` is generator 2, `-3` its inverse.
pub type Sw = Vec<i64>;

pub fn inverse(w: &[i64]) -> Sw {
    w.iter().rev().map(|x| -x).collect()
}

pub fn free_reduce(w: &[i64]) -> Sw {
    let mut out: Sw = Vec::new();
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Free and cyclic reduction, then the lexicographically least rotation
/// under the letter order (generator, positive first).
pub fn canonical_cyclic(w: &[i64]) -> Sw {
    let mut v = free_reduce(w);
    while v.len() >= 2 && v[0] == -v[v.len() - 1] {
        v.pop();
        v.remove(0);
    }
    if v.is_empty() {
        return v;
    }
    let n = v.len();
    let key = |x: i64| (x.abs(), x < 0);
    let s = &v;
    let rot = |k: usize| (0..n).map(move |i| key(s[(k + i) % n]));
    let best = (0..n).min_by(|&a, &b| rot(a).cmp(rot(b))).unwrap();
    let mut r = v[best..].to_vec();
    r.extend_from_slice(&v[..best]);
    r
}

/// Length-`len` cyclic windows of `w` and of `w⁻¹`, keyed to `(start, inverted)`.
fn windows(w: &[i64], len: usize) -> HashMap<Sw, Vec<(usize, bool)>> {
    let n = w.len();
    let mut out: HashMap<Sw, Vec<(usize, bool)>> = HashMap::new();
    for (word, inv) in [(w.to_vec(), false), (inverse(w), true)] {
        for s in 0..n {
            let win: Sw = (0..len).map(|i| word[(s + i) % n]).collect();
            out.entry(win).or_default().push((s, inv));
        }
    }
    out
}

fn common_at(u: &[i64], v: &[i64], samecell: bool, len: usize) -> bool {
    let wu = windows(u, len);
    if samecell {
        return wu.values().any(|occ| occ.len() >= 2);
    }
    let wv = windows(v, len);
    wu.keys().any(|k| wv.contains_key(k))
}

/// Longest piece, scanning lengths from the cap downwards.
pub fn max_piece(u: &[i64], v: &[i64], samecell: bool) -> usize {
    let cap = if samecell { u.len() } else { u.len().min(v.len()) };
    (1..=cap)
        .rev()
        .find(|&l| common_at(u, v, samecell, l))
        .unwrap_or(0)
}

/// Same answer by bisection (having a piece of length `l` implies one of
/// every shorter length); fast enough for long boundaries.
pub fn max_piece_bisect(u: &[i64], v: &[i64], samecell: bool) -> usize {
    let cap = if samecell { u.len() } else { u.len().min(v.len()) };
    let (mut lo, mut hi) = (0, cap);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if common_at(u, v, samecell, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

pub fn random_reduced(rng: &mut impl Rng, gens: i64, len: usize) -> Sw {
    let mut w: Sw = Vec::with_capacity(len);
    while w.len() < len {
        let g = rng.gen_range(1..=gens);
        let x = if rng.gen_bool(0.5) { g } else { -g };
        if w.last() != Some(&-x) {
            w.push(x);
        }
    }
    w
}

pub fn random_cyclic(rng: &mut impl Rng, gens: i64, len: usize) -> Sw {
    loop {
        let w = random_reduced(rng, gens, len);
        if len < 2 || w[0] != -w[len - 1] {
            return w;
        }
    }
}

/// All trivial cyclic words of length `<= cap` reachable from the empty
/// word by inserting a cyclic conjugate of a relator or its inverse and
/// reducing, never passing through a word longer than `cap`.
pub struct TrivialWords {
    pub words: HashSet<Sw>,
}

impl TrivialWords {
    pub fn build(relators: &[Sw], cap: usize) -> Self {
        let mut closure: BTreeSet<Sw> = BTreeSet::new();
        for r in relators {
            for w in [r.clone(), inverse(r)] {
                for k in 0..w.len() {
                    let mut rot = w[k..].to_vec();
                    rot.extend_from_slice(&w[..k]);
                    closure.insert(rot);
                }
            }
        }
        let mut words: HashSet<Sw> = HashSet::new();
        words.insert(Vec::new());
        let mut queue: VecDeque<Sw> = VecDeque::from([Vec::new()]);
        while let Some(w) = queue.pop_front() {
            for r in &closure {
                // inserting at the end is the same cyclic word as at the start
                for pos in 0..w.len().max(1) {
                    let mut x = w[..pos].to_vec();
                    x.extend_from_slice(r);
                    x.extend_from_slice(&w[pos..]);
                    let c = canonical_cyclic(&x);
                    if c.len() <= cap && words.insert(c.clone()) {
                        queue.push_back(c);
                    }
                }
            }
        }
        Self { words }
    }

    pub fn contains(&self, w: &[i64]) -> bool {
        self.words.contains(&canonical_cyclic(w))
    }
}

/// A wallspace as plain halfspace-B membership vectors.
#[derive(Clone, Debug)]
pub struct Walls {
    pub points: usize,
    /// `side[w][p]` is true when point `p` lies in halfspace 1 of wall `w`.
    pub side: Vec<Vec<bool>>,
}

impl Walls {
    pub fn as_json(&self) -> String {
        let walls: Vec<[Vec<usize>; 2]> = self
            .side
            .iter()
            .map(|s| {
                [
                    (0..self.points).filter(|&p| !s[p]).collect(),
                    (0..self.points).filter(|&p| s[p]).collect(),
                ]
            })
            .collect();
        serde_json::json!({"points": self.points, "walls": walls}).to_string()
    }

    fn meets(&self, w: usize, s: bool, v: usize, t: bool) -> bool {
        (0..self.points).any(|p| self.side[w][p] == s && self.side[v][p] == t)
    }

    pub fn crosses(&self, w: usize, v: usize) -> bool {
        w != v
            && [false, true]
                .iter()
                .all(|&s| [false, true].iter().all(|&t| self.meets(w, s, v, t)))
    }

    /// Every orientation in `{0,1}^k` whose chosen halfspaces pairwise
    /// intersect, as bitmasks.
    pub fn consistent_orientations(&self) -> Vec<u32> {
        let k = self.side.len();
        assert!(k <= 20);
        (0u32..1 << k)
            .filter(|&o| {
                (0..k).all(|w| {
                    (w + 1..k).all(|v| self.meets(w, o >> w & 1 == 1, v, o >> v & 1 == 1))
                })
            })
            .collect()
    }

    pub fn principal(&self, point: usize) -> u32 {
        self.side
            .iter()
            .enumerate()
            .filter(|(_, s)| s[point])
            .map(|(w, _)| 1 << w)
            .sum()
    }

    /// Largest set of pairwise crossing walls, by subset enumeration.
    pub fn brute_dimension(&self) -> usize {
        let k = self.side.len();
        (0u32..1 << k)
            .filter(|&s| {
                (0..k).all(|w| {
                    s >> w & 1 == 0 || (w + 1..k).all(|v| s >> v & 1 == 0 || self.crosses(w, v))
                })
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}

pub fn same_partition(a: &[bool], b: &[bool]) -> bool {
    a == b || a.iter().zip(b).all(|(x, y)| x != y)
}

/// Vertex set and edge count of the component of `start` in the graph on
/// `verts` whose edges join masks differing in one bit.
pub fn flip_component(verts: &[u32], start: u32) -> (BTreeSet<u32>, usize) {
    let all: HashSet<u32> = verts.iter().copied().collect();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut edges = 0;
    while let Some(o) = queue.pop_front() {
        for b in 0..32 {
            let n = o ^ (1 << b);
            if all.contains(&n) {
                if n > o {
                    edges += 1;
                }
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
    }
    (seen, edges)
}

pub fn random_walls(rng: &mut impl Rng, max_walls: usize, max_points: usize) -> Walls {
    let points = rng.gen_range(2..=max_points);
    let k = rng.gen_range(1..=max_walls);
    // half the time cut one shared random order, which gives many nested pairs
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..points).collect();
        for i in (1..points).rev() {
            o.swap(i, rng.gen_range(0..=i));
        }
        o
    };
    let nested = rng.gen_bool(0.5);
    let mut side: Vec<Vec<bool>> = Vec::new();
    // few points admit few distinct partitions
    let mut tries = 0;
    while side.len() < k && tries < 50 * k {
        tries += 1;
        let s = loop {
            let s: Vec<bool> = if nested && rng.gen_bool(0.7) {
                let cut = rng.gen_range(1..points);
                let mut s = vec![false; points];
                for &p in &order[cut..] {
                    s[p] = true;
                }
                s
            } else {
                (0..points).map(|_| rng.gen_bool(0.5)).collect()
            };
            if s.iter().any(|&b| b) && s.iter().any(|&b| !b) {
                break s;
            }
        };
        if !side.iter().any(|t| same_partition(t, &s)) {
            side.push(s);
        }
    }
    Walls { points, side }
}

/// Graph distances by BFS from every vertex.
pub fn all_distances(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    (0..adj.len())
        .map(|s| {
            let mut d = vec![usize::MAX; adj.len()];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if d[v] == usize::MAX {
                        d[v] = d[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

/// Unique median for every triple, straight from the definition.
pub fn brute_is_median(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let d = all_distances(adj);
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                let on = |x: usize, y: usize, z: usize| d[x][z] + d[z][y] == d[x][y];
                let m = (0..n).filter(|&x| on(a, b, x) && on(a, c, x) && on(b, c, x)).count();
                if m != 1 {
                    return false;
                }
            }
        }
    }
    true
}
