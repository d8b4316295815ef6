//! The layered complex `Y_N`.
//!
//! Level `n` is a wedge `X_n = A_n ∨ B_n` at vertex `n`: `A_n` is a
//! two-generator C'(1/6) presentation complex on loops `x_{n1}, x_{n2}` and
//! `B_n` is a bouquet of the loops `x_{n3}, x_{n4}`. Ray edges `t_n` join
//! vertex `n-1` to `n`. For `1 <= n <= N` and `i` in `1..=4` the cell
//! `C_{ni}` is attached along `t_n x_{ni} t_n⁻¹ γ_{ni}` where
//! `γ_{ni} = β¹ α β² α ⋯ α β^m` lives in `X_{n-1}`.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{
    Cell, CellTag, Construction, Edge, EdgeStep, Generator, GeneratorTable, Role, TwoComplex,
};
use crate::error::{Error, Result};
use crate::smallcancel::{check_metric, is_periodic, PieceReport, Rational};
use crate::words::{CyclicWord, Letter, Word};

pub const MIN_M: usize = 12;
/// Relators of a two-generator piece must be strictly longer than this.
pub const MIN_AN_RELATOR: usize = 13;
const DEFAULT_AN_LENGTH: usize = 20;
const DEFAULT_AN_RELATORS: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnProvider {
    Builtin { seed: u64 },
    /// One presentation per level, or a single one reused at every level.
    User(Vec<AnPresentation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YConfig {
    pub levels: usize,
    pub m: usize,
    pub beta_length: usize,
    pub an: AnProvider,
}

impl YConfig {
    /// `L = ceil(log2(4m))`.
    pub fn default_beta_length(m: usize) -> usize {
        let need = 4 * m;
        let mut l = 0;
        while (1usize << l) < need {
            l += 1;
        }
        l
    }

    pub fn new(levels: usize, m: usize, seed: u64) -> Self {
        Self {
            levels,
            m,
            beta_length: Self::default_beta_length(m),
            an: AnProvider::Builtin { seed },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < MIN_M {
            return Err(Error::InvalidConfig(format!(
                "m = {} but m must be at least {MIN_M}",
                self.m
            )));
        }
        check_beta_capacity(self.m, self.beta_length)?;
        if let AnProvider::User(list) = &self.an {
            if list.is_empty() {
                return Err(Error::InvalidConfig("no A_n presentations given".into()));
            }
            if list.len() > 1 && list.len() <= self.levels {
                return Err(Error::InvalidConfig(format!(
                    "{} A_n presentations for levels 0..={}",
                    list.len(),
                    self.levels
                )));
            }
        }
        Ok(())
    }

    pub fn presentation(&self, n: usize) -> Result<AnPresentation> {
        match &self.an {
            AnProvider::Builtin { seed } => default_an(n, *seed),
            AnProvider::User(list) => {
                let p = if list.len() == 1 { &list[0] } else { &list[n] };
                p.validate()?;
                Ok(p.clone())
            }
        }
    }
}

fn check_beta_capacity(m: usize, length: usize) -> Result<()> {
    let needed = 4 * m;
    if length >= usize::BITS as usize || (1usize << length) >= needed {
        Ok(())
    } else {
        Err(Error::InsufficientLength { length, needed })
    }
}

/// A two-generator presentation. Relator letters use local generator
/// indices 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<CyclicWord>,
}

impl AnPresentation {
    pub fn from_json(text: &str) -> Result<Vec<AnPresentation>> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let list: Vec<AnPresentation> = if v.is_array() {
            serde_json::from_value(v)?
        } else {
            vec![serde_json::from_value(v)?]
        };
        for p in &list {
            p.validate()?;
        }
        Ok(list)
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.len() != 2 {
            return Err(Error::InvalidPresentation(format!(
                "expected 2 generators, got {}",
                self.generators.len()
            )));
        }
        if self.relators.is_empty() {
            return Err(Error::InvalidPresentation("no relators".into()));
        }
        for (k, r) in self.relators.iter().enumerate() {
            if r.letters().iter().any(|l| l.generator > 1) {
                return Err(Error::InvalidPresentation(format!(
                    "relator {k} uses a generator other than the two declared"
                )));
            }
            if r.len() < MIN_AN_RELATOR {
                return Err(Error::InvalidPresentation(format!(
                    "relator {k} has length {} <= 12",
                    r.len()
                )));
            }
            if is_periodic(r) {
                return Err(Error::InvalidPresentation(format!(
                    "relator {k} is a proper power"
                )));
            }
        }
        let report = check_metric(&self.relators, Rational::new(1, 6));
        if !report.pass {
            return Err(Error::InvalidPresentation(format!(
                "not C'(1/6): worst piece ratio {}",
                report.worst_ratio
            )));
        }
        Ok(())
    }
}

fn an_rng(n: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (n as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Stand-in `A_n`: two relators of length 20 over two generators in which
/// every cyclic 4-letter window, over both relators and their inverses,
/// occurs once. That bounds pieces by 3 < 20/6.
pub fn default_an(n: usize, seed: u64) -> Result<AnPresentation> {
    const ROUNDS: usize = 32;
    const BUDGET: usize = 200_000;
    let mut rng = an_rng(n, seed);
    for _ in 0..ROUNDS {
        let mut search = WindowSearch {
            len: DEFAULT_AN_LENGTH,
            count: DEFAULT_AN_RELATORS,
            window: 4,
            used: HashSet::new(),
            done: Vec::new(),
            budget: BUDGET,
        };
        if let Some(rels) = search.run(&mut rng) {
            let relators = rels
                .into_iter()
                .map(CyclicWord::new)
                .collect::<Result<Vec<_>>>()?;
            let p = AnPresentation {
                generators: vec![format!("x{n}1"), format!("x{n}2")],
                relators,
            };
            if p.validate().is_ok() {
                return Ok(p);
            }
        }
    }
    Err(Error::GenerationFailed {
        level: n,
        seed,
        rounds: ROUNDS,
    })
}

struct WindowSearch {
    len: usize,
    count: usize,
    window: usize,
    used: HashSet<Vec<Letter>>,
    done: Vec<Vec<Letter>>,
    budget: usize,
}

impl WindowSearch {
    fn run(&mut self, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<Letter>>> {
        while self.done.len() < self.count {
            let mut cur = Vec::with_capacity(self.len);
            let mut added = Vec::new();
            if !self.extend(&mut cur, &mut added, rng) {
                return None;
            }
            self.done.push(cur);
        }
        Some(std::mem::take(&mut self.done))
    }

    fn claim(&mut self, w: Vec<Letter>, added: &mut Vec<Vec<Letter>>) -> bool {
        let inv: Vec<Letter> = w.iter().rev().map(|l| l.inv()).collect();
        if self.used.contains(&w) || self.used.contains(&inv) || w == inv {
            return false;
        }
        self.used.insert(inv.clone());
        self.used.insert(w.clone());
        added.push(w);
        added.push(inv);
        true
    }

    fn release(&mut self, added: &mut Vec<Vec<Letter>>, keep: usize) {
        while added.len() > keep {
            let w = added.pop().unwrap();
            self.used.remove(&w);
        }
    }

    fn extend(
        &mut self,
        cur: &mut Vec<Letter>,
        added: &mut Vec<Vec<Letter>>,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let k = self.window;
        if cur.len() == self.len {
            if cur[0] == cur[self.len - 1].inv() {
                return false;
            }
            let mark = added.len();
            for start in self.len - k + 1..self.len {
                let w: Vec<Letter> = (0..k).map(|i| cur[(start + i) % self.len]).collect();
                if !self.claim(w, added) {
                    self.release(added, mark);
                    return false;
                }
            }
            return true;
        }
        let mut letters = [
            Letter::pos(0),
            Letter::neg(0),
            Letter::pos(1),
            Letter::neg(1),
        ];
        letters.shuffle(rng);
        for l in letters {
            if cur.last() == Some(&l.inv()) {
                continue;
            }
            cur.push(l);
            let mark = added.len();
            let ok = cur.len() < k || self.claim(cur[cur.len() - k..].to_vec(), added);
            if ok && self.extend(cur, added, rng) {
                return true;
            }
            self.release(added, mark);
            cur.pop();
            if self.budget == 0 {
                return false;
            }
        }
        false
    }
}

/// `betas[i-1][j-1]` is `β_{ni}^j`.
pub type BetaTable = Vec<Vec<Word>>;

/// The first `4m` words of length `L` over `x3 < x4` in lexicographic order,
/// assigned row-major to `(i, j)`.
pub fn beta_words(x3: u32, x4: u32, m: usize, length: usize) -> Result<BetaTable> {
    check_beta_capacity(m, length)?;
    let mut table: BetaTable = (0..4).map(|_| Vec::with_capacity(m)).collect();
    for k in 0..4 * m {
        let w: Word = (0..length)
            .map(|bit| {
                let shift = length - 1 - bit;
                let one = shift < usize::BITS as usize && (k >> shift) & 1 == 1;
                Letter::pos(if one { x4 } else { x3 })
            })
            .collect();
        table[k / m].push(w);
    }
    Ok(table)
}

/// Generator table of `Y_N`; generator index equals edge index.
pub fn y_generators(levels: usize) -> GeneratorTable {
    let mut t = GeneratorTable::new();
    for n in 0..=levels {
        if n >= 1 {
            t.push(Generator {
                name: format!("t{n}"),
                role: Role::RayEdge,
                level: n,
                family: None,
            })
            .expect("unique");
        }
        for i in 1..=4u8 {
            t.push(Generator {
                name: format!("x{n}{i}"),
                role: if i <= 2 {
                    Role::AGenerator
                } else {
                    Role::BGenerator
                },
                level: n,
                family: Some(i),
            })
            .expect("unique");
        }
    }
    t
}

fn x_gen(table: &GeneratorTable, n: usize, i: u8) -> u32 {
    let role = if i <= 2 {
        Role::AGenerator
    } else {
        Role::BGenerator
    };
    table.find(role, n, Some(i)).expect("x generator present")
}

fn t_gen(table: &GeneratorTable, n: usize) -> u32 {
    table.find(Role::RayEdge, n, None).expect("t generator present")
}

/// `α_{ni}`: `x_{(n-1)i}` for `i = 1, 2` and `x_{(n-1)(i-2)}²` for `i = 3, 4`.
pub fn alpha(table: &GeneratorTable, n: usize, i: u8) -> Word {
    if i <= 2 {
        Word(vec![Letter::pos(x_gen(table, n - 1, i))])
    } else {
        let x = Letter::pos(x_gen(table, n - 1, i - 2));
        Word(vec![x, x])
    }
}

pub fn alpha_len(i: u8) -> usize {
    if i <= 2 {
        1
    } else {
        2
    }
}

/// `γ_{ni} = β¹ α β² α ⋯ α β^m`.
pub fn gamma(table: &GeneratorTable, betas: &BetaTable, n: usize, i: u8) -> Word {
    let a = alpha(table, n, i);
    let row = &betas[(i - 1) as usize];
    let mut out = Vec::new();
    for (j, b) in row.iter().enumerate() {
        if j > 0 {
            out.extend_from_slice(a.letters());
        }
        out.extend_from_slice(b.letters());
    }
    Word(out)
}

/// β tables for levels `1..=N` under the default lexicographic scheme.
pub fn default_betas(cfg: &YConfig, table: &GeneratorTable) -> Result<Vec<BetaTable>> {
    (1..=cfg.levels)
        .map(|n| {
            beta_words(
                x_gen(table, n - 1, 3),
                x_gen(table, n - 1, 4),
                cfg.m,
                cfg.beta_length,
            )
        })
        .collect()
}

pub fn build_y(cfg: &YConfig) -> Result<TwoComplex> {
    cfg.validate()?;
    let table = y_generators(cfg.levels);
    let ans = (0..=cfg.levels)
        .map(|n| cfg.presentation(n))
        .collect::<Result<Vec<_>>>()?;
    let betas = default_betas(cfg, &table)?;
    build_y_from_parts(cfg, &ans, &betas)
}

/// Assemble `Y_N` from explicit `A_n` presentations (`0..=N`) and β tables
/// (`betas[n-1]` for level `n`). No invariant of the β tables is checked
/// here, so corrupted tables can be fed to the claim verifier.
pub fn build_y_from_parts(
    cfg: &YConfig,
    ans: &[AnPresentation],
    betas: &[BetaTable],
) -> Result<TwoComplex> {
    if ans.len() != cfg.levels + 1 || betas.len() != cfg.levels {
        return Err(Error::InvalidConfig(
            "need one A_n per level and one beta table per connecting level".into(),
        ));
    }
    let table = y_generators(cfg.levels);
    let mut edges = Vec::with_capacity(table.len());
    for g in table.entries() {
        let (s, t) = match g.role {
            Role::RayEdge => (g.level - 1, g.level),
            _ => (g.level, g.level),
        };
        edges.push(Edge {
            source: s,
            target: t,
            generator: edges.len() as u32,
        });
    }
    let step = |l: Letter| {
        if l.inverse {
            EdgeStep::backward(l.generator as usize)
        } else {
            EdgeStep::forward(l.generator as usize)
        }
    };
    let mut cells = Vec::new();
    for n in 0..=cfg.levels {
        let local = [x_gen(&table, n, 1), x_gen(&table, n, 2)];
        for r in &ans[n].relators {
            let boundary = r
                .letters()
                .iter()
                .map(|l| {
                    step(Letter {
                        generator: local[l.generator as usize],
                        inverse: l.inverse,
                    })
                })
                .collect();
            cells.push(Cell {
                boundary,
                tag: CellTag::A { level: n },
            });
        }
        if n == 0 {
            continue;
        }
        let t = t_gen(&table, n);
        for i in 1..=4u8 {
            let mut boundary = vec![
                EdgeStep::forward(t as usize),
                EdgeStep::forward(x_gen(&table, n, i) as usize),
                EdgeStep::backward(t as usize),
            ];
            boundary.extend(gamma(&table, &betas[n - 1], n, i).letters().iter().map(|&l| step(l)));
            cells.push(Cell {
                boundary,
                tag: CellTag::C { level: n, family: i },
            });
        }
    }
    let complex = TwoComplex {
        generators: table,
        vertices: cfg.levels + 1,
        edges,
        cells,
        construction: Some(Construction {
            levels: cfg.levels,
            m: cfg.m,
            beta_length: cfg.beta_length,
            seed: match cfg.an {
                AnProvider::Builtin { seed } => Some(seed),
                AnProvider::User(_) => None,
            },
            an_source: match cfg.an {
                AnProvider::Builtin { .. } => "builtin".into(),
                AnProvider::User(_) => "user".into(),
            },
        }),
    };
    complex.validate()?;
    Ok(complex)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub description: String,
    pub passed: bool,
    /// Number of cell pairs (or levels) examined.
    pub checked: usize,
    /// Largest piece seen among the examined pairs.
    pub worst: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claims: Vec<ClaimResult>,
    pub pass: bool,
    /// Worst piece ratio over C-cells and `1/6` minus it.
    pub worst_c_ratio: Option<Rational>,
    pub c_margin: Option<Rational>,
    pub max_vertex_degree: usize,
    pub max_cell_incidence: usize,
    pub metric: PieceReport,
}

impl ClaimReport {
    pub fn claim(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }
}

struct Claim {
    res: ClaimResult,
}

impl Claim {
    fn new(id: &str, description: &str) -> Self {
        Self {
            res: ClaimResult {
                id: id.into(),
                description: description.into(),
                passed: true,
                checked: 0,
                worst: 0,
                violations: Vec::new(),
            },
        }
    }

    fn observe(&mut self, len: usize, ok: bool, what: impl FnOnce() -> String) {
        self.res.checked += 1;
        self.res.worst = self.res.worst.max(len);
        if !ok {
            self.res.passed = false;
            if self.res.violations.len() < 32 {
                self.res.violations.push(what());
            }
        }
    }
}

/// Machine-check the piece and local-finiteness claims on a complex built
/// by [`build_y`]. `beta_length` is `|β|`.
pub fn verify_claims(complex: &TwoComplex, beta_length: usize) -> Result<ClaimReport> {
    let words = complex.cyclic_words()?;
    let metric = check_metric(&words, Rational::new(1, 6));
    let tags: Vec<CellTag> = complex.cells.iter().map(|c| c.tag).collect();

    let mut a = Claim::new("a", "pieces between a C-cell and an A-cell have length <= 2");
    let mut b = Claim::new(
        "b",
        "pieces between C_{n,i} and C_{n+1,i'} have length <= 1",
    );
    let mut c = Claim::new(
        "c",
        "same level, i - i' odd: every piece is t_n or lies in a beta block (<= max(1, L))",
    );
    let mut d = Claim::new(
        "d",
        "same level, i - i' even: pieces are shorter than |beta| + |alpha| + |beta| + 2",
    );
    let mut g = Claim::new("g", "C-cells more than one level apart share no piece");

    for p in &metric.pairs {
        let (ta, tb) = (tags[p.cell_a], tags[p.cell_b]);
        let len = p.max_piece_length;
        let label = || format!("cells {} and {}: piece of length {len}", p.cell_a, p.cell_b);
        match (ta, tb) {
            (CellTag::C { .. }, CellTag::A { .. }) | (CellTag::A { .. }, CellTag::C { .. }) => {
                a.observe(len, len <= 2, label)
            }
            (
                CellTag::C {
                    level: n1,
                    family: i1,
                },
                CellTag::C {
                    level: n2,
                    family: i2,
                },
            ) => {
                if n1.abs_diff(n2) == 1 {
                    b.observe(len, len <= 1, label);
                } else if n1.abs_diff(n2) >= 2 {
                    g.observe(len, len == 0, label);
                } else if (i1 as i32 - i2 as i32) % 2 != 0 {
                    c.observe(len, len <= beta_length.max(1), label);
                } else {
                    let bound = 2 * beta_length + alpha_len(i1).max(alpha_len(i2)) + 2;
                    d.observe(len, len < bound, label);
                }
            }
            _ => {}
        }
    }

    let mut e = Claim::new("e", "every 2-cell satisfies C'(1/6)");
    for cell in &metric.cells {
        e.observe(cell.max_piece, cell.passes, || {
            format!(
                "cell {}: piece {} of boundary {}",
                cell.cell, cell.max_piece, cell.boundary_length
            )
        });
    }

    let mut f = Claim::new("f", "no 2-cell has a periodic attaching map");
    for (i, w) in words.iter().enumerate() {
        let periodic = is_periodic(w);
        f.observe(0, !periodic, || format!("cell {i} is a proper power"));
    }

    let h = local_finiteness(complex, &tags);

    let worst_c_ratio = metric
        .cells
        .iter()
        .filter(|c| matches!(tags[c.cell], CellTag::C { .. }))
        .map(|c| c.ratio)
        .max();
    let sixth = Rational::new(1, 6);
    let claims: Vec<ClaimResult> = [a, b, c, d, e, f, g]
        .into_iter()
        .map(|c| c.res)
        .chain(std::iter::once(h))
        .collect();
    let pass = claims.iter().all(|c| c.passed);
    Ok(ClaimReport {
        pass,
        worst_c_ratio,
        c_margin: worst_c_ratio.filter(|&r| r < sixth).map(|r| sixth - r),
        max_vertex_degree: complex.vertex_degrees().into_iter().max().unwrap_or(0),
        max_cell_incidence: complex
            .vertex_cell_incidence()
            .into_iter()
            .max()
            .unwrap_or(0),
        claims,
        metric,
    })
}

/// For each level `n`, the edges and cells outside `X_n` that meet it must
/// be exactly `t_m` and `C_{mi}` for `m ∈ {n, n+1}`.
fn local_finiteness(complex: &TwoComplex, tags: &[CellTag]) -> ClaimResult {
    let mut h = Claim::new(
        "h",
        "each X_n meets only t_m and C_{m,i} for m in {n, n+1} outside its own cells",
    );
    let levels: BTreeSet<usize> = complex
        .generators
        .entries()
        .iter()
        .filter(|g| g.role != Role::RayEdge)
        .map(|g| g.level)
        .collect();
    let top = levels.iter().copied().max().unwrap_or(0);
    for &n in &levels {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for e in &complex.edges {
            let g = complex.generators.get(e.generator).expect("validated");
            let own = g.role != Role::RayEdge && g.level == n;
            if !own && (e.source == n || e.target == n) {
                seen.insert(g.name.clone());
            }
        }
        for (ci, tag) in tags.iter().enumerate() {
            if *tag == (CellTag::A { level: n }) {
                continue;
            }
            if complex.cell_vertices(ci).contains(&n) {
                seen.insert(match tag {
                    CellTag::A { level } => format!("A{level}"),
                    CellTag::C { level, family } => format!("C{level}{family}"),
                    CellTag::Other => format!("cell{ci}"),
                });
            }
        }
        let mut expected: BTreeSet<String> = BTreeSet::new();
        for m in [n, n + 1] {
            if m >= 1 && m <= top {
                expected.insert(format!("t{m}"));
                for i in 1..=4 {
                    expected.insert(format!("C{m}{i}"));
                }
            }
        }
        let size = seen.len();
        h.observe(size, seen == expected, || {
            format!("level {n}: meets {seen:?}, expected {expected:?}")
        });
    }
    h.res
}
