use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use smallcube::complex::{CellTag, TwoComplex};
use smallcube::cubulate::{
    hypergraph_walls, local_finiteness_report, median_check, sageev_dual_capped, subdivide,
    Wallspace, DEFAULT_DUAL_CAP, DEFAULT_MEDIAN_CAP,
};
use smallcube::dehn::{dehn_reduce_traced, verify_generation, DehnPresentation, DEFAULT_WORD_CAP};
use smallcube::smallcancel::{check_metric, Rational};
use smallcube::ycomplex::{build_y, verify_claims, AnPresentation, AnProvider, YConfig};

/// Small-cancellation complexes, Dehn's algorithm and Sageev duals.
///
/// Exit status: 0 on success, 2 when a verification fails, 1 on usage or
/// I/O errors.
#[derive(Parser, Debug, Serialize)]
#[command(name = "smallcube", version)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Build the truncated complex Y_N.
    Gen(GenArgs),
    /// Check the piece, periodicity and local-finiteness claims.
    Verify(VerifyArgs),
    /// Report maximal pieces and the C'(λ) verdict.
    Pieces(PiecesArgs),
    /// Reduce a word by Dehn's algorithm.
    Reduce(ReduceArgs),
    /// Certify that level-n generators lie in the level-0 subgroup.
    VerifyGeneration(GenerationArgs),
    /// Build the Sageev dual of a complex (after subdivision) or wallspace.
    Cubulate(CubulateArgs),
    /// Sizes, boundary lengths and incidence counts of a complex.
    Stats(StatsArgs),
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    #[arg(long)]
    levels: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    seed: u64,
    /// Length of the β words (default ceil(log2 4m)).
    #[arg(long)]
    beta_length: Option<usize>,
    /// A_n presentation(s) as JSON; replaces the built-in ones.
    #[arg(long)]
    an: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    complex: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Needed only when the complex carries no construction record.
    #[arg(long)]
    beta_length: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct PiecesArgs {
    complex: PathBuf,
    #[arg(long, default_value = "1/6")]
    lambda: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ReduceArgs {
    complex: PathBuf,
    /// Letters separated by spaces: `x` forward, `X` or `x'` inverse,
    /// optional `^k` exponent.
    #[arg(long)]
    word: String,
}

#[derive(Args, Debug, Serialize)]
struct GenerationArgs {
    complex: PathBuf,
    #[arg(long)]
    levels: usize,
    #[arg(long, env = "SMALLCUBE_WORD_CAP", default_value_t = DEFAULT_WORD_CAP)]
    word_cap: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CubulateArgs {
    /// A complex, or a wallspace `{"points":N,"walls":[[[..],[..]]]}`.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Use the complex as given (all boundaries must already be even).
    #[arg(long)]
    no_subdivide: bool,
    #[arg(long, env = "SMALLCUBE_MEDIAN_CAP", default_value_t = DEFAULT_MEDIAN_CAP)]
    median_cap: usize,
    #[arg(long, env = "SMALLCUBE_DUAL_CAP", default_value_t = DEFAULT_DUAL_CAP)]
    dual_cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct StatsArgs {
    complex: PathBuf,
}

#[derive(Serialize)]
struct FileDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Cli,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    elapsed_ms: u128,
    exit_code: u8,
}

#[derive(Default)]
struct Run {
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    failed: bool,
}

fn digest(path: &Path, bytes: &[u8]) -> FileDigest {
    let hash = Sha256::digest(bytes);
    FileDigest {
        path: path.to_path_buf(),
        sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
    }
}

impl Run {
    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(digest(path, text.as_bytes()));
        Ok(text)
    }

    fn complex(&mut self, path: &Path) -> anyhow::Result<TwoComplex> {
        let text = self.read(path)?;
        TwoComplex::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Write to `path`, or stdout when absent.
    fn emit(&mut self, path: Option<&Path>, mut text: String) -> anyhow::Result<()> {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match path {
            Some(p) => {
                fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
                self.outputs.push(digest(p, text.as_bytes()));
            }
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, path: Option<&Path>, value: &T) -> anyhow::Result<()> {
        self.emit(path, serde_json::to_string_pretty(value)?)
    }
}

fn beta_length_of(c: &TwoComplex, flag: Option<usize>) -> anyhow::Result<usize> {
    flag.or(c.construction.as_ref().map(|k| k.beta_length))
        .context("complex has no construction record; pass --beta-length")
}

fn gen(run: &mut Run, a: &GenArgs) -> anyhow::Result<()> {
    let mut cfg = YConfig::new(a.levels, a.m, a.seed);
    if let Some(l) = a.beta_length {
        cfg.beta_length = l;
    }
    if let Some(p) = &a.an {
        let text = run.read(p)?;
        cfg.an = AnProvider::User(AnPresentation::from_json(&text)?);
    }
    let mut y = build_y(&cfg)?;
    if let Some(k) = y.construction.as_mut() {
        k.seed = Some(a.seed);
    }
    run.emit(a.output.as_deref(), y.to_json())
}

fn verify(run: &mut Run, a: &VerifyArgs) -> anyhow::Result<()> {
    let c = run.complex(&a.complex)?;
    let l = beta_length_of(&c, a.beta_length)?;
    let report = verify_claims(&c, l)?;
    for cl in &report.claims {
        eprintln!(
            "claim ({}) {}: {}",
            cl.id,
            if cl.passed { "pass" } else { "FAIL" },
            cl.description
        );
    }
    run.failed = !report.pass;
    run.json(a.report.as_deref(), &report)
}

fn pieces(run: &mut Run, a: &PiecesArgs) -> anyhow::Result<()> {
    let c = run.complex(&a.complex)?;
    let lambda: Rational = a
        .lambda
        .parse()
        .map_err(|_| anyhow::anyhow!("bad --lambda {:?}; expected p/q", a.lambda))?;
    let report = check_metric(&c.cyclic_words()?, lambda);
    run.failed = !report.pass;
    run.json(a.output.as_deref(), &report)
}

#[derive(Serialize)]
struct ReduceOut {
    input: String,
    reduced: String,
    length: usize,
    steps: usize,
    trivial: bool,
}

fn reduce(run: &mut Run, a: &ReduceArgs) -> anyhow::Result<()> {
    let c = run.complex(&a.complex)?;
    let w = c.generators.parse_word(&a.word)?;
    let p = DehnPresentation::from_complex(&c)?;
    let r = dehn_reduce_traced(&w, &p)?;
    let out = ReduceOut {
        input: c.generators.render(w.letters()),
        reduced: c.generators.render(r.word.letters()),
        length: r.word.len(),
        steps: r.steps,
        trivial: r.word.is_empty(),
    };
    run.json(None, &out)
}

fn verify_gen(run: &mut Run, a: &GenerationArgs) -> anyhow::Result<()> {
    let c = run.complex(&a.complex)?;
    let report = verify_generation(&c, a.levels, a.word_cap)?;
    run.failed = !report.pass;
    run.json(a.output.as_deref(), &report)
}

fn cubulate(run: &mut Run, a: &CubulateArgs) -> anyhow::Result<()> {
    let text = run.read(&a.input)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let (source, ws, dropped) = if value.get("points").is_some() {
        ("wallspace", Wallspace::from_json(&text)?, Vec::new())
    } else {
        let c = TwoComplex::from_json(&text)?;
        let c = if a.no_subdivide { c } else { subdivide(&c) };
        let hw = hypergraph_walls(&c)?;
        if !hw.dropped.is_empty() {
            eprintln!(
                "warning: {} non-separating wall(s) dropped",
                hw.dropped.len()
            );
        }
        ("complex", hw.wallspace, hw.dropped)
    };
    let dual = sageev_dual_capped(&ws, a.dual_cap)?;
    let degrees = local_finiteness_report(&dual);
    let median = if dual.vertices.len() <= a.median_cap {
        Some(median_check(&dual.adjacency(), a.median_cap)?)
    } else {
        eprintln!(
            "warning: median check skipped ({} vertices > cap {})",
            dual.vertices.len(),
            a.median_cap
        );
        None
    };
    run.failed = median == Some(false) || !degrees.bounded;
    let out = serde_json::json!({
        "source": source,
        "points": ws.points,
        "walls": ws.walls.len(),
        "dropped_walls": dropped,
        "median": median,
        "degrees": degrees,
        "dual": dual.to_json_value(),
    });
    run.json(a.out.as_deref(), &out)?;
    if let Some(p) = &a.dot {
        run.emit(Some(p), dual.to_dot())?;
    }
    Ok(())
}

fn stats(run: &mut Run, a: &StatsArgs) -> anyhow::Result<()> {
    let c = run.complex(&a.complex)?;
    c.validate()?;
    let lengths: Vec<usize> = c.cells.iter().map(|x| x.boundary.len()).collect();
    let count = |f: fn(&CellTag) -> bool| c.cells.iter().filter(|x| f(&x.tag)).count();
    let out = serde_json::json!({
        "generators": c.generators.len(),
        "vertices": c.vertices,
        "edges": c.edges.len(),
        "cells": c.cells.len(),
        "a_cells": count(|t| matches!(t, CellTag::A { .. })),
        "c_cells": count(|t| matches!(t, CellTag::C { .. })),
        "min_boundary": lengths.iter().min(),
        "max_boundary": lengths.iter().max(),
        "total_boundary": lengths.iter().sum::<usize>(),
        "max_vertex_degree": c.vertex_degrees().into_iter().max(),
        "max_cell_incidence": c.vertex_cell_incidence().into_iter().max(),
        "construction": c.construction,
    });
    run.json(None, &out)
}

fn dispatch(run: &mut Run, cli: &Cli) -> anyhow::Result<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring worker pool")?;
    }
    match &cli.command {
        Command::Gen(a) => gen(run, a),
        Command::Verify(a) => verify(run, a),
        Command::Pieces(a) => pieces(run, a),
        Command::Reduce(a) => reduce(run, a),
        Command::VerifyGeneration(a) => verify_gen(run, a),
        Command::Cubulate(a) => cubulate(run, a),
        Command::Stats(a) => stats(run, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let mut run = Run::default();
    let code: u8 = match dispatch(&mut run, &cli) {
        Ok(()) if run.failed => 2,
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<smallcube::Error>() {
                Some(smallcube::Error::NotSmallCancellation) => 2,
                _ => 1,
            }
        }
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &cli,
        inputs: run.inputs,
        outputs: run.outputs,
        elapsed_ms: start.elapsed().as_millis(),
        exit_code: code,
    };
    let text = serde_json::to_string(&manifest).expect("manifest serializes");
    match &cli.manifest {
        Some(p) => {
            if let Err(e) = fs::write(p, text + "\n") {
                eprintln!("error: writing manifest {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => eprintln!("{text}"),
    }
    ExitCode::from(code)
}
