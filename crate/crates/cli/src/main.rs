mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mapscale_core::complex::SimplicialComplex;
use mapscale_core::cover::CoverTower;
use mapscale_core::experiments::{
    bench_skeleton, demo_instability, verify_stability, BenchConfig, Theorem, VerifyConfig,
};
use mapscale_core::io;
use mapscale_core::mapper::{multiscale_mapper, nerve, pullback, Lens, Mode};
use mapscale_core::metric::{cech_filtration, mm_vs_cech, pullback_pseudometric, FiltrationKind};
use mapscale_core::persistence::{bottleneck_dims, tower_diagrams, PersistenceDiagram};

use config::RunConfig;

/// Mapper and multiscale mapper of functions on simplicial complexes, with
/// persistence diagrams and the stability experiments.
#[derive(Parser)]
#[command(name = "mapscale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mapper at one scale of a tower: DOT and JSON of the nerve.
    Mapper {
        #[command(flatten)]
        common: Common,
        /// Index of the scale in the tower.
        #[arg(long, default_value_t = 0)]
        scale_index: usize,
    },
    /// Multiscale mapper tower as JSON.
    Multiscale {
        #[command(flatten)]
        common: Common,
    },
    /// Persistence diagram of multiscale mapper, or of a tower JSON file.
    Diagram {
        #[command(flatten)]
        common: Common,
        /// Read a simplicial-map tower (as written by `multiscale`) instead
        /// of running multiscale mapper.
        #[arg(long)]
        tower_json: Option<PathBuf>,
        /// Replace every scale by its natural logarithm.
        #[arg(long)]
        log: bool,
    },
    /// Bottleneck distance between two diagram files.
    Bottleneck {
        #[command(flatten)]
        common: Common,
        first: PathBuf,
        second: PathBuf,
    },
    /// Pullback pseudometric, its Čech filtration and the comparison with
    /// multiscale mapper when the tower is certified.
    Cech {
        #[command(flatten)]
        common: Common,
        /// Use the Rips rule instead of vertex-witness Čech.
        #[arg(long)]
        rips: bool,
    },
    /// The loop example with unstable multiscale mapper diagrams.
    DemoInstability {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        delta: f64,
        #[arg(long, default_value_t = 16.0)]
        m: f64,
    },
    /// Randomized checks of the stability and approximation bounds.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Experiment name, or `all`.
        #[arg(long, default_value = "all")]
        experiment: String,
        /// Vertices of each random complex.
        #[arg(long)]
        vertices: Option<usize>,
        /// Cap on the simplices of each random complex.
        #[arg(long)]
        max_simplices: Option<usize>,
    },
    /// Timing of full-complex against 1-skeleton exact multiscale mapper.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        blocks: usize,
        #[arg(long, default_value_t = 9)]
        block_size: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Maximal simplices, one per line.
    #[arg(long)]
    complex: Option<PathBuf>,
    /// Lines `vertex value`, or `vertex point_id` with --metric.
    #[arg(long)]
    function: Option<PathBuf>,
    /// Codomain distance matrix (CSV).
    #[arg(long)]
    metric: Option<PathBuf>,
    /// Tower spec (JSON).
    #[arg(long)]
    tower: Option<PathBuf>,
    /// exact, exact-full or combinatorial.
    #[arg(long)]
    mode: Option<Mode>,
    /// Homology dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Prime p of the coefficient field Z/p (default 2).
    #[arg(long)]
    prime: Option<u32>,
    /// Directory for output files; without it the main output goes to
    /// stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for randomized subcommands.
    #[arg(long, env = "MAPSCALE_SEED")]
    seed: Option<u64>,
    /// Number of trials for `verify`.
    #[arg(long)]
    trials: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f.clone(); } )* };
        }
        over!(complex, function, metric, tower, mode, dims, prime, output, seed, trials);
        c.validate()?;
        Ok(c)
    }
}

/// Files produced by a command, plus a human-readable summary.
struct Outcome {
    files: Vec<(&'static str, String)>,
    summary: String,
}

impl Outcome {
    fn new(summary: String) -> Self {
        Self { files: Vec::new(), summary }
    }

    fn file(mut self, name: &'static str, content: String) -> Self {
        self.files.push((name, content));
        self
    }

    fn json(self, name: &'static str, value: &impl Serialize) -> Result<Self> {
        Ok(self.file(name, serde_json::to_string_pretty(value)?))
    }

    /// With an output directory, writes every file and prints the summary;
    /// otherwise prints the first file to stdout and the summary to stderr.
    fn emit(self, output: Option<&Path>) -> Result<()> {
        match output {
            Some(dir) => {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for (name, content) in &self.files {
                    let path = dir.join(name);
                    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
                }
                print!("{}", self.summary);
            }
            None => {
                if let Some((_, content)) = self.files.first() {
                    print!("{content}");
                    eprint!("{}", self.summary);
                } else {
                    print!("{}", self.summary);
                }
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

struct Inputs {
    k: SimplicialComplex,
    lens: Lens,
    tower: CoverTower,
}

fn load_inputs(c: &RunConfig) -> Result<Inputs> {
    let complex_path = c.require(&c.complex, "complex")?;
    let k = io::parse_complex(&read(complex_path)?, None).with_context(|| format!("in {}", complex_path.display()))?;
    let function_path = c.require(&c.function, "function")?;
    let function_text = read(function_path)?;
    let metric = match &c.metric {
        Some(p) => Some(Arc::new(io::parse_metric_csv(&read(p)?).with_context(|| format!("in {}", p.display()))?)),
        None => None,
    };
    let lens = if metric.is_some() {
        let f = io::parse_point_function(&function_text).with_context(|| format!("in {}", function_path.display()))?;
        io::check_same_vertices(&k, &f).context("complex and function disagree")?;
        Lens::Point(f)
    } else {
        let f = io::parse_real_function(&function_text).with_context(|| format!("in {}", function_path.display()))?;
        io::check_same_vertices(&k, &f).context("complex and function disagree")?;
        Lens::Real(f)
    };
    let tower_path = c.require(&c.tower, "tower")?;
    let spec: io::TowerSpec =
        serde_json::from_str(&read(tower_path)?).with_context(|| format!("parsing {}", tower_path.display()))?;
    let tower =
        io::build_tower(&spec, metric).with_context(|| format!("building tower from {}", tower_path.display()))?;
    Ok(Inputs { k, lens, tower })
}

fn cmd_mapper(c: &RunConfig, scale_index: usize) -> Result<Outcome> {
    let inp = load_inputs(c)?;
    if scale_index >= inp.tower.len() {
        bail!("scale index {scale_index} out of range; the tower has {} scales", inp.tower.len());
    }
    let pc = pullback(&inp.k, &inp.lens, inp.tower.cover(scale_index), c.mode())?;
    let n = nerve(&pc, c.nerve_dim());
    let summary = format!(
        "mapper at scale {}: {} nodes, {} edges, {} triangles\n",
        inp.tower.scales()[scale_index],
        n.count(0),
        n.count(1),
        n.count(2)
    );
    Ok(Outcome::new(summary).file("mapper.dot", io::mapper_dot(&pc, &n)).file("mapper.json", io::mapper_json(&pc, &n)))
}

fn cmd_multiscale(c: &RunConfig) -> Result<Outcome> {
    let inp = load_inputs(c)?;
    let mm = multiscale_mapper(&inp.tower, &inp.lens, &inp.k, c.mode(), c.nerve_dim())?;
    let mut summary = String::new();
    for (eps, k) in mm.scales().iter().zip(mm.complexes()) {
        writeln!(summary, "scale {eps}: {} vertices, {} simplices", k.count(0), k.num_simplices())?;
    }
    Ok(Outcome::new(summary).file("multiscale.json", io::tower_to_json(&mm)))
}

fn diagram_summary(d: &PersistenceDiagram, dims: &[usize]) -> String {
    let mut out = String::new();
    for &k in dims {
        let essential = d.bars().iter().filter(|b| b.dim == k && b.is_essential()).count();
        writeln!(out, "H{k}: {} bars, {essential} essential", d.pairs(k).len()).unwrap();
    }
    out
}

fn cmd_diagram(c: &RunConfig, tower_json: Option<&Path>, log: bool) -> Result<Outcome> {
    let mut tower = match tower_json {
        Some(p) => io::tower_from_json(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => {
            let inp = load_inputs(c)?;
            multiscale_mapper(&inp.tower, &inp.lens, &inp.k, c.mode(), c.nerve_dim())?
        }
    };
    if log {
        tower = tower.reindex_log()?;
    }
    let dims = c.dims();
    let d = tower_diagrams(&tower, &dims, c.prime())?;
    Outcome::new(diagram_summary(&d, &dims)).file("diagram.txt", d.to_text()).json("diagram.json", &d)
}

fn cmd_bottleneck(c: &RunConfig, first: &Path, second: &Path) -> Result<Outcome> {
    let load = |p: &Path| -> Result<PersistenceDiagram> {
        PersistenceDiagram::from_text(&read(p)?).with_context(|| format!("in {}", p.display()))
    };
    let (a, b) = (load(first)?, load(second)?);
    let distances = bottleneck_dims(&a, &b, &c.dims());
    let mut text = String::new();
    for d in &distances {
        writeln!(text, "H{}: {}", d.dim, d.distance)?;
    }
    Outcome::new(text.clone()).file("bottleneck.txt", text).json("bottleneck.json", &distances)
}

fn cmd_cech(c: &RunConfig, rips: bool) -> Result<Outcome> {
    let inp = load_inputs(c)?;
    let mode = c.mode.unwrap_or(Mode::Combinatorial);
    let d = pullback_pseudometric(&inp.tower, &inp.lens, &inp.k, mode)?;
    let kind = if rips { FiltrationKind::Rips } else { FiltrationKind::Cech };
    let filtration = cech_filtration(&d, c.nerve_dim(), kind);
    let dims = c.dims();
    let diagram = tower_diagrams(&filtration.to_tower()?, &dims, c.prime())?;
    let mut summary = format!(
        "pseudometric on {} vertices; filtration with {} simplices over {} scales\n",
        d.vertices().len(),
        filtration.simplices().len(),
        filtration.scales().len()
    );
    summary.push_str(&diagram_summary(&diagram, &dims));
    let mut out = Outcome::new(String::new())
        .file("filtration.txt", filtration.to_text())
        .file("pseudometric.csv", d.to_csv())
        .file("cech_diagram.txt", diagram.to_text());
    match inp.tower.certificate() {
        Some(cert) if cert.s >= 1.0 => {
            let r = mm_vs_cech(&inp.tower, &inp.lens, &inp.k, mode, &dims, c.prime())?;
            for dd in &r.distances {
                writeln!(
                    summary,
                    "H{}: log-scale distance to multiscale mapper {} (bound {})",
                    dd.dim, dd.distance, r.bound
                )?;
            }
            out = out.json("mm_vs_cech.json", &r)?;
        }
        _ => summary.push_str("tower has no certificate with s >= 1; skipping the comparison with multiscale mapper\n"),
    }
    out.summary = summary;
    Ok(out)
}

fn cmd_demo(s: f64, delta: f64, m: f64) -> Result<(Outcome, bool)> {
    let r = demo_instability(s, delta, m)?;
    let summary = format!(
        "loop with {} vertices, |f - g| = {}\nD1(f) = {}\nD1(g) = {}\nbottleneck = {}\n{}\n",
        r.loop_vertices,
        r.sup_distance,
        r.diagram_f.dim(1).to_text().trim_end(),
        r.diagram_g.dim(1).to_text().trim_end(),
        r.bottleneck,
        if r.pass { "diagrams as expected" } else { "UNEXPECTED diagrams" }
    );
    Ok((Outcome::new(summary).json("demo.json", &r)?, r.pass))
}

fn cmd_verify(
    c: &RunConfig,
    experiment: &str,
    vertices: Option<usize>,
    max_simplices: Option<usize>,
) -> Result<(Outcome, bool)> {
    let theorems: Vec<Theorem> = if experiment == "all" { Theorem::ALL.to_vec() } else { vec![experiment.parse()?] };
    let defaults = VerifyConfig::default();
    let vc = VerifyConfig {
        trials: c.trials.unwrap_or(defaults.trials),
        seed: c.seed.unwrap_or(defaults.seed),
        dims: c.dims(),
        prime: c.prime(),
        vertices: vertices.unwrap_or(defaults.vertices),
        max_simplices: max_simplices.unwrap_or(defaults.max_simplices),
    };
    let reports = theorems.iter().map(|&t| verify_stability(t, &vc)).collect::<mapscale_core::Result<Vec<_>>>()?;
    let ok = reports.iter().all(|r| r.all_passed());
    let summary: String = reports.iter().map(|r| r.summary()).collect();
    Ok((Outcome::new(summary).json("verify.json", &reports)?, ok))
}

fn cmd_bench(c: &RunConfig, blocks: usize, block_size: usize, repeats: usize) -> Result<Outcome> {
    let bc = BenchConfig { seed: c.seed.unwrap_or(0), blocks, block_size, repeats, dims: c.dims(), prime: c.prime() };
    let r = bench_skeleton(&bc)?;
    let summary = format!(
        "{} backend; simplices per dimension {:?}\nfull complex {:.4}s, 1-skeleton {:.4}s, speedup {:.2}x, identical diagrams: {}\n",
        r.backend, r.counts, r.full_seconds, r.skeleton_seconds, r.speedup, r.identical_diagrams
    );
    Outcome::new(summary).json("bench.json", &r)
}

fn run(cli: Cli) -> Result<bool> {
    let (common, outcome, ok) = match &cli.command {
        Command::Mapper { common, scale_index } => {
            let c = common.resolve()?;
            (c.clone(), cmd_mapper(&c, *scale_index)?, true)
        }
        Command::Multiscale { common } => {
            let c = common.resolve()?;
            (c.clone(), cmd_multiscale(&c)?, true)
        }
        Command::Diagram { common, tower_json, log } => {
            let c = common.resolve()?;
            (c.clone(), cmd_diagram(&c, tower_json.as_deref(), *log)?, true)
        }
        Command::Bottleneck { common, first, second } => {
            let c = common.resolve()?;
            (c.clone(), cmd_bottleneck(&c, first, second)?, true)
        }
        Command::Cech { common, rips } => {
            let c = common.resolve()?;
            (c.clone(), cmd_cech(&c, *rips)?, true)
        }
        Command::DemoInstability { common, s, delta, m } => {
            let c = common.resolve()?;
            let (out, ok) = cmd_demo(*s, *delta, *m)?;
            (c, out, ok)
        }
        Command::Verify { common, experiment, vertices, max_simplices } => {
            let c = common.resolve()?;
            let (out, ok) = cmd_verify(&c, experiment, *vertices, *max_simplices)?;
            (c, out, ok)
        }
        Command::Bench { common, blocks, block_size, repeats } => {
            let c = common.resolve()?;
            (c.clone(), cmd_bench(&c, *blocks, *block_size, *repeats)?, true)
        }
    };
    outcome.emit(common.output.as_deref())?;
    Ok(ok)
}

fn main() -> Result<()> {
    if !run(Cli::parse())? {
        eprintln!("some checks failed");
        std::process::exit(2);
    }
    Ok(())
}
