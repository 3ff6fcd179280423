use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use domlab::domination::{self, oracle_brute_force, Invariant, OracleConfig, SolverConfig, WeightFunction};
use domlab::graph::{cartesian_product_capped, DEFAULT_PRODUCT_CAP};
use domlab::harness::{self, GraphSource, LabelingReport, ProductInvariant, SweepConfig, BUDGET_ENV};
use domlab::io::{parse_graph6, parse_graphs, read_graph, read_graphs, write_edge_list, write_graph6};
use domlab::labeling::{build_context_with, run_labeling};
use domlab::{Error, Graph};

const EXIT_FOUND: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "domlab", version, about = "Domination invariants of graphs and Cartesian products")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Gamma,
    I,
    Gamma2,
    Gammak,
    Gammawk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Bb,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Auto,
    Graph6,
    Edges,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print an invariant and an optimal certificate for every graph in a file.
    Invariant {
        file: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Solver::Bb)]
        solver: Solver,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Write the Cartesian product of two graphs.
    Product {
        g: PathBuf,
        h: PathBuf,
        #[arg(short, long)]
        o: PathBuf,
        /// `auto` writes graph6 when the product fits, an edge list otherwise.
        #[arg(long, value_enum, default_value_t = Format::Auto)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_PRODUCT_CAP)]
        cap: usize,
    },
    /// Exit 0 if the graph is claw-free, 1 otherwise.
    Clawfree { file: PathBuf },
    /// Copy the claw-free graphs of a graph6 stream.
    FilterClawfree { input: PathBuf, output: PathBuf },
    /// Run the labeling pipeline on G □ H with G claw-free.
    Label {
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        dump_trace: Option<PathBuf>,
        /// Weights of a weak {2}-dominating function, one per product vertex
        /// in order g * n(H) + h. Defaults to the solver's optimum.
        #[arg(long)]
        d: Option<PathBuf>,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Check the product inequalities over many graph pairs.
    Sweep {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        keep_going: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        o: PathBuf,
        /// Keep only claw-free G.
        #[arg(long)]
        claw_free: bool,
        /// Comma separated subset of gamma,gamma2,gammak,gammawk.
        #[arg(long, value_delimiter = ',')]
        invariants: Option<Vec<String>>,
        #[arg(long)]
        no_labeling: bool,
        /// Add wall-clock timings to every record (output stops being reproducible).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PRODUCT_CAP)]
        product_cap: usize,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Check gamma = i on all connected claw-free graphs up to order n.
    CheckAllanLaskar {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Flag, then environment, then none.
fn budget(flag: Option<u64>) -> anyhow::Result<Option<Duration>> {
    if let Some(ms) = flag {
        return Ok(Some(Duration::from_millis(ms)));
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => {
            let ms: u64 = v
                .trim()
                .parse()
                .with_context(|| format!("{BUDGET_ENV}={v:?} is not a number of milliseconds"))?;
            Ok(Some(Duration::from_millis(ms)))
        }
        Err(_) => Ok(None),
    }
}

fn solver_config(budget_ms: Option<u64>) -> anyhow::Result<SolverConfig> {
    Ok(SolverConfig {
        time_budget: budget(budget_ms)?,
        ..SolverConfig::default()
    })
}

fn invariant(file: &Path, which: Which, k: u32, solver: Solver, budget_ms: Option<u64>) -> anyhow::Result<u8> {
    let inv = match which {
        Which::Gamma => Invariant::Gamma,
        Which::I => Invariant::IndependentGamma,
        Which::Gamma2 => Invariant::Gamma2,
        Which::Gammak => Invariant::GammaK(k),
        Which::Gammawk => Invariant::GammaWeakK(k),
    };
    let cfg = solver_config(budget_ms)?;
    let graphs = read_graphs(file)?;
    let out = io::stdout();
    let mut out = out.lock();
    for g in &graphs {
        let r = match solver {
            Solver::Bb => domination::solve(g, inv, &cfg)?,
            Solver::Oracle => oracle_brute_force(g, inv, &OracleConfig::default())?,
        };
        if graphs.len() > 1 {
            write!(out, "{}\t", write_graph6(g).unwrap_or_else(|_| format!("n={}", g.order())))?;
        }
        writeln!(out, "{inv} = {}\tcertificate {}\t[{}]", r.value, r.certificate, r.method)?;
    }
    Ok(0)
}

fn product(g: &Path, h: &Path, o: &Path, format: Format, cap: usize) -> anyhow::Result<u8> {
    let p = cartesian_product_capped(&read_graph(g)?, &read_graph(h)?, cap)?;
    let text = match (format, write_graph6(&p.graph)) {
        (Format::Graph6, r) => r? + "\n",
        (Format::Auto, Ok(s)) => s + "\n",
        (Format::Auto, Err(_)) | (Format::Edges, _) => write_edge_list(&p.graph),
    };
    fs::write(o, text).with_context(|| format!("writing {}", o.display()))?;
    Ok(0)
}

fn clawfree(file: &Path) -> anyhow::Result<u8> {
    let g = read_graph(file)?;
    match g.find_claw() {
        None => {
            println!("claw-free");
            Ok(0)
        }
        Some((c, leaves)) => {
            println!("claw: center {c}, leaves {} {} {}", leaves[0], leaves[1], leaves[2]);
            Ok(1)
        }
    }
}

fn filter_clawfree(input: &Path, output: &Path) -> anyhow::Result<u8> {
    let reader = BufReader::new(File::open(input).with_context(|| format!("opening {}", input.display()))?);
    let mut out = BufWriter::new(File::create(output).with_context(|| format!("creating {}", output.display()))?);
    let (mut read, mut kept) = (0usize, 0usize);
    let mut lines = reader.lines();
    let mut pending = Vec::new();
    // an edge list is a single graph; graph6 input is streamed line by line
    if let Some(first) = lines.next() {
        let first = first?;
        if first.split_whitespace().count() == 2 {
            let mut text = first + "\n";
            for l in lines.by_ref() {
                text.push_str(&l?);
                text.push('\n');
            }
            pending = parse_graphs(&text)?;
        } else {
            lines = BufReader::new(File::open(input)?).lines();
        }
    }
    let mut emit = |g: Graph| -> anyhow::Result<()> {
        read += 1;
        if g.is_claw_free() {
            kept += 1;
            writeln!(out, "{}", write_graph6(&g)?)?;
        }
        Ok(())
    };
    for g in pending {
        emit(g)?;
    }
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        emit(parse_graph6(line.strip_prefix(">>graph6<<").unwrap_or(line))?)?;
    }
    out.flush()?;
    eprintln!("{kept} of {read} graphs are claw-free");
    Ok(0)
}

fn read_weights(path: &Path) -> anyhow::Result<WeightFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<u32>().with_context(|| format!("bad weight {t:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(WeightFunction::new(2, values)?)
}

fn label(g: &Path, h: &Path, dump: Option<&Path>, d: Option<&Path>, budget_ms: Option<u64>) -> anyhow::Result<u8> {
    let (g, h) = (read_graph(g)?, read_graph(h)?);
    let cfg = solver_config(budget_ms)?;
    let weights = d.map(read_weights).transpose()?;
    let ctx = build_context_with(&g, &h, weights, DEFAULT_PRODUCT_CAP, &cfg)?;
    let outcome = run_labeling(&ctx, &cfg)?;
    let report = LabelingReport::from(&outcome);
    println!("independent dominating set S of G: {:?}", ctx.s);
    println!("|D| = {}, gamma(H) = {}, k = {}", outcome.d_size, outcome.gamma_h, outcome.k);
    println!(
        "rules 1-4 labeled {:?}; finishing steps {}; two-entry labels {} -> {}",
        outcome.initial_rule_counts,
        outcome.finishing_steps,
        outcome.two_entry_after_initial,
        outcome.two_entry_after_fixpoint
    );
    for c in &outcome.classes {
        match c.witness {
            None => println!("class {}: U = {:?}, dominates H", c.class, c.projection),
            Some(w) => println!("class {}: U = {:?}, misses vertex {w} of H", c.class, c.projection),
        }
    }
    let trace: Vec<String> = match (&outcome.final_state, &outcome.discrepancy) {
        (Some(st), _) => st.trace().iter().map(ToString::to_string).collect(),
        (None, Some(disc)) => disc.trace.iter().map(ToString::to_string).collect(),
        (None, None) => Vec::new(),
    };
    if let Some(path) = dump {
        let mut text = trace.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "|D| = {} >= sum |U_i| = {} >= k gamma(H) = {}: {}",
        outcome.d_size,
        outcome.class_size_sum(),
        outcome.k as u64 * outcome.gamma_h as u64,
        report.status
    );
    Ok(if report.derived_bound_holds { 0 } else { EXIT_FOUND })
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    g: String,
    h: String,
    k: u32,
    keep_going: bool,
    jobs: usize,
    seed: u64,
    o: &Path,
    claw_free: bool,
    invariants: Option<Vec<String>>,
    no_labeling: bool,
    timings: bool,
    csv: Option<&Path>,
    product_cap: usize,
    budget_ms: Option<u64>,
) -> anyhow::Result<u8> {
    let mut cfg = SweepConfig::new(g.parse::<GraphSource>()?, h.parse::<GraphSource>()?);
    cfg.k = k;
    cfg.keep_going = keep_going;
    cfg.jobs = jobs;
    cfg.seed = seed;
    cfg.claw_free_filter = claw_free;
    cfg.labeling = !no_labeling;
    cfg.timings = timings;
    cfg.product_cap = product_cap;
    cfg.time_budget = budget(budget_ms)?;
    if let Some(list) = invariants {
        cfg.invariants = list
            .iter()
            .map(|s| s.parse::<ProductInvariant>())
            .collect::<Result<_, _>>()?;
    }
    let mut out = BufWriter::new(File::create(o).with_context(|| format!("creating {}", o.display()))?);
    let summary = harness::sweep_to_writer(&cfg, &mut out)?;
    out.flush()?;
    if let Some(path) = csv {
        fs::write(path, summary.csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("{summary}");
    if !summary.reconciles() {
        bail!("report counts do not reconcile: {summary:?}");
    }
    Ok(summary.exit_code() as u8)
}

fn check_allan_laskar(n: usize, jobs: usize) -> anyhow::Result<u8> {
    let report = harness::verify_allan_laskar_with(n, jobs)?;
    for o in &report.per_order {
        println!("n={}: {} connected, {} claw-free", o.n, o.connected, o.claw_free);
    }
    println!("checked {} claw-free graphs", report.checked);
    for m in &report.mismatches {
        println!("MISMATCH {}: gamma={} i={}", m.graph, m.gamma, m.independent_gamma);
    }
    for g in &report.neighbor_count_failures {
        println!("NEIGHBOR COUNT FAILURE {g}");
    }
    if report.passed() {
        println!("gamma = i on every checked graph");
        Ok(0)
    } else {
        Ok(EXIT_FOUND)
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Invariant { file, which, k, solver, budget_ms } => invariant(&file, which, k, solver, budget_ms),
        Cmd::Product { g, h, o, format, cap } => product(&g, &h, &o, format, cap),
        Cmd::Clawfree { file } => clawfree(&file),
        Cmd::FilterClawfree { input, output } => filter_clawfree(&input, &output),
        Cmd::Label { g, h, dump_trace, d, budget_ms } => label(&g, &h, dump_trace.as_deref(), d.as_deref(), budget_ms),
        Cmd::Sweep {
            g,
            h,
            k,
            keep_going,
            jobs,
            seed,
            o,
            claw_free,
            invariants,
            no_labeling,
            timings,
            csv,
            product_cap,
            budget_ms,
        } => sweep(
            g,
            h,
            k,
            keep_going,
            jobs,
            seed,
            &o,
            claw_free,
            invariants,
            no_labeling,
            timings,
            csv.as_deref(),
            product_cap,
            budget_ms,
        ),
        Cmd::CheckAllanLaskar { n, jobs } => check_allan_laskar(n, jobs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let limit = e.downcast_ref::<Error>().is_some_and(Error::is_resource_limit);
            ExitCode::from(if limit { EXIT_LIMIT } else { 1 })
        }
    }
}
