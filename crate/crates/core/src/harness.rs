//! Batch verification over graph pairs with JSON-lines reporting.
//!
//! Instances run independently (in parallel with the `parallel` feature) and
//! their reports are merged back in instance order, so the output bytes
//! depend only on the configuration and seed, never on the worker count.
//! Timings are left out of the report unless explicitly requested, since
//! they would break that guarantee.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::domination::{self, Invariant, InvariantResult, Method, SolverConfig, WeightFunction};
use crate::enumerate::{enumerate_small_graphs, random_graphs, MAX_ENUM_ORDER};
use crate::error::{Error, Result};
use crate::graph::{cartesian_product_capped, Graph, DEFAULT_PRODUCT_CAP};
use crate::io::{parse_graph6, read_graphs, write_graph6};
use crate::labeling::{build_context_with, run_labeling, LabelingOutcome};

/// Environment variable overriding the per-instance time budget, in ms.
pub const BUDGET_ENV: &str = "DOMLAB_BUDGET_MS";

/// Where a sweep draws its graphs from.
///
/// Text forms: `connected:N` or `connected:A-B` (all connected graphs of
/// those orders), `all:N` / `all:A-B`, `random:COUNT:A-B:P` or
/// `random:COUNT:A-B:P1-P2` (seeded Erdős–Rényi), `cycle:N`, `path:N`,
/// `complete:N`, `star:N`, `empty:N`, `petersen`, `g6:STRING`, and
/// `file:PATH` or a bare path.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    Enumerated { n_min: usize, n_max: usize, connected: bool },
    Random { count: usize, n_min: usize, n_max: usize, p_min: f64, p_max: f64 },
    Single(Graph),
    File(PathBuf),
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad order range {s:?}"));
    match s.split_once('-') {
        Some((a, b)) => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        None => Ok((1, s.parse().map_err(|_| bad())?)),
    }
}

fn parse_order(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("bad order {s:?}")))
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let source = match kind {
            "connected" | "all" => {
                let (n_min, n_max) = parse_range(rest)?;
                GraphSource::Enumerated {
                    n_min,
                    n_max,
                    connected: kind == "connected",
                }
            }
            "random" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [count, orders, probs] = parts.as_slice() else {
                    return Err(Error::Parse(format!("random source needs COUNT:A-B:P, got {spec:?}")));
                };
                let count = count
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad count in {spec:?}")))?;
                let (n_min, n_max) = parse_range(orders)?;
                let prob = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad probability in {spec:?}")));
                let (p_min, p_max) = match probs.split_once('-') {
                    Some((a, b)) => (prob(a)?, prob(b)?),
                    None => (prob(probs)?, prob(probs)?),
                };
                GraphSource::Random { count, n_min, n_max, p_min, p_max }
            }
            "cycle" => GraphSource::Single(Graph::cycle(parse_order(rest)?)?),
            "path" => GraphSource::Single(Graph::path(parse_order(rest)?)?),
            "complete" => GraphSource::Single(Graph::complete(parse_order(rest)?)?),
            "star" => GraphSource::Single(Graph::star(parse_order(rest)?)?),
            "empty" => GraphSource::Single(Graph::empty(parse_order(rest)?)?),
            "petersen" => GraphSource::Single(Graph::petersen()),
            "g6" => GraphSource::Single(parse_graph6(rest)?),
            "file" => GraphSource::File(PathBuf::from(rest)),
            _ => GraphSource::File(PathBuf::from(spec)),
        };
        Ok(source)
    }
}

impl GraphSource {
    pub fn load(&self, seed: u64) -> Result<Vec<Graph>> {
        match self {
            GraphSource::Enumerated { n_min, n_max, connected } => {
                if *n_max > MAX_ENUM_ORDER {
                    return Err(Error::Size(format!(
                        "internal enumeration stops at n = {MAX_ENUM_ORDER}; supply a graph6 file"
                    )));
                }
                let mut out = Vec::new();
                for n in (*n_min).max(1)..=*n_max {
                    out.extend(enumerate_small_graphs(n, *connected)?);
                }
                Ok(out)
            }
            GraphSource::Random { count, n_min, n_max, p_min, p_max } => {
                random_graphs(*count, *n_min, *n_max, *p_min, *p_max, seed)
            }
            GraphSource::Single(g) => Ok(vec![g.clone()]),
            GraphSource::File(p) => read_graphs(p),
        }
    }
}

/// A product invariant a sweep can compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductInvariant {
    Gamma,
    Gamma2,
    GammaK,
    GammaWeakK,
}

impl ProductInvariant {
    pub const ALL: [ProductInvariant; 4] = [
        ProductInvariant::Gamma,
        ProductInvariant::Gamma2,
        ProductInvariant::GammaK,
        ProductInvariant::GammaWeakK,
    ];

    fn invariant(self, k: u32) -> Invariant {
        match self {
            ProductInvariant::Gamma => Invariant::Gamma,
            ProductInvariant::Gamma2 => Invariant::Gamma2,
            ProductInvariant::GammaK => Invariant::GammaK(k),
            ProductInvariant::GammaWeakK => Invariant::GammaWeakK(k),
        }
    }

    /// Check name for `value(G □ H) >= gamma(G) gamma(H)`.
    fn check_name(self) -> &'static str {
        match self {
            ProductInvariant::Gamma => "gamma",
            ProductInvariant::Gamma2 => "gamma_2",
            ProductInvariant::GammaK => "gamma_k",
            ProductInvariant::GammaWeakK => "gamma_weak_k",
        }
    }
}

impl FromStr for ProductInvariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gamma" => Ok(ProductInvariant::Gamma),
            "gamma2" => Ok(ProductInvariant::Gamma2),
            "gammak" | "gamma_k" => Ok(ProductInvariant::GammaK),
            "gammawk" | "gamma_weak_k" => Ok(ProductInvariant::GammaWeakK),
            other => Err(Error::Parse(format!("unknown invariant {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub source_g: GraphSource,
    pub source_h: GraphSource,
    /// Keep only claw-free `G`.
    pub claw_free_filter: bool,
    pub invariants: Vec<ProductInvariant>,
    pub k: u32,
    pub seed: u64,
    pub jobs: usize,
    pub time_budget: Option<Duration>,
    pub product_cap: usize,
    pub keep_going: bool,
    /// Run the labeling pipeline for claw-free `G`.
    pub labeling: bool,
    /// Include wall-clock timings in reports (makes output nondeterministic).
    pub timings: bool,
}

impl SweepConfig {
    pub fn new(source_g: GraphSource, source_h: GraphSource) -> Self {
        Self {
            source_g,
            source_h,
            claw_free_filter: false,
            invariants: ProductInvariant::ALL.to_vec(),
            k: 2,
            seed: 0,
            jobs: 1,
            time_budget: None,
            product_cap: DEFAULT_PRODUCT_CAP,
            keep_going: false,
            labeling: true,
            timings: false,
        }
    }

    /// Applies `DOMLAB_BUDGET_MS` when set.
    pub fn with_env_budget(mut self) -> Result<Self> {
        if let Ok(ms) = std::env::var(BUDGET_ENV) {
            let ms: u64 = ms
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{BUDGET_ENV}={ms:?} is not a number of milliseconds")))?;
            self.time_budget = Some(Duration::from_millis(ms));
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Domain("parallelism must be at least 1".into()));
        }
        if self.product_cap == 0 || self.time_budget.is_some_and(|b| b.is_zero()) {
            return Err(Error::Domain("caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValueReport {
    pub value: u32,
    pub method: Method,
}

impl From<&InvariantResult> for ValueReport {
    fn from(r: &InvariantResult) -> Self {
        Self {
            value: r.value,
            method: r.method,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProductValues {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ValueReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_2: Option<ValueReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_k: Option<ValueReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_weak_k: Option<ValueReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub two_entry_after_fixpoint: usize,
    pub failing_class: Option<u16>,
    pub witness: Option<usize>,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelingReport {
    pub status: &'static str,
    pub k: usize,
    pub d_size: usize,
    pub gamma_h: u32,
    pub initial_rules: [usize; 4],
    pub finishing_steps: usize,
    pub two_entry_after_initial: usize,
    pub two_entry_after_fixpoint: usize,
    pub assignments_tried: u64,
    pub rule10_moves: usize,
    pub class_sizes: Vec<usize>,
    pub derived_bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<DiscrepancyReport>,
}

impl From<&LabelingOutcome> for LabelingReport {
    fn from(o: &LabelingOutcome) -> Self {
        Self {
            status: if o.derived_bound_holds() { "passed" } else { "discrepancy" },
            k: o.k,
            d_size: o.d_size,
            gamma_h: o.gamma_h,
            initial_rules: o.initial_rule_counts,
            finishing_steps: o.finishing_steps,
            two_entry_after_initial: o.two_entry_after_initial,
            two_entry_after_fixpoint: o.two_entry_after_fixpoint,
            assignments_tried: o.assignments_tried,
            rule10_moves: o.rule10_moves,
            class_sizes: o.classes.iter().map(|c| c.projection.len()).collect(),
            derived_bound_holds: o.derived_bound_holds(),
            discrepancy: o.discrepancy.as_ref().map(|d| DiscrepancyReport {
                two_entry_after_fixpoint: d.two_entry_after_fixpoint,
                failing_class: d.failing_class.map(|(c, _)| c),
                witness: d.failing_class.map(|(_, w)| w),
                trace: d.trace.iter().map(ToString::to_string).collect(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violation,
    Discrepancy,
    Skipped,
    Error,
}

impl Status {
    pub fn is_alarm(self) -> bool {
        matches!(self, Status::Violation | Status::Discrepancy | Status::Error)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub g: String,
    pub h: String,
    pub status: Status,
    pub severity: &'static str,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_claw_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_g: Option<ValueReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_h: Option<ValueReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductValues>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labeling: Option<LabelingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl InstanceReport {
    fn blank(index: usize, g: &Graph, h: &Graph, k: u32) -> Self {
        Self {
            index,
            g: write_graph6(g).unwrap_or_else(|_| format!("n={}", g.order())),
            h: write_graph6(h).unwrap_or_else(|_| format!("n={}", h.order())),
            status: Status::Ok,
            severity: "info",
            k,
            g_claw_free: None,
            gamma_g: None,
            gamma_h: None,
            bound: None,
            product: None,
            checks: Vec::new(),
            labeling: None,
            reason: None,
            timing_ms: None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Computes every configured quantity for one pair.
pub fn run_instance(index: usize, g: &Graph, h: &Graph, cfg: &SweepConfig) -> InstanceReport {
    let start = Instant::now();
    let mut rep = InstanceReport::blank(index, g, h, cfg.k);
    let solver = SolverConfig {
        deadline: cfg.time_budget.map(|b| start + b),
        ..SolverConfig::default()
    };
    if let Err(e) = fill_instance(&mut rep, g, h, cfg, &solver) {
        rep.status = if e.is_resource_limit() { Status::Skipped } else { Status::Error };
        rep.reason = Some(match (&e, cfg.time_budget) {
            (Error::Budget(_), Some(b)) => format!("per-instance time budget of {} ms exhausted", b.as_millis()),
            _ => e.to_string(),
        });
    }
    if rep.status.is_alarm() {
        rep.severity = "critical";
    }
    if cfg.timings {
        rep.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    rep
}

fn fill_instance(
    rep: &mut InstanceReport,
    g: &Graph,
    h: &Graph,
    cfg: &SweepConfig,
    solver: &SolverConfig,
) -> Result<()> {
    let claw_free = g.is_claw_free();
    rep.g_claw_free = Some(claw_free);
    let gamma_g = domination::solve(g, Invariant::Gamma, solver)?;
    let gamma_h = domination::solve(h, Invariant::Gamma, solver)?;
    rep.gamma_g = Some((&gamma_g).into());
    rep.gamma_h = Some((&gamma_h).into());
    let bound = gamma_g.value as u64 * gamma_h.value as u64;
    rep.bound = Some(bound);

    let product = cartesian_product_capped(g, h, cfg.product_cap)?;
    let mut values = ProductValues::default();
    let mut weak_two: Option<WeightFunction> = None;
    let mut weak_two_value = None;
    for &pi in &cfg.invariants {
        let r = domination::solve(&product.graph, pi.invariant(cfg.k), solver)?;
        let slot = match pi {
            ProductInvariant::Gamma => &mut values.gamma,
            ProductInvariant::Gamma2 => &mut values.gamma_2,
            ProductInvariant::GammaK => &mut values.gamma_k,
            ProductInvariant::GammaWeakK => &mut values.gamma_weak_k,
        };
        *slot = Some((&r).into());
        if pi == ProductInvariant::GammaWeakK && cfg.k == 2 {
            weak_two = r.certificate.as_function().cloned();
            weak_two_value = Some(r.value);
        }
        rep.checks.push(Check {
            name: pi.check_name().to_string(),
            lhs: r.value as u64,
            rhs: bound,
            holds: r.value as u64 >= bound,
        });
    }
    rep.product = Some(values);
    if rep.checks.iter().any(|c| !c.holds) {
        rep.status = Status::Violation;
    }

    if claw_free && cfg.labeling {
        let ctx = build_context_with(g, h, weak_two, cfg.product_cap, solver)?;
        let outcome = run_labeling(&ctx, solver)?;
        let lrep = LabelingReport::from(&outcome);
        rep.checks.push(Check {
            name: "labeling_bound".into(),
            lhs: outcome.d_size as u64,
            rhs: bound,
            holds: lrep.derived_bound_holds,
        });
        // the labeled multiset must be the solver's optimum and agree with it
        let solver_value = match weak_two_value {
            Some(v) => v,
            None => domination::solve(&product.graph, Invariant::GammaWeakK(2), solver)?.value,
        };
        rep.checks.push(Check {
            name: "labeling_consistent".into(),
            lhs: outcome.d_size as u64,
            rhs: solver_value as u64,
            holds: outcome.d_size as u32 == solver_value
                && lrep.derived_bound_holds == (solver_value as u64 >= bound),
        });
        if !lrep.derived_bound_holds || outcome.discrepancy.is_some() {
            rep.status = Status::Discrepancy;
        } else if rep.checks.iter().any(|c| !c.holds) {
            rep.status = Status::Violation;
        }
        rep.labeling = Some(lrep);
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub g_graphs: usize,
    pub h_graphs: usize,
    pub pairs: usize,
    pub processed: usize,
    pub reported: usize,
    pub skipped: usize,
    pub violations: usize,
    pub discrepancies: usize,
    pub errors: usize,
    pub halted: bool,
}

impl SweepSummary {
    /// 0 clean, 2 violation or discrepancy, 3 budget or size problems.
    pub fn exit_code(&self) -> i32 {
        if self.violations + self.discrepancies + self.errors > 0 {
            2
        } else if self.skipped > 0 {
            3
        } else {
            0
        }
    }

    /// Every enumerated pair is accounted for.
    pub fn reconciles(&self) -> bool {
        self.processed == self.reported + self.skipped && (self.halted || self.processed == self.pairs)
    }

    pub fn csv(&self) -> String {
        format!(
            "g_graphs,h_graphs,pairs,processed,reported,skipped,violations,discrepancies,errors,halted\n\
             {},{},{},{},{},{},{},{},{},{}\n",
            self.g_graphs,
            self.h_graphs,
            self.pairs,
            self.processed,
            self.reported,
            self.skipped,
            self.violations,
            self.discrepancies,
            self.errors,
            self.halted
        )
    }

    fn record(&mut self, r: &InstanceReport) {
        self.processed += 1;
        match r.status {
            Status::Skipped => self.skipped += 1,
            s => {
                self.reported += 1;
                match s {
                    Status::Violation => self.violations += 1,
                    Status::Discrepancy => self.discrepancies += 1,
                    Status::Error => self.errors += 1,
                    _ => {}
                }
            }
        }
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pairs ({} x {}): {} reported, {} skipped, {} violations, {} discrepancies, {} errors{}",
            self.pairs,
            self.g_graphs,
            self.h_graphs,
            self.reported,
            self.skipped,
            self.violations,
            self.discrepancies,
            self.errors,
            if self.halted { " (halted)" } else { "" }
        )
    }
}

fn map_chunk(chunk: &[(usize, usize, usize)], gs: &[Graph], hs: &[Graph], cfg: &SweepConfig, pool: &Pool) -> Vec<InstanceReport> {
    let run = |&(idx, gi, hi): &(usize, usize, usize)| run_instance(idx, &gs[gi], &hs[hi], cfg);
    match pool {
        #[cfg(feature = "parallel")]
        Pool::Rayon(pool) => {
            use rayon::prelude::*;
            pool.install(|| chunk.par_iter().map(run).collect())
        }
        Pool::Sequential => chunk.iter().map(run).collect(),
    }
}

enum Pool {
    #[cfg(feature = "parallel")]
    Rayon(rayon::ThreadPool),
    Sequential,
}

impl Pool {
    fn new(jobs: usize) -> Result<Self> {
        #[cfg(feature = "parallel")]
        if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            return Ok(Pool::Rayon(pool));
        }
        let _ = jobs;
        Ok(Pool::Sequential)
    }
}

/// Runs the sweep, handing each report to `sink` in instance order.
///
/// Unless `keep_going` is set, the sweep stops right after the first report
/// carrying a violation, discrepancy or error.
pub fn sweep_with(cfg: &SweepConfig, mut sink: impl FnMut(&InstanceReport) -> Result<()>) -> Result<SweepSummary> {
    cfg.validate()?;
    let mut gs = cfg.source_g.load(cfg.seed)?;
    if cfg.claw_free_filter {
        gs.retain(Graph::is_claw_free);
    }
    let hs = cfg.source_h.load(cfg.seed.wrapping_add(1))?;
    let pairs: Vec<(usize, usize, usize)> = (0..gs.len())
        .flat_map(|gi| (0..hs.len()).map(move |hi| (gi, hi)))
        .enumerate()
        .map(|(idx, (gi, hi))| (idx, gi, hi))
        .collect();
    let mut summary = SweepSummary {
        g_graphs: gs.len(),
        h_graphs: hs.len(),
        pairs: pairs.len(),
        ..SweepSummary::default()
    };
    let pool = Pool::new(cfg.jobs)?;
    let chunk = (cfg.jobs * 16).max(64);
    for block in pairs.chunks(chunk) {
        for rep in map_chunk(block, &gs, &hs, cfg, &pool) {
            summary.record(&rep);
            sink(&rep)?;
            if rep.status.is_alarm() && !cfg.keep_going {
                summary.halted = true;
                return Ok(summary);
            }
        }
    }
    Ok(summary)
}

/// Runs the sweep and writes one JSON object per line to `out`.
pub fn sweep_to_writer(cfg: &SweepConfig, out: &mut impl Write) -> Result<SweepSummary> {
    sweep_with(cfg, |r| {
        writeln!(out, "{}", r.to_json_line())?;
        Ok(())
    })
}

/// Collects all reports in memory.
pub fn sweep(cfg: &SweepConfig) -> Result<(Vec<InstanceReport>, SweepSummary)> {
    let mut reports = Vec::new();
    let summary = sweep_with(cfg, |r| {
        reports.push(r.clone());
        Ok(())
    })?;
    Ok((reports, summary))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OrderCount {
    pub n: usize,
    pub connected: usize,
    pub claw_free: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub graph: String,
    pub gamma: u32,
    pub independent_gamma: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AllanLaskarReport {
    pub per_order: Vec<OrderCount>,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    /// Graphs whose minimum independent dominating set leaves some vertex
    /// with zero or more than two neighbors in the set.
    pub neighbor_count_failures: Vec<String>,
}

impl AllanLaskarReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.neighbor_count_failures.is_empty()
    }
}

/// Checks `gamma = i` on every connected claw-free graph of order up to
/// `n_max`, and that the independent certificate gives every outside vertex
/// one or two neighbors in the set.
pub fn verify_allan_laskar(n_max: usize) -> Result<AllanLaskarReport> {
    verify_allan_laskar_with(n_max, 1)
}

pub fn verify_allan_laskar_with(n_max: usize, jobs: usize) -> Result<AllanLaskarReport> {
    if n_max > MAX_ENUM_ORDER {
        return Err(Error::Size(format!(
            "internal enumeration stops at n = {MAX_ENUM_ORDER}, got {n_max}"
        )));
    }
    let mut report = AllanLaskarReport::default();
    let pool = Pool::new(jobs)?;
    for n in 1..=n_max {
        let graphs: Vec<Graph> = enumerate_small_graphs(n, true)?;
        let claw_free: Vec<Graph> = graphs.iter().filter(|g| g.is_claw_free()).cloned().collect();
        report.per_order.push(OrderCount {
            n,
            connected: graphs.len(),
            claw_free: claw_free.len(),
        });
        let check = |g: &Graph| -> Result<(Option<Mismatch>, bool)> {
            let gamma = domination::gamma(g)?;
            let indep = domination::independent_gamma(g)?;
            let s = indep
                .certificate
                .as_set()
                .ok_or_else(|| Error::Internal("set certificate expected".into()))?;
            let obs_ok = (0..g.order())
                .filter(|&v| !s.contains(v))
                .all(|v| (1..=2).contains(&g.row(v).intersection_len(s)));
            let mismatch = (gamma.value != indep.value).then(|| Mismatch {
                graph: write_graph6(g).unwrap_or_default(),
                gamma: gamma.value,
                independent_gamma: indep.value,
            });
            Ok((mismatch, obs_ok))
        };
        let results: Vec<Result<(Option<Mismatch>, bool)>> = match &pool {
            #[cfg(feature = "parallel")]
            Pool::Rayon(p) => {
                use rayon::prelude::*;
                p.install(|| claw_free.par_iter().map(check).collect())
            }
            Pool::Sequential => claw_free.iter().map(check).collect(),
        };
        for (g, r) in claw_free.iter().zip(results) {
            let (mismatch, obs_ok) = r?;
            report.checked += 1;
            report.mismatches.extend(mismatch);
            if !obs_ok {
                report.neighbor_count_failures.push(write_graph6(g).unwrap_or_default());
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_specs() {
        assert_eq!(
            "connected:5".parse::<GraphSource>().unwrap(),
            GraphSource::Enumerated { n_min: 1, n_max: 5, connected: true }
        );
        assert_eq!(
            "all:2-4".parse::<GraphSource>().unwrap(),
            GraphSource::Enumerated { n_min: 2, n_max: 4, connected: false }
        );
        assert_eq!(
            "random:10:1-12:0.5".parse::<GraphSource>().unwrap(),
            GraphSource::Random { count: 10, n_min: 1, n_max: 12, p_min: 0.5, p_max: 0.5 }
        );
        assert_eq!(
            "cycle:4".parse::<GraphSource>().unwrap(),
            GraphSource::Single(Graph::cycle(4).unwrap())
        );
        assert_eq!(
            "g6:A_".parse::<GraphSource>().unwrap(),
            GraphSource::Single(Graph::complete(2).unwrap())
        );
        assert_eq!(
            "graphs.g6".parse::<GraphSource>().unwrap(),
            GraphSource::File(PathBuf::from("graphs.g6"))
        );
        assert!("random:10:1-12".parse::<GraphSource>().is_err());
        assert!("connected:x".parse::<GraphSource>().is_err());
        assert!(GraphSource::Enumerated { n_min: 1, n_max: 9, connected: true }.load(0).is_err());
    }

    #[test]
    fn c4_times_k2_instance() {
        let cfg = SweepConfig::new("cycle:4".parse().unwrap(), "complete:2".parse().unwrap());
        let rep = run_instance(0, &Graph::cycle(4).unwrap(), &Graph::complete(2).unwrap(), &cfg);
        assert_eq!(rep.status, Status::Ok);
        assert_eq!(rep.gamma_g.unwrap().value, 2);
        assert_eq!(rep.gamma_h.unwrap().value, 1);
        let w = rep.product.as_ref().unwrap().gamma_weak_k.unwrap();
        assert!(w.value >= 2);
        assert_eq!(w.method, Method::BranchAndBound);
        assert!(rep.checks.iter().all(|c| c.holds));
        assert_eq!(rep.labeling.as_ref().unwrap().status, "passed");
        assert!(rep.timing_ms.is_none());
    }

    #[test]
    fn non_claw_free_graphs_skip_labeling() {
        let cfg = SweepConfig::new("star:3".parse().unwrap(), "complete:2".parse().unwrap());
        let rep = run_instance(0, &Graph::star(3).unwrap(), &Graph::complete(2).unwrap(), &cfg);
        assert_eq!(rep.g_claw_free, Some(false));
        assert!(rep.labeling.is_none());
        assert_eq!(rep.status, Status::Ok);
    }

    #[test]
    fn oversized_products_are_skipped_not_dropped() {
        let mut cfg = SweepConfig::new("cycle:5".parse().unwrap(), "all:1-2".parse().unwrap());
        cfg.product_cap = 6;
        let (reports, summary) = sweep(&cfg).unwrap();
        assert_eq!(summary.pairs, 3);
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].status, Status::Ok);
        assert!(reports[1..].iter().all(|r| r.status == Status::Skipped && r.reason.is_some()));
        assert!(summary.reconciles());
        assert_eq!(summary.exit_code(), 3);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SweepConfig::new("cycle:4".parse().unwrap(), "complete:2".parse().unwrap());
        cfg.k = 0;
        assert!(sweep(&cfg).is_err());
        cfg.k = 2;
        cfg.jobs = 0;
        assert!(sweep(&cfg).is_err());
    }

    #[test]
    fn allan_laskar_small() {
        let r = verify_allan_laskar(5).unwrap();
        assert!(r.passed());
        assert_eq!(r.per_order.iter().map(|o| o.connected).collect::<Vec<_>>(), vec![1, 1, 2, 6, 21]);
        // K_{1,3} is the only connected graph on 4 vertices that is not claw-free
        assert_eq!(r.per_order[3].claw_free, 5);
        assert!(verify_allan_laskar(9).is_err());
    }
}
