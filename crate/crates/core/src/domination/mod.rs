//! Domination-type invariants: feasibility predicates, an exact
//! branch-and-bound solver and an exhaustive oracle.
//!
//! Five invariants are supported: the domination number, the independent
//! domination number, the 2-domination number, the `{k}`-domination number
//! and the weak `{k}`-domination number. Every solver returns a certificate
//! that is re-checked against its predicate before it leaves this module.
//!
//! Among optimal certificates the lexicographically least one is returned:
//! for vertex sets this compares sorted member lists, for weight functions
//! it compares the value vectors `(f(0), f(1), ...)`. The oracle and the
//! branch-and-bound solver therefore agree on certificates, not only values.

mod oracle;
mod search;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub use oracle::{oracle_brute_force, OracleConfig, DEFAULT_ORACLE_BUDGET, ORACLE_SET_MAX_ORDER};

/// Default cap on the order of graphs handed to the exact solver.
pub const DEFAULT_SOLVER_CAP: usize = 4096;

/// A function `V(G) -> {0..k}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightFunction {
    k: u32,
    values: Vec<u32>,
}

impl WeightFunction {
    pub fn new(k: u32, values: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        if let Some((v, &x)) = values.iter().enumerate().find(|(_, &x)| x > k) {
            return Err(Error::Domain(format!("value {x} at vertex {v} exceeds k = {k}")));
        }
        Ok(Self { k, values })
    }

    pub fn zeros(k: u32, n: usize) -> Result<Self> {
        Self::new(k, vec![0; n])
    }

    /// `k` times the indicator of `s`.
    pub fn scaled_indicator(k: u32, s: &VertexSet) -> Result<Self> {
        Self::new(k, (0..s.universe()).map(|v| if s.contains(v) { k } else { 0 }).collect())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, v: usize) -> u32 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.values.iter().sum()
    }

    /// Vertices with a positive value.
    pub fn support(&self) -> VertexSet {
        let mut s = VertexSet::empty(self.values.len());
        for (v, &x) in self.values.iter().enumerate() {
            if x > 0 {
                s.insert(v);
            }
        }
        s
    }

    /// Sum of the values over `N[v]`.
    pub fn closed_sum(&self, g: &Graph, v: usize) -> u32 {
        self.values[v] + g.neighbors(v).iter().map(|&u| self.values[u]).sum::<u32>()
    }
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction(k={}, {:?})", self.k, self.values)
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn is_dominating(g: &Graph, s: &VertexSet) -> bool {
    (0..g.order()).all(|v| s.contains(v) || g.row(v).intersects(s))
}

pub fn is_2_dominating(g: &Graph, s: &VertexSet) -> bool {
    (0..g.order()).all(|v| s.contains(v) || g.row(v).intersection_len(s) >= 2)
}

pub fn is_independent_dominating(g: &Graph, s: &VertexSet) -> bool {
    g.is_independent(s) && is_dominating(g, s)
}

/// Every closed neighborhood carries weight at least `k`.
pub fn is_k_dominating_fn(g: &Graph, f: &WeightFunction) -> bool {
    f.len() == g.order() && (0..g.order()).all(|v| f.closed_sum(g, v) >= f.k())
}

/// Every vertex with value 0 sees weight at least `k` in its closed neighborhood.
pub fn is_weak_k_dominating_fn(g: &Graph, f: &WeightFunction) -> bool {
    f.len() == g.order() && (0..g.order()).all(|v| f.value(v) > 0 || f.closed_sum(g, v) >= f.k())
}

/// Which invariant to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "invariant", content = "k")]
pub enum Invariant {
    Gamma,
    IndependentGamma,
    Gamma2,
    GammaK(u32),
    GammaWeakK(u32),
}

impl Invariant {
    pub fn is_function(self) -> bool {
        matches!(self, Invariant::GammaK(_) | Invariant::GammaWeakK(_))
    }

    fn validate(self) -> Result<()> {
        match self {
            Invariant::GammaK(0) | Invariant::GammaWeakK(0) => {
                Err(Error::Domain("k must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn all(k: u32) -> [Invariant; 5] {
        [
            Invariant::Gamma,
            Invariant::IndependentGamma,
            Invariant::Gamma2,
            Invariant::GammaK(k),
            Invariant::GammaWeakK(k),
        ]
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::Gamma => write!(f, "gamma"),
            Invariant::IndependentGamma => write!(f, "i"),
            Invariant::Gamma2 => write!(f, "gamma_2"),
            Invariant::GammaK(k) => write!(f, "gamma_{{{k}}}"),
            Invariant::GammaWeakK(k) => write!(f, "gamma_w{{{k}}}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BranchAndBound,
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::BranchAndBound => "branch-and-bound",
            Method::BruteForce => "brute-force",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Set(VertexSet),
    Function(WeightFunction),
}

impl Certificate {
    pub fn as_set(&self) -> Option<&VertexSet> {
        match self {
            Certificate::Set(s) => Some(s),
            Certificate::Function(_) => None,
        }
    }

    pub fn as_function(&self) -> Option<&WeightFunction> {
        match self {
            Certificate::Function(f) => Some(f),
            Certificate::Set(_) => None,
        }
    }

    pub fn cost(&self) -> u32 {
        match self {
            Certificate::Set(s) => s.len() as u32,
            Certificate::Function(f) => f.weight(),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Set(s) => write!(f, "{s}"),
            Certificate::Function(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantResult {
    pub invariant: Invariant,
    pub value: u32,
    pub certificate: Certificate,
    pub method: Method,
}

/// Checks that `cert` is feasible for `inv` on `g`.
pub fn certificate_is_feasible(g: &Graph, inv: Invariant, cert: &Certificate) -> bool {
    match (inv, cert) {
        (Invariant::Gamma, Certificate::Set(s)) => is_dominating(g, s),
        (Invariant::IndependentGamma, Certificate::Set(s)) => is_independent_dominating(g, s),
        (Invariant::Gamma2, Certificate::Set(s)) => is_2_dominating(g, s),
        (Invariant::GammaK(k), Certificate::Function(f)) => f.k() == k && is_k_dominating_fn(g, f),
        (Invariant::GammaWeakK(k), Certificate::Function(f)) => {
            f.k() == k && is_weak_k_dominating_fn(g, f)
        }
        _ => false,
    }
}

impl InvariantResult {
    fn checked(g: &Graph, invariant: Invariant, certificate: Certificate, method: Method) -> Result<Self> {
        if !certificate_is_feasible(g, invariant, &certificate) {
            return Err(Error::Internal(format!(
                "{method} certificate {certificate} for {invariant} is infeasible"
            )));
        }
        Ok(Self {
            invariant,
            value: certificate.cost(),
            certificate,
            method,
        })
    }
}

/// Limits for the branch-and-bound solver.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub vertex_cap: usize,
    /// Wall-clock allowance for each solver call.
    pub time_budget: Option<Duration>,
    /// Absolute cut-off shared by several calls, e.g. one sweep instance.
    pub deadline: Option<Instant>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            vertex_cap: DEFAULT_SOLVER_CAP,
            time_budget: None,
            deadline: None,
        }
    }
}

impl SolverConfig {
    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub(crate) fn cutoff(&self) -> Option<(Instant, u64)> {
        let now = Instant::now();
        let per_call = self.time_budget.map(|b| (now + b, b.as_millis() as u64));
        let shared = self
            .deadline
            .map(|d| (d, d.saturating_duration_since(now).as_millis() as u64));
        match (per_call, shared) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        }
    }
}

/// Exact value of `inv` on `g` by branch and bound.
pub fn solve(g: &Graph, inv: Invariant, cfg: &SolverConfig) -> Result<InvariantResult> {
    inv.validate()?;
    if g.order() > cfg.vertex_cap {
        return Err(Error::Size(format!(
            "graph order {} exceeds solver cap {}",
            g.order(),
            cfg.vertex_cap
        )));
    }
    let values = search::minimize(g, inv, cfg.cutoff())?;
    let certificate = match inv {
        Invariant::GammaK(k) | Invariant::GammaWeakK(k) => {
            Certificate::Function(WeightFunction::new(k, values)?)
        }
        _ => Certificate::Set(VertexSet::from_members(
            g.order(),
            values.iter().enumerate().filter(|(_, &x)| x > 0).map(|(v, _)| v),
        )?),
    };
    InvariantResult::checked(g, inv, certificate, Method::BranchAndBound)
}

pub fn gamma(g: &Graph) -> Result<InvariantResult> {
    solve(g, Invariant::Gamma, &SolverConfig::default())
}

/// `i(G)`.
pub fn independent_gamma(g: &Graph) -> Result<InvariantResult> {
    solve(g, Invariant::IndependentGamma, &SolverConfig::default())
}

pub fn gamma2(g: &Graph) -> Result<InvariantResult> {
    solve(g, Invariant::Gamma2, &SolverConfig::default())
}

pub fn gamma_k(g: &Graph, k: u32) -> Result<InvariantResult> {
    solve(g, Invariant::GammaK(k), &SolverConfig::default())
}

pub fn gamma_weak_k(g: &Graph, k: u32) -> Result<InvariantResult> {
    solve(g, Invariant::GammaWeakK(k), &SolverConfig::default())
}
