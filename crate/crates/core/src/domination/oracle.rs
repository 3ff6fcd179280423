//! Exhaustive enumeration, used as ground truth for the branch-and-bound
//! solver. Deliberately shares nothing with `search` beyond the predicates.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

use super::{Certificate, Invariant, InvariantResult, Method, WeightFunction};

/// Largest order accepted for set invariants.
pub const ORACLE_SET_MAX_ORDER: usize = 24;
/// Default cap on `(k+1)^n` for function invariants.
pub const DEFAULT_ORACLE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub function_budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            function_budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

/// Ground-truth value of `inv` by brute force.
///
/// Sets are enumerated by size, each size in lexicographic order of sorted
/// members; functions are enumerated in lexicographic order of the value
/// vector. The first optimum met is returned.
pub fn oracle_brute_force(g: &Graph, inv: Invariant, cfg: &OracleConfig) -> Result<InvariantResult> {
    let n = g.order();
    let certificate = match inv {
        Invariant::GammaK(k) | Invariant::GammaWeakK(k) => {
            if k == 0 {
                return Err(Error::Domain("k must be at least 1".into()));
            }
            let total = (k as u64 + 1)
                .checked_pow(n as u32)
                .filter(|&t| t <= cfg.function_budget)
                .ok_or_else(|| {
                    Error::Size(format!(
                        "oracle needs {}^{n} assignments, budget is {}",
                        k + 1,
                        cfg.function_budget
                    ))
                })?;
            let weak = matches!(inv, Invariant::GammaWeakK(_));
            Certificate::Function(best_function(g, k, weak, total)?)
        }
        _ => {
            if n > ORACLE_SET_MAX_ORDER {
                return Err(Error::Size(format!(
                    "oracle handles at most {ORACLE_SET_MAX_ORDER} vertices for set invariants, got {n}"
                )));
            }
            Certificate::Set(best_set(g, inv)?)
        }
    };
    InvariantResult::checked(g, inv, certificate, Method::BruteForce)
}

fn set_ok(g: &Graph, inv: Invariant, s: &VertexSet) -> bool {
    match inv {
        Invariant::Gamma => super::is_dominating(g, s),
        Invariant::IndependentGamma => super::is_independent_dominating(g, s),
        Invariant::Gamma2 => super::is_2_dominating(g, s),
        _ => unreachable!("function invariant in set oracle"),
    }
}

fn best_set(g: &Graph, inv: Invariant) -> Result<VertexSet> {
    let n = g.order();
    for size in 0..=n {
        // combinations of `size` members in lexicographic order
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let s = VertexSet::from_members(n, idx.iter().copied())?;
            if set_ok(g, inv, &s) {
                return Ok(s);
            }
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < n - size + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Err(Error::Internal(format!("oracle found no feasible set for {inv}")))
}

fn best_function(g: &Graph, k: u32, weak: bool, total: u64) -> Result<WeightFunction> {
    let n = g.order();
    let mut vals = vec![0u32; n];
    let mut best: Option<(u32, Vec<u32>)> = None;
    for _ in 0..total {
        let ok = (0..n).all(|v| {
            (weak && vals[v] > 0)
                || vals[v] + g.neighbors(v).iter().map(|&u| vals[u]).sum::<u32>() >= k
        });
        if ok {
            let w: u32 = vals.iter().sum();
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best = Some((w, vals.clone()));
            }
        }
        // odometer, last vertex least significant
        for v in (0..n).rev() {
            if vals[v] < k {
                vals[v] += 1;
                break;
            }
            vals[v] = 0;
        }
    }
    let (_, vals) = best.ok_or_else(|| Error::Internal("oracle found no feasible function".into()))?;
    WeightFunction::new(k, vals)
}
