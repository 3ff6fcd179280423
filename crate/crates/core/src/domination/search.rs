//! Cover-driven branch and bound shared by all five invariants.
//!
//! Sets are 0/1 functions, so every problem is "raise vertex values from a
//! starting assignment until no vertex is deficient". A deficient vertex `u`
//! can only be repaired by raising some vertex of `N[u]`, so the search
//! branches over those candidates; once a candidate has been explored it is
//! frozen for its later siblings, which keeps the branches disjoint.
//!
//! After the optimum is known, the lexicographically least optimal
//! certificate is rebuilt one vertex at a time with feasibility queries.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::Invariant;

const INFEASIBLE: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Dominating,
    Independent,
    TwoDominating,
    KDominating(u32),
    WeakK(u32),
}

impl Kind {
    fn of(inv: Invariant) -> Self {
        match inv {
            Invariant::Gamma => Kind::Dominating,
            Invariant::IndependentGamma => Kind::Independent,
            Invariant::Gamma2 => Kind::TwoDominating,
            Invariant::GammaK(k) => Kind::KDominating(k),
            Invariant::GammaWeakK(k) => Kind::WeakK(k),
        }
    }

    fn cap(self) -> u32 {
        match self {
            Kind::KDominating(k) | Kind::WeakK(k) => k,
            _ => 1,
        }
    }
}

struct Search<'g> {
    g: &'g Graph,
    kind: Kind,
    cap: u32,
    vals: Vec<u32>,
    frozen: Vec<bool>,
    /// Number of chosen neighbors; only maintained for independent domination.
    blocked: Vec<u32>,
    closed_sum: Vec<u32>,
    weight: u32,
    /// Accept solutions of weight at most this.
    limit: u32,
    /// Stop at the first solution instead of tightening `limit`.
    first_only: bool,
    best: Option<Vec<u32>>,
    /// Vertices sorted by descending degree, ties by index.
    order: Vec<usize>,
    rank: Vec<usize>,
    deadline: Option<(Instant, u64)>,
    nodes: u64,
    scratch_used: Vec<bool>,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, kind: Kind, deadline: Option<(Instant, u64)>) -> Self {
        let n = g.order();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        let mut rank = vec![0; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        Self {
            g,
            kind,
            cap: kind.cap(),
            vals: vec![0; n],
            frozen: vec![false; n],
            blocked: vec![0; n],
            closed_sum: vec![0; n],
            weight: 0,
            limit: INFEASIBLE,
            first_only: false,
            best: None,
            order,
            rank,
            deadline,
            nodes: 0,
            scratch_used: vec![false; n],
        }
    }

    fn reset(&mut self) {
        self.vals.fill(0);
        self.frozen.fill(false);
        self.blocked.fill(0);
        self.closed_sum.fill(0);
        self.weight = 0;
        self.best = None;
    }

    fn raise(&mut self, w: usize) {
        self.vals[w] += 1;
        self.weight += 1;
        self.closed_sum[w] += 1;
        for &u in self.g.neighbors(w) {
            self.closed_sum[u] += 1;
            if self.kind == Kind::Independent {
                self.blocked[u] += 1;
            }
        }
    }

    fn lower(&mut self, w: usize) {
        self.vals[w] -= 1;
        self.weight -= 1;
        self.closed_sum[w] -= 1;
        for &u in self.g.neighbors(w) {
            self.closed_sum[u] -= 1;
            if self.kind == Kind::Independent {
                self.blocked[u] -= 1;
            }
        }
    }

    fn deficit(&self, v: usize) -> u32 {
        let s = self.closed_sum[v];
        match self.kind {
            Kind::Dominating | Kind::Independent => u32::from(s == 0),
            Kind::TwoDominating => {
                if self.vals[v] > 0 {
                    0
                } else {
                    2u32.saturating_sub(s)
                }
            }
            Kind::KDominating(k) => k.saturating_sub(s),
            Kind::WeakK(k) => {
                if self.vals[v] > 0 {
                    0
                } else {
                    k.saturating_sub(s)
                }
            }
        }
    }

    fn is_candidate(&self, w: usize) -> bool {
        !self.frozen[w]
            && self.vals[w] < self.cap
            && (self.kind != Kind::Independent || self.blocked[w] == 0)
    }

    /// Whether raising `v` itself clears its whole deficit.
    fn self_repairs(&self) -> bool {
        matches!(
            self.kind,
            Kind::Dominating | Kind::Independent | Kind::TwoDominating | Kind::WeakK(_)
        )
    }

    /// Increments still required inside `N[u]` to repair `u`, or `INFEASIBLE`.
    fn local_requirement(&self, u: usize, d: u32) -> u32 {
        if self.self_repairs() && self.is_candidate(u) {
            return 1;
        }
        let room: u32 = std::iter::once(u)
            .chain(self.g.neighbors(u).iter().copied())
            .filter(|&w| self.is_candidate(w))
            .map(|w| match self.kind {
                Kind::KDominating(_) => self.cap - self.vals[w],
                _ if w == u => 0,
                // a raised neighbor contributes at most its remaining room
                _ => self.cap - self.vals[w],
            })
            .sum();
        if room < d {
            INFEASIBLE
        } else {
            d
        }
    }

    /// Lower bound on the weight still to be added.
    fn lower_bound(&mut self) -> u32 {
        let n = self.g.order();
        let mut total = 0u32;
        let mut packing = 0u32;
        self.scratch_used.fill(false);
        for idx in 0..n {
            let u = self.order[idx];
            let d = self.deficit(u);
            if d == 0 {
                continue;
            }
            total += d;
            let req = self.local_requirement(u, d);
            if req == INFEASIBLE {
                return INFEASIBLE;
            }
            let nb = self.g.neighbors(u);
            let disjoint = std::iter::once(u)
                .chain(nb.iter().copied())
                .filter(|&w| self.is_candidate(w))
                .all(|w| !self.scratch_used[w]);
            if disjoint {
                packing += req;
                for w in std::iter::once(u).chain(nb.iter().copied()) {
                    if self.is_candidate(w) {
                        self.scratch_used[w] = true;
                    }
                }
            }
        }
        if total == 0 {
            return 0;
        }
        let mut max_gain = 0u32;
        for w in 0..n {
            if !self.is_candidate(w) {
                continue;
            }
            let mut gain = 0;
            let dw = self.deficit(w);
            if dw > 0 {
                gain += if self.self_repairs() { dw } else { 1 };
            }
            gain += self
                .g
                .neighbors(w)
                .iter()
                .filter(|&&u| self.deficit(u) > 0)
                .count() as u32;
            max_gain = max_gain.max(gain);
        }
        if max_gain == 0 {
            return INFEASIBLE;
        }
        packing.max(total.div_ceil(max_gain))
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some((deadline, ms)) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(Error::Budget(ms));
                }
            }
        }
        Ok(())
    }

    /// Deficient vertex with the fewest repair candidates, ties by degree order.
    fn branch_vertex(&self) -> Option<(usize, usize)> {
        let mut pick: Option<(usize, usize)> = None;
        for &u in &self.order {
            if self.deficit(u) == 0 {
                continue;
            }
            let c = std::iter::once(u)
                .chain(self.g.neighbors(u).iter().copied())
                .filter(|&w| self.is_candidate(w))
                .count();
            if pick.is_none_or(|(_, best)| c < best) {
                pick = Some((u, c));
                if c <= 1 {
                    break;
                }
            }
        }
        pick
    }

    /// Returns true when the search should stop.
    fn dfs(&mut self) -> Result<bool> {
        self.tick()?;
        let lb = self.lower_bound();
        if lb == INFEASIBLE || self.weight + lb > self.limit {
            return Ok(false);
        }
        let Some((u, _)) = self.branch_vertex() else {
            // feasible
            self.best = Some(self.vals.clone());
            if self.first_only || self.weight == 0 {
                return Ok(true);
            }
            self.limit = self.weight - 1;
            return Ok(false);
        };
        let mut cands: Vec<usize> = std::iter::once(u)
            .chain(self.g.neighbors(u).iter().copied())
            .filter(|&w| self.is_candidate(w))
            .collect();
        cands.sort_by_key(|&w| self.rank[w]);
        let mut froze = Vec::with_capacity(cands.len());
        let mut stop = false;
        for w in cands {
            if !self.is_candidate(w) {
                continue;
            }
            if self.weight + 1 > self.limit {
                break;
            }
            self.raise(w);
            let r = self.dfs();
            self.lower(w);
            match r {
                Ok(true) => {
                    stop = true;
                    break;
                }
                Ok(false) => {}
                Err(e) => {
                    for &f in &froze {
                        self.frozen[f] = false;
                    }
                    return Err(e);
                }
            }
            self.frozen[w] = true;
            froze.push(w);
        }
        for f in froze {
            self.frozen[f] = false;
        }
        Ok(stop)
    }

    /// Fixes `prefix` values on the first vertices and asks for a completion
    /// of total weight at most `limit`.
    fn feasible_with_prefix(&mut self, prefix: &[u32], limit: u32) -> Result<Option<Vec<u32>>> {
        self.reset();
        for (v, &x) in prefix.iter().enumerate() {
            for _ in 0..x {
                if self.kind == Kind::Independent && self.blocked[v] > 0 {
                    return Ok(None);
                }
                self.raise(v);
            }
            self.frozen[v] = true;
        }
        if self.weight > limit {
            return Ok(None);
        }
        self.limit = limit;
        self.first_only = true;
        self.dfs()?;
        Ok(self.best.take())
    }
}

/// Minimum-weight feasible assignment, lexicographically least among optima.
/// Sets are returned as 0/1 vectors.
pub(super) fn minimize(g: &Graph, inv: Invariant, deadline: Option<(Instant, u64)>) -> Result<Vec<u32>> {
    let kind = Kind::of(inv);
    let mut s = Search::new(g, kind, deadline);
    s.limit = INFEASIBLE - 1;
    s.dfs()?;
    let mut witness = s
        .best
        .take()
        .ok_or_else(|| Error::Internal(format!("no feasible assignment found for {inv}")))?;
    let opt: u32 = witness.iter().sum();

    // Sets prefer membership first (sorted-member-list order); functions
    // prefer small values first (value-vector order).
    let preference: Vec<u32> = if kind.cap() == 1 && !inv.is_function() {
        vec![1, 0]
    } else {
        (0..=kind.cap()).collect()
    };
    let mut prefix: Vec<u32> = Vec::with_capacity(g.order());
    for v in 0..g.order() {
        let mut chosen = None;
        for &x in &preference {
            if witness[v] == x {
                chosen = Some(x);
                break;
            }
            let mut trial = prefix.clone();
            trial.push(x);
            if let Some(w) = s.feasible_with_prefix(&trial, opt)? {
                witness = w;
                chosen = Some(x);
                break;
            }
        }
        let x = chosen.ok_or_else(|| {
            Error::Internal(format!("lost optimal completion at vertex {v} for {inv}"))
        })?;
        prefix.push(x);
    }
    Ok(prefix)
}
