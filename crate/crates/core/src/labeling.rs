//! Labeling of a minimum weak {2}-dominating multiset of `G □ H` for
//! claw-free `G`.
//!
//! A minimum independent dominating set `S = {v_1, ..., v_k}` of `G` indexes
//! the labels. Every copy in the multiset `D` receives a label of one or two
//! indices from `[k]` (rules 1-4), the finishing rules 5-9 are applied to a
//! fixpoint, and any remaining two-entry labels are resolved by a verified
//! search. Projecting each label class onto `H` must give a dominating set of
//! `H`, which yields `|D| >= k * gamma(H)`.
//!
//! Every label change is recorded in a trace that can be exported as text
//! and replayed.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::domination::{
    self, is_dominating, is_weak_k_dominating_fn, Invariant, SolverConfig, WeightFunction,
};
use crate::error::{Error, Result};
use crate::graph::{cartesian_product_capped, Graph, Product, ProductVertex, VertexSet, DEFAULT_PRODUCT_CAP};

/// Largest number of unresolved two-entry labels the resolution search accepts.
pub const MAX_UNRESOLVED: usize = 30;
/// Cap on the combined assignments explored when rule 10 relabelings are needed.
pub const RULE10_BUDGET: u64 = 1 << 24;

/// A label with one or two distinct entries from `[k]`, stored sorted.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    lo: u16,
    hi: Option<u16>,
}

impl Label {
    pub fn single(i: u16) -> Self {
        Self { lo: i, hi: None }
    }

    pub fn pair(i: u16, j: u16) -> Result<Self> {
        if i == j {
            return Err(Error::Domain(format!("label entries must differ, got {{{i},{j}}}")));
        }
        Ok(Self {
            lo: i.min(j),
            hi: Some(i.max(j)),
        })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        1 + usize::from(self.hi.is_some())
    }

    pub fn is_single(&self) -> bool {
        self.hi.is_none()
    }

    pub fn smallest(&self) -> u16 {
        self.lo
    }

    pub fn largest(&self) -> u16 {
        self.hi.unwrap_or(self.lo)
    }

    pub fn contains(&self, i: u16) -> bool {
        self.lo == i || self.hi == Some(i)
    }

    pub fn entries(&self) -> impl Iterator<Item = u16> {
        std::iter::once(self.lo).chain(self.hi)
    }

    /// The entry other than `i` of a two-entry label.
    fn other(&self, i: u16) -> Option<u16> {
        match self.hi {
            Some(hi) if self.lo == i => Some(hi),
            Some(hi) if hi == i => Some(self.lo),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) => write!(f, "{{{},{}}}", self.lo, hi),
            None => write!(f, "{{{}}}", self.lo),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("label {s:?} is not braced")))?;
        let parts: Vec<u16> = inner
            .split(',')
            .map(|t| t.trim().parse::<u16>().map_err(|e| Error::Parse(format!("label {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [i] => Ok(Label::single(*i)),
            [i, j] => Label::pair(*i, *j),
            _ => Err(Error::Parse(format!("label {s:?} must have one or two entries"))),
        }
    }
}

/// One copy of a vertex of `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyId {
    pub vertex: ProductVertex,
    pub copy: u8,
}

impl fmt::Display for CopyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.vertex.g, self.vertex.h, self.copy)
    }
}

/// A weak {2}-dominating function of `G □ H` viewed as a multiset: a vertex
/// of value `l` appears as `l` copies. Copies are kept in canonical order
/// (flat product index, then copy id).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisetD {
    entries: Vec<CopyId>,
    weights: WeightFunction,
}

impl MultisetD {
    pub fn from_weights(product: &Product, f: WeightFunction) -> Result<Self> {
        if f.k() != 2 {
            return Err(Error::Domain(format!("expected a weak {{2}}-dominating function, got k = {}", f.k())));
        }
        if f.len() != product.graph.order() {
            return Err(Error::Domain(format!(
                "weight function has {} values, product has {} vertices",
                f.len(),
                product.graph.order()
            )));
        }
        if !is_weak_k_dominating_fn(&product.graph, &f) {
            return Err(Error::Domain("weights are not weak {2}-dominating on the product".into()));
        }
        let mut entries = Vec::with_capacity(f.weight() as usize);
        for flat in 0..f.len() {
            for c in 0..f.value(flat) {
                entries.push(CopyId {
                    vertex: product.coords(flat),
                    copy: c as u8,
                });
            }
        }
        Ok(Self { entries, weights: f })
    }

    pub fn entries(&self) -> &[CopyId] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    fn position(&self, id: CopyId) -> Option<usize> {
        self.entries.binary_search(&id).ok()
    }
}

/// Everything the labeling needs about one pair `(G, H)`.
#[derive(Clone, Debug)]
pub struct StarContext {
    pub g: Graph,
    pub h: Graph,
    /// `v_1..v_k` in increasing vertex order; `s[i - 1]` is `v_i`.
    pub s: Vec<usize>,
    pub product: Product,
    pub d: MultisetD,
}

impl StarContext {
    pub fn k(&self) -> usize {
        self.s.len()
    }

    fn in_d(&self, g: usize, h: usize) -> bool {
        self.d.weights.value(self.product.flat(ProductVertex { g, h })) > 0
    }

    /// Some `h'` in `N_H[h]` has `(v_i, h')` in `D`.
    pub fn column_hits(&self, i: u16, h: usize) -> bool {
        let vi = self.s[i as usize - 1];
        self.in_d(vi, h) || self.h.neighbors(h).iter().any(|&x| self.in_d(vi, x))
    }
}

fn check_claw_free(g: &Graph) -> Result<()> {
    if let Some((c, leaves)) = g.find_claw() {
        return Err(Error::Domain(format!(
            "G is not claw-free: center {c} with independent leaves {leaves:?}"
        )));
    }
    Ok(())
}

/// Picks `S` from the independent domination solver and `D` as the minimum
/// weak {2}-dominating function of the product.
pub fn build_context(g: &Graph, h: &Graph) -> Result<StarContext> {
    build_context_with(g, h, None, DEFAULT_PRODUCT_CAP, &SolverConfig::default())
}

/// Like [`build_context`], optionally with explicit product weights in place
/// of the solver's minimum.
pub fn build_context_with(
    g: &Graph,
    h: &Graph,
    weights: Option<WeightFunction>,
    product_cap: usize,
    cfg: &SolverConfig,
) -> Result<StarContext> {
    check_claw_free(g)?;
    let product = cartesian_product_capped(g, h, product_cap)?;
    let gamma = domination::solve(g, Invariant::Gamma, cfg)?;
    let indep = domination::solve(g, Invariant::IndependentGamma, cfg)?;
    if gamma.value != indep.value {
        return Err(Error::Internal(format!(
            "claw-free G has gamma = {} but i = {}",
            gamma.value, indep.value
        )));
    }
    let s = indep
        .certificate
        .as_set()
        .ok_or_else(|| Error::Internal("independent domination returned a function".into()))?
        .to_vec();
    let f = match weights {
        Some(f) => f,
        None => domination::solve(&product.graph, Invariant::GammaWeakK(2), cfg)?
            .certificate
            .as_function()
            .cloned()
            .ok_or_else(|| Error::Internal("weak domination returned a set".into()))?,
    };
    let d = MultisetD::from_weights(&product, f)?;
    Ok(StarContext {
        g: g.clone(),
        h: h.clone(),
        s,
        product,
        d,
    })
}

/// How a vertex of `G` relates to `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnClass {
    /// `v` is `v_i` or lies in `pn(v_i, S)`.
    Private(u16),
    /// `v` lies outside `S` and is adjacent to exactly `v_i` and `v_j`, `i < j`.
    Shared(u16, u16),
}

pub fn classify_column(ctx: &StarContext, v: usize) -> Result<ColumnClass> {
    if v >= ctx.g.order() {
        return Err(Error::VertexOutOfRange { vertex: v, n: ctx.g.order() });
    }
    if let Some(pos) = ctx.s.iter().position(|&x| x == v) {
        return Ok(ColumnClass::Private(pos as u16 + 1));
    }
    let hits: Vec<u16> = ctx
        .s
        .iter()
        .enumerate()
        .filter(|(_, &x)| ctx.g.has_edge(v, x))
        .map(|(i, _)| i as u16 + 1)
        .collect();
    match hits.as_slice() {
        [i] => Ok(ColumnClass::Private(*i)),
        [i, j] => Ok(ColumnClass::Shared(*i, *j)),
        [] => Err(Error::Internal(format!("vertex {v} is not dominated by S"))),
        _ => Err(Error::Internal(format!(
            "vertex {v} is adjacent to {} members of S in a claw-free graph",
            hits.len()
        ))),
    }
}

/// Which rule produced a label change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Numbered(u8),
    /// Choice made by the verified resolution search.
    Resolve,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Numbered(r) => write!(f, "{r}"),
            Rule::Resolve => write!(f, "resolve"),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "resolve" {
            return Ok(Rule::Resolve);
        }
        match s.parse::<u8>() {
            Ok(r @ 1..=10) => Ok(Rule::Numbered(r)),
            _ => Err(Error::Parse(format!("unknown rule {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub rule: Rule,
    pub copy: CopyId,
    pub old: Option<Label>,
    pub new: Label,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let old = self.old.map_or_else(|| "{}".to_string(), |l| l.to_string());
        write!(f, "rule={} copy={} old={} new={}", self.rule, self.copy, old, self.new)
    }
}

impl FromStr for TraceRecord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed trace line {line:?}"));
        let rest = line.trim().strip_prefix("rule=").ok_or_else(bad)?;
        let (rule, rest) = rest.split_once(" copy=(").ok_or_else(bad)?;
        let (copy, rest) = rest.split_once(") old=").ok_or_else(bad)?;
        let (old, new) = rest.split_once(" new=").ok_or_else(bad)?;
        let nums: Vec<usize> = copy
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [g, h, c] = nums.as_slice() else {
            return Err(bad());
        };
        Ok(TraceRecord {
            rule: rule.parse()?,
            copy: CopyId {
                vertex: ProductVertex { g: *g, h: *h },
                copy: u8::try_from(*c).map_err(|_| bad())?,
            },
            old: if old == "{}" { None } else { Some(old.parse()?) },
            new: new.trim().parse()?,
        })
    }
}

/// Labels of the copies of `D` (indexed like `MultisetD::entries`) with
/// the trace that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelState {
    labels: Vec<Option<Label>>,
    trace: Vec<TraceRecord>,
}

impl LabelState {
    fn unlabeled(len: usize) -> Self {
        Self {
            labels: vec![None; len],
            trace: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[Option<Label>] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> Option<Label> {
        self.labels[idx]
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    fn set(&mut self, d: &MultisetD, idx: usize, rule: Rule, new: Label) {
        self.trace.push(TraceRecord {
            rule,
            copy: d.entries[idx],
            old: self.labels[idx],
            new,
        });
        self.labels[idx] = Some(new);
    }

    pub fn total_entries(&self) -> usize {
        self.labels.iter().flatten().map(Label::len).sum()
    }

    pub fn two_entry_count(&self) -> usize {
        self.labels.iter().flatten().filter(|l| !l.is_single()).count()
    }

    pub fn is_all_single(&self) -> bool {
        self.labels.iter().all(|l| l.is_some_and(|l| l.is_single()))
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|r| format!("{r}\n")).collect()
    }
}

/// Applies `trace` to an unlabeled `d`, checking every recorded old label.
pub fn replay(d: &MultisetD, trace: &[TraceRecord]) -> Result<Vec<Option<Label>>> {
    let mut labels = vec![None; d.len()];
    for (n, r) in trace.iter().enumerate() {
        let idx = d
            .position(r.copy)
            .ok_or_else(|| Error::State(format!("trace record {n}: copy {} is not in D", r.copy)))?;
        if labels[idx] != r.old {
            return Err(Error::State(format!(
                "trace record {n}: copy {} expected old label {:?}, found {:?}",
                r.copy, r.old, labels[idx]
            )));
        }
        labels[idx] = Some(r.new);
    }
    Ok(labels)
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Rules 1-4, one copy at a time in canonical order.
pub fn initial_labeling(ctx: &StarContext) -> Result<LabelState> {
    let d = &ctx.d;
    let mut st = LabelState::unlabeled(d.len());
    for idx in 0..d.len() {
        let CopyId { vertex, copy } = d.entries[idx];
        match classify_column(ctx, vertex.g)? {
            ColumnClass::Private(i) => st.set(d, idx, Rule::Numbered(1), Label::single(i)),
            ColumnClass::Shared(i, j) => {
                let (empty_i, empty_j) = (!ctx.column_hits(i, vertex.h), !ctx.column_hits(j, vertex.h));
                let (rule, label) = match (empty_i, empty_j) {
                    (true, true) => {
                        let doubled = d.weights.value(ctx.product.flat(vertex)) == 2;
                        let label = match (doubled, copy) {
                            (false, _) => Label::pair(i, j)?,
                            (true, 0) => Label::single(i),
                            (true, _) => Label::single(j),
                        };
                        (2, label)
                    }
                    (true, false) => (3, Label::single(i)),
                    (false, true) => (3, Label::single(j)),
                    (false, false) => (4, Label::single(i.min(j))),
                };
                st.set(d, idx, Rule::Numbered(rule), label);
            }
        }
    }
    if let Some(idx) = st.labels.iter().position(Option::is_none) {
        return Err(Error::Internal(format!("copy {} left unlabeled", d.entries[idx])));
    }
    Ok(st)
}

/// First applicable finishing rule for the ordered pair `(x, y)`.
fn finishing_rule(ctx: &StarContext, x: usize, y: usize, st: &LabelState) -> Option<(u8, Option<Label>, Label)> {
    let (cx, cy) = (ctx.d.entries[x].vertex, ctx.d.entries[y].vertex);
    let (lx, ly) = (st.labels[x]?, st.labels[y]?);
    let adjacent = ctx.h.has_edge(cx.h, cy.h);
    let same = cx.h == cy.h;
    if !adjacent && !same {
        return None;
    }
    let pair_pair = !lx.is_single() && lx == ly;
    let single_in_pair = if lx.is_single() { ly.other(lx.smallest()) } else { None };
    if adjacent {
        if pair_pair {
            return Some((5, Some(Label::single(lx.smallest())), Label::single(lx.largest())));
        }
        if let Some(j) = single_in_pair {
            return Some((6, None, Label::single(j)));
        }
    } else {
        if pair_pair {
            return Some((7, Some(Label::single(lx.smallest())), Label::single(lx.largest())));
        }
        if let Some(l) = single_in_pair {
            return Some((8, None, Label::single(l)));
        }
        if !lx.is_single() && !ly.is_single() {
            let shared: Vec<u16> = lx.entries().filter(|&e| ly.contains(e)).collect();
            if let [j] = shared.as_slice() {
                return Some((9, None, Label::single(ly.other(*j)?)));
            }
        }
    }
    None
}

/// Rules 5-9 to a fixpoint. Ordered pairs are scanned in canonical order and
/// the scan restarts after every application.
pub fn finishing_pass(ctx: &StarContext, mut st: LabelState) -> LabelState {
    let n = ctx.d.len();
    'outer: loop {
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                if let Some((rule, new_x, new_y)) = finishing_rule(ctx, x, y, &st) {
                    if let Some(l) = new_x {
                        st.set(&ctx.d, x, Rule::Numbered(rule), l);
                    }
                    st.set(&ctx.d, y, Rule::Numbered(rule), new_y);
                    continue 'outer;
                }
            }
        }
        return st;
    }
}

/// `U_i`: the `H`-coordinates of copies labeled `{i}`.
pub fn project_label_class(ctx: &StarContext, st: &LabelState, i: u16) -> Result<VertexSet> {
    project(ctx, &st.labels, i)
}

fn project(ctx: &StarContext, labels: &[Option<Label>], i: u16) -> Result<VertexSet> {
    let mut u = VertexSet::empty(ctx.h.order());
    for (idx, l) in labels.iter().enumerate() {
        let l = l.ok_or_else(|| Error::State(format!("copy {} is unlabeled", ctx.d.entries[idx])))?;
        if !l.is_single() {
            return Err(Error::State(format!(
                "copy {} still carries two-entry label {l}",
                ctx.d.entries[idx]
            )));
        }
        if l.smallest() == i {
            u.insert(ctx.d.entries[idx].vertex.h);
        }
    }
    Ok(u)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub class: u16,
    pub projection: Vec<usize>,
    pub dominating: bool,
    /// A vertex of `H` outside `N[U_i]` when the class fails.
    pub witness: Option<usize>,
}

/// Checks that every class projection dominates `H`.
pub fn check_class_domination(ctx: &StarContext, st: &LabelState) -> Result<Vec<ClassReport>> {
    check_classes(ctx, &st.labels)
}

fn check_classes(ctx: &StarContext, labels: &[Option<Label>]) -> Result<Vec<ClassReport>> {
    (1..=ctx.k() as u16)
        .map(|i| {
            let u = project(ctx, labels, i)?;
            let witness = (0..ctx.h.order()).find(|&h| !u.contains(h) && !ctx.h.row(h).intersects(&u));
            debug_assert_eq!(witness.is_none(), is_dominating(&ctx.h, &u));
            Ok(ClassReport {
                class: i,
                projection: u.to_vec(),
                dominating: witness.is_none(),
                witness,
            })
        })
        .collect()
}

fn all_dominate(ctx: &StarContext, labels: &[Option<Label>]) -> Result<bool> {
    Ok(check_classes(ctx, labels)?.iter().all(|c| c.dominating))
}

/// Evidence that the labeling could not be completed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub two_entry_after_fixpoint: usize,
    /// The failing class and uncovered vertex of `H` under the canonical choice.
    pub failing_class: Option<(u16, usize)>,
    pub trace: Vec<TraceRecord>,
}

#[derive(Clone, Debug)]
pub enum Resolution {
    Resolved {
        state: LabelState,
        assignments_tried: u64,
        rule10_moves: usize,
    },
    Unresolvable(Discrepancy),
}

/// Resolves remaining two-entry labels to single entries so that every class
/// projection dominates `H`.
///
/// Choices are enumerated lexicographically over the two-entry copies in
/// canonical order, smaller entry first; the first accepted assignment wins.
/// If none is accepted, rule 10 relabelings of duplicated singletons are
/// added to the search. Exhausting both yields a discrepancy.
pub fn resolve_two_entry(ctx: &StarContext, st: LabelState) -> Result<Resolution> {
    let open: Vec<usize> = (0..st.labels.len())
        .filter(|&i| st.labels[i].is_some_and(|l| !l.is_single()))
        .collect();
    let m = open.len();
    if m > MAX_UNRESOLVED {
        return Err(Error::Size(format!(
            "{m} two-entry labels remain, resolution search handles at most {MAX_UNRESOLVED}"
        )));
    }
    if st.labels.iter().any(Option::is_none) {
        return Err(Error::State("resolution requires a complete labeling".into()));
    }

    let choose = |mask: u64| -> Vec<Option<Label>> {
        let mut labels = st.labels.clone();
        for (t, &idx) in open.iter().enumerate() {
            let l = labels[idx].expect("labeled");
            let pick = if mask >> (m - 1 - t) & 1 == 1 { l.largest() } else { l.smallest() };
            labels[idx] = Some(Label::single(pick));
        }
        labels
    };
    let commit = |labels: &[Option<Label>], rule10: &[(usize, u16)]| {
        let mut out = st.clone();
        for &idx in &open {
            out.set(&ctx.d, idx, Rule::Resolve, labels[idx].expect("labeled"));
        }
        for &(idx, l) in rule10 {
            out.set(&ctx.d, idx, Rule::Numbered(10), Label::single(l));
        }
        out
    };

    let mut tried = 0u64;
    for mask in 0..(1u64 << m) {
        tried += 1;
        let labels = choose(mask);
        if all_dominate(ctx, &labels)? {
            return Ok(Resolution::Resolved {
                state: commit(&labels, &[]),
                assignments_tried: tried,
                rule10_moves: 0,
            });
        }
    }

    let k = ctx.k() as u16;
    if k >= 2 {
        for mask in 0..(1u64 << m) {
            let base = choose(mask);
            // copies sharing (h, label) with an earlier copy may be relabeled
            let eligible: Vec<usize> = (0..base.len())
                .filter(|&y| {
                    (0..y).any(|x| {
                        ctx.d.entries[x].vertex.h == ctx.d.entries[y].vertex.h && base[x] == base[y]
                    })
                })
                .collect();
            if eligible.is_empty() {
                continue;
            }
            let combos = (k as u64).checked_pow(eligible.len() as u32).unwrap_or(u64::MAX);
            if combos.saturating_mul(1 << m) > RULE10_BUDGET {
                return Err(Error::Size(format!(
                    "rule 10 search over {} copies exceeds budget {RULE10_BUDGET}",
                    eligible.len()
                )));
            }
            for code in 1..combos {
                tried += 1;
                let mut labels = base.clone();
                let mut moves = Vec::new();
                let mut c = code;
                for &y in &eligible {
                    let digit = (c % k as u64) as u16;
                    c /= k as u64;
                    if digit == 0 {
                        continue;
                    }
                    let cur = labels[y].expect("labeled").smallest();
                    // digit d > 0 selects the d-th index of [k] other than the current one
                    let target = (1..=k).filter(|&l| l != cur).nth(digit as usize - 1).expect("k >= 2");
                    labels[y] = Some(Label::single(target));
                    moves.push((y, target));
                }
                if all_dominate(ctx, &labels)? {
                    return Ok(Resolution::Resolved {
                        state: commit(&base, &moves),
                        assignments_tried: tried,
                        rule10_moves: moves.len(),
                    });
                }
            }
        }
    }

    let canonical = choose(0);
    let failing_class = check_classes(ctx, &canonical)?
        .into_iter()
        .find_map(|c| c.witness.map(|w| (c.class, w)));
    Ok(Resolution::Unresolvable(Discrepancy {
        two_entry_after_fixpoint: m,
        failing_class,
        trace: commit(&canonical, &[]).trace,
    }))
}

/// Outcome of the full labeling pipeline on one pair.
#[derive(Clone, Debug)]
pub struct LabelingOutcome {
    pub k: usize,
    pub d_size: usize,
    pub gamma_h: u32,
    /// Copies labeled by rules 1, 2, 3 and 4.
    pub initial_rule_counts: [usize; 4],
    pub finishing_steps: usize,
    pub two_entry_after_initial: usize,
    pub two_entry_after_fixpoint: usize,
    pub assignments_tried: u64,
    pub rule10_moves: usize,
    pub classes: Vec<ClassReport>,
    pub final_state: Option<LabelState>,
    pub discrepancy: Option<Discrepancy>,
}

impl LabelingOutcome {
    pub fn class_size_sum(&self) -> usize {
        self.classes.iter().map(|c| c.projection.len()).sum()
    }

    /// Every class dominates `H` and has at least `gamma(H)` vertices.
    pub fn classes_hold(&self) -> bool {
        self.discrepancy.is_none()
            && self.classes.len() == self.k
            && self
                .classes
                .iter()
                .all(|c| c.dominating && c.projection.len() as u32 >= self.gamma_h)
    }

    /// `|D| >= sum |U_i| >= k * gamma(H)` as re-derived from the labeling.
    pub fn derived_bound_holds(&self) -> bool {
        self.classes_hold()
            && self.d_size >= self.class_size_sum()
            && self.class_size_sum() as u64 >= self.k as u64 * self.gamma_h as u64
    }
}

/// Runs initial labeling, the finishing fixpoint and resolution, then checks
/// every class projection.
pub fn run_labeling(ctx: &StarContext, cfg: &SolverConfig) -> Result<LabelingOutcome> {
    let gamma_h = domination::solve(&ctx.h, Invariant::Gamma, cfg)?.value;
    let initial = initial_labeling(ctx)?;
    let mut initial_rule_counts = [0; 4];
    for r in &initial.trace {
        if let Rule::Numbered(n @ 1..=4) = r.rule {
            initial_rule_counts[n as usize - 1] += 1;
        }
    }
    let two_entry_after_initial = initial.two_entry_count();
    let before = initial.trace.len();
    let fixed = finishing_pass(ctx, initial);
    let finishing_steps = fixed.trace.len() - before;
    let two_entry_after_fixpoint = fixed.two_entry_count();

    let base = LabelingOutcome {
        k: ctx.k(),
        d_size: ctx.d.len(),
        gamma_h,
        initial_rule_counts,
        finishing_steps,
        two_entry_after_initial,
        two_entry_after_fixpoint,
        assignments_tried: 0,
        rule10_moves: 0,
        classes: Vec::new(),
        final_state: None,
        discrepancy: None,
    };
    match resolve_two_entry(ctx, fixed)? {
        Resolution::Resolved {
            state,
            assignments_tried,
            rule10_moves,
        } => {
            let classes = check_class_domination(ctx, &state)?;
            Ok(LabelingOutcome {
                assignments_tried,
                rule10_moves,
                classes,
                final_state: Some(state),
                ..base
            })
        }
        Resolution::Unresolvable(disc) => Ok(LabelingOutcome {
            discrepancy: Some(disc),
            ..base
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_with(g: &Graph, h: &Graph, vals: Vec<u32>) -> StarContext {
        build_context_with(
            g,
            h,
            Some(WeightFunction::new(2, vals).unwrap()),
            DEFAULT_PRODUCT_CAP,
            &SolverConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn labels_parse_and_print() {
        let l = Label::pair(3, 1).unwrap();
        assert_eq!(l.to_string(), "{1,3}");
        assert_eq!("{1,3}".parse::<Label>().unwrap(), l);
        assert_eq!("{2}".parse::<Label>().unwrap(), Label::single(2));
        assert!("{2,2}".parse::<Label>().is_err());
        assert!("{1,2,3}".parse::<Label>().is_err());
        assert!(Label::pair(1, 1).is_err());
    }

    #[test]
    fn trace_lines_round_trip() {
        let r = TraceRecord {
            rule: Rule::Numbered(5),
            copy: CopyId {
                vertex: ProductVertex { g: 3, h: 1 },
                copy: 0,
            },
            old: Some(Label::pair(1, 2).unwrap()),
            new: Label::single(1),
        };
        let line = r.to_string();
        assert_eq!(line, "rule=5 copy=(3,1,0) old={1,2} new={1}");
        assert_eq!(line.parse::<TraceRecord>().unwrap(), r);
        let first = "rule=1 copy=(0,0,1) old={} new={2}".parse::<TraceRecord>().unwrap();
        assert_eq!(first.old, None);
        assert!("rule=11 copy=(0,0,0) old={} new={1}".parse::<TraceRecord>().is_err());
    }

    #[test]
    fn claw_is_rejected() {
        let claw = Graph::star(3).unwrap();
        let k1 = Graph::empty(1).unwrap();
        assert!(matches!(build_context(&claw, &k1), Err(Error::Domain(_))));
    }

    #[test]
    fn multiset_copies_follow_weights() {
        let k2 = Graph::complete(2).unwrap();
        let k1 = Graph::empty(1).unwrap();
        let ctx = ctx_with(&k2, &k1, vec![2, 0]);
        assert_eq!(ctx.s, vec![0]);
        assert_eq!(ctx.d.len(), 2);
        assert_eq!(ctx.d.entries()[1].copy, 1);
        let p = cartesian_product(&k2, &k1);
        assert!(MultisetD::from_weights(&p, WeightFunction::new(2, vec![1, 0]).unwrap()).is_err());
    }

    fn cartesian_product(g: &Graph, h: &Graph) -> Product {
        crate::graph::cartesian_product(g, h).unwrap()
    }

    #[test]
    fn c5_columns() {
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::empty(1).unwrap();
        let ctx = build_context(&c5, &k1).unwrap();
        assert_eq!(ctx.s, vec![0, 2]);
        assert_eq!(classify_column(&ctx, 1).unwrap(), ColumnClass::Shared(1, 2));
        assert_eq!(classify_column(&ctx, 3).unwrap(), ColumnClass::Private(2));
        assert_eq!(classify_column(&ctx, 4).unwrap(), ColumnClass::Private(1));
        assert_eq!(classify_column(&ctx, 0).unwrap(), ColumnClass::Private(1));
        assert_eq!(classify_column(&ctx, 2).unwrap(), ColumnClass::Private(2));
        assert!(classify_column(&ctx, 5).is_err());
    }

    #[test]
    fn shared_column_with_both_sides_empty_gets_a_pair() {
        // C5 x K1 with D = {1, 3, 4}: column 1 sees neither v_1 = 0 nor v_2 = 2.
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::empty(1).unwrap();
        let ctx = ctx_with(&c5, &k1, vec![0, 1, 0, 1, 1]);
        let st = initial_labeling(&ctx).unwrap();
        assert_eq!(st.label(0), Some(Label::pair(1, 2).unwrap()));
        assert_eq!(st.label(1), Some(Label::single(2)));
        assert_eq!(st.label(2), Some(Label::single(1)));
        // rule 8: {2} and {1,2} in the same fiber
        let fin = finishing_pass(&ctx, st);
        assert!(fin.is_all_single());
        assert_eq!(fin.label(0), Some(Label::single(1)));
        assert_eq!(fin.trace().last().unwrap().rule, Rule::Numbered(8));
    }

    #[test]
    fn doubled_shared_vertex_splits() {
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::empty(1).unwrap();
        let ctx = ctx_with(&c5, &k1, vec![0, 2, 0, 1, 1]);
        let st = initial_labeling(&ctx).unwrap();
        assert_eq!(st.label(0), Some(Label::single(1)));
        assert_eq!(st.label(1), Some(Label::single(2)));
        assert_eq!(st.trace()[0].rule, Rule::Numbered(2));
    }

    #[test]
    fn rule_three_and_four() {
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::empty(1).unwrap();
        // v_1 = 0 in D, v_2 = 2 not: column 1 takes the empty side {2}
        let ctx = ctx_with(&c5, &k1, vec![1, 1, 0, 1, 0]);
        let st = initial_labeling(&ctx).unwrap();
        assert_eq!(st.trace()[1].rule, Rule::Numbered(3));
        assert_eq!(st.label(1), Some(Label::single(2)));
        // both in D: rule 4 picks the smaller index
        let ctx = ctx_with(&c5, &k1, vec![1, 1, 1, 1, 0]);
        let st = initial_labeling(&ctx).unwrap();
        assert_eq!(st.trace()[1].rule, Rule::Numbered(4));
        assert_eq!(st.label(1), Some(Label::single(1)));
    }

    #[test]
    fn perfect_sets_use_rule_one_only() {
        // P3 has the perfect independent dominating set {1}
        let p3 = Graph::path(3).unwrap();
        let k2 = Graph::complete(2).unwrap();
        let ctx = build_context(&p3, &k2).unwrap();
        let out = run_labeling(&ctx, &SolverConfig::default()).unwrap();
        assert_eq!(out.initial_rule_counts[1..], [0, 0, 0]);
        assert_eq!(out.finishing_steps, 0);
        assert!(out.derived_bound_holds());
    }

    #[test]
    fn finishing_rules_on_adjacent_fibers() {
        // G = C5, H = K2, D puts weight on column 1 only in both fibers plus
        // enough elsewhere to stay weak {2}-dominating.
        let c5 = Graph::cycle(5).unwrap();
        let k2 = Graph::complete(2).unwrap();
        // flat = g * 2 + h; columns 0 and 2 empty, column 1 at h = 0 and 1
        let mut vals = vec![0; 10];
        for flat in [2, 3, 6, 7, 8, 9] {
            vals[flat] = 1;
        }
        let ctx = ctx_with(&c5, &k2, vals);
        let st = initial_labeling(&ctx).unwrap();
        let pair = Label::pair(1, 2).unwrap();
        assert_eq!(st.label(0), Some(pair));
        assert_eq!(st.label(1), Some(pair));
        let fin = finishing_pass(&ctx, st);
        // rule 5 splits the two pairs first
        let r5: Vec<_> = fin.trace().iter().filter(|r| r.rule == Rule::Numbered(5)).collect();
        assert_eq!(r5.len(), 2);
        assert_eq!(fin.label(0), Some(Label::single(1)));
        assert_eq!(fin.label(1), Some(Label::single(2)));
        assert_eq!(replay(&ctx.d, fin.trace()).unwrap(), fin.labels());
    }

    #[test]
    fn fixpoint_is_identity_on_singletons() {
        let c4 = Graph::cycle(4).unwrap();
        let k2 = Graph::complete(2).unwrap();
        let ctx = build_context(&c4, &k2).unwrap();
        let st = initial_labeling(&ctx).unwrap();
        if st.is_all_single() {
            let again = finishing_pass(&ctx, st.clone());
            assert_eq!(again, st);
        }
        let out = run_labeling(&ctx, &SolverConfig::default()).unwrap();
        assert_eq!(out.k, 2);
        assert!(out.classes_hold());
        assert!(out.d_size >= 2);
        for c in &out.classes {
            assert!(c.dominating);
        }
    }

    #[test]
    fn projection_requires_single_labels() {
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::empty(1).unwrap();
        let ctx = ctx_with(&c5, &k1, vec![0, 1, 0, 1, 1]);
        let st = initial_labeling(&ctx).unwrap();
        assert!(matches!(project_label_class(&ctx, &st, 1), Err(Error::State(_))));
        let fin = finishing_pass(&ctx, st);
        assert_eq!(project_label_class(&ctx, &fin, 1).unwrap().to_vec(), vec![0]);
    }

    #[test]
    fn empty_class_is_flagged_with_witness() {
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::empty(1).unwrap();
        let ctx = ctx_with(&c5, &k1, vec![1, 0, 1, 0, 1]);
        let st = finishing_pass(&ctx, initial_labeling(&ctx).unwrap());
        let rep = check_class_domination(&ctx, &st).unwrap();
        assert!(rep.iter().all(|c| c.dominating));
        // hand-built bad labeling: everything in class 1
        let mut bad = st.clone();
        for idx in 0..bad.labels.len() {
            bad.labels[idx] = Some(Label::single(1));
        }
        let rep = check_class_domination(&ctx, &bad).unwrap();
        assert_eq!(rep[1].witness, Some(0));
        assert!(!rep[1].dominating);
    }
}
