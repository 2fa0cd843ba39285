//! p-smallness and the expectation threshold `q(F)`.
//!
//! A cover element that covers a minimal element `M` is a subset of `M`, and
//! the empty set costs `p^0 = 1 > 1/2`, so optimal covers are drawn from the
//! nonempty subsets of minimal elements. Within that pool the minimum of
//! `Σ p^{|S|}` is found by depth-first branch-and-bound:
//!
//! * branch on the uncovered minimal element with the largest charge (below),
//!   trying each of its subsets that is closed, i.e. equal to the intersection
//!   of the uncovered minimals containing it; any other subset covers the same
//!   uncovered minimals as its closure and costs more;
//! * bound by the charging argument: a chosen `S` spreads `p^{|S|}` evenly over
//!   the uncovered minimals it covers, so every uncovered `M` is charged at
//!   least `min_{S ⊆ M} p^{|S|} / #{uncovered M' ⊇ S}`, and the sum of those
//!   minima never exceeds the remaining cost.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{sort_canonical, SubsetMask};
use crate::upset::{cost_of_sizes, Cover, UpperSet};

/// Default cap on `Σ_M 2^{|M|}` for the candidate pool.
pub const DEFAULT_CANDIDATE_CAP: u128 = 1 << 20;
/// Default cap on branch-and-bound nodes per search.
pub const DEFAULT_NODE_CAP: u64 = 20_000_000;
/// Default cap on `|F₀|` for the exact cover search. Past this the search
/// space near `q` outgrows any practical node budget (connectivity on `K_5`,
/// with 125 spanning trees, already does).
pub const DEFAULT_MINIMAL_CAP: usize = 64;
/// Iteration cap for the bisection on `q`.
pub const MAX_Q_ITERATIONS: usize = 64;

const HALF: f64 = 0.5;
const TRANSPOSITION_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverOptions {
    pub candidate_cap: u128,
    pub node_cap: u64,
    pub minimal_cap: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self {
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            node_cap: DEFAULT_NODE_CAP,
            minimal_cap: DEFAULT_MINIMAL_CAP,
        }
    }
}

/// An optimal cover at a fixed `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverSolution {
    pub cover: Cover,
    /// `Σ_{S ∈ cover} p^{|S|}`.
    pub cost: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationThreshold {
    pub q: f64,
    /// A cover with cost at most 1/2 at `q - tolerance`.
    pub witness_cover: Cover,
    pub tolerance: f64,
}

/// All nonempty subsets of minimal elements, deduplicated, canonical order.
pub fn candidate_cover_elements(f: &UpperSet) -> Result<Vec<SubsetMask>> {
    candidate_cover_elements_with_cap(f, DEFAULT_CANDIDATE_CAP)
}

pub fn candidate_cover_elements_with_cap(f: &UpperSet, cap: u128) -> Result<Vec<SubsetMask>> {
    check_candidate_cap(f, cap)?;
    let mut seen = HashMap::new();
    for m in f.minimals() {
        for s in m.nonempty_subsets() {
            seen.entry(s.bits()).or_insert(s);
        }
    }
    let mut out: Vec<SubsetMask> = seen.into_values().collect();
    sort_canonical(&mut out);
    Ok(out)
}

fn check_candidate_cap(f: &UpperSet, cap: u128) -> Result<()> {
    let total: u128 = f.minimals().iter().map(|m| 1u128 << m.len()).sum();
    if total > cap {
        return Err(Error::SizeLimitExceeded {
            what: "candidate pool size Σ 2^|M|",
            value: total,
            limit: cap,
        });
    }
    Ok(())
}

/// Exact minimum-cost cover at `p ∈ (0, 1)`.
pub fn min_cover_cost(f: &UpperSet, p: f64) -> Result<CoverSolution> {
    CoverSearch::new(f, CoverOptions::default())?.min_cover_cost(p)
}

/// Whether some cover has `Σ p^{|S|} ≤ 1/2`.
pub fn is_p_small(f: &UpperSet, p: f64) -> Result<bool> {
    CoverSearch::new(f, CoverOptions::default())?.is_p_small(p)
}

/// `q(F)`, the largest `p` at which `F` is p-small, by bisection.
pub fn expectation_threshold(f: &UpperSet, tol: f64) -> Result<ExpectationThreshold> {
    CoverSearch::new(f, CoverOptions::default())?.expectation_threshold(tol)
}

struct Candidate {
    mask: SubsetMask,
    size: usize,
}

/// Precomputed candidate pool and coverage bitsets for one upper set; reused
/// across every `p` of a bisection.
pub struct CoverSearch<'a> {
    f: &'a UpperSet,
    candidates: Vec<Candidate>,
    /// `coverage[c * words..][..words]`: minimals that contain candidate `c`.
    coverage: Vec<u64>,
    /// Candidates that are subsets of each minimal, in canonical order.
    by_minimal: Vec<Vec<usize>>,
    words: usize,
    node_cap: u64,
}

#[derive(Clone, Copy, PartialEq)]
enum Goal {
    Minimize,
    AtMostHalf,
}

struct State<'s> {
    costs: &'s [f64],
    goal: Goal,
    best_cost: f64,
    best: Option<Vec<usize>>,
    found: bool,
    nodes: u64,
    scratch: Vec<u32>,
    slack: Vec<f64>,
    seen: HashMap<Vec<u64>, f64>,
}

impl<'s> State<'s> {
    fn new(costs: &'s [f64], goal: Goal, best_cost: f64, best: Option<Vec<usize>>) -> Self {
        Self {
            costs,
            goal,
            best_cost,
            best,
            found: false,
            nodes: 0,
            scratch: vec![0; costs.len()],
            slack: vec![0.0; costs.len()],
            seen: HashMap::new(),
        }
    }
}

/// Indices of set bits across a word slice.
fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    })
}

impl<'a> CoverSearch<'a> {
    pub fn new(f: &'a UpperSet, options: CoverOptions) -> Result<Self> {
        if f.min_count() > options.minimal_cap {
            return Err(Error::SizeLimitExceeded {
                what: "minimal elements for the exact cover search",
                value: f.min_count() as u128,
                limit: options.minimal_cap as u128,
            });
        }
        let pool = candidate_cover_elements_with_cap(f, options.candidate_cap)?;
        let index: HashMap<u64, usize> = pool
            .iter()
            .enumerate()
            .map(|(i, m)| (m.bits(), i))
            .collect();
        let m = f.min_count();
        let words = m.div_ceil(64);
        let mut coverage = vec![0u64; pool.len() * words];
        let mut by_minimal = Vec::with_capacity(m);
        for (i, minimal) in f.minimals().iter().enumerate() {
            let mut subs: Vec<usize> = minimal
                .nonempty_subsets()
                .map(|s| index[&s.bits()])
                .collect();
            subs.sort_unstable();
            for &c in &subs {
                coverage[c * words + i / 64] |= 1 << (i % 64);
            }
            by_minimal.push(subs);
        }
        let candidates = pool
            .into_iter()
            .map(|mask| Candidate {
                size: mask.len(),
                mask,
            })
            .collect();
        Ok(Self {
            f,
            candidates,
            coverage,
            by_minimal,
            words,
            node_cap: options.node_cap,
        })
    }

    fn cov(&self, c: usize) -> &[u64] {
        &self.coverage[c * self.words..(c + 1) * self.words]
    }

    fn covered_count(&self, c: usize, uncovered: &[u64]) -> u32 {
        self.cov(c)
            .iter()
            .zip(uncovered)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    fn all_uncovered(&self) -> Vec<u64> {
        let m = self.f.min_count();
        let mut u = vec![u64::MAX; self.words];
        if !m.is_multiple_of(64) {
            u[self.words - 1] = (1u64 << (m % 64)) - 1;
        }
        u
    }

    /// Intersection of the uncovered minimals that contain candidate `c`.
    fn closure(&self, c: usize, uncovered: &[u64]) -> u64 {
        let mut acc = u64::MAX;
        for (w, (a, b)) in self.cov(c).iter().zip(uncovered).enumerate() {
            let mut bits = a & b;
            while bits != 0 {
                let i = w * 64 + bits.trailing_zeros() as usize;
                acc &= self.f.minimals()[i].bits();
                bits &= bits - 1;
            }
        }
        acc
    }

    fn costs(&self, p: f64) -> Vec<f64> {
        self.candidates
            .iter()
            .map(|c| p.powi(c.size as i32))
            .collect()
    }

    fn to_cover(&self, chosen: &[usize]) -> Cover {
        Cover::new(chosen.iter().map(|&c| self.candidates[c].mask).collect())
            .expect("candidates are nonempty")
    }

    /// Greedy cover by best cost per newly covered minimal.
    fn greedy(&self, costs: &[f64]) -> Vec<usize> {
        let mut uncovered = self.all_uncovered();
        let mut chosen = Vec::new();
        while uncovered.iter().any(|&w| w != 0) {
            let mut best: Option<(f64, usize)> = None;
            for (c, &cost) in costs.iter().enumerate() {
                let k = self.covered_count(c, &uncovered);
                if k == 0 {
                    continue;
                }
                let ratio = cost / k as f64;
                if best.is_none_or(|(r, _)| ratio < r) {
                    best = Some((ratio, c));
                }
            }
            let (_, c) = best.expect("every uncovered minimal has a candidate");
            for (u, v) in uncovered.iter_mut().zip(self.cov(c)) {
                *u &= !v;
            }
            chosen.push(c);
        }
        chosen
    }

    fn total(&self, chosen: &[usize], p: f64) -> f64 {
        cost_of_sizes(chosen.iter().map(|&c| self.candidates[c].size), p)
    }

    pub fn min_cover_cost(&self, p: f64) -> Result<CoverSolution> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        let costs = self.costs(p);
        let greedy = self.greedy(&costs);
        let mut state = State::new(&costs, Goal::Minimize, self.total(&greedy, p), Some(greedy));
        let mut chosen = Vec::new();
        self.dfs(&mut state, &self.all_uncovered(), &mut chosen, 0.0, p)?;
        let best = state.best.expect("greedy seeds a solution");
        let cover = self.to_cover(&best);
        Ok(CoverSolution {
            cost: cover.cost(p),
            cover,
            p,
        })
    }

    /// A cover of cost at most 1/2 at `p`, if one exists.
    pub fn small_cover(&self, p: f64) -> Result<Option<Cover>> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        if p == 0.0 {
            return Ok(Some(
                self.to_cover(
                    &self
                        .by_minimal
                        .iter()
                        .map(|s| *s.last().unwrap())
                        .collect::<Vec<_>>(),
                ),
            ));
        }
        if p == 1.0 {
            return Ok(None);
        }
        let costs = self.costs(p);
        let greedy = self.greedy(&costs);
        if self.total(&greedy, p) <= HALF {
            return Ok(Some(self.to_cover(&greedy)));
        }
        let mut state = State::new(&costs, Goal::AtMostHalf, HALF, None);
        let mut chosen = Vec::new();
        self.dfs(&mut state, &self.all_uncovered(), &mut chosen, 0.0, p)?;
        Ok(state.best.map(|b| self.to_cover(&b)))
    }

    pub fn is_p_small(&self, p: f64) -> Result<bool> {
        Ok(self.small_cover(p)?.is_some())
    }

    pub fn expectation_threshold(&self, tol: f64) -> Result<ExpectationThreshold> {
        if !(tol > 0.0) {
            return Err(Error::InvalidTolerance(tol));
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut witness = self
            .small_cover(0.0)?
            .expect("every cover is free at p = 0");
        for _ in 0..MAX_Q_ITERATIONS {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match self.small_cover(mid)? {
                Some(cover) => {
                    lo = mid;
                    witness = cover;
                }
                None => hi = mid,
            }
        }
        Ok(ExpectationThreshold {
            q: 0.5 * (lo + hi),
            witness_cover: witness,
            tolerance: tol,
        })
    }

    fn dfs(
        &self,
        state: &mut State<'_>,
        uncovered: &[u64],
        chosen: &mut Vec<usize>,
        cost: f64,
        p: f64,
    ) -> Result<()> {
        if state.found {
            return Ok(());
        }
        state.nodes += 1;
        if state.nodes > self.node_cap {
            return Err(Error::CapExceeded(format!(
                "cover search exceeded {} nodes",
                self.node_cap
            )));
        }
        if uncovered.iter().all(|&w| w == 0) {
            self.record(state, chosen, p);
            return Ok(());
        }

        if let Some(&seen_cost) = state.seen.get(uncovered) {
            if seen_cost <= cost {
                return Ok(());
            }
        }
        if state.seen.len() < TRANSPOSITION_CAP {
            state.seen.insert(uncovered.to_vec(), cost);
        }

        // Dual lower bound: start from the even charges, then raise each
        // minimal's charge by the smallest residual slack among its subsets.
        let open: Vec<usize> = ones(uncovered).collect();
        let mut charges = Vec::with_capacity(open.len());
        for &i in &open {
            let mut charge = f64::INFINITY;
            for &c in &self.by_minimal[i] {
                let k = self.covered_count(c, uncovered);
                state.scratch[c] = k;
                state.slack[c] = state.costs[c];
                charge = charge.min(state.costs[c] / k as f64);
            }
            charges.push(charge);
        }
        let (branch_on, _) = open
            .iter()
            .zip(&charges)
            .fold(
                (usize::MAX, -1.0),
                |acc, (&i, &y)| if y > acc.1 { (i, y) } else { acc },
            );
        for (&i, &y) in open.iter().zip(&charges) {
            for &c in &self.by_minimal[i] {
                state.slack[c] -= y;
            }
        }
        for (&i, y) in open.iter().zip(charges.iter_mut()) {
            let delta = self.by_minimal[i]
                .iter()
                .map(|&c| state.slack[c])
                .fold(f64::INFINITY, f64::min);
            if delta > 0.0 {
                *y += delta;
                for &c in &self.by_minimal[i] {
                    state.slack[c] -= delta;
                }
            }
        }
        let bound: f64 = charges.iter().sum();
        if self.prune(state, cost + bound) {
            return Ok(());
        }

        let target = self.f.minimals()[branch_on].bits();
        let mut branches: Vec<(f64, usize)> = self.by_minimal[branch_on]
            .iter()
            .copied()
            .filter(|&c| self.closure(c, uncovered) == self.candidates[c].mask.bits())
            .map(|c| (state.costs[c] / state.scratch[c] as f64, c))
            .collect();
        debug_assert!(branches
            .iter()
            .any(|&(_, c)| self.candidates[c].mask.bits() & !target == 0));
        // Candidate indices are already canonical, so ties fall back to canonical order.
        branches.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (_, c) in branches {
            let next: Vec<u64> = uncovered
                .iter()
                .zip(self.cov(c))
                .map(|(u, v)| u & !v)
                .collect();
            chosen.push(c);
            let result = self.dfs(state, &next, chosen, cost + state.costs[c], p);
            chosen.pop();
            result?;
            if state.found {
                break;
            }
        }
        Ok(())
    }

    fn prune(&self, state: &State<'_>, lower: f64) -> bool {
        match state.goal {
            Goal::Minimize => lower >= state.best_cost * (1.0 - 1e-12),
            Goal::AtMostHalf => lower > HALF,
        }
    }

    fn record(&self, state: &mut State<'_>, chosen: &[usize], p: f64) {
        let total = self.total(chosen, p);
        match state.goal {
            Goal::AtMostHalf => {
                if total <= HALF {
                    state.best = Some(chosen.to_vec());
                    state.found = true;
                }
            }
            Goal::Minimize => {
                let better = total < state.best_cost
                    || (total == state.best_cost
                        && state.best.as_ref().is_none_or(|b| {
                            self.to_cover(chosen).lex_key() < self.to_cover(b).lex_key()
                        }));
                if better {
                    state.best_cost = total;
                    state.best = Some(chosen.to_vec());
                }
            }
        }
    }
}
