//! Order-`r` transition statistics over generalized states and deterministic
//! most-probable-state generation.
//!
//! A generalized state is an `r`-tuple of consecutive states; estimating
//! transitions from tuples to next states reduces the order-`r` chain to a
//! first-order one. Counts are kept for every order from `r` down to 1 plus
//! the marginal state distribution, so sparse histories can back off to
//! shorter ones when they have fewer than `n_min` observations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Error;
use crate::quantizer::StateSequence;
use crate::Result;

/// Absolute probability slack used when comparing against the maximum, to
/// keep exact mathematical ties from being lost to float rounding.
const PROB_EPS: f64 = 1e-12;

/// One of the two deterministic prediction rollouts; they differ only in how
/// bifurcation ties are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Resolve every bifurcation toward the smaller state index.
    Lower,
    /// Resolve every bifurcation toward the larger state index.
    Upper,
}

/// Transition counts from generalized states (history tuples) to next states.
///
/// Only observed tuples are stored; the conceptual dense table has `s^r` rows
/// and `s` columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    order: usize,
    alphabet: usize,
    /// `by_order[k - 1]` maps each observed `k`-tuple to its next-state
    /// count vector, for `k = 1..=order`.
    by_order: Vec<BTreeMap<Vec<usize>, Vec<u64>>>,
    /// Occurrences of each state anywhere in the training sequence.
    marginal: Vec<u64>,
}

impl TransitionTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Next-state counts recorded for a full-order history, if observed.
    pub fn counts(&self, history: &[usize]) -> Option<&[u64]> {
        self.counts_at(history.len(), history)
    }

    /// Next-state counts for a history of any order `1..=r`.
    pub fn counts_at(&self, order: usize, history: &[usize]) -> Option<&[u64]> {
        if order == 0 || order > self.order || history.len() != order {
            return None;
        }
        self.by_order[order - 1].get(history).map(Vec::as_slice)
    }

    /// Total observations of a history tuple (the row sum).
    pub fn history_total(&self, history: &[usize]) -> u64 {
        self.counts(history).map_or(0, |c| c.iter().sum())
    }

    /// Conditional next-state probabilities for a full-order history, if the
    /// history was observed.
    pub fn probabilities(&self, history: &[usize]) -> Option<Vec<f64>> {
        let counts = self.counts(history)?;
        let total: u64 = counts.iter().sum();
        Some(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    /// Occurrence counts of each state over the whole training sequence.
    pub fn marginal_counts(&self) -> &[u64] {
        &self.marginal
    }

    /// Iterates the stored full-order rows in deterministic (tuple) order.
    pub fn rows(&self) -> impl Iterator<Item = (&[usize], &[u64])> {
        self.by_order[self.order - 1]
            .iter()
            .map(|(h, c)| (h.as_slice(), c.as_slice()))
    }

    /// The probability distribution actually used for a history under the
    /// back-off rule, together with the order it was found at (0 marks the
    /// marginal distribution).
    pub fn effective_distribution(&self, history: &[usize], n_min: usize) -> (Vec<f64>, usize) {
        let len = history.len();
        for k in (1..=self.order.min(len)).rev() {
            if let Some(counts) = self.counts_at(k, &history[len - k..]) {
                let total: u64 = counts.iter().sum();
                if total >= n_min as u64 {
                    let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
                    return (probs, k);
                }
            }
        }
        let total: u64 = self.marginal.iter().sum();
        let probs = self
            .marginal
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect();
        (probs, 0)
    }
}

/// Counts every `(r-tuple, next state)` window of the sequence, along with
/// all shorter-order windows used for back-off.
pub fn estimate_transitions(states: &StateSequence, order: usize) -> Result<TransitionTable> {
    if order == 0 {
        return Err(Error::InvalidConfig {
            what: "chain order must be at least 1",
        });
    }
    let seq = states.states();
    if seq.len() < order + 1 {
        return Err(Error::SequenceTooShort {
            needed: order + 1,
            got: seq.len(),
        });
    }
    let s = states.alphabet();
    let mut by_order: Vec<BTreeMap<Vec<usize>, Vec<u64>>> = Vec::with_capacity(order);
    for k in 1..=order {
        let mut map: BTreeMap<Vec<usize>, Vec<u64>> = BTreeMap::new();
        for w in seq.windows(k + 1) {
            let (hist, next) = w.split_at(k);
            let row = map
                .entry(hist.to_vec())
                .or_insert_with(|| alloc::vec![0; s]);
            row[next[0] - 1] += 1;
        }
        by_order.push(map);
    }
    let mut marginal = alloc::vec![0u64; s];
    for &st in seq {
        marginal[st - 1] += 1;
    }
    Ok(TransitionTable {
        order,
        alphabet: s,
        by_order,
        marginal,
    })
}

/// States whose transition probability comes within `delta` of the maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    states: Vec<usize>,
    max_prob: f64,
}

impl CandidateSet {
    pub fn new(states: Vec<usize>, max_prob: f64) -> Self {
        debug_assert!(!states.is_empty());
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        Self { states, max_prob }
    }

    /// Ascending member state indices; never empty.
    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn max_prob(&self) -> f64 {
        self.max_prob
    }
}

/// Collects every state with probability at least `max - delta` under the
/// effective (possibly backed-off) distribution for `history`.
///
/// Histories observed fewer than `n_min` times fall back to shorter
/// histories, ending at the marginal state distribution, so the result is
/// never empty.
pub fn next_state_candidates(
    table: &TransitionTable,
    history: &[usize],
    delta: f64,
    n_min: usize,
) -> CandidateSet {
    assert!(
        history.len() == table.order(),
        "history length {} does not match chain order {}",
        history.len(),
        table.order()
    );
    assert!((0.0..=1.0).contains(&delta), "delta must lie in [0, 1]");
    assert!(n_min >= 1, "n_min must be at least 1");
    let (probs, _) = table.effective_distribution(history, n_min);
    let max_prob = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = max_prob - delta - PROB_EPS;
    let states = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p >= threshold)
        .map(|(i, _)| i + 1)
        .collect();
    CandidateSet { states, max_prob }
}

/// Picks one state from a candidate set by the cluster rules:
///
/// 1. split the candidates into maximal runs of consecutive indices and keep
///    the largest run(s);
/// 2. an odd-sized run resolves to its central element;
/// 3. an even-sized run resolves to whichever of its two central elements is
///    closer to `center`;
/// 4. if those are equidistant, the scenario decides (lower picks the smaller
///    index, upper the larger) — a bifurcation point;
/// 5. with several runs of maximal size, each run's representative becomes a
///    new element and the rules repeat over the representatives.
pub fn select_state(candidates: &CandidateSet, center: usize, scenario: Scenario) -> usize {
    select_state_traced(candidates, center, scenario).0
}

/// Like [`select_state`], additionally reporting whether any bifurcation tie
/// was resolved along the way.
pub fn select_state_traced(
    candidates: &CandidateSet,
    center: usize,
    scenario: Scenario,
) -> (usize, bool) {
    assert!(!candidates.states().is_empty(), "candidate set is empty");
    select_from(candidates.states(), center, scenario)
}

fn select_from(elements: &[usize], center: usize, scenario: Scenario) -> (usize, bool) {
    if elements.len() == 1 {
        return (elements[0], false);
    }
    let runs = consecutive_runs(elements);
    let max_len = runs.iter().map(|r| r.len()).max().expect("nonempty");
    let kept: Vec<&[usize]> = runs.iter().filter(|r| r.len() == max_len).copied().collect();
    if kept.len() == 1 {
        return resolve_run(kept[0], center, scenario);
    }
    let mut bifurcated = false;
    let reps: Vec<usize> = kept
        .iter()
        .map(|run| {
            let (rep, b) = resolve_run(run, center, scenario);
            bifurcated |= b;
            rep
        })
        .collect();
    if reps.len() == elements.len() {
        // Every cluster was an isolated state; re-clustering cannot shrink
        // the set further, so the representatives resolve as one group.
        let (rep, b) = resolve_run(&reps, center, scenario);
        (rep, bifurcated | b)
    } else {
        let (rep, b) = select_from(&reps, center, scenario);
        (rep, bifurcated | b)
    }
}

/// Maximal runs of consecutive indices within an ascending slice.
fn consecutive_runs(elements: &[usize]) -> Vec<&[usize]> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=elements.len() {
        if i == elements.len() || elements[i] != elements[i - 1] + 1 {
            runs.push(&elements[start..i]);
            start = i;
        }
    }
    runs
}

/// Steps 2–4 applied to one ordered group of elements.
fn resolve_run(run: &[usize], center: usize, scenario: Scenario) -> (usize, bool) {
    let n = run.len();
    if n % 2 == 1 {
        return (run[n / 2], false);
    }
    let a = run[n / 2 - 1];
    let b = run[n / 2];
    let da = a.abs_diff(center);
    let db = b.abs_diff(center);
    if da < db {
        (a, false)
    } else if db < da {
        (b, false)
    } else {
        // bifurcation point
        match scenario {
            Scenario::Lower => (a, true),
            Scenario::Upper => (b, true),
        }
    }
}

/// Rolls the chain forward `horizon` steps, feeding each selected state back
/// into the history. Deterministic for fixed inputs.
pub fn predict_states(
    table: &TransitionTable,
    seed: &[usize],
    horizon: usize,
    delta: f64,
    n_min: usize,
    center: usize,
    scenario: Scenario,
) -> Result<StateSequence> {
    predict_states_traced(table, seed, horizon, delta, n_min, center, scenario).map(|(s, _)| s)
}

/// Like [`predict_states`], also reporting the 0-based rollout positions at
/// which a bifurcation tie was resolved.
pub fn predict_states_traced(
    table: &TransitionTable,
    seed: &[usize],
    horizon: usize,
    delta: f64,
    n_min: usize,
    center: usize,
    scenario: Scenario,
) -> Result<(StateSequence, Vec<usize>)> {
    if horizon == 0 {
        return Err(Error::InvalidConfig {
            what: "prediction horizon must be at least 1",
        });
    }
    if seed.len() != table.order() {
        return Err(Error::SequenceTooShort {
            needed: table.order(),
            got: seed.len(),
        });
    }
    if center == 0 || center > table.alphabet() {
        return Err(Error::StateOutOfRange {
            state: center,
            alphabet: table.alphabet(),
        });
    }
    let mut history = seed.to_vec();
    let mut out = Vec::with_capacity(horizon);
    let mut bifurcations = Vec::new();
    for step in 0..horizon {
        let candidates = next_state_candidates(table, &history, delta, n_min);
        let (next, bifurcated) = select_state_traced(&candidates, center, scenario);
        if bifurcated {
            bifurcations.push(step);
        }
        out.push(next);
        history.rotate_left(1);
        *history.last_mut().expect("order >= 1") = next;
    }
    let seq = StateSequence::new(out, table.alphabet(), 0)?;
    Ok((seq, bifurcations))
}
