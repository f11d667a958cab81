//! State alphabet construction over a returns sample, and conversion between
//! returns and discrete state indices.
//!
//! States are numbered `1..=s`. State `i` covers the half-open interval
//! `[b[i-1], b[i])` between consecutive boundaries; the outer states are
//! unbounded, so every real return classifies to exactly one state. A return
//! that hits a boundary exactly goes to the higher state.

use alloc::vec::Vec;

use crate::error::Error;
use crate::series::{ReturnsMode, ReturnsSeries};
use crate::Result;

/// How the returns range is partitioned into states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerMethod {
    /// Sort the sample and cut at quantile positions: groups equal in count.
    EqualCount,
    /// Cut `[min, max]` into equal-width sub-intervals.
    EqualWidth,
    /// Equal widths over `[-k*sigma, +k*sigma]` with two unbounded tail
    /// states; `k` is the sigma multiplier passed to [`build_quantizer`].
    Combined,
}

/// The state alphabet: boundaries, per-state mean returns and bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    states: usize,
    boundaries: Vec<f64>,
    means: Vec<f64>,
    counts: Vec<usize>,
    method: QuantizerMethod,
    sigma_k: f64,
    mode: ReturnsMode,
    step: usize,
}

impl Quantizer {
    pub fn states(&self) -> usize {
        self.states
    }

    /// Ascending interior boundaries, `states - 1` of them.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Per-state mean training return, ascending, one per state.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Training representatives per state; every entry is at least 1.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn method(&self) -> QuantizerMethod {
        self.method
    }

    pub fn sigma_k(&self) -> f64 {
        self.sigma_k
    }

    pub fn mode(&self) -> ReturnsMode {
        self.mode
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Rebuilds a quantizer from previously exported parts (no training data).
    ///
    /// Validates the shape and ordering invariants; training counts are
    /// carried through as given.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        states: usize,
        boundaries: Vec<f64>,
        means: Vec<f64>,
        counts: Vec<usize>,
        method: QuantizerMethod,
        sigma_k: f64,
        mode: ReturnsMode,
        step: usize,
    ) -> Result<Self> {
        if states < 2 || boundaries.len() != states - 1 || means.len() != states {
            return Err(Error::InvalidConfig {
                what: "quantizer parts have inconsistent sizes",
            });
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig {
                what: "quantizer boundaries must be strictly increasing",
            });
        }
        if means.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidConfig {
                what: "quantizer means must be ascending",
            });
        }
        let counts = if counts.is_empty() {
            alloc::vec![1; states]
        } else if counts.len() == states {
            counts
        } else {
            return Err(Error::InvalidConfig {
                what: "quantizer counts length must match states",
            });
        };
        Ok(Self {
            states,
            boundaries,
            means,
            counts,
            method,
            sigma_k,
            mode,
            step,
        })
    }

    /// The 1-based state index of a return value.
    pub fn state_of(&self, r: f64) -> usize {
        // number of boundaries <= r, so a boundary hit goes to the higher state
        self.boundaries.partition_point(|&b| b <= r) + 1
    }

    /// The representative (mean training) return of a state.
    pub fn mean_of(&self, state: usize) -> Result<f64> {
        if state == 0 || state > self.states {
            return Err(Error::StateOutOfRange {
                state,
                alphabet: self.states,
            });
        }
        Ok(self.means[state - 1])
    }
}

/// A sequence of state indices over the alphabet `1..=s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSequence {
    states: Vec<usize>,
    alphabet: usize,
    step: usize,
}

impl StateSequence {
    pub fn new(states: Vec<usize>, alphabet: usize, step: usize) -> Result<Self> {
        if alphabet < 1 {
            return Err(Error::InvalidConfig {
                what: "alphabet must be nonempty",
            });
        }
        if let Some(&bad) = states.iter().find(|&&s| s == 0 || s > alphabet) {
            return Err(Error::StateOutOfRange {
                state: bad,
                alphabet,
            });
        }
        Ok(Self {
            states,
            alphabet,
            step,
        })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Re-tags the sequence with a sampling step, e.g. after prediction.
    pub fn with_step(mut self, step: usize) -> Self {
        self.step = step;
        self
    }

    /// The trailing `n` states, e.g. as a prediction seed.
    pub fn tail(&self, n: usize) -> Result<&[usize]> {
        if n > self.states.len() {
            return Err(Error::SequenceTooShort {
                needed: n,
                got: self.states.len(),
            });
        }
        Ok(&self.states[self.states.len() - n..])
    }
}

/// Builds the state alphabet from a returns sample.
///
/// `sigma_k` is only read by [`QuantizerMethod::Combined`]. After the initial
/// division, empty states are repaired by merging them into a neighbor and
/// re-splitting the most populous state until every state has at least one
/// training representative.
pub fn build_quantizer(
    returns: &ReturnsSeries,
    s: usize,
    method: QuantizerMethod,
    sigma_k: f64,
) -> Result<Quantizer> {
    if s < 2 {
        return Err(Error::InvalidConfig {
            what: "state count must be at least 2",
        });
    }
    if method == QuantizerMethod::Combined && !(sigma_k > 0.0) {
        return Err(Error::InvalidConfig {
            what: "sigma multiplier must be positive",
        });
    }
    let n = returns.len();
    if n < s {
        return Err(Error::TooFewReturns { states: s, got: n });
    }
    let mut sorted = returns.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();
    if distinct < s {
        return Err(Error::InfeasibleAlphabet {
            states: s,
            distinct,
        });
    }

    let mut boundaries = initial_boundaries(&sorted, s, method, sigma_k);

    // Correction of the division: merge each empty state into a neighbor
    // (toward the lower index) and re-split the most populous splittable
    // state at its median. Each pass removes one empty state, so this
    // terminates within s passes.
    loop {
        let cuts = state_cuts(&sorted, &boundaries);
        let empty = cuts.windows(2).position(|w| w[0] == w[1]);
        let Some(e) = empty else { break };
        if e == 0 {
            boundaries.remove(0);
        } else {
            boundaries.remove(e - 1);
        }
        let cuts = state_cuts(&sorted, &boundaries);
        let split = best_split(&sorted, &cuts);
        let Some(b) = split else {
            return Err(Error::InfeasibleAlphabet {
                states: s,
                distinct,
            });
        };
        let pos = boundaries.partition_point(|&x| x < b);
        boundaries.insert(pos, b);
    }

    let cuts = state_cuts(&sorted, &boundaries);
    let mut means = Vec::with_capacity(s);
    let mut counts = Vec::with_capacity(s);
    for w in cuts.windows(2) {
        let members = &sorted[w[0]..w[1]];
        counts.push(members.len());
        means.push(members.iter().sum::<f64>() / members.len() as f64);
    }

    Ok(Quantizer {
        states: s,
        boundaries,
        means,
        counts,
        method,
        sigma_k,
        mode: returns.mode(),
        step: returns.step(),
    })
}

fn initial_boundaries(sorted: &[f64], s: usize, method: QuantizerMethod, sigma_k: f64) -> Vec<f64> {
    let n = sorted.len();
    match method {
        QuantizerMethod::EqualCount => (1..s)
            .map(|k| {
                let cut = libm::round((k * n) as f64 / s as f64) as usize;
                let cut = cut.clamp(1, n - 1);
                0.5 * (sorted[cut - 1] + sorted[cut])
            })
            .collect(),
        QuantizerMethod::EqualWidth => {
            let min = sorted[0];
            let max = sorted[n - 1];
            (1..s)
                .map(|k| min + k as f64 * (max - min) / s as f64)
                .collect()
        }
        QuantizerMethod::Combined => {
            let mean = sorted.iter().sum::<f64>() / n as f64;
            let var = sorted.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let reach = sigma_k * libm::sqrt(var);
            if s == 2 {
                return alloc::vec![0.0];
            }
            // s - 1 boundaries spanning [-reach, +reach]; the two outer
            // states are the unbounded tails.
            (0..s - 1)
                .map(|j| -reach + j as f64 * (2.0 * reach) / (s - 2) as f64)
                .collect()
        }
    }
}

/// Member ranges per state within the sorted sample: `cuts[i]..cuts[i+1]`
/// holds state `i + 1`.
fn state_cuts(sorted: &[f64], boundaries: &[f64]) -> Vec<usize> {
    let mut cuts = Vec::with_capacity(boundaries.len() + 2);
    cuts.push(0);
    for &b in boundaries {
        cuts.push(sorted.partition_point(|&v| v < b));
    }
    cuts.push(sorted.len());
    cuts
}

/// Picks the most populous state with at least two distinct member values and
/// returns the boundary that splits it nearest its median; ties go to the
/// lower state index and the lower cut.
fn best_split(sorted: &[f64], cuts: &[usize]) -> Option<f64> {
    let mut best: Option<(usize, usize)> = None; // (count, state index)
    for (i, w) in cuts.windows(2).enumerate() {
        let members = &sorted[w[0]..w[1]];
        if members.len() < 2 || members.first() == members.last() {
            continue;
        }
        if best.map_or(true, |(c, _)| members.len() > c) {
            best = Some((members.len(), i));
        }
    }
    let (_, i) = best?;
    let members = &sorted[cuts[i]..cuts[i + 1]];
    let m = members.len();
    let mut chosen: Option<usize> = None;
    for c in 1..m {
        if members[c - 1] != members[c] {
            let better = match chosen {
                None => true,
                // distance of cut c from the median position m/2, doubled to
                // stay in integers: |2c - m|
                Some(prev) => {
                    let d = (2 * c).abs_diff(m);
                    let dp = (2 * prev).abs_diff(m);
                    d < dp
                }
            };
            if better {
                chosen = Some(c);
            }
        }
    }
    let c = chosen?;
    Some(0.5 * (members[c - 1] + members[c]))
}

/// Maps every return to its state index under the quantizer.
pub fn classify(returns: &ReturnsSeries, q: &Quantizer) -> Result<StateSequence> {
    if returns.mode() != q.mode() || returns.step() != q.step() {
        return Err(Error::QuantizerMismatch);
    }
    let states = returns.values().iter().map(|&r| q.state_of(r)).collect();
    Ok(StateSequence {
        states,
        alphabet: q.states(),
        step: q.step(),
    })
}

/// Replaces each state index with its representative mean return.
pub fn dequantize(states: &StateSequence, q: &Quantizer) -> Result<Vec<f64>> {
    if states.alphabet() != q.states() {
        return Err(Error::QuantizerMismatch);
    }
    states.states().iter().map(|&s| q.mean_of(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{compute_returns, PriceSeries};
    use alloc::vec;
    use alloc::vec::Vec;

    fn returns_from(values: &[f64]) -> ReturnsSeries {
        // A price series whose lag-1 absolute returns are exactly `values`.
        let mut p = vec![0.0];
        for &v in values {
            p.push(p.last().unwrap() + v);
        }
        let series = PriceSeries::new(p).unwrap();
        compute_returns(&series, 1, ReturnsMode::Absolute).unwrap()
    }

    #[test]
    fn equal_count_hand_example() {
        let r = returns_from(&[-2.0, -1.0, 1.0, 2.0]);
        let q = build_quantizer(&r, 2, QuantizerMethod::EqualCount, 3.0).unwrap();
        assert_eq!(q.boundaries(), &[0.0]);
        assert_eq!(q.means(), &[-1.5, 1.5]);
        assert_eq!(q.counts(), &[2, 2]);
    }

    #[test]
    fn equal_width_hand_example() {
        let r = returns_from(&[0.0, 1.0, 2.0, 3.0]);
        let q = build_quantizer(&r, 2, QuantizerMethod::EqualWidth, 3.0).unwrap();
        assert_eq!(q.boundaries(), &[1.5]);
        assert_eq!(q.means(), &[0.5, 2.5]);
    }

    #[test]
    fn equal_count_antisymmetric_on_symmetric_sample() {
        let r = returns_from(&[-3.0, -2.0, -0.5, 0.5, 2.0, 3.0]);
        let q = build_quantizer(&r, 2, QuantizerMethod::EqualCount, 3.0).unwrap();
        assert_eq!(q.boundaries(), &[0.0]);
        assert_eq!(q.means()[0], -q.means()[1]);

        let q4 = build_quantizer(&r, 6, QuantizerMethod::EqualCount, 3.0).unwrap();
        let b = q4.boundaries().to_vec();
        for i in 0..b.len() {
            assert!((b[i] + b[b.len() - 1 - i]).abs() < 1e-12);
        }
        let m = q4.means().to_vec();
        for i in 0..m.len() {
            assert!((m[i] + m[m.len() - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_hand_example() {
        let train = returns_from(&[-2.0, -1.0, 1.0, 2.0]);
        let q = build_quantizer(&train, 2, QuantizerMethod::EqualCount, 3.0).unwrap();
        let r = returns_from(&[-2.0, 1.0]);
        let s = classify(&r, &q).unwrap();
        assert_eq!(s.states(), &[1, 2]);
    }

    #[test]
    fn boundary_hit_goes_to_higher_state() {
        let train = returns_from(&[-2.0, -1.0, 1.0, 2.0]);
        let q = build_quantizer(&train, 2, QuantizerMethod::EqualCount, 3.0).unwrap();
        assert_eq!(q.state_of(0.0), 2);
        assert_eq!(q.state_of(-1e-12), 1);
    }

    #[test]
    fn training_returns_hit_every_state() {
        let train = returns_from(&[5.0, 1.0, 1.0, 1.0, 1.0, 2.0, 3.0, -1.0, 0.5, 0.5]);
        for s in 2..=5 {
            let q = build_quantizer(&train, s, QuantizerMethod::EqualCount, 3.0).unwrap();
            let cls = classify(&train, &q).unwrap();
            let mut seen = vec![false; s];
            for &st in cls.states() {
                seen[st - 1] = true;
            }
            assert!(seen.iter().all(|&x| x), "s={s}: {:?}", q.boundaries());
            assert!(q.counts().iter().all(|&c| c >= 1));
        }
    }

    #[test]
    fn repair_fixes_duplicate_heavy_sample() {
        // 7 copies of 1.0 would leave states empty without correction.
        let train = returns_from(&[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 4.0]);
        let q = build_quantizer(&train, 4, QuantizerMethod::EqualCount, 3.0).unwrap();
        assert!(q.counts().iter().all(|&c| c >= 1));
        let b = q.boundaries();
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        // means ascending and inside their intervals
        let m = q.means();
        assert!(m.windows(2).all(|w| w[0] <= w[1]));
        for (i, &mean) in m.iter().enumerate() {
            if i > 0 {
                assert!(mean >= b[i - 1]);
            }
            if i < b.len() {
                assert!(mean < b[i]);
            }
        }
    }

    #[test]
    fn infeasible_alphabet_is_rejected() {
        let train = returns_from(&[1.0, 1.0, 2.0, 2.0]);
        let err = build_quantizer(&train, 3, QuantizerMethod::EqualCount, 3.0).unwrap_err();
        assert_eq!(
            err,
            Error::InfeasibleAlphabet {
                states: 3,
                distinct: 2
            }
        );
    }

    #[test]
    fn too_few_returns_is_rejected() {
        let train = returns_from(&[1.0, 2.0]);
        let err = build_quantizer(&train, 3, QuantizerMethod::EqualCount, 3.0).unwrap_err();
        assert_eq!(err, Error::TooFewReturns { states: 3, got: 2 });
    }

    #[test]
    fn combined_method_covers_tails() {
        let train = returns_from(&[-9.0, -1.0, -0.5, -0.2, 0.2, 0.5, 1.0, 9.0]);
        let q = build_quantizer(&train, 4, QuantizerMethod::Combined, 1.0).unwrap();
        assert_eq!(q.boundaries().len(), 3);
        assert!(q.counts().iter().all(|&c| c >= 1));
        // extreme values classify into the unbounded tail states
        assert_eq!(q.state_of(-100.0), 1);
        assert_eq!(q.state_of(100.0), 4);
    }

    #[test]
    fn dequantize_is_table_lookup() {
        let train = returns_from(&[-2.0, -1.0, 1.0, 2.0]);
        let q = build_quantizer(&train, 2, QuantizerMethod::EqualCount, 3.0).unwrap();
        let s = StateSequence::new(vec![1, 2], 2, 1).unwrap();
        assert_eq!(dequantize(&s, &q).unwrap(), vec![-1.5, 1.5]);
        let empty = StateSequence::new(vec![], 2, 1).unwrap();
        assert_eq!(dequantize(&empty, &q).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn dequantized_value_stays_in_the_state_interval() {
        let train = returns_from(&[3.0, -1.0, 0.25, 7.0, 2.0, 2.0, -4.0, 0.5, 1.5, 6.0]);
        let q = build_quantizer(&train, 4, QuantizerMethod::EqualCount, 3.0).unwrap();
        let cls = classify(&train, &q).unwrap();
        let deq = dequantize(&cls, &q).unwrap();
        for (&r, &d) in train.values().iter().zip(deq.iter()) {
            assert_eq!(q.state_of(r), q.state_of(d));
        }
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let series = PriceSeries::new(vec![100.0, 101.0, 103.0, 102.0, 105.0]).unwrap();
        let abs = compute_returns(&series, 1, ReturnsMode::Absolute).unwrap();
        let rel = compute_returns(&series, 1, ReturnsMode::Relative).unwrap();
        let q = build_quantizer(&abs, 2, QuantizerMethod::EqualCount, 3.0).unwrap();
        assert_eq!(classify(&rel, &q).unwrap_err(), Error::QuantizerMismatch);
    }

    #[test]
    fn from_parts_round_trip() {
        let train = returns_from(&[-2.0, -1.0, 1.0, 2.0, 0.3, -0.4]);
        let q = build_quantizer(&train, 3, QuantizerMethod::EqualCount, 3.0).unwrap();
        let q2 = Quantizer::from_parts(
            q.states(),
            q.boundaries().to_vec(),
            q.means().to_vec(),
            q.counts().to_vec(),
            q.method(),
            q.sigma_k(),
            q.mode(),
            q.step(),
        )
        .unwrap();
        assert_eq!(q, q2);
    }
}
