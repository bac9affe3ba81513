//! Family-wise error control for a set of pairwise hypotheses.
//!
//! Every procedure maps raw p-values to adjusted p-values (APVs); a
//! hypothesis is rejected at level α when its APV is below α. Step-down and
//! step-up procedures operate on p-values sorted ascending, ties keeping
//! the order in which hypotheses were supplied.
//!
//! Shaffer's and Bergmann's procedures exploit the logical structure of
//! all-pairs hypotheses ("system i performs like system j"): the set of
//! hypotheses that can be simultaneously true is determined by a partition
//! of the systems into equality classes.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{Correction, Mode, DEFAULT_BERGMANN_CAP};

/// Hard limit for exhaustive-set enumeration: pair sets are stored as
/// 64-bit masks, and 11 systems already give 55 pairs.
pub const MAX_EXHAUSTIVE_SYSTEMS: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub pair: (String, String),
    pub raw_p: f64,
}

/// Pairwise null hypotheses over a fixed list of systems.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSet {
    systems: Vec<String>,
    hypotheses: Vec<Hypothesis>,
    /// system indices `(i, j)` with `i < j` for each hypothesis
    indices: Vec<(usize, usize)>,
    mode: Mode,
}

impl HypothesisSet {
    pub fn new(systems: Vec<String>, mode: Mode, hypotheses: Vec<Hypothesis>) -> Result<Self> {
        let n = systems.len();
        if n < 2 {
            return Err(Error::TooFewSystems(n));
        }
        let lookup: HashMap<&str, usize> = systems.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if lookup.len() != n {
            let dup = systems
                .iter()
                .enumerate()
                .find(|(i, s)| lookup[s.as_str()] != *i)
                .map(|(_, s)| s.clone())
                .unwrap_or_default();
            return Err(Error::DuplicateSystemName(dup));
        }
        let expected_k = match &mode {
            Mode::NxN => n * (n - 1) / 2,
            Mode::Nx1 { baseline } => {
                if !lookup.contains_key(baseline.as_str()) {
                    return Err(Error::UnknownBaseline(baseline.clone()));
                }
                n - 1
            }
        };
        if hypotheses.len() != expected_k {
            return Err(Error::InvalidHypotheses(format!(
                "{} mode over {n} systems needs {expected_k} hypotheses, got {}",
                mode.label(),
                hypotheses.len()
            )));
        }
        let mut indices = Vec::with_capacity(hypotheses.len());
        let mut seen = BTreeSet::new();
        for h in &hypotheses {
            if !(0.0..=1.0).contains(&h.raw_p) {
                return Err(Error::InvalidHypotheses(format!(
                    "p-value {} for {:?} is outside [0, 1]",
                    h.raw_p, h.pair
                )));
            }
            let (Some(&a), Some(&b)) = (lookup.get(h.pair.0.as_str()), lookup.get(h.pair.1.as_str())) else {
                return Err(Error::InvalidHypotheses(format!("unknown system in pair {:?}", h.pair)));
            };
            if a == b {
                return Err(Error::InvalidHypotheses(format!("self-comparison {:?}", h.pair)));
            }
            let idx = (a.min(b), a.max(b));
            if !seen.insert(idx) {
                return Err(Error::InvalidHypotheses(format!("pair {:?} listed twice", h.pair)));
            }
            if let Mode::Nx1 { baseline } = &mode {
                if h.pair.0 != *baseline && h.pair.1 != *baseline {
                    return Err(Error::InvalidHypotheses(format!(
                        "pair {:?} does not involve baseline {baseline:?}",
                        h.pair
                    )));
                }
            }
            indices.push(idx);
        }
        Ok(Self {
            systems,
            hypotheses,
            indices,
            mode,
        })
    }

    /// All-pairs hypotheses from p-values listed in lexicographic index
    /// order `(0,1), (0,2), …, (n-2,n-1)`.
    pub fn all_pairs(systems: Vec<String>, raw_p: &[f64]) -> Result<Self> {
        let n = systems.len();
        let mut hyps = Vec::new();
        let mut it = raw_p.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let Some(&p) = it.next() else {
                    return Err(Error::InvalidHypotheses(format!(
                        "expected {} p-values, got {}",
                        n * (n.saturating_sub(1)) / 2,
                        raw_p.len()
                    )));
                };
                hyps.push(Hypothesis {
                    pair: (systems[i].clone(), systems[j].clone()),
                    raw_p: p,
                });
            }
        }
        Self::new(systems, Mode::NxN, hyps)
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn k(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn raw_p(&self) -> Vec<f64> {
        self.hypotheses.iter().map(|h| h.raw_p).collect()
    }

    /// Hypothesis indices sorted by ascending p-value (stable).
    fn ascending(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.k()).collect();
        order.sort_by(|&a, &b| self.hypotheses[a].raw_p.total_cmp(&self.hypotheses[b].raw_p));
        order
    }

    fn require_all_pairs(&self, correction: Correction) -> Result<()> {
        if self.mode != Mode::NxN {
            return Err(Error::ModeMismatch {
                correction: correction.name(),
                required: "nxn",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedResults {
    /// Adjusted p-values aligned with the hypothesis order.
    pub apv: Vec<f64>,
    pub method: Correction,
}

impl AdjustedResults {
    pub fn is_rejected(&self, i: usize, alpha: f64) -> bool {
        self.apv[i] < alpha
    }

    /// Indices of hypotheses rejected at level `alpha`.
    pub fn rejected_at(&self, alpha: f64) -> Vec<usize> {
        (0..self.apv.len()).filter(|&i| self.is_rejected(i, alpha)).collect()
    }
}

/// Probability of at least one false rejection among `k` independent tests
/// run at level `alpha` without correction.
pub fn familywise_error_rate(alpha: f64, k: u32) -> f64 {
    1.0 - (1.0 - alpha).powi(k as i32)
}

pub fn adjust(h: &HypothesisSet, correction: Correction) -> Result<AdjustedResults> {
    adjust_with_cap(h, correction, DEFAULT_BERGMANN_CAP)
}

pub fn adjust_with_cap(h: &HypothesisSet, correction: Correction, bergmann_cap: usize) -> Result<AdjustedResults> {
    match correction {
        Correction::None => Ok(AdjustedResults {
            apv: h.raw_p(),
            method: Correction::None,
        }),
        Correction::Bonferroni => Ok(adjust_bonferroni(h)),
        Correction::Holm => Ok(adjust_holm(h)),
        Correction::Holland => Ok(adjust_holland(h)),
        Correction::Finner => Ok(adjust_finner(h)),
        Correction::Hochberg => Ok(adjust_hochberg(h)),
        Correction::Nemenyi => adjust_nemenyi(h),
        Correction::Shaffer => adjust_shaffer(h),
        Correction::Bergmann => adjust_bergmann(h, bergmann_cap),
    }
}

pub fn adjust_bonferroni(h: &HypothesisSet) -> AdjustedResults {
    let k = h.k() as f64;
    AdjustedResults {
        apv: h.hypotheses.iter().map(|x| (k * x.raw_p).min(1.0)).collect(),
        method: Correction::Bonferroni,
    }
}

/// Step-down: on ascending p, APV_i = min(1, max_{j ≤ i} weight(p_j, j)),
/// `j` being 1-based.
fn step_down(h: &HypothesisSet, method: Correction, weight: impl Fn(f64, usize) -> f64) -> AdjustedResults {
    let mut apv = vec![0.0; h.k()];
    let mut running = 0.0f64;
    for (pos, &idx) in h.ascending().iter().enumerate() {
        running = running.max(weight(h.hypotheses[idx].raw_p, pos + 1));
        apv[idx] = running.min(1.0);
    }
    AdjustedResults { apv, method }
}

pub fn adjust_holm(h: &HypothesisSet) -> AdjustedResults {
    let k = h.k();
    step_down(h, Correction::Holm, |p, j| (k + 1 - j) as f64 * p)
}

pub fn adjust_holland(h: &HypothesisSet) -> AdjustedResults {
    let k = h.k();
    step_down(h, Correction::Holland, |p, j| 1.0 - (1.0 - p).powi((k + 1 - j) as i32))
}

pub fn adjust_finner(h: &HypothesisSet) -> AdjustedResults {
    let k = h.k() as f64;
    step_down(h, Correction::Finner, |p, j| 1.0 - (1.0 - p).powf(k / j as f64))
}

/// Step-up: on ascending p, APV_i = min(1, min_{j ≥ i} (k+1-j)·p_j).
pub fn adjust_hochberg(h: &HypothesisSet) -> AdjustedResults {
    let k = h.k();
    let order = h.ascending();
    let mut apv = vec![0.0; k];
    let mut running = f64::INFINITY;
    for (pos, &idx) in order.iter().enumerate().rev() {
        running = running.min((k - pos) as f64 * h.hypotheses[idx].raw_p);
        apv[idx] = running.min(1.0);
    }
    AdjustedResults {
        apv,
        method: Correction::Hochberg,
    }
}

/// Bonferroni over all `n(n-1)/2` pairs.
pub fn adjust_nemenyi(h: &HypothesisSet) -> Result<AdjustedResults> {
    h.require_all_pairs(Correction::Nemenyi)?;
    Ok(AdjustedResults {
        method: Correction::Nemenyi,
        ..adjust_bonferroni(h)
    })
}

/// Possible numbers of simultaneously true pairwise hypotheses among
/// `n_systems` systems.
///
/// S(0) = S(1) = {0}; S(n) = ∪_{j=1..n} { C(j,2) + x : x ∈ S(n−j) }.
pub fn shaffer_true_counts(n_systems: usize) -> BTreeSet<u64> {
    let mut table: Vec<BTreeSet<u64>> = vec![BTreeSet::from([0])];
    for n in 1..=n_systems {
        let mut s = BTreeSet::new();
        for j in 1..=n {
            let within = (j * (j - 1) / 2) as u64;
            s.extend(table[n - j].iter().map(|x| within + x));
        }
        table.push(s);
    }
    table.swap_remove(n_systems)
}

pub fn adjust_shaffer(h: &HypothesisSet) -> Result<AdjustedResults> {
    h.require_all_pairs(Correction::Shaffer)?;
    let counts = shaffer_true_counts(h.systems.len());
    let k = h.k() as u64;
    Ok(step_down(h, Correction::Shaffer, |p, j| {
        let remaining = k + 1 - j as u64;
        let t = counts.range(..=remaining).next_back().copied().unwrap_or(0);
        t as f64 * p
    }))
}

/// Set of pairwise hypotheses, as a bit mask over pair indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PairSet(pub u64);

impl PairSet {
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, pair_index: usize) -> bool {
        self.0 >> pair_index & 1 == 1
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// Position of pair `(i, j)`, `i < j`, in the lexicographic list of all
/// pairs of `n` systems.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Every set of pairwise hypotheses that can be exactly the set of true
/// ones: for each partition of the systems into equality classes, the
/// pairs lying inside one class. Sorted and deduplicated.
pub fn bergmann_exhaustive_sets(n_systems: usize, cap: usize) -> Result<Vec<PairSet>> {
    let limit = cap.min(MAX_EXHAUSTIVE_SYSTEMS);
    if n_systems > limit {
        return Err(Error::TooManySystems { n: n_systems, cap: limit });
    }
    if n_systems < 2 {
        return Err(Error::TooFewSystems(n_systems));
    }
    let n = n_systems;
    let mut sets = Vec::new();
    // restricted growth strings: class[0] = 0, class[i] ≤ 1 + max(class[..i])
    let mut class = vec![0usize; n];
    let mut max_prefix = vec![0usize; n];
    loop {
        let mut mask = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                if class[i] == class[j] {
                    mask |= 1 << pair_index(n, i, j);
                }
            }
        }
        sets.push(PairSet(mask));

        // advance to the next restricted growth string
        let mut pos = n - 1;
        loop {
            if pos == 0 {
                sets.sort_unstable();
                sets.dedup();
                return Ok(sets);
            }
            if class[pos] <= max_prefix[pos - 1] {
                class[pos] += 1;
                max_prefix[pos] = max_prefix[pos - 1].max(class[pos]);
                for q in (pos + 1)..n {
                    class[q] = 0;
                    max_prefix[q] = max_prefix[pos];
                }
                break;
            }
            pos -= 1;
        }
    }
}

fn bergmann_pair_indices(h: &HypothesisSet) -> Vec<usize> {
    let n = h.systems.len();
    h.indices.iter().map(|&(i, j)| pair_index(n, i, j)).collect()
}

/// Bergmann–Hommel APVs.
///
/// A hypothesis leaves the acceptance set
/// `A = ∪{I exhaustive : min_{i∈I} p_i > α/|I|}` once α reaches
/// `max_{I ∋ h} |I|·min_{i∈I} p_i`; that threshold (capped at 1) is its APV.
pub fn adjust_bergmann(h: &HypothesisSet, cap: usize) -> Result<AdjustedResults> {
    h.require_all_pairs(Correction::Bergmann)?;
    let sets = bergmann_exhaustive_sets(h.systems.len(), cap)?;
    let mut p_by_pair = vec![f64::INFINITY; 64];
    let positions = bergmann_pair_indices(h);
    for (hyp, &pos) in h.hypotheses.iter().zip(&positions) {
        p_by_pair[pos] = hyp.raw_p;
    }
    let mut threshold = [0.0f64; 64];
    for set in sets.into_iter().filter(|s| !s.is_empty()) {
        let min_p = set.iter().map(|i| p_by_pair[i]).fold(f64::INFINITY, f64::min);
        let level = set.len() as f64 * min_p;
        for i in set.iter() {
            threshold[i] = threshold[i].max(level);
        }
    }
    Ok(AdjustedResults {
        apv: positions.iter().map(|&pos| threshold[pos].min(1.0)).collect(),
        method: Correction::Bergmann,
    })
}

/// Bergmann–Hommel decisions at one level α, evaluated straight from the
/// acceptance set. `true` means rejected.
pub fn bergmann_rejections(h: &HypothesisSet, alpha: f64, cap: usize) -> Result<Vec<bool>> {
    h.require_all_pairs(Correction::Bergmann)?;
    let sets = bergmann_exhaustive_sets(h.systems.len(), cap)?;
    let positions = bergmann_pair_indices(h);
    let mut p_by_pair = vec![f64::INFINITY; 64];
    for (hyp, &pos) in h.hypotheses.iter().zip(&positions) {
        p_by_pair[pos] = hyp.raw_p;
    }
    let mut accepted = 0u64;
    for set in sets.into_iter().filter(|s| !s.is_empty()) {
        let min_p = set.iter().map(|i| p_by_pair[i]).fold(f64::INFINITY, f64::min);
        if min_p > alpha / set.len() as f64 {
            accepted |= set.0;
        }
    }
    Ok(positions.iter().map(|&pos| accepted >> pos & 1 == 0).collect())
}
