#![allow(dead_code)]

use std::path::PathBuf;

use aligncmp::fwer::HypothesisSet;
use aligncmp::{Alignment, ComparisonConfig, ContingencyTable, Correspondence, DiscordantMatrix, Perspective};
use rand::rngs::StdRng;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

pub fn load_matrix(name: &str, perspective: Perspective) -> DiscordantMatrix {
    let bytes = std::fs::read(fixture_path(name)).expect("fixture readable");
    DiscordantMatrix::from_tsv(&bytes, perspective).expect("fixture parses")
}

pub fn ifp_matrix() -> DiscordantMatrix {
    load_matrix("anatomy_ifp.tsv", Perspective::Ifp)
}

pub fn cfp_matrix() -> DiscordantMatrix {
    load_matrix("anatomy_cfp.tsv", Perspective::Cfp)
}

pub fn config(perspective: Perspective) -> ComparisonConfig {
    ComparisonConfig {
        perspective,
        ..ComparisonConfig::default()
    }
}

/// Alignment over a `s × t` concept grid; each cell is included with
/// probability `density`.
pub fn random_alignment(rng: &mut StdRng, name: &str, s: usize, t: usize, density: f64) -> Alignment {
    let mut raw = Vec::new();
    for i in 0..s {
        for j in 0..t {
            if rng.gen_bool(density) {
                let c = Correspondence::new(&format!("s{i}"), &format!("t{j}"), rng.gen_range(0.0..=1.0)).unwrap();
                raw.push(c);
            }
        }
    }
    aligncmp::canonicalize_alignment(raw, name).unwrap()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All maps `{0..n} → {0..n}`, each read as a partition into classes.
pub fn for_each_labelling(n: usize, mut f: impl FnMut(&[usize])) {
    let mut label = vec![0usize; n];
    loop {
        f(&label);
        let mut pos = 0;
        loop {
            if pos == n {
                return;
            }
            label[pos] += 1;
            if label[pos] < n {
                break;
            }
            label[pos] = 0;
            pos += 1;
        }
    }
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("S{i:02}")).collect()
}

/// Tallies every grid cell by its membership in R, A1 and A2.
pub fn classify(r: &Alignment, a1: &Alignment, a2: &Alignment, s: usize, t: usize) -> (ContingencyTable, ContingencyTable) {
    let mut ifp = ContingencyTable {
        n00: 0,
        n01: 0,
        n10: 0,
        n11: Some(0),
        perspective: Perspective::Ifp,
    };
    let mut cfp = ContingencyTable {
        perspective: Perspective::Cfp,
        ..ifp
    };
    let bump = |slot: &mut Option<u64>| *slot = Some(slot.unwrap() + 1);
    for i in 0..s {
        for j in 0..t {
            let (src, tgt) = (format!("s{i}"), format!("t{j}"));
            let in_r = r.contains(&src, &tgt);
            let in1 = a1.contains(&src, &tgt);
            let in2 = a2.contains(&src, &tgt);
            if in_r {
                let slot = match (in1, in2) {
                    (false, false) => &mut ifp.n00,
                    (false, true) => &mut ifp.n01,
                    (true, false) => &mut ifp.n10,
                    (true, true) => {
                        bump(&mut ifp.n11);
                        bump(&mut cfp.n11);
                        continue;
                    }
                };
                *slot += 1;
                match (in1, in2) {
                    (false, false) => cfp.n00 += 1,
                    (false, true) => cfp.n01 += 1,
                    (true, false) => cfp.n10 += 1,
                    _ => unreachable!(),
                }
            } else {
                match (in1, in2) {
                    (false, false) => bump(&mut cfp.n11),
                    (true, false) => cfp.n01 += 1,
                    (false, true) => cfp.n10 += 1,
                    (true, true) => cfp.n00 += 1,
                }
            }
        }
    }
    (ifp, cfp)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimum cost over all injective maps rows → cols, `rows ≤ cols`.
pub fn brute_min_cost(costs: &[Vec<f64>]) -> f64 {
    let (rows, cols) = (costs.len(), costs[0].len());
    permutations(cols)
        .into_iter()
        .map(|p| (0..rows).map(|i| costs[i][p[i]]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Random p-vector of the given length, mixing uniform, tiny and tied values.
pub fn random_p_vector(rng: &mut StdRng, k: usize) -> Vec<f64> {
    let style = rng.gen_range(0..4);
    (0..k)
        .map(|_| match style {
            0 => rng.gen_range(0.0..=1.0),
            1 => 10f64.powf(rng.gen_range(-8.0..0.0)),
            2 => [0.001, 0.01, 0.02, 0.05, 0.2, 0.9][rng.gen_range(0..6)],
            _ => {
                if rng.gen_bool(0.3) {
                    rng.gen_range(0.0..1e-4)
                } else {
                    rng.gen_range(0.0..=1.0)
                }
            }
        })
        .collect()
}

pub fn random_hypotheses(rng: &mut StdRng, n_min: usize, n_max: usize) -> HypothesisSet {
    let n = rng.gen_range(n_min..=n_max);
    let raw = random_p_vector(rng, n * (n - 1) / 2);
    HypothesisSet::all_pairs(names(n), &raw).unwrap()
}
