//! String similarity measures, each returning a value in [0, 1].
//!
//! All functions work on Unicode scalar values. Two empty strings are
//! identical (similarity 1); an empty string against a non-empty one has
//! similarity 0.

use std::collections::HashMap;

/// Winkler prefix scale.
const PREFIX_SCALE: f64 = 0.1;
const MAX_PREFIX: usize = 4;
/// Hamacher parameter of the SMOA difference term.
const SMOA_HAMACHER_P: f64 = 0.6;

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

fn common_prefix(a: &[char], b: &[char]) -> usize {
    a.iter().zip(b).take(MAX_PREFIX).take_while(|(x, y)| x == y).count()
}

pub fn equal(a: &str, b: &str) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Position-wise mismatches over the shorter length plus the length
/// difference, scaled by the longer length.
pub fn hamming(a: &str, b: &str) -> f64 {
    let (a, b) = (chars(a), chars(b));
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    let mismatches = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    1.0 - mismatches as f64 / longest as f64
}

fn jaro_chars(a: &[char], b: &[char]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_used = vec![false; b.len()];
    let mut a_matched = Vec::new();
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == *ca {
                b_used[j] = true;
                a_matched.push(*ca);
                break;
            }
        }
    }
    let m = a_matched.len();
    if m == 0 {
        return 0.0;
    }
    let b_matched = b.iter().zip(&b_used).filter(|(_, &u)| u).map(|(c, _)| c);
    let out_of_order = a_matched.iter().zip(b_matched).filter(|(x, y)| x != y).count();
    let t = (out_of_order / 2) as f64;
    let m = m as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

pub fn jaro(a: &str, b: &str) -> f64 {
    jaro_chars(&chars(a), &chars(b))
}

pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let (a, b) = (chars(a), chars(b));
    let j = jaro_chars(&a, &b);
    let l = common_prefix(&a, &b) as f64;
    (j + l * PREFIX_SCALE * (1.0 - j)).min(1.0)
}

/// Unit-cost edit distance.
pub fn levenshtein_distance(a: &str, b: &str) -> usize {
    let (a, b) = (chars(a), chars(b));
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn levenshtein(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein_distance(a, b) as f64 / longest as f64
}

/// Global alignment cost with substitution cost 1 and gap cost 2.
pub fn needleman_wunsch_distance(a: &str, b: &str) -> usize {
    const GAP: usize = 2;
    let (a, b) = (chars(a), chars(b));
    let mut prev: Vec<usize> = (0..=b.len()).map(|j| j * GAP).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = (i + 1) * GAP;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + GAP).min(cur[j] + GAP);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn needleman_wunsch(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - needleman_wunsch_distance(a, b) as f64 / (2 * longest) as f64
}

fn trigrams(s: &[char]) -> HashMap<[char; 3], usize> {
    let mut padded = vec!['\0'; 2];
    padded.extend_from_slice(s);
    padded.extend(['\0'; 2]);
    let mut grams = HashMap::new();
    for w in padded.windows(3) {
        *grams.entry([w[0], w[1], w[2]]).or_insert(0) += 1;
    }
    grams
}

/// Dice coefficient over boundary-padded trigram multisets. Strings shorter
/// than three characters are compared for equality instead.
pub fn ngram(a: &str, b: &str) -> f64 {
    let (ca, cb) = (chars(a), chars(b));
    if ca.len() < 3 || cb.len() < 3 {
        return equal(a, b);
    }
    let (ga, gb) = (trigrams(&ca), trigrams(&cb));
    let total: usize = ga.values().sum::<usize>() + gb.values().sum::<usize>();
    let shared: usize = ga.iter().map(|(g, &n)| n.min(gb.get(g).copied().unwrap_or(0))).sum();
    2.0 * shared as f64 / total as f64
}

/// Longest common substring as `(length, start in a, start in b)`; the
/// first occurrence in scan order wins ties.
fn longest_common_substring(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for i in 0..a.len() {
        for j in 0..b.len() {
            cur[j + 1] = if a[i] == b[j] { prev[j] + 1 } else { 0 };
            if cur[j + 1] > best.0 {
                best = (cur[j + 1], i + 1 - cur[j + 1], j + 1 - cur[j + 1]);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

pub fn substring(a: &str, b: &str) -> f64 {
    let (a, b) = (chars(a), chars(b));
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (len, _, _) = longest_common_substring(&a, &b);
    2.0 * len as f64 / (a.len() + b.len()) as f64
}

/// Stoilos et al.'s SMOA measure: commonality minus difference plus the
/// Winkler improvement, rescaled from [-1, 1] to [0, 1].
///
/// Commonality is found by repeatedly removing the longest common substring
/// from both strings until none is left.
pub fn smoa(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let (ca, cb) = (chars(a), chars(b));
    if ca.is_empty() || cb.is_empty() {
        return 0.0;
    }
    let (l1, l2) = (ca.len() as f64, cb.len() as f64);
    let (mut s1, mut s2) = (ca.clone(), cb.clone());
    let mut common = 0usize;
    loop {
        let (len, i, j) = longest_common_substring(&s1, &s2);
        if len == 0 {
            break;
        }
        common += len;
        s1.drain(i..i + len);
        s2.drain(j..j + len);
    }
    let common = common as f64;
    let commonality = 2.0 * common / (l1 + l2);
    let u1 = (l1 - common) / l1;
    let u2 = (l2 - common) / l2;
    let sum = u1 + u2;
    let product = u1 * u2;
    let difference = if sum - product == 0.0 {
        0.0
    } else {
        product / (SMOA_HAMACHER_P + (1.0 - SMOA_HAMACHER_P) * (sum - product))
    };
    let winkler = common_prefix(&ca, &cb) as f64 * PREFIX_SCALE * (1.0 - commonality);
    let raw = (commonality - difference + winkler).clamp(-1.0, 1.0);
    (raw + 1.0) / 2.0
}
