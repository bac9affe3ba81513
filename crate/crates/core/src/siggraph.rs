//! Pairwise verdicts as a directed "outperforms" graph, its DOT rendering
//! and the derived rank groups.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::contingency::DiscordantMatrix;
use crate::error::{Error, Result};
use crate::fwer::{adjust_with_cap, Hypothesis, HypothesisSet};
use crate::mcnemar::run_test;
use crate::model::{ComparisonConfig, Mode, TestKind};

pub const NO_EVIDENCE_NOTE: &str = "no evidence: both discordant counts are zero";

/// Outcome for one unordered system pair. `system_i < system_j` by name.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseResult {
    pub system_i: String,
    pub system_j: String,
    /// correspondences counted in favour of `system_i`
    pub n_i: u64,
    pub n_j: u64,
    pub test: TestKind,
    pub statistic: Option<f64>,
    pub raw_p: f64,
    pub apv: f64,
    pub significant: bool,
    pub winner: Option<String>,
    pub small_sample: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub winner: String,
    pub loser: String,
    pub apv: f64,
    pub raw_p: f64,
    pub n_winner: u64,
    pub n_loser: u64,
}

/// Systems and the significant "outperforms" relations between them.
/// Nodes are sorted; edges are sorted by `(winner, loser)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignificanceGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
}

/// Full result of comparing the systems of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub config: ComparisonConfig,
    pub pairs: Vec<PairwiseResult>,
    pub graph: SignificanceGraph,
    pub warnings: Vec<String>,
}

impl SignificanceGraph {
    pub fn new(nodes: impl IntoIterator<Item = String>, edges: Vec<Edge>) -> Result<Self> {
        let nodes: BTreeSet<String> = nodes.into_iter().collect();
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.winner == e.loser {
                return Err(Error::MalformedMatrix(format!("self-edge on {:?}", e.winner)));
            }
            if !nodes.contains(&e.winner) || !nodes.contains(&e.loser) {
                return Err(Error::MalformedMatrix(format!(
                    "edge {:?} -> {:?} references an unknown system",
                    e.winner, e.loser
                )));
            }
            let key = if e.winner < e.loser {
                (e.winner.clone(), e.loser.clone())
            } else {
                (e.loser.clone(), e.winner.clone())
            };
            if !seen.insert(key) {
                return Err(Error::MalformedMatrix(format!(
                    "more than one edge between {:?} and {:?}",
                    e.winner, e.loser
                )));
            }
        }
        let mut edges = edges;
        edges.sort_by(|a, b| (&a.winner, &a.loser).cmp(&(&b.winner, &b.loser)));
        Ok(Self {
            nodes: nodes.into_iter().collect(),
            edges,
        })
    }

    pub fn has_edge_between(&self, a: &str, b: &str) -> bool {
        self.edges
            .iter()
            .any(|e| (e.winner == a && e.loser == b) || (e.winner == b && e.loser == a))
    }

    pub fn wins(&self, node: &str) -> usize {
        self.edges.iter().filter(|e| e.winner == node).count()
    }
}

/// Runs the configured test on every compared pair, adjusts the p-values
/// jointly and keeps the significant pairs as edges.
pub fn compare(m: &DiscordantMatrix, cfg: &ComparisonConfig) -> Result<Comparison> {
    if m.len() < 2 {
        return Err(Error::TooFewSystems(m.len()));
    }
    cfg.validate(m.len())?;

    let mut systems: Vec<String> = m.systems().to_vec();
    systems.sort();
    let pairs: Vec<(String, String)> = match &cfg.mode {
        Mode::NxN => {
            let mut v = Vec::new();
            for i in 0..systems.len() {
                for j in (i + 1)..systems.len() {
                    v.push((systems[i].clone(), systems[j].clone()));
                }
            }
            v
        }
        Mode::Nx1 { baseline } => {
            if m.index_of(baseline).is_none() {
                return Err(Error::UnknownBaseline(baseline.clone()));
            }
            systems
                .iter()
                .filter(|s| *s != baseline)
                .map(|s| {
                    if baseline < s {
                        (baseline.clone(), s.clone())
                    } else {
                        (s.clone(), baseline.clone())
                    }
                })
                .collect()
        }
    };

    let mut warnings = Vec::new();
    let mut records = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        let (ia, ib) = (m.index_of(a).expect("known"), m.index_of(b).expect("known"));
        let (n_a, n_b) = (m.get(ia, ib), m.get(ib, ia));
        let mut rec = PairwiseResult {
            system_i: a.clone(),
            system_j: b.clone(),
            n_i: n_a,
            n_j: n_b,
            test: cfg.test,
            statistic: None,
            raw_p: 1.0,
            apv: 1.0,
            significant: false,
            winner: None,
            small_sample: false,
            note: None,
        };
        match run_test(cfg.test, n_a, n_b) {
            Ok(t) => {
                rec.statistic = t.statistic;
                rec.raw_p = t.p_value;
                rec.small_sample = t.small_sample;
                if t.small_sample {
                    warnings.push(format!(
                        "{a} vs {b}: only {} discordant pairs; the χ² approximation needs at least 25",
                        n_a + n_b
                    ));
                }
            }
            Err(Error::UndefinedStatistic) => {
                rec.note = Some(NO_EVIDENCE_NOTE.to_string());
                warnings.push(format!("{a} vs {b}: {NO_EVIDENCE_NOTE}"));
            }
            Err(e) => return Err(e),
        }
        records.push(rec);
    }

    let hyps = HypothesisSet::new(
        systems.clone(),
        cfg.mode.clone(),
        records
            .iter()
            .map(|r| Hypothesis {
                pair: (r.system_i.clone(), r.system_j.clone()),
                raw_p: r.raw_p,
            })
            .collect(),
    )?;
    let adjusted = adjust_with_cap(&hyps, cfg.correction, cfg.bergmann_cap)?;

    let mut edges = Vec::new();
    for (rec, &apv) in records.iter_mut().zip(&adjusted.apv) {
        rec.apv = apv;
        rec.significant = apv < cfg.alpha && rec.n_i != rec.n_j;
        if rec.significant {
            let (winner, loser, nw, nl) = if rec.n_i > rec.n_j {
                (&rec.system_i, &rec.system_j, rec.n_i, rec.n_j)
            } else {
                (&rec.system_j, &rec.system_i, rec.n_j, rec.n_i)
            };
            rec.winner = Some(winner.clone());
            edges.push(Edge {
                winner: winner.clone(),
                loser: loser.clone(),
                apv,
                raw_p: rec.raw_p,
                n_winner: nw,
                n_loser: nl,
            });
        }
    }

    Ok(Comparison {
        config: cfg.clone(),
        pairs: records,
        graph: SignificanceGraph::new(systems, edges)?,
        warnings,
    })
}

pub fn build_graph(m: &DiscordantMatrix, cfg: &ComparisonConfig) -> Result<SignificanceGraph> {
    compare(m, cfg).map(|c| c.graph)
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the graph in DOT. Byte-stable for a given graph.
pub fn emit_dot(g: &SignificanceGraph) -> String {
    let mut out = String::from("digraph significance {\n");
    let nodes: BTreeSet<&String> = g.nodes.iter().collect();
    for n in nodes {
        let _ = writeln!(out, "  {};", dot_quote(n));
    }
    let mut edges: Vec<&Edge> = g.edges.iter().collect();
    edges.sort_by(|a, b| (&a.winner, &a.loser).cmp(&(&b.winner, &b.loser)));
    for e in edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{:.6}\"];",
            dot_quote(&e.winner),
            dot_quote(&e.loser),
            e.apv
        );
    }
    out.push_str("}\n");
    out
}

/// Groups of systems, best first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankTable {
    pub groups: Vec<Vec<String>>,
}

impl RankTable {
    /// One line per group, members joined with `" & "`.
    pub fn rows(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.join(" & ")).collect()
    }

    pub fn group_of(&self, system: &str) -> Option<usize> {
        self.groups.iter().position(|g| g.iter().any(|s| s == system))
    }
}

pub const RANKING_METHOD: &str =
    "systems ordered by number of significant wins; adjacent systems with equal wins and no edge between them share a group";

fn display_order(a: &str, b: &str) -> Ordering {
    a.to_lowercase().cmp(&b.to_lowercase()).then_with(|| a.cmp(b))
}

/// Orders systems by descending win count and merges adjacent systems that
/// have equal wins and no significant difference.
///
/// Within a run of equal win counts, a system that beats another is placed
/// first (topological order, name as tie-break).
pub fn rank_systems(g: &SignificanceGraph) -> RankTable {
    let wins: BTreeMap<&str, usize> = g.nodes.iter().map(|n| (n.as_str(), g.wins(n))).collect();
    let mut by_wins: BTreeMap<std::cmp::Reverse<usize>, Vec<&str>> = BTreeMap::new();
    for (&n, &w) in &wins {
        by_wins.entry(std::cmp::Reverse(w)).or_default().push(n);
    }

    let mut order: Vec<&str> = Vec::with_capacity(g.nodes.len());
    for (_, mut tier) in by_wins {
        tier.sort_by(|a, b| display_order(a, b));
        while !tier.is_empty() {
            // a member not beaten by any other remaining member; if the
            // tier holds a cycle, fall back to the first by name
            let pick = tier
                .iter()
                .position(|&cand| {
                    !tier
                        .iter()
                        .any(|&other| g.edges.iter().any(|e| e.winner == other && e.loser == cand))
                })
                .unwrap_or(0);
            order.push(tier.remove(pick));
        }
    }

    let mut groups: Vec<Vec<String>> = Vec::new();
    for name in order {
        let joins = groups.last().is_some_and(|last| {
            last.iter()
                .all(|m| wins[m.as_str()] == wins[name] && !g.has_edge_between(m, name))
        });
        if joins {
            groups.last_mut().expect("non-empty").push(name.to_string());
        } else {
            groups.push(vec![name.to_string()]);
        }
    }
    for group in &mut groups {
        group.sort_by(|a, b| display_order(a, b));
    }
    RankTable { groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Correction, Perspective};

    fn edge(w: &str, l: &str, apv: f64) -> Edge {
        Edge {
            winner: w.into(),
            loser: l.into(),
            apv,
            raw_p: apv,
            n_winner: 10,
            n_loser: 1,
        }
    }

    #[test]
    fn identical_systems_have_no_edges() {
        let m = DiscordantMatrix::new(vec!["A".into(), "B".into()], vec![vec![0, 0], vec![0, 0]], Perspective::Ifp).unwrap();
        let c = compare(&m, &ComparisonConfig::default()).unwrap();
        assert!(c.graph.edges.is_empty());
        assert_eq!(c.pairs.len(), 1);
        assert!(!c.pairs[0].significant);
        assert_eq!(c.pairs[0].note.as_deref(), Some(NO_EVIDENCE_NOTE));
    }

    #[test]
    fn equal_counts_never_produce_an_edge() {
        let m = DiscordantMatrix::new(vec!["A".into(), "B".into()], vec![vec![0, 40], vec![40, 0]], Perspective::Ifp).unwrap();
        for test in [TestKind::Asymptotic, TestKind::Exact, TestKind::ContinuityCorrected, TestKind::MidP] {
            let cfg = ComparisonConfig {
                test,
                correction: Correction::None,
                alpha: 0.999,
                ..ComparisonConfig::default()
            };
            assert!(build_graph(&m, &cfg).unwrap().edges.is_empty());
        }
    }

    #[test]
    fn edge_points_at_fewer_exclusive_discoveries() {
        let m = DiscordantMatrix::new(vec!["Weak".into(), "Strong".into()], vec![vec![0, 0], vec![911, 0]], Perspective::Ifp).unwrap();
        let g = build_graph(&m, &ComparisonConfig::default()).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].winner.as_str(), g.edges[0].loser.as_str()), ("Strong", "Weak"));
        assert_eq!((g.edges[0].n_winner, g.edges[0].n_loser), (911, 0));
    }

    #[test]
    fn nx1_restricts_pairs_to_baseline() {
        let m = DiscordantMatrix::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec![0, 50, 50], vec![2, 0, 50], vec![2, 1, 0]],
            Perspective::Ifp,
        )
        .unwrap();
        let cfg = ComparisonConfig {
            correction: Correction::Holm,
            mode: Mode::Nx1 { baseline: "B".into() },
            ..ComparisonConfig::default()
        };
        let c = compare(&m, &cfg).unwrap();
        let pairs: Vec<_> = c.pairs.iter().map(|p| (p.system_i.as_str(), p.system_j.as_str())).collect();
        assert_eq!(pairs, vec![("A", "B"), ("B", "C")]);
        let bad = ComparisonConfig {
            mode: Mode::Nx1 { baseline: "Z".into() },
            correction: Correction::Holm,
            ..ComparisonConfig::default()
        };
        assert_eq!(compare(&m, &bad).unwrap_err(), Error::UnknownBaseline("Z".into()));
    }

    #[test]
    fn dot_grammar() {
        let g = SignificanceGraph::new(vec!["B".to_string(), "A".to_string()], vec![]).unwrap();
        assert_eq!(emit_dot(&g), "digraph significance {\n  \"A\";\n  \"B\";\n}\n");
        let g = SignificanceGraph::new(vec!["A".to_string(), "B".to_string()], vec![edge("A", "B", 0.001)]).unwrap();
        assert_eq!(
            emit_dot(&g),
            "digraph significance {\n  \"A\";\n  \"B\";\n  \"A\" -> \"B\" [label=\"0.001000\"];\n}\n"
        );
        let g = SignificanceGraph::new(vec!["a\"b".to_string()], vec![]).unwrap();
        assert!(emit_dot(&g).contains("\"a\\\"b\""));
    }

    #[test]
    fn graph_rejects_double_edges() {
        let nodes = vec!["A".to_string(), "B".to_string()];
        assert!(SignificanceGraph::new(nodes.clone(), vec![edge("A", "B", 0.0), edge("B", "A", 0.0)]).is_err());
        assert!(SignificanceGraph::new(nodes, vec![edge("A", "A", 0.0)]).is_err());
    }

    #[test]
    fn ranking_without_edges_is_one_group() {
        let g = SignificanceGraph::new(["c", "A", "b"].map(String::from), vec![]).unwrap();
        assert_eq!(rank_systems(&g).groups, vec![vec!["A".to_string(), "b".into(), "c".into()]]);
    }

    #[test]
    fn ranking_keeps_connected_ties_apart() {
        // X and Y both win once, but X beats Y
        let g = SignificanceGraph::new(
            ["Y", "X", "Z", "W"].map(String::from),
            vec![edge("Y", "Z", 0.01), edge("X", "Y", 0.01), edge("W", "X", 0.01), edge("W", "Z", 0.01)],
        )
        .unwrap();
        assert_eq!(rank_systems(&g).rows(), vec!["W", "X", "Y", "Z"]);
    }

    #[test]
    fn ranking_merges_unconnected_ties() {
        let g = SignificanceGraph::new(
            ["B", "A", "C"].map(String::from),
            vec![edge("A", "C", 0.01), edge("B", "C", 0.01)],
        )
        .unwrap();
        assert_eq!(rank_systems(&g).rows(), vec!["A & B", "C"]);
    }
}
