//! 2×2 contingency tables built from a reference and two alignments, and
//! the all-pairs matrix of discordant counts.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Alignment, Perspective, TaskUniverse};

/// Counts of the McNemar 2×2 table. `n11` may be unknown under the CFP
/// perspective when the task universe is not given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContingencyTable {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: Option<u64>,
    pub perspective: Perspective,
}

impl ContingencyTable {
    /// Table with the roles of the two systems exchanged.
    pub fn swapped(self) -> Self {
        Self {
            n01: self.n10,
            n10: self.n01,
            ..self
        }
    }
}

fn count(a: &Alignment, pred: impl Fn(&crate::model::CorrespondenceKey) -> bool) -> u64 {
    a.keys().filter(|k| pred(k)).count() as u64
}

/// Table that only looks at correct correspondences (members of `r`).
pub fn build_table_ifp(r: &Alignment, a1: &Alignment, a2: &Alignment) -> ContingencyTable {
    let mut t = ContingencyTable {
        n00: 0,
        n01: 0,
        n10: 0,
        n11: Some(0),
        perspective: Perspective::Ifp,
    };
    let mut n11 = 0;
    for k in r.keys() {
        match (a1.contains_key(k), a2.contains_key(k)) {
            (false, false) => t.n00 += 1,
            (false, true) => t.n01 += 1,
            (true, false) => t.n10 += 1,
            (true, true) => n11 += 1,
        }
    }
    t.n11 = Some(n11);
    t
}

/// Table that also charges each system for false positives the rival
/// system avoided.
pub fn build_table_cfp(r: &Alignment, a1: &Alignment, a2: &Alignment, t: TaskUniverse) -> Result<ContingencyTable> {
    let ifp = build_table_ifp(r, a1, a2);
    // false positives shared by both / exclusive to one system
    let fp_both = count(a1, |k| a2.contains_key(k) && !r.contains_key(k));
    let fp_only1 = count(a1, |k| !a2.contains_key(k) && !r.contains_key(k));
    let fp_only2 = count(a2, |k| !a1.contains_key(k) && !r.contains_key(k));

    let n11 = match t.total_pairs {
        None => None,
        Some(total) => {
            let union = r.len() as u64 + fp_both + fp_only1 + fp_only2;
            if total < union {
                return Err(Error::UniverseTooSmall {
                    universe: total,
                    required: union,
                });
            }
            Some(ifp.n11.unwrap_or(0) + total - union)
        }
    };
    Ok(ContingencyTable {
        n00: ifp.n00 + fp_both,
        n01: ifp.n01 + fp_only1,
        n10: ifp.n10 + fp_only2,
        n11,
        perspective: Perspective::Cfp,
    })
}

pub fn build_table(r: &Alignment, a1: &Alignment, a2: &Alignment, perspective: Perspective) -> ContingencyTable {
    match perspective {
        Perspective::Ifp => build_table_ifp(r, a1, a2),
        Perspective::Cfp => build_table_cfp(r, a1, a2, TaskUniverse::unknown()).expect("no universe, no size check"),
    }
}

/// Square matrix where `counts[i][j]` is the number of correspondences
/// counted in favour of system `i` against system `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscordantMatrix {
    systems: Vec<String>,
    counts: Vec<Vec<u64>>,
    perspective: Perspective,
}

impl DiscordantMatrix {
    pub fn new(systems: Vec<String>, counts: Vec<Vec<u64>>, perspective: Perspective) -> Result<Self> {
        if systems.len() < 2 {
            return Err(Error::TooFewSystems(systems.len()));
        }
        let mut seen = HashSet::new();
        for s in &systems {
            if s.trim().is_empty() {
                return Err(Error::EmptySystemName);
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateSystemName(s.clone()));
            }
        }
        if counts.len() != systems.len() || counts.iter().any(|row| row.len() != systems.len()) {
            return Err(Error::MalformedMatrix(format!(
                "expected a {0}×{0} matrix",
                systems.len()
            )));
        }
        if let Some(i) = (0..systems.len()).find(|&i| counts[i][i] != 0) {
            return Err(Error::MalformedMatrix(format!(
                "diagonal entry for {:?} must be 0",
                systems[i]
            )));
        }
        Ok(Self {
            systems,
            counts,
            perspective,
        })
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn perspective(&self) -> Perspective {
        self.perspective
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.systems.iter().position(|s| s == name)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Renders the matrix as TSV: a header of system names followed by one
    /// row per system (`name` then the integer cells).
    pub fn to_tsv(&self) -> String {
        let mut out = self.systems.join("\t");
        out.push('\n');
        for (name, row) in self.systems.iter().zip(&self.counts) {
            out.push_str(name);
            for v in row {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the layout written by [`DiscordantMatrix::to_tsv`]. A leading
    /// empty header cell is tolerated. Row order must match the header.
    pub fn from_tsv(bytes: &[u8], perspective: Perspective) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| Error::MalformedMatrix("invalid UTF-8".into()))?;
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::MalformedMatrix("missing header row".into()))?;
        let mut names: Vec<String> = header.split('\t').map(|s| s.trim().to_string()).collect();
        if names.first().is_some_and(|s| s.is_empty()) {
            names.remove(0);
        }
        let mut counts = Vec::with_capacity(names.len());
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            let row_idx = counts.len();
            if row_idx >= names.len() {
                return Err(Error::MalformedMatrix(format!("line {line_no}: more rows than systems")));
            }
            if fields[0].trim() != names[row_idx] {
                return Err(Error::MalformedMatrix(format!(
                    "line {line_no}: row {:?} does not match header column {:?}",
                    fields[0].trim(),
                    names[row_idx]
                )));
            }
            if fields.len() != names.len() + 1 {
                return Err(Error::MalformedMatrix(format!(
                    "line {line_no}: expected {} cells, found {}",
                    names.len(),
                    fields.len() - 1
                )));
            }
            let row = fields[1..]
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::MalformedMatrix(format!("line {line_no}: {f:?} is not a count")))
                })
                .collect::<Result<Vec<_>>>()?;
            counts.push(row);
        }
        Self::new(names, counts, perspective)
    }
}

/// Builds the matrix of in-favour counts for every ordered system pair.
pub fn build_discordant_matrix(r: &Alignment, systems: &[Alignment], perspective: Perspective) -> Result<DiscordantMatrix> {
    let names: Vec<String> = systems.iter().map(|a| a.system_name().to_string()).collect();
    let n = systems.len();
    let mut counts = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let t = build_table(r, &systems[i], &systems[j], perspective);
            counts[i][j] = t.n10;
            counts[j][i] = t.n01;
        }
    }
    DiscordantMatrix::new(names, counts, perspective)
}
