//! Domain types shared by the whole crate: correspondences, alignments and
//! comparison configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the number of systems for which Bergmann's
/// exhaustive sets are enumerated.
pub const DEFAULT_BERGMANN_CAP: usize = 10;

/// Relation between the two entities of a correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Equivalence,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Equivalence => "=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One mapping of a source entity onto a target entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub source: String,
    pub target: String,
    pub relation: Relation,
    pub confidence: f64,
}

impl Correspondence {
    /// Builds an equivalence correspondence, trimming both identifiers.
    pub fn new(source: &str, target: &str, confidence: f64) -> Result<Self> {
        Self::with_relation(source, target, "=", confidence)
    }

    /// Builds a correspondence from a textual relation symbol. Only `=` is
    /// accepted.
    pub fn with_relation(source: &str, target: &str, relation: &str, confidence: f64) -> Result<Self> {
        let source = source.trim();
        let target = target.trim();
        if source.is_empty() || target.is_empty() {
            return Err(Error::EmptyEntity);
        }
        let relation = match relation.trim() {
            "=" => Relation::Equivalence,
            other => {
                return Err(Error::NonEquivalenceRelation(
                    source.to_string(),
                    target.to_string(),
                    other.to_string(),
                ))
            }
        };
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidConfidence(confidence));
        }
        Ok(Self {
            source: source.to_string(),
            target: target.to_string(),
            relation,
            confidence,
        })
    }

    pub fn key(&self) -> CorrespondenceKey {
        CorrespondenceKey {
            source: self.source.clone(),
            target: self.target.clone(),
            relation: self.relation,
        }
    }
}

/// Identity of a correspondence. Confidence is deliberately not part of it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorrespondenceKey {
    pub source: String,
    pub target: String,
    pub relation: Relation,
}

/// A named set of correspondences.
///
/// Members are unique by `(source, target, relation)` and iterate in
/// lexicographic `(source, target)` order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Alignment {
    system_name: String,
    members: BTreeMap<CorrespondenceKey, f64>,
}

impl Alignment {
    pub fn empty(system_name: &str) -> Result<Self> {
        canonicalize_alignment(Vec::new(), system_name)
    }

    pub fn system_name(&self) -> &str {
        &self.system_name
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_key(&self, key: &CorrespondenceKey) -> bool {
        self.members.contains_key(key)
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.members.contains_key(&CorrespondenceKey {
            source: source.to_string(),
            target: target.to_string(),
            relation: Relation::Equivalence,
        })
    }

    pub fn keys(&self) -> impl Iterator<Item = &CorrespondenceKey> {
        self.members.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = Correspondence> + '_ {
        self.members.iter().map(|(k, &c)| Correspondence {
            source: k.source.clone(),
            target: k.target.clone(),
            relation: k.relation,
            confidence: c,
        })
    }

    pub fn to_vec(&self) -> Vec<Correspondence> {
        self.iter().collect()
    }

    pub fn renamed(mut self, system_name: &str) -> Result<Self> {
        if system_name.trim().is_empty() {
            return Err(Error::EmptySystemName);
        }
        self.system_name = system_name.trim().to_string();
        Ok(self)
    }

    /// Set union; a member present in both keeps the larger confidence.
    pub fn union(&self, other: &Alignment) -> Alignment {
        let mut members = self.members.clone();
        for (k, &c) in &other.members {
            members
                .entry(k.clone())
                .and_modify(|e| *e = e.max(c))
                .or_insert(c);
        }
        Alignment {
            system_name: self.system_name.clone(),
            members,
        }
    }

    /// Set intersection; confidences are taken from `self`.
    pub fn intersection(&self, other: &Alignment) -> Alignment {
        self.filter(|k| other.contains_key(k))
    }

    /// Set difference `self − other`.
    pub fn difference(&self, other: &Alignment) -> Alignment {
        self.filter(|k| !other.contains_key(k))
    }

    fn filter(&self, keep: impl Fn(&CorrespondenceKey) -> bool) -> Alignment {
        Alignment {
            system_name: self.system_name.clone(),
            members: self
                .members
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, &c)| (k.clone(), c))
                .collect(),
        }
    }
}

/// Collapses a raw correspondence list into set semantics.
///
/// Duplicates keep their maximum confidence. Relations other than `=` are
/// rejected (checked again here since `Correspondence` fields are public).
pub fn canonicalize_alignment(raw: Vec<Correspondence>, system_name: &str) -> Result<Alignment> {
    let system_name = system_name.trim();
    if system_name.is_empty() {
        return Err(Error::EmptySystemName);
    }
    let mut members: BTreeMap<CorrespondenceKey, f64> = BTreeMap::new();
    for c in raw {
        if c.relation != Relation::Equivalence {
            return Err(Error::NonEquivalenceRelation(c.source, c.target, c.relation.to_string()));
        }
        let source = c.source.trim();
        let target = c.target.trim();
        if source.is_empty() || target.is_empty() {
            return Err(Error::EmptyEntity);
        }
        if !(0.0..=1.0).contains(&c.confidence) {
            return Err(Error::InvalidConfidence(c.confidence));
        }
        let key = CorrespondenceKey {
            source: source.to_string(),
            target: target.to_string(),
            relation: c.relation,
        };
        members
            .entry(key)
            .and_modify(|e| *e = e.max(c.confidence))
            .or_insert(c.confidence);
    }
    Ok(Alignment {
        system_name: system_name.to_string(),
        members,
    })
}

/// Total number of candidate pairs `T = n × m` of a matching task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TaskUniverse {
    pub total_pairs: Option<u64>,
}

impl TaskUniverse {
    pub fn unknown() -> Self {
        Self { total_pairs: None }
    }

    pub fn from_concepts(source_concepts: u64, target_concepts: u64) -> Self {
        Self {
            total_pairs: Some(source_concepts * target_concepts),
        }
    }
}

/// How the 2×2 table is populated from a reference and two alignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perspective {
    /// Ignore false positives: only correct discoveries are counted.
    Ifp,
    /// Consider false positives relative to the rival system.
    Cfp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Asymptotic,
    Exact,
    #[serde(rename = "cc")]
    ContinuityCorrected,
    #[serde(rename = "midp")]
    MidP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    None,
    Bonferroni,
    Holm,
    Holland,
    Finner,
    Hochberg,
    Nemenyi,
    Shaffer,
    Bergmann,
}

impl Correction {
    pub const ALL: [Correction; 9] = [
        Correction::None,
        Correction::Bonferroni,
        Correction::Holm,
        Correction::Holland,
        Correction::Finner,
        Correction::Hochberg,
        Correction::Nemenyi,
        Correction::Shaffer,
        Correction::Bergmann,
    ];

    /// Whether the procedure relies on the all-pairs logical structure.
    pub fn requires_all_pairs(self) -> bool {
        matches!(self, Correction::Nemenyi | Correction::Shaffer | Correction::Bergmann)
    }
}

/// All-pairs (`NxN`) or against-one-baseline (`Nx1`) comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    NxN,
    Nx1 { baseline: String },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::NxN => "nxn",
            Mode::Nx1 { .. } => "nx1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub perspective: Perspective,
    pub test: TestKind,
    pub correction: Correction,
    pub mode: Mode,
    pub alpha: f64,
    pub bergmann_cap: usize,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            perspective: Perspective::Ifp,
            test: TestKind::MidP,
            correction: Correction::Bergmann,
            mode: Mode::NxN,
            alpha: 0.05,
            bergmann_cap: DEFAULT_BERGMANN_CAP,
        }
    }
}

impl ComparisonConfig {
    /// Checks the configuration against the number of systems compared.
    pub fn validate(&self, n_systems: usize) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.correction.requires_all_pairs() && self.mode != Mode::NxN {
            return Err(Error::ModeMismatch {
                correction: self.correction.name(),
                required: "nxn",
            });
        }
        if self.correction == Correction::Bergmann && n_systems > self.bergmann_cap {
            return Err(Error::TooManySystems {
                n: n_systems,
                cap: self.bergmann_cap,
            });
        }
        Ok(())
    }
}

macro_rules! named_enum {
    ($ty:ty { $($variant:path => $name:literal $(| $alias:literal)*),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self {
                    $($variant => $name,)+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($name $(| $alias)* => Ok($variant),)+
                    other => Err(format!(
                        "unknown value {other:?}; expected one of: {}",
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(Perspective {
    Perspective::Ifp => "ifp",
    Perspective::Cfp => "cfp",
});

named_enum!(TestKind {
    TestKind::Asymptotic => "asymptotic",
    TestKind::Exact => "exact",
    TestKind::ContinuityCorrected => "cc",
    TestKind::MidP => "midp" | "mid-p",
});

named_enum!(Correction {
    Correction::None => "none",
    Correction::Bonferroni => "bonferroni",
    Correction::Holm => "holm",
    Correction::Holland => "holland",
    Correction::Finner => "finner",
    Correction::Hochberg => "hochberg",
    Correction::Nemenyi => "nemenyi",
    Correction::Shaffer => "shaffer",
    Correction::Bergmann => "bergmann",
});
