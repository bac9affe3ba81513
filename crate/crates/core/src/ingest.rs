//! Readers and writers for alignment files and concept-label lists.
//!
//! Two alignment formats are understood:
//!
//! * a tab-separated format, one correspondence per line:
//!   `source<TAB>target[<TAB>relation[<TAB>confidence]]`. Blank lines and
//!   lines starting with `#` are skipped. The relation defaults to `=` and
//!   the confidence to `1`;
//! * the `Cell` subset of the OAEI Alignment format (RDF/XML), where each
//!   `Cell` carries `entity1`/`entity2` elements with a `resource`
//!   attribute and optional `measure`/`relation` children.
//!
//! Identifiers starting with `#` cannot be represented in the TSV format.

use std::collections::HashSet;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::model::{canonicalize_alignment, Alignment, Correspondence};

/// Ordered `(id, label)` rows of one ontology.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelTable {
    rows: Vec<(String, String)>,
}

impl LabelTable {
    pub fn new(rows: Vec<(String, String)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (id, label) in &rows {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
            if id.trim().is_empty() || label.trim().is_empty() {
                return Err(Error::MalformedLine {
                    line: 0,
                    reason: format!("empty id or label for {id:?}"),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(String, String)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(id, _)| id.as_str())
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(_, l)| l.as_str())
    }
}

/// Yields `(1-based line number, line)` for every content line.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::MalformedLine {
            line,
            reason: "invalid UTF-8".into(),
        }
    })
}

pub fn parse_alignment_tsv(bytes: &[u8], system_name: &str) -> Result<Alignment> {
    let text = utf8(bytes)?;
    let mut raw = Vec::new();
    for (line_no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: "expected ≥2 fields".into(),
            });
        }
        if fields.len() > 4 {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("expected at most 4 fields, found {}", fields.len()),
            });
        }
        let relation = fields.get(2).map(|r| r.trim()).filter(|r| !r.is_empty()).unwrap_or("=");
        let confidence = match fields.get(3).map(|c| c.trim()) {
            None | Some("") => 1.0,
            Some(c) => {
                let v: f64 = c.parse().map_err(|_| Error::MalformedLine {
                    line: line_no,
                    reason: format!("confidence {c:?} is not a number"),
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ConfidenceOutOfRange(line_no));
                }
                v
            }
        };
        let corr = Correspondence::with_relation(fields[0], fields[1], relation, confidence).map_err(|e| match e {
            Error::EmptyEntity => Error::MalformedLine {
                line: line_no,
                reason: "empty entity identifier".into(),
            },
            other => other,
        })?;
        raw.push(corr);
    }
    canonicalize_alignment(raw, system_name)
}

/// Serializes an alignment as sorted TSV rows. Confidences use the shortest
/// decimal form that parses back to the same value.
pub fn write_alignment_tsv(a: &Alignment) -> Vec<u8> {
    let mut out = String::new();
    for c in a.iter() {
        out.push_str(&c.source);
        out.push('\t');
        out.push_str(&c.target);
        out.push('\t');
        out.push_str(c.relation.as_str());
        out.push('\t');
        out.push_str(&c.confidence.to_string());
        out.push('\n');
    }
    out.into_bytes()
}

pub fn parse_label_list(bytes: &[u8]) -> Result<LabelTable> {
    let text = utf8(bytes)?;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in content_lines(text) {
        let Some((id, label)) = line.split_once('\t') else {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: "expected id<TAB>label".into(),
            });
        };
        let (id, label) = (id.trim(), label.trim());
        if id.is_empty() || label.is_empty() {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: "empty id or label".into(),
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        rows.push((id.to_string(), label.to_string()));
    }
    Ok(LabelTable { rows })
}

#[derive(Default)]
struct CellState {
    entity1: Option<String>,
    entity2: Option<String>,
    measure: Option<String>,
    relation: Option<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum TextSlot {
    Measure,
    Relation,
    Entity1,
    Entity2,
}

fn resource_attr(e: &BytesStart<'_>, position: u64) -> Result<Option<String>> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::XmlSyntax {
            position,
            message: err.to_string(),
        })?;
        if attr.key.local_name().as_ref() == b"resource" || attr.key.local_name().as_ref() == b"about" {
            let v = attr.unescape_value().map_err(|err| Error::XmlSyntax {
                position,
                message: err.to_string(),
            })?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

/// Parses the `Cell` subset of the OAEI Alignment format.
pub fn parse_alignment_xml(bytes: &[u8], system_name: &str) -> Result<Alignment> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut raw = Vec::new();
    let mut cell: Option<CellState> = None;
    let mut cell_index = 0usize;
    let mut slot: Option<TextSlot> = None;
    let mut depth = 0usize;
    let mut buf = Vec::new();

    loop {
        let position = reader.buffer_position();
        let event = reader.read_event_into(&mut buf).map_err(|e| Error::XmlSyntax {
            position: reader.error_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                if !is_empty {
                    depth += 1;
                }
                let name = e.local_name();
                match name.as_ref() {
                    b"Cell" => {
                        if cell.is_some() {
                            return Err(Error::XmlSyntax {
                                position,
                                message: "nested Cell element".into(),
                            });
                        }
                        if is_empty {
                            return Err(Error::MissingEntity(cell_index));
                        }
                        cell = Some(CellState::default());
                    }
                    b"entity1" | b"entity2" if cell.is_some() => {
                        let which = if name.as_ref() == b"entity1" {
                            TextSlot::Entity1
                        } else {
                            TextSlot::Entity2
                        };
                        let state = cell.as_mut().expect("inside cell");
                        let value = resource_attr(e, position)?;
                        match which {
                            TextSlot::Entity1 => state.entity1 = value,
                            _ => state.entity2 = value,
                        }
                        if !is_empty {
                            slot = Some(which);
                        }
                    }
                    b"measure" if cell.is_some() && !is_empty => slot = Some(TextSlot::Measure),
                    b"relation" if cell.is_some() && !is_empty => slot = Some(TextSlot::Relation),
                    _ => {}
                }
            }
            Event::Text(ref t) => {
                if let (Some(which), Some(state)) = (slot, cell.as_mut()) {
                    let text = t
                        .unescape()
                        .map_err(|e| Error::XmlSyntax {
                            position,
                            message: e.to_string(),
                        })?
                        .trim()
                        .to_string();
                    match which {
                        TextSlot::Measure => state.measure = Some(text),
                        TextSlot::Relation => state.relation = Some(text),
                        // entity written as element text instead of a resource attribute
                        TextSlot::Entity1 if state.entity1.is_none() => state.entity1 = Some(text),
                        TextSlot::Entity2 if state.entity2.is_none() => state.entity2 = Some(text),
                        _ => {}
                    }
                }
            }
            Event::End(ref e) => {
                depth = depth.saturating_sub(1);
                slot = None;
                if e.local_name().as_ref() == b"Cell" {
                    let state = cell.take().expect("end of cell without start");
                    let (Some(e1), Some(e2)) = (state.entity1, state.entity2) else {
                        return Err(Error::MissingEntity(cell_index));
                    };
                    let confidence = match state.measure.as_deref() {
                        None | Some("") => 1.0,
                        Some(m) => m.parse::<f64>().map_err(|_| Error::XmlSyntax {
                            position,
                            message: format!("measure {m:?} is not a number"),
                        })?,
                    };
                    let relation = state.relation.as_deref().filter(|r| !r.is_empty()).unwrap_or("=");
                    let corr = Correspondence::with_relation(&e1, &e2, relation, confidence).map_err(|err| match err {
                        Error::EmptyEntity => Error::MissingEntity(cell_index),
                        other => other,
                    })?;
                    raw.push(corr);
                    cell_index += 1;
                }
            }
            Event::Eof => {
                if depth > 0 || cell.is_some() {
                    return Err(Error::XmlSyntax {
                        position: reader.buffer_position(),
                        message: "unexpected end of document".into(),
                    });
                }
                break;
            }
            _ => {}
        }
        buf.clear();
    }
    canonicalize_alignment(raw, system_name)
}

/// Serializes an alignment in the `Cell` subset understood by
/// [`parse_alignment_xml`].
pub fn write_alignment_xml(a: &Alignment) -> Vec<u8> {
    fn esc(s: &str) -> String {
        quick_xml::escape::escape(s).into_owned()
    }
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n\
         <rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment\"\n  \
         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n<Alignment>\n",
    );
    for c in a.iter() {
        out.push_str(&format!(
            "  <map>\n    <Cell>\n      <entity1 rdf:resource=\"{}\"/>\n      <entity2 rdf:resource=\"{}\"/>\n      \
             <measure rdf:datatype=\"xsd:float\">{}</measure>\n      <relation>{}</relation>\n    </Cell>\n  </map>\n",
            esc(&c.source),
            esc(&c.target),
            c.confidence,
            esc(c.relation.as_str()),
        ));
    }
    out.push_str("</Alignment>\n</rdf:RDF>\n");
    out.into_bytes()
}
