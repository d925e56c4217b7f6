//! JSON documents: schemes, S-rings and tower descriptors.
//!
//! Scheme documents have the canonical field order `size`, `num_relations`,
//! `relation`, `labels` (omitted when absent). Serialization is compact and
//! byte-deterministic.

use serde::{Deserialize, Serialize};

use crate::cayley::SringDescriptor;
use crate::error::{Error, Result};
use crate::products::class_one;
use crate::scheme::{RelationMatrix, Scheme};
use crate::tower::Tower;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeDoc {
    size: usize,
    num_relations: usize,
    relation: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::schema(
        format!("line {}, column {}", e.line(), e.column()),
        e.to_string(),
    )
}

fn doc_of(s: &Scheme) -> SchemeDoc {
    SchemeDoc {
        size: s.size(),
        num_relations: s.num_relations(),
        relation: s.rows(),
        labels: s.labels().map(<[String]>::to_vec),
    }
}

pub fn scheme_to_json(s: &Scheme) -> String {
    serde_json::to_string(&doc_of(s)).expect("scheme documents always serialize")
}

pub fn scheme_to_value(s: &Scheme) -> serde_json::Value {
    serde_json::to_value(doc_of(s)).expect("scheme documents always serialize")
}

/// Shape and label-range checks with field locations; axioms (including the
/// placement of label 0) are left to validation.
fn matrix_of(doc: &SchemeDoc) -> Result<RelationMatrix> {
    let (n, r) = (doc.size, doc.num_relations);
    if n == 0 || r == 0 {
        return Err(Error::schema(
            "size",
            "size and num_relations must be positive",
        ));
    }
    if doc.relation.len() != n {
        return Err(Error::schema(
            "relation",
            format!("{} rows for size {n}", doc.relation.len()),
        ));
    }
    for (x, row) in doc.relation.iter().enumerate() {
        if row.len() != n {
            return Err(Error::schema(
                format!("relation[{x}]"),
                format!("{} entries for size {n}", row.len()),
            ));
        }
        if let Some(y) = row.iter().position(|&l| l >= r) {
            return Err(Error::schema(
                format!("relation[{x}][{y}]"),
                format!("label {} is not below num_relations {r}", row[y]),
            ));
        }
    }
    if let Some(labels) = &doc.labels {
        if labels.len() != r {
            return Err(Error::schema(
                "labels",
                format!("{} labels for {r} relations", labels.len()),
            ));
        }
    }
    RelationMatrix::new(r, &doc.relation)
}

/// Parses a scheme document up to its shape, leaving the axioms unchecked.
pub fn parse_relation_matrix(text: &str) -> Result<(RelationMatrix, Option<Vec<String>>)> {
    let doc: SchemeDoc = serde_json::from_str(text).map_err(json_error)?;
    let m = matrix_of(&doc)?;
    Ok((m, doc.labels))
}

/// Parses and validates a scheme document.
pub fn parse_scheme(text: &str) -> Result<Scheme> {
    let (m, labels) = parse_relation_matrix(text)?;
    let s = Scheme::try_from(m)?;
    match labels {
        Some(l) => s.with_labels(l),
        None => Ok(s),
    }
}

pub fn parse_sring(text: &str) -> Result<SringDescriptor> {
    serde_json::from_str(text).map_err(json_error)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FactorDoc {
    Ref(FactorRef),
    Scheme(SchemeDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorRef {
    #[serde(rename = "ref")]
    name: String,
    v: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerDoc {
    factors: Vec<FactorDoc>,
    #[serde(default)]
    repeat: bool,
}

/// Parses `{"factors": [scheme | {"ref": "kernel-base", "v": V}], "repeat": bool}`.
pub fn parse_tower(text: &str) -> Result<Tower> {
    let doc: TowerDoc = serde_json::from_str(text).map_err(json_error)?;
    let mut factors = Vec::with_capacity(doc.factors.len());
    for (i, f) in doc.factors.iter().enumerate() {
        let s = match f {
            FactorDoc::Ref(r) if r.name == "kernel-base" => class_one(r.v)
                .map_err(|e| Error::schema(format!("factors[{i}].v"), e.to_string()))?,
            FactorDoc::Ref(r) => {
                return Err(Error::schema(
                    format!("factors[{i}].ref"),
                    format!("unknown reference {:?}", r.name),
                ))
            }
            FactorDoc::Scheme(d) => {
                let m = matrix_of(d).map_err(|e| nest(i, e))?;
                Scheme::try_from(m)?
            }
        };
        factors.push(s);
    }
    if factors.is_empty() {
        return Err(Error::schema("factors", "at least one factor is required"));
    }
    if doc.repeat {
        Tower::repeating(factors)
    } else {
        Tower::new(factors)
    }
}

fn nest(i: usize, e: Error) -> Error {
    match e {
        Error::Schema { location, message } => {
            Error::schema(format!("factors[{i}].{location}"), message)
        }
        other => other,
    }
}

/// Matrix-text export: one block of `n` lines of space-separated 0/1 per
/// relation, blocks separated by a blank line.
pub fn adjacency_text(s: &Scheme) -> String {
    let n = s.size();
    let mut out = String::new();
    for l in 0..s.num_relations() {
        if l > 0 {
            out.push('\n');
        }
        for x in 0..n {
            let row: Vec<&str> = (0..n)
                .map(|y| if s.relation(x, y) == l { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::kernel_scheme;

    #[test]
    fn class_one_document() {
        let s = class_one(2).unwrap();
        assert_eq!(
            scheme_to_json(&s),
            r#"{"size":2,"num_relations":2,"relation":[[0,1],[1,0]]}"#
        );
    }

    #[test]
    fn round_trip() {
        let s = kernel_scheme(3, 2).unwrap();
        assert_eq!(parse_scheme(&scheme_to_json(&s)).unwrap(), s);
        let named = class_one(3)
            .unwrap()
            .with_labels(vec!["eq".into(), "ne".into()])
            .unwrap();
        assert_eq!(parse_scheme(&scheme_to_json(&named)).unwrap(), named);
    }

    fn location(text: &str) -> String {
        match parse_scheme(text) {
            Err(Error::Schema { location, .. }) => location,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics() {
        assert_eq!(
            location(r#"{"size":2,"num_relations":2,"relation":[[0,2],[1,0]]}"#),
            "relation[0][1]"
        );
        assert!(matches!(
            parse_scheme(r#"{"size":2,"num_relations":2,"relation":[[1,0],[0,1]]}"#),
            Err(Error::Axioms(_))
        ));
        assert_eq!(
            location(r#"{"size":2,"num_relations":2,"relation":[[0,1]]}"#),
            "relation"
        );
        assert!(location("{\"size\":2,\n\"colour\":1}").starts_with("line 2"));
        assert!(matches!(
            parse_scheme(
                r#"{"size":3,"num_relations":2,"relation":[[0,1,1],[1,0,1],[1,1,0]],"labels":["a"]}"#
            ),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn axiom_failures_are_not_schema_errors() {
        let text = r#"{"size":3,"num_relations":3,"relation":[[0,1,2],[1,0,2],[2,1,0]]}"#;
        assert!(matches!(parse_scheme(text), Err(Error::Axioms(_))));
        assert!(parse_relation_matrix(text).is_ok());
    }

    #[test]
    fn towers() {
        let t = parse_tower(r#"{"factors":[{"ref":"kernel-base","v":2}],"repeat":true}"#).unwrap();
        assert_eq!(*t.truncation(3).unwrap(), kernel_scheme(3, 2).unwrap());
        let h3 = scheme_to_json(&class_one(3).unwrap());
        let t = parse_tower(&format!(
            r#"{{"factors":[{{"ref":"kernel-base","v":2}},{h3}]}}"#
        ))
        .unwrap();
        assert_eq!(t.max_depth(), Some(2));
        assert!(parse_tower(r#"{"factors":[{"ref":"other","v":2}]}"#).is_err());
        assert!(parse_tower(r#"{"factors":[]}"#).is_err());
    }

    #[test]
    fn matrix_text() {
        assert_eq!(
            adjacency_text(&class_one(2).unwrap()),
            "1 0\n0 1\n\n0 1\n1 0\n"
        );
    }
}
