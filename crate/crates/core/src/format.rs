//! Text and structured (JSON) serialization of arrangements.
//!
//! Text format, one circle per line:
//!
//! ```text
//! <label>: <label><sign> <label><sign> ...
//! ```
//!
//! with sign in `{+,-}`; the first listed event is the traversal start. The
//! structured equivalent is a tree with fields
//! `{n, codes: {label: [[label, sign], ...]}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{Arrangement, CodesError, Label, Sign, SignedCode};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: duplicate circle label {label}")]
    DuplicateCircle { line: usize, label: u32 },
    #[error("line {line}: malformed event `{token}` (expected <label><sign> with sign + or -)")]
    BadEvent { line: usize, token: String },
    #[error("line {line}: malformed circle line (expected `<label>: events...`)")]
    BadLine { line: usize },
    #[error("no circles found in input")]
    Empty,
    #[error("invalid JSON document: {0}")]
    Json(String),
    #[error("field n = {n} does not match the {found} codes present")]
    WrongCount { n: usize, found: usize },
    #[error("{0}")]
    Codes(#[from] CodesError),
}

/// Parses the one-circle-per-line text format.
pub fn parse_text(input: &str) -> Result<Arrangement, FormatError> {
    let mut codes = Vec::new();
    let mut seen = BTreeMap::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, rest) = line.split_once(':').ok_or(FormatError::BadLine { line: line_no })?;
        let owner: u32 = head
            .trim()
            .parse()
            .map_err(|_| FormatError::BadLine { line: line_no })?;
        if seen.insert(owner, line_no).is_some() {
            return Err(FormatError::DuplicateCircle {
                line: line_no,
                label: owner,
            });
        }
        let mut events = Vec::new();
        for token in rest.split_whitespace() {
            events.push(parse_event(token).ok_or_else(|| FormatError::BadEvent {
                line: line_no,
                token: token.to_string(),
            })?);
        }
        codes.push(SignedCode::new(Label(owner), events));
    }
    if codes.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(Arrangement::new(codes)?)
}

fn parse_event(token: &str) -> Option<(Label, Sign)> {
    let sign = Sign::from_char(token.chars().last()?)?;
    let label: u32 = token[..token.len() - 1].parse().ok()?;
    Some((Label(label), sign))
}

/// Emits the text format: circles in ascending label order, one per line,
/// with a trailing newline. Byte-stable for equal arrangements.
pub fn emit_text(arr: &Arrangement) -> String {
    let mut out = String::new();
    for code in arr.codes() {
        out.push_str(&code.to_string());
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ArrangementDoc {
    n: usize,
    codes: BTreeMap<String, Vec<(u32, String)>>,
}

/// Parses the structured JSON equivalent.
pub fn parse_json(input: &str) -> Result<Arrangement, FormatError> {
    let doc: ArrangementDoc =
        serde_json::from_str(input).map_err(|e| FormatError::Json(e.to_string()))?;
    if doc.n != doc.codes.len() {
        return Err(FormatError::WrongCount {
            n: doc.n,
            found: doc.codes.len(),
        });
    }
    let mut codes = Vec::new();
    for (owner, events) in doc.codes {
        let owner: u32 = owner.parse().map_err(|_| FormatError::Json(format!(
            "circle key `{}` is not an integer label",
            owner
        )))?;
        let mut parsed = Vec::new();
        for (label, sign) in events {
            let sign = match sign.as_str() {
                "+" => Sign::Plus,
                "-" => Sign::Minus,
                other => {
                    return Err(FormatError::Json(format!(
                        "circle {}: invalid sign `{}`",
                        owner, other
                    )))
                }
            };
            parsed.push((Label(label), sign));
        }
        codes.push(SignedCode::new(Label(owner), parsed));
    }
    if codes.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(Arrangement::new(codes)?)
}

/// Emits the structured JSON equivalent (pretty-printed, keys sorted).
pub fn emit_json(arr: &Arrangement) -> String {
    let codes = arr
        .codes()
        .map(|code| {
            (
                code.owner.to_string(),
                code.events
                    .iter()
                    .map(|&(l, s)| (l.0, s.as_char().to_string()))
                    .collect(),
            )
        })
        .collect();
    let doc = ArrangementDoc {
        n: arr.size(),
        codes,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("arrangement doc serializes");
    out.push('\n');
    out
}

/// Parses either format, sniffing JSON by a leading `{`.
pub fn parse_auto(input: &str) -> Result<Arrangement, FormatError> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::gen_c2;

    #[test]
    fn text_round_trip() {
        let a = gen_c2(5).unwrap();
        let text = emit_text(&a);
        assert_eq!(parse_text(&text).unwrap(), a);
        // circle 3 line is the worked example
        assert!(text.lines().any(|l| l == "3: 1+ 2+ 4- 5- 5+ 4+ 2- 1-"));
    }

    #[test]
    fn json_round_trip() {
        let a = gen_c2(4).unwrap();
        let json = emit_json(&a);
        assert_eq!(parse_json(&json).unwrap(), a);
        assert_eq!(parse_auto(&json).unwrap(), a);
    }

    #[test]
    fn rejects_duplicate_circles() {
        let err = parse_text("1: 2+ 2-\n1: 2- 2+\n").unwrap_err();
        assert!(matches!(err, FormatError::DuplicateCircle { label: 1, .. }));
    }

    #[test]
    fn rejects_malformed_signs() {
        let err = parse_text("1: 2* 2-\n2: 1- 1+\n").unwrap_err();
        assert!(matches!(err, FormatError::BadEvent { .. }));
    }

    #[test]
    fn parses_empty_code_line() {
        let a = parse_text("7:\n").unwrap();
        assert_eq!(a.size(), 1);
        assert!(a.code(Label(7)).unwrap().is_empty());
    }

    #[test]
    fn json_rejects_wrong_count() {
        let err = parse_json(r#"{"n": 3, "codes": {"1": [], "2": []}}"#).unwrap_err();
        assert!(matches!(err, FormatError::WrongCount { n: 3, found: 2 }));
    }
}
