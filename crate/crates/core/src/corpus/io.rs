//! Line-delimited corpus file: `<id> TAB <labels,comma,separated> TAB <text>`,
//! with tabs, newlines and backslashes in the text escaped.

use std::collections::HashSet;

use super::RawDocument;
use crate::{Error, Result};

pub fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_text`]. Unknown escapes are kept verbatim.
pub fn unescape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

pub fn parse_corpus(text: &str) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(labels), Some(body)) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::parse(lineno, "expected `<id> TAB <labels> TAB <text>`"));
        };
        if body.contains('\t') {
            return Err(Error::parse(lineno, "unescaped tab in document text"));
        }
        if id.is_empty() {
            return Err(Error::parse(lineno, "empty document id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(lineno, format!("duplicate document id `{id}`")));
        }
        let labels = labels
            .split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string);
        docs.push(RawDocument::new(id, unescape_text(body), labels));
    }
    Ok(docs)
}

pub fn format_corpus(docs: &[RawDocument]) -> String {
    let mut out = String::new();
    for d in docs {
        let labels: Vec<&str> = d.labels.iter().map(String::as_str).collect();
        out.push_str(&d.id);
        out.push('\t');
        out.push_str(&labels.join(","));
        out.push('\t');
        out.push_str(&escape_text(&d.text));
        out.push('\n');
    }
    out
}
