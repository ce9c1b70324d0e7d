//! POSET text format, version 1.
//!
//! ```text
//! # comment
//! poset 4
//! rel 0 2
//! rel 1 3
//! A: 0 1
//! B: 2 3
//! ```
//!
//! `rel i j` declares `i < j`; the reader closes transitively. The optional
//! `A:` / `B:` lines declare an ordered bipartition and must appear together.
//! The writer emits only cover pairs, sorted lexicographically.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::poset::{BipartitePoset, Poset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetFile {
    pub poset: Poset,
    pub bipartition: Option<BipartitePoset>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| format_err(line, format!("expected an element index, found `{tok}`")))
}

pub fn parse_poset(text: &str) -> Result<PosetFile> {
    let mut n = None;
    let mut pairs = Vec::new();
    let mut a_part = None;
    let mut b_part = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(size) = n else {
            let mut toks = line.split_whitespace();
            match (toks.next(), toks.next(), toks.next()) {
                (Some("poset"), Some(count), None) => {
                    n = Some(parse_index(count, line_no)?);
                    continue;
                }
                _ => return Err(format_err(line_no, "expected header `poset <n>`")),
            }
        };
        if let Some(rest) = line.strip_prefix("A:") {
            if a_part.is_some() {
                return Err(format_err(line_no, "duplicate `A:` line"));
            }
            a_part = Some(parse_list(rest, line_no)?);
        } else if let Some(rest) = line.strip_prefix("B:") {
            if b_part.is_some() {
                return Err(format_err(line_no, "duplicate `B:` line"));
            }
            b_part = Some(parse_list(rest, line_no)?);
        } else {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["rel", x, y] => {
                    let (x, y) = (parse_index(x, line_no)?, parse_index(y, line_no)?);
                    for v in [x, y] {
                        if v >= size {
                            return Err(format_err(
                                line_no,
                                format!("element {v} out of range for `poset {size}`"),
                            ));
                        }
                    }
                    pairs.push((x, y));
                }
                _ => return Err(format_err(line_no, format!("unrecognized line `{line}`"))),
            }
        }
    }

    let n = n.ok_or_else(|| format_err(0, "missing `poset <n>` header"))?;
    let poset = Poset::from_relations(n, pairs)?;
    let bipartition = match (a_part, b_part) {
        (None, None) => None,
        (Some(a), Some(b)) => Some(BipartitePoset::new(poset.clone(), a, b)?),
        _ => return Err(format_err(0, "`A:` and `B:` lines must appear together")),
    };
    Ok(PosetFile { poset, bipartition })
}

fn parse_list(rest: &str, line: usize) -> Result<Vec<usize>> {
    rest.split_whitespace().map(|t| parse_index(t, line)).collect()
}

pub fn write_poset(poset: &Poset) -> String {
    let mut out = format!("poset {}\n", poset.len());
    for (x, y) in poset.covers() {
        writeln!(out, "rel {x} {y}").unwrap();
    }
    out
}

pub fn write_bipartite(bp: &BipartitePoset) -> String {
    let mut out = write_poset(bp.poset());
    for (tag, part) in [("A:", bp.a_order()), ("B:", bp.b_order())] {
        out.push_str(tag);
        for x in part {
            write!(out, " {x}").unwrap();
        }
        out.push('\n');
    }
    out
}
