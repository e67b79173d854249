//! Line-oriented text formats for instances and set-cover inputs.
//!
//! Instance files:
//!
//! ```text
//! p pvc <n> <m> <r>
//! v <id> <cost>                 n lines
//! e <eid> <u> <v> <weight>      m lines
//! g <gid> <eid> <eid> ...       one or more lines per group
//! k <gid> <target>              r lines
//! ```
//!
//! Set-cover files: `p sc <r> <m>` followed by `s <sid> <cost> <elem>...`.
//!
//! `#` starts a comment that runs to end of line. Serialization is canonical
//! (id order, single spaces, one `g` line per group, trailing newline) so two
//! equal instances serialize to identical bytes.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{Edge, Instance, InstanceError, SetCoverInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 when the error concerns the file as a whole.
    pub line: usize,
    /// 1-based column of the offending token; 0 when not tied to a token.
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    InvalidUtf8,
    MissingHeader,
    UnexpectedHeader,
    BadHeader(String),
    UnknownRecord(String),
    BadInteger(String),
    WrongArity {
        record: char,
        expected: &'static str,
        got: usize,
    },
    DuplicateId {
        record: char,
        id: usize,
    },
    IdOutOfRange {
        record: char,
        id: usize,
        limit: usize,
    },
    MissingRecord {
        record: char,
        id: usize,
    },
    DuplicateGroupEdge {
        group: usize,
        edge: usize,
    },
    Invariant(InstanceError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            InvalidUtf8 => write!(f, "input is not valid UTF-8"),
            MissingHeader => write!(f, "missing `p` header line"),
            UnexpectedHeader => write!(f, "`p` header must be the first record and appear once"),
            BadHeader(s) => write!(f, "malformed header: {s}"),
            UnknownRecord(s) => write!(f, "unknown record type `{s}`"),
            BadInteger(s) => write!(f, "expected a non-negative integer, found `{s}`"),
            WrongArity {
                record,
                expected,
                got,
            } => {
                write!(f, "`{record}` record expects {expected} fields, got {got}")
            }
            DuplicateId { record, id } => write!(f, "duplicate `{record}` record for id {id}"),
            IdOutOfRange { record, id, limit } => {
                write!(f, "`{record}` id {id} out of range (must be < {limit})")
            }
            MissingRecord { record, id } => write!(f, "missing `{record}` record for id {id}"),
            DuplicateGroupEdge { group, edge } => {
                write!(f, "edge {edge} declared twice in group {group}")
            }
            Invariant(e) => write!(f, "invalid instance: {e}"),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, idx: usize, kind: ParseErrorKind) -> ParseError {
        let col = self.tokens.get(idx).map_or(1, |t| t.col);
        ParseError {
            line: self.number,
            col,
            kind,
        }
    }

    fn int(&self, idx: usize) -> Result<u64, ParseError> {
        let tok = &self.tokens[idx];
        tok.text
            .parse::<u64>()
            .map_err(|_| self.err(idx, ParseErrorKind::BadInteger(tok.text.to_string())))
    }

    fn index(&self, idx: usize) -> Result<usize, ParseError> {
        let value = self.int(idx)?;
        usize::try_from(value).map_err(|_| {
            self.err(
                idx,
                ParseErrorKind::BadInteger(self.tokens[idx].text.to_string()),
            )
        })
    }

    fn arity(&self, record: char, expected: &'static str, ok: bool) -> Result<(), ParseError> {
        if ok {
            Ok(())
        } else {
            Err(self.err(
                0,
                ParseErrorKind::WrongArity {
                    record,
                    expected,
                    got: self.tokens.len() - 1,
                },
            ))
        }
    }
}

fn tokenize(bytes: &[u8]) -> Result<Vec<Line<'_>>, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let good = &bytes[..e.valid_up_to()];
        let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
        let col = good.len() - good.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
        ParseError {
            line,
            col,
            kind: ParseErrorKind::InvalidUtf8,
        }
    })?;
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body
            .char_indices()
            .chain(std::iter::once((body.len(), ' ')))
        {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &body[s..pos],
                        col: s + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if !tokens.is_empty() {
            lines.push(Line {
                number: idx + 1,
                tokens,
            });
        }
    }
    Ok(lines)
}

/// Parses an instance file. With `strict_partition` the groups must be
/// pairwise disjoint and cover every edge.
pub fn parse_instance(bytes: &[u8], strict_partition: bool) -> Result<Instance, ParseError> {
    let lines = tokenize(bytes)?;
    let mut iter = lines.iter();
    let header = iter.next().ok_or(ParseError {
        line: 0,
        col: 0,
        kind: ParseErrorKind::MissingHeader,
    })?;
    if header.tokens[0].text != "p" {
        return Err(header.err(0, ParseErrorKind::MissingHeader));
    }
    if header.tokens.len() != 5 || header.tokens[1].text != "pvc" {
        return Err(header.err(
            0,
            ParseErrorKind::BadHeader("expected `p pvc <n> <m> <r>`".into()),
        ));
    }
    let n = header.index(2)?;
    let m = header.index(3)?;
    let r = header.index(4)?;

    let mut costs: Vec<Option<(u64, usize)>> = vec![None; n];
    let mut edges: Vec<Option<(Edge, usize)>> = vec![None; m];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); r];
    let mut seen_in_group: Vec<std::collections::HashSet<usize>> = vec![Default::default(); r];
    let mut group_line: Vec<Option<usize>> = vec![None; r];
    let mut targets: Vec<Option<(u64, usize)>> = vec![None; r];

    for line in iter {
        let kind = line.tokens[0].text;
        match kind {
            "p" => return Err(line.err(0, ParseErrorKind::UnexpectedHeader)),
            "v" => {
                line.arity('v', "2", line.tokens.len() == 3)?;
                let id = line.index(1)?;
                let cost = line.int(2)?;
                let slot = costs.get_mut(id).ok_or_else(|| {
                    line.err(
                        1,
                        ParseErrorKind::IdOutOfRange {
                            record: 'v',
                            id,
                            limit: n,
                        },
                    )
                })?;
                if slot.is_some() {
                    return Err(line.err(1, ParseErrorKind::DuplicateId { record: 'v', id }));
                }
                *slot = Some((cost, line.number));
            }
            "e" => {
                line.arity('e', "4", line.tokens.len() == 5)?;
                let id = line.index(1)?;
                let u = line.index(2)?;
                let v = line.index(3)?;
                let w = line.int(4)?;
                let slot = edges.get_mut(id).ok_or_else(|| {
                    line.err(
                        1,
                        ParseErrorKind::IdOutOfRange {
                            record: 'e',
                            id,
                            limit: m,
                        },
                    )
                })?;
                if slot.is_some() {
                    return Err(line.err(1, ParseErrorKind::DuplicateId { record: 'e', id }));
                }
                *slot = Some((Edge::new(u, v, w), line.number));
            }
            "g" => {
                line.arity('g', "at least 2", line.tokens.len() >= 3)?;
                let gid = line.index(1)?;
                if gid >= r {
                    return Err(line.err(
                        1,
                        ParseErrorKind::IdOutOfRange {
                            record: 'g',
                            id: gid,
                            limit: r,
                        },
                    ));
                }
                group_line[gid].get_or_insert(line.number);
                for idx in 2..line.tokens.len() {
                    let eid = line.index(idx)?;
                    if eid >= m {
                        return Err(line.err(
                            idx,
                            ParseErrorKind::IdOutOfRange {
                                record: 'e',
                                id: eid,
                                limit: m,
                            },
                        ));
                    }
                    if !seen_in_group[gid].insert(eid) {
                        return Err(line.err(
                            idx,
                            ParseErrorKind::DuplicateGroupEdge {
                                group: gid,
                                edge: eid,
                            },
                        ));
                    }
                    members[gid].push(eid);
                }
            }
            "k" => {
                line.arity('k', "2", line.tokens.len() == 3)?;
                let gid = line.index(1)?;
                let target = line.int(2)?;
                let slot = targets.get_mut(gid).ok_or_else(|| {
                    line.err(
                        1,
                        ParseErrorKind::IdOutOfRange {
                            record: 'k',
                            id: gid,
                            limit: r,
                        },
                    )
                })?;
                if slot.is_some() {
                    return Err(line.err(
                        1,
                        ParseErrorKind::DuplicateId {
                            record: 'k',
                            id: gid,
                        },
                    ));
                }
                *slot = Some((target, line.number));
            }
            other => return Err(line.err(0, ParseErrorKind::UnknownRecord(other.to_string()))),
        }
    }

    let missing = |record: char, id: usize| ParseError {
        line: 0,
        col: 0,
        kind: ParseErrorKind::MissingRecord { record, id },
    };
    let costs_v: Vec<u64> = costs
        .iter()
        .enumerate()
        .map(|(id, c)| c.map(|(c, _)| c).ok_or_else(|| missing('v', id)))
        .collect::<Result<_, _>>()?;
    let edges_v: Vec<Edge> = edges
        .iter()
        .enumerate()
        .map(|(id, e)| e.map(|(e, _)| e).ok_or_else(|| missing('e', id)))
        .collect::<Result<_, _>>()?;
    let mut groups = Vec::with_capacity(r);
    for (gid, list) in members.into_iter().enumerate() {
        let (target, _) = targets[gid].ok_or_else(|| missing('k', gid))?;
        groups.push((list, target));
    }

    Instance::new(costs_v, edges_v, groups, strict_partition).map_err(|e| {
        let line = match &e {
            InstanceError::EndpointOutOfRange { edge, .. }
            | InstanceError::SelfLoop { edge, .. }
            | InstanceError::ZeroWeight { edge } => edges[*edge].map_or(0, |(_, l)| l),
            InstanceError::TargetExceedsWeight { group, .. } => {
                targets[*group].map_or(0, |(_, l)| l)
            }
            InstanceError::EmptyGroup { group } => targets[*group].map_or(0, |(_, l)| l),
            InstanceError::OverlappingGroups { second, .. } => group_line[*second].unwrap_or(0),
            InstanceError::UncoveredEdge { edge } => edges[*edge].map_or(0, |(_, l)| l),
            _ => 0,
        };
        ParseError {
            line,
            col: 0,
            kind: ParseErrorKind::Invariant(e),
        }
    })
}

/// Canonical text form of an instance.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p pvc {} {} {}",
        inst.num_vertices(),
        inst.num_edges(),
        inst.num_groups()
    );
    for (id, c) in inst.costs().iter().enumerate() {
        let _ = writeln!(out, "v {id} {c}");
    }
    for (id, e) in inst.edges().iter().enumerate() {
        let _ = writeln!(out, "e {id} {} {} {}", e.u, e.v, e.weight);
    }
    for (gid, g) in inst.groups().iter().enumerate() {
        let _ = write!(out, "g {gid}");
        for eid in &g.edges {
            let _ = write!(out, " {eid}");
        }
        out.push('\n');
    }
    for (gid, g) in inst.groups().iter().enumerate() {
        let _ = writeln!(out, "k {gid} {}", g.target);
    }
    out
}

pub fn parse_set_cover(bytes: &[u8]) -> Result<SetCoverInstance, ParseError> {
    let lines = tokenize(bytes)?;
    let mut iter = lines.iter();
    let header = iter.next().ok_or(ParseError {
        line: 0,
        col: 0,
        kind: ParseErrorKind::MissingHeader,
    })?;
    if header.tokens[0].text != "p" {
        return Err(header.err(0, ParseErrorKind::MissingHeader));
    }
    if header.tokens.len() != 4 || header.tokens[1].text != "sc" {
        return Err(header.err(
            0,
            ParseErrorKind::BadHeader("expected `p sc <r> <m>`".into()),
        ));
    }
    let universe = header.index(2)?;
    let m = header.index(3)?;
    let mut sets: Vec<Option<(Vec<usize>, u64)>> = vec![None; m];
    for line in iter {
        match line.tokens[0].text {
            "p" => return Err(line.err(0, ParseErrorKind::UnexpectedHeader)),
            "s" => {
                line.arity('s', "at least 2", line.tokens.len() >= 3)?;
                let sid = line.index(1)?;
                let cost = line.int(2)?;
                let elems = (3..line.tokens.len())
                    .map(|i| line.index(i))
                    .collect::<Result<Vec<_>, _>>()?;
                let slot = sets.get_mut(sid).ok_or_else(|| {
                    line.err(
                        1,
                        ParseErrorKind::IdOutOfRange {
                            record: 's',
                            id: sid,
                            limit: m,
                        },
                    )
                })?;
                if slot.is_some() {
                    return Err(line.err(
                        1,
                        ParseErrorKind::DuplicateId {
                            record: 's',
                            id: sid,
                        },
                    ));
                }
                *slot = Some((elems, cost));
            }
            other => return Err(line.err(0, ParseErrorKind::UnknownRecord(other.to_string()))),
        }
    }
    let mut members = Vec::with_capacity(m);
    let mut costs = Vec::with_capacity(m);
    for (sid, s) in sets.into_iter().enumerate() {
        let (elems, cost) = s.ok_or(ParseError {
            line: 0,
            col: 0,
            kind: ParseErrorKind::MissingRecord {
                record: 's',
                id: sid,
            },
        })?;
        members.push(elems);
        costs.push(cost);
    }
    SetCoverInstance::new(universe, members, costs).map_err(|e| ParseError {
        line: 0,
        col: 0,
        kind: ParseErrorKind::Invariant(e),
    })
}

pub fn serialize_set_cover(sc: &SetCoverInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p sc {} {}", sc.universe(), sc.num_sets());
    for (sid, (set, cost)) in sc.sets().iter().zip(sc.costs()).enumerate() {
        let _ = write!(out, "s {sid} {cost}");
        for x in set {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}
