//! Text formats for graph files.
//!
//! Matrix format: a header line `p q`, then p lines of q characters in
//! {0, 1}. Edge-list format: a header line `p q e`, then e lines `i j` with
//! 0-indexed endpoints. Writers always emit the matrix format.

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

fn parse_usize(tok: &str, line: usize, col: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        col,
        msg: format!("expected {what}, got {tok:?}"),
    })
}

/// Parse either accepted format, detected by the number of header tokens.
pub fn parse_graph(text: &str) -> Result<BipartiteGraph> {
    let mut lines = text.lines().enumerate();
    let (header_idx, header) = loop {
        match lines.next() {
            Some((i, l)) if l.trim().is_empty() => {
                if i == 0 {
                    continue;
                }
                return Err(Error::Parse {
                    line: i + 1,
                    col: 1,
                    msg: "unexpected blank line".into(),
                });
            }
            Some((i, l)) => break (i, l),
            None => {
                return Err(Error::Parse {
                    line: 1,
                    col: 1,
                    msg: "empty input".into(),
                });
            }
        }
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    match toks.len() {
        2 => {
            let p = parse_usize(toks[0], header_idx + 1, 1, "left order")?;
            let q = parse_usize(toks[1], header_idx + 1, 2, "right order")?;
            parse_matrix_body(p, q, header_idx, lines)
        }
        3 => {
            let p = parse_usize(toks[0], header_idx + 1, 1, "left order")?;
            let q = parse_usize(toks[1], header_idx + 1, 2, "right order")?;
            let e = parse_usize(toks[2], header_idx + 1, 3, "edge count")?;
            parse_edge_body(p, q, e, header_idx, lines)
        }
        n => Err(Error::Parse {
            line: header_idx + 1,
            col: 1,
            msg: format!("header must have 2 tokens (matrix) or 3 (edge list), got {n}"),
        }),
    }
}

fn parse_matrix_body<'a>(
    p: usize,
    q: usize,
    header_idx: usize,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<BipartiteGraph> {
    let mut rows: Vec<Vec<u8>> = Vec::with_capacity(p);
    for (i, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if rows.len() == p {
            return Err(Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("expected {p} rows, found extra content"),
            });
        }
        if line.len() != q {
            return Err(Error::Parse {
                line: i + 1,
                col: line.len().min(q) + 1,
                msg: format!("row has {} characters, expected {q}", line.len()),
            });
        }
        let mut row = Vec::with_capacity(q);
        for (j, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        col: j + 1,
                        msg: format!("expected '0' or '1', got {other:?}"),
                    });
                }
            }
        }
        rows.push(row);
    }
    if rows.len() != p {
        return Err(Error::Parse {
            line: header_idx + 1 + rows.len() + 1,
            col: 1,
            msg: format!("expected {p} rows, got {}", rows.len()),
        });
    }
    BipartiteGraph::from_biadjacency(&rows).map_err(|e| match e {
        Error::InputShape(msg) | Error::InputValue(msg) => Error::Parse {
            line: header_idx + 1,
            col: 1,
            msg,
        },
        other => other,
    })
}

fn parse_edge_body<'a>(
    p: usize,
    q: usize,
    e: usize,
    header_idx: usize,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<BipartiteGraph> {
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(e);
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if edges.len() == e {
            return Err(Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("expected {e} edges, found extra content"),
            });
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("edge line must have 2 tokens, got {}", toks.len()),
            });
        }
        let a = parse_usize(toks[0], i + 1, 1, "left index")?;
        let b = parse_usize(toks[1], i + 1, 2, "right index")?;
        if a >= p || b >= q {
            return Err(Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("edge ({a}, {b}) out of range for ({p}, {q})"),
            });
        }
        if edges.contains(&(a, b)) {
            return Err(Error::Parse {
                line: i + 1,
                col: 1,
                msg: format!("duplicate edge ({a}, {b})"),
            });
        }
        edges.push((a, b));
    }
    if edges.len() != e {
        return Err(Error::Parse {
            line: header_idx + 1 + edges.len() + 1,
            col: 1,
            msg: format!("expected {e} edges, got {}", edges.len()),
        });
    }
    BipartiteGraph::from_edges(p, q, &edges)
}

/// Serialize in the matrix format.
pub fn write_graph(g: &BipartiteGraph) -> String {
    let mut out = format!("{} {}\n", g.left_order(), g.right_order());
    for i in 0..g.left_order() {
        for j in 0..g.right_order() {
            out.push(if g.has_edge(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}
