//! Plain-text file formats.
//!
//! Vector sets: header `# p=<p> n=<n>`, then one vector per line as
//! space-separated base-10 residues. Matrices use the same header (with `n`
//! the column count) and one row per line. Hypergraphs: header `# N=<N>`,
//! then one edge per line as space-separated one-based vertex indices.
//! Graphs: header `# vertices=<count>`, then one `u v` edge per line with
//! zero-based endpoints. Blank lines are skipped everywhere.

use std::fmt::Write as _;

use crate::colorings::{Graph, Hypergraph};
use crate::error::{Error, Result};
use crate::fpgroup::{check_prime, FpMatrix, FpVec};
use crate::setops::VecSet;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Body lines with their one-based line numbers, after the header.
fn split_header(text: &str) -> Result<(&str, Vec<(usize, &str)>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "missing header"))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "header must start with '#'"))?;
    let body = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    Ok((header, body))
}

fn header_value(header: &str, key: &str) -> Result<usize> {
    header
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
        .ok_or_else(|| parse_err(1, format!("header lacks {key}=")))?
        .parse()
        .map_err(|_| parse_err(1, format!("bad value for {key}")))
}

fn parse_numbers(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("not a non-negative integer: {t:?}")))
        })
        .collect()
}

fn parse_rows(text: &str) -> Result<(u8, usize, Vec<FpVec>)> {
    let (header, body) = split_header(text)?;
    let p = header_value(header, "p")?;
    let p = check_prime(p as u32).map_err(|e| parse_err(1, e.to_string()))?;
    let n = header_value(header, "n")?;
    let mut rows = Vec::with_capacity(body.len());
    for (line_no, line) in body {
        let nums = parse_numbers(line_no, line)?;
        if nums.len() != n {
            return Err(parse_err(line_no, format!("expected {n} coordinates, found {}", nums.len())));
        }
        if let Some(&bad) = nums.iter().find(|&&x| x >= p as usize) {
            return Err(parse_err(line_no, format!("residue {bad} out of range for p={p}")));
        }
        rows.push(FpVec::new(p, nums.into_iter().map(|x| x as u8).collect())?);
    }
    Ok((p, n, rows))
}

pub fn parse_vecset(text: &str) -> Result<VecSet> {
    let (p, n, rows) = parse_rows(text)?;
    VecSet::new(p, n, rows)
}

fn push_digits(out: &mut String, digits: &[u8]) {
    for (i, d) in digits.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{d}");
    }
    out.push('\n');
}

pub fn write_vecset(s: &VecSet) -> String {
    let mut out = format!("# p={} n={}\n", s.p(), s.dim());
    for v in s {
        push_digits(&mut out, v.coords());
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<FpMatrix> {
    let (p, n, rows) = parse_rows(text)?;
    FpMatrix::from_rows(p, n, &rows)
}

pub fn write_matrix(m: &FpMatrix) -> String {
    let mut out = format!("# p={} n={}\n", m.p(), m.cols());
    for r in 0..m.rows() {
        push_digits(&mut out, m.row(r));
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let (header, body) = split_header(text)?;
    let n = header_value(header, "N")?;
    let mut edges = Vec::with_capacity(body.len());
    for (line_no, line) in body {
        let e = parse_numbers(line_no, line)?;
        if let Some(&bad) = e.iter().find(|&&v| v == 0 || v > n) {
            return Err(parse_err(line_no, format!("vertex {bad} outside 1..={n}")));
        }
        edges.push(e);
    }
    Hypergraph::new(n, edges)
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("# N={}\n", h.n());
    for e in h.edges() {
        let line: Vec<String> = e.iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let (header, body) = split_header(text)?;
    let n = header_value(header, "vertices")?;
    let mut edges = Vec::with_capacity(body.len());
    for (line_no, line) in body {
        match *parse_numbers(line_no, line)?.as_slice() {
            [u, v] if u < n && v < n => edges.push((u, v)),
            [_, _] => return Err(parse_err(line_no, format!("endpoint outside 0..{n}"))),
            _ => return Err(parse_err(line_no, "expected two endpoints")),
        }
    }
    Graph::from_edges(n, &edges)
}

/// Edge list export. A self-loop is written once as `0 0` when the graph is nonempty.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("# vertices={}\n", g.n());
    if g.has_self_loop() && g.n() > 0 {
        out.push_str("0 0\n");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
