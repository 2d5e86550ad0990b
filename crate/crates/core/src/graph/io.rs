use super::Digraph;
use crate::error::{Error, Result};

/// Parses one graph6 line. Edges come out in upper-triangle bit order
/// `(0,1), (0,2), (1,2), (0,3), ...`, each oriented from the smaller vertex.
pub fn parse_graph6(text: &str) -> Result<Digraph> {
    let line = text.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(Error::Graph6("empty input".into()));
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Graph6(format!("byte {b:#x} outside the printable graph6 range")));
    }
    let (n, header) = decode_size(bytes)?;
    let body = &bytes[header..];
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if body.len() < need {
        return Err(Error::Graph6(format!("truncated: {} data bytes, need {need}", body.len())));
    }
    if body.len() > need {
        return Err(Error::Graph6(format!("{} trailing bytes", body.len() - need)));
    }

    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if (byte >> (5 - k % 6)) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if bits % 6 != 0 {
        let pad = (body[need - 1] - 63) & ((1u8 << (6 - bits % 6)) - 1);
        if pad != 0 {
            return Err(Error::Graph6("non-zero padding bits".into()));
        }
    }
    Digraph::new(n, edges)
}

fn decode_size(bytes: &[u8]) -> Result<(usize, usize)> {
    let word = |from: usize, len: usize| -> Result<usize> {
        let chunk = bytes
            .get(from..from + len)
            .ok_or_else(|| Error::Graph6("truncated size header".into()))?;
        Ok(chunk.iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize))
    };
    if bytes[0] != 126 {
        Ok(((bytes[0] - 63) as usize, 1))
    } else if bytes.get(1) != Some(&126) {
        Ok((word(1, 3)?, 4))
    } else {
        Ok((word(2, 6)?, 8))
    }
}

/// Parses every non-blank line of a graph6 file.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Digraph>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(parse_graph6).collect()
}

/// Parses `n m` followed by `m` lines of `tail head`. Blank lines and `#`
/// comments are ignored.
pub fn parse_edgelist(text: &str) -> Result<Digraph> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::EdgeList("missing header".into()))?;
    let (n, m) = parse_pair(header)?;
    let mut edges = Vec::with_capacity(m);
    for l in lines {
        let (u, v) = parse_pair(l)?;
        if u >= n || v >= n {
            return Err(Error::EdgeList(format!("edge ({u},{v}) has a vertex id >= {n}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::EdgeList(format!("header announces {m} edges, found {}", edges.len())));
    }
    Digraph::new(n, edges)
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::EdgeList(format!("expected two integers, got {line:?}"))),
    }
}
