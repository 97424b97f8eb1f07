//! Text formats: edge lists, whitespace dense matrices, and vector files.

use std::collections::BTreeSet;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::Serialize;

use super::{validate_stochastic, DenseMatrix, StochasticMatrix, DEFAULT_ROW_SUM_TOL};
use crate::error::{Error, Result};

/// What to do with a node that has no outgoing weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DanglingPolicy {
    /// Replace the row with `1/n` in every column.
    #[default]
    Uniform,
    /// Put weight one on the diagonal.
    SelfLoop,
    Reject,
}

impl FromStr for DanglingPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(DanglingPolicy::Uniform),
            "self_loop" | "self-loop" => Ok(DanglingPolicy::SelfLoop),
            "reject" => Ok(DanglingPolicy::Reject),
            other => Err(format!(
                "unknown dangling policy `{other}` (expected uniform, self_loop or reject)"
            )),
        }
    }
}

impl fmt::Display for DanglingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DanglingPolicy::Uniform => "uniform",
            DanglingPolicy::SelfLoop => "self_loop",
            DanglingPolicy::Reject => "reject",
        })
    }
}

/// Result of edge-list ingestion.
#[derive(Debug, Clone)]
pub struct IngestedGraph {
    pub matrix: StochasticMatrix,
    /// Original id of each dense index; `None` when the ids were already
    /// `0..n`.
    pub node_ids: Option<Vec<u64>>,
    /// Dense indices of nodes whose rows were patched by the dangling policy.
    pub dangling: Vec<usize>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        message: message.into(),
    }
}

fn significant(line: &str) -> Option<&str> {
    let t = line.trim();
    if t.is_empty() || t.starts_with('#') {
        None
    } else {
        Some(t)
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{tok}`")));
    }
    Ok(x)
}

/// Parse an edge list from a string. See [`ingest_edge_list`].
pub fn parse_edge_list(text: &str, policy: DanglingPolicy) -> Result<IngestedGraph> {
    ingest_edge_list(text.as_bytes(), policy)
}

/// Read `src dst [weight]` lines and normalize out-weights per source.
///
/// `#` starts a comment line and blank lines are skipped. Ids that are not
/// exactly `0..n` are remapped in increasing order.
pub fn ingest_edge_list<R: BufRead>(reader: R, policy: DanglingPolicy) -> Result<IngestedGraph> {
    let mut edges: Vec<(u64, u64, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let Some(body) = significant(&line) else {
            continue;
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(parse_err(
                lineno,
                format!("expected `src dst [weight]`, found {} fields", toks.len()),
            ));
        }
        let id = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| parse_err(lineno, format!("invalid node id `{t}`")))
        };
        let (src, dst) = (id(toks[0])?, id(toks[1])?);
        let w = match toks.get(2) {
            Some(t) => parse_real(t, lineno)?,
            None => 1.0,
        };
        if w < 0.0 {
            return Err(parse_err(lineno, format!("negative weight {w}")));
        }
        edges.push((src, dst, w));
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let ids: BTreeSet<u64> = edges.iter().flat_map(|&(s, d, _)| [s, d]).collect();
    let n = ids.len();
    let is_dense = *ids.iter().next_back().unwrap() as usize == n - 1;
    let node_ids: Option<Vec<u64>> = (!is_dense).then(|| ids.iter().copied().collect());
    let index = |id: u64| -> usize {
        match &node_ids {
            None => id as usize,
            Some(v) => v.binary_search(&id).unwrap(),
        }
    };

    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(s, d, w) in &edges {
        if w > 0.0 {
            rows[index(s)].push((index(d), w));
        }
    }

    let mut dangling = Vec::new();
    for (i, row) in rows.iter_mut().enumerate() {
        let sum: f64 = row.iter().map(|&(_, w)| w).sum();
        if sum > 0.0 {
            row.iter_mut().for_each(|(_, w)| *w /= sum);
            continue;
        }
        dangling.push(i);
        match policy {
            DanglingPolicy::Uniform => *row = (0..n).map(|j| (j, 1.0 / n as f64)).collect(),
            DanglingPolicy::SelfLoop => *row = vec![(i, 1.0)],
            DanglingPolicy::Reject => {
                let node = node_ids.as_ref().map_or(i as u64, |v| v[i]) as usize;
                return Err(Error::DanglingNode { node });
            }
        }
    }

    let matrix = validate_stochastic(rows, n, DEFAULT_ROW_SUM_TOL)?;
    Ok(IngestedGraph {
        matrix,
        node_ids,
        dangling,
    })
}

/// Whitespace-separated dense matrix, one row per line.
pub fn parse_dense_matrix(text: &str) -> Result<DenseMatrix> {
    let mut rows = Vec::new();
    let mut first_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let Some(body) = significant(line) else {
            continue;
        };
        if rows.is_empty() {
            first_line = idx + 1;
        }
        let row = body
            .split_whitespace()
            .map(|t| parse_real(t, idx + 1))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(prev) = rows.first().map(Vec::len) {
            if row.len() != prev {
                return Err(parse_err(
                    idx + 1,
                    format!(
                        "row has {} entries, line {first_line} has {prev}",
                        row.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    DenseMatrix::from_rows(rows)
}

/// One decimal real per line.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let Some(body) = significant(line) else {
            continue;
        };
        if body.split_whitespace().count() != 1 {
            return Err(parse_err(idx + 1, "expected exactly one number per line"));
        }
        out.push(parse_real(body, idx + 1)?);
    }
    Ok(out)
}

/// [`parse_vector`] with a length check.
pub fn read_vector(text: &str, n: usize) -> Result<Vec<f64>> {
    let v = parse_vector(text)?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    Ok(v)
}

/// Shortest round-trip representation, one entry per line.
pub fn write_vector(x: &[f64]) -> String {
    let mut s = String::with_capacity(x.len() * 24);
    for v in x {
        s.push_str(&format!("{v:e}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic_core::{TransitionMatrix, DEFAULT_DENSE_CAP};

    fn dense(g: &IngestedGraph) -> DenseMatrix {
        g.matrix.densify(DEFAULT_DENSE_CAP).unwrap()
    }

    #[test]
    fn two_cycle_is_permutation() {
        let g = parse_edge_list("0 1\n1 0", DanglingPolicy::Uniform).unwrap();
        assert_eq!(dense(&g).as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert!(g.node_ids.is_none());
        assert!(g.dangling.is_empty());
    }

    #[test]
    fn unit_edges_split_evenly() {
        let g = parse_edge_list("0 1\n0 2\n1 0\n2 0", DanglingPolicy::Reject).unwrap();
        assert_eq!(dense(&g).row(0), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn dangling_policies() {
        let g = parse_edge_list("0 1", DanglingPolicy::Uniform).unwrap();
        assert_eq!(dense(&g).row(1), &[0.5, 0.5]);
        assert_eq!(g.dangling, vec![1]);

        let g = parse_edge_list("0 1", DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(dense(&g).row(1), &[0.0, 1.0]);

        let err = parse_edge_list("0 1", DanglingPolicy::Reject).unwrap_err();
        assert!(matches!(err, Error::DanglingNode { node: 1 }));
    }

    #[test]
    fn comments_weights_and_duplicates() {
        let text = "# header\n\n0 1 3\n0 1 1\n0 2 4.0\n1 0\n2 0 # trailing\n";
        // Trailing tokens after the weight are an error, not a comment.
        assert!(matches!(
            parse_edge_list(text, DanglingPolicy::Uniform),
            Err(Error::ParseError { line: 7, .. })
        ));
        let text = "# header\n\n0 1 3\n0 1 1\n0 2 4.0\n1 0\n2 0\n";
        let g = parse_edge_list(text, DanglingPolicy::Uniform).unwrap();
        assert_eq!(dense(&g).row(0), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn sparse_ids_are_remapped() {
        let g = parse_edge_list("10 30\n30 10\n30 20", DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(g.node_ids, Some(vec![10, 20, 30]));
        assert_eq!(g.matrix.n(), 3);
        assert_eq!(g.dangling, vec![1]);
        assert_eq!(dense(&g).row(2), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn parse_errors_report_line() {
        for (text, line) in [
            ("0 1\nfoo 2", 2),
            ("0 1\n\n1", 3),
            ("0 1 -2", 1),
            ("0 1 nan", 1),
        ] {
            match parse_edge_list(text, DanglingPolicy::Uniform) {
                Err(Error::ParseError { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_edge_list("# nothing\n", DanglingPolicy::Uniform),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn dense_and_vector_files() {
        let d = parse_dense_matrix("# m\n0.5 0.5\n0.25   0.75\n").unwrap();
        assert_eq!(d.as_slice(), &[0.5, 0.5, 0.25, 0.75]);
        assert!(matches!(
            parse_dense_matrix("1 0\n0 1 0\n"),
            Err(Error::ParseError { line: 2, .. })
        ));
        assert!(matches!(
            parse_dense_matrix("1 0 0\n0 1 0\n"),
            Err(Error::NonSquare { .. })
        ));

        let v = vec![0.1, 1e-300, 0.3333333333333333, 0.0];
        assert_eq!(read_vector(&write_vector(&v), 4).unwrap(), v);
        assert!(matches!(
            read_vector("1\n2\n", 3),
            Err(Error::DimensionMismatch {
                expected: 3,
                actual: 2
            })
        ));
        assert!(matches!(
            parse_vector("1 2\n"),
            Err(Error::ParseError { line: 1, .. })
        ));
    }
}
