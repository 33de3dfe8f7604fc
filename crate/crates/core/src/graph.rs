//! Social-network graphs in compressed adjacency form.
//!
//! Node IDs from the input are re-indexed densely to `0..n` in ascending
//! order of the original ID; the original IDs are kept for output. Edge ids
//! are positions in the out-adjacency, so per-edge data (probabilities,
//! live-edge worlds) is a flat vector indexed by edge id.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::info;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    directed: bool,
    original_ids: Vec<u64>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    und_offsets: Vec<usize>,
    und_neighbors: Vec<u32>,
    /// Number of edges in the input sense: directed arcs for directed graphs,
    /// unordered pairs for undirected ones.
    input_edges: usize,
}

/// Summary statistics in the style of a dataset table. Degrees are taken on
/// the undirected collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub avg_degree: f64,
}

fn csr(n: usize, pairs: &[(u32, u32)]) -> (Vec<usize>, Vec<u32>) {
    // pairs must be sorted by (row, col)
    let mut offsets = vec![0usize; n + 1];
    for &(u, _) in pairs {
        offsets[u as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, pairs.iter().map(|&(_, v)| v).collect())
}

impl Graph {
    /// Builds a graph over nodes `0..node_count` from index pairs.
    ///
    /// Self-loops and duplicate pairs are dropped. For undirected graphs each
    /// pair is stored in both directions, and `{u, v}` / `{v, u}` count as the
    /// same edge.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)], directed: bool) -> Result<Self> {
        let original_ids = (0..node_count as u64).collect();
        Self::build(original_ids, edges, directed).map(|(g, _)| g)
    }

    fn build(original_ids: Vec<u64>, edges: &[(usize, usize)], directed: bool) -> Result<(Self, usize)> {
        let n = original_ids.len();
        if n > u32::MAX as usize {
            return Err(Error::Invalid(format!("{n} nodes exceeds index width")));
        }
        let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(edges.len() * if directed { 1 } else { 2 });
        let mut self_loops = 0usize;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            arcs.push((u as u32, v as u32));
            if !directed {
                arcs.push((v as u32, u as u32));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let input_edges = if directed { arcs.len() } else { arcs.len() / 2 };
        let dropped = edges.len() - self_loops - input_edges;

        let (out_offsets, out_targets) = csr(n, &arcs);

        let mut rev: Vec<(u32, u32)> = arcs.iter().map(|&(u, v)| (v, u)).collect();
        rev.sort_unstable();
        let (in_offsets, in_sources) = csr(n, &rev);

        let mut und = if directed {
            let mut und = arcs.clone();
            und.extend(rev.iter().copied());
            und.sort_unstable();
            und.dedup();
            und
        } else {
            arcs.clone()
        };
        und.shrink_to_fit();
        let (und_offsets, und_neighbors) = csr(n, &und);

        Ok((
            Graph {
                directed,
                original_ids,
                out_offsets,
                out_targets,
                in_offsets,
                in_sources,
                und_offsets,
                und_neighbors,
                input_edges,
            },
            self_loops + dropped,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.original_ids.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored directed arcs. Undirected edges count twice.
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Edge count in the input's own sense.
    pub fn edge_count(&self) -> usize {
        self.input_edges
    }

    /// Number of edges of the undirected, deduplicated collapse.
    pub fn undirected_edge_count(&self) -> usize {
        self.und_neighbors.len() / 2
    }

    /// Outgoing arcs of `u` as `(arc id, head)`.
    pub fn out_arcs(&self, u: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (lo, hi) = (self.out_offsets[u], self.out_offsets[u + 1]);
        (lo..hi).map(move |e| (e, self.out_targets[e] as usize))
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
            .iter()
            .map(|&u| u as usize)
    }

    /// Arcs as `(tail, head)` in arc-id order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.out_arcs(u).map(move |(_, v)| (u, v)))
    }

    /// Neighbors in the undirected collapse, sorted ascending.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.und_neighbors[self.und_offsets[u]..self.und_offsets[u + 1]]
    }

    /// Degree in the undirected collapse.
    pub fn degree(&self, u: usize) -> usize {
        self.und_offsets[u + 1] - self.und_offsets[u]
    }

    pub fn original_id(&self, index: usize) -> u64 {
        self.original_ids[index]
    }

    pub fn index_of(&self, original: u64) -> Option<usize> {
        self.original_ids.binary_search(&original).ok()
    }

    pub fn stats(&self) -> GraphStats {
        let n = self.node_count();
        GraphStats {
            nodes: n,
            edges: self.edge_count(),
            max_degree: (0..n).map(|u| self.degree(u)).max().unwrap_or(0),
            avg_degree: 2.0 * self.undirected_edge_count() as f64 / n as f64,
        }
    }
}

/// Loads a SNAP-style edge list: one whitespace-separated `u v` pair per
/// line, `#` comment lines and blank lines ignored.
///
/// Every ID that appears on a data line becomes a node, even if its only
/// edge is a dropped self-loop.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let mut fields = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = fields
                .next()
                .ok_or_else(|| parse_err(format!("expected two node ids, got `{trimmed}`")))?;
            tok.parse::<u64>()
                .map_err(|e| parse_err(format!("bad node id `{tok}`: {e}")))
        };
        let u = next_id()?;
        let v = next_id()?;
        if fields.next().is_some() {
            return Err(parse_err(format!("trailing fields in `{trimmed}`")));
        }
        raw.push((u, v));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |id: u64| ids.binary_search(&id).expect("id collected above");
    let edges: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (index(u), index(v))).collect();

    let (graph, dropped) = Graph::build(ids.clone(), &edges, directed)?;
    if graph.arc_count() == 0 {
        return Err(Error::EmptyGraph(path.to_path_buf()));
    }
    if dropped > 0 {
        info!("{}: dropped {dropped} self-loop/duplicate lines", path.display());
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn duplicate_directed_edge_dropped() {
        let f = write_tmp("0 1\n0 1\n1 0\n");
        let g = load_edge_list(f.path(), true).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.undirected_edge_count(), 1);
    }

    #[test]
    fn self_loop_only_is_empty() {
        let f = write_tmp("5 5\n");
        assert!(matches!(load_edge_list(f.path(), true), Err(Error::EmptyGraph(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_tmp("# header\n0 1\n1 x\n");
        match load_edge_list(f.path(), true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let f = write_tmp("0 1\n7\n");
        assert!(matches!(load_edge_list(f.path(), true), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn reindexes_densely_and_keeps_ids() {
        let f = write_tmp("# comment\n10\t30\n  30   20 \n\n");
        let g = load_edge_list(f.path(), true).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.original_id(0), 10);
        assert_eq!(g.original_id(2), 30);
        assert_eq!(g.index_of(20), Some(1));
        assert_eq!(g.index_of(99), None);
        let arcs: Vec<_> = g.arcs().collect();
        assert_eq!(arcs, vec![(0, 2), (2, 1)]);
        assert_eq!(g.in_neighbors(2).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn undirected_input_stores_both_directions() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2)], false).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.arc_count(), 4);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn stats_two_node_edge() {
        let g = Graph::from_edges(2, &[(0, 1)], true).unwrap();
        let s = g.stats();
        assert_eq!((s.nodes, s.edges, s.max_degree), (2, 1, 1));
        assert_eq!(s.avg_degree, 1.0);
    }

    #[test]
    fn reciprocal_arcs_collapse_for_stats() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (0, 2)], true).unwrap();
        let s = g.stats();
        assert_eq!(s.edges, 3);
        assert_eq!(s.max_degree, 2);
        assert!((s.avg_degree - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_endpoint_rejected() {
        assert!(Graph::from_edges(2, &[(0, 2)], true).is_err());
    }
}
