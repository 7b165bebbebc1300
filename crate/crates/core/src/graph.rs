//! Labeled multi-digraphs and the shared edge-list text format.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A digraph on `[n]` with an ordered list of labeled edges; loops and
/// repeated ordered pairs are allowed. Edge r is `edges[r] = (tail, head)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMultiDigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl LabeledMultiDigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(t, h) in &edges {
            if t >= n || h >= n {
                return Err(Error::Domain(format!(
                    "edge ({t}, {h}) out of range for {n} vertices"
                )));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(_, h) in &self.edges {
            deg[h] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(t, _) in &self.edges {
            deg[t] += 1;
        }
        deg
    }

    /// Adjacency by outgoing edges; multiplicities preserved.
    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(t, h) in &self.edges {
            adj[t].push(h);
        }
        adj
    }

    /// Adjacency by incoming edges; multiplicities preserved.
    pub fn in_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(t, h) in &self.edges {
            adj[h].push(t);
        }
        adj
    }

    /// True iff there is no loop and no repeated ordered pair.
    pub fn is_simple(&self) -> bool {
        let mut keys: Vec<u64> = Vec::with_capacity(self.edges.len());
        for &(t, h) in &self.edges {
            if t == h {
                return false;
            }
            keys.push(t as u64 * self.n as u64 + h as u64);
        }
        keys.sort_unstable();
        keys.windows(2).all(|w| w[0] != w[1])
    }

    /// True iff every in-degree is >= k1 and every out-degree is >= k2.
    pub fn is_dicore(&self, k1: usize, k2: usize) -> bool {
        self.in_degrees().iter().all(|&d| d >= k1) && self.out_degrees().iter().all(|&d| d >= k2)
    }

    /// Subgraph induced by `keep` (which must be sorted and duplicate-free),
    /// relabeled to `0..keep.len()`; the returned map sends new ids to old.
    pub fn induced_subgraph(&self, keep: &[usize]) -> (Self, Vec<usize>) {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let mut new_id = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            new_id[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(t, h)| new_id[t] != usize::MAX && new_id[h] != usize::MAX)
            .map(|&(t, h)| (new_id[t], new_id[h]))
            .collect();
        (
            Self {
                n: keep.len(),
                edges,
            },
            keep.to_vec(),
        )
    }

    /// Writes the shared edge-list format: a `dicore N M k1 k2` header, then
    /// one `tail head` pair per line with 0-based vertex ids.
    pub fn write_edge_list(&self, mut w: impl Write, k1: usize, k2: usize) -> Result<()> {
        writeln!(w, "dicore {} {} {} {}", self.n, self.edges.len(), k1, k2)?;
        for &(t, h) in &self.edges {
            writeln!(w, "{t} {h}")?;
        }
        Ok(())
    }

    /// Reads the edge-list format; returns the graph and the (k1, k2) pair
    /// recorded in the header.
    pub fn read_edge_list(r: impl BufRead) -> Result<(Self, usize, usize)> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge-list input".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "dicore" {
            return Err(Error::Parse(format!(
                "bad header {header:?}, expected `dicore N M k1 k2`"
            )));
        }
        let parse = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad {what} field {s:?}")))
        };
        let n = parse(fields[1], "N")?;
        let m = parse(fields[2], "M")?;
        let k1 = parse(fields[3], "k1")?;
        let k2 = parse(fields[4], "k2")?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let t = parse(it.next().unwrap_or(""), "tail")?;
            let h = parse(
                it.next()
                    .ok_or_else(|| Error::Parse(format!("missing head in line {line:?}")))?,
                "head",
            )?;
            if it.next().is_some() {
                return Err(Error::Parse(format!("trailing fields in line {line:?}")));
            }
            edges.push((t, h));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header promises {m} edges, file has {}",
                edges.len()
            )));
        }
        Self::new(n, edges).map(|g| (g, k1, k2))
    }
}

/// Degrees of one side of an admissible sequence: every entry is at least
/// `cutoff` and the entries sum to the edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    cutoff: usize,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>, cutoff: usize) -> Result<Self> {
        if let Some(&d) = degrees.iter().find(|&&d| d < cutoff) {
            return Err(Error::Domain(format!(
                "degree {d} below the cutoff {cutoff}"
            )));
        }
        Ok(Self { degrees, cutoff })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Total degree (the edge count of the side).
    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_ids() {
        assert!(LabeledMultiDigraph::new(2, vec![(0, 1), (1, 0)]).is_ok());
        assert!(LabeledMultiDigraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn degrees_and_simplicity() {
        let g = LabeledMultiDigraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.in_degrees(), vec![1, 1, 1]);
        assert_eq!(g.out_degrees(), vec![1, 1, 1]);
        assert!(g.is_simple());
        assert!(g.is_dicore(1, 1));
        assert!(!g.is_dicore(2, 1));

        let loops = LabeledMultiDigraph::new(2, vec![(0, 0), (1, 1)]).unwrap();
        assert!(!loops.is_simple());
        let multi = LabeledMultiDigraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        assert!(!multi.is_simple());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = LabeledMultiDigraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf, 2, 1).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("dicore 4 5 2 1\n"));
        let (back, k1, k2) = LabeledMultiDigraph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(back, g);
        assert_eq!((k1, k2), (2, 1));
    }

    #[test]
    fn edge_list_rejects_malformed() {
        assert!(LabeledMultiDigraph::read_edge_list(&b""[..]).is_err());
        assert!(LabeledMultiDigraph::read_edge_list(&b"dicore 2 1 1\n0 1\n"[..]).is_err());
        assert!(LabeledMultiDigraph::read_edge_list(&b"dicore 2 2 1 1\n0 1\n"[..]).is_err());
        assert!(LabeledMultiDigraph::read_edge_list(&b"dicore 2 1 1 1\n0 5\n"[..]).is_err());
        assert!(LabeledMultiDigraph::read_edge_list(&b"dicore 2 1 1 1\n0 1 9\n"[..]).is_err());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = LabeledMultiDigraph::new(5, vec![(0, 1), (1, 4), (4, 0), (2, 3), (3, 2), (1, 2)])
            .unwrap();
        let (sub, map) = g.induced_subgraph(&[0, 1, 4]);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edges(), &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(map, vec![0, 1, 4]);
    }

    #[test]
    fn degree_sequence_invariants() {
        let d = DegreeSequence::new(vec![2, 3, 2], 2).unwrap();
        assert_eq!(d.total(), 7);
        assert_eq!(d.cutoff(), 2);
        assert!(DegreeSequence::new(vec![2, 1], 2).is_err());
    }
}
