//! Undirected social network with dense node ids.
//!
//! Edge lists are plain text, one edge per line as two whitespace-separated
//! non-negative integers; blank lines and lines starting with `#` are
//! skipped. This is the layout of SNAP's `facebook_combined.txt`.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use thiserror::Error;

pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two non-negative integers, found {content:?}")]
    Parse { line: usize, content: String },
    #[error("self-loop at line {line}")]
    SelfLoop { line: usize },
    #[error("self-loop on node {0}")]
    SelfLoopEdge(NodeId),
    #[error("node {id} out of range for a graph of {node_count} nodes")]
    NodeOutOfRange { id: NodeId, node_count: usize },
    #[error("fraction {0} outside [0, 1]")]
    BadFraction(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `⌊n · share⌋`, with a small guard against representation error so that
/// e.g. `100 · 0.07` counts 7 and not 6.
pub fn floor_share(n: usize, share: f64) -> usize {
    let exact = n as f64 * share;
    ((exact + 1e-9 * exact.abs().max(1.0)).floor().max(0.0) as usize).min(n)
}

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Neighbor lists are sorted ascending. Node ids are `0..node_count`; the
/// id each node carried in its source file is kept as its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    labels: Vec<u64>,
    edge_count: usize,
    by_degree: Vec<NodeId>,
}

impl Network {
    /// Builds a network over `node_count` nodes labelled `0..node_count`.
    /// Duplicate and reversed edges collapse; self-loops are rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut pairs = Vec::new();
        for (a, b) in edges {
            for id in [a, b] {
                if id as usize >= node_count {
                    return Err(GraphError::NodeOutOfRange { id, node_count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoopEdge(a));
            }
            pairs.push((a.min(b), a.max(b)));
        }
        Ok(Self::assemble((0..node_count as u64).collect(), pairs))
    }

    /// Parses an edge list, remapping ids densely in order of first
    /// appearance.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut dense: HashMap<u64, NodeId> = HashMap::new();
        let mut labels = Vec::new();
        let mut pairs = Vec::new();
        for (index, line) in reader.lines().enumerate() {
            let line = line?;
            let number = index + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let parsed = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => a.parse::<u64>().ok().zip(b.parse::<u64>().ok()),
                _ => None,
            };
            let Some((a, b)) = parsed else {
                return Err(GraphError::Parse {
                    line: number,
                    content: trimmed.to_string(),
                });
            };
            if a == b {
                return Err(GraphError::SelfLoop { line: number });
            }
            let mut intern = |label: u64| {
                *dense.entry(label).or_insert_with(|| {
                    labels.push(label);
                    (labels.len() - 1) as NodeId
                })
            };
            let (u, v) = (intern(a), intern(b));
            pairs.push((u.min(v), u.max(v)));
        }
        Ok(Self::assemble(labels, pairs))
    }

    fn assemble(labels: Vec<u64>, mut pairs: Vec<(NodeId, NodeId)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for &(a, b) in &pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0; 2 * pairs.len()];
        // pairs are sorted, so each list fills in ascending order
        for &(a, b) in &pairs {
            neighbors[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
        }
        for &(a, b) in &pairs {
            neighbors[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let mut by_degree: Vec<NodeId> = (0..n as NodeId).collect();
        by_degree.sort_by(|&x, &y| degree[y as usize].cmp(&degree[x as usize]).then(x.cmp(&y)));
        Network {
            offsets,
            neighbors,
            labels,
            edge_count: pairs.len(),
            by_degree,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        let i = node as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Id of `node` in the source edge list.
    pub fn label(&self, node: NodeId) -> u64 {
        self.labels[node as usize]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Edges as `(smaller, larger)` dense id pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Component index per node (numbered by smallest member) and the
    /// number of components.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.node_count();
        let mut component = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for start in 0..n {
            if component[start] != u32::MAX {
                continue;
            }
            component[start] = count;
            stack.push(start as NodeId);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if component[v as usize] == u32::MAX {
                        component[v as usize] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (component, count as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().1 == 1
    }

    /// Nodes ordered by descending degree, ties by ascending id.
    pub fn degree_ranking(&self) -> &[NodeId] {
        &self.by_degree
    }

    /// The `⌊N · fraction⌋` highest-degree nodes outside `excluded`, in
    /// ranking order. Fewer are returned if the exclusion leaves too few.
    pub fn top_fraction_by_degree(&self, fraction: f64, excluded: &[NodeId]) -> Result<Vec<NodeId>, GraphError> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(GraphError::BadFraction(fraction));
        }
        let wanted = floor_share(self.node_count(), fraction);
        let mut skip = vec![false; self.node_count()];
        for &x in excluded {
            if let Some(flag) = skip.get_mut(x as usize) {
                *flag = true;
            }
        }
        Ok(self
            .by_degree
            .iter()
            .copied()
            .filter(|&x| !skip[x as usize])
            .take(wanted)
            .collect())
    }

    /// Writes the edge list using the original labels.
    ///
    /// Lines are ordered so that re-loading the output assigns every node
    /// the same dense id it has here, whenever this network itself came
    /// from [`Network::load_edge_list`].
    pub fn write_edge_list<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut written = std::collections::HashSet::new();
        let emit = |sink: &mut W, a: NodeId, b: NodeId| writeln!(sink, "{} {}", self.label(a), self.label(b));
        for u in 0..n as NodeId {
            if seen[u as usize] {
                continue;
            }
            let nbrs = self.neighbors(u);
            if let Some(&p) = nbrs.iter().find(|&&p| p < u) {
                emit(&mut sink, p, u)?;
                written.insert((p, u));
                seen[u as usize] = true;
            } else if let Some(&next) = nbrs.iter().find(|&&p| p > u) {
                emit(&mut sink, u, next)?;
                written.insert((u, next));
                seen[u as usize] = true;
                seen[next as usize] = true;
            }
        }
        for (a, b) in self.edges() {
            if !written.contains(&(a, b)) {
                emit(&mut sink, a, b)?;
            }
        }
        Ok(())
    }
}
