//! Fixed community structure: asynchronous fluid communities and the
//! partition file format.
//!
//! Partition files are comma-separated text with the header
//! `node_id,community_id` followed by one row per node in ascending dense
//! id order.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::graph::{Network, NodeId};
use crate::rng::{SimRng, Stream};

pub type CommunityId = u32;

pub const PARTITION_HEADER: &str = "node_id,community_id";

/// Sweep bound used when the caller has no preference.
pub const DEFAULT_MAX_SWEEPS: usize = 100;

const UNASSIGNED: CommunityId = CommunityId::MAX;

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error("graph is disconnected ({count} components): node {first} and node {second} are in different components")]
    Disconnected { count: usize, first: u64, second: u64 },
    #[error("cannot form {k} communities from {node_count} nodes")]
    TooManyCommunities { k: usize, node_count: usize },
    #[error("community count must be at least 1")]
    ZeroCommunities,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown node id {id} (graph has {node_count} nodes)")]
    UnknownNode { line: usize, id: u64, node_count: usize },
    #[error("line {line}: node {id} assigned twice")]
    DuplicateNode { line: usize, id: u64 },
    #[error("node {0} unassigned")]
    Unassigned(NodeId),
    #[error("community {0} is empty")]
    EmptyCommunity(CommunityId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Assignment of every node to one of `k` non-empty communities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    community_of: Vec<CommunityId>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Validates a node-to-community map. `k` is one past the largest id;
    /// every id below it must be used.
    pub fn new(community_of: Vec<CommunityId>) -> Result<Self, CommunityError> {
        if let Some(node) = community_of.iter().position(|&c| c == UNASSIGNED) {
            return Err(CommunityError::Unassigned(node as NodeId));
        }
        let k = community_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0usize; k];
        for &c in &community_of {
            sizes[c as usize] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(CommunityError::EmptyCommunity(empty as CommunityId));
        }
        Ok(Partition { community_of, sizes })
    }

    /// Everything in community 0.
    pub fn trivial(node_count: usize) -> Self {
        Partition {
            community_of: vec![0; node_count],
            sizes: if node_count > 0 { vec![node_count] } else { Vec::new() },
        }
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn node_count(&self) -> usize {
        self.community_of.len()
    }

    pub fn community_of(&self, node: NodeId) -> CommunityId {
        self.community_of[node as usize]
    }

    pub fn assignments(&self) -> &[CommunityId] {
        &self.community_of
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn members(&self, community: CommunityId) -> Vec<NodeId> {
        self.community_of
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == community)
            .map(|(i, _)| i as NodeId)
            .collect()
    }

    /// Fraction of all nodes that belong to `community`.
    pub fn share(&self, community: CommunityId) -> f64 {
        self.sizes[community as usize] as f64 / self.node_count() as f64
    }

    /// Community whose share of the network is closest to `target`
    /// (a fraction in `[0, 1]`); ties go to the lower id.
    pub fn closest_to_share(&self, target: f64) -> Option<CommunityId> {
        (0..self.k() as CommunityId).min_by(|&a, &b| {
            let da = (self.share(a) - target).abs();
            let db = (self.share(b) - target).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        })
    }

    /// Relabels communities by ascending smallest member.
    fn canonicalize(mut self) -> Self {
        let mut relabel = vec![UNASSIGNED; self.k()];
        let mut next = 0;
        for &c in &self.community_of {
            if relabel[c as usize] == UNASSIGNED {
                relabel[c as usize] = next;
                next += 1;
            }
        }
        let mut sizes = vec![0; self.k()];
        for c in self.community_of.iter_mut() {
            *c = relabel[*c as usize];
            sizes[*c as usize] += 1;
        }
        self.sizes = sizes;
        self
    }
}

/// Result of [`fluid_communities`].
#[derive(Debug, Clone)]
pub struct FluidOutcome {
    pub partition: Partition,
    /// `false` when the sweep bound was hit before a change-free sweep.
    pub converged: bool,
    pub sweeps: usize,
}

/// Asynchronous fluid communities.
///
/// `k` founders are drawn without replacement, each starting a community
/// of density 1. Each sweep visits all vertices in a fresh random order
/// and moves the vertex to the community with the largest summed density
/// over the vertex and its neighbors, where a community's density is the
/// reciprocal of its size. The current community wins ties; other ties are
/// broken uniformly. A vertex never leaves a community of which it is the
/// last member. Stops after a sweep with no change, or after `max_sweeps`
/// sweeps (sweeping continues past the bound only while some vertex has
/// not yet been reached).
pub fn fluid_communities(
    net: &Network,
    k: usize,
    seed: u64,
    max_sweeps: usize,
) -> Result<FluidOutcome, CommunityError> {
    let n = net.node_count();
    if k == 0 {
        return Err(CommunityError::ZeroCommunities);
    }
    if k > n {
        return Err(CommunityError::TooManyCommunities { k, node_count: n });
    }
    let (component, count) = net.components();
    if count > 1 {
        let other = component.iter().position(|&c| c != 0).unwrap();
        return Err(CommunityError::Disconnected {
            count,
            first: net.label(0),
            second: net.label(other as NodeId),
        });
    }
    if k == 1 {
        return Ok(FluidOutcome {
            partition: Partition::trivial(n),
            converged: true,
            sweeps: 1,
        });
    }

    let mut rng = SimRng::stream(seed, Stream::Clustering);
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    rng.partial_shuffle(&mut order, k);

    let mut community = vec![UNASSIGNED; n];
    let mut size = vec![0u64; k];
    let mut unassigned = n;
    for (c, &founder) in order[..k].iter().enumerate() {
        community[founder as usize] = c as CommunityId;
        size[c] = 1;
        unassigned -= 1;
    }

    // members of each community seen around the current vertex
    let mut hits = vec![0u64; k];
    let mut touched: Vec<CommunityId> = Vec::with_capacity(k);
    let mut best: Vec<CommunityId> = Vec::with_capacity(k);

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps || unassigned > 0 {
        sweeps += 1;
        let mut changed = false;
        for (i, slot) in order.iter_mut().enumerate() {
            *slot = i as NodeId;
        }
        rng.shuffle(&mut order);

        for &v in &order {
            let current = community[v as usize];
            for &u in std::iter::once(&v).chain(net.neighbors(v)) {
                let c = community[u as usize];
                if c != UNASSIGNED {
                    if hits[c as usize] == 0 {
                        touched.push(c);
                    }
                    hits[c as usize] += 1;
                }
            }
            if touched.is_empty() {
                continue;
            }
            touched.sort_unstable();
            best.clear();
            // density sums compared exactly as hits/size fractions
            for &c in &touched {
                match best.first() {
                    None => best.push(c),
                    Some(&b) => {
                        let lhs = hits[c as usize] * size[b as usize];
                        let rhs = hits[b as usize] * size[c as usize];
                        if lhs > rhs {
                            best.clear();
                            best.push(c);
                        } else if lhs == rhs {
                            best.push(c);
                        }
                    }
                }
            }
            for &c in &touched {
                hits[c as usize] = 0;
            }
            touched.clear();

            if best.contains(&current) {
                continue;
            }
            if current != UNASSIGNED && size[current as usize] == 1 {
                continue;
            }
            let chosen = if best.len() == 1 {
                best[0]
            } else {
                best[rng.below(best.len() as u64) as usize]
            };
            if current == UNASSIGNED {
                unassigned -= 1;
            } else {
                size[current as usize] -= 1;
            }
            size[chosen as usize] += 1;
            community[v as usize] = chosen;
            changed = true;
        }
        if !changed && unassigned == 0 {
            converged = true;
            break;
        }
    }

    let partition = Partition::new(community)?.canonicalize();
    Ok(FluidOutcome {
        partition,
        converged,
        sweeps,
    })
}

pub fn save_partition<W: Write>(partition: &Partition, mut sink: W) -> std::io::Result<()> {
    writeln!(sink, "{PARTITION_HEADER}")?;
    for (node, c) in partition.assignments().iter().enumerate() {
        writeln!(sink, "{node},{c}")?;
    }
    sink.flush()
}

/// Reads a partition for a graph of `node_count` nodes and checks every
/// partition invariant.
pub fn load_partition<R: BufRead>(source: R, node_count: usize) -> Result<Partition, CommunityError> {
    let mut community = vec![UNASSIGNED; node_count];
    let mut lines = source.lines().enumerate();
    let header = lines.next().map(|(_, line)| line).transpose()?;
    match header {
        Some(line) if line.trim() == PARTITION_HEADER => {}
        _ => {
            return Err(CommunityError::Malformed {
                line: 1,
                message: format!("expected header `{PARTITION_HEADER}`"),
            })
        }
    }
    for (index, line) in lines {
        let line = line?;
        let number = index + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let malformed = || CommunityError::Malformed {
            line: number,
            message: format!("expected `node_id,community_id`, found {trimmed:?}"),
        };
        let (node, c) = trimmed.split_once(',').ok_or_else(malformed)?;
        let node: u64 = node.trim().parse().map_err(|_| malformed())?;
        let c: CommunityId = c.trim().parse().map_err(|_| malformed())?;
        if c == UNASSIGNED {
            return Err(malformed());
        }
        let slot = community
            .get_mut(node as usize)
            .filter(|_| node < node_count as u64)
            .ok_or(CommunityError::UnknownNode {
                line: number,
                id: node,
                node_count,
            })?;
        if *slot != UNASSIGNED {
            return Err(CommunityError::DuplicateNode { line: number, id: node });
        }
        *slot = c;
    }
    Partition::new(community)
}
