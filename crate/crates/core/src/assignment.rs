//! Agent classes and initial states.
//!
//! Influencers are the top 1% of nodes by degree. The next 10% by degree
//! form the pool from which believer and fact-checker bots are drawn.
//! Scholars are the remaining members of one chosen community. When roles
//! overlap, bot beats influencer beats scholar beats normal.

use std::fmt;

use thiserror::Error;

use crate::communities::{CommunityId, Partition};
use crate::graph::{floor_share, Network, NodeId};
use crate::rng::{SimRng, Stream};

pub const INFLUENCER_FRACTION: f64 = 0.01;
pub const BOT_POOL_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentClass {
    Normal,
    Scholar,
    Influencer,
    /// Permanently a believer.
    BotB,
    /// Permanently a fact-checker.
    BotF,
}

impl AgentClass {
    pub const ALL: [AgentClass; 5] = [
        AgentClass::Normal,
        AgentClass::Scholar,
        AgentClass::Influencer,
        AgentClass::BotB,
        AgentClass::BotF,
    ];

    pub fn is_bot(self) -> bool {
        matches!(self, AgentClass::BotB | AgentClass::BotF)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AgentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentClass::Normal => "normal",
            AgentClass::Scholar => "scholar",
            AgentClass::Influencer => "influencer",
            AgentClass::BotB => "believer-bot",
            AgentClass::BotF => "fact-checker-bot",
        })
    }
}

/// Susceptible, believer, fact-checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum State {
    S,
    B,
    F,
}

impl State {
    pub const ALL: [State; 3] = [State::S, State::B, State::F];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("bot demand of {demand} nodes exceeds the pool of {pool} candidates")]
    BotDemand { demand: usize, pool: usize },
    #[error("scholar community {id} does not exist (partition has {k} communities)")]
    UnknownCommunity { id: CommunityId, k: usize },
    #[error("{name} = {value} is not a percentage in [0, 100]")]
    BadPercentage { name: &'static str, value: f64 },
    #[error("partition covers {partition} nodes but the network has {network}")]
    SizeMismatch { partition: usize, network: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAssignment {
    class_of: Vec<AgentClass>,
    scholar_community: Option<CommunityId>,
    influencers: Vec<NodeId>,
    bot_pool: Vec<NodeId>,
    believer_bots: Vec<NodeId>,
    fact_checker_bots: Vec<NodeId>,
}

impl ClassAssignment {
    /// Explicit per-node classes, bypassing the degree-based selection.
    /// The bot pool is taken to be exactly the bots.
    pub fn from_classes(class_of: Vec<AgentClass>) -> Self {
        let with = |wanted: AgentClass| -> Vec<NodeId> {
            (0..class_of.len() as NodeId)
                .filter(|&v| class_of[v as usize] == wanted)
                .collect()
        };
        let influencers = with(AgentClass::Influencer);
        let believer_bots = with(AgentClass::BotB);
        let fact_checker_bots = with(AgentClass::BotF);
        let bot_pool = (0..class_of.len() as NodeId)
            .filter(|&v| class_of[v as usize].is_bot())
            .collect();
        ClassAssignment {
            class_of,
            scholar_community: None,
            influencers,
            bot_pool,
            believer_bots,
            fact_checker_bots,
        }
    }

    pub fn class_of(&self, node: NodeId) -> AgentClass {
        self.class_of[node as usize]
    }

    pub fn classes(&self) -> &[AgentClass] {
        &self.class_of
    }

    pub fn node_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn scholar_community(&self) -> Option<CommunityId> {
        self.scholar_community
    }

    /// In degree-ranking order.
    pub fn influencers(&self) -> &[NodeId] {
        &self.influencers
    }

    /// In degree-ranking order.
    pub fn bot_pool(&self) -> &[NodeId] {
        &self.bot_pool
    }

    /// Ascending.
    pub fn believer_bots(&self) -> &[NodeId] {
        &self.believer_bots
    }

    /// Ascending.
    pub fn fact_checker_bots(&self) -> &[NodeId] {
        &self.fact_checker_bots
    }

    pub fn count(&self, class: AgentClass) -> usize {
        self.class_of.iter().filter(|&&c| c == class).count()
    }
}

fn check_pct(name: &'static str, value: f64) -> Result<(), AssignmentError> {
    if (0.0..=100.0).contains(&value) {
        Ok(())
    } else {
        Err(AssignmentError::BadPercentage { name, value })
    }
}

/// Assigns classes. Bot percentages are of the whole network; the
/// believer bots are drawn first, then the fact-checker bots from what is
/// left of the pool.
pub fn assign_classes(
    net: &Network,
    part: &Partition,
    scholar_community: Option<CommunityId>,
    pct_b_bot: f64,
    pct_f_bot: f64,
    seed: u64,
) -> Result<ClassAssignment, AssignmentError> {
    check_pct("pct_b_bot", pct_b_bot)?;
    check_pct("pct_f_bot", pct_f_bot)?;
    let n = net.node_count();
    if part.node_count() != n {
        return Err(AssignmentError::SizeMismatch {
            partition: part.node_count(),
            network: n,
        });
    }
    if let Some(id) = scholar_community {
        if id as usize >= part.k() {
            return Err(AssignmentError::UnknownCommunity { id, k: part.k() });
        }
    }

    // both fractions are in range, so these cannot fail
    let influencers = net.top_fraction_by_degree(INFLUENCER_FRACTION, &[]).unwrap_or_default();
    let bot_pool = net
        .top_fraction_by_degree(BOT_POOL_FRACTION, &influencers)
        .unwrap_or_default();

    let demand = floor_share(n, (pct_b_bot + pct_f_bot) / 100.0);
    if demand > bot_pool.len() {
        return Err(AssignmentError::BotDemand {
            demand,
            pool: bot_pool.len(),
        });
    }
    let n_b = floor_share(n, pct_b_bot / 100.0);
    let n_f = floor_share(n, pct_f_bot / 100.0);

    let mut candidates = bot_pool.clone();
    candidates.sort_unstable();
    let mut rng = SimRng::stream(seed, Stream::Assignment);
    rng.partial_shuffle(&mut candidates, n_b + n_f);
    let mut believer_bots = candidates[..n_b].to_vec();
    let mut fact_checker_bots = candidates[n_b..n_b + n_f].to_vec();
    believer_bots.sort_unstable();
    fact_checker_bots.sort_unstable();

    let mut class_of = vec![AgentClass::Normal; n];
    if let Some(id) = scholar_community {
        for (slot, &c) in class_of.iter_mut().zip(part.assignments()) {
            if c == id {
                *slot = AgentClass::Scholar;
            }
        }
    }
    for &x in &influencers {
        class_of[x as usize] = AgentClass::Influencer;
    }
    for &x in &believer_bots {
        class_of[x as usize] = AgentClass::BotB;
    }
    for &x in &fact_checker_bots {
        class_of[x as usize] = AgentClass::BotF;
    }

    Ok(ClassAssignment {
        class_of,
        scholar_community,
        influencers,
        bot_pool,
        believer_bots,
        fact_checker_bots,
    })
}

/// Node states at one tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    pub states: Vec<State>,
    pub tick: u32,
}

impl StateVector {
    pub fn new(states: Vec<State>) -> Self {
        StateVector { states, tick: 0 }
    }

    pub fn state_of(&self, node: NodeId) -> State {
        self.states[node as usize]
    }

    /// Counts of S, B, F.
    pub fn counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for s in &self.states {
            counts[s.index()] += 1;
        }
        counts
    }
}

/// Bots take their fixed state; `⌊N · pct / 100⌋` other nodes, drawn
/// uniformly from the non-bots, start as believers; the rest are
/// susceptible.
pub fn initialize_states(assign: &ClassAssignment, pct_initial_believers: f64, seed: u64) -> StateVector {
    let n = assign.node_count();
    let mut states = vec![State::S; n];
    let mut ordinary = Vec::with_capacity(n);
    for (i, class) in assign.classes().iter().enumerate() {
        match class {
            AgentClass::BotB => states[i] = State::B,
            AgentClass::BotF => states[i] = State::F,
            _ => ordinary.push(i as NodeId),
        }
    }
    let wanted = floor_share(n, pct_initial_believers.clamp(0.0, 100.0) / 100.0).min(ordinary.len());
    let mut rng = SimRng::stream(seed, Stream::InitialStates);
    rng.partial_shuffle(&mut ordinary, wanted);
    for &x in &ordinary[..wanted] {
        states[x as usize] = State::B;
    }
    StateVector::new(states)
}
