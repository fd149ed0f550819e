//! Believer/fact-checker dynamics with class-specific probabilities.
//!
//! Updates are synchronous: every transition at tick `t + 1` is decided
//! from the tick-`t` configuration. Random numbers are consumed in
//! ascending node order with a fixed schedule per node:
//!
//! * bots consume nothing and never change;
//! * a susceptible node with no believer or fact-checker neighbors consumes
//!   nothing and stays susceptible; otherwise one uniform `u` sends it to B
//!   when `u < f_B`, to F when `u < f_B + f_F`, else it stays S;
//! * a believer draws once to forget (→ S with `p_forget`); if it did not
//!   forget it draws again to verify (→ F with `p_verify`);
//! * a fact-checker draws once to forget.
//!
//! Neighbor counts include bots.

use std::io::Write;

use thiserror::Error;

use crate::assignment::{initialize_states, AgentClass, ClassAssignment, State, StateVector};
use crate::graph::{Network, NodeId};
use crate::rng::{SimRng, Stream};

/// Per-class verify and forget probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassProbs {
    pub verify: f64,
    pub forget: f64,
}

impl ClassProbs {
    pub const fn new(verify: f64, forget: f64) -> Self {
        ClassProbs { verify, forget }
    }
}

/// Probabilities of the majority class.
pub const NORMAL_PROBS: ClassProbs = ClassProbs::new(0.05, 0.1);

/// One week of hourly ticks.
pub const DEFAULT_TICKS: u32 = 168;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("class assignment covers {assignment} nodes but the network has {network}")]
    SizeMismatch { assignment: usize, network: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Hoax credibility.
    pub alpha: f64,
    /// Spreading rate.
    pub beta: f64,
    pub normal: ClassProbs,
    pub scholar: ClassProbs,
    pub influencer: ClassProbs,
    pub ticks: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            alpha: 0.8,
            beta: 0.5,
            normal: NORMAL_PROBS,
            scholar: NORMAL_PROBS,
            influencer: NORMAL_PROBS,
            ticks: DEFAULT_TICKS,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("pv_normal", self.normal.verify),
            ("pf_normal", self.normal.forget),
            ("pv_scholar", self.scholar.verify),
            ("pf_scholar", self.scholar.forget),
            ("pv_influencer", self.influencer.verify),
            ("pf_influencer", self.influencer.forget),
        ];
        for (name, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::OutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// `None` for bots.
    pub fn probs(&self, class: AgentClass) -> Option<ClassProbs> {
        match class {
            AgentClass::Normal => Some(self.normal),
            AgentClass::Scholar => Some(self.scholar),
            AgentClass::Influencer => Some(self.influencer),
            AgentClass::BotB | AgentClass::BotF => None,
        }
    }
}

/// Probabilities `(f_B, f_F)` that a susceptible node with `believers`
/// believing and `checkers` fact-checking neighbors becomes a believer or
/// a fact-checker. No weighted pressure means `(0, 0)`.
#[inline]
pub fn spreading_rates(alpha: f64, beta: f64, believers: u32, checkers: u32) -> (f64, f64) {
    let pull_b = f64::from(believers) * (1.0 + alpha);
    let pull_f = f64::from(checkers) * (1.0 - alpha);
    let total = pull_b + pull_f;
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    (beta * pull_b / total, beta * pull_f / total)
}

#[inline]
fn transition(
    state: State,
    probs: ClassProbs,
    believers: u32,
    checkers: u32,
    alpha: f64,
    beta: f64,
    rng: &mut SimRng,
) -> State {
    match state {
        State::S => {
            if believers == 0 && checkers == 0 {
                return State::S;
            }
            let (to_b, to_f) = spreading_rates(alpha, beta, believers, checkers);
            let u = rng.next_f64();
            if u < to_b {
                State::B
            } else if u < to_b + to_f {
                State::F
            } else {
                State::S
            }
        }
        State::B => {
            if rng.next_f64() < probs.forget {
                State::S
            } else if rng.next_f64() < probs.verify {
                State::F
            } else {
                State::B
            }
        }
        State::F => {
            if rng.next_f64() < probs.forget {
                State::S
            } else {
                State::F
            }
        }
    }
}

/// One synchronous update computed by rescanning every neighborhood.
pub fn step(
    states: &StateVector,
    net: &Network,
    assign: &ClassAssignment,
    params: &ModelParams,
    rng: &mut SimRng,
) -> StateVector {
    let mut next = states.states.clone();
    for v in 0..net.node_count() as NodeId {
        let Some(probs) = params.probs(assign.class_of(v)) else {
            continue;
        };
        let (mut believers, mut checkers) = (0u32, 0u32);
        for &u in net.neighbors(v) {
            match states.state_of(u) {
                State::B => believers += 1,
                State::F => checkers += 1,
                State::S => {}
            }
        }
        next[v as usize] = transition(
            states.state_of(v),
            probs,
            believers,
            checkers,
            params.alpha,
            params.beta,
            rng,
        );
    }
    StateVector {
        states: next,
        tick: states.tick + 1,
    }
}

/// S/B/F counts at one tick, overall and per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TickCounts {
    pub overall: [u32; 3],
    /// Indexed by [`AgentClass::index`], then [`State::index`].
    pub by_class: [[u32; 3]; 5],
}

impl TickCounts {
    fn tally(states: &[State], classes: &[AgentClass]) -> Self {
        let mut counts = TickCounts::default();
        for (s, c) in states.iter().zip(classes) {
            counts.add(*c, *s, 1);
        }
        counts
    }

    #[inline]
    fn add(&mut self, class: AgentClass, state: State, delta: i32) {
        let o = &mut self.overall[state.index()];
        *o = o.wrapping_add_signed(delta);
        let c = &mut self.by_class[class.index()][state.index()];
        *c = c.wrapping_add_signed(delta);
    }

    pub fn get(&self, state: State) -> u32 {
        self.overall[state.index()]
    }

    pub fn class(&self, class: AgentClass, state: State) -> u32 {
        self.by_class[class.index()][state.index()]
    }

    pub fn total(&self) -> u32 {
        self.overall.iter().sum()
    }
}

/// Stateful engine that keeps per-node believer and fact-checker neighbor
/// counts up to date from the nodes that changed, instead of rescanning
/// every neighborhood each tick. Produces exactly the same sequence of
/// states as repeated [`step`] calls with the same generator.
pub struct Simulation<'a> {
    net: &'a Network,
    classes: &'a [AgentClass],
    params: ModelParams,
    states: Vec<State>,
    believer_nbrs: Vec<u32>,
    checker_nbrs: Vec<u32>,
    counts: TickCounts,
    changes: Vec<(NodeId, State)>,
    tick: u32,
    rng: SimRng,
}

impl<'a> Simulation<'a> {
    pub fn new(
        net: &'a Network,
        assign: &'a ClassAssignment,
        params: ModelParams,
        initial: StateVector,
        rng: SimRng,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        if assign.node_count() != net.node_count() || initial.states.len() != net.node_count() {
            return Err(ModelError::SizeMismatch {
                assignment: assign.node_count(),
                network: net.node_count(),
            });
        }
        let n = net.node_count();
        let mut believer_nbrs = vec![0u32; n];
        let mut checker_nbrs = vec![0u32; n];
        for v in 0..n as NodeId {
            for &u in net.neighbors(v) {
                match initial.states[u as usize] {
                    State::B => believer_nbrs[v as usize] += 1,
                    State::F => checker_nbrs[v as usize] += 1,
                    State::S => {}
                }
            }
        }
        let counts = TickCounts::tally(&initial.states, assign.classes());
        Ok(Simulation {
            net,
            classes: assign.classes(),
            params,
            states: initial.states,
            believer_nbrs,
            checker_nbrs,
            counts,
            changes: Vec::new(),
            tick: initial.tick,
            rng,
        })
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn counts(&self) -> TickCounts {
        self.counts
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn snapshot(&self) -> StateVector {
        StateVector {
            states: self.states.clone(),
            tick: self.tick,
        }
    }

    /// Advances one tick.
    pub fn advance(&mut self) {
        let table = [self.params.normal, self.params.scholar, self.params.influencer];
        let (alpha, beta) = (self.params.alpha, self.params.beta);
        self.changes.clear();
        for (v, (&state, &class)) in self.states.iter().zip(self.classes).enumerate() {
            if class.is_bot() {
                continue;
            }
            let next = transition(
                state,
                table[class.index()],
                self.believer_nbrs[v],
                self.checker_nbrs[v],
                alpha,
                beta,
                &mut self.rng,
            );
            if next != state {
                self.changes.push((v as NodeId, next));
            }
        }
        for &(v, next) in &self.changes {
            let prev = std::mem::replace(&mut self.states[v as usize], next);
            self.counts.add(self.classes[v as usize], prev, -1);
            self.counts.add(self.classes[v as usize], next, 1);
            for &u in self.net.neighbors(v) {
                let u = u as usize;
                match prev {
                    State::B => self.believer_nbrs[u] -= 1,
                    State::F => self.checker_nbrs[u] -= 1,
                    State::S => {}
                }
                match next {
                    State::B => self.believer_nbrs[u] += 1,
                    State::F => self.checker_nbrs[u] += 1,
                    State::S => {}
                }
            }
        }
        self.tick += 1;
    }
}

/// Counts for ticks `0..=ticks` of one run, plus what produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub params: ModelParams,
    pub pct_initial_believers: f64,
    pub counts: Vec<TickCounts>,
}

impl Trajectory {
    pub fn initial(&self) -> &TickCounts {
        &self.counts[0]
    }

    pub fn last(&self) -> &TickCounts {
        self.counts.last().expect("trajectory always holds tick 0")
    }
}

/// Seeds the initial believers, then applies `params.ticks` updates.
/// Initial states and dynamics use separate streams of `seed`.
pub fn run(
    net: &Network,
    assign: &ClassAssignment,
    params: &ModelParams,
    pct_initial_believers: f64,
    seed: u64,
) -> Result<Trajectory, ModelError> {
    if !(0.0..=100.0).contains(&pct_initial_believers) {
        return Err(ModelError::OutOfRange {
            name: "pct_initial_believers / 100",
            value: pct_initial_believers / 100.0,
        });
    }
    let initial = initialize_states(assign, pct_initial_believers, seed);
    let mut sim = Simulation::new(
        net,
        assign,
        params.clone(),
        initial,
        SimRng::stream(seed, Stream::Dynamics),
    )?;
    let mut counts = Vec::with_capacity(params.ticks as usize + 1);
    counts.push(sim.counts());
    for _ in 0..params.ticks {
        sim.advance();
        counts.push(sim.counts());
    }
    Ok(Trajectory {
        seed,
        params: params.clone(),
        pct_initial_believers,
        counts,
    })
}

pub const TRAJECTORY_HEADER: &str = "setting_id,replicate,tick,S,B,F,S_normal,B_normal,F_normal,S_scholar,B_scholar,F_scholar,S_influencer,B_influencer,F_influencer,B_bot,F_bot";

/// Writes one row per tick under [`TRAJECTORY_HEADER`].
pub fn write_trajectory<W: Write>(
    trajectory: &Trajectory,
    setting_id: u64,
    replicate: u32,
    mut sink: W,
) -> std::io::Result<()> {
    writeln!(sink, "{TRAJECTORY_HEADER}")?;
    write_trajectory_rows(trajectory, setting_id, replicate, &mut sink)?;
    sink.flush()
}

/// As [`write_trajectory`] without the header, for files holding many runs.
pub fn write_trajectory_rows<W: Write>(
    trajectory: &Trajectory,
    setting_id: u64,
    replicate: u32,
    sink: &mut W,
) -> std::io::Result<()> {
    for (tick, c) in trajectory.counts.iter().enumerate() {
        write!(sink, "{setting_id},{replicate},{tick}")?;
        for v in c.overall {
            write!(sink, ",{v}")?;
        }
        for class in [AgentClass::Normal, AgentClass::Scholar, AgentClass::Influencer] {
            for v in c.by_class[class.index()] {
                write!(sink, ",{v}")?;
            }
        }
        writeln!(
            sink,
            ",{},{}",
            c.class(AgentClass::BotB, State::B),
            c.class(AgentClass::BotF, State::F)
        )?;
    }
    Ok(())
}
