//! Brute-force one-step oracle for graphs of at most a few nodes.
//!
//! Transition probabilities are written out here from the rules, without
//! calling into the crate's kernel, and multiplied over nodes to give the
//! exact joint distribution of the next state vector.

#![allow(dead_code)]

use hoaxnet::model::ModelParams;
use hoaxnet::{step, AgentClass, ClassAssignment, Network, SimRng, Simulation, State, StateVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub struct Case {
    pub name: &'static str,
    pub net: Network,
    pub classes: Vec<AgentClass>,
    pub states: Vec<State>,
    pub params: ModelParams,
}

impl Case {
    pub fn assignment(&self) -> ClassAssignment {
        ClassAssignment::from_classes(self.classes.clone())
    }
}

fn probs(alpha: f64, beta: f64, pv: (f64, f64), pf: (f64, f64)) -> ModelParams {
    use hoaxnet::ClassProbs;
    ModelParams {
        alpha,
        beta,
        scholar: ClassProbs::new(pv.0, pf.0),
        influencer: ClassProbs::new(pv.1, pf.1),
        ..ModelParams::default()
    }
}

/// 3-node path, one believer in the middle, all normal agents.
pub fn path_center_believer() -> Case {
    use AgentClass::*;
    use State::*;
    Case {
        name: "path3-center-believer",
        net: Network::from_edges(3, [(0, 1), (1, 2)]).unwrap(),
        classes: vec![Normal; 3],
        states: vec![S, B, S],
        params: ModelParams {
            alpha: 0.8,
            beta: 0.5,
            ..ModelParams::default()
        },
    }
}

/// Three small graphs mixing every class.
pub fn mixed_cases() -> Vec<Case> {
    use AgentClass::*;
    use State::*;
    vec![
        Case {
            name: "path3-scholar",
            net: Network::from_edges(3, [(0, 1), (1, 2)]).unwrap(),
            classes: vec![Normal, Scholar, Influencer],
            states: vec![B, S, F],
            params: probs(0.8, 0.5, (0.3, 0.02), (0.2, 0.05)),
        },
        Case {
            name: "triangle-pendant",
            net: Network::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap(),
            classes: vec![BotB, Normal, Influencer, Scholar],
            states: vec![B, S, B, F],
            params: probs(0.3, 0.75, (0.1, 0.05), (0.2, 0.05)),
        },
        Case {
            name: "star-bots",
            net: Network::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap(),
            classes: vec![Influencer, BotF, Scholar, BotB],
            states: vec![S, F, B, B],
            params: probs(1.0, 0.9, (0.2, 0.3), (0.1, 0.1)),
        },
    ]
}

fn node_kernel(case: &Case, v: usize) -> [f64; 3] {
    let p = &case.params;
    let (pv, pf) = match case.classes[v] {
        AgentClass::Normal => (p.normal.verify, p.normal.forget),
        AgentClass::Scholar => (p.scholar.verify, p.scholar.forget),
        AgentClass::Influencer => (p.influencer.verify, p.influencer.forget),
        AgentClass::BotB => return [0.0, 1.0, 0.0],
        AgentClass::BotF => return [0.0, 0.0, 1.0],
    };
    match case.states[v] {
        State::S => {
            let mut nb = 0.0;
            let mut nf = 0.0;
            for &u in case.net.neighbors(v as u32) {
                match case.states[u as usize] {
                    State::B => nb += 1.0,
                    State::F => nf += 1.0,
                    State::S => {}
                }
            }
            let wb = nb * (1.0 + p.alpha);
            let wf = nf * (1.0 - p.alpha);
            if wb + wf == 0.0 {
                return [1.0, 0.0, 0.0];
            }
            let fb = p.beta * wb / (wb + wf);
            let ff = p.beta * wf / (wb + wf);
            [1.0 - fb - ff, fb, ff]
        }
        State::B => [pf, (1.0 - pf) * (1.0 - pv), (1.0 - pf) * pv],
        State::F => [pf, 0.0, 1.0 - pf],
    }
}

/// Outcome index with node 0 as the least significant base-3 digit.
pub fn encode(states: &[State]) -> usize {
    states.iter().rev().fold(0, |acc, s| acc * 3 + s.index())
}

/// Exact probability of every joint outcome, indexed by [`encode`].
pub fn exact_distribution(case: &Case) -> Vec<f64> {
    let n = case.states.len();
    let kernels: Vec<[f64; 3]> = (0..n).map(|v| node_kernel(case, v)).collect();
    (0..3usize.pow(n as u32))
        .map(|mut code| {
            let mut p = 1.0;
            for k in &kernels {
                p *= k[code % 3];
                code /= 3;
            }
            p
        })
        .collect()
}

pub struct GoodnessOfFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Samples landing on an outcome of zero exact probability.
    pub impossible: u64,
}

/// Pearson chi-square of observed outcome counts against `expected`
/// probabilities. Bins with expected count below 5 are pooled.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> GoodnessOfFit {
    let total: u64 = observed.iter().sum();
    let mut impossible = 0;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * total as f64;
        if p == 0.0 {
            impossible += o;
        } else if e < 5.0 {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        if pooled.1 >= 5.0 || bins.is_empty() {
            bins.push(pooled);
        } else {
            let smallest = (0..bins.len())
                .min_by(|&a, &b| bins[a].1.total_cmp(&bins[b].1))
                .unwrap();
            bins[smallest].0 += pooled.0;
            bins[smallest].1 += pooled.1;
        }
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        if statistic == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ChiSquared::new(dof as f64).unwrap().cdf(statistic)
    };
    GoodnessOfFit {
        statistic,
        dof,
        p_value,
        impossible,
    }
}

/// One-step outcome counts from the rescanning [`step`], one generator
/// shared across samples.
pub fn sample_step(case: &Case, samples: usize, seed: u64) -> Vec<u64> {
    let assign = case.assignment();
    let start = StateVector::new(case.states.clone());
    let mut rng = SimRng::new(seed);
    let mut counts = vec![0u64; 3usize.pow(case.states.len() as u32)];
    for _ in 0..samples {
        let next = step(&start, &case.net, &assign, &case.params, &mut rng);
        counts[encode(&next.states)] += 1;
    }
    counts
}

/// One-step outcome counts from the incremental engine, a fresh generator
/// per sample.
pub fn sample_simulation(case: &Case, samples: usize, seed: u64) -> Vec<u64> {
    let assign = case.assignment();
    let mut counts = vec![0u64; 3usize.pow(case.states.len() as u32)];
    for i in 0..samples as u64 {
        let mut sim = Simulation::new(
            &case.net,
            &assign,
            case.params.clone(),
            StateVector::new(case.states.clone()),
            SimRng::new(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        )
        .unwrap();
        sim.advance();
        counts[encode(sim.states())] += 1;
    }
    counts
}
