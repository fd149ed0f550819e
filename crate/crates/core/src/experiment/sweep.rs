//! Seeded replicate runs over a grid and the results file.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::assign_classes;
use crate::communities::{CommunityId, Partition};
use crate::graph::Network;
use crate::model::{run, Trajectory};

use super::grid::{community_label, derive_seed, ResolvedSetting, SweepSpec};
use super::ExperimentError;

pub const RESULTS_HEADER: &str = "setting_id,replicate,seed,alpha,beta,pct_initial_believers,scholar_community,pv_scholar,pf_scholar,pv_influencer,pf_influencer,pct_b_bot,pct_f_bot,final_S,final_B,final_F";

/// Final counts of one `(setting, replicate)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub setting_id: usize,
    pub replicate: u32,
    pub seed: u64,
    pub setting: ResolvedSetting,
    /// S, B, F at the last tick.
    pub finals: [u32; 3],
    /// Kept only when requested.
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 picks one per available core.
    pub jobs: usize,
    /// Keep every run's full trajectory, not just the final counts.
    pub keep_series: bool,
}

/// One run: fresh class assignment, initial states and dynamics, all
/// drawn from `seed`. Errors carry `setting_id`.
pub fn run_setting(
    net: &Network,
    part: &Partition,
    setting: &ResolvedSetting,
    setting_id: usize,
    ticks: u32,
    seed: u64,
) -> Result<Trajectory, ExperimentError> {
    let assign = assign_classes(
        net,
        part,
        setting.scholar_community,
        setting.pct_b_bot,
        setting.pct_f_bot,
        seed,
    )
    .map_err(|source| ExperimentError::Assignment { setting_id, source })?;
    run(
        net,
        &assign,
        &setting.params(ticks),
        setting.pct_initial_believers,
        seed,
    )
    .map_err(|source| ExperimentError::Model { setting_id, source })
}

/// A run to execute: grid position plus its seed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Job {
    pub setting_id: usize,
    pub replicate: u32,
    pub seed: u64,
}

/// Checks every distinct setting once so that a bad one fails the batch
/// before any run starts, and always with the lowest failing id.
fn preflight(net: &Network, part: &Partition, settings: &[ResolvedSetting]) -> Result<(), ExperimentError> {
    for (setting_id, setting) in settings.iter().enumerate() {
        setting
            .params(0)
            .validate()
            .map_err(|source| ExperimentError::Model { setting_id, source })?;
        assign_classes(
            net,
            part,
            setting.scholar_community,
            setting.pct_b_bot,
            setting.pct_f_bot,
            0,
        )
        .map_err(|source| ExperimentError::Assignment { setting_id, source })?;
    }
    Ok(())
}

/// Runs `jobs` on a pool of `options.jobs` threads. Output order follows
/// `jobs` whatever the execution order.
pub(crate) fn execute(
    net: &Network,
    part: &Partition,
    settings: &[ResolvedSetting],
    jobs: &[Job],
    ticks: u32,
    options: SweepOptions,
) -> Result<Vec<RunResult>, ExperimentError> {
    preflight(net, part, settings)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let outcomes: Vec<Result<RunResult, ExperimentError>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let setting = &settings[job.setting_id];
                let trajectory = run_setting(net, part, setting, job.setting_id, ticks, job.seed)?;
                Ok(RunResult {
                    setting_id: job.setting_id,
                    replicate: job.replicate,
                    seed: job.seed,
                    setting: setting.clone(),
                    finals: trajectory.last().overall,
                    trajectory: options.keep_series.then_some(trajectory),
                })
            })
            .collect()
    });
    outcomes.into_iter().collect()
}

/// Executes every `(setting, replicate)` of `spec` on a fixed partition.
/// Results are ordered by setting id, then replicate.
pub fn run_sweep(
    spec: &SweepSpec,
    net: &Network,
    part: &Partition,
    options: SweepOptions,
) -> Result<Vec<RunResult>, ExperimentError> {
    spec.validate()?;
    let settings = (0..spec.setting_count())
        .map(|id| spec.setting(id).resolve(part))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<Job> = (0..settings.len())
        .flat_map(|setting_id| {
            (0..spec.replicates).map(move |replicate| Job {
                setting_id,
                replicate,
                seed: derive_seed(spec.base_seed, setting_id as u64, replicate),
            })
        })
        .collect();
    execute(net, part, &settings, &jobs, spec.ticks, options)
}

#[derive(Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct ResultRecord {
    setting_id: usize,
    replicate: u32,
    seed: u64,
    alpha: f64,
    beta: f64,
    pct_initial_believers: f64,
    scholar_community: String,
    pv_scholar: f64,
    pf_scholar: f64,
    pv_influencer: f64,
    pf_influencer: f64,
    pct_b_bot: f64,
    pct_f_bot: f64,
    final_S: u32,
    final_B: u32,
    final_F: u32,
}

pub(crate) fn parse_community(raw: &str) -> Option<Option<CommunityId>> {
    if raw == "none" {
        Some(None)
    } else {
        raw.parse().ok().map(Some)
    }
}

/// Writes results under [`RESULTS_HEADER`].
pub fn write_results<W: Write>(results: &[RunResult], sink: W) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(sink);
    for r in results {
        let s = &r.setting;
        writer.serialize(ResultRecord {
            setting_id: r.setting_id,
            replicate: r.replicate,
            seed: r.seed,
            alpha: s.alpha,
            beta: s.beta,
            pct_initial_believers: s.pct_initial_believers,
            scholar_community: community_label(s.scholar_community),
            pv_scholar: s.pv_scholar,
            pf_scholar: s.pf_scholar,
            pv_influencer: s.pv_influencer,
            pf_influencer: s.pf_influencer,
            pct_b_bot: s.pct_b_bot,
            pct_f_bot: s.pct_f_bot,
            final_S: r.finals[0],
            final_B: r.finals[1],
            final_F: r.finals[2],
        })?;
    }
    if results.is_empty() {
        writer.write_record(RESULTS_HEADER.split(','))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a results file written by [`write_results`]; trajectories are not
/// stored there and come back as `None`.
pub fn read_results<R: Read>(source: R) -> Result<Vec<RunResult>, ExperimentError> {
    let mut reader = csv::Reader::from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != RESULTS_HEADER {
        return Err(ExperimentError::Parse {
            line: 1,
            message: format!("expected header {RESULTS_HEADER:?}"),
        });
    }
    let mut results = Vec::new();
    for (index, record) in reader.deserialize::<ResultRecord>().enumerate() {
        let line = index + 2;
        let r = record.map_err(|e| ExperimentError::Parse {
            line,
            message: e.to_string(),
        })?;
        let scholar_community = parse_community(&r.scholar_community).ok_or_else(|| ExperimentError::Parse {
            line,
            message: format!("bad scholar_community {:?}", r.scholar_community),
        })?;
        results.push(RunResult {
            setting_id: r.setting_id,
            replicate: r.replicate,
            seed: r.seed,
            setting: ResolvedSetting {
                alpha: r.alpha,
                beta: r.beta,
                pct_initial_believers: r.pct_initial_believers,
                scholar_community,
                pv_scholar: r.pv_scholar,
                pf_scholar: r.pf_scholar,
                pv_influencer: r.pv_influencer,
                pf_influencer: r.pf_influencer,
                pct_b_bot: r.pct_b_bot,
                pct_f_bot: r.pct_f_bot,
            },
            finals: [r.final_S, r.final_B, r.final_F],
            trajectory: None,
        });
    }
    Ok(results)
}
