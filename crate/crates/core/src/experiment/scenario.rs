//! Side-by-side comparison of named scenarios.

use std::io::Write;

use serde::Serialize;

use crate::communities::Partition;
use crate::graph::Network;

use super::config::ScenarioSet;
use super::grid::{community_label, derive_seed, ResolvedSetting};
use super::summary::mean_std;
use super::sweep::{execute, Job, SweepOptions};
use super::ExperimentError;

pub const COMPARISON_HEADER: &str = "scenario,alpha,beta,pct_initial_believers,scholar_community,pv_scholar,pf_scholar,pv_influencer,pf_influencer,pct_b_bot,pct_f_bot,mean_S,mean_B,mean_F,share_S,share_B,share_F,believer_rank";

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub name: String,
    pub setting: ResolvedSetting,
    /// Mean final S, B, F counts over replicates.
    pub mean: [f64; 3],
    /// `mean` as fractions of the network.
    pub share: [f64; 3],
    /// 1 for the fewest mean final believers; ties keep file order.
    pub believer_rank: usize,
    /// Mean S, B, F counts per tick, tick 0 first.
    pub series: Vec<[f64; 3]>,
}

/// Runs every scenario `set.replicates` times. Replicate `r` of every
/// scenario uses the same seed, so scenarios differ only through their
/// parameters and identical scenarios give identical rows.
pub fn scenario_compare(
    set: &ScenarioSet,
    net: &Network,
    part: &Partition,
    jobs: usize,
) -> Result<Vec<ScenarioRow>, ExperimentError> {
    if set.replicates == 0 {
        return Err(ExperimentError::BadReplicates(0));
    }
    let settings = set
        .scenarios
        .iter()
        .map(|s| s.setting.resolve(part))
        .collect::<Result<Vec<_>, _>>()?;
    let work: Vec<Job> = (0..settings.len())
        .flat_map(|setting_id| {
            (0..set.replicates).map(move |replicate| Job {
                setting_id,
                replicate,
                seed: derive_seed(set.base_seed, 0, replicate),
            })
        })
        .collect();
    let options = SweepOptions {
        jobs,
        keep_series: true,
    };
    let results = execute(net, part, &settings, &work, set.ticks, options)?;

    let n = net.node_count() as f64;
    let reps = set.replicates as usize;
    let mut rows: Vec<ScenarioRow> = results
        .chunks(reps)
        .zip(&set.scenarios)
        .zip(settings)
        .map(|((runs, scenario), setting)| {
            let mut mean = [0.0; 3];
            for (state, m) in mean.iter_mut().enumerate() {
                let values: Vec<f64> = runs.iter().map(|r| f64::from(r.finals[state])).collect();
                *m = mean_std(&values).0;
            }
            let ticks = set.ticks as usize + 1;
            let series = (0..ticks)
                .map(|t| {
                    let mut at = [0.0; 3];
                    for (state, v) in at.iter_mut().enumerate() {
                        let values: Vec<f64> = runs
                            .iter()
                            .map(|r| f64::from(r.trajectory.as_ref().expect("series kept").counts[t].overall[state]))
                            .collect();
                        *v = mean_std(&values).0;
                    }
                    at
                })
                .collect();
            ScenarioRow {
                name: scenario.name.clone(),
                setting,
                mean,
                share: mean.map(|m| m / n),
                believer_rank: 0,
                series,
            }
        })
        .collect();

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].mean[1].total_cmp(&rows[b].mean[1]).then(a.cmp(&b)));
    for (rank, &i) in order.iter().enumerate() {
        rows[i].believer_rank = rank + 1;
    }
    Ok(rows)
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ComparisonRecord<'a> {
    scenario: &'a str,
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
    mean_S: f64,
    mean_B: f64,
    mean_F: f64,
    share_S: f64,
    share_B: f64,
    share_F: f64,
    believer_rank: usize,
}

/// Writes one row per scenario under [`COMPARISON_HEADER`].
pub fn write_comparison<W: Write>(rows: &[ScenarioRow], sink: W) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(sink);
    for row in rows {
        let s = &row.setting;
        writer.serialize(ComparisonRecord {
            scenario: &row.name,
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
            mean_S: row.mean[0],
            mean_B: row.mean[1],
            mean_F: row.mean[2],
            share_S: row.share[0],
            share_B: row.share[1],
            share_F: row.share[2],
            believer_rank: row.believer_rank,
        })?;
    }
    if rows.is_empty() {
        writer.write_record(COMPARISON_HEADER.split(','))?;
    }
    writer.flush()?;
    Ok(())
}
