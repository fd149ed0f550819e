//! Per-setting replicate statistics and the summary file.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::{community_label, ResolvedSetting};
use super::sweep::{parse_community, RunResult};
use super::ExperimentError;

pub const SUMMARY_HEADER: &str = "setting_id,alpha,beta,pct_initial_believers,scholar_community,pv_scholar,pf_scholar,pv_influencer,pf_influencer,pct_b_bot,pct_f_bot,mean_S,mean_B,mean_F,std_S,std_B,std_F";

/// Mean and sample standard deviation of the final counts of one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingSummary {
    pub setting_id: usize,
    pub setting: ResolvedSetting,
    pub replicates: u32,
    pub mean: [f64; 3],
    /// `n - 1` denominator; 0 for a single replicate.
    pub std: [f64; 3],
}

/// Mean and `n - 1` standard deviation, summing in the given order.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Groups results by setting and summarizes the final counts. The
/// replicate count is taken as one past the largest replicate index seen;
/// every setting must hold each index below it exactly once. The output is
/// ordered by setting id and does not depend on the input order.
pub fn aggregate(results: &[RunResult]) -> Result<Vec<SettingSummary>, ExperimentError> {
    let replicates = results.iter().map(|r| r.replicate + 1).max().unwrap_or(0);
    let mut groups: BTreeMap<usize, Vec<Option<&RunResult>>> = BTreeMap::new();
    for r in results {
        let slots = groups
            .entry(r.setting_id)
            .or_insert_with(|| vec![None; replicates as usize]);
        let slot = &mut slots[r.replicate as usize];
        if slot.is_some() {
            return Err(ExperimentError::DuplicateReplicate {
                setting_id: r.setting_id,
                replicate: r.replicate,
            });
        }
        *slot = Some(r);
    }
    groups
        .into_iter()
        .map(|(setting_id, slots)| {
            let runs = slots
                .iter()
                .enumerate()
                .map(|(replicate, r)| {
                    r.ok_or(ExperimentError::MissingReplicate {
                        setting_id,
                        replicate: replicate as u32,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let setting = &runs[0].setting;
            if runs.iter().any(|r| r.setting != *setting) {
                return Err(ExperimentError::InconsistentSetting { setting_id });
            }
            let mut mean = [0.0; 3];
            let mut std = [0.0; 3];
            for state in 0..3 {
                let values: Vec<f64> = runs.iter().map(|r| f64::from(r.finals[state])).collect();
                (mean[state], std[state]) = mean_std(&values);
            }
            Ok(SettingSummary {
                setting_id,
                setting: setting.clone(),
                replicates,
                mean,
                std,
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
struct SummaryRecord {
    setting_id: usize,
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
    std_S: f64,
    std_B: f64,
    std_F: f64,
}

/// Writes summaries under [`SUMMARY_HEADER`].
pub fn write_summary<W: Write>(summaries: &[SettingSummary], sink: W) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(sink);
    for x in summaries {
        let s = &x.setting;
        writer.serialize(SummaryRecord {
            setting_id: x.setting_id,
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
            mean_S: x.mean[0],
            mean_B: x.mean[1],
            mean_F: x.mean[2],
            std_S: x.std[0],
            std_B: x.std[1],
            std_F: x.std[2],
        })?;
    }
    if summaries.is_empty() {
        writer.write_record(SUMMARY_HEADER.split(','))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a summary file. The replicate count is not stored there and
/// comes back as 0.
pub fn read_summary<R: Read>(source: R) -> Result<Vec<SettingSummary>, ExperimentError> {
    let mut reader = csv::Reader::from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != SUMMARY_HEADER {
        return Err(ExperimentError::Parse {
            line: 1,
            message: format!("expected header {SUMMARY_HEADER:?}"),
        });
    }
    let mut out = Vec::new();
    for (index, record) in reader.deserialize::<SummaryRecord>().enumerate() {
        let line = index + 2;
        let r = record.map_err(|e| ExperimentError::Parse {
            line,
            message: e.to_string(),
        })?;
        let scholar_community = parse_community(&r.scholar_community).ok_or_else(|| ExperimentError::Parse {
            line,
            message: format!("bad scholar_community {:?}", r.scholar_community),
        })?;
        out.push(SettingSummary {
            setting_id: r.setting_id,
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
            replicates: 0,
            mean: [r.mean_S, r.mean_B, r.mean_F],
            std: [r.std_S, r.std_B, r.std_F],
        });
    }
    Ok(out)
}
