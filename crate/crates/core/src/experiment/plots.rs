//! Plot-ready extracts of sweep summaries and scenario series.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use crate::communities::{CommunityId, Partition};

use super::grid::{community_label, ResolvedSetting};
use super::scenario::ScenarioRow;
use super::summary::SettingSummary;
use super::ExperimentError;

pub const SENSITIVITY_HEADER: &str = "parameter,low_value,high_value,low_setting_id,high_setting_id,mean_S_low,mean_B_low,mean_F_low,mean_S_high,mean_B_high,mean_F_high";
pub const SCHOLAR_ROWS_HEADER: &str =
    "setting_id,scholar_community,scholar_share,alpha,pv_scholar,pf_scholar,mean_S,mean_B,mean_F";
pub const BOT_GRID_HEADER: &str = "pct_b_bot,pct_f_bot,settings,mean_S,mean_B,mean_F";
pub const SCENARIO_SERIES_HEADER: &str = "scenario,tick,mean_S,mean_B,mean_F";

/// Two settings that differ only in `parameter`, at its lowest and
/// highest swept values.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityPair {
    pub parameter: &'static str,
    pub low_value: f64,
    pub high_value: f64,
    pub low_setting_id: usize,
    pub high_setting_id: usize,
    pub low_mean: [f64; 3],
    pub high_mean: [f64; 3],
}

type Field = fn(&mut ResolvedSetting) -> &mut f64;

const SPREADING_PARAMETERS: [(&str, Field); 3] = [
    ("alpha", |s| &mut s.alpha),
    ("beta", |s| &mut s.beta),
    ("pct_initial_believers", |s| &mut s.pct_initial_believers),
];

/// Matched low/high pairs for each spreading parameter that takes at
/// least two values. Pairs are ordered by parameter, then low setting id.
pub fn sensitivity_pairs(summaries: &[SettingSummary]) -> Vec<SensitivityPair> {
    let mut pairs = Vec::new();
    for (parameter, field) in SPREADING_PARAMETERS {
        let value = |s: &SettingSummary| *field(&mut s.setting.clone());
        let Some(low) = summaries.iter().map(value).min_by(f64::total_cmp) else {
            continue;
        };
        let high = summaries.iter().map(value).max_by(f64::total_cmp).unwrap();
        if low == high {
            continue;
        }
        // settings keyed by everything except the varied parameter
        let key = |s: &SettingSummary| {
            let mut masked = s.setting.clone();
            *field(&mut masked) = 0.0;
            format!("{masked:?}")
        };
        let highs: HashMap<String, &SettingSummary> = summaries
            .iter()
            .filter(|s| value(s) == high)
            .map(|s| (key(s), s))
            .collect();
        for lo in summaries.iter().filter(|s| value(s) == low) {
            if let Some(hi) = highs.get(&key(lo)) {
                pairs.push(SensitivityPair {
                    parameter,
                    low_value: low,
                    high_value: high,
                    low_setting_id: lo.setting_id,
                    high_setting_id: hi.setting_id,
                    low_mean: lo.mean,
                    high_mean: hi.mean,
                });
            }
        }
    }
    pairs
}

/// One setting's outcome against its scholar community.
#[derive(Debug, Clone, PartialEq)]
pub struct ScholarRow {
    pub setting_id: usize,
    pub scholar_community: Option<CommunityId>,
    /// Fraction of the network in the scholar community; 0 for none.
    pub scholar_share: f64,
    pub alpha: f64,
    pub pv_scholar: f64,
    pub pf_scholar: f64,
    pub mean: [f64; 3],
}

/// Every summary with its scholar community size, ordered by share, then
/// setting id.
pub fn scholar_rows(summaries: &[SettingSummary], part: &Partition) -> Vec<ScholarRow> {
    let mut rows: Vec<ScholarRow> = summaries
        .iter()
        .map(|s| ScholarRow {
            setting_id: s.setting_id,
            scholar_community: s.setting.scholar_community,
            scholar_share: s
                .setting
                .scholar_community
                .filter(|&c| (c as usize) < part.k())
                .map_or(0.0, |c| part.share(c)),
            alpha: s.setting.alpha,
            pv_scholar: s.setting.pv_scholar,
            pf_scholar: s.setting.pf_scholar,
            mean: s.mean,
        })
        .collect();
    rows.sort_by(|a, b| {
        a.scholar_share
            .total_cmp(&b.scholar_share)
            .then(a.setting_id.cmp(&b.setting_id))
    });
    rows
}

/// Mean outcome of all settings sharing one bot mix.
#[derive(Debug, Clone, PartialEq)]
pub struct BotCell {
    pub pct_b_bot: f64,
    pub pct_f_bot: f64,
    pub settings: usize,
    pub mean: [f64; 3],
}

/// Averages setting means over each `(pct_b_bot, pct_f_bot)` pair,
/// ordered by believer bots, then fact-checker bots.
pub fn bot_grid(summaries: &[SettingSummary]) -> Vec<BotCell> {
    let mut cells: BTreeMap<(u64, u64), (f64, f64, Vec<&SettingSummary>)> = BTreeMap::new();
    for s in summaries {
        let (b, f) = (s.setting.pct_b_bot, s.setting.pct_f_bot);
        // non-negative floats order like their bit patterns
        cells
            .entry((b.to_bits(), f.to_bits()))
            .or_insert((b, f, Vec::new()))
            .2
            .push(s);
    }
    cells
        .into_values()
        .map(|(pct_b_bot, pct_f_bot, members)| {
            let mut mean = [0.0; 3];
            for (state, m) in mean.iter_mut().enumerate() {
                *m = members.iter().map(|s| s.mean[state]).sum::<f64>() / members.len() as f64;
            }
            BotCell {
                pct_b_bot,
                pct_f_bot,
                settings: members.len(),
                mean,
            }
        })
        .collect()
}

fn writer_with_header<W: Write>(sink: W, header: &str) -> Result<csv::Writer<W>, ExperimentError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    writer.write_record(header.split(','))?;
    Ok(writer)
}

fn finish<W: Write>(mut writer: csv::Writer<W>) -> Result<(), ExperimentError> {
    writer.flush()?;
    Ok(())
}

/// Shortest round-trip form, always with a fractional part.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_sensitivity_pairs<W: Write>(pairs: &[SensitivityPair], sink: W) -> Result<(), ExperimentError> {
    let mut writer = writer_with_header(sink, SENSITIVITY_HEADER)?;
    for p in pairs {
        let mut record = vec![
            p.parameter.to_string(),
            num(p.low_value),
            num(p.high_value),
            p.low_setting_id.to_string(),
            p.high_setting_id.to_string(),
        ];
        record.extend(p.low_mean.iter().chain(&p.high_mean).map(|&v| num(v)));
        writer.write_record(&record)?;
    }
    finish(writer)
}

pub fn write_scholar_rows<W: Write>(rows: &[ScholarRow], sink: W) -> Result<(), ExperimentError> {
    let mut writer = writer_with_header(sink, SCHOLAR_ROWS_HEADER)?;
    for r in rows {
        let mut record = vec![
            r.setting_id.to_string(),
            community_label(r.scholar_community),
            num(r.scholar_share),
            num(r.alpha),
            num(r.pv_scholar),
            num(r.pf_scholar),
        ];
        record.extend(r.mean.iter().map(|&v| num(v)));
        writer.write_record(&record)?;
    }
    finish(writer)
}

pub fn write_bot_grid<W: Write>(cells: &[BotCell], sink: W) -> Result<(), ExperimentError> {
    let mut writer = writer_with_header(sink, BOT_GRID_HEADER)?;
    for c in cells {
        let mut record = vec![num(c.pct_b_bot), num(c.pct_f_bot), c.settings.to_string()];
        record.extend(c.mean.iter().map(|&v| num(v)));
        writer.write_record(&record)?;
    }
    finish(writer)
}

/// Mean S, B, F per tick for each scenario.
pub fn write_scenario_series<W: Write>(rows: &[ScenarioRow], sink: W) -> Result<(), ExperimentError> {
    let mut writer = writer_with_header(sink, SCENARIO_SERIES_HEADER)?;
    for row in rows {
        for (tick, at) in row.series.iter().enumerate() {
            let mut record = vec![row.name.clone(), tick.to_string()];
            record.extend(at.iter().map(|&v| num(v)));
            writer.write_record(&record)?;
        }
    }
    finish(writer)
}
