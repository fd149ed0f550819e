//! Sweep and scenario files.
//!
//! Both are line-oriented: `name = v1, v2, ...`, with `#` starting a
//! comment. Scenario files hold single values grouped under `[Name]`
//! section headers; keys before the first header are global.

use std::collections::HashSet;

use super::grid::{ScholarChoice, Setting, SweepSpec, PARAMETER_NAMES};
use super::ExperimentError;

const GLOBAL_KEYS: [&str; 3] = ["replicates", "ticks", "base_seed"];

fn parse_error(line: usize, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Parse {
        line,
        message: message.into(),
    }
}

enum Line<'a> {
    Blank,
    Section(&'a str),
    Entry { key: &'a str, values: Vec<&'a str> },
}

fn classify(raw: &str, line: usize) -> Result<Line<'_>, ExperimentError> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(Line::Blank);
    }
    if let Some(rest) = text.strip_prefix('[') {
        let name = rest
            .strip_suffix(']')
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .ok_or_else(|| parse_error(line, format!("malformed section header {text:?}")))?;
        return Ok(Line::Section(name));
    }
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| parse_error(line, format!("expected `name = values`, found {text:?}")))?;
    let key = key.trim();
    let values: Vec<&str> = value.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    Ok(Line::Entry { key, values })
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ExperimentError> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_error(line, format!("{key}: {raw:?} is not a number")))
}

fn parse_scholar(line: usize, raw: &str) -> Result<ScholarChoice, ExperimentError> {
    raw.parse()
        .map_err(|e| parse_error(line, format!("scholar_community: {e}")))
}

fn single<'a>(line: usize, key: &str, values: &[&'a str]) -> Result<&'a str, ExperimentError> {
    match values {
        [v] => Ok(v),
        _ => Err(parse_error(line, format!("{key} takes exactly one value"))),
    }
}

fn apply_global(spec: &mut SweepSpec, line: usize, key: &str, values: &[&str]) -> Result<(), ExperimentError> {
    let raw = single(line, key, values)?;
    let bad = || parse_error(line, format!("{key}: {raw:?} is not a non-negative integer"));
    match key {
        "replicates" => spec.replicates = raw.parse().map_err(|_| bad())?,
        "ticks" => spec.ticks = raw.parse().map_err(|_| bad())?,
        "base_seed" => spec.base_seed = raw.parse().map_err(|_| bad())?,
        _ => unreachable!("caller checks GLOBAL_KEYS"),
    }
    Ok(())
}

fn apply_parameter(spec: &mut SweepSpec, line: usize, key: &str, values: &[&str]) -> Result<(), ExperimentError> {
    if key == "scholar_community" {
        spec.scholar_community = values
            .iter()
            .map(|v| parse_scholar(line, v))
            .collect::<Result<_, _>>()?;
        return Ok(());
    }
    let parsed: Vec<f64> = values
        .iter()
        .map(|v| parse_f64(line, key, v))
        .collect::<Result<_, _>>()?;
    let slot = match key {
        "alpha" => &mut spec.alpha,
        "beta" => &mut spec.beta,
        "pct_initial_believers" => &mut spec.pct_initial_believers,
        "pv_scholar" => &mut spec.pv_scholar,
        "pf_scholar" => &mut spec.pf_scholar,
        "pv_influencer" => &mut spec.pv_influencer,
        "pf_influencer" => &mut spec.pf_influencer,
        "pct_b_bot" => &mut spec.pct_b_bot,
        "pct_f_bot" => &mut spec.pct_f_bot,
        _ => unreachable!("caller checks PARAMETER_NAMES"),
    };
    *slot = parsed;
    Ok(())
}

/// Parses a sweep spec. Parameters that are not mentioned keep their
/// default single value; an explicit key with no values is an error
/// naming that parameter.
pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec, ExperimentError> {
    let mut spec = SweepSpec::default();
    let mut seen = HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        match classify(raw, line)? {
            Line::Blank => {}
            Line::Section(name) => {
                return Err(parse_error(
                    line,
                    format!("unexpected section [{name}] in a sweep spec"),
                ));
            }
            Line::Entry { key, values } => {
                if !seen.insert(key.to_string()) {
                    return Err(parse_error(line, format!("{key} given twice")));
                }
                if let Some(&name) = PARAMETER_NAMES.iter().find(|&&n| n == key) {
                    if values.is_empty() {
                        return Err(ExperimentError::EmptyList(name));
                    }
                    apply_parameter(&mut spec, line, key, &values)?;
                } else if GLOBAL_KEYS.contains(&key) {
                    apply_global(&mut spec, line, key, &values)?;
                } else {
                    return Err(parse_error(line, format!("unknown parameter {key:?}")));
                }
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

/// A named, fully specified setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub setting: Setting<ScholarChoice>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    pub replicates: u32,
    pub ticks: u32,
    pub base_seed: u64,
}

struct Section {
    name: String,
    header_line: usize,
    spec: SweepSpec,
    seen: HashSet<String>,
}

impl Section {
    fn finish(self) -> Result<Scenario, ExperimentError> {
        if let Some(missing) = PARAMETER_NAMES.iter().find(|n| !self.seen.contains(**n)) {
            return Err(parse_error(
                self.header_line,
                format!("scenario {} does not set {missing}", self.name),
            ));
        }
        self.spec.validate()?;
        Ok(Scenario {
            name: self.name,
            setting: self.spec.setting(0),
        })
    }
}

/// Parses a scenario file. Every scenario must set all ten parameters to
/// a single value; `replicates`, `ticks` and `base_seed` may appear
/// before the first section.
pub fn parse_scenarios(text: &str) -> Result<ScenarioSet, ExperimentError> {
    let mut globals = SweepSpec::default();
    let mut global_seen = HashSet::new();
    let mut names = HashSet::new();
    let mut scenarios = Vec::new();
    let mut current: Option<Section> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        match classify(raw, line)? {
            Line::Blank => {}
            Line::Section(name) => {
                if !names.insert(name.to_string()) {
                    return Err(parse_error(line, format!("scenario {name} defined twice")));
                }
                if let Some(done) = current.take() {
                    scenarios.push(done.finish()?);
                }
                current = Some(Section {
                    name: name.to_string(),
                    header_line: line,
                    spec: SweepSpec::default(),
                    seen: HashSet::new(),
                });
            }
            Line::Entry { key, values } => match current.as_mut() {
                None => {
                    if !GLOBAL_KEYS.contains(&key) {
                        return Err(parse_error(
                            line,
                            format!("{key} must appear inside a [scenario] section"),
                        ));
                    }
                    if !global_seen.insert(key.to_string()) {
                        return Err(parse_error(line, format!("{key} given twice")));
                    }
                    apply_global(&mut globals, line, key, &values)?;
                }
                Some(section) => {
                    if !PARAMETER_NAMES.contains(&key) {
                        return Err(parse_error(line, format!("unknown parameter {key:?}")));
                    }
                    if !section.seen.insert(key.to_string()) {
                        return Err(parse_error(
                            line,
                            format!("{key} given twice in scenario {}", section.name),
                        ));
                    }
                    single(line, key, &values)?;
                    apply_parameter(&mut section.spec, line, key, &values)?;
                }
            },
        }
    }
    if let Some(done) = current.take() {
        scenarios.push(done.finish()?);
    }
    if scenarios.is_empty() {
        return Err(parse_error(text.lines().count().max(1), "no scenarios defined"));
    }
    globals.validate()?;
    Ok(ScenarioSet {
        scenarios,
        replicates: globals.replicates,
        ticks: globals.ticks,
        base_seed: globals.base_seed,
    })
}
