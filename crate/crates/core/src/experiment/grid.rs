use std::fmt;

use crate::communities::{CommunityId, Partition};
use crate::model::{ClassProbs, ModelParams, DEFAULT_TICKS, NORMAL_PROBS};
use crate::rng::mix64;

use super::ExperimentError;

/// How a setting picks the scholar community.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScholarChoice {
    None,
    Id(CommunityId),
    /// The community whose share of the network (in percent) is closest
    /// to the given value. Written `share:<percent>` in spec files.
    Share(f64),
}

impl ScholarChoice {
    pub fn resolve(&self, part: &Partition) -> Result<Option<CommunityId>, ExperimentError> {
        match *self {
            ScholarChoice::None => Ok(None),
            ScholarChoice::Id(id) if (id as usize) < part.k() => Ok(Some(id)),
            ScholarChoice::Id(id) => Err(ExperimentError::UnknownCommunity { id, k: part.k() }),
            ScholarChoice::Share(pct) => Ok(part.closest_to_share(pct / 100.0)),
        }
    }
}

impl std::str::FromStr for ScholarChoice {
    type Err = String;

    /// Accepts `none`, a community id, or `share:<percent>`.
    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let raw = raw.trim();
        if raw.eq_ignore_ascii_case("none") {
            return Ok(ScholarChoice::None);
        }
        if let Some(pct) = raw.strip_prefix("share:") {
            return match pct.trim().parse::<f64>() {
                Ok(v) if (0.0..=100.0).contains(&v) => Ok(ScholarChoice::Share(v)),
                _ => Err(format!("share {:?} is not a percentage in [0, 100]", pct.trim())),
            };
        }
        raw.parse()
            .map(ScholarChoice::Id)
            .map_err(|_| format!("expected none, a community id or share:<percent>, found {raw:?}"))
    }
}

impl fmt::Display for ScholarChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScholarChoice::None => f.write_str("none"),
            ScholarChoice::Id(id) => write!(f, "{id}"),
            ScholarChoice::Share(pct) => write!(f, "share:{pct}"),
        }
    }
}

/// Parameter values of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting<C = Option<CommunityId>> {
    pub alpha: f64,
    pub beta: f64,
    pub pct_initial_believers: f64,
    pub scholar_community: C,
    pub pv_scholar: f64,
    pub pf_scholar: f64,
    pub pv_influencer: f64,
    pub pf_influencer: f64,
    pub pct_b_bot: f64,
    pub pct_f_bot: f64,
}

/// A setting whose scholar community has been looked up in a partition.
pub type ResolvedSetting = Setting<Option<CommunityId>>;

impl<C> Setting<C> {
    pub fn params(&self, ticks: u32) -> ModelParams {
        ModelParams {
            alpha: self.alpha,
            beta: self.beta,
            normal: NORMAL_PROBS,
            scholar: ClassProbs::new(self.pv_scholar, self.pf_scholar),
            influencer: ClassProbs::new(self.pv_influencer, self.pf_influencer),
            ticks,
        }
    }

    pub fn with_community<D>(&self, scholar_community: D) -> Setting<D> {
        Setting {
            alpha: self.alpha,
            beta: self.beta,
            pct_initial_believers: self.pct_initial_believers,
            scholar_community,
            pv_scholar: self.pv_scholar,
            pf_scholar: self.pf_scholar,
            pv_influencer: self.pv_influencer,
            pf_influencer: self.pf_influencer,
            pct_b_bot: self.pct_b_bot,
            pct_f_bot: self.pct_f_bot,
        }
    }
}

impl Setting<ScholarChoice> {
    pub fn resolve(&self, part: &Partition) -> Result<ResolvedSetting, ExperimentError> {
        Ok(self.with_community(self.scholar_community.resolve(part)?))
    }
}

impl Default for Setting<ScholarChoice> {
    fn default() -> Self {
        Setting {
            alpha: 0.8,
            beta: 0.5,
            pct_initial_believers: 10.0,
            scholar_community: ScholarChoice::None,
            pv_scholar: NORMAL_PROBS.verify,
            pf_scholar: NORMAL_PROBS.forget,
            pv_influencer: NORMAL_PROBS.verify,
            pf_influencer: NORMAL_PROBS.forget,
            pct_b_bot: 0.0,
            pct_f_bot: 0.0,
        }
    }
}

/// Renders a scholar community column value.
pub fn community_label(c: Option<CommunityId>) -> String {
    c.map_or_else(|| "none".to_string(), |id| id.to_string())
}

/// Parameter names in grid order; the last one varies fastest.
pub const PARAMETER_NAMES: [&str; 10] = [
    "alpha",
    "beta",
    "pct_initial_believers",
    "scholar_community",
    "pv_scholar",
    "pf_scholar",
    "pv_influencer",
    "pf_influencer",
    "pct_b_bot",
    "pct_f_bot",
];

/// Value lists of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub pct_initial_believers: Vec<f64>,
    pub scholar_community: Vec<ScholarChoice>,
    pub pv_scholar: Vec<f64>,
    pub pf_scholar: Vec<f64>,
    pub pv_influencer: Vec<f64>,
    pub pf_influencer: Vec<f64>,
    pub pct_b_bot: Vec<f64>,
    pub pct_f_bot: Vec<f64>,
    pub replicates: u32,
    pub ticks: u32,
    pub base_seed: u64,
}

/// Replicate indices occupy the low bits of the seed key.
pub const MAX_REPLICATES: u32 = 1 << 20;

impl Default for SweepSpec {
    fn default() -> Self {
        let d = Setting::<ScholarChoice>::default();
        SweepSpec {
            alpha: vec![d.alpha],
            beta: vec![d.beta],
            pct_initial_believers: vec![d.pct_initial_believers],
            scholar_community: vec![d.scholar_community],
            pv_scholar: vec![d.pv_scholar],
            pf_scholar: vec![d.pf_scholar],
            pv_influencer: vec![d.pv_influencer],
            pf_influencer: vec![d.pf_influencer],
            pct_b_bot: vec![d.pct_b_bot],
            pct_f_bot: vec![d.pct_f_bot],
            replicates: 4,
            ticks: DEFAULT_TICKS,
            base_seed: 0,
        }
    }
}

impl SweepSpec {
    /// The experiment grid of the original study: 13,824 settings.
    pub fn table1() -> Self {
        SweepSpec {
            alpha: vec![0.3, 0.8],
            beta: vec![0.5, 0.75],
            pct_initial_believers: vec![10.0, 40.0],
            scholar_community: vec![
                ScholarChoice::None,
                ScholarChoice::Share(8.81),
                ScholarChoice::Share(13.2),
                ScholarChoice::Share(22.13),
            ],
            pv_scholar: vec![0.05, 0.1, 0.2, 0.3],
            pf_scholar: vec![0.02, 0.05, 0.1],
            pv_influencer: vec![0.05, 0.1, 0.2],
            pf_influencer: vec![0.02, 0.05, 0.1],
            pct_b_bot: vec![0.0, 1.0],
            pct_f_bot: vec![0.0, 1.0],
            ..SweepSpec::default()
        }
    }

    fn list_lengths(&self) -> [usize; 10] {
        [
            self.alpha.len(),
            self.beta.len(),
            self.pct_initial_believers.len(),
            self.scholar_community.len(),
            self.pv_scholar.len(),
            self.pf_scholar.len(),
            self.pv_influencer.len(),
            self.pf_influencer.len(),
            self.pct_b_bot.len(),
            self.pct_f_bot.len(),
        ]
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        for (name, len) in PARAMETER_NAMES.iter().zip(self.list_lengths()) {
            if len == 0 {
                return Err(ExperimentError::EmptyList(name));
            }
        }
        let probabilities = [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("pv_scholar", &self.pv_scholar),
            ("pf_scholar", &self.pf_scholar),
            ("pv_influencer", &self.pv_influencer),
            ("pf_influencer", &self.pf_influencer),
        ];
        for (name, values) in probabilities {
            if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(ExperimentError::OutOfRange {
                    name,
                    value: v,
                    range: "[0, 1]",
                });
            }
        }
        let percentages = [
            ("pct_initial_believers", &self.pct_initial_believers),
            ("pct_b_bot", &self.pct_b_bot),
            ("pct_f_bot", &self.pct_f_bot),
        ];
        for (name, values) in percentages {
            if let Some(&v) = values.iter().find(|v| !(0.0..=100.0).contains(*v)) {
                return Err(ExperimentError::OutOfRange {
                    name,
                    value: v,
                    range: "[0, 100]",
                });
            }
        }
        if self.replicates == 0 || self.replicates >= MAX_REPLICATES {
            return Err(ExperimentError::BadReplicates(self.replicates));
        }
        Ok(())
    }

    pub fn setting_count(&self) -> usize {
        self.list_lengths().iter().product()
    }

    pub fn run_count(&self) -> usize {
        self.setting_count() * self.replicates as usize
    }

    /// Setting at position `id` of the grid.
    pub fn setting(&self, id: usize) -> Setting<ScholarChoice> {
        let lengths = self.list_lengths();
        let mut index = [0usize; 10];
        let mut rest = id;
        for p in (0..10).rev() {
            index[p] = rest % lengths[p];
            rest /= lengths[p];
        }
        Setting {
            alpha: self.alpha[index[0]],
            beta: self.beta[index[1]],
            pct_initial_believers: self.pct_initial_believers[index[2]],
            scholar_community: self.scholar_community[index[3]],
            pv_scholar: self.pv_scholar[index[4]],
            pf_scholar: self.pf_scholar[index[5]],
            pv_influencer: self.pv_influencer[index[6]],
            pf_influencer: self.pf_influencer[index[7]],
            pct_b_bot: self.pct_b_bot[index[8]],
            pct_f_bot: self.pct_f_bot[index[9]],
        }
    }
}

/// Cartesian product of the value lists. Parameters nest in
/// [`PARAMETER_NAMES`] order with the last varying fastest; a setting's id
/// is its index in the returned list.
pub fn expand_grid(spec: &SweepSpec) -> Result<Vec<Setting<ScholarChoice>>, ExperimentError> {
    spec.validate()?;
    Ok((0..spec.setting_count()).map(|id| spec.setting(id)).collect())
}

/// Seed of one run: `mix(base ^ mix(setting_id · 2^20 + replicate))`,
/// where `mix` is the SplitMix64 finalizer. The key is injective for
/// replicates below 2^20 and `mix` is a bijection, so for one base seed
/// distinct runs never share a seed.
pub fn derive_seed(base_seed: u64, setting_id: u64, replicate: u32) -> u64 {
    debug_assert!(replicate < MAX_REPLICATES);
    let key = (setting_id << 20) | u64::from(replicate);
    mix64(base_seed ^ mix64(key))
}
