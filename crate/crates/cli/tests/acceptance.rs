//! Acceptance run: one PASS or FAIL line per criterion, nonzero exit if
//! any criterion fails.
//!
//! Criteria 3 to 9 and 11 need the ego-Facebook edge list. It is looked up
//! in `HOAXNET_FACEBOOK_GRAPH`, then in `data/facebook_combined.txt` at the
//! workspace root (see `scripts/fetch_facebook.sh`). A k=8 partition is
//! taken from `HOAXNET_PARTITION` or `data/facebook_k8.csv` when present,
//! otherwise it is computed here.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hoaxnet::communities::DEFAULT_MAX_SWEEPS;
use hoaxnet::experiment::{
    aggregate, derive_seed, expand_grid, parse_scenarios, parse_sweep_spec, run_setting, run_sweep, scenario_compare,
    ScholarChoice, Setting, SettingSummary, SweepOptions, SweepSpec,
};
use hoaxnet::{fluid_communities, load_partition, Network, Partition};

const FACEBOOK_NODES: usize = 4039;
const FACEBOOK_EDGES: usize = 88_234;
/// Replicates behind every mean in criteria 5 to 8; all settings share
/// replicate seeds.
const REPLICATES: u32 = 16;
const BASE_SEED: u64 = 2024;
/// Communities the grid asks for, as percent of N.
const TARGET_SHARES: [f64; 3] = [8.81, 13.2, 22.13];

type Outcome = Result<String, String>;

fn workspace() -> PathBuf {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    root.canonicalize().unwrap_or(root)
}

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: usize, name: &str, outcome: Outcome) {
        match outcome {
            Ok(detail) => println!("PASS [{id}] {name}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL [{id}] {name}: {detail}");
            }
        }
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- inputs

struct Facebook {
    net: Network,
    part: Partition,
}

fn load_facebook() -> Result<Facebook, String> {
    let path = std::env::var_os("HOAXNET_FACEBOOK_GRAPH")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace().join("data/facebook_combined.txt"));
    let file = File::open(&path).map_err(|e| {
        format!(
            "ego-Facebook edge list not available at {} ({e}); run scripts/fetch_facebook.sh or set HOAXNET_FACEBOOK_GRAPH",
            path.display()
        )
    })?;
    let net = Network::load_edge_list(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?;
    if net.node_count() != FACEBOOK_NODES || net.edge_count() != FACEBOOK_EDGES {
        return Err(format!(
            "{} has {} nodes and {} edges, expected {FACEBOOK_NODES} and {FACEBOOK_EDGES}",
            path.display(),
            net.node_count(),
            net.edge_count()
        ));
    }
    let part = facebook_partition(&net)?;
    Ok(Facebook { net, part })
}

/// Largest distance, in percent of N, between a target share and the
/// community picked for it.
fn share_error(part: &Partition) -> f64 {
    TARGET_SHARES
        .iter()
        .map(|&t| {
            let c = part.closest_to_share(t / 100.0).unwrap();
            (100.0 * part.share(c) - t).abs()
        })
        .fold(0.0, f64::max)
}

fn facebook_partition(net: &Network) -> Result<Partition, String> {
    let stored = std::env::var_os("HOAXNET_PARTITION")
        .map(PathBuf::from)
        .or_else(|| Some(workspace().join("data/facebook_k8.csv")).filter(|p| p.exists()));
    if let Some(path) = stored {
        let file = File::open(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        return load_partition(BufReader::new(file), net.node_count()).map_err(|e| format!("{}: {e}", path.display()));
    }
    // First clustering seed whose communities match the targets within 2pp,
    // else the closest one seen.
    let mut best: Option<(f64, Partition)> = None;
    for seed in 0..64 {
        let part = fluid_communities(net, 8, seed, DEFAULT_MAX_SWEEPS)
            .map_err(|e| e.to_string())?
            .partition;
        let err = share_error(&part);
        if best.as_ref().is_none_or(|(b, _)| err < *b) {
            best = Some((err, part));
        }
        if err <= 2.0 {
            break;
        }
    }
    Ok(best.unwrap().1)
}

fn baseline() -> Setting<ScholarChoice> {
    Setting {
        scholar_community: ScholarChoice::Share(13.2),
        ..Setting::default()
    }
}

/// Mean final S, B, F shares in percent of N over [`REPLICATES`] runs.
fn mean_shares(fb: &Facebook, setting: &Setting<ScholarChoice>) -> Result<[f64; 3], String> {
    let resolved = setting.resolve(&fb.part).map_err(|e| e.to_string())?;
    let mut sum = [0.0; 3];
    for r in 0..REPLICATES {
        let traj = run_setting(
            &fb.net,
            &fb.part,
            &resolved,
            0,
            hoaxnet::model::DEFAULT_TICKS,
            derive_seed(BASE_SEED, 0, r),
        )
        .map_err(|e| e.to_string())?;
        for (s, c) in sum.iter_mut().zip(traj.last().overall) {
            *s += c as f64;
        }
    }
    let n = fb.net.node_count() as f64;
    Ok(sum.map(|s| 100.0 * s / (REPLICATES as f64 * n)))
}

fn fmt3(v: [f64; 3]) -> String {
    format!("S={:.1}% B={:.1}% F={:.1}%", v[0], v[1], v[2])
}

// -------------------------------------------------------------- criteria

fn grid_cardinality() -> Outcome {
    let builtin = SweepSpec::table1();
    let path = workspace().join("specs/table1.spec");
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = parse_sweep_spec(&text).map_err(|e| e.to_string())?;
    let settings = expand_grid(&file).map_err(|e| e.to_string())?.len();
    let runs = file.run_count();
    check(
        file == builtin && settings == 13_824 && runs == 55_296 && builtin.run_count() == 55_296,
        format!(
            "{settings} settings, {runs} runs, spec file matches built-in grid: {}",
            file == builtin
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    const SAMPLES: usize = 100_000;
    const SIGNIFICANCE: f64 = 0.001;
    let mut details = Vec::new();
    let mut ok = true;
    for (i, case) in oracle::mixed_cases().iter().enumerate() {
        let exact = oracle::exact_distribution(case);
        for (route, counts) in [
            ("step", oracle::sample_step(case, SAMPLES, 11 + i as u64)),
            ("engine", oracle::sample_simulation(case, SAMPLES, 101 + i as u64)),
        ] {
            let fit = oracle::chi_square(&counts, &exact);
            ok &= fit.impossible == 0 && fit.p_value > SIGNIFICANCE;
            details.push(format!("{}/{route} p={:.3}", case.name, fit.p_value));
        }
    }
    check(ok, format!("{} (threshold {SIGNIFICANCE})", details.join(", ")))
}

struct FullSweep {
    summaries: Vec<SettingSummary>,
    elapsed: Duration,
}

fn full_sweep(fb: &Facebook) -> Result<FullSweep, String> {
    let spec = SweepSpec::table1();
    let started = Instant::now();
    let results = run_sweep(&spec, &fb.net, &fb.part, SweepOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let summaries = aggregate(&results).map_err(|e| e.to_string())?;
    Ok(FullSweep { summaries, elapsed })
}

fn replicate_stability(fb: &Facebook, sweep: &FullSweep) -> Outcome {
    let n = fb.net.node_count() as f64;
    let total = sweep.summaries.len();
    let mut stds: Vec<f64> = (0..200)
        .flat_map(|i| sweep.summaries[i * total / 200].std)
        .map(|s| s / n)
        .collect();
    stds.sort_by(f64::total_cmp);
    let max = *stds.last().unwrap();
    let median = (stds[stds.len() / 2 - 1] + stds[stds.len() / 2]) / 2.0;
    check(
        max <= 0.05 && median <= 0.02,
        format!(
            "200 settings, max std {:.2}% of N (<= 5%), median {:.2}% (<= 2%)",
            100.0 * max,
            100.0 * median
        ),
    )
}

fn alpha_sensitivity(sweep: &FullSweep) -> Outcome {
    use std::collections::HashMap;
    let key = |s: &SettingSummary| {
        format!(
            "{:?}",
            Setting {
                alpha: 0.0,
                ..s.setting.clone()
            }
        )
    };
    let mut low: HashMap<String, [f64; 3]> = HashMap::new();
    for s in sweep.summaries.iter().filter(|s| s.setting.alpha == 0.3) {
        low.insert(key(s), s.mean);
    }
    let (mut b_low, mut b_high, mut pairs, mut f_wins) = (0.0, 0.0, 0usize, 0usize);
    for s in sweep.summaries.iter().filter(|s| s.setting.alpha == 0.8) {
        if let Some(l) = low.get(&key(s)) {
            pairs += 1;
            b_low += l[1];
            b_high += s.mean[1];
            f_wins += usize::from(l[2] > l[1]);
        }
    }
    if pairs == 0 {
        return Err("no matched alpha pairs".into());
    }
    let ratio = b_high / b_low;
    check(
        ratio >= 2.0 && 2 * f_wins > pairs,
        format!("{pairs} pairs, mean B ratio {ratio:.2} (>= 2), F > B at alpha 0.3 in {f_wins}/{pairs}"),
    )
}

fn baseline_cell(fb: &Facebook) -> Outcome {
    let setting = baseline();
    let community = setting
        .resolve(&fb.part)
        .map_err(|e| e.to_string())?
        .scholar_community
        .unwrap();
    let size = 100.0 * fb.part.share(community);
    let m = mean_shares(fb, &setting)?;
    let within = |v: f64, target: f64| (v - target).abs() <= 5.0;
    check(
        (size - 13.0).abs() <= 2.0 && within(m[0], 18.0) && within(m[1], 50.0) && within(m[2], 32.0),
        format!(
            "scholar community {size:.2}% of N, {} (targets 18/50/32 +-5pp)",
            fmt3(m)
        ),
    )
}

fn education_trend(fb: &Facebook) -> Outcome {
    let base = mean_shares(fb, &baseline())?;
    let scholars = mean_shares(
        fb,
        &Setting {
            pv_scholar: 0.3,
            ..baseline()
        },
    )?;
    let influencers = mean_shares(
        fb,
        &Setting {
            pv_influencer: 0.2,
            pf_influencer: 0.05,
            ..baseline()
        },
    )?;
    let d_scholar = scholars[1] - base[1];
    let (d_inf_b, d_inf_f) = (influencers[1] - base[1], influencers[2] - base[2]);
    check(
        (-10.0..=-4.0).contains(&d_scholar) && (-5.0..0.0).contains(&d_inf_b) && d_inf_f > 0.0 && d_inf_f <= 5.0,
        format!(
            "scholar pv 0.05->0.3: dB={d_scholar:+.1}pp (7+-3 down); influencers educated: dB={d_inf_b:+.1}pp dF={d_inf_f:+.1}pp (about 2pp)"
        ),
    )
}

fn scholar_size(fb: &Facebook) -> Outcome {
    let choices = [
        ScholarChoice::None,
        ScholarChoice::Share(8.81),
        ScholarChoice::Share(13.2),
        ScholarChoice::Share(22.13),
    ];
    let mut rows = Vec::new();
    for choice in choices {
        let setting = Setting {
            scholar_community: choice,
            pv_scholar: 0.3,
            pf_scholar: 0.02,
            ..Setting::default()
        };
        let size = match setting.resolve(&fb.part).map_err(|e| e.to_string())?.scholar_community {
            Some(c) => 100.0 * fb.part.share(c),
            None => 0.0,
        };
        rows.push((size, mean_shares(fb, &setting)?));
    }
    let b_down = rows.windows(2).all(|w| w[1].1[1] < w[0].1[1]);
    let f_up = rows.windows(2).all(|w| w[1].1[2] > w[0].1[2]);
    let (first, last) = (rows[0].1, rows[3].1);
    let detail: Vec<String> = rows
        .iter()
        .map(|(size, m)| format!("{size:.1}%: B={:.1} F={:.1}", m[1], m[2]))
        .collect();
    check(
        b_down && f_up && first[1] - last[1] > 5.0 && last[2] - first[2] > 5.0,
        detail.join("; "),
    )
}

fn bot_counterbalance(fb: &Facebook) -> Outcome {
    let no_bots = mean_shares(fb, &Setting::default())?[1];
    let mut b = Vec::new();
    for pct_f in 0..=5 {
        let setting = Setting {
            pct_b_bot: 5.0,
            pct_f_bot: pct_f as f64,
            ..Setting::default()
        };
        b.push(mean_shares(fb, &setting)?[1]);
    }
    let monotone = b.windows(2).all(|w| w[1] <= w[0] + 2.0);
    let series: Vec<String> = b.iter().map(|v| format!("{v:.1}")).collect();
    check(
        monotone && b[5] <= no_bots,
        format!(
            "B% with 5% believer bots, fact-checker bots 0..5%: {}; no bots {no_bots:.1}",
            series.join(" ")
        ),
    )
}

fn scenario_ordering(fb: &Facebook) -> Outcome {
    let path = workspace().join("specs/table3_scenarios.spec");
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let set = parse_scenarios(&text).map_err(|e| e.to_string())?;
    let rows = scenario_compare(&set, &fb.net, &fb.part, 0).map_err(|e| e.to_string())?;
    let b = |name: &str| {
        rows.iter()
            .find(|r| r.name == name)
            .map(|r| 100.0 * r.share[1])
            .ok_or_else(|| format!("scenario {name} missing"))
    };
    let (best, moderate, normal, worst) = (b("Best")?, b("Moderate")?, b("Normal")?, b("Worst")?);
    check(
        best < moderate && moderate < normal && normal < worst && worst - best >= 5.0,
        format!("B%: Best {best:.1} < Moderate {moderate:.1} < Normal {normal:.1} < Worst {worst:.1}"),
    )
}

fn performance(sweep: &FullSweep) -> Outcome {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let minutes = sweep.elapsed.as_secs_f64() / 60.0;
    check(
        minutes < 60.0,
        format!("55296 runs in {minutes:.1} min on {cores} core(s) (< 60 min)"),
    )
}

// ------------------------------------------------------ CLI determinism

/// Runs the binary on a whitespace-separated command line.
fn hoaxnet(line: &str, jobs: usize) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hoaxnet"))
        .args(line.split_whitespace())
        .env("HOAXNET_JOBS", jobs.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "hoaxnet {line}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn fixture_graph() -> String {
    let n = 150;
    let mut text = String::new();
    for i in 0..n {
        text += &format!("{} {}\n", i, (i + 1) % n);
        let j = (i * 11 + 5) % n;
        if j != i {
            text += &format!("{i} {j}\n");
        }
    }
    text
}

const FIXTURE_SPEC: &str = "alpha = 0.3, 0.8\nscholar_community = none, share:25\npct_b_bot = 0, 3\npct_f_bot = 0, 2\nreplicates = 3\nticks = 30\nbase_seed = 5\n";

const FIXTURE_SCENARIOS: &str = "replicates = 3\nticks = 30\n\n\
[Normal]\nalpha = 0.8\nbeta = 0.5\npct_initial_believers = 10\nscholar_community = none\n\
pv_scholar = 0.05\npf_scholar = 0.1\npv_influencer = 0.05\npf_influencer = 0.1\npct_b_bot = 0\npct_f_bot = 0\n\n\
[Bots]\nalpha = 0.8\nbeta = 0.5\npct_initial_believers = 10\nscholar_community = 1\n\
pv_scholar = 0.2\npf_scholar = 0.05\npv_influencer = 0.05\npf_influencer = 0.05\npct_b_bot = 3\npct_f_bot = 3\n";

/// Runs every file-producing command once with `jobs` workers, writing
/// into `dir/tag`.
fn run_commands(dir: &Path, tag: &str, jobs: usize) -> Result<PathBuf, String> {
    let out = dir.join(tag);
    fs::create_dir(&out).map_err(|e| e.to_string())?;
    let (d, o) = (dir.display(), out.display());
    hoaxnet(
        &format!("cluster --graph {d}/graph.txt --k 4 --seed 8 --out {o}/part.csv"),
        jobs,
    )?;
    // Later commands read one shared partition so that the input paths
    // recorded in their metadata agree across runs.
    let shared = dir.join("part.csv");
    if !shared.exists() {
        fs::copy(out.join("part.csv"), &shared).map_err(|e| e.to_string())?;
    }
    let inputs = format!("--graph {d}/graph.txt --partition {d}/part.csv");
    hoaxnet(
        &format!(
            "simulate {inputs} --scholar-community share:25 --pct-b-bot 2 --pct-f-bot 2 --seed 17 --out {o}/series.csv"
        ),
        jobs,
    )?;
    hoaxnet(
        &format!("sweep {inputs} --spec {d}/fixture.spec --out {o}/sweep --keep-series --emit-plot-data"),
        jobs,
    )?;
    hoaxnet(
        &format!("aggregate --in {o}/sweep/results.csv --out {o}/summary.csv"),
        jobs,
    )?;
    hoaxnet(
        &format!("scenarios {inputs} --spec {d}/fixture_scenarios.spec --out {o}/scenarios --emit-plot-data"),
        jobs,
    )?;
    Ok(out)
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            files.extend(files_under(&path));
        } else {
            files.push(path);
        }
    }
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    fs::write(dir.path().join("graph.txt"), fixture_graph()).map_err(|e| e.to_string())?;
    fs::write(dir.path().join("fixture.spec"), FIXTURE_SPEC).map_err(|e| e.to_string())?;
    fs::write(dir.path().join("fixture_scenarios.spec"), FIXTURE_SCENARIOS).map_err(|e| e.to_string())?;
    let runs = [
        run_commands(dir.path(), "a", 1)?,
        run_commands(dir.path(), "b", 8)?,
        run_commands(dir.path(), "c", 1)?,
    ];
    let reference = files_under(&runs[0]);
    let mut differing = Vec::new();
    for other in &runs[1..] {
        let files = files_under(other);
        if files.len() != reference.len() {
            return Err(format!("{} files vs {}", files.len(), reference.len()));
        }
        for (a, b) in reference.iter().zip(&files) {
            if fs::read(a).unwrap() != fs::read(b).unwrap() {
                differing.push(b.strip_prefix(dir.path()).unwrap().display().to_string());
            }
        }
    }
    check(
        differing.is_empty(),
        if differing.is_empty() {
            format!(
                "{} output files identical across jobs=1, jobs=8 and a repeat",
                reference.len()
            )
        } else {
            format!("differing outputs: {}", differing.join(", "))
        },
    )
}

fn main() {
    let mut report = Report { failures: 0 };
    report.record(1, "grid cardinality", grid_cardinality());
    report.record(2, "oracle equivalence", oracle_equivalence());

    let facebook = load_facebook();
    match &facebook {
        Ok(fb) => {
            let sizes: Vec<String> = fb.part.sizes().iter().map(usize::to_string).collect();
            println!(
                "info: ego-Facebook {} nodes, {} edges; partition sizes {} (target shares within {:.2}pp)",
                fb.net.node_count(),
                fb.net.edge_count(),
                sizes.join(","),
                share_error(&fb.part)
            );
        }
        Err(reason) => println!("info: {reason}"),
    }
    let facebook =
        facebook.map_err(|_| "needs the ego-Facebook edge list, which is unavailable (see info line)".to_string());
    let sweep = facebook.as_ref().map_err(Clone::clone).and_then(full_sweep);
    let with_sweep = |f: &dyn Fn(&FullSweep) -> Outcome| sweep.as_ref().map_err(Clone::clone).and_then(f);
    let with_graph = |f: &dyn Fn(&Facebook) -> Outcome| facebook.as_ref().map_err(Clone::clone).and_then(f);

    report.record(
        3,
        "replicate stability",
        with_graph(&|fb| with_sweep(&|s| replicate_stability(fb, s))),
    );
    report.record(4, "alpha sensitivity", with_sweep(&alpha_sensitivity));
    report.record(5, "baseline cell", with_graph(&baseline_cell));
    report.record(6, "education trend", with_graph(&education_trend));
    report.record(7, "scholar community size", with_graph(&scholar_size));
    report.record(8, "bot counterbalance", with_graph(&bot_counterbalance));
    report.record(9, "scenario ordering", with_graph(&scenario_ordering));
    report.record(10, "CLI determinism", cli_determinism());
    report.record(11, "full sweep runtime", with_sweep(&performance));

    println!("acceptance: {} of 11 criteria failed", report.failures);
    if report.failures > 0 {
        std::process::exit(1);
    }
}
