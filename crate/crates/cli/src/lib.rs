//! Command-line front end: argument parsing and the subcommands.

mod output;

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hoaxnet::communities::DEFAULT_MAX_SWEEPS;
use hoaxnet::experiment::{
    self, bot_grid, community_label, parse_scenarios, parse_sweep_spec, read_results, run_setting, scholar_rows,
    sensitivity_pairs, write_bot_grid, write_comparison, write_results, write_scenario_series, write_scholar_rows,
    write_sensitivity_pairs, write_summary, ScholarChoice, Setting,
};
use hoaxnet::model::write_trajectory_rows;
use hoaxnet::{
    aggregate, fluid_communities, load_partition, run_sweep, save_partition, scenario_compare, Network, Partition,
    SweepOptions,
};
use serde_json::json;

use output::{meta_path, Outputs};

/// Simulate hoax and fact-checking spread on a social graph.
#[derive(Parser)]
#[command(name = "hoaxnet", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an edge list and report its size and connectivity.
    Validate {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Split the graph into k fluid communities and save the partition.
    Cluster(ClusterArgs),
    /// Run one seeded simulation and write its time series.
    Simulate(SimulateArgs),
    /// Run every setting of a sweep spec with replicates.
    Sweep(SweepArgs),
    /// Summarize a results file into per-setting means and deviations.
    Aggregate {
        /// Results file written by `sweep`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare named scenarios from a scenario file.
    Scenarios(ScenarioArgs),
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    /// Partition file to write.
    #[arg(long)]
    out: PathBuf,
}

fn unit(raw: &str) -> Result<f64, String> {
    match raw.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("{raw} is not a probability in [0, 1]")),
    }
}

fn percent(raw: &str) -> Result<f64, String> {
    match raw.parse::<f64>() {
        Ok(v) if (0.0..=100.0).contains(&v) => Ok(v),
        _ => Err(format!("{raw} is not a percentage in [0, 100]")),
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Hoax credibility.
    #[arg(long, default_value_t = 0.8, value_parser = unit)]
    alpha: f64,
    /// Spreading rate.
    #[arg(long, default_value_t = 0.5, value_parser = unit)]
    beta: f64,
    #[arg(long, default_value_t = 10.0, value_parser = percent)]
    pct_initial_believers: f64,
    /// `none`, a community id, or `share:<percent>` for the community whose
    /// size is closest to that share of the network.
    #[arg(long, default_value = "none")]
    scholar_community: ScholarChoice,
    #[arg(long, default_value_t = 0.05, value_parser = unit)]
    pv_scholar: f64,
    #[arg(long, default_value_t = 0.1, value_parser = unit)]
    pf_scholar: f64,
    #[arg(long, default_value_t = 0.05, value_parser = unit)]
    pv_influencer: f64,
    #[arg(long, default_value_t = 0.1, value_parser = unit)]
    pf_influencer: f64,
    #[arg(long, default_value_t = 0.0, value_parser = percent)]
    pct_b_bot: f64,
    #[arg(long, default_value_t = 0.0, value_parser = percent)]
    pct_f_bot: f64,
}

impl ModelArgs {
    fn setting(&self) -> Setting<ScholarChoice> {
        Setting {
            alpha: self.alpha,
            beta: self.beta,
            pct_initial_believers: self.pct_initial_believers,
            scholar_community: self.scholar_community,
            pv_scholar: self.pv_scholar,
            pf_scholar: self.pf_scholar,
            pv_influencer: self.pv_influencer,
            pf_influencer: self.pf_influencer,
            pct_b_bot: self.pct_b_bot,
            pct_f_bot: self.pct_f_bot,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Needed only when a scholar community is chosen.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = hoaxnet::model::DEFAULT_TICKS)]
    ticks: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Time-series file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Base seed; overrides the file's `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<u32>,
    #[arg(long)]
    ticks: Option<u32>,
    /// Worker threads (0: one per core). Does not affect output.
    #[arg(long, env = "HOAXNET_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Also write per-figure data extracts.
    #[arg(long)]
    emit_plot_data: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Keep every run's time series in `series.csv`.
    #[arg(long)]
    keep_series: bool,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    run: RunArgs,
}

fn load_graph(path: &Path) -> Result<Network> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Network::load_edge_list(BufReader::new(file)).with_context(|| format!("reading graph {}", path.display()))
}

fn load_partition_file(path: &Path, net: &Network) -> Result<Partition> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_partition(BufReader::new(file), net.node_count())
        .with_context(|| format!("reading partition {}", path.display()))
}

fn write_json(sink: &mut impl Write, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *sink, value)?;
    writeln!(sink)?;
    Ok(())
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn validate(graph: &Path) -> Result<()> {
    let net = load_graph(graph)?;
    println!(
        "nodes={} edges={} mean_degree={:.2} connected={}",
        net.node_count(),
        net.edge_count(),
        net.mean_degree(),
        net.is_connected()
    );
    Ok(())
}

fn cluster(args: &ClusterArgs) -> Result<()> {
    let net = load_graph(&args.graph)?;
    let outcome = fluid_communities(&net, args.k, args.seed, args.max_sweeps)?;
    let part = &outcome.partition;
    let mut outputs = Outputs::new();
    outputs.write(&args.out, |sink| Ok(save_partition(part, sink)?))?;
    let meta = json!({
        "command": "cluster",
        "graph": path_str(&args.graph),
        "k": args.k,
        "seed": args.seed,
        "max_sweeps": args.max_sweeps,
        "converged": outcome.converged,
        "sweeps": outcome.sweeps,
        "sizes": part.sizes(),
    });
    outputs.write(&meta_path(&args.out), |sink| write_json(sink, &meta))?;
    outputs.commit();
    let sizes: Vec<String> = part.sizes().iter().map(usize::to_string).collect();
    println!(
        "k={} sizes={} converged={} sweeps={}",
        part.k(),
        sizes.join(","),
        outcome.converged,
        outcome.sweeps
    );
    Ok(())
}

fn setting_json<C: std::fmt::Display>(s: &Setting<C>) -> serde_json::Value {
    json!({
        "alpha": s.alpha,
        "beta": s.beta,
        "pct_initial_believers": s.pct_initial_believers,
        "scholar_community": s.scholar_community.to_string(),
        "pv_scholar": s.pv_scholar,
        "pf_scholar": s.pf_scholar,
        "pv_influencer": s.pv_influencer,
        "pf_influencer": s.pf_influencer,
        "pct_b_bot": s.pct_b_bot,
        "pct_f_bot": s.pct_f_bot,
    })
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let net = load_graph(&args.graph)?;
    let requested = args.model.setting();
    let part = match &args.partition {
        Some(path) => load_partition_file(path, &net)?,
        None if requested.scholar_community == ScholarChoice::None => Partition::trivial(net.node_count()),
        None => bail!("--scholar-community {} needs --partition", requested.scholar_community),
    };
    let setting = requested.resolve(&part)?;
    let trajectory = run_setting(&net, &part, &setting, 0, args.ticks, args.seed)?;

    let mut outputs = Outputs::new();
    outputs.write(&args.out, |sink| {
        writeln!(sink, "{}", hoaxnet::model::TRAJECTORY_HEADER)?;
        write_trajectory_rows(&trajectory, 0, 0, sink)?;
        Ok(())
    })?;
    let meta = json!({
        "command": "simulate",
        "graph": path_str(&args.graph),
        "partition": args.partition.as_deref().map(path_str),
        "seed": args.seed,
        "ticks": args.ticks,
        "parameters": setting_json(&requested),
        "scholar_community_resolved": community_label(setting.scholar_community),
    });
    outputs.write(&meta_path(&args.out), |sink| write_json(sink, &meta))?;
    outputs.commit();
    let last = trajectory.last().overall;
    println!("tick={} S={} B={} F={}", args.ticks, last[0], last[1], last[2]);
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let run = &args.run;
    let text = fs::read_to_string(&run.spec).with_context(|| format!("reading {}", run.spec.display()))?;
    let mut spec = parse_sweep_spec(&text).with_context(|| format!("in spec {}", run.spec.display()))?;
    if let Some(seed) = run.seed {
        spec.base_seed = seed;
    }
    if let Some(r) = run.replicates {
        spec.replicates = r;
    }
    if let Some(t) = run.ticks {
        spec.ticks = t;
    }
    spec.validate()?;
    let net = load_graph(&run.graph)?;
    let part = load_partition_file(&run.partition, &net)?;

    let started = Instant::now();
    let options = SweepOptions {
        jobs: run.jobs,
        keep_series: args.keep_series,
    };
    let results = run_sweep(&spec, &net, &part, options)?;
    let summaries = aggregate(&results)?;
    eprintln!("{} runs in {:.1?}", results.len(), started.elapsed());

    let mut outputs = Outputs::new();
    outputs.directory(&run.out)?;
    outputs.write(&run.out.join("results.csv"), |sink| Ok(write_results(&results, sink)?))?;
    outputs.write(&run.out.join("summary.csv"), |sink| {
        Ok(write_summary(&summaries, sink)?)
    })?;
    if args.keep_series {
        outputs.write(&run.out.join("series.csv"), |sink| {
            writeln!(sink, "{}", hoaxnet::model::TRAJECTORY_HEADER)?;
            for r in &results {
                let t = r.trajectory.as_ref().expect("series kept");
                write_trajectory_rows(t, r.setting_id as u64, r.replicate, sink)?;
            }
            Ok(())
        })?;
    }
    if run.emit_plot_data {
        let pairs = sensitivity_pairs(&summaries);
        outputs.write(&run.out.join("fig4_sensitivity.csv"), |sink| {
            Ok(write_sensitivity_pairs(&pairs, sink)?)
        })?;
        let rows = scholar_rows(&summaries, &part);
        outputs.write(&run.out.join("fig5_scholar.csv"), |sink| {
            Ok(write_scholar_rows(&rows, sink)?)
        })?;
        let cells = bot_grid(&summaries);
        outputs.write(&run.out.join("fig6_bots.csv"), |sink| Ok(write_bot_grid(&cells, sink)?))?;
    }
    let meta = json!({
        "command": "sweep",
        "graph": path_str(&run.graph),
        "partition": path_str(&run.partition),
        "spec": path_str(&run.spec),
        "base_seed": spec.base_seed,
        "seed_derivation": "derive_seed(base_seed, setting_id, replicate); per-run seeds are in results.csv",
        "class_assignment": "bots and initial believers re-drawn for every run from its seed",
        "replicates": spec.replicates,
        "ticks": spec.ticks,
        "settings": spec.setting_count(),
        "runs": results.len(),
    });
    outputs.write(&run.out.join("meta.json"), |sink| write_json(sink, &meta))?;
    let written = outputs.commit();
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn aggregate_file(input: &Path, out: &Path) -> Result<()> {
    let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let results = read_results(BufReader::new(file)).with_context(|| format!("reading {}", input.display()))?;
    let summaries = aggregate(&results)?;
    let mut outputs = Outputs::new();
    outputs.write(out, |sink| Ok(write_summary(&summaries, sink)?))?;
    outputs.commit();
    println!("settings={} runs={}", summaries.len(), results.len());
    Ok(())
}

fn scenarios(args: &ScenarioArgs) -> Result<()> {
    let run = &args.run;
    let text = fs::read_to_string(&run.spec).with_context(|| format!("reading {}", run.spec.display()))?;
    let mut set = parse_scenarios(&text).with_context(|| format!("in scenario file {}", run.spec.display()))?;
    if let Some(seed) = run.seed {
        set.base_seed = seed;
    }
    if let Some(r) = run.replicates {
        set.replicates = r;
    }
    if let Some(t) = run.ticks {
        set.ticks = t;
    }
    if set.replicates == 0 || set.replicates >= experiment::MAX_REPLICATES {
        bail!(experiment::ExperimentError::BadReplicates(set.replicates));
    }
    let net = load_graph(&run.graph)?;
    let part = load_partition_file(&run.partition, &net)?;
    let rows = scenario_compare(&set, &net, &part, run.jobs)?;

    let mut outputs = Outputs::new();
    outputs.directory(&run.out)?;
    outputs.write(&run.out.join("comparison.csv"), |sink| {
        Ok(write_comparison(&rows, sink)?)
    })?;
    if run.emit_plot_data {
        outputs.write(&run.out.join("fig7_series.csv"), |sink| {
            Ok(write_scenario_series(&rows, sink)?)
        })?;
    }
    let meta = json!({
        "command": "scenarios",
        "graph": path_str(&run.graph),
        "partition": path_str(&run.partition),
        "spec": path_str(&run.spec),
        "base_seed": set.base_seed,
        "seed_derivation": "replicate r of every scenario runs with derive_seed(base_seed, 0, r)",
        "class_assignment": "bots and initial believers re-drawn for every run from its seed",
        "replicates": set.replicates,
        "ticks": set.ticks,
        "scenarios": set.scenarios.iter().map(|s| json!({"name": s.name, "parameters": setting_json(&s.setting)})).collect::<Vec<_>>(),
    });
    outputs.write(&run.out.join("meta.json"), |sink| write_json(sink, &meta))?;
    outputs.commit();
    for row in &rows {
        println!(
            "{}: S={:.1}% B={:.1}% F={:.1}% rank={}",
            row.name,
            100.0 * row.share[0],
            100.0 * row.share[1],
            100.0 * row.share[2],
            row.believer_rank
        );
    }
    Ok(())
}

/// Runs one parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { graph } => validate(&graph),
        Command::Cluster(args) => cluster(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Aggregate { input, out } => aggregate_file(&input, &out),
        Command::Scenarios(args) => scenarios(&args),
    }
}
