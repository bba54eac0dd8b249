use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use roa_core::learner::LogEntry;
use roa_core::rng::{stream, Stream};
use roa_core::{
    compare, grid_classify, learn, learn_with, verify_recurrence, CompareMetrics, GridClassification,
    GroundTruthStop, Label, Outcome, RunStats, SetDocument,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::io;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
/// `learn` gave up after all doublings, or `verify` found violations.
pub const EXIT_NEGATIVE: u8 = 2;

/// Everything a learn run produced, except timing.
#[derive(Serialize)]
struct ResultDocument<'a> {
    version: &'static str,
    config: &'a RunConfig,
    outcome: Outcome,
    stats: &'a RunStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<CompareMetrics>,
    initial_set: SetDocument,
    final_set: SetDocument,
    event_log: &'a [LogEntry],
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Converged => "converged",
        Outcome::FailedAllDoublings => "failed_all_doublings",
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn load(config: &Path, seed: Option<u64>) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(seed) = seed {
        cfg.learner.seed = seed;
    }
    Ok(cfg)
}

fn prepare_out(cfg: &RunConfig, out: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir)
}

pub fn learn_cmd(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> anyhow::Result<u8> {
    let started = unix_now();
    let cfg = load(config, seed)?;
    let dir = prepare_out(&cfg, out)?;
    let field = cfg.field()?;
    let lcfg = cfg.learner_config();
    let integrator = cfg.integrator();

    let grid: Option<GridClassification> = if cfg.stop.ground_truth || cfg.output.grid {
        Some(grid_classify(&field, &cfg.grid, &integrator)?)
    } else {
        None
    };

    let run = match (&grid, cfg.stop.ground_truth) {
        (Some(g), true) => {
            let mut stop = GroundTruthStop::new(g, cfg.stop.max_extensions);
            learn_with(&lcfg, &field, |e| stop.observe(e))?
        }
        _ => learn(&lcfg, &field)?,
    };
    let comparison = grid.as_ref().map(|g| compare(&run.final_set, g)).transpose()?;
    let outcome = outcome_str(run.outcome);

    let doc = |s| SetDocument::new(s, lcfg.epsilon, lcfg.seed);
    let result = ResultDocument {
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        outcome: run.outcome,
        stats: &run.stats,
        comparison,
        initial_set: doc(&run.initial_set),
        final_set: doc(&run.final_set),
        event_log: &run.event_log,
    };
    io::write_json(&dir.join("result.json"), &result)?;
    io::write_json(&dir.join("set.json"), &result.final_set)?;
    let table = io::stats_table(&run.stats, outcome);
    std::fs::write(dir.join("stats.txt"), &table)?;
    io::write_stats_csv(&dir.join("stats.csv"), &run.stats, outcome)?;
    if cfg.output.events {
        io::write_events(&dir.join("events.csv"), field.dim(), &run.event_log)?;
    }
    if cfg.output.region {
        io::write_region(&dir.join("region.csv"), &cfg.grid, &run.final_set)?;
    }
    if let (Some(g), true) = (&grid, cfg.output.grid) {
        io::write_grid(&dir.join("grid.csv"), g)?;
    }

    let mut log = String::new();
    writeln!(log, "config={}", config.display())?;
    writeln!(log, "out={}", dir.display())?;
    writeln!(log, "started_unix={started}")?;
    writeln!(log, "finished_unix={}", unix_now())?;
    writeln!(log, "wall_time_s={:.3}", run.stats.wall_time)?;
    writeln!(log, "threads={}", rayon::current_num_threads())?;
    std::fs::write(dir.join("run.log"), log)?;

    print!("{table}");
    if let Some(m) = comparison {
        println!("false_inclusions={}", m.false_inclusions);
        println!("coverage={:.4}", m.coverage);
    }
    Ok(match run.outcome {
        Outcome::Converged => EXIT_OK,
        Outcome::FailedAllDoublings => EXIT_NEGATIVE,
    })
}

pub fn grid_cmd(config: &Path, out: Option<PathBuf>) -> anyhow::Result<u8> {
    let cfg = load(config, None)?;
    let dir = prepare_out(&cfg, out)?;
    let grid = grid_classify(&cfg.field()?, &cfg.grid, &cfg.integrator())?;
    let path = dir.join("grid.csv");
    io::write_grid(&path, &grid)?;
    println!("in_roa={}", grid.count(Label::InRoa));
    println!("not_in_roa={}", grid.count(Label::NotInRoa));
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

pub fn verify_cmd(
    set: &Path,
    config: &Path,
    k: Option<usize>,
    seed: Option<u64>,
) -> anyhow::Result<u8> {
    let cfg = load(config, seed)?;
    let field = cfg.field()?;
    let (doc, result_k) = io::read_set(set)?;
    let approx = doc.to_approx()?;
    let k = k.or(result_k).unwrap_or(cfg.learner.k);
    let mut rng = stream(cfg.learner.seed, Stream::Verify);
    let report = verify_recurrence(
        &approx,
        &field,
        k,
        &cfg.integrator(),
        cfg.verify.n_probe,
        &mut rng,
    )?;
    println!("k={k}");
    println!("probes={}", report.probes);
    println!("violations={}", report.violations);
    if let Some(p) = &report.worst_point {
        let coords: Vec<String> = p.iter().map(f64::to_string).collect();
        println!("worst_point={}", coords.join(","));
    }
    Ok(if report.violations == 0 {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

pub fn compare_cmd(set: &Path, grid: &Path) -> anyhow::Result<u8> {
    let (doc, _) = io::read_set(set)?;
    let approx = doc.to_approx()?;
    let grid = io::read_grid(grid)?;
    let m = compare(&approx, &grid)?;
    println!("false_inclusions={}", m.false_inclusions);
    println!("coverage={:.4}", m.coverage);
    println!("in_roa={}", m.in_roa);
    println!("contained={}", m.contained);
    Ok(EXIT_OK)
}
