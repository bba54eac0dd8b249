//! File formats: grid and region CSV exports, event and stats tables, set
//! documents.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use roa_core::learner::LogEntry;
use roa_core::{GridClassification, GridSpec, Label, MultiApprox, Region, RunStats, SetDocument, Verdict};
use serde::Serialize;

fn coord_header(dim: usize) -> impl Iterator<Item = String> {
    (1..=dim).map(|i| format!("x{i}"))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn grid_comment(spec: &GridSpec) -> String {
    let bounds: Vec<String> = spec.bounds.iter().map(|[lo, hi]| format!("{lo}:{hi}")).collect();
    format!(
        "# bounds={} resolution={} horizon={} tol={}",
        bounds.join(","),
        spec.resolution,
        spec.horizon,
        spec.tol
    )
}

fn parse_grid_comment(line: &str) -> anyhow::Result<GridSpec> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| anyhow!("grid file must start with a `# bounds=...` line"))?;
    let (mut bounds, mut resolution, mut horizon, mut tol) = (None, None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| anyhow!("malformed grid header field `{field}`"))?;
        match key {
            "bounds" => {
                let axes = value
                    .split(',')
                    .map(|ax| {
                        let (lo, hi) = ax
                            .split_once(':')
                            .ok_or_else(|| anyhow!("malformed bounds `{ax}`"))?;
                        Ok([lo.parse()?, hi.parse()?])
                    })
                    .collect::<anyhow::Result<Vec<[f64; 2]>>>()?;
                bounds = Some(axes);
            }
            "resolution" => resolution = Some(value.parse()?),
            "horizon" => horizon = Some(value.parse()?),
            "tol" => tol = Some(value.parse()?),
            _ => bail!("unknown grid header field `{key}`"),
        }
    }
    let missing = |name| anyhow!("grid header lacks `{name}`");
    Ok(GridSpec {
        bounds: bounds.ok_or_else(|| missing("bounds"))?,
        resolution: resolution.ok_or_else(|| missing("resolution"))?,
        horizon: horizon.ok_or_else(|| missing("horizon"))?,
        tol: tol.ok_or_else(|| missing("tol"))?,
    })
}

/// `grid.csv`: a `# bounds=lo:hi,... resolution=N horizon=T tol=r` line, then
/// `x1,...,xd,label` rows in grid order.
pub fn write_grid(path: &Path, grid: &GridClassification) -> anyhow::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", grid_comment(&grid.spec))?;
    let mut csv = csv::Writer::from_writer(w);
    let dim = grid.spec.dim();
    csv.write_record(coord_header(dim).chain(["label".to_string()]))?;
    for (p, label) in grid.points.iter().zip(&grid.labels) {
        let mut row: Vec<String> = p.iter().map(f64::to_string).collect();
        row.push(label.as_str().to_string());
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_grid(path: &Path) -> anyhow::Result<GridClassification> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read grid {}", path.display()))?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let spec = parse_grid_comment(first.trim_end())
        .with_context(|| format!("bad grid header in {}", path.display()))?;
    spec.validate()?;
    let dim = spec.dim();
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let mut points = Vec::with_capacity(spec.len());
    let mut labels = Vec::with_capacity(spec.len());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != dim + 1 {
            bail!("grid row {} has {} fields, expected {}", i + 1, record.len(), dim + 1);
        }
        let p = record
            .iter()
            .take(dim)
            .map(str::parse)
            .collect::<Result<Vec<f64>, _>>()
            .with_context(|| format!("grid row {}", i + 1))?;
        let label = Label::parse(&record[dim])
            .ok_or_else(|| anyhow!("grid row {}: unknown label `{}`", i + 1, &record[dim]))?;
        points.push(p);
        labels.push(label);
    }
    if points.len() != spec.len() {
        bail!("grid has {} rows, header implies {}", points.len(), spec.len());
    }
    Ok(GridClassification { spec, points, labels })
}

/// `region.csv`: `x1,...,xd,inside` over the grid nodes, `inside` being 1 when
/// the node lies in the set.
pub fn write_region(path: &Path, spec: &GridSpec, set: &MultiApprox) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(create(path)?);
    csv.write_record(coord_header(spec.dim()).chain(["inside".to_string()]))?;
    for p in spec.points() {
        let inside = !set.is_failed() && set.contains(&p);
        let mut row: Vec<String> = p.iter().map(f64::to_string).collect();
        row.push(if inside { "1" } else { "0" }.to_string());
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

/// `events.csv`: one row per counter-example.
pub fn write_events(path: &Path, dim: usize, log: &[LogEntry]) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(create(path)?);
    let header = ["sample", "phase", "k", "snapshot", "verdict", "diverged_at"]
        .into_iter()
        .map(String::from)
        .chain(coord_header(dim))
        .chain(["members_changed".to_string(), "members_failed".to_string()]);
    csv.write_record(header)?;
    for e in log {
        let (verdict, at) = match e.verdict {
            Verdict::Diverged(n) => ("diverged", n.to_string()),
            Verdict::CounterExample => ("counter_example", String::new()),
            Verdict::Recurrent(n) => ("recurrent", n.to_string()),
        };
        let mut row = vec![
            e.sample.to_string(),
            e.phase.to_string(),
            e.k.to_string(),
            e.snapshot.to_string(),
            verdict.to_string(),
            at,
        ];
        row.extend(e.point.iter().map(f64::to_string));
        row.push(e.changes.len().to_string());
        row.push(e.changes.iter().filter(|c| c.failed).count().to_string());
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

const STATS_COLUMNS: [&str; 7] = [
    "counter_examples",
    "samples",
    "steps_simulated",
    "avg_steps_per_sample",
    "k_doublings",
    "final_k",
    "outcome",
];

fn stats_values(stats: &RunStats, outcome: &str) -> [String; 7] {
    [
        stats.counter_examples.to_string(),
        stats.samples.to_string(),
        stats.steps_simulated.to_string(),
        format!("{:.4}", stats.avg_steps_per_sample),
        stats.k_doublings.to_string(),
        stats.final_k.to_string(),
        outcome.to_string(),
    ]
}

/// `stats.csv`: a header and one data row.
pub fn write_stats_csv(path: &Path, stats: &RunStats, outcome: &str) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(create(path)?);
    csv.write_record(STATS_COLUMNS)?;
    csv.write_record(stats_values(stats, outcome))?;
    csv.flush()?;
    Ok(())
}

pub fn stats_table(stats: &RunStats, outcome: &str) -> String {
    let labels = [
        "# counter-examples",
        "# samples",
        "# steps simulated",
        "avg. steps per sample",
        "k doublings",
        "final k",
        "outcome",
    ];
    let values = stats_values(stats, outcome);
    let width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    labels
        .iter()
        .zip(values)
        .map(|(l, v)| format!("{l:<width$}  {v}\n"))
        .collect()
}

/// Accepts either a bare set document or a learn result holding one under
/// `final_set`. Returns the document and, for results, the final `k`.
pub fn read_set(path: &Path) -> anyhow::Result<(SetDocument, Option<usize>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read set {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    let final_k = value
        .pointer("/stats/final_k")
        .and_then(serde_json::Value::as_u64)
        .map(|k| k as usize);
    if let Some(inner) = value.get_mut("final_set") {
        value = inner.take();
    }
    let doc = serde_json::from_value(value)
        .with_context(|| format!("{} does not hold a set document", path.display()))?;
    Ok((doc, final_k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_header_round_trip() {
        let spec = GridSpec {
            bounds: vec![[-4.0, 4.0], [-0.5, 2.25]],
            resolution: 7,
            horizon: 30.0,
            tol: 0.05,
        };
        assert_eq!(parse_grid_comment(&grid_comment(&spec)).unwrap(), spec);
        assert!(parse_grid_comment("bounds=0:1").is_err());
        assert!(parse_grid_comment("# bounds=0:1 resolution=3 tol=0.1").is_err());
    }

    #[test]
    fn grid_file_round_trip() {
        let spec = GridSpec {
            bounds: vec![[-1.0, 1.0], [-1.0, 1.0]],
            resolution: 3,
            horizon: 5.0,
            tol: 0.1,
        };
        let grid = GridClassification {
            points: spec.points(),
            labels: (0..9)
                .map(|i| if i % 2 == 0 { Label::InRoa } else { Label::NotInRoa })
                .collect(),
            spec,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        write_grid(&path, &grid).unwrap();
        assert_eq!(read_grid(&path).unwrap(), grid);
    }
}
