//! One experiment cell described in TOML, run twice to show that the
//! report is byte-for-byte reproducible.

use sfcrime::experiment::{ingest_to_cache, report_path, run_experiment, ExperimentConfig};
use sfcrime::ingest::IngestOptions;
use sfcrime::synth::{self, SyntheticSf};

const CONFIG: &str = r#"
name = "knn_zscore"
seed = 11
subsample = 8000

[features]
zscore = true
select_percentile = 80

[model]
kind = "knn"
n_neighbors = 50
"#;

fn main() -> sfcrime::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let csv = dir.path().join("incidents.csv");
    synth::write_csv(&csv, &SyntheticSf::new(11).generate(20_000))?;

    let mut cfg = ExperimentConfig::from_toml(CONFIG)?;
    cfg.cache = dir.path().join("cache");
    cfg.out = dir.path().join("out");
    ingest_to_cache(&csv, &cfg.cache, IngestOptions::default())?;

    let first = run_experiment(&cfg)?;
    let bytes = std::fs::read(report_path(&cfg.out, &cfg.name)).expect("report");
    run_experiment(&cfg)?;
    let again = std::fs::read(report_path(&cfg.out, &cfg.name)).expect("report");

    println!(
        "{}: accuracy {:.2}%  log loss {:.4} nats  columns {:?}",
        first.record.name,
        first.record.accuracy_pct(),
        first.record.log_loss,
        first.record.feature_columns
    );
    for (stage, secs) in &first.timing.stages {
        println!("  {stage:<10} {secs:.3}s");
    }
    println!("identical report on rerun: {}", bytes == again);
    Ok(())
}
