//! Run part of the comparison grid on a synthetic cache and print the
//! resulting table. A second run skips every finished cell.

use sfcrime::experiment::{ingest_to_cache, reproduce, CachedDataset, ExperimentConfig, GridSpec};
use sfcrime::ingest::IngestOptions;
use sfcrime::synth::{self, SyntheticSf};

fn main() -> sfcrime::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let csv = dir.path().join("incidents.csv");
    synth::write_csv(&csv, &SyntheticSf::new(10).generate(20_000))?;
    let cache = dir.path().join("cache");
    ingest_to_cache(&csv, &cache, IngestOptions::default())?;

    let mut base = ExperimentConfig::from_toml("")?;
    base.cache = cache;
    base.out = dir.path().join("out");
    let grid = GridSpec::published(&base).only_tables(&["decision_tree".into(), "random_forest".into()])?;
    let data = CachedDataset::load(&base.cache)?;

    let first = reproduce(&grid, &data, &base.out)?;
    println!("first run: fitted {}, skipped {}", first.fitted.len(), first.skipped.len());
    let second = reproduce(&grid, &data, &base.out)?;
    println!("second run: fitted {}, skipped {}\n", second.fitted.len(), second.skipped.len());

    for t in &second.tables {
        println!("{}", std::fs::read_to_string(t).expect("table"));
    }
    print!("{}", std::fs::read_to_string(&second.notes).expect("notes"));
    Ok(())
}
