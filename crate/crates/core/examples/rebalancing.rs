//! SMOTE, random undersampling and edited nearest neighbours on the
//! training rows, and what happens when resampling runs before the split.

use sfcrime::experiment::{rebalance_forest, run_cell, CachedDataset, ExperimentConfig, ResampleSpec};
use sfcrime::features::{train_test_split, Standardizer};
use sfcrime::ingest::Dataset;
use sfcrime::resampling::{resample, ResampleConfig, ResampleMethod};
use sfcrime::synth::SyntheticSf;

fn summary(counts: &[usize]) -> String {
    let nonzero: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    format!(
        "{} rows, largest class {}, smallest class {}",
        nonzero.iter().sum::<usize>(),
        nonzero.iter().max().unwrap(),
        nonzero.iter().min().unwrap()
    )
}

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(5).generate(12_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    let split = train_test_split(&data.matrix, 0.25, 42)?;
    let s = Standardizer::fit(&split.train)?;
    let train = s.transform(&split.train)?;

    println!("train:        {}", summary(&train.class_counts()));
    for method in [ResampleMethod::Smote, ResampleMethod::RandomUnder, ResampleMethod::Enn] {
        let out = resample(&train, &ResampleConfig::new(method))?;
        println!("{:<13} {}", format!("{method}:"), summary(&out.class_counts()));
    }

    println!("\nforest on resampled data, honest split vs resample-then-split:");
    for method in [ResampleMethod::Smote, ResampleMethod::RandomUnder] {
        for before_split in [false, true] {
            let mut cfg = ExperimentConfig::new("rebalance", rebalance_forest(30));
            cfg.features.zscore = true;
            cfg.resample = Some(ResampleSpec {
                method,
                k: None,
                before_split,
            });
            let o = run_cell(&cfg, &data)?;
            println!(
                "  {:<13} {:<13} accuracy {:6.2}%  log loss {:.3}{}",
                method.to_string(),
                if before_split { "before split" } else { "after split" },
                o.record.accuracy_pct(),
                o.record.log_loss,
                o.record
                    .leakage
                    .map(|l| format!("  ({} synthetic test rows)", l.synthetic_test_rows))
                    .unwrap_or_default()
            );
        }
    }
    Ok(())
}
