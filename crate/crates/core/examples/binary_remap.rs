//! Collapse the categories into frequent vs rare and fit a forest on the
//! two-class problem.

use sfcrime::experiment::{grid_forest, run_cell, CachedDataset, ExperimentConfig};
use sfcrime::ingest::{remap_binary, Dataset, FREQUENT};
use sfcrime::metrics::majority_baseline;
use sfcrime::synth::SyntheticSf;

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(8).generate(60_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    // the synthetic sample is smaller than the full export, so scale the cut
    let threshold = 10_000 * 60_000 / 878_049;

    let labels = remap_binary(data.matrix.labels(), &data.frequencies, threshold)?;
    let frequent = labels.iter().filter(|&&l| l == FREQUENT).count();
    let n_frequent_classes = data.frequencies.counts().iter().filter(|&&c| c >= threshold).count();
    println!(
        "threshold {threshold}: {n_frequent_classes} frequent categories covering {:.1}% of rows",
        100.0 * frequent as f64 / labels.len() as f64
    );
    let binary_freq = sfcrime::ingest::ClassFrequencyTable::from_labels(&labels, 2)?;
    let (acc, ll) = majority_baseline(&binary_freq)?;
    println!("majority baseline: accuracy {:.2}%, prior log loss {ll:.3}", 100.0 * acc);

    let mut cfg = ExperimentConfig::new("binary", grid_forest(50));
    cfg.binary_threshold = Some(threshold);
    let o = run_cell(&cfg, &data)?;
    println!(
        "forest: accuracy {:.2}%  log loss {:.3}  recall rare {:.3} frequent {:.3}",
        o.record.accuracy_pct(),
        o.record.log_loss,
        o.record.evaluation.per_class_recall[0].unwrap_or(f64::NAN),
        o.record.evaluation.per_class_recall[1].unwrap_or(f64::NAN)
    );
    Ok(())
}
