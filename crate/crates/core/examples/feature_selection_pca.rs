//! ANOVA F-scores, percentile selection and PCA on the feature matrix.

use sfcrime::experiment::{run_cell, CachedDataset, ExperimentConfig};
use sfcrime::features::{anova_f_scores, pca_fit, select_percentile, Standardizer};
use sfcrime::ingest::Dataset;
use sfcrime::synth::SyntheticSf;

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(6).generate(30_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    let m = &data.matrix;

    let scores = anova_f_scores(m)?;
    println!("ANOVA F-scores:");
    for (name, s) in m.column_names().iter().zip(&scores) {
        println!("  {name:<11} {s:>12.2}");
    }
    let sel = select_percentile(&scores, 50)?;
    let kept: Vec<&str> = sel.selected.iter().map(|&j| m.column_names()[j].as_str()).collect();
    println!("top 50%: {kept:?}");

    let z = Standardizer::fit(m)?.transform(m)?;
    let pca = pca_fit(&z, m.n_features())?;
    let total: f64 = pca.explained_variance.iter().sum();
    println!("\nexplained variance ratio (standardized):");
    let mut cum = 0.0;
    for (i, v) in pca.explained_variance.iter().enumerate() {
        cum += v / total;
        println!("  pc{:<2} {:6.3}  cumulative {:6.3}", i + 1, v / total, cum);
    }

    println!("\ndecision tree with transforms:");
    for (label, pct, comps) in [("all features", None, None), ("top 60%", Some(60), None), ("6 components", None, Some(6))] {
        let mut cfg = ExperimentConfig::from_toml("[model]\nkind = \"decision_tree\"\ncriterion = \"entropy\"\nmin_samples_split = 300\n")?;
        cfg.features.zscore = true;
        cfg.features.select_percentile = pct;
        cfg.features.pca_components = comps;
        let o = run_cell(&cfg, &data)?;
        println!(
            "  {label:<13} accuracy {:6.2}%  log loss {:.3}  columns {:?}",
            o.record.accuracy_pct(),
            o.record.log_loss,
            o.record.feature_columns
        );
    }
    Ok(())
}
