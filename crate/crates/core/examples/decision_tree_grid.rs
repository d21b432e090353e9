//! Sweep `min_samples_split` for both impurity criteria and watch the
//! accuracy / log loss trade-off.

use sfcrime::classifiers::{fit_decision_tree, Criterion, DecisionTreeParams};
use sfcrime::experiment::CachedDataset;
use sfcrime::features::train_test_split;
use sfcrime::ingest::Dataset;
use sfcrime::metrics::EvaluationReport;
use sfcrime::synth::SyntheticSf;

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(2).generate(40_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    let split = train_test_split(&data.matrix, 0.25, 42)?;

    println!("{:<8} {:>6} {:>9} {:>9} {:>7}", "criterion", "split", "accuracy", "log loss", "leaves");
    for criterion in [Criterion::Gini, Criterion::Entropy] {
        for min_samples_split in [50, 100, 300, 500] {
            let params = DecisionTreeParams {
                criterion,
                min_samples_split,
                ..Default::default()
            };
            let model = fit_decision_tree(&split.train, &params)?;
            let probs = model.predict_proba(&split.test)?;
            let r = EvaluationReport::from_probabilities(split.test.labels(), &probs, data.matrix.n_classes())?;
            let leaves = match &model {
                sfcrime::classifiers::TrainedModel::DecisionTree(t) => t.n_leaves(),
                _ => unreachable!(),
            };
            println!(
                "{:<9} {:>6} {:>8.2}% {:>9.3} {:>7}",
                criterion.to_string(),
                min_samples_split,
                100.0 * r.accuracy,
                r.log_loss,
                leaves
            );
        }
    }
    Ok(())
}
