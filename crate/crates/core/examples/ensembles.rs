//! Random forest and SAMME AdaBoost at several ensemble sizes, plus the
//! per-round boosting error trace.

use sfcrime::classifiers::{
    fit_adaboost, fit_random_forest, AdaBoost, AdaboostParams, Criterion, DecisionTreeParams, ForestParams,
};
use sfcrime::experiment::CachedDataset;
use sfcrime::features::train_test_split;
use sfcrime::ingest::Dataset;
use sfcrime::metrics::EvaluationReport;
use sfcrime::synth::SyntheticSf;

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(4).generate(30_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    let split = train_test_split(&data.matrix, 0.25, 42)?;
    let k = data.matrix.n_classes();

    for n_estimators in [10, 50, 100] {
        let forest = fit_random_forest(
            &split.train,
            &ForestParams {
                n_estimators,
                tree: DecisionTreeParams {
                    criterion: Criterion::Entropy,
                    min_samples_split: 300,
                    ..Default::default()
                },
                seed: 7,
                ..Default::default()
            },
        )?;
        let boost = fit_adaboost(
            &split.train,
            &AdaboostParams {
                n_estimators,
                seed: 7,
                ..Default::default()
            },
        )?;
        for (name, model) in [("forest", forest), ("adaboost", boost)] {
            let r = EvaluationReport::from_probabilities(split.test.labels(), &model.predict_proba(&split.test)?, k)?;
            println!(
                "{name:<8} n={n_estimators:<4} accuracy {:6.2}%  log loss {:.3}",
                100.0 * r.accuracy,
                r.log_loss
            );
        }
    }

    println!("\nboosting rounds:");
    let mut max_weight = Vec::new();
    let model = AdaBoost::fit_observed(&split.train, &AdaboostParams::default(), |_, w| {
        max_weight.push(w.iter().cloned().fold(0.0, f64::max));
    })?;
    for (i, (round, w)) in model.rounds.iter().zip(&max_weight).enumerate().take(10) {
        println!(
            "  round {:>2}: weighted error {:.4}  alpha {:.4}  largest sample weight {:.2e}",
            i + 1,
            round.weighted_error,
            round.alpha,
            w
        );
    }
    Ok(())
}
