//! k-nearest neighbours over a range of k. Neighbour lists are computed
//! once at the largest k and every smaller k votes over a prefix.

use sfcrime::classifiers::{KnnModel, KnnParams};
use sfcrime::experiment::CachedDataset;
use sfcrime::features::{train_test_split, Standardizer};
use sfcrime::ingest::Dataset;
use sfcrime::metrics::EvaluationReport;
use sfcrime::synth::SyntheticSf;

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(3).generate(30_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    let split = train_test_split(&data.matrix, 0.25, 42)?;

    let ks = [5, 30, 50, 100, 200, 500];
    for zscore in [false, true] {
        let (train, test) = if zscore {
            let s = Standardizer::fit(&split.train)?;
            (s.transform(&split.train)?, s.transform(&split.test)?)
        } else {
            (split.train.clone(), split.test.clone())
        };
        let model = KnnModel::fit(&train, &KnnParams::default())?;
        let lists = model.neighbor_lists(&test, *ks.last().unwrap())?;
        println!("\n{}", if zscore { "standardized features" } else { "raw features" });
        for k in ks {
            let probs: Vec<Vec<f64>> = lists.iter().map(|l| model.vote(l, k)).collect();
            let r = EvaluationReport::from_probabilities(test.labels(), &probs, test.n_classes())?;
            println!("  k={k:<4} accuracy {:6.2}%  log loss {:.3}", 100.0 * r.accuracy, r.log_loss);
        }
    }
    Ok(())
}
