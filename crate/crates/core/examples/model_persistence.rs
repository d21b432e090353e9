//! Save a fitted model to JSON, load it back and check the predictions
//! match.

use sfcrime::classifiers::{AdaboostParams, ModelSpec, TrainedModel};
use sfcrime::experiment::CachedDataset;
use sfcrime::features::train_test_split;
use sfcrime::ingest::Dataset;
use sfcrime::synth::SyntheticSf;

fn main() -> sfcrime::Result<()> {
    let ds = Dataset::from_raw(SyntheticSf::new(9).generate(10_000), false)?;
    let data = CachedDataset::from_dataset(&ds)?;
    let split = train_test_split(&data.matrix, 0.25, 1)?;

    let spec = ModelSpec::Adaboost(AdaboostParams {
        n_estimators: 20,
        ..Default::default()
    });
    let model = spec.fit(&split.train)?;
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("adaboost.model.json");
    model.save(&path)?;
    let size = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);

    let loaded = TrainedModel::load(&path)?;
    let same = model.predict_proba(&split.test)? == loaded.predict_proba(&split.test)?;
    println!(
        "{} model, {} features, {} classes, {size} bytes on disk, identical predictions: {same}",
        loaded.variant(),
        loaded.n_features(),
        loaded.n_classes()
    );
    Ok(())
}
