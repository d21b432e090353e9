use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfcrime::classifiers::{
    argmax, weighted_error, AdaboostParams, Criterion, DecisionTreeParams, ForestParams, KnnParams, ModelSpec,
    TrainedModel,
};
use sfcrime::experiment::{
    explore, ingest_to_cache, read_record, report_path, reproduce, run_cell, run_experiment, CachedDataset,
    ExperimentConfig, GridSpec, ResampleSpec, ENCODERS_FILE, FEATURES_FILE, FREQUENCIES_FILE,
};
use sfcrime::features::{train_test_split, FeatureMatrix};
use sfcrime::ingest::{Axis, Dataset, IngestOptions};
use sfcrime::resampling::ResampleMethod;
use sfcrime::synth::{self, SyntheticSf};
use sfcrime::Error;

fn synthetic_cache(dir: &Path, rows: usize, seed: u64) -> PathBuf {
    let csv = dir.join("incidents.csv");
    synth::write_csv(&csv, &SyntheticSf::new(seed).generate(rows)).unwrap();
    let cache = dir.join("cache");
    ingest_to_cache(&csv, &cache, IngestOptions::default()).unwrap();
    cache
}

fn small_data(rows: usize, seed: u64) -> CachedDataset {
    let ds = Dataset::from_raw(SyntheticSf::new(seed).generate(rows), false).unwrap();
    CachedDataset::from_dataset(&ds).unwrap()
}

fn tree(criterion: Criterion, min_samples_split: usize) -> ModelSpec {
    ModelSpec::DecisionTree(DecisionTreeParams {
        criterion,
        min_samples_split,
        ..Default::default()
    })
}

#[test]
fn ingest_writes_identical_cache_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("incidents.csv");
    synth::write_csv(&csv, &SyntheticSf::new(3).generate(5_000)).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let sa = ingest_to_cache(&csv, &a, IngestOptions::default()).unwrap();
    ingest_to_cache(&csv, &b, IngestOptions::default()).unwrap();
    assert_eq!(sa.rows_read, 5_000);
    for f in [FEATURES_FILE, ENCODERS_FILE, FREQUENCIES_FILE] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn missing_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("no_y.csv");
    fs::write(
        &csv,
        "Dates,Category,Descript,DayOfWeek,PdDistrict,Resolution,Address,X\n\
         2015-05-13 23:53:00,WARRANTS,WARRANT ARREST,Wednesday,NORTHERN,\"ARREST, BOOKED\",OAK ST / LAGUNA ST,-122.4258\n",
    )
    .unwrap();
    match Dataset::load_csv(&csv, IngestOptions::default()) {
        Err(Error::Schema { missing, .. }) => assert_eq!(missing, vec!["Y".to_string()]),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn explore_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_data(6_000, 4);
    let hs = explore(&data, &Axis::ALL, dir.path(), true).unwrap();
    let by_axis = |a: Axis| hs.iter().find(|h| h.axis == a).unwrap();
    assert_eq!(by_axis(Axis::Hour).buckets.len(), 24);
    assert_eq!(by_axis(Axis::Month).buckets.len(), 12);
    assert_eq!(by_axis(Axis::Month).total(), 6_000);
    assert_eq!(by_axis(Axis::District).buckets.len(), 10);
    assert_eq!(by_axis(Axis::DayOfWeek).buckets.len(), 7);
    assert!(dir.path().join("histogram_hour.csv").exists());
    assert!(fs::read_to_string(dir.path().join("histogram_district.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn run_is_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new("dt", tree(Criterion::Entropy, 100));
    cfg.cache = synthetic_cache(dir.path(), 4_000, 5);
    cfg.out = dir.path().join("out");
    cfg.features.select_percentile = Some(70);
    run_experiment(&cfg).unwrap();
    let report = fs::read(report_path(&cfg.out, "dt")).unwrap();
    let model = fs::read(cfg.out.join("dt.model.json")).unwrap();
    run_experiment(&cfg).unwrap();
    assert_eq!(report, fs::read(report_path(&cfg.out, "dt")).unwrap());
    assert_eq!(model, fs::read(cfg.out.join("dt.model.json")).unwrap());
    assert!(cfg.out.join("dt.timing.json").exists());

    let mut other = cfg.clone();
    other.seed += 1;
    let a = run_experiment(&cfg).unwrap().record;
    let b = run_experiment(&other).unwrap().record;
    assert_ne!(a.test_digest, b.test_digest);
}

#[test]
fn run_ingests_when_cache_is_missing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("incidents.csv");
    synth::write_csv(&csv, &SyntheticSf::new(6).generate(2_000)).unwrap();
    let mut cfg = ExperimentConfig::new("dt", tree(Criterion::Gini, 50));
    cfg.data = Some(csv);
    cfg.cache = dir.path().join("cache");
    cfg.out = dir.path().join("out");
    run_experiment(&cfg).unwrap();
    assert!(cfg.cache.join(FEATURES_FILE).exists());

    let mut missing = cfg.clone();
    missing.data = None;
    missing.cache = dir.path().join("nowhere");
    assert!(matches!(run_experiment(&missing), Err(Error::Config(_))));
}

#[test]
fn stage_errors_name_the_stage() {
    let data = small_data(1_000, 7);
    let mut cfg = ExperimentConfig::new("pca", tree(Criterion::Gini, 2));
    cfg.features.pca_components = Some(50);
    match run_cell(&cfg, &data) {
        Err(Error::Stage { stage, .. }) => assert_eq!(stage, "transform"),
        other => panic!("expected a stage error, got {other:?}"),
    }
}

#[test]
fn grid_reproduce_resumes_and_assembles() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synthetic_cache(dir.path(), 4_000, 8);
    let mut base = ExperimentConfig::from_toml("").unwrap();
    base.cache = cache.clone();
    let out = dir.path().join("out");
    let grid = GridSpec::published(&base)
        .only_tables(&["decision_tree".into(), "binary".into()])
        .unwrap();
    let data = CachedDataset::load(&cache).unwrap();

    let first = reproduce(&grid, &data, &out).unwrap();
    assert_eq!((first.fitted.len(), first.skipped.len()), (11, 0));
    let table = fs::read_to_string(out.join("tables/decision_tree.csv")).unwrap();
    assert_eq!(table.lines().count(), 10);
    let row = table.lines().find(|l| l.starts_with("dt_entropy_300,")).unwrap();
    assert!(row.contains(",31.17,") && row.contains(",3.31,"), "{row}");

    let before = fs::read(report_path(&out, "dt_gini_50")).unwrap();
    let second = reproduce(&grid, &data, &out).unwrap();
    assert!(second.fitted.is_empty());
    assert_eq!(second.skipped.len(), 11);
    assert_eq!(before, fs::read(report_path(&out, "dt_gini_50")).unwrap());

    // a removed report is refitted to the same bytes
    fs::remove_file(report_path(&out, "dt_gini_50")).unwrap();
    let third = reproduce(&grid, &data, &out).unwrap();
    assert_eq!(third.fitted, vec!["dt_gini_50".to_string()]);
    assert_eq!(before, fs::read(report_path(&out, "dt_gini_50")).unwrap());
    let notes = fs::read_to_string(&third.notes).unwrap();
    assert!(notes.contains("identical numbers"));
    let counts = data.frequencies.counts();
    let frequent: u64 = counts.iter().filter(|&&c| c >= 10_000).sum();
    let share = 100.0 * frequent as f64 / counts.iter().sum::<u64>() as f64;
    assert!(notes.contains(&format!("threshold 10000: the frequent side holds {share:.2}%")), "{notes}");
}

#[test]
fn failed_cells_leave_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_data(1_500, 9);
    let base = ExperimentConfig::from_toml("").unwrap();
    let mut grid = GridSpec::published(&base).only_tables(&["knn".into()]).unwrap();
    grid.cells.truncate(2);
    // more neighbours than training rows
    if let ModelSpec::Knn(p) = &mut grid.cells[1].config.model {
        p.n_neighbors = 5_000;
    }
    let s = reproduce(&grid, &data, dir.path()).unwrap();
    assert_eq!(s.fitted.len(), 1);
    assert_eq!(s.failed.len(), 1);
    let table = fs::read_to_string(dir.path().join("tables/knn.csv")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("knn_50,") && l.contains(",failed,")), "{table}");
}

#[test]
fn shared_seed_gives_identical_test_rows() {
    let data = small_data(3_000, 10);
    let base = ExperimentConfig::from_toml("").unwrap();
    let grid = GridSpec::published(&base);
    let mut digests = Vec::new();
    for cell in &grid.cells {
        let honest = cell.config.resample.as_ref().is_none_or(|r| !r.before_split);
        let expensive = matches!(&cell.config.model, ModelSpec::RandomForest(p) if p.n_estimators > 10)
            || matches!(&cell.config.model, ModelSpec::Adaboost(p) if p.n_estimators > 10);
        if !honest || cell.config.binary_threshold.is_some() || expensive {
            continue;
        }
        let rec = run_cell(&cell.config, &data).unwrap().record;
        digests.push((cell.config.name.clone(), rec.test_digest, rec.n_test));
    }
    assert!(digests.len() >= 15);
    assert!(digests.iter().all(|d| d.1 == digests[0].1 && d.2 == 750), "{digests:?}");
}

#[test]
fn resampling_before_split_is_flagged() {
    let data = small_data(2_000, 11);
    let run = |before_split| {
        let mut cfg = ExperimentConfig::new("smote", tree(Criterion::Gini, 20));
        cfg.resample = Some(ResampleSpec {
            method: ResampleMethod::Smote,
            k: None,
            before_split,
        });
        run_cell(&cfg, &data).unwrap().record
    };
    let leaky = run(true);
    let honest = run(false);
    let plain = run_cell(&ExperimentConfig::new("plain", tree(Criterion::Gini, 20)), &data)
        .unwrap()
        .record;
    let note = leaky.leakage.expect("leakage note");
    assert!(note.synthetic_test_rows > 0);
    assert!(honest.leakage.is_none());
    assert_eq!(honest.test_digest, plain.test_digest);
    assert_eq!(honest.n_test, plain.n_test);
    assert!(honest.n_train > honest.n_train_before_resample);
}

#[test]
fn binary_remap_cell_has_two_classes() {
    let data = small_data(3_000, 12);
    let mut cfg = ExperimentConfig::new("bin", tree(Criterion::Entropy, 50));
    cfg.binary_threshold = Some(100);
    let rec = run_cell(&cfg, &data).unwrap().record;
    assert_eq!(rec.n_classes, 2);
    assert_eq!(rec.evaluation.confusion.len(), 2);
}

#[test]
fn config_files_in_repo_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n > 0);
}

fn all_specs() -> Vec<ModelSpec> {
    vec![
        tree(Criterion::Gini, 20),
        ModelSpec::Knn(KnnParams {
            n_neighbors: 15,
            ..Default::default()
        }),
        ModelSpec::RandomForest(ForestParams {
            n_estimators: 8,
            seed: 3,
            ..Default::default()
        }),
        ModelSpec::Adaboost(AdaboostParams {
            n_estimators: 8,
            seed: 3,
            ..Default::default()
        }),
    ]
}

#[test]
fn saved_models_predict_identically() {
    let data = small_data(4_000, 13);
    let split = train_test_split(&data.matrix, 0.25, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for spec in all_specs() {
        let model = spec.fit(&split.train).unwrap();
        let path = dir.path().join(format!("{}.json", spec.name()));
        model.save(&path).unwrap();
        let loaded = TrainedModel::load(&path).unwrap();
        let a = model.predict_proba(&split.test).unwrap();
        let b = loaded.predict_proba(&split.test).unwrap();
        let same_bits = a
            .iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| x.to_bits() == y.to_bits());
        assert!(same_bits, "{}", spec.name());
    }
}

#[test]
fn predict_is_argmax_of_probabilities() {
    let data = small_data(4_000, 14);
    let split = train_test_split(&data.matrix, 0.25, 2).unwrap();
    assert_eq!(split.test.n_rows(), 1_000);
    for spec in all_specs() {
        let model = spec.fit(&split.train).unwrap();
        let probs = model.predict_proba(&split.test).unwrap();
        let pred = model.predict(&split.test).unwrap();
        for (p, row) in pred.iter().zip(&probs) {
            assert_eq!(*p as usize, argmax(row), "{}", spec.name());
        }
    }
}

#[test]
fn weighted_error_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..20 {
        let n = rng.random_range(1..200);
        let k = rng.random_range(2..6);
        let truth: Vec<u32> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let pred: Vec<u32> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let mut wrong = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            total += w[i];
            if pred[i] != truth[i] {
                wrong += w[i];
            }
        }
        assert!((weighted_error(&pred, &truth, &w) - wrong / total).abs() < 1e-12);
    }
}

#[test]
fn relabelling_classes_permutes_tree_probabilities() {
    let data = small_data(3_000, 16);
    let m = &data.matrix;
    let k = m.n_classes();
    // reverse the code order
    let perm: Vec<u32> = (0..k as u32).rev().collect();
    let relabelled: Vec<u32> = m.labels().iter().map(|&l| perm[l as usize]).collect();
    let m2: FeatureMatrix = m.with_labels(relabelled, k).unwrap();
    for criterion in [Criterion::Gini, Criterion::Entropy] {
        let a = tree(criterion, 40).fit(m).unwrap().predict_proba(m).unwrap();
        let b = tree(criterion, 40).fit(&m2).unwrap().predict_proba(m).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for c in 0..k {
                assert!((ra[c] - rb[perm[c] as usize]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn report_records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new("knn", ModelSpec::Knn(KnnParams::default()));
    cfg.cache = synthetic_cache(dir.path(), 2_000, 17);
    cfg.out = dir.path().join("out");
    cfg.features.zscore = true;
    let o = run_experiment(&cfg).unwrap();
    let back = read_record(&report_path(&cfg.out, "knn")).unwrap();
    assert_eq!(back, o.record);
    assert!((back.log_loss_bits - back.log_loss / std::f64::consts::LN_2).abs() < 1e-12);
}
