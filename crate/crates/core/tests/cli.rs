use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sfcrime(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfcrime"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn synth_ingest_explore_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = ok(&sfcrime(d, &["synth", "--out", "in.csv", "--rows", "3000", "--seed", "1"]));
    assert!(s.contains("wrote 3000 rows"));

    let s = ok(&sfcrime(d, &["ingest", "in.csv", "--cache", "cache", "--drop-bad-coords"]));
    assert!(s.starts_with("read 3000 rows"), "{s}");

    let s = ok(&sfcrime(d, &["explore", "--cache", "cache", "--out", "ex", "--axis", "hour", "--svg"]));
    assert!(s.starts_with("hour:"));
    assert!(d.join("ex/histogram_hour.svg").exists());
    assert!(!d.join("ex/histogram_month.csv").exists());

    fs::write(
        d.join("dt.toml"),
        "name = \"dt\"\n[model]\nkind = \"decision_tree\"\nmin_samples_split = 50\n",
    )
    .unwrap();
    let s = ok(&sfcrime(d, &["run", "--config", "dt.toml", "--seed", "3", "--cache", "cache", "--out", "o"]));
    assert!(s.starts_with("dt: accuracy"), "{s}");
    let report = fs::read_to_string(d.join("o/dt.report.json")).unwrap();
    assert!(report.contains("\"seed\": 3"), "{report}");

    // --paper-protocol needs a resampler
    let out = sfcrime(d, &["run", "--config", "dt.toml", "--cache", "cache", "--paper-protocol"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[resample]"));

    fs::write(
        d.join("smote.toml"),
        "name = \"smote\"\n[model]\nkind = \"decision_tree\"\n[resample]\nmethod = \"smote\"\n",
    )
    .unwrap();
    let s = ok(&sfcrime(d, &["run", "--config", "smote.toml", "--cache", "cache", "--out", "o", "--paper-protocol"]));
    assert!(s.contains("warning:"), "{s}");
}

#[test]
fn missing_cache_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sfcrime(dir.path(), &["explore", "--cache", "nope"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn strict_ingest_rejects_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("bad.csv"),
        "Dates,Category,Descript,DayOfWeek,PdDistrict,Resolution,Address,X,Y\n\
         2015-05-13 23:53:00,WARRANTS,WARRANT ARREST,Wednesday,NORTHERN,NONE,OAK ST,-122.42,37.77\n\
         not a date,WARRANTS,WARRANT ARREST,Wednesday,NORTHERN,NONE,OAK ST,-122.42,37.77\n",
    )
    .unwrap();
    assert!(!sfcrime(d, &["ingest", "bad.csv", "--strict"]).status.success());
    let s = ok(&sfcrime(d, &["ingest", "bad.csv"]));
    assert!(s.contains("rejected 1"), "{s}");
}
