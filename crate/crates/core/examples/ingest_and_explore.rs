//! Parse an incident CSV, look at the class imbalance and the
//! spatio-temporal histograms.
//!
//! ```bash
//! cargo run --release --example ingest_and_explore            # synthetic data
//! cargo run --release --example ingest_and_explore -- train.csv
//! ```

use std::path::PathBuf;

use sfcrime::ingest::{assign_time_block, histogram, Axis, Dataset, IngestOptions, TimeBlock};
use sfcrime::synth::{self, SyntheticSf};

fn main() -> sfcrime::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = dir.path().join("synthetic.csv");
            synth::write_csv(&p, &SyntheticSf::new(1).generate(50_000))?;
            p
        }
    };

    let ds = Dataset::load_csv(
        &path,
        IngestOptions {
            strict: false,
            drop_bad_coords: false,
        },
    )?;
    println!(
        "{} rows read, {} rejected, {} categories",
        ds.rows_read,
        ds.rows_rejected,
        ds.n_classes()
    );

    let freq = ds.class_frequencies();
    println!("\nmost common categories:");
    for (code, count) in freq.ranked().into_iter().take(8) {
        let name = ds.encoders.category.decode(code).unwrap();
        println!("  {name:<28} {count:>8}  {:5.2}%", 100.0 * count as f64 / freq.total() as f64);
    }
    let rare = freq.counts().iter().filter(|&&c| c < 2_000).count();
    println!("  ... {rare} categories have fewer than 2000 rows");

    for axis in Axis::ALL {
        let h = histogram(&ds.records, axis, &ds.encoders)?;
        let (hi, lo) = (h.max_bucket().unwrap(), h.min_bucket().unwrap());
        println!("\n{axis}: busiest {} ({}), quietest {} ({})", hi.0, hi.1, lo.0, lo.1);
    }

    println!("\ntime blocks:");
    let mut blocks = [0usize; 4];
    for r in &ds.records {
        blocks[assign_time_block(r.hour)?.code() as usize] += 1;
    }
    for b in TimeBlock::ALL {
        println!("  {b:<14} {}", blocks[b.code() as usize]);
    }
    Ok(())
}
