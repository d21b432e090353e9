use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sfcrime::experiment::{self, CachedDataset, ExperimentConfig, GridSpec};
use sfcrime::ingest::{Axis, IngestOptions};
use sfcrime::synth::{self, SyntheticSf};

#[derive(Parser)]
#[command(name = "sfcrime", version, about = "San Francisco incident category classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an incident CSV and write the feature cache.
    Ingest {
        csv: PathBuf,
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
        /// Abort on the first malformed row instead of skipping it.
        #[arg(long)]
        strict: bool,
        /// Drop rows at the placeholder location (latitude 90).
        #[arg(long)]
        drop_bad_coords: bool,
    },
    /// Write per-axis incident histograms from the cache.
    Explore {
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
        #[arg(long, default_value = "out/explore")]
        out: PathBuf,
        /// month, day_of_week, hour or district; all four when omitted.
        #[arg(long = "axis")]
        axes: Vec<Axis>,
        #[arg(long)]
        svg: bool,
    },
    /// Run one experiment cell from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Resample before the train/test split (leaks into the test set).
        #[arg(long)]
        paper_protocol: bool,
    },
    /// Run the whole comparison grid and write the tables.
    Reproduce {
        /// Base config supplying seed, paths, subsample and feature options.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict to these tables (comma separated).
        #[arg(long, value_delimiter = ',')]
        tables: Vec<String>,
    },
    /// Write a synthetic incident CSV with the same schema.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        rows: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Exactly the full-size class counts (878,049 rows).
        #[arg(long)]
        full: bool,
    },
}

fn load_config(path: Option<&PathBuf>, seed: Option<u64>, cache: Option<PathBuf>, out: Option<PathBuf>) -> sfcrime::Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::from_toml("")?,
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(c) = cache {
        cfg.cache = c;
    }
    if let Some(o) = out {
        cfg.out = o;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> sfcrime::Result<()> {
    match cmd {
        Command::Ingest {
            csv,
            cache,
            strict,
            drop_bad_coords,
        } => {
            let s = experiment::ingest_to_cache(&csv, &cache, IngestOptions { strict, drop_bad_coords })?;
            println!(
                "read {} rows: kept {}, rejected {}, dropped {}; {} categories -> {}",
                s.rows_read,
                s.rows_kept,
                s.rows_rejected,
                s.rows_dropped,
                s.n_classes,
                cache.display()
            );
        }
        Command::Explore { cache, out, axes, svg } => {
            let data = CachedDataset::load(&cache)?;
            let axes = if axes.is_empty() { Axis::ALL.to_vec() } else { axes };
            for h in experiment::explore(&data, &axes, &out, svg)? {
                let (hi, lo) = (h.max_bucket().unwrap(), h.min_bucket().unwrap());
                println!("{}: max {} ({}), min {} ({})", h.axis, hi.0, hi.1, lo.0, lo.1);
            }
        }
        Command::Run {
            config,
            seed,
            cache,
            out,
            paper_protocol,
        } => {
            let mut cfg = load_config(Some(&config), seed, cache, out)?;
            if paper_protocol {
                match cfg.resample.as_mut() {
                    Some(r) => r.before_split = true,
                    None => {
                        return Err(sfcrime::Error::Config(
                            "--paper-protocol needs a [resample] section".into(),
                        ))
                    }
                }
            }
            let o = experiment::run_experiment(&cfg)?;
            println!(
                "{}: accuracy {:.2}%  log loss {:.4} nats ({:.4} bits)  n_test {}",
                o.record.name,
                o.record.accuracy_pct(),
                o.record.log_loss,
                o.record.log_loss_bits,
                o.record.n_test
            );
            if let Some(l) = &o.record.leakage {
                println!("warning: {}", l.message);
            }
        }
        Command::Reproduce {
            config,
            seed,
            cache,
            out,
            tables,
        } => {
            let base = load_config(config.as_ref(), seed, cache, out)?;
            let mut grid = GridSpec::published(&base);
            if !tables.is_empty() {
                grid = grid.only_tables(&tables)?;
            }
            let data = experiment::load_or_ingest(&base)?;
            let s = experiment::reproduce(&grid, &data, &base.out)?;
            println!(
                "fitted {}, skipped {}, failed {}",
                s.fitted.len(),
                s.skipped.len(),
                s.failed.len()
            );
            for t in &s.tables {
                println!("  {}", t.display());
            }
            println!("  {}", s.notes.display());
            if !s.failed.is_empty() {
                return Err(sfcrime::Error::Fit(format!("{} cells failed", s.failed.len())));
            }
        }
        Command::Synth { out, rows, seed, full } => {
            let g = SyntheticSf::new(seed);
            let data = if full { g.generate_full() } else { g.generate(rows) };
            synth::write_csv(&out, &data)?;
            println!("wrote {} rows to {}", data.len(), out.display());
        }
    }
    Ok(())
}
