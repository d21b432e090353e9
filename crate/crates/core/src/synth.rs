//! Synthetic incident exports with the SF schema.
//!
//! The generator reproduces the published class frequencies exactly (for a
//! full-size draw) or proportionally, plus district, hour, weekday and
//! location structure that makes the classes weakly predictable. It exists
//! so the examples, benches and mechanics tests run without the real
//! export; it is not a stand-in for reported accuracies on real data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::ingest::{RawRecord, SCHEMA, WEEKDAYS};

/// Category names and incident counts of the full export, alphabetical.
pub const SF_CATEGORY_COUNTS: [(&str, u64); 39] = [
    ("ARSON", 1513),
    ("ASSAULT", 76876),
    ("BAD CHECKS", 406),
    ("BRIBERY", 289),
    ("BURGLARY", 36755),
    ("DISORDERLY CONDUCT", 4320),
    ("DRIVING UNDER THE INFLUENCE", 2268),
    ("DRUG/NARCOTIC", 53971),
    ("DRUNKENNESS", 4280),
    ("EMBEZZLEMENT", 1166),
    ("EXTORTION", 256),
    ("FAMILY OFFENSES", 491),
    ("FORGERY/COUNTERFEITING", 10609),
    ("FRAUD", 16679),
    ("GAMBLING", 146),
    ("KIDNAPPING", 2341),
    ("LARCENY/THEFT", 174900),
    ("LIQUOR LAWS", 1903),
    ("LOITERING", 1225),
    ("MISSING PERSON", 25989),
    ("NON-CRIMINAL", 92304),
    ("OTHER OFFENSES", 126182),
    ("PORNOGRAPHY/OBSCENE MAT", 22),
    ("PROSTITUTION", 7484),
    ("RECOVERED VEHICLE", 3138),
    ("ROBBERY", 23000),
    ("RUNAWAY", 1946),
    ("SECONDARY CODES", 9985),
    ("SEX OFFENSES FORCIBLE", 4388),
    ("SEX OFFENSES NON FORCIBLE", 148),
    ("STOLEN PROPERTY", 4540),
    ("SUICIDE", 508),
    ("SUSPICIOUS OCC", 31414),
    ("TREA", 6),
    ("TRESPASS", 7326),
    ("VANDALISM", 44725),
    ("VEHICLE THEFT", 53781),
    ("WARRANTS", 42214),
    ("WEAPON LAWS", 8555),
];

/// Row count of the full export.
pub const SF_TOTAL_ROWS: u64 = 878_049;

/// (name, share of incidents, centroid longitude, centroid latitude)
const DISTRICTS: [(&str, f64, f64, f64); 10] = [
    ("BAYVIEW", 0.102, -122.392, 37.731),
    ("CENTRAL", 0.097, -122.409, 37.798),
    ("INGLESIDE", 0.090, -122.431, 37.724),
    ("MISSION", 0.136, -122.419, 37.760),
    ("NORTHERN", 0.120, -122.429, 37.783),
    ("PARK", 0.056, -122.446, 37.769),
    ("RICHMOND", 0.051, -122.478, 37.778),
    ("SOUTHERN", 0.179, -122.405, 37.780),
    ("TARAVAL", 0.075, -122.481, 37.737),
    ("TENDERLOIN", 0.093, -122.414, 37.784),
];

const HOUR_WEIGHTS: [f64; 24] = [
    4.5, 2.6, 2.2, 1.5, 1.0, 0.9, 1.3, 2.3, 3.3, 3.8, 3.9, 4.0, 5.1, 4.5, 4.6, 4.9, 5.3, 5.6, 6.3,
    5.6, 5.3, 4.6, 4.4, 4.2,
];

/// Monday first.
const WEEKDAY_WEIGHTS: [f64; 7] = [14.3, 14.6, 15.3, 14.5, 15.3, 14.3, 13.1];

const MONTH_WEIGHTS: [f64; 12] = [8.4, 8.0, 8.7, 8.7, 8.9, 8.0, 8.0, 8.3, 8.2, 9.1, 8.6, 7.8];

const RESOLUTIONS: [&str; 6] = [
    "NONE",
    "ARREST, BOOKED",
    "ARREST, CITED",
    "LOCATED",
    "PSYCHOPATHIC CASE",
    "UNFOUNDED",
];

const STREETS: [&str; 24] = [
    "MISSION ST", "MARKET ST", "BRYANT ST", "FOLSOM ST", "HOWARD ST", "GEARY ST", "OFARRELL ST",
    "ELLIS ST", "TURK ST", "EDDY ST", "POLK ST", "LARKIN ST", "VALENCIA ST", "16TH ST", "24TH ST",
    "3RD ST", "BAYSHORE BL", "OCEAN AV", "IRVING ST", "CLEMENT ST", "HAIGHT ST", "DIVISADERO ST",
    "LOMBARD ST", "COLUMBUS AV",
];

/// Per-class structure shared by every draw of one generator.
struct ClassProfile {
    district: WeightedIndex<f64>,
    hour: WeightedIndex<f64>,
    weekday: WeightedIndex<f64>,
    offset: (f64, f64),
    /// Index into the district's address pool that this class favours.
    hotspot: usize,
}

pub struct SyntheticSf {
    seed: u64,
    /// Standard deviation (degrees) of locations around a district centroid.
    pub spread: f64,
    /// Probability that a row carries the y = 90 unknown-location placeholder.
    pub placeholder_rate: f64,
    /// Address blocks per district.
    pub addresses_per_district: usize,
}

impl SyntheticSf {
    pub fn new(seed: u64) -> Self {
        SyntheticSf {
            seed,
            spread: 0.008,
            placeholder_rate: 1e-4,
            addresses_per_district: 150,
        }
    }

    fn profiles(&self, rng: &mut ChaCha8Rng) -> Vec<ClassProfile> {
        SF_CATEGORY_COUNTS
            .iter()
            .map(|_| {
                let tilt = |rng: &mut ChaCha8Rng, base: &[f64], strength: f64| {
                    let w: Vec<f64> = base
                        .iter()
                        .map(|b| b * (strength * (rng.random::<f64>() - 0.5)).exp())
                        .collect();
                    WeightedIndex::new(w).expect("positive weights")
                };
                let district_base: Vec<f64> = DISTRICTS.iter().map(|d| d.1).collect();
                ClassProfile {
                    district: tilt(rng, &district_base, 2.0),
                    hour: tilt(rng, &HOUR_WEIGHTS, 1.2),
                    weekday: tilt(rng, &WEEKDAY_WEIGHTS, 0.4),
                    offset: (
                        (rng.random::<f64>() - 0.5) * 0.006,
                        (rng.random::<f64>() - 0.5) * 0.006,
                    ),
                    hotspot: rng.random_range(0..self.addresses_per_district),
                }
            })
            .collect()
    }

    /// `n` rows with class labels drawn from the published frequencies.
    pub fn generate(&self, n: usize) -> Vec<RawRecord> {
        let weights: Vec<f64> = SF_CATEGORY_COUNTS.iter().map(|c| c.1 as f64).collect();
        let classes = WeightedIndex::new(weights).expect("positive weights");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5f5f);
        let labels: Vec<usize> = (0..n).map(|_| classes.sample(&mut rng)).collect();
        self.generate_labels(&labels)
    }

    /// Exactly [`SF_TOTAL_ROWS`] rows with the published per-class counts,
    /// in shuffled order.
    pub fn generate_full(&self) -> Vec<RawRecord> {
        let mut labels: Vec<usize> = SF_CATEGORY_COUNTS
            .iter()
            .enumerate()
            .flat_map(|(c, &(_, n))| std::iter::repeat_n(c, n as usize))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0xf011);
        labels.shuffle(&mut rng);
        self.generate_labels(&labels)
    }

    fn generate_labels(&self, labels: &[usize]) -> Vec<RawRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let profiles = self.profiles(&mut rng);
        let months = WeightedIndex::new(MONTH_WEIGHTS).expect("positive weights");
        let noise = Normal::new(0.0, self.spread).expect("finite spread");
        let pool = self.addresses_per_district;

        labels
            .iter()
            .map(|&c| {
                let p = &profiles[c];
                let d = p.district.sample(&mut rng);
                let (district, _, cx, cy) = DISTRICTS[d];
                let hour = p.hour.sample(&mut rng);
                let weekday = WEEKDAYS[p.weekday.sample(&mut rng)];
                let month = months.sample(&mut rng) as u32 + 1;
                let year = rng.random_range(2003..=2014);
                let date = rng.random_range(1..=days_in_month(year, month));
                let minute = rng.random_range(0..60);

                let block = if rng.random_bool(0.3) {
                    p.hotspot
                } else {
                    rng.random_range(0..pool)
                };
                let street = STREETS[(d * 7 + block) % STREETS.len()];
                let address = if block % 5 == 0 {
                    format!("{} / {}", street, STREETS[(block / 5 + d) % STREETS.len()])
                } else {
                    format!("{}00 Block of {}", block + d * pool / 10, street)
                };

                let (x, y) = if rng.random_bool(self.placeholder_rate) {
                    (-120.5, 90.0)
                } else {
                    (
                        cx + p.offset.0 + noise.sample(&mut rng),
                        cy + p.offset.1 + noise.sample(&mut rng),
                    )
                };
                let category = SF_CATEGORY_COUNTS[c].0;
                RawRecord {
                    dates: format!("{year:04}-{month:02}-{date:02} {hour:02}:{minute:02}:00"),
                    category: category.to_owned(),
                    descript: format!("{category} INCIDENT"),
                    day_of_week: weekday.to_owned(),
                    pd_district: district.to_owned(),
                    resolution: RESOLUTIONS[rng.random_range(0..RESOLUTIONS.len())].to_owned(),
                    address,
                    x,
                    y,
                }
            })
            .collect()
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

/// Writes rows as an export-format CSV.
pub fn write_csv(path: &Path, rows: &[RawRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::with_capacity(1 << 20, file));
    w.write_record(SCHEMA)?;
    for r in rows {
        w.write_record([
            r.dates.as_str(),
            &r.category,
            &r.descript,
            &r.day_of_week,
            &r.pd_district,
            &r.resolution,
            &r.address,
            &r.x.to_string(),
            &r.y.to_string(),
        ])?;
    }
    w.into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .flush()
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{extract_datetime_features, LabelEncoder};

    #[test]
    fn published_counts() {
        let total: u64 = SF_CATEGORY_COUNTS.iter().map(|c| c.1).sum();
        assert_eq!(total, SF_TOTAL_ROWS);
        assert!(SF_CATEGORY_COUNTS.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(SF_CATEGORY_COUNTS.iter().filter(|c| c.1 > 10_000).count(), 14);
        assert_eq!(SF_CATEGORY_COUNTS.iter().filter(|c| c.1 < 2_000).count(), 14);
    }

    #[test]
    fn rows_are_valid_and_deterministic() {
        let g = SyntheticSf::new(3);
        let a = g.generate(500);
        assert_eq!(a, g.generate(500));
        for r in &a {
            extract_datetime_features(&r.dates).unwrap();
            assert!(r.x.abs() <= 180.0 && r.y.abs() <= 90.0);
        }
        let districts = LabelEncoder::fit(a.iter().map(|r| &r.pd_district)).unwrap();
        assert_eq!(districts.len(), 10);
    }
}
