//! Reading the incident export and turning it into coded records.

mod datetime;
mod encoder;
mod reader;
mod stats;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use datetime::{assign_time_block, extract_datetime_features, DateParts, TimeBlock};
pub use encoder::LabelEncoder;
pub use reader::{parse_csv, parse_csv_reader, ParseOptions, ParsedCsv, RawRecord, RowReject, SCHEMA};
pub use stats::{
    class_frequencies, histogram, histogram_from_values, remap_binary, Axis, ClassFrequencyTable, Histogram,
    FREQUENT, RARE, WEEKDAYS,
};

use crate::error::{Error, Result};

/// A parsed incident with every string attribute replaced by its code.
/// Description and resolution are deliberately absent: both leak the label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrimeRecord {
    pub year: i32,
    pub month: u32,
    pub date: u32,
    pub hour: u32,
    pub day_code: u32,
    pub district_code: u32,
    pub address_code: u32,
    pub x: f64,
    pub y: f64,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoders {
    pub category: LabelEncoder,
    pub day_of_week: LabelEncoder,
    pub district: LabelEncoder,
    pub address: LabelEncoder,
}

impl Encoders {
    pub fn fit(raw: &[RawRecord]) -> Result<Self> {
        Ok(Encoders {
            category: LabelEncoder::fit(raw.iter().map(|r| &r.category))?,
            day_of_week: LabelEncoder::fit(raw.iter().map(|r| &r.day_of_week))?,
            district: LabelEncoder::fit(raw.iter().map(|r| &r.pd_district))?,
            address: LabelEncoder::fit(raw.iter().map(|r| &r.address))?,
        })
    }

    pub fn encode(&self, r: &RawRecord) -> Result<CrimeRecord> {
        let parts = extract_datetime_features(&r.dates)?;
        let code = |enc: &LabelEncoder, v: &str, what: &str| {
            enc.encode(v)
                .ok_or_else(|| Error::invalid(format!("unknown {what} {v:?}")))
        };
        Ok(CrimeRecord {
            year: parts.year,
            month: parts.month,
            date: parts.date,
            hour: parts.hour,
            day_code: code(&self.day_of_week, &r.day_of_week, "day of week")?,
            district_code: code(&self.district, &r.pd_district, "district")?,
            address_code: code(&self.address, &r.address, "address")?,
            x: r.x,
            y: r.y,
            label: code(&self.category, &r.category, "category")?,
        })
    }
}

/// True for the y = 90 placeholder the export uses for unknown locations.
pub fn is_placeholder_location(y: f64) -> bool {
    y >= 90.0
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    pub strict: bool,
    pub drop_bad_coords: bool,
}

/// Encoded incidents plus the encoders that produced them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<CrimeRecord>,
    pub encoders: Encoders,
    /// Data rows in the file before rejection or filtering.
    pub rows_read: usize,
    pub rows_rejected: usize,
    pub rows_dropped: usize,
}

impl Dataset {
    pub fn from_raw(raw: Vec<RawRecord>, drop_bad_coords: bool) -> Result<Self> {
        let before = raw.len();
        let raw: Vec<RawRecord> = if drop_bad_coords {
            raw.into_iter()
                .filter(|r| !is_placeholder_location(r.y))
                .collect()
        } else {
            raw
        };
        let dropped = before - raw.len();
        let encoders = Encoders::fit(&raw)?;
        let records = raw
            .iter()
            .map(|r| encoders.encode(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            records,
            encoders,
            rows_read: before,
            rows_rejected: 0,
            rows_dropped: dropped,
        })
    }

    pub fn load_csv(path: &Path, opts: IngestOptions) -> Result<Self> {
        let parsed = parse_csv(path, &SCHEMA, ParseOptions { strict: opts.strict })?;
        let rejected = parsed.rejected.len();
        let mut ds = Dataset::from_raw(parsed.records, opts.drop_bad_coords)?;
        ds.rows_read += rejected;
        ds.rows_rejected = rejected;
        Ok(ds)
    }

    pub fn n_classes(&self) -> usize {
        self.encoders.category.len()
    }

    pub fn class_frequencies(&self) -> ClassFrequencyTable {
        class_frequencies(&self.records, self.n_classes()).expect("labels come from the category encoder")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(dates: &str, cat: &str, day: &str, district: &str, addr: &str, y: f64) -> RawRecord {
        RawRecord {
            dates: dates.into(),
            category: cat.into(),
            descript: String::new(),
            day_of_week: day.into(),
            pd_district: district.into(),
            resolution: String::new(),
            address: addr.into(),
            x: -122.4,
            y,
        }
    }

    #[test]
    fn encodes_and_filters() {
        let rows = vec![
            raw("2015-05-13 23:53:00", "WARRANTS", "Wednesday", "NORTHERN", "OAK ST", 37.77),
            raw("2015-05-12 05:00:00", "ASSAULT", "Tuesday", "SOUTHERN", "MISSION ST", 37.78),
            raw("2015-05-12 06:00:00", "ASSAULT", "Tuesday", "SOUTHERN", "UNKNOWN", 90.0),
        ];
        let ds = Dataset::from_raw(rows.clone(), false).unwrap();
        assert_eq!(ds.records.len(), 3);
        let r = ds.records[0];
        assert_eq!((r.year, r.month, r.date, r.hour), (2015, 5, 13, 23));
        assert_eq!(r.label, 1); // ASSAULT < WARRANTS
        assert_eq!(ds.encoders.category.decode(r.label), Some("WARRANTS"));

        let ds = Dataset::from_raw(rows, true).unwrap();
        assert_eq!(ds.records.len(), 2);
        assert_eq!(ds.rows_dropped, 1);
        assert_eq!(ds.encoders.address.len(), 2);
    }

    #[test]
    fn histograms() {
        let rows = vec![
            raw("2015-05-13 05:53:00", "A", "Wednesday", "NORTHERN", "OAK ST", 37.77),
        ];
        let ds = Dataset::from_raw(rows, false).unwrap();
        let h = histogram(&ds.records, Axis::Hour, &ds.encoders).unwrap();
        assert_eq!(h.buckets.len(), 24);
        for (i, (label, count)) in h.buckets.iter().enumerate() {
            assert_eq!(label, &i.to_string());
            assert_eq!(*count, u64::from(i == 5));
        }
        let d = histogram(&ds.records, Axis::DayOfWeek, &ds.encoders).unwrap();
        assert_eq!(d.buckets.len(), 7);
        assert_eq!(d.max_bucket().unwrap().0, "Wednesday");
        assert_eq!(histogram(&ds.records, Axis::District, &ds.encoders).unwrap().total(), 1);
    }
}
