use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CrimeRecord, Encoders};
use crate::error::{Error, Result};

pub const WEEKDAYS: [&str; 7] = [
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
];

/// Per-class incident counts, indexed by class code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFrequencyTable {
    counts: Vec<u64>,
    total: u64,
}

impl ClassFrequencyTable {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        ClassFrequencyTable { counts, total }
    }

    pub fn from_labels(labels: &[u32], n_classes: usize) -> Result<Self> {
        let mut counts = vec![0u64; n_classes];
        for &l in labels {
            let slot = counts.get_mut(l as usize).ok_or(Error::LabelOutOfRange {
                label: l as usize,
                n_classes,
            })?;
            *slot += 1;
        }
        Ok(Self::from_counts(counts))
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, class: u32) -> u64 {
        self.counts.get(class as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    /// (class code, count) pairs, most frequent first, ties by code.
    pub fn ranked(&self) -> Vec<(u32, u64)> {
        let mut pairs: Vec<(u32, u64)> = self
            .counts
            .iter()
            .enumerate()
            .map(|(c, &n)| (c as u32, n))
            .collect();
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        pairs
    }

    /// Writes `code,class,count` rows, most frequent first.
    pub fn write_csv(&self, path: &Path, names: Option<&super::LabelEncoder>) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(["code", "class", "count"])?;
        for (code, count) in self.ranked() {
            let name = names
                .and_then(|e| e.decode(code))
                .map(str::to_owned)
                .unwrap_or_else(|| code.to_string());
            w.write_record([code.to_string(), name, count.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

pub fn class_frequencies(records: &[CrimeRecord], n_classes: usize) -> Result<ClassFrequencyTable> {
    let labels: Vec<u32> = records.iter().map(|r| r.label).collect();
    ClassFrequencyTable::from_labels(&labels, n_classes)
}

pub const RARE: u32 = 0;
pub const FREQUENT: u32 = 1;

/// Collapses class codes to {0 = rare, 1 = frequent}; a class is frequent
/// when its count is at least `threshold`.
pub fn remap_binary(labels: &[u32], freq: &ClassFrequencyTable, threshold: u64) -> Result<Vec<u32>> {
    if threshold == 0 {
        return Err(Error::invalid("binary remap threshold must be positive"));
    }
    Ok(labels
        .iter()
        .map(|&l| {
            if freq.count(l) >= threshold {
                FREQUENT
            } else {
                RARE
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Month,
    DayOfWeek,
    Hour,
    District,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Month, Axis::DayOfWeek, Axis::Hour, Axis::District];

    /// Feature-matrix column holding this axis.
    pub fn column(self) -> &'static str {
        match self {
            Axis::Month => "month",
            Axis::DayOfWeek => "day",
            Axis::Hour => "hour",
            Axis::District => "district",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Month => "month",
            Axis::DayOfWeek => "day_of_week",
            Axis::Hour => "hour",
            Axis::District => "district",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "month" => Ok(Axis::Month),
            "day_of_week" | "day" => Ok(Axis::DayOfWeek),
            "hour" => Ok(Axis::Hour),
            "district" => Ok(Axis::District),
            _ => Err(Error::invalid(format!(
                "unknown axis {s:?} (expected month, day_of_week, hour or district)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub axis: Axis,
    pub buckets: Vec<(String, u64)>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.buckets.iter().map(|b| b.1).sum()
    }

    /// Largest bucket; the first one wins ties.
    pub fn max_bucket(&self) -> Option<&(String, u64)> {
        self.buckets
            .iter()
            .reduce(|best, b| if b.1 > best.1 { b } else { best })
    }

    pub fn min_bucket(&self) -> Option<&(String, u64)> {
        self.buckets
            .iter()
            .reduce(|best, b| if b.1 < best.1 { b } else { best })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bucket", "count"])?;
        for (b, c) in &self.buckets {
            w.write_record([b.as_str(), &c.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<histogram>", e))?;
        Ok(())
    }
}

/// Tallies raw axis values: month 1..=12, hour 0..=23, or the encoded
/// day-of-week / district code.
pub fn histogram_from_values<I>(axis: Axis, values: I, encoders: &Encoders) -> Result<Histogram>
where
    I: IntoIterator<Item = u32>,
{
    // (bucket label, slot) for every value the axis can take
    let (labels, slot_of): (Vec<String>, Vec<usize>) = match axis {
        Axis::Month => ((1..=12).map(|m| m.to_string()).collect(), Vec::new()),
        Axis::Hour => ((0..24).map(|h| h.to_string()).collect(), Vec::new()),
        Axis::DayOfWeek => {
            let mut labels: Vec<String> = WEEKDAYS.iter().map(|s| s.to_string()).collect();
            let mut slot_of = Vec::with_capacity(encoders.day_of_week.len());
            for name in encoders.day_of_week.classes() {
                match labels.iter().position(|l| l == name) {
                    Some(p) => slot_of.push(p),
                    None => {
                        labels.push(name.clone());
                        slot_of.push(labels.len() - 1);
                    }
                }
            }
            (labels, slot_of)
        }
        Axis::District => {
            let labels = encoders.district.classes().to_vec();
            let slots = (0..labels.len()).collect();
            (labels, slots)
        }
    };

    let mut counts = vec![0u64; labels.len()];
    for v in values {
        let slot = match axis {
            Axis::Month if (1..=12).contains(&v) => Some(v as usize - 1),
            Axis::Hour if v < 24 => Some(v as usize),
            Axis::DayOfWeek | Axis::District => slot_of.get(v as usize).copied(),
            _ => None,
        };
        let slot = slot.ok_or_else(|| Error::invalid(format!("value {v} outside the {axis} axis")))?;
        counts[slot] += 1;
    }
    Ok(Histogram {
        axis,
        buckets: labels.into_iter().zip(counts).collect(),
    })
}

pub fn histogram(records: &[CrimeRecord], axis: Axis, encoders: &Encoders) -> Result<Histogram> {
    let values = records.iter().map(|r| match axis {
        Axis::Month => r.month,
        Axis::Hour => r.hour,
        Axis::DayOfWeek => r.day_code,
        Axis::District => r.district_code,
    });
    histogram_from_values(axis, values, encoders)
}
