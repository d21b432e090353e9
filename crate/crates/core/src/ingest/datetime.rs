use std::fmt;

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar components kept from an incident timestamp; minutes and seconds
/// are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateParts {
    pub year: i32,
    pub month: u32,
    pub date: u32,
    pub hour: u32,
}

/// Parses `YYYY-MM-DD HH:MM:SS` and validates it as a real calendar instant.
pub fn extract_datetime_features(timestamp: &str) -> Result<DateParts> {
    let ts = timestamp.trim();
    // chrono accepts single-digit fields; the export always pads them.
    if ts.len() != 19 {
        return Err(Error::Timestamp(timestamp.to_owned()));
    }
    let dt = NaiveDateTime::parse_from_str(ts, "%Y-%m-%d %H:%M:%S")
        .map_err(|_| Error::Timestamp(timestamp.to_owned()))?;
    Ok(DateParts {
        year: dt.year(),
        month: dt.month(),
        date: dt.day(),
        hour: dt.hour(),
    })
}

/// Coarse part of the day an incident falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum TimeBlock {
    /// 01:00 to 07:59
    EarlyMorning = 0,
    /// 08:00 to 13:59
    LateMorning = 1,
    /// 14:00 to 19:59
    Afternoon = 2,
    /// 20:00 to 00:59, midnight included
    Night = 3,
}

impl TimeBlock {
    pub const ALL: [TimeBlock; 4] = [
        TimeBlock::EarlyMorning,
        TimeBlock::LateMorning,
        TimeBlock::Afternoon,
        TimeBlock::Night,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for TimeBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TimeBlock::EarlyMorning => "early_morning",
            TimeBlock::LateMorning => "late_morning",
            TimeBlock::Afternoon => "afternoon",
            TimeBlock::Night => "night",
        };
        f.write_str(s)
    }
}

pub fn assign_time_block(hour: u32) -> Result<TimeBlock> {
    match hour {
        1..=7 => Ok(TimeBlock::EarlyMorning),
        8..=13 => Ok(TimeBlock::LateMorning),
        14..=19 => Ok(TimeBlock::Afternoon),
        0 | 20..=23 => Ok(TimeBlock::Night),
        _ => Err(Error::invalid(format!("hour {hour} outside 0..=23"))),
    }
}
