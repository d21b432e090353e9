use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::datetime::extract_datetime_features;
use crate::error::{Error, Result};

/// Column names of the incident export, in file order.
pub const SCHEMA: [&str; 9] = [
    "Dates",
    "Category",
    "Descript",
    "DayOfWeek",
    "PdDistrict",
    "Resolution",
    "Address",
    "X",
    "Y",
];

/// One incident row exactly as it appears in the export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub dates: String,
    pub category: String,
    pub descript: String,
    pub day_of_week: String,
    pub pd_district: String,
    pub resolution: String,
    pub address: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReject {
    pub line: u64,
    pub field: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCsv {
    pub records: Vec<RawRecord>,
    pub rejected: Vec<RowReject>,
}

impl ParsedCsv {
    /// Data rows read, accepted or not.
    pub fn rows_read(&self) -> usize {
        self.records.len() + self.rejected.len()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Abort on the first bad row instead of skipping it.
    pub strict: bool,
}

pub fn parse_csv(path: &Path, schema: &[&str], opts: ParseOptions) -> Result<ParsedCsv> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv_reader(file, schema, opts)
}

pub fn parse_csv_reader<R: Read>(input: R, schema: &[&str], opts: ParseOptions) -> Result<ParsedCsv> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let header = rdr.headers()?.clone();
    let cols = column_positions(&header, schema)?;

    let mut out = ParsedCsv::default();
    let mut row = csv::StringRecord::new();
    let mut line = 1u64;
    while rdr.read_record(&mut row)? {
        line += 1;
        match parse_row(&row, &cols, line) {
            Ok(rec) => out.records.push(rec),
            Err(reject) => {
                if opts.strict {
                    return Err(Error::Row {
                        line: reject.line,
                        field: reject.field,
                        message: reject.message,
                    });
                }
                log::warn!(
                    "skipping line {}: field {}: {}",
                    reject.line,
                    reject.field,
                    reject.message
                );
                out.rejected.push(reject);
            }
        }
    }
    log::info!(
        "parsed {} rows ({} rejected)",
        out.rows_read(),
        out.rejected.len()
    );
    Ok(out)
}

/// Position of each of the nine known columns inside the header.
struct Columns([usize; 9]);

fn column_positions(header: &csv::StringRecord, schema: &[&str]) -> Result<Columns> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let missing: Vec<String> = schema
        .iter()
        .filter(|s| !names.contains(s))
        .map(|s| s.to_string())
        .collect();
    let unexpected: Vec<String> = names
        .iter()
        .filter(|n| !schema.contains(n))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(Error::Schema {
            missing,
            unexpected,
        });
    }
    let mut pos = [0usize; 9];
    for (slot, name) in pos.iter_mut().zip(SCHEMA) {
        *slot = names.iter().position(|n| *n == name).ok_or_else(|| Error::Schema {
            missing: vec![name.to_owned()],
            unexpected: vec![],
        })?;
    }
    Ok(Columns(pos))
}

fn parse_row(row: &csv::StringRecord, cols: &Columns, line: u64) -> std::result::Result<RawRecord, RowReject> {
    let reject = |field: &'static str, message: String| RowReject {
        line,
        field,
        message,
    };
    let get = |i: usize| -> std::result::Result<&str, RowReject> {
        row.get(cols.0[i])
            .ok_or_else(|| reject(SCHEMA[i], "missing field".to_owned()))
    };

    let dates = get(0)?;
    extract_datetime_features(dates).map_err(|e| reject("Dates", e.to_string()))?;

    let category = get(1)?;
    if category.trim().is_empty() {
        return Err(reject("Category", "empty category".to_owned()));
    }

    let x = parse_coord(get(7)?, 180.0).map_err(|m| reject("X", m))?;
    let y = parse_coord(get(8)?, 90.0).map_err(|m| reject("Y", m))?;

    Ok(RawRecord {
        dates: dates.to_owned(),
        category: category.to_owned(),
        descript: get(2)?.to_owned(),
        day_of_week: get(3)?.to_owned(),
        pd_district: get(4)?.to_owned(),
        resolution: get(5)?.to_owned(),
        address: get(6)?.to_owned(),
        x,
        y,
    })
}

fn parse_coord(s: &str, bound: f64) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() || v.abs() > bound {
        return Err(format!("{v} outside [-{bound}, {bound}]"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "Dates,Category,Descript,DayOfWeek,PdDistrict,Resolution,Address,X,Y\n";

    fn parse(body: &str, strict: bool) -> Result<ParsedCsv> {
        let text = format!("{HEADER}{body}");
        parse_csv_reader(text.as_bytes(), &SCHEMA, ParseOptions { strict })
    }

    #[test]
    fn header_only() {
        let p = parse("", false).unwrap();
        assert!(p.records.is_empty());
        assert_eq!(p.rows_read(), 0);
    }

    #[test]
    fn parses_rows_in_order() {
        let p = parse(
            "2015-05-13 23:53:00,WARRANTS,WARRANT ARREST,Wednesday,NORTHERN,\"ARREST, BOOKED\",OAK ST / LAGUNA ST,-122.425891675136,37.7745985956747\n\
             2015-05-13 23:33:00,OTHER OFFENSES,TRAFFIC VIOLATION ARREST,Wednesday,NORTHERN,\"ARREST, BOOKED\",VANNESS AV / GREENWICH ST,-122.42436302145,37.8004143219856\n",
            false,
        )
        .unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[0].category, "WARRANTS");
        assert_eq!(p.records[1].address, "VANNESS AV / GREENWICH ST");
        assert_eq!(p.records[0].resolution, "ARREST, BOOKED");
        assert!((p.records[1].y - 37.8004143219856).abs() < 1e-12);
    }

    #[test]
    fn bad_hour_rejected_naming_dates() {
        let body = "2015-05-13 24:01:00,WARRANTS,W,Wednesday,NORTHERN,NONE,A ST,-122.4,37.7\n\
                    2015-05-13 23:01:00,WARRANTS,W,Wednesday,NORTHERN,NONE,A ST,-122.4,37.7\n";
        let p = parse(body, false).unwrap();
        assert_eq!(p.records.len(), 1);
        assert_eq!(p.rejected.len(), 1);
        assert_eq!(p.rejected[0].field, "Dates");
        assert_eq!(p.rejected[0].line, 2);

        match parse(body, true) {
            Err(Error::Row { line, field, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(field, "Dates");
            }
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn coordinate_and_category_checks() {
        let p = parse(
            "2015-05-13 23:00:00,,W,Wednesday,NORTHERN,NONE,A ST,-122.4,37.7\n\
             2015-05-13 23:00:00,X,W,Wednesday,NORTHERN,NONE,A ST,-190.0,37.7\n\
             2015-05-13 23:00:00,X,W,Wednesday,NORTHERN,NONE,A ST,-122.4,abc\n\
             2015-05-13 23:00:00,X,W,Wednesday,NORTHERN,NONE,A ST,-120.5,90\n",
            false,
        )
        .unwrap();
        let fields: Vec<_> = p.rejected.iter().map(|r| r.field).collect();
        assert_eq!(fields, ["Category", "X", "Y"]);
        // the y = 90 sentinel is a valid latitude and is kept here
        assert_eq!(p.records.len(), 1);
    }

    #[test]
    fn missing_column_named() {
        let text = "Dates,Category,Descript,DayOfWeek,PdDistrict,Resolution,Address,X\n";
        match parse_csv_reader(text.as_bytes(), &SCHEMA, ParseOptions::default()) {
            Err(Error::Schema { missing, unexpected }) => {
                assert_eq!(missing, ["Y"]);
                assert!(unexpected.is_empty());
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        let err = parse_csv(Path::new("/nonexistent/train.csv"), &SCHEMA, ParseOptions::default());
        assert!(matches!(err, Err(Error::Io { .. })));
    }
}
