//! CSV ingestion and the bundled GDP fixture.
//!
//! Accepted input is a CSV file with one observation per row. A header row
//! is optional and detected by the first row failing to parse as numbers.
//! Files with several columns need a header and a column name. Every data
//! row must parse; nothing is skipped silently.

use crate::error::{Error, Result};
use crate::estimators::Sample;

const GDP2023_CSV: &str = include_str!("../data/gdp2023.csv");

/// Raw text of the bundled 2023 GDP per capita table.
pub fn gdp2023_csv() -> &'static str {
    GDP2023_CSV
}

/// `(country, GDP per capita)` rows of the bundled fixture, in file order.
pub fn gdp2023_rows() -> Vec<(String, f64)> {
    let mut reader = csv::Reader::from_reader(GDP2023_CSV.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.expect("bundled fixture is valid CSV");
            (r[0].to_string(), r[1].parse().expect("bundled fixture is numeric"))
        })
        .collect()
}

/// The bundled fixture as a sample, in file order.
pub fn gdp2023() -> Sample {
    parse_dataset(GDP2023_CSV.as_bytes(), Some("gdp_per_capita")).expect("bundled fixture parses")
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    let text = field.trim();
    let value: f64 = text.parse().map_err(|_| Error::Parse { line, message: format!("{text:?} is not a number") })?;
    if !value.is_finite() {
        return Err(Error::Parse { line, message: format!("{text:?} is not finite") });
    }
    if value < 0.0 {
        return Err(Error::Parse { line, message: format!("{text} is negative") });
    }
    Ok(value)
}

fn is_numeric_row(record: &csv::StringRecord) -> bool {
    record.iter().all(|f| f.trim().parse::<f64>().is_ok())
}

/// Parses CSV bytes into a sample, keeping row order.
pub fn parse_dataset(input: &[u8], column: Option<&str>) -> Result<Sample> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, record));
    }
    if rows.is_empty() {
        return Err(Error::InvalidSample("input contains no rows".into()));
    }

    let header = if is_numeric_row(&rows[0].1) { None } else { Some(rows.remove(0).1) };
    let width = header.as_ref().map_or(rows.first().map_or(0, |r| r.1.len()), |h| h.len());

    let index = match (column, &header) {
        (Some(name), Some(h)) => h.iter().position(|f| f == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("no column named {name:?}; header is {:?}", h.iter().collect::<Vec<_>>()),
        })?,
        (Some(name), None) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("column {name:?} requested but the file has no header"),
            })
        }
        (None, _) if width == 1 => 0,
        (None, _) => {
            return Err(Error::Parse { line: 1, message: format!("input has {width} columns; choose one by name") })
        }
    };

    let mut values = Vec::with_capacity(rows.len());
    for (line, record) in &rows {
        if record.len() != width {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        values.push(parse_value(&record[index], *line)?);
    }
    if values.is_empty() {
        return Err(Error::InvalidSample("input contains a header but no data rows".into()));
    }
    Sample::new(values)
}

/// Parses a list of sample sizes such as `10,30,50` or `10..200:10`
/// (inclusive range with step). Sizes must be positive and distinct.
pub fn parse_size_list(text: &str) -> Result<Vec<usize>> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let number = |s: &str| -> Result<usize> {
        s.trim().parse::<usize>().map_err(|_| bad(format!("{:?} is not a non-negative integer", s.trim())))
    };
    let mut sizes = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(bad("empty entry in size list".into()));
        }
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (number(hi)?, number(step)?),
                None => (number(rest)?, 1),
            };
            let lo = number(lo)?;
            if step == 0 || hi < lo {
                return Err(bad(format!("range {item:?} needs lo <= hi and a positive step")));
            }
            if (hi - lo) / step >= 100_000 {
                return Err(bad(format!("range {item:?} is too long")));
            }
            sizes.extend((lo..=hi).step_by(step));
        } else {
            sizes.push(number(item)?);
        }
    }
    if let Some(z) = sizes.iter().find(|&&n| n == 0) {
        return Err(bad(format!("sample size {z} must be positive")));
    }
    let mut seen = sizes.clone();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(bad("sample sizes must be distinct".into()));
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_rows() {
        let rows = gdp2023_rows();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0], ("Guyana".to_string(), 49315.16));
        assert_eq!(rows[10], ("Bolivia".to_string(), 9843.97));
        let s = gdp2023();
        assert_eq!(s.len(), 11);
        assert_eq!(s.values()[5], 19018.24);
    }

    #[test]
    fn headerless_single_column() {
        let s = parse_dataset(b"1\n2\n3\n", None).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        let s = parse_dataset(b" 1.5 \r\n\n2e1\n", None).unwrap();
        assert_eq!(s.values(), &[1.5, 20.0]);
    }

    #[test]
    fn header_and_named_column() {
        let s = parse_dataset(b"income\n4\n5\n", None).unwrap();
        assert_eq!(s.values(), &[4.0, 5.0]);
        let s = parse_dataset(b"id,income\n1,4\n2,5\n", Some("income")).unwrap();
        assert_eq!(s.values(), &[4.0, 5.0]);
        assert!(parse_dataset(b"id,income\n1,4\n", Some("wealth")).is_err());
        assert!(parse_dataset(b"id,income\n1,4\n", None).is_err());
        assert!(parse_dataset(b"1,4\n2,5\n", Some("income")).is_err());
    }

    #[test]
    fn bad_rows_are_errors() {
        match parse_dataset(b"x\n1\nabc\n3\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_dataset(b"1\n-2\n", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_dataset(b"1\nNaN\n", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_dataset(b"1\ninf\n", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_dataset(b"a,b\n1,2\n3\n", Some("a")), Err(Error::Parse { .. })));
        assert!(matches!(parse_dataset(b"0\n0\n", None), Err(Error::InvalidSample(_))));
        assert!(matches!(parse_dataset(b"", None), Err(Error::InvalidSample(_))));
        assert!(matches!(parse_dataset(b"value\n", None), Err(Error::InvalidSample(_))));
    }

    #[test]
    fn size_lists() {
        assert_eq!(parse_size_list("10,30,50,100,200").unwrap(), vec![10, 30, 50, 100, 200]);
        assert_eq!(parse_size_list("10..50:20").unwrap(), vec![10, 30, 50]);
        assert_eq!(parse_size_list("3..5, 9").unwrap(), vec![3, 4, 5, 9]);
        for bad in ["", "0", "5,5", "a", "10..5", "1..10:0", "1,,2", "-3"] {
            assert!(parse_size_list(bad).is_err(), "{bad}");
        }
    }
}
