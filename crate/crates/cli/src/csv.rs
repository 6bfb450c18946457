//! Reading and writing count series as CSV.
//!
//! Two layouts are accepted: one count per line, or `index,count` pairs with
//! consecutive indices. Either may start with a header line.

use std::fmt::Write as _;
use std::path::Path;

use inarao_core::CountSeries;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsvError {
    #[error("no data rows")]
    Empty,
    #[error("line {line}: expected {expected} column(s), found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: count at index {index} is negative ({value})")]
    Negative {
        line: usize,
        index: usize,
        value: String,
    },
    #[error("line {line}: count at index {index} is not an integer ({value})")]
    NonInteger {
        line: usize,
        index: usize,
        value: String,
    },
    #[error("line {line}: cannot parse {value:?} as a count")]
    Malformed { line: usize, value: String },
    #[error("line {line}: index {value:?} is not a non-negative integer")]
    BadIndex { line: usize, value: String },
    #[error("line {line}: index gap, expected {expected} but found {found}")]
    IndexGap {
        line: usize,
        expected: u64,
        found: u64,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Series(String),
}

impl CsvError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CsvError::Empty | CsvError::Series(_) => None,
            CsvError::ColumnCount { line, .. }
            | CsvError::Negative { line, .. }
            | CsvError::NonInteger { line, .. }
            | CsvError::Malformed { line, .. }
            | CsvError::BadIndex { line, .. }
            | CsvError::IndexGap { line, .. }
            | CsvError::Syntax { line, .. } => Some(*line),
        }
    }
}

fn looks_like_header(fields: &[&str]) -> bool {
    fields
        .iter()
        .any(|f| f.chars().any(|c| c.is_ascii_alphabetic()) && f.parse::<f64>().is_err())
}

fn parse_count(field: &str, line: usize, index: usize) -> Result<u64, CsvError> {
    if let Ok(v) = field.parse::<u64>() {
        return Ok(v);
    }
    if field.parse::<i128>().is_ok() {
        return Err(CsvError::Negative {
            line,
            index,
            value: field.into(),
        });
    }
    match field.parse::<f64>() {
        Ok(v) if v < 0.0 => Err(CsvError::Negative {
            line,
            index,
            value: field.into(),
        }),
        Ok(_) => Err(CsvError::NonInteger {
            line,
            index,
            value: field.into(),
        }),
        Err(_) => Err(CsvError::Malformed {
            line,
            value: field.into(),
        }),
    }
}

/// Parses CSV text into a count series. Line numbers in errors are 1-based;
/// indices name the 1-based position in the series. Blank lines are skipped.
pub fn parse_counts(text: &str) -> Result<CountSeries, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut columns = None;
    let mut next_index = None;
    let mut counts = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CsvError::Syntax {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<&str> = record.iter().collect();
        let expected = *columns.get_or_insert(fields.len());
        if row == 0 && looks_like_header(&fields) {
            if !(1..=2).contains(&fields.len()) {
                return Err(CsvError::ColumnCount {
                    line,
                    expected: 2,
                    found: fields.len(),
                });
            }
            continue;
        }
        if !(1..=2).contains(&expected) {
            return Err(CsvError::ColumnCount {
                line,
                expected: 2,
                found: expected,
            });
        }
        if fields.len() != expected {
            return Err(CsvError::ColumnCount {
                line,
                expected,
                found: fields.len(),
            });
        }
        let position = counts.len() + 1;
        if expected == 2 {
            let index: u64 = fields[0].parse().map_err(|_| CsvError::BadIndex {
                line,
                value: fields[0].into(),
            })?;
            if let Some(want) = next_index {
                if index != want {
                    return Err(CsvError::IndexGap {
                        line,
                        expected: want,
                        found: index,
                    });
                }
            }
            next_index = Some(index + 1);
        }
        counts.push(parse_count(fields[expected - 1], line, position)?);
    }
    if counts.is_empty() {
        return Err(CsvError::Empty);
    }
    CountSeries::new(counts).map_err(|e| CsvError::Series(e.to_string()))
}

pub fn parse_count_csv(path: &Path) -> std::io::Result<Result<CountSeries, CsvError>> {
    Ok(parse_counts(&std::fs::read_to_string(path)?))
}

/// `t,y` with 1-based times.
pub fn render_series(values: &[u64]) -> String {
    let mut out = String::from("t,y\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{v}", i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column() {
        assert_eq!(parse_counts("1\n2\n3\n").unwrap().values(), &[1, 2, 3]);
        assert_eq!(parse_counts("y\n4\n0\n\n\n").unwrap().values(), &[4, 0]);
    }

    #[test]
    fn two_columns_with_header() {
        assert_eq!(parse_counts("t,y\n1,4\n2,0\n").unwrap().values(), &[4, 0]);
        assert_eq!(parse_counts("0, 4\r\n1, 0").unwrap().values(), &[4, 0]);
    }

    #[test]
    fn round_trip() {
        let v = vec![0, 7, 3, 12, 1];
        assert_eq!(parse_counts(&render_series(&v)).unwrap().values(), &v[..]);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        assert_eq!(
            parse_counts("1\n2.5\n"),
            Err(CsvError::NonInteger {
                line: 2,
                index: 2,
                value: "2.5".into()
            })
        );
        assert_eq!(
            parse_counts("t,y\n1,3\n2,-1\n").unwrap_err().line(),
            Some(3)
        );
        assert!(matches!(
            parse_counts("t,y\n1,3\n2,-1\n"),
            Err(CsvError::Negative { index: 2, .. })
        ));
        assert!(matches!(
            parse_counts("1\n-2.5\n"),
            Err(CsvError::Negative { line: 2, .. })
        ));
        assert_eq!(
            parse_counts("1,3\n3,4\n"),
            Err(CsvError::IndexGap {
                line: 2,
                expected: 2,
                found: 3
            })
        );
        assert_eq!(
            parse_counts("1,3\n1,4\n"),
            Err(CsvError::IndexGap {
                line: 2,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            parse_counts("1\n3,4\n"),
            Err(CsvError::ColumnCount {
                line: 2,
                expected: 1,
                found: 2
            })
        );
        assert_eq!(
            parse_counts("1\nabc\n"),
            Err(CsvError::Malformed {
                line: 2,
                value: "abc".into()
            })
        );
        assert_eq!(parse_counts("1\n\n2\n").unwrap().values(), &[1, 2]);
        assert_eq!(
            parse_counts("\"t\",\"y\"\n1,\"3\"\n2,4\n")
                .unwrap()
                .values(),
            &[3, 4]
        );
        assert!(matches!(parse_counts("x,3\n"), Err(CsvError::Empty)));
        assert!(matches!(
            parse_counts("a,1\nb,2\n"),
            Err(CsvError::BadIndex { line: 2, .. })
        ));
        assert_eq!(parse_counts(""), Err(CsvError::Empty));
        assert!(matches!(parse_counts("5\n"), Err(CsvError::Series(_))));
        assert!(matches!(
            parse_counts("1,2,3\n"),
            Err(CsvError::ColumnCount { .. })
        ));
    }
}
