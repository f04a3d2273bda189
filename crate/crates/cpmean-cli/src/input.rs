// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reading a numeric series from a file or stdin.
//!
//! Accepted layouts: whitespace/newline separated numbers, or a single-column
//! CSV with an optional header. Empty fields and `NA` are missing values.

use std::io::Read;
use std::path::Path;

use crate::CliError;

/// Raw series with missing values kept in place.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub values: Vec<Option<f64>>,
}

fn is_missing(tok: &str) -> bool {
    tok.is_empty() || tok.eq_ignore_ascii_case("na")
}

fn parse_token(tok: &str, line: usize) -> Result<Option<f64>, CliError> {
    let tok = tok.trim().trim_matches('"');
    if is_missing(tok) {
        return Ok(None);
    }
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Err(CliError::Data(format!("line {line}: non-finite value '{tok}'"))),
        Err(_) => Err(CliError::Data(format!("line {line}: cannot parse '{tok}' as a number"))),
    }
}

fn looks_numeric(tok: &str) -> bool {
    let t = tok.trim().trim_matches('"');
    is_missing(t) || t.parse::<f64>().is_ok()
}

fn parse_csv(text: &str) -> Result<RawSeries, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Data(format!("CSV error: {e}")))?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.len() > 1 {
            return Err(CliError::Data(format!(
                "line {line}: expected a single column, found {}",
                rec.len()
            )));
        }
        let field = rec.get(0).unwrap_or("");
        if i == 0 && !looks_numeric(field) {
            continue; // header
        }
        values.push(parse_token(field, line)?);
    }
    Ok(RawSeries { values })
}

fn parse_plain(text: &str) -> Result<RawSeries, CliError> {
    let mut values = Vec::new();
    // trailing blank lines are layout, not missing values
    for (i, line) in text.trim_end().lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if i == 0 && toks.len() == 1 && !looks_numeric(toks[0]) {
            continue; // header
        }
        if toks.is_empty() {
            values.push(None);
            continue;
        }
        for t in toks {
            values.push(parse_token(t, i + 1)?);
        }
    }
    Ok(RawSeries { values })
}

pub fn parse_series(text: &str, csv: bool) -> Result<RawSeries, CliError> {
    let series = if csv {
        parse_csv(text)?
    } else {
        parse_plain(text)?
    };
    if series.values.iter().all(Option::is_none) {
        return Err(CliError::Data("input contains no numeric values".into()));
    }
    Ok(series)
}

/// Reads `path`, or stdin when `path` is `-`.
pub fn read_series(path: &Path) -> Result<RawSeries, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Data(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?
    };
    let csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    parse_series(&text, csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_with_missing() {
        let s = parse_series("1\nNA\n2\n\n3\n\n", false).unwrap();
        assert_eq!(s.values, vec![Some(1.0), None, Some(2.0), None, Some(3.0)]);
    }

    #[test]
    fn csv_with_header() {
        let s = parse_series("\"value\"\r\n1\r\nNA\r\n2.5\r\n", true).unwrap();
        assert_eq!(s.values, vec![Some(1.0), None, Some(2.5)]);
        let e = parse_series("a,b\n1,2\n", true).unwrap_err();
        assert!(matches!(e, CliError::Data(_)));
    }

    #[test]
    fn whitespace_rows() {
        let s = parse_series("1 2 3\n4 5\n", false).unwrap();
        assert_eq!(s.values.len(), 5);
    }

    #[test]
    fn nan_is_reported_with_its_line() {
        let e = parse_series("1\n2\nNaN\n", false).unwrap_err();
        assert!(e.to_string().contains("line 3"));
    }
}
