//! 1-based `u{j}` / `v{i}` vertex labels.

use crate::CliError;

pub fn col_label(j: usize) -> String {
    format!("u{}", j + 1)
}

pub fn dup_col_label(j: usize) -> String {
    format!("u{}*", j + 1)
}

pub fn row_label(i: usize) -> String {
    format!("v{}", i + 1)
}

pub fn row_labels(rows: &[usize]) -> Vec<String> {
    rows.iter().map(|&i| row_label(i)).collect()
}

pub fn col_labels(cols: &[usize]) -> Vec<String> {
    cols.iter().map(|&j| col_label(j)).collect()
}

/// Parses a comma-separated row list such as `v1,v6` or `1,6` into
/// 0-based indices below `m`. An empty string or `none` means no rows.
pub fn parse_row_list(text: &str, m: usize) -> Result<Vec<usize>, CliError> {
    let text = text.trim();
    if text.is_empty() || text.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let digits = tok.strip_prefix(['v', 'V']).unwrap_or(tok);
            match digits.parse::<usize>() {
                Ok(n) if (1..=m).contains(&n) => Ok(n - 1),
                Ok(_) => Err(CliError::Usage(format!(
                    "row label '{tok}' out of range (pattern has {m} rows)"
                ))),
                Err(_) => Err(CliError::Usage(format!("cannot parse row label '{tok}'"))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_row_lists() {
        assert_eq!(parse_row_list("v1,v6", 8).unwrap(), vec![0, 5]);
        assert_eq!(parse_row_list(" 2 , V3 ", 3).unwrap(), vec![1, 2]);
        assert!(parse_row_list("", 3).unwrap().is_empty());
        assert!(parse_row_list("none", 3).unwrap().is_empty());
        assert!(parse_row_list("v9", 8).is_err());
        assert!(parse_row_list("v0", 8).is_err());
        assert!(parse_row_list("x1", 8).is_err());
    }
}
