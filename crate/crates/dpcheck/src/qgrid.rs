//! Plain-text rational matrices: one row per line, entries `p/q` or `p`
//! separated by whitespace or commas. `#` starts a comment.

use dpcheck_core::terms::Rational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QGridError {
    #[error("line {line}: `{token}` is not a rational")]
    BadEntry { line: usize, token: String },
    #[error("line {line}: zero denominator in `{token}`")]
    ZeroDenominator { line: usize, token: String },
    #[error("line {line}: row has {found} entries, expected {expected}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("the matrix has no rows")]
    Empty,
}

pub fn parse_grid(text: &str) -> Result<Vec<Vec<Rational>>, QGridError> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut row = Vec::new();
        for token in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if token.split_once('/').is_some_and(|(_, d)| d.trim_start_matches(['+', '-']).chars().all(|c| c == '0')) {
                return Err(QGridError::ZeroDenominator { line, token: token.to_string() });
            }
            let q: Rational =
                token.parse().map_err(|_| QGridError::BadEntry { line, token: token.to_string() })?;
            row.push(q);
        }
        if row.is_empty() {
            continue;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(QGridError::Ragged { line, expected: first.len(), found: row.len() });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(QGridError::Empty);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_rationals() {
        let m = parse_grid("# A\n1/2 -3\n\n4, 5/10  # trailing\n").unwrap();
        assert_eq!(m, vec![vec![Rational::new(1, 2), Rational::from_integer(-3)], vec![Rational::from_integer(4), Rational::new(1, 2)]]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_grid("1 2\n3\n"), Err(QGridError::Ragged { line: 2, .. })));
        assert!(matches!(parse_grid("1/0"), Err(QGridError::ZeroDenominator { .. })));
        assert!(matches!(parse_grid("x"), Err(QGridError::BadEntry { .. })));
        assert_eq!(parse_grid("# nothing\n"), Err(QGridError::Empty));
    }
}
