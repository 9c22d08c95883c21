//! Text basis files: a line holding `n`, then `n` rows where row `i` lists
//! coordinate `i` of every column. Lines starting with `#` are comments.

use latsmooth_core::Basis;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("basis file is empty")]
    Empty,
    #[error("line {line}: expected the dimension as a positive integer, found {text:?}")]
    Dimension { line: usize, text: String },
    #[error("line {line}: malformed number {token:?}")]
    Number { line: usize, token: String },
    #[error("line {line}: expected {expected} entries, found {got}")]
    RowLength { line: usize, expected: usize, got: usize },
    #[error("expected {expected} coordinate rows, found {got}")]
    MissingRows { expected: usize, got: usize },
    #[error("line {line}: unexpected data after the last row")]
    Trailing { line: usize },
    #[error(transparent)]
    Basis(#[from] latsmooth_core::Error),
}

pub fn parse_basis(text: &str) -> Result<Basis, ParseError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, head) = lines.next().ok_or(ParseError::Empty)?;
    let n: usize = match head.parse() {
        Ok(n) if n >= 1 => n,
        _ => return Err(ParseError::Dimension { line, text: head.to_string() }),
    };
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines {
        if rows.len() == n {
            return Err(ParseError::Trailing { line });
        }
        let row = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| ParseError::Number { line, token: t.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(ParseError::RowLength { line, expected: n, got: row.len() });
        }
        rows.push(row);
    }
    if rows.len() < n {
        return Err(ParseError::MissingRows { expected: n, got: rows.len() });
    }
    Ok(Basis::from_rows(&rows)?)
}

/// Inverse of [`parse_basis`]; numbers use the shortest round-trip form.
pub fn format_basis(b: &Basis) -> String {
    let n = b.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", b.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
