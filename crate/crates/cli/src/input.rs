//! Reading and writing whitespace-separated integers.

use std::fmt;
use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: '{}' is not a 64-bit signed integer",
            self.line, self.column, self.token
        )
    }
}

impl std::error::Error for ParseError {}

/// Parses every whitespace-separated token of `text` as an `i64`. Line and
/// column are 1-based; columns count characters.
pub fn parse_ints(text: &str) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut chars = line.char_indices().peekable();
        let mut column = 0;
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                column += 1;
                continue;
            }
            let token_column = column + 1;
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                end = i + c.len_utf8();
                column += 1;
                chars.next();
            }
            let token = &line[start..end];
            out.push(token.parse().map_err(|_| ParseError {
                line: ln + 1,
                column: token_column,
                token: token.to_string(),
            })?);
        }
    }
    Ok(out)
}

pub fn write_ints(out: &mut impl Write, values: &[i64]) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    for v in values {
        writeln!(w, "{v}")?;
    }
    w.flush()
}
