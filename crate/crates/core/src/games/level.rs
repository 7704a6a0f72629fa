//! Level text parsing.
//!
//! A level file is a run of `#key=value` header lines followed by a
//! rectangular ASCII grid. The grid legend is shared across games (each game
//! accepts a subset):
//!
//! ```text
//! w wall      . floor     A avatar    x exit      c city
//! m missile   e alien     b butterfly z zombie    h honey    r rival racer
//! ```
//!
//! Parsing stops at the first problem and reports it with a 1-based line and
//! column, counting header lines, so a bad glyph in a hand-edited file points
//! at the exact character.

use std::collections::BTreeMap;

use thiserror::Error;

/// Every glyph any game may use.
pub const LEGEND: [char; 11] = ['w', '.', 'A', 'x', 'c', 'm', 'e', 'b', 'z', 'h', 'r'];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseLevelError {
    #[error("line {line}: malformed header {text:?} (expected #key=value)")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: bad value for header {key:?}: {msg}")]
    BadHeaderValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("line {line}: header {key:?} is not recognized for {game}")]
    UnknownHeader {
        line: usize,
        key: String,
        game: String,
    },
    #[error("missing required header \"max-ticks\"")]
    MissingMaxTicks,
    #[error("level text contains no grid rows")]
    EmptyGrid,
    #[error("line {line}: grid row is {found} cells wide, expected {expected}")]
    RaggedRow {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("grid must be at least 3x3, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("line {line}, col {col}: glyph {glyph:?} is not in the level legend")]
    UnknownGlyph { line: usize, col: usize, glyph: char },
    #[error("line {line}, col {col}: glyph {glyph:?} is not allowed in {game}")]
    GlyphNotAllowed {
        line: usize,
        col: usize,
        glyph: char,
        game: String,
    },
    #[error("line {line}, col {col}: border cell must be a wall")]
    OpenBorder { line: usize, col: usize },
    #[error("line {line}, col {col}: more than one avatar")]
    DuplicateAvatar { line: usize, col: usize },
    #[error("grid has no avatar 'A'")]
    MissingAvatar,
    #[error("{game}: {msg}")]
    GameRequirement { game: String, msg: String },
}

/// A parsed level: header map plus a validated rectangular glyph grid.
/// Game-specific interpretation (entity extraction, parameter ranges)
/// happens when a game state is built from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap {
    pub width: usize,
    pub height: usize,
    /// Row-major glyphs, `cells[y][x]`.
    pub cells: Vec<Vec<char>>,
    pub headers: BTreeMap<String, String>,
    /// 1-based line number of grid row 0 in the original text.
    pub grid_line_offset: usize,
}

impl LevelMap {
    /// 1-based (line, col) of a grid cell in the source text.
    pub fn source_pos(&self, x: usize, y: usize) -> (usize, usize) {
        (self.grid_line_offset + y, x + 1)
    }
}

/// Parse header lines and the grid; check rectangularity, minimum size,
/// legend membership, and wall borders. Blank lines are allowed only before
/// the grid and after it.
pub fn parse_level_text(text: &str) -> Result<LevelMap, ParseLevelError> {
    let mut headers = BTreeMap::new();
    let mut rows: Vec<Vec<char>> = Vec::new();
    let mut grid_line_offset = 0usize;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if rows.is_empty() {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (key, value) = rest.split_once('=').ok_or(ParseLevelError::BadHeader {
                    line: line_no,
                    text: line.to_string(),
                })?;
                let key = key.trim();
                let value = value.trim();
                if key.is_empty() || value.is_empty() {
                    return Err(ParseLevelError::BadHeader {
                        line: line_no,
                        text: line.to_string(),
                    });
                }
                headers.insert(key.to_string(), value.to_string());
                continue;
            }
            grid_line_offset = line_no;
            rows.push(line.chars().collect());
        } else {
            if line.is_empty() {
                // Tolerate trailing blank lines; reject holes in the grid.
                if text.lines().skip(i).all(|l| l.trim().is_empty()) {
                    break;
                }
                return Err(ParseLevelError::RaggedRow {
                    line: line_no,
                    found: 0,
                    expected: rows[0].len(),
                });
            }
            rows.push(line.chars().collect());
        }
    }

    if rows.is_empty() {
        return Err(ParseLevelError::EmptyGrid);
    }
    let width = rows[0].len();
    let height = rows.len();
    for (y, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(ParseLevelError::RaggedRow {
                line: grid_line_offset + y,
                found: row.len(),
                expected: width,
            });
        }
    }
    if width < 3 || height < 3 {
        return Err(ParseLevelError::TooSmall { width, height });
    }
    for (y, row) in rows.iter().enumerate() {
        for (x, &g) in row.iter().enumerate() {
            if !LEGEND.contains(&g) {
                return Err(ParseLevelError::UnknownGlyph {
                    line: grid_line_offset + y,
                    col: x + 1,
                    glyph: g,
                });
            }
            let on_border = y == 0 || y == height - 1 || x == 0 || x == width - 1;
            if on_border && g != 'w' {
                return Err(ParseLevelError::OpenBorder {
                    line: grid_line_offset + y,
                    col: x + 1,
                });
            }
        }
    }

    Ok(LevelMap {
        width,
        height,
        cells: rows,
        headers,
        grid_line_offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_headers_and_grid() {
        let m = parse_level_text("#max-ticks=100\n#p=0.5\nwwww\nwA.w\nwwww\n").unwrap();
        assert_eq!(m.width, 4);
        assert_eq!(m.height, 3);
        assert_eq!(m.headers.get("max-ticks").map(String::as_str), Some("100"));
        assert_eq!(m.headers.get("p").map(String::as_str), Some("0.5"));
        assert_eq!(m.grid_line_offset, 3);
        assert_eq!(m.cells[1][1], 'A');
        assert_eq!(m.source_pos(1, 1), (4, 2));
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = parse_level_text("#max-ticks=5\nwwww\nwA.w\nwww\n").unwrap_err();
        assert_eq!(
            err,
            ParseLevelError::RaggedRow {
                line: 4,
                found: 3,
                expected: 4
            }
        );
    }

    #[test]
    fn unknown_glyph_reports_line_and_col() {
        let err = parse_level_text("wwww\nwA?w\nwwww\n").unwrap_err();
        assert_eq!(
            err,
            ParseLevelError::UnknownGlyph {
                line: 2,
                col: 3,
                glyph: '?'
            }
        );
    }

    #[test]
    fn open_border_rejected() {
        let err = parse_level_text("wwww\nwA.w\nww.w\n").unwrap_err();
        assert_eq!(err, ParseLevelError::OpenBorder { line: 3, col: 3 });
    }

    #[test]
    fn malformed_header_rejected() {
        let err = parse_level_text("#max-ticks\nwwww\nwA.w\nwwww\n").unwrap_err();
        assert!(matches!(err, ParseLevelError::BadHeader { line: 1, .. }));
    }

    #[test]
    fn too_small_rejected() {
        let err = parse_level_text("ww\nww\n").unwrap_err();
        assert_eq!(
            err,
            ParseLevelError::TooSmall {
                width: 2,
                height: 2
            }
        );
    }

    #[test]
    fn empty_text_rejected() {
        assert_eq!(
            parse_level_text("#max-ticks=5\n").unwrap_err(),
            ParseLevelError::EmptyGrid
        );
    }
}
