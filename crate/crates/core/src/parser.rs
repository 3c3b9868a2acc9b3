//! Line-oriented constraint language.
//!
//! ```text
//! # first symbol is a or b
//! pos 1 in {a, b}
//! pos 3 not in {c}   # trailing comments are fine
//! ```
//!
//! Each clause names a 1-indexed position, `in` or `not in`, and a braced set
//! of single symbols. `{ } , #`, the backslash and whitespace are written with a
//! backslash escape (`\{`, `\ `). Blank lines and `#` comments are ignored, and
//! a CR before LF is tolerated.
//!
//! Parsing only checks the grammar. Bounds and allow/forbid conflicts are left
//! to [`ConstraintSet::validate`].

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::constraint::{ConstraintKind, ConstraintSet, PositionConstraint, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-indexed line of the offending clause.
    pub line: usize,
    /// 1-indexed column, counted in Unicode scalars.
    pub column: usize,
    pub message: String,
    /// The offending line, without its terminator.
    pub snippet: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl ParseError {
    /// Multi-line rendering with the source line and a caret under the column.
    pub fn render_caret(&self) -> String {
        let pad: String = self
            .snippet
            .chars()
            .take(self.column.saturating_sub(1))
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect();
        format!("{self}\n  {}\n  {pad}^", self.snippet)
    }
}

fn is_ws(c: char) -> bool {
    c == ' ' || c == '\t'
}

fn is_reserved(c: char) -> bool {
    matches!(c, '{' | '}' | ',' | '#' | '\\') || c.is_whitespace()
}

struct LineParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    source: &'a str,
}

impl<'a> LineParser<'a> {
    fn new(source: &'a str, line: usize) -> Self {
        LineParser {
            chars: source.chars().collect(),
            pos: 0,
            line,
            source,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: pos + 1,
            message: message.into(),
            snippet: self.source.to_string(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn describe_here(&self) -> String {
        match self.peek() {
            None => "end of line".to_string(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn skip_ws(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(is_ws) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn require_ws(&mut self, after: &str) -> Result<(), ParseError> {
        if self.skip_ws() == 0 {
            return Err(self.error(format!(
                "expected whitespace after {after}, found {}",
                self.describe_here()
            )));
        }
        Ok(())
    }

    /// A run of characters up to whitespace or punctuation.
    fn word(&mut self) -> (usize, String) {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| !is_ws(c) && !matches!(c, '{' | '}' | ',' | '#'))
        {
            self.pos += 1;
        }
        (start, self.chars[start..self.pos].iter().collect())
    }

    fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn parse_line(&mut self) -> Result<Option<PositionConstraint>, ParseError> {
        self.skip_ws();
        if self.at_end_or_comment() {
            return Ok(None);
        }

        let (start, keyword) = self.word();
        if keyword != "pos" {
            return Err(self.error_at(start, format!("expected `pos`, found `{keyword}`")));
        }
        self.require_ws("`pos`")?;

        let position = self.position()?;
        self.require_ws("the position")?;

        let (start, word) = self.word();
        let kind = match word.as_str() {
            "in" => ConstraintKind::Allowed,
            "not" => {
                self.require_ws("`not`")?;
                let (start, word) = self.word();
                if word != "in" {
                    return Err(
                        self.error_at(start, format!("expected `in` after `not`, found `{word}`"))
                    );
                }
                ConstraintKind::Forbidden
            }
            "" => {
                return Err(self.error_at(
                    start,
                    format!("expected `in` or `not in`, found {}", self.describe_here()),
                ))
            }
            other => {
                return Err(
                    self.error_at(start, format!("expected `in` or `not in`, found `{other}`"))
                )
            }
        };
        self.skip_ws();

        let symbols = self.set()?;
        self.skip_ws();
        if !self.at_end_or_comment() {
            return Err(self.error(format!(
                "unexpected {} after the symbol set",
                self.describe_here()
            )));
        }
        Ok(Some(
            PositionConstraint::new(position, kind, symbols)
                .expect("grammar guarantees a nonempty set"),
        ))
    }

    fn position(&mut self) -> Result<usize, ParseError> {
        let (start, word) = self.word();
        if word.is_empty() {
            return Err(self.error(format!(
                "expected a position number, found {}",
                self.describe_here()
            )));
        }
        if !word.chars().all(|c| c.is_ascii_digit()) {
            return Err(self.error_at(start, format!("expected a position number, found `{word}`")));
        }
        match word.parse::<usize>() {
            Ok(0) => Err(self.error_at(start, "positions start at 1")),
            Ok(n) => Ok(n),
            Err(_) => Err(self.error_at(start, format!("position `{word}` is too large"))),
        }
    }

    fn set(&mut self) -> Result<BTreeSet<Symbol>, ParseError> {
        if self.peek() != Some('{') {
            return Err(self.error(format!("expected `{{`, found {}", self.describe_here())));
        }
        self.pos += 1;
        let mut symbols = BTreeSet::new();
        loop {
            self.skip_ws();
            symbols.insert(self.symbol()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(symbols);
                }
                _ => {
                    return Err(self.error(format!(
                        "expected `,` or `}}`, found {}",
                        self.describe_here()
                    )))
                }
            }
        }
    }

    fn symbol(&mut self) -> Result<Symbol, ParseError> {
        let c = match self.peek() {
            None => return Err(self.error("expected a symbol, found end of line")),
            Some(c) => c,
        };
        if c == '\\' {
            return match self.chars.get(self.pos + 1) {
                Some(&escaped) => {
                    self.pos += 2;
                    Ok(Symbol(escaped))
                }
                None => Err(self.error("backslash at end of line escapes nothing")),
            };
        }
        if is_reserved(c) {
            let hint = if c == '}' {
                "expected a symbol, found `}` (sets may not be empty)".to_string()
            } else {
                format!("expected a symbol, found {c:?} (escape it with a backslash)")
            };
            return Err(self.error(hint));
        }
        self.pos += 1;
        if let Some(next) = self.peek() {
            if !is_ws(next) && !matches!(next, ',' | '}') {
                return Err(self.error(format!(
                    "symbols are single characters; found `{next}` after `{c}`"
                )));
            }
        }
        Ok(Symbol(c))
    }
}

/// Parses constraint text for a string of length `len`.
pub fn parse(text: &str, len: usize) -> Result<ConstraintSet, ParseError> {
    let mut set = ConstraintSet::new(len);
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(c) = LineParser::new(line, i + 1).parse_line()? {
            set.push(c);
        }
    }
    Ok(set)
}

fn write_symbol(out: &mut String, s: Symbol) {
    if is_reserved(s.0) {
        out.push('\\');
    }
    out.push(s.0);
}

/// Canonical text: one clause per position and kind, positions ascending,
/// symbols ascending, lines joined by LF.
pub fn render(cs: &ConstraintSet) -> String {
    let mut grouped: BTreeMap<(usize, ConstraintKind), BTreeSet<Symbol>> = BTreeMap::new();
    for c in cs.constraints() {
        grouped
            .entry((c.position(), c.kind()))
            .or_default()
            .extend(c.symbols().iter().copied());
    }
    let mut lines = Vec::with_capacity(grouped.len());
    for ((position, kind), symbols) in grouped {
        let mut line = format!(
            "pos {position} {} {{",
            match kind {
                ConstraintKind::Allowed => "in",
                ConstraintKind::Forbidden => "not in",
            }
        );
        for (i, s) in symbols.into_iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            write_symbol(&mut line, s);
        }
        line.push('}');
        lines.push(line);
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(position: usize, kind: ConstraintKind, symbols: &str) -> PositionConstraint {
        PositionConstraint::new(position, kind, symbols.chars()).unwrap()
    }

    #[test]
    fn parses_two_clauses() {
        let cs = parse("pos 1 in {a, b}\npos 3 not in {c}", 5).unwrap();
        assert_eq!(cs.len(), 5);
        assert_eq!(
            cs.constraints(),
            &[
                clause(1, ConstraintKind::Allowed, "ab"),
                clause(3, ConstraintKind::Forbidden, "c"),
            ]
        );
    }

    #[test]
    fn empty_and_comment_only_input() {
        assert!(parse("", 3).unwrap().is_empty());
        assert!(parse("\n  \t\n# nothing here\r\n", 3).unwrap().is_empty());
    }

    #[test]
    fn non_numeric_position() {
        let err = parse("pos one in {a}", 3).unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert_eq!(err.snippet, "pos one in {a}");
    }

    #[test]
    fn error_positions() {
        let cases = [
            ("pos 1 in {}", 11),
            ("pos 1 in {ab}", 12),
            ("pos 1 in {a", 12),
            ("pos 1 in a", 10),
            ("pos 0 in {a}", 5),
            ("pos 1 out {a}", 7),
            ("pos 1 not {a}", 11),
            ("pos1 in {a}", 1),
            ("pos 1 in {a} x", 14),
            ("pos 1 in {a,,b}", 13),
            ("pos 1 in {a}}", 13),
            ("pos 1 in {\\", 11),
            ("pos 99999999999999999999999 in {a}", 5),
            ("  position 1 in {a}", 3),
        ];
        for (text, column) in cases {
            let err = parse(text, 3).unwrap_err();
            assert_eq!(err.line, 1, "{text}");
            assert_eq!(err.column, column, "{text}: {err}");
        }
    }

    #[test]
    fn reports_line_of_first_error() {
        let err = parse("pos 1 in {a}\n# ok\npos 2 in {b\npos x", 3).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.snippet, "pos 2 in {b");
    }

    #[test]
    fn escapes_and_comments() {
        let cs = parse(r"pos 2 in {\{, \,, \#, \ , \\, é} # reserved", 2).unwrap();
        let got: String = cs.constraints()[0].symbols().iter().map(|s| s.0).collect();
        let mut want: Vec<char> = "{,# \\é".chars().collect();
        want.sort();
        assert_eq!(got, want.into_iter().collect::<String>());
    }

    #[test]
    fn duplicate_symbols_collapse() {
        let cs = parse("pos 1 in {a,a,b}", 1).unwrap();
        assert_eq!(cs.constraints()[0].symbols().len(), 2);
    }

    #[test]
    fn parse_leaves_validation_alone() {
        let cs = parse("pos 9 in {a}\npos 1 in {a}\npos 1 not in {b}", 2).unwrap();
        assert_eq!(cs.constraints().len(), 3);
        assert!(cs.validate().is_err());
    }

    #[test]
    fn render_examples() {
        let cs =
            ConstraintSet::from_constraints(5, vec![clause(3, ConstraintKind::Forbidden, "c")]);
        assert_eq!(render(&cs), "pos 3 not in {c}");

        let cs = ConstraintSet::from_constraints(5, vec![clause(1, ConstraintKind::Allowed, "ba")]);
        assert_eq!(render(&cs), "pos 1 in {a,b}");

        let cs = ConstraintSet::from_constraints(
            6,
            vec![
                clause(4, ConstraintKind::Allowed, "b"),
                clause(1, ConstraintKind::Allowed, "ac"),
                clause(3, ConstraintKind::Forbidden, "ed"),
            ],
        );
        assert_eq!(
            render(&cs),
            "pos 1 in {a,c}\npos 3 not in {d,e}\npos 4 in {b}"
        );
    }

    #[test]
    fn render_merges_same_kind_and_escapes() {
        let cs = ConstraintSet::from_constraints(
            2,
            vec![
                clause(2, ConstraintKind::Allowed, "}"),
                clause(2, ConstraintKind::Allowed, " a"),
            ],
        );
        let text = render(&cs);
        assert_eq!(text, r"pos 2 in {\ ,a,\}}");
        let back = parse(&text, 2).unwrap();
        assert_eq!(
            back.constraints(),
            &[clause(2, ConstraintKind::Allowed, " a}")]
        );
    }

    #[test]
    fn caret_rendering() {
        let err = parse("pos 1 in {ab}", 2).unwrap_err();
        assert_eq!(err.render_caret(), "1:12: symbols are single characters; found `b` after `a`\n  pos 1 in {ab}\n             ^");
    }
}
