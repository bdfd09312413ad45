//! Parser for the word syntax shared by every file format and the CLI.
//!
//! ```text
//! word   := item*            (the literal `1` is the identity)
//! item   := atom ('^' exp)?
//! atom   := ident | '1' | '[' word ',' word ']' | '(' word ')'
//! exp    := '-'? digits | '(' word ')'
//! ```
//!
//! `[u,v]` is `u^-1 v^-1 u v` and `u^(v)` is `v^-1 u v`.

use crate::error::{Error, Result};
use crate::word::{Symbol, Word};

/// Line and column (both 1-based) of a byte offset.
pub fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

pub fn parse_error(src: &str, offset: usize, msg: impl Into<String>) -> Error {
    let (line, col) = position(src, offset);
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

pub fn parse_word(text: &str) -> Result<Word> {
    parse_word_in(text, 0, text.len())
}

/// Parses `src[start..end]`, reporting errors relative to the whole `src`.
pub fn parse_word_in(src: &str, start: usize, end: usize) -> Result<Word> {
    let mut p = Parser {
        src,
        pos: start,
        end,
    };
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.end {
        return Err(p.err(format!("unexpected `{}`", p.peek().unwrap_or(' '))));
    }
    Ok(w)
}

/// Splits on commas outside any brackets, returning byte ranges of the pieces.
pub fn split_top_level(src: &str, start: usize, end: usize, sep: char) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut piece = start;
    for (i, c) in src[start..end].char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((piece, start + i));
                piece = start + i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((piece, end));
    out
}

/// A comma-separated word list; empty pieces are skipped.
pub fn parse_word_list(src: &str, start: usize, end: usize) -> Result<Vec<Word>> {
    split_top_level(src, start, end, ',')
        .into_iter()
        .filter(|(s, e)| !src[*s..*e].trim().is_empty())
        .map(|(s, e)| parse_word_in(src, s, e))
        .collect()
}

/// A comma-separated list of identifiers.
pub fn parse_name_list(src: &str, start: usize, end: usize) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for (s, e) in split_top_level(src, start, end, ',') {
        let name = src[s..e].trim();
        if name.is_empty() {
            continue;
        }
        if !Symbol::is_valid_name(name) {
            let lead = src[s..e].len() - src[s..e].trim_start().len();
            return Err(parse_error(src, s + lead, format!("invalid name `{name}`")));
        }
        out.push(Symbol::new(name));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        parse_error(self.src, self.pos, msg)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..self.end].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self
            .peek()
            .is_some_and(|c| c.is_whitespace() || c == '*' || c == '.')
        {
            self.bump();
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.err(format!("expected `{want}`, found end of input"))),
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut acc = Word::empty();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')') | Some(']') | Some(',') => return Ok(acc),
                _ => {
                    let item = self.item()?;
                    acc = acc.mul(&item);
                }
            }
        }
    }

    fn item(&mut self) -> Result<Word> {
        let atom = self.atom()?;
        self.skip_ws();
        if self.peek() != Some('^') {
            return Ok(atom);
        }
        self.bump();
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let v = self.word()?;
                self.expect(')')?;
                Ok(atom.conjugate(&v))
            }
            Some(c) if c == '-' || c.is_ascii_digit() => {
                let start = self.pos;
                self.bump();
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
                let n: i64 = self.src[start..self.pos]
                    .parse()
                    .map_err(|_| parse_error(self.src, start, "malformed exponent"))?;
                Ok(atom.pow(n))
            }
            _ => Err(self.err("expected exponent after `^`")),
        }
    }

    fn atom(&mut self) -> Result<Word> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.bump();
                let u = self.word()?;
                self.expect(',')?;
                let v = self.word()?;
                self.expect(']')?;
                Ok(Word::commutator(&u, &v))
            }
            Some('(') => {
                self.bump();
                let u = self.word()?;
                self.expect(')')?;
                Ok(u)
            }
            Some('1') => {
                self.bump();
                if self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    return Err(self.err("identifiers must start with a letter"));
                }
                Ok(Word::empty())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.bump();
                }
                Ok(Word::gen(&self.src[start..self.pos]))
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn basic_forms() {
        assert_eq!(w("1"), Word::empty());
        assert_eq!(w(""), Word::empty());
        assert_eq!(w("a^2 b^-2").to_string(), "a a b^-1 b^-1");
        assert_eq!(w("[a,b]").to_string(), "a^-1 b^-1 a b");
        assert_eq!(w("(c)^(z)").to_string(), "z^-1 c z");
        assert_eq!(w("(a b)^-1"), w("b^-1 a^-1"));
        assert_eq!(w("[x1, y1][x2,y2]").len(), 8);
        assert_eq!(w("a*b"), w("a b"));
    }

    #[test]
    fn errors_carry_position() {
        match parse_word("a b\n  c ^ ") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 7)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_word("[a b]"),
            Err(Error::Parse {
                line: 1,
                col: 5,
                ..
            })
        ));
        assert!(parse_word("a $").is_err());
        assert!(parse_word("1a").is_err());
    }

    #[test]
    fn top_level_split() {
        let s = "[a,b], c, (d)^(e)";
        let words = parse_word_list(s, 0, s.len()).unwrap();
        assert_eq!(words.len(), 3);
        assert_eq!(words[0], w("a^-1 b^-1 a b"));
    }
}
