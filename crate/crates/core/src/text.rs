//! Minimal cursor for the canonical element encodings.

use crate::error::{MonoidError, Result};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    /// One-based column of the next unread character.
    pub(crate) fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> MonoidError {
        MonoidError::parse(self.column(), message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    pub(crate) fn unsigned(&mut self) -> Result<u64> {
        let col = self.column();
        let d = self
            .digits()
            .ok_or_else(|| MonoidError::parse(col, "expected a number"))?;
        d.parse()
            .map_err(|_| MonoidError::parse(col, "number out of range"))
    }

    /// Decimal digits as a string, for big integers.
    pub(crate) fn digit_str(&mut self) -> Result<&'a str> {
        let col = self.column();
        self.digits()
            .ok_or_else(|| MonoidError::parse(col, "expected a number"))
    }

    pub(crate) fn signed(&mut self) -> Result<i64> {
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let col = self.column();
        let v = i64::try_from(self.unsigned()?)
            .map_err(|_| MonoidError::parse(col, "number out of range"))?;
        Ok(if negative { -v } else { v })
    }

    /// `{key:value, ...}` with caller-parsed keys and values.
    pub(crate) fn braced_map<K, V>(
        &mut self,
        mut key: impl FnMut(&mut Self) -> Result<K>,
        mut value: impl FnMut(&mut Self) -> Result<V>,
    ) -> Result<Vec<(K, V)>> {
        self.expect('{')?;
        let mut out = Vec::new();
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            let k = key(self)?;
            self.expect(':')?;
            let v = value(self)?;
            out.push((k, v));
            if self.eat('}') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_are_one_based() {
        let mut c = Cursor::new("  {1:+2, 3:-4}");
        let m = c.braced_map(|c| c.unsigned(), |c| c.signed()).unwrap();
        assert_eq!(m, vec![(1, 2), (3, -4)]);
        assert!(c.finish().is_ok());
        let mut c = Cursor::new("{1 2}");
        let err = c.braced_map(|c| c.unsigned(), |c| c.signed()).unwrap_err();
        assert_eq!(err, MonoidError::parse(4, "expected `:`"));
    }
}
