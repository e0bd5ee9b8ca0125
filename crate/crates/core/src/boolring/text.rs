//! Textual polynomial syntax.
//!
//! ```text
//! poly   := term ( '+' term )*
//! term   := factor ( '*'? factor )*
//! factor := CODE | '0' | '1' | '(' poly ')'
//! ```
//!
//! `CODE` is a single ASCII letter naming a variable of the table, so
//! `FTsy` and `F*T*s*y` are the same monomial. Whitespace is ignored
//! everywhere. Parsing always normalizes to the canonical [`BoolPoly`].
//!
//! The canonical rendering lists monomials in descending degree-lexicographic
//! order with table precedence, and the variables of each monomial in table
//! order, e.g. `FyTs + FTs`.

use std::fmt;

use super::{BoolPoly, Monomial, MonomialOrder, RingError, VariableTable};

pub fn parse_poly(text: &str, table: &VariableTable) -> Result<BoolPoly, RingError> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut parser = Parser {
        chars: &chars,
        pos: 0,
        table,
        len: text.len(),
    };
    let p = parser.poly()?;
    if let Some(&(at, c)) = parser.peek_full() {
        return Err(RingError::Parse {
            at,
            message: format!("unexpected '{c}'"),
        });
    }
    Ok(p)
}

struct Parser<'a> {
    chars: &'a [(usize, char)],
    pos: usize,
    table: &'a VariableTable,
    len: usize,
}

impl Parser<'_> {
    fn peek_full(&self) -> Option<&(usize, char)> {
        self.chars.get(self.pos)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn poly(&mut self) -> Result<BoolPoly, RingError> {
        let mut acc = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BoolPoly, RingError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(c) if c == '(' || c == '0' || c == '1' || c.is_ascii_alphabetic() => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<BoolPoly, RingError> {
        let at = self.offset();
        match self.peek() {
            None => Err(RingError::Parse {
                at,
                message: "unexpected end of input".into(),
            }),
            Some('(') => {
                self.pos += 1;
                let inner = self.poly()?;
                if self.peek() != Some(')') {
                    return Err(RingError::Parse {
                        at: self.offset(),
                        message: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('0') => {
                self.pos += 1;
                Ok(BoolPoly::zero())
            }
            Some('1') => {
                self.pos += 1;
                Ok(BoolPoly::one())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let idx = self.table.index_of_code(c).ok_or(RingError::UnknownVariable(c))?;
                Ok(BoolPoly::var(idx))
            }
            Some(c) => Err(RingError::Parse {
                at,
                message: format!("unexpected '{c}'"),
            }),
        }
    }
}

/// Renders a monomial as juxtaposed codes in table order (`1` for the unit).
pub fn format_monomial(m: Monomial, table: &VariableTable) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    m.vars().map(|v| table.get(v).map_or('?', |x| x.code)).collect()
}

/// Canonical text of a polynomial.
pub fn format_poly(p: &BoolPoly, table: &VariableTable) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let order = MonomialOrder::default_for(table);
    order
        .sorted_desc(p)
        .into_iter()
        .map(|m| format_monomial(m, table))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// [`fmt::Display`] adapter pairing a polynomial with its table.
pub struct Display<'a> {
    pub poly: &'a BoolPoly,
    pub table: &'a VariableTable,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self.poly, self.table))
    }
}

impl BoolPoly {
    pub fn display<'a>(&'a self, table: &'a VariableTable) -> Display<'a> {
        Display { poly: self, table }
    }
}
