//! Text form of elements.
//!
//! ```text
//! element := term ("+" term)*
//! term    := coeff ["*" factor ("*" factor)*] | factor ("*" factor)*
//! factor  := ("x" | "y") index ["^" exponent]
//! ```
//!
//! Coefficients are decimal in `0..p`, whitespace is ignored, and `y`
//! generators only exist at odd primes. A bare coefficient is a constant term,
//! so `0` and `1` are valid elements.

use std::fmt::Write;

use super::{Context, Element, Monomial};
use crate::error::{Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return self.error(format!("expected {what}"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| {
            self.pos = start;
            self.error(format!("{what} {text} is too large"))
        })
    }
}

/// Parse an element in the context `ctx`.
pub fn parse(text: &str, ctx: &Context) -> Result<Element> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut out = Element::zero(ctx);
    loop {
        let (mono, coeff) = term(&mut cur, ctx)?;
        if let Some(mono) = mono {
            out.add_term(mono, coeff);
        }
        if cur.peek().is_none() {
            break;
        }
        if !cur.eat(b'+') {
            return cur.error("expected '+' or end of input");
        }
    }
    Ok(out)
}

/// One term; `None` when the term vanishes (zero coefficient or repeated
/// exterior factor).
fn term(cur: &mut Cursor<'_>, ctx: &Context) -> Result<(Option<Monomial>, u32)> {
    let mut coeff = 1u32;
    let mut mono = Some(Monomial::one(ctx));
    let mut negative = false;
    let mut need_factor = true;
    if matches!(cur.peek(), Some(b'0'..=b'9')) {
        let start = cur.pos;
        let c = cur.number("coefficient")?;
        if c >= ctx.p() as u64 {
            cur.pos = start;
            return cur.error(format!("coefficient {c} is not in 0..{}", ctx.p()));
        }
        coeff = c as u32;
        need_factor = cur.eat(b'*');
    }
    while need_factor {
        let f = factor(cur, ctx)?;
        mono = match mono {
            Some(m) => m.mul(&f, ctx)?.map(|(prod, neg)| {
                negative ^= neg;
                prod
            }),
            None => None,
        };
        need_factor = cur.eat(b'*');
    }
    let coeff = if negative { ctx.negate(coeff) } else { coeff };
    Ok((mono, coeff))
}

fn factor(cur: &mut Cursor<'_>, ctx: &Context) -> Result<Monomial> {
    let start = {
        cur.skip_ws();
        cur.pos
    };
    let gen = match cur.peek() {
        Some(b @ (b'x' | b'y')) => {
            cur.pos += 1;
            b
        }
        _ => return cur.error("expected generator 'x' or 'y'"),
    };
    if gen == b'y' && !ctx.is_odd() {
        cur.pos = start;
        return cur.error("generator y does not exist at p = 2");
    }
    let index = cur.number("generator index")? as usize;
    if index == 0 {
        cur.pos = start;
        return cur.error("generator indices start at 1");
    }
    ctx.check_index(index)?;
    let exponent = if cur.eat(b'^') {
        cur.number("exponent")?
    } else {
        1
    };
    let exponent = ctx.check_exponent(exponent)?;
    match (gen, ctx.is_odd()) {
        (b'x', true) => match exponent {
            0 => Ok(Monomial::one(ctx)),
            1 => Monomial::x(ctx, index),
            _ => {
                cur.pos = start;
                cur.error(format!("exterior generator x{index} squares to zero"))
            }
        },
        (b'x', false) => {
            let mut exps = vec![0; ctx.k()];
            exps[index - 1] = exponent;
            Monomial::from_parts(ctx, 0, exps)
        }
        _ => Monomial::y_pow(ctx, index, exponent),
    }
}

fn write_monomial(out: &mut String, m: &Monomial, ctx: &Context) {
    let mut first = true;
    let mut sep = |out: &mut String| {
        if !first {
            out.push('*');
        }
        first = false;
    };
    let poly = if ctx.is_odd() { 'y' } else { 'x' };
    for (i, &e) in m.exponents().iter().enumerate() {
        if m.ext_mask() & (1 << i) != 0 {
            sep(out);
            let _ = write!(out, "x{}", i + 1);
        }
        match e {
            0 => {}
            1 => {
                sep(out);
                let _ = write!(out, "{poly}{}", i + 1);
            }
            _ => {
                sep(out);
                let _ = write!(out, "{poly}{}^{e}", i + 1);
            }
        }
    }
}

/// Canonical text form: terms from the highest monomial down, `0` for zero.
pub fn format(e: &Element) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let ctx = e.context();
    let mut out = String::new();
    for (i, (m, c)) in e.terms().rev().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        if m.is_one() {
            let _ = write!(out, "{c}");
            continue;
        }
        if c != 1 {
            let _ = write!(out, "{c}*");
        }
        write_monomial(&mut out, m, ctx);
    }
    out
}
