//! Steenrod operations on `H*((Z/p)^k; F_p)`.
//!
//! The individual squares `Sq^i` and reduced powers `P^i` are read off as
//! homogeneous components of the multiplicative total operations
//!
//! ```text
//! Sq(x_i) = x_i + x_i^2                        (p = 2)
//! P(x_i)  = x_i,   P(y_i) = y_i + y_i^p         (p odd)
//! ```
//!
//! and the Milnor primitives are built from them by the commutator recursion
//! `Q_{n+1} = [Sq^{2^{n+1}}, Q_n]` or `Q_{n+1} = [P^{p^n}, Q_n]`. This gives an
//! engine for `Q_n` that shares nothing with the derivation formulas in
//! [`crate::milnor`], which is what makes the two usable as mutual oracles.

use std::fmt;

use crate::algebra::{binomial_mod, Context, Element, Monomial};
use crate::error::{Error, Result};
use crate::milnor::{self, Engine};

/// A single Steenrod operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteenrodOp {
    Bockstein,
    Sq(u32),
    P(u32),
    Q(u32),
}

impl SteenrodOp {
    /// Degree shift of the operation at prime `p`.
    pub fn degree_shift(&self, p: u32) -> u64 {
        let p = p as u64;
        match *self {
            SteenrodOp::Bockstein => 1,
            SteenrodOp::Sq(i) => i as u64,
            SteenrodOp::P(i) => 2 * i as u64 * (p - 1),
            SteenrodOp::Q(n) => 2 * p.pow(n) - 1,
        }
    }

    /// Apply the operation, evaluating any `Q_n` with `engine`.
    ///
    /// At `p = 2` the Bockstein is `Sq^1`.
    pub fn apply(&self, e: &Element, engine: Engine) -> Result<Element> {
        match *self {
            SteenrodOp::Bockstein if !e.context().is_odd() => sq(1, e),
            SteenrodOp::Bockstein => bockstein(e),
            SteenrodOp::Sq(i) => sq(i, e),
            SteenrodOp::P(i) => power_op(i, e),
            SteenrodOp::Q(n) => milnor::apply_q(n, e, engine),
        }
    }
}

impl fmt::Display for SteenrodOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SteenrodOp::Bockstein => f.write_str("b"),
            SteenrodOp::Sq(i) => write!(f, "Sq{i}"),
            SteenrodOp::P(i) => write!(f, "P{i}"),
            SteenrodOp::Q(n) => write!(f, "Q{n}"),
        }
    }
}

/// A composite `op_1 * op_2 * ... * op_r`, applied right to left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composite(pub Vec<SteenrodOp>);

impl Composite {
    /// Parse `op ("*" op)*` with `op := ("Q" | "Sq" | "P") index | "b"`.
    pub fn parse(text: &str) -> Result<Composite> {
        let mut ops = Vec::new();
        let mut offset = 0;
        for piece in text.split('*') {
            let trimmed = piece.trim();
            let pos = offset + piece.len() - piece.trim_start().len();
            offset += piece.len() + 1;
            let err = |msg: String| Error::Parse { pos, msg };
            let (kind, digits) = if trimmed == "b" {
                ops.push(SteenrodOp::Bockstein);
                continue;
            } else if let Some(rest) = trimmed.strip_prefix("Sq") {
                ("Sq", rest)
            } else if let Some(rest) = trimmed.strip_prefix('Q') {
                ("Q", rest)
            } else if let Some(rest) = trimmed.strip_prefix('P') {
                ("P", rest)
            } else {
                return Err(err(format!("unknown operation '{trimmed}'")));
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err(format!("operation '{trimmed}' needs a decimal index")));
            }
            let index: u32 = digits
                .parse()
                .map_err(|_| err(format!("index of '{trimmed}' is too large")))?;
            ops.push(match kind {
                "Sq" => SteenrodOp::Sq(index),
                "Q" => SteenrodOp::Q(index),
                _ => SteenrodOp::P(index),
            });
        }
        Ok(Composite(ops))
    }

    pub fn apply(&self, e: &Element, engine: Engine) -> Result<Element> {
        let mut out = e.clone();
        for op in self.0.iter().rev() {
            out = op.apply(&out, engine)?;
        }
        Ok(out)
    }

    pub fn degree_shift(&self, p: u32) -> u64 {
        self.0.iter().map(|op| op.degree_shift(p)).sum()
    }
}

impl fmt::Display for Composite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

fn require_odd(ctx: &Context, op: &'static str) -> Result<()> {
    if ctx.is_odd() {
        Ok(())
    } else {
        Err(Error::WrongPrime { op, p: ctx.p() })
    }
}

fn require_two(ctx: &Context, op: &'static str) -> Result<()> {
    if ctx.is_odd() {
        Err(Error::WrongPrime { op, p: ctx.p() })
    } else {
        Ok(())
    }
}

/// The Bockstein `β`: the derivation with `β(x_i) = y_i` and `β(y_i) = 0`.
pub fn bockstein(e: &Element) -> Result<Element> {
    let ctx = *e.context();
    require_odd(&ctx, "the Bockstein (use Sq1)")?;
    e.map_linear(|m, out| {
        let mut rest = m.ext_mask();
        let mut position = 0;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            let image = m.trade(&ctx, Some(bit), bit as usize, 1)?;
            out.add_signed(image, 1, position % 2 == 1);
            position += 1;
            rest &= rest - 1;
        }
        Ok(())
    })
}

/// Expand the total operation on one monomial, keeping only the part that
/// raises the polynomial weight by `target` (or everything when `None`).
///
/// Each polynomial generator `g` with exponent `a` contributes
/// `Σ_j C(a, j) g^{a + j·step}`.
fn expand_total(
    m: &Monomial,
    ctx: &Context,
    step: u32,
    target: Option<u32>,
    out: &mut Element,
) -> Result<()> {
    let exps = m.exponents();
    // suffix[i] = Σ_{l >= i} exps[l], the most weight still available.
    let mut suffix = vec![0u64; exps.len() + 1];
    for i in (0..exps.len()).rev() {
        suffix[i] = suffix[i + 1] + exps[i] as u64;
    }
    let mut current = exps.to_vec();
    walk(
        m,
        ctx,
        step,
        target.map(u64::from),
        &suffix,
        0,
        1,
        &mut current,
        out,
    )
}

#[allow(clippy::too_many_arguments)]
fn walk(
    m: &Monomial,
    ctx: &Context,
    step: u32,
    remaining: Option<u64>,
    suffix: &[u64],
    index: usize,
    coeff: u32,
    current: &mut Vec<u32>,
    out: &mut Element,
) -> Result<()> {
    if let Some(r) = remaining {
        if r > suffix[index] {
            return Ok(());
        }
    }
    if index == current.len() {
        if remaining.unwrap_or(0) == 0 {
            out.add_term(m.with_exps(ctx, current.clone()), coeff);
        }
        return Ok(());
    }
    let a = m.exponents()[index];
    let max_j = match remaining {
        Some(r) => r.min(a as u64) as u32,
        None => a,
    };
    for j in 0..=max_j {
        let c = binomial_mod(a as u64, j as u64, ctx.p());
        if c == 0 {
            continue;
        }
        current[index] = ctx.check_exponent(a as u64 + j as u64 * step as u64)?;
        let next = ((coeff as u64 * c as u64) % ctx.p() as u64) as u32;
        walk(
            m,
            ctx,
            step,
            remaining.map(|r| r - j as u64),
            suffix,
            index + 1,
            next,
            current,
            out,
        )?;
    }
    current[index] = a;
    Ok(())
}

/// The total square `Sq = Σ_i Sq^i`, a ring endomorphism (`p = 2`).
pub fn total_square(e: &Element) -> Result<Element> {
    let ctx = *e.context();
    require_two(&ctx, "the total square")?;
    e.map_linear(|m, out| expand_total(m, &ctx, 1, None, out))
}

/// `Sq^i(e)`: the degree `deg(e) + i` part of the total square (`p = 2`).
pub fn sq(i: u32, e: &Element) -> Result<Element> {
    let ctx = *e.context();
    require_two(&ctx, "Sq^i")?;
    if e.homogeneous_degree("Sq^i")?.is_none() {
        return Ok(e.clone());
    }
    e.map_linear(|m, out| expand_total(m, &ctx, 1, Some(i), out))
}

/// The total reduced power `P = Σ_i P^i`, a ring endomorphism (odd `p`).
pub fn total_power(e: &Element) -> Result<Element> {
    let ctx = *e.context();
    require_odd(&ctx, "the total reduced power")?;
    e.map_linear(|m, out| expand_total(m, &ctx, ctx.p() - 1, None, out))
}

/// `P^i(e)`: the degree `deg(e) + 2i(p-1)` part of the total power (odd `p`).
pub fn power_op(i: u32, e: &Element) -> Result<Element> {
    let ctx = *e.context();
    require_odd(&ctx, "P^i")?;
    if e.homogeneous_degree("P^i")?.is_none() {
        return Ok(e.clone());
    }
    e.map_linear(|m, out| expand_total(m, &ctx, ctx.p() - 1, Some(i), out))
}

/// `Q_n` through `Q_0 = Sq^1` or `β` and the commutator recursion.
///
/// Inhomogeneous inputs are split into homogeneous components first.
pub fn milnor_q_recursive(n: u32, e: &Element) -> Result<Element> {
    let ctx = *e.context();
    if n > ctx.recursion_cap() {
        return Err(Error::RecursionCap {
            n,
            cap: ctx.recursion_cap(),
        });
    }
    let mut out = Element::zero(&ctx);
    for (_, part) in e.homogeneous_components() {
        out.add_assign(&recursive_homogeneous(n, &part)?)?;
    }
    Ok(out)
}

fn recursive_homogeneous(n: u32, e: &Element) -> Result<Element> {
    let ctx = *e.context();
    if e.is_zero() {
        return Ok(e.clone());
    }
    if n == 0 {
        return if ctx.is_odd() { bockstein(e) } else { sq(1, e) };
    }
    let m = n - 1;
    let p = ctx.p();
    let inner = |x: &Element| recursive_homogeneous(m, x);
    if ctx.is_odd() {
        let power = p.pow(m);
        let left = power_op(power, &inner(e)?)?;
        let right = inner(&power_op(power, e)?)?;
        left.sub(&right)
    } else {
        let power = 1u32 << (m + 1);
        let left = sq(power, &inner(e)?)?;
        let right = inner(&sq(power, e)?)?;
        left.add(&right)
    }
}
