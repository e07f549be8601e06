//! Milnor primitives `Q_n` and the composites `Q_n ··· Q_1 Q_0`.
//!
//! Three routes to the same numbers:
//!
//! * [`milnor_q_derivation`]: `Q_n` as the graded derivation with
//!   `Q_n(x) = x^{2^{n+1}}` at `p = 2`, and `Q_n(x_i) = y_i^{p^n}`, `Q_n(y_i) = 0`
//!   at odd `p`;
//! * [`crate::steenrod::milnor_q_recursive`]: the commutator recursion through
//!   `Sq^i` / `P^i`;
//! * [`closed_form`]: the sum over [`Assignment`]s of exponents to the
//!   factors of `x_1 ··· x_m`, signed by [`sign_exponent`].

use std::fmt;

use crate::algebra::{Context, Element, Monomial};
use crate::error::{Error, Result};
use crate::steenrod;

/// Which evaluator computes `Q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Derivation,
    Recursive,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Derivation => f.write_str("derivation"),
            Engine::Recursive => f.write_str("recursive"),
        }
    }
}

/// Exponent added to the hit generator: `2^{n+1} - 1` at `p = 2`, `p^n` at odd `p`.
fn q_exponent_delta(n: u32, ctx: &Context) -> Result<u64> {
    let overflow = || Error::ExponentCap {
        exponent: u64::MAX,
        cap: ctx.exp_cap(),
    };
    if ctx.is_odd() {
        (ctx.p() as u64).checked_pow(n).ok_or_else(overflow)
    } else {
        1u64.checked_shl(n + 1)
            .filter(|&v| n + 1 < 64 && v > 0)
            .map(|v| v - 1)
            .ok_or_else(overflow)
    }
}

/// `Q_n` evaluated as a graded derivation on each monomial.
pub fn milnor_q_derivation(n: u32, e: &Element) -> Result<Element> {
    let ctx = *e.context();
    let delta = q_exponent_delta(n, &ctx)?;
    e.map_linear(|m, out| {
        if ctx.is_odd() {
            // Q_n(x_{s_1} ··· x_{s_r} y^a) = Σ_j (-1)^{j-1} ... y_{s_j}^{p^n} ...
            let mut rest = m.ext_mask();
            let mut position = 0;
            while rest != 0 {
                let bit = rest.trailing_zeros();
                let image = m.trade(&ctx, Some(bit), bit as usize, delta)?;
                out.add_signed(image, 1, position % 2 == 1);
                position += 1;
                rest &= rest - 1;
            }
        } else {
            // Q_n(x^a) = Σ_i a_i x^{a + (2^{n+1} - 1) e_i}; even exponents drop out.
            for (i, &a) in m.exponents().iter().enumerate() {
                if a % 2 == 1 {
                    out.add_term(m.trade(&ctx, None, i, delta)?, 1);
                }
            }
        }
        Ok(())
    })
}

pub(crate) fn apply_q(n: u32, e: &Element, engine: Engine) -> Result<Element> {
    match engine {
        Engine::Derivation => milnor_q_derivation(n, e),
        Engine::Recursive => steenrod::milnor_q_recursive(n, e),
    }
}

/// `Q_n Q_{n-1} ··· Q_0 (e)`.
pub fn iterated_q(n: u32, e: &Element, engine: Engine) -> Result<Element> {
    let mut out = e.clone();
    for i in 0..=n {
        if out.is_zero() {
            break;
        }
        out = apply_q(i, &out, engine)?;
    }
    Ok(out)
}

/// Exponent placed on one factor of `x_1 ··· x_m`.
///
/// `Exterior` is the half exponent: the factor stays `x_i` (`y_i^{1/2}`). At
/// odd `p`, `Power(t)` is `y_i^{p^t}`; at `p = 2` it is `x_i^{2^{t+1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Exterior,
    Power(u32),
}

/// A bijection from `{1, ..., m}` onto `{p^n, ..., p, 1, ½, ..., ½}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Slot>,
    n: u32,
    p: u32,
}

impl Assignment {
    pub fn new(values: Vec<Slot>, n: u32, p: u32) -> Result<Self> {
        let m = values.len();
        if m < n as usize + 1 {
            return Err(Error::InvalidAssignment(format!(
                "length {m} is shorter than n + 1 = {}",
                n + 1
            )));
        }
        let mut sorted = values.clone();
        sorted.sort();
        if sorted != Self::sorted_values(n, m) {
            return Err(Error::InvalidAssignment(format!(
                "values are not a permutation of p^{n}, ..., p, 1 and {} halves",
                m - n as usize - 1
            )));
        }
        Ok(Assignment { values, n, p })
    }

    fn sorted_values(n: u32, m: usize) -> Vec<Slot> {
        let mut v = vec![Slot::Exterior; m - n as usize - 1];
        v.extend((0..=n).map(Slot::Power));
        v
    }

    /// All assignments for `(n, m)`, lexicographic in the value vector.
    pub fn enumerate(n: u32, m: usize, p: u32) -> Assignments {
        let first = (m > n as usize).then(|| Self::sorted_values(n, m));
        Assignments { next: first, n, p }
    }

    pub fn values(&self) -> &[Slot] {
        &self.values
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Position (0-based) of the factor carrying `p^t`.
    fn position_of(&self, t: u32) -> usize {
        self.values
            .iter()
            .position(|&v| v == Slot::Power(t))
            .expect("assignment contains every power")
    }

    /// `a_t`: factors left of `p^t` that are `½` or carry a power above `p^t`.
    pub fn level_count(&self, t: u32) -> u32 {
        let at = self.position_of(t);
        self.values[..at]
            .iter()
            .filter(|v| match v {
                Slot::Exterior => true,
                Slot::Power(u) => *u > t,
            })
            .count() as u32
    }

    /// The monomial `y_1^{j_1} ··· y_m^{j_m}` with halves read as `x_i`.
    pub fn monomial(&self, ctx: &Context) -> Result<Monomial> {
        let mut ext = 0u64;
        let mut exps = vec![0u32; ctx.k()];
        for (i, v) in self.values.iter().enumerate() {
            let exponent = match (*v, ctx.is_odd()) {
                (Slot::Exterior, true) => {
                    ext |= 1 << i;
                    continue;
                }
                (Slot::Exterior, false) => 1,
                (Slot::Power(t), true) => (ctx.p() as u64).checked_pow(t).unwrap_or(u64::MAX),
                (Slot::Power(t), false) => 1u64.checked_shl(t + 1).unwrap_or(u64::MAX),
            };
            exps[i] = ctx.check_exponent(exponent)?;
        }
        Monomial::from_parts(ctx, ext, exps)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match v {
                Slot::Exterior => f.write_str("1/2")?,
                Slot::Power(0) => f.write_str("1")?,
                Slot::Power(1) => f.write_str("p")?,
                Slot::Power(t) => write!(f, "p^{t}")?,
            }
        }
        f.write_str(")")
    }
}

/// Iterator over [`Assignment::enumerate`].
#[derive(Debug, Clone)]
pub struct Assignments {
    next: Option<Vec<Slot>>,
    n: u32,
    p: u32,
}

/// Advance to the next permutation in lexicographic order; `false` at the last one.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a larger successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let current = self.next.take()?;
        let mut following = current.clone();
        if next_permutation(&mut following) {
            self.next = Some(following);
        }
        Some(Assignment {
            values: current,
            n: self.n,
            p: self.p,
        })
    }
}

/// The sign exponent `ρ(j) = Σ_{t=1}^{n} a_t`, with the level `t = 0` left out.
///
/// This on its own does not reproduce the signs of `Q_n ··· Q_0(x_1 ··· x_m)`:
/// the Bockstein step contributes `a_0` as well. See [`sign_exponent`].
pub fn rho(j: &Assignment) -> Result<u32> {
    if j.p == 2 {
        return Err(Error::WrongPrime {
            op: "the sign exponent",
            p: 2,
        });
    }
    Ok((1..=j.n).map(|t| j.level_count(t)).sum())
}

/// Which levels contribute to the sign of a closed-form term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SignRule {
    /// `Σ_{t=0}^{n} a_t`: one Koszul count per applied `Q_t`.
    #[default]
    AllLevels,
    /// `Σ_{t=1}^{n} a_t`, i.e. [`rho`].
    SkipLevelZero,
}

/// Exponent of `-1` on the closed-form term for `j`.
///
/// Applying `Q_t` turns the factor at position `i(t)` from `x` into `y^{p^t}`
/// and picks up one sign per exterior factor still standing to its left.
/// Those are exactly the halves of `j` and the positions that only later
/// become `p^u` with `u > t`, which is the count `a_t`.
pub fn sign_exponent(j: &Assignment, rule: SignRule) -> u32 {
    let from = match rule {
        SignRule::AllLevels => 0,
        SignRule::SkipLevelZero => 1,
    };
    (from..=j.n).map(|t| j.level_count(t)).sum()
}

/// `Q_n ··· Q_0 (x_1 ··· x_m)` as a sum over assignments.
///
/// `n = -1` is the empty composite and returns `x_1 ··· x_m`.
pub fn closed_form(n: i64, m: usize, ctx: &Context) -> Result<Element> {
    closed_form_with(n, m, ctx, SignRule::AllLevels)
}

/// [`closed_form`] with an explicit sign rule.
pub fn closed_form_with(n: i64, m: usize, ctx: &Context, rule: SignRule) -> Result<Element> {
    if m == 0 || m > ctx.k() {
        return Err(Error::ClassLength { m, k: ctx.k() });
    }
    if n < -1 || n > u32::MAX as i64 {
        return Err(Error::Level(n));
    }
    if n == -1 {
        return Element::x_product(ctx, m);
    }
    let n = n as u32;
    let mut out = Element::zero(ctx);
    for j in Assignment::enumerate(n, m, ctx.p()) {
        let negative = ctx.is_odd() && sign_exponent(&j, rule) % 2 == 1;
        out.add_signed(j.monomial(ctx)?, 1, negative);
    }
    Ok(out)
}

/// Number of assignments for `(n, m)`: `m! / (m - n - 1)!`, and `0` when `m <= n`.
pub fn monomial_count(n: i64, m: usize) -> u64 {
    if n < -1 || m as i64 <= n {
        return 0;
    }
    let m = m as u64;
    let low = m - (n + 1) as u64;
    (low + 1..=m).product()
}
