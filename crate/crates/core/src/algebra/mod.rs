//! The graded-commutative algebra `H*((Z/p)^k; F_p)`.
//!
//! At `p = 2` this is the polynomial ring `F_2[x_1, ..., x_k]` with every
//! generator in degree one. At odd `p` it is `Λ(x_1, ..., x_k) ⊗ F_p[y_1, ..., y_k]`
//! with `|x_i| = 1`, `|y_i| = 2` and `x_i^2 = 0`.
//!
//! Elements are sparse maps from [`Monomial`] to nonzero coefficients in
//! `1..p`, always kept in canonical form so that structural equality is
//! mathematical equality.

mod arith;
mod element;
mod monomial;
mod parse;
mod random;

pub use arith::{binomial_mod, is_prime};
pub use element::{Degree, Element};
pub use monomial::{basis, Monomial};
pub use parse::parse;
pub use random::{random_element, random_homogeneous};

use crate::error::{Error, Result};

/// Largest supported generator count; exterior subsets are stored as a `u64` mask.
pub const MAX_GENERATORS: usize = 64;

/// Default bound on any single polynomial exponent.
pub const DEFAULT_EXP_CAP: u32 = 1 << 20;

/// The ambient ring: a prime, a generator count and the evaluation caps.
///
/// Two elements can only be combined when their contexts compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    p: u32,
    k: usize,
    exp_cap: u32,
    recursion_cap: u32,
}

impl Context {
    pub fn new(p: u32, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || k > MAX_GENERATORS {
            return Err(Error::GeneratorCount {
                k,
                max: MAX_GENERATORS,
            });
        }
        Ok(Context {
            p,
            k,
            exp_cap: DEFAULT_EXP_CAP,
            recursion_cap: Self::default_recursion_cap(p),
        })
    }

    /// Same prime and caps with a different generator count.
    pub fn with_k(self, k: usize) -> Result<Self> {
        Ok(Context::new(self.p, k)?
            .with_exp_cap(self.exp_cap)
            .with_recursion_cap(self.recursion_cap))
    }

    pub fn with_exp_cap(mut self, exp_cap: u32) -> Self {
        self.exp_cap = exp_cap;
        self
    }

    pub fn with_recursion_cap(mut self, recursion_cap: u32) -> Self {
        self.recursion_cap = recursion_cap;
        self
    }

    /// Highest Milnor index the recursive engine will expand by default.
    pub fn default_recursion_cap(p: u32) -> u32 {
        match p {
            2 => 6,
            3 => 4,
            _ => 3,
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn exp_cap(&self) -> u32 {
        self.exp_cap
    }

    #[inline]
    pub fn recursion_cap(&self) -> u32 {
        self.recursion_cap
    }

    /// True when the ring has exterior generators, i.e. `p` is odd.
    #[inline]
    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// Degree of the polynomial generator (`x_i` at `p = 2`, `y_i` otherwise).
    #[inline]
    pub fn poly_weight(&self) -> u32 {
        if self.is_odd() {
            2
        } else {
            1
        }
    }

    /// Reduce a signed integer into `0..p`.
    #[inline]
    pub fn reduce(&self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }

    /// `-c mod p` for `c` in `0..p`.
    #[inline]
    pub fn negate(&self, c: u32) -> u32 {
        if c == 0 {
            0
        } else {
            self.p - c
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.k {
            Err(Error::GeneratorIndex { index, k: self.k })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_exponent(&self, exponent: u64) -> Result<u32> {
        if exponent > self.exp_cap as u64 {
            Err(Error::ExponentCap {
                exponent,
                cap: self.exp_cap,
            })
        } else {
            Ok(exponent as u32)
        }
    }
}
