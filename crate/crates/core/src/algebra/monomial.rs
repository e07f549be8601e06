use std::cmp::Ordering;

use super::Context;
use crate::error::{Error, Result};

/// A basis element `x_S · y^a` (odd `p`) or `x^a` (`p = 2`).
///
/// Bit `i` of the exterior mask stands for generator `x_{i+1}`; the exterior
/// factors are always read in increasing index order, which fixes the sign of
/// the basis element. At `p = 2` the mask is always empty and `exps` holds the
/// exponents of the polynomial generators `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    ext: u64,
    exps: Vec<u32>,
}

#[inline]
fn bits_above(j: u32) -> u64 {
    if j >= 63 {
        0
    } else {
        !0u64 << (j + 1)
    }
}

/// Number of transpositions needed to sort the concatenation `a ++ b` of two
/// increasing exterior index lists.
#[inline]
pub(crate) fn koszul_inversions(a: u64, b: u64) -> u32 {
    let mut count = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        count += (a & bits_above(j)).count_ones();
        rest &= rest - 1;
    }
    count
}

impl Monomial {
    pub fn one(ctx: &Context) -> Self {
        Monomial {
            degree: 0,
            ext: 0,
            exps: vec![0; ctx.k()],
        }
    }

    /// Build a monomial from an exterior mask and an exponent vector of length `k`.
    pub fn from_parts(ctx: &Context, ext: u64, exps: Vec<u32>) -> Result<Self> {
        if exps.len() != ctx.k() {
            return Err(Error::Assertion(format!(
                "exponent vector has length {}, expected {}",
                exps.len(),
                ctx.k()
            )));
        }
        if ext != 0 && !ctx.is_odd() {
            return Err(Error::WrongPrime {
                op: "exterior generator",
                p: ctx.p(),
            });
        }
        if ctx.k() < 64 && ext >> ctx.k() != 0 {
            let index = 64 - ext.leading_zeros() as usize;
            return Err(Error::GeneratorIndex { index, k: ctx.k() });
        }
        for &e in &exps {
            ctx.check_exponent(e as u64)?;
        }
        Ok(Self::assemble(ctx, ext, exps))
    }

    fn assemble(ctx: &Context, ext: u64, exps: Vec<u32>) -> Self {
        let poly: u32 = exps.iter().sum();
        Monomial {
            degree: ext.count_ones() + ctx.poly_weight() * poly,
            ext,
            exps,
        }
    }

    /// The degree-one generator `x_index` (1-based).
    pub fn x(ctx: &Context, index: usize) -> Result<Self> {
        ctx.check_index(index)?;
        let mut exps = vec![0; ctx.k()];
        if ctx.is_odd() {
            Ok(Self::assemble(ctx, 1 << (index - 1), exps))
        } else {
            exps[index - 1] = 1;
            Ok(Self::assemble(ctx, 0, exps))
        }
    }

    /// The polynomial generator `y_index` raised to `exponent` (odd `p` only).
    pub fn y_pow(ctx: &Context, index: usize, exponent: u32) -> Result<Self> {
        if !ctx.is_odd() {
            return Err(Error::WrongPrime {
                op: "generator y",
                p: ctx.p(),
            });
        }
        ctx.check_index(index)?;
        ctx.check_exponent(exponent as u64)?;
        let mut exps = vec![0; ctx.k()];
        exps[index - 1] = exponent;
        Ok(Self::assemble(ctx, 0, exps))
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn ext_mask(&self) -> u64 {
        self.ext
    }

    #[inline]
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// 1-based indices of the exterior factors, increasing.
    pub fn exterior_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.ext.count_ones() as usize);
        let mut rest = self.ext;
        while rest != 0 {
            out.push(rest.trailing_zeros() as usize + 1);
            rest &= rest - 1;
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// Product of two monomials: `None` when an exterior generator repeats,
    /// otherwise the product and whether it carries a minus sign.
    pub fn mul(&self, other: &Monomial, ctx: &Context) -> Result<Option<(Monomial, bool)>> {
        if self.ext & other.ext != 0 {
            return Ok(None);
        }
        let negative = koszul_inversions(self.ext, other.ext) % 2 == 1;
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(ctx.check_exponent(*a as u64 + *b as u64)?);
        }
        let ext = self.ext | other.ext;
        Ok(Some((
            Monomial {
                degree: self.degree + other.degree,
                ext,
                exps,
            },
            negative,
        )))
    }

    /// Same monomial with exterior bit `clear_bit` removed and `delta` added
    /// to the polynomial exponent at 0-based `index`.
    pub(crate) fn trade(
        &self,
        ctx: &Context,
        clear_bit: Option<u32>,
        index: usize,
        delta: u64,
    ) -> Result<Monomial> {
        let mut ext = self.ext;
        if let Some(bit) = clear_bit {
            ext &= !(1u64 << bit);
        }
        let mut exps = self.exps.clone();
        exps[index] = ctx.check_exponent(exps[index] as u64 + delta)?;
        Ok(Self::assemble(ctx, ext, exps))
    }

    pub(crate) fn with_exps(&self, ctx: &Context, exps: Vec<u32>) -> Monomial {
        Self::assemble(ctx, self.ext, exps)
    }
}

/// Lexicographic comparison of the increasing index lists encoded by two masks.
fn cmp_index_lists(a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let d = diff.trailing_zeros();
    // Both lists agree below `d` and exactly one of them contains `d`. That
    // list is the smaller one unless the other list has nothing after `d`.
    let a_has_d = a & (1 << d) != 0;
    let other = if a_has_d { b } else { a };
    let has_d_is_smaller = other & bits_above(d) != 0;
    if a_has_d == has_d_is_smaller {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| cmp_index_lists(self.ext, other.ext))
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == parts {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts, prefix, out);
        prefix.pop();
    }
}

/// Every basis monomial of the given degree, in canonical order. Exhaustive,
/// so only sensible for small `k` and degree.
pub fn basis(ctx: &Context, degree: u32) -> Vec<Monomial> {
    let k = ctx.k();
    let mut out = Vec::new();
    let masks: Vec<u64> = if ctx.is_odd() {
        assert!(
            k <= 24,
            "basis enumeration is meant for small generator counts"
        );
        (0..1u64 << k)
            .filter(|m| m.count_ones() <= degree && (degree - m.count_ones()).is_multiple_of(2))
            .collect()
    } else {
        vec![0]
    };
    for ext in masks {
        let poly = (degree - ext.count_ones()) / ctx.poly_weight();
        let mut exps = Vec::new();
        compositions(poly, k, &mut Vec::with_capacity(k), &mut exps);
        for e in exps {
            if e.iter().all(|&v| v <= ctx.exp_cap()) {
                out.push(Monomial::assemble(ctx, ext, e));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_list(mask: u64) -> Vec<u32> {
        (0..64).filter(|i| mask & (1 << i) != 0).collect()
    }

    #[test]
    fn index_list_order_matches_vec_order() {
        for a in 0u64..64 {
            for b in 0u64..64 {
                assert_eq!(
                    cmp_index_lists(a, b),
                    sorted_list(a).cmp(&sorted_list(b)),
                    "{a:b} vs {b:b}"
                );
            }
        }
    }

    /// Brute-force sign: bubble-sort the concatenated list and count swaps.
    fn bubble_swaps(a: u64, b: u64) -> u32 {
        let mut v = sorted_list(a);
        v.extend(sorted_list(b));
        let mut swaps = 0;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    swaps += 1;
                }
            }
        }
        swaps
    }

    #[test]
    fn koszul_counts_transpositions() {
        for a in 0u64..32 {
            for b in 0u64..32 {
                if a & b == 0 {
                    assert_eq!(koszul_inversions(a, b), bubble_swaps(a, b));
                }
            }
        }
    }

    #[test]
    fn degrees() {
        let c3 = Context::new(3, 3).unwrap();
        let m = Monomial::from_parts(&c3, 0b111, vec![0, 0, 0]).unwrap();
        assert_eq!(m.degree(), 3);
        let m = Monomial::from_parts(&c3, 0, vec![3, 1, 0]).unwrap();
        assert_eq!(m.degree(), 8);
        let c2 = Context::new(2, 2).unwrap();
        let m = Monomial::from_parts(&c2, 0, vec![4, 2]).unwrap();
        assert_eq!(m.degree(), 6);
        assert!(Monomial::from_parts(&c2, 1, vec![0, 0]).is_err());
    }

    #[test]
    fn exponent_cap_enforced() {
        let ctx = Context::new(2, 1).unwrap().with_exp_cap(8);
        assert!(Monomial::from_parts(&ctx, 0, vec![9]).is_err());
        let a = Monomial::from_parts(&ctx, 0, vec![5]).unwrap();
        assert!(matches!(
            a.mul(&a, &ctx),
            Err(Error::ExponentCap {
                exponent: 10,
                cap: 8
            })
        ));
    }

    #[test]
    fn basis_sizes() {
        // p = 2, k = 2: monomials of degree d are x1^a x2^(d-a).
        let c2 = Context::new(2, 2).unwrap();
        assert_eq!(basis(&c2, 5).len(), 6);
        // p = 3, k = 2, degree 3: x1 y_j, x2 y_j (4 of them).
        let c3 = Context::new(3, 2).unwrap();
        assert_eq!(basis(&c3, 3).len(), 4);
        // degree 2: y1, y2, x1x2.
        assert_eq!(basis(&c3, 2).len(), 3);
        for d in 0..8 {
            assert!(basis(&c3, d).iter().all(|m| m.degree() == d));
        }
    }
}
