use std::collections::BTreeMap;
use std::fmt;

use super::arith::mul_mod;
use super::{Context, Monomial};
use crate::error::{Error, Result};

/// Degree of a nonzero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Homogeneous(u32),
    Mixed,
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Homogeneous(d) => write!(f, "{d}"),
            Degree::Mixed => f.write_str("mixed"),
        }
    }
}

/// A finite `F_p`-linear combination of monomials in canonical form.
///
/// Coefficients are stored in `1..p`; zero coefficients are never kept, so the
/// derived equality is equality in the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    ctx: Context,
    terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero(ctx: &Context) -> Self {
        Element {
            ctx: *ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Context) -> Self {
        Self::from_monomial(ctx, Monomial::one(ctx), 1)
    }

    pub fn from_monomial(ctx: &Context, mono: Monomial, coeff: u32) -> Self {
        let mut e = Self::zero(ctx);
        e.add_term(mono, coeff);
        e
    }

    pub fn x(ctx: &Context, index: usize) -> Result<Self> {
        Ok(Self::from_monomial(ctx, Monomial::x(ctx, index)?, 1))
    }

    pub fn y(ctx: &Context, index: usize) -> Result<Self> {
        Ok(Self::from_monomial(ctx, Monomial::y_pow(ctx, index, 1)?, 1))
    }

    /// The class `x_1 x_2 ... x_m`.
    pub fn x_product(ctx: &Context, m: usize) -> Result<Self> {
        if m > ctx.k() {
            return Err(Error::ClassLength { m, k: ctx.k() });
        }
        let mut out = Self::one(ctx);
        for i in 1..=m {
            out = out.mul(&Self::x(ctx, i)?)?;
        }
        Ok(out)
    }

    #[inline]
    pub fn context(&self) -> &Context {
        &self.ctx
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms.
    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, mono: &Monomial) -> u32 {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    /// Add `coeff · mono` in place; `coeff` may be any integer representative.
    pub fn add_term(&mut self, mono: Monomial, coeff: u32) {
        let p = self.ctx.p();
        let coeff = coeff % p;
        if coeff == 0 {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = (*o.get() + coeff) % p;
                if c == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    /// Add `± coeff · mono` in place.
    pub(crate) fn add_signed(&mut self, mono: Monomial, coeff: u32, negative: bool) {
        let c = if negative {
            self.ctx.negate(coeff % self.ctx.p())
        } else {
            coeff
        };
        self.add_term(mono, c);
    }

    fn check_ctx(&self, other: &Element) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add_assign(&mut self, other: &Element) -> Result<()> {
        self.check_ctx(other)?;
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c);
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.scale(self.ctx.p() - 1)
    }

    pub fn scale(&self, c: u32) -> Element {
        let p = self.ctx.p();
        let c = c % p;
        let mut out = Element::zero(&self.ctx);
        if c != 0 {
            for (m, &v) in &self.terms {
                out.terms.insert(m.clone(), mul_mod(v, c, p));
            }
        }
        out
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.check_ctx(other)?;
        let p = self.ctx.p();
        let mut out = Element::zero(&self.ctx);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                if let Some((m, negative)) = a.mul(b, &self.ctx)? {
                    out.add_signed(m, mul_mod(ca, cb, p), negative);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Element> {
        let mut out = Element::one(&self.ctx);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn degree(&self) -> Result<Degree> {
        let mut iter = self.terms.keys();
        let first = iter.next().ok_or(Error::ZeroDegree)?.degree();
        // Terms are sorted by degree, so the last one decides.
        let last = self.terms.keys().next_back().map_or(first, |m| m.degree());
        Ok(if first == last {
            Degree::Homogeneous(first)
        } else {
            Degree::Mixed
        })
    }

    /// Degree of a homogeneous nonzero element, `None` for zero, error when mixed.
    pub(crate) fn homogeneous_degree(&self, op: &'static str) -> Result<Option<u32>> {
        match self.degree() {
            Err(Error::ZeroDegree) => Ok(None),
            Ok(Degree::Homogeneous(d)) => Ok(Some(d)),
            Ok(Degree::Mixed) => Err(Error::MixedDegree { op }),
            Err(e) => Err(e),
        }
    }

    /// Components grouped by degree, ascending.
    pub fn homogeneous_components(&self) -> Vec<(u32, Element)> {
        let mut out: Vec<(u32, Element)> = Vec::new();
        for (m, &c) in &self.terms {
            match out.last_mut() {
                Some((d, e)) if *d == m.degree() => {
                    e.terms.insert(m.clone(), c);
                }
                _ => {
                    let mut e = Element::zero(&self.ctx);
                    e.terms.insert(m.clone(), c);
                    out.push((m.degree(), e));
                }
            }
        }
        out
    }

    /// The part of `self` in exactly degree `d`.
    pub fn component(&self, d: u32) -> Element {
        Element {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    /// True when every coefficient is `1` or `p - 1`.
    pub fn has_unit_sign_coefficients(&self) -> bool {
        self.terms
            .values()
            .all(|&c| c == 1 || c == self.ctx.p() - 1)
    }

    /// Apply a linear map defined on monomials.
    pub(crate) fn map_linear<F>(&self, mut f: F) -> Result<Element>
    where
        F: FnMut(&Monomial, &mut Element) -> Result<()>,
    {
        let mut out = Element::zero(&self.ctx);
        for (m, &c) in &self.terms {
            let mut image = Element::zero(&self.ctx);
            f(m, &mut image)?;
            out.add_assign(&image.scale(c))?;
        }
        Ok(out)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::format(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    fn ctx(p: u32, k: usize) -> Context {
        Context::new(p, k).unwrap()
    }

    fn el(text: &str, c: &Context) -> Element {
        parse(text, c).unwrap()
    }

    #[test]
    fn additions() {
        let c2 = ctx(2, 2);
        let x1 = Element::x(&c2, 1).unwrap();
        assert!(x1.add(&x1).unwrap().is_zero());

        let c3 = ctx(3, 2);
        let x1 = Element::x(&c3, 1).unwrap();
        assert!(x1.add(&x1.scale(2)).unwrap().is_zero());

        let sum = x1.add(&Element::x(&c3, 2).unwrap()).unwrap();
        assert_eq!(sum.len(), 2);
    }

    #[test]
    fn context_mismatch() {
        let a = Element::x(&ctx(3, 2), 1).unwrap();
        let b = Element::x(&ctx(3, 3), 1).unwrap();
        assert_eq!(a.add(&b), Err(Error::ContextMismatch));
        assert_eq!(a.mul(&b), Err(Error::ContextMismatch));
    }

    #[test]
    fn products() {
        let c3 = ctx(3, 2);
        let x1 = Element::x(&c3, 1).unwrap();
        let x2 = Element::x(&c3, 2).unwrap();
        assert!(x1.mul(&x1).unwrap().is_zero());
        assert_eq!(x2.mul(&x1).unwrap(), el("2*x1*x2", &c3));
        assert_eq!(x2.mul(&x1).unwrap(), x1.mul(&x2).unwrap().neg());

        let c2 = ctx(2, 1);
        let x = Element::x(&c2, 1).unwrap();
        assert_eq!(x.mul(&x).unwrap(), el("x1^2", &c2));
    }

    #[test]
    fn degrees() {
        let c3 = ctx(3, 3);
        assert_eq!(el("x1*x2*x3", &c3).degree(), Ok(Degree::Homogeneous(3)));
        assert_eq!(el("y1^3*y2", &c3).degree(), Ok(Degree::Homogeneous(8)));
        assert_eq!(el("x1 + y1", &c3).degree(), Ok(Degree::Mixed));
        assert_eq!(Element::zero(&c3).degree(), Err(Error::ZeroDegree));
    }

    #[test]
    fn components_split_by_degree() {
        let c3 = ctx(3, 2);
        let e = el("x1 + y1 + y2 + x1*x2*y2", &c3);
        let comps = e.homogeneous_components();
        let degs: Vec<u32> = comps.iter().map(|(d, _)| *d).collect();
        assert_eq!(degs, vec![1, 2, 4]);
        assert_eq!(comps[1].1, el("y1 + y2", &c3));
        assert_eq!(e.component(2), el("y2 + y1", &c3));
    }

    #[test]
    fn x_product_is_sorted_exterior_monomial() {
        let c5 = ctx(5, 4);
        let e = Element::x_product(&c5, 3).unwrap();
        assert_eq!(e.len(), 1);
        let (m, c) = e.terms().next().unwrap();
        assert_eq!(c, 1);
        assert_eq!(m.exterior_indices(), vec![1, 2, 3]);
        assert!(Element::x_product(&c5, 5).is_err());
    }

    mod laws {
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        use super::super::*;
        use crate::algebra::random_homogeneous;

        fn triple(p: u32, seed: u64) -> [(u32, Element); 3] {
            let c = Context::new(p, 3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            [0, 1, 2].map(|i| {
                let d = 1 + ((seed >> (4 * i)) % 4) as u32;
                (d, random_homogeneous(&c, d, 3, &mut rng))
            })
        }

        fn no_stored_zeros(e: &Element) -> bool {
            e.terms().all(|(_, c)| c != 0 && c < e.context().p())
        }

        proptest! {
            #[test]
            fn ring_axioms(p in prop::sample::select(vec![2u32, 3, 5]), seed in any::<u64>()) {
                let [(da, a), (db, b), (_, c)] = triple(p, seed);
                let ab = a.mul(&b).unwrap();
                prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
                prop_assert_eq!(
                    a.mul(&b.add(&c).unwrap()).unwrap(),
                    ab.add(&a.mul(&c).unwrap()).unwrap()
                );
                let ba = b.mul(&a).unwrap();
                let expected = if p != 2 && da % 2 == 1 && db % 2 == 1 { ba.neg() } else { ba };
                prop_assert_eq!(&ab, &expected);
                if !ab.is_zero() {
                    prop_assert_eq!(ab.degree().unwrap(), Degree::Homogeneous(da + db));
                }
                prop_assert!(no_stored_zeros(&ab));
                prop_assert!(no_stored_zeros(&a.add(&b).unwrap()));
                prop_assert!(a.sub(&a).unwrap().is_empty());
            }
        }
    }
}
