use rand::seq::SliceRandom;
use rand::Rng;

use super::{basis, Context, Element};

/// A random homogeneous element of the given degree with at most `max_terms`
/// terms and random nonzero coefficients. Zero when the degree has no basis.
pub fn random_homogeneous<R: Rng + ?Sized>(
    ctx: &Context,
    degree: u32,
    max_terms: usize,
    rng: &mut R,
) -> Element {
    let monomials = basis(ctx, degree);
    let mut out = Element::zero(ctx);
    if monomials.is_empty() || max_terms == 0 {
        return out;
    }
    let count = rng.gen_range(1..=max_terms.min(monomials.len()));
    for m in monomials.choose_multiple(rng, count) {
        out.add_term(m.clone(), rng.gen_range(1..ctx.p()));
    }
    out
}

/// A random element with terms in several degrees up to `max_degree`.
pub fn random_element<R: Rng + ?Sized>(
    ctx: &Context,
    max_degree: u32,
    max_terms: usize,
    rng: &mut R,
) -> Element {
    let mut out = Element::zero(ctx);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let d = rng.gen_range(0..=max_degree);
        let part = random_homogeneous(ctx, d, 1, rng);
        out.add_assign(&part).expect("same context");
    }
    out
}
