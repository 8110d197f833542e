//! Freeness, closedness and the secured-set predicate.
//!
//! For arity 4 the patterns are 5-chains `x0<x1<x2<x3<x4` with distinguished
//! middle `x2` and outer tuple `{x0,x1,x3,x4}`; for arity 2 they are triples
//! `x<y<z` with distinguished `x` and outer pair `{y,z}`.

use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::set::ElementSet;

/// Position of the distinguished element inside a `(k+1)`-chain.
fn distinguished_slot(k: usize) -> Result<usize> {
    match k {
        4 => Ok(2),
        2 => Ok(0),
        other => Err(Error::UnsupportedArity(other)),
    }
}

/// Splits a `(k+1)`-chain into its distinguished element and outer tuple.
#[inline]
pub fn split_chain(chain: ElementSet, slot: usize) -> (usize, ElementSet) {
    let d = chain.nth(slot).expect("chain long enough");
    (d, chain.without(d))
}

/// `H` is free for `f`: no image of a `k`-subset of `H` meets `H`.
pub fn is_free(f: &SetMapping, h: ElementSet) -> Result<bool> {
    f.ground().check(h)?;
    Ok(h.subsets_of_size(f.arity()).all(|x| !f.image(x).intersects(h)))
}

/// Every pattern chain in `U` has its distinguished element in the `F`-image
/// of its outer tuple.
pub fn is_f_closed(big_f: &SetMapping, u: ElementSet) -> Result<bool> {
    let slot = distinguished_slot(big_f.arity())?;
    big_f.ground().check(u)?;
    Ok(u.subsets_of_size(big_f.arity() + 1).all(|chain| {
        let (d, outer) = split_chain(chain, slot);
        big_f.image(outer).contains(d)
    }))
}

/// No pattern chain in `U` has its distinguished element in the `g`-image of
/// its outer tuple. Tuples outside `g`'s support carry the empty image.
pub fn is_g_free(g: &SetMapping, u: ElementSet) -> Result<bool> {
    let slot = distinguished_slot(g.arity())?;
    g.ground().check(u)?;
    Ok(u.subsets_of_size(g.arity() + 1).all(|chain| {
        let (d, outer) = split_chain(chain, slot);
        !g.image(outer).contains(d)
    }))
}

/// At least three elements, `g`-free and `F`-closed (arity 2).
pub fn is_secured(big_f: &SetMapping, g: &SetMapping, u: ElementSet) -> Result<bool> {
    if big_f.arity() != 2 || g.arity() != 2 {
        return Err(Error::UnsupportedArity(if big_f.arity() != 2 { big_f.arity() } else { g.arity() }));
    }
    Ok(u.len() >= 3 && is_g_free(g, u)? && is_f_closed(big_f, u)?)
}

/// Freeness through the distinguished-element characterization, valid for
/// interval-bounded (arity 4) and initial-segment (arity 2) mappings: no
/// pattern chain of `H` has its distinguished element in `f` of the outer
/// tuple.
pub fn reduced_is_free(f: &SetMapping, h: ElementSet) -> Result<bool> {
    let flags = f.flags();
    match f.arity() {
        4 if flags.interval_bounded => is_g_free(f, h),
        2 if flags.initial_segment => is_g_free(f, h),
        4 => Err(Error::MissingFlag("interval_bounded")),
        2 => Err(Error::MissingFlag("initial_segment")),
        k => Err(Error::UnsupportedArity(k)),
    }
}

/// Evaluates freeness by both routes and returns the common answer; a
/// disagreement is reported as an error.
pub fn free_reduction_equivalence(f: &SetMapping, h: ElementSet) -> Result<bool> {
    let reduced = reduced_is_free(f, h)?;
    let direct = is_free(f, h)?;
    if reduced != direct {
        return Err(Error::ReductionMismatch(h));
    }
    Ok(direct)
}

/// Whether appending `top` (greater than every element of `current`) keeps a
/// set that is `F`-closed and `g`-free in that state. Only chains ending at
/// `top` are inspected, so `current` must already be closed and free.
pub fn extends_closed_free(big_f: &SetMapping, g: &SetMapping, current: ElementSet, top: usize) -> bool {
    let k = big_f.arity();
    let slot = if k == 4 { 2 } else { 0 };
    debug_assert!(current.max().is_none_or(|m| m < top));
    current.subsets_of_size(k).all(|base| {
        let (d, outer) = split_chain(base.with(top), slot);
        big_f.image(outer).contains(d) && !g.image(outer).contains(d)
    })
}
