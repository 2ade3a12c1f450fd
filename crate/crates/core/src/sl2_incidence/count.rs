use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::groups::{MatrixSet, Sl2Elem};
use crate::points::PointSet2;

pub(crate) fn check_moduli(ctx: &FieldCtx, ps: &[u64]) -> Result<()> {
    match ps.iter().find(|&&q| q != ctx.p()) {
        Some(&q) => Err(Error::MixedModulus(ctx.p(), q)),
        None => Ok(()),
    }
}

/// `#{(x, y, θ) ∈ A × B × S : θy = x}`.
pub fn count_incidences(
    ctx: &FieldCtx,
    a: &PointSet2,
    b: &PointSet2,
    s: &MatrixSet<Sl2Elem>,
) -> Result<u64> {
    check_moduli(ctx, &[a.p(), b.p(), s.p()])?;
    let pts = b.points();
    Ok(s.elems()
        .par_iter()
        .map(|theta| {
            pts.iter()
                .filter(|&&y| a.contains(theta.act(ctx, y)))
                .count() as u64
        })
        .sum())
}

pub fn count_incidences_naive(
    ctx: &FieldCtx,
    a: &PointSet2,
    b: &PointSet2,
    s: &MatrixSet<Sl2Elem>,
) -> u64 {
    let mut n = 0;
    for x in a.iter() {
        for y in b.iter() {
            for theta in s.iter() {
                if theta.act(ctx, y) == x {
                    n += 1;
                }
            }
        }
    }
    n
}
