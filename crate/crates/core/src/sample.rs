//! Seeded random sets, uniform without replacement.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2, FpVec3};
use crate::groups::{complete_basis, sl2_order, Convention, GroupElem, H1Elem, MatrixSet, Sl2Elem};
use crate::points::{check_universe, PointSet2, PointSet3};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for instance `instance` of job `job`.
pub fn instance_rng(seed: u64, job: u64, instance: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(job);
    r.set_word_pos((instance as u128) << 32);
    r
}

fn too_many(what: &'static str, n: usize, avail: u64) -> Error {
    Error::CapExceeded {
        what,
        value: n as u64,
        cap: avail,
    }
}

/// `n` distinct residues of `F_p`, sorted.
pub fn random_residues(
    ctx: &FieldCtx,
    n: usize,
    nonzero: bool,
    rng: &mut impl Rng,
) -> Result<Vec<u64>> {
    let off = nonzero as u64;
    let avail = ctx.p() - off;
    if n as u64 > avail {
        return Err(too_many("sample size", n, avail));
    }
    let mut v: Vec<u64> = index::sample(rng, avail as usize, n)
        .into_iter()
        .map(|i| i as u64 + off)
        .collect();
    v.sort_unstable();
    Ok(v)
}

/// `n` distinct points of `F_p² ∖ {0}`.
pub fn random_points2(ctx: &FieldCtx, n: usize, rng: &mut impl Rng) -> Result<PointSet2> {
    let p = ctx.p();
    let avail = check_universe(p, 2)? - 1;
    if n > avail {
        return Err(too_many("sample size", n, avail as u64));
    }
    let pts = index::sample(rng, avail, n)
        .into_iter()
        .map(|i| FpVec2::from_index(i + 1, p));
    PointSet2::new(p, pts)
}

/// `n` distinct points of `F_p³`, optionally avoiding the plane `z = 0`.
pub fn random_points3(
    ctx: &FieldCtx,
    n: usize,
    nonzero_z: bool,
    rng: &mut impl Rng,
) -> Result<PointSet3> {
    let p = ctx.p();
    check_universe(p, 3)?;
    let plane = (p * p) as usize;
    let skip = if nonzero_z { plane } else { 0 };
    let avail = plane * p as usize - skip;
    if n > avail {
        return Err(too_many("sample size", n, avail as u64));
    }
    let pts = index::sample(rng, avail, n).into_iter().map(|i| {
        // enumerate z-major so the skipped block is the plane z = 0
        let i = (i + skip) as u64;
        let (z, rest) = (i / (p * p), i % (p * p));
        FpVec3::new(rest / p, rest % p, z)
    });
    PointSet3::new(p, pts)
}

/// A uniform element of SL2(F_p): a uniform nonzero first column completed by
/// a uniform shear.
pub fn random_sl2_elem(ctx: &FieldCtx, rng: &mut impl Rng) -> Sl2Elem {
    let p = ctx.p();
    let idx = rng.gen_range(1..(p * p) as usize);
    let col = FpVec2::from_index(idx, p);
    let base = complete_basis(ctx, col).expect("nonzero column");
    let t = rng.gen_range(0..p);
    let shear = Sl2Elem::new(ctx, 1, t, 0, 1).expect("det 1");
    base.mul(ctx, &shear)
}

/// `n` distinct elements of SL2(F_p).
pub fn random_sl2(ctx: &FieldCtx, n: usize, rng: &mut impl Rng) -> Result<MatrixSet<Sl2Elem>> {
    let order = sl2_order(ctx.p());
    if n as u64 > order {
        return Err(too_many("sample size", n, order));
    }
    let p = ctx.p();
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let g = random_sl2_elem(ctx, rng);
        if seen.insert(g.key(p)) {
            out.push(g);
        }
    }
    Ok(MatrixSet::new(ctx, out))
}

/// `n` distinct elements of H1(F_p) with uniform coordinates.
pub fn random_h1(
    ctx: &FieldCtx,
    n: usize,
    conv: Convention,
    rng: &mut impl Rng,
) -> Result<MatrixSet<H1Elem>> {
    let p = ctx.p();
    let avail = check_universe(p, 3)?;
    if n > avail {
        return Err(too_many("sample size", n, avail as u64));
    }
    let elems = index::sample(rng, avail, n).into_iter().map(|i| {
        let i = i as u64;
        H1Elem::new(ctx, i / (p * p), (i / p) % p, i % p, conv)
    });
    Ok(MatrixSet::new(ctx, elems))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let ctx = FieldCtx::new(11).unwrap();
        let a = random_points2(&ctx, 30, &mut rng(7)).unwrap();
        let b = random_points2(&ctx, 30, &mut rng(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 30);
        assert!(!a.contains_origin());
        assert_eq!(random_points2(&ctx, 120, &mut rng(1)).unwrap().len(), 120);
        assert!(random_points2(&ctx, 121, &mut rng(1)).is_err());

        let e = random_points3(&ctx, 200, true, &mut rng(3)).unwrap();
        assert_eq!(e.len(), 200);
        assert!(!e.has_zero_third_coordinate());
        let all = random_points3(&ctx, 1210, true, &mut rng(3)).unwrap();
        assert_eq!(all.len(), 1210);

        let s = random_sl2(&ctx, 50, &mut rng(5)).unwrap();
        assert_eq!(s.len(), 50);
        assert_eq!(
            random_sl2(&ctx, 50, &mut rng(5)).unwrap().elems(),
            s.elems()
        );
        let x = random_h1(&ctx, 40, Convention::Matrix, &mut rng(2)).unwrap();
        assert_eq!(x.len(), 40);
        let r = random_residues(&ctx, 10, true, &mut rng(0)).unwrap();
        assert_eq!(r, (1..11).collect::<Vec<_>>());
    }

    #[test]
    fn instance_streams_differ() {
        let mut a = instance_rng(1, 0, 0);
        let mut b = instance_rng(1, 0, 1);
        let mut c = instance_rng(1, 1, 0);
        let (x, y, z): (u64, u64, u64) = (a.gen(), b.gen(), c.gen());
        assert!(x != y && x != z && y != z);
        let mut a2 = instance_rng(1, 0, 0);
        assert_eq!(x, a2.gen::<u64>());
    }

    #[test]
    fn sl2_sampler_hits_everything() {
        // at p = 3 every element should appear in a few thousand draws
        let ctx = FieldCtx::new(3).unwrap();
        let mut r = rng(11);
        let mut seen = HashSet::new();
        for _ in 0..2000 {
            let g = random_sl2_elem(&ctx, &mut r);
            assert_eq!(g.det(&ctx), 1);
            seen.insert(g.key(3));
        }
        assert_eq!(seen.len(), 24);
    }
}
