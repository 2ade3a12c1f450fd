//! Fixed inputs shared by the benchmarks.

use packlab::groups::Convention;
use packlab::sample::{self, rng};
use packlab::{FieldCtx, H1Elem, MatrixSet, PointSet2, PointSet3, Sl2Elem};

pub struct Sl2Inputs {
    pub ctx: FieldCtx,
    pub a: PointSet2,
    pub b: PointSet2,
    pub s: MatrixSet<Sl2Elem>,
}

/// Random A, B of size `n` and S of size `m` at modulus `p`.
pub fn sl2_inputs(p: u64, n: usize, m: usize, seed: u64) -> Sl2Inputs {
    let ctx = FieldCtx::new(p).unwrap();
    let mut r = rng(seed);
    let a = sample::random_points2(&ctx, n, &mut r).unwrap();
    let b = sample::random_points2(&ctx, n, &mut r).unwrap();
    let s = sample::random_sl2(&ctx, m, &mut r).unwrap();
    Sl2Inputs { ctx, a, b, s }
}

pub struct H1Inputs {
    pub ctx: FieldCtx,
    pub a: PointSet3,
    pub b: PointSet3,
    pub x: MatrixSet<H1Elem>,
}

pub fn h1_inputs(p: u64, n: usize, m: usize, seed: u64) -> H1Inputs {
    let ctx = FieldCtx::new(p).unwrap();
    let mut r = rng(seed);
    let a = sample::random_points3(&ctx, n, true, &mut r).unwrap();
    let b = sample::random_points3(&ctx, n, true, &mut r).unwrap();
    let x = sample::random_h1(&ctx, m, Convention::Matrix, &mut r).unwrap();
    H1Inputs { ctx, a, b, x }
}
