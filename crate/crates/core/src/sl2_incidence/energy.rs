use std::collections::HashMap;

use rayon::prelude::*;

use crate::field::{FieldCtx, FpVec2};
use crate::groups::{GroupElem, MatrixSet, Sl2Elem};
use crate::points::PointSet2;

/// Largest key space counted with a dense table in [`energy2`].
const DENSE_KEY_CAP: u64 = 1 << 24;

fn skew_histogram(ctx: &FieldCtx, pts: &[FpVec2]) -> Vec<u64> {
    let p = ctx.p() as usize;
    pts.par_iter()
        .fold(
            || vec![0u64; p],
            |mut h, &x| {
                for &y in pts {
                    h[ctx.skew(x, y) as usize] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; p],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// `#{(x₁, x₂, y₁, y₂) ∈ A² × B² : skew(x₁, x₂) = skew(y₁, y₂)}`.
pub fn energy1(ctx: &FieldCtx, a: &PointSet2, b: &PointSet2) -> u64 {
    let ha = skew_histogram(ctx, a.points());
    let hb = skew_histogram(ctx, b.points());
    ha.iter().zip(&hb).map(|(x, y)| x * y).sum()
}

pub fn energy1_naive(ctx: &FieldCtx, a: &PointSet2, b: &PointSet2) -> u64 {
    let mut n = 0;
    for x1 in a.iter() {
        for x2 in a.iter() {
            let s = ctx.skew(x1, x2);
            for y1 in b.iter() {
                for y2 in b.iter() {
                    if ctx.skew(y1, y2) == s {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// Quadruples of `B` with equal skew values; the same as `energy1(B, B)`.
pub fn quad_skew_exact(ctx: &FieldCtx, b: &PointSet2) -> u64 {
    energy1(ctx, b, b)
}

/// `E(S, S) = #{(a, b, c, d) ∈ S⁴ : ab = cd}`.
pub fn energy2(ctx: &FieldCtx, s: &MatrixSet<Sl2Elem>) -> u64 {
    let p = ctx.p();
    let elems = s.elems();
    let key_space = p.saturating_pow(4);
    if key_space <= DENSE_KEY_CAP {
        let mut hist = vec![0u32; key_space as usize];
        for a in elems {
            for b in elems {
                hist[a.mul(ctx, b).key(p) as usize] += 1;
            }
        }
        hist.iter().map(|&r| (r as u64) * (r as u64)).sum()
    } else {
        let mut hist: HashMap<u64, u64> = HashMap::new();
        for a in elems {
            for b in elems {
                *hist.entry(a.mul(ctx, b).key(p)).or_default() += 1;
            }
        }
        hist.values().map(|r| r * r).sum()
    }
}

pub fn energy2_naive(ctx: &FieldCtx, s: &MatrixSet<Sl2Elem>) -> u64 {
    let e = s.elems();
    let mut n = 0;
    for a in e {
        for b in e {
            let ab = a.mul(ctx, b);
            for c in e {
                for d in e {
                    if c.mul(ctx, d) == ab {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// `log_p(|S|³ / E(S, S))`, clamped at zero.
pub fn empirical_epsilon(ctx: &FieldCtx, s: &MatrixSet<Sl2Elem>) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let e = energy2(ctx, s) as f64;
    let n = s.len() as f64;
    ((n * n * n / e).ln() / (ctx.p() as f64).ln()).max(0.0)
}
