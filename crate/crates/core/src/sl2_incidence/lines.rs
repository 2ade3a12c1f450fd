use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2};

/// The line `ax + by + c = 0`, scaled so the first nonzero of `(a, b)` is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Line {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl Line {
    pub fn new(ctx: &FieldCtx, a: u64, b: u64, c: u64) -> Result<Self> {
        let (a, b, c) = (ctx.reduce(a), ctx.reduce(b), ctx.reduce(c));
        let lead = if a != 0 { a } else { b };
        if lead == 0 {
            return Err(Error::ZeroVector);
        }
        let s = ctx.inv(lead)?;
        Ok(Line {
            a: ctx.mul(a, s),
            b: ctx.mul(b, s),
            c: ctx.mul(c, s),
        })
    }

    /// The line through the origin spanned by `v`.
    pub fn through_origin(ctx: &FieldCtx, v: FpVec2) -> Result<Self> {
        // normal vector is v rotated a quarter turn
        Line::new(ctx, ctx.neg(v.y), v.x, 0)
    }

    pub fn passes_through_origin(&self) -> bool {
        self.c == 0
    }

    #[inline]
    pub fn contains(&self, ctx: &FieldCtx, v: FpVec2) -> bool {
        ctx.add(ctx.add(ctx.mul(self.a, v.x), ctx.mul(self.b, v.y)), self.c) == 0
    }

    /// The p points of the line.
    pub fn points<'a>(&self, ctx: &'a FieldCtx) -> impl Iterator<Item = FpVec2> + 'a {
        let line = *self;
        let b_inv = ctx.inv(line.b).unwrap_or(0);
        (0..ctx.p()).map(move |t| {
            if line.b != 0 {
                let y = ctx.neg(ctx.mul(ctx.add(ctx.mul(line.a, t), line.c), b_inv));
                FpVec2::new(t, y)
            } else {
                FpVec2::new(ctx.neg(line.c), t)
            }
        })
    }
}

/// Objects with positive integer multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSet<T: Ord> {
    items: BTreeMap<T, u64>,
}

impl<T: Ord + Copy> WeightedSet<T> {
    /// Merges repeated items by adding their weights; zero weights are rejected.
    pub fn new(items: impl IntoIterator<Item = (T, u64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (t, m) in items {
            if m == 0 {
                return Err(Error::PreconditionViolated(
                    "multiplicities must be positive".into(),
                ));
            }
            *map.entry(t).or_insert(0) += m;
        }
        Ok(WeightedSet { items: map })
    }

    /// Every item with multiplicity one.
    pub fn uniform(items: impl IntoIterator<Item = T>) -> Self {
        Self::new(items.into_iter().map(|t| (t, 1))).expect("unit weights")
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, u64)> + '_ {
        self.items.iter().map(|(&t, &m)| (t, m))
    }

    pub fn support_len(&self) -> usize {
        self.items.len()
    }

    pub fn weight(&self, t: &T) -> u64 {
        self.items.get(t).copied().unwrap_or(0)
    }

    /// `Σ m`.
    pub fn total(&self) -> u64 {
        self.items.values().sum()
    }

    /// `Σ m²`.
    pub fn sum_sq(&self) -> u64 {
        self.items.values().map(|m| m * m).sum()
    }
}

/// `Σ m(q)·m(ℓ)` over incident point–line pairs.
pub fn weighted_pl_incidences(
    ctx: &FieldCtx,
    points: &WeightedSet<FpVec2>,
    lines: &WeightedSet<Line>,
) -> u64 {
    let p = ctx.p();
    let mut weight = vec![0u64; (p * p) as usize];
    for (q, m) in points.iter() {
        weight[q.index(p)] += m;
    }
    lines
        .iter()
        .map(|(l, ml)| ml * l.points(ctx).map(|q| weight[q.index(p)]).sum::<u64>())
        .sum()
}

pub fn weighted_pl_incidences_naive(
    ctx: &FieldCtx,
    points: &WeightedSet<FpVec2>,
    lines: &WeightedSet<Line>,
) -> u64 {
    let mut n = 0;
    for (q, mq) in points.iter() {
        for (l, ml) in lines.iter() {
            if l.contains(ctx, q) {
                n += mq * ml;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_points() {
        let ctx = FieldCtx::new(7).unwrap();
        let l = Line::new(&ctx, 2, 4, 6).unwrap();
        assert_eq!(l, Line::new(&ctx, 1, 2, 3).unwrap());
        assert_eq!(Line::new(&ctx, 0, 0, 1), Err(Error::ZeroVector));
        for line in [
            l,
            Line::new(&ctx, 0, 3, 1).unwrap(),
            Line::new(&ctx, 5, 0, 2).unwrap(),
        ] {
            let pts: Vec<_> = line.points(&ctx).collect();
            assert_eq!(pts.len(), 7);
            assert!(pts.iter().all(|&q| line.contains(&ctx, q)));
            let mut sorted = pts.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 7);
        }
        let o = Line::through_origin(&ctx, FpVec2::new(2, 3)).unwrap();
        assert!(o.passes_through_origin());
        assert!(o.contains(&ctx, FpVec2::new(4, 6)));
    }

    #[test]
    fn examples() {
        let ctx = FieldCtx::new(5).unwrap();
        let plane = WeightedSet::uniform((0..25).map(|i| FpVec2::from_index(i, 5)));
        let origin_lines = WeightedSet::uniform(
            (0..6).map(|d| Line::through_origin(&ctx, ctx.direction_vector(d)).unwrap()),
        );
        assert_eq!(weighted_pl_incidences(&ctx, &plane, &origin_lines), 30);

        let pt = WeightedSet::new([(FpVec2::new(1, 1), 3)]).unwrap();
        let ln = WeightedSet::new([(Line::new(&ctx, 1, 4, 0).unwrap(), 2)]).unwrap();
        assert_eq!(weighted_pl_incidences(&ctx, &pt, &ln), 6);
        assert_eq!(weighted_pl_incidences_naive(&ctx, &pt, &ln), 6);
        assert_eq!(pt.total(), 3);
        assert_eq!(pt.sum_sq(), 9);
        assert!(WeightedSet::new([(1u8, 0)]).is_err());
        assert_eq!(WeightedSet::new([(1u8, 2), (1, 3)]).unwrap().weight(&1), 5);
    }
}
