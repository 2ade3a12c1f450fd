use serde::{Deserialize, Serialize};

use super::set::{GroupElem, MatrixSet};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2};

/// Default largest p for which the whole group may be enumerated.
pub const DEFAULT_ENUMERATION_CAP: u64 = 31;

/// `|SL2(F_p)| = p(p² − 1)`.
pub fn sl2_order(p: u64) -> u64 {
    p * (p * p - 1)
}

/// A 2×2 matrix `[[a, b], [c, d]]` with `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sl2Elem {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Sl2Elem {
    pub const IDENTITY: Sl2Elem = Sl2Elem {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    /// Checked constructor; entries are reduced mod p.
    pub fn new(ctx: &FieldCtx, a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        let g = Self::new_unchecked(ctx.reduce(a), ctx.reduce(b), ctx.reduce(c), ctx.reduce(d));
        match g.det(ctx) {
            1 => Ok(g),
            det => Err(Error::Determinant(det)),
        }
    }

    pub(crate) const fn new_unchecked(a: u64, b: u64, c: u64, d: u64) -> Self {
        Sl2Elem { a, b, c, d }
    }

    pub fn from_signed(ctx: &FieldCtx, e: [i64; 4]) -> Result<Self> {
        Self::new(
            ctx,
            ctx.from_i64(e[0]),
            ctx.from_i64(e[1]),
            ctx.from_i64(e[2]),
            ctx.from_i64(e[3]),
        )
    }

    pub fn det(&self, ctx: &FieldCtx) -> u64 {
        ctx.sub(ctx.mul(self.a, self.d), ctx.mul(self.b, self.c))
    }

    pub fn mul(&self, ctx: &FieldCtx, h: &Sl2Elem) -> Sl2Elem {
        let f = ctx;
        Sl2Elem {
            a: f.add(f.mul(self.a, h.a), f.mul(self.b, h.c)),
            b: f.add(f.mul(self.a, h.b), f.mul(self.b, h.d)),
            c: f.add(f.mul(self.c, h.a), f.mul(self.d, h.c)),
            d: f.add(f.mul(self.c, h.b), f.mul(self.d, h.d)),
        }
    }

    pub fn inv(&self, ctx: &FieldCtx) -> Sl2Elem {
        Sl2Elem {
            a: self.d,
            b: ctx.neg(self.b),
            c: ctx.neg(self.c),
            d: self.a,
        }
    }

    #[inline]
    pub fn act(&self, ctx: &FieldCtx, v: FpVec2) -> FpVec2 {
        FpVec2::new(
            ctx.add(ctx.mul(self.a, v.x), ctx.mul(self.b, v.y)),
            ctx.add(ctx.mul(self.c, v.x), ctx.mul(self.d, v.y)),
        )
    }

    pub fn transpose(&self) -> Sl2Elem {
        Sl2Elem {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl GroupElem for Sl2Elem {
    fn key(&self, p: u64) -> u64 {
        ((self.a * p + self.b) * p + self.c) * p + self.d
    }

    fn compose(&self, ctx: &FieldCtx, rhs: &Self) -> Result<Self> {
        Ok(self.mul(ctx, rhs))
    }

    fn inverse(&self, ctx: &FieldCtx) -> Self {
        self.inv(ctx)
    }
}

fn check_cap(p: u64, cap: u64) -> Result<()> {
    if p > cap {
        return Err(Error::CapExceeded {
            what: "p for full SL2 enumeration",
            value: p,
            cap,
        });
    }
    Ok(())
}

/// All of SL2(F_p), in ascending key order.
pub fn enumerate_sl2(ctx: &FieldCtx, cap: u64) -> Result<MatrixSet<Sl2Elem>> {
    let p = ctx.p();
    check_cap(p, cap)?;
    let mut out = Vec::with_capacity(sl2_order(p) as usize);
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                // ad = 1 + bc
                let rhs = ctx.add(1, ctx.mul(b, c));
                if a != 0 {
                    let d = ctx.mul(rhs, ctx.inv(a)?);
                    out.push(Sl2Elem::new_unchecked(a, b, c, d));
                } else if rhs == 0 {
                    out.extend((0..p).map(|d| Sl2Elem::new_unchecked(a, b, c, d)));
                }
            }
        }
    }
    Ok(MatrixSet::new(ctx, out))
}

/// A unimodular matrix whose first column is `m`.
pub(crate) fn complete_basis(ctx: &FieldCtx, m: FpVec2) -> Result<Sl2Elem> {
    if m.x != 0 {
        Ok(Sl2Elem::new_unchecked(m.x, 0, m.y, ctx.inv(m.x)?))
    } else if m.y != 0 {
        Ok(Sl2Elem::new_unchecked(0, ctx.neg(ctx.inv(m.y)?), m.y, 0))
    } else {
        Err(Error::ZeroVector)
    }
}

/// `{T ∈ SL2 : T m = m′}`; always of size p for nonzero `m`, `m′`.
pub fn transporter_fiber(ctx: &FieldCtx, m: FpVec2, target: FpVec2) -> Result<MatrixSet<Sl2Elem>> {
    let src = complete_basis(ctx, m)?;
    let dst = complete_basis(ctx, target)?;
    let src_inv = src.inv(ctx);
    // T = dst · [[1, t], [0, 1]] · src⁻¹ fixes the first basis column.
    let elems = (0..ctx.p()).map(|t| {
        let shear = Sl2Elem::new_unchecked(1, t, 0, 1);
        dst.mul(ctx, &shear).mul(ctx, &src_inv)
    });
    Ok(MatrixSet::new(ctx, elems))
}

/// The unique θ with `θx = u`, `θy = v`, if it exists.
///
/// Returns `None` when the skew values of the two pairs differ.
pub fn pair_transporter(
    ctx: &FieldCtx,
    x: FpVec2,
    y: FpVec2,
    u: FpVec2,
    v: FpVec2,
) -> Result<Option<Sl2Elem>> {
    let s = ctx.skew(x, y);
    if s == 0 {
        return Err(Error::DependentBasis);
    }
    if ctx.skew(u, v) != s {
        return Ok(None);
    }
    // [x y]⁻¹ = det⁻¹ · [[y₂, −y₁], [−x₂, x₁]], det = x₁y₂ − x₂y₁ = −skew.
    let det_inv = ctx.inv(ctx.neg(s))?;
    let src_inv = Sl2Elem::new_unchecked(
        ctx.mul(det_inv, y.y),
        ctx.mul(det_inv, ctx.neg(y.x)),
        ctx.mul(det_inv, ctx.neg(x.y)),
        ctx.mul(det_inv, x.x),
    );
    let dst = Sl2Elem::new_unchecked(u.x, v.x, u.y, v.y);
    Ok(Some(dst.mul(ctx, &src_inv)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::new(p).unwrap()
    }

    #[test]
    fn action_and_inverse_examples() {
        let f5 = f(5);
        let g = Sl2Elem::new(&f5, 1, 1, 0, 1).unwrap();
        assert_eq!(g.act(&f5, FpVec2::new(0, 1)), FpVec2::new(1, 1));
        let h = Sl2Elem::new(&f5, 0, 4, 1, 0).unwrap();
        assert_eq!(h.inv(&f5), Sl2Elem::new(&f5, 0, 1, 4, 0).unwrap());
        let v = FpVec2::new(3, 2);
        assert_eq!(Sl2Elem::IDENTITY.act(&f5, v), v);
        assert_eq!(Sl2Elem::new(&f5, 1, 1, 1, 1), Err(Error::Determinant(0)));
    }

    #[test]
    fn inverse_matches_brute_force_solution() {
        let f5 = f(5);
        let g = Sl2Elem::new(&f5, 0, 4, 1, 0).unwrap();
        let all = enumerate_sl2(&f5, 31).unwrap();
        let solutions: Vec<_> = all
            .iter()
            .filter(|h| g.mul(&f5, h) == Sl2Elem::IDENTITY)
            .collect();
        assert_eq!(solutions, vec![&g.inv(&f5)]);
    }

    #[test]
    fn group_sizes() {
        for (p, n) in [(3, 24), (5, 120), (7, 336), (13, 2184)] {
            let g = enumerate_sl2(&f(p), 31).unwrap();
            assert_eq!(g.len(), n);
            assert!(g.iter().all(|e| e.det(&f(p)) == 1));
            assert!(g.is_symmetric());
        }
        assert!(matches!(
            enumerate_sl2(&f(37), 31),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(enumerate_sl2(&f(37), 37).unwrap().len(), 37 * (37 * 37 - 1));
    }

    #[test]
    fn group_axioms_exhaustive_p3() {
        let ctx = f(3);
        let g = enumerate_sl2(&ctx, 31).unwrap();
        for a in g.iter() {
            assert_eq!(a.mul(&ctx, &a.inv(&ctx)), Sl2Elem::IDENTITY);
            assert_eq!(a.mul(&ctx, &Sl2Elem::IDENTITY), *a);
            for b in g.iter() {
                let ab = a.mul(&ctx, b);
                assert!(g.contains(&ab));
                for v in (0..9).map(|i| FpVec2::from_index(i, 3)) {
                    assert_eq!(ab.act(&ctx, v), a.act(&ctx, b.act(&ctx, v)));
                }
                for c in g.iter() {
                    assert_eq!(ab.mul(&ctx, c), a.mul(&ctx, &b.mul(&ctx, c)));
                }
            }
        }
    }

    #[test]
    fn fibers_match_enumeration_filter() {
        for p in [3u64, 5] {
            let ctx = f(p);
            let all = enumerate_sl2(&ctx, 31).unwrap();
            let nonzero: Vec<_> = (1..(p * p) as usize)
                .map(|i| FpVec2::from_index(i, p))
                .collect();
            for &m in &nonzero {
                for &t in &nonzero {
                    let fiber = transporter_fiber(&ctx, m, t).unwrap();
                    assert_eq!(fiber.len(), p as usize);
                    let filtered: Vec<_> = all
                        .iter()
                        .filter(|g| g.act(&ctx, m) == t)
                        .copied()
                        .collect();
                    assert_eq!(fiber.elems(), filtered.as_slice());
                }
            }
        }
        let f5 = f(5);
        assert_eq!(
            transporter_fiber(&f5, FpVec2::ZERO, FpVec2::new(1, 0)),
            Err(Error::ZeroVector)
        );
        let stab = transporter_fiber(&f(7), FpVec2::new(1, 0), FpVec2::new(1, 0)).unwrap();
        assert_eq!(stab.len(), 7);
        assert!(stab.contains(&Sl2Elem::IDENTITY));
    }

    #[test]
    fn pair_transporter_examples() {
        let f5 = f(5);
        let e1 = FpVec2::new(1, 0);
        let e2 = FpVec2::new(0, 1);
        let theta = pair_transporter(&f5, e1, e2, e2, FpVec2::new(4, 0)).unwrap();
        assert_eq!(theta, Some(Sl2Elem::new(&f5, 0, 4, 1, 0).unwrap()));
        assert_eq!(
            pair_transporter(&f5, e1, e2, e1, e2).unwrap(),
            Some(Sl2Elem::IDENTITY)
        );
        assert_eq!(
            pair_transporter(&f5, e1, e2, e1, FpVec2::new(2, 0)).unwrap(),
            None
        );
        assert_eq!(
            pair_transporter(&f5, e1, FpVec2::new(3, 0), e1, e2),
            Err(Error::DependentBasis)
        );
    }

    #[test]
    fn pair_transporter_agrees_with_enumeration_p3() {
        let ctx = f(3);
        let all = enumerate_sl2(&ctx, 31).unwrap();
        let pts: Vec<_> = (0..9).map(|i| FpVec2::from_index(i, 3)).collect();
        for &x in &pts {
            for &y in &pts {
                if ctx.skew(x, y) == 0 {
                    continue;
                }
                for &u in &pts {
                    for &v in &pts {
                        let found: Vec<_> = all
                            .iter()
                            .filter(|g| g.act(&ctx, x) == u && g.act(&ctx, y) == v)
                            .copied()
                            .collect();
                        let got = pair_transporter(&ctx, x, y, u, v).unwrap();
                        assert_eq!(got.into_iter().collect::<Vec<_>>(), found);
                    }
                }
            }
        }
    }
}
