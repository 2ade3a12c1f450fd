use serde::{Deserialize, Serialize};

use super::set::{GroupElem, MatrixSet};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec3};

/// Coordinate system for the centre of H1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Upper unitriangular matrices `[[1, x, t], [0, 1, y], [0, 0, 1]]`;
    /// central term `t + t′ + xy′`.
    Matrix,
    /// Central term `t + t′ + (xy′ − yx′)/2`.
    Symmetric,
}

/// An element `[x, y, t]` of the Heisenberg group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct H1Elem {
    pub x: u64,
    pub y: u64,
    pub t: u64,
    pub conv: Convention,
}

impl H1Elem {
    pub fn new(ctx: &FieldCtx, x: u64, y: u64, t: u64, conv: Convention) -> Self {
        H1Elem {
            x: ctx.reduce(x),
            y: ctx.reduce(y),
            t: ctx.reduce(t),
            conv,
        }
    }

    pub fn identity(conv: Convention) -> Self {
        H1Elem {
            x: 0,
            y: 0,
            t: 0,
            conv,
        }
    }

    pub fn mul(&self, ctx: &FieldCtx, h: &H1Elem) -> Result<H1Elem> {
        if self.conv != h.conv {
            return Err(Error::ConventionMismatch);
        }
        let twist = match self.conv {
            Convention::Matrix => ctx.mul(self.x, h.y),
            Convention::Symmetric => ctx.mul(
                ctx.half(),
                ctx.sub(ctx.mul(self.x, h.y), ctx.mul(self.y, h.x)),
            ),
        };
        Ok(H1Elem {
            x: ctx.add(self.x, h.x),
            y: ctx.add(self.y, h.y),
            t: ctx.add(ctx.add(self.t, h.t), twist),
            conv: self.conv,
        })
    }

    pub fn inv(&self, ctx: &FieldCtx) -> H1Elem {
        let t = match self.conv {
            Convention::Matrix => ctx.sub(ctx.mul(self.x, self.y), self.t),
            Convention::Symmetric => ctx.neg(self.t),
        };
        H1Elem {
            x: ctx.neg(self.x),
            y: ctx.neg(self.y),
            t,
            conv: self.conv,
        }
    }

    /// Same group element in matrix coordinates.
    pub fn to_matrix(&self, ctx: &FieldCtx) -> H1Elem {
        match self.conv {
            Convention::Matrix => *self,
            Convention::Symmetric => H1Elem {
                t: ctx.add(self.t, ctx.mul(ctx.half(), ctx.mul(self.x, self.y))),
                conv: Convention::Matrix,
                ..*self
            },
        }
    }

    /// Same group element in symmetric coordinates.
    pub fn to_symmetric(&self, ctx: &FieldCtx) -> H1Elem {
        match self.conv {
            Convention::Symmetric => *self,
            Convention::Matrix => H1Elem {
                t: ctx.sub(self.t, ctx.mul(ctx.half(), ctx.mul(self.x, self.y))),
                conv: Convention::Symmetric,
                ..*self
            },
        }
    }

    /// `(X, Y, Z) ↦ (X + aY + cZ, Y + bZ, Z)` where `[a, b, c]` are matrix coordinates.
    #[inline]
    pub fn act(&self, ctx: &FieldCtx, v: FpVec3) -> FpVec3 {
        let m = self.to_matrix(ctx);
        FpVec3::new(
            ctx.add(v.x, ctx.add(ctx.mul(m.x, v.y), ctx.mul(m.t, v.z))),
            ctx.add(v.y, ctx.mul(m.y, v.z)),
            v.z,
        )
    }

    pub fn coords(&self) -> [u64; 3] {
        [self.x, self.y, self.t]
    }
}

impl GroupElem for H1Elem {
    fn key(&self, p: u64) -> u64 {
        (self.x * p + self.y) * p + self.t
    }

    fn compose(&self, ctx: &FieldCtx, rhs: &Self) -> Result<Self> {
        self.mul(ctx, rhs)
    }

    fn inverse(&self, ctx: &FieldCtx) -> Self {
        self.inv(ctx)
    }
}

/// All p³ elements of H1(F_p) in the given coordinates.
pub fn enumerate_h1(ctx: &FieldCtx, conv: Convention) -> MatrixSet<H1Elem> {
    let p = ctx.p();
    let elems = (0..p)
        .flat_map(move |x| (0..p).flat_map(move |y| (0..p).map(move |t| H1Elem { x, y, t, conv })));
    MatrixSet::new(ctx, elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Convention::{Matrix, Symmetric};

    #[test]
    fn product_examples() {
        let ctx = FieldCtx::new(5).unwrap();
        for (conv, t) in [(Symmetric, 3), (Matrix, 1)] {
            let g = H1Elem::new(&ctx, 1, 0, 0, conv);
            let h = H1Elem::new(&ctx, 0, 1, 0, conv);
            assert_eq!(g.mul(&ctx, &h).unwrap().coords(), [1, 1, t]);
        }
        let v = FpVec3::new(2, 3, 4);
        assert_eq!(H1Elem::identity(Matrix).act(&ctx, v), v);
        assert_eq!(
            H1Elem::identity(Matrix).mul(&ctx, &H1Elem::identity(Symmetric)),
            Err(Error::ConventionMismatch)
        );
    }

    #[test]
    fn axioms_and_isomorphism_exhaustive_p3() {
        let ctx = FieldCtx::new(3).unwrap();
        for conv in [Matrix, Symmetric] {
            let all = enumerate_h1(&ctx, conv);
            assert_eq!(all.len(), 27);
            assert!(all.is_symmetric());
            let e = H1Elem::identity(conv);
            for a in all.iter() {
                assert_eq!(a.mul(&ctx, &a.inv(&ctx)).unwrap(), e);
                assert_eq!(a.inv(&ctx).mul(&ctx, a).unwrap(), e);
                assert_eq!(a.mul(&ctx, &e).unwrap(), *a);
                assert_eq!(
                    a.to_matrix(&ctx).to_symmetric(&ctx).to_symmetric(&ctx).conv,
                    Symmetric
                );
                for b in all.iter() {
                    let ab = a.mul(&ctx, b).unwrap();
                    let flipped = if conv == Matrix {
                        a.to_symmetric(&ctx)
                            .mul(&ctx, &b.to_symmetric(&ctx))
                            .unwrap()
                            .to_matrix(&ctx)
                    } else {
                        a.to_matrix(&ctx)
                            .mul(&ctx, &b.to_matrix(&ctx))
                            .unwrap()
                            .to_symmetric(&ctx)
                    };
                    assert_eq!(flipped, ab);
                    for c in all.iter() {
                        assert_eq!(
                            ab.mul(&ctx, c).unwrap(),
                            a.mul(&ctx, &b.mul(&ctx, c).unwrap()).unwrap()
                        );
                    }
                    for i in 0..27 {
                        let v = FpVec3::from_index(i, 3);
                        assert_eq!(ab.act(&ctx, v), a.act(&ctx, b.act(&ctx, v)));
                        assert_eq!(a.act(&ctx, v).z, v.z);
                    }
                }
            }
        }
    }

    #[test]
    fn conversion_roundtrip() {
        let ctx = FieldCtx::new(7).unwrap();
        for g in enumerate_h1(&ctx, Matrix).iter() {
            assert_eq!(g.to_symmetric(&ctx).to_matrix(&ctx), *g);
            assert_eq!(
                g.to_symmetric(&ctx).act(&ctx, FpVec3::new(1, 2, 3)),
                g.act(&ctx, FpVec3::new(1, 2, 3))
            );
        }
    }
}
