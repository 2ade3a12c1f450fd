//! Dense discrete Fourier transform over F_p^n.
//!
//! `f̂(m) = p^{−n} Σ_x χ(−m·x) f(x)` with `χ(t) = exp(2πi t/p)`, and
//! `f(x) = Σ_m χ(m·x) f̂(m)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::groups::{MatrixSet, Sl2Elem};
use crate::points::PointSet2;

/// Largest p accepted by [`incidence_via_fourier`].
pub const FOURIER_INCIDENCE_CAP: u64 = 13;

/// Largest table length accepted by [`dft`].
const TABLE_CAP: u64 = 1 << 16;

/// A complex-valued function on F_p^n stored densely, first coordinate most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct FpFunction {
    p: u64,
    dim: u32,
    values: Vec<Complex64>,
}

impl FpFunction {
    pub fn zeros(p: u64, dim: u32) -> Result<Self> {
        let len = p
            .checked_pow(dim)
            .filter(|&n| n <= TABLE_CAP)
            .ok_or(Error::CapExceeded {
                what: "p^n for a Fourier table",
                value: p.saturating_pow(dim),
                cap: TABLE_CAP,
            })?;
        Ok(FpFunction {
            p,
            dim,
            values: vec![Complex64::new(0.0, 0.0); len as usize],
        })
    }

    pub fn from_values(p: u64, dim: u32, values: Vec<Complex64>) -> Result<Self> {
        let mut f = Self::zeros(p, dim)?;
        if values.len() != f.values.len() {
            return Err(Error::DimensionMismatch {
                expected: f.values.len(),
                found: values.len(),
            });
        }
        f.values = values;
        Ok(f)
    }

    /// Indicator of a planar point set.
    pub fn indicator2(set: &PointSet2) -> Self {
        let p = set.p();
        let mut f = Self::zeros(p, 2).expect("planar table fits");
        for v in set.iter() {
            f.values[v.index(p)] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    pub fn set(&mut self, idx: usize, v: Complex64) {
        self.values[idx] = v;
    }

    /// Coordinates of a flat index.
    pub fn coords(&self, mut idx: usize) -> Vec<u64> {
        let p = self.p as usize;
        let mut out = vec![0; self.dim as usize];
        for c in out.iter_mut().rev() {
            *c = (idx % p) as u64;
            idx /= p;
        }
        out
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &FpFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn characters(p: u64) -> Vec<Complex64> {
    (0..p)
        .map(|t| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / p as f64))
        .collect()
}

fn transform(f: &FpFunction, sign: i64, scale: f64) -> FpFunction {
    let p = f.p;
    let ctx = FieldCtx::new(p).expect("tables are built over a valid field");
    let chi = characters(p);
    let coords: Vec<Vec<u64>> = (0..f.values.len()).map(|i| f.coords(i)).collect();
    let values = (0..f.values.len())
        .into_par_iter()
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, &fx) in f.values.iter().enumerate() {
                if fx == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dot = ctx.dot(&coords[m], &coords[x]);
                let phase = if sign < 0 { ctx.neg(dot) } else { dot };
                acc += chi[phase as usize] * fx;
            }
            acc * scale
        })
        .collect();
    FpFunction {
        p,
        dim: f.dim,
        values,
    }
}

pub fn dft(f: &FpFunction) -> FpFunction {
    transform(f, -1, (f.p as f64).powi(-(f.dim as i32)))
}

pub fn idft(fhat: &FpFunction) -> FpFunction {
    transform(fhat, 1, 1.0)
}

/// Incidence count of `A × B` against `S` reconstructed from Fourier coefficients.
///
/// Uses `I = |A||B||S|/p² + p² Σ_{m≠0} Σ_{θ∈S} Â(−m) B̂(θᵀm)`, where the
/// transform of the product set factors into the planar transforms.
pub fn incidence_via_fourier(
    ctx: &FieldCtx,
    a: &PointSet2,
    b: &PointSet2,
    s: &MatrixSet<Sl2Elem>,
) -> Result<f64> {
    let p = ctx.p();
    if p > FOURIER_INCIDENCE_CAP {
        return Err(Error::CapExceeded {
            what: "p for Fourier incidence reconstruction",
            value: p,
            cap: FOURIER_INCIDENCE_CAP,
        });
    }
    for q in [a.p(), b.p(), s.p()] {
        if q != p {
            return Err(Error::MixedModulus(p, q));
        }
    }
    let ahat = dft(&FpFunction::indicator2(a));
    let bhat = dft(&FpFunction::indicator2(b));
    let pf = p as f64;
    let main = (a.len() * b.len() * s.len()) as f64 / (pf * pf);
    let tail: Complex64 = (1..(p * p) as usize)
        .into_par_iter()
        .map(|mi| {
            let m = crate::field::FpVec2::from_index(mi, p);
            let am = ahat.get(ctx.scale2(p - 1, m).index(p));
            s.iter()
                .map(|theta| am * bhat.get(theta.transpose().act(ctx, m).index(p)))
                .sum::<Complex64>()
        })
        .sum();
    Ok(main + pf * pf * tail.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FpVec2;

    fn lcg_values(n: usize, seed: u64) -> Vec<Complex64> {
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let re = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let im = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Complex64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn delta_and_constant() {
        for (p, n) in [(3u64, 2u32), (5, 2), (3, 3)] {
            let mut delta = FpFunction::zeros(p, n).unwrap();
            delta.set(0, Complex64::new(1.0, 0.0));
            let d = dft(&delta);
            let c = (p as f64).powi(-(n as i32));
            assert!(d.values().iter().all(|v| (v - c).norm() < 1e-12));
            assert!((d.l2_norm_sq() - c).abs() < 1e-12);

            let len = delta.values().len();
            let ones = FpFunction::from_values(p, n, vec![Complex64::new(1.0, 0.0); len]).unwrap();
            let o = dft(&ones);
            assert!((o.get(0) - 1.0).norm() < 1e-12);
            assert!(o.values()[1..].iter().all(|v| v.norm() < 1e-12));

            let zero = FpFunction::zeros(p, n).unwrap();
            assert!(dft(&zero).values().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn inversion_and_plancherel() {
        let f = FpFunction::from_values(3, 2, lcg_values(9, 7)).unwrap();
        let back = idft(&dft(&f));
        assert!(back.max_abs_diff(&f) < 1e-12);
        let fhat = dft(&f);
        assert!((fhat.l2_norm_sq() - f.l2_norm_sq() / 9.0).abs() < 1e-12);

        let set =
            PointSet2::new(5, [FpVec2::new(1, 2), FpVec2::new(0, 0), FpVec2::new(4, 4)]).unwrap();
        let ind = FpFunction::indicator2(&set);
        assert!((dft(&ind).l2_norm_sq() - 3.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn product_transform_factors() {
        let p = 3;
        let a = PointSet2::new(p, [FpVec2::new(1, 0), FpVec2::new(2, 1)]).unwrap();
        let b =
            PointSet2::new(p, [FpVec2::new(0, 1), FpVec2::new(1, 1), FpVec2::new(2, 2)]).unwrap();
        let mut prod = FpFunction::zeros(p, 4).unwrap();
        for x in a.iter() {
            for y in b.iter() {
                let idx = prod.index_of(&[x.x, x.y, y.x, y.y]);
                prod.set(idx, Complex64::new(1.0, 0.0));
            }
        }
        let phat = dft(&prod);
        let ahat = dft(&FpFunction::indicator2(&a));
        let bhat = dft(&FpFunction::indicator2(&b));
        for i in 0..81 {
            let c = phat.coords(i);
            let lhs = phat.get(i);
            let rhs = ahat.get(ahat.index_of(&c[..2])) * bhat.get(bhat.index_of(&c[2..]));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn incidence_examples() {
        let ctx = FieldCtx::new(5).unwrap();
        let id = MatrixSet::new(&ctx, [Sl2Elem::IDENTITY]);
        let a = PointSet2::new(5, [FpVec2::new(1, 0)]).unwrap();
        assert!((incidence_via_fourier(&ctx, &a, &a, &id).unwrap() - 1.0).abs() < 1e-6);
        let b = PointSet2::new(5, [FpVec2::new(0, 1)]).unwrap();
        assert!(incidence_via_fourier(&ctx, &a, &b, &id).unwrap().abs() < 1e-6);

        let c17 = FieldCtx::new(17).unwrap();
        let e = PointSet2::empty(17).unwrap();
        let s = MatrixSet::new(&c17, [Sl2Elem::IDENTITY]);
        assert!(matches!(
            incidence_via_fourier(&c17, &e, &e, &s),
            Err(Error::CapExceeded { .. })
        ));
    }
}
