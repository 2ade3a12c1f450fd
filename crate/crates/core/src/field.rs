//! Arithmetic in the prime field F_p and the small vector spaces F_p^2, F_p^3.
//!
//! Every residue is stored as its least nonnegative representative, so two
//! values are equal iff their encodings are equal.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moduli below this get an eagerly built inverse table.
const EAGER_INVERSE_LIMIT: u64 = 1 << 20;

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A validated odd prime modulus.
#[derive(Clone)]
pub struct FieldCtx {
    p: u64,
    inv_table: Option<Arc<Vec<u64>>>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx").field("p", &self.p).finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenModulus(p));
        }
        let inv_table = (p < EAGER_INVERSE_LIMIT).then(|| Arc::new(build_inverse_table(p)));
        Ok(FieldCtx { p, inv_table })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    /// Reduces a signed integer to its least nonnegative residue.
    #[inline]
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p <= u32::MAX as u64 {
            a * b % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.inv_table {
            Some(t) => t[a as usize],
            None => inverse_euclid(a, self.p),
        })
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The inverse of 2, always defined since p is odd.
    #[inline]
    pub fn half(&self) -> u64 {
        self.p.div_ceil(2)
    }

    pub fn vec2(&self, x: i64, y: i64) -> FpVec2 {
        FpVec2::new(self.from_i64(x), self.from_i64(y))
    }

    pub fn vec3(&self, x: i64, y: i64, z: i64) -> FpVec3 {
        FpVec3::new(self.from_i64(x), self.from_i64(y), self.from_i64(z))
    }

    /// Skew form `x · y^⊥` with `y^⊥ = (−y₂, y₁)`, i.e. `x₂y₁ − x₁y₂`.
    #[inline]
    pub fn skew(&self, x: FpVec2, y: FpVec2) -> u64 {
        self.sub(self.mul(x.y, y.x), self.mul(x.x, y.y))
    }

    #[inline]
    pub fn scale2(&self, s: u64, v: FpVec2) -> FpVec2 {
        FpVec2::new(self.mul(s, v.x), self.mul(s, v.y))
    }

    #[inline]
    pub fn sub2(&self, a: FpVec2, b: FpVec2) -> FpVec2 {
        FpVec2::new(self.sub(a.x, b.x), self.sub(a.y, b.y))
    }

    #[inline]
    pub fn add2(&self, a: FpVec2, b: FpVec2) -> FpVec2 {
        FpVec2::new(self.add(a.x, b.x), self.add(a.y, b.y))
    }

    /// Dot product of two vectors of equal length.
    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&u, &v)| self.add(acc, self.mul(u, v)))
    }

    /// Canonical direction of a nonzero vector: `(1, m)` or `(0, 1)`.
    pub fn direction(&self, v: FpVec2) -> Option<FpVec2> {
        if v.x != 0 {
            let inv = self.inv(v.x).ok()?;
            Some(FpVec2::new(1, self.mul(v.y, inv)))
        } else if v.y != 0 {
            Some(FpVec2::new(0, 1))
        } else {
            None
        }
    }

    /// Index in `0..=p` of the direction of a nonzero vector: slope `m` for
    /// `(1, m)`, and `p` for the vertical direction.
    pub fn direction_index(&self, v: FpVec2) -> Option<usize> {
        if v.x != 0 {
            Some(self.mul(v.y, self.inv(v.x).ok()?) as usize)
        } else if v.y != 0 {
            Some(self.p as usize)
        } else {
            None
        }
    }

    /// Representative vector of a direction index produced by [`direction_index`].
    ///
    /// [`direction_index`]: FieldCtx::direction_index
    pub fn direction_vector(&self, idx: usize) -> FpVec2 {
        if idx as u64 == self.p {
            FpVec2::new(0, 1)
        } else {
            FpVec2::new(1, idx as u64)
        }
    }
}

fn build_inverse_table(p: u64) -> Vec<u64> {
    let n = p as usize;
    let mut inv = vec![0u64; n];
    if n > 1 {
        inv[1] = 1;
    }
    for i in 2..n {
        let q = p / i as u64;
        let r = (p % i as u64) as usize;
        inv[i] = (p - q * inv[r] % p) % p;
    }
    inv
}

fn inverse_euclid(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i128) as u64
}

/// A point of F_p^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVec2 {
    pub x: u64,
    pub y: u64,
}

impl FpVec2 {
    pub const ZERO: FpVec2 = FpVec2 { x: 0, y: 0 };

    pub const fn new(x: u64, y: u64) -> Self {
        FpVec2 { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    #[inline]
    pub fn index(&self, p: u64) -> usize {
        (self.x * p + self.y) as usize
    }

    pub fn from_index(idx: usize, p: u64) -> Self {
        let i = idx as u64;
        FpVec2::new(i / p, i % p)
    }
}

/// A point of F_p^3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVec3 {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl FpVec3 {
    pub const fn new(x: u64, y: u64, z: u64) -> Self {
        FpVec3 { x, y, z }
    }

    #[inline]
    pub fn index(&self, p: u64) -> usize {
        ((self.x * p + self.y) * p + self.z) as usize
    }

    pub fn from_index(idx: usize, p: u64) -> Self {
        let i = idx as u64;
        FpVec3::new(i / (p * p), (i / p) % p, i % p)
    }

    /// Projection onto the last two coordinates.
    pub fn tail(&self) -> FpVec2 {
        FpVec2::new(self.y, self.z)
    }
}
