//! Finite point sets in F_p^2 and F_p^3 backed by presence bitmaps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2, FpVec3};

/// Largest universe (p^dim) a point set may index.
pub const UNIVERSE_CAP: u64 = 1 << 26;

/// Fixed-size presence bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitmap {
    words: Vec<u64>,
    len: usize,
}

impl Bitmap {
    pub fn new(len: usize) -> Self {
        Bitmap {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Sets bit `i`, returning whether it was previously clear.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let w = &mut self.words[i >> 6];
        let mask = 1u64 << (i & 63);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    pub fn union_with(&mut self, other: &Bitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

pub(crate) fn check_universe(p: u64, dim: u32) -> Result<usize> {
    let size = p.checked_pow(dim).unwrap_or(u64::MAX);
    if size > UNIVERSE_CAP {
        return Err(Error::CapExceeded {
            what: "point universe p^dim",
            value: size,
            cap: UNIVERSE_CAP,
        });
    }
    Ok(size as usize)
}

/// Statistics of a planar set relative to lines through the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionStats {
    /// Most nonzero points on a single line through the origin.
    pub k1: usize,
    /// Number of lines through the origin meeting the set away from the origin.
    pub k2: usize,
    /// Count per direction index (`0..p` slopes, `p` vertical).
    pub per_direction: Vec<usize>,
}

/// Statistics of the fibers of the projection (x, y, z) -> (y, z).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberStats {
    pub max_fiber: usize,
    /// `1 − log_p(max_fiber)`.
    pub empirical_eps: f64,
}

/// A subset of F_p^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet2 {
    p: u64,
    points: Vec<FpVec2>,
    present: Bitmap,
}

impl PointSet2 {
    pub fn new(p: u64, pts: impl IntoIterator<Item = FpVec2>) -> Result<Self> {
        let size = check_universe(p, 2)?;
        let mut present = Bitmap::new(size);
        let mut points = Vec::new();
        for v in pts {
            for c in [v.x, v.y] {
                if c >= p {
                    return Err(Error::OutOfRange { value: c, p });
                }
            }
            if present.insert(v.index(p)) {
                points.push(v);
            }
        }
        points.sort_unstable();
        Ok(PointSet2 { p, points, present })
    }

    pub fn empty(p: u64) -> Result<Self> {
        Self::new(p, [])
    }

    pub fn full(p: u64) -> Result<Self> {
        Self::new(p, (0..(p * p) as usize).map(|i| FpVec2::from_index(i, p)))
    }

    pub(crate) fn from_bitmap(p: u64, present: Bitmap) -> Self {
        let points = present
            .iter_ones()
            .map(|i| FpVec2::from_index(i, p))
            .collect();
        PointSet2 { p, points, present }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: FpVec2) -> bool {
        v.x < self.p && v.y < self.p && self.present.get(v.index(self.p))
    }

    pub fn points(&self) -> &[FpVec2] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = FpVec2> + '_ {
        self.points.iter().copied()
    }

    pub fn bitmap(&self) -> &Bitmap {
        &self.present
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(FpVec2::ZERO)
    }

    pub fn direction_stats(&self, ctx: &FieldCtx) -> DirectionStats {
        let mut per_direction = vec![0usize; self.p as usize + 1];
        for v in self.iter() {
            if let Some(d) = ctx.direction_index(v) {
                per_direction[d] += 1;
            }
        }
        DirectionStats {
            k1: per_direction.iter().copied().max().unwrap_or(0),
            k2: per_direction.iter().filter(|&&c| c > 0).count(),
            per_direction,
        }
    }

    /// Most points of the set (origin included) on one line through the origin.
    pub fn max_origin_line_count(&self, ctx: &FieldCtx) -> usize {
        let k1 = self.direction_stats(ctx).k1;
        k1 + usize::from(self.contains_origin())
    }

    pub fn union(&self, other: &PointSet2) -> Result<PointSet2> {
        if self.p != other.p {
            return Err(Error::MixedModulus(self.p, other.p));
        }
        let mut bm = self.present.clone();
        bm.union_with(&other.present);
        Ok(PointSet2::from_bitmap(self.p, bm))
    }

    pub fn without_origin(&self) -> PointSet2 {
        PointSet2::new(self.p, self.iter().filter(|v| !v.is_zero())).expect("subset of a valid set")
    }
}

/// A subset of F_p^3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet3 {
    p: u64,
    points: Vec<FpVec3>,
    present: Bitmap,
}

impl PointSet3 {
    pub fn new(p: u64, pts: impl IntoIterator<Item = FpVec3>) -> Result<Self> {
        let size = check_universe(p, 3)?;
        let mut present = Bitmap::new(size);
        let mut points = Vec::new();
        for v in pts {
            for c in [v.x, v.y, v.z] {
                if c >= p {
                    return Err(Error::OutOfRange { value: c, p });
                }
            }
            if present.insert(v.index(p)) {
                points.push(v);
            }
        }
        points.sort_unstable();
        Ok(PointSet3 { p, points, present })
    }

    pub(crate) fn from_bitmap(p: u64, present: Bitmap) -> Self {
        let points = present
            .iter_ones()
            .map(|i| FpVec3::from_index(i, p))
            .collect();
        PointSet3 { p, points, present }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: FpVec3) -> bool {
        v.x < self.p && v.y < self.p && v.z < self.p && self.present.get(v.index(self.p))
    }

    pub fn points(&self) -> &[FpVec3] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = FpVec3> + '_ {
        self.points.iter().copied()
    }

    pub fn bitmap(&self) -> &Bitmap {
        &self.present
    }

    /// Points grouped by third coordinate; entry `λ` holds the layer z = λ.
    pub fn layers(&self) -> Vec<Vec<FpVec3>> {
        let mut out = vec![Vec::new(); self.p as usize];
        for v in self.iter() {
            out[v.z as usize].push(v);
        }
        out
    }

    /// Sorted distinct third coordinates.
    pub fn third_coordinates(&self) -> Vec<u64> {
        let mut zs: Vec<u64> = self.iter().map(|v| v.z).collect();
        zs.sort_unstable();
        zs.dedup();
        zs
    }

    pub fn has_zero_third_coordinate(&self) -> bool {
        self.iter().any(|v| v.z == 0)
    }

    pub fn fiber_stats(&self) -> Result<FiberStats> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let p = self.p as usize;
        let mut counts = vec![0usize; p * p];
        for v in self.iter() {
            counts[v.tail().index(self.p)] += 1;
        }
        let max_fiber = counts.into_iter().max().unwrap_or(0);
        let empirical_eps = 1.0 - (max_fiber as f64).ln() / (self.p as f64).ln();
        Ok(FiberStats {
            max_fiber,
            empirical_eps: empirical_eps.clamp(0.0, 1.0),
        })
    }
}
