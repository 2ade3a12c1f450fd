use serde::{Deserialize, Serialize};

use super::set::MatrixSet;
use super::sl2::Sl2Elem;
use crate::field::FieldCtx;

/// Largest order of an exceptional subgroup of SL2(F_p); these are not enumerated.
pub const EXCEPTIONAL_ORDER_BOUND: u64 = 120;

/// The coset attaining the maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CosetWitness {
    /// `{θ : θ(from) = to}` for directions `from`, `to` (a Borel coset).
    Borel { from: usize, to: usize },
    /// `{θ : θ{from} = {to}}` for unordered direction pairs (a coset of a split torus normalizer).
    SplitTorusNormalizer { from: [usize; 2], to: [usize; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetReport {
    pub set_size: usize,
    pub gamma: f64,
    pub max_ratio: f64,
    pub max_count: usize,
    pub witness: Option<CosetWitness>,
    pub borel_max_ratio: f64,
    pub torus_normalizer_max_ratio: f64,
    /// `p^{−γ/2}`.
    pub threshold: f64,
    pub bg_condition_holds: bool,
    /// `120/|S|`; absent for the empty set.
    pub exceptional_slack: Option<f64>,
    pub unchecked: Vec<String>,
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    // row-major index into the strict upper triangle of an n×n matrix
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn pair_from_index(n: usize, mut idx: usize) -> [usize; 2] {
    for i in 0..n {
        let row = n - i - 1;
        if idx < row {
            return [i, i + 1 + idx];
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}

/// Largest fraction of `S` inside one left coset of a Borel subgroup or of a
/// split torus normalizer.
pub fn max_coset_intersection(ctx: &FieldCtx, s: &MatrixSet<Sl2Elem>, gamma: f64) -> CosetReport {
    let p = ctx.p();
    let n = p as usize + 1;
    // image[θ][d] = θ applied to direction d
    let images: Vec<Vec<usize>> = s
        .iter()
        .map(|g| {
            (0..n)
                .map(|d| {
                    ctx.direction_index(g.act(ctx, ctx.direction_vector(d)))
                        .expect("group elements are invertible")
                })
                .collect()
        })
        .collect();

    let mut borel_best = (0usize, None);
    let mut hist = vec![0usize; n];
    for d in 0..n {
        hist.iter_mut().for_each(|h| *h = 0);
        for img in &images {
            hist[img[d]] += 1;
        }
        for (e, &c) in hist.iter().enumerate() {
            if c > borel_best.0 {
                borel_best = (c, Some(CosetWitness::Borel { from: d, to: e }));
            }
        }
    }

    let pairs = n * (n - 1) / 2;
    let mut torus_best = (0usize, None);
    let mut hist = vec![0usize; pairs];
    for src in 0..pairs {
        let [d1, d2] = pair_from_index(n, src);
        hist.iter_mut().for_each(|h| *h = 0);
        for img in &images {
            hist[pair_index(n, img[d1], img[d2])] += 1;
        }
        for (dst, &c) in hist.iter().enumerate() {
            if c > torus_best.0 {
                torus_best = (
                    c,
                    Some(CosetWitness::SplitTorusNormalizer {
                        from: [d1, d2],
                        to: pair_from_index(n, dst),
                    }),
                );
            }
        }
    }

    let size = s.len();
    let ratio = |c: usize| {
        if size == 0 {
            0.0
        } else {
            c as f64 / size as f64
        }
    };
    let (max_count, witness) = if torus_best.0 > borel_best.0 {
        torus_best.clone()
    } else {
        borel_best.clone()
    };
    let threshold = (p as f64).powf(-gamma / 2.0);
    let max_ratio = ratio(max_count);
    CosetReport {
        set_size: size,
        gamma,
        max_ratio,
        max_count,
        witness,
        borel_max_ratio: ratio(borel_best.0),
        torus_normalizer_max_ratio: ratio(torus_best.0),
        threshold,
        bg_condition_holds: max_ratio < threshold,
        exceptional_slack: (size > 0).then(|| EXCEPTIONAL_ORDER_BOUND as f64 / size as f64),
        unchecked: vec![
            "normalizers of nonsplit tori".to_string(),
            "exceptional subgroups (covered by exceptional_slack)".to_string(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FpVec2;
    use crate::groups::{enumerate_sl2, transporter_fiber};

    #[test]
    fn pair_indexing_roundtrip() {
        let n = 8;
        let mut seen = 0;
        for i in 0..n {
            for j in i + 1..n {
                let k = pair_index(n, i, j);
                assert_eq!(k, seen);
                assert_eq!(pair_index(n, j, i), k);
                assert_eq!(pair_from_index(n, k), [i, j]);
                seen += 1;
            }
        }
    }

    #[test]
    fn full_group_gives_borel_index() {
        let ctx = FieldCtx::new(5).unwrap();
        let g = enumerate_sl2(&ctx, 31).unwrap();
        let r = max_coset_intersection(&ctx, &g, 0.5);
        assert!((r.max_ratio - 1.0 / 6.0).abs() < 1e-12);
        assert!((r.torus_normalizer_max_ratio - 8.0 / 120.0).abs() < 1e-12);
        assert!(matches!(r.witness, Some(CosetWitness::Borel { .. })));
        assert!(r.bg_condition_holds);
    }

    #[test]
    fn subgroup_and_singletons_fill_a_coset() {
        let ctx = FieldCtx::new(7).unwrap();
        let g = enumerate_sl2(&ctx, 31).unwrap();
        // stabilizer of the direction of (1,0)
        let d = ctx.direction_index(FpVec2::new(1, 0)).unwrap();
        let borel = MatrixSet::new(
            &ctx,
            g.iter()
                .copied()
                .filter(|h| ctx.direction_index(h.act(&ctx, FpVec2::new(1, 0))) == Some(d)),
        );
        assert_eq!(borel.len(), 42);
        let r = max_coset_intersection(&ctx, &borel, 0.1);
        assert_eq!(r.max_ratio, 1.0);
        assert!(!r.bg_condition_holds);

        let id = MatrixSet::new(&ctx, [Sl2Elem::IDENTITY]);
        assert_eq!(max_coset_intersection(&ctx, &id, 0.5).max_ratio, 1.0);

        let fiber = transporter_fiber(&ctx, FpVec2::new(1, 0), FpVec2::new(0, 1)).unwrap();
        assert_eq!(max_coset_intersection(&ctx, &fiber, 0.5).max_ratio, 1.0);

        let empty = MatrixSet::<Sl2Elem>::new(&ctx, []);
        let r = max_coset_intersection(&ctx, &empty, 0.5);
        assert_eq!(r.max_ratio, 0.0);
        assert_eq!(r.exceptional_slack, None);
    }

    #[test]
    fn coset_counts_match_brute_force_p3() {
        let ctx = FieldCtx::new(3).unwrap();
        let g = enumerate_sl2(&ctx, 31).unwrap();
        // every left coset of every checked subgroup, enumerated as a set
        let s = MatrixSet::new(&ctx, g.iter().copied().step_by(5));
        let dir = |v| ctx.direction_index(v).unwrap();
        let mut best = 0;
        for h in g.iter() {
            for d1 in 0..4 {
                let img1 = dir(h.act(&ctx, ctx.direction_vector(d1)));
                best = best.max(
                    s.iter()
                        .filter(|t| dir(t.act(&ctx, ctx.direction_vector(d1))) == img1)
                        .count(),
                );
                for d2 in d1 + 1..4 {
                    let img2 = dir(h.act(&ctx, ctx.direction_vector(d2)));
                    let c = s
                        .iter()
                        .filter(|t| {
                            let a = dir(t.act(&ctx, ctx.direction_vector(d1)));
                            let b = dir(t.act(&ctx, ctx.direction_vector(d2)));
                            (a, b) == (img1, img2) || (a, b) == (img2, img1)
                        })
                        .count();
                    best = best.max(c);
                }
            }
        }
        assert_eq!(max_coset_intersection(&ctx, &s, 0.5).max_count, best);
    }
}
