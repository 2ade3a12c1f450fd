//! Packing sets `S(E) = ⋃_{f∈S} f(E)` and the lower bounds they are compared with.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2};
use crate::groups::{H1Elem, MatrixSet, Sl2Elem};
use crate::points::{check_universe, Bitmap, PointSet2, PointSet3};
use crate::report::{Params, Precondition};
use crate::sl2_incidence::expansion_preconditions;

/// Theorem ids understood by [`predicted_lower_bound`].
pub const PACKING_THEOREMS: &[&str] = &[
    "prop-1.1", "thm-1.2", "prop-1.3", "thm-1.4", "thm-1.5", "thm-4.2a", "thm-4.2b", "rmk-4.4",
];

fn union_images<T: Copy + Send + Sync>(
    size: usize,
    elems: &[T],
    pts: &[usize],
    map: impl Fn(&T, usize) -> usize + Sync,
) -> Bitmap {
    elems
        .par_iter()
        .fold(
            || Bitmap::new(size),
            |mut bm, g| {
                for &i in pts {
                    bm.insert(map(g, i));
                }
                bm
            },
        )
        .reduce(
            || Bitmap::new(size),
            |mut a, b| {
                a.union_with(&b);
                a
            },
        )
}

/// `S(E)` for `S ⊆ SL2(F_p)` and `E ⊆ F_p²`.
pub fn image_set(ctx: &FieldCtx, s: &MatrixSet<Sl2Elem>, e: &PointSet2) -> Result<PointSet2> {
    let p = ctx.p();
    for q in [s.p(), e.p()] {
        if q != p {
            return Err(Error::MixedModulus(p, q));
        }
    }
    let size = check_universe(p, 2)?;
    let pts: Vec<usize> = e.iter().map(|v| v.index(p)).collect();
    let bm = union_images(size, s.elems(), &pts, |g, i| {
        g.act(ctx, FpVec2::from_index(i, p)).index(p)
    });
    Ok(PointSet2::from_bitmap(p, bm))
}

/// `X(E)` for `X ⊆ H1(F_p)` and `E ⊆ F_p³`.
pub fn image_set_h1(ctx: &FieldCtx, x: &MatrixSet<H1Elem>, e: &PointSet3) -> Result<PointSet3> {
    let p = ctx.p();
    for q in [x.p(), e.p()] {
        if q != p {
            return Err(Error::MixedModulus(p, q));
        }
    }
    let size = check_universe(p, 3)?;
    let pts: Vec<usize> = e.iter().map(|v| v.index(p)).collect();
    let matrices: Vec<H1Elem> = x.iter().map(|g| g.to_matrix(ctx)).collect();
    let bm = union_images(size, &matrices, &pts, |g, i| {
        g.act(ctx, crate::field::FpVec3::from_index(i, p)).index(p)
    });
    Ok(PointSet3::from_bitmap(p, bm))
}

/// `E − x`.
pub fn translate(ctx: &FieldCtx, e: &PointSet2, x: FpVec2) -> PointSet2 {
    PointSet2::new(e.p(), e.iter().map(|v| ctx.sub2(v, x))).expect("translation stays in range")
}

/// The point of `E` seeing the most directions through other points of `E`,
/// with that direction count.
pub fn find_rich_point(ctx: &FieldCtx, e: &PointSet2) -> Result<(FpVec2, usize)> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = e.p() as usize + 1;
    let counts: Vec<usize> = e
        .points()
        .par_iter()
        .map(|&x| {
            let mut seen = vec![false; n];
            for y in e.iter() {
                if let Some(d) = ctx.direction_index(ctx.sub2(y, x)) {
                    seen[d] = true;
                }
            }
            seen.iter().filter(|&&s| s).count()
        })
        .collect();
    let (best, &count) = counts
        .iter()
        .enumerate()
        .max_by_key(|&(i, c)| (c, std::cmp::Reverse(i)))
        .expect("nonempty");
    Ok((e.points()[best], count))
}

/// Sizes and structure parameters entering a packing lower bound.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PackingParams {
    pub p: u64,
    pub e_size: usize,
    pub s_size: usize,
    pub k: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub eps: Option<f64>,
}

/// Whether the bound is stated up to a `log₂ p` loss.
pub fn has_log_factor(theorem_id: &str) -> bool {
    matches!(theorem_id, "prop-1.3" | "thm-1.4" | "rmk-4.4")
}

/// The lower bound of a packing theorem with implied constant 1.
pub fn predicted_lower_bound(theorem_id: &str, params: &PackingParams) -> Result<f64> {
    let p = params.p as f64;
    let e = params.e_size as f64;
    let s = params.s_size as f64;
    let eps = params.eps.unwrap_or(0.0);
    let k = || params.k.ok_or(Error::MissingParam("k"));
    let k1 = || params.k1.ok_or(Error::MissingParam("k1"));
    let k2 = || params.k2.ok_or(Error::MissingParam("k2"));
    let log = if has_log_factor(theorem_id) {
        p.log2()
    } else {
        1.0
    };
    let value = match theorem_id {
        "prop-1.1" => (p * p).min(s * e / (p * p)),
        "thm-1.2" => {
            let k = k()?;
            let a = s * e / (p * k);
            let b = s.sqrt() * e / (p.powf((1.0 - eps) / 2.0) * k.sqrt());
            (p * p).min(a.max(b))
        }
        "prop-1.3" | "thm-1.4" => {
            let (k1, k2) = (k1()?, k2()?);
            let boost = if theorem_id == "thm-1.4" {
                p.powf(eps / 2.0)
            } else {
                1.0
            };
            [
                e * s.sqrt() * boost / (k1 * k2).sqrt(),
                e.sqrt() * s.sqrt() * boost / k1.powf(0.25),
                e * s.sqrt() * boost / k1,
                e * e / k1,
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
        }
        "thm-1.5" => (p * p * p).min(s * e / p.powf(3.0 - eps / 2.0)),
        "thm-4.2a" => p * p,
        "thm-4.2b" => (p * p).min(s * e / (p * k()?)),
        "rmk-4.4" => {
            let k1 = k1()?;
            let boost = p.powf(eps / 2.0);
            [
                e.powf(0.337) * s.sqrt() * boost / k1.powf(2.0 / 15.0),
                e * s.sqrt() * boost / k1,
                e * e / k1,
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
        }
        other => return Err(Error::UnknownTheorem(other.to_string())),
    };
    Ok(value / log)
}

/// Result of scanning every translate `E − x` for the largest packing set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslateScan {
    pub best_shift: FpVec2,
    pub best_image_size: usize,
    pub rich_point: FpVec2,
    pub rich_direction_count: usize,
    pub rich_point_image_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub theorem_id: String,
    pub p: u64,
    pub e_size: usize,
    pub s_size: usize,
    pub image_size: usize,
    pub predicted: f64,
    /// `|S(E)| / predicted`; absent when the prediction is zero.
    pub ratio: Option<f64>,
    pub log_factor: bool,
    pub params: Params,
    pub preconditions: Vec<Precondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate_scan: Option<TranslateScan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Caller-supplied overrides for [`compare`].
#[derive(Clone, Debug, Default)]
pub struct CompareOptions {
    pub k: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
}

fn ratio(actual: usize, predicted: f64) -> Option<f64> {
    (predicted > 0.0).then(|| actual as f64 / predicted)
}

/// Computes `|S(E)|` and compares it with an SL2 packing bound.
pub fn compare(
    ctx: &FieldCtx,
    s: &MatrixSet<Sl2Elem>,
    e: &PointSet2,
    theorem_id: &str,
    opts: &CompareOptions,
) -> Result<PackingReport> {
    if theorem_id == "thm-1.5" {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: 2,
        });
    }
    let p = ctx.p();
    let pf = p as f64;
    let stats = e.direction_stats(ctx);
    let k = opts
        .k
        .unwrap_or_else(|| e.max_origin_line_count(ctx).max(1) as f64);
    let k1 = opts.k1.unwrap_or(stats.k1.max(1) as f64);
    let k2 = opts.k2.unwrap_or(stats.k2.max(1) as f64);
    let eps = opts.eps.unwrap_or(0.0);
    let params = PackingParams {
        p,
        e_size: e.len(),
        s_size: s.len(),
        k: Some(k),
        k1: Some(k1),
        k2: Some(k2),
        eps: Some(eps),
    };
    let predicted = predicted_lower_bound(theorem_id, &params)?;

    let mut pre = Vec::new();
    let (en, sn) = (e.len() as f64, s.len() as f64);
    match theorem_id {
        "thm-1.2" | "thm-1.4" | "rmk-4.4" => {
            pre.extend(expansion_preconditions(ctx, s, opts.gamma))
        }
        _ => {}
    }
    match theorem_id {
        "prop-1.3" | "thm-1.4" => {
            pre.push(Precondition::checked("|E| ≤ p", en <= pf));
            pre.push(Precondition::checked("(0,0) ∉ E", !e.contains_origin()));
        }
        "rmk-4.4" => {
            pre.push(Precondition::checked(
                "|E| ≤ p^(8/15)",
                en <= pf.powf(8.0 / 15.0),
            ));
            pre.push(Precondition::checked("(0,0) ∉ E", !e.contains_origin()));
        }
        "thm-4.2a" => {
            pre.push(Precondition::checked("|E| ≥ 4p", en >= 4.0 * pf));
            pre.push(
                Precondition::checked("|S| ≥ p²", sn >= pf * pf)
                    .with_note("stated as |S| ≫ p²; checked with constant 1"),
            );
        }
        _ => {}
    }

    let (image_size, translate_scan) = if theorem_id == "thm-4.2a" {
        let (rich, count) = find_rich_point(ctx, e)?;
        let sizes: Vec<(FpVec2, usize)> = e
            .iter()
            .map(|x| Ok((x, image_set(ctx, s, &translate(ctx, e, x))?.len())))
            .collect::<Result<_>>()?;
        let &(best_shift, best) = sizes
            .iter()
            .max_by_key(|&&(x, n)| (n, std::cmp::Reverse(x)))
            .expect("nonempty");
        let rich_size = sizes
            .iter()
            .find(|(x, _)| *x == rich)
            .map(|&(_, n)| n)
            .unwrap_or(0);
        (
            best,
            Some(TranslateScan {
                best_shift,
                best_image_size: best,
                rich_point: rich,
                rich_direction_count: count,
                rich_point_image_size: rich_size,
            }),
        )
    } else {
        (image_set(ctx, s, e)?.len(), None)
    };

    Ok(PackingReport {
        theorem_id: theorem_id.to_string(),
        p,
        e_size: e.len(),
        s_size: s.len(),
        image_size,
        predicted,
        ratio: ratio(image_size, predicted),
        log_factor: has_log_factor(theorem_id),
        params: Params {
            k: Some(k),
            k1: Some(k1),
            k2: Some(k2),
            gamma: opts.gamma,
            eps: Some(eps),
        },
        preconditions: pre,
        translate_scan,
        seed: opts.seed,
    })
}

/// Computes `|X(E)|` and compares it with the Heisenberg packing bound.
pub fn compare_h1(
    ctx: &FieldCtx,
    x: &MatrixSet<H1Elem>,
    e: &PointSet3,
    opts: &CompareOptions,
) -> Result<PackingReport> {
    if e.has_zero_third_coordinate() {
        return Err(Error::PreconditionViolated(
            "E has points with third coordinate 0".into(),
        ));
    }
    let eps = match opts.eps {
        Some(v) => v,
        None => e.fiber_stats()?.empirical_eps,
    };
    let params = PackingParams {
        p: ctx.p(),
        e_size: e.len(),
        s_size: x.len(),
        eps: Some(eps),
        ..Default::default()
    };
    let predicted = predicted_lower_bound("thm-1.5", &params)?;
    let image_size = image_set_h1(ctx, x, e)?.len();
    Ok(PackingReport {
        theorem_id: "thm-1.5".to_string(),
        p: ctx.p(),
        e_size: e.len(),
        s_size: x.len(),
        image_size,
        predicted,
        ratio: ratio(image_size, predicted),
        log_factor: false,
        params: Params {
            eps: Some(eps),
            ..Default::default()
        },
        preconditions: vec![Precondition::checked("third coordinates nonzero", true)],
        translate_scan: None,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FpVec3;
    use crate::groups::{enumerate_h1, enumerate_sl2, Convention};

    #[test]
    fn images_of_full_group() {
        let ctx = FieldCtx::new(5).unwrap();
        let g = enumerate_sl2(&ctx, 31).unwrap();
        let e = PointSet2::new(5, [FpVec2::new(1, 0)]).unwrap();
        let img = image_set(&ctx, &g, &e).unwrap();
        assert_eq!(img.len(), 24);
        assert!(!img.contains_origin());
        let id = MatrixSet::new(&ctx, [Sl2Elem::IDENTITY]);
        let e = PointSet2::new(5, [FpVec2::new(1, 2), FpVec2::new(3, 3)]).unwrap();
        assert_eq!(image_set(&ctx, &id, &e).unwrap(), e);

        let full = PointSet2::full(5).unwrap();
        let r = compare(&ctx, &g, &full, "prop-1.1", &CompareOptions::default()).unwrap();
        assert_eq!(r.image_size, 25);
        assert_eq!(r.ratio, Some(1.0));
    }

    #[test]
    fn h1_images_keep_layers() {
        let ctx = FieldCtx::new(5).unwrap();
        let x = enumerate_h1(&ctx, Convention::Matrix);
        let e = PointSet3::new(5, [FpVec3::new(0, 0, 2), FpVec3::new(1, 3, 4)]).unwrap();
        let img = image_set_h1(&ctx, &x, &e).unwrap();
        assert_eq!(img.len(), 50);
        assert_eq!(img.third_coordinates(), e.third_coordinates());
    }

    #[test]
    fn predictions() {
        let p = 7u64;
        let pp = PackingParams {
            p,
            e_size: 49,
            s_size: 343,
            ..Default::default()
        };
        assert_eq!(predicted_lower_bound("prop-1.1", &pp).unwrap(), 49.0);
        let h = PackingParams {
            p,
            e_size: 343,
            s_size: 343,
            eps: Some(0.0),
            ..Default::default()
        };
        assert!((predicted_lower_bound("thm-1.5", &h).unwrap() - 343.0).abs() < 1e-9);
        assert_eq!(
            predicted_lower_bound("thm-1.2", &pp),
            Err(Error::MissingParam("k"))
        );
        assert!(matches!(
            predicted_lower_bound("nope", &pp),
            Err(Error::UnknownTheorem(_))
        ));
    }

    #[test]
    fn translate_examples() {
        let ctx = FieldCtx::new(5).unwrap();
        let e = PointSet2::new(5, [FpVec2::new(1, 1), FpVec2::new(2, 4)]).unwrap();
        assert_eq!(translate(&ctx, &e, FpVec2::ZERO), e);
        let one = PointSet2::new(5, [FpVec2::new(1, 1)]).unwrap();
        assert_eq!(
            translate(&ctx, &one, FpVec2::new(1, 1)).points(),
            &[FpVec2::ZERO]
        );
        assert_eq!(translate(&ctx, &e, FpVec2::new(3, 2)).len(), 2);
    }

    #[test]
    fn rich_points() {
        for p in [3u64, 7] {
            let ctx = FieldCtx::new(p).unwrap();
            let (_, c) = find_rich_point(&ctx, &PointSet2::full(p).unwrap()).unwrap();
            assert_eq!(c, p as usize + 1);
        }
        let ctx = FieldCtx::new(7).unwrap();
        assert_eq!(
            find_rich_point(&ctx, &PointSet2::empty(7).unwrap()),
            Err(Error::EmptySet)
        );
        let single = PointSet2::new(7, [FpVec2::new(2, 2)]).unwrap();
        assert_eq!(
            find_rich_point(&ctx, &single).unwrap(),
            (FpVec2::new(2, 2), 0)
        );
    }
}
