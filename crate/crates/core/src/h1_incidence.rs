//! Incidences between point pairs in F_p^3 and sets of Heisenberg elements,
//! the quadruple counts N and N′, and the weighted orthogonality count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec3};
use crate::groups::{Convention, H1Elem, MatrixSet};
use crate::packing::image_set_h1;
use crate::points::PointSet3;
use crate::report::{BoundKind, BoundReport, Precondition};
use crate::sl2_incidence::WeightedSet;

/// Theorem ids understood by [`evaluate_bound_h1`].
pub const H1_THEOREMS: &[&str] = &["thm-5.1", "prop-5.2", "prop-5.3", "thm-1.5"];

fn check_moduli(ctx: &FieldCtx, ps: &[u64]) -> Result<()> {
    match ps.iter().find(|&&q| q != ctx.p()) {
        Some(&q) => Err(Error::MixedModulus(ctx.p(), q)),
        None => Ok(()),
    }
}

/// `#{(x, y, θ) ∈ A × B × X : θy = x}`.
pub fn count_incidences_h1(
    ctx: &FieldCtx,
    a: &PointSet3,
    b: &PointSet3,
    x: &MatrixSet<H1Elem>,
) -> Result<u64> {
    check_moduli(ctx, &[a.p(), b.p(), x.p()])?;
    let pts = b.points();
    Ok(x.elems()
        .par_iter()
        .map(|g| {
            let m = g.to_matrix(ctx);
            pts.iter().filter(|&&y| a.contains(m.act(ctx, y))).count() as u64
        })
        .sum())
}

pub fn count_incidences_h1_naive(
    ctx: &FieldCtx,
    a: &PointSet3,
    b: &PointSet3,
    x: &MatrixSet<H1Elem>,
) -> u64 {
    let mut n = 0;
    for p in a.iter() {
        for q in b.iter() {
            for g in x.iter() {
                if g.act(ctx, q) == p {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Solutions of `θ·src1 = dst1`, `θ·src2 = dst2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Transport {
    /// One of 0, 1 or p.
    pub count: u64,
    /// Every solution, in matrix coordinates.
    pub solutions: Vec<H1Elem>,
}

/// Counts `θ = [a, b, c]` moving `src1 ↦ dst1` and `src2 ↦ dst2` simultaneously.
///
/// Requires nonzero third coordinates that the targets share with the sources,
/// and the compatibility `y·w′ + z·v′ = y′·w + z′·v`.
pub fn transporter_count_h1(
    ctx: &FieldCtx,
    src1: FpVec3,
    dst1: FpVec3,
    src2: FpVec3,
    dst2: FpVec3,
) -> Result<H1Transport> {
    let (x, y, z) = (src1.x, src1.y, src1.z);
    let (x2, y2, z2) = (dst1.x, dst1.y, dst1.z);
    let (u, v, w) = (src2.x, src2.y, src2.z);
    let (u2, v2, w2) = (dst2.x, dst2.y, dst2.z);
    if z == 0 || w == 0 {
        return Err(Error::HypothesisViolated(
            "third coordinates must be nonzero".into(),
        ));
    }
    if z2 != z || w2 != w {
        return Err(Error::HypothesisViolated(
            "the action preserves third coordinates".into(),
        ));
    }
    let f = ctx;
    if f.add(f.mul(y, w2), f.mul(z, v2)) != f.add(f.mul(y2, w), f.mul(z2, v)) {
        return Err(Error::HypothesisViolated(
            "y·w′ + z·v′ ≠ y′·w + z′·v".into(),
        ));
    }
    let b = f.div(f.sub(y2, y), z)?;
    let det = f.sub(f.mul(v, z), f.mul(w, y));
    let rhs = f.add(f.mul(z, f.sub(u2, u)), f.mul(w, f.sub(x, x2)));
    let solve = |a: u64| -> Result<H1Elem> {
        let c = f.div(f.sub(f.sub(x2, x), f.mul(a, y)), z)?;
        Ok(H1Elem::new(f, a, b, c, Convention::Matrix))
    };
    let solutions = if det != 0 {
        vec![solve(f.div(rhs, det)?)?]
    } else if rhs == 0 {
        (0..f.p()).map(solve).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(H1Transport {
        count: solutions.len() as u64,
        solutions,
    })
}

/// `y·w′ + z·v′` for `(y, z)` and `(v′, w′)`.
#[inline]
fn bil(ctx: &FieldCtx, a: (u64, u64), b: (u64, u64)) -> u64 {
    ctx.add(ctx.mul(a.0, b.1), ctx.mul(a.1, b.0))
}

/// Quadruples `(x,y,z) ∈ A, (x′,y′,z′) ∈ B, (u,v,w) ∈ A, (u′,v′,w′) ∈ B` with
/// `yw′ + zv′ = y′w + vz′`, `z = z′`, `w = w′`.
pub fn count_n(ctx: &FieldCtx, a: &PointSet3, b: &PointSet3) -> u64 {
    let p = ctx.p() as usize;
    let al = a.layers();
    let bl = b.layers();
    let blocks: Vec<(usize, usize)> = (0..p)
        .filter(|&l| !al[l].is_empty() && !bl[l].is_empty())
        .flat_map(|l| (0..p).map(move |m| (l, m)))
        .filter(|&(_, m)| !al[m].is_empty() && !bl[m].is_empty())
        .collect();
    blocks
        .par_iter()
        .map(|&(l, m)| {
            let mut h1 = vec![0u64; p];
            for a1 in &al[l] {
                for b2 in &bl[m] {
                    h1[bil(ctx, (a1.y, a1.z), (b2.y, b2.z)) as usize] += 1;
                }
            }
            let mut total = 0;
            for b1 in &bl[l] {
                for a2 in &al[m] {
                    total += h1[bil(ctx, (b1.y, b1.z), (a2.y, a2.z)) as usize];
                }
            }
            total
        })
        .sum()
}

pub fn count_n_naive(ctx: &FieldCtx, a: &PointSet3, b: &PointSet3) -> u64 {
    let mut n = 0;
    for p1 in a.iter() {
        for q1 in b.iter() {
            if q1.z != p1.z {
                continue;
            }
            for p2 in a.iter() {
                for q2 in b.iter() {
                    if q2.z == p2.z
                        && bil(ctx, (p1.y, p1.z), (q2.y, q2.z))
                            == bil(ctx, (q1.y, q1.z), (p2.y, p2.z))
                    {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// Quadruples `(x,y,z) ∈ B, (x′,y′,z′) ∈ A, (u,v,w) ∈ B, (u′,v′,w′) ∈ A` with
/// `yw′ + zv′ = y′w + vz′`, `vz − wy = 0`, `zu′ + xw′ − z′u − x′w = 0`,
/// `w = w′`, `z = z′`.
pub fn count_nprime(ctx: &FieldCtx, a: &PointSet3, b: &PointSet3) -> u64 {
    let p = ctx.p() as usize;
    let f = ctx;
    let al = a.layers();
    let bl = b.layers();
    let blocks: Vec<(usize, usize)> = (0..p)
        .filter(|&l| !al[l].is_empty() && !bl[l].is_empty())
        .flat_map(|l| (0..p).map(move |m| (l, m)))
        .filter(|&(_, m)| !al[m].is_empty() && !bl[m].is_empty())
        .collect();
    blocks
        .par_iter()
        .map(|&(l, m)| {
            let (lam, beta) = (l as u64, m as u64);
            // With z = λ and w = β the two linear equations become
            //   β·y′ − λ·v′ = β·y − λ·v  and  λ·u′ − β·x′ = λ·u − β·x,
            // so A-pairs and B-pairs meet on a common key in F_p².
            let key = |first: &FpVec3, second: &FpVec3| -> usize {
                let k1 = f.sub(f.mul(beta, first.y), f.mul(lam, second.y));
                let k2 = f.sub(f.mul(lam, second.x), f.mul(beta, first.x));
                (k1 as usize) * p + k2 as usize
            };
            let mut hist = vec![0u64; p * p];
            for a1 in &al[l] {
                for a2 in &al[m] {
                    hist[key(a1, a2)] += 1;
                }
            }
            let mut total = 0;
            for b1 in &bl[l] {
                for b2 in &bl[m] {
                    // v·z − w·y = 0
                    if f.mul(b2.y, lam) == f.mul(beta, b1.y) {
                        total += hist[key(b1, b2)];
                    }
                }
            }
            total
        })
        .sum()
}

pub fn count_nprime_naive(ctx: &FieldCtx, a: &PointSet3, b: &PointSet3) -> u64 {
    let f = ctx;
    let mut n = 0;
    for p1 in b.iter() {
        let (x, y, z) = (p1.x, p1.y, p1.z);
        for q1 in a.iter() {
            let (x2, y2, z2) = (q1.x, q1.y, q1.z);
            if z != z2 {
                continue;
            }
            for p2 in b.iter() {
                let (u, v, w) = (p2.x, p2.y, p2.z);
                if f.mul(v, z) != f.mul(w, y) {
                    continue;
                }
                for q2 in a.iter() {
                    let (u2, v2, w2) = (q2.x, q2.y, q2.z);
                    if w != w2 {
                        continue;
                    }
                    let e1 = f.add(f.mul(y, w2), f.mul(z, v2)) == f.add(f.mul(y2, w), f.mul(v, z2));
                    let e3 = f.sub(
                        f.add(f.mul(z, u2), f.mul(x, w2)),
                        f.add(f.mul(z2, u), f.mul(x2, w)),
                    ) == 0;
                    if e1 && e3 {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// `M = Σ_{u·v = 0} F(u)G(v)` over weighted vectors of F_p^4, compared with
/// `(ΣF)(ΣG)/p` and the error `p²·(ΣF²)^{1/2}(ΣG²)^{1/2}`.
pub fn weighted_orthogonal_count(
    ctx: &FieldCtx,
    u: &WeightedSet<[u64; 4]>,
    v: &WeightedSet<[u64; 4]>,
) -> BoundReport {
    let p = ctx.p();
    let pf = p as f64;
    let vs: Vec<([u64; 4], u64)> = v.iter().collect();
    let exact: u64 = u
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(x, fx)| {
            vs.iter()
                .filter(|(y, _)| ctx.dot(x, y) == 0)
                .map(|(_, gy)| fx * gy)
                .sum::<u64>()
        })
        .sum();
    let mut r = BoundReport::new("weighted-orthogonality", BoundKind::TwoSided, p)
        .size("U", u.support_len())
        .size("V", v.support_len())
        .term(
            "p²·(ΣF²)^(1/2)(ΣG²)^(1/2)",
            pf * pf * (u.sum_sq() as f64).sqrt() * (v.sum_sq() as f64).sqrt(),
        );
    r.exact = exact;
    r.main_term = u.total() as f64 * v.total() as f64 / pf;
    r.finish()
}

pub fn weighted_orthogonal_count_naive(
    ctx: &FieldCtx,
    u: &WeightedSet<[u64; 4]>,
    v: &WeightedSet<[u64; 4]>,
) -> u64 {
    let mut n = 0;
    for (x, fx) in u.iter() {
        for (y, gy) in v.iter() {
            if ctx.dot(&x, &y) == 0 {
                n += fx * gy;
            }
        }
    }
    n
}

/// Inputs for [`evaluate_bound_h1`].
#[derive(Clone, Debug, Default)]
pub struct H1BoundInputs {
    pub a: Option<PointSet3>,
    pub b: Option<PointSet3>,
    pub x: Option<MatrixSet<H1Elem>>,
    /// The point set for the packing bound.
    pub e: Option<PointSet3>,
    /// Overrides the fiber-derived ε.
    pub eps: Option<f64>,
}

fn reject_zero_layer(name: &str, set: &PointSet3) -> Result<()> {
    if set.has_zero_third_coordinate() {
        return Err(Error::PreconditionViolated(format!(
            "{name} has points with third coordinate 0"
        )));
    }
    Ok(())
}

fn need<'a>(s: &'a Option<PointSet3>, name: &'static str) -> Result<&'a PointSet3> {
    s.as_ref().ok_or(Error::MissingParam(name))
}

fn fiber_eps(set: &PointSet3) -> f64 {
    set.fiber_stats().map(|s| s.empirical_eps).unwrap_or(1.0)
}

/// Evaluates one Heisenberg-side bound.
pub fn evaluate_bound_h1(
    ctx: &FieldCtx,
    theorem_id: &str,
    inputs: &H1BoundInputs,
) -> Result<BoundReport> {
    let p = ctx.p();
    let pf = p as f64;
    let report = match theorem_id {
        "thm-5.1" => {
            let (a, b) = (need(&inputs.a, "A")?, need(&inputs.b, "B")?);
            let x = inputs.x.as_ref().ok_or(Error::MissingParam("X"))?;
            reject_zero_layer("A", a)?;
            reject_zero_layer("B", b)?;
            let eps = inputs.eps.unwrap_or_else(|| fiber_eps(b));
            let pn = (a.len() * b.len()) as f64;
            let xn = x.len() as f64;
            let mut r = BoundReport::new(theorem_id, BoundKind::TwoSided, p)
                .size("A", a.len())
                .size("B", b.len())
                .size("X", x.len())
                .term(
                    "p^((3−ε)/2)·sqrt(|P||X|)",
                    pf.powf((3.0 - eps) / 2.0) * (pn * xn).sqrt(),
                )
                .precondition(Precondition::checked("third coordinates nonzero", true));
            r.params.eps = Some(eps);
            r.exact = count_incidences_h1(ctx, a, b, x)?;
            r.main_term = pn * xn / pf.powi(3);
            r
        }
        "prop-5.2" => {
            let (a, b) = (need(&inputs.a, "A")?, need(&inputs.b, "B")?);
            let (ea, eb) = (fiber_eps(a), fiber_eps(b));
            let eps = inputs.eps.unwrap_or(ea.min(eb));
            let (an, bn) = (a.len() as f64, b.len() as f64);
            let mut r = BoundReport::new(theorem_id, BoundKind::Upper, p)
                .size("A", a.len())
                .size("B", b.len())
                .term("|A|²|B|²/p", an * an * bn * bn / pf)
                .term("p^(3−2ε)|A||B|", pf.powf(3.0 - 2.0 * eps) * an * bn)
                .note(format!("fiber ε of A = {ea:.6}, of B = {eb:.6}"));
            r.params.eps = Some(eps);
            r.exact = count_n(ctx, a, b);
            r
        }
        "prop-5.3" => {
            let (a, b) = (need(&inputs.a, "A")?, need(&inputs.b, "B")?);
            let nonzero = !a.has_zero_third_coordinate() && !b.has_zero_third_coordinate();
            let mut r = BoundReport::new(theorem_id, BoundKind::Upper, p)
                .size("A", a.len())
                .size("B", b.len())
                .term("p|A||B|", pf * (a.len() * b.len()) as f64)
                .precondition(
                    Precondition::checked("third coordinates nonzero", nonzero)
                        .with_note("with a zero third coordinate the count can reach |A|²|B|²"),
                );
            r.exact = count_nprime(ctx, a, b);
            r
        }
        "thm-1.5" => {
            let e = inputs
                .e
                .as_ref()
                .or(inputs.b.as_ref())
                .ok_or(Error::MissingParam("E"))?;
            let x = inputs.x.as_ref().ok_or(Error::MissingParam("X"))?;
            reject_zero_layer("E", e)?;
            let eps = inputs.eps.unwrap_or_else(|| fiber_eps(e));
            let value = (pf.powi(3)).min((x.len() * e.len()) as f64 / pf.powf(3.0 - eps / 2.0));
            let mut r = BoundReport::new(theorem_id, BoundKind::Lower, p)
                .size("E", e.len())
                .size("X", x.len())
                .term("min{p³, |X||E|/p^(3−ε/2)}", value);
            r.params.eps = Some(eps);
            r.exact = image_set_h1(ctx, x, e)?.len() as u64;
            r
        }
        other => return Err(Error::UnknownTheorem(other.to_string())),
    };
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::enumerate_h1;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::new(p).unwrap()
    }

    fn v(x: u64, y: u64, z: u64) -> FpVec3 {
        FpVec3::new(x, y, z)
    }

    #[test]
    fn trichotomy_examples() {
        let ctx = f(5);
        let r = transporter_count_h1(&ctx, v(0, 0, 1), v(0, 0, 1), v(0, 1, 1), v(0, 1, 1)).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.solutions, vec![H1Elem::identity(Convention::Matrix)]);
        let r = transporter_count_h1(&ctx, v(0, 0, 1), v(0, 0, 1), v(0, 0, 1), v(0, 0, 1)).unwrap();
        assert_eq!(r.count, 5);
        let r = transporter_count_h1(&ctx, v(0, 0, 1), v(0, 0, 1), v(0, 0, 1), v(1, 0, 1)).unwrap();
        assert_eq!(r.count, 0);
        assert!(matches!(
            transporter_count_h1(&ctx, v(0, 0, 0), v(0, 0, 0), v(0, 0, 1), v(0, 0, 1)),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            transporter_count_h1(&ctx, v(0, 0, 1), v(0, 1, 1), v(0, 0, 1), v(0, 0, 1)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn trichotomy_matches_enumeration_p3() {
        let ctx = f(3);
        let all = enumerate_h1(&ctx, Convention::Matrix);
        let pts: Vec<FpVec3> = (0..27).map(|i| FpVec3::from_index(i, 3)).collect();
        let mut checked = 0;
        for &s1 in &pts {
            for &d1 in &pts {
                for &s2 in &pts {
                    for &d2 in &pts {
                        let Ok(r) = transporter_count_h1(&ctx, s1, d1, s2, d2) else {
                            continue;
                        };
                        let brute: Vec<H1Elem> = all
                            .iter()
                            .filter(|g| g.act(&ctx, s1) == d1 && g.act(&ctx, s2) == d2)
                            .copied()
                            .collect();
                        assert_eq!(r.solutions, brute);
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn count_examples() {
        let ctx = f(5);
        let single = PointSet3::new(5, [v(0, 0, 1)]).unwrap();
        assert_eq!(count_n(&ctx, &single, &single), 1);
        assert_eq!(count_nprime(&ctx, &single, &single), 1);
        let a = PointSet3::new(5, [v(1, 2, 1), v(3, 3, 1)]).unwrap();
        let b = PointSet3::new(5, [v(1, 2, 2), v(0, 4, 3)]).unwrap();
        assert_eq!(count_n(&ctx, &a, &b), 0);
        assert_eq!(count_nprime(&ctx, &a, &b), 0);

        let id = MatrixSet::new(&ctx, [H1Elem::identity(Convention::Matrix)]);
        let c = PointSet3::new(5, [v(1, 2, 1), v(1, 2, 2)]).unwrap();
        assert_eq!(count_incidences_h1(&ctx, &a, &c, &id).unwrap(), 1);
        assert_eq!(
            count_incidences_h1(&ctx, &a, &b, &enumerate_h1(&ctx, Convention::Matrix)).unwrap(),
            0
        );
    }

    #[test]
    fn nprime_cap_needs_nonzero_third_coordinate() {
        let ctx = f(5);
        // all points in the z = 0 layer satisfy every equation
        let a = PointSet3::new(5, (0..5).map(|x| v(x, 1, 0))).unwrap();
        let n = count_nprime(&ctx, &a, &a);
        assert_eq!(n, 625);
        assert_eq!(n, count_nprime_naive(&ctx, &a, &a));
        assert!(n > 5 * 5 * 5);
    }

    #[test]
    fn weighted_orthogonality_examples() {
        let ctx = f(5);
        let e1 = WeightedSet::new([([1, 0, 0, 0], 1)]).unwrap();
        let r = weighted_orthogonal_count(&ctx, &e1, &e1);
        assert_eq!(r.exact, 0);
        assert!((r.main_term - 0.2).abs() < 1e-12);
        let u = WeightedSet::new([([1, 0, 0, 0], 2)]).unwrap();
        let w = WeightedSet::new([([0, 1, 0, 0], 3)]).unwrap();
        assert_eq!(weighted_orthogonal_count(&ctx, &u, &w).exact, 6);
    }

    #[test]
    fn h1_bounds() {
        let ctx = f(5);
        let x = enumerate_h1(&ctx, Convention::Matrix);
        let e = PointSet3::new(
            5,
            (0..5).flat_map(|a| (0..5).flat_map(move |b| [v(a, b, 1), v(a, b, 3)])),
        )
        .unwrap();
        let inputs = H1BoundInputs {
            x: Some(x),
            e: Some(e.clone()),
            eps: Some(0.0),
            ..Default::default()
        };
        let r = evaluate_bound_h1(&ctx, "thm-1.5", &inputs).unwrap();
        assert_eq!(r.exact, 50);
        assert!((r.predicted - 125.0f64.min(125.0 * 50.0 / 125.0)).abs() < 1e-9);

        let id = MatrixSet::new(&ctx, [H1Elem::identity(Convention::Matrix)]);
        let b = PointSet3::new(5, [v(1, 1, 1), v(2, 2, 2)]).unwrap();
        let r = evaluate_bound_h1(
            &ctx,
            "thm-5.1",
            &H1BoundInputs {
                a: Some(e.clone()),
                b: Some(b.clone()),
                x: Some(id),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.exact, 1);
        assert!((r.main_term - 100.0 / 125.0).abs() < 1e-12);

        let zero = PointSet3::new(5, [v(0, 0, 0)]).unwrap();
        assert!(matches!(
            evaluate_bound_h1(
                &ctx,
                "thm-5.1",
                &H1BoundInputs {
                    a: Some(zero),
                    b: Some(b),
                    x: Some(enumerate_h1(&ctx, Convention::Matrix)),
                    ..Default::default()
                }
            ),
            Err(Error::PreconditionViolated(_))
        ));
        for id in ["prop-5.2", "prop-5.3"] {
            let r = evaluate_bound_h1(
                &ctx,
                id,
                &H1BoundInputs {
                    a: Some(e.clone()),
                    b: Some(e.clone()),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(r.empirical_constant.unwrap() <= 1.0, "{id}");
        }
    }
}
