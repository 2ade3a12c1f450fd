use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2};
use crate::groups::{max_coset_intersection, MatrixSet, Sl2Elem};
use crate::points::PointSet2;
use crate::report::{BoundKind, BoundReport, Precondition};

use super::count::count_incidences;
use super::energy::{empirical_epsilon, energy1, energy2, quad_skew_exact};
use super::lines::{weighted_pl_incidences, Line, WeightedSet};

/// Theorem ids understood by [`evaluate_bound`].
pub const SL2_THEOREMS: &[&str] = &[
    "thm-2.1",
    "thm-2.1k",
    "thm-2.2",
    "thm-2.2k",
    "thm-2.3-1",
    "thm-2.3-2",
    "thm-3.7-1",
    "thm-3.7-2",
    "thm-3.8",
    "thm-3.9",
    "lem-2.3",
    "lem-2.3k",
    "lem-2.7",
    "lem-2.8",
    "lem-quad",
    "bnp",
    "cor-3.6",
    "sdz",
    "sdz-multi",
];

/// Above this many coset-histogram updates the coset condition is left unchecked.
const COSET_WORK_CAP: f64 = 2e9;

/// Inputs for a bound evaluation; each theorem reads what it needs.
#[derive(Clone, Debug, Default)]
pub struct BoundInputs {
    pub a: Option<PointSet2>,
    pub b: Option<PointSet2>,
    pub s: Option<MatrixSet<Sl2Elem>>,
    pub points: Option<WeightedSet<FpVec2>>,
    pub lines: Option<WeightedSet<Line>>,
    pub k: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
}

impl BoundInputs {
    fn a(&self) -> Result<&PointSet2> {
        self.a.as_ref().ok_or(Error::MissingParam("A"))
    }

    fn b(&self) -> Result<&PointSet2> {
        self.b.as_ref().ok_or(Error::MissingParam("B"))
    }

    fn s(&self) -> Result<&MatrixSet<Sl2Elem>> {
        self.s.as_ref().ok_or(Error::MissingParam("S"))
    }

    fn points(&self) -> Result<&WeightedSet<FpVec2>> {
        self.points.as_ref().ok_or(Error::MissingParam("points"))
    }

    fn lines(&self) -> Result<&WeightedSet<Line>> {
        self.lines.as_ref().ok_or(Error::MissingParam("lines"))
    }
}

/// Points of the set on the fullest origin line, origin included; at least 1.
fn line_load(ctx: &FieldCtx, set: &PointSet2) -> f64 {
    set.max_origin_line_count(ctx).max(1) as f64
}

fn direction_count(ctx: &FieldCtx, set: &PointSet2) -> f64 {
    set.direction_stats(ctx).k2.max(1) as f64
}

fn origin_pair(a: &PointSet2, b: &PointSet2) -> bool {
    a.contains_origin() && b.contains_origin()
}

/// Symmetry, size window and coset conditions on `S`.
pub(crate) fn expansion_preconditions(
    ctx: &FieldCtx,
    s: &MatrixSet<Sl2Elem>,
    gamma: Option<f64>,
) -> Vec<Precondition> {
    let p = ctx.p() as f64;
    let n = s.len() as f64;
    let mut out = vec![Precondition::checked("S symmetric", s.is_symmetric())];
    match gamma {
        None => {
            out.push(Precondition::unchecked(
                "p^γ < |S| < p^(3−2γ)",
                "γ not supplied",
            ));
            out.push(Precondition::unchecked(
                "|S ∩ gH| < p^(−γ/2)|S|",
                "γ not supplied",
            ));
        }
        Some(g) => {
            out.push(Precondition::checked(
                "p^γ < |S| < p^(3−2γ)",
                p.powf(g) < n && n < p.powf(3.0 - 2.0 * g),
            ));
            let work = n * (p + 1.0) * (p + 1.0);
            if work > COSET_WORK_CAP {
                out.push(Precondition::unchecked(
                    "|S ∩ gH| < p^(−γ/2)|S|",
                    "set too large for the coset scan",
                ));
            } else {
                let r = max_coset_intersection(ctx, s, g);
                out.push(
                    Precondition::checked("|S ∩ gH| < p^(−γ/2)|S|", r.bg_condition_holds).with_note(
                        format!(
                            "max coset ratio {:.6} vs threshold {:.6} over Borel and split torus normalizer cosets; nonsplit torus normalizers unchecked; exceptional slack {:.6}",
                            r.max_ratio,
                            r.threshold,
                            r.exceptional_slack.unwrap_or(0.0)
                        ),
                    ),
                );
            }
        }
    }
    out
}

fn with_origin_slack(r: BoundReport, a: &PointSet2, b: &PointSet2, s_len: usize) -> BoundReport {
    let present = origin_pair(a, b);
    let r = r.precondition(
        Precondition::checked("(0,0,0,0) ∉ A×B", !present)
            .with_note("when violated the |S| incidences of the origin pair are added as a term"),
    );
    if present {
        r.term("origin pair", s_len as f64)
    } else {
        r
    }
}

/// Evaluates one SL2-side bound against the exact count it constrains.
pub fn evaluate_bound(
    ctx: &FieldCtx,
    theorem_id: &str,
    inputs: &BoundInputs,
) -> Result<BoundReport> {
    let p = ctx.p();
    let pf = p as f64;
    let eps = inputs.eps.unwrap_or(0.0);
    let base = |kind| {
        let mut r = BoundReport::new(theorem_id, kind, p);
        r.params.eps = Some(eps);
        r.params.gamma = inputs.gamma;
        r
    };

    let report = match theorem_id {
        "thm-2.1" | "thm-2.1k" => {
            let (a, b, s) = (inputs.a()?, inputs.b()?, inputs.s()?);
            let pn = (a.len() * b.len()) as f64;
            let sn = s.len() as f64;
            let mut r = base(BoundKind::TwoSided)
                .size("A", a.len())
                .size("B", b.len())
                .size("S", s.len());
            r.exact = count_incidences(ctx, a, b, s)?;
            r.main_term = pn * sn / (pf * pf);
            if theorem_id == "thm-2.1" {
                r = r.term("p·sqrt(|S||P|)", pf * (sn * pn).sqrt());
            } else {
                let k = inputs
                    .k
                    .unwrap_or_else(|| line_load(ctx, a).min(line_load(ctx, b)));
                r.params.k = Some(k);
                r = r.term(
                    "p^(1/2)k^(1/2)·sqrt(|S||P|)",
                    (pf * k).sqrt() * (sn * pn).sqrt(),
                );
            }
            r.term("|S|", sn)
        }
        "thm-2.2" | "thm-2.2k" => {
            let (a, b, s) = (inputs.a()?, inputs.b()?, inputs.s()?);
            let (an, bn, sn) = (a.len() as f64, b.len() as f64, s.len() as f64);
            let mut r = base(BoundKind::Upper)
                .size("A", a.len())
                .size("B", b.len())
                .size("S", s.len());
            r.exact = count_incidences(ctx, a, b, s)?;
            r = r.term("|A|^(1/2)|B||S|/p", an.sqrt() * bn * sn / pf);
            if theorem_id == "thm-2.2" {
                r = r.term(
                    "p^((2−ε)/4)|A|^(1/2)|B|^(1/2)|S|^(3/4)",
                    pf.powf((2.0 - eps) / 4.0) * (an * bn).sqrt() * sn.powf(0.75),
                );
            } else {
                let k = inputs.k.unwrap_or_else(|| line_load(ctx, b));
                r.params.k = Some(k);
                r = r.term(
                    "k^(1/4)p^((1−ε)/4)|A|^(1/2)|B|^(1/2)|S|^(3/4)",
                    k.powf(0.25) * pf.powf((1.0 - eps) / 4.0) * (an * bn).sqrt() * sn.powf(0.75),
                );
            }
            for pre in expansion_preconditions(ctx, s, inputs.gamma) {
                r = r.precondition(pre);
            }
            with_origin_slack(r, a, b, s.len())
        }
        "thm-2.3-1" | "thm-2.3-2" => {
            let (a, b, s) = (inputs.a()?, inputs.b()?, inputs.s()?);
            let (an, bn, sn) = (a.len() as f64, b.len() as f64, s.len() as f64);
            let k1 = inputs.k1.unwrap_or_else(|| line_load(ctx, b));
            let decay = an.sqrt() * sn.powf(0.75) / pf.powf(eps / 4.0);
            let mut r = base(BoundKind::Upper)
                .size("A", a.len())
                .size("B", b.len())
                .size("S", s.len());
            r.log_factor = true;
            r.params.k1 = Some(k1);
            r.exact = count_incidences(ctx, a, b, s)?;
            r = r
                .term("k1^(1/2)|A|^(1/2)|S|", k1.sqrt() * an.sqrt() * sn)
                .term(
                    "k1^(1/2)|B|^(1/2)|A|^(1/2)|S|^(3/4)/p^(ε/4)",
                    k1.sqrt() * bn.sqrt() * decay,
                );
            if theorem_id == "thm-2.3-1" {
                let k2 = inputs.k2.unwrap_or_else(|| direction_count(ctx, b));
                r.params.k2 = Some(k2);
                r = r
                    .term(
                        "k1^(1/8)|B|^(3/4)|A|^(1/2)|S|^(3/4)/p^(ε/4)",
                        k1.powf(0.125) * bn.powf(0.75) * decay,
                    )
                    .term(
                        "k1^(1/4)k2^(1/4)|B|^(1/2)|A|^(1/2)|S|^(3/4)/p^(ε/4)",
                        (k1 * k2).powf(0.25) * bn.sqrt() * decay,
                    )
                    .precondition(Precondition::checked("|B| ≤ p", bn <= pf));
            } else {
                r = r
                    .term(
                        "k1^(1/15)|B|^(187/225)|A|^(1/2)|S|^(3/4)/p^(ε/4)",
                        k1.powf(1.0 / 15.0) * bn.powf(187.0 / 225.0) * decay,
                    )
                    .precondition(Precondition::checked(
                        "|B| ≤ p^(8/15)",
                        bn <= pf.powf(8.0 / 15.0),
                    ));
            }
            for pre in expansion_preconditions(ctx, s, inputs.gamma) {
                r = r.precondition(pre);
            }
            with_origin_slack(r, a, b, s.len())
        }
        "thm-3.7-1" | "thm-3.7-2" => {
            let (a, b, s) = (inputs.a()?, inputs.b()?, inputs.s()?);
            let (an, bn, sn) = (a.len() as f64, b.len() as f64, s.len() as f64);
            let k = inputs.k.unwrap_or_else(|| line_load(ctx, b));
            let mut r = base(BoundKind::Upper)
                .size("A", a.len())
                .size("B", b.len())
                .size("S", s.len());
            r.log_factor = true;
            r.params.k = Some(k);
            r.exact = count_incidences(ctx, a, b, s)?;
            let small = bn < k.sqrt() * pf;
            if theorem_id == "thm-3.7-1" {
                r = r
                    .term("k^(1/2)|A|^(1/2)|S|", k.sqrt() * an.sqrt() * sn)
                    .term(
                        "k^(1/4)p^((1−ε)/4)|A|^(1/2)|B|^(1/2)|S|^(3/4)",
                        k.powf(0.25)
                            * pf.powf((1.0 - eps) / 4.0)
                            * (an * bn).sqrt()
                            * sn.powf(0.75),
                    )
                    .precondition(Precondition::checked("|B| < k^(1/2)p", small));
            } else {
                r = r
                    .term(
                        "|A|^(1/2)|B||S|^(3/4)/p^((1+ε)/4)",
                        an.sqrt() * bn * sn.powf(0.75) / pf.powf((1.0 + eps) / 4.0),
                    )
                    .precondition(Precondition::checked("|B| ≥ k^(1/2)p", !small));
            }
            for pre in expansion_preconditions(ctx, s, inputs.gamma) {
                r = r.precondition(pre);
            }
            with_origin_slack(r, a, b, s.len())
        }
        "thm-3.8" => {
            let (a, b, s) = (inputs.a()?, inputs.b()?, inputs.s()?);
            let (an, bn, sn) = (a.len() as f64, b.len() as f64, s.len() as f64);
            let k = inputs.k.unwrap_or_else(|| line_load(ctx, b));
            let mut r = base(BoundKind::Upper)
                .size("A", a.len())
                .size("B", b.len())
                .size("S", s.len());
            r.log_factor = true;
            r.params.k = Some(k);
            r.exact = count_incidences(ctx, a, b, s)?;
            r = r
                .term("|A||B||S|^(1/2)/p^(1/2)", an * bn * sn.sqrt() / pf.sqrt())
                .term(
                    "k^(1/2)p^(1/2)(|A||B||S|)^(1/2)",
                    (k * pf).sqrt() * (an * bn * sn).sqrt(),
                )
                .term("k|S|", k * sn);
            with_origin_slack(r, a, b, s.len())
        }
        "thm-3.9" => {
            let (a, b, s) = (inputs.a()?, inputs.b()?, inputs.s()?);
            let (an, bn, sn) = (a.len() as f64, b.len() as f64, s.len() as f64);
            let k = inputs.k.unwrap_or_else(|| line_load(ctx, b));
            let mut r = base(BoundKind::Upper)
                .size("A", a.len())
                .size("B", b.len())
                .size("S", s.len());
            r.log_factor = true;
            r.params.k = Some(k);
            r.exact = count_incidences(ctx, a, b, s)?;
            r = r
                .term(
                    "k^(2/15)|A|^(11/15)|B|^(209/225)|S|^(1/2)",
                    k.powf(2.0 / 15.0) * an.powf(11.0 / 15.0) * bn.powf(209.0 / 225.0) * sn.sqrt(),
                )
                .term("k(|A||B||S|)^(1/2)", k * (an * bn * sn).sqrt())
                .term("k|S|", k * sn)
                .precondition(Precondition::checked(
                    "|B| ≤ |A| ≤ p^(8/15)",
                    bn <= an && an <= pf.powf(8.0 / 15.0),
                ));
            with_origin_slack(r, a, b, s.len())
        }
        "lem-2.3" | "lem-2.3k" => {
            let (a, b) = (inputs.a()?, inputs.b()?);
            let (an, bn) = (a.len() as f64, b.len() as f64);
            let mut r = base(BoundKind::Excess)
                .size("A", a.len())
                .size("B", b.len());
            r.exact = energy1(ctx, a, b);
            r.main_term = an * an * bn * bn / pf;
            if theorem_id == "lem-2.3" {
                r = r.term("p²|A||B|", pf * pf * an * bn);
            } else {
                let k = inputs
                    .k
                    .unwrap_or_else(|| line_load(ctx, a).min(line_load(ctx, b)));
                r.params.k = Some(k);
                r = r.term("pk|A||B|", pf * k * an * bn);
            }
            r.note("empirical_constant estimates C in front of the error term")
        }
        "lem-2.7" => {
            let b = inputs.b()?;
            let bn = b.len() as f64;
            let k1 = inputs.k1.unwrap_or_else(|| line_load(ctx, b));
            let k2 = inputs.k2.unwrap_or_else(|| direction_count(ctx, b));
            let mut r = base(BoundKind::Upper).size("B", b.len());
            r.params.k1 = Some(k1);
            r.params.k2 = Some(k2);
            r.exact = quad_skew_exact(ctx, b);
            r.term("k1^(1/2)|B|³", k1.sqrt() * bn.powi(3))
                .term("k1k2|B|²", k1 * k2 * bn * bn)
                .term("k1²|B|²", k1 * k1 * bn * bn)
                .precondition(Precondition::checked("|B| ≤ p", bn <= pf))
        }
        "lem-2.8" => {
            let b = inputs.b()?;
            let bn = b.len() as f64;
            let k = inputs.k.unwrap_or_else(|| line_load(ctx, b));
            let mut r = base(BoundKind::Upper).size("B", b.len());
            r.params.k = Some(k);
            r.exact = quad_skew_exact(ctx, b);
            r.term(
                "k^(4/15)|B|^(748/225)",
                k.powf(4.0 / 15.0) * bn.powf(748.0 / 225.0),
            )
            .term("k²|B|²", k * k * bn * bn)
            .precondition(Precondition::checked(
                "|B| ≤ p^(8/15)",
                bn <= pf.powf(8.0 / 15.0),
            ))
        }
        "lem-quad" => {
            let (a, b) = (inputs.a()?, inputs.b()?);
            let (an, bn) = (a.len() as f64, b.len() as f64);
            let k = inputs
                .k
                .unwrap_or_else(|| line_load(ctx, a).max(line_load(ctx, b)));
            let mut r = base(BoundKind::Upper).size("A", a.len()).size("B", b.len());
            r.params.k = Some(k);
            r.exact = energy1(ctx, a, b);
            r.term(
                "k^(4/15)|A|^(22/15)|B|^(418/225)",
                k.powf(4.0 / 15.0) * an.powf(22.0 / 15.0) * bn.powf(418.0 / 225.0),
            )
            .term("k²|A||B|", k * k * an * bn)
            .precondition(Precondition::checked(
                "|B| ≤ |A| ≤ p^(8/15)",
                bn <= an && an <= pf.powf(8.0 / 15.0),
            ))
        }
        "bnp" => {
            let s = inputs.s()?;
            let sn = s.len() as f64;
            let mut r = base(BoundKind::Upper).size("S", s.len());
            r.exact = energy2(ctx, s);
            r.term("p²|S|²", pf * pf * sn * sn)
                .term("|S|⁴/p³", sn.powi(4) / pf.powi(3))
        }
        "cor-3.6" => {
            let s = inputs.s()?;
            let sn = s.len() as f64;
            let (eps, note) = match inputs.eps {
                Some(e) => (e, "ε supplied by caller"),
                None => (
                    empirical_epsilon(ctx, s),
                    "ε taken as the empirical value log_p(|S|³/E)",
                ),
            };
            let mut r = base(BoundKind::Upper).size("S", s.len());
            r.params.eps = Some(eps);
            r.exact = energy2(ctx, s);
            r = r.term("|S|³/p^ε", sn.powi(3) / pf.powf(eps)).note(note);
            for pre in expansion_preconditions(ctx, s, inputs.gamma) {
                r = r.precondition(pre);
            }
            r
        }
        "sdz" => {
            let (pts, lines) = (inputs.points()?, inputs.lines()?);
            let pn = pts.support_len() as f64;
            let ln = lines.support_len() as f64;
            let unit_pts = WeightedSet::uniform(pts.iter().map(|(q, _)| q));
            let unit_lines = WeightedSet::uniform(lines.iter().map(|(l, _)| l));
            let mut r = base(BoundKind::Upper)
                .size("P", pts.support_len())
                .size("L", lines.support_len());
            r.exact = weighted_pl_incidences(ctx, &unit_pts, &unit_lines);
            r.term("|P|^(11/15)|L|^(11/15)", (pn * ln).powf(11.0 / 15.0))
                .term("|P|", pn)
                .term("|L|", ln)
                .precondition(Precondition::checked("|P| ≤ p^(8/5)", pn <= pf.powf(1.6)))
                .note("multiplicities ignored; distinct points and lines are counted")
        }
        "sdz-multi" => {
            let (pts, lines) = (inputs.points()?, inputs.lines()?);
            let pn = pts.total() as f64;
            let ln = lines.total() as f64;
            let q1 = pts.sum_sq() as f64;
            let q2 = lines.sum_sq() as f64;
            let mut r = base(BoundKind::Upper)
                .size("P", pts.total() as usize)
                .size("L", lines.total() as usize)
                .size("Q1", q1 as usize)
                .size("Q2", q2 as usize);
            r.log_factor = true;
            r.exact = weighted_pl_incidences(ctx, pts, lines);
            r.term(
                "|P|^(7/15)|L|^(7/15)Q1^(4/15)Q2^(4/15)",
                (pn * ln).powf(7.0 / 15.0) * (q1 * q2).powf(4.0 / 15.0),
            )
            .term("|P|", pn)
            .term("|L|", ln)
            .precondition(Precondition::checked("Σm(q) ≤ p^(8/5)", pn <= pf.powf(1.6)))
        }
        other => return Err(Error::UnknownTheorem(other.to_string())),
    };
    Ok(report.finish())
}
