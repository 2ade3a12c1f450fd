//! Invariant suites run by `packlab verify`.
//!
//! Each check compares a fast routine with a brute-force oracle or an exact
//! identity on small seeded instances.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{self, CONSTRUCTION_IDS};
use crate::error::Result;
use crate::field::{FieldCtx, FpVec2, FpVec3};
use crate::fourier::{dft, idft, incidence_via_fourier, FpFunction, FOURIER_INCIDENCE_CAP};
use crate::groups::{
    enumerate_h1, enumerate_sl2, sl2_order, transporter_fiber, Convention, GroupElem, H1Elem,
    MatrixSet, DEFAULT_ENUMERATION_CAP,
};
use crate::h1_incidence::{
    count_n, count_n_naive, count_nprime, count_nprime_naive, transporter_count_h1,
};
use crate::packing::find_rich_point;
use crate::points::PointSet2;
use crate::sample::{self, SeededRng};
use crate::sl2_incidence::{
    count_incidences, count_incidences_naive, energy1, energy1_naive, energy2, energy2_naive,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub p: u64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub elapsed_ms: f64,
}

type Outcome = std::result::Result<(), String>;
type CheckFn = fn(&FieldCtx, &mut SeededRng) -> Result<Outcome>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field_axioms(ctx: &FieldCtx, _: &mut SeededRng) -> Result<Outcome> {
    for a in 1..ctx.p() {
        let inv = ctx.inv(a)?;
        if ctx.mul(a, inv) != 1 {
            return Ok(Err(format!("{a}·{inv} ≠ 1")));
        }
    }
    Ok(Ok(()))
}

fn group_order(ctx: &FieldCtx, _: &mut SeededRng) -> Result<Outcome> {
    let s = enumerate_sl2(ctx, DEFAULT_ENUMERATION_CAP)?;
    let want = sl2_order(ctx.p());
    Ok(ensure(s.len() as u64 == want, || {
        format!("enumerated {} elements, expected {want}", s.len())
    }))
}

fn group_axioms(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    for _ in 0..200 {
        let g = sample::random_sl2_elem(ctx, rng);
        let h = sample::random_sl2_elem(ctx, rng);
        let k = sample::random_sl2_elem(ctx, rng);
        if g.mul(ctx, &h).mul(ctx, &k) != g.mul(ctx, &h.mul(ctx, &k)) {
            return Ok(Err(format!("associativity fails at {g:?}, {h:?}, {k:?}")));
        }
        if g.mul(ctx, &g.inv(ctx)).entries() != [1, 0, 0, 1] {
            return Ok(Err(format!("bad inverse for {g:?}")));
        }
        if g.mul(ctx, &h).det(ctx) != 1 {
            return Ok(Err("product left SL2".into()));
        }
    }
    Ok(Ok(()))
}

fn random_nonzero(ctx: &FieldCtx, rng: &mut SeededRng) -> FpVec2 {
    let p = ctx.p();
    FpVec2::from_index(rng.gen_range(1..(p * p) as usize), p)
}

fn fiber_sizes(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    for _ in 0..100 {
        let (m, t) = (random_nonzero(ctx, rng), random_nonzero(ctx, rng));
        let f = transporter_fiber(ctx, m, t)?;
        if f.len() as u64 != ctx.p() || f.iter().any(|g| g.act(ctx, m) != t) {
            return Ok(Err(format!("fiber {m:?} → {t:?} has {} elements", f.len())));
        }
    }
    Ok(Ok(()))
}

fn skew_invariance(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    let p = ctx.p();
    for _ in 0..2000 {
        let g = sample::random_sl2_elem(ctx, rng);
        let x = FpVec2::from_index(rng.gen_range(0..(p * p) as usize), p);
        let y = FpVec2::from_index(rng.gen_range(0..(p * p) as usize), p);
        if ctx.skew(g.act(ctx, x), g.act(ctx, y)) != ctx.skew(x, y) {
            return Ok(Err(format!("skew not preserved by {g:?}")));
        }
    }
    Ok(Ok(()))
}

fn incidence_oracle(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    let p = ctx.p() as usize;
    for _ in 0..5 {
        let a = sample::random_points2(ctx, rng.gen_range(1..p * p), rng)?;
        let b = sample::random_points2(ctx, rng.gen_range(1..p * p), rng)?;
        let s = sample::random_sl2(ctx, rng.gen_range(1..=3 * p), rng)?;
        let fast = count_incidences(ctx, &a, &b, &s)?;
        let slow = count_incidences_naive(ctx, &a, &b, &s);
        if fast != slow {
            return Ok(Err(format!("count {fast} vs naive {slow}")));
        }
        if ctx.p() <= 7 {
            let four = incidence_via_fourier(ctx, &a, &b, &s)?;
            if (four - fast as f64).abs() > 1e-6 * (fast as f64).max(1.0) {
                return Ok(Err(format!("fourier {four} vs count {fast}")));
            }
        }
    }
    Ok(Ok(()))
}

fn dft_identities(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    if ctx.p() > FOURIER_INCIDENCE_CAP {
        return Ok(Ok(()));
    }
    let p = ctx.p() as usize;
    let a = sample::random_points2(ctx, rng.gen_range(1..p * p), rng)?;
    let f = FpFunction::indicator2(&a);
    let fh = dft(&f);
    let back = idft(&fh);
    let pf = (p * p) as f64;
    // with the normalised transform, ‖f̂‖² = ‖f‖² / p²
    let plancherel = (fh.l2_norm_sq() * pf - f.l2_norm_sq()).abs();
    Ok(ensure(
        back.max_abs_diff(&f) < 1e-10 && plancherel < 1e-10 * pf,
        || {
            format!(
                "inversion error {}, Plancherel error {plancherel}",
                back.max_abs_diff(&f)
            )
        },
    ))
}

fn energy_oracles(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    let p = ctx.p() as usize;
    for _ in 0..5 {
        let a = sample::random_points2(ctx, rng.gen_range(1..=20.min(p * p - 1)), rng)?;
        let b = sample::random_points2(ctx, rng.gen_range(1..=20.min(p * p - 1)), rng)?;
        let (fast, slow) = (energy1(ctx, &a, &b), energy1_naive(ctx, &a, &b));
        if fast != slow {
            return Ok(Err(format!("energy1 {fast} vs naive {slow}")));
        }
        let s = sample::random_sl2(ctx, rng.gen_range(1..=20), rng)?;
        let (fast, slow) = (energy2(ctx, &s), energy2_naive(ctx, &s));
        if fast != slow {
            return Ok(Err(format!("energy2 {fast} vs naive {slow}")));
        }
    }
    Ok(Ok(()))
}

fn random_nonzero_z(ctx: &FieldCtx, rng: &mut SeededRng) -> FpVec3 {
    let p = ctx.p();
    FpVec3::new(
        rng.gen_range(0..p),
        rng.gen_range(0..p),
        rng.gen_range(1..p),
    )
}

fn heisenberg_trichotomy(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    if ctx.p() > 7 {
        return Ok(Ok(()));
    }
    let all = enumerate_h1(ctx, Convention::Matrix);
    let p = ctx.p();
    for i in 0..200 {
        let (s1, s2) = (random_nonzero_z(ctx, rng), random_nonzero_z(ctx, rng));
        let (d1, d2) = if i % 2 == 0 {
            let g = all.elems()[rng.gen_range(0..all.len())];
            (g.act(ctx, s1), g.act(ctx, s2))
        } else {
            // random targets satisfying y·w + z·v′ = y′·w + z·v
            let d1 = FpVec3::new(rng.gen_range(0..p), rng.gen_range(0..p), s1.z);
            let num = ctx.sub(
                ctx.add(ctx.mul(d1.y, s2.z), ctx.mul(s1.z, s2.y)),
                ctx.mul(s1.y, s2.z),
            );
            let v2 = ctx.div(num, s1.z)?;
            (d1, FpVec3::new(rng.gen_range(0..p), v2, s2.z))
        };
        let got = transporter_count_h1(ctx, s1, d1, s2, d2)?.count;
        let brute = all
            .iter()
            .filter(|g| g.act(ctx, s1) == d1 && g.act(ctx, s2) == d2)
            .count() as u64;
        if got != brute || !(got == 0 || got == 1 || got == p) {
            return Ok(Err(format!(
                "transporter count {got} vs enumeration {brute}"
            )));
        }
    }
    Ok(Ok(()))
}

fn heisenberg_counts(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    if ctx.p() > 13 {
        return Ok(Ok(()));
    }
    for _ in 0..5 {
        let a = sample::random_points3(ctx, rng.gen_range(1..=15), true, rng)?;
        let b = sample::random_points3(ctx, rng.gen_range(1..=15), true, rng)?;
        let (n, n_naive) = (count_n(ctx, &a, &b), count_n_naive(ctx, &a, &b));
        let (m, m_naive) = (count_nprime(ctx, &a, &b), count_nprime_naive(ctx, &a, &b));
        if n != n_naive || m != m_naive {
            return Ok(Err(format!("N {n}/{n_naive}, N′ {m}/{m_naive}")));
        }
        let cap = ctx.p() * (a.len() * b.len()) as u64;
        if m > cap {
            return Ok(Err(format!("N′ = {m} exceeds p|A||B| = {cap}")));
        }
    }
    Ok(Ok(()))
}

fn heisenberg_group(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    let p = ctx.p();
    for _ in 0..200 {
        let mut draw = || {
            H1Elem::new(
                ctx,
                rng.gen_range(0..p),
                rng.gen_range(0..p),
                rng.gen_range(0..p),
                Convention::Symmetric,
            )
        };
        let (g, h) = (draw(), draw());
        let v = FpVec3::new(
            rng.gen_range(0..p),
            rng.gen_range(0..p),
            rng.gen_range(0..p),
        );
        let gh = g.mul(ctx, &h)?;
        // the action must be a homomorphism in either convention
        if gh.act(ctx, v) != g.act(ctx, h.act(ctx, v)) {
            return Ok(Err(format!(
                "action not compatible with product at {g:?}, {h:?}"
            )));
        }
        let (gm, hm) = (g.to_matrix(ctx), h.to_matrix(ctx));
        if gm.mul(ctx, &hm)?.key(p) != gh.to_matrix(ctx).key(p) {
            return Ok(Err("convention change is not a homomorphism".into()));
        }
    }
    Ok(Ok(()))
}

fn constructions_verify(ctx: &FieldCtx, _: &mut SeededRng) -> Result<Outcome> {
    if ctx.p() > 13 {
        return Ok(Ok(()));
    }
    for id in CONSTRUCTION_IDS {
        let cfg = constructions::build(ctx, id, &[], DEFAULT_ENUMERATION_CAP)?;
        if let Some(bad) = cfg.expectations.iter().find(|e| !e.holds) {
            return Ok(Err(format!(
                "{id}: {} expected {:?} {} got {}",
                bad.name, bad.relation, bad.expected, bad.actual
            )));
        }
    }
    Ok(Ok(()))
}

fn rich_point(ctx: &FieldCtx, _: &mut SeededRng) -> Result<Outcome> {
    let full = PointSet2::full(ctx.p())?;
    let (_, count) = find_rich_point(ctx, &full)?;
    Ok(ensure(count as u64 == ctx.p() + 1, || {
        format!("full plane gave {count} directions")
    }))
}

fn symmetric_sets(ctx: &FieldCtx, rng: &mut SeededRng) -> Result<Outcome> {
    let s = sample::random_sl2(ctx, 10, rng)?;
    let sym = s.symmetrized(ctx);
    let ok = sym.is_symmetric() && s.iter().all(|g| sym.contains(g)) && sym.len() <= 2 * s.len();
    let union: MatrixSet<_> = s.union(ctx, &sym)?;
    Ok(ensure(ok && union.len() == sym.len(), || {
        "symmetrization failed".into()
    }))
}

const CHECKS: &[(&str, CheckFn)] = &[
    ("field-inverses", field_axioms),
    ("sl2-order", group_order),
    ("sl2-axioms", group_axioms),
    ("sl2-symmetrize", symmetric_sets),
    ("transporter-fibers", fiber_sizes),
    ("skew-invariance", skew_invariance),
    ("incidence-oracle", incidence_oracle),
    ("dft-identities", dft_identities),
    ("energy-oracles", energy_oracles),
    ("h1-action", heisenberg_group),
    ("h1-trichotomy", heisenberg_trichotomy),
    ("h1-counts", heisenberg_counts),
    ("constructions", constructions_verify),
    ("rich-point", rich_point),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Runs every check at `p`; errors become failed checks.
pub fn run_checks(p: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let ctx = FieldCtx::new(p)?;
    let mut out = Vec::with_capacity(CHECKS.len());
    for (i, (name, check)) in CHECKS.iter().enumerate() {
        let mut rng = sample::instance_rng(seed, p, i as u64);
        let start = Instant::now();
        let outcome = match check(&ctx, &mut rng) {
            Ok(o) => o,
            Err(e) => Err(e.to_string()),
        };
        out.push(CheckResult {
            check: name.to_string(),
            p,
            passed: outcome.is_ok(),
            detail: outcome.err(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(out)
}
