//! Parameter sweeps: a JSON spec in, one CSV row per instance out.
//!
//! ```json
//! {
//!   "seed": 7,
//!   "jobs": [
//!     { "theorem": "prop-1.1", "primes": [5, 7, 11], "instances": 10,
//!       "generator": { "kind": "random",
//!                      "e_sizes": [{ "power": 1.5 }],
//!                      "s_sizes": [{ "count": 40 }] } },
//!     { "theorem": "bnp", "primes": [3, 5, 7],
//!       "generator": { "kind": "construction", "id": "energy-extremal" } }
//!   ]
//! }
//! ```

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{self, ConfigSets};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::groups::{sl2_order, Convention, H1Elem, MatrixSet, Sl2Elem, DEFAULT_ENUMERATION_CAP};
use crate::h1_incidence::{evaluate_bound_h1, H1BoundInputs, H1_THEOREMS};
use crate::packing::{compare, compare_h1, CompareOptions, PACKING_THEOREMS};
use crate::points::{PointSet2, PointSet3};
use crate::report::BoundReport;
use crate::sample::{self, instance_rng};
use crate::sl2_incidence::{evaluate_bound, BoundInputs, Line, WeightedSet, SL2_THEOREMS};

/// How large a random set should be, as a function of p.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeRule {
    Count(usize),
    /// `round(p^x)`
    Power(f64),
    /// `round(p^x)` with `x` drawn uniformly per instance.
    PowerRange(f64, f64),
}

impl SizeRule {
    fn draw(&self, p: u64, max: usize, rng: &mut impl Rng) -> usize {
        let n = match *self {
            SizeRule::Count(n) => n,
            SizeRule::Power(x) => (p as f64).powf(x).round() as usize,
            SizeRule::PowerRange(lo, hi) => {
                let x = if hi > lo { rng.gen_range(lo..hi) } else { lo };
                (p as f64).powf(x).round() as usize
            }
        };
        n.clamp(1, max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Random {
        e_sizes: Vec<SizeRule>,
        s_sizes: Vec<SizeRule>,
    },
    Construction {
        id: String,
        #[serde(default)]
        args: Vec<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepJob {
    pub theorem: String,
    pub primes: Vec<u64>,
    #[serde(default = "one")]
    pub instances: usize,
    pub generator: Generator,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub jobs: Vec<SweepJob>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "p",
    "|E|",
    "|S|",
    "k1",
    "k2",
    "eps",
    "theorem",
    "predicted",
    "actual",
    "ratio",
    "seed",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub e_size: usize,
    pub s_size: usize,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub eps: Option<f64>,
    pub theorem: String,
    pub predicted: f64,
    pub actual: f64,
    pub ratio: Option<f64>,
    pub seed: u64,
}

struct Task<'a> {
    job_idx: usize,
    job: &'a SweepJob,
    p: u64,
    e_rule: Option<&'a SizeRule>,
    s_rule: Option<&'a SizeRule>,
    instance: u64,
}

enum Sets {
    Plane {
        s: MatrixSet<Sl2Elem>,
        e: PointSet2,
        aux: Option<PointSet2>,
    },
    Space {
        x: MatrixSet<H1Elem>,
        e: PointSet3,
    },
}

fn is_h1_theorem(id: &str) -> bool {
    H1_THEOREMS.contains(&id)
}

fn check_theorem(id: &str) -> Result<()> {
    if PACKING_THEOREMS.contains(&id) || SL2_THEOREMS.contains(&id) || is_h1_theorem(id) {
        Ok(())
    } else {
        Err(Error::UnknownTheorem(id.to_string()))
    }
}

fn generate(task: &Task, ctx: &FieldCtx, rng: &mut impl Rng) -> Result<Sets> {
    let p = task.p;
    match &task.job.generator {
        Generator::Random { .. } => {
            let (e_rule, s_rule) = (task.e_rule.expect("grid"), task.s_rule.expect("grid"));
            if is_h1_theorem(&task.job.theorem) {
                let n_e = e_rule.draw(p, (p * p * (p - 1)) as usize, rng);
                let n_x = s_rule.draw(p, (p * p * p) as usize, rng);
                let e = sample::random_points3(ctx, n_e, true, rng)?;
                let x = sample::random_h1(ctx, n_x, Convention::Matrix, rng)?;
                Ok(Sets::Space { x, e })
            } else {
                let n_e = e_rule.draw(p, (p * p - 1) as usize, rng);
                let n_s = s_rule.draw(p, sl2_order(p) as usize, rng);
                let e = sample::random_points2(ctx, n_e, rng)?;
                let s = sample::random_sl2(ctx, n_s, rng)?;
                Ok(Sets::Plane { s, e, aux: None })
            }
        }
        Generator::Construction { id, args } => {
            let cfg = constructions::build(ctx, id, args, DEFAULT_ENUMERATION_CAP)?;
            Ok(match cfg.sets {
                ConfigSets::Sl2 { s, e, aux } => Sets::Plane { s, e, aux },
                ConfigSets::H1 { x, e } => Sets::Space { x, e },
            })
        }
    }
}

fn random_lines(ctx: &FieldCtx, n: usize, rng: &mut impl Rng) -> Result<WeightedSet<Line>> {
    let p = ctx.p();
    let mut lines = Vec::with_capacity(n);
    while lines.len() < n {
        let (a, b, c) = (
            rng.gen_range(0..p),
            rng.gen_range(0..p),
            rng.gen_range(0..p),
        );
        if a != 0 || b != 0 {
            lines.push((Line::new(ctx, a, b, c)?, 1));
        }
    }
    WeightedSet::new(lines)
}

fn bound_row(r: BoundReport, e_size: usize, s_size: usize, seed: u64) -> SweepRow {
    SweepRow {
        p: r.p,
        e_size,
        s_size,
        k1: r.params.k1.or(r.params.k),
        k2: r.params.k2,
        eps: r.params.eps,
        theorem: r.theorem_id.clone(),
        predicted: r.predicted,
        actual: r.exact as f64,
        ratio: r.empirical_constant,
        seed,
    }
}

fn run_task(task: &Task, base_seed: u64) -> Result<SweepRow> {
    let ctx = FieldCtx::new(task.p)?;
    let mut rng = instance_rng(base_seed, task.job_idx as u64, task.instance);
    // the seed recorded in the row regenerates exactly this instance
    let seed = rng.gen::<u64>();
    let mut rng = sample::rng(seed);
    let id = task.job.theorem.as_str();
    let sets = generate(task, &ctx, &mut rng)?;
    let opts = CompareOptions {
        gamma: task.job.gamma,
        eps: task.job.eps,
        seed: Some(seed),
        ..Default::default()
    };
    match sets {
        Sets::Plane { s, e, aux } => {
            if PACKING_THEOREMS.contains(&id) {
                let r = compare(&ctx, &s, &e, id, &opts)?;
                return Ok(SweepRow {
                    p: r.p,
                    e_size: r.e_size,
                    s_size: r.s_size,
                    k1: r.params.k1.or(r.params.k),
                    k2: r.params.k2,
                    eps: r.params.eps,
                    theorem: r.theorem_id,
                    predicted: r.predicted,
                    actual: r.image_size as f64,
                    ratio: r.ratio,
                    seed,
                });
            }
            if is_h1_theorem(id) {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    found: 2,
                });
            }
            let (e_size, s_size) = (e.len(), s.len());
            let mut inputs = BoundInputs {
                gamma: task.job.gamma,
                eps: task.job.eps,
                ..Default::default()
            };
            if matches!(id, "sdz" | "sdz-multi") {
                inputs.points = Some(WeightedSet::uniform(e.iter()));
                inputs.lines = Some(random_lines(&ctx, s_size, &mut rng)?);
            }
            inputs.a = Some(aux.unwrap_or_else(|| e.clone()));
            inputs.b = Some(e);
            inputs.s = Some(s);
            let r = evaluate_bound(&ctx, id, &inputs)?;
            Ok(bound_row(r, e_size, s_size, seed))
        }
        Sets::Space { x, e } => {
            let (e_size, s_size) = (e.len(), x.len());
            if id == "thm-1.5" {
                let r = compare_h1(&ctx, &x, &e, &opts)?;
                return Ok(SweepRow {
                    p: r.p,
                    e_size,
                    s_size,
                    k1: None,
                    k2: None,
                    eps: r.params.eps,
                    theorem: r.theorem_id,
                    predicted: r.predicted,
                    actual: r.image_size as f64,
                    ratio: r.ratio,
                    seed,
                });
            }
            if !is_h1_theorem(id) {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: 3,
                });
            }
            let inputs = H1BoundInputs {
                a: Some(e.clone()),
                b: Some(e.clone()),
                x: Some(x),
                e: Some(e),
                eps: task.job.eps,
            };
            let r = evaluate_bound_h1(&ctx, id, &inputs)?;
            Ok(bound_row(r, e_size, s_size, seed))
        }
    }
}

fn tasks(spec: &SweepSpec) -> Result<Vec<Task<'_>>> {
    let mut out = Vec::new();
    for (job_idx, job) in spec.jobs.iter().enumerate() {
        check_theorem(&job.theorem)?;
        let grid: Vec<(Option<&SizeRule>, Option<&SizeRule>)> = match &job.generator {
            Generator::Random { e_sizes, s_sizes } => e_sizes
                .iter()
                .flat_map(|e| s_sizes.iter().map(move |s| (Some(e), Some(s))))
                .collect(),
            Generator::Construction { .. } => vec![(None, None)],
        };
        let mut instance = 0u64;
        for &p in &job.primes {
            for &(e_rule, s_rule) in &grid {
                for _ in 0..job.instances {
                    out.push(Task {
                        job_idx,
                        job,
                        p,
                        e_rule,
                        s_rule,
                        instance,
                    });
                    instance += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Runs every instance on the current rayon pool. Rows come back in
/// instance order whatever the thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let tasks = tasks(spec)?;
    tasks.par_iter().map(|t| run_task(t, spec.seed)).collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Smallest ratio among rows of `theorem`.
pub fn min_ratio(rows: &[SweepRow], theorem: &str) -> Option<f64> {
    rows.iter()
        .filter(|r| r.theorem == theorem)
        .filter_map(|r| r.ratio)
        .reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_string(rows: &[SweepRow]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_spec_gives_header_only() {
        let spec = SweepSpec::from_json("{}").unwrap();
        let rows = run_sweep(&spec).unwrap();
        assert!(rows.is_empty());
        assert_eq!(
            csv_string(&rows),
            "p,|E|,|S|,k1,k2,eps,theorem,predicted,actual,ratio,seed\n"
        );
    }

    #[test]
    fn random_packing_sweep() {
        let spec = SweepSpec::from_json(
            r#"{"seed": 3, "jobs": [{"theorem": "prop-1.1", "primes": [5, 7], "instances": 4,
                "generator": {"kind": "random", "e_sizes": [{"power": 1.2}, {"count": 6}],
                              "s_sizes": [{"power_range": [1.0, 2.0]}]}}]}"#,
        )
        .unwrap();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.ratio.unwrap() > 0.0));
        assert_eq!(rows[0].p, 5);
        assert_eq!(rows[15].p, 7);
        // same spec, same rows; one thread or many
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_sweep(&spec).unwrap());
        assert_eq!(csv_string(&rows), csv_string(&single));
    }

    #[test]
    fn construction_and_bound_sweeps() {
        let spec = SweepSpec::from_json(
            r#"{"jobs": [
                {"theorem": "bnp", "primes": [3, 5, 7],
                 "generator": {"kind": "construction", "id": "energy-extremal"}},
                {"theorem": "thm-2.1", "primes": [5],
                 "generator": {"kind": "construction", "id": "line-sharpness"}},
                {"theorem": "thm-1.5", "primes": [5], "instances": 2,
                 "generator": {"kind": "random", "e_sizes": [{"count": 20}], "s_sizes": [{"count": 10}]}},
                {"theorem": "thm-5.1", "primes": [5],
                 "generator": {"kind": "random", "e_sizes": [{"count": 20}], "s_sizes": [{"count": 10}]}},
                {"theorem": "sdz", "primes": [7],
                 "generator": {"kind": "random", "e_sizes": [{"count": 20}], "s_sizes": [{"count": 10}]}}
            ]}"#,
        )
        .unwrap();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 8);
        let energies: Vec<f64> = rows[..3].iter().map(|r| r.actual).collect();
        assert_eq!(energies, vec![32.0, 1024.0, 7776.0]);
        assert_eq!(rows[3].actual, 100.0);
    }

    #[test]
    fn bad_specs() {
        let spec = SweepSpec::from_json(
            r#"{"jobs": [{"theorem": "nope", "primes": [5],
                "generator": {"kind": "construction", "id": "obs1"}}]}"#,
        )
        .unwrap();
        assert!(matches!(run_sweep(&spec), Err(Error::UnknownTheorem(_))));
        assert!(SweepSpec::from_json("{").is_err());
        let spec = SweepSpec::from_json(
            r#"{"jobs": [{"theorem": "prop-1.1", "primes": [4],
                "generator": {"kind": "construction", "id": "obs1"}}]}"#,
        )
        .unwrap();
        assert_eq!(run_sweep(&spec), Err(Error::NotPrime(4)));
    }
}
