//! Deterministic generators for the extremal and sharpness configurations.
//!
//! Every generator recomputes its advertised statistics from the sets it
//! built and records them as [`Expectation`]s.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2, FpVec3};
use crate::groups::{
    enumerate_h1, enumerate_sl2, transporter_fiber, Convention, H1Elem, MatrixSet, Sl2Elem,
};
use crate::packing::{image_set, image_set_h1};
use crate::points::{PointSet2, PointSet3};
use crate::sl2_incidence::{count_incidences, energy2, Line};

/// Ids accepted by [`build`].
pub const CONSTRUCTION_IDS: &[&str] = &[
    "obs1",
    "obs2",
    "line-sharpness",
    "energy-extremal",
    "prop11",
    "prop13",
    "obs3",
    "obs4",
    "obs5",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub name: String,
    pub relation: Relation,
    pub expected: f64,
    pub actual: f64,
    pub holds: bool,
}

impl Expectation {
    pub fn new(name: &str, relation: Relation, expected: f64, actual: f64) -> Self {
        let holds = match relation {
            Relation::Eq => actual == expected,
            Relation::Le => actual <= expected,
            Relation::Ge => actual >= expected,
        };
        Expectation {
            name: name.to_string(),
            relation,
            expected,
            actual,
            holds,
        }
    }
}

/// The generated sets of a configuration.
#[derive(Clone, Debug)]
pub enum ConfigSets {
    /// `aux` is a second point set where the construction has one
    /// (the target set `E′`, or the line the transporters land on).
    Sl2 {
        s: MatrixSet<Sl2Elem>,
        e: PointSet2,
        aux: Option<PointSet2>,
    },
    H1 {
        x: MatrixSet<H1Elem>,
        e: PointSet3,
    },
}

#[derive(Clone, Debug)]
pub struct NamedConfig {
    pub id: String,
    pub p: u64,
    pub sets: ConfigSets,
    pub params: BTreeMap<String, u64>,
    pub realized_eps: Option<f64>,
    pub expectations: Vec<Expectation>,
    pub notes: Vec<String>,
}

/// Serializable summary of a [`NamedConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigManifest {
    pub id: String,
    pub p: u64,
    pub group: String,
    pub params: BTreeMap<String, u64>,
    pub sizes: BTreeMap<String, usize>,
    pub realized_eps: Option<f64>,
    pub expectations: Vec<Expectation>,
    pub verified: bool,
    pub notes: Vec<String>,
}

impl NamedConfig {
    fn new(id: &str, p: u64, sets: ConfigSets) -> Self {
        NamedConfig {
            id: id.to_string(),
            p,
            sets,
            params: BTreeMap::new(),
            realized_eps: None,
            expectations: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn param(mut self, name: &str, v: u64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    fn expect(&mut self, name: &str, relation: Relation, expected: f64, actual: f64) {
        self.expectations
            .push(Expectation::new(name, relation, expected, actual));
    }

    pub fn verified(&self) -> bool {
        self.expectations.iter().all(|e| e.holds)
    }

    pub fn expectation(&self, name: &str) -> Option<&Expectation> {
        self.expectations.iter().find(|e| e.name == name)
    }

    pub fn sl2_sets(&self) -> Option<(&MatrixSet<Sl2Elem>, &PointSet2)> {
        match &self.sets {
            ConfigSets::Sl2 { s, e, .. } => Some((s, e)),
            ConfigSets::H1 { .. } => None,
        }
    }

    pub fn h1_sets(&self) -> Option<(&MatrixSet<H1Elem>, &PointSet3)> {
        match &self.sets {
            ConfigSets::H1 { x, e } => Some((x, e)),
            ConfigSets::Sl2 { .. } => None,
        }
    }

    pub fn manifest(&self) -> ConfigManifest {
        let mut sizes = BTreeMap::new();
        let group = match &self.sets {
            ConfigSets::Sl2 { s, e, aux } => {
                sizes.insert("S".to_string(), s.len());
                sizes.insert("E".to_string(), e.len());
                if let Some(aux) = aux {
                    sizes.insert("aux".to_string(), aux.len());
                }
                "sl2"
            }
            ConfigSets::H1 { x, e } => {
                sizes.insert("X".to_string(), x.len());
                sizes.insert("E".to_string(), e.len());
                "h1-matrix"
            }
        };
        ConfigManifest {
            id: self.id.clone(),
            p: self.p,
            group: group.to_string(),
            params: self.params.clone(),
            sizes,
            realized_eps: self.realized_eps,
            expectations: self.expectations.clone(),
            verified: self.verified(),
            notes: self.notes.clone(),
        }
    }
}

fn log_p(p: u64, x: f64) -> f64 {
    x.ln() / (p as f64).ln()
}

/// The subgroup of `F_p^*` of order `d`, sorted.
pub fn mult_subgroup(ctx: &FieldCtx, d: u64) -> Result<Vec<u64>> {
    let p = ctx.p();
    let n = p - 1;
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::NotADivisor(d, n));
    }
    let prime_factors: Vec<u64> = (2..=n)
        .filter(|&q| n.is_multiple_of(q) && (2..q).all(|r| q % r != 0))
        .collect();
    let g = (2..p)
        .find(|&g| prime_factors.iter().all(|&q| ctx.pow(g, n / q) != 1))
        .unwrap_or(1);
    let h = ctx.pow(g, n / d);
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |&x| Some(ctx.mul(x, h)))
        .take(d as usize)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `{θ ∈ SL2 : θ(ℓ₁) = ℓ₂}` for two lines through the origin.
pub fn line_transporter(ctx: &FieldCtx, l1: &Line, l2: &Line) -> Result<MatrixSet<Sl2Elem>> {
    if !l1.passes_through_origin() || !l2.passes_through_origin() {
        return Err(Error::NotOriginLine);
    }
    let v1 = FpVec2::new(l1.b, ctx.neg(l1.a));
    let v2 = FpVec2::new(l2.b, ctx.neg(l2.a));
    let mut elems = Vec::with_capacity((ctx.p() * (ctx.p() - 1)) as usize);
    for t in 1..ctx.p() {
        elems.extend_from_slice(transporter_fiber(ctx, v1, ctx.scale2(t, v2))?.elems());
    }
    Ok(MatrixSet::new(ctx, elems))
}

/// The matrices `[[s, −x], [x⁻¹, 0]]` with `s, x ≠ 0`.
pub fn energy_extremal_family(ctx: &FieldCtx) -> MatrixSet<Sl2Elem> {
    let p = ctx.p();
    let mut elems = Vec::with_capacity(((p - 1) * (p - 1)) as usize);
    for s in 1..p {
        for x in 1..p {
            let xi = ctx.inv(x).expect("nonzero");
            elems.push(Sl2Elem::new(ctx, s, ctx.neg(x), xi, 0).expect("det is 1"));
        }
    }
    MatrixSet::new(ctx, elems)
}

fn origin_line_points(ctx: &FieldCtx, dir: usize) -> Result<PointSet2> {
    let v = ctx.direction_vector(dir);
    PointSet2::new(ctx.p(), (0..ctx.p()).map(|t| ctx.scale2(t, v)))
}

/// `E = {0}×A`, `S` a union of `|B|`-element pieces of fibres onto `{0}×B`.
pub fn obs1_config(ctx: &FieldCtx, d_a: u64, d_b: u64) -> Result<NamedConfig> {
    let p = ctx.p();
    let a = mult_subgroup(ctx, d_a)?;
    let b = mult_subgroup(ctx, d_b)?;
    if !d_b.is_multiple_of(d_a) {
        return Err(Error::PreconditionViolated(format!(
            "subgroup order {d_a} must divide {d_b}"
        )));
    }
    if d_b > p {
        return Err(Error::InfeasibleFiber {
            needed: d_b as usize,
            available: p as usize,
        });
    }
    let mut covered = vec![false; p as usize];
    let mut reps = Vec::new();
    for &x in &b {
        if covered[x as usize] {
            continue;
        }
        reps.push(x);
        for &y in &a {
            covered[ctx.mul(x, y) as usize] = true;
        }
    }
    let mut elems = Vec::new();
    for &x in &reps {
        let fiber = transporter_fiber(ctx, FpVec2::new(0, 1), FpVec2::new(0, x))?;
        elems.extend_from_slice(&fiber.elems()[..d_b as usize]);
    }
    let s = MatrixSet::new(ctx, elems);
    let e = PointSet2::new(p, a.iter().map(|&y| FpVec2::new(0, y)))?;
    let img = image_set(ctx, &s, &e)?;
    let mut cfg = NamedConfig::new(
        "obs1",
        p,
        ConfigSets::Sl2 {
            s: s.clone(),
            e: e.clone(),
            aux: None,
        },
    )
    .param("dA", d_a)
    .param("dB", d_b);
    cfg.expect(
        "|S|",
        Relation::Eq,
        (d_b * d_b / d_a) as f64,
        s.len() as f64,
    );
    cfg.expect("|E|", Relation::Eq, d_a as f64, e.len() as f64);
    cfg.expect("|S(E)|", Relation::Eq, d_b as f64, img.len() as f64);
    cfg.expect(
        "|S(E)|^2 = |S||E|",
        Relation::Eq,
        (s.len() * e.len()) as f64,
        (img.len() * img.len()) as f64,
    );
    cfg.realized_eps = Some(log_p(p, d_b as f64));
    cfg.notes.push(format!("B/A has {} cosets", reps.len()));
    Ok(cfg)
}

/// `E` the line `y = 0`, `E′` a union of `num_lines` origin lines, and
/// `S = {θ : θ(1,0) ∈ E′}`.
pub fn obs2_config(ctx: &FieldCtx, num_lines: usize) -> Result<NamedConfig> {
    let p = ctx.p();
    if num_lines == 0 || num_lines as u64 > p + 1 {
        return Err(Error::PreconditionViolated(format!(
            "line count {num_lines} outside 1..={}",
            p + 1
        )));
    }
    let e = origin_line_points(ctx, 0)?;
    let mut target = PointSet2::empty(p)?;
    for dir in 0..num_lines {
        target = target.union(&origin_line_points(ctx, dir)?)?;
    }
    let mut elems = Vec::new();
    for v in target.iter().filter(|v| !v.is_zero()) {
        elems.extend_from_slice(transporter_fiber(ctx, FpVec2::new(1, 0), v)?.elems());
    }
    let s = MatrixSet::new(ctx, elems);
    let img = image_set(ctx, &s, &e)?;
    let n = num_lines as u64;
    let mut cfg = NamedConfig::new(
        "obs2",
        p,
        ConfigSets::Sl2 {
            s: s.clone(),
            e: e.clone(),
            aux: Some(target.clone()),
        },
    )
    .param("num_lines", n);
    cfg.expect(
        "|E'|",
        Relation::Eq,
        (n * (p - 1) + 1) as f64,
        target.len() as f64,
    );
    cfg.expect(
        "|S|",
        Relation::Eq,
        (n * (p - 1) * p) as f64,
        s.len() as f64,
    );
    cfg.expect(
        "|S(E)|",
        Relation::Eq,
        target.len() as f64,
        img.len() as f64,
    );
    cfg.expect(
        "S(E) = E'",
        Relation::Eq,
        1.0,
        if img == target { 1.0 } else { 0.0 },
    );
    cfg.realized_eps = Some(log_p(p, n as f64));
    Ok(cfg)
}

/// `S` the transporter from the line `y = 0` to the line `y = x`, with
/// `E` the first line and `aux` the second.
pub fn line_sharpness_config(ctx: &FieldCtx) -> Result<NamedConfig> {
    let p = ctx.p();
    let l1 = Line::new(ctx, 0, 1, 0)?;
    let l2 = Line::new(ctx, 1, p - 1, 0)?;
    let s = line_transporter(ctx, &l1, &l2)?;
    let e = PointSet2::new(p, l1.points(ctx))?;
    let target = PointSet2::new(p, l2.points(ctx))?;
    let img = image_set(ctx, &s, &e)?;
    let inc = count_incidences(ctx, &target, &e, &s)?;
    let mut cfg = NamedConfig::new(
        "line-sharpness",
        p,
        ConfigSets::Sl2 {
            s: s.clone(),
            e,
            aux: Some(target.clone()),
        },
    );
    cfg.expect("|S|", Relation::Eq, (p * (p - 1)) as f64, s.len() as f64);
    cfg.expect("|S(E)|", Relation::Eq, p as f64, img.len() as f64);
    cfg.expect(
        "S(E) = l2",
        Relation::Eq,
        1.0,
        if img == target { 1.0 } else { 0.0 },
    );
    cfg.expect(
        "I(l2 x l1, S)",
        Relation::Eq,
        (p * (p - 1) + p * (p - 1) * (p - 1)) as f64,
        inc as f64,
    );
    Ok(cfg)
}

/// [`energy_extremal_family`] with its multiplicative energy recorded.
pub fn energy_extremal_config(ctx: &FieldCtx) -> Result<NamedConfig> {
    let p = ctx.p();
    let s = energy_extremal_family(ctx);
    let en = energy2(ctx, &s);
    let q = (p - 1) as f64;
    let mut cfg = NamedConfig::new(
        "energy-extremal",
        p,
        ConfigSets::Sl2 {
            s: s.clone(),
            e: PointSet2::empty(p)?,
            aux: None,
        },
    );
    cfg.expect("|S|", Relation::Eq, q * q, s.len() as f64);
    cfg.expect("E(S,S)", Relation::Eq, q.powi(5), en as f64);
    cfg.notes.push(format!(
        "E(S,S) = {en}; (p-1)^5 = {}, (p-1)^6 = {}",
        q.powi(5),
        q.powi(6)
    ));
    Ok(cfg)
}

/// `S = {θ : θ(0,1) = (−x,0), x ∈ A}`, `E = A × F_p` for `A` of order `d`.
pub fn prop11_sharpness(ctx: &FieldCtx, d: u64) -> Result<NamedConfig> {
    let p = ctx.p();
    let a = mult_subgroup(ctx, d)?;
    let mut elems = Vec::new();
    for &x in &a {
        let fiber = transporter_fiber(ctx, FpVec2::new(0, 1), FpVec2::new(ctx.neg(x), 0))?;
        elems.extend_from_slice(fiber.elems());
    }
    let s = MatrixSet::new(ctx, elems);
    let e = PointSet2::new(
        p,
        a.iter()
            .flat_map(|&y| (0..p).map(move |z| FpVec2::new(y, z))),
    )?;
    let img = image_set(ctx, &s, &e)?;
    let mut cfg = NamedConfig::new(
        "prop11",
        p,
        ConfigSets::Sl2 {
            s: s.clone(),
            e: e.clone(),
            aux: None,
        },
    )
    .param("d", d);
    cfg.expect("|S|", Relation::Eq, (d * p) as f64, s.len() as f64);
    cfg.expect("|E|", Relation::Eq, (d * p) as f64, e.len() as f64);
    cfg.expect("|S(E)|", Relation::Le, (d * p) as f64, img.len() as f64);
    let in_a = img.iter().all(|v| a.binary_search(&v.y).is_ok());
    cfg.expect(
        "second coordinate of S(E) in A",
        Relation::Eq,
        1.0,
        if in_a { 1.0 } else { 0.0 },
    );
    cfg.realized_eps = Some(1.0 - log_p(p, d as f64));
    Ok(cfg)
}

/// One nonzero point on each of the first `num_dirs` origin lines, moved by
/// all of SL2.
pub fn prop13_extremal(ctx: &FieldCtx, num_dirs: usize, cap: u64) -> Result<NamedConfig> {
    let p = ctx.p();
    if num_dirs == 0 || num_dirs as u64 > p + 1 {
        return Err(Error::PreconditionViolated(format!(
            "direction count {num_dirs} outside 1..={}",
            p + 1
        )));
    }
    let s = enumerate_sl2(ctx, cap)?;
    let e = PointSet2::new(p, (0..num_dirs).map(|d| ctx.direction_vector(d)))?;
    let img = image_set(ctx, &s, &e)?;
    let stats = e.direction_stats(ctx);
    let mut cfg = NamedConfig::new(
        "prop13",
        p,
        ConfigSets::Sl2 {
            s,
            e: e.clone(),
            aux: None,
        },
    )
    .param("num_dirs", num_dirs as u64);
    cfg.expect("|E|", Relation::Eq, num_dirs as f64, e.len() as f64);
    cfg.expect("k1", Relation::Eq, 1.0, stats.k1 as f64);
    cfg.expect("k2", Relation::Eq, num_dirs as f64, stats.k2 as f64);
    cfg.expect("|S(E)|", Relation::Eq, (p * p - 1) as f64, img.len() as f64);
    Ok(cfg)
}

fn dedup_residues(ctx: &FieldCtx, vals: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = vals.iter().map(|&t| ctx.reduce(t)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// `X = H1`, `E = F_p² × T`.
pub fn obs3_config(ctx: &FieldCtx, t: &[u64]) -> Result<NamedConfig> {
    let p = ctx.p();
    let t = dedup_residues(ctx, t);
    if t.is_empty() {
        return Err(Error::EmptySet);
    }
    let x = enumerate_h1(ctx, Convention::Matrix);
    let e = PointSet3::new(
        p,
        t.iter()
            .flat_map(|&z| (0..p * p).map(move |i| FpVec3::new(i / p, i % p, z))),
    )?;
    let img = image_set_h1(ctx, &x, &e)?;
    let size_t = t.len() as u64;
    let mut cfg = NamedConfig::new("obs3", p, ConfigSets::H1 { x, e }).param("|T|", size_t);
    cfg.expect(
        "|X(E)|",
        Relation::Eq,
        (p * p * size_t) as f64,
        img.len() as f64,
    );
    cfg.expect(
        "|X(E)| <= alpha p^3",
        Relation::Le,
        (size_t as f64 / p as f64) * (p * p * p) as f64,
        img.len() as f64,
    );
    cfg.realized_eps = Some(log_p(p, size_t as f64));
    Ok(cfg)
}

/// `X = {[a,b,c] : b ∈ A}`, `E = F_p × A × A`.
pub fn obs4_config(ctx: &FieldCtx, a: &[u64]) -> Result<NamedConfig> {
    let p = ctx.p();
    let a = dedup_residues(ctx, a);
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut elems = Vec::new();
    for u in 0..p {
        for &b in &a {
            for c in 0..p {
                elems.push(H1Elem::new(ctx, u, b, c, Convention::Matrix));
            }
        }
    }
    let x = MatrixSet::new(ctx, elems);
    let e = PointSet3::new(
        p,
        (0..p).flat_map(|u| {
            let a = &a;
            a.iter()
                .flat_map(move |&y| a.iter().map(move |&z| FpVec3::new(u, y, z)))
        }),
    )?;
    let img = image_set_h1(ctx, &x, &e)?;
    let n = a.len() as u64;
    let x_len = x.len();
    let e_len = e.len();
    let mut cfg = NamedConfig::new("obs4", p, ConfigSets::H1 { x, e }).param("|A|", n);
    cfg.expect("|X|", Relation::Eq, (p * p * n) as f64, x_len as f64);
    cfg.expect("|E|", Relation::Eq, (p * n * n) as f64, e_len as f64);
    cfg.expect(
        "|X(E)| <= |X|",
        Relation::Le,
        x_len as f64,
        img.len() as f64,
    );
    Ok(cfg)
}

/// `E = F_p × A × A` for the progression `A = {start + i·step}`, and
/// `X = {[a,1,c]}`.
pub fn obs5_config(ctx: &FieldCtx, start: u64, step: u64, len: usize) -> Result<NamedConfig> {
    let p = ctx.p();
    let step = ctx.reduce(step);
    if step == 0 || len == 0 || len as u64 > p {
        return Err(Error::PreconditionViolated(format!(
            "progression needs nonzero step and 1..={p} terms"
        )));
    }
    let a: Vec<u64> = (0..len as u64)
        .map(|i| ctx.add(ctx.reduce(start), ctx.mul(i % p, step)))
        .collect();
    let mut elems = Vec::new();
    for u in 0..p {
        for c in 0..p {
            elems.push(H1Elem::new(ctx, u, 1, c, Convention::Matrix));
        }
    }
    let x = MatrixSet::new(ctx, elems);
    let e = PointSet3::new(
        p,
        (0..p).flat_map(|u| {
            let a = &a;
            a.iter()
                .flat_map(move |&y| a.iter().map(move |&z| FpVec3::new(u, y, z)))
        }),
    )?;
    let img = image_set_h1(ctx, &x, &e)?;
    let e_len = e.len();
    let mut cfg = NamedConfig::new("obs5", p, ConfigSets::H1 { x, e })
        .param("start", ctx.reduce(start))
        .param("step", step)
        .param("len", len as u64);
    cfg.expect(
        "|E|",
        Relation::Eq,
        (p as usize * len * len) as f64,
        e_len as f64,
    );
    cfg.expect(
        "|X(E)| <= 2|E|",
        Relation::Le,
        2.0 * e_len as f64,
        img.len() as f64,
    );
    cfg.notes.push(format!(
        "C = |X(E)|/|E| = {:.4}",
        img.len() as f64 / e_len as f64
    ));
    Ok(cfg)
}

/// Builds a configuration by id. `args` holds the integer parameters in the
/// order the individual generator takes them; missing ones get defaults.
pub fn build(ctx: &FieldCtx, id: &str, args: &[u64], cap: u64) -> Result<NamedConfig> {
    let arg = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);
    let p = ctx.p();
    match id {
        "obs1" => obs1_config(ctx, arg(0, 1), arg(1, p - 1)),
        "obs2" => obs2_config(ctx, arg(0, 2) as usize),
        "line-sharpness" => line_sharpness_config(ctx),
        "energy-extremal" => energy_extremal_config(ctx),
        "prop11" => prop11_sharpness(ctx, arg(0, p - 1)),
        "prop13" => prop13_extremal(ctx, arg(0, p + 1) as usize, cap),
        "obs3" => {
            let t: Vec<u64> = if args.is_empty() {
                vec![1]
            } else {
                args.to_vec()
            };
            obs3_config(ctx, &t)
        }
        "obs4" => {
            let a: Vec<u64> = if args.is_empty() {
                vec![1, 2]
            } else {
                args.to_vec()
            };
            obs4_config(ctx, &a)
        }
        "obs5" => obs5_config(ctx, arg(0, 0), arg(1, 1), arg(2, 3) as usize),
        other => Err(Error::UnknownTheorem(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::DEFAULT_ENUMERATION_CAP;
    use crate::sl2_incidence::energy2_naive;

    fn ctx(p: u64) -> FieldCtx {
        FieldCtx::new(p).unwrap()
    }

    #[test]
    fn subgroups() {
        let c = ctx(13);
        assert_eq!(mult_subgroup(&c, 3).unwrap(), vec![1, 3, 9]);
        assert_eq!(mult_subgroup(&c, 12).unwrap(), (1..13).collect::<Vec<_>>());
        assert_eq!(mult_subgroup(&c, 5), Err(Error::NotADivisor(5, 12)));
        // orders match the brute-force definition
        for p in [7u64, 11, 13, 31] {
            let c = ctx(p);
            for d in (1..p).filter(|d| (p - 1) % d == 0) {
                let brute: Vec<u64> = (1..p).filter(|&x| c.pow(x, d) == 1).collect();
                assert_eq!(mult_subgroup(&c, d).unwrap(), brute);
            }
        }
    }

    #[test]
    fn obs1_examples() {
        let cfg = obs1_config(&ctx(13), 3, 12).unwrap();
        assert!(cfg.verified(), "{:?}", cfg.expectations);
        assert_eq!(cfg.expectation("|S|").unwrap().actual, 48.0);
        assert_eq!(cfg.expectation("|S(E)|").unwrap().actual, 12.0);
        let cfg = obs1_config(&ctx(7), 2, 6).unwrap();
        assert!(cfg.verified());
        assert_eq!(cfg.expectation("|S|").unwrap().actual, 18.0);
        let cfg = obs1_config(&ctx(7), 3, 3).unwrap();
        assert!(cfg.verified());
        assert_eq!(cfg.expectation("|S|").unwrap().actual, 3.0);
        assert!(matches!(
            obs1_config(&ctx(13), 4, 6),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn obs2_examples() {
        for p in [3u64, 5, 7] {
            let c = ctx(p);
            for n in 1..=(p as usize + 1) {
                let cfg = obs2_config(&c, n).unwrap();
                assert!(cfg.verified(), "p={p} n={n} {:?}", cfg.expectations);
            }
        }
        let cfg = obs2_config(&ctx(5), 2).unwrap();
        assert_eq!(cfg.expectation("|E'|").unwrap().actual, 9.0);
        let cfg = obs2_config(&ctx(5), 6).unwrap();
        assert_eq!(cfg.expectation("|S(E)|").unwrap().actual, 25.0);
    }

    #[test]
    fn line_transporter_is_a_coset() {
        let c = ctx(5);
        let full = enumerate_sl2(&c, DEFAULT_ENUMERATION_CAP).unwrap();
        let l1 = Line::new(&c, 1, 2, 0).unwrap();
        let l2 = Line::new(&c, 0, 1, 0).unwrap();
        let s = line_transporter(&c, &l1, &l2).unwrap();
        assert_eq!(s.len(), 20);
        // against a filter over the whole group
        let on = |l: &Line| -> Vec<FpVec2> { l.points(&c).collect() };
        let brute: Vec<Sl2Elem> = full
            .iter()
            .filter(|g| on(&l1).iter().all(|&v| l2.contains(&c, g.act(&c, v))))
            .copied()
            .collect();
        assert_eq!(s.elems(), MatrixSet::new(&c, brute).elems());
        let h = line_transporter(&c, &l1, &l1).unwrap();
        let g = s.elems()[0];
        assert_eq!(h.left_translate(&c, &g).unwrap().elems(), s.elems());
        assert!(matches!(
            line_transporter(&c, &Line::new(&c, 1, 0, 1).unwrap(), &l2),
            Err(Error::NotOriginLine)
        ));
        let c7 = ctx(7);
        let s7 = line_transporter(&c7, &Line::new(&c7, 3, 1, 0).unwrap(), &l2).unwrap();
        assert_eq!(s7.len(), 42);
    }

    #[test]
    fn line_sharpness_counts() {
        for (p, want) in [(3u64, 18.0), (5, 100.0), (7, 294.0)] {
            let cfg = line_sharpness_config(&ctx(p)).unwrap();
            assert!(cfg.verified(), "{:?}", cfg.expectations);
            assert_eq!(cfg.expectation("I(l2 x l1, S)").unwrap().actual, want);
        }
    }

    #[test]
    fn energy_family() {
        let c = ctx(3);
        let s = energy_extremal_family(&c);
        assert_eq!(s.len(), 4);
        assert_eq!(energy2_naive(&c, &s), 32);
        assert_eq!(energy_extremal_family(&ctx(5)).len(), 16);
        for p in [3u64, 5, 7] {
            assert!(energy_extremal_config(&ctx(p)).unwrap().verified());
        }
    }

    #[test]
    fn prop11_examples() {
        let cfg = prop11_sharpness(&ctx(13), 4).unwrap();
        assert!(cfg.verified(), "{:?}", cfg.expectations);
        assert_eq!(cfg.expectation("|S|").unwrap().actual, 52.0);
        assert!(prop11_sharpness(&ctx(7), 3).unwrap().verified());
        assert!(prop11_sharpness(&ctx(7), 6).unwrap().verified());
        assert!(prop11_sharpness(&ctx(7), 4).is_err());
    }

    #[test]
    fn prop13_examples() {
        let cfg = prop13_extremal(&ctx(5), 6, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(cfg.verified());
        assert_eq!(cfg.expectation("|S(E)|").unwrap().actual, 24.0);
        let cfg = prop13_extremal(&ctx(3), 4, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(cfg.expectation("|S(E)|").unwrap().actual, 8.0);
        assert!(prop13_extremal(&ctx(7), 1, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .verified());
    }

    #[test]
    fn heisenberg_observations() {
        let cfg = obs3_config(&ctx(5), &[1, 3]).unwrap();
        assert!(cfg.verified());
        assert_eq!(cfg.expectation("|X(E)|").unwrap().actual, 50.0);
        assert!(obs3_config(&ctx(5), &[0]).unwrap().verified());
        let cfg = obs4_config(&ctx(5), &[1, 2]).unwrap();
        assert!(cfg.verified(), "{:?}", cfg.expectations);
        assert_eq!(cfg.expectation("|X|").unwrap().actual, 50.0);
        for p in [3u64, 5, 7] {
            let c = ctx(p);
            let all: Vec<u64> = (0..p).collect();
            assert!(obs4_config(&c, &all).unwrap().verified());
            assert!(obs4_config(&c, &all[..2]).unwrap().verified());
            for len in 1..=p as usize {
                assert!(obs5_config(&c, 0, 1, len).unwrap().verified());
            }
        }
        assert!(obs5_config(&ctx(5), 0, 1, 3).unwrap().verified());
    }

    #[test]
    fn build_dispatch() {
        let c = ctx(5);
        for id in CONSTRUCTION_IDS {
            let cfg = build(&c, id, &[], DEFAULT_ENUMERATION_CAP).unwrap();
            assert!(cfg.verified(), "{id}: {:?}", cfg.expectations);
            let m = cfg.manifest();
            assert!(m.verified);
            serde_json::to_string(&m).unwrap();
        }
        assert!(build(&c, "nope", &[], DEFAULT_ENUMERATION_CAP).is_err());
    }
}
