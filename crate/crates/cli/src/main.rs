use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use packlab::checks::run_checks;
use packlab::constructions::{self, ConfigSets};
use packlab::fourier::incidence_via_fourier;
use packlab::h1_incidence::{count_incidences_h1, evaluate_bound_h1, H1BoundInputs, H1_THEOREMS};
use packlab::io::{self, MatrixFile, PointFile};
use packlab::packing::{compare, compare_h1, CompareOptions, PACKING_THEOREMS};
use packlab::sl2_incidence::{
    count_incidences, empirical_epsilon, energy1, energy2, evaluate_bound, BoundInputs,
    WeightedSet, SL2_THEOREMS,
};
use packlab::sweep::{self, SweepSpec};
use packlab::{Convention, FieldCtx, H1Elem, MatrixSet, PointSet2, PointSet3, Sl2Elem};

#[derive(Parser)]
#[command(
    name = "packlab",
    version,
    about = "Exact incidence, energy and packing experiments over F_p"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format (sweeps default to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout (a directory for `construct`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suites for each prime.
    Verify {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a bound on sets read from files.
    Bounds {
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        files: SetFiles,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute a packing set and compare it with a lower bound.
    Pack {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        e: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a named configuration with its verified statistics.
    Construct {
        id: String,
        #[arg(long)]
        p: u64,
        /// Integer parameters, comma separated (subgroup orders, line counts, ...).
        #[arg(long, value_delimiter = ',')]
        args: Vec<u64>,
        #[arg(long, default_value_t = packlab::groups::DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Run a JSON sweep spec.
    Sweep {
        spec: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Multiplicative energy of S, or the skew energy of A and B.
    Energy {
        #[arg(long)]
        s: Option<PathBuf>,
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
    },
    /// Count incidences between A × B and S.
    Incidence {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        s: PathBuf,
        /// Also reconstruct the count from Fourier coefficients.
        #[arg(long)]
        fourier: bool,
    },
}

#[derive(Args)]
struct SetFiles {
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long)]
    s: Option<PathBuf>,
    #[arg(long)]
    e: Option<PathBuf>,
    #[arg(long)]
    x: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

impl ParamArgs {
    fn compare_options(&self, seed: Option<u64>) -> CompareOptions {
        CompareOptions {
            k: self.k,
            k1: self.k1,
            k2: self.k2,
            gamma: self.gamma,
            eps: self.eps,
            seed,
        }
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<packlab::Error> for Failure {
    fn from(e: packlab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn json_only(format: Option<Format>) -> CmdResult {
    match format {
        Some(Format::Csv) => Err(Failure::Usage("this command only writes json".into())),
        _ => Ok(()),
    }
}

fn plane(path: &Path) -> Result<PointSet2, Failure> {
    match io::read_points(path)? {
        PointFile::Plane(s) => Ok(s),
        PointFile::Space(_) => Err(Failure::Usage(format!(
            "{}: expected dim=2",
            path.display()
        ))),
    }
}

fn space(path: &Path) -> Result<PointSet3, Failure> {
    match io::read_points(path)? {
        PointFile::Space(s) => Ok(s),
        PointFile::Plane(_) => Err(Failure::Usage(format!(
            "{}: expected dim=3",
            path.display()
        ))),
    }
}

fn sl2_set(path: &Path) -> Result<MatrixSet<Sl2Elem>, Failure> {
    match io::read_matrices(path)? {
        MatrixFile::Sl2(s) => Ok(s),
        MatrixFile::H1(..) => Err(Failure::Usage(format!(
            "{}: expected group=sl2",
            path.display()
        ))),
    }
}

fn h1_set(path: &Path) -> Result<MatrixSet<H1Elem>, Failure> {
    match io::read_matrices(path)? {
        MatrixFile::H1(s, _) => Ok(s),
        MatrixFile::Sl2(_) => Err(Failure::Usage(format!(
            "{}: expected an h1 group",
            path.display()
        ))),
    }
}

fn opt<T>(
    path: &Option<PathBuf>,
    read: impl Fn(&Path) -> Result<T, Failure>,
) -> Result<Option<T>, Failure> {
    path.as_deref().map(read).transpose()
}

/// The common modulus of every input, which must agree.
fn modulus(ps: &[u64]) -> Result<FieldCtx, Failure> {
    let first = *ps
        .first()
        .ok_or_else(|| Failure::Usage("no input files given".into()))?;
    if let Some(&q) = ps.iter().find(|&&q| q != first) {
        return Err(packlab::Error::MixedModulus(first, q).into());
    }
    Ok(FieldCtx::new(first)?)
}

fn cmd_verify(ps: &[u64], seed: u64, format: Option<Format>, out: Option<&Path>) -> CmdResult {
    let mut text = String::new();
    if format == Some(Format::Csv) {
        text.push_str("check,p,passed,elapsed_ms,detail\n");
    }
    let mut first_failure = None;
    for &p in ps {
        for r in run_checks(p, seed)? {
            if !r.passed && first_failure.is_none() {
                first_failure = Some(format!(
                    "{} failed at p={}: {}",
                    r.check,
                    r.p,
                    r.detail.clone().unwrap_or_default()
                ));
            }
            match format {
                Some(Format::Csv) => text.push_str(&format!(
                    "{},{},{},{:.3},{}\n",
                    r.check,
                    r.p,
                    r.passed,
                    r.elapsed_ms,
                    r.detail.clone().unwrap_or_default().replace(',', ";")
                )),
                _ => text.push_str(&(serde_json::to_string(&r)? + "\n")),
            }
        }
    }
    emit(out, &text)?;
    match first_failure {
        Some(msg) => Err(Failure::Check(msg)),
        None => {
            eprintln!("all checks passed for p in {ps:?}");
            Ok(())
        }
    }
}

fn cmd_bounds(
    theorem: &str,
    files: &SetFiles,
    params: &ParamArgs,
    seed: Option<u64>,
    out: Option<&Path>,
) -> CmdResult {
    if PACKING_THEOREMS.contains(&theorem) {
        if theorem == "thm-1.5" {
            let x = opt(&files.x, h1_set)?.ok_or(packlab::Error::MissingParam("X"))?;
            let e = opt(&files.e, space)?.ok_or(packlab::Error::MissingParam("E"))?;
            let ctx = modulus(&[x.p(), e.p()])?;
            let r = compare_h1(&ctx, &x, &e, &params.compare_options(seed))?;
            return emit(out, &to_json(&r)?);
        }
        let s = opt(&files.s, sl2_set)?.ok_or(packlab::Error::MissingParam("S"))?;
        let e = opt(&files.e, plane)?.ok_or(packlab::Error::MissingParam("E"))?;
        let ctx = modulus(&[s.p(), e.p()])?;
        let r = compare(&ctx, &s, &e, theorem, &params.compare_options(seed))?;
        return emit(out, &to_json(&r)?);
    }
    if H1_THEOREMS.contains(&theorem) {
        let inputs = H1BoundInputs {
            a: opt(&files.a, space)?,
            b: opt(&files.b, space)?,
            x: opt(&files.x, h1_set)?,
            e: opt(&files.e, space)?,
            eps: params.eps,
        };
        let mut ps: Vec<u64> = [&inputs.a, &inputs.b, &inputs.e]
            .iter()
            .filter_map(|s| s.as_ref().map(|s| s.p()))
            .collect();
        ps.extend(inputs.x.as_ref().map(|x| x.p()));
        let ctx = modulus(&ps)?;
        let r = evaluate_bound_h1(&ctx, theorem, &inputs)?;
        return emit(out, &to_json(&r)?);
    }
    if !SL2_THEOREMS.contains(&theorem) {
        return Err(packlab::Error::UnknownTheorem(theorem.to_string()).into());
    }
    let e = opt(&files.e, plane)?;
    let inputs = BoundInputs {
        a: opt(&files.a, plane)?,
        b: opt(&files.b, plane)?,
        s: opt(&files.s, sl2_set)?,
        points: e.as_ref().map(|e| WeightedSet::uniform(e.iter())),
        lines: None,
        k: params.k,
        k1: params.k1,
        k2: params.k2,
        gamma: params.gamma,
        eps: params.eps,
    };
    let mut ps: Vec<u64> = [&inputs.a, &inputs.b, &e]
        .iter()
        .filter_map(|s| s.as_ref().map(|s| s.p()))
        .collect();
    ps.extend(inputs.s.as_ref().map(|s| s.p()));
    let ctx = modulus(&ps)?;
    let r = evaluate_bound(&ctx, theorem, &inputs)?;
    emit(out, &to_json(&r)?)
}

fn cmd_pack(
    theorem: &str,
    s: &Path,
    e: &Path,
    params: &ParamArgs,
    seed: Option<u64>,
    out: Option<&Path>,
) -> CmdResult {
    let r = match (io::read_matrices(s)?, io::read_points(e)?) {
        (MatrixFile::Sl2(s), PointFile::Plane(e)) => {
            let ctx = modulus(&[s.p(), e.p()])?;
            compare(&ctx, &s, &e, theorem, &params.compare_options(seed))?
        }
        (MatrixFile::H1(x, _), PointFile::Space(e)) => {
            let ctx = modulus(&[x.p(), e.p()])?;
            compare_h1(&ctx, &x, &e, &params.compare_options(seed))?
        }
        _ => {
            return Err(Failure::Usage(
                "S and E files belong to different groups".into(),
            ))
        }
    };
    emit(out, &to_json(&r)?)
}

fn cmd_construct(id: &str, p: u64, args: &[u64], cap: u64, out: Option<&Path>) -> CmdResult {
    let ctx = FieldCtx::new(p)?;
    let cfg = constructions::build(&ctx, id, args, cap)?;
    let manifest = cfg.manifest();
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let stem = format!("{id}-p{p}");
            let write =
                |suffix: &str, text: String| fs::write(dir.join(format!("{stem}.{suffix}")), text);
            match &cfg.sets {
                ConfigSets::Sl2 { s, e, aux } => {
                    write("S.txt", io::format_sl2(s))?;
                    write("E.txt", io::format_points2(e))?;
                    if let Some(aux) = aux {
                        write("aux.txt", io::format_points2(aux))?;
                    }
                }
                ConfigSets::H1 { x, e } => {
                    write("X.txt", io::format_h1(x, Convention::Matrix))?;
                    write("E.txt", io::format_points3(e))?;
                }
            }
            write("json", to_json(&manifest)?)?;
            eprintln!("wrote {stem}.* to {}", dir.display());
        }
        None => emit(None, &to_json(&manifest)?)?,
    }
    if manifest.verified {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{id}: generated sets miss their expected statistics"
        )))
    }
}

fn cmd_sweep(
    spec: &Path,
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<&Path>,
) -> CmdResult {
    let mut spec = SweepSpec::from_json(&fs::read_to_string(spec)?)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let rows = sweep::run_sweep(&spec)?;
    let text = match format {
        Some(Format::Json) => to_json(&rows)?,
        _ => {
            let mut buf = Vec::new();
            sweep::write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    emit(out, &text)?;
    let mut theorems: Vec<&str> = spec.jobs.iter().map(|j| j.theorem.as_str()).collect();
    theorems.dedup();
    for t in theorems {
        if let Some(m) = sweep::min_ratio(&rows, t) {
            eprintln!(
                "{t}: {} rows, min ratio {m:.6}",
                rows.iter().filter(|r| r.theorem == t).count()
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EnergyReport {
    p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy2: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical_eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy1: Option<u64>,
}

fn cmd_energy(
    s: &Option<PathBuf>,
    a: &Option<PathBuf>,
    b: &Option<PathBuf>,
    out: Option<&Path>,
) -> CmdResult {
    let s = opt(s, sl2_set)?;
    let a = opt(a, plane)?;
    let b = match (opt(b, plane)?, &a) {
        (Some(b), _) => Some(b),
        (None, a) => a.clone(),
    };
    let mut ps: Vec<u64> = s.iter().map(|s| s.p()).collect();
    ps.extend(a.iter().chain(b.iter()).map(|x| x.p()));
    let ctx = modulus(&ps)?;
    let report = EnergyReport {
        p: ctx.p(),
        s_size: s.as_ref().map(|s| s.len()),
        energy2: s.as_ref().map(|s| energy2(&ctx, s)),
        empirical_eps: s.as_ref().map(|s| empirical_epsilon(&ctx, s)),
        energy1: a.as_ref().zip(b.as_ref()).map(|(a, b)| energy1(&ctx, a, b)),
    };
    emit(out, &to_json(&report)?)
}

#[derive(Serialize)]
struct IncidenceReport {
    p: u64,
    a_size: usize,
    b_size: usize,
    s_size: usize,
    exact: u64,
    main_term: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fourier: Option<f64>,
}

fn cmd_incidence(a: &Path, b: &Path, s: &Path, fourier: bool, out: Option<&Path>) -> CmdResult {
    let report = match (
        io::read_points(a)?,
        io::read_points(b)?,
        io::read_matrices(s)?,
    ) {
        (PointFile::Plane(a), PointFile::Plane(b), MatrixFile::Sl2(s)) => {
            let ctx = modulus(&[a.p(), b.p(), s.p()])?;
            let pf = ctx.p() as f64;
            IncidenceReport {
                p: ctx.p(),
                a_size: a.len(),
                b_size: b.len(),
                s_size: s.len(),
                exact: count_incidences(&ctx, &a, &b, &s)?,
                main_term: (a.len() * b.len() * s.len()) as f64 / (pf * pf),
                fourier: if fourier {
                    Some(incidence_via_fourier(&ctx, &a, &b, &s)?)
                } else {
                    None
                },
            }
        }
        (PointFile::Space(a), PointFile::Space(b), MatrixFile::H1(x, _)) => {
            if fourier {
                return Err(Failure::Usage(
                    "--fourier applies to SL2 inputs only".into(),
                ));
            }
            let ctx = modulus(&[a.p(), b.p(), x.p()])?;
            let pf = ctx.p() as f64;
            IncidenceReport {
                p: ctx.p(),
                a_size: a.len(),
                b_size: b.len(),
                s_size: x.len(),
                exact: count_incidences_h1(&ctx, &a, &b, &x)?,
                main_term: (a.len() * b.len() * x.len()) as f64 / (pf * pf * pf),
                fourier: None,
            }
        }
        _ => {
            return Err(Failure::Usage(
                "A, B and S must all be planar/SL2 or all spatial/H1".into(),
            ))
        }
    };
    emit(out, &to_json(&report)?)
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Verify { p, seed } => cmd_verify(p, *seed, cli.format, out),
        Command::Bounds {
            theorem,
            files,
            params,
            seed,
        } => {
            json_only(cli.format)?;
            cmd_bounds(theorem, files, params, *seed, out)
        }
        Command::Pack {
            theorem,
            s,
            e,
            params,
            seed,
        } => {
            json_only(cli.format)?;
            cmd_pack(theorem, s, e, params, *seed, out)
        }
        Command::Construct { id, p, args, cap } => {
            json_only(cli.format)?;
            cmd_construct(id, *p, args, *cap, out)
        }
        Command::Sweep { spec, seed } => cmd_sweep(spec, *seed, cli.format, out),
        Command::Energy { s, a, b } => {
            json_only(cli.format)?;
            cmd_energy(s, a, b, out)
        }
        Command::Incidence { a, b, s, fourier } => {
            json_only(cli.format)?;
            cmd_incidence(a, b, s, *fourier, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
