//! Command-line front end. One verb per capability: expression evaluation
//! and indicators, bracket-index info, x k matrices and orbits, graded
//! exponentials, vanishing ideals, semialgebraic membership and sandwiches,
//! orbit experiments, and density statistics.
//!
//! All numeric output is exact (rational or radical expression strings);
//! `--decimal N` adds rounded decimals clearly marked inexact. The resolved
//! run configuration is echoed to stderr so every run is reproducible.

use clap::{Args, Parser, Subcommand};
use gplab::brackets::{BracketIndex, Grading, IndexSet};
use gplab::error::Error;
use gplab::genpoly::{indicator_ge0, indicator_interval, indicator_zero, parse as gparse};
use gplab::lie::{
    diagonalize, exp_graded, exp_nilpotent, log_graded, log_unipotent, GradedFrame,
    GradedMatrix,
};
use gplab::mpoly::MPoly;
use gplab::orbits::{
    density_stats, find_fs_subset, fs_set, hitting_times, multiplier_search_torus,
    orbit_to_csv, theorem_a_experiment, torus_orbit, DensityWindow, ZeroSet,
};
use gplab::scalar::{parse_scalar, rational_from_string, ExactScalar, DEFAULT_MAX_BITS};
use gplab::semialg::{
    limit_sandwich, parse_set_spec, sandwich_holds_on_grid, tail_closure, vanishing_ideal,
    PolySequence, SemialgebraicSet,
};
use gplab::timesk;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "gplab",
    version,
    about = "Exact-arithmetic laboratory for generalised polynomials and x k maps",
    disable_help_subcommand = true
)]
struct Cli {
    /// Precision cap in bits for floor/comparison decisions
    /// (overridden by the GENPOLY_MAX_BITS environment variable).
    #[arg(long, global = true)]
    max_bits: Option<u32>,

    /// Also print decimals with this many digits (marked inexact).
    #[arg(long, global = true)]
    decimal: Option<u32>,

    /// Worker-thread cap for the search loops.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generalised-polynomial expression tools.
    Gp {
        #[command(subcommand)]
        sub: GpCmd,
    },
    /// Bracket-index set info.
    Bk {
        #[command(subcommand)]
        sub: BkCmd,
    },
    /// Generalised x k matrices.
    Timesk {
        #[command(subcommand)]
        sub: TimeskCmd,
    },
    /// Graded triangular exponentials and diagonalisation.
    Lie {
        #[command(subcommand)]
        sub: LieCmd,
    },
    /// Degree-bounded vanishing ideals.
    Ideal {
        #[command(subcommand)]
        sub: IdealCmd,
    },
    /// Semialgebraic sets.
    Semialg {
        #[command(subcommand)]
        sub: SemialgCmd,
    },
    /// Orbit experiments.
    Orbit {
        #[command(subcommand)]
        sub: OrbitCmd,
    },
    /// Density statistics of a subset of [1, N].
    Density(DensityArgs),
}

#[derive(Subcommand)]
enum GpCmd {
    /// Evaluate an expression at an integer n or an exact point.
    Eval {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        n: Option<i64>,
        /// Comma-separated exact coordinates, e.g. "1/2,sqrt(2)".
        #[arg(long)]
        point: Option<String>,
    },
    /// Build a {0,1}-valued indicator of a sign condition on N.
    Indicator {
        #[arg(long)]
        expr: String,
        /// ge0 | zero | interval
        #[arg(long, default_value = "ge0")]
        kind: String,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Cross-check against direct evaluation on n = 1..=N.
        #[arg(long)]
        verify: Option<i64>,
    },
}

#[derive(Subcommand)]
enum BkCmd {
    /// Members, canonical order, degrees, heights and complexity vector.
    Info(DsetArgs),
}

#[derive(Args, Clone)]
struct DsetArgs {
    /// Index members, comma separated (e.g. "1[2],2[1],3"), or "running".
    #[arg(long = "d")]
    dspec: String,
    /// Leaf degrees like "1=1,2=1,3=2" (unneeded for "running").
    #[arg(long)]
    grades: Option<String>,
    /// Close the member list downward instead of requiring closure.
    #[arg(long, default_value_t = true)]
    close: bool,
}

#[derive(Subcommand)]
enum TimeskCmd {
    /// Build A_k(x) (and b_k, T_k when x lies in the unit box).
    Build {
        #[command(flatten)]
        dset: DsetArgs,
        #[arg(long)]
        k: u64,
        /// Exact coordinates of x over the canonical order.
        #[arg(long)]
        x: Option<String>,
        /// Alternatively alpha coefficients and t: x = v^alpha(t).
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        t: Option<i64>,
    },
    /// Run the identity suite (intertwining, commutation, cocycle,
    /// structure, dependency) and print one PASS/FAIL line each.
    Check {
        #[command(flatten)]
        dset: DsetArgs,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 4)]
        k: u64,
        #[arg(long, default_value_t = 8)]
        m: u64,
        /// Random rational points per identity.
        #[arg(long, default_value_t = 25)]
        count: usize,
    },
    /// Iterate T_k and print the orbit as CSV.
    Orbit {
        #[command(flatten)]
        dset: DsetArgs,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        x0: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum LieCmd {
    /// Exponential: nilpotent (no scale) or graded with E = e^t.
    Exp {
        /// JSON matrix {d, augmented, entries} for the strictly lower Z.
        #[arg(long)]
        z: String,
        /// E = e^t as an exact scalar; omit for the unipotent exponential.
        #[arg(long)]
        scale: Option<String>,
        /// Emit entries as coefficient lists in E instead of numbers.
        #[arg(long, default_value_t = false)]
        symbolic: bool,
    },
    /// Logarithm: unipotent or graded (prints the scale and Z).
    Log {
        #[arg(long)]
        a: String,
    },
    /// Unipotent transition matrix P with P^-1 A P diagonal.
    Diag {
        #[arg(long)]
        a: String,
    },
}

#[derive(Subcommand)]
enum IdealCmd {
    /// Vanishing ideal of a point list at a degree bound.
    Fit {
        /// Points "x1,x2;x1,x2;..." with exact coordinates.
        #[arg(long)]
        points: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Tail-stabilization scan of the vanishing ideal of a sequence.
    Tail {
        #[arg(long)]
        points: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// Tail start indices, e.g. "0,4,8".
        #[arg(long)]
        tails: String,
    },
}

#[derive(Subcommand)]
enum SemialgCmd {
    /// Exact membership of a point.
    Member {
        /// Set spec, e.g. "0.55<x_1<0.61" or "x_2-x_1^2==0;x_1>0|x_1<0-1".
        #[arg(long = "set")]
        set_spec: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Limit sandwich R, U for one of the documented families.
    Sandwich {
        /// shrinking-disc | halfline | constant
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 30)]
        n: u64,
        #[arg(long, default_value = "1/8")]
        tol: String,
    },
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Torus orbit ({k^n x}) as CSV, with optional hit mask.
    Run {
        /// Comma-separated exact coordinates of x.
        #[arg(long)]
        x: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: usize,
        /// Optional set spec; adds a `hit` column.
        #[arg(long = "set")]
        set_spec: Option<String>,
    },
    /// Torus multiplier search: all l <= lmax with {l k^n x} in S on the window.
    Search {
        #[arg(long)]
        x: String,
        #[arg(long)]
        k: u64,
        #[arg(long = "S")]
        set_spec: String,
        #[arg(long, default_value_t = 0)]
        n0: u64,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        lmax: u64,
    },
    /// Generalised multiplier experiment over v^alpha and T_k.
    #[command(name = "thmA", alias = "thma")]
    ThmA {
        #[command(flatten)]
        dset: DsetArgs,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        mmax: u64,
        #[arg(long, default_value_t = 0)]
        n0: u64,
        #[arg(long)]
        n1: u64,
        /// Semialgebraic target set over the D coordinates.
        #[arg(long = "S")]
        set_spec: Option<String>,
        /// Alternatively, the zero set of a generalised polynomial.
        #[arg(long = "zero-g")]
        zero_g: Option<String>,
    },
}

#[derive(Args)]
struct DensityArgs {
    /// Arithmetic progression a*N + b: modulus a.
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long, default_value_t = 0)]
    offset: u64,
    /// Alternatively an explicit comma-separated member list.
    #[arg(long)]
    members: Option<String>,
    #[arg(long)]
    n: usize,
    /// FS-subset probe order (0 disables).
    #[arg(long, default_value_t = 0)]
    fs_order: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through its own error path
            let code = if e.use_stderr() { 64 } else { 0 };
            e.print().ok();
            std::process::exit(code);
        }
    };
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .ok();
    }
    let max_bits = std::env::var("GENPOLY_MAX_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .or(cli.max_bits)
        .unwrap_or(DEFAULT_MAX_BITS);
    let decimal = cli.decimal;
    match run(cli, max_bits, decimal) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::PremiseViolated(_) => 2,
                Error::IndeterminateFloor { .. } | Error::IndeterminateComparison { .. } => 3,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn echo_config(v: serde_json::Value) {
    eprintln!("config: {v}");
}

fn scalar_list(text: &str) -> Result<Vec<ExactScalar>, Error> {
    text.split(',')
        .map(|s| parse_scalar(s.trim()))
        .collect()
}

fn show_scalar(v: &ExactScalar, decimal: Option<u32>) -> String {
    match decimal {
        Some(d) => format!("{v} (~ {} inexact)", v.to_decimal(d)),
        None => v.to_string(),
    }
}

fn parse_dset(args: &DsetArgs) -> Result<IndexSet, Error> {
    if args.dspec == "running" {
        return Ok(IndexSet::running_example());
    }
    let members = args
        .dspec
        .split(',')
        .map(|s| BracketIndex::parse(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let grades = args
        .grades
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("--grades is required".into()))?;
    let mut pairs = Vec::new();
    for item in grades.split(',') {
        let (l, d) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("bad grade `{item}`")))?;
        pairs.push((
            l.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad leaf `{l}`")))?,
            d.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad degree `{d}`")))?,
        ));
    }
    let grading = Grading::new(&pairs)?;
    if args.close {
        IndexSet::closure(members, grading)
    } else {
        IndexSet::new(members, grading)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct LieMatrixJson {
    d: gplab::brackets::IndexSetJson,
    augmented: bool,
    entries: Vec<Vec<String>>,
}

fn lie_matrix_from_json(text: &str) -> Result<GradedMatrix<ExactScalar>, Error> {
    let j: LieMatrixJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("bad matrix JSON: {e}")))?;
    let dset = IndexSet::from_json(&j.d)?;
    let frame = if j.augmented {
        GradedFrame::augmented(dset)
    } else {
        GradedFrame::plain(dset)
    };
    if j.entries.len() != frame.dim() || j.entries.iter().any(|r| r.len() != frame.dim()) {
        return Err(Error::InvalidInput("matrix shape mismatch".into()));
    }
    let entries = j
        .entries
        .iter()
        .map(|row| row.iter().map(|s| parse_scalar(s)).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(GradedMatrix { frame, entries })
}

fn lie_matrix_to_json(m: &GradedMatrix<ExactScalar>) -> LieMatrixJson {
    LieMatrixJson {
        d: m.frame.dset.to_json(),
        augmented: m.frame.augmented,
        entries: m
            .entries
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect(),
    }
}

fn points_list(text: &str, dim: usize) -> Result<Vec<Vec<ExactScalar>>, Error> {
    text.split(';')
        .map(|p| {
            let coords = scalar_list(p)?;
            if coords.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point `{p}` does not have {dim} coordinates"
                )));
            }
            Ok(coords)
        })
        .collect()
}

fn run(cli: Cli, max_bits: u32, decimal: Option<u32>) -> Result<(), Error> {
    match cli.command {
        Cmd::Gp { sub } => run_gp(sub, max_bits, decimal),
        Cmd::Bk { sub } => run_bk(sub),
        Cmd::Timesk { sub } => run_timesk(sub, max_bits, cli.seed),
        Cmd::Lie { sub } => run_lie(sub),
        Cmd::Ideal { sub } => run_ideal(sub),
        Cmd::Semialg { sub } => run_semialg(sub, max_bits),
        Cmd::Orbit { sub } => run_orbit(sub, max_bits),
        Cmd::Density(args) => run_density(args),
    }
}

fn run_gp(cmd: GpCmd, max_bits: u32, decimal: Option<u32>) -> Result<(), Error> {
    match cmd {
        GpCmd::Eval { expr, n, point } => {
            let g = gparse(&expr)?;
            let pt = match (&n, &point) {
                (Some(n), None) => vec![ExactScalar::from_int(*n)],
                (None, Some(p)) => scalar_list(p)?,
                _ => {
                    return Err(Error::InvalidInput(
                        "give exactly one of --n or --point".into(),
                    ))
                }
            };
            echo_config(json!({"cmd": "gp eval", "expr": expr, "point":
                pt.iter().map(|v| v.to_string()).collect::<Vec<_>>(), "max_bits": max_bits}));
            let v = g.eval(&pt, max_bits)?;
            println!("{}", show_scalar(&v, decimal));
            Ok(())
        }
        GpCmd::Indicator {
            expr,
            kind,
            a,
            b,
            verify,
        } => {
            let g = gparse(&expr)?;
            let ind = match kind.as_str() {
                "ge0" => indicator_ge0(&g)?,
                "zero" => indicator_zero(&g)?,
                "interval" => {
                    let a = parse_scalar(
                        a.as_deref()
                            .ok_or_else(|| Error::InvalidInput("--a required".into()))?,
                    )?;
                    let b = parse_scalar(
                        b.as_deref()
                            .ok_or_else(|| Error::InvalidInput("--b required".into()))?,
                    )?;
                    indicator_interval(&g, &a, &b)?
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown indicator kind `{other}`"
                    )))
                }
            };
            echo_config(json!({"cmd": "gp indicator", "expr": expr, "kind": kind,
                "verify": verify, "max_bits": max_bits}));
            println!("{}", ind.unparse());
            if let Some(nmax) = verify {
                for n in 1..=nmax {
                    let got = ind.eval_at_int(n, max_bits)?;
                    let direct = g.eval_at_int(n, max_bits)?;
                    let expected = match kind.as_str() {
                        "ge0" => i64::from(direct.sign(max_bits)? != std::cmp::Ordering::Less),
                        "zero" => i64::from(direct.is_zero()),
                        _ => {
                            // interval: recheck through the two bounds
                            let a = parse_scalar(a.as_deref().unwrap())?;
                            let b = parse_scalar(b.as_deref().unwrap())?;
                            i64::from(
                                direct.compare(&a, max_bits)? != std::cmp::Ordering::Less
                                    && direct.compare(&b, max_bits)?
                                        == std::cmp::Ordering::Less,
                            )
                        }
                    };
                    if got != ExactScalar::from_int(expected) {
                        return Err(Error::InvalidInput(format!(
                            "indicator mismatch at n={n}"
                        )));
                    }
                }
                println!("verified on n = 1..={nmax}");
            }
            Ok(())
        }
    }
}

fn run_bk(cmd: BkCmd) -> Result<(), Error> {
    match cmd {
        BkCmd::Info(args) => {
            let d = parse_dset(&args)?;
            echo_config(json!({"cmd": "bk info", "d": args.dspec}));
            let members: Vec<serde_json::Value> = d
                .members()
                .iter()
                .map(|m| {
                    json!({
                        "index": m.to_string(),
                        "degree": d.degree(m).unwrap(),
                        "height": m.height(),
                    })
                })
                .collect();
            let out = json!({
                "set": d.to_json(),
                "members": members,
                "complexity_vector": d.complexity_vector(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(())
        }
    }
}

fn v_alpha_point(
    d: &IndexSet,
    alpha: &[ExactScalar],
    t: i64,
    max_bits: u32,
) -> Result<Vec<ExactScalar>, Error> {
    let amap = gplab::brackets::alpha_map(d, alpha)?;
    gplab::brackets::v_vector(d, &amap, &ExactScalar::from_int(t), max_bits)
}

fn run_timesk(cmd: TimeskCmd, max_bits: u32, seed: u64) -> Result<(), Error> {
    match cmd {
        TimeskCmd::Build {
            dset,
            k,
            x,
            alpha,
            t,
        } => {
            let d = parse_dset(&dset)?;
            let point = match (&x, &alpha) {
                (Some(x), None) => scalar_list(x)?,
                (None, Some(a)) => {
                    let alpha = scalar_list(a)?;
                    v_alpha_point(&d, &alpha, t.unwrap_or(1), max_bits)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "give exactly one of --x or --alpha".into(),
                    ))
                }
            };
            echo_config(json!({"cmd": "timesk build", "d": dset.dspec, "k": k,
                "x": point.iter().map(|v| v.to_string()).collect::<Vec<_>>()}));
            let a = timesk::build_a(&d, k, &point, max_bits)?;
            let in_box = point.iter().all(|c| {
                c.sign(max_bits).map(|s| s != std::cmp::Ordering::Less).unwrap_or(false)
                    && c.compare(&ExactScalar::one(), max_bits)
                        .map(|o| o == std::cmp::Ordering::Less)
                        .unwrap_or(false)
            });
            let j = if in_box {
                let out = timesk::t_k(&d, k, &point, max_bits)?;
                out.matrix.to_json(Some(&out.b))
            } else {
                a.to_json(None)
            };
            println!("{}", serde_json::to_string_pretty(&j).unwrap());
            Ok(())
        }
        TimeskCmd::Check {
            dset,
            alpha,
            k,
            m,
            count,
        } => {
            let d = parse_dset(&dset)?;
            let alpha = match alpha {
                Some(a) => Some(scalar_list(&a)?),
                None => None,
            };
            echo_config(json!({"cmd": "timesk check", "d": dset.dspec, "k": k,
                "m": m, "count": count, "seed": seed}));
            run_identity_suite(&d, alpha.as_deref(), k, m, count, seed, max_bits)
        }
        TimeskCmd::Orbit { dset, k, x0, n } => {
            let d = parse_dset(&dset)?;
            let x0 = scalar_list(&x0)?;
            echo_config(json!({"cmd": "timesk orbit", "d": dset.dspec, "k": k, "n": n}));
            let orbit = timesk::iterate_t(&d, k, &x0, n, max_bits)?;
            let names: Vec<String> = d.members().iter().map(|m| m.to_string()).collect();
            print!("{}", orbit_to_csv(&orbit, &names));
            Ok(())
        }
    }
}

/// The executable identity suite behind `timesk check`.
fn run_identity_suite(
    d: &IndexSet,
    alpha: Option<&[ExactScalar]>,
    kmax: u64,
    mmax: u64,
    count: usize,
    seed: u64,
    max_bits: u32,
) -> Result<(), Error> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut report = |name: &str, ok: bool| {
        println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };
    let nleaves = d.leaves().len();
    let rand_alpha = |rng: &mut StdRng| -> Vec<ExactScalar> {
        (0..nleaves)
            .map(|_| ExactScalar::ratio(rng.gen_range(-50i64..=50), rng.gen_range(1i64..=50)))
            .collect()
    };
    let rand_point = |rng: &mut StdRng| -> Vec<ExactScalar> {
        (0..d.len())
            .map(|_| {
                let den = rng.gen_range(1i64..=60);
                ExactScalar::ratio(rng.gen_range(0..den.max(1)), den)
            })
            .collect()
    };

    // intertwining: S_k(v^alpha(m)) = v^alpha(km)
    let mut ok = true;
    for trial in 0..count.max(1) {
        let a = match (trial, alpha) {
            (0, Some(a)) => a.to_vec(),
            _ => rand_alpha(&mut rng),
        };
        for k in 1..=kmax {
            for m in 1..=mmax {
                let x = v_alpha_point(d, &a, m as i64, max_bits)?;
                let s = timesk::s_k(d, k, &x, max_bits)?;
                let expect = v_alpha_point(d, &a, (k * m) as i64, max_bits)?;
                if s != expect {
                    ok = false;
                }
            }
        }
    }
    report("intertwining S_k(v^alpha(m)) = v^alpha(km)", ok);

    // commutation and cocycle
    let mut ok_commute = true;
    let mut ok_cocycle = true;
    for _ in 0..count.max(1) {
        let x = rand_point(&mut rng);
        for k in 2..=kmax.min(6) {
            for l in 2..=kmax.min(6) {
                let tl = timesk::t_k(d, l, &x, max_bits)?.image;
                let tkl1 = timesk::t_k(d, k, &tl, max_bits)?.image;
                let tk = timesk::t_k(d, k, &x, max_bits)?.image;
                let tkl2 = timesk::t_k(d, l, &tk, max_bits)?.image;
                let direct = timesk::t_k(d, k * l, &x, max_bits)?.image;
                if tkl1 != direct || tkl2 != direct {
                    ok_commute = false;
                }
                let al = timesk::build_a(d, l, &x, max_bits)?;
                let sl = al.mat_vec(&x);
                let ak = timesk::build_a(d, k, &sl, max_bits)?;
                let akl = timesk::build_a(d, k * l, &x, max_bits)?;
                if ak.mat_mul(&al) != akl.entries {
                    ok_cocycle = false;
                }
            }
        }
    }
    report("commutation T_k T_l = T_l T_k = T_kl", ok_commute);
    report("cocycle A_k(S_l(x)) A_l(x) = A_kl(x)", ok_cocycle);

    // structure invariants
    let mut ok = true;
    for _ in 0..count.max(1) {
        let x = rand_point(&mut rng);
        for k in 1..=kmax {
            let a = timesk::build_a(d, k, &x, max_bits)?;
            if !(a.is_lower_triangular()
                && a.has_standard_diagonal()
                && a.has_column_divisibility())
            {
                ok = false;
            }
        }
    }
    report("structure: triangular, diagonal k^d, column divisibility", ok);

    // dependency: perturbing out-of-cone coordinates leaves entries fixed
    let mut ok = true;
    for _ in 0..count.max(1) {
        let x = rand_point(&mut rng);
        let k = 2 + (rng.gen_range(0..kmax.max(2) - 1));
        let a = timesk::build_a(d, k, &x, max_bits)?;
        for (xi_pos, xi) in d.members().iter().enumerate() {
            let mut y = x.clone();
            let den = rng.gen_range(1i64..=60);
            y[xi_pos] = ExactScalar::ratio(rng.gen_range(0..den.max(1)), den);
            let b = timesk::build_a(d, k, &y, max_bits)?;
            for (i, mu) in d.members().iter().enumerate() {
                for j in 0..d.len() {
                    let protected = gplab::brackets::degree(xi, d.grading()).unwrap()
                        + d.degree_at(j)
                        > d.degree_at(i)
                        || xi.height() >= mu.height();
                    if protected && a.entries[i][j] != b.entries[i][j] {
                        ok = false;
                    }
                }
            }
        }
    }
    report("dependency bounds of entries on coordinates", ok);

    if failures > 0 {
        Err(Error::InvalidInput(format!("{failures} identity check(s) failed")))
    } else {
        Ok(())
    }
}

fn run_lie(cmd: LieCmd) -> Result<(), Error> {
    match cmd {
        LieCmd::Exp { z, scale, symbolic } => {
            let zm = lie_matrix_from_json(&z)?;
            echo_config(json!({"cmd": "lie exp", "scale": scale, "symbolic": symbolic}));
            match (scale, symbolic) {
                (None, false) => {
                    let a = exp_nilpotent(&zm)?;
                    println!("{}", serde_json::to_string_pretty(&lie_matrix_to_json(&a)).unwrap());
                }
                (Some(s), false) => {
                    let e = parse_scalar(&s)?;
                    let a = exp_graded(&e, &zm)?;
                    println!("{}", serde_json::to_string_pretty(&lie_matrix_to_json(&a)).unwrap());
                }
                (_, true) => {
                    // entries in Q[E], serialized as coefficient lists
                    for row in &zm.entries {
                        for v in row {
                            if !v.is_zero() && v.as_rational().is_none() {
                                return Err(Error::InvalidInput(
                                    "symbolic exp requires rational entries".into(),
                                ));
                            }
                        }
                    }
                    let ep = MPoly::var(1, 0);
                    let zp = zm.transform(|v| match v.as_rational() {
                        Some(q) => MPoly::constant(1, q.clone()),
                        None => MPoly::zero(1),
                    });
                    let a = exp_graded(&ep, &zp)?;
                    let coeffs: Vec<Vec<Vec<String>>> = a
                        .entries
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|p| {
                                    let deg = p.degree();
                                    (0..=deg)
                                        .map(|i| {
                                            gplab::scalar::rational_to_string(
                                                &p.coeff(&vec![i]),
                                            )
                                        })
                                        .collect()
                                })
                                .collect()
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "d": zm.frame.dset.to_json(),
                            "augmented": zm.frame.augmented,
                            "entries_coeffs_in_E": coeffs,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(())
        }
        LieCmd::Log { a } => {
            let am = lie_matrix_from_json(&a)?;
            echo_config(json!({"cmd": "lie log"}));
            if am.is_unipotent() {
                let z = log_unipotent(&am)?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "kind": "unipotent",
                        "z": lie_matrix_to_json(&z),
                    }))
                    .unwrap()
                );
            } else {
                let (e, z) = log_graded(&am)?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "kind": "graded",
                        "scale": e.to_string(),
                        "z": lie_matrix_to_json(&z),
                    }))
                    .unwrap()
                );
            }
            Ok(())
        }
        LieCmd::Diag { a } => {
            let am = lie_matrix_from_json(&a)?;
            echo_config(json!({"cmd": "lie diag"}));
            let p = diagonalize(&am)?;
            println!("{}", serde_json::to_string_pretty(&lie_matrix_to_json(&p)).unwrap());
            Ok(())
        }
    }
}

fn ideal_to_json(b: &gplab::semialg::IdealBasis) -> serde_json::Value {
    json!({
        "dim": b.dim,
        "degree_bound": b.degree_bound,
        "monomial_order": "grlex",
        "basis": b.basis.iter().map(|f| json!({
            "poly": f.to_string(),
            "sparse": f.to_sparse_map(),
        })).collect::<Vec<_>>(),
    })
}

fn run_ideal(cmd: IdealCmd) -> Result<(), Error> {
    match cmd {
        IdealCmd::Fit { points, dim, degree } => {
            let pts = points_list(&points, dim)?;
            echo_config(json!({"cmd": "ideal fit", "dim": dim, "degree": degree,
                "points": pts.len()}));
            let b = vanishing_ideal(&pts, dim, degree)?;
            println!("{}", serde_json::to_string_pretty(&ideal_to_json(&b)).unwrap());
            Ok(())
        }
        IdealCmd::Tail {
            points,
            dim,
            degree,
            tails,
        } => {
            let pts = points_list(&points, dim)?;
            let tails: Vec<usize> = tails
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad tail `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            echo_config(json!({"cmd": "ideal tail", "dim": dim, "degree": degree,
                "tails": tails}));
            let (b, report) = tail_closure(&pts, &tails, dim, degree)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "basis": ideal_to_json(&b),
                    "report": report,
                }))
                .unwrap()
            );
            Ok(())
        }
    }
}

fn sandwich_family(
    name: &str,
    n: u64,
) -> Result<(Vec<PolySequence>, Box<dyn Fn(u64) -> Vec<MPoly>>), Error> {
    let var = MPoly::var(1, 0);
    let rat1 = |i: i64| BigRational::new(BigInt::from(1), BigInt::from(i));
    match name {
        "shrinking-disc" => {
            let terms: Vec<MPoly> = (1..=n as i64)
                .map(|i| MPoly::constant(1, rat1(i)).sub(&MPoly::var(1, 0).pow(2)))
                .collect();
            let seq = PolySequence {
                terms,
                limit: var.pow(2).neg(),
            };
            Ok((
                vec![seq],
                Box::new(move |i| {
                    vec![MPoly::constant(
                        1,
                        BigRational::new(BigInt::from(1), BigInt::from(i as i64)),
                    )
                    .sub(&MPoly::var(1, 0).pow(2))]
                }),
            ))
        }
        "halfline" => {
            let terms: Vec<MPoly> = (1..=n as i64)
                .map(|i| MPoly::var(1, 0).sub(&MPoly::constant(1, rat1(i))))
                .collect();
            let seq = PolySequence {
                terms,
                limit: var.clone(),
            };
            Ok((
                vec![seq],
                Box::new(move |i| {
                    vec![MPoly::var(1, 0).sub(&MPoly::constant(
                        1,
                        BigRational::new(BigInt::from(1), BigInt::from(i as i64)),
                    ))]
                }),
            ))
        }
        "constant" => {
            let seq = PolySequence {
                terms: vec![var.clone(); n as usize],
                limit: var.clone(),
            };
            Ok((vec![seq], Box::new(|_| vec![MPoly::var(1, 0)])))
        }
        other => Err(Error::InvalidInput(format!("unknown family `{other}`"))),
    }
}

fn run_semialg(cmd: SemialgCmd, max_bits: u32) -> Result<(), Error> {
    match cmd {
        SemialgCmd::Member { set_spec, x, dim } => {
            let s = parse_set_spec(&set_spec, dim)?;
            let pt = scalar_list(&x)?;
            echo_config(json!({"cmd": "semialg member", "set": set_spec,
                "dim": s.dim, "complexity": s.complexity()}));
            println!("{}", s.contains(&pt, max_bits)?);
            Ok(())
        }
        SemialgCmd::Sandwich { family, n, tol } => {
            let tolq = rational_from_string(&tol)?;
            let (seqs, seq_fn) = sandwich_family(&family, n)?;
            echo_config(json!({"cmd": "semialg sandwich", "family": family,
                "n": n, "tol": tol}));
            let (r, u) = limit_sandwich(&seqs, 1, &tolq)?;
            let grid: Vec<Vec<BigRational>> = (-50..=50)
                .map(|i| vec![BigRational::new(BigInt::from(i), BigInt::from(7))])
                .collect();
            let probes: Vec<u64> = (1..=(4 * n.max(30))).collect();
            let ok = sandwich_holds_on_grid(&*seq_fn, &r, &u, &grid, &probes, max_bits)?;
            let fmt_set = |s: &SemialgebraicSet| -> Vec<serde_json::Value> {
                s.pieces
                    .iter()
                    .map(|p| {
                        json!({
                            "equalities": p.equalities.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                            "inequalities": p.inequalities.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect()
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "R": fmt_set(&r),
                    "U": fmt_set(&u),
                    "complexity": {"R": r.complexity(), "U": u.complexity()},
                    "sandwich_verified_on_grid": ok,
                }))
                .unwrap()
            );
            Ok(())
        }
    }
}

fn run_orbit(cmd: OrbitCmd, max_bits: u32) -> Result<(), Error> {
    match cmd {
        OrbitCmd::Run { x, k, n, set_spec } => {
            let x = scalar_list(&x)?;
            echo_config(json!({"cmd": "orbit run", "k": k, "n": n, "d": x.len()}));
            let orbit = torus_orbit(&x, k, n, max_bits)?;
            let names: Vec<String> =
                (1..=x.len()).map(|i| format!("x_{i}")).collect();
            match set_spec {
                None => print!("{}", orbit_to_csv(&orbit, &names)),
                Some(spec) => {
                    let s = parse_set_spec(&spec, Some(x.len()))?;
                    let (hits, events) = hitting_times(&orbit, &s, max_bits);
                    let hitset: std::collections::BTreeSet<usize> =
                        hits.into_iter().collect();
                    print!("n");
                    for nm in &names {
                        print!(",{nm}");
                    }
                    println!(",hit");
                    for (i, p) in orbit.iter().enumerate() {
                        print!("{i}");
                        for c in p {
                            print!(",{c}");
                        }
                        println!(",{}", u8::from(hitset.contains(&i)));
                    }
                    for (i, e) in events {
                        eprintln!("indeterminate at n={i}: {e}");
                    }
                }
            }
            Ok(())
        }
        OrbitCmd::Search {
            x,
            k,
            set_spec,
            n0,
            n1,
            lmax,
        } => {
            let xs = scalar_list(&x)?;
            let s = parse_set_spec(&set_spec, Some(xs.len()))?;
            echo_config(json!({"cmd": "orbit search", "x": x, "k": k,
                "S": set_spec, "n_window": [n0, n1], "lmax": lmax,
                "max_bits": max_bits}));
            let report = multiplier_search_torus(&xs, &s, k, (n0, n1), lmax, max_bits)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(())
        }
        OrbitCmd::ThmA {
            dset,
            alpha,
            k,
            mmax,
            n0,
            n1,
            set_spec,
            zero_g,
        } => {
            let d = parse_dset(&dset)?;
            let alpha = scalar_list(&alpha)?;
            let zs = match (set_spec, zero_g) {
                (Some(spec), None) => {
                    ZeroSet::Semialgebraic(parse_set_spec(&spec, Some(d.len()))?)
                }
                (None, Some(g)) => ZeroSet::GenPolyZero(gparse(&g)?),
                _ => {
                    return Err(Error::InvalidInput(
                        "give exactly one of --S or --zero-g".into(),
                    ))
                }
            };
            echo_config(json!({"cmd": "orbit thmA", "d": dset.dspec, "k": k,
                "mmax": mmax, "n_window": [n0, n1], "max_bits": max_bits}));
            let report =
                theorem_a_experiment(&d, &alpha, &zs, k, mmax, (n0, n1), max_bits)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(())
        }
    }
}

fn run_density(args: DensityArgs) -> Result<(), Error> {
    let members: Vec<u64> = match (&args.modulus, &args.members) {
        (Some(a), None) => {
            if *a == 0 {
                return Err(Error::InvalidInput("modulus must be positive".into()));
            }
            (1..=args.n as u64)
                .filter(|v| v % a == args.offset % a)
                .collect()
        }
        (None, Some(list)) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad member `{s}`")))
            })
            .collect::<Result<_, _>>()?,
        _ => {
            return Err(Error::InvalidInput(
                "give exactly one of --modulus or --members".into(),
            ))
        }
    };
    echo_config(json!({"cmd": "density", "n": args.n, "members": members.len()}));
    let w = DensityWindow::from_members(members.iter().copied(), args.n);
    let stats = density_stats(
        &w,
        &BigRational::new(BigInt::from(1), BigInt::from(100)),
    );
    let fs = if args.fs_order > 0 {
        let set: std::collections::BTreeSet<u64> = members.into_iter().collect();
        let found = find_fs_subset(&set, args.fs_order, args.n as u64);
        if let Some(g) = &found {
            let sums = fs_set(g)?;
            if !sums.iter().all(|s| set.contains(s)) {
                return Err(Error::InvalidInput("fs probe self-check failed".into()));
            }
        }
        found
    } else {
        None
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "density": stats,
            "fs_probe": fs,
        }))
        .unwrap()
    );
    Ok(())
}
