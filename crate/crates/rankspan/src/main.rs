use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rankspan::affine::{self, AffineMatSubspace, HBoundMode};
use rankspan::error::Error;
use rankspan::ffmat::{Fq, FqMat};
use rankspan::io::{self, LoadedObject};
use rankspan::nilspec;
use rankspan::strata;
use rankspan::subspace::{self, MatSubspace};
use rankspan::verdict::Verdict;
use rankspan::verify;

const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "rankspan",
    version,
    about = "Exact subspaces of matrices over small prime fields: construct named objects, \
             analyze subspace files, run verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Construct,
    Exhaustive,
    Recursive,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a named subspace or coset and write it as JSON.
    ///
    /// Names: sl2_f2, t_upper, t_strict_upper, t_lower, jk, extremal_affine,
    /// unspanned, random.
    Construct {
        name: String,
        #[arg(long, default_value_t = 2)]
        q: u8,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        codim: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Analyze a matrix, subspace, or affine-subspace JSON file.
    Analyze {
        path: PathBuf,
        /// Print the exact rank profile (enumerates all q^dim elements).
        #[arg(long)]
        profile: bool,
        /// Compare the span of the rank-R stratum with the subspace.
        #[arg(long)]
        span: Option<usize>,
        /// Check the zero-spectrum property (square ambient only).
        #[arg(long)]
        spectrum: bool,
        /// Classify a hyperplane of Mat_2(F_2).
        #[arg(long)]
        classify: bool,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Run a verification suite and emit its verdict.
    ///
    /// Suites: oddcase, gerstenhaber, lcinf, exist, condsuff, corhyper,
    /// flanders, hbound, tightness, combin, triangularize.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 2)]
        q: u8,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Subspace dimension for the gerstenhaber scan; default C(n,2)+1.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Write the verdict JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Test hook: corrupt one witness to force a FAIL verdict.
        #[arg(long, hide = true)]
        inject_fail: bool,
    },
}

fn default_budget(flag: Option<u64>) -> u64 {
    if let Some(b) = flag {
        return b;
    }
    std::env::var("RANKSPAN_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(rankspan::DEFAULT_BUDGET)
}

fn need(opt: Option<usize>, flag: &str) -> Result<usize, String> {
    opt.ok_or_else(|| format!("missing required flag --{flag}"))
}

fn verdict_value(verdict: &Verdict) -> serde_json::Value {
    let mut value = serde_json::to_value(verdict).expect("verdict serializes");
    value["version"] = json!(env!("CARGO_PKG_VERSION"));
    value
}

fn print_verdict(verdict: &Verdict, format: Format, out: &Option<PathBuf>) -> Result<(), Error> {
    let value = verdict_value(verdict);
    if let Some(path) = out {
        let text = format!("{}\n", serde_json::to_string_pretty(&value).unwrap());
        std::fs::write(path, text)?;
    }
    match format {
        Format::Json => {
            if out.is_none() {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
        }
        Format::Human => {
            println!("suite:    {}", verdict.suite);
            println!("status:   {}", verdict.status);
            let params = verdict
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            println!("params:   {params}");
            println!("seed:     {}", verdict.seed);
            let counts = verdict
                .counts
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            println!("counts:   {counts}");
            if !verdict.witness.is_null() {
                println!("witness:  {}", verdict.witness);
            }
            println!("elapsed:  {} ms", verdict.elapsed_ms);
            println!("version:  {}", env!("CARGO_PKG_VERSION"));
        }
    }
    Ok(())
}

enum Built {
    Subspace(MatSubspace),
    Affine(AffineMatSubspace),
}

fn build_named(
    name: &str,
    field: Fq,
    n: Option<usize>,
    p: Option<usize>,
    r: Option<usize>,
    k: Option<usize>,
    codim: Option<usize>,
    seed: u64,
) -> Result<(Built, Vec<String>), String> {
    let err = |e: Error| e.to_string();
    let mut notes = Vec::new();
    let built = match name {
        "sl2_f2" => Built::Subspace(subspace::sl2_f2()),
        "t_upper" => Built::Subspace(subspace::upper_triangular(field, need(n, "n")?)),
        "t_strict_upper" => {
            Built::Subspace(subspace::strict_upper_triangular(field, need(n, "n")?))
        }
        "t_lower" => Built::Subspace(subspace::lower_triangular(field, need(n, "n")?)),
        "jk" => {
            let n = need(n, "n")?;
            let p = need(p, "p")?;
            let k = need(k, "k")?;
            let point = FqMat::j_k(field, n, p, k).map_err(err)?;
            let direction = MatSubspace::zero_space(field, n, p);
            Built::Affine(AffineMatSubspace::new(point, direction).map_err(err)?)
        }
        "extremal_affine" => {
            let coset =
                affine::extremal_affine(field, need(n, "n")?, need(p, "p")?, need(k, "k")?)
                    .map_err(err)?;
            Built::Affine(coset)
        }
        "unspanned" => {
            let n = need(n, "n")?;
            let p = need(p, "p")?;
            let r = need(r, "r")?;
            if !affine::unspanned_regime_ok(n, r) {
                notes.push(format!(
                    "warning: codimension C({},2)-1 is not below n={n}; the construction \
                     still fails to be spanned but sits outside the theorem regime",
                    r + 2
                ));
            }
            Built::Subspace(affine::unspanned_subspace(field, n, p, r).map_err(err)?)
        }
        "random" => {
            let n = need(n, "n")?;
            let p = need(p, "p")?;
            let codim = codim.ok_or("missing required flag --codim")?;
            if n == 0 || p == 0 || codim > n * p {
                return Err(format!("invalid dims: n={n} p={p} codim={codim}"));
            }
            let mut rng = verify::seeded_rng(seed);
            Built::Subspace(verify::random_subspace(field, n, p, codim, &mut rng))
        }
        other => {
            return Err(format!(
                "unknown name '{other}'; expected one of sl2_f2, t_upper, t_strict_upper, \
                 t_lower, jk, extremal_affine, unspanned, random"
            ))
        }
    };
    Ok((built, notes))
}

fn cmd_construct(
    name: &str,
    q: u8,
    n: Option<usize>,
    p: Option<usize>,
    r: Option<usize>,
    k: Option<usize>,
    codim: Option<usize>,
    seed: u64,
    out: &PathBuf,
    format: Format,
) -> Result<(), String> {
    let field = Fq::new(q).map_err(|e| e.to_string())?;
    let (built, notes) = build_named(name, field, n, p, r, k, codim, seed)?;
    for note in &notes {
        eprintln!("{note}");
    }
    let (value, dim, codim_out, kind) = match &built {
        Built::Subspace(v) => (io::subspace_to_value(v), v.dim(), v.codim(), "subspace"),
        Built::Affine(a) => (io::affine_to_value(a), a.dim(), a.codim(), "affine"),
    };
    io::save_value(out, &value).map_err(|e| e.to_string())?;
    match format {
        Format::Human => println!(
            "constructed {name}: {kind} of Mat_{{{},{}}}(F_{q}), dim {dim}, codim {codim_out} -> {}",
            match &built {
                Built::Subspace(v) => v.rows(),
                Built::Affine(a) => a.rows(),
            },
            match &built {
                Built::Subspace(v) => v.cols(),
                Built::Affine(a) => a.cols(),
            },
            out.display()
        ),
        Format::Json => println!(
            "{}",
            json!({
                "name": name,
                "kind": kind,
                "q": q,
                "dim": dim,
                "codim": codim_out,
                "path": out.display().to_string(),
                "version": env!("CARGO_PKG_VERSION"),
            })
        ),
    }
    Ok(())
}

fn cmd_analyze(
    path: &PathBuf,
    profile: bool,
    span: Option<usize>,
    spectrum: bool,
    classify: bool,
    budget: u64,
    format: Format,
) -> Result<(), String> {
    let object = io::load_object(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut report = serde_json::Map::new();
    report.insert("path".into(), json!(path.display().to_string()));
    match object {
        LoadedObject::Matrix(m) => {
            report.insert("kind".into(), json!("matrix"));
            report.insert("q".into(), json!(m.field().modulus()));
            report.insert("rows".into(), json!(m.rows()));
            report.insert("cols".into(), json!(m.cols()));
            report.insert("rank".into(), json!(m.rank()));
            if m.is_square() {
                report.insert("det".into(), json!(m.det().map_err(|e| e.to_string())?));
                report.insert(
                    "spectrum_in_field".into(),
                    json!(m.spectrum_in_field().map_err(|e| e.to_string())?),
                );
            }
        }
        LoadedObject::Subspace(v) => {
            report.insert("kind".into(), json!("subspace"));
            report.insert("q".into(), json!(v.field().modulus()));
            report.insert("rows".into(), json!(v.rows()));
            report.insert("cols".into(), json!(v.cols()));
            report.insert("dim".into(), json!(v.dim()));
            report.insert("codim".into(), json!(v.codim()));
            if profile {
                let prof = strata::rank_profile(&v, budget).map_err(|e| e.to_string())?;
                report.insert("rank_profile".into(), json!(prof.to_map()));
            }
            if let Some(r) = span {
                let sp = strata::span_of_rank(&v, r, budget).map_err(|e| e.to_string())?;
                report.insert(
                    "span_of_rank".into(),
                    json!({
                        "r": r,
                        "dim": sp.dim(),
                        "equals_subspace": sp == v,
                    }),
                );
            }
            if spectrum {
                let verdict =
                    nilspec::has_zero_spectrum_property(&v, budget).map_err(|e| e.to_string())?;
                report.insert("zero_spectrum".into(), json!(verdict.status.to_string()));
            }
            if classify {
                let label = v.classify_hyperplane_2x2_f2().map_err(|e| e.to_string())?;
                report.insert("classification".into(), json!(label.to_string()));
            }
        }
        LoadedObject::Affine(a) => {
            report.insert("kind".into(), json!("affine"));
            report.insert("q".into(), json!(a.field().modulus()));
            report.insert("rows".into(), json!(a.rows()));
            report.insert("cols".into(), json!(a.cols()));
            report.insert("dim".into(), json!(a.dim()));
            report.insert("codim".into(), json!(a.codim()));
            report.insert("is_linear".into(), json!(a.is_linear()));
            if profile {
                let mr = affine::min_rank(&a, budget).map_err(|e| e.to_string())?;
                report.insert("min_rank".into(), json!(mr));
            }
        }
    }
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Human => {
            for (key, value) in &report {
                println!("{key:18} {value}");
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_suite(
    suite: &str,
    q: u8,
    n: Option<usize>,
    p: Option<usize>,
    r: Option<usize>,
    _s: Option<usize>,
    k: Option<usize>,
    d: Option<usize>,
    seed: u64,
    trials: u64,
    budget: u64,
    exhaustive: bool,
    mode: Option<Mode>,
) -> Result<Verdict, String> {
    Fq::new(q).map_err(|e| e.to_string())?;
    let verdict = match suite {
        "oddcase" => verify::suite_oddcase(),
        "gerstenhaber" => {
            let n = need(n, "n")?;
            let d = d.unwrap_or(n * (n - 1) / 2 + 1);
            verify::suite_gerstenhaber_exhaustive(n, q, d, budget)
        }
        "lcinf" => verify::suite_lcinf(need(n, "n")?, need(p, "p")?, q, trials, seed, budget),
        "exist" => verify::suite_exist(need(n, "n")?, need(p, "p")?, q, trials, seed, budget),
        "condsuff" => {
            verify::suite_condsuff(need(n, "n")?, need(p, "p")?, q, trials, seed, budget)
        }
        "corhyper" => verify::suite_corhyper(need(n, "n")?, q, budget),
        "flanders" => verify::suite_flanders(
            need(n, "n")?,
            need(p, "p")?,
            q,
            exhaustive,
            trials,
            seed,
            budget,
        ),
        "hbound" => {
            let hmode = match mode {
                Some(Mode::Construct) | None => HBoundMode::Construct,
                Some(Mode::Exhaustive) => HBoundMode::Exhaustive,
                Some(Mode::Recursive) => {
                    return Err("--mode recursive does not apply to hbound".into())
                }
            };
            let hmode = if exhaustive { HBoundMode::Exhaustive } else { hmode };
            verify::suite_hbound(need(n, "n")?, need(p, "p")?, need(k, "k")?, q, hmode, budget)
        }
        "tightness" => verify::suite_tightness(need(n, "n")?, need(p, "p")?, need(r, "r")?, q, budget),
        "combin" => verify::suite_combin(n.unwrap_or(5), trials, seed),
        "triangularize" => verify::suite_triangularize(n.unwrap_or(5), trials, seed),
        other => {
            return Err(format!(
                "unknown suite '{other}'; expected one of oddcase, gerstenhaber, lcinf, exist, \
                 condsuff, corhyper, flanders, hbound, tightness, combin, triangularize"
            ))
        }
    };
    Ok(verdict)
}

fn real_main() -> Result<u8, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Construct {
            name,
            q,
            n,
            p,
            r,
            k,
            codim,
            seed,
            out,
            format,
        } => {
            cmd_construct(&name, q, n, p, r, k, codim, seed, &out, format)?;
            Ok(0)
        }
        Command::Analyze {
            path,
            profile,
            span,
            spectrum,
            classify,
            budget,
            format,
        } => {
            let budget = default_budget(budget);
            match cmd_analyze(&path, profile, span, spectrum, classify, budget, format) {
                Ok(()) => Ok(0),
                Err(msg) if msg.contains("budget") => {
                    eprintln!("error: {msg}");
                    Ok(EXIT_USAGE)
                }
                Err(msg) => Err(msg),
            }
        }
        Command::Verify {
            suite,
            q,
            n,
            p,
            r,
            s,
            k,
            d,
            seed,
            trials,
            budget,
            exhaustive,
            mode,
            out,
            format,
            inject_fail,
        } => {
            let budget = default_budget(budget);
            let mut verdict =
                run_suite(&suite, q, n, p, r, s, k, d, seed, trials, budget, exhaustive, mode)?;
            if inject_fail {
                verdict.status = rankspan::Status::Fail;
                verdict = verdict.with_witness(json!({
                    "injected": true,
                    "note": "witness corrupted by the --inject-fail test hook",
                }));
            }
            print_verdict(&verdict, format, &out).map_err(|e| e.to_string())?;
            Ok(verdict.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
