use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use divalg::algebra::{
    block_of, classical, is_division, isotope, opposite, sign_pair, Algebra, Classical, Sampling,
};
use divalg::dim2::{hom2d, normal_form_2d, NormalForm2D};
use divalg::equadratic::{central_idempotents, is_e_quadratic, structure};
use divalg::gen::{random_division_2d, random_isotope};
use divalg::matkit::Mat;
use divalg::quat::quat_normal_form;
use divalg::suite::{run_suite, Report, SuiteConfig};
use divalg::{DivisionMode, DivisionVerdict, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "divalg",
    version,
    about = "Construct, classify and verify real division algebras"
)]
struct Cli {
    /// Tolerance for sign and morphism decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Number of random points used by sampling tests.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Double sign (ℓ, r) of an algebra.
    SignPair { algebra: PathBuf },
    /// Block label of an algebra.
    Block { algebra: PathBuf },
    /// Isotope x∘y = S(x)T(y); the pair file holds {"S": [[..]], "T": [[..]]}.
    Isotope {
        algebra: PathBuf,
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Opposite algebra x∘y = yx.
    Opposite {
        algebra: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Division test: `exact2d` (dimension ≤ 2) or `sampled`.
    Divcheck {
        algebra: PathBuf,
        #[arg(long, default_value = "sampled")]
        mode: DivisionMode,
    },
    /// Idempotent, imaginary hyperplane and block of an e-quadratic algebra.
    Equad { algebra: PathBuf },
    /// Normal form of a 2-dimensional division algebra.
    Classify2d { algebra: PathBuf },
    /// Morphisms between two 2-d normal forms {"i", "j", "A", "B"}.
    Hom2d { src: PathBuf, dst: PathBuf },
    /// Quaternion isotope tools.
    Quat {
        #[command(subcommand)]
        command: QuatCommand,
    },
    /// Write sample algebras as JSON files.
    Gen {
        #[arg(long)]
        out_dir: PathBuf,
        /// Random algebras of each kind.
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Run the full invariant suite.
    Verify,
}

#[derive(Subcommand)]
enum QuatCommand {
    /// Normal form of the isotope ℍ_{S,T}; reads {"S": [[..]], "T": [[..]]}.
    NormalForm { pair: PathBuf },
}

#[derive(Deserialize)]
struct MatrixPair {
    #[serde(rename = "S")]
    s: Mat,
    #[serde(rename = "T")]
    t: Mat,
}

/// Why a command did not succeed, with its exit code.
enum Failure {
    Input(String),
    Check(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Check(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        if e.is_numerical() {
            return Failure::Numerical(msg);
        }
        match e {
            Error::Json(_)
            | Error::InvalidMatrix(_)
            | Error::InvalidInput(_)
            | Error::ModeMismatch(_)
            | Error::UnsupportedDimension(_)
            | Error::DimensionOne
            | Error::BadSplit(_)
            | Error::BlockMismatch { .. } => Failure::Input(msg),
            _ => Failure::Check(msg),
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_algebra(path: &Path) -> std::result::Result<Algebra, Failure> {
    Ok(Algebra::from_json(&read(path)?)?)
}

fn read_pair(path: &Path) -> std::result::Result<MatrixPair, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_normal_form(path: &Path) -> std::result::Result<NormalForm2D, Failure> {
    let nf: NormalForm2D = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    nf.validate()?;
    Ok(nf)
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn fmt_vec(v: &[f64]) -> String {
    // anything that rounds to zero prints unsigned
    let parts: Vec<String> = v
        .iter()
        .map(|&x| format!("{:.9}", if x.abs() < 5e-10 { 0.0 } else { x }))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_mat(m: &Mat, indent: &str) -> String {
    m.to_rows()
        .iter()
        .map(|r| format!("{indent}{}\n", fmt_vec(r)))
        .collect()
}

fn pretty(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("json value serializes") + "\n"
}

/// Emits an algebra to a file when asked, otherwise to standard output.
fn emit_algebra(alg: &Algebra, out: Option<&Path>) -> Outcome {
    let text = alg.to_json() + "\n";
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

fn run(cli: &Cli) -> Outcome {
    let opts = Sampling::new(cli.samples, cli.tol, cli.seed);
    match &cli.command {
        Command::SignPair { algebra } => {
            let p = sign_pair(&read_algebra(algebra)?, opts)?;
            Ok(if cli.json {
                pretty(json!({ "sign_pair": p.label(), "ell": p.ell, "r": p.r }))
            } else {
                format!("{p}\n")
            })
        }
        Command::Block { algebra } => {
            let b = block_of(&read_algebra(algebra)?, opts)?;
            Ok(if cli.json {
                pretty(json!({ "block": b }))
            } else {
                format!("{b}\n")
            })
        }
        Command::Isotope { algebra, pair, out } => {
            let pair = read_pair(pair)?;
            emit_algebra(
                &isotope(&read_algebra(algebra)?, &pair.s, &pair.t)?,
                out.as_deref(),
            )
        }
        Command::Opposite { algebra, out } => {
            emit_algebra(&opposite(&read_algebra(algebra)?), out.as_deref())
        }
        Command::Divcheck { algebra, mode } => {
            let verdict = is_division(&read_algebra(algebra)?, *mode, opts)?;
            let text = if cli.json {
                pretty(json!({ "verdict": verdict }))
            } else {
                format!("{verdict}\n")
            };
            if verdict == DivisionVerdict::NotDivision {
                print!("{text}");
                return Err(Failure::Check("not a division algebra".into()));
            }
            Ok(text)
        }
        Command::Equad { algebra } => equad(cli, &read_algebra(algebra)?, opts),
        Command::Classify2d { algebra } => {
            let alg = read_algebra(algebra)?;
            let c = normal_form_2d(&alg, cli.tol)?;
            let nf = &c.normal_form;
            if cli.json {
                return Ok(pretty(json!({
                    "block": nf.block(),
                    "normal_form": nf,
                    "iso": c.iso,
                    "residual": c.residual,
                })));
            }
            Ok(format!(
                "block {}\ni {} j {}\nA\n{}B\n{}iso\n{}residual {:.3e}\n",
                nf.block(),
                nf.i,
                nf.j,
                fmt_mat(&nf.a, "  "),
                fmt_mat(&nf.b, "  "),
                fmt_mat(&c.iso, "  "),
                c.residual
            ))
        }
        Command::Hom2d { src, dst } => {
            let homs = hom2d(&read_normal_form(src)?, &read_normal_form(dst)?, cli.tol)?;
            if cli.json {
                return Ok(pretty(json!({ "count": homs.len(), "morphisms": homs })));
            }
            let mut out = format!("{} morphisms\n", homs.len());
            for g in &homs {
                let _ = write!(
                    out,
                    "{} ({})\n{}",
                    g.label,
                    g.group,
                    fmt_mat(&g.matrix, "  ")
                );
            }
            Ok(out)
        }
        Command::Quat {
            command: QuatCommand::NormalForm { pair },
        } => {
            let pair = read_pair(pair)?;
            let nf = quat_normal_form(&pair.s, &pair.t, cli.tol)?;
            if cli.json {
                return Ok(
                    serde_json::to_string_pretty(&nf).expect("normal form serializes") + "\n",
                );
            }
            let x = &nf.object;
            Ok(format!(
                "alpha {} beta {}\na {}\nb {}\nC\n{}D\n{}iso\n{}residual {:.3e}\n",
                nf.alpha.symbol(),
                nf.beta.symbol(),
                fmt_vec(x.a.as_slice()),
                fmt_vec(x.b.as_slice()),
                fmt_mat(&x.c, "  "),
                fmt_mat(&x.d, "  "),
                fmt_mat(&nf.iso, "  "),
                nf.residual
            ))
        }
        Command::Gen { out_dir, count } => gen(cli.seed, out_dir, *count),
        Command::Verify => {
            let cfg = SuiteConfig {
                tol: cli.tol,
                samples: cli.samples,
                seed: cli.seed,
            };
            let report = Report::new("verify", &cfg, run_suite(&cfg));
            let text = if cli.json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                report.to_text()
            };
            if report.pass {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Check("some checks failed".into()))
            }
        }
    }
}

fn equad(cli: &Cli, alg: &Algebra, opts: Sampling) -> Outcome {
    let qualifying = central_idempotents(alg, cli.tol)?
        .into_iter()
        .filter(|e| is_e_quadratic(alg, e, cli.tol) == Ok(true))
        .count();
    let s = structure(alg, cli.tol)?;
    let block = block_of(alg, opts)?;
    if cli.json {
        return Ok(pretty(json!({
            "e": s.e,
            "im_basis": s.im_basis.to_cols(),
            "qualifying_idempotents": qualifying,
            "unique": qualifying == 1,
            "block": block,
        })));
    }
    let mut out = format!("e {}\nIm_e basis\n", fmt_vec(&s.e));
    for v in s.im_basis.to_cols() {
        let _ = writeln!(out, "  {}", fmt_vec(&v));
    }
    let _ = writeln!(
        out,
        "unique {} ({qualifying} qualifying idempotent{})",
        qualifying == 1,
        if qualifying == 1 { "" } else { "s" }
    );
    let _ = writeln!(out, "block {block}");
    Ok(out)
}

fn gen(seed: u64, dir: &Path, count: usize) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut written = Vec::new();
    let mut put = |name: String, alg: &Algebra| -> std::result::Result<(), Failure> {
        write(&dir.join(&name), &(alg.to_json() + "\n"))?;
        written.push(name);
        Ok(())
    };
    for (tag, which) in [
        ("C", Classical::C),
        ("H", Classical::H),
        ("O", Classical::O),
    ] {
        put(format!("classical_{tag}.json"), &classical(which))?;
    }
    for k in 0..count {
        put(
            format!("division2d_{k:03}.json"),
            &random_division_2d(&mut rng),
        )?;
    }
    for (tag, base) in [("H", Classical::H), ("O", Classical::O)] {
        for k in 0..count {
            put(
                format!("isotope_{tag}_{k:03}.json"),
                &random_isotope(&mut rng, base),
            )?;
        }
    }
    Ok(written
        .iter()
        .map(|n| format!("{}\n", dir.join(n).display()))
        .collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
