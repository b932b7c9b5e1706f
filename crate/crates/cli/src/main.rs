use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use wittcob::arith::set_trial_division_bound;
use wittcob::cobordism::{cobordism_class, verify_witness, CobordismWitness, SelfDualComplex};
use wittcob::forms::{invariants, metabolic_reduce, replay, BilinearForm, BlockMetabolicForm};
use wittcob::genus::{
    bundled_surfaces, chi_y, double_point_example, epsilon, epsilon_by_pairs, example_drivers,
    lefschetz_cancellation_check, specialize, HodgeDiamond, PrimitivePiece, SurfaceTable,
};
use wittcob::hodge::{compare_polarizations_with, is_polarization, HodgeStructure};
use wittcob::suites;
use wittcob::witt::{equivalent, hasse_equivalent, psi, witt_class_of};

#[derive(Parser)]
#[command(name = "wittcob", version, about = "Witt classes, self-dual complexes and polarizations over Q")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Seed for randomized fixtures.
    #[arg(long, default_value_t = 20240611, global = true)]
    seed: u64,

    /// Largest trial divisor tried before factoring gives up.
    #[arg(long, global = true)]
    trial_division_bound: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, determinant square class, signature and Hasse invariants of a form.
    Invariants { form: PathBuf },
    /// Canonical Witt class of a nondegenerate symmetric form.
    WittClass { form: PathBuf },
    /// Decide Witt equivalence of two forms.
    Equivalent { a: PathBuf, b: PathBuf },
    /// First (k = 0) or second (k = 1) residue at a prime.
    Residue {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        k: u8,
        form: PathBuf,
    },
    /// Reduce a block metabolic form to its core.
    MetabolicReduce { block: PathBuf },
    /// Validate a self-dual complex and compute its cobordism class.
    ComplexClass { complex: PathBuf },
    /// Check every condition of a cobordism witness.
    VerifyWitness { witness: PathBuf },
    /// Test whether a form polarizes a Hodge structure.
    HodgeCheck { hodge: PathBuf, form: PathBuf },
    /// Compare two polarizations of the same Hodge structure.
    HodgeCompare {
        hodge: PathBuf,
        s: PathBuf,
        s2: PathBuf,
        /// Also compare the rational Witt classes.
        #[arg(long)]
        rational: bool,
    },
    /// Chi_y genus of a Hodge diamond and its specializations.
    ChiY { diamond: PathBuf },
    /// The sign (-1)^(m(m+1)/2).
    Epsilon {
        #[arg(allow_hyphen_values = true)]
        m: i64,
    },
    /// Check signature cancellation over primitive Lefschetz pieces.
    LefschetzCheck { pieces: PathBuf },
    /// Run the worked examples: the double point and ordinary points on surfaces.
    PaperExamples {
        /// Surface table to use instead of the bundled one.
        #[arg(long)]
        surfaces: Option<PathBuf>,
    },
    /// Run the randomized property suites.
    PropertySuite {
        /// Cases per suite; defaults vary by suite.
        #[arg(long)]
        cases: Option<usize>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LefschetzInput {
    w: i64,
    pieces: Vec<PrimitivePiece>,
}

struct Outcome {
    report: Value,
    verdict: bool,
}

fn ok(report: impl Serialize) -> anyhow::Result<Outcome> {
    Ok(Outcome { report: serde_json::to_value(report)?, verdict: true })
}

fn judged(report: impl Serialize, verdict: bool) -> anyhow::Result<Outcome> {
    Ok(Outcome { report: serde_json::to_value(report)?, verdict })
}

fn load<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        if at == "." {
            anyhow!("{}: {}", path.display(), e.into_inner())
        } else {
            anyhow!("{}: at {at}: {}", path.display(), e.into_inner())
        }
    })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Invariants { form } => ok(invariants(&load::<BilinearForm>(form)?)?),
        Command::WittClass { form } => ok(witt_class_of(&load::<BilinearForm>(form)?)?),
        Command::Equivalent { a, b } => {
            let (f, g) = (load::<BilinearForm>(a)?, load::<BilinearForm>(b)?);
            let by_residues = equivalent(&f, &g)?;
            let by_hasse = hasse_equivalent(&f, &g)?;
            if by_residues != by_hasse {
                return Err(anyhow!("residue and Hasse tests disagree"));
            }
            judged(
                json!({
                    "equivalent": by_residues,
                    "a": witt_class_of(&f)?,
                    "b": witt_class_of(&g)?,
                }),
                by_residues,
            )
        }
        Command::Residue { prime, k, form } => {
            let f = load::<BilinearForm>(form)?;
            ok(psi(&f, &(*prime).into(), *k)?)
        }
        Command::MetabolicReduce { block } => {
            let m = load::<BlockMetabolicForm>(block)?;
            let red = metabolic_reduce(&m)?;
            let replayed = replay(&m, &red);
            judged(
                json!({
                    "core": red.core,
                    "hyperbolic_count": red.hyperbolic_count,
                    "class": witt_class_of(&red.core)?,
                    "steps": red.steps,
                    "replayed": replayed,
                }),
                replayed,
            )
        }
        Command::ComplexClass { complex } => {
            let c = load::<SelfDualComplex>(complex)?;
            let validation = c.validate();
            if !validation.valid {
                return judged(json!({ "validation": validation }), false);
            }
            ok(json!({ "validation": validation, "class": cobordism_class(&c)? }))
        }
        Command::VerifyWitness { witness } => {
            let r = verify_witness(&load::<CobordismWitness>(witness)?);
            let v = r.verified;
            judged(r, v)
        }
        Command::HodgeCheck { hodge, form } => {
            let r = is_polarization(&load::<HodgeStructure>(hodge)?, &load::<BilinearForm>(form)?)?;
            let v = r.is_polarization;
            judged(r, v)
        }
        Command::HodgeCompare { hodge, s, s2, rational } => {
            let h = load::<HodgeStructure>(hodge)?;
            let r = compare_polarizations_with(&h, &load(s)?, &load(s2)?, *rational)?;
            let v = r.holds;
            judged(r, v)
        }
        Command::ChiY { diamond } => {
            let d = load::<HodgeDiamond>(diamond)?;
            let chi = chi_y(&d);
            ok(json!({
                "chi_y": chi.to_string(),
                "coefficients": chi,
                "specialization": specialize(&chi, d.dim()),
            }))
        }
        Command::Epsilon { m } => {
            let e = epsilon(*m);
            judged(json!({ "m": m, "epsilon": e }), e == epsilon_by_pairs(*m))
        }
        Command::LefschetzCheck { pieces } => {
            let input = load::<LefschetzInput>(pieces)?;
            let r = lefschetz_cancellation_check(&input.pieces, input.w)?;
            let v = r.equal;
            judged(r, v)
        }
        Command::PaperExamples { surfaces } => {
            let table = match surfaces {
                Some(p) => load::<SurfaceTable>(p)?,
                None => bundled_surfaces(),
            };
            let r = example_drivers(&table.surfaces)?;
            let v = r.verdict && r.double_point == double_point_example()?;
            judged(r, v)
        }
        Command::PropertySuite { cases } => {
            let reports = suites::all(cli.seed, *cases);
            let exhaustive = suites::sign_calculus_exhaustive();
            let v = reports.iter().all(|r| r.ok()) && exhaustive.is_empty();
            judged(json!({ "suites": reports, "sign_calculus_exhaustive_failures": exhaustive }), v)
        }
    }
}

fn render_text(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(&p, x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            if xs.is_empty() {
                out.push_str(&format!("{prefix} = []\n"));
            }
            for (i, x) in xs.iter().enumerate() {
                render_text(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(b) = cli.trial_division_bound {
        set_trial_division_bound(b);
    }
    match run(&cli) {
        Ok(Outcome { report, verdict }) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("serializable report")),
                Format::Text => {
                    let mut out = String::new();
                    render_text("", &report, &mut out);
                    print!("{out}");
                    if report.get("verdict").is_none() {
                        println!("verdict = {verdict}");
                    }
                }
            }
            if verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
