mod config;
mod report;
mod suites;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncgarside::affine_mcsul::McSul;
use ncgarside::annulus_model::Flavor;
use ncgarside::chain_system::ChainSystem;
use ncgarside::chain_system::DEFAULT_GROUP_LIKE_BOUND;
use ncgarside::finite_nc::nc_lattice;
use ncgarside::root_datum::TypeTag;
use ncgarside::tube_combinatorics::{tube_poset, Tubes};

use report::{Report, EXIT_INPUT};
use suites::{AnnulusTask, Datum, GarsideInput};

#[derive(Parser)]
#[command(name = "ncgarside", version, about = "Noncrossing partitions, chain systems and affine factorizations")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Exit 3 when a check is undecided.
    #[arg(long, global = true)]
    strict: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Include wall-clock timings.
    #[arg(long, global = true)]
    timings: bool,
    /// Worker threads (also NCG_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct DatumArgs {
    /// Named type, e.g. `A3`, `D~4`, `A~3:outer=1,3`.
    #[arg(long = "type")]
    spec: Option<String>,
    /// Cartan matrix file.
    #[arg(long)]
    cartan: Option<String>,
    /// Coxeter word, 1-based and comma separated.
    #[arg(long)]
    cox: Option<String>,
}

impl DatumArgs {
    fn datum(&self) -> Datum {
        Datum { spec: self.spec.clone(), cartan: self.cartan.clone(), cox: self.cox.clone() }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Finite, affine or other.
    Classify {
        #[command(flatten)]
        d: DatumArgs,
    },
    /// Hurwitz orbit and noncrossing lattice of a finite type.
    Nc {
        #[command(flatten)]
        d: DatumArgs,
    },
    /// Factored translation construction and its checks.
    McsulVerify {
        #[command(flatten)]
        d: DatumArgs,
        /// Weights, e.g. `1/3,2/3`.
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        extended: bool,
        /// Also run the bounded reflection pair search.
        #[arg(long)]
        ttprime: bool,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Tube exceptional sequences and the isomorphism to the factored construction.
    Rpe {
        #[command(flatten)]
        d: DatumArgs,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        extended: bool,
    },
    /// A single tube of the given rank.
    Tubes {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Affine permutations on the annulus.
    Annulus {
        #[command(subcommand)]
        cmd: AnnulusCmd,
    },
    /// Garside checks for a finite, affine or supplied chain system.
    GarsideCheck {
        #[command(flatten)]
        d: DatumArgs,
        /// Chain system JSON file.
        #[arg(long)]
        chain: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        extended: bool,
        #[arg(long, default_value_t = DEFAULT_GROUP_LIKE_BOUND)]
        bound: usize,
    },
    /// Write a poset or chain system.
    Export {
        #[command(flatten)]
        d: DatumArgs,
        #[arg(long, value_enum)]
        object: Object,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Tube rank for `--object tube`.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        extended: bool,
    },
}

#[derive(Subcommand)]
enum AnnulusCmd {
    VerifyA {
        #[arg(long)]
        n: i64,
        #[arg(long, value_delimiter = ',')]
        outer: Vec<i64>,
    },
    VerifyB {
        #[arg(long)]
        n: i64,
    },
    VerifyD {
        #[arg(long)]
        n: i64,
    },
    Dual {
        #[arg(long)]
        n: i64,
        #[arg(long, value_delimiter = ',')]
        outer: Vec<i64>,
    },
    Parse {
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value_t = FlavorArg::Plain)]
        flavor: FlavorArg,
        text: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Plain,
    Signed,
    Barred,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Object {
    Nc,
    Ccf,
    Tube,
    Rpe,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

enum Output {
    Report(Report),
    Raw(String),
}

fn q_opt(q: &Option<String>) -> Result<Option<Vec<ncgarside::linalg::Q>>> {
    q.as_deref().map(suites::parse_q).transpose()
}

fn run(cmd: Cmd) -> Result<Output> {
    let out = match cmd {
        Cmd::Classify { d } => suites::classify_report(&d.datum().load()?),
        Cmd::Nc { d } => {
            let d = d.datum().load()?;
            if d.tag != TypeTag::Finite {
                bail!("{} is not of finite type", d.name);
            }
            suites::nc_report(&d)?
        }
        Cmd::McsulVerify { d, q, extended, ttprime, bound } => {
            let d = d.datum().load()?;
            suites::gate(&d, extended)?;
            suites::mcsul_report(&d, q_opt(&q)?, ttprime, bound)?
        }
        Cmd::Rpe { d, q, extended } => {
            let d = d.datum().load()?;
            suites::gate(&d, extended)?;
            suites::rpe_report(&d, q_opt(&q)?)?
        }
        Cmd::Tubes { rank, max_k } => suites::tubes_report(rank, max_k)?,
        Cmd::Annulus { cmd } => {
            let task = match cmd {
                AnnulusCmd::VerifyA { n, outer } => AnnulusTask::VerifyA { n, outer },
                AnnulusCmd::VerifyB { n } => AnnulusTask::VerifyB { n },
                AnnulusCmd::VerifyD { n } => AnnulusTask::VerifyD { n },
                AnnulusCmd::Dual { n, outer } => AnnulusTask::Dual { n, outer },
                AnnulusCmd::Parse { n, flavor, text } => {
                    let flavor = match flavor {
                        FlavorArg::Plain => Flavor::Plain,
                        FlavorArg::Signed => Flavor::Signed,
                        FlavorArg::Barred => Flavor::Barred,
                    };
                    AnnulusTask::Parse { text, flavor, n }
                }
            };
            suites::annulus_report(task)?
        }
        Cmd::GarsideCheck { d, chain, q, extended, bound } => {
            let input = match chain {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
                    GarsideInput::Chain(ChainSystem::from_json(&text)?)
                }
                None => {
                    let d = d.datum().load()?;
                    suites::gate(&d, extended)?;
                    GarsideInput::Datum(d, q_opt(&q)?)
                }
            };
            suites::garside_report(input, bound)?
        }
        Cmd::Export { d, object, format, rank, q, extended } => return export(d, object, format, rank, q, extended),
    };
    Ok(Output::Report(out))
}

fn export(d: DatumArgs, object: Object, format: Format, rank: Option<usize>, q: Option<String>, extended: bool) -> Result<Output> {
    let poset = match object {
        Object::Tube => {
            let r = rank.context("--object tube needs --rank")?;
            tube_poset(r)?
        }
        Object::Nc => {
            let d = d.datum().load()?;
            if d.tag != TypeTag::Finite {
                bail!("{} is not of finite type", d.name);
            }
            nc_lattice(&d)?
        }
        Object::Ccf | Object::Rpe => {
            let d = d.datum().load()?;
            suites::gate(&d, extended)?;
            let ms = McSul::new(&d, q_opt(&q)?)?;
            let chains = if object == Object::Ccf {
                ms.build_ccf()?
            } else {
                Tubes::from_horizontal(&ms.hd, &ms.datum)?.chain_system()?
            };
            if format == Format::Json {
                return Ok(Output::Raw(chains.to_json(&[])));
            }
            chains.build_poset()?
        }
    };
    let name = match object {
        Object::Nc => "nc",
        Object::Ccf => "ccf",
        Object::Tube => "tube",
        Object::Rpe => "rpe",
    };
    Ok(Output::Raw(match format {
        Format::Json => poset.to_json(),
        Format::Dot => poset.to_dot(name),
    }))
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("NCG_THREADS") {
            Ok(s) => Some(s.trim().parse().with_context(|| format!("NCG_THREADS={s:?}"))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn emit(text: &str, out: &Option<String>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let result = run(cli.cmd).and_then(|o| {
        let (text, code) = match o {
            Output::Raw(s) => (s, 0),
            Output::Report(mut r) => {
                if !cli.timings {
                    r.timings_ms.clear();
                }
                let code = r.exit_code(cli.strict);
                (if cli.json { r.to_json() } else { r.to_text() }, code)
            }
        };
        emit(&text, &cli.out)?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
