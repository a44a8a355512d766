use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fns_cli::grid::{parse_f64, parse_usize};
use fns_cli::report::Report;
use fns_cli::scan::{scan_rows, write_csv, Quantity, ScanSpec};
use fns_cli::schema::{ProfileFile, SurfaceFile};
use fns_cli::suites::{run_suite, standard_profile, suite_names, Context};
use fns_cli::{CliError, CliResult};
use fns_core::metrics::{calibrate_constants, CalibrationGrid, ConstantsProfile};
use fns_core::surface::{FamilyKind, LengthLaw, SurfaceFamily, TwistLaw};

#[derive(Parser)]
#[command(name = "fns", version, about = "Fenchel-Nielsen surfaces: distance bounds, constructions and checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the depth-n member of a family as a surface file.
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run verification suites; exit 1 if any assertion fails.
    Verify {
        /// special-functions, holonomy, bounds-ordering, counterexample-trends, membership, path or all.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall times; reports are otherwise byte-identical across runs.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate a quantity over a grid and write CSV.
    Scan {
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[command(flatten)]
        family: FamilyArgs,
        /// Law indices, `a:b`, `a:b:step` or a comma list.
        #[arg(long)]
        n: String,
        /// Twist magnitudes; defaults to ln|ln ε_n| per index.
        #[arg(long)]
        t: Option<String>,
        #[arg(long, value_enum, default_value = "exp")]
        tau_law: TauLaw,
        #[arg(long, default_value_t = 1.0)]
        tau_param: f64,
        #[arg(long, default_value_t = 1)]
        twist_depth: u32,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit the profile constants on a grid of single twists.
    Calibrate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "2:20")]
        indices: String,
        #[arg(long, default_value = "0.1,0.5,1,2,5,10,20,50,100,200")]
        twists: String,
        #[arg(long, default_value_t = 1)]
        twist_depth: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Flute,
    TorusChain,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    ExpLinear,
    ExpDouble,
    Constant,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauLaw {
    Exp,
    Linear,
    LogLog,
    LogScaled,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "flute")]
    family: Family,
    #[arg(long, value_enum, default_value = "exp-linear")]
    law: Law,
    /// Rate, value or slope of the length law.
    #[arg(long, default_value_t = 1.0)]
    param: f64,
    #[arg(long, default_value_t = 1.0)]
    frame_length: f64,
    #[arg(long, default_value_t = 2.0)]
    m_bound: f64,
}

impl FamilyArgs {
    fn family(&self) -> SurfaceFamily {
        let p = self.param;
        let length_law = match self.law {
            Law::ExpLinear => LengthLaw::ExpLinear { rate: p },
            Law::ExpDouble => LengthLaw::ExpDouble,
            Law::Constant => LengthLaw::Constant { value: p },
            Law::Linear => LengthLaw::Linear { slope: p },
        };
        let kind = match self.family {
            Family::Flute => FamilyKind::Flute,
            Family::TorusChain => FamilyKind::TorusChain { frame_length: self.frame_length },
        };
        SurfaceFamily { kind, length_law, twist_law: TwistLaw::Zero, m_bound: self.m_bound }
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_profile(path: &Option<PathBuf>) -> CliResult<ConstantsProfile> {
    match path {
        Some(p) => ProfileFile::load(p),
        None => standard_profile(),
    }
}

fn run(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    match cli.cmd {
        Cmd::Build { family, depth, output } => {
            let f = SurfaceFile::build(&family.family(), depth)?;
            emit(&output, &f.to_json())
        }
        Cmd::Verify { suite, profile, report, timing } => {
            let names = suite_names(&suite)?;
            let start = Instant::now();
            let ctx = Context { profile: load_profile(&profile)?, timing };
            let results = names.iter().map(|n| run_suite(n, &ctx)).collect::<CliResult<Vec<_>>>()?;
            let mut rep = Report::new(argv, ctx.profile.hash(), results);
            if timing {
                rep.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            for s in &rep.suites {
                for a in &s.assertions {
                    eprintln!("{} {} {} ({})", if a.passed { "PASS" } else { "FAIL" }, s.suite, a.criterion, a.name);
                }
            }
            emit(&report, &rep.to_json())?;
            if rep.passed {
                Ok(())
            } else {
                Err(CliError::Failed("verification failed".into()))
            }
        }
        Cmd::Scan { quantity, family, n, t, tau_law, tau_param, twist_depth, profile, output } => {
            let tau_law = match tau_law {
                TauLaw::Exp => TwistLaw::Exp { rate: tau_param },
                TauLaw::Linear => TwistLaw::Linear { slope: tau_param },
                TauLaw::LogLog => TwistLaw::LogLog,
                TauLaw::LogScaled => TwistLaw::LogScaled { factor: tau_param },
            };
            let spec = ScanSpec {
                quantity,
                family: family.family(),
                n: parse_usize(&n)?,
                t: t.as_deref().map(parse_f64).transpose()?,
                tau_law,
                twist_depth,
                profile: match (quantity, &profile) {
                    (Quantity::DlsLower, _) => load_profile(&profile)?,
                    (_, Some(p)) => ProfileFile::load(p)?,
                    _ => ConstantsProfile::default(),
                },
            };
            let (header, rows) = scan_rows(&spec)?;
            match &output {
                Some(p) => write_csv(std::fs::File::create(p)?, &header, &rows),
                None => write_csv(std::io::stdout().lock(), &header, &rows),
            }
        }
        Cmd::Calibrate { family, indices, twists, twist_depth, output } => {
            let grid = CalibrationGrid { indices: parse_usize(&indices)?, twists: parse_f64(&twists)?, twist_depth };
            let cp = calibrate_constants(&family.family(), &grid, &ConstantsProfile::default())?;
            emit(&output, &ProfileFile::new(cp).to_json())
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fns: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
