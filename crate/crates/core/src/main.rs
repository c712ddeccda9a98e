use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trinv::cli::{rewrite_word, run_check, Check, RunConfig};
use trinv::invariant::ParamSet;
use trinv::Error;

#[derive(Parser)]
#[command(name = "trinv", version, about = "Verification runs for invariants of 3x3 matrix triples")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// 0 (surrogate prime), Q, 2, 3 or any prime
    #[arg(long = "char", default_value = "0")]
    characteristic: String,
    /// Extension degree (defaults: 16 for 2, 10 for 3)
    #[arg(long)]
    ext: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<u64>,
    /// Degree bound for the generation check
    #[arg(long)]
    bound: Option<usize>,
    /// a1,a2,b1,b2,g
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the generating set for the chosen characteristic
    Generators(Common),
    /// Check that the generators span every multidegree up to the bound
    Generation(Common),
    /// Check that no generator is decomposable
    Minimality(Common),
    /// Jacobian rank of the parameter systems
    HsopIndependence(Common),
    /// Replay the nullcone case scripts
    HsopCases(Common),
    /// Parameters vanish on the nullcone (sampling and hunt)
    Nullcone(Common),
    /// Nil algebra rewriting checks
    RewriteSuite(Common),
    /// Generator counts by degree
    Counts(Common),
    /// Trace identities for a rank-two nilpotent
    Teranishi(Common),
    /// Rank-one identity and the witness families
    Lemma2Identities(Common),
    /// Canonical form of a word in the nil algebra
    Rewrite {
        word: String,
        #[arg(long = "char", default_value = "0")]
        characteristic: String,
        #[arg(long)]
        ext: Option<u32>,
    },
}

fn config(c: &Common) -> Result<RunConfig, Error> {
    let field = RunConfig::field_from_args(&c.characteristic, c.ext)?;
    let mut cfg = RunConfig::new(field);
    cfg.seed = c.seed;
    cfg.trials = c.trials;
    cfg.bound = c.bound;
    cfg.params = c.params.as_deref().map(ParamSet::parse).transpose()?;
    Ok(cfg)
}

fn run(check: Check, c: &Common) -> Result<i32, Error> {
    let cfg = config(c)?;
    let report = run_check(check, &cfg)?;
    let json = report.to_json();
    match &c.out {
        Some(path) => {
            std::fs::write(path, json + "\n").map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("{check}: {:?}", report.status);
        }
        None => println!("{json}"),
    }
    if let Some(r) = &report.reproducer {
        eprintln!("reproduce with: {r}");
    }
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (check, common) = match &cli.cmd {
        Cmd::Rewrite { word, characteristic, ext } => {
            let out = RunConfig::field_from_args(characteristic, *ext).and_then(|f| rewrite_word(word, f));
            return match out {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            };
        }
        Cmd::Generators(c) => (Check::Generators, c),
        Cmd::Generation(c) => (Check::Generation, c),
        Cmd::Minimality(c) => (Check::Minimality, c),
        Cmd::HsopIndependence(c) => (Check::HsopIndependence, c),
        Cmd::HsopCases(c) => (Check::HsopCases, c),
        Cmd::Nullcone(c) => (Check::Nullcone, c),
        Cmd::RewriteSuite(c) => (Check::RewriteSuite, c),
        Cmd::Counts(c) => (Check::Counts, c),
        Cmd::Teranishi(c) => (Check::Teranishi, c),
        Cmd::Lemma2Identities(c) => (Check::Lemma2Identities, c),
    };
    match run(check, common) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e @ Error::Saturated { .. }) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
