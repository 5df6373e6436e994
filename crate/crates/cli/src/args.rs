//! Command-line flags and their translation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser};
use dirperc_core::animals::enumeration_limit;
use dirperc_core::Mode;

use crate::config::{parse_dist, parse_list, RunConfig, Subcommand};
use crate::{replay, run, CliError, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "dirperc",
    version,
    about = "Directed last- and first-passage percolation laboratory"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for output files and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Shape estimates T(⌊nx⌋)/n, written to estimates.csv.
    Estimate(EstimateArgs),
    /// Boundary slopes (ĝ(1,α) - μ)/√α, written to asymptotics.csv.
    Asymptotics(AsymptoticsArgs),
    /// Growth-set raster (PGM) and shape_distance.csv.
    Growth(GrowthArgs),
    /// Greedy lattice animals against directed paths, written to animals.csv.
    Animals(AnimalsArgs),
    /// Oracle and inequality suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Re-runs a run.manifest.txt.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Weight law, e.g. exp:1, ber:0.5, trunc(pareto:1/3,1.5,8).
    #[arg(long)]
    pub dist: String,
    /// Direction x as comma-separated coordinates; repeat for several.
    #[arg(long = "x", default_value = "1,1")]
    pub x: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// last or first.
    #[arg(long, default_value = "last")]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(long)]
    pub dist: String,
    /// Strictly decreasing α list.
    #[arg(long, default_value = "0.09,0.04,0.01")]
    pub alpha: String,
    /// Fixed scale for every α.
    #[arg(long, default_value_t = 10_000, conflicts_with = "rows")]
    pub n: usize,
    /// Use n = round(rows / α) instead of a fixed n.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long)]
    pub dist: String,
    /// Ascending threshold list.
    #[arg(long)]
    pub t: String,
    /// Window extents, e.g. 700,700 or 60,60,60.
    #[arg(long = "box")]
    pub extents: String,
    #[arg(long, default_value = "last")]
    pub mode: String,
    /// auto, sqrt-simplex, simplex or last.
    #[arg(long, default_value = "auto")]
    pub reference: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AnimalsArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Largest animal size; defaults to min(8, enumeration limit).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of independent fields.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Constant in the bound c n ∫(1-F)^(1/d).
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Path to a run.manifest.txt.
    pub manifest: PathBuf,
}

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("--mode: {e}")))
}

impl Cli {
    /// The configuration this command line describes; `None` for `replay`.
    pub fn to_config(&self) -> Result<Option<RunConfig>, CliError> {
        let mut cfg = match &self.command {
            Command::Estimate(a) => {
                let mut c = RunConfig::new(Subcommand::Estimate, parse_dist(&a.dist)?);
                c.directions = a.x.iter().map(|x| parse_list(x, "--x")).collect::<Result<_, _>>()?;
                c.d = c.directions.first().map_or(0, Vec::len);
                c.n = a.n;
                c.reps = a.reps;
                c.mode = parse_mode(&a.mode)?;
                c.seed = a.seed;
                c
            }
            Command::Asymptotics(a) => {
                let mut c = RunConfig::new(Subcommand::Asymptotics, parse_dist(&a.dist)?);
                c.alphas = parse_list(&a.alpha, "--alpha")?;
                c.n = a.n;
                c.rows = a.rows;
                c.reps = a.reps;
                c.seed = a.seed;
                c
            }
            Command::Growth(a) => {
                let mut c = RunConfig::new(Subcommand::Growth, parse_dist(&a.dist)?);
                c.thresholds = parse_list(&a.t, "--t")?;
                c.extents = parse_list(&a.extents, "--box")?;
                c.d = c.extents.len();
                c.mode = parse_mode(&a.mode)?;
                c.reference = a.reference.parse()?;
                c.seed = a.seed;
                c
            }
            Command::Animals(a) => {
                let mut c = RunConfig::new(Subcommand::Animals, parse_dist(&a.dist)?);
                c.d = a.d;
                c.n = a.n.unwrap_or_else(|| enumeration_limit(a.d).min(8));
                c.reps = a.reps;
                c.c = a.c;
                c.seed = a.seed;
                c
            }
            Command::Verify(a) => {
                let mut c = RunConfig::new(Subcommand::Verify, parse_dist("exp:1")?);
                c.seed = a.seed;
                c
            }
            Command::Replay(_) => return Ok(None),
        };
        cfg.out = self.out.clone();
        cfg.threads = self.threads;
        Ok(Some(cfg))
    }

    pub fn execute(&self) -> Result<RunReport, CliError> {
        match (&self.command, self.to_config()?) {
            (Command::Replay(a), _) => replay(&a.manifest, self.out.clone(), self.threads),
            (_, Some(cfg)) => run(&cfg),
            (_, None) => unreachable!("only replay has no configuration"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<Option<RunConfig>, CliError> {
        Cli::try_parse_from(std::iter::once("dirperc").chain(args.iter().copied()))
            .unwrap()
            .to_config()
    }

    #[test]
    fn estimate_flags() {
        let cfg = config(&[
            "estimate", "--dist", "exp:1", "--x", "1,1", "--x", "1,0.5", "--n", "600", "--seed", "1",
        ])
        .unwrap()
        .unwrap();
        assert_eq!(cfg.directions, vec![vec![1.0, 1.0], vec![1.0, 0.5]]);
        assert_eq!((cfg.n, cfg.seed, cfg.d), (600, 1, 2));
    }

    #[test]
    fn global_flags_after_the_subcommand() {
        let cfg = config(&["verify", "--seed", "7", "--threads", "3", "--out", "/tmp/x"])
            .unwrap()
            .unwrap();
        assert_eq!(cfg.threads, Some(3));
        assert_eq!(cfg.out, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn malformed_values_are_usage_errors() {
        assert!(matches!(
            config(&["growth", "--dist", "exp:1", "--t", "1,x", "--box", "9,9"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            config(&["estimate", "--dist", "exp:1", "--mode", "middle"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            config(&["estimate", "--dist", "normal:0,1"]),
            Err(CliError::Core(_))
        ));
    }

    #[test]
    fn rows_and_n_conflict() {
        let r = Cli::try_parse_from(["dirperc", "asymptotics", "--dist", "exp:1", "--n", "5", "--rows", "3"]);
        assert!(r.is_err());
    }

    #[test]
    fn animals_default_size() {
        assert_eq!(config(&["animals", "--dist", "geo:0.4"]).unwrap().unwrap().n, 8);
        assert_eq!(
            config(&["animals", "--dist", "geo:0.4", "--d", "3"])
                .unwrap()
                .unwrap()
                .n,
            7
        );
    }
}
