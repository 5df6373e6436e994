//! Run configuration and its plain-text manifest.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dirperc_core::{DistributionSpec, Mode};

use crate::CliError;

pub const MANIFEST_NAME: &str = "run.manifest.txt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Estimate,
    Asymptotics,
    Growth,
    Animals,
    Verify,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Estimate => "estimate",
            Self::Asymptotics => "asymptotics",
            Self::Growth => "growth",
            Self::Animals => "animals",
            Self::Verify => "verify",
        })
    }
}

impl FromStr for Subcommand {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "estimate" => Self::Estimate,
            "asymptotics" => Self::Asymptotics,
            "growth" => Self::Growth,
            "animals" => Self::Animals,
            "verify" => Self::Verify,
            other => return Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
        })
    }
}

/// Reference region for `shape_distance.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reference {
    /// The known limit shape when there is one, otherwise the snapshot at the
    /// largest threshold.
    #[default]
    Auto,
    SqrtSimplex,
    Simplex,
    /// The snapshot at the largest threshold, rescaled.
    Last,
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::SqrtSimplex => "sqrt-simplex",
            Self::Simplex => "simplex",
            Self::Last => "last",
        })
    }
}

impl FromStr for Reference {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "auto" => Self::Auto,
            "sqrt-simplex" => Self::SqrtSimplex,
            "simplex" => Self::Simplex,
            "last" => Self::Last,
            other => return Err(CliError::Usage(format!("unknown reference shape `{other}`"))),
        })
    }
}

/// Everything that determines a run's output files. The output directory and
/// the thread count are not part of the manifest: neither changes a byte of
/// output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Subcommand,
    pub dist: DistributionSpec,
    pub d: usize,
    /// Directions for `estimate`.
    pub directions: Vec<Vec<f64>>,
    /// Window extents for `growth`.
    pub extents: Vec<usize>,
    /// Scale for `estimate` and `asymptotics`, largest animal size for `animals`.
    pub n: usize,
    /// Replicates, or independent fields for `animals`.
    pub reps: usize,
    pub alphas: Vec<f64>,
    /// Hold `⌊nα⌋` near this value instead of fixing `n`.
    pub rows: Option<usize>,
    pub thresholds: Vec<f64>,
    pub c: f64,
    pub mode: Mode,
    pub reference: Reference,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Subcommand, dist: DistributionSpec) -> Self {
        Self {
            command,
            dist,
            d: 2,
            directions: vec![vec![1.0, 1.0]],
            extents: Vec::new(),
            n: 100,
            reps: 20,
            alphas: Vec::new(),
            rows: None,
            thresholds: Vec::new(),
            c: 1.0,
            mode: Mode::Last,
            reference: Reference::Auto,
            seed: 0,
            out: PathBuf::from("."),
            threads: None,
        }
    }

    /// `key=value` lines in a fixed order.
    pub fn to_manifest(&self) -> String {
        let dirs: Vec<String> = self.directions.iter().map(|x| join(x)).collect();
        let fields: [(&str, String); 15] = [
            ("version", VERSION.to_string()),
            ("command", self.command.to_string()),
            ("dist", self.dist.to_string()),
            ("d", self.d.to_string()),
            ("x", dirs.join(";")),
            ("box", join(&self.extents)),
            ("n", self.n.to_string()),
            ("reps", self.reps.to_string()),
            ("alpha", join(&self.alphas)),
            ("rows", self.rows.map_or_else(String::new, |r| r.to_string())),
            ("t", join(&self.thresholds)),
            ("c", self.c.to_string()),
            ("mode", self.mode.to_string()),
            ("reference", self.reference.to_string()),
            ("seed", self.seed.to_string()),
        ];
        let mut s = String::new();
        for (k, v) in fields {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    /// Inverse of [`RunConfig::to_manifest`]; `out` and `threads` are left at
    /// their defaults.
    pub fn from_manifest(text: &str) -> Result<Self, CliError> {
        let mut entries = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("manifest line `{line}` is not key=value")))?;
            entries.push((k.trim(), v.trim()));
        }
        let get = |key: &str| {
            entries
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| CliError::Usage(format!("manifest is missing `{key}`")))
        };
        let version = get("version")?;
        if version != VERSION {
            return Err(CliError::Usage(format!(
                "manifest version {version} does not match {VERSION}"
            )));
        }
        let mut cfg = Self::new(get("command")?.parse()?, parse_dist(get("dist")?)?);
        cfg.d = parse_num(get("d")?, "d")?;
        let x = get("x")?;
        cfg.directions = if x.is_empty() {
            Vec::new()
        } else {
            x.split(';')
                .map(|part| parse_list(part, "x"))
                .collect::<Result<_, _>>()?
        };
        cfg.extents = parse_list(get("box")?, "box")?;
        cfg.n = parse_num(get("n")?, "n")?;
        cfg.reps = parse_num(get("reps")?, "reps")?;
        cfg.alphas = parse_list(get("alpha")?, "alpha")?;
        let rows = get("rows")?;
        cfg.rows = if rows.is_empty() {
            None
        } else {
            Some(parse_num(rows, "rows")?)
        };
        cfg.thresholds = parse_list(get("t")?, "t")?;
        cfg.c = parse_num(get("c")?, "c")?;
        cfg.mode = get("mode")?
            .parse()
            .map_err(|e| CliError::Usage(format!("mode: {e}")))?;
        cfg.reference = get("reference")?.parse()?;
        cfg.seed = parse_num(get("seed")?, "seed")?;
        Ok(cfg)
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_dist(s: &str) -> Result<DistributionSpec, CliError> {
    s.parse().map_err(CliError::Core)
}

pub fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{what}: cannot parse `{s}`")))
}

/// Comma-separated values; the empty string is the empty list.
pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| parse_num(v, what)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip() {
        let mut cfg = RunConfig::new(Subcommand::Growth, "trunc(pareto:1/3,1.5,8)".parse().unwrap());
        cfg.directions = vec![vec![1.0, 0.25], vec![0.5, 1.0]];
        cfg.extents = vec![70, 80];
        cfg.alphas = vec![0.09, 0.04];
        cfg.rows = Some(1000);
        cfg.thresholds = vec![1.5, 3.0];
        cfg.mode = Mode::First;
        cfg.reference = Reference::Last;
        cfg.seed = u64::MAX;
        let text = cfg.to_manifest();
        let back = RunConfig::from_manifest(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_manifest(), text);
    }

    #[test]
    fn manifest_keys_are_in_a_fixed_order() {
        let text = RunConfig::new(Subcommand::Verify, "exp:1".parse().unwrap()).to_manifest();
        let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
        assert_eq!(
            keys,
            [
                "version",
                "command",
                "dist",
                "d",
                "x",
                "box",
                "n",
                "reps",
                "alpha",
                "rows",
                "t",
                "c",
                "mode",
                "reference",
                "seed"
            ]
        );
    }

    #[test]
    fn bad_manifests_are_usage_errors() {
        let good = RunConfig::new(Subcommand::Estimate, "exp:1".parse().unwrap()).to_manifest();
        let missing = good.replace("reps=20\n", "");
        assert!(matches!(RunConfig::from_manifest(&missing), Err(CliError::Usage(_))));
        let version = good.replace(&format!("version={VERSION}"), "version=0.0.0");
        assert!(matches!(RunConfig::from_manifest(&version), Err(CliError::Usage(_))));
        let dist = good.replace("dist=exp:1", "dist=gauss:1");
        assert!(matches!(RunConfig::from_manifest(&dist), Err(CliError::Core(_))));
    }
}
