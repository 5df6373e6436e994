//! The subcommands. Each returns its output files in memory so that
//! [`crate::run`] writes them in a fixed order.

use std::fmt::Write as _;

use dirperc_core::animals::{animal_bound, enumeration_limit, max_animal_weight, CenteredField};
use dirperc_core::growth::{
    growth_snapshots, render_height_map, render_pgm, shape_distance, write_shape_distance_csv, GrowthSnapshot,
    ReferenceShape, RescaledSnapshot, ShapeComparison, Simplex, SqrtSimplex,
};
use dirperc_core::passage::last_passage;
use dirperc_core::rng::derive_seed;
use dirperc_core::shape::{boundary_asymptotics_scaled, estimate, write_estimates_csv, AsymptoticScale, WeightSign};
use dirperc_core::{DistributionSpec, Error, LatticeBox, Mode, WeightField};

use crate::config::{Reference, RunConfig, Subcommand};
use crate::{verify, CliError};

#[derive(Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub stdout: String,
    pub failed: bool,
}

pub fn dispatch(config: &RunConfig) -> Result<CommandOutput, CliError> {
    match config.command {
        Subcommand::Estimate => run_estimate(config),
        Subcommand::Asymptotics => run_asymptotics(config),
        Subcommand::Growth => run_growth(config),
        Subcommand::Animals => run_animals(config),
        Subcommand::Verify => Ok(verify::run_suite(config.seed)),
    }
}

fn csv_to_string(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory");
    buf
}

fn run_estimate(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let d = config
        .directions
        .first()
        .map(Vec::len)
        .ok_or_else(|| CliError::Usage("no direction given".into()))?;
    if config.directions.iter().any(|x| x.len() != d) {
        return Err(CliError::Usage("all directions must have the same dimension".into()));
    }
    let estimates = config
        .directions
        .iter()
        .map(|x| {
            estimate(
                &config.dist,
                x,
                config.n,
                config.reps,
                config.seed,
                config.mode,
                WeightSign::Plain,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let csv = csv_to_string(|buf| write_estimates_csv(buf, &estimates));
    let stdout = String::from_utf8(csv.clone()).expect("ascii csv");
    Ok(CommandOutput {
        files: vec![("estimates.csv".into(), csv)],
        stdout,
        failed: false,
    })
}

fn run_asymptotics(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let scale = config
        .rows
        .map_or(AsymptoticScale::Fixed(config.n), AsymptoticScale::Rows);
    let report = boundary_asymptotics_scaled(&config.dist, &config.alphas, scale, config.reps, config.seed)?;
    let csv = csv_to_string(|buf| report.write_csv(buf));
    let mut stdout = String::from_utf8(csv.clone()).expect("ascii csv");
    for row in &report.rows {
        let _ = write!(
            stdout,
            "alpha={} slope={:.4}±{:.4}",
            row.alpha, row.slope, row.slope_stderr
        );
        if let Some(exact) = row.exact_slope {
            let _ = write!(stdout, " exact={exact:.4}");
        }
        stdout.push('\n');
    }
    Ok(CommandOutput {
        files: vec![("asymptotics.csv".into(), csv)],
        stdout,
        failed: false,
    })
}

/// Keeps `[A-Za-z0-9.-]` and maps everything else to `_`.
pub fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// `growth_<dist>_seed<seed>_t<t1-t2-...>`
pub fn growth_stem(dist: &DistributionSpec, seed: u64, thresholds: &[f64]) -> String {
    let ts: Vec<String> = thresholds.iter().map(|t| t.to_string()).collect();
    format!(
        "growth_{}_seed{seed}_t{}",
        sanitize(&dist.to_string()),
        sanitize(&ts.join("-"))
    )
}

fn resolve_reference(config: &RunConfig, d: usize) -> Reference {
    match config.reference {
        Reference::Auto => match config.dist {
            DistributionSpec::Exponential { rate } if rate == 1.0 && d == 2 && config.mode == Mode::Last => {
                Reference::SqrtSimplex
            }
            DistributionSpec::Bernoulli { p: 1.0 } => Reference::Simplex,
            _ => Reference::Last,
        },
        r => r,
    }
}

fn run_growth(config: &RunConfig) -> Result<CommandOutput, CliError> {
    if config.thresholds.is_empty() {
        return Err(CliError::Usage("growth needs at least one threshold (--t)".into()));
    }
    let d = config.extents.len();
    if d != 2 && d != 3 {
        return Err(Error::Geometry(format!("growth renders boxes in 2 or 3 dimensions, not {d}")).into());
    }
    let bbox = LatticeBox::new(&config.extents)?;
    let field = WeightField::sample(&bbox, &config.dist, config.seed);
    let snaps = growth_snapshots(&field, &config.thresholds, config.mode)?;
    let stem = growth_stem(&config.dist, config.seed, &config.thresholds);
    let mut files = Vec::new();
    if d == 2 {
        files.push((format!("{stem}.pgm"), render_pgm(&snaps)?));
    } else {
        let slices = snaps
            .iter()
            .map(|s| s.axis_slice(&[0]))
            .collect::<Result<Vec<_>, _>>()?;
        files.push((format!("{stem}.pgm"), render_pgm(&slices)?));
        let last = snaps.last().expect("nonempty thresholds");
        files.push((format!("{stem}_height.pgm"), render_height_map(last)?));
    }

    let reference = resolve_reference(config, d);
    let last = snaps.last().expect("nonempty thresholds");
    let shape: Box<dyn ReferenceShape> = match reference {
        Reference::SqrtSimplex => Box::new(SqrtSimplex),
        Reference::Simplex => Box::new(Simplex),
        _ => Box::new(RescaledSnapshot(last.clone())),
    };
    let reference_truncated = reference == Reference::Last && last.truncated;
    let mut stdout = String::new();
    let _ = writeln!(stdout, "reference: {}", shape.describe());
    let rows: Vec<ShapeComparison> = snaps
        .iter()
        .map(|s| compare(s, shape.as_ref(), reference_truncated, &mut stdout))
        .collect();
    let csv = csv_to_string(|buf| write_shape_distance_csv(buf, &config.dist.to_string(), config.mode, &bbox, &rows));
    stdout.push_str(std::str::from_utf8(&csv).expect("ascii csv"));
    files.push(("shape_distance.csv".into(), csv));
    Ok(CommandOutput {
        files,
        stdout,
        failed: false,
    })
}

/// Distances that cannot be measured in the window are reported as NaN.
fn compare(
    snap: &GrowthSnapshot,
    shape: &dyn ReferenceShape,
    reference_truncated: bool,
    log: &mut String,
) -> ShapeComparison {
    let nan = |why: String, log: &mut String| {
        let _ = writeln!(log, "t={}: {why}", snap.t);
        ShapeComparison {
            t: snap.t,
            metric: f64::NAN,
            misclassified: 0,
            reference: shape.describe(),
        }
    };
    if reference_truncated {
        return nan("reference snapshot touches the box boundary".into(), log);
    }
    match shape_distance(snap, shape) {
        Ok(c) => c,
        Err(e) => nan(e.to_string(), log),
    }
}

fn run_animals(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let d = config.d;
    if d < 2 {
        return Err(Error::Geometry(format!("lattice animals need d >= 2, got {d}")).into());
    }
    let nmax = config.n;
    if nmax == 0 {
        return Err(Error::Geometry("animal size must be at least 1".into()).into());
    }
    if nmax > enumeration_limit(d) {
        return Err(Error::Budget(format!(
            "animals of size {nmax} in dimension {d} exceed the enumeration limit {}",
            enumeration_limit(d)
        ))
        .into());
    }
    if config.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let bounds = (1..=nmax)
        .map(|n| animal_bound(&config.dist, n, config.c, d))
        .collect::<Result<Vec<_>, _>>()?;
    let bbox = LatticeBox::new(&vec![nmax + 1; d])?;
    let mut csv = String::from("field,n,max_animal,bound,max_path,dominated\n");
    let mut failed = false;
    for k in 0..config.reps {
        let seed = derive_seed(config.seed, k as u64);
        let centered = CenteredField::sample(&config.dist, seed, d, nmax - 1)?;
        let t = last_passage(&WeightField::sample(&bbox, &config.dist, seed));
        let mut max_path = vec![f64::NEG_INFINITY; nmax + 1];
        let mut z = vec![0usize; d];
        loop {
            let norm: usize = z.iter().sum();
            if (1..=nmax).contains(&norm) {
                max_path[norm] = max_path[norm].max(t.get(&z));
            }
            if !bbox.advance(&mut z) {
                break;
            }
        }
        // both sides are sums of at most n window weights, added in different orders
        let scale = centered.max_abs();
        for n in 1..=nmax {
            let animal = max_animal_weight(&centered, n)?;
            let tol = 2.0 * (n * n) as f64 * f64::EPSILON * scale;
            let dominated = max_path[n] <= animal.max_weight + tol;
            failed |= !dominated;
            let _ = writeln!(
                csv,
                "{k},{n},{},{},{},{}",
                animal.max_weight,
                bounds[n - 1],
                max_path[n],
                if dominated { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(CommandOutput {
        files: vec![("animals.csv".into(), csv.clone().into_bytes())],
        stdout: csv,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_are_file_name_safe() {
        let d: DistributionSpec = "two:0,0.645,1/0.355".parse().unwrap();
        let stem = growth_stem(&d, 4, &[54.0, 1.5]);
        assert!(stem.starts_with("growth_two_0_0.645_"));
        assert!(stem.ends_with("_seed4_t54-1.5"));
        assert!(stem.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)));
    }

    #[test]
    fn auto_reference() {
        let mut cfg = RunConfig::new(Subcommand::Growth, "exp:1".parse().unwrap());
        assert_eq!(resolve_reference(&cfg, 2), Reference::SqrtSimplex);
        assert_eq!(resolve_reference(&cfg, 3), Reference::Last);
        cfg.mode = Mode::First;
        assert_eq!(resolve_reference(&cfg, 2), Reference::Last);
        cfg.dist = "ber:1".parse().unwrap();
        assert_eq!(resolve_reference(&cfg, 2), Reference::Simplex);
    }
}
