//! The oracle and inequality suite behind `dirperc verify`. Sizes are small
//! enough for a few seconds of work; every check derives its own seed from
//! the master seed.

use std::fmt::Write as _;

use dirperc_core::passage::{brute_force_passage, passage_between, passage_field, verify_psi_domination};
use dirperc_core::rng::derive_seed;
use dirperc_core::shape::{
    bernoulli_upper_bound, block_coarsen_check, comparison_bound, csv_field, estimate, estimate_g, estimate_h,
    estimate_seppalainen, mean_and_stderr, rost_oracle, seppalainen_oracle, WeightSign, SLACK_SIGMAS,
};
use dirperc_core::{DistributionSpec, LatticeBox, Mode, Result, WeightField};

use crate::commands::CommandOutput;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(u64) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 10] = [
    ("dp-vs-brute-force", dp_vs_brute_force),
    ("rost", rost),
    ("seppalainen", seppalainen),
    ("bernoulli-bound", bernoulli_bound),
    ("comparison-bound", comparison),
    ("surrogate", surrogate),
    ("block-coarsening", block_coarsening),
    ("psi-domination", psi_domination),
    ("superadditivity", superadditivity),
    ("duality", duality),
];

fn spec(s: &str) -> DistributionSpec {
    s.parse().expect("built-in law")
}

pub fn run_checks(seed: u64) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let (passed, detail) = match check(derive_seed(seed, i as u64)) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { name, passed, detail }
        })
        .collect()
}

pub fn run_suite(seed: u64) -> CommandOutput {
    let results = run_checks(seed);
    let mut table = format!("{:<20} {:<6} detail\n", "check", "status");
    let mut csv = String::from("check,status,detail\n");
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(table, "{:<20} {status:<6} {}", r.name, r.detail);
        let _ = writeln!(csv, "{},{status},{}", r.name, csv_field(&r.detail));
    }
    let failed = results.iter().any(|r| !r.passed);
    let _ = writeln!(
        table,
        "{} of {} checks passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    CommandOutput {
        files: vec![("verify.csv".into(), csv.into_bytes())],
        stdout: table,
        failed,
    }
}

fn dp_vs_brute_force(seed: u64) -> Result<(bool, String)> {
    let mut compared = 0usize;
    let mut mismatches = 0usize;
    for (b, extents) in [[4usize, 4, 1], [3, 3, 3]].iter().enumerate() {
        let dims: &[usize] = if extents[2] == 1 { &extents[..2] } else { extents };
        let bbox = LatticeBox::new(dims)?;
        for (l, law) in ["exp:1", "unif:-1,1"].iter().enumerate() {
            for k in 0..10u64 {
                let field = WeightField::sample(&bbox, &spec(law), derive_seed(seed, (b * 100 + l * 10) as u64 + k));
                for mode in [Mode::Last, Mode::First] {
                    let dp = passage_field(&field, mode);
                    let mut z = vec![0usize; dims.len()];
                    loop {
                        compared += 1;
                        if dp.get(&z) != brute_force_passage(&field, &z, mode)? {
                            mismatches += 1;
                        }
                        if !bbox.advance(&mut z) {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in {compared} points")))
}

fn rost(seed: u64) -> Result<(bool, String)> {
    let e = estimate_g(&spec("exp:1"), &[1.0, 1.0], 300, 40, seed)?;
    let target = rost_oracle(1.0);
    let ok = e.mean >= 3.8 && e.mean <= target;
    Ok((ok, format!("g(1,1) = {:.4} ± {:.4}, oracle {target}", e.mean, e.stderr)))
}

fn seppalainen(seed: u64) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, (law, p)) in [("ber:0.5", 0.5), ("ber:0.8", 0.8)].into_iter().enumerate() {
        let e = estimate_seppalainen(&spec(law), 2.0, 1.0, 200, 40, derive_seed(seed, i as u64))?;
        let oracle = seppalainen_oracle(p, 2.0, 1.0);
        ok &= (e.mean - oracle).abs() <= 0.06 + SLACK_SIGMAS * e.stderr;
        parts.push(format!("p={p}: {:.4} ± {:.4} vs {oracle:.4}", e.mean, e.stderr));
    }
    Ok((ok, parts.join("; ")))
}

fn bernoulli_bound(seed: u64) -> Result<(bool, String)> {
    let e = estimate_g(&spec("ber:0.3"), &[1.0, 0.25], 1000, 20, seed)?;
    let bound = bernoulli_upper_bound(0.3, 0.25);
    let ok = e.mean <= bound + SLACK_SIGMAS * e.stderr;
    Ok((ok, format!("g(1,0.25) = {:.4} ± {:.4} <= {bound:.4}", e.mean, e.stderr)))
}

fn comparison(seed: u64) -> Result<(bool, String)> {
    let (a, b) = (spec("exp:1"), spec("unif:0,2"));
    let alpha = 0.25;
    let bound = comparison_bound(&a, &b, alpha)?;
    // equal seeds couple the two fields through shared uniforms
    let ga = estimate_g(&a, &[1.0, alpha], 400, 20, seed)?;
    let gb = estimate_g(&b, &[1.0, alpha], 400, 20, seed)?;
    let diffs: Vec<f64> = ga.values.iter().zip(&gb.values).map(|(x, y)| x - y).collect();
    let (gap, se) = mean_and_stderr(&diffs);
    let gap = (gap - (1.0 + alpha) * (a.mean() - b.mean())).abs();
    let ok = gap <= bound + SLACK_SIGMAS * se;
    Ok((ok, format!("centred gap {gap:.4} ± {se:.4} <= {bound:.4}")))
}

fn surrogate(_seed: u64) -> Result<(bool, String)> {
    let e = spec("exp:1");
    let params = e.surrogate_parameters(1.0)?.expect("exponential tail above 1");
    let s = e.bounded_surrogate(1.0)?;
    let ok = (params.p - 0.5).abs() < 1e-9
        && (params.u - 3.0).abs() < 1e-9
        && (s.mean() - 1.0).abs() < 1e-9
        && (s.variance() - 1.0).abs() < 1e-9;
    Ok((
        ok,
        format!(
            "p = {:.9}, u = {:.9}, mean = {:.9}, variance = {:.9}",
            params.p,
            params.u,
            s.mean(),
            s.variance()
        ),
    ))
}

fn block_coarsening(seed: u64) -> Result<(bool, String)> {
    let rep = block_coarsen_check(&spec("ber:0.5"), 0.04, 3, 1500, 20, seed)?;
    Ok((
        rep.holds(),
        format!(
            "|diff| = {:.4} ± {:.4} <= {:.4}",
            rep.difference().abs(),
            rep.combined_stderr(),
            rep.bound()
        ),
    ))
}

fn psi_domination(seed: u64) -> Result<(bool, String)> {
    let bbox = LatticeBox::new(&[30, 12])?;
    let mut failures = 0;
    for k in 0..50u64 {
        let field = WeightField::sample(&bbox, &spec("ber:0.5"), derive_seed(seed, k));
        for (m, n) in [(18, 11), (24, 5)] {
            if !verify_psi_domination(&field, m, n)?.holds() {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("{failures} failures on 100 field/target pairs")))
}

fn superadditivity(seed: u64) -> Result<(bool, String)> {
    // integer weights add exactly in any order
    let bbox = LatticeBox::new(&[13, 13])?;
    let mut violations = 0;
    let mut triples = 0;
    for k in 0..20u64 {
        let field = WeightField::sample(&bbox, &spec("geo:0.3"), derive_seed(seed, k));
        for i in 0..10u64 {
            let h = derive_seed(k, i);
            let x = [(h % 7) as usize, ((h >> 8) % 7) as usize];
            let y = [((h >> 16) % 6) as usize, ((h >> 24) % 6) as usize];
            let xy = [x[0] + y[0], x[1] + y[1]];
            let t = |a: &[usize], b: &[usize]| passage_between(&field, a, b, Mode::Last);
            if t(&[0, 0], &x)? + t(&x, &xy)? > t(&[0, 0], &xy)? {
                violations += 1;
            }
            triples += 1;
        }
    }
    Ok((violations == 0, format!("{violations} violations in {triples} triples")))
}

fn duality(seed: u64) -> Result<(bool, String)> {
    let mut mismatches = 0;
    let mut compared = 0;
    for (i, law) in ["exp:1", "unif:-1,2"].iter().enumerate() {
        let s = spec(law);
        let h = estimate_h(&s, &[1.0, 0.7], 60, 8, derive_seed(seed, i as u64))?;
        let g = estimate(
            &s,
            &[1.0, 0.7],
            60,
            8,
            derive_seed(seed, i as u64),
            Mode::Last,
            WeightSign::Negated,
        )?;
        for (a, b) in h.values.iter().zip(&g.values) {
            compared += 1;
            if *a != -*b {
                mismatches += 1;
            }
        }
    }
    Ok((
        mismatches == 0,
        format!("{mismatches} mismatches in {compared} replicates"),
    ))
}
