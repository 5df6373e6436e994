//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any of them fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dirperc_core::animals::{max_animal_weight, CenteredField};
use dirperc_core::growth::{growth_snapshots, shape_distance, SqrtSimplex};
use dirperc_core::passage::{first_passage, last_passage, passage_between, verify_psi_domination};
use dirperc_core::rng::derive_seed;
use dirperc_core::shape::{
    bernoulli_upper_bound, block_coarsen_check, boundary_asymptotics, boundary_asymptotics_scaled, combined_stderr,
    estimate, estimate_g, estimate_h, estimate_seppalainen, exponential_slope, seppalainen_oracle, truncation_sandwich,
    AsymptoticScale, WeightSign, SLACK_SIGMAS,
};
use dirperc_core::{DistributionSpec, LatticeBox, Mode, WeightField};

struct Verdict {
    passed: bool,
    detail: String,
}

fn spec(s: &str) -> DistributionSpec {
    s.parse().unwrap()
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

type Paths = Vec<Vec<Vec<usize>>>;

/// Every directed path from the origin to `z`, as visited points with `z` excluded.
fn paths(z: &[usize]) -> Paths {
    fn go(cur: &mut Vec<usize>, z: &[usize], path: &mut Vec<Vec<usize>>, out: &mut Paths) {
        if cur.as_slice() == z {
            out.push(path.clone());
            return;
        }
        for i in 0..z.len() {
            if cur[i] < z[i] {
                path.push(cur.clone());
                cur[i] += 1;
                go(cur, z, path, out);
                cur[i] -= 1;
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut vec![0; z.len()], z, &mut Vec::new(), &mut out);
    out
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut boxes: Vec<Vec<usize>> = Vec::new();
    for a in 1..=4 {
        for b in 1..=4 {
            boxes.push(vec![a, b]);
        }
    }
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                boxes.push(vec![a, b, c]);
            }
        }
    }
    let laws = [
        spec("exp:1"),
        spec("unif:-1,2"),
        spec("pareto:1,0.75"),
        spec("two:-1,0.5,2"),
    ];
    let mut path_cache: BTreeMap<Vec<usize>, Paths> = BTreeMap::new();
    let (mut points, mut mismatches) = (0usize, 0usize);
    for (bi, extents) in boxes.iter().enumerate() {
        let bbox = LatticeBox::new(extents).unwrap();
        for k in 0..50u64 {
            let field = WeightField::sample(&bbox, &laws[k as usize % laws.len()], derive_seed(bi as u64, k));
            let last = last_passage(&field);
            let first = first_passage(&field);
            let mut z = vec![0usize; extents.len()];
            loop {
                let sums: Vec<f64> = path_cache
                    .entry(z.clone())
                    .or_insert_with(|| paths(&z))
                    .iter()
                    .map(|p| p.iter().fold(0.0, |acc, q| acc + field.get(q)))
                    .collect();
                let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
                let (hi, lo) = if z.iter().all(|&c| c == 0) {
                    (0.0, 0.0)
                } else {
                    (hi, lo)
                };
                points += 1;
                if last.get(&z) != hi || first.get(&z) != lo {
                    mismatches += 1;
                }
                if !bbox.advance(&mut z) {
                    break;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: mismatches == 0 && within(elapsed, 10),
        detail: format!(
            "{mismatches} mismatches over {points} points in {} boxes x 50 fields, {:.1}s",
            boxes.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn rost_value() -> Verdict {
    let start = Instant::now();
    let e = estimate_g(&spec("exp:1"), &[1.0, 1.0], 600, 200, 1).unwrap();
    let elapsed = start.elapsed();
    Verdict {
        passed: (3.80..=4.00).contains(&e.mean) && within(elapsed, 30),
        detail: format!(
            "g(1,1) = {:.4} ± {:.4} (target 4), {:.1}s",
            e.mean,
            e.stderr,
            elapsed.as_secs_f64()
        ),
    }
}

fn seppalainen_oracle_check() -> Verdict {
    let start = Instant::now();
    // first branch: p = 0.5 <= 2/3
    let oracle = 0.5 + 2.0 * 2f64.sqrt() * 0.5;
    let formula_ok = (seppalainen_oracle(0.5, 2.0, 1.0) - oracle).abs() < 1e-12 && (oracle - 1.9142).abs() < 1e-4;
    let low = estimate_seppalainen(&spec("ber:0.5"), 2.0, 1.0, 500, 200, 3).unwrap();
    let high = estimate_seppalainen(&spec("ber:0.8"), 2.0, 1.0, 500, 200, 4).unwrap();
    let low_ok = (low.mean - 1.9142).abs() <= 0.06 + SLACK_SIGMAS * low.stderr;
    let high_ok = (high.mean - 2.0).abs() <= 0.06 + SLACK_SIGMAS * high.stderr;
    let elapsed = start.elapsed();
    Verdict {
        passed: formula_ok && low_ok && high_ok && within(elapsed, 30),
        detail: format!(
            "Ber(0.5): {:.4} ± {:.4} vs 1.9142; Ber(0.8): {:.4} ± {:.4} vs 2, {:.1}s",
            low.mean,
            low.stderr,
            high.mean,
            high.stderr,
            elapsed.as_secs_f64()
        ),
    }
}

fn bernoulli_inequality() -> Verdict {
    let start = Instant::now();
    // 0.3 + 0.075 + √0.25 · 2 · √1.25 · √0.21
    let bound = 0.375 + 0.5 * 2.0 * 1.25f64.sqrt() * 0.21f64.sqrt();
    let formula_ok = (bernoulli_upper_bound(0.3, 0.25) - bound).abs() < 1e-12 && (bound - 0.8873).abs() < 1e-4;
    let g = estimate_g(&spec("ber:0.3"), &[1.0, 0.25], 4000, 50, 5).unwrap();
    let bound_ok = g.mean <= 0.8873 + SLACK_SIGMAS * g.stderr;
    let bbox = LatticeBox::new(&[40, 16]).unwrap();
    let mut psi_failures = 0;
    for k in 0..200u64 {
        let seed = derive_seed(6, k);
        let field = WeightField::sample(&bbox, &spec("ber:0.5"), seed);
        let n = (seed % 16) as usize;
        let m = ((seed >> 8) % (40 - n as u64 + 1)) as usize;
        let (m, n) = if m + n == 0 { (1, 0) } else { (m, n) };
        if !verify_psi_domination(&field, m.min(40 - n), n.min(15)).unwrap().holds() {
            psi_failures += 1;
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        passed: formula_ok && bound_ok && psi_failures == 0 && within(elapsed, 60),
        detail: format!(
            "g(1,0.25) = {:.4} ± {:.4} <= 0.8873; psi failures {psi_failures}/200, {:.1}s",
            g.mean,
            g.stderr,
            elapsed.as_secs_f64()
        ),
    }
}

fn universality() -> Verdict {
    let start = Instant::now();
    let alphas = [0.09, 0.04, 0.01];
    let exact_ok = alphas.iter().all(|&a: &f64| {
        let g = (1.0 + a.sqrt()).powi(2);
        ((g - 1.0) / a.sqrt() - (2.0 + a.sqrt())).abs() < 1e-12
            && (exponential_slope(1.0, a) - (2.0 + a.sqrt())).abs() < 1e-12
    });
    let exp = boundary_asymptotics(&spec("exp:1"), &[0.04], 1000, 2, 7).unwrap();
    let exact_reported = exp.rows[0].exact_slope.is_some_and(|s| (s - 2.2).abs() < 1e-12);

    let uniform = boundary_asymptotics(&spec("unif:0,1"), &[0.01], 10_000, 50, 8).unwrap();
    let u_slope = uniform.rows[0].slope;
    let uniform_ok = (0.40..=0.62).contains(&u_slope);

    let ber = boundary_asymptotics_scaled(&spec("ber:0.5"), &alphas, AsymptoticScale::Rows(1000), 20, 9).unwrap();
    let target = ber.target_slope();
    let mut ber_ok = true;
    for w in ber.rows.windows(2) {
        let slack = 2.0 * combined_stderr(w[0].slope_stderr, w[1].slope_stderr);
        ber_ok &= (w[1].slope - target).abs() <= (w[0].slope - target).abs() + slack;
    }
    let slopes: Vec<String> = ber
        .rows
        .iter()
        .map(|r| format!("{:.4}±{:.4}", r.slope, r.slope_stderr))
        .collect();
    let elapsed = start.elapsed();
    Verdict {
        passed: exact_ok && exact_reported && uniform_ok && ber_ok && within(elapsed, 300),
        detail: format!(
            "exp slope 2+√α exact; Uniform slope {u_slope:.4} (target {:.4}); Ber(0.5) slopes {} -> {target}, {:.1}s",
            uniform.target_slope(),
            slopes.join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

fn surrogate() -> Verdict {
    let e = spec("exp:1");
    let t = 1.0f64;
    // memoryless tail: X | X > t is t + Exp(1)
    let m = t + 1.0;
    let w = t * t + 2.0 * t + 2.0;
    let p_oracle = (m - t).powi(2) / ((m - t).powi(2) + w - m * m);
    let u_oracle = t + (m - t) / p_oracle;
    let params = e.surrogate_parameters(t).unwrap().unwrap();
    let s = e.bounded_surrogate(t).unwrap();
    let passed = (p_oracle - 0.5).abs() < 1e-12
        && (u_oracle - 3.0).abs() < 1e-12
        && (params.p - p_oracle).abs() < 1e-9
        && (params.u - u_oracle).abs() < 1e-9
        && (s.mean() - 1.0).abs() < 1e-9
        && (s.variance() - 1.0).abs() < 1e-9;
    Verdict {
        passed,
        detail: format!(
            "p = {}, u = {}, mean = {}, variance = {}",
            params.p,
            params.u,
            s.mean(),
            s.variance()
        ),
    }
}

fn truncation() -> Verdict {
    let pareto = spec("pareto:1/3,1.5");
    let mut means = Vec::new();
    let mut monotone = true;
    let mut pathwise = true;
    let mut prev: Option<(f64, f64)> = None;
    for level in [2.0, 4.0, 8.0, 16.0] {
        let rep = truncation_sandwich(&pareto, &[1.0, 1.0], level, 1.0, 300, 50, 10).unwrap();
        pathwise &= rep.pathwise_dominates;
        let cur = (rep.truncated.mean, rep.truncated.stderr);
        if let Some((m, s)) = prev {
            monotone &= cur.0 >= m - 2.0 * combined_stderr(s, cur.1);
        }
        means.push(format!("{:.4}", cur.0));
        prev = Some(cur);
    }
    for law in ["exp:1", "geo:0.4", "unif:0,3"] {
        let rep = truncation_sandwich(&spec(law), &[1.0, 0.5], 1.5, 1.0, 100, 20, 11).unwrap();
        pathwise &= rep.pathwise_dominates;
    }
    Verdict {
        passed: monotone && pathwise,
        detail: format!(
            "truncated means over L=2,4,8,16: {}; pathwise domination {pathwise}",
            means.join(", ")
        ),
    }
}

fn block_coarsening() -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, law) in ["ber:0.5", "unif:0,1"].iter().enumerate() {
        let rep = block_coarsen_check(&spec(law), 0.04, 3, 3000, 50, 12 + i as u64).unwrap();
        let ok = rep.bound_k == 1.0
            && (rep.bound() - 0.12).abs() < 1e-12
            && rep.difference().abs() <= 0.12 + SLACK_SIGMAS * rep.combined_stderr();
        passed &= ok;
        parts.push(format!(
            "{law}: |diff| {:.4} ± {:.4}",
            rep.difference().abs(),
            rep.combined_stderr()
        ));
    }
    Verdict {
        passed,
        detail: format!("{} <= 0.12", parts.join("; ")),
    }
}

fn limit_shape() -> Verdict {
    let start = Instant::now();
    let bbox = LatticeBox::new(&[700, 700]).unwrap();
    let field = WeightField::sample(&bbox, &spec("exp:1"), 2);
    let snaps = growth_snapshots(&field, &[75.0, 150.0, 300.0], Mode::Last).unwrap();
    let metrics: Vec<f64> = snaps
        .iter()
        .map(|s| shape_distance(s, &SqrtSimplex).unwrap().metric)
        .collect();
    let nonincreasing = metrics.windows(2).all(|w| w[1] <= 1.2 * w[0]);
    let close = metrics[2] <= 0.05;
    let elapsed = start.elapsed();
    Verdict {
        passed: close && nonincreasing && within(elapsed, 60),
        detail: format!(
            "metric at t=75,150,300: {:.4}, {:.4}, {:.4}; need <= 0.05 at t=300 (nonincreasing: {nonincreasing}), {:.1}s",
            metrics[0],
            metrics[1],
            metrics[2],
            elapsed.as_secs_f64()
        ),
    }
}

fn property_suite() -> Verdict {
    let mut failures = Vec::new();

    // integer weights add exactly in any order
    let bbox = LatticeBox::new(&[13, 13]).unwrap();
    let mut triples = 0;
    for k in 0..100u64 {
        let field = WeightField::sample(&bbox, &spec("geo:0.3"), derive_seed(13, k));
        for i in 0..10u64 {
            let h = derive_seed(k, i);
            let x = [(h % 7) as usize, ((h >> 8) % 7) as usize];
            let y = [((h >> 16) % 6) as usize, ((h >> 24) % 6) as usize];
            let xy = [x[0] + y[0], x[1] + y[1]];
            for mode in [Mode::Last, Mode::First] {
                let t = |a: &[usize], b: &[usize]| passage_between(&field, a, b, mode).unwrap();
                let (split, whole) = (t(&[0, 0], &x) + t(&x, &xy), t(&[0, 0], &xy));
                let ok = match mode {
                    Mode::Last => split <= whole,
                    Mode::First => split >= whole,
                };
                if !ok {
                    failures.push(format!("superadditivity at {x:?}+{y:?}"));
                }
            }
            triples += 1;
        }
    }

    for law in ["exp:1", "unif:-1,2"] {
        let field = WeightField::sample(&LatticeBox::new(&[30, 20, 4]).unwrap(), &spec(law), 14);
        let s = first_passage(&field);
        let t = last_passage(&field.negated());
        if s.values().iter().zip(t.values()).any(|(a, b)| *a != -*b) {
            failures.push(format!("field duality for {law}"));
        }
        let h = estimate_h(&spec(law), &[1.0, 0.6], 80, 10, 15).unwrap();
        let g = estimate(&spec(law), &[1.0, 0.6], 80, 10, 15, Mode::Last, WeightSign::Negated).unwrap();
        if h.values.iter().zip(&g.values).any(|(a, b)| *a != -*b) {
            failures.push(format!("estimate duality for {law}"));
        }
    }

    for beta in [0.5, 1.0] {
        let a = estimate_g(&spec("exp:1"), &[1.0, beta], 200, 40, 16).unwrap();
        let b = estimate_g(&spec("exp:1"), &[beta, 1.0], 200, 40, 17).unwrap();
        if (a.mean - b.mean).abs() > SLACK_SIGMAS * combined_stderr(a.stderr, b.stderr) {
            failures.push(format!("permutation symmetry at β={beta}"));
        }
    }

    // dyadic weights add exactly in any order
    let box9 = LatticeBox::new(&[9, 9]).unwrap();
    for k in 0..20u64 {
        let seed = derive_seed(18, k);
        let law = spec("two:0.5,0.7,3");
        let centered = CenteredField::sample(&law, seed, 2, 7).unwrap();
        let t = last_passage(&WeightField::sample(&box9, &law, seed));
        let maxima: Vec<f64> = (1..=8)
            .map(|n| max_animal_weight(&centered, n).unwrap().max_weight)
            .collect();
        for x in 0..=8usize {
            for y in 0..=(8 - x) {
                if x + y > 0 && t.get(&[x, y]) > maxima[x + y - 1] {
                    failures.push(format!("animal domination at ({x},{y}) field {k}"));
                }
            }
        }
    }

    let gbox = LatticeBox::new(&[150, 120]).unwrap();
    for (k, law) in ["exp:1", "geo:0.5", "pareto:1/3,1.5"].iter().enumerate() {
        let field = WeightField::sample(&gbox, &spec(law), 19 + k as u64);
        for mode in [Mode::Last, Mode::First] {
            let snaps = growth_snapshots(&field, &[5.0, 20.0, 40.0, 80.0], mode).unwrap();
            if snaps.windows(2).any(|w| !w[0].is_subset_of(&w[1])) {
                failures.push(format!("nestedness for {law} {mode}"));
            }
            if mode == Mode::Last && snaps.iter().any(|s| !s.is_down_set()) {
                failures.push(format!("down-set for {law}"));
            }
        }
    }

    Verdict {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("superadditivity on {triples} triples, duality, symmetry, animal domination, nestedness")
        } else {
            failures.join("; ")
        },
    }
}

fn dirperc(args: &[&str], out: &Path, threads: usize) {
    let status = Command::new(env!("CARGO_BIN_EXE_dirperc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn reproducibility() -> Verdict {
    let runs: [&[&str]; 5] = [
        &[
            "estimate", "--dist", "exp:1", "--x", "1,1", "--x", "1,0.3", "--n", "200", "--reps", "16", "--seed", "1",
        ],
        &[
            "asymptotics",
            "--dist",
            "ber:0.5",
            "--alpha",
            "0.25,0.09",
            "--n",
            "600",
            "--reps",
            "8",
            "--seed",
            "2",
        ],
        &[
            "growth", "--dist", "exp:1", "--t", "20,40,60", "--box", "120,120", "--seed", "3",
        ],
        &["animals", "--dist", "geo:0.4", "--n", "6", "--reps", "2", "--seed", "4"],
        &["verify", "--seed", "7"],
    ];
    let mut differing = Vec::new();
    let mut compared = 0;
    for args in runs {
        let dirs: Vec<_> = (0..4).map(|_| tempfile::tempdir().unwrap()).collect();
        dirperc(args, dirs[0].path(), 1);
        dirperc(args, dirs[1].path(), 1);
        dirperc(args, dirs[2].path(), 8);
        let manifest = dirs[0].path().join("run.manifest.txt");
        dirperc(&["replay", manifest.to_str().unwrap()], dirs[3].path(), 8);
        let reference = dir_contents(dirs[0].path());
        for d in &dirs[1..] {
            compared += 1;
            if dir_contents(d.path()) != reference {
                differing.push(args[0]);
            }
        }
    }
    Verdict {
        passed: differing.is_empty(),
        detail: format!(
            "{compared} output directories compared (repeat, threads 1 vs 8, manifest replay); differing: {differing:?}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("DP equals path enumeration", oracle_equivalence),
        ("exponential time constant", rost_value),
        ("monotone-column oracle", seppalainen_oracle_check),
        ("Bernoulli bound and shear domination", bernoulli_inequality),
        ("boundary universality", universality),
        ("bounded surrogate", surrogate),
        ("truncation", truncation),
        ("block coarsening", block_coarsening),
        ("exponential limit shape", limit_shape),
        ("property suite", property_suite),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
