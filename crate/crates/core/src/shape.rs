//! Monte Carlo estimates of the shape functions `g` and `h`, the exactly
//! solvable reference values, and the closed-form bounds they are checked
//! against.
//!
//! Replicate `k` of an estimate with master seed `s` samples its weights from
//! the cell streams of `derive_seed(s, k)`. Replicates run on the rayon pool
//! and land in index order, so every statistic is independent of the thread
//! count.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::distributions::{distance_half_integral, DistributionSpec};
use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Mode, WeightField};
use crate::passage::{passage_field, sampled_seppalainen, streaming_passage_2d};
use crate::rng::{cell_key2, derive_seed, CounterStream};

/// Number of standard errors allowed in Monte Carlo inequality checks.
pub const SLACK_SIGMAS: f64 = 3.0;

/// Whether replicate fields use `X` or `-X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightSign {
    #[default]
    Plain,
    Negated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeEstimate {
    pub dist: String,
    pub mode: Mode,
    pub direction: Vec<f64>,
    /// `⌊n x⌋`
    pub target: Vec<usize>,
    pub n: usize,
    /// `T(⌊nx⌋)/n` for each replicate, in replicate order.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over `√r`.
    pub stderr: f64,
}

impl ShapeEstimate {
    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    fn from_values(
        dist: String,
        mode: Mode,
        direction: &[f64],
        target: Vec<usize>,
        n: usize,
        values: Vec<f64>,
    ) -> Self {
        let (mean, stderr) = mean_and_stderr(&values);
        Self {
            dist,
            mode,
            direction: direction.to_vec(),
            target,
            n,
            values,
            mean,
            stderr,
        }
    }
}

/// Mean and standard error (`sd / √r`, `sd` with the `r - 1` divisor),
/// summed in slice order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (r - 1.0)).sqrt() / r.sqrt())
}

/// `√(a² + b²)`
pub fn combined_stderr(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// `⌊n x⌋`, rejecting directions that collapse a nonzero coordinate.
pub fn lattice_target(x: &[f64], n: usize) -> Result<Vec<usize>> {
    if x.len() < 2 {
        return Err(Error::Geometry(format!("direction {x:?} needs at least 2 coordinates")));
    }
    if n == 0 {
        return Err(Error::Geometry("scale n must be at least 1".into()));
    }
    let mut target = Vec::with_capacity(x.len());
    for &xi in x {
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(Error::Geometry(format!(
                "direction {x:?} must be finite and nonnegative"
            )));
        }
        let c = (n as f64 * xi).floor();
        if xi > 0.0 && c < 1.0 {
            return Err(Error::Geometry(format!(
                "scale {n} collapses coordinate {xi} of {x:?} to 0"
            )));
        }
        target.push(c as usize);
    }
    if target.iter().all(|&c| c == 0) {
        return Err(Error::Geometry(format!("direction {x:?} is zero")));
    }
    Ok(target)
}

fn check_replicates(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 replicates, got {r}")));
    }
    Ok(())
}

fn replicate_passage(
    spec: &DistributionSpec,
    target: &[usize],
    seed: u64,
    mode: Mode,
    sign: WeightSign,
) -> Result<f64> {
    let s = match sign {
        WeightSign::Plain => 1.0,
        WeightSign::Negated => -1.0,
    };
    if target.len() == 2 {
        return Ok(streaming_passage_2d(target[0], target[1], mode, |x, y| {
            s * spec.sample(&mut CounterStream::new(cell_key2(seed, x as i64, y as i64)))
        }));
    }
    let extents: Vec<usize> = target.iter().map(|c| c + 1).collect();
    let bbox = LatticeBox::new(&extents)?;
    let mut field = WeightField::sample(&bbox, spec, seed);
    if sign == WeightSign::Negated {
        field = field.negated();
    }
    Ok(passage_field(&field, mode).get(target))
}

/// `r` replicates of `T(⌊nx⌋)/n` (last mode) or `S(⌊nx⌋)/n` (first mode).
pub fn estimate(
    spec: &DistributionSpec,
    x: &[f64],
    n: usize,
    r: usize,
    seed: u64,
    mode: Mode,
    sign: WeightSign,
) -> Result<ShapeEstimate> {
    let target = lattice_target(x, n)?;
    check_replicates(r)?;
    let values = (0..r)
        .into_par_iter()
        .map(|k| replicate_passage(spec, &target, derive_seed(seed, k as u64), mode, sign).map(|t| t / n as f64))
        .collect::<Result<Vec<f64>>>()?;
    let dist = match sign {
        WeightSign::Plain => spec.to_string(),
        WeightSign::Negated => format!("-{spec}"),
    };
    Ok(ShapeEstimate::from_values(dist, mode, x, target, n, values))
}

pub fn estimate_g(spec: &DistributionSpec, x: &[f64], n: usize, r: usize, seed: u64) -> Result<ShapeEstimate> {
    estimate(spec, x, n, r, seed, Mode::Last, WeightSign::Plain)
}

pub fn estimate_h(spec: &DistributionSpec, x: &[f64], n: usize, r: usize, seed: u64) -> Result<ShapeEstimate> {
    estimate(spec, x, n, r, seed, Mode::First, WeightSign::Plain)
}

/// `T̃(⌊α1 n⌋, ⌊α2 n⌋)/n` in the monotone-column model.
pub fn estimate_seppalainen(
    spec: &DistributionSpec,
    alpha1: f64,
    alpha2: f64,
    n: usize,
    r: usize,
    seed: u64,
) -> Result<ShapeEstimate> {
    let x = [alpha1, alpha2];
    let target = lattice_target(&x, n)?;
    if target[0] == 0 {
        return Err(Error::Geometry(
            "the monotone-column model needs at least one column".into(),
        ));
    }
    check_replicates(r)?;
    let values: Vec<f64> = (0..r)
        .into_par_iter()
        .map(|k| sampled_seppalainen(spec, derive_seed(seed, k as u64), target[0], target[1]) / n as f64)
        .collect();
    Ok(ShapeEstimate::from_values(
        spec.to_string(),
        Mode::Last,
        &x,
        target,
        n,
        values,
    ))
}

/// `g(1, α) = 1 + 2√α + α` for unit-rate exponential weights.
pub fn rost_oracle(alpha: f64) -> f64 {
    1.0 + 2.0 * alpha.sqrt() + alpha
}

/// Shape function of the monotone-column model with Bernoulli(p) weights in
/// direction `(α1, α2)`.
pub fn seppalainen_oracle(p: f64, alpha1: f64, alpha2: f64) -> f64 {
    if p <= alpha1 / (alpha1 + alpha2) {
        p * (alpha1 - alpha2) + 2.0 * (alpha1 * alpha2).sqrt() * (p * (1.0 - p)).sqrt()
    } else {
        alpha1
    }
}

/// Upper bound on `g(1, α)` for Bernoulli(p) weights.
pub fn bernoulli_upper_bound(p: f64, alpha: f64) -> f64 {
    (1.0 + alpha) * p + 2.0 * alpha.sqrt() * (1.0 + alpha).sqrt() * (p * (1.0 - p)).sqrt()
}

/// Bound on `|g1(1,α) - g2(1,α) - (1+α)(μ1 - μ2)|`.
pub fn comparison_bound(spec1: &DistributionSpec, spec2: &DistributionSpec, alpha: f64) -> Result<f64> {
    let dist = distance_half_integral(spec1, spec2)?;
    if dist == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (alpha * (1.0 + alpha)).sqrt() * dist)
}

/// `Σ_{x_i > 0} [h log((x_i + h)/h) + x_i log((x_i + h)/x_i)]`, zero at `h = 0`.
pub fn phi(h: f64, x: &[f64]) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    x.iter()
        .filter(|&&xi| xi > 0.0)
        .map(|&xi| h * ((xi + h) / h).ln() + xi * ((xi + h) / xi).ln())
        .sum()
}

/// `hL + 8L √(‖(h, x)‖ φ(h, x))` for weights bounded by `L`.
pub fn continuity_modulus(level: f64, h: f64, x: &[f64]) -> f64 {
    let norm = h + x.iter().sum::<f64>();
    h * level + 8.0 * level * (norm * phi(h, x)).sqrt()
}

/// `(‖x‖ μ, c ‖x‖ ∫_0^∞ (1-F)^(1/d))` with `d = x.len()`.
pub fn finiteness_bounds(spec: &DistributionSpec, x: &[f64], c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("constant c = {c} must be positive")));
    }
    let norm: f64 = x.iter().sum();
    let tail = spec
        .moments(0.0, x.len())?
        .upper_tail
        .ok_or_else(|| Error::CdfUnavailable(spec.to_string()))?;
    let upper = if tail == 0.0 { 0.0 } else { c * norm * tail };
    Ok((norm * spec.mean(), upper))
}

/// Exponential concentration bound `exp(-u²/(64 R L²) + 64)`. It exceeds 1
/// unless `u > 64 L √R`, so it is only ever reported.
pub fn talagrand_tail(u: f64, r: f64, level: f64) -> f64 {
    (-u * u / (64.0 * r * level * level) + 64.0).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub level: f64,
    pub plain: ShapeEstimate,
    /// Same seeds, weights clamped to `[-L, L]`.
    pub truncated: ShapeEstimate,
    /// `‖x‖ ∫_{-∞}^{-L} F`
    pub lower_correction: f64,
    /// `c ‖x‖ ∫_L^∞ (1-F)^(1/d)`
    pub upper_correction: f64,
    /// Every replicate has `T >= T^(L)`.
    pub pathwise_dominates: bool,
}

impl TruncationReport {
    /// `ĝ >= ĝ^(L) - lower_correction - 3 combined stderr`.
    pub fn lower_bound_holds(&self) -> bool {
        let slack = SLACK_SIGMAS * combined_stderr(self.plain.stderr, self.truncated.stderr);
        self.plain.mean >= self.truncated.mean - self.lower_correction - slack
    }
}

pub fn truncation_sandwich(
    spec: &DistributionSpec,
    x: &[f64],
    level: f64,
    c: f64,
    n: usize,
    r: usize,
    seed: u64,
) -> Result<TruncationReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("constant c = {c} must be positive")));
    }
    let clamped = DistributionSpec::truncated(spec.clone(), level)?;
    let plain = estimate_g(spec, x, n, r, seed)?;
    let truncated = estimate_g(&clamped, x, n, r, seed)?;
    let norm: f64 = x.iter().sum();
    let lower_correction = norm * spec.lower_tail(level, 1.0)?;
    let upper_tail = spec.upper_tail(level, 1.0 / x.len() as f64)?;
    let upper_correction = if upper_tail == 0.0 { 0.0 } else { c * norm * upper_tail };
    let pathwise_dominates = plain.values.iter().zip(&truncated.values).all(|(a, b)| a >= b);
    Ok(TruncationReport {
        level,
        plain,
        truncated,
        lower_correction,
        upper_correction,
        pathwise_dominates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub alpha: f64,
    pub block: u32,
    /// `sup |X|`
    pub bound_k: f64,
    /// `ĝ_F(1, α)` at scale `n`.
    pub fine: ShapeEstimate,
    /// `ĝ_{F^(r)}(1, α r)` at scale `⌊n / r⌋`.
    pub coarse: ShapeEstimate,
}

impl BlockReport {
    /// `ĝ_F(1, α) - ĝ_{F^(r)}(1, αr) / r`
    pub fn difference(&self) -> f64 {
        self.fine.mean - self.coarse.mean / f64::from(self.block)
    }

    pub fn combined_stderr(&self) -> f64 {
        combined_stderr(self.fine.stderr, self.coarse.stderr / f64::from(self.block))
    }

    /// `α r K`
    pub fn bound(&self) -> f64 {
        self.alpha * f64::from(self.block) * self.bound_k
    }

    pub fn holds(&self) -> bool {
        self.difference().abs() <= self.bound() + SLACK_SIGMAS * self.combined_stderr()
    }
}

/// Compares the direction-`(1, α)` shape with that of horizontal blocks of
/// `block` sites. The coarse estimate uses an independent master seed.
pub fn block_coarsen_check(
    spec: &DistributionSpec,
    alpha: f64,
    block: u32,
    n: usize,
    r: usize,
    seed: u64,
) -> Result<BlockReport> {
    let bound_k = spec
        .support_bound()
        .ok_or_else(|| Error::Unbounded(format!("{spec} has unbounded support")))?;
    let coarse_spec = DistributionSpec::block_sum(spec.clone(), block)?;
    let fine = estimate_g(spec, &[1.0, alpha], n, r, seed)?;
    let coarse_n = n / block as usize;
    let coarse = estimate_g(
        &coarse_spec,
        &[1.0, alpha * f64::from(block)],
        coarse_n,
        r,
        derive_seed(seed, u64::MAX),
    )?;
    Ok(BlockReport {
        alpha,
        block,
        bound_k,
        fine,
        coarse,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsRow {
    pub alpha: f64,
    pub estimate: ShapeEstimate,
    /// `(ĝ(1, α) - μ) / √α`
    pub slope: f64,
    pub slope_stderr: f64,
    /// Exact slope where the shape function is known.
    pub exact_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub dist: String,
    pub mu: f64,
    pub sigma: f64,
    pub rows: Vec<AsymptoticsRow>,
}

impl AsymptoticsReport {
    /// `2σ`
    pub fn target_slope(&self) -> f64 {
        2.0 * self.sigma
    }

    /// Columns `dist,alpha,n,reps,mean,stderr,slope,target_slope`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "dist,alpha,n,reps,mean,stderr,slope,target_slope")?;
        for row in &self.rows {
            let e = &row.estimate;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&self.dist),
                row.alpha,
                e.n,
                e.replicates(),
                e.mean,
                e.stderr,
                row.slope,
                self.target_slope()
            )?;
        }
        Ok(())
    }
}

/// Exact `(g(1, α) - μ)/√α` for exponential weights: `(2 + √α)/rate`.
pub fn exponential_slope(rate: f64, alpha: f64) -> f64 {
    (rost_oracle(alpha) - 1.0) / alpha.sqrt() / rate
}

/// How the scale `n` is chosen for each `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticScale {
    /// The same `n` for every `α`.
    Fixed(usize),
    /// `n = round(k / α)`, holding the number of rows `⌊nα⌋` near `k`; the
    /// finite-size bias of the slope depends on `nα`, so this keeps it
    /// comparable across `α`.
    Rows(usize),
}

impl AsymptoticScale {
    pub fn n_for(self, alpha: f64) -> usize {
        match self {
            Self::Fixed(n) => n,
            Self::Rows(k) => (k as f64 / alpha).round() as usize,
        }
    }
}

pub fn boundary_asymptotics(
    spec: &DistributionSpec,
    alphas: &[f64],
    n: usize,
    r: usize,
    seed: u64,
) -> Result<AsymptoticsReport> {
    boundary_asymptotics_scaled(spec, alphas, AsymptoticScale::Fixed(n), r, seed)
}

pub fn boundary_asymptotics_scaled(
    spec: &DistributionSpec,
    alphas: &[f64],
    scale: AsymptoticScale,
    r: usize,
    seed: u64,
) -> Result<AsymptoticsReport> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("empty α list".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter(format!("α values {alphas:?} must be positive")));
    }
    if alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "α values {alphas:?} must be strictly decreasing"
        )));
    }
    for &alpha in alphas {
        let n = scale.n_for(alpha);
        if (n as f64 * alpha).floor() < 10.0 {
            return Err(Error::Geometry(format!("⌊n α⌋ = ⌊{n} · {alpha}⌋ is below 10")));
        }
    }
    let mu = spec.mean();
    let sigma = spec.variance().sqrt();
    if !(mu.is_finite() && sigma.is_finite()) {
        return Err(Error::InfiniteVariance(spec.to_string()));
    }
    let mut rows = Vec::with_capacity(alphas.len());
    for (i, &alpha) in alphas.iter().enumerate() {
        let estimate = estimate_g(spec, &[1.0, alpha], scale.n_for(alpha), r, derive_seed(seed, i as u64))?;
        let root = alpha.sqrt();
        let exact_slope = match spec {
            DistributionSpec::Exponential { rate } => Some(exponential_slope(*rate, alpha)),
            _ => None,
        };
        rows.push(AsymptoticsRow {
            alpha,
            slope: (estimate.mean - mu) / root,
            slope_stderr: estimate.stderr / root,
            estimate,
            exact_slope,
        });
    }
    Ok(AsymptoticsReport {
        dist: spec.to_string(),
        mu,
        sigma,
        rows,
    })
}

/// Quotes a field when it contains a comma.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Columns `dist,mode,x1..xd,n,reps,mean,stderr`; all estimates must share `d`.
pub fn write_estimates_csv<W: Write>(mut out: W, estimates: &[ShapeEstimate]) -> io::Result<()> {
    let d = estimates.first().map_or(2, |e| e.direction.len());
    let xs: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    writeln!(out, "dist,mode,{},n,reps,mean,stderr", xs.join(","))?;
    for e in estimates {
        if e.direction.len() != d {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "mixed dimensions in one CSV",
            ));
        }
        let xs: Vec<String> = e.direction.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&e.dist),
            e.mode,
            xs.join(","),
            e.n,
            e.replicates(),
            e.mean,
            e.stderr
        )?;
    }
    Ok(())
}
