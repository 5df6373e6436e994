//! Weight laws: evaluation, sampling by inverse transform, moments and tail
//! integrals, truncation, block sums and the bounded-support tail surrogate.
//!
//! Every law here is bounded below, which keeps lower-tail integrals on finite
//! ranges. Sampling goes through [`DistributionSpec::inverse_cdf`] with the
//! sup-convention `F⁻¹(u) = sup{x : F(x) ≤ u}`, so two laws fed the same
//! uniform are monotonically coupled.

mod grammar;

pub use grammar::parse;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, integrate_to_infinity};
use crate::rng::UniformSource;

/// Absolute tolerance for moment and tail quadratures.
pub const MOMENT_TOL: f64 = 1e-10;
/// Absolute tolerance for the half-power CDF distance.
pub const DISTANCE_TOL: f64 = 1e-8;

/// Longest list of integer breakpoints a geometric law will hand out.
const MAX_BREAKPOINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Exponential {
        rate: f64,
    },
    /// `P(X = k) = (1-p)^k p` on `{0, 1, 2, ...}`.
    Geometric {
        p: f64,
    },
    /// `P(X = 1) = p`, `P(X = 0) = 1 - p`.
    Bernoulli {
        p: f64,
    },
    TwoPoint {
        a: f64,
        weight_a: f64,
        b: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `F(x) = 1 - (x/x0)^(-beta)` for `x >= x0`.
    Pareto {
        x0: f64,
        beta: f64,
    },
    /// The inner law clamped to `[-level, level]`.
    Truncated {
        inner: Box<DistributionSpec>,
        level: f64,
    },
    /// Sum of `block` independent copies of the inner law.
    BlockSum {
        inner: Box<DistributionSpec>,
        block: u32,
    },
    /// Bounded-support replacement of a nonnegative law's upper tail.
    TailSurrogate(Box<TailSurrogate>),
}

/// Follows `base` below `t`; the mass `P(X > t)` is split between an atom at
/// `t` (fraction `1-p`) and an atom at `atom` (fraction `p`), which preserves
/// the first two moments.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSurrogate {
    pub base: DistributionSpec,
    pub params: SurrogateParameters,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateParameters {
    pub t: f64,
    /// `E(X | X > t)`
    pub m: f64,
    /// `E(X² | X > t)`
    pub w: f64,
    pub p: f64,
    pub u: f64,
    /// `P(X > t)`
    pub tail_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    /// `f64::INFINITY` when the second moment diverges.
    pub variance: f64,
    /// `∫_L^∞ (1-F)^(1/d)`; `None` when the law has no usable CDF.
    pub upper_tail: Option<f64>,
    /// `∫_{-∞}^{-L} F^(1/d)`; `None` when the law has no usable CDF.
    pub lower_tail: Option<f64>,
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn geometric(p: f64) -> Result<Self> {
        Self::Geometric { p }.validated()
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::Bernoulli { p }.validated()
    }

    pub fn two_point(a: f64, weight_a: f64, b: f64) -> Result<Self> {
        Self::TwoPoint { a, weight_a, b }.validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::Uniform { lo, hi }.validated()
    }

    pub fn pareto(x0: f64, beta: f64) -> Result<Self> {
        Self::Pareto { x0, beta }.validated()
    }

    pub fn truncated(inner: DistributionSpec, level: f64) -> Result<Self> {
        Self::Truncated {
            inner: Box::new(inner),
            level,
        }
        .validated()
    }

    pub fn block_sum(inner: DistributionSpec, block: u32) -> Result<Self> {
        Self::BlockSum {
            inner: Box::new(inner),
            block,
        }
        .validated()
    }

    /// Checks every parameter range, recursing into wrapped laws.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Self::Exponential { rate } if !(rate.is_finite() && *rate > 0.0) => {
                bad(format!("exponential rate {rate} must be positive"))
            }
            Self::Geometric { p } if !(*p > 0.0 && *p <= 1.0) => bad(format!("geometric p {p} must lie in (0, 1]")),
            Self::Bernoulli { p } if !(0.0..=1.0).contains(p) => bad(format!("bernoulli p {p} must lie in [0, 1]")),
            Self::TwoPoint { a, weight_a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    bad(format!("two-point values {a}, {b} must be finite"))
                } else if !(0.0..=1.0).contains(weight_a) {
                    bad(format!("two-point weight {weight_a} must lie in [0, 1]"))
                } else {
                    Ok(())
                }
            }
            Self::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                bad(format!("uniform bounds {lo}, {hi} need lo < hi"))
            }
            Self::Pareto { x0, beta } if !(x0.is_finite() && *x0 > 0.0 && beta.is_finite() && *beta > 0.0) => {
                bad(format!("pareto x0 {x0} and beta {beta} must be positive"))
            }
            Self::Truncated { inner, level } => {
                if !(level.is_finite() && *level > 0.0) {
                    return bad(format!("truncation level {level} must be positive"));
                }
                inner.validate()
            }
            Self::BlockSum { inner, block } => {
                if *block == 0 {
                    return bad("block size must be at least 1".into());
                }
                inner.validate()
            }
            Self::TailSurrogate(s) => s.base.validate(),
            _ => Ok(()),
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Atoms of the finitely supported families, sorted by value.
    fn finite_atoms(&self) -> Option<[(f64, f64); 2]> {
        match *self {
            Self::Bernoulli { p } => Some([(0.0, 1.0 - p), (1.0, p)]),
            Self::TwoPoint { a, weight_a, b } => {
                if a <= b {
                    Some([(a, weight_a), (b, 1.0 - weight_a)])
                } else {
                    Some([(b, 1.0 - weight_a), (a, weight_a)])
                }
            }
            _ => None,
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::Geometric { p } => {
                if x < 0.0 {
                    0.0
                } else {
                    1.0 - (1.0 - p).powf(x.floor() + 1.0)
                }
            }
            Self::Bernoulli { .. } | Self::TwoPoint { .. } => {
                let atoms = self.finite_atoms().expect("finite family");
                atoms
                    .iter()
                    .filter(|(v, _)| *v <= x)
                    .map(|(_, m)| m)
                    .sum::<f64>()
                    .min(1.0)
            }
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Pareto { x0, beta } => {
                if x < *x0 {
                    0.0
                } else {
                    1.0 - (x / x0).powf(-beta)
                }
            }
            Self::Truncated { inner, level } => {
                if x < -level {
                    0.0
                } else if x >= *level {
                    1.0
                } else {
                    inner.cdf(x)?
                }
            }
            Self::BlockSum { inner, block } => {
                if *block == 1 {
                    inner.cdf(x)?
                } else {
                    return Err(Error::CdfUnavailable(self.to_string()));
                }
            }
            Self::TailSurrogate(s) => {
                let sp = &s.params;
                if x < sp.t {
                    s.base.cdf(x)?
                } else if x < sp.u {
                    1.0 - sp.p * sp.tail_mass
                } else {
                    1.0
                }
            }
        })
    }

    /// `sup{x : F(x) ≤ u}` for `u ∈ [0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::UniformOutOfRange(u));
        }
        self.quantile(u)
    }

    // Uniforms are multiples of 2^-53, so `1 - u` is exact and `ln(1 - u)`
    // loses nothing against `ln_1p(-u)`.
    fn quantile(&self, u: f64) -> Result<f64> {
        Ok(match self {
            Self::Exponential { rate } => -(1.0 - u).ln() / rate,
            Self::Geometric { p } => {
                if *p >= 1.0 {
                    0.0
                } else {
                    ((1.0 - u).ln() / (-p).ln_1p()).floor()
                }
            }
            Self::Bernoulli { p } => {
                if u < 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            Self::TwoPoint { .. } => {
                let atoms = self.finite_atoms().expect("finite family");
                let mut cum = 0.0;
                let mut last = atoms[0].0;
                let mut found = None;
                for (v, m) in atoms {
                    if m <= 0.0 {
                        continue;
                    }
                    cum += m;
                    last = v;
                    if cum > u {
                        found = Some(v);
                        break;
                    }
                }
                found.unwrap_or(last)
            }
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::Pareto { x0, beta } => x0 * (-(1.0 - u).ln() / beta).exp(),
            Self::Truncated { inner, level } => inner.quantile(u)?.clamp(-level, *level),
            Self::BlockSum { inner, block } => {
                if *block == 1 {
                    inner.quantile(u)?
                } else {
                    return Err(Error::CdfUnavailable(self.to_string()));
                }
            }
            Self::TailSurrogate(s) => {
                let sp = &s.params;
                if u < s.base.cdf(sp.t)? {
                    s.base.quantile(u)?
                } else if u < 1.0 - sp.p * sp.tail_mass {
                    sp.t
                } else {
                    sp.u
                }
            }
        })
    }

    /// Draws one value. Every family consumes exactly one uniform except
    /// `BlockSum`, which consumes one per summand.
    pub fn sample<S: UniformSource>(&self, src: &mut S) -> f64 {
        match self {
            Self::BlockSum { inner, block } => {
                let mut acc = 0.0;
                for _ in 0..*block {
                    acc += inner.sample(src);
                }
                acc
            }
            Self::Truncated { inner, level } => inner.sample(src).clamp(-level, *level),
            _ => self
                .quantile(src.next_uniform())
                .expect("single-uniform families always have a quantile"),
        }
    }

    /// Smallest and largest points of the support (possibly infinite above).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Exponential { .. } => (0.0, f64::INFINITY),
            Self::Geometric { p } => (0.0, if *p >= 1.0 { 0.0 } else { f64::INFINITY }),
            Self::Bernoulli { .. } | Self::TwoPoint { .. } => {
                let atoms = self.finite_atoms().expect("finite family");
                let live: Vec<f64> = atoms.iter().filter(|a| a.1 > 0.0).map(|a| a.0).collect();
                (live[0], live[live.len() - 1])
            }
            Self::Uniform { lo, hi } => (*lo, *hi),
            Self::Pareto { x0, .. } => (*x0, f64::INFINITY),
            Self::Truncated { inner, level } => {
                let (lo, hi) = inner.support();
                (lo.clamp(-level, *level), hi.clamp(-level, *level))
            }
            Self::BlockSum { inner, block } => {
                let (lo, hi) = inner.support();
                let k = f64::from(*block);
                (k * lo, k * hi)
            }
            Self::TailSurrogate(s) => (s.base.support().0, s.params.u),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.support().0 >= 0.0
    }

    /// `sup |X|` when the support is bounded.
    pub fn support_bound(&self) -> Option<f64> {
        let (lo, hi) = self.support();
        hi.is_finite().then(|| lo.abs().max(hi.abs()))
    }

    /// Points in `(a, b)` where the CDF jumps or has a kink.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = match self {
            Self::Exponential { .. } => vec![0.0],
            Self::Geometric { .. } => {
                let start = a.max(0.0).ceil();
                let end = b.min(start + MAX_BREAKPOINTS as f64);
                let mut v = Vec::new();
                let mut k = start;
                while k <= end {
                    v.push(k);
                    k += 1.0;
                }
                v
            }
            Self::Bernoulli { .. } | Self::TwoPoint { .. } => self
                .finite_atoms()
                .expect("finite family")
                .iter()
                .map(|x| x.0)
                .collect(),
            Self::Uniform { lo, hi } => vec![*lo, *hi],
            Self::Pareto { x0, .. } => vec![*x0],
            Self::Truncated { inner, level } => {
                let mut v = inner.breakpoints(a.max(-level), b.min(*level));
                v.push(-level);
                v.push(*level);
                v
            }
            Self::BlockSum { inner, block } => {
                if *block == 1 {
                    inner.breakpoints(a, b)
                } else {
                    Vec::new()
                }
            }
            Self::TailSurrogate(s) => {
                let mut v = s.base.breakpoints(a, b.min(s.params.t));
                v.push(s.params.t);
                v.push(s.params.u);
                v
            }
        };
        out.retain(|x| *x > a && *x < b);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Geometric { p } => (1.0 - p) / p,
            Self::Bernoulli { p } => *p,
            Self::TwoPoint { a, weight_a, b } => weight_a * a + (1.0 - weight_a) * b,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Pareto { x0, beta } => {
                if *beta <= 1.0 {
                    f64::INFINITY
                } else {
                    beta * x0 / (beta - 1.0)
                }
            }
            Self::BlockSum { inner, block } => f64::from(*block) * inner.mean(),
            Self::Truncated { .. } | Self::TailSurrogate(_) => self.bounded_raw_moments().0,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / (rate * rate),
            Self::Geometric { p } => (1.0 - p) / (p * p),
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::TwoPoint { a, weight_a, b } => weight_a * (1.0 - weight_a) * (a - b) * (a - b),
            Self::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Self::Pareto { x0, beta } => {
                if *beta <= 2.0 {
                    f64::INFINITY
                } else {
                    x0 * x0 * beta / ((beta - 1.0) * (beta - 1.0) * (beta - 2.0))
                }
            }
            Self::BlockSum { inner, block } => f64::from(*block) * inner.variance(),
            Self::Truncated { .. } | Self::TailSurrogate(_) => {
                let (m1, m2) = self.bounded_raw_moments();
                (m2 - m1 * m1).max(0.0)
            }
        }
    }

    /// `(E X, E X²)` by quadrature of the CDF; only for bounded supports.
    fn bounded_raw_moments(&self) -> (f64, f64) {
        let (lo, hi) = self.support();
        debug_assert!(hi.is_finite());
        let cdf = |s: f64| self.cdf(s).expect("bounded laws have a cdf");
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        if hi > 0.0 {
            let a = lo.max(0.0);
            let bps = self.breakpoints(a, hi);
            // the region [0, lo) has 1 - F = 1
            m1 += a + integrate_pieces(&|s| 1.0 - cdf(s), a, hi, &bps, MOMENT_TOL);
            m2 += a * a + integrate_pieces(&|s| 2.0 * s * (1.0 - cdf(s)), a, hi, &bps, MOMENT_TOL);
        }
        if lo < 0.0 {
            let b = hi.min(0.0);
            let bps = self.breakpoints(lo, b);
            m1 -= -b + integrate_pieces(&cdf, lo, b, &bps, MOMENT_TOL);
            m2 += b * b + integrate_pieces(&|s| -2.0 * s * cdf(s), lo, b, &bps, MOMENT_TOL);
        }
        (m1, m2)
    }

    /// `∫_level^∞ (1 - F(s))^power ds`, infinite when divergent.
    pub fn upper_tail(&self, level: f64, power: f64) -> Result<f64> {
        Ok(match self {
            Self::Exponential { rate } => {
                let a = level.max(0.0);
                (-level).max(0.0) + (-rate * a * power).exp() / (rate * power)
            }
            Self::Geometric { p } => {
                let a = level.max(0.0);
                let q = 1.0 - p;
                let below = (-level).max(0.0);
                if q <= 0.0 {
                    below
                } else {
                    let k0 = a.floor();
                    let qp = q.powf(power);
                    below + (k0 + 1.0 - a) * qp.powf(k0 + 1.0) + qp.powf(k0 + 2.0) / (1.0 - qp)
                }
            }
            Self::Bernoulli { .. } | Self::TwoPoint { .. } => {
                let atoms = self.finite_atoms().expect("finite family");
                let mut total = 0.0;
                let mut survival: f64 = 1.0;
                let mut from = f64::NEG_INFINITY;
                for (v, m) in atoms {
                    let lo = from.max(level);
                    if v > lo && survival > 0.0 {
                        total += (v - lo) * survival.powf(power);
                    }
                    survival = (survival - m).max(0.0);
                    from = v;
                }
                total
            }
            Self::Uniform { lo, hi } => {
                let below = (lo - level).max(0.0);
                let a = level.clamp(*lo, *hi);
                below + (hi - lo) / (1.0 + power) * ((hi - a) / (hi - lo)).powf(1.0 + power)
            }
            Self::Pareto { x0, beta } => {
                let gamma = beta * power;
                if gamma <= 1.0 {
                    f64::INFINITY
                } else {
                    let a = level.max(*x0);
                    (x0 - level).max(0.0) + x0.powf(gamma) * a.powf(1.0 - gamma) / (gamma - 1.0)
                }
            }
            Self::Truncated { inner, level: cap } => {
                if level >= *cap {
                    0.0
                } else {
                    let below = (-cap - level).max(0.0);
                    let a = level.max(-cap);
                    let from_a = inner.upper_tail(a, power)?;
                    let from_cap = inner.upper_tail(*cap, power)?;
                    if from_a.is_finite() && from_cap.is_finite() {
                        below + (from_a - from_cap).max(0.0)
                    } else {
                        below + self.quad_upper(a, *cap, power)
                    }
                }
            }
            Self::BlockSum { inner, block } => {
                if *block == 1 {
                    inner.upper_tail(level, power)?
                } else {
                    return Err(Error::CdfUnavailable(self.to_string()));
                }
            }
            Self::TailSurrogate(s) => {
                let lo = s.base.support().0;
                let below = (lo - level).max(0.0);
                below + self.quad_upper(level.max(lo), s.params.u, power)
            }
        })
    }

    fn quad_upper(&self, a: f64, b: f64, power: f64) -> f64 {
        let bps = self.breakpoints(a, b);
        let f = |s: f64| (1.0 - self.cdf(s).expect("cdf")).max(0.0).powf(power);
        integrate_pieces(&f, a, b, &bps, MOMENT_TOL)
    }

    /// `∫_{-∞}^{-level} F(s)^power ds`.
    pub fn lower_tail(&self, level: f64, power: f64) -> Result<f64> {
        let b = -level;
        if let Self::BlockSum { inner, block } = self {
            if *block == 1 {
                return inner.lower_tail(level, power);
            }
            return Err(Error::CdfUnavailable(self.to_string()));
        }
        let (lo, hi) = self.support();
        if b <= lo {
            return Ok(0.0);
        }
        Ok(match self {
            Self::Uniform { lo, hi } => {
                let w = hi - lo;
                if b >= *hi {
                    w / (1.0 + power) + (b - hi)
                } else {
                    w / (1.0 + power) * ((b - lo) / w).powf(1.0 + power)
                }
            }
            _ => {
                let end = b.min(hi);
                let bps = self.breakpoints(lo, end);
                let f = |s: f64| self.cdf(s).expect("cdf").powf(power);
                integrate_pieces(&f, lo, end, &bps, MOMENT_TOL) + (b - end).max(0.0)
            }
        })
    }

    /// Mean, variance and the two `1/d`-power tail integrals at level `level`.
    pub fn moments(&self, level: f64, d: usize) -> Result<MomentSummary> {
        if !(level >= 0.0) {
            return Err(Error::InvalidParameter(format!("tail level {level} must be >= 0")));
        }
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension {d} must be >= 2")));
        }
        let power = 1.0 / d as f64;
        let cdf_ok = !matches!(self, Self::BlockSum { block, .. } if *block > 1);
        Ok(MomentSummary {
            mean: self.mean(),
            variance: self.variance(),
            upper_tail: if cdf_ok {
                Some(self.upper_tail(level, power)?)
            } else {
                None
            },
            lower_tail: if cdf_ok {
                Some(self.lower_tail(level, power)?)
            } else {
                None
            },
        })
    }

    /// `∫_t^∞ k s^(k-1) (1 - F(s)) ds`, i.e. `E(X^k; X > t) - t^k P(X > t)`
    /// for a nonnegative law and `t >= 0`.
    pub fn tail_partial_moment(&self, t: f64, k: i32) -> Result<f64> {
        let kf = f64::from(k);
        let weight = move |s: f64| kf * s.powi(k - 1);
        let (_, hi) = self.support();
        if hi.is_finite() {
            if t >= hi {
                return Ok(0.0);
            }
            let bps = self.breakpoints(t, hi);
            let f = |s: f64| weight(s) * (1.0 - self.cdf(s).expect("cdf"));
            return Ok(integrate_pieces(&f, t, hi, &bps, MOMENT_TOL));
        }
        Ok(match self {
            Self::Exponential { .. } => {
                let f = |s: f64| weight(s) * (1.0 - self.cdf(s).expect("cdf"));
                integrate_to_infinity(&f, t, MOMENT_TOL * 1e-2)
            }
            Self::Geometric { p } => {
                // 1 - F = q^(j+1) on [j, j+1)
                let q = 1.0 - p;
                let j0 = t.floor();
                let mut total = q.powf(j0 + 1.0) * ((j0 + 1.0).powi(k) - t.powi(k));
                let mut j = j0 + 1.0;
                loop {
                    let term = q.powf(j + 1.0) * ((j + 1.0).powi(k) - j.powi(k));
                    total += term;
                    if term < 1e-18 * total.max(1e-300) || term == 0.0 {
                        break;
                    }
                    j += 1.0;
                }
                total
            }
            Self::Pareto { x0, beta } => {
                if *beta <= kf {
                    f64::INFINITY
                } else {
                    let a = t.max(*x0);
                    (x0.powi(k) - t.powi(k)).max(0.0) + kf * x0.powf(*beta) * a.powf(kf - beta) / (beta - kf)
                }
            }
            Self::BlockSum { inner, block } if *block == 1 => inner.tail_partial_moment(t, k)?,
            _ => return Err(Error::CdfUnavailable(self.to_string())),
        })
    }

    /// Conditional tail moments and the two-atom parameters that replace the
    /// tail above `t` without changing mean or variance.
    pub fn surrogate_parameters(&self, t: f64) -> Result<Option<SurrogateParameters>> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("surrogate cut {t} must be positive")));
        }
        if let Self::BlockSum { block, .. } = self {
            if *block > 1 {
                return Err(Error::CdfUnavailable(self.to_string()));
            }
        }
        if !self.is_nonnegative() {
            return Err(Error::NegativeTailUnsupported);
        }
        if !self.variance().is_finite() {
            return Err(Error::InfiniteVariance(self.to_string()));
        }
        let tail_mass = 1.0 - self.cdf(t)?;
        if tail_mass <= 0.0 {
            return Ok(None);
        }
        let m = t + self.tail_partial_moment(t, 1)? / tail_mass;
        let w = t * t + self.tail_partial_moment(t, 2)? / tail_mass;
        let gap = m - t;
        let p = gap * gap / (gap * gap + w - m * m);
        let u = t + gap / p;
        Ok(Some(SurrogateParameters {
            t,
            m,
            w,
            p,
            u,
            tail_mass,
        }))
    }

    /// A bounded-support law agreeing with `self` below `t` and sharing its
    /// mean and variance. Returns `self` unchanged when `P(X > t) = 0`.
    pub fn bounded_surrogate(&self, t: f64) -> Result<DistributionSpec> {
        Ok(match self.surrogate_parameters(t)? {
            None => self.clone(),
            Some(params) => Self::TailSurrogate(Box::new(TailSurrogate {
                base: self.clone(),
                params,
            })),
        })
    }
}

/// `∫ |F1(s) - F2(s)|^(1/2) ds` over the union of the supports.
pub fn distance_half_integral(a: &DistributionSpec, b: &DistributionSpec) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    // both CDFs must exist
    a.cdf(0.0)?;
    b.cdf(0.0)?;
    let (lo_a, hi_a) = a.support();
    let (lo_b, hi_b) = b.support();
    let lo = lo_a.min(lo_b);
    let half = |x: f64| (a.cdf(x).expect("cdf") - b.cdf(x).expect("cdf")).abs().sqrt();
    let finite_end = match (hi_a.is_finite(), hi_b.is_finite()) {
        (true, true) => hi_a.max(hi_b),
        (true, false) => hi_a.max(lo),
        (false, true) => hi_b.max(lo),
        (false, false) => {
            if !a.upper_tail(lo, 0.5)?.is_finite() || !b.upper_tail(lo, 0.5)?.is_finite() {
                return Ok(f64::INFINITY);
            }
            let qa = a.inverse_cdf(1.0 - 1e-12)?;
            let qb = b.inverse_cdf(1.0 - 1e-12)?;
            qa.max(qb).max(lo)
        }
    };
    let mut bps = a.breakpoints(lo, finite_end);
    bps.extend(b.breakpoints(lo, finite_end));
    let body = integrate_pieces(&half, lo, finite_end, &bps, DISTANCE_TOL);
    let tail = match (hi_a.is_finite(), hi_b.is_finite()) {
        (true, true) => 0.0,
        (true, false) => b.upper_tail(finite_end, 0.5)?,
        (false, true) => a.upper_tail(finite_end, 0.5)?,
        (false, false) => integrate_to_infinity(&half, finite_end, DISTANCE_TOL),
    };
    Ok(body + tail)
}

impl std::fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::Geometric { p } => write!(f, "geo:{p}"),
            Self::Bernoulli { p } => write!(f, "ber:{p}"),
            Self::TwoPoint { a, weight_a, b } => write!(f, "two:{a},{weight_a},{b}"),
            Self::Uniform { lo, hi } => write!(f, "unif:{lo},{hi}"),
            Self::Pareto { x0, beta } => write!(f, "pareto:{x0},{beta}"),
            Self::Truncated { inner, level } => write!(f, "trunc({inner},{level})"),
            Self::BlockSum { inner, block } => write!(f, "blocksum({inner},{block})"),
            Self::TailSurrogate(s) => write!(f, "surrogate({},{})", s.base, s.params.t),
        }
    }
}

impl std::str::FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}
