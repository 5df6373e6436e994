//! Greedy lattice animals: the heaviest connected set of `n` sites of `Z^d`
//! that contains the origin, found by exhaustive enumeration.

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::{cell_key, CounterStream};

/// Weights on the cube `[-radius, radius]^d` around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredField {
    dim: usize,
    radius: usize,
    side: usize,
    values: Vec<f64>,
}

impl CenteredField {
    /// Uses the same `(seed, coordinates)` streams as [`crate::WeightField`],
    /// so the two agree wherever both are defined.
    pub fn sample(spec: &DistributionSpec, seed: u64, dim: usize, radius: usize) -> Result<Self> {
        Self::from_fn(dim, radius, |z| spec.sample(&mut CounterStream::new(cell_key(seed, z))))
    }

    pub fn from_fn(dim: usize, radius: usize, mut f: impl FnMut(&[i64]) -> f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Geometry(format!("dimension {dim} must be at least 2")));
        }
        let side = 2 * radius + 1;
        let len = side
            .checked_pow(dim as u32)
            .filter(|&l| l <= crate::lattice::DEFAULT_CELL_BUDGET)
            .ok_or_else(|| Error::Budget(format!("window of radius {radius} in dimension {dim}")))?;
        let mut values = Vec::with_capacity(len);
        let mut z = vec![-(radius as i64); dim];
        for _ in 0..len {
            values.push(f(&z));
            for c in z.iter_mut().rev() {
                *c += 1;
                if *c <= radius as i64 {
                    break;
                }
                *c = -(radius as i64);
            }
        }
        Ok(Self {
            dim,
            radius,
            side,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Largest `|w|` in the window.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn index(&self, z: &[i64]) -> Option<usize> {
        let r = self.radius as i64;
        let mut idx = 0usize;
        for &c in z {
            if c < -r || c > r {
                return None;
            }
            idx = idx * self.side + (c + r) as usize;
        }
        Some(idx)
    }

    pub fn get(&self, z: &[i64]) -> Option<f64> {
        self.index(z).map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnimalResult {
    pub size: usize,
    pub max_weight: f64,
    /// Number of animals enumerated.
    pub count: u64,
    pub dim: usize,
    pub radius: usize,
}

/// Largest size enumerated in dimension `d`.
pub fn enumeration_limit(d: usize) -> usize {
    match d {
        2 => 10,
        3 => 7,
        _ => 5,
    }
}

struct Search<'a> {
    field: &'a CenteredField,
    neighbors: Vec<isize>,
    seen: Vec<bool>,
    target: usize,
    best: f64,
    count: u64,
}

impl Search<'_> {
    fn interior(&self, idx: usize) -> bool {
        let mut rest = idx;
        for _ in 0..self.field.dim {
            let c = rest % self.field.side;
            rest /= self.field.side;
            if c == 0 || c + 1 == self.field.side {
                return false;
            }
        }
        true
    }

    fn grow(&mut self, untried: &mut Vec<usize>, size: usize, weight: f64) {
        while let Some(cell) = untried.pop() {
            let w = weight + self.field.values[cell];
            if size + 1 == self.target {
                self.count += 1;
                if w > self.best {
                    self.best = w;
                }
                continue;
            }
            let mut fresh = Vec::with_capacity(self.neighbors.len());
            // a rim cell is at L1 distance >= n - 1 from the origin, so it can
            // only ever be the last cell added
            if self.interior(cell) {
                for k in 0..self.neighbors.len() {
                    let nb = (cell as isize + self.neighbors[k]) as usize;
                    if !self.seen[nb] {
                        self.seen[nb] = true;
                        fresh.push(nb);
                    }
                }
            }
            let mut next = untried.clone();
            next.extend_from_slice(&fresh);
            self.grow(&mut next, size + 1, w);
            for nb in fresh {
                self.seen[nb] = false;
            }
        }
    }
}

/// Exact maximum weight over all connected size-`n` subsets of `Z^d`
/// containing the origin. Each animal is generated exactly once by
/// Redelmeier's untried-set expansion.
pub fn max_animal_weight(field: &CenteredField, n: usize) -> Result<AnimalResult> {
    if n == 0 {
        return Err(Error::Geometry("animal size must be at least 1".into()));
    }
    if n > enumeration_limit(field.dim) {
        return Err(Error::Budget(format!(
            "animals of size {n} in dimension {} exceed the enumeration limit {}",
            field.dim,
            enumeration_limit(field.dim)
        )));
    }
    if field.radius + 1 < n {
        return Err(Error::Geometry(format!(
            "window radius {} cannot hold animals of size {n}",
            field.radius
        )));
    }
    let mut neighbors = Vec::with_capacity(2 * field.dim);
    let mut stride = 1isize;
    for _ in 0..field.dim {
        neighbors.push(stride);
        neighbors.push(-stride);
        stride *= field.side as isize;
    }
    let origin = field.index(&vec![0; field.dim]).expect("origin in window");
    let mut search = Search {
        field,
        neighbors,
        seen: vec![false; field.values.len()],
        target: n,
        best: f64::NEG_INFINITY,
        count: 0,
    };
    search.seen[origin] = true;
    let mut untried = vec![origin];
    search.grow(&mut untried, 0, 0.0);
    Ok(AnimalResult {
        size: n,
        max_weight: search.best,
        count: search.count,
        dim: field.dim,
        radius: field.radius,
    })
}

/// `c · n · ∫_0^∞ (1 - F(s))^(1/d) ds`.
pub fn animal_bound(spec: &DistributionSpec, n: usize, c: f64, d: usize) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("constant c = {c} must be positive")));
    }
    let tail = spec
        .moments(0.0, d)?
        .upper_tail
        .ok_or_else(|| Error::CdfUnavailable(spec.to_string()))?;
    if tail == 0.0 {
        return Ok(0.0);
    }
    Ok(c * n as f64 * tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_one_and_two() {
        let f = CenteredField::from_fn(2, 3, |z| (z[0] * 10 + z[1]) as f64).unwrap();
        let one = max_animal_weight(&f, 1).unwrap();
        assert_eq!(one.max_weight, 0.0);
        assert_eq!(one.count, 1);
        let two = max_animal_weight(&f, 2).unwrap();
        // neighbours: (1,0)=10, (-1,0)=-10, (0,1)=1, (0,-1)=-1
        assert_eq!(two.max_weight, 10.0);
        assert_eq!(two.count, 4);
    }

    #[test]
    fn limits_and_window_checks() {
        let f = CenteredField::from_fn(2, 3, |_| 1.0).unwrap();
        assert!(matches!(max_animal_weight(&f, 5), Err(Error::Geometry(_))));
        let big = CenteredField::from_fn(2, 11, |_| 1.0).unwrap();
        assert!(matches!(max_animal_weight(&big, 11), Err(Error::Budget(_))));
        assert!(max_animal_weight(&f, 0).is_err());
    }

    #[test]
    fn bound_examples() {
        let zero = DistributionSpec::bernoulli(0.0).unwrap();
        assert_eq!(animal_bound(&zero, 7, 3.0, 2).unwrap(), 0.0);
        let exp = DistributionSpec::exponential(1.0).unwrap();
        assert!((animal_bound(&exp, 10, 1.0, 2).unwrap() - 20.0).abs() < 1e-12);
        let b1 = animal_bound(&exp, 4, 1.5, 3).unwrap();
        let b2 = animal_bound(&exp, 4, 3.0, 3).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-12);
        let heavy = DistributionSpec::pareto(1.0 / 3.0, 1.5).unwrap();
        assert_eq!(animal_bound(&heavy, 4, 1.0, 2).unwrap(), f64::INFINITY);
    }
}
