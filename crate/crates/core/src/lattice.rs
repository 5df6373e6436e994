//! Finite boxes of the nonnegative lattice and grids of values over them.

use std::fmt;
use std::io::{self, Write};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::{cell_key, cell_key2, CounterStream};

/// Largest box accepted by [`LatticeBox::new`].
pub const DEFAULT_CELL_BUDGET: usize = 1 << 28;

/// The box `{0..e_1-1} × ... × {0..e_d-1}`, stored row-major with the last
/// coordinate varying fastest (lexicographic order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBox {
    extents: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl LatticeBox {
    pub fn new(extents: &[usize]) -> Result<Self> {
        Self::with_budget(extents, DEFAULT_CELL_BUDGET)
    }

    pub fn with_budget(extents: &[usize], budget: usize) -> Result<Self> {
        if extents.len() < 2 {
            return Err(Error::Geometry(format!(
                "dimension {} must be at least 2",
                extents.len()
            )));
        }
        if extents.contains(&0) {
            return Err(Error::Geometry(format!("extents {extents:?} must be positive")));
        }
        let mut len: usize = 1;
        for &e in extents {
            len = len
                .checked_mul(e)
                .filter(|&l| l <= budget)
                .ok_or_else(|| Error::Budget(format!("box {extents:?} exceeds {budget} cells")))?;
        }
        let mut strides = vec![1; extents.len()];
        for i in (0..extents.len() - 1).rev() {
            strides[i] = strides[i + 1] * extents[i + 1];
        }
        Ok(Self {
            extents: extents.to_vec(),
            strides,
            len,
        })
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, z: &[usize]) -> bool {
        z.len() == self.dim() && z.iter().zip(&self.extents).all(|(c, e)| c < e)
    }

    pub fn index(&self, z: &[usize]) -> usize {
        debug_assert!(self.contains(z), "{z:?} outside {:?}", self.extents);
        z.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut z = vec![0; self.dim()];
        for (c, s) in z.iter_mut().zip(&self.strides) {
            *c = index / s;
            index %= s;
        }
        z
    }

    /// Advances `z` to its lexicographic successor; false after the last cell.
    pub fn advance(&self, z: &mut [usize]) -> bool {
        for i in (0..z.len()).rev() {
            z[i] += 1;
            if z[i] < self.extents[i] {
                return true;
            }
            z[i] = 0;
        }
        false
    }

    /// True when some coordinate of `z` sits on a far face of the box.
    pub fn on_far_face(&self, z: &[usize]) -> bool {
        z.iter().zip(&self.extents).any(|(c, e)| c + 1 == *e)
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.extents.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Where a sampled field came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub distribution: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    bbox: LatticeBox,
    values: Vec<f64>,
    provenance: Option<Provenance>,
}

impl WeightField {
    /// Samples every cell independently; cell `z` reads the uniform stream
    /// keyed by `(seed, z)`, so nested boxes agree on their intersection.
    pub fn sample(bbox: &LatticeBox, spec: &DistributionSpec, seed: u64) -> Self {
        let mut values = Vec::with_capacity(bbox.len());
        if bbox.dim() == 2 {
            let [nx, ny] = [bbox.extents[0], bbox.extents[1]];
            for x in 0..nx {
                for y in 0..ny {
                    let mut s = CounterStream::new(cell_key2(seed, x as i64, y as i64));
                    values.push(spec.sample(&mut s));
                }
            }
        } else {
            let mut z = vec![0usize; bbox.dim()];
            let mut coords = vec![0i64; bbox.dim()];
            loop {
                for (c, &v) in coords.iter_mut().zip(&z) {
                    *c = v as i64;
                }
                let mut s = CounterStream::new(cell_key(seed, &coords));
                values.push(spec.sample(&mut s));
                if !bbox.advance(&mut z) {
                    break;
                }
            }
        }
        Self {
            bbox: bbox.clone(),
            values,
            provenance: Some(Provenance {
                distribution: spec.to_string(),
                seed,
            }),
        }
    }

    pub fn from_values(bbox: &LatticeBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != bbox.len() {
            return Err(Error::Geometry(format!(
                "{} values for a box of {} cells",
                values.len(),
                bbox.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite weight {bad}")));
        }
        Ok(Self {
            bbox: bbox.clone(),
            values,
            provenance: None,
        })
    }

    pub fn from_fn(bbox: &LatticeBox, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(bbox.len());
        let mut z = vec![0usize; bbox.dim()];
        loop {
            values.push(f(&z));
            if !bbox.advance(&mut z) {
                break;
            }
        }
        Self::from_values(bbox, values)
    }

    pub fn lattice_box(&self) -> &LatticeBox {
        &self.bbox
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn get(&self, z: &[usize]) -> f64 {
        self.values[self.bbox.index(z)]
    }

    /// Cellwise `-X`.
    pub fn negated(&self) -> Self {
        self.map(|x| -x)
    }

    /// Cellwise image under `f`; drops the provenance.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            bbox: self.bbox.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
            provenance: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Maximum over directed paths.
    Last,
    /// Minimum over directed paths.
    First,
}

impl Mode {
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            Mode::Last => a.max(b),
            Mode::First => a.min(b),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Last => "last",
            Mode::First => "first",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "last" => Ok(Mode::Last),
            "first" => Ok(Mode::First),
            other => Err(Error::Parse {
                token: other.into(),
                reason: "mode is last|first".into(),
            }),
        }
    }
}

/// Passage times `T(z)` or `S(z)` over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct PassageField {
    pub(crate) bbox: LatticeBox,
    pub(crate) values: Vec<f64>,
    pub(crate) mode: Mode,
}

impl PassageField {
    pub fn lattice_box(&self) -> &LatticeBox {
        &self.bbox
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn get(&self, z: &[usize]) -> f64 {
        self.values[self.bbox.index(z)]
    }

    /// CSV with header `z1,...,zd,value`, rows in lexicographic order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let d = self.bbox.dim();
        let header: Vec<String> = (1..=d).map(|i| format!("z{i}")).collect();
        writeln!(out, "{},value", header.join(","))?;
        let mut z = vec![0usize; d];
        for v in &self.values {
            for c in &z {
                write!(out, "{c},")?;
            }
            writeln!(out, "{v}")?;
            self.bbox.advance(&mut z);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_is_lexicographic() {
        let b = LatticeBox::new(&[2, 3, 4]).unwrap();
        let mut z = vec![0; 3];
        let mut i = 0;
        loop {
            assert_eq!(b.index(&z), i);
            assert_eq!(b.coords(i), z);
            i += 1;
            if !b.advance(&mut z) {
                break;
            }
        }
        assert_eq!(i, 24);
    }

    #[test]
    fn budget_and_shape_checks() {
        assert!(matches!(LatticeBox::new(&[5]), Err(Error::Geometry(_))));
        assert!(matches!(LatticeBox::new(&[5, 0]), Err(Error::Geometry(_))));
        assert!(matches!(LatticeBox::with_budget(&[10, 10], 99), Err(Error::Budget(_))));
        assert!(LatticeBox::with_budget(&[10, 10], 100).is_ok());
        assert!(matches!(LatticeBox::new(&[usize::MAX, 3]), Err(Error::Budget(_))));
    }

    #[test]
    fn csv_layout() {
        let b = LatticeBox::new(&[2, 2]).unwrap();
        let p = PassageField {
            bbox: b,
            values: vec![0.0, 1.0, 2.5, 3.0],
            mode: Mode::Last,
        };
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "z1,z2,value\n0,0,0\n0,1,1\n1,0,2.5\n1,1,3\n"
        );
    }

    #[test]
    fn rejects_non_finite_weights() {
        let b = LatticeBox::new(&[1, 2]).unwrap();
        assert!(WeightField::from_values(&b, vec![0.0, f64::NAN]).is_err());
        assert!(WeightField::from_values(&b, vec![0.0]).is_err());
    }
}
