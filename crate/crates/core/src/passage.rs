//! Last- and first-passage times over directed paths.
//!
//! A path from `z1` to `z2` includes its initial point and excludes its final
//! point, so `T(z)` sums `‖z‖` weights and `T(0) = 0`. All kernels add weights
//! left to right along the path; since IEEE rounding is monotone,
//! `max(a, b) + x == max(a + x, b + x)` holds exactly and the dynamic programs
//! agree bit-for-bit with explicit path enumeration.

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Mode, PassageField, WeightField};
use crate::rng::{cell_key2, CounterStream};

/// Path-count ceiling for [`brute_force_passage`].
pub const BRUTE_FORCE_PATH_BUDGET: f64 = 1e6;

pub fn sample_field(bbox: &LatticeBox, spec: &DistributionSpec, seed: u64) -> WeightField {
    WeightField::sample(bbox, spec, seed)
}

pub fn last_passage(field: &WeightField) -> PassageField {
    passage_field(field, Mode::Last)
}

pub fn first_passage(field: &WeightField) -> PassageField {
    passage_field(field, Mode::First)
}

/// One lexicographic sweep: `T(z) = opt_i [T(z - e_i) + X(z - e_i)]`.
pub fn passage_field(field: &WeightField, mode: Mode) -> PassageField {
    let bbox = field.lattice_box();
    let x = field.values();
    let mut t = vec![0.0f64; bbox.len()];
    if bbox.dim() == 2 {
        let [nx, ny] = [bbox.extents()[0], bbox.extents()[1]];
        for i in 0..nx {
            for j in 0..ny {
                let idx = i * ny + j;
                t[idx] = match (i > 0, j > 0) {
                    (false, false) => 0.0,
                    (true, false) => t[idx - ny] + x[idx - ny],
                    (false, true) => t[idx - 1] + x[idx - 1],
                    (true, true) => mode.combine(t[idx - ny] + x[idx - ny], t[idx - 1] + x[idx - 1]),
                };
            }
        }
    } else {
        let strides = bbox.strides();
        let mut z = vec![0usize; bbox.dim()];
        let mut idx = 0;
        loop {
            let mut best: Option<f64> = None;
            for (axis, &c) in z.iter().enumerate() {
                if c > 0 {
                    let prev = idx - strides[axis];
                    let cand = t[prev] + x[prev];
                    best = Some(best.map_or(cand, |b| mode.combine(b, cand)));
                }
            }
            t[idx] = best.unwrap_or(0.0);
            idx += 1;
            if !bbox.advance(&mut z) {
                break;
            }
        }
    }
    PassageField {
        bbox: bbox.clone(),
        values: t,
        mode,
    }
}

fn check_point(bbox: &LatticeBox, z: &[usize], what: &str) -> Result<()> {
    if !bbox.contains(z) {
        return Err(Error::Geometry(format!(
            "{what} {z:?} outside box {:?}",
            bbox.extents()
        )));
    }
    Ok(())
}

/// `T(z1, z2)`: optimum over directed paths from `z1` to `z2`, computed on the
/// sub-box between them.
pub fn passage_between(field: &WeightField, z1: &[usize], z2: &[usize], mode: Mode) -> Result<f64> {
    let bbox = field.lattice_box();
    check_point(bbox, z1, "start")?;
    check_point(bbox, z2, "end")?;
    if z1.iter().zip(z2).any(|(a, b)| a > b) {
        return Err(Error::Geometry(format!("{z1:?} is not below {z2:?}")));
    }
    if z1 == z2 {
        return Ok(0.0);
    }
    let ext: Vec<usize> = z1.iter().zip(z2).map(|(a, b)| b - a + 1).collect();
    let sub = LatticeBox::new(&ext)?;
    let strides = sub.strides().to_vec();
    let mut t = vec![0.0f64; sub.len()];
    let mut x = vec![0.0f64; sub.len()];
    let mut local = vec![0usize; sub.dim()];
    let mut global = z1.to_vec();
    let mut idx = 0;
    loop {
        for (g, (a, l)) in global.iter_mut().zip(z1.iter().zip(&local)) {
            *g = a + l;
        }
        x[idx] = field.get(&global);
        let mut best: Option<f64> = None;
        for (axis, &c) in local.iter().enumerate() {
            if c > 0 {
                let prev = idx - strides[axis];
                let cand = t[prev] + x[prev];
                best = Some(best.map_or(cand, |b| mode.combine(b, cand)));
            }
        }
        t[idx] = best.unwrap_or(0.0);
        idx += 1;
        if !sub.advance(&mut local) {
            break;
        }
    }
    Ok(t[sub.len() - 1])
}

/// Number of directed paths from the origin to `z` (multinomial coefficient).
pub fn path_count(z: &[usize]) -> f64 {
    let mut total = 0usize;
    let mut count = 1.0f64;
    for &c in z {
        for k in 1..=c {
            total += 1;
            count = count * total as f64 / k as f64;
        }
    }
    count
}

/// Explicit enumeration of every directed path from the origin to `z`.
pub fn brute_force_passage(field: &WeightField, z: &[usize], mode: Mode) -> Result<f64> {
    let bbox = field.lattice_box();
    check_point(bbox, z, "target")?;
    let count = path_count(z);
    if count > BRUTE_FORCE_PATH_BUDGET {
        return Err(Error::Budget(format!("{count} paths to {z:?}")));
    }
    fn walk(field: &WeightField, mode: Mode, v: &mut Vec<usize>, z: &[usize], acc: f64, best: &mut Option<f64>) {
        if v.as_slice() == z {
            *best = Some(best.map_or(acc, |b| mode.combine(b, acc)));
            return;
        }
        let next = acc + field.get(v);
        for axis in 0..z.len() {
            if v[axis] < z[axis] {
                v[axis] += 1;
                walk(field, mode, v, z, next, best);
                v[axis] -= 1;
            }
        }
    }
    let mut best = None;
    let mut v = vec![0usize; z.len()];
    walk(field, mode, &mut v, z, 0.0, &mut best);
    Ok(best.unwrap_or(0.0))
}

/// Optimal passage to `(a, b)` in two dimensions without materialising a
/// field: weights come from `weight(x, y)` and only one line of length
/// `min(a, b) + 1` is held in memory.
pub fn streaming_passage_2d<W: Fn(usize, usize) -> f64>(a: usize, b: usize, mode: Mode, weight: W) -> f64 {
    if a == 0 && b == 0 {
        return 0.0;
    }
    // Sweep along the long axis; `exit[j]` holds T + X of the previous line.
    let (long, short) = if a >= b { (a, b) } else { (b, a) };
    let at = |i: usize, j: usize| if a >= b { weight(i, j) } else { weight(j, i) };
    let mut exit = vec![0.0f64; short + 1];
    for i in 0..=long {
        for j in 0..=short {
            let t = match (i > 0, j > 0) {
                (false, false) => 0.0,
                (true, false) => exit[j],
                (false, true) => exit[j - 1],
                (true, true) => mode.combine(exit[j], exit[j - 1]),
            };
            if i == long && j == short {
                return t;
            }
            exit[j] = t + at(i, j);
        }
    }
    unreachable!("loop returns at the target")
}

/// Streaming last/first passage for a law sampled through the cell streams.
pub fn sampled_passage_2d(spec: &DistributionSpec, seed: u64, a: usize, b: usize, mode: Mode) -> f64 {
    streaming_passage_2d(a, b, mode, |x, y| {
        spec.sample(&mut CounterStream::new(cell_key2(seed, x as i64, y as i64)))
    })
}

/// `T̃(m, n)`: best weight of `(0, y0), (1, y1), ..., (m-1, y_{m-1})` with
/// `0 <= y0 <= ... <= y_{m-1} <= n`.
pub fn seppalainen_passage(field: &WeightField, m: usize, n: usize) -> Result<f64> {
    let bbox = field.lattice_box();
    if bbox.dim() != 2 {
        return Err(Error::Geometry("the monotone-column model is two-dimensional".into()));
    }
    if m == 0 {
        return Err(Error::Geometry("column count m must be at least 1".into()));
    }
    if bbox.extents()[0] < m || bbox.extents()[1] < n + 1 {
        return Err(Error::Geometry(format!(
            "field {:?} does not cover {m}x{}",
            bbox.extents(),
            n + 1
        )));
    }
    Ok(streaming_seppalainen(m, n, |i, y| field.get(&[i, y])))
}

/// Column DP `best(i, y) = max_{y' <= y} best(i-1, y') + X(i, y)`.
pub fn streaming_seppalainen<W: Fn(usize, usize) -> f64>(m: usize, n: usize, weight: W) -> f64 {
    let mut best = vec![0.0f64; n + 1];
    for i in 0..m {
        let mut running = f64::NEG_INFINITY;
        for (y, slot) in best.iter_mut().enumerate() {
            let prev = if i == 0 {
                0.0
            } else {
                running = running.max(*slot);
                running
            };
            *slot = prev + weight(i, y);
        }
    }
    best.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub fn sampled_seppalainen(spec: &DistributionSpec, seed: u64, m: usize, n: usize) -> f64 {
    streaming_seppalainen(m, n, |x, y| {
        spec.sample(&mut CounterStream::new(cell_key2(seed, x as i64, y as i64)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiCheck {
    /// `T(m, n)` on the pulled-back field `X(ψ(z))`.
    pub standard: f64,
    /// `T̃(m + n, n)` on the original field.
    pub monotone: f64,
}

impl PsiCheck {
    pub fn holds(&self) -> bool {
        self.standard <= self.monotone
    }
}

/// Compares `T(m, n)` on the sheared field `X'(x, y) = X(x + y, y)` with
/// `T̃(m + n, n)` on `X`. The shear maps directed paths into monotone-column
/// paths, so the comparison always holds.
pub fn verify_psi_domination(field: &WeightField, m: usize, n: usize) -> Result<PsiCheck> {
    let bbox = field.lattice_box();
    if bbox.dim() != 2 {
        return Err(Error::Geometry("shear comparison is two-dimensional".into()));
    }
    if m + n == 0 {
        return Err(Error::Geometry("need m + n >= 1".into()));
    }
    if bbox.extents()[0] < m + n || bbox.extents()[1] < n + 1 {
        return Err(Error::Geometry(format!(
            "field {:?} does not cover {}x{}",
            bbox.extents(),
            m + n,
            n + 1
        )));
    }
    let standard = streaming_passage_2d(m, n, Mode::Last, |x, y| field.get(&[x + y, y]));
    let monotone = streaming_seppalainen(m + n, n, |i, y| field.get(&[i, y]));
    Ok(PsiCheck { standard, monotone })
}
