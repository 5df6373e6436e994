//! Growth sets `B(t) = {z : T(z) <= t}` and `C(t) = {z : S(z) <= t}` on a
//! finite box, their raster rendering, and distances to reference shapes.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Mode, PassageField, WeightField};
use crate::passage::passage_field;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSnapshot {
    pub t: f64,
    pub mode: Mode,
    pub bbox: LatticeBox,
    /// Lexicographic, as in [`LatticeBox::index`].
    pub occupancy: Vec<bool>,
    /// Some occupied cell lies on a far face, so the set may continue past
    /// the window.
    pub truncated: bool,
}

impl GrowthSnapshot {
    pub fn occupied(&self, z: &[usize]) -> bool {
        self.occupancy[self.bbox.index(z)]
    }

    pub fn count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// `self ⊆ other` cellwise.
    pub fn is_subset_of(&self, other: &GrowthSnapshot) -> bool {
        self.bbox == other.bbox && self.occupancy.iter().zip(&other.occupancy).all(|(a, b)| !a || *b)
    }

    /// Every occupied cell's lower neighbours are occupied.
    pub fn is_down_set(&self) -> bool {
        let strides = self.bbox.strides();
        let mut z = vec![0usize; self.bbox.dim()];
        let mut idx = 0;
        loop {
            if self.occupancy[idx] {
                for (axis, &c) in z.iter().enumerate() {
                    if c > 0 && !self.occupancy[idx - strides[axis]] {
                        return false;
                    }
                }
            }
            idx += 1;
            if !self.bbox.advance(&mut z) {
                return true;
            }
        }
    }

    /// The two-dimensional section through `fixed` on axes `2..d`.
    pub fn axis_slice(&self, fixed: &[usize]) -> Result<GrowthSnapshot> {
        let e = self.bbox.extents();
        if fixed.len() + 2 != e.len() || fixed.iter().zip(&e[2..]).any(|(f, n)| f >= n) {
            return Err(Error::Geometry(format!(
                "slice {fixed:?} does not fit box {}",
                self.bbox
            )));
        }
        let bbox = LatticeBox::new(&e[..2])?;
        let mut occupancy = Vec::with_capacity(bbox.len());
        let mut z = vec![0usize; e.len()];
        z[2..].copy_from_slice(fixed);
        for x in 0..e[0] {
            for y in 0..e[1] {
                z[0] = x;
                z[1] = y;
                occupancy.push(self.occupied(&z));
            }
        }
        let truncated = occupancy
            .iter()
            .enumerate()
            .any(|(i, &o)| o && bbox.on_far_face(&bbox.coords(i)));
        Ok(GrowthSnapshot {
            t: self.t,
            mode: self.mode,
            bbox,
            occupancy,
            truncated,
        })
    }
}

pub fn is_ascending(thresholds: &[f64]) -> bool {
    thresholds.windows(2).all(|w| w[0] <= w[1])
}

/// Thresholds one passage field at every `t`.
pub fn snapshots_from_passage(passage: &PassageField, thresholds: &[f64]) -> Result<Vec<GrowthSnapshot>> {
    if !is_ascending(thresholds) || thresholds.iter().any(|t| t.is_nan()) {
        return Err(Error::InvalidParameter(format!(
            "thresholds {thresholds:?} must be ascending"
        )));
    }
    let bbox = passage.lattice_box();
    let far: Vec<bool> = (0..bbox.len()).map(|i| bbox.on_far_face(&bbox.coords(i))).collect();
    Ok(thresholds
        .iter()
        .map(|&t| {
            let occupancy: Vec<bool> = passage.values().iter().map(|&v| v <= t).collect();
            let truncated = occupancy.iter().zip(&far).any(|(o, f)| *o && *f);
            GrowthSnapshot {
                t,
                mode: passage.mode(),
                bbox: bbox.clone(),
                occupancy,
                truncated,
            }
        })
        .collect())
}

/// One passage sweep over `field`, then one snapshot per threshold.
pub fn growth_snapshots(field: &WeightField, thresholds: &[f64], mode: Mode) -> Result<Vec<GrowthSnapshot>> {
    snapshots_from_passage(&passage_field(field, mode), thresholds)
}

/// Gray level of layer `j` out of `k`: `⌊255 j / k⌋`.
pub fn layer_gray(j: usize, k: usize) -> u8 {
    (255 * j / k) as u8
}

fn pgm_header(width: usize, height: usize, comment: &str) -> Vec<u8> {
    format!("P5\n# {comment}\n{width} {height}\n255\n").into_bytes()
}

/// Binary PGM of nested two-dimensional snapshots. A cell takes the gray of
/// the first (smallest `t`) snapshot containing it, from black upwards;
/// unoccupied cells are white. The lattice origin is at the bottom left: the
/// last raster row is `y = 0`.
pub fn render_pgm(snapshots: &[GrowthSnapshot]) -> Result<Vec<u8>> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::InvalidParameter("no snapshots to render".into()))?;
    if first.bbox.dim() != 2 {
        return Err(Error::Geometry(
            "rendering needs a two-dimensional box; slice first".into(),
        ));
    }
    if snapshots.iter().any(|s| s.bbox != first.bbox) {
        return Err(Error::Geometry("snapshots come from different boxes".into()));
    }
    let ts: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    if !is_ascending(&ts) {
        return Err(Error::InvalidParameter(format!(
            "snapshot thresholds {ts:?} must be ascending"
        )));
    }
    let (w, h) = (first.bbox.extents()[0], first.bbox.extents()[1]);
    let mut out = pgm_header(w, h, "origin bottom-left; last row is y=0");
    let k = snapshots.len();
    for y in (0..h).rev() {
        for x in 0..w {
            let idx = x * h + y;
            let gray = snapshots
                .iter()
                .position(|s| s.occupancy[idx])
                .map_or(255, |j| layer_gray(j, k));
            out.push(gray);
        }
    }
    Ok(out)
}

/// Height map of a three-dimensional snapshot seen from above: white where a
/// column is empty, otherwise darker the higher its top occupied cell.
pub fn render_height_map(snapshot: &GrowthSnapshot) -> Result<Vec<u8>> {
    let e = snapshot.bbox.extents();
    if e.len() != 3 {
        return Err(Error::Geometry("height map needs a three-dimensional box".into()));
    }
    let (w, h, depth) = (e[0], e[1], e[2]);
    let mut out = pgm_header(w, h, "height map; origin bottom-left; last row is y=0");
    for y in (0..h).rev() {
        for x in 0..w {
            let top = (0..depth).rev().find(|&z| snapshot.occupied(&[x, y, z]));
            out.push(match top {
                None => 255,
                Some(z) => (254 - 254 * z / depth) as u8,
            });
        }
    }
    Ok(out)
}

/// A region of the unit-scale orthant.
pub trait ReferenceShape {
    fn contains(&self, p: &[f64]) -> bool;
    /// Lebesgue measure of the region in `d` dimensions.
    fn volume(&self, d: usize) -> f64;
    /// Largest coordinate reached by the region.
    fn extent(&self) -> f64;
    fn describe(&self) -> String;
}

/// `Σ √x_i <= 1`, the last-passage shape for unit exponential weights in
/// two dimensions.
#[derive(Debug, Clone, Copy, Default)]
pub struct SqrtSimplex;

impl ReferenceShape for SqrtSimplex {
    fn contains(&self, p: &[f64]) -> bool {
        p.iter().map(|v| v.sqrt()).sum::<f64>() <= 1.0
    }

    fn volume(&self, d: usize) -> f64 {
        // ∫ over Σ√x_i <= 1: substitute x_i = s_i², giving 2^d Π s_i on the simplex
        2f64.powi(d as i32) / factorial(2 * d)
    }

    fn extent(&self) -> f64 {
        1.0
    }

    fn describe(&self) -> String {
        "sqrt-simplex".into()
    }
}

/// `Σ x_i <= 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simplex;

impl ReferenceShape for Simplex {
    fn contains(&self, p: &[f64]) -> bool {
        p.iter().sum::<f64>() <= 1.0
    }

    fn volume(&self, d: usize) -> f64 {
        1.0 / factorial(d)
    }

    fn extent(&self) -> f64 {
        1.0
    }

    fn describe(&self) -> String {
        "simplex".into()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// A snapshot rescaled by `1/t`, used as its own reference.
#[derive(Debug, Clone)]
pub struct RescaledSnapshot(pub GrowthSnapshot);

impl ReferenceShape for RescaledSnapshot {
    fn contains(&self, p: &[f64]) -> bool {
        let s = &self.0;
        let z: Vec<usize> = p.iter().map(|v| (v * s.t).floor() as usize).collect();
        s.bbox.contains(&z) && s.occupied(&z)
    }

    fn volume(&self, d: usize) -> f64 {
        self.0.count() as f64 / self.0.t.powi(d as i32)
    }

    fn extent(&self) -> f64 {
        self.0.bbox.extents().iter().copied().max().unwrap_or(0) as f64 / self.0.t
    }

    fn describe(&self) -> String {
        format!("snapshot(t={})", self.0.t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeComparison {
    pub t: f64,
    /// Misclassified volume over the reference volume.
    pub metric: f64,
    pub misclassified: usize,
    pub reference: String,
}

/// Symmetric difference between `snapshot / t` (cell centres) and the
/// reference, relative to the reference's volume.
pub fn shape_distance(snapshot: &GrowthSnapshot, reference: &dyn ReferenceShape) -> Result<ShapeComparison> {
    if snapshot.truncated {
        return Err(Error::Geometry(format!(
            "snapshot at t={} touches the box boundary",
            snapshot.t
        )));
    }
    if !(snapshot.t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold {} must be positive",
            snapshot.t
        )));
    }
    let t = snapshot.t;
    let bbox = &snapshot.bbox;
    let d = bbox.dim();
    if bbox.extents().iter().any(|&e| (e as f64) < reference.extent() * t) {
        return Err(Error::Geometry(format!(
            "box {bbox} does not hold {} scaled by {t}",
            reference.describe()
        )));
    }
    let mut z = vec![0usize; d];
    let mut p = vec![0.0; d];
    let mut misclassified = 0usize;
    let mut idx = 0;
    loop {
        for (pi, &c) in p.iter_mut().zip(&z) {
            *pi = (c as f64 + 0.5) / t;
        }
        if snapshot.occupancy[idx] != reference.contains(&p) {
            misclassified += 1;
        }
        idx += 1;
        if !bbox.advance(&mut z) {
            break;
        }
    }
    let cell = t.powi(-(d as i32));
    Ok(ShapeComparison {
        t,
        metric: misclassified as f64 * cell / reference.volume(d),
        misclassified,
        reference: reference.describe(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeVerdict {
    pub t: f64,
    /// `C(t)` reaches a far face of the window.
    pub escaped: bool,
    pub occupied: usize,
}

/// Finite-window proxy for `C(t)` becoming infinite.
pub fn first_passage_escape(field: &WeightField, t: f64) -> Result<EscapeVerdict> {
    let snap = growth_snapshots(field, &[t], Mode::First)?.remove(0);
    Ok(EscapeVerdict {
        t,
        escaped: snap.truncated,
        occupied: snap.count(),
    })
}

/// Columns `dist,mode,t,box,metric`.
pub fn write_shape_distance_csv<W: Write>(
    mut out: W,
    dist: &str,
    mode: Mode,
    bbox: &LatticeBox,
    rows: &[ShapeComparison],
) -> io::Result<()> {
    writeln!(out, "dist,mode,t,box,metric")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            crate::shape::csv_field(dist),
            mode,
            r.t,
            bbox,
            r.metric
        )?;
    }
    Ok(())
}
