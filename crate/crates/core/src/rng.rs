//! Counter-based uniform streams.
//!
//! Every random quantity in the crate is a pure function of a 64-bit key and a
//! position. A lattice cell's key is a hash of `(seed, coordinates)`, so a
//! field sampled over a box agrees with the field sampled over any larger box
//! on their intersection, and the result never depends on evaluation order or
//! thread layout.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a run with the given master seed.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ 0x5851_f42d_4c95_7f2d).wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Key of the cell at `coords` under `seed`. Coordinates may be negative.
#[inline]
pub fn cell_key(seed: u64, coords: &[i64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    for &c in coords {
        h = mix64(h ^ (c as u64).wrapping_mul(0xd6e8_feb8_6659_fd93).wrapping_add(GOLDEN));
    }
    h
}

/// Specialised two-dimensional form of [`cell_key`]; returns the same value.
#[inline]
pub fn cell_key2(seed: u64, x: i64, y: i64) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    h = mix64(h ^ (x as u64).wrapping_mul(0xd6e8_feb8_6659_fd93).wrapping_add(GOLDEN));
    mix64(h ^ (y as u64).wrapping_mul(0xd6e8_feb8_6659_fd93).wrapping_add(GOLDEN))
}

/// Maps 64 random bits onto `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A source of uniforms on `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

/// Uniform stream at a fixed key; position `j` yields `unit_f64(mix64(key + (j+1)·φ))`.
#[derive(Debug, Clone)]
pub struct CounterStream {
    key: u64,
    position: u64,
}

impl CounterStream {
    pub fn new(key: u64) -> Self {
        Self { key, position: 0 }
    }

    pub fn for_cell(seed: u64, coords: &[i64]) -> Self {
        Self::new(cell_key(seed, coords))
    }

    pub fn position(&self) -> u64 {
        self.position
    }
}

impl UniformSource for CounterStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        self.position += 1;
        unit_f64(mix64(self.key.wrapping_add(self.position.wrapping_mul(GOLDEN))))
    }
}

/// Replays a fixed list of uniforms; panics when exhausted.
#[derive(Debug, Clone)]
pub struct FixedUniforms<'a> {
    values: &'a [f64],
    next: usize,
}

impl<'a> FixedUniforms<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self { values, next: 0 }
    }
}

impl UniformSource for FixedUniforms<'_> {
    fn next_uniform(&mut self) -> f64 {
        let u = self.values[self.next];
        self.next += 1;
        u
    }
}
