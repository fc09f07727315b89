//! Lattices and spin configurations.
//!
//! Square grids index their sites row-major with `(i, j)` coordinates,
//! `i` the column and `j` the row, both 1-based, and `(1, 1)` the
//! bottom-left corner. Site `(i, j)` has index `(j - 1) * side + (i - 1)`.
//!
//! Honeycomb lattices use a brick-wall embedding: `rows` rows of
//! `2 * cols` sites, horizontal bonds along each row, and a vertical bond
//! between `(r, c)` and `(r + 1, c)` (0-based) whenever `r + c` is even.
//! Interior sites have degree 3.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin value, `+1` or `-1`.
pub type Spin = i8;

pub const PLUS: Spin = 1;
pub const MINUS: Spin = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    SquareGrid,
    Honeycomb,
}

/// Boundary condition. `MinusFrame` surrounds a square grid with a ring of
/// frozen `-1` sites that count as neighbours but never update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Free,
    MinusFrame,
}

/// Immutable graph of dynamic sites. Adjacency is stored in compressed
/// rows; frozen frame neighbours are kept as a per-site count since they
/// always carry spin `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    kind: LatticeKind,
    rows: usize,
    cols: usize,
    boundary: Boundary,
    offsets: Vec<u32>,
    adjacency: Vec<u32>,
    frozen: Vec<u8>,
}

impl Lattice {
    /// Square grid of side `k`.
    pub fn square(k: usize, boundary: Boundary) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidLattice(format!("square side must be >= 2, got {k}")));
        }
        let n = k * k;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adjacency = Vec::with_capacity(4 * n);
        let mut frozen = Vec::with_capacity(n);
        offsets.push(0);
        for row in 0..k {
            for col in 0..k {
                // Order: left, right, down, up.
                let mut missing = 0u8;
                if col > 0 {
                    adjacency.push((row * k + col - 1) as u32);
                } else {
                    missing += 1;
                }
                if col + 1 < k {
                    adjacency.push((row * k + col + 1) as u32);
                } else {
                    missing += 1;
                }
                if row > 0 {
                    adjacency.push(((row - 1) * k + col) as u32);
                } else {
                    missing += 1;
                }
                if row + 1 < k {
                    adjacency.push(((row + 1) * k + col) as u32);
                } else {
                    missing += 1;
                }
                offsets.push(adjacency.len() as u32);
                frozen.push(match boundary {
                    Boundary::Free => 0,
                    Boundary::MinusFrame => missing,
                });
            }
        }
        Ok(Self {
            kind: LatticeKind::SquareGrid,
            rows: k,
            cols: k,
            boundary,
            offsets,
            adjacency,
            frozen,
        })
    }

    /// Brick-wall honeycomb with `rows` rows and `2 * cols` sites per row.
    pub fn honeycomb(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidLattice(format!(
                "honeycomb dimensions must be >= 2, got {rows}x{cols}"
            )));
        }
        let width = 2 * cols;
        let n = rows * width;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adjacency = Vec::with_capacity(3 * n);
        offsets.push(0);
        for r in 0..rows {
            for c in 0..width {
                if c > 0 {
                    adjacency.push((r * width + c - 1) as u32);
                }
                if c + 1 < width {
                    adjacency.push((r * width + c + 1) as u32);
                }
                if (r + c) % 2 == 0 {
                    if r + 1 < rows {
                        adjacency.push(((r + 1) * width + c) as u32);
                    }
                } else if r > 0 {
                    adjacency.push(((r - 1) * width + c) as u32);
                }
                offsets.push(adjacency.len() as u32);
            }
        }
        Ok(Self {
            kind: LatticeKind::Honeycomb,
            rows,
            cols,
            boundary: Boundary::Free,
            offsets,
            adjacency,
            frozen: vec![0; n],
        })
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of rows of the site grid.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Sites per row of the site grid. For honeycombs this is `2 * cols`.
    pub fn width(&self) -> usize {
        match self.kind {
            LatticeKind::SquareGrid => self.cols,
            LatticeKind::Honeycomb => 2 * self.cols,
        }
    }

    /// Constructor argument `cols` (hexagon columns for honeycombs).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square grid.
    pub fn side(&self) -> Option<usize> {
        match self.kind {
            LatticeKind::SquareGrid => Some(self.rows),
            LatticeKind::Honeycomb => None,
        }
    }

    /// Number of dynamic sites.
    #[inline]
    pub fn site_count(&self) -> usize {
        self.frozen.len()
    }

    /// Dynamic neighbours of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    /// Number of frozen `-1` neighbours of `v`.
    #[inline]
    pub fn frozen_neighbors(&self, v: usize) -> u8 {
        self.frozen[v]
    }

    /// Total degree, frozen neighbours included.
    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len() + self.frozen[v] as usize
    }

    /// Site index of 1-based `(i, j)` = (column, row).
    pub fn site(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && j >= 1 && i <= self.width() && j <= self.rows);
        (j - 1) * self.width() + (i - 1)
    }

    /// Checked variant of [`Lattice::site`].
    pub fn try_site(&self, i: usize, j: usize) -> Option<usize> {
        if i >= 1 && j >= 1 && i <= self.width() && j <= self.rows {
            Some(self.site(i, j))
        } else {
            None
        }
    }

    /// 1-based `(column, row)` of site `v`.
    pub fn coords(&self, v: usize) -> (usize, usize) {
        let w = self.width();
        (v % w + 1, v / w + 1)
    }

    /// Sites at graph distance 1 from each other, each unordered pair once.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.site_count()).flat_map(move |v| {
            self.neighbors(v)
                .iter()
                .map(|&w| w as usize)
                .filter(move |&w| w > v)
                .map(move |w| (v, w))
        })
    }

    pub fn descriptor(&self) -> LatticeDescriptor {
        match self.kind {
            LatticeKind::SquareGrid => LatticeDescriptor {
                kind: self.kind,
                side: Some(self.rows),
                rows: None,
                cols: None,
                boundary: self.boundary,
            },
            LatticeKind::Honeycomb => LatticeDescriptor {
                kind: self.kind,
                side: None,
                rows: Some(self.rows),
                cols: Some(self.cols),
                boundary: self.boundary,
            },
        }
    }
}

/// Serializable description sufficient to rebuild a [`Lattice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDescriptor {
    pub kind: LatticeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default)]
    pub boundary: Boundary,
}

impl LatticeDescriptor {
    pub fn build(&self) -> Result<Lattice> {
        match self.kind {
            LatticeKind::SquareGrid => {
                let k = self
                    .side
                    .ok_or_else(|| Error::Parse("square_grid requires `side`".into()))?;
                Lattice::square(k, self.boundary)
            }
            LatticeKind::Honeycomb => {
                let (Some(r), Some(c)) = (self.rows, self.cols) else {
                    return Err(Error::Parse("honeycomb requires `rows` and `cols`".into()));
                };
                if self.boundary != Boundary::Free {
                    return Err(Error::InvalidLattice("honeycomb supports only free boundary".into()));
                }
                Lattice::honeycomb(r, c)
            }
        }
    }
}

/// Bit-packed spin assignment; bit set means `+1`.
#[derive(Clone)]
pub struct Configuration {
    lattice: Arc<Lattice>,
    words: Vec<u64>,
    plus: usize,
}

impl Configuration {
    /// Every site set to `spin`.
    pub fn uniform(lattice: Arc<Lattice>, spin: Spin) -> Self {
        let n = lattice.site_count();
        let mut words = vec![0u64; n.div_ceil(64)];
        let mut plus = 0;
        if spin > 0 {
            for (w, word) in words.iter_mut().enumerate() {
                let bits = (n - 64 * w).min(64);
                *word = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
            }
            plus = n;
        }
        Self { lattice, words, plus }
    }

    pub fn all_plus(lattice: Arc<Lattice>) -> Self {
        Self::uniform(lattice, PLUS)
    }

    pub fn all_minus(lattice: Arc<Lattice>) -> Self {
        Self::uniform(lattice, MINUS)
    }

    /// Build from a per-site predicate returning `true` for `+1`.
    pub fn from_fn(lattice: Arc<Lattice>, mut plus_at: impl FnMut(usize) -> bool) -> Self {
        let mut cfg = Self::all_minus(lattice);
        for v in 0..cfg.len() {
            if plus_at(v) {
                cfg.set(v, PLUS);
            }
        }
        cfg
    }

    /// Build from one boolean per site (`true` = `+1`).
    pub fn from_bits(lattice: Arc<Lattice>, bits: &[bool]) -> Result<Self> {
        if bits.len() != lattice.site_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} spins, got {}",
                lattice.site_count(),
                bits.len()
            )));
        }
        Ok(Self::from_fn(lattice, |v| bits[v]))
    }

    /// Site `v` gets bit `v` of `index`. Only for lattices of at most 64 sites.
    pub fn from_index(lattice: Arc<Lattice>, index: u64) -> Self {
        assert!(lattice.site_count() <= 64, "from_index needs <= 64 sites");
        let n = lattice.site_count();
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let word = index & mask;
        Self {
            lattice,
            words: vec![word],
            plus: word.count_ones() as usize,
        }
    }

    /// Inverse of [`Configuration::from_index`].
    pub fn index(&self) -> u64 {
        assert!(self.len() <= 64, "index needs <= 64 sites");
        self.words[0]
    }

    /// I.i.d. spins, `+1` with probability `p`.
    pub fn random<R: Rng + ?Sized>(lattice: Arc<Lattice>, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
        }
        Ok(Self::from_fn(lattice, |_| rng.gen::<f64>() < p))
    }

    #[inline]
    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.lattice.site_count()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn is_plus(&self, v: usize) -> bool {
        (self.words[v >> 6] >> (v & 63)) & 1 == 1
    }

    #[inline]
    pub fn spin(&self, v: usize) -> Spin {
        if self.is_plus(v) {
            PLUS
        } else {
            MINUS
        }
    }

    #[inline]
    pub fn set(&mut self, v: usize, spin: Spin) {
        if (spin > 0) != self.is_plus(v) {
            self.flip(v);
        }
    }

    /// Flip the spin at `v` in place.
    #[inline]
    pub fn flip(&mut self, v: usize) {
        let mask = 1u64 << (v & 63);
        let word = &mut self.words[v >> 6];
        if *word & mask != 0 {
            self.plus -= 1;
        } else {
            self.plus += 1;
        }
        *word ^= mask;
    }

    /// Copy with the spin at `v` flipped.
    pub fn flipped(&self, v: usize) -> Self {
        let mut out = self.clone();
        out.flip(v);
        out
    }

    #[inline]
    pub fn plus_count(&self) -> usize {
        self.plus
    }

    #[inline]
    pub fn minus_count(&self) -> usize {
        self.len() - self.plus
    }

    pub fn is_all_minus(&self) -> bool {
        self.plus == 0
    }

    pub fn is_all_plus(&self) -> bool {
        self.plus == self.len()
    }

    /// Number of `+1` and `-1` neighbours of `v`, frozen frame included.
    #[inline]
    pub fn neighbor_signs(&self, v: usize) -> (u32, u32) {
        let mut plus = 0u32;
        let nbrs = self.lattice.neighbors(v);
        for &w in nbrs {
            plus += self.is_plus(w as usize) as u32;
        }
        let total = nbrs.len() as u32 + self.lattice.frozen_neighbors(v) as u32;
        (plus, total - plus)
    }

    /// `(m, l)`: neighbours agreeing and disagreeing with the spin at `v`.
    #[inline]
    pub fn local_counts(&self, v: usize) -> (u32, u32) {
        let (plus, minus) = self.neighbor_signs(v);
        if self.is_plus(v) {
            (plus, minus)
        } else {
            (minus, plus)
        }
    }

    /// Sum of neighbour spins.
    #[inline]
    pub fn neighbor_sum(&self, v: usize) -> i32 {
        let (plus, minus) = self.neighbor_signs(v);
        plus as i32 - minus as i32
    }

    /// Exact magnetization as `(sum of spins, site count)`.
    pub fn magnetization_ratio(&self) -> (i64, u64) {
        (self.plus as i64 - self.minus_count() as i64, self.len() as u64)
    }

    pub fn magnetization(&self) -> f64 {
        let (num, den) = self.magnetization_ratio();
        num as f64 / den as f64
    }

    /// Ising energy `-sum over edges of s(u) s(v)`, frozen frame bonds included.
    pub fn hamiltonian(&self) -> i64 {
        let mut energy = 0i64;
        for (u, v) in self.lattice.edges() {
            energy -= (self.spin(u) * self.spin(v)) as i64;
        }
        for v in 0..self.len() {
            // Frozen neighbours are -1.
            energy += self.lattice.frozen_neighbors(v) as i64 * self.spin(v) as i64;
        }
        energy
    }

    /// Coordinatewise order: `self(v) >= other(v)` everywhere.
    pub fn dominates(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| b & !a == 0)
    }

    /// Number of sites where the two configurations differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len()).map(|v| self.is_plus(v)).collect()
    }

    /// Spins packed little-endian (site `v` is bit `v % 8` of byte `v / 8`)
    /// and hex encoded.
    pub fn spins_hex(&self) -> String {
        let nbytes = self.len().div_ceil(8);
        let bytes: Vec<u8> = self
            .words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect();
        hex::encode(bytes)
    }

    pub fn to_record(&self) -> ConfigurationRecord {
        ConfigurationRecord {
            lattice: self.lattice.descriptor(),
            spins_hex: self.spins_hex(),
        }
    }

    pub fn from_record(record: &ConfigurationRecord) -> Result<Self> {
        let lattice = Arc::new(record.lattice.build()?);
        Self::from_hex(lattice, &record.spins_hex)
    }

    /// Decode [`Configuration::spins_hex`] output for `lattice`.
    pub fn from_hex(lattice: Arc<Lattice>, spins_hex: &str) -> Result<Self> {
        let bytes = hex::decode(spins_hex).map_err(|e| Error::Parse(format!("spins_hex: {e}")))?;
        let n = lattice.site_count();
        if bytes.len() != n.div_ceil(8) {
            return Err(Error::Parse(format!(
                "spins_hex has {} bytes, lattice needs {}",
                bytes.len(),
                n.div_ceil(8)
            )));
        }
        for v in n..8 * bytes.len() {
            if (bytes[v / 8] >> (v % 8)) & 1 == 1 {
                return Err(Error::Parse("spins_hex sets bits beyond the lattice".into()));
            }
        }
        Ok(Self::from_fn(lattice, |v| (bytes[v / 8] >> (v % 8)) & 1 == 1))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: ConfigurationRecord = serde_json::from_str(text)?;
        Self::from_record(&record)
    }

    /// Rows from top to bottom, `+` and `-` per site.
    pub fn render(&self) -> String {
        let w = self.lattice.width();
        let mut out = String::new();
        for row in (0..self.lattice.rows()).rev() {
            for col in 0..w {
                out.push(if self.is_plus(row * w + col) { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice == other.lattice)
            && self.words == other.words
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lattice.descriptor().hash(state);
        self.words.hash(state);
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({:?}, ", self.lattice.descriptor())?;
        if self.len() <= 256 {
            write!(f, "\n{})", self.render())
        } else {
            write!(f, "{} plus of {})", self.plus, self.len())
        }
    }
}

/// JSON form of a configuration: the lattice descriptor flattened next to
/// the hex-encoded spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationRecord {
    #[serde(flatten)]
    pub lattice: LatticeDescriptor,
    pub spins_hex: String,
}
