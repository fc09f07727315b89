//! Encoders and decoders mapping bit strings to initial configurations.
//!
//! * [`StripeCodec`]: horizontal stripes of width two, one bit each.
//! * [`DropletCodec`]: a `K x K` array of square blocks separated by
//!   all-minus walls of width two; bit 1 fills a block with plus. Blocks
//!   erode at zero temperature but minus blocks can never turn plus.
//! * [`FieldDropletCodec`]: 2x2 droplets whose corner ties are broken by an
//!   external field, which makes every codeword a fixed point.
//! * [`BetaStripeCodec`]: width-1 stripes at top and bottom, width-2 stripes
//!   in between, separated by minus walls; decoded by per-stripe majority.
//! * [`HoneycombCodec`]: hexagonal rings on the honeycomb, one bit each.
//!
//! Bit strings are `&[bool]`; messages shorter than the capacity leave the
//! remaining positions at 0 (for stripes, the last bit is repeated).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsParams, Field};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Lattice};

/// Common interface of the coding schemes.
pub trait Codec {
    fn lattice(&self) -> &Arc<Lattice>;

    /// Number of bits one codeword carries.
    fn capacity(&self) -> usize;

    fn encode(&self, bits: &[bool]) -> Result<Configuration>;

    /// Reads all `capacity()` bits.
    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>>;

    /// Dynamics the scheme is designed for.
    fn dynamics(&self) -> DynamicsParams {
        DynamicsParams::zero_temperature()
    }

    /// Reads the first `len` bits.
    fn decode_prefix(&self, cfg: &Configuration, len: usize) -> Result<Vec<bool>> {
        let mut bits = self.decode(cfg)?;
        if len > bits.len() {
            return Err(Error::MessageTooLong {
                len,
                capacity: bits.len(),
            });
        }
        bits.truncate(len);
        Ok(bits)
    }
}

fn check_len(len: usize, capacity: usize) -> Result<()> {
    if len > capacity {
        Err(Error::MessageTooLong { len, capacity })
    } else {
        Ok(())
    }
}

fn check_lattice(expected: &Lattice, cfg: &Configuration) -> Result<()> {
    if **cfg.lattice() != *expected {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

/// One bit per pair of rows; leftover rows copy the last bit.
#[derive(Debug, Clone)]
pub struct StripeCodec {
    k: usize,
    lattice: Arc<Lattice>,
}

impl StripeCodec {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self {
            k,
            lattice: Arc::new(Lattice::square(k, Boundary::Free)?),
        })
    }
}

impl Codec for StripeCodec {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    fn capacity(&self) -> usize {
        self.k / 2
    }

    fn encode(&self, bits: &[bool]) -> Result<Configuration> {
        check_len(bits.len(), self.capacity())?;
        let l = self.lattice.clone();
        Ok(Configuration::from_fn(self.lattice.clone(), |v| {
            let row = l.coords(v).1;
            let idx = ((row - 1) / 2).min(bits.len().saturating_sub(1));
            bits.get(idx).copied().unwrap_or(false)
        }))
    }

    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>> {
        check_lattice(&self.lattice, cfg)?;
        // Bit i sits in rows 2i-1 and 2i; read the first of them at column 1.
        Ok((0..self.capacity())
            .map(|i| cfg.is_plus(self.lattice.site(1, 2 * i + 1)))
            .collect())
    }
}

/// Block geometry shared by the droplet schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropletLayout {
    pub k: usize,
    pub side: usize,
    pub per_axis: usize,
}

impl DropletLayout {
    pub fn new(k: usize, area: usize) -> Result<Self> {
        let side = (area as f64).sqrt().round() as usize;
        if side * side != area || side < 2 {
            return Err(Error::InvalidArgument(format!(
                "droplet area must be a perfect square >= 4, got {area}"
            )));
        }
        if k < 2 {
            return Err(Error::InvalidLattice(format!("side must be >= 2, got {k}")));
        }
        let per_axis = (k - 2) / (side + 2);
        if per_axis == 0 {
            return Err(Error::InfeasibleGeometry(format!(
                "a {side}x{side} droplet with width-2 walls does not fit in a {k}x{k} grid"
            )));
        }
        Ok(Self { k, side, per_axis })
    }

    pub fn capacity(&self) -> usize {
        self.per_axis * self.per_axis
    }

    /// 1-based inclusive coordinate range of block index `i` (1-based)
    /// along one axis: `[i(s+2) - s + 1, i(s+2)]`.
    pub fn range(&self, i: usize) -> (usize, usize) {
        let hi = i * (self.side + 2);
        (hi + 1 - self.side, hi)
    }

    /// Bit index of the block containing `(x, y)`, if any. Bit `(i, j)` is
    /// stored at index `(j - 1) K + (i - 1)`.
    pub fn block_of(&self, x: usize, y: usize) -> Option<usize> {
        let axis = |c: usize| {
            let period = self.side + 2;
            let i = c.div_ceil(period);
            let (lo, hi) = self.range(i);
            (i >= 1 && i <= self.per_axis && c >= lo && c <= hi).then_some(i)
        };
        Some((axis(y)? - 1) * self.per_axis + axis(x)? - 1)
    }

    pub fn block_sites(&self, lattice: &Lattice, bit: usize) -> Vec<usize> {
        let (i, j) = (bit % self.per_axis + 1, bit / self.per_axis + 1);
        let (x0, x1) = self.range(i);
        let (y0, y1) = self.range(j);
        let mut out = Vec::with_capacity(self.side * self.side);
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.push(lattice.site(x, y));
            }
        }
        out
    }
}

/// `K x K` square droplets in an all-minus background. Decoding reports 1
/// for a block holding at least one plus spin.
#[derive(Debug, Clone)]
pub struct DropletCodec {
    layout: DropletLayout,
    lattice: Arc<Lattice>,
}

impl DropletCodec {
    pub fn new(k: usize, area: usize) -> Result<Self> {
        let layout = DropletLayout::new(k, area)?;
        Ok(Self {
            layout,
            lattice: Arc::new(Lattice::square(k, Boundary::Free)?),
        })
    }

    pub fn layout(&self) -> DropletLayout {
        self.layout
    }
}

fn droplet_encode(layout: &DropletLayout, lattice: &Arc<Lattice>, bits: &[bool], droplet_plus: bool) -> Result<Configuration> {
    check_len(bits.len(), layout.capacity())?;
    let l = lattice.clone();
    Ok(Configuration::from_fn(lattice.clone(), |v| {
        let (x, y) = l.coords(v);
        let on = layout.block_of(x, y).is_some_and(|b| bits.get(b).copied().unwrap_or(false));
        on == droplet_plus
    }))
}

fn droplet_decode(layout: &DropletLayout, lattice: &Lattice, cfg: &Configuration, droplet_plus: bool) -> Result<Vec<bool>> {
    check_lattice(lattice, cfg)?;
    Ok((0..layout.capacity())
        .map(|b| layout.block_sites(lattice, b).iter().any(|&v| cfg.is_plus(v) == droplet_plus))
        .collect())
}

impl Codec for DropletCodec {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    fn capacity(&self) -> usize {
        self.layout.capacity()
    }

    fn encode(&self, bits: &[bool]) -> Result<Configuration> {
        droplet_encode(&self.layout, &self.lattice, bits, true)
    }

    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>> {
        droplet_decode(&self.layout, &self.lattice, cfg, true)
    }
}

/// 2x2 droplets carrying the field's sign in a background of the opposite
/// sign. With ties broken toward the field, every codeword is frozen.
#[derive(Debug, Clone)]
pub struct FieldDropletCodec {
    layout: DropletLayout,
    field: Field,
    lattice: Arc<Lattice>,
}

impl FieldDropletCodec {
    pub fn new(k: usize, field: Field) -> Result<Self> {
        if field == Field::None {
            return Err(Error::InvalidArgument("field droplets need a field sign".into()));
        }
        Ok(Self {
            layout: DropletLayout::new(k, 4)?,
            field,
            lattice: Arc::new(Lattice::square(k, Boundary::Free)?),
        })
    }

    pub fn layout(&self) -> DropletLayout {
        self.layout
    }

    fn droplet_plus(&self) -> bool {
        self.field == Field::Plus
    }
}

impl Codec for FieldDropletCodec {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    fn capacity(&self) -> usize {
        self.layout.capacity()
    }

    fn encode(&self, bits: &[bool]) -> Result<Configuration> {
        droplet_encode(&self.layout, &self.lattice, bits, self.droplet_plus())
    }

    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>> {
        droplet_decode(&self.layout, &self.lattice, cfg, self.droplet_plus())
    }

    fn dynamics(&self) -> DynamicsParams {
        DynamicsParams::zero_temperature().with_field(self.field)
    }
}

/// Row layout of the finite-temperature stripe scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaStripeLayout {
    pub k: usize,
    /// 1-based rows of each data stripe, bottom to top.
    pub stripes: Vec<Vec<usize>>,
}

/// Bottom row, then `m` blocks of (two wall rows, two data rows), then a
/// wall of at least two rows and the top row: `K = m + 2` stripes with
/// `m = floor((k - 4) / 4)`. Surplus rows widen the top wall.
#[derive(Debug, Clone)]
pub struct BetaStripeCodec {
    layout: BetaStripeLayout,
    lattice: Arc<Lattice>,
    beta: f64,
}

impl BetaStripeCodec {
    pub fn new(k: usize, beta: f64) -> Result<Self> {
        if k < 4 {
            return Err(Error::InfeasibleGeometry(format!("stripe scheme needs k >= 4, got {k}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("stripe scheme needs finite beta > 0, got {beta}")));
        }
        let m = (k - 4) / 4;
        let mut stripes = vec![vec![1]];
        for b in 0..m {
            let lo = 1 + 4 * b + 3;
            stripes.push(vec![lo, lo + 1]);
        }
        stripes.push(vec![k]);
        Ok(Self {
            layout: BetaStripeLayout { k, stripes },
            lattice: Arc::new(Lattice::square(k, Boundary::Free)?),
            beta,
        })
    }

    pub fn layout(&self) -> &BetaStripeLayout {
        &self.layout
    }

    /// Plus count of stripe `j` (0-based).
    pub fn plus_count(&self, cfg: &Configuration, j: usize) -> usize {
        let k = self.layout.k;
        self.layout.stripes[j]
            .iter()
            .map(|&row| (1..=k).filter(|&x| cfg.is_plus(self.lattice.site(x, row))).count())
            .sum()
    }
}

impl Codec for BetaStripeCodec {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    fn capacity(&self) -> usize {
        self.layout.stripes.len()
    }

    fn encode(&self, bits: &[bool]) -> Result<Configuration> {
        check_len(bits.len(), self.capacity())?;
        let mut cfg = Configuration::all_minus(self.lattice.clone());
        for (j, &bit) in bits.iter().enumerate() {
            if bit {
                for &row in &self.layout.stripes[j] {
                    for x in 1..=self.layout.k {
                        cfg.flip(self.lattice.site(x, row));
                    }
                }
            }
        }
        Ok(cfg)
    }

    /// Bit `j` is 1 iff stripe `j` holds at least `k / 2` plus spins.
    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>> {
        check_lattice(&self.lattice, cfg)?;
        Ok((0..self.capacity())
            .map(|j| 2 * self.plus_count(cfg, j) >= self.layout.k)
            .collect())
    }

    fn dynamics(&self) -> DynamicsParams {
        DynamicsParams::finite(self.beta)
    }
}

/// Hexagonal rings on the brick-wall honeycomb. A ring's six sites each
/// have two neighbours inside the ring, so a monochromatic ring agrees with
/// a strict majority regardless of its surroundings. Tiles are placed so
/// that every site outside the tiles touches at most one tile and, if it
/// touches one, has three neighbours.
#[derive(Debug, Clone)]
pub struct HoneycombCodec {
    lattice: Arc<Lattice>,
    tiles: Vec<[usize; 6]>,
}

impl HoneycombCodec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        let lattice = Arc::new(Lattice::honeycomb(rows, cols)?);
        let tiles = honeycomb_tiles(&lattice);
        if tiles.is_empty() {
            return Err(Error::InfeasibleGeometry(format!(
                "no hexagon fits a {rows}x{cols} honeycomb"
            )));
        }
        Ok(Self { lattice, tiles })
    }

    pub fn tiles(&self) -> &[[usize; 6]] {
        &self.tiles
    }
}

fn hexagon(lattice: &Lattice, x: usize, y: usize) -> Option<[usize; 6]> {
    // Lower-left corner at 1-based (x, y); its bond goes up when (x-1)+(y-1) is even.
    let w = lattice.width();
    if !(x + y).is_multiple_of(2) || x + 2 > w || y + 1 > lattice.rows() {
        return None;
    }
    let s = |dx: usize, dy: usize| lattice.site(x + dx, y + dy);
    Some([s(0, 0), s(1, 0), s(2, 0), s(0, 1), s(1, 1), s(2, 1)])
}

fn honeycomb_tiles(lattice: &Lattice) -> Vec<[usize; 6]> {
    let n = lattice.site_count();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut tiles: Vec<[usize; 6]> = Vec::new();
    for y in 1..=lattice.rows() {
        for x in 1..=lattice.width() {
            let Some(hex) = hexagon(lattice, x, y) else { continue };
            if hex.iter().any(|&v| owner[v].is_some()) {
                continue;
            }
            let id = tiles.len();
            let ok = hex.iter().all(|&v| {
                lattice.neighbors(v).iter().all(|&w| {
                    let w = w as usize;
                    if hex.contains(&w) || owner[w].is_some() {
                        return true;
                    }
                    // Outside site touching the new tile.
                    if lattice.degree(w) != 3 {
                        return false;
                    }
                    lattice
                        .neighbors(w)
                        .iter()
                        .all(|&z| owner[z as usize].is_none() || hex.contains(&(z as usize)))
                })
            });
            if ok {
                for &v in &hex {
                    owner[v] = Some(id);
                }
                tiles.push(hex);
            }
        }
    }
    tiles
}

impl Codec for HoneycombCodec {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    fn capacity(&self) -> usize {
        self.tiles.len()
    }

    fn encode(&self, bits: &[bool]) -> Result<Configuration> {
        check_len(bits.len(), self.capacity())?;
        let mut cfg = Configuration::all_minus(self.lattice.clone());
        for (tile, &bit) in self.tiles.iter().zip(bits) {
            if bit {
                for &v in tile {
                    cfg.flip(v);
                }
            }
        }
        Ok(cfg)
    }

    /// Majority over the six ring sites.
    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>> {
        check_lattice(&self.lattice, cfg)?;
        Ok(self
            .tiles
            .iter()
            .map(|t| t.iter().filter(|&&v| cfg.is_plus(v)).count() > 3)
            .collect())
    }
}

/// Serializable codec selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodecSpec {
    Stripe { k: usize },
    Droplet { k: usize, area: usize },
    FieldDroplet { k: usize, field: Field },
    BetaStripe { k: usize, beta: f64 },
    Honeycomb { rows: usize, cols: usize },
}

impl CodecSpec {
    pub fn build(&self) -> Result<AnyCodec> {
        Ok(match *self {
            CodecSpec::Stripe { k } => AnyCodec::Stripe(StripeCodec::new(k)?),
            CodecSpec::Droplet { k, area } => AnyCodec::Droplet(DropletCodec::new(k, area)?),
            CodecSpec::FieldDroplet { k, field } => AnyCodec::FieldDroplet(FieldDropletCodec::new(k, field)?),
            CodecSpec::BetaStripe { k, beta } => AnyCodec::BetaStripe(BetaStripeCodec::new(k, beta)?),
            CodecSpec::Honeycomb { rows, cols } => AnyCodec::Honeycomb(HoneycombCodec::new(rows, cols)?),
        })
    }
}

#[derive(Debug, Clone)]
pub enum AnyCodec {
    Stripe(StripeCodec),
    Droplet(DropletCodec),
    FieldDroplet(FieldDropletCodec),
    BetaStripe(BetaStripeCodec),
    Honeycomb(HoneycombCodec),
}

impl AnyCodec {
    fn inner(&self) -> &dyn Codec {
        match self {
            AnyCodec::Stripe(c) => c,
            AnyCodec::Droplet(c) => c,
            AnyCodec::FieldDroplet(c) => c,
            AnyCodec::BetaStripe(c) => c,
            AnyCodec::Honeycomb(c) => c,
        }
    }

    /// Layout details for logs: block ranges, stripe rows, or tile sites.
    pub fn describe(&self) -> serde_json::Value {
        match self {
            AnyCodec::Stripe(c) => serde_json::json!({"scheme": "stripe", "k": c.k, "capacity": c.capacity()}),
            AnyCodec::Droplet(c) => serde_json::json!({"scheme": "droplet", "layout": c.layout, "capacity": c.capacity()}),
            AnyCodec::FieldDroplet(c) => serde_json::json!({
                "scheme": "field_droplet", "layout": c.layout, "field": c.field, "capacity": c.capacity()
            }),
            AnyCodec::BetaStripe(c) => serde_json::json!({
                "scheme": "beta_stripe", "layout": c.layout, "beta": c.beta, "capacity": c.capacity()
            }),
            AnyCodec::Honeycomb(c) => serde_json::json!({
                "scheme": "honeycomb", "rows": c.lattice.rows(), "cols": c.lattice.cols(),
                "tiles": c.tiles, "capacity": c.capacity()
            }),
        }
    }
}

impl Codec for AnyCodec {
    fn lattice(&self) -> &Arc<Lattice> {
        self.inner().lattice()
    }

    fn capacity(&self) -> usize {
        self.inner().capacity()
    }

    fn encode(&self, bits: &[bool]) -> Result<Configuration> {
        self.inner().encode(bits)
    }

    fn decode(&self, cfg: &Configuration) -> Result<Vec<bool>> {
        self.inner().decode(cfg)
    }

    fn dynamics(&self) -> DynamicsParams {
        self.inner().dynamics()
    }
}

/// Bits packed little-endian (bit `i` is bit `i % 8` of byte `i / 8`), hex encoded.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    hex::encode(bytes)
}

/// Inverse of [`bits_to_hex`] for a message of `len` bits.
pub fn bits_from_hex(text: &str, len: usize) -> Result<Vec<bool>> {
    let bytes = hex::decode(text).map_err(|e| Error::Parse(format!("message hex: {e}")))?;
    if bytes.len() != len.div_ceil(8) {
        return Err(Error::Parse(format!(
            "message of {len} bits needs {} hex bytes, got {}",
            len.div_ceil(8),
            bytes.len()
        )));
    }
    let bits: Vec<bool> = (0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect();
    if (len..8 * bytes.len()).any(|i| bytes[i / 8] >> (i % 8) & 1 == 1) {
        return Err(Error::Parse("message hex sets bits beyond its length".into()));
    }
    Ok(bits)
}

/// All messages of exactly `len` bits, in counting order.
pub fn all_messages(len: usize) -> impl Iterator<Item = Vec<bool>> {
    assert!(len < 32, "message enumeration limited to < 32 bits");
    (0u32..(1 << len)).map(move |m| (0..len).map(|i| m >> i & 1 == 1).collect())
}
