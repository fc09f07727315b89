//! Stable configurations, stripes, and paths into the stable set.
//!
//! A configuration is stable at zero temperature when every site strictly
//! agrees with the majority of its neighbours. On square grids with free
//! boundary these are exactly the striped configurations: monochromatic
//! horizontal or vertical stripes, each at least two sites wide.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{zero_temp_flip_prob, Field};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Lattice, LatticeKind, Spin, MINUS, PLUS};

/// True iff no site can change under the zero-temperature rule.
pub fn is_stable(cfg: &Configuration) -> bool {
    (0..cfg.len()).all(|v| {
        let (m, l) = cfg.local_counts(v);
        m > l
    })
}

/// Stability when ties are broken toward `field`.
pub fn is_stable_with_field(cfg: &Configuration, field: Field) -> bool {
    (0..cfg.len()).all(|v| zero_temp_flip_prob(cfg, v, field) == 0.0)
}

/// Sites grouped by how they relate to their neighbourhood majority
/// (`a`gree, `d`isagree, `u`ndecided) and by their own sign.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SiteClassification {
    pub agree_plus: Vec<usize>,
    pub agree_minus: Vec<usize>,
    pub disagree_plus: Vec<usize>,
    pub disagree_minus: Vec<usize>,
    pub undecided_plus: Vec<usize>,
    pub undecided_minus: Vec<usize>,
}

impl SiteClassification {
    pub fn undecided(&self) -> usize {
        self.undecided_plus.len() + self.undecided_minus.len()
    }

    pub fn disagreeing(&self) -> usize {
        self.disagree_plus.len() + self.disagree_minus.len()
    }
}

fn classify_with(cfg: &Configuration, counts: impl Fn(usize) -> (u32, u32)) -> SiteClassification {
    let mut out = SiteClassification::default();
    for v in 0..cfg.len() {
        let (m, l) = counts(v);
        let plus = cfg.is_plus(v);
        let bucket = match (m.cmp(&l), plus) {
            (std::cmp::Ordering::Greater, true) => &mut out.agree_plus,
            (std::cmp::Ordering::Greater, false) => &mut out.agree_minus,
            (std::cmp::Ordering::Less, true) => &mut out.disagree_plus,
            (std::cmp::Ordering::Less, false) => &mut out.disagree_minus,
            (std::cmp::Ordering::Equal, true) => &mut out.undecided_plus,
            (std::cmp::Ordering::Equal, false) => &mut out.undecided_minus,
        };
        bucket.push(v);
    }
    out
}

pub fn classify_sites(cfg: &Configuration) -> SiteClassification {
    classify_with(cfg, |v| cfg.local_counts(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
    Uniform,
}

/// Stripe layout. `cuts` holds the last row (or column) of each stripe,
/// 1-based and ascending, ending at the side length; `spins` holds one
/// sign per stripe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StripeDescription {
    pub orientation: Orientation,
    pub cuts: Vec<usize>,
    pub spins: Vec<Spin>,
}

impl StripeDescription {
    /// Checks that cuts ascend in steps of at least two, end at `k`, and
    /// that neighbouring stripes differ in sign.
    pub fn validate(&self, k: usize) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("stripe description: {msg}")));
        if self.cuts.is_empty() || self.cuts.len() != self.spins.len() {
            return bad("cuts and spins must be non-empty and of equal length");
        }
        if *self.cuts.last().unwrap() != k {
            return bad("last cut must equal the side length");
        }
        let mut prev = 0;
        for &c in &self.cuts {
            if c < prev + 2 {
                return bad("stripes must be at least two wide");
            }
            prev = c;
        }
        if self.spins.iter().any(|&s| s != PLUS && s != MINUS) {
            return bad("spins must be +1 or -1");
        }
        if self.spins.windows(2).any(|w| w[0] == w[1]) {
            return bad("adjacent stripes must differ");
        }
        match (self.orientation, self.cuts.len()) {
            (Orientation::Uniform, 1) => Ok(()),
            (Orientation::Uniform, _) => bad("uniform description has one stripe"),
            (_, 1) => bad("a single stripe is uniform"),
            _ => Ok(()),
        }
    }

    /// Builds the configuration on a square grid.
    pub fn to_configuration(&self, lattice: Arc<Lattice>) -> Result<Configuration> {
        let k = lattice
            .side()
            .ok_or_else(|| Error::InvalidLattice("stripes need a square grid".into()))?;
        self.validate(k)?;
        let spin_at = |idx: usize| {
            let stripe = self.cuts.iter().position(|&c| idx <= c).expect("cut covers index");
            self.spins[stripe]
        };
        let l = lattice.clone();
        Ok(Configuration::from_fn(lattice, |v| {
            let (i, j) = l.coords(v);
            let idx = if self.orientation == Orientation::Vertical { i } else { j };
            spin_at(idx) > 0
        }))
    }
}

/// Run-length cuts of a sequence of line spins, or `None` if some run is
/// shorter than two.
fn runs(lines: &[Spin]) -> Option<(Vec<usize>, Vec<Spin>)> {
    let mut cuts = Vec::new();
    let mut spins = Vec::new();
    let mut start = 0;
    for idx in 1..=lines.len() {
        if idx == lines.len() || lines[idx] != lines[start] {
            if idx - start < 2 {
                return None;
            }
            cuts.push(idx);
            spins.push(lines[start]);
            start = idx;
        }
    }
    Some((cuts, spins))
}

/// Detects a striped configuration on a square grid.
pub fn is_striped(cfg: &Configuration) -> Option<StripeDescription> {
    let lat = cfg.lattice();
    let k = lat.side()?;
    if cfg.is_all_plus() || cfg.is_all_minus() {
        return Some(StripeDescription {
            orientation: Orientation::Uniform,
            cuts: vec![k],
            spins: vec![if cfg.is_all_plus() { PLUS } else { MINUS }],
        });
    }
    for orientation in [Orientation::Horizontal, Orientation::Vertical] {
        let at = |line: usize, pos: usize| match orientation {
            Orientation::Horizontal => cfg.spin(lat.site(pos, line)),
            _ => cfg.spin(lat.site(line, pos)),
        };
        let mut lines = Vec::with_capacity(k);
        let mut ok = true;
        for line in 1..=k {
            let s = at(line, 1);
            if (2..=k).any(|pos| at(line, pos) != s) {
                ok = false;
                break;
            }
            lines.push(s);
        }
        if !ok {
            continue;
        }
        if let Some((cuts, spins)) = runs(&lines) {
            return Some(StripeDescription {
                orientation,
                cuts,
                spins,
            });
        }
    }
    None
}

fn fibonacci(m: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..m {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// `4 f_{k-1}` with `f_0 = 0, f_1 = 1`. This counts the all-plus and
/// all-minus configurations once per orientation.
pub fn striped_count_formula(k: usize) -> Result<u128> {
    if !(2..=180).contains(&k) {
        return Err(Error::InvalidArgument(format!("side must be in 2..=180, got {k}")));
    }
    Ok(4 * fibonacci(k - 1))
}

/// Every horizontal stripe description of side `k`, uniform ones included.
pub fn horizontal_descriptions(k: usize) -> Result<Vec<StripeDescription>> {
    if !(2..=24).contains(&k) {
        return Err(Error::InvalidArgument(format!("side must be in 2..=24, got {k}")));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        let lines: Vec<Spin> = (0..k).map(|b| if mask >> b & 1 == 1 { PLUS } else { MINUS }).collect();
        if let Some((cuts, spins)) = runs(&lines) {
            let orientation = if cuts.len() == 1 { Orientation::Uniform } else { Orientation::Horizontal };
            out.push(StripeDescription {
                orientation,
                cuts,
                spins,
            });
        }
    }
    Ok(out)
}

/// Number of distinct striped configurations: each horizontal layout, its
/// transpose, with the two uniform configurations counted once.
pub fn distinct_striped_count(k: usize) -> Result<u128> {
    let a = horizontal_descriptions(k)?.len() as u128;
    Ok(2 * a - 2)
}

/// Exhaustive scan of the `2^(k^2)` configurations of the free `k x k`
/// grid. Limited to `k <= 5`.
pub fn enumerate_stable(k: usize) -> Result<Vec<Configuration>> {
    if !(2..=5).contains(&k) {
        return Err(Error::InvalidArgument(format!("exhaustive scan needs 2 <= k <= 5, got {k}")));
    }
    let lattice = Arc::new(Lattice::square(k, Boundary::Free)?);
    let n = k * k;
    let masks = neighbour_masks(&lattice);
    let mut out = Vec::new();
    for index in 0u64..(1u64 << n) {
        if stable_bits(index, &masks) {
            out.push(Configuration::from_index(lattice.clone(), index));
        }
    }
    Ok(out)
}

fn neighbour_masks(lattice: &Lattice) -> Vec<u64> {
    (0..lattice.site_count())
        .map(|v| lattice.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect()
}

fn stable_bits(index: u64, masks: &[u64]) -> bool {
    masks.iter().enumerate().all(|(v, &mask)| {
        let plus = (index & mask).count_ones();
        let deg = mask.count_ones();
        let agree = if index >> v & 1 == 1 { plus } else { deg - plus };
        2 * agree > deg
    })
}

/// Census row comparing the closed-form count with direct enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub k: usize,
    pub formula_count: u128,
    /// Absent when the grid is too large to scan.
    pub brute_force_count: Option<u128>,
    pub distinct_striped_count: u128,
}

impl CensusRow {
    /// True when the formula disagrees with the distinct count.
    pub fn discrepancy(&self) -> bool {
        self.formula_count != self.distinct_striped_count
            || self.brute_force_count.is_some_and(|b| b != self.distinct_striped_count)
    }
}

pub fn census(k: usize) -> Result<CensusRow> {
    let brute_force_count = if k <= 5 {
        Some(enumerate_stable(k)?.len() as u128)
    } else {
        None
    };
    Ok(CensusRow {
        k,
        formula_count: striped_count_formula(k)?,
        brute_force_count,
        distinct_striped_count: distinct_striped_count(k)?,
    })
}

/// Monochromatic connected component of `v`.
pub fn component(cfg: &Configuration, v: usize) -> Vec<usize> {
    let mut seen = vec![false; cfg.len()];
    flood(cfg, v, &mut seen)
}

fn flood(cfg: &Configuration, v: usize, seen: &mut [bool]) -> Vec<usize> {
    let spin = cfg.is_plus(v);
    let mut stack = vec![v];
    let mut out = Vec::new();
    seen[v] = true;
    while let Some(u) = stack.pop() {
        out.push(u);
        for &w in cfg.lattice().neighbors(u) {
            let w = w as usize;
            if !seen[w] && cfg.is_plus(w) == spin {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    out
}

/// Labels every site with the index of its monochromatic component.
pub fn label_components(cfg: &Configuration) -> (Vec<u32>, Vec<usize>) {
    let mut labels = vec![u32::MAX; cfg.len()];
    let mut seen = vec![false; cfg.len()];
    let mut sizes = Vec::new();
    for v in 0..cfg.len() {
        if !seen[v] {
            let comp = flood(cfg, v, &mut seen);
            for &u in &comp {
                labels[u] = sizes.len() as u32;
            }
            sizes.push(comp.len());
        }
    }
    (labels, sizes)
}

fn is_unstable(cfg: &Configuration, v: usize) -> bool {
    let (m, l) = cfg.local_counts(v);
    m <= l
}

fn ensure_square_free(cfg: &Configuration) -> Result<usize> {
    let lat = cfg.lattice();
    match (lat.kind(), lat.boundary()) {
        (LatticeKind::SquareGrid, Boundary::Free) => Ok(lat.side().expect("square")),
        _ => Err(Error::InvalidLattice("path construction needs a free square grid".into())),
    }
}

/// Records single-site flips, each checked to have positive probability
/// under the zero-temperature kernel.
struct PathBuilder {
    cfg: Configuration,
    flips: Vec<usize>,
    budget: usize,
}

impl PathBuilder {
    fn flip(&mut self, v: usize) -> Result<()> {
        if zero_temp_flip_prob(&self.cfg, v, Field::None) <= 0.0 {
            return Err(Error::Defect(format!(
                "flip of site {v} has zero probability in\n{}",
                self.cfg.render()
            )));
        }
        if self.flips.len() >= self.budget {
            return Err(Error::Defect(format!("path exceeded {} flips", self.budget)));
        }
        self.cfg.flip(v);
        self.flips.push(v);
        Ok(())
    }

    /// Grows the component of `v` by flipping, in increasing site order,
    /// external boundary sites that are undecided or disagreeing.
    fn expand(&mut self, v: usize) -> Result<Vec<usize>> {
        loop {
            let comp = component(&self.cfg, v);
            let mut inside = vec![false; self.cfg.len()];
            for &u in &comp {
                inside[u] = true;
            }
            let candidate = comp
                .iter()
                .flat_map(|&u| self.cfg.lattice().neighbors(u).iter().map(|&w| w as usize))
                .filter(|&w| !inside[w] && is_unstable(&self.cfg, w))
                .min();
            match candidate {
                Some(w) => self.flip(w)?,
                None => return Ok(comp),
            }
        }
    }
}

/// Flips from the external boundary of the component of `v` until no
/// undecided or disagreeing site remains there. Intended for `v` on the
/// left border of a free square grid, where the result is a rectangle.
pub fn expand_component(cfg: &Configuration, v: usize) -> Result<Configuration> {
    let k = ensure_square_free(cfg)?;
    let mut b = PathBuilder {
        cfg: cfg.clone(),
        flips: Vec::new(),
        budget: 8 * k.pow(4),
    };
    b.expand(v)?;
    Ok(b.cfg)
}

/// Axis-aligned view of the grid; `transpose` swaps the roles of rows and
/// columns so vertical stripes are handled as horizontal ones.
#[derive(Clone, Copy)]
struct View {
    transpose: bool,
}

impl View {
    fn site(&self, lat: &Lattice, x: usize, y: usize) -> usize {
        if self.transpose {
            lat.site(y, x)
        } else {
            lat.site(x, y)
        }
    }

    fn coords(&self, lat: &Lattice, v: usize) -> (usize, usize) {
        let (i, j) = lat.coords(v);
        if self.transpose {
            (j, i)
        } else {
            (i, j)
        }
    }

    /// `(x_max, y_min, y_max)` if `comp` is `[1, x_max] x [y_min, y_max]`.
    fn rectangle(&self, lat: &Lattice, comp: &[usize]) -> Option<(usize, usize, usize)> {
        let (mut x0, mut x1, mut y0, mut y1) = (usize::MAX, 0, usize::MAX, 0);
        for &u in comp {
            let (x, y) = self.coords(lat, u);
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let area = (x1 + 1 - x0) * (y1 + 1 - y0);
        (x0 == 1 && area == comp.len()).then_some((x1, y0, y1))
    }
}

/// Single-flip path from `cfg` into the stable set.
///
/// The component of the bottom-left site of the active region is expanded
/// into a rectangle. A rectangle bounded away from the grid's far sides is
/// flipped site by site, which strictly enlarges the component below it.
/// A full-width rectangle at least two rows high is frozen forever and
/// becomes the floor of the next active region; one only a single row high
/// is flipped into its neighbours instead. Each step is validated against
/// the zero-temperature kernel; a violated postcondition or an exhausted
/// budget of `8 n^2` flips is reported as [`Error::Defect`].
pub fn absorb_flips(cfg: &Configuration) -> Result<(Vec<usize>, Configuration)> {
    let k = ensure_square_free(cfg)?;
    let lat = cfg.lattice().clone();
    let mut b = PathBuilder {
        cfg: cfg.clone(),
        flips: Vec::new(),
        budget: 8 * k.pow(4),
    };
    let plain = View { transpose: false };
    let trans = View { transpose: true };
    let mut view: Option<View> = None;
    // Row ranges (in view coordinates) of the frozen stripes below the
    // active region, bottom first.
    let mut floors: Vec<(usize, usize)> = Vec::new();

    loop {
        let base_y = floors.last().map_or(1, |&(_, end)| end + 1);
        let base = view.unwrap_or(plain).site(&lat, 1, base_y);
        let comp = b.expand(base)?;
        if is_stable(&b.cfg) {
            break;
        }
        let current = match view {
            Some(v) => v,
            None => {
                let (x_max, _, y_max) = plain
                    .rectangle(&lat, &comp)
                    .ok_or_else(|| not_rectangle(&b.cfg, base))?;
                // A full-height rectangle is a full-width one after transposing.
                if x_max < k && y_max == k {
                    trans
                } else {
                    plain
                }
            }
        };
        let (x_max, y_min, y_max) = current
            .rectangle(&lat, &comp)
            .ok_or_else(|| not_rectangle(&b.cfg, base))?;
        if y_min != base_y || (y_max == k && x_max == k) {
            return Err(Error::Defect(format!(
                "unexpected component after expansion at site {base}\n{}",
                b.cfg.render()
            )));
        }

        if x_max == k && y_max > y_min {
            // At least two rows across the full width: frozen from now on.
            view = Some(current);
            floors.push((y_min, y_max));
            continue;
        }

        if x_max == k {
            // A single full row ties at its first site and then peels off.
            for x in 1..=k {
                b.flip(current.site(&lat, x, y_min))?;
            }
        } else {
            // Flip the rectangle, sweeping from a corner whose two outward
            // neighbours already carry the opposite spin: the top-right one,
            // or the bottom-right one when the rectangle reaches the top and
            // rests on a frozen stripe.
            let ys: Vec<usize> = if y_max < k {
                (y_min..=y_max).rev().collect()
            } else if !floors.is_empty() {
                (y_min..=y_max).collect()
            } else {
                return Err(not_rectangle(&b.cfg, base));
            };
            for y in ys {
                for x in (1..=x_max).rev() {
                    b.flip(current.site(&lat, x, y))?;
                }
            }
        }
        // The flipped cells now match the stripe below, which rejoins the
        // active region.
        floors.pop();
        if floors.is_empty() {
            view = None;
        }
    }
    Ok((b.flips, b.cfg))
}

fn not_rectangle(cfg: &Configuration, base: usize) -> Error {
    Error::Defect(format!(
        "expanded component of site {base} is not an anchored rectangle\n{}",
        cfg.render()
    ))
}

/// The configurations visited by [`absorb_flips`], starting with `cfg` and
/// ending in a stable configuration.
pub fn absorb_path(cfg: &Configuration) -> Result<Vec<Configuration>> {
    let (flips, _) = absorb_flips(cfg)?;
    let mut path = Vec::with_capacity(flips.len() + 1);
    let mut cur = cfg.clone();
    path.push(cur.clone());
    for v in flips {
        cur.flip(v);
        path.push(cur.clone());
    }
    Ok(path)
}

/// Boundary counts used by the discrete Hopf identity
/// `Nu+ - Nu- + 2 Nd+ - 2 Nd- = 4 L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfCounts {
    pub nu_plus: usize,
    pub nu_minus: usize,
    pub nd_plus: usize,
    pub nd_minus: usize,
    /// Number of plus components.
    pub components: usize,
    pub shard_free: bool,
    /// Whether the identity's hypotheses hold, see [`hopf_counts`].
    pub assumptions_ok: bool,
}

impl HopfCounts {
    pub fn lhs(&self) -> i64 {
        self.nu_plus as i64 - self.nu_minus as i64 + 2 * self.nd_plus as i64 - 2 * self.nd_minus as i64
    }

    pub fn rhs(&self) -> i64 {
        4 * self.components as i64
    }

    /// `None` when the hypotheses fail and the identity is not asserted.
    pub fn identity_holds(&self) -> Option<bool> {
        self.assumptions_ok.then(|| self.lhs() == self.rhs())
    }
}

/// Counts on a square grid embedded in the plane with `-1` everywhere
/// outside it (the frozen frame, or the outside of a free grid).
///
/// The hypotheses checked are: every plus component has at least two
/// sites; every minus site is connected to the outside; no site touches
/// two distinct plus components; no plus site lies on the border of a
/// free grid; and the configuration is shard-free, meaning no site differs
/// from both its left and right neighbours or from both its upper and
/// lower neighbours.
#[allow(clippy::needless_range_loop)]
pub fn hopf_counts(cfg: &Configuration) -> HopfCounts {
    let lat = cfg.lattice();
    let square = lat.kind() == LatticeKind::SquareGrid;
    let w = lat.width();
    let h = lat.rows();
    // Spin with the outside treated as -1.
    let spin_at = |x: isize, y: isize| -> bool {
        x >= 1 && y >= 1 && x as usize <= w && y as usize <= h && cfg.is_plus(lat.site(x as usize, y as usize))
    };
    let counts = |v: usize| -> (u32, u32) {
        let (x, y) = lat.coords(v);
        let (x, y) = (x as isize, y as isize);
        let me = cfg.is_plus(v);
        let agree = [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]
            .iter()
            .filter(|&&(a, b)| spin_at(a, b) == me)
            .count() as u32;
        (agree, 4 - agree)
    };
    let class = classify_with(cfg, counts);

    let (labels, sizes) = label_components(cfg);
    let mut plus_components = 0;
    let mut ok = square;
    for (label, &size) in sizes.iter().enumerate() {
        let rep = labels.iter().position(|&l| l as usize == label).expect("label used");
        if cfg.is_plus(rep) {
            plus_components += 1;
            ok &= size >= 2;
        }
    }

    if square {
        // Minus sites reachable from the border.
        let mut outside = vec![false; cfg.len()];
        let mut stack = Vec::new();
        for v in 0..cfg.len() {
            let (x, y) = lat.coords(v);
            let border = x == 1 || y == 1 || x == w || y == h;
            if border {
                if cfg.is_plus(v) && lat.boundary() == Boundary::Free {
                    ok = false;
                }
                if !cfg.is_plus(v) && !outside[v] {
                    outside[v] = true;
                    stack.push(v);
                }
            }
        }
        while let Some(u) = stack.pop() {
            for &nb in lat.neighbors(u) {
                let nb = nb as usize;
                if !cfg.is_plus(nb) && !outside[nb] {
                    outside[nb] = true;
                    stack.push(nb);
                }
            }
        }
        ok &= (0..cfg.len()).all(|v| cfg.is_plus(v) || outside[v]);

        for v in 0..cfg.len() {
            let mut seen: Option<u32> = None;
            for &nb in lat.neighbors(v) {
                let nb = nb as usize;
                if cfg.is_plus(nb) && labels[nb] != labels[v] {
                    match seen {
                        Some(l) if l != labels[nb] => ok = false,
                        _ => seen = Some(labels[nb]),
                    }
                }
            }
        }
    }

    let shard_free = square
        && (0..cfg.len()).all(|v| {
            let (x, y) = lat.coords(v);
            let (x, y) = (x as isize, y as isize);
            let me = cfg.is_plus(v);
            let horiz = spin_at(x - 1, y) != me && spin_at(x + 1, y) != me;
            let vert = spin_at(x, y - 1) != me && spin_at(x, y + 1) != me;
            !horiz && !vert
        });

    HopfCounts {
        nu_plus: class.undecided_plus.len(),
        nu_minus: class.undecided_minus.len(),
        nd_plus: class.disagree_plus.len(),
        nd_minus: class.disagree_minus.len(),
        components: plus_components,
        shard_free,
        assumptions_ok: ok && shard_free,
    }
}

/// Sites of `cfg` whose spin differs from `other`, as a set.
pub fn difference(cfg: &Configuration, other: &Configuration) -> BTreeSet<usize> {
    (0..cfg.len()).filter(|&v| cfg.is_plus(v) != other.is_plus(v)).collect()
}
