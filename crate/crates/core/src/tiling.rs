//! Void, monomer and dimer tilings of a finite interval.
//!
//! Sites are numbered `1..=L`. A tiling is an ordered list of tiles that abut
//! exactly and cover the interval. Every tile carries a fixed particle pattern,
//! so a tiling determines an occupation configuration. Root tilings contain
//! only voids and monomers in the interior, plus optional boundary tiles at the
//! two edges; all other tilings arise from roots by substituting adjacent
//! monomer pairs with dimers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

/// Largest interval that fits a packed configuration in one machine word.
pub const MAX_PACKED_LEN: usize = 63;

/// Largest interval for which full-space operators are materialized.
pub const MAX_DENSE_LEN: usize = 14;

/// Largest root tiling. Roots longer than [`MAX_PACKED_LEN`] are only used
/// symbolically, by the correlation recursions.
pub const MAX_ROOT_LEN: usize = 1 << 24;

/// The tile catalog.
///
/// The declaration order is the canonical order used when sorting tilings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DominoKind {
    /// One empty site.
    Void,
    /// Three sites, particle on the first: `100`.
    Monomer,
    /// Six sites, particles on the second and third: `011000`.
    Dimer,
    /// Left boundary dimer, five sites: `11000`.
    LeftDimer,
    /// Right boundary dimer, three sites: `011`.
    RightDimer,
    /// Right boundary monomer of length one: `1`.
    Right1Monomer,
    /// Right boundary monomer of length two: `10`.
    Right2Monomer,
    /// Monomer merged with a right 1-monomer: `0110`.
    Trunc1Dimer,
    /// Monomer merged with a right 2-monomer: `01100`.
    Trunc2Dimer,
}

impl DominoKind {
    /// Every tile kind in canonical order.
    pub const ALL: [DominoKind; 9] = [
        DominoKind::Void,
        DominoKind::Monomer,
        DominoKind::Dimer,
        DominoKind::LeftDimer,
        DominoKind::RightDimer,
        DominoKind::Right1Monomer,
        DominoKind::Right2Monomer,
        DominoKind::Trunc1Dimer,
        DominoKind::Trunc2Dimer,
    ];

    /// Number of sites covered.
    pub fn length(self) -> usize {
        match self {
            DominoKind::Void | DominoKind::Right1Monomer => 1,
            DominoKind::Right2Monomer => 2,
            DominoKind::Monomer | DominoKind::RightDimer => 3,
            DominoKind::Trunc1Dimer => 4,
            DominoKind::LeftDimer | DominoKind::Trunc2Dimer => 5,
            DominoKind::Dimer => 6,
        }
    }

    /// Occupied sites as 0-based offsets from the tile start, ascending.
    pub fn particle_offsets(self) -> &'static [usize] {
        match self {
            DominoKind::Void => &[],
            DominoKind::Monomer | DominoKind::Right1Monomer | DominoKind::Right2Monomer => &[0],
            DominoKind::LeftDimer => &[0, 1],
            DominoKind::Dimer
            | DominoKind::RightDimer
            | DominoKind::Trunc1Dimer
            | DominoKind::Trunc2Dimer => &[1, 2],
        }
    }

    /// Particle pattern packed with offset 0 in the least significant bit.
    pub fn pattern(self) -> u64 {
        self.particle_offsets().iter().fold(0, |acc, &o| acc | (1 << o))
    }

    /// Whether the tile contributes one factor λ to a state amplitude.
    pub fn dimer_weighted(self) -> bool {
        matches!(
            self,
            DominoKind::Dimer
                | DominoKind::LeftDimer
                | DominoKind::RightDimer
                | DominoKind::Trunc1Dimer
                | DominoKind::Trunc2Dimer
        )
    }

    /// Whether the tile may only appear as the last tile of an interval.
    pub fn is_right_edge_only(self) -> bool {
        matches!(
            self,
            DominoKind::RightDimer
                | DominoKind::Right1Monomer
                | DominoKind::Right2Monomer
                | DominoKind::Trunc1Dimer
                | DominoKind::Trunc2Dimer
        )
    }

    /// Number of particles on the tile.
    pub fn particles(self) -> usize {
        self.particle_offsets().len()
    }
}

/// Boundary tile at the left edge of a root tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeftBoundary {
    Empty,
    LeftDimer,
}

impl LeftBoundary {
    pub const ALL: [LeftBoundary; 2] = [LeftBoundary::Empty, LeftBoundary::LeftDimer];

    /// The tile placed at site 1, if any.
    pub fn kind(self) -> Option<DominoKind> {
        match self {
            LeftBoundary::Empty => None,
            LeftBoundary::LeftDimer => Some(DominoKind::LeftDimer),
        }
    }

    /// Sites covered by the boundary tile.
    pub fn length(self) -> usize {
        self.kind().map_or(0, DominoKind::length)
    }
}

/// Boundary tile at the right edge of a root tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RightBoundary {
    Empty,
    RightDimer,
    Right1Monomer,
    Right2Monomer,
}

impl RightBoundary {
    pub const ALL: [RightBoundary; 4] = [
        RightBoundary::Empty,
        RightBoundary::RightDimer,
        RightBoundary::Right1Monomer,
        RightBoundary::Right2Monomer,
    ];

    /// The tile ending at site `L`, if any.
    pub fn kind(self) -> Option<DominoKind> {
        match self {
            RightBoundary::Empty => None,
            RightBoundary::RightDimer => Some(DominoKind::RightDimer),
            RightBoundary::Right1Monomer => Some(DominoKind::Right1Monomer),
            RightBoundary::Right2Monomer => Some(DominoKind::Right2Monomer),
        }
    }

    /// Sites covered by the boundary tile.
    pub fn length(self) -> usize {
        self.kind().map_or(0, DominoKind::length)
    }
}

/// Occupation configuration of an interval, packed with site 1 in bit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    len: usize,
    bits: u64,
}

impl Configuration {
    /// Builds a configuration; bits above `len` must be clear.
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > MAX_PACKED_LEN {
            return Err(Error::DimensionOverflow(format!(
                "configuration length {len} exceeds {MAX_PACKED_LEN}"
            )));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "bits {bits:#b} do not fit in {len} sites"
            )));
        }
        Ok(Configuration { len, bits })
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True for the configuration of the empty interval.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed occupation bits.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Occupation of site `x` (1-based).
    pub fn occupied(&self, x: usize) -> bool {
        assert!((1..=self.len).contains(&x), "site {x} outside [1, {}]", self.len);
        self.bits >> (x - 1) & 1 == 1
    }

    /// Total particle number.
    pub fn particle_number(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Restriction to the sites `a..=b` (1-based, inclusive).
    pub fn restrict(&self, a: usize, b: usize) -> Result<Configuration> {
        if a < 1 || b > self.len || a > b {
            return Err(Error::InvalidArgument(format!(
                "sub-interval [{a}, {b}] not inside [1, {}]",
                self.len
            )));
        }
        let len = b - a + 1;
        Configuration::new(len, (self.bits >> (a - 1)) & low_mask(len))
    }
}

impl fmt::Display for Configuration {
    /// Writes one character per site, site 1 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.len {
            f.write_str(if self.bits >> x & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, site 1 first.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if i < 64 => bits |= 1 << i,
                '1' => {}
                _ => return Err(Error::Parse(format!("invalid occupation character {c:?}"))),
            }
        }
        Configuration::new(s.chars().count(), bits)
    }
}

/// Mask with the lowest `len` bits set.
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A tile placed at a 1-based start site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub kind: DominoKind,
    pub start: usize,
}

impl Tile {
    /// Last site covered by the tile.
    pub fn end(&self) -> usize {
        self.start + self.kind.length() - 1
    }
}

/// A root tiling: optional boundary tiles around an interior of voids and
/// monomers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootTiling {
    left: LeftBoundary,
    interior: Vec<DominoKind>,
    right: RightBoundary,
}

impl RootTiling {
    /// Builds a root; the interior may contain only voids and monomers.
    pub fn new(left: LeftBoundary, interior: Vec<DominoKind>, right: RightBoundary) -> Result<Self> {
        if let Some(bad) = interior
            .iter()
            .find(|k| !matches!(k, DominoKind::Void | DominoKind::Monomer))
        {
            return Err(Error::InvalidArgument(format!(
                "root interior may hold only voids and monomers, found {bad:?}"
            )));
        }
        let root = RootTiling { left, interior, right };
        if root.interval_length() == 0 {
            return Err(Error::InvalidArgument("root tiling covers no sites".into()));
        }
        if root.interval_length() > MAX_ROOT_LEN {
            return Err(Error::DimensionOverflow(format!(
                "root of length {} exceeds {MAX_ROOT_LEN}",
                root.interval_length()
            )));
        }
        Ok(root)
    }

    /// `n` monomers followed by the right boundary tile that fills `L = 3n + rest`.
    ///
    /// The remainder is covered by a right 1- or 2-monomer, giving the densest
    /// root of the interval (the squeezed Tao–Thouless root).
    pub fn pure_monomer(l: usize) -> Result<Self> {
        let right = match l % 3 {
            0 => RightBoundary::Empty,
            1 => RightBoundary::Right1Monomer,
            _ => RightBoundary::Right2Monomer,
        };
        RootTiling::new(LeftBoundary::Empty, vec![DominoKind::Monomer; l / 3], right)
    }

    /// Left boundary tile.
    pub fn left(&self) -> LeftBoundary {
        self.left
    }

    /// Right boundary tile.
    pub fn right(&self) -> RightBoundary {
        self.right
    }

    /// Interior tiles (voids and monomers) in order.
    pub fn interior(&self) -> &[DominoKind] {
        &self.interior
    }

    /// Number of sites covered.
    pub fn interval_length(&self) -> usize {
        self.left.length()
            + self.interior.iter().map(|k| k.length()).sum::<usize>()
            + self.right.length()
    }

    /// All tiles with their start sites, left to right.
    pub fn tiles(&self) -> Vec<Tile> {
        let mut tiles = Vec::with_capacity(self.interior.len() + 2);
        let mut start = 1;
        let kinds = self
            .left
            .kind()
            .into_iter()
            .chain(self.interior.iter().copied())
            .chain(self.right.kind());
        for kind in kinds {
            tiles.push(Tile { kind, start });
            start += kind.length();
        }
        tiles
    }

    /// Sites holding a void, ascending.
    pub fn voids(&self) -> Vec<usize> {
        self.tiles()
            .into_iter()
            .filter(|t| t.kind == DominoKind::Void)
            .map(|t| t.start)
            .collect()
    }

    /// Start sites of interior monomers, ascending.
    pub fn monomer_starts(&self) -> Vec<usize> {
        self.tiles()
            .into_iter()
            .filter(|t| t.kind == DominoKind::Monomer)
            .map(|t| t.start)
            .collect()
    }

    /// Number of particles in every configuration generated by the root.
    pub fn particle_number(&self) -> usize {
        self.tiles().iter().map(|t| t.kind.particles()).sum()
    }

    /// Number of boundary dimers (each contributes a fixed factor λ).
    pub fn boundary_dimers(&self) -> usize {
        usize::from(self.left == LeftBoundary::LeftDimer)
            + usize::from(self.right == RightBoundary::RightDimer)
    }

    /// The root viewed as a tiling.
    pub fn as_tiling(&self) -> VmdTiling {
        VmdTiling { tiles: self.tiles() }
    }

    fn sort_key(&self) -> (LeftBoundary, &[DominoKind], RightBoundary) {
        (self.left, &self.interior, self.right)
    }
}

impl PartialOrd for RootTiling {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootTiling {
    /// Lexicographic on (left boundary, interior kinds, right boundary).
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

fn token(kind: DominoKind) -> &'static str {
    match kind {
        DominoKind::Void => "v",
        DominoKind::Monomer => "m",
        DominoKind::LeftDimer => "dl",
        DominoKind::RightDimer => "dr",
        DominoKind::Right1Monomer => "m1",
        DominoKind::Right2Monomer => "m2",
        DominoKind::Dimer => "d",
        DominoKind::Trunc1Dimer => "t1",
        DominoKind::Trunc2Dimer => "t2",
    }
}

impl fmt::Display for RootTiling {
    /// Whitespace-separated tokens `v m dl dr m1 m2`, e.g. `dl m m v m m2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<&str> = self.tiles().iter().map(|t| token(t.kind)).collect();
        f.write_str(&tokens.join(" "))
    }
}

impl FromStr for RootTiling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let mut left = LeftBoundary::Empty;
        let mut right = RightBoundary::Empty;
        let mut interior = Vec::new();
        let last = tokens.len().saturating_sub(1);
        for (i, tok) in tokens.iter().enumerate() {
            match *tok {
                "v" => interior.push(DominoKind::Void),
                "m" => interior.push(DominoKind::Monomer),
                "dl" if i == 0 => left = LeftBoundary::LeftDimer,
                "dr" if i == last => right = RightBoundary::RightDimer,
                "m1" if i == last => right = RightBoundary::Right1Monomer,
                "m2" if i == last => right = RightBoundary::Right2Monomer,
                "dl" | "dr" | "m1" | "m2" => {
                    return Err(Error::Parse(format!(
                        "boundary token {tok:?} at position {i} is not at its edge"
                    )))
                }
                other => return Err(Error::Parse(format!("unknown root token {other:?}"))),
            }
        }
        if tokens.is_empty() {
            return Err(Error::Parse("empty root tiling".into()));
        }
        RootTiling::new(left, interior, right)
    }
}

/// A tiling obtained from a root by dimer substitutions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VmdTiling {
    tiles: Vec<Tile>,
}

impl VmdTiling {
    /// Builds a tiling from kinds placed left to right starting at site 1.
    pub fn from_kinds(kinds: &[DominoKind]) -> Result<Self> {
        let mut tiles = Vec::with_capacity(kinds.len());
        let mut start = 1;
        for (i, &kind) in kinds.iter().enumerate() {
            if kind == DominoKind::LeftDimer && i != 0 {
                return Err(Error::InvalidArgument("left dimer away from the left edge".into()));
            }
            if kind.is_right_edge_only() && i + 1 != kinds.len() {
                return Err(Error::InvalidArgument(format!(
                    "{kind:?} away from the right edge"
                )));
            }
            tiles.push(Tile { kind, start });
            start += kind.length();
        }
        if start - 1 > MAX_PACKED_LEN {
            return Err(Error::DimensionOverflow(format!("tiling of length {}", start - 1)));
        }
        Ok(VmdTiling { tiles })
    }

    /// Tiles left to right.
    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// Tile kinds left to right.
    pub fn kinds(&self) -> Vec<DominoKind> {
        self.tiles.iter().map(|t| t.kind).collect()
    }

    /// Number of sites covered.
    pub fn interval_length(&self) -> usize {
        self.tiles.last().map_or(0, Tile::end)
    }

    /// Number of λ-weighted tiles, i.e. the exponent of λ in the amplitude.
    pub fn dimer_count(&self) -> usize {
        self.tiles.iter().filter(|t| t.kind.dimer_weighted()).count()
    }
}

/// Counts `r_n` of void/monomer covers of `n` sites: 1, 1, 1, 2, 3, 4, 6, …
fn void_monomer_counts(n: usize) -> Vec<BigUint> {
    let mut r: Vec<BigUint> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let value = if m < 3 {
            BigUint::from(1u32)
        } else {
            &r[m - 1] + &r[m - 3]
        };
        r.push(value);
    }
    r
}

/// Number of root tilings of `[1, L]`, in exact integer arithmetic.
///
/// Sums the void/monomer counts of the interior over all eight boundary
/// pairs whose tiles fit into the interval.
pub fn count_roots(l: usize) -> BigUint {
    if l == 0 {
        return BigUint::from(0u32);
    }
    let r = void_monomer_counts(l);
    let mut total = BigUint::from(0u32);
    for left in LeftBoundary::ALL {
        for right in RightBoundary::ALL {
            let b = left.length() + right.length();
            if b <= l {
                total += &r[l - b];
            }
        }
    }
    total
}

/// Every root tiling of `[1, L]` in canonical order.
///
/// The order is lexicographic on (left boundary, interior kinds with
/// `Void < Monomer`, right boundary). `L = 0` yields an empty list.
pub fn enumerate_roots(l: usize) -> Vec<RootTiling> {
    let mut roots = Vec::new();
    if l == 0 || l > MAX_PACKED_LEN {
        return roots;
    }
    for left in LeftBoundary::ALL {
        for right in RightBoundary::ALL {
            let b = left.length() + right.length();
            if b > l {
                continue;
            }
            let mut interiors = Vec::new();
            void_monomer_covers(l - b, &mut Vec::new(), &mut interiors);
            for interior in interiors {
                roots.push(RootTiling { left, interior, right });
            }
        }
    }
    roots.sort();
    roots
}

fn void_monomer_covers(n: usize, prefix: &mut Vec<DominoKind>, out: &mut Vec<Vec<DominoKind>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for kind in [DominoKind::Void, DominoKind::Monomer] {
        if kind.length() <= n {
            prefix.push(kind);
            void_monomer_covers(n - kind.length(), prefix, out);
            prefix.pop();
        }
    }
}

/// The tile replacing a monomer followed by `next`, if the substitution rules allow it.
fn merged(next: DominoKind) -> Option<DominoKind> {
    match next {
        DominoKind::Monomer => Some(DominoKind::Dimer),
        DominoKind::Right1Monomer => Some(DominoKind::Trunc1Dimer),
        DominoKind::Right2Monomer => Some(DominoKind::Trunc2Dimer),
        _ => None,
    }
}

/// All tilings generated by a root through disjoint monomer-pair substitutions.
///
/// The root itself comes first; the remaining tilings follow a depth-first
/// order that keeps monomers before substituting them.
///
/// # Panics
///
/// If the root is longer than [`MAX_PACKED_LEN`] sites.
pub fn expand_root(root: &RootTiling) -> Vec<VmdTiling> {
    let kinds: Vec<DominoKind> = root.tiles().iter().map(|t| t.kind).collect();
    let mut out = Vec::new();
    expand_from(&kinds, 0, &mut Vec::new(), &mut out);
    out
}

fn expand_from(
    kinds: &[DominoKind],
    i: usize,
    prefix: &mut Vec<DominoKind>,
    out: &mut Vec<VmdTiling>,
) {
    if i == kinds.len() {
        out.push(VmdTiling::from_kinds(prefix).expect("expansion of a valid root"));
        return;
    }
    prefix.push(kinds[i]);
    expand_from(kinds, i + 1, prefix, out);
    prefix.pop();
    if kinds[i] == DominoKind::Monomer && i + 1 < kinds.len() {
        if let Some(m) = merged(kinds[i + 1]) {
            prefix.push(m);
            expand_from(kinds, i + 2, prefix, out);
            prefix.pop();
        }
    }
}

/// Occupation configuration carried by a tiling.
pub fn particle_content(t: &VmdTiling) -> Configuration {
    let bits = t
        .tiles
        .iter()
        .fold(0u64, |acc, tile| acc | tile.kind.pattern() << (tile.start - 1));
    Configuration::new(t.interval_length(), bits).expect("tiling length checked at construction")
}

/// Tile kinds allowed to start at 0-based offset `pos` of an interval of `len` sites.
fn admissible(kind: DominoKind, pos: usize, len: usize) -> bool {
    let end = pos + kind.length();
    if end > len {
        return false;
    }
    match kind {
        DominoKind::LeftDimer => pos == 0,
        k if k.is_right_edge_only() => end == len,
        _ => true,
    }
}

/// The tiling whose particle content is `c`, or `None` if no tiling has it.
///
/// A right-to-left pass marks the offsets from which the remaining bits can
/// be tiled; a left-to-right pass then follows the admissible tiles. By the
/// injectivity of the particle-content map at most one tile is viable at
/// every step.
pub fn parse_configuration(c: &Configuration) -> Option<VmdTiling> {
    let len = c.len();
    if len == 0 {
        return None;
    }
    let fits = |kind: DominoKind, pos: usize| {
        admissible(kind, pos, len)
            && (c.bits() >> pos) & low_mask(kind.length()) == kind.pattern()
    };
    let mut viable = vec![false; len + 1];
    viable[len] = true;
    for pos in (0..len).rev() {
        viable[pos] = DominoKind::ALL
            .iter()
            .any(|&k| fits(k, pos) && viable[pos + k.length()]);
    }
    if !viable[0] {
        return None;
    }
    let mut kinds = Vec::new();
    let mut pos = 0;
    while pos < len {
        let mut choices = DominoKind::ALL
            .iter()
            .copied()
            .filter(|&k| fits(k, pos) && viable[pos + k.length()]);
        let kind = choices.next()?;
        debug_assert!(choices.next().is_none(), "two parses of {c}");
        kinds.push(kind);
        pos += kind.length();
    }
    VmdTiling::from_kinds(&kinds).ok()
}

/// Whether `bits` on `len` sites is the particle content of some tiling.
pub fn is_tiling_configuration(len: usize, bits: u64) -> bool {
    Configuration::new(len, bits)
        .map(|c| parse_configuration(&c).is_some())
        .unwrap_or(false)
}

/// The unique root from which a tiling is generated.
///
/// Dimers split into two monomers and truncated dimers into a monomer plus
/// the matching right monomer; boundary dimers stay in place.
pub fn root_of(t: &VmdTiling) -> RootTiling {
    let mut left = LeftBoundary::Empty;
    let mut right = RightBoundary::Empty;
    let mut interior = Vec::new();
    for tile in &t.tiles {
        match tile.kind {
            DominoKind::Void | DominoKind::Monomer => interior.push(tile.kind),
            DominoKind::Dimer => interior.extend([DominoKind::Monomer, DominoKind::Monomer]),
            DominoKind::LeftDimer => left = LeftBoundary::LeftDimer,
            DominoKind::RightDimer => right = RightBoundary::RightDimer,
            DominoKind::Right1Monomer => right = RightBoundary::Right1Monomer,
            DominoKind::Right2Monomer => right = RightBoundary::Right2Monomer,
            DominoKind::Trunc1Dimer => {
                interior.push(DominoKind::Monomer);
                right = RightBoundary::Right1Monomer;
            }
            DominoKind::Trunc2Dimer => {
                interior.push(DominoKind::Monomer);
                right = RightBoundary::Right2Monomer;
            }
        }
    }
    RootTiling { left, interior, right }
}

/// Smallest sub-interval for which induced tilings are defined.
pub const MIN_INDUCED_LEN: usize = 5;

/// The tiling induced on the sites `a..=b` (1-based) by restricting particle content.
pub fn induced_tiling(t: &VmdTiling, a: usize, b: usize) -> Result<VmdTiling> {
    if b < a || b - a + 1 < MIN_INDUCED_LEN {
        return Err(Error::InvalidArgument(format!(
            "induced tilings need at least {MIN_INDUCED_LEN} sites, got [{a}, {b}]"
        )));
    }
    let restricted = particle_content(t).restrict(a, b)?;
    parse_configuration(&restricted).ok_or_else(|| {
        Error::InvalidArgument(format!("restriction {restricted} is not a tiling configuration"))
    })
}

/// Maximal particle number over the roots of `[1, L]` with a witness root.
///
/// Interior particles are maximized by packing monomers, so the maximum is
/// taken over the eight boundary pairs. The witness places the interior
/// monomers before any leftover voids and is the first maximizer in
/// canonical boundary order.
pub fn max_particle_number(l: usize) -> Result<(usize, RootTiling)> {
    if l == 0 {
        return Err(Error::InvalidArgument("interval must have at least one site".into()));
    }
    let mut best: Option<(usize, RootTiling)> = None;
    for left in LeftBoundary::ALL {
        for right in RightBoundary::ALL {
            let b = left.length() + right.length();
            if b > l {
                continue;
            }
            let m = (l - b) / 3;
            let mut interior = vec![DominoKind::Monomer; m];
            interior.extend(std::iter::repeat_n(DominoKind::Void, l - b - 3 * m));
            let root = RootTiling::new(left, interior, right)?;
            let n = root.particle_number();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, root));
            }
        }
    }
    Ok(best.expect("the all-void root always fits"))
}

/// All packed configurations of `[1, L]` that carry a tiling, ascending.
pub fn tiling_configurations(l: usize) -> Result<Vec<u64>> {
    if l > MAX_DENSE_LEN + 6 {
        return Err(Error::DimensionOverflow(format!("2^{l} configurations")));
    }
    Ok((0..1u64 << l).filter(|&b| is_tiling_configuration(l, b)).collect())
}

/// Diagonal 0/1 projector onto configurations that carry a tiling.
pub fn tiling_projector(l: usize) -> Result<SparseOperator> {
    if !(MIN_INDUCED_LEN..=MAX_DENSE_LEN).contains(&l) {
        return Err(Error::DimensionOverflow(format!(
            "tiling projector supports {MIN_INDUCED_LEN} <= L <= {MAX_DENSE_LEN}, got {l}"
        )));
    }
    let triplets = tiling_configurations(l)?
        .into_iter()
        .map(|b| (b as usize, b as usize, 1.0))
        .collect();
    SparseOperator::from_triplets(1 << l, triplets)
}
