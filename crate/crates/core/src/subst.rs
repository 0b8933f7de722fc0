//! Inflation engine for P2 half-tiles, plus the composite rule tables seen as
//! decorated kite/dart rules.
//!
//! A step multiplies every coordinate by φ and cuts each half-tile into
//! unit half-tiles, so coordinates stay integral and tile edges stay at the
//! P2 unit (short edge 1, long edge φ).

use std::fmt;

use rayon::prelude::*;

use crate::derive::{group_table, t12_table, Scheme};
use crate::golden::{direction_index, orient, GoldenInt, GoldenRat, LatticePoint, Placement};
use crate::tiles::{area_units, polygon, TileKind};

/// Coordinates beyond this bound refuse to inflate further.
const COORD_LIMIT: i64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("expected a {expected} patch, got {got}")]
    WrongSystem { expected: &'static str, got: System },
    #[error("coordinate overflow while inflating")]
    Overflow,
    #[error("tile {0} is not a P2 half-tile in canonical position")]
    BadTile(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    P2Half,
    P3Rhomb,
    Composite(Scheme),
    T12WithGaps,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::P2Half => f.write_str("p2"),
            System::P3Rhomb => f.write_str("p3"),
            System::Composite(s) => write!(f, "composite:{}", s.name()),
            System::T12WithGaps => f.write_str("t12"),
        }
    }
}

impl System {
    /// Grid refinement of coordinates (the T12 family needs elevenths).
    pub fn denom(self) -> i64 {
        match self {
            System::T12WithGaps => 11,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlacedTile {
    pub kind: TileKind,
    pub frame: Placement,
    pub level: u32,
    /// cut by the patch boundary; excluded from censuses and adjacency claims
    pub partial: bool,
    /// index of the generating tile in `Patch::source`
    pub parent: Option<u32>,
}

impl PlacedTile {
    pub fn new(kind: TileKind, frame: Placement, level: u32) -> Self {
        PlacedTile { kind, frame, level, partial: false, parent: None }
    }

    /// Canonical order: (kind, rot, refl, c0..c3), then the bookkeeping fields.
    pub fn sort_key(&self) -> (TileKind, u8, bool, [i64; 4], bool, Option<u32>) {
        (self.kind, self.frame.rot, self.frame.refl, self.frame.t.0, self.partial, self.parent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub system: System,
    pub level: u32,
    pub tiles: Vec<PlacedTile>,
    /// the P2 patch this one was derived from; grouping consults it
    pub source: Option<Box<Patch>>,
}

impl Patch {
    pub fn new(system: System, level: u32, tiles: Vec<PlacedTile>) -> Self {
        Patch { system, level, tiles, source: None }
    }

    pub fn denom(&self) -> i64 {
        self.system.denom()
    }

    /// Vertices of tile `i` in patch coordinates (on the `denom` grid).
    pub fn tile_vertices(&self, i: usize) -> Vec<LatticePoint> {
        tile_vertices(&self.tiles[i], self.denom())
    }

    /// Sort tiles canonically, remapping nothing: parent indices point into `source`.
    pub fn canonicalize(&mut self) {
        self.tiles.sort_by_key(|t| t.sort_key());
    }

    pub fn total_area(&self) -> GoldenRat {
        self.tiles.iter().map(|t| area_units(t.kind)).sum()
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.tiles.iter().filter(|t| t.kind == kind).count()
    }
}

/// Reference polygon moved into place on a grid with the given denominator.
pub fn tile_vertices(t: &PlacedTile, denom: i64) -> Vec<LatticePoint> {
    let p = polygon(t.kind);
    let k = denom / p.denom;
    p.vertices.iter().map(|v| t.frame.apply(v.scale(k))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    Kite,
    Dart,
    Sun,
    Star,
}

impl std::str::FromStr for Seed {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kite" | "single_kite" => Ok(Seed::Kite),
            "dart" | "single_dart" => Ok(Seed::Dart),
            "sun" => Ok(Seed::Sun),
            "star" => Ok(Seed::Star),
            _ => Err(format!("unknown seed `{s}`")),
        }
    }
}

/// A P2 half-tile as a triangle: apex (36° corner of a half-kite, reflex corner
/// of a half-dart), the other end of the symmetry axis, and the side corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Half {
    pub kite: bool,
    pub apex: LatticePoint,
    pub axis: LatticePoint,
    pub side: LatticePoint,
}

impl Half {
    pub fn from_tile(t: &PlacedTile) -> Option<Half> {
        let v = tile_vertices(t, 1);
        let (kite, l) = match t.kind {
            TileKind::HalfKiteL => (true, true),
            TileKind::HalfKiteR => (true, false),
            TileKind::HalfDartL => (false, true),
            TileKind::HalfDartR => (false, false),
            _ => return None,
        };
        let (axis, side) = if l { (v[1], v[2]) } else { (v[2], v[1]) };
        Some(Half { kite, apex: v[0], axis, side })
    }

    pub fn to_tile(self, level: u32) -> PlacedTile {
        let left = orient(self.apex, self.axis, self.side) > 0;
        let kind = match (self.kite, left) {
            (true, true) => TileKind::HalfKiteL,
            (true, false) => TileKind::HalfKiteR,
            (false, true) => TileKind::HalfDartL,
            (false, false) => TileKind::HalfDartR,
        };
        let e = if self.kite { 1 } else { 0 };
        let k = direction_index(self.axis - self.apex, e).expect("unit half-tile");
        PlacedTile::new(kind, Placement::new(k, false, self.apex), level)
    }

    fn scaled(self) -> Half {
        Half { kite: self.kite, apex: self.apex.mul_phi(), axis: self.axis.mul_phi(), side: self.side.mul_phi() }
    }

    /// Inflate by φ and cut into unit half-tiles.
    pub fn children(self) -> Vec<Half> {
        // x + (y−x)/φ on the inflated triangle
        fn ip(x: LatticePoint, y: LatticePoint) -> LatticePoint {
            x + (y - x).div_phi()
        }
        let h = self.scaled();
        let (a, w, s) = (h.apex, h.axis, h.side);
        if self.kite {
            let p = ip(a, w);
            let z = ip(s, a);
            vec![
                Half { kite: true, apex: s, axis: p, side: w },
                Half { kite: true, apex: s, axis: p, side: z },
                Half { kite: false, apex: z, axis: a, side: p },
            ]
        } else {
            let z = ip(w, s);
            vec![Half { kite: true, apex: w, axis: a, side: z }, Half { kite: false, apex: z, axis: s, side: a }]
        }
    }
}

fn halves_of(p: &Patch) -> Result<Vec<Half>, SubstError> {
    p.tiles.iter().enumerate().map(|(i, t)| Half::from_tile(t).ok_or(SubstError::BadTile(i))).collect()
}

pub(crate) fn from_halves(halves: Vec<Half>, level: u32) -> Patch {
    let mut tiles: Vec<PlacedTile> = halves.into_iter().map(|h| h.to_tile(level)).collect();
    tiles.sort_by_key(|t| t.sort_key());
    Patch::new(System::P2Half, level, tiles)
}

pub(crate) fn kite_halves(apex: LatticePoint, dir: i32) -> [Half; 2] {
    let axis = LatticePoint::phi_zeta(1, dir) + apex;
    [
        Half { kite: true, apex, axis, side: apex + LatticePoint::phi_zeta(1, dir + 1) },
        Half { kite: true, apex, axis, side: apex + LatticePoint::phi_zeta(1, dir - 1) },
    ]
}

/// Dart with its tip at `tip`, axis pointing from the tip towards ζ^dir.
pub(crate) fn dart_halves(tip: LatticePoint, dir: i32) -> [Half; 2] {
    let apex = tip + LatticePoint::zeta(dir);
    [
        Half { kite: false, apex, axis: tip, side: tip + LatticePoint::phi_zeta(1, dir + 1) },
        Half { kite: false, apex, axis: tip, side: tip + LatticePoint::phi_zeta(1, dir - 1) },
    ]
}

pub fn p2_seed(seed: Seed) -> Patch {
    let halves: Vec<Half> = match seed {
        Seed::Kite => kite_halves(LatticePoint::ZERO, 0).to_vec(),
        Seed::Dart => dart_halves(LatticePoint::zeta(0), 5).to_vec(),
        Seed::Sun => (0..5).flat_map(|i| kite_halves(LatticePoint::ZERO, 2 * i)).collect(),
        Seed::Star => (0..5).flat_map(|i| dart_halves(LatticePoint::ZERO, 2 * i)).collect(),
    };
    from_halves(halves, 0)
}

pub fn substitute_once(p: &Patch) -> Result<Patch, SubstError> {
    if p.system != System::P2Half {
        return Err(SubstError::WrongSystem { expected: "p2", got: p.system });
    }
    let halves = halves_of(p)?;
    let bound = halves.iter().flat_map(|h| [h.apex, h.axis, h.side]).map(|v| v.max_abs()).max().unwrap_or(0);
    if bound > COORD_LIMIT {
        return Err(SubstError::Overflow);
    }
    let kids: Vec<Half> = halves.par_iter().flat_map_iter(|h| h.children()).collect();
    Ok(from_halves(kids, p.level + 1))
}

pub fn inflate(seed: &Patch, n: u32) -> Result<Patch, SubstError> {
    let mut p = seed.clone();
    for _ in 0..n {
        p = substitute_once(&p)?;
    }
    Ok(p)
}

/// (half-kites, half-darts)
pub fn p2_counts(p: &Patch) -> (usize, usize) {
    let k = p.tiles.iter().filter(|t| matches!(t.kind, TileKind::HalfKiteL | TileKind::HalfKiteR)).count();
    let d = p.tiles.iter().filter(|t| matches!(t.kind, TileKind::HalfDartL | TileKind::HalfDartR)).count();
    (k, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleScheme {
    T8T9,
    T12,
}

/// One decorated inflation rule. `children` are unit P2 pieces inside the parent
/// inflated by φ (P2 units); `decorations` are the composite tiles carried by
/// those children, in rhomb units (P2 lengths × φ⁴). A child half-dart carries half
/// of its dart's decorations, hence `half_weight`.
#[derive(Debug, Clone)]
pub struct SubstRule {
    pub parent: TileKind,
    pub children: Vec<(TileKind, Placement)>,
    pub decorations: Vec<Decoration>,
    /// area of the inflated parent left uncovered by the weighted decorations
    pub gap_area: GoldenRat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoration {
    pub kind: TileKind,
    pub placement: Placement,
    pub half_weight: bool,
}

impl SubstRule {
    pub fn child_area(&self) -> GoldenRat {
        self.children.iter().map(|(k, _)| area_units(*k)).sum()
    }

    pub fn decoration_area(&self) -> GoldenRat {
        self.decorations
            .iter()
            .map(|d| if d.half_weight { area_units(d.kind).div_int(2) } else { area_units(d.kind) })
            .sum()
    }
}

/// Frame of a whole kite (apex, axis direction) or dart (reflex corner, tip direction).
pub(crate) fn whole_frame(h: &Half) -> Placement {
    let e = if h.kite { 1 } else { 0 };
    Placement::new(direction_index(h.axis - h.apex, e).expect("unit half-tile"), false, h.apex)
}

pub fn composite_rules(scheme: RuleScheme) -> Vec<SubstRule> {
    let phi4 = GoldenInt::phi_pow(4);
    let mut out = Vec::new();
    for parent in [TileKind::Kite, TileKind::Dart] {
        let halves = if parent == TileKind::Kite {
            kite_halves(LatticePoint::ZERO, 0)
        } else {
            let d = dart_halves(LatticePoint::zeta(0), 5);
            debug_assert_eq!(d[0].apex, LatticePoint::ZERO);
            d
        };
        let kids: Vec<Half> = halves.iter().flat_map(|h| h.children()).collect();
        let mut children = Vec::new();
        let mut decorations = Vec::new();
        let mut used = vec![false; kids.len()];
        for i in 0..kids.len() {
            if used[i] {
                continue;
            }
            let h = kids[i];
            let mate = (i + 1..kids.len())
                .find(|&j| !used[j] && kids[j].kite == h.kite && kids[j].apex == h.apex && kids[j].axis == h.axis);
            let frame = whole_frame(&h);
            let whole = if h.kite { TileKind::Kite } else { TileKind::Dart };
            let half_weight = match mate {
                Some(j) => {
                    used[j] = true;
                    children.push((whole, frame));
                    false
                }
                None => {
                    let t = h.to_tile(0);
                    children.push((t.kind, t.frame));
                    true
                }
            };
            used[i] = true;
            let members: Vec<(TileKind, Placement)> = match scheme {
                RuleScheme::T8T9 => group_table(Scheme::T8T9, whole).to_vec(),
                RuleScheme::T12 => vec![t12_table(whole)],
            };
            for (kind, pl) in members {
                decorations.push(Decoration { kind, placement: frame.scaled(phi4).compose(&pl), half_weight });
            }
        }
        let mut rule = SubstRule { parent, children, decorations, gap_area: GoldenRat::zero() };
        let target = area_units(parent).mul_golden(GoldenInt::phi_pow(10));
        rule.gap_area = target - rule.decoration_area();
        out.push(rule);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(p2_seed(Seed::Kite).tiles.len(), 2);
        assert_eq!(p2_seed(Seed::Dart).tiles.len(), 2);
        let sun = p2_seed(Seed::Sun);
        assert_eq!(sun.tiles.len(), 10);
        assert_eq!(sun.total_area(), area_units(TileKind::HalfKiteL).mul_int(10));
        assert_eq!(p2_seed(Seed::Star).tiles.len(), 10);
    }

    #[test]
    fn half_round_trip() {
        for t in inflate(&p2_seed(Seed::Sun), 2).unwrap().tiles {
            assert_eq!(Half::from_tile(&t).unwrap().to_tile(t.level), t);
        }
    }

    #[test]
    fn single_steps() {
        let hk = Patch::new(System::P2Half, 0, vec![p2_seed(Seed::Kite).tiles[0]]);
        let c = substitute_once(&hk).unwrap();
        assert_eq!(p2_counts(&c), (2, 1));
        let hd = Patch::new(System::P2Half, 0, vec![p2_seed(Seed::Dart).tiles[0]]);
        assert_eq!(p2_counts(&substitute_once(&hd).unwrap()), (1, 1));
        // area(HK)·φ² = 2·area(HK) + area(HD)
        let hk_a = area_units(TileKind::HalfKiteL);
        let hd_a = area_units(TileKind::HalfDartL);
        assert_eq!(hk_a.mul_golden(GoldenInt::phi_pow(2)), hk_a.mul_int(2) + hd_a);
        assert_eq!(hd_a.mul_golden(GoldenInt::phi_pow(2)), hk_a + hd_a);
        assert_eq!(substitute_once(&p2_seed(Seed::Sun)).unwrap().tiles.len(), 30);
    }

    #[test]
    fn counts_follow_fibonacci() {
        let mut p = Patch::new(System::P2Half, 0, vec![p2_seed(Seed::Kite).tiles[0]]);
        let mut seen = Vec::new();
        for _ in 0..3 {
            p = substitute_once(&p).unwrap();
            seen.push(p2_counts(&p));
        }
        assert_eq!(seen, vec![(2, 1), (5, 3), (13, 8)]);
    }

    #[test]
    fn wrong_system_rejected() {
        let p = Patch::new(System::P3Rhomb, 0, vec![]);
        assert!(substitute_once(&p).is_err());
    }

    #[test]
    fn rules_balance() {
        for scheme in [RuleScheme::T8T9, RuleScheme::T12] {
            for r in composite_rules(scheme) {
                let inflated = area_units(r.parent).mul_golden(GoldenInt::phi_pow(2));
                assert_eq!(r.child_area(), inflated, "{:?}", r.parent);
                if scheme == RuleScheme::T8T9 {
                    assert_eq!(r.gap_area, GoldenRat::zero());
                    assert!(r.decorations.iter().any(|d| d.kind == TileKind::T8));
                    assert!(r.decorations.iter().any(|d| d.kind == TileKind::T9));
                } else {
                    assert!(r.gap_area.signum() > 0);
                }
            }
        }
    }
}
