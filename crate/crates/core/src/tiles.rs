//! Prototile catalog: exact reference polygons, decorations, rhomb fillings and
//! Robinson-triangle decompositions for every tile kind.
//!
//! The shapes ship as `data/catalog.json` (lattice integers only). Every kind
//! is normalized so that its reference polygon is counterclockwise; the T12
//! family and the two small gaps live on a grid eleven times finer than the
//! rhomb lattice and carry `denom = 11`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::golden::{
    area2, direction_index, on_segment, orient, simplify, triangulate, GoldenInt, GoldenRat, LatticePoint, Placement,
};

pub const CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TileError {
    #[error("unknown tile kind `{0}`")]
    UnknownKind(String),
    #[error("{op} is not defined for {kind}")]
    Unsupported { op: &'static str, kind: TileKind },
}

macro_rules! kinds {
    ($($k:ident),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum TileKind { $($k),* }

        impl TileKind {
            pub const ALL: &'static [TileKind] = &[$(TileKind::$k),*];

            pub fn name(self) -> &'static str {
                match self { $(TileKind::$k => stringify!($k)),* }
            }
        }

        impl FromStr for TileKind {
            type Err = TileError;
            fn from_str(s: &str) -> Result<Self, TileError> {
                match s {
                    $(stringify!($k) => Ok(TileKind::$k),)*
                    _ => Err(TileError::UnknownKind(s.to_string())),
                }
            }
        }
    };
}

kinds!(
    HalfKiteL,
    HalfKiteR,
    HalfDartL,
    HalfDartR,
    Kite,
    Dart,
    ThinRhomb,
    ThickRhomb,
    HalfThinL,
    HalfThinR,
    HalfThickL,
    HalfThickR,
    T1,
    T2,
    T3,
    Snake,
    Dog,
    T8,
    T9,
    T10,
    T11,
    T12,
    T13,
    T14,
    GapTriangle,
    GapQuad,
    RotorA,
    RotorB,
    RotorC,
);

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TileKind {
    pub fn is_p2_half(self) -> bool {
        matches!(self, TileKind::HalfKiteL | TileKind::HalfKiteR | TileKind::HalfDartL | TileKind::HalfDartR)
    }

    pub fn is_p3(self) -> bool {
        use TileKind::*;
        matches!(self, ThinRhomb | ThickRhomb | HalfThinL | HalfThinR | HalfThickL | HalfThickR)
    }

    pub fn is_gap(self) -> bool {
        use TileKind::*;
        matches!(self, GapTriangle | GapQuad | RotorA | RotorB | RotorC)
    }

    pub fn is_composite(self) -> bool {
        use TileKind::*;
        matches!(self, T1 | T2 | T3 | Snake | Dog | T8 | T9 | T10 | T11)
    }

    pub const GAPS: [TileKind; 5] =
        [TileKind::GapTriangle, TileKind::GapQuad, TileKind::RotorA, TileKind::RotorB, TileKind::RotorC];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrokeClass {
    /// interior edge of the constituent rhomb filling
    RhombEdge,
    /// interior edge of a triangle or trapezoid subdivision
    Subdivision,
    /// symmetry axis of a kite or dart
    Axis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stroke {
    pub from: LatticePoint,
    pub to: LatticePoint,
    pub class: StrokeClass,
}

#[derive(Debug, Clone)]
pub struct ReferencePolygon {
    pub kind: TileKind,
    pub vertices: Vec<LatticePoint>,
    /// coordinates are `vertices / denom` in rhomb-edge units
    pub denom: i64,
    /// render-only strokes, never consulted by verification
    pub decoration: Vec<Stroke>,
    /// named vertices (the T12 labels a..r), in the same `denom` grid
    pub labels: BTreeMap<String, LatticePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RhombCensus {
    pub thin: u32,
    pub thick: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Robinson {
    /// 36-72-72
    GoldenTriangle,
    /// 36-36-108
    GoldenGnomon,
}

/// A Robinson triangle: the canonical triangle with legs `φ^scale`, apex at the
/// origin and legs along ζ⁰ and ζ¹ (golden) or ζ⁰ and ζ³ (gnomon), moved by `placement`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RobinsonPiece {
    pub kind: Robinson,
    pub scale: u32,
    pub placement: Placement,
}

impl RobinsonPiece {
    pub fn vertices(&self) -> [LatticePoint; 3] {
        let leg = LatticePoint::phi_zeta(self.scale, 0);
        let other = leg.rotate(match self.kind {
            Robinson::GoldenTriangle => 1,
            Robinson::GoldenGnomon => 3,
        });
        [LatticePoint::ZERO, leg, other].map(|p| self.placement.apply(p))
    }

    /// Area in thin-rhomb units.
    pub fn area(&self) -> GoldenRat {
        GoldenRat::new(area2(&self.vertices()), 2)
    }

    /// Recognise a Robinson triangle from its vertices.
    pub fn from_triangle(t: [LatticePoint; 3]) -> Option<RobinsonPiece> {
        let t = if orient(t[0], t[1], t[2]) < 0 { [t[0], t[2], t[1]] } else { t };
        for i in 0..3 {
            let (a, b, c) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
            for (kind, turn) in [(Robinson::GoldenTriangle, 1), (Robinson::GoldenGnomon, 3)] {
                if (b - a).rotate(turn) != c - a {
                    continue;
                }
                for s in 0..16 {
                    if let Some(k) = direction_index(b - a, s) {
                        return Some(RobinsonPiece { kind, scale: s, placement: Placement::new(k, false, a) });
                    }
                }
            }
        }
        None
    }
}

#[derive(Deserialize)]
struct RawPlacement {
    kind: String,
    rot: i32,
    refl: bool,
    t: [i64; 4],
}

impl RawPlacement {
    fn resolve(&self) -> (TileKind, Placement) {
        (self.kind.parse().expect("catalog kind"), Placement::new(self.rot, self.refl, LatticePoint(self.t)))
    }
}

#[derive(Deserialize)]
struct RawShape {
    kind: String,
    vertices: Vec<[i64; 4]>,
}

#[derive(Deserialize)]
struct RawKind {
    vertices: Vec<[i64; 4]>,
    denom: i64,
    #[serde(default)]
    rhombs: Vec<RawShape>,
    #[serde(default)]
    robinson: Vec<RawShape>,
    #[serde(default)]
    subdivision: Vec<RawPlacement>,
    #[serde(default)]
    labels: BTreeMap<String, [i64; 4]>,
    #[serde(default)]
    decoration: Vec<[[i64; 4]; 2]>,
}

#[derive(Deserialize)]
struct RawMove {
    piece: String,
    vertices: Vec<[i64; 4]>,
    rot: i32,
    refl: bool,
    t: [i64; 4],
}

#[derive(Deserialize)]
struct RawFrame {
    rot: i32,
    refl: bool,
    t: [i64; 4],
}

#[derive(Deserialize)]
struct RawShift {
    target_frame: RawFrame,
    moves: Vec<RawMove>,
}

#[derive(Deserialize)]
struct RawCatalog {
    version: u32,
    kinds: BTreeMap<String, RawKind>,
    shifts: BTreeMap<String, RawShift>,
}

/// A rigid half-rhomb move: the piece with `vertices` (base frame) goes to `to.apply(vertices)`.
#[derive(Debug, Clone)]
pub struct HalfRhombMove {
    pub piece: TileKind,
    pub vertices: [LatticePoint; 3],
    pub to: Placement,
}

#[derive(Debug, Clone)]
pub struct ShiftData {
    /// where the target's reference polygon sits in the base frame
    pub target_frame: Placement,
    pub moves: Vec<HalfRhombMove>,
}

pub(crate) struct Catalog {
    pub version: u32,
    polys: HashMap<TileKind, ReferencePolygon>,
    rhombs: HashMap<TileKind, Vec<(TileKind, Vec<LatticePoint>)>>,
    robinson: HashMap<TileKind, Vec<RobinsonPiece>>,
    subdivision: HashMap<TileKind, Vec<(TileKind, Placement)>>,
    convex: HashMap<TileKind, Vec<Vec<LatticePoint>>>,
    pub shifts: BTreeMap<(TileKind, TileKind), ShiftData>,
}

fn lp(v: &[i64; 4]) -> LatticePoint {
    LatticePoint(*v)
}

fn on_boundary(a: LatticePoint, b: LatticePoint, poly: &[LatticePoint]) -> bool {
    let n = poly.len();
    (0..n).any(|i| on_segment(a, poly[i], poly[(i + 1) % n]) && on_segment(b, poly[i], poly[(i + 1) % n]))
}

fn interior_strokes(poly: &[LatticePoint], pieces: &[Vec<LatticePoint>], class: StrokeClass) -> Vec<Stroke> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for p in pieces {
        for i in 0..p.len() {
            let (a, b) = (p[i], p[(i + 1) % p.len()]);
            let key = if a < b { (a, b) } else { (b, a) };
            if !on_boundary(a, b, poly) && seen.insert(key) {
                out.push(Stroke { from: key.0, to: key.1, class });
            }
        }
    }
    out
}

fn robinson_of_shape(kind: TileKind, verts: &[LatticePoint]) -> Vec<RobinsonPiece> {
    use TileKind::*;
    let tri = |a: LatticePoint, b: LatticePoint, c: LatticePoint| {
        RobinsonPiece::from_triangle([a, b, c]).expect("Robinson triangle")
    };
    match kind {
        HalfKiteL | HalfKiteR | HalfDartL | HalfDartR | HalfThinL | HalfThinR | HalfThickL | HalfThickR => {
            vec![tri(verts[0], verts[1], verts[2])]
        }
        // split along the symmetry axis v0-v2
        Kite | Dart => vec![tri(verts[0], verts[1], verts[2]), tri(verts[0], verts[2], verts[3])],
        // thin along the short diagonal, thick along the long one: v1-v3 and v0-v2
        ThinRhomb => vec![tri(verts[0], verts[1], verts[3]), tri(verts[2], verts[3], verts[1])],
        ThickRhomb => vec![tri(verts[1], verts[2], verts[0]), tri(verts[3], verts[0], verts[2])],
        _ => Vec::new(),
    }
}

impl Catalog {
    fn load() -> Catalog {
        let raw: RawCatalog = serde_json::from_str(CATALOG_JSON).expect("catalog.json parses");
        let mut polys = HashMap::new();
        let mut rhombs = HashMap::new();
        let mut robinson = HashMap::new();
        let mut subdivision = HashMap::new();
        let mut convex = HashMap::new();
        for (name, rk) in &raw.kinds {
            let kind: TileKind = name.parse().expect("catalog kind");
            let vertices: Vec<LatticePoint> = rk.vertices.iter().map(lp).collect();
            let rh: Vec<(TileKind, Vec<LatticePoint>)> =
                rk.rhombs.iter().map(|r| (r.kind.parse().unwrap(), r.vertices.iter().map(lp).collect())).collect();
            let mut rb: Vec<RobinsonPiece> = rk
                .robinson
                .iter()
                .map(|r| {
                    RobinsonPiece::from_triangle([lp(&r.vertices[0]), lp(&r.vertices[1]), lp(&r.vertices[2])]).unwrap()
                })
                .collect();
            if rb.is_empty() {
                rb = robinson_of_shape(kind, &vertices);
            }
            let sub: Vec<(TileKind, Placement)> = rk.subdivision.iter().map(RawPlacement::resolve).collect();
            let mut decoration = Vec::new();
            if !rh.is_empty() {
                let pieces: Vec<Vec<LatticePoint>> = rh.iter().map(|r| r.1.clone()).collect();
                decoration = interior_strokes(&vertices, &pieces, StrokeClass::RhombEdge);
            } else if !rb.is_empty() && !kind.is_p2_half() && !kind.is_p3() {
                let pieces: Vec<Vec<LatticePoint>> = rb.iter().map(|r| r.vertices().to_vec()).collect();
                let class = if matches!(kind, TileKind::Kite | TileKind::Dart) {
                    StrokeClass::Axis
                } else {
                    StrokeClass::Subdivision
                };
                decoration = interior_strokes(&vertices, &pieces, class);
            } else if !rk.decoration.is_empty() {
                decoration = rk
                    .decoration
                    .iter()
                    .map(|[a, b]| Stroke { from: lp(a), to: lp(b), class: StrokeClass::Subdivision })
                    .collect();
            }
            let mut pieces_for_sub = Vec::new();
            for (k, pl) in &sub {
                pieces_for_sub.push(raw.kinds[k.name()].vertices.iter().map(|v| pl.apply(lp(v))).collect::<Vec<_>>());
            }
            if !pieces_for_sub.is_empty() {
                decoration = interior_strokes(&vertices, &pieces_for_sub, StrokeClass::Subdivision);
            }
            let cv: Vec<Vec<LatticePoint>> = if !rh.is_empty() {
                rh.iter().map(|r| r.1.clone()).collect()
            } else if !rb.is_empty() {
                rb.iter().map(|r| r.vertices().to_vec()).collect()
            } else {
                triangulate(&simplify(&vertices)).into_iter().map(|t| t.to_vec()).collect()
            };
            let labels = rk.labels.iter().map(|(k, v)| (k.clone(), lp(v))).collect();
            polys.insert(kind, ReferencePolygon { kind, vertices, denom: rk.denom, decoration, labels });
            if !rh.is_empty() {
                rhombs.insert(kind, rh);
            }
            if !rb.is_empty() {
                robinson.insert(kind, rb);
            }
            if !sub.is_empty() {
                subdivision.insert(kind, sub);
            }
            convex.insert(kind, cv);
        }
        let mut shifts = BTreeMap::new();
        for (key, s) in &raw.shifts {
            let (b, t) = key.split_once("->").expect("shift key");
            let moves = s
                .moves
                .iter()
                .map(|m| HalfRhombMove {
                    piece: m.piece.parse().unwrap_or(if m.piece == "HalfThin" {
                        TileKind::HalfThinL
                    } else {
                        TileKind::HalfThickL
                    }),
                    vertices: [lp(&m.vertices[0]), lp(&m.vertices[1]), lp(&m.vertices[2])],
                    to: Placement::new(m.rot, m.refl, lp(&m.t)),
                })
                .collect();
            let f = &s.target_frame;
            shifts.insert(
                (b.parse().unwrap(), t.parse().unwrap()),
                ShiftData { target_frame: Placement::new(f.rot, f.refl, lp(&f.t)), moves },
            );
        }
        Catalog { version: raw.version, polys, rhombs, robinson, subdivision, convex, shifts }
    }
}

pub(crate) fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(Catalog::load)
}

pub fn catalog_version() -> u32 {
    catalog().version
}

pub fn polygon(kind: TileKind) -> &'static ReferencePolygon {
    &catalog().polys[&kind]
}

/// Exact area in thin-rhomb units (the thick rhomb has area φ).
pub fn area_units(kind: TileKind) -> GoldenRat {
    let p = polygon(kind);
    GoldenRat::new(area2(&p.vertices), 2 * p.denom * p.denom)
}

pub fn rhomb_census(kind: TileKind) -> Result<RhombCensus, TileError> {
    let r = catalog().rhombs.get(&kind).ok_or(TileError::Unsupported { op: "rhomb_census", kind })?;
    let thin = r.iter().filter(|x| x.0 == TileKind::ThinRhomb).count() as u32;
    Ok(RhombCensus { thin, thick: r.len() as u32 - thin })
}

/// The constituent rhombs of a cutout composite, in its reference frame.
pub fn rhomb_filling(kind: TileKind) -> Result<&'static [(TileKind, Vec<LatticePoint>)], TileError> {
    catalog().rhombs.get(&kind).map(|v| v.as_slice()).ok_or(TileError::Unsupported { op: "rhomb_filling", kind })
}

pub fn robinson_decomposition(kind: TileKind) -> Result<Vec<RobinsonPiece>, TileError> {
    use TileKind::*;
    let ok = matches!(
        kind,
        T8 | T9
            | T10
            | T11
            | ThinRhomb
            | ThickRhomb
            | HalfThinL
            | HalfThinR
            | HalfThickL
            | HalfThickR
            | HalfKiteL
            | HalfKiteR
            | HalfDartL
            | HalfDartR
            | Kite
            | Dart
    );
    if !ok {
        return Err(TileError::Unsupported { op: "robinson_decomposition", kind });
    }
    let src = match kind {
        T10 => T8,
        T11 => T9,
        k => k,
    };
    Ok(catalog().robinson[&src].clone())
}

/// The T13/T14 subdivision of a rotor gap, in the rotor's reference frame.
pub fn rotor_subdivision(kind: TileKind) -> Result<&'static [(TileKind, Placement)], TileError> {
    catalog().subdivision.get(&kind).map(|v| v.as_slice()).ok_or(TileError::Unsupported { op: "subdivide_rotor", kind })
}

/// Convex pieces covering the reference polygon (rhombs, Robinson triangles or an
/// ear-clipping triangulation); used by the exact overlap tests.
pub fn convex_pieces(kind: TileKind) -> &'static [Vec<LatticePoint>] {
    &catalog().convex[&kind]
}

pub fn shift_data(base: TileKind, target: TileKind) -> Option<&'static ShiftData> {
    catalog().shifts.get(&(base, target))
}

/// A named vertex of the T12 family, on the 1/11 grid.
pub fn t12_label(name: &str) -> LatticePoint {
    polygon(TileKind::T12).labels[name]
}

/// Squared length `|q−p|²` where both points are on a `denom` grid.
pub fn squared_length(p: LatticePoint, q: LatticePoint, denom: i64) -> GoldenRat {
    GoldenRat::new((q - p).norm2x(), 2 * denom * denom)
}

/// Interior angles in units of 36°, one per vertex; `None` for an angle that is
/// not a multiple of 36°.
pub fn interior_angles(poly: &[LatticePoint]) -> Vec<Option<u32>> {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly[(i + n - 1) % n];
            let b = poly[i];
            let c = poly[(i + 1) % n];
            let din = b - a;
            let dout = c - b;
            (0..10)
                .find(|&k| {
                    let r = din.rotate(k);
                    crate::golden::cross(r, dout).is_zero() && crate::golden::dot2(r, dout).signum() > 0
                })
                .map(|k| {
                    let turn = if k > 5 { k - 10 } else { k };
                    (5 - turn) as u32
                })
        })
        .collect()
}

/// Exact check that the boundary never crosses or runs along itself. Two
/// corners may coincide (T1 pinches at one vertex), nothing else may touch.
pub fn is_simple(poly: &[LatticePoint]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b, c, d) = (poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]);
            if !crate::golden::segments_touch(a, b, c, d) {
                continue;
            }
            let pinch = (a == c || a == d || b == c || b == d) && !crate::golden::segments_overlap(a, b, c, d);
            let crossing = orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
            if !pinch || crossing {
                return false;
            }
        }
    }
    true
}

/// Golden length exponent helper: `φᵉ` as GoldenInt.
pub fn phi(e: i32) -> GoldenInt {
    GoldenInt::phi_pow(e)
}
